//! Executability check for task trees.

use std::collections::HashSet;

use thiserror::Error;

use crate::kitchen::KitchenModel;
use crate::model::{ObjectKey, ObjectNode, SubstitutionKind, TaskTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutabilityError {
    #[error("unit {index} ({verb}) needs {input}, which is neither available nor produced earlier")]
    UnmetInput {
        index: usize,
        verb: String,
        input: Box<ObjectNode>,
    },
    #[error("no unit produces the goal {0}")]
    GoalNotProduced(ObjectNode),
}

/// True when `node` is in the kitchen, directly or through the item it was
/// substituted for.
pub fn is_supplied(node: &ObjectNode, tree: &TaskTree, kitchen: &KitchenModel) -> bool {
    if kitchen.is_available(node) {
        return true;
    }
    tree.provenance.iter().any(|r| match r.kind {
        SubstitutionKind::Object if node.name == r.original => {
            let mut borrowed = node.clone();
            borrowed.rename(&r.original, &r.replacement);
            kitchen.is_available(&borrowed)
        }
        SubstitutionKind::State
            if r.subject.as_deref() == Some(node.name.as_str()) && node.has_label(&r.original) =>
        {
            let mut borrowed = node.clone();
            for s in &mut borrowed.states {
                if s.label == r.original {
                    s.label = r.replacement.clone();
                }
            }
            kitchen.is_available(&borrowed)
        }
        _ => false,
    })
}

/// Checks that every input is available or produced by an earlier unit,
/// and that the goal is produced (or available, for an empty tree).
pub fn validate_executable(tree: &TaskTree, kitchen: &KitchenModel) -> Result<(), ExecutabilityError> {
    let mut produced: HashSet<ObjectKey> = HashSet::new();
    for (index, unit) in tree.units.iter().enumerate() {
        for input in &unit.inputs {
            if !produced.contains(&input.key()) && !is_supplied(input, tree, kitchen) {
                return Err(ExecutabilityError::UnmetInput {
                    index,
                    verb: unit.verb().to_string(),
                    input: Box::new(input.clone()),
                });
            }
        }
        produced.extend(unit.outputs.iter().map(ObjectNode::key));
    }
    let goal = tree.goal.key();
    if produced.contains(&goal) || (tree.units.is_empty() && is_supplied(&tree.goal, tree, kitchen)) {
        Ok(())
    } else {
        Err(ExecutabilityError::GoalNotProduced(tree.goal.clone()))
    }
}
