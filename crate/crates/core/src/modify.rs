//! Adapting a reference task tree to the requested ingredient set.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::config::{IntegrationPolicy, StateClassConfig};
use crate::error::{ModifyError, RetrievalError};
use crate::goal::{identify_goal_node, GoalSelection};
use crate::kitchen::Classifier;
use crate::model::{
    FunctionalUnit, Ingredient, ObjectKey, ObjectNode, PlanningRequest, SubstitutionKind,
    SubstitutionRecord, TaskTree,
};
use crate::retrieval::Planner;
use crate::store::UniversalFoon;
use crate::validate::validate_executable;

/// Most frequent verb that brings each state label into existence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MotionVerbStats {
    pub verb_by_state: BTreeMap<String, String>,
}

impl MotionVerbStats {
    /// A unit produces label `s` for an object when one of its outputs
    /// carries `s` and no input of the same name does.
    pub fn build(foon: &UniversalFoon) -> Self {
        let mut counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for unit in foon.units() {
            let mut seen = HashSet::new();
            for out in &unit.outputs {
                for label in out.state_labels() {
                    let existed = unit
                        .inputs
                        .iter()
                        .any(|i| i.name == out.name && i.has_label(label));
                    if !existed && seen.insert(label.to_string()) {
                        *counts
                            .entry(label.to_string())
                            .or_default()
                            .entry(unit.verb().to_string())
                            .or_default() += 1;
                    }
                }
            }
        }
        let verb_by_state = counts
            .into_iter()
            .map(|(state, verbs)| {
                // BTreeMap order makes the first maximum the smallest verb
                let best = verbs
                    .iter()
                    .fold(None::<(&String, usize)>, |acc, (v, &n)| match acc {
                        Some((_, m)) if m >= n => acc,
                        _ => Some((v, n)),
                    })
                    .expect("non-empty")
                    .0
                    .clone();
                (state, best)
            })
            .collect();
        MotionVerbStats { verb_by_state }
    }

    pub fn verb_for(&self, state: &str) -> Option<&str> {
        self.verb_by_state.get(state).map(String::as_str)
    }
}

/// Configuration used while adapting a tree, beside the planner itself.
#[derive(Clone, Copy)]
pub struct Adaptation<'a> {
    pub state_classes: &'a StateClassConfig,
    pub stats: &'a MotionVerbStats,
    pub policy: &'a IntegrationPolicy,
}

/// Result of planning one request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub selection: GoalSelection,
    pub tree: TaskTree,
}

fn extend_names(base: &[String], name: &str) -> Vec<String> {
    let mut out = base.to_vec();
    if !out.iter().any(|n| n == name) {
        out.push(name.to_string());
    }
    out
}

/// Shortest subtree producing `name` in state `state`.
pub fn retrieve_subtree(
    planner: &Planner<'_>,
    ingredients: &[String],
    target: &Ingredient,
) -> Result<TaskTree, ModifyError> {
    let node = target.node();
    if planner.kitchen.is_available(&node) {
        return Ok(TaskTree::empty(node));
    }
    let keys = planner.foon.produced_keys_with_label(&target.name, &target.state);
    if keys.is_empty() {
        return Err(ModifyError::MissingState {
            name: target.name.clone(),
            state: target.state.clone(),
        });
    }
    let names = extend_names(ingredients, &target.name);
    let mut best: Option<TaskTree> = None;
    let mut first_err: Option<RetrievalError> = None;
    for key in &keys {
        match planner.retrieve_reference_task_tree(key, &names) {
            Ok(tree) => {
                if best.as_ref().is_none_or(|b| tree.len() < b.len()) {
                    best = Some(tree);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some(tree), _) => Ok(tree),
        (None, Some(e)) => Err(e.into()),
        (None, None) => unreachable!("keys is non-empty"),
    }
}

fn relabel(node: &mut ObjectNode, name: &str, from: &str, to: &str) {
    if node.name != name || node.has_label(to) {
        return;
    }
    for s in &mut node.states {
        if s.label == from {
            s.label = to.to_string();
        }
    }
}

/// Borrows the subtree of a same-class state of the same object and
/// relabels it to the requested state.
pub fn substitute_state(
    planner: &Planner<'_>,
    adaptation: &Adaptation<'_>,
    ingredients: &[String],
    target: &Ingredient,
) -> Result<TaskTree, ModifyError> {
    let (name, state) = (&target.name, &target.state);
    if !planner.foon.produced_keys_with_label(name, state).is_empty() {
        return Err(ModifyError::Precondition(format!("{target} is already producible")));
    }
    let no_analog = || ModifyError::NoStateAnalog {
        name: name.clone(),
        state: state.clone(),
    };
    let class = adaptation.state_classes.class_of(state).ok_or_else(no_analog)?;

    let mut best: Option<(String, TaskTree)> = None;
    for analog in planner.foon.produced_labels(name) {
        if analog == *state || adaptation.state_classes.class_of(&analog) != Some(class) {
            continue;
        }
        let Ok(tree) = retrieve_subtree(planner, ingredients, &Ingredient::new(name, &analog)) else {
            continue;
        };
        // produced_labels is sorted, so strict comparison keeps the smallest label on ties
        if best.as_ref().is_none_or(|(_, b)| tree.len() < b.len()) {
            best = Some((analog, tree));
        }
    }
    let (analog, mut tree) = best.ok_or_else(no_analog)?;

    relabel(&mut tree.goal, name, &analog, state);
    let verb = adaptation.stats.verb_for(state);
    let mut verb_changed = false;
    for unit in &mut tree.units {
        let creates = unit.outputs.iter().any(|o| o.name == *name && o.has_label(&analog))
            && !unit.inputs.iter().any(|i| i.name == *name && i.has_label(&analog));
        for n in unit.inputs.iter_mut().chain(unit.outputs.iter_mut()) {
            relabel(n, name, &analog, state);
        }
        if creates {
            if let Some(v) = verb {
                unit.motion.verb = v.to_string();
                verb_changed = true;
            }
        }
    }
    tree.provenance.push(SubstitutionRecord {
        kind: SubstitutionKind::State,
        subject: Some(name.clone()),
        original: state.clone(),
        replacement: analog.clone(),
        confidence: 100.0 * planner.table.similarity(state, &analog),
        note: (!verb_changed).then(|| "verb unchanged".to_string()),
    });
    Ok(tree)
}

/// Borrows the subtree of the nearest known ingredient and renames it.
pub fn substitute_object(
    planner: &Planner<'_>,
    adaptation: &Adaptation<'_>,
    ingredients: &[String],
    target: &Ingredient,
) -> Result<TaskTree, ModifyError> {
    let x = &target.name;
    if planner.foon.contains_object(x) {
        return Err(ModifyError::Precondition(format!("{x} already appears in the network")));
    }
    let candidates: Vec<&str> = planner
        .foon
        .raw_names()
        .iter()
        .map(String::as_str)
        .filter(|n| !planner.kitchen.is_utensil(n) && *n != x.as_str())
        .collect();
    let (y, confidence) = planner.table.nearest_ingredient(x, &candidates)?;
    log::info!("substituting {x} with {y} ({confidence:.1}%)");

    let borrowed_names: Vec<String> = ingredients
        .iter()
        .map(|n| if n == x { y.clone() } else { n.clone() })
        .collect();
    let stand_in = Ingredient::new(&y, &target.state);
    let mut tree = match retrieve_subtree(planner, &borrowed_names, &stand_in) {
        Err(ModifyError::MissingState { .. }) => {
            substitute_state(planner, adaptation, &borrowed_names, &stand_in)?
        }
        other => other?,
    };
    tree.rename(&y, x);
    for r in &mut tree.provenance {
        if r.subject.as_deref() == Some(y.as_str()) {
            r.subject = Some(x.clone());
        }
    }
    tree.provenance.insert(
        0,
        SubstitutionRecord {
            kind: SubstitutionKind::Object,
            subject: None,
            original: x.clone(),
            replacement: y,
            confidence,
            note: None,
        },
    );
    Ok(tree)
}

/// Splices `subtree` in front of the earliest unit that accepts extra
/// ingredients and feeds its goal into that unit.
pub fn integrate_subtree(
    tree: &TaskTree,
    subtree: &TaskTree,
    policy: &IntegrationPolicy,
) -> Result<TaskTree, ModifyError> {
    let name = subtree.goal.name.clone();
    let target = tree
        .units
        .iter()
        .position(|u| policy.accepts(u.verb()))
        .ok_or_else(|| ModifyError::Unintegrable(subtree.goal.to_string()))?;

    let mut units: Vec<FunctionalUnit> = tree.units[..target].to_vec();
    for u in &subtree.units {
        if !units.contains(u) {
            units.push(u.clone());
        }
    }
    let at = units.len();
    units.extend(tree.units[target..].iter().cloned());

    let mut carriers: HashSet<ObjectKey> = HashSet::new();
    {
        let unit = &mut units[at];
        if !unit.inputs.iter().any(|i| i.key() == subtree.goal.key()) {
            unit.inputs.push(subtree.goal.clone());
        }
        carriers.extend(add_to_outputs(unit, &name));
    }
    for unit in &mut units[at + 1..] {
        let mut fed = false;
        for input in &mut unit.inputs {
            if carriers.contains(&input.key()) {
                input.push_ingredient(&name);
                fed = true;
            }
        }
        if fed {
            carriers.extend(add_to_outputs(unit, &name));
        }
    }
    let mut goal = tree.goal.clone();
    if carriers.contains(&goal.key()) && goal.name != name {
        goal.push_ingredient(&name);
    }
    let mut provenance = tree.provenance.clone();
    for r in &subtree.provenance {
        if !provenance.contains(r) {
            provenance.push(r.clone());
        }
    }
    Ok(TaskTree {
        goal,
        units,
        provenance,
    })
}

/// Records `name` in the unit's composite outputs, or in its first output
/// when none is a composite. Returns the keys that now carry it.
fn add_to_outputs(unit: &mut FunctionalUnit, name: &str) -> Vec<ObjectKey> {
    let mut keys = Vec::new();
    let composites: Vec<usize> = (0..unit.outputs.len())
        .filter(|&i| !unit.outputs[i].ingredients.is_empty())
        .collect();
    let chosen = if composites.is_empty() { vec![0] } else { composites };
    for i in chosen {
        let out = &mut unit.outputs[i];
        if out.name != name {
            out.push_ingredient(name);
        }
        keys.push(out.key());
    }
    keys
}

fn content_inputs(unit: &FunctionalUnit, classifier: &Classifier<'_>) -> usize {
    unit.inputs
        .iter()
        .filter(|n| !classifier.is_utensil(&n.name) || !n.ingredients.is_empty())
        .count()
}

/// Deletes every ingredient outside `keep_names` (plus the goal), drops
/// units that are left with nothing to act on, and rewires their consumers.
pub fn remove_extraneous(
    tree: &TaskTree,
    keep_names: &[String],
    classifier: &Classifier<'_>,
) -> Result<TaskTree, ModifyError> {
    let goal_name = tree.goal.name.clone();
    let extraneous =
        |n: &str| classifier.is_ingredient(n) && n != goal_name && !keep_names.iter().any(|k| k == n);
    let strip = |node: &mut ObjectNode| node.ingredients.retain(|i| !extraneous(i));

    let mut units: Vec<FunctionalUnit> = Vec::new();
    let mut had_content: Vec<bool> = Vec::new();
    for unit in &tree.units {
        had_content.push(content_inputs(unit, classifier) > 0);
        let mut u = unit.clone();
        u.inputs.retain(|n| !extraneous(&n.name));
        u.outputs.retain(|n| !extraneous(&n.name));
        u.inputs.iter_mut().for_each(strip);
        u.outputs.iter_mut().for_each(strip);
        units.push(u);
    }
    let mut goal = tree.goal.clone();
    strip(&mut goal);

    loop {
        let dead = units.iter().enumerate().position(|(i, u)| {
            u.inputs.is_empty()
                || u.outputs.is_empty()
                || (had_content[i] && content_inputs(u, classifier) == 0)
                || u.outputs.iter().all(|o| u.inputs.contains(o))
        });
        let Some(d) = dead else { break };
        let removed = units.remove(d);
        had_content.remove(d);
        for consumer in &mut units[d..] {
            let mut rewired = Vec::new();
            for input in consumer.inputs.drain(..) {
                if removed.outputs.iter().any(|o| o.key() == input.key()) {
                    if let Some(src) = removed.inputs.iter().find(|i| i.name == input.name) {
                        rewired.push(src.clone());
                    }
                } else {
                    rewired.push(input);
                }
            }
            consumer.inputs = rewired;
        }
    }

    let result = TaskTree {
        goal,
        units,
        provenance: tree.provenance.clone(),
    };
    validate_executable(&result, classifier.kitchen())
        .map_err(|e| ModifyError::GoalUnreachable(e.to_string()))?;
    Ok(result)
}

/// True when some input node of the tree is `name` in state `state`.
pub fn tree_has_ingredient(tree: &TaskTree, target: &Ingredient) -> bool {
    tree.units
        .iter()
        .flat_map(|u| u.inputs.iter())
        .any(|n| n.name == target.name && n.has_label(&target.state))
}

/// Plans a request end to end: goal selection, reference retrieval,
/// missing-ingredient subtrees, integration and clean-up.
pub fn construct_final_task_tree(
    planner: &Planner<'_>,
    adaptation: &Adaptation<'_>,
    request: &PlanningRequest,
) -> Result<Plan, ModifyError> {
    let names = request.names();
    let classifier = planner.classifier(&names);
    let selection = identify_goal_node(planner.foon, planner.table, &planner.cfg, &classifier, request)?;
    let mut tree = planner.retrieve_reference_task_tree(&selection.goal.key(), &names)?;

    for ing in &request.ingredients {
        if tree_has_ingredient(&tree, ing) {
            continue;
        }
        let subtree = if planner.foon.contains_object(&ing.name) || planner.kitchen.is_available(&ing.node()) {
            match retrieve_subtree(planner, &names, ing) {
                Err(ModifyError::MissingState { .. }) => substitute_state(planner, adaptation, &names, ing)?,
                other => other?,
            }
        } else {
            substitute_object(planner, adaptation, &names, ing)?
        };
        tree = integrate_subtree(&tree, &subtree, adaptation.policy)?;
    }
    let tree = remove_extraneous(&tree, &names, &classifier)?;
    Ok(Plan { selection, tree })
}
