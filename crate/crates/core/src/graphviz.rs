//! DOT export of a task tree.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::model::{ObjectKey, TaskTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Input,
    Intermediate,
    Output,
}

impl Role {
    pub fn color(self) -> &'static str {
        match self {
            Role::Input => "green",
            Role::Intermediate => "yellow",
            Role::Output => "darkblue",
        }
    }
}

pub const MOTION_COLOR: &str = "red";

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Bipartite graph of the tree. An object produced by a unit is a distinct
/// node from the same object produced elsewhere; unproduced inputs share
/// one node per key.
pub fn render_dot(tree: &TaskTree) -> String {
    struct Obj {
        id: String,
        label: String,
        produced: bool,
        consumed: bool,
    }
    let mut objects: Vec<Obj> = Vec::new();
    let mut latest: HashMap<ObjectKey, usize> = HashMap::new();
    let mut edges: Vec<(String, String)> = Vec::new();

    for (i, unit) in tree.units.iter().enumerate() {
        let motion = format!("m{i}");
        for input in &unit.inputs {
            let key = input.key();
            let idx = match latest.get(&key) {
                Some(&idx) => idx,
                None => {
                    objects.push(Obj {
                        id: format!("o{}", objects.len()),
                        label: input.to_string(),
                        produced: false,
                        consumed: false,
                    });
                    latest.insert(key, objects.len() - 1);
                    objects.len() - 1
                }
            };
            objects[idx].consumed = true;
            edges.push((objects[idx].id.clone(), motion.clone()));
        }
        let mut seen = HashSet::new();
        for output in &unit.outputs {
            if !seen.insert(output.key()) {
                continue;
            }
            objects.push(Obj {
                id: format!("o{}", objects.len()),
                label: output.to_string(),
                produced: true,
                consumed: false,
            });
            latest.insert(output.key(), objects.len() - 1);
            edges.push((motion.clone(), objects[objects.len() - 1].id.clone()));
        }
    }

    let mut out = String::from("digraph task_tree {\n  rankdir=TB;\n");
    for o in &objects {
        let role = match (o.produced, o.consumed) {
            (false, _) => Role::Input,
            (true, true) => Role::Intermediate,
            (true, false) => Role::Output,
        };
        let font = if role == Role::Output { "white" } else { "black" };
        let _ = writeln!(
            out,
            "  {} [shape=ellipse, style=filled, fillcolor={}, fontcolor={}, label=\"{}\"];",
            o.id,
            role.color(),
            font,
            escape(&o.label)
        );
    }
    for (i, unit) in tree.units.iter().enumerate() {
        let _ = writeln!(
            out,
            "  m{i} [shape=box, style=filled, fillcolor={MOTION_COLOR}, fontcolor=white, label=\"{}\"];",
            escape(unit.verb())
        );
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  {a} -> {b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FunctionalUnit, ObjectNode};

    #[test]
    fn fig2_roles() {
        let tree = TaskTree {
            goal: ObjectNode::new("onion").with_state("sliced"),
            units: vec![
                FunctionalUnit::new(
                    vec![ObjectNode::new("onion").with_state("whole"), ObjectNode::new("cutting board")],
                    "pick-and-place",
                    vec![ObjectNode::new("onion").with_state("whole").at("cutting board")],
                ),
                FunctionalUnit::new(
                    vec![ObjectNode::new("onion").with_state("whole").at("cutting board"), ObjectNode::new("knife")],
                    "slice",
                    vec![ObjectNode::new("onion").with_state("sliced").at("cutting board")],
                ),
            ],
            provenance: vec![],
        };
        let dot = render_dot(&tree);
        assert_eq!(dot.matches("fillcolor=green").count(), 3);
        assert_eq!(dot.matches("fillcolor=yellow").count(), 1);
        assert_eq!(dot.matches("fillcolor=darkblue").count(), 1);
        assert_eq!(dot.matches("fillcolor=red").count(), 2);
        assert_eq!(dot.matches(" -> ").count(), 6);
        assert_eq!(render_dot(&tree), dot);
    }
}
