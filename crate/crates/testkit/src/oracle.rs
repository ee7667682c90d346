//! Brute-force reference implementations. They share no code with the
//! planner beyond the data model and the vector table.

use std::collections::{BTreeSet, HashMap, HashSet};

use foonplan_core::model::ObjectKey;
use foonplan_core::{EmbeddingTable, KitchenModel, ObjectNode, SimilarityConfig, TaskTree, UniversalFoon};

/// Number of (i, s) pairs whose similarity is strictly above the threshold.
pub fn count_pairs(table: &EmbeddingTable, cfg: &SimilarityConfig, a: &[String], b: &[String]) -> usize {
    let mut count = 0;
    for x in a {
        for y in b {
            if table.similarity(x, y) > cfg.threshold() {
                count += 1;
            }
        }
    }
    count
}

/// Names seen as inputs nobody produces, or inside composites.
pub fn raw_names(foon: &UniversalFoon) -> HashSet<String> {
    let produced: HashSet<ObjectKey> = foon
        .units()
        .iter()
        .flat_map(|u| u.outputs.iter().map(ObjectNode::key))
        .collect();
    let mut raw = HashSet::new();
    for u in foon.units() {
        for n in u.inputs.iter().chain(&u.outputs) {
            raw.extend(n.ingredients.iter().cloned());
        }
        for n in &u.inputs {
            if !produced.contains(&n.key()) {
                raw.insert(n.name.clone());
            }
        }
    }
    raw
}

pub struct Judge<'a> {
    pub table: &'a EmbeddingTable,
    pub cfg: SimilarityConfig,
    pub kitchen: &'a KitchenModel,
    pub requested: &'a [String],
    raw: HashSet<String>,
    base: HashSet<String>,
}

impl<'a> Judge<'a> {
    pub fn new(
        foon: &UniversalFoon,
        table: &'a EmbeddingTable,
        cfg: SimilarityConfig,
        kitchen: &'a KitchenModel,
        requested: &'a [String],
    ) -> Self {
        Judge {
            table,
            cfg,
            kitchen,
            requested,
            raw: raw_names(foon),
            base: kitchen.base_items().map(|k| k.name.clone()).collect(),
        }
    }

    pub fn is_ingredient(&self, name: &str) -> bool {
        let utensil = self.kitchen.utensils().any(|u| u == name);
        !utensil && (self.raw.contains(name) || self.base.contains(name) || self.requested.iter().any(|r| r == name))
    }

    pub fn available(&self, node: &ObjectNode) -> bool {
        if node.location.is_some() {
            return false;
        }
        let key = node.key();
        if self.kitchen.base_items().any(|b| *b == key) {
            return true;
        }
        node.states.len() == 1
            && node.states[0].argument.is_none()
            && matches!(node.states[0].label.as_str(), "whole" | "raw")
    }

    /// Ingredient names carried by a node.
    pub fn names_of(&self, node: &ObjectNode) -> Vec<String> {
        std::iter::once(&node.name)
            .chain(&node.ingredients)
            .filter(|n| self.is_ingredient(n))
            .cloned()
            .collect()
    }

    fn requested(&self, name: &str) -> bool {
        self.requested.iter().any(|r| r == name)
    }

    pub fn relevant(&self, unit: &foonplan_core::FunctionalUnit) -> bool {
        let names: Vec<String> = unit.inputs.iter().flat_map(|n| self.names_of(n)).collect();
        names.is_empty()
            || names.iter().any(|n| {
                self.requested(n) || self.requested.iter().any(|i| self.table.similarity(n, i) > self.cfg.threshold())
            })
    }

    pub fn needs(&self, unit: &foonplan_core::FunctionalUnit) -> BTreeSet<ObjectKey> {
        unit.inputs
            .iter()
            .filter(|n| !(self.is_ingredient(&n.name) && !self.requested(&n.name)))
            .filter(|n| !self.available(n))
            .map(ObjectNode::key)
            .collect()
    }

    /// Overlap score of a set of units, over their full input lists.
    pub fn score(&self, foon: &UniversalFoon, units: &BTreeSet<usize>) -> usize {
        let mut names: Vec<String> = Vec::new();
        for &u in units {
            for n in &foon.units()[u].inputs {
                for name in self.names_of(n) {
                    if !names.contains(&name) {
                        names.push(name);
                    }
                }
            }
        }
        count_pairs(self.table, &self.cfg, self.requested, &names)
    }
}

type Alternatives = BTreeSet<BTreeSet<usize>>;

/// Every unit set that derives `goal` under the pruning rules, by memoized
/// recursion over the (acyclic) FOON.
pub fn all_derivations(foon: &UniversalFoon, judge: &Judge<'_>, goal: &ObjectKey) -> Alternatives {
    fn of_unit(
        foon: &UniversalFoon,
        judge: &Judge<'_>,
        u: usize,
        memo: &mut HashMap<usize, Alternatives>,
    ) -> Alternatives {
        if let Some(a) = memo.get(&u) {
            return a.clone();
        }
        let mut acc: Alternatives = [BTreeSet::from([u])].into();
        for key in judge.needs(&foon.units()[u]) {
            let mut options: Alternatives = BTreeSet::new();
            for (p, unit) in foon.units().iter().enumerate() {
                if unit.outputs.iter().any(|o| o.key() == key) && judge.relevant(unit) {
                    options.extend(of_unit(foon, judge, p, memo));
                }
            }
            acc = acc
                .iter()
                .flat_map(|a| options.iter().map(move |o| a.union(o).copied().collect()))
                .collect();
            if acc.is_empty() {
                break;
            }
        }
        memo.insert(u, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    let mut out = Alternatives::new();
    for (u, unit) in foon.units().iter().enumerate() {
        if unit.outputs.iter().any(|o| &o.key() == goal) {
            out.extend(of_unit(foon, judge, u, &mut memo));
        }
    }
    out
}

/// Best (score, size) among all derivations: highest score, then fewest
/// units. `None` when the goal cannot be derived.
pub fn best_derivation(foon: &UniversalFoon, judge: &Judge<'_>, goal: &ObjectKey) -> Option<(usize, usize)> {
    all_derivations(foon, judge, goal)
        .iter()
        .map(|s| (judge.score(foon, s), s.len()))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
}

/// Ingredient-class names appearing anywhere in a tree.
pub fn tree_ingredients(tree: &TaskTree, is_ingredient: impl Fn(&str) -> bool) -> BTreeSet<String> {
    tree.nodes()
        .flat_map(|n| std::iter::once(&n.name).chain(&n.ingredients))
        .filter(|n| is_ingredient(n))
        .cloned()
        .collect()
}

/// Names that occur as an input object or inside an input composite.
pub fn input_names(tree: &TaskTree) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = tree
        .units
        .iter()
        .flat_map(|u| &u.inputs)
        .flat_map(|n| std::iter::once(&n.name).chain(&n.ingredients))
        .cloned()
        .collect();
    out.extend(std::iter::once(&tree.goal.name).chain(&tree.goal.ingredients).cloned());
    out
}
