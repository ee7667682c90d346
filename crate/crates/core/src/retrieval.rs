//! Backward search for the reference task tree of a goal object.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::RwLock;

use indexmap::IndexSet;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding::{EmbeddingTable, SimilarityConfig};
use crate::error::RetrievalError;
use crate::kitchen::{Classifier, KitchenModel};
use crate::model::{FunctionalUnit, ObjectKey, TaskTree};
use crate::store::{hex, UniversalFoon, UnitId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Cap on alternative sub-trees held for any one object at a time.
    pub max_paths: usize,
    /// Cap on the length of a root-to-leaf chain of units.
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_paths: 10_000,
            max_depth: 100,
        }
    }
}

/// One link of the backward search: the unit being expanded and the chain
/// of units above it.
#[derive(Clone, Copy, Debug)]
pub struct SearchNode<'p> {
    pub unit: UnitId,
    pub parent: Option<&'p SearchNode<'p>>,
    pub depth: usize,
}

impl SearchNode<'_> {
    fn contains(&self, unit: UnitId) -> bool {
        let mut cur = Some(self);
        while let Some(n) = cur {
            if n.unit == unit {
                return true;
            }
            cur = n.parent;
        }
        false
    }
}

/// A goal-reaching, executable selection of units in execution order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePath {
    pub units: Vec<UnitId>,
    pub overlap_score: usize,
    pub length: usize,
}

/// Stored reference trees, shared between concurrent planners.
#[derive(Debug, Default)]
pub struct TreeCache {
    entries: RwLock<HashMap<String, TaskTree>>,
    dir: Option<PathBuf>,
}

impl TreeCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Cache that also persists entries as `<key>.json` under `dir`.
    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        TreeCache {
            entries: RwLock::default(),
            dir: Some(dir.into()),
        }
    }

    pub fn get(&self, key: &str) -> Option<TaskTree> {
        if let Some(t) = self.entries.read().expect("cache lock").get(key) {
            return Some(t.clone());
        }
        let path = self.dir.as_ref()?.join(format!("{key}.json"));
        let text = std::fs::read_to_string(path).ok()?;
        let tree: TaskTree = serde_json::from_str(&text).ok()?;
        self.entries
            .write()
            .expect("cache lock")
            .insert(key.to_string(), tree.clone());
        Some(tree)
    }

    pub fn put(&self, key: &str, tree: &TaskTree) {
        let mut entries = self.entries.write().expect("cache lock");
        if let Some(dir) = &self.dir {
            let write = || -> std::io::Result<()> {
                std::fs::create_dir_all(dir)?;
                let tmp = dir.join(format!(".{key}.tmp"));
                std::fs::write(&tmp, crate::document::to_canonical(tree))?;
                std::fs::rename(tmp, dir.join(format!("{key}.json")))
            };
            if let Err(e) = write() {
                log::warn!("tree cache: could not persist {key}: {e}");
            }
        }
        entries.insert(key.to_string(), tree.clone());
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything a retrieval needs besides the goal and the ingredient set.
#[derive(Clone, Copy)]
pub struct Planner<'a> {
    pub foon: &'a UniversalFoon,
    pub table: &'a EmbeddingTable,
    pub cfg: SimilarityConfig,
    pub kitchen: &'a KitchenModel,
    pub budget: SearchBudget,
    pub cache: Option<&'a TreeCache>,
}

impl<'a> Planner<'a> {
    pub fn new(
        foon: &'a UniversalFoon,
        table: &'a EmbeddingTable,
        cfg: SimilarityConfig,
        kitchen: &'a KitchenModel,
    ) -> Self {
        Planner {
            foon,
            table,
            cfg,
            kitchen,
            budget: SearchBudget::default(),
            cache: None,
        }
    }

    pub fn with_budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_cache(mut self, cache: &'a TreeCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn classifier<'c>(&'c self, ingredients: &'c [String]) -> Classifier<'c> {
        Classifier::new(self.kitchen, self.foon.raw_names()).with_names(ingredients)
    }

    fn cache_key(&self, goal: &ObjectKey, ingredients: &[String]) -> String {
        let mut names: Vec<&String> = ingredients.iter().collect();
        names.sort();
        let mut h = Sha256::new();
        h.update(self.foon.fingerprint().as_bytes());
        h.update(b"\0");
        h.update(goal.to_string().as_bytes());
        for n in names {
            h.update(b"\0");
            h.update(n.as_bytes());
        }
        h.update(self.cfg.threshold().to_bits().to_le_bytes());
        h.update((self.budget.max_paths as u64).to_le_bytes());
        h.update((self.budget.max_depth as u64).to_le_bytes());
        h.update(self.kitchen.to_document().as_bytes());
        hex(&h.finalize())
    }

    /// Reference task tree for `goal` that best overlaps `ingredients`.
    pub fn retrieve_reference_task_tree(
        &self,
        goal: &ObjectKey,
        ingredients: &[String],
    ) -> Result<TaskTree, RetrievalError> {
        let key = self.cache.map(|_| self.cache_key(goal, ingredients));
        if let (Some(cache), Some(key)) = (self.cache, &key) {
            if let Some(tree) = cache.get(key) {
                log::debug!("reference tree for {goal} served from cache");
                return Ok(tree);
            }
        }
        let classifier = self.classifier(ingredients);
        let mut search = Search::new(self, &classifier, ingredients);
        let path = search.best_path(goal)?;
        let tree = search.to_tree(goal, &path);
        if let (Some(cache), Some(key)) = (self.cache, &key) {
            cache.put(key, &tree);
        }
        Ok(tree)
    }

    /// Every candidate path for `goal`, in enumeration order.
    pub fn candidate_paths(
        &self,
        goal: &ObjectKey,
        ingredients: &[String],
    ) -> Result<Vec<CandidatePath>, RetrievalError> {
        let classifier = self.classifier(ingredients);
        Search::new(self, &classifier, ingredients).candidates(goal)
    }
}

/// Pruning and availability rules shared by the search and by callers that
/// need to reason about the same pruned units.
pub struct Rules<'r> {
    planner: &'r Planner<'r>,
    classifier: &'r Classifier<'r>,
    ingredients: &'r [String],
}

impl<'r> Rules<'r> {
    pub fn new(planner: &'r Planner<'r>, classifier: &'r Classifier<'r>, ingredients: &'r [String]) -> Self {
        Rules {
            planner,
            classifier,
            ingredients,
        }
    }

    fn requested(&self, name: &str) -> bool {
        self.ingredients.iter().any(|i| i == name)
    }

    /// Ingredient names a unit touches through its inputs.
    pub fn unit_ingredients(&self, unit: &FunctionalUnit) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for node in &unit.inputs {
            for n in self.classifier.ingredients_of(node) {
                if !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
        }
        out
    }

    /// A producer is relevant when it touches no ingredient at all, or when
    /// at least one of its ingredients is requested or similar to a
    /// requested one.
    pub fn is_relevant(&self, unit: &FunctionalUnit) -> bool {
        let names = self.unit_ingredients(unit);
        names.is_empty()
            || names.iter().any(|n| {
                self.requested(n)
                    || self
                        .planner
                        .table
                        .is_similar_to_any(&self.planner.cfg, n, self.ingredients)
            })
    }

    /// The unit with unrequested ingredient inputs removed.
    pub fn prune(&self, unit: &FunctionalUnit) -> FunctionalUnit {
        let mut pruned = unit.clone();
        pruned
            .inputs
            .retain(|n| !(self.classifier.is_ingredient(&n.name) && !self.requested(&n.name)));
        pruned
    }

    /// Distinct keys of pruned inputs that the kitchen cannot supply.
    pub fn needs(&self, unit: &FunctionalUnit) -> Vec<ObjectKey> {
        let mut keys: Vec<ObjectKey> = Vec::new();
        for n in &self.prune(unit).inputs {
            if self.planner.kitchen.is_available(n) {
                continue;
            }
            let k = n.key();
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys
    }
}

struct Search<'s> {
    planner: &'s Planner<'s>,
    rules: Rules<'s>,
    relevant: HashMap<UnitId, bool>,
    needs: HashMap<UnitId, Vec<ObjectKey>>,
    unmet: IndexSet<ObjectKey>,
    explored: usize,
    deepest: usize,
}

type Alternatives = Vec<Vec<UnitId>>;

impl<'s> Search<'s> {
    fn new(planner: &'s Planner<'s>, classifier: &'s Classifier<'s>, ingredients: &'s [String]) -> Self {
        Search {
            planner,
            rules: Rules::new(planner, classifier, ingredients),
            relevant: HashMap::new(),
            needs: HashMap::new(),
            unmet: IndexSet::new(),
            explored: 0,
            deepest: 0,
        }
    }

    fn budget_error(&self, goal: &ObjectKey, reason: String) -> RetrievalError {
        RetrievalError::BudgetExceeded {
            goal: goal.clone(),
            reason,
            explored: self.explored,
            depth: self.deepest,
        }
    }

    fn is_relevant(&mut self, id: UnitId) -> bool {
        let unit = self.planner.foon.unit(id);
        let rules = &self.rules;
        *self.relevant.entry(id).or_insert_with(|| rules.is_relevant(unit))
    }

    fn needs_of(&mut self, id: UnitId) -> Vec<ObjectKey> {
        let unit = self.planner.foon.unit(id);
        let rules = &self.rules;
        self.needs.entry(id).or_insert_with(|| rules.needs(unit)).clone()
    }

    /// All sub-trees rooted at `node.unit`, each in execution order.
    fn expand(&mut self, goal: &ObjectKey, node: &SearchNode<'_>) -> Result<Alternatives, RetrievalError> {
        self.deepest = self.deepest.max(node.depth);
        if node.depth > self.planner.budget.max_depth {
            return Err(self.budget_error(
                goal,
                format!("chain deeper than {} units", self.planner.budget.max_depth),
            ));
        }
        let mut per_need: Vec<Alternatives> = Vec::new();
        for key in self.needs_of(node.unit) {
            let producers: Vec<UnitId> = self
                .planner
                .foon
                .producer_ids(&key)
                .iter()
                .copied()
                .filter(|&p| !node.contains(p))
                .collect();
            let mut options = Vec::new();
            for p in producers {
                if !self.is_relevant(p) {
                    continue;
                }
                let child = SearchNode {
                    unit: p,
                    parent: Some(node),
                    depth: node.depth + 1,
                };
                options.extend(self.expand(goal, &child)?);
                self.check_width(goal, options.len())?;
            }
            if options.is_empty() {
                self.unmet.insert(key);
                return Ok(Vec::new());
            }
            per_need.push(options);
        }

        let combined: Alternatives = if per_need.is_empty() {
            vec![vec![node.unit]]
        } else {
            let total = per_need.iter().map(Vec::len).try_fold(1usize, |acc, n| acc.checked_mul(n));
            self.check_width(goal, total.unwrap_or(usize::MAX))?;
            per_need
                .iter()
                .multi_cartesian_product()
                .map(|combo| {
                    let mut order: Vec<UnitId> = Vec::new();
                    for part in combo {
                        for &u in part {
                            if !order.contains(&u) {
                                order.push(u);
                            }
                        }
                    }
                    if !order.contains(&node.unit) {
                        order.push(node.unit);
                    }
                    order
                })
                .collect()
        };
        self.explored += combined.len();
        Ok(combined)
    }

    fn check_width(&self, goal: &ObjectKey, width: usize) -> Result<(), RetrievalError> {
        if width > self.planner.budget.max_paths {
            return Err(self.budget_error(
                goal,
                format!("more than {} alternative paths", self.planner.budget.max_paths),
            ));
        }
        Ok(())
    }

    fn score(&self, units: &[UnitId]) -> usize {
        let mut names: Vec<String> = Vec::new();
        for &u in units {
            for n in self.rules.unit_ingredients(self.planner.foon.unit(u)) {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
        }
        self.planner
            .table
            .compute_similarity(&self.planner.cfg, self.rules.ingredients, &names)
    }

    fn candidates(mut self, goal: &ObjectKey) -> Result<Vec<CandidatePath>, RetrievalError> {
        self.enumerate(goal)
    }

    fn enumerate(&mut self, goal: &ObjectKey) -> Result<Vec<CandidatePath>, RetrievalError> {
        let roots = self.planner.foon.producer_ids(goal).to_vec();
        if roots.is_empty() {
            return Err(RetrievalError::NotProducible(goal.clone()));
        }
        let mut out = Vec::new();
        for root in roots {
            let node = SearchNode {
                unit: root,
                parent: None,
                depth: 1,
            };
            for units in self.expand(goal, &node)? {
                out.push(CandidatePath {
                    overlap_score: self.score(&units),
                    length: units.len(),
                    units,
                });
                self.check_width(goal, out.len())?;
            }
        }
        Ok(out)
    }

    fn best_path(&mut self, goal: &ObjectKey) -> Result<CandidatePath, RetrievalError> {
        let candidates = self.enumerate(goal)?;
        let mut best: Option<CandidatePath> = None;
        for c in candidates {
            let better = match &best {
                None => true,
                Some(b) => c.overlap_score > b.overlap_score || (c.overlap_score == b.overlap_score && c.length < b.length),
            };
            if better {
                best = Some(c);
            }
        }
        log::debug!(
            "retrieval for {goal}: {} alternatives explored, deepest chain {}",
            self.explored,
            self.deepest
        );
        best.ok_or_else(|| RetrievalError::NoPath {
            goal: goal.clone(),
            unmet: self.unmet.iter().cloned().collect(),
        })
    }

    fn to_tree(&self, goal: &ObjectKey, path: &CandidatePath) -> TaskTree {
        let foon = self.planner.foon;
        let units: Vec<FunctionalUnit> = path.units.iter().map(|&u| self.rules.prune(foon.unit(u))).collect();
        let root = path.units.last().expect("paths are non-empty");
        let goal_node = foon
            .unit(*root)
            .outputs
            .iter()
            .find(|o| &o.key() == goal)
            .cloned()
            .expect("root produces the goal");
        TaskTree {
            goal: goal_node,
            units,
            provenance: Vec::new(),
        }
    }
}

/// Units of `path` as a set, for order-insensitive comparisons.
pub fn unit_set(path: &CandidatePath) -> HashSet<UnitId> {
    path.units.iter().copied().collect()
}
