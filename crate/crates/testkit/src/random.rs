//! Seeded generators for random subgraphs, FOONs and requests.

use foonplan_core::model::ObjectKey;
use foonplan_core::{
    EmbeddingTable, FunctionalUnit, Ingredient, KitchenModel, ObjectNode, PlanningRequest, SimilarityConfig,
    Subgraph, UniversalFoon,
};
use rand::seq::SliceRandom;
use rand::Rng;

const NAMES: [&str; 5] = ["onion", "tomato", "egg", "bowl", "knife"];
const STATES: [&str; 5] = ["whole", "sliced", "diced", "mixed", "boiled"];
const VERBS: [&str; 4] = ["slice", "dice", "mix", "boil"];

fn random_node(rng: &mut impl Rng) -> ObjectNode {
    let mut node = ObjectNode::new(NAMES.choose(rng).unwrap());
    for _ in 0..rng.gen_range(0..=2) {
        node = node.with_state(STATES.choose(rng).unwrap());
    }
    if rng.gen_bool(0.2) {
        node = node.at("cutting board");
    }
    if rng.gen_bool(0.15) {
        node = node.with_ingredients(["onion", "tomato"].into_iter().take(rng.gen_range(1..=2)));
    }
    node
}

/// A small subgraph over a tiny vocabulary, so that random subgraphs share
/// units often. The goal is explicit.
pub fn random_subgraph(rng: &mut impl Rng, id: &str) -> Subgraph {
    let units: Vec<FunctionalUnit> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let inputs = (0..rng.gen_range(1..=2)).map(|_| random_node(rng)).collect();
            let outputs = (0..rng.gen_range(1..=2)).map(|_| random_node(rng)).collect();
            FunctionalUnit::new(inputs, VERBS.choose(rng).unwrap(), outputs)
        })
        .collect();
    let goal = units.last().unwrap().outputs[0].clone();
    Subgraph::new(id, units).with_goal(goal)
}

/// A random acyclic FOON with one goal, a vector table over its ingredient
/// names and a requested ingredient subset.
pub struct RandomInstance {
    pub subgraph: Subgraph,
    pub foon: UniversalFoon,
    pub table: EmbeddingTable,
    pub cfg: SimilarityConfig,
    pub kitchen: KitchenModel,
    pub goal: ObjectKey,
    pub ingredients: Vec<String>,
}

pub struct FoonShape {
    pub max_units: usize,
    pub max_producers: usize,
    pub max_ingredients: usize,
}

impl Default for FoonShape {
    fn default() -> Self {
        FoonShape {
            max_units: 15,
            max_producers: 3,
            max_ingredients: 6,
        }
    }
}

pub fn random_table(rng: &mut impl Rng, names: &[String], dim: usize) -> EmbeddingTable {
    let entries: Vec<(&str, Vec<f64>)> = names
        .iter()
        .map(|n| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            v[0] += 0.05; // never the zero vector
            (n.as_str(), v)
        })
        .collect();
    EmbeddingTable::from_vectors(dim, entries).expect("valid random vectors")
}

/// Builds a layered FOON backwards from the goal. A unit only consumes
/// objects created at a deeper layer, so the result is acyclic.
pub fn random_instance(rng: &mut impl Rng, shape: &FoonShape) -> RandomInstance {
    let n_ing = rng.gen_range(2..=shape.max_ingredients);
    let ing: Vec<String> = (0..n_ing).map(|i| format!("ing{i}")).collect();
    let mut budget = rng.gen_range(3..=shape.max_units);
    let goal = ObjectNode::new("dish").with_state("done");

    let mut units: Vec<FunctionalUnit> = Vec::new();
    let mut queue: std::collections::VecDeque<(ObjectNode, usize)> = [(goal.clone(), 0)].into();
    let mut created: Vec<(ObjectNode, usize)> = Vec::new();
    let mut fresh = 0usize;

    while let Some((target, depth)) = queue.pop_front() {
        let producers = rng.gen_range(1..=shape.max_producers).min(budget);
        for _ in 0..producers {
            budget -= 1;
            let mut inputs: Vec<ObjectNode> = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let r: f64 = rng.gen();
                let node = if r < 0.35 {
                    ObjectNode::new(ing.choose(rng).unwrap()).with_state("whole")
                } else if r < 0.60 {
                    fresh += 1;
                    let n = ObjectNode::new(ing.choose(rng).unwrap()).with_state(&format!("s{fresh}"));
                    queue.push_back((n.clone(), depth + 1));
                    created.push((n.clone(), depth + 1));
                    n
                } else if r < 0.75 {
                    fresh += 1;
                    let n = ObjectNode::new(&format!("part{fresh}")).with_state("made");
                    queue.push_back((n.clone(), depth + 1));
                    created.push((n.clone(), depth + 1));
                    n
                } else if r < 0.85 {
                    let deeper: Vec<&(ObjectNode, usize)> = created.iter().filter(|(_, d)| *d > depth).collect();
                    match deeper.choose(rng) {
                        Some((n, _)) => n.clone(),
                        None => ObjectNode::new("knife"),
                    }
                } else if r < 0.95 {
                    ObjectNode::new(if rng.gen_bool(0.5) { "knife" } else { "bowl" })
                } else {
                    ObjectNode::new(ing.choose(rng).unwrap()).with_state("rotten")
                };
                if !inputs.contains(&node) {
                    inputs.push(node);
                }
            }
            let verb = VERBS.choose(rng).unwrap();
            units.push(FunctionalUnit::new(inputs, verb, vec![target.clone()]));
        }
    }

    let subgraph = Subgraph::new("random", units).with_goal(goal.clone());
    let foon = UniversalFoon::merge(std::slice::from_ref(&subgraph)).expect("random foon merges");
    let take = rng.gen_range(1..=n_ing);
    let mut requested: Vec<String> = ing.choose_multiple(rng, take).cloned().collect();
    requested.sort();
    RandomInstance {
        table: random_table(rng, &ing, 3),
        cfg: SimilarityConfig::default(),
        kitchen: KitchenModel::new()
            .with_item("knife", &[])
            .with_item("bowl", &[])
            .with_utensil("knife")
            .with_utensil("bowl"),
        goal: goal.key(),
        ingredients: requested,
        subgraph,
        foon,
    }
}

/// Requested (name, state) pairs the salad fixture can satisfy, directly or
/// through substitution.
pub const SALAD_POOL: [(&str, &str); 28] = [
    ("onion", "peeled"),
    ("onion", "sliced"),
    ("onion", "whole"),
    ("cucumber", "diced"),
    ("cucumber", "sliced"),
    ("cucumber", "peeled"),
    ("tomato", "diced"),
    ("tomato", "sliced"),
    ("tomato", "chopped"),
    ("olive", "whole"),
    ("oregano", "dried"),
    ("feta cheese", "dried"),
    ("lettuce", "chopped"),
    ("celery", "chopped"),
    ("potato", "boiled"),
    ("potato", "diced"),
    ("potato", "sliced"),
    ("egg", "boiled"),
    ("egg", "sliced"),
    ("egg", "chopped"),
    ("apple", "diced"),
    ("banana", "sliced"),
    ("raisin", "dried"),
    ("dill", "chopped"),
    ("prunes", "dried"),
    ("leeks", "chopped"),
    ("carrot", "sliced"),
    ("chives", "whole"),
];

pub fn random_salad_request(rng: &mut impl Rng, id: &str) -> PlanningRequest {
    let mut picked: Vec<(&str, &str)> = Vec::new();
    let want = rng.gen_range(1..=5);
    while picked.len() < want {
        let p = *SALAD_POOL.choose(rng).unwrap();
        if !picked.iter().any(|(n, _)| *n == p.0) {
            picked.push(p);
        }
    }
    PlanningRequest::new("salad", picked.iter().map(|(n, s)| Ingredient::new(n, s)).collect()).with_id(id)
}
