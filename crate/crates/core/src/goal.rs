//! Choosing the reference goal node for a planning request.

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingTable, SimilarityConfig};
use crate::error::GoalError;
use crate::kitchen::Classifier;
use crate::model::{ObjectNode, PlanningRequest};
use crate::store::UniversalFoon;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSelection {
    pub goal: ObjectNode,
    pub source_subgraph: String,
    /// Thresholded pair count between request names and the recipe's
    /// ingredients.
    pub score: usize,
    /// Recipe ingredients matched by at least one request name.
    pub covered: usize,
    pub recipe_ingredients: Vec<String>,
}

/// Picks the recipe of the requested dish class whose ingredients best
/// match the request.
///
/// Ties on the pair count go to the candidate with the larger share of its
/// ingredients covered, then to the smaller subgraph id.
pub fn identify_goal_node(
    foon: &UniversalFoon,
    table: &EmbeddingTable,
    cfg: &SimilarityConfig,
    classifier: &Classifier<'_>,
    request: &PlanningRequest,
) -> Result<GoalSelection, GoalError> {
    request.validate()?;
    let names = request.names();
    let candidates = foon.find_goal_candidates(&request.dish_type, classifier)?;

    let mut best: Option<GoalSelection> = None;
    for c in candidates {
        let score = table.compute_similarity(cfg, &names, &c.ingredients);
        let covered = c
            .ingredients
            .iter()
            .filter(|s| table.is_similar_to_any(cfg, s, &names))
            .count();
        let sel = GoalSelection {
            goal: c.goal,
            source_subgraph: c.subgraph_id,
            score,
            covered,
            recipe_ingredients: c.ingredients,
        };
        if best.as_ref().is_none_or(|b| beats(&sel, b)) {
            best = Some(sel);
        }
    }
    best.ok_or(GoalError::NoRecipes(request.dish_type.clone()))
}

fn beats(a: &GoalSelection, b: &GoalSelection) -> bool {
    if a.score != b.score {
        return a.score > b.score;
    }
    // compare covered fractions without division; an empty recipe covers 0
    let lhs = a.covered * b.recipe_ingredients.len().max(1);
    let rhs = b.covered * a.recipe_ingredients.len().max(1);
    if lhs != rhs {
        return lhs > rhs;
    }
    a.source_subgraph < b.source_subgraph
}
