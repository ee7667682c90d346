//! Loaders for the files under the workspace `fixtures/` directory.

use std::path::{Path, PathBuf};

use foonplan_core::config::{DishClassConfig, IntegrationPolicy, StateClassConfig};
use foonplan_core::document::parse_subgraph;
use foonplan_core::modify::{Adaptation, MotionVerbStats};
use foonplan_core::{EmbeddingTable, KitchenModel, Planner, SimilarityConfig, Subgraph, UniversalFoon};

pub const SALAD_SUBGRAPHS: [&str; 7] = [
    "greek_salad",
    "potato_salad",
    "garden_salad",
    "fruit_salad",
    "cucumber_salad",
    "egg_salad",
    "onion_soup",
];

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(rel: &str) -> PathBuf {
    dir().join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(path(rel)).unwrap_or_else(|e| panic!("fixture {rel}: {e}"))
}

pub fn subgraph(rel: &str) -> Subgraph {
    parse_subgraph(&read(rel)).unwrap_or_else(|e| panic!("fixture {rel}: {e}")).value
}

/// The Fig. 2 subgraph and its kitchen.
pub fn fig2() -> (Subgraph, KitchenModel) {
    (
        subgraph("fig2/subgraph.json"),
        KitchenModel::parse(&read("fig2/kitchen.json")).expect("fig2 kitchen"),
    )
}

/// Tiny hand-built vectors used by the similarity examples.
pub fn spec_vectors() -> EmbeddingTable {
    EmbeddingTable::parse(&read("spec_vectors.txt")).expect("spec vectors")
}

/// Salad recipes plus every configuration file a full plan needs.
pub struct SaladWorld {
    pub subgraphs: Vec<Subgraph>,
    pub dish_classes: DishClassConfig,
    pub foon: UniversalFoon,
    pub table: EmbeddingTable,
    pub kitchen: KitchenModel,
    pub state_classes: StateClassConfig,
    pub policy: IntegrationPolicy,
    pub stats: MotionVerbStats,
}

impl SaladWorld {
    pub fn load() -> Self {
        let subgraphs: Vec<Subgraph> = SALAD_SUBGRAPHS
            .iter()
            .map(|id| subgraph(&format!("salads/{id}.json")))
            .collect();
        let dish_classes = DishClassConfig::parse(&read("salads/dish_classes.json")).expect("dish classes");
        let foon = UniversalFoon::merge(&subgraphs)
            .and_then(|f| f.with_dish_classes(&dish_classes))
            .expect("salad foon");
        let stats = MotionVerbStats::build(&foon);
        SaladWorld {
            subgraphs,
            dish_classes,
            table: EmbeddingTable::parse(&read("salads/embeddings.txt")).expect("embeddings"),
            kitchen: KitchenModel::parse(&read("salads/kitchen.json")).expect("kitchen"),
            state_classes: StateClassConfig::parse(&read("salads/state_classes.json")).expect("state classes"),
            policy: IntegrationPolicy::parse(&read("salads/policy.json")).expect("policy"),
            foon,
            stats,
        }
    }

    pub fn planner(&self) -> Planner<'_> {
        Planner::new(&self.foon, &self.table, SimilarityConfig::default(), &self.kitchen)
    }

    pub fn adaptation(&self) -> Adaptation<'_> {
        Adaptation {
            state_classes: &self.state_classes,
            stats: &self.stats,
            policy: &self.policy,
        }
    }
}
