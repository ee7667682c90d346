//! Task-tree generation over functional object-oriented networks (FOON).
//!
//! A FOON is a bipartite graph of object nodes and motion nodes, grouped
//! into functional units. This crate merges annotated subgraphs into one
//! network, retrieves task trees for a goal object, adapts them to a
//! requested ingredient set and turns the result into per-ingredient
//! progress lines for review.

pub mod config;
pub mod document;
pub mod embedding;
pub mod error;
pub mod goal;
pub mod graphviz;
pub mod kitchen;
pub mod legacy;
pub mod model;
pub mod modify;
pub mod progress;
pub mod retrieval;
pub mod store;
pub mod validate;

pub use embedding::{EmbeddingTable, SimilarityConfig};
pub use error::Error;
pub use kitchen::{Classifier, KitchenModel};
pub use model::{
    FunctionalUnit, Ingredient, MotionNode, ObjectKey, ObjectNode, PlanningRequest, StateLabel,
    Subgraph, SubstitutionKind, SubstitutionRecord, TaskTree,
};
pub use retrieval::{Planner, SearchBudget, TreeCache};
pub use store::UniversalFoon;
