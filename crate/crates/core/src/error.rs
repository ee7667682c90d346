use thiserror::Error;

use crate::model::ObjectKey;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid name {0:?}: names must be non-empty, trimmed and lowercase")]
    InvalidName(String),
    #[error("state label must be non-empty")]
    EmptyStateLabel,
    #[error("state {0:?} has an empty argument")]
    EmptyStateArgument(String),
    #[error("object {object:?} lists state {state:?} twice")]
    DuplicateState { object: String, state: String },
    #[error("object {object:?} lists ingredient {ingredient:?} twice")]
    DuplicateIngredient { object: String, ingredient: String },
    #[error("motion verb must be non-empty")]
    EmptyVerb,
    #[error("motion weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("functional unit {0:?} has no inputs")]
    NoInputs(String),
    #[error("functional unit {0:?} has no outputs")]
    NoOutputs(String),
    #[error("subgraph id must be non-empty")]
    EmptySubgraphId,
    #[error("subgraph {0:?}: units non-empty")]
    NoUnits(String),
    #[error("request has no ingredients")]
    EmptyRequest,
    #[error("request has no dish type")]
    EmptyDishType,
    #[error("request lists {0} twice")]
    DuplicateRequestIngredient(String),
}

/// Parse or validation failure for an on-disk document.
#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("line {line}, column {column}, field `{path}`: {message}")]
    Syntax {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("field `{path}`: {source}")]
    Invalid {
        path: String,
        #[source]
        source: ModelError,
    },
    #[error("line {line}: {message}")]
    Legacy { line: usize, message: String },
    #[error("embedding file line {line}: {message}")]
    Embedding { line: usize, message: String },
    #[error("{0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("subgraph {0:?} has no derivable goal: no output is left unconsumed")]
    NoGoal(String),
    #[error("subgraph {id:?} has an ambiguous goal; candidates: {candidates}")]
    AmbiguousGoal { id: String, candidates: String },
    #[error("subgraph id {0:?} appears twice with different content")]
    DuplicateSubgraph(String),
    #[error("dish class config assigns {subgraph:?} to undeclared class {class:?}")]
    UndeclaredClass { subgraph: String, class: String },
    #[error("dish class {0:?} is not declared")]
    UnknownDishClass(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("similarity threshold {0} outside [0, 1]")]
    BadThreshold(f64),
    #[error("no embedding basis for substitution of {0:?}")]
    NoBasis(String),
    #[error("no candidates to substitute {0:?} with")]
    NoCandidates(String),
}

#[derive(Debug, Error)]
pub enum GoalError {
    #[error("no recipes of type {0:?}")]
    NoRecipes(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("no functional unit produces {0}")]
    NotProducible(ObjectKey),
    #[error("no executable path to {goal}; unmet leaf dependencies: {}", unmet_list(.unmet))]
    NoPath { goal: ObjectKey, unmet: Vec<ObjectKey> },
    #[error("search budget exceeded ({reason}) while retrieving {goal}; {explored} alternatives explored, deepest chain {depth}")]
    BudgetExceeded {
        goal: ObjectKey,
        reason: String,
        explored: usize,
        depth: usize,
    },
}

fn unmet_list(keys: &[ObjectKey]) -> String {
    if keys.is_empty() {
        return "none recorded".into();
    }
    keys.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Error)]
pub enum ModifyError {
    #[error(transparent)]
    Goal(#[from] GoalError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("{name} cannot reach state {state:?}: no unit produces it")]
    MissingState { name: String, state: String },
    #[error("no state analog for {name} in state {state:?}")]
    NoStateAnalog { name: String, state: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot integrate {0}: no unit in the tree accepts additional ingredients")]
    Unintegrable(String),
    #[error("goal unreachable after removal of extraneous ingredients: {0}")]
    GoalUnreachable(String),
}

#[derive(Debug, Error)]
pub enum ProgressError {
    #[error("ingredient {0:?} never appears in the task tree")]
    IngredientAbsent(String),
    #[error("no score for ingredient {0:?}")]
    MissingScore(String),
    #[error("score {score} for {ingredient:?} is not one of 0, 1, 2")]
    ScoreOutOfRange { ingredient: String, score: u8 },
    #[error("scored ingredient {0:?} is not part of the recipe")]
    UnknownIngredient(String),
    #[error("recipe has no ingredients to score")]
    NoIngredients,
}

/// Crate-level error; the display form names the module that failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("foon_model: {0}")]
    Model(#[from] ModelError),
    #[error("document: {0}")]
    Document(#[from] DocumentError),
    #[error("foon_store: {0}")]
    Store(#[from] StoreError),
    #[error("embedding_similarity: {0}")]
    Embedding(#[from] EmbeddingError),
    #[error("goal_select: {0}")]
    Goal(#[from] GoalError),
    #[error("task_retrieval: {0}")]
    Retrieval(#[from] RetrievalError),
    #[error("tree_modification: {0}")]
    Modify(#[from] ModifyError),
    #[error("progress_line: {0}")]
    Progress(#[from] ProgressError),
    #[error("io: {context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
