//! Small configuration documents: dish classes, state classes and the
//! integration policy.

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::document::from_json;
use crate::error::DocumentError;
use crate::model::normalize_name;

/// Manually curated recipe taxonomy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DishClassConfig {
    pub classes: Vec<String>,
    #[serde(default)]
    pub assignment: IndexMap<String, String>,
}

impl DishClassConfig {
    pub fn new<'a>(classes: impl IntoIterator<Item = &'a str>) -> Self {
        DishClassConfig {
            classes: classes.into_iter().map(normalize_name).collect(),
            assignment: IndexMap::new(),
        }
    }

    pub fn assign(mut self, subgraph: &str, class: &str) -> Self {
        self.assignment
            .insert(subgraph.to_string(), normalize_name(class));
        self
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut cfg: DishClassConfig = from_json(text)?.value;
        cfg.classes = cfg.classes.iter().map(|c| normalize_name(c)).collect();
        for v in cfg.assignment.values_mut() {
            *v = normalize_name(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn is_declared(&self, class: &str) -> bool {
        self.classes.iter().any(|c| c == class)
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        for (id, class) in &self.assignment {
            if !self.is_declared(class) {
                return Err(DocumentError::Config(format!(
                    "subgraph {id:?} assigned to undeclared dish class {class:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Grouping of state labels into physical-state categories.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateClassConfig {
    pub classes: Vec<String>,
    pub assignment: IndexMap<String, String>,
}

impl StateClassConfig {
    pub fn new<'a>(classes: impl IntoIterator<Item = &'a str>) -> Self {
        StateClassConfig {
            classes: classes.into_iter().map(normalize_name).collect(),
            assignment: IndexMap::new(),
        }
    }

    pub fn assign(mut self, state: &str, class: &str) -> Self {
        self.assignment
            .insert(normalize_name(state), normalize_name(class));
        self
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw: StateClassConfig = from_json(text)?.value;
        let mut cfg = StateClassConfig::new(raw.classes.iter().map(String::as_str));
        for (state, class) in &raw.assignment {
            let key = normalize_name(state);
            if cfg.assignment.contains_key(&key) {
                return Err(DocumentError::Config(format!(
                    "state {key:?} assigned to more than one class"
                )));
            }
            cfg = cfg.assign(state, class);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        for (state, class) in &self.assignment {
            if !self.classes.contains(class) {
                return Err(DocumentError::Config(format!(
                    "state {state:?} assigned to undeclared state class {class:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn class_of(&self, state: &str) -> Option<&str> {
        self.assignment.get(state).map(String::as_str)
    }
}

/// Motion verbs whose units can take any number of extra ingredients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPolicy {
    pub accepting_verbs: IndexSet<String>,
}

impl IntegrationPolicy {
    pub fn new<'a>(verbs: impl IntoIterator<Item = &'a str>) -> Result<Self, DocumentError> {
        let policy = IntegrationPolicy {
            accepting_verbs: verbs.into_iter().map(normalize_name).collect(),
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw: IntegrationPolicy = from_json(text)?.value;
        Self::new(raw.accepting_verbs.iter().map(String::as_str))
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.accepting_verbs.is_empty() {
            return Err(DocumentError::Config(
                "integration policy needs at least one accepting verb".into(),
            ));
        }
        Ok(())
    }

    pub fn accepts(&self, verb: &str) -> bool {
        self.accepting_verbs.contains(verb)
    }
}

impl Default for IntegrationPolicy {
    fn default() -> Self {
        IntegrationPolicy::new(["mix", "stir", "add", "pour", "sprinkle", "combine", "toss"])
            .expect("default verbs are non-empty")
    }
}
