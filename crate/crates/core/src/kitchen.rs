//! What the kitchen already has, and which names count as ingredients.

use std::collections::BTreeSet;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::DocumentError;
use crate::model::{normalize_name, ObjectKey, ObjectNode, StateLabel};

/// States that make an unplaced object available without any action.
pub const PRELIMINARY_STATES: [&str; 2] = ["whole", "raw"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KitchenModel {
    base_items: IndexSet<ObjectKey>,
    utensils: IndexSet<String>,
}

#[derive(Serialize, Deserialize)]
struct KitchenFile {
    #[serde(default)]
    base_items: Vec<BaseItem>,
    #[serde(default)]
    utensils: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct BaseItem {
    name: String,
    #[serde(default)]
    states: Vec<String>,
}

impl KitchenModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_item(mut self, name: &str, states: &[&str]) -> Self {
        self.base_items
            .insert(ObjectKey::new(name, states.iter().map(|s| StateLabel::new(s))));
        self
    }

    pub fn with_utensil(mut self, name: &str) -> Self {
        self.utensils.insert(normalize_name(name));
        self
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let file: KitchenFile = crate::document::from_json(text)?.value;
        let mut k = KitchenModel::new();
        for item in &file.base_items {
            if normalize_name(&item.name).is_empty() {
                return Err(DocumentError::Config("kitchen base item with empty name".into()));
            }
            let states: Vec<&str> = item.states.iter().map(String::as_str).collect();
            k = k.with_item(&item.name, &states);
        }
        for u in &file.utensils {
            k = k.with_utensil(u);
        }
        Ok(k)
    }

    pub fn to_document(&self) -> String {
        let file = KitchenFile {
            base_items: self
                .base_items
                .iter()
                .map(|k| BaseItem {
                    name: k.name.clone(),
                    states: k.states.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
            utensils: self.utensils.iter().cloned().collect(),
        };
        crate::document::to_canonical(&file)
    }

    pub fn is_utensil(&self, name: &str) -> bool {
        self.utensils.contains(name)
    }

    pub fn utensils(&self) -> impl Iterator<Item = &str> {
        self.utensils.iter().map(String::as_str)
    }

    pub fn base_items(&self) -> impl Iterator<Item = &ObjectKey> {
        self.base_items.iter()
    }

    /// True when the key names a preliminary item: listed as a base item,
    /// or a lone `whole`/`raw` state.
    pub fn is_available_key(&self, key: &ObjectKey) -> bool {
        if self.base_items.contains(key) {
            return true;
        }
        match key.states.iter().next() {
            Some(s) if key.states.len() == 1 => {
                s.argument.is_none() && PRELIMINARY_STATES.contains(&s.label.as_str())
            }
            _ => false,
        }
    }

    /// An object is available when it has not been placed anywhere yet and
    /// its key is available. A whole onion already sitting on a cutting
    /// board is the result of an action, not a kitchen staple.
    pub fn is_available(&self, node: &ObjectNode) -> bool {
        node.location.is_none() && self.is_available_key(&node.key())
    }
}

/// Separates ingredient-class names from utensils and intermediate products.
///
/// A name is an ingredient when it is not a utensil and it is known as a raw
/// material: it appears somewhere in the FOON as an unproduced input or in a
/// composite's ingredient list, it is a kitchen base item, or it was
/// explicitly requested.
#[derive(Clone, Debug)]
pub struct Classifier<'a> {
    kitchen: &'a KitchenModel,
    raw_names: &'a IndexSet<String>,
    extra: BTreeSet<String>,
}

impl<'a> Classifier<'a> {
    pub fn new(kitchen: &'a KitchenModel, raw_names: &'a IndexSet<String>) -> Self {
        let extra = kitchen
            .base_items
            .iter()
            .map(|k| k.name.clone())
            .filter(|n| !kitchen.is_utensil(n))
            .collect();
        Classifier {
            kitchen,
            raw_names,
            extra,
        }
    }

    pub fn with_names<'b>(mut self, names: impl IntoIterator<Item = &'b String>) -> Self {
        for n in names {
            if !self.kitchen.is_utensil(n) {
                self.extra.insert(n.clone());
            }
        }
        self
    }

    pub fn kitchen(&self) -> &KitchenModel {
        self.kitchen
    }

    pub fn is_utensil(&self, name: &str) -> bool {
        self.kitchen.is_utensil(name)
    }

    pub fn is_ingredient(&self, name: &str) -> bool {
        !self.kitchen.is_utensil(name)
            && (self.raw_names.contains(name) || self.extra.contains(name))
    }

    /// Ingredient names carried by a node: its own name and its composite
    /// entries, in that order.
    pub fn ingredients_of<'n>(&'n self, node: &'n ObjectNode) -> impl Iterator<Item = &'n str> + 'n {
        std::iter::once(node.name.as_str())
            .chain(node.ingredients.iter().map(String::as_str))
            .filter(move |n| self.is_ingredient(n))
    }
}
