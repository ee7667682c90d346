//! Domain types for FOON graphs: object and motion nodes, functional units,
//! subgraphs, task trees and planning requests.
//!
//! Object nodes compare as sets: state labels and ingredient lists are
//! order-insensitive, so two annotations of the same bowl contents are the
//! same node. Functional units compare by motion verb plus input/output
//! multisets; the motion weight does not take part in identity.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Lowercases, trims and collapses internal whitespace.
pub fn normalize_name(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_normalized(name: &str) -> bool {
    !name.is_empty() && normalize_name(name) == name
}

/// A state word, optionally with a relational argument (`contains {onion}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawStateLabel")]
pub struct StateLabel {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argument: Option<String>,
}

#[derive(Deserialize)]
struct RawStateLabel {
    label: String,
    #[serde(default)]
    argument: Option<String>,
}

impl TryFrom<RawStateLabel> for StateLabel {
    type Error = ModelError;

    fn try_from(raw: RawStateLabel) -> Result<Self, Self::Error> {
        let state = StateLabel {
            label: normalize_name(&raw.label),
            argument: raw.argument.as_deref().map(normalize_name),
        };
        state.validate()?;
        Ok(state)
    }
}

impl StateLabel {
    pub fn new(label: &str) -> Self {
        StateLabel {
            label: normalize_name(label),
            argument: None,
        }
    }

    pub fn with_argument(label: &str, argument: &str) -> Self {
        StateLabel {
            label: normalize_name(label),
            argument: Some(normalize_name(argument)),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.label.is_empty() {
            return Err(ModelError::EmptyStateLabel);
        }
        if let Some(arg) = &self.argument {
            if arg.is_empty() {
                return Err(ModelError::EmptyStateArgument(self.label.clone()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.argument {
            Some(arg) => write!(f, "{} [{}]", self.label, arg),
            None => f.write_str(&self.label),
        }
    }
}

/// Retrieval identity of an object: its name and state set. Location and
/// contained ingredients are execution detail and do not participate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectKey {
    pub name: String,
    pub states: BTreeSet<StateLabel>,
}

impl ObjectKey {
    pub fn new(name: &str, states: impl IntoIterator<Item = StateLabel>) -> Self {
        ObjectKey {
            name: normalize_name(name),
            states: states.into_iter().collect(),
        }
    }

    /// Key for `name` in the single state `label`.
    pub fn simple(name: &str, label: &str) -> Self {
        Self::new(name, [StateLabel::new(label)])
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.states.iter().any(|s| s.label == label)
    }
}

impl fmt::Display for ObjectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.name)?;
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// One object side of the bipartite graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawObjectNode")]
pub struct ObjectNode {
    pub name: String,
    #[serde(default)]
    pub states: Vec<StateLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ingredients: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

#[derive(Deserialize)]
struct RawObjectNode {
    name: String,
    #[serde(default)]
    states: Vec<StateLabel>,
    #[serde(default)]
    ingredients: Vec<String>,
    #[serde(default)]
    location: Option<String>,
}

impl TryFrom<RawObjectNode> for ObjectNode {
    type Error = ModelError;

    fn try_from(raw: RawObjectNode) -> Result<Self, Self::Error> {
        let mut node = ObjectNode::new(&raw.name);
        for s in raw.states {
            node.push_state(s);
        }
        for i in &raw.ingredients {
            node.push_ingredient(i);
        }
        node.location = raw.location.as_deref().map(normalize_name);
        node.validate()?;
        Ok(node)
    }
}

impl ObjectNode {
    pub fn new(name: &str) -> Self {
        ObjectNode {
            name: normalize_name(name),
            states: Vec::new(),
            ingredients: Vec::new(),
            location: None,
        }
    }

    pub fn with_state(mut self, label: &str) -> Self {
        self.push_state(StateLabel::new(label));
        self
    }

    pub fn with_state_arg(mut self, label: &str, argument: &str) -> Self {
        self.push_state(StateLabel::with_argument(label, argument));
        self
    }

    pub fn with_ingredients<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.push_ingredient(n);
        }
        self
    }

    pub fn at(mut self, location: &str) -> Self {
        self.location = Some(normalize_name(location));
        self
    }

    /// Appends a state unless an equal label is already present.
    pub fn push_state(&mut self, state: StateLabel) {
        if !self.states.contains(&state) {
            self.states.push(state);
        }
    }

    /// Appends an ingredient name unless already present. Returns whether it
    /// was added.
    pub fn push_ingredient(&mut self, name: &str) -> bool {
        let name = normalize_name(name);
        if name.is_empty() || self.ingredients.contains(&name) {
            return false;
        }
        self.ingredients.push(name);
        true
    }

    pub fn key(&self) -> ObjectKey {
        ObjectKey {
            name: self.name.clone(),
            states: self.states.iter().cloned().collect(),
        }
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.states.iter().any(|s| s.label == label)
    }

    pub fn state_labels(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.label.as_str())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !is_normalized(&self.name) {
            return Err(ModelError::InvalidName(self.name.clone()));
        }
        let mut seen = BTreeSet::new();
        for s in &self.states {
            s.validate()?;
            if !seen.insert(s) {
                return Err(ModelError::DuplicateState {
                    object: self.name.clone(),
                    state: s.to_string(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for i in &self.ingredients {
            if !is_normalized(i) {
                return Err(ModelError::InvalidName(i.clone()));
            }
            if !seen.insert(i) {
                return Err(ModelError::DuplicateIngredient {
                    object: self.name.clone(),
                    ingredient: i.clone(),
                });
            }
        }
        if let Some(loc) = &self.location {
            if !is_normalized(loc) {
                return Err(ModelError::InvalidName(loc.clone()));
            }
        }
        Ok(())
    }

    fn canonical(&self) -> CanonicalObject<'_> {
        let mut states: Vec<&StateLabel> = self.states.iter().collect();
        states.sort();
        let mut ingredients: Vec<&str> = self.ingredients.iter().map(String::as_str).collect();
        ingredients.sort();
        CanonicalObject {
            name: &self.name,
            states,
            ingredients,
            location: self.location.as_deref(),
        }
    }

    /// Renames every occurrence of `from` (node name, location, state
    /// arguments, ingredient entries) to `to`.
    pub fn rename(&mut self, from: &str, to: &str) {
        if self.name == from {
            self.name = to.to_string();
        }
        if self.location.as_deref() == Some(from) {
            self.location = Some(to.to_string());
        }
        for s in &mut self.states {
            if s.argument.as_deref() == Some(from) {
                s.argument = Some(to.to_string());
            }
        }
        for i in &mut self.ingredients {
            if i == from {
                *i = to.to_string();
            }
        }
        let mut seen = BTreeSet::new();
        self.ingredients.retain(|i| seen.insert(i.clone()));
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct CanonicalObject<'a> {
    name: &'a str,
    states: Vec<&'a StateLabel>,
    ingredients: Vec<&'a str>,
    location: Option<&'a str>,
}

/// Set-semantics equality: names, state sets, ingredient sets and locations.
pub fn object_node_equals(a: &ObjectNode, b: &ObjectNode) -> bool {
    a.canonical() == b.canonical()
}

impl PartialEq for ObjectNode {
    fn eq(&self, other: &Self) -> bool {
        object_node_equals(self, other)
    }
}

impl Eq for ObjectNode {}

impl Hash for ObjectNode {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl PartialOrd for ObjectNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObjectNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

impl fmt::Display for ObjectNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())?;
        if !self.ingredients.is_empty() {
            write!(f, "[{}]", self.ingredients.join(", "))?;
        }
        if let Some(loc) = &self.location {
            write!(f, "@{loc}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawMotionNode")]
pub struct MotionNode {
    pub verb: String,
    /// Success rate carried from annotated data; parsed and kept, never
    /// used for ranking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Deserialize)]
struct RawMotionNode {
    verb: String,
    #[serde(default)]
    weight: Option<f64>,
}

impl TryFrom<RawMotionNode> for MotionNode {
    type Error = ModelError;

    fn try_from(raw: RawMotionNode) -> Result<Self, Self::Error> {
        let m = MotionNode {
            verb: normalize_name(&raw.verb),
            weight: raw.weight,
        };
        m.validate()?;
        Ok(m)
    }
}

impl MotionNode {
    pub fn new(verb: &str) -> Self {
        MotionNode {
            verb: normalize_name(verb),
            weight: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.verb.is_empty() {
            return Err(ModelError::EmptyVerb);
        }
        if let Some(w) = self.weight {
            if !(0.0..=1.0).contains(&w) {
                return Err(ModelError::WeightOutOfRange(w));
            }
        }
        Ok(())
    }
}

/// A single action: input objects, one motion, output objects.
///
/// Outputs may be fewer than inputs; objects that do not change can be
/// omitted from the output side.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFunctionalUnit")]
pub struct FunctionalUnit {
    pub inputs: Vec<ObjectNode>,
    pub motion: MotionNode,
    pub outputs: Vec<ObjectNode>,
}

#[derive(Deserialize)]
struct RawFunctionalUnit {
    #[serde(default)]
    inputs: Vec<ObjectNode>,
    motion: MotionNode,
    #[serde(default)]
    outputs: Vec<ObjectNode>,
}

impl TryFrom<RawFunctionalUnit> for FunctionalUnit {
    type Error = ModelError;

    fn try_from(raw: RawFunctionalUnit) -> Result<Self, Self::Error> {
        let unit = FunctionalUnit {
            inputs: raw.inputs,
            motion: raw.motion,
            outputs: raw.outputs,
        };
        unit.validate()?;
        Ok(unit)
    }
}

impl FunctionalUnit {
    pub fn new(inputs: Vec<ObjectNode>, verb: &str, outputs: Vec<ObjectNode>) -> Self {
        FunctionalUnit {
            inputs,
            motion: MotionNode::new(verb),
            outputs,
        }
    }

    pub fn verb(&self) -> &str {
        &self.motion.verb
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.inputs.is_empty() {
            return Err(ModelError::NoInputs(self.motion.verb.clone()));
        }
        if self.outputs.is_empty() {
            return Err(ModelError::NoOutputs(self.motion.verb.clone()));
        }
        self.motion.validate()?;
        for n in self.inputs.iter().chain(&self.outputs) {
            n.validate()?;
        }
        Ok(())
    }

    pub fn produces(&self, key: &ObjectKey) -> bool {
        self.outputs.iter().any(|o| &o.key() == key)
    }

    fn canonical(&self) -> (&str, Vec<CanonicalObject<'_>>, Vec<CanonicalObject<'_>>) {
        let mut inputs: Vec<_> = self.inputs.iter().map(ObjectNode::canonical).collect();
        inputs.sort();
        let mut outputs: Vec<_> = self.outputs.iter().map(ObjectNode::canonical).collect();
        outputs.sort();
        (&self.motion.verb, inputs, outputs)
    }

    pub fn rename(&mut self, from: &str, to: &str) {
        for n in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            n.rename(from, to);
        }
    }
}

/// Verb equality plus multiset equality of inputs and outputs.
pub fn functional_unit_equals(a: &FunctionalUnit, b: &FunctionalUnit) -> bool {
    a.canonical() == b.canonical()
}

impl PartialEq for FunctionalUnit {
    fn eq(&self, other: &Self) -> bool {
        functional_unit_equals(self, other)
    }
}

impl Eq for FunctionalUnit {}

impl Hash for FunctionalUnit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl fmt::Display for FunctionalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(ToString::to_string).collect();
        let outs: Vec<String> = self.outputs.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} -[{}]-> {}",
            ins.join(" + "),
            self.motion.verb,
            outs.join(" + ")
        )
    }
}

/// A FOON describing one annotated activity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subgraph {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dish_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<ObjectNode>,
    #[serde(default)]
    pub units: Vec<FunctionalUnit>,
}

impl Subgraph {
    pub fn new(id: &str, units: Vec<FunctionalUnit>) -> Self {
        Subgraph {
            id: id.to_string(),
            dish_class: None,
            goal: None,
            units,
        }
    }

    pub fn with_class(mut self, class: &str) -> Self {
        self.dish_class = Some(normalize_name(class));
        self
    }

    pub fn with_goal(mut self, goal: ObjectNode) -> Self {
        self.goal = Some(goal);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.id.trim().is_empty() {
            return Err(ModelError::EmptySubgraphId);
        }
        if self.units.is_empty() {
            return Err(ModelError::NoUnits(self.id.clone()));
        }
        for u in &self.units {
            u.validate()?;
        }
        if let Some(g) = &self.goal {
            g.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubstitutionKind {
    Object,
    State,
}

/// Log entry for one substitution performed while adapting a tree.
///
/// `original` is what the request asked for; `replacement` is the item
/// whose FOON knowledge was borrowed in its place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionRecord {
    pub kind: SubstitutionKind,
    /// Object whose state was swapped (state substitutions only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub original: String,
    pub replacement: String,
    /// 100 × cosine similarity of `original` and `replacement`.
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A sequentially executable list of units achieving `goal`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskTree {
    pub goal: ObjectNode,
    pub units: Vec<FunctionalUnit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<SubstitutionRecord>,
}

impl TaskTree {
    pub fn empty(goal: ObjectNode) -> Self {
        TaskTree {
            goal,
            units: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Every object node in the tree, inputs before outputs, unit order.
    pub fn nodes(&self) -> impl Iterator<Item = &ObjectNode> {
        self.units
            .iter()
            .flat_map(|u| u.inputs.iter().chain(u.outputs.iter()))
    }

    pub fn rename(&mut self, from: &str, to: &str) {
        self.goal.rename(from, to);
        for u in &mut self.units {
            u.rename(from, to);
        }
    }
}

/// One requested ingredient: an object name and the state it is needed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIngredient")]
pub struct Ingredient {
    pub name: String,
    pub state: String,
}

#[derive(Deserialize)]
struct RawIngredient {
    name: String,
    state: String,
}

impl TryFrom<RawIngredient> for Ingredient {
    type Error = ModelError;

    fn try_from(raw: RawIngredient) -> Result<Self, Self::Error> {
        let ing = Ingredient::new(&raw.name, &raw.state);
        if ing.name.is_empty() {
            return Err(ModelError::InvalidName(raw.name));
        }
        if ing.state.is_empty() {
            return Err(ModelError::EmptyStateLabel);
        }
        Ok(ing)
    }
}

impl Ingredient {
    pub fn new(name: &str, state: &str) -> Self {
        Ingredient {
            name: normalize_name(name),
            state: normalize_name(state),
        }
    }

    pub fn node(&self) -> ObjectNode {
        ObjectNode::new(&self.name).with_state(&self.state)
    }
}

impl fmt::Display for Ingredient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.state, self.name)
    }
}

/// A set of ingredients and the dish class they should become.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanningRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub ingredients: Vec<Ingredient>,
    pub dish_type: String,
}

impl PlanningRequest {
    pub fn new(dish_type: &str, ingredients: Vec<Ingredient>) -> Self {
        let mut req = PlanningRequest {
            id: None,
            ingredients: Vec::new(),
            dish_type: normalize_name(dish_type),
        };
        for i in ingredients {
            if !req.ingredients.iter().any(|x| x == &i) {
                req.ingredients.push(i);
            }
        }
        req
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = Some(id.to_string());
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.ingredients.is_empty() {
            return Err(ModelError::EmptyRequest);
        }
        if self.dish_type.is_empty() {
            return Err(ModelError::EmptyDishType);
        }
        for (i, a) in self.ingredients.iter().enumerate() {
            if self.ingredients[..i].contains(a) {
                return Err(ModelError::DuplicateRequestIngredient(a.to_string()));
            }
        }
        Ok(())
    }

    /// Distinct ingredient names in request order.
    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for i in &self.ingredients {
            if !out.contains(&i.name) {
                out.push(i.name.clone());
            }
        }
        out
    }
}
