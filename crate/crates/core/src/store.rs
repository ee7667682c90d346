//! The universal FOON: a union of subgraphs with duplicate functional units
//! removed, indexed by the objects each unit produces and consumes.

use std::collections::{HashMap, HashSet};

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::DishClassConfig;
use crate::error::StoreError;
use crate::kitchen::Classifier;
use crate::model::{normalize_name, FunctionalUnit, ObjectKey, ObjectNode, Subgraph};

/// Index into [`UniversalFoon::units`].
pub type UnitId = usize;

/// What the store remembers about each merged subgraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgraphSummary {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dish_class: Option<String>,
    pub goal: ObjectNode,
    /// Names found in input position (node names and composite entries),
    /// first-seen order. Filtered to ingredients at query time.
    pub consumed: Vec<String>,
}

/// A goal-node candidate for one recipe of the requested class.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalCandidate {
    pub subgraph_id: String,
    pub goal: ObjectNode,
    pub ingredients: Vec<String>,
}

/// Serialized form of a [`UniversalFoon`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoonDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<String>>,
    pub subgraphs: Vec<SubgraphSummary>,
    pub units: Vec<FunctionalUnit>,
}

#[derive(Clone, Debug)]
pub struct UniversalFoon {
    units: Vec<FunctionalUnit>,
    producers: IndexMap<ObjectKey, Vec<UnitId>>,
    consumers: IndexMap<ObjectKey, Vec<UnitId>>,
    subgraphs: IndexMap<String, SubgraphSummary>,
    class_registry: IndexMap<String, Vec<String>>,
    declared_classes: Option<Vec<String>>,
    raw_names: IndexSet<String>,
    object_names: IndexSet<String>,
    fingerprint: String,
}

#[derive(Default)]
struct Builder {
    units: Vec<FunctionalUnit>,
    seen: HashMap<FunctionalUnit, UnitId>,
    subgraphs: IndexMap<String, SubgraphSummary>,
    declared_classes: Option<Vec<String>>,
}

impl Builder {
    fn add_unit(&mut self, unit: &FunctionalUnit) {
        if !self.seen.contains_key(unit) {
            self.seen.insert(unit.clone(), self.units.len());
            self.units.push(unit.clone());
        }
    }

    fn add_summary(&mut self, summary: SubgraphSummary) -> Result<(), StoreError> {
        match self.subgraphs.get(&summary.id) {
            Some(existing) if *existing == summary => Ok(()),
            Some(_) => Err(StoreError::DuplicateSubgraph(summary.id)),
            None => {
                self.subgraphs.insert(summary.id.clone(), summary);
                Ok(())
            }
        }
    }

    fn declare(&mut self, classes: Option<&Vec<String>>) {
        if let Some(classes) = classes {
            let declared = self.declared_classes.get_or_insert_with(Vec::new);
            for c in classes {
                if !declared.contains(c) {
                    declared.push(c.clone());
                }
            }
        }
    }

    fn finish(self) -> Result<UniversalFoon, StoreError> {
        let mut producers: IndexMap<ObjectKey, Vec<UnitId>> = IndexMap::new();
        let mut consumers: IndexMap<ObjectKey, Vec<UnitId>> = IndexMap::new();
        let mut object_names = IndexSet::new();
        for (id, unit) in self.units.iter().enumerate() {
            for o in &unit.outputs {
                let list = producers.entry(o.key()).or_default();
                if !list.contains(&id) {
                    list.push(id);
                }
                object_names.insert(o.name.clone());
            }
            for i in &unit.inputs {
                let list = consumers.entry(i.key()).or_default();
                if !list.contains(&id) {
                    list.push(id);
                }
                object_names.insert(i.name.clone());
            }
        }

        let mut raw_names = IndexSet::new();
        for unit in &self.units {
            for i in &unit.inputs {
                if !producers.contains_key(&i.key()) {
                    raw_names.insert(i.name.clone());
                }
            }
            for n in unit.inputs.iter().chain(&unit.outputs) {
                raw_names.extend(n.ingredients.iter().cloned());
            }
        }

        let mut class_registry: IndexMap<String, Vec<String>> = IndexMap::new();
        for s in self.subgraphs.values() {
            if let Some(class) = &s.dish_class {
                if let Some(declared) = &self.declared_classes {
                    if !declared.contains(class) {
                        return Err(StoreError::UndeclaredClass {
                            subgraph: s.id.clone(),
                            class: class.clone(),
                        });
                    }
                }
                class_registry
                    .entry(class.clone())
                    .or_default()
                    .push(s.id.clone());
            }
        }

        let mut hasher = Sha256::new();
        for u in &self.units {
            hasher.update(serde_json::to_vec(u).expect("units serialize"));
            hasher.update([0u8]);
        }
        for s in self.subgraphs.values() {
            hasher.update(serde_json::to_vec(s).expect("summaries serialize"));
            hasher.update([1u8]);
        }
        let fingerprint = hex(&hasher.finalize());

        Ok(UniversalFoon {
            units: self.units,
            producers,
            consumers,
            subgraphs: self.subgraphs,
            class_registry,
            declared_classes: self.declared_classes,
            raw_names,
            object_names,
            fingerprint,
        })
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// The unique output whose key is never consumed inside the subgraph.
pub fn derive_goal(subgraph: &Subgraph) -> Result<ObjectNode, StoreError> {
    let consumed: HashSet<ObjectKey> = subgraph
        .units
        .iter()
        .flat_map(|u| u.inputs.iter().map(ObjectNode::key))
        .collect();
    let mut terminals: IndexMap<ObjectKey, &ObjectNode> = IndexMap::new();
    for u in &subgraph.units {
        for o in &u.outputs {
            let key = o.key();
            if !consumed.contains(&key) {
                terminals.entry(key).or_insert(o);
            }
        }
    }
    match terminals.len() {
        0 => Err(StoreError::NoGoal(subgraph.id.clone())),
        1 => Ok(terminals[0].clone()),
        _ => Err(StoreError::AmbiguousGoal {
            id: subgraph.id.clone(),
            candidates: terminals
                .keys()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        }),
    }
}

fn summarize(subgraph: &Subgraph) -> Result<SubgraphSummary, StoreError> {
    let goal = match &subgraph.goal {
        Some(g) => g.clone(),
        None => derive_goal(subgraph)?,
    };
    let mut consumed: IndexSet<String> = IndexSet::new();
    for u in &subgraph.units {
        for i in &u.inputs {
            consumed.insert(i.name.clone());
            consumed.extend(i.ingredients.iter().cloned());
        }
    }
    Ok(SubgraphSummary {
        id: subgraph.id.clone(),
        dish_class: subgraph.dish_class.clone(),
        goal,
        consumed: consumed.into_iter().collect(),
    })
}

impl UniversalFoon {
    /// Union of all functional units of `subgraphs`, duplicates removed.
    pub fn merge(subgraphs: &[Subgraph]) -> Result<Self, StoreError> {
        let mut b = Builder::default();
        for sg in subgraphs {
            sg.validate()?;
            for u in &sg.units {
                b.add_unit(u);
            }
            b.add_summary(summarize(sg)?)?;
        }
        b.finish()
    }

    /// Merges two universal FOONs.
    pub fn union(&self, other: &UniversalFoon) -> Result<Self, StoreError> {
        let mut b = Builder::default();
        for foon in [self, other] {
            b.declare(foon.declared_classes.as_ref());
            for u in &foon.units {
                b.add_unit(u);
            }
            for s in foon.subgraphs.values() {
                b.add_summary(s.clone())?;
            }
        }
        b.finish()
    }

    /// Applies a dish-class registry. Assignments override classes embedded
    /// in the subgraph documents.
    pub fn with_dish_classes(&self, config: &DishClassConfig) -> Result<Self, StoreError> {
        let mut b = Builder::default();
        b.declare(Some(&config.classes));
        for u in &self.units {
            b.add_unit(u);
        }
        for s in self.subgraphs.values() {
            let mut s = s.clone();
            if let Some(class) = config.assignment.get(&s.id) {
                if !config.is_declared(class) {
                    return Err(StoreError::UndeclaredClass {
                        subgraph: s.id.clone(),
                        class: class.clone(),
                    });
                }
                s.dish_class = Some(class.clone());
            }
            b.add_summary(s)?;
        }
        for id in config.assignment.keys() {
            if !self.subgraphs.contains_key(id) {
                log::warn!("dish class config names unknown subgraph {id:?}");
            }
        }
        b.finish()
    }

    pub fn from_document(doc: FoonDocument) -> Result<Self, StoreError> {
        let mut b = Builder::default();
        b.declare(doc.classes.as_ref());
        for u in &doc.units {
            u.validate()?;
            b.add_unit(u);
        }
        for s in doc.subgraphs {
            s.goal.validate()?;
            b.add_summary(s)?;
        }
        b.finish()
    }

    pub fn to_document(&self) -> FoonDocument {
        FoonDocument {
            classes: self.declared_classes.clone(),
            subgraphs: self.subgraphs.values().cloned().collect(),
            units: self.units.clone(),
        }
    }

    pub fn units(&self) -> &[FunctionalUnit] {
        &self.units
    }

    pub fn unit(&self, id: UnitId) -> &FunctionalUnit {
        &self.units[id]
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn subgraphs(&self) -> impl Iterator<Item = &SubgraphSummary> {
        self.subgraphs.values()
    }

    pub fn subgraph(&self, id: &str) -> Option<&SubgraphSummary> {
        self.subgraphs.get(id)
    }

    pub fn class_registry(&self) -> &IndexMap<String, Vec<String>> {
        &self.class_registry
    }

    /// Names that occur as unproduced inputs or inside composites.
    pub fn raw_names(&self) -> &IndexSet<String> {
        &self.raw_names
    }

    pub fn contains_object(&self, name: &str) -> bool {
        self.object_names.contains(name)
    }

    pub fn producer_ids(&self, key: &ObjectKey) -> &[UnitId] {
        self.producers.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn consumer_ids(&self, key: &ObjectKey) -> &[UnitId] {
        self.consumers.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Units that have `key` among their outputs, insertion order.
    pub fn units_producing(&self, key: &ObjectKey) -> Vec<&FunctionalUnit> {
        self.producer_ids(key).iter().map(|&i| &self.units[i]).collect()
    }

    pub fn units_consuming(&self, key: &ObjectKey) -> Vec<&FunctionalUnit> {
        self.consumer_ids(key).iter().map(|&i| &self.units[i]).collect()
    }

    /// Distinct produced keys for `name` that carry the state `label`.
    pub fn produced_keys_with_label(&self, name: &str, label: &str) -> Vec<ObjectKey> {
        self.producers
            .keys()
            .filter(|k| k.name == name && k.has_label(label))
            .cloned()
            .collect()
    }

    /// First output node in the FOON with exactly this key.
    pub fn output_node(&self, key: &ObjectKey) -> Option<&ObjectNode> {
        self.producer_ids(key)
            .first()
            .and_then(|&id| self.units[id].outputs.iter().find(|o| &o.key() == key))
    }

    /// State labels that some unit produces for `name`, sorted.
    pub fn produced_labels(&self, name: &str) -> Vec<String> {
        let mut labels: Vec<String> = self
            .producers
            .keys()
            .filter(|k| k.name == name)
            .flat_map(|k| k.states.iter().map(|s| s.label.clone()))
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// One candidate per recipe of `dish_type`.
    pub fn find_goal_candidates(
        &self,
        dish_type: &str,
        classifier: &Classifier<'_>,
    ) -> Result<Vec<GoalCandidate>, StoreError> {
        let dish_type = normalize_name(dish_type);
        if let Some(declared) = &self.declared_classes {
            if !declared.contains(&dish_type) {
                return Err(StoreError::UnknownDishClass(dish_type));
            }
        }
        let Some(ids) = self.class_registry.get(&dish_type) else {
            return Ok(Vec::new());
        };
        Ok(ids
            .iter()
            .map(|id| {
                let s = &self.subgraphs[id];
                GoalCandidate {
                    subgraph_id: id.clone(),
                    goal: s.goal.clone(),
                    ingredients: s
                        .consumed
                        .iter()
                        .filter(|n| classifier.is_ingredient(n) && **n != s.goal.name)
                        .cloned()
                        .collect(),
                }
            })
            .collect())
    }

    /// The unit set, for order-insensitive comparisons.
    pub fn unit_set(&self) -> HashSet<&FunctionalUnit> {
        self.units.iter().collect()
    }

    /// True when indexes are exactly what a rebuild from `units` produces.
    pub fn indexes_consistent(&self) -> bool {
        let mut b = Builder::default();
        for u in &self.units {
            b.add_unit(u);
        }
        match b.finish() {
            Ok(rebuilt) => rebuilt.producers == self.producers && rebuilt.consumers == self.consumers,
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitchen::KitchenModel;
    use crate::model::FunctionalUnit as FU;

    fn obj(name: &str, state: &str) -> ObjectNode {
        ObjectNode::new(name).with_state(state)
    }

    fn unit(ins: &[(&str, &str)], verb: &str, outs: &[(&str, &str)]) -> FU {
        FU::new(
            ins.iter().map(|(n, s)| obj(n, s)).collect(),
            verb,
            outs.iter().map(|(n, s)| obj(n, s)).collect(),
        )
    }

    fn slice_onion() -> FU {
        unit(&[("onion", "whole")], "slice", &[("onion", "sliced")])
    }

    fn subgraph_a() -> Subgraph {
        Subgraph::new(
            "a",
            vec![
                slice_onion(),
                unit(&[("tomato", "whole")], "slice", &[("tomato", "sliced")]),
                unit(
                    &[("onion", "sliced"), ("tomato", "sliced")],
                    "mix",
                    &[("salad", "mixed")],
                ),
            ],
        )
        .with_class("salad")
    }

    fn subgraph_b() -> Subgraph {
        Subgraph::new(
            "b",
            vec![
                slice_onion(),
                unit(&[("potato", "whole")], "boil", &[("potato", "boiled")]),
                unit(&[("potato", "boiled")], "dice", &[("potato", "diced")]),
                unit(
                    &[("onion", "sliced"), ("potato", "diced")],
                    "stir",
                    &[("soup", "cooked")],
                ),
            ],
        )
        .with_class("soup")
    }

    #[test]
    fn merge_single_subgraph() {
        let fig2 = Subgraph::new(
            "fig2",
            vec![
                unit(&[("onion", "whole")], "pick-and-place", &[("onion", "placed")]),
                unit(&[("onion", "placed")], "slice", &[("onion", "sliced")]),
            ],
        );
        assert_eq!(UniversalFoon::merge(&[fig2]).unwrap().len(), 2);
    }

    #[test]
    fn merge_is_idempotent_on_duplicates() {
        let once = UniversalFoon::merge(&[subgraph_a()]).unwrap();
        let twice = UniversalFoon::merge(&[subgraph_a(), subgraph_a()]).unwrap();
        assert_eq!(once.unit_set(), twice.unit_set());
        assert_eq!(once.fingerprint(), twice.fingerprint());
    }

    #[test]
    fn merge_removes_shared_unit() {
        let a = subgraph_a();
        let b = subgraph_b();
        // brute-force pairwise dedup oracle
        let all: Vec<&FU> = a.units.iter().chain(&b.units).collect();
        let mut distinct: Vec<&FU> = Vec::new();
        for u in all {
            if !distinct.iter().any(|d| crate::model::functional_unit_equals(d, u)) {
                distinct.push(u);
            }
        }
        assert_eq!((a.units.len(), b.units.len(), distinct.len()), (3, 4, 6));
        let merged = UniversalFoon::merge(&[a, b]).unwrap();
        assert_eq!(merged.len(), 6);
        assert!(merged.indexes_consistent());
    }

    #[test]
    fn goal_is_derived() {
        let foon = UniversalFoon::merge(&[subgraph_a()]).unwrap();
        assert_eq!(foon.subgraph("a").unwrap().goal, obj("salad", "mixed"));
    }

    #[test]
    fn ambiguous_goal_names_candidates() {
        let sg = Subgraph::new(
            "x",
            vec![
                unit(&[("onion", "whole")], "slice", &[("onion", "sliced")]),
                unit(&[("tomato", "whole")], "slice", &[("tomato", "sliced")]),
            ],
        );
        let err = UniversalFoon::merge(std::slice::from_ref(&sg)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("onion{sliced}") && msg.contains("tomato{sliced}"), "{msg}");
        let explicit = sg.with_goal(obj("onion", "sliced"));
        assert!(UniversalFoon::merge(&[explicit]).is_ok());
    }

    #[test]
    fn conflicting_duplicate_ids_are_rejected() {
        let mut other = subgraph_b();
        other.id = "a".into();
        assert!(matches!(
            UniversalFoon::merge(&[subgraph_a(), other]),
            Err(StoreError::DuplicateSubgraph(_))
        ));
    }

    #[test]
    fn producer_lookup() {
        let foon = UniversalFoon::merge(&[subgraph_a(), subgraph_b()]).unwrap();
        let sliced = ObjectKey::simple("onion", "sliced");
        assert_eq!(foon.units_producing(&sliced), vec![&slice_onion()]);
        assert!(foon.units_producing(&ObjectKey::simple("onion", "whole")).is_empty());
        assert_eq!(foon.units_consuming(&sliced).len(), 2);
    }

    #[test]
    fn alternative_producers_in_insertion_order() {
        let mix1 = unit(&[("lettuce", "chopped")], "mix", &[("salad", "mixed")]);
        let mix2 = unit(&[("cabbage", "shredded")], "toss", &[("salad", "mixed")]);
        let a = Subgraph::new("a", vec![mix1.clone()]);
        let b = Subgraph::new("b", vec![mix2.clone()]);
        let foon = UniversalFoon::merge(&[a, b]).unwrap();
        let key = ObjectKey::simple("salad", "mixed");
        // linear scan oracle
        let scan: Vec<&FU> = foon.units().iter().filter(|u| u.produces(&key)).collect();
        assert_eq!(foon.units_producing(&key), scan);
        assert_eq!(foon.units_producing(&key), vec![&mix1, &mix2]);
    }

    #[test]
    fn candidates_by_class() {
        let kitchen = KitchenModel::new();
        let foon = UniversalFoon::merge(&[subgraph_a(), subgraph_b()]).unwrap();
        let classifier = Classifier::new(&kitchen, foon.raw_names());
        let salads = foon.find_goal_candidates("salad", &classifier).unwrap();
        assert_eq!(salads.len(), 1);
        assert_eq!(salads[0].ingredients, vec!["onion", "tomato"]);
        assert!(foon.find_goal_candidates("pizza", &classifier).unwrap().is_empty());
    }

    #[test]
    fn dish_class_config_overrides_and_validates() {
        let foon = UniversalFoon::merge(&[subgraph_a(), subgraph_b()]).unwrap();
        let cfg = DishClassConfig::new(["salad", "soup", "pizza"]).assign("b", "salad");
        let classed = foon.with_dish_classes(&cfg).unwrap();
        assert_eq!(classed.class_registry()["salad"], vec!["a", "b"]);
        let kitchen = KitchenModel::new();
        let classifier = Classifier::new(&kitchen, classed.raw_names());
        assert!(matches!(
            classed.find_goal_candidates("burger", &classifier),
            Err(StoreError::UnknownDishClass(_))
        ));
        let narrow = DishClassConfig::new(["pizza"]);
        assert!(foon.with_dish_classes(&narrow).is_err());
    }

    #[test]
    fn document_round_trip() {
        let foon = UniversalFoon::merge(&[subgraph_a(), subgraph_b()]).unwrap();
        let doc = crate::document::to_canonical(&foon.to_document());
        let back: FoonDocument = crate::document::from_json(&doc).unwrap().value;
        let back = UniversalFoon::from_document(back).unwrap();
        assert_eq!(back.fingerprint(), foon.fingerprint());
        assert_eq!(crate::document::to_canonical(&back.to_document()), doc);
    }

    #[test]
    fn raw_names_exclude_products() {
        let foon = UniversalFoon::merge(&[subgraph_a()]).unwrap();
        let raw: Vec<&String> = foon.raw_names().iter().collect();
        assert_eq!(raw, vec!["onion", "tomato"]);
    }
}
