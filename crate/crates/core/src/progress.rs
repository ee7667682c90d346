//! Per-ingredient progress lines and correctness scoring.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::ProgressError;
use crate::model::{ObjectKey, ObjectNode, SubstitutionKind, TaskTree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressStep {
    pub motion: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub location: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressLine {
    pub ingredient: String,
    /// States of the ingredient when it first enters the tree.
    #[serde(default)]
    pub initial: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub substituted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    pub steps: Vec<ProgressStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressDocument {
    pub recipe_id: String,
    pub lines: Vec<ProgressLine>,
}

fn state_strings(node: &ObjectNode) -> Vec<String> {
    node.states.iter().map(ToString::to_string).collect()
}

fn involves(node: &ObjectNode, name: &str, carriers: &HashSet<ObjectKey>) -> bool {
    node.name == name || node.ingredients.iter().any(|i| i == name) || carriers.contains(&node.key())
}

/// Follows each ingredient through the tree. Once an ingredient is mixed
/// into a composite, the composite's later transitions are its steps too.
pub fn derive_progress_lines(tree: &TaskTree, ingredients: &[String]) -> Result<Vec<ProgressLine>, ProgressError> {
    ingredients.iter().map(|name| derive_line(tree, name)).collect()
}

fn derive_line(tree: &TaskTree, name: &str) -> Result<ProgressLine, ProgressError> {
    let mut carriers: HashSet<ObjectKey> = HashSet::new();
    let mut initial: Option<Vec<String>> = None;
    let mut steps = Vec::new();

    for unit in &tree.units {
        let touched: Vec<&ObjectNode> = unit.inputs.iter().filter(|n| involves(n, name, &carriers)).collect();
        if touched.is_empty() {
            continue;
        }
        if initial.is_none() {
            initial = Some(touched.iter().find(|n| n.name == name).map(|n| state_strings(n)).unwrap_or_default());
        }
        let carrier = unit
            .outputs
            .iter()
            .find(|o| o.name == name)
            .or_else(|| unit.outputs.iter().find(|o| o.ingredients.iter().any(|i| i == name)))
            .or_else(|| unit.outputs.iter().find(|o| touched.iter().any(|t| t.name == o.name)))
            .or_else(|| unit.outputs.first());
        let Some(out) = carrier else { continue };
        let location = match &out.location {
            Some(l) => Some(l.clone()),
            None if out.name != name => Some(out.name.clone()),
            None => None,
        };
        steps.push(ProgressStep {
            motion: unit.verb().to_string(),
            states: state_strings(out),
            location,
        });
        if out.name != name {
            carriers.insert(out.key());
        }
    }

    let mentioned = !steps.is_empty()
        || tree.goal.name == name
        || tree.goal.ingredients.iter().any(|i| i == name);
    if !mentioned {
        return Err(ProgressError::IngredientAbsent(name.to_string()));
    }
    let record = tree.provenance.iter().find(|r| match r.kind {
        SubstitutionKind::Object => r.original == name,
        SubstitutionKind::State => r.subject.as_deref() == Some(name),
    });
    Ok(ProgressLine {
        ingredient: name.to_string(),
        initial: initial.unwrap_or_else(|| {
            if tree.goal.name == name {
                state_strings(&tree.goal)
            } else {
                Vec::new()
            }
        }),
        substituted: record.is_some(),
        confidence: record.map(|r| r.confidence),
        steps,
    })
}

fn describe_step(step: &ProgressStep) -> String {
    let states = step.states.join(", ");
    match (&step.location, states.is_empty()) {
        (Some(l), false) => format!("{} ({} @ {})", step.motion, states, l),
        (Some(l), true) => format!("{} (@ {})", step.motion, l),
        (None, false) => format!("{} ({})", step.motion, states),
        (None, true) => step.motion.clone(),
    }
}

/// One line per ingredient, for example
/// `onion: whole -> pick-and-place (whole @ cutting board) -> slice (sliced @ cutting board)`.
pub fn render_progress_text(lines: &[ProgressLine]) -> String {
    let mut out = String::new();
    for line in lines {
        out.push_str(&line.ingredient);
        if line.substituted {
            match line.confidence {
                Some(c) => out.push_str(&format!(" [substituted {c:.1}%]")),
                None => out.push_str(" [substituted]"),
            }
        }
        if line.steps.is_empty() {
            out.push_str(" (no transitions)\n");
            continue;
        }
        out.push(':');
        let mut parts: Vec<String> = Vec::new();
        if !line.initial.is_empty() {
            parts.push(line.initial.join(", "));
        }
        parts.extend(line.steps.iter().map(describe_step));
        out.push(' ');
        out.push_str(&parts.join(" -> "));
        out.push('\n');
    }
    out
}

/// A percentage held as an integer number of hundredths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(u64);

impl Percent {
    /// `100 × num / den`, rounded half-up to hundredths.
    pub fn ratio(num: u64, den: u64) -> Percent {
        assert!(den > 0, "ratio with zero denominator");
        Percent((num * 10_000 * 2 + den) / (2 * den))
    }

    pub fn from_hundredths(h: u64) -> Percent {
        Percent(h)
    }

    pub fn hundredths(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}%", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Percent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if !(0.0..=100.0).contains(&v) {
            return Err(serde::de::Error::custom(format!("percentage {v} outside [0, 100]")));
        }
        Ok(Percent((v * 100.0).round() as u64))
    }
}

/// Human judgments for one recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub recipe_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dish_class: Option<String>,
    pub scores: IndexMap<String, u8>,
}

/// Score total over a recipe's ingredients; exact until displayed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Correctness {
    pub total: u64,
    pub ingredients: u64,
}

impl Correctness {
    pub fn percent(&self) -> Percent {
        Percent::ratio(self.total, 2 * self.ingredients)
    }

    /// Exact `correctness ≥ threshold`, with the threshold taken to
    /// hundredths of a percent.
    pub fn at_least(&self, threshold: f64) -> bool {
        let t = (threshold * 100.0).round().max(0.0) as u64;
        // total / (2n) * 10000 >= t
        self.total * 5_000 >= t * self.ingredients
    }
}

/// Σ scores / (2 |I|) × 100 over the recipe's ingredient set.
pub fn correctness(scores: &IndexMap<String, u8>, ingredients: &[String]) -> Result<Correctness, ProgressError> {
    if ingredients.is_empty() {
        return Err(ProgressError::NoIngredients);
    }
    for (name, &score) in scores {
        if !ingredients.contains(name) {
            return Err(ProgressError::UnknownIngredient(name.clone()));
        }
        if score > 2 {
            return Err(ProgressError::ScoreOutOfRange {
                ingredient: name.clone(),
                score,
            });
        }
    }
    let mut total = 0u64;
    for name in ingredients {
        let s = scores.get(name).ok_or_else(|| ProgressError::MissingScore(name.clone()))?;
        total += u64::from(*s);
    }
    Ok(Correctness {
        total,
        ingredients: ingredients.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub rate: Percent,
}

/// Share of recipes whose correctness reaches each threshold.
pub fn threshold_curve(recipes: &[Correctness], thresholds: &[f64]) -> Vec<CurvePoint> {
    thresholds
        .iter()
        .map(|&t| {
            let hits = recipes.iter().filter(|c| c.at_least(t)).count() as u64;
            let rate = if recipes.is_empty() {
                Percent(0)
            } else {
                Percent::ratio(hits, recipes.len() as u64)
            };
            CurvePoint { threshold: t, rate }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipeCorrectness {
    pub recipe_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dish_class: Option<String>,
    pub ingredients: usize,
    pub score_total: u64,
    pub correctness: Percent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectnessReport {
    pub recipes: Vec<RecipeCorrectness>,
    pub mean: Percent,
    pub curve: Vec<CurvePoint>,
}

/// Builds the report from annotations. The ingredient set of each recipe is
/// the set of ingredients it was scored on.
pub fn build_report(annotations: &[AnnotationSet], thresholds: &[f64]) -> Result<CorrectnessReport, ProgressError> {
    let mut recipes = Vec::new();
    let mut exact = Vec::new();
    for a in annotations {
        let names: Vec<String> = a.scores.keys().cloned().collect();
        let c = correctness(&a.scores, &names)?;
        exact.push(c);
        recipes.push(RecipeCorrectness {
            recipe_id: a.recipe_id.clone(),
            dish_class: a.dish_class.clone(),
            ingredients: names.len(),
            score_total: c.total,
            correctness: c.percent(),
        });
    }
    let mean = mean_percent(&exact);
    Ok(CorrectnessReport {
        recipes,
        mean,
        curve: threshold_curve(&exact, thresholds),
    })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Mean of the exact per-recipe ratios, summed as a reduced fraction.
fn mean_percent(exact: &[Correctness]) -> Percent {
    if exact.is_empty() {
        return Percent(0);
    }
    let (mut num, mut den) = (0u128, 1u128);
    for c in exact {
        let (n, d) = (c.total as u128, 2 * c.ingredients as u128);
        num = num * d + n * den;
        den *= d;
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
    }
    den *= exact.len() as u128;
    Percent(((num * 20_000 + den) / (2 * den)) as u64)
}

pub fn render_report_text(report: &CorrectnessReport) -> String {
    let width = report
        .recipes
        .iter()
        .map(|r| r.recipe_id.len())
        .chain(std::iter::once("recipe".len()))
        .max()
        .unwrap_or(6);
    let mut out = format!("{:<width$}  {:>11}  {:>7}\n", "recipe", "ingredients", "correct");
    for r in &report.recipes {
        out.push_str(&format!(
            "{:<width$}  {:>11}  {:>7}\n",
            r.recipe_id,
            r.ingredients,
            r.correctness.to_string()
        ));
    }
    out.push_str(&format!("{:<width$}  {:>11}  {:>7}\n\n", "mean", "", report.mean.to_string()));
    out.push_str("threshold  generated\n");
    for p in &report.curve {
        out.push_str(&format!("{:>9}  {:>9}\n", format_threshold(p.threshold), p.rate.to_string()));
    }
    out
}

fn format_threshold(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("{t:.0}")
    } else {
        format!("{t}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FunctionalUnit, SubstitutionRecord};

    fn fig2_tree() -> TaskTree {
        TaskTree {
            goal: ObjectNode::new("onion").with_state("sliced").at("cutting board"),
            units: vec![
                FunctionalUnit::new(
                    vec![ObjectNode::new("onion").with_state("whole"), ObjectNode::new("cutting board")],
                    "pick-and-place",
                    vec![ObjectNode::new("onion").with_state("whole").at("cutting board")],
                ),
                FunctionalUnit::new(
                    vec![
                        ObjectNode::new("onion").with_state("whole").at("cutting board"),
                        ObjectNode::new("knife"),
                    ],
                    "slice",
                    vec![ObjectNode::new("onion").with_state("sliced").at("cutting board"), ObjectNode::new("knife")],
                ),
            ],
            provenance: vec![],
        }
    }

    #[test]
    fn fig2_onion_line() {
        let lines = derive_progress_lines(&fig2_tree(), &["onion".into()]).unwrap();
        let l = &lines[0];
        assert_eq!(l.initial, ["whole"]);
        assert_eq!(
            l.steps,
            vec![
                ProgressStep {
                    motion: "pick-and-place".into(),
                    states: vec!["whole".into()],
                    location: Some("cutting board".into())
                },
                ProgressStep {
                    motion: "slice".into(),
                    states: vec!["sliced".into()],
                    location: Some("cutting board".into())
                },
            ]
        );
        assert_eq!(
            render_progress_text(&lines),
            "onion: whole -> pick-and-place (whole @ cutting board) -> slice (sliced @ cutting board)\n"
        );
    }

    fn composite_tree() -> TaskTree {
        let bowl = |ing: &[&str], state: &str| {
            ObjectNode::new("bowl").with_state(state).with_ingredients(ing.iter().copied())
        };
        TaskTree {
            goal: ObjectNode::new("bowl").with_state("served").with_ingredients(["onion", "oregano"]),
            units: vec![
                FunctionalUnit::new(
                    vec![ObjectNode::new("onion").with_state("sliced"), ObjectNode::new("bowl")],
                    "add",
                    vec![bowl(&["onion"], "contains")],
                ),
                FunctionalUnit::new(
                    vec![bowl(&["onion"], "contains"), ObjectNode::new("oregano").with_state("dried")],
                    "sprinkle",
                    vec![bowl(&["onion", "oregano"], "contains")],
                ),
                FunctionalUnit::new(
                    vec![bowl(&["onion", "oregano"], "contains"), ObjectNode::new("spoon")],
                    "mix",
                    vec![bowl(&["onion", "oregano"], "mixed")],
                ),
                FunctionalUnit::new(
                    vec![bowl(&["onion", "oregano"], "mixed")],
                    "serve",
                    vec![bowl(&["onion", "oregano"], "served")],
                ),
            ],
            provenance: vec![SubstitutionRecord {
                kind: SubstitutionKind::Object,
                subject: None,
                original: "oregano".into(),
                replacement: "basil".into(),
                confidence: 62.9,
                note: None,
            }],
        }
    }

    #[test]
    fn ingredient_follows_its_composite() {
        let lines = derive_progress_lines(&composite_tree(), &["onion".into(), "oregano".into()]).unwrap();
        // hand trace: add, sprinkle, mix, serve for onion; sprinkle onward for oregano
        let verbs = |l: &ProgressLine| l.steps.iter().map(|s| s.motion.clone()).collect::<Vec<_>>();
        assert_eq!(verbs(&lines[0]), ["add", "sprinkle", "mix", "serve"]);
        assert_eq!(verbs(&lines[1]), ["sprinkle", "mix", "serve"]);
        assert!(lines[0].steps.iter().all(|s| s.location.as_deref() == Some("bowl")));
        assert!(lines[1].substituted);
        let text = render_progress_text(&lines);
        assert!(text.contains("oregano [substituted 62.9%]: dried -> sprinkle (contains @ bowl)"), "{text}");
    }

    #[test]
    fn absent_ingredient_is_an_error() {
        assert!(matches!(
            derive_progress_lines(&fig2_tree(), &["tomato".into()]),
            Err(ProgressError::IngredientAbsent(_))
        ));
    }

    #[test]
    fn empty_line_renders_placeholder() {
        let line = ProgressLine {
            ingredient: "salt".into(),
            initial: vec![],
            substituted: false,
            confidence: None,
            steps: vec![],
        };
        assert_eq!(render_progress_text(&[line]), "salt (no transitions)\n");
    }

    fn scores(v: &[u8]) -> (IndexMap<String, u8>, Vec<String>) {
        let names: Vec<String> = (0..v.len()).map(|i| format!("i{i}")).collect();
        (names.iter().cloned().zip(v.iter().copied()).collect(), names)
    }

    #[test]
    fn correctness_values() {
        let (s, n) = scores(&[2, 2, 1, 2, 2]);
        let c = correctness(&s, &n).unwrap();
        assert_eq!(c.percent().to_string(), "90.00%");
        let (s, n) = scores(&[2, 2, 2]);
        assert_eq!(correctness(&s, &n).unwrap().percent(), Percent::from_hundredths(10_000));
        let (s, n) = scores(&[0, 0]);
        assert_eq!(correctness(&s, &n).unwrap().percent(), Percent::from_hundredths(0));
        // 5/6 = 83.333…
        let (s, n) = scores(&[2, 2, 1]);
        assert_eq!(correctness(&s, &n).unwrap().percent().to_string(), "83.33%");
    }

    #[test]
    fn correctness_validation() {
        let (mut s, n) = scores(&[2, 3]);
        assert!(matches!(correctness(&s, &n), Err(ProgressError::ScoreOutOfRange { .. })));
        s.shift_remove("i1");
        assert!(matches!(correctness(&s, &n), Err(ProgressError::MissingScore(_))));
        s.insert("x".into(), 1);
        assert!(matches!(correctness(&s, &n), Err(ProgressError::UnknownIngredient(_))));
    }

    #[test]
    fn curve_counts_recipes_at_or_above() {
        let recipes = [
            Correctness { total: 10, ingredients: 5 },
            Correctness { total: 9, ingredients: 5 },
            Correctness { total: 8, ingredients: 5 },
        ];
        let curve = threshold_curve(&recipes, &[0.0, 85.0, 90.0, 100.0]);
        let rates: Vec<String> = curve.iter().map(|p| p.rate.to_string()).collect();
        assert_eq!(rates, ["100.00%", "66.67%", "66.67%", "33.33%"]);
    }

    #[test]
    fn report_table() {
        let a = |id: &str, v: &[u8]| AnnotationSet {
            recipe_id: id.into(),
            dish_class: None,
            scores: scores(v).0,
        };
        let report = build_report(&[a("r1", &[2, 2]), a("r2", &[2, 1])], &[0.0, 80.0]).unwrap();
        assert_eq!(report.mean.to_string(), "87.50%");
        let text = render_report_text(&report);
        assert_eq!(
            text,
            "recipe  ingredients  correct\n\
             r1                2  100.00%\n\
             r2                2   75.00%\n\
             mean                  87.50%\n\n\
             threshold  generated\n\
             \x20       0    100.00%\n\
             \x20      80     50.00%\n"
        );
    }
}
