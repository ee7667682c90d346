use std::collections::BTreeSet;

use foonplan_core::modify::{construct_final_task_tree, Plan};
use foonplan_core::progress::{derive_progress_lines, render_progress_text};
use foonplan_core::validate::validate_executable;
use foonplan_core::{
    EmbeddingTable, Ingredient, ObjectKey, PlanningRequest, SimilarityConfig, SubstitutionKind, UniversalFoon,
};
use foonplan_testkit::fixtures::{self, SaladWorld};
use foonplan_testkit::oracle::{input_names, tree_ingredients};
use foonplan_testkit::random::random_salad_request;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn fig2_plan_is_pick_and_place_then_slice() {
    let (sg, kitchen) = fixtures::fig2();
    let foon = UniversalFoon::merge(&[sg]).unwrap();
    let table = EmbeddingTable::from_vectors(1, [("onion", vec![1.0])]).unwrap();
    let planner = foonplan_core::Planner::new(&foon, &table, SimilarityConfig::default(), &kitchen);
    let names = vec!["onion".to_string()];
    let tree = planner
        .retrieve_reference_task_tree(&ObjectKey::simple("onion", "sliced"), &names)
        .unwrap();
    let verbs: Vec<&str> = tree.units.iter().map(|u| u.verb()).collect();
    assert_eq!(verbs, ["pick-and-place", "slice"]);
    validate_executable(&tree, &kitchen).unwrap();

    let lines = derive_progress_lines(&tree, &names).unwrap();
    assert_eq!(lines.len(), 1);
    let line = &lines[0];
    assert_eq!(line.initial, ["whole"]);
    let steps: Vec<(&str, Vec<&str>, Option<&str>)> = line
        .steps
        .iter()
        .map(|s| (s.motion.as_str(), s.states.iter().map(String::as_str).collect(), s.location.as_deref()))
        .collect();
    assert_eq!(
        steps,
        [
            ("pick-and-place", vec!["whole"], Some("cutting board")),
            ("slice", vec!["sliced"], Some("cutting board")),
        ]
    );
    assert_eq!(
        render_progress_text(&lines),
        "onion: whole -> pick-and-place (whole @ cutting board) -> slice (sliced @ cutting board)\n"
    );
}

fn plan(world: &SaladWorld, request: &PlanningRequest) -> Plan {
    construct_final_task_tree(&world.planner(), &world.adaptation(), request)
        .unwrap_or_else(|e| panic!("{:?}: {e}", request.id))
}

fn greek_request() -> PlanningRequest {
    serde_json::from_str(&fixtures::read("salads/greek_request.json")).unwrap()
}

#[test]
fn greek_salad_uses_raisins_for_prunes() {
    let world = SaladWorld::load();
    let request = greek_request();
    let plan = plan(&world, &request);
    assert_eq!(plan.selection.source_subgraph, "greek_salad");
    validate_executable(&plan.tree, &world.kitchen).unwrap();

    let prunes = plan
        .tree
        .provenance
        .iter()
        .find(|r| r.kind == SubstitutionKind::Object)
        .expect("object substitution recorded");
    assert_eq!((prunes.original.as_str(), prunes.replacement.as_str()), ("prunes", "raisin"));
    let expected = 100.0 * world.table.similarity("prunes", "raisin");
    assert!((prunes.confidence - expected).abs() < 1e-6);

    let names = request.names();
    let found = tree_ingredients(&plan.tree, |n| names.contains(&n.to_string()) || n == "tomato" || n == "olive");
    assert!(!found.contains("tomato") && !found.contains("olive"), "{found:?}");
    let lines = derive_progress_lines(&plan.tree, &names).unwrap();
    assert_eq!(lines.len(), names.len());
    assert!(lines.iter().any(|l| l.ingredient == "prunes" && l.substituted));
}

#[test]
fn random_requests_are_closed_complete_and_executable() {
    let world = SaladWorld::load();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert!(world.foon.len() >= 30, "fixture has {} units", world.foon.len());
    let utensils: BTreeSet<String> = world.kitchen.utensils().map(String::from).collect();
    let mut substituted = 0;
    for i in 0..50 {
        let request = random_salad_request(&mut rng, &format!("r{i}"));
        let names = request.names();
        let plan = plan(&world, &request);
        substituted += usize::from(!plan.tree.provenance.is_empty());
        let tree = &plan.tree;
        validate_executable(tree, &world.kitchen).unwrap_or_else(|e| panic!("{:?}: {e}", request.id));

        let planner = world.planner();
        let classifier = planner.classifier(&names);
        let present = tree_ingredients(tree, |n| classifier.is_ingredient(n));
        let allowed: BTreeSet<String> = names.iter().cloned().collect();
        assert!(present.is_subset(&allowed), "{:?}: extra {:?}", request.id, present.difference(&allowed));
        let inputs = input_names(tree);
        for n in &names {
            assert!(inputs.contains(n), "{:?}: {n} missing", request.id);
        }
        // utensils that remain are never renamed or dropped from a unit
        // that still uses them
        for u in &tree.units {
            assert!(!u.inputs.is_empty() && !u.outputs.is_empty());
            for n in &u.inputs {
                if utensils.contains(&n.name) {
                    assert!(world.kitchen.is_utensil(&n.name));
                }
            }
        }
    }
    assert!(substituted >= 5, "only {substituted} requests needed a substitution");
}

#[test]
fn planning_is_repeatable() {
    let world = SaladWorld::load();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10 {
        let request = random_salad_request(&mut rng, &format!("d{i}"));
        let a = serde_json::to_string(&plan(&world, &request)).unwrap();
        let b = serde_json::to_string(&plan(&world, &request)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn pizza_is_not_a_known_dish() {
    let world = SaladWorld::load();
    let request = PlanningRequest::new("pizza", vec![Ingredient::new("tomato", "sliced")]);
    let err = construct_final_task_tree(&world.planner(), &world.adaptation(), &request).unwrap_err();
    assert_eq!(err.to_string(), "no recipes of type \"pizza\"");
}
