use std::time::Instant;

use foonplan_core::error::RetrievalError;
use foonplan_core::validate::validate_executable;
use foonplan_core::Planner;
use foonplan_testkit::oracle::{best_derivation, Judge};
use foonplan_testkit::random::{random_instance, FoonShape, RandomInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances(seed: u64, n: usize) -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_instance(&mut rng, &FoonShape::default())).collect()
}

#[test]
fn matches_exhaustive_enumeration() {
    let start = Instant::now();
    let mut solvable = 0;
    for (i, inst) in instances(7, 200).iter().enumerate() {
        let planner = Planner::new(&inst.foon, &inst.table, inst.cfg, &inst.kitchen);
        let judge = Judge::new(&inst.foon, &inst.table, inst.cfg, &inst.kitchen, &inst.ingredients);
        let expected = best_derivation(&inst.foon, &judge, &inst.goal);
        let got = planner.retrieve_reference_task_tree(&inst.goal, &inst.ingredients);
        match (expected, got) {
            (Some((score, size)), Ok(tree)) => {
                solvable += 1;
                let paths = planner.candidate_paths(&inst.goal, &inst.ingredients).unwrap();
                let best = paths
                    .iter()
                    .max_by(|a, b| a.overlap_score.cmp(&b.overlap_score).then(b.length.cmp(&a.length)))
                    .unwrap();
                assert_eq!((best.overlap_score, best.length), (score, size), "instance {i}");
                assert_eq!(tree.units.len(), size, "instance {i}");
                validate_executable(&tree, &inst.kitchen).unwrap_or_else(|e| panic!("instance {i}: {e}"));
            }
            (None, Err(RetrievalError::NoPath { .. })) => {}
            (e, g) => panic!("instance {i}: oracle {e:?}, planner {g:?}"),
        }
    }
    assert!(solvable >= 100, "only {solvable} solvable instances");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn adding_an_alternative_never_lowers_the_best_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..100 {
        let inst = random_instance(&mut rng, &FoonShape::default());
        let planner = Planner::new(&inst.foon, &inst.table, inst.cfg, &inst.kitchen);
        let Ok(paths) = planner.candidate_paths(&inst.goal, &inst.ingredients) else {
            continue;
        };
        let Some(before) = paths.iter().map(|p| p.overlap_score).max() else {
            continue;
        };

        // A second producer for the goal made only of kitchen-available
        // requested ingredients.
        let mut extra = inst.subgraph.clone();
        let inputs = inst
            .ingredients
            .iter()
            .map(|n| foonplan_core::ObjectNode::new(n).with_state("whole"))
            .collect();
        extra.units.push(foonplan_core::FunctionalUnit::new(
            inputs,
            "assemble",
            vec![extra.goal.clone().unwrap()],
        ));
        let bigger = foonplan_core::UniversalFoon::merge(&[extra]).unwrap();
        let planner = Planner::new(&bigger, &inst.table, inst.cfg, &inst.kitchen);
        let after = planner
            .candidate_paths(&inst.goal, &inst.ingredients)
            .unwrap()
            .iter()
            .map(|p| p.overlap_score)
            .max()
            .unwrap();
        assert!(after >= before, "instance {i}: {before} -> {after}");
    }
}
