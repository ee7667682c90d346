use std::collections::HashMap;

use foonplan_core::{EmbeddingTable, SimilarityConfig};
use foonplan_testkit::fixtures;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-6;

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn default_threshold_is_point_nine() {
    assert_eq!(SimilarityConfig::default().threshold(), 0.90);
    assert!(SimilarityConfig::new(1.5).is_err());
    assert!(SimilarityConfig::new(-0.1).is_err());
}

#[test]
fn carrot_is_closest_to_cucumber() {
    let table = fixtures::spec_vectors();
    let expected = 100.0 * cosine(&[0.0, 0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.243105, 0.97]);
    let (name, confidence) = table
        .nearest_ingredient("carrot", &["onion", "tomato", "cucumber", "fork"])
        .unwrap();
    assert_eq!(name, "cucumber");
    assert!((confidence - expected).abs() < EPS, "{confidence} vs {expected}");
}

#[test]
fn chives_match_onion_above_threshold() {
    let table = fixtures::spec_vectors();
    let cfg = SimilarityConfig::default();
    let expected = cosine(&[1.0, 0.0, 0.0, 0.0, 0.0], &[0.95, 0.3122, 0.0, 0.0, 0.0]);
    assert!((table.similarity("chives", "onion") - expected).abs() < EPS);
    assert_eq!(table.compute_similarity(&cfg, &["chives"], &["onion", "fork", "tomato"]), 1);
    // red onion is the mean of red and onion, well below the threshold
    assert_eq!(table.compute_similarity(&cfg, &["onion"], &["red onion"]), 0);
}

#[test]
fn stored_vectors_have_unit_norm() {
    let table = fixtures::spec_vectors();
    for t in ["onion", "chives", "fork", "red", "tomato", "carrot", "cucumber"] {
        let v = table.vector(t).unwrap();
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-9);
    }
}

struct RandomWorld {
    table: EmbeddingTable,
    raw: HashMap<String, Vec<f64>>,
    pool: Vec<String>,
}

fn random_world(rng: &mut ChaCha8Rng) -> RandomWorld {
    let mut raw: HashMap<String, Vec<f64>> = HashMap::new();
    let mut entries = Vec::new();
    for i in 0..12 {
        let name = format!("w{i}");
        let mut v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // a few near-duplicates so pairs cross the threshold
        if i % 3 == 1 {
            let prev = raw[&format!("w{}", i - 1)].clone();
            v = prev_plus_noise(&prev, rng);
        }
        v[0] += 1e-3;
        raw.insert(name.clone(), v.clone());
        entries.push((name, v));
    }
    let table = EmbeddingTable::from_vectors(4, entries.iter().map(|(n, v)| (n.as_str(), v.clone()))).unwrap();
    let mut pool: Vec<String> = raw.keys().cloned().collect();
    pool.extend(["unknown1", "unknown2"].map(String::from));
    pool.sort();
    RandomWorld { table, raw, pool }
}

fn prev_plus_noise(prev: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    prev.iter().map(|x| x + rng.gen_range(-0.2..0.2)).collect()
}

fn brute_force(w: &RandomWorld, t: f64, a: &[String], b: &[String]) -> usize {
    let mut n = 0;
    for x in a {
        for y in b {
            let s = match (w.raw.get(x), w.raw.get(y)) {
                (Some(p), Some(q)) => cosine(p, q),
                _ => f64::from(u8::from(x == y)),
            };
            if s > t {
                n += 1;
            }
        }
    }
    n
}

fn pick(rng: &mut ChaCha8Rng, pool: &[String]) -> Vec<String> {
    let k = rng.gen_range(0..=6);
    (0..k).map(|_| pool.choose(rng).unwrap().clone()).collect()
}

#[test]
fn pair_count_matches_brute_force_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cfg = SimilarityConfig::default();
    for _ in 0..10 {
        let w = random_world(&mut rng);
        for _ in 0..100 {
            let a = pick(&mut rng, &w.pool);
            let b = pick(&mut rng, &w.pool);
            let got = w.table.compute_similarity(&cfg, &a, &b);
            // skip sets with a pair within rounding distance of the threshold
            let near = a.iter().any(|x| {
                b.iter().any(|y| match (w.raw.get(x), w.raw.get(y)) {
                    (Some(p), Some(q)) => (cosine(p, q) - 0.9).abs() < 1e-9,
                    _ => false,
                })
            });
            if !near {
                assert_eq!(got, brute_force(&w, 0.9, &a, &b), "{a:?} x {b:?}");
            }
            assert_eq!(got, w.table.compute_similarity(&cfg, &b, &a), "symmetry");
        }
    }
}

#[test]
fn pair_count_does_not_grow_with_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let w = random_world(&mut rng);
    for _ in 0..200 {
        let a = pick(&mut rng, &w.pool);
        let b = pick(&mut rng, &w.pool);
        let mut last = usize::MAX;
        for t in [0.0, 0.3, 0.6, 0.9, 0.95, 1.0] {
            let n = w.table.compute_similarity(&SimilarityConfig::new(t).unwrap(), &a, &b);
            assert!(n <= last);
            last = n;
        }
    }
}

#[test]
fn nearest_ingredient_is_the_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let w = random_world(&mut rng);
        let mut known: Vec<String> = w.raw.keys().cloned().collect();
        known.sort();
        for _ in 0..20 {
            let target = known.choose(&mut rng).unwrap();
            let candidates: Vec<String> = known
                .iter()
                .filter(|c| *c != target && rng.gen_bool(0.5))
                .cloned()
                .collect();
            if candidates.is_empty() {
                assert!(w.table.nearest_ingredient(target, &candidates).is_err());
                continue;
            }
            let (name, confidence) = w.table.nearest_ingredient(target, &candidates).unwrap();
            let best = candidates
                .iter()
                .map(|c| cosine(&w.raw[target], &w.raw[c]))
                .fold(f64::MIN, f64::max);
            assert!((confidence - 100.0 * best).abs() < EPS);
            assert!((100.0 * cosine(&w.raw[target], &w.raw[&name]) - confidence).abs() < EPS);
        }
    }
}
