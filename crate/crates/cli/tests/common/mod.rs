#![allow(dead_code)]

use std::path::{Path, PathBuf};

use foonplan_cli::config::CliConfig;
use foonplan_testkit::fixtures::{self, SALAD_SUBGRAPHS};

pub fn salad_config(out_dir: &Path) -> CliConfig {
    CliConfig {
        foon: SALAD_SUBGRAPHS
            .iter()
            .map(|id| fixtures::path(&format!("salads/{id}.json")))
            .collect(),
        embeddings: fixtures::path("salads/embeddings.txt"),
        dish_classes: fixtures::path("salads/dish_classes.json"),
        state_classes: fixtures::path("salads/state_classes.json"),
        kitchen: fixtures::path("salads/kitchen.json"),
        policy: fixtures::path("salads/policy.json"),
        threshold: 0.90,
        max_paths: 10_000,
        max_depth: 100,
        out_dir: out_dir.to_path_buf(),
        cache_dir: None,
    }
}

pub fn greek_request() -> PathBuf {
    fixtures::path("salads/greek_request.json")
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}
