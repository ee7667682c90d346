//! Command-line flags. Every flag can also be set through an environment
//! variable with the `FOON_` prefix.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use foonplan_core::config::{DishClassConfig, IntegrationPolicy, StateClassConfig};
use foonplan_core::modify::{Adaptation, MotionVerbStats};
use foonplan_core::{
    EmbeddingTable, KitchenModel, Planner, SearchBudget, SimilarityConfig, TreeCache, UniversalFoon,
};

use crate::files::{load_foon, read};
use crate::Result;

pub const DEFAULT_THRESHOLDS: [f64; 8] = [50.0, 60.0, 70.0, 80.0, 85.0, 90.0, 95.0, 100.0];

#[derive(Debug, Parser)]
#[command(name = "foonplan", version, about = "Task-tree planning over FOON knowledge graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge subgraph documents into one universal FOON document.
    Merge(MergeArgs),
    /// Plan a request and write the task tree plus a substitution log.
    Plan(PlanArgs),
    /// Derive per-ingredient progress lines from a planned tree.
    Progress(ProgressArgs),
    /// Write a Graphviz description of a planned tree.
    Render(RenderArgs),
    /// Summarize annotation files into a correctness report.
    Report(ReportArgs),
    /// Serve a results directory to the review UI.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// Subgraph documents (.json or legacy .txt) or universal documents.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, env = "FOON_DISH_CLASSES")]
    pub dish_classes: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Everything a plan needs. All files are read and checked before any
/// planning starts.
#[derive(Clone, Debug, Args)]
pub struct CliConfig {
    /// FOON inputs, repeated or comma separated.
    #[arg(long = "foon", env = "FOON_GRAPHS", value_delimiter = ',', required = true)]
    pub foon: Vec<PathBuf>,
    #[arg(long, env = "FOON_EMBEDDINGS")]
    pub embeddings: PathBuf,
    #[arg(long, env = "FOON_DISH_CLASSES")]
    pub dish_classes: PathBuf,
    #[arg(long, env = "FOON_STATE_CLASSES")]
    pub state_classes: PathBuf,
    #[arg(long, env = "FOON_KITCHEN")]
    pub kitchen: PathBuf,
    #[arg(long, env = "FOON_POLICY")]
    pub policy: PathBuf,
    #[arg(long, env = "FOON_THRESHOLD", default_value_t = 0.90)]
    pub threshold: f64,
    #[arg(long, env = "FOON_MAX_PATHS", default_value_t = 10_000)]
    pub max_paths: usize,
    #[arg(long, env = "FOON_MAX_DEPTH", default_value_t = 100)]
    pub max_depth: usize,
    #[arg(long, env = "FOON_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Keep retrieved reference trees here and reuse them across runs.
    #[arg(long, env = "FOON_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub config: CliConfig,
    /// Planning request document.
    pub request: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProgressArgs {
    /// A `<id>.tree.json` written by `plan`.
    pub tree: PathBuf,
    #[arg(long, env = "FOON_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub tree: PathBuf,
    /// Defaults to `<id>.dot` in the output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = "FOON_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(required = true)]
    pub annotations: Vec<PathBuf>,
    /// Correctness thresholds in percent, ascending.
    #[arg(long, env = "FOON_THRESHOLDS", value_delimiter = ',', default_values_t = DEFAULT_THRESHOLDS)]
    pub thresholds: Vec<f64>,
    #[arg(long, env = "FOON_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "FOON_RESULTS", default_value = ".")]
    pub results: PathBuf,
    #[arg(long, env = "FOON_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "FOON_BIND", default_value = "127.0.0.1")]
    pub bind: String,
}

/// Parsed inputs shared by planning runs.
pub struct Workspace {
    pub foon: UniversalFoon,
    pub table: EmbeddingTable,
    pub kitchen: KitchenModel,
    pub state_classes: StateClassConfig,
    pub policy: IntegrationPolicy,
    pub stats: MotionVerbStats,
    pub cfg: SimilarityConfig,
    pub budget: SearchBudget,
    pub cache: Option<TreeCache>,
}

impl CliConfig {
    pub fn load(&self) -> Result<Workspace> {
        let dish_classes = DishClassConfig::parse(&read(&self.dish_classes)?)?;
        let foon = load_foon(&self.foon)?.with_dish_classes(&dish_classes)?;
        let table = EmbeddingTable::parse(&read(&self.embeddings)?)?;
        let kitchen = KitchenModel::parse(&read(&self.kitchen)?)?;
        let state_classes = StateClassConfig::parse(&read(&self.state_classes)?)?;
        let policy = IntegrationPolicy::parse(&read(&self.policy)?)?;
        let cfg = SimilarityConfig::new(self.threshold)?;
        let stats = MotionVerbStats::build(&foon);
        Ok(Workspace {
            foon,
            table,
            kitchen,
            state_classes,
            policy,
            stats,
            cfg,
            budget: SearchBudget {
                max_paths: self.max_paths,
                max_depth: self.max_depth,
            },
            cache: self.cache_dir.as_ref().map(TreeCache::with_dir),
        })
    }
}

impl Workspace {
    pub fn planner(&self) -> Planner<'_> {
        let planner = Planner::new(&self.foon, &self.table, self.cfg, &self.kitchen).with_budget(self.budget);
        match &self.cache {
            Some(cache) => planner.with_cache(cache),
            None => planner,
        }
    }

    pub fn adaptation(&self) -> Adaptation<'_> {
        Adaptation {
            state_classes: &self.state_classes,
            stats: &self.stats,
            policy: &self.policy,
        }
    }
}
