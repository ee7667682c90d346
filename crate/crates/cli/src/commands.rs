//! One function per subcommand. Each validates its inputs, computes every
//! output in memory, then writes them atomically.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use foonplan_core::config::DishClassConfig;
use foonplan_core::document::to_canonical;
use foonplan_core::goal::GoalSelection;
use foonplan_core::graphviz::render_dot;
use foonplan_core::modify::construct_final_task_tree;
use foonplan_core::progress::{
    build_report, derive_progress_lines, render_progress_text, render_report_text, AnnotationSet,
    CorrectnessReport, ProgressDocument,
};
use foonplan_core::{PlanningRequest, SubstitutionKind, TaskTree};
use serde::{Deserialize, Serialize};

use crate::config::{CliConfig, Cli, Command, MergeArgs, ProgressArgs, RenderArgs, ReportArgs};
use crate::files::{load_foon, read, read_json, write_all_atomic, write_atomic};
use crate::{CliError, Result};

pub const TREE_SUFFIX: &str = ".tree.json";
pub const PROGRESS_SUFFIX: &str = ".progress.json";
pub const ANNOTATION_SUFFIX: &str = ".annotations.json";

/// What `plan` writes: the request it answered, the chosen recipe and the
/// final tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub recipe_id: String,
    pub request: PlanningRequest,
    pub selection: GoalSelection,
    pub tree: TaskTree,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Merge(args) => merge(&args).map(|_| ()),
        Command::Plan(args) => plan(&args.config, &args.request).map(|_| ()),
        Command::Progress(args) => progress(&args).map(|_| ()),
        Command::Render(args) => render(&args).map(|_| ()),
        Command::Report(args) => {
            let (_, text) = report(&args)?;
            print!("{text}");
            Ok(())
        }
        Command::Serve(args) => crate::serve::run(&args),
    }
}

pub fn merge(args: &MergeArgs) -> Result<PathBuf> {
    let mut foon = load_foon(&args.inputs)?;
    if let Some(path) = &args.dish_classes {
        foon = foon.with_dish_classes(&DishClassConfig::parse(&read(path)?)?)?;
    }
    write_atomic(&args.output, to_canonical(&foon.to_document()).as_bytes())?;
    log::info!("merged {} units into {}", foon.len(), args.output.display());
    Ok(args.output.clone())
}

fn recipe_id(request: &PlanningRequest, path: &Path) -> Result<String> {
    let id = match &request.id {
        Some(id) => id.clone(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::Usage(format!("cannot name a recipe after {}", path.display())))?,
    };
    check_id(&id)?;
    Ok(id)
}

/// Recipe ids become file names, so keep them to a safe alphabet.
pub fn check_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!("invalid recipe id {id:?}")))
    }
}

pub fn substitution_log(doc: &PlanDocument) -> String {
    let mut out = format!("# substitutions for {}\n", doc.recipe_id);
    for r in &doc.tree.provenance {
        let _ = match r.kind {
            SubstitutionKind::Object => write!(out, "object {} -> {}", r.original, r.replacement),
            SubstitutionKind::State => write!(
                out,
                "state {}: {} -> {}",
                r.subject.as_deref().unwrap_or("?"),
                r.original,
                r.replacement
            ),
        };
        let _ = write!(out, " ({:.2}%)", r.confidence);
        if let Some(note) = &r.note {
            let _ = write!(out, " {note}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct PlanOutput {
    pub document: PlanDocument,
    pub tree_path: PathBuf,
    pub log_path: PathBuf,
}

pub fn plan(config: &CliConfig, request_path: &Path) -> Result<PlanOutput> {
    let request: PlanningRequest = read_json(request_path)?;
    let id = recipe_id(&request, request_path)?;
    let workspace = config.load()?;
    let result = construct_final_task_tree(&workspace.planner(), &workspace.adaptation(), &request)?;
    let document = PlanDocument {
        recipe_id: id.clone(),
        request,
        selection: result.selection,
        tree: result.tree,
    };
    let tree_path = config.out_dir.join(format!("{id}{TREE_SUFFIX}"));
    let log_path = config.out_dir.join(format!("{id}.substitutions.log"));
    write_all_atomic(&[
        (tree_path.clone(), to_canonical(&document).into_bytes()),
        (log_path.clone(), substitution_log(&document).into_bytes()),
    ])?;
    Ok(PlanOutput {
        document,
        tree_path,
        log_path,
    })
}

pub fn progress_document(doc: &PlanDocument) -> Result<ProgressDocument> {
    Ok(ProgressDocument {
        recipe_id: doc.recipe_id.clone(),
        lines: derive_progress_lines(&doc.tree, &doc.request.names())?,
    })
}

pub fn progress(args: &ProgressArgs) -> Result<(PathBuf, PathBuf)> {
    let doc: PlanDocument = read_json(&args.tree)?;
    check_id(&doc.recipe_id)?;
    let progress = progress_document(&doc)?;
    let json = args.out_dir.join(format!("{}{PROGRESS_SUFFIX}", doc.recipe_id));
    let text = args.out_dir.join(format!("{}.progress.txt", doc.recipe_id));
    write_all_atomic(&[
        (json.clone(), to_canonical(&progress).into_bytes()),
        (text.clone(), render_progress_text(&progress.lines).into_bytes()),
    ])?;
    Ok((json, text))
}

pub fn render(args: &RenderArgs) -> Result<PathBuf> {
    let doc: PlanDocument = read_json(&args.tree)?;
    check_id(&doc.recipe_id)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| args.out_dir.join(format!("{}.dot", doc.recipe_id)));
    write_atomic(&path, render_dot(&doc.tree).as_bytes())?;
    Ok(path)
}

pub fn report(args: &ReportArgs) -> Result<(CorrectnessReport, String)> {
    if args.thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::Usage("thresholds must be ascending".into()));
    }
    let annotations: Vec<AnnotationSet> = args.annotations.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    let report = build_report(&annotations, &args.thresholds)?;
    let text = render_report_text(&report);
    write_all_atomic(&[
        (args.out_dir.join("report.json"), to_canonical(&report).into_bytes()),
        (args.out_dir.join("report.txt"), text.clone().into_bytes()),
    ])?;
    Ok((report, text))
}
