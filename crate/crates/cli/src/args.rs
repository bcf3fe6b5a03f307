use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partgram::builder::{Budget, TaskType};
use partgram::clustering::{DEFAULT_ALPHA, DEFAULT_EPS, DEFAULT_MIN_PTS};
use partgram::metrics::{Matching, DEFAULT_VOXEL_RES};

#[derive(Debug, Parser)]
#[command(name = "partgram", version, about = "Box-token part grammar toolkit")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build instruction samples from annotated objects.
    Build(BuildArgs),
    /// Parse token programs and report errors with token offsets.
    Validate(ValidateArgs),
    /// Cluster parts into coarser components over an eps schedule.
    Cluster(ClusterArgs),
    /// Assign mesh faces to scored boxes.
    Segment(SegmentArgs),
    /// Apply an edit program to a point scene.
    Execute(ExecuteArgs),
    /// Score predictions against ground truth.
    Eval(EvalArgs),
}

/// Task types in ascending order without repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeList(pub Vec<TaskType>);

/// Parses `0-2,5,7` style type lists.
pub fn parse_types(s: &str) -> Result<TypeList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let one = |t: &str| -> Result<u8, String> {
            t.trim_start_matches(['T', 't'])
                .parse::<u8>()
                .map_err(|_| format!("bad task type {t:?}"))
        };
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (one(a)?, one(b)?),
            None => (one(part)?, one(part)?),
        };
        if lo > hi {
            return Err(format!("empty range {part:?}"));
        }
        for t in lo..=hi {
            out.push(TaskType::try_from(t).map_err(|e| e.to_string())?);
        }
    }
    if out.is_empty() {
        return Err("no task types given".into());
    }
    out.sort();
    out.dedup();
    Ok(TypeList(out))
}

/// `all` keeps everything, an integer is a count, a decimal is a fraction of
/// the available samples.
pub fn parse_budget(s: &str) -> Result<Budget, String> {
    if s == "all" {
        return Ok(Budget::Unlimited);
    }
    if s.contains('.') {
        let r: f64 = s.parse().map_err(|_| format!("bad budget {s:?}"))?;
        if !(r.is_finite() && r >= 0.0) {
            return Err(format!("budget ratio must be non-negative, got {s}"));
        }
        return Ok(Budget::Ratio(r));
    }
    s.parse::<usize>()
        .map(Budget::Count)
        .map_err(|_| format!("bad budget {s:?}; expected all, a count, or a ratio like 0.5"))
}

#[derive(Debug, Args)]
pub struct Budgets {
    #[arg(long = "budget-t0", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T0")]
    pub t0: Option<Budget>,
    #[arg(long = "budget-t1", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T1")]
    pub t1: Option<Budget>,
    #[arg(long = "budget-t2", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T2")]
    pub t2: Option<Budget>,
    #[arg(long = "budget-t3", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T3")]
    pub t3: Option<Budget>,
    #[arg(long = "budget-t4", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T4")]
    pub t4: Option<Budget>,
    #[arg(long = "budget-t5", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T5")]
    pub t5: Option<Budget>,
    #[arg(long = "budget-t6", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T6")]
    pub t6: Option<Budget>,
    #[arg(long = "budget-t7", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T7")]
    pub t7: Option<Budget>,
    #[arg(long = "budget-t8", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T8")]
    pub t8: Option<Budget>,
    #[arg(long = "budget-t9", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T9")]
    pub t9: Option<Budget>,
    #[arg(long = "budget-t10", value_parser = parse_budget, value_name = "all|N|RATIO", help = "Sample budget for T10")]
    pub t10: Option<Budget>,
}

impl Budgets {
    pub fn overrides(&self) -> [Option<Budget>; 11] {
        [
            self.t0, self.t1, self.t2, self.t3, self.t4, self.t5, self.t6, self.t7, self.t8,
            self.t9, self.t10,
        ]
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Annotated objects, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Balanced training samples (JSON lines).
    #[arg(long)]
    pub output: PathBuf,
    /// Per-type counts and shares.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Rejected records with reasons (JSON lines).
    #[arg(long)]
    pub errors: Option<PathBuf>,
    /// Samples of held-out objects; without it every object is used for
    /// training.
    #[arg(long)]
    pub test_output: Option<PathBuf>,
    /// Task types to build, e.g. `0-2,5`.
    #[arg(long, value_parser = parse_types, default_value = "0-10")]
    pub types: TypeList,
    /// Copies of each multi-part grounding sample.
    #[arg(long, default_value_t = partgram::builder::DEFAULT_DUPLICATION)]
    pub duplication: usize,
    /// Skip invalid records instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[command(flatten)]
    pub budgets: Budgets,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// One token program per line, or JSON lines with `--field`.
    #[arg(long)]
    pub input: PathBuf,
    /// Read the program from this string field of each JSON line.
    #[arg(long)]
    pub field: Option<String>,
    /// Recover after errors and report every one per line.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Annotated objects, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Text embeddings: `{"text": ..., "vector": [...]}` per line.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Weight of the semantic block.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Increasing neighbourhood radii, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [DEFAULT_EPS])]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_MIN_PTS)]
    pub min_pts: usize,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Triangle mesh in OBJ form.
    #[arg(long)]
    pub mesh: PathBuf,
    /// `{"box": [...], "token_probs": [...]}` per line.
    #[arg(long)]
    pub boxes: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExecuteArgs {
    /// `{"pos": [x, y, z], "label": n}` per line.
    #[arg(long)]
    pub scene: PathBuf,
    /// Token program text.
    #[arg(long)]
    pub program: PathBuf,
    /// Edited scene (JSON lines).
    #[arg(long)]
    pub output: PathBuf,
    /// Region log, cuboid masks and diff summary.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Execute the statements that parse and report the rest.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFormat {
    /// `{id, task_type, boxes, text}` per line.
    Records,
    /// Instruction samples; targets are parsed into records.
    Samples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatchingArg {
    NearestCenter,
    MaxIou,
}

impl From<MatchingArg> for Matching {
    fn from(m: MatchingArg) -> Self {
        match m {
            MatchingArg::NearestCenter => Matching::NearestCenter,
            MatchingArg::MaxIou => Matching::MaxIou,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, value_enum, default_value_t = EvalFormat::Records)]
    pub format: EvalFormat,
    #[arg(long, default_value_t = DEFAULT_VOXEL_RES)]
    pub voxel_res: usize,
    #[arg(long, value_enum, default_value_t = MatchingArg::NearestCenter)]
    pub matching: MatchingArg,
    /// Text embeddings for the cosine column.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
