use std::collections::HashSet;

use partgram::builder::{
    balance_corpus, build_samples, is_test_id, BalanceConfig, CorpusStats, InstructionSample,
    ObjectRecord, TaskType,
};
use rayon::prelude::*;
use serde::Serialize;

use super::{numbered_lines, with_workers};
use crate::args::BuildArgs;
use crate::failure::{emit, read_file, to_json, write_file, CliResult, Failure};

#[derive(Serialize)]
struct RejectedRecord {
    line: usize,
    id: Option<String>,
    error: String,
}

#[derive(Serialize)]
struct BuildParams {
    input: String,
    seed: u64,
    types: Vec<TaskType>,
    duplication: usize,
    budgets: Vec<String>,
    lenient: bool,
    held_out: bool,
}

#[derive(Serialize)]
struct BuildReport {
    params: BuildParams,
    objects: usize,
    held_out_objects: usize,
    rejected: usize,
    #[serde(flatten)]
    stats: CorpusStats,
    warnings: Vec<String>,
}

fn id_of(line: &str) -> Option<String> {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()?
        .get("id")?
        .as_str()
        .map(str::to_string)
}

/// Types that apply to the record: QA needs pairs, the rest need parts.
fn applicable(rec: &ObjectRecord, types: &[TaskType]) -> Vec<TaskType> {
    types
        .iter()
        .copied()
        .filter(|&t| match t {
            TaskType::PartQa => !rec.qa.is_empty(),
            _ => !rec.parts.is_empty(),
        })
        .collect()
}

fn jsonl(samples: &[InstructionSample]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("samples serialize"));
        out.push('\n');
    }
    out
}

pub fn run(args: &BuildArgs, seed: u64, workers: usize) -> CliResult {
    let text = read_file(&args.input)?;
    let lines: Vec<(usize, &str)> = numbered_lines(&text).collect();
    let types = &args.types.0;

    let mut cfg = BalanceConfig {
        seed,
        duplication: args.duplication,
        ..BalanceConfig::default()
    };
    for (slot, o) in cfg.budgets.iter_mut().zip(args.budgets.overrides()) {
        if let Some(b) = o {
            *slot = b;
        }
    }

    let built: Vec<Result<(ObjectRecord, Vec<InstructionSample>), RejectedRecord>> =
        with_workers(workers, || {
            lines
                .par_iter()
                .map(|&(line, l)| {
                    let reject = |error: String| RejectedRecord {
                        line,
                        id: id_of(l),
                        error,
                    };
                    let rec = ObjectRecord::from_json(l).map_err(|e| reject(e.to_string()))?;
                    for w in rec.warnings() {
                        log::warn!("{}:{line}: {w}", args.input.display());
                    }
                    let samples = build_samples(&rec, &applicable(&rec, types), seed)
                        .map_err(|e| reject(e.to_string()))?;
                    Ok((rec, samples))
                })
                .collect()
        })?;

    let mut rejected = Vec::new();
    let mut seen = HashSet::new();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    let (mut objects, mut held_out) = (0, 0);
    for (r, &(line, _)) in built.into_iter().zip(&lines) {
        match r {
            Err(rej) => rejected.push(rej),
            Ok((rec, _)) if !seen.insert(rec.id.clone()) => rejected.push(RejectedRecord {
                line,
                id: Some(rec.id.clone()),
                error: "duplicate object id".into(),
            }),
            Ok((rec, samples)) => {
                objects += 1;
                if args.test_output.is_some() && is_test_id(&rec.id) {
                    held_out += 1;
                    test.extend(samples);
                } else {
                    train.extend(samples);
                }
            }
        }
    }

    for r in &rejected {
        log::error!("{}:{}: {}", args.input.display(), r.line, r.error);
    }
    if let Some(path) = &args.errors {
        let body: String = rejected
            .iter()
            .map(|r| serde_json::to_string(r).expect("rejections serialize") + "\n")
            .collect();
        write_file(path, &body)?;
    }

    let balanced = balance_corpus(train.clone(), &cfg);
    for w in &balanced.warnings {
        log::warn!("{w}");
    }
    write_file(&args.output, &jsonl(&balanced.samples))?;
    if let Some(path) = &args.test_output {
        write_file(path, &jsonl(&test))?;
    }

    let report = BuildReport {
        params: BuildParams {
            input: args.input.display().to_string(),
            seed,
            types: types.clone(),
            duplication: cfg.duplication,
            budgets: cfg.budgets.iter().map(|b| format!("{b:?}")).collect(),
            lenient: args.lenient,
            held_out: args.test_output.is_some(),
        },
        objects,
        held_out_objects: held_out,
        rejected: rejected.len(),
        stats: CorpusStats::compute(&train, &balanced.samples),
        warnings: balanced.warnings.iter().map(|w| w.to_string()).collect(),
    };
    let body = to_json(&report);
    match &args.stats {
        Some(p) => write_file(p, &body)?,
        None => emit(None, &body)?,
    }

    if !rejected.is_empty() && !args.lenient {
        return Err(Failure::domain(format!(
            "{} invalid record(s); rerun with --lenient to skip them",
            rejected.len()
        )));
    }
    Ok(())
}
