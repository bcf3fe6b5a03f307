use std::io::BufReader;
use std::path::Path;

use partgram::builder::InstructionSample;
use partgram::clustering::EmbeddingTable;
use partgram::metrics::{evaluate, records_from_samples, EvalConfig, EvalRecord};

use super::numbered_lines;
use crate::args::{EvalArgs, EvalFormat};
use crate::failure::{at_line, emit, read_file, to_json, CliResult, Failure};

fn load(path: &Path, format: EvalFormat) -> CliResult<Vec<EvalRecord>> {
    let text = read_file(path)?;
    match format {
        EvalFormat::Records => EvalRecord::read_jsonl(&text)
            .map_err(|e| Failure::domain(format!("{}: {e}", path.display()))),
        EvalFormat::Samples => {
            let samples = numbered_lines(&text)
                .map(|(line, l)| {
                    serde_json::from_str::<InstructionSample>(l).map_err(|e| at_line(path, line, e))
                })
                .collect::<CliResult<Vec<_>>>()?;
            records_from_samples(&samples)
                .map_err(|e| Failure::domain(format!("{}: {e}", path.display())))
        }
    }
}

pub fn run(args: &EvalArgs) -> CliResult {
    if args.voxel_res == 0 {
        return Err(Failure::config("--voxel-res must be at least 1"));
    }
    let gt = load(&args.gt, args.format)?;
    let pred = load(&args.pred, args.format)?;
    let table = match &args.embeddings {
        Some(p) => {
            let f = std::fs::File::open(p)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?;
            Some(
                EmbeddingTable::from_jsonl(BufReader::new(f))
                    .map_err(|e| Failure::domain(format!("{}: {e}", p.display())))?,
            )
        }
        None => None,
    };
    let config = EvalConfig {
        voxel_res: args.voxel_res,
        matching: args.matching.into(),
        embedding_source: args.embeddings.as_ref().map(|p| p.display().to_string()),
    };
    let report = evaluate(&gt, &pred, &config, table.as_ref()).map_err(Failure::domain)?;
    if report.missing_predictions > 0 {
        log::warn!(
            "{} ground-truth records have no prediction",
            report.missing_predictions
        );
    }
    emit(args.output.as_deref(), &to_json(&report))
}
