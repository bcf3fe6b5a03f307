use std::io::BufReader;

use partgram::builder::ObjectRecord;
use partgram::clustering::{granularity_sweep, ClusterResult, EmbeddingTable};
use partgram::grammar::Aabb;
use rayon::prelude::*;
use serde::Serialize;

use super::{numbered_lines, with_workers};
use crate::args::ClusterArgs;
use crate::failure::{at_line, emit, read_file, to_json, CliResult, Failure};

#[derive(Serialize)]
struct ClusterParams {
    input: String,
    embeddings: String,
    alpha: f64,
    eps: Vec<f64>,
    min_pts: usize,
}

#[derive(Serialize)]
struct Level {
    components: usize,
    #[serde(flatten)]
    result: ClusterResult,
}

#[derive(Serialize)]
struct ObjectClusters {
    id: String,
    parts: usize,
    levels: Vec<Level>,
}

#[derive(Serialize)]
struct ClusterReport {
    params: ClusterParams,
    objects: Vec<ObjectClusters>,
}

pub fn run(args: &ClusterArgs, workers: usize) -> CliResult {
    let text = read_file(&args.input)?;
    let file = std::fs::File::open(&args.embeddings)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", args.embeddings.display())))?;
    let table = EmbeddingTable::from_jsonl(BufReader::new(file))
        .map_err(|e| Failure::domain(format!("{}: {e}", args.embeddings.display())))?;

    let lines: Vec<(usize, &str)> = numbered_lines(&text).collect();
    let objects: Vec<CliResult<ObjectClusters>> = with_workers(workers, || {
        lines
            .par_iter()
            .map(|&(line, l)| {
                let rec = ObjectRecord::from_json(l).map_err(|e| at_line(&args.input, line, e))?;
                let parts: Vec<(Aabb, &str)> =
                    rec.parts.iter().map(|p| (p.bbox, p.q2.as_str())).collect();
                let levels = granularity_sweep(&parts, &table, args.alpha, &args.eps, args.min_pts)
                    .map_err(|e| at_line(&args.input, line, e))?;
                Ok(ObjectClusters {
                    id: rec.id,
                    parts: parts.len(),
                    levels: levels
                        .into_iter()
                        .map(|result| Level {
                            components: result.component_count(),
                            result,
                        })
                        .collect(),
                })
            })
            .collect()
    })?;
    let objects = objects.into_iter().collect::<CliResult<Vec<_>>>()?;

    for o in &objects {
        let counts: Vec<String> = o
            .levels
            .iter()
            .map(|l| format!("eps {}: {}", l.result.eps, l.components))
            .collect();
        log::info!("{}: {} parts; {}", o.id, o.parts, counts.join(", "));
    }

    let report = ClusterReport {
        params: ClusterParams {
            input: args.input.display().to_string(),
            embeddings: args.embeddings.display().to_string(),
            alpha: args.alpha,
            eps: args.eps.clone(),
            min_pts: args.min_pts,
        },
        objects,
    };
    emit(args.output.as_deref(), &to_json(&report))
}
