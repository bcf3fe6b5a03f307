use partgram::executor::{
    cuboid_masks, diff_scenes, execute_program, CuboidMask, PendingRegion, PointScene,
};
use partgram::grammar::{lex, parse_program, parse_program_lenient};
use serde::Serialize;

use crate::args::ExecuteArgs;
use crate::failure::{emit, read_file, to_json, write_file, CliResult, Failure};

#[derive(Serialize)]
struct ExecuteParams {
    scene: String,
    program: String,
    lenient: bool,
}

#[derive(Serialize)]
struct ExecuteLog {
    params: ExecuteParams,
    statements: usize,
    parse_errors: Vec<String>,
    points_before: usize,
    points_after: usize,
    removed: Vec<usize>,
    untouched: usize,
    regions: Vec<PendingRegion>,
    masks: Vec<CuboidMask>,
}

pub fn run(args: &ExecuteArgs) -> CliResult {
    let scene = PointScene::read_jsonl(&read_file(&args.scene)?)
        .map_err(|e| Failure::domain(format!("{}: {e}", args.scene.display())))?;
    let tokens = lex(&read_file(&args.program)?);
    let (program, errors) = if args.lenient {
        parse_program_lenient(&tokens)
    } else {
        let p = parse_program(&tokens)
            .map_err(|e| Failure::domain(format!("{}: {e}", args.program.display())))?;
        (p, Vec::new())
    };
    for e in &errors {
        log::warn!("{}: skipped: {e}", args.program.display());
    }

    let after = execute_program(&scene, &program);
    write_file(&args.output, &after.points_jsonl())?;

    let diff = diff_scenes(&scene, &after);
    let log = ExecuteLog {
        params: ExecuteParams {
            scene: args.scene.display().to_string(),
            program: args.program.display().to_string(),
            lenient: args.lenient,
        },
        statements: program.statements.len(),
        parse_errors: errors.iter().map(|e| e.to_string()).collect(),
        points_before: scene.points.len(),
        points_after: after.points.len(),
        removed: diff.removed,
        untouched: diff.untouched,
        regions: after.regions,
        masks: cuboid_masks(&program),
    };
    match &args.log {
        Some(p) => write_file(p, &to_json(&log)),
        None => emit(None, &to_json(&log)),
    }
}
