use partgram::grammar::{lex, parse_program, parse_program_lenient, ParseError};

use super::numbered_lines;
use crate::args::ValidateArgs;
use crate::failure::{at_line, read_file, CliResult, Failure};

fn program_text(line: &str, field: Option<&str>) -> Result<String, String> {
    let Some(field) = field else {
        return Ok(line.to_string());
    };
    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    v.get(field)
        .and_then(|f| f.as_str())
        .map(str::to_string)
        .ok_or_else(|| format!("no string field {field:?}"))
}

fn check(text: &str, lenient: bool) -> (usize, Vec<ParseError>) {
    let tokens = lex(text);
    if lenient {
        let (p, errors) = parse_program_lenient(&tokens);
        (p.statements.len(), errors)
    } else {
        match parse_program(&tokens) {
            Ok(p) => (p.statements.len(), Vec::new()),
            Err(e) => (0, vec![e]),
        }
    }
}

pub fn run(args: &ValidateArgs) -> CliResult {
    let text = read_file(&args.input)?;
    println!(
        "# validate input={} field={} mode={}",
        args.input.display(),
        args.field.as_deref().unwrap_or("-"),
        if args.lenient { "lenient" } else { "strict" }
    );
    let (mut programs, mut failed) = (0usize, 0usize);
    for (line, l) in numbered_lines(&text) {
        programs += 1;
        let program = match program_text(l, args.field.as_deref()) {
            Ok(p) => p,
            Err(e) => {
                failed += 1;
                println!("{}", at_line(&args.input, line, e));
                continue;
            }
        };
        let (statements, errors) = check(&program, args.lenient);
        if errors.is_empty() {
            log::info!("line {line}: {statements} statement(s)");
            continue;
        }
        failed += 1;
        for e in errors {
            println!("{}:{line}: {e}", args.input.display());
        }
    }
    println!("{programs} programs, {failed} failed");
    if failed > 0 {
        return Err(Failure::domain(format!(
            "{failed} of {programs} programs did not parse"
        )));
    }
    Ok(())
}
