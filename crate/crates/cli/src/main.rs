mod commands;
mod config;

use clap::Parser;
use config::{Cli, ExperimentConfig, Format};
use std::io::Write;
use std::process::ExitCode;

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(rep: &commands::Report, cfg: &ExperimentConfig, format: Option<Format>) -> String {
    let cfg_json = serde_json::to_value(cfg).expect("config serializes");
    match format {
        None => rep.text.clone(),
        Some(Format::Json) => {
            let doc = serde_json::json!({"config": cfg_json, "result": rep.result});
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Some(Format::Csv) => {
            let mut s = format!("# config {}\n", serde_json::to_string(&cfg_json).expect("json"));
            match &rep.csv {
                Some(c) => s += c,
                None => {
                    s += &rep.header.join(",");
                    s.push('\n');
                    for row in &rep.rows {
                        s += &row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
                        s.push('\n');
                    }
                }
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = cli.opts.resolve(cli.cmd).and_then(|cfg| Ok((commands::run(cli.cmd, &cli.opts)?, cfg)));
    let (rep, cfg) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_budget() { 2 } else { 1 });
        }
    };
    // An output file without --format takes its format from the extension.
    let format = cli.opts.format.or(match &cli.opts.out {
        Some(p) if p.ends_with(".csv") => Some(Format::Csv),
        Some(_) => Some(Format::Json),
        None => None,
    });
    let body = render(&rep, &cfg, format);
    let written = match &cli.opts.out {
        Some(path) => std::fs::write(path, &body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if rep.failed {
        eprintln!("check failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
