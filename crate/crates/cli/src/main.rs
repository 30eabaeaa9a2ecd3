mod commands;
mod config;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use commands::{Outcome, EXIT_INPUT};
use config::{Cli, Command, Config};

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = Config::resolve(cli.flags)?;
    match cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Witness => commands::witness(&cfg),
        Command::AkltMixing => commands::aklt_mixing(&cfg),
        Command::Classify => commands::classify_cmd(&cfg),
        Command::OracleCheck => commands::oracle_check(&cfg),
    }
    .and_then(|out| emit(&cfg, out))
}

/// Writes a line, treating a closed pipe as success.
fn put(mut w: impl Write, text: &str) -> io::Result<()> {
    match writeln!(w, "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn emit(cfg: &Config, out: Outcome) -> anyhow::Result<Outcome> {
    let text = serde_json::to_string_pretty(&out.report)?;
    match &cfg.output {
        Some(path) => {
            fs::write(path, format!("{text}\n"))?;
            put(io::stdout().lock(), &out.summary)?;
        }
        None => {
            put(io::stdout().lock(), &text)?;
            put(io::stderr().lock(), &out.summary)?;
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = cli.command.name();
    match run(cli) {
        Ok(out) => ExitCode::from(out.code),
        Err(e) => {
            eprintln!("cspace {command}: error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
