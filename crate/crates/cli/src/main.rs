mod args;
mod commands;
mod error;
mod input;
mod plot;
mod report;
mod tables;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use unitchart::simulation::with_threads;

use args::{Cli, Command, Format};
use error::CliError;
use input::read_data;
use report::{Outcome, Report, RunManifest, SCHEMA};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => with_threads(n, || dispatch(cli))?,
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let (name, manifest, outcome) = match &cli.command {
        Command::Fit(a) => {
            let data = read_data(&a.input)?;
            ("fit", RunManifest::new("fit", a, &[&data]), commands::fit(a, &data)?)
        }
        Command::Design(a) => ("design", RunManifest::new("design", a, &[]), commands::design(a)?),
        Command::Evaluate(a) => ("evaluate", RunManifest::new("evaluate", a, &[]), commands::evaluate(a)?),
        Command::Robustness(a) => ("robustness", RunManifest::new("robustness", a, &[]), commands::robustness(a)?),
        Command::Monitor(a) => {
            let phase1 = read_data(&a.phase1)?;
            let phase2 = read_data(&a.phase2)?;
            let manifest = RunManifest::new("monitor", a, &[&phase1, &phase2]);
            let (outcome, plots) = commands::monitor(a, &phase1, &phase2)?;
            if let Some(dir) = &a.plot_dir {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
                for (file, svg) in plots {
                    write_file(&dir.join(file), svg.as_bytes())?;
                }
            }
            ("monitor", manifest, outcome)
        }
        Command::Tables(a) => {
            let id = tables::TableId::parse(&a.id)?;
            if id.needs_seed() && a.seed.is_none() {
                return Err(CliError::Usage(format!("table {} is simulated; pass --seed", a.id)));
            }
            ("tables", RunManifest::new("tables", a, &[]), tables::run(id, a.runs, a.seed)?)
        }
    };
    emit(cli, name, manifest, outcome)
}

fn emit(cli: &Cli, name: &str, manifest: RunManifest, outcome: Outcome) -> Result<(), CliError> {
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let text = match cli.format {
        Format::Json => {
            let report = Report { schema: SCHEMA, manifest, result: outcome.result };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => format!(
            "# unitchart {name} (version {}, input sha256 {})\n{}",
            manifest.tool_version, manifest.input_digest, outcome.table
        ),
    };
    match &cli.output {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source })
}
