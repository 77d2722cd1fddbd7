mod args;
mod checks;
mod instance;
mod report;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use vertex_pde::LabError;

use args::{Cli, Command};
use checks::Refusal;
use report::RunReport;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

fn command_name(c: &Command) -> String {
    let sub = |v: &dyn std::fmt::Debug| format!("{v:?}").to_lowercase();
    match c {
        Command::Verify { what } => format!("verify {}", sub(what)),
        Command::Spectrum { .. } => "spectrum".into(),
        Command::Fz => "fz".into(),
        Command::Omega { what } => format!("omega {}", sub(what)),
        Command::Pde { what } => format!("pde {}", sub(what)),
        Command::Reduce => "reduce".into(),
        Command::Dwbc { what } => format!("dwbc {}", sub(what)),
        Command::All => "all".into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match instance::load(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bpl: {e:#}");
            let capacity = matches!(e.downcast_ref::<LabError>(), Some(LabError::Capacity { .. }));
            return ExitCode::from(if capacity { EXIT_CAPACITY } else { EXIT_CONFIG });
        }
    };

    let mut rep = RunReport::new(&command_name(&cli.command), &cfg);
    match checks::run(&cli.command, &cfg, &mut rep) {
        Ok(()) => {}
        Err(Refusal::Shape(msg)) => {
            eprintln!("bpl: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(Refusal::Capacity(e)) => {
            eprintln!("bpl: {e} (raise it with BPL_MAX_L)");
            return ExitCode::from(EXIT_CAPACITY);
        }
    }
    rep.finish();

    let json = serde_json::to_string_pretty(&rep).expect("report serializes");
    if let Some(path) = &cli.global.out {
        if let Err(e) = fs::write(path, &json) {
            eprintln!("bpl: writing {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let text = if cli.global.json { json + "\n" } else { rep.table() };
    // a closed pipe (`bpl … | head`) is not an error
    let _ = io::stdout().lock().write_all(text.as_bytes());
    if rep.summary.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
