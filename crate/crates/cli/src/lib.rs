//! Command-line driver for the phase-space quantum-walk engine: argument
//! and config handling, experiment execution, CSV and manifest emission.

pub mod args;
pub mod config;
pub mod rows;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

use args::Cli;
use config::{Mode, Plan, RawConfig};
use run::RunOutput;

/// Exit code signalling a usage or configuration problem.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code signalling a tripped numerical guard (truncation suspicion or
/// an aborted integration).
pub const EXIT_GUARD: i32 = 2;

/// CSV/manifest base name of each mode.
pub fn file_stem(mode: Mode) -> &'static str {
    match mode {
        Mode::IdealWalk => "ideal-walk",
        Mode::NoisyWalk => "noisy-walk",
        Mode::Afd => "afd",
        Mode::SynthCheck => "synth-check",
        Mode::ClassicalBaseline => "classical-baseline",
        Mode::Sweep => "sweep",
        Mode::PresetTable1 => "table1",
        Mode::PresetFig2 => "fig2",
        Mode::PresetFig3 => "fig3",
    }
}

/// Runs the CLI and returns the process exit code.
pub fn main_impl<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = err.print();
            return code;
        }
    };

    let mode = cli.command.mode();
    let common = cli.command.common();
    let file = match common.config.as_deref().map(RawConfig::load).transpose() {
        Ok(file) => file,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_CONFIG;
        }
    };
    let plan = match config::resolve(mode, file.as_ref(), &common.overrides()) {
        Ok(plan) => plan,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_CONFIG;
        }
    };

    let output = match run::execute(&plan.resolved) {
        Ok(output) => output,
        Err(err) => {
            eprintln!("error: {err}");
            return if err.is_numerical_guard() { EXIT_GUARD } else { EXIT_CONFIG };
        }
    };

    if let Some(text) = &output.stdout_text {
        print!("{text}");
    }
    match write_outputs(&plan, &output) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_CONFIG;
        }
    }
    if let Some(guard) = &output.guard_tripped {
        eprintln!("numerical guard tripped: {guard}");
        return EXIT_GUARD;
    }
    0
}

/// Writes `<name>.csv` (when the mode emits rows) and
/// `<name>.manifest.txt`; returns the written paths.
pub fn write_outputs(plan: &Plan, output: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&plan.out)?;
    let stem = file_stem(plan.resolved.mode());
    let mut written = Vec::new();
    if !output.rows.is_empty() {
        let csv_path = plan.out.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, rows::to_csv(&output.rows))?;
        written.push(csv_path);
    }
    let manifest_path = plan.out.join(format!("{stem}.manifest.txt"));
    std::fs::write(&manifest_path, config::manifest(plan))?;
    written.push(manifest_path);
    Ok(written)
}
