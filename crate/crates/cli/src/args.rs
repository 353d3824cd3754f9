//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{FlagOverrides, Mode};

#[derive(Debug, Parser)]
#[command(
    name = "phasewalk",
    version,
    about = "Multi-walker quantum walks on circles in phase space: ideal and \
             dissipative simulation, spread scaling, fidelity decay, and \
             pulse-level gate checks",
    after_help = "Outputs: <out>/<name>.csv and <out>/<name>.manifest.txt; the \
                  manifest is a config file that reproduces the run via --config. \
                  Exit codes: 0 success, 1 usage/config error, 2 numerical guard \
                  tripped."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ideal two-walker walk: circular and covering-line spread per step,
    /// plus a scaling fit
    Walk(CommonArgs),
    /// Dissipative cavity walk: spread, fidelity decay, and a scaling fit
    NoisyWalk(CommonArgs),
    /// Fidelity decay of a dissipative cavity walk
    Afd(CommonArgs),
    /// Numerical verification of the pulse-level gate constructions
    SynthCheck(CommonArgs),
    /// Classical diffusive reference walk
    Baseline(CommonArgs),
    /// Grid sweep of dissipative walks (points run concurrently)
    Sweep(CommonArgs),
    /// Canned studies
    Preset(PresetArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (flat key = value with one [section] per mode)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory for <name>.csv and <name>.manifest.txt
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Coin: hadamard, hh, iswap, dft or grover (lists allowed in sweep)
    #[arg(long)]
    pub coin: Option<String>,
    /// Initial coin state: c1, c2 or c3 (lists allowed in sweep)
    #[arg(long)]
    pub init: Option<String>,
    /// Step angle on the circle, radians
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of walk steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fock truncation per cavity (open-system modes)
    #[arg(long)]
    pub fock_dim: Option<usize>,
    /// Cavity decay rate in units of chi (comma list in sweep)
    #[arg(long)]
    pub kappa: Option<String>,
    /// Qubit dephasing rate in units of chi (comma list in sweep)
    #[arg(long)]
    pub gamma: Option<String>,
    /// Scaling-fit window over step counts
    #[arg(long, value_name = "A:B")]
    pub fit_window: Option<String>,
    /// Sweep grid override, repeatable: kappa|gamma|coin|init=v1,v2,...
    #[arg(long, value_name = "KEY=V1,V2,...")]
    pub grid: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Which canned study to run
    #[arg(value_enum)]
    pub name: PresetName,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetName {
    /// Coin x initial-state scaling-exponent table of the ideal walk
    Table1,
    /// Spread-exponent ladders under increasing loss, then dephasing
    Fig2,
    /// Matched loss-vs-dephasing pairs with fidelity-decay tracking
    Fig3,
}

impl Command {
    pub fn mode(&self) -> Mode {
        match self {
            Command::Walk(_) => Mode::IdealWalk,
            Command::NoisyWalk(_) => Mode::NoisyWalk,
            Command::Afd(_) => Mode::Afd,
            Command::SynthCheck(_) => Mode::SynthCheck,
            Command::Baseline(_) => Mode::ClassicalBaseline,
            Command::Sweep(_) => Mode::Sweep,
            Command::Preset(p) => match p.name {
                PresetName::Table1 => Mode::PresetTable1,
                PresetName::Fig2 => Mode::PresetFig2,
                PresetName::Fig3 => Mode::PresetFig3,
            },
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Walk(c)
            | Command::NoisyWalk(c)
            | Command::Afd(c)
            | Command::SynthCheck(c)
            | Command::Baseline(c)
            | Command::Sweep(c) => c,
            Command::Preset(p) => &p.common,
        }
    }
}

impl CommonArgs {
    pub fn overrides(&self) -> FlagOverrides {
        FlagOverrides {
            out: self.out.clone(),
            coin: self.coin.clone(),
            init: self.init.clone(),
            delta: self.delta,
            steps: self.steps,
            fock_dim: self.fock_dim,
            kappa: self.kappa.clone(),
            gamma: self.gamma.clone(),
            fit_window: self.fit_window.clone(),
            grid: self.grid.clone(),
        }
    }
}
