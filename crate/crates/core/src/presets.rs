//! Canonical experiment definitions shared by the CLI presets and the
//! acceptance suite: the coin × initial-state scaling table of the ideal
//! walk, the open-system dissipation ladders, and the matched
//! photon-loss-versus-dephasing sensitivity pairs.
//!
//! Everything here is pure computation over the walk, stats and open-system
//! modules; rendering (CSV, manifests) lives in the CLI crate.

use crate::numerics::RegressionResult;
use crate::open::{self, NoisyDiagnostics, OpenError, OpenSystemConfig, DEFAULT_PHASE_GRID};
use crate::stats::{
    classical_lattice_sigma_series, lattice_sigma_series, scaling_exponent, sigma_series,
    SigmaSeries, StatsError,
};
use crate::walk::{CoinKind, CoinSpec, InitialCoin, WalkConfig};

/// Step angle shared by every preset.
pub const PRESET_DELTA: f64 = 0.8;
/// Ideal-walk preset step count.
pub const IDEAL_STEPS: usize = 25;
/// Default fit window of the ideal-walk scaling fits: skips the first few
/// steps (transient before the asymptotic spread rate sets in) and uses the
/// rest of the run.
pub const IDEAL_FIT_WINDOW: (usize, usize) = (4, 25);

/// The four two-walker coins of the scaling table, in presentation order.
pub const TABLE_COINS: [CoinKind; 4] =
    [CoinKind::Dft, CoinKind::HadamardTensor, CoinKind::RootISwap, CoinKind::Grover];

/// A circular-spread series counts as localized when it stays within this
/// factor of its early-time reference value (and never goes unbounded).
pub const LOCALIZATION_RATIO: f64 = 3.0;
/// Reference step of the localization ratio test.
pub const LOCALIZATION_REFERENCE_STEP: usize = 5;
/// Second leg of the localization test: an absolute ceiling on the wrapped
/// spread. A spread of 2.3 rad means the first circular moment has dropped
/// to 0.4, i.e. no substantial coherent peak survives anywhere on the
/// circle; a localized walk keeps its core, so its spread stays below this
/// at every step. The ceiling is needed because the ratio test alone is
/// blind once the reference step itself sits past the wrap-around
/// saturation point (which at δ = 0.8 happens within a handful of steps).
pub const LOCALIZATION_CEILING: f64 = 2.3;

/// Open-system presets: Fock truncation per cavity.
pub const OPEN_FOCK_DIM: usize = 16;
/// Open-system presets: walk steps per run.
pub const OPEN_STEPS: usize = 10;

/// Photon-loss ladder: κ/χ grid, with dephasing fixed at
/// [`LOSS_LADDER_GAMMA`].
pub const LOSS_LADDER_KAPPAS: [f64; 4] = [0.0, 0.02, 0.05, 0.1];
pub const LOSS_LADDER_GAMMA: f64 = 0.06;
/// Fit window of the loss ladder. The circular spread saturates once it
/// nears the half-circle (here around eight steps), so the fit stops there;
/// it starts at two steps because the one-step spread is dominated by the
/// initial cavity profile rather than by walk interference.
pub const LOSS_LADDER_WINDOW: (usize, usize) = (2, 8);

/// Dephasing ladder: γ/χ grid, with photon loss fixed at
/// [`DEPHASING_LADDER_KAPPA`].
pub const DEPHASING_LADDER_GAMMAS: [f64; 4] = [0.0, 0.02, 0.05, 0.1];
pub const DEPHASING_LADDER_KAPPA: f64 = 0.01;
/// Fit window of the dephasing ladder (same saturation cutoff as the loss
/// ladder; the first step is kept because dephasing acts from step one and
/// the ladder compares like against like).
pub const DEPHASING_LADDER_WINDOW: (usize, usize) = (1, 8);

/// Matched (κ/χ, γ/χ) sensitivity pairs: a loss-only run against a
/// dephasing-only run whose spread exponents nearly coincide, so any gap in
/// fidelity decay is attributable to the channel rather than to the spread.
pub const SENSITIVITY_PAIRS: [(f64, f64); 2] = [(0.01, 0.02), (0.1, 0.2)];
/// Fit window of the sensitivity pairs: restricted to the pre-saturation
/// steps where both members still spread, which is what makes the
/// exponent-matching meaningful.
pub const PAIR_WINDOW: (usize, usize) = (1, 4);

/// Outcome of one scaling-table cell.
#[derive(Debug, Clone)]
pub enum CellOutcome {
    /// The circular spread stayed within [`LOCALIZATION_RATIO`] of its
    /// value at [`LOCALIZATION_REFERENCE_STEP`]: the walk is localized.
    /// The fit, when one is possible, is of the bounded circular series
    /// itself (a flat line for a genuinely localized walk).
    Localized {
        max_sigma: f64,
        reference_sigma: f64,
        fit: Option<RegressionResult>,
    },
    /// The walk spreads; the fit is of the covering-line spread, whose
    /// growth is unobstructed by wrap-around.
    Scaling { fit: RegressionResult },
}

impl CellOutcome {
    pub fn is_localized(&self) -> bool {
        matches!(self, CellOutcome::Localized { .. })
    }
}

/// One coin × initial-state cell of the scaling table.
#[derive(Debug, Clone)]
pub struct ScalingCell {
    pub coin: CoinSpec,
    pub init: InitialCoin,
    /// Circular (wrapped) spread per step: the localization witness.
    pub circular: SigmaSeries,
    /// Covering-line spread per step: the growth-exponent observable.
    pub line: SigmaSeries,
    pub outcome: CellOutcome,
}

/// The full coin × initial-state scaling table.
#[derive(Debug, Clone)]
pub struct ScalingTable {
    pub delta: f64,
    pub steps: usize,
    pub fit_window: (usize, usize),
    pub cells: Vec<ScalingCell>,
}

/// Runs every [`TABLE_COINS`] coin against every named initial coin state
/// and classifies each cell as localized or scaling.
pub fn scaling_table(
    delta: f64,
    steps: usize,
    fit_window: (usize, usize),
) -> Result<ScalingTable, StatsError> {
    let mut cells = Vec::with_capacity(TABLE_COINS.len() * InitialCoin::ALL.len());
    for kind in TABLE_COINS {
        let coin = CoinSpec::new(kind);
        for init in InitialCoin::ALL {
            cells.push(scaling_cell(&coin, init, delta, steps, fit_window)?);
        }
    }
    Ok(ScalingTable { delta, steps, fit_window, cells })
}

/// Runs one two-walker combination and classifies it.
pub fn scaling_cell(
    coin: &CoinSpec,
    init: InitialCoin,
    delta: f64,
    steps: usize,
    fit_window: (usize, usize),
) -> Result<ScalingCell, StatsError> {
    let mut config = WalkConfig::new(2, init.state(), steps);
    config.delta = delta;
    let circular = sigma_series(&config, coin, 0)?;
    let line = lattice_sigma_series(&config, coin, 0)?;
    let outcome = match localization_witness(&circular) {
        Some((max_sigma, reference_sigma)) => CellOutcome::Localized {
            max_sigma,
            reference_sigma,
            fit: scaling_exponent(&circular, fit_window.0, fit_window.1).ok(),
        },
        None => CellOutcome::Scaling {
            fit: scaling_exponent(&line, fit_window.0, fit_window.1)?,
        },
    };
    Ok(ScalingCell { coin: *coin, init, circular, line, outcome })
}

/// Returns `(max σ, reference σ)` when the circular series stays within
/// [`LOCALIZATION_RATIO`] times its value at
/// [`LOCALIZATION_REFERENCE_STEP`] *and* below the absolute
/// [`LOCALIZATION_CEILING`] — the operational localization test — and
/// `None` when the walk spreads (or wraps so far that the circular moment
/// vanishes and the spread goes unbounded).
pub fn localization_witness(circular: &SigmaSeries) -> Option<(f64, f64)> {
    let mut max_sigma: f64 = 0.0;
    let mut reference = None;
    for &(n, sigma) in circular.entries() {
        let value = sigma.value()?;
        if n >= 1 {
            max_sigma = max_sigma.max(value);
        }
        if n == LOCALIZATION_REFERENCE_STEP {
            reference = Some(value);
        }
    }
    let reference = reference?;
    if max_sigma <= LOCALIZATION_RATIO * reference && max_sigma <= LOCALIZATION_CEILING {
        Some((max_sigma, reference))
    } else {
        None
    }
}

/// Diffusive reference: the exact covering-line spread of the classical
/// two-sided coin-flip walk, with its fit over the same kind of window the
/// quantum cells use.
pub fn classical_baseline(
    delta: f64,
    steps: usize,
    fit_window: (usize, usize),
) -> Result<(SigmaSeries, RegressionResult), StatsError> {
    let series = classical_lattice_sigma_series(delta, steps);
    let fit = scaling_exponent(&series, fit_window.0, fit_window.1)?;
    Ok((series, fit))
}

/// Open-system preset configuration: the four-point-transform coin on the
/// circular initial coin state, phase-state cavities, truncation
/// [`OPEN_FOCK_DIM`], [`OPEN_STEPS`] steps. Rates are in units of χ (χ is
/// set to 1, which fixes the time scale; the dynamics depend only on the
/// ratios κ/χ, γ/χ and on the step angle).
pub fn open_preset_config(kappa_over_chi: f64, gamma_over_chi: f64) -> OpenSystemConfig {
    let mut config = OpenSystemConfig::new(
        CoinSpec::new(CoinKind::Dft),
        InitialCoin::Circular.state(),
        OPEN_STEPS,
    );
    config.fock_dim = OPEN_FOCK_DIM;
    config.chi = 1.0;
    config.delta_theta = PRESET_DELTA;
    config.kappa = [kappa_over_chi; 2];
    config.gamma = [gamma_over_chi; 2];
    config
}

/// One dissipative run of the open-system presets.
#[derive(Debug)]
pub struct OpenRun {
    pub kappa_over_chi: f64,
    pub gamma_over_chi: f64,
    pub fit_window: (usize, usize),
    /// Fit of ln σ against ln n over `fit_window`; `None` when the window
    /// holds fewer than three usable spreads.
    pub fit: Option<RegressionResult>,
    pub diagnostics: NoisyDiagnostics,
}

/// Runs the open-system preset at the given rates and fits the spread
/// exponent over `fit_window`.
pub fn open_run(
    kappa_over_chi: f64,
    gamma_over_chi: f64,
    fit_window: (usize, usize),
) -> Result<OpenRun, OpenError> {
    let config = open_preset_config(kappa_over_chi, gamma_over_chi);
    let diagnostics = open::noisy_diagnostics(&config, DEFAULT_PHASE_GRID)?;
    let fit = scaling_exponent(&diagnostics.sigmas, fit_window.0, fit_window.1).ok();
    Ok(OpenRun { kappa_over_chi, gamma_over_chi, fit_window, fit, diagnostics })
}

/// Spread-exponent ladder over increasing photon loss at fixed dephasing.
pub fn loss_ladder() -> Result<Vec<OpenRun>, OpenError> {
    LOSS_LADDER_KAPPAS
        .iter()
        .map(|&kappa| open_run(kappa, LOSS_LADDER_GAMMA, LOSS_LADDER_WINDOW))
        .collect()
}

/// Spread-exponent ladder over increasing dephasing at fixed photon loss.
pub fn dephasing_ladder() -> Result<Vec<OpenRun>, OpenError> {
    DEPHASING_LADDER_GAMMAS
        .iter()
        .map(|&gamma| open_run(DEPHASING_LADDER_KAPPA, gamma, DEPHASING_LADDER_WINDOW))
        .collect()
}

/// A matched pair: photon loss only versus dephasing only.
#[derive(Debug)]
pub struct SensitivityPair {
    pub loss: OpenRun,
    pub dephasing: OpenRun,
}

/// Runs both members of every [`SENSITIVITY_PAIRS`] entry.
pub fn sensitivity_pairs() -> Result<Vec<SensitivityPair>, OpenError> {
    SENSITIVITY_PAIRS
        .iter()
        .map(|&(kappa, gamma)| {
            Ok(SensitivityPair {
                loss: open_run(kappa, 0.0, PAIR_WINDOW)?,
                dephasing: open_run(0.0, gamma, PAIR_WINDOW)?,
            })
        })
        .collect()
}
