//! Executes a resolved plan: runs the requested study and renders result
//! rows (plus, for the gate checks, structured text for stdout).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use phasewalk_core::open::{self, CavityInit, OpenSystemConfig};
use phasewalk_core::stats::{
    classical_lattice_sigma_series, lattice_sigma_series, scaling_exponent, sigma_series,
    SigmaSeries,
};
use phasewalk_core::synth::{self, AngleScan, DeviceParams, GateReport};
use phasewalk_core::walk::WalkConfig;
use phasewalk_core::{presets, NoisyDiagnostics, OpenError, StatsError, SynthError, WalkError};

use crate::config::{IdealParams, NoisyParams, Resolved, SweepParams, TableParams};
use crate::rows::{ResultRow, SlopeField};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Open(#[from] OpenError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl RunError {
    /// True when a runtime numerical guard aborted the run (as opposed to a
    /// configuration problem).
    pub fn is_numerical_guard(&self) -> bool {
        matches!(self, RunError::Open(OpenError::StepTooLarge { .. }))
    }
}

/// Output of one run, before anything is written to disk.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    /// Structured text for stdout (gate reports).
    pub stdout_text: Option<String>,
    /// Set when a numerical guard tripped without aborting (truncation
    /// suspicion); outputs are still written, but the exit code signals it.
    pub guard_tripped: Option<String>,
}

pub fn execute(resolved: &Resolved) -> Result<RunOutput, RunError> {
    match resolved {
        Resolved::IdealWalk(p) => ideal_walk(p),
        Resolved::ClassicalBaseline(p) => classical_baseline(p),
        Resolved::NoisyWalk(p) => noisy_walk(p, true),
        Resolved::Afd(p) => noisy_walk(p, false),
        Resolved::SynthCheck => synth_check(),
        Resolved::Sweep(p) => sweep(p),
        Resolved::PresetTable1(p) => preset_table1(p),
        Resolved::PresetFig2 => preset_fig2(),
        Resolved::PresetFig3 => preset_fig3(),
    }
}

fn window_id(base: &str, window: (usize, usize)) -> String {
    format!("{base}/fit[{}:{}]", window.0, window.1)
}

/// Per-step rows of a spread series under one experiment id.
fn series_rows(
    experiment: &str,
    template: &ResultRow,
    series: &SigmaSeries,
    afd: Option<&[f64]>,
) -> Vec<ResultRow> {
    series
        .entries()
        .iter()
        .map(|&(n, sigma)| ResultRow {
            experiment: experiment.to_string(),
            n: Some(n),
            sigma: sigma.into(),
            afd: afd.and_then(|a| a.get(n)).copied(),
            ..template.clone()
        })
        .collect()
}

/// One fit row; when the window cannot support a fit the slope cells stay
/// empty (a fit from fewer than three points is never emitted).
fn fit_row(
    base: &str,
    template: &ResultRow,
    series: &SigmaSeries,
    window: (usize, usize),
) -> ResultRow {
    let mut row = ResultRow {
        experiment: window_id(base, window),
        ..template.clone()
    };
    match scaling_exponent(series, window.0, window.1) {
        Ok(fit) => {
            row.slope = SlopeField::Value(fit.slope);
            row.slope_stderr = Some(fit.slope_stderr);
        }
        Err(err) => log::warn!("no fit for {}: {err}", row.experiment),
    }
    row
}

fn ideal_walk(p: &IdealParams) -> Result<RunOutput, RunError> {
    let walkers = if p.coin.kind == phasewalk_core::CoinKind::SingleHadamard { 1 } else { 2 };
    let initial = if walkers == 1 { p.init.single_state() } else { p.init.state() };
    let mut config = WalkConfig::new(walkers, initial, p.steps);
    config.delta = p.delta;
    let circular = sigma_series(&config, &p.coin, 0)?;
    let line = lattice_sigma_series(&config, &p.coin, 0)?;

    let template = ResultRow {
        coin: p.coin.kind.label().to_string(),
        init: p.init.label().to_string(),
        ..Default::default()
    };
    let mut rows = series_rows("ideal-walk/circular", &template, &circular, None);
    rows.extend(series_rows("ideal-walk/line", &template, &line, None));
    if presets::localization_witness(&circular).is_some() {
        rows.push(ResultRow {
            experiment: window_id("ideal-walk", p.fit_window),
            slope: SlopeField::Localized,
            ..template.clone()
        });
    } else {
        rows.push(fit_row("ideal-walk", &template, &line, p.fit_window));
    }
    Ok(RunOutput { rows, ..Default::default() })
}

fn classical_baseline(p: &IdealParams) -> Result<RunOutput, RunError> {
    let series = classical_lattice_sigma_series(p.delta, p.steps);
    let template = ResultRow::default();
    let mut rows = series_rows("classical/line", &template, &series, None);
    rows.push(fit_row("classical", &template, &series, p.fit_window));
    Ok(RunOutput { rows, ..Default::default() })
}

/// Builds the engine configuration of one open-system run; rates are in
/// units of χ, which the run fixes to 1.
fn open_config(p: &NoisyParams) -> OpenSystemConfig {
    let mut config = OpenSystemConfig::new(p.coin, p.init.state(), p.steps);
    config.fock_dim = p.fock_dim;
    config.chi = 1.0;
    config.delta_theta = p.delta;
    config.kappa = [p.kappa; 2];
    config.gamma = [p.gamma; 2];
    config.cavity_init = CavityInit::PhaseState { levels: p.levels };
    config.dt = p.dt;
    config
}

fn truncation_guard(diag: &NoisyDiagnostics, what: &str) -> Option<String> {
    diag.report.truncation_suspect.then(|| {
        format!(
            "truncation suspect in {what}: top two Fock levels reached population \
             {:.3e}; raise fock_dim",
            diag.report.max_top_two_population
        )
    })
}

fn noisy_walk(p: &NoisyParams, with_sigma: bool) -> Result<RunOutput, RunError> {
    let config = open_config(p);
    let diag = open::noisy_diagnostics(&config, p.phase_grid)?;
    if !diag.final_state_psd {
        log::warn!("final state failed the positive-semidefiniteness witness");
    }
    let template = ResultRow {
        coin: p.coin.kind.label().to_string(),
        init: p.init.label().to_string(),
        kappa: Some(p.kappa),
        gamma: Some(p.gamma),
        ..Default::default()
    };
    let (base, mut rows) = if with_sigma {
        ("noisy-walk", series_rows("noisy-walk", &template, &diag.sigmas, Some(&diag.afd)))
    } else {
        let rows = diag
            .afd
            .iter()
            .enumerate()
            .map(|(n, &f)| ResultRow {
                experiment: "afd".to_string(),
                n: Some(n),
                afd: Some(f),
                ..template.clone()
            })
            .collect();
        ("afd", rows)
    };
    if let Some(window) = p.fit_window {
        rows.push(fit_row(base, &template, &diag.sigmas, window));
    }
    let guard_tripped = truncation_guard(&diag, base);
    Ok(RunOutput { rows, guard_tripped, ..Default::default() })
}

fn sweep(p: &SweepParams) -> Result<RunOutput, RunError> {
    #[derive(Clone)]
    struct Point {
        kappa: f64,
        gamma: f64,
        coin: phasewalk_core::CoinKind,
        init: phasewalk_core::InitialCoin,
    }

    let mut points = Vec::new();
    for &kappa in &p.kappas {
        for &gamma in &p.gammas {
            for &coin in &p.coins {
                for &init in &p.inits {
                    points.push(Point { kappa, gamma, coin, init });
                }
            }
        }
    }
    // Deterministic output order regardless of execution order.
    points.sort_by(|a, b| {
        a.kappa
            .total_cmp(&b.kappa)
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.coin.label().cmp(b.coin.label()))
            .then(a.init.label().cmp(b.init.label()))
    });
    points.dedup_by(|a, b| {
        a.kappa == b.kappa && a.gamma == b.gamma && a.coin == b.coin && a.init == b.init
    });

    type Outcome = Result<(ResultRow, Option<String>), RunError>;
    let results: Vec<Mutex<Option<Outcome>>> =
        points.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len())
        .max(1);

    let run_point = |point: &Point| -> Outcome {
        let params = NoisyParams {
            coin: phasewalk_core::CoinSpec::new(point.coin),
            init: point.init,
            delta: p.delta,
            steps: p.steps,
            fock_dim: p.fock_dim,
            kappa: point.kappa,
            gamma: point.gamma,
            levels: p.levels,
            dt: p.dt,
            phase_grid: p.phase_grid,
            fit_window: Some(p.fit_window),
        };
        let config = open_config(&params);
        let diag = open::noisy_diagnostics(&config, p.phase_grid)?;
        let template = ResultRow {
            coin: point.coin.label().to_string(),
            init: point.init.label().to_string(),
            kappa: Some(point.kappa),
            gamma: Some(point.gamma),
            ..Default::default()
        };
        let what = format!(
            "sweep point kappa={} gamma={} coin={} init={}",
            point.kappa,
            point.gamma,
            point.coin.label(),
            point.init.label()
        );
        let row = fit_row("sweep", &template, &diag.sigmas, p.fit_window);
        Ok((row, truncation_guard(&diag, &what)))
    };

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points.len() {
                    break;
                }
                let outcome = run_point(&points[i]);
                *results[i].lock().expect("sweep result slot") = Some(outcome);
            });
        }
    });

    let mut rows = Vec::with_capacity(points.len());
    let mut guards = Vec::new();
    for slot in results {
        let outcome = slot
            .into_inner()
            .expect("sweep result slot")
            .expect("every sweep point executed");
        let (row, guard) = outcome?;
        rows.push(row);
        guards.extend(guard);
    }
    Ok(RunOutput {
        rows,
        guard_tripped: (!guards.is_empty()).then(|| guards.join("; ")),
        ..Default::default()
    })
}

fn preset_table1(p: &TableParams) -> Result<RunOutput, RunError> {
    let table = presets::scaling_table(p.delta, p.steps, p.fit_window)?;
    let rows = table
        .cells
        .iter()
        .map(|cell| {
            let mut row = ResultRow {
                experiment: window_id("table1", p.fit_window),
                coin: cell.coin.kind.label().to_string(),
                init: cell.init.label().to_string(),
                ..Default::default()
            };
            match &cell.outcome {
                presets::CellOutcome::Localized { .. } => row.slope = SlopeField::Localized,
                presets::CellOutcome::Scaling { fit } => {
                    row.slope = SlopeField::Value(fit.slope);
                    row.slope_stderr = Some(fit.slope_stderr);
                }
            }
            row
        })
        .collect();
    Ok(RunOutput { rows, ..Default::default() })
}

fn ladder_rows(
    rows: &mut Vec<ResultRow>,
    guards: &mut Vec<String>,
    base: &str,
    runs: &[presets::OpenRun],
) {
    for run in runs {
        let template = ResultRow {
            coin: phasewalk_core::CoinKind::Dft.label().to_string(),
            init: phasewalk_core::InitialCoin::Circular.label().to_string(),
            kappa: Some(run.kappa_over_chi),
            gamma: Some(run.gamma_over_chi),
            ..Default::default()
        };
        rows.extend(series_rows(base, &template, &run.diagnostics.sigmas, Some(&run.diagnostics.afd)));
        let mut fit = ResultRow {
            experiment: window_id(base, run.fit_window),
            ..template.clone()
        };
        if let Some(f) = &run.fit {
            fit.slope = SlopeField::Value(f.slope);
            fit.slope_stderr = Some(f.slope_stderr);
        }
        rows.push(fit);
        let what = format!(
            "{base} run kappa={} gamma={}",
            run.kappa_over_chi, run.gamma_over_chi
        );
        guards.extend(truncation_guard(&run.diagnostics, &what));
    }
}

fn preset_fig2() -> Result<RunOutput, RunError> {
    let mut rows = Vec::new();
    let mut guards = Vec::new();
    ladder_rows(&mut rows, &mut guards, "fig2a", &presets::loss_ladder()?);
    ladder_rows(&mut rows, &mut guards, "fig2b", &presets::dephasing_ladder()?);
    Ok(RunOutput {
        rows,
        guard_tripped: (!guards.is_empty()).then(|| guards.join("; ")),
        ..Default::default()
    })
}

fn preset_fig3() -> Result<RunOutput, RunError> {
    let mut rows = Vec::new();
    let mut guards = Vec::new();
    for pair in presets::sensitivity_pairs()? {
        ladder_rows(&mut rows, &mut guards, "fig3/loss", std::slice::from_ref(&pair.loss));
        ladder_rows(&mut rows, &mut guards, "fig3/dephasing", std::slice::from_ref(&pair.dephasing));
    }
    Ok(RunOutput {
        rows,
        guard_tripped: (!guards.is_empty()).then(|| guards.join("; ")),
        ..Default::default()
    })
}

fn render_scan(scan: &AngleScan) -> String {
    format!(
        "  angle scan: best theta = {:.12} (infidelity {:.3e}); \
         recipe angle = {:.12} (infidelity {:.3e})\n",
        scan.theta_star, scan.infidelity_at_star, scan.claimed_angle, scan.infidelity_at_claimed
    )
}

fn render_report(report: &GateReport) -> String {
    let mut text = format!("== {} ==\n", report.target);
    text.push_str(&format!("  infidelity: {:.3e}\n", report.infidelity));
    if !report.residual_phases.is_empty() {
        let phases: Vec<String> = report
            .residual_phases
            .iter()
            .map(|p| format!("{:+.6}{:+.6}i", p.re, p.im))
            .collect();
        text.push_str(&format!("  residual phases: [{}]\n", phases.join(", ")));
    }
    if let Some(scan) = &report.scan {
        text.push_str(&render_scan(scan));
    }
    for note in &report.notes {
        text.push_str(&format!("  note: {note}\n"));
    }
    text
}

fn synth_check() -> Result<RunOutput, RunError> {
    let device = DeviceParams::default();
    let reports = [
        synth::hadamard_pulse_check(&device)?,
        synth::iswap_synthesis_check(std::f64::consts::FRAC_PI_4, 1)?,
        synth::dft_synthesis_check(8)?,
        synth::grover_synthesis_check(0, std::f64::consts::FRAC_PI_8)?,
    ];
    let text = reports.iter().map(render_report).collect::<Vec<_>>().join("\n");
    Ok(RunOutput { stdout_text: Some(text), ..Default::default() })
}
