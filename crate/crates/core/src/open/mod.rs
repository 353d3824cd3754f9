//! Open-system counterpart of the ideal walk: two cavities dispersively
//! coupled to two qubits, evolved under a Lindblad master equation with
//! cavity photon loss and qubit dephasing.
//!
//! The composite Hilbert space is ordered (cavity 1, qubit 1, cavity 2,
//! qubit 2) with flat index `idx = ((n1·2 + s1)·d + n2)·2 + s2`, where `d` is
//! the Fock truncation and the qubit bit `s = 1` is the σz eigenvalue `+1`
//! ("step up") coin component. The Hamiltonian is the dispersive interaction
//! `H = χ (n̂₁ σz₁ + n̂₂ σz₂)`, diagonal in this basis.
//!
//! Sign convention: under `exp(-iHt)` a `+1`-coin component advances a phase
//! state by `-Δθ` per step while a `-1` component advances by `+Δθ`. The
//! opposite choice merely relabels the circle (`φ -> -φ`); every diagnostic
//! computed here (spread, scaling exponents, fidelity to the matching ideal
//! reference) is invariant under that reflection.
//!
//! One walk step = coin unitary on the two qubits, optional dissipator-only
//! segment (`coin_toss_time > 0`) modelling a non-instantaneous coin, then
//! evolution for `Δθ/χ`. With all rates zero the step propagator is applied
//! in closed form; otherwise fixed-step RK4 integrates the master equation.
//! The density matrix is re-symmetrised each step but never renormalised, so
//! trace drift stays an honest accuracy witness.

mod engine;

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::ComplexMatrix;
use crate::stats::{self, PhaseDistribution, Sigma, SigmaSeries, StatsError};
use crate::walk::{coin_matrix, CoinSpec, WalkError};

/// Default angular grid for phase-profile extraction; plenty for any Fock
/// truncation this module is used with (harmonics up to `d - 1`).
pub const DEFAULT_PHASE_GRID: usize = 1024;

/// A run is flagged as truncation-suspect when the top two Fock levels of
/// either cavity ever hold at least this much population.
pub const TRUNCATION_POPULATION_LIMIT: f64 = 1e-3;

/// Integration aborts when the trace drifts further than this from its
/// initial value.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Tolerance of the end-of-run positive-semidefiniteness witness recorded
/// by [`noisy_diagnostics`]: the final state passes when `ρ + tol·I` admits
/// a Cholesky factorisation, i.e. its smallest eigenvalue exceeds `-tol`.
pub const PSD_WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum OpenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "integration step too large: trace drifted by {drift:.3e} \
         (limit {TRACE_DRIFT_LIMIT:.0e}); reduce dt"
    )]
    StepTooLarge { drift: f64 },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Initial state of each cavity (both cavities use the same construction,
/// with their own reference angles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityInit {
    /// Equal-weight superposition of the lowest `levels` Fock states with
    /// linearly winding phases; `levels = 1` is the vacuum. Keeping
    /// `levels <= d - 2` leaves the top two levels empty so the truncation
    /// monitor stays quiet and conditional shifts act exactly.
    PhaseState { levels: usize },
    /// Sine-profile superposition of the lowest `levels` Fock states,
    /// `c_n ∝ sin((n+1)π/(levels+1))`. Among all states supported on
    /// `levels` Fock levels this one maximises the first circular moment
    /// of its phase distribution (`Σ c_n c_{n+1} = cos(π/(levels+1))`),
    /// so it is the sharpest phase pointer that leaves every higher level
    /// exactly empty — useful when the truncation monitor must stay at
    /// zero.
    SinePhase { levels: usize },
    /// Coherent state of mean photon number `nbar`, renormalised on the
    /// truncated space.
    Coherent { nbar: f64 },
}

/// Full open-walk configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystemConfig {
    /// Fock truncation `d` per cavity; the composite dimension is `4d²`.
    pub fock_dim: usize,
    /// Dispersive coupling strength χ (sets the time unit).
    pub chi: f64,
    /// Phase-space step angle per walk step.
    pub delta_theta: f64,
    /// Photon loss rates `[κ1, κ2]`.
    pub kappa: [f64; 2],
    /// Qubit dephasing rates `[γ1, γ2]`.
    pub gamma: [f64; 2],
    /// Coin unitary applied to the two qubits each step.
    pub coin: CoinSpec,
    /// Initial coin-register amplitudes, length 4, unit norm.
    pub initial_coin: Vec<C64>,
    /// Initial reference angle of each cavity.
    pub initial_phase: [f64; 2],
    /// Initial cavity state construction.
    pub cavity_init: CavityInit,
    /// Number of walk steps.
    pub steps: usize,
    /// RK4 time step; capped at `0.01/χ · max(1, Δθ)`.
    pub dt: f64,
    /// Duration of a dissipator-only segment inserted after each coin
    /// application (0 keeps coin tosses instantaneous). Exposed for
    /// sensitivity studies of decoherence acting during the coin itself.
    pub coin_toss_time: f64,
}

impl OpenSystemConfig {
    /// Defaults: `d = 16`, `χ = 1`, `Δθ = 0.8`, no dissipation, phase-state
    /// init on `d - 2` levels at angle 0, `dt = 0.01`, instantaneous coins.
    pub fn new(coin: CoinSpec, initial_coin: Vec<C64>, steps: usize) -> Self {
        Self {
            fock_dim: 16,
            chi: 1.0,
            delta_theta: 0.8,
            kappa: [0.0; 2],
            gamma: [0.0; 2],
            coin,
            initial_coin,
            initial_phase: [0.0; 2],
            cavity_init: CavityInit::PhaseState { levels: 14 },
            steps,
            dt: 0.01,
            coin_toss_time: 0.0,
        }
    }

    /// Duration of the conditional-shift segment of one walk step.
    pub fn t_step(&self) -> f64 {
        self.delta_theta / self.chi
    }

    /// Largest admissible RK4 step for this configuration.
    pub fn dt_cap(&self) -> f64 {
        0.01 / self.chi * self.delta_theta.max(1.0)
    }

    pub fn validate(&self) -> Result<(), OpenError> {
        let bad = |msg: String| Err(OpenError::InvalidConfig(msg));
        if self.fock_dim < 2 {
            return bad(format!("fock_dim must be at least 2, got {}", self.fock_dim));
        }
        if !(self.chi > 0.0) || !self.chi.is_finite() {
            return bad(format!("chi must be positive and finite, got {}", self.chi));
        }
        if !(self.delta_theta > 0.0) || !self.delta_theta.is_finite() {
            return bad(format!(
                "delta_theta must be positive and finite, got {}",
                self.delta_theta
            ));
        }
        for (name, rates) in [("kappa", &self.kappa), ("gamma", &self.gamma)] {
            for (j, &r) in rates.iter().enumerate() {
                if !(0.0..=self.chi).contains(&r) || !r.is_finite() {
                    return bad(format!(
                        "{name}[{j}] = {r} outside the supported range [0, chi = {}]",
                        self.chi
                    ));
                }
                if r > 0.2 * self.chi {
                    log::warn!(
                        "{name}[{j}] = {r} exceeds 0.2·chi; the dispersive model is \
                         questionable this deep into the dissipative regime"
                    );
                }
            }
        }
        coin_matrix(&self.coin, 2)?;
        if self.initial_coin.len() != 4 {
            return bad(format!(
                "initial_coin needs 4 amplitudes, got {}",
                self.initial_coin.len()
            ));
        }
        let norm_sq: f64 = self.initial_coin.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return bad(format!("initial_coin squared norm {norm_sq} is not 1 within 1e-10"));
        }
        if self.initial_phase.iter().any(|p| !p.is_finite()) {
            return bad("initial_phase entries must be finite".into());
        }
        match self.cavity_init {
            CavityInit::PhaseState { levels } | CavityInit::SinePhase { levels } => {
                if levels < 1 || levels > self.fock_dim {
                    return bad(format!(
                        "phase-state init needs 1..={} levels, got {levels}",
                        self.fock_dim
                    ));
                }
                if levels > self.fock_dim - 2 {
                    log::warn!(
                        "phase-state init on {levels} of {} levels populates the top two \
                         Fock states and will trip the truncation monitor",
                        self.fock_dim
                    );
                }
            }
            CavityInit::Coherent { nbar } => {
                if !(nbar >= 0.0) || !nbar.is_finite() {
                    return bad(format!("coherent init needs nbar >= 0, got {nbar}"));
                }
            }
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        let cap = self.dt_cap();
        if self.dt > cap * (1.0 + 1e-9) {
            return bad(format!(
                "dt = {} exceeds the integration cap {cap:.3e} for chi = {}, delta_theta = {}",
                self.dt, self.chi, self.delta_theta
            ));
        }
        if !(self.coin_toss_time >= 0.0) || !self.coin_toss_time.is_finite() {
            return bad(format!(
                "coin_toss_time must be non-negative and finite, got {}",
                self.coin_toss_time
            ));
        }
        Ok(())
    }
}

/// Hermitian density matrix on the composite (cavity, qubit, cavity, qubit)
/// space, stored dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    fock_dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zeros(fock_dim: usize) -> Self {
        let dim = 4 * fock_dim * fock_dim;
        Self { fock_dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    /// Outer product `|ψ><ψ|` of a unit-norm composite state vector.
    pub fn from_pure(fock_dim: usize, psi: &[C64]) -> Result<Self, OpenError> {
        let dim = 4 * fock_dim * fock_dim;
        if psi.len() != dim {
            return Err(OpenError::DimensionMismatch(format!(
                "state vector of length {} for composite dimension {dim}",
                psi.len()
            )));
        }
        let norm_sq: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(OpenError::InvalidConfig(format!(
                "state vector squared norm {norm_sq} is not 1 within 1e-10"
            )));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(psi[r] * psi[c].conj());
            }
        }
        Ok(Self { fock_dim, data })
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    /// Composite dimension `4d²`.
    pub fn dim(&self) -> usize {
        4 * self.fock_dim * self.fock_dim
    }

    /// Flat index of `|n1, s1, n2, s2>`; `s = 1` is the `+1` coin component.
    pub fn index(&self, n1: usize, s1: usize, n2: usize, s2: usize) -> usize {
        debug_assert!(n1 < self.fock_dim && n2 < self.fock_dim && s1 < 2 && s2 < 2);
        ((n1 * 2 + s1) * self.fock_dim + n2) * 2 + s2
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        let dim = self.dim();
        self.data[r * dim + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let res = (self.data[r * dim + c] - self.data[c * dim + r].conj()).norm();
                worst = worst.max(res);
            }
        }
        worst
    }

    /// `tr ρ²`, evaluated as `Σ |ρ_rc|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn symmetrize(&mut self) {
        let dim = self.dim();
        engine::symmetrize(&mut self.data, dim);
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reduced `d x d` state of one cavity (0 or 1), tracing out everything
    /// else.
    pub fn reduced_cavity(&self, cavity: usize) -> Result<ComplexMatrix, OpenError> {
        if cavity > 1 {
            return Err(OpenError::DimensionMismatch(format!(
                "cavity index must be 0 or 1, got {cavity}"
            )));
        }
        let d = self.fock_dim;
        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for n in 0..d {
            for np in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for s1 in 0..2 {
                    for m in 0..d {
                        for s2 in 0..2 {
                            let (r, c) = if cavity == 0 {
                                (self.index(n, s1, m, s2), self.index(np, s1, m, s2))
                            } else {
                                (self.index(m, s1, n, s2), self.index(m, s1, np, s2))
                            };
                            acc += self.data[r * dim + c];
                        }
                    }
                }
                out.set(n, np, acc);
            }
        }
        Ok(out)
    }

    /// Total population of the top two Fock levels, maximised over the two
    /// cavities. The truncation monitor watches this.
    pub fn top_two_level_population(&self) -> f64 {
        let d = self.fock_dim;
        let dim = self.dim();
        let mut p1 = vec![0.0f64; d];
        let mut p2 = vec![0.0f64; d];
        for idx in 0..dim {
            let v = self.data[idx * dim + idx].re;
            p1[idx / (4 * d)] += v;
            p2[(idx >> 1) % d] += v;
        }
        let t1 = p1[d - 1] + p1[d - 2];
        let t2 = p2[d - 1] + p2[d - 2];
        t1.max(t2)
    }

    /// True when the smallest eigenvalue exceeds `-tol`, established via a
    /// Cholesky factorisation of `ρ + tol·I`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let dim = self.dim();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| {
            let mut v = self.data[r * dim + c];
            if r == c {
                v += tol;
            }
            v
        });
        nalgebra::linalg::Cholesky::new(m).is_some()
    }
}

/// Health summary of an open-walk run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunReport {
    /// Number of recorded states (steps + 1, counting the initial state).
    pub states_recorded: usize,
    /// Largest `|tr ρ - tr ρ(0)|` over recorded states.
    pub max_trace_drift: f64,
    /// Largest Hermiticity residual over recorded states.
    pub max_hermiticity_residual: f64,
    /// Largest top-two Fock population over recorded states and cavities.
    pub max_top_two_population: f64,
    /// Set when `max_top_two_population` reached
    /// [`TRUNCATION_POPULATION_LIMIT`]; spreads and fidelities from such a
    /// run chase truncation artefacts.
    pub truncation_suspect: bool,
}

impl RunReport {
    fn record(&mut self, rho: &DensityMatrix, trace0: f64) {
        self.states_recorded += 1;
        self.max_trace_drift = self.max_trace_drift.max((rho.trace() - trace0).abs());
        self.max_hermiticity_residual =
            self.max_hermiticity_residual.max(rho.hermiticity_residual());
        let tt = rho.top_two_level_population();
        self.max_top_two_population = self.max_top_two_population.max(tt);
        if tt >= TRUNCATION_POPULATION_LIMIT {
            self.truncation_suspect = true;
        }
    }
}

/// Diagonal entries of the dispersive interaction `χ (n̂₁σz₁ + n̂₂σz₂)` in
/// composite-index order (the Hamiltonian is exactly diagonal in this basis).
pub fn build_interaction_hamiltonian(config: &OpenSystemConfig) -> Result<Vec<f64>, OpenError> {
    config.validate()?;
    let ev = engine::Evolver::new(config);
    Ok(ev.e_int.iter().map(|&e| config.chi * e as f64).collect())
}

/// Master-equation right-hand side at `rho`.
pub fn lindblad_rhs(rho: &DensityMatrix, config: &OpenSystemConfig) -> Result<DensityMatrix, OpenError> {
    config.validate()?;
    check_dims(rho, config)?;
    let ev = engine::Evolver::new(config);
    let mut out = DensityMatrix::zeros(config.fock_dim);
    ev.rhs_into(true, &rho.data, &mut out.data);
    Ok(out)
}

/// Evolves `rho` under the full generator (Hamiltonian plus dissipators) for
/// duration `t`. Closed systems use the exact diagonal propagator; otherwise
/// fixed-step RK4 with step `config.dt`.
pub fn evolve(rho: &DensityMatrix, config: &OpenSystemConfig, t: f64) -> Result<DensityMatrix, OpenError> {
    config.validate()?;
    check_dims(rho, config)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(OpenError::InvalidConfig(format!(
            "evolution time must be non-negative and finite, got {t}"
        )));
    }
    let ev = engine::Evolver::new(config);
    let mut out = rho.clone();
    if t == 0.0 {
        return Ok(out);
    }
    let trace0 = out.trace();
    if ev.is_closed() {
        ev.apply_exact_phases(t, &mut out.data);
    } else {
        let mut scratch = engine::Scratch::new(out.data.len());
        ev.rk4_evolve(true, t, config.dt, &mut out.data, &mut scratch);
    }
    let drift = (out.trace() - trace0).abs();
    if drift > TRACE_DRIFT_LIMIT {
        return Err(OpenError::StepTooLarge { drift });
    }
    out.symmetrize();
    Ok(out)
}

/// Initial composite density matrix of `config` (cavity states ⊗ coin).
pub fn initial_density(config: &OpenSystemConfig) -> Result<DensityMatrix, OpenError> {
    config.validate()?;
    let psi = build_initial_vector(config)?;
    DensityMatrix::from_pure(config.fock_dim, &psi)
}

/// All recorded states of a noisy walk (index = step count, so `states[0]`
/// is the initial state). Retains every density matrix; for long runs at
/// large `d` prefer [`noisy_walk_observe`] or [`noisy_diagnostics`], which
/// stream instead of storing.
pub struct NoisyWalk {
    pub states: Vec<DensityMatrix>,
    pub report: RunReport,
}

pub fn noisy_walk(config: &OpenSystemConfig) -> Result<NoisyWalk, OpenError> {
    let mut states = Vec::with_capacity(config.steps + 1);
    let report = noisy_walk_observe(config, |_, rho| {
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(NoisyWalk { states, report })
}

/// Runs the noisy walk, invoking `observer(n, ρ_n)` for `n = 0..=steps`
/// without retaining the states.
pub fn noisy_walk_observe(
    config: &OpenSystemConfig,
    mut observer: impl FnMut(usize, &DensityMatrix) -> Result<(), OpenError>,
) -> Result<RunReport, OpenError> {
    config.validate()?;
    let coin = coin_table(&config.coin)?;
    let mut rho = initial_density(config)?;
    let ev = engine::Evolver::new(config);
    let needs_rk4 = !ev.is_closed();
    let mut scratch = needs_rk4.then(|| engine::Scratch::new(rho.data.len()));
    let t_step = config.t_step();
    let trace0 = rho.trace();

    let mut report = RunReport::default();
    report.record(&rho, trace0);
    observer(0, &rho)?;
    for n in 1..=config.steps {
        engine::conjugate_by_coin(&mut rho.data, config.fock_dim, &coin);
        if let Some(scratch) = scratch.as_mut() {
            if config.coin_toss_time > 0.0 {
                ev.rk4_evolve(false, config.coin_toss_time, config.dt, &mut rho.data, scratch);
            }
            ev.rk4_evolve(true, t_step, config.dt, &mut rho.data, scratch);
        } else {
            ev.apply_exact_phases(t_step, &mut rho.data);
        }
        let drift = (rho.trace() - trace0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(OpenError::StepTooLarge { drift });
        }
        rho.symmetrize();
        report.record(&rho, trace0);
        observer(n, &rho)?;
    }
    Ok(report)
}

/// Pure-state references `|Ψ_n>` of the matching closed system, for
/// `n = 0..=steps`: the same coin with exact conditional-shift phases and no
/// dissipation.
pub fn ideal_reference(config: &OpenSystemConfig) -> Result<Vec<Vec<C64>>, OpenError> {
    config.validate()?;
    let coin = coin_table(&config.coin)?;
    let ev = engine::Evolver::new(config);
    let mut psi = build_initial_vector(config)?;
    let mut out = Vec::with_capacity(config.steps + 1);
    out.push(psi.clone());
    let phase = config.delta_theta;
    for _ in 0..config.steps {
        engine::apply_coin_to_vector(&mut psi, config.fock_dim, &coin);
        for (idx, a) in psi.iter_mut().enumerate() {
            *a *= C64::from_polar(1.0, -phase * ev.e_int[idx] as f64);
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Average fidelity decay `<ψ|ρ|ψ>`: overlap of the evolved mixed state with
/// a pure reference. Values straying outside `[0, 1]` by at most 1e-10 are
/// clipped; anything further is returned as-is for the caller to flag.
pub fn afd(rho: &DensityMatrix, psi: &[C64]) -> Result<f64, OpenError> {
    let dim = rho.dim();
    if psi.len() != dim {
        return Err(OpenError::DimensionMismatch(format!(
            "reference of length {} against composite dimension {dim}",
            psi.len()
        )));
    }
    let mut v = 0.0f64;
    for r in 0..dim {
        let mut row = C64::new(0.0, 0.0);
        for c in 0..dim {
            row += rho.data[r * dim + c] * psi[c];
        }
        v += (psi[r].conj() * row).re;
    }
    if v < 0.0 && v >= -1e-10 {
        v = 0.0;
    } else if v > 1.0 && v <= 1.0 + 1e-10 {
        v = 1.0;
    }
    Ok(v)
}

/// Angular probability density carried by a reduced cavity state, sampled on
/// a uniform grid: `P(φ) = (2π)^{-1} Σ_{n,n'} e^{i(n'-n)φ} ρ_{nn'}`.
pub fn fock_phase_distribution(
    reduced: &ComplexMatrix,
    grid: usize,
) -> Result<PhaseDistribution, OpenError> {
    let d = reduced.rows();
    if reduced.cols() != d || d < 2 {
        return Err(OpenError::DimensionMismatch(format!(
            "reduced cavity state must be square with dimension >= 2, got {}x{}",
            reduced.rows(),
            reduced.cols()
        )));
    }
    if grid < 2 * d + 1 {
        return Err(OpenError::InvalidConfig(format!(
            "grid of {grid} points cannot resolve harmonics up to {}; need at least {}",
            d - 1,
            2 * d + 1
        )));
    }
    let trace: C64 = (0..d).map(|n| reduced.get(n, n)).sum();
    if (trace.re - 1.0).abs() > 1e-6 || trace.im.abs() > 1e-8 {
        return Err(StatsError::NotNormalized { sum: trace.re, tol: 1e-6 }.into());
    }
    // One sum per upper diagonal: c_m = Σ_n ρ_{n, n+m} multiplies e^{imφ}.
    let diagonals: Vec<C64> = (1..d)
        .map(|m| (0..d - m).map(|n| reduced.get(n, n + m)).sum())
        .collect();
    let mut values = Vec::with_capacity(grid);
    for i in 0..grid {
        let phi = TAU * i as f64 / grid as f64;
        let mut v = trace.re;
        for (m, cm) in diagonals.iter().enumerate() {
            v += 2.0 * (cm * C64::from_polar(1.0, (m + 1) as f64 * phi)).re;
        }
        v /= TAU;
        // Distributions with exact zeros (e.g. truncated-phase-state kernels)
        // pick up integrator roundoff of order 1e-8; clamp that noise but
        // still reject genuinely negative densities.
        if v < -1e-6 {
            return Err(StatsError::NegativeProbability { value: v }.into());
        }
        values.push(v.max(0.0));
    }
    Ok(PhaseDistribution::grid(values)?)
}

/// First circular moment of the reduced cavity state, evaluated analytically
/// as `Σ_n ρ_{n+1, n}` (equals the grid integral of `P(φ) e^{iφ}` exactly).
pub fn cavity_first_moment(reduced: &ComplexMatrix) -> Result<C64, OpenError> {
    let d = reduced.rows();
    if reduced.cols() != d || d < 2 {
        return Err(OpenError::DimensionMismatch(format!(
            "reduced cavity state must be square with dimension >= 2, got {}x{}",
            reduced.rows(),
            reduced.cols()
        )));
    }
    Ok((0..d - 1).map(|n| reduced.get(n + 1, n)).sum())
}

/// Holevo spread of one cavity's angular profile.
pub fn cavity_sigma(rho: &DensityMatrix, cavity: usize, grid: usize) -> Result<Sigma, OpenError> {
    let reduced = rho.reduced_cavity(cavity)?;
    let dist = fock_phase_distribution(&reduced, grid)?;
    Ok(stats::holevo_sigma(&dist))
}

/// Per-step diagnostics of one noisy walk, computed streaming.
#[derive(Debug)]
pub struct NoisyDiagnostics {
    /// Holevo spread of cavity 1 after `n` steps, `n = 0..=steps`.
    pub sigmas: SigmaSeries,
    /// Overlap with the matching ideal reference, indexed by step count.
    pub afd: Vec<f64>,
    /// Whether the final state passed the positive-semidefiniteness
    /// witness at [`PSD_WITNESS_TOL`].
    pub final_state_psd: bool,
    pub report: RunReport,
}

/// Runs a noisy walk once and records spread and reference overlap per step.
pub fn noisy_diagnostics(
    config: &OpenSystemConfig,
    grid: usize,
) -> Result<NoisyDiagnostics, OpenError> {
    let references = ideal_reference(config)?;
    let mut sigmas = SigmaSeries::new();
    let mut fidelities = Vec::with_capacity(config.steps + 1);
    let mut final_state_psd = false;
    let report = noisy_walk_observe(config, |n, rho| {
        sigmas.push(n, cavity_sigma(rho, 0, grid)?)?;
        fidelities.push(afd(rho, &references[n])?);
        if n == config.steps {
            final_state_psd = rho.is_positive_semidefinite(PSD_WITNESS_TOL);
        }
        Ok(())
    })?;
    Ok(NoisyDiagnostics { sigmas, afd: fidelities, final_state_psd, report })
}

fn check_dims(rho: &DensityMatrix, config: &OpenSystemConfig) -> Result<(), OpenError> {
    if rho.fock_dim != config.fock_dim {
        return Err(OpenError::DimensionMismatch(format!(
            "density matrix truncation {} differs from configured {}",
            rho.fock_dim, config.fock_dim
        )));
    }
    Ok(())
}

fn coin_table(spec: &CoinSpec) -> Result<[[C64; 4]; 4], OpenError> {
    let m = coin_matrix(spec, 2)?;
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m.get(r, c);
        }
    }
    Ok(out)
}

/// Per-cavity Fock amplitudes of the configured initial state at angle `phi`.
fn cavity_amplitudes(init: &CavityInit, phi: f64, d: usize) -> Result<Vec<C64>, OpenError> {
    match *init {
        CavityInit::PhaseState { levels } => {
            if levels < 1 || levels > d {
                return Err(OpenError::InvalidConfig(format!(
                    "phase-state init needs 1..={d} levels, got {levels}"
                )));
            }
            let w = 1.0 / (levels as f64).sqrt();
            Ok((0..d)
                .map(|n| {
                    if n < levels {
                        C64::from_polar(w, phi * n as f64)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect())
        }
        CavityInit::SinePhase { levels } => {
            if levels < 1 || levels > d {
                return Err(OpenError::InvalidConfig(format!(
                    "sine-phase init needs 1..={d} levels, got {levels}"
                )));
            }
            let alpha = std::f64::consts::PI / (levels as f64 + 1.0);
            let w = (2.0 / (levels as f64 + 1.0)).sqrt();
            Ok((0..d)
                .map(|n| {
                    if n < levels {
                        C64::from_polar(w * (alpha * (n + 1) as f64).sin(), phi * n as f64)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect())
        }
        CavityInit::Coherent { nbar } => {
            if !(nbar >= 0.0) || !nbar.is_finite() {
                return Err(OpenError::InvalidConfig(format!(
                    "coherent init needs nbar >= 0, got {nbar}"
                )));
            }
            // Poissonian magnitudes by the ratio recurrence, then renormalise
            // on the truncated space.
            let mut mags = Vec::with_capacity(d);
            let mut m = 1.0f64;
            for n in 0..d {
                if n > 0 {
                    m *= (nbar / n as f64).sqrt();
                }
                mags.push(m);
            }
            let norm: f64 = mags.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(mags
                .into_iter()
                .enumerate()
                .map(|(n, v)| C64::from_polar(v / norm, phi * n as f64))
                .collect())
        }
    }
}

fn build_initial_vector(config: &OpenSystemConfig) -> Result<Vec<C64>, OpenError> {
    let d = config.fock_dim;
    let a1 = cavity_amplitudes(&config.cavity_init, config.initial_phase[0], d)?;
    let a2 = cavity_amplitudes(&config.cavity_init, config.initial_phase[1], d)?;
    let mut psi = vec![C64::new(0.0, 0.0); 4 * d * d];
    for n1 in 0..d {
        for s1 in 0..2 {
            for n2 in 0..d {
                for s2 in 0..2 {
                    let idx = ((n1 * 2 + s1) * d + n2) * 2 + s2;
                    psi[idx] = a1[n1] * a2[n2] * config.initial_coin[2 * s1 + s2];
                }
            }
        }
    }
    Ok(psi)
}
