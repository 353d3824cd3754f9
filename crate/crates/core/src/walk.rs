//! Ideal coined quantum walks on circles in phase space.
//!
//! After `N` steps walker `j` sits at angle `φ0_j + k_j·δ` where the integer
//! offset `k_j` satisfies `|k_j| <= N` and `k_j ≡ N (mod 2)`. States are kept
//! sparse as a map from (offset vector, coin basis string) to amplitude, so
//! the circle never needs discretising and step counts in the hundreds stay
//! cheap. Each step applies the coin to the internal register, then shifts
//! every walker by `±1` conditioned on its coin bit.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{kron, ComplexMatrix};
use crate::stats::PhaseDistribution;

/// Amplitudes below this magnitude are dropped after each step; the induced
/// probability loss per pruned key is below 1e-30.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("coin angle theta={theta} outside the valid range (0, pi/2]")]
    InvalidTheta { theta: f64 },
    #[error("{kind} coin supports {expected} walker(s), got {num_walkers}")]
    UnsupportedWalkerCount { kind: &'static str, expected: &'static str, num_walkers: usize },
    #[error("initial coin state has squared norm {norm_sq} (must be 1 within 1e-12)")]
    NotNormalized { norm_sq: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("phase states need dimension >= 2, got {dim}")]
    InvalidDimension { dim: usize },
    #[error("step angle delta must be positive and finite, got {delta}")]
    InvalidDelta { delta: f64 },
}

/// Which unitary acts on the coin register each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinKind {
    /// One walker: the 2x2 Hadamard.
    SingleHadamard,
    /// Independent Hadamards, one per walker (separable).
    HadamardTensor,
    /// Two walkers: partial iSWAP with mixing angle `theta` (entangling).
    RootISwap,
    /// Two walkers: the four-point discrete Fourier transform (entangling).
    Dft,
    /// Two walkers: the Grover diffusion operator (entangling).
    Grover,
}

impl CoinKind {
    pub fn label(&self) -> &'static str {
        match self {
            CoinKind::SingleHadamard => "hadamard",
            CoinKind::HadamardTensor => "hh",
            CoinKind::RootISwap => "iswap",
            CoinKind::Dft => "dft",
            CoinKind::Grover => "grover",
        }
    }

    /// Parses the config/CSV label produced by [`CoinKind::label`].
    pub fn parse(label: &str) -> Option<CoinKind> {
        [
            CoinKind::SingleHadamard,
            CoinKind::HadamardTensor,
            CoinKind::RootISwap,
            CoinKind::Dft,
            CoinKind::Grover,
        ]
        .into_iter()
        .find(|k| k.label() == label)
    }
}

/// Coin choice plus its one tunable parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec {
    pub kind: CoinKind,
    /// Mixing angle, used only by [`CoinKind::RootISwap`]; valid on
    /// `(0, pi/2]`.
    pub theta: f64,
}

impl CoinSpec {
    pub fn new(kind: CoinKind) -> Self {
        Self { kind, theta: FRAC_PI_4 }
    }

    pub fn with_theta(kind: CoinKind, theta: f64) -> Self {
        Self { kind, theta }
    }
}

/// Coin basis ordering: bit `1` of the index is the "step up" (`+1`)
/// component, bit `0` is "step down" (`-1`); walker 1 owns the most
/// significant bit. For two walkers the basis order is
/// `(|-1,-1>, |-1,+1>, |+1,-1>, |+1,+1>)`.
pub fn coin_matrix(spec: &CoinSpec, num_walkers: usize) -> Result<ComplexMatrix, WalkError> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let hadamard = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(-1.0, 0.0)],
    ])
    .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));

    let need_two = |kind: &'static str| {
        if num_walkers == 2 {
            Ok(())
        } else {
            Err(WalkError::UnsupportedWalkerCount { kind, expected: "2", num_walkers })
        }
    };

    match spec.kind {
        CoinKind::SingleHadamard => {
            if num_walkers != 1 {
                return Err(WalkError::UnsupportedWalkerCount {
                    kind: "single-hadamard",
                    expected: "1",
                    num_walkers,
                });
            }
            Ok(hadamard)
        }
        CoinKind::HadamardTensor => {
            if num_walkers == 0 {
                return Err(WalkError::UnsupportedWalkerCount {
                    kind: "hadamard-tensor",
                    expected: ">= 1",
                    num_walkers,
                });
            }
            let mut m = hadamard.clone();
            for _ in 1..num_walkers {
                m = kron(&m, &hadamard);
            }
            Ok(m)
        }
        CoinKind::RootISwap => {
            need_two("root-iswap")?;
            let th = spec.theta;
            if !(th > 0.0 && th <= std::f64::consts::FRAC_PI_2) || !th.is_finite() {
                return Err(WalkError::InvalidTheta { theta: th });
            }
            let (cs, sn) = (th.cos(), th.sin());
            Ok(ComplexMatrix::from_rows(&[
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(cs, 0.0), c(0.0, sn), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, sn), c(cs, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            ]))
        }
        CoinKind::Dft => {
            need_two("dft")?;
            // Fourth root of unity i: entry (j, k) = i^(j*k) / 2.
            Ok(ComplexMatrix::from_fn(4, 4, |j, k| {
                C64::new(0.0, 1.0).powu((j * k) as u32) * 0.5
            }))
        }
        CoinKind::Grover => {
            need_two("grover")?;
            // 2|u><u| - I with |u> the uniform coin state.
            Ok(ComplexMatrix::from_fn(4, 4, |j, k| {
                if j == k {
                    c(-0.5, 0.0)
                } else {
                    c(0.5, 0.0)
                }
            }))
        }
    }
}

/// Sparse walk state over (offset vector, coin index) keys.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkLatticeState {
    num_walkers: usize,
    amps: BTreeMap<(Vec<i16>, u16), C64>,
}

impl WalkLatticeState {
    /// All walkers at offset 0 with the given coin-register amplitudes
    /// (length `2^num_walkers`, unit norm within 1e-12).
    pub fn new_localized(num_walkers: usize, coin_amps: &[C64]) -> Result<Self, WalkError> {
        if num_walkers == 0 || num_walkers > 16 {
            return Err(WalkError::UnsupportedWalkerCount {
                kind: "lattice state",
                expected: "1..=16",
                num_walkers,
            });
        }
        let dim = 1usize << num_walkers;
        if coin_amps.len() != dim {
            return Err(WalkError::DimensionMismatch(format!(
                "coin register of {num_walkers} walker(s) needs {dim} amplitudes, got {}",
                coin_amps.len()
            )));
        }
        let norm_sq: f64 = coin_amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(WalkError::NotNormalized { norm_sq });
        }
        let origin = vec![0i16; num_walkers];
        let mut amps = BTreeMap::new();
        for (idx, &a) in coin_amps.iter().enumerate() {
            if a.norm() >= PRUNE_THRESHOLD {
                amps.insert((origin.clone(), idx as u16), a);
            }
        }
        Ok(Self { num_walkers, amps })
    }

    pub fn num_walkers(&self) -> usize {
        self.num_walkers
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<i16>, u16), &C64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, offsets: &[i16], coin: u16) -> C64 {
        self.amps
            .get(&(offsets.to_vec(), coin))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Position probabilities of one walker, summed over the other walkers
    /// and the coin register (keyed by lattice offset).
    pub fn offset_marginal(&self, walker: usize) -> Result<BTreeMap<i16, f64>, WalkError> {
        if walker >= self.num_walkers {
            return Err(WalkError::DimensionMismatch(format!(
                "walker index {walker} out of range for {} walker(s)",
                self.num_walkers
            )));
        }
        let mut out = BTreeMap::new();
        for ((k, _), a) in &self.amps {
            *out.entry(k[walker]).or_insert(0.0) += a.norm_sqr();
        }
        Ok(out)
    }
}

/// Full walk configuration: register sizes, step angle, and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub num_walkers: usize,
    /// Step angle δ on the circle (radians, positive).
    pub delta: f64,
    /// Initial coin-register amplitudes, length `2^num_walkers`.
    pub initial_coin: Vec<C64>,
    /// Initial angle of each walker.
    pub phi0: Vec<f64>,
    /// Number of steps to evolve.
    pub steps: usize,
}

impl WalkConfig {
    pub fn new(num_walkers: usize, initial_coin: Vec<C64>, steps: usize) -> Self {
        Self { num_walkers, delta: 0.8, initial_coin, phi0: vec![0.0; num_walkers], steps }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(WalkError::InvalidDelta { delta: self.delta });
        }
        if self.phi0.len() != self.num_walkers {
            return Err(WalkError::DimensionMismatch(format!(
                "{} initial angles for {} walker(s)",
                self.phi0.len(),
                self.num_walkers
            )));
        }
        WalkLatticeState::new_localized(self.num_walkers, &self.initial_coin).map(|_| ())
    }
}

/// Symmetric product coin `(|+1> + |-1>)/sqrt(2)` per walker; spreads
/// ballistically under every coin considered here except Grover.
pub fn coin_state_plus_plus() -> Vec<C64> {
    vec![C64::new(0.5, 0.0); 4]
}

/// Basis coin state `|+1,+1>`; localises under the partial-iSWAP coin.
pub fn coin_state_up_up() -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 4];
    v[3] = C64::new(1.0, 0.0);
    v
}

/// Circular product coin `(|+1> + i|-1>)/sqrt(2)` per walker; gives
/// left-right symmetric spreading under Hadamard-type coins.
pub fn coin_state_circular() -> Vec<C64> {
    let c = |re: f64, im: f64| C64::new(re, im);
    vec![c(-0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.5, 0.0)]
}

/// Named two-walker initial coin states selectable on the experiment
/// surface (configs, CSV labels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitialCoin {
    /// `c1`: symmetric product state, see [`coin_state_plus_plus`].
    Uniform,
    /// `c2`: basis state `|+1,+1>`, see [`coin_state_up_up`].
    UpUp,
    /// `c3`: circular product state, see [`coin_state_circular`].
    Circular,
}

impl InitialCoin {
    pub const ALL: [InitialCoin; 3] = [InitialCoin::Uniform, InitialCoin::UpUp, InitialCoin::Circular];

    /// Short label used in configs and CSV output.
    pub fn label(self) -> &'static str {
        match self {
            InitialCoin::Uniform => "c1",
            InitialCoin::UpUp => "c2",
            InitialCoin::Circular => "c3",
        }
    }

    /// Coin-register amplitudes of this initial state.
    pub fn state(self) -> Vec<C64> {
        match self {
            InitialCoin::Uniform => coin_state_plus_plus(),
            InitialCoin::UpUp => coin_state_up_up(),
            InitialCoin::Circular => coin_state_circular(),
        }
    }

    /// Single-walker (one-coin) factor of this product state; the
    /// two-walker [`InitialCoin::state`] is this factor tensored with
    /// itself, up to a global phase.
    pub fn single_state(self) -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            InitialCoin::Uniform => vec![C64::new(s, 0.0); 2],
            InitialCoin::UpUp => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            InitialCoin::Circular => vec![C64::new(0.0, s), C64::new(s, 0.0)],
        }
    }

    /// Parses the config/CSV label (`c1`, `c2`, `c3`).
    pub fn parse(label: &str) -> Option<InitialCoin> {
        InitialCoin::ALL.into_iter().find(|i| i.label() == label)
    }
}

/// One walk step: coin on the internal register, then a conditional `±1`
/// lattice shift per walker.
pub fn walk_step(state: &WalkLatticeState, spec: &CoinSpec) -> Result<WalkLatticeState, WalkError> {
    let n = state.num_walkers;
    let coin = coin_matrix(spec, n)?;
    let dim = 1usize << n;
    let mut amps: BTreeMap<(Vec<i16>, u16), C64> = BTreeMap::new();
    for ((k, ci), &a) in state.amps.iter() {
        for co in 0..dim {
            let w = coin.get(co, *ci as usize);
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let mut shifted = k.clone();
            for (j, kj) in shifted.iter_mut().enumerate() {
                // Walker 1 owns the most significant coin bit.
                let up = (co >> (n - 1 - j)) & 1 == 1;
                *kj += if up { 1 } else { -1 };
            }
            *amps.entry((shifted, co as u16)).or_insert(C64::new(0.0, 0.0)) += w * a;
        }
    }
    amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    Ok(WalkLatticeState { num_walkers: n, amps })
}

/// Evolves the localized initial state of `config` for `config.steps` steps.
pub fn walk_evolve(config: &WalkConfig, spec: &CoinSpec) -> Result<WalkLatticeState, WalkError> {
    config.validate()?;
    let mut state = WalkLatticeState::new_localized(config.num_walkers, &config.initial_coin)?;
    for _ in 0..config.steps {
        state = walk_step(&state, spec)?;
    }
    Ok(state)
}

/// Truncated phase state: `d` equal-weight number states with linearly
/// winding phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseStateVector {
    pub phi: f64,
    pub amplitudes: Vec<C64>,
}

/// `|φ, d> = d^{-1/2} Σ_n e^{i n φ} |n>`, requiring `d >= 2`.
pub fn phase_state_vector(phi: f64, d: usize) -> Result<PhaseStateVector, WalkError> {
    if d < 2 {
        return Err(WalkError::InvalidDimension { dim: d });
    }
    let w = 1.0 / (d as f64).sqrt();
    let amplitudes = (0..d).map(|n| C64::from_polar(w, phi * n as f64)).collect();
    Ok(PhaseStateVector { phi, amplitudes })
}

/// Classical baseline after `n_steps` unbiased `±δ` steps from `phi0`:
/// binomial weights `C(N, (N+k)/2) / 2^N` on the wrapped angles `phi0 + kδ`.
pub fn classical_walk_distribution(
    delta: f64,
    n_steps: usize,
    phi0: f64,
) -> Result<PhaseDistribution, WalkError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(WalkError::InvalidDelta { delta });
    }
    let n = n_steps as i64;
    // Binomial row built by the ratio recurrence to avoid factorials.
    let mut p = 0.5f64.powi(n_steps as i32);
    let mut points = Vec::with_capacity(n_steps + 1);
    for m in 0..=n_steps {
        let k = 2 * m as i64 - n;
        points.push(((phi0 + k as f64 * delta).rem_euclid(TAU), p));
        p *= (n_steps - m) as f64 / (m + 1) as f64;
    }
    PhaseDistribution::discrete(points).map_err(|e| {
        WalkError::DimensionMismatch(format!("classical distribution invalid: {e}"))
    })
}
