//! Wrapped phase distributions and the Holevo spread measure.
//!
//! The spread of an angular distribution is quantified by
//! `σ = sqrt(|μ|^(-2) - 1)` with `μ` the first circular moment
//! `⟨e^{iφ}⟩`. It is invariant under rotations of the circle, reduces to the
//! ordinary standard deviation for narrow distributions, and diverges as the
//! distribution approaches uniformity — reported here as
//! [`Sigma::Unbounded`] instead of an arbitrary large number.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{self, NumericsError, RegressionResult};
use crate::walk::{walk_step, WalkConfig, WalkError, WalkLatticeState};

/// `|μ|` below this is treated as a uniform-like distribution with unbounded
/// spread.
pub const MOMENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("probabilities sum to {sum} (must be 1 within {tol:.1e})")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("negative probability {value:.3e}")]
    NegativeProbability { value: f64 },
    #[error("distribution has no support")]
    EmptyDistribution,
    #[error("walker index {walker} out of range for {num_walkers} walker(s)")]
    WalkerOutOfRange { walker: usize, num_walkers: usize },
    #[error("series steps must be strictly increasing at N={n}")]
    NonMonotonicSteps { n: usize },
    #[error("need at least {needed} usable (finite, positive) spread points in the window, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// Probability distribution of an angle on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseDistribution {
    /// Finitely many support points `(angle, probability)`, angles wrapped
    /// to `[0, 2π)`, strictly increasing, coinciding points merged.
    DiscreteSupport(Vec<(f64, f64)>),
    /// Probability density sampled on the uniform grid `φ_i = 2πi/n`.
    GridSampled(Vec<f64>),
}

impl PhaseDistribution {
    /// Builds a discrete distribution: wraps angles, merges support points
    /// that coincide within 1e-12 rad, and checks normalisation to 1e-10.
    pub fn discrete(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, StatsError> {
        let mut wrapped: Vec<(f64, f64)> = Vec::new();
        for (phi, p) in points {
            if p < -1e-12 {
                return Err(StatsError::NegativeProbability { value: p });
            }
            wrapped.push((phi.rem_euclid(TAU), p.max(0.0)));
        }
        if wrapped.is_empty() {
            return Err(StatsError::EmptyDistribution);
        }
        wrapped.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(wrapped.len());
        for (phi, p) in wrapped {
            match merged.last_mut() {
                Some((last, q)) if (phi - *last).abs() < 1e-12 => *q += p,
                _ => merged.push((phi, p)),
            }
        }
        // A point within 1e-12 below 2π coincides with one at 0.
        if merged.len() > 1 {
            let (first, last) = (merged[0], *merged.last().unwrap());
            if first.0 < 1e-12 && TAU - last.0 < 1e-12 {
                merged[0].1 += last.1;
                merged.pop();
            }
        }
        let sum: f64 = merged.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(StatsError::NotNormalized { sum, tol: 1e-10 });
        }
        Ok(Self::DiscreteSupport(merged))
    }

    /// Builds a grid-sampled density on `φ_i = 2πi/n`; the periodic
    /// trapezoid integral must equal 1 within 1e-6.
    pub fn grid(densities: Vec<f64>) -> Result<Self, StatsError> {
        if densities.len() < 2 {
            return Err(StatsError::EmptyDistribution);
        }
        if let Some(&bad) = densities.iter().find(|&&v| v < -1e-12) {
            return Err(StatsError::NegativeProbability { value: bad });
        }
        let integral: f64 = densities.iter().sum::<f64>() * TAU / densities.len() as f64;
        if (integral - 1.0).abs() > 1e-6 {
            return Err(StatsError::NotNormalized { sum: integral, tol: 1e-6 });
        }
        Ok(Self::GridSampled(densities.into_iter().map(|v| v.max(0.0)).collect()))
    }
}

/// First circular moment `⟨e^{iφ}⟩`; grid densities are integrated with the
/// periodic trapezoid rule (equal to the rectangle rule on a closed ring).
pub fn first_circular_moment(dist: &PhaseDistribution) -> C64 {
    match dist {
        PhaseDistribution::DiscreteSupport(points) => {
            points.iter().map(|&(phi, p)| C64::from_polar(p, phi)).sum()
        }
        PhaseDistribution::GridSampled(dens) => {
            let n = dens.len() as f64;
            dens.iter()
                .enumerate()
                .map(|(i, &f)| C64::from_polar(f, TAU * i as f64 / n))
                .sum::<C64>()
                * (TAU / n)
        }
    }
}

/// Holevo spread: finite for peaked distributions, unbounded as the first
/// circular moment vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Bounded(f64),
    Unbounded,
}

impl Sigma {
    pub fn value(&self) -> Option<f64> {
        match self {
            Sigma::Bounded(v) => Some(*v),
            Sigma::Unbounded => None,
        }
    }
}

impl std::fmt::Display for Sigma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sigma::Bounded(v) => write!(f, "{v}"),
            Sigma::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// `σ = sqrt(|μ|^(-2) - 1)` with `μ` the first circular moment.
pub fn holevo_sigma(dist: &PhaseDistribution) -> Sigma {
    let mu = first_circular_moment(dist).norm();
    if mu < MOMENT_FLOOR {
        Sigma::Unbounded
    } else {
        Sigma::Bounded((mu.powi(-2) - 1.0).max(0.0).sqrt())
    }
}

/// Wrapped angular distribution of one walker: lattice offsets `k` map to
/// angles `phi0 + k·delta`, probabilities summed over the other walkers and
/// the coin register.
pub fn marginal_distribution(
    state: &WalkLatticeState,
    walker: usize,
    delta: f64,
    phi0: f64,
) -> Result<PhaseDistribution, StatsError> {
    if walker >= state.num_walkers() {
        return Err(StatsError::WalkerOutOfRange { walker, num_walkers: state.num_walkers() });
    }
    let by_offset = state.offset_marginal(walker)?;
    PhaseDistribution::discrete(
        by_offset.into_iter().map(|(k, p)| (phi0 + k as f64 * delta, p)),
    )
}

/// Holevo spread per step count, strictly increasing in `N`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SigmaSeries {
    entries: Vec<(usize, Sigma)>,
}

impl SigmaSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, n: usize, sigma: Sigma) -> Result<(), StatsError> {
        if let Some(&(last, _)) = self.entries.last() {
            if n <= last {
                return Err(StatsError::NonMonotonicSteps { n });
            }
        }
        self.entries.push((n, sigma));
        Ok(())
    }

    pub fn entries(&self) -> &[(usize, Sigma)] {
        &self.entries
    }

    pub fn get(&self, n: usize) -> Option<Sigma> {
        self.entries.iter().find(|&&(m, _)| m == n).map(|&(_, s)| s)
    }
}

/// Evolves the walk of `config` step by step and records the Holevo spread
/// of `walker` after each of steps `1..=config.steps`.
pub fn sigma_series(
    config: &WalkConfig,
    spec: &crate::walk::CoinSpec,
    walker: usize,
) -> Result<SigmaSeries, StatsError> {
    config.validate()?;
    if walker >= config.num_walkers {
        return Err(StatsError::WalkerOutOfRange { walker, num_walkers: config.num_walkers });
    }
    let mut state = WalkLatticeState::new_localized(config.num_walkers, &config.initial_coin)?;
    let mut series = SigmaSeries::new();
    for n in 1..=config.steps {
        state = walk_step(&state, spec)?;
        let dist = marginal_distribution(&state, walker, config.delta, config.phi0[walker])?;
        series.push(n, holevo_sigma(&dist))?;
    }
    Ok(series)
}

/// Spread of one walker's position on the covering line: the standard
/// deviation of the offset marginal, scaled by the step angle.
///
/// The walk evolves on orthogonal lattice offsets `k`; positions land on the
/// circle as `φ0 + k·delta` only when a distribution is requested. Any
/// circular spread measure saturates once the support covers the circle —
/// after roughly `π / delta` steps for a ballistic walk — so growth
/// exponents of delocalized walks are measured here on the line, where the
/// spread keeps its meaning at every step. The circular [`holevo_sigma`]
/// remains the localization witness and the point of comparison with cavity
/// simulations, whose phase statistics are intrinsically circular.
pub fn lattice_sigma(
    state: &WalkLatticeState,
    walker: usize,
    delta: f64,
) -> Result<f64, StatsError> {
    if walker >= state.num_walkers() {
        return Err(StatsError::WalkerOutOfRange { walker, num_walkers: state.num_walkers() });
    }
    let by_offset = state.offset_marginal(walker)?;
    let (mut m1, mut m2) = (0.0f64, 0.0f64);
    for (&k, &p) in &by_offset {
        let x = k as f64;
        m1 += p * x;
        m2 += p * x * x;
    }
    Ok(delta * (m2 - m1 * m1).max(0.0).sqrt())
}

/// Evolves the walk of `config` step by step and records the covering-line
/// spread of `walker` after each of steps `1..=config.steps`.
pub fn lattice_sigma_series(
    config: &WalkConfig,
    spec: &crate::walk::CoinSpec,
    walker: usize,
) -> Result<SigmaSeries, StatsError> {
    config.validate()?;
    if walker >= config.num_walkers {
        return Err(StatsError::WalkerOutOfRange { walker, num_walkers: config.num_walkers });
    }
    let mut state = WalkLatticeState::new_localized(config.num_walkers, &config.initial_coin)?;
    let mut series = SigmaSeries::new();
    for n in 1..=config.steps {
        state = walk_step(&state, spec)?;
        series.push(n, Sigma::Bounded(lattice_sigma(&state, walker, config.delta)?))?;
    }
    Ok(series)
}

/// Covering-line spread of the classical fair-coin walk: after `n` steps of
/// ±1 the offset variance is exactly `n`, so the spread is `delta·sqrt(n)`.
pub fn classical_lattice_sigma_series(delta: f64, n_max: usize) -> SigmaSeries {
    let mut series = SigmaSeries::new();
    for n in 1..=n_max {
        series
            .push(n, Sigma::Bounded(delta * (n as f64).sqrt()))
            .expect("steps pushed in increasing order");
    }
    series
}

/// Power-law exponent of spread growth: least-squares slope of `ln σ` versus
/// `ln N` over `n_min..=n_max`.
///
/// Entries with unbounded or zero spread cannot enter the log-log fit; they
/// are skipped with a warning and at least three usable points must remain.
pub fn scaling_exponent(
    series: &SigmaSeries,
    n_min: usize,
    n_max: usize,
) -> Result<RegressionResult, StatsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut skipped = 0usize;
    let mut considered = 0usize;
    for &(n, sigma) in series.entries() {
        if n < n_min || n > n_max {
            continue;
        }
        considered += 1;
        match sigma {
            Sigma::Bounded(v) if v > 0.0 && v.is_finite() => {
                xs.push((n as f64).ln());
                ys.push(v.ln());
            }
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!(
            "scaling fit over N={n_min}..={n_max}: skipped {skipped} of {considered} points \
             with zero or unbounded spread"
        );
    }
    if xs.len() < 3 {
        return Err(StatsError::InsufficientData { needed: 3, got: xs.len() });
    }
    Ok(numerics::linear_regression(&xs, &ys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{
        classical_walk_distribution, coin_state_circular, coin_state_up_up, CoinKind, CoinSpec,
    };
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    #[test]
    fn two_point_spread_is_tangent() {
        // {±0.8 with probability 1/2}: μ = cos 0.8, σ = tan 0.8.
        let d = PhaseDistribution::discrete([(0.8, 0.5), (-0.8, 0.5)]).unwrap();
        match holevo_sigma(&d) {
            Sigma::Bounded(s) => assert_abs_diff_eq!(s, 1.029638557050364, epsilon = 1e-12),
            Sigma::Unbounded => panic!("expected bounded spread"),
        }
    }

    #[test]
    fn point_mass_has_zero_spread() {
        let d = PhaseDistribution::discrete([(2.0, 1.0)]).unwrap();
        assert_eq!(holevo_sigma(&d), Sigma::Bounded(0.0));
    }

    #[test]
    fn uniform_distributions_are_unbounded() {
        let grid = PhaseDistribution::grid(vec![1.0 / TAU; 256]).unwrap();
        assert_eq!(holevo_sigma(&grid), Sigma::Unbounded);
        let four = PhaseDistribution::discrete(
            (0..4).map(|i| (TAU * i as f64 / 4.0, 0.25)),
        )
        .unwrap();
        assert_eq!(holevo_sigma(&four), Sigma::Unbounded);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn spread_is_rotation_invariant(
            beta in 0.0f64..TAU,
            raw in proptest::collection::vec((0.0f64..TAU, 1e-3f64..1.0), 2..12),
        ) {
            let total: f64 = raw.iter().map(|(_, p)| p).sum();
            let base: Vec<(f64, f64)> = raw.iter().map(|&(phi, p)| (phi, p / total)).collect();
            let rotated: Vec<(f64, f64)> = base.iter().map(|&(phi, p)| (phi + beta, p)).collect();
            let s0 = holevo_sigma(&PhaseDistribution::discrete(base).unwrap());
            let s1 = holevo_sigma(&PhaseDistribution::discrete(rotated).unwrap());
            match (s0, s1) {
                (Sigma::Bounded(a), Sigma::Bounded(b)) => prop_assert!((a - b).abs() < 1e-9 * (1.0 + a)),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn narrow_spread_matches_standard_deviation() {
        for &delta in &[0.01, 0.02, 0.05, 0.1] {
            let d = PhaseDistribution::discrete([(delta, 0.5), (-delta, 0.5)]).unwrap();
            let s = holevo_sigma(&d).value().unwrap();
            assert!(
                (s - delta).abs() / delta < delta * delta / 2.0,
                "delta={delta}: relative deviation too large"
            );
        }
    }

    #[test]
    fn coinciding_support_points_are_merged() {
        let split = PhaseDistribution::discrete([(1.0, 0.25), (1.0, 0.25), (2.5, 0.5)]).unwrap();
        let merged = PhaseDistribution::discrete([(1.0, 0.5), (2.5, 0.5)]).unwrap();
        if let PhaseDistribution::DiscreteSupport(points) = &split {
            assert_eq!(points.len(), 2);
        }
        let a = holevo_sigma(&split).value().unwrap();
        let b = holevo_sigma(&merged).value().unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        // Wrap-around duplicates merge too: 0 and 2π are the same point.
        let wrap = PhaseDistribution::discrete([(0.0, 0.5), (TAU, 0.5)]).unwrap();
        if let PhaseDistribution::DiscreteSupport(points) = &wrap {
            assert_eq!(points.len(), 1);
            assert_abs_diff_eq!(points[0].1, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn distribution_validation_errors() {
        assert!(matches!(
            PhaseDistribution::discrete([(0.0, 0.4), (1.0, 0.4)]),
            Err(StatsError::NotNormalized { .. })
        ));
        assert!(matches!(
            PhaseDistribution::discrete([(0.0, 1.2), (1.0, -0.2)]),
            Err(StatsError::NegativeProbability { .. })
        ));
        assert!(matches!(
            PhaseDistribution::grid(vec![0.5 / TAU; 16]),
            Err(StatsError::NotNormalized { .. })
        ));
    }

    #[test]
    fn grid_and_discrete_moments_agree_for_shared_distribution() {
        // A smooth density and its exact moment: f(φ) = (1 + cos φ)/2π has
        // first circular moment 1/2.
        let n = 512;
        let dens: Vec<f64> = (0..n).map(|i| (1.0 + (TAU * i as f64 / n as f64).cos()) / TAU).collect();
        let grid = PhaseDistribution::grid(dens).unwrap();
        let mu = first_circular_moment(&grid);
        assert_abs_diff_eq!(mu.re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_walker_marginal_after_one_step() {
        let cfg = WalkConfig {
            delta: 0.8,
            phi0: vec![0.3],
            ..WalkConfig::new(1, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 1)
        };
        let spec = CoinSpec::new(CoinKind::SingleHadamard);
        let state = crate::walk::walk_evolve(&cfg, &spec).unwrap();
        let dist = marginal_distribution(&state, 0, cfg.delta, cfg.phi0[0]).unwrap();
        if let PhaseDistribution::DiscreteSupport(points) = &dist {
            assert_eq!(points.len(), 2);
            let lo = (0.3f64 - 0.8).rem_euclid(TAU);
            let hi = 0.3 + 0.8;
            for (phi, p) in points {
                assert!((phi - lo).abs() < 1e-12 || (phi - hi).abs() < 1e-12);
                assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-14);
            }
        } else {
            panic!("expected discrete support");
        }
    }

    #[test]
    fn circular_coin_walk_is_left_right_symmetric() {
        let cfg = WalkConfig::new(2, coin_state_circular(), 6);
        let spec = CoinSpec::new(CoinKind::HadamardTensor);
        let state = crate::walk::walk_evolve(&cfg, &spec).unwrap();
        let marg = state.offset_marginal(0).unwrap();
        for (&k, &p) in &marg {
            let mirrored = marg.get(&-k).copied().unwrap_or(0.0);
            assert!((p - mirrored).abs() < 1e-10, "asymmetry at k={k}");
        }
    }

    #[test]
    fn sigma_series_walker_bounds_and_monotone_steps() {
        let cfg = WalkConfig::new(2, coin_state_circular(), 3);
        let spec = CoinSpec::new(CoinKind::Dft);
        assert!(matches!(
            sigma_series(&cfg, &spec, 2),
            Err(StatsError::WalkerOutOfRange { .. })
        ));
        let mut series = SigmaSeries::new();
        series.push(1, Sigma::Bounded(0.5)).unwrap();
        assert!(matches!(
            series.push(1, Sigma::Bounded(0.6)),
            Err(StatsError::NonMonotonicSteps { n: 1 })
        ));
    }

    #[test]
    fn exact_power_law_recovers_exponent() {
        let mut series = SigmaSeries::new();
        for n in 2..=20 {
            series.push(n, Sigma::Bounded(3.0 * (n as f64).powf(0.7))).unwrap();
        }
        let fit = scaling_exponent(&series, 2, 20).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.7, epsilon = 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn unbounded_points_are_excluded_from_fits() {
        let mut series = SigmaSeries::new();
        series.push(2, Sigma::Unbounded).unwrap();
        for n in 3..=6 {
            series.push(n, Sigma::Bounded(2.0 * n as f64)).unwrap();
        }
        let fit = scaling_exponent(&series, 2, 6).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);

        let mut sparse = SigmaSeries::new();
        sparse.push(2, Sigma::Unbounded).unwrap();
        sparse.push(3, Sigma::Bounded(0.0)).unwrap();
        sparse.push(4, Sigma::Bounded(1.0)).unwrap();
        sparse.push(5, Sigma::Bounded(2.0)).unwrap();
        assert!(matches!(
            scaling_exponent(&sparse, 2, 5),
            Err(StatsError::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn localised_walk_yields_no_scaling_fit() {
        // |+1,+1> under the partial iSWAP drifts without spreading: every σ
        // is exactly zero and the log-log fit has nothing to use.
        let cfg = WalkConfig::new(2, coin_state_up_up(), 10);
        let spec = CoinSpec::new(CoinKind::RootISwap);
        let series = sigma_series(&cfg, &spec, 0).unwrap();
        for &(_, s) in series.entries() {
            assert_eq!(s, Sigma::Bounded(0.0));
        }
        assert!(matches!(
            scaling_exponent(&series, 1, 10),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn single_hadamard_walk_spreads_ballistically() {
        // Step angle small enough that the ballistic front stays far from
        // the antipode over the whole window; near ±π/2 the spread measure
        // diverges and the log-log fit would steepen artificially.
        let cfg = WalkConfig {
            delta: 0.02,
            ..WalkConfig::new(1, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 25)
        };
        let series = sigma_series(&cfg, &CoinSpec::new(CoinKind::SingleHadamard), 0).unwrap();
        let fit = scaling_exponent(&series, 4, 25).unwrap();
        assert!(
            (0.9..=1.1).contains(&fit.slope),
            "ballistic exponent expected, got {}",
            fit.slope
        );
    }

    #[test]
    fn classical_walk_spreads_diffusively() {
        // Reference fit (computed independently from the binomial moments):
        // slope 0.5303 ± 0.0017 for δ = 0.1 over N = 4..=25.
        let mut series = SigmaSeries::new();
        for n in 1..=25 {
            let d = classical_walk_distribution(0.1, n, 0.0).unwrap();
            series.push(n, holevo_sigma(&d)).unwrap();
        }
        let fit = scaling_exponent(&series, 4, 25).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.5303, epsilon = 0.01);
    }

    #[test]
    fn classical_line_spread_is_exactly_diffusive() {
        // Binomial oracle: offset variance after n fair ±1 steps is n, so
        // the line spread is δ√n and the fitted exponent is exactly 1/2.
        let series = classical_lattice_sigma_series(0.8, 25);
        for &(n, s) in series.entries() {
            assert_abs_diff_eq!(s.value().unwrap(), 0.8 * (n as f64).sqrt(), epsilon = 1e-12);
        }
        let fit = scaling_exponent(&series, 4, 25).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.5, epsilon = 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn line_spread_after_one_step_is_the_step_angle() {
        // Any basis initial coin under the Hadamard coin gives offsets ±1
        // with probability 1/2 each: standard deviation 1, spread δ.
        let cfg = WalkConfig {
            delta: 0.37,
            ..WalkConfig::new(1, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 1)
        };
        let series = lattice_sigma_series(&cfg, &CoinSpec::new(CoinKind::SingleHadamard), 0)
            .unwrap();
        assert_abs_diff_eq!(series.get(1).unwrap().value().unwrap(), 0.37, epsilon = 1e-12);
    }

    #[test]
    fn line_spread_matches_circular_spread_for_narrow_walks() {
        // While the support stays well inside one winding, the circular
        // spread reduces to the ordinary standard deviation; the two
        // pipelines must agree there.
        let cfg = WalkConfig {
            delta: 0.02,
            ..WalkConfig::new(1, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 10)
        };
        let spec = CoinSpec::new(CoinKind::SingleHadamard);
        let wrapped = sigma_series(&cfg, &spec, 0).unwrap();
        let line = lattice_sigma_series(&cfg, &spec, 0).unwrap();
        for &(n, s) in line.entries() {
            let w = wrapped.get(n).unwrap().value().unwrap();
            let l = s.value().unwrap();
            assert!(
                (w - l).abs() / l < 5e-3,
                "N={n}: circular {w} vs line {l} diverge in the narrow regime"
            );
        }
    }

    #[test]
    fn line_spread_is_linear_in_the_step_angle() {
        let spec = CoinSpec::new(CoinKind::Dft);
        let run = |delta: f64| {
            let cfg = WalkConfig { delta, ..WalkConfig::new(2, coin_state_circular(), 7) };
            lattice_sigma_series(&cfg, &spec, 0).unwrap()
        };
        let narrow = run(0.3);
        let wide = run(0.6);
        for &(n, s) in narrow.entries() {
            let a = s.value().unwrap();
            let b = wide.get(n).unwrap().value().unwrap();
            assert_abs_diff_eq!(2.0 * a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_hadamard_line_spread_scales_ballistically() {
        // Direct lattice variance: the fitted exponent sits within 1 ± 0.1
        // for any step angle, since the line spread never wraps.
        let cfg = WalkConfig {
            delta: 0.1,
            ..WalkConfig::new(1, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 25)
        };
        let series =
            lattice_sigma_series(&cfg, &CoinSpec::new(CoinKind::SingleHadamard), 0).unwrap();
        let fit = scaling_exponent(&series, 4, 25).unwrap();
        assert!(
            (0.9..=1.1).contains(&fit.slope),
            "ballistic exponent expected, got {}",
            fit.slope
        );
    }

    #[test]
    fn localized_walk_has_zero_line_spread() {
        // Flip-flop coin from |1,1⟩: both walkers shift deterministically,
        // so the offset marginal is a point mass at every step.
        let cfg = WalkConfig::new(2, coin_state_up_up(), 12);
        let spec = CoinSpec::new(CoinKind::RootISwap);
        let series = lattice_sigma_series(&cfg, &spec, 0).unwrap();
        for &(_, s) in series.entries() {
            assert_eq!(s.value().unwrap(), 0.0);
        }
        assert!(matches!(
            scaling_exponent(&series, 1, 12),
            Err(StatsError::InsufficientData { .. })
        ));
    }
}
