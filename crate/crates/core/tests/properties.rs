//! Property tests for the structural invariants of the walk engine and the
//! spread statistics: unitarity, norm and support bookkeeping, rotation
//! invariance, and the small-angle agreement of the two spread measures.

use num_complex::Complex64 as C64;
use phasewalk_core::stats::{
    self, first_circular_moment, holevo_sigma, marginal_distribution, PhaseDistribution, Sigma,
};
use phasewalk_core::walk::{
    self, coin_matrix, walk_step, CoinKind, CoinSpec, WalkConfig, WalkLatticeState,
};
use proptest::prelude::*;

/// Two-walker coins (every kind except the single-walker Hadamard), with a
/// random partial-swap angle where one applies.
fn two_walker_coins() -> impl Strategy<Value = CoinSpec> {
    prop_oneof![
        Just(CoinSpec::new(CoinKind::HadamardTensor)),
        Just(CoinSpec::new(CoinKind::Dft)),
        Just(CoinSpec::new(CoinKind::Grover)),
        (0.05f64..1.5).prop_map(|t| CoinSpec::with_theta(CoinKind::RootISwap, t)),
    ]
}

/// Random normalized coin register of the given dimension.
fn coin_amps(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
        "norm too small to normalise",
        |v| {
            let norm_sq: f64 = v.iter().map(|(re, im)| re * re + im * im).sum();
            if norm_sq < 1e-2 {
                return None;
            }
            let n = norm_sq.sqrt();
            Some(v.into_iter().map(|(re, im)| C64::new(re / n, im / n)).collect())
        },
    )
}

/// Random normalized discrete angular distribution.
fn discrete_distribution() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((0.0f64..std::f64::consts::TAU, 0.05f64..1.0), 3..8).prop_map(
        |points| {
            let total: f64 = points.iter().map(|&(_, p)| p).sum();
            points.into_iter().map(|(phi, p)| (phi, p / total)).collect()
        },
    )
}

fn evolve(spec: &CoinSpec, init: &[C64], steps: usize) -> WalkLatticeState {
    let mut state = WalkLatticeState::new_localized(2, init).unwrap();
    for _ in 0..steps {
        state = walk_step(&state, spec).unwrap();
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coins_are_unitary(spec in two_walker_coins()) {
        let m = coin_matrix(&spec, 2).unwrap();
        prop_assert!(m.unitarity_residual() < 1e-12);
    }

    #[test]
    fn partial_swap_coin_is_unitary_across_its_angle_domain(
        theta in 1e-6f64..std::f64::consts::FRAC_PI_2,
    ) {
        let spec = CoinSpec::with_theta(CoinKind::RootISwap, theta);
        let m = coin_matrix(&spec, 2).unwrap();
        prop_assert!(m.unitarity_residual() < 1e-12);
    }

    #[test]
    fn partial_swap_coin_rejects_angles_outside_its_domain(
        theta in prop_oneof![-10.0f64..=0.0, 1.5707964f64..10.0],
    ) {
        let spec = CoinSpec::with_theta(CoinKind::RootISwap, theta);
        prop_assert!(coin_matrix(&spec, 2).is_err());
    }

    #[test]
    fn evolution_preserves_the_norm(
        spec in two_walker_coins(),
        init in coin_amps(4),
        steps in 1usize..6,
    ) {
        let state = evolve(&spec, &init, steps);
        prop_assert!((state.norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn support_stays_inside_the_light_cone_with_step_parity(
        spec in two_walker_coins(),
        init in coin_amps(4),
        steps in 1usize..6,
    ) {
        let state = evolve(&spec, &init, steps);
        let n = steps as i16;
        for ((offsets, _), _) in state.iter() {
            for &k in offsets {
                prop_assert!(k.abs() <= n, "offset {k} outside the cone after {steps} steps");
                prop_assert_eq!((k - n).rem_euclid(2), 0, "offset {} breaks parity", k);
            }
        }
    }

    #[test]
    fn offset_marginals_are_normalized(
        spec in two_walker_coins(),
        init in coin_amps(4),
        steps in 1usize..6,
    ) {
        let state = evolve(&spec, &init, steps);
        for walker in 0..2 {
            let total: f64 = state.offset_marginal(walker).unwrap().values().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rotating_a_distribution_preserves_moment_and_spread(
        points in discrete_distribution(),
        shift in -10.0f64..10.0,
    ) {
        let base = PhaseDistribution::discrete(points.clone()).unwrap();
        let rotated = PhaseDistribution::discrete(
            points.iter().map(|&(phi, p)| (phi + shift, p)),
        ).unwrap();
        let mu = first_circular_moment(&base).norm();
        let mu_rot = first_circular_moment(&rotated).norm();
        prop_assert!((mu - mu_rot).abs() < 1e-12);
        if mu > 1e-3 {
            match (holevo_sigma(&base), holevo_sigma(&rotated)) {
                (Sigma::Bounded(a), Sigma::Bounded(b)) => {
                    prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
                }
                other => prop_assert!(false, "unexpected spread pair {other:?}"),
            }
        }
    }

    #[test]
    fn merging_coincident_points_leaves_the_spread_unchanged(
        points in discrete_distribution(),
        ratio in 0.1f64..0.9,
    ) {
        // Split the first point's mass in two at the same angle.
        let (phi0, p0) = points[0];
        let mut split = vec![(phi0, p0 * ratio), (phi0, p0 * (1.0 - ratio))];
        split.extend_from_slice(&points[1..]);
        let a = first_circular_moment(&PhaseDistribution::discrete(points).unwrap());
        let b = first_circular_moment(&PhaseDistribution::discrete(split).unwrap());
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn narrow_symmetric_pair_has_spread_close_to_its_half_width(delta in 0.005f64..0.1) {
        let dist = PhaseDistribution::discrete([(-delta, 0.5), (delta, 0.5)]).unwrap();
        match holevo_sigma(&dist) {
            Sigma::Bounded(sigma) => {
                prop_assert!(((sigma - delta) / delta).abs() < delta * delta / 2.0);
            }
            Sigma::Unbounded => prop_assert!(false, "narrow pair must have bounded spread"),
        }
    }

    #[test]
    fn circular_spread_ignores_the_walk_starting_angle(
        spec in two_walker_coins(),
        delta in 0.3f64..1.2,
        shift in -3.0f64..3.0,
        steps in 2usize..5,
    ) {
        let mut base = WalkConfig::new(2, walk::coin_state_circular(), steps);
        base.delta = delta;
        let mut shifted = base.clone();
        shifted.phi0 = vec![shift; 2];

        let state = evolve(&spec, &walk::coin_state_circular(), steps);
        let mu = first_circular_moment(
            &marginal_distribution(&state, 0, delta, 0.0).unwrap(),
        ).norm();
        prop_assume!(mu > 1e-10);

        let a = stats::sigma_series(&base, &spec, 0).unwrap();
        let b = stats::sigma_series(&shifted, &spec, 0).unwrap();
        match (a.get(steps).unwrap(), b.get(steps).unwrap()) {
            (Sigma::Bounded(x), Sigma::Bounded(y)) => {
                prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
            }
            (Sigma::Unbounded, Sigma::Unbounded) => {}
            other => prop_assert!(false, "starting angle changed boundedness: {other:?}"),
        }
    }

    #[test]
    fn line_spread_is_linear_in_the_step_angle(
        spec in two_walker_coins(),
        init in coin_amps(4),
        delta in 0.1f64..1.5,
        steps in 1usize..5,
    ) {
        let state = evolve(&spec, &init, steps);
        let s1 = stats::lattice_sigma(&state, 0, delta).unwrap();
        let s2 = stats::lattice_sigma(&state, 0, 2.0 * delta).unwrap();
        prop_assert!((s2 - 2.0 * s1).abs() <= 1e-12 * (1.0 + s2));
    }

    #[test]
    fn both_spread_measures_agree_for_narrow_walks(
        spec in two_walker_coins(),
        init in coin_amps(4),
        steps in 1usize..5,
    ) {
        // At a tiny step angle the support never leaves a small arc, where
        // the circular and covering-line spreads must coincide.
        let delta = 0.01;
        let state = evolve(&spec, &init, steps);
        let line = stats::lattice_sigma(&state, 0, delta).unwrap();
        let dist = marginal_distribution(&state, 0, delta, 0.0).unwrap();
        match holevo_sigma(&dist) {
            Sigma::Bounded(circ) => {
                prop_assert!((circ - line).abs() <= 1e-3 * (1.0 + line));
            }
            Sigma::Unbounded => prop_assert!(false, "narrow walk must have bounded spread"),
        }
    }

    #[test]
    fn product_coin_walks_factor_into_independent_single_walks(
        a in coin_amps(2),
        b in coin_amps(2),
        steps in 1usize..6,
    ) {
        // A product coin acting on a product state keeps the walkers
        // independent: walker 1's marginal equals a single-walker Hadamard
        // walk started from its own factor.
        let product: Vec<C64> = (0..4).map(|i| a[i >> 1] * b[i & 1]).collect();
        let pair = evolve(&CoinSpec::new(CoinKind::HadamardTensor), &product, steps);

        let mut single = WalkLatticeState::new_localized(1, &a).unwrap();
        let spec = CoinSpec::new(CoinKind::SingleHadamard);
        for _ in 0..steps {
            single = walk_step(&single, &spec).unwrap();
        }

        let pair_marginal = pair.offset_marginal(0).unwrap();
        let single_marginal = single.offset_marginal(0).unwrap();
        for k in -(steps as i16)..=(steps as i16) {
            let p = pair_marginal.get(&k).copied().unwrap_or(0.0);
            let q = single_marginal.get(&k).copied().unwrap_or(0.0);
            prop_assert!((p - q).abs() < 1e-10, "marginals differ at offset {k}: {p} vs {q}");
        }
    }

    #[test]
    fn log_log_fit_recovers_exact_power_laws(
        amplitude in 0.1f64..5.0,
        exponent in 0.2f64..1.5,
    ) {
        let mut series = stats::SigmaSeries::new();
        for n in 1..=12 {
            series.push(n, Sigma::Bounded(amplitude * (n as f64).powf(exponent))).unwrap();
        }
        let fit = stats::scaling_exponent(&series, 1, 12).unwrap();
        prop_assert!((fit.slope - exponent).abs() < 1e-9);
        prop_assert!((fit.intercept - amplitude.ln()).abs() < 1e-9);
        prop_assert!(fit.slope_stderr < 1e-9);
    }
}

#[test]
fn symmetric_initial_coin_spreads_symmetrically() {
    // The circular initial coin under the product Hadamard coin gives a
    // left-right symmetric position distribution at every step.
    let spec = CoinSpec::new(CoinKind::HadamardTensor);
    let mut state = WalkLatticeState::new_localized(2, &walk::coin_state_circular()).unwrap();
    for _ in 0..5 {
        state = walk_step(&state, &spec).unwrap();
        let marginal = state.offset_marginal(0).unwrap();
        for (&k, &p) in &marginal {
            let mirror = marginal.get(&(-k)).copied().unwrap_or(0.0);
            assert!((p - mirror).abs() < 1e-12, "asymmetry at offset {k}: {p} vs {mirror}");
        }
    }
}

#[test]
fn featureless_angular_distribution_has_unbounded_spread() {
    let dist = PhaseDistribution::grid(vec![1.0 / std::f64::consts::TAU; 256]).unwrap();
    assert_eq!(holevo_sigma(&dist), Sigma::Unbounded);
}
