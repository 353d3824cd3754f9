//! Dispersive cavity-QED parameter maps and numerical checks that pulse
//! sequences synthesise the walk's coin and shift operations.
//!
//! All frequencies share one angular unit (2π x MHz with the default
//! parameter set). Checks build the claimed pulse unitaries with
//! [`matexp_hermitian`] and compare against the ideal operations through the
//! global-phase-invariant infidelity `1 - |Tr(T†U)|/dim`, recording any
//! diagonal phase conventions that had to be fixed along the way.
//!
//! Sign conventions: gates are quoted so that the conditional shift moves
//! the `+1` coin component forward (`|φ> -> |φ + Δθ>`); the open-system
//! module evolves under `H = +χ n̂ σz`, whose propagator is the same gate
//! with `Δθ -> -Δθ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{kron, matexp_hermitian, ComplexMatrix, NumericsError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("qubit-cavity detuning is zero; the dispersive map is undefined")]
    ZeroDetuning,
    #[error("drive-cavity detuning is zero; the Rabi frequency is undefined")]
    ZeroDriveDetuning,
    #[error("outside the dispersive regime: |detuning| = {ratio:.2} g must be at least 10 g")]
    OutsideDispersiveRegime { ratio: f64 },
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveFrequency { name: &'static str, value: f64 },
    #[error("mixing angle theta={theta} outside the valid range (0, pi/2]")]
    InvalidTheta { theta: f64 },
    #[error("need dimension >= 2, got {dim}")]
    InvalidDimension { dim: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Hardware frequencies of one cavity-qubit pair (all in the same angular
/// unit; the defaults are in 2π x MHz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Qubit transition frequency.
    pub omega_a: f64,
    /// Cavity frequency.
    pub omega_c: f64,
    /// Qubit-cavity coupling strength.
    pub g: f64,
    /// Drive amplitude.
    pub epsilon: f64,
    /// Drive frequency.
    pub omega_d: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self { omega_a: 7000.0, omega_c: 5000.0, g: 100.0, epsilon: 1000.0, omega_d: 7000.0 }
    }
}

impl DeviceParams {
    /// Qubit-cavity detuning `Δ = ω_a - ω_c`.
    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega_c
    }

    /// Checks positivity of every frequency and the dispersive-regime
    /// condition `|Δ| >= 10 g`.
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, value) in [
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("g", self.g),
            ("epsilon", self.epsilon),
            ("omega_d", self.omega_d),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SynthError::NonPositiveFrequency { name, value });
            }
        }
        let ratio = self.detuning().abs() / self.g;
        if ratio < 10.0 {
            return Err(SynthError::OutsideDispersiveRegime { ratio });
        }
        Ok(())
    }
}

/// Dispersive cavity pull `χ = g²/Δ`; with the default parameters this is 5.
pub fn cavity_pull(p: &DeviceParams) -> Result<f64, SynthError> {
    let delta = p.detuning();
    if delta == 0.0 {
        return Err(SynthError::ZeroDetuning);
    }
    Ok(p.g * p.g / delta)
}

/// Raman Rabi frequency `Ω_R = 2 g ε / (ω_d - ω_c)`; 100 with the defaults.
pub fn rabi_frequency(p: &DeviceParams) -> Result<f64, SynthError> {
    let delta_dc = p.omega_d - p.omega_c;
    if delta_dc == 0.0 {
        return Err(SynthError::ZeroDriveDetuning);
    }
    Ok(2.0 * p.g * p.epsilon / delta_dc)
}

/// Drive frequency that cancels the photon-number-dependent qubit shift at
/// mean photon number `n_bar`: `ω_d = 2 n̄ g²/Δ - 2 g ε/Δ + ω_a`.
pub fn drive_frequency(p: &DeviceParams, n_bar: f64) -> Result<f64, SynthError> {
    let delta = p.detuning();
    if delta == 0.0 {
        return Err(SynthError::ZeroDetuning);
    }
    Ok(2.0 * n_bar * p.g * p.g / delta - 2.0 * p.g * p.epsilon / delta + p.omega_a)
}

/// Result of one synthesis check.
#[derive(Debug, Clone)]
pub struct GateReport {
    /// Name of the ideal operation being synthesised.
    pub target: String,
    /// Unitary produced by the pulse sequence (before phase corrections).
    pub achieved: ComplexMatrix,
    /// Global-phase-invariant infidelity `1 - |Tr(T†U)|/dim`, after the
    /// diagonal phase conventions recorded below are applied.
    pub infidelity: f64,
    /// Diagonal phases fixed or left over by the scheme (see `notes`).
    pub residual_phases: Vec<C64>,
    /// Human-readable record of conventions, derived quantities, and claims.
    pub notes: Vec<String>,
    /// Present when the check scanned an interaction angle.
    pub scan: Option<AngleScan>,
}

/// Outcome of scanning the entangling interaction angle of a pulse scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleScan {
    /// Angle minimising the infidelity.
    pub theta_star: f64,
    pub infidelity_at_star: f64,
    /// Angle quoted by the analytic pulse recipe.
    pub claimed_angle: f64,
    pub infidelity_at_claimed: f64,
}

impl std::fmt::Display for GateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "infidelity: {:.6e}", self.infidelity)?;
        if !self.residual_phases.is_empty() {
            let phases: Vec<String> = self
                .residual_phases
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "residual phases: [{}]", phases.join(", "))?;
        }
        if let Some(scan) = &self.scan {
            writeln!(
                f,
                "angle scan: best theta = {:.12} (infidelity {:.3e}); claimed angle = {:.12} \
                 (infidelity {:.3e})",
                scan.theta_star,
                scan.infidelity_at_star,
                scan.claimed_angle,
                scan.infidelity_at_claimed
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// Global-phase-invariant infidelity `1 - |Tr(target† achieved)| / dim`.
pub fn infidelity(target: &ComplexMatrix, achieved: &ComplexMatrix) -> f64 {
    let dim = target.rows() as f64;
    1.0 - target.dagger().mul(achieved).trace().norm() / dim
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

/// Resonant x-drive propagator `exp(+i Ω t σx / 2)` in the rotating frame
/// (sign chosen so a quarter Rabi period gives `(I + iσx)/√2`).
pub fn rabi_pulse(omega_r: f64, t: f64) -> Result<ComplexMatrix, SynthError> {
    Ok(matexp_hermitian(&sigma_x().scale(c(-0.5 * omega_r, 0.0)), t)?)
}

/// Conditional phase-space shift on cavity ⊗ qubit (dimension `2d`):
/// `exp(+i Δθ n̂ σz)`, i.e. `|φ,d> ⊗ |+1>  ->  |φ+Δθ,d> ⊗ |+1>` exactly and
/// the opposite shift for the `|-1>` qubit state.
pub fn conditional_shift_unitary(delta_theta: f64, d: usize) -> Result<ComplexMatrix, SynthError> {
    if d < 2 {
        return Err(SynthError::InvalidDimension { dim: d });
    }
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        for (s, z) in [(0usize, -1.0), (1, 1.0)] {
            let idx = 2 * n + s;
            u.set(idx, idx, C64::from_polar(1.0, delta_theta * n as f64 * z));
        }
    }
    Ok(u)
}

/// Checks that a quarter-period resonant drive realises the Hadamard coin up
/// to single-qubit diagonal phases.
///
/// The raw pulse is `(I + iσx)/√2`; conjugating with `diag(1, -i)` on both
/// sides turns it into the Hadamard exactly. Both the corrections and the
/// derived pulse parameters are recorded in the report.
pub fn hadamard_pulse_check(p: &DeviceParams) -> Result<GateReport, SynthError> {
    p.validate()?;
    let omega_r = rabi_frequency(p)?;
    let t_h = PI / (2.0 * omega_r);
    let pulse = rabi_pulse(omega_r, t_h)?;

    let hadamard = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(-1.0, 0.0)],
    ])
    .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));

    // Solve diag(1, a) U diag(1, b) ∝ H entrywise for unit phases a, b.
    let r00 = hadamard.get(0, 0) / pulse.get(0, 0);
    let b = (hadamard.get(0, 1) / pulse.get(0, 1)) / r00;
    let a = (hadamard.get(1, 0) / pulse.get(1, 0)) / r00;
    let left = vec![c(1.0, 0.0), a / a.norm()];
    let right = vec![c(1.0, 0.0), b / b.norm()];
    let corrected = ComplexMatrix::from_fn(2, 2, |r, q| left[r] * pulse.get(r, q) * right[q]);
    let infid = infidelity(&hadamard, &corrected);

    Ok(GateReport {
        target: "hadamard coin (per qubit)".into(),
        achieved: pulse,
        infidelity: infid,
        residual_phases: left,
        notes: vec![
            format!("rabi frequency {omega_r}, quarter-period pulse time {t_h:.6e}"),
            "diagonal phase correction diag(1, -i) applied on both sides of the pulse".into(),
        ],
        scan: None,
    })
}

/// Checks the qubit-qubit flip-flop interaction against the partial-iSWAP
/// coin block.
///
/// Evolving `χ(σ+σ- + σ-σ+)` for angle `theta` produces the block
/// `[[cos θ, -i sin θ], [-i sin θ, cos θ]]` on the odd-parity subspace; the
/// `+i` sign variant of the coin matrix differs only by a σz conjugation on
/// one qubit, which is recorded in the notes. The photon-number-dependent
/// diagonal phases `exp[-i θ (n + 1/2)(z1 + z2)]` left over by the dispersive
/// frame are evaluated at `photon_n` and reported.
pub fn iswap_synthesis_check(theta: f64, photon_n: usize) -> Result<GateReport, SynthError> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) || !theta.is_finite() {
        return Err(SynthError::InvalidTheta { theta });
    }
    // Flip-flop coupling on (|-1,-1>, |-1,+1>, |+1,-1>, |+1,+1>).
    let mut h = ComplexMatrix::zeros(4, 4);
    h.set(1, 2, c(1.0, 0.0));
    h.set(2, 1, c(1.0, 0.0));
    let u = matexp_hermitian(&h, theta)?;

    let (cs, sn) = (theta.cos(), theta.sin());
    let target = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(cs, 0.0), c(0.0, -sn), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, -sn), c(cs, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    ]);
    let infid = infidelity(&target, &u);

    let residual_phases = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
        .iter()
        .map(|&(z1, z2)| C64::from_polar(1.0, -theta * (photon_n as f64 + 0.5) * (z1 + z2)))
        .collect();

    Ok(GateReport {
        target: format!("partial-iswap block, theta = {theta}"),
        achieved: u,
        infidelity: infid,
        residual_phases,
        notes: vec![
            "coin-matrix variant with +i sin θ equals this block after a σz conjugation on \
             either qubit"
                .into(),
            format!(
                "dispersive diagonal phases exp[-iθ(n+1/2)(z1+z2)] reported at n = {photon_n}"
            ),
        ],
        scan: None,
    })
}

/// Checks that per-qubit conditional cavity phases compose into the
/// four-point transform phase pattern.
///
/// Qubit `j` imprints `exp(-i t_j n̂)` on the cavity when excited, with
/// `t_1 = π/2` and `t_2 = π` (binary weights 1 and 2, so the qubit register
/// encodes `k = b1 + 2 b2`). The sequential product must equal the
/// simultaneous evolution of `(π/2) n̂ Υ`, and the one-photon sector must
/// carry the phases `(1, -i, -1, i)` over `k = 0..3`.
pub fn dft_synthesis_check(d: usize) -> Result<GateReport, SynthError> {
    if d < 2 {
        return Err(SynthError::InvalidDimension { dim: d });
    }
    let dim = d * 4;
    // Index layout: cavity n slow, then qubit 1, then qubit 2.
    let idx = |n: usize, b1: usize, b2: usize| (n * 2 + b1) * 2 + b2;

    let mut h1 = ComplexMatrix::zeros(dim, dim); // n̂ ⊗ P1(qubit 1), weight 1
    let mut h2 = ComplexMatrix::zeros(dim, dim); // n̂ ⊗ P1(qubit 2), weight 2
    let mut hk = ComplexMatrix::zeros(dim, dim); // n̂ ⊗ Υ with Υ = b1 + 2 b2
    for n in 0..d {
        for b1 in 0..2 {
            for b2 in 0..2 {
                let i = idx(n, b1, b2);
                h1.set(i, i, c((n * b1) as f64, 0.0));
                h2.set(i, i, c((n * b2) as f64, 0.0));
                hk.set(i, i, c((n * (b1 + 2 * b2)) as f64, 0.0));
            }
        }
    }
    let u1 = matexp_hermitian(&h1, FRAC_PI_2)?;
    let u2 = matexp_hermitian(&h2, PI)?;
    let sequential = u2.mul(&u1);
    let simultaneous = matexp_hermitian(&hk, FRAC_PI_2)?;
    let infid = infidelity(&simultaneous, &sequential);
    let max_diff = sequential.max_abs_diff(&simultaneous);

    // One-photon sector phases over k = b1 + 2 b2.
    let mut phases = vec![c(0.0, 0.0); 4];
    for b1 in 0..2 {
        for b2 in 0..2 {
            let i = idx(1, b1, b2);
            phases[b1 + 2 * b2] = sequential.get(i, i);
        }
    }

    Ok(GateReport {
        target: format!("four-point transform phase pattern on {d} cavity levels"),
        achieved: sequential,
        infidelity: infid,
        residual_phases: phases,
        notes: vec![
            format!("sequential vs simultaneous max entry difference {max_diff:.3e}"),
            "phases are diagonal in the qubit basis; combined with per-qubit rotations they \
             generate the entangling four-point coin"
                .into(),
            "zero-photon sector is the identity".into(),
        ],
        scan: None,
    })
}

/// Checks the Grover-coin pulse recipe: a simultaneous two-qubit drive at
/// `Ω_R = (16m + 4)χ` plus the `χ σx⊗σx` effective coupling, evolved for
/// `chi_t` (the recipe claims angle π/8).
///
/// Because the drive rotation at the claimed angle is `exp(-i(mπ + π/4)Σσx)`
/// for every integer `m`, the check also scans the `σx⊗σx` angle with the
/// drive rotation held at that value and reports the minimising angle (π/4),
/// where the product matches the Grover coin exactly up to a global phase.
pub fn grover_synthesis_check(m: u32, chi_t: f64) -> Result<GateReport, SynthError> {
    if !(chi_t > 0.0) || !chi_t.is_finite() {
        return Err(SynthError::InvalidTheta { theta: chi_t });
    }
    let sx = sigma_x();
    let id = ComplexMatrix::identity(2);
    let drive_gen = kron(&sx, &id).add(&kron(&id, &sx)); // Σ σx
    let coupling = kron(&sx, &sx);
    let grover = ComplexMatrix::from_fn(4, 4, |r, q| {
        if r == q {
            c(-0.5, 0.0)
        } else {
            c(0.5, 0.0)
        }
    });

    // Everything is built from σx factors, so drive and coupling commute and
    // the simultaneous evolution factorises exactly.
    let omega_r = (16.0 * m as f64 + 4.0) / 2.0; // Ω_R / (2χ)
    let claimed =
        matexp_hermitian(&drive_gen.scale(c(omega_r, 0.0)).add(&coupling), chi_t)?;
    let infid_claimed = infidelity(&grover, &claimed);

    // Hold the per-qubit drive rotation at its claimed-angle value mπ + π/4
    // (equal to π/4 modulo a full two-qubit period) and scan the coupling
    // angle.
    let drive_quarter = matexp_hermitian(&drive_gen, FRAC_PI_4)?;
    let eval = |theta: f64| -> Result<f64, SynthError> {
        let u = drive_quarter.mul(&matexp_hermitian(&coupling, theta)?);
        Ok(infidelity(&grover, &u))
    };
    let grid_points = 2048usize;
    let mut best = (f64::INFINITY, 0.0f64);
    for i in 1..=grid_points {
        let theta = FRAC_PI_2 * i as f64 / grid_points as f64;
        let f = eval(theta)?;
        if f < best.0 {
            best = (f, theta);
        }
    }
    let h = FRAC_PI_2 / grid_points as f64;
    let (mut lo, mut hi) = ((best.1 - h).max(1e-12), (best.1 + h).min(FRAC_PI_2));
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if eval(m1)? < eval(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let theta_star = 0.5 * (lo + hi);
    let infid_star = eval(theta_star)?;

    Ok(GateReport {
        target: "grover coin".into(),
        achieved: claimed,
        infidelity: infid_star,
        residual_phases: Vec::new(),
        notes: vec![
            format!(
                "claimed recipe: drive (16m+4)χ with m = {m}, coupling angle χt = {chi_t}; \
                 its infidelity is reported in the scan"
            ),
            "the claimed-angle result is independent of m because the drive rotation \
             changes by full periods"
                .into(),
            "with the drive rotation held at π/4 per qubit, the coupling angle π/4 \
             reproduces the coin exactly up to a global phase"
                .into(),
        ],
        scan: Some(AngleScan {
            theta_star,
            infidelity_at_star: infid_star,
            claimed_angle: chi_t,
            infidelity_at_claimed: infid_claimed,
        }),
    })
}

/// Cross-check of the dispersive approximation: overlap infidelity between
/// full qubit-cavity dynamics and the dispersive diagonal model, starting
/// from `|n_init> ⊗ (|g> + |e>)/√2` and evolving for time `t`.
///
/// The mismatch is dominated by the `O(g/Δ)` hybridisation of the dressed
/// states, so it scales as `(g/Δ)²` in probability.
pub fn jc_vs_dispersive_infidelity(
    delta: f64,
    g: f64,
    fock_dim: usize,
    t: f64,
    n_init: usize,
) -> Result<f64, SynthError> {
    if fock_dim < 2 || n_init + 1 >= fock_dim {
        return Err(SynthError::InvalidDimension { dim: fock_dim });
    }
    let dim = fock_dim * 2;
    let idx = |n: usize, e: usize| n * 2 + e; // qubit fast: 0 ground, 1 excited
    // Full interaction in the frame rotating at the cavity frequency:
    // H = Δ |e><e| + g (a† σ- + a σ+).
    let mut h_full = ComplexMatrix::zeros(dim, dim);
    // Dispersive second-order model, diagonal in the same frame:
    // H = Δ |e><e| + χ (n̂+1)|e><e| - χ n̂ |g><g|.
    let mut h_disp = ComplexMatrix::zeros(dim, dim);
    let chi = g * g / delta;
    for n in 0..fock_dim {
        h_full.set(idx(n, 1), idx(n, 1), c(delta, 0.0));
        h_disp.set(idx(n, 1), idx(n, 1), c(delta + chi * (n as f64 + 1.0), 0.0));
        h_disp.set(idx(n, 0), idx(n, 0), c(-chi * n as f64, 0.0));
        if n + 1 < fock_dim {
            // a† σ-: |n, e> -> sqrt(n+1) |n+1, g>.
            let amp = c(g * ((n + 1) as f64).sqrt(), 0.0);
            h_full.set(idx(n + 1, 0), idx(n, 1), amp);
            h_full.set(idx(n, 1), idx(n + 1, 0), amp);
        }
    }
    let u_full = matexp_hermitian(&h_full, t)?;
    let u_disp = matexp_hermitian(&h_disp, t)?;
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi0 = vec![c(0.0, 0.0); dim];
    psi0[idx(n_init, 0)] = c(inv, 0.0);
    psi0[idx(n_init, 1)] = c(inv, 0.0);
    let a = u_full.apply(&psi0);
    let b = u_disp.apply(&psi0);
    let overlap: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    Ok(1.0 - overlap.norm())
}
