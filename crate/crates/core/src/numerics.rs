//! Dense complex linear algebra and least-squares fitting.
//!
//! Everything downstream (coin matrices, pulse unitaries, density-matrix
//! observables, scaling fits) is built on the small set of operations here:
//! row-major [`ComplexMatrix`], Kronecker products, Hermitian matrix
//! exponentials `exp(-iHt)` via eigendecomposition, partial traces over
//! arbitrary tensor factors, and ordinary least squares with a slope
//! standard error.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Largest max-entry deviation from `H = H†` accepted by
/// [`matexp_hermitian`]; inputs inside the tolerance are symmetrised.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: max |H - H†| entry {residual:.3e} exceeds {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("need at least {needed} usable data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("abscissa values are all equal (spread {span:.3e}); slope is undetermined")]
    DegenerateAbscissa { span: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; `data.len()` must equal
    /// `rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        Self::new(nr, nc, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|a| a * s).collect())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - self†`.
    pub fn hermiticity_residual(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Largest entry magnitude of `self† * self - I`.
    pub fn unitarity_residual(&self) -> f64 {
        self.dagger().mul(self).max_abs_diff(&Self::identity(self.rows))
    }
}

/// Kronecker product `a ⊗ b` with the left factor owning the slow index:
/// `(a ⊗ b)[i_a*rb + i_b, j_a*cb + j_b] = a[i_a, j_a] * b[i_b, j_b]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |r, c| {
        a.get(r / rb, c / cb) * b.get(r % rb, c % cb)
    })
}

/// Unitary `exp(-i H t)` of a Hermitian `H` via real-spectrum
/// eigendecomposition.
///
/// Inputs within [`HERMITICITY_TOL`] of Hermitian are symmetrised as
/// `(H + H†)/2` before decomposing; anything worse is rejected so silent
/// non-unitary propagation cannot occur.
pub fn matexp_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, NumericsError> {
    if h.rows() != h.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "matexp_hermitian needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_finite() || !t.is_finite() {
        return Err(NumericsError::NonFinite("matexp_hermitian"));
    }
    let residual = h.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(NumericsError::NotHermitian { residual, tol: HERMITICITY_TOL });
    }
    let n = h.rows();
    let sym = nalgebra::DMatrix::from_fn(n, n, |r, c| 0.5 * (h.get(r, c) + h.get(c, r).conj()));
    let eig = sym.symmetric_eigen();
    let q = eig.eigenvectors;
    // U = Q exp(-i Λ t) Q†, assembled as (Q D) Q†.
    let mut qd = q.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lam * t);
        for r in 0..n {
            qd[(r, j)] *= phase;
        }
    }
    let u = qd * q.adjoint();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| u[(r, c)]))
}

/// Partial trace of a density matrix over the tensor factors *not* listed in
/// `keep`.
///
/// `dims` are the factor dimensions ordered so the first factor owns the
/// slowest-varying index (matching [`kron`]); `keep` must be strictly
/// increasing and in range. Kept factors stay in their original order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, NumericsError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(NumericsError::DimensionMismatch(
            "factor dimensions must be non-empty and positive".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if rho.rows() != total || rho.cols() != total {
        return Err(NumericsError::DimensionMismatch(format!(
            "state is {}x{} but factor dimensions multiply to {total}",
            rho.rows(),
            rho.cols()
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NumericsError::DimensionMismatch(
            "keep list must be strictly increasing factor indices".into(),
        ));
    }

    let mut stride = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Decodes a flat index over the given dims into a base offset in the full
    // index using the original strides of the chosen factors.
    let offset = |flat: usize, sub_dims: &[usize], factors: &[usize]| -> usize {
        let mut rem = flat;
        let mut off = 0;
        for (i, &d) in sub_dims.iter().enumerate().rev() {
            off += (rem % d) * stride[factors[i]];
            rem /= d;
        }
        off
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for or in 0..out_dim {
        let base_r = offset(or, &kept_dims, keep);
        for oc in 0..out_dim {
            let base_c = offset(oc, &kept_dims, keep);
            let mut acc = C64::new(0.0, 0.0);
            for tt in 0..traced_total {
                let toff = offset(tt, &traced_dims, &traced);
                acc += rho.get(base_r + toff, base_c + toff);
            }
            out.set(or, oc, acc);
        }
    }
    Ok(out)
}

/// Ordinary least-squares fit of `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionResult {
    pub slope: f64,
    /// Standard error of the slope; zero (within roundoff) for exactly
    /// collinear data.
    pub slope_stderr: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r_squared: f64,
}

/// Least-squares line through `(xs[i], ys[i])`; needs at least three points
/// and a non-degenerate abscissa.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<RegressionResult, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::DimensionMismatch(format!(
            "{} abscissae vs {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(NumericsError::InsufficientData { needed: 3, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("linear_regression"));
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let span = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - xs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if sxx <= 0.0 || span < 1e-12 {
        return Err(NumericsError::DegenerateAbscissa { span });
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let slope_stderr = (ssr / ((xs.len() - 2) as f64 * sxx)).sqrt();
    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 1.0 };
    Ok(RegressionResult { slope, slope_stderr, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Deterministic pseudo-random stream in [-1, 1] for fixture matrices.
    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut next = lcg(seed);
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let m = random_matrix(n, seed);
        m.add(&m.dagger()).scale(c(0.5, 0.0))
    }

    fn random_density(n: usize, seed: u64) -> ComplexMatrix {
        let m = random_matrix(n, seed);
        let rho = m.mul(&m.dagger());
        let tr = rho.trace();
        rho.scale(c(1.0 / tr.re, 0.0))
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    #[test]
    fn matexp_of_zero_time_is_identity() {
        let u = matexp_hermitian(&random_hermitian(5, 7), 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-14);
    }

    #[test]
    fn matexp_sigma_z_quarter_turn() {
        // exp(-i σz π/2) = diag(-i, i), by scalar exponentials of the
        // eigenvalues ±1.
        let u = matexp_hermitian(&sigma_z(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::from_rows(&[
            vec![c(0.0, -1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 1.0)],
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn matexp_sigma_x_quarter_turn() {
        // exp(-i σx π/2) = cos(π/2) I - i sin(π/2) σx = -i σx.
        let u = matexp_hermitian(&sigma_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = sigma_x().scale(c(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn matexp_is_unitary_up_to_dim_64() {
        for &(n, seed) in &[(3usize, 11u64), (8, 12), (64, 13)] {
            let u = matexp_hermitian(&random_hermitian(n, seed), 0.73).unwrap();
            assert!(u.unitarity_residual() < 1e-10, "dim {n}");
        }
    }

    #[test]
    fn matexp_composes_in_time() {
        let h = random_hermitian(6, 21);
        let u1 = matexp_hermitian(&h, 0.31).unwrap();
        let u2 = matexp_hermitian(&h, 0.48).unwrap();
        let u12 = matexp_hermitian(&h, 0.79).unwrap();
        assert!(u1.mul(&u2).max_abs_diff(&u12) < 1e-9);
    }

    #[test]
    fn matexp_rejects_clearly_non_hermitian_input() {
        let mut h = random_hermitian(4, 31);
        h.set(1, 2, h.get(1, 2) + c(1e-6, 0.0));
        match matexp_hermitian(&h, 1.0) {
            Err(NumericsError::NotHermitian { residual, .. }) => assert!(residual > 1e-7),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn matexp_symmetrises_sub_tolerance_noise() {
        let mut h = random_hermitian(4, 37);
        h.set(0, 3, h.get(0, 3) + c(0.0, 1e-11));
        let u = matexp_hermitian(&h, 2.0).unwrap();
        assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn kron_against_hand_expansion() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 0.5)],
        ]);
        let k = kron(&sigma_z(), &a);
        // Upper-left block is a, lower-right block is -a.
        for r in 0..2 {
            for q in 0..2 {
                assert_eq!(k.get(r, q), a.get(r, q));
                assert_eq!(k.get(2 + r, 2 + q), -a.get(r, q));
                assert_eq!(k.get(r, 2 + q), c(0.0, 0.0));
                assert_eq!(k.get(2 + r, q), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn kron_with_scalar_factor() {
        let a = random_matrix(3, 41);
        let s = ComplexMatrix::new(1, 1, vec![c(0.0, 2.0)]);
        assert!(kron(&s, &a).max_abs_diff(&a.scale(c(0.0, 2.0))) < 1e-15);
        assert!(kron(&a, &s).max_abs_diff(&a.scale(c(0.0, 2.0))) < 1e-15);
    }

    #[test]
    fn kron_rectangular_entry_map() {
        let mut next = lcg(43);
        let a = ComplexMatrix::from_fn(2, 3, |_, _| c(next(), next()));
        let b = ComplexMatrix::from_fn(3, 2, |_, _| c(next(), next()));
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for (ia, ja, ib, jb) in [(0, 2, 1, 0), (1, 0, 2, 1), (1, 2, 0, 0)] {
            assert_eq!(k.get(ia * 3 + ib, ja * 2 + jb), a.get(ia, ja) * b.get(ib, jb));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn kron_is_associative(seed in 0u64..1u64 << 32, na in 1usize..4, nb in 1usize..4, nc in 1usize..4) {
            let a = random_matrix(na, seed ^ 0xa);
            let b = random_matrix(nb, seed ^ 0xb);
            let q = random_matrix(nc, seed ^ 0xc);
            let left = kron(&kron(&a, &b), &q);
            let right = kron(&a, &kron(&b, &q));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let inv = 1.0 / 2.0f64.sqrt();
        let psi = [c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)];
        let rho = ComplexMatrix::from_fn(4, 4, |r, q| psi[r] * psi[q].conj());
        for keep in [[0usize], [1]] {
            let red = partial_trace(&rho, &[2, 2], &keep).unwrap();
            assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_splits_product_states() {
        let rho = random_density(3, 51);
        let sig = random_density(4, 52);
        let joint = kron(&rho, &sig);
        assert!(partial_trace(&joint, &[3, 4], &[0]).unwrap().max_abs_diff(&rho) < 1e-12);
        assert!(partial_trace(&joint, &[3, 4], &[1]).unwrap().max_abs_diff(&sig) < 1e-12);
    }

    #[test]
    fn partial_trace_keeps_pairs_of_factors() {
        let rho = random_density(2, 61);
        let sig = random_density(3, 62);
        let tau = random_density(2, 63);
        let joint = kron(&kron(&rho, &sig), &tau);
        let kept = partial_trace(&joint, &[2, 3, 2], &[0, 1]).unwrap();
        assert!(kept.max_abs_diff(&kron(&rho, &sig)) < 1e-12);
        let outer = partial_trace(&joint, &[2, 3, 2], &[0, 2]).unwrap();
        assert!(outer.max_abs_diff(&kron(&rho, &tau)) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let rho = random_density(12, 71);
        let red = partial_trace(&rho, &[3, 2, 2], &[1]).unwrap();
        assert_abs_diff_eq!(red.trace().re, rho.trace().re, epsilon = 1e-12);
        assert_abs_diff_eq!(red.trace().im, rho.trace().im, epsilon = 1e-12);
        let scalar = partial_trace(&rho, &[3, 2, 2], &[]).unwrap();
        assert_abs_diff_eq!(scalar.get(0, 0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_shapes() {
        let rho = random_density(4, 81);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(NumericsError::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[2, 2], &[2]),
            Err(NumericsError::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[2, 2], &[1, 0]),
            Err(NumericsError::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[2, 2], &[0, 0]),
            Err(NumericsError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn regression_recovers_exact_line() {
        let xs: Vec<f64> = (1..=10).map(|n| (n as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.94 * x + 1.0).collect();
        let fit = linear_regression(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.94, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 1.0, epsilon = 1e-12);
        assert!(fit.slope_stderr < 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn regression_matches_reference_fit() {
        // Fixture checked against an established least-squares
        // implementation (slope stderr uses the n-2 residual variance).
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [2.1, 3.9, 6.2, 7.8, 10.1];
        let fit = linear_regression(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.99, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.intercept, 0.05, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.slope_stderr, 0.059721576223898, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared, 0.997305328900977, epsilon = 1e-10);
    }

    #[test]
    fn regression_rejects_degenerate_input() {
        assert!(matches!(
            linear_regression(&[1.0, 2.0], &[1.0, 2.0]),
            Err(NumericsError::InsufficientData { needed: 3, got: 2 })
        ));
        assert!(matches!(
            linear_regression(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(NumericsError::DegenerateAbscissa { .. })
        ));
        assert!(matches!(
            linear_regression(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(NumericsError::DimensionMismatch(_))
        ));
        assert!(matches!(
            linear_regression(&[1.0, 2.0, f64::NAN], &[1.0, 2.0, 3.0]),
            Err(NumericsError::NonFinite(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn regression_recovers_random_lines(
            slope in -5.0f64..5.0,
            intercept in -5.0f64..5.0,
            n in 3usize..40,
            start in -3.0f64..3.0,
            step in 0.01f64..1.0,
        ) {
            let xs: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
            let fit = linear_regression(&xs, &ys).unwrap();
            prop_assert!((fit.slope - slope).abs() < 1e-8);
            prop_assert!((fit.intercept - intercept).abs() < 1e-8);
            prop_assert!(fit.slope_stderr >= 0.0 && fit.slope_stderr < 1e-7);
            prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        }
    }
}
