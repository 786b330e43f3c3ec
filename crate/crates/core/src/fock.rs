//! Truncated Fock-space linear algebra: state vectors, Hermitian matrices,
//! ladder and displacement operators, eigendecomposition, trace norm.
//!
//! The displacement matrix is built entry-wise from its analytic matrix
//! elements rather than by exponentiating the ladder generator: the
//! entry-wise form is exact per element and does not amplify truncation
//! error the way a matrix exponential does.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{laguerre, log_factorial};
use crate::states::{photon_number_prob, DnsParams};

/// Module-wide truncation tolerance for state norms and traces.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// Hard cap on the truncation dimension.
pub const DIM_CAP: usize = 4096;

/// Pure-state amplitude vector over the photon-number basis |0⟩..|N−1⟩.
#[derive(Debug, Clone)]
pub struct FockVector {
    amp: DVector<Complex64>,
}

impl FockVector {
    /// Wraps an amplitude vector, requiring the norm to be within the
    /// truncation tolerance of 1.
    pub fn new(amp: DVector<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq >= 1.0 - TRUNCATION_TOL && norm_sq <= 1.0 + 1e-12) {
            return Err(Error::Truncated { value: norm_sq });
        }
        Ok(FockVector { amp })
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amp(&self) -> &DVector<Complex64> {
        &self.amp
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &FockVector) -> Complex64 {
        self.amp.dotc(&other.amp)
    }

    /// The projector |ψ⟩⟨ψ| as a density matrix.
    pub fn outer(&self) -> DensityMatrix {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| self.amp[i] * self.amp[j].conj());
        DensityMatrix::new(m).expect("projector of a checked state vector")
    }
}

/// Hermitian, unit-trace (up to the truncation tail) operator on the
/// truncated Fock space. Non-unit-trace Hermitian operators such as the
/// decision operator are kept as plain matrices.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    elem: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(elem: DMatrix<Complex64>) -> Result<Self> {
        if !elem.is_square() {
            return Err(Error::InvalidParameter("density matrix must be square".into()));
        }
        let dev = hermiticity_deviation(&elem);
        if dev > 1e-12 {
            return Err(Error::NotHermitian { dev });
        }
        let tr = elem.trace();
        if !(tr.re >= 1.0 - TRUNCATION_TOL && tr.re <= 1.0 + 1e-12) || tr.im.abs() > 1e-12 {
            return Err(Error::Truncated { value: tr.re });
        }
        Ok(DensityMatrix { elem })
    }

    pub fn dim(&self) -> usize {
        self.elem.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.elem
    }

    pub fn trace(&self) -> f64 {
        self.elem.trace().re
    }

    /// Real diagonal, i.e. the photon-number distribution of the state.
    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.elem[(n, n)].re).collect()
    }
}

/// Eigendecomposition of a Hermitian operator; `values` ascending, column j
/// of `vectors` is the eigenvector of `values[j]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Max |a_{nm} − conj(a_{mn})| over all entries.
pub fn hermiticity_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let mut dev = 0.0f64;
    for j in 0..mat.ncols() {
        for i in 0..=j {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Smallest truncation dimension N such that every listed state has
/// analytic photon-number tail mass beyond N−1 below `tol`, by direct
/// summation of the photon statistics.
pub fn choose_dim(params: &[DnsParams], tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "choose_dim tolerance {tol} outside (0, 1e-3]"
        )));
    }
    let mut best = 1usize;
    for p in params {
        let mut cum = 0.0;
        let mut found = None;
        for n in 0..DIM_CAP {
            cum += photon_number_prob(p, n);
            if 1.0 - cum < tol {
                found = Some(n + 1);
                break;
            }
        }
        let required = found.ok_or(Error::DimCapExceeded {
            required: DIM_CAP + 1,
            cap: DIM_CAP,
        })?;
        best = best.max(required);
    }
    Ok(best)
}

/// Matrix element ⟨h|D(μ)|c⟩ for h ≥ c, assembled in log space.
fn displacement_entry_lower(mu: Complex64, h: usize, c: usize) -> Complex64 {
    debug_assert!(h >= c);
    let r = mu.norm();
    if r == 0.0 {
        return if h == c { Complex64::ONE } else { Complex64::ZERO };
    }
    let r2 = r * r;
    let lag = laguerre(c as u32, (h - c) as i64, r2);
    if lag == 0.0 {
        return Complex64::ZERO;
    }
    let logmag = 0.5 * (log_factorial(c as u64) - log_factorial(h as u64)) - 0.5 * r2
        + (h - c) as f64 * r.ln()
        + lag.abs().ln();
    let mag = lag.signum() * logmag.exp();
    mag * Complex64::from_polar(1.0, (h - c) as f64 * mu.arg())
}

/// Displacement operator D(μ) on the truncated space, entry-wise analytic.
/// Rows below the diagonal come from the lower-triangle formula, rows above
/// from D(μ)† = D(−μ).
pub fn displacement_matrix(mu: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        for h in c..dim {
            m[(h, c)] = displacement_entry_lower(mu, h, c);
            if h != c {
                m[(c, h)] = displacement_entry_lower(-mu, h, c).conj();
            }
        }
    }
    m
}

/// Creation operator: entry (n+1, n) = √(n+1).
pub fn creation_matrix(dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim.saturating_sub(1) {
        m[(n + 1, n)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    m
}

/// Annihilation operator: entry (n−1, n) = √n.
pub fn annihilation_matrix(dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    m
}

/// Number operator diag(0, 1, 2, ...).
pub fn number_matrix(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::ZERO
        }
    })
}

/// Phase rotation R(θ) = diag(e^{inθ}); unitary, so it preserves the trace
/// norm of anything it conjugates.
pub fn phase_rotation_matrix(theta: f64, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, i as f64 * theta)
        } else {
            Complex64::ZERO
        }
    })
}

/// Eigendecomposition of a Hermitian matrix, values ascending.
///
/// Matrices that are real to within rounding take a real-symmetric path;
/// the displacement/phase reduction in `discrimination` makes every decision
/// operator real, which halves the work.
pub fn eigh(mat: &DMatrix<Complex64>) -> Result<EigenSystem> {
    let dev = hermiticity_deviation(mat);
    if dev > 1e-10 {
        return Err(Error::NotHermitian { dev });
    }
    let n = mat.nrows();
    let max_im = mat.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let (raw_values, raw_vectors) = if max_im < 1e-13 {
        let rm = DMatrix::from_fn(n, n, |i, j| 0.5 * (mat[(i, j)].re + mat[(j, i)].re));
        let se = SymmetricEigen::new(rm);
        let vecs = se.eigenvectors.map(|v| Complex64::new(v, 0.0));
        (se.eigenvalues, vecs)
    } else {
        let hm = DMatrix::from_fn(n, n, |i, j| 0.5 * (mat[(i, j)] + mat[(j, i)].conj()));
        let se = SymmetricEigen::new(hm);
        (se.eigenvalues, se.eigenvectors)
    };
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| raw_values[i].partial_cmp(&raw_values[j]).unwrap());
    let values = DVector::from_fn(n, |i, _| raw_values[idx[i]]);
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in idx.iter().enumerate() {
        vectors.set_column(col, &raw_vectors.column(src));
    }
    Ok(EigenSystem { values, vectors })
}

/// Trace norm Σ|λ_n| of a Hermitian operator.
pub fn trace_norm(mat: &DMatrix<Complex64>) -> Result<f64> {
    Ok(eigh(mat)?.values.iter().map(|l| l.abs()).sum())
}

/// Sum of the strictly positive eigenvalues.
pub fn positive_eigen_sum(mat: &DMatrix<Complex64>) -> Result<f64> {
    Ok(eigh(mat)?
        .values
        .iter()
        .filter(|&&l| l > 0.0)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::thermal_state;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement_matrix(Complex64::ZERO, 6);
        assert_eq!(d, DMatrix::identity(6, 6));
    }

    #[test]
    fn displacement_vacuum_element() {
        // ⟨0|D(1.5)|0⟩ = e^{-1.125}
        let d = displacement_matrix(c(1.5, 0.0), 8);
        assert_abs_diff_eq!(d[(0, 0)].re, (-1.125f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(d[(0, 0)].re, 0.324652467358350, epsilon = 1e-14);
        assert_eq!(d[(0, 0)].im, 0.0);
    }

    #[test]
    fn displacement_is_unitary_in_guarded_block() {
        let mu = c(1.1, -0.6);
        let params = DnsParams::new(mu, 0, 0.0).unwrap();
        let dim = choose_dim(&[params], 1e-10).unwrap().max(48);
        let d = displacement_matrix(mu, dim);
        let prod = &d * d.adjoint();
        let guard = dim - (4.0 * mu.norm() * (dim as f64).sqrt()).ceil() as usize;
        let mut dev = 0.0f64;
        for i in 0..guard {
            for j in 0..guard {
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                dev = dev.max((prod[(i, j)] - expected).norm());
            }
        }
        assert!(dev < 1e-8, "unitarity deviation {dev}");
    }

    #[test]
    fn displacement_composition_phase_convention() {
        // D(α)D(β) = e^{i Im(α β*)} D(α+β) in the guarded block
        let alpha = c(0.7, 0.3);
        let beta = c(-0.4, 0.5);
        let dim = 64;
        let lhs = displacement_matrix(alpha, dim) * displacement_matrix(beta, dim);
        let phase = Complex64::from_polar(1.0, (alpha * beta.conj()).im);
        let rhs = displacement_matrix(alpha + beta, dim) * phase;
        let mut dev = 0.0f64;
        for i in 0..dim / 2 {
            for j in 0..dim / 2 {
                dev = dev.max((lhs[(i, j)] - rhs[(i, j)]).norm());
            }
        }
        assert!(dev < 1e-7, "composition deviation {dev}");
    }

    #[test]
    fn choose_dim_vacuum_is_tiny() {
        let p = DnsParams::new(Complex64::ZERO, 0, 0.0).unwrap();
        assert_eq!(choose_dim(&[p], 1e-10).unwrap(), 1);
    }

    #[test]
    fn choose_dim_covers_tail_mass() {
        let p = DnsParams::new(c(2.0, 0.0), 1, 0.2).unwrap();
        let n = choose_dim(&[p.clone()], 1e-10).unwrap();
        let cum: f64 = (0..n).map(|m| photon_number_prob(&p, m)).sum();
        assert!(1.0 - cum < 1e-10);
        // and n is the smallest such dimension
        let cum_prev: f64 = (0..n - 1).map(|m| photon_number_prob(&p, m)).sum();
        assert!(1.0 - cum_prev >= 1e-10);
    }

    #[test]
    fn choose_dim_of_two_states_is_the_max() {
        let a = DnsParams::new(c(2.0, 0.0), 1, 0.2).unwrap();
        let b = DnsParams::new(Complex64::ZERO, 0, 0.1).unwrap();
        let na = choose_dim(&[a.clone()], 1e-10).unwrap();
        let nb = choose_dim(&[b.clone()], 1e-10).unwrap();
        let nab = choose_dim(&[a, b], 1e-10).unwrap();
        assert_eq!(nab, na.max(nb));
    }

    #[test]
    fn choose_dim_rejects_bad_tolerance() {
        let p = DnsParams::new(Complex64::ZERO, 0, 0.0).unwrap();
        assert!(choose_dim(&[p.clone()], 0.0).is_err());
        assert!(choose_dim(&[p], 1e-2).is_err());
    }

    #[test]
    fn eigh_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.7, 0.0), c(0.3, 0.0)]));
        let es = eigh(&m).unwrap();
        assert_abs_diff_eq!(es.values[0], 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(es.values[1], 0.7, epsilon = 1e-14);
    }

    #[test]
    fn eigh_rank_one_projector() {
        let amp = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let v = FockVector::new(amp).unwrap();
        let es = eigh(v.outer().matrix()).unwrap();
        assert_abs_diff_eq!(es.values[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(es.values[1], 1.0, epsilon = 1e-10);
    }

    /// Analytic eigenvalues of a real symmetric 3x3 matrix via the
    /// trigonometric solution of the characteristic polynomial.
    fn eig3_characteristic(m: &DMatrix<f64>) -> [f64; 3] {
        let q = m.trace() / 3.0;
        let b = m.map(|v| v) - DMatrix::identity(3, 3) * q;
        let p2: f64 = b.iter().map(|v| v * v).sum::<f64>() / 6.0;
        let p = p2.sqrt();
        if p < 1e-300 {
            return [q, q, q];
        }
        let det_b = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)])
            - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
            + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
        let r = (det_b / (2.0 * p * p * p)).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let l0 = q + 2.0 * p * phi.cos();
        let l2 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let l1 = 3.0 * q - l0 - l2;
        let mut ls = [l0, l1, l2];
        ls.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ls
    }

    #[test]
    fn eigh_matches_characteristic_polynomial_oracle() {
        // decision operator of two small hand-built density matrices
        let rho0 = DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2]);
        let rho1 = DMatrix::from_row_slice(3, 3, &[0.4, -0.2, 0.1, -0.2, 0.4, 0.0, 0.1, 0.0, 0.2]);
        let delta = rho1.map(|v| v) * 0.5 - rho0.map(|v| v) * 0.5;
        let expected = eig3_characteristic(&delta);
        let dc = DMatrix::from_fn(3, 3, |i, j| c(delta[(i, j)], 0.0));
        let es = eigh(&dc).unwrap();
        for i in 0..3 {
            assert!(
                (es.values[i] - expected[i]).abs() < 1e-9,
                "eigenvalue {i}: got {}, expected {}",
                es.values[i],
                expected[i]
            );
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_and_positive_sum_examples() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(-0.5, 0.0)]));
        assert_abs_diff_eq!(trace_norm(&m).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(positive_eigen_sum(&m).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn trace_norm_of_zero_decision_operator() {
        let rho = thermal_state(0.2, 16).unwrap();
        let delta = rho.matrix() * Complex64::new(0.5, 0.0)
            - rho.matrix() * Complex64::new(0.5, 0.0);
        assert!(trace_norm(&delta).unwrap() < 1e-14);
    }

    #[test]
    fn trace_norm_invariant_under_unitaries() {
        let rho = thermal_state(0.4, 32).unwrap();
        let other = crate::states::noisy_dns(&DnsParams::new(c(0.6, 0.2), 1, 0.3).unwrap(), 32)
            .unwrap();
        let delta = rho.matrix() * c(0.4, 0.0) - other.matrix() * c(0.6, 0.0);
        let tn = trace_norm(&delta).unwrap();
        let r = phase_rotation_matrix(0.83, 32);
        let rotated = &r * &delta * r.adjoint();
        assert!((trace_norm(&rotated).unwrap() - tn).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn eigh_reconstructs_random_hermitian(seed in prop::array::uniform16(-1.0f64..1.0)) {
            let n = 4;
            let raw = DMatrix::from_fn(n, n, |i, j| c(seed[i * n + j], 0.0));
            let herm = (&raw + raw.adjoint()) * c(0.5, 0.0);
            let es = eigh(&herm).unwrap();
            let diag = DMatrix::from_fn(n, n, |i, j| if i == j { c(es.values[i], 0.0) } else { Complex64::ZERO });
            let rebuilt = &es.vectors * diag * es.vectors.adjoint();
            let scale = herm.iter().map(|z| z.norm()).fold(1e-12, f64::max);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((rebuilt[(i, j)] - herm[(i, j)]).norm() < 1e-9 * scale);
                }
            }
            // orthonormality
            let gram = es.vectors.adjoint() * &es.vectors;
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                    prop_assert!((gram[(i, j)] - expected).norm() < 1e-10);
                }
            }
        }
    }
}
