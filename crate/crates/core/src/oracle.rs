//! Brute-force constructions used only for validation: every state and
//! bound rebuilt by raw operator algebra on matrices, never by the closed
//! forms. No Laguerre polynomials and no Fock-representation sum appear
//! here, so shared bugs cannot hide.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_matrix, creation_matrix, displacement_matrix, DensityMatrix, DIM_CAP,
};
use crate::states::{thermal_state, DnsParams};

/// Extra truncation headroom for the oracle: the trace normalization sees
/// the truncated tail, and repeated ladder applications plus the
/// displacement shift support upward before the final crop.
fn oracle_dim(params: &DnsParams, dim: usize) -> Result<usize> {
    let dim_big = dim + 16 + 4 * params.k as usize + (8.0 * params.mu.norm()).ceil() as usize;
    if dim_big > DIM_CAP {
        return Err(Error::DimCapExceeded {
            required: dim_big,
            cap: DIM_CAP,
        });
    }
    Ok(dim_big)
}

/// ρ(μ,k) by raw operator products: thermal matrix, k creation operators,
/// displacement, normalization by the computed trace, then crop to `dim`.
pub fn oracle_noisy_dns(params: &DnsParams, dim: usize) -> Result<DensityMatrix> {
    let dim_big = oracle_dim(params, dim)?;
    let mut rho = thermal_state(params.nt, dim_big)?.matrix().clone();
    let create = creation_matrix(dim_big);
    for _ in 0..params.k {
        rho = &create * rho * create.adjoint();
    }
    let disp = displacement_matrix(params.mu, dim_big);
    rho = &disp * rho * disp.adjoint();
    let tr = rho.trace();
    rho /= tr;
    let cropped = rho.view((0, 0), (dim, dim)).into_owned();
    let symm = (&cropped + cropped.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(symm)
}

/// tr{(Â†)^k ρ̂_th Â^k} before displacement and normalization; the closed
/// form says this is k!(n_t+1)^k.
pub fn oracle_photon_added_trace(k: u32, nt: f64, dim: usize) -> Result<f64> {
    if dim > DIM_CAP {
        return Err(Error::DimCapExceeded { required: dim, cap: DIM_CAP });
    }
    let mut rho = thermal_state(nt, dim)?.matrix().clone();
    let create = creation_matrix(dim);
    for _ in 0..k {
        rho = &create * rho * create.adjoint();
    }
    Ok(rho.trace().re)
}

/// Mean photon number tr{ρ n̂} read directly off the diagonal.
pub fn oracle_mean_photons(rho: &DensityMatrix) -> f64 {
    rho.diagonal_real()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Max deviation of the ladder/displacement commutators
/// [Â, D̂(α)] = αD̂(α), [Â†, D̂(α)] = α*D̂(α), and of [Â†, Â] = −𝕀, over a
/// grid of α, measured on the top-left (dim/2)×(dim/2) block (truncation
/// corrupts the bottom rows).
pub fn oracle_commutators(dim: usize) -> Result<f64> {
    if dim < 16 {
        return Err(Error::InvalidParameter(format!(
            "commutator check needs dim >= 16, got {dim}"
        )));
    }
    let alphas = [
        Complex64::ZERO,
        Complex64::new(0.3, 0.0),
        Complex64::new(0.7, 0.2),
        Complex64::new(1.5, 0.0),
    ];
    let a = annihilation_matrix(dim);
    let ad = creation_matrix(dim);
    let guard = dim / 2;
    let block_max = |m: &DMatrix<Complex64>| -> f64 {
        let mut dev = 0.0f64;
        for i in 0..guard {
            for j in 0..guard {
                dev = dev.max(m[(i, j)].norm());
            }
        }
        dev
    };
    let mut worst = 0.0f64;
    for alpha in alphas {
        let d = displacement_matrix(alpha, dim);
        let c1 = &a * &d - &d * &a - &d * alpha;
        let c2 = &ad * &d - &d * &ad - &d * alpha.conj();
        worst = worst.max(block_max(&c1)).max(block_max(&c2));
    }
    let canonical = &ad * &a - &a * &ad + DMatrix::identity(dim, dim);
    worst = worst.max(block_max(&canonical));
    Ok(worst)
}
