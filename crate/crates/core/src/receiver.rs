//! Kennedy receiver with threshold detection: displacement by −μ, photon
//! counting, and a count-threshold decision. For equal-displacement noisy
//! DNS pairs the optimal threshold makes this receiver attain the Helstrom
//! bound exactly.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrimination::{closed_form_eigenvalues, DiscriminationProblem};
use crate::error::{Error, Result};
use crate::fock::{choose_dim, TRUNCATION_TOL};
use crate::specfun::log_binomial;
use crate::states::{photon_statistics, DnsParams};

/// Receiver settings: the displacement applied before counting and the
/// count threshold. `n_th = -1` encodes an empty acceptance region for
/// hypothesis 1 (the receiver always reports hypothesis 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverConfig {
    pub beta: Complex64,
    pub n_th: i64,
}

impl ReceiverConfig {
    /// The optimal configuration for an equal-displacement problem:
    /// β = −μ and the analytic threshold, scanned up to `cap`.
    pub fn optimal_for(problem: &DiscriminationProblem, cap: usize) -> Result<Self> {
        Ok(ReceiverConfig {
            beta: -problem.state1().mu,
            n_th: optimal_threshold(problem, cap)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    H0,
    H1,
}

fn require_kennedy_problem(problem: &DiscriminationProblem) -> Result<()> {
    if !problem.equal_displacement() {
        return Err(Error::InvalidParameter(
            "Kennedy threshold analysis requires equal displacements (xi = mu)".into(),
        ));
    }
    if !problem.shared_nt() {
        return Err(Error::InvalidParameter(
            "Kennedy threshold analysis requires a shared thermal occupancy".into(),
        ));
    }
    Ok(())
}

/// Whether C(n,k)·n_t^{h−k} ≥ C(n,h)·p₀/p₁, i.e. λ_n ≥ 0 for n ≥ h.
/// n_t = 0 uses the 0⁰ = 1 convention, so the noiseless k = 0 limit lands
/// on n_th = h − 1.
fn threshold_condition(n: u64, k: u64, h: u64, nt: f64, ratio: f64) -> bool {
    let lhs = log_binomial(n, k).expect("n >= k").exp() * nt.powi((h - k) as i32);
    let c_h = if n < h {
        0.0
    } else {
        log_binomial(n, h).expect("n >= h").exp()
    };
    if c_h == 0.0 {
        return true;
    }
    lhs >= c_h * ratio
}

/// Optimal counting threshold: the maximum n satisfying the closed-form
/// eigenvalue-positivity condition, scanned upward from n = h. The
/// single-crossing property of the spectrum makes early exit on the first
/// failure correct; the scan is capped at `cap` (use dim − 1).
pub fn optimal_threshold(problem: &DiscriminationProblem, cap: usize) -> Result<i64> {
    require_kennedy_problem(problem)?;
    let k = problem.state1().k as u64;
    let h = problem.state0().k as u64;
    let nt = problem.state0().nt;
    let ratio = problem.p0() / problem.p1();
    if !threshold_condition(h, k, h, nt, ratio) {
        // all lambda_n for n < h are still non-negative
        return Ok(h as i64 - 1);
    }
    let mut n_th = h;
    while n_th < cap as u64 && threshold_condition(n_th + 1, k, h, nt, ratio) {
        n_th += 1;
    }
    Ok(n_th as i64)
}

/// Threshold decision rule: counts at or below the threshold favour the
/// low-photon hypothesis ρ̂₁ (boundary inclusive).
pub fn decide(count: u64, n_th: i64) -> Hypothesis {
    if (count as i64) <= n_th {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

/// Receiver error probability at an arbitrary threshold, via the
/// operational form p₀·tr{M̂₁ρ(0,h)} + p₁·tr{M̂₀ρ(0,k)} evaluated from
/// photon statistics; cross-checked against the eigenvalue form
/// p₁ − Σ_{n≤n_th} λ_n.
pub fn kennedy_error(problem: &DiscriminationProblem, n_th: i64, dim: usize) -> Result<f64> {
    require_kennedy_problem(problem)?;
    let nt = problem.state0().nt;
    let reduced0 = DnsParams::new(Complex64::ZERO, problem.state0().k, nt)?;
    let reduced1 = DnsParams::new(Complex64::ZERO, problem.state1().k, nt)?;
    let pdf0 = photon_statistics(&reduced0, dim)?;
    let pdf1 = photon_statistics(&reduced1, dim)?;
    let upper = if n_th < 0 {
        0
    } else {
        ((n_th as usize) + 1).min(dim)
    };
    let s0: f64 = pdf0[..upper].iter().sum();
    let s1: f64 = pdf1[..upper].iter().sum();
    let pe = problem.p0() * s0 + problem.p1() * (1.0 - s1);

    let spectrum = closed_form_eigenvalues(problem, dim.saturating_sub(1))?;
    let lam_sum: f64 = spectrum.lambda[..upper].iter().sum();
    let pe_lambda = problem.p1() - lam_sum;
    if (pe - pe_lambda).abs() > 1e-12 {
        return Err(Error::Integrity(format!(
            "Kennedy error forms disagree: {pe} vs {pe_lambda}"
        )));
    }
    Ok(pe)
}

/// Monte Carlo run of the receiver: draws the true hypothesis from the
/// priors, samples a photon count from the corresponding displaced-state
/// distribution by inverse CDF, and applies the threshold rule.
/// Deterministic for a fixed seed.
pub fn simulate(
    problem: &DiscriminationProblem,
    n_th: i64,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    require_kennedy_problem(problem)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let nt = problem.state0().nt;
    let reduced0 = DnsParams::new(Complex64::ZERO, problem.state0().k, nt)?;
    let reduced1 = DnsParams::new(Complex64::ZERO, problem.state1().k, nt)?;
    let dim = choose_dim(&[reduced0.clone(), reduced1.clone()], TRUNCATION_TOL)?;
    let cdf = |params: &DnsParams| -> Result<Vec<f64>> {
        let pdf = photon_statistics(params, dim)?;
        let total: f64 = pdf.iter().sum();
        let mut acc = 0.0;
        Ok(pdf
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect())
    };
    let cdf0 = cdf(&reduced0)?;
    let cdf1 = cdf(&reduced1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0u64;
    for _ in 0..trials {
        let truth = if rng.gen::<f64>() < problem.p0() {
            Hypothesis::H0
        } else {
            Hypothesis::H1
        };
        let table = match truth {
            Hypothesis::H0 => &cdf0,
            Hypothesis::H1 => &cdf1,
        };
        let u = rng.gen::<f64>();
        let count = table.partition_point(|&c| c < u).min(dim - 1) as u64;
        if decide(count, n_th) != truth {
            errors += 1;
        }
    }
    Ok(errors as f64 / trials as f64)
}
