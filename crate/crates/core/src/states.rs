//! Constructors and analytics for the states of interest: number, coherent,
//! thermal, noiseless displaced number states (DNS), and noisy DNS.
//!
//! The noisy DNS ρ(μ,k) is a k-fold photon-added thermal state displaced by
//! μ. Its Fock-basis matrix elements are a double sum that mixes factorially
//! large and exponentially small factors, so every term is assembled in
//! log-magnitude + sign + complex-phase form and exponentiated last. Only
//! entries with n ≤ m are evaluated directly; the rest follow from
//! Hermiticity, so negative powers of μ* never arise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockVector, TRUNCATION_TOL};
use crate::specfun::{laguerre, log_binomial, log_factorial, xlny, LaguerreTable};

/// Parameters identifying a noisy DNS ρ(μ, k): displacement amplitude,
/// photon-addition count, and mean thermal photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct DnsParams {
    pub mu: Complex64,
    pub k: u32,
    pub nt: f64,
}

impl DnsParams {
    pub fn new(mu: Complex64, k: u32, nt: f64) -> Result<Self> {
        if !(nt >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "thermal occupancy nt = {nt} must be non-negative"
            )));
        }
        Ok(DnsParams { mu, k, nt })
    }

    /// Mean photon number |μ|² + k(n_t+1) + n_t, in closed form.
    pub fn mean_photons(&self) -> f64 {
        self.mu.norm_sqr() + self.k as f64 * (self.nt + 1.0) + self.nt
    }
}

/// Closed-form mean photon number of ρ(μ, k).
pub fn mean_photons(params: &DnsParams) -> f64 {
    params.mean_photons()
}

/// Fock coefficient ⟨n|D(μ)|k⟩ of a noiseless DNS.
fn noiseless_coefficient(mu: Complex64, k: u32, n: usize) -> Complex64 {
    let r = mu.norm();
    if r == 0.0 {
        return if n == k as usize { Complex64::ONE } else { Complex64::ZERO };
    }
    let r2 = r * r;
    let k = k as usize;
    let (lo, hi) = (n.min(k), n.max(k));
    let lag = laguerre(lo as u32, (hi - lo) as i64, r2);
    if lag == 0.0 {
        return Complex64::ZERO;
    }
    let logmag = 0.5 * (log_factorial(lo as u64) - log_factorial(hi as u64)) - 0.5 * r2
        + (hi - lo) as f64 * r.ln()
        + lag.abs().ln();
    let mut sign = lag.signum();
    let phase = if n >= k {
        (n - k) as f64 * mu.arg()
    } else {
        // (−μ*)^{k−n}
        if (k - n) % 2 == 1 {
            sign = -sign;
        }
        -((k - n) as f64) * mu.arg()
    };
    sign * logmag.exp() * Complex64::from_polar(1.0, phase)
}

/// Noiseless DNS |μ, k⟩ = D(μ)|k⟩ in the truncated basis.
pub fn noiseless_dns(mu: Complex64, k: u32, dim: usize) -> Result<FockVector> {
    if (k as usize) >= dim {
        return Err(Error::InvalidParameter(format!(
            "photon-addition count k = {k} requires dim > {k}, got {dim}"
        )));
    }
    let amp = DVector::from_fn(dim, |n, _| noiseless_coefficient(mu, k, n));
    FockVector::new(amp)
}

/// Inner product ⟨ξ, h|μ, k⟩ of two noiseless DNSs. The convention is
/// h ≥ k; arguments in the other order are swapped and conjugated.
pub fn dns_inner_product(xi: Complex64, h: u32, mu: Complex64, k: u32) -> Complex64 {
    if h < k {
        return dns_inner_product(mu, k, xi, h).conj();
    }
    let delta = mu - xi;
    let r = delta.norm();
    if r == 0.0 {
        return if h == k { Complex64::ONE } else { Complex64::ZERO };
    }
    let r2 = r * r;
    let lag = laguerre(k, (h - k) as i64, r2);
    if lag == 0.0 {
        return Complex64::ZERO;
    }
    let logmag = 0.5 * (log_factorial(k as u64) - log_factorial(h as u64)) - 0.5 * r2
        + (h - k) as f64 * r.ln()
        + lag.abs().ln();
    lag.signum() * logmag.exp() * Complex64::from_polar(1.0, (h - k) as f64 * delta.arg())
}

/// Thermal state of mean occupancy n_t: diagonal with the geometric law
/// p(n) = n_t^n / (n_t+1)^{n+1}.
pub fn thermal_state(nt: f64, dim: usize) -> Result<DensityMatrix> {
    if !(nt >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal occupancy nt = {nt} must be non-negative"
        )));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(thermal_prob(nt, i), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    DensityMatrix::new(m)
}

fn thermal_prob(nt: f64, n: usize) -> f64 {
    if nt == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    ((n as f64) * nt.ln() - (n as f64 + 1.0) * (nt + 1.0).ln()).exp()
}

/// One matrix element ⟨n|ρ(μ,k)|m⟩ for n ≤ m and n_t > 0, given a Laguerre
/// lookup at the fixed argument −|μ|²/(n_t(n_t+1)).
fn noisy_entry<L: Fn(usize, i64) -> f64>(
    mu: Complex64,
    k: u32,
    nt: f64,
    n: usize,
    m: usize,
    lag: &L,
) -> Complex64 {
    debug_assert!(n <= m && nt > 0.0);
    let r = mu.norm();
    if r == 0.0 && m != n {
        return Complex64::ZERO;
    }
    let ln_r = r.ln();
    let ln_nt = nt.ln();
    let ln_nt1 = (nt + 1.0).ln();
    let k_us = k as usize;
    let common = -r * r / (nt + 1.0)
        + xlny((m - n) as f64, ln_r)
        + 0.5 * (log_factorial(n as u64) - log_factorial(m as u64));

    // max-log accumulation over the (i, j) double sum
    let mut max_log = f64::NEG_INFINITY;
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity((k_us + 1) * (k_us + 1));
    for i in 0..=k_us.min(n) {
        for j in 0..=k_us.min(m) {
            let mu_pow = 2 * (k_us - j);
            if r == 0.0 && mu_pow > 0 {
                continue;
            }
            let l = lag(n - i, (m - n) as i64 + i as i64 - j as i64);
            if l == 0.0 {
                continue;
            }
            let logmag = log_binomial(m as u64, j as u64).expect("j <= m")
                + log_binomial(k as u64, i as u64).expect("i <= k")
                - log_factorial((k_us - j) as u64)
                + xlny(mu_pow as f64, ln_r)
                + xlny((n - i) as f64, ln_nt)
                - (m + k_us - j + 1) as f64 * ln_nt1
                + l.abs().ln();
            let sign = if (i + j) % 2 == 0 { l.signum() } else { -l.signum() };
            max_log = max_log.max(logmag);
            terms.push((sign, logmag));
        }
    }
    if terms.is_empty() {
        return Complex64::ZERO;
    }
    let s: f64 = terms.iter().map(|&(sg, lm)| sg * (lm - max_log).exp()).sum();
    let mag = s * (max_log + common).exp();
    mag * Complex64::from_polar(1.0, -((m - n) as f64) * mu.arg())
}

/// Noisy DNS ρ(μ, k) in the truncated Fock basis.
///
/// n_t = 0 routes to the pure-state path (outer product of the noiseless
/// DNS): the Fock-representation sum has Laguerre argument
/// −|μ|²/(n_t(n_t+1)), singular at n_t = 0. Accuracy degrades for
/// 0 < n_t ≲ 1e−6 where terms grow like n_t^{−k} and cancel.
pub fn noisy_dns(params: &DnsParams, dim: usize) -> Result<DensityMatrix> {
    if !(params.nt >= 0.0) {
        return Err(Error::InvalidParameter("nt must be non-negative".into()));
    }
    if params.nt == 0.0 {
        let v = noiseless_dns(params.mu, params.k, dim)?;
        return Ok(v.outer());
    }
    let x = -params.mu.norm_sqr() / (params.nt * (params.nt + 1.0));
    let k = params.k as i64;
    let table = LaguerreTable::new(x, dim, -k, (dim - 1) as i64 + k);
    let lookup = |q: usize, a: i64| table.get(q, a);
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..=col {
            let v = noisy_entry(params.mu, params.k, params.nt, row, col, &lookup);
            m[(row, col)] = v;
            if row != col {
                m[(col, row)] = v.conj();
            }
        }
    }
    // truncation noise on the diagonal is clipped; anything larger is a bug
    for n in 0..dim {
        let d = m[(n, n)].re;
        if d < 0.0 {
            if d < -1e-12 {
                return Err(Error::NegativeDiagonal { n, value: d });
            }
            m[(n, n)] = Complex64::ZERO;
        }
    }
    DensityMatrix::new(m)
}

/// Photon-number probability p(n) = ⟨n|ρ(μ,k)|n⟩, evaluated without
/// building the full matrix.
pub fn photon_number_prob(params: &DnsParams, n: usize) -> f64 {
    if params.nt == 0.0 {
        return noiseless_coefficient(params.mu, params.k, n).norm_sqr();
    }
    let x = -params.mu.norm_sqr() / (params.nt * (params.nt + 1.0));
    let lookup = |q: usize, a: i64| laguerre(q as u32, a, x);
    let p = noisy_entry(params.mu, params.k, params.nt, n, n, &lookup).re;
    if p < 0.0 && p >= -1e-12 {
        0.0
    } else {
        p
    }
}

/// Photon statistics of ρ(μ,k) over the truncated basis; tiny negative
/// entries from truncation noise are clipped to zero, larger ones error.
pub fn photon_statistics(params: &DnsParams, dim: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(dim);
    if params.nt == 0.0 {
        for n in 0..dim {
            out.push(noiseless_coefficient(params.mu, params.k, n).norm_sqr());
        }
        return Ok(out);
    }
    let x = -params.mu.norm_sqr() / (params.nt * (params.nt + 1.0));
    let k = params.k as i64;
    let table = LaguerreTable::new(x, dim, -k, k);
    let lookup = |q: usize, a: i64| table.get(q, a);
    for n in 0..dim {
        let p = noisy_entry(params.mu, params.k, params.nt, n, n, &lookup).re;
        if p < -1e-12 {
            return Err(Error::NegativeDiagonal { n, value: p });
        }
        out.push(p.max(0.0));
    }
    Ok(out)
}

/// Truncation tolerance re-exported for callers that validate traces.
pub const STATE_TRUNCATION_TOL: f64 = TRUNCATION_TOL;
