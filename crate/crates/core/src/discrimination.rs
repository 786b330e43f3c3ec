//! Minimum discrimination error probability (Helstrom bound) by three
//! routes: generic eigendecomposition of the decision operator, the
//! pure-state closed form, and the equal-displacement closed-form
//! eigenvalue spectrum.
//!
//! Before eigendecomposition the problem is displaced so hypothesis 0 sits
//! at the origin and phase-rotated so the residual displacement is real
//! non-negative; both maps are unitary, so the trace norm is unchanged and
//! every matrix becomes real symmetric.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{choose_dim, eigh, TRUNCATION_TOL};
use crate::specfun::{log_binomial, xlny};
use crate::states::{dns_inner_product, noisy_dns, DnsParams};

/// Two hypotheses with priors: ρ̂₀ = ρ(ξ, h) with prior p₀ and
/// ρ̂₁ = ρ(μ, k) with prior p₁. The constructor enforces the h ≥ k
/// convention by swapping hypotheses (and priors) when violated.
#[derive(Debug, Clone)]
pub struct DiscriminationProblem {
    state0: DnsParams,
    state1: DnsParams,
    p0: f64,
    p1: f64,
}

impl DiscriminationProblem {
    pub fn new(state0: DnsParams, state1: DnsParams, p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidParameter(format!(
                "prior p0 = {p0} outside [0, 1]"
            )));
        }
        let p1 = 1.0 - p0;
        if state0.k >= state1.k {
            Ok(DiscriminationProblem { state0, state1, p0, p1 })
        } else {
            Ok(DiscriminationProblem {
                state0: state1,
                state1: state0,
                p0: p1,
                p1: p0,
            })
        }
    }

    /// Hypothesis ρ̂₀ = ρ(ξ, h).
    pub fn state0(&self) -> &DnsParams {
        &self.state0
    }

    /// Hypothesis ρ̂₁ = ρ(μ, k), k ≤ h.
    pub fn state1(&self) -> &DnsParams {
        &self.state1
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// True when ξ = μ, the regime with a closed-form spectrum.
    pub fn equal_displacement(&self) -> bool {
        self.state0.mu == self.state1.mu
    }

    /// True when both hypotheses share the thermal occupancy.
    pub fn shared_nt(&self) -> bool {
        self.state0.nt == self.state1.nt
    }

    pub fn is_noiseless(&self) -> bool {
        self.state0.nt == 0.0 && self.state1.nt == 0.0
    }
}

/// Eigenvalues λ_n of the equal-displacement decision operator, indexed by
/// photon number.
#[derive(Debug, Clone)]
pub struct EigenvalueSpectrum {
    pub lambda: Vec<f64>,
}

/// One closed-form eigenvalue of p₁ρ(0,k) − p₀ρ(0,h): zero below k, the
/// photon-added-thermal weight between k and h, and a compensated
/// difference of two like-magnitude log-space terms from h upward.
fn lambda_n(n: u64, k: u64, h: u64, nt: f64, p0: f64, p1: f64) -> f64 {
    if n < k {
        return 0.0;
    }
    let ln_nt = nt.ln();
    let ln_nt1 = (nt + 1.0).ln();
    let ln_a = p1.ln() + log_binomial(n, k).expect("n >= k")
        + xlny((n - k) as f64, ln_nt)
        - (n + 1) as f64 * ln_nt1;
    if n < h {
        return ln_a.exp();
    }
    let ln_b = p0.ln() + log_binomial(n, h).expect("n >= h")
        + xlny((n - h) as f64, ln_nt)
        - (n + 1) as f64 * ln_nt1;
    if ln_a == f64::NEG_INFINITY {
        return -ln_b.exp();
    }
    if ln_b == f64::NEG_INFINITY {
        return ln_a.exp();
    }
    // sign comes from the log difference, magnitude from expm1
    if ln_a >= ln_b {
        ln_a.exp() * (-(ln_b - ln_a).exp_m1())
    } else {
        -(ln_b.exp() * (-(ln_a - ln_b).exp_m1()))
    }
}

fn require_equal_displacement(problem: &DiscriminationProblem) -> Result<()> {
    if !problem.equal_displacement() {
        return Err(Error::InvalidParameter(
            "closed form requires equal displacements (xi = mu)".into(),
        ));
    }
    if !problem.shared_nt() {
        return Err(Error::InvalidParameter(
            "closed form requires a shared thermal occupancy".into(),
        ));
    }
    Ok(())
}

/// Closed-form spectrum of the decision operator for ξ = μ, n = 0..=n_max.
pub fn closed_form_eigenvalues(
    problem: &DiscriminationProblem,
    n_max: usize,
) -> Result<EigenvalueSpectrum> {
    require_equal_displacement(problem)?;
    let k = problem.state1.k as u64;
    let h = problem.state0.k as u64;
    let nt = problem.state0.nt;
    let lambda = (0..=n_max as u64)
        .map(|n| lambda_n(n, k, h, nt, problem.p0, problem.p1))
        .collect();
    Ok(EigenvalueSpectrum { lambda })
}

/// MDEP for two pure (noiseless) DNSs: ½ − ½√(1 − 4p₀p₁|⟨ψ₀|ψ₁⟩|²).
pub fn helstrom_pure(problem: &DiscriminationProblem) -> Result<f64> {
    if !problem.is_noiseless() {
        return Err(Error::InvalidParameter(
            "pure-state bound requires nt = 0 on both hypotheses".into(),
        ));
    }
    let ov = dns_inner_product(
        problem.state0.mu,
        problem.state0.k,
        problem.state1.mu,
        problem.state1.k,
    );
    let arg = 1.0 - 4.0 * problem.p0 * problem.p1 * ov.norm_sqr();
    Ok(0.5 - 0.5 * arg.max(0.0).sqrt())
}

/// MDEP by eigendecomposition of the decision operator
/// Δ = p₁ρ(μ,k) − p₀ρ(ξ,h), after the displacement/phase reduction.
/// Both Helstrom forms, ½(1 − ‖Δ‖₁) and p₁ − Σ_{λ>0}λ, are computed and
/// must agree.
pub fn helstrom_general(problem: &DiscriminationProblem, dim: usize) -> Result<f64> {
    let delta_mu = problem.state1.mu - problem.state0.mu;
    let reduced1 = DnsParams::new(
        Complex64::new(delta_mu.norm(), 0.0),
        problem.state1.k,
        problem.state1.nt,
    )?;
    let reduced0 = DnsParams::new(Complex64::ZERO, problem.state0.k, problem.state0.nt)?;
    // |mu - xi| can exceed both |mu| and |xi|, so the reduced pair may need
    // more room than the caller's truncation; enlarge, never shrink
    let dim = dim.max(choose_dim(
        &[reduced0.clone(), reduced1.clone()],
        TRUNCATION_TOL,
    )?);
    let rho1 = noisy_dns(&reduced1, dim)?;
    let rho0 = noisy_dns(&reduced0, dim)?;
    let decision = rho1.matrix() * Complex64::new(problem.p1, 0.0)
        - rho0.matrix() * Complex64::new(problem.p0, 0.0);
    let es = eigh(&decision)?;
    let trace_norm: f64 = es.values.iter().map(|l| l.abs()).sum();
    let positive: f64 = es.values.iter().filter(|&&l| l > 0.0).sum();
    let pe_trace = 0.5 * (1.0 - trace_norm);
    let pe_positive = problem.p1 - positive;
    if (pe_trace - pe_positive).abs() > 1e-9 {
        return Err(Error::Integrity(format!(
            "Helstrom forms disagree: {pe_trace} vs {pe_positive}"
        )));
    }
    Ok(pe_positive)
}

/// MDEP from the closed-form spectrum: p₁ − Σ_{n ≤ n_th} λ_n with the
/// analytic optimal threshold.
pub fn helstrom_closed_form(problem: &DiscriminationProblem) -> Result<f64> {
    require_equal_displacement(problem)?;
    let nt = problem.state0.nt;
    let reduced0 = DnsParams::new(Complex64::ZERO, problem.state0.k, nt)?;
    let reduced1 = DnsParams::new(Complex64::ZERO, problem.state1.k, nt)?;
    let dim = choose_dim(&[reduced0, reduced1], TRUNCATION_TOL)?;
    let n_th = crate::receiver::optimal_threshold(problem, dim - 1)?;
    let k = problem.state1.k as u64;
    let h = problem.state0.k as u64;
    let mut sum = 0.0;
    let mut n: i64 = 0;
    while n <= n_th {
        let lam = lambda_n(n as u64, k, h, nt, problem.p0, problem.p1);
        sum += lam;
        // the spectrum tail decays geometrically once past h
        if n as u64 > h && lam.abs() < 1e-16 * sum.abs().max(1.0) {
            break;
        }
        n += 1;
    }
    Ok(problem.p1 - sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::choose_dim;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(mu: Complex64, k: u32, nt: f64) -> DnsParams {
        DnsParams::new(mu, k, nt).unwrap()
    }

    fn problem_dim(p: &DiscriminationProblem, tol: f64) -> usize {
        choose_dim(&[p.state0().clone(), p.state1().clone()], tol).unwrap()
    }

    #[test]
    fn pure_identical_states_give_half() {
        let p = DiscriminationProblem::new(
            params(c(0.8, 0.1), 2, 0.0),
            params(c(0.8, 0.1), 2, 0.0),
            0.5,
        )
        .unwrap();
        assert_eq!(helstrom_pure(&p).unwrap(), 0.5);
    }

    #[test]
    fn pure_zero_error_conditions() {
        // same displacement, different photon numbers
        let p = DiscriminationProblem::new(
            params(c(1.1, -0.4), 3, 0.0),
            params(c(1.1, -0.4), 1, 0.0),
            0.5,
        )
        .unwrap();
        assert!(helstrom_pure(&p).unwrap() < 1e-12);
        // h = k = 1 with |mu - xi|^2 at the root of L_1 (x = 1)
        let p = DiscriminationProblem::new(
            params(c(1.0, 0.0), 1, 0.0),
            params(c(0.0, 0.0), 1, 0.0),
            0.5,
        )
        .unwrap();
        assert!(helstrom_pure(&p).unwrap() < 1e-12);
    }

    #[test]
    fn pure_rejects_noisy_input() {
        let p = DiscriminationProblem::new(
            params(c(1.0, 0.0), 1, 0.1),
            params(c(0.0, 0.0), 0, 0.0),
            0.5,
        )
        .unwrap();
        assert!(helstrom_pure(&p).is_err());
    }

    #[test]
    fn general_identical_noisy_states_give_half() {
        let s = params(c(0.7, 0.3), 1, 0.2);
        let p = DiscriminationProblem::new(s.clone(), s, 0.5).unwrap();
        let dim = problem_dim(&p, 1e-10);
        assert_abs_diff_eq!(helstrom_general(&p, dim).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn general_matches_pure_for_noiseless_inputs() {
        for (mu, xi, k, h) in [
            (c(1.3, 0.0), c(0.2, 0.0), 0u32, 0u32),
            (c(0.9, 0.5), c(-0.3, 0.1), 1, 2),
            (c(2.0, 0.0), c(0.0, 0.0), 0, 3),
        ] {
            let p =
                DiscriminationProblem::new(params(xi, h, 0.0), params(mu, k, 0.0), 0.5).unwrap();
            let dim = problem_dim(&p, 1e-10);
            let general = helstrom_general(&p, dim).unwrap();
            let pure = helstrom_pure(&p).unwrap();
            assert!(
                (general - pure).abs() < 1e-9,
                "mu={mu} xi={xi} k={k} h={h}: {general} vs {pure}"
            );
        }
    }

    #[test]
    fn general_matches_closed_form_at_equal_displacement() {
        for (k, h, nt, p0) in [(0u32, 1u32, 0.2, 0.5), (1, 3, 0.5, 0.3), (0, 2, 0.1, 0.7)] {
            let mu = c(1.0, 0.0);
            let p = DiscriminationProblem::new(params(mu, h, nt), params(mu, k, nt), p0).unwrap();
            let dim = problem_dim(&p, 1e-10);
            let general = helstrom_general(&p, dim).unwrap();
            let closed = helstrom_closed_form(&p).unwrap();
            assert!(
                (general - closed).abs() < 1e-10,
                "k={k} h={h} nt={nt} p0={p0}: {general} vs {closed}"
            );
        }
    }

    #[test]
    fn closed_form_eigenvalue_branches() {
        let mu = Complex64::ZERO;
        let dim = 40;
        let p = DiscriminationProblem::new(params(mu, 3, 0.2), params(mu, 1, 0.2), 0.5).unwrap();
        let spec = closed_form_eigenvalues(&p, dim - 1).unwrap();
        // n < k: exactly zero
        assert_eq!(spec.lambda[0], 0.0);
        // k <= n < h: p1 C(n,k) nt^{n-k} / (nt+1)^{n+1}
        for n in 1..3usize {
            let expected = 0.5 * (n as f64) * 0.2f64.powi(n as i32 - 1) / 1.2f64.powi(n as i32 + 1);
            assert_abs_diff_eq!(spec.lambda[n], expected, epsilon = 1e-15);
        }
        // full spectrum against eigendecomposition of the built operator
        let rho1 = noisy_dns(&params(mu, 1, 0.2), dim).unwrap();
        let rho0 = noisy_dns(&params(mu, 3, 0.2), dim).unwrap();
        let delta = rho1.matrix() * c(0.5, 0.0) - rho0.matrix() * c(0.5, 0.0);
        let es = eigh(&delta).unwrap();
        let mut expected: Vec<f64> = spec.lambda[..dim].to_vec();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for n in 0..dim {
            assert!(
                (es.values[n] - expected[n]).abs() < 1e-10,
                "eigenvalue {n}: {} vs {}",
                es.values[n],
                expected[n]
            );
        }
    }

    #[test]
    fn closed_form_rejects_unequal_displacement() {
        let p = DiscriminationProblem::new(
            params(c(1.0, 0.0), 2, 0.2),
            params(c(0.5, 0.0), 0, 0.2),
            0.5,
        )
        .unwrap();
        assert!(closed_form_eigenvalues(&p, 10).is_err());
        assert!(helstrom_closed_form(&p).is_err());
    }

    #[test]
    fn closed_form_equal_hypotheses_give_half() {
        let mu = c(0.3, 0.0);
        let p = DiscriminationProblem::new(params(mu, 2, 0.4), params(mu, 2, 0.4), 0.5).unwrap();
        assert_abs_diff_eq!(helstrom_closed_form(&p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_decreases_with_gap() {
        let mu = c(1.0, 0.0);
        let mut prev = f64::INFINITY;
        for h in 1..=5u32 {
            let p = DiscriminationProblem::new(params(mu, h, 0.2), params(mu, 0, 0.2), 0.5).unwrap();
            let pe = helstrom_closed_form(&p).unwrap();
            assert!(pe < prev, "h={h}: {pe} !< {prev}");
            prev = pe;
        }
    }

    #[test]
    fn noisy_mdep_dominates_noiseless() {
        for delta in [0.0f64, 0.5, 1.0, 2.0] {
            let mu = c(delta, 0.0);
            let xi = Complex64::ZERO;
            let noiseless =
                DiscriminationProblem::new(params(xi, 2, 0.0), params(mu, 0, 0.0), 0.5).unwrap();
            let noisy =
                DiscriminationProblem::new(params(xi, 2, 0.2), params(mu, 0, 0.2), 0.5).unwrap();
            let dim = problem_dim(&noisy, 1e-10);
            let pe_noiseless = helstrom_pure(&noiseless).unwrap();
            let pe_noisy = helstrom_general(&noisy, dim).unwrap();
            assert!(pe_noisy >= pe_noiseless - 1e-9, "delta={delta}");
        }
    }

    #[test]
    fn displacement_invariance_of_general_route() {
        // the same problem presented at several absolute displacements
        let offsets = [c(0.0, 0.0), c(0.7, 0.0), c(-0.5, 0.9), c(1.2, -1.1)];
        let mut values = Vec::new();
        for off in offsets {
            let p = DiscriminationProblem::new(
                params(off, 2, 0.2),
                params(off + c(0.8, 0.3), 0, 0.2),
                0.4,
            )
            .unwrap();
            let dim = problem_dim(&p, 1e-10).max(40);
            values.push(helstrom_general(&p, dim).unwrap());
        }
        for v in &values[1..] {
            assert!((v - values[0]).abs() < 1e-9, "{values:?}");
        }
    }

    #[test]
    fn swapping_hypotheses_preserves_error() {
        let a = params(c(1.0, 0.0), 3, 0.2);
        let b = params(c(0.4, 0.0), 1, 0.2);
        let p_fwd = DiscriminationProblem::new(a.clone(), b.clone(), 0.3).unwrap();
        let p_rev = DiscriminationProblem::new(b, a, 0.7).unwrap();
        let dim = problem_dim(&p_fwd, 1e-10);
        let fwd = helstrom_general(&p_fwd, dim).unwrap();
        let rev = helstrom_general(&p_rev, dim).unwrap();
        assert!((fwd - rev).abs() < 1e-10);
    }

    #[test]
    fn error_probability_is_bounded_by_priors() {
        for p0 in [0.2, 0.5, 0.8] {
            let p = DiscriminationProblem::new(
                params(c(0.9, 0.0), 1, 0.3),
                params(c(0.2, 0.0), 0, 0.3),
                p0,
            )
            .unwrap();
            let dim = problem_dim(&p, 1e-10);
            let pe = helstrom_general(&p, dim).unwrap();
            assert!(pe >= -1e-12 && pe <= p0.min(1.0 - p0) + 1e-12);
        }
    }

    #[test]
    fn reduction_makes_decision_operator_real() {
        // sanity for the real-symmetric fast path: reduced states are real
        let p = DnsParams::new(c(1.0, 0.0), 2, 0.3).unwrap();
        let dim = choose_dim(&[p.clone()], 1e-10).unwrap();
        let rho = noisy_dns(&p, dim).unwrap();
        let max_im = rho.matrix().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert_eq!(max_im, 0.0);
        let _: &DMatrix<Complex64> = rho.matrix();
    }
}
