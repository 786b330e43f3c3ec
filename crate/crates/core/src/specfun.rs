//! Numerically stable scalar special functions.
//!
//! Every closed form in this crate mixes factorially large and exponentially
//! small factors, so all factorial/binomial products are assembled in log
//! space with a separate sign tracker and exponentiated last. Naive
//! evaluation overflows an `f64` already near n ≈ 170.

use once_cell::sync::Lazy;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// ln(n!) for n = 0..=20, accumulated in exact integer arithmetic.
static LN_FACT_SMALL: Lazy<[f64; 21]> = Lazy::new(|| {
    let mut table = [0.0f64; 21];
    let mut acc: u128 = 1;
    for n in 1..=20usize {
        acc *= n as u128;
        table[n] = (acc as f64).ln();
    }
    table
});

/// Natural log of n!. Exact table up to 20!, log-gamma beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        LN_FACT_SMALL[n as usize]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Natural log of the binomial coefficient C(n, k).
///
/// Rejects k > n; callers that encounter out-of-range indices must gate
/// with the appropriate indicator instead of relying on a silent zero.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    // evaluate at min(k, n-k) so the k <-> n-k symmetry holds bit-exactly
    let s = k.min(n - k);
    Ok(log_factorial(n) - log_factorial(s) - log_factorial(n - s))
}

/// x·ln(y) with the convention 0·(−∞) = 0, for log-space exponents.
pub(crate) fn xlny(x: f64, ln_y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln_y
    }
}

/// Generalized Laguerre polynomial L_n^{(a)}(x) for integer parameter `a`.
///
/// Non-negative `a` uses the three-term recurrence in the degree. Negative
/// integer `a` with −a ≤ n uses the reflection identity
/// L_n^{(−m)}(x) = (−x)^m ((n−m)!/n!) L_{n−m}^{(m)}(x), which reduces to
/// exact polynomial arithmetic; the recurrence is not validated there.
/// Overflow for extreme (n, x) is a documented limitation, mitigated by the
/// truncation policy in [`crate::fock`].
pub fn laguerre(n: u32, a: i64, x: f64) -> f64 {
    if a < 0 {
        let m = (-a) as u32;
        if m <= n {
            let mut ratio = 1.0;
            for q in (n - m + 1)..=n {
                ratio /= q as f64;
            }
            return (-x).powi(m as i32) * ratio * laguerre(n - m, m as i64, x);
        }
        return laguerre_series(n, a, x);
    }
    if n == 0 {
        return 1.0;
    }
    let af = a as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 + af - x;
    for q in 1..n {
        let qf = q as f64;
        let next = ((2.0 * qf + 1.0 + af - x) * cur - (qf + af) * prev) / (qf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Explicit series Σ_{i=0}^{n} (−1)^i C(n+a, n−i) x^i / i! with the
/// generalized binomial; only reached for −a > n where neither the
/// recurrence nor the reflection applies.
fn laguerre_series(n: u32, a: i64, x: f64) -> f64 {
    let t = n as i64 + a;
    let mut sum = 0.0;
    let mut x_pow = 1.0;
    let mut fact = 1.0;
    for i in 0..=n {
        if i > 0 {
            x_pow *= x;
            fact *= i as f64;
        }
        let r = n - i;
        let mut c = 1.0;
        for j in 1..=r as i64 {
            c *= (t - r as i64 + j) as f64 / j as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c * x_pow / fact;
    }
    sum
}

/// Dense table of L_q^{(a)}(x) at a fixed argument, q = 0..rows,
/// a = a_min..=a_max. Non-negative columns are filled by the recurrence,
/// negative columns by reflection into the positive ones.
pub(crate) struct LaguerreTable {
    rows: usize,
    a_min: i64,
    vals: Vec<f64>,
}

impl LaguerreTable {
    pub fn new(x: f64, rows: usize, a_min: i64, a_max: i64) -> Self {
        assert!(a_min <= a_max && rows >= 1);
        let cols = (a_max - a_min + 1) as usize;
        let mut vals = vec![0.0f64; rows * cols];
        for a in a_min.max(0)..=a_max {
            let col = (a - a_min) as usize;
            let af = a as f64;
            vals[col * rows] = 1.0;
            if rows > 1 {
                vals[col * rows + 1] = 1.0 + af - x;
            }
            for q in 2..rows {
                let qf = (q - 1) as f64;
                vals[col * rows + q] = ((2.0 * qf + 1.0 + af - x) * vals[col * rows + q - 1]
                    - (qf + af) * vals[col * rows + q - 2])
                    / (qf + 1.0);
            }
        }
        let mut table = LaguerreTable { rows, a_min, vals };
        for a in a_min..0 {
            let m = (-a) as usize;
            for q in 0..rows {
                let v = if m <= q && (m as i64) <= a_max {
                    let mut ratio = 1.0;
                    for p in (q - m + 1)..=q {
                        ratio /= p as f64;
                    }
                    (-x).powi(m as i32) * ratio * table.get(q - m, m as i64)
                } else {
                    laguerre(q as u32, a, x)
                };
                let col = (a - a_min) as usize;
                table.vals[col * rows + q] = v;
            }
        }
        table
    }

    pub fn get(&self, q: usize, a: i64) -> f64 {
        let col = (a - self.a_min) as usize;
        self.vals[col * self.rows + q]
    }
}
