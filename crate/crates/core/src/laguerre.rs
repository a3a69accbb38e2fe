//! Laguerre polynomials `L_m` and their exponential moments.
//!
//! Floating-point evaluation uses the three-term recurrence
//! `(k+1) L_{k+1}(x) = (2k+1-x) L_k(x) - k L_{k-1}(x)`. Exact rational
//! coefficients and moments serve as oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dd::Dd;
use crate::error::{invalid, Error, Result};

/// Default cap on the degree accepted by the exact routines.
pub const DEFAULT_MAX_DEGREE: usize = 64;

/// `L_m` as an exact coefficient list in the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerrePoly {
    degree: usize,
    coeffs: Vec<BigRational>,
}

impl LaguerrePoly {
    pub fn new(degree: usize) -> Result<Self> {
        Self::with_max_degree(degree, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(degree: usize, max_degree: usize) -> Result<Self> {
        if degree > max_degree {
            return Err(Error::Capacity(format!(
                "Laguerre degree {degree} exceeds the configured maximum {max_degree}"
            )));
        }
        // c_k = (-1)^k binom(m, k) / k!, built incrementally:
        // c_{k+1} = -c_k (m - k) / (k + 1)^2
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut c = BigRational::one();
        coeffs.push(c.clone());
        for k in 0..degree {
            let num = BigInt::from(degree - k);
            let den = BigInt::from((k + 1) * (k + 1));
            c = -c * BigRational::new(num, den);
            coeffs.push(c.clone());
        }
        Ok(LaguerrePoly { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation from the coefficients converted to `f64`.
    /// Cancels badly for large `x`; kept as a cross-check for [`laguerre_eval`].
    pub fn eval_coeff_sum(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Exact coefficients of `L_m` with the default degree cap.
pub fn laguerre_coeffs(m: usize) -> Result<Vec<BigRational>> {
    Ok(LaguerrePoly::new(m)?.coeffs)
}

/// `L_m(x)` by the three-term recurrence.
pub fn laguerre_eval(m: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!(
            "Laguerre argument must be finite, got {x}"
        )));
    }
    Ok(laguerre_recurrence(m, x))
}

#[inline]
pub(crate) fn laguerre_recurrence(m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = L_k(x)` for `k < out.len()`.
pub fn laguerre_all(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = 1.0 - x;
    for k in 1..n - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Double-double variant of [`laguerre_all`].
pub(crate) fn laguerre_all_dd(x: Dd, out: &mut [Dd]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = Dd::ONE;
    if n == 1 {
        return;
    }
    out[1] = Dd::ONE - x;
    for k in 1..n - 1 {
        let kd = Dd::from_f64(k as f64);
        let two_k1 = Dd::from_f64(2.0 * k as f64 + 1.0);
        out[k + 1] = ((two_k1 - x) * out[k] - kd * out[k - 1]) / Dd::from_f64(k as f64 + 1.0);
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `∫_0^∞ e^{-r} L_m(r) r^n dr`, exactly.
///
/// Zero for `m > n`, otherwise `(-1)^m (n!)^2 / ((n-m)! m!)`.
pub fn laguerre_moment(m: usize, n: usize) -> BigRational {
    if m > n {
        return BigRational::zero();
    }
    let nf = factorial(n);
    let num = &nf * &nf;
    let den = factorial(n - m) * factorial(m);
    let v = BigRational::new(num, den);
    if m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Sign and natural-log magnitude of a real quantity that may overflow `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    /// -1, 0 or +1. When zero, `ln_abs` is `-inf`.
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }
}

/// Floating-point mirror of [`laguerre_moment`] via log-gamma.
pub fn laguerre_moment_log(m: usize, n: usize) -> SignedLog {
    use statrs::function::gamma::ln_gamma;
    if m > n {
        return SignedLog {
            sign: 0,
            ln_abs: f64::NEG_INFINITY,
        };
    }
    let lf = |k: usize| ln_gamma(k as f64 + 1.0);
    SignedLog {
        sign: if m % 2 == 1 { -1 } else { 1 },
        ln_abs: 2.0 * lf(n) - lf(n - m) - lf(m),
    }
}
