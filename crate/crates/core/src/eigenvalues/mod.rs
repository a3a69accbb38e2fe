//! Eigenvalue sequences `γ_g(n) = (1/n!) ∫_0^∞ g(√r) e^{-r} r^n dr` of radial
//! Toeplitz operators.
//!
//! Structured symbols have exact closed forms; every symbol can also go
//! through the quadrature engine, which integrates `g(√r)` against the
//! normalised weight `w_n(r) = exp(n ln r - r - ln n!)`.

pub mod averaging;
pub mod quadrature;

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::dd::Dd;
use crate::error::{invalid, Error, Result};
use crate::symbols::{Combo, Symbol};
use quadrature::{integrate, DdComplex, Panel};

pub use averaging::{averaging_operator, averaging_operator_nested, shifted_gamma_residual};

/// Quadrature parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    /// Absolute floor for the error target, needed where `γ_g(n)` vanishes.
    pub abs_tol: f64,
    /// Half-width of the initial window around the weight's mode, in units
    /// of its standard deviation `√(n+1)`.
    pub peak_window_sigmas: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            peak_window_sigmas: 14.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol must be positive"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(invalid("abs_tol must be non-negative"));
        }
        if !(self.peak_window_sigmas >= 6.0) {
            return Err(invalid("peak_window_sigmas must be at least 6"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

/// How an entry of an [`EigenSeq`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Engine {
    ClosedForm,
    Quadrature { est_abs_err: f64, converged: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEntry {
    pub n: usize,
    pub value: Complex64,
    pub engine: Engine,
}

impl EigenEntry {
    pub fn est_abs_err(&self) -> f64 {
        match self.engine {
            Engine::ClosedForm => 0.0,
            Engine::Quadrature { est_abs_err, .. } => est_abs_err,
        }
    }
}

/// A window `γ_g(0..=n_max)` with per-entry provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSeq {
    pub entries: Vec<EigenEntry>,
    pub symbol: String,
}

impl EigenSeq {
    pub fn values(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Entries whose quadrature ran out of budget.
    pub fn unconverged(&self) -> impl Iterator<Item = &EigenEntry> {
        self.entries.iter().filter(|e| {
            matches!(
                e.engine,
                Engine::Quadrature {
                    converged: false,
                    ..
                }
            )
        })
    }
}

/// Which engine [`gamma_sequence_with`] should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    /// Closed form when the symbol admits one, quadrature otherwise.
    Auto,
    ClosedForm,
    Quadrature,
}

/// `γ_{a_{m,ξ}}(n)`: zero for `n < m`, `binom(n, m) / ξ^{n-m}` otherwise.
pub fn gamma_closed_form(m: usize, xi: u64, n: usize) -> BigRational {
    if n < m {
        return BigRational::zero();
    }
    let num = binomial(BigInt::from(n), BigInt::from(m));
    let den = num_traits::pow(BigInt::from(xi), n - m);
    BigRational::new(num, den)
}

/// `f64` value of [`gamma_closed_form`], converted from the exact rational
/// whenever that is cheap and via logarithms otherwise.
pub fn gamma_closed_form_f64(m: usize, xi: u64, n: usize) -> f64 {
    if n < m {
        return 0.0;
    }
    let k = (n - m) as f64;
    let ln_xi = (xi as f64).ln();
    let ln_val = ln_binomial(n as u64, m as u64) - k * ln_xi;
    if ln_val < -760.0 {
        return 0.0;
    }
    if n <= 1000 && k * ln_xi.log2() < 4096.0 {
        if let Some(v) = gamma_closed_form(m, xi, n).to_f64() {
            return v;
        }
    }
    ln_val.exp()
}

/// `Σ_k c_k γ_{a_{k,ξ}}(n) + p`; an empty list is the zero combination.
pub fn gamma_combo_closed_form(coeffs: &[Complex64], xi: u64, p: Complex64, n: usize) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .take(n + 1)
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(k, c)| c * gamma_closed_form_f64(k, xi, n))
        .sum::<Complex64>()
        + p
}

fn combo_gamma(c: &Combo, p: Complex64, n: usize) -> Complex64 {
    gamma_combo_closed_form(c.coeffs(), c.xi(), p, n)
}

/// Closed form for the structured variants.
pub fn gamma_closed(s: &Symbol, n: usize) -> Option<Complex64> {
    match s {
        Symbol::Constant(c) => Some(*c),
        Symbol::LaguerreGaussian { m, xi } => {
            Some(Complex64::new(gamma_closed_form_f64(*m, *xi, n), 0.0))
        }
        Symbol::Combo(c) => Some(combo_gamma(c, Complex64::new(0.0, 0.0), n)),
        Symbol::OffsetCombo { combo, p } => Some(combo_gamma(combo, *p, n)),
        Symbol::Callable(_) => None,
    }
}

/// Result of one quadrature evaluation of `γ_g(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaQuad {
    pub value: Complex64,
    /// Quadrature error estimate plus the analytic bound on the mass outside
    /// the integration window.
    pub est_abs_err: f64,
    /// False when the subdivision budget ran out above tolerance.
    pub converged: bool,
}

impl GammaQuad {
    /// Turns a non-converged result into [`Error::NonConvergence`].
    pub fn into_result(self) -> Result<GammaQuad> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                value_re: self.value.re,
                value_im: self.value.im,
                est_abs_err: self.est_abs_err,
            })
        }
    }
}

fn ln_factorial_dd(n: usize) -> Dd {
    static CACHE: OnceLock<RwLock<Vec<Dd>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Dd::ZERO, Dd::ZERO]));
    if let Some(v) = cache.read().expect("ln n! cache poisoned").get(n) {
        return *v;
    }
    let mut table = cache.write().expect("ln n! cache poisoned");
    while table.len() <= n {
        let k = table.len();
        let next = table[k - 1] + Dd::from_f64(k as f64).ln();
        table.push(next);
    }
    table[n]
}

/// Integration window around the mode of `w_n` and the bound on the weight
/// mass it leaves out, scaled by `sup |g|`.
pub(crate) struct Window {
    pub panels: Vec<Panel>,
    pub tail_err: f64,
}

pub(crate) fn integration_window(n: usize, ln_sup: f64, cfg: &QuadConfig) -> Window {
    let shape = n as f64 + 1.0;
    let sd = shape.sqrt();
    let half = cfg.peak_window_sigmas * sd;
    let nf = n as f64;
    let mut a = (nf - half).max(0.0);
    let mut b = nf + half;
    let ln_target = (0.1 * cfg.abs_tol.max(1e-300)).ln();
    let ln_tail = |p: f64| {
        if p > 0.0 {
            ln_sup + p.ln()
        } else {
            f64::NEG_INFINITY
        }
    };

    if ln_sup > f64::NEG_INFINITY {
        for _ in 0..200 {
            if ln_tail(gamma_ur(shape, b)) <= ln_target {
                break;
            }
            b += half;
        }
        while a > 0.0 && ln_tail(gamma_lr(shape, a)) > ln_target {
            a = (a - half).max(0.0);
        }
    }
    let lower = if a > 0.0 { gamma_lr(shape, a) } else { 0.0 };
    let tail_mass = lower + gamma_ur(shape, b);
    let tail_err = if ln_sup == f64::NEG_INFINITY {
        0.0
    } else {
        ln_tail(tail_mass).exp()
    };
    let count = ((b - a) / (2.0 * sd)).ceil().clamp(4.0, 64.0) as usize;
    Window {
        panels: Panel::split(a, b, count),
        tail_err,
    }
}

/// Normalised weight `w_n(r)` in `f64`.
pub fn weight(n: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return if n == 0 && r == 0.0 { 1.0 } else { 0.0 };
    }
    (n as f64 * r.ln() - r - ln_gamma(n as f64 + 1.0)).exp()
}

/// `ln w_n(r)` in double-double; `r > 0`.
#[inline]
fn ln_weight_dd(r: Dd, nd: Dd, ln_fact: Dd) -> Dd {
    if nd.hi() == 0.0 {
        -r
    } else {
        nd * r.ln() - r - ln_fact
    }
}

/// `γ_g(n)` by adaptive quadrature.
///
/// Structured symbols are integrated in double-double arithmetic with the
/// symbol's exponential folded into the weight, which keeps the alternating
/// Laguerre terms from cancelling away the result. Callable symbols use `f64`.
pub fn gamma_quadrature(s: &Symbol, n: usize, cfg: &QuadConfig) -> Result<GammaQuad> {
    cfg.validate()?;
    let win = integration_window(n, s.ln_sup_bound(), cfg);
    let nd = Dd::from_f64(n as f64);
    let lf = ln_factorial_dd(n);

    let res = match s {
        Symbol::Callable(_) => {
            let lg = ln_gamma(n as f64 + 1.0);
            let f = |r: Dd| {
                let r = r.to_f64();
                let w = (n as f64 * r.ln() - r - lg).exp();
                s.eval_at_square(r) * w
            };
            let out = integrate(
                f,
                &win.panels,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_subdivisions,
            );
            (out.value, out.abs_err, out.converged)
        }
        Symbol::LaguerreGaussian { m, xi } => {
            let m = *m;
            let xi_d = Dd::from_u64(*xi);
            let scale = Dd::from_f64((m + 1) as f64) * xi_d.ln();
            let f = move |r: Dd| {
                let mut lag = [Dd::ZERO; crate::laguerre::DEFAULT_MAX_DEGREE + 1];
                crate::laguerre::laguerre_all_dd(xi_d * r, &mut lag[..=m]);
                let e = scale - (xi_d - Dd::ONE) * r + ln_weight_dd(r, nd, lf);
                let v = e.exp() * lag[m];
                if m % 2 == 1 {
                    -v
                } else {
                    v
                }
            };
            let out = integrate(
                f,
                &win.panels,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_subdivisions,
            );
            (
                Complex64::new(out.value.to_f64(), 0.0),
                out.abs_err,
                out.converged,
            )
        }
        _ => {
            let g = s
                .dd_evaluator()
                .expect("structured symbols have a double-double evaluator");
            let f = |r: Dd| g(r).mul_real(ln_weight_dd(r, nd, lf).exp());
            let out = integrate::<DdComplex, _>(
                f,
                &win.panels,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_subdivisions,
            );
            (out.value.to_c64(), out.abs_err, out.converged)
        }
    };

    Ok(GammaQuad {
        value: res.0,
        est_abs_err: res.1 + win.tail_err,
        converged: res.2,
    })
}

/// `γ_g(0..=n_max)` choosing the closed form whenever the symbol admits one.
pub fn gamma_sequence(s: &Symbol, n_max: usize, cfg: &QuadConfig) -> Result<EigenSeq> {
    gamma_sequence_with(s, n_max, EngineChoice::Auto, cfg)
}

/// Batch driver. Entries are computed in parallel and returned in order of `n`.
pub fn gamma_sequence_with(
    s: &Symbol,
    n_max: usize,
    choice: EngineChoice,
    cfg: &QuadConfig,
) -> Result<EigenSeq> {
    cfg.validate()?;
    let use_closed = match choice {
        EngineChoice::Auto => s.is_structured(),
        EngineChoice::ClosedForm => {
            if !s.is_structured() {
                return Err(invalid(format!(
                    "{} has no closed-form eigenvalues",
                    s.describe()
                )));
            }
            true
        }
        EngineChoice::Quadrature => false,
    };
    let entries = (0..=n_max)
        .into_par_iter()
        .map(|n| -> Result<EigenEntry> {
            if use_closed {
                let value = gamma_closed(s, n).expect("structured symbol");
                Ok(EigenEntry {
                    n,
                    value,
                    engine: Engine::ClosedForm,
                })
            } else {
                let q = gamma_quadrature(s, n, cfg)?;
                Ok(EigenEntry {
                    n,
                    value: q.value,
                    engine: Engine::Quadrature {
                        est_abs_err: q.est_abs_err,
                        converged: q.converged,
                    },
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenSeq {
        entries,
        symbol: s.describe(),
    })
}
