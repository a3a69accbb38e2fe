//! Bounded radial defining symbols `g` on `[0, ∞)`.
//!
//! The Laguerre-Gaussian family is
//! `a_{m,ξ}(x) = (-1)^m ξ^{m+1} e^{-(ξ-1)x²} L_m(ξx²)` for integer `ξ ≥ 2`.
//! Its eigenvalue sequence approximates the standard basis sequence `δ_m`,
//! and finite linear combinations approximate finitely supported targets.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::eigenvalues::quadrature::DdComplex;
use crate::error::{invalid, Error, Result};
use crate::json::{from_json, to_json, JsonComplex};
use crate::laguerre::{laguerre_all, laguerre_all_dd, laguerre_recurrence, DEFAULT_MAX_DEGREE};

pub const MAX_TERMS: usize = DEFAULT_MAX_DEGREE + 1;

/// Finite combination `Σ_k c_k a_{k,ξ}` sharing one scale `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Combo {
    xi: u64,
    coeffs: Vec<Complex64>,
}

impl Combo {
    /// Checked constructor; rejects an empty coefficient list.
    pub fn new(coeffs: Vec<Complex64>, xi: u64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("combo symbol needs at least one coefficient"));
        }
        Self::from_parts(coeffs, xi)
    }

    /// Like [`Combo::new`] but an empty list denotes the zero function.
    pub fn from_parts(coeffs: Vec<Complex64>, xi: u64) -> Result<Self> {
        check_xi(xi)?;
        if coeffs.len() > MAX_TERMS {
            return Err(Error::Capacity(format!(
                "combo has {} terms, at most {} supported",
                coeffs.len(),
                MAX_TERMS
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid("combo coefficients must be finite"));
        }
        Ok(Combo { xi, coeffs })
    }

    pub fn xi(&self) -> u64 {
        self.xi
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn eval_sq(&self, r: f64) -> Complex64 {
        let n = self.coeffs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let xi = self.xi as f64;
        let ln_xi = xi.ln();
        let t = xi * r;
        let mut lag = [0.0; MAX_TERMS];
        let lag = &mut lag[..n];
        laguerre_all(t, lag);
        let gauss_exp = -(xi - 1.0) * r;
        self.coeffs
            .iter()
            .zip(lag.iter())
            .enumerate()
            .filter(|(_, (c, _))| c.norm() != 0.0)
            .map(|(k, (c, l))| c * signed_log_term(k, xi, ln_xi, gauss_exp, *l))
            .sum()
    }

    fn eval_sq_dd(&self, r: Dd, ln_xi: Dd) -> DdComplex {
        let n = self.coeffs.len();
        if n == 0 {
            return DdComplex::default();
        }
        let xi = Dd::from_u64(self.xi);
        let mut lag = [Dd::ZERO; MAX_TERMS];
        let lag = &mut lag[..n];
        laguerre_all_dd(xi * r, lag);
        let gauss_exp = -(xi - Dd::ONE) * r;
        let mut acc = DdComplex::default();
        for (k, (c, l)) in self.coeffs.iter().zip(lag.iter()).enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let mag = (Dd::from_f64((k + 1) as f64) * ln_xi + gauss_exp).exp() * *l;
            let term = if k % 2 == 1 { -mag } else { mag };
            acc = acc + DdComplex::from_c64(*c).mul_real(term);
        }
        acc
    }

    fn ln_sup_bound(&self) -> f64 {
        let ln_xi = (self.xi as f64).ln();
        log_sum_exp(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(k, c)| c.norm().ln() + (k + 1) as f64 * ln_xi),
        )
    }
}

/// Symbol given by an arbitrary evaluator.
#[derive(Clone)]
pub struct CallableSymbol {
    f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    sup_bound: f64,
    label: String,
}

impl CallableSymbol {
    pub fn eval(&self, x: f64) -> Complex64 {
        (self.f)(x)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CallableSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallableSymbol")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Symbol {
    Constant(Complex64),
    LaguerreGaussian { m: usize, xi: u64 },
    Combo(Combo),
    OffsetCombo { combo: Combo, p: Complex64 },
    Callable(CallableSymbol),
}

fn check_xi(xi: u64) -> Result<()> {
    if xi < 2 {
        return Err(invalid(format!(
            "scale xi must be an integer >= 2, got {xi}"
        )));
    }
    Ok(())
}

#[inline]
/// `(-1)^m ξ^{m+1} e^{gauss_exp} lag`, multiplied out directly when every
/// factor is representable and recombined from logarithms otherwise.
fn signed_log_term(m: usize, xi: f64, ln_xi: f64, gauss_exp: f64, lag: f64) -> f64 {
    if lag == 0.0 {
        return 0.0;
    }
    let ln_pow = (m + 1) as f64 * ln_xi;
    if ln_pow < 700.0 && gauss_exp > -700.0 && lag.abs() < 1e300 {
        let v = xi.powi(m as i32 + 1) * gauss_exp.exp() * lag;
        if v.is_finite() {
            return if m % 2 == 1 { -v } else { v };
        }
    }
    let sign = if (m % 2 == 1) != (lag < 0.0) {
        -1.0
    } else {
        1.0
    };
    sign * ((m + 1) as f64 * ln_xi + gauss_exp + lag.abs().ln()).exp()
}

fn log_sum_exp(it: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `a_{m,ξ}`.
pub fn basic_symbol(m: usize, xi: u64) -> Result<Symbol> {
    check_xi(xi)?;
    if m > DEFAULT_MAX_DEGREE {
        return Err(Error::Capacity(format!(
            "degree {m} exceeds the maximum {DEFAULT_MAX_DEGREE}"
        )));
    }
    Ok(Symbol::LaguerreGaussian { m, xi })
}

/// `u_ξ = Σ_k c_k a_{k,ξ}`.
pub fn combo_symbol(coeffs: Vec<Complex64>, xi: u64) -> Result<Symbol> {
    Ok(Symbol::Combo(Combo::new(coeffs, xi)?))
}

/// `u + p`, a symbol with limit `p` at infinity.
pub fn with_limit_offset(u: Symbol, p: Complex64) -> Result<Symbol> {
    match u {
        Symbol::Combo(combo) => Ok(Symbol::OffsetCombo { combo, p }),
        Symbol::OffsetCombo { combo, p: q } => Ok(Symbol::OffsetCombo { combo, p: q + p }),
        _ => Err(invalid("limit offsets apply to combo symbols only")),
    }
}

/// Wraps an evaluator. `sup_bound` is the caller's claim for `sup |g|`; it is
/// used for tail estimates and not checked.
pub fn callable_symbol<F>(f: F, sup_bound: f64, label: impl Into<String>) -> Symbol
where
    F: Fn(f64) -> Complex64 + Send + Sync + 'static,
{
    Symbol::Callable(CallableSymbol {
        f: Arc::new(f),
        sup_bound,
        label: label.into(),
    })
}

/// `g(x)` for `x ≥ 0`.
pub fn eval_symbol(s: &Symbol, x: f64) -> Result<Complex64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(invalid(format!(
            "symbol argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(match s {
        Symbol::Callable(c) => c.eval(x),
        _ => s.eval_at_square(x * x),
    })
}

impl Symbol {
    /// `g(√r)`, the composition appearing in the eigenvalue integral.
    /// Structured variants work with `r` directly and never take a square root.
    pub fn eval_at_square(&self, r: f64) -> Complex64 {
        match self {
            Symbol::Constant(c) => *c,
            Symbol::LaguerreGaussian { m, xi } => {
                let xif = *xi as f64;
                let lag = laguerre_recurrence(*m, xif * r);
                Complex64::new(
                    signed_log_term(*m, xif, xif.ln(), -(xif - 1.0) * r, lag),
                    0.0,
                )
            }
            Symbol::Combo(c) => c.eval_sq(r),
            Symbol::OffsetCombo { combo, p } => combo.eval_sq(r) + p,
            Symbol::Callable(c) => c.eval(r.max(0.0).sqrt()),
        }
    }

    /// Double-double `g(√r)` for the structured variants.
    pub fn eval_at_square_dd(&self, r: Dd) -> Option<DdComplex> {
        self.dd_evaluator().map(|f| f(r))
    }

    /// A double-double evaluator of `r ↦ g(√r)` with per-symbol constants
    /// precomputed; `None` for callable symbols.
    pub fn dd_evaluator(&self) -> Option<Box<dyn Fn(Dd) -> DdComplex + Send + Sync + '_>> {
        let ln_xi = |xi: u64| Dd::from_u64(xi).ln();
        Some(match self {
            Symbol::Constant(c) => {
                let v = DdComplex::from_c64(*c);
                Box::new(move |_| v)
            }
            Symbol::LaguerreGaussian { m, xi } => {
                let lx = ln_xi(*xi);
                let xi_d = Dd::from_u64(*xi);
                let scale = Dd::from_f64((*m + 1) as f64) * lx;
                let m = *m;
                Box::new(move |r| {
                    let mut lag = [Dd::ZERO; MAX_TERMS];
                    laguerre_all_dd(xi_d * r, &mut lag[..=m]);
                    let mag = (scale - (xi_d - Dd::ONE) * r).exp() * lag[m];
                    DdComplex::real(if m % 2 == 1 { -mag } else { mag })
                })
            }
            Symbol::Combo(c) => {
                let lx = ln_xi(c.xi);
                Box::new(move |r| c.eval_sq_dd(r, lx))
            }
            Symbol::OffsetCombo { combo, p } => {
                let lx = ln_xi(combo.xi);
                let pv = DdComplex::from_c64(*p);
                Box::new(move |r| combo.eval_sq_dd(r, lx) + pv)
            }
            Symbol::Callable(_) => return None,
        })
    }

    /// Natural log of an upper bound for `sup |g|`.
    ///
    /// Uses `|L_m(t)| ≤ e^{t/2}` on `t ≥ 0`, so `|a_{m,ξ}| ≤ ξ^{m+1}` when `ξ ≥ 2`.
    /// Callable symbols report their declared bound.
    pub fn ln_sup_bound(&self) -> f64 {
        match self {
            Symbol::Constant(c) => c.norm().ln(),
            Symbol::LaguerreGaussian { m, xi } => (*m + 1) as f64 * (*xi as f64).ln(),
            Symbol::Combo(c) => c.ln_sup_bound(),
            Symbol::OffsetCombo { combo, p } => {
                log_sum_exp([combo.ln_sup_bound(), p.norm().ln()].into_iter())
            }
            Symbol::Callable(c) => c.sup_bound.ln(),
        }
    }

    pub fn is_structured(&self) -> bool {
        !matches!(self, Symbol::Callable(_))
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            Symbol::Constant(c) => format!("constant({c})"),
            Symbol::LaguerreGaussian { m, xi } => format!("a_{{{m},{xi}}}"),
            Symbol::Combo(c) => format!("combo(xi={}, terms={})", c.xi, c.coeffs.len()),
            Symbol::OffsetCombo { combo, p } => {
                format!("combo(xi={}, terms={}) + {p}", combo.xi, combo.coeffs.len())
            }
            Symbol::Callable(c) => format!("callable({})", c.label),
        }
    }
}

/// File schema for symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Constant {
        value: JsonComplex,
    },
    LaguerreBasic {
        m: usize,
        xi: u64,
    },
    Combo {
        xi: u64,
        coefficients: Vec<JsonComplex>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<JsonComplex>,
    },
}

impl SymbolSpec {
    pub fn to_symbol(&self) -> Result<Symbol> {
        match self {
            SymbolSpec::Constant { value } => Ok(Symbol::Constant(value.0)),
            SymbolSpec::LaguerreBasic { m, xi } => basic_symbol(*m, *xi),
            SymbolSpec::Combo {
                xi,
                coefficients,
                offset,
            } => {
                let combo = Combo::from_parts(from_json(coefficients), *xi)?;
                Ok(match offset {
                    Some(p) => Symbol::OffsetCombo { combo, p: p.0 },
                    None => Symbol::Combo(combo),
                })
            }
        }
    }

    pub fn from_symbol(s: &Symbol) -> Result<Self> {
        Ok(match s {
            Symbol::Constant(c) => SymbolSpec::Constant { value: (*c).into() },
            Symbol::LaguerreGaussian { m, xi } => SymbolSpec::LaguerreBasic { m: *m, xi: *xi },
            Symbol::Combo(c) => SymbolSpec::Combo {
                xi: c.xi,
                coefficients: to_json(&c.coeffs),
                offset: None,
            },
            Symbol::OffsetCombo { combo, p } => SymbolSpec::Combo {
                xi: combo.xi,
                coefficients: to_json(&combo.coeffs),
                offset: Some((*p).into()),
            },
            Symbol::Callable(_) => {
                return Err(Error::Format(
                    "callable symbols have no file representation".into(),
                ))
            }
        })
    }
}

/// Parses a symbol from its JSON text.
pub fn symbol_from_json(text: &str) -> Result<Symbol> {
    let spec: SymbolSpec =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("symbol JSON: {e}")))?;
    spec.to_symbol()
}
