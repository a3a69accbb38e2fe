//! Averaging operators `B_j` and the shift identity `τ_L^j γ_g = γ_{(B_j g)∘sq}`.
//!
//! `B_0 g(r) = g(√r)` and `B_j g(r) = ∫_r^∞ (B_{j-1} g)(u) e^{r-u} du`.
//! Unrolling the recursion turns the `j`-fold exponential average into one
//! integral against a Gamma(j) kernel:
//! `B_j g(r) = ∫_0^∞ g(√(r+s)) s^{j-1} e^{-s} / (j-1)! ds`.

use std::cell::Cell;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::quadrature::{integrate, Panel};
use super::{gamma_sequence, integration_window, weight, QuadConfig};
use crate::dd::Dd;
use crate::error::{invalid, Error, Result};
use crate::symbols::Symbol;

/// Value of `(B_j g)(r)` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averaged {
    pub value: Complex64,
    pub est_abs_err: f64,
    pub converged: bool,
}

/// Smallest horizon `T` with `sup_bound * P(S > T) <= tol` for
/// `S ~ Gamma(j, 1)`; for `j = 1` this is `T = ln(sup_bound / tol)`.
fn horizon(j: usize, sup_bound: f64, tol: f64) -> f64 {
    let jf = j as f64;
    let mut t = jf.max((sup_bound.max(1e-300) / tol).ln().max(1.0));
    while sup_bound * gamma_ur(jf, t) > tol {
        t += 0.5 * jf.sqrt().max(1.0);
    }
    t
}

/// `B_j` applied to `h = B_0 g`, i.e. `h(u) = g(√u)`.
pub(crate) fn average_sq<H>(h: H, sup_bound: f64, j: usize, r: f64, cfg: &QuadConfig) -> Averaged
where
    H: Fn(f64) -> Complex64,
{
    if j == 0 {
        return Averaged {
            value: h(r),
            est_abs_err: 0.0,
            converged: true,
        };
    }
    let t = horizon(j, sup_bound, 0.1 * cfg.abs_tol);
    let lg = ln_gamma(j as f64);
    let jm1 = (j - 1) as f64;
    let kernel = |s: f64| {
        if j == 1 {
            (-s).exp()
        } else if s <= 0.0 {
            0.0
        } else {
            (jm1 * s.ln() - s - lg).exp()
        }
    };
    let f = |s: Dd| {
        let s = s.to_f64();
        h(r + s) * kernel(s)
    };
    let panels = Panel::split(0.0, t, 4);
    let out = integrate(f, &panels, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
    Averaged {
        value: out.value,
        est_abs_err: out.abs_err + sup_bound * gamma_ur(j as f64, t),
        converged: out.converged,
    }
}

fn check_point(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!(
            "averaging point must be finite and >= 0, got {r}"
        )));
    }
    Ok(())
}

/// `(B_j g)(r)` for a bounded `g` with `|g| <= sup_bound`.
pub fn averaging_operator<G>(
    g: G,
    sup_bound: f64,
    j: usize,
    r: f64,
    cfg: &QuadConfig,
) -> Result<Averaged>
where
    G: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    check_point(r)?;
    Ok(average_sq(
        |u: f64| g(u.max(0.0).sqrt()),
        sup_bound,
        j,
        r,
        cfg,
    ))
}

/// `(B_j g)(r)` by literal nested recursion, one exponential average per
/// level. Cost grows geometrically in `j`; used to validate the Gamma-kernel
/// form.
pub fn averaging_operator_nested<G>(
    g: &G,
    sup_bound: f64,
    j: usize,
    r: f64,
    cfg: &QuadConfig,
) -> Result<Averaged>
where
    G: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    check_point(r)?;
    if j == 0 {
        return Ok(Averaged {
            value: g(r.sqrt()),
            est_abs_err: 0.0,
            converged: true,
        });
    }
    let t = horizon(1, sup_bound, 0.1 * cfg.abs_tol);
    let inner_err = Cell::new(0.0f64);
    let inner_ok = Cell::new(true);
    let f = |s: Dd| {
        let s = s.to_f64();
        match averaging_operator_nested(g, sup_bound, j - 1, r + s, cfg) {
            Ok(a) => {
                inner_err.set(inner_err.get().max(a.est_abs_err));
                inner_ok.set(inner_ok.get() && a.converged);
                a.value * (-s).exp()
            }
            Err(_) => {
                inner_ok.set(false);
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    };
    let out = integrate(
        f,
        &Panel::split(0.0, t, 4),
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdivisions,
    );
    Ok(Averaged {
        value: out.value,
        est_abs_err: out.abs_err + inner_err.get() + sup_bound * (-t).exp(),
        converged: out.converged && inner_ok.get(),
    })
}

/// `max_{n <= n_max} |γ_g(n+j) - γ_{(B_j g)∘sq}(n)|`.
///
/// The left side comes from [`gamma_sequence`]; the right side integrates
/// `(B_j g)(r)` against the weight `w_n`, evaluating `B_j g` at every node.
pub fn shifted_gamma_residual(s: &Symbol, j: usize, n_max: usize, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    if j == 0 {
        return Err(invalid("shift order j must be at least 1"));
    }
    let lhs = gamma_sequence(s, n_max + j, cfg)?;
    if let Some(e) = lhs.unconverged().next() {
        return Err(Error::NonConvergence {
            value_re: e.value.re,
            value_im: e.value.im,
            est_abs_err: e.est_abs_err(),
        });
    }
    let ln_sup = s.ln_sup_bound();
    let sup = ln_sup.exp();

    let per_n = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let win = integration_window(n, ln_sup, cfg);
            let inner_ok = Cell::new(true);
            let f = |r: Dd| {
                let r = r.to_f64();
                let a = average_sq(|u| s.eval_at_square(u), sup, j, r, cfg);
                inner_ok.set(inner_ok.get() && a.converged);
                a.value * weight(n, r)
            };
            let out = integrate(
                f,
                &win.panels,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_subdivisions,
            );
            let diff = (lhs.entries[n + j].value - out.value).norm();
            (diff, out.converged && inner_ok.get())
        })
        .collect::<Vec<_>>();

    let residual = per_n.iter().map(|p| p.0).fold(0.0, f64::max);
    if per_n.iter().any(|p| !p.1) {
        return Err(Error::NonConvergence {
            value_re: residual,
            value_im: 0.0,
            est_abs_err: f64::NAN,
        });
    }
    Ok(residual)
}
