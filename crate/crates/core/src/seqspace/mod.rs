//! Bounded complex sequences on `ℕ₀` with the square-root distance
//! `ρ(j, k) = |√j - √k|`.
//!
//! Sequences are handled as finite windows plus a tail descriptor. Quantities
//! defined as suprema over all of `ℕ₀` are computed on the window, completed
//! by the descriptor where it pins the tail down; they are therefore lower
//! bounds of the true values when the tail is unknown.

mod generators;

pub use generators::{parse_generator, SeqGenerator};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::json::{from_json, to_json, JsonComplex};

/// What is known about `σ(n)` for `n` past the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `σ(n) = 0` beyond the window.
    Zero,
    /// `σ(n) → p`. `bound`, when present, certifies
    /// `sup_{n >= len} |σ(n) - p| <= bound`.
    Limit {
        p: Complex64,
        bound: Option<f64>,
    },
    Unknown,
}

impl Tail {
    /// Value used to extend the window, if the tail determines one.
    pub fn fill(&self) -> Option<Complex64> {
        match self {
            Tail::Zero => Some(Complex64::new(0.0, 0.0)),
            Tail::Limit { p, .. } => Some(*p),
            Tail::Unknown => None,
        }
    }

    pub fn limit(&self) -> Option<Complex64> {
        self.fill()
    }
}

/// A finite prefix `σ(0..len)` and a tail descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqWindow {
    values: Vec<Complex64>,
    tail: Tail,
}

impl SeqWindow {
    pub fn new(values: Vec<Complex64>, tail: Tail) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sequence window must hold at least one value"));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(invalid("sequence values must be finite"));
        }
        if let Tail::Limit { p, bound } = tail {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(invalid("tail limit must be finite"));
            }
            if let Some(b) = bound {
                if !(b >= 0.0) || !b.is_finite() {
                    return Err(invalid("tail bound must be finite and non-negative"));
                }
            }
        }
        Ok(SeqWindow { values, tail })
    }

    pub fn from_real(values: &[f64], tail: Tail) -> Result<Self> {
        Self::new(
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            tail,
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// `σ(n)`, using the tail descriptor past the window.
    pub fn get(&self, n: usize) -> Option<Complex64> {
        self.values.get(n).copied().or_else(|| self.tail.fill())
    }

    /// Sup norm of the window, including the tail's fill value.
    pub fn sup_norm(&self) -> f64 {
        let w = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        match self.tail.fill() {
            Some(p) => w.max(p.norm()),
            None => w,
        }
    }

    /// Certified bound on `sup_{n >= len} |σ(n) - p|`, with a flag telling
    /// whether it was certified (`true`) or taken from the last window value
    /// under a monotone-tail assumption (`false`). `None` for unknown tails.
    pub fn tail_deviation(&self) -> Option<(f64, bool)> {
        match self.tail {
            Tail::Zero => Some((0.0, true)),
            Tail::Limit { bound: Some(b), .. } => Some((b, true)),
            Tail::Limit { p, bound: None } => {
                let last = *self.values.last().expect("window is non-empty");
                Some(((last - p).norm(), false))
            }
            Tail::Unknown => None,
        }
    }

    /// `σ - c` elementwise, tail included.
    pub fn offset(&self, c: Complex64) -> SeqWindow {
        let values = self.values.iter().map(|v| v - c).collect();
        let tail = match self.tail {
            Tail::Zero => Tail::Limit {
                p: -c,
                bound: Some(0.0),
            },
            Tail::Limit { p, bound } => {
                let q = p - c;
                if q.norm() == 0.0 && bound == Some(0.0) {
                    Tail::Zero
                } else {
                    Tail::Limit { p: q, bound }
                }
            }
            Tail::Unknown => Tail::Unknown,
        };
        SeqWindow { values, tail }
    }

    /// The first `len` entries; the tail becomes unknown unless the cut keeps
    /// the whole window.
    pub fn truncated(&self, len: usize) -> Result<SeqWindow> {
        if len == 0 {
            return Err(invalid("cannot truncate to an empty window"));
        }
        if len >= self.values.len() {
            return Ok(self.clone());
        }
        SeqWindow::new(self.values[..len].to_vec(), Tail::Unknown)
    }

    fn require_len(&self, min: usize, what: &str) -> Result<()> {
        if self.values.len() < min {
            return Err(invalid(format!(
                "{what} needs a window of at least {min} values, got {}",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// `ρ(j, k) = |√j - √k|`.
pub fn sqrt_dist(j: usize, k: usize) -> f64 {
    ((j as f64).sqrt() - (k as f64).sqrt()).abs()
}

/// Windowed modulus of continuity
/// `ω_{ρ,σ}(δ) = sup { |σ(j) - σ(k)| : ρ(j, k) <= δ }`.
///
/// Pairs inside the window are scanned exhaustively, visiting for each `j`
/// only the `k` with `√k <= √j + δ`. When the tail has a fill value, pairs
/// with one index past the window are included exactly (all such `k` carry
/// the same value), so the result is the modulus of the completed sequence.
pub fn modulus_of_continuity(sigma: &SeqWindow, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let v = &sigma.values;
    let len = v.len();
    let mut best = 0.0f64;
    for j in 0..len {
        let reach = (j as f64).sqrt() + delta;
        let k_max = ((reach * reach).floor() as usize + 1).min(len - 1);
        for k in (j + 1)..=k_max {
            if sqrt_dist(j, k) <= delta {
                best = best.max((v[j] - v[k]).norm());
            }
        }
    }
    if let Some(fill) = sigma.tail.fill() {
        let edge = (len as f64).sqrt();
        for (j, x) in v.iter().enumerate() {
            if edge - (j as f64).sqrt() <= delta {
                best = best.max((x - fill).norm());
            }
        }
    }
    Ok(best)
}

/// Windowed `sup_n √(n+1) |σ(n+1) - σ(n)|`, finite exactly for sequences that
/// are Lipschitz with respect to `ρ`.
pub fn lipschitz_seminorm(sigma: &SeqWindow) -> Result<f64> {
    sigma.require_len(2, "Lipschitz seminorm")?;
    Ok(sigma
        .values
        .windows(2)
        .enumerate()
        .map(|(n, w)| ((n + 1) as f64).sqrt() * (w[1] - w[0]).norm())
        .fold(0.0, f64::max))
}

/// `τ_L σ = (σ(1), σ(2), …)`.
pub fn shift_left(sigma: &SeqWindow) -> Result<SeqWindow> {
    sigma.require_len(2, "left shift")?;
    Ok(SeqWindow {
        values: sigma.values[1..].to_vec(),
        tail: sigma.tail,
    })
}

/// `τ_R σ = (0, σ(0), σ(1), …)`.
pub fn shift_right(sigma: &SeqWindow) -> SeqWindow {
    let mut values = Vec::with_capacity(sigma.values.len() + 1);
    values.push(Complex64::new(0.0, 0.0));
    values.extend_from_slice(&sigma.values);
    SeqWindow {
        values,
        tail: sigma.tail,
    }
}

/// Length of the averaging block at `j`: `r_j = ⌊δ √j⌋`.
pub fn vp_radius(j: usize, delta: f64) -> usize {
    (delta * (j as f64).sqrt()).floor() as usize
}

fn check_vp_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn vp_mean(sigma: &SeqWindow, j: usize, delta: f64) -> Option<Complex64> {
    let r = vp_radius(j, delta);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in j..=j + r {
        acc += sigma.get(k)?;
    }
    Some(acc / (r + 1) as f64)
}

/// Vallée-Poussin smoothing `y(j) = (1/(1+r_j)) Σ_{k=j}^{j+r_j} σ(k)`.
///
/// The result is Lipschitz with seminorm at most `4√2 ‖σ‖_∞ / δ` and lies
/// within `ω_{ρ,σ}(δ)` of `σ`. Blocks reaching past the window read the tail
/// fill value, so an unknown tail is rejected; see [`vp_smooth_prefix`].
pub fn vp_smooth(sigma: &SeqWindow, delta: f64) -> Result<SeqWindow> {
    check_vp_delta(delta)?;
    if sigma.tail == Tail::Unknown {
        return Err(invalid(
            "smoothing needs tail values; the sequence tail is unknown",
        ));
    }
    let values = (0..sigma.len())
        .map(|j| vp_mean(sigma, j, delta).expect("tail fill is known"))
        .collect();
    Ok(SeqWindow {
        values,
        tail: sigma.tail,
    })
}

/// Smoothing restricted to the indices whose whole block lies in the window.
/// Works for any tail; the result has an unknown tail.
pub fn vp_smooth_prefix(sigma: &SeqWindow, delta: f64) -> Result<SeqWindow> {
    check_vp_delta(delta)?;
    let len = sigma.len();
    let values: Vec<Complex64> = (0..len)
        .take_while(|&j| j + vp_radius(j, delta) < len)
        .map(|j| {
            let r = vp_radius(j, delta);
            sigma.values[j..=j + r].iter().sum::<Complex64>() / (r + 1) as f64
        })
        .collect();
    SeqWindow::new(values, Tail::Unknown)
}

/// `max_{n_from <= n < len-k} |σ(n) - σ(n+k)|`, a windowed look at the decay
/// of `σ - τ_L^k σ`.
pub fn shift_difference_sup(sigma: &SeqWindow, k: usize, n_from: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("shift count must be at least 1"));
    }
    if n_from + k >= sigma.len() {
        return Err(invalid(format!(
            "window of {} values is too short for n_from = {n_from}, k = {k}",
            sigma.len()
        )));
    }
    let v = &sigma.values;
    Ok((n_from..v.len() - k)
        .map(|n| (v[n] - v[n + k]).norm())
        .fold(0.0, f64::max))
}

/// Lower bound `1/(2ρ)² - 1` on `min(j, k)` for any pair at distance
/// `ρ(j, k) = rho < 1/2`.
pub fn min_index_lower_bound(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(invalid(format!("rho must lie in (0, 1/2), got {rho}")));
    }
    Ok(1.0 / (4.0 * rho * rho) - 1.0)
}

/// File schema for target sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    pub values: Vec<JsonComplex>,
    pub tail: TailFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailFile {
    Zero,
    Limit {
        p: JsonComplex,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Unknown,
}

impl TargetFile {
    pub fn to_window(&self) -> Result<SeqWindow> {
        let tail = match &self.tail {
            TailFile::Zero => Tail::Zero,
            TailFile::Limit { p, bound } => Tail::Limit {
                p: p.0,
                bound: *bound,
            },
            TailFile::Unknown => Tail::Unknown,
        };
        SeqWindow::new(from_json(&self.values), tail)
    }

    pub fn from_window(w: &SeqWindow) -> Self {
        let tail = match w.tail {
            Tail::Zero => TailFile::Zero,
            Tail::Limit { p, bound } => TailFile::Limit { p: p.into(), bound },
            Tail::Unknown => TailFile::Unknown,
        };
        TargetFile {
            values: to_json(&w.values),
            tail,
        }
    }
}

/// Parses a target sequence from its JSON text.
pub fn target_from_json(text: &str) -> Result<SeqWindow> {
    let f: TargetFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("target JSON: {e}")))?;
    f.to_window()
}

#[cfg(test)]
mod tests;
