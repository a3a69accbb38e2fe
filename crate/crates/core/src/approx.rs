//! Constructive approximation of convergent target sequences by eigenvalue
//! sequences of Laguerre-Gaussian combinations.
//!
//! For a target `σ` with limit `p` and a tolerance `ε`, a plan keeps the first
//! `N` values of `σ - p` as coefficients of `u_ξ = Σ_k c_k a_{k,ξ}` and picks
//! the scale `ξ` so that the synthesis error `Σ_k |c_k| (k+1)/ξ` and the
//! truncation error `sup_{k >= N} |σ(k) - p|` each stay within `ε/2`. The
//! realised symbol is `u_ξ + p`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::eigenvalues::{gamma_closed_form_f64, gamma_combo_closed_form};
use crate::error::{invalid, Error, Result};
use crate::json::{from_json, to_json, JsonComplex};
use crate::seqspace::{SeqWindow, Tail, TargetFile};
use crate::symbols::{Combo, Symbol, MAX_TERMS};

/// `‖γ_{a_{m,ξ}} - δ_m‖_∞ = (m+1)/ξ`, valid for `ξ >= (m+2)/2`.
pub fn delta_error(m: usize, xi: u64) -> Result<BigRational> {
    if xi < 2 || 2 * xi < m as u64 + 2 {
        return Err(invalid(format!(
            "delta_error needs xi >= max(2, (m+2)/2); got m = {m}, xi = {xi}"
        )));
    }
    Ok(BigRational::new(BigInt::from(m + 1), BigInt::from(xi)))
}

/// Smallest scale accepted for `n_terms` coefficients.
pub fn min_admissible_xi(n_terms: usize) -> u64 {
    2u64.max((n_terms as u64 + 2) / 2)
}

const MAX_XI: f64 = 1e15;

/// Smallest admissible integer `ξ` with `weight / ξ <= budget`.
fn choose_xi(weight: f64, budget: f64, n_terms: usize) -> Result<u64> {
    let floor = min_admissible_xi(n_terms);
    if weight == 0.0 {
        return Ok(floor);
    }
    let raw = (weight / budget).ceil();
    if !(raw <= MAX_XI) {
        return Err(Error::Capacity(format!(
            "required scale xi ~ {raw:e} exceeds the supported maximum {MAX_XI:e}"
        )));
    }
    let mut xi = (raw as u64).saturating_sub(1).max(floor);
    while weight / xi as f64 > budget {
        xi += 1;
    }
    Ok(xi)
}

fn synthesis_weight(coeffs: &[Complex64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * (k + 1) as f64)
        .sum()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

fn check_terms(n: usize) -> Result<()> {
    if n > MAX_TERMS {
        return Err(Error::Capacity(format!(
            "plan needs {n} terms; combos support at most {MAX_TERMS}"
        )));
    }
    Ok(())
}

/// A synthesised symbol for a target together with its error budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationPlan {
    pub target: SeqWindow,
    pub epsilon: f64,
    pub n_terms: usize,
    pub xi: u64,
    pub coefficients: Vec<Complex64>,
    pub p: Complex64,
    /// `Σ_k |c_k| (k+1)/ξ + tail_bound`.
    pub predicted_bound: f64,
    /// Bound on `sup_{k >= N} |σ(k) - p|`.
    pub tail_bound: f64,
    /// False when `tail_bound` rests on a monotone-tail assumption instead of
    /// a certified bound carried by the target.
    pub tail_certified: bool,
    pub verified_error: Option<f64>,
    pub tail_certificate: Option<f64>,
    pub verify_window: Option<usize>,
}

impl ApproximationPlan {
    /// The realised symbol `u_ξ + p`.
    pub fn symbol(&self) -> Symbol {
        let combo = Combo::from_parts(self.coefficients.clone(), self.xi)
            .expect("plan coefficients were validated");
        Symbol::OffsetCombo { combo, p: self.p }
    }

    pub fn synthesis_bound(&self) -> f64 {
        synthesis_weight(&self.coefficients) / self.xi as f64
    }

    /// The same plan at another admissible scale; verification results are
    /// dropped.
    pub fn with_xi(&self, xi: u64) -> Result<Self> {
        let floor = min_admissible_xi(self.n_terms);
        if xi < floor {
            return Err(invalid(format!(
                "xi = {xi} is below the admissible minimum {floor} for {} terms",
                self.n_terms
            )));
        }
        let mut plan = self.clone();
        plan.xi = xi;
        plan.predicted_bound = plan.synthesis_bound() + plan.tail_bound;
        plan.verified_error = None;
        plan.tail_certificate = None;
        plan.verify_window = None;
        Ok(plan)
    }

    /// Runs [`verify_plan`] and stores its numbers in the plan.
    pub fn verified(mut self, n_verify: usize) -> Result<(Self, VerifyReport)> {
        let report = verify_plan(&self, n_verify)?;
        self.verified_error = Some(report.verified_error);
        self.tail_certificate = Some(report.tail_certificate);
        self.verify_window = Some(n_verify);
        Ok((self, report))
    }

    /// Default verification window `max(4N, N + 50)`.
    pub fn default_verify_window(&self) -> usize {
        (4 * self.n_terms).max(self.n_terms + 50)
    }
}

fn finite_plan(
    target: &SeqWindow,
    prefix: &[Complex64],
    budget: f64,
    epsilon: f64,
) -> Result<ApproximationPlan> {
    let n_terms = prefix
        .iter()
        .rposition(|c| c.norm() != 0.0)
        .map_or(0, |i| i + 1);
    check_terms(n_terms)?;
    let coefficients = prefix[..n_terms].to_vec();
    let weight = synthesis_weight(&coefficients);
    let xi = choose_xi(weight, budget, n_terms)?;
    Ok(ApproximationPlan {
        target: target.clone(),
        epsilon,
        n_terms,
        xi,
        coefficients,
        p: Complex64::new(0.0, 0.0),
        predicted_bound: weight / xi as f64,
        tail_bound: 0.0,
        tail_certified: true,
        verified_error: None,
        tail_certificate: None,
        verify_window: None,
    })
}

/// Plan for a finitely supported target (zero tail). Trailing zeros are not
/// kept as coefficients.
pub fn plan_finite(sigma: &SeqWindow, epsilon: f64) -> Result<ApproximationPlan> {
    check_epsilon(epsilon)?;
    if sigma.tail() != Tail::Zero {
        return Err(invalid("plan_finite needs a target with zero tail"));
    }
    finite_plan(sigma, sigma.values(), epsilon / 2.0, epsilon)
}

/// Plan for a target vanishing at infinity: truncate where the remainder
/// drops below `ε/2`, then synthesise the prefix within `ε/2`.
pub fn plan_c0(sigma: &SeqWindow, epsilon: f64) -> Result<ApproximationPlan> {
    check_epsilon(epsilon)?;
    let (beyond, certified) = match sigma.tail() {
        Tail::Zero => (0.0, true),
        Tail::Limit { p, .. } if p.norm() == 0.0 => {
            sigma.tail_deviation().expect("limit tail has a deviation")
        }
        Tail::Limit { p, .. } => {
            return Err(invalid(format!(
                "plan_c0 needs a target tending to 0; this one tends to {p}"
            )))
        }
        Tail::Unknown => {
            return Err(invalid(
                "the target tail is unknown; approximation needs a zero or limit tail",
            ))
        }
    };
    let half = epsilon / 2.0;
    if !(beyond < half) {
        return Err(Error::InsufficientData(format!(
            "the tail beyond the window is only known to within {beyond:e}, \
             which does not certify |sigma(k)| < {half:e}; use a longer window"
        )));
    }
    // Smallest N with sup_{k >= N} |σ(k)| < ε/2, scanning the window backwards.
    let v = sigma.values();
    let mut n_terms = v.len();
    let mut tail_sup = beyond;
    while n_terms > 0 && v[n_terms - 1].norm() < half {
        n_terms -= 1;
        tail_sup = tail_sup.max(v[n_terms].norm());
    }
    let mut plan = finite_plan(sigma, &v[..n_terms], half, epsilon)?;
    plan.tail_bound = tail_sup;
    plan.tail_certified = certified;
    plan.predicted_bound += tail_sup;
    Ok(plan)
}

/// Plan for a convergent target with limit `p`: approximate `σ - p` and add
/// `p` back as a constant.
pub fn plan_convergent(sigma: &SeqWindow, epsilon: f64) -> Result<ApproximationPlan> {
    let p = match sigma.tail() {
        Tail::Limit { p, .. } => p,
        Tail::Zero => Complex64::new(0.0, 0.0),
        Tail::Unknown => {
            return Err(invalid(
                "the target tail is unknown; approximation needs a zero or limit tail",
            ))
        }
    };
    let mut plan = plan_c0(&sigma.offset(p), epsilon)?;
    plan.target = sigma.clone();
    plan.p = p;
    Ok(plan)
}

/// One checked index of a verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyRow {
    pub n: usize,
    /// `σ(n)`; past the window this is the limit `p`.
    pub target: Complex64,
    pub gamma: Complex64,
    /// `|γ(n) - σ(n)|` inside the window; past it, `|γ(n) - p|` plus the tail
    /// deviation bound.
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    pub verified_error: f64,
    /// Bound on `|γ(n) - σ(n)|` for all `n > n_verify`.
    pub tail_certificate: f64,
    pub tail_certified: bool,
    pub passed: bool,
}

/// Checks a plan with the closed-form eigenvalues on `0..=n_verify` and bounds
/// the rest analytically: past `n_verify >= N` every `|γ_{a_{k,ξ}}(n)|` is
/// nonincreasing, so the error there is at most
/// `Σ_k |c_k| γ_{a_{k,ξ}}(n_verify+1) + sup_{n > n_verify} |σ(n) - p|`.
pub fn verify_plan(plan: &ApproximationPlan, n_verify: usize) -> Result<VerifyReport> {
    if n_verify < plan.n_terms {
        return Err(invalid(format!(
            "verification window {n_verify} is shorter than the plan's {} terms",
            plan.n_terms
        )));
    }
    let target = &plan.target;
    let (dev, certified) = target.tail_deviation().ok_or_else(|| {
        invalid("the target tail is unknown; verification needs a zero or limit tail")
    })?;
    let fill = target.tail().fill().expect("tail is known");
    let rows: Vec<VerifyRow> = (0..=n_verify)
        .map(|n| {
            let gamma = gamma_combo_closed_form(&plan.coefficients, plan.xi, plan.p, n);
            match target.values().get(n) {
                Some(&s) => VerifyRow {
                    n,
                    target: s,
                    gamma,
                    abs_error: (gamma - s).norm(),
                },
                None => VerifyRow {
                    n,
                    target: fill,
                    gamma,
                    abs_error: (gamma - fill).norm() + dev,
                },
            }
        })
        .collect();
    let verified_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let synth_tail: f64 = plan
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * gamma_closed_form_f64(k, plan.xi, n_verify + 1))
        .sum();
    let window_tail = target
        .values()
        .iter()
        .skip(n_verify + 1)
        .map(|s| (s - fill).norm())
        .fold(0.0, f64::max);
    let tail_certificate = synth_tail + window_tail.max(dev);
    Ok(VerifyReport {
        rows,
        verified_error,
        tail_certificate,
        tail_certified: certified,
        passed: verified_error + tail_certificate <= plan.epsilon,
    })
}

/// JSON form of a plan. The target is embedded so a plan file can be
/// re-verified on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n_terms: usize,
    pub xi: u64,
    pub coefficients: Vec<JsonComplex>,
    pub p: JsonComplex,
    pub predicted_bound: f64,
    pub tail_bound: f64,
    pub tail_certified: bool,
    #[serde(default)]
    pub verified_error: Option<f64>,
    #[serde(default)]
    pub tail_certificate: Option<f64>,
    #[serde(default)]
    pub verify_window: Option<usize>,
    pub target: TargetFile,
}

impl PlanFile {
    pub fn from_plan(plan: &ApproximationPlan) -> Self {
        PlanFile {
            epsilon: plan.epsilon,
            n_terms: plan.n_terms,
            xi: plan.xi,
            coefficients: to_json(&plan.coefficients),
            p: plan.p.into(),
            predicted_bound: plan.predicted_bound,
            tail_bound: plan.tail_bound,
            tail_certified: plan.tail_certified,
            verified_error: plan.verified_error,
            tail_certificate: plan.tail_certificate,
            verify_window: plan.verify_window,
            target: TargetFile::from_window(&plan.target),
        }
    }

    pub fn to_plan(&self) -> Result<ApproximationPlan> {
        check_epsilon(self.epsilon)?;
        let coefficients = from_json(&self.coefficients);
        if coefficients.len() != self.n_terms {
            return Err(Error::Format(format!(
                "plan lists {} coefficients but N = {}",
                coefficients.len(),
                self.n_terms
            )));
        }
        check_terms(self.n_terms)?;
        Combo::from_parts(coefficients.clone(), self.xi)?;
        if self.xi < min_admissible_xi(self.n_terms) {
            return Err(invalid(format!(
                "plan scale xi = {} is below the admissible minimum {}",
                self.xi,
                min_admissible_xi(self.n_terms)
            )));
        }
        Ok(ApproximationPlan {
            target: self.target.to_window()?,
            epsilon: self.epsilon,
            n_terms: self.n_terms,
            xi: self.xi,
            coefficients,
            p: self.p.0,
            predicted_bound: self.predicted_bound,
            tail_bound: self.tail_bound,
            tail_certified: self.tail_certified,
            verified_error: self.verified_error,
            tail_certificate: self.tail_certificate,
            verify_window: self.verify_window,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialises")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("plan JSON: {e}")))
    }
}
