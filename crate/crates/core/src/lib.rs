//! Radial Toeplitz operators on the Fock space.
//!
//! A bounded radial symbol `g` on `[0, ∞)` defines a Toeplitz operator that is
//! diagonal in the monomial basis, with eigenvalues
//! `γ_g(n) = (1/n!) ∫_0^∞ g(√r) e^{-r} r^n dr`. This crate computes those
//! sequences and solves the inverse problem constructively: given a convergent
//! target sequence and a tolerance, it builds a Laguerre-Gaussian symbol whose
//! eigenvalues match the target uniformly, together with a certificate.
//!
//! Modules:
//! - [`laguerre`]: Laguerre polynomials, exact coefficients and moments.
//! - [`seqspace`]: the square-root distance on indices and sequence tools.
//! - [`symbols`]: radial symbols, including the `a_{m,ξ}` family.
//! - [`eigenvalues`]: closed forms, quadrature, averaging operators.
//! - [`approx`]: approximation plans and their verification.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod dd;
pub mod eigenvalues;
pub mod error;
pub mod json;
pub mod laguerre;
pub mod seqspace;
pub mod symbols;

pub use approx::{
    delta_error, plan_c0, plan_convergent, plan_finite, verify_plan, ApproximationPlan, PlanFile,
    VerifyReport,
};
pub use eigenvalues::{
    gamma_closed_form, gamma_combo_closed_form, gamma_quadrature, gamma_sequence,
    gamma_sequence_with, EigenSeq, Engine, EngineChoice, QuadConfig,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use seqspace::{SeqGenerator, SeqWindow, Tail};
pub use symbols::{
    basic_symbol, callable_symbol, combo_symbol, eval_symbol, with_limit_offset, Symbol,
};
