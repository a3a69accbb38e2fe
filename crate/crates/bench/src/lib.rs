//! Fixtures shared by the benchmarks.

use fock_radial::{combo_symbol, Complex64, SeqGenerator, SeqWindow, Symbol};

/// `Σ_{k<n} a_{k,ξ} / (k+1)`.
pub fn harmonic_combo(n: usize, xi: u64) -> Symbol {
    let coeffs = (0..n)
        .map(|k| Complex64::new(1.0 / (k as f64 + 1.0), 0.0))
        .collect();
    combo_symbol(coeffs, xi).expect("valid combo")
}

pub fn cos_sqrt(len: usize) -> SeqWindow {
    SeqGenerator::CosSqrt.window(len).expect("positive length")
}

pub fn inverse_plus_one(len: usize) -> SeqWindow {
    SeqGenerator::InversePlusOne
        .window(len)
        .expect("positive length")
}
