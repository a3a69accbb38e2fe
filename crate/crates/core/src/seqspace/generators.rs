//! Built-in test sequences, addressable as `generator:<kind>?key=value&…`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{SeqWindow, Tail};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SeqGenerator {
    /// `cos(√j)`: Lipschitz with respect to `ρ`, no limit.
    CosSqrt,
    /// `√|sin(π√j)|`: uniformly continuous with respect to `ρ` but not Lipschitz.
    SqrtAbsSinPiSqrt,
    /// `q^j` for real `q` in `[-1, 1]`.
    Geometric(f64),
    /// `1/(j+1)`.
    InversePlusOne,
    /// The listed values followed by zeros.
    FiniteSupport(Vec<Complex64>),
}

impl SeqGenerator {
    pub fn value(&self, j: usize) -> Complex64 {
        let jf = j as f64;
        let re = match self {
            SeqGenerator::CosSqrt => jf.sqrt().cos(),
            SeqGenerator::SqrtAbsSinPiSqrt => (PI * jf.sqrt()).sin().abs().sqrt(),
            SeqGenerator::Geometric(q) => q.powi(j as i32),
            SeqGenerator::InversePlusOne => 1.0 / (jf + 1.0),
            SeqGenerator::FiniteSupport(v) => return v.get(j).copied().unwrap_or_default(),
        };
        Complex64::new(re, 0.0)
    }

    /// The first `len` values with the tail descriptor the formula implies.
    /// Finite supports are never cut: the window covers at least the list.
    pub fn window(&self, len: usize) -> Result<SeqWindow> {
        let len = match self {
            SeqGenerator::FiniteSupport(v) => len.max(v.len()),
            _ => len,
        };
        if len == 0 {
            return Err(invalid("generator window length must be positive"));
        }
        let values = (0..len).map(|j| self.value(j)).collect();
        let tail = match self {
            SeqGenerator::CosSqrt | SeqGenerator::SqrtAbsSinPiSqrt => Tail::Unknown,
            SeqGenerator::Geometric(q) if *q == 1.0 => Tail::Limit {
                p: Complex64::new(1.0, 0.0),
                bound: Some(0.0),
            },
            SeqGenerator::Geometric(q) if q.abs() < 1.0 => Tail::Limit {
                p: Complex64::new(0.0, 0.0),
                bound: Some(q.abs().powi(len as i32)),
            },
            SeqGenerator::Geometric(_) => Tail::Unknown,
            SeqGenerator::InversePlusOne => Tail::Limit {
                p: Complex64::new(0.0, 0.0),
                bound: Some(1.0 / (len as f64 + 1.0)),
            },
            SeqGenerator::FiniteSupport(_) => Tail::Zero,
        };
        SeqWindow::new(values, tail)
    }
}

const DEFAULT_LEN: usize = 1000;

/// Parses `generator:<kind>?n=<len>&offset=<c>&…` into a window.
///
/// Kinds: `cos_sqrt`, `sqrt_abs_sin_pi_sqrt`, `geometric` (needs `q`),
/// `inverse_plus_one`, `finite` (needs `values=v0,v1,…`). `offset` adds a
/// real constant to every entry and to the tail.
pub fn parse_generator(spec: &str) -> Result<SeqWindow> {
    let body = spec
        .strip_prefix("generator:")
        .ok_or_else(|| Error::Format(format!("not a generator spec: {spec}")))?;
    let (kind, query) = body.split_once('?').unwrap_or((body, ""));
    let mut len = None;
    let mut offset = 0.0;
    let mut q = None;
    let mut list = None;
    for pair in query.split('&').filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("malformed generator parameter '{pair}'")))?;
        let num = |v: &str| {
            v.parse::<f64>().map_err(|_| {
                Error::Format(format!("generator parameter {k}: '{v}' is not a number"))
            })
        };
        match k {
            "n" => {
                len = Some(v.parse().map_err(|_| {
                    Error::Format(format!("generator length '{v}' is not an integer"))
                })?)
            }
            "offset" => offset = num(v)?,
            "q" => q = Some(num(v)?),
            "values" => {
                list = Some(
                    v.split(',')
                        .map(|x| num(x).map(|re| Complex64::new(re, 0.0)))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => return Err(Error::Format(format!("unknown generator parameter '{k}'"))),
        }
    }
    let gen = match kind {
        "cos_sqrt" => SeqGenerator::CosSqrt,
        "sqrt_abs_sin_pi_sqrt" => SeqGenerator::SqrtAbsSinPiSqrt,
        "inverse_plus_one" => SeqGenerator::InversePlusOne,
        "geometric" => {
            let q = q.ok_or_else(|| invalid("geometric generator needs q"))?;
            if !(q.abs() <= 1.0) {
                return Err(invalid(format!(
                    "geometric ratio must lie in [-1, 1], got {q}"
                )));
            }
            SeqGenerator::Geometric(q)
        }
        "finite" => SeqGenerator::FiniteSupport(
            list.ok_or_else(|| invalid("finite generator needs values"))?,
        ),
        other => return Err(Error::Format(format!("unknown generator kind '{other}'"))),
    };
    let len = match (&gen, len) {
        (_, Some(n)) => n,
        (SeqGenerator::FiniteSupport(v), None) => v.len(),
        (_, None) => DEFAULT_LEN,
    };
    let w = gen.window(len)?;
    Ok(if offset != 0.0 {
        w.offset(Complex64::new(-offset, 0.0))
    } else {
        w
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(SeqGenerator::CosSqrt.value(4).re, 2f64.cos());
        assert!(SeqGenerator::SqrtAbsSinPiSqrt.value(9).re < 1e-7);
        assert_eq!(SeqGenerator::Geometric(0.5).value(3).re, 0.125);
        assert_eq!(SeqGenerator::InversePlusOne.value(3).re, 0.25);
        for j in 0..5000 {
            let c = SeqGenerator::CosSqrt.value(j).re;
            let s = SeqGenerator::SqrtAbsSinPiSqrt.value(j).re;
            assert!((-1.0..=1.0).contains(&c));
            assert!((0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn tails() {
        let w = SeqGenerator::InversePlusOne.window(10).unwrap();
        assert_eq!(
            w.tail(),
            Tail::Limit {
                p: Complex64::new(0.0, 0.0),
                bound: Some(1.0 / 11.0)
            }
        );
        let f = SeqGenerator::FiniteSupport(vec![Complex64::new(1.0, 0.0); 3])
            .window(1)
            .unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.tail(), Tail::Zero);
        assert_eq!(
            SeqGenerator::CosSqrt.window(5).unwrap().tail(),
            Tail::Unknown
        );
    }

    #[test]
    fn parsing() {
        let w = parse_generator("generator:cos_sqrt?n=2000").unwrap();
        assert_eq!(w.len(), 2000);
        let g = parse_generator("generator:geometric?q=0.5&offset=1&n=40").unwrap();
        assert_eq!(g.values()[0].re, 2.0);
        assert_eq!(g.values()[3].re, 1.125);
        match g.tail() {
            Tail::Limit { p, bound } => {
                assert_eq!(p.re, 1.0);
                assert_eq!(bound, Some(0.5f64.powi(40)));
            }
            t => panic!("unexpected tail {t:?}"),
        }
        let d = parse_generator("generator:finite?values=0,0,0,1").unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.tail(), Tail::Zero);
        let d = parse_generator("generator:finite?values=1&n=3").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(
            parse_generator("generator:inverse_plus_one").unwrap().len(),
            DEFAULT_LEN
        );

        assert!(parse_generator("generator:geometric?n=5").is_err());
        assert!(parse_generator("generator:geometric?q=2").is_err());
        assert!(parse_generator("generator:nope").is_err());
        assert!(parse_generator("generator:cos_sqrt?n=x").is_err());
        assert!(parse_generator("generator:cos_sqrt?bogus=1").is_err());
        assert!(parse_generator("cos_sqrt").is_err());
        assert!(parse_generator("generator:cos_sqrt?n=0").is_err());
    }
}
