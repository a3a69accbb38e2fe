//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel carries a 20-point rule on the whole panel and on both halves.
//! The refined value is the sum of the halves, the error estimate is the
//! difference to the coarse value. The panel with the largest estimate is
//! bisected until the summed estimate meets the tolerance or the panel budget
//! runs out. Nodes and weights are held in double-double precision so the
//! rule itself contributes no `f64` rounding when the integrand is evaluated
//! in [`Dd`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::dd::Dd;

const ORDER: usize = 20;

/// Values the integrator can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> {
    /// Relative rounding unit of the representation.
    const EPS: f64;
    fn zero() -> Self;
    fn scale(self, w: Dd) -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    const EPS: f64 = f64::EPSILON;
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn scale(self, w: Dd) -> Self {
        self * w.to_f64()
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    const EPS: f64 = f64::EPSILON;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn scale(self, w: Dd) -> Self {
        self * w.to_f64()
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl QuadValue for Dd {
    const EPS: f64 = 1e-31;
    fn zero() -> Self {
        Dd::ZERO
    }
    #[inline]
    fn scale(self, w: Dd) -> Self {
        self * w
    }
    fn magnitude(self) -> f64 {
        self.abs().to_f64()
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn real(re: Dd) -> Self {
        DdComplex { re, im: Dd::ZERO }
    }

    pub fn from_c64(c: Complex64) -> Self {
        DdComplex {
            re: Dd::from_f64(c.re),
            im: Dd::from_f64(c.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Product with a real double-double.
    pub fn mul_real(self, x: Dd) -> Self {
        DdComplex {
            re: self.re * x,
            im: self.im * x,
        }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl QuadValue for DdComplex {
    const EPS: f64 = 1e-31;
    fn zero() -> Self {
        DdComplex::default()
    }
    #[inline]
    fn scale(self, w: Dd) -> Self {
        self.mul_real(w)
    }
    fn magnitude(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

struct Rule {
    nodes: Vec<Dd>,
    weights: Vec<Dd>,
}

/// Legendre `P_n(x)` and `P_{n-1}(x)` by recurrence.
fn legendre_pair(n: usize, x: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ONE;
    let mut p1 = x;
    for k in 1..n {
        let kd = Dd::from_f64(k as f64);
        let p2 = (Dd::from_f64(2.0 * k as f64 + 1.0) * x * p1 - kd * p0) / (kd + Dd::ONE);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn build_rule(n: usize) -> Rule {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nd = Dd::from_f64(n as f64);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Dd::from_f64(guess);
        for _ in 0..12 {
            let (p, pm1) = legendre_pair(n, x);
            let dp = nd * (x * p - pm1) / (x * x - Dd::ONE);
            let dx = p / dp;
            x -= dx;
            if dx.to_f64().abs() < 1e-33 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        let dp = nd * (x * p - pm1) / (x * x - Dd::ONE);
        let w = Dd::from_f64(2.0) / ((Dd::ONE - x * x) * dp * dp);
        nodes.push(x);
        weights.push(w);
    }
    Rule { nodes, weights }
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| build_rule(ORDER))
}

/// A closed interval `[a, b]` used to seed the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
}

impl Panel {
    pub fn new(a: f64, b: f64) -> Self {
        Panel { a, b }
    }

    /// `[a, b]` cut into `k` equal panels.
    pub fn split(a: f64, b: f64, k: usize) -> Vec<Panel> {
        let k = k.max(1);
        let h = (b - a) / k as f64;
        (0..k)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == k {
                    b
                } else {
                    a + h * (i + 1) as f64
                };
                Panel::new(lo, hi)
            })
            .collect()
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<V> {
    pub value: V,
    pub abs_err: f64,
    pub converged: bool,
    pub panels: usize,
}

fn apply<V: QuadValue, F: Fn(Dd) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let r = rule();
    let half = (Dd::from_f64(b) - Dd::from_f64(a)) * Dd::from_f64(0.5);
    let mid = (Dd::from_f64(a) + Dd::from_f64(b)) * Dd::from_f64(0.5);
    let mut acc = V::zero();
    let mut acc_abs = 0.0;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        let fx = f(mid + half * *x);
        acc = acc + fx.scale(*w);
        acc_abs += fx.magnitude() * w.to_f64();
    }
    (acc.scale(half), acc_abs * half.to_f64().abs())
}

struct Segment<V> {
    a: f64,
    b: f64,
    left: V,
    right: V,
    err: f64,
    abs_content: f64,
}

impl<V: QuadValue> Segment<V> {
    fn evaluate<F: Fn(Dd) -> V>(f: &F, a: f64, b: f64, whole: V) -> Self {
        let m = 0.5 * (a + b);
        let (left, abs_l) = apply(f, a, m);
        let (right, abs_r) = apply(f, m, b);
        let err = (whole - (left + right)).magnitude();
        Segment {
            a,
            b,
            left,
            right,
            err,
            abs_content: abs_l + abs_r,
        }
    }

    fn value(&self) -> V {
        self.left + self.right
    }

    fn roundoff(&self) -> f64 {
        50.0 * V::EPS * self.abs_content
    }
}

struct ByErr<V>(Segment<V>);

impl<V> PartialEq for ByErr<V> {
    fn eq(&self, o: &Self) -> bool {
        self.0.err.total_cmp(&o.0.err) == Ordering::Equal
    }
}
impl<V> Eq for ByErr<V> {}
impl<V> PartialOrd for ByErr<V> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<V> Ord for ByErr<V> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.err.total_cmp(&o.0.err)
    }
}

/// Integrates `f` over the union of `initial` panels.
///
/// Stops when the summed error estimate is at most
/// `max(abs_tol, rel_tol * |value|)`, when the worst panel is already at its
/// rounding floor, or when `max_panels` panels exist (not converged).
pub fn integrate<V, F>(
    f: F,
    initial: &[Panel],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Integral<V>
where
    V: QuadValue,
    F: Fn(Dd) -> V,
{
    let mut heap: BinaryHeap<ByErr<V>> = BinaryHeap::new();
    for p in initial.iter().filter(|p| p.b > p.a) {
        let (whole, _) = apply(&f, p.a, p.b);
        heap.push(ByErr(Segment::evaluate(&f, p.a, p.b, whole)));
    }
    let mut panels = heap.len();
    let mut converged = true;

    loop {
        let (total, total_err) = sum(&heap);
        let target = abs_tol.max(rel_tol * total.magnitude());
        if total_err <= target {
            break;
        }
        let Some(ByErr(worst)) = heap.pop() else {
            break;
        };
        let width = worst.b - worst.a;
        let at_floor = worst.err <= worst.roundoff();
        let too_narrow = width <= 1e-13 * worst.a.abs().max(worst.b.abs()).max(1e-300);
        if at_floor || too_narrow || panels >= max_panels {
            converged = at_floor && !too_narrow && panels < max_panels;
            heap.push(ByErr(worst));
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        heap.push(ByErr(Segment::evaluate(&f, worst.a, m, worst.left)));
        heap.push(ByErr(Segment::evaluate(&f, m, worst.b, worst.right)));
        panels += 1;
    }

    let (value, abs_err) = sum(&heap);
    Integral {
        value,
        abs_err,
        converged,
        panels,
    }
}

fn sum<V: QuadValue>(heap: &BinaryHeap<ByErr<V>>) -> (V, f64) {
    // Sorting by position keeps the summation order independent of heap layout.
    let mut segs: Vec<&Segment<V>> = heap.iter().map(|s| &s.0).collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter().fold((V::zero(), 0.0), |(v, e), s| {
        (v + s.value(), e + s.err.max(s.roundoff()))
    })
}
