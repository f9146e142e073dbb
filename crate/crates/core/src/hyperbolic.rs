//! Von Dyck group numerics in the upper half-plane model.
//!
//! Matrices act by Mobius transformations `z -> (a z + b) / (c z + d)` and are
//! kept at determinant 1. Traces are taken up to sign.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Error;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    /// Rescales to determinant 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Error> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::OutOfRange(format!("determinant {det} is not positive")));
        }
        let s = det.sqrt();
        Ok(Isometry { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        Isometry {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn pow(&self, n: u32) -> Isometry {
        (0..n).fold(Isometry::identity(), |acc, _| acc.mul(self))
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// Equal to `+I` or `-I` entrywise within `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - s).abs() <= tol && self.b.abs() <= tol && self.c.abs() <= tol && (self.d - s).abs() <= tol
        };
        close(1.0) || close(-1.0)
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation(center: Complex64, angle: f64) -> Isometry {
        let (s, c) = (angle / 2.0).sin_cos();
        let rot = Isometry { a: c, b: s, c: -s, d: c };
        let y = center.im.sqrt();
        let t = Isometry { a: y, b: center.re / y, c: 0.0, d: 1.0 / y };
        t.mul(&rot).mul(&t.inverse())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IsometryClass {
    Elliptic { angle: f64 },
    Parabolic,
    Hyperbolic { length: f64 },
}

pub fn classify_isometry(m: &Isometry, tol: f64) -> IsometryClass {
    let t = m.trace().abs();
    if t < 2.0 - tol {
        IsometryClass::Elliptic { angle: 2.0 * (t / 2.0).acos() }
    } else if (t - 2.0).abs() <= tol {
        IsometryClass::Parabolic
    } else {
        IsometryClass::Hyperbolic { length: 2.0 * (t / 2.0).acosh() }
    }
}

pub fn hyperbolic_distance(z1: Complex64, z2: Complex64) -> f64 {
    (1.0 + (z1 - z2).norm_sqr() / (2.0 * z1.im * z2.im)).acosh()
}

/// Point at distance `r` from `i`, leaving `i` at angle `phi` from the upward vertical.
fn point_from_i(r: f64, phi: f64) -> Complex64 {
    let w = Complex64::from_polar((r / 2.0).tanh(), phi);
    Complex64::i() * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleGroupData {
    pub orders: (u32, u32, u32),
    /// Rotations by `2pi/p, 2pi/q, 2pi/r` about the vertices, with `A B C = +-I`.
    pub rotation_generators: (Isometry, Isometry, Isometry),
    pub vertices: (Complex64, Complex64, Complex64),
}

impl TriangleGroupData {
    pub fn area(&self) -> f64 {
        let (p, q, r) = self.orders;
        PI * (1.0 - 1.0 / p as f64 - 1.0 / q as f64 - 1.0 / r as f64)
    }

    pub fn generator(&self, i: usize) -> (Isometry, u32) {
        let (a, b, c) = self.rotation_generators;
        let (p, q, r) = self.orders;
        [(a, p), (b, q), (c, r)][i]
    }
}

fn check_pqr(p: u32, q: u32, r: u32) -> Result<(), Error> {
    if p < 2 || q < 2 || r < 2 {
        return Err(Error::OutOfRange("orders must be at least 2".into()));
    }
    // 1/p + 1/q + 1/r < 1  <=>  qr + pr + pq < pqr
    let (p, q, r) = (p as u64, q as u64, r as u64);
    if q * r + p * r + p * q >= p * q * r {
        return Err(Error::NotHyperbolic(format!("1/{p} + 1/{q} + 1/{r} >= 1")));
    }
    Ok(())
}

pub fn von_dyck_generators(p: u32, q: u32, r: u32) -> Result<TriangleGroupData, Error> {
    check_pqr(p, q, r)?;
    let (al, be, ga) = (PI / p as f64, PI / q as f64, PI / r as f64);
    // side lengths opposite each angle
    let side = |x: f64, y: f64, z: f64| ((x.cos() * y.cos() + z.cos()) / (x.sin() * y.sin())).acosh();
    let pq = side(al, be, ga);
    let pr = side(al, ga, be);
    let vp = Complex64::i();
    let vq = point_from_i(pq, 0.0);
    let vr = point_from_i(pr, al);
    for sign in [1.0, -1.0] {
        let a = Isometry::rotation(vp, sign * 2.0 * al);
        let b = Isometry::rotation(vq, sign * 2.0 * be);
        let c = Isometry::rotation(vr, sign * 2.0 * ga);
        if a.mul(&b).mul(&c).is_identity(1e-9) {
            return Ok(TriangleGroupData { orders: (p, q, r), rotation_generators: (a, b, c), vertices: (vp, vq, vr) });
        }
    }
    Err(Error::Assertion("rotation product is not the identity".into()))
}

/// `2 cos(2pi/7) + 1`, the least trace of a hyperbolic element in any von Dyck group.
pub fn trace_bound() -> f64 {
    2.0 * (2.0 * PI / 7.0).cos() + 1.0
}

/// Least translation length of a hyperbolic element in any von Dyck group.
pub fn delta_bound() -> f64 {
    2.0 * ((2.0 * PI / 7.0).cos() + 0.5).acosh()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceGapReport {
    pub orders: (u32, u32, u32),
    pub samples: usize,
    pub hyperbolic: usize,
    pub min_observed_trace: Option<f64>,
    pub min_translation_length: Option<f64>,
    pub violations: usize,
    pub tol: f64,
}

/// Random words of up to `max_word_len` syllables `g^e`, adjacent syllables in distinct generators.
pub fn verify_trace_gap<R: Rng>(
    p: u32,
    q: u32,
    r: u32,
    sample_budget: usize,
    max_word_len: usize,
    rng: &mut R,
) -> Result<TraceGapReport, Error> {
    let data = von_dyck_generators(p, q, r)?;
    let tol = DEFAULT_TOL;
    let bound = trace_bound();
    let mut report = TraceGapReport {
        orders: (p, q, r),
        samples: sample_budget,
        hyperbolic: 0,
        min_observed_trace: None,
        min_translation_length: None,
        violations: 0,
        tol,
    };
    for _ in 0..sample_budget {
        let len = rng.gen_range(1..=max_word_len.max(1));
        let mut m = Isometry::identity();
        let mut last = usize::MAX;
        for _ in 0..len {
            let mut g = rng.gen_range(0..3);
            while g == last {
                g = rng.gen_range(0..3);
            }
            last = g;
            let (gen, order) = data.generator(g);
            m = m.mul(&gen.pow(rng.gen_range(1..order)));
        }
        record(&mut report, &m, bound);
    }
    Ok(report)
}

fn record(report: &mut TraceGapReport, m: &Isometry, bound: f64) {
    if let IsometryClass::Hyperbolic { length } = classify_isometry(m, report.tol) {
        let t = m.trace().abs();
        report.hyperbolic += 1;
        if t < bound - report.tol {
            report.violations += 1;
        }
        if report.min_observed_trace.is_none_or(|x| t < x) {
            report.min_observed_trace = Some(t);
        }
        if report.min_translation_length.is_none_or(|x| length < x) {
            report.min_translation_length = Some(length);
        }
    }
}

/// Every syllable word of length at most `max_word_len`; returns the report and a word of least trace
/// as `(generator index, exponent)` pairs.
pub fn enumerate_trace_minimum(
    p: u32,
    q: u32,
    r: u32,
    max_word_len: usize,
) -> Result<(TraceGapReport, Vec<(usize, u32)>), Error> {
    let data = von_dyck_generators(p, q, r)?;
    let powers: Vec<Vec<Isometry>> =
        (0..3).map(|i| {
            let (g, o) = data.generator(i);
            (1..o).map(|e| g.pow(e)).collect()
        }).collect();
    let mut report = TraceGapReport {
        orders: (p, q, r),
        samples: 0,
        hyperbolic: 0,
        min_observed_trace: None,
        min_translation_length: None,
        violations: 0,
        tol: DEFAULT_TOL,
    };
    let mut best = Vec::new();
    let mut stack: Vec<(usize, u32)> = Vec::new();
    fn go(
        m: Isometry,
        last: usize,
        depth: usize,
        powers: &[Vec<Isometry>],
        stack: &mut Vec<(usize, u32)>,
        report: &mut TraceGapReport,
        best: &mut Vec<(usize, u32)>,
    ) {
        if depth == 0 {
            return;
        }
        for g in 0..3 {
            if g == last {
                continue;
            }
            for (e, pw) in powers[g].iter().enumerate() {
                let next = m.mul(pw);
                stack.push((g, e as u32 + 1));
                report.samples += 1;
                let before = report.min_observed_trace;
                record(report, &next, trace_bound());
                if report.min_observed_trace != before {
                    *best = stack.clone();
                }
                go(next, g, depth - 1, powers, stack, report, best);
                stack.pop();
            }
        }
    }
    go(Isometry::identity(), usize::MAX, max_word_len, &powers, &mut stack, &mut report, &mut best);
    Ok((report, best))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// `8 eps < delta`
    Displacement,
    /// `sinh(2 eps) <= sinh(delta/2) / sqrt 2`
    Sinh,
}

impl Binding {
    pub fn label(self) -> &'static str {
        match self {
            Binding::Displacement => "8ε < δ",
            Binding::Sinh => "sinh(2ε) ≤ sinh(δ/2)/√2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonWindow {
    pub eps_max: f64,
    pub binding: Binding,
    /// `delta / 8`, a strict upper bound.
    pub displacement_limit: f64,
    /// `arcsinh(sinh(delta/2)/sqrt 2) / 2`, attained.
    pub sinh_limit: f64,
}

impl EpsilonWindow {
    pub fn contains(&self, eps: f64) -> bool {
        eps > 0.0 && eps <= self.eps_max
    }

    /// Rechecks both constraints at `eps`; the displacement one strictly.
    pub fn feasible(&self, eps: f64) -> bool {
        let d = delta_bound();
        eps > 0.0 && 8.0 * eps < d && (2.0 * eps).sinh() <= (d / 2.0).sinh() / 2f64.sqrt()
    }
}

pub fn epsilon_window() -> EpsilonWindow {
    let d = delta_bound();
    let displacement_limit = d / 8.0;
    let sinh_limit = 0.5 * ((d / 2.0).sinh() / 2f64.sqrt()).asinh();
    let (eps_max, binding) = if displacement_limit <= sinh_limit {
        (displacement_limit, Binding::Displacement)
    } else {
        (sinh_limit, Binding::Sinh)
    };
    EpsilonWindow { eps_max, binding, displacement_limit, sinh_limit }
}

/// `C(eps) = 1 / (12 (2 + (4 eps + 2pi/(3 eps)) / delta))`.
pub fn von_dyck_gap_constant(eps: f64) -> Result<f64, Error> {
    let w = epsilon_window();
    if !w.contains(eps) {
        return Err(Error::OutOfRange(format!("eps = {eps} outside (0, {}]", w.eps_max)));
    }
    Ok(gap_constant_unchecked(eps))
}

fn gap_constant_unchecked(eps: f64) -> f64 {
    1.0 / (12.0 * (2.0 + (4.0 * eps + 2.0 * PI / (3.0 * eps)) / delta_bound()))
}

/// `(eps, C(eps))` just inside the window edge, where `C` is largest.
pub fn optimized_constant() -> (f64, f64) {
    let eps = epsilon_window().eps_max * (1.0 - 1e-9);
    (eps, gap_constant_unchecked(eps))
}

/// `r` with `sinh(t/2) = sinh(r) sin(theta/2)`.
pub fn elliptic_displacement_radius(theta: f64, t: f64) -> Result<f64, Error> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::OutOfRange(format!("theta = {theta} outside (0, pi]")));
    }
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("t = {t} is not positive")));
    }
    Ok(((t / 2.0).sinh() / (theta / 2.0).sin()).asinh())
}
