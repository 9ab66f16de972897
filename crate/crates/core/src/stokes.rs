//! Stokes geometry: level curves `Re Phi(z) = 0` with
//! `Phi(z) = int_tp^z sqrt(f(t)) dt`, `f = A_eps^2 - lambda^2`, emanating from
//! the two turning points.
//!
//! Near a simple zero `f ~ f'(tp) (z - tp)` so `Phi ~ (2/3) sqrt(f'(tp)) (z - tp)^{3/2}`
//! and the curves leave at the three angles where that is purely imaginary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::scalar::{phase_gap, sqrt_near, wrap_angle, Cx, Real};
use crate::turning::find_turning_points;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    StripBoundary,
    MaxLength,
    NearTurningPoint,
    StepFailure,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StripBoundary => "strip-boundary",
            Termination::MaxLength => "max-length",
            Termination::NearTurningPoint => "near-turning-point",
            Termination::StepFailure => "step-failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct StokesCurve<T> {
    /// Index into [`StokesGraph::turning_points`].
    #[serde(rename = "origin")]
    pub origin_index: usize,
    #[serde(rename = "angle")]
    pub initial_angle: T,
    /// Polyline from the origin outward; the origin itself is the first point.
    pub points: Vec<Cx<T>>,
    pub termination: Termination,
    pub arc_length: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct StokesGraph<T> {
    pub lambda: Cx<T>,
    pub eps: T,
    pub turning_points: Vec<Cx<T>>,
    pub curves: Vec<StokesCurve<T>>,
}

impl<T: Real> StokesGraph<T> {
    /// Curves from one turning point that end near the other one.
    pub fn connecting_curves(&self) -> impl Iterator<Item = &StokesCurve<T>> {
        self.curves.iter().filter(|c| {
            c.termination == Termination::NearTurningPoint
                && c.points.last().is_some_and(|end| {
                    self.turning_points
                        .iter()
                        .enumerate()
                        .any(|(i, tp)| i != c.origin_index && (*tp - *end).norm() < T::lit(NEAR_TP * 2.0))
                })
        })
    }
}

const DEGENERATE: f64 = 1e-8;
const STEP: f64 = 1e-3;
const PROJECT_EVERY: usize = 10;
const MAX_LENGTH: f64 = 20.0;
const NEAR_TP: f64 = 1e-3;
const FIRST_STEP: f64 = 1e-2;
const MEASURE_RADIUS: f64 = 1e-4;
const MEASURE_SAMPLES: usize = 720;
const PROJECTION_TOL: f64 = 1e-12;
const GL_NODES: usize = 20;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn f_and_df<T: Real>(problem: &Problem<T>, lambda: Cx<T>, z: Cx<T>) -> (Cx<T>, Cx<T>) {
    let (a, da) = problem.potential.eval_unchecked(z, problem.eps);
    (a * a - lambda * lambda, a * da * T::lit(2.0))
}

fn local_slope<T: Real>(problem: &Problem<T>, lambda: Cx<T>, tp: Cx<T>) -> Result<Cx<T>> {
    let (_, df) = f_and_df(problem, lambda, tp);
    if df.norm() <= T::lit(DEGENERATE) {
        return Err(Error::DegenerateTurningPoint { derivative: df.norm().as_f64() });
    }
    Ok(df)
}

/// Emanation angles predicted by the local model, sorted in `[0, 2pi)`.
pub fn stokes_directions<T: Real>(problem: &Problem<T>, lambda: Cx<T>, tp: Cx<T>) -> Result<[T; 3]> {
    let df = local_slope(problem, lambda, tp)?;
    let third = T::lit(1.0 / 3.0);
    let base = T::PI() * third - df.arg() * third;
    let step = T::lit(2.0) * T::PI() * third;
    let mut out = [0, 1, 2].map(|m| wrap_angle(base + step * T::lit(m as f64)));
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// `Phi(tp + d)` along the straight ray, with `t = tp + v^2 d` removing the
/// square-root endpoint. `root` fixes the branch: `sqrt(f) ~ v root` near `v = 0`.
/// Returns `Phi` and `sqrt(f)` at the end of the ray on that branch.
fn ray_phase<T: Real>(problem: &Problem<T>, lambda: Cx<T>, tp: Cx<T>, d: Cx<T>, root: Cx<T>) -> (Cx<T>, Cx<T>) {
    let mut sum = Cx::new(T::zero(), T::zero());
    for (v, w) in gauss_legendre(GL_NODES) {
        let v = T::lit(v);
        let (f, _) = f_and_df(problem, lambda, tp + d * (v * v));
        let q = sqrt_near(f, root * v);
        sum = sum + q * (T::lit(2.0) * v * T::lit(w));
    }
    let (f_end, _) = f_and_df(problem, lambda, tp + d);
    (sum * d, sqrt_near(f_end, root))
}

/// Angles in `[0, 2pi)` where `Re Phi` vanishes on a circle of radius `1e-4`
/// about `tp`: the emanation directions of the true level set, up to `O(radius)`.
pub fn measured_emanation_angles<T: Real>(problem: &Problem<T>, lambda: Cx<T>, tp: Cx<T>) -> Result<[T; 3]> {
    let df = local_slope(problem, lambda, tp)?;
    let rho = T::lit(MEASURE_RADIUS);
    let predicted = stokes_directions(problem, lambda, tp)?;
    // start halfway between two predicted zeros so the branch monodromy at
    // the end of the sweep does not sit on a zero
    let start = predicted[0] + T::PI() / T::lit(3.0);
    let two_pi = T::PI() + T::PI();
    let eval = |theta: T, prev_root: Cx<T>| {
        let d = Cx::from_polar(rho, theta);
        let root = sqrt_near(df * d, prev_root);
        (ray_phase(problem, lambda, tp, d, root).0.re, root)
    };
    let mut found = Vec::new();
    let (mut g_prev, mut r_prev) = eval(start, (df * Cx::from_polar(rho, start)).sqrt());
    let mut th_prev = start;
    for j in 1..MEASURE_SAMPLES {
        let th = start + two_pi * T::lit(j as f64 / MEASURE_SAMPLES as f64);
        let (g, r) = eval(th, r_prev);
        if g * g_prev < T::zero() {
            let (mut a, mut b, mut ga) = (th_prev, th, g_prev);
            for _ in 0..60 {
                let m = (a + b) * T::lit(0.5);
                let (gm, _) = eval(m, r_prev);
                if gm * ga <= T::zero() {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            found.push(wrap_angle((a + b) * T::lit(0.5)));
        }
        g_prev = g;
        r_prev = r;
        th_prev = th;
    }
    if found.len() != 3 {
        return Err(Error::StepFailure(format!("found {} level-set directions instead of 3", found.len())));
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok([found[0], found[1], found[2]])
}

/// Running state of the tracer: position, accumulated `Phi`, `sqrt(f)` on the
/// continued branch, and the unit tangent.
#[derive(Clone, Copy)]
struct Walker<T> {
    z: Cx<T>,
    phi: Cx<T>,
    q: Cx<T>,
    tangent: Cx<T>,
}

/// Simpson update of `Phi` along the chord `z0 -> z1`; returns `(dPhi, q1)`.
fn chord<T: Real>(problem: &Problem<T>, lambda: Cx<T>, z0: Cx<T>, q0: Cx<T>, z1: Cx<T>) -> (Cx<T>, Cx<T>) {
    let zm = (z0 + z1) * T::lit(0.5);
    let qm = sqrt_near(f_and_df(problem, lambda, zm).0, q0);
    let q1 = sqrt_near(f_and_df(problem, lambda, z1).0, qm);
    ((z1 - z0) * (q0 + qm * T::lit(4.0) + q1) / T::lit(6.0), q1)
}

/// Unit direction `i / sqrt(f)` oriented along `tangent`.
fn direction<T: Real>(problem: &Problem<T>, lambda: Cx<T>, z: Cx<T>, tangent: Cx<T>) -> Option<Cx<T>> {
    let (f, _) = f_and_df(problem, lambda, z);
    let s = f.sqrt();
    if !(s.norm() > T::zero()) || !s.norm().is_finite() {
        return None;
    }
    let g = Cx::new(T::zero(), T::one()) / s;
    let g = g / g.norm();
    Some(if (g * tangent.conj()).re >= T::zero() { g } else { -g })
}

/// Newton steps transverse to the curve until `Re Phi` is at rounding level.
fn project<T: Real>(problem: &Problem<T>, lambda: Cx<T>, w: &mut Walker<T>, max_move: T) -> bool {
    for _ in 0..4 {
        if w.phi.re.abs() < T::tol(PROJECTION_TOL) {
            return true;
        }
        let dz = -(w.q.conj() * w.phi.re) / w.q.norm_sqr();
        if !(dz.norm() <= max_move) {
            return false;
        }
        let (dphi, q1) = chord(problem, lambda, w.z, w.q, w.z + dz);
        w.z = w.z + dz;
        w.phi = w.phi + dphi;
        w.q = q1;
    }
    w.phi.re.abs() < T::tol(PROJECTION_TOL * 100.0)
}

/// Follows the level curve leaving `tp` at `angle`; `others` are the turning
/// points that end a curve when approached.
pub fn trace_stokes_line<T: Real>(
    problem: &Problem<T>,
    lambda: Cx<T>,
    tp: Cx<T>,
    angle: T,
    others: &[Cx<T>],
) -> Result<StokesCurve<T>> {
    let df = local_slope(problem, lambda, tp)?;
    let step = T::lit(STEP);
    let near = T::lit(NEAR_TP);
    let strip = problem.potential.strip_half_width;

    let e = Cx::from_polar(T::one(), angle);
    let d = e * T::lit(FIRST_STEP);
    let root = (df * d).sqrt();
    let (phi, q) = ray_phase(problem, lambda, tp, d, root);
    let mut w = Walker { z: tp + d, phi, q, tangent: e };
    let mut points = vec![tp];
    let mut length = T::lit(FIRST_STEP);
    let fail = |points: Vec<Cx<T>>, length: T| StokesCurve {
        origin_index: 0,
        initial_angle: angle,
        points,
        termination: Termination::StepFailure,
        arc_length: length,
    };
    if !project(problem, lambda, &mut w, step) {
        return Ok(fail(points, length));
    }
    points.push(w.z);

    let mut n = 0usize;
    let termination = loop {
        if w.z.im.abs() >= strip - step {
            break Termination::StripBoundary;
        }
        if length >= T::lit(MAX_LENGTH) {
            break Termination::MaxLength;
        }
        let dist = others.iter().map(|o| (*o - w.z).norm()).fold(T::infinity(), T::min);
        if dist < near {
            break Termination::NearTurningPoint;
        }
        // shorten the last steps so the stop radius is not jumped over
        let ds = step.min((dist - near * T::lit(0.9)).max(step * T::lit(1e-2)));

        let rk = |z: Cx<T>, t: Cx<T>| direction(problem, lambda, z, t);
        let Some(k1) = rk(w.z, w.tangent) else { break Termination::StepFailure };
        let Some(k2) = rk(w.z + k1 * (ds * T::lit(0.5)), k1) else { break Termination::StepFailure };
        let Some(k3) = rk(w.z + k2 * (ds * T::lit(0.5)), k2) else { break Termination::StepFailure };
        let Some(k4) = rk(w.z + k3 * ds, k3) else { break Termination::StepFailure };
        let dz = (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (ds / T::lit(6.0));
        let z1 = w.z + dz;
        let (dphi, q1) = chord(problem, lambda, w.z, w.q, z1);
        if phase_gap(q1, w.q) > T::FRAC_PI_2() {
            break Termination::StepFailure;
        }
        w = Walker { z: z1, phi: w.phi + dphi, q: q1, tangent: dz / dz.norm() };
        length = length + ds;
        n += 1;
        if n % PROJECT_EVERY == 0 {
            if !project(problem, lambda, &mut w, step) {
                break Termination::StepFailure;
            }
            points.push(w.z);
        }
    };
    if points.last() != Some(&w.z) {
        points.push(w.z);
    }
    Ok(StokesCurve { origin_index: 0, initial_angle: angle, points, termination, arc_length: length })
}

/// `max |Re Phi|` over the polyline, with `Phi` recomputed independently by
/// Gauss-Legendre on each chord (the first chord by the ray substitution).
pub fn level_set_drift<T: Real>(problem: &Problem<T>, lambda: Cx<T>, curve: &StokesCurve<T>) -> T {
    let pts = &curve.points;
    if pts.len() < 2 {
        return T::zero();
    }
    let tp = pts[0];
    let Ok(df) = local_slope(problem, lambda, tp) else { return T::infinity() };
    let d = pts[1] - tp;
    let (mut phi, mut q) = ray_phase(problem, lambda, tp, d, (df * d).sqrt());
    let mut worst = phi.re.abs();
    let nodes = gauss_legendre(8);
    for pair in pts[1..].windows(2) {
        let (z0, z1) = (pair[0], pair[1]);
        let mut sum = Cx::new(T::zero(), T::zero());
        let mut qr = q;
        for &(v, wgt) in &nodes {
            let t = z0 + (z1 - z0) * T::lit(v);
            qr = sqrt_near(f_and_df(problem, lambda, t).0, qr);
            sum = sum + qr * T::lit(wgt);
        }
        phi = phi + sum * (z1 - z0);
        q = sqrt_near(f_and_df(problem, lambda, z1).0, qr);
        worst = worst.max(phi.re.abs());
    }
    worst
}

/// Both turning points with three traced curves each.
pub fn build_graph<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<StokesGraph<T>> {
    let pair = find_turning_points(problem, lambda)?;
    let tps = vec![pair.alpha, pair.beta];
    let mut curves = Vec::with_capacity(6);
    for (i, &tp) in tps.iter().enumerate() {
        let others: Vec<_> = tps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| *z).collect();
        for angle in stokes_directions(problem, lambda, tp)? {
            let mut c = trace_stokes_line(problem, lambda, tp, angle, &others)?;
            c.origin_index = i;
            curves.push(c);
        }
    }
    Ok(StokesGraph { lambda, eps: problem.eps, turning_points: tps, curves })
}
