//! Shooting solver: eigenvalues as zeros of the Wronskian of the solutions
//! decaying at `-inf` and `+inf`.
//!
//! The system `L_eps u = lambda u` is `u' = M u / h` with
//! `M = [[-i lambda, A_eps], [A_eps, i lambda]]`. `M` has eigenvalues
//! `±kappa`, `kappa = sqrt(A_eps^2 - lambda^2)` (principal branch), with
//! eigenvectors `(A_eps, i lambda ± kappa)`. Seeds are these unnormalized
//! eigenvectors, so the Wronskian is analytic in `lambda`; only their
//! magnitude is split off into a real log scale.

use serde::{Deserialize, Serialize};

use crate::action::{action_derivative, reference_action};
use crate::error::{Error, Result};
use crate::ode::{integrate_linear, Mat2, StepControl, Vec2};
use crate::potential::SymmetryClass;
use crate::problem::Problem;
use crate::quantize::{select_branch, EigenvalueRecord, Method};
use crate::scalar::{cx, re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    FromLeft,
    FromRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct BoundaryData<T> {
    pub x_cut: T,
    pub direction: Direction,
    /// Unit vector.
    pub seed_vector: Vec2<T>,
    pub log_scale: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct WronskianSample<T> {
    pub lambda: Cx<T>,
    /// Determinant of the two unit solution vectors at the matching point.
    pub w_value: Cx<T>,
    pub log_scale: T,
}

impl<T: Real> WronskianSample<T> {
    /// `W(other) / W(self)` without forming either magnitude.
    pub fn ratio(&self, other: &WronskianSample<T>) -> Cx<T> {
        other.w_value / self.w_value * (other.log_scale - self.log_scale).exp()
    }

    /// `ln |W|`.
    pub fn log_abs(&self) -> T {
        self.w_value.norm().ln() + self.log_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ZeroCount<T> {
    /// Lower-left and upper-right corners of the rectangle actually used.
    pub rectangle: (Cx<T>, Cx<T>),
    pub winding: i64,
    pub samples_on_boundary: usize,
}

/// Complex-window spectrum with its completeness certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum<T> {
    pub records: Vec<EigenvalueRecord<T>>,
    pub zero_count: ZeroCount<T>,
    /// Zeros counted by the winding number but not found by Newton.
    pub missed: i64,
}

impl<T> ComplexSpectrum<T> {
    pub fn is_complete(&self) -> bool {
        self.missed == 0 && self.zero_count.winding == self.records.len() as i64
    }
}

const MIN_STEP: f64 = 1e-13;
const BOUNDARY_MIN_W: f64 = 1e-8;
const INFLATIONS: usize = 3;
const SAMPLE_CAP: usize = 1 << 16;
const INITIAL_SIDE_SAMPLES: usize = 16;
const NEWTON_CAP: usize = 50;
const DISTINCT: f64 = 1e-9;
const ROOT_CAP: usize = 300;

fn step_control<T: Real>(problem: &Problem<T>) -> StepControl<T> {
    StepControl {
        rtol: problem.tol.ode_rtol,
        atol: problem.tol.ode_atol,
        max_step: problem.h * problem.tol.ode_max_step_over_h,
        min_step: T::lit(MIN_STEP),
    }
}

fn field<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> impl Fn(T) -> Mat2<T> + '_ {
    let inv_h = T::one() / problem.h;
    let d = cx(T::zero(), -inv_h) * lambda;
    move |x| {
        let a = problem.potential.eval_real(x, problem.eps) * inv_h;
        [[d, a], [a, -d]]
    }
}

/// Decaying seed at the problem's cutoff on the given side.
pub fn boundary_seed<T: Real>(problem: &Problem<T>, lambda: Cx<T>, direction: Direction) -> Result<BoundaryData<T>> {
    let x_cut = match direction {
        Direction::FromLeft => problem.left_cut,
        Direction::FromRight => problem.right_cut,
    };
    boundary_seed_at(problem, lambda, direction, x_cut)
}

/// Decaying seed at an explicit cutoff.
pub fn boundary_seed_at<T: Real>(
    problem: &Problem<T>,
    lambda: Cx<T>,
    direction: Direction,
    x_cut: T,
) -> Result<BoundaryData<T>> {
    let a = problem.potential.eval_real(x_cut, problem.eps);
    let kappa = (a * a - lambda * lambda).sqrt();
    if kappa.re <= T::tol(1e-8) * T::one().max(lambda.norm()) {
        return Err(Error::InsideWell { x: x_cut.as_f64() });
    }
    let il = cx(T::zero(), T::one()) * lambda;
    let second = match direction {
        Direction::FromLeft => il + kappa,
        Direction::FromRight => il - kappa,
    };
    let n = (a.norm_sqr() + second.norm_sqr()).sqrt();
    Ok(BoundaryData { x_cut, direction, seed_vector: [a / n, second / n], log_scale: n.ln() })
}

/// Carries the boundary data to `x_target`; returns the unit vector and log scale.
pub fn integrate<T: Real>(
    problem: &Problem<T>,
    lambda: Cx<T>,
    data: &BoundaryData<T>,
    x_target: T,
) -> Result<(Vec2<T>, T)> {
    let (u, ls, _) = integrate_linear(
        field(problem, lambda),
        data.x_cut,
        x_target,
        data.seed_vector,
        data.log_scale,
        &step_control(problem),
    )?;
    Ok((u, ls))
}

pub fn wronskian<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<WronskianSample<T>> {
    let left = boundary_seed(problem, lambda, Direction::FromLeft)?;
    let right = boundary_seed(problem, lambda, Direction::FromRight)?;
    let (ul, ll) = integrate(problem, lambda, &left, problem.match_point)?;
    let (ur, lr) = integrate(problem, lambda, &right, problem.match_point)?;
    Ok(WronskianSample { lambda, w_value: ul[0] * ur[1] - ul[1] * ur[0], log_scale: ll + lr })
}

/// Index attached to a direct eigenvalue: nearest `k` on the reference action.
fn index_for<T: Real>(problem: &Problem<T>, lambda: T) -> Option<i64> {
    let branch = select_branch(&problem.a1);
    let i = reference_action(problem, lambda).ok()?.value.re;
    let shift: T = branch.offset(0);
    (i / (T::PI() * problem.h) - shift).round().to_i64()
}

fn record<T: Real>(problem: &Problem<T>, lambda: Cx<T>, residual: T, fallback_k: i64) -> EigenvalueRecord<T> {
    EigenvalueRecord {
        lambda,
        k: index_for(problem, lambda.re).unwrap_or(fallback_k),
        branch: select_branch(&problem.a1),
        method: Method::Direct,
        residual,
        h: problem.h,
        eps: problem.eps,
    }
}

/// Grid step of the real scan.
pub fn scan_step<T: Real>(problem: &Problem<T>) -> Result<T> {
    let reference = problem.with_eps(T::zero());
    let di = action_derivative(&reference, re(problem.lambda0))?.re;
    let h = problem.h;
    Ok((h / T::lit(10.0)).min(T::PI() * h / (T::lit(8.0) * di)))
}

/// Real eigenvalues in the problem's window.
pub fn direct_spectrum_real<T: Real>(problem: &Problem<T>) -> Result<Vec<EigenvalueRecord<T>>> {
    let (lo, hi) = problem.window();
    direct_spectrum_real_on(problem, lo, hi)
}

/// Real eigenvalues in `[lo, hi]`, which may extend past the window.
pub fn direct_spectrum_real_on<T: Real>(problem: &Problem<T>, lo: T, hi: T) -> Result<Vec<EigenvalueRecord<T>>> {
    if problem.eps > T::zero() && problem.symmetry == SymmetryClass::None {
        return Err(Error::SymmetryRequired);
    }
    let step = scan_step(problem)?;
    let n = ((hi - lo) / step).ceil().to_usize().unwrap_or(1).max(1);
    let dl = (hi - lo) / T::lit(n as f64);
    let pi = T::PI();
    let limit = T::FRAC_PI_4();

    // W stays on a slowly turning line through 0 for real lambda; follow the
    // line angle mod pi and read signs off the aligned value.
    let mut prev: Option<(T, WronskianSample<T>, T)> = None;
    let mut roots = Vec::new();
    for j in 0..=n {
        let l = lo + dl * T::lit(j as f64);
        let s = wronskian(problem, re(l))?;
        let arg = s.w_value.arg();
        let theta = match &prev {
            None => arg,
            Some((_, _, th)) => {
                let mut d = (arg - *th) % pi;
                if d > pi / T::lit(2.0) {
                    d = d - pi;
                } else if d < -pi / T::lit(2.0) {
                    d = d + pi;
                }
                if d.abs() > limit {
                    return Err(Error::PhaseTrackingLost { lambda: l.as_f64() });
                }
                *th + d
            }
        };
        if let Some((lp, sp, thp)) = &prev {
            let ga = (sp.w_value * Cx::from_polar(T::one(), -*thp)).re;
            let gb = (s.w_value * Cx::from_polar(T::one(), -*thp)).re;
            if ga == T::zero() {
                roots.push((*lp, sp.w_value.norm()));
            } else if ga * gb < T::zero() {
                roots.push(refine_real_root(problem, *lp, l, sp, &s, *thp)?);
            }
        }
        prev = Some((l, s, theta));
    }
    if let Some((l, s, _)) = prev {
        if s.w_value == Cx::new(T::zero(), T::zero()) {
            roots.push((l, T::zero()));
        }
    }
    Ok(roots.iter().enumerate().map(|(i, &(l, r))| record(problem, re(l), r, i as i64)).collect())
}

/// Illinois regula falsi with periodic bisection on the phase-aligned Wronskian.
fn refine_real_root<T: Real>(
    problem: &Problem<T>,
    a0: T,
    b0: T,
    sa: &WronskianSample<T>,
    sb: &WronskianSample<T>,
    theta: T,
) -> Result<(T, T)> {
    let rot = Cx::from_polar(T::one(), -theta);
    let base = sa.log_scale;
    let g = |s: &WronskianSample<T>| (s.w_value * rot).re * (s.log_scale - base).exp();
    let (mut a, mut b) = (a0, b0);
    let (mut ga, mut gb) = (g(sa), g(sb));
    let mut wa = sa.w_value.norm();
    let mut wb = sb.w_value.norm();
    let mut side = 0i8;
    let tol = problem.tol.root_interval;
    for it in 0..ROOT_CAP {
        if b - a < tol {
            break;
        }
        let half = T::lit(0.5);
        let mut c = if it % 4 == 3 { (a + b) * half } else { (a * gb - b * ga) / (gb - ga) };
        if !(c > a && c < b) {
            c = (a + b) * half;
        }
        let sc = wronskian(problem, re(c))?;
        let gc = g(&sc);
        if gc == T::zero() {
            return Ok((c, sc.w_value.norm()));
        }
        if gc * ga < T::zero() {
            b = c;
            gb = gc;
            wb = sc.w_value.norm();
            if side == -1 {
                ga = ga * half;
            }
            side = -1;
        } else {
            a = c;
            ga = gc;
            wa = sc.w_value.norm();
            if side == 1 {
                gb = gb * half;
            }
            side = 1;
        }
    }
    Ok(((a + b) * T::lit(0.5), wa.min(wb)))
}

/// Counterclockwise boundary point at perimeter parameter `t` in `[0, 4)`.
fn boundary_point<T: Real>(lo: Cx<T>, hi: Cx<T>, t: T) -> Cx<T> {
    let side = t.floor().to_usize().unwrap_or(0).min(3);
    let f = t - T::lit(side as f64);
    match side {
        0 => cx(lo.re + (hi.re - lo.re) * f, lo.im),
        1 => cx(hi.re, lo.im + (hi.im - lo.im) * f),
        2 => cx(hi.re - (hi.re - lo.re) * f, hi.im),
        _ => cx(lo.re, hi.im - (hi.im - lo.im) * f),
    }
}

/// Winding number of `W` around the rectangle with corners `lo` (lower left)
/// and `hi` (upper right).
pub fn count_zeros<T: Real>(problem: &Problem<T>, rectangle: (Cx<T>, Cx<T>)) -> Result<ZeroCount<T>> {
    let (mut lo, mut hi) = rectangle;
    for _ in 0..=INFLATIONS {
        match wind(problem, lo, hi) {
            Ok(Some(count)) => return Ok(count),
            Ok(None) => {
                let c = (lo + hi) * T::lit(0.5);
                let grow = T::lit(1.01);
                lo = c + (lo - c) * grow;
                hi = c + (hi - c) * grow;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryZero)
}

/// Samples per side so that the initial phase steps are about `pi/4`. Along
/// the real direction `arg W` turns at roughly `|I'(lambda)| / h`; the action
/// derivative at the window edges and centre gives the rate.
fn side_samples<T: Real>(problem: &Problem<T>, lo: Cx<T>, hi: Cx<T>) -> usize {
    let rate = [lo.re, (lo.re + hi.re) * T::lit(0.5), hi.re]
        .into_iter()
        .filter_map(|x| action_derivative(problem, cx(x, T::zero())).ok())
        .map(|d| d.norm())
        .fold(T::zero(), T::max)
        / problem.h;
    let side = (hi.re - lo.re).max(hi.im - lo.im);
    let n = (side * rate / T::FRAC_PI_4()).ceil().to_usize().unwrap_or(0);
    n.clamp(INITIAL_SIDE_SAMPLES, SAMPLE_CAP / 8)
}

/// `Ok(None)` when a boundary sample is too close to a zero.
fn wind<T: Real>(problem: &Problem<T>, lo: Cx<T>, hi: Cx<T>) -> Result<Option<ZeroCount<T>>> {
    let floor = T::lit(BOUNDARY_MIN_W);
    let sample = |t: T| -> Result<Option<Cx<T>>> {
        let w = wronskian(problem, boundary_point(lo, hi, t))?.w_value;
        Ok(if w.norm() > floor { Some(w / w.norm()) } else { None })
    };
    let per_side = side_samples(problem, lo, hi);
    let n0 = 4 * per_side;
    let mut pts: Vec<(T, Cx<T>)> = Vec::with_capacity(n0 + 1);
    for j in 0..=n0 {
        let t = T::lit(4.0 * j as f64 / n0 as f64);
        let w = if j == n0 { pts[0].1 } else { match sample(t)? { Some(w) => w, None => return Ok(None) } };
        pts.push((t, w));
    }
    let quarter = T::FRAC_PI_2();
    loop {
        let mut refined = Vec::with_capacity(pts.len() * 2);
        let mut changed = false;
        for pair in pts.windows(2) {
            refined.push(pair[0]);
            if (pair[1].1 * pair[0].1.conj()).arg().abs() >= quarter {
                let t = (pair[0].0 + pair[1].0) * T::lit(0.5);
                match sample(t)? {
                    Some(w) => refined.push((t, w)),
                    None => return Ok(None),
                }
                changed = true;
            }
        }
        refined.push(pts[pts.len() - 1]);
        pts = refined;
        if pts.len() > SAMPLE_CAP {
            return Err(Error::PhaseResolution { samples: pts.len() });
        }
        if !changed {
            break;
        }
    }
    let total = pts.windows(2).fold(T::zero(), |acc, p| acc + (p[1].1 * p[0].1.conj()).arg());
    let turns = total / (T::PI() + T::PI());
    let winding = turns.round();
    if (turns - winding).abs() >= T::lit(0.1) {
        return Err(Error::PhaseResolution { samples: pts.len() - 1 });
    }
    Ok(Some(ZeroCount { rectangle: (lo, hi), winding: winding.to_i64().unwrap_or(0), samples_on_boundary: pts.len() - 1 }))
}

/// Damped Newton on `W` with a central-difference derivative.
pub fn newton_w<T: Real>(problem: &Problem<T>, seed: Cx<T>) -> Result<(Cx<T>, T)> {
    let d = problem.tol.newton_fd_step;
    let tol = problem.tol.root_interval;
    let mut lambda = seed;
    let mut s = wronskian(problem, lambda)?;
    for _ in 0..NEWTON_CAP {
        let plus = wronskian(problem, lambda + d)?;
        let minus = wronskian(problem, lambda - d)?;
        // W'/W from ratios, so neither magnitude is ever formed
        let dlog = (s.ratio(&plus) - s.ratio(&minus)) / (d + d);
        let mut step = dlog.inv();
        if !step.norm().is_finite() {
            return Err(Error::NoConvergence { stage: "Wronskian Newton", iterations: 0 });
        }
        let mut accepted = None;
        for _ in 0..12 {
            let cand = wronskian(problem, lambda - step)?;
            if cand.log_abs() < s.log_abs() || step.norm() < tol {
                accepted = Some(cand);
                break;
            }
            step = step * T::lit(0.5);
        }
        let Some(next) = accepted else {
            return Err(Error::NoConvergence { stage: "Wronskian Newton", iterations: NEWTON_CAP });
        };
        lambda = lambda - step;
        s = next;
        if step.norm() < tol {
            return Ok((lambda, s.w_value.norm()));
        }
    }
    Err(Error::NoConvergence { stage: "Wronskian Newton", iterations: NEWTON_CAP })
}

/// Follows a real `eps = 0` root to the problem's `eps` by continuation with a
/// linear predictor. A step is rejected when the corrected root lands farther
/// than `reach` from the prediction, which keeps the track on one level.
pub fn track_root<T: Real>(problem: &Problem<T>, seed: Cx<T>, reach: T) -> Result<(Cx<T>, T)> {
    let target = problem.eps;
    if target == T::zero() {
        return newton_w(problem, seed);
    }
    let min_step = target / T::lit(4096.0);
    let (mut e, mut z, mut resid) = (T::zero(), seed, T::zero());
    let mut velocity = Cx::new(T::zero(), T::zero());
    let mut de = target / T::lit(4.0);
    while e < target {
        let step = de.min(target - e);
        let predicted = z + velocity * step;
        match newton_w(&problem.with_eps(e + step), predicted) {
            Ok((zn, r)) if (zn - predicted).norm() <= reach => {
                velocity = (zn - z) / step;
                z = zn;
                resid = r;
                e = e + step;
                de = (de * T::lit(1.5)).min(target / T::lit(4.0));
            }
            _ => {
                de = de * T::lit(0.5);
                if de < min_step {
                    return Err(Error::NoConvergence { stage: "eps continuation", iterations: 0 });
                }
            }
        }
    }
    Ok((z, resid))
}

/// Complex eigenvalues in the window rectangle, seeded from the `eps = 0`
/// real spectrum and certified by the argument principle.
pub fn direct_spectrum_complex<T: Real>(problem: &Problem<T>) -> Result<ComplexSpectrum<T>> {
    let (lo, hi) = problem.window();
    let pad = problem.delta * T::lit(0.1);
    let reference = problem.with_eps(T::zero());
    let seeds = direct_spectrum_real_on(&reference, lo - pad, hi + pad)?;
    let ih = problem.im_half_height;
    let inside = |z: Cx<T>| z.re >= lo && z.re <= hi && z.im.abs() <= ih;

    let mut found: Vec<(Cx<T>, T)> = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        let gap = |j: Option<&EigenvalueRecord<T>>| j.map(|r| (r.lambda - seed.lambda).norm()).unwrap_or(problem.delta);
        let spacing = gap(i.checked_sub(1).and_then(|j| seeds.get(j))).min(gap(seeds.get(i + 1)));
        if let Ok((z, r)) = track_root(problem, seed.lambda, spacing * T::lit(0.25)) {
            if inside(z) && found.iter().all(|f| (f.0 - z).norm() > T::lit(DISTINCT)) {
                found.push((z, r));
            }
        }
    }
    let zero_count = count_zeros(problem, (cx(lo, -ih), cx(hi, ih)))?;
    found.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap_or(std::cmp::Ordering::Equal));
    let records: Vec<_> = found.iter().enumerate().map(|(i, &(z, r))| record(problem, z, r, i as i64)).collect();
    let missed = (zero_count.winding - records.len() as i64).max(0);
    Ok(ComplexSpectrum { records, zero_count, missed })
}
