//! The action integral `I(lambda, eps) = int_alpha^beta sqrt(lambda^2 - A_eps(t)^2) dt`
//! and its `lambda`-derivative.
//!
//! The path is the straight segment from `alpha_eps` to `beta_eps`. With
//! `t = m + r cos(theta)` (midpoint `m`, half-chord `r`) the radicand factors
//! as `(1 - s^2) p(s)`, `s = cos(theta)`, where `p` has no zeros on `[-1, 1]`.
//! Hence
//!
//! ```text
//! I      = r       int_0^pi sin^2(theta) sqrt(p(cos theta)) dtheta
//! dI/dl  = l r     int_0^pi 1 / sqrt(p(cos theta)) dtheta
//! ```
//!
//! Both integrands are smooth, even and `2pi`-periodic in `theta`, so the
//! trapezoidal rule on the Chebyshev-Lobatto angles converges spectrally. The
//! branch of `sqrt(p)` is the principal one at the midpoint (positive when
//! `eps = 0` and `lambda` is real) and is continued node by node toward both
//! endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::SymmetryClass;
use crate::problem::Problem;
use crate::scalar::{phase_gap, re, sqrt_near, Cx, Real};
use crate::turning::{find_turning_points, TurningPointPair, COLLISION_DISTANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ActionValue<T> {
    pub value: Cx<T>,
    pub dvalue_dlambda: Cx<T>,
    /// Difference between the last two quadrature levels.
    pub quad_error_estimate: T,
    pub nodes_used: usize,
    pub turning_points: TurningPointPair<T>,
}

/// One trapezoid sweep with `n` intervals: returns `(I, dI/dlambda)`.
fn sweep<T: Real>(problem: &Problem<T>, pair: &TurningPointPair<T>, n: usize) -> Result<(Cx<T>, Cx<T>)> {
    Ok(sweep_cond(problem, pair, n)?.0)
}

/// As [`sweep`], also returning the cancellation factor `|lambda^2| / |p|` at
/// the midpoint, which bounds the attainable relative accuracy.
fn sweep_cond<T: Real>(problem: &Problem<T>, pair: &TurningPointPair<T>, n: usize) -> Result<((Cx<T>, Cx<T>), T)> {
    debug_assert!(n >= 2 && n % 2 == 0);
    let lambda = pair.lambda;
    let lam2 = lambda * lambda;
    let half = T::lit(0.5);
    let m = (pair.alpha + pair.beta) * half;
    let r = (pair.beta - pair.alpha) * half;
    let pot = &problem.potential;
    let eps = problem.eps;
    let dtheta = T::PI() / T::lit(n as f64);

    // radicand / (1 - s^2) at node j; endpoints from the linearization at the roots
    let p_at = |j: usize| -> Cx<T> {
        if j == 0 {
            let (a, da) = pot.eval_unchecked(pair.beta, eps);
            a * da * r
        } else if j == n {
            let (a, da) = pot.eval_unchecked(pair.alpha, eps);
            -(a * da * r)
        } else {
            let theta = dtheta * T::lit(j as f64);
            let (s, c) = theta.sin_cos();
            let (a, _) = pot.eval_unchecked(m + r * c, eps);
            (lam2 - a * a) / (s * s)
        }
    };

    let mid = n / 2;
    let q_mid = p_at(mid).sqrt();
    let mut q = vec![Cx::new(T::zero(), T::zero()); n + 1];
    q[mid] = q_mid;
    let quarter_turn = T::FRAC_PI_2();
    for range in [(mid + 1..=n).collect::<Vec<_>>(), (0..mid).rev().collect()] {
        let mut prev = q_mid;
        for j in range {
            let v = sqrt_near(p_at(j), prev);
            if phase_gap(v, prev) > quarter_turn {
                return Err(Error::BranchAmbiguity { theta: (dtheta * T::lit(j as f64)).as_f64() });
            }
            q[j] = v;
            prev = v;
        }
    }

    let mut value = Cx::new(T::zero(), T::zero());
    let mut inv = (q[0].inv() + q[n].inv()) * half;
    for (j, qj) in q.iter().enumerate().take(n).skip(1) {
        let s = (dtheta * T::lit(j as f64)).sin();
        value = value + qj * (s * s);
        inv = inv + qj.inv();
    }
    let cond = T::one().max(lam2.norm() / q_mid.norm_sqr());
    Ok(((value * r * dtheta, inv * lambda * r * dtheta), cond))
}

/// Action integral on a known turning-point pair.
pub fn action_on_pair<T: Real>(problem: &Problem<T>, pair: &TurningPointPair<T>) -> Result<ActionValue<T>> {
    let length = pair.separation();
    if length < T::lit(COLLISION_DISTANCE) {
        return Err(Error::DegenerateSegment { length: length.as_f64() });
    }
    let tol = &problem.tol;
    let mut n = tol.quad_min_nodes.max(4);
    n += n % 2;
    let mut prev = sweep(problem, pair, n)?;
    loop {
        let next_n = n * 2;
        if next_n > tol.quad_max_nodes {
            let est = (prev.0 - sweep(problem, pair, n / 2)?.0).norm();
            return Err(Error::QuadratureNoConvergence { nodes: n, estimate: est.as_f64() });
        }
        let (cur, cond) = sweep_cond(problem, pair, next_n)?;
        let dv = (cur.0 - prev.0).norm();
        let dd = (cur.1 - prev.1).norm();
        n = next_n;
        // near a merger lambda^2 - A^2 cancels; no better than rounding times `cond`
        let floor = T::lit(64.0) * T::epsilon() * cond;
        let rel = tol.quad_rel_tol.max(floor);
        if dv <= rel * cur.0.norm() && dd <= rel * cur.1.norm() {
            let (value, dvalue) = if tol.quad_oversample > 1 {
                n *= tol.quad_oversample;
                sweep(problem, pair, n)?
            } else {
                cur
            };
            return Ok(ActionValue {
                value,
                dvalue_dlambda: dvalue,
                quad_error_estimate: dv,
                nodes_used: n,
                turning_points: *pair,
            });
        }
        prev = cur;
    }
}

/// `I(lambda, eps)` and `dI/dlambda` along the straight segment between the
/// continued turning points.
pub fn action_integral<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<ActionValue<T>> {
    let pair = find_turning_points(problem, lambda).map_err(|e| match e {
        Error::Collision { distance } => Error::DegenerateSegment { length: distance },
        other => other,
    })?;
    action_on_pair(problem, &pair)
}

/// `dI/dlambda = int lambda / sqrt(lambda^2 - A_eps^2) dt` over the same segment.
pub fn action_derivative<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<Cx<T>> {
    Ok(action_integral(problem, lambda)?.dvalue_dlambda)
}

/// `|conj(I(conj lambda, eps)) - I(lambda, eps)|`; zero up to rounding under (A2).
pub fn check_schwarz_symmetry<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<T> {
    if problem.symmetry == SymmetryClass::None {
        return Err(Error::SymmetryRequired);
    }
    let direct = action_integral(problem, lambda)?.value;
    let mirrored = action_integral(problem, lambda.conj())?.value;
    Ok((mirrored.conj() - direct).norm())
}

/// Real-axis action at `eps = 0`, the reference used to enumerate indices.
pub(crate) fn reference_action<T: Real>(problem: &Problem<T>, lambda: T) -> Result<ActionValue<T>> {
    action_integral(&problem.with_eps(T::zero()), re(lambda))
}
