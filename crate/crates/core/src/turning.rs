//! Complex turning points: the two zeros `alpha`, `beta` of `A_eps(z)^2 - lambda^2`
//! that continue the real crossings `alpha0 < beta0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{bisect, PotentialSpec};
use crate::problem::Problem;
use crate::scalar::{cx, re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct TurningPointPair<T> {
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
    pub residual_alpha: T,
    pub residual_beta: T,
    pub lambda: Cx<T>,
    pub eps: T,
}

impl<T: Real> TurningPointPair<T> {
    pub fn separation(&self) -> T {
        (self.beta - self.alpha).norm()
    }
}

const NEWTON_CAP: usize = 50;
const HOMOTOPY_STEPS: usize = 8;
const RESIDUAL_TOL: f64 = 1e-12;
const STEP_TOL: f64 = 1e-14;
/// Turning points closer than this are reported as merged.
pub const COLLISION_DISTANCE: f64 = 1e-6;

/// Newton's method on `f(z) = A_eps(z)^2 - lambda^2` with `f' = 2 A_eps A_eps'`.
/// Returns the root and `|f|` there.
pub(crate) fn newton_turning_point<T: Real>(
    potential: &PotentialSpec<T>,
    eps: T,
    lambda: Cx<T>,
    z0: Cx<T>,
) -> Result<(Cx<T>, T)> {
    let lam2 = lambda * lambda;
    let scale = T::one().max(lam2.norm());
    let res_tol = T::tol(RESIDUAL_TOL) * scale;
    let two = T::lit(2.0);
    let mut z = z0;
    let mut converged = false;
    for _ in 0..NEWTON_CAP {
        let (a, da) = potential.eval_potential(z, eps).map_err(|_| Error::LeftStrip)?;
        let f = a * a - lam2;
        let fp = a * da * two;
        if converged {
            // one polishing step past the residual test, kept only if it helps
            let step = f / fp;
            let z_new = z - step;
            if let Ok((a2, _)) = potential.eval_potential(z_new, eps) {
                if (a2 * a2 - lam2).norm() < f.norm() {
                    z = z_new;
                }
            }
            break;
        }
        if f.norm() < res_tol {
            converged = true;
            continue;
        }
        if fp.norm() == T::zero() || !fp.norm().is_finite() {
            return Err(Error::NoConvergence { stage: "turning point", iterations: 0 });
        }
        let step = f / fp;
        z = z - step;
        if !(z.im.abs() < potential.strip_half_width) {
            return Err(Error::LeftStrip);
        }
        if step.norm() < T::tol(STEP_TOL) * T::one().max(z.norm()) {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { stage: "turning point", iterations: NEWTON_CAP });
    }
    let (a, _) = potential.eval_potential(z, eps).map_err(|_| Error::LeftStrip)?;
    Ok((z, (a * a - lam2).norm()))
}

/// Real roots of `|A(x)| = lambda_re` around the well at `eps = 0`.
///
/// Fails with `Collision` when `lambda_re` does not exceed the well bottom.
pub fn real_turning_points<T: Real>(problem: &Problem<T>, lambda_re: T) -> Result<(T, T)> {
    let pot = &problem.potential;
    let a1 = &problem.a1;
    let abs_a = |x: T| pot.parts_real(x).a.abs();
    let width = a1.beta0 - a1.alpha0;

    // bottom of |A| between the reference crossings
    let n = 200;
    let mut x_min = a1.alpha0;
    let mut v_min = abs_a(x_min);
    for i in 1..=n {
        let x = a1.alpha0 + width * T::lit(i as f64 / n as f64);
        let v = abs_a(x);
        if v < v_min {
            v_min = v;
            x_min = x;
        }
    }
    let golden = T::lit(0.618_033_988_749_894_8);
    let (mut lo, mut hi) = (x_min - width / T::lit(n as f64), x_min + width / T::lit(n as f64));
    for _ in 0..80 {
        let x1 = hi - golden * (hi - lo);
        let x2 = lo + golden * (hi - lo);
        if abs_a(x1) < abs_a(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    x_min = (lo + hi) * T::lit(0.5);
    let g = |x: T| abs_a(x) - lambda_re;
    if g(x_min) >= T::zero() {
        return Err(Error::Collision { distance: 0.0 });
    }
    let step = width / T::lit(50.0);
    let outward = |dir: T| -> Result<T> {
        let mut x = x_min;
        while g(x) < T::zero() {
            x = x + dir * step;
            if x.abs() > a1.cutoff {
                return Err(Error::LeftWindow);
            }
        }
        Ok(bisect(&g, x - dir * step, x))
    };
    Ok((outward(-T::one())?, outward(T::one())?))
}

fn make_pair<T: Real>(
    problem: &Problem<T>,
    lambda: Cx<T>,
    alpha: (Cx<T>, T),
    beta: (Cx<T>, T),
) -> Result<TurningPointPair<T>> {
    let pair = TurningPointPair {
        alpha: alpha.0,
        beta: beta.0,
        residual_alpha: alpha.1,
        residual_beta: beta.1,
        lambda,
        eps: problem.eps,
    };
    let d = pair.separation();
    if d < T::lit(COLLISION_DISTANCE) {
        return Err(Error::Collision { distance: d.as_f64() });
    }
    Ok(pair)
}

/// Locates `alpha_eps(lambda)`, `beta_eps(lambda)`.
///
/// Seeds are the real roots at `(Re lambda, eps = 0)`, continued first in
/// `Im lambda` and then in `eps`, eight Newton-corrected steps each.
pub fn find_turning_points<T: Real>(problem: &Problem<T>, lambda: Cx<T>) -> Result<TurningPointPair<T>> {
    let (a0, b0) = real_turning_points(problem, lambda.re)?;
    if (b0 - a0) < T::lit(COLLISION_DISTANCE) {
        return Err(Error::Collision { distance: (b0 - a0).as_f64() });
    }
    let pot = &problem.potential;
    let mut alpha = (re(a0), T::zero());
    let mut beta = (re(b0), T::zero());
    let steps = T::lit(HOMOTOPY_STEPS as f64);

    let im_steps = if lambda.im == T::zero() { 1 } else { HOMOTOPY_STEPS };
    for j in 1..=im_steps {
        let frac = if im_steps == 1 { T::one() } else { T::lit(j as f64) / steps };
        let lam = cx(lambda.re, lambda.im * frac);
        alpha = newton_turning_point(pot, T::zero(), lam, alpha.0)?;
        beta = newton_turning_point(pot, T::zero(), lam, beta.0)?;
    }
    if problem.eps != T::zero() {
        for j in 1..=HOMOTOPY_STEPS {
            let e = problem.eps * T::lit(j as f64) / steps;
            alpha = newton_turning_point(pot, e, lambda, alpha.0)?;
            beta = newton_turning_point(pot, e, lambda, beta.0)?;
        }
    }
    make_pair(problem, lambda, alpha, beta)
}

/// Follows the pair along a path in the lambda plane, seeding each solve from
/// the previous pair.
pub fn continue_in_window<T: Real>(problem: &Problem<T>, path: &[Cx<T>]) -> Result<Vec<TurningPointPair<T>>> {
    let Some(&first) = path.first() else {
        return Ok(Vec::new());
    };
    let max_step = (problem.a1.beta0 - problem.a1.alpha0) * T::lit(0.1);
    let mut out = Vec::with_capacity(path.len());
    out.push(find_turning_points(problem, first)?);
    for (i, w) in path.windows(2).enumerate() {
        if (w[1] - w[0]).norm() >= max_step {
            return Err(Error::InvalidParameter(format!(
                "path step {} exceeds 0.1 |beta0 - alpha0|",
                i + 1
            )));
        }
        let prev = *out.last().expect("nonempty");
        let alpha = newton_turning_point(&problem.potential, problem.eps, w[1], prev.alpha)?;
        let beta = newton_turning_point(&problem.potential, problem.eps, w[1], prev.beta)?;
        if (alpha.0 - prev.alpha).norm() >= (alpha.0 - prev.beta).norm()
            || (beta.0 - prev.beta).norm() >= (beta.0 - prev.alpha).norm()
        {
            return Err(Error::BranchSwap { step: i + 1 });
        }
        out.push(make_pair(problem, w[1], alpha, beta)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Component, Term, TermKind};
    use num_complex::Complex64;

    fn mono(eps: f64) -> Problem<f64> {
        Problem::new(PotentialSpec::monotone_odd(2.0), 1.0, 0.3, 0.05, eps).unwrap()
    }

    fn well(eps: f64) -> Problem<f64> {
        Problem::new(PotentialSpec::well_even(2.0, 1.0), 1.5, 0.2, 0.05, eps).unwrap()
    }

    fn assert_residuals(p: &TurningPointPair<f64>) {
        let tol = 1e-12 * p.lambda.norm_sqr().max(1.0);
        assert!(p.residual_alpha < tol && p.residual_beta < tol, "{p:?}");
    }

    #[test]
    fn tanh_closed_form() {
        let p = find_turning_points(&mono(0.0), Complex64::new(1.0, 0.0)).unwrap();
        let t = 0.5f64.atanh();
        assert!((p.alpha - Complex64::new(-t, 0.0)).norm() < 1e-13);
        assert!((p.beta - Complex64::new(t, 0.0)).norm() < 1e-13);
        assert!(p.alpha.im == 0.0 && p.beta.im == 0.0);
        assert_residuals(&p);
    }

    #[test]
    fn well_bottom_is_a_collision() {
        let err = find_turning_points(&well(0.0), Complex64::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Collision { .. }));
    }

    #[test]
    fn perturbed_pair_is_reflection_symmetric() {
        let p = find_turning_points(&well(0.05), Complex64::new(1.5, 0.0)).unwrap();
        assert!(p.alpha.im.abs() > 1e-4);
        assert!((p.beta + p.alpha.conj()).norm() < 1e-12);
        assert!(p.alpha.re < p.beta.re);
        assert_residuals(&p);
    }

    #[test]
    fn schwarz_pair_property_both_pairings() {
        for prob in [well(0.05), mono(0.05)] {
            for lam in [Complex64::new(prob.lambda0 + 0.03, 0.04), Complex64::new(prob.lambda0 - 0.1, -0.07)] {
                let p = find_turning_points(&prob, lam).unwrap();
                let q = find_turning_points(&prob, lam.conj()).unwrap();
                assert!((q.alpha + p.beta.conj()).norm() < 1e-10);
                assert!((q.beta + p.alpha.conj()).norm() < 1e-10);
                assert_residuals(&p);
            }
        }
    }

    #[test]
    fn linear_approach_to_unperturbed_roots() {
        // |alpha_eps - alpha_0| ~ C eps: fitted log-log slope >= 0.9
        let lam = Complex64::new(1.5, 0.0);
        let base = find_turning_points(&well(0.0), lam).unwrap();
        let epss = [1e-2, 1e-3, 1e-4];
        let d: Vec<f64> = epss
            .iter()
            .map(|&e| (find_turning_points(&well(e), lam).unwrap().alpha - base.alpha).norm())
            .collect();
        let xs: Vec<f64> = epss.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = d.iter().map(|v| v.ln()).collect();
        let mx = xs.iter().sum::<f64>() / 3.0;
        let my = ys.iter().sum::<f64>() / 3.0;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!(slope >= 0.9, "slope {slope}");
    }

    #[test]
    fn continuation_examples() {
        let prob = mono(0.0);
        let lam0 = Complex64::new(1.0, 0.0);
        let same = continue_in_window(&prob, &[lam0, lam0]).unwrap();
        assert_eq!(same[0].alpha, same[1].alpha);
        assert_eq!(same[0].beta, same[1].beta);

        let path: Vec<Complex64> = (0..=30).map(|i| Complex64::new(1.2 + 0.02 * i as f64, 0.0)).collect();
        let pairs = continue_in_window(&prob, &path).unwrap();
        for w in pairs.windows(2) {
            assert!(w[1].alpha.re < w[0].alpha.re);
            assert!(w[1].beta.re > w[0].beta.re);
        }
        for (p, l) in pairs.iter().zip(&path) {
            assert!((p.beta.re - (l.re / 2.0).atanh()).abs() < 1e-12);
        }

        let prob = well(0.0);
        let circle: Vec<Complex64> = (0..=64)
            .map(|i| Complex64::new(1.5, 0.0) + Complex64::from_polar(0.05, 2.0 * std::f64::consts::PI * i as f64 / 64.0))
            .collect();
        let pairs = continue_in_window(&prob, &circle).unwrap();
        let (s, e) = (pairs[0], pairs[pairs.len() - 1]);
        assert!((s.alpha - e.alpha).norm() < 1e-10 && (s.beta - e.beta).norm() < 1e-10);
    }

    #[test]
    fn continuation_rejects_long_steps() {
        let prob = mono(0.0);
        let path = [Complex64::new(0.8, 0.0), Complex64::new(1.2, 0.0)];
        assert!(matches!(continue_in_window(&prob, &path), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn asymmetric_control_breaks_reflection() {
        let spec = PotentialSpec::custom(
            &[
                Term::new(Component::A, TermKind::Const, 2.0, 0.0),
                Term::new(Component::A, TermKind::Gauss, -1.0, 1.0),
                Term::new(Component::B, TermKind::Gauss, 1.0, 1.0),
            ],
            10.0,
        );
        let prob = Problem::new(spec, 1.5, 0.2, 0.05, 0.05).unwrap();
        let p = find_turning_points(&prob, Complex64::new(1.5, 0.0)).unwrap();
        // A even, B even: the pair is symmetric under z -> -z instead
        assert!((p.beta + p.alpha).norm() < 1e-12);
        assert!((p.beta + p.alpha.conj()).norm() > 1e-3);
    }

    #[test]
    fn single_precision_pair() {
        let prob = Problem::new(PotentialSpec::<f32>::monotone_odd(2.0), 1.0, 0.3, 0.05, 0.0).unwrap();
        let p = find_turning_points(&prob, num_complex::Complex32::new(1.0, 0.0)).unwrap();
        assert!((p.beta.re - 0.5f32.atanh()).abs() < 1e-5);
    }
}
