//! Dormand-Prince 5(4) for the linear system `u' = M(x) u` with `u` in C^2.
//!
//! The state is kept at unit norm; the discarded magnitude accumulates in a
//! log scale. Since the field is linear, rescaling commutes with the step and
//! the FSAL stage can be rescaled along with the state.

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

pub type Vec2<T> = [Cx<T>; 2];
pub type Mat2<T> = [[Cx<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub min_step: T,
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn apply<T: Real>(m: &Mat2<T>, u: &Vec2<T>) -> Vec2<T> {
    [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]]
}

#[inline]
fn norm<T: Real>(u: &Vec2<T>) -> T {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}

/// Integrates from `x0` to `x1` (either direction) starting at `(u0, log0)`;
/// `u0` need not be normalized. Returns the unit state, its log scale and stats.
/// A zero-length span returns the input untouched.
pub fn integrate_linear<T: Real, F: Fn(T) -> Mat2<T>>(
    field: F,
    x0: T,
    x1: T,
    u0: Vec2<T>,
    log0: T,
    ctl: &StepControl<T>,
) -> Result<(Vec2<T>, T, OdeStats)> {
    let mut stats = OdeStats::default();
    let span = x1 - x0;
    if span == T::zero() {
        return Ok((u0, log0, stats));
    }
    let n0 = norm(&u0);
    let mut u = [u0[0] / n0, u0[1] / n0];
    let mut log_scale = log0 + n0.ln();
    let dir = span.signum();
    let c: [T; 7] = C.map(T::lit);
    let a: [[T; 6]; 7] = A.map(|row| row.map(T::lit));
    let e: [T; 7] = E.map(T::lit);

    let mut x = x0;
    let mut step = ctl.max_step.min(span.abs());
    let mut k = [[Cx::new(T::zero(), T::zero()); 2]; 7];
    k[0] = apply(&field(x), &u);
    let safety = T::lit(0.9);
    let fifth = T::lit(0.2);

    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= T::zero() {
            break;
        }
        let last = step >= remaining;
        let dt = if last { remaining } else { step } * dir;
        for s in 1..7 {
            let mut y = u;
            for (j, kj) in k.iter().enumerate().take(s) {
                let w = a[s][j] * dt;
                if w != T::zero() {
                    y[0] = y[0] + kj[0] * w;
                    y[1] = y[1] + kj[1] * w;
                }
            }
            k[s] = apply(&field(x + c[s] * dt), &y);
        }
        // stage 7 was evaluated at the fifth-order solution
        let mut y5 = u;
        let mut err = [Cx::new(T::zero(), T::zero()); 2];
        for s in 0..7 {
            if s < 6 && a[6][s] != T::zero() {
                y5[0] = y5[0] + k[s][0] * (a[6][s] * dt);
                y5[1] = y5[1] + k[s][1] * (a[6][s] * dt);
            }
            err[0] = err[0] + k[s][0] * (e[s] * dt);
            err[1] = err[1] + k[s][1] * (e[s] * dt);
        }
        let n5 = norm(&y5);
        let scale = ctl.atol + ctl.rtol * n5.max(T::one());
        let ratio = norm(&err) / scale;
        if !ratio.is_finite() {
            return Err(Error::StepUnderflow { x: x.as_f64() });
        }
        if ratio <= T::one() {
            stats.accepted += 1;
            x = if last { x1 } else { x + dt };
            u = [y5[0] / n5, y5[1] / n5];
            log_scale = log_scale + n5.ln();
            k[0] = [k[6][0] / n5, k[6][1] / n5];
            let grow = if ratio == T::zero() { T::lit(5.0) } else { (safety * ratio.powf(-fifth)).min(T::lit(5.0)) };
            if !last {
                step = (step * grow.max(T::one())).min(ctl.max_step);
            }
        } else {
            stats.rejected += 1;
            let shrink = (safety * ratio.powf(-fifth)).max(T::lit(0.2));
            step = step.min(remaining) * shrink;
            if step < ctl.min_step {
                return Err(Error::StepUnderflow { x: x.as_f64() });
            }
        }
    }
    Ok((u, log_scale, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ctl() -> StepControl<f64> {
        StepControl { rtol: 1e-10, atol: 1e-13, max_step: 0.1, min_step: 1e-13 }
    }

    #[test]
    fn rotation_is_exact() {
        // u1' = i u1, u2' = -2 u2 on [0, 3]
        let z = Complex64::new(0.0, 0.0);
        let m = [[Complex64::new(0.0, 1.0), z], [z, Complex64::new(-2.0, 0.0)]];
        let u0 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let (u, ls, stats) = integrate_linear(|_| m, 0.0, 3.0, u0, 0.0, &ctl()).unwrap();
        let exact = [Complex64::from_polar(1.0, 3.0), Complex64::new((-6.0f64).exp(), 0.0)];
        let n = (exact[0].norm_sqr() + exact[1].norm_sqr()).sqrt();
        assert!((u[0] * ls.exp() - exact[0]).norm() < 1e-9);
        assert!((u[1] * ls.exp() - exact[1]).norm() < 1e-9);
        assert!((ls - n.ln()).abs() < 1e-9);
        assert!(stats.accepted >= 30);
    }

    #[test]
    fn huge_growth_does_not_overflow() {
        let z = Complex64::new(0.0, 0.0);
        let m = [[Complex64::new(1000.0, 0.0), z], [z, Complex64::new(-1000.0, 0.0)]];
        let u0 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let tight = StepControl { max_step: 1e-3, ..ctl() };
        let (u, ls, _) = integrate_linear(|_| m, 0.0, 5.0, u0, 0.0, &tight).unwrap();
        assert!((ls - 5000.0).abs() < 1e-5);
        assert!((u[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_length_is_identity() {
        let m = [[Complex64::new(1.0, 0.0); 2]; 2];
        let u0 = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let (u, ls, stats) = integrate_linear(|_| m, 1.0, 1.0, u0, 2.0, &ctl()).unwrap();
        assert_eq!(stats.accepted, 0);
        assert_eq!((u, ls), (u0, 2.0));
    }

    #[test]
    fn unnormalized_input_is_rescaled() {
        let z = Complex64::new(0.0, 0.0);
        let m = [[z; 2]; 2];
        let u0 = [Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)];
        let (u, ls, _) = integrate_linear(|_| m, 0.0, 1.0, u0, 2.0, &ctl()).unwrap();
        assert!((ls - (2.0 + 5f64.ln())).abs() < 1e-14);
        assert!((u[1] - Complex64::new(0.0, 0.8)).norm() < 1e-14);
    }
}
