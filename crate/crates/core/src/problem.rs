//! The eigenvalue problem `L_eps u = lambda u` near a reference level `lambda0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{A1Report, PotentialSpec, SymmetryClass, DEFAULT_SAMPLE_HALF_WIDTH};
use crate::scalar::Real;

/// Numerical knobs shared by the solvers. Defaults are the production values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
#[serde(default)]
pub struct Tolerances<T> {
    /// Relative tolerance of the embedded Runge-Kutta error control.
    pub ode_rtol: T,
    /// Absolute tolerance on the unit-normalized state.
    pub ode_atol: T,
    /// Upper bound on the ODE step, as a fraction of `h`.
    pub ode_max_step_over_h: T,
    /// Relative agreement of successive action quadratures.
    pub quad_rel_tol: T,
    pub quad_min_nodes: usize,
    pub quad_max_nodes: usize,
    /// Node multiplier applied after the quadrature has converged.
    pub quad_oversample: usize,
    /// Residual target `|I - c_k pi h|` for the quantization Newton solve.
    pub quantize_tol: T,
    /// Bracket width at which real Wronskian zeros are accepted.
    pub root_interval: T,
    /// Central-difference step for `dW/dlambda`.
    pub newton_fd_step: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            ode_rtol: T::tol(1e-10),
            ode_atol: T::tol(1e-13),
            ode_max_step_over_h: T::lit(0.25),
            quad_rel_tol: T::tol(1e-12),
            quad_min_nodes: 32,
            quad_max_nodes: 4096,
            quad_oversample: 1,
            quantize_tol: T::tol(1e-12),
            root_interval: T::tol(1e-12),
            newton_fd_step: T::tol(1e-7).max(T::epsilon().sqrt()),
        }
    }
}

/// Potential, semiclassical parameter, perturbation strength, spectral window,
/// shooting cutoffs and tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    pub potential: PotentialSpec<T>,
    pub eps: T,
    pub h: T,
    pub lambda0: T,
    /// Half-width of the real window `[lambda0 - delta, lambda0 + delta]`;
    /// also the radius of the complex window disc.
    pub delta: T,
    /// Half-height of the complex search rectangle.
    pub im_half_height: T,
    pub a1: A1Report<T>,
    pub symmetry: SymmetryClass,
    /// Left shooting cutoff (negative x).
    pub left_cut: T,
    /// Right shooting cutoff.
    pub right_cut: T,
    /// Matching point of the two shooting solutions.
    pub match_point: T,
    pub tol: Tolerances<T>,
}

impl<T: Real> Problem<T> {
    /// Validates the potential and (A1) at `lambda0`, and derives default
    /// cutoffs and matching point.
    ///
    /// The default cutoff on each side is the first point, moving outward from
    /// the turning point, where `|A| - lambda0` exceeds half of its value at the
    /// sampling cutoff, pushed a further `2.0` outward.
    pub fn new(potential: PotentialSpec<T>, lambda0: T, delta: T, h: T, eps: T) -> Result<Self> {
        Self::with_sample_cutoff(potential, lambda0, delta, h, eps, T::lit(DEFAULT_SAMPLE_HALF_WIDTH))
    }

    pub fn with_sample_cutoff(
        potential: PotentialSpec<T>,
        lambda0: T,
        delta: T,
        h: T,
        eps: T,
        sample_cutoff: T,
    ) -> Result<Self> {
        potential.validate()?;
        if !(h > T::zero()) {
            return Err(Error::InvalidParameter("h must be positive".into()));
        }
        if !(eps >= T::zero()) {
            return Err(Error::InvalidParameter("eps must be non-negative".into()));
        }
        if !(delta > T::zero() && delta < lambda0) {
            return Err(Error::InvalidParameter("delta must lie in (0, lambda0)".into()));
        }
        let a1 = potential.validate_a1(lambda0, sample_cutoff)?;
        let symmetry = potential.classify_symmetry_on(sample_cutoff);
        let (left_cut, right_cut) = default_cutoffs(&potential, &a1);
        Ok(Problem {
            potential,
            eps,
            h,
            lambda0,
            delta,
            im_half_height: delta * T::lit(0.5),
            match_point: (a1.alpha0 + a1.beta0) * T::lit(0.5),
            a1,
            symmetry,
            left_cut,
            right_cut,
            tol: Tolerances::default(),
        })
    }

    pub fn with_eps(&self, eps: T) -> Self {
        Problem { eps, ..self.clone() }
    }

    pub fn with_h(&self, h: T) -> Self {
        Problem { h, ..self.clone() }
    }

    pub fn with_cutoffs(&self, left_cut: T, right_cut: T) -> Self {
        Problem { left_cut, right_cut, ..self.clone() }
    }

    pub fn with_match_point(&self, match_point: T) -> Self {
        Problem { match_point, ..self.clone() }
    }

    pub fn with_tolerances(&self, tol: Tolerances<T>) -> Self {
        Problem { tol, ..self.clone() }
    }

    pub fn window(&self) -> (T, T) {
        (self.lambda0 - self.delta, self.lambda0 + self.delta)
    }

    pub fn in_window_disc(&self, lambda: crate::Cx<T>) -> bool {
        (lambda - crate::scalar::re(self.lambda0)).norm() <= self.delta * (T::one() + T::lit(1e-9))
    }
}

fn default_cutoffs<T: Real>(potential: &PotentialSpec<T>, a1: &A1Report<T>) -> (T, T) {
    let abs_a = |x: T| potential.parts_real(x).a.abs();
    let step = (a1.beta0 - a1.alpha0) * T::lit(1e-3);
    let extra = T::lit(2.0);
    let walk = |start: T, dir: T, far: T| -> T {
        let target = a1.lambda0 + (abs_a(far) - a1.lambda0) * T::lit(0.5);
        let mut x = start;
        while (x - far) * dir < T::zero() && abs_a(x) < target {
            x = x + dir * step;
        }
        x + dir * extra
    };
    let left = walk(a1.alpha0, -T::one(), -a1.cutoff);
    let right = walk(a1.beta0, T::one(), a1.cutoff);
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cutoffs_for_builtin_families() {
        let p = Problem::new(PotentialSpec::well_even(2.0, 1.0), 1.5, 0.2, 0.05, 0.0).unwrap();
        // |A| - 1.5 >= 0.25  <=>  exp(-x^2) <= 0.25  <=>  |x| >= sqrt(ln 4)
        let x = 4f64.ln().sqrt() + 2.0;
        assert!((p.right_cut - x).abs() < 2e-3 && (p.left_cut + x).abs() < 2e-3);
        assert_eq!(p.symmetry, SymmetryClass::AEvenBOdd);
        assert!(p.match_point.abs() < 1e-12);

        let p = Problem::new(PotentialSpec::monotone_odd(2.0), 1.0, 0.3, 0.05, 0.0).unwrap();
        let x = 0.75f64.atanh() + 2.0;
        assert!((p.right_cut - x).abs() < 2e-3 && (p.left_cut + x).abs() < 2e-3);
        assert_eq!(p.symmetry, SymmetryClass::AOddBEven);
    }

    #[test]
    fn rejects_bad_parameters() {
        let w = PotentialSpec::well_even(2.0, 1.0);
        assert!(Problem::new(w.clone(), 1.5, 0.2, 0.0, 0.0).is_err());
        assert!(Problem::new(w.clone(), 1.5, 0.2, 0.05, -0.1).is_err());
        assert!(Problem::new(w, 1.5, 2.0, 0.05, 0.0).is_err());
    }
}
