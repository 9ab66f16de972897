//! Leading-order quantization: `I(lambda, eps) = c_k pi h` with
//! `c_k = k + 1/2` (simple well) or `c_k = k` (monotone profile).
//!
//! Indices are absolute, counted from `I = 0`.

use serde::{Deserialize, Serialize};

use crate::action::{action_integral, reference_action};
use crate::error::{Error, Result};
use crate::potential::{A1Report, SymmetryClass, WellType};
use crate::problem::Problem;
use crate::scalar::{re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    HalfInteger,
    Integer,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::HalfInteger => "half-integer",
            Branch::Integer => "integer",
        }
    }

    /// `c_k`.
    pub fn offset<T: Real>(self, k: i64) -> T {
        let k = T::lit(k as f64);
        match self {
            Branch::HalfInteger => k + T::lit(0.5),
            Branch::Integer => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Wkb,
    Direct,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Wkb => "wkb",
            Method::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct EigenvalueRecord<T> {
    pub lambda: Cx<T>,
    pub k: i64,
    pub branch: Branch,
    pub method: Method,
    /// `|I - c_k pi h|` for WKB records, normalized `|W|` for direct ones.
    pub residual: T,
    pub h: T,
    pub eps: T,
}

/// Result of [`wkb_spectrum`]: the records that converged and the indices that did not.
#[derive(Debug, Clone, PartialEq)]
pub struct WkbSpectrum<T> {
    pub records: Vec<EigenvalueRecord<T>>,
    pub failures: Vec<(i64, Error)>,
}

const NEWTON_CAP: usize = 50;
const BISECT_CAP: usize = 200;

pub fn select_branch<T>(report: &A1Report<T>) -> Branch {
    match report.well_type {
        WellType::SimpleWell => Branch::HalfInteger,
        WellType::Monotonic => Branch::Integer,
    }
}

/// All `k` with `c_k pi h` in `[i_lo, i_hi]`, ascending.
pub fn indices_in_range<T: Real>(i_lo: T, i_hi: T, h: T, branch: Branch) -> Result<Vec<i64>> {
    let unit = T::PI() * h;
    let shift: T = branch.offset(0);
    let first = (i_lo / unit - shift).ceil().to_i64().ok_or(Error::EmptyWindow)?;
    let last = (i_hi / unit - shift).floor().to_i64().ok_or(Error::EmptyWindow)?;
    if last < first {
        return Err(Error::EmptyWindow);
    }
    Ok((first..=last).collect())
}

/// Real `eps = 0` action at the window edges.
pub fn action_range<T: Real>(problem: &Problem<T>) -> Result<(T, T)> {
    let (lo, hi) = problem.window();
    Ok((reference_action(problem, lo)?.value.re, reference_action(problem, hi)?.value.re))
}

pub fn enumerate_indices<T: Real>(problem: &Problem<T>) -> Result<Vec<i64>> {
    let (i_lo, i_hi) = action_range(problem)?;
    indices_in_range(i_lo, i_hi, problem.h, select_branch(&problem.a1))
}

/// Real root of `I(lambda, 0) = target` in the window by bisection.
fn reference_root<T: Real>(problem: &Problem<T>, target: T) -> Result<T> {
    let (mut lo, mut hi) = problem.window();
    let f = |l: T| reference_action(problem, l).map(|v| v.value.re - target);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo > T::zero() || fhi < T::zero() {
        return Err(Error::LeftWindow);
    }
    // loose bracket is enough: Newton finishes the job
    let stop = problem.delta * T::tol(1e-9);
    for _ in 0..BISECT_CAP {
        if hi - lo <= stop {
            break;
        }
        let mid = (lo + hi) * T::lit(0.5);
        if f(mid)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

pub fn solve_quantization<T: Real>(problem: &Problem<T>, k: i64) -> Result<EigenvalueRecord<T>> {
    let branch = select_branch(&problem.a1);
    let target = branch.offset::<T>(k) * T::PI() * problem.h;
    let seed = reference_root(problem, target)?;
    let real_line = problem.eps == T::zero() || problem.symmetry != SymmetryClass::None;
    let tol = problem.tol.quantize_tol;

    let mut lambda = re(seed);
    for _ in 0..NEWTON_CAP {
        let v = action_integral(problem, lambda)?;
        let resid = v.value - re(target);
        if resid.norm() < tol {
            if !problem.in_window_disc(lambda) {
                return Err(Error::LeftWindow);
            }
            if real_line {
                // I is real on the real axis here; drop the rounding-level imaginary part
                lambda.im = T::zero();
            }
            return Ok(EigenvalueRecord {
                lambda,
                k,
                branch,
                method: Method::Wkb,
                residual: resid.norm(),
                h: problem.h,
                eps: problem.eps,
            });
        }
        lambda = lambda - resid / v.dvalue_dlambda;
        if !problem.in_window_disc(lambda) {
            return Err(Error::LeftWindow);
        }
    }
    Err(Error::NoConvergence { stage: "quantization Newton", iterations: NEWTON_CAP })
}

/// Solves every index in the window; per-index failures are collected, not fatal.
pub fn wkb_spectrum<T: Real>(problem: &Problem<T>) -> Result<WkbSpectrum<T>> {
    let ks = enumerate_indices(problem)?;
    let mut records = Vec::with_capacity(ks.len());
    let mut failures = Vec::new();
    for k in ks {
        match solve_quantization(problem, k) {
            Ok(r) => records.push(r),
            Err(e) => failures.push((k, e)),
        }
    }
    records.sort_by(|a, b| a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(std::cmp::Ordering::Equal));
    Ok(WkbSpectrum { records, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::action_derivative;
    use crate::potential::{Component, PotentialSpec, Term, TermKind};
    use crate::Tolerances;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mono(h: f64, eps: f64) -> Problem<f64> {
        Problem::new(PotentialSpec::monotone_odd(2.0), 1.0, 0.3, h, eps).unwrap()
    }

    fn well(h: f64, eps: f64) -> Problem<f64> {
        Problem::new(PotentialSpec::well_even(2.0, 1.0), 1.5, 0.2, h, eps).unwrap()
    }

    #[test]
    fn branch_selection() {
        assert_eq!(select_branch(&well(0.05, 0.0).a1), Branch::HalfInteger);
        assert_eq!(select_branch(&mono(0.05, 0.0).a1), Branch::Integer);
        // asymmetric simple well: A = 2 - exp(-(x-0.3)^2) - 0.2 x exp(-x^2)
        let spec = PotentialSpec::custom(
            &[
                Term::new(Component::A, TermKind::Const, 2.0, 0.0),
                Term::new(Component::A, TermKind::Gauss, -1.0, 1.0),
                Term::new(Component::A, TermKind::XGauss, -0.2, 1.0),
            ],
            10.0,
        );
        let p = Problem::new(spec, 1.5, 0.2, 0.05, 0.0).unwrap();
        assert_eq!(p.symmetry, SymmetryClass::None);
        assert_eq!(select_branch(&p.a1), Branch::HalfInteger);
    }

    #[test]
    fn index_arithmetic() {
        assert_eq!(indices_in_range(0.30, 0.60, 0.05, Branch::Integer).unwrap(), vec![2, 3]);
        assert_eq!(indices_in_range(0.30, 0.60, 10.0, Branch::Integer), Err(Error::EmptyWindow));
        // (k + 1/2) pi 0.05 = 0.236, 0.393, 0.550, 0.707
        assert_eq!(indices_in_range(0.30, 0.60, 0.05, Branch::HalfInteger).unwrap(), vec![2, 3]);
    }

    #[test]
    fn tanh_quantization_matches_closed_form() {
        // 2 pi (1 - sqrt(1 - l^2/4)) = k pi h
        let p = mono(0.05, 0.0);
        let ks = enumerate_indices(&p).unwrap();
        let k = ks[ks.len() / 2];
        let r = solve_quantization(&p, k).unwrap();
        let c = 1.0 - k as f64 * 0.05 / 2.0;
        let exact = 2.0 * (1.0 - c * c).sqrt();
        assert!(r.residual < 1e-12);
        assert_eq!(r.lambda.im, 0.0);
        assert!((r.lambda.re - exact).abs() < 1e-11, "{} vs {exact}", r.lambda.re);
        assert_eq!(r.branch, Branch::Integer);
    }

    #[test]
    fn symmetric_perturbation_stays_real() {
        for p in [well(0.05, 0.05), mono(0.05, 0.05)] {
            let spec = wkb_spectrum(&p).unwrap();
            assert!(spec.failures.is_empty());
            for r in &spec.records {
                assert!(r.lambda.im.abs() < 1e-10);
                assert!(r.residual < 1e-10);
                let i = action_integral(&p, r.lambda).unwrap().value;
                assert!((i - Complex64::new(r.branch.offset::<f64>(r.k) * PI * p.h, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn index_outside_window_is_rejected() {
        let p = well(0.05, 0.0);
        let ks = enumerate_indices(&p).unwrap();
        assert_eq!(solve_quantization(&p, ks[ks.len() - 1] + 1), Err(Error::LeftWindow));
        assert_eq!(solve_quantization(&p, ks[0] - 1), Err(Error::LeftWindow));
    }

    #[test]
    fn spectrum_count_and_spacing() {
        let p = well(0.02, 0.0);
        let spec = wkb_spectrum(&p).unwrap();
        assert_eq!(spec.records.len(), enumerate_indices(&p).unwrap().len());
        for w in spec.records.windows(2) {
            let gap = w[1].lambda.re - w[0].lambda.re;
            let mid = Complex64::new(0.5 * (w[0].lambda.re + w[1].lambda.re), 0.0);
            let predicted = PI * p.h / action_derivative(&p, mid).unwrap().re;
            assert!(((gap - predicted) / predicted).abs() < 0.1);
            assert_eq!(w[1].k, w[0].k + 1);
        }
    }

    #[test]
    fn continuity_in_eps() {
        let a = wkb_spectrum(&well(0.05, 0.0)).unwrap().records;
        let b = wkb_spectrum(&well(0.05, 1e-6)).unwrap().records;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.lambda - y.lambda).norm() < 1e-4);
        }
    }

    #[test]
    fn doubled_nodes_barely_move_eigenvalues() {
        let p = mono(0.05, 0.05);
        let tol = Tolerances { quad_oversample: 2, ..p.tol };
        let a = wkb_spectrum(&p).unwrap().records;
        let b = wkb_spectrum(&p.with_tolerances(tol)).unwrap().records;
        for (x, y) in a.iter().zip(&b) {
            assert!((x.lambda - y.lambda).norm() < 1e-9);
        }
    }

    #[test]
    fn records_round_trip_through_json() {
        let p = mono(0.05, 0.0);
        let r = solve_quantization(&p, enumerate_indices(&p).unwrap()[0]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"integer\"") && s.contains("\"wkb\""));
        let back: EigenvalueRecord<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
