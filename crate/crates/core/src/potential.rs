//! Analytic potential pairs `(A, B)` and the perturbed potential `A_eps = A + i eps B`.
//!
//! Potentials are closed-form entire or strip-analytic functions so that values
//! and derivatives are available at complex points without numerical
//! differentiation. Three families exist:
//!
//! * `well-even`: `A(x) = a - b exp(-x^2)` with odd partner `B(x) = x exp(-x^2)`,
//!   params `[a, b]`, `a > b > 0`.
//! * `monotone-odd`: `A(x) = a tanh(x)` with even partner `B(x) = exp(-x^2)`,
//!   params `[a]`, `a > 0`.
//! * `custom-sum-of-terms`: a finite sum of `{const, tanh(cx), exp(-cx^2),
//!   x exp(-cx^2)}` terms for each of `A` and `B`. Params are flattened groups of
//!   four `[component, kind, coefficient, rate]` with `component` 0 for `A`,
//!   1 for `B`, and `kind` 0..=3 in the order listed.

use serde::{Deserialize, Serialize};

use crate::error::{A1Violation, Error, Result};
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    WellEven,
    MonotoneOdd,
    CustomSumOfTerms,
}

/// Which of the two real functions a custom term contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// `coefficient`
    Const,
    /// `coefficient * tanh(rate * x)`
    Tanh,
    /// `coefficient * exp(-rate * x^2)`
    Gauss,
    /// `coefficient * x * exp(-rate * x^2)`
    XGauss,
}

impl TermKind {
    fn code(self) -> u8 {
        match self {
            TermKind::Const => 0,
            TermKind::Tanh => 1,
            TermKind::Gauss => 2,
            TermKind::XGauss => 3,
        }
    }

    fn from_code(code: f64) -> Option<Self> {
        match code {
            c if c == 0.0 => Some(TermKind::Const),
            c if c == 1.0 => Some(TermKind::Tanh),
            c if c == 2.0 => Some(TermKind::Gauss),
            c if c == 3.0 => Some(TermKind::XGauss),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T> {
    pub component: Component,
    pub kind: TermKind,
    pub coefficient: T,
    pub rate: T,
}

impl<T: Real> Term<T> {
    pub fn new(component: Component, kind: TermKind, coefficient: T, rate: T) -> Self {
        Term { component, kind, coefficient, rate }
    }

    #[inline]
    fn eval_c(&self, z: Cx<T>) -> (Cx<T>, Cx<T>) {
        let c = self.coefficient;
        match self.kind {
            TermKind::Const => (cx(c, T::zero()), Cx::new(T::zero(), T::zero())),
            TermKind::Tanh => {
                let t = (z * self.rate).tanh();
                let one = cx(T::one(), T::zero());
                (t * c, (one - t * t) * (c * self.rate))
            }
            TermKind::Gauss => {
                let g = (-(z * z) * self.rate).exp();
                (g * c, -(z * g) * (c * (self.rate + self.rate)))
            }
            TermKind::XGauss => {
                let g = (-(z * z) * self.rate).exp();
                let two = T::one() + T::one();
                let one = cx(T::one(), T::zero());
                (z * g * c, (one - z * z * (two * self.rate)) * g * c)
            }
        }
    }

    #[inline]
    fn eval_r(&self, x: T) -> (T, T) {
        let c = self.coefficient;
        let two = T::one() + T::one();
        match self.kind {
            TermKind::Const => (c, T::zero()),
            TermKind::Tanh => {
                let t = (x * self.rate).tanh();
                (c * t, c * self.rate * (T::one() - t * t))
            }
            TermKind::Gauss => {
                let g = (-self.rate * x * x).exp();
                (c * g, -two * self.rate * x * c * g)
            }
            TermKind::XGauss => {
                let g = (-self.rate * x * x).exp();
                (c * x * g, c * (T::one() - two * self.rate * x * x) * g)
            }
        }
    }
}

/// Values and first derivatives of `A` and `B` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parts<S> {
    pub a: S,
    pub da: S,
    pub b: S,
    pub db: S,
}

/// A closed-form analytic potential pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PotentialSpec<T> {
    pub family: Family,
    pub params: Vec<T>,
    /// Half-width `delta` of the analyticity strip `|Im z| < delta`.
    pub strip_half_width: T,
}

/// Parity pairing of `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    AEvenBOdd,
    AOddBEven,
    None,
}

impl SymmetryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::AEvenBOdd => "A-even-B-odd",
            SymmetryClass::AOddBEven => "A-odd-B-even",
            SymmetryClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WellType {
    /// `A(alpha0) = A(beta0)`
    SimpleWell,
    /// `A(alpha0) = -A(beta0)`
    Monotonic,
}

/// Result of checking the single-well assumption at level `lambda0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct A1Report<T> {
    pub alpha0: T,
    pub beta0: T,
    pub lambda0: T,
    /// `(A'(alpha0), A'(beta0))`
    pub slopes: (T, T),
    pub well_type: WellType,
    /// `min(|A(-cutoff)|, |A(cutoff)|) - lambda0`. Only the cutoffs are
    /// checked; the `liminf` at infinity cannot be verified from samples.
    pub margin_at_infinity: T,
    pub cutoff: T,
}

/// Number of samples used to bracket the crossings `|A| = lambda0`.
const A1_SAMPLES: usize = 4001;
const SYMMETRY_SAMPLES: usize = 101;
/// Sampling half-width used by [`PotentialSpec::classify_symmetry`].
pub const DEFAULT_SAMPLE_HALF_WIDTH: f64 = 8.0;
const SLOPE_TOL: f64 = 1e-8;

impl<T: Real> PotentialSpec<T> {
    /// `A(x) = a - b exp(-x^2)`, `B(x) = x exp(-x^2)`.
    pub fn well_even(a: T, b: T) -> Self {
        PotentialSpec { family: Family::WellEven, params: vec![a, b], strip_half_width: T::lit(10.0) }
    }

    /// `A(x) = a tanh(x)`, `B(x) = exp(-x^2)`.
    pub fn monotone_odd(a: T) -> Self {
        PotentialSpec { family: Family::MonotoneOdd, params: vec![a], strip_half_width: T::lit(0.5) }
    }

    pub fn custom(terms: &[Term<T>], strip_half_width: T) -> Self {
        let mut params = Vec::with_capacity(terms.len() * 4);
        for t in terms {
            params.push(match t.component {
                Component::A => T::zero(),
                Component::B => T::one(),
            });
            params.push(T::lit(f64::from(t.kind.code())));
            params.push(t.coefficient);
            params.push(t.rate);
        }
        PotentialSpec { family: Family::CustomSumOfTerms, params, strip_half_width }
    }

    pub fn with_strip_half_width(mut self, width: T) -> Self {
        self.strip_half_width = width;
        self
    }

    /// Checks parameter counts and ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidPotential(m.to_string()));
        if !(self.strip_half_width > T::zero()) {
            return bad("strip_half_width must be positive");
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return bad("params must be finite");
        }
        match self.family {
            Family::WellEven => {
                if self.params.len() != 2 {
                    return bad("well-even takes params [a, b]");
                }
                let (a, b) = (self.params[0], self.params[1]);
                if !(b > T::zero() && a > b) {
                    return bad("well-even requires a > b > 0");
                }
            }
            Family::MonotoneOdd => {
                if self.params.len() != 1 {
                    return bad("monotone-odd takes params [a]");
                }
                if !(self.params[0] > T::zero()) {
                    return bad("monotone-odd requires a > 0");
                }
            }
            Family::CustomSumOfTerms => {
                if self.params.is_empty() || self.params.len() % 4 != 0 {
                    return bad("custom-sum-of-terms takes groups of [component, kind, coefficient, rate]");
                }
                for g in self.params.chunks(4) {
                    let comp = g[0].as_f64();
                    if comp != 0.0 && comp != 1.0 {
                        return bad("term component must be 0 (A) or 1 (B)");
                    }
                    let kind = TermKind::from_code(g[1].as_f64());
                    match kind {
                        None => return bad("term kind must be 0..=3"),
                        Some(TermKind::Gauss | TermKind::XGauss) if g[3] < T::zero() => {
                            return bad("gaussian rate must be non-negative")
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    /// Decoded custom terms (empty for built-in families).
    pub fn terms(&self) -> Vec<Term<T>> {
        if self.family != Family::CustomSumOfTerms {
            return Vec::new();
        }
        self.params
            .chunks(4)
            .filter_map(|g| {
                let component = if g[0] == T::zero() { Component::A } else { Component::B };
                TermKind::from_code(g[1].as_f64())
                    .map(|kind| Term { component, kind, coefficient: g[2], rate: g[3] })
            })
            .collect()
    }

    /// `A`, `A'`, `B`, `B'` at a complex point. No strip check.
    pub fn parts(&self, z: Cx<T>) -> Parts<Cx<T>> {
        let zero = Cx::new(T::zero(), T::zero());
        match self.family {
            Family::WellEven => {
                let (a, b) = (self.params[0], self.params[1]);
                let g = (-(z * z)).exp();
                let two = T::one() + T::one();
                let one = cx(T::one(), T::zero());
                Parts {
                    a: cx(a, T::zero()) - g * b,
                    da: z * g * (two * b),
                    b: z * g,
                    db: (one - z * z * two) * g,
                }
            }
            Family::MonotoneOdd => {
                let a = self.params[0];
                let t = z.tanh();
                let g = (-(z * z)).exp();
                let two = T::one() + T::one();
                let one = cx(T::one(), T::zero());
                Parts { a: t * a, da: (one - t * t) * a, b: g, db: -(z * g) * two }
            }
            Family::CustomSumOfTerms => {
                let mut p = Parts { a: zero, da: zero, b: zero, db: zero };
                for g in self.params.chunks_exact(4) {
                    let Some(kind) = TermKind::from_code(g[1].as_f64()) else { continue };
                    let term = Term { component: Component::A, kind, coefficient: g[2], rate: g[3] };
                    let (v, d) = term.eval_c(z);
                    if g[0] == T::zero() {
                        p.a = p.a + v;
                        p.da = p.da + d;
                    } else {
                        p.b = p.b + v;
                        p.db = p.db + d;
                    }
                }
                p
            }
        }
    }

    /// Real-axis variant of [`parts`](Self::parts) using real arithmetic.
    pub fn parts_real(&self, x: T) -> Parts<T> {
        let two = T::one() + T::one();
        match self.family {
            Family::WellEven => {
                let (a, b) = (self.params[0], self.params[1]);
                let g = (-x * x).exp();
                Parts { a: a - b * g, da: two * b * x * g, b: x * g, db: (T::one() - two * x * x) * g }
            }
            Family::MonotoneOdd => {
                let a = self.params[0];
                let t = x.tanh();
                let g = (-x * x).exp();
                Parts { a: a * t, da: a * (T::one() - t * t), b: g, db: -two * x * g }
            }
            Family::CustomSumOfTerms => {
                let mut p = Parts { a: T::zero(), da: T::zero(), b: T::zero(), db: T::zero() };
                for g in self.params.chunks_exact(4) {
                    let Some(kind) = TermKind::from_code(g[1].as_f64()) else { continue };
                    let term = Term { component: Component::A, kind, coefficient: g[2], rate: g[3] };
                    let (v, d) = term.eval_r(x);
                    if g[0] == T::zero() {
                        p.a = p.a + v;
                        p.da = p.da + d;
                    } else {
                        p.b = p.b + v;
                        p.db = p.db + d;
                    }
                }
                p
            }
        }
    }

    /// `A_eps(z)` and `A_eps'(z)` without the strip check.
    #[inline]
    pub fn eval_unchecked(&self, z: Cx<T>, eps: T) -> (Cx<T>, Cx<T>) {
        let p = self.parts(z);
        let ie = cx(T::zero(), eps);
        (p.a + ie * p.b, p.da + ie * p.db)
    }

    /// `A_eps(x)` on the real axis.
    #[inline]
    pub fn eval_real(&self, x: T, eps: T) -> Cx<T> {
        let p = self.parts_real(x);
        cx(p.a, eps * p.b)
    }

    /// `A(z) + i eps B(z)` and its derivative in `z`, from closed forms.
    pub fn eval_potential(&self, z: Cx<T>, eps: T) -> Result<(Cx<T>, Cx<T>)> {
        if !(z.im.abs() < self.strip_half_width) {
            return Err(Error::OutOfStrip { im: z.im.as_f64(), strip: self.strip_half_width.as_f64() });
        }
        Ok(self.eval_unchecked(z, eps))
    }

    /// Parity class decided on a symmetric 101-point grid over `[-8, 8]`.
    pub fn classify_symmetry(&self) -> SymmetryClass {
        self.classify_symmetry_on(T::lit(DEFAULT_SAMPLE_HALF_WIDTH))
    }

    /// Parity class on a symmetric 101-point grid over `[-half_width, half_width]`,
    /// with tolerance `1e-12` relative to the largest sampled magnitude.
    pub fn classify_symmetry_on(&self, half_width: T) -> SymmetryClass {
        let n = SYMMETRY_SAMPLES;
        let mut scale_a = T::min_positive_value();
        let mut scale_b = T::min_positive_value();
        let (mut a_even, mut a_odd, mut b_even, mut b_odd) = (T::zero(), T::zero(), T::zero(), T::zero());
        for i in 0..n {
            let x = half_width * (T::lit(2.0 * i as f64 / (n - 1) as f64) - T::one());
            let p = self.parts_real(x);
            let m = self.parts_real(-x);
            scale_a = scale_a.max(p.a.abs());
            scale_b = scale_b.max(p.b.abs());
            a_even = a_even.max((p.a - m.a).abs());
            a_odd = a_odd.max((p.a + m.a).abs());
            b_even = b_even.max((p.b - m.b).abs());
            b_odd = b_odd.max((p.b + m.b).abs());
        }
        let tol = T::tol(1e-12);
        let small = |d: T, s: T| d <= tol * s;
        if small(a_even, scale_a) && small(b_odd, scale_b) {
            SymmetryClass::AEvenBOdd
        } else if small(a_odd, scale_a) && small(b_even, scale_b) {
            SymmetryClass::AOddBEven
        } else {
            SymmetryClass::None
        }
    }

    /// Locates the two real solutions of `|A(x)| = lambda0` on `[-cutoff, cutoff]`
    /// by dense sampling and bisection, and checks the single-well conditions.
    pub fn validate_a1(&self, lambda0: T, cutoff: T) -> Result<A1Report<T>> {
        if !(lambda0 > T::zero()) || !(cutoff > T::zero()) {
            return Err(Error::InvalidParameter("lambda0 and cutoff must be positive".into()));
        }
        let g = |x: T| self.parts_real(x).a.abs() - lambda0;
        let n = A1_SAMPLES;
        let xs: Vec<T> = (0..n)
            .map(|i| cutoff * (T::lit(2.0 * i as f64 / (n - 1) as f64) - T::one()))
            .collect();
        let gs: Vec<T> = xs.iter().map(|&x| g(x)).collect();
        let brackets: Vec<usize> =
            (0..n - 1).filter(|&i| (gs[i] > T::zero()) != (gs[i + 1] > T::zero())).collect();
        match brackets.len() {
            0 => return Err(Error::A1Violated(A1Violation::NoCrossings)),
            1 => return Err(Error::A1Violated(A1Violation::MissingCrossing)),
            2 => {}
            k => return Err(Error::A1Violated(A1Violation::ExtraCrossings(k))),
        }
        if !(gs[0] > T::zero() && gs[n - 1] > T::zero()) {
            return Err(Error::A1Violated(A1Violation::NoMarginAtInfinity));
        }
        let alpha0 = bisect(&g, xs[brackets[0]], xs[brackets[0] + 1]);
        let beta0 = bisect(&g, xs[brackets[1]], xs[brackets[1] + 1]);
        let pa = self.parts_real(alpha0);
        let pb = self.parts_real(beta0);
        if pa.da.abs() <= T::lit(SLOPE_TOL) || pb.da.abs() <= T::lit(SLOPE_TOL) {
            return Err(Error::A1Violated(A1Violation::ZeroSlope));
        }
        let well_type = if pa.a * pb.a > T::zero() { WellType::SimpleWell } else { WellType::Monotonic };
        let margin = self.parts_real(-cutoff).a.abs().min(self.parts_real(cutoff).a.abs()) - lambda0;
        Ok(A1Report {
            alpha0,
            beta0,
            lambda0,
            slopes: (pa.da, pb.da),
            well_type,
            margin_at_infinity: margin,
            cutoff,
        })
    }
}

/// Bisection on a bracketing interval until the bracket stops shrinking.
pub(crate) fn bisect<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn gauss_b_even() -> PotentialSpec<f64> {
        PotentialSpec::custom(
            &[
                Term::new(Component::A, TermKind::Const, 2.0, 0.0),
                Term::new(Component::A, TermKind::Gauss, -1.0, 1.0),
                Term::new(Component::B, TermKind::Gauss, 1.0, 1.0),
            ],
            10.0,
        )
    }

    #[test]
    fn eval_examples() {
        let w = PotentialSpec::well_even(2.0, 1.0);
        let (v, d) = w.eval_potential(Complex64::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!((v, d), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));

        let m = PotentialSpec::monotone_odd(2.0);
        let (v, d) = m.eval_potential(Complex64::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!((v, d), (Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)));

        let (v, _) = w.eval_potential(Complex64::new(0.0, 0.0), 0.05).unwrap();
        assert!((v - Complex64::new(1.0, 0.05 * 0.0)).norm() < 1e-15);
        // B(0) = 0, B'(0) = 1: the eps term shows up in the derivative.
        let (_, d) = w.eval_potential(Complex64::new(0.0, 0.0), 0.05).unwrap();
        assert!((d - Complex64::new(0.0, 0.05)).norm() < 1e-15);
    }

    #[test]
    fn out_of_strip_rejected() {
        let m = PotentialSpec::monotone_odd(2.0);
        let err = m.eval_potential(Complex64::new(0.0, 0.5), 0.0).unwrap_err();
        assert!(matches!(err, Error::OutOfStrip { .. }));
    }

    #[test]
    fn real_and_complex_paths_agree() {
        for spec in [PotentialSpec::well_even(2.0, 1.0), PotentialSpec::monotone_odd(2.0), gauss_b_even()] {
            for &x in &[-2.3, -0.4, 0.0, 0.7, 3.1] {
                let c = spec.parts(Complex64::new(x, 0.0));
                let r = spec.parts_real(x);
                assert!((c.a.re - r.a).abs() < 1e-14 && c.a.im.abs() < 1e-14);
                assert!((c.da.re - r.da).abs() < 1e-14);
                assert!((c.b.re - r.b).abs() < 1e-14);
                assert!((c.db.re - r.db).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(PotentialSpec::well_even(2.0, 1.0).classify_symmetry(), SymmetryClass::AEvenBOdd);
        assert_eq!(PotentialSpec::monotone_odd(2.0).classify_symmetry(), SymmetryClass::AOddBEven);
        assert_eq!(gauss_b_even().classify_symmetry(), SymmetryClass::None);
    }

    #[test]
    fn a1_examples() {
        let w = PotentialSpec::well_even(2.0, 1.0).validate_a1(1.5, 8.0).unwrap();
        let x = 2f64.ln().sqrt();
        assert!((w.alpha0 + x).abs() < 1e-12 && (w.beta0 - x).abs() < 1e-12);
        assert_eq!(w.well_type, WellType::SimpleWell);

        let m = PotentialSpec::monotone_odd(2.0).validate_a1(1.0, 8.0).unwrap();
        let x = 0.5f64.atanh();
        assert!((m.alpha0 + x).abs() < 1e-12 && (m.beta0 - x).abs() < 1e-12);
        assert_eq!(m.well_type, WellType::Monotonic);

        let err = PotentialSpec::monotone_odd(2.0).validate_a1(2.5, 8.0).unwrap_err();
        assert_eq!(err, Error::A1Violated(A1Violation::NoCrossings));
    }

    #[test]
    fn a1_rejects_double_well_and_open_well() {
        // A = 2 - 1.5 exp(-x^2/4) + 1.2 exp(-x^2): bump at 0 splits the well in two.
        let double = PotentialSpec::custom(
            &[
                Term::new(Component::A, TermKind::Const, 2.0, 0.0),
                Term::new(Component::A, TermKind::Gauss, -1.5, 0.25),
                Term::new(Component::A, TermKind::Gauss, 1.2, 1.0),
            ],
            10.0,
        );
        assert_eq!(double.validate_a1(1.5, 8.0).unwrap_err(), Error::A1Violated(A1Violation::ExtraCrossings(4)));
        // A = 1 + tanh(x) only reaches 1.5 on the right.
        let half = PotentialSpec::custom(
            &[
                Term::new(Component::A, TermKind::Const, 1.0, 0.0),
                Term::new(Component::A, TermKind::Tanh, 1.0, 1.0),
            ],
            0.5,
        );
        assert_eq!(half.validate_a1(1.5, 8.0).unwrap_err(), Error::A1Violated(A1Violation::MissingCrossing));
        let r = PotentialSpec::<f64>::well_even(1.0, 0.5).validate_a1(0.9, 8.0).unwrap();
        assert!((r.margin_at_infinity - 0.1).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_bad_params() {
        assert!(PotentialSpec::well_even(1.0, 2.0).validate().is_err());
        assert!(PotentialSpec::<f64>::monotone_odd(-1.0).validate().is_err());
        let bad = PotentialSpec { family: Family::CustomSumOfTerms, params: vec![0.0, 7.0, 1.0, 1.0], strip_half_width: 1.0 };
        assert!(bad.validate().is_err());
        assert!(gauss_b_even().validate().is_ok());
    }

    #[test]
    fn json_shape() {
        let spec = PotentialSpec::well_even(2.0, 1.0);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"family":"well-even","params":[2.0,1.0],"strip_half_width":10.0}"#);
        let back: PotentialSpec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn single_precision_evaluates() {
        let spec = PotentialSpec::<f32>::monotone_odd(2.0);
        let r = spec.validate_a1(1.0, 8.0).unwrap();
        assert!((r.beta0 - 0.5f32.atanh()).abs() < 1e-5);
    }
}
