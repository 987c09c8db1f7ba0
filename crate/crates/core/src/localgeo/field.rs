//! Points of ℂ², Hermitian 2×2 forms, scalar fields and their Levi forms.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};

/// Default central-difference step for second derivatives.
pub const FD_STEP: f64 = 1e-4;
/// Central-difference step for first derivatives.
pub const GRADIENT_STEP: f64 = 1e-6;

/// A point `(z, w) = (x + iy, u + iv)`, identified with `(x, y, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointC2 {
    pub z: Complex64,
    pub w: Complex64,
}

impl PointC2 {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        PointC2 { z, w }
    }

    pub fn from_real([x, y, u, v]: [f64; 4]) -> Self {
        PointC2 {
            z: Complex64::new(x, y),
            w: Complex64::new(u, v),
        }
    }

    pub fn to_real(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn is_finite(self) -> bool {
        self.to_real().iter().all(|c| c.is_finite())
    }

    /// Moves `h` along real coordinate `axis`.
    pub fn shifted(self, axis: usize, h: f64) -> Self {
        let mut r = self.to_real();
        r[axis] += h;
        PointC2::from_real(r)
    }
}

impl From<[f64; 4]> for PointC2 {
    fn from(r: [f64; 4]) -> Self {
        PointC2::from_real(r)
    }
}

impl fmt::Display for PointC2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, u, v] = self.to_real();
        write!(f, "({x:+.6}{y:+.6}i, {u:+.6}{v:+.6}i)")
    }
}

/// The Hermitian matrix `[[a11, a12], [conj(a12), a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HermitianForm2 {
    pub a11: f64,
    pub a22: f64,
    pub a12: Complex64,
}

impl HermitianForm2 {
    pub fn new(a11: f64, a22: f64, a12: Complex64) -> Self {
        HermitianForm2 { a11, a22, a12 }
    }

    pub fn diagonal(a11: f64, a22: f64) -> Self {
        HermitianForm2::new(a11, a22, Complex64::new(0.0, 0.0))
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12.norm_sqr()
    }

    /// Eigenvalues in increasing order. The one of smaller magnitude is
    /// recovered from the determinant to avoid cancellation.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a11 + self.a22);
        let half_gap = 0.5 * (self.a11 - self.a22);
        let radius = half_gap.hypot(self.a12.norm());
        if mean >= 0.0 {
            let hi = mean + radius;
            let lo = if hi > 0.0 { self.det() / hi } else { 0.0 };
            [lo.min(hi), hi]
        } else {
            let lo = mean - radius;
            [lo, (self.det() / lo).max(lo)]
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &HermitianForm2) -> f64 {
        let d12 = self.a12 - other.a12;
        [
            (self.a11 - other.a11).abs(),
            (self.a22 - other.a22).abs(),
            d12.re.abs(),
            d12.im.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianForm2::new(c * self.a11, c * self.a22, self.a12 * c)
    }

    /// `c · ∂f ⊗ ∂̄f` for the complex gradient `(f_z, f_w)`.
    pub fn rank_one(dz: Complex64, dw: Complex64, c: f64) -> Self {
        HermitianForm2::new(c * dz.norm_sqr(), c * dw.norm_sqr(), dz * dw.conj() * c)
    }
}

impl std::ops::Add for HermitianForm2 {
    type Output = HermitianForm2;

    fn add(self, rhs: HermitianForm2) -> HermitianForm2 {
        HermitianForm2::new(self.a11 + rhs.a11, self.a22 + rhs.a22, self.a12 + rhs.a12)
    }
}

/// An axis-aligned box in `(x, y, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box4 {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Box4 {
    pub fn new(lo: [f64; 4], hi: [f64; 4]) -> Self {
        Box4 { lo, hi }
    }

    pub fn cube(half_width: f64) -> Self {
        Box4::new([-half_width; 4], [half_width; 4])
    }

    pub fn unbounded() -> Self {
        Box4::cube(f64::INFINITY)
    }

    pub fn contains(&self, p: PointC2) -> bool {
        let r = p.to_real();
        (0..4).all(|k| r[k] >= self.lo[k] && r[k] <= self.hi[k])
    }
}

/// A real function on (a chart of) ℂ².
///
/// Closed-form jets are optional. Without them the gradient and Levi form
/// fall back to central differences.
pub trait ScalarField: Sync {
    fn value(&self, p: PointC2) -> f64;

    fn closed_gradient(&self, _p: PointC2) -> Option<[f64; 4]> {
        None
    }

    fn closed_levi(&self, _p: PointC2) -> Option<HermitianForm2> {
        None
    }

    /// The chart on which the field is meant to be used.
    fn domain(&self) -> Box4 {
        Box4::unbounded()
    }

    fn has_closed_jets(&self) -> bool {
        self.closed_levi(PointC2::default()).is_some()
    }

    fn gradient(&self, p: PointC2) -> [f64; 4] {
        self.closed_gradient(p)
            .unwrap_or_else(|| fd_gradient(self, p, GRADIENT_STEP))
    }

    /// Closed-form Levi form when available, otherwise [`levi_fd`] at [`FD_STEP`].
    fn levi(&self, p: PointC2) -> Result<HermitianForm2> {
        match self.closed_levi(p) {
            Some(form) => Ok(form),
            None => levi_fd(self, p, FD_STEP),
        }
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn value(&self, p: PointC2) -> f64 {
        (**self).value(p)
    }
    fn closed_gradient(&self, p: PointC2) -> Option<[f64; 4]> {
        (**self).closed_gradient(p)
    }
    fn closed_levi(&self, p: PointC2) -> Option<HermitianForm2> {
        (**self).closed_levi(p)
    }
    fn domain(&self) -> Box4 {
        (**self).domain()
    }
}

/// Wraps a closure as a field with finite-difference jets only.
pub struct FnField<G> {
    f: G,
    domain: Box4,
}

impl<G: Fn(PointC2) -> f64 + Sync> FnField<G> {
    pub fn new(f: G) -> Self {
        FnField {
            f,
            domain: Box4::unbounded(),
        }
    }

    pub fn on(mut self, domain: Box4) -> Self {
        self.domain = domain;
        self
    }
}

impl<G: Fn(PointC2) -> f64 + Sync> ScalarField for FnField<G> {
    fn value(&self, p: PointC2) -> f64 {
        (self.f)(p)
    }
    fn domain(&self) -> Box4 {
        self.domain
    }
}

/// `∂f/∂z = ½(f_x − i f_y)` and `∂f/∂w = ½(f_u − i f_v)`.
pub fn complex_gradient(grad: [f64; 4]) -> (Complex64, Complex64) {
    (
        Complex64::new(0.5 * grad[0], -0.5 * grad[1]),
        Complex64::new(0.5 * grad[2], -0.5 * grad[3]),
    )
}

pub fn fd_gradient<F: ScalarField + ?Sized>(field: &F, p: PointC2, h: f64) -> [f64; 4] {
    let mut g = [0.0; 4];
    for (k, gk) in g.iter_mut().enumerate() {
        *gk = (field.value(p.shifted(k, h)) - field.value(p.shifted(k, -h))) / (2.0 * h);
    }
    g
}

/// Levi form by central differences: 9 evaluations for the pure second
/// derivatives and 16 for the four mixed pairs.
///
/// `ρ_zz̄ = ¼(ρ_xx + ρ_yy)`, `ρ_ww̄ = ¼(ρ_uu + ρ_vv)` and
/// `ρ_zw̄ = ¼[(ρ_xu + ρ_yv) + i(ρ_xv − ρ_yu)]`.
pub fn levi_fd<F: ScalarField + ?Sized>(field: &F, p: PointC2, h: f64) -> Result<HermitianForm2> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    let eval = |q: PointC2| -> Result<f64> {
        let v = field.value(q);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numerical(format!("field is not finite at {q}")))
        }
    };
    let f0 = eval(p)?;
    let mut pure = [0.0; 4];
    for (k, d) in pure.iter_mut().enumerate() {
        *d = (eval(p.shifted(k, h))? - 2.0 * f0 + eval(p.shifted(k, -h))?) / (h * h);
    }
    let mixed = |a: usize, b: usize| -> Result<f64> {
        let pp = eval(p.shifted(a, h).shifted(b, h))?;
        let pm = eval(p.shifted(a, h).shifted(b, -h))?;
        let mp = eval(p.shifted(a, -h).shifted(b, h))?;
        let mm = eval(p.shifted(a, -h).shifted(b, -h))?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    };
    let (xu, yv, xv, yu) = (mixed(0, 2)?, mixed(1, 3)?, mixed(0, 3)?, mixed(1, 2)?);
    Ok(HermitianForm2::new(
        0.25 * (pure[0] + pure[1]),
        0.25 * (pure[2] + pure[3]),
        Complex64::new(0.25 * (xu + yv), 0.25 * (xv - yu)),
    ))
}

/// The two local model functions with closed-form jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalModel {
    /// `ρ = |w − z̄²|²` near a special hyperbolic point.
    SpecialHyperbolic,
    /// `ρ = (x² + u²)(y² + v²)` near a double point of two totally real planes.
    DoublePoint,
}

impl LocalModel {
    pub const ALL: [LocalModel; 2] = [LocalModel::SpecialHyperbolic, LocalModel::DoublePoint];

    pub fn name(&self) -> &'static str {
        match self {
            LocalModel::SpecialHyperbolic => "special_hyperbolic",
            LocalModel::DoublePoint => "double_point",
        }
    }

    /// Euclidean distance to the locus where the Levi form degenerates:
    /// `{z = 0}`, resp. `{w = iz} ∪ {w = −iz}`.
    pub fn degeneracy_distance(&self, p: PointC2) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        match self {
            LocalModel::SpecialHyperbolic => p.z.norm(),
            LocalModel::DoublePoint => {
                let d_plus = (p.w - i * p.z).norm();
                let d_minus = (p.w + i * p.z).norm();
                d_plus.min(d_minus) / std::f64::consts::SQRT_2
            }
        }
    }
}

impl fmt::Display for LocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl ScalarField for LocalModel {
    fn value(&self, p: PointC2) -> f64 {
        let [x, y, u, v] = p.to_real();
        match self {
            LocalModel::SpecialHyperbolic => (p.w - p.z.conj() * p.z.conj()).norm_sqr(),
            LocalModel::DoublePoint => (x * x + u * u) * (y * y + v * v),
        }
    }

    fn closed_gradient(&self, p: PointC2) -> Option<[f64; 4]> {
        let [x, y, u, v] = p.to_real();
        Some(match self {
            LocalModel::SpecialHyperbolic => {
                let re = u - x * x + y * y;
                let im = v + 2.0 * x * y;
                [
                    -4.0 * x * re + 4.0 * y * im,
                    4.0 * y * re + 4.0 * x * im,
                    2.0 * re,
                    2.0 * im,
                ]
            }
            LocalModel::DoublePoint => {
                let a = x * x + u * u;
                let b = y * y + v * v;
                [2.0 * x * b, 2.0 * y * a, 2.0 * u * b, 2.0 * v * a]
            }
        })
    }

    fn closed_levi(&self, p: PointC2) -> Option<HermitianForm2> {
        Some(levi_closed(*self, p))
    }

    fn domain(&self) -> Box4 {
        Box4::cube(1.0)
    }
}

pub fn levi_closed(model: LocalModel, p: PointC2) -> HermitianForm2 {
    let [x, y, u, v] = p.to_real();
    match model {
        LocalModel::SpecialHyperbolic => HermitianForm2::diagonal(4.0 * p.z.norm_sqr(), 1.0),
        LocalModel::DoublePoint => {
            let half = 0.5 * p.norm_sqr();
            HermitianForm2::new(half, half, Complex64::new(0.0, x * v - y * u))
        }
    }
}

/// Relative tolerance of [`det_identity_check`].
pub const IDENTITY_TOL: f64 = 1e-12;

/// Checks `4 det L = r⁴ − 4(xv − yu)² ≥ (|z|² − |w|²)²` for the double point model.
pub fn det_identity_check(p: PointC2) -> Certificate {
    let [x, y, u, v] = p.to_real();
    let r2 = p.norm_sqr();
    let four_det = 4.0 * levi_closed(LocalModel::DoublePoint, p).det();
    let cross = x * v - y * u;
    let quartic = r2 * r2 - 4.0 * cross * cross;
    let lower = (p.z.norm_sqr() - p.w.norm_sqr()).powi(2);
    let scale = (r2 * r2).max(f64::MIN_POSITIVE);
    let rel_err = (four_det - quartic).abs() / scale;
    let identity = rel_err <= IDENTITY_TOL;
    let bound = four_det >= lower - IDENTITY_TOL * scale;
    let real = p.to_real().to_vec();
    Certificate::new(identity && bound, "double-point-determinant")
        .with(Witness::labeled("four_det", real.clone(), four_det))
        .with(Witness::labeled("quartic", real.clone(), quartic))
        .with(Witness::labeled("lower_bound", real.clone(), lower))
        .with(Witness::labeled("relative_error", real, rel_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64, u: f64, v: f64) -> PointC2 {
        PointC2::from_real([x, y, u, v])
    }

    #[test]
    fn double_point_closed_form_examples() {
        let l = levi_closed(LocalModel::DoublePoint, pt(1.0, 0.0, 0.0, 0.0));
        assert_eq!(l, HermitianForm2::new(0.5, 0.5, Complex64::new(0.0, 0.0)));

        let l = levi_closed(LocalModel::DoublePoint, pt(1.0, 0.0, 0.0, 1.0));
        assert_eq!(l.a11, 1.0);
        assert_eq!(l.a22, 1.0);
        assert_eq!(l.a12, Complex64::new(0.0, 1.0));
        assert_eq!(l.eigenvalues(), [0.0, 2.0]);
    }

    #[test]
    fn special_hyperbolic_closed_form() {
        let l = levi_closed(LocalModel::SpecialHyperbolic, pt(0.0, 0.0, 0.3, -0.2));
        assert_eq!(l, HermitianForm2::diagonal(0.0, 1.0));
        let l = levi_closed(LocalModel::SpecialHyperbolic, pt(1.0, 0.0, 0.0, 0.0));
        assert_eq!(l, HermitianForm2::diagonal(4.0, 1.0));
    }

    #[test]
    fn fd_matches_closed_at_examples() {
        let p = pt(1.0, 0.0, 0.0, 0.0);
        for model in LocalModel::ALL {
            let fd = levi_fd(&model, p, 1e-4).unwrap();
            assert!(
                fd.max_abs_diff(&levi_closed(model, p)) < 1e-6,
                "{model}: {fd:?}"
            );
        }
    }

    #[test]
    fn closed_gradients_match_differences() {
        let p = pt(0.3, -0.7, 0.2, 0.45);
        for model in LocalModel::ALL {
            let g = model.closed_gradient(p).unwrap();
            let fd = fd_gradient(&model, p, 1e-6);
            for k in 0..4 {
                assert!((g[k] - fd[k]).abs() < 1e-8, "{model} axis {k}");
            }
        }
    }

    #[test]
    fn constant_field_has_zero_form() {
        let f = FnField::new(|_| 3.5);
        let l = levi_fd(&f, pt(0.1, 0.2, 0.3, 0.4), 1e-4).unwrap();
        assert_eq!(l, HermitianForm2::default());
        assert!(!f.has_closed_jets());
    }

    #[test]
    fn fd_rejects_bad_step_and_values() {
        assert!(levi_fd(&LocalModel::DoublePoint, PointC2::default(), 0.0).is_err());
        let f = FnField::new(|p| 1.0 / p.z.re);
        assert!(matches!(
            levi_fd(&f, pt(0.0, 0.0, 0.0, 0.0), 1e-4),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn determinant_identity_examples() {
        let cases = [
            (pt(1.0, 0.0, 0.0, 1.0), 0.0),
            (pt(1.0, 0.0, 0.0, 0.0), 1.0),
            (pt(0.5, 0.0, 0.0, 0.25), 0.1875 * 0.1875),
        ];
        for (p, expect) in cases {
            let cert = det_identity_check(p);
            assert!(cert.pass, "{p}");
            let Witness::Sample { value, .. } = cert.witnesses[0] else {
                panic!()
            };
            assert!((value - expect).abs() < 1e-15);
        }
        // w = 0.25i is a positive multiple of iz, so the bound is attained
        let p = pt(0.5, 0.0, 0.0, 0.25);
        let four_det = 4.0 * levi_closed(LocalModel::DoublePoint, p).det();
        assert!(four_det > 0.0);
        assert!((four_det - 0.1875f64.powi(2)).abs() < 1e-15);
        // w = 0.25 is not, and the inequality is strict
        let p = pt(0.5, 0.0, 0.25, 0.0);
        let four_det = 4.0 * levi_closed(LocalModel::DoublePoint, p).det();
        assert!(four_det - 0.1875f64.powi(2) > 0.01);
        assert!(det_identity_check(p).pass);
    }

    #[test]
    fn degeneracy_distance_vanishes_on_locus() {
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.3, -0.4);
        for w in [i * z, -i * z] {
            let p = PointC2::new(z, w);
            assert!(LocalModel::DoublePoint.degeneracy_distance(p) < 1e-15);
            assert!(
                levi_closed(LocalModel::DoublePoint, p)
                    .min_eigenvalue()
                    .abs()
                    < 1e-15
            );
        }
    }
}
