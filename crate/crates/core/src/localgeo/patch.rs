//! Parametrized real surfaces in ℂ² and the complex determinant of their
//! tangent planes.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::PointC2;
use crate::error::{Error, Result};
use crate::surgery::Sign;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A tangent vector in ℂ².
pub type Tangent = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ParamDomain {
    Rect { s: [f64; 2], t: [f64; 2] },
    Disc { center: [f64; 2], radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl ParamDomain {
    pub fn contains(&self, s: f64, t: f64) -> bool {
        match *self {
            ParamDomain::Rect {
                s: [s0, s1],
                t: [t0, t1],
            } => (s0..=s1).contains(&s) && (t0..=t1).contains(&t),
            ParamDomain::Disc { center, radius } => (s - center[0]).hypot(t - center[1]) <= radius,
            ParamDomain::Annulus { inner, outer } => (inner..=outer).contains(&s.hypot(t)),
        }
    }

    /// Bounding rectangle as `([s_min, s_max], [t_min, t_max])`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            ParamDomain::Rect { s, t } => (s, t),
            ParamDomain::Disc { center, radius } => (
                [center[0] - radius, center[0] + radius],
                [center[1] - radius, center[1] + radius],
            ),
            ParamDomain::Annulus { outer, .. } => ([-outer, outer], [-outer, outer]),
        }
    }
}

/// A smooth map from a planar parameter domain into ℂ².
pub trait SurfacePatch: Send + Sync {
    fn map(&self, s: f64, t: f64) -> PointC2;

    fn domain(&self) -> ParamDomain;

    /// `(∂_s, ∂_t)`; central differences unless overridden.
    fn tangents(&self, s: f64, t: f64) -> (Tangent, Tangent) {
        let h = 1e-6;
        let diff = |a: PointC2, b: PointC2| [(a.z - b.z) / (2.0 * h), (a.w - b.w) / (2.0 * h)];
        (
            diff(self.map(s + h, t), self.map(s - h, t)),
            diff(self.map(s, t + h), self.map(s, t - h)),
        )
    }

    /// Distinguished parameter points, such as analytically known complex
    /// points or double-point preimages.
    fn marks(&self) -> Vec<[f64; 2]> {
        Vec::new()
    }

    fn label(&self) -> String;
}

fn as_real(v: &Tangent) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

/// `T_s[0]·T_t[1] − T_s[1]·T_t[0]`, without domain or immersion checks.
pub fn tangent_det(ts: &Tangent, tt: &Tangent) -> Complex64 {
    ts[0] * tt[1] - ts[1] * tt[0]
}

/// Checks that the two tangents are linearly independent over ℝ.
pub fn is_immersed(ts: &Tangent, tt: &Tangent) -> bool {
    let (a, b) = (as_real(ts), as_real(tt));
    let dot = |p: &[f64; 4], q: &[f64; 4]| p.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
    let (aa, bb, ab) = (dot(&a, &a), dot(&b, &b), dot(&a, &b));
    aa * bb - ab * ab > 1e-12 * aa * bb && aa * bb > 0.0
}

/// The complex 2×2 determinant of the tangent vectors. It vanishes exactly
/// where the tangent plane is a complex line.
pub fn complex_det<P: SurfacePatch + ?Sized>(patch: &P, s: f64, t: f64) -> Result<Complex64> {
    if !patch.domain().contains(s, t) {
        return Err(Error::invalid(format!(
            "({s}, {t}) lies outside the domain of {}",
            patch.label()
        )));
    }
    let (ts, tt) = patch.tangents(s, t);
    if !is_immersed(&ts, &tt) {
        return Err(Error::numerical(format!(
            "{} is not immersed at ({s}, {t})",
            patch.label()
        )));
    }
    Ok(tangent_det(&ts, &tt))
}

/// `+1` when the oriented tangent plane at a complex point carries the
/// complex orientation, `−1` otherwise. Only meaningful near complex points.
pub fn orientation_sign(ts: &Tangent, tt: &Tangent) -> i64 {
    let im: f64 = (0..2).map(|k| (tt[k] * ts[k].conj()).im).sum();
    if im >= 0.0 {
        1
    } else {
        -1
    }
}

type GraphFn = dyn Fn(Complex64) -> [Complex64; 3] + Send + Sync;

/// The graph `w = f(z)` over a disc, parametrized by `z = s + it`.
pub struct GraphPatch {
    name: String,
    jets: Box<GraphFn>,
    radius: f64,
}

impl GraphPatch {
    /// `jets(z)` returns `[f, ∂f/∂z, ∂f/∂z̄]`.
    pub fn new(
        name: impl Into<String>,
        radius: f64,
        jets: impl Fn(Complex64) -> [Complex64; 3] + Send + Sync + 'static,
    ) -> Self {
        GraphPatch {
            name: name.into(),
            jets: Box::new(jets),
            radius,
        }
    }

    /// `w = z z̄`, a special elliptic point at the origin.
    pub fn special_elliptic() -> Self {
        GraphPatch::new("w = z z̄", 1.0, |z| [z * z.conj(), z.conj(), z])
    }

    /// `w = z̄²`, a special hyperbolic point at the origin.
    pub fn special_hyperbolic() -> Self {
        GraphPatch::new("w = z̄²", 1.0, |z| {
            let zb = z.conj();
            [zb * zb, Complex64::new(0.0, 0.0), 2.0 * zb]
        })
    }

    /// `w = z̄³`, a degenerate complex point of index −2.
    pub fn cubic() -> Self {
        GraphPatch::new("w = z̄³", 1.0, |z| {
            let zb = z.conj();
            [zb * zb * zb, Complex64::new(0.0, 0.0), 3.0 * zb * zb]
        })
    }

    /// `w = z`, a complex line.
    pub fn complex_line() -> Self {
        GraphPatch::new("w = z", 1.0, |z| {
            [z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        })
    }

    /// `∂f/∂z̄` at `z`.
    pub fn dbar(&self, z: Complex64) -> Complex64 {
        (self.jets)(z)[2]
    }
}

impl fmt::Debug for GraphPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphPatch")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .finish()
    }
}

impl SurfacePatch for GraphPatch {
    fn map(&self, s: f64, t: f64) -> PointC2 {
        let z = Complex64::new(s, t);
        PointC2::new(z, (self.jets)(z)[0])
    }

    fn domain(&self) -> ParamDomain {
        ParamDomain::Disc {
            center: [0.0, 0.0],
            radius: self.radius,
        }
    }

    fn tangents(&self, s: f64, t: f64) -> (Tangent, Tangent) {
        let [_, fz, fzb] = (self.jets)(Complex64::new(s, t));
        ([Complex64::new(1.0, 0.0), fz + fzb], [I, I * (fz - fzb)])
    }

    fn marks(&self) -> Vec<[f64; 2]> {
        vec![[0.0, 0.0]]
    }

    fn label(&self) -> String {
        format!("graph {}", self.name)
    }
}

/// Weinstein's Lagrangian sphere `(x, y, u) ↦ (x(1 + 2iu), y(1 + 2iu))`.
pub struct WeinsteinSphere;

impl WeinsteinSphere {
    pub fn map_sphere([x, y, u]: [f64; 3]) -> PointC2 {
        let f = Complex64::new(1.0, 2.0 * u);
        PointC2::new(x * f, y * f)
    }

    /// Pushes a tangent vector of the sphere at `q` forward to ℂ².
    pub fn push_forward([x, y, u]: [f64; 3], [dx, dy, du]: [f64; 3]) -> Tangent {
        let f = Complex64::new(1.0, 2.0 * u);
        [dx * f + du * 2.0 * x * I, dy * f + du * 2.0 * y * I]
    }

    /// Six hemispherical caps covering the sphere, each oriented by the
    /// outward normal.
    pub fn charts() -> Vec<WeinsteinChart> {
        let mut v = Vec::with_capacity(6);
        for axis in 0..3 {
            for positive in [true, false] {
                v.push(WeinsteinChart { axis, positive });
            }
        }
        v
    }

    /// Oriented tangent planes of the two branches through the double point
    /// `π(0,0,1) = π(0,0,−1) = 0`.
    pub fn double_point_planes() -> (
        super::orientation::OrientedPlane,
        super::orientation::OrientedPlane,
    ) {
        use super::orientation::OrientedPlane;
        let branch = |chart: WeinsteinChart| {
            let (a, b) = chart.tangents(0.0, 0.0);
            OrientedPlane::from_complex(a, b)
        };
        (
            branch(WeinsteinChart {
                axis: 2,
                positive: true,
            }),
            branch(WeinsteinChart {
                axis: 2,
                positive: false,
            }),
        )
    }
}

/// Radius of each cap in its tangent coordinates. Any radius above √(2/3)
/// covers the sphere.
pub const WEINSTEIN_CAP_RADIUS: f64 = 0.85;

/// The cap of the unit sphere around `±e_axis`, parametrized by the other two
/// coordinates in the cyclic order that matches the outward orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeinsteinChart {
    pub axis: usize,
    pub positive: bool,
}

impl WeinsteinChart {
    fn param_axes(&self) -> (usize, usize) {
        let (a, b) = ((self.axis + 1) % 3, (self.axis + 2) % 3);
        if self.positive {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn sphere_point(&self, s: f64, t: f64) -> [f64; 3] {
        let (a, b) = self.param_axes();
        let sign = if self.positive { 1.0 } else { -1.0 };
        let mut q = [0.0; 3];
        q[a] = s;
        q[b] = t;
        q[self.axis] = sign * (1.0 - s * s - t * t).max(0.0).sqrt();
        q
    }
}

impl SurfacePatch for WeinsteinChart {
    fn map(&self, s: f64, t: f64) -> PointC2 {
        WeinsteinSphere::map_sphere(self.sphere_point(s, t))
    }

    fn domain(&self) -> ParamDomain {
        ParamDomain::Disc {
            center: [0.0, 0.0],
            radius: WEINSTEIN_CAP_RADIUS,
        }
    }

    fn tangents(&self, s: f64, t: f64) -> (Tangent, Tangent) {
        let q = self.sphere_point(s, t);
        let (a, b) = self.param_axes();
        let height = q[self.axis];
        let mut ds = [0.0; 3];
        let mut dt = [0.0; 3];
        ds[a] = 1.0;
        dt[b] = 1.0;
        ds[self.axis] = -s / height;
        dt[self.axis] = -t / height;
        (
            WeinsteinSphere::push_forward(q, ds),
            WeinsteinSphere::push_forward(q, dt),
        )
    }

    fn marks(&self) -> Vec<[f64; 2]> {
        if self.axis == 2 {
            vec![[0.0, 0.0]]
        } else {
            Vec::new()
        }
    }

    fn label(&self) -> String {
        let name = ["x", "y", "u"][self.axis];
        let sign = if self.positive { '+' } else { '-' };
        format!("Weinstein cap {sign}{name}")
    }
}

/// Σ₊ = {(x + iu)(y − iv) = ε} and Σ₋ = {(x + iu)(y + iv) = ε}, parametrized
/// by `A = x + iu = s + it` on the annulus `|ε|/R ≤ |A| ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaHandle {
    pub sign: Sign,
    pub epsilon: f64,
    pub outer: f64,
}

impl SigmaHandle {
    pub fn new(sign: Sign, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon != 0.0) {
            return Err(Error::invalid(format!(
                "handle parameter ε = {epsilon} must be finite and non-zero"
            )));
        }
        Ok(SigmaHandle {
            sign,
            epsilon,
            outer: 1.0,
        })
    }

    fn sigma(&self) -> f64 {
        match self.sign {
            Sign::Positive => -1.0,
            Sign::Negative => 1.0,
        }
    }

    fn assemble(&self, a: Complex64, b: Complex64) -> [Complex64; 2] {
        [
            Complex64::new(a.re, b.re),
            Complex64::new(a.im, self.sigma() * b.im),
        ]
    }

    /// Analytic complex points of Σ₋: `x = y = ±√(ε/2)`, `v = −u = ±√(ε/2)`.
    pub fn analytic_complex_points(&self) -> Vec<[f64; 2]> {
        if self.sign == Sign::Positive || self.epsilon < 0.0 {
            return Vec::new();
        }
        let c = (self.epsilon / 2.0).sqrt();
        let mut v = Vec::with_capacity(4);
        for a in [c, -c] {
            for b in [c, -c] {
                v.push([a, b]);
            }
        }
        v
    }
}

impl SurfacePatch for SigmaHandle {
    fn map(&self, s: f64, t: f64) -> PointC2 {
        let a = Complex64::new(s, t);
        let [z, w] = self.assemble(a, self.epsilon / a);
        PointC2::new(z, w)
    }

    fn domain(&self) -> ParamDomain {
        ParamDomain::Annulus {
            inner: self.epsilon.abs() / self.outer,
            outer: self.outer,
        }
    }

    fn tangents(&self, s: f64, t: f64) -> (Tangent, Tangent) {
        let a = Complex64::new(s, t);
        let db = -self.epsilon / (a * a);
        let one = Complex64::new(1.0, 0.0);
        (self.assemble(one, db), self.assemble(I, db * I))
    }

    fn marks(&self) -> Vec<[f64; 2]> {
        self.analytic_complex_points()
    }

    fn label(&self) -> String {
        let sign = match self.sign {
            Sign::Positive => '+',
            Sign::Negative => '-',
        };
        format!("Σ{sign}(ε={})", self.epsilon)
    }
}

/// A sheet of the transverse double point `Λ₁ ∪ Λ₂`.
///
/// `Λ₁ = {y = v = 0}` is oriented by `∂x ∧ ∂u`, and `Λ₂ = {x = u = 0}` by
/// `κ ∂v ∧ ∂y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatSheet {
    pub second: bool,
    pub kappa: i8,
    pub radius: f64,
}

impl FlatSheet {
    pub fn first() -> Self {
        FlatSheet {
            second: false,
            kappa: 1,
            radius: 1.0,
        }
    }

    pub fn second(kappa: i8) -> Self {
        FlatSheet {
            second: true,
            kappa: kappa.signum(),
            radius: 1.0,
        }
    }

    pub fn plane(&self) -> super::orientation::OrientedPlane {
        let (a, b) = self.tangents(0.0, 0.0);
        super::orientation::OrientedPlane::from_complex(a, b)
    }
}

impl SurfacePatch for FlatSheet {
    fn map(&self, s: f64, t: f64) -> PointC2 {
        match (self.second, self.kappa > 0) {
            (false, _) => PointC2::from_real([s, 0.0, t, 0.0]),
            (true, true) => PointC2::from_real([0.0, t, 0.0, s]),
            (true, false) => PointC2::from_real([0.0, s, 0.0, t]),
        }
    }

    fn domain(&self) -> ParamDomain {
        ParamDomain::Disc {
            center: [0.0, 0.0],
            radius: self.radius,
        }
    }

    fn tangents(&self, _s: f64, _t: f64) -> (Tangent, Tangent) {
        let a = self.map(1.0, 0.0);
        let b = self.map(0.0, 1.0);
        ([a.z, a.w], [b.z, b.w])
    }

    fn marks(&self) -> Vec<[f64; 2]> {
        vec![[0.0, 0.0]]
    }

    fn label(&self) -> String {
        if self.second {
            format!("Λ₂ (κ = {})", self.kappa)
        } else {
            "Λ₁".to_string()
        }
    }
}

/// The named local models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "epsilon", rename_all = "snake_case")]
pub enum ModelKind {
    Weinstein,
    SigmaPlus(f64),
    SigmaMinus(f64),
    GraphSpecialElliptic,
    GraphSpecialHyperbolic,
    FlatDoublePoint,
}

/// One or more patches that together cover a model surface.
pub struct Atlas {
    pub kind: ModelKind,
    pub charts: Vec<Box<dyn SurfacePatch>>,
}

impl fmt::Debug for Atlas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.charts.iter().map(|c| c.label()).collect();
        f.debug_struct("Atlas")
            .field("kind", &self.kind)
            .field("charts", &labels)
            .finish()
    }
}

pub fn model_patch(kind: ModelKind) -> Result<Atlas> {
    let charts: Vec<Box<dyn SurfacePatch>> = match kind {
        ModelKind::Weinstein => WeinsteinSphere::charts()
            .into_iter()
            .map(|c| Box::new(c) as Box<dyn SurfacePatch>)
            .collect(),
        ModelKind::SigmaPlus(eps) => vec![Box::new(SigmaHandle::new(Sign::Positive, eps)?)],
        ModelKind::SigmaMinus(eps) => vec![Box::new(SigmaHandle::new(Sign::Negative, eps)?)],
        ModelKind::GraphSpecialElliptic => vec![Box::new(GraphPatch::special_elliptic())],
        ModelKind::GraphSpecialHyperbolic => vec![Box::new(GraphPatch::special_hyperbolic())],
        ModelKind::FlatDoublePoint => {
            vec![Box::new(FlatSheet::first()), Box::new(FlatSheet::second(1))]
        }
    };
    Ok(Atlas { kind, charts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn graph_det_is_minus_two_i_dbar() {
        for g in [
            GraphPatch::special_elliptic(),
            GraphPatch::special_hyperbolic(),
            GraphPatch::cubic(),
        ] {
            for (s, t) in [(0.3, 0.1), (-0.5, 0.4), (0.05, -0.02)] {
                let det = complex_det(&g, s, t).unwrap();
                let expect = -2.0 * I * g.dbar(Complex64::new(s, t));
                assert!(close(det, expect, 1e-14), "{}", g.label());
            }
        }
        let line = GraphPatch::complex_line();
        assert_eq!(
            complex_det(&line, 0.3, -0.2).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn hyperbolic_graph_map_and_det() {
        let g = GraphPatch::special_hyperbolic();
        let p = g.map(0.3, 0.4);
        let zb = Complex64::new(0.3, -0.4);
        assert!(close(p.w, zb * zb, 1e-15));
        let det = complex_det(&g, 0.1, 0.0).unwrap();
        assert!(close(det, -2.0 * I * 0.2, 1e-15));
    }

    #[test]
    fn fd_tangents_agree_with_closed_forms() {
        struct Plain<'a>(&'a dyn SurfacePatch);
        impl SurfacePatch for Plain<'_> {
            fn map(&self, s: f64, t: f64) -> PointC2 {
                self.0.map(s, t)
            }
            fn domain(&self) -> ParamDomain {
                self.0.domain()
            }
            fn label(&self) -> String {
                self.0.label()
            }
        }
        let sigma = SigmaHandle::new(Sign::Negative, 0.1).unwrap();
        let cap = WeinsteinChart {
            axis: 1,
            positive: false,
        };
        let patches: [&dyn SurfacePatch; 3] =
            [&sigma, &cap, &GraphPatch::cubic() as &dyn SurfacePatch];
        for patch in patches {
            let (s, t) = (0.31, -0.27);
            let (a, b) = patch.tangents(s, t);
            let (fa, fb) = Plain(patch).tangents(s, t);
            for k in 0..2 {
                assert!(close(a[k], fa[k], 1e-7), "{}", patch.label());
                assert!(close(b[k], fb[k], 1e-7), "{}", patch.label());
            }
        }
    }

    #[test]
    fn weinstein_reference_tangent() {
        let cap = WeinsteinChart {
            axis: 0,
            positive: true,
        };
        let (ts, tt) = cap.tangents(0.0, 0.0);
        assert!(close(ts[0], Complex64::new(0.0, 0.0), 1e-15));
        assert!(close(ts[1], Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(tt[0], 2.0 * I, 1e-15));
        assert!(close(complex_det(&cap, 0.0, 0.0).unwrap(), -2.0 * I, 1e-15));
    }

    #[test]
    fn weinstein_identifies_poles() {
        let north = WeinsteinSphere::map_sphere([0.0, 0.0, 1.0]);
        let south = WeinsteinSphere::map_sphere([0.0, 0.0, -1.0]);
        assert_eq!(north, south);
        assert_eq!(north, PointC2::default());
    }

    #[test]
    fn weinstein_caps_cover_sphere() {
        let charts = WeinsteinSphere::charts();
        for k in 0..500 {
            let theta = 0.37 * k as f64;
            let h = -1.0 + 2.0 * (k as f64 + 0.5) / 500.0;
            let r = (1.0 - h * h).sqrt();
            let q = [r * theta.cos(), r * theta.sin(), h];
            let covered = charts.iter().any(|c| {
                let (a, b) = c.param_axes();
                let sign = if c.positive { 1.0 } else { -1.0 };
                sign * q[c.axis] > 0.0 && q[a].hypot(q[b]) <= WEINSTEIN_CAP_RADIUS
            });
            assert!(covered, "{q:?}");
        }
    }

    #[test]
    fn sigma_handles_lie_on_their_quadrics() {
        for sign in [Sign::Positive, Sign::Negative] {
            let h = SigmaHandle::new(sign, 0.1).unwrap();
            let p = h.map(0.4, -0.3);
            let [x, y, u, v] = p.to_real();
            let lhs = Complex64::new(x, u)
                * match sign {
                    Sign::Positive => Complex64::new(y, -v),
                    Sign::Negative => Complex64::new(y, v),
                };
            assert!(close(lhs, Complex64::new(0.1, 0.0), 1e-15));
        }
        assert!(SigmaHandle::new(Sign::Negative, 0.0).is_err());
    }

    #[test]
    fn sigma_minus_marks_are_complex_points() {
        let h = SigmaHandle::new(Sign::Negative, 0.1).unwrap();
        let marks = h.marks();
        assert_eq!(marks.len(), 4);
        for [s, t] in marks {
            assert!(complex_det(&h, s, t).unwrap().norm() < 1e-14);
            let [x, y, u, v] = h.map(s, t).to_real();
            assert!((x - y).abs() < 1e-15 && (u + v).abs() < 1e-15);
            assert!((x.abs() - 0.05f64.sqrt()).abs() < 1e-15);
        }
        assert!(SigmaHandle::new(Sign::Positive, 0.1)
            .unwrap()
            .marks()
            .is_empty());
    }

    #[test]
    fn models_build() {
        assert_eq!(model_patch(ModelKind::Weinstein).unwrap().charts.len(), 6);
        assert_eq!(
            model_patch(ModelKind::FlatDoublePoint)
                .unwrap()
                .charts
                .len(),
            2
        );
        assert!(model_patch(ModelKind::SigmaPlus(0.0)).is_err());
        let g = model_patch(ModelKind::GraphSpecialHyperbolic).unwrap();
        let p = g.charts[0].map(0.5, 0.0);
        assert_eq!(p.w, Complex64::new(0.25, 0.0));
    }

    #[test]
    fn outside_domain_is_rejected() {
        let g = GraphPatch::special_elliptic();
        assert!(complex_det(&g, 2.0, 0.0).is_err());
        let h = SigmaHandle::new(Sign::Positive, 0.1).unwrap();
        assert!(complex_det(&h, 0.01, 0.0).is_err());
    }
}
