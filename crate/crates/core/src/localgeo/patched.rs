//! Model functions glued into a tubular squared distance, and the
//! plurisubharmonic exhaustion `φ = h_ε∘ρ + δτ` of their sublevel sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{
    complex_gradient, fd_gradient, levi_fd, Box4, HermitianForm2, LocalModel, PointC2, ScalarField,
    FD_STEP, GRADIENT_STEP,
};
use super::psh::{ArgMin, Grid};
use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};

/// The totally real surface carried by a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneSurface {
    /// `{y = v = 0}`.
    Plane,
    /// The graph `w = z̄²`.
    HyperbolicGraph,
    /// `{y = v = 0} ∪ {x = u = 0}`.
    CrossingPlanes,
}

impl SceneSurface {
    /// Euclidean squared distance to the surface. On the graph it is found
    /// by a damped Newton iteration started at the vertical projection.
    pub fn distance_sqr(&self, p: PointC2) -> f64 {
        let [x, y, u, v] = p.to_real();
        match self {
            SceneSurface::Plane => y * y + v * v,
            SceneSurface::CrossingPlanes => (y * y + v * v).min(x * x + u * u),
            SceneSurface::HyperbolicGraph => graph_distance_sqr([x, y, u, v]),
        }
    }
}

fn graph_distance_sqr([x, y, u, v]: [f64; 4]) -> f64 {
    // foot point ζ = a + ib on the graph of ζ ↦ ζ̄² = (a² − b²) − 2iab
    let dist = |a: f64, b: f64| {
        let (p, q) = (a * a - b * b - u, 2.0 * a * b + v);
        (a - x).powi(2) + (b - y).powi(2) + p * p + q * q
    };
    let (mut a, mut b) = (x, y);
    let mut d = dist(a, b);
    for _ in 0..60 {
        let (p, q) = (a * a - b * b - u, 2.0 * a * b + v);
        let ga = 2.0 * (a - x) + 4.0 * a * p + 4.0 * b * q;
        let gb = 2.0 * (b - y) - 4.0 * b * p + 4.0 * a * q;
        let r2 = 8.0 * (a * a + b * b);
        let (haa, hbb, hab) = (2.0 + 4.0 * p + r2, 2.0 - 4.0 * p + r2, 4.0 * q);
        let det = haa * hbb - hab * hab;
        let (mut da, mut db) = if det > 0.0 && haa > 0.0 {
            (-(hbb * ga - hab * gb) / det, -(haa * gb - hab * ga) / det)
        } else {
            let scale = haa.abs() + hbb.abs() + 1.0;
            (-ga / scale, -gb / scale)
        };
        let mut accepted = false;
        for _ in 0..40 {
            let trial = dist(a + da, b + db);
            if trial <= d {
                a += da;
                b += db;
                d = trial;
                accepted = true;
                break;
            }
            da *= 0.5;
            db *= 0.5;
        }
        if !accepted || da.abs() + db.abs() < 1e-16 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    d
}

/// The smooth step `s(t)` built from `e^{−1/t}`: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let (a, b) = (psi(t), psi(1.0 - t));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// A model chart centred at the origin of radius `r`.
///
/// Special hyperbolic charts cut off in `|z|` between `r/2` and `3r/4`;
/// double point charts in `(|z|² + |w|²)/r²` between `1/4` and `3/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelChart {
    pub model: LocalModel,
    pub radius: f64,
}

impl ModelChart {
    fn cutoff_variable(&self, p: PointC2) -> (f64, f64, f64) {
        match self.model {
            LocalModel::SpecialHyperbolic => (p.z.norm() / self.radius, 0.5, 0.75),
            LocalModel::DoublePoint => (p.norm_sqr() / (self.radius * self.radius), 0.25, 0.75),
        }
    }

    /// `χ = 1` near the special point, `χ = 0` outside the chart.
    pub fn cutoff(&self, p: PointC2) -> f64 {
        let (t, a, b) = self.cutoff_variable(p);
        1.0 - smooth_step((t - a) / (b - a))
    }

    pub fn in_annulus(&self, p: PointC2) -> bool {
        let (t, a, b) = self.cutoff_variable(p);
        t > a && t < b
    }
}

fn one() -> f64 {
    1.0
}

/// A totally real surface with model charts around its special points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub surface: SceneSurface,
    #[serde(default)]
    pub charts: Vec<ModelChart>,
    /// The tubular metric is `metric_scale` times the Euclidean one.
    #[serde(default = "one")]
    pub metric_scale: f64,
}

impl Scene {
    pub fn special_hyperbolic(radius: f64) -> Self {
        Scene {
            surface: SceneSurface::HyperbolicGraph,
            charts: vec![ModelChart {
                model: LocalModel::SpecialHyperbolic,
                radius,
            }],
            metric_scale: 1.0,
        }
    }

    pub fn double_point() -> Self {
        Scene {
            surface: SceneSurface::CrossingPlanes,
            charts: vec![ModelChart {
                model: LocalModel::DoublePoint,
                radius: 1.0,
            }],
            metric_scale: 1.0,
        }
    }

    pub fn flat_plane() -> Self {
        Scene {
            surface: SceneSurface::Plane,
            charts: Vec::new(),
            metric_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.metric_scale > 0.0 && self.metric_scale.is_finite()) {
            return Err(Error::invalid("metric scale must be positive"));
        }
        if self.charts.len() > 1 {
            return Err(Error::invalid(
                "model charts overlap: every chart is centred at the origin",
            ));
        }
        for chart in &self.charts {
            if !(chart.radius > 0.0 && chart.radius.is_finite()) {
                return Err(Error::invalid("chart radius must be positive"));
            }
            let fits = matches!(
                (chart.model, self.surface),
                (LocalModel::SpecialHyperbolic, SceneSurface::HyperbolicGraph)
                    | (LocalModel::DoublePoint, SceneSurface::CrossingPlanes)
            );
            if !fits {
                return Err(Error::Mismatch(format!(
                    "{} chart on a {:?} surface",
                    chart.model, self.surface
                )));
            }
        }
        Ok(())
    }

    /// Sublevel parameters `ε` must lie below this bound.
    pub fn epsilon_bound(&self) -> f64 {
        match self.charts.first() {
            Some(c) => (c.radius / 4.0).powi(2),
            None => 0.25,
        }
    }

    /// The box swept by [`exhaustion_certificate`].
    pub fn sweep_box(&self) -> Box4 {
        match (self.surface, self.charts.first()) {
            (SceneSurface::HyperbolicGraph, chart) => {
                let r = chart.map_or(1.0, |c| c.radius);
                let w = r * r + 2.0 * self.epsilon_bound().sqrt();
                Box4::new([-r, -r, -w, -w], [r, r, w, w])
            }
            (_, chart) => Box4::cube(chart.map_or(1.0, |c| c.radius)),
        }
    }

    pub fn cutoff(&self, p: PointC2) -> f64 {
        self.charts.iter().map(|c| c.cutoff(p)).sum()
    }

    pub fn in_cutoff_annulus(&self, p: PointC2) -> bool {
        self.charts.iter().any(|c| c.in_annulus(p))
    }

    /// `τ = χ·(|z|² + |w|²)`, plurisubharmonic where `χ = 1`.
    pub fn tau(&self, p: PointC2) -> f64 {
        self.cutoff(p) * p.norm_sqr()
    }
}

/// `ρ = χρ_model + (1 − χ)ρ₀` with `ρ₀` the tubular squared distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchedRho {
    scene: Scene,
}

impl PatchedRho {
    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn tubular(&self, p: PointC2) -> f64 {
        self.scene.metric_scale * self.scene.surface.distance_sqr(p)
    }
}

impl ScalarField for PatchedRho {
    fn value(&self, p: PointC2) -> f64 {
        let Some(chart) = self.scene.charts.first() else {
            return self.tubular(p);
        };
        let chi = chart.cutoff(p);
        if chi >= 1.0 {
            chart.model.value(p)
        } else if chi <= 0.0 {
            self.tubular(p)
        } else {
            chi * chart.model.value(p) + (1.0 - chi) * self.tubular(p)
        }
    }

    fn domain(&self) -> Box4 {
        self.scene.sweep_box()
    }
}

pub fn build_patched_rho(scene: &Scene) -> Result<PatchedRho> {
    scene.validate()?;
    Ok(PatchedRho {
        scene: scene.clone(),
    })
}

/// `h_ε(t) = −log(ε − t)` with its first two derivatives.
pub fn h_epsilon(epsilon: f64, t: f64) -> (f64, f64, f64) {
    let gap = epsilon - t;
    (-gap.ln(), 1.0 / gap, 1.0 / (gap * gap))
}

/// Width of the collars at both ends of `(0, ε)` left out of the sweep:
/// points closer than this to the surface or to the boundary level.
pub const EXHAUSTION_FLOOR: f64 = 1e-6;

/// Levi form of `(ε − ρ)·φ_zz̄` where `φ = h_ε∘ρ + δτ`, at a point with
/// `ρ(p) < ε`. Scaling by `ε − ρ = 1/h_ε'` keeps the sign and keeps the
/// finite-difference noise in `L_ρ` from being amplified near the boundary.
pub fn exhaustion_levi_scaled(
    rho: &PatchedRho,
    epsilon: f64,
    delta: f64,
    p: PointC2,
) -> Result<HermitianForm2> {
    let gap = epsilon - rho.value(p);
    let levi_rho = levi_fd(rho, p, FD_STEP)?;
    let (rz, rw) = complex_gradient(fd_gradient(rho, p, GRADIENT_STEP));
    let tau = super::field::FnField::new(|q| rho.scene.tau(q));
    let levi_tau = levi_fd(&tau, p, FD_STEP)?;
    Ok(levi_rho + HermitianForm2::rank_one(rz, rw, 1.0 / gap) + levi_tau.scaled(delta * gap))
}

/// Sweeps a grid over `{ρ < ε}`, leaving out collars of width
/// [`EXHAUSTION_FLOOR`] at `ρ = 0` and `ρ = ε`, and passes when the Levi
/// form of `φ = h_ε∘ρ + δτ` is positive definite at every point.
///
/// Points are ranked by the smallest eigenvalue of `(ε − ρ)·L_φ`. The
/// `min_eigenvalue` witness reports the unscaled eigenvalue of `L_φ` at the
/// minimizing point, and a note records whether that point lies in the
/// cutoff annulus.
pub fn exhaustion_certificate(
    scene: &Scene,
    epsilon: f64,
    delta: f64,
    grid_step: f64,
) -> Result<Certificate> {
    let rho = build_patched_rho(scene)?;
    let bound = scene.epsilon_bound();
    if !(epsilon > 0.0 && epsilon < bound) {
        return Err(Error::invalid(format!(
            "ε = {epsilon} must lie in (0, {bound})"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("δ = {delta} must be positive")));
    }
    let grid = Grid::new(scene.sweep_box(), grid_step)?;
    let (best, checked) = (0..grid.len())
        .into_par_iter()
        .map(|idx| -> Result<(ArgMin, usize)> {
            let p = grid.point(idx);
            let value = rho.value(p);
            if !(value > EXHAUSTION_FLOOR && value < epsilon - EXHAUSTION_FLOOR) {
                return Ok((ArgMin::NONE, 0));
            }
            let levi = exhaustion_levi_scaled(&rho, epsilon, delta, p)?;
            Ok((
                ArgMin {
                    value: levi.min_eigenvalue(),
                    index: idx,
                },
                1,
            ))
        })
        .try_reduce(|| (ArgMin::NONE, 0), |a, b| Ok((a.0.min(b.0), a.1 + b.1)))?;
    if !best.found() {
        return Err(Error::invalid(format!(
            "no grid point of step {grid_step} falls in the sublevel set ρ < {epsilon}"
        )));
    }
    let p = grid.point(best.index);
    let value = rho.value(p);
    let region = if scene.in_cutoff_annulus(p) {
        "minimum lies in the cutoff annulus"
    } else {
        "minimum lies outside the cutoff annulus"
    };
    let eigen = best.value / (epsilon - value);
    Ok(Certificate::new(best.value > 0.0, "exhaustion-psh")
        .with(Witness::labeled(
            "min_eigenvalue",
            p.to_real().to_vec(),
            eigen,
        ))
        .with(Witness::labeled("rho", p.to_real().to_vec(), value))
        .with(Witness::note(region))
        .with(Witness::note(format!(
            "{checked} grid points in the sublevel set"
        ))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pt(x: f64, y: f64, u: f64, v: f64) -> PointC2 {
        PointC2::from_real([x, y, u, v])
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(0.5), 0.5);
        assert!((smooth_step(0.3) + smooth_step(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_chart_matches_model_inside() {
        let rho = build_patched_rho(&Scene::special_hyperbolic(0.5)).unwrap();
        for p in [
            pt(0.1, 0.2, 0.3, -0.1),
            pt(0.25, 0.0, 0.4, 0.0),
            pt(0.0, -0.2, 0.0, 0.5),
        ] {
            assert_eq!(rho.value(p), LocalModel::SpecialHyperbolic.value(p));
        }
        let far = pt(0.45, 0.0, 0.3, 0.1);
        assert_eq!(rho.value(far), rho.tubular(far));
    }

    #[test]
    fn double_point_chart_matches_model_inside() {
        let rho = build_patched_rho(&Scene::double_point()).unwrap();
        let p = pt(0.2, 0.1, -0.3, 0.1);
        assert_eq!(rho.value(p), LocalModel::DoublePoint.value(p));
    }

    #[test]
    fn flat_scene_is_squared_distance() {
        let rho = build_patched_rho(&Scene::flat_plane()).unwrap();
        let p = pt(0.7, 0.2, -0.4, 0.3);
        assert_eq!(rho.value(p), 0.2 * 0.2 + 0.3 * 0.3);
    }

    #[test]
    fn graph_distance_matches_brute_force() {
        let p = pt(0.3, -0.1, 0.12, 0.05);
        let mut best = f64::INFINITY;
        let n = 800;
        for i in 0..=n {
            for j in 0..=n {
                let a = 0.1 + 0.4 * i as f64 / n as f64;
                let b = -0.3 + 0.4 * j as f64 / n as f64;
                let zeta = Complex64::new(a, b);
                let q = PointC2::new(zeta, zeta.conj() * zeta.conj());
                let d = (q.z - p.z).norm_sqr() + (q.w - p.w).norm_sqr();
                best = best.min(d);
            }
        }
        let d = SceneSurface::HyperbolicGraph.distance_sqr(p);
        assert!(d <= best + 1e-12 && best - d < 1e-5, "{d} vs {best}");
        let on = PointC2::new(Complex64::new(0.3, 0.2), Complex64::new(0.3, -0.2).powi(2));
        assert!(SceneSurface::HyperbolicGraph.distance_sqr(on) < 1e-28);
    }

    #[test]
    fn patched_field_vanishes_on_surface() {
        let rho = build_patched_rho(&Scene::special_hyperbolic(0.5)).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.02 * k as f64, 0.7 * k as f64);
            let p = PointC2::new(z, z.conj() * z.conj());
            assert!(rho.value(p) < 1e-26);
        }
    }

    #[test]
    fn overlapping_or_mismatched_charts_are_rejected() {
        let mut scene = Scene::special_hyperbolic(0.5);
        scene.charts.push(scene.charts[0]);
        assert!(build_patched_rho(&scene).is_err());
        let mut scene = Scene::double_point();
        scene.surface = SceneSurface::Plane;
        assert!(matches!(build_patched_rho(&scene), Err(Error::Mismatch(_))));
    }

    #[test]
    fn exhaustion_rejects_bad_parameters() {
        let scene = Scene::special_hyperbolic(0.5);
        assert!(exhaustion_certificate(&scene, 0.5, 1e-3, 0.1).is_err());
        assert!(exhaustion_certificate(&scene, 0.01, 0.0, 0.1).is_err());
    }

    #[test]
    fn flat_exhaustion_passes_coarsely() {
        let cert = exhaustion_certificate(&Scene::flat_plane(), 0.01, 1e-3, 0.05).unwrap();
        assert!(cert.pass, "{cert:?}");
    }
}
