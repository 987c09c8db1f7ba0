//! Named batteries of local certificates, as run by `verify-local`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::localgeo::field::{
    det_identity_check, levi_closed, levi_fd, LocalModel, PointC2, ScalarField,
};
use crate::localgeo::flow::{flow_to_surface, FlowOptions};
use crate::localgeo::orientation::intersection_sign;
use crate::localgeo::patch::{
    model_patch, GraphPatch, ModelKind, SigmaHandle, SurfacePatch, WeinsteinSphere,
};
use crate::localgeo::patched::{exhaustion_certificate, Scene};
use crate::localgeo::psh::{psh_certificate, Grid, Jets, PshOptions};
use crate::localgeo::winding::{locate_complex_points, locate_in_atlas, winding_index};
use crate::surgery::Sign;

/// Seed used for every sampled check unless overridden.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    PshModels,
    Windings,
    SigmaHandles,
    Weinstein,
    Flow,
    Exhaustion,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::PshModels,
        Suite::Windings,
        Suite::SigmaHandles,
        Suite::Weinstein,
        Suite::Flow,
        Suite::Exhaustion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::PshModels => "psh_models",
            Suite::Windings => "windings",
            Suite::SigmaHandles => "sigma_handles",
            Suite::Weinstein => "weinstein",
            Suite::Flow => "flow",
            Suite::Exhaustion => "exhaustion",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Optional overrides. Each suite documents which fields it reads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCertificate {
    pub name: String,
    #[serde(flatten)]
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<NamedCertificate>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<NamedCertificate>) -> Self {
        SuiteReport {
            suite,
            pass: checks.iter().all(|c| c.certificate.pass),
            checks,
        }
    }
}

fn named(name: impl Into<String>, certificate: Certificate) -> NamedCertificate {
    NamedCertificate {
        name: name.into(),
        certificate,
    }
}

pub fn verify_local(suite: Suite, params: &SuiteParams) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::PshModels => psh_models(params)?,
        Suite::Windings => windings(params)?,
        Suite::SigmaHandles => sigma_handles(params)?,
        Suite::Weinstein => weinstein(params)?,
        Suite::Flow => flow(params)?,
        Suite::Exhaustion => exhaustion(params)?,
    };
    Ok(SuiteReport::new(suite, checks))
}

fn random_point(rng: &mut ChaCha8Rng, half_width: f64) -> PointC2 {
    PointC2::from_real(std::array::from_fn(|_| {
        rng.gen_range(-half_width..=half_width)
    }))
}

/// Reads `grid_step` (0.1), `tol` (closed-form eigenvalue floor, 1e-9),
/// `seed` and `samples` (100 points per model for the cross-check).
fn psh_models(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let grid = Grid::cube(1.0, params.grid_step.unwrap_or(0.1))?;
    let samples = params.samples.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.unwrap_or(DEFAULT_SEED));
    let mut out = Vec::new();
    for model in LocalModel::ALL {
        let mut closed = PshOptions::closed();
        if let Some(tol) = params.tol {
            closed.tol = tol;
        }
        for opts in [closed, PshOptions::finite_difference()] {
            let mut cert = psh_certificate(&model, &grid, &opts)?;
            let point = cert
                .first_point()
                .map(|p| PointC2::from_real(p.try_into().unwrap()));
            if let Some(p) = point {
                let d = model.degeneracy_distance(p);
                cert.pass &= d <= 1e-6;
                cert.push(Witness::labeled(
                    "degeneracy_distance",
                    p.to_real().to_vec(),
                    d,
                ));
            }
            let jets = match opts.jets {
                Jets::Closed => "closed",
                Jets::FiniteDifference { .. } => "fd",
            };
            out.push(named(format!("{model}/{jets}"), cert));
        }

        let mut worst = (0.0f64, PointC2::default());
        for _ in 0..samples {
            let p = random_point(&mut rng, 1.0);
            let err = levi_fd(&model, p, 1e-4)?.max_abs_diff(&levi_closed(model, p));
            if err > worst.0 {
                worst = (err, p);
            }
        }
        out.push(named(
            format!("{model}/levi_fd_vs_closed"),
            Certificate::new(worst.0 < 1e-6, "levi-cross-check").with(Witness::labeled(
                "max_error",
                worst.1.to_real().to_vec(),
                worst.0,
            )),
        ));
    }

    let mut failures = 0;
    let mut worst = (0.0f64, PointC2::default());
    for _ in 0..samples * 10 {
        let p = random_point(&mut rng, 1.0);
        let cert = det_identity_check(p);
        failures += usize::from(!cert.pass);
        if let Some(Witness::Sample { value, .. }) = cert.witnesses.last() {
            if *value > worst.0 {
                worst = (*value, p);
            }
        }
    }
    out.push(named(
        "double_point/determinant_identity",
        Certificate::new(failures == 0, "double-point-determinant")
            .with(Witness::labeled(
                "max_relative_error",
                worst.1.to_real().to_vec(),
                worst.0,
            ))
            .with(Witness::equal("failures", failures as i64, 0)),
    ));
    Ok(out)
}

/// Reads `samples` (64) for the circle of radius 0.5.
fn windings(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let samples = params.samples.unwrap_or(64);
    let cases = [
        ("zz̄", GraphPatch::special_elliptic(), 1),
        ("z̄²", GraphPatch::special_hyperbolic(), -1),
        ("z̄³", GraphPatch::cubic(), -2),
    ];
    cases
        .into_iter()
        .map(|(name, graph, expect)| {
            let w = winding_index(&graph, [0.0, 0.0], 0.5, samples)?;
            let relation = format!("winding of {name} at 0");
            Ok(named(
                name,
                Certificate::new(w == expect, "winding-index")
                    .with(Witness::equal(relation, w, expect)),
            ))
        })
        .collect()
}

/// Reads `epsilon` (0.1), `grid_step` (0.02) and `tol` (1e-10).
fn sigma_handles(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let eps = params.epsilon.unwrap_or(0.1);
    let step = params.grid_step.unwrap_or(0.02);
    let tol = params.tol.unwrap_or(1e-10);

    let plus = SigmaHandle::new(Sign::Positive, eps)?;
    let scan = locate_complex_points(&plus, step, tol)?;
    let mut cert = Certificate::new(
        scan.points.is_empty() && scan.min_modulus > 0.0,
        "totally-real",
    )
    .with(Witness::equal(
        "complex points",
        scan.points.len() as i64,
        0,
    ))
    .with(Witness::note(format!(
        "min |complex_det| on grid = {:.6e}",
        scan.min_modulus
    )));
    for p in &scan.points {
        cert.push(Witness::labeled(
            "complex_point",
            p.point.to_real().to_vec(),
            p.index as f64,
        ));
    }
    let mut out = vec![named("sigma_plus", cert)];

    let minus = SigmaHandle::new(Sign::Negative, eps)?;
    let scan = locate_complex_points(&minus, step, tol)?;
    let expected = minus.analytic_complex_points();
    let mut pass = scan.points.len() == expected.len();
    let mut cert = Certificate::new(false, "hyperbolic-complex-points").with(Witness::equal(
        "complex points",
        scan.points.len() as i64,
        expected.len() as i64,
    ));
    for p in &scan.points {
        let nearest = expected
            .iter()
            .map(|&[s, t]| {
                let q = minus.map(s, t).to_real();
                let r = p.point.to_real();
                (0..4).map(|k| (q[k] - r[k]).abs()).fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        pass &= p.index == -1 && nearest < 1e-4;
        cert.push(Witness::labeled(
            format!("index {} ({})", p.index, if p.positive { "+" } else { "-" }),
            p.point.to_real().to_vec(),
            nearest,
        ));
    }
    let total: i64 = scan.points.iter().map(|p| p.index).sum();
    cert.push(Witness::equal(
        "total index",
        total,
        -(expected.len() as i64),
    ));
    cert.pass = pass;
    out.push(named("sigma_minus", cert));
    Ok(out)
}

/// Reads `grid_step` (0.05) and `tol` (1e-10).
fn weinstein(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let atlas = model_patch(ModelKind::Weinstein)?;
    let scan = locate_in_atlas(
        &atlas,
        params.grid_step.unwrap_or(0.05),
        params.tol.unwrap_or(1e-10),
    )?;
    let real = Certificate::new(
        scan.points.is_empty() && scan.min_modulus > 0.0,
        "totally-real",
    )
    .with(Witness::equal(
        "complex points",
        scan.points.len() as i64,
        0,
    ))
    .with(Witness::note(format!(
        "min |complex_det| on grid = {:.6e}",
        scan.min_modulus
    )));

    let north = WeinsteinSphere::map_sphere([0.0, 0.0, 1.0]);
    let south = WeinsteinSphere::map_sphere([0.0, 0.0, -1.0]);
    let (a, b) = WeinsteinSphere::double_point_planes();
    let sign = intersection_sign(&a, &b)?;
    let double = Certificate::new(north == south && sign == 1, "double-point-sign")
        .with(Witness::sample(north.to_real().to_vec(), 0.0))
        .with(Witness::equal("intersection sign", sign as i64, 1));
    Ok(vec![
        named("totally_real", real),
        named("double_point", double),
    ])
}

/// Uniform samples from `{ρ < epsilon}` inside `[-0.6, 0.6]⁴`.
pub fn sample_sublevel(model: LocalModel, epsilon: f64, n: usize, seed: u64) -> Vec<PointC2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_point(&mut rng, 0.6);
        if model.value(p) < epsilon {
            out.push(p);
        }
    }
    out
}

/// Reads `samples` (20 starts per model), `epsilon` (0.01) and `seed`.
fn flow(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let n = params.samples.unwrap_or(20);
    let eps = params.epsilon.unwrap_or(0.01);
    let seed = params.seed.unwrap_or(DEFAULT_SEED);
    let opts = FlowOptions::default();
    LocalModel::ALL
        .into_iter()
        .map(|model| {
            let mut worst = (0.0f64, PointC2::default());
            let mut failures = 0;
            for start in sample_sublevel(model, eps, n, seed) {
                let r = flow_to_surface(&model, start, &opts)?;
                failures += usize::from(!(r.converged && r.is_monotone()));
                if r.final_value >= worst.0 {
                    worst = (r.final_value, start);
                }
            }
            Ok(named(
                model.name(),
                Certificate::new(failures == 0, "gradient-retraction")
                    .with(Witness::labeled(
                        "max_final_value",
                        worst.1.to_real().to_vec(),
                        worst.0,
                    ))
                    .with(Witness::equal("failed starts", failures as i64, 0)),
            ))
        })
        .collect()
}

/// Reads `epsilon` (0.01), `delta` (1e-3) and `grid_step` (0.05). Also checks
/// that `δ = 10` is rejected with a witness in the cutoff annulus.
fn exhaustion(params: &SuiteParams) -> Result<Vec<NamedCertificate>> {
    let eps = params.epsilon.unwrap_or(0.01);
    let delta = params.delta.unwrap_or(1e-3);
    let step = params.grid_step.unwrap_or(0.05);
    let mut out = Vec::new();
    for (name, scene) in [
        ("special_hyperbolic", Scene::special_hyperbolic(0.5)),
        ("double_point", Scene::double_point()),
    ] {
        out.push(named(
            name,
            exhaustion_certificate(&scene, eps, delta, step)?,
        ));
        let large = exhaustion_certificate(&scene, eps, 10.0, step)?;
        let in_annulus = large
            .first_point()
            .map(|p| scene.in_cutoff_annulus(PointC2::from_real(p.try_into().unwrap())))
            .unwrap_or(false);
        let mut cert = Certificate::new(!large.pass && in_annulus, "large-delta-rejected");
        cert.witnesses = large.witnesses;
        out.push(named(format!("{name}/delta_10"), cert));
    }
    Ok(out)
}
