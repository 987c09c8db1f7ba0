//! Retraction onto the zero set along the negative gradient.

use serde::{Deserialize, Serialize};

use super::field::{PointC2, ScalarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Initial step length in flow time.
    pub step: f64,
    pub max_iters: usize,
    /// Converged once the field drops below this value.
    pub target: f64,
    /// Local error allowed per accepted step, relative to `1 + |p|`.
    pub local_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            step: 1e-2,
            max_iters: 20_000,
            target: 1e-10,
            local_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub trajectory: Vec<PointC2>,
    pub values: Vec<f64>,
    pub final_value: f64,
    pub converged: bool,
}

impl FlowResult {
    pub fn end(&self) -> PointC2 {
        *self
            .trajectory
            .last()
            .expect("trajectory starts at the initial point")
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

fn add(p: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [
        p[0] + h * k[0],
        p[1] + h * k[1],
        p[2] + h * k[2],
        p[3] + h * k[3],
    ]
}

fn rk4<F: ScalarField + ?Sized>(field: &F, p: [f64; 4], h: f64) -> [f64; 4] {
    let f = |q: [f64; 4]| field.gradient(PointC2::from_real(q)).map(|g| -g);
    let k1 = f(p);
    let k2 = f(add(p, k1, h / 2.0));
    let k3 = f(add(p, k2, h / 2.0));
    let k4 = f(add(p, k3, h));
    let mut out = p;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates `ṗ = −∇ρ` with RK4 and step doubling.
///
/// A step is accepted when its local error estimate is within tolerance, it
/// stays in the field's domain and it does not increase the field, so the
/// recorded values never increase. Hitting `max_iters` returns an
/// unconverged result rather than an error.
pub fn flow_to_surface<F: ScalarField + ?Sized>(
    field: &F,
    start: PointC2,
    opts: &FlowOptions,
) -> Result<FlowResult> {
    let domain = field.domain();
    if !start.is_finite() || !domain.contains(start) {
        return Err(Error::invalid(format!(
            "start {start} lies outside the chart"
        )));
    }
    if opts.step.is_nan() || opts.step <= 0.0 {
        return Err(Error::invalid("flow step must be positive"));
    }
    let mut p = start.to_real();
    let mut value = field.value(start);
    let mut result = FlowResult {
        trajectory: vec![start],
        values: vec![value],
        final_value: value,
        converged: value < opts.target,
    };
    let mut h = opts.step;
    let mut iters = 0;
    while !result.converged && iters < opts.max_iters {
        iters += 1;
        let full = rk4(field, p, h);
        let half = rk4(field, rk4(field, p, h / 2.0), h / 2.0);
        let err = (0..4)
            .map(|i| (full[i] - half[i]).abs())
            .fold(0.0, f64::max);
        let scale = 1.0 + half.iter().map(|c| c * c).sum::<f64>().sqrt();
        let next = PointC2::from_real(half);
        let next_value = field.value(next);
        let ok = err <= opts.local_tol * scale
            && next.is_finite()
            && domain.contains(next)
            && next_value <= value;
        if !ok {
            h *= 0.5;
            if h < 1e-14 * opts.step {
                return Err(Error::numerical(format!(
                    "flow stalls at {next} leaving the chart"
                )));
            }
            continue;
        }
        p = half;
        value = next_value;
        result.trajectory.push(next);
        result.values.push(value);
        result.final_value = value;
        result.converged = value < opts.target;
        h *= 1.5;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localgeo::field::LocalModel;
    use num_complex::Complex64;

    #[test]
    fn double_point_flow_converges() {
        let start = PointC2::new(Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.2));
        let r = flow_to_surface(&LocalModel::DoublePoint, start, &FlowOptions::default()).unwrap();
        assert!(r.converged, "{}", r.final_value);
        assert!(r.final_value < 1e-10);
        assert!(r.is_monotone());
    }

    #[test]
    fn hyperbolic_flow_lands_on_graph() {
        let start = PointC2::new(Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.0));
        let r = flow_to_surface(
            &LocalModel::SpecialHyperbolic,
            start,
            &FlowOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        let end = r.end();
        assert!((end.w - end.z.conj() * end.z.conj()).norm() < 1e-5);
        assert!(r.is_monotone());
    }

    #[test]
    fn start_on_surface_is_trivial() {
        let z = Complex64::new(0.3, -0.2);
        let start = PointC2::new(z, z.conj() * z.conj());
        let r = flow_to_surface(
            &LocalModel::SpecialHyperbolic,
            start,
            &FlowOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.trajectory.len(), 1);
    }

    #[test]
    fn start_outside_chart_is_rejected() {
        let start = PointC2::from_real([2.0, 0.0, 0.0, 0.0]);
        assert!(flow_to_surface(&LocalModel::DoublePoint, start, &FlowOptions::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let start = PointC2::from_real([0.5, 0.5, 0.5, 0.5]);
        let opts = FlowOptions {
            max_iters: 2,
            ..FlowOptions::default()
        };
        let r = flow_to_surface(&LocalModel::DoublePoint, start, &opts).unwrap();
        assert!(!r.converged);
    }
}
