//! Winding numbers of the tangent determinant and the search for complex
//! points.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::PointC2;
use super::patch::{complex_det, orientation_sign, tangent_det, Atlas, SurfacePatch};
use crate::error::{Error, Result};

/// Values smaller than this fraction of the largest sampled modulus count as
/// zeros on the curve.
const NEAR_ZERO: f64 = 1e-10;
const MAX_SUBDIVISION: u32 = 48;

/// Winding number of the closed curve `curve: [0, 1] → ℂ∖{0}`.
///
/// Principal argument increments are accumulated over `samples` equal steps,
/// and any step whose increment reaches π/2 is halved until it does not.
pub fn winding_number<G>(curve: G, samples: usize) -> Result<i64>
where
    G: Fn(f64) -> Result<Complex64>,
{
    if samples < 3 {
        return Err(Error::invalid("a closed curve needs at least 3 samples"));
    }
    let values: Vec<Complex64> = (0..samples)
        .map(|k| curve(k as f64 / samples as f64))
        .collect::<Result<_>>()?;
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = NEAR_ZERO * scale;
    let check = |v: Complex64| -> Result<Complex64> {
        if v.norm() > floor && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numerical(format!(
                "curve passes within {:.3e} of zero",
                v.norm()
            )))
        }
    };

    fn increment<G: Fn(f64) -> Result<Complex64>>(
        curve: &G,
        check: &dyn Fn(Complex64) -> Result<Complex64>,
        (t0, f0): (f64, Complex64),
        (t1, f1): (f64, Complex64),
        depth: u32,
    ) -> Result<f64> {
        let d = (f1 / f0).arg();
        if d.abs() < FRAC_PI_2 {
            return Ok(d);
        }
        if depth >= MAX_SUBDIVISION {
            return Err(Error::numerical(
                "argument increments do not settle under subdivision",
            ));
        }
        let tm = 0.5 * (t0 + t1);
        let fm = check(curve(tm)?)?;
        Ok(increment(curve, check, (t0, f0), (tm, fm), depth + 1)?
            + increment(curve, check, (tm, fm), (t1, f1), depth + 1)?)
    }

    let mut total = 0.0;
    for k in 0..samples {
        let t0 = k as f64 / samples as f64;
        let t1 = (k + 1) as f64 / samples as f64;
        let f0 = check(values[k])?;
        let f1 = check(values[(k + 1) % samples])?;
        total += increment(&curve, &check, (t0, f0), (t1, f1), 0)?;
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::numerical(format!(
            "winding {turns} is not an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Winding of `complex_det` around the parameter circle of the given centre
/// and radius. Equals the index of an isolated positive complex point inside.
pub fn winding_index<P: SurfacePatch + ?Sized>(
    patch: &P,
    center: [f64; 2],
    radius: f64,
    samples: usize,
) -> Result<i64> {
    if samples < 64 {
        return Err(Error::invalid(format!(
            "{samples} samples; at least 64 are required"
        )));
    }
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::invalid(format!("radius {radius} must be positive")));
    }
    winding_number(
        |theta| {
            let (c, s) = ((TAU * theta).cos(), (TAU * theta).sin());
            complex_det(patch, center[0] + radius * c, center[1] + radius * s)
        },
        samples,
    )
}

/// A complex point found by [`locate_complex_points`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub param: [f64; 2],
    pub point: PointC2,
    /// Winding of the tangent determinant in parameter space.
    pub winding: i64,
    /// Whether the tangent plane carries the complex orientation.
    pub positive: bool,
    /// Orientation-independent index: the winding at positive points and its
    /// negative at negative ones.
    pub index: i64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPointScan {
    pub points: Vec<ComplexPoint>,
    /// Smallest `|complex_det|` over the grid nodes inside the domain.
    pub min_modulus: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    s: [f64; 2],
    t: [f64; 2],
}

impl Cell {
    fn center(&self) -> [f64; 2] {
        [0.5 * (self.s[0] + self.s[1]), 0.5 * (self.t[0] + self.t[1])]
    }

    fn size(&self) -> f64 {
        (self.s[1] - self.s[0]).max(self.t[1] - self.t[0])
    }

    fn split(&self, frac: f64) -> [Cell; 4] {
        let sm = self.s[0] + frac * (self.s[1] - self.s[0]);
        let tm = self.t[0] + frac * (self.t[1] - self.t[0]);
        [
            Cell {
                s: [self.s[0], sm],
                t: [self.t[0], tm],
            },
            Cell {
                s: [sm, self.s[1]],
                t: [self.t[0], tm],
            },
            Cell {
                s: [self.s[0], sm],
                t: [tm, self.t[1]],
            },
            Cell {
                s: [sm, self.s[1]],
                t: [tm, self.t[1]],
            },
        ]
    }

    fn boundary(&self, u: f64) -> [f64; 2] {
        let [s0, s1] = self.s;
        let [t0, t1] = self.t;
        let e = 4.0 * u.rem_euclid(1.0);
        match e as u32 {
            0 => [s0 + e * (s1 - s0), t0],
            1 => [s1, t0 + (e - 1.0) * (t1 - t0)],
            2 => [s1 - (e - 2.0) * (s1 - s0), t1],
            _ => [s0, t1 - (e - 3.0) * (t1 - t0)],
        }
    }
}

fn raw_det<P: SurfacePatch + ?Sized>(patch: &P, [s, t]: [f64; 2]) -> Complex64 {
    let (a, b) = patch.tangents(s, t);
    tangent_det(&a, &b)
}

fn cell_winding<P: SurfacePatch + ?Sized>(patch: &P, cell: &Cell) -> Result<i64> {
    winding_number(|u| Ok(raw_det(patch, cell.boundary(u))), 16)
}

/// Quadrisects `cell` towards its single zero until `|det| < tol` at the centre.
fn refine<P: SurfacePatch + ?Sized>(
    patch: &P,
    mut cell: Cell,
    winding: i64,
    tol: f64,
) -> Result<Cell> {
    for _ in 0..200 {
        if raw_det(patch, cell.center()).norm() < tol {
            return Ok(cell);
        }
        if cell.size() < 1e-15 {
            break;
        }
        let mut next = None;
        for frac in [0.5, 0.4617, 0.5382] {
            let Ok(windings) = cell
                .split(frac)
                .map(|c| cell_winding(patch, &c).map(|w| (c, w)))
                .into_iter()
                .collect::<Result<Vec<_>>>()
            else {
                continue;
            };
            let nonzero: Vec<_> = windings.into_iter().filter(|(_, w)| *w != 0).collect();
            match nonzero.as_slice() {
                [(c, w)] if *w == winding => {
                    next = Some(*c);
                    break;
                }
                [] => continue,
                _ => {
                    return Err(Error::numerical(format!(
                        "zero cluster near ({:.6}, {:.6}) is not resolved at this grid step",
                        cell.center()[0],
                        cell.center()[1]
                    )))
                }
            }
        }
        cell = next.ok_or_else(|| Error::numerical("bisection lost track of a zero"))?;
    }
    Err(Error::numerical(format!(
        "|complex_det| stays above {tol:e} near ({:.6}, {:.6})",
        cell.center()[0],
        cell.center()[1]
    )))
}

const GRID_OFFSETS: [f64; 3] = [0.381966, 0.276393, 0.145898];

/// Finds the complex points of a patch on a grid of the given step.
///
/// Every grid cell lying in the domain is tested by the winding of the
/// tangent determinant around its boundary; cells with non-zero winding are
/// bisected until `|complex_det| < tol`. Zeros in cells that leave the domain
/// are not reported.
pub fn locate_complex_points<P: SurfacePatch + ?Sized>(
    patch: &P,
    grid_step: f64,
    tol: f64,
) -> Result<ComplexPointScan> {
    if !(grid_step > 0.0 && tol > 0.0) {
        return Err(Error::invalid("grid step and tolerance must be positive"));
    }
    let mut last_err = None;
    for offset in GRID_OFFSETS {
        match scan_with_offset(patch, grid_step, tol, offset) {
            Ok(scan) => return Ok(scan),
            Err(e @ Error::Numerical(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one offset was tried"))
}

fn scan_with_offset<P: SurfacePatch + ?Sized>(
    patch: &P,
    step: f64,
    tol: f64,
    offset: f64,
) -> Result<ComplexPointScan> {
    let domain = patch.domain();
    let ([s_lo, s_hi], [t_lo, t_hi]) = domain.bounds();
    let nodes = |lo: f64, hi: f64| -> Vec<f64> {
        let start = lo + offset * step - step;
        let count = ((hi - start) / step).ceil() as usize + 1;
        (0..count).map(|k| start + k as f64 * step).collect()
    };
    let (ss, ts) = (nodes(s_lo, s_hi), nodes(t_lo, t_hi));
    let inside: Vec<Vec<bool>> = ss
        .iter()
        .map(|&s| ts.iter().map(|&t| domain.contains(s, t)).collect())
        .collect();

    let mut min_modulus = f64::INFINITY;
    for (i, &s) in ss.iter().enumerate() {
        for (j, &t) in ts.iter().enumerate() {
            if inside[i][j] {
                min_modulus = min_modulus.min(raw_det(patch, [s, t]).norm());
            }
        }
    }

    let mut points = Vec::new();
    let mut cells = 0;
    for i in 0..ss.len().saturating_sub(1) {
        for j in 0..ts.len().saturating_sub(1) {
            if !(inside[i][j] && inside[i + 1][j] && inside[i][j + 1] && inside[i + 1][j + 1]) {
                continue;
            }
            cells += 1;
            let cell = Cell {
                s: [ss[i], ss[i + 1]],
                t: [ts[j], ts[j + 1]],
            };
            let winding = cell_winding(patch, &cell)?;
            if winding == 0 {
                continue;
            }
            let found = refine(patch, cell, winding, tol)?;
            let [s, t] = found.center();
            let (a, b) = patch.tangents(s, t);
            let sign = orientation_sign(&a, &b);
            points.push(ComplexPoint {
                param: [s, t],
                point: patch.map(s, t),
                winding,
                positive: sign > 0,
                index: sign * winding,
                modulus: tangent_det(&a, &b).norm(),
            });
        }
    }
    Ok(ComplexPointScan {
        points,
        min_modulus,
        cells,
    })
}

/// Complex points of every chart, with points seen by several overlapping
/// charts reported once.
pub fn locate_in_atlas(atlas: &Atlas, grid_step: f64, tol: f64) -> Result<ComplexPointScan> {
    let mut merged = ComplexPointScan {
        points: Vec::new(),
        min_modulus: f64::INFINITY,
        cells: 0,
    };
    for chart in &atlas.charts {
        let scan = locate_complex_points(chart.as_ref(), grid_step, tol)?;
        merged.min_modulus = merged.min_modulus.min(scan.min_modulus);
        merged.cells += scan.cells;
        for p in scan.points {
            let duplicate = merged.points.iter().any(|q| {
                let d: f64 = p
                    .point
                    .to_real()
                    .iter()
                    .zip(q.point.to_real())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                d.sqrt() < 1e-6
            });
            if !duplicate {
                merged.points.push(p);
            }
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localgeo::patch::{model_patch, GraphPatch, ModelKind, SigmaHandle};
    use crate::surgery::Sign;

    #[test]
    fn model_graph_windings() {
        let cases = [
            (GraphPatch::special_elliptic(), 1),
            (GraphPatch::special_hyperbolic(), -1),
            (GraphPatch::cubic(), -2),
        ];
        for (g, expect) in cases {
            for (radius, samples) in [(0.5, 64), (0.1, 200), (0.9, 1000)] {
                assert_eq!(
                    winding_index(&g, [0.0, 0.0], radius, samples).unwrap(),
                    expect
                );
            }
        }
    }

    #[test]
    fn winding_rejects_bad_circles() {
        let g = GraphPatch::special_hyperbolic();
        assert!(winding_index(&g, [0.0, 0.0], 0.5, 32).is_err());
        assert!(winding_index(&g, [0.5, 0.0], 0.5, 64).is_err());
    }

    #[test]
    fn coarse_sampling_is_refined() {
        // raw increments of 3π/4 exceed the π/2 guard
        let w = winding_number(|t| Ok(Complex64::from_polar(1.0, 3.0 * TAU * t)), 8).unwrap();
        assert_eq!(w, 3);
    }

    #[test]
    fn sigma_minus_has_four_hyperbolic_points() {
        let h = SigmaHandle::new(Sign::Negative, 0.1).unwrap();
        let scan = locate_complex_points(&h, 0.02, 1e-10).unwrap();
        assert_eq!(scan.points.len(), 4);
        let c = 0.05f64.sqrt();
        for p in &scan.points {
            assert_eq!(p.index, -1);
            let [x, y, u, v] = p.point.to_real();
            assert!((x.abs() - c).abs() < 1e-4 && (x - y).abs() < 1e-4);
            assert!((u.abs() - c).abs() < 1e-4 && (u + v).abs() < 1e-4);
        }
        let positive = scan.points.iter().filter(|p| p.positive).count();
        assert_eq!(positive, 2);
    }

    #[test]
    fn totally_real_models_have_none() {
        let plus = SigmaHandle::new(Sign::Positive, 0.1).unwrap();
        let scan = locate_complex_points(&plus, 0.02, 1e-10).unwrap();
        assert!(scan.points.is_empty());
        assert!(scan.min_modulus > 0.0);

        let atlas = model_patch(ModelKind::Weinstein).unwrap();
        let scan = locate_in_atlas(&atlas, 0.05, 1e-10).unwrap();
        assert!(scan.points.is_empty());
        assert!(scan.min_modulus > 0.0);
    }

    #[test]
    fn graph_points_are_positive() {
        let scan = locate_complex_points(&GraphPatch::special_hyperbolic(), 0.05, 1e-10).unwrap();
        assert_eq!(scan.points.len(), 1);
        let p = &scan.points[0];
        assert!(p.positive);
        assert_eq!((p.winding, p.index), (-1, -1));
        assert!(p.param[0].hypot(p.param[1]) < 1e-9);
    }
}
