//! Grid sweeps certifying plurisubharmonicity and the absence of critical
//! points off the zero set.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{levi_fd, Box4, PointC2, ScalarField, FD_STEP};
use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};

/// A regular grid over a box. Nodes sit at `lo + (hi − lo)·k/n` with
/// `n = round((hi − lo)/step)` on each axis, so both faces are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "box")]
    pub bounds: Box4,
    pub step: f64,
}

impl Grid {
    pub fn new(bounds: Box4, step: f64) -> Result<Self> {
        let finite = bounds.lo.iter().chain(&bounds.hi).all(|c| c.is_finite());
        let ordered = (0..4).all(|k| bounds.lo[k] <= bounds.hi[k]);
        if !(finite && ordered && step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(
                "grid needs a finite ordered box and a positive step",
            ));
        }
        Ok(Grid { bounds, step })
    }

    pub fn cube(half_width: f64, step: f64) -> Result<Self> {
        Grid::new(Box4::cube(half_width), step)
    }

    pub fn divisions(&self) -> [usize; 4] {
        let mut n = [0; 4];
        for (k, nk) in n.iter_mut().enumerate() {
            *nk = ((self.bounds.hi[k] - self.bounds.lo[k]) / self.step).round() as usize;
        }
        n
    }

    pub fn len(&self) -> usize {
        self.divisions().iter().map(|n| n + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The node with linear index `idx`, the last axis varying fastest.
    pub fn point(&self, mut idx: usize) -> PointC2 {
        let n = self.divisions();
        let mut r = [0.0; 4];
        for k in (0..4).rev() {
            let m = n[k] + 1;
            let i = idx % m;
            idx /= m;
            r[k] = if n[k] == 0 {
                self.bounds.lo[k]
            } else {
                let (lo, hi) = (self.bounds.lo[k], self.bounds.hi[k]);
                lo + (hi - lo) * i as f64 / n[k] as f64
            };
        }
        PointC2::from_real(r)
    }
}

/// How the Levi form is obtained during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Jets {
    Closed,
    FiniteDifference { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PshOptions {
    /// Eigenvalue floor: the sweep passes when every eigenvalue is `≥ −tol`.
    pub tol: f64,
    /// The gradient must exceed this wherever the value exceeds `value_floor`.
    pub gradient_tol: f64,
    pub value_floor: f64,
    pub jets: Jets,
}

impl PshOptions {
    pub fn closed() -> Self {
        PshOptions {
            tol: 1e-9,
            gradient_tol: 1e-9,
            value_floor: 1e-6,
            jets: Jets::Closed,
        }
    }

    pub fn finite_difference() -> Self {
        PshOptions {
            tol: 1e-5,
            gradient_tol: 1e-9,
            value_floor: 1e-6,
            jets: Jets::FiniteDifference { h: FD_STEP },
        }
    }
}

/// `(value, index)` ordered by value, ties broken by the smaller index so
/// parallel reductions are deterministic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArgMin {
    pub value: f64,
    pub index: usize,
}

impl ArgMin {
    pub const NONE: ArgMin = ArgMin {
        value: f64::INFINITY,
        index: usize::MAX,
    };

    pub fn min(self, other: ArgMin) -> ArgMin {
        match self
            .value
            .total_cmp(&other.value)
            .then(self.index.cmp(&other.index))
        {
            Ordering::Greater => other,
            _ => self,
        }
    }

    pub fn found(&self) -> bool {
        self.index != usize::MAX
    }
}

#[derive(Debug, Clone, Copy)]
struct Sweep {
    eigen: ArgMin,
    gradient: ArgMin,
    checked: usize,
}

impl Sweep {
    const EMPTY: Sweep = Sweep {
        eigen: ArgMin::NONE,
        gradient: ArgMin::NONE,
        checked: 0,
    };

    fn merge(self, other: Sweep) -> Sweep {
        Sweep {
            eigen: self.eigen.min(other.eigen),
            gradient: self.gradient.min(other.gradient),
            checked: self.checked + other.checked,
        }
    }
}

/// Sweeps the grid for the smallest Levi eigenvalue and, where the field
/// exceeds `value_floor`, the smallest gradient norm.
///
/// Witnesses: the minimizing point of the eigenvalue (`min_eigenvalue`) and
/// of the gradient norm (`min_gradient`).
pub fn psh_certificate<F: ScalarField + ?Sized>(
    field: &F,
    grid: &Grid,
    opts: &PshOptions,
) -> Result<Certificate> {
    if let Jets::Closed = opts.jets {
        if !field.has_closed_jets() {
            return Err(Error::Unsupported(
                "field has no closed-form Levi form".into(),
            ));
        }
    }
    let sweep = (0..grid.len())
        .into_par_iter()
        .map(|idx| -> Result<Sweep> {
            let p = grid.point(idx);
            let levi = match opts.jets {
                Jets::Closed => field.levi(p)?,
                Jets::FiniteDifference { h } => levi_fd(field, p, h)?,
            };
            let mut s = Sweep {
                eigen: ArgMin {
                    value: levi.min_eigenvalue(),
                    index: idx,
                },
                gradient: ArgMin::NONE,
                checked: 0,
            };
            if field.value(p) > opts.value_floor {
                let g = match opts.jets {
                    Jets::Closed => field.gradient(p),
                    Jets::FiniteDifference { .. } => {
                        super::field::fd_gradient(field, p, super::field::GRADIENT_STEP)
                    }
                };
                let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
                s.gradient = ArgMin {
                    value: norm,
                    index: idx,
                };
                s.checked = 1;
            }
            Ok(s)
        })
        .try_reduce(|| Sweep::EMPTY, |a, b| Ok(a.merge(b)))?;

    let eigen_ok = sweep.eigen.value >= -opts.tol;
    let gradient_ok = !sweep.gradient.found() || sweep.gradient.value > opts.gradient_tol;
    let mut cert = Certificate::new(eigen_ok && gradient_ok, "levi-psh").with(Witness::labeled(
        "min_eigenvalue",
        grid.point(sweep.eigen.index).to_real().to_vec(),
        sweep.eigen.value,
    ));
    if sweep.gradient.found() {
        cert.push(Witness::labeled(
            "min_gradient",
            grid.point(sweep.gradient.index).to_real().to_vec(),
            sweep.gradient.value,
        ));
    }
    cert.push(Witness::note(format!(
        "{} grid points, {} above the value floor",
        grid.len(),
        sweep.checked
    )));
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localgeo::field::{FnField, LocalModel};

    #[test]
    fn grid_hits_both_faces_and_zero() {
        let g = Grid::cube(1.0, 0.5).unwrap();
        assert_eq!(g.divisions(), [4; 4]);
        assert_eq!(g.len(), 625);
        assert_eq!(g.point(0).to_real(), [-1.0; 4]);
        assert_eq!(g.point(624).to_real(), [1.0; 4]);
        assert_eq!(g.point(312).to_real(), [0.0; 4]);
        assert!(Grid::cube(1.0, 0.0).is_err());
    }

    #[test]
    fn models_pass_on_coarse_grid() {
        let grid = Grid::cube(1.0, 0.25).unwrap();
        for model in LocalModel::ALL {
            let cert = psh_certificate(&model, &grid, &PshOptions::closed()).unwrap();
            assert!(cert.pass, "{model}: {cert:?}");
            let p = PointC2::from_real(cert.first_point().unwrap().try_into().unwrap());
            assert!(model.degeneracy_distance(p) < 1e-12);
            let fd = psh_certificate(&model, &grid, &PshOptions::finite_difference()).unwrap();
            assert!(fd.pass, "{model}: {fd:?}");
        }
    }

    #[test]
    fn concave_field_fails() {
        let f = FnField::new(|p| -p.z.norm_sqr());
        let grid = Grid::cube(1.0, 0.5).unwrap();
        assert!(psh_certificate(&f, &grid, &PshOptions::closed()).is_err());
        let cert = psh_certificate(&f, &grid, &PshOptions::finite_difference()).unwrap();
        assert!(!cert.pass);
        assert!(cert.first_point().is_some());
    }

    #[test]
    fn argmin_prefers_lower_index_on_ties() {
        let a = ArgMin {
            value: 0.0,
            index: 7,
        };
        let b = ArgMin {
            value: 0.0,
            index: 3,
        };
        assert_eq!(a.min(b).index, 3);
        assert_eq!(b.min(a).index, 3);
    }
}
