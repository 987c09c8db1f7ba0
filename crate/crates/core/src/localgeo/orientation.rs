//! Signs of transverse intersections of oriented real planes in ℂ² = ℝ⁴.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// An oriented real 2-plane in ℝ⁴ given by an ordered basis in `(x, y, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedPlane {
    pub basis: [[f64; 4]; 2],
}

impl OrientedPlane {
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Self {
        OrientedPlane { basis: [a, b] }
    }

    pub fn from_complex(a: [Complex64; 2], b: [Complex64; 2]) -> Self {
        let real = |v: [Complex64; 2]| [v[0].re, v[0].im, v[1].re, v[1].im];
        OrientedPlane::new(real(a), real(b))
    }

    pub fn reversed(&self) -> Self {
        OrientedPlane::new(self.basis[1], self.basis[0])
    }
}

/// Sign of `det[a₁, a₂, b₁, b₂]` against the complex orientation of ℂ².
///
/// Errors when the planes are not transverse.
pub fn intersection_sign(a: &OrientedPlane, b: &OrientedPlane) -> Result<i8> {
    let cols = [a.basis[0], a.basis[1], b.basis[0], b.basis[1]];
    let m = Matrix4::from_fn(|r, c| cols[c][r]);
    let det = m.determinant();
    let scale: f64 = cols
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .product();
    if det.is_nan() || det.abs() <= 1e-12 * scale {
        return Err(Error::invalid("planes are not transverse"));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localgeo::patch::{FlatSheet, WeinsteinSphere};

    #[test]
    fn weinstein_double_point_is_positive() {
        let (a, b) = WeinsteinSphere::double_point_planes();
        assert_eq!(intersection_sign(&a, &b).unwrap(), 1);
        assert_eq!(intersection_sign(&b, &a).unwrap(), 1);
        assert_eq!(intersection_sign(&a.reversed(), &b.reversed()).unwrap(), 1);
    }

    #[test]
    fn lagrangian_sheets_follow_kappa() {
        let l1 = FlatSheet::first().plane();
        for kappa in [1, -1] {
            let l2 = FlatSheet::second(kappa).plane();
            assert_eq!(intersection_sign(&l1, &l2).unwrap(), kappa);
            assert_eq!(intersection_sign(&l2, &l1).unwrap(), kappa);
        }
    }

    #[test]
    fn explicit_negative_pair() {
        let l1 = OrientedPlane::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]);
        let l2 = OrientedPlane::new([0.0, 0.0, 0.0, -1.0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(intersection_sign(&l1, &l2).unwrap(), -1);
    }

    #[test]
    fn shared_direction_is_rejected() {
        let a = OrientedPlane::new([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]);
        let b = OrientedPlane::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]);
        assert!(intersection_sign(&a, &b).is_err());
    }
}
