//! Complex scalars and real/complex n-tuples.
//!
//! The dot product here is bilinear, `z . w = sum_j z_j w_j`, with no
//! conjugation anywhere. Every kernel and transform pairs `x . xi` this way,
//! and for complex frequencies the bilinear form is what makes the kernels
//! analytic in `xi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar `re + i im`.
pub type ComplexScalar = Complex64;

/// A point of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealPoint(Vec<f64>);

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(Vec<ComplexScalar>);

impl RealPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &RealPoint) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(real_dot(&self.0, &other.0))
    }

    pub fn norm(&self) -> f64 {
        real_norm(&self.0)
    }

    pub fn sub(&self, other: &RealPoint) -> Result<RealPoint> {
        check_dims(self.dim(), other.dim())?;
        Ok(RealPoint(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, s: f64) -> RealPoint {
        RealPoint(self.0.iter().map(|v| v * s).collect())
    }

    /// `i * self`, the purely imaginary point with imaginary part `self`.
    pub fn times_i(&self) -> ComplexPoint {
        ComplexPoint(self.0.iter().map(|&v| Complex64::new(0.0, v)).collect())
    }

    pub fn to_complex(&self) -> ComplexPoint {
        ComplexPoint::from(self)
    }
}

impl From<f64> for RealPoint {
    fn from(x: f64) -> Self {
        RealPoint(vec![x])
    }
}

impl TryFrom<Vec<f64>> for RealPoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        RealPoint::new(coords)
    }
}

impl From<RealPoint> for Vec<f64> {
    fn from(p: RealPoint) -> Self {
        p.0
    }
}

impl ComplexPoint {
    pub fn new(coords: Vec<ComplexScalar>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[ComplexScalar] {
        &self.0
    }

    pub fn re(&self) -> RealPoint {
        RealPoint(self.0.iter().map(|z| z.re).collect())
    }

    pub fn im(&self) -> RealPoint {
        RealPoint(self.0.iter().map(|z| z.im).collect())
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn add(&self, other: &ComplexPoint) -> Result<ComplexPoint> {
        check_dims(self.dim(), other.dim())?;
        Ok(ComplexPoint(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl From<&RealPoint> for ComplexPoint {
    fn from(p: &RealPoint) -> Self {
        ComplexPoint(p.0.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }
}

impl From<ComplexScalar> for ComplexPoint {
    fn from(z: ComplexScalar) -> Self {
        ComplexPoint(vec![z])
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn real_norm(a: &[f64]) -> f64 {
    real_dot(a, a).sqrt()
}

/// Bilinear product `sum_j z_j w_j`.
pub fn dot(z: &ComplexPoint, w: &ComplexPoint) -> Result<ComplexScalar> {
    check_dims(z.dim(), w.dim())?;
    Ok(z.0.iter().zip(&w.0).map(|(a, b)| a * b).sum())
}

/// `(sum_j |z_j|^2)^(1/2)`.
pub fn modulus(z: &ComplexPoint) -> f64 {
    z.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Slack in the Cauchy-Schwarz and triangle inequalities for a pair of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    /// `|z||w| - |z . w|`
    pub cs_slack: f64,
    /// `|z| + |w| - |z + w|`
    pub tri_slack: f64,
}

impl InequalityReport {
    /// Both slacks are at least `-rel_tol` times the scale of the right-hand sides.
    pub fn holds(&self, z: &ComplexPoint, w: &ComplexPoint, rel_tol: f64) -> bool {
        let (nz, nw) = (modulus(z), modulus(w));
        self.cs_slack >= -rel_tol * nz * nw && self.tri_slack >= -rel_tol * (nz + nw)
    }
}

pub fn check_inequalities(z: &ComplexPoint, w: &ComplexPoint) -> Result<InequalityReport> {
    let zw = dot(z, w)?;
    let sum = z.add(w)?;
    let (nz, nw) = (modulus(z), modulus(w));
    Ok(InequalityReport {
        cs_slack: nz * nw - zw.norm(),
        tri_slack: nz + nw - modulus(&sum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cp(v: &[Complex64]) -> ComplexPoint {
        ComplexPoint::new(v.to_vec()).unwrap()
    }

    fn rp(v: &[f64]) -> ComplexPoint {
        RealPoint::from_slice(v).unwrap().to_complex()
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&rp(&[1.0, 0.0]), &rp(&[0.0, 1.0])).unwrap(), c(0.0, 0.0));
        // bilinear: i * i = -1, not |i|^2
        assert_eq!(dot(&cp(&[c(0.0, 1.0)]), &cp(&[c(0.0, 1.0)])).unwrap(), c(-1.0, 0.0));
        assert_eq!(
            dot(&rp(&[1.0, 2.0, 3.0]), &rp(&[4.0, 5.0, 6.0])).unwrap(),
            c(32.0, 0.0)
        );
    }

    #[test]
    fn dot_dimension_mismatch() {
        let err = dot(&rp(&[1.0]), &rp(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn empty_points_rejected() {
        assert_eq!(RealPoint::new(vec![]).unwrap_err(), Error::ZeroDimension);
        assert_eq!(ComplexPoint::new(vec![]).unwrap_err(), Error::ZeroDimension);
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus(&rp(&[0.0, 0.0, 0.0])), 0.0);
        assert_eq!(modulus(&rp(&[3.0, 4.0])), 5.0);
        let m = modulus(&cp(&[c(0.0, 1.0), c(1.0, 0.0)]));
        assert!((m - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn real_modulus_matches_dot() {
        let x = RealPoint::from_slice(&[0.3, -1.2, 2.5]).unwrap();
        let via_dot = x.dot(&x).unwrap().sqrt();
        assert!((modulus(&x.to_complex()) - via_dot).abs() < 1e-15);
        assert!((x.norm() - via_dot).abs() < 1e-15);
    }

    #[test]
    fn inequality_examples() {
        let e1 = rp(&[1.0, 0.0]);
        let e2 = rp(&[0.0, 1.0]);
        let r = check_inequalities(&e1, &e1).unwrap();
        assert_eq!(r.cs_slack, 0.0);
        assert_eq!(r.tri_slack, 0.0);
        let r = check_inequalities(&e1, &e2).unwrap();
        assert_eq!(r.cs_slack, 1.0);
        assert!((r.tri_slack - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn conjugation_rules_exact() {
        let z = c(3.0, -2.0);
        let w = c(-1.5, 4.0);
        assert_eq!(z.conj().conj(), z);
        assert_eq!((z + w).conj(), z.conj() + w.conj());
        assert_eq!((z * w).conj(), z.conj() * w.conj());
        assert_eq!(z.norm_sqr(), (z * z.conj()).re);
    }

    #[test]
    fn purely_imaginary_embedding() {
        let u = RealPoint::from_slice(&[0.3, -0.1]).unwrap();
        let iu = u.times_i();
        assert_eq!(iu.im(), u);
        assert_eq!(iu.re(), RealPoint::zeros(2).unwrap());
        assert!(u.to_complex().is_real());
    }

    fn point(len: usize) -> impl Strategy<Value = ComplexPoint> {
        proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), len)
            .prop_map(|v| ComplexPoint::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    fn pair() -> impl Strategy<Value = (ComplexPoint, ComplexPoint)> {
        (1usize..5).prop_flat_map(|n| (point(n), point(n)))
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_and_triangle((z, w) in pair()) {
            prop_assert!(check_inequalities(&z, &w).unwrap().holds(&z, &w, 1e-12));
        }

        #[test]
        fn scalar_modulus_is_multiplicative(a in -1e3f64..1e3, b in -1e3f64..1e3, p in -1e3f64..1e3, q in -1e3f64..1e3) {
            let (z, w) = (c(a, b), c(p, q));
            let lhs = modulus(&(z * w).into());
            let rhs = modulus(&z.into()) * modulus(&w.into());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }

        // small integers keep every product exact
        #[test]
        fn conjugation_is_additive_and_multiplicative(a in -1000i32..1000, b in -1000i32..1000, p in -1000i32..1000, q in -1000i32..1000) {
            let z = c(a as f64, b as f64);
            let w = c(p as f64, q as f64);
            prop_assert_eq!((z + w).conj(), z.conj() + w.conj());
            prop_assert_eq!((z * w).conj(), z.conj() * w.conj());
        }
    }
}
