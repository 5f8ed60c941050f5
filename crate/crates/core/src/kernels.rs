//! The Gauss kernel `G_a(x) = exp(-4 pi^2 a x.x)` and the Weierstrass
//! (heat) kernel `W_a(x) = (4 pi a)^(-n/2) exp(-x.x / (4a))`.
//!
//! Both are evaluated from the same formula on real and complex arguments.
//! The real-argument paths take plain slices and are the ones the quadrature
//! engine calls in its inner loops.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{check_dims, dot, real_dot, ComplexPoint, ComplexScalar};

/// Scale `alpha > 0` shared by `G_alpha` and `W_alpha`, on `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelScale {
    alpha: f64,
    dim: usize,
}

impl KernelScale {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidScale(alpha));
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(4 pi alpha)^(-n/2)`, the peak value `W_alpha(0)`.
    pub fn weierstrass_peak(&self) -> f64 {
        (4.0 * PI * self.alpha).powf(-(self.dim as f64) / 2.0)
    }

    /// Rate `4 pi^2 alpha` in `G_alpha(x) = exp(-rate |x|^2)`.
    pub fn gauss_rate(&self) -> f64 {
        4.0 * PI * PI * self.alpha
    }

    /// Rate `1 / (4 alpha)` in `W_alpha(x) = peak * exp(-rate |x|^2)`.
    pub fn weierstrass_rate(&self) -> f64 {
        1.0 / (4.0 * self.alpha)
    }
}

fn flush(v: f64) -> f64 {
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

fn flush_complex(z: Complex64) -> Complex64 {
    if z.norm() < f64::MIN_POSITIVE {
        Complex64::new(0.0, 0.0)
    } else {
        z
    }
}

/// `G_alpha(x)` for complex `x`.
pub fn gauss(scale: KernelScale, x: &ComplexPoint) -> Result<ComplexScalar> {
    check_dims(scale.dim, x.dim())?;
    let xx = dot(x, x)?;
    Ok(flush_complex((-scale.gauss_rate() * xx).exp()))
}

/// `W_alpha(x)` for complex `x`.
pub fn weierstrass(scale: KernelScale, x: &ComplexPoint) -> Result<ComplexScalar> {
    check_dims(scale.dim, x.dim())?;
    let xx = dot(x, x)?;
    Ok(flush_complex(
        scale.weierstrass_peak() * (-scale.weierstrass_rate() * xx).exp(),
    ))
}

/// `G_alpha(x)` for real `x`; the slice length must equal `scale.dim()`.
pub fn gauss_real(scale: KernelScale, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), scale.dim);
    flush((-scale.gauss_rate() * real_dot(x, x)).exp())
}

/// `W_alpha(x)` for real `x`; the slice length must equal `scale.dim()`.
pub fn weierstrass_real(scale: KernelScale, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), scale.dim);
    flush(scale.weierstrass_peak() * (-scale.weierstrass_rate() * real_dot(x, x)).exp())
}

/// Scale of the pointwise product: `G_a(x) G_b(x) = G_{a+b}(x)`.
pub fn gauss_product_scale(a: KernelScale, b: KernelScale) -> Result<KernelScale> {
    check_dims(a.dim, b.dim)?;
    KernelScale::new(a.alpha + b.alpha, a.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealPoint;
    use proptest::prelude::*;

    fn ks(alpha: f64, dim: usize) -> KernelScale {
        KernelScale::new(alpha, dim).unwrap()
    }

    fn pt(v: &[f64]) -> ComplexPoint {
        RealPoint::from_slice(v).unwrap().to_complex()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn scale_rejects_nonpositive() {
        assert_eq!(KernelScale::new(0.0, 1).unwrap_err(), Error::InvalidScale(0.0));
        assert!(KernelScale::new(-1.0, 1).is_err());
        assert!(KernelScale::new(f64::NAN, 1).is_err());
        assert_eq!(KernelScale::new(1.0, 0).unwrap_err(), Error::ZeroDimension);
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(gauss(ks(0.7, 2), &pt(&[0.0, 0.0])).unwrap(), Complex64::new(1.0, 0.0));
        let g = gauss(ks(1.0 / (4.0 * PI * PI), 1), &pt(&[1.0])).unwrap();
        assert!(rel(g.re, (-1.0f64).exp()) < 1e-15);
        assert!((g.re - 0.3678794).abs() < 1e-7);
        assert_eq!(g.im, 0.0);
        // x.x = -1 on the imaginary axis flips the sign of the exponent
        let g = gauss(ks(1.0, 1), &Complex64::new(0.0, 1.0).into()).unwrap();
        assert!(rel(g.re, (4.0 * PI * PI).exp()) < 1e-14);
    }

    #[test]
    fn weierstrass_examples() {
        let w = weierstrass(ks(1.0 / (4.0 * PI), 1), &pt(&[0.0])).unwrap();
        assert!((w.re - 1.0).abs() < 1e-15);
        let w = weierstrass(ks(0.15, 1), &pt(&[0.0])).unwrap();
        assert!(rel(w.re, (0.6 * PI).powf(-0.5)) < 1e-15);
        assert!((w.re - 0.728366).abs() < 1e-6);
        let w = weierstrass(ks(0.3, 2), &pt(&[0.0, 0.0])).unwrap();
        assert!(rel(w.re, 1.0 / (4.0 * PI * 0.3)) < 1e-15);
    }

    #[test]
    fn kernel_dimension_mismatch() {
        assert!(matches!(
            gauss(ks(1.0, 2), &pt(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(weierstrass(ks(1.0, 1), &pt(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn product_scale_examples() {
        let s = gauss_product_scale(ks(1.0, 1), ks(2.0, 1)).unwrap();
        assert_eq!(s.alpha(), 3.0);
        let x = [0.7];
        let lhs = gauss_real(ks(1.0, 1), &x) * gauss_real(ks(2.0, 1), &x);
        assert!(rel(lhs, gauss_real(s, &x)) < 1e-14);
        assert_eq!(gauss_product_scale(ks(0.25, 1), ks(0.25, 1)).unwrap().alpha(), 0.5);
        assert_eq!(gauss_real(s, &[0.0]), 1.0);
        assert!(gauss_product_scale(ks(1.0, 1), ks(1.0, 2)).is_err());
    }

    #[test]
    fn underflow_flushes_to_zero() {
        assert_eq!(gauss_real(ks(10.0, 1), &[100.0]), 0.0);
        assert_eq!(weierstrass_real(ks(1e-4, 1), &[10.0]), 0.0);
    }

    #[test]
    fn imaginary_argument_sign_flip() {
        let u = RealPoint::from_slice(&[0.3, -0.2]).unwrap();
        let g = gauss(ks(0.2, 2), &u.times_i()).unwrap();
        let expected = (4.0 * PI * PI * 0.2 * u.dot(&u).unwrap()).exp();
        assert!(rel(g.re, expected) < 1e-14);
        assert!(g.im.abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn positivity_and_evenness(alpha in 1e-3f64..10.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let s = ks(alpha, 2);
            let g = gauss_real(s, &[x, y]);
            let w = weierstrass_real(s, &[x, y]);
            prop_assert!((0.0..=1.0).contains(&g));
            prop_assert!(w >= 0.0);
            prop_assert_eq!(g, gauss_real(s, &[-x, -y]));
            prop_assert_eq!(w, weierstrass_real(s, &[-x, -y]));
            if x * x + y * y < 1.0 {
                prop_assert!(w > 0.0);
                prop_assert!(g > 0.0);
            }
        }

        // exponents stay below ~8 so that rounding in the exponent stays under 1e-14 relative
        #[test]
        fn rescaling_consistency(alpha in 1e-3f64..0.2, x in -1.0f64..1.0) {
            let lhs = gauss_real(ks(alpha, 1), &[x]);
            let rhs = gauss_real(ks(1.0, 1), &[alpha.sqrt() * x]);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(f64::MIN_POSITIVE) || lhs == rhs);
        }

        #[test]
        fn complex_path_agrees_with_real(alpha in 1e-2f64..2.0, x in -3.0f64..3.0) {
            let s = ks(alpha, 1);
            let g = gauss(s, &pt(&[x])).unwrap();
            let w = weierstrass(s, &pt(&[x])).unwrap();
            prop_assert!((g.re - gauss_real(s, &[x])).abs() <= 1e-15);
            prop_assert!((w.re - weierstrass_real(s, &[x])).abs() <= 1e-14 * w.re.max(1.0));
            prop_assert_eq!(g.im, 0.0);
        }

        #[test]
        fn imaginary_argument_grows(alpha in 1e-3f64..0.2, u in -1.0f64..1.0, v in -1.0f64..1.0) {
            let p = RealPoint::from_slice(&[u, v]).unwrap();
            let g = gauss(ks(alpha, 2), &p.times_i()).unwrap();
            let expected = (4.0 * PI * PI * alpha * (u * u + v * v)).exp();
            prop_assert!((g.re - expected).abs() <= 1e-14 * expected);
            prop_assert_eq!(g.im, 0.0);
        }

        #[test]
        fn product_law(a in 1e-3f64..0.1, b in 1e-3f64..0.1, x in -1.0f64..1.0) {
            let (sa, sb) = (ks(a, 1), ks(b, 1));
            let lhs = gauss_real(sa, &[x]) * gauss_real(sb, &[x]);
            let rhs = gauss_real(gauss_product_scale(sa, sb).unwrap(), &[x]);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs);
        }
    }
}
