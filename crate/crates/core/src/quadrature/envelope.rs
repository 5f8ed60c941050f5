use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared analytic bound on `|g(x)|`, used to certify truncation of
/// `int_{R^n} g` to the cube `[-R, R]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayEnvelope {
    /// `|g(x)| <= scale * exp(-rate |x|^2)`
    Gaussian { rate: f64, scale: f64 },
    /// `|g(x)| <= scale * (1 + |x|)^(-power)`, with `power > n`
    Polynomial { power: f64, scale: f64 },
    /// `g(x) = 0` for `|x| > radius`
    CompactSupport { radius: f64 },
    /// `|g(x)| <= bound`; not integrable-certified
    BoundedOnly { bound: f64 },
}

fn positive(arg: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(arg, format!("must be finite and positive, got {v}")))
    }
}

/// Surface area of the unit sphere in `R^n`, `2 pi^(n/2) / Gamma(n/2)`.
pub(crate) fn unit_sphere_area(n: usize) -> f64 {
    // Gamma(n/2) by the recursion Gamma(s + 1) = s Gamma(s)
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut s = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while s < n as f64 / 2.0 {
        gamma *= s;
        s += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / gamma
}

impl DecayEnvelope {
    pub fn gaussian(rate: f64, scale: f64) -> Self {
        DecayEnvelope::Gaussian { rate, scale }
    }

    pub fn polynomial(power: f64, scale: f64) -> Self {
        DecayEnvelope::Polynomial { power, scale }
    }

    pub fn compact(radius: f64) -> Self {
        DecayEnvelope::CompactSupport { radius }
    }

    pub fn bounded(bound: f64) -> Self {
        DecayEnvelope::BoundedOnly { bound }
    }

    /// Parameter checks; a polynomial envelope with `power <= dim` is not
    /// integrable and is rejected here.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            DecayEnvelope::Gaussian { rate, scale } => {
                positive("rate", rate)?;
                positive("scale", scale)
            }
            DecayEnvelope::Polynomial { power, scale } => {
                positive("scale", scale)?;
                if !(power.is_finite() && power > dim as f64) {
                    return Err(Error::NotIntegrable(format!(
                        "polynomial decay power {power} must exceed the dimension {dim}"
                    )));
                }
                Ok(())
            }
            DecayEnvelope::CompactSupport { radius } => positive("radius", radius),
            DecayEnvelope::BoundedOnly { bound } => positive("bound", bound),
        }
    }

    pub fn is_integrable(&self) -> bool {
        !matches!(self, DecayEnvelope::BoundedOnly { .. })
    }

    /// Pointwise bound at Euclidean norm `r`; `None` means no bound is implied
    /// (inside a compact support, or a bare `BoundedOnly` is checked separately).
    pub fn bound_at(&self, r: f64) -> Option<f64> {
        match *self {
            DecayEnvelope::Gaussian { rate, scale } => Some(scale * (-rate * r * r).exp()),
            DecayEnvelope::Polynomial { power, scale } => Some(scale * (1.0 + r).powf(-power)),
            DecayEnvelope::CompactSupport { radius } => (r > radius).then_some(0.0),
            DecayEnvelope::BoundedOnly { bound } => Some(bound),
        }
    }

    /// Closed-form upper bound on `int |g|` over the complement of `[-R, R]^n`.
    ///
    /// The complement of the cube lies inside the union of the slabs
    /// `|x_j| > R`, and also outside the ball of radius `R`; Gaussian bounds
    /// use the former with `erfc(z) <= exp(-z^2) / (z sqrt(pi))`, polynomial
    /// bounds the latter with `r^(n-1) <= (1 + r)^(n-1)`.
    /// Returns `+inf` when nothing can be certified.
    pub fn tail_bound(&self, radius: f64, dim: usize) -> f64 {
        let n = dim as f64;
        match *self {
            DecayEnvelope::Gaussian { rate, scale } => {
                let slab = (-rate * radius * radius).exp() / (rate * radius);
                n * scale * (PI / rate).powf((n - 1.0) / 2.0) * slab
            }
            DecayEnvelope::Polynomial { power, scale } => {
                scale * unit_sphere_area(dim) * (1.0 + radius).powf(n - power) / (power - n)
            }
            DecayEnvelope::CompactSupport { radius: r0 } => {
                if radius >= r0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            DecayEnvelope::BoundedOnly { .. } => f64::INFINITY,
        }
    }

    /// Envelope of `k * g`.
    pub fn scaled(&self, k: f64) -> DecayEnvelope {
        let k = k.abs();
        match *self {
            DecayEnvelope::Gaussian { rate, scale } => DecayEnvelope::Gaussian {
                rate,
                scale: scale * k,
            },
            DecayEnvelope::Polynomial { power, scale } => DecayEnvelope::Polynomial {
                power,
                scale: scale * k,
            },
            c @ DecayEnvelope::CompactSupport { .. } => c,
            DecayEnvelope::BoundedOnly { bound } => DecayEnvelope::BoundedOnly { bound: bound * k },
        }
    }

    /// Envelope of `g(. - a)` with `|a| = shift`.
    pub fn translated(&self, shift: f64) -> DecayEnvelope {
        match *self {
            // |x - a|^2 >= |x|^2 / 2 - |a|^2
            DecayEnvelope::Gaussian { rate, scale } => DecayEnvelope::Gaussian {
                rate: rate / 2.0,
                scale: scale * (rate * shift * shift).exp(),
            },
            // (1 + |x - a|)^(-p) <= (1 + |a|)^p (1 + |x|)^(-p)
            DecayEnvelope::Polynomial { power, scale } => DecayEnvelope::Polynomial {
                power,
                scale: scale * (1.0 + shift).powf(power),
            },
            DecayEnvelope::CompactSupport { radius } => DecayEnvelope::CompactSupport {
                radius: radius + shift,
            },
            b @ DecayEnvelope::BoundedOnly { .. } => b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tail_is_tiny_at_six() {
        let env = DecayEnvelope::gaussian(PI, 1.0);
        let tail = env.tail_bound(6.0, 1);
        assert!(tail <= (-PI * 36.0).exp() / 6.0);
        assert!(tail < 1e-48);
    }

    #[test]
    fn gaussian_tail_dominates_exact_tail() {
        // exact: int_{|x|>R} exp(-c x^2) = sqrt(pi/c) erfc(R sqrt c); check by
        // a crude Riemann sum far past R
        let (c, r) = (0.5, 3.0);
        let env = DecayEnvelope::gaussian(c, 1.0);
        let h = 1e-4;
        let exact: f64 = 2.0 * (0..200_000).map(|k| (-c * (r + (k as f64 + 0.5) * h).powi(2)).exp() * h).sum::<f64>();
        let bound = env.tail_bound(r, 1);
        assert!(bound >= exact);
        assert!(bound < 1.5 * exact);
    }

    #[test]
    fn polynomial_tail_formula() {
        let env = DecayEnvelope::polynomial(1.5, 1.0);
        env.validate(1).unwrap();
        // 2 (1 + R)^(-1/2) / (1/2)
        assert!((env.tail_bound(15.0, 1) - 1.0).abs() < 1e-15);
        assert!(matches!(
            DecayEnvelope::polynomial(1.0, 1.0).validate(1),
            Err(Error::NotIntegrable(_))
        ));
        assert!(DecayEnvelope::polynomial(1.5, 1.0).validate(2).is_err());
    }

    #[test]
    fn compact_and_bounded_tails() {
        let env = DecayEnvelope::compact(1.0);
        assert_eq!(env.tail_bound(4.0, 3), 0.0);
        assert_eq!(env.tail_bound(0.5, 1), f64::INFINITY);
        assert_eq!(DecayEnvelope::bounded(1.0).tail_bound(16.0, 1), f64::INFINITY);
        assert!(!DecayEnvelope::bounded(1.0).is_integrable());
    }

    #[test]
    fn translated_gaussian_envelope_dominates() {
        let (c, a) = (2.0, 0.7);
        let env = DecayEnvelope::gaussian(c, 1.0).translated(a);
        for k in 0..200 {
            let x = -6.0 + 0.06 * k as f64;
            let g = (-c * (x - a) * (x - a)).exp();
            assert!(g <= env.bound_at(x.abs()).unwrap() * (1.0 + 1e-12));
        }
    }
}
