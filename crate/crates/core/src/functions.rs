//! Ready-made test functions, addressable by a short preset string such as
//! `gauss:0.1`, `weierstrass:0.1` or `bump:1` (used by the CLI, the measure
//! literal format and the browser demo).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gauss_real, weierstrass_real, KernelScale};
use crate::numerics::{real_dot, RealPoint};
use crate::quadrature::{DecayEnvelope, TestFunction};

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `G_alpha` as a test function.
pub fn gauss_fn(scale: KernelScale) -> TestFunction {
    TestFunction::derived(
        format!("G_{}", scale.alpha()),
        scale.dim(),
        DecayEnvelope::gaussian(scale.gauss_rate(), 1.0),
        Some(1.0),
        move |x| real(gauss_real(scale, x)),
    )
}

/// `W_alpha` as a test function.
pub fn weierstrass_fn(scale: KernelScale) -> TestFunction {
    let peak = scale.weierstrass_peak();
    TestFunction::derived(
        format!("W_{}", scale.alpha()),
        scale.dim(),
        DecayEnvelope::gaussian(scale.weierstrass_rate(), peak),
        Some(peak),
        move |x| real(weierstrass_real(scale, x)),
    )
}

/// The constant `c`. Bounded but not integrable unless `c = 0`.
pub fn constant_fn(dim: usize, c: f64) -> Result<TestFunction> {
    let envelope = if c == 0.0 {
        DecayEnvelope::compact(1.0)
    } else {
        DecayEnvelope::bounded(c.abs())
    };
    TestFunction::new(format!("{c}"), dim, envelope, Some(c.abs()), move |_| real(c))
}

fn bump_profile(r2: f64, radius: f64) -> f64 {
    let t = r2 / (radius * radius);
    if t < 1.0 {
        (1.0 - 1.0 / (1.0 - t)).exp()
    } else {
        0.0
    }
}

/// Smooth bump `exp(1 - 1/(1 - |x|^2/R^2))` on `|x| < R`, peak 1 at the origin.
pub fn bump_fn(dim: usize, radius: f64) -> Result<TestFunction> {
    TestFunction::new(
        format!("bump_{radius}"),
        dim,
        DecayEnvelope::compact(radius),
        Some(1.0),
        move |x| real(bump_profile(real_dot(x, x), radius)),
    )
}

/// Sign-alternating pair: a bump of radius `R` at `+R e_1` minus one at `-R e_1`.
pub fn dipole_fn(dim: usize, radius: f64) -> Result<TestFunction> {
    TestFunction::new(
        format!("dipole_{radius}"),
        dim,
        DecayEnvelope::compact(2.0 * radius),
        Some(1.0),
        move |x| {
            let rest: f64 = x[1..].iter().map(|v| v * v).sum();
            let plus = bump_profile((x[0] - radius).powi(2) + rest, radius);
            let minus = bump_profile((x[0] + radius).powi(2) + rest, radius);
            real(plus - minus)
        },
    )
}

/// `1 / (1 + |x|^2)`: bounded and uniformly continuous, integrable only on `R^1`.
pub fn cauchy_fn(dim: usize) -> Result<TestFunction> {
    // (1 + r)^2 <= 2 (1 + r^2)
    let envelope = if dim == 1 {
        DecayEnvelope::polynomial(2.0, 2.0)
    } else {
        DecayEnvelope::bounded(1.0)
    };
    TestFunction::new("cauchy", dim, envelope, Some(1.0), |x| real(1.0 / (1.0 + real_dot(x, x))))
}

/// `x_1 exp(-|x|^2)`, odd in the first coordinate.
pub fn odd_fn(dim: usize) -> Result<TestFunction> {
    // t e^{-t^2} = (t e^{-t^2/2}) e^{-t^2/2} <= e^{-1/2} e^{-t^2/2}
    let peak = (-0.5f64).exp();
    TestFunction::new(
        "x1 exp(-|x|^2)",
        dim,
        DecayEnvelope::gaussian(0.5, peak),
        Some((2.0 * std::f64::consts::E).sqrt().recip()),
        |x| real(x[0] * (-real_dot(x, x)).exp()),
    )
}

/// The character `e_xi(x) = exp(-2 pi i x.xi)`.
pub fn character_fn(xi: &RealPoint) -> TestFunction {
    let freq = xi.coords().to_vec();
    TestFunction::derived(
        format!("e_{:?}", xi.coords()),
        xi.dim(),
        DecayEnvelope::bounded(1.0),
        Some(1.0),
        move |x| Complex64::from_polar(1.0, -2.0 * PI * real_dot(x, &freq)),
    )
}

/// A named test function, parsed from `name[:parameter]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Preset {
    Gauss(f64),
    Weierstrass(f64),
    Bump(f64),
    Dipole(f64),
    Constant(f64),
    Cauchy,
    Odd,
}

impl Preset {
    pub fn build(&self, dim: usize) -> Result<TestFunction> {
        match *self {
            Preset::Gauss(a) => Ok(gauss_fn(KernelScale::new(a, dim)?)),
            Preset::Weierstrass(a) => Ok(weierstrass_fn(KernelScale::new(a, dim)?)),
            Preset::Bump(r) => bump_fn(dim, r),
            Preset::Dipole(r) => dipole_fn(dim, r),
            Preset::Constant(c) => constant_fn(dim, c),
            Preset::Cauchy => cauchy_fn(dim),
            Preset::Odd => odd_fn(dim),
        }
    }

    /// `int_{R^n} f` where a closed form is known.
    pub fn closed_form_integral(&self, dim: usize) -> Option<f64> {
        match *self {
            Preset::Gauss(a) => KernelScale::new(a, dim).ok().map(|s| s.weierstrass_peak()),
            Preset::Weierstrass(_) => Some(1.0),
            Preset::Dipole(_) | Preset::Odd => Some(0.0),
            Preset::Constant(0.0) => Some(0.0),
            Preset::Cauchy if dim == 1 => Some(PI),
            _ => None,
        }
    }

    /// `f^(xi)` where a closed form is known: the Gauss and Weierstrass
    /// kernels are each other's transforms.
    pub fn closed_form_fourier(&self, xi: &[f64]) -> Option<Complex64> {
        let dim = xi.len();
        match *self {
            Preset::Gauss(a) => KernelScale::new(a, dim).ok().map(|s| real(weierstrass_real(s, xi))),
            Preset::Weierstrass(a) => KernelScale::new(a, dim).ok().map(|s| real(gauss_real(s, xi))),
            Preset::Cauchy if dim == 1 => Some(real(PI * (-2.0 * PI * xi[0].abs()).exp())),
            _ => None,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let param = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("preset `{name}` needs a {what}")))?;
            a.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad {what} `{a}` in preset `{s}`")))
        };
        match name {
            "gauss" => Ok(Preset::Gauss(param("scale")?)),
            "weierstrass" => Ok(Preset::Weierstrass(param("scale")?)),
            "bump" => Ok(Preset::Bump(param("radius")?)),
            "dipole" => Ok(Preset::Dipole(param("radius")?)),
            "const" => Ok(Preset::Constant(param("value")?)),
            "cauchy" => Ok(Preset::Cauchy),
            "odd" => Ok(Preset::Odd),
            _ => Err(Error::Parse(format!("unknown function preset `{s}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Gauss(a) => write!(f, "gauss:{a}"),
            Preset::Weierstrass(a) => write!(f, "weierstrass:{a}"),
            Preset::Bump(r) => write!(f, "bump:{r}"),
            Preset::Dipole(r) => write!(f, "dipole:{r}"),
            Preset::Constant(c) => write!(f, "const:{c}"),
            Preset::Cauchy => write!(f, "cauchy"),
            Preset::Odd => write!(f, "odd"),
        }
    }
}
