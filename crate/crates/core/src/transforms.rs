//! Fourier transforms, Gauss means and Weierstrass smoothing of test functions.
//!
//! Conventions: `f^(xi) = int f(x) exp(-2 pi i x.xi) dx` and
//! `phi_v(x) = int phi(xi) exp(2 pi i x.xi) dxi`. With these, `G_a` and `W_a`
//! are each other's transforms.
//!
//! [`gauss_inversion`] integrates sampled values of `f^` against
//! `exp(2 pi i x.xi) G_a(xi)` directly. It never substitutes the closed form
//! `W_a * f`, so comparing it with [`mollify`] is an end-to-end test of the
//! Multiplication Formula route rather than an identity by construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gauss_real, weierstrass_real, KernelScale};
use crate::numerics::{check_dims, real_dot, real_norm, ComplexPoint, RealPoint};
use crate::quadrature::{DecayEnvelope, GridSpec, Quadrature, QuadratureResult, TestFunction};

/// Integrand values below this are treated as exact zeros when deciding
/// whether an expensive inner transform is needed at a node.
const NEGLIGIBLE: f64 = 1e-20;

/// Largest node spacing that keeps the phase of `exp(2 pi i x.xi)` from
/// advancing more than a quarter cycle per step: `|xi| h <= 1/4`.
pub fn oscillation_spacing(freq_norm: f64) -> Option<f64> {
    (freq_norm > 0.0).then(|| 0.25 / freq_norm)
}

/// Best available bound on `sup |f|`.
pub(crate) fn sup_of(f: &TestFunction) -> Option<f64> {
    let declared = f.sup_bound();
    let enveloped = match f.envelope() {
        DecayEnvelope::BoundedOnly { bound } => Some(bound),
        DecayEnvelope::Gaussian { scale, .. } | DecayEnvelope::Polynomial { scale, .. } => Some(scale),
        DecayEnvelope::CompactSupport { .. } => None,
    };
    match (declared, enveloped) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn phase(sign: f64, x: &[f64], xi: &[f64]) -> Complex64 {
    Complex64::from_polar(1.0, sign * 2.0 * PI * real_dot(x, xi))
}

/// `int |f|` with its quadrature error terms.
pub fn l1_norm(quad: &Quadrature, f: &TestFunction, tol: f64) -> Result<QuadratureResult> {
    f.require_integrable()?;
    quad.integrate_fn_auto(f.dim(), &f.envelope(), tol, None, |x| {
        Ok(Complex64::new(f.eval(x).norm(), 0.0))
    })
}

/// Certified upper bound on `int |f|`.
pub(crate) fn l1_upper(quad: &Quadrature, f: &TestFunction, tol: f64) -> Result<f64> {
    let r = l1_norm(quad, f, tol)?;
    Ok(r.value.re + r.error_bound())
}

fn phase_integral(
    quad: &Quadrature,
    f: &TestFunction,
    freq: &RealPoint,
    sign: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    f.require_integrable()?;
    check_dims(f.dim(), freq.dim())?;
    let xi = freq.coords();
    quad.integrate_fn_auto(
        f.dim(),
        &f.envelope(),
        tol,
        oscillation_spacing(freq.norm()),
        |x| Ok(f.eval(x) * phase(sign, x, xi)),
    )
}

/// `f^(xi)` with quadrature error terms.
pub fn fourier_result(
    quad: &Quadrature,
    f: &TestFunction,
    xi: &RealPoint,
    tol: f64,
) -> Result<QuadratureResult> {
    phase_integral(quad, f, xi, -1.0, tol)
}

/// `f^(xi) = int f(x) exp(-2 pi i x.xi) dx`.
pub fn fourier(quad: &Quadrature, f: &TestFunction, xi: &RealPoint, tol: f64) -> Result<Complex64> {
    Ok(fourier_result(quad, f, xi, tol)?.value)
}

/// `phi_v(x) = int phi(xi) exp(2 pi i x.xi) dxi`.
pub fn inverse_fourier(
    quad: &Quadrature,
    phi: &TestFunction,
    x: &RealPoint,
    tol: f64,
) -> Result<Complex64> {
    Ok(phase_integral(quad, phi, x, 1.0, tol)?.value)
}

/// `f^(xi)` at a complex frequency.
///
/// On the cube the factor `|exp(-2 pi i x.xi)| = exp(2 pi x.v)`, `v = Im xi`,
/// grows; a Gaussian envelope `C exp(-c|x|^2)` still dominates the product via
/// `-c|x|^2 + 2 pi |v||x| <= -(c/2)|x|^2 + 2 pi^2 |v|^2 / c`.
pub fn fourier_complex(
    quad: &Quadrature,
    f: &TestFunction,
    xi: &ComplexPoint,
    tol: f64,
) -> Result<Complex64> {
    check_dims(f.dim(), xi.dim())?;
    if xi.is_real() {
        return fourier(quad, f, &xi.re(), tol);
    }
    let re = xi.re();
    let im = xi.im();
    let v2 = real_dot(im.coords(), im.coords());
    let envelope = match f.envelope() {
        DecayEnvelope::Gaussian { rate, scale } => DecayEnvelope::Gaussian {
            rate: rate / 2.0,
            scale: scale * (2.0 * PI * PI * v2 / rate).exp(),
        },
        DecayEnvelope::CompactSupport { radius } => DecayEnvelope::CompactSupport { radius },
        other => {
            return Err(Error::EnvelopeInsufficient(format!(
                "{other:?} cannot dominate exponential growth at complex frequency"
            )))
        }
    };
    let (re, im) = (re.coords().to_vec(), im.coords().to_vec());
    let r = quad.integrate_fn_auto(
        f.dim(),
        &envelope,
        tol,
        oscillation_spacing(real_norm(&re)),
        |x| {
            let growth = (2.0 * PI * real_dot(x, &im)).exp();
            Ok(f.eval(x) * growth * phase(-1.0, x, &re))
        },
    )?;
    Ok(r.value)
}

/// A transform value at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    pub xi: RealPoint,
    pub value: Complex64,
}

pub fn fourier_samples(
    quad: &Quadrature,
    f: &TestFunction,
    xis: &[RealPoint],
    tol: f64,
) -> Result<Vec<FrequencySample>> {
    xis.iter()
        .map(|xi| {
            Ok(FrequencySample {
                xi: xi.clone(),
                value: fourier(quad, f, xi, tol)?,
            })
        })
        .collect()
}

/// Gauss mean `int f(x) G_alpha(x) dx`.
pub fn gauss_mean(quad: &Quadrature, f: &TestFunction, alpha: f64, tol: f64) -> Result<Complex64> {
    let scale = KernelScale::new(alpha, f.dim())?;
    let rate = scale.gauss_rate();
    let envelope = match (f.envelope(), sup_of(f)) {
        (DecayEnvelope::Gaussian { rate: c, scale: k }, _) => DecayEnvelope::gaussian(c + rate, k),
        (c @ DecayEnvelope::CompactSupport { .. }, _) => c,
        (_, Some(m)) => DecayEnvelope::gaussian(rate, m.max(f64::MIN_POSITIVE)),
        (p @ DecayEnvelope::Polynomial { .. }, None) => p,
        (DecayEnvelope::BoundedOnly { .. }, None) => unreachable!("bounded-only envelopes carry a bound"),
    };
    let r = quad.integrate_fn_auto(f.dim(), &envelope, tol, None, |x| {
        Ok(f.eval(x) * gauss_real(scale, x))
    })?;
    Ok(r.value)
}

/// Values of a summability method along a decreasing ladder of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityTrace {
    /// Evaluation point, when the method is pointwise.
    pub point: Option<RealPoint>,
    pub alphas: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Tolerance the values were computed at.
    pub tol: f64,
}

impl SummabilityTrace {
    pub fn new(
        point: Option<RealPoint>,
        alphas: Vec<f64>,
        values: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self> {
        if alphas.len() != values.len() {
            return Err(Error::invalid("values", "one value per scale is required"));
        }
        if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::invalid("alphas", "scales must be positive"));
        }
        if alphas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("alphas", "scales must be strictly decreasing"));
        }
        Ok(Self {
            point,
            alphas,
            values,
            tol,
        })
    }
}

/// `alpha_k = start * 2^-k` for `k = 0..count`.
pub fn geometric_ladder(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * 0.5f64.powi(k as i32)).collect()
}

pub fn gauss_mean_trace(
    quad: &Quadrature,
    f: &TestFunction,
    alphas: &[f64],
    tol: f64,
) -> Result<SummabilityTrace> {
    let values = alphas
        .iter()
        .map(|&a| gauss_mean(quad, f, a, tol))
        .collect::<Result<Vec<_>>>()?;
    SummabilityTrace::new(None, alphas.to_vec(), values, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummabilityLimit {
    pub limit: Complex64,
    pub converged: bool,
    pub last_difference: f64,
}

/// Reads off the `alpha -> 0` limit of a trace.
///
/// Converged means the last successive difference is at most ten times the
/// trace tolerance and has shrunk by at least a factor 0.75 relative to the
/// one before it (differences already at the tolerance floor count as
/// shrinking). The limit reported is the last value.
pub fn gauss_summable_limit(trace: &SummabilityTrace) -> Result<SummabilityLimit> {
    if trace.alphas.len() < 4 {
        return Err(Error::invalid("trace", "at least 4 scales are required"));
    }
    if trace.alphas.windows(2).any(|w| w[1] > 0.5 * w[0] * (1.0 + 1e-12)) {
        return Err(Error::invalid("trace", "scales must decrease by a factor of at least 2"));
    }
    let diffs: Vec<f64> = trace.values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let last = diffs[diffs.len() - 1];
    let prev = diffs[diffs.len() - 2];
    let shrinking = last <= trace.tol || last <= 0.75 * prev;
    Ok(SummabilityLimit {
        limit: trace.values[trace.values.len() - 1],
        converged: shrinking && last <= 10.0 * trace.tol,
        last_difference: last,
    })
}

/// `(W_alpha * f)(x) = int f(y) W_alpha(x - y) dy`.
///
/// Bounded `f` is integrated in the variable `u = x - y` against the
/// kernel's own Gaussian envelope; unbounded integrable `f` uses its envelope
/// scaled by the kernel peak.
pub fn mollify(
    quad: &Quadrature,
    f: &TestFunction,
    alpha: f64,
    x: &RealPoint,
    tol: f64,
) -> Result<Complex64> {
    check_dims(f.dim(), x.dim())?;
    let scale = KernelScale::new(alpha, f.dim())?;
    let peak = scale.weierstrass_peak();
    let xc = x.coords();
    let r = if let Some(m) = sup_of(f) {
        let envelope = DecayEnvelope::gaussian(scale.weierstrass_rate(), m * peak);
        let mut y = vec![0.0; f.dim()];
        quad.integrate_fn_auto(f.dim(), &envelope, tol, None, |u| {
            for ((yj, xj), uj) in y.iter_mut().zip(xc).zip(u) {
                *yj = xj - uj;
            }
            Ok(f.eval(&y) * weierstrass_real(scale, u))
        })?
    } else if f.is_integrable() {
        let envelope = f.envelope().scaled(peak);
        let mut d = vec![0.0; f.dim()];
        quad.integrate_fn_auto(f.dim(), &envelope, tol, None, |y| {
            for ((dj, xj), yj) in d.iter_mut().zip(xc).zip(y) {
                *dj = xj - yj;
            }
            Ok(f.eval(y) * weierstrass_real(scale, &d))
        })?
    } else {
        return Err(Error::NotIntegrable(format!(
            "`{}` is neither bounded nor integrable",
            f.label()
        )));
    };
    Ok(r.value)
}

/// Both sides of `sup |W_alpha * f| <= sup |f|`, the left over sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupCheck {
    pub smoothed_max: f64,
    pub sup: f64,
}

impl SupCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.smoothed_max <= self.sup + slack
    }
}

pub fn mollify_sup_check(
    quad: &Quadrature,
    f: &TestFunction,
    alpha: f64,
    xs: &[RealPoint],
    tol: f64,
) -> Result<SupCheck> {
    let sup = sup_of(f).ok_or_else(|| Error::Unbounded(f.label().to_string()))?;
    let mut smoothed_max = 0.0f64;
    for x in xs {
        smoothed_max = smoothed_max.max(mollify(quad, f, alpha, x, tol)?.norm());
    }
    Ok(SupCheck { smoothed_max, sup })
}

/// Both sides of `int |W_alpha * f| <= int |f|` on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Check {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

impl L1Check {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// Envelope for `W_alpha * f` given the envelope of `f`.
fn smoothed_envelope(
    envelope: DecayEnvelope,
    scale: KernelScale,
    l1: f64,
) -> Result<DecayEnvelope> {
    let n = scale.dim() as f64;
    let a = scale.alpha();
    match envelope {
        // Gaussian convolved with a Gaussian, in closed form
        DecayEnvelope::Gaussian { rate, scale: k } => {
            let s = 1.0 + 4.0 * a * rate;
            Ok(DecayEnvelope::gaussian(rate / s, k * s.powf(-n / 2.0)))
        }
        // |x - y| >= |x| - R0 on the support, and (|x| - R0)^2 >= |x|^2/2 - R0^2
        DecayEnvelope::CompactSupport { radius } => Ok(DecayEnvelope::gaussian(
            1.0 / (8.0 * a),
            l1 * scale.weierstrass_peak() * (radius * radius / (4.0 * a)).exp(),
        )),
        other => Err(Error::EnvelopeInsufficient(format!(
            "no certified envelope for W * f with {other:?}"
        ))),
    }
}

pub fn mollify_l1_check(
    quad: &Quadrature,
    f: &TestFunction,
    alpha: f64,
    grid: &GridSpec,
    tol: f64,
) -> Result<L1Check> {
    f.require_integrable()?;
    check_dims(f.dim(), grid.dim())?;
    let scale = KernelScale::new(alpha, f.dim())?;
    let rhs = quad.integrate_fn(&f.envelope(), grid, |x| Ok(Complex64::new(f.eval(x).norm(), 0.0)))?;
    let l1 = rhs.value.re + rhs.error_bound();
    let envelope = smoothed_envelope(f.envelope(), scale, l1)?;
    let volume = (2.0 * grid.radius()).powi(grid.dim() as i32);
    let inner_tol = tol / (2.0 * volume);
    let lhs = quad.integrate_fn(&envelope, grid, |p| {
        let x = RealPoint::from_slice(p)?;
        Ok(Complex64::new(mollify(quad, f, alpha, &x, inner_tol)?.norm(), 0.0))
    })?;
    Ok(L1Check {
        lhs: lhs.value.re,
        rhs: rhs.value.re,
        lhs_error: lhs.error_bound() + inner_tol * volume,
        rhs_error: rhs.error_bound(),
    })
}

/// Gauss-summed inverse transform of `f^` at `x`:
/// `int f^(xi) exp(2 pi i x.xi) G_alpha(xi) dxi`, with `f^` sampled by
/// quadrature at every frequency node.
pub fn gauss_inversion(
    quad: &Quadrature,
    f: &TestFunction,
    x: &RealPoint,
    alpha: f64,
    tol: f64,
) -> Result<Complex64> {
    f.require_integrable()?;
    check_dims(f.dim(), x.dim())?;
    let scale = KernelScale::new(alpha, f.dim())?;
    let l1 = l1_upper(quad, f, tol)?;
    // inner errors are integrated against G_alpha, whose mass is W_alpha(0)
    let inner_tol = (tol / (2.0 * scale.weierstrass_peak())).min(tol);
    let envelope = DecayEnvelope::gaussian(scale.gauss_rate(), l1 + inner_tol);
    let xc = x.coords();
    let r = quad.integrate_fn_auto(
        f.dim(),
        &envelope,
        tol / 2.0,
        oscillation_spacing(x.norm()),
        |xi| {
            let g = gauss_real(scale, xi);
            if g * (l1 + inner_tol) < NEGLIGIBLE {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let freq = RealPoint::from_slice(xi)?;
            let fh = fourier(quad, f, &freq, inner_tol)?;
            Ok(fh * phase(1.0, xc, xi) * g)
        },
    )?;
    Ok(r.value)
}

pub fn inversion_trace(
    quad: &Quadrature,
    f: &TestFunction,
    x: &RealPoint,
    alphas: &[f64],
    tol: f64,
) -> Result<SummabilityTrace> {
    let values = alphas
        .iter()
        .map(|&a| gauss_inversion(quad, f, x, a, tol))
        .collect::<Result<Vec<_>>>()?;
    SummabilityTrace::new(Some(x.clone()), alphas.to_vec(), values, tol)
}

/// The two sides of `int f^ psi = int f psi^`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplicationCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl MultiplicationCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

fn require_certified_decay(f: &TestFunction) -> Result<()> {
    match f.envelope() {
        DecayEnvelope::Gaussian { .. } | DecayEnvelope::CompactSupport { .. } => Ok(()),
        other => Err(Error::EnvelopeInsufficient(format!(
            "`{}` needs a Gaussian or compact envelope, has {other:?}",
            f.label()
        ))),
    }
}

/// `int g^(xi) w(xi) dxi` with `g^` sampled by quadrature at every node.
fn pair_with_transform(
    quad: &Quadrature,
    g: &TestFunction,
    w: &TestFunction,
    tol: f64,
) -> Result<Complex64> {
    let l1_g = l1_upper(quad, g, tol)?;
    let l1_w = l1_upper(quad, w, tol)?;
    let inner_tol = (tol / (2.0 * l1_w.max(f64::MIN_POSITIVE))).min(tol);
    let envelope = w.envelope().scaled(l1_g + inner_tol);
    let r = quad.integrate_fn_auto(g.dim(), &envelope, tol / 2.0, None, |xi| {
        let wv = w.eval(xi);
        if wv.norm() * (l1_g + inner_tol) < NEGLIGIBLE {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let freq = RealPoint::from_slice(xi)?;
        Ok(fourier(quad, g, &freq, inner_tol)? * wv)
    })?;
    Ok(r.value)
}

/// Evaluates both sides of the Multiplication Formula independently.
pub fn multiplication_formula_check(
    quad: &Quadrature,
    f: &TestFunction,
    psi: &TestFunction,
    tol: f64,
) -> Result<MultiplicationCheck> {
    check_dims(f.dim(), psi.dim())?;
    f.require_integrable()?;
    psi.require_integrable()?;
    require_certified_decay(f)?;
    require_certified_decay(psi)?;
    Ok(MultiplicationCheck {
        lhs: pair_with_transform(quad, f, psi, tol)?,
        rhs: pair_with_transform(quad, psi, f, tol)?,
    })
}

/// Fourier transform at `eta` of `u -> h(u) exp(2 pi i a.u)`.
pub fn modulate(
    quad: &Quadrature,
    h: &TestFunction,
    a: &RealPoint,
    eta: &RealPoint,
    tol: f64,
) -> Result<Complex64> {
    fourier(quad, &h.modulated(a)?, eta, tol)
}
