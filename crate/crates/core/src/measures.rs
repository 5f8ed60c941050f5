//! Bounded measures made of finitely many weighted point masses plus an
//! optional integrable density: `lambda(h) = sum_j c_j h(a_j) + int f h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{character_fn, Preset};
use crate::kernels::{gauss_real, weierstrass_real, KernelScale};
use crate::numerics::{check_dims, real_dot, RealPoint};
use crate::quadrature::{DecayEnvelope, GridSpec, Quadrature, TestFunction};
use crate::transforms::{l1_norm, mollify, oscillation_spacing, sup_of};

const NEGLIGIBLE: f64 = 1e-20;

/// Tolerance used to compute the total-variation bound of a density.
const BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: RealPoint,
    pub weight: Complex64,
}

impl Atom {
    pub fn new(location: RealPoint, weight: Complex64) -> Self {
        Self { location, weight }
    }
}

/// `sum_j c_j delta_{a_j} + f dx`.
#[derive(Debug, Clone)]
pub struct BoundedMeasure {
    atoms: Vec<Atom>,
    density: Option<TestFunction>,
    dim: usize,
    bound: f64,
}

impl BoundedMeasure {
    /// The bound `L = sum |c_j| + int |f|` is computed here; the density's
    /// part is a certified upper bound from quadrature.
    pub fn new(dim: usize, atoms: Vec<Atom>, density: Option<TestFunction>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for atom in &atoms {
            check_dims(dim, atom.location.dim())?;
            if !(atom.weight.re.is_finite() && atom.weight.im.is_finite()) {
                return Err(Error::invalid("atoms", "weights must be finite"));
            }
        }
        let mut bound: f64 = atoms.iter().map(|a| a.weight.norm()).sum();
        if let Some(f) = &density {
            check_dims(dim, f.dim())?;
            f.require_integrable()?;
            let l1 = l1_norm(&Quadrature::default(), f, BOUND_TOL)?;
            bound += l1.value.re + l1.error_bound();
        }
        Ok(Self {
            atoms,
            density,
            dim,
            bound,
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), None)
    }

    /// Unit point mass at `a`.
    pub fn dirac(a: RealPoint) -> Self {
        let dim = a.dim();
        Self {
            atoms: vec![Atom::new(a, Complex64::new(1.0, 0.0))],
            density: None,
            dim,
            bound: 1.0,
        }
    }

    /// `lambda_f(h) = int f h`.
    pub fn from_density(f: TestFunction) -> Result<Self> {
        Self::new(f.dim(), Vec::new(), Some(f))
    }

    /// Parses the JSON literal
    /// `{"dim": n, "atoms": [{"at": [..], "re": r, "im": i}], "density": "gauss:0.1"}`.
    pub fn from_literal(json: &str) -> Result<Self> {
        let lit: MeasureLiteral =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        lit.build()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&TestFunction> {
        self.density.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L` in `|lambda(h)| <= L sup |h|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    fn atomic_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum()
    }

    fn max_atom_norm(&self) -> f64 {
        self.atoms.iter().map(|a| a.location.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomLiteral {
    pub at: Vec<f64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// JSON form of a measure; the density is a function preset string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureLiteral {
    pub dim: usize,
    #[serde(default)]
    pub atoms: Vec<AtomLiteral>,
    #[serde(default)]
    pub density: Option<String>,
}

impl MeasureLiteral {
    pub fn build(&self) -> Result<BoundedMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom::new(RealPoint::new(a.at.clone())?, Complex64::new(a.re, a.im))))
            .collect::<Result<Vec<_>>>()?;
        let density = match &self.density {
            Some(text) => Some(text.parse::<Preset>()?.build(self.dim)?),
            None => None,
        };
        BoundedMeasure::new(self.dim, atoms, density)
    }
}

fn apply_with_spacing(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    h: &TestFunction,
    tol: f64,
    max_spacing: Option<f64>,
) -> Result<Complex64> {
    check_dims(lambda.dim, h.dim())?;
    let sup_h = h.require_bounded()?;
    let mut total: Complex64 = lambda
        .atoms
        .iter()
        .map(|a| a.weight * h.eval(a.location.coords()))
        .sum();
    if let Some(f) = &lambda.density {
        let envelope = f.envelope().scaled(sup_h);
        let r = quad.integrate_fn_auto(lambda.dim, &envelope, tol, max_spacing, |x| {
            Ok(f.eval(x) * h.eval(x))
        })?;
        total += r.value;
    }
    Ok(total)
}

/// `lambda(h)` for bounded continuous `h`.
pub fn apply(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    h: &TestFunction,
    tol: f64,
) -> Result<Complex64> {
    apply_with_spacing(quad, lambda, h, tol, None)
}

/// `lambda^(xi) = lambda(e_xi)`, `e_xi(x) = exp(-2 pi i x.xi)`.
pub fn measure_fourier(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    xi: &RealPoint,
    tol: f64,
) -> Result<Complex64> {
    check_dims(lambda.dim, xi.dim())?;
    apply_with_spacing(quad, lambda, &character_fn(xi), tol, oscillation_spacing(xi.norm()))
}

/// `(W_alpha * lambda)(y) = lambda(W_alpha(y - .))`.
pub fn mollify_measure(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    alpha: f64,
    y: &RealPoint,
    tol: f64,
) -> Result<Complex64> {
    check_dims(lambda.dim, y.dim())?;
    let scale = KernelScale::new(alpha, lambda.dim)?;
    let mut d = vec![0.0; lambda.dim];
    let mut total = Complex64::new(0.0, 0.0);
    for atom in &lambda.atoms {
        for ((dj, yj), aj) in d.iter_mut().zip(y.coords()).zip(atom.location.coords()) {
            *dj = yj - aj;
        }
        total += atom.weight * weierstrass_real(scale, &d);
    }
    if let Some(f) = &lambda.density {
        total += mollify(quad, f, alpha, y, tol)?;
    }
    Ok(total)
}

/// `int lambda^(xi) exp(2 pi i x.xi) G_alpha(xi) dxi` from sampled `lambda^`.
pub fn measure_gauss_inversion(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    x: &RealPoint,
    alpha: f64,
    tol: f64,
) -> Result<Complex64> {
    check_dims(lambda.dim, x.dim())?;
    let scale = KernelScale::new(alpha, lambda.dim)?;
    if lambda.bound == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inner_tol = (tol / (2.0 * scale.weierstrass_peak())).min(tol);
    let envelope = DecayEnvelope::gaussian(scale.gauss_rate(), lambda.bound + inner_tol);
    let xc = x.coords();
    let r = quad.integrate_fn_auto(
        lambda.dim,
        &envelope,
        tol / 2.0,
        oscillation_spacing(x.norm() + lambda.max_atom_norm()),
        |xi| {
            let g = gauss_real(scale, xi);
            if g * (lambda.bound + inner_tol) < NEGLIGIBLE {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let freq = RealPoint::from_slice(xi)?;
            let lh = measure_fourier(quad, lambda, &freq, inner_tol)?;
            Ok(lh * Complex64::from_polar(g, 2.0 * std::f64::consts::PI * real_dot(xc, xi)))
        },
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakPoint {
    pub alpha: f64,
    /// `int (W_alpha * lambda) h`
    pub value: Complex64,
    /// `lambda(h)`
    pub target: Complex64,
    pub gap: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTrace {
    pub points: Vec<WeakPoint>,
}

impl WeakTrace {
    /// Gaps never grow by more than `slack` along the ladder.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.points.windows(2).all(|w| w[1].gap <= w[0].gap + slack)
    }
}

/// `int (W_alpha * lambda)(x) h(x) dx` along a ladder of scales, next to
/// its limit `lambda(h)`.
///
/// `h` must be bounded with a Gaussian or compact envelope so the outer
/// integral has a certified tail.
pub fn weak_convergence_trace(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    h: &TestFunction,
    alphas: &[f64],
    grid: &GridSpec,
    tol: f64,
) -> Result<WeakTrace> {
    check_dims(lambda.dim, h.dim())?;
    check_dims(lambda.dim, grid.dim())?;
    let sup_h = h.require_bounded()?;
    match h.envelope() {
        DecayEnvelope::Gaussian { .. } | DecayEnvelope::CompactSupport { .. } => {}
        other => {
            return Err(Error::EnvelopeInsufficient(format!(
                "test function needs a Gaussian or compact envelope, has {other:?}"
            )))
        }
    }
    let target = apply(quad, lambda, h, tol)?;
    let volume = (2.0 * grid.radius()).powi(grid.dim() as i32);
    let inner_tol = (tol / (2.0 * sup_h.max(f64::MIN_POSITIVE) * volume)).min(tol);
    let density_l1 = lambda.bound - lambda.atomic_mass();
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let scale = KernelScale::new(alpha, lambda.dim)?;
        let peak = scale.weierstrass_peak();
        let density_sup = match &lambda.density {
            Some(f) => sup_of(f).unwrap_or(density_l1 * peak).min(density_l1 * peak),
            None => 0.0,
        };
        let smoothed_sup = lambda.atomic_mass() * peak + density_sup;
        let envelope = h.envelope().scaled(smoothed_sup);
        let r = quad.integrate_fn(&envelope, grid, |x| {
            let hv = h.eval(x);
            if hv.norm() * smoothed_sup < NEGLIGIBLE {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let y = RealPoint::from_slice(x)?;
            Ok(mollify_measure(quad, lambda, alpha, &y, inner_tol)? * hv)
        })?;
        points.push(WeakPoint {
            alpha,
            value: r.value,
            target,
            gap: (r.value - target).norm(),
            error: r.error_bound() + inner_tol * sup_h * volume,
        });
    }
    Ok(WeakTrace { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityEntry {
    pub index: usize,
    pub value: Complex64,
    /// `|lambda(h_j) - lambda(h)|`
    pub gap: f64,
    /// Sampled `sup |h_j - h|` on the compact cube.
    pub compact_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub limit_value: Complex64,
    pub entries: Vec<ContinuityEntry>,
}

impl ContinuityReport {
    pub fn gaps_nonincreasing(&self, slack: f64) -> bool {
        self.entries.windows(2).all(|w| w[1].gap <= w[0].gap + slack)
    }
}

fn compact_samples(dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let per_axis: usize = match dim {
        1 => 41,
        2 => 21,
        _ => 11,
    };
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// `lambda(h_j)` against `lambda(h)` for a uniformly bounded sequence.
///
/// Each `h_j` must declare a sup bound no larger than `uniform_bound` and
/// respect it on the sampled cube `[-radius, radius]^n`.
pub fn continuity_check(
    quad: &Quadrature,
    lambda: &BoundedMeasure,
    h_sequence: &[TestFunction],
    h_limit: &TestFunction,
    uniform_bound: f64,
    radius: f64,
    tol: f64,
) -> Result<ContinuityReport> {
    let samples = compact_samples(lambda.dim, radius);
    let limit_value = apply(quad, lambda, h_limit, tol)?;
    let mut entries = Vec::with_capacity(h_sequence.len());
    for (index, h) in h_sequence.iter().enumerate() {
        check_dims(lambda.dim, h.dim())?;
        let declared = h.require_bounded()?;
        let violated = declared > uniform_bound * (1.0 + 1e-12)
            || samples.iter().any(|x| h.eval(x).norm() > uniform_bound * (1.0 + 1e-12));
        if violated {
            return Err(Error::UniformBoundViolated {
                index,
                bound: uniform_bound,
            });
        }
        let compact_distance = samples
            .iter()
            .map(|x| (h.eval(x) - h_limit.eval(x)).norm())
            .fold(0.0, f64::max);
        let value = apply(quad, lambda, h, tol)?;
        entries.push(ContinuityEntry {
            index,
            value,
            gap: (value - limit_value).norm(),
            compact_distance,
        });
    }
    Ok(ContinuityReport {
        limit_value,
        entries,
    })
}
