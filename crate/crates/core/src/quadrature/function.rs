use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::envelope::DecayEnvelope;
use crate::error::{Error, Result};
use crate::numerics::{check_dims, real_dot, real_norm, RealPoint};

type EvalFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// Number of random points at which a declared envelope and sup bound are
/// spot-checked when a function is constructed.
pub const ENVELOPE_SAMPLES: usize = 1000;

const SAMPLE_SCALES: [f64; 4] = [0.25, 1.0, 4.0, 16.0];

/// A continuous map `R^n -> C` together with its declared decay envelope
/// and, when bounded, a bound on its modulus.
#[derive(Clone)]
pub struct TestFunction {
    eval: Arc<EvalFn>,
    dim: usize,
    envelope: DecayEnvelope,
    sup_bound: Option<f64>,
    label: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("envelope", &self.envelope)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl TestFunction {
    /// Builds a function and spot-checks the envelope and sup bound at
    /// [`ENVELOPE_SAMPLES`] seeded random points.
    pub fn new<F>(
        label: impl Into<String>,
        dim: usize,
        envelope: DecayEnvelope,
        sup_bound: Option<f64>,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        envelope.validate(dim)?;
        if let Some(m) = sup_bound {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::invalid("sup_bound", format!("must be finite and nonnegative, got {m}")));
            }
        }
        let f = Self::derived(label, dim, envelope, sup_bound, eval);
        f.spot_check()?;
        Ok(f)
    }

    /// Constructor for functions whose envelope follows from an already
    /// checked one; skips the sampling.
    pub(crate) fn derived<F>(
        label: impl Into<String>,
        dim: usize,
        envelope: DecayEnvelope,
        sup_bound: Option<f64>,
        eval: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            dim,
            envelope,
            sup_bound,
            label: label.into(),
        }
    }

    fn spot_check(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a09_e667 ^ self.dim as u64);
        let mut x = vec![0.0; self.dim];
        let support = match self.envelope {
            DecayEnvelope::CompactSupport { radius } => radius,
            _ => 1.0,
        };
        for k in 0..ENVELOPE_SAMPLES {
            let s = SAMPLE_SCALES[k % SAMPLE_SCALES.len()] * support.max(1.0);
            for c in x.iter_mut() {
                *c = rng.gen_range(-s..=s);
            }
            let value = self.eval(&x).norm();
            if !value.is_finite() {
                return Err(Error::NonFinite(x));
            }
            let r = real_norm(&x);
            let mut bound = self.envelope.bound_at(r).unwrap_or(f64::INFINITY);
            if let Some(m) = self.sup_bound {
                bound = bound.min(m);
            }
            if value > bound * (1.0 + 1e-9) + 1e-290 {
                return Err(Error::EnvelopeViolation { point: x, value, bound });
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn eval_at(&self, x: &RealPoint) -> Result<Complex64> {
        check_dims(self.dim, x.dim())?;
        Ok(self.eval(x.coords()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn envelope(&self) -> DecayEnvelope {
        self.envelope
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn is_bounded(&self) -> bool {
        self.sup_bound.is_some()
    }

    pub fn is_integrable(&self) -> bool {
        self.envelope.is_integrable()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn require_integrable(&self) -> Result<()> {
        if self.is_integrable() {
            Ok(())
        } else {
            Err(Error::NotIntegrable(format!("`{}` has a bounded-only envelope", self.label)))
        }
    }

    pub(crate) fn require_bounded(&self) -> Result<f64> {
        self.sup_bound
            .ok_or_else(|| Error::Unbounded(format!("`{}` declares no sup bound", self.label)))
    }

    /// `u -> g(u) exp(2 pi i a.u)`.
    pub fn modulated(&self, a: &RealPoint) -> Result<TestFunction> {
        check_dims(self.dim, a.dim())?;
        let g = self.clone();
        let a = a.coords().to_vec();
        Ok(Self::derived(
            format!("{} * e^(2 pi i a.u)", self.label),
            self.dim,
            self.envelope,
            self.sup_bound,
            move |u| g.eval(u) * Complex64::from_polar(1.0, 2.0 * PI * real_dot(&a, u)),
        ))
    }

    /// `x -> g(x - a)`.
    pub fn translated(&self, a: &RealPoint) -> Result<TestFunction> {
        check_dims(self.dim, a.dim())?;
        let g = self.clone();
        let a = a.coords().to_vec();
        Ok(Self::derived(
            format!("{}(. - a)", self.label),
            self.dim,
            self.envelope.translated(a.iter().map(|v| v * v).sum::<f64>().sqrt()),
            self.sup_bound,
            move |x| {
                let shifted: Vec<f64> = x.iter().zip(&a).map(|(xi, ai)| xi - ai).collect();
                g.eval(&shifted)
            },
        ))
    }

    /// `x -> c g(x)`.
    pub fn scaled(&self, c: Complex64) -> TestFunction {
        let g = self.clone();
        let k = c.norm();
        Self::derived(
            format!("({c}) {}", self.label),
            self.dim,
            self.envelope.scaled(k),
            self.sup_bound.map(|m| m * k),
            move |x| c * g.eval(x),
        )
    }
}
