//! Certified quadrature for improper integrals over `R^n`.
//!
//! An integral `int_{R^n} g` is truncated to the cube `[-R, R]^n` and the
//! cube is integrated with the composite Simpson rule along each axis,
//! tensored across axes. The result carries two error terms:
//!
//! * `tail_bound`, a closed-form bound on the omitted mass computed from the
//!   function's [`DecayEnvelope`], never from samples;
//! * `disc_error_est = |S(N) - S(N/2)|`, the change from halving the number of
//!   panels. The coarse sum reuses the even-indexed nodes, so it costs nothing
//!   extra.
//!
//! Nodes are visited in a fixed lexicographic order and summed axis by axis,
//! so a fixed grid always produces bit-identical results.

mod envelope;
mod function;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use envelope::DecayEnvelope;
pub use function::{TestFunction, ENVELOPE_SAMPLES};

use crate::error::{Error, Result};

/// Environment variable overriding [`Quadrature::node_budget`].
pub const BUDGET_ENV: &str = "HEATLINE_BUDGET";

pub const DEFAULT_NODE_BUDGET: u64 = 1 << 24;
pub const DEFAULT_RADII: [f64; 5] = [4.0, 6.0, 8.0, 12.0, 16.0];
pub const DEFAULT_POINTS: [usize; 7] = [128, 256, 512, 1024, 2048, 4096, 8192];
pub const DEFAULT_TOL: f64 = 1e-8;

/// Cube `[-radius, radius]^dim` with `points_per_axis` Simpson panels per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    radius: f64,
    points_per_axis: usize,
    dim: usize,
}

impl GridSpec {
    /// `points_per_axis` must be a positive multiple of 4 so that both the
    /// fine and the half-resolution rule are Simpson rules.
    pub fn new(radius: f64, points_per_axis: usize, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
        }
        if points_per_axis == 0 || !points_per_axis.is_multiple_of(4) {
            return Err(Error::invalid(
                "points_per_axis",
                format!("must be a positive multiple of 4, got {points_per_axis}"),
            ));
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            radius,
            points_per_axis,
            dim,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / self.points_per_axis as f64
    }

    /// `N^n`, the quantity compared against the node budget.
    pub fn node_count(&self) -> u128 {
        (self.points_per_axis as u128).saturating_pow(self.dim as u32)
    }

    /// Coordinates of the `N + 1` nodes along one axis.
    pub fn axis_nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.points_per_axis)
            .map(|i| -self.radius + i as f64 * h)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub disc_error_est: f64,
    pub tail_bound: f64,
    pub grid: GridSpec,
}

impl QuadratureResult {
    pub fn error_bound(&self) -> f64 {
        self.disc_error_est + self.tail_bound
    }
}

/// Quadrature configuration: node budget, the `(R, N)` ladder searched by
/// [`Quadrature::auto_grid`] and the default tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub node_budget: u64,
    pub radii: Vec<f64>,
    pub points: Vec<usize>,
    pub default_tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            radii: DEFAULT_RADII.to_vec(),
            points: DEFAULT_POINTS.to_vec(),
            default_tol: DEFAULT_TOL,
        }
    }
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Fine and half-resolution weights on the same `N + 1` nodes; the coarse
/// rule puts zero weight on odd nodes.
fn paired_weights(grid: &GridSpec) -> (Vec<f64>, Vec<f64>) {
    let n = grid.points_per_axis;
    let h = grid.spacing();
    let fine = simpson_weights(n, h);
    let half = simpson_weights(n / 2, 2.0 * h);
    let coarse = (0..=n)
        .map(|i| if i % 2 == 0 { half[i / 2] } else { 0.0 })
        .collect();
    (fine, coarse)
}

struct Sweep<'a, F> {
    nodes: &'a [f64],
    fine: &'a [f64],
    coarse: &'a [f64],
    point: Vec<f64>,
    f: F,
}

impl<F> Sweep<'_, F>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    fn axis(&mut self, axis: usize) -> Result<(Complex64, Complex64)> {
        let last = axis + 1 == self.point.len();
        let mut fine = Complex64::new(0.0, 0.0);
        let mut coarse = Complex64::new(0.0, 0.0);
        for i in 0..self.nodes.len() {
            self.point[axis] = self.nodes[i];
            let (sf, sc) = if last {
                let v = (self.f)(&self.point)?;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite(self.point.clone()));
                }
                (v, v)
            } else {
                self.axis(axis + 1)?
            };
            fine += sf * self.fine[i];
            coarse += sc * self.coarse[i];
        }
        Ok((fine, coarse))
    }
}

impl Quadrature {
    /// Default configuration with the node budget taken from
    /// `HEATLINE_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut q = Self::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            q.node_budget = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid("HEATLINE_BUDGET", format!("not an integer: {v}")))?;
        }
        Ok(q)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    fn check_budget(&self, grid: &GridSpec) -> Result<()> {
        let nodes = grid.node_count();
        if nodes > self.node_budget as u128 {
            return Err(Error::BudgetExceeded {
                nodes,
                budget: self.node_budget as u128,
            });
        }
        Ok(())
    }

    /// Integrates `g` over `R^n` on a fixed grid.
    pub fn integrate(&self, g: &TestFunction, grid: &GridSpec) -> Result<QuadratureResult> {
        g.require_integrable()?;
        crate::numerics::check_dims(g.dim(), grid.dim())?;
        self.integrate_fn(&g.envelope(), grid, |x| Ok(g.eval(x)))
    }

    /// Smallest `(R, N)` on the ladder meeting `tol`; see [`Self::integrate_auto`].
    pub fn auto_grid(&self, g: &TestFunction, target_tol: f64) -> Result<GridSpec> {
        Ok(self.integrate_auto(g, target_tol)?.grid)
    }

    /// Walks the ladder (radii outermost) and returns the first result with
    /// `tail_bound <= tol/2` and `disc_error_est <= tol/2`.
    pub fn integrate_auto(&self, g: &TestFunction, tol: f64) -> Result<QuadratureResult> {
        g.require_integrable()?;
        self.integrate_fn_auto(g.dim(), &g.envelope(), tol, None, |x| Ok(g.eval(x)))
    }

    pub(crate) fn integrate_fn<F>(
        &self,
        envelope: &DecayEnvelope,
        grid: &GridSpec,
        f: F,
    ) -> Result<QuadratureResult>
    where
        F: FnMut(&[f64]) -> Result<Complex64>,
    {
        if !envelope.is_integrable() {
            return Err(Error::NotIntegrable("bounded-only envelope".into()));
        }
        self.check_budget(grid)?;
        let tail_bound = envelope.tail_bound(grid.radius, grid.dim);
        if !tail_bound.is_finite() {
            return Err(Error::EnvelopeInsufficient(format!(
                "no finite tail bound at radius {}",
                grid.radius
            )));
        }
        let nodes = grid.axis_nodes();
        let (fine, coarse) = paired_weights(grid);
        let mut sweep = Sweep {
            nodes: &nodes,
            fine: &fine,
            coarse: &coarse,
            point: vec![0.0; grid.dim],
            f,
        };
        let (value, half) = sweep.axis(0)?;
        Ok(QuadratureResult {
            value,
            disc_error_est: (value - half).norm(),
            tail_bound,
            grid: *grid,
        })
    }

    /// Ladder search shared by every transform. `max_spacing` caps the node
    /// spacing for oscillatory integrands.
    pub(crate) fn integrate_fn_auto<F>(
        &self,
        dim: usize,
        envelope: &DecayEnvelope,
        tol: f64,
        max_spacing: Option<f64>,
        mut f: F,
    ) -> Result<QuadratureResult>
    where
        F: FnMut(&[f64]) -> Result<Complex64>,
    {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
        }
        if !envelope.is_integrable() {
            return Err(Error::NotIntegrable("bounded-only envelope".into()));
        }
        let mut best = f64::INFINITY;
        for &radius in &self.radii {
            if envelope.tail_bound(radius, dim) > tol / 2.0 {
                continue;
            }
            for &n in &self.points {
                let grid = GridSpec::new(radius, n, dim)?;
                if grid.node_count() > self.node_budget as u128 {
                    break;
                }
                if max_spacing.is_some_and(|h| grid.spacing() > h) {
                    continue;
                }
                let r = self.integrate_fn(envelope, &grid, &mut f)?;
                if r.disc_error_est <= tol / 2.0 {
                    return Ok(r);
                }
                best = best.min(r.disc_error_est);
            }
            // a wider cube cannot resolve what this one failed to
            return Err(Error::ToleranceUnreachable { tol, best });
        }
        Err(Error::ToleranceUnreachable { tol, best })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian_pi(dim: usize) -> TestFunction {
        TestFunction::new("exp(-pi |x|^2)", dim, DecayEnvelope::gaussian(PI, 1.0), Some(1.0), |x| {
            Complex64::new((-PI * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(6.0, 256, 1).is_ok());
        assert!(GridSpec::new(6.0, 130, 1).is_err());
        assert!(GridSpec::new(0.0, 128, 1).is_err());
        assert!(GridSpec::new(6.0, 128, 0).is_err());
        let g = GridSpec::new(6.0, 256, 1).unwrap();
        assert_eq!(g.spacing(), 12.0 / 256.0);
        assert_eq!(g.axis_nodes().len(), 257);
        assert_eq!(g.axis_nodes()[128], 0.0);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let q = Quadrature::default();
        let env = DecayEnvelope::compact(1.0);
        let grid = GridSpec::new(1.0, 8, 1).unwrap();
        let r = q
            .integrate_fn(&env, &grid, |x| Ok(Complex64::new(x[0].powi(3) + x[0] * x[0], 0.0)))
            .unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-15);
        assert!(r.disc_error_est < 1e-15);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn gaussian_normalization_one_dim() {
        let q = Quadrature::default();
        let grid = GridSpec::new(6.0, 256, 1).unwrap();
        let r = q.integrate(&gaussian_pi(1), &grid).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10);
        assert!(r.value.im == 0.0);
        assert!((r.value.re - 1.0).abs() <= r.error_bound() + 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let q = Quadrature::default().with_budget(1000);
        let grid = GridSpec::new(6.0, 128, 2).unwrap();
        assert!(matches!(
            q.integrate(&gaussian_pi(2), &grid),
            Err(Error::BudgetExceeded { nodes: 16384, budget: 1000 })
        ));
    }

    #[test]
    fn bounded_only_is_refused() {
        let one = TestFunction::new("1", 1, DecayEnvelope::bounded(1.0), Some(1.0), |_| {
            Complex64::new(1.0, 0.0)
        })
        .unwrap();
        let grid = GridSpec::new(6.0, 128, 1).unwrap();
        let q = Quadrature::default();
        assert!(matches!(q.integrate(&one, &grid), Err(Error::NotIntegrable(_))));
        assert!(matches!(q.auto_grid(&one, 1e-8), Err(Error::NotIntegrable(_))));
    }

    #[test]
    fn auto_grid_examples() {
        let q = Quadrature::default();
        let grid = q.auto_grid(&gaussian_pi(1), 1e-8).unwrap();
        assert_eq!(grid.radius(), 4.0);
        assert_eq!(grid.points_per_axis(), 128);
        assert!(DecayEnvelope::gaussian(PI, 1.0).tail_bound(6.0, 1) < 1e-48);

        let bump = TestFunction::new("bump", 1, DecayEnvelope::compact(1.0), Some(1.0), |x| {
            let t = x[0] * x[0];
            Complex64::new(if t < 1.0 { (1.0 - 1.0 / (1.0 - t)).exp() } else { 0.0 }, 0.0)
        })
        .unwrap();
        let r = q.integrate_auto(&bump, 1e-6).unwrap();
        assert_eq!(r.grid.radius(), 4.0);
        assert_eq!(r.tail_bound, 0.0);

        let slow = TestFunction::new("(1+|x|)^-1.5", 1, DecayEnvelope::polynomial(1.5, 1.0), Some(1.0), |x| {
            Complex64::new((1.0 + x[0].abs()).powf(-1.5), 0.0)
        })
        .unwrap();
        assert!(matches!(
            q.auto_grid(&slow, 1e-8),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn compact_support_wider_than_cube() {
        let q = Quadrature::default();
        let wide = TestFunction::new("box", 1, DecayEnvelope::compact(20.0), Some(1.0), |x| {
            Complex64::new(if x[0].abs() < 20.0 { (1.0 - (x[0] / 20.0).powi(2)).powi(3) } else { 0.0 }, 0.0)
        })
        .unwrap();
        let grid = GridSpec::new(4.0, 128, 1).unwrap();
        assert!(matches!(q.integrate(&wide, &grid), Err(Error::EnvelopeInsufficient(_))));
        assert!(matches!(q.auto_grid(&wide, 1e-6), Err(Error::ToleranceUnreachable { .. })));
    }

    #[test]
    fn fixed_grid_is_bit_reproducible() {
        let q = Quadrature::default();
        let grid = GridSpec::new(4.0, 128, 2).unwrap();
        let a = q.integrate(&gaussian_pi(2), &grid).unwrap();
        let b = q.integrate(&gaussian_pi(2), &grid).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn budget_env_override() {
        // only this test touches the variable
        std::env::set_var(BUDGET_ENV, "4096");
        let q = Quadrature::from_env().unwrap();
        std::env::remove_var(BUDGET_ENV);
        assert_eq!(q.node_budget, 4096);
    }
}
