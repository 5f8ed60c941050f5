use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use super::{
    ray, Cell, Check, Experiment, ExperimentSpec, HarnessError, Metadata, PointParam, ResultTable,
};
use crate::functions::{gauss_fn, weierstrass_fn, Preset};
use crate::kernels::{gauss_real, weierstrass_real, KernelScale};
use crate::measures::{
    measure_fourier, measure_gauss_inversion, mollify_measure, weak_convergence_trace,
    AtomLiteral, BoundedMeasure, MeasureLiteral,
};
use crate::numerics::RealPoint;
use crate::quadrature::{DecayEnvelope, GridSpec, Quadrature, DEFAULT_TOL};
use crate::transforms::{
    fourier, gauss_inversion, geometric_ladder, modulate, mollify, mollify_l1_check,
    multiplication_formula_check, sup_of,
};

const MONOTONE_SLACK: f64 = 1e-9;
const WEAK_MONOTONE_SLACK: f64 = 1e-7;
const CONTRACTION_SLACK: f64 = 1e-6;
const INVERSION_FINAL_LIMIT: f64 = 1e-3;

pub(super) fn dispatch(quad: &Quadrature, spec: &ExperimentSpec) -> Result<ResultTable, HarnessError> {
    let mut ctx = Ctx::new(quad, spec);
    match spec.name {
        Experiment::VerifyKernels => verify_kernels(&mut ctx),
        Experiment::Integrate => integrate(&mut ctx),
        Experiment::Fourier => fourier_table(&mut ctx),
        Experiment::Invert => invert(&mut ctx),
        Experiment::Mollify => mollify_table(&mut ctx),
        Experiment::Multiplication => multiplication(&mut ctx),
        Experiment::Modulate => modulate_table(&mut ctx),
        Experiment::MeasureFt => measure_ft(&mut ctx),
        Experiment::MeasureInvert => measure_invert(&mut ctx),
        Experiment::WeakConvergence => weak_convergence(&mut ctx),
    }?;
    Ok(ctx.finish())
}

struct Ctx<'a> {
    quad: &'a Quadrature,
    spec: &'a ExperimentSpec,
    dim: usize,
    tol: f64,
    config: BTreeMap<String, Value>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    checks: Vec<Check>,
}

impl<'a> Ctx<'a> {
    fn new(quad: &'a Quadrature, spec: &'a ExperimentSpec) -> Self {
        let tol = spec.params.tol.unwrap_or(DEFAULT_TOL);
        let mut config = BTreeMap::new();
        config.insert("tol".to_string(), Value::from(tol));
        config.insert("node_budget".to_string(), Value::from(quad.node_budget));
        Self {
            quad,
            spec,
            dim: spec.dim,
            tol,
            config,
            columns: Vec::new(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn fail(&self, e: crate::Error) -> HarnessError {
        HarnessError::Run {
            experiment: self.spec.name,
            source: e,
        }
    }

    fn echo(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.config.insert(key.to_string(), v);
    }

    fn alphas(&mut self, default: Vec<f64>) -> Vec<f64> {
        let a = self.spec.params.alphas.clone().unwrap_or(default);
        self.echo("alphas", &a);
        a
    }

    fn threshold(&mut self, default: f64) -> f64 {
        let t = self.spec.params.threshold.unwrap_or(default);
        self.echo("threshold", t);
        t
    }

    fn points(
        &mut self,
        key: &str,
        given: Option<&Vec<PointParam>>,
        default: &[f64],
    ) -> Result<Vec<RealPoint>, HarnessError> {
        let pts = match given {
            Some(list) => list
                .iter()
                .map(|p| p.resolve(self.dim))
                .collect::<Result<Vec<_>, _>>()?,
            None => default.iter().map(|&t| ray(t, self.dim)).collect(),
        };
        let coords: Vec<&[f64]> = pts.iter().map(|p| p.coords()).collect();
        self.echo(key, coords);
        Ok(pts)
    }

    fn presets(
        &mut self,
        key: &str,
        given: Option<&Vec<String>>,
        default: &[Preset],
    ) -> Result<Vec<Preset>, HarnessError> {
        let list = match given {
            Some(texts) => texts
                .iter()
                .map(|t| t.parse::<Preset>().map_err(|e| HarnessError::Config(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => default.to_vec(),
        };
        let names: Vec<String> = list.iter().map(Preset::to_string).collect();
        self.echo(key, names);
        Ok(list)
    }

    fn preset(&mut self, key: &str, given: Option<&String>, default: Preset) -> Result<Preset, HarnessError> {
        let v = given.map(|s| vec![s.clone()]);
        Ok(self.presets(key, v.as_ref(), &[default])?[0])
    }

    fn grid(&mut self, default_radius: f64, default_points: usize) -> Result<GridSpec, HarnessError> {
        let radius = self.spec.params.radius.unwrap_or(default_radius);
        let points = self.spec.params.points.unwrap_or(default_points);
        self.echo("radius", radius);
        self.echo("points", points);
        GridSpec::new(radius, points, self.dim).map_err(|e| HarnessError::Config(e.to_string()))
    }

    fn measure(&mut self, default: MeasureLiteral) -> Result<MeasureLiteral, HarnessError> {
        let lit = match &self.spec.params.measure {
            Some(text) => serde_json::from_str::<MeasureLiteral>(text)
                .map_err(|e| HarnessError::Config(format!("measure literal: {e}")))?,
            None => default,
        };
        if lit.dim != self.dim {
            return Err(HarnessError::Config(format!(
                "measure has dim {}, experiment has dim {}",
                lit.dim, self.dim
            )));
        }
        self.echo("measure", &lit);
        Ok(lit)
    }

    fn columns(&mut self, cols: Vec<String>) {
        self.columns = cols;
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn check_max(&mut self, name: &str, values: impl IntoIterator<Item = f64>, limit: f64) {
        let mut any = false;
        let mut worst = f64::NEG_INFINITY;
        for v in values {
            any = true;
            if v.is_nan() || v > worst {
                worst = v;
            }
            if worst.is_nan() {
                break;
            }
        }
        if any {
            self.checks.push(Check::at_most(name, worst, limit));
        }
    }

    fn finish(self) -> ResultTable {
        ResultTable {
            experiment: self.spec.name.name().to_string(),
            columns: self.columns,
            rows: self.rows,
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                dim: self.dim,
                config: self.config,
            },
            checks: self.checks,
            passed: false,
            wall_time: None,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn coord_cols(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}_{i}")).collect()
}

fn coord_cells(p: &RealPoint) -> impl Iterator<Item = Cell> + '_ {
    p.coords().iter().map(|&c| Cell::num(c))
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::num(z.re), Cell::num(z.im)]
}

/// `int W_alpha(x - y) G_b(y) dy`.
fn gauss_smoothed(b: f64, alpha: f64, x: &[f64]) -> f64 {
    let s = 1.0 + 16.0 * PI * PI * alpha * b;
    let dim = x.len();
    let scale = KernelScale::new(b / s, dim).expect("positive scale");
    s.powf(-(dim as f64) / 2.0) * gauss_real(scale, x)
}

fn verify_kernels(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let alphas = ctx.alphas(if dim == 1 { vec![0.05, 0.1, 0.5] } else { vec![0.1] });
    let xis = ctx.points("xi", ctx.spec.params.xi.as_ref(), &linspace(-2.0, 2.0, 41))?;
    let threshold = ctx.threshold(if dim == 1 { 1e-6 } else { 1e-5 });
    let mut c = vec!["alpha".to_string()];
    c.extend(coord_cols("xi", dim));
    c.extend(
        [
            "fourier_gauss_re",
            "fourier_gauss_im",
            "weierstrass",
            "fourier_weierstrass_re",
            "fourier_weierstrass_im",
            "gauss",
            "residual",
        ]
        .map(String::from),
    );
    ctx.columns(c);
    let mut residuals = Vec::new();
    for &alpha in &alphas {
        let s = KernelScale::new(alpha, dim).map_err(|e| ctx.fail(e))?;
        let (g, w) = (gauss_fn(s), weierstrass_fn(s));
        for xi in &xis {
            let fg = fourier(ctx.quad, &g, xi, ctx.tol).map_err(|e| ctx.fail(e))?;
            let fw = fourier(ctx.quad, &w, xi, ctx.tol).map_err(|e| ctx.fail(e))?;
            let wv = weierstrass_real(s, xi.coords());
            let gv = gauss_real(s, xi.coords());
            let r = (fg - wv).norm().max((fw - gv).norm());
            residuals.push(r);
            let mut row = vec![Cell::num(alpha)];
            row.extend(coord_cells(xi));
            row.extend(complex_cells(fg));
            row.push(Cell::num(wv));
            row.extend(complex_cells(fw));
            row.push(Cell::num(gv));
            row.push(Cell::num(r));
            ctx.push(row);
        }
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn integrate(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let defaults = [
        Preset::Gauss(1.0 / (4.0 * PI)),
        Preset::Weierstrass(0.05),
        Preset::Weierstrass(0.1),
        Preset::Weierstrass(0.5),
    ];
    let fs = ctx.presets("f", ctx.spec.params.f.as_ref(), &defaults)?;
    let fixed = if ctx.spec.params.radius.is_some() || ctx.spec.params.points.is_some() {
        Some(ctx.grid(8.0, 1024)?)
    } else {
        None
    };
    let threshold = ctx.threshold(1e-8);
    ctx.columns(names(&[
            "f",
            "value_re",
            "value_im",
            "disc_error_est",
            "tail_bound",
            "radius",
            "points",
            "expected",
            "residual",
        ]));
    let mut residuals = Vec::new();
    for p in fs {
        let f = p.build(dim).map_err(|e| ctx.fail(e))?;
        let r = match &fixed {
            Some(grid) => ctx.quad.integrate(&f, grid),
            None => ctx.quad.integrate_auto(&f, ctx.tol),
        }
        .map_err(|e| ctx.fail(e))?;
        let expected = p.closed_form_integral(dim);
        let residual = expected.map(|e| (r.value - e).norm());
        residuals.extend(residual);
        let mut row = vec![Cell::text(p.to_string())];
        row.extend(complex_cells(r.value));
        row.extend([
            Cell::num(r.disc_error_est),
            Cell::num(r.tail_bound),
            Cell::num(r.grid.radius()),
            Cell::num(r.grid.points_per_axis() as f64),
            Cell::opt(expected),
            Cell::opt(residual),
        ]);
        ctx.push(row);
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn fourier_table(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let fs = ctx.presets("f", ctx.spec.params.f.as_ref(), &[Preset::Weierstrass(0.1)])?;
    let xis = ctx.points("xi", ctx.spec.params.xi.as_ref(), &linspace(-2.0, 2.0, 41))?;
    let threshold = ctx.threshold(1e-6);
    let mut c = vec!["f".to_string()];
    c.extend(coord_cols("xi", dim));
    c.extend(["value_re", "value_im", "expected_re", "expected_im", "residual"].map(String::from));
    ctx.columns(c);
    let mut residuals = Vec::new();
    for p in fs {
        let f = p.build(dim).map_err(|e| ctx.fail(e))?;
        for xi in &xis {
            let v = fourier(ctx.quad, &f, xi, ctx.tol).map_err(|e| ctx.fail(e))?;
            let expected = p.closed_form_fourier(xi.coords());
            let residual = expected.map(|e| (v - e).norm());
            residuals.extend(residual);
            let mut row = vec![Cell::text(p.to_string())];
            row.extend(coord_cells(xi));
            row.extend(complex_cells(v));
            row.push(Cell::opt(expected.map(|e| e.re)));
            row.push(Cell::opt(expected.map(|e| e.im)));
            row.push(Cell::opt(residual));
            ctx.push(row);
        }
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn invert(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let fs = ctx.presets("f", ctx.spec.params.f.as_ref(), &[Preset::Weierstrass(0.1)])?;
    let xs = ctx.points("x", ctx.spec.params.x.as_ref(), &[0.0, 0.5, 1.0])?;
    let alphas = ctx.alphas(geometric_ladder(0.2, 6));
    let threshold = ctx.threshold(1e-6);
    let mut c = vec!["f".to_string()];
    c.extend(coord_cols("x", dim));
    c.extend(
        [
            "alpha",
            "inversion_re",
            "inversion_im",
            "mollify_re",
            "mollify_im",
            "f_re",
            "f_im",
            "error",
            "chain_residual",
        ]
        .map(String::from),
    );
    ctx.columns(c);
    let (mut chain, mut increases, mut finals) = (Vec::new(), Vec::new(), Vec::new());
    for p in fs {
        let f = p.build(dim).map_err(|e| ctx.fail(e))?;
        for x in &xs {
            let fx = f.eval(x.coords());
            let mut prev: Option<f64> = None;
            for &alpha in &alphas {
                let inv = gauss_inversion(ctx.quad, &f, x, alpha, ctx.tol).map_err(|e| ctx.fail(e))?;
                let mol = mollify(ctx.quad, &f, alpha, x, ctx.tol).map_err(|e| ctx.fail(e))?;
                let error = (inv - fx).norm();
                let residual = (inv - mol).norm();
                chain.push(residual);
                if let Some(prev) = prev {
                    increases.push(error - prev);
                }
                prev = Some(error);
                let mut row = vec![Cell::text(p.to_string())];
                row.extend(coord_cells(x));
                row.push(Cell::num(alpha));
                row.extend(complex_cells(inv));
                row.extend(complex_cells(mol));
                row.extend(complex_cells(fx));
                row.push(Cell::num(error));
                row.push(Cell::num(residual));
                ctx.push(row);
            }
            finals.extend(prev);
        }
    }
    ctx.check_max("max_chain_residual", chain, threshold);
    ctx.check_max("max_error_increase", increases, MONOTONE_SLACK);
    ctx.check_max("max_final_error", finals, INVERSION_FINAL_LIMIT);
    Ok(())
}

fn mollify_table(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let fs = ctx.presets("f", ctx.spec.params.f.as_ref(), &[Preset::Weierstrass(0.1)])?;
    let alphas = ctx.alphas(vec![0.05]);
    let xs = ctx.points("x", ctx.spec.params.x.as_ref(), &linspace(-2.0, 2.0, 41))?;
    let grid = ctx.grid(6.0, if dim == 1 { 256 } else { 64 })?;
    let threshold = ctx.threshold(1e-6);
    let mut c = vec!["f".to_string(), "alpha".to_string()];
    c.extend(coord_cols("x", dim));
    c.extend(["value_re", "value_im", "expected", "residual"].map(String::from));
    ctx.columns(c);
    let (mut residuals, mut sup_excess, mut l1_excess) = (Vec::new(), Vec::new(), Vec::new());
    for p in fs {
        let f = p.build(dim).map_err(|e| ctx.fail(e))?;
        for &alpha in &alphas {
            let mut smoothed_max = 0.0f64;
            for x in &xs {
                let v = mollify(ctx.quad, &f, alpha, x, ctx.tol).map_err(|e| ctx.fail(e))?;
                smoothed_max = smoothed_max.max(v.norm());
                let expected = match p {
                    Preset::Weierstrass(a) => {
                        let s = KernelScale::new(a + alpha, dim).map_err(|e| ctx.fail(e))?;
                        Some(weierstrass_real(s, x.coords()))
                    }
                    Preset::Gauss(b) => Some(gauss_smoothed(b, alpha, x.coords())),
                    _ => None,
                };
                let residual = expected.map(|e| (v - e).norm());
                residuals.extend(residual);
                let mut row = vec![Cell::text(p.to_string()), Cell::num(alpha)];
                row.extend(coord_cells(x));
                row.extend(complex_cells(v));
                row.push(Cell::opt(expected));
                row.push(Cell::opt(residual));
                ctx.push(row);
            }
            if let Some(sup) = sup_of(&f) {
                sup_excess.push(smoothed_max - sup);
            }
            let certified = matches!(
                f.envelope(),
                DecayEnvelope::Gaussian { .. } | DecayEnvelope::CompactSupport { .. }
            );
            if f.is_integrable() && certified {
                let l1 = mollify_l1_check(ctx.quad, &f, alpha, &grid, ctx.tol).map_err(|e| ctx.fail(e))?;
                l1_excess.push(l1.lhs - l1.rhs);
            }
        }
    }
    ctx.check_max("max_residual", residuals, threshold);
    ctx.check_max("sup_contraction_excess", sup_excess, CONTRACTION_SLACK);
    ctx.check_max("l1_contraction_excess", l1_excess, CONTRACTION_SLACK);
    Ok(())
}

/// `int f^ psi` in closed form for kernel presets.
fn pairing_closed_form(f: Preset, psi: Preset, dim: usize) -> Option<f64> {
    let n = dim as f64;
    match (f, psi) {
        (Preset::Gauss(a), Preset::Gauss(b)) | (Preset::Weierstrass(a), Preset::Weierstrass(b)) => {
            Some((1.0 + 16.0 * PI * PI * a * b).powf(-n / 2.0))
        }
        (Preset::Gauss(a), Preset::Weierstrass(b)) | (Preset::Weierstrass(a), Preset::Gauss(b)) => {
            Some((4.0 * PI * (a + b)).powf(-n / 2.0))
        }
        _ => None,
    }
}

fn multiplication(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let quarter = 1.0 / (4.0 * PI);
    let fs = ctx.presets(
        "f",
        ctx.spec.params.f.as_ref(),
        &[Preset::Gauss(quarter), Preset::Gauss(0.05)],
    )?;
    let psis = ctx.presets(
        "psi",
        ctx.spec.params.psi.as_ref(),
        &[Preset::Gauss(quarter), Preset::Gauss(0.2)],
    )?;
    if fs.len() != psis.len() {
        return Err(HarnessError::Config(format!(
            "f and psi lists pair up and must have equal length ({} vs {})",
            fs.len(),
            psis.len()
        )));
    }
    let threshold = ctx.threshold(1e-6);
    ctx.columns(names(&["f", "psi", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "expected", "residual"]));
    let mut residuals = Vec::new();
    for (p, q) in fs.into_iter().zip(psis) {
        let f = p.build(dim).map_err(|e| ctx.fail(e))?;
        let psi = q.build(dim).map_err(|e| ctx.fail(e))?;
        let m = multiplication_formula_check(ctx.quad, &f, &psi, ctx.tol).map_err(|e| ctx.fail(e))?;
        let expected = pairing_closed_form(p, q, dim);
        let mut residual = m.residual();
        if let Some(e) = expected {
            residual = residual.max((m.lhs - e).norm()).max((m.rhs - e).norm());
        }
        residuals.push(residual);
        let mut row = vec![Cell::text(p.to_string()), Cell::text(q.to_string())];
        row.extend(complex_cells(m.lhs));
        row.extend(complex_cells(m.rhs));
        row.push(Cell::opt(expected));
        row.push(Cell::num(residual));
        ctx.push(row);
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn modulate_table(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let p = ctx.preset("h", ctx.spec.params.h.as_ref(), Preset::Gauss(0.1))?;
    let shifts = ctx.points("a", ctx.spec.params.a.as_ref(), &[-0.5, 0.0, 0.5])?;
    let etas = ctx.points("xi", ctx.spec.params.xi.as_ref(), &[-1.0, 0.0, 1.0])?;
    let threshold = ctx.threshold(2e-6);
    let mut c = coord_cols("a", dim);
    c.extend(coord_cols("eta", dim));
    c.extend(
        ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "expected_re", "expected_im", "residual"]
            .map(String::from),
    );
    ctx.columns(c);
    let h = p.build(dim).map_err(|e| ctx.fail(e))?;
    let mut residuals = Vec::new();
    for a in &shifts {
        for eta in &etas {
            let lhs = modulate(ctx.quad, &h, a, eta, ctx.tol).map_err(|e| ctx.fail(e))?;
            let shifted = eta.sub(a).map_err(|e| ctx.fail(e))?;
            let rhs = fourier(ctx.quad, &h, &shifted, ctx.tol).map_err(|e| ctx.fail(e))?;
            let expected = p.closed_form_fourier(shifted.coords());
            let residual = (lhs - rhs).norm();
            residuals.push(residual);
            let mut row: Vec<Cell> = coord_cells(a).chain(coord_cells(eta)).collect();
            row.extend(complex_cells(lhs));
            row.extend(complex_cells(rhs));
            row.push(Cell::opt(expected.map(|e| e.re)));
            row.push(Cell::opt(expected.map(|e| e.im)));
            row.push(Cell::num(residual));
            ctx.push(row);
        }
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn atom_literal(t: f64, re: f64, im: f64, dim: usize) -> AtomLiteral {
    AtomLiteral {
        at: ray(t, dim).coords().to_vec(),
        re,
        im,
    }
}

fn build_measure(lit: &MeasureLiteral) -> Result<BoundedMeasure, HarnessError> {
    lit.build()
        .map_err(|e| HarnessError::Config(format!("measure literal: {e}")))
}

fn density_preset(lit: &MeasureLiteral) -> Result<Option<Preset>, HarnessError> {
    lit.density
        .as_deref()
        .map(|s| s.parse::<Preset>().map_err(|e| HarnessError::Config(e.to_string())))
        .transpose()
}

fn measure_ft(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let lit = ctx.measure(MeasureLiteral {
        dim,
        atoms: vec![atom_literal(0.5, 1.0, 0.0, dim)],
        density: None,
    })?;
    let lambda = build_measure(&lit)?;
    let density = density_preset(&lit)?;
    let xis = ctx.points("xi", ctx.spec.params.xi.as_ref(), &[-1.0, -0.5, 0.0, 0.5, 1.0])?;
    let threshold = ctx.threshold(if density.is_some() { 1e-6 } else { 1e-12 });
    let mut c = coord_cols("xi", dim);
    c.extend(["value_re", "value_im", "expected_re", "expected_im", "residual"].map(String::from));
    ctx.columns(c);
    let mut residuals = Vec::new();
    for xi in &xis {
        let v = measure_fourier(ctx.quad, &lambda, xi, ctx.tol).map_err(|e| ctx.fail(e))?;
        let atomic: Complex64 = lit
            .atoms
            .iter()
            .map(|a| {
                let phase: f64 = a.at.iter().zip(xi.coords()).map(|(p, q)| p * q).sum();
                Complex64::new(a.re, a.im) * Complex64::from_polar(1.0, -2.0 * PI * phase)
            })
            .sum();
        let expected = match density {
            None => Some(atomic),
            Some(p) => p.closed_form_fourier(xi.coords()).map(|d| atomic + d),
        };
        let residual = expected.map(|e| (v - e).norm());
        residuals.extend(residual);
        let mut row: Vec<Cell> = coord_cells(xi).collect();
        row.extend(complex_cells(v));
        row.push(Cell::opt(expected.map(|e| e.re)));
        row.push(Cell::opt(expected.map(|e| e.im)));
        row.push(Cell::opt(residual));
        ctx.push(row);
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

fn measure_invert(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let lit = ctx.measure(MeasureLiteral {
        dim,
        atoms: vec![
            atom_literal(0.4, 1.0, 0.0, dim),
            atom_literal(-0.3, -0.5, 0.0, dim),
            atom_literal(0.0, 0.0, 0.25, dim),
        ],
        density: None,
    })?;
    let lambda = build_measure(&lit)?;
    let xs = ctx.points("x", ctx.spec.params.x.as_ref(), &[0.0, 0.5, 1.0])?;
    let alphas = ctx.alphas(vec![0.1]);
    let threshold = ctx.threshold(1e-6);
    let mut c = coord_cols("x", dim);
    c.extend(
        ["alpha", "inversion_re", "inversion_im", "mollify_re", "mollify_im", "residual"]
            .map(String::from),
    );
    ctx.columns(c);
    let mut residuals = Vec::new();
    for x in &xs {
        for &alpha in &alphas {
            let inv = measure_gauss_inversion(ctx.quad, &lambda, x, alpha, ctx.tol).map_err(|e| ctx.fail(e))?;
            let mol = mollify_measure(ctx.quad, &lambda, alpha, x, ctx.tol).map_err(|e| ctx.fail(e))?;
            let residual = (inv - mol).norm();
            residuals.push(residual);
            let mut row: Vec<Cell> = coord_cells(x).collect();
            row.push(Cell::num(alpha));
            row.extend(complex_cells(inv));
            row.extend(complex_cells(mol));
            row.push(Cell::num(residual));
            ctx.push(row);
        }
    }
    ctx.check_max("max_residual", residuals, threshold);
    Ok(())
}

/// `int (W_alpha * lambda) G_b` in closed form when every part of the
/// measure has one.
fn weak_closed_form(lit: &MeasureLiteral, b: f64, alpha: f64, dim: usize) -> Option<Complex64> {
    let mut total: Complex64 = lit
        .atoms
        .iter()
        .map(|a| Complex64::new(a.re, a.im) * gauss_smoothed(b, alpha, &a.at))
        .sum();
    if let Some(d) = &lit.density {
        match d.parse::<Preset>().ok()? {
            Preset::Weierstrass(a0) => total += gauss_smoothed(b, alpha + a0, &vec![0.0; dim]),
            _ => return None,
        }
    }
    Some(total)
}

fn weak_convergence(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let dim = ctx.dim;
    let lit = ctx.measure(MeasureLiteral {
        dim,
        atoms: vec![atom_literal(0.0, 1.0, 0.0, dim)],
        density: None,
    })?;
    let lambda = build_measure(&lit)?;
    let p = ctx.preset("h", ctx.spec.params.h.as_ref(), Preset::Gauss(1.0))?;
    let alphas = ctx.alphas(geometric_ladder(0.2, 6));
    let grid = ctx.grid(4.0, 512)?;
    let threshold = ctx.threshold(1e-6);
    ctx.columns(names(&[
            "alpha", "value_re", "value_im", "target_re", "target_im", "gap", "expected", "residual",
        ]));
    let h = p.build(dim).map_err(|e| ctx.fail(e))?;
    let trace = weak_convergence_trace(ctx.quad, &lambda, &h, &alphas, &grid, ctx.tol)
        .map_err(|e| ctx.fail(e))?;
    let mut residuals = Vec::new();
    for pt in &trace.points {
        let expected = match p {
            Preset::Gauss(b) => weak_closed_form(&lit, b, pt.alpha, dim),
            _ => None,
        };
        let residual = expected.map(|e| (pt.value - e).norm());
        residuals.extend(residual);
        let mut row = vec![Cell::num(pt.alpha)];
        row.extend(complex_cells(pt.value));
        row.extend(complex_cells(pt.target));
        row.push(Cell::num(pt.gap));
        // closed forms here are real whenever the weights are
        row.push(Cell::opt(expected.filter(|e| e.im == 0.0).map(|e| e.re)));
        row.push(Cell::opt(residual));
        ctx.push(row);
    }
    let increases: Vec<f64> = trace.points.windows(2).map(|w| w[1].gap - w[0].gap).collect();
    ctx.check_max("max_residual", residuals, threshold);
    ctx.check_max("max_gap_increase", increases, WEAK_MONOTONE_SLACK);
    Ok(())
}
