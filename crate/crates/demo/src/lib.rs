//! Curves for the browser demo in `www/`. Each function samples `x` on
//! `[-half_width, half_width]` and returns a flat row-major array with a
//! fixed number of columns per row; the wasm exports hand it to JavaScript
//! as a `Float64Array`.

use heatline::functions::{gauss_fn, Preset};
use heatline::kernels::{gauss_real, weierstrass_real, KernelScale};
use heatline::measures::{measure_gauss_inversion, mollify_measure, BoundedMeasure};
use heatline::transforms::{fourier, mollify};
use heatline::{Quadrature, RealPoint};
use wasm_bindgen::prelude::*;

pub const MAX_SAMPLES: usize = 801;
pub const KERNEL_PAIR_COLUMNS: usize = 4;
pub const MOLLIFY_COLUMNS: usize = 3;
pub const MEASURE_COLUMNS: usize = 3;

const TOL: f64 = 1e-7;

fn axis(half_width: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(format!("half width must be positive, got {half_width}"));
    }
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must be between 2 and {MAX_SAMPLES}, got {samples}"));
    }
    let step = 2.0 * half_width / (samples - 1) as f64;
    Ok((0..samples).map(|i| -half_width + step * i as f64).collect())
}

fn scale(alpha: f64) -> Result<KernelScale, String> {
    KernelScale::new(alpha, 1).map_err(|e| e.to_string())
}

/// Rows `[x, G_alpha(x), W_alpha(x), Re G_alpha^(x)]`, the last column by
/// quadrature.
pub fn kernel_pair(alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, String> {
    let s = scale(alpha)?;
    let g = gauss_fn(s);
    let quad = Quadrature::default();
    let mut out = Vec::with_capacity(samples * KERNEL_PAIR_COLUMNS);
    for x in axis(half_width, samples)? {
        let ft = fourier(&quad, &g, &RealPoint::from(x), TOL).map_err(|e| e.to_string())?;
        out.extend([x, gauss_real(s, &[x]), weierstrass_real(s, &[x]), ft.re]);
    }
    Ok(out)
}

/// Rows `[x, Re f(x), Re (W_alpha * f)(x)]` for a preset such as `bump:1`.
pub fn mollify_curve(preset: &str, alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, String> {
    let p: Preset = preset.parse().map_err(|e: heatline::Error| e.to_string())?;
    let f = p.build(1).map_err(|e| e.to_string())?;
    scale(alpha)?;
    let quad = Quadrature::default();
    let mut out = Vec::with_capacity(samples * MOLLIFY_COLUMNS);
    for x in axis(half_width, samples)? {
        let v = mollify(&quad, &f, alpha, &RealPoint::from(x), TOL).map_err(|e| e.to_string())?;
        out.extend([x, f.eval(&[x]).re, v.re]);
    }
    Ok(out)
}

/// Rows `[x, Re (W_alpha * lambda)(x), Re of the Gauss-summed inverse
/// transform of lambda^ at x]` for a one-dimensional measure literal.
pub fn measure_curve(literal: &str, alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, String> {
    let lambda = BoundedMeasure::from_literal(literal).map_err(|e| e.to_string())?;
    if lambda.dim() != 1 {
        return Err(format!("the demo plots measures on R^1, got dim {}", lambda.dim()));
    }
    scale(alpha)?;
    let quad = Quadrature::default();
    let mut out = Vec::with_capacity(samples * MEASURE_COLUMNS);
    for x in axis(half_width, samples)? {
        let p = RealPoint::from(x);
        let smooth = mollify_measure(&quad, &lambda, alpha, &p, TOL).map_err(|e| e.to_string())?;
        let inv = measure_gauss_inversion(&quad, &lambda, &p, alpha, TOL).map_err(|e| e.to_string())?;
        out.extend([x, smooth.re, inv.re]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = kernelPair)]
pub fn kernel_pair_js(alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    kernel_pair(alpha, half_width, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = mollifyCurve)]
pub fn mollify_curve_js(preset: &str, alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    mollify_curve(preset, alpha, half_width, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = measureCurve)]
pub fn measure_curve_js(literal: &str, alpha: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    measure_curve(literal, alpha, half_width, samples).map_err(|e| JsError::new(&e))
}
