//! Verification experiments behind the `heatline` command-line tool.
//!
//! An [`ExperimentSpec`] names an experiment and carries its parameters;
//! [`run`] evaluates it into a [`ResultTable`] whose rows record the inputs
//! that produced them, and [`export`] writes the table as CSV or JSON.
//! Every experiment is sequential with fixed grids, so repeated runs export
//! identical bytes.

mod experiments;
mod table;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::RealPoint;
use crate::quadrature::Quadrature;

pub use table::{
    export, export_bytes, export_csv, export_json, read_csv, Cell, Check, Format, Metadata,
    ResultTable,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{experiment}: {source}")]
    Run {
        experiment: Experiment,
        #[source]
        source: crate::Error,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyKernels,
    Integrate,
    Fourier,
    Invert,
    Mollify,
    Multiplication,
    Modulate,
    MeasureFt,
    MeasureInvert,
    WeakConvergence,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::VerifyKernels,
        Experiment::Integrate,
        Experiment::Fourier,
        Experiment::Invert,
        Experiment::Mollify,
        Experiment::Multiplication,
        Experiment::Modulate,
        Experiment::MeasureFt,
        Experiment::MeasureInvert,
        Experiment::WeakConvergence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::VerifyKernels => "verify-kernels",
            Experiment::Integrate => "integrate",
            Experiment::Fourier => "fourier",
            Experiment::Invert => "invert",
            Experiment::Mollify => "mollify",
            Experiment::Multiplication => "multiplication",
            Experiment::Modulate => "modulate",
            Experiment::MeasureFt => "measure-ft",
            Experiment::MeasureInvert => "measure-invert",
            Experiment::WeakConvergence => "weak-convergence",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::UnknownExperiment(s.to_string()))
    }
}

/// A point given either as a full coordinate list or as a single number
/// `t`, which means `t` on `R^1` and `t (1, 1/2, 0, ..)` in higher dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointParam {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PointParam {
    pub fn resolve(&self, dim: usize) -> Result<RealPoint, HarnessError> {
        match self {
            PointParam::Scalar(t) => Ok(ray(*t, dim)),
            PointParam::Vector(v) if v.len() == dim => {
                RealPoint::new(v.clone()).map_err(|e| HarnessError::Config(e.to_string()))
            }
            PointParam::Vector(v) => Err(HarnessError::Config(format!(
                "point {v:?} has {} coordinates, expected {dim}",
                v.len()
            ))),
        }
    }
}

impl FromStr for PointParam {
    type Err = HarnessError;

    /// `"0.5"` or `"0.5,0.25"`.
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let coords = s
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| HarnessError::Config(format!("malformed point `{s}`")))?;
        match coords.as_slice() {
            [t] => Ok(PointParam::Scalar(*t)),
            _ => Ok(PointParam::Vector(coords)),
        }
    }
}

/// `t (1, 1/2, 0, ..)`.
pub(crate) fn ray(t: f64, dim: usize) -> RealPoint {
    let mut v = vec![0.0; dim];
    v[0] = t;
    if dim > 1 {
        v[1] = 0.5 * t;
    }
    RealPoint::new(v).expect("dimension is positive")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    Many(Vec<T>),
    One(T),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::Many(xs) => xs,
            OneOrMany::One(x) => vec![x],
        }
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(Into::into))
}

/// Experiment parameters. Every field is optional; each experiment fills
/// in its own defaults. The config file uses the same keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub dim: Option<usize>,
    #[serde(alias = "alpha", default, deserialize_with = "one_or_many")]
    pub alphas: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    /// Pass/fail limit for the experiment's residual check.
    pub threshold: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub f: Option<Vec<String>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub psi: Option<Vec<String>>,
    pub h: Option<String>,
    pub measure: Option<String>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub xi: Option<Vec<PointParam>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub x: Option<Vec<PointParam>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub a: Option<Vec<PointParam>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Params {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Field-wise overlay; values set in `over` win.
    pub fn overlay(self, over: Params) -> Params {
        Params {
            dim: over.dim.or(self.dim),
            alphas: over.alphas.or(self.alphas),
            radius: over.radius.or(self.radius),
            points: over.points.or(self.points),
            tol: over.tol.or(self.tol),
            threshold: over.threshold.or(self.threshold),
            f: over.f.or(self.f),
            psi: over.psi.or(self.psi),
            h: over.h.or(self.h),
            measure: over.measure.or(self.measure),
            xi: over.xi.or(self.xi),
            x: over.x.or(self.x),
            a: over.a.or(self.a),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: Experiment,
    pub dim: usize,
    pub params: Params,
}

impl ExperimentSpec {
    pub fn new(name: Experiment, params: Params) -> Result<Self, HarnessError> {
        let dim = params.dim.unwrap_or(1);
        if dim == 0 {
            return Err(HarnessError::Config("dim must be positive".into()));
        }
        Ok(Self { name, dim, params })
    }

    pub fn named(name: &str, params: Params) -> Result<Self, HarnessError> {
        Self::new(name.parse()?, params)
    }
}

/// Runs one experiment with the node budget taken from `HEATLINE_BUDGET`.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable, HarnessError> {
    let quad = Quadrature::from_env().map_err(|e| HarnessError::Config(e.to_string()))?;
    run_with(&quad, spec)
}

pub fn run_with(quad: &Quadrature, spec: &ExperimentSpec) -> Result<ResultTable, HarnessError> {
    let start = Instant::now();
    let mut table = experiments::dispatch(quad, spec)?;
    table.passed = table.checks.iter().all(|c| c.passed);
    table.wall_time = Some(start.elapsed());
    Ok(table)
}
