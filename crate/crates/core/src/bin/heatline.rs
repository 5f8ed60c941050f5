use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heatline::harness::{export, run, Experiment, ExperimentSpec, Format, HarnessError, Params, PointParam};

/// Runs a verification experiment and writes its result table.
#[derive(Parser)]
#[command(name = "heatline", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier transforms of G_alpha and W_alpha against each other
    VerifyKernels(Flags),
    /// Certified integrals of preset functions
    Integrate(Flags),
    /// Fourier transform samples of preset functions
    Fourier(Flags),
    /// Gauss-summed inversion against mollification and f(x)
    Invert(Flags),
    /// W_alpha * f, with sup and L1 contraction checks
    Mollify(Flags),
    /// Both sides of int f^ psi = int f psi^
    Multiplication(Flags),
    /// Transform of a modulated function against a shifted transform
    Modulate(Flags),
    /// Fourier transform of a bounded measure
    MeasureFt(Flags),
    /// Gauss-summed inversion of a measure against its mollification
    MeasureInvert(Flags),
    /// int (W_alpha * lambda) h along a ladder of scales
    WeakConvergence(Flags),
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::VerifyKernels(f) => (Experiment::VerifyKernels, f),
            Command::Integrate(f) => (Experiment::Integrate, f),
            Command::Fourier(f) => (Experiment::Fourier, f),
            Command::Invert(f) => (Experiment::Invert, f),
            Command::Mollify(f) => (Experiment::Mollify, f),
            Command::Multiplication(f) => (Experiment::Multiplication, f),
            Command::Modulate(f) => (Experiment::Modulate, f),
            Command::MeasureFt(f) => (Experiment::MeasureFt, f),
            Command::MeasureInvert(f) => (Experiment::MeasureInvert, f),
            Command::WeakConvergence(f) => (Experiment::WeakConvergence, f),
        }
    }
}

#[derive(Args)]
struct Flags {
    /// Dimension n of R^n
    #[arg(long)]
    dim: Option<usize>,
    /// A single kernel scale
    #[arg(long, conflicts_with = "alphas")]
    alpha: Option<f64>,
    /// Comma-separated kernel scales
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Half-width R of the quadrature cube
    #[arg(long)]
    radius: Option<f64>,
    /// Simpson panels N per axis
    #[arg(long)]
    points: Option<usize>,
    /// Target quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Pass/fail limit for the residual check
    #[arg(long)]
    threshold: Option<f64>,
    /// Function preset, e.g. gauss:0.1 (repeatable)
    #[arg(long)]
    f: Vec<String>,
    /// Partner preset for multiplication (repeatable)
    #[arg(long)]
    psi: Vec<String>,
    /// Test function preset
    #[arg(long)]
    h: Option<String>,
    /// Measure literal, e.g. '{"dim":1,"atoms":[{"at":[0.5],"re":1}]}'
    #[arg(long)]
    measure: Option<String>,
    /// Frequency point "c1,c2,.." (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    xi: Vec<PointParam>,
    /// Spatial point "c1,c2,.." (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    x: Vec<PointParam>,
    /// Modulation shift "c1,c2,.." (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    a: Vec<PointParam>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Flags {
    fn into_params(self) -> Result<Params, HarnessError> {
        let base = match &self.config {
            Some(path) => Params::from_file(path)?,
            None => Params::default(),
        };
        let flags = Params {
            dim: self.dim,
            alphas: self.alpha.map(|a| vec![a]).or(self.alphas),
            radius: self.radius,
            points: self.points,
            tol: self.tol,
            threshold: self.threshold,
            f: non_empty(self.f),
            psi: non_empty(self.psi),
            h: self.h,
            measure: self.measure,
            xi: non_empty(self.xi),
            x: non_empty(self.x),
            a: non_empty(self.a),
            out: self.out,
            format: self.format,
        };
        Ok(base.overlay(flags))
    }
}

fn execute(command: Command) -> Result<bool, HarnessError> {
    let (experiment, flags) = command.split();
    let params = flags.into_params()?;
    let format = params.format.unwrap_or_default();
    let out = params.out.clone();
    let spec = ExperimentSpec::new(experiment, params)?;
    let table = run(&spec)?;
    match out {
        Some(path) => {
            let file = File::create(&path)
                .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            export(&table, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            export(&table, format, &mut w)?;
            w.flush()?;
        }
    }
    for c in &table.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{status} {}: {:e} (limit {:e})", c.name, c.value, c.limit);
    }
    if let Some(t) = table.wall_time {
        eprintln!("{experiment}: {} rows in {:.3}s", table.rows.len(), t.as_secs_f64());
    }
    Ok(table.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
