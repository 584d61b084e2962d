//! The `adhm` command line: constraint checks, transforms on a lattice,
//! Monte Carlo convergence, the linearized theory and the symmetric example.
//!
//! Exit codes are 0 when the run passes its tolerance, 1 when it does not and
//! 2 for unusable input.

pub mod config;

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::adhm::thooft_data;
use crate::ansatz::{ansatz_potential, HarmonicProvider};
use crate::boundary::{
    constraint_residual_inf, layer_potential, mc_phi, BoundaryData, BoundaryTransform, GridScheme, KernelP, S3Grid,
    SimpleExample,
};
use crate::error::{AdhmError, Result};
use crate::fields::{probe, sample_field, SampleOptions};
use crate::io::{field_sample_csv, field_sample_json, to_json, BoundaryFile, InputFile, KernelSpec};
use crate::linearized::{capital_phi_field, linearized_from, order_test, OrderReport};
use crate::quat::Quaternion;

pub use config::{Format, GridSpec, LatticeSpec, RunConfig, Settings};

pub const CONSTRAINT_TOL: f64 = 1e-10;
pub const FIELD_TOL: f64 = 1e-4;
pub const SLOPE_TOL: f64 = 0.15;
/// Accepted band for the ε-halving ratio of an `O(ε⁴)` remainder.
pub const ORDER_BAND: (f64, f64) = (11.0, 21.0);
/// The order test runs the dense solver, so it uses at most this many lattice points.
pub const ORDER_POINTS: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "adhm", version, about = "ADHM transforms for SU(2) instantons and boundary data on S³")]
pub struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Boundary grid: p:NPSI,NTHETA,NPHI or mc:N:SEED.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Evaluation lattice: POINTS:EXTENT.
    #[arg(long, global = true)]
    pub lattice: Option<String>,
    /// Finite-difference step for curvatures.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Pass/fail tolerance; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the ADHM constraint residual of a data file.
    ConstraintCheck { input: PathBuf },
    /// Evaluate the gauge field on the lattice and write a field sample.
    Transform {
        input: PathBuf,
        /// Include the potential components in CSV output.
        #[arg(long)]
        with_potential: bool,
    },
    /// Compare Monte Carlo discretizations of real boundary data with the quadrature result.
    ConvergeMc {
        input: PathBuf,
        /// Comma-separated Monte Carlo sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the three abelian fields of the linearized theory and the ε-halving report.
    Linearized {
        input: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Tabulate λ → (κ, ρ) for the symmetric example and write its data file.
    ExampleSimple {
        #[arg(long)]
        lambda: Option<f64>,
    },
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// Parse arguments, run, and return the exit code. Reports go to `out`,
/// errors to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn config_for(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let mut flags = Settings {
        grid: cli.grid.clone(),
        lattice: cli.lattice.clone(),
        fd_step: cli.fd_step,
        tol: cli.tol,
        out: cli.out.clone(),
        format: cli.format,
        ..Settings::default()
    };
    match &cli.command {
        Command::ConvergeMc { n, seed, .. } => {
            flags.n_list = n.clone();
            flags.seed = *seed;
        }
        Command::Linearized { eps, .. } => flags.eps = *eps,
        Command::ExampleSimple { lambda } => flags.lambda = *lambda,
        _ => {}
    }
    RunConfig::from_settings(file.overlay(flags))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Status> {
    let cfg = config_for(cli)?;
    let mut report = String::new();
    let status = match &cli.command {
        Command::ConstraintCheck { input } => cmd_constraint(input, &cfg, &mut report)?,
        Command::Transform { input, with_potential } => cmd_transform(input, &cfg, *with_potential, &mut report)?,
        Command::ConvergeMc { input, .. } => cmd_converge(input, &cfg, &mut report)?,
        Command::Linearized { input, .. } => cmd_linearized(input, &cfg, &mut report)?,
        Command::ExampleSimple { .. } => cmd_example_simple(&cfg, &mut report)?,
    };
    writeln!(report, "{}", if status == Status::Pass { "PASS" } else { "FAIL" }).unwrap();
    out.write_all(report.as_bytes())?;
    Ok(status)
}

/// Boundary data and kernel from a boundary file, on the configured grid if one is set.
fn boundary_input(file: &BoundaryFile, input: &Path, cfg: &RunConfig) -> Result<(BoundaryData, Option<KernelP>)> {
    let grid = cfg.grid.map(S3Grid::from_scheme).transpose()?;
    let data = file.data(grid)?;
    let kernel = file.kernel(input.parent().unwrap_or(Path::new(".")))?;
    let reach = cfg.lattice.extent + data.grid().margin();
    if reach >= 1.0 {
        return Err(AdhmError::Input(format!(
            "lattice extent {} plus the grid margin {:.3} reaches the boundary",
            cfg.lattice.extent,
            data.grid().margin()
        )));
    }
    Ok((data, kernel))
}

fn require_boundary(input: &Path, what: &str) -> Result<BoundaryFile> {
    match InputFile::load(input)? {
        InputFile::Boundary(b) => Ok(b),
        _ => Err(AdhmError::Input(format!("{}: {what} needs a boundary data file", input.display()))),
    }
}

fn write_output(cfg: &RunConfig, csv: impl FnOnce() -> String, json: impl FnOnce() -> Result<String>) -> Result<()> {
    if let Some(path) = &cfg.out {
        let text = match cfg.format {
            Format::Csv => csv(),
            Format::Json => json()?,
        };
        std::fs::write(path, text)?;
    }
    Ok(())
}

pub fn cmd_constraint(input: &Path, cfg: &RunConfig, report: &mut String) -> Result<Status> {
    let tol = cfg.tol.unwrap_or(CONSTRAINT_TOL);
    let (kind, residual) = match InputFile::load(input)? {
        InputFile::Adhm(f) => ("finite", f.into_data()?.constraint_residual()),
        InputFile::Poles(p) => ("'t Hooft", thooft_data(&p.points, &p.weights)?.constraint_residual()),
        InputFile::Boundary(b) => {
            let (data, kernel) = boundary_input(&b, input, cfg)?;
            ("boundary", constraint_residual_inf(&data, &kernel.unwrap_or(KernelP::Zero))?)
        }
    };
    writeln!(report, "data: {kind}").unwrap();
    writeln!(report, "constraint residual: {residual:.6e}").unwrap();
    writeln!(report, "tolerance: {tol:e}").unwrap();
    Ok(Status::from_bool(residual <= tol))
}

pub fn cmd_transform(input: &Path, cfg: &RunConfig, with_potential: bool, report: &mut String) -> Result<Status> {
    let tol = cfg.tol.unwrap_or(FIELD_TOL);
    let points = cfg.lattice.points();
    let opts = SampleOptions::new(cfg.fd_step);
    let (kind, sample) = match InputFile::load(input)? {
        InputFile::Adhm(f) => {
            let d = f.into_data()?;
            let opts = opts.avoiding(d.singular_points());
            ("finite ADHM", sample_field(|x| d.gauge_potential(x), &points, &opts))
        }
        InputFile::Poles(p) => {
            let phi = p.into_phi()?;
            let opts = opts.avoiding(phi.points.clone());
            ("'t Hooft ansatz", sample_field(|x| ansatz_potential(&phi, x), &points, &opts))
        }
        InputFile::Boundary(b) => {
            let (data, kernel) = boundary_input(&b, input, cfg)?;
            match kernel {
                None if data.is_real() => {
                    let phi = layer_potential(&data)?;
                    ("boundary ansatz", sample_field(|x| ansatz_potential(&phi, x), &points, &opts))
                }
                k => {
                    let t = BoundaryTransform::new(&data, &k.unwrap_or(KernelP::Zero))?;
                    ("boundary general", sample_field(|x| t.potential(x), &points, &opts))
                }
            }
        }
    };
    write_output(cfg, || field_sample_csv(&sample, with_potential), || field_sample_json(&sample))?;
    for s in &sample.skipped {
        writeln!(report, "skipped x = {}: {}", s.x, s.reason).unwrap();
    }
    writeln!(report, "path: {kind}").unwrap();
    writeln!(report, "points: {} evaluated, {} skipped", sample.points.len(), sample.skipped.len()).unwrap();
    let max_sd = sample.max_sd_residual();
    writeln!(report, "max sd_residual: {max_sd:.6e}").unwrap();
    writeln!(report, "max action_density: {:.6e}", sample.max_action_density()).unwrap();
    writeln!(report, "tolerance: {tol:e}").unwrap();
    Ok(Status::from_bool(max_sd <= tol))
}

/// One row of the Monte Carlo convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub phi_error: f64,
    pub field_error: f64,
}

/// `max|φ^(N) − φ|` and `max‖A^(N) − A‖` over `points` for each `N`.
pub fn convergence_table(data: &BoundaryData, ns: &[usize], seed: u64, points: &[Quaternion]) -> Result<Vec<ConvergenceRow>> {
    let reference = layer_potential(data)?;
    let exact = points
        .par_iter()
        .map(|&x| Ok((reference.eval(x)?.value, ansatz_potential(&reference, x)?)))
        .collect::<Result<Vec<_>>>()?;
    ns.iter()
        .map(|&n| {
            let mc = mc_phi(data, n, seed)?;
            let errs = points
                .par_iter()
                .zip(&exact)
                .map(|(&x, (phi, a))| Ok(((mc.eval(x)?.value - phi).abs(), ansatz_potential(&mc, x)?.distance(a))))
                .collect::<Result<Vec<(f64, f64)>>>()?;
            Ok(ConvergenceRow {
                n,
                phi_error: errs.iter().map(|e| e.0).fold(0.0, f64::max),
                field_error: errs.iter().map(|e| e.1).fold(0.0, f64::max),
            })
        })
        .collect()
}

/// Least-squares slope of `log err` against `log N`; `None` with fewer than two sizes.
pub fn fitted_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.phi_error > 0.0)
        .map(|r| ((r.n as f64).ln(), r.phi_error.ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn cmd_converge(input: &Path, cfg: &RunConfig, report: &mut String) -> Result<Status> {
    let file = require_boundary(input, "converge-mc")?;
    let (data, _) = boundary_input(&file, input, cfg)?;
    if !data.is_real() {
        return Err(AdhmError::Input("converge-mc needs real boundary data".into()));
    }
    let rows = convergence_table(&data, &cfg.n_list, cfg.seed, &cfg.lattice.points())?;
    let slope = fitted_slope(&rows);
    let tol = cfg.tol.unwrap_or(SLOPE_TOL);
    write_output(
        cfg,
        || {
            let mut s = String::from("n,phi_error,field_error\n");
            for r in &rows {
                writeln!(s, "{},{:e},{:e}", r.n, r.phi_error, r.field_error).unwrap();
            }
            s
        },
        || to_json(&serde_json::json!({ "seed": cfg.seed, "rows": rows, "slope": slope })),
    )?;
    writeln!(report, "seed: {}", cfg.seed).unwrap();
    writeln!(report, "{:>10} {:>14} {:>14}", "N", "max|dphi|", "max|dA|").unwrap();
    for r in &rows {
        writeln!(report, "{:>10} {:>14.6e} {:>14.6e}", r.n, r.phi_error, r.field_error).unwrap();
    }
    let ok = match slope {
        Some(s) => {
            writeln!(report, "fitted slope: {s:.4} (expected -0.5 ± {tol})").unwrap();
            (s + 0.5).abs() <= tol
        }
        None => {
            writeln!(report, "fitted slope: n/a").unwrap();
            true
        }
    };
    Ok(Status::from_bool(ok))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct LinearizedPoint {
    x: Quaternion,
    /// `𝒜^a_μ` as `[a − 1][μ]`.
    fields: [[f64; 4]; 3],
    /// Self-duality residual of each abelian field.
    sd_residual: [f64; 3],
}

pub fn cmd_linearized(input: &Path, cfg: &RunConfig, report: &mut String) -> Result<Status> {
    let file = require_boundary(input, "linearized")?;
    let (data, _) = boundary_input(&file, input, cfg)?;
    let tol = cfg.tol.unwrap_or(FIELD_TOL);
    let scaled = data.scaled(cfg.eps);
    let phi = capital_phi_field(&scaled);
    let points = cfg.lattice.points();
    let sample = points
        .par_iter()
        .map(|&x| {
            let f = linearized_from(&phi, x)?;
            let mut sd = [0.0; 3];
            for (a, r) in sd.iter_mut().enumerate() {
                *r = probe(|y| Ok(linearized_from(&phi, y)?.abelian(a + 1)), x, cfg.fd_step)?.1;
            }
            Ok(LinearizedPoint {
                x,
                fields: f.0,
                sd_residual: sd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stride = points.len().div_ceil(ORDER_POINTS).max(1);
    let order_pts: Vec<Quaternion> = points.iter().step_by(stride).copied().collect();
    let order: OrderReport = order_test(&data, cfg.eps, &order_pts)?;

    write_output(
        cfg,
        || {
            let mut s = String::from("x1,x2,x3,x4");
            for a in 1..=3 {
                for mu in 1..=4 {
                    write!(s, ",A{a}_{mu}").unwrap();
                }
            }
            s.push_str(",sd1,sd2,sd3\n");
            for p in &sample {
                write!(s, "{},{},{},{}", p.x.0[0], p.x.0[1], p.x.0[2], p.x.0[3]).unwrap();
                for v in p.fields.iter().flatten().chain(&p.sd_residual) {
                    write!(s, ",{v:e}").unwrap();
                }
                s.push('\n');
            }
            s
        },
        || to_json(&serde_json::json!({ "eps": cfg.eps, "points": sample, "order": order })),
    )?;

    let max_sd = sample
        .iter()
        .flat_map(|p| p.sd_residual)
        .fold(0.0, f64::max);
    let ratio = order.linearized_ratio();
    writeln!(report, "eps: {} -> {}", order.eps[0], order.eps[1]).unwrap();
    writeln!(report, "points: {}", sample.len()).unwrap();
    writeln!(report, "max abelian sd_residual: {max_sd:.6e} (tolerance {tol:e})").unwrap();
    writeln!(
        report,
        "linearized vs full: {:.6e} -> {:.6e}, ratio {ratio:.3} (band {}..{})",
        order.linearized_error[0], order.linearized_error[1], ORDER_BAND.0, ORDER_BAND.1
    )
    .unwrap();
    writeln!(
        report,
        "leading order vs full: {:.6e} -> {:.6e}, ratio {:.3}",
        order.leading_error[0],
        order.leading_error[1],
        order.leading_ratio()
    )
    .unwrap();
    let in_band = ratio >= ORDER_BAND.0 && ratio <= ORDER_BAND.1;
    Ok(Status::from_bool(max_sd <= tol && in_band))
}

/// Size read off the action-density profile `s(r)/s(0) = (ρ²/(ρ² + r²))⁴`.
pub fn fitted_size(s0: f64, sr: f64, r: f64) -> f64 {
    (r * r / ((s0 / sr).powf(0.25) - 1.0)).sqrt()
}

/// The λ values of the default table: `2π²λ ∈ {0.1, 0.25, 0.5, 0.75, 0.9}`.
pub fn default_lambdas() -> Vec<f64> {
    [0.1, 0.25, 0.5, 0.75, 0.9].iter().map(|f| f / (2.0 * PI * PI)).collect()
}

pub fn cmd_example_simple(cfg: &RunConfig, report: &mut String) -> Result<Status> {
    let tol = cfg.tol.unwrap_or(CONSTRAINT_TOL);
    let scheme = cfg.grid.unwrap_or(GridScheme::Product {
        n_psi: 16,
        n_theta: 16,
        n_phi: 16,
    });
    let grid = S3Grid::from_scheme(scheme)?;
    let probe_r = 0.3;
    let lambdas = match cfg.lambda {
        Some(l) => vec![l],
        None => default_lambdas(),
    };
    writeln!(report, "{:>12} {:>12} {:>12} {:>12} {:>12}", "lambda", "kappa", "rho", "rho_fit", "residual").unwrap();
    let mut ok = true;
    for lambda in lambdas {
        let ex = SimpleExample::new(lambda)?;
        let data = ex.data(grid.clone());
        let residual = constraint_residual_inf(&data, &ex.kernel())?;
        let t = BoundaryTransform::new(&data, &ex.kernel())?;
        let s0 = probe(|x| t.potential(x), Quaternion::ZERO, cfg.fd_step)?.2;
        let sr = probe(|x| t.potential(x), Quaternion::real(probe_r), cfg.fd_step)?.2;
        let rho_fit = fitted_size(s0, sr, probe_r);
        writeln!(
            report,
            "{lambda:>12.6e} {:>12.6e} {:>12.6e} {rho_fit:>12.6e} {residual:>12.3e}",
            ex.kappa, ex.rho
        )
        .unwrap();
        ok &= residual <= tol;
    }
    if let Some(path) = &cfg.out {
        let lambda = cfg.lambda.unwrap_or(1.0 / (4.0 * PI * PI));
        let ex = SimpleExample::new(lambda)?;
        let file = BoundaryFile::from_data(&ex.data(grid), Some(KernelSpec::SimpleExample { lambda }));
        std::fs::write(path, to_json(&file)?)?;
        writeln!(report, "data file: {}", path.display()).unwrap();
    }
    writeln!(report, "tolerance: {tol:e}").unwrap();
    Ok(Status::from_bool(ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit() {
        let rows: Vec<ConvergenceRow> = [100, 1000, 10000]
            .iter()
            .map(|&n| ConvergenceRow {
                n,
                phi_error: 3.0 / (n as f64).sqrt(),
                field_error: 0.0,
            })
            .collect();
        assert!((fitted_slope(&rows).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(fitted_slope(&rows[..1]), None);
    }

    #[test]
    fn size_fit_inverts_profile() {
        let rho: f64 = 0.6;
        let s = |r: f64| (rho * rho / (rho * rho + r * r)).powi(4);
        assert!((fitted_size(s(0.0), s(0.3), 0.3) - rho).abs() < 1e-12);
    }

    #[test]
    fn default_table_contains_quarter_pi_squared() {
        let l = default_lambdas();
        assert!(l.iter().any(|x| (x - 1.0 / (4.0 * PI * PI)).abs() < 1e-15));
    }

    #[test]
    fn bad_arguments_exit_two() {
        let mut out = Vec::new();
        assert_eq!(run(["adhm", "no-such-command"], &mut out), 2);
        assert_eq!(run(["adhm", "transform", "/nonexistent.json"], &mut out), 2);
        assert_eq!(run(["adhm", "--lattice", "9:0.95", "example-simple"], &mut out), 2);
    }
}
