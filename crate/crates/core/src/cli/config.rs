//! Run configuration: a TOML file merged with command-line flags, flags winning.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::Deserialize;

use crate::boundary::GridScheme;
use crate::error::{AdhmError, Result};
use crate::fields::{Lattice, DEFAULT_FD_STEP};

/// Largest lattice extent the commands accept.
pub const MAX_EXTENT: f64 = 0.9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `p:16,16,16` for a product grid, `mc:10000:7` for Monte Carlo with seed 7.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec(pub GridScheme);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("grid spec {s:?}: expected p:NPSI,NTHETA,NPHI or mc:N:SEED");
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "p" => {
                let n: Vec<usize> = rest
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| bad()))
                    .collect::<std::result::Result<_, _>>()?;
                let [n_psi, n_theta, n_phi] = n[..] else {
                    return Err(bad());
                };
                Ok(GridSpec(GridScheme::Product { n_psi, n_theta, n_phi }))
            }
            "mc" => {
                let (n, seed) = rest.split_once(':').ok_or_else(bad)?;
                Ok(GridSpec(GridScheme::MonteCarlo {
                    n: n.parse().map_err(|_| bad())?,
                    seed: seed.parse().map_err(|_| bad())?,
                }))
            }
            _ => Err(bad()),
        }
    }
}

/// `9:0.7` for 9 points per axis on `[−0.7, 0.7]⁴`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec(pub Lattice);

impl FromStr for LatticeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("lattice spec {s:?}: expected POINTS:EXTENT, e.g. 9:0.7");
        let (n, e) = s.split_once(':').ok_or_else(bad)?;
        Ok(LatticeSpec(Lattice {
            points_per_axis: n.parse().map_err(|_| bad())?,
            extent: e.parse().map_err(|_| bad())?,
        }))
    }
}

/// Settings shared by config files and flags. Every field is optional so
/// the two sources can be layered.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub grid: Option<String>,
    pub lattice: Option<String>,
    pub fd_step: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub n_list: Option<Vec<usize>>,
    pub eps: Option<f64>,
    pub lambda: Option<f64>,
}

impl Settings {
    pub fn from_toml(text: &str, context: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| AdhmError::Input(format!("{context}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Settings::from_toml(&text, &path.display().to_string())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            grid: over.grid.or(self.grid),
            lattice: over.lattice.or(self.lattice),
            fd_step: over.fd_step.or(self.fd_step),
            tol: over.tol.or(self.tol),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            seed: over.seed.or(self.seed),
            n_list: over.n_list.or(self.n_list),
            eps: over.eps.or(self.eps),
            lambda: over.lambda.or(self.lambda),
        }
    }
}

/// Validated configuration for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Grid override for boundary data; `None` keeps the file's grid.
    pub grid: Option<GridScheme>,
    pub lattice: Lattice,
    pub fd_step: f64,
    /// Tolerance override; each command has its own default.
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub eps: f64,
    pub lambda: Option<f64>,
}

impl RunConfig {
    pub fn from_settings(s: Settings) -> Result<Self> {
        let grid = s
            .grid
            .map(|g| g.parse::<GridSpec>().map(|g| g.0).map_err(AdhmError::Input))
            .transpose()?;
        let lattice = match s.lattice {
            Some(l) => l.parse::<LatticeSpec>().map_err(AdhmError::Input)?.0,
            None => Lattice::default(),
        };
        let lattice = Lattice::new(lattice.points_per_axis, lattice.extent)?;
        if lattice.extent > MAX_EXTENT {
            return Err(AdhmError::Input(format!(
                "lattice extent {} exceeds {MAX_EXTENT}",
                lattice.extent
            )));
        }
        let fd_step = s.fd_step.unwrap_or(DEFAULT_FD_STEP);
        if !(fd_step > 0.0) {
            return Err(AdhmError::Input(format!("fd step must be positive, got {fd_step}")));
        }
        if let Some(t) = s.tol {
            if !(t > 0.0) {
                return Err(AdhmError::Input(format!("tolerance must be positive, got {t}")));
            }
        }
        let eps = s.eps.unwrap_or(0.02);
        if !(eps > 0.0) {
            return Err(AdhmError::Input(format!("eps must be positive, got {eps}")));
        }
        let n_list = s.n_list.unwrap_or_else(|| vec![100, 1000, 10000]);
        if n_list.contains(&0) {
            return Err(AdhmError::Input("Monte Carlo sizes must be positive".into()));
        }
        Ok(RunConfig {
            grid,
            lattice,
            fd_step,
            tol: s.tol,
            out: s.out,
            format: s.format.unwrap_or_default(),
            seed: s.seed.unwrap_or(1),
            n_list,
            eps,
            lambda: s.lambda,
        })
    }
}
