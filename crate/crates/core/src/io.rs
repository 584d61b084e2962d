//! JSON data files, the dense kernel reference, and field-sample export.
//!
//! Quaternions are written as `[q1, q2, q3, q4]` in the basis `(e₁, e₂, e₃, 1)`,
//! so the real part comes last.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::adhm::AdhmData;
use crate::ansatz::PoleSum;
use crate::boundary::{BoundaryData, BoundaryProfile, GridScheme, KernelP, S3Grid};
use crate::error::{AdhmError, Result};
use crate::fields::FieldSample;
use crate::quat::{QuatMatrix, Quaternion};

/// Finite ADHM data, `{"L": [q, ...], "M": [[q, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdhmFile {
    #[serde(rename = "L")]
    pub l: Vec<Quaternion>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<Quaternion>>,
}

impl AdhmFile {
    pub fn from_data(data: &AdhmData) -> Self {
        AdhmFile {
            l: data.l().to_vec(),
            m: data.m().to_dense().to_rows(),
        }
    }

    pub fn into_data(self) -> Result<AdhmData> {
        AdhmData::new(self.l, QuatMatrix::from_rows(self.m)?)
    }
}

/// Poles of the 't Hooft ansatz, `{"points": [q, ...], "weights": [λ, ...]}`,
/// giving `φ = 1 + Σ λ² / |x − p|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleFile {
    pub points: Vec<Quaternion>,
    pub weights: Vec<f64>,
}

impl PoleFile {
    pub fn into_phi(self) -> Result<PoleSum> {
        PoleSum::new(self.points, self.weights)
    }
}

/// The `P` part of the boundary operator as stored in a data file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    SimpleExample { lambda: f64 },
    /// Binary kernel file, resolved relative to the JSON file.
    Dense { path: PathBuf },
}

/// Boundary data on S³.
///
/// The grid is described by its scheme (`product` with `n_psi`, `n_theta`,
/// `n_phi`; `monte-carlo` with `n`, `seed`; or `explicit` with `nodes` and
/// `weights`). `L` is given either as one value per node or as a polynomial
/// `profile`, which can then be resampled on any grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFile {
    #[serde(flatten)]
    pub scheme: GridScheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<Quaternion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<Quaternion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<BoundaryProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

impl BoundaryFile {
    /// Store data by profile when it has one, otherwise by nodal values.
    /// Nodes are written only for explicit grids.
    pub fn from_data(data: &BoundaryData, kernel: Option<KernelSpec>) -> Self {
        let grid = data.grid();
        let explicit = grid.scheme == GridScheme::Explicit;
        BoundaryFile {
            scheme: grid.scheme,
            nodes: explicit.then(|| grid.nodes.clone()),
            weights: explicit.then(|| grid.weights.clone()),
            l: data.profile().is_none().then(|| data.values().to_vec()),
            profile: data.profile().cloned(),
            kernel,
        }
    }

    pub fn grid(&self) -> Result<S3Grid> {
        match (&self.nodes, &self.weights) {
            (Some(nodes), Some(weights)) => S3Grid::explicit(nodes.clone(), weights.clone()),
            (Some(_), None) | (None, Some(_)) => Err(AdhmError::Input(
                "boundary file: \"nodes\" and \"weights\" must be given together".into(),
            )),
            (None, None) => S3Grid::from_scheme(self.scheme),
        }
    }

    /// Boundary data on the file's own grid, or on `grid` when given
    /// (which needs a profile).
    pub fn data(&self, grid: Option<S3Grid>) -> Result<BoundaryData> {
        match (&self.profile, &self.l, grid) {
            (Some(p), None, Some(g)) => Ok(BoundaryData::from_profile(g, p.clone())),
            (Some(p), None, None) => Ok(BoundaryData::from_profile(self.grid()?, p.clone())),
            (None, Some(l), None) => BoundaryData::new(self.grid()?, l.clone()),
            (None, Some(_), Some(_)) => Err(AdhmError::Input(
                "boundary file gives nodal \"L\" values, so its grid cannot be overridden; use a \"profile\"".into(),
            )),
            (Some(_), Some(_), _) => Err(AdhmError::Input(
                "boundary file: give either \"L\" or \"profile\", not both".into(),
            )),
            (None, None, _) => Err(AdhmError::Input("boundary file: missing \"L\" or \"profile\"".into())),
        }
    }

    /// The kernel, loading a dense file relative to `base`.
    pub fn kernel(&self, base: &Path) -> Result<Option<KernelP>> {
        Ok(match &self.kernel {
            None => None,
            Some(KernelSpec::SimpleExample { lambda }) => Some(KernelP::SimpleExample { lambda: *lambda }),
            Some(KernelSpec::Dense { path }) => Some(KernelP::Dense(KernelP::load(&base.join(path))?)),
        })
    }
}

/// Any of the three input files, told apart by their keys.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Adhm(AdhmFile),
    Poles(PoleFile),
    Boundary(BoundaryFile),
}

impl InputFile {
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let json = |source| AdhmError::Json {
            context: context.to_string(),
            source,
        };
        let value: Value = serde_json::from_str(text).map_err(json)?;
        let obj = value
            .as_object()
            .ok_or_else(|| AdhmError::Input(format!("{context}: expected a JSON object")))?;
        // re-parse from text so field errors keep their line and column
        if obj.contains_key("M") {
            Ok(InputFile::Adhm(serde_json::from_str(text).map_err(json)?))
        } else if obj.contains_key("points") {
            Ok(InputFile::Poles(serde_json::from_str(text).map_err(json)?))
        } else if obj.contains_key("scheme") {
            Ok(InputFile::Boundary(serde_json::from_str(text).map_err(json)?))
        } else {
            Err(AdhmError::Input(format!(
                "{context}: not an ADHM (\"L\", \"M\"), pole (\"points\", \"weights\") or boundary (\"scheme\") file"
            )))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        InputFile::parse(&text, &path.display().to_string())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|source| AdhmError::Json {
        context: "serializing".into(),
        source,
    })
}

/// CSV with header `x1,x2,x3,x4,sd_residual,action_density` and, when
/// `with_potential` is set, the imaginary components `A{μ}_{a}` of each `A_μ`.
/// Skipped points are not written.
pub fn field_sample_csv(sample: &FieldSample, with_potential: bool) -> String {
    let mut out = String::from("x1,x2,x3,x4,sd_residual,action_density");
    if with_potential {
        for mu in 1..=4 {
            for a in 1..=3 {
                write!(out, ",A{mu}_{a}").unwrap();
            }
        }
    }
    out.push('\n');
    for p in &sample.points {
        let x = p.x.0;
        write!(out, "{},{},{},{},{:e},{:e}", x[0], x[1], x[2], x[3], p.sd_residual, p.action_density).unwrap();
        if with_potential {
            for a_mu in &p.potential.0 {
                for c in &a_mu.0[..3] {
                    write!(out, ",{c:e}").unwrap();
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn field_sample_json(sample: &FieldSample) -> Result<String> {
    to_json(sample)
}
