//! The symmetric example `L(y) = κy`, `P(y, z) = λ(y + z)`.

use std::f64::consts::PI;

use serde::Serialize;

use super::data::{BoundaryData, BoundaryProfile};
use super::grid::S3Grid;
use super::kernel::KernelP;
use crate::error::{AdhmError, Result};

/// Parameters of the example for a given `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimpleExample {
    pub lambda: f64,
    /// `κ = √(2λ − 2π²λ²)`, from `2π²λ² − 2λ + κ² = 0`.
    pub kappa: f64,
    /// Instanton size `ρ = (1 − 2π²λ) / √(2λ(1 − π²λ))`.
    pub rho: f64,
}

impl SimpleExample {
    pub fn new(lambda: f64) -> Result<Self> {
        let s = 2.0 * PI * PI * lambda;
        if !(s > 0.0 && s < 1.0) {
            return Err(AdhmError::Domain(format!(
                "simple example needs 0 < 2π²λ < 1, got λ = {lambda}"
            )));
        }
        let kappa = (2.0 * lambda - 2.0 * PI * PI * lambda * lambda).sqrt();
        let k = kappa * PI * 2f64.sqrt();
        if !(k > 0.0 && k < 1.0) {
            return Err(AdhmError::Domain(format!("κπ√2 = {k} is outside (0, 1)")));
        }
        let rho = (1.0 - s) / (2.0 * lambda * (1.0 - PI * PI * lambda)).sqrt();
        Ok(SimpleExample { lambda, kappa, rho })
    }

    pub fn kernel(&self) -> KernelP {
        KernelP::SimpleExample { lambda: self.lambda }
    }

    pub fn data(&self, grid: S3Grid) -> BoundaryData {
        BoundaryData::from_profile(grid, BoundaryProfile::linear(self.kappa))
    }

    /// The real constant `R = −κ²` that the constraint combination reduces to.
    pub fn constraint_value(&self) -> f64 {
        -self.kappa * self.kappa
    }
}

/// Data, kernel and instanton size of the example on `grid`.
pub fn simple_example(lambda: f64, grid: S3Grid) -> Result<(BoundaryData, KernelP, f64)> {
    let ex = SimpleExample::new(lambda)?;
    Ok((ex.data(grid), ex.kernel(), ex.rho))
}
