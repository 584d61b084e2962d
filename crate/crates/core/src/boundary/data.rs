//! Boundary data `L(y)` sampled on an S³ grid.

use serde::{Deserialize, Serialize};

use super::grid::S3Grid;
use crate::error::{AdhmError, Result};
use crate::quat::Quaternion;

/// One term `c · y₁^{p₁} y₂^{p₂} y₃^{p₃} y₄^{p₄}` with a quaternion coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Quaternion,
    pub powers: [u32; 4],
}

/// Polynomial in the real coordinates of `y` with quaternion coefficients.
/// Covers constants, `κy` (as `Σ κ e_μ y_μ`) and band-limited test data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryProfile {
    pub terms: Vec<Monomial>,
}

impl BoundaryProfile {
    pub fn constant(c: Quaternion) -> Self {
        BoundaryProfile {
            terms: vec![Monomial { coeff: c, powers: [0; 4] }],
        }
    }

    /// `L(y) = κ y`.
    pub fn linear(kappa: f64) -> Self {
        BoundaryProfile {
            terms: (0..4)
                .map(|mu| {
                    let mut powers = [0; 4];
                    powers[mu] = 1;
                    Monomial {
                        coeff: Quaternion::basis(mu) * kappa,
                        powers,
                    }
                })
                .collect(),
        }
    }

    pub fn term(mut self, coeff: Quaternion, powers: [u32; 4]) -> Self {
        self.terms.push(Monomial { coeff, powers });
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        BoundaryProfile {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * s,
                    powers: m.powers,
                })
                .collect(),
        }
    }

    pub fn eval(&self, y: Quaternion) -> Quaternion {
        self.terms
            .iter()
            .map(|m| {
                let mono: f64 = (0..4).map(|mu| y.0[mu].powi(m.powers[mu] as i32)).product();
                m.coeff * mono
            })
            .sum()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|m| m.coeff.im() == Quaternion::ZERO)
    }
}

/// `L_j` at each node of a grid. `real` is set exactly when every
/// imaginary part is zero, in which case the ansatz-case transform applies.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    grid: S3Grid,
    values: Vec<Quaternion>,
    real: bool,
    profile: Option<BoundaryProfile>,
}

impl BoundaryData {
    pub fn new(grid: S3Grid, values: Vec<Quaternion>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(AdhmError::GridMismatch(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        let real = values.iter().all(|q| q.im() == Quaternion::ZERO);
        Ok(BoundaryData {
            grid,
            values,
            real,
            profile: None,
        })
    }

    /// Sample a profile on a grid; the profile is kept so the same `L` can be
    /// resampled on other grids (Monte Carlo discretization, refinement).
    pub fn from_profile(grid: S3Grid, profile: BoundaryProfile) -> Self {
        let values = grid.nodes.iter().map(|y| profile.eval(*y)).collect();
        let mut data = BoundaryData::new(grid, values).expect("one value per node");
        data.profile = Some(profile);
        data
    }

    pub fn from_fn(grid: S3Grid, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        let values = grid.nodes.iter().map(|y| f(*y)).collect();
        BoundaryData::new(grid, values).expect("one value per node")
    }

    pub fn grid(&self) -> &S3Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Quaternion] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn profile(&self) -> Option<&BoundaryProfile> {
        self.profile.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `L ↦ sL`, keeping the profile in step.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = BoundaryData::new(self.grid.clone(), self.values.iter().map(|q| *q * s).collect())
            .expect("same grid");
        out.profile = self.profile.as_ref().map(|p| p.scaled(s));
        out
    }

    /// The same `L` on another grid. Requires a profile.
    pub fn resample(&self, grid: S3Grid) -> Result<Self> {
        match &self.profile {
            Some(p) => Ok(BoundaryData::from_profile(grid, p.clone())),
            None => Err(AdhmError::Input(
                "boundary data without a profile cannot be resampled on another grid".into(),
            )),
        }
    }

    pub(crate) fn require_real(&self, op: &str) -> Result<()> {
        if self.real {
            Ok(())
        } else {
            Err(AdhmError::Domain(format!("{op} needs real-valued boundary data")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::grid::build_grid;

    #[test]
    fn linear_profile_is_identity_times_kappa() {
        let p = BoundaryProfile::linear(0.3);
        let y = Quaternion::new(0.1, -0.5, 0.7, 0.2);
        assert!((p.eval(y) - y * 0.3).norm() < 1e-15);
        assert!(!p.is_real());
    }

    #[test]
    fn real_flag_is_exact() {
        let g = build_grid(3, 3, 3).unwrap();
        let real = BoundaryData::from_profile(
            g.clone(),
            BoundaryProfile::constant(Quaternion::real(0.2)).term(Quaternion::real(0.2), [0, 0, 0, 2]),
        );
        assert!(real.is_real());
        let quat = BoundaryData::from_profile(g, BoundaryProfile::linear(1e-3));
        assert!(!quat.is_real());
    }

    #[test]
    fn resample_and_scale_keep_profile() {
        let g = build_grid(3, 3, 3).unwrap();
        let d = BoundaryData::from_profile(g, BoundaryProfile::linear(2.0));
        let half = d.scaled(0.5);
        let y = half.grid().nodes[5];
        assert!((half.values()[5] - y).norm() < 1e-15);
        let other = half.resample(build_grid(2, 2, 2).unwrap()).unwrap();
        assert_eq!(other.len(), 8);
        let raw = BoundaryData::new(build_grid(2, 2, 2).unwrap(), vec![Quaternion::ONE; 8]).unwrap();
        assert!(raw.resample(build_grid(3, 3, 3).unwrap()).is_err());
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = build_grid(2, 2, 2).unwrap();
        assert!(matches!(
            BoundaryData::new(g, vec![Quaternion::ONE; 3]),
            Err(AdhmError::GridMismatch(_))
        ));
    }
}
