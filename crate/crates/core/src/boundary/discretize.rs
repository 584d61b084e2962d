//! Monte Carlo discretization of real boundary data into finite 't Hooft data.

use std::f64::consts::PI;

use super::data::BoundaryData;
use super::grid::mc_grid;
use super::transform::{layer_potential, LayerPotential};
use crate::adhm::AdhmData;
use crate::error::Result;
use crate::quat::Quaternion;

/// `N` uniform points `x⁽ⁱ⁾` on S³, `λ_i = π√(2/N) L(x⁽ⁱ⁾)`, `M = diag(−x⁽ⁱ⁾)`.
///
/// `L` is resampled from the data's profile. A non-positive `L(x⁽ⁱ⁾)` is kept
/// as is: only `λ_i²` enters the field, and the data stay real and diagonal.
pub fn discretize_thooft(data: &BoundaryData, n: usize, seed: u64) -> Result<AdhmData> {
    data.require_real("discretize_thooft")?;
    let sample = data.resample(mc_grid(n, seed)?)?;
    let scale = PI * (2.0 / n as f64).sqrt();
    AdhmData::diagonal(
        sample.values().iter().map(|l| *l * scale).collect(),
        sample.grid().nodes.iter().map(|y| -*y).collect(),
    )
}

/// `φ^(N)(x) = 1 + Σ_i λ_i² / |x − x⁽ⁱ⁾|²` for the same sample.
pub fn mc_phi(data: &BoundaryData, n: usize, seed: u64) -> Result<LayerPotential> {
    data.require_real("mc_phi")?;
    layer_potential(&data.resample(mc_grid(n, seed)?)?)
}

/// `φ^(N)` from already-discretized 't Hooft data.
pub fn thooft_phi(adhm: &AdhmData) -> LayerPotential {
    LayerPotential::new(
        adhm.singular_points(),
        adhm.l().iter().map(Quaternion::norm_sqr).collect(),
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::HarmonicProvider;
    use crate::boundary::data::BoundaryProfile;
    use crate::boundary::grid::{build_grid, S3_VOLUME};

    fn profile() -> BoundaryProfile {
        BoundaryProfile::constant(Quaternion::real(0.2)).term(Quaternion::real(0.2), [0, 0, 0, 2])
    }

    #[test]
    fn single_point_weight() {
        let d = BoundaryData::from_profile(build_grid(2, 2, 2).unwrap(), BoundaryProfile::constant(Quaternion::ONE));
        let a = discretize_thooft(&d, 1, 3).unwrap();
        assert!((a.l()[0].re() - PI * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.constraint_residual(), 0.0);
    }

    #[test]
    fn weights_sum_to_mean_square() {
        let d = BoundaryData::from_profile(build_grid(2, 2, 2).unwrap(), profile());
        let n = 400;
        let a = discretize_thooft(&d, n, 9).unwrap();
        let sum: f64 = a.l().iter().map(|l| l.norm_sqr()).sum();
        let nodes = a.singular_points();
        let mean: f64 = nodes.iter().map(|y| profile().eval(*y).norm_sqr()).sum::<f64>() / n as f64;
        assert!((sum - S3_VOLUME * mean).abs() < 1e-12);
        assert_eq!(a.constraint_residual(), 0.0);
    }

    #[test]
    fn mc_phi_equals_thooft_phi() {
        let d = BoundaryData::from_profile(build_grid(2, 2, 2).unwrap(), profile());
        let x = Quaternion::new(0.1, 0.2, 0.0, -0.3);
        let a = mc_phi(&d, 300, 5).unwrap().eval(x).unwrap();
        let b = thooft_phi(&discretize_thooft(&d, 300, 5).unwrap()).eval(x).unwrap();
        assert!((a.value - b.value).abs() < 1e-13);
    }

    #[test]
    fn quaternion_data_refused() {
        let d = BoundaryData::from_profile(build_grid(2, 2, 2).unwrap(), BoundaryProfile::linear(0.1));
        assert!(discretize_thooft(&d, 10, 1).is_err());
    }
}
