//! Robin boundary data `2π² L² = φ + ∂_nφ − 1` and a harmonic provider that
//! stays analytic up to S³.

use super::data::BoundaryData;
use super::grid::{S3Grid, S3_VOLUME};
use crate::ansatz::{HarmonicProvider, HarmonicValue};
use crate::error::{AdhmError, Result};
use crate::quat::Quaternion;

/// `(φ(y) + y·∇φ(y) − 1) / (2π²)` at a unit quaternion `y`.
pub fn robin_data(phi: &dyn HarmonicProvider, y: Quaternion) -> Result<f64> {
    if (y.norm() - 1.0).abs() > 1e-12 {
        return Err(AdhmError::Domain(format!("robin data needs |y| = 1, got |y| = {}", y.norm())));
    }
    let h = phi.eval(y)?;
    let dn: f64 = (0..4).map(|mu| y.0[mu] * h.gradient[mu]).sum();
    Ok((h.value + dn - 1.0) / S3_VOLUME)
}

/// The layer potential `1 + Σ_j c_j / |x − y_j|²` expanded in degree-n
/// harmonic polynomials, `1/|x − y|² = Σ_n |x|^n C¹_n(x̂·y)`, and truncated.
/// Each term is a harmonic polynomial, so the provider is analytic on the
/// closed ball and can be evaluated on S³ itself.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicExpansion {
    nodes: Vec<Quaternion>,
    densities: Vec<f64>,
    degree: usize,
}

impl HarmonicExpansion {
    /// Expansion of `φ = 1 + ∫ f(y)/|x − y|²` from nodal values of `f` on a grid.
    pub fn new(grid: &S3Grid, f: &[f64], degree: usize) -> Result<Self> {
        if f.len() != grid.len() {
            return Err(AdhmError::GridMismatch(format!(
                "{} density values for {} nodes",
                f.len(),
                grid.len()
            )));
        }
        Ok(HarmonicExpansion {
            nodes: grid.nodes.clone(),
            densities: f.iter().zip(&grid.weights).map(|(f, w)| f * w).collect(),
            degree,
        })
    }

    /// Expansion of the layer potential of real boundary data (`f = L²`).
    pub fn from_boundary(data: &BoundaryData, degree: usize) -> Result<Self> {
        data.require_real("HarmonicExpansion")?;
        let f: Vec<f64> = data.values().iter().map(|l| l.re() * l.re()).collect();
        HarmonicExpansion::new(data.grid(), &f, degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl HarmonicProvider for HarmonicExpansion {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        let r2 = x.norm_sqr();
        let mut out = HarmonicValue {
            value: 1.0,
            gradient: [0.0; 4],
        };
        for (y, c) in self.nodes.iter().zip(&self.densities) {
            // p_{n+1} = 2(x·y) p_n − |x|² p_{n−1}, p_0 = 1, p_1 = 2 x·y
            let xy = x.dot(y);
            let (mut p0, mut g0) = (1.0, [0.0; 4]);
            let mut sum = p0;
            let mut gsum = g0;
            if self.degree >= 1 {
                let mut p1 = 2.0 * xy;
                let mut g1: [f64; 4] = std::array::from_fn(|mu| 2.0 * y.0[mu]);
                sum += p1;
                for mu in 0..4 {
                    gsum[mu] += g1[mu];
                }
                for _ in 2..=self.degree {
                    let p2 = 2.0 * xy * p1 - r2 * p0;
                    let g2: [f64; 4] =
                        std::array::from_fn(|mu| 2.0 * y.0[mu] * p1 + 2.0 * xy * g1[mu] - 2.0 * x.0[mu] * p0 - r2 * g0[mu]);
                    sum += p2;
                    for mu in 0..4 {
                        gsum[mu] += g2[mu];
                    }
                    (p0, g0, p1, g1) = (p1, g1, p2, g2);
                }
            }
            out.value += c * sum;
            for mu in 0..4 {
                out.gradient[mu] += c * gsum[mu];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{laplacian_fd, ConstantPhi, PoleSum};
    use crate::boundary::grid::build_grid;
    use crate::boundary::transform::layer_potential;

    #[test]
    fn constant_field_gives_zero() {
        assert_eq!(robin_data(&ConstantPhi(1.0), Quaternion::ONE).unwrap(), 0.0);
        let l0: f64 = 0.1;
        let phi = ConstantPhi(1.0 + S3_VOLUME * l0 * l0);
        let y = Quaternion::new(0.5, 0.5, 0.5, 0.5);
        assert!((robin_data(&phi, y).unwrap() - l0 * l0).abs() < 1e-15);
    }

    #[test]
    fn interior_point_rejected() {
        assert!(robin_data(&ConstantPhi(1.0), Quaternion::real(0.5)).is_err());
    }

    #[test]
    fn interior_poles_give_smooth_negative_robin_data() {
        // φ + ∂_nφ − 1 = λ²(|p|² − 1)/|y − p|⁴ for a pole at p inside the ball
        let p = Quaternion::new(0.1, -0.2, 0.3, 0.1);
        let lam: f64 = 0.7;
        let phi = PoleSum::new(vec![p], vec![lam]).unwrap();
        let g = build_grid(4, 4, 4).unwrap();
        for y in &g.nodes {
            let got = robin_data(&phi, *y).unwrap();
            let expect = lam * lam * (p.norm_sqr() - 1.0) / (*y - p).norm_sqr().powi(2) / S3_VOLUME;
            assert!((got - expect).abs() < 1e-14);
            assert!(got < 0.0);
        }
    }

    #[test]
    fn expansion_matches_layer_potential_inside() {
        let g = build_grid(10, 10, 10).unwrap();
        let d = BoundaryData::from_fn(g, |y| Quaternion::real(0.2 * (1.0 + y.re() * y.re())));
        let exact = layer_potential(&d).unwrap();
        let series = HarmonicExpansion::from_boundary(&d, 60).unwrap();
        let x = Quaternion::new(0.1, -0.2, 0.15, 0.3);
        let a = exact.eval(x).unwrap();
        let b = series.eval(x).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        for mu in 0..4 {
            assert!((a.gradient[mu] - b.gradient[mu]).abs() < 1e-11);
        }
    }

    #[test]
    fn expansion_is_harmonic() {
        let g = build_grid(4, 4, 4).unwrap();
        let f: Vec<f64> = g.nodes.iter().map(|y| 1.0 + y.0[0] * y.0[2]).collect();
        // central second differences are exact on cubics, so only rounding remains
        let series = HarmonicExpansion::new(&g, &f, 3).unwrap();
        let x = Quaternion::new(0.3, 0.2, -0.4, 0.1);
        let lap = laplacian_fd(&series, x, 1e-3).unwrap();
        assert!(lap.abs() < 1e-6, "{lap}");
        // higher degrees: the truncation error falls as h²
        let series = HarmonicExpansion::new(&g, &f, 8).unwrap();
        let coarse = laplacian_fd(&series, x, 2e-2).unwrap();
        let fine = laplacian_fd(&series, x, 1e-2).unwrap();
        assert!((coarse / fine - 4.0).abs() < 0.2, "{coarse} {fine}");
    }

    #[test]
    fn band_limited_round_trip() {
        // L² = 0.04 (1 + ½y₁y₂ + ½y₄³) has degree 3; the product rule integrates
        // L² times degree-3 harmonics exactly on (6, 6, 8)
        let g = build_grid(6, 6, 8).unwrap();
        let l2 = |y: Quaternion| 0.04 * (1.0 + 0.5 * y.0[0] * y.0[1] + 0.5 * y.0[3].powi(3));
        let d = BoundaryData::from_fn(g.clone(), |y| Quaternion::real(l2(y).sqrt()));
        let series = HarmonicExpansion::from_boundary(&d, 3).unwrap();
        for y in &g.nodes {
            let got = robin_data(&series, *y).unwrap();
            assert!((got - l2(*y)).abs() < 1e-13, "{got} vs {}", l2(*y));
        }
    }
}
