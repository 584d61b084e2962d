//! The T-tensor, harmonic functions with analytic gradients, and the
//! 't Hooft–Corrigan–Fairlie–Wilczek potential `A_μ = ½ T_μν ∂_ν log φ`.

use crate::error::{AdhmError, Result};
use crate::fields::GaugePotential;
use crate::quat::Quaternion;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// `T_μν` defined by `e*_μ e_ν = δ_μν + T_μν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTensor([[Quaternion; 4]; 4]);

impl TTensor {
    pub fn get(&self, mu: usize, nu: usize) -> Quaternion {
        self.0[mu][nu]
    }

    /// `T_μν ∂_ν f` contracted against a gradient.
    pub fn contract(&self, mu: usize, grad: &[f64; 4]) -> Quaternion {
        (0..4).map(|nu| self.0[mu][nu] * grad[nu]).sum()
    }
}

pub fn t_tensor() -> TTensor {
    let mut t = [[Quaternion::ZERO; 4]; 4];
    for (mu, row) in t.iter_mut().enumerate() {
        for (nu, entry) in row.iter_mut().enumerate() {
            let mut p = Quaternion::basis(mu).conj() * Quaternion::basis(nu);
            if mu == nu {
                p -= Quaternion::ONE;
            }
            *entry = p;
        }
    }
    TTensor(t)
}

/// Value and gradient of a real function at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HarmonicValue {
    pub value: f64,
    pub gradient: [f64; 4],
}

impl std::ops::Add for HarmonicValue {
    type Output = HarmonicValue;
    fn add(self, o: HarmonicValue) -> HarmonicValue {
        let mut g = self.gradient;
        for (a, b) in g.iter_mut().zip(o.gradient) {
            *a += b;
        }
        HarmonicValue {
            value: self.value + o.value,
            gradient: g,
        }
    }
}

/// A harmonic function on (part of) ℝ⁴ that reports its exact gradient.
pub trait HarmonicProvider: Send + Sync {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue>;

    fn value(&self, x: Quaternion) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }
}

impl<T: HarmonicProvider + ?Sized> HarmonicProvider for &T {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        (**self).eval(x)
    }
}

impl<T: HarmonicProvider + ?Sized> HarmonicProvider for Arc<T> {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        (**self).eval(x)
    }
}

impl<T: HarmonicProvider + ?Sized> HarmonicProvider for Box<T> {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        (**self).eval(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantPhi(pub f64);

impl HarmonicProvider for ConstantPhi {
    fn eval(&self, _x: Quaternion) -> Result<HarmonicValue> {
        Ok(HarmonicValue {
            value: self.0,
            gradient: [0.0; 4],
        })
    }
}

/// `φ(x) = offset + Σ λ_a² / |x − x⁽ᵃ⁾|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSum {
    pub points: Vec<Quaternion>,
    pub weights: Vec<f64>,
    #[serde(default = "one")]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

pub fn pole_sum_phi(points: Vec<Quaternion>, weights: Vec<f64>) -> Result<PoleSum> {
    PoleSum::new(points, weights)
}

impl PoleSum {
    pub fn new(points: Vec<Quaternion>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(AdhmError::Input(format!(
                "{} poles but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(AdhmError::Domain(format!("pole weights must be positive, got {w}")));
        }
        Ok(PoleSum {
            points,
            weights,
            offset: 1.0,
        })
    }

    /// Same poles without the constant term, for adding onto another provider.
    pub fn without_offset(mut self) -> Self {
        self.offset = 0.0;
        self
    }
}

impl HarmonicProvider for PoleSum {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        let mut out = HarmonicValue {
            value: self.offset,
            gradient: [0.0; 4],
        };
        for (p, lam) in self.points.iter().zip(&self.weights) {
            let d = x - *p;
            let r2 = d.norm_sqr();
            if r2 == 0.0 {
                return Err(AdhmError::Domain(format!("evaluation at pole {p}")));
            }
            let l2 = lam * lam;
            out.value += l2 / r2;
            let c = -2.0 * l2 / (r2 * r2);
            for mu in 0..4 {
                out.gradient[mu] += c * d.0[mu];
            }
        }
        Ok(out)
    }
}

/// Pointwise sum of providers; used for boundary layer plus interior poles.
#[derive(Clone, Default)]
pub struct ProviderSum(pub Vec<Arc<dyn HarmonicProvider>>);

impl ProviderSum {
    pub fn new() -> Self {
        ProviderSum(Vec::new())
    }

    pub fn with(mut self, p: impl HarmonicProvider + 'static) -> Self {
        self.0.push(Arc::new(p));
        self
    }
}

impl HarmonicProvider for ProviderSum {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        self.0
            .iter()
            .try_fold(HarmonicValue::default(), |acc, p| Ok(acc + p.eval(x)?))
    }
}

/// `A_μ = ½ T_μν ∂_νφ / φ`.
pub fn ansatz_potential(phi: &dyn HarmonicProvider, x: Quaternion) -> Result<GaugePotential> {
    let hv = phi.eval(x)?;
    if !(hv.value > 0.0) {
        return Err(AdhmError::Domain(format!(
            "ansatz needs φ > 0, got φ = {} at {x}",
            hv.value
        )));
    }
    let t = t_tensor();
    let mut a = [Quaternion::ZERO; 4];
    for (mu, am) in a.iter_mut().enumerate() {
        *am = t.contract(mu, &hv.gradient) * (0.5 / hv.value);
    }
    Ok(GaugePotential(a))
}

/// Central-difference gradient, for checking analytic gradients.
pub fn gradient_fd(phi: &dyn HarmonicProvider, x: Quaternion, h: f64) -> Result<[f64; 4]> {
    let mut g = [0.0; 4];
    for (mu, gm) in g.iter_mut().enumerate() {
        let mut p = x;
        let mut m = x;
        p.0[mu] += h;
        m.0[mu] -= h;
        *gm = (phi.value(p)? - phi.value(m)?) / (2.0 * h);
    }
    Ok(g)
}

/// Five-point-per-axis second-order Laplacian.
pub fn laplacian_fd(phi: &dyn HarmonicProvider, x: Quaternion, h: f64) -> Result<f64> {
    let c = phi.value(x)?;
    let mut acc = 0.0;
    for mu in 0..4 {
        let mut p = x;
        let mut m = x;
        p.0[mu] += h;
        m.0[mu] -= h;
        acc += phi.value(p)? + phi.value(m)? - 2.0 * c;
    }
    Ok(acc / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{curvature, sd_residual};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn t_tensor_entries() {
        let t = t_tensor();
        assert_eq!(t.get(3, 3), Quaternion::ZERO);
        assert_eq!(t.get(0, 1), Quaternion::basis(2));
        for mu in 0..4 {
            for nu in 0..4 {
                assert_eq!(t.get(mu, nu) + t.get(nu, mu), Quaternion::ZERO);
                assert_eq!(t.get(mu, nu).re(), 0.0);
                let d = if mu == nu { Quaternion::ONE } else { Quaternion::ZERO };
                assert_eq!(
                    d + t.get(mu, nu),
                    Quaternion::basis(mu).conj() * Quaternion::basis(nu)
                );
            }
        }
    }

    #[test]
    fn pole_sum_examples() {
        let empty = PoleSum::new(vec![], vec![]).unwrap();
        let v = empty.eval(Quaternion::new(0.3, 0.1, 0.0, 0.2)).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.gradient, [0.0; 4]);

        let single = PoleSum::new(vec![Quaternion::ZERO], vec![1.0]).unwrap();
        assert_eq!(single.value(Quaternion::ONE).unwrap(), 2.0);
        assert!(matches!(single.eval(Quaternion::ZERO), Err(AdhmError::Domain(_))));
        assert!(PoleSum::new(vec![Quaternion::ZERO], vec![0.0]).is_err());
    }

    #[test]
    fn pole_sum_is_harmonic_with_exact_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = PoleSum::new(
            vec![Quaternion::new(0.2, 0.0, -0.1, 0.3), Quaternion::new(-0.4, 0.3, 0.1, 0.0)],
            vec![0.5, 0.8],
        )
        .unwrap();
        for _ in 0..20 {
            let x = Quaternion::new(
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.9..0.9),
            );
            if phi.points.iter().any(|p| (x - *p).norm() < 0.3) {
                continue;
            }
            // scale: sum of absolute second differences along the axes
            let h = 1e-3;
            let c = phi.value(x).unwrap();
            let scale: f64 = (0..4)
                .map(|mu| {
                    let (mut p, mut m) = (x, x);
                    p.0[mu] += h;
                    m.0[mu] -= h;
                    (phi.value(p).unwrap() + phi.value(m).unwrap() - 2.0 * c).abs() / (h * h)
                })
                .sum();
            let lap = laplacian_fd(&phi, x, h).unwrap();
            assert!(lap.abs() < 1e-4 * scale, "laplacian {lap} scale {scale}");
            let g = phi.eval(x).unwrap().gradient;
            let gf = gradient_fd(&phi, x, 1e-4).unwrap();
            for mu in 0..4 {
                assert!((g[mu] - gf[mu]).abs() < 1e-6 * (1.0 + g[mu].abs()));
            }
        }
    }

    #[test]
    fn constant_phi_gives_zero_potential() {
        let a = ansatz_potential(&ConstantPhi(3.0), Quaternion::new(0.1, 0.2, 0.3, 0.4)).unwrap();
        assert_eq!(a, GaugePotential::ZERO);
        assert!(ansatz_potential(&ConstantPhi(-1.0), Quaternion::ZERO).is_err());
    }

    #[test]
    fn rescaling_phi_leaves_potential_unchanged() {
        let phi = PoleSum::new(vec![Quaternion::new(0.1, 0.0, 0.0, 0.2)], vec![0.7]).unwrap();
        let mut scaled = phi.clone();
        scaled.offset *= 3.5;
        scaled.weights.iter_mut().for_each(|w| *w *= 3.5f64.sqrt());
        let x = Quaternion::new(0.4, -0.2, 0.1, 0.0);
        let a = ansatz_potential(&phi, x).unwrap();
        let b = ansatz_potential(&scaled, x).unwrap();
        assert!(a.distance(&b) < 1e-14);
    }

    #[test]
    fn single_pole_ansatz_is_self_dual() {
        let phi = PoleSum::new(vec![Quaternion::ZERO], vec![1.0]).unwrap();
        let x = Quaternion::new(0.3, -0.2, 0.4, 0.1);
        let field = |y| ansatz_potential(&phi, y);
        let r1 = sd_residual(&curvature(field, x, 2e-4).unwrap());
        let r2 = sd_residual(&curvature(field, x, 1e-4).unwrap());
        assert!(r2 < 1e-6, "residual {r2}");
        // pure truncation error: second order in h
        assert!((r1 / r2 - 4.0).abs() < 0.2, "ratio {}", r1 / r2);
        let f = curvature(field, x, 1e-3).unwrap();
        assert!(f.max_real_part() < 1e-9);
    }
}
