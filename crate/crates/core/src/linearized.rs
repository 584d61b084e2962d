//! Linearized theory for small quaternion-valued boundary data: the
//! C-operators, the quaternion harmonic `Φ`, the first-order kernel `P`, and
//! the leading `O(ε²)` gauge potential.

use std::sync::Arc;

use rayon::prelude::*;

use crate::ansatz::{t_tensor, HarmonicProvider};
use crate::boundary::transform::check_interior;
use crate::boundary::{BoundaryData, BoundaryTransform, KernelP, LayerPotential};
use crate::error::{AdhmError, Result};
use crate::fields::GaugePotential;
use crate::quat::{QuatMatrix, Quaternion};

/// Node pairs closer than this are refused by [`p_first_order`].
pub const MIN_NODE_SEPARATION: f64 = 1e-6;

/// The `e_a` component (`a = 1, 2, 3`) of `½ T_μν ∂_νφ`, for each `μ`.
pub fn c_operator(phi: &dyn HarmonicProvider, a: usize, x: Quaternion) -> Result<[f64; 4]> {
    if !(1..=3).contains(&a) {
        return Err(AdhmError::Input(format!("C-operator index must be 1, 2 or 3, got {a}")));
    }
    let grad = phi.eval(x)?.gradient;
    let t = t_tensor();
    Ok(std::array::from_fn(|mu| 0.5 * t.contract(mu, &grad).0[a - 1]))
}

/// `Φ = Φ_μ e_μ` with each component a harmonic provider, stored as `(Φ₁, Φ₂, Φ₃, Φ₄)`.
#[derive(Clone)]
pub struct QuaternionHarmonic(pub [Arc<dyn HarmonicProvider>; 4]);

impl QuaternionHarmonic {
    pub fn component(&self, mu: usize) -> &dyn HarmonicProvider {
        self.0[mu].as_ref()
    }

    /// `Φ(x)` and `∂_νΦ(x)` for `ν = 1..4`.
    pub fn eval(&self, x: Quaternion) -> Result<(Quaternion, [Quaternion; 4])> {
        let mut value = Quaternion::ZERO;
        let mut grad = [Quaternion::ZERO; 4];
        for mu in 0..4 {
            let h = self.0[mu].eval(x)?;
            value.0[mu] = h.value;
            for nu in 0..4 {
                grad[nu].0[mu] = h.gradient[nu];
            }
        }
        Ok((value, grad))
    }
}

/// `Φ(x) = 1 + Σ_j w_j L_j² / |x − y_j|²` with `L_j²` the quaternion square,
/// as four real layer potentials.
pub fn capital_phi_field(data: &BoundaryData) -> QuaternionHarmonic {
    let grid = data.grid();
    let squares: Vec<Quaternion> = data
        .values()
        .iter()
        .zip(&grid.weights)
        .map(|(l, w)| *l * *l * *w)
        .collect();
    QuaternionHarmonic(std::array::from_fn(|mu| {
        let layer = LayerPotential::new(
            grid.nodes.clone(),
            squares.iter().map(|q| q.0[mu]).collect(),
            if mu == 3 { 1.0 } else { 0.0 },
        )
        .with_margin(grid.margin());
        Arc::new(layer) as Arc<dyn HarmonicProvider>
    }))
}

/// `Φ(x)` and its gradient for boundary data.
pub fn capital_phi(data: &BoundaryData, x: Quaternion) -> Result<(Quaternion, [Quaternion; 4])> {
    capital_phi_field(data).eval(x)
}

/// First-order kernel `P_ij = ½ (y_i* − y_j*)⁻¹ (L_i*L_j − L_j*L_i)`, `P_ii = 0`.
pub fn p_first_order(data: &BoundaryData) -> Result<KernelP> {
    let grid = data.grid();
    let y = &grid.nodes;
    let l = data.values();
    let n = grid.len();
    let rows: Vec<Vec<Quaternion>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(Quaternion::ZERO);
                    }
                    let d = y[i].conj() - y[j].conj();
                    if d.norm() < MIN_NODE_SEPARATION {
                        return Err(AdhmError::Domain(format!(
                            "nodes {i} and {j} are closer than {MIN_NODE_SEPARATION}; the diagonal limit of P is direction-dependent"
                        )));
                    }
                    let c = l[i].conj() * l[j] - l[j].conj() * l[i];
                    Ok(d.inv()? * c * 0.5)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(KernelP::Dense(QuatMatrix::from_fn(n, n, |i, j| rows[i][j])))
}

/// Three abelian potentials `𝒜^a_μ`, stored as `[a − 1][μ]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearizedField(pub [[f64; 4]; 3]);

impl LinearizedField {
    /// `A_μ = 𝒜^a_μ e_a`.
    pub fn to_potential(&self) -> GaugePotential {
        GaugePotential(std::array::from_fn(|mu| {
            Quaternion::imag([self.0[0][mu], self.0[1][mu], self.0[2][mu]])
        }))
    }

    /// `𝒜^a` alone, embedded along `e_a` so that commutators vanish.
    pub fn abelian(&self, a: usize) -> GaugePotential {
        GaugePotential(std::array::from_fn(|mu| Quaternion::basis(a - 1) * self.0[a - 1][mu]))
    }
}

/// `𝒜^a_μ = C^a_μ[Φ₄] + ε_abc C^b_μ[Φ_c]` for a given quaternion harmonic.
pub fn linearized_from(phi: &QuaternionHarmonic, x: Quaternion) -> Result<LinearizedField> {
    let c = |a: usize, comp: usize| c_operator(phi.component(comp), a, x);
    let mut out = [[0.0; 4]; 3];
    for a in 1..=3 {
        let (b, cc) = (a % 3 + 1, (a + 1) % 3 + 1);
        // ε_abc C^b[Φ_c] over the two cyclic-ordered terms
        let base = c(a, 3)?;
        let plus = c(b, cc - 1)?;
        let minus = c(cc, b - 1)?;
        for mu in 0..4 {
            out[a - 1][mu] = base[mu] + plus[mu] - minus[mu];
        }
    }
    Ok(LinearizedField(out))
}

/// The linearized potential of boundary data, from `Φ` of [`capital_phi_field`].
pub fn linearized_potential(data: &BoundaryData, x: Quaternion) -> Result<LinearizedField> {
    linearized_from(&capital_phi_field(data), x)
}

/// The `O(ε²)` term computed directly from `v = L(y − x)⁻¹`:
/// `½ Σ_j w_j [v_j ∂_μv_j* − ∂_μv_j v_j*]`, without the `1/φ` factor.
/// It equals `½ Σ_j w_j |g_j|² L_j (e_μ* g_j* − g_j e_μ) L_j*` with
/// `g_j = (y_j − x)⁻¹`, which rotates by `L_j` rather than multiplying by `L_j²`.
pub fn leading_order_potential(data: &BoundaryData, x: Quaternion) -> Result<GaugePotential> {
    let grid = data.grid();
    check_interior(x, grid.margin())?;
    let mut a = [Quaternion::ZERO; 4];
    for ((l, y), w) in data.values().iter().zip(&grid.nodes).zip(&grid.weights) {
        let g = (*y - x).inv()?;
        let v = *l * g;
        for (mu, am) in a.iter_mut().enumerate() {
            let dv = v * Quaternion::basis(mu) * g;
            let t = v * dv.conj();
            *am += (t - t.conj()) * (0.5 * w);
        }
    }
    Ok(GaugePotential(a))
}

/// Deviation of the linearized and leading-order potentials from the full
/// transform with the first-order kernel, at `εL` and `(ε/2)L`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct OrderReport {
    pub eps: [f64; 2],
    /// `max_x ‖A_full − A_linearized‖` at each ε.
    pub linearized_error: [f64; 2],
    /// `max_x ‖A_full − A_leading‖` at each ε.
    pub leading_error: [f64; 2],
}

impl OrderReport {
    pub fn linearized_ratio(&self) -> f64 {
        self.linearized_error[0] / self.linearized_error[1]
    }

    pub fn leading_ratio(&self) -> f64 {
        self.leading_error[0] / self.leading_error[1]
    }
}

/// Halve ε once and compare against the full transform at each point.
/// An `O(ε⁴)` remainder shows up as a ratio near 16.
pub fn order_test(data: &BoundaryData, eps: f64, points: &[Quaternion]) -> Result<OrderReport> {
    let mut lin = [0.0; 2];
    let mut lead = [0.0; 2];
    for (k, e) in [eps, 0.5 * eps].into_iter().enumerate() {
        let d = data.scaled(e);
        let full = BoundaryTransform::new(&d, &p_first_order(&d)?)?;
        let phi = capital_phi_field(&d);
        let errs = points
            .par_iter()
            .map(|&x| {
                let a = full.potential(x)?;
                Ok((
                    a.distance(&linearized_from(&phi, x)?.to_potential()),
                    a.distance(&leading_order_potential(&d, x)?),
                ))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        lin[k] = errs.iter().map(|e| e.0).fold(0.0, f64::max);
        lead[k] = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    }
    Ok(OrderReport {
        eps: [eps, 0.5 * eps],
        linearized_error: lin,
        leading_error: lead,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{ansatz_potential, ConstantPhi, PoleSum};
    use crate::boundary::{build_grid, constraint_residual_inf, layer_potential, BoundaryProfile};
    use crate::fields::{curvature, sd_residual};

    fn quaternion_profile() -> BoundaryProfile {
        BoundaryProfile::constant(Quaternion::real(1.0))
            .term(Quaternion::basis(0) * 0.6, [0, 1, 0, 0])
            .term(Quaternion::basis(2) * 0.4, [0, 0, 0, 1])
            .term(Quaternion::basis(1) * 0.3, [1, 0, 1, 0])
    }

    #[test]
    fn c_operator_basics() {
        let x = Quaternion::new(0.1, 0.2, 0.3, 0.0);
        assert_eq!(c_operator(&ConstantPhi(3.0), 2, x).unwrap(), [0.0; 4]);
        assert!(c_operator(&ConstantPhi(3.0), 4, x).is_err());
        let p1 = PoleSum::new(vec![Quaternion::real(2.0)], vec![1.0]).unwrap().without_offset();
        let p2 = PoleSum::new(vec![Quaternion::new(0.0, 2.0, 0.0, 0.0)], vec![0.5]).unwrap().without_offset();
        let sum = crate::ansatz::ProviderSum::new().with(p1.clone()).with(p2.clone());
        for a in 1..=3 {
            let s = c_operator(&sum, a, x).unwrap();
            let c1 = c_operator(&p1, a, x).unwrap();
            let c2 = c_operator(&p2, a, x).unwrap();
            for mu in 0..4 {
                assert!((s[mu] - c1[mu] - c2[mu]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn c_operator_gives_self_dual_abelian_field() {
        let phi = PoleSum::new(vec![Quaternion::new(0.0, 0.0, 2.0, 0.5)], vec![1.0]).unwrap();
        for a in 1..=3 {
            let field = |x| {
                let c = c_operator(&phi, a, x)?;
                Ok(GaugePotential(std::array::from_fn(|mu| Quaternion::basis(a - 1) * c[mu])))
            };
            let f = curvature(field, Quaternion::new(0.1, -0.2, 0.3, 0.1), 1e-3).unwrap();
            assert!(sd_residual(&f) < 1e-5, "a = {a}: {}", sd_residual(&f));
        }
    }

    #[test]
    fn real_l_phi_is_phi_boundary() {
        let g = build_grid(6, 6, 6).unwrap();
        let d = BoundaryData::from_fn(g, |y| Quaternion::real(0.2 * (1.0 + y.re() * y.re())));
        let x = Quaternion::new(0.1, 0.2, -0.3, 0.1);
        let (phi, _) = capital_phi(&d, x).unwrap();
        let expect = layer_potential(&d).unwrap().value(x).unwrap();
        assert!(phi.im().norm() < 1e-15);
        assert!((phi.re() - expect).abs() < 1e-14);
    }

    #[test]
    fn identity_l_phi_at_origin_is_real() {
        let g = build_grid(6, 6, 6).unwrap();
        let d = BoundaryData::from_profile(g, BoundaryProfile::linear(0.2));
        let (phi, _) = capital_phi(&d, Quaternion::ZERO).unwrap();
        assert!(phi.im().norm() < 1e-14);
        let zero = BoundaryData::from_fn(build_grid(3, 3, 3).unwrap(), |_| Quaternion::ZERO);
        assert_eq!(capital_phi(&zero, Quaternion::ZERO).unwrap().0, Quaternion::ONE);
    }

    #[test]
    fn p_first_order_properties() {
        let g = build_grid(4, 4, 4).unwrap();
        let real = BoundaryData::from_fn(g.clone(), |y| Quaternion::real(1.0 + y.re()));
        match p_first_order(&real).unwrap() {
            KernelP::Dense(m) => assert!(m.as_slice().iter().all(|q| *q == Quaternion::ZERO)),
            other => panic!("unexpected {other:?}"),
        }
        let eps = 0.05;
        let d = BoundaryData::from_profile(g.clone(), BoundaryProfile::linear(eps));
        let KernelP::Dense(m) = p_first_order(&d).unwrap() else { unreachable!() };
        assert!(m.is_symmetric(0.0));
        let (i, j) = (2, 17);
        let (yi, yj) = (g.nodes[i], g.nodes[j]);
        let expect = (yi.conj() - yj.conj()).inv().unwrap() * (yi.conj() * yj - yj.conj() * yi) * (0.5 * eps * eps);
        assert!((m.get(i, j) - expect).norm() < 1e-15);
    }

    #[test]
    fn p_first_order_refuses_coincident_nodes() {
        let y = Quaternion::new(0.0, 0.6, 0.0, 0.8);
        let g = crate::boundary::S3Grid::explicit(vec![y, y, Quaternion::ONE], vec![1.0; 3]).unwrap();
        let d = BoundaryData::from_profile(g, BoundaryProfile::linear(0.1));
        assert!(p_first_order(&d).is_err());
    }

    #[test]
    fn p_first_order_residual_scales_as_eps4() {
        let g = build_grid(4, 4, 4).unwrap();
        let base = BoundaryData::from_profile(g, quaternion_profile());
        let r = |eps: f64| {
            let d = base.scaled(eps);
            constraint_residual_inf(&d, &p_first_order(&d).unwrap()).unwrap()
        };
        let ratio = r(0.02) / r(0.01);
        assert!((ratio - 16.0).abs() < 0.5, "{ratio}");
        // zeroth order kernel leaves an O(ε²) residual
        let d = base.scaled(0.02);
        assert!(constraint_residual_inf(&d, &KernelP::Zero).unwrap() > 100.0 * r(0.02));
    }

    #[test]
    fn real_l_reduces_to_linearized_ansatz() {
        let g = build_grid(6, 6, 6).unwrap();
        let d = BoundaryData::from_fn(g, |y| Quaternion::real(0.5 * (1.0 + y.0[3] * y.0[3])));
        let x = Quaternion::new(0.1, -0.2, 0.3, 0.05);
        let lin = linearized_potential(&d, x).unwrap();
        // ansatz potential at small scale δ, divided by δ², linearizes in L²
        let delta = 1e-4;
        let small = layer_potential(&d.scaled(delta)).unwrap();
        let a = ansatz_potential(&small, x).unwrap();
        let fd = GaugePotential(a.0.map(|q| q * (1.0 / (delta * delta))));
        assert!(lin.to_potential().distance(&fd) < 1e-6, "{}", lin.to_potential().distance(&fd));
        // one harmonic function determines all three components
        let phi4 = layer_potential(&d).unwrap();
        for a in 1..=3 {
            let c = c_operator(&phi4, a, x).unwrap();
            for mu in 0..4 {
                assert!((lin.0[a - 1][mu] - c[mu]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn each_component_is_abelian_self_dual() {
        let g = build_grid(5, 5, 5).unwrap();
        let d = BoundaryData::from_profile(g, quaternion_profile().scaled(0.1));
        let x = Quaternion::new(0.2, 0.1, -0.1, 0.2);
        for a in 1..=3 {
            let field = |x| Ok(linearized_potential(&d, x)?.abelian(a));
            let f = curvature(field, x, 1e-4).unwrap();
            assert!(sd_residual(&f) < 1e-5, "a = {a}: {}", sd_residual(&f));
        }
    }

    /// `φ = ½ xᵀSx` for a symmetric traceless `S`.
    struct Quadratic([[f64; 4]; 4]);

    impl HarmonicProvider for Quadratic {
        fn eval(&self, x: Quaternion) -> Result<crate::ansatz::HarmonicValue> {
            let g: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * x.0[j]).sum());
            let value = 0.5 * (0..4).map(|i| g[i] * x.0[i]).sum::<f64>();
            Ok(crate::ansatz::HarmonicValue { value, gradient: g })
        }
    }

    fn quadratic_basis() -> Vec<[[f64; 4]; 4]> {
        let mut out = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let mut s = [[0.0; 4]; 4];
                s[i][j] = 1.0;
                s[j][i] = 1.0;
                out.push(s);
            }
        }
        for k in 0..3 {
            let mut s = [[0.0; 4]; 4];
            s[k][k] = 1.0;
            s[k + 1][k + 1] = -1.0;
            out.push(s);
        }
        out
    }

    fn combine(coeffs: &[f64]) -> Quadratic {
        let mut s = [[0.0; 4]; 4];
        for (c, b) in coeffs.iter().zip(quadratic_basis()) {
            for i in 0..4 {
                for j in 0..4 {
                    s[i][j] += c * b[i][j];
                }
            }
        }
        Quadratic(s)
    }

    /// The six `μ < ν` entries of the abelian curvature of `𝒜^a` built from `Φ`.
    fn abelian_curvature(phi: &QuaternionHarmonic, a: usize, x: Quaternion) -> [f64; 6] {
        let f = curvature(|x| Ok(linearized_from(phi, x)?.abelian(a)), x, 1e-2).unwrap();
        let mut out = [0.0; 6];
        let mut k = 0;
        for mu in 0..4 {
            for nu in mu + 1..4 {
                out[k] = f.get(mu, nu).0[a - 1];
                k += 1;
            }
        }
        out
    }

    #[test]
    fn two_components_can_be_prescribed() {
        // targets: arbitrary constant self-dual curvatures f¹, f². Set Φ₂ = Φ₃ = 0,
        // choose Φ₄ with curl C¹[Φ₄] = f¹, then Φ₁ with curl C³[Φ₁] = f² − curl C²[Φ₄].
        use nalgebra::{DMatrix, DVector};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x = Quaternion::new(0.1, 0.2, -0.15, 0.25);
        let zero: Arc<dyn HarmonicProvider> = Arc::new(ConstantPhi(0.0));
        let only = |slot: usize, q: Quadratic| {
            let mut c: [Arc<dyn HarmonicProvider>; 4] = std::array::from_fn(|_| zero.clone());
            c[slot] = Arc::new(q);
            QuaternionHarmonic(c)
        };
        let self_dual_target = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut f = crate::fields::Curvature::ZERO;
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    let v = Quaternion::real(rng.random_range(-1.0..1.0));
                    f.0[mu][nu] = v;
                    f.0[nu][mu] = -v;
                }
            }
            let dual = f.dual();
            let mut out = [0.0; 6];
            let mut k = 0;
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    out[k] = 0.5 * (f.get(mu, nu).re() + dual.get(mu, nu).re());
                    k += 1;
                }
            }
            out
        };
        // map from quadratic coefficients to the curvature of 𝒜^a, for Φ placed in `slot`
        let map = |a: usize, slot: usize| {
            let cols: Vec<[f64; 6]> = quadratic_basis()
                .into_iter()
                .map(|s| abelian_curvature(&only(slot, Quadratic(s)), a, x))
                .collect();
            DMatrix::from_fn(6, cols.len(), |r, c| cols[c][r])
        };
        let solve = |m: DMatrix<f64>, rhs: [f64; 6]| -> Vec<f64> {
            // minimum-norm solution through lightly regularized normal equations;
            // the maps are rank deficient with exact zero columns
            let gram = &m * m.transpose() + DMatrix::identity(6, 6) * 1e-13;
            let y = gram.cholesky().unwrap().solve(&DVector::from_column_slice(&rhs));
            (m.transpose() * y).as_slice().to_vec()
        };

        let f1 = self_dual_target(&mut rng);
        let f2 = self_dual_target(&mut rng);
        let phi4 = solve(map(1, 3), f1);
        let c2 = abelian_curvature(&only(3, combine(&phi4)), 2, x);
        let rest: [f64; 6] = std::array::from_fn(|k| f2[k] - c2[k]);
        let phi1 = solve(map(2, 0), rest);

        let phi = QuaternionHarmonic([
            Arc::new(combine(&phi1)),
            zero.clone(),
            zero.clone(),
            Arc::new(combine(&phi4)),
        ]);
        let got1 = abelian_curvature(&phi, 1, x);
        let got2 = abelian_curvature(&phi, 2, x);
        for k in 0..6 {
            assert!((got1[k] - f1[k]).abs() < 1e-9, "𝒜¹ entry {k}: {} vs {}", got1[k], f1[k]);
            assert!((got2[k] - f2[k]).abs() < 1e-9, "𝒜² entry {k}: {} vs {}", got2[k], f2[k]);
        }
    }

    #[test]
    fn leading_order_matches_ansatz_for_real_l() {
        let g = build_grid(6, 6, 6).unwrap();
        let d = BoundaryData::from_fn(g, |y| Quaternion::real(0.01 * (1.0 + y.0[0])));
        let x = Quaternion::new(0.2, -0.1, 0.0, 0.3);
        let lead = leading_order_potential(&d, x).unwrap();
        let lin = linearized_potential(&d, x).unwrap().to_potential();
        assert!(lead.distance(&lin) < 1e-15 + 1e-12 * lin.norm());
    }

    #[test]
    fn leading_order_remainder_is_fourth_order() {
        let g = build_grid(4, 4, 4).unwrap();
        let d = BoundaryData::from_profile(g, quaternion_profile());
        let pts = [Quaternion::new(0.1, 0.2, -0.1, 0.05), Quaternion::new(-0.2, 0.0, 0.1, -0.1)];
        let r = order_test(&d, 0.02, &pts).unwrap();
        assert!((r.leading_ratio() - 16.0).abs() < 1.0, "{r:?}");
    }
}
