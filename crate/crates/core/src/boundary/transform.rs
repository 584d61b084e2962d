//! Boundary-data transforms: the layer potential `φ`, the ansatz-case
//! transform `v(y) = L(y)(y − x)⁻¹`, and the general Nyström transform
//! `v_j(x − y_j) + Σ_i w_i v_i P_ij = −L_j`.

use std::sync::atomic::{AtomicBool, Ordering};

use log::warn;

use super::data::BoundaryData;
use super::kernel::{KernelP, LowRank};
use crate::adhm::{potential_from_solution, AdhmData};
use crate::ansatz::{HarmonicProvider, HarmonicValue};
use crate::error::{AdhmError, Result};
use crate::fields::GaugePotential;
use crate::quat::{QuatLu, QuatMatrix, Quaternion};

/// `φ(x) = offset + Σ_j c_j / |x − y_j|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerPotential {
    pub nodes: Vec<Quaternion>,
    pub densities: Vec<f64>,
    pub offset: f64,
    margin: f64,
}

impl LayerPotential {
    pub fn new(nodes: Vec<Quaternion>, densities: Vec<f64>, offset: f64) -> Self {
        LayerPotential {
            nodes,
            densities,
            offset,
            margin: 0.0,
        }
    }

    /// Warn when evaluating closer than `margin` to S³.
    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

impl HarmonicProvider for LayerPotential {
    fn eval(&self, x: Quaternion) -> Result<HarmonicValue> {
        check_interior(x, self.margin)?;
        let mut out = HarmonicValue {
            value: self.offset,
            gradient: [0.0; 4],
        };
        for (y, c) in self.nodes.iter().zip(&self.densities) {
            let d = x - *y;
            let r2 = d.norm_sqr();
            if r2 == 0.0 {
                return Err(AdhmError::Domain(format!("evaluation at node {y}")));
            }
            out.value += c / r2;
            let k = -2.0 * c / (r2 * r2);
            for mu in 0..4 {
                out.gradient[mu] += k * d.0[mu];
            }
        }
        Ok(out)
    }
}

static NEAR_BOUNDARY_WARNED: AtomicBool = AtomicBool::new(false);

/// Refuse points outside the open ball; warn inside the boundary layer.
pub(crate) fn check_interior(x: Quaternion, margin: f64) -> Result<()> {
    let r = x.norm();
    if !(r < 1.0) {
        return Err(AdhmError::Domain(format!("|x| = {r} is not inside the unit ball")));
    }
    if r > 1.0 - margin && !NEAR_BOUNDARY_WARNED.swap(true, Ordering::Relaxed) {
        warn!(
            "x = {x} is within {margin:.3e} of S3; quadrature of the near-singular integrand is inaccurate \
             (reported once per process)"
        );
    }
    Ok(())
}

/// The harmonic function `φ = 1 + Σ_j w_j L_j² / |x − y_j|²` of real boundary data.
pub fn layer_potential(data: &BoundaryData) -> Result<LayerPotential> {
    data.require_real("phi_boundary")?;
    let g = data.grid();
    Ok(LayerPotential::new(
        g.nodes.clone(),
        data.values().iter().zip(&g.weights).map(|(l, w)| w * l.re() * l.re()).collect(),
        1.0,
    )
    .with_margin(g.margin()))
}

/// `(φ(x), ∇φ(x))` for real boundary data.
pub fn phi_boundary(data: &BoundaryData, x: Quaternion) -> Result<HarmonicValue> {
    layer_potential(data)?.eval(x)
}

/// Ansatz-case transform: `v_j = L_j (y_j − x)⁻¹`, `∂_μ v_j = v_j e_μ (y_j − x)⁻¹`,
/// combined with the grid weights.
pub fn ansatz_transform(data: &BoundaryData, x: Quaternion) -> Result<GaugePotential> {
    data.require_real("ansatz_transform")?;
    let grid = data.grid();
    check_interior(x, grid.margin())?;
    let mut v = Vec::with_capacity(grid.len());
    let mut dv: [Vec<Quaternion>; 4] = Default::default();
    for (l, y) in data.values().iter().zip(&grid.nodes) {
        let g = (*y - x).inv().map_err(|_| AdhmError::Singular {
            condition: f64::INFINITY,
            at: Some(x),
        })?;
        let vj = *l * g;
        for (mu, d) in dv.iter_mut().enumerate() {
            d.push(vj * Quaternion::basis(mu) * g);
        }
        v.push(vj);
    }
    Ok(potential_from_solution(&v, &dv, Some(&grid.weights)))
}

enum Solver {
    LowRank(LowRank),
    /// The Nyström system as finite ADHM data with `L̃_j = √w_j L_j` and
    /// `M̃_ij = −y_j δ_ij + √(w_i w_j) P_ij`.
    Dense(AdhmData),
}

/// The general transform for fixed `(L, P)`; reusable across evaluation points.
pub struct BoundaryTransform {
    data: BoundaryData,
    solver: Solver,
}

impl BoundaryTransform {
    pub fn new(data: &BoundaryData, p: &KernelP) -> Result<Self> {
        let grid = data.grid();
        p.check_grid(grid)?;
        if !p.is_symmetric(1e-12) {
            return Err(AdhmError::Input("kernel P must be symmetric".into()));
        }
        let solver = match p.low_rank(grid) {
            Some(lr) => Solver::LowRank(lr),
            None => {
                let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
                let pd = p.to_dense(grid);
                let m = QuatMatrix::from_fn(grid.len(), grid.len(), |i, j| {
                    let s = pd.get(i, j) * (sw[i] * sw[j]);
                    if i == j {
                        s - grid.nodes[i]
                    } else {
                        s
                    }
                });
                let l = data.values().iter().zip(&sw).map(|(l, s)| *l * *s).collect();
                Solver::Dense(AdhmData::new(l, m)?)
            }
        };
        Ok(BoundaryTransform {
            data: data.clone(),
            solver,
        })
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    /// `v` and `∂_μ v` at the grid nodes (unweighted).
    pub fn solve(&self, x: Quaternion) -> Result<(Vec<Quaternion>, [Vec<Quaternion>; 4])> {
        let grid = self.data.grid();
        check_interior(x, grid.margin())?;
        match &self.solver {
            Solver::LowRank(lr) => solve_low_rank(&self.data, lr, x),
            Solver::Dense(adhm) => {
                let (mut v, mut dv) = adhm.solve_with_derivatives(x)?;
                let inv_sw: Vec<f64> = grid.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
                for (q, s) in v.iter_mut().zip(&inv_sw) {
                    *q = *q * *s;
                }
                for d in dv.iter_mut() {
                    for (q, s) in d.iter_mut().zip(&inv_sw) {
                        *q = *q * *s;
                    }
                }
                Ok((v, dv))
            }
        }
    }

    pub fn potential(&self, x: Quaternion) -> Result<GaugePotential> {
        let (v, dv) = self.solve(x)?;
        Ok(potential_from_solution(&v, &dv, Some(&self.data.grid().weights)))
    }

    /// `φ = 1 + ⟨v, v⟩`.
    pub fn phi(&self, x: Quaternion) -> Result<f64> {
        let (v, _) = self.solve(x)?;
        let w = &self.data.grid().weights;
        Ok(1.0 + v.iter().zip(w).map(|(q, w)| w * q.norm_sqr()).sum::<f64>())
    }
}

/// With `P_ij = Σ_r α_r(i) β_r(j)` the Nyström system collapses to an r×r
/// quaternion system for `c_r = Σ_i w_i v_i α_r(i)`:
/// `v_j = −(L_j + Σ_r c_r β_r(j)) (x − y_j)⁻¹` and `c (I + K) = −R`.
fn solve_low_rank(
    data: &BoundaryData,
    lr: &LowRank,
    x: Quaternion,
) -> Result<(Vec<Quaternion>, [Vec<Quaternion>; 4])> {
    let grid = data.grid();
    let n = grid.len();
    let r = lr.rank();
    let g: Vec<Quaternion> = grid
        .nodes
        .iter()
        .map(|y| {
            (x - *y).inv().map_err(|_| AdhmError::Singular {
                condition: f64::INFINITY,
                at: Some(x),
            })
        })
        .collect::<Result<_>>()?;
    let w = &grid.weights;

    let lu = if r > 0 {
        let k = QuatMatrix::from_fn(r, r, |a, b| {
            let s: Quaternion = (0..n).map(|j| lr.beta[a][j] * g[j] * lr.alpha[b][j] * w[j]).sum();
            if a == b {
                s + Quaternion::ONE
            } else {
                s
            }
        });
        Some(QuatLu::new(&k).map_err(|e| e.at(x))?)
    } else {
        None
    };

    let apply = |rhs: &dyn Fn(usize) -> Quaternion| -> Vec<Quaternion> {
        let c = match &lu {
            Some(lu) => {
                let rr: Vec<Quaternion> = (0..r)
                    .map(|s| (0..n).map(|j| rhs(j) * g[j] * lr.alpha[s][j] * w[j]).sum())
                    .collect();
                lu.solve_right(&rr)
            }
            None => Vec::new(),
        };
        (0..n)
            .map(|j| {
                let mut t = rhs(j);
                for (cr, beta) in c.iter().zip(&lr.beta) {
                    t += *cr * beta[j];
                }
                -(t * g[j])
            })
            .collect()
    };

    let l = data.values();
    let v = apply(&|j| l[j]);
    let dv = std::array::from_fn(|mu| {
        let e = Quaternion::basis(mu);
        apply(&|j| v[j] * e)
    });
    Ok((v, dv))
}

/// One-shot general transform. Build a [`BoundaryTransform`] when evaluating
/// at many points with a dense kernel.
pub fn general_transform(data: &BoundaryData, p: &KernelP, x: Quaternion) -> Result<GaugePotential> {
    BoundaryTransform::new(data, p)?.potential(x)
}
