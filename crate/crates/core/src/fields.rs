//! Finite-difference curvature, the self-duality residual, the action
//! density, and lattice sampling. Every transform in the crate is checked
//! through these functions.

use crate::error::{AdhmError, Result};
use crate::quat::Quaternion;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Lower bound on ‖F‖ in the relative self-duality residual.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// A gauge potential value `A_μ`, μ = 1..4, each an imaginary quaternion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaugePotential(pub [Quaternion; 4]);

impl GaugePotential {
    pub const ZERO: GaugePotential = GaugePotential([Quaternion::ZERO; 4]);

    pub fn max_real_part(&self) -> f64 {
        self.0.iter().map(|a| a.re().abs()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &GaugePotential) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `e_a` component (a = 0,1,2) of every `A_μ`.
    pub fn component(&self, a: usize) -> [f64; 4] {
        [self.0[0].0[a], self.0[1].0[a], self.0[2].0[a], self.0[3].0[a]]
    }
}

/// `F_μν` as an antisymmetric 4×4 array of imaginary quaternions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curvature(pub [[Quaternion; 4]; 4]);

impl Curvature {
    pub const ZERO: Curvature = Curvature([[Quaternion::ZERO; 4]; 4]);

    pub fn get(&self, mu: usize, nu: usize) -> Quaternion {
        self.0[mu][nu]
    }

    /// Hodge dual `½ ε_αβμν F_αβ`.
    pub fn dual(&self) -> Curvature {
        let mut out = Curvature::ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = Quaternion::ZERO;
                for a in 0..4 {
                    for b in 0..4 {
                        let s = levi_civita([a, b, mu, nu]);
                        if s != 0 {
                            acc += self.0[a][b] * (0.5 * s as f64);
                        }
                    }
                }
                out.0[mu][nu] = acc;
            }
        }
        out
    }

    /// Norm over the six independent components μ < ν.
    pub fn norm(&self) -> f64 {
        self.pairs().map(|(m, n)| self.0[m][n].norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_real_part(&self) -> f64 {
        self.pairs().map(|(m, n)| self.0[m][n].re().abs()).fold(0.0, f64::max)
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..4).flat_map(|m| (m + 1..4).map(move |n| (m, n)))
    }
}

impl std::ops::Sub for Curvature {
    type Output = Curvature;
    fn sub(self, o: Curvature) -> Curvature {
        let mut out = self;
        for mu in 0..4 {
            for nu in 0..4 {
                out.0[mu][nu] = self.0[mu][nu] - o.0[mu][nu];
            }
        }
        out
    }
}

/// Sign of a permutation of (0,1,2,3), or 0 if an index repeats.
pub fn levi_civita(idx: [usize; 4]) -> i32 {
    let mut sign = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn shifted(x: Quaternion, mu: usize, h: f64) -> Quaternion {
    let mut y = x;
    y.0[mu] += h;
    y
}

/// `F_μν = ∂_μA_ν − ∂_νA_μ + [A_μ, A_ν]` with second-order central
/// differences for the derivatives and the exact commutator at `x`.
pub fn curvature<F>(field: F, x: Quaternion, h: f64) -> Result<Curvature>
where
    F: Fn(Quaternion) -> Result<GaugePotential>,
{
    if !(h > 0.0) {
        return Err(AdhmError::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let center = field(x)?;
    // d[mu][nu] = ∂_mu A_nu
    let mut d = [[Quaternion::ZERO; 4]; 4];
    for mu in 0..4 {
        let plus = field(shifted(x, mu, h))?;
        let minus = field(shifted(x, mu, -h))?;
        for nu in 0..4 {
            d[mu][nu] = (plus.0[nu] - minus.0[nu]) / (2.0 * h);
        }
    }
    let a = center.0;
    let mut f = Curvature::ZERO;
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let v = d[mu][nu] - d[nu][mu] + a[mu] * a[nu] - a[nu] * a[mu];
            f.0[mu][nu] = v;
            f.0[nu][mu] = -v;
        }
    }
    Ok(f)
}

/// `‖½εF − F‖ / max(‖F‖, floor)`; 0 for self-dual fields, 2 for anti-self-dual ones.
pub fn sd_residual(f: &Curvature) -> f64 {
    (f.dual() - *f).norm() / f.norm().max(RESIDUAL_FLOOR)
}

/// `Σ_{μ<ν} |F_μν|²`.
pub fn action_density(f: &Curvature) -> f64 {
    let n = f.norm();
    n * n
}

/// Curvature and both scalars at one point.
pub fn probe<F>(field: F, x: Quaternion, h: f64) -> Result<(Curvature, f64, f64)>
where
    F: Fn(Quaternion) -> Result<GaugePotential>,
{
    let f = curvature(field, x, h)?;
    Ok((f, sd_residual(&f), action_density(&f)))
}

/// Hypercubic lattice `n⁴` on `[−extent, extent]⁴`, restricted to the ball `|x| ≤ extent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub points_per_axis: usize,
    pub extent: f64,
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice {
            points_per_axis: 9,
            extent: 0.7,
        }
    }
}

impl Lattice {
    pub fn new(points_per_axis: usize, extent: f64) -> Result<Self> {
        if points_per_axis == 0 {
            return Err(AdhmError::Input("lattice needs at least one point per axis".into()));
        }
        if !(extent >= 0.0 && extent < 1.0) {
            return Err(AdhmError::Input(format!(
                "lattice extent must lie in [0, 1), got {extent}"
            )));
        }
        Ok(Lattice {
            points_per_axis,
            extent,
        })
    }

    pub fn axis(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        if n == 1 {
            return vec![0.0];
        }
        (0..n)
            .map(|i| -self.extent + 2.0 * self.extent * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<Quaternion> {
        let ax = self.axis();
        let r2 = self.extent * self.extent * (1.0 + 1e-12);
        let mut out = Vec::new();
        for &a in &ax {
            for &b in &ax {
                for &c in &ax {
                    for &d in &ax {
                        let q = Quaternion::new(a, b, c, d);
                        if q.norm_sqr() <= r2 {
                            out.push(q);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: Quaternion,
    pub potential: GaugePotential,
    pub sd_residual: f64,
    pub action_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub x: Quaternion,
    pub reason: String,
}

/// Field values on a set of interior points, with the points that had to be skipped.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub points: Vec<SamplePoint>,
    pub skipped: Vec<SkippedPoint>,
}

impl FieldSample {
    pub fn max_sd_residual(&self) -> f64 {
        self.points.iter().map(|p| p.sd_residual).fold(0.0, f64::max)
    }

    pub fn max_action_density(&self) -> f64 {
        self.points.iter().map(|p| p.action_density).fold(0.0, f64::max)
    }
}

/// Sampling controls: FD step and how far to stay from declared singular points.
#[derive(Clone, Debug)]
pub struct SampleOptions {
    pub h: f64,
    pub singular_points: Vec<Quaternion>,
    /// Minimum distance to any singular point; defaults to `10·h`.
    pub margin: Option<f64>,
}

impl SampleOptions {
    pub fn new(h: f64) -> Self {
        SampleOptions {
            h,
            singular_points: Vec::new(),
            margin: None,
        }
    }

    pub fn avoiding(mut self, points: Vec<Quaternion>) -> Self {
        self.singular_points = points;
        self
    }
}

/// Evaluate potential, curvature and scalars at every point, in parallel,
/// keeping the input order. Points near declared singularities or where the
/// evaluator fails are recorded as skipped.
pub fn sample_field<F>(field: F, points: &[Quaternion], opts: &SampleOptions) -> FieldSample
where
    F: Fn(Quaternion) -> Result<GaugePotential> + Sync,
{
    let margin = opts.margin.unwrap_or(10.0 * opts.h);
    let results: Vec<std::result::Result<SamplePoint, SkippedPoint>> = points
        .par_iter()
        .map(|&x| {
            if let Some(p) = opts.singular_points.iter().find(|p| (x - **p).norm() < margin) {
                return Err(SkippedPoint {
                    x,
                    reason: format!("within {margin} of singular point {p}"),
                });
            }
            let eval = || -> Result<SamplePoint> {
                let potential = field(x)?;
                let (_, sd, s) = probe(&field, x, opts.h)?;
                Ok(SamplePoint {
                    x,
                    potential,
                    sd_residual: sd,
                    action_density: s,
                })
            };
            eval().map_err(|e| SkippedPoint {
                x,
                reason: e.to_string(),
            })
        })
        .collect();
    let mut sample = FieldSample::default();
    for r in results {
        match r {
            Ok(p) => sample.points.push(p),
            Err(s) => sample.skipped.push(s),
        }
    }
    sample
}
