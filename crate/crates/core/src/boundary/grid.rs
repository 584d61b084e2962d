//! Quadrature on the unit 3-sphere.
//!
//! Hyperspherical coordinates `y = (sinψ sinθ cosϕ, sinψ sinθ sinϕ, sinψ cosθ, cosψ)`
//! with measure `sin²ψ sinθ dψ dθ dϕ`. The product rule is Gaussian in `cosψ`
//! against the weight `√(1−t²)` (the `sin²ψ` factor), Gauss–Legendre in `cosθ`,
//! and the trapezoid rule in the periodic angle `ϕ`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::quat::Quaternion;

/// Volume of the unit 3-sphere, `2π²`.
pub const S3_VOLUME: f64 = 2.0 * PI * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum GridScheme {
    Product { n_psi: usize, n_theta: usize, n_phi: usize },
    MonteCarlo { n: usize, seed: u64 },
    /// Nodes and weights supplied explicitly.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct S3Grid {
    pub nodes: Vec<Quaternion>,
    pub weights: Vec<f64>,
    pub scheme: GridScheme,
}

impl S3Grid {
    pub fn product(n_psi: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        build_grid(n_psi, n_theta, n_phi)
    }

    pub fn monte_carlo(n: usize, seed: u64) -> Result<Self> {
        mc_grid(n, seed)
    }

    /// A grid from explicit nodes and weights. Nodes are normalized onto S³.
    pub fn explicit(nodes: Vec<Quaternion>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(AdhmError::GridMismatch(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(AdhmError::Input(format!("grid weights must be positive, got {w}")));
        }
        let nodes = nodes
            .into_iter()
            .map(|y| {
                let n = y.norm();
                if n == 0.0 {
                    Err(AdhmError::Input("zero grid node".into()))
                } else {
                    Ok(y / n)
                }
            })
            .collect::<Result<_>>()?;
        Ok(S3Grid {
            nodes,
            weights,
            scheme: GridScheme::Explicit,
        })
    }

    /// Rebuild a grid from its scheme tag.
    pub fn from_scheme(scheme: GridScheme) -> Result<Self> {
        match scheme {
            GridScheme::Product { n_psi, n_theta, n_phi } => build_grid(n_psi, n_theta, n_phi),
            GridScheme::MonteCarlo { n, seed } => mc_grid(n, seed),
            GridScheme::Explicit => Err(AdhmError::Input(
                "an explicit grid cannot be rebuilt without its nodes".into(),
            )),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_j w_j f(y_j)`.
    pub fn integrate(&self, f: impl Fn(Quaternion) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| w * f(*y)).sum()
    }

    /// `Σ_j w_j f(y_j)` for quaternion-valued integrands.
    pub fn integrate_quat(&self, f: impl Fn(Quaternion) -> Quaternion) -> Quaternion {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| f(*y) * *w).sum()
    }

    /// Typical node separation, `(2π² / N)^{1/3}`.
    pub fn spacing(&self) -> f64 {
        (S3_VOLUME / self.len().max(1) as f64).cbrt()
    }

    /// Distance from S³ inside which evaluation is reported as inaccurate.
    pub fn margin(&self) -> f64 {
        0.3 * self.spacing()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss rule for `∫_{−1}^{1} f(t) √(1−t²) dt` (Chebyshev polynomials of the second kind).
pub fn gauss_chebyshev_u(n: usize) -> (Vec<f64>, Vec<f64>) {
    (1..=n)
        .map(|k| {
            let a = k as f64 * PI / (n as f64 + 1.0);
            (a.cos(), PI / (n as f64 + 1.0) * a.sin().powi(2))
        })
        .unzip()
}

/// Hyperspherical product rule with `n_psi · n_theta · n_phi` nodes.
pub fn build_grid(n_psi: usize, n_theta: usize, n_phi: usize) -> Result<S3Grid> {
    if n_psi < 2 || n_theta < 2 || n_phi < 2 {
        return Err(AdhmError::Input(format!(
            "grid counts must be at least 2, got ({n_psi}, {n_theta}, {n_phi})"
        )));
    }
    let (tp, wp) = gauss_chebyshev_u(n_psi);
    let (tt, wt) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_psi * n_theta * n_phi);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (cpsi, wpsi) in tp.iter().zip(&wp) {
        let spsi = (1.0 - cpsi * cpsi).sqrt();
        for (cth, wth) in tt.iter().zip(&wt) {
            let sth = (1.0 - cth * cth).sqrt();
            for k in 0..n_phi {
                let ph = dphi * k as f64;
                nodes.push(Quaternion::new(
                    spsi * sth * ph.cos(),
                    spsi * sth * ph.sin(),
                    spsi * cth,
                    *cpsi,
                ));
                weights.push(wpsi * wth * dphi);
            }
        }
    }
    Ok(S3Grid {
        nodes,
        weights,
        scheme: GridScheme::Product { n_psi, n_theta, n_phi },
    })
}

/// `n` uniform points on S³ (normalized 4D Gaussians) with equal weights `2π²/n`.
pub fn mc_grid(n: usize, seed: u64) -> Result<S3Grid> {
    if n == 0 {
        return Err(AdhmError::Input("Monte Carlo grid needs at least one node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(n);
    while nodes.len() < n {
        let q = Quaternion(std::array::from_fn(|_| StandardNormal.sample(&mut rng)));
        let r = q.norm();
        if r > 1e-12 {
            nodes.push(q / r);
        }
    }
    Ok(S3Grid {
        nodes,
        weights: vec![S3_VOLUME / n as f64; n],
        scheme: GridScheme::MonteCarlo { n, seed },
    })
}
