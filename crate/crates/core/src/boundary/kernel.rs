//! The smooth part `P` of the boundary operator `M(z, y) = −y δ(z − y) + P(z, y)`,
//! and the infinite ADHM constraint residual.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::data::BoundaryData;
use super::grid::S3Grid;
use crate::error::{AdhmError, Result};
use crate::quat::{QuatMatrix, Quaternion};

const MAGIC: &[u8; 8] = b"ADHMKERN";

#[derive(Clone, Debug, PartialEq)]
pub enum KernelP {
    /// Delta-only operator; the ansatz case.
    Zero,
    /// `P(y, z) = λ (y + z)`.
    SimpleExample { lambda: f64 },
    /// Node-pair values `P_ij` on a specific grid.
    Dense(QuatMatrix),
}

/// Separable form `P_ij = Σ_r α_r(i) β_r(j)` on a grid.
#[derive(Clone, Debug)]
pub struct LowRank {
    pub alpha: Vec<Vec<Quaternion>>,
    pub beta: Vec<Vec<Quaternion>>,
}

impl LowRank {
    pub fn rank(&self) -> usize {
        self.alpha.len()
    }
}

impl KernelP {
    /// `P_ij` at a node pair of `grid`.
    pub fn entry(&self, grid: &S3Grid, i: usize, j: usize) -> Quaternion {
        match self {
            KernelP::Zero => Quaternion::ZERO,
            KernelP::SimpleExample { lambda } => (grid.nodes[i] + grid.nodes[j]) * *lambda,
            KernelP::Dense(m) => m.get(i, j),
        }
    }

    pub fn check_grid(&self, grid: &S3Grid) -> Result<()> {
        match self {
            KernelP::Dense(m) if m.rows() != grid.len() || m.cols() != grid.len() => {
                Err(AdhmError::GridMismatch(format!(
                    "kernel is {}x{} but the grid has {} nodes",
                    m.rows(),
                    m.cols(),
                    grid.len()
                )))
            }
            _ => Ok(()),
        }
    }

    /// The separable form, for kernels that have one.
    pub fn low_rank(&self, grid: &S3Grid) -> Option<LowRank> {
        match self {
            KernelP::Zero => Some(LowRank {
                alpha: Vec::new(),
                beta: Vec::new(),
            }),
            KernelP::SimpleExample { lambda } => {
                let n = grid.len();
                Some(LowRank {
                    alpha: vec![grid.nodes.iter().map(|y| *y * *lambda).collect(), vec![Quaternion::real(*lambda); n]],
                    beta: vec![vec![Quaternion::ONE; n], grid.nodes.clone()],
                })
            }
            KernelP::Dense(_) => None,
        }
    }

    /// Materialize `P_ij` on a grid.
    pub fn to_dense(&self, grid: &S3Grid) -> QuatMatrix {
        match self {
            KernelP::Dense(m) => m.clone(),
            _ => QuatMatrix::from_fn(grid.len(), grid.len(), |i, j| self.entry(grid, i, j)),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        match self {
            KernelP::Dense(m) => m.is_symmetric(tol),
            _ => true,
        }
    }

    /// Little-endian binary: `"ADHMKERN"`, `u32 N`, `u32` reserved, then
    /// `N·N` entries row-major, four `f64` components each.
    pub fn write_binary(m: &QuatMatrix, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(m.rows() as u32).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for q in m.as_slice() {
            for c in q.0 {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<QuatMatrix> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)
            .map_err(|e| AdhmError::Input(format!("kernel header: {e}")))?;
        if &header[..8] != MAGIC {
            return Err(AdhmError::Input("kernel file: bad magic, expected ADHMKERN".into()));
        }
        let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let mut buf = vec![0u8; n * n * 32];
        r.read_exact(&mut buf)
            .map_err(|e| AdhmError::Input(format!("kernel body for N = {n}: {e}")))?;
        let mut data = buf
            .chunks_exact(32)
            .map(|c| Quaternion(std::array::from_fn(|k| f64::from_le_bytes(c[8 * k..8 * k + 8].try_into().unwrap()))));
        Ok(QuatMatrix::from_fn(n, n, |_, _| data.next().unwrap()))
    }

    pub fn save(m: &QuatMatrix, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        KernelP::write_binary(m, f)
    }

    pub fn load(path: &Path) -> Result<QuatMatrix> {
        KernelP::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// `max_ij |Im R_ij|` with
/// `R_ij = L_i*L_j − y_i*P_ij − P_ij*y_j + Σ_k w_k P_ik*P_kj`.
/// The delta part contributes the real `y*z δ` term and is left out.
pub fn constraint_residual_inf(data: &BoundaryData, p: &KernelP) -> Result<f64> {
    let grid = data.grid();
    p.check_grid(grid)?;
    let n = grid.len();
    let l = data.values();
    let y = &grid.nodes;
    let w = &grid.weights;

    let quadratic: Box<dyn Fn(usize, usize) -> Quaternion + Sync> = match p.low_rank(grid) {
        Some(lr) => {
            // symmetry gives Σ_k w_k P_ik* P_kj = Σ_rs β_r(i)* G_rs β_s(j)
            let r = lr.rank();
            let g: Vec<Vec<Quaternion>> = (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| (0..n).map(|k| lr.alpha[a][k].conj() * lr.alpha[b][k] * w[k]).sum())
                        .collect()
                })
                .collect();
            Box::new(move |i, j| {
                let mut s = Quaternion::ZERO;
                for a in 0..r {
                    for b in 0..r {
                        s += lr.beta[a][i].conj() * g[a][b] * lr.beta[b][j];
                    }
                }
                s
            })
        }
        None => {
            let m = p.to_dense(grid);
            let pp: Vec<Vec<Quaternion>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut row = vec![Quaternion::ZERO; n];
                    for k in 0..n {
                        let a = m.get(k, i).conj() * w[k];
                        for (j, out) in row.iter_mut().enumerate() {
                            *out += a * m.get(k, j);
                        }
                    }
                    row
                })
                .collect();
            Box::new(move |i, j| pp[i][j])
        }
    };

    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in 0..n {
                let pij = p.entry(grid, i, j);
                let r = l[i].conj() * l[j] - y[i].conj() * pij - pij.conj() * y[j] + quadratic(i, j);
                worst = worst.max(r.im().norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}
