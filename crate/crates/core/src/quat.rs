//! Quaternions in the basis `e_μ = (e₁, e₂, e₃, 1)` with `e₁e₂ = −e₃`,
//! quaternionic vectors and matrices, and right-solves through the faithful
//! 2×2 complex embedding.
//!
//! Components are stored in the order `(q₁, q₂, q₃, q₄)` where `q₄` is the
//! real part, so `q = q_μ e_μ`. The multiplication table is
//! `e_a e_b = −δ_ab − ε_abc e_c`, which is the opposite handedness to the
//! usual `ij = k`.

use crate::error::{AdhmError, Result};
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub type C64 = Complex<f64>;

/// Systems whose embedded 1-norm condition number exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion([0.0; 4]);
    pub const ONE: Quaternion = Quaternion([0.0, 0.0, 0.0, 1.0]);

    pub const fn new(q1: f64, q2: f64, q3: f64, q4: f64) -> Self {
        Quaternion([q1, q2, q3, q4])
    }

    pub const fn real(r: f64) -> Self {
        Quaternion([0.0, 0.0, 0.0, r])
    }

    pub const fn imag(v: [f64; 3]) -> Self {
        Quaternion([v[0], v[1], v[2], 0.0])
    }

    /// Basis element `e_μ` for a zero-based index: 0,1,2 → e₁,e₂,e₃ and 3 → 1.
    pub fn basis(mu: usize) -> Self {
        let mut q = [0.0; 4];
        q[mu] = 1.0;
        Quaternion(q)
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.0[3]
    }

    #[inline]
    pub fn vec(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    /// Imaginary part as a quaternion (real part dropped).
    #[inline]
    pub fn im(&self) -> Quaternion {
        Quaternion([self.0[0], self.0[1], self.0[2], 0.0])
    }

    #[inline]
    pub fn conj(&self) -> Quaternion {
        Quaternion([-self.0[0], -self.0[1], -self.0[2], self.0[3]])
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// `q* / |q|²`.
    pub fn inv(&self) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(AdhmError::Domain(format!("cannot invert quaternion {self}")));
        }
        Ok(self.conj() / n2)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `ρ(q) = q₄·I + q_a·(iσ_a)`.
    pub fn to_complex(&self) -> [[C64; 2]; 2] {
        let [q1, q2, q3, q4] = self.0;
        [
            [C64::new(q4, q3), C64::new(q2, q1)],
            [C64::new(-q2, q1), C64::new(q4, -q3)],
        ]
    }

    /// Inverse of the embedding, read off the first row of a 2×2 block.
    pub fn from_complex_row(a: C64, b: C64) -> Quaternion {
        Quaternion([b.im, b.re, a.im, a.re])
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quaternion{:?}", self.0)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a:.6}, {b:.6}, {c:.6}, {d:.6})")
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self.0, o.0);
        Quaternion([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self.0, o.0);
        Quaternion([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        let a = self.0;
        Quaternion([-a[0], -a[1], -a[2], -a[3]])
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    /// `(p₄ + p)(q₄ + q) = p₄q₄ − p·q + p₄q + q₄p − p×q`.
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        let [p1, p2, p3, p4] = self.0;
        let [q1, q2, q3, q4] = o.0;
        Quaternion([
            p4 * q1 + q4 * p1 - (p2 * q3 - p3 * q2),
            p4 * q2 + q4 * p2 - (p3 * q1 - p1 * q3),
            p4 * q3 + q4 * p3 - (p1 * q2 - p2 * q1),
            p4 * q4 - p1 * q1 - p2 * q2 - p3 * q3,
        ])
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        let a = self.0;
        Quaternion([a[0] * s, a[1] * s, a[2] * s, a[3] * s])
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        self * (1.0 / s)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

pub fn qinv(q: Quaternion) -> Result<Quaternion> {
    q.inv()
}

/// Dense row-major quaternion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QuatMatrix {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QuatMatrix { rows, cols, data }
    }

    pub fn diagonal(diag: &[Quaternion]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Quaternion::ZERO })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(AdhmError::Input("ragged quaternion matrix".into()));
        }
        Ok(QuatMatrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.data[i * self.cols + j] = q;
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Quaternion>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entrywise transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Quaternionic conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &QuatMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    /// Row vector times matrix, `(vA)_j = Σ_i v_i A_ij`.
    pub fn left_mul(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(v.len(), self.rows, "row vector length mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| v[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).norm() <= tol))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == Quaternion::ZERO))
    }

    /// Frobenius-style norm over all quaternion components.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt()
    }

    /// The 2N×2N complex matrix obtained by replacing every entry with its 2×2 embedding.
    pub fn embed(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let b = self.get(i, j).to_complex();
                for r in 0..2 {
                    for c in 0..2 {
                        out[(2 * i + r, 2 * j + c)] = b[r][c];
                    }
                }
            }
        }
        out
    }
}

/// Partial-pivot LU of the complex embedding of a square quaternion matrix,
/// arranged for row-vector solves `v A = −b`.
pub struct QuatLu {
    n: usize,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl QuatLu {
    pub fn new(a: &QuatMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(AdhmError::Input(format!(
                "solve needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        // Row-vector system r·E = β becomes Eᵀ·rᵀ = βᵀ.
        let et = a.embed().transpose();
        let norm1 = one_norm(&et);
        let lu = et.lu();
        let condition = match lu.try_inverse() {
            Some(inv) => norm1 * one_norm(&inv),
            None => f64::INFINITY,
        };
        if !(condition.is_finite() && condition <= CONDITION_LIMIT) {
            return Err(AdhmError::Singular { condition, at: None });
        }
        Ok(QuatLu { n: a.rows, lu, condition })
    }

    /// 1-norm condition number of the embedded system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Returns `v` with `v A = −b`.
    pub fn solve_right(&self, b: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(b.len(), self.n, "right-hand side length mismatch");
        let rhs = DVector::from_iterator(
            2 * self.n,
            b.iter().flat_map(|q| {
                let m = q.to_complex();
                [-m[0][0], -m[0][1]]
            }),
        );
        let r = self
            .lu
            .solve(&rhs)
            .expect("factorization was checked to be invertible");
        (0..self.n)
            .map(|i| Quaternion::from_complex_row(r[2 * i], r[2 * i + 1]))
            .collect()
    }
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve `v A = −b` for the row vector `v`.
pub fn solve_right(a: &QuatMatrix, b: &[Quaternion]) -> Result<Vec<Quaternion>> {
    Ok(QuatLu::new(a)?.solve_right(b))
}

/// Largest component-norm of `v A + b`; the residual of [`solve_right`].
pub fn right_residual(a: &QuatMatrix, v: &[Quaternion], b: &[Quaternion]) -> f64 {
    a.left_mul(v)
        .iter()
        .zip(b)
        .map(|(x, y)| (*x + *y).norm())
        .fold(0.0, f64::max)
}
