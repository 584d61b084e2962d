//! The finite ADHM transform: data `(L, M)`, the reality constraint, the
//! linear equation `L + v(M + x) = 0`, and the gauge potential built from `v`.

use crate::error::{AdhmError, Result};
use crate::fields::GaugePotential;
use crate::quat::{QuatLu, QuatMatrix, Quaternion, CONDITION_LIMIT};

/// `M` storage. Diagonal data (the 't Hooft case and Monte Carlo samples)
/// never materializes the N×N matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum AdhmMatrix {
    Dense(QuatMatrix),
    Diagonal(Vec<Quaternion>),
}

impl AdhmMatrix {
    pub fn len(&self) -> usize {
        match self {
            AdhmMatrix::Dense(m) => m.rows(),
            AdhmMatrix::Diagonal(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        match self {
            AdhmMatrix::Dense(m) => m.get(i, j),
            AdhmMatrix::Diagonal(d) if i == j => d[i],
            AdhmMatrix::Diagonal(_) => Quaternion::ZERO,
        }
    }

    pub fn to_dense(&self) -> QuatMatrix {
        match self {
            AdhmMatrix::Dense(m) => m.clone(),
            AdhmMatrix::Diagonal(d) => QuatMatrix::diagonal(d),
        }
    }
}

/// ADHM data: an N-row vector `L` and a symmetric N×N quaternion matrix `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdhmData {
    l: Vec<Quaternion>,
    m: AdhmMatrix,
}

impl AdhmData {
    /// Validates shape and symmetry. Diagonal input is stored compactly.
    pub fn new(l: Vec<Quaternion>, m: QuatMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() != l.len() {
            return Err(AdhmError::Input(format!(
                "L has length {} but M is {}x{}",
                l.len(),
                m.rows(),
                m.cols()
            )));
        }
        let tol = 1e-12 * (1.0 + m.norm());
        if !m.is_symmetric(tol) {
            return Err(AdhmError::Input("M must be symmetric (M_ab = M_ba)".into()));
        }
        if m.is_diagonal() {
            let d = (0..m.rows()).map(|i| m.get(i, i)).collect();
            return Ok(AdhmData {
                l,
                m: AdhmMatrix::Diagonal(d),
            });
        }
        Ok(AdhmData {
            l,
            m: AdhmMatrix::Dense(m),
        })
    }

    pub fn diagonal(l: Vec<Quaternion>, diag: Vec<Quaternion>) -> Result<Self> {
        if l.len() != diag.len() {
            return Err(AdhmError::Input(format!(
                "L has length {} but diag(M) has length {}",
                l.len(),
                diag.len()
            )));
        }
        Ok(AdhmData {
            l,
            m: AdhmMatrix::Diagonal(diag),
        })
    }

    pub fn rank(&self) -> usize {
        self.l.len()
    }

    pub fn l(&self) -> &[Quaternion] {
        &self.l
    }

    pub fn m(&self) -> &AdhmMatrix {
        &self.m
    }

    /// Points where `M + x` is singular when `M` is diagonal: `x = −M_aa`.
    pub fn singular_points(&self) -> Vec<Quaternion> {
        match &self.m {
            AdhmMatrix::Diagonal(d) => d.iter().map(|q| -*q).collect(),
            AdhmMatrix::Dense(_) => Vec::new(),
        }
    }

    /// `max_ab |Im (L*L + M*M)_ab|`.
    pub fn constraint_residual(&self) -> f64 {
        let n = self.rank();
        let mut worst = 0.0f64;
        match &self.m {
            AdhmMatrix::Diagonal(d) => {
                for a in 0..n {
                    for b in 0..n {
                        let mut r = self.l[a].conj() * self.l[b];
                        if a == b {
                            r += d[a].conj() * d[a];
                        }
                        worst = worst.max(r.im().norm());
                    }
                }
            }
            AdhmMatrix::Dense(m) => {
                let mm = m.adjoint().matmul(m);
                for a in 0..n {
                    for b in 0..n {
                        let r = self.l[a].conj() * self.l[b] + mm.get(a, b);
                        worst = worst.max(r.im().norm());
                    }
                }
            }
        }
        worst
    }

    /// Solve `L + v(M + x) = 0`, with `x` acting as `x·I` by right multiplication.
    pub fn solve_v(&self, x: Quaternion) -> Result<Vec<Quaternion>> {
        Ok(self.solve_with_derivatives(x)?.0)
    }

    /// `v` together with `∂_μ v`, the latter from `∂_μv (M + x) = −v e_μ`.
    pub fn solve_with_derivatives(&self, x: Quaternion) -> Result<(Vec<Quaternion>, [Vec<Quaternion>; 4])> {
        match &self.m {
            AdhmMatrix::Diagonal(d) => {
                let shifted: Vec<Quaternion> = d.iter().map(|m| *m + x).collect();
                check_diagonal(&shifted).map_err(|e| e.at(x))?;
                let inv: Vec<Quaternion> = shifted
                    .iter()
                    .map(|s| s.inv())
                    .collect::<Result<_>>()
                    .map_err(|_| AdhmError::Singular {
                        condition: f64::INFINITY,
                        at: Some(x),
                    })?;
                let v: Vec<Quaternion> = self.l.iter().zip(&inv).map(|(l, i)| -(*l * *i)).collect();
                let dv = std::array::from_fn(|mu| {
                    let e = Quaternion::basis(mu);
                    v.iter().zip(&inv).map(|(va, i)| -(*va * e * *i)).collect()
                });
                Ok((v, dv))
            }
            AdhmMatrix::Dense(m) => {
                let n = m.rows();
                let shifted = QuatMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        m.get(i, j) + x
                    } else {
                        m.get(i, j)
                    }
                });
                let lu = QuatLu::new(&shifted).map_err(|e| e.at(x))?;
                let v = lu.solve_right(&self.l);
                let dv = std::array::from_fn(|mu| {
                    let e = Quaternion::basis(mu);
                    let rhs: Vec<Quaternion> = v.iter().map(|va| *va * e).collect();
                    lu.solve_right(&rhs)
                });
                Ok((v, dv))
            }
        }
    }

    /// `A_μ = [v ∂_μv* − ∂_μv v*] / (2φ)`, `φ = 1 + v v*`.
    pub fn gauge_potential(&self, x: Quaternion) -> Result<GaugePotential> {
        let (v, dv) = self.solve_with_derivatives(x)?;
        Ok(potential_from_solution(&v, &dv, None))
    }
}

/// Potential from a solution vector and its derivatives, with optional
/// quadrature weights in the products `⟨v, w⟩ = Σ w_j v_j w_j*`.
pub(crate) fn potential_from_solution(
    v: &[Quaternion],
    dv: &[Vec<Quaternion>; 4],
    weights: Option<&[f64]>,
) -> GaugePotential {
    let w = |j: usize| weights.map_or(1.0, |w| w[j]);
    let phi = 1.0 + v.iter().enumerate().map(|(j, q)| w(j) * q.norm_sqr()).sum::<f64>();
    let mut a = [Quaternion::ZERO; 4];
    for (mu, am) in a.iter_mut().enumerate() {
        let x: Quaternion = v
            .iter()
            .zip(&dv[mu])
            .enumerate()
            .map(|(j, (vj, dj))| (*vj * dj.conj()) * w(j))
            .sum();
        *am = (x - x.conj()) / (2.0 * phi);
    }
    GaugePotential(a)
}

fn check_diagonal(d: &[Quaternion]) -> Result<()> {
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), q| {
        let n = q.norm();
        (lo.min(n), hi.max(n))
    });
    if d.is_empty() {
        return Ok(());
    }
    let condition = if lo == 0.0 { f64::INFINITY } else { hi / lo };
    if condition > CONDITION_LIMIT {
        return Err(AdhmError::Singular { condition, at: None });
    }
    Ok(())
}

/// 't Hooft data: real positive `λ_a` and `M = diag(−x⁽ᵃ⁾)`.
pub fn thooft_data(points: &[Quaternion], weights: &[f64]) -> Result<AdhmData> {
    if points.len() != weights.len() {
        return Err(AdhmError::Input(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
        return Err(AdhmError::Domain(format!("weights must be positive, got {w}")));
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| q == p) {
            return Err(AdhmError::Domain(format!("duplicate point {p}")));
        }
    }
    AdhmData::diagonal(
        weights.iter().map(|w| Quaternion::real(*w)).collect(),
        points.iter().map(|p| -*p).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{ansatz_potential, PoleSum};

    fn e(mu: usize) -> Quaternion {
        Quaternion::basis(mu)
    }

    #[test]
    fn thooft_constraint_is_exact() {
        let d = thooft_data(&[Quaternion::ZERO], &[1.0]).unwrap();
        assert_eq!(d.l(), &[Quaternion::ONE]);
        assert_eq!(d.m().get(0, 0), Quaternion::ZERO);
        let d2 = thooft_data(
            &[Quaternion::new(0.1, 0.2, 0.3, 0.0), Quaternion::new(-0.3, 0.0, 0.2, 0.5)],
            &[0.4, 1.3],
        )
        .unwrap();
        assert_eq!(d2.constraint_residual(), 0.0);
    }

    #[test]
    fn thooft_rejects_duplicates_and_bad_weights() {
        let p = Quaternion::new(0.1, 0.0, 0.0, 0.0);
        assert!(thooft_data(&[p, p], &[1.0, 1.0]).is_err());
        assert!(thooft_data(&[p], &[-1.0]).is_err());
    }

    #[test]
    fn constraint_residual_of_non_real_pair() {
        let d = AdhmData::new(vec![Quaternion::ONE, e(0)], QuatMatrix::zeros(2, 2)).unwrap();
        assert!((d.constraint_residual() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_data_always_satisfies_constraint() {
        let d = AdhmData::new(
            vec![Quaternion::new(0.3, -1.0, 2.0, 0.5)],
            QuatMatrix::diagonal(&[Quaternion::new(1.0, 2.0, -0.5, 0.1)]),
        )
        .unwrap();
        assert!(d.constraint_residual() < 1e-15);
    }

    #[test]
    fn asymmetric_m_rejected() {
        let m = QuatMatrix::from_fn(2, 2, |i, j| if i < j { e(0) } else { Quaternion::ZERO });
        assert!(AdhmData::new(vec![Quaternion::ONE; 2], m).is_err());
    }

    #[test]
    fn solve_v_matches_thooft_closed_form() {
        let pts = [Quaternion::new(0.1, 0.2, 0.3, 0.0), Quaternion::new(-0.3, 0.0, 0.2, 0.5)];
        let lam = [0.4, 1.3];
        let data = thooft_data(&pts, &lam).unwrap();
        let x = Quaternion::new(0.05, -0.1, 0.0, 0.2);
        let v = data.solve_v(x).unwrap();
        for a in 0..2 {
            let expect = Quaternion::real(lam[a]) * (pts[a] - x).inv().unwrap();
            assert!((v[a] - expect).norm() < 1e-14);
        }
        // the same through the dense LU path
        let dense = AdhmData {
            l: data.l().to_vec(),
            m: AdhmMatrix::Dense(data.m().to_dense()),
        };
        let vd = dense.solve_v(x).unwrap();
        for a in 0..2 {
            assert!((v[a] - vd[a]).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_l_gives_zero_field() {
        let m = QuatMatrix::from_fn(2, 2, |i, j| if i == j { e(i) } else { Quaternion::real(0.3) });
        let data = AdhmData::new(vec![Quaternion::ZERO; 2], m).unwrap();
        let x = Quaternion::new(0.2, 0.1, 0.0, -0.3);
        assert!(data.solve_v(x).unwrap().iter().all(|q| q.norm() == 0.0));
        assert_eq!(data.gauge_potential(x).unwrap(), GaugePotential::ZERO);
    }

    #[test]
    fn singular_at_pole() {
        let p = Quaternion::new(0.1, 0.2, 0.3, 0.0);
        let data = thooft_data(&[p], &[1.0]).unwrap();
        match data.solve_v(p) {
            Err(AdhmError::Singular { at, .. }) => assert_eq!(at, Some(p)),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn potential_is_imaginary_and_matches_ansatz() {
        let poles = [Quaternion::new(0.2, -0.1, 0.0, 0.3), Quaternion::new(-0.4, 0.0, 0.1, 0.0)];
        let lambdas = [0.5, 0.3];
        let data = thooft_data(&poles, &lambdas).unwrap();
        let phi = PoleSum::new(poles.to_vec(), lambdas.to_vec()).unwrap();
        for x in [Quaternion::new(0.0, 0.0, 0.0, 0.5), Quaternion::new(0.5, -0.3, 0.2, 0.4)] {
            let a = data.gauge_potential(x).unwrap();
            let b = ansatz_potential(&phi, x).unwrap();
            assert!(a.max_real_part() < 1e-12);
            assert!(a.distance(&b) < 1e-12 * b.norm(), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn dense_non_thooft_potential_is_imaginary() {
        // N = 2 data with a non-diagonal M; the constraint does not matter for antihermiticity
        let m = QuatMatrix::from_rows(vec![
            vec![Quaternion::new(0.3, 0.1, 0.0, 0.2), Quaternion::new(0.0, 0.2, 0.1, 0.1)],
            vec![Quaternion::new(0.0, 0.2, 0.1, 0.1), Quaternion::new(-0.2, 0.0, 0.4, -0.1)],
        ])
        .unwrap();
        let data = AdhmData::new(vec![Quaternion::new(0.5, 0.0, 0.1, 0.7), Quaternion::real(0.4)], m).unwrap();
        let a = data.gauge_potential(Quaternion::new(0.1, 0.1, -0.2, 0.3)).unwrap();
        assert!(a.max_real_part() < 1e-12);
        assert!(a.norm() > 0.0);
    }
}
