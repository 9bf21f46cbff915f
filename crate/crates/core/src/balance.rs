//! Detailed balance certificates.
//!
//! Both conditions are bilinear in the pair `(a, b)`, so it is enough to
//! compare the two sides on a spanning set: the monomial bases of `A(I)` and
//! `A(ι(I))` for the fermionic condition `φ(τ(a)b) = φ(aτ^ι(b))`, and matrix
//! units for the standard condition `ω(τ(a)⊗b) = ω(a⊗τ(b))`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraBasis, LinearMap};
use crate::dynamics::{LatticePermutation, Semigroup};
use crate::error::{Error, Result};
use crate::fock::{StateVector, Subset};
use crate::states::{EntangledState, ProbabilityTable};
use crate::C64;

/// Two-sided comparison over a spanning set of pairs. Rows index `a`,
/// columns index `b`. `lhs` carries the side with the dynamics on `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport {
    pub lhs: DMatrix<C64>,
    pub rhs: DMatrix<C64>,
    pub per_pair: DMatrix<f64>,
    pub max_violation: f64,
    pub argmax_pair: (usize, usize),
    pub tolerance: f64,
    pub verdict: bool,
}

impl BalanceReport {
    fn from_sides(lhs: DMatrix<C64>, rhs: DMatrix<C64>, tolerance: f64) -> Self {
        let per_pair = (&lhs - &rhs).map(|z| z.norm());
        let mut max_violation = 0.0;
        let mut argmax_pair = (0, 0);
        for j in 0..per_pair.ncols() {
            for i in 0..per_pair.nrows() {
                if per_pair[(i, j)] > max_violation {
                    max_violation = per_pair[(i, j)];
                    argmax_pair = (i, j);
                }
            }
        }
        BalanceReport { lhs, rhs, per_pair, max_violation, argmax_pair, tolerance, verdict: max_violation < tolerance }
    }

    /// Recompute the verdict at a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.verdict = self.max_violation < tolerance;
        self
    }
}

fn apply_all(basis: &AlgebraBasis, v: &StateVector) -> Vec<DVector<C64>> {
    basis.operators().iter().map(|m| m.matrix() * v.amplitudes()).collect()
}

fn apply_all_adjoint(basis: &AlgebraBasis, v: &StateVector) -> Vec<DVector<C64>> {
    basis.operators().iter().map(|m| m.matrix().ad_mul(v.amplitudes())).collect()
}

/// `Σ_k c_k x_k`.
fn combine(coeffs: impl Iterator<Item = C64>, vecs: &[DVector<C64>]) -> DVector<C64> {
    let mut out = DVector::zeros(vecs[0].len());
    for (c, v) in coeffs.zip(vecs) {
        if c.norm() != 0.0 {
            out += v * c;
        }
    }
    out
}

/// Compares `φ(τ(a)b)` (lhs) with `φ(aτ^ι(b))` (rhs) over all monomial
/// pairs, with `τ^ι` the copy of `τ` along the state's `ι`.
pub fn fermionic_sqdb(tau: &LinearMap, state: &EntangledState, tol: f64) -> Result<BalanceReport> {
    let cfg = &state.config;
    if tau.support() != cfg.eta().domain() {
        return Err(Error::SupportMismatch("τ must act on A(I) for the state's I".into()));
    }
    let tau_copy = cfg.eta().copy_map(tau)?;
    let phi = &state.vector;
    let (bi, bj) = (cfg.basis_i(), cfg.basis_j());

    // φ(xy) = ⟨x*Φ, yΦ⟩
    let mi_adj_phi = apply_all_adjoint(bi, phi);
    let nj_phi = apply_all(bj, phi);
    let t = tau.matrix();
    let tc = tau_copy.matrix();
    // τ(m_i)*Φ = Σ_k conj(T_ki) m_k*Φ and τ^ι(n_j)Φ = Σ_k T^ι_kj n_kΦ
    let tau_adj_phi: Vec<_> =
        (0..bi.len()).map(|i| combine(t.column(i).iter().map(|z| z.conj()), &mi_adj_phi)).collect();
    let copy_phi: Vec<_> = (0..bj.len()).map(|j| combine(tc.column(j).iter().copied(), &nj_phi)).collect();

    let lhs = DMatrix::from_fn(bi.len(), bj.len(), |i, j| tau_adj_phi[i].dotc(&nj_phi[j]));
    let rhs = DMatrix::from_fn(bi.len(), bj.len(), |i, j| mi_adj_phi[i].dotc(&copy_phi[j]));
    Ok(BalanceReport::from_sides(lhs, rhs, tol))
}

/// [`fermionic_sqdb`] for `e^{t𝓛}` at every time of the grid.
pub fn fermionic_sqdb_continuous(
    semigroup: &Semigroup,
    state: &EntangledState,
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<BalanceReport>> {
    if let Some(&t) = t_grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    t_grid.iter().map(|&t| fermionic_sqdb(&semigroup.evolve(t)?, state, tol)).collect()
}

/// Vector `Ω = Σ_j p_j^{1/2} d_j ⊗ d_j`, index `j·n + k` for `d_j ⊗ d_k`.
pub fn omega_vector(probs: &[f64]) -> DVector<C64> {
    let n = probs.len();
    let mut v = DVector::zeros(n * n);
    for (j, p) in probs.iter().enumerate() {
        v[j * n + j] = C64::new(p.sqrt(), 0.0);
    }
    v
}

/// Compares `ω(τ(a)⊗b)` (lhs) with `ω(a⊗τ(b))` (rhs) over all pairs of
/// matrix units `a = E_u`, `b = E_v` (column-major index). `superop` acts
/// on column-major `vec` of `n × n` matrices, `probs` is the diagonal of
/// the density matrix in the same basis.
pub fn standard_sqdb(superop: &DMatrix<C64>, probs: &[f64], tol: f64) -> Result<BalanceReport> {
    let n = probs.len();
    let n2 = n * n;
    if superop.nrows() != n2 || superop.ncols() != n2 {
        return Err(Error::DimensionMismatch { expected: n2, found: superop.nrows() });
    }
    let omega = omega_vector(probs);
    let unit = |u: usize| {
        let mut e = DMatrix::zeros(n, n);
        e[(u % n, u / n)] = C64::new(1.0, 0.0);
        e
    };
    let image = |u: usize| DMatrix::from_column_slice(n, n, superop.column(u).as_slice());
    let units: Vec<DMatrix<C64>> = (0..n2).map(unit).collect();
    let images: Vec<DMatrix<C64>> = (0..n2).map(image).collect();
    let w = |x: &DMatrix<C64>, y: &DMatrix<C64>| omega.dotc(&(x.kronecker(y) * &omega));
    let lhs = DMatrix::from_fn(n2, n2, |u, v| w(&images[u], &units[v]));
    let rhs = DMatrix::from_fn(n2, n2, |u, v| w(&units[u], &images[v]));
    Ok(BalanceReport::from_sides(lhs, rhs, tol))
}

/// [`standard_sqdb`] for a map on `A(I)`, read in the representation `π_I`
/// with the basis `f_M`, `M ∈ D_I`.
pub fn standard_sqdb_for_map(
    basis: &AlgebraBasis,
    map: &LinearMap,
    probs: &ProbabilityTable,
    tol: f64,
) -> Result<BalanceReport> {
    if probs.support() != basis.support() {
        return Err(Error::SupportMismatch("probabilities and map live on different supports".into()));
    }
    standard_sqdb(&basis.matrix_picture(map)?, probs.values(), tol)
}

/// Which of the probability conditions for the permutation example hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbSymmetry {
    /// `p` is invariant under `M ↦ σ⁻¹(M)` (as sets).
    pub inv: bool,
    /// `p_M` depends only on `|M|`.
    pub inv2: bool,
    /// `p` is invariant under `M ↦ σ(M)` (as sets).
    pub inv_prime: bool,
}

pub fn prob_symmetry(probs: &ProbabilityTable, sigma: &LatticePermutation) -> Result<ProbSymmetry> {
    const TOL: f64 = 1e-12;
    let support = probs.support();
    if sigma.support() != support {
        return Err(Error::SupportMismatch("σ must permute the support of the probabilities".into()));
    }
    let invariant = |perm: &LatticePermutation| {
        support.subsets().all(|m| (probs.get(perm.apply_subset(m)) - probs.get(m)).abs() < TOL)
    };
    let subsets: Vec<Subset> = support.subsets().collect();
    let inv2 = subsets
        .iter()
        .all(|&m| subsets.iter().filter(|n| n.len() == m.len()).all(|&n| (probs.get(n) - probs.get(m)).abs() < TOL));
    Ok(ProbSymmetry { inv: invariant(&sigma.inverse()), inv2, inv_prime: invariant(sigma) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{mix_map, permutation_unitary};
    use crate::fock::Lattice;
    use crate::states::{entangled_vector, LatticeConfig};

    fn section5(lambda: f64) -> (LinearMap, EntangledState) {
        let l = Lattice::new(&[1, 2, 3, 4]).unwrap();
        let i = l.subset(&[1, 2]).unwrap();
        let probs = ProbabilityTable::by_length(i, &[0.4, 0.2, 0.2]).unwrap();
        let cfg = LatticeConfig::new(&l, &[(1, 3), (2, 4)], probs).unwrap();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 2]]).unwrap();
        let tau = mix_map(cfg.basis_i(), &permutation_unitary(&l, &s).unwrap(), lambda).unwrap();
        (tau.map, entangled_vector(&cfg).unwrap())
    }

    #[test]
    fn identity_always_balanced() {
        let (tau, st) = section5(0.5);
        let id = LinearMap::identity(tau.support());
        let r = fermionic_sqdb(&id, &st, 1e-10).unwrap();
        assert!(r.verdict);
        assert_eq!(r.max_violation, 0.0);
        let n = 4;
        let s = standard_sqdb(&DMatrix::identity(n * n, n * n), &[0.1, 0.2, 0.3, 0.4], 1e-10).unwrap();
        assert!(s.verdict);
    }

    #[test]
    fn two_cycle_balanced() {
        let (tau, st) = section5(0.5);
        let r = fermionic_sqdb(&tau, &st, 1e-10).unwrap();
        assert!(r.verdict, "violation {}", r.max_violation);
    }

    #[test]
    fn report_bookkeeping() {
        let lhs = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0)],
        );
        let rhs = DMatrix::zeros(2, 2);
        let r = BalanceReport::from_sides(lhs, rhs, 0.1);
        assert_eq!(r.max_violation, 1.0);
        assert_eq!(r.argmax_pair, (0, 0));
        assert!(!r.verdict);
        assert!(r.with_tolerance(2.0).verdict);
    }

    /// ω(x⊗y) = Σ_{jk} (p_j p_k)^{1/2} x_jk y_jk, checked against the
    /// explicit tensor construction.
    #[test]
    fn omega_closed_form() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let omega = omega_vector(&p);
        let x = DMatrix::from_fn(4, 4, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        let y = DMatrix::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let direct = omega.dotc(&(x.kronecker(&y) * &omega));
        let mut closed = C64::new(0.0, 0.0);
        for j in 0..4 {
            for k in 0..4 {
                closed += x[(j, k)] * y[(j, k)] * (p[j] * p[k]).sqrt();
            }
        }
        assert!((direct - closed).norm() < 1e-12);
    }

    #[test]
    fn prob_symmetry_examples() {
        let l = Lattice::new(&[1, 2, 3, 4]).unwrap();
        let i = l.subset(&[1, 2]).unwrap();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 2]]).unwrap();
        let u = prob_symmetry(&ProbabilityTable::uniform(i), &s).unwrap();
        assert!(u.inv && u.inv2 && u.inv_prime);
        let g = prob_symmetry(&ProbabilityTable::by_length(i, &[3.0, 1.0, 2.0]).unwrap(), &s).unwrap();
        assert!(g.inv2);
        let skew = ProbabilityTable::new(i, vec![0.25, 0.35, 0.15, 0.25]).unwrap();
        let k = prob_symmetry(&skew, &s).unwrap();
        assert!(!k.inv && !k.inv2 && !k.inv_prime);
        // invariant under the trivial permutation without being length-dependent
        let id = LatticePermutation::from_cycles(&l, &[1, 2], &[]).unwrap();
        let k = prob_symmetry(&skew, &id).unwrap();
        assert!(k.inv && !k.inv2 && k.inv_prime);
    }
}
