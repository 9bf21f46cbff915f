//! The bilinear form `B_φ(a, b) = φ(ab)` on `A(I) × A(ι(I))` and the
//! fermionic duals it induces.
//!
//! With `G_ij = B_φ(m_i, n_j)` on the monomial bases, a map `α` on `A(I)`
//! and its dual `α^φ` on `A(ι(I))` are related by `αᵀ G = G α^φ`, and a map
//! `β` on `A(ι(I))` and its dual `β^φ` by `G β = (β^φ)ᵀ G`. Both are plain
//! transposes, since the form is bilinear rather than sesquilinear.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraElement, LinearMap};
use crate::error::{Error, Result};
use crate::states::{min_eigenvalue, EntangledState};
use crate::{Label, C64};

/// Condition number above which duals are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative singular-value cutoff for the numerical rank.
pub const RANK_TOL: f64 = 1e-10;

fn check_supports(state: &EntangledState, a: &AlgebraElement, b: &AlgebraElement) -> Result<()> {
    let eta = state.config.eta();
    if a.support != eta.domain() || b.support != eta.codomain() {
        return Err(Error::SupportMismatch("B_φ takes a ∈ A(I) and b ∈ A(ι(I))".into()));
    }
    Ok(())
}

/// `B_φ(a, b) = φ(ab)`.
pub fn bilinear_form(state: &EntangledState, a: &AlgebraElement, b: &AlgebraElement) -> Result<C64> {
    check_supports(state, a, b)?;
    let cfg = &state.config;
    let x = cfg.basis_i().reconstruct(a);
    let y = cfg.basis_j().reconstruct(b);
    Ok(state.phi(&(&x * &y)))
}

/// The reversed-order form `φ(ba)`.
pub fn bilinear_form_reversed(state: &EntangledState, a: &AlgebraElement, b: &AlgebraElement) -> Result<C64> {
    check_supports(state, a, b)?;
    let cfg = &state.config;
    let x = cfg.basis_i().reconstruct(a);
    let y = cfg.basis_j().reconstruct(b);
    Ok(state.phi(&(&y * &x)))
}

#[derive(Clone, Debug)]
pub struct BilinearGram {
    pub matrix: DMatrix<C64>,
    pub singular_values: DVector<f64>,
    pub rank: usize,
    /// Largest over smallest singular value (infinite when singular).
    pub condition: f64,
}

pub fn gram(state: &EntangledState) -> BilinearGram {
    let cfg = &state.config;
    let phi = state.vector.amplitudes();
    let left: Vec<DVector<C64>> = cfg.basis_i().operators().iter().map(|m| m.matrix().ad_mul(phi)).collect();
    let right: Vec<DVector<C64>> = cfg.basis_j().operators().iter().map(|n| n.matrix() * phi).collect();
    let matrix = DMatrix::from_fn(left.len(), right.len(), |i, j| left[i].dotc(&right[j]));
    let singular_values = matrix.singular_values();
    let smax = singular_values.max();
    let smin = singular_values.min();
    let rank = singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    BilinearGram { matrix, singular_values, rank, condition }
}

fn solvable_gram(state: &EntangledState) -> Result<BilinearGram> {
    if !state.config.probs().is_strict() {
        return Err(Error::NotStrictlyPositive);
    }
    let g = gram(state);
    if !(g.condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(g.condition));
    }
    Ok(g)
}

fn solve(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.clone().lu().solve(b).expect("well-conditioned Gram matrix")
}

/// `α^φ` on `A(ι(I))` with `B_φ(α(a), b) = B_φ(a, α^φ(b))`.
pub fn fermionic_dual(alpha: &LinearMap, state: &EntangledState) -> Result<LinearMap> {
    if alpha.support() != state.config.eta().domain() {
        return Err(Error::SupportMismatch("α must act on A(I)".into()));
    }
    let g = solvable_gram(state)?;
    let rhs = alpha.matrix().transpose() * &g.matrix;
    LinearMap::from_matrix(state.config.eta().codomain(), solve(&g.matrix, &rhs))
}

/// `β^φ` on `A(I)` with `B_φ(a, β(b)) = B_φ(β^φ(a), b)`.
pub fn fermionic_dual_of_copy(beta: &LinearMap, state: &EntangledState) -> Result<LinearMap> {
    if beta.support() != state.config.eta().codomain() {
        return Err(Error::SupportMismatch("β must act on A(ι(I))".into()));
    }
    let g = solvable_gram(state)?;
    // (β^φ)ᵀ = G β G⁻¹, so β^φ = G⁻ᵀ (G β)ᵀ
    let gb_t = (&g.matrix * beta.matrix()).transpose();
    LinearMap::from_matrix(state.config.eta().domain(), solve(&g.matrix.transpose(), &gb_t))
}

/// `max_ij |B_φ(α(m_i), n_j) − B_φ(m_i, α^φ(n_j))|`.
pub fn dual_residual(alpha: &LinearMap, dual: &LinearMap, state: &EntangledState) -> f64 {
    let g = gram(state).matrix;
    let diff = alpha.matrix().transpose() * &g - &g * dual.matrix();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖α^φφ − α‖` (Frobenius, monomial basis).
pub fn involution_residual(alpha: &LinearMap, state: &EntangledState) -> Result<f64> {
    let dual = fermionic_dual(alpha, state)?;
    let back = fermionic_dual_of_copy(&dual, state)?;
    Ok(back.distance(alpha))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityProbe {
    /// `B_φ(a, b)` for `a = (1+κc)*(1+κc)`, `b = (1+λd)*(1+λd)`.
    pub value: C64,
    pub a_min_eig: f64,
    pub b_min_eig: f64,
    /// `φ(cd)` with `c = a_l`, `d = a_{ι(l)}`.
    pub phi_cd: C64,
}

pub fn positivity_probe(state: &EntangledState, kappa: C64, lambda: C64, label: Label) -> Result<PositivityProbe> {
    let cfg = &state.config;
    let lattice = cfg.lattice();
    let copy = cfg
        .eta()
        .image_of(label)
        .ok_or_else(|| Error::NotInSupport(label.to_string(), lattice.subset_labels(cfg.eta().domain())))?;
    let c = lattice.annihilation(label)?;
    let d = lattice.annihilation(copy)?;
    let one = lattice.identity();
    let x = &one + &c.scale(kappa);
    let y = &one + &d.scale(lambda);
    let a = &x.adjoint() * &x;
    let b = &y.adjoint() * &y;
    Ok(PositivityProbe {
        value: state.phi(&(&a * &b)),
        a_min_eig: min_eigenvalue(a.matrix()),
        b_min_eig: min_eigenvalue(b.matrix()),
        phi_cd: state.phi(&(&c * &d)),
    })
}
