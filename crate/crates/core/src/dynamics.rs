//! Dynamical maps on `A(I)`: conjugation mixtures
//! `τ(a) = λU*aU + (1−λ)UaU*` for unitaries induced by lattice permutations
//! or by permutations of the basis of `H_I`, and the semigroups generated by
//! `τ − id`.

use nalgebra::DMatrix;

use crate::algebra::{AlgebraBasis, LinearMap, Relabeling};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, Lattice, Subset};
use crate::{Label, C64};

/// A permutation of the lattice that moves only labels of `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePermutation {
    support: Subset,
    // image position of every lattice position
    images: Vec<usize>,
    labels: Vec<Label>,
}

impl LatticePermutation {
    /// From disjoint cycles `(l_1 l_2 ... l_k)`, meaning `l_1 ↦ l_2 ↦ ... ↦ l_1`.
    /// Labels of `support` not listed are fixed.
    pub fn from_cycles(lattice: &Lattice, support: &[Label], cycles: &[Vec<Label>]) -> Result<Self> {
        let support = lattice.subset(support)?;
        let mut images: Vec<usize> = (0..lattice.size()).collect();
        let mut seen = Subset::EMPTY;
        for cycle in cycles {
            let pos = cycle.iter().map(|&l| lattice.position(l)).collect::<Result<Vec<_>>>()?;
            for (k, &p) in pos.iter().enumerate() {
                if !support.contains_position(p) {
                    return Err(Error::InvalidPermutation(format!("{} is outside I", cycle[k])));
                }
                if seen.contains_position(p) {
                    return Err(Error::InvalidPermutation(format!("{} appears in two cycles", cycle[k])));
                }
                seen = seen.union(Subset::from_bits(1 << p));
                images[p] = pos[(k + 1) % pos.len()];
            }
        }
        Ok(LatticePermutation { support, images, labels: lattice.labels().to_vec() })
    }

    /// From an explicit map on `I`; every label of `I` must be listed once.
    pub fn from_mapping(lattice: &Lattice, mapping: &[(Label, Label)]) -> Result<Self> {
        let from: Vec<Label> = mapping.iter().map(|p| p.0).collect();
        let to: Vec<Label> = mapping.iter().map(|p| p.1).collect();
        let dom = lattice.subset(&from).map_err(|e| Error::InvalidPermutation(e.to_string()))?;
        let img = lattice.subset(&to).map_err(|e| Error::InvalidPermutation(e.to_string()))?;
        if dom != img {
            return Err(Error::InvalidPermutation("image differs from domain".into()));
        }
        let mut images: Vec<usize> = (0..lattice.size()).collect();
        for &(a, b) in mapping {
            images[lattice.position(a)?] = lattice.position(b)?;
        }
        Ok(LatticePermutation { support: dom, images, labels: lattice.labels().to_vec() })
    }

    pub fn support(&self) -> Subset {
        self.support
    }

    pub fn apply(&self, label: Label) -> Label {
        match self.labels.binary_search(&label) {
            Ok(p) => self.labels[self.images[p]],
            Err(_) => label,
        }
    }

    pub fn inverse(&self) -> LatticePermutation {
        let mut images = vec![0; self.images.len()];
        for (p, &q) in self.images.iter().enumerate() {
            images[q] = p;
        }
        LatticePermutation { support: self.support, images, labels: self.labels.clone() }
    }

    /// Image of a subset as a set.
    pub fn apply_subset(&self, s: Subset) -> Subset {
        Subset::from_bits(s.positions().fold(0, |acc, p| acc | 1 << self.images[p]))
    }

    /// Cycle decomposition restricted to `I`, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<Label>> {
        let mut done = Subset::EMPTY;
        let mut out = Vec::new();
        for start in self.support.positions() {
            if done.contains_position(start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            loop {
                done = done.union(Subset::from_bits(1 << p));
                cycle.push(self.labels[p]);
                p = self.images[p];
                if p == start {
                    break;
                }
            }
            out.push(cycle);
        }
        out
    }

    /// `σ^ι = ι ∘ σ ∘ ι⁻¹` on `ι(I)`, identity elsewhere.
    pub fn transported(&self, eta: &Relabeling) -> Result<LatticePermutation> {
        if eta.domain() != self.support {
            return Err(Error::SupportMismatch("σ and ι have different domains".into()));
        }
        let mapping: Vec<(Label, Label)> =
            eta.pairs().iter().map(|&(l, il)| (il, eta.image_of(self.apply(l)).expect("σ maps I to I"))).collect();
        let lattice = Lattice::new(&self.labels)?;
        LatticePermutation::from_mapping(&lattice, &mapping)
    }
}

/// `U f_{(l_1..l_n)} = f_{(σ(l_1)..σ(l_n))}`.
pub fn permutation_unitary(lattice: &Lattice, sigma: &LatticePermutation) -> Result<FockOperator> {
    if sigma.labels != lattice.labels() {
        return Err(Error::InvalidPermutation("permutation belongs to another lattice".into()));
    }
    let dim = lattice.dim();
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let s = Subset::from_bits(col as u32);
        let seq: Vec<Label> = lattice.subset_labels(s).into_iter().map(|l| sigma.apply(l)).collect();
        let signed = lattice.sequence_sign(&seq)?;
        u[(signed.subset.index(), col)] = C64::new(signed.sign as f64, 0.0);
    }
    Ok(FockOperator(u))
}

/// The unitary on `H_I` permuting basis vectors along `cycle`:
/// `f_{c_0} ↦ f_{c_1} ↦ ... ↦ f_{c_{k-1}} ↦ f_{c_0}`; unlisted vectors fixed.
pub fn basis_cycle_unitary(lattice: &Lattice, support: Subset, cycle: &[Subset]) -> Result<DMatrix<C64>> {
    let d = support.subset_count();
    let mut images: Vec<usize> = (0..d).collect();
    let mut seen = vec![false; d];
    if let Some(&s) = cycle.iter().find(|s| !s.is_subset_of(support)) {
        return Err(Error::InvalidBasisCycle(format!("{:?} is not a subset of I", lattice.subset_labels(s))));
    }
    for (k, &s) in cycle.iter().enumerate() {
        let i = support.subset_index(s);
        if seen[i] {
            return Err(Error::InvalidBasisCycle(format!("{:?} listed twice", lattice.subset_labels(s))));
        }
        seen[i] = true;
        images[i] = support.subset_index(cycle[(k + 1) % cycle.len()]);
    }
    let mut u = DMatrix::zeros(d, d);
    for (col, &row) in images.iter().enumerate() {
        u[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(u)
}

/// Where the conjugating unitary lives.
#[derive(Clone, Debug, PartialEq)]
pub enum Implementer {
    /// A unitary on the whole Fock space with `U*A(I)U = A(I)`.
    Full(FockOperator),
    /// A unitary on `H_I`, acting through the representation `π_I`.
    Local(DMatrix<C64>),
}

#[derive(Clone, Debug)]
pub struct MixtureDynamics {
    pub unitary: Implementer,
    pub weight: f64,
    pub map: LinearMap,
}

fn check_weight(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidWeight(lambda))
    }
}

fn check_unitary(u: &DMatrix<C64>) -> Result<()> {
    let id = DMatrix::identity(u.nrows(), u.ncols());
    let dev = (u.adjoint() * u - id).norm();
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// `τ(a) = λU*aU + (1−λ)UaU*` for a full-space unitary.
pub fn mix_map(basis: &AlgebraBasis, u: &FockOperator, lambda: f64) -> Result<MixtureDynamics> {
    check_weight(lambda)?;
    check_unitary(u.matrix())?;
    let ud = u.adjoint();
    let (x, y) = (C64::new(lambda, 0.0), C64::new(1.0 - lambda, 0.0));
    let map = basis.map_from_fn(|a| {
        FockOperator((ud.matrix() * a.matrix() * u.matrix()) * x + (u.matrix() * a.matrix() * ud.matrix()) * y)
    })?;
    Ok(MixtureDynamics { unitary: Implementer::Full(u.clone()), weight: lambda, map })
}

/// The same mixture for a unitary on `H_I`, evaluated in `π_I`.
pub fn mix_map_local(basis: &AlgebraBasis, u: &DMatrix<C64>, lambda: f64) -> Result<MixtureDynamics> {
    check_weight(lambda)?;
    let d = basis.local_dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
    }
    check_unitary(u)?;
    let ud = u.adjoint();
    let (x, y) = (C64::new(lambda, 0.0), C64::new(1.0 - lambda, 0.0));
    let map = basis.map_from_restricted_fn(|a| (&ud * a * u) * x + (u * a * &ud) * y)?;
    Ok(MixtureDynamics { unitary: Implementer::Local(u.clone()), weight: lambda, map })
}

/// `τ^ι = η ∘ τ ∘ η⁻¹`.
pub fn copy_map(map: &LinearMap, eta: &Relabeling) -> Result<LinearMap> {
    eta.copy_map(map)
}

/// The quantum Markov semigroup generated by `𝓛 = τ − id`.
#[derive(Clone, Debug)]
pub struct Semigroup {
    generator: LinearMap,
}

impl Semigroup {
    pub fn from_generator(generator: LinearMap) -> Self {
        Semigroup { generator }
    }

    pub fn generator(&self) -> &LinearMap {
        &self.generator
    }

    /// `e^{t𝓛}` by Padé scaling and squaring.
    pub fn evolve(&self, t: f64) -> Result<LinearMap> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let scaled = self.generator.matrix() * C64::new(t, 0.0);
        LinearMap::from_matrix(self.generator.support(), scaled.exp())
    }
}

/// `𝓛(a) = λU*aU + (1−λ)UaU* − a`.
pub fn lindblad(dynamics: &MixtureDynamics) -> Semigroup {
    let id = LinearMap::identity(dynamics.map.support());
    let generator = dynamics.map.combine(C64::new(1.0, 0.0), &id, C64::new(-1.0, 0.0)).expect("same support");
    Semigroup { generator }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_even;

    fn lattice() -> Lattice {
        Lattice::new(&[1, 2, 3, 4]).unwrap()
    }

    #[test]
    fn permutation_construction() {
        let l = lattice();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 2]]).unwrap();
        assert_eq!(s.apply(1), 2);
        assert_eq!(s.apply(3), 3);
        assert_eq!(s.cycles(), vec![vec![1, 2]]);
        assert!(LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 3]]).is_err());
        assert!(LatticePermutation::from_cycles(&l, &[1, 2, 3], &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(LatticePermutation::from_mapping(&l, &[(1, 2), (2, 2)]).is_err());
        let t = LatticePermutation::from_cycles(&l, &[1, 2, 3], &[vec![1, 2, 3]]).unwrap();
        assert_eq!(t.inverse().apply(1), 3);
    }

    #[test]
    fn identity_permutation_gives_identity() {
        let l = lattice();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[]).unwrap();
        assert_eq!(permutation_unitary(&l, &s).unwrap(), l.identity());
    }

    #[test]
    fn unitary_intertwines_creators() {
        let l = lattice();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 2]]).unwrap();
        let u = permutation_unitary(&l, &s).unwrap();
        assert!(u.is_unitary(1e-12));
        for &lab in l.labels() {
            let lhs = &(&u * &l.creation(lab).unwrap()) * &u.adjoint();
            assert_eq!(lhs, l.creation(s.apply(lab)).unwrap());
        }
        let th = l.parity_operator();
        assert_eq!(&u * &th, &th * &u);
        // f_(1,2) ↦ f_(2,1) = −f_(1,2)
        let f12 = l.f_vector(&[1, 2]).unwrap();
        assert_eq!(u.apply(&f12), f12.scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn mixture_examples() {
        let l = Lattice::new(&[1, 2, 3, 4, 5, 6]).unwrap();
        let basis = AlgebraBasis::from_labels(&l, &[1, 2, 3]).unwrap();
        let s = LatticePermutation::from_cycles(&l, &[1, 2, 3], &[vec![1, 2, 3]]).unwrap();
        let u = permutation_unitary(&l, &s).unwrap();
        let tau = mix_map(&basis, &u, 0.3).unwrap();
        assert!(tau.map.is_unital(1e-12));
        let conj = mix_map(&basis, &u, 1.0).unwrap();
        for (i, m) in basis.operators().iter().enumerate() {
            let direct = basis.expand(&(&(&u.adjoint() * m) * &u)).unwrap();
            let col = conj.map.apply(&basis.element(basis.monomials()[i])).unwrap();
            assert!(col.max_abs_diff(&direct) < 1e-12);
        }
        // τ(a_l) = λ a_{σ⁻¹(l)} + (1−λ) a_{σ(l)}
        let inv = s.inverse();
        for l0 in [1, 2, 3] {
            let a = basis.element(basis.monomial(&[], &[l0]).unwrap());
            let got = basis.reconstruct(&tau.map.apply(&a).unwrap());
            let want = &l.annihilation(inv.apply(l0)).unwrap().scale(C64::new(0.3, 0.0))
                + &l.annihilation(s.apply(l0)).unwrap().scale(C64::new(0.7, 0.0));
            assert!((got.matrix() - want.matrix()).norm() < 1e-12);
        }
        assert!(is_even(&tau.map, 1e-12).even);
        assert!(matches!(mix_map(&basis, &u, 1.5), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn unitary_outside_algebra_rejected() {
        let l = lattice();
        let basis = AlgebraBasis::from_labels(&l, &[1, 2]).unwrap();
        // σ swapping 1 and 3 does not preserve A({1,2})
        let s = LatticePermutation::from_cycles(&l, &[1, 3], &[vec![1, 3]]).unwrap();
        let u = permutation_unitary(&l, &s).unwrap();
        assert!(matches!(mix_map(&basis, &u, 0.5), Err(Error::NotInAlgebra(_))));
    }

    #[test]
    fn basis_cycle_validation() {
        let l = lattice();
        let i = l.subset(&[1, 2]).unwrap();
        let e = Subset::EMPTY;
        assert!(basis_cycle_unitary(&l, i, &[e, e]).is_err());
        assert!(basis_cycle_unitary(&l, i, &[e, l.subset(&[3]).unwrap()]).is_err());
        assert_eq!(basis_cycle_unitary(&l, i, &[]).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn semigroup_basics() {
        let l = lattice();
        let basis = AlgebraBasis::from_labels(&l, &[1, 2]).unwrap();
        let s = LatticePermutation::from_cycles(&l, &[1, 2], &[vec![1, 2]]).unwrap();
        let tau = mix_map(&basis, &permutation_unitary(&l, &s).unwrap(), 0.5).unwrap();
        let sg = lindblad(&tau);
        assert!(sg.evolve(0.0).unwrap().distance(&LinearMap::identity(basis.support())) < 1e-14);
        for t in [0.1, 1.0, 10.0] {
            assert!(sg.evolve(t).unwrap().is_unital(1e-12));
        }
        assert!(matches!(sg.evolve(-1.0), Err(Error::NegativeTime(_))));
    }
}
