//! The finite CAR algebras `A(I)` in the monomial basis `a*_N a_M`.
//!
//! Elements are coefficient vectors over the `4^|I|` monomials and linear
//! maps on `A(I)` are matrices acting on those vectors. The monomial at index
//! `n * 2^|I| + m` has creators given by the `n`-th and annihilators by the
//! `m`-th subset of `I` (see [`Subset::nth_subset`]). With `N = (n_1..n_j)`
//! and `M = (m_1..m_s)` ascending, the operator is
//! `a*_{n_1}···a*_{n_j} a_{m_s}···a_{m_1}`, so that `(a*_N a_M)^* = a*_M a_N`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{annihilate_at, create_at, parity_sign, FockOperator, Lattice, Subset};
use crate::{Label, C64};

/// Expansion residual above which an operator is declared outside `A(I)`.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub creators: Subset,
    pub annihilators: Subset,
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial { creators: Subset::EMPTY, annihilators: Subset::EMPTY };

    pub fn degree(self) -> usize {
        self.creators.len() + self.annihilators.len()
    }

    /// `(-1)^{|N|+|M|}`, the eigenvalue of the parity automorphism.
    pub fn parity(self) -> f64 {
        // |N| + |M| and |N xor M| differ by 2|N ∩ M|
        parity_sign(Subset::from_bits(self.creators.bits() ^ self.annihilators.bits()))
    }

    pub fn operator(self, lattice: &Lattice) -> FockOperator {
        let dim = lattice.dim();
        let ann: Vec<usize> = self.annihilators.positions().collect();
        let cre: Vec<usize> = self.creators.positions().collect();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut state = Some((Subset::from_bits(col as u32), 1.0));
            // a_{m_1} acts first, then a_{m_2}, ...
            for &p in &ann {
                state = state.and_then(|(s, sg)| annihilate_at(p, s).map(|(t, g)| (t, sg * g)));
            }
            // a*_{n_j} acts first, a*_{n_1} last
            for &p in cre.iter().rev() {
                state = state.and_then(|(s, sg)| create_at(p, s).map(|(t, g)| (t, sg * g)));
            }
            if let Some((row, sign)) = state {
                m[(row.index(), col)] = C64::new(sign, 0.0);
            }
        }
        FockOperator(m)
    }

    pub fn describe(self, lattice: &Lattice) -> String {
        let mut parts = Vec::new();
        for l in lattice.subset_labels(self.creators) {
            parts.push(format!("a{l}*"));
        }
        for l in lattice.subset_labels(self.annihilators).into_iter().rev() {
            parts.push(format!("a{l}"));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// Coefficients of an element of `A(I)` in the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub support: Subset,
    pub coeffs: DVector<C64>,
}

impl AlgebraElement {
    pub fn new(support: Subset, coeffs: DVector<C64>) -> Result<Self> {
        let expected = 1 << (2 * support.len());
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(AlgebraElement { support, coeffs })
    }

    pub fn monomial(support: Subset, m: Monomial) -> Self {
        let mut coeffs = DVector::zeros(1 << (2 * support.len()));
        coeffs[monomial_index(support, m)] = C64::new(1.0, 0.0);
        AlgebraElement { support, coeffs }
    }

    pub fn coefficient(&self, m: Monomial) -> C64 {
        self.coeffs[monomial_index(self.support, m)]
    }

    /// Adjoint, using `(a*_N a_M)^* = a*_M a_N`.
    pub fn adjoint(&self) -> AlgebraElement {
        let d = self.support.subset_count();
        let coeffs = DVector::from_fn(d * d, |i, _| {
            let (n, m) = (i / d, i % d);
            self.coeffs[m * d + n].conj()
        });
        AlgebraElement { support: self.support, coeffs }
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        max_abs(&(&self.coeffs - &other.coeffs))
    }
}

pub(crate) fn monomial_index(support: Subset, m: Monomial) -> usize {
    support.subset_index(m.creators) * support.subset_count() + support.subset_index(m.annihilators)
}

pub(crate) fn monomial_at(support: Subset, i: usize) -> Monomial {
    let d = support.subset_count();
    Monomial { creators: support.nth_subset(i / d), annihilators: support.nth_subset(i % d) }
}

pub(crate) fn max_abs(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All monomials of `A(I)` in index order.
pub fn monomial_basis(support: Subset) -> Vec<Monomial> {
    (0..1usize << (2 * support.len())).map(|i| monomial_at(support, i)).collect()
}

/// A linear map on `A(I)`, as a matrix on monomial coefficient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    support: Subset,
    matrix: DMatrix<C64>,
}

impl LinearMap {
    pub fn from_matrix(support: Subset, matrix: DMatrix<C64>) -> Result<Self> {
        let n = 1 << (2 * support.len());
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(LinearMap { support, matrix })
    }

    pub fn identity(support: Subset) -> Self {
        let n = 1 << (2 * support.len());
        LinearMap { support, matrix: DMatrix::identity(n, n) }
    }

    /// The parity automorphism `Θ_I`.
    pub fn parity(support: Subset) -> Self {
        let n = 1 << (2 * support.len());
        let diag = DVector::from_fn(n, |i, _| C64::new(monomial_at(support, i).parity(), 0.0));
        LinearMap { support, matrix: DMatrix::from_diagonal(&diag) }
    }

    pub fn support(&self) -> Subset {
        self.support
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_support(a.support)?;
        Ok(AlgebraElement { support: self.support, coeffs: &self.matrix * &a.coeffs })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        self.check_support(other.support)?;
        Ok(LinearMap { support: self.support, matrix: &self.matrix * &other.matrix })
    }

    /// `x·self + y·other`.
    pub fn combine(&self, x: C64, other: &LinearMap, y: C64) -> Result<LinearMap> {
        self.check_support(other.support)?;
        Ok(LinearMap { support: self.support, matrix: &self.matrix * x + &other.matrix * y })
    }

    /// Frobenius distance between the coefficient matrices.
    pub fn distance(&self, other: &LinearMap) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Whether the identity monomial is mapped to itself.
    pub fn is_unital(&self, tol: f64) -> bool {
        let one = AlgebraElement::monomial(self.support, Monomial::IDENTITY);
        max_abs(&(&self.matrix * &one.coeffs - &one.coeffs)) < tol
    }

    fn check_support(&self, other: Subset) -> Result<()> {
        if other != self.support {
            return Err(Error::SupportMismatch(format!("map on {:?} applied to {:?}", self.support, other)));
        }
        Ok(())
    }
}

/// `Θ(a) = θ a θ`, computed as a sign flip on odd monomials.
pub fn theta_auto(a: &AlgebraElement) -> AlgebraElement {
    let coeffs = DVector::from_fn(a.coeffs.len(), |i, _| a.coeffs[i] * monomial_at(a.support, i).parity());
    AlgebraElement { support: a.support, coeffs }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evenness {
    pub even: bool,
    pub deviation: f64,
}

/// Whether `map ∘ Θ = Θ ∘ map`, with the Frobenius deviation.
pub fn is_even(map: &LinearMap, tol: f64) -> Evenness {
    let theta = LinearMap::parity(map.support);
    let deviation = (&map.matrix * &theta.matrix - &theta.matrix * &map.matrix).norm();
    Evenness { even: deviation < tol, deviation }
}

/// The monomial basis of `A(I)` with its operators and the coordinate solve
/// against the faithful representation `π_I` on `H_I`.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    lattice: Lattice,
    support: Subset,
    monomials: Vec<Monomial>,
    operators: Vec<FockOperator>,
    restricted: Vec<DMatrix<C64>>,
    // columns are vec(π_I(m)), column-major
    vec_basis: DMatrix<C64>,
    coords: DMatrix<C64>,
}

impl AlgebraBasis {
    pub fn new(lattice: &Lattice, support: Subset) -> Result<Self> {
        if !support.is_subset_of(lattice.all()) {
            return Err(Error::NotInSupport(format!("{support:?}"), lattice.labels().to_vec()));
        }
        let monomials = monomial_basis(support);
        let operators: Vec<FockOperator> = monomials.iter().map(|m| m.operator(lattice)).collect();
        let restricted = operators.iter().map(|op| lattice.restrict(op, support, 1e-12)).collect::<Result<Vec<_>>>()?;
        let n = monomials.len();
        let mut vec_basis = DMatrix::zeros(n, n);
        for (j, r) in restricted.iter().enumerate() {
            vec_basis.column_mut(j).copy_from_slice(r.as_slice());
        }
        let coords = vec_basis.clone().try_inverse().expect("monomials of A(I) are linearly independent");
        Ok(AlgebraBasis { lattice: lattice.clone(), support, monomials, operators, restricted, vec_basis, coords })
    }

    pub fn from_labels(lattice: &Lattice, labels: &[Label]) -> Result<Self> {
        Self::new(lattice, lattice.subset(labels)?)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn support(&self) -> Subset {
        self.support
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Side length `2^|I|` of the restricted matrices.
    pub fn local_dim(&self) -> usize {
        self.support.subset_count()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn operators(&self) -> &[FockOperator] {
        &self.operators
    }

    pub fn operator(&self, i: usize) -> &FockOperator {
        &self.operators[i]
    }

    pub fn restricted(&self, i: usize) -> &DMatrix<C64> {
        &self.restricted[i]
    }

    pub fn index_of(&self, m: Monomial) -> Option<usize> {
        (m.creators.is_subset_of(self.support) && m.annihilators.is_subset_of(self.support))
            .then(|| monomial_index(self.support, m))
    }

    /// Monomial from label lists: `creators` and `annihilators` as sets.
    pub fn monomial(&self, creators: &[Label], annihilators: &[Label]) -> Result<Monomial> {
        let m = Monomial { creators: self.lattice.subset(creators)?, annihilators: self.lattice.subset(annihilators)? };
        match self.index_of(m) {
            Some(_) => Ok(m),
            None => Err(Error::NotInSupport(m.describe(&self.lattice), self.lattice.subset_labels(self.support))),
        }
    }

    pub fn element(&self, m: Monomial) -> AlgebraElement {
        AlgebraElement::monomial(self.support, m)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { support: self.support, coeffs: DVector::zeros(self.len()) }
    }

    /// Coordinates of a matrix on `H_I`, read as `π_I` of some element.
    pub fn expand_restricted(&self, m: &DMatrix<C64>) -> Result<AlgebraElement> {
        let d = self.local_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
        let v = DVector::from_column_slice(m.as_slice());
        Ok(AlgebraElement { support: self.support, coeffs: &self.coords * v })
    }

    /// Coordinates of a full-space operator; errors when it is not in `A(I)`.
    pub fn expand(&self, op: &FockOperator) -> Result<AlgebraElement> {
        let block = self.lattice.restrict(op, self.support, MEMBERSHIP_TOL).map_err(|e| match e {
            Error::NotInvariant(r) => Error::NotInAlgebra(r),
            other => other,
        })?;
        let el = self.expand_restricted(&block)?;
        let residual = (op.matrix() - self.reconstruct(&el).matrix()).norm();
        if residual > MEMBERSHIP_TOL {
            return Err(Error::NotInAlgebra(residual));
        }
        Ok(el)
    }

    pub fn reconstruct(&self, a: &AlgebraElement) -> FockOperator {
        let dim = self.lattice.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (c, op) in a.coeffs.iter().zip(&self.operators) {
            if c.norm() != 0.0 {
                m += op.matrix() * *c;
            }
        }
        FockOperator(m)
    }

    pub fn reconstruct_restricted(&self, a: &AlgebraElement) -> DMatrix<C64> {
        let d = self.local_dim();
        let v = &self.vec_basis * &a.coeffs;
        DMatrix::from_column_slice(d, d, v.as_slice())
    }

    pub fn product(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let p = self.reconstruct_restricted(a) * self.reconstruct_restricted(b);
        self.expand_restricted(&p).expect("dimensions agree")
    }

    /// Tabulates a map given by its action on full-space operators.
    pub fn map_from_fn(&self, f: impl Fn(&FockOperator) -> FockOperator) -> Result<LinearMap> {
        let mut matrix = DMatrix::zeros(self.len(), self.len());
        for (j, op) in self.operators.iter().enumerate() {
            let image = self.expand(&f(op))?;
            matrix.set_column(j, &image.coeffs);
        }
        Ok(LinearMap { support: self.support, matrix })
    }

    /// Tabulates a map given by its action in the representation `π_I`.
    pub fn map_from_restricted_fn(&self, f: impl Fn(&DMatrix<C64>) -> DMatrix<C64>) -> Result<LinearMap> {
        let mut matrix = DMatrix::zeros(self.len(), self.len());
        for (j, r) in self.restricted.iter().enumerate() {
            let image = self.expand_restricted(&f(r))?;
            matrix.set_column(j, &image.coeffs);
        }
        Ok(LinearMap { support: self.support, matrix })
    }

    /// The same map acting on column-major `vec(π_I(a))`.
    pub fn matrix_picture(&self, map: &LinearMap) -> Result<DMatrix<C64>> {
        map.check_support(self.support)?;
        Ok(&self.vec_basis * &map.matrix * &self.coords)
    }

    pub fn from_matrix_picture(&self, superop: &DMatrix<C64>) -> Result<LinearMap> {
        if superop.nrows() != self.len() || superop.ncols() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: superop.nrows() });
        }
        Ok(LinearMap { support: self.support, matrix: &self.coords * superop * &self.vec_basis })
    }
}

/// The lattice relabeling `η: A(I) → A(ι(I))`, `a_l ↦ a_{ι(l)}`, realised as
/// a signed permutation of monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Relabeling {
    domain: Subset,
    codomain: Subset,
    pairs: Vec<(Label, Label)>,
    matrix: DMatrix<C64>,
}

impl Relabeling {
    pub fn new(lattice: &Lattice, pairs: &[(Label, Label)]) -> Result<Self> {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        let from: Vec<Label> = pairs.iter().map(|p| p.0).collect();
        let to: Vec<Label> = pairs.iter().map(|p| p.1).collect();
        let domain = lattice.subset(&from).map_err(|e| match e {
            Error::DuplicateLabel(l) => Error::InvalidRelabeling(format!("{l} mapped twice")),
            other => other,
        })?;
        let codomain = lattice.subset(&to).map_err(|e| match e {
            Error::DuplicateLabel(l) => Error::InvalidRelabeling(format!("{l} is hit twice")),
            other => other,
        })?;
        if !domain.is_disjoint(codomain) {
            return Err(Error::OverlappingSupports(from, to));
        }
        let n = 1 << (2 * domain.len());
        let d = domain.subset_count();
        // pairs are sorted by source label, i.e. by lattice position
        let target_of = |p: usize| to[domain.positions().position(|q| q == p).expect("in domain")];
        let image = |s: Subset| -> (Subset, f64) {
            let seq: Vec<Label> = s.positions().map(target_of).collect();
            let signed = lattice.sequence_sign(&seq).expect("labels validated");
            (signed.subset, signed.sign as f64)
        };
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            let m = monomial_at(domain, i);
            let (nc, sn) = image(m.creators);
            let (ma, sm) = image(m.annihilators);
            let row = codomain.subset_index(nc) * d + codomain.subset_index(ma);
            matrix[(row, i)] = C64::new(sn * sm, 0.0);
        }
        Ok(Relabeling { domain, codomain, pairs, matrix })
    }

    pub fn domain(&self) -> Subset {
        self.domain
    }

    pub fn codomain(&self) -> Subset {
        self.codomain
    }

    pub fn pairs(&self) -> &[(Label, Label)] {
        &self.pairs
    }

    pub fn image_of(&self, label: Label) -> Option<Label> {
        self.pairs.iter().find(|p| p.0 == label).map(|p| p.1)
    }

    /// Coefficient-space matrix of `η`.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.support != self.domain {
            return Err(Error::SupportMismatch("η applied outside its domain".into()));
        }
        Ok(AlgebraElement { support: self.codomain, coeffs: &self.matrix * &a.coeffs })
    }

    pub fn apply_inverse(&self, b: &AlgebraElement) -> Result<AlgebraElement> {
        if b.support != self.codomain {
            return Err(Error::SupportMismatch("η⁻¹ applied outside its domain".into()));
        }
        Ok(AlgebraElement { support: self.domain, coeffs: self.matrix.transpose() * &b.coeffs })
    }

    /// The copy `η ∘ map ∘ η⁻¹` of a map on `A(I)` to `A(ι(I))`.
    pub fn copy_map(&self, map: &LinearMap) -> Result<LinearMap> {
        if map.support != self.domain {
            return Err(Error::SupportMismatch("copied map must act on the domain of ι".into()));
        }
        Ok(LinearMap { support: self.codomain, matrix: &self.matrix * &map.matrix * self.matrix.transpose() })
    }

    /// The inverse transport `η⁻¹ ∘ map ∘ η` of a map on `A(ι(I))`.
    pub fn pull_back_map(&self, map: &LinearMap) -> Result<LinearMap> {
        if map.support != self.codomain {
            return Err(Error::SupportMismatch("pulled-back map must act on ι(I)".into()));
        }
        Ok(LinearMap { support: self.domain, matrix: self.matrix.transpose() * &map.matrix * &self.matrix })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn setup() -> (Lattice, AlgebraBasis) {
        let l = Lattice::new(&[1, 2, 3, 4]).unwrap();
        let b = AlgebraBasis::from_labels(&l, &[1, 2]).unwrap();
        (l, b)
    }

    #[test]
    fn basis_sizes() {
        let l = Lattice::new(&[1, 2, 3, 4]).unwrap();
        let one = AlgebraBasis::from_labels(&l, &[1]).unwrap();
        assert_eq!(one.len(), 4);
        let descr: Vec<String> = one.monomials().iter().map(|m| m.describe(&l)).collect();
        assert_eq!(descr, vec!["1", "a1", "a1*", "a1* a1"]);
        assert_eq!(AlgebraBasis::from_labels(&l, &[1, 2]).unwrap().len(), 16);
        let empty = AlgebraBasis::from_labels(&l, &[]).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty.operator(0), &l.identity());
        assert!(AlgebraBasis::from_labels(&l, &[5]).is_err());
    }

    #[test]
    fn monomial_operator_ordering() {
        let (l, b) = setup();
        let m = b.monomial(&[1, 2], &[1, 2]).unwrap();
        let a1 = l.annihilation(1).unwrap();
        let a2 = l.annihilation(2).unwrap();
        let expect = &(&(&a1.adjoint() * &a2.adjoint()) * &a2) * &a1;
        assert_eq!(m.operator(&l), expect);
        assert_eq!(m.describe(&l), "a1* a2* a2 a1");
    }

    #[test]
    fn expand_examples() {
        let (l, b) = setup();
        let one = b.expand(&l.identity()).unwrap();
        assert_eq!(one, b.element(Monomial::IDENTITY));
        let a1 = l.annihilation(1).unwrap();
        let e = b.expand(&(&a1 * &a1.adjoint())).unwrap();
        let n1 = b.monomial(&[1], &[1]).unwrap();
        assert!((e.coefficient(Monomial::IDENTITY) - c(1.0)).norm() < 1e-12);
        assert!((e.coefficient(n1) + c(1.0)).norm() < 1e-12);
        assert!(e.coeffs.iter().map(|z| z.norm()).sum::<f64>() < 2.0 + 1e-12);
        let a3 = l.annihilation(3).unwrap();
        assert!(matches!(b.expand(&a3), Err(Error::NotInAlgebra(_))));
        // a_3^* a_3 preserves H_I but is not in A(I)
        assert!(matches!(b.expand(&(&a3.adjoint() * &a3)), Err(Error::NotInAlgebra(_))));
    }

    #[test]
    fn adjoint_swaps_creators_and_annihilators() {
        let (_, b) = setup();
        for (i, op) in b.operators().iter().enumerate() {
            let el = b.element(b.monomials()[i]).adjoint();
            assert_eq!(&b.reconstruct(&el), &op.adjoint());
        }
    }

    #[test]
    fn eta_examples() {
        let (l, b) = setup();
        let eta = Relabeling::new(&l, &[(1, 3), (2, 4)]).unwrap();
        let j = AlgebraBasis::from_labels(&l, &[3, 4]).unwrap();
        let a1 = b.element(b.monomial(&[], &[1]).unwrap());
        assert_eq!(eta.apply(&a1).unwrap(), j.element(j.monomial(&[], &[3]).unwrap()));
        let one = b.element(Monomial::IDENTITY);
        assert_eq!(eta.apply(&one).unwrap(), j.element(Monomial::IDENTITY));
        let x = b.expand(&(&l.creation(1).unwrap() * &l.annihilation(2).unwrap())).unwrap();
        let y = j.expand(&(&l.creation(3).unwrap() * &l.annihilation(4).unwrap())).unwrap();
        assert!(eta.apply(&x).unwrap().max_abs_diff(&y) < 1e-12);
        assert!(Relabeling::new(&l, &[(1, 2), (2, 3)]).is_err());
        assert!(Relabeling::new(&l, &[(1, 3), (2, 3)]).is_err());
    }

    /// A label-reversing ι forces sign corrections in the transport.
    #[test]
    fn eta_with_order_reversing_bijection() {
        let (l, b) = setup();
        let eta = Relabeling::new(&l, &[(1, 4), (2, 3)]).unwrap();
        let j = AlgebraBasis::from_labels(&l, &[3, 4]).unwrap();
        for (i, m) in b.monomials().iter().enumerate() {
            // build η(m) by substituting generators in the operator product
            let mut op = l.identity();
            for lab in l.subset_labels(m.creators) {
                op = &op * &l.creation(eta.image_of(lab).unwrap()).unwrap();
            }
            for lab in l.subset_labels(m.annihilators).into_iter().rev() {
                op = &op * &l.annihilation(eta.image_of(lab).unwrap()).unwrap();
            }
            let got = eta.apply(&b.element(b.monomials()[i])).unwrap();
            assert!(got.max_abs_diff(&j.expand(&op).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn theta_examples() {
        let (l, b) = setup();
        let a1 = b.element(b.monomial(&[], &[1]).unwrap());
        assert_eq!(theta_auto(&a1).coeffs, -a1.coeffs.clone());
        let n1 = b.element(b.monomial(&[1], &[1]).unwrap());
        assert_eq!(theta_auto(&n1), n1);
        let one = b.element(Monomial::IDENTITY);
        assert_eq!(theta_auto(&one), one);
        // agrees with conjugation by θ on every monomial
        let th = l.parity_operator();
        for (i, op) in b.operators().iter().enumerate() {
            let conj = b.expand(&(&(&th * op) * &th)).unwrap();
            assert!(conj.max_abs_diff(&theta_auto(&b.element(b.monomials()[i]))) < 1e-12);
        }
    }

    #[test]
    fn evenness() {
        let l = Lattice::new(&[1, 2]).unwrap();
        let b = AlgebraBasis::from_labels(&l, &[1]).unwrap();
        assert!(is_even(&LinearMap::identity(b.support()), 1e-12).even);
        let k = &l.identity() + &l.annihilation(1).unwrap();
        let m = b.map_from_fn(|a| &(&k * a) * &k.adjoint()).unwrap();
        let ev = is_even(&m, 1e-12);
        assert!(!ev.even);
        // K 1 K* = 1 + a1 + a1* + a1 a1*, whose odd part (a1 + a1*) has norm √2;
        // the commutator with Θ doubles each odd entry in the column of 1
        assert!(ev.deviation > 1.0);
    }

    #[test]
    fn matrix_picture_round_trip() {
        let (_, b) = setup();
        let m = LinearMap::parity(b.support());
        let sup = b.matrix_picture(&m).unwrap();
        assert!(b.from_matrix_picture(&sup).unwrap().distance(&m) < 1e-12);
    }
}
