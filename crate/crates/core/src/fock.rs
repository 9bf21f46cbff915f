//! Antisymmetric Fock space over a finite lattice.
//!
//! The space is realised directly on occupation numbers: a basis vector `f_M`
//! is stored at the index whose bit pattern marks the labels of `M`, with bit
//! `k` standing for the `k`-th smallest label. The canonical representative
//! of every subset is its ascending label sequence, so any other ordering of
//! the same labels is that vector times the sign of the sorting permutation.
//!
//! Creation and annihilation act by the usual parity count: `a_l^*` and
//! `a_l` pick up `(-1)^k` where `k` is the number of occupied labels below
//! `l`. This is the same rule as inserting `l` in front of the canonical
//! sequence and re-sorting, without ever touching the unsymmetrised tensor
//! space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::{Label, C64};

/// Largest lattice accepted by [`Lattice::new`].
pub const DEFAULT_CAP: usize = 16;

/// Hard limit from the `u32` occupation mask.
const MASK_BITS: usize = 31;

/// A set of lattice sites, stored as a bitmask over the ascending label order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Index of `f_M` in the full Fock basis.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains_position(self, pos: usize) -> bool {
        self.0 >> pos & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Positions (not labels) of the members, ascending.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |p| bits >> p & 1 == 1)
    }

    /// Number of subsets of `self`.
    pub fn subset_count(self) -> usize {
        1 << self.len()
    }

    /// The `k`-th subset of `self` in canonical order: bit `b` of `k` selects
    /// the `b`-th smallest member.
    pub fn nth_subset(self, k: usize) -> Subset {
        let mut out = 0u32;
        for (b, pos) in self.positions().enumerate() {
            if k >> b & 1 == 1 {
                out |= 1 << pos;
            }
        }
        Subset(out)
    }

    /// Inverse of [`Subset::nth_subset`]; `sub` must be contained in `self`.
    pub fn subset_index(self, sub: Subset) -> usize {
        debug_assert!(sub.is_subset_of(self));
        self.positions().enumerate().filter(|&(_, pos)| sub.contains_position(pos)).fold(0, |acc, (b, _)| acc | 1 << b)
    }

    /// All subsets of `self` in canonical order (this is `D_I`).
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        (0..self.subset_count()).map(move |k| self.nth_subset(k))
    }
}

/// A finite label set with its canonical (ascending) order fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    labels: Vec<Label>,
}

/// A label sequence together with the sign relating `f_seq` to the canonical
/// basis vector of its underlying set. The sign is zero when a label repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSequence {
    pub entries: Vec<Label>,
    pub sign: i8,
    pub subset: Subset,
}

impl Lattice {
    pub fn new(labels: &[Label]) -> Result<Self> {
        Self::with_cap(labels, DEFAULT_CAP)
    }

    pub fn with_cap(labels: &[Label], cap: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLattice);
        }
        let cap = cap.min(MASK_BITS);
        if labels.len() > cap {
            return Err(Error::LatticeTooLarge { size: labels.len(), cap });
        }
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0]));
        }
        Ok(Lattice { labels: sorted })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Dimension `2^|L|` of the Fock space.
    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn all(&self) -> Subset {
        Subset((1u32 << self.size()) - 1)
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.labels.binary_search(&label).map_err(|_| Error::UnknownLabel(label))
    }

    pub fn label_at(&self, pos: usize) -> Label {
        self.labels[pos]
    }

    /// Subset from a list of labels; repeated labels are rejected.
    pub fn subset(&self, labels: &[Label]) -> Result<Subset> {
        let mut bits = 0u32;
        for &l in labels {
            let bit = 1 << self.position(l)?;
            if bits & bit != 0 {
                return Err(Error::DuplicateLabel(l));
            }
            bits |= bit;
        }
        Ok(Subset(bits))
    }

    /// Members of `s` as labels, ascending.
    pub fn subset_labels(&self, s: Subset) -> Vec<Label> {
        s.positions().map(|p| self.labels[p]).collect()
    }

    pub fn sequence_sign(&self, seq: &[Label]) -> Result<SignedSequence> {
        let positions = seq.iter().map(|&l| self.position(l)).collect::<Result<Vec<_>>>()?;
        let mut bits = 0u32;
        let mut repeated = false;
        for &p in &positions {
            repeated |= bits >> p & 1 == 1;
            bits |= 1 << p;
        }
        let sign = if repeated {
            0
        } else {
            let inversions = positions
                .iter()
                .enumerate()
                .map(|(i, &p)| positions[i + 1..].iter().filter(|&&q| q < p).count())
                .sum::<usize>();
            if inversions % 2 == 0 {
                1
            } else {
                -1
            }
        };
        Ok(SignedSequence { entries: seq.to_vec(), sign, subset: Subset(bits) })
    }

    pub fn basis_vector(&self, s: Subset) -> StateVector {
        let mut v = DVector::zeros(self.dim());
        v[s.index()] = C64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn vacuum(&self) -> StateVector {
        self.basis_vector(Subset::EMPTY)
    }

    /// `f_{(l_1,...,l_n)}` for an arbitrary label sequence.
    pub fn f_vector(&self, seq: &[Label]) -> Result<StateVector> {
        let signed = self.sequence_sign(seq)?;
        let mut v = DVector::zeros(self.dim());
        if signed.sign != 0 {
            v[signed.subset.index()] = C64::new(signed.sign as f64, 0.0);
        }
        Ok(StateVector(v))
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator(DMatrix::identity(self.dim(), self.dim()))
    }

    pub fn creation(&self, label: Label) -> Result<FockOperator> {
        let pos = self.position(label)?;
        Ok(self.action_matrix(|occ| create_at(pos, occ)))
    }

    pub fn annihilation(&self, label: Label) -> Result<FockOperator> {
        let pos = self.position(label)?;
        Ok(self.action_matrix(|occ| annihilate_at(pos, occ)))
    }

    /// The parity operator `θ`, `+1` on even occupation and `-1` on odd.
    pub fn parity_operator(&self) -> FockOperator {
        let diag = DVector::from_fn(self.dim(), |i, _| C64::new(parity_sign(Subset(i as u32)), 0.0));
        FockOperator(DMatrix::from_diagonal(&diag))
    }

    fn action_matrix(&self, act: impl Fn(Subset) -> Option<(Subset, f64)>) -> FockOperator {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            if let Some((row, sign)) = act(Subset(col as u32)) {
                m[(row.index(), col)] = C64::new(sign, 0.0);
            }
        }
        FockOperator(m)
    }

    /// Largest deviation from the canonical anticommutation relations over
    /// all label pairs, measured in operator norm.
    pub fn car_deviation(&self) -> f64 {
        let ann: Vec<FockOperator> = self.labels.iter().map(|&l| self.annihilation(l).expect("own label")).collect();
        let cre: Vec<FockOperator> = ann.iter().map(FockOperator::adjoint).collect();
        let id = self.identity();
        let mut worst = 0.0f64;
        for k in 0..ann.len() {
            for l in 0..ann.len() {
                worst = worst.max(ann[k].anticommutator(&ann[l]).op_norm());
                let mut mixed = ann[k].anticommutator(&cre[l]);
                if k == l {
                    mixed = &mixed - &id;
                }
                worst = worst.max(mixed.op_norm());
            }
        }
        worst
    }

    /// The block of `op` on `H_I = span{f_M : M ⊆ I}`, in the canonical order
    /// of `D_I`. This is the representation `π_I` on elements of `A(I)`.
    pub fn restrict(&self, op: &FockOperator, support: Subset, tol: f64) -> Result<DMatrix<C64>> {
        if !support.is_subset_of(self.all()) {
            return Err(Error::NotInSupport(format!("{support:?}"), self.labels.clone()));
        }
        let idx: Vec<usize> = support.subsets().map(Subset::index).collect();
        let n = idx.len();
        let m = op.matrix();
        let mut off = 0.0;
        for &c in &idx {
            for r in 0..self.dim() {
                if !Subset(r as u32).is_subset_of(support) {
                    off += m[(r, c)].norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        if off > tol {
            return Err(Error::NotInvariant(off));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])]))
    }
}

/// Matrix-free action of `a_l^*` on `f_occ`, where `pos` is the position of
/// `l`: the resulting basis state and sign, or `None` if `l` is occupied.
pub fn create_at(pos: usize, occ: Subset) -> Option<(Subset, f64)> {
    if occ.contains_position(pos) {
        return None;
    }
    Some((Subset(occ.0 | 1 << pos), below_sign(pos, occ)))
}

/// Matrix-free action of `a_l` on `f_occ`; `None` if `l` is unoccupied.
pub fn annihilate_at(pos: usize, occ: Subset) -> Option<(Subset, f64)> {
    if !occ.contains_position(pos) {
        return None;
    }
    Some((Subset(occ.0 & !(1 << pos)), below_sign(pos, occ)))
}

fn below_sign(pos: usize, occ: Subset) -> f64 {
    if (occ.0 & ((1u32 << pos) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn parity_sign(s: Subset) -> f64 {
    if s.len().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A vector in the Fock space, in the occupation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub DVector<C64>);

impl StateVector {
    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn amplitude(&self, s: Subset) -> C64 {
        self.0[s.index()]
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, c: C64) -> StateVector {
        StateVector(&self.0 * c)
    }

    /// Largest coordinate-wise difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        StateVector(&self.0 + &rhs.0)
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        StateVector(&self.0 - &rhs.0)
    }
}

/// A dense operator on the Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator(pub DMatrix<C64>);

impl FockOperator {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator(self.0.adjoint())
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector(&self.0 * &v.0)
    }

    pub fn scale(&self, c: C64) -> FockOperator {
        FockOperator(&self.0 * c)
    }

    pub fn anticommutator(&self, other: &FockOperator) -> FockOperator {
        FockOperator(&self.0 * &other.0 + &other.0 * &self.0)
    }

    pub fn commutator(&self, other: &FockOperator) -> FockOperator {
        FockOperator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> f64 {
        op_norm(&self.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let id = DMatrix::identity(self.dim(), self.dim());
        op_norm(&(self.0.adjoint() * &self.0 - id)) < tol
    }
}

pub(crate) fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator(&self.0 * &rhs.0)
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator(&self.0 - &rhs.0)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        FockOperator(-&self.0)
    }
}

impl fmt::Display for SignedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            1 => "+",
            -1 => "-",
            _ => "0",
        };
        write!(f, "{sign}{:?}", self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4() -> Lattice {
        Lattice::new(&[1, 2, 3, 4]).unwrap()
    }

    #[test]
    fn lattice_construction() {
        let l = l4();
        assert_eq!(l.size(), 4);
        assert_eq!(l.dim(), 16);
        assert_eq!(Lattice::new(&[]), Err(Error::EmptyLattice));
        assert_eq!(Lattice::new(&[1, 1]), Err(Error::DuplicateLabel(1)));
        let big: Vec<Label> = (0..17).collect();
        assert!(matches!(Lattice::new(&big), Err(Error::LatticeTooLarge { .. })));
        assert_eq!(Lattice::new(&[7, -2, 3]).unwrap().labels(), &[-2, 3, 7]);
    }

    #[test]
    fn sequence_signs() {
        let l = l4();
        assert_eq!(l.sequence_sign(&[1, 2]).unwrap().sign, 1);
        assert_eq!(l.sequence_sign(&[2, 1]).unwrap().sign, -1);
        assert_eq!(l.sequence_sign(&[1, 1]).unwrap().sign, 0);
        assert_eq!(l.sequence_sign(&[]).unwrap().sign, 1);
        assert_eq!(l.sequence_sign(&[3, 1, 2]).unwrap().sign, 1);
        assert_eq!(l.sequence_sign(&[9]), Err(Error::UnknownLabel(9)));
    }

    #[test]
    fn f_vectors() {
        let l = l4();
        assert_eq!(l.f_vector(&[]).unwrap(), l.vacuum());
        let f12 = l.f_vector(&[1, 2]).unwrap();
        assert_eq!(l.f_vector(&[2, 1]).unwrap(), f12.scale(C64::new(-1.0, 0.0)));
        assert_eq!(l.f_vector(&[1, 1]).unwrap().norm(), 0.0);
    }

    #[test]
    fn creation_and_annihilation_rules() {
        let l = l4();
        let a1s = l.creation(1).unwrap();
        assert_eq!(a1s.apply(&l.vacuum()), l.f_vector(&[1]).unwrap());
        let a3 = l.annihilation(3).unwrap();
        let f13 = l.f_vector(&[1, 3]).unwrap();
        assert_eq!(a3.apply(&f13), l.f_vector(&[1]).unwrap().scale(C64::new(-1.0, 0.0)));
        let a1 = l.annihilation(1).unwrap();
        assert_eq!(a1.apply(&l.f_vector(&[2]).unwrap()).norm(), 0.0);
        assert_eq!(a1.adjoint(), a1s);
        // a_l^* f_{(l_1..l_n)} = f_{(l, l_1..l_n)} for a non-canonical tail
        let a2s = l.creation(2).unwrap();
        let lhs = a2s.apply(&l.f_vector(&[4, 1]).unwrap());
        assert_eq!(lhs, l.f_vector(&[2, 4, 1]).unwrap());
    }

    /// Brute-force antisymmetrizer on two-particle tensors: `f_{(i,j)}` is
    /// represented as `(e_i⊗e_j - e_j⊗e_i)/√2` and `a_l` contracts the first
    /// slot with `√2`. The canonical ordering fixes `f_{(i,j)}` for `i<j`.
    #[test]
    fn annihilation_matches_antisymmetrizer() {
        let n = 4;
        let pair = |i: usize, j: usize| {
            let mut t = vec![0.0; n * n];
            t[i * n + j] += 1.0 / 2f64.sqrt();
            t[j * n + i] -= 1.0 / 2f64.sqrt();
            t
        };
        // a_3 f_{(1,3)} in the tensor picture: √2 · Σ_j t[2, j] e_j
        let t = pair(0, 2);
        let out: Vec<f64> = (0..n).map(|j| 2f64.sqrt() * t[2 * n + j]).collect();
        assert_eq!(out, vec![-1.0, 0.0, 0.0, 0.0]);
        let l = l4();
        let v = l.annihilation(3).unwrap().apply(&l.f_vector(&[1, 3]).unwrap());
        assert_eq!(v.amplitude(l.subset(&[1]).unwrap()), C64::new(out[0], 0.0));
    }

    #[test]
    fn car_relations_hold() {
        let l = l4();
        let a1 = l.annihilation(1).unwrap();
        let a2 = l.annihilation(2).unwrap();
        assert_eq!(a1.anticommutator(&a1.adjoint()), l.identity());
        assert!(a1.anticommutator(&a2).op_norm() == 0.0);
        assert!(l.car_deviation() < 1e-12);
    }

    #[test]
    fn parity() {
        let l = l4();
        let th = l.parity_operator();
        assert_eq!(th.apply(&l.vacuum()), l.vacuum());
        let f1 = l.f_vector(&[1]).unwrap();
        assert_eq!(th.apply(&f1), f1.scale(C64::new(-1.0, 0.0)));
        let a1s = l.creation(1).unwrap();
        assert_eq!(&(&th * &a1s) * &th, -&a1s);
        assert_eq!(&th * &th, l.identity());
        assert_eq!(th.adjoint(), th);
    }

    #[test]
    fn restriction() {
        let l = l4();
        let i1 = l.subset(&[1]).unwrap();
        let id = l.restrict(&l.identity(), l.subset(&[1, 2]).unwrap(), 1e-12).unwrap();
        assert_eq!(id, DMatrix::identity(4, 4));
        let a1 = l.annihilation(1).unwrap();
        let r = l.restrict(&a1, i1, 1e-12).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]));
        let n1 = l.restrict(&(&a1.adjoint() * &a1), i1, 1e-12).unwrap();
        assert_eq!(n1, DMatrix::from_row_slice(2, 2, &[zero, zero, zero, one]));
        let a3s = l.creation(3).unwrap();
        assert!(matches!(l.restrict(&a3s, i1, 1e-12), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn subset_indexing() {
        let s = Subset::from_bits(0b1010);
        let subs: Vec<u32> = s.subsets().map(Subset::bits).collect();
        assert_eq!(subs, vec![0b0000, 0b0010, 0b1000, 0b1010]);
        for (k, sub) in s.subsets().enumerate() {
            assert_eq!(s.subset_index(sub), k);
        }
    }
}
