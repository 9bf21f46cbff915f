//! Diagonal density matrices, the fermionic product state and the entangled
//! vector `Φ = Σ_M p_M^{1/2} f_{Mι(M)}` together with its state `φ`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::{AlgebraBasis, Relabeling};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, Lattice, StateVector, Subset};
use crate::{Label, C64};

/// Tolerance on `Σ p_M = 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Probabilities `p_M` for `M ∈ D_I`, indexed in the canonical order of `D_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    support: Subset,
    probs: Vec<f64>,
    strict: bool,
}

impl ProbabilityTable {
    /// Validates and renormalises; the sum may be off by at most
    /// [`PROB_SUM_TOL`].
    pub fn new(support: Subset, probs: Vec<f64>) -> Result<Self> {
        let n = support.subset_count();
        if probs.len() != n {
            return Err(Error::InvalidProbabilities(format!(
                "expected {n} entries for |I| = {}, found {}",
                support.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbabilities(format!("entry {p} is not a non-negative number")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("probabilities sum to {sum}, not 1")));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / sum).collect();
        let strict = probs.iter().all(|&p| p > 0.0);
        Ok(ProbabilityTable { support, probs, strict })
    }

    /// Table from `(subset labels, p)` entries; unlisted subsets get zero.
    pub fn from_entries(lattice: &Lattice, support: Subset, entries: &[(Vec<Label>, f64)]) -> Result<Self> {
        let mut probs = vec![0.0; support.subset_count()];
        let mut seen = vec![false; probs.len()];
        for (labels, p) in entries {
            let s = lattice.subset(labels)?;
            if !s.is_subset_of(support) {
                return Err(Error::InvalidProbabilities(format!("{labels:?} is not a subset of I")));
            }
            let k = support.subset_index(s);
            if seen[k] {
                return Err(Error::InvalidProbabilities(format!("{labels:?} listed twice")));
            }
            seen[k] = true;
            probs[k] = *p;
        }
        Self::new(support, probs)
    }

    pub fn uniform(support: Subset) -> Self {
        let n = support.subset_count();
        Self::new(support, vec![1.0 / n as f64; n]).expect("uniform table is valid")
    }

    /// `p_M ∝ weights[|M|]`, a table depending only on the length of `M`.
    pub fn by_length(support: Subset, weights: &[f64]) -> Result<Self> {
        if weights.len() != support.len() + 1 {
            return Err(Error::InvalidProbabilities(format!(
                "need {} length weights, found {}",
                support.len() + 1,
                weights.len()
            )));
        }
        let raw: Vec<f64> = support.subsets().map(|s| weights[s.len()]).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) || raw.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbabilities("length weights must be non-negative with positive total".into()));
        }
        Self::new(support, raw.iter().map(|w| w / total).collect())
    }

    pub fn support(&self) -> Subset {
        self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, s: Subset) -> f64 {
        self.probs[self.support.subset_index(s)]
    }

    /// All `p_M > 0`.
    pub fn is_strict(&self) -> bool {
        self.strict
    }
}

/// `x ⋈ y`, the rank-one operator `z ↦ x⟨y, z⟩`.
pub fn ket_bra(x: &StateVector, y: &StateVector) -> FockOperator {
    FockOperator(x.amplitudes() * y.amplitudes().adjoint())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    pub operator: FockOperator,
    pub support: Subset,
}

impl DensityOperator {
    pub fn trace(&self) -> C64 {
        self.operator.matrix().trace()
    }

    /// `Tr(ρ a)`.
    pub fn expectation(&self, a: &FockOperator) -> C64 {
        (self.operator.matrix() * a.matrix()).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.operator.matrix())
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.min()
}

/// `ρ_I = Σ_M p_M f_M ⋈ f_M`.
pub fn diagonal_density(lattice: &Lattice, probs: &ProbabilityTable) -> DensityOperator {
    let mut rho = DMatrix::zeros(lattice.dim(), lattice.dim());
    for (s, &p) in probs.support.subsets().zip(&probs.probs) {
        let f = lattice.basis_vector(s);
        rho += ket_bra(&f, &f).matrix() * C64::new(p, 0.0);
    }
    DensityOperator { operator: FockOperator(rho), support: probs.support }
}

/// `ρ = Σ_M Σ_N p_M q_N f_{MN} ⋈ f_{MN}` for disjoint supports.
pub fn product_state(lattice: &Lattice, p: &ProbabilityTable, q: &ProbabilityTable) -> Result<DensityOperator> {
    if !p.support.is_disjoint(q.support) {
        return Err(Error::OverlappingSupports(lattice.subset_labels(p.support), lattice.subset_labels(q.support)));
    }
    let mut rho = DMatrix::zeros(lattice.dim(), lattice.dim());
    for (m, &pm) in p.support.subsets().zip(&p.probs) {
        for (n, &qn) in q.support.subsets().zip(&q.probs) {
            let mut seq = lattice.subset_labels(m);
            seq.extend(lattice.subset_labels(n));
            let f = lattice.f_vector(&seq)?;
            rho += ket_bra(&f, &f).matrix() * C64::new(pm * qn, 0.0);
        }
    }
    Ok(DensityOperator { operator: FockOperator(rho), support: p.support.union(q.support) })
}

/// Everything that determines `Φ`: the lattice, the bijection `ι: I → J`
/// and the table `p_M`, plus the monomial bases of `A(I)` and `A(J)`.
#[derive(Clone, Debug)]
pub struct LatticeConfig {
    lattice: Lattice,
    eta: Relabeling,
    probs: ProbabilityTable,
    basis_i: AlgebraBasis,
    basis_j: AlgebraBasis,
}

impl LatticeConfig {
    pub fn new(lattice: &Lattice, iota: &[(Label, Label)], probs: ProbabilityTable) -> Result<Self> {
        let eta = Relabeling::new(lattice, iota)?;
        if eta.domain() != probs.support() {
            return Err(Error::SupportMismatch(format!(
                "probabilities are on {:?} but ι is defined on {:?}",
                lattice.subset_labels(probs.support()),
                lattice.subset_labels(eta.domain())
            )));
        }
        let basis_i = AlgebraBasis::new(lattice, eta.domain())?;
        let basis_j = AlgebraBasis::new(lattice, eta.codomain())?;
        Ok(LatticeConfig { lattice: lattice.clone(), eta, probs, basis_i, basis_j })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn eta(&self) -> &Relabeling {
        &self.eta
    }

    pub fn probs(&self) -> &ProbabilityTable {
        &self.probs
    }

    pub fn basis_i(&self) -> &AlgebraBasis {
        &self.basis_i
    }

    pub fn basis_j(&self) -> &AlgebraBasis {
        &self.basis_j
    }

    /// Labels of `ι(M)` in the order induced by `M`.
    pub fn copy_sequence(&self, m: Subset) -> Vec<Label> {
        self.lattice.subset_labels(m).into_iter().map(|l| self.eta.image_of(l).expect("ι defined on I")).collect()
    }

    /// `ρ_{ι(I)} = Σ_M p_M f_{ι(M)} ⋈ f_{ι(M)}`.
    pub fn copy_density(&self) -> Result<DensityOperator> {
        let mut rho = DMatrix::zeros(self.lattice.dim(), self.lattice.dim());
        for (m, &p) in self.probs.support.subsets().zip(&self.probs.probs) {
            let f = self.lattice.f_vector(&self.copy_sequence(m))?;
            rho += ket_bra(&f, &f).matrix() * C64::new(p, 0.0);
        }
        Ok(DensityOperator { operator: FockOperator(rho), support: self.eta.codomain() })
    }
}

#[derive(Clone, Debug)]
pub struct EntangledState {
    pub vector: StateVector,
    pub config: LatticeConfig,
}

/// Builds `Φ`, resolving each `f_{Mι(M)}` through the sequence sign.
pub fn entangled_vector(config: &LatticeConfig) -> Result<EntangledState> {
    let lattice = &config.lattice;
    let mut amps = nalgebra::DVector::zeros(lattice.dim());
    for (m, &p) in config.probs.support.subsets().zip(&config.probs.probs) {
        let mut seq = lattice.subset_labels(m);
        seq.extend(config.copy_sequence(m));
        let signed = lattice.sequence_sign(&seq)?;
        amps[signed.subset.index()] += C64::new(signed.sign as f64 * p.sqrt(), 0.0);
    }
    Ok(EntangledState { vector: StateVector(amps), config: config.clone() })
}

/// Builds `Φ` by applying creation operators to the vacuum instead,
/// `f_{(l_1..l_n)} = a*_{l_1}···a*_{l_n} f_∅`.
pub fn entangled_vector_by_creation(config: &LatticeConfig) -> Result<StateVector> {
    let lattice = &config.lattice;
    let mut phi = StateVector(nalgebra::DVector::zeros(lattice.dim()));
    for (m, &p) in config.probs.support.subsets().zip(&config.probs.probs) {
        let mut seq = lattice.subset_labels(m);
        seq.extend(config.copy_sequence(m));
        let mut v = lattice.vacuum();
        for &l in seq.iter().rev() {
            v = lattice.creation(l)?.apply(&v);
        }
        phi = &phi + &v.scale(C64::new(p.sqrt(), 0.0));
    }
    Ok(phi)
}

impl EntangledState {
    /// `φ(a) = ⟨Φ, aΦ⟩`.
    pub fn phi(&self, a: &FockOperator) -> C64 {
        self.vector.inner(&a.apply(&self.vector))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.config.lattice
    }

    /// The density matrix on `H_I` representing `φ` restricted to `A(I)`,
    /// recovered from `φ` alone: `R_{ij} = φ(π_I^{-1}(E_{ji}))`.
    pub fn reduced_density(&self) -> DMatrix<C64> {
        let basis = &self.config.basis_i;
        let d = basis.local_dim();
        DMatrix::from_fn(d, d, |i, j| {
            let mut unit = DMatrix::zeros(d, d);
            unit[(j, i)] = C64::new(1.0, 0.0);
            let el = basis.expand_restricted(&unit).expect("square of the right size");
            self.phi(&basis.reconstruct(&el))
        })
    }

    /// Rank of the reduced state on `A(I)` together with the norm of `Φ`.
    /// A unit vector whose reduction has rank at least two is entangled.
    pub fn entanglement_certificate(&self, tol: f64) -> EntanglementCertificate {
        let r = self.reduced_density();
        let eig = SymmetricEigen::new((&r + r.adjoint()) * C64::new(0.5, 0.0)).eigenvalues;
        let reduced_rank = eig.iter().filter(|&&x| x > tol).count();
        let norm = self.vector.norm();
        EntanglementCertificate { reduced_rank, norm, entangled: reduced_rank >= 2 && (norm - 1.0).abs() < tol }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementCertificate {
    pub reduced_rank: usize,
    pub norm: f64,
    pub entangled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionReport {
    /// `max_a |φ(a) − Tr(ρ_I a)|` over monomials of `A(I)`.
    pub domain: f64,
    /// `max_b |φ(b) − Tr(ρ_{ι(I)} b)|` over monomials of `A(ι(I))`.
    pub copy: f64,
}

impl ReductionReport {
    pub fn max(&self) -> f64 {
        self.domain.max(self.copy)
    }
}

pub fn reduction_report(state: &EntangledState) -> Result<ReductionReport> {
    let cfg = &state.config;
    let rho_i = diagonal_density(&cfg.lattice, &cfg.probs);
    let rho_j = cfg.copy_density()?;
    let dev = |basis: &AlgebraBasis, rho: &DensityOperator| {
        basis.operators().iter().map(|a| (state.phi(a) - rho.expectation(a)).norm()).fold(0.0, f64::max)
    };
    Ok(ReductionReport { domain: dev(&cfg.basis_i, &rho_i), copy: dev(&cfg.basis_j, &rho_j) })
}
