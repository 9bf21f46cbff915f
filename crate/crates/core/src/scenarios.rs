//! Ready-made configurations for the worked examples: the permutation
//! mixture on `I` and the basis 4-cycle on `H_I` for `I = {1, 2}`.

use crate::algebra::LinearMap;
use crate::dynamics::{
    basis_cycle_unitary, mix_map, mix_map_local, permutation_unitary, LatticePermutation, MixtureDynamics,
};
use crate::error::{Error, Result};
use crate::fock::{Lattice, Subset};
use crate::states::{entangled_vector, EntangledState, LatticeConfig, ProbabilityTable};
use crate::Label;

/// A lattice, the labels of `I` and the pairs `(l, ι(l))`.
pub type DoubledLattice = (Lattice, Vec<Label>, Vec<(Label, Label)>);

/// `L = {1..2n}`, `I = {1..n}`, `ι(k) = k + n`.
pub fn doubled_lattice(n: usize) -> Result<DoubledLattice> {
    let n = n as Label;
    let lattice = Lattice::new(&(1..=2 * n).collect::<Vec<_>>())?;
    let support: Vec<Label> = (1..=n).collect();
    let iota = support.iter().map(|&k| (k, k + n)).collect();
    Ok((lattice, support, iota))
}

/// The permutation example: `τ = λU*·U + (1−λ)U·U*` with `U` induced by `σ`.
#[derive(Clone, Debug)]
pub struct PermutationScenario {
    pub sigma: LatticePermutation,
    pub state: EntangledState,
    pub dynamics: MixtureDynamics,
}

impl PermutationScenario {
    pub fn new(config: LatticeConfig, sigma: LatticePermutation, lambda: f64) -> Result<Self> {
        if sigma.support() != config.eta().domain() {
            return Err(Error::SupportMismatch("σ must permute I".into()));
        }
        let u = permutation_unitary(config.lattice(), &sigma)?;
        let dynamics = mix_map(config.basis_i(), &u, lambda)?;
        let state = entangled_vector(&config)?;
        Ok(PermutationScenario { sigma, state, dynamics })
    }

    /// `τ^ι` realised as `λV*·V + (1−λ)V·V*` with `V` induced by `σ^ι`.
    pub fn copy_by_conjugation(&self) -> Result<LinearMap> {
        let cfg = &self.state.config;
        let v = permutation_unitary(cfg.lattice(), &self.sigma.transported(cfg.eta())?)?;
        Ok(mix_map(cfg.basis_j(), &v, self.dynamics.weight)?.map)
    }
}

/// The doubled lattice with a single cycle `(1 2 ... n)` on `I`.
pub fn cyclic_permutation(n: usize, probs: ProbabilityTable, lambda: f64) -> Result<PermutationScenario> {
    let (lattice, support, iota) = doubled_lattice(n)?;
    let config = LatticeConfig::new(&lattice, &iota, probs)?;
    let sigma = LatticePermutation::from_cycles(&lattice, &support, std::slice::from_ref(&support))?;
    PermutationScenario::new(config, sigma, lambda)
}

/// The basis-cycle example on `H_I`: `α = λU_I*·U_I + (1−λ)U_I·U_I*`.
#[derive(Clone, Debug)]
pub struct BasisCycleScenario {
    pub state: EntangledState,
    pub dynamics: MixtureDynamics,
    /// `α^ι` realised by conjugating with the copied cycle `V_J` on `H_J`.
    pub copy_by_conjugation: MixtureDynamics,
}

impl BasisCycleScenario {
    pub fn new(config: LatticeConfig, cycle: &[Subset], lambda: f64) -> Result<Self> {
        let lattice = config.lattice().clone();
        let eta = config.eta();
        let u = basis_cycle_unitary(&lattice, eta.domain(), cycle)?;
        let copied: Vec<Subset> =
            cycle.iter().map(|&s| lattice.subset(&config.copy_sequence(s))).collect::<Result<_>>()?;
        let v = basis_cycle_unitary(&lattice, eta.codomain(), &copied)?;
        let dynamics = mix_map_local(config.basis_i(), &u, lambda)?;
        let copy_by_conjugation = mix_map_local(config.basis_j(), &v, lambda)?;
        let state = entangled_vector(&config)?;
        Ok(BasisCycleScenario { state, dynamics, copy_by_conjugation })
    }
}

/// `L = {1,2,3,4}`, `I = {1,2}`, `ι = {1→3, 2→4}`, uniform `p = 1/4`, and the
/// cycle `f_∅ → f_(1) → f_(1,2) → f_(2) → f_∅`.
pub fn basis_four_cycle(lambda: f64) -> Result<BasisCycleScenario> {
    let (lattice, support, iota) = doubled_lattice(2)?;
    let i = lattice.subset(&support)?;
    let config = LatticeConfig::new(&lattice, &iota, ProbabilityTable::uniform(i))?;
    let cycle = [Subset::EMPTY, lattice.subset(&[1])?, lattice.subset(&[1, 2])?, lattice.subset(&[2])?];
    BasisCycleScenario::new(config, &cycle, lambda)
}
