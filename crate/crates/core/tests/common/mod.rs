#![allow(dead_code)]

use fermilattice::algebra::LinearMap;
use fermilattice::fock::{annihilate_at, create_at};
use fermilattice::{Lattice, ProbabilityTable, StateVector, Subset, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random table on `D_I`; strictly positive when `strict`, otherwise with a
/// chance of exact zeros.
pub fn random_table(rng: &mut impl Rng, support: Subset, strict: bool) -> ProbabilityTable {
    let mut raw: Vec<f64> = (0..support.subset_count())
        .map(|_| if !strict && rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.05..1.0) })
        .collect();
    if raw.iter().all(|p| *p == 0.0) {
        raw[0] = 1.0;
    }
    let total: f64 = raw.iter().sum();
    ProbabilityTable::new(support, raw.iter().map(|p| p / total).collect()).unwrap()
}

pub fn random_complex_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_map(rng: &mut impl Rng, support: Subset) -> LinearMap {
    let n = 1 << (2 * support.len());
    LinearMap::from_matrix(support, random_complex_matrix(rng, n)).unwrap()
}

/// Sign of a permutation given as an image vector, from its cycle count.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            p = perm[p];
        }
    }
    if (perm.len() - cycles).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Applies `a_label` to a vector amplitude by amplitude, without any
/// operator matrix.
pub fn annihilate_vector(lattice: &Lattice, label: i64, v: &StateVector) -> StateVector {
    let pos = lattice.position(label).unwrap();
    let mut out = nalgebra::DVector::zeros(v.dim());
    for (i, z) in v.amplitudes().iter().enumerate() {
        if let Some((t, s)) = annihilate_at(pos, Subset::from_bits(i as u32)) {
            out[t.index()] += z * s;
        }
    }
    StateVector(out)
}

pub fn create_vector(lattice: &Lattice, label: i64, v: &StateVector) -> StateVector {
    let pos = lattice.position(label).unwrap();
    let mut out = nalgebra::DVector::zeros(v.dim());
    for (i, z) in v.amplitudes().iter().enumerate() {
        if let Some((t, s)) = create_at(pos, Subset::from_bits(i as u32)) {
            out[t.index()] += z * s;
        }
    }
    StateVector(out)
}

pub fn report(id: u32, name: &str, ok: bool, detail: String) -> bool {
    println!("[{}] criterion {id:>2}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}
