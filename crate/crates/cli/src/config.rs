//! Scenario files: one JSON document describing the lattice, `ι`, the
//! probability table and the dynamics.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use fermilattice::dynamics::LatticePermutation;
use fermilattice::scenarios::{BasisCycleScenario, PermutationScenario};
use fermilattice::{Label, Lattice, LatticeConfig, ProbabilityTable, Subset};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub lattice: Vec<Label>,
    #[serde(rename = "I")]
    pub support: Vec<Label>,
    pub iota: Iota,
    pub probs: Vec<ProbEntry>,
    pub sigma: Option<Vec<Vec<Label>>>,
    pub basis_cycle: Option<Vec<Vec<Label>>>,
    pub lambda: f64,
    pub t_grid: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub duality: bool,
}

/// `{"1": 3, "2": 4}` or `[[1, 3], [2, 4]]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Iota {
    Map(BTreeMap<String, Label>),
    Pairs(Vec<(Label, Label)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbEntry {
    pub subset: Vec<Label>,
    pub p: Prob,
}

/// A double, or a string holding a decimal or a fraction `"1/3"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Prob {
    Number(f64),
    Text(String),
}

impl Prob {
    fn value(&self) -> Result<f64> {
        match self {
            Prob::Number(x) => Ok(*x),
            Prob::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((num, den)) => {
                        let num: f64 = num.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
                        let den: f64 = den.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
                        if den == 0.0 {
                            bail!("zero denominator in {s:?}");
                        }
                        Ok(num / den)
                    }
                    None => s.parse().with_context(|| format!("{s:?} is not a number")),
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Dynamics {
    Permutation(Vec<Vec<Label>>),
    BasisCycle(Vec<Vec<Label>>),
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub lattice: Lattice,
    pub support: Vec<Label>,
    pub iota: Vec<(Label, Label)>,
    pub probs: ProbabilityTable,
    pub dynamics: Dynamics,
    pub lambda: f64,
    pub t_grid: Vec<f64>,
    pub tolerance: Option<f64>,
    pub duality: bool,
}

/// The built scenario: state, dynamics and the conjugation copy.
pub enum Built {
    Permutation(PermutationScenario),
    BasisCycle(BasisCycleScenario),
}

fn sorted_strictly(labels: &[Label]) -> bool {
    labels.windows(2).all(|w| w[0] < w[1])
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).context("malformed scenario file")?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let lattice = Lattice::new(&raw.lattice)?;
        let mut iota: Vec<(Label, Label)> = match raw.iota {
            Iota::Pairs(p) => p,
            Iota::Map(m) => m
                .into_iter()
                .map(|(k, v)| Ok((k.trim().parse::<Label>().with_context(|| format!("iota key {k:?}"))?, v)))
                .collect::<Result<_>>()?,
        };
        iota.sort();
        let mut support = raw.support.clone();
        support.sort();
        let domain: Vec<Label> = iota.iter().map(|p| p.0).collect();
        if domain != support {
            bail!("iota must be defined exactly on I = {support:?}, found domain {domain:?}");
        }
        let i = lattice.subset(&support)?;
        let mut entries = Vec::with_capacity(raw.probs.len());
        for e in &raw.probs {
            if !sorted_strictly(&e.subset) {
                bail!("subset {:?} must be a strictly increasing label list", e.subset);
            }
            entries.push((e.subset.clone(), e.p.value()?));
        }
        let probs = ProbabilityTable::from_entries(&lattice, i, &entries)?;
        let dynamics = match (raw.sigma, raw.basis_cycle) {
            (Some(c), None) => Dynamics::Permutation(c),
            (None, Some(c)) => {
                if let Some(s) = c.iter().find(|s| !sorted_strictly(s)) {
                    bail!("basis cycle entry {s:?} must be a strictly increasing label list");
                }
                Dynamics::BasisCycle(c)
            }
            _ => bail!("exactly one of \"sigma\" and \"basis_cycle\" must be given"),
        };
        if let Some(t) = raw.tolerance {
            if !(t > 0.0) {
                bail!("tolerance must be positive, found {t}");
            }
        }
        let scenario = Scenario {
            lattice,
            support,
            iota,
            probs,
            dynamics,
            lambda: raw.lambda,
            t_grid: raw.t_grid.unwrap_or_default(),
            tolerance: raw.tolerance,
            duality: raw.duality,
        };
        // surface every library-side validation error at load time
        scenario.build()?;
        Ok(scenario)
    }

    pub fn lattice_config(&self) -> Result<LatticeConfig> {
        Ok(LatticeConfig::new(&self.lattice, &self.iota, self.probs.clone())?)
    }

    pub fn build(&self) -> Result<Built> {
        let config = self.lattice_config()?;
        if let Some(&t) = self.t_grid.iter().find(|t| !(**t >= 0.0)) {
            bail!("t_grid entries must be non-negative, found {t}");
        }
        Ok(match &self.dynamics {
            Dynamics::Permutation(cycles) => {
                let sigma = LatticePermutation::from_cycles(&self.lattice, &self.support, cycles)?;
                Built::Permutation(PermutationScenario::new(config, sigma, self.lambda)?)
            }
            Dynamics::BasisCycle(cycle) => {
                let subsets: Vec<Subset> =
                    cycle.iter().map(|s| self.lattice.subset(s)).collect::<fermilattice::Result<_>>()?;
                Built::BasisCycle(BasisCycleScenario::new(config, &subsets, self.lambda)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SECTION6: &str = r#"{
        "lattice": [1, 2, 3, 4], "I": [1, 2], "iota": {"1": 3, "2": 4},
        "probs": [{"subset": [], "p": "1/4"}, {"subset": [1], "p": 0.25},
                  {"subset": [2], "p": "0.25"}, {"subset": [1, 2], "p": 0.25}],
        "basis_cycle": [[], [1], [1, 2], [2]], "lambda": 0.5
    }"#;

    #[test]
    fn parses_both_iota_forms() {
        let a = Scenario::parse(SECTION6).unwrap();
        let b = Scenario::parse(&SECTION6.replace(r#"{"1": 3, "2": 4}"#, "[[2, 4], [1, 3]]")).unwrap();
        assert_eq!(a.iota, b.iota);
        assert_eq!(a.iota, vec![(1, 3), (2, 4)]);
        assert!(a.probs.values().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Scenario::parse(&SECTION6.replace("\"1/4\"", "0.15")).is_err());
        assert!(Scenario::parse(&SECTION6.replace("\"lambda\": 0.5", "\"lambda\": 1.5")).is_err());
        assert!(Scenario::parse(&SECTION6.replace("[1, 2], \"p\": 0.25", "[2, 1], \"p\": 0.25")).is_err());
        let both = SECTION6.replace("\"lambda\"", "\"sigma\": [[1, 2]], \"lambda\"");
        assert!(Scenario::parse(&both).is_err());
        assert!(Scenario::parse(&SECTION6.replace("\"iota\": {\"1\": 3, \"2\": 4}", "\"iota\": {\"1\": 2, \"2\": 4}"))
            .is_err());
        assert!(Scenario::parse("{").is_err());
    }
}
