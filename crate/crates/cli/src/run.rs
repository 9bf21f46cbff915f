//! The three commands. Each returns a JSON report, an overall verdict and a
//! few summary lines for standard error.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use fermilattice::algebra::{is_even, AlgebraBasis, LinearMap};
use fermilattice::balance::{fermionic_sqdb, fermionic_sqdb_continuous, prob_symmetry, standard_sqdb_for_map};
use fermilattice::duality::{dual_residual, fermionic_dual, gram, involution_residual, positivity_probe};
use fermilattice::dynamics::lindblad;
use fermilattice::states::reduction_report;
use fermilattice::{BalanceReport, EntangledState, Lattice, Subset, C64};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::config::{Built, Dynamics, Scenario};

/// Involution and adjoint residual thresholds for `dual`.
const ADJOINT_TOL: f64 = 1e-9;
const INVOLUTION_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-12;

pub struct Outcome {
    pub report: Value,
    pub passed: bool,
    pub summary: Vec<String>,
}

struct Timer {
    start: Instant,
    lines: Vec<String>,
}

impl Timer {
    fn new() -> Self {
        Timer { start: Instant::now(), lines: Vec::new() }
    }

    fn lap(&mut self, what: &str) {
        self.lines.push(format!("  {what}: {:.1} ms", self.start.elapsed().as_secs_f64() * 1e3));
        self.start = Instant::now();
    }
}

fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &DMatrix<C64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| cx(m[(i, j)])).collect())).collect())
}

fn subset_name(lattice: &Lattice, s: Subset) -> String {
    let labels: Vec<String> = lattice.subset_labels(s).iter().map(|l| l.to_string()).collect();
    format!("({})", labels.join(","))
}

fn echo(s: &Scenario) -> Value {
    let i = s.lattice.subset(&s.support).expect("validated");
    let probs: Vec<Value> =
        i.subsets().map(|m| json!({"subset": s.lattice.subset_labels(m), "p": s.probs.get(m)})).collect();
    let dynamics = match &s.dynamics {
        Dynamics::Permutation(c) => json!({"sigma": c}),
        Dynamics::BasisCycle(c) => json!({"basis_cycle": c}),
    };
    json!({
        "lattice": s.lattice.labels(),
        "I": s.support,
        "iota": s.iota,
        "probs": probs,
        "dynamics": dynamics,
        "lambda": s.lambda,
        "t_grid": s.t_grid,
    })
}

fn fermionic_json(r: &BalanceReport, bi: &AlgebraBasis, bj: &AlgebraBasis) -> Value {
    let (a, b) = r.argmax_pair;
    let lattice = bi.lattice();
    json!({
        "verdict": r.verdict,
        "max_violation": r.max_violation,
        "tolerance": r.tolerance,
        "argmax": {
            "a": bi.monomials()[a].describe(lattice),
            "b": bj.monomials()[b].describe(lattice),
            "lhs": cx(r.lhs[(a, b)]),
            "rhs": cx(r.rhs[(a, b)]),
        },
    })
}

fn standard_json(r: &BalanceReport, basis: &AlgebraBasis) -> Value {
    let support = basis.support();
    let n = support.subset_count();
    let unit = |u: usize| {
        let row = support.nth_subset(u % n);
        let col = support.nth_subset(u / n);
        format!("|{}><{}|", subset_name(basis.lattice(), row), subset_name(basis.lattice(), col))
    };
    let (a, b) = r.argmax_pair;
    json!({
        "verdict": r.verdict,
        "max_violation": r.max_violation,
        "tolerance": r.tolerance,
        "argmax": {"a": unit(a), "b": unit(b)},
    })
}

/// Dynamics on `A(I)`, the state, and the copy obtained by conjugation.
struct Parts {
    state: EntangledState,
    tau: LinearMap,
    conj_copy: LinearMap,
}

fn parts(built: &Built) -> Result<Parts> {
    Ok(match built {
        Built::Permutation(p) => {
            Parts { state: p.state.clone(), tau: p.dynamics.map.clone(), conj_copy: p.copy_by_conjugation()? }
        }
        Built::BasisCycle(b) => {
            Parts { state: b.state.clone(), tau: b.dynamics.map.clone(), conj_copy: b.copy_by_conjugation.map.clone() }
        }
    })
}

pub fn check(scenario: &Scenario, tol: f64) -> Result<Outcome> {
    let mut timer = Timer::new();
    let built = scenario.build()?;
    let Parts { state, tau, conj_copy } = parts(&built)?;
    let cfg = &state.config;
    let (bi, bj) = (cfg.basis_i(), cfg.basis_j());
    timer.lap("build");

    let reduction = reduction_report(&state)?;
    let cert = state.entanglement_certificate(1e-12);
    timer.lap("reductions");

    let fermionic = fermionic_sqdb(&tau, &state, tol)?;
    let standard = standard_sqdb_for_map(bi, &tau, cfg.probs(), tol)?;
    timer.lap("balance");

    let continuous = if scenario.t_grid.is_empty() {
        Vec::new()
    } else {
        let reports = fermionic_sqdb_continuous(&lindblad_of(&built), &state, &scenario.t_grid, tol)?;
        timer.lap("semigroup");
        reports
    };

    let eta_copy = cfg.eta().copy_map(&tau)?;
    let evenness = is_even(&tau, 1e-12);
    let mut report = json!({
        "command": "check",
        "scenario": echo(scenario),
        "entanglement": {"reduced_rank": cert.reduced_rank, "norm": cert.norm, "entangled": cert.entangled},
        "reduction": {"domain": reduction.domain, "copy": reduction.copy},
        "fermionic_sqdb": fermionic_json(&fermionic, bi, bj),
        "standard_sqdb": standard_json(&standard, bi),
        "copy_agreement": eta_copy.distance(&conj_copy),
        "evenness": {"even": evenness.even, "deviation": evenness.deviation},
    });
    let mut verdicts = vec![("fermionic_sqdb", fermionic.verdict), ("standard_sqdb", standard.verdict)];
    if !continuous.is_empty() {
        let rows: Vec<Value> = scenario
            .t_grid
            .iter()
            .zip(&continuous)
            .map(|(t, r)| json!({"t": t, "verdict": r.verdict, "max_violation": r.max_violation}))
            .collect();
        let ok = continuous.iter().all(|r| r.verdict);
        report["fermionic_sqdb_continuous"] = json!({"verdict": ok, "times": rows});
        verdicts.push(("fermionic_sqdb_continuous", ok));
    }
    if let Built::Permutation(p) = &built {
        let sym = prob_symmetry(cfg.probs(), &p.sigma)?;
        report["prob_symmetry"] = json!({"inv": sym.inv, "inv2": sym.inv2, "inv_prime": sym.inv_prime});
    }
    if scenario.duality {
        report["duality"] = duality_json(&state, &tau, &eta_copy);
        timer.lap("duality");
    }
    let passed = verdicts.iter().all(|v| v.1);
    report["verdicts"] = Value::Object(verdicts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect());
    report["passed"] = json!(passed);

    let mut summary = vec![
        format!(
            "fermionic SQDB: {} (max violation {:.3e} at {} / {})",
            verdict_word(fermionic.verdict),
            fermionic.max_violation,
            report["fermionic_sqdb"]["argmax"]["a"].as_str().unwrap_or(""),
            report["fermionic_sqdb"]["argmax"]["b"].as_str().unwrap_or(""),
        ),
        format!("standard SQDB:  {} (max violation {:.3e})", verdict_word(standard.verdict), standard.max_violation),
    ];
    if !continuous.is_empty() {
        let worst = continuous.iter().map(|r| r.max_violation).fold(0.0, f64::max);
        summary.push(format!("semigroup:      max violation {worst:.3e} over {} times", continuous.len()));
    }
    summary.push(format!("reductions:     max deviation {:.3e}", reduction.max()));
    summary.push("timings:".into());
    summary.extend(timer.lines);
    Ok(Outcome { report, passed, summary })
}

fn lindblad_of(built: &Built) -> fermilattice::Semigroup {
    match built {
        Built::Permutation(p) => lindblad(&p.dynamics),
        Built::BasisCycle(b) => lindblad(&b.dynamics),
    }
}

fn duality_json(state: &EntangledState, tau: &LinearMap, eta_copy: &LinearMap) -> Value {
    let g = gram(state);
    let condition = if g.condition.is_finite() { json!(g.condition) } else { Value::Null };
    let mut out = json!({"gram_rank": g.rank, "gram_dim": g.matrix.nrows(), "condition": condition});
    match fermionic_dual(tau, state) {
        Ok(dual) => {
            out["dual_vs_copy"] = json!(dual.distance(eta_copy));
            out["adjoint_residual"] = json!(dual_residual(tau, &dual, state));
            out["involution_residual"] = involution_residual(tau, state).map_or(Value::Null, |r| json!(r));
        }
        Err(e) => out["error"] = json!(e.to_string()),
    }
    out
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub const SECTION5: &str = r#"{
  "lattice": [1, 2, 3, 4], "I": [1, 2], "iota": {"1": 3, "2": 4},
  "probs": [{"subset": [], "p": 0.4}, {"subset": [1], "p": 0.2},
            {"subset": [2], "p": 0.2}, {"subset": [1, 2], "p": 0.2}],
  "sigma": [[1, 2]], "lambda": 0.5, "t_grid": [0.1, 1, 5], "duality": true
}"#;

pub const SECTION6: &str = r#"{
  "lattice": [1, 2, 3, 4], "I": [1, 2], "iota": {"1": 3, "2": 4},
  "probs": [{"subset": [], "p": "1/4"}, {"subset": [1], "p": "1/4"},
            {"subset": [2], "p": "1/4"}, {"subset": [1, 2], "p": "1/4"}],
  "basis_cycle": [[], [1], [1, 2], [2]], "lambda": 0.5
}"#;

pub const DUALITY: &str = r#"{
  "lattice": [1, 2, 3, 4], "I": [1, 2], "iota": {"1": 3, "2": 4},
  "probs": [{"subset": [], "p": 0.4}, {"subset": [1], "p": 0.3},
            {"subset": [2], "p": 0.2}, {"subset": [1, 2], "p": 0.1}],
  "sigma": [[1, 2]], "lambda": 0.5, "duality": true
}"#;

pub fn demo(name: &str, tol: f64) -> Result<Outcome> {
    match name {
        "section5" => {
            let mut out = check(&Scenario::parse(SECTION5)?, tol)?;
            out.report["command"] = json!("demo section5");
            out.report["expected"] = json!("fermionic and standard SQDB hold, also along the semigroup");
            Ok(out)
        }
        "section6" => demo_section6(tol),
        "duality" => demo_duality(),
        other => bail!("unknown demo {other:?} (expected section5, section6 or duality)"),
    }
}

fn demo_section6(tol: f64) -> Result<Outcome> {
    let scenario = Scenario::parse(SECTION6)?;
    let mut out = check(&scenario, tol)?;
    let Built::BasisCycle(sc) = scenario.build()? else { unreachable!("section6 uses a basis cycle") };
    let cfg = &sc.state.config;
    let (bi, bj) = (cfg.basis_i(), cfg.basis_j());
    let alpha = &sc.dynamics.map;
    let alpha_copy = cfg.eta().copy_map(alpha)?;
    let a1 = bi.element(bi.monomial(&[], &[1])?);
    let a4s = bj.element(bj.monomial(&[4], &[])?);
    let lhs = sc.state.phi(&(&bi.reconstruct(&alpha.apply(&a1)?) * &bj.reconstruct(&a4s)));
    let rhs = sc.state.phi(&(&bi.reconstruct(&a1) * &bj.reconstruct(&alpha_copy.apply(&a4s)?)));
    let witness_ok = (lhs - C64::new(0.25, 0.0)).norm() < tol && (rhs + C64::new(0.25, 0.0)).norm() < tol;
    let standard = out.report["verdicts"]["standard_sqdb"].as_bool() == Some(true);
    let fermionic = out.report["verdicts"]["fermionic_sqdb"].as_bool() == Some(true);
    out.passed = witness_ok && standard && !fermionic;
    out.report["command"] = json!("demo section6");
    out.report["expected"] = json!("standard SQDB holds, fermionic SQDB fails at (a1, a4*) with +1/4 against -1/4");
    out.report["witness"] = json!({"a": "a1", "b": "a4*", "lhs": cx(lhs), "rhs": cx(rhs)});
    out.report["passed"] = json!(out.passed);
    out.summary.insert(0, format!("phi(alpha(a1) a4*) = {:+.6}, phi(a1 alpha^iota(a4*)) = {:+.6}", lhs.re, rhs.re));
    Ok(out)
}

fn demo_duality() -> Result<Outcome> {
    let mut timer = Timer::new();
    let scenario = Scenario::parse(DUALITY)?;
    let built = scenario.build()?;
    let Parts { state, tau, .. } = parts(&built)?;
    let eta_copy = state.config.eta().copy_map(&tau)?;
    let duality = duality_json(&state, &tau, &eta_copy);
    timer.lap("duality");
    let probe = positivity_probe(&state, C64::new(0.0, 1.0), C64::new(1.0, 0.0), 1)?;
    timer.lap("probe");
    let full_rank = duality["gram_rank"] == duality["gram_dim"];
    let involution_ok = duality["involution_residual"].as_f64().is_some_and(|r| r < INVOLUTION_TOL);
    let witness = probe.a_min_eig >= -PSD_TOL && probe.b_min_eig >= -PSD_TOL && probe.value.im.abs() > 1e-6;
    let passed = full_rank && involution_ok && witness;
    let report = json!({
        "command": "demo duality",
        "scenario": echo(&scenario),
        "duality": duality,
        "positivity_probe": {
            "kappa": cx(C64::new(0.0, 1.0)),
            "lambda": cx(C64::new(1.0, 0.0)),
            "label": 1,
            "value": cx(probe.value),
            "a_min_eigenvalue": probe.a_min_eig,
            "b_min_eigenvalue": probe.b_min_eig,
            "phi_cd": cx(probe.phi_cd),
        },
        "expected": "full-rank Gram matrix, involutive dual, and a,b >= 0 with B_phi(a,b) not real",
        "passed": passed,
    });
    let mut summary = vec![
        format!("Gram rank {} of {}", report["duality"]["gram_rank"], report["duality"]["gram_dim"]),
        format!(
            "B_phi(a, b) = {:.6} {:+.6}i with min eigenvalues {:.3e}, {:.3e}",
            probe.value.re, probe.value.im, probe.a_min_eig, probe.b_min_eig
        ),
        "timings:".into(),
    ];
    summary.extend(timer.lines);
    Ok(Outcome { report, passed, summary })
}

/// `identity`, `tau`, `theta` or `semigroup:<t>`.
fn parse_map(spec: &str, built: &Built, tau: &LinearMap) -> Result<LinearMap> {
    let support = tau.support();
    match spec {
        "identity" => Ok(LinearMap::identity(support)),
        "tau" => Ok(tau.clone()),
        "theta" => Ok(LinearMap::parity(support)),
        _ => match spec.strip_prefix("semigroup:") {
            Some(t) => {
                let t: f64 = t.parse().with_context(|| format!("bad time in map spec {spec:?}"))?;
                Ok(lindblad_of(built).evolve(t)?)
            }
            None => bail!("unknown map {spec:?} (expected identity, tau, theta or semigroup:<t>)"),
        },
    }
}

pub fn dual(scenario: &Scenario, spec: &str) -> Result<Outcome> {
    let mut timer = Timer::new();
    let built = scenario.build()?;
    let Parts { state, tau, .. } = parts(&built)?;
    let map = parse_map(spec, &built, &tau)?;
    let cfg = &state.config;
    let dual = fermionic_dual(&map, &state)?;
    timer.lap("dual");
    let adjoint = dual_residual(&map, &dual, &state);
    let involution = involution_residual(&map, &state)?;
    let to_copy = dual.distance(&cfg.eta().copy_map(&map)?);
    timer.lap("residuals");
    let passed = adjoint < ADJOINT_TOL && involution < INVOLUTION_TOL;
    let bj = cfg.basis_j();
    let basis: Vec<String> = bj.monomials().iter().map(|m| m.describe(bj.lattice())).collect();
    let report = json!({
        "command": "dual",
        "scenario": echo(scenario),
        "map": spec,
        "dual": {"basis": basis, "matrix": matrix_json(dual.matrix())},
        "adjoint_residual": adjoint,
        "involution_residual": involution,
        "distance_to_copy": to_copy,
        "passed": passed,
    });
    let mut summary = vec![
        format!("dual of {spec}: adjoint residual {adjoint:.3e}, involution residual {involution:.3e}"),
        format!("distance to the relabelled copy: {to_copy:.3e}"),
        "timings:".into(),
    ];
    summary.extend(timer.lines);
    Ok(Outcome { report, passed, summary })
}
