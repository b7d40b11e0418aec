//! Acceptance gate: one PASS/FAIL line per criterion over a generated suite.
//!
//! Runs as a plain binary (`harness = false`) so the summary is always
//! printed. Exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use ofl_core::audit::{names, AuditLog};
use ofl_core::frac::Connection;
use ofl_core::harness::run::{prepare, run_prepared, Prepared};
use ofl_core::harness::sweep::{run_grid, write_csv, Grid};
use ofl_core::harness::{generate, Family, GeneratorSpec, Mode, RunConfig, RunReport};
use ofl_core::instance::Instance;
use ofl_core::rounding::moment_bound_slack;
use ofl_core::{ExactFrac, Frac, InstanceFile, Int};

const SIZES: [(usize, usize, usize); 4] = [(4, 6, 4), (8, 10, 6), (12, 16, 8), (16, 20, 10)];
const SEEDS: u64 = 13;

#[derive(Default, Clone)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<String>,
}

#[derive(Default)]
struct Audits(BTreeMap<String, Tally>);

impl Audits {
    fn absorb(&mut self, label: &str, report: &RunReport) {
        for (name, r) in report.audits.as_ref().expect("audited run") {
            let t = self.0.entry(name.clone()).or_default();
            t.checks += r.checks;
            t.failures += r.failures;
            if t.first.is_none() {
                t.first = r.first_failure.as_ref().map(|f| format!("{label}: {f}"));
            }
        }
    }

    /// Passes when every named check ran at least once and never failed.
    fn verdict(&self, list: &[&str]) -> (bool, String) {
        let mut ok = true;
        let mut parts = Vec::new();
        for &n in list {
            let t = self.0.get(n).cloned().unwrap_or_default();
            ok &= t.checks > 0 && t.failures == 0;
            parts.push(format!("{n} {}/{}", t.checks - t.failures, t.checks));
            if let Some(f) = &t.first {
                parts.push(format!("first failure: {f}"));
            }
        }
        (ok, parts.join(", "))
    }
}

struct Outcome {
    label: String,
    int: RunReport,
    det: RunReport,
}

fn suite() -> Vec<(String, InstanceFile)> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for &(nf, nc, na) in &SIZES {
            for seed in 0..SEEDS {
                let spec = GeneratorSpec::new(family, nf, nc, na, seed);
                out.push((
                    format!("{family}/{nf}x{nc}x{na}/s{seed}"),
                    generate(&spec).unwrap(),
                ));
            }
        }
    }
    out
}

fn audited(mode: Mode) -> RunConfig {
    RunConfig::new(mode).with_audit(AuditLog::enabled())
}

fn evaluate(label: &str, prep: &Prepared) -> Outcome {
    let int =
        run_prepared(prep, &audited(Mode::Int)).unwrap_or_else(|e| panic!("{label}: int: {e}"));
    let det =
        run_prepared(prep, &audited(Mode::Det)).unwrap_or_else(|e| panic!("{label}: det: {e}"));
    Outcome {
        label: label.to_string(),
        int,
        det,
    }
}

/// Exact-arithmetic fractional run: structure and `x ∈ [0, 1]` after every
/// update. Returns (updates checked, first violation).
fn exact_structure(inst: &Instance, requests: &[usize]) -> (u64, Option<String>) {
    let mut frac = ExactFrac::new(inst);
    let mut audit = AuditLog::enabled();
    let mut checked = 0;
    for &c in requests {
        frac.arrive(c).unwrap();
        let bound = frac.update_bound();
        let mut n = 0;
        while frac.serving_value(c).unwrap() < BigRational::one() {
            frac.update_operation(c).unwrap();
            n += 1;
            assert!(n <= bound, "exact run did not terminate");
            checked += 1;
            let row = frac.state().x(c).unwrap();
            let unit = row
                .iter()
                .all(|x| *x >= Connection::zero() && *x <= Connection::one());
            let structure = ofl_core::frac::check_structure(row, frac.state().saturated(c));
            audit
                .record(names::FRAC_STRUCTURE, unit && structure, || {
                    format!("client {c} update {n}: {row:?}")
                })
                .unwrap();
        }
    }
    (
        checked,
        audit
            .entry(names::FRAC_STRUCTURE)
            .and_then(|e| e.first_failure.clone()),
    )
}

fn walkthrough() -> InstanceFile {
    InstanceFile::from_json(
        r#"{
        "facilities": [{"id": "f1", "cost": 2}, {"id": "f2", "cost": 2}],
        "clients": ["c", "d"],
        "edges": [
            {"facility": "f1", "client": "c", "cost": 1},
            {"facility": "f2", "client": "c", "cost": 2}
        ],
        "requests": ["c"]
    }"#,
    )
    .unwrap()
}

fn check_walkthrough() -> (bool, String) {
    let prep = prepare(&walkthrough()).unwrap();
    let inst = &prep.instance;
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut fails = Vec::new();
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            fails.push(what.to_string());
        }
    };

    let mut exact = ExactFrac::new(inst);
    let out = exact.serve_client(0, &mut AuditLog::strict()).unwrap();
    let duals = exact.duals().unwrap();
    expect("updates = 4", out.updates == 4);
    expect("γ = 4", duals.gamma[0] == 4);
    expect("α = [0,1,3]", duals.alpha[0] == [0, 1, 3]);
    expect("β = [4,3,1]", duals.beta[0] == [4, 3, 1]);
    expect("y_f1 = 19/16", *exact.y(0) == r(19, 16));
    expect("y_f2 = 1/4", *exact.y(1) == r(1, 4));
    expect("primal = 47/8", exact.primal_value() == r(47, 8));
    expect("dual = 4", exact.dual_value() == 4);
    expect("τ = 1", exact.good_distance(0).unwrap().tau == 1);

    let mut float = Frac::new(inst);
    float.serve_client(0, &mut AuditLog::strict()).unwrap();
    expect("float y_f1", (float.y(0) - 1.1875).abs() <= 1e-12);
    expect("float y_f2", (float.y(1) - 0.25).abs() <= 1e-12);
    expect(
        "float primal",
        (float.primal_value() - 5.875).abs() <= 1e-12,
    );

    let mut int = Int::new(inst);
    let rec = int.serve(0, &mut AuditLog::strict()).unwrap();
    expect(
        "INT opens f1, connects at 1, total 3",
        rec.opened == [0] && rec.connection_cost == 1 && int.total_cost() == 3,
    );

    let det = run_prepared(
        &prep,
        &RunConfig::new(Mode::Det).with_audit(AuditLog::strict()),
    )
    .unwrap();
    expect("OPT = 3", det.costs.opt == Some(3));
    expect(
        "DET total 3 in phase 1",
        det.costs.det_total == Some(3) && det.det.as_ref().unwrap().final_phase == 1,
    );

    let detail = if fails.is_empty() {
        "4 updates, γ=4, y=(19/16, 1/4), primal 47/8, τ=1, INT 3, DET 3, OPT 3".to_string()
    } else {
        format!("mismatches: {}", fails.join("; "))
    };
    (fails.is_empty(), detail)
}

fn check_moment_bound() -> (bool, String) {
    let qs: Vec<f64> = (0..=50).map(|i| i as f64 / 100.0).collect();
    let ps: Vec<f64> = (0..=120)
        .map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / 120.0))
        .collect();
    let mut worst = f64::INFINITY;
    for &q in &qs {
        for &p in &ps {
            worst = worst.min(moment_bound_slack(q, p));
        }
    }
    let points = qs.len() * ps.len();
    (
        points >= 5000 && worst >= -1e-12,
        format!("{points} grid points, min slack {worst:.3e}"),
    )
}

fn check_determinism(sample: &[(String, InstanceFile)]) -> (bool, String) {
    let mut runs = 0;
    for (label, file) in sample {
        let prep = prepare(file).unwrap();
        for mode in [Mode::Frac, Mode::Int, Mode::Det] {
            let a = run_prepared(&prep, &audited(mode)).unwrap().to_json();
            let b = run_prepared(&prepare(file).unwrap(), &audited(mode))
                .unwrap()
                .to_json();
            if a != b {
                return (false, format!("{label} {mode}: reports differ"));
            }
            runs += 1;
        }
    }
    let spec = GeneratorSpec::new(Family::LayeredDistance, 6, 8, 5, 11);
    if generate(&spec).unwrap().to_json() != generate(&spec).unwrap().to_json() {
        return (false, "generator output differs".into());
    }
    let grid = Grid::from_json(
        r#"{"families": ["uniform-random", "star", "set-cover-like", "layered-distance"], "sizes": [[4, 5, 3]], "seeds": 3}"#,
    )
    .unwrap();
    let csv = || {
        let mut buf = Vec::new();
        write_csv(&run_grid(&grid).unwrap(), &mut buf).unwrap();
        buf
    };
    if csv() != csv() {
        return (false, "sweep CSV differs".into());
    }
    (
        true,
        format!("{runs} repeated runs, generator and 12-row sweep byte-identical"),
    )
}

fn main() {
    let start = Instant::now();
    let suite = suite();
    let prepared: Vec<(String, Prepared)> = suite
        .iter()
        .map(|(l, f)| (l.clone(), prepare(f).unwrap()))
        .collect();
    let outcomes: Vec<Outcome> = prepared.par_iter().map(|(l, p)| evaluate(l, p)).collect();

    let mut audits = Audits::default();
    for o in &outcomes {
        audits.absorb(&o.label, &o.int);
        audits.absorb(&o.label, &o.det);
    }

    let mut lines: Vec<(usize, &str, bool, String)> = Vec::new();
    let mut add = |n: usize, title: &'static str, (ok, detail): (bool, String)| {
        lines.push((n, title, ok, detail))
    };

    add(
        1,
        "primal/dual coupling per update",
        audits.verdict(&[names::FRAC_PRIMAL_DUAL_STEP, names::FRAC_PRIMAL_LE_3DUAL]),
    );
    add(
        2,
        "dual near-feasibility",
        audits.verdict(&[
            names::FRAC_AUGMENT_BOUND,
            names::FRAC_ALPHA_BOUND,
            names::FRAC_BETA_BOUND,
            names::FRAC_DUAL_EQUALITY,
        ]),
    );

    let exact_sample: Vec<&(String, Prepared)> = prepared
        .iter()
        .filter(|(_, p)| p.instance.num_facilities() <= 8)
        .collect();
    let exact: Vec<(u64, Option<String>)> = exact_sample
        .par_iter()
        .map(|(_, p)| exact_structure(&p.instance, &p.requests))
        .collect();
    let exact_updates: u64 = exact.iter().map(|e| e.0).sum();
    let exact_fail = exact.iter().find_map(|e| e.1.clone());
    let (ok3, d3) = audits.verdict(&[names::FRAC_STRUCTURE, names::FRAC_MONOTONE]);
    add(
        3,
        "prefix structure, x in [0,1]",
        (
            ok3 && exact_fail.is_none() && exact_updates > 0,
            format!(
                "{d3}; exact rationals on {} instances, {exact_updates} updates{}",
                exact_sample.len(),
                exact_fail.map_or(String::new(), |f| format!(", first failure: {f}"))
            ),
        ),
    );
    add(
        4,
        "good distance",
        audits.verdict(&[names::FRAC_GOOD_DISTANCE]),
    );
    add(
        5,
        "potential starts at 2ℓ and never increases",
        audits.verdict(&[
            names::ROUND_POTENTIAL_INITIAL,
            names::ROUND_POTENTIAL_MONOTONE,
            names::ROUND_POTENTIAL_CAP,
        ]),
    );
    add(
        6,
        "rounding covering and opening cost",
        audits.verdict(&[names::ROUND_COVERING, names::ROUND_OPENING_BOUND]),
    );
    add(
        7,
        "INT feasible, connection ≤ 2·FRAC",
        audits.verdict(&[
            names::INT_FEASIBLE,
            names::INT_CONNECTION_TOTAL,
            names::INT_CONNECTION_CLIENT,
        ]),
    );
    add(8, "two-point moment inequality grid", check_moment_bound());

    let (ok9, d9) = audits.verdict(&[
        names::DET_FEASIBLE,
        names::DET_PHASE_SPEND,
        names::DET_BUDGET_PREFIX,
        names::DET_PREPURCHASE,
        names::DET_FINAL_PHASE,
    ]);
    let mut worst_ratio = 0.0f64;
    let mut envelope_ok = true;
    let mut max_q = 0.0f64;
    for o in &outcomes {
        let det = o.det.det.as_ref().unwrap();
        if let Some(r) = o.det.ratios.det_over_opt {
            worst_ratio = worst_ratio.max(r);
            envelope_ok &= r <= 4.0 * (det.q * det.r + 4.0);
        }
        max_q = max_q.max(det.min_sufficient_q.unwrap_or(f64::INFINITY));
    }
    add(
        9,
        "DET feasible, phase spend, phase-k termination",
        (
            ok9 && envelope_ok,
            format!("{d9}; max DET/OPT {worst_ratio:.3}; largest minimal sufficient q {max_q:.4}"),
        ),
    );
    add(10, "hand-verified walkthrough", check_walkthrough());
    let sample: Vec<(String, InstanceFile)> = suite.iter().step_by(8).cloned().collect();
    add(
        11,
        "byte-identical reproduction",
        check_determinism(&sample),
    );

    let max_frac = outcomes
        .iter()
        .filter_map(|o| o.int.ratios.frac_over_opt)
        .fold(0.0, f64::max);
    let max_int = outcomes
        .iter()
        .filter_map(|o| o.int.ratios.int_over_opt)
        .fold(0.0, f64::max);
    println!(
        "suite: {} instances ({} families x {} sizes x {} seeds); max FRAC/OPT {max_frac:.3}, max INT/OPT {max_int:.3}",
        outcomes.len(),
        Family::ALL.len(),
        SIZES.len(),
        SEEDS
    );
    let mut all = true;
    for (n, title, ok, detail) in &lines {
        all &= ok;
        println!(
            "criterion {n:>2} {}: {title} — {detail}",
            if *ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} in {:.1}s",
        if all { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    if !all {
        std::process::exit(1);
    }
}
