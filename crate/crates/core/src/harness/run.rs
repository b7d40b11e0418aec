//! Single end-to-end runs and their JSON reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::audit::{names, AuditLog};
use crate::doubling::{self, DetConfig, PhaseRecord};
use crate::error::{Error, Result};
use crate::frac::FracEngine;
use crate::instance::rational::JsonRational;
use crate::instance::{FacilityClientGraph, Instance, InstanceFile};
use crate::int::IntEngine;
use crate::oracle::{self, CostView, Solution};

pub const RUN_SCHEMA: &str = "ofl.run_report/v1";
pub const ORACLE_SCHEMA: &str = "ofl.oracle_report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Frac,
    Int,
    Det,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Frac => "frac",
            Mode::Int => "int",
            Mode::Det => "det",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frac" => Ok(Mode::Frac),
            "int" => Ok(Mode::Int),
            "det" => Ok(Mode::Det),
            _ => Err(Error::InvalidConfig(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    /// Template log; its enabled/strict/skip settings apply to the run.
    pub audit: AuditLog,
    pub det: DetConfig,
    /// Compute the offline optimum (subject to the oracle size guard).
    pub oracle: bool,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            audit: AuditLog::disabled(),
            det: DetConfig::default(),
            oracle: true,
        }
    }

    pub fn with_audit(mut self, audit: AuditLog) -> Self {
        self.audit = audit;
        self
    }
}

/// An instance file after preprocessing: the compiled normalized instance
/// and the request sequence as client indices.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub digest: String,
    pub original: FacilityClientGraph,
    /// Factor applied to original costs before rounding up to powers of two.
    pub scale: BigRational,
    pub instance: Instance,
    pub requests: Vec<usize>,
}

pub fn prepare(file: &InstanceFile) -> Result<Prepared> {
    let (normalized, scale) = file.graph.preprocess()?;
    let instance = Instance::from_graph(&normalized)?;
    let requests = file
        .requests
        .iter()
        .map(|id| {
            instance
                .client_index(id)
                .ok_or_else(|| Error::UnknownClient(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        digest: file.digest(),
        original: file.graph.clone(),
        scale,
        instance,
        requests,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub digest: String,
    pub facilities: usize,
    pub clients: usize,
    pub edges: usize,
    pub requests: usize,
    pub distances: Vec<u64>,
    pub scale: JsonRational,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Costs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_primal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_dual: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_opening: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_connection: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_opening: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_connection: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_total: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_total: Option<u64>,
    /// Offline optimum on the normalized costs the algorithms see.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<u64>,
    /// Offline optimum on the original costs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_original: Option<JsonRational>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub updates: u64,
    pub augmentations: u64,
    pub phases: u64,
    pub potential_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetSummary {
    pub r: f64,
    pub q: f64,
    pub final_phase: u32,
    /// `⌈log₂ OPT⌉`, when the optimum is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_phase: Option<u32>,
    /// Smallest `q` that would still finish by `opt_phase`; absent when no
    /// such `q` exists or the optimum is unknown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_sufficient_q: Option<f64>,
    pub phases: Vec<PhaseRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ratios {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_over_dual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_over_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_over_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_over_opt: Option<f64>,
    /// Normalized optimum over the scaled original optimum; at most 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditResult {
    pub passed: bool,
    pub checks: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClientSummary {
    pub client: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub updates: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facility: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection_cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub mode: Mode,
    pub instance: InstanceSummary,
    pub costs: Costs,
    pub counters: Counters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det: Option<DetSummary>,
    pub ratios: Ratios,
    /// Per named invariant; absent when auditing is off.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audits: Option<BTreeMap<String, AuditResult>>,
    pub clients: Vec<ClientSummary>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn audit_failures(&self) -> u64 {
        self.audits
            .as_ref()
            .map_or(0, |a| a.values().map(|r| r.failures).sum())
    }
}

fn audit_results(audit: &AuditLog) -> BTreeMap<String, AuditResult> {
    names::ALL
        .iter()
        .filter(|n| audit.wants(n))
        .map(|&n| {
            let e = audit.entry(n).cloned().unwrap_or_default();
            let result = AuditResult {
                passed: e.failures == 0,
                checks: e.checks,
                failures: e.failures,
                first_failure: e.first_failure,
            };
            (n.to_string(), result)
        })
        .collect()
}

fn ratio(num: f64, den: u64) -> Option<f64> {
    (den > 0).then(|| num / den as f64)
}

/// Optimal offline solutions on normalized and on original costs.
pub fn oracle_pair(prep: &Prepared) -> Result<(Solution<u64>, Solution<BigRational>)> {
    let norm = oracle::optimal_offline(&CostView::from_instance(&prep.instance), &prep.requests)?;
    let orig = oracle::optimal_offline(&CostView::from_graph(&prep.original), &prep.requests)?;
    Ok((norm, orig))
}

/// Smallest `q` under which the doubling algorithm finishes by phase `k`,
/// found by running the inner algorithm unbudgeted on each phase graph.
/// `None` if every phase up to `k` disconnects some request.
pub fn min_sufficient_q(inst: &Instance, requests: &[usize], k: u32) -> Result<Option<f64>> {
    let r = doubling::compute_r(inst.num_facilities(), inst.num_clients())?;
    let mut best: Option<f64> = None;
    for j in 0..=k {
        let pre = doubling::pre_purchase(inst, j);
        let phase = doubling::build_phase_graph(inst, j, &pre)?;
        if requests
            .iter()
            .any(|&c| phase.instance.neighbors(c).is_empty())
        {
            continue;
        }
        let mut int = IntEngine::<f64>::new(&phase.instance);
        let mut quiet = AuditLog::disabled();
        for &c in requests {
            int.serve(c, &mut quiet)?;
        }
        let unscaled = int.total_cost() as f64 * phase.scale as f64;
        let need = ((unscaled / 2f64.powi(j as i32) - 2.0) / r).max(0.0);
        best = Some(best.map_or(need, |b| b.min(need)));
    }
    Ok(best)
}

/// Runs the configured pipeline online over the file's requests.
pub fn run(file: &InstanceFile, config: &RunConfig) -> Result<RunReport> {
    let prep = prepare(file)?;
    run_prepared(&prep, config)
}

pub fn run_prepared(prep: &Prepared, config: &RunConfig) -> Result<RunReport> {
    let inst = &prep.instance;
    let mut audit = config.audit.fork();
    let mut costs = Costs::default();
    let mut counters = Counters::default();
    let mut clients = Vec::with_capacity(prep.requests.len());
    let mut det_summary = None;

    let oracle = if config.oracle {
        Some(oracle_pair(prep)?)
    } else {
        None
    };
    let opt = oracle.as_ref().map(|(n, _)| n.cost);
    if let Some((norm, orig)) = &oracle {
        costs.opt = Some(norm.cost);
        costs.opt_original = Some(JsonRational(orig.cost.clone()));
    }

    match config.mode {
        Mode::Frac => {
            let mut frac = FracEngine::<f64>::new(inst);
            for &c in &prep.requests {
                let out = frac.serve_client(c, &mut audit)?;
                let g = frac.good_distance(c)?;
                clients.push(ClientSummary {
                    client: inst.client_id(c).to_string(),
                    updates: Some(out.updates),
                    tau: Some(g.tau),
                    facility: None,
                    connection_cost: Some(frac.connection_cost(c)),
                });
            }
            let (primal, dual) = (frac.primal_value(), frac.dual_value());
            audit.record(
                names::FRAC_PRIMAL_LE_3DUAL,
                primal <= 3.0 * dual as f64 + 1e-9,
                || format!("primal {primal} > 3 × dual {dual}"),
            )?;
            fill_frac(&mut costs, &mut counters, &frac);
        }
        Mode::Int => {
            let mut int = IntEngine::<f64>::new(inst);
            int.audit_start(&mut audit)?;
            for &c in &prep.requests {
                let rec = int.serve(c, &mut audit)?;
                clients.push(ClientSummary {
                    client: inst.client_id(c).to_string(),
                    updates: Some(rec.updates),
                    tau: Some(rec.good_distance.tau),
                    facility: Some(inst.facility_id(rec.facility).to_string()),
                    connection_cost: Some(rec.connection_cost),
                });
            }
            int.audit_finish(&mut audit)?;
            fill_frac(&mut costs, &mut counters, int.frac());
            costs.int_opening = Some(int.opening_cost());
            costs.int_connection = Some(int.connection_cost());
            costs.int_total = Some(int.total_cost());
            counters.potential_evaluations = int.rounding().evaluations();
        }
        Mode::Det => {
            let out = doubling::run(inst, &prep.requests, config.det, &mut audit)?;
            for &(c, f) in &out.assignments {
                clients.push(ClientSummary {
                    client: inst.client_id(c).to_string(),
                    updates: None,
                    tau: None,
                    facility: Some(inst.facility_id(f).to_string()),
                    connection_cost: inst.edge_cost(f, c),
                });
            }
            let feasible =
                oracle::check_feasible(inst, &prep.requests, &out.facilities, &out.edges);
            audit.record(names::DET_FEASIBLE, feasible, || {
                "purchased items do not connect every request".into()
            })?;
            let opt_phase = opt.map(|o| doubling::ceil_log2(o as u128));
            let mut min_q = None;
            if let Some(k) = opt_phase {
                audit.record(names::DET_FINAL_PHASE, out.final_phase() <= k, || {
                    format!("final phase {} > ⌈log₂ OPT⌉ = {k}", out.final_phase())
                })?;
                min_q = min_sufficient_q(inst, &prep.requests, k)?;
            }
            costs.det_total = Some(out.total_cost());
            counters.updates = out.updates;
            counters.augmentations = out.augmentations;
            counters.phases = out.phases.len() as u64;
            counters.potential_evaluations = out.evaluations;
            det_summary = Some(DetSummary {
                r: out.r,
                q: out.q,
                final_phase: out.final_phase(),
                opt_phase,
                min_sufficient_q: min_q,
                phases: out.phases,
            });
        }
    }

    let mut ratios = Ratios::default();
    if let (Some(p), Some(d)) = (costs.frac_primal, costs.frac_dual) {
        ratios.frac_over_dual = ratio(p, d);
    }
    if let Some(o) = opt {
        ratios.frac_over_opt = costs.frac_primal.and_then(|p| ratio(p, o));
        ratios.int_over_opt = costs.int_total.and_then(|t| ratio(t as f64, o));
        ratios.det_over_opt = costs.det_total.and_then(|t| ratio(t as f64, o));
    }
    if let (Some(o), Some((_, orig))) = (opt, &oracle) {
        let scaled = &orig.cost * &prep.scale;
        if !scaled.is_zero() {
            ratios.normalization_loss = scaled.to_f64().map(|s| o as f64 / s);
        }
    }

    Ok(RunReport {
        schema: RUN_SCHEMA,
        mode: config.mode,
        instance: InstanceSummary {
            digest: prep.digest.clone(),
            facilities: inst.num_facilities(),
            clients: inst.num_clients(),
            edges: inst.num_edges(),
            requests: prep.requests.len(),
            distances: inst.distances().values().to_vec(),
            scale: JsonRational(prep.scale.clone()),
        },
        costs,
        counters,
        det: det_summary,
        ratios,
        audits: config.audit.is_enabled().then(|| audit_results(&audit)),
        clients,
    })
}

fn fill_frac(costs: &mut Costs, counters: &mut Counters, frac: &FracEngine<'_, f64>) {
    costs.frac_primal = Some(frac.primal_value());
    costs.frac_dual = Some(frac.dual_value());
    costs.frac_opening = Some(frac.opening_cost());
    costs.frac_connection = Some(frac.total_connection_cost());
    counters.updates = frac.state().update_count.iter().sum();
    counters.augmentations = frac.state().augment_count.iter().sum();
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connection {
    pub client: String,
    pub facility: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub cost: JsonRational,
    pub open: Vec<String>,
    pub connections: Vec<Connection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub schema: &'static str,
    pub digest: String,
    pub normalized: SolutionReport,
    pub original: SolutionReport,
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Offline optimum of the file's requests, on normalized and original costs.
pub fn oracle_report(file: &InstanceFile) -> Result<OracleReport> {
    let prep = prepare(file)?;
    let (norm, orig) = oracle_pair(&prep)?;
    let inst = &prep.instance;
    let describe = |open: &[usize], conns: &[(usize, usize)], cost: BigRational| SolutionReport {
        cost: JsonRational(cost),
        open: open
            .iter()
            .map(|&f| inst.facility_id(f).to_string())
            .collect(),
        connections: conns
            .iter()
            .map(|&(c, f)| Connection {
                client: inst.client_id(c).to_string(),
                facility: inst.facility_id(f).to_string(),
            })
            .collect(),
    };
    Ok(OracleReport {
        schema: ORACLE_SCHEMA,
        digest: prep.digest.clone(),
        normalized: describe(
            &norm.open,
            &norm.connections,
            BigRational::from_integer(norm.cost.into()),
        ),
        original: describe(&orig.open, &orig.connections, orig.cost),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WALKTHROUGH: &str = r#"{
        "facilities": [{"id": "f1", "cost": 2}, {"id": "f2", "cost": 2}],
        "clients": ["c", "d"],
        "edges": [
            {"facility": "f1", "client": "c", "cost": 1},
            {"facility": "f2", "client": "c", "cost": 2}
        ],
        "requests": ["c"]
    }"#;

    fn walkthrough() -> InstanceFile {
        InstanceFile::from_json(WALKTHROUGH).unwrap()
    }

    #[test]
    fn frac_mode() {
        let cfg = RunConfig::new(Mode::Frac).with_audit(AuditLog::strict());
        let rep = run(&walkthrough(), &cfg).unwrap();
        assert_eq!(rep.costs.frac_primal, Some(5.875));
        assert_eq!(rep.costs.frac_dual, Some(4));
        assert_eq!(rep.costs.opt, Some(3));
        assert_eq!(rep.clients[0].tau, Some(1));
        assert_eq!(rep.counters.updates, 4);
        assert_eq!(rep.audit_failures(), 0);
        assert!(rep.audits.unwrap().values().all(|a| a.passed));
    }

    #[test]
    fn int_mode() {
        let cfg = RunConfig::new(Mode::Int).with_audit(AuditLog::strict());
        let rep = run(&walkthrough(), &cfg).unwrap();
        assert_eq!(rep.costs.int_connection, Some(1));
        assert_eq!(rep.costs.frac_connection, Some(3));
        assert_eq!(rep.costs.int_total, Some(3));
        assert_eq!(rep.ratios.int_over_opt, Some(1.0));
        assert_eq!(rep.clients[0].facility.as_deref(), Some("f1"));
    }

    #[test]
    fn det_mode() {
        let cfg = RunConfig::new(Mode::Det).with_audit(AuditLog::strict());
        let rep = run(&walkthrough(), &cfg).unwrap();
        let det = rep.det.as_ref().unwrap();
        assert_eq!(det.final_phase, 1);
        assert_eq!(det.opt_phase, Some(2));
        assert_eq!(rep.costs.det_total, Some(3));
        assert_eq!(det.min_sufficient_q, Some(0.0));
        assert_eq!(rep.audit_failures(), 0);
    }

    #[test]
    fn det_with_no_requests() {
        let mut file = walkthrough();
        file.requests.clear();
        let rep = run(&file, &RunConfig::new(Mode::Det)).unwrap();
        assert!(rep.costs.det_total.unwrap() <= 2);
        assert_eq!(rep.counters.phases, 1);
        assert_eq!(rep.costs.opt, Some(0));
        assert_eq!(rep.ratios.det_over_opt, None);
        assert!(rep.audits.is_none());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = RunConfig::new(Mode::Det).with_audit(AuditLog::enabled());
        let a = run(&walkthrough(), &cfg).unwrap().to_json();
        let b = run(&walkthrough(), &cfg).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains(RUN_SCHEMA));
    }

    #[test]
    fn skipped_audits_are_not_reported() {
        let cfg =
            RunConfig::new(Mode::Frac).with_audit(AuditLog::enabled().skip(names::FRAC_MONOTONE));
        let audits = run(&walkthrough(), &cfg).unwrap().audits.unwrap();
        assert!(!audits.contains_key(names::FRAC_MONOTONE));
        assert!(audits.contains_key(names::FRAC_STRUCTURE));
    }

    #[test]
    fn oracle_on_fractional_costs() {
        let text = WALKTHROUGH.replace(r#""cost": 1}"#, r#""cost": "1/2"}"#);
        let rep = oracle_report(&InstanceFile::from_json(&text).unwrap()).unwrap();
        assert_eq!(
            rep.original.cost,
            JsonRational(BigRational::new(5.into(), 2.into()))
        );
        assert_eq!(rep.normalized.open, vec!["f1"]);
        assert_eq!(rep.normalized.connections[0].facility, "f1");
    }
}
