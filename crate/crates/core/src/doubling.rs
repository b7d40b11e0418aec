//! Cost-doubling wrapper around the integral algorithm.
//!
//! Phase `j` pre-purchases every item cheaper than `2^j / (|F|·|C|)`, prunes
//! items costlier than `2^j`, rescales the remainder so its smallest
//! positive cost is 1, and runs a fresh integral algorithm on the whole
//! request prefix under the budget `h_j·(q·R + 2)·2^j`. Exceeding the budget
//! (or meeting a client with no surviving edge) abandons the phase.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::audit::{names, AuditLog};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::int::IntEngine;

pub const DEFAULT_Q: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetConfig {
    pub q: f64,
}

impl Default for DetConfig {
    fn default() -> Self {
        DetConfig { q: DEFAULT_Q }
    }
}

impl DetConfig {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidConfig(format!("q must be positive, got {q}")));
        }
        Ok(DetConfig { q })
    }
}

/// `R = log|F|·(log|C| + log log(|F|·|C|))`, logarithms base 2.
pub fn compute_r(nf: usize, nc: usize) -> Result<f64> {
    if nf < 2 || nc < 2 {
        return Err(Error::InvalidConfig(format!(
            "R needs |F|, |C| >= 2 (got {nf}, {nc})"
        )));
    }
    let (f, c) = (nf as f64, nc as f64);
    Ok(f.log2() * (c.log2() + (f * c).log2().log2()))
}

/// Items bought outright at the start of a phase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PrePurchase {
    pub facilities: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub cost: u64,
}

/// Every facility and edge with `cost < 2^j / (|F|·|C|)`.
pub fn pre_purchase(inst: &Instance, j: u32) -> PrePurchase {
    let denom = (inst.num_facilities() * inst.num_clients()) as u128;
    let cheap = |cost: u64| (cost as u128) * denom < 1u128 << j;
    let facilities: Vec<usize> = (0..inst.num_facilities())
        .filter(|&f| cheap(inst.facility_cost(f)))
        .collect();
    let edges: Vec<(usize, usize)> = inst
        .edges()
        .filter(|e| cheap(e.2))
        .map(|(f, c, _)| (f, c))
        .collect();
    let cost = facilities
        .iter()
        .map(|&f| inst.facility_cost(f))
        .sum::<u64>()
        + edges
            .iter()
            .map(|&(f, c)| inst.edge_cost(f, c).unwrap_or(0))
            .sum::<u64>();
    PrePurchase {
        facilities,
        edges,
        cost,
    }
}

/// Pruned and rescaled phase graph `G̃_j`.
#[derive(Debug, Clone)]
pub struct PhaseGraph {
    pub instance: Instance,
    /// Phase facility index to original facility index.
    pub facility_map: Vec<usize>,
    /// Smallest positive cost of `G_j` (1 if none); `h_j = 1 / scale`.
    pub scale: u64,
}

impl PhaseGraph {
    pub fn h(&self) -> f64 {
        1.0 / self.scale as f64
    }
}

pub fn build_phase_graph(inst: &Instance, j: u32, pre: &PrePurchase) -> Result<PhaseGraph> {
    let limit = 1u128 << j;
    let pre_f: BTreeSet<usize> = pre.facilities.iter().copied().collect();
    let pre_e: BTreeSet<(usize, usize)> = pre.edges.iter().copied().collect();

    let facility_map: Vec<usize> = (0..inst.num_facilities())
        .filter(|&f| inst.facility_cost(f) as u128 <= limit)
        .collect();
    let mut local = vec![usize::MAX; inst.num_facilities()];
    for (i, &f) in facility_map.iter().enumerate() {
        local[f] = i;
    }
    let fac_costs: Vec<u64> = facility_map
        .iter()
        .map(|&f| {
            if pre_f.contains(&f) {
                0
            } else {
                inst.facility_cost(f)
            }
        })
        .collect();
    let edges: Vec<(usize, usize, u64)> = inst
        .edges()
        .filter(|&(f, _, w)| local[f] != usize::MAX && w as u128 <= limit)
        .map(|(f, c, w)| (local[f], c, if pre_e.contains(&(f, c)) { 0 } else { w }))
        .collect();

    let scale = fac_costs
        .iter()
        .chain(edges.iter().map(|e| &e.2))
        .copied()
        .filter(|&w| w > 0)
        .min()
        .unwrap_or(1);
    let facilities = facility_map
        .iter()
        .zip(&fac_costs)
        .map(|(&f, &w)| (inst.facility_id(f).to_string(), w / scale))
        .collect();
    let edges = edges
        .into_iter()
        .map(|(f, c, w)| (f, c, w / scale))
        .collect();
    let instance = Instance::from_parts(facilities, inst.client_ids().to_vec(), edges)?;
    Ok(PhaseGraph {
        instance,
        facility_map,
        scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseEnd {
    Completed,
    BudgetExceeded { client: String },
    Disconnected { client: String },
}

/// Summary of one phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub phase: u32,
    pub h: f64,
    pub budget: f64,
    pub prepurchase_cost: u64,
    /// Committed spend of the inner algorithm on `G̃_j`.
    pub spent_scaled: u64,
    /// The same spend on the original graph.
    pub spent: u64,
    pub committed_clients: usize,
    pub end: PhaseEnd,
}

impl PhaseRecord {
    pub fn charged(&self) -> u64 {
        self.prepurchase_cost + self.spent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetOutcome {
    pub r: f64,
    pub q: f64,
    pub phases: Vec<PhaseRecord>,
    /// Everything bought in any phase, on the original graph.
    pub facilities: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Final assignment `(client, facility)` in request order.
    pub assignments: Vec<(usize, usize)>,
    pub updates: u64,
    pub augmentations: u64,
    pub evaluations: u64,
}

impl DetOutcome {
    pub fn final_phase(&self) -> u32 {
        self.phases.last().map_or(0, |p| p.phase)
    }

    /// Total charged cost, repeated purchases included.
    pub fn total_cost(&self) -> u64 {
        self.phases.iter().map(PhaseRecord::charged).sum()
    }
}

/// `⌈log₂ x⌉`, with 0 and 1 both mapping to 0.
pub fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Phase index beyond which the run is abandoned as a bug. By then every
/// item is pre-purchased and a phase can no longer fail.
pub fn phase_limit(inst: &Instance) -> u32 {
    let total: u128 = inst
        .facility_costs()
        .iter()
        .map(|&w| w as u128)
        .sum::<u128>()
        + inst.edges().map(|e| e.2 as u128).sum::<u128>();
    let max = inst.max_facility_cost().max(inst.max_edge_cost()) as u128;
    let everything = max * (inst.num_facilities() * inst.num_clients()) as u128;
    (ceil_log2(total) + 2).max(ceil_log2(everything) + 2)
}

/// Runs the doubling algorithm online over `requests` (client indices of
/// `inst`). Replaying the full prefix at each new phase is equivalent to
/// iterating over the request sequence from its start.
pub fn run(
    inst: &Instance,
    requests: &[usize],
    config: DetConfig,
    audit: &mut AuditLog,
) -> Result<DetOutcome> {
    let r = compute_r(inst.num_facilities(), inst.num_clients())?;
    for &c in requests {
        if inst.neighbors(c).is_empty() {
            return Err(Error::InfeasibleInstance(inst.client_id(c).to_string()));
        }
    }
    let limit = phase_limit(inst);
    let mut out = DetOutcome {
        r,
        q: config.q,
        phases: Vec::new(),
        facilities: BTreeSet::new(),
        edges: BTreeSet::new(),
        assignments: Vec::new(),
        updates: 0,
        augmentations: 0,
        evaluations: 0,
    };

    for j in 0..=limit {
        let pre = pre_purchase(inst, j);
        let phase = build_phase_graph(inst, j, &pre)?;
        let pow = 2f64.powi(j as i32);
        let budget = phase.h() * (config.q * r + 2.0) * pow;
        audit.record(names::DET_PREPURCHASE, pre.cost as f64 <= 2.0 * pow, || {
            format!("phase {j}: pre-purchase {} > 2·2^j", pre.cost)
        })?;
        out.facilities.extend(pre.facilities.iter().copied());
        out.edges.extend(pre.edges.iter().copied());

        let pinst = &phase.instance;
        let mut int = IntEngine::<f64>::new(pinst);
        int.audit_start(audit)?;
        let mut spent = 0u64;
        let mut assignments = Vec::with_capacity(requests.len());
        let mut end = PhaseEnd::Completed;
        for &c in requests {
            if pinst.neighbors(c).is_empty() {
                end = PhaseEnd::Disconnected {
                    client: inst.client_id(c).to_string(),
                };
                break;
            }
            let rec = int.serve(c, audit)?;
            let total = int.total_cost();
            if total as f64 > budget {
                end = PhaseEnd::BudgetExceeded {
                    client: inst.client_id(c).to_string(),
                };
                break;
            }
            spent = total;
            audit.record(names::DET_BUDGET_PREFIX, spent as f64 <= budget, || {
                format!("phase {j}: spend {spent} above budget {budget}")
            })?;
            let facility = phase.facility_map[rec.facility];
            out.facilities
                .extend(rec.opened.iter().map(|&f| phase.facility_map[f]));
            out.facilities.insert(facility);
            out.edges.insert((facility, c));
            assignments.push((c, facility));
        }
        out.updates += int.frac().state().update_count.iter().sum::<u64>();
        out.augmentations += int.frac().state().augment_count.iter().sum::<u64>();
        out.evaluations += int.rounding().evaluations();
        if end == PhaseEnd::Completed {
            int.audit_finish(audit)?;
        }

        let record = PhaseRecord {
            phase: j,
            h: phase.h(),
            budget,
            prepurchase_cost: pre.cost,
            spent_scaled: spent,
            spent: spent * phase.scale,
            committed_clients: assignments.len(),
            end,
        };
        let cap = (config.q * r + 4.0) * pow;
        audit.record(
            names::DET_PHASE_SPEND,
            record.charged() as f64 <= cap * (1.0 + 1e-12),
            || {
                format!(
                    "phase {j}: charged {} > (qR+4)·2^j = {cap}",
                    record.charged()
                )
            },
        )?;
        log::info!("phase {j}: {:?}, charged {}", record.end, record.charged());
        let done = record.end == PhaseEnd::Completed;
        out.phases.push(record);
        if done {
            out.assignments = assignments;
            let feasible = out
                .assignments
                .iter()
                .all(|&(c, f)| out.facilities.contains(&f) && out.edges.contains(&(f, c)));
            audit.record(names::DET_FEASIBLE, feasible, || {
                "unconnected client after final phase".into()
            })?;
            return Ok(out);
        }
    }
    Err(Error::PhaseLimit(limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walkthrough() -> Instance {
        Instance::from_parts(
            vec![("f1".into(), 2), ("f2".into(), 2)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 1), (1, 0, 2)],
        )
        .unwrap()
    }

    #[test]
    fn r_values() {
        assert_eq!(compute_r(4, 4).unwrap(), 8.0);
        assert_eq!(compute_r(2, 2).unwrap(), 2.0);
        assert!((compute_r(16, 4).unwrap() - 4.0 * (2.0 + 6f64.log2())).abs() < 1e-12);
        assert!(compute_r(1, 4).is_err());
        assert!(compute_r(4, 1).is_err());
    }

    #[test]
    fn config_rejects_non_positive_q() {
        assert!(DetConfig::new(0.0).is_err());
        assert!(DetConfig::new(f64::NAN).is_err());
        assert_eq!(DetConfig::default().q, 64.0);
    }

    #[test]
    fn pre_purchase_thresholds() {
        let inst = Instance::from_parts(
            vec![
                ("a".into(), 0),
                ("b".into(), 1),
                ("c".into(), 4),
                ("d".into(), 8),
            ],
            vec!["x".into(), "y".into()],
            vec![(0, 0, 0), (1, 0, 1), (2, 1, 2)],
        )
        .unwrap();
        // j = 3, |F|·|C| = 8: threshold 1 keeps only zero-cost items.
        let p = pre_purchase(&inst, 3);
        assert_eq!(p.facilities, vec![0]);
        assert_eq!(p.edges, vec![(0, 0)]);
        assert_eq!(p.cost, 0);
        let p = pre_purchase(&inst, 0);
        assert_eq!(p.facilities, vec![0]);
        // threshold 2^7 / 8 = 16 > every cost
        let p = pre_purchase(&inst, 7);
        assert_eq!(p.facilities.len(), 4);
        assert_eq!(p.edges.len(), 3);
        assert_eq!(p.cost, 16);
    }

    #[test]
    fn phase_graph_prunes_and_scales() {
        let inst = Instance::from_parts(
            vec![("a".into(), 1), ("b".into(), 2), ("c".into(), 16)],
            vec!["x".into(), "y".into()],
            vec![(0, 0, 1), (2, 0, 1), (1, 1, 2)],
        )
        .unwrap();
        let g = build_phase_graph(&inst, 1, &PrePurchase::default()).unwrap();
        assert_eq!(g.facility_map, vec![0, 1]);
        assert_eq!(g.scale, 1);
        assert_eq!(g.instance.facility_costs(), &[1, 2]);
        assert_eq!(g.instance.num_edges(), 2);

        let big = Instance::from_parts(
            vec![("a".into(), 4), ("b".into(), 8)],
            vec!["x".into(), "y".into()],
            vec![(0, 0, 4), (1, 1, 16)],
        )
        .unwrap();
        let g = build_phase_graph(&big, 4, &PrePurchase::default()).unwrap();
        assert_eq!(g.scale, 4);
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.instance.facility_costs(), &[1, 2]);
        assert_eq!(g.instance.edge_cost(1, 1), Some(4));

        let all = pre_purchase(&big, 10);
        let g = build_phase_graph(&big, 10, &all).unwrap();
        assert_eq!(g.scale, 1);
        assert!(g.instance.facility_costs().iter().all(|&w| w == 0));
    }

    #[test]
    fn walkthrough_det() {
        let inst = walkthrough();
        let mut audit = AuditLog::strict();
        let out = run(&inst, &[0], DetConfig::default(), &mut audit).unwrap();
        assert_eq!(out.phases.len(), 2);
        assert_eq!(
            out.phases[0].end,
            PhaseEnd::Disconnected { client: "c".into() }
        );
        assert_eq!(out.final_phase(), 1);
        assert_eq!(out.total_cost(), 3);
        assert_eq!(out.assignments, vec![(0, 0)]);
        assert_eq!(audit.total_failures(), 0);
    }

    #[test]
    fn empty_requests_finish_in_phase_zero() {
        let inst = walkthrough();
        let out = run(&inst, &[], DetConfig::default(), &mut AuditLog::strict()).unwrap();
        assert_eq!(out.phases.len(), 1);
        assert!(out.total_cost() <= 2);
    }

    #[test]
    fn edgeless_request_is_infeasible() {
        let inst = walkthrough();
        assert!(matches!(
            run(&inst, &[1], DetConfig::default(), &mut AuditLog::disabled()),
            Err(Error::InfeasibleInstance(_))
        ));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }
}
