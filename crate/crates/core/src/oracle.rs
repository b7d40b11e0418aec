//! Exact offline optimum by exhaustive facility-subset search, plus
//! feasibility checking and adversarial request ordering for small
//! instances.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::ops::Add;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::audit::AuditLog;
use crate::doubling::{self, DetConfig};
use crate::error::{Error, Result};
use crate::instance::{FacilityClientGraph, Instance};

pub const MAX_FACILITIES: usize = 24;
pub const MAX_ORDER_CLIENTS: usize = 8;

/// Cost type the oracle can minimize over.
pub trait CostValue: Clone + PartialOrd + Zero + Add<Output = Self> + Debug {}

impl<T: Clone + PartialOrd + Zero + Add<Output = T> + Debug> CostValue for T {}

/// Facility costs and per-client adjacency sorted by cost.
#[derive(Debug, Clone)]
pub struct CostView<C> {
    facility_costs: Vec<C>,
    adjacency: Vec<Vec<(usize, C)>>,
}

impl CostView<u64> {
    pub fn from_instance(inst: &Instance) -> Self {
        CostView {
            facility_costs: inst.facility_costs().to_vec(),
            adjacency: (0..inst.num_clients())
                .map(|c| inst.neighbors(c).to_vec())
                .collect(),
        }
    }
}

impl CostView<BigRational> {
    /// Original (unnormalized) costs; indices follow the graph's sorted order.
    pub fn from_graph(graph: &FacilityClientGraph) -> Self {
        let fidx = |id: &str| {
            graph
                .facilities()
                .iter()
                .position(|f| f.id == id)
                .expect("validated")
        };
        let mut adjacency = vec![Vec::new(); graph.clients().len()];
        for e in graph.edges() {
            let c = graph
                .clients()
                .iter()
                .position(|x| *x == e.client)
                .expect("validated");
            adjacency[c].push((fidx(&e.facility), e.cost.clone()));
        }
        for row in &mut adjacency {
            row.sort_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .expect("rationals are ordered")
                    .then(a.0.cmp(&b.0))
            });
        }
        CostView {
            facility_costs: graph.facilities().iter().map(|f| f.cost.clone()).collect(),
            adjacency,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<C> {
    pub open: Vec<usize>,
    /// `(client, facility)` for every active client, in the given order.
    pub connections: Vec<(usize, usize)>,
    pub cost: C,
}

/// Minimum-cost solution serving `active`. Cost ties go to the
/// lexicographically smallest open set.
pub fn optimal_offline<C: CostValue>(view: &CostView<C>, active: &[usize]) -> Result<Solution<C>> {
    let nf = view.facility_costs.len();
    if nf > MAX_FACILITIES {
        return Err(Error::SizeGuard {
            limit: MAX_FACILITIES,
            actual: nf,
        });
    }
    if let Some(&c) = active.iter().find(|&&c| view.adjacency[c].is_empty()) {
        return Err(Error::InfeasibleInstance(format!("#{c}")));
    }
    if active.is_empty() {
        return Ok(Solution {
            open: Vec::new(),
            connections: Vec::new(),
            cost: C::zero(),
        });
    }

    let mut best: Option<(C, Vec<usize>, u64)> = None;
    'subsets: for mask in 1u64..(1u64 << nf) {
        let mut cost = C::zero();
        for f in 0..nf {
            if mask >> f & 1 == 1 {
                cost = cost + view.facility_costs[f].clone();
            }
        }
        if best.as_ref().is_some_and(|(b, _, _)| cost > *b) {
            continue;
        }
        for &c in active {
            match view.adjacency[c].iter().find(|(f, _)| mask >> f & 1 == 1) {
                Some((_, w)) => cost = cost + w.clone(),
                None => continue 'subsets,
            }
        }
        let open: Vec<usize> = (0..nf).filter(|f| mask >> f & 1 == 1).collect();
        let better = match &best {
            None => true,
            Some((b, o, _)) => cost < *b || (cost == *b && open < *o),
        };
        if better {
            best = Some((cost, open, mask));
        }
    }
    let (cost, open, mask) = best.expect("every active client has an edge");
    let connections = active
        .iter()
        .map(|&c| {
            let (f, _) = view.adjacency[c]
                .iter()
                .find(|(f, _)| mask >> f & 1 == 1)
                .expect("feasible");
            (c, *f)
        })
        .collect();
    Ok(Solution {
        open,
        connections,
        cost,
    })
}

/// True iff every active client has a purchased edge to a purchased facility.
pub fn check_feasible(
    inst: &Instance,
    active: &[usize],
    facilities: &BTreeSet<usize>,
    edges: &BTreeSet<(usize, usize)>,
) -> bool {
    active.iter().all(|&c| {
        inst.neighbors(c)
            .iter()
            .any(|&(f, _)| facilities.contains(&f) && edges.contains(&(f, c)))
    })
}

/// The order of `active` that maximizes the doubling algorithm's cost;
/// the first maximizer in lexicographic permutation order wins.
pub fn worst_request_order(
    inst: &Instance,
    active: &[usize],
    config: DetConfig,
) -> Result<(Vec<usize>, u64)> {
    if active.len() > MAX_ORDER_CLIENTS {
        return Err(Error::SizeGuard {
            limit: MAX_ORDER_CLIENTS,
            actual: active.len(),
        });
    }
    let mut best: Option<(Vec<usize>, u64)> = None;
    for order in active.iter().copied().permutations(active.len()) {
        let cost = doubling::run(inst, &order, config, &mut AuditLog::disabled())?.total_cost();
        if best.as_ref().is_none_or(|(_, b)| cost > *b) {
            best = Some((order, cost));
        }
    }
    Ok(best.expect("at least the empty permutation"))
}
