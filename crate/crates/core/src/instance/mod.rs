//! Instance data model: the facility-client graph, normalization to
//! power-of-two costs, the distance scale and per-client clusters.

mod compiled;
mod io;
pub mod rational;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use compiled::{distance_scale_of, ClusterIndex, DistanceScale, Instance};
pub use io::InstanceFile;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facility {
    pub id: String,
    pub cost: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub facility: String,
    pub client: String,
    pub cost: BigRational,
}

/// Bipartite instance `G = (F, C, E, cost)`.
///
/// Facilities and clients are kept sorted by identifier and edges by
/// `(client, facility)`, which fixes the iteration order of every algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacilityClientGraph {
    facilities: Vec<Facility>,
    clients: Vec<String>,
    edges: Vec<Edge>,
    normalized: bool,
}

impl FacilityClientGraph {
    pub fn new(
        mut facilities: Vec<Facility>,
        mut clients: Vec<String>,
        mut edges: Vec<Edge>,
    ) -> Result<Self> {
        facilities.sort_by(|a, b| a.id.cmp(&b.id));
        clients.sort();
        edges.sort_by(|a, b| (&a.client, &a.facility).cmp(&(&b.client, &b.facility)));

        for pair in facilities.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId(pair[0].id.clone()));
            }
        }
        for pair in clients.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateId(pair[0].clone()));
            }
        }
        if facilities.len() < 2 || clients.len() < 2 {
            return Err(Error::TooSmall {
                facilities: facilities.len(),
                clients: clients.len(),
            });
        }
        for f in &facilities {
            if f.cost.is_negative() {
                return Err(Error::NegativeCost(format!("facility {}", f.id)));
            }
        }
        let facility_ids: BTreeSet<&str> = facilities.iter().map(|f| f.id.as_str()).collect();
        let client_ids: BTreeSet<&str> = clients.iter().map(String::as_str).collect();
        for (i, e) in edges.iter().enumerate() {
            if !facility_ids.contains(e.facility.as_str()) {
                return Err(Error::UnknownFacility(e.facility.clone()));
            }
            if !client_ids.contains(e.client.as_str()) {
                return Err(Error::UnknownClient(e.client.clone()));
            }
            if e.cost.is_negative() {
                return Err(Error::NegativeCost(format!(
                    "edge ({}, {})",
                    e.facility, e.client
                )));
            }
            if i > 0 && edges[i - 1].facility == e.facility && edges[i - 1].client == e.client {
                return Err(Error::DuplicateEdge {
                    facility: e.facility.clone(),
                    client: e.client.clone(),
                });
            }
        }

        let mut graph = FacilityClientGraph {
            facilities,
            clients,
            edges,
            normalized: false,
        };
        let normalized = graph.all_costs().all(is_normal_cost);
        graph.normalized = normalized;
        Ok(graph)
    }

    pub fn facilities(&self) -> &[Facility] {
        &self.facilities
    }

    pub fn clients(&self) -> &[String] {
        &self.clients
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn facility_cost(&self, id: &str) -> Option<&BigRational> {
        self.facilities.iter().find(|f| f.id == id).map(|f| &f.cost)
    }

    pub fn edge_cost(&self, facility: &str, client: &str) -> Option<&BigRational> {
        self.edges
            .iter()
            .find(|e| e.facility == facility && e.client == client)
            .map(|e| &e.cost)
    }

    fn all_costs(&self) -> impl Iterator<Item = &BigRational> {
        self.facilities
            .iter()
            .map(|f| &f.cost)
            .chain(self.edges.iter().map(|e| &e.cost))
    }

    fn min_positive_cost(&self) -> Option<BigRational> {
        self.all_costs().filter(|c| c.is_positive()).min().cloned()
    }

    /// Largest over smallest positive cost, over facilities and edges jointly.
    pub fn aspect_ratio(&self) -> Result<BigRational> {
        let positive = || self.all_costs().filter(|c| c.is_positive());
        let min = positive().min().ok_or(Error::NoPositiveCost)?;
        let max = positive().max().ok_or(Error::NoPositiveCost)?;
        Ok(max / min)
    }

    /// Scales positive costs so the smallest is 1 and rounds each up to a
    /// power of two. Returns the normalized graph and the scale applied.
    pub fn preprocess(&self) -> Result<(FacilityClientGraph, BigRational)> {
        let Some(min) = self.min_positive_cost() else {
            let mut graph = self.clone();
            graph.normalized = true;
            return Ok((graph, BigRational::one()));
        };
        let scale = min.recip();
        let round = |cost: &BigRational| -> BigRational {
            if cost.is_zero() {
                return cost.clone();
            }
            let exponent = rational::ceil_log2(&(cost * &scale));
            BigRational::from_integer(num_bigint::BigInt::one() << exponent)
        };
        let facilities = self
            .facilities
            .iter()
            .map(|f| Facility {
                id: f.id.clone(),
                cost: round(&f.cost),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                facility: e.facility.clone(),
                client: e.client.clone(),
                cost: round(&e.cost),
            })
            .collect();
        let graph = FacilityClientGraph {
            facilities,
            clients: self.clients.clone(),
            edges,
            normalized: true,
        };
        Ok((graph, scale))
    }

    /// The distance scale `T`: zero plus every power of two between the
    /// smallest and largest positive edge cost.
    pub fn distance_scale(&self) -> Result<DistanceScale> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let costs = self
            .edges
            .iter()
            .map(|e| cost_to_u64(&e.cost))
            .collect::<Result<Vec<_>>>()?;
        Ok(distance_scale_of(costs))
    }

    /// Clusters `F_{c,t}` keyed by identifier.
    pub fn clusters(
        &self,
        scale: &DistanceScale,
    ) -> Result<BTreeMap<String, BTreeMap<u64, BTreeSet<String>>>> {
        let mut out: BTreeMap<String, BTreeMap<u64, BTreeSet<String>>> = BTreeMap::new();
        for c in &self.clients {
            out.insert(
                c.clone(),
                scale
                    .values()
                    .iter()
                    .map(|&t| (t, BTreeSet::new()))
                    .collect(),
            );
        }
        for e in &self.edges {
            let t = cost_to_u64(&e.cost)?;
            let row = out.get_mut(&e.client).expect("validated client");
            row.get_mut(&t)
                .ok_or(Error::NotNormalized)?
                .insert(e.facility.clone());
        }
        Ok(out)
    }
}

fn is_normal_cost(cost: &BigRational) -> bool {
    if cost.is_zero() {
        return true;
    }
    if !cost.is_integer() || cost.is_negative() {
        return false;
    }
    let n = cost.numer();
    n.bits() > 0 && n.trailing_zeros() == Some(n.bits() - 1)
}

pub(crate) fn cost_to_u64(cost: &BigRational) -> Result<u64> {
    use num_traits::ToPrimitive;
    if !is_normal_cost(cost) {
        return Err(Error::NotNormalized);
    }
    match cost.numer().to_u64() {
        Some(v) if v <= 1 << 62 => Ok(v),
        _ => Err(Error::CostOutOfRange(rational::format_rational(cost))),
    }
}
