use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{cost_to_u64, FacilityClientGraph};

/// Sorted distance scale `T`: `0` followed by consecutive powers of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceScale {
    values: Vec<u64>,
}

impl DistanceScale {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, t: u64) -> Option<usize> {
        self.values.binary_search(&t).ok()
    }

    pub fn max(&self) -> u64 {
        *self.values.last().expect("scale always contains 0")
    }
}

/// Builds `T` from a collection of normalized edge costs.
pub fn distance_scale_of<I: IntoIterator<Item = u64>>(edge_costs: I) -> DistanceScale {
    let positive: Vec<u64> = edge_costs.into_iter().filter(|&c| c > 0).collect();
    let mut values = vec![0];
    if let (Some(&lo), Some(&hi)) = (positive.iter().min(), positive.iter().max()) {
        let mut t = lo;
        while t <= hi {
            values.push(t);
            t *= 2;
        }
    }
    DistanceScale { values }
}

/// Per-client clusters `F_{c,t}` indexed by `(client, position of t in T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterIndex {
    clusters: Vec<Vec<Vec<usize>>>,
}

impl ClusterIndex {
    pub fn cluster(&self, client: usize, t_index: usize) -> &[usize] {
        &self.clusters[client][t_index]
    }

    /// `S_{c,t}`: union of the clusters at distances up to `T[t_index]`.
    pub fn prefix(&self, client: usize, t_index: usize) -> impl Iterator<Item = usize> + '_ {
        self.clusters[client][..=t_index].iter().flatten().copied()
    }
}

/// Dense, index-based view of a normalized instance consumed by the
/// online algorithms. Costs are zero or powers of two.
#[derive(Debug, Clone)]
pub struct Instance {
    facility_ids: Vec<String>,
    facility_costs: Vec<u64>,
    client_ids: Vec<String>,
    /// Per client, `(facility, cost)` sorted by cost then facility.
    adjacency: Vec<Vec<(usize, u64)>>,
    edge_costs: BTreeMap<(usize, usize), u64>,
    distances: DistanceScale,
    clusters: ClusterIndex,
}

impl Instance {
    pub fn from_graph(graph: &FacilityClientGraph) -> Result<Self> {
        if !graph.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let facilities = graph
            .facilities()
            .iter()
            .map(|f| Ok((f.id.clone(), cost_to_u64(&f.cost)?)))
            .collect::<Result<Vec<_>>>()?;
        let fidx: BTreeMap<&str, usize> = graph
            .facilities()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id.as_str(), i))
            .collect();
        let cidx: BTreeMap<&str, usize> = graph
            .clients()
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| {
                Ok((
                    fidx[e.facility.as_str()],
                    cidx[e.client.as_str()],
                    cost_to_u64(&e.cost)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(facilities, graph.clients().to_vec(), edges)
    }

    /// Builds an instance from sorted facility and client lists and
    /// `(facility, client, cost)` edges given by index.
    pub fn from_parts(
        facilities: Vec<(String, u64)>,
        client_ids: Vec<String>,
        edges: Vec<(usize, usize, u64)>,
    ) -> Result<Self> {
        let normal = |c: u64| c == 0 || c.is_power_of_two();
        if let Some((id, _)) = facilities.iter().find(|(_, c)| !normal(*c)) {
            return Err(Error::CostOutOfRange(id.clone()));
        }
        let mut adjacency = vec![Vec::new(); client_ids.len()];
        let mut edge_costs = BTreeMap::new();
        for &(f, c, cost) in &edges {
            if !normal(cost) {
                return Err(Error::NotNormalized);
            }
            if edge_costs.insert((f, c), cost).is_some() {
                return Err(Error::DuplicateEdge {
                    facility: facilities[f].0.clone(),
                    client: client_ids[c].clone(),
                });
            }
            adjacency[c].push((f, cost));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(f, cost)| (cost, f));
        }
        let distances = distance_scale_of(edges.iter().map(|e| e.2));
        let clusters = client_ids
            .iter()
            .enumerate()
            .map(|(c, _)| {
                let mut row = vec![Vec::new(); distances.len()];
                for &(f, cost) in &adjacency[c] {
                    let ti = distances.index_of(cost).expect("edge cost lies in T");
                    row[ti].push(f);
                }
                for cluster in &mut row {
                    cluster.sort_unstable();
                }
                row
            })
            .collect();
        let (facility_ids, facility_costs) = facilities.into_iter().unzip();
        Ok(Instance {
            facility_ids,
            facility_costs,
            client_ids,
            adjacency,
            edge_costs,
            distances,
            clusters: ClusterIndex { clusters },
        })
    }

    pub fn num_facilities(&self) -> usize {
        self.facility_ids.len()
    }

    pub fn num_clients(&self) -> usize {
        self.client_ids.len()
    }

    pub fn facility_id(&self, f: usize) -> &str {
        &self.facility_ids[f]
    }

    pub fn client_id(&self, c: usize) -> &str {
        &self.client_ids[c]
    }

    pub fn facility_ids(&self) -> &[String] {
        &self.facility_ids
    }

    pub fn client_ids(&self) -> &[String] {
        &self.client_ids
    }

    pub fn facility_index(&self, id: &str) -> Option<usize> {
        self.facility_ids
            .binary_search_by(|x| x.as_str().cmp(id))
            .ok()
    }

    pub fn client_index(&self, id: &str) -> Option<usize> {
        self.client_ids
            .binary_search_by(|x| x.as_str().cmp(id))
            .ok()
    }

    pub fn facility_cost(&self, f: usize) -> u64 {
        self.facility_costs[f]
    }

    pub fn facility_costs(&self) -> &[u64] {
        &self.facility_costs
    }

    pub fn edge_cost(&self, f: usize, c: usize) -> Option<u64> {
        self.edge_costs.get(&(f, c)).copied()
    }

    /// All edges as `(facility, client, cost)`, ordered by facility then client.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edge_costs.iter().map(|(&(f, c), &w)| (f, c, w))
    }

    pub fn num_edges(&self) -> usize {
        self.edge_costs.len()
    }

    /// Edges of client `c` sorted by cost, ties by facility index.
    pub fn neighbors(&self, c: usize) -> &[(usize, u64)] {
        &self.adjacency[c]
    }

    pub fn distances(&self) -> &DistanceScale {
        &self.distances
    }

    pub fn clusters(&self) -> &ClusterIndex {
        &self.clusters
    }

    pub fn max_facility_cost(&self) -> u64 {
        self.facility_costs.iter().copied().max().unwrap_or(0)
    }

    pub fn max_edge_cost(&self) -> u64 {
        self.edge_costs.values().copied().max().unwrap_or(0)
    }

    /// `|C × T|`, the number of rounding elements.
    pub fn num_elements(&self) -> usize {
        self.client_ids.len() * self.distances.len()
    }
}
