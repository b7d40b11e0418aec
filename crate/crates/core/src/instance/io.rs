use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::rational::JsonRational;
use super::{Edge, Facility, FacilityClientGraph};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct RawFacility {
    id: String,
    cost: JsonRational,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    facility: String,
    client: String,
    cost: JsonRational,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    facilities: Vec<RawFacility>,
    clients: Vec<String>,
    edges: Vec<RawEdge>,
    requests: Vec<String>,
}

/// An instance file: the graph plus the online order of active clients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub graph: FacilityClientGraph,
    pub requests: Vec<String>,
}

impl InstanceFile {
    pub fn new(graph: FacilityClientGraph, requests: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &requests {
            if !graph.clients().contains(r) {
                return Err(Error::UnknownClient(r.clone()));
            }
            if !seen.insert(r.as_str()) {
                return Err(Error::DuplicateRequest(r.clone()));
            }
        }
        Ok(InstanceFile { graph, requests })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text)?;
        let graph = FacilityClientGraph::new(
            raw.facilities
                .into_iter()
                .map(|f| Facility {
                    id: f.id,
                    cost: f.cost.0,
                })
                .collect(),
            raw.clients,
            raw.edges
                .into_iter()
                .map(|e| Edge {
                    facility: e.facility,
                    client: e.client,
                    cost: e.cost.0,
                })
                .collect(),
        )?;
        Self::new(graph, raw.requests)
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            facilities: self
                .graph
                .facilities()
                .iter()
                .map(|f| RawFacility {
                    id: f.id.clone(),
                    cost: JsonRational(f.cost.clone()),
                })
                .collect(),
            clients: self.graph.clients().to_vec(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|e| RawEdge {
                    facility: e.facility.clone(),
                    client: e.client.clone(),
                    cost: JsonRational(e.cost.clone()),
                })
                .collect(),
            requests: self.requests.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}
