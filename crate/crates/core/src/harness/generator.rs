//! Seeded instance families.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Edge, Facility, FacilityClientGraph, InstanceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    UniformRandom,
    LayeredDistance,
    Star,
    SetCoverLike,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::UniformRandom,
        Family::LayeredDistance,
        Family::Star,
        Family::SetCoverLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformRandom => "uniform-random",
            Family::LayeredDistance => "layered-distance",
            Family::Star => "star",
            Family::SetCoverLike => "set-cover-like",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family {s:?}")))
    }
}

fn default_facility_cost() -> (u64, u64) {
    (1, 32)
}

fn default_edge_cost() -> (u64, u64) {
    (1, 16)
}

fn default_density() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub nf: usize,
    pub nc: usize,
    pub na: usize,
    #[serde(default = "default_facility_cost")]
    pub facility_cost: (u64, u64),
    #[serde(default = "default_edge_cost")]
    pub edge_cost: (u64, u64),
    #[serde(default = "default_density")]
    pub density: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, nf: usize, nc: usize, na: usize, seed: u64) -> Self {
        let edge_cost = match family {
            Family::LayeredDistance => (1, 1 << 10),
            _ => default_edge_cost(),
        };
        GeneratorSpec {
            family,
            nf,
            nc,
            na,
            facility_cost: default_facility_cost(),
            edge_cost,
            density: default_density(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.nf < 2 || self.nc < 2 {
            return bad(format!("need nf, nc >= 2 (got {}, {})", self.nf, self.nc));
        }
        if self.na > self.nc {
            return bad(format!("na = {} exceeds nc = {}", self.na, self.nc));
        }
        if self.facility_cost.0 > self.facility_cost.1 || self.edge_cost.0 > self.edge_cost.1 {
            return bad("empty cost range".into());
        }
        if self.family != Family::SetCoverLike
            && self.edge_cost.0 == 0
            && self.family == Family::LayeredDistance
        {
            return bad("layered-distance needs positive edge costs".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density {} outside (0, 1]", self.density));
        }
        Ok(())
    }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Generates the instance described by `spec`. Same spec, same instance.
pub fn generate(spec: &GeneratorSpec) -> Result<InstanceFile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fid = |f: usize| format!("f{f:03}");
    let cid = |c: usize| format!("c{c:03}");
    let (flo, fhi) = spec.facility_cost;
    let (elo, ehi) = spec.edge_cost;

    let mut fcost: Vec<u64> = (0..spec.nf).map(|_| rng.gen_range(flo..=fhi)).collect();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();

    match spec.family {
        Family::UniformRandom | Family::LayeredDistance | Family::SetCoverLike => {
            let layered = spec.family == Family::LayeredDistance;
            let (klo, khi) = (
                64 - elo.max(1).leading_zeros() - 1,
                63 - ehi.max(1).leading_zeros(),
            );
            let edge_cost = |rng: &mut ChaCha8Rng| match spec.family {
                Family::SetCoverLike => 0,
                _ if layered => 1u64 << rng.gen_range(klo..=khi.max(klo)),
                _ => rng.gen_range(elo..=ehi),
            };
            for c in 0..spec.nc {
                let mut any = false;
                for f in 0..spec.nf {
                    if rng.gen_bool(spec.density) {
                        edges.push((f, c, edge_cost(&mut rng)));
                        any = true;
                    }
                }
                if !any {
                    let f = rng.gen_range(0..spec.nf);
                    edges.push((f, c, edge_cost(&mut rng)));
                }
            }
        }
        Family::Star => {
            // f000 is cheap but far from everyone; the rest are expensive
            // and near a few clients each.
            fcost[0] = flo;
            for c in 0..spec.nc {
                edges.push((0, c, ehi));
            }
            for (f, cost) in fcost.iter_mut().enumerate().skip(1) {
                *cost = rng.gen_range((flo + fhi).div_ceil(2)..=fhi);
                for c in 0..spec.nc {
                    if rng.gen_bool(spec.density) {
                        edges.push((f, c, elo));
                    }
                }
            }
        }
    }

    let graph = FacilityClientGraph::new(
        fcost
            .iter()
            .enumerate()
            .map(|(f, &w)| Facility {
                id: fid(f),
                cost: int(w),
            })
            .collect(),
        (0..spec.nc).map(cid).collect(),
        edges
            .into_iter()
            .map(|(f, c, w)| Edge {
                facility: fid(f),
                client: cid(c),
                cost: int(w),
            })
            .collect(),
    )?;
    let mut clients: Vec<usize> = (0..spec.nc).collect();
    clients.shuffle(&mut rng);
    let requests = clients.into_iter().take(spec.na).map(cid).collect();
    InstanceFile::new(graph, requests)
}
