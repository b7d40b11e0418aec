//! Competitive-ratio sweeps over generated instances.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::AuditLog;
use crate::doubling::{self, DetConfig, DEFAULT_Q};
use crate::error::{Error, Result};
use crate::harness::generator::{generate, Family, GeneratorSpec};
use crate::harness::run::prepare;
use crate::int::IntEngine;
use crate::oracle::{self, CostView};

pub const SWEEP_SCHEMA: &str = "ofl.sweep/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    /// Seeds `0..n`.
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    fn values(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

fn default_q() -> f64 {
    DEFAULT_Q
}

/// A sweep grid: the cross product of families, sizes and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub families: Vec<Family>,
    /// `[|F|, |C|, |A|]` triples.
    pub sizes: Vec<[usize; 3]>,
    pub seeds: Seeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facility_cost: Option<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_cost: Option<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
}

impl Grid {
    pub fn from_json(text: &str) -> Result<Self> {
        let grid: Grid = serde_json::from_str(text)?;
        DetConfig::new(grid.q)?;
        Ok(grid)
    }

    pub fn specs(&self) -> Vec<GeneratorSpec> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &[nf, nc, na] in &self.sizes {
                for seed in self.seeds.values() {
                    let mut spec = GeneratorSpec::new(family, nf, nc, na, seed);
                    if let Some(r) = self.facility_cost {
                        spec.facility_cost = r;
                    }
                    if let Some(r) = self.edge_cost {
                        spec.edge_cost = r;
                    }
                    if let Some(d) = self.density {
                        spec.density = d;
                    }
                    out.push(spec);
                }
            }
        }
        out
    }
}

/// One CSV line. Ratio columns are empty when the optimum is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub schema: &'static str,
    pub family: Family,
    pub nf: usize,
    pub nc: usize,
    pub na: usize,
    pub seed: u64,
    pub digest: String,
    pub frac: f64,
    pub dual: u64,
    pub int: u64,
    pub det: u64,
    pub opt: u64,
    pub frac_over_opt: Option<f64>,
    pub int_over_opt: Option<f64>,
    pub det_over_opt: Option<f64>,
    #[serde(rename = "bound_R")]
    pub bound_r: f64,
    /// `(q·R + 4)·2^(k+1)` for the final phase `k`.
    pub det_bound: f64,
    pub frac_le_3dual: bool,
    pub det_feasible: bool,
    pub final_phase: u32,
    pub opt_phase: u32,
}

/// Runs INT, DET and the oracle on one generated instance.
pub fn evaluate(spec: &GeneratorSpec, config: DetConfig) -> Result<SweepRow> {
    let file = generate(spec)?;
    let prep = prepare(&file)?;
    let inst = &prep.instance;
    let mut quiet = AuditLog::disabled();

    let mut int = IntEngine::<f64>::new(inst);
    for &c in &prep.requests {
        int.serve(c, &mut quiet)?;
    }
    let frac = int.frac().primal_value();
    let dual = int.frac().dual_value();

    let det = doubling::run(inst, &prep.requests, config, &mut quiet)?;
    let det_feasible = oracle::check_feasible(inst, &prep.requests, &det.facilities, &det.edges);
    let opt = oracle::optimal_offline(&CostView::from_instance(inst), &prep.requests)?.cost;
    let ratio = |x: f64| (opt > 0).then(|| x / opt as f64);
    let final_phase = det.final_phase();

    Ok(SweepRow {
        schema: SWEEP_SCHEMA,
        family: spec.family,
        nf: spec.nf,
        nc: spec.nc,
        na: spec.na,
        seed: spec.seed,
        digest: prep.digest.clone(),
        frac,
        dual,
        int: int.total_cost(),
        det: det.total_cost(),
        opt,
        frac_over_opt: ratio(frac),
        int_over_opt: ratio(int.total_cost() as f64),
        det_over_opt: ratio(det.total_cost() as f64),
        bound_r: det.r,
        det_bound: (config.q * det.r + 4.0) * 2f64.powi(final_phase as i32 + 1),
        frac_le_3dual: frac <= 3.0 * dual as f64 + 1e-9,
        det_feasible,
        final_phase,
        opt_phase: doubling::ceil_log2(opt as u128),
    })
}

/// Evaluates every grid point in parallel. Rows come back sorted by
/// instance digest, so the output does not depend on scheduling.
pub fn run_grid(grid: &Grid) -> Result<Vec<SweepRow>> {
    let config = DetConfig::new(grid.q)?;
    let specs = grid.specs();
    if specs.is_empty() {
        return Err(Error::InvalidSpec("sweep grid is empty".into()));
    }
    let mut rows = specs
        .par_iter()
        .map(|s| evaluate(s, config))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (&a.digest, a.family, a.nf, a.nc, a.na, a.seed)
            .cmp(&(&b.digest, b.family, b.nf, b.nc, b.na, b.seed))
    });
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
