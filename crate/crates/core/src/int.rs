//! The integral online algorithm: the fractional engine drives the rounding
//! state, and each served client is connected to its closest open facility.

use crate::audit::{names, AuditLog};
use crate::error::Result;
use crate::frac::{FracEngine, GoodDistance};
use crate::instance::Instance;
use crate::rounding::{Decision, RoundState};
use crate::scalar::FloatScalar;

/// What the integral algorithm did for one client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientRecord {
    pub client: usize,
    pub updates: u64,
    /// Facilities opened while processing this client's augmentations.
    pub opened: Vec<usize>,
    pub facility: usize,
    pub connection_cost: u64,
    pub good_distance: GoodDistance,
    /// `Σ_t t·x_{c,t}` paid by the fractional solution for this client.
    pub fractional_connection: u64,
}

impl ClientRecord {
    /// Cost added by this client under the given facility costs.
    pub fn cost(&self, inst: &Instance) -> u64 {
        self.opened
            .iter()
            .map(|&f| inst.facility_cost(f))
            .sum::<u64>()
            + self.connection_cost
    }
}

pub struct IntEngine<'a, S> {
    inst: &'a Instance,
    frac: FracEngine<'a, S>,
    round: RoundState<'a, S>,
    connection_cost: u64,
    records: Vec<ClientRecord>,
}

impl<'a, S: FloatScalar> IntEngine<'a, S> {
    pub fn new(inst: &'a Instance) -> Self {
        IntEngine {
            inst,
            frac: FracEngine::new(inst),
            round: RoundState::new(inst),
            connection_cost: 0,
            records: Vec::new(),
        }
    }

    /// Records the start-of-run potential check.
    pub fn audit_start(&self, audit: &mut AuditLog) -> Result<()> {
        let ell = S::from_count(2 * self.round.ell() as u64);
        audit.record(
            names::ROUND_POTENTIAL_INITIAL,
            self.round.initial_potential() == ell,
            || {
                format!(
                    "initial potential {:?} != 2ℓ = {:?}",
                    self.round.initial_potential(),
                    ell
                )
            },
        )
    }

    pub fn frac(&self) -> &FracEngine<'a, S> {
        &self.frac
    }

    pub fn rounding(&self) -> &RoundState<'a, S> {
        &self.round
    }

    pub fn records(&self) -> &[ClientRecord] {
        &self.records
    }

    pub fn opening_cost(&self) -> u64 {
        self.round.opening_cost()
    }

    pub fn connection_cost(&self) -> u64 {
        self.connection_cost
    }

    pub fn total_cost(&self) -> u64 {
        self.opening_cost() + self.connection_cost
    }

    /// Serves one arriving client.
    pub fn serve(&mut self, c: usize, audit: &mut AuditLog) -> Result<ClientRecord> {
        let outcome = self.frac.serve_client(c, audit)?;
        let mut opened = Vec::new();
        for a in &outcome.trace {
            if self.round.on_augment(a.facility, a.delta, audit)? == Decision::Opened {
                opened.push(a.facility);
            }
        }
        self.round.resync();
        let good_distance = self.frac.good_distance(c)?;
        let (facility, connection_cost) = self.round.connect(c)?;
        let fractional_connection = self.frac.connection_cost(c);
        self.connection_cost += connection_cost;

        audit.record(
            names::INT_CONNECTION_CLIENT,
            connection_cost <= good_distance.tau && connection_cost <= 2 * fractional_connection,
            || {
                format!(
                    "client {}: connection {connection_cost}, τ {}, fractional {fractional_connection}",
                    self.inst.client_id(c),
                    good_distance.tau
                )
            },
        )?;
        if audit.wants(names::ROUND_COVERING) {
            let bad = self.round.covering_violations();
            audit.record(names::ROUND_COVERING, bad.is_empty(), || {
                let (c2, ti) = bad[0];
                format!(
                    "after client {}: element ({}, {}) half-open but uncovered",
                    self.inst.client_id(c),
                    self.inst.client_id(c2),
                    self.inst.distances().values()[ti]
                )
            })?;
        }

        let record = ClientRecord {
            client: c,
            updates: outcome.updates,
            opened,
            facility,
            connection_cost,
            good_distance,
            fractional_connection,
        };
        self.records.push(record.clone());
        Ok(record)
    }

    /// End-of-run checks.
    pub fn audit_finish(&self, audit: &mut AuditLog) -> Result<()> {
        let opening = self.opening_cost() as f64;
        let bound = self.round.opening_cost_bound().as_f64();
        audit.record(names::ROUND_OPENING_BOUND, opening <= bound + 1e-6, || {
            format!("opening cost {opening} > bound {bound}")
        })?;
        let frac_conn = self.frac.total_connection_cost();
        audit.record(
            names::INT_CONNECTION_TOTAL,
            self.connection_cost <= 2 * frac_conn,
            || format!("connection {} > 2 × {frac_conn}", self.connection_cost),
        )?;
        let feasible = self.records.iter().all(|r| {
            self.round.is_open(r.facility)
                && self.inst.edge_cost(r.facility, r.client) == Some(r.connection_cost)
        });
        audit.record(names::INT_FEASIBLE, feasible, || {
            "a client is not connected to an open facility".into()
        })?;
        let primal = self.frac.primal_value().as_f64();
        let dual = self.frac.dual_value() as f64;
        audit.record(
            names::FRAC_PRIMAL_LE_3DUAL,
            primal <= 3.0 * dual + 1e-9,
            || format!("primal {primal} > 3 × dual {dual}"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walkthrough_int() {
        let inst = Instance::from_parts(
            vec![("f1".into(), 2), ("f2".into(), 2)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 1), (1, 0, 2)],
        )
        .unwrap();
        let mut int = IntEngine::<f64>::new(&inst);
        let mut audit = AuditLog::strict();
        int.audit_start(&mut audit).unwrap();
        let rec = int.serve(0, &mut audit).unwrap();
        int.audit_finish(&mut audit).unwrap();
        assert_eq!(rec.opened, vec![0]);
        assert_eq!((rec.facility, rec.connection_cost), (0, 1));
        assert_eq!(rec.fractional_connection, 3);
        assert_eq!(rec.good_distance.tau, 1);
        assert_eq!(int.total_cost(), 3);
        assert_eq!(rec.cost(&inst), 3);
        assert_eq!(audit.total_failures(), 0);
    }

    #[test]
    fn single_precision_runs() {
        let inst = Instance::from_parts(
            vec![("f1".into(), 2), ("f2".into(), 2)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 1), (1, 0, 2), (1, 1, 1)],
        )
        .unwrap();
        let mut int = IntEngine::<f32>::new(&inst);
        let mut audit = AuditLog::enabled();
        int.serve(0, &mut audit).unwrap();
        int.serve(1, &mut audit).unwrap();
        int.audit_finish(&mut audit).unwrap();
        assert_eq!(audit.failures(names::INT_FEASIBLE), 0);
    }
}
