//! Runtime invariant auditing.
//!
//! Algorithms report named checks into an [`AuditLog`]. A disabled log skips
//! the (sometimes expensive) checks entirely; a strict log turns the first
//! violation into an error.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// Stable names of every audited invariant.
pub mod names {
    pub const FRAC_PRIMAL_DUAL_STEP: &str = "frac.primal_dual_step";
    pub const FRAC_PRIMAL_LE_3DUAL: &str = "frac.primal_le_3dual";
    pub const FRAC_DUAL_EQUALITY: &str = "frac.dual_equality";
    pub const FRAC_ALPHA_BOUND: &str = "frac.alpha_bound";
    pub const FRAC_BETA_BOUND: &str = "frac.beta_bound";
    pub const FRAC_AUGMENT_BOUND: &str = "frac.augment_bound";
    pub const FRAC_STRUCTURE: &str = "frac.structure";
    pub const FRAC_MONOTONE: &str = "frac.monotone";
    pub const FRAC_GOOD_DISTANCE: &str = "frac.good_distance";
    pub const ROUND_POTENTIAL_INITIAL: &str = "rounding.potential_initial";
    pub const ROUND_POTENTIAL_MONOTONE: &str = "rounding.potential_monotone";
    pub const ROUND_POTENTIAL_CAP: &str = "rounding.potential_cap";
    pub const ROUND_COVERING: &str = "rounding.covering";
    pub const ROUND_OPENING_BOUND: &str = "rounding.opening_bound";
    pub const INT_CONNECTION_CLIENT: &str = "int.connection_client";
    pub const INT_CONNECTION_TOTAL: &str = "int.connection_total";
    pub const INT_FEASIBLE: &str = "int.feasible";
    pub const DET_BUDGET_PREFIX: &str = "det.budget_prefix";
    pub const DET_PHASE_SPEND: &str = "det.phase_spend";
    pub const DET_PREPURCHASE: &str = "det.prepurchase";
    pub const DET_FEASIBLE: &str = "det.feasible";
    pub const DET_FINAL_PHASE: &str = "det.final_phase";

    pub const ALL: &[&str] = &[
        FRAC_PRIMAL_DUAL_STEP,
        FRAC_PRIMAL_LE_3DUAL,
        FRAC_DUAL_EQUALITY,
        FRAC_ALPHA_BOUND,
        FRAC_BETA_BOUND,
        FRAC_AUGMENT_BOUND,
        FRAC_STRUCTURE,
        FRAC_MONOTONE,
        FRAC_GOOD_DISTANCE,
        ROUND_POTENTIAL_INITIAL,
        ROUND_POTENTIAL_MONOTONE,
        ROUND_POTENTIAL_CAP,
        ROUND_COVERING,
        ROUND_OPENING_BOUND,
        INT_CONNECTION_CLIENT,
        INT_CONNECTION_TOTAL,
        INT_FEASIBLE,
        DET_BUDGET_PREFIX,
        DET_PHASE_SPEND,
        DET_PREPURCHASE,
        DET_FEASIBLE,
        DET_FINAL_PHASE,
    ];
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct AuditLog {
    enabled: bool,
    strict: bool,
    skipped: BTreeSet<String>,
    entries: BTreeMap<String, AuditEntry>,
}

impl AuditLog {
    pub fn disabled() -> Self {
        AuditLog::default()
    }

    pub fn enabled() -> Self {
        AuditLog {
            enabled: true,
            ..Default::default()
        }
    }

    pub fn strict() -> Self {
        AuditLog {
            enabled: true,
            strict: true,
            ..Default::default()
        }
    }

    /// Turns a single named check off.
    pub fn skip(mut self, name: &str) -> Self {
        self.skipped.insert(name.to_string());
        self
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn wants(&self, name: &str) -> bool {
        self.enabled && !self.skipped.contains(name)
    }

    /// Records the outcome of one check. Returns an error only in strict
    /// mode on failure.
    pub fn record(&mut self, name: &str, ok: bool, context: impl FnOnce() -> String) -> Result<()> {
        if !self.wants(name) {
            return Ok(());
        }
        let entry = self.entries.entry(name.to_string()).or_default();
        entry.checks += 1;
        if !ok {
            entry.failures += 1;
            let context = context();
            log::error!("audit {name} failed: {context}");
            if entry.first_failure.is_none() {
                entry.first_failure = Some(context.clone());
            }
            if self.strict {
                return Err(Error::AuditFailure {
                    name: name.to_string(),
                    context,
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &BTreeMap<String, AuditEntry> {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.get(name)
    }

    pub fn checks(&self, name: &str) -> u64 {
        self.entries.get(name).map_or(0, |e| e.checks)
    }

    pub fn failures(&self, name: &str) -> u64 {
        self.entries.get(name).map_or(0, |e| e.failures)
    }

    pub fn total_failures(&self) -> u64 {
        self.entries.values().map(|e| e.failures).sum()
    }

    /// Adds the counts of `other` into this log.
    pub fn absorb(&mut self, other: &AuditLog) {
        for (name, e) in &other.entries {
            let mine = self.entries.entry(name.clone()).or_default();
            mine.checks += e.checks;
            mine.failures += e.failures;
            if mine.first_failure.is_none() {
                mine.first_failure = e.first_failure.clone();
            }
        }
    }

    /// A fresh log with the same configuration and no entries.
    pub fn fork(&self) -> AuditLog {
        AuditLog {
            entries: BTreeMap::new(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disabled_log_records_nothing() {
        let mut log = AuditLog::disabled();
        log.record("x", false, || unreachable!()).unwrap();
        assert!(log.entries().is_empty());
    }

    #[test]
    fn strict_log_errors_on_failure() {
        let mut log = AuditLog::strict();
        log.record("x", true, String::new).unwrap();
        assert!(log.record("x", false, || "boom".into()).is_err());
        assert_eq!(log.checks("x"), 2);
        assert_eq!(log.failures("x"), 1);
    }

    #[test]
    fn skip_and_absorb() {
        let mut a = AuditLog::enabled().skip("y");
        a.record("y", false, String::new).unwrap();
        assert_eq!(a.checks("y"), 0);
        let mut b = a.fork();
        b.record("x", false, || "first".into()).unwrap();
        a.absorb(&b);
        a.absorb(&b);
        assert_eq!(a.failures("x"), 2);
        assert_eq!(
            a.entry("x").unwrap().first_failure.as_deref(),
            Some("first")
        );
    }
}
