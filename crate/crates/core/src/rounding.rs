//! Deterministic online rounding of fractional openings.
//!
//! Elements are the pairs `(c, t) ∈ C × T`; element `(c, t)` is covered by
//! the prefix set `S_{c,t}`. Every increment of a fractional opening `y_f`
//! is followed by a decision whether to open `f` integrally, taken so that
//! the potential
//!
//! ```text
//! Φ = Σ_{(c,t): ŷ(S_{c,t}) = 0} ℓ^{4·y(S_{c,t})}  +  ℓ·exp(Σ_f cost(f)/(2ρ)·(ŷ_f − b·y_f))
//! ```
//!
//! never increases, with `ℓ = |C × T|`, `b = 6 ln ℓ` and `ρ` the largest
//! facility cost. Starting from `Φ = 2ℓ`, this forces every element with
//! `y(S) ≥ 1/2` to be covered and keeps the integral opening cost within
//! `b·Σ cost·y + 2ρ`.

use crate::audit::{names, AuditLog};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{log_add_exp, log_sum_exp, FloatScalar};

/// Outcome of processing one fractional increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    AlreadyOpen,
    Kept,
    Opened,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opening {
    pub facility: usize,
    /// Index of the augmentation event that triggered the purchase; `None`
    /// for zero-cost facilities opened up front.
    pub event: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionRecord {
    pub client: usize,
    pub facility: usize,
    pub cost: u64,
}

pub struct RoundState<'a, F> {
    inst: &'a Instance,
    num_t: usize,
    /// Per facility, the elements whose prefix set contains it.
    elements_of: Vec<Vec<usize>>,
    yhat: Vec<bool>,
    shadow_y: Vec<F>,
    /// `y(S_{c,t})` and `ŷ(S_{c,t})` per element.
    elem_y: Vec<F>,
    elem_yhat: Vec<u32>,
    ell: usize,
    ln_ell: F,
    b: F,
    rho: u64,
    /// `Σ_f cost(f)/(2ρ)·(ŷ_f − b·y_f)`.
    phi2_exponent: F,
    /// Running value of `Φ₁`, used only as the scale for tolerance checks.
    phi1_sum: F,
    initial_potential: F,
    events: u64,
    evaluations: u64,
    openings: Vec<Opening>,
    connections: Vec<ConnectionRecord>,
}

impl<'a, F: FloatScalar> RoundState<'a, F> {
    /// Fresh state with `y = ŷ = 0` (so `Φ = 2ℓ`), followed by opening every
    /// zero-cost facility.
    pub fn new(inst: &'a Instance) -> Self {
        let nf = inst.num_facilities();
        let num_t = inst.distances().len();
        let ell = inst.num_elements();
        let mut elements_of = vec![Vec::new(); nf];
        for (f, c, cost) in inst.edges() {
            let k = inst
                .distances()
                .index_of(cost)
                .expect("edge cost lies in T");
            elements_of[f].extend((k..num_t).map(|ti| c * num_t + ti));
        }
        let ell_f = F::from_count(ell as u64);
        let ln_ell = ell_f.ln();
        let mut state = RoundState {
            inst,
            num_t,
            elements_of,
            yhat: vec![false; nf],
            shadow_y: vec![F::zero(); nf],
            elem_y: vec![F::zero(); ell],
            elem_yhat: vec![0; ell],
            ell,
            ln_ell,
            b: F::from_count(6) * ln_ell,
            rho: inst.max_facility_cost(),
            phi2_exponent: F::zero(),
            phi1_sum: ell_f,
            initial_potential: ell_f + ell_f,
            events: 0,
            evaluations: 0,
            openings: Vec::new(),
            connections: Vec::new(),
        };
        for f in 0..nf {
            if inst.facility_cost(f) == 0 {
                state.handle_zero_cost(f);
            }
        }
        state
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn b(&self) -> F {
        self.b
    }

    pub fn rho(&self) -> u64 {
        self.rho
    }

    pub fn is_open(&self, f: usize) -> bool {
        self.yhat[f]
    }

    pub fn yhat(&self) -> &[bool] {
        &self.yhat
    }

    pub fn shadow_y(&self) -> &[F] {
        &self.shadow_y
    }

    pub fn openings(&self) -> &[Opening] {
        &self.openings
    }

    pub fn connections(&self) -> &[ConnectionRecord] {
        &self.connections
    }

    /// Number of augmentation events processed.
    pub fn events(&self) -> u64 {
        self.events
    }

    /// Number of two-branch potential comparisons performed.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// `Φ` at construction time, before zero-cost facilities are opened.
    pub fn initial_potential(&self) -> F {
        self.initial_potential
    }

    pub fn element(&self, c: usize, t_index: usize) -> usize {
        c * self.num_t + t_index
    }

    fn term_exponent(&self, y: F) -> F {
        F::from_count(4) * y * self.ln_ell
    }

    /// `ln Φ₁`; `-inf` when every element is covered.
    pub fn ln_phi1(&self) -> F {
        log_sum_exp(
            self.elem_y
                .iter()
                .zip(&self.elem_yhat)
                .filter(|(_, &h)| h == 0)
                .map(|(&y, _)| self.term_exponent(y)),
        )
    }

    /// `ln Φ₂`.
    pub fn ln_phi2(&self) -> Result<F> {
        if self.rho == 0 {
            return Err(Error::DegenerateRho);
        }
        Ok(self.ln_ell + self.phi2_exponent)
    }

    /// `ln Φ`.
    pub fn ln_potential(&self) -> Result<F> {
        Ok(log_add_exp(self.ln_phi1(), self.ln_phi2()?))
    }

    fn kappa(&self, f: usize) -> F {
        F::from_count(self.inst.facility_cost(f)) / F::from_count(2 * self.rho)
    }

    fn open(&mut self, f: usize, event: Option<u64>) {
        self.yhat[f] = true;
        for &e in &self.elements_of[f] {
            self.elem_yhat[e] += 1;
        }
        if self.rho > 0 {
            self.phi2_exponent = self.phi2_exponent + self.kappa(f);
        }
        self.openings.push(Opening { facility: f, event });
    }

    fn raise(&mut self, f: usize, delta: F) {
        self.shadow_y[f] = self.shadow_y[f] + delta;
        for &e in &self.elements_of[f] {
            self.elem_y[e] = self.elem_y[e] + delta;
        }
        if self.rho > 0 {
            self.phi2_exponent = self.phi2_exponent - self.b * delta * self.kappa(f);
        }
    }

    /// Mirrors the fractional initialization `y_f = 1` for a zero-cost
    /// facility and opens it for free.
    pub fn handle_zero_cost(&mut self, f: usize) {
        if self.yhat[f] || self.inst.facility_cost(f) != 0 {
            return;
        }
        for &e in &self.elements_of[f] {
            if self.elem_yhat[e] == 0 {
                self.phi1_sum = self.phi1_sum - self.term_exponent(self.elem_y[e]).exp();
            }
        }
        self.raise(f, F::one());
        self.open(f, None);
    }

    /// Processes an increment `delta` of `y_f` and decides whether to open
    /// `f`, picking the branch with the smaller potential (ties keep it
    /// closed).
    pub fn on_augment(&mut self, f: usize, delta: F, audit: &mut AuditLog) -> Result<Decision> {
        let event = self.events;
        self.events += 1;
        let audit_potential = self.rho > 0 && audit.wants(names::ROUND_POTENTIAL_MONOTONE);
        let before_ln = if audit_potential {
            Some(self.ln_potential()?)
        } else {
            None
        };

        let decision = if self.yhat[f] {
            self.raise(f, delta);
            Decision::AlreadyOpen
        } else {
            if self.rho == 0 {
                return Err(Error::DegenerateRho);
            }
            self.evaluations += 1;
            let kappa = self.kappa(f);
            let mut term_before = F::zero();
            let mut term_after = F::zero();
            for &e in &self.elements_of[f] {
                if self.elem_yhat[e] == 0 {
                    term_before = term_before + self.term_exponent(self.elem_y[e]).exp();
                    term_after = term_after + self.term_exponent(self.elem_y[e] + delta).exp();
                }
            }
            let phi2 = (self.ln_ell + self.phi2_exponent).exp();
            let decay = -self.b * delta * kappa;
            let change_keep = (term_after - term_before) + phi2 * decay.exp_m1();
            let change_open = -term_before + phi2 * (kappa + decay).exp_m1();
            let open = change_open < change_keep;
            let best = if open { change_open } else { change_keep };
            let scale = self.phi1_sum + phi2;
            if best > F::potential_tolerance() * scale {
                return Err(Error::PotentialIncrease {
                    facility: self.inst.facility_id(f).to_string(),
                    before: scale.as_f64(),
                    best: (scale + best).as_f64(),
                });
            }
            if open {
                self.phi1_sum = self.phi1_sum - term_before;
            } else {
                self.phi1_sum = self.phi1_sum + (term_after - term_before);
            }
            self.raise(f, delta);
            if open {
                self.open(f, Some(event));
                log::trace!("event {event}: open {}", self.inst.facility_id(f));
                Decision::Opened
            } else {
                Decision::Kept
            }
        };

        if let Some(before) = before_ln {
            let after = self.ln_potential()?;
            let tol = F::potential_tolerance().ln_1p();
            audit.record(
                names::ROUND_POTENTIAL_MONOTONE,
                after <= before + tol,
                || {
                    format!(
                        "event {event} facility {}: ln Φ {:?} -> {:?}",
                        self.inst.facility_id(f),
                        before,
                        after
                    )
                },
            )?;
            let cap = (F::from_count(2) * F::from_count(self.ell as u64)).ln() + tol;
            audit.record(names::ROUND_POTENTIAL_CAP, after <= cap, || {
                format!("event {event}: ln Φ {:?} above ln 2ℓ", after)
            })?;
        }
        Ok(decision)
    }

    /// Recomputes the running `Φ₁` from the element aggregates.
    pub fn resync(&mut self) {
        self.phi1_sum = self
            .elem_y
            .iter()
            .zip(&self.elem_yhat)
            .filter(|(_, &h)| h == 0)
            .fold(F::zero(), |acc, (&y, _)| acc + self.term_exponent(y).exp());
    }

    /// Elements with `y(S) ≥ 1/2` but `ŷ(S) = 0`, recomputed from scratch.
    pub fn covering_violations(&self) -> Vec<(usize, usize)> {
        let half = F::one() / F::from_count(2);
        let clusters = self.inst.clusters();
        let mut out = Vec::new();
        for c in 0..self.inst.num_clients() {
            for ti in 0..self.num_t {
                let y = clusters
                    .prefix(c, ti)
                    .fold(F::zero(), |acc, f| acc + self.shadow_y[f]);
                let covered = clusters.prefix(c, ti).any(|f| self.yhat[f]);
                if y >= half && !covered {
                    out.push((c, ti));
                }
            }
        }
        out
    }

    /// `Σ_f cost(f)·ŷ_f`.
    pub fn opening_cost(&self) -> u64 {
        self.yhat
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(f, _)| self.inst.facility_cost(f))
            .sum()
    }

    /// `Σ_f cost(f)·y_f` as mirrored from the fractional engine.
    pub fn fractional_opening_cost(&self) -> F {
        self.shadow_y
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (f, &y)| {
                acc + F::from_count(self.inst.facility_cost(f)) * y
            })
    }

    /// `b·Σ cost·y + 2ρ`, the bound on the integral opening cost.
    pub fn opening_cost_bound(&self) -> F {
        self.b * self.fractional_opening_cost() + F::from_count(2 * self.rho)
    }

    /// Connects `c` to its cheapest open neighbour.
    pub fn connect(&mut self, c: usize) -> Result<(usize, u64)> {
        let &(facility, cost) = self
            .inst
            .neighbors(c)
            .iter()
            .find(|(f, _)| self.yhat[*f])
            .ok_or_else(|| Error::InfeasibleRounding(self.inst.client_id(c).to_string()))?;
        self.connections.push(ConnectionRecord {
            client: c,
            facility,
            cost,
        });
        Ok((facility, cost))
    }
}

/// Slack `exp(-(3/2) q ln p) - (p + (1-p) e^q)` of the two-point moment
/// bound used by the rounding argument.
pub fn moment_bound_slack(q: f64, p: f64) -> f64 {
    let lhs = p + (1.0 - p) * q.exp();
    let rhs = (-1.5 * q * p.ln()).exp();
    rhs - lhs
}

/// Checks `p·e^0 + (1-p)·e^q ≤ exp(-(3/2)·q·ln p)` for `q ∈ [0, 1/2]`,
/// `p ∈ (0, 1]`.
pub fn moment_bound_holds(q: f64, p: f64) -> bool {
    moment_bound_slack(q, p) >= -1e-12
}
