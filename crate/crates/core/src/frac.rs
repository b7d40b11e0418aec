//! The online fractional primal-dual algorithm.
//!
//! Each arriving client raises its connection variables `x_{c,t}` one
//! distance at a time (at pace `1/t`) while facility openings `y_f` reachable
//! through saturated distances grow by the multiplicative-plus-additive rule
//! `y_f <- (1 + 1/cost(f)) y_f + 1/(|F| cost(f))`. Dual variables are kept
//! alongside purely so the audit can check the primal-dual coupling.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::audit::{names, AuditLog};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

/// Connection variable `x_{c,t}`. Denominators are powers of two, so this
/// stays exact.
pub type Connection = Ratio<u64>;

/// One increment of a fractional opening, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation<S> {
    pub facility: usize,
    pub delta: S,
}

/// Result of one update operation.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStep<S> {
    /// Index in `T` of the distance whose `x` was raised, if any.
    pub active: Option<usize>,
    pub augmentations: Vec<Augmentation<S>>,
}

#[derive(Debug, Clone)]
pub struct ServeOutcome<S> {
    pub updates: u64,
    pub trace: Vec<Augmentation<S>>,
}

/// Distance `τ` whose prefix is half-open and that the client paid for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodDistance {
    pub t_index: usize,
    pub tau: u64,
}

#[derive(Debug, Clone)]
pub struct FracState<S> {
    pub y: Vec<S>,
    x: Vec<Option<Vec<Connection>>>,
    saturated: Vec<Vec<bool>>,
    pub update_count: Vec<u64>,
    pub augment_count: Vec<u64>,
}

impl<S: Scalar> FracState<S> {
    pub fn x(&self, c: usize) -> Option<&[Connection]> {
        self.x[c].as_deref()
    }

    pub fn saturated(&self, c: usize) -> &[bool] {
        &self.saturated[c]
    }
}

#[derive(Debug, Clone, Default)]
pub struct DualState {
    pub gamma: Vec<u64>,
    pub alpha: Vec<Vec<u64>>,
    pub beta: Vec<Vec<u64>>,
}

pub struct FracEngine<'a, S> {
    inst: &'a Instance,
    state: FracState<S>,
    duals: Option<DualState>,
    arrivals: Vec<usize>,
    /// Per facility, the `(client, t_index)` pairs of its incident edges.
    incident: Vec<Vec<(usize, usize)>>,
    augment_limit: Vec<u64>,
}

impl<'a, S: Scalar> FracEngine<'a, S> {
    /// Zero-cost facilities start fully open; everything else at zero.
    pub fn new(inst: &'a Instance) -> Self {
        let nf = inst.num_facilities();
        let nc = inst.num_clients();
        let y = (0..nf)
            .map(|f| {
                if inst.facility_cost(f) == 0 {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        let mut incident = vec![Vec::new(); nf];
        for (f, c, cost) in inst.edges() {
            let ti = inst
                .distances()
                .index_of(cost)
                .expect("edge cost lies in T");
            incident[f].push((c, ti));
        }
        let augment_limit = (0..nf)
            .map(|f| augmentation_limit(inst.facility_cost(f), nf))
            .collect();
        FracEngine {
            inst,
            state: FracState {
                y,
                x: vec![None; nc],
                saturated: vec![Vec::new(); nc],
                update_count: vec![0; nc],
                augment_count: vec![0; nf],
            },
            duals: Some(DualState {
                gamma: vec![0; nc],
                alpha: vec![Vec::new(); nc],
                beta: vec![Vec::new(); nc],
            }),
            arrivals: Vec::new(),
            incident,
            augment_limit,
        }
    }

    /// Drops dual bookkeeping; dual audits are skipped afterwards.
    pub fn without_duals(mut self) -> Self {
        self.duals = None;
        self
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn state(&self) -> &FracState<S> {
        &self.state
    }

    pub fn duals(&self) -> Option<&DualState> {
        self.duals.as_ref()
    }

    pub fn arrivals(&self) -> &[usize] {
        &self.arrivals
    }

    pub fn y(&self, f: usize) -> &S {
        &self.state.y[f]
    }

    pub fn x(&self, c: usize, t_index: usize) -> Connection {
        self.state.x[c]
            .as_ref()
            .map_or(Connection::zero(), |row| row[t_index])
    }

    /// Upper bound on augmentations of `f`: `cost + ceil(log_{1+1/cost} |F|)`.
    pub fn augment_limit(&self, f: usize) -> u64 {
        self.augment_limit[f]
    }

    pub fn arrive(&mut self, c: usize) -> Result<()> {
        if self.state.x[c].is_some() {
            return Err(Error::DuplicateArrival(self.inst.client_id(c).to_string()));
        }
        let nt = self.inst.distances().len();
        let mut row = vec![Connection::zero(); nt];
        row[0] = Connection::one();
        self.state.x[c] = Some(row);
        self.state.saturated[c] = (0..nt).map(|i| i == 0).collect();
        if let Some(d) = &mut self.duals {
            d.gamma[c] = 0;
            d.alpha[c] = vec![0; nt];
            d.beta[c] = vec![0; nt];
        }
        self.arrivals.push(c);
        Ok(())
    }

    fn row(&self, c: usize) -> Result<&[Connection]> {
        self.state.x[c]
            .as_deref()
            .ok_or_else(|| Error::NotArrived(self.inst.client_id(c).to_string()))
    }

    fn y_sum<I: IntoIterator<Item = usize>>(&self, facilities: I) -> S {
        facilities
            .into_iter()
            .fold(S::zero(), |acc, f| acc + self.state.y[f].clone())
    }

    /// `y(F_{c,t})`.
    pub fn y_cluster(&self, c: usize, t_index: usize) -> S {
        self.y_sum(self.inst.clusters().cluster(c, t_index).iter().copied())
    }

    /// `y(S_{c,t})`.
    pub fn y_prefix(&self, c: usize, t_index: usize) -> S {
        self.y_sum(self.inst.clusters().prefix(c, t_index))
    }

    /// `Σ_t min{x_{c,t}, y(F_{c,t})}`.
    pub fn serving_value(&self, c: usize) -> Result<S> {
        let row = self.row(c)?;
        let mut total = S::zero();
        for (ti, x) in row.iter().enumerate() {
            let x = ratio_to_scalar::<S>(x);
            let y = self.y_cluster(c, ti);
            total = total + if x < y { x } else { y };
        }
        Ok(total)
    }

    fn is_served(&self, c: usize) -> Result<bool> {
        Ok(self.serving_value(c)? >= S::one() - S::serving_slack())
    }

    /// One update operation for client `c`.
    pub fn update_operation(&mut self, c: usize) -> Result<UpdateStep<S>> {
        self.row(c)?;
        let saturated = self.state.saturated[c].clone();

        if let Some(d) = &mut self.duals {
            d.gamma[c] += 1;
            for (ti, &sat) in saturated.iter().enumerate() {
                if sat {
                    d.beta[c][ti] += 1;
                } else {
                    d.alpha[c][ti] += 1;
                }
            }
        }

        let distances = self.inst.distances().values();
        let active = saturated.iter().position(|s| !s);
        if let Some(active) = active {
            let t = distances[active];
            let row = self.state.x[c].as_mut().expect("arrived");
            row[active] += Connection::new(1, t);
        }

        let mut targets: Vec<usize> = saturated
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .flat_map(|(ti, _)| self.inst.clusters().cluster(c, ti).iter().copied())
            .collect();
        targets.sort_unstable();

        let nf = S::from_count(self.inst.num_facilities() as u64);
        let mut trace = Vec::with_capacity(targets.len());
        for f in targets {
            let cost = self.inst.facility_cost(f);
            if cost == 0 {
                return Err(Error::ZeroCostAugmentation(
                    self.inst.facility_id(f).to_string(),
                ));
            }
            let cost = S::from_count(cost);
            let before = self.state.y[f].clone();
            let after = (S::one() + S::one() / cost.clone()) * before.clone()
                + S::one() / (nf.clone() * cost);
            self.state.y[f] = after.clone();
            self.state.augment_count[f] += 1;
            trace.push(Augmentation {
                facility: f,
                delta: after - before,
            });
        }

        let row = self.state.x[c].as_ref().expect("arrived");
        self.state.saturated[c] = row.iter().map(|x| *x >= Connection::one()).collect();
        self.state.update_count[c] += 1;
        Ok(UpdateStep {
            active,
            augmentations: trace,
        })
    }

    /// Updates that suffice to serve any client with at least one edge.
    pub fn update_bound(&self) -> u64 {
        2 * self.inst.distances().max()
            + self.inst.num_facilities() as u64 * self.inst.max_facility_cost()
            + 1
    }

    /// Arrives `c` and runs update operations until its serving constraint
    /// holds, auditing every step into `audit`.
    pub fn serve_client(&mut self, c: usize, audit: &mut AuditLog) -> Result<ServeOutcome<S>> {
        self.arrive(c)?;
        let bound = self.update_bound();
        let mut trace = Vec::new();
        let mut updates = 0u64;
        while !self.is_served(c)? {
            if updates >= bound {
                return Err(Error::NonTermination {
                    client: self.inst.client_id(c).to_string(),
                    bound,
                });
            }
            let snapshot = audit
                .wants(names::FRAC_MONOTONE)
                .then(|| self.state.clone());
            let dual_before = self.dual_value();
            let step = self.update_operation(c)?;
            updates += 1;
            self.audit_update(c, &step, dual_before, snapshot.as_ref(), audit)?;
            log::trace!(
                "client {} update {}: active {:?}, {} augmentations",
                self.inst.client_id(c),
                updates,
                step.active,
                step.augmentations.len()
            );
            trace.extend(step.augmentations);
        }
        if audit.wants(names::FRAC_GOOD_DISTANCE) {
            let ok = match self.good_distance(c) {
                Ok(g) => {
                    let y = self.y_prefix(c, g.t_index).as_f64();
                    let paid = self.connection_cost(c) as f64;
                    y >= 0.5 - 1e-9 && paid >= g.tau as f64 / 2.0
                }
                Err(_) => false,
            };
            audit.record(names::FRAC_GOOD_DISTANCE, ok, || {
                format!("client {}", self.inst.client_id(c))
            })?;
        }
        Ok(ServeOutcome { updates, trace })
    }

    fn audit_update(
        &self,
        c: usize,
        step: &UpdateStep<S>,
        dual_before: u64,
        before: Option<&FracState<S>>,
        audit: &mut AuditLog,
    ) -> Result<()> {
        let id = || self.inst.client_id(c).to_string();
        let upd = self.state.update_count[c];

        if audit.wants(names::FRAC_PRIMAL_DUAL_STEP) {
            // Raising x_{c,t*} by 1/t* costs exactly 1.
            let connection_growth = if step.active.is_some() {
                S::one()
            } else {
                S::zero()
            };
            let growth = step.augmentations.iter().fold(connection_growth, |acc, a| {
                acc + S::from_count(self.inst.facility_cost(a.facility)) * a.delta.clone()
            });
            let growth = growth.as_f64();
            let dual_growth = self.dual_value() as i128 - dual_before as i128;
            let ok = growth <= 3.0 + 1e-9 && (self.duals.is_none() || dual_growth == 1);
            audit.record(names::FRAC_PRIMAL_DUAL_STEP, ok, || {
                format!(
                    "client {} update {upd}: primal +{growth}, dual +{dual_growth}",
                    id()
                )
            })?;
        }

        if let Some(d) = &self.duals {
            if audit.wants(names::FRAC_DUAL_EQUALITY) {
                let ok =
                    (0..d.alpha[c].len()).all(|ti| d.gamma[c] == d.alpha[c][ti] + d.beta[c][ti]);
                audit.record(names::FRAC_DUAL_EQUALITY, ok, || {
                    format!("client {} update {upd}", id())
                })?;
            }
            if audit.wants(names::FRAC_ALPHA_BOUND) {
                let ts = self.inst.distances().values();
                let ok = d.alpha[c]
                    .iter()
                    .zip(ts)
                    .all(|(&a, &t)| if t == 0 { a == 0 } else { a < 2 * t });
                audit.record(names::FRAC_ALPHA_BOUND, ok, || {
                    format!("client {} alpha {:?}", id(), d.alpha[c])
                })?;
            }
            if audit.wants(names::FRAC_BETA_BOUND) {
                for &(f, _) in self.inst.neighbors(c) {
                    let sum: u64 = self.incident[f]
                        .iter()
                        .filter(|(c2, _)| self.state.x[*c2].is_some())
                        .map(|&(c2, ti)| d.beta[c2][ti])
                        .sum();
                    let aug = self.state.augment_count[f];
                    audit.record(names::FRAC_BETA_BOUND, sum <= aug, || {
                        format!(
                            "facility {}: beta sum {sum} > augmentations {aug}",
                            self.inst.facility_id(f)
                        )
                    })?;
                }
            }
        }

        if audit.wants(names::FRAC_AUGMENT_BOUND) {
            for a in &step.augmentations {
                let f = a.facility;
                let (n, lim) = (self.state.augment_count[f], self.augment_limit[f]);
                audit.record(names::FRAC_AUGMENT_BOUND, n <= lim, || {
                    format!(
                        "facility {}: {n} augmentations > {lim}",
                        self.inst.facility_id(f)
                    )
                })?;
            }
        }

        if audit.wants(names::FRAC_STRUCTURE) {
            let ok = check_structure(self.row(c)?, &self.state.saturated[c]);
            audit.record(names::FRAC_STRUCTURE, ok, || {
                format!("client {} update {upd}: {:?}", id(), self.row(c))
            })?;
        }

        if let Some(before) = before {
            let y_ok = before.y.iter().zip(&self.state.y).all(|(b, a)| a >= b);
            let x_ok = before
                .x
                .iter()
                .zip(&self.state.x)
                .all(|(b, a)| match (b, a) {
                    (Some(b), Some(a)) => b.iter().zip(a).all(|(b, a)| a >= b),
                    (None, _) => true,
                    (Some(_), None) => false,
                });
            let step_ok = step.augmentations.iter().all(|s| s.delta >= S::zero());
            audit.record(names::FRAC_MONOTONE, y_ok && x_ok && step_ok, || {
                format!("client {} update {upd}", id())
            })?;
        }
        Ok(())
    }

    /// Constructive choice of a good distance once `c` is served: the
    /// largest distance with positive `x` if it alone is half-served,
    /// otherwise the next smaller distance.
    pub fn good_distance(&self, c: usize) -> Result<GoodDistance> {
        let row = self.row(c)?;
        let half = S::one() / S::from_count(2);
        let last = row
            .iter()
            .rposition(|x| *x > Connection::zero())
            .ok_or_else(|| Error::NoGoodDistance(self.inst.client_id(c).to_string()))?;
        let x = ratio_to_scalar::<S>(&row[last]);
        let y = self.y_cluster(c, last);
        let served = if x < y { x } else { y };
        let t_index = if served >= half {
            last
        } else if last > 0 {
            last - 1
        } else {
            return Err(Error::NoGoodDistance(self.inst.client_id(c).to_string()));
        };
        Ok(GoodDistance {
            t_index,
            tau: self.inst.distances().values()[t_index],
        })
    }

    /// `Σ_t t·x_{c,t}` for one client. Always an integer since `x_{c,t}`
    /// is a multiple of `1/t`.
    pub fn connection_cost(&self, c: usize) -> u64 {
        let Some(row) = &self.state.x[c] else {
            return 0;
        };
        row.iter()
            .zip(self.inst.distances().values())
            .map(|(x, &t)| (*x * t).to_integer())
            .sum()
    }

    pub fn total_connection_cost(&self) -> u64 {
        self.arrivals.iter().map(|&c| self.connection_cost(c)).sum()
    }

    pub fn opening_cost(&self) -> S {
        self.state
            .y
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (f, y)| {
                acc + S::from_count(self.inst.facility_cost(f)) * y.clone()
            })
    }

    /// `Σ_f cost(f) y_f + Σ_{c,t} t x_{c,t}`.
    pub fn primal_value(&self) -> S {
        self.opening_cost() + S::from_count(self.total_connection_cost())
    }

    /// `Σ_c γ_c`; zero when duals are disabled.
    pub fn dual_value(&self) -> u64 {
        self.duals.as_ref().map_or(0, |d| d.gamma.iter().sum())
    }
}

fn ratio_to_scalar<S: Scalar>(x: &Connection) -> S {
    S::from_count(*x.numer()) / S::from_count(*x.denom())
}

/// Saturated distances form a prefix; at most one active distance follows
/// with `x < 1`; every later distance has `x = 0`.
pub fn check_structure(row: &[Connection], saturated: &[bool]) -> bool {
    let one = Connection::one();
    if row.iter().any(|x| *x > one) {
        return false;
    }
    if row.iter().zip(saturated).any(|(x, &s)| (*x >= one) != s) {
        return false;
    }
    let prefix = row.iter().take_while(|x| **x == one).count();
    if prefix == 0 {
        return false;
    }
    row.iter().skip(prefix + 1).all(|x| x.is_zero())
}

/// Smallest `cost + m` with `(1 + 1/cost)^m >= nf`. Zero-cost facilities are
/// never augmented and get limit 0.
pub fn augmentation_limit(cost: u64, nf: usize) -> u64 {
    if cost == 0 {
        return 0;
    }
    if nf <= 1 {
        return cost;
    }
    let estimate = (nf as f64).ln() / (1.0 + 1.0 / cost as f64).ln();
    let near = estimate.round();
    let m = if (estimate - near).abs() > 1e-6 {
        estimate.ceil() as u64
    } else {
        // Resolve near-integer cases exactly: (cost+1)^m >= nf * cost^m.
        let mut m = (near as u64).saturating_sub(1);
        let base = BigUint::from(cost);
        let next = BigUint::from(cost + 1);
        let nf = BigUint::from(nf);
        while next.pow(m as u32) < &nf * base.pow(m as u32) {
            m += 1;
        }
        m
    };
    cost + m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn walkthrough() -> Instance {
        Instance::from_parts(
            vec![("f1".into(), 2), ("f2".into(), 2)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 1), (1, 0, 2)],
        )
        .unwrap()
    }

    #[test]
    fn init_opens_zero_cost_facilities() {
        let inst = Instance::from_parts(
            vec![("f1".into(), 0), ("f2".into(), 2)],
            vec!["c".into(), "d".into()],
            vec![],
        )
        .unwrap();
        let frac = FracEngine::<f64>::new(&inst);
        assert_eq!(frac.state().y, vec![1.0, 0.0]);
    }

    #[test]
    fn arrival_row() {
        let inst = walkthrough();
        let mut frac = FracEngine::<f64>::new(&inst);
        frac.arrive(0).unwrap();
        assert_eq!(
            frac.state().x(0).unwrap(),
            &[Connection::one(), Connection::zero(), Connection::zero()]
        );
        assert_eq!(frac.state().saturated(0), &[true, false, false]);
        assert_eq!(frac.duals().unwrap().gamma[0], 0);
        assert!(matches!(frac.arrive(0), Err(Error::DuplicateArrival(_))));
        assert!(matches!(frac.serving_value(1), Err(Error::NotArrived(_))));
    }

    #[test]
    fn walkthrough_updates_step_by_step() {
        let inst = walkthrough();
        let mut frac = FracEngine::<f64>::new(&inst);
        frac.arrive(0).unwrap();
        assert_eq!(frac.serving_value(0).unwrap(), 0.0);

        let t = frac.update_operation(0).unwrap();
        assert_eq!(t.active, Some(1));
        assert!(t.augmentations.is_empty());
        assert_eq!(frac.x(0, 1), Connection::one());
        assert_eq!(frac.state().saturated(0), &[true, true, false]);

        let t = frac.update_operation(0).unwrap();
        assert_eq!(frac.x(0, 2), Connection::new(1, 2));
        assert_eq!(
            t.augmentations,
            vec![Augmentation {
                facility: 0,
                delta: 0.25
            }]
        );

        frac.update_operation(0).unwrap();
        assert_eq!(frac.x(0, 2), Connection::one());
        assert_eq!(*frac.y(0), 0.625);

        let t = frac.update_operation(0).unwrap();
        assert_eq!(t.active, None);
        assert_eq!(t.augmentations.len(), 2);
        assert_eq!(*frac.y(0), 1.1875);
        assert_eq!(*frac.y(1), 0.25);
        assert_eq!(frac.serving_value(0).unwrap(), 1.25);
        let d = frac.duals().unwrap();
        assert_eq!(d.gamma[0], 4);
        assert_eq!(d.beta[0], vec![4, 3, 1]);
        assert_eq!(d.alpha[0], vec![0, 1, 3]);
    }

    #[test]
    fn walkthrough_serve_and_good_distance() {
        let inst = walkthrough();
        let mut frac = FracEngine::<f64>::new(&inst);
        let mut audit = AuditLog::strict();
        let out = frac.serve_client(0, &mut audit).unwrap();
        assert_eq!(out.updates, 4);
        assert_eq!(out.trace.len(), 4);
        assert_eq!(frac.primal_value(), 5.875);
        assert_eq!(frac.dual_value(), 4);
        assert_eq!(
            frac.good_distance(0).unwrap(),
            GoodDistance { t_index: 1, tau: 1 }
        );
        assert_eq!(frac.y_prefix(0, 1), 1.1875);
        assert_eq!(frac.connection_cost(0), 3);
        assert_eq!(audit.total_failures(), 0);
        assert!(audit.checks(names::FRAC_PRIMAL_DUAL_STEP) == 4);
    }

    #[test]
    fn walkthrough_exact_rational() {
        let inst = walkthrough();
        let mut frac = FracEngine::<BigRational>::new(&inst);
        frac.serve_client(0, &mut AuditLog::strict()).unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(*frac.y(0), r(19, 16));
        assert_eq!(*frac.y(1), r(1, 4));
        assert_eq!(frac.primal_value(), r(47, 8));
    }

    #[test]
    fn zero_cost_facility_serves_without_updates() {
        let inst = Instance::from_parts(
            vec![("f1".into(), 0), ("f2".into(), 4)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 0), (1, 0, 2)],
        )
        .unwrap();
        let mut frac = FracEngine::<f64>::new(&inst);
        let out = frac.serve_client(0, &mut AuditLog::strict()).unwrap();
        assert_eq!(out.updates, 0);
        assert_eq!(frac.good_distance(0).unwrap().tau, 0);
        assert_eq!(frac.primal_value(), 0.0);
    }

    #[test]
    fn single_distance_unit_cost() {
        // One distance t=1, facility cost 1, |F| = 2: x saturates after one
        // update, y reaches 1 after 1 + ceil(log2 2) = 2 augmentations.
        let inst = Instance::from_parts(
            vec![("f1".into(), 1), ("f2".into(), 1)],
            vec!["c".into(), "d".into()],
            vec![(0, 0, 1)],
        )
        .unwrap();
        let mut frac = FracEngine::<f64>::new(&inst);
        let out = frac.serve_client(0, &mut AuditLog::strict()).unwrap();
        assert_eq!(frac.x(0, 1), Connection::one());
        assert!(frac.state().augment_count[0] <= 2);
        assert_eq!(out.updates, 1 + frac.state().augment_count[0]);
        assert!(*frac.y(0) >= 1.0);
    }

    #[test]
    fn disconnected_client_hits_bound() {
        let inst = walkthrough();
        let mut frac = FracEngine::<f64>::new(&inst);
        assert!(matches!(
            frac.serve_client(1, &mut AuditLog::disabled()),
            Err(Error::NonTermination { .. })
        ));
    }

    #[test]
    fn empty_run_is_zero() {
        let inst = walkthrough();
        let frac = FracEngine::<f64>::new(&inst);
        assert_eq!(frac.primal_value(), 0.0);
        assert_eq!(frac.dual_value(), 0);
    }

    #[test]
    fn structure_check() {
        let r = |n, d| Connection::new(n, d);
        assert!(check_structure(
            &[r(1, 1), r(1, 2), r(0, 1)],
            &[true, false, false]
        ));
        assert!(check_structure(&[r(1, 1), r(1, 1)], &[true, true]));
        assert!(!check_structure(
            &[r(1, 1), r(0, 1), r(1, 2)],
            &[true, false, false]
        ));
        assert!(!check_structure(&[r(1, 1), r(1, 2)], &[true, true]));
    }

    #[test]
    fn augmentation_limits() {
        // cost 2, |F| = 2: 2 + ceil(log_1.5 2) = 2 + 2
        assert_eq!(augmentation_limit(2, 2), 4);
        // cost 1: log_2 |F| is an exact integer for |F| = 4
        assert_eq!(augmentation_limit(1, 4), 3);
        assert_eq!(augmentation_limit(1, 5), 4);
        assert_eq!(augmentation_limit(0, 5), 0);
        for cost in [1u64, 2, 4, 8, 64] {
            for nf in 2..20usize {
                let lim = augmentation_limit(cost, nf) - cost;
                let grow = |m: u64| (1.0 + 1.0 / cost as f64).powf(m as f64);
                assert!(grow(lim) >= nf as f64 * (1.0 - 1e-12));
                assert!(lim == 0 || grow(lim - 1) < nf as f64 * (1.0 + 1e-12));
            }
        }
    }
}
