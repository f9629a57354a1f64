//! Dynamic-priority scheduling of schedulable loads.
//!
//! Each interval the scheduler
//!
//! 1. subtracts the measured nonschedulable load from the utility PIL,
//! 2. keeps running noninterruptible loads ON,
//! 3. forces ON every request whose remaining run time no longer fits
//!    anywhere but "now until the deadline" (dynamic priority >= 1),
//! 4. walks the other active requests in descending dynamic priority and
//!    re-plans each onto its minimum cost-to-power-ratio (CPR) intervals; a
//!    request runs now when the current interval is in its plan and its
//!    rating fits the headroom left by the loads already placed,
//! 5. counts down the run time of every load it switched ON.
//!
//! CPR for future intervals uses the day-ahead tariff and PIL, less the SL
//! power already planned there and less the NSL power measured now (assumed
//! to persist).

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::load::{LoadCategory, RequestStatus, SlRequest};
use crate::scalar::Scalar;
use crate::signal::SignalSchedule;
use crate::time::{IntervalIndex, INTERVALS_PER_DAY};

/// PIL left for schedulable loads once the NSLs running now are served.
/// Negative when the NSLs alone exceed the limit.
pub fn effective_pil<T: Scalar>(pil_old_kw: T, nsl_powers_kw: &[T]) -> T {
    nsl_powers_kw.iter().fold(pil_old_kw, |acc, &p| acc - p)
}

/// `k / (f - r_rem + 1)`; reaches 1 at the latest feasible start.
pub fn dynamic_priority<T: Scalar>(req: &SlRequest<T>, k: IntervalIndex) -> Result<T> {
    let latest = req.latest_start();
    if latest <= 0 {
        return Err(Error::Infeasible {
            needed: usize::from(req.remaining),
            available: usize::from(req.deadline.get().saturating_sub(k.get()) + 1),
        });
    }
    Ok(T::of_u32(u32::from(k.get())) / T::of_u32(latest as u32))
}

/// True once the remaining run needs every interval from `k` to the deadline.
pub fn must_run<T: Scalar>(req: &SlRequest<T>, k: IntervalIndex) -> bool {
    i32::from(req.remaining) > i32::from(req.deadline.get()) - i32::from(k.get())
}

/// `P * C * r / (60 * PIL)` with the remaining run time in minutes; `+inf`
/// when there is no headroom.
pub fn cost_power_ratio<T: Scalar>(p_kw: T, price: T, r_rem_min: u32, pil_eff_kw: T) -> T {
    if pil_eff_kw <= T::zero() {
        return T::infinity();
    }
    p_kw * price * T::of_u32(r_rem_min) / (T::of(60.0) * pil_eff_kw)
}

fn by_cpr_then_time<T: Scalar>(a: &(IntervalIndex, T), b: &(IntervalIndex, T)) -> Ordering {
    a.1.partial_cmp(&b.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

/// The `required` candidates with the smallest CPR, earliest first on ties.
/// Returned in interval order.
pub fn plan_interruptible<T: Scalar>(
    required: u16,
    cprs: &[(IntervalIndex, T)],
) -> Result<Vec<IntervalIndex>> {
    let required = usize::from(required);
    if cprs.len() < required {
        return Err(Error::Infeasible {
            needed: required,
            available: cprs.len(),
        });
    }
    let mut ranked = cprs.to_vec();
    ranked.sort_by(by_cpr_then_time);
    let mut plan: Vec<IntervalIndex> = ranked[..required].iter().map(|&(k, _)| k).collect();
    plan.sort();
    Ok(plan)
}

/// Start of the contiguous `required`-interval window with the smallest CPR
/// sum, earliest on ties. `cprs` must be in interval order.
pub fn plan_noninterruptible<T: Scalar>(
    required: u16,
    cprs: &[(IntervalIndex, T)],
) -> Result<IntervalIndex> {
    let len = usize::from(required);
    let mut best: Option<(IntervalIndex, T)> = None;
    if len > 0 && cprs.len() >= len {
        for window in cprs.windows(len) {
            let (first, last) = (window[0].0, window[len - 1].0);
            if usize::from(last.get() - first.get()) + 1 != len {
                continue;
            }
            let total: T = window.iter().map(|&(_, c)| c).sum();
            if best.is_none_or(|(_, b)| total < b) {
                best = Some((first, total));
            }
        }
    }
    best.map(|(k, _)| k).ok_or(Error::Infeasible {
        needed: len,
        available: cprs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalDecision<T> {
    pub k: IntervalIndex,
    /// Appliances switched ON this interval, by name.
    pub on_loads: Vec<String>,
    /// Subset of `on_loads` running under the must-run rule.
    pub forced: Vec<String>,
    pub pil_new_kw: T,
}

/// Live view of one request, for dashboards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequestView<T> {
    pub appliance: String,
    pub category: LoadCategory,
    pub start: IntervalIndex,
    pub deadline: IntervalIndex,
    pub run_intervals: u16,
    pub remaining: u16,
    pub status: RequestStatus,
    pub forced: bool,
    pub infeasible: bool,
    /// Dynamic priority at the viewed interval, once the window has opened.
    pub dynamic_priority: Option<T>,
    /// CPR of the viewed interval from the day-ahead signals.
    pub cpr: Option<T>,
    pub plan: Vec<IntervalIndex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState<T> {
    tariff: SignalSchedule<T>,
    pil: SignalSchedule<T>,
    requests: Vec<SlRequest<T>>,
    plans: Vec<Vec<IntervalIndex>>,
    last_k: Option<IntervalIndex>,
}

impl<T: Scalar> SchedulerState<T> {
    pub fn new(tariff: SignalSchedule<T>, pil: SignalSchedule<T>) -> Self {
        SchedulerState {
            tariff,
            pil,
            requests: Vec::new(),
            plans: Vec::new(),
            last_k: None,
        }
    }

    pub fn add_request(&mut self, request: SlRequest<T>) -> usize {
        self.requests.push(request);
        self.plans.push(Vec::new());
        self.requests.len() - 1
    }

    pub fn requests(&self) -> &[SlRequest<T>] {
        &self.requests
    }

    /// Intervals currently planned for request `i` (from the last step on).
    pub fn plan(&self, i: usize) -> &[IntervalIndex] {
        &self.plans[i]
    }

    pub fn last_k(&self) -> Option<IntervalIndex> {
        self.last_k
    }

    pub fn views(&self, k: IntervalIndex) -> Vec<RequestView<T>> {
        self.requests
            .iter()
            .zip(&self.plans)
            .map(|(r, plan)| {
                let live = r.is_active_at(k);
                RequestView {
                    appliance: r.appliance.clone(),
                    category: r.category,
                    start: r.start,
                    deadline: r.deadline,
                    run_intervals: r.run_intervals,
                    remaining: r.remaining,
                    status: r.status,
                    forced: r.forced,
                    infeasible: r.infeasible,
                    dynamic_priority: if live {
                        dynamic_priority(r, k).ok()
                    } else {
                        None
                    },
                    cpr: (r.status != RequestStatus::Completed).then(|| {
                        cost_power_ratio(
                            r.rating_kw,
                            self.tariff.value_at(k),
                            r.remaining_minutes(),
                            self.pil.value_at(k),
                        )
                    }),
                    plan: plan.iter().copied().filter(|&p| p >= k).collect(),
                }
            })
            .collect()
    }

    /// Decides interval `k`. `nsl_powers_kw` holds the rating of every
    /// nonschedulable load ON during `k`.
    pub fn step(&mut self, k: IntervalIndex, nsl_powers_kw: &[T]) -> Result<IntervalDecision<T>> {
        if self.last_k.is_some_and(|last| k <= last) {
            return Err(Error::invalid("k", format!("interval {k} already decided")));
        }
        self.last_k = Some(k);

        let nsl_kw: T = nsl_powers_kw.iter().copied().sum();
        let pil_new = effective_pil(self.pil.value_at(k), nsl_powers_kw);
        let mut allocated = vec![T::zero(); usize::from(INTERVALS_PER_DAY)];
        let mut on = vec![false; self.requests.len()];
        let mut forced = vec![false; self.requests.len()];
        let active: Vec<usize> = (0..self.requests.len())
            .filter(|&i| self.requests[i].is_active_at(k))
            .collect();

        for &i in &active {
            let req = &mut self.requests[i];
            let running_nisl =
                req.category == LoadCategory::Nisl && req.status == RequestStatus::Running;
            if !(running_nisl || req.forced || must_run(req, k)) {
                continue;
            }
            if !running_nisl || req.forced {
                req.forced = true;
                forced[i] = true;
            }
            if i32::from(req.remaining) > i32::from(req.deadline.get()) - i32::from(k.get()) + 1 {
                req.infeasible = true;
            }
            on[i] = true;
            let plan = contiguous(k, req.remaining);
            for p in &plan {
                allocated[p.index()] = allocated[p.index()] + req.rating_kw;
            }
            self.plans[i] = plan;
        }

        let mut contenders: Vec<(usize, T)> = active
            .iter()
            .filter(|&&i| !on[i])
            .map(|&i| dynamic_priority(&self.requests[i], k).map(|dp| (i, dp)))
            .collect::<Result<_>>()?;
        contenders.sort_by(|&(a, dpa), &(b, dpb)| {
            let (ra, rb) = (&self.requests[a], &self.requests[b]);
            dpb.partial_cmp(&dpa)
                .unwrap_or(Ordering::Equal)
                .then(
                    rb.rating_kw
                        .partial_cmp(&ra.rating_kw)
                        .unwrap_or(Ordering::Equal),
                )
                .then(ra.appliance.cmp(&rb.appliance))
                .then(a.cmp(&b))
        });

        for (i, _) in contenders {
            let req = &self.requests[i];
            let cprs: Vec<(IntervalIndex, T)> = IntervalIndex::range(k, req.deadline)
                .map(|kk| {
                    let headroom = self.pil.value_at(kk) - nsl_kw - allocated[kk.index()];
                    let cpr = cost_power_ratio(
                        req.rating_kw,
                        self.tariff.value_at(kk),
                        req.remaining_minutes(),
                        headroom,
                    );
                    (kk, cpr)
                })
                .collect();
            let plan = match req.category {
                LoadCategory::Nisl => {
                    contiguous(plan_noninterruptible(req.remaining, &cprs)?, req.remaining)
                }
                _ => plan_interruptible(req.remaining, &cprs)?,
            };
            let fits = req.rating_kw <= pil_new - allocated[k.index()];
            let runs = fits && plan.contains(&k);
            for p in &plan {
                if *p != k || runs {
                    allocated[p.index()] = allocated[p.index()] + req.rating_kw;
                }
            }
            on[i] = runs;
            self.plans[i] = plan;
        }

        let mut on_loads = Vec::new();
        let mut forced_loads = Vec::new();
        for (i, req) in self.requests.iter_mut().enumerate() {
            if on[i] {
                req.record_on();
                on_loads.push(req.appliance.clone());
                if forced[i] {
                    forced_loads.push(req.appliance.clone());
                }
            }
        }
        on_loads.sort();
        forced_loads.sort();
        Ok(IntervalDecision {
            k,
            on_loads,
            forced: forced_loads,
            pil_new_kw: pil_new,
        })
    }
}

fn contiguous(from: IntervalIndex, len: u16) -> Vec<IntervalIndex> {
    (from.get()..from.get() + len)
        .filter_map(|k| IntervalIndex::new(k).ok())
        .collect()
}
