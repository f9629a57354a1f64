//! Bill accounting. Energy within the PIL is billed at the interval price;
//! energy above it at twice that price.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::load::{ApplianceSpec, LoadCategory};
use crate::scalar::Scalar;
use crate::time::{IntervalIndex, INTERVALS_PER_DAY, INTERVALS_PER_HOUR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalBill<T> {
    pub k: IntervalIndex,
    pub energy_kwh: T,
    pub in_limit_kwh: T,
    pub excess_kwh: T,
    /// In-limit energy at the interval price.
    pub base_cost: T,
    /// Excess energy at twice the interval price.
    pub penalty_cost: T,
}

impl<T: Scalar> IntervalBill<T> {
    pub fn total(&self) -> T {
        self.base_cost + self.penalty_cost
    }
}

pub fn interval_energy_cost<T: Scalar>(
    k: IntervalIndex,
    total_kw: T,
    pil_kw: T,
    price: T,
) -> IntervalBill<T> {
    let hours = T::one() / T::of_u32(u32::from(INTERVALS_PER_HOUR));
    let excess_kw = (total_kw - pil_kw).max(T::zero());
    let energy_kwh = total_kw * hours;
    let excess_kwh = excess_kw * hours;
    let in_limit_kwh = (total_kw - excess_kw) * hours;
    IntervalBill {
        k,
        energy_kwh,
        in_limit_kwh,
        excess_kwh,
        base_cost: price * in_limit_kwh,
        penalty_cost: T::of(2.0) * price * excess_kwh,
    }
}

/// One interval as billing sees it: which appliances ran, under which signals.
#[derive(Debug, Clone, PartialEq)]
pub struct MeteredInterval<'a, T> {
    pub k: IntervalIndex,
    /// Aligned with the appliance list.
    pub on: &'a [bool],
    pub price: T,
    pub pil_kw: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadCost<T> {
    pub name: String,
    pub category: LoadCategory,
    pub energy_kwh: T,
    pub cost: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BillReport<T> {
    /// Per appliance, in appliance order.
    pub loads: Vec<LoadCost<T>>,
    pub total_cost: T,
    pub penalty_total: T,
    pub energy_kwh: T,
    pub peak_kw: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison<T> {
    pub savings_percent: T,
    pub peak_reduction_percent: T,
}

/// Bills any set of intervals; returns the per-interval bills and the report.
///
/// Base cost is shared among the loads ON in an interval by power. The
/// penalty goes to the schedulable loads ON in that interval by power, or to
/// all ON loads when no schedulable load is running.
pub fn bill_intervals<T: Scalar>(
    appliances: &[ApplianceSpec<T>],
    intervals: &[MeteredInterval<'_, T>],
) -> (Vec<IntervalBill<T>>, BillReport<T>) {
    let mut loads: Vec<LoadCost<T>> = appliances
        .iter()
        .map(|a| LoadCost {
            name: a.name.clone(),
            category: a.category,
            energy_kwh: T::zero(),
            cost: T::zero(),
        })
        .collect();
    let mut bills = Vec::with_capacity(intervals.len());
    let (mut total_cost, mut penalty_total, mut energy, mut peak) =
        (T::zero(), T::zero(), T::zero(), T::zero());

    for m in intervals {
        let running = || {
            appliances
                .iter()
                .zip(m.on)
                .enumerate()
                .filter(|(_, (_, &on))| on)
                .map(|(i, (a, _))| (i, a))
        };
        let total_kw: T = running().map(|(_, a)| a.rating_kw).sum();
        let bill = interval_energy_cost(m.k, total_kw, m.pil_kw, m.price);
        if total_kw > T::zero() {
            let sl_kw: T = running()
                .filter(|(_, a)| a.category.is_schedulable())
                .map(|(_, a)| a.rating_kw)
                .sum();
            let penalty_pool = if sl_kw > T::zero() { sl_kw } else { total_kw };
            for (i, a) in running() {
                let share = a.rating_kw / total_kw;
                let mut cost = bill.base_cost * share;
                if a.category.is_schedulable() || sl_kw == T::zero() {
                    cost = cost + bill.penalty_cost * a.rating_kw / penalty_pool;
                }
                loads[i].cost = loads[i].cost + cost;
                loads[i].energy_kwh = loads[i].energy_kwh + bill.energy_kwh * share;
            }
        }
        total_cost = total_cost + bill.total();
        penalty_total = penalty_total + bill.penalty_cost;
        energy = energy + bill.energy_kwh;
        peak = peak.max(total_kw);
        bills.push(bill);
    }
    (
        bills,
        BillReport {
            loads,
            total_cost,
            penalty_total,
            energy_kwh: energy,
            peak_kw: peak,
        },
    )
}

/// Bills a complete day; the record must hold intervals 1..=288 in order.
pub fn day_bill<T: Scalar>(
    appliances: &[ApplianceSpec<T>],
    intervals: &[MeteredInterval<'_, T>],
) -> Result<(Vec<IntervalBill<T>>, BillReport<T>)> {
    if intervals.len() != usize::from(INTERVALS_PER_DAY) {
        return Err(Error::invalid(
            "intervals",
            format!("expected 288 intervals, got {}", intervals.len()),
        ));
    }
    if let Some((i, m)) = intervals
        .iter()
        .enumerate()
        .find(|(i, m)| m.k.index() != *i)
    {
        return Err(Error::invalid(
            format!("intervals[{i}]"),
            format!("holds interval {}", m.k),
        ));
    }
    if let Some(m) = intervals.iter().find(|m| m.on.len() != appliances.len()) {
        return Err(Error::invalid(
            format!("intervals[{}].on", m.k.index()),
            "length differs from the appliance list",
        ));
    }
    Ok(bill_intervals(appliances, intervals))
}

pub fn compare_reports<T: Scalar>(
    baseline: &BillReport<T>,
    scheduled: &BillReport<T>,
) -> Result<Comparison<T>> {
    if baseline.total_cost == T::zero() {
        return Err(Error::UndefinedPercentage("total cost"));
    }
    if baseline.peak_kw == T::zero() {
        return Err(Error::UndefinedPercentage("peak demand"));
    }
    let hundred = T::of(100.0);
    Ok(Comparison {
        savings_percent: hundred * (baseline.total_cost - scheduled.total_cost)
            / baseline.total_cost,
        peak_reduction_percent: hundred * (baseline.peak_kw - scheduled.peak_kw) / baseline.peak_kw,
    })
}
