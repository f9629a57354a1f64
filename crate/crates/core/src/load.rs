//! Load taxonomy, appliances and schedulable-load requests.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::time::{IntervalIndex, INTERVAL_MINUTES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LoadCategory {
    /// Noninterruptible, nonschedulable: runs whenever the consumer wants.
    #[serde(rename = "NINSL")]
    Ninsl,
    /// Interruptible, nonschedulable: thermostat-controlled.
    #[serde(rename = "INSL")]
    Insl,
    /// Noninterruptible, schedulable: shiftable, one contiguous block.
    #[serde(rename = "NISL")]
    Nisl,
    /// Interruptible, schedulable: shiftable and splittable.
    #[serde(rename = "ISL")]
    Isl,
}

impl LoadCategory {
    pub fn is_schedulable(self) -> bool {
        matches!(self, LoadCategory::Nisl | LoadCategory::Isl)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LoadCategory::Ninsl => "NINSL",
            LoadCategory::Insl => "INSL",
            LoadCategory::Nisl => "NISL",
            LoadCategory::Isl => "ISL",
        }
    }
}

impl fmt::Display for LoadCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LoadCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NINSL" => Ok(LoadCategory::Ninsl),
            "INSL" => Ok(LoadCategory::Insl),
            "NISL" => Ok(LoadCategory::Nisl),
            "ISL" => Ok(LoadCategory::Isl),
            other => Err(Error::invalid(
                "",
                format!("unknown category `{other}` (expected NINSL, INSL, NISL or ISL)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplianceSpec<T> {
    pub name: String,
    pub category: LoadCategory,
    pub rating_kw: T,
}

impl<T: Scalar> ApplianceSpec<T> {
    pub fn new(name: impl Into<String>, category: LoadCategory, rating_kw: T) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        if !(rating_kw.is_finite() && rating_kw > T::zero()) {
            return Err(Error::invalid(
                "rating_w",
                format!("must be positive, got {rating_kw} kW"),
            ));
        }
        Ok(ApplianceSpec {
            name,
            category,
            rating_kw,
        })
    }
}

/// Inclusive run of intervals `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: IntervalIndex,
    pub end: IntervalIndex,
}

impl Span {
    pub fn new(start: IntervalIndex, end: IntervalIndex) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(
                "",
                format!("span start {start} is after end {end}"),
            ));
        }
        Ok(Span { start, end })
    }

    pub fn len(&self) -> u16 {
        self.end.get() - self.start.get() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: IntervalIndex) -> bool {
        self.start <= k && k <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn intervals(&self) -> impl Iterator<Item = IntervalIndex> {
        IntervalIndex::range(self.start, self.end)
    }
}

/// Rejects overlapping spans; returns them sorted.
pub fn sorted_disjoint(mut spans: Vec<Span>) -> Result<Vec<Span>> {
    spans.sort();
    for w in spans.windows(2) {
        if w[0].overlaps(&w[1]) {
            return Err(Error::invalid(
                "spans",
                format!(
                    "spans {}..={} and {}..={} overlap",
                    w[0].start, w[0].end, w[1].start, w[1].end
                ),
            ));
        }
    }
    Ok(spans)
}

/// Consumer-driven ON spans of each NINSL appliance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NslActivityScript {
    spans: BTreeMap<String, Vec<Span>>,
}

impl NslActivityScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, appliance: impl Into<String>, spans: Vec<Span>) -> Result<()> {
        let appliance = appliance.into();
        let mut all = self.spans.get(&appliance).cloned().unwrap_or_default();
        all.extend(spans);
        let all = sorted_disjoint(all)?;
        self.spans.insert(appliance, all);
        Ok(())
    }

    pub fn spans(&self, appliance: &str) -> &[Span] {
        self.spans.get(appliance).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_on(&self, appliance: &str, k: IntervalIndex) -> bool {
        self.spans(appliance).iter().any(|s| s.contains(k))
    }

    pub fn appliances(&self) -> impl Iterator<Item = (&str, &[Span])> {
        self.spans.iter().map(|(n, s)| (n.as_str(), s.as_slice()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestStatus {
    Pending,
    Running,
    Completed,
}

/// A schedulable load's timing request plus its runtime countdown.
#[derive(Debug, Clone, PartialEq)]
pub struct SlRequest<T> {
    pub appliance: String,
    pub category: LoadCategory,
    pub rating_kw: T,
    /// First interval the load may run in.
    pub start: IntervalIndex,
    /// Last interval the load may run in.
    pub deadline: IntervalIndex,
    pub run_intervals: u16,
    pub remaining: u16,
    pub status: RequestStatus,
    /// Latched once the must-run rule fires; the load then stays ON to completion.
    pub forced: bool,
    /// Set when the request could no longer finish inside its window.
    pub infeasible: bool,
}

impl<T: Scalar> SlRequest<T> {
    pub fn new(
        appliance: &ApplianceSpec<T>,
        start: IntervalIndex,
        deadline: IntervalIndex,
        run_minutes: u32,
    ) -> Result<Self> {
        if !appliance.category.is_schedulable() {
            return Err(Error::invalid(
                "appliance",
                format!(
                    "`{}` is {}, only NISL/ISL loads can be scheduled",
                    appliance.name, appliance.category
                ),
            ));
        }
        let run_intervals = run_intervals(run_minutes)?;
        if start > deadline {
            return Err(Error::invalid(
                "s",
                format!("start {start} is after deadline {deadline}"),
            ));
        }
        let window = deadline.get() - start.get() + 1;
        if window < run_intervals {
            return Err(Error::invalid(
                "r_min",
                format!("needs {run_intervals} intervals but the window {start}..={deadline} holds only {window}"),
            ));
        }
        Ok(SlRequest {
            appliance: appliance.name.clone(),
            category: appliance.category,
            rating_kw: appliance.rating_kw,
            start,
            deadline,
            run_intervals,
            remaining: run_intervals,
            status: RequestStatus::Pending,
            forced: false,
            infeasible: false,
        })
    }

    pub fn window(&self) -> Span {
        Span {
            start: self.start,
            end: self.deadline,
        }
    }

    pub fn remaining_minutes(&self) -> u32 {
        u32::from(self.remaining) * u32::from(INTERVAL_MINUTES)
    }

    pub fn is_active_at(&self, k: IntervalIndex) -> bool {
        self.start <= k && self.status != RequestStatus::Completed
    }

    /// Latest interval at which the remaining run can still start (`f - r_rem + 1`).
    pub fn latest_start(&self) -> i32 {
        i32::from(self.deadline.get()) - i32::from(self.remaining) + 1
    }

    /// Counts one ON interval.
    pub fn record_on(&mut self) {
        debug_assert!(self.remaining > 0);
        self.remaining -= 1;
        self.status = if self.remaining == 0 {
            RequestStatus::Completed
        } else {
            RequestStatus::Running
        };
    }
}

/// Converts a run time in minutes to a whole number of intervals.
pub fn run_intervals(run_minutes: u32) -> Result<u16> {
    if run_minutes == 0 {
        return Err(Error::invalid("r_min", "run time must be positive"));
    }
    if !run_minutes.is_multiple_of(u32::from(INTERVAL_MINUTES)) {
        return Err(Error::invalid(
            "r_min",
            format!("{run_minutes} is not a multiple of 5"),
        ));
    }
    u16::try_from(run_minutes / u32::from(INTERVAL_MINUTES)).map_err(|_| {
        Error::invalid(
            "r_min",
            format!("{run_minutes} minutes is longer than a day"),
        )
    })
}
