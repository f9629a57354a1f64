//! Day simulation in baseline (manual operating times) and scheduled mode.
//!
//! [`Simulation`] advances one interval at a time so a live session can
//! interleave request submissions with time; [`run_baseline`],
//! [`run_scheduled`] and [`compare`] drive whole days.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billing::{self, BillReport, Comparison, IntervalBill, MeteredInterval};
use crate::error::{Error, FieldIssue, Result};
use crate::load::{
    self, ApplianceSpec, LoadCategory, NslActivityScript, RequestStatus, SlRequest, Span,
};
use crate::scalar::Scalar;
use crate::scheduler::{self, RequestView, SchedulerState};
use crate::signal::{SignalKind, SignalSchedule};
use crate::thermal::{self, TcaConfig, TcaState};
use crate::time::{IntervalIndex, INTERVALS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Baseline,
    Scheduled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "scheduled" => Ok(Mode::Scheduled),
            other => Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// A schedulable-load request as the consumer enters it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRequest {
    pub appliance: String,
    /// Interval in which the request is entered; 0 means day-ahead.
    pub submitted_at: u16,
    pub start: IntervalIndex,
    pub deadline: IntervalIndex,
    pub run_minutes: u32,
    /// Manual operating time used by the baseline run.
    pub baseline_ot: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub currency_label: String,
    pub appliances: Vec<ApplianceSpec<T>>,
    pub tariff: SignalSchedule<T>,
    pub pil: SignalSchedule<T>,
    pub requests: Vec<ScenarioRequest>,
    pub nsl_script: NslActivityScript,
    pub tca: Option<TcaConfig<T>>,
    pub initial_room_c: Option<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn appliance_index(&self, name: &str) -> Option<usize> {
        self.appliances.iter().position(|a| a.name == name)
    }

    pub fn appliance(&self, name: &str) -> Option<&ApplianceSpec<T>> {
        self.appliances.iter().find(|a| a.name == name)
    }

    pub fn sl_request(&self, req: &ScenarioRequest) -> Result<SlRequest<T>> {
        let appliance = self.appliance(&req.appliance).ok_or_else(|| {
            Error::invalid(
                "appliance",
                format!("unknown appliance `{}`", req.appliance),
            )
        })?;
        SlRequest::new(appliance, req.start, req.deadline, req.run_minutes)
    }

    /// Checks every cross-reference; all problems are reported at once.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let mut push = |path: String, err: Error| {
            if let Error::Validation(found) = err.at(&path) {
                issues.extend(found);
            } else {
                issues.push(FieldIssue {
                    path,
                    message: "invalid".into(),
                });
            }
        };

        let mut seen = HashMap::new();
        for (i, a) in self.appliances.iter().enumerate() {
            if let Some(first) = seen.insert(a.name.as_str(), i) {
                push(
                    format!("appliances[{i}].name"),
                    Error::invalid(
                        "",
                        format!(
                            "duplicate appliance name `{}` (first at appliances[{first}])",
                            a.name
                        ),
                    ),
                );
            }
        }
        if self.tariff.kind() != SignalKind::Tariff {
            push(
                "tariff".into(),
                Error::invalid("", "expected a tariff schedule"),
            );
        }
        if self.pil.kind() != SignalKind::Pil {
            push("pil".into(), Error::invalid("", "expected a PIL schedule"));
        }

        for (i, req) in self.requests.iter().enumerate() {
            let path = format!("requests[{i}]");
            match self.sl_request(req) {
                Ok(sl) => {
                    if req.submitted_at >= req.start.get() {
                        push(
                            format!("{path}.submit"),
                            Error::invalid("", "must be at least one interval before the start"),
                        );
                    }
                    if !req.baseline_ot.is_empty() {
                        if let Err(e) = check_baseline_ot(&sl, &req.baseline_ot) {
                            push(format!("{path}.baseline_ot"), e);
                        }
                    }
                    let clash = self.requests[..i]
                        .iter()
                        .position(|o| o.appliance == req.appliance && windows_overlap(o, req));
                    if let Some(j) = clash {
                        push(
                            format!("{path}.s"),
                            Error::invalid(
                                "",
                                format!("window overlaps requests[{j}] for the same appliance"),
                            ),
                        );
                    }
                }
                Err(e) => push(path, e),
            }
        }

        for (name, _) in self.nsl_script.appliances() {
            match self.appliance(name) {
                Some(a) if a.category == LoadCategory::Ninsl => {}
                Some(a) => push(
                    "nsl_script".into(),
                    Error::invalid(
                        "",
                        format!("`{name}` is {}, scripts drive NINSL loads only", a.category),
                    ),
                ),
                None => push(
                    "nsl_script".into(),
                    Error::invalid("", format!("unknown appliance `{name}`")),
                ),
            }
        }

        let tca_name = self.tca.as_ref().map(|c| c.appliance.as_str());
        if let Some(cfg) = &self.tca {
            match self.appliance(&cfg.appliance) {
                Some(a) if a.category == LoadCategory::Insl => {}
                Some(a) => push(
                    "tca.appliance".into(),
                    Error::invalid("", format!("`{}` is {}, expected INSL", a.name, a.category)),
                ),
                None => push(
                    "tca.appliance".into(),
                    Error::invalid("", format!("unknown appliance `{}`", cfg.appliance)),
                ),
            }
            if let Err(e) = cfg.validate() {
                push("tca".into(), e);
            }
        }
        for (i, a) in self.appliances.iter().enumerate() {
            if a.category == LoadCategory::Insl && tca_name != Some(a.name.as_str()) {
                push(
                    format!("appliances[{i}]"),
                    Error::invalid(
                        "",
                        format!("INSL `{}` has no thermostat configuration", a.name),
                    ),
                );
            }
        }
        if let Some(t) = self.initial_room_c {
            if !t.is_finite() {
                push(
                    "tca.initial_room_c".into(),
                    Error::invalid("", "must be finite"),
                );
            }
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }
}

fn windows_overlap(a: &ScenarioRequest, b: &ScenarioRequest) -> bool {
    a.start <= b.deadline && b.start <= a.deadline
}

fn check_baseline_ot<T: Scalar>(req: &SlRequest<T>, ot: &[Span]) -> Result<()> {
    let spans = load::sorted_disjoint(ot.to_vec())?;
    let total: u16 = spans.iter().map(Span::len).sum();
    if total != req.run_intervals {
        return Err(Error::invalid(
            "",
            format!(
                "operating time covers {total} intervals but the run time is {}",
                req.run_intervals
            ),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRecord<T> {
    pub k: IntervalIndex,
    /// ON flag per appliance, in scenario order.
    pub on: Vec<bool>,
    /// Must-run flag per appliance.
    pub forced: Vec<bool>,
    pub total_kw: T,
    pub pil_kw: T,
    pub pil_eff_kw: T,
    pub price: T,
    pub bill: IntervalBill<T>,
    /// Room temperature the thermostat saw at the start of the interval.
    pub room_c: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequestOutcome {
    pub appliance: String,
    pub category: LoadCategory,
    pub start: IntervalIndex,
    pub deadline: IntervalIndex,
    pub run_intervals: u16,
    pub completed: bool,
    /// Ran past what its window allowed under the must-run fallback.
    pub infeasible_forced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayResult<T> {
    pub scenario: String,
    pub currency_label: String,
    pub mode: Mode,
    pub appliances: Vec<ApplianceSpec<T>>,
    pub rows: Vec<IntervalRecord<T>>,
    pub report: BillReport<T>,
    pub requests: Vec<RequestOutcome>,
}

impl<T: Scalar> DayResult<T> {
    /// Maximal ON runs of appliance `i`; a run is flagged when any of its
    /// intervals was forced.
    pub fn spans(&self, i: usize) -> Vec<(Span, bool)> {
        on_spans(&self.rows, i)
    }

    pub fn spans_of(&self, name: &str) -> Vec<(Span, bool)> {
        self.appliances
            .iter()
            .position(|a| a.name == name)
            .map(|i| self.spans(i))
            .unwrap_or_default()
    }

    pub fn on_intervals(&self, name: &str) -> Vec<IntervalIndex> {
        match self.appliances.iter().position(|a| a.name == name) {
            Some(i) => self.rows.iter().filter(|r| r.on[i]).map(|r| r.k).collect(),
            None => Vec::new(),
        }
    }
}

pub(crate) fn on_spans<T>(rows: &[IntervalRecord<T>], i: usize) -> Vec<(Span, bool)> {
    let mut spans: Vec<(Span, bool)> = Vec::new();
    for row in rows.iter().filter(|r| r.on[i]) {
        match spans.last_mut() {
            Some((span, forced)) if span.end.next() == Some(row.k) => {
                span.end = row.k;
                *forced |= row.forced[i];
            }
            _ => spans.push((
                Span {
                    start: row.k,
                    end: row.k,
                },
                row.forced[i],
            )),
        }
    }
    spans
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubmitError {
    #[error("the day is already finished")]
    Finished,
    #[error("interval {at_k} has already been processed")]
    InThePast { at_k: u16 },
    #[error("must be at least one interval before start: submitted in interval {at_k}, start is {start}")]
    Late { at_k: u16, start: IntervalIndex },
    #[error("unknown appliance `{0}`")]
    UnknownAppliance(String),
    #[error("{0}")]
    Invalid(String),
    #[error("window overlaps an existing request for `{0}`")]
    Overlap(String),
}

/// One simulated day, advanced interval by interval.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    scenario: Scenario<T>,
    mode: Mode,
    index: HashMap<String, usize>,
    scheduler: SchedulerState<T>,
    /// Scheduled mode: requests not yet handed to the scheduler.
    arrivals: Vec<(u16, SlRequest<T>)>,
    /// Baseline mode: each request with its operating time.
    manual: Vec<(SlRequest<T>, Vec<Span>)>,
    tca: Option<(usize, TcaState<T>)>,
    rows: Vec<IntervalRecord<T>>,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(scenario: Scenario<T>, mode: Mode) -> Result<Self> {
        scenario.validate()?;
        let index = scenario
            .appliances
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.clone(), i))
            .collect();
        let tca = scenario.tca.as_ref().map(|cfg| {
            let i = scenario.appliance_index(&cfg.appliance).expect("validated");
            let room_c = scenario
                .initial_room_c
                .unwrap_or_else(|| cfg.ambient_at(IntervalIndex::FIRST));
            (
                i,
                TcaState {
                    room_c,
                    u_prev: false,
                },
            )
        });
        let mut sim = Simulation {
            scheduler: SchedulerState::new(scenario.tariff.clone(), scenario.pil.clone()),
            scenario,
            mode,
            index,
            arrivals: Vec::new(),
            manual: Vec::new(),
            tca,
            rows: Vec::with_capacity(usize::from(INTERVALS_PER_DAY)),
        };
        for (i, req) in sim.scenario.requests.iter().enumerate() {
            let sl = sim.scenario.sl_request(req).expect("validated");
            match mode {
                Mode::Scheduled => sim.arrivals.push((req.submitted_at, sl)),
                Mode::Baseline => {
                    if req.baseline_ot.is_empty() {
                        return Err(Error::invalid(
                            format!("requests[{i}].baseline_ot"),
                            "required for a baseline run",
                        ));
                    }
                    sim.manual.push((sl, req.baseline_ot.clone()));
                }
            }
        }
        Ok(sim)
    }

    pub fn scenario(&self) -> &Scenario<T> {
        &self.scenario
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of intervals processed so far (0..=288).
    pub fn current_k(&self) -> u16 {
        self.rows.len() as u16
    }

    pub fn is_finished(&self) -> bool {
        self.current_k() == INTERVALS_PER_DAY
    }

    pub fn rows(&self) -> &[IntervalRecord<T>] {
        &self.rows
    }

    pub fn room_c(&self) -> Option<T> {
        self.tca.as_ref().map(|(_, s)| s.room_c)
    }

    /// Request states as of the next interval to process.
    pub fn request_views(&self) -> Vec<RequestView<T>> {
        let next = IntervalIndex::new(self.current_k() + 1).unwrap_or(IntervalIndex::LAST);
        match self.mode {
            Mode::Scheduled => {
                let mut views = self.scheduler.views(next);
                let mut pending =
                    SchedulerState::new(self.scenario.tariff.clone(), self.scenario.pil.clone());
                for (_, req) in &self.arrivals {
                    pending.add_request(req.clone());
                }
                views.extend(pending.views(next));
                views
            }
            Mode::Baseline => {
                let mut state =
                    SchedulerState::new(self.scenario.tariff.clone(), self.scenario.pil.clone());
                for (req, _) in &self.manual {
                    state.add_request(req.clone());
                }
                state.views(next)
            }
        }
    }

    /// Bill of the intervals processed so far.
    pub fn running_bill(&self) -> BillReport<T> {
        let metered: Vec<_> = self.rows.iter().map(metered).collect();
        billing::bill_intervals(&self.scenario.appliances, &metered).1
    }

    /// Enters a request during interval `at_k` (at least one interval before its start).
    pub fn submit_request(
        &mut self,
        appliance: &str,
        start: IntervalIndex,
        deadline: IntervalIndex,
        run_minutes: u32,
        at_k: u16,
    ) -> std::result::Result<(), SubmitError> {
        if self.is_finished() {
            return Err(SubmitError::Finished);
        }
        if at_k <= self.current_k() {
            return Err(SubmitError::InThePast { at_k });
        }
        if at_k >= start.get() {
            return Err(SubmitError::Late { at_k, start });
        }
        let spec = self
            .scenario
            .appliance(appliance)
            .ok_or_else(|| SubmitError::UnknownAppliance(appliance.to_string()))?;
        let sl = SlRequest::new(spec, start, deadline, run_minutes)
            .map_err(|e| SubmitError::Invalid(e.to_string()))?;
        let entry = ScenarioRequest {
            appliance: appliance.to_string(),
            submitted_at: at_k,
            start,
            deadline,
            run_minutes,
            baseline_ot: vec![Span {
                start,
                end: IntervalIndex::new(start.get() + sl.run_intervals - 1).expect("fits window"),
            }],
        };
        if self
            .scenario
            .requests
            .iter()
            .any(|r| r.appliance == appliance && windows_overlap(r, &entry))
        {
            return Err(SubmitError::Overlap(appliance.to_string()));
        }
        match self.mode {
            Mode::Scheduled => self.arrivals.push((at_k, sl)),
            Mode::Baseline => self.manual.push((sl, entry.baseline_ot.clone())),
        }
        self.scenario.requests.push(entry);
        Ok(())
    }

    /// Processes the next interval.
    pub fn step(&mut self) -> Result<&IntervalRecord<T>> {
        let k = IntervalIndex::new(self.current_k() + 1)
            .map_err(|_| Error::invalid("to_k", "the day is already finished"))?;
        let appliances = &self.scenario.appliances;
        let n = appliances.len();
        let mut on = vec![false; n];
        let mut forced = vec![false; n];

        for (i, a) in appliances.iter().enumerate() {
            on[i] = a.category == LoadCategory::Ninsl && self.scenario.nsl_script.is_on(&a.name, k);
        }
        let room_c = match (&mut self.tca, &self.scenario.tca) {
            (Some((i, state)), Some(cfg)) => {
                let seen = state.room_c;
                on[*i] = thermal::advance(cfg, state, k);
                Some(seen)
            }
            _ => None,
        };
        let nsl_powers: Vec<T> = appliances
            .iter()
            .zip(&on)
            .filter(|(_, &o)| o)
            .map(|(a, _)| a.rating_kw)
            .collect();
        let pil_kw = self.scenario.pil.value_at(k);
        let price = self.scenario.tariff.value_at(k);

        let pil_eff_kw = match self.mode {
            Mode::Scheduled => {
                let (arrived, waiting): (Vec<_>, Vec<_>) =
                    self.arrivals.drain(..).partition(|(at, _)| *at <= k.get());
                self.arrivals = waiting;
                for (_, req) in arrived {
                    self.scheduler.add_request(req);
                }
                let decision = self.scheduler.step(k, &nsl_powers)?;
                for name in &decision.on_loads {
                    on[self.index[name]] = true;
                }
                for name in &decision.forced {
                    forced[self.index[name]] = true;
                }
                decision.pil_new_kw
            }
            Mode::Baseline => {
                for (req, ot) in &mut self.manual {
                    if req.status != RequestStatus::Completed && ot.iter().any(|s| s.contains(k)) {
                        on[self.index[&req.appliance]] = true;
                        req.record_on();
                    }
                }
                scheduler::effective_pil(pil_kw, &nsl_powers)
            }
        };

        let total_kw: T = appliances
            .iter()
            .zip(&on)
            .filter(|(_, &o)| o)
            .map(|(a, _)| a.rating_kw)
            .sum();
        let bill = billing::interval_energy_cost(k, total_kw, pil_kw, price);
        self.rows.push(IntervalRecord {
            k,
            on,
            forced,
            total_kw,
            pil_kw,
            pil_eff_kw,
            price,
            bill,
            room_c,
        });
        Ok(self.rows.last().expect("just pushed"))
    }

    /// Processes intervals up to and including `to_k`.
    pub fn advance_to(&mut self, to_k: u16) -> Result<()> {
        if to_k <= self.current_k() || to_k > INTERVALS_PER_DAY {
            return Err(Error::invalid(
                "to_k",
                format!("must lie in {}..=288, got {to_k}", self.current_k() + 1),
            ));
        }
        while self.current_k() < to_k {
            self.step()?;
        }
        Ok(())
    }

    /// The finished day.
    pub fn result(&self) -> Result<DayResult<T>> {
        let metered: Vec<_> = self.rows.iter().map(metered).collect();
        let (_, report) = billing::day_bill(&self.scenario.appliances, &metered)?;
        let requests: Vec<&SlRequest<T>> = match self.mode {
            Mode::Scheduled => self
                .scheduler
                .requests()
                .iter()
                .chain(self.arrivals.iter().map(|(_, r)| r))
                .collect(),
            Mode::Baseline => self.manual.iter().map(|(r, _)| r).collect(),
        };
        Ok(DayResult {
            scenario: self.scenario.name.clone(),
            currency_label: self.scenario.currency_label.clone(),
            mode: self.mode,
            appliances: self.scenario.appliances.clone(),
            rows: self.rows.clone(),
            report,
            requests: requests
                .into_iter()
                .map(|r| RequestOutcome {
                    appliance: r.appliance.clone(),
                    category: r.category,
                    start: r.start,
                    deadline: r.deadline,
                    run_intervals: r.run_intervals,
                    completed: r.status == RequestStatus::Completed,
                    infeasible_forced: r.infeasible,
                })
                .collect(),
        })
    }
}

fn metered<T: Scalar>(row: &IntervalRecord<T>) -> MeteredInterval<'_, T> {
    MeteredInterval {
        k: row.k,
        on: &row.on,
        price: row.price,
        pil_kw: row.pil_kw,
    }
}

fn run<T: Scalar>(scenario: &Scenario<T>, mode: Mode) -> Result<DayResult<T>> {
    let mut sim = Simulation::new(scenario.clone(), mode)?;
    sim.advance_to(INTERVALS_PER_DAY)?;
    sim.result()
}

/// Every load at its manual operating time, no scheduling.
pub fn run_baseline<T: Scalar>(scenario: &Scenario<T>) -> Result<DayResult<T>> {
    run(scenario, Mode::Baseline)
}

pub fn run_scheduled<T: Scalar>(scenario: &Scenario<T>) -> Result<DayResult<T>> {
    run(scenario, Mode::Scheduled)
}

/// One appliance's row of the baseline/scheduled comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadComparison<T> {
    pub name: String,
    pub category: LoadCategory,
    /// Operating time without scheduling.
    pub ot: Vec<Span>,
    /// Scheduled run time.
    pub srt: Vec<Span>,
    /// Running cost without scheduling.
    pub rc: T,
    /// Running cost with scheduling.
    pub orc: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutput<T> {
    pub baseline: DayResult<T>,
    pub scheduled: DayResult<T>,
    pub comparison: Comparison<T>,
    pub loads: Vec<LoadComparison<T>>,
}

/// Runs both modes on the same signals and scripts.
pub fn compare<T: Scalar>(scenario: &Scenario<T>) -> Result<CompareOutput<T>> {
    let baseline = run_baseline(scenario)?;
    let scheduled = run_scheduled(scenario)?;
    let comparison = billing::compare_reports(&baseline.report, &scheduled.report)?;
    let loads = scenario
        .appliances
        .iter()
        .enumerate()
        .map(|(i, a)| LoadComparison {
            name: a.name.clone(),
            category: a.category,
            ot: baseline.spans(i).into_iter().map(|(s, _)| s).collect(),
            srt: scheduled.spans(i).into_iter().map(|(s, _)| s).collect(),
            rc: baseline.report.loads[i].cost,
            orc: scheduled.report.loads[i].cost,
        })
        .collect();
    Ok(CompareOutput {
        baseline,
        scheduled,
        comparison,
        loads,
    })
}
