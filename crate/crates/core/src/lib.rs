//! Household demand-response scheduling.
//!
//! A day is split into 288 five-minute intervals. Schedulable loads are placed
//! by a dynamic-priority heuristic under a time-of-use tariff and a power
//! import limit (PIL); consumption above the limit is billed at twice the
//! interval price. The numeric core is generic over [`Scalar`] (`f32` or
//! `f64`); the aliases at the crate root fix it to `f64`.

pub mod billing;
pub mod error;
pub mod generator;
pub mod io;
pub mod load;
pub mod scalar;
pub mod scheduler;
pub mod signal;
pub mod simulator;
pub mod thermal;
pub mod time;

pub use error::{Error, FieldIssue, Result};
pub use load::{LoadCategory, RequestStatus, Span};
pub use scalar::Scalar;
pub use signal::SignalKind;
pub use simulator::{compare, run_baseline, run_scheduled, Mode, SubmitError};
pub use thermal::TcaMode;
pub use time::{ClockTime, IntervalIndex, INTERVALS_PER_DAY, INTERVAL_MINUTES};

pub type ApplianceSpec = load::ApplianceSpec<f64>;
pub type SlRequest = load::SlRequest<f64>;
pub type SignalSchedule = signal::SignalSchedule<f64>;
pub type TcaConfig = thermal::TcaConfig<f64>;
pub type TcaState = thermal::TcaState<f64>;
pub type SchedulerState = scheduler::SchedulerState<f64>;
pub type IntervalDecision = scheduler::IntervalDecision<f64>;
pub type IntervalBill = billing::IntervalBill<f64>;
pub type BillReport = billing::BillReport<f64>;
pub type Comparison = billing::Comparison<f64>;
pub type Scenario = simulator::Scenario<f64>;
pub type ScenarioRequest = simulator::ScenarioRequest;
pub type Simulation = simulator::Simulation<f64>;
pub type DayResult = simulator::DayResult<f64>;
pub type IntervalRecord = simulator::IntervalRecord<f64>;
pub type CompareOutput = simulator::CompareOutput<f64>;
