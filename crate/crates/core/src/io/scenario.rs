//! Scenario JSON documents. Times are `HH:MM` on the 5-minute grid, ratings
//! are watts on disk and kilowatts in memory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldIssue, Result};
use crate::load::{ApplianceSpec, LoadCategory, NslActivityScript, Span};
use crate::scalar::Scalar;
use crate::signal::{SignalKind, SignalSchedule};
use crate::simulator::{Scenario, ScenarioRequest};
use crate::thermal::{TcaConfig, TcaMode};
use crate::time::{deadline_interval, time_to_interval, ClockTime, IntervalIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub meta: MetaFile,
    pub tariff: TariffFile,
    pub pil: PilFile,
    pub appliances: Vec<ApplianceFile>,
    #[serde(default)]
    pub requests: Vec<RequestFile>,
    #[serde(default)]
    pub nsl_script: Vec<ScriptFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tca: Option<TcaFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    pub name: String,
    #[serde(default = "default_currency")]
    pub currency_label: String,
}

fn default_currency() -> String {
    "INR".to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TariffMode {
    Flat,
    Tou,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffFile {
    pub mode: TariffMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hourly: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PilMode {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PilFile {
    pub mode: PilMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hourly: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplianceFile {
    pub name: String,
    pub category: String,
    pub rating_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanFile {
    pub start: String,
    pub end: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub appliance: String,
    /// Entry time; omitted for day-ahead requests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submit: Option<String>,
    pub s: String,
    pub f: String,
    pub r_min: u32,
    #[serde(default)]
    pub baseline_ot: Vec<SpanFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptFile {
    pub appliance: String,
    pub spans: Vec<SpanFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcaFile {
    pub appliance: String,
    pub mode: TcaMode,
    pub set_point_c: f64,
    pub tolerance_c: f64,
    pub ambient_c: Vec<f64>,
    pub drift_rate: f64,
    pub actuation_c: f64,
    pub windows: Vec<SpanFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_room_c: Option<f64>,
}

/// Collects issues while converting, so one pass reports every bad field.
#[derive(Default)]
struct Issues(Vec<FieldIssue>);

impl Issues {
    fn take<V>(&mut self, path: &str, r: Result<V>) -> Option<V> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                match e.at(path) {
                    Error::Validation(found) => self.0.extend(found),
                    other => self.0.push(FieldIssue {
                        path: path.to_string(),
                        message: other.to_string(),
                    }),
                }
                None
            }
        }
    }
}

fn start_of(s: &str) -> Result<IntervalIndex> {
    time_to_interval(s.parse::<ClockTime>()?)
}

fn deadline_of(s: &str) -> Result<IntervalIndex> {
    Ok(deadline_interval(s.parse::<ClockTime>()?))
}

fn span_of(span: &SpanFile, issues: &mut Issues, path: &str) -> Option<Span> {
    let start = issues.take(&format!("{path}.start"), start_of(&span.start));
    let end = issues.take(&format!("{path}.end"), deadline_of(&span.end));
    let (start, end) = (start?, end?);
    issues.take(path, Span::new(start, end))
}

fn spans_of(spans: &[SpanFile], issues: &mut Issues, path: &str) -> Vec<Span> {
    spans
        .iter()
        .enumerate()
        .filter_map(|(i, s)| span_of(s, issues, &format!("{path}[{i}]")))
        .collect()
}

fn hourly_of<T: Scalar>(values: &[f64], issues: &mut Issues, path: &str) -> Option<[T; 24]> {
    if values.len() != 24 {
        issues.take::<()>(
            path,
            Err(Error::invalid(
                "",
                format!("expected 24 hourly values, got {}", values.len()),
            )),
        );
        return None;
    }
    let mut out = [T::zero(); 24];
    for (slot, &v) in out.iter_mut().zip(values) {
        *slot = T::of(v);
    }
    Some(out)
}

fn signal_of<T: Scalar>(
    kind: SignalKind,
    constant: bool,
    single: Option<f64>,
    hourly: Option<&Vec<f64>>,
    single_name: &str,
    issues: &mut Issues,
    path: &str,
) -> Option<SignalSchedule<T>> {
    if constant {
        match single {
            Some(v) => issues.take(
                path,
                SignalSchedule::constant(kind, T::of(v)).map_err(|e| rename(e, single_name)),
            ),
            None => issues.take(
                &format!("{path}.{single_name}"),
                Err(Error::invalid("", "required by this mode")),
            ),
        }
    } else {
        match hourly {
            Some(values) => {
                let values: Vec<T> = values.iter().map(|&v| T::of(v)).collect();
                issues.take(path, SignalSchedule::hourly(kind, &values))
            }
            None => issues.take(
                &format!("{path}.hourly"),
                Err(Error::invalid("", "24 hourly values required by this mode")),
            ),
        }
    }
}

fn rename(e: Error, field: &str) -> Error {
    match e {
        Error::Validation(issues) => Error::Validation(
            issues
                .into_iter()
                .map(|i| FieldIssue {
                    path: if i.path == "static_value" {
                        field.into()
                    } else {
                        i.path
                    },
                    message: i.message,
                })
                .collect(),
        ),
        other => other,
    }
}

/// Parses and fully validates a scenario document.
fn deserialize<D: serde::de::DeserializeOwned>(document: &str) -> Result<D> {
    let mut de = serde_json::Deserializer::from_str(document);
    let value: D = match serde_path_to_error::deserialize(&mut de) {
        Ok(v) => v,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() || inner.is_io() {
                return Err(Error::Json(inner));
            }
            let path = if path == "." { String::new() } else { path };
            return Err(Error::invalid(path, inner.to_string()));
        }
    };
    de.end().map_err(Error::Json)?;
    Ok(value)
}

pub fn parse_scenario<T: Scalar>(document: &str) -> Result<Scenario<T>> {
    scenario_from_file(&deserialize::<ScenarioFile>(document)?)
}

/// Body of a request entered during the day; its submission interval comes from the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiveRequestFile {
    pub appliance: String,
    pub s: String,
    pub f: String,
    pub r_min: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveRequest {
    pub appliance: String,
    pub start: IntervalIndex,
    pub deadline: IntervalIndex,
    pub run_minutes: u32,
}

pub fn parse_live_request(document: &str) -> Result<LiveRequest> {
    let file: LiveRequestFile = deserialize(document)?;
    let mut issues = Issues::default();
    let start = issues.take("s", start_of(&file.s));
    let deadline = issues.take("f", deadline_of(&file.f));
    let run = issues.take("", crate::load::run_intervals(file.r_min));
    match (start, deadline, run) {
        (Some(start), Some(deadline), Some(_)) => Ok(LiveRequest {
            appliance: file.appliance,
            start,
            deadline,
            run_minutes: file.r_min,
        }),
        _ => Err(Error::Validation(issues.0)),
    }
}

pub fn scenario_from_file<T: Scalar>(file: &ScenarioFile) -> Result<Scenario<T>> {
    let mut issues = Issues::default();

    let tariff = signal_of(
        SignalKind::Tariff,
        file.tariff.mode == TariffMode::Flat,
        file.tariff.flat_value,
        file.tariff.hourly.as_ref(),
        "flat_value",
        &mut issues,
        "tariff",
    );
    let pil = signal_of(
        SignalKind::Pil,
        file.pil.mode == PilMode::Static,
        file.pil.static_value,
        file.pil.hourly.as_ref(),
        "static_value",
        &mut issues,
        "pil",
    );

    let mut appliances = Vec::new();
    for (i, a) in file.appliances.iter().enumerate() {
        let path = format!("appliances[{i}]");
        let category = issues.take(
            &format!("{path}.category"),
            a.category.parse::<LoadCategory>(),
        );
        if let Some(category) = category {
            if let Some(spec) = issues.take(
                &path,
                ApplianceSpec::new(a.name.clone(), category, T::of(a.rating_w / 1000.0)),
            ) {
                appliances.push(spec);
            }
        }
    }

    let mut requests = Vec::new();
    for (i, r) in file.requests.iter().enumerate() {
        let path = format!("requests[{i}]");
        let submitted_at = match &r.submit {
            None => Some(0),
            Some(t) => issues.take(
                &format!("{path}.submit"),
                start_of(t).map(IntervalIndex::get),
            ),
        };
        let start = issues.take(&format!("{path}.s"), start_of(&r.s));
        let deadline = issues.take(&format!("{path}.f"), deadline_of(&r.f));
        let run_ok = issues.take(&path, crate::load::run_intervals(r.r_min).map(|_| ()));
        let baseline_ot = spans_of(&r.baseline_ot, &mut issues, &format!("{path}.baseline_ot"));
        if let (Some(submitted_at), Some(start), Some(deadline), Some(())) =
            (submitted_at, start, deadline, run_ok)
        {
            requests.push(ScenarioRequest {
                appliance: r.appliance.clone(),
                submitted_at,
                start,
                deadline,
                run_minutes: r.r_min,
                baseline_ot,
            });
        }
    }

    let mut nsl_script = NslActivityScript::new();
    for (i, entry) in file.nsl_script.iter().enumerate() {
        let path = format!("nsl_script[{i}]");
        let spans = spans_of(&entry.spans, &mut issues, &format!("{path}.spans"));
        issues.take(&path, nsl_script.insert(entry.appliance.clone(), spans));
    }

    let mut initial_room_c = None;
    let tca = file.tca.as_ref().and_then(|t| {
        initial_room_c = t.initial_room_c.map(T::of);
        let ambient_c = hourly_of::<T>(&t.ambient_c, &mut issues, "tca.ambient_c")?;
        let windows = spans_of(&t.windows, &mut issues, "tca.windows");
        let windows = issues.take("tca.windows", crate::load::sorted_disjoint(windows))?;
        Some(TcaConfig {
            appliance: t.appliance.clone(),
            mode: t.mode,
            set_point_c: T::of(t.set_point_c),
            tolerance_c: T::of(t.tolerance_c),
            ambient_c,
            drift_rate: T::of(t.drift_rate),
            actuation_c: T::of(t.actuation_c),
            operating_windows: windows,
        })
    });

    if !issues.0.is_empty() {
        return Err(Error::Validation(issues.0));
    }
    let scenario = Scenario {
        name: file.meta.name.clone(),
        currency_label: file.meta.currency_label.clone(),
        appliances,
        tariff: tariff.expect("no issues"),
        pil: pil.expect("no issues"),
        requests,
        nsl_script,
        tca,
        initial_room_c,
    };
    scenario.validate()?;
    Ok(scenario)
}

fn watts<T: Scalar>(kw: T) -> f64 {
    (kw.as_f64() * 1000.0 * 1e6).round() / 1e6
}

fn span_file(span: &Span) -> SpanFile {
    SpanFile {
        start: span.start.start_time().to_string(),
        end: span.end.end_time().to_string(),
    }
}

pub fn scenario_to_file<T: Scalar>(scenario: &Scenario<T>) -> ScenarioFile {
    let hourly = |s: &SignalSchedule<T>| {
        s.hourly_values()
            .iter()
            .map(|v| v.as_f64())
            .collect::<Vec<_>>()
    };
    ScenarioFile {
        meta: MetaFile {
            name: scenario.name.clone(),
            currency_label: scenario.currency_label.clone(),
        },
        tariff: match scenario.tariff.static_value() {
            Some(v) => TariffFile {
                mode: TariffMode::Flat,
                flat_value: Some(v.as_f64()),
                hourly: None,
            },
            None => TariffFile {
                mode: TariffMode::Tou,
                flat_value: None,
                hourly: Some(hourly(&scenario.tariff)),
            },
        },
        pil: match scenario.pil.static_value() {
            Some(v) => PilFile {
                mode: PilMode::Static,
                static_value: Some(v.as_f64()),
                hourly: None,
            },
            None => PilFile {
                mode: PilMode::Dynamic,
                static_value: None,
                hourly: Some(hourly(&scenario.pil)),
            },
        },
        appliances: scenario
            .appliances
            .iter()
            .map(|a| ApplianceFile {
                name: a.name.clone(),
                category: a.category.to_string(),
                rating_w: watts(a.rating_kw),
            })
            .collect(),
        requests: scenario
            .requests
            .iter()
            .map(|r| RequestFile {
                appliance: r.appliance.clone(),
                submit: IntervalIndex::new(r.submitted_at)
                    .ok()
                    .map(|k| k.start_time().to_string()),
                s: r.start.start_time().to_string(),
                f: r.deadline.end_time().to_string(),
                r_min: r.run_minutes,
                baseline_ot: r.baseline_ot.iter().map(span_file).collect(),
            })
            .collect(),
        nsl_script: scenario
            .nsl_script
            .appliances()
            .map(|(name, spans)| ScriptFile {
                appliance: name.to_string(),
                spans: spans.iter().map(span_file).collect(),
            })
            .collect(),
        tca: scenario.tca.as_ref().map(|t| TcaFile {
            appliance: t.appliance.clone(),
            mode: t.mode,
            set_point_c: t.set_point_c.as_f64(),
            tolerance_c: t.tolerance_c.as_f64(),
            ambient_c: t.ambient_c.iter().map(|v| v.as_f64()).collect(),
            drift_rate: t.drift_rate.as_f64(),
            actuation_c: t.actuation_c.as_f64(),
            windows: t.operating_windows.iter().map(span_file).collect(),
            initial_room_c: scenario.initial_room_c.map(|v| v.as_f64()),
        }),
    }
}

/// Pretty-printed scenario document.
pub fn serialize_scenario<T: Scalar>(scenario: &Scenario<T>) -> String {
    serde_json::to_string_pretty(&scenario_to_file(scenario)).expect("scenario file serializes")
}
