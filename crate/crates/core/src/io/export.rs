//! Result artifacts. Every number is written with four decimals so output is
//! stable and diffable.

use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::billing::Comparison;
use crate::error::Result;
use crate::load::{LoadCategory, Span};
use crate::scalar::Scalar;
use crate::simulator::{CompareOutput, DayResult, Mode};

pub const LOAD_CURVE_FILE: &str = "load_curve.csv";
pub const SCHEDULE_FILE: &str = "schedule.csv";
pub const REPORT_FILE: &str = "report.json";
pub const COMPARISON_FILE: &str = "comparison.json";

/// Four-decimal rendering; `-0.0000` prints as `0.0000`.
pub fn fixed4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// A JSON number with exactly four decimals, or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed4(pub f64);

impl Serialize for Fixed4 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fixed4(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

fn f4<T: Scalar>(v: T) -> Fixed4 {
    Fixed4(v.as_f64())
}

#[derive(Serialize)]
struct LoadRow {
    name: String,
    category: LoadCategory,
    energy_kwh: Fixed4,
    cost: Fixed4,
}

#[derive(Serialize)]
struct Report<'a> {
    scenario: &'a str,
    mode: Mode,
    currency_label: &'a str,
    total_cost: Fixed4,
    penalty_total: Fixed4,
    energy_kwh: Fixed4,
    peak_kw: Fixed4,
    savings_percent: Option<Fixed4>,
    peak_reduction_percent: Option<Fixed4>,
    loads: Vec<LoadRow>,
}

/// `report.json` content: the bill report plus the comparison, if any.
pub fn report_json<T: Scalar>(day: &DayResult<T>, comparison: Option<&Comparison<T>>) -> String {
    let r = &day.report;
    let mut loads: Vec<LoadRow> = r
        .loads
        .iter()
        .map(|l| LoadRow {
            name: l.name.clone(),
            category: l.category,
            energy_kwh: f4(l.energy_kwh),
            cost: f4(l.cost),
        })
        .collect();
    loads.sort_by(|a, b| a.name.cmp(&b.name));
    let report = Report {
        scenario: &day.scenario,
        mode: day.mode,
        currency_label: &day.currency_label,
        total_cost: f4(r.total_cost),
        penalty_total: f4(r.penalty_total),
        energy_kwh: f4(r.energy_kwh),
        peak_kw: f4(r.peak_kw),
        savings_percent: comparison.map(|c| f4(c.savings_percent)),
        peak_reduction_percent: comparison.map(|c| f4(c.peak_reduction_percent)),
        loads,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
    out.push('\n');
    out
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `load_curve.csv`: one row per interval.
pub fn load_curve_csv<T: Scalar>(day: &DayResult<T>) -> Result<String> {
    csv_string(
        &[
            "interval", "time", "total_kw", "pil_kw", "price", "cost", "penalty",
        ],
        day.rows.iter().map(|row| {
            vec![
                row.k.to_string(),
                row.k.start_time().to_string(),
                fixed4(row.total_kw.as_f64()),
                fixed4(row.pil_kw.as_f64()),
                fixed4(row.price.as_f64()),
                fixed4(row.bill.total().as_f64()),
                fixed4(row.bill.penalty_cost.as_f64()),
            ]
        }),
    )
}

fn span_times(span: &Span) -> (String, String) {
    (
        span.start.start_time().to_string(),
        span.end.end_time().to_string(),
    )
}

/// `schedule.csv`: one row per appliance ON span, ordered by start then name.
pub fn schedule_csv<T: Scalar>(day: &DayResult<T>) -> Result<String> {
    let mut rows: Vec<(Span, &str, LoadCategory, bool)> = Vec::new();
    for (i, a) in day.appliances.iter().enumerate() {
        rows.extend(
            day.spans(i)
                .into_iter()
                .map(|(span, forced)| (span, a.name.as_str(), a.category, forced)),
        );
    }
    rows.sort_by(|a, b| a.0.start.cmp(&b.0.start).then_with(|| a.1.cmp(b.1)));
    csv_string(
        &["appliance", "category", "start", "end", "forced"],
        rows.into_iter().map(|(span, name, category, forced)| {
            let (start, end) = span_times(&span);
            vec![
                name.to_string(),
                category.to_string(),
                start,
                end,
                forced.to_string(),
            ]
        }),
    )
}

/// Writes `load_curve.csv`, `schedule.csv` and `report.json` into `out_dir`.
pub fn export_results<T: Scalar>(
    day: &DayResult<T>,
    comparison: Option<&Comparison<T>>,
    out_dir: &Path,
) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(LOAD_CURVE_FILE), load_curve_csv(day)?)?;
    fs::write(out_dir.join(SCHEDULE_FILE), schedule_csv(day)?)?;
    fs::write(out_dir.join(REPORT_FILE), report_json(day, comparison))?;
    Ok(())
}

#[derive(Serialize)]
struct SpanRow {
    start: String,
    end: String,
}

#[derive(Serialize)]
struct LoadComparisonRow {
    name: String,
    category: LoadCategory,
    ot: Vec<SpanRow>,
    srt: Vec<SpanRow>,
    rc: Fixed4,
    orc: Fixed4,
}

#[derive(Serialize)]
struct ComparisonReport<'a> {
    scenario: &'a str,
    currency_label: &'a str,
    baseline_total_cost: Fixed4,
    scheduled_total_cost: Fixed4,
    baseline_penalty_total: Fixed4,
    scheduled_penalty_total: Fixed4,
    baseline_peak_kw: Fixed4,
    scheduled_peak_kw: Fixed4,
    savings_percent: Fixed4,
    peak_reduction_percent: Fixed4,
    loads: Vec<LoadComparisonRow>,
}

fn span_rows(spans: &[Span]) -> Vec<SpanRow> {
    spans
        .iter()
        .map(|s| {
            let (start, end) = span_times(s);
            SpanRow { start, end }
        })
        .collect()
}

/// `comparison.json` content: per-load OT/SRT spans and RC/ORC costs.
pub fn comparison_json<T: Scalar>(out: &CompareOutput<T>) -> String {
    let (b, s) = (&out.baseline.report, &out.scheduled.report);
    let mut loads: Vec<LoadComparisonRow> = out
        .loads
        .iter()
        .map(|l| LoadComparisonRow {
            name: l.name.clone(),
            category: l.category,
            ot: span_rows(&l.ot),
            srt: span_rows(&l.srt),
            rc: f4(l.rc),
            orc: f4(l.orc),
        })
        .collect();
    loads.sort_by(|a, b| a.name.cmp(&b.name));
    let report = ComparisonReport {
        scenario: &out.baseline.scenario,
        currency_label: &out.baseline.currency_label,
        baseline_total_cost: f4(b.total_cost),
        scheduled_total_cost: f4(s.total_cost),
        baseline_penalty_total: f4(b.penalty_total),
        scheduled_penalty_total: f4(s.penalty_total),
        baseline_peak_kw: f4(b.peak_kw),
        scheduled_peak_kw: f4(s.peak_kw),
        savings_percent: f4(out.comparison.savings_percent),
        peak_reduction_percent: f4(out.comparison.peak_reduction_percent),
        loads,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("comparison serializes");
    text.push('\n');
    text
}

/// Writes `baseline/`, `scheduled/` and `comparison.json` into `out_dir`.
pub fn export_compare<T: Scalar>(out: &CompareOutput<T>, out_dir: &Path) -> Result<()> {
    export_results(&out.baseline, None, &out_dir.join("baseline"))?;
    export_results(
        &out.scheduled,
        Some(&out.comparison),
        &out_dir.join("scheduled"),
    )?;
    fs::write(out_dir.join(COMPARISON_FILE), comparison_json(out))?;
    Ok(())
}
