#![allow(dead_code)]

use hems_core::simulator::ScenarioRequest;
use hems_core::{DayResult, LoadCategory, Scenario};

/// Cost of `kw` drawn for one interval, with the doubled rate above the limit.
pub fn interval_cost(kw: f64, pil: f64, price: f64) -> f64 {
    let excess = (kw - pil).max(0.0);
    price * (kw - excess) / 12.0 + 2.0 * price * excess / 12.0
}

/// Exhaustive minimum cost of one request on an otherwise idle day.
pub fn brute_force_min_cost(scenario: &Scenario) -> f64 {
    let req = &scenario.requests[0];
    let rating = scenario.appliances[0].rating_kw;
    let (s, f) = (req.start.get(), req.deadline.get());
    let r = (req.run_minutes / 5) as usize;
    let costs: Vec<f64> = (s..=f)
        .map(|n| {
            let k = hems_core::IntervalIndex::new(n).unwrap();
            interval_cost(
                rating,
                scenario.pil.value_at(k),
                scenario.tariff.value_at(k),
            )
        })
        .collect();
    match scenario.appliances[0].category {
        LoadCategory::Nisl => costs
            .windows(r)
            .map(|w| w.iter().sum::<f64>())
            .fold(f64::INFINITY, f64::min),
        _ => {
            let mut best = f64::INFINITY;
            subsets(&costs, r, 0, 0.0, &mut best);
            best
        }
    }
}

fn subsets(costs: &[f64], left: usize, from: usize, acc: f64, best: &mut f64) {
    if left == 0 {
        *best = best.min(acc);
        return;
    }
    for i in from..=costs.len() - left {
        subsets(costs, left - 1, i + 1, acc + costs[i], best);
    }
}

fn on_flags(day: &DayResult, name: &str) -> Vec<bool> {
    let i = day.appliances.iter().position(|a| a.name == name).unwrap();
    day.rows.iter().map(|r| r.on[i]).collect()
}

/// Run-time conservation, window containment, NISL contiguity and must-run
/// dominance, checked from the interval rows alone.
pub fn check_constraints(scenario: &Scenario, day: &DayResult) -> Result<(), String> {
    if day.rows.len() != 288 {
        return Err(format!("{} rows", day.rows.len()));
    }
    let mut by_appliance: std::collections::BTreeMap<&str, Vec<&ScenarioRequest>> =
        Default::default();
    for req in &scenario.requests {
        by_appliance
            .entry(req.appliance.as_str())
            .or_default()
            .push(req);
    }
    for (name, reqs) in by_appliance {
        let on = on_flags(day, name);
        let category = scenario.appliance(name).unwrap().category;
        for (idx, &flag) in on.iter().enumerate() {
            let k = idx as u16 + 1;
            if flag
                && !reqs
                    .iter()
                    .any(|r| r.start.get() <= k && k <= r.deadline.get())
            {
                return Err(format!("{name} ON at {k} outside every window"));
            }
        }
        for req in reqs {
            let (s, f) = (req.start.get() as usize, req.deadline.get() as usize);
            let r = (req.run_minutes / 5) as usize;
            let window = &on[s - 1..f];
            let count = window.iter().filter(|&&b| b).count();
            if count != r {
                return Err(format!(
                    "{name} ran {count} intervals in [{s}, {f}], needs {r}"
                ));
            }
            if category == LoadCategory::Nisl {
                let first = window.iter().position(|&b| b).unwrap();
                if window[first..first + r].iter().any(|&b| !b) {
                    return Err(format!("{name} is not contiguous"));
                }
            }
            let mut done = 0usize;
            for (off, &flag) in window.iter().enumerate() {
                let k = s + off;
                let remaining = r - done;
                if remaining > 0 && remaining > f - k && !flag {
                    return Err(format!(
                        "{name} must run at {k} (remaining {remaining}) but is OFF"
                    ));
                }
                done += usize::from(flag);
            }
        }
    }
    Ok(())
}

pub const CASES: [&str; 3] = [
    "case1_dynamic_pil_flat_tariff",
    "case2_static_pil_tou_tariff",
    "case3_dynamic_pil_tou_tariff",
];

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

pub fn load_case(name: &str) -> Scenario {
    let doc = std::fs::read_to_string(scenario_path(name)).unwrap();
    hems_core::io::parse_scenario(&doc).unwrap()
}

/// Intervals in which both appliances are ON.
pub fn overlap(day: &DayResult, a: &str, b: &str) -> usize {
    let (fa, fb) = (on_flags(day, a), on_flags(day, b));
    fa.iter().zip(&fb).filter(|(x, y)| **x && **y).count()
}
