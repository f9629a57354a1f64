//! File formats: scenario JSON in, CSV and JSON artifacts out.

pub mod export;
pub mod scenario;

pub use export::{export_compare, export_results, load_curve_csv, report_json, schedule_csv};
pub use scenario::{
    parse_live_request, parse_scenario, scenario_to_file, serialize_scenario, LiveRequest,
    ScenarioFile,
};
