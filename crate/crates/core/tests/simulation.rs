mod common;

use hems_core::generator::{random_scenario, GeneratorBounds, SignalFamily};
use hems_core::simulator::{compare, run_baseline, run_scheduled, SubmitError};
use hems_core::Simulation;
use hems_core::{IntervalIndex, Mode, Scenario};
use proptest::prelude::*;

fn k(n: u16) -> IntervalIndex {
    IntervalIndex::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scheduled_days_respect_run_time_windows_and_must_run(seed in any::<u64>()) {
        let scenario: Scenario = random_scenario(seed, &GeneratorBounds::default());
        let day = run_scheduled(&scenario).unwrap();
        prop_assert_eq!(day.rows.len(), 288);
        if let Err(e) = common::check_constraints(&scenario, &day) {
            return Err(TestCaseError::fail(format!("seed {seed}: {e}")));
        }
        prop_assert!(day.requests.iter().all(|r| r.completed || r.infeasible_forced));
    }

    #[test]
    fn replay_is_deterministic(seed in any::<u64>()) {
        let scenario: Scenario = random_scenario(seed, &GeneratorBounds::default());
        prop_assert_eq!(run_scheduled(&scenario).unwrap(), run_scheduled(&scenario).unwrap());
    }

    #[test]
    fn advancing_in_pieces_matches_one_advance(seed in any::<u64>(), cuts in prop::collection::btree_set(1u16..288, 0..6)) {
        let scenario: Scenario = random_scenario(seed, &GeneratorBounds::default());
        let whole = run_scheduled(&scenario).unwrap();
        let mut sim = Simulation::new(scenario, Mode::Scheduled).unwrap();
        for cut in cuts {
            sim.advance_to(cut).unwrap();
        }
        sim.advance_to(288).unwrap();
        prop_assert_eq!(sim.result().unwrap(), whole);
    }

    #[test]
    fn baseline_runs_exactly_the_operating_time(seed in any::<u64>()) {
        let scenario: Scenario = random_scenario(seed, &GeneratorBounds::default());
        let day = run_baseline(&scenario).unwrap();
        for req in &scenario.requests {
            let mut expected: Vec<IntervalIndex> = req.baseline_ot.iter().flat_map(|s| s.intervals()).collect();
            expected.sort();
            prop_assert_eq!(day.on_intervals(&req.appliance), expected);
        }
    }

    #[test]
    fn static_limit_peak_not_above_baseline_when_only_baseline_violates(seed in any::<u64>()) {
        let bounds = GeneratorBounds {
            families: vec![SignalFamily::FlatStatic, SignalFamily::TouStatic],
            ..GeneratorBounds::default()
        };
        let scenario: Scenario = random_scenario(seed, &bounds);
        let out = compare(&scenario).unwrap();
        if out.baseline.report.penalty_total > 0.0 && out.scheduled.report.penalty_total == 0.0 {
            prop_assert!(out.scheduled.report.peak_kw <= out.baseline.report.peak_kw + 1e-12);
        }
    }
}

#[test]
fn empty_scenario_costs_nothing() {
    let doc = r#"{"meta":{"name":"empty"},"tariff":{"mode":"flat","flat_value":4},"pil":{"mode":"static","static_value":3},"appliances":[]}"#;
    let scenario: Scenario = hems_core::io::parse_scenario(doc).unwrap();
    let day = run_baseline(&scenario).unwrap();
    assert_eq!(day.rows.len(), 288);
    assert_eq!((day.report.total_cost, day.report.peak_kw), (0.0, 0.0));
}

#[test]
fn calibration_baseline_is_penalized_by_ev_and_ac() {
    for case in common::CASES {
        let day = run_baseline(&common::load_case(case)).unwrap();
        assert!(day.report.penalty_total > 0.0, "{case}");
        assert!(
            common::overlap(&day, "ev_charging", "air_conditioner") > 0,
            "{case}"
        );
    }
}

#[test]
fn calibration_water_pump_is_interrupted() {
    for case in common::CASES {
        let day = run_scheduled(&common::load_case(case)).unwrap();
        assert!(
            day.spans_of("water_pump").len() >= 2,
            "{case}: {:?}",
            day.spans_of("water_pump")
        );
    }
}

#[test]
fn thermostat_behaves_identically_in_both_modes() {
    let out = compare(&common::load_case(common::CASES[1])).unwrap();
    assert_eq!(
        out.baseline.on_intervals("air_conditioner"),
        out.scheduled.on_intervals("air_conditioner")
    );
    let rooms = |d: &hems_core::DayResult| d.rows.iter().map(|r| r.room_c).collect::<Vec<_>>();
    assert_eq!(rooms(&out.baseline), rooms(&out.scheduled));
}

fn live_session() -> Simulation {
    let mut scenario = common::load_case(common::CASES[1]);
    scenario.requests.clear();
    Simulation::new(scenario, Mode::Scheduled).unwrap()
}

#[test]
fn submission_must_precede_start() {
    let mut sim = live_session();
    sim.advance_to(83).unwrap();
    assert_eq!(
        sim.submit_request("water_pump", k(85), k(126), 120, 84),
        Ok(())
    );

    let mut sim = live_session();
    sim.advance_to(84).unwrap();
    assert!(matches!(
        sim.submit_request("water_pump", k(85), k(126), 120, 85),
        Err(SubmitError::Late { .. })
    ));
    assert!(sim.scenario().requests.is_empty());
}

#[test]
fn infeasible_and_unknown_submissions_are_rejected() {
    let mut sim = live_session();
    assert!(matches!(
        sim.submit_request("iron_box", k(10), k(12), 20, 1),
        Err(SubmitError::Invalid(_))
    ));
    assert!(matches!(
        sim.submit_request("iron_box", k(10), k(12), 7, 1),
        Err(SubmitError::Invalid(_))
    ));
    assert!(matches!(
        sim.submit_request("sauna", k(10), k(40), 20, 1),
        Err(SubmitError::UnknownAppliance(_))
    ));
    assert!(matches!(
        sim.submit_request("refrigerator", k(10), k(40), 20, 1),
        Err(SubmitError::Invalid(_))
    ));
    sim.submit_request("iron_box", k(10), k(40), 20, 1).unwrap();
    assert!(matches!(
        sim.submit_request("iron_box", k(30), k(60), 20, 1),
        Err(SubmitError::Overlap(_))
    ));
    sim.advance_to(288).unwrap();
    assert_eq!(
        sim.submit_request("iron_box", k(100), k(140), 20, 1),
        Err(SubmitError::Finished)
    );
}

#[test]
fn live_request_lands_inside_its_window() {
    let mut sim = live_session();
    sim.advance_to(4).unwrap();
    sim.submit_request("ev_charging", k(10), k(84), 180, 5)
        .unwrap();
    sim.advance_to(288).unwrap();
    let day = sim.result().unwrap();
    let on = day.on_intervals("ev_charging");
    assert_eq!(on.len(), 36);
    assert!(on.iter().all(|&x| x >= k(10) && x <= k(84)));
}

#[test]
fn advance_rejects_going_backwards() {
    let mut sim = live_session();
    sim.advance_to(12).unwrap();
    assert!(sim.advance_to(12).is_err());
    assert!(sim.advance_to(289).is_err());
    sim.advance_to(288).unwrap();
    assert!(sim.advance_to(288).is_err());
}

#[test]
fn scaling_the_tariff_scales_cost_but_not_choices() {
    for seed in 0..40 {
        let scenario: Scenario = random_scenario(seed, &GeneratorBounds::default());
        let mut doubled = scenario.clone();
        doubled.tariff = scenario.tariff.scaled(2.0);
        let (a, b) = (
            run_scheduled(&scenario).unwrap(),
            run_scheduled(&doubled).unwrap(),
        );
        assert!(
            (2.0 * a.report.total_cost - b.report.total_cost).abs()
                < 1e-9 * b.report.total_cost.max(1.0)
        );
        assert_eq!(
            a.rows.iter().map(|r| &r.on).collect::<Vec<_>>(),
            b.rows.iter().map(|r| &r.on).collect::<Vec<_>>()
        );
    }
}

#[test]
fn f32_instantiation_tracks_f64() {
    let doc = std::fs::read_to_string(common::scenario_path(common::CASES[2])).unwrap();
    let single: hems_core::simulator::Scenario<f32> = hems_core::io::parse_scenario(&doc).unwrap();
    let double: Scenario = hems_core::io::parse_scenario(&doc).unwrap();
    let (a, b) = (
        run_scheduled(&single).unwrap(),
        run_scheduled(&double).unwrap(),
    );
    assert!(
        (f64::from(a.report.total_cost) - b.report.total_cost).abs() < 1e-3 * b.report.total_cost
    );
}
