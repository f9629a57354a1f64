//! Seeded random scenarios for property tests and benchmarks.
//!
//! Every draw comes from a ChaCha stream seeded with the value recorded in the
//! scenario name, so any failing case can be rebuilt from its name alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::load::{ApplianceSpec, LoadCategory, NslActivityScript, Span};
use crate::scalar::Scalar;
use crate::signal::{SignalKind, SignalSchedule};
use crate::simulator::{Scenario, ScenarioRequest};
use crate::thermal::{TcaConfig, TcaMode};
use crate::time::{IntervalIndex, INTERVALS_PER_DAY};

/// Tariff and PIL shapes a generated day may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFamily {
    FlatStatic,
    FlatDynamic,
    TouStatic,
    TouDynamic,
}

impl SignalFamily {
    pub const ALL: [SignalFamily; 4] = [
        SignalFamily::FlatStatic,
        SignalFamily::FlatDynamic,
        SignalFamily::TouStatic,
        SignalFamily::TouDynamic,
    ];

    fn tou(self) -> bool {
        matches!(self, SignalFamily::TouStatic | SignalFamily::TouDynamic)
    }

    fn dynamic(self) -> bool {
        matches!(self, SignalFamily::FlatDynamic | SignalFamily::TouDynamic)
    }
}

/// Bounds for [`random_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBounds {
    pub schedulable: (usize, usize),
    pub nonschedulable: (usize, usize),
    /// kW.
    pub sl_rating: (f64, f64),
    /// kW.
    pub nsl_rating: (f64, f64),
    /// Money per kWh.
    pub price: (f64, f64),
    /// kW.
    pub pil: (f64, f64),
    /// Run time in intervals.
    pub run: (u16, u16),
    pub with_tca: f64,
    /// Drawn uniformly per scenario.
    pub families: Vec<SignalFamily>,
}

impl Default for GeneratorBounds {
    fn default() -> Self {
        GeneratorBounds {
            schedulable: (1, 6),
            nonschedulable: (0, 4),
            sl_rating: (0.3, 1.2),
            nsl_rating: (0.01, 0.25),
            price: (2.0, 9.0),
            pil: (1.8, 5.0),
            run: (1, 36),
            with_tca: 0.5,
            families: SignalFamily::ALL.to_vec(),
        }
    }
}

fn round_to(v: f64, step: f64) -> f64 {
    let per_unit = (1.0 / step).round();
    (v * per_unit).round() / per_unit
}

fn k(i: u16) -> IntervalIndex {
    IntervalIndex::new(i).expect("generated interval in range")
}

fn hourly<T: Scalar>(
    rng: &mut ChaCha8Rng,
    kind: SignalKind,
    lo: f64,
    hi: f64,
    step: f64,
) -> SignalSchedule<T> {
    let values: Vec<T> = (0..24)
        .map(|_| T::of(round_to(rng.random_range(lo..=hi), step).max(step)))
        .collect();
    SignalSchedule::hourly(kind, &values).expect("positive values")
}

fn constant<T: Scalar>(
    rng: &mut ChaCha8Rng,
    kind: SignalKind,
    lo: f64,
    hi: f64,
    step: f64,
) -> SignalSchedule<T> {
    SignalSchedule::constant(
        kind,
        T::of(round_to(rng.random_range(lo..=hi), step).max(step)),
    )
    .expect("positive value")
}

/// Random non-overlapping spans inside the day.
fn random_spans(rng: &mut ChaCha8Rng, count: usize, max_len: u16) -> Vec<Span> {
    let mut spans: Vec<Span> = Vec::new();
    for _ in 0..count * 4 {
        if spans.len() == count {
            break;
        }
        let len = rng.random_range(1..=max_len);
        let start = rng.random_range(1..=INTERVALS_PER_DAY - len + 1);
        let span = Span {
            start: k(start),
            end: k(start + len - 1),
        };
        if spans.iter().all(|s| !s.overlaps(&span)) {
            spans.push(span);
        }
    }
    spans.sort();
    spans
}

/// `r` intervals picked uniformly from `window`, merged into spans.
fn random_subset_spans(rng: &mut ChaCha8Rng, window: Span, r: u16) -> Vec<Span> {
    let all: Vec<u16> = (window.start.get()..=window.end.get()).collect();
    let mut picked: Vec<u16> = rand::seq::index::sample(rng, all.len(), usize::from(r))
        .into_iter()
        .map(|i| all[i])
        .collect();
    picked.sort_unstable();
    let mut spans: Vec<Span> = Vec::new();
    for i in picked {
        match spans.last_mut() {
            Some(s) if s.end.get() + 1 == i => s.end = k(i),
            _ => spans.push(Span {
                start: k(i),
                end: k(i),
            }),
        }
    }
    spans
}

/// A feasible schedulable request with a random baseline operating time.
fn random_request<T: Scalar>(
    rng: &mut ChaCha8Rng,
    appliance: &ApplianceSpec<T>,
    run: (u16, u16),
    max_window: u16,
) -> ScenarioRequest {
    let r = rng.random_range(run.0..=run.1);
    let width = rng.random_range(r..=max_window.max(r));
    let start = rng.random_range(1..=INTERVALS_PER_DAY - width + 1);
    let window = Span {
        start: k(start),
        end: k(start + width - 1),
    };
    let baseline_ot = if appliance.category == LoadCategory::Nisl || rng.random_bool(0.5) {
        let first = rng.random_range(start..=window.end.get() - r + 1);
        vec![Span {
            start: k(first),
            end: k(first + r - 1),
        }]
    } else {
        random_subset_spans(rng, window, r)
    };
    let submitted_at = if start > 1 && rng.random_bool(0.3) {
        rng.random_range(1..start)
    } else {
        0
    };
    ScenarioRequest {
        appliance: appliance.name.clone(),
        submitted_at,
        start: window.start,
        deadline: window.end,
        run_minutes: u32::from(r) * 5,
        baseline_ot,
    }
}

/// A multi-load day: schedulable requests, scripted NINSLs and optionally a
/// cooling thermostat. Always passes [`Scenario::validate`].
pub fn random_scenario<T: Scalar>(seed: u64, bounds: &GeneratorBounds) -> Scenario<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = bounds.families[rng.random_range(0..bounds.families.len())];
    let tariff = if family.tou() {
        hourly(
            &mut rng,
            SignalKind::Tariff,
            bounds.price.0,
            bounds.price.1,
            0.01,
        )
    } else {
        constant(
            &mut rng,
            SignalKind::Tariff,
            bounds.price.0,
            bounds.price.1,
            0.01,
        )
    };
    let pil = if family.dynamic() {
        hourly(&mut rng, SignalKind::Pil, bounds.pil.0, bounds.pil.1, 0.05)
    } else {
        constant(&mut rng, SignalKind::Pil, bounds.pil.0, bounds.pil.1, 0.05)
    };

    let mut appliances = Vec::new();
    let mut requests = Vec::new();
    let n_sl = rng.random_range(bounds.schedulable.0..=bounds.schedulable.1);
    for i in 0..n_sl {
        let category = if rng.random_bool(0.5) {
            LoadCategory::Isl
        } else {
            LoadCategory::Nisl
        };
        let rating = round_to(
            rng.random_range(bounds.sl_rating.0..=bounds.sl_rating.1),
            0.01,
        )
        .max(0.01);
        let spec =
            ApplianceSpec::new(format!("sl{i}"), category, T::of(rating)).expect("valid appliance");
        requests.push(random_request(&mut rng, &spec, bounds.run, 96));
        appliances.push(spec);
    }

    let mut nsl_script = NslActivityScript::new();
    let n_nsl = rng.random_range(bounds.nonschedulable.0..=bounds.nonschedulable.1);
    for i in 0..n_nsl {
        let rating = round_to(
            rng.random_range(bounds.nsl_rating.0..=bounds.nsl_rating.1),
            0.01,
        )
        .max(0.01);
        let spec = ApplianceSpec::new(format!("nsl{i}"), LoadCategory::Ninsl, T::of(rating))
            .expect("valid appliance");
        let count = rng.random_range(1..=3);
        let spans = random_spans(&mut rng, count, 48);
        nsl_script
            .insert(spec.name.clone(), spans)
            .expect("disjoint spans");
        appliances.push(spec);
    }

    let mut tca = None;
    let mut initial_room_c = None;
    if rng.random_bool(bounds.with_tca) {
        let rating = round_to(rng.random_range(0.8..=2.0), 0.01);
        let spec =
            ApplianceSpec::new("ac", LoadCategory::Insl, T::of(rating)).expect("valid appliance");
        let base = rng.random_range(27.0..=34.0);
        let mut ambient_c = [T::zero(); 24];
        for (h, slot) in ambient_c.iter_mut().enumerate() {
            let swing = 3.0 * ((h as f64 - 14.0) * std::f64::consts::PI / 12.0).cos();
            *slot = T::of(round_to(base + swing, 0.1));
        }
        let count = rng.random_range(1..=3);
        tca = Some(TcaConfig {
            appliance: spec.name.clone(),
            mode: TcaMode::Cooling,
            set_point_c: T::of(24.0),
            tolerance_c: T::of(round_to(rng.random_range(0.5..=3.0), 0.1)),
            ambient_c,
            drift_rate: T::of(round_to(rng.random_range(0.03..=0.1), 0.01)),
            actuation_c: T::of(-round_to(rng.random_range(0.8..=1.5), 0.1)),
            operating_windows: random_spans(&mut rng, count, 72),
        });
        initial_room_c = Some(T::of(round_to(rng.random_range(24.0..=30.0), 0.1)));
        appliances.push(spec);
    }

    Scenario {
        name: format!("random-{seed}"),
        currency_label: "INR".into(),
        appliances,
        tariff,
        pil,
        requests,
        nsl_script,
        tca,
        initial_room_c,
    }
}

/// One day-ahead request and nothing else, with a window of at most 24
/// intervals. Either the tariff varies under a static PIL, or the tariff is
/// flat under a varying PIL; the PIL never drops below the rating.
pub fn single_request_scenario<T: Scalar>(seed: u64) -> Scenario<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let category = if rng.random_bool(0.5) {
        LoadCategory::Isl
    } else {
        LoadCategory::Nisl
    };
    let rating = round_to(rng.random_range(0.2..=2.5), 0.01);
    let spec = ApplianceSpec::new("load", category, T::of(rating)).expect("valid appliance");
    let (tariff, pil) = if rng.random_bool(0.5) {
        let pil = round_to(rng.random_range(rating..=rating + 4.0), 0.05).max(rating);
        (
            hourly(&mut rng, SignalKind::Tariff, 1.0, 10.0, 0.01),
            SignalSchedule::constant(SignalKind::Pil, T::of(pil)).expect("positive"),
        )
    } else {
        let price = round_to(rng.random_range(1.0..=10.0), 0.01);
        let values: Vec<T> = (0..24)
            .map(|_| T::of(round_to(rng.random_range(rating..=rating + 4.0), 0.05).max(rating)))
            .collect();
        (
            SignalSchedule::constant(SignalKind::Tariff, T::of(price)).expect("positive"),
            SignalSchedule::hourly(SignalKind::Pil, &values).expect("positive"),
        )
    };
    let request = random_request(&mut rng, &spec, (1, 24), 24);
    Scenario {
        name: format!("single-{seed}"),
        currency_label: "INR".into(),
        appliances: vec![spec],
        tariff,
        pil,
        requests: vec![ScenarioRequest {
            submitted_at: 0,
            ..request
        }],
        nsl_script: NslActivityScript::new(),
        tca: None,
        initial_room_c: None,
    }
}
