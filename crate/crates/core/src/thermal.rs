//! Thermostatically controlled appliance (INSL): hysteresis switching and a
//! first-order room temperature model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::load::Span;
use crate::scalar::Scalar;
use crate::time::IntervalIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TcaMode {
    Cooling,
    Heating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcaConfig<T> {
    pub appliance: String,
    pub mode: TcaMode,
    pub set_point_c: T,
    /// Consumer-granted widening of the comfort band, in °C.
    pub tolerance_c: T,
    /// Outdoor temperature per hour of day.
    pub ambient_c: [T; 24],
    /// Fraction of the room/ambient gap closed per interval.
    pub drift_rate: T,
    /// Temperature change per interval while ON (negative when cooling).
    pub actuation_c: T,
    /// Spans in which the thermostat is armed; OFF elsewhere.
    pub operating_windows: Vec<Span>,
}

impl<T: Scalar> TcaConfig<T> {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance_c >= T::zero()) {
            return Err(Error::invalid("tolerance_c", "must be >= 0"));
        }
        if !(self.drift_rate > T::zero() && self.drift_rate <= T::one()) {
            return Err(Error::invalid("drift_rate", "must lie in (0, 1]"));
        }
        match self.mode {
            TcaMode::Cooling if !(self.actuation_c < T::zero()) => Err(Error::invalid(
                "actuation_c",
                "must be negative for a cooling appliance",
            )),
            TcaMode::Heating if !(self.actuation_c > T::zero()) => Err(Error::invalid(
                "actuation_c",
                "must be positive for a heating appliance",
            )),
            _ => Ok(()),
        }
    }

    pub fn ambient_at(&self, k: IntervalIndex) -> T {
        self.ambient_c[k.hour()]
    }

    pub fn is_armed(&self, k: IntervalIndex) -> bool {
        self.operating_windows.iter().any(|w| w.contains(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcaState<T> {
    pub room_c: T,
    pub u_prev: bool,
}

/// Hysteresis decision on the previous-interval room temperature.
///
/// Cooling: OFF below the set point, ON above set point + tolerance, otherwise
/// hold. Heating mirrors it below the set point.
pub fn thermostat_decide<T: Scalar>(cfg: &TcaConfig<T>, state: &TcaState<T>) -> bool {
    let room = state.room_c;
    match cfg.mode {
        TcaMode::Cooling => {
            if room < cfg.set_point_c {
                false
            } else if room > cfg.set_point_c + cfg.tolerance_c {
                true
            } else {
                state.u_prev
            }
        }
        TcaMode::Heating => {
            if room < cfg.set_point_c - cfg.tolerance_c {
                true
            } else if room > cfg.set_point_c {
                false
            } else {
                state.u_prev
            }
        }
    }
}

pub fn room_temperature_step<T: Scalar>(
    cfg: &TcaConfig<T>,
    state: &TcaState<T>,
    on: bool,
    k: IntervalIndex,
) -> T {
    let drift = cfg.drift_rate * (cfg.ambient_at(k) - state.room_c);
    let actuation = if on { cfg.actuation_c } else { T::zero() };
    state.room_c + drift + actuation
}

/// Runs one interval: decide (forced OFF outside the armed windows), then
/// evolve the room. Returns the ON flag.
pub fn advance<T: Scalar>(cfg: &TcaConfig<T>, state: &mut TcaState<T>, k: IntervalIndex) -> bool {
    let on = cfg.is_armed(k) && thermostat_decide(cfg, state);
    state.room_c = room_temperature_step(cfg, state, on, k);
    state.u_prev = on;
    on
}
