//! Day discretization: 288 five-minute scheduling intervals, numbered from 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const INTERVAL_MINUTES: u16 = 5;
pub const INTERVALS_PER_DAY: u16 = 288;
pub const INTERVALS_PER_HOUR: u16 = 12;
const MINUTES_PER_DAY: u16 = 24 * 60;

/// A scheduling interval `k` in `1..=288`; interval `k` covers minutes
/// `[(k-1)*5, k*5)` of the day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct IntervalIndex(u16);

impl IntervalIndex {
    pub const FIRST: IntervalIndex = IntervalIndex(1);
    pub const LAST: IntervalIndex = IntervalIndex(INTERVALS_PER_DAY);

    pub fn new(k: u16) -> Result<Self> {
        if (1..=INTERVALS_PER_DAY).contains(&k) {
            Ok(IntervalIndex(k))
        } else {
            Err(Error::IntervalOutOfRange(k as i64))
        }
    }

    pub fn get(self) -> u16 {
        self.0
    }

    /// Zero-based position, for indexing per-interval arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    /// Zero-based hour of day this interval belongs to.
    pub fn hour(self) -> usize {
        self.index() / INTERVALS_PER_HOUR as usize
    }

    pub fn start_time(self) -> ClockTime {
        ClockTime((self.0 - 1) * INTERVAL_MINUTES)
    }

    /// Wall-clock time at which the interval ends (`24:00` for the last one).
    pub fn end_time(self) -> ClockTime {
        ClockTime(self.0 * INTERVAL_MINUTES)
    }

    pub fn next(self) -> Option<Self> {
        IntervalIndex::new(self.0 + 1).ok()
    }

    /// Intervals `from..=to`, empty when `from > to`.
    pub fn range(from: IntervalIndex, to: IntervalIndex) -> impl Iterator<Item = IntervalIndex> {
        (from.0..=to.0).map(IntervalIndex)
    }

    pub fn all() -> impl Iterator<Item = IntervalIndex> {
        Self::range(Self::FIRST, Self::LAST)
    }
}

impl TryFrom<u16> for IntervalIndex {
    type Error = Error;

    fn try_from(k: u16) -> Result<Self> {
        IntervalIndex::new(k)
    }
}

impl From<IntervalIndex> for u16 {
    fn from(k: IntervalIndex) -> u16 {
        k.0
    }
}

impl fmt::Display for IntervalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wall-clock `HH:MM` on a 5-minute grid, `00:00..=24:00`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockTime(u16);

impl ClockTime {
    pub fn from_minutes(minutes: u16) -> Result<Self> {
        if minutes > MINUTES_PER_DAY {
            return Err(Error::invalid(
                "",
                format!("{minutes} minutes is past 24:00"),
            ));
        }
        if !minutes.is_multiple_of(INTERVAL_MINUTES) {
            return Err(Error::invalid(
                "",
                format!("{} is not a multiple of 5 minutes", ClockTime(minutes)),
            ));
        }
        Ok(ClockTime(minutes))
    }

    pub fn minutes(self) -> u16 {
        self.0
    }
}

impl FromStr for ClockTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("", format!("`{s}` is not a HH:MM time"));
        let (h, m) = s.split_once(':').ok_or_else(bad)?;
        if h.is_empty() || h.len() > 2 || m.len() != 2 {
            return Err(bad());
        }
        let h: u16 = h.parse().map_err(|_| bad())?;
        let m: u16 = m.parse().map_err(|_| bad())?;
        if m >= 60 || h > 24 || (h == 24 && m != 0) {
            return Err(bad());
        }
        if !m.is_multiple_of(INTERVAL_MINUTES) {
            return Err(Error::invalid(
                "",
                format!("`{s}`: minutes not a multiple of 5"),
            ));
        }
        Ok(ClockTime(h * 60 + m))
    }
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl Serialize for ClockTime {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Interval that starts at `t`. `24:00` starts nothing and is rejected.
pub fn time_to_interval(t: ClockTime) -> Result<IntervalIndex> {
    IntervalIndex::new(t.0 / INTERVAL_MINUTES + 1)
        .map_err(|_| Error::invalid("", format!("{t} is not the start of any interval")))
}

/// Last interval that ends at or before `t`; `00:00` and `24:00` both mean 288.
pub fn deadline_interval(t: ClockTime) -> IntervalIndex {
    match t.0 / INTERVAL_MINUTES {
        0 => IntervalIndex::LAST,
        k => IntervalIndex(k),
    }
}

pub fn interval_start_time(k: IntervalIndex) -> ClockTime {
    k.start_time()
}
