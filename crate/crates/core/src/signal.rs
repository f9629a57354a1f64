//! Day-ahead utility signals: tariff (money per kWh) and power import limit (kW).
//! Both are announced per hour and held constant over that hour's 12 intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::time::IntervalIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Tariff,
    Pil,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSchedule<T> {
    kind: SignalKind,
    hourly: [T; 24],
    static_value: Option<T>,
}

impl<T: Scalar> SignalSchedule<T> {
    /// Flat tariff or static PIL.
    pub fn constant(kind: SignalKind, value: T) -> Result<Self> {
        check_positive(value, "static_value")?;
        Ok(SignalSchedule {
            kind,
            hourly: [value; 24],
            static_value: Some(value),
        })
    }

    pub fn hourly(kind: SignalKind, values: &[T]) -> Result<Self> {
        if values.len() != 24 {
            return Err(Error::invalid(
                "hourly",
                format!("expected 24 hourly values, got {}", values.len()),
            ));
        }
        let mut hourly = [T::zero(); 24];
        for (h, (slot, &v)) in hourly.iter_mut().zip(values).enumerate() {
            check_positive(v, &format!("hourly[{h}]"))?;
            *slot = v;
        }
        Ok(SignalSchedule {
            kind,
            hourly,
            static_value: None,
        })
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn hourly_values(&self) -> &[T; 24] {
        &self.hourly
    }

    pub fn static_value(&self) -> Option<T> {
        self.static_value
    }

    pub fn value_at(&self, k: IntervalIndex) -> T {
        self.hourly[k.hour()]
    }

    /// Bounds-checked lookup on a raw interval number.
    pub fn try_value_at(&self, k: u16) -> Result<T> {
        IntervalIndex::new(k).map(|k| self.value_at(k))
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        SignalSchedule {
            kind: self.kind,
            hourly: self.hourly.map(|v| v * factor),
            static_value: self.static_value.map(|v| v * factor),
        }
    }
}

fn check_positive<T: Scalar>(v: T, path: &str) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(
            path,
            format!("must be a positive number, got {v}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(n: u16) -> IntervalIndex {
        IntervalIndex::new(n).unwrap()
    }

    #[test]
    fn flat_and_static_values() {
        let tariff = SignalSchedule::constant(SignalKind::Tariff, 4.0).unwrap();
        assert!(IntervalIndex::all().all(|i| tariff.value_at(i) == 4.0));
        let pil = SignalSchedule::constant(SignalKind::Pil, 3.0f32).unwrap();
        assert_eq!(pil.value_at(k(288)), 3.0);
    }

    #[test]
    fn hourly_lookup_uses_ceiling_of_k_over_12() {
        let values: Vec<f64> = (1..=24).map(f64::from).collect();
        let s = SignalSchedule::hourly(SignalKind::Tariff, &values).unwrap();
        assert_eq!(s.value_at(k(12)), 1.0);
        assert_eq!(s.value_at(k(13)), 2.0);
        assert_eq!(s.value_at(k(288)), 24.0);
        assert!(s.try_value_at(0).is_err());
        assert!(s.try_value_at(289).is_err());
    }

    #[test]
    fn rejects_non_positive_and_wrong_length() {
        assert!(SignalSchedule::constant(SignalKind::Pil, 0.0).is_err());
        assert!(SignalSchedule::hourly(SignalKind::Pil, &[1.0; 23]).is_err());
        let mut v = [1.0; 24];
        v[5] = -1.0;
        let err = SignalSchedule::hourly(SignalKind::Pil, &v).unwrap_err();
        assert_eq!(err.issues()[0].path, "hourly[5]");
    }

    proptest! {
        #[test]
        fn piecewise_constant_per_hour(values in prop::collection::vec(0.01f64..100.0, 24), a in 1u16..=288, b in 1u16..=288) {
            let s = SignalSchedule::hourly(SignalKind::Tariff, &values).unwrap();
            if (a - 1) / 12 == (b - 1) / 12 {
                prop_assert_eq!(s.value_at(k(a)), s.value_at(k(b)));
            }
        }
    }
}
