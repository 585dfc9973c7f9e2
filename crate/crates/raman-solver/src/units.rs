//! Power and attenuation unit conversions.
//!
//! All internal computation is in linear units (watts, 1/km); dB quantities
//! appear only at the API edges (configuration, CSV output, step sizes).

use crate::error::{RamanError, Result};
use crate::scalar::{cast, RamanScalar};

/// dBm to watts: `W = 10^((dBm - 30) / 10)`.
pub fn dbm_to_watt<T: RamanScalar>(dbm: T) -> T {
    cast::<T>(10.0).powf((dbm - cast(30.0)) / cast(10.0))
}

/// Watts to dBm. Fails for non-positive or non-finite power.
pub fn watt_to_dbm<T: RamanScalar>(watts: T) -> Result<T> {
    if !(watts > T::zero()) || !watts.is_finite() {
        return Err(RamanError::InvalidArgument(format!(
            "watt_to_dbm requires a finite positive power, got {watts}"
        )));
    }
    Ok(cast::<T>(10.0) * watts.log10() + cast(30.0))
}

/// dB to a linear power ratio: `10^(dB / 10)`.
pub fn db_to_linear<T: RamanScalar>(db: T) -> T {
    cast::<T>(10.0).powf(db / cast(10.0))
}

/// Fiber attenuation in dB/km to the linear coefficient in 1/km.
///
/// `alpha = a_dB * ln(10) / 10`, i.e. division by 10*log10(e) = 4.3429...
pub fn db_per_km_to_linear<T: RamanScalar>(db_per_km: T) -> T {
    db_per_km * cast(std::f64::consts::LN_10 / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn dbm_definition_points() {
        assert_relative_eq!(dbm_to_watt(0.0_f64), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watt(30.0_f64), 1.0, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watt(-10.0_f64), 1e-4, max_relative = 1e-12);
    }

    #[test]
    fn watt_to_dbm_rejects_non_positive() {
        assert!(watt_to_dbm(0.0_f64).is_err());
        assert!(watt_to_dbm(-1.0_f64).is_err());
        assert!(watt_to_dbm(f64::NAN).is_err());
    }

    #[test]
    fn standard_attenuation() {
        // 0.2 dB/km is the usual SMF value.
        assert_relative_eq!(db_per_km_to_linear(0.2_f64), 0.046051701859880914, max_relative = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        assert_relative_eq!(dbm_to_watt(0.0_f32), 1e-3, max_relative = 1e-5);
    }

    proptest! {
        #[test]
        fn dbm_watt_round_trip(dbm in -80.0_f64..40.0) {
            let back = watt_to_dbm(dbm_to_watt(dbm)).unwrap();
            prop_assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }
    }
}
