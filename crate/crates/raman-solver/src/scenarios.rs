//! Builders for the reference C+L and C+L+S test scenarios.
//!
//! 76 signal channels cover the C and L bands starting at 186 THz on a
//! 125 GHz grid; the C+L+S variant adds 38 channels starting at 196 THz.
//! Five counter-propagating pumps sit above the signal bands; their nominal
//! powers are divided by an `adjustment` factor, so values below one mean
//! *more* pump power.

use crate::error::{RamanError, Result};
use crate::link::{ChannelSpec, LinkScenario, RamanGainModel};
use crate::scalar::{cast, RamanScalar};
use crate::units::{db_per_km_to_linear, dbm_to_watt};

/// Default span length in km.
pub const DEFAULT_LENGTH_KM: f64 = 100.0;
/// Default grid step in km.
pub const DEFAULT_STEP_KM: f64 = 0.1;
/// Default flat fiber attenuation in dB/km.
pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

/// C+L band: first channel frequency (THz), channel count, spacing (THz).
pub const CL_BAND_START_THZ: f64 = 186.0;
pub const CL_BAND_COUNT: usize = 76;
/// S band extension used by the C+L+S scenario.
pub const S_BAND_START_THZ: f64 = 196.0;
pub const S_BAND_COUNT: usize = 38;
/// 125 GHz channel spacing.
pub const CHANNEL_SPACING_THZ: f64 = 0.125;

/// Pump frequencies (THz) and nominal powers (mW) for the C+L scenario,
/// listed high-to-low in frequency; power pairs with frequency elementwise.
pub const CL_PUMP_FREQUENCIES_THZ: [f64; 5] = [210.56, 208.87, 206.72, 204.51, 200.55];
pub const CL_PUMP_POWERS_MW: [f64; 5] = [360.0, 320.0, 200.0, 130.0, 180.0];
/// The C+L+S scenario shifts the pumps up by 5 THz to clear the S band.
pub const CLS_PUMP_SHIFT_THZ: f64 = 5.0;

/// How the launch power of the signal comb is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalPowerSpec<T> {
    /// Every signal launches at the same power.
    Uniform { dbm: T },
    /// Explicit per-channel powers, in channel (ascending frequency) order.
    PerChannel { dbm: Vec<T> },
    /// Linear tilt in dB across the signal band: the lowest-frequency channel
    /// launches at `mean_dbm - tilt_db/2`, the highest at `mean_dbm + tilt_db/2`.
    Tilt { mean_dbm: T, tilt_db: T },
}

impl<T: RamanScalar> SignalPowerSpec<T> {
    /// Launch powers in watts for the given signal frequencies, multiplied by
    /// the linear factor `scale`.
    pub fn powers_w(&self, frequencies_thz: &[T], scale: T) -> Result<Vec<T>> {
        if !(scale > T::zero()) {
            return Err(RamanError::InvalidArgument(format!(
                "power scale factor must be positive, got {scale}"
            )));
        }
        let n = frequencies_thz.len();
        let dbm_values: Vec<T> = match self {
            SignalPowerSpec::Uniform { dbm } => vec![*dbm; n],
            SignalPowerSpec::PerChannel { dbm } => {
                if dbm.len() != n {
                    return Err(RamanError::DimensionMismatch(format!(
                        "per-channel power list has {} entries for {} signals",
                        dbm.len(),
                        n
                    )));
                }
                dbm.clone()
            }
            SignalPowerSpec::Tilt { mean_dbm, tilt_db } => {
                let f_lo = frequencies_thz[0];
                let f_hi = frequencies_thz[n - 1];
                let span = f_hi - f_lo;
                frequencies_thz
                    .iter()
                    .map(|f| {
                        let x = if span > T::zero() {
                            (*f - f_lo) / span
                        } else {
                            cast(0.5)
                        };
                        *mean_dbm + *tilt_db * (x - cast(0.5))
                    })
                    .collect()
            }
        };
        Ok(dbm_values.into_iter().map(|p| dbm_to_watt(p) * scale).collect())
    }
}

fn band_frequencies<T: RamanScalar>(start_thz: f64, count: usize, spacing_thz: f64) -> Vec<T> {
    (0..count).map(|k| cast::<T>(start_thz + spacing_thz * k as f64)).collect()
}

fn assemble<T: RamanScalar>(
    signal_freqs: Vec<T>,
    signal_powers: Vec<T>,
    pump_shift_thz: f64,
    adjustment: T,
) -> Result<LinkScenario<T>> {
    if !(adjustment > T::zero()) {
        return Err(RamanError::InvalidArgument(format!(
            "pump adjustment factor must be positive, got {adjustment}"
        )));
    }
    let alpha = db_per_km_to_linear(cast::<T>(DEFAULT_ATTENUATION_DB_PER_KM));

    let mut channels: Vec<ChannelSpec<T>> = signal_freqs
        .into_iter()
        .zip(signal_powers)
        .map(|(f, p)| ChannelSpec::forward_signal(f, alpha, p))
        .collect();

    // Pumps sorted ascending in frequency, keeping the frequency/power pairing.
    let mut pumps: Vec<(T, T)> = CL_PUMP_FREQUENCIES_THZ
        .iter()
        .zip(CL_PUMP_POWERS_MW.iter())
        .map(|(f, p)| {
            (cast::<T>(*f + pump_shift_thz), cast::<T>(*p * 1e-3) / adjustment)
        })
        .collect();
    pumps.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("pump frequencies are finite"));
    channels.extend(pumps.into_iter().map(|(f, p)| ChannelSpec::backward_pump(f, alpha, p)));

    LinkScenario::new(
        channels,
        cast(DEFAULT_LENGTH_KM),
        cast(DEFAULT_STEP_KM),
        RamanGainModel::default_triangular(),
    )
}

/// The C+L stress scenario: 76 signals from 186 THz on the 125 GHz grid and
/// 5 backward pumps whose nominal powers are divided by `adjustment`.
pub fn make_cl_scenario<T: RamanScalar>(
    signal_power: &SignalPowerSpec<T>,
    adjustment: T,
) -> Result<LinkScenario<T>> {
    let freqs = band_frequencies(CL_BAND_START_THZ, CL_BAND_COUNT, CHANNEL_SPACING_THZ);
    let powers = signal_power.powers_w(&freqs, T::one())?;
    assemble(freqs, powers, 0.0, adjustment)
}

/// The C+L+S scenario: the C+L comb plus 38 S-band signals from 196 THz, with
/// the pumps shifted up by 5 THz. Signal powers are additionally multiplied
/// by the linear factor `tilt_k`.
pub fn make_cls_scenario<T: RamanScalar>(
    signal_power: &SignalPowerSpec<T>,
    adjustment: T,
    tilt_k: T,
) -> Result<LinkScenario<T>> {
    let mut freqs: Vec<T> = band_frequencies(CL_BAND_START_THZ, CL_BAND_COUNT, CHANNEL_SPACING_THZ);
    freqs.extend(band_frequencies::<T>(S_BAND_START_THZ, S_BAND_COUNT, CHANNEL_SPACING_THZ));
    let powers = signal_power.powers_w(&freqs, tilt_k)?;
    assemble(freqs, powers, CLS_PUMP_SHIFT_THZ, adjustment)
}
