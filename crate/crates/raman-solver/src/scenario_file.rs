//! TOML scenario files.
//!
//! A scenario file has four mandatory sections and one optional one:
//!
//! ```toml
//! [link]
//! length_km = 100.0
//! step_km = 0.1
//!
//! [signals]
//! # either an explicit frequency list:
//! #   frequency_thz = [186.0, 186.125, ...]
//! # or one band generator (scalars) / several parallel bands (arrays):
//! start_thz = 186.0
//! count = 76
//! spacing_ghz = 125.0
//! # power: scalar, per-channel list, or a tilt table
//! power_dbm = 0.0
//! # power_dbm = [0.0, -1.0, ...]
//! # power_dbm = { mean_dbm = 0.0, tilt_db = 3.0, scale = 1.0 }
//!
//! [pumps]                      # optional; omit for unpumped spans
//! frequency_thz = [210.56, 208.87, 206.72, 204.51, 200.55]
//! power_mw = [360.0, 320.0, 200.0, 130.0, 180.0]
//! adjustment = 1.0             # divides the pump powers
//!
//! [raman]
//! preset = "triangular"        # optional peak = 0.4 (1/(W km))
//! # or an explicit table:
//! # shift_thz = [0.0, 13.2, 15.0]
//! # gain = [0.0, 0.4, 0.0]
//! frequency_scaling = true     # optional, default true
//!
//! [attenuation]
//! db_per_km = 0.2              # scalar, or one entry per declared channel
//! ```
//!
//! Pump frequency/power lists pair elementwise and may be given in any
//! order; channels are sorted by frequency internally. A per-channel
//! attenuation list follows declaration order: generated/listed signals
//! first, then pumps as listed.

use serde::Deserialize;

use crate::error::{RamanError, Result};
use crate::link::{ChannelSpec, LinkScenario, RamanGainModel, DEFAULT_GAIN_PEAK};
use crate::scenarios::SignalPowerSpec;
use crate::units::{db_per_km_to_linear, dbm_to_watt};

/// Scalar or list, for fields accepting both.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

/// Count field: one band or one entry per band.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum UsizeOrList {
    Scalar(usize),
    List(Vec<usize>),
}

/// Signal launch power: scalar dBm, per-channel list, or tilt table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PowerField {
    Scalar(f64),
    List(Vec<f64>),
    Tilt {
        mean_dbm: f64,
        tilt_db: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub length_km: f64,
    pub step_km: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalsSection {
    pub frequency_thz: Option<Vec<f64>>,
    pub start_thz: Option<ScalarOrList>,
    pub count: Option<UsizeOrList>,
    pub spacing_ghz: Option<ScalarOrList>,
    pub power_dbm: PowerField,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpsSection {
    pub frequency_thz: Vec<f64>,
    pub power_mw: Vec<f64>,
    #[serde(default = "default_scale")]
    pub adjustment: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanSection {
    pub preset: Option<String>,
    pub peak: Option<f64>,
    pub shift_thz: Option<Vec<f64>>,
    pub gain: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    pub frequency_scaling: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationSection {
    pub db_per_km: ScalarOrList,
}

/// Parsed scenario file, before assembly into a [`LinkScenario`].
///
/// Keeping the parsed form around lets callers apply overrides (pump
/// adjustment, uniform signal power, grid step, power scaling) and rebuild.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub link: LinkSection,
    pub signals: SignalsSection,
    pub pumps: Option<PumpsSection>,
    pub raman: RamanSection,
    pub attenuation: AttenuationSection,
}

impl ScenarioSpec {
    /// Parse a scenario from TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| RamanError::ScenarioFile(e.to_string()))
    }

    /// Read and parse a scenario file.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            RamanError::ScenarioFile(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    /// Replace the pump adjustment factor.
    pub fn set_adjustment(&mut self, adjustment: f64) {
        if let Some(pumps) = &mut self.pumps {
            pumps.adjustment = adjustment;
        }
    }

    /// Replace the signal power spec with a uniform level.
    pub fn set_uniform_signal_power(&mut self, dbm: f64) {
        self.signals.power_dbm = PowerField::Scalar(dbm);
    }

    /// Multiply all signal launch powers by a linear factor.
    pub fn scale_signal_powers(&mut self, factor: f64) {
        const LOG10_FACTOR: f64 = 10.0;
        match &mut self.signals.power_dbm {
            PowerField::Scalar(dbm) => *dbm += LOG10_FACTOR * factor.log10(),
            PowerField::List(list) => {
                for dbm in list {
                    *dbm += LOG10_FACTOR * factor.log10();
                }
            }
            PowerField::Tilt { scale, .. } => *scale *= factor,
        }
    }

    /// Replace the grid step.
    pub fn set_step_km(&mut self, step_km: f64) {
        self.link.step_km = step_km;
    }

    fn signal_frequencies(&self) -> Result<Vec<f64>> {
        let s = &self.signals;
        if let Some(freqs) = &s.frequency_thz {
            if s.start_thz.is_some() || s.count.is_some() || s.spacing_ghz.is_some() {
                return Err(RamanError::ScenarioFile(
                    "signals: give either frequency_thz or a band generator, not both".into(),
                ));
            }
            if freqs.is_empty() {
                return Err(RamanError::ScenarioFile("signals.frequency_thz is empty".into()));
            }
            return Ok(freqs.clone());
        }
        let (starts, counts, spacings) = match (&s.start_thz, &s.count, &s.spacing_ghz) {
            (Some(start), Some(count), Some(spacing)) => {
                let starts = match start {
                    ScalarOrList::Scalar(v) => vec![*v],
                    ScalarOrList::List(v) => v.clone(),
                };
                let counts = match count {
                    UsizeOrList::Scalar(v) => vec![*v],
                    UsizeOrList::List(v) => v.clone(),
                };
                let spacings = match spacing {
                    ScalarOrList::Scalar(v) => vec![*v; starts.len()],
                    ScalarOrList::List(v) => v.clone(),
                };
                (starts, counts, spacings)
            }
            _ => {
                return Err(RamanError::ScenarioFile(
                    "signals: need frequency_thz or all of start_thz/count/spacing_ghz".into(),
                ))
            }
        };
        if starts.len() != counts.len() || starts.len() != spacings.len() {
            return Err(RamanError::ScenarioFile(
                "signals: start_thz, count and spacing_ghz must describe the same number of bands"
                    .into(),
            ));
        }
        let mut freqs = Vec::new();
        for ((start, count), spacing_ghz) in starts.iter().zip(&counts).zip(&spacings) {
            if *count == 0 {
                return Err(RamanError::ScenarioFile("signals: band count must be positive".into()));
            }
            for k in 0..*count {
                freqs.push(start + spacing_ghz * 1e-3 * k as f64);
            }
        }
        Ok(freqs)
    }

    fn gain_model(&self) -> Result<RamanGainModel<f64>> {
        let r = &self.raman;
        match (&r.preset, &r.shift_thz, &r.gain) {
            (Some(preset), None, None) => {
                if preset != "triangular" {
                    return Err(RamanError::ScenarioFile(format!(
                        "raman: unknown preset '{preset}' (supported: triangular)"
                    )));
                }
                Ok(RamanGainModel::triangular(
                    r.peak.unwrap_or(DEFAULT_GAIN_PEAK),
                    r.frequency_scaling,
                ))
            }
            (None, Some(shift), Some(gain)) => {
                RamanGainModel::new(shift.clone(), gain.clone(), r.frequency_scaling)
            }
            _ => Err(RamanError::ScenarioFile(
                "raman: give either preset = \"triangular\" or a shift_thz/gain table".into(),
            )),
        }
    }

    /// Assemble the validated scenario.
    pub fn build(&self) -> Result<LinkScenario<f64>> {
        let signal_freqs = self.signal_frequencies()?;
        let n_signals = signal_freqs.len();

        let (pump_freqs, pump_powers_w): (Vec<f64>, Vec<f64>) = match &self.pumps {
            Some(p) => {
                if p.frequency_thz.len() != p.power_mw.len() {
                    return Err(RamanError::ScenarioFile(format!(
                        "pumps: {} frequencies but {} powers",
                        p.frequency_thz.len(),
                        p.power_mw.len()
                    )));
                }
                if !(p.adjustment > 0.0) {
                    return Err(RamanError::ScenarioFile(
                        "pumps.adjustment must be positive".into(),
                    ));
                }
                let powers =
                    p.power_mw.iter().map(|mw| mw * 1e-3 / p.adjustment).collect::<Vec<_>>();
                (p.frequency_thz.clone(), powers)
            }
            None => (Vec::new(), Vec::new()),
        };

        let n_channels = n_signals + pump_freqs.len();
        let attenuations: Vec<f64> = match &self.attenuation.db_per_km {
            ScalarOrList::Scalar(db) => vec![db_per_km_to_linear(*db); n_channels],
            ScalarOrList::List(list) => {
                if list.len() != n_channels {
                    return Err(RamanError::ScenarioFile(format!(
                        "attenuation.db_per_km lists {} entries for {} channels",
                        list.len(),
                        n_channels
                    )));
                }
                list.iter().map(|db| db_per_km_to_linear(*db)).collect()
            }
        };

        let power_spec = match &self.signals.power_dbm {
            PowerField::Scalar(dbm) => SignalPowerSpec::Uniform { dbm: *dbm },
            PowerField::List(list) => SignalPowerSpec::PerChannel { dbm: list.clone() },
            PowerField::Tilt { mean_dbm, tilt_db, .. } => {
                SignalPowerSpec::Tilt { mean_dbm: *mean_dbm, tilt_db: *tilt_db }
            }
        };
        let scale = match &self.signals.power_dbm {
            PowerField::Tilt { scale, .. } => *scale,
            _ => 1.0,
        };
        // tilt powers follow frequency order; sort the signal comb first,
        // carrying attenuation along
        let mut signal_order: Vec<usize> = (0..n_signals).collect();
        signal_order.sort_by(|a, b| {
            signal_freqs[*a].partial_cmp(&signal_freqs[*b]).unwrap_or(std::cmp::Ordering::Equal)
        });
        let sorted_freqs: Vec<f64> = signal_order.iter().map(|&i| signal_freqs[i]).collect();
        let signal_powers = match &power_spec {
            SignalPowerSpec::PerChannel { dbm } => {
                // per-channel list pairs with the declared order
                if dbm.len() != n_signals {
                    return Err(RamanError::ScenarioFile(format!(
                        "signals.power_dbm lists {} entries for {} signals",
                        dbm.len(),
                        n_signals
                    )));
                }
                signal_order.iter().map(|&i| dbm_to_watt(dbm[i]) * scale).collect::<Vec<_>>()
            }
            _ => power_spec.powers_w(&sorted_freqs, scale)?,
        };

        let mut channels: Vec<(ChannelSpec<f64>, f64)> = Vec::with_capacity(n_channels);
        for (pos, &orig) in signal_order.iter().enumerate() {
            channels.push((
                ChannelSpec::forward_signal(sorted_freqs[pos], attenuations[orig], signal_powers[pos]),
                sorted_freqs[pos],
            ));
        }
        for (k, (f, p)) in pump_freqs.iter().zip(&pump_powers_w).enumerate() {
            channels.push((
                ChannelSpec::backward_pump(*f, attenuations[n_signals + k], *p),
                *f,
            ));
        }
        channels.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let channels: Vec<ChannelSpec<f64>> = channels.into_iter().map(|(c, _)| c).collect();

        LinkScenario::new(channels, self.link.length_km, self.link.step_km, self.gain_model()?)
    }
}
