//! Channels, fiber spans, the Raman coupling matrix and the spatial grid.
//!
//! A [`LinkScenario`] is the full description of one span: an ordered list of
//! channels (forward signals and backward pumps), the fiber length, the grid
//! step and the Raman gain model. Everything here is immutable after
//! construction and safe to share across concurrent solver runs.

use crate::error::{RamanError, Result};
use crate::scalar::{cast, RamanScalar};

/// Propagation direction of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Co-propagating (signals, forward pumps): power imposed at z = 0.
    Forward,
    /// Counter-propagating (backward pumps): power imposed at z = L.
    Backward,
}

impl Direction {
    /// +1 for forward, -1 for backward.
    pub fn sign<T: RamanScalar>(self) -> T {
        match self {
            Direction::Forward => T::one(),
            Direction::Backward => -T::one(),
        }
    }
}

/// Fiber end at which a channel's boundary power is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryEnd {
    /// z = 0.
    Start,
    /// z = L.
    End,
}

/// One signal or pump channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec<T> {
    /// Center frequency in THz.
    pub center_frequency_thz: T,
    pub direction: Direction,
    /// Linear attenuation coefficient in 1/km.
    pub attenuation_per_km: T,
    /// Boundary power in watts, imposed at `boundary_end`.
    pub boundary_power_w: T,
    pub boundary_end: BoundaryEnd,
}

impl<T: RamanScalar> ChannelSpec<T> {
    /// A forward signal with its power imposed at z = 0.
    pub fn forward_signal(frequency_thz: T, attenuation_per_km: T, power_w: T) -> Self {
        Self {
            center_frequency_thz: frequency_thz,
            direction: Direction::Forward,
            attenuation_per_km,
            boundary_power_w: power_w,
            boundary_end: BoundaryEnd::Start,
        }
    }

    /// A backward pump injected at the far end (z = L).
    pub fn backward_pump(frequency_thz: T, attenuation_per_km: T, power_w: T) -> Self {
        Self {
            center_frequency_thz: frequency_thz,
            direction: Direction::Backward,
            attenuation_per_km,
            boundary_power_w: power_w,
            boundary_end: BoundaryEnd::End,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.center_frequency_thz > T::zero()) {
            return Err(RamanError::InvalidArgument(format!(
                "channel frequency must be positive, got {} THz",
                self.center_frequency_thz
            )));
        }
        if !(self.attenuation_per_km >= T::zero()) {
            return Err(RamanError::InvalidArgument(format!(
                "attenuation must be non-negative, got {} 1/km",
                self.attenuation_per_km
            )));
        }
        if !(self.boundary_power_w > T::zero()) {
            return Err(RamanError::InvalidArgument(format!(
                "boundary power must be positive, got {} W",
                self.boundary_power_w
            )));
        }
        let end_ok = match self.direction {
            Direction::Forward => self.boundary_end == BoundaryEnd::Start,
            Direction::Backward => self.boundary_end == BoundaryEnd::End,
        };
        if !end_ok {
            return Err(RamanError::InvalidArgument(
                "boundary end inconsistent with direction (forward channels anchor at z=0, \
                 backward channels at z=L)"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Normalized Raman gain spectrum g_R(shift), sampled on a shift grid and
/// interpolated linearly in between; zero beyond the last sample.
///
/// `frequency_scaling` applies the photon-ratio factor `f_hi/f_lo` on the
/// depletion side of the coupling matrix, which makes the Raman exchange
/// conserve photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanGainModel<T> {
    shift_grid_thz: Vec<T>,
    gain_values: Vec<T>,
    frequency_scaling: bool,
}

/// Peak of the default triangular gain approximation, 1/(W km).
pub const DEFAULT_GAIN_PEAK: f64 = 0.4;
/// Frequency shift of the gain peak, THz.
pub const GAIN_PEAK_SHIFT_THZ: f64 = 13.2;
/// Shift beyond which the default gain is zero, THz.
pub const GAIN_CUTOFF_SHIFT_THZ: f64 = 15.0;

impl<T: RamanScalar> RamanGainModel<T> {
    pub fn new(shift_grid_thz: Vec<T>, gain_values: Vec<T>, frequency_scaling: bool) -> Result<Self> {
        if shift_grid_thz.is_empty() || shift_grid_thz.len() != gain_values.len() {
            return Err(RamanError::InvalidArgument(
                "gain model needs equally sized, non-empty shift and gain tables".into(),
            ));
        }
        if shift_grid_thz[0] != T::zero() || gain_values[0] != T::zero() {
            return Err(RamanError::InvalidArgument(
                "gain table must start at shift 0 with gain 0".into(),
            ));
        }
        for w in shift_grid_thz.windows(2) {
            if !(w[1] > w[0]) {
                return Err(RamanError::InvalidArgument(
                    "gain shift grid must be strictly ascending".into(),
                ));
            }
        }
        if gain_values.iter().any(|g| !(*g >= T::zero()) || !g.is_finite()) {
            return Err(RamanError::InvalidArgument(
                "gain values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { shift_grid_thz, gain_values, frequency_scaling })
    }

    /// Piecewise-linear triangular approximation of the silica Raman gain:
    /// 0 at zero shift, `peak` at 13.2 THz, back to 0 at 15 THz, 0 beyond.
    pub fn triangular(peak: T, frequency_scaling: bool) -> Self {
        Self {
            shift_grid_thz: vec![T::zero(), cast(GAIN_PEAK_SHIFT_THZ), cast(GAIN_CUTOFF_SHIFT_THZ)],
            gain_values: vec![T::zero(), peak, T::zero()],
            frequency_scaling,
        }
    }

    /// The default spectrum: triangular with a 0.4 1/(W km) peak and photon
    /// scaling on.
    pub fn default_triangular() -> Self {
        Self::triangular(cast(DEFAULT_GAIN_PEAK), true)
    }

    /// All-zero gain (channels decoupled; useful for attenuation-only runs).
    pub fn zero() -> Self {
        Self {
            shift_grid_thz: vec![T::zero()],
            gain_values: vec![T::zero()],
            frequency_scaling: true,
        }
    }

    pub fn frequency_scaling(&self) -> bool {
        self.frequency_scaling
    }

    pub fn shift_grid_thz(&self) -> &[T] {
        &self.shift_grid_thz
    }

    pub fn gain_values(&self) -> &[T] {
        &self.gain_values
    }

    /// g_R at a non-negative frequency shift (THz), in 1/(W km).
    pub fn gain_at(&self, shift_thz: T) -> T {
        let grid = &self.shift_grid_thz;
        let last = grid.len() - 1;
        if shift_thz <= T::zero() || shift_thz >= grid[last] {
            // support ends at the last sample; gain_values[last] is reached
            // exactly at grid[last] only when it is non-zero
            if shift_thz == grid[last] {
                return self.gain_values[last];
            }
            return T::zero();
        }
        match grid.iter().position(|s| *s >= shift_thz) {
            Some(hi) => {
                let lo = hi - 1;
                let t = (shift_thz - grid[lo]) / (grid[hi] - grid[lo]);
                self.gain_values[lo] + t * (self.gain_values[hi] - self.gain_values[lo])
            }
            None => T::zero(),
        }
    }
}

/// Spatial grid `[0, dz, 2 dz, ..., L]`.
///
/// When the span length is not an integer multiple of the step, the final
/// interval is clamped so the grid still ends exactly at L; all other
/// intervals keep the nominal step.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    points_km: Vec<T>,
    step_km: T,
    clamped_last: bool,
}

impl<T: RamanScalar> Grid<T> {
    /// Grid points in km; `points()[0] == 0`, `points().last() == L`.
    pub fn points(&self) -> &[T] {
        &self.points_km
    }

    /// Nominal step dz in km.
    pub fn step(&self) -> T {
        self.step_km
    }

    /// Number of intervals N_z (= points() - 1).
    pub fn n_steps(&self) -> usize {
        self.points_km.len() - 1
    }

    pub fn length(&self) -> T {
        *self.points_km.last().expect("grid has at least two points")
    }

    /// True when the final interval is shorter than the nominal step.
    pub fn has_clamped_last_interval(&self) -> bool {
        self.clamped_last
    }

    /// Width of interval `m` (1-based like the grid columns) relative to the
    /// nominal step: 1 everywhere except possibly the last interval.
    pub fn relative_interval_width(&self, m: usize) -> T {
        debug_assert!(m >= 1 && m <= self.n_steps());
        if self.clamped_last && m == self.n_steps() {
            let n = self.n_steps();
            let covered = self.step_km * cast::<T>((n - 1) as f64);
            (self.length() - covered) / self.step_km
        } else {
            T::one()
        }
    }
}

/// Build the spatial grid for a span of `length_km` with step `step_km`.
///
/// The number of intervals is `ceil(length/step)`; when the division is not
/// exact the final interval is clamped to end at `length_km`.
pub fn build_grid<T: RamanScalar>(length_km: T, step_km: T) -> Result<Grid<T>> {
    if !(length_km > T::zero()) || !length_km.is_finite() {
        return Err(RamanError::InvalidArgument(format!(
            "span length must be positive and finite, got {length_km} km"
        )));
    }
    if !(step_km > T::zero()) || !step_km.is_finite() {
        return Err(RamanError::InvalidArgument(format!(
            "grid step must be positive and finite, got {step_km} km"
        )));
    }
    if step_km > length_km {
        return Err(RamanError::InvalidArgument(format!(
            "grid step ({step_km} km) exceeds span length ({length_km} km)"
        )));
    }

    let ratio = length_km / step_km;
    let rounded = ratio.round();
    // Treat near-integer ratios as exact so binary round-off in length/step
    // does not create a spurious sliver interval.
    let exact = (rounded * step_km - length_km).abs() <= cast::<T>(1e-9) * length_km;
    let n_steps = if exact {
        rounded.to_usize().unwrap_or(1).max(1)
    } else {
        ratio.ceil().to_usize().ok_or_else(|| {
            RamanError::InvalidArgument("length/step ratio too large for a grid".into())
        })?
    };

    let mut points = Vec::with_capacity(n_steps + 1);
    for m in 0..n_steps {
        points.push(step_km * cast::<T>(m as f64));
    }
    points.push(length_km);

    Ok(Grid { points_km: points, step_km, clamped_last: !exact })
}

/// Full description of one amplified span.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario<T> {
    channels: Vec<ChannelSpec<T>>,
    length_km: T,
    step_km: T,
    gain_model: RamanGainModel<T>,
    n_signals: usize,
    n_pumps: usize,
}

impl<T: RamanScalar> LinkScenario<T> {
    /// Validate and assemble a scenario.
    ///
    /// Channels must be sorted strictly ascending in frequency, with the
    /// forward (signal) and backward (pump) channels each forming one
    /// contiguous block; at least one signal is required.
    pub fn new(
        channels: Vec<ChannelSpec<T>>,
        length_km: T,
        step_km: T,
        gain_model: RamanGainModel<T>,
    ) -> Result<Self> {
        build_grid(length_km, step_km)?; // validates length/step
        if channels.is_empty() {
            return Err(RamanError::InvalidArgument("scenario needs at least one channel".into()));
        }
        for ch in &channels {
            ch.validate()?;
        }
        for w in channels.windows(2) {
            if !(w[1].center_frequency_thz > w[0].center_frequency_thz) {
                return Err(RamanError::InvalidArgument(
                    "channels must be sorted strictly ascending in frequency, without duplicates"
                        .into(),
                ));
            }
        }
        let n_signals = channels.iter().filter(|c| c.direction == Direction::Forward).count();
        let n_pumps = channels.len() - n_signals;
        if n_signals == 0 {
            return Err(RamanError::InvalidArgument(
                "scenario needs at least one forward signal channel".into(),
            ));
        }
        let mut blocks = 1usize;
        for w in channels.windows(2) {
            if w[0].direction != w[1].direction {
                blocks += 1;
            }
        }
        if blocks > 2 {
            return Err(RamanError::InvalidArgument(
                "signal and pump channels must each form one contiguous frequency block".into(),
            ));
        }
        Ok(Self { channels, length_km, step_km, gain_model, n_signals, n_pumps })
    }

    pub fn channels(&self) -> &[ChannelSpec<T>] {
        &self.channels
    }

    pub fn length_km(&self) -> T {
        self.length_km
    }

    pub fn step_km(&self) -> T {
        self.step_km
    }

    pub fn gain_model(&self) -> &RamanGainModel<T> {
        &self.gain_model
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_signals(&self) -> usize {
        self.n_signals
    }

    pub fn n_pumps(&self) -> usize {
        self.n_pumps
    }

    /// Row indices of the forward signal channels.
    pub fn signal_range(&self) -> std::ops::Range<usize> {
        match self.channels.first().map(|c| c.direction) {
            Some(Direction::Forward) => 0..self.n_signals,
            _ => self.n_pumps..self.n_channels(),
        }
    }

    /// Row indices of the backward pump channels.
    pub fn pump_range(&self) -> std::ops::Range<usize> {
        match self.channels.first().map(|c| c.direction) {
            Some(Direction::Forward) => self.n_signals..self.n_channels(),
            _ => 0..self.n_pumps,
        }
    }

    pub fn frequencies_thz(&self) -> Vec<T> {
        self.channels.iter().map(|c| c.center_frequency_thz).collect()
    }

    pub fn attenuations_per_km(&self) -> Vec<T> {
        self.channels.iter().map(|c| c.attenuation_per_km).collect()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.channels.iter().map(|c| c.direction).collect()
    }

    /// Boundary powers of all channels, in channel order.
    pub fn boundary_powers_w(&self) -> Vec<T> {
        self.channels.iter().map(|c| c.boundary_power_w).collect()
    }

    /// Boundary powers of the pump block only (imposed at z = L).
    pub fn pump_boundaries_w(&self) -> Vec<T> {
        self.pump_range().map(|i| self.channels[i].boundary_power_w).collect()
    }

    /// Boundary powers of the signal block only (imposed at z = 0).
    pub fn signal_boundaries_w(&self) -> Vec<T> {
        self.signal_range().map(|i| self.channels[i].boundary_power_w).collect()
    }

    /// The spatial grid implied by length and step.
    pub fn grid(&self) -> Grid<T> {
        build_grid(self.length_km, self.step_km).expect("scenario length/step validated at construction")
    }
}

/// Dense channel-coupling matrix G, N_ch x N_ch, entries in 1/(W km).
///
/// `G[i][j] > 0` means channel `i` is amplified by channel `j`;
/// `G[i][j] < 0` means channel `i` is depleted by channel `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: RamanScalar> CouplingMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![T::zero(); n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[i * self.n + j] = v;
    }
}

/// Coupling entry for a channel at `f_i` interacting with a channel at `f_j`.
pub(crate) fn coupling_entry<T: RamanScalar>(model: &RamanGainModel<T>, f_i: T, f_j: T) -> T {
    if f_j > f_i {
        model.gain_at(f_j - f_i)
    } else if f_j < f_i {
        let g = model.gain_at(f_i - f_j);
        if model.frequency_scaling() {
            -(f_i / f_j) * g
        } else {
            -g
        }
    } else {
        T::zero()
    }
}

/// Build the Raman coupling matrix of a scenario.
///
/// The diagonal is zero; channel `i` gains from every higher-frequency
/// channel `j` with `g_R(f_j - f_i)` and loses to every lower-frequency one,
/// with the photon-ratio factor `f_i/f_j` applied on the loss side when the
/// gain model has frequency scaling enabled.
pub fn build_coupling_matrix<T: RamanScalar>(scenario: &LinkScenario<T>) -> CouplingMatrix<T> {
    let freqs = scenario.frequencies_thz();
    let model = scenario.gain_model();
    let n = freqs.len();
    let mut g = CouplingMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g.set(i, j, coupling_entry(model, freqs[i], freqs[j]));
            }
        }
    }
    g
}
