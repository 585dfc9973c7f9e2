//! Two-stage hybrid fixed-point solver.
//!
//! The boundary conditions sit at opposite fiber ends: signals impose their
//! power at z = 0, backward pumps at z = L. The solver iterates the one-shot
//! propagation kernel and steers the pump rows toward their far-end boundary
//! in three phases:
//!
//! 1. **Signal scale-up** — start from signals scaled down by
//!    `factor_signal` under pure attenuation (nearly undepleted pumps) and
//!    raise the signal anchors a few dB per iteration until they reach their
//!    true boundary, rescaling the pumps to their (scaled) far-end boundary
//!    after every pass.
//! 2. **Pump scale-up** — restore the pumps to their true boundary in dB
//!    steps, again with a boundary rescale each iteration.
//! 3. **Dynamic pump calibration (DPC)** — multiplicatively correct each pump
//!    row in proportion to its normalized boundary error until the largest
//!    error falls below tolerance. Under-calculated pumps (positive error)
//!    use the gentle factor CL, over-calculated ones the aggressive CH.
//!
//! Moving through a family of nearby converged systems is what keeps the
//! plain fixed-point iteration from blowing up at high pump powers; when it
//! still diverges, the escalation ladder in [`crate::adaptive`] retries with
//! a stronger initial pump scale-down.
//!
//! One iteration = one propagation call, in every stage. All failures are
//! encoded in [`SolverReport::status`]; the solver only returns `Err` for
//! invalid parameters.

use std::time::Instant;

use crate::adaptive::maybe_reduce_cl;
use crate::error::{RamanError, Result};
use crate::link::{build_coupling_matrix, Grid, LinkScenario};
use crate::propagator::{propagate, trapezoid_operator, PowerProfileMatrix};
use crate::pump_ivp::solve_pump_only;
use crate::scalar::{cast, RamanScalar};
use crate::units::db_to_linear;

/// Smallest multiplier a DPC correction may apply; keeps rows positive when
/// `CH * |error| / boundary` exceeds one early in the iteration.
const MIN_DPC_MULTIPLIER: f64 = 1e-3;

/// Outcome classification of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    /// Largest pump boundary error below tolerance, profile finite.
    Converged,
    /// Non-finite power appeared during iteration.
    Diverged,
    /// Iteration cap reached after the oscillation detector had fired.
    Oscillating,
    /// Iteration cap reached without detected oscillation.
    IterationCapped,
}

impl SolverStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::Diverged => "diverged",
            SolverStatus::Oscillating => "oscillating",
            SolverStatus::IterationCapped => "iteration_capped",
        }
    }
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Phase of the hybrid scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStage {
    SignalScaleUp,
    PumpScaleUp,
    Dpc,
}

impl SolverStage {
    pub fn label(self) -> &'static str {
        match self {
            SolverStage::SignalScaleUp => "signal_scale_up",
            SolverStage::PumpScaleUp => "pump_scale_up",
            SolverStage::Dpc => "dpc",
        }
    }
}

/// Tunables of the hybrid solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams<T> {
    /// Correction factor for over-calculated pumps.
    pub ch: T,
    /// Initial correction factor for under-calculated pumps; reduced at
    /// runtime when oscillation is detected.
    pub cl_initial: T,
    /// Signal scale-up step, dB per iteration.
    pub step_dbm_signal: T,
    /// Pump scale-up step, dB per iteration.
    pub step_dbm_pump: T,
    /// Linear divisor applied to the signal launch powers at initialization.
    pub factor_signal: T,
    /// Escalation ladder of linear pump scale-down divisors, tried in order.
    pub factors_pump: Vec<T>,
    /// Pump boundary tolerance in watts.
    pub tol_w: T,
    /// Iteration cap (propagation calls) per run.
    pub max_iterations: usize,
    /// Oscillation is checked whenever the iteration count is a multiple of
    /// this interval.
    pub oscillation_check_interval: usize,
    /// Peaks smaller than this fraction of the window's largest |error| are
    /// ignored by the oscillation detector.
    pub magnitude_thresh: T,
    /// The detector fires when more than this many significant peaks remain.
    pub peaks_thresh: usize,
    /// Sensitivity constant of the CL reduction.
    pub c0: T,
}

impl<T: RamanScalar> Default for SolverParams<T> {
    fn default() -> Self {
        Self {
            ch: cast(3.0),
            cl_initial: cast(0.1),
            step_dbm_signal: cast(2.0),
            step_dbm_pump: cast(0.5),
            factor_signal: cast(4.0),
            factors_pump: vec![cast(1.0), cast(5.0), cast(10.0), cast(15.0)],
            tol_w: cast(1e-5),
            max_iterations: 3000,
            oscillation_check_interval: 100,
            magnitude_thresh: cast(0.3),
            peaks_thresh: 2,
            c0: cast(1.0),
        }
    }
}

impl<T: RamanScalar> SolverParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.ch, "ch"),
            (self.cl_initial, "cl_initial"),
            (self.step_dbm_signal, "step_dbm_signal"),
            (self.step_dbm_pump, "step_dbm_pump"),
            (self.factor_signal, "factor_signal"),
            (self.tol_w, "tol_w"),
            (self.magnitude_thresh, "magnitude_thresh"),
            (self.c0, "c0"),
        ];
        for (v, name) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(RamanError::InvalidArgument(format!(
                    "solver parameter {name} must be positive, got {v}"
                )));
            }
        }
        if self.factors_pump.is_empty() || self.factors_pump[0] != T::one() {
            return Err(RamanError::InvalidArgument(
                "factors_pump must be non-empty and start at 1".into(),
            ));
        }
        for w in self.factors_pump.windows(2) {
            if !(w[1] > w[0]) {
                return Err(RamanError::InvalidArgument(
                    "factors_pump must be strictly increasing".into(),
                ));
            }
        }
        if self.max_iterations == 0 || self.oscillation_check_interval == 0 || self.peaks_thresh == 0
        {
            return Err(RamanError::InvalidArgument(
                "max_iterations, oscillation_check_interval and peaks_thresh must be at least 1"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Per-iteration trace entry.
#[derive(Debug, Clone)]
pub struct IterationRecord<T> {
    /// 1-based iteration (propagation) count.
    pub iteration: usize,
    /// Stage that performed this propagation.
    pub stage: SolverStage,
    /// Pump boundary errors (true boundary minus far-end value) after the
    /// propagation, in watts.
    pub pump_error_w: Vec<T>,
}

/// Mutable state of one hybrid run.
#[derive(Debug, Clone)]
pub struct SolverState<T> {
    pub profile: PowerProfileMatrix<T>,
    pub stage: SolverStage,
    pub signal_scaled_up: bool,
    /// Current (scaled) pump boundary each pump is corrected to.
    pub pump_boundary_scaled_w: Vec<T>,
    /// Current lower correction factor.
    pub cl_current: T,
    /// Iteration index after which the oscillation window starts; advanced on
    /// every CL reduction (and at DPC entry, where monitoring begins).
    pub last_change: usize,
    /// Propagation calls performed so far.
    pub iteration: usize,
    pub trace: Vec<IterationRecord<T>>,
}

/// Summary of a finished run.
#[derive(Debug, Clone)]
pub struct SolverReport<T> {
    pub status: SolverStatus,
    pub iterations: usize,
    /// Pump boundary errors of the final profile, in watts.
    pub final_pump_error_w: Vec<T>,
    /// Pump scale-down divisor the run was started with.
    pub pump_factor_used: T,
    /// `(iteration, new CL)` for every oscillation-triggered reduction.
    pub cl_history: Vec<(usize, T)>,
    pub wall_time_seconds: f64,
    /// Set by the escalation runner when every ladder entry diverged.
    pub ladder_exhausted: bool,
    /// Pump boundary errors after every propagation, by stage.
    pub trace: Vec<IterationRecord<T>>,
}

/// Build the starting state: signals scaled down by `factor_signal` under
/// pure attenuation, pumps from the pump-only initial value problem with
/// boundaries divided by `factor_pump`.
pub fn initialize_state<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    params: &SolverParams<T>,
    factor_pump: T,
) -> Result<SolverState<T>> {
    params.validate()?;
    if !(factor_pump >= T::one()) {
        return Err(RamanError::InvalidArgument(format!(
            "factor_pump must be at least 1, got {factor_pump}"
        )));
    }
    let n_pts = grid.points().len();
    let mut profile = PowerProfileMatrix::filled(scenario.n_channels(), n_pts, T::zero());

    for i in scenario.signal_range() {
        let ch = &scenario.channels()[i];
        let anchor = ch.boundary_power_w / params.factor_signal;
        let alpha = ch.attenuation_per_km;
        let row = profile.row_mut(i);
        for (k, z) in grid.points().iter().enumerate() {
            row[k] = anchor * (-alpha * *z).exp();
        }
    }

    let scaled_boundary: Vec<T> =
        scenario.pump_boundaries_w().iter().map(|b| *b / factor_pump).collect();
    if scenario.n_pumps() > 0 {
        let pump_rows = solve_pump_only(scenario, grid, &scaled_boundary)?;
        for (offset, i) in scenario.pump_range().enumerate() {
            for k in 0..n_pts {
                profile.set(i, k, pump_rows.get(offset, k));
            }
        }
    }

    Ok(SolverState {
        profile,
        stage: SolverStage::SignalScaleUp,
        signal_scaled_up: false,
        pump_boundary_scaled_w: scaled_boundary,
        cl_current: params.cl_initial,
        last_change: 0,
        iteration: 0,
        trace: Vec::new(),
    })
}

/// Rescale every pump row so its z = L value matches the scaled boundary
/// exactly. Fails when a far-end value is zero or non-finite, which signals
/// divergence to the caller.
pub fn correct_pumps_to_boundary<T: RamanScalar>(
    profile: &mut PowerProfileMatrix<T>,
    pump_rows: std::ops::Range<usize>,
    scaled_boundary_w: &[T],
) -> Result<()> {
    let last = profile.n_points() - 1;
    for (offset, i) in pump_rows.enumerate() {
        let end = profile.get(i, last);
        if !(end > T::zero()) || !end.is_finite() {
            return Err(RamanError::Divergence(format!(
                "pump {offset} far-end power is {end}; cannot rescale to boundary"
            )));
        }
        let ratio = scaled_boundary_w[offset] / end;
        profile.scale_row(i, ratio);
        profile.set(i, last, scaled_boundary_w[offset]);
    }
    Ok(())
}

/// Pump boundary error: true boundary minus the computed z = L value.
/// Positive means the pump came out low (under-calculated).
pub fn pump_error<T: RamanScalar>(
    profile: &PowerProfileMatrix<T>,
    pump_rows: std::ops::Range<usize>,
    true_boundary_w: &[T],
) -> Vec<T> {
    pump_rows
        .enumerate()
        .map(|(offset, i)| true_boundary_w[offset] - profile.end_value(i))
        .collect()
}

/// Multiplicative DPC update: pump row i is scaled by
/// `1 + k * error_i / boundary_i` with `k = CL` for under-calculation and
/// `k = CH` for over-calculation, floored at a small positive value.
pub fn dpc_correction<T: RamanScalar>(
    profile: &mut PowerProfileMatrix<T>,
    pump_rows: std::ops::Range<usize>,
    error_w: &[T],
    true_boundary_w: &[T],
    cl: T,
    ch: T,
) {
    let floor = cast::<T>(MIN_DPC_MULTIPLIER);
    for (offset, i) in pump_rows.enumerate() {
        let err = error_w[offset];
        let k = if err > T::zero() { cl } else { ch };
        let multiplier = (T::one() + k * err / true_boundary_w[offset]).max(floor);
        if multiplier != T::one() {
            profile.scale_row(i, multiplier);
        }
    }
}

fn max_abs<T: RamanScalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Run the hybrid solver with the first (weakest) pump scale-down of the
/// ladder. Numerical failures are reported through the status, never raised.
pub fn run_hybrid<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    params: &SolverParams<T>,
) -> Result<(PowerProfileMatrix<T>, SolverReport<T>)> {
    params.validate()?;
    run_hybrid_with_factor(scenario, params, params.factors_pump[0])
}

/// Run the hybrid solver with an explicit pump scale-down divisor.
pub fn run_hybrid_with_factor<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    params: &SolverParams<T>,
    factor_pump: T,
) -> Result<(PowerProfileMatrix<T>, SolverReport<T>)> {
    let started = Instant::now();
    let grid = scenario.grid();
    let coupling = build_coupling_matrix(scenario);
    let operator = trapezoid_operator(&grid);
    let alphas = scenario.attenuations_per_km();
    let directions = scenario.directions();
    let signal_range = scenario.signal_range();
    let pump_range = scenario.pump_range();
    let true_boundary = scenario.pump_boundaries_w();
    let signal_targets = scenario.signal_boundaries_w();
    let signal_step = db_to_linear(params.step_dbm_signal);
    let pump_step = db_to_linear(params.step_dbm_pump);

    let mut state = match initialize_state(scenario, &grid, params, factor_pump) {
        Ok(s) => s,
        Err(RamanError::Divergence(_)) => {
            // pump powers too high even for the pump-only initializer
            let mut profile =
                PowerProfileMatrix::filled(scenario.n_channels(), grid.points().len(), T::nan());
            for i in signal_range.clone() {
                let ch = &scenario.channels()[i];
                let anchor = ch.boundary_power_w / params.factor_signal;
                for (k, z) in grid.points().iter().enumerate() {
                    profile.set(i, k, anchor * (-ch.attenuation_per_km * *z).exp());
                }
            }
            let report = SolverReport {
                status: SolverStatus::Diverged,
                iterations: 0,
                final_pump_error_w: pump_error(&profile, pump_range, &true_boundary),
                pump_factor_used: factor_pump,
                cl_history: Vec::new(),
                wall_time_seconds: started.elapsed().as_secs_f64(),
                ladder_exhausted: false,
                trace: Vec::new(),
            };
            return Ok((profile, report));
        }
        Err(e) => return Err(e),
    };
    let mut cl_history: Vec<(usize, T)> = Vec::new();

    // one propagation per iteration, shared by all stages
    macro_rules! step_propagate {
        () => {{
            match propagate(&state.profile, &coupling, &alphas, &directions, &grid, &operator) {
                Ok(next) => {
                    state.profile = next;
                    state.iteration += 1;
                    state.trace.push(IterationRecord {
                        iteration: state.iteration,
                        stage: state.stage,
                        pump_error_w: pump_error(&state.profile, pump_range.clone(), &true_boundary),
                    });
                    state.profile.is_all_finite()
                }
                Err(_) => false,
            }
        }};
    }

    let status = loop {
        if state.iteration >= params.max_iterations {
            break if cl_history.is_empty() {
                SolverStatus::IterationCapped
            } else {
                SolverStatus::Oscillating
            };
        }
        match state.stage {
            SolverStage::SignalScaleUp => {
                if correct_pumps_to_boundary(
                    &mut state.profile,
                    pump_range.clone(),
                    &state.pump_boundary_scaled_w,
                )
                .is_err()
                {
                    break SolverStatus::Diverged;
                }
                for (offset, i) in signal_range.clone().enumerate() {
                    let anchor = state.profile.anchor(i);
                    let target = signal_targets[offset];
                    if anchor < target {
                        let remaining = target / anchor;
                        if signal_step >= remaining {
                            state.profile.scale_row(i, remaining);
                            state.profile.set(i, 0, target);
                        } else {
                            state.profile.scale_row(i, signal_step);
                        }
                    }
                }
                if !step_propagate!() {
                    break SolverStatus::Diverged;
                }
                let at_target = signal_range
                    .clone()
                    .enumerate()
                    .all(|(offset, i)| state.profile.anchor(i) == signal_targets[offset]);
                if at_target {
                    state.signal_scaled_up = true;
                    state.stage = SolverStage::PumpScaleUp;
                }
            }
            SolverStage::PumpScaleUp => {
                if correct_pumps_to_boundary(
                    &mut state.profile,
                    pump_range.clone(),
                    &state.pump_boundary_scaled_w,
                )
                .is_err()
                {
                    break SolverStatus::Diverged;
                }
                let boundary_met = pump_error(&state.profile, pump_range.clone(), &true_boundary)
                    .iter()
                    .all(|e| e.abs() <= params.tol_w);
                if boundary_met {
                    // hand the scale-up result to DPC unmodified
                    if !step_propagate!() {
                        break SolverStatus::Diverged;
                    }
                    state.stage = SolverStage::Dpc;
                    state.last_change = state.iteration;
                } else {
                    for (offset, i) in pump_range.clone().enumerate() {
                        let current = state.pump_boundary_scaled_w[offset];
                        let target = true_boundary[offset];
                        if current < target {
                            let remaining = target / current;
                            if pump_step >= remaining {
                                state.profile.scale_row(i, remaining);
                                state.pump_boundary_scaled_w[offset] = target;
                            } else {
                                state.profile.scale_row(i, pump_step);
                                state.pump_boundary_scaled_w[offset] = current * pump_step;
                            }
                        }
                    }
                    if !step_propagate!() {
                        break SolverStatus::Diverged;
                    }
                }
            }
            SolverStage::Dpc => {
                let error = pump_error(&state.profile, pump_range.clone(), &true_boundary);
                if max_abs(&error) < params.tol_w {
                    break SolverStatus::Converged;
                }
                dpc_correction(
                    &mut state.profile,
                    pump_range.clone(),
                    &error,
                    &true_boundary,
                    state.cl_current,
                    params.ch,
                );
                if !step_propagate!() {
                    break SolverStatus::Diverged;
                }
                if state.iteration % params.oscillation_check_interval == 0 {
                    if let Some(new_cl) = maybe_reduce_cl(&mut state, params) {
                        cl_history.push((state.iteration, new_cl));
                    }
                }
            }
        }
    };

    let final_pump_error_w = pump_error(&state.profile, pump_range, &true_boundary);
    let report = SolverReport {
        status,
        iterations: state.iteration,
        final_pump_error_w,
        pump_factor_used: factor_pump,
        cl_history,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        ladder_exhausted: false,
        trace: state.trace,
    };
    Ok((state.profile, report))
}
