//! Runtime adaptation of the two parameters that resist a fixed value:
//! the pump scale-down factor and the lower correction factor CL.
//!
//! A CL that is too large makes the DPC stage oscillate instead of
//! converging, with a frequency that grows with CL; a CL that is too small
//! crawls. The detector looks at the first pump's boundary-error trace every
//! `oscillation_check_interval` iterations, counts significant strict peaks
//! in the window since the last adjustment, and divides CL by the peak count
//! when there are too many.
//!
//! Pump power has the same no-single-value problem: scenarios with strong
//! pumps diverge unless the initialization is scaled down harder. The
//! escalation runner tries the ladder of scale-down factors in order and
//! keeps the first run that does not diverge.

use crate::error::Result;
use crate::hybrid::{
    run_hybrid_with_factor, SolverParams, SolverReport, SolverState, SolverStatus,
};
use crate::link::LinkScenario;
use crate::propagator::PowerProfileMatrix;
use crate::scalar::{cast, RamanScalar};

/// All strict local maxima of a series as `(index, value)` pairs.
///
/// Endpoints are never peaks and plateaus produce none (strict inequality on
/// both sides).
pub fn find_peaks<T: RamanScalar>(series: &[T]) -> Vec<(usize, T)> {
    if series.len() < 3 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for j in 1..series.len() - 1 {
        if series[j] > series[j - 1] && series[j] > series[j + 1] {
            peaks.push((j, series[j]));
        }
    }
    peaks
}

/// Check the first pump's error trace for oscillation and reduce CL when it
/// fires: `CL <- CL / (c0 * peaks)` where `peaks` counts strict local maxima
/// above `magnitude_thresh` times the window's largest |error|.
///
/// The window covers iterations after `state.last_change`; on a reduction
/// `last_change` advances to the current iteration, so the same window never
/// triggers twice. Returns the new CL when a reduction happened.
pub fn maybe_reduce_cl<T: RamanScalar>(
    state: &mut SolverState<T>,
    params: &SolverParams<T>,
) -> Option<T> {
    if state.last_change >= state.iteration {
        return None;
    }
    let window: Vec<T> = state.trace[state.last_change..state.iteration]
        .iter()
        .map(|rec| rec.pump_error_w.first().copied().unwrap_or_else(T::zero))
        .collect();
    if window.len() < 3 {
        return None;
    }
    let max_magnitude = window.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if !(max_magnitude > T::zero()) {
        return None;
    }
    let threshold = params.magnitude_thresh * max_magnitude;
    let significant = find_peaks(&window).into_iter().filter(|(_, v)| *v > threshold).count();
    if significant > params.peaks_thresh {
        state.cl_current = state.cl_current / (params.c0 * cast::<T>(significant as f64));
        state.last_change = state.iteration;
        Some(state.cl_current)
    } else {
        None
    }
}

/// Run the hybrid solver, escalating through the pump scale-down ladder on
/// divergence.
///
/// The first non-diverged outcome is returned with its scale-down factor
/// recorded; if every ladder entry diverges, the last report comes back with
/// [`SolverReport::ladder_exhausted`] set. A run is only retried on
/// divergence — oscillating or iteration-capped outcomes are returned as-is.
pub fn run_with_pump_factor_escalation<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    params: &SolverParams<T>,
) -> Result<(PowerProfileMatrix<T>, SolverReport<T>)> {
    params.validate()?;
    let mut last = None;
    for factor in &params.factors_pump {
        let (profile, report) = run_hybrid_with_factor(scenario, params, *factor)?;
        if report.status != SolverStatus::Diverged {
            return Ok((profile, report));
        }
        last = Some((profile, report));
    }
    let (profile, mut report) = last.expect("factors_pump validated non-empty");
    report.ladder_exhausted = true;
    Ok((profile, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{IterationRecord, SolverStage};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn peaks_by_definition() {
        let peaks = find_peaks(&[1.0, 3.0, 1.0, 4.0, 1.0]);
        assert_eq!(peaks, vec![(1, 3.0), (3, 4.0)]);
    }

    #[test]
    fn monotone_series_has_no_peaks() {
        assert!(find_peaks(&[1.0, 2.0, 3.0, 4.0]).is_empty());
    }

    #[test]
    fn plateaus_are_not_peaks() {
        assert!(find_peaks(&[1.0, 2.0, 2.0, 1.0]).is_empty());
    }

    #[test]
    fn short_series_yield_nothing() {
        assert!(find_peaks(&[1.0, 2.0]).is_empty());
        assert!(find_peaks::<f64>(&[]).is_empty());
    }

    fn state_with_errors(errors: &[f64]) -> SolverState<f64> {
        SolverState {
            profile: PowerProfileMatrix::filled(1, 2, 1.0),
            stage: SolverStage::Dpc,
            signal_scaled_up: true,
            pump_boundary_scaled_w: vec![1.0],
            cl_current: 0.1,
            last_change: 0,
            iteration: errors.len(),
            trace: errors
                .iter()
                .enumerate()
                .map(|(k, e)| IterationRecord {
                    iteration: k + 1,
                    stage: SolverStage::Dpc,
                    pump_error_w: vec![*e],
                })
                .collect(),
        }
    }

    #[test]
    fn four_significant_peaks_reduce_cl() {
        let errors = [0.0, 1.0, 0.0, 0.9, 0.0, 1.1, 0.0, 0.8, 0.0];
        let mut state = state_with_errors(&errors);
        let params = SolverParams::default();
        let new_cl = maybe_reduce_cl(&mut state, &params);
        assert_eq!(new_cl, Some(0.1 / 4.0));
        assert_relative_eq!(state.cl_current, 0.025, max_relative = 1e-12);
        assert_eq!(state.last_change, errors.len());
    }

    #[test]
    fn two_peaks_do_not_fire_with_threshold_two() {
        let errors = [0.0, 1.0, 0.0, 0.9, 0.0];
        let mut state = state_with_errors(&errors);
        let params = SolverParams::default();
        assert_eq!(maybe_reduce_cl(&mut state, &params), None);
        assert_eq!(state.cl_current, 0.1);
        assert_eq!(state.last_change, 0);
    }

    #[test]
    fn flat_window_never_fires() {
        let mut state = state_with_errors(&[0.0; 12]);
        let params = SolverParams::default();
        assert_eq!(maybe_reduce_cl(&mut state, &params), None);
    }

    #[test]
    fn insignificant_ripples_filtered_out() {
        // one dominant peak, many tiny ones below 0.3 * max
        let errors = [0.0, 0.01, 0.0, 0.02, 0.0, 1.0, 0.0, 0.015, 0.0, 0.01, 0.0];
        let mut state = state_with_errors(&errors);
        let params = SolverParams::default();
        assert_eq!(maybe_reduce_cl(&mut state, &params), None);
    }

    #[test]
    fn window_excludes_iterations_before_last_change() {
        let errors = [0.0, 1.0, 0.0, 0.9, 0.0, 1.1, 0.0, 0.8, 0.0];
        let mut state = state_with_errors(&errors);
        state.last_change = 6; // only [0.0, 0.8, 0.0] remains
        let params = SolverParams::default();
        assert_eq!(maybe_reduce_cl(&mut state, &params), None);
    }

    proptest! {
        /// Every reported peak index is interior, strictly increasing, and
        /// its value exceeds both neighbors.
        #[test]
        fn peak_structure(series in proptest::collection::vec(-1.0_f64..1.0, 3..64)) {
            let peaks = find_peaks(&series);
            let mut previous = 0usize;
            for (idx, value) in peaks {
                prop_assert!(idx > 0 && idx < series.len() - 1);
                prop_assert!(idx > previous || previous == 0);
                prop_assert!(value > series[idx - 1] && value > series[idx + 1]);
                previous = idx;
            }
        }
    }
}
