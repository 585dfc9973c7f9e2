//! Independent reference solver and profile comparison metrics.
//!
//! The reference path never touches the one-shot propagation kernel: it
//! integrates the full coupled Raman ODE system with fixed-step RK4 and
//! reconciles the pump boundaries by shooting on the unknown pump powers at
//! z = 0. Agreement between the two routes is the crate's primary accuracy
//! check, and the timing difference is what the benchmark CLI measures.

use crate::error::{RamanError, Result};
use crate::link::{build_coupling_matrix, Grid, LinkScenario};
use crate::propagator::PowerProfileMatrix;
use crate::pump_ivp::{solve_pump_only_with_substeps, DEFAULT_SUBSTEPS};
use crate::rk4::Rk4Workspace;
use crate::scalar::{cast, RamanScalar};

/// Damping exponent of the multiplicative shooting update.
const SHOOTING_DAMPING: f64 = 0.5;

/// Default cap on shooting outer iterations.
pub const DEFAULT_MAX_OUTER: usize = 200;

/// Integrate the full coupled system from z = 0 to z = L with fixed-step RK4.
///
/// `z0_values_w` holds every channel's power at z = 0 (signals: their
/// boundary; backward pumps: a guess). Directions keep their signs, so
/// backward pumps grow toward the far end.
pub fn forward_integrate<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    z0_values_w: &[T],
) -> Result<PowerProfileMatrix<T>> {
    forward_integrate_with_substeps(scenario, grid, z0_values_w, DEFAULT_SUBSTEPS)
}

/// As [`forward_integrate`], with explicit RK4 substep control.
pub fn forward_integrate_with_substeps<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    z0_values_w: &[T],
    substeps: usize,
) -> Result<PowerProfileMatrix<T>> {
    let n_ch = scenario.n_channels();
    if z0_values_w.len() != n_ch {
        return Err(RamanError::DimensionMismatch(format!(
            "{} start values for {} channels",
            z0_values_w.len(),
            n_ch
        )));
    }
    if z0_values_w.iter().any(|p| !(*p > T::zero()) || !p.is_finite()) {
        return Err(RamanError::InvalidArgument("z = 0 values must be strictly positive".into()));
    }
    if substeps == 0 {
        return Err(RamanError::InvalidArgument("substep count must be at least 1".into()));
    }

    let coupling = build_coupling_matrix(scenario);
    let alphas = scenario.attenuations_per_km();
    let signs: Vec<T> = scenario.directions().iter().map(|d| d.sign()).collect();

    let rhs = |y: &[T], dy: &mut [T]| {
        for i in 0..n_ch {
            let mut sum = T::zero();
            for j in 0..n_ch {
                sum = sum + coupling.get(i, j) * y[j];
            }
            dy[i] = signs[i] * y[i] * (sum - alphas[i]);
        }
    };

    let points = grid.points();
    let n_pts = points.len();
    let mut out = PowerProfileMatrix::filled(n_ch, n_pts, T::zero());
    let mut y = z0_values_w.to_vec();
    for (i, v) in y.iter().enumerate() {
        out.set(i, 0, *v);
    }
    let mut ws = Rk4Workspace::new(n_ch);
    let substeps_t = T::from_usize(substeps).expect("substep count fits in scalar");
    for m in 1..n_pts {
        let h = (points[m] - points[m - 1]) / substeps_t;
        for _ in 0..substeps {
            ws.step(&mut y, h, &rhs);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(RamanError::IntegrationFailure {
                z_km: points[m].to_f64().unwrap_or(f64::NAN),
                reason: "coupled Raman system produced non-finite power".into(),
            });
        }
        for (i, v) in y.iter().enumerate() {
            out.set(i, m, *v);
        }
    }
    Ok(out)
}

/// Outcome of the shooting solve.
#[derive(Debug, Clone)]
pub struct ShootingReport<T> {
    /// The last integrated profile; `None` when the very first integration
    /// already failed.
    pub profile: Option<PowerProfileMatrix<T>>,
    /// True when every pump boundary residual fell below tolerance.
    pub converged: bool,
    /// Forward integrations performed.
    pub outer_iterations: usize,
    /// Max absolute pump boundary residual (W) after each integration.
    pub residual_history: Vec<T>,
    /// Failure description when not converged.
    pub diagnostic: Option<String>,
}

/// Solve the two-point boundary value problem by shooting on the pump
/// powers at z = 0.
///
/// The initial guess comes from the pump-only backward integration
/// (undepleted approximation). Each outer iteration integrates the full
/// system forward and rescales every pump guess by
/// `(boundary / computed_end)^0.5`; the damped multiplicative update needs
/// no derivatives and keeps guesses positive.
pub fn solve_bvp_shooting<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    tol_w: T,
    max_outer: usize,
) -> ShootingReport<T> {
    let mut report = ShootingReport {
        profile: None,
        converged: false,
        outer_iterations: 0,
        residual_history: Vec::new(),
        diagnostic: None,
    };
    if !(tol_w > T::zero()) || max_outer == 0 {
        report.diagnostic = Some("tolerance must be positive and max_outer at least 1".into());
        return report;
    }

    let pump_range = scenario.pump_range();
    let n_pumps = scenario.n_pumps();
    let true_boundary = scenario.pump_boundaries_w();

    // no pumps: a single forward integration settles it
    if n_pumps == 0 {
        match forward_integrate(scenario, grid, &scenario.boundary_powers_w()) {
            Ok(profile) => {
                report.profile = Some(profile);
                report.converged = true;
                report.outer_iterations = 1;
                report.residual_history.push(T::zero());
            }
            Err(e) => report.diagnostic = Some(e.to_string()),
        }
        return report;
    }

    let mut guess: Vec<T> = match solve_pump_only_with_substeps(scenario, grid, &true_boundary, DEFAULT_SUBSTEPS)
    {
        Ok(rows) => (0..n_pumps).map(|i| rows.get(i, 0)).collect(),
        Err(e) => {
            report.diagnostic = Some(format!("pump-only initial guess failed: {e}"));
            return report;
        }
    };

    let damping = cast::<T>(SHOOTING_DAMPING);
    let mut z0 = scenario.boundary_powers_w();
    for outer in 1..=max_outer {
        for (offset, i) in pump_range.clone().enumerate() {
            z0[i] = guess[offset];
        }
        let profile = match forward_integrate(scenario, grid, &z0) {
            Ok(p) => p,
            Err(e) => {
                report.diagnostic = Some(format!("integration failed on iteration {outer}: {e}"));
                return report;
            }
        };
        report.outer_iterations = outer;

        let mut max_residual = T::zero();
        let mut update_failed = None;
        for (offset, i) in pump_range.clone().enumerate() {
            let end = profile.end_value(i);
            if !(end > T::zero()) || !end.is_finite() {
                update_failed = Some(format!(
                    "pump {offset} reached a non-positive far-end power on iteration {outer}"
                ));
                break;
            }
            let residual = (end - true_boundary[offset]).abs();
            max_residual = max_residual.max(residual);
            guess[offset] = guess[offset] * (true_boundary[offset] / end).powf(damping);
        }
        report.profile = Some(profile);
        if let Some(reason) = update_failed {
            report.diagnostic = Some(reason);
            return report;
        }
        report.residual_history.push(max_residual);
        if max_residual < tol_w {
            report.converged = true;
            return report;
        }
    }
    report.diagnostic = Some(format!("no convergence within {max_outer} outer iterations"));
    report
}

/// Maximum absolute decibel difference between two profiles:
/// `max |10 log10(a/b)|` over all channels and grid points.
///
/// Fails when the shapes differ or any entry is non-positive or non-finite
/// (the numeric analogue of a solver having silently failed).
pub fn max_db_error<T: RamanScalar>(
    a: &PowerProfileMatrix<T>,
    b: &PowerProfileMatrix<T>,
) -> Result<T> {
    if a.n_channels() != b.n_channels() || a.n_points() != b.n_points() {
        return Err(RamanError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.n_channels(),
            a.n_points(),
            b.n_channels(),
            b.n_points()
        )));
    }
    let ten = cast::<T>(10.0);
    let mut max = T::zero();
    for (x, y) in a.values().iter().zip(b.values()) {
        if !(*x > T::zero()) || !(*y > T::zero()) || !x.is_finite() || !y.is_finite() {
            return Err(RamanError::ComparisonInvalid(
                "profiles contain non-positive or non-finite powers".into(),
            ));
        }
        let db = (ten * (*x / *y).log10()).abs();
        max = max.max(db);
    }
    Ok(max)
}
