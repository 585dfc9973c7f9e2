//! Initial pump-only power profile.
//!
//! With the signals dropped, the backward pumps alone form an initial value
//! problem: each pump's power is known at z = L, and the pump subsystem of
//! the coupled Raman equations can be integrated straight across the span.
//! Substituting s = L - z turns the backward march into a forward one and
//! absorbs the counter-propagation sign, so in s every pump looks like a
//! co-propagating channel:
//!
//! ```text
//! dq_i/ds = q_i * (-alpha_i + sum_j Gpp[i][j] q_j)
//! ```
//!
//! The result seeds the hybrid solver (and the shooting oracle's first
//! guess); it is integrated with fixed-step RK4 using a few substeps per
//! grid interval and then sampled back onto the grid.

use crate::error::{RamanError, Result};
use crate::link::{coupling_entry, Grid, LinkScenario};
use crate::propagator::PowerProfileMatrix;
use crate::rk4::Rk4Workspace;
use crate::scalar::RamanScalar;

/// RK4 substeps per grid interval used by the solver entry points.
pub const DEFAULT_SUBSTEPS: usize = 4;

/// Integrate the pump-only subsystem backward from z = L, where each pump
/// equals its entry in `scaled_pump_boundary_w`.
///
/// Returns a matrix with one row per pump (scenario pump order) sampled at
/// every grid point.
pub fn solve_pump_only<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    scaled_pump_boundary_w: &[T],
) -> Result<PowerProfileMatrix<T>> {
    solve_pump_only_with_substeps(scenario, grid, scaled_pump_boundary_w, DEFAULT_SUBSTEPS)
}

/// As [`solve_pump_only`], with explicit RK4 substep control.
pub fn solve_pump_only_with_substeps<T: RamanScalar>(
    scenario: &LinkScenario<T>,
    grid: &Grid<T>,
    scaled_pump_boundary_w: &[T],
    substeps: usize,
) -> Result<PowerProfileMatrix<T>> {
    let n_pumps = scenario.n_pumps();
    if n_pumps == 0 {
        return Err(RamanError::InvalidArgument("scenario has no pump channels".into()));
    }
    if scaled_pump_boundary_w.len() != n_pumps {
        return Err(RamanError::DimensionMismatch(format!(
            "{} boundary values for {} pumps",
            scaled_pump_boundary_w.len(),
            n_pumps
        )));
    }
    if scaled_pump_boundary_w.iter().any(|p| !(*p > T::zero()) || !p.is_finite()) {
        return Err(RamanError::InvalidArgument("pump boundary powers must be positive".into()));
    }
    if substeps == 0 {
        return Err(RamanError::InvalidArgument("substep count must be at least 1".into()));
    }

    let pump_range = scenario.pump_range();
    let freqs: Vec<T> =
        pump_range.clone().map(|i| scenario.channels()[i].center_frequency_thz).collect();
    let alphas: Vec<T> =
        pump_range.clone().map(|i| scenario.channels()[i].attenuation_per_km).collect();
    let model = scenario.gain_model();

    // pump-pump coupling submatrix
    let mut gpp = vec![T::zero(); n_pumps * n_pumps];
    for i in 0..n_pumps {
        for j in 0..n_pumps {
            if i != j {
                gpp[i * n_pumps + j] = coupling_entry(model, freqs[i], freqs[j]);
            }
        }
    }

    let rhs = |q: &[T], dq: &mut [T]| {
        for i in 0..n_pumps {
            let mut coupling = T::zero();
            for j in 0..n_pumps {
                coupling = coupling + gpp[i * n_pumps + j] * q[j];
            }
            dq[i] = q[i] * (coupling - alphas[i]);
        }
    };

    let points = grid.points();
    let n_pts = points.len();
    let mut out = PowerProfileMatrix::filled(n_pumps, n_pts, T::zero());
    let mut q = scaled_pump_boundary_w.to_vec();
    for (i, value) in q.iter().enumerate() {
        out.set(i, n_pts - 1, *value); // boundary exact at z = L
    }

    let mut ws = Rk4Workspace::new(n_pumps);
    let substeps_t = T::from_usize(substeps).expect("substep count fits in scalar");
    // march in s = L - z: grid intervals traversed from the far end
    for m in (1..n_pts).rev() {
        let width = points[m] - points[m - 1];
        let h = width / substeps_t;
        for _ in 0..substeps {
            ws.step(&mut q, h, &rhs);
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(RamanError::Divergence(format!(
                "pump-only integration produced non-finite power near z = {} km \
                 (pump powers too high even for initialization)",
                points[m - 1]
            )));
        }
        for (i, value) in q.iter().enumerate() {
            out.set(i, m - 1, *value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::{build_coupling_matrix, ChannelSpec, LinkScenario, RamanGainModel};
    use crate::propagator::{propagate, trapezoid_operator};
    use crate::scenarios::{make_cl_scenario, SignalPowerSpec};
    use approx::assert_relative_eq;

    fn pump_scenario(gain: RamanGainModel<f64>, pumps: &[(f64, f64)]) -> LinkScenario<f64> {
        let mut channels = vec![ChannelSpec::forward_signal(186.0, 0.046, 1e-3)];
        channels.extend(pumps.iter().map(|(f, p)| ChannelSpec::backward_pump(*f, 0.046, *p)));
        LinkScenario::new(channels, 100.0, 0.1, gain).unwrap()
    }

    #[test]
    fn single_pump_matches_attenuation_closed_form() {
        let sc = pump_scenario(RamanGainModel::default_triangular(), &[(210.0, 0.36)]);
        let grid = sc.grid();
        let rows = solve_pump_only(&sc, &grid, &[0.36]).unwrap();
        // only one pump: no pump-pump coupling, pure attenuation
        for (k, z) in grid.points().iter().enumerate() {
            let exact = 0.36 * (-0.046 * (100.0 - z)).exp();
            assert_relative_eq!(rows.get(0, k), exact, max_relative = 1e-10);
        }
        assert_relative_eq!(rows.get(0, 0), 0.36 * (-4.6_f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn zero_gain_pumps_decouple() {
        let sc = pump_scenario(RamanGainModel::zero(), &[(205.0, 0.2), (210.0, 0.3)]);
        let grid = sc.grid();
        let rows = solve_pump_only(&sc, &grid, &[0.2, 0.3]).unwrap();
        for (k, z) in grid.points().iter().enumerate() {
            assert_relative_eq!(rows.get(0, k), 0.2 * (-0.046 * (100.0 - z)).exp(), max_relative = 1e-10);
            assert_relative_eq!(rows.get(1, k), 0.3 * (-0.046 * (100.0 - z)).exp(), max_relative = 1e-10);
        }
    }

    #[test]
    fn boundary_values_exact_at_far_end() {
        let sc = pump_scenario(
            RamanGainModel::default_triangular(),
            &[(200.55, 0.18), (204.51, 0.13), (210.56, 0.36)],
        );
        let grid = sc.grid();
        let boundary = [0.18, 0.13, 0.36];
        let rows = solve_pump_only(&sc, &grid, &boundary).unwrap();
        let last = grid.points().len() - 1;
        for (i, b) in boundary.iter().enumerate() {
            assert_eq!(rows.get(i, last), *b);
        }
    }

    #[test]
    fn reference_substep_self_convergence() {
        // the five C+L pumps against a 4x finer integration
        let sc = make_cl_scenario::<f64>(&SignalPowerSpec::Uniform { dbm: 0.0 }, 1.0).unwrap();
        let grid = sc.grid();
        let boundary = sc.pump_boundaries_w();
        let coarse = solve_pump_only_with_substeps(&sc, &grid, &boundary, 4).unwrap();
        let fine = solve_pump_only_with_substeps(&sc, &grid, &boundary, 16).unwrap();
        let mut max_rel = 0.0_f64;
        for i in 0..5 {
            for k in 0..grid.points().len() {
                let rel = ((coarse.get(i, k) - fine.get(i, k)) / fine.get(i, k)).abs();
                max_rel = max_rel.max(rel);
            }
        }
        assert!(max_rel < 1e-6, "substep refinement changed the profile by {max_rel}");
    }

    #[test]
    fn photon_flux_decays_from_injection_end() {
        let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm: 0.0 }, 1.0).unwrap();
        let grid = sc.grid();
        let rows = solve_pump_only(&sc, &grid, &sc.pump_boundaries_w()).unwrap();
        let freqs: Vec<f64> =
            sc.pump_range().map(|i| sc.channels()[i].center_frequency_thz).collect();
        // photon-number flux sum(P_i / f_i) at each z; the Raman exchange
        // conserves it (frequency scaling on), attenuation only removes it,
        // so it shrinks monotonically moving away from z = L
        let flux = |k: usize| -> f64 { (0..5).map(|i| rows.get(i, k) / freqs[i]).sum() };
        let n = grid.points().len();
        for k in (1..n).rev() {
            assert!(flux(k) > flux(k - 1), "flux not decreasing at column {k}");
        }
    }

    #[test]
    fn near_fixed_point_of_propagation() {
        // pump-only solution plus negligible signals should pass through the
        // one-shot propagation almost unchanged
        let sc = make_cl_scenario::<f64>(&SignalPowerSpec::Uniform { dbm: -100.0 }, 1.0).unwrap();
        let grid = sc.grid();
        let op = trapezoid_operator(&grid);
        let coupling = build_coupling_matrix(&sc);
        let pumps = solve_pump_only(&sc, &grid, &sc.pump_boundaries_w()).unwrap();

        let n_pts = grid.points().len();
        let mut p = PowerProfileMatrix::filled(sc.n_channels(), n_pts, 0.0);
        for (idx, i) in sc.signal_range().enumerate() {
            let anchor = sc.signal_boundaries_w()[idx];
            let alpha = sc.channels()[i].attenuation_per_km;
            for (k, z) in grid.points().iter().enumerate() {
                p.set(i, k, anchor * (-alpha * z).exp());
            }
        }
        for (idx, i) in sc.pump_range().enumerate() {
            for k in 0..n_pts {
                p.set(i, k, pumps.get(idx, k));
            }
        }
        let after = propagate(
            &p,
            &coupling,
            &sc.attenuations_per_km(),
            &sc.directions(),
            &grid,
            &op,
        )
        .unwrap();
        let mut max_rel = 0.0_f64;
        for (idx, i) in sc.pump_range().enumerate() {
            let _ = idx;
            for k in 0..n_pts {
                let rel = ((after.get(i, k) - p.get(i, k)) / p.get(i, k)).abs();
                max_rel = max_rel.max(rel);
            }
        }
        // residual movement is the trapezoid-vs-RK4 quadrature difference,
        // O(dz^2); observed ~2.3e-5 at dz = 0.1 km
        assert!(max_rel < 5e-5, "pump rows moved by {max_rel} under propagation");
    }

    #[test]
    fn input_validation() {
        let sc = pump_scenario(RamanGainModel::default_triangular(), &[(210.0, 0.36)]);
        let grid = sc.grid();
        assert!(solve_pump_only(&sc, &grid, &[]).is_err());
        assert!(solve_pump_only(&sc, &grid, &[0.0]).is_err());
        assert!(solve_pump_only_with_substeps(&sc, &grid, &[0.1], 0).is_err());
    }
}
