//! Steady-state power profiles of backward-Raman-amplified WDM spans.
//!
//! Signals impose their launch power at the near end of the fiber while
//! counter-propagating pumps impose theirs at the far end, so the coupled
//! Raman equations form a two-point boundary value problem. Instead of
//! integrating along the fiber axis, this crate iterates the integral form
//! of the equations: the whole channels-by-grid profile matrix is rebuilt in
//! one shot from its z = 0 anchors through a cumulative trapezoid operator
//! ([`propagator`]), and a two-stage hybrid scheme ([`hybrid`]) walks the
//! pump rows onto their far-end boundary, with runtime adaptation of the
//! correction factor and the initial pump scale-down ([`adaptive`]).
//!
//! An independent fixed-step RK4 shooting solver ([`oracle`]) provides the
//! reference profiles used for accuracy and speed comparisons.
//!
//! All numeric code is generic over the scalar type via [`RamanScalar`]
//! (`f32` or `f64`); the aliases at the crate root pin the common
//! double-precision configuration.
//!
//! ```
//! use raman_solver::{
//!     run_hybrid, ChannelSpec, LinkScenario, RamanGainModel, SolverParams, SolverStatus,
//! };
//!
//! let scenario: LinkScenario<f64> = LinkScenario::new(
//!     vec![
//!         ChannelSpec::forward_signal(190.0, 0.046, 1e-3),
//!         ChannelSpec::forward_signal(192.0, 0.046, 1e-3),
//!         ChannelSpec::backward_pump(203.0, 0.05, 0.15),
//!     ],
//!     40.0, // km
//!     0.5,  // km grid step
//!     RamanGainModel::default_triangular(),
//! )?;
//! let (profile, report) = run_hybrid(&scenario, &SolverParams::default())?;
//! assert_eq!(report.status, SolverStatus::Converged);
//! // far-end pump power matches its boundary within tolerance
//! assert!((profile.end_value(2) - 0.15).abs() < 1e-5);
//! # Ok::<(), raman_solver::RamanError>(())
//! ```

pub mod adaptive;
pub mod error;
pub mod hybrid;
pub mod link;
pub mod oracle;
pub mod propagator;
pub mod pump_ivp;
mod rk4;
mod scalar;
pub mod scenario_file;
pub mod scenarios;
pub mod units;

pub use adaptive::{find_peaks, maybe_reduce_cl, run_with_pump_factor_escalation};
pub use error::{RamanError, Result};
pub use hybrid::{
    correct_pumps_to_boundary, dpc_correction, initialize_state, pump_error, run_hybrid,
    run_hybrid_with_factor, IterationRecord, SolverParams, SolverReport, SolverStage, SolverState,
    SolverStatus,
};
pub use link::{
    build_coupling_matrix, build_grid, BoundaryEnd, ChannelSpec, CouplingMatrix, Direction, Grid,
    LinkScenario, RamanGainModel,
};
pub use oracle::{forward_integrate, max_db_error, solve_bvp_shooting, ShootingReport};
pub use propagator::{propagate, trapezoid_operator, PowerProfileMatrix, TrapezoidOperator};
pub use pump_ivp::solve_pump_only;
pub use scalar::RamanScalar;
pub use scenario_file::ScenarioSpec;
pub use scenarios::{make_cl_scenario, make_cls_scenario, SignalPowerSpec};
pub use units::{db_per_km_to_linear, db_to_linear, dbm_to_watt, watt_to_dbm};

/// Double-precision scenario description.
pub type LinkScenario64 = LinkScenario<f64>;
/// Double-precision profile matrix.
pub type PowerProfileMatrix64 = PowerProfileMatrix<f64>;
/// Double-precision solver parameters.
pub type SolverParams64 = SolverParams<f64>;
/// Double-precision solver report.
pub type SolverReport64 = SolverReport<f64>;
