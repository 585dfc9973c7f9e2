//! Scratch exploration harness (not part of the deliverable test suite).

use raman_solver::*;
use std::time::Instant;

#[test]
#[ignore]
fn probe_cl_uniform_grid() {
    for dbm in [-5.0, 0.0, 5.0, 10.0] {
        for adj in [1.0, 0.7, 0.4, 0.3, 0.2, 0.1] {
            let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm }, adj).unwrap();
            let params = SolverParams::default();
            let t = Instant::now();
            let (_, rep) = run_with_pump_factor_escalation(&sc, &params).unwrap();
            println!(
                "dbm={dbm:>5} adj={adj:>4} -> {:>16} iters={:>5} factor={} exhausted={} cl_hist={:?} [{:.2}s]",
                rep.status.label(),
                rep.iterations,
                rep.pump_factor_used,
                rep.ladder_exhausted,
                rep.cl_history,
                t.elapsed().as_secs_f64()
            );
        }
    }
}

#[test]
#[ignore]
fn probe_single_factor_outcomes() {
    for dbm in [-5.0, 0.0, 5.0, 10.0] {
        for adj in [1.0, 0.7, 0.4, 0.3, 0.2, 0.1] {
            let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm }, adj).unwrap();
            let params = SolverParams::default();
            let (_, rep) = run_hybrid(&sc, &params).unwrap();
            println!(
                "factor=1 dbm={dbm:>5} adj={adj:>4} -> {:>16} iters={:>5}",
                rep.status.label(),
                rep.iterations,
            );
        }
    }
}

#[test]
#[ignore]
fn probe_cl_high_cl_oscillation() {
    for cl in [0.3, 0.5, 0.8] {
        let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm: 0.0 }, 1.0).unwrap();
        let mut params = SolverParams::default();
        params.cl_initial = cl;
        let (_, rep) = run_hybrid(&sc, &params).unwrap();
        println!(
            "cl={cl} -> {} iters={} cl_history={:?}",
            rep.status.label(),
            rep.iterations,
            rep.cl_history
        );
    }
}

#[test]
#[ignore]
fn probe_oracle_agreement_and_timing() {
    let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm: 0.0 }, 1.0).unwrap();
    let grid = sc.grid();
    let params = SolverParams::default();

    let t = Instant::now();
    let (hybrid_profile, rep) = run_with_pump_factor_escalation(&sc, &params).unwrap();
    let hybrid_s = t.elapsed().as_secs_f64();
    println!("hybrid: {} iters={} in {:.3}s", rep.status.label(), rep.iterations, hybrid_s);

    let t = Instant::now();
    let shot = solve_bvp_shooting(&sc, &grid, params.tol_w, 200);
    let oracle_s = t.elapsed().as_secs_f64();
    println!(
        "oracle: converged={} outer={} in {:.3}s residuals(last5)={:?}",
        shot.converged,
        shot.outer_iterations,
        oracle_s,
        &shot.residual_history[shot.residual_history.len().saturating_sub(5)..]
    );
    if let Some(oracle_profile) = &shot.profile {
        let err = max_db_error(&hybrid_profile, oracle_profile).unwrap();
        println!("max_db_error = {err:.6} dB, time gain = {:.1}", oracle_s / hybrid_s);
    }
    let monotone = shot.residual_history.windows(2).all(|w| w[1] < w[0]);
    println!("oracle residual monotone: {monotone}");
}

#[test]
#[ignore]
fn probe_ladder_rescue() {
    // looking for: factor 1 diverges, some later rung converges
    for adj in [0.45, 0.4, 0.35, 0.3, 0.25, 0.2] {
        let sc = make_cl_scenario(&SignalPowerSpec::Uniform { dbm: 0.0 }, adj).unwrap();
        let params = SolverParams::default();
        let mut line = format!("adj={adj:>5}:");
        for factor in [1.0, 5.0, 10.0, 15.0] {
            let (_, rep) = run_hybrid_with_factor(&sc, &params, factor).unwrap();
            line.push_str(&format!(
                " f{factor}={}({})",
                rep.status.label().chars().next().unwrap(),
                rep.iterations
            ));
        }
        println!("{line}");
    }
}

#[test]
#[ignore]
fn probe_nonuniform_and_cls() {
    let tilt = SignalPowerSpec::Tilt { mean_dbm: 0.0, tilt_db: 3.0 };
    for (name, sc) in [
        ("C+L tilt", make_cl_scenario(&tilt, 1.0).unwrap()),
        ("C+L+S tilt k=1", make_cls_scenario(&tilt, 1.0, 1.0).unwrap()),
        ("C+L+S tilt k=2", make_cls_scenario(&tilt, 1.0, 2.0).unwrap()),
    ] {
        let params = SolverParams::default();
        let t = Instant::now();
        let (profile, rep) = run_with_pump_factor_escalation(&sc, &params).unwrap();
        let hybrid_s = t.elapsed().as_secs_f64();
        let grid = sc.grid();
        let t = Instant::now();
        let shot = solve_bvp_shooting(&sc, &grid, params.tol_w, 200);
        let oracle_s = t.elapsed().as_secs_f64();
        let err = shot
            .profile
            .as_ref()
            .map(|p| max_db_error(&profile, p).map(|e| format!("{e:.5} dB")).unwrap_or("invalid".into()))
            .unwrap_or("none".into());
        println!(
            "{name}: hybrid {}({}) {:.3}s | oracle conv={} {:.3}s | err={} gain={:.1}",
            rep.status.label(),
            rep.iterations,
            hybrid_s,
            shot.converged,
            oracle_s,
            err,
            oracle_s / hybrid_s
        );
    }
}

#[test]
#[ignore]
fn probe_dpc_trace() {
    let sc = make_cl_scenario::<f64>(&SignalPowerSpec::Uniform { dbm: 0.0 }, 1.0).unwrap();
    let mut params = SolverParams::default();
    params.max_iterations = 400;
    let (_, rep) = run_hybrid(&sc, &params).unwrap();
    println!("status={} iters={} cl_history={:?}", rep.status.label(), rep.iterations, rep.cl_history);
    for rec in &rep.trace {
        let max: f64 = rec.pump_error_w.iter().fold(0.0, |m, e| m.max(e.abs()));
        if rec.iteration <= 40 || rec.iteration % 20 == 0 {
            println!(
                "it={:>4} {:>15} maxerr={:+.4e} first={:+.4e} all={:?}",
                rec.iteration,
                rec.stage.label(),
                max,
                rec.pump_error_w[0],
                rec.pump_error_w.iter().map(|e| format!("{e:+.2e}")).collect::<Vec<_>>()
            );
        }
    }
}

fn cl_with_peak(dbm: f64, adjustment: f64, peak: f64) -> LinkScenario<f64> {
    let alpha = db_per_km_to_linear(0.2_f64);
    let mut channels: Vec<ChannelSpec<f64>> = (0..76)
        .map(|k| ChannelSpec::forward_signal(186.0 + 0.125 * k as f64, alpha, dbm_to_watt(dbm)))
        .collect();
    let pumps = [(200.55, 0.18), (204.51, 0.13), (206.72, 0.20), (208.87, 0.32), (210.56, 0.36)];
    channels.extend(
        pumps.iter().map(|(f, p)| ChannelSpec::backward_pump(*f, alpha, p / adjustment)),
    );
    LinkScenario::new(channels, 100.0, 0.1, RamanGainModel::triangular(peak, true)).unwrap()
}

#[test]
#[ignore]
fn probe_gain_peak_scan() {
    for peak in [0.20, 0.15, 0.12, 0.10, 0.08] {
        println!("== peak {peak} ==");
        for dbm in [-5.0, 0.0, 5.0, 10.0] {
            let mut line = format!("  dbm={dbm:>5}:");
            for adj in [1.0, 0.7, 0.5, 0.4, 0.3, 0.2, 0.1] {
                let sc = cl_with_peak(dbm, adj, peak);
                let params = SolverParams::default();
                let (_, rep) = run_hybrid(&sc, &params).unwrap();
                line.push_str(&format!(
                    " {adj}:{}{}",
                    match rep.status {
                        SolverStatus::Converged => "C",
                        SolverStatus::Diverged => "D",
                        SolverStatus::Oscillating => "O",
                        SolverStatus::IterationCapped => "X",
                    },
                    rep.iterations
                ));
            }
            println!("{line}");
        }
    }
}

#[test]
#[ignore]
fn probe_high_cl_for_peaks() {
    for peak in [0.10, 0.12, 0.15] {
        println!("== peak {peak} ==");
        for cl in [0.3, 0.5, 0.8, 1.2] {
            let sc = cl_with_peak(0.0, 1.0, peak);
            let mut params = SolverParams::default();
            params.cl_initial = cl;
            let (_, rep) = run_hybrid(&sc, &params).unwrap();
            println!(
                "  cl={cl}: {} iters={} cl_history={:?}",
                rep.status.label(),
                rep.iterations,
                rep.cl_history
            );
        }
    }
}

#[test]
#[ignore]
fn probe_ladder_scan() {
    let peak = 0.10;
    for dbm in [-5.0, 0.0, 5.0, 10.0] {
        for adj in [0.45, 0.42, 0.40, 0.38, 0.35, 0.33, 0.30, 0.27, 0.25] {
            let sc = cl_with_peak(dbm, adj, peak);
            let params = SolverParams::default();
            let mut line = format!("dbm={dbm:>5} adj={adj:>5}:");
            for factor in [1.0, 5.0, 10.0, 15.0] {
                let (_, rep) = run_hybrid_with_factor(&sc, &params, factor).unwrap();
                line.push_str(&format!(
                    " f{factor}={}{}",
                    match rep.status {
                        SolverStatus::Converged => "C",
                        SolverStatus::Diverged => "D",
                        SolverStatus::Oscillating => "O",
                        SolverStatus::IterationCapped => "X",
                    },
                    rep.iterations
                ));
            }
            println!("{line}");
        }
    }
}

#[test]
#[ignore]
fn probe_peak_window() {
    for peak in [0.16, 0.18, 0.20, 0.22] {
        println!("== peak {peak} ==");
        // criterion 2 cells at default CL
        for dbm in [-5.0, 0.0, 5.0, 10.0] {
            let mut line = format!("  dbm={dbm:>5}:");
            for adj in [1.0, 0.7, 0.1] {
                let sc = cl_with_peak(dbm, adj, peak);
                let params = SolverParams::default();
                let (_, rep) = run_with_pump_factor_escalation(&sc, &params).unwrap();
                line.push_str(&format!(
                    " {adj}:{}{}(f{})",
                    match rep.status {
                        SolverStatus::Converged => "C",
                        SolverStatus::Diverged => "D",
                        SolverStatus::Oscillating => "O",
                        SolverStatus::IterationCapped => "X",
                    },
                    rep.iterations,
                    rep.pump_factor_used
                ));
            }
            println!("{line}");
        }
        // criterion 7: CL = 0.5 at (0 dBm, adj 1)
        let sc = cl_with_peak(0.0, 1.0, peak);
        let mut params = SolverParams::default();
        params.cl_initial = 0.5;
        let (_, rep) = run_hybrid(&sc, &params).unwrap();
        println!(
            "  CL=0.5: {} iters={} cl_history={:?}",
            rep.status.label(),
            rep.iterations,
            rep.cl_history
        );
    }
}
