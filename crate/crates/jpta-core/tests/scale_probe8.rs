use jpta_core::*;
use std::time::Instant;
const NS: f64 = 1e-9;

fn direct_gl(g: &ArrayGeometry, grid: &FrequencyGrid, s: &UserScenario, c: &JptaConfig) -> f64 {
    let means: Vec<f64> = s.directions().iter().enumerate()
        .map(|(i, &d)| user_mean_gain(g, grid, c, d, &s.subband_indices(i)).unwrap())
        .collect();
    log_mean_gain(&means).unwrap()
}

#[test]
#[ignore]
fn probe_zeta_envelope() {
    let geometry = ArrayGeometry::new(16, 24).unwrap();
    let grid = FrequencyGrid::new(28e9, 120e3, 793).unwrap();
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    let dirs: Vec<Direction> = (0..4).map(|i| {
        let f = i as f64 / 3.0;
        Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).unwrap()
    }).collect();
    let scenario = UserScenario::equal_bandwidth(dirs, 793).unwrap();
    let analytic = joint_analytic(&geometry, &grid, &scenario, FitCriterion::LeastSquares).unwrap();
    let (init, _) = spec.quantize_aligned(&analytic, grid.f_c());
    let gl_init = direct_gl(&geometry, &grid, &scenario, &init);
    eprintln!("init gl = {gl_init:.3}");

    for zeta in [1e-3, 1e-4, 1e-5, 1e-6] {
        let settings = OptimizerSettings { zeta, max_sweeps: 100, ..Default::default() };
        let t0 = Instant::now();
        let (out, trace) = greedy_optimize_joint(&geometry, &grid, &scenario, &init, &spec, &settings).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let gl = direct_gl(&geometry, &grid, &scenario, &out);
        eprintln!(
            "greedy zeta={zeta:.0e}: impr={:.3} dB sweeps={} conv={} time={dt:.2}s hist_last={:*>.3?}",
            gl - gl_init, trace.sweeps_run, trace.converged,
            &trace.objective_history[trace.objective_history.len().saturating_sub(3)..]
        );
    }
    for (zeta, max) in [(1e-3, 2000), (1e-4, 2000), (1e-5, 4000)] {
        let settings = OptimizerSettings { zeta, max_sweeps: max, ..Default::default() };
        let t0 = Instant::now();
        let (out, trace) = gd_optimize_joint(&geometry, &grid, &scenario, &init, &spec, &settings).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let gl = direct_gl(&geometry, &grid, &scenario, &out);
        let peak = trace.objective_history.iter().cloned().fold(f64::MIN, f64::max);
        eprintln!(
            "gd zeta={zeta:.0e}: impr={:.3} dB steps={} conv={} time={dt:.2}s continuous peak={peak:.3} final cont={:.3}",
            gl - gl_init, trace.sweeps_run, trace.converged, trace.objective_history.last().unwrap()
        );
    }
}

#[test]
#[ignore]
fn probe_default_settings_ordering() {
    let geometry = ArrayGeometry::new(16, 24).unwrap();
    let grid = FrequencyGrid::new(28e9, 120e3, 793).unwrap();
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    let dirs: Vec<Direction> = (0..4).map(|i| {
        let f = i as f64 / 3.0;
        Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).unwrap()
    }).collect();
    let scenario = UserScenario::equal_bandwidth(dirs, 793).unwrap();
    let analytic = joint_analytic(&geometry, &grid, &scenario, FitCriterion::LeastSquares).unwrap();
    let (init, _) = spec.quantize_aligned(&analytic, grid.f_c());
    let gl_init = direct_gl(&geometry, &grid, &scenario, &init);
    let settings = OptimizerSettings { max_sweeps: 2000, ..Default::default() };
    for round in 0..2 {
        let t0 = Instant::now();
        let (gout, gtr) = greedy_optimize_joint(&geometry, &grid, &scenario, &init, &spec, &settings).unwrap();
        let t_greedy = t0.elapsed().as_secs_f64();
        let t0 = Instant::now();
        let (dout, dtr) = gd_optimize_joint(&geometry, &grid, &scenario, &init, &spec, &settings).unwrap();
        let t_gd = t0.elapsed().as_secs_f64();
        eprintln!(
            "round {round}: greedy impr={:.3} sweeps={} {t_greedy:.2}s | gd impr={:.3} steps={} {t_gd:.2}s | ratio={:.2}",
            direct_gl(&geometry, &grid, &scenario, &gout) - gl_init, gtr.sweeps_run,
            direct_gl(&geometry, &grid, &scenario, &dout) - gl_init, dtr.sweeps_run,
            t_greedy / t_gd
        );
    }
}
