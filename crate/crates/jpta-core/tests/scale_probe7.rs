use jpta_core::*;
use std::f64::consts::{PI, TAU};
const NS: f64 = 1e-9;

#[test]
#[ignore]
fn probe_unwrapped_axis_minimax() {
    let geometry = ArrayGeometry::new(16, 24).unwrap();
    let grid = FrequencyGrid::new(28e9, 120e3, 793).unwrap();
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    let dirs: Vec<Direction> = (0..5).map(|i| {
        let f = i as f64 / 4.0;
        Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).unwrap()
    }).collect();
    let alphas = vec![0.3, 0.2, 0.15, 0.1, 0.25];
    let scenario = UserScenario::new(dirs.clone(), alphas, 793).unwrap();
    let coeffs: Vec<(f64, f64)> = dirs.iter().map(|d| d.steer_coeffs()).collect();

    for wrap in [true, false] {
        let axis = |n: usize, pick: &dyn Fn(usize) -> f64| -> (Vec<f64>, Vec<f64>) {
            let mut phases = Vec::new();
            let mut delays = Vec::new();
            for e in 0..n {
                let nus: Vec<f64> = (0..5).map(|i| e as f64 * PI * pick(i)).collect();
                let targets: Vec<f64> = if wrap {
                    let ks = k_offsets(&nus);
                    nus.iter().zip(&ks).map(|(&v, &k)| v + TAU * k as f64).collect()
                } else {
                    nus.clone()
                };
                let mut sys = SubbandSystem::from_targets(vec![0.0; 5], scenario.subbands(), 793);
                // Overwrite rhs with chosen targets per block.
                let mut rhs = vec![0.0; 793];
                for (i, b) in scenario.subbands().iter().enumerate() {
                    for m in b.clone() { rhs[m] = targets[i]; }
                }
                sys = SubbandSystem::from_targets(targets.clone(), scenario.subbands(), 793);
                let _ = rhs;
                let fitr = solve_minimax(&sys);
                let tau = fitr.slope_var / (TAU * grid.delta_f());
                phases.push((fitr.phase_var - TAU * grid.f_c() * tau).rem_euclid(TAU));
                delays.push(tau);
            }
            (phases, delays)
        };
        let (paz, daz) = axis(16, &|i| coeffs[i].0);
        let (pel, del) = axis(24, &|i| coeffs[i].1);
        let sep = SeparatedJptaConfig::new(&geometry, paz, daz, pel, del).unwrap()
            .normalize_delays(grid.f_c(), None).0;
        let (q, _) = spec.quantize_aligned_separated(&sep, grid.f_c());
        let full = q.expand();
        let means: Vec<f64> = dirs.iter().enumerate()
            .map(|(i, &d)| user_mean_gain(&geometry, &grid, &full, d, &scenario.subband_indices(i)).unwrap())
            .collect();
        let db: Vec<f64> = means.iter().map(|g| (10.0 * g.log10() * 100.0).round() / 100.0).collect();
        let spread = db.iter().cloned().fold(f64::MIN, f64::max) - db.iter().cloned().fold(f64::MAX, f64::min);
        let gl = log_mean_gain(&means).unwrap();
        eprintln!("sep mm wrap={wrap}: gl={gl:.2} spread={spread:.3} users={db:?}");
    }
}
