use jpta_core::*;
use std::f64::consts::TAU;
const NS: f64 = 1e-9;

// Weighted LS on the stacked system: row weight 1/|F_i| equalizes users.
fn weighted_ls(system: &SubbandSystem, weights: &[f64]) -> (f64, f64) {
    let (mut sw, mut swt, mut swtt, mut swb, mut swtb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (r, &b) in system.rhs().iter().enumerate() {
        let t = system.m_prime(r);
        let w = weights[r];
        sw += w; swt += w * t; swtt += w * t * t; swb += w * b; swtb += w * t * b;
    }
    let det = sw * swtt - swt * swt;
    ((swtt * swb - swt * swtb) / det, (sw * swtb - swt * swb) / det)
}

fn gl_of(g: &ArrayGeometry, grid: &FrequencyGrid, s: &UserScenario, c: &JptaConfig) -> (Vec<f64>, f64) {
    let means: Vec<f64> = s.directions().iter().enumerate()
        .map(|(i, &d)| user_mean_gain(g, grid, c, d, &s.subband_indices(i)).unwrap())
        .collect();
    let gl = log_mean_gain(&means).unwrap();
    (means.iter().map(|v| 10.0 * v.log10()).collect(), gl)
}

fn build_joint_weighted(g: &ArrayGeometry, grid: &FrequencyGrid, s: &UserScenario, weights: &[f64]) -> JptaConfig {
    let mut phase = Vec::new();
    let mut delay = Vec::new();
    for y in 0..g.n_az() {
        for z in 0..g.n_el() {
            let sys = build_system(g, grid, s, y, z).unwrap();
            let (x1, x2) = weighted_ls(&sys, weights);
            let tau = x2 / (TAU * grid.delta_f());
            phase.push((x1 - TAU * grid.f_c() * tau).rem_euclid(TAU));
            delay.push(tau);
        }
    }
    JptaConfig::new(g, phase, delay).unwrap().normalize_delays(grid.f_c(), None).0
}

#[test]
#[ignore]
fn probe_equal_user_weight_ls() {
    let geometry = ArrayGeometry::new(16, 24).unwrap();
    let grid = FrequencyGrid::new(28e9, 120e3, 793).unwrap();
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    let dirs = vec![Direction::new(-60.0, 90.0).unwrap(), Direction::new(60.0, 120.0).unwrap()];
    for alpha in [0.05, 0.10, 0.25, 0.50] {
        let scenario = UserScenario::new(dirs.clone(), vec![alpha, 1.0 - alpha], 793).unwrap();
        // Row weights: 1/|F_i| so each user contributes equally to the fit.
        let mut weights = vec![0.0; 793];
        for (i, block) in scenario.subbands().iter().enumerate() {
            for m in block.clone() {
                weights[m] = 1.0 / scenario.subbands()[i].len() as f64;
            }
        }
        let cfg = build_joint_weighted(&geometry, &grid, &scenario, &weights);
        let (q, _) = spec.quantize_aligned(&cfg, grid.f_c());
        let (db, gl) = gl_of(&geometry, &grid, &scenario, &q);
        eprintln!("alpha={alpha:.2} equal-user-weight joint LS: gl={gl:.2} users={db:?}");
    }
    // 5-user fairness with the same weighting.
    let dirs: Vec<Direction> = (0..5).map(|i| {
        let f = i as f64 / 4.0;
        Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).unwrap()
    }).collect();
    let scenario = UserScenario::new(dirs, vec![0.3, 0.2, 0.15, 0.1, 0.25], 793).unwrap();
    let mut weights = vec![0.0; 793];
    for (i, block) in scenario.subbands().iter().enumerate() {
        for m in block.clone() {
            weights[m] = 1.0 / scenario.subbands()[i].len() as f64;
        }
    }
    let cfg = build_joint_weighted(&geometry, &grid, &scenario, &weights);
    let (q, _) = spec.quantize_aligned(&cfg, grid.f_c());
    let (db, gl) = gl_of(&geometry, &grid, &scenario, &q);
    let spread = db.iter().cloned().fold(f64::MIN, f64::max) - db.iter().cloned().fold(f64::MAX, f64::min);
    eprintln!("fairness equal-user-weight joint LS: gl={gl:.2} spread={spread:.3} users={db:?}");
}
