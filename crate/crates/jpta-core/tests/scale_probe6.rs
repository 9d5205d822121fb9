use jpta_core::*;
use std::f64::consts::{PI, TAU};
const NS: f64 = 1e-9;

// Chebyshev line fit to a handful of (t, b) points by 2-D grid refinement.
fn cheb_points(ts: &[f64], bs: &[f64]) -> (f64, f64) {
    // LS init.
    let n = ts.len() as f64;
    let (mut st, mut stt, mut sb, mut stb) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &b) in ts.iter().zip(bs) { st += t; stt += t * t; sb += b; stb += t * b; }
    let det = n * stt - st * st;
    let (mut x1, mut x2) = ((stt * sb - st * stb) / det, (n * stb - st * sb) / det);
    let emax = |x1: f64, x2: f64| ts.iter().zip(bs).map(|(&t, &b)| (x1 + t * x2 - b).abs()).fold(0.0, f64::max);
    let mut w1 = 2.0 * emax(x1, x2).max(1e-9);
    let mut w2 = w1 / ts.iter().map(|t| t.abs()).fold(1.0, f64::max);
    for _ in 0..60 {
        let (mut bx1, mut bx2, mut be) = (x1, x2, emax(x1, x2));
        for i in -12i32..=12 {
            for j in -12i32..=12 {
                let c1 = x1 + w1 * i as f64 / 12.0;
                let c2 = x2 + w2 * j as f64 / 12.0;
                let e = emax(c1, c2);
                if e < be { be = e; bx1 = c1; bx2 = c2; }
            }
        }
        x1 = bx1; x2 = bx2; w1 *= 0.55; w2 *= 0.55;
    }
    (x1, x2)
}

#[test]
#[ignore]
fn probe_user_level_minimax() {
    let geometry = ArrayGeometry::new(16, 24).unwrap();
    let grid = FrequencyGrid::new(28e9, 120e3, 793).unwrap();
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    let dirs: Vec<Direction> = (0..5).map(|i| {
        let f = i as f64 / 4.0;
        Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).unwrap()
    }).collect();
    let alphas = vec![0.3, 0.2, 0.15, 0.1, 0.25];
    let scenario = UserScenario::new(dirs.clone(), alphas, 793).unwrap();
    let half = grid.half() as f64;
    let centers: Vec<f64> = scenario.subbands().iter()
        .map(|b| (b.start as f64 + b.end as f64 - 1.0) / 2.0 - half)
        .collect();
    let coeffs: Vec<(f64, f64)> = dirs.iter().map(|d| d.steer_coeffs()).collect();

    let axis = |n: usize, pick: &dyn Fn(usize) -> f64| -> (Vec<f64>, Vec<f64>) {
        let mut phases = Vec::new();
        let mut delays = Vec::new();
        for e in 0..n {
            let nus: Vec<f64> = (0..5).map(|i| e as f64 * PI * pick(i)).collect();
            let ks = k_offsets(&nus);
            let targets: Vec<f64> = nus.iter().zip(&ks).map(|(&v, &k)| v + TAU * k as f64).collect();
            let (x1, x2) = cheb_points(&centers, &targets);
            let tau = x2 / (TAU * grid.delta_f());
            phases.push((x1 - TAU * grid.f_c() * tau).rem_euclid(TAU));
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
    let db: Vec<f64> = means.iter().map(|g| 10.0 * g.log10()).collect();
    let spread = db.iter().cloned().fold(f64::MIN, f64::max) - db.iter().cloned().fold(f64::MAX, f64::min);
    let gl = log_mean_gain(&means).unwrap();
    eprintln!("sep user-level mm: gl={gl:.2} spread={spread:.3} users={db:?}");

    // Same idea for the joint solver, for comparison with the full-row fit.
    let mut phase = Vec::new();
    let mut delay = Vec::new();
    for y in 0..16 {
        for z in 0..24 {
            let nus: Vec<f64> = dirs.iter().map(|d| nu(y, z, d)).collect();
            let ks = k_offsets(&nus);
            let targets: Vec<f64> = nus.iter().zip(&ks).map(|(&v, &k)| v + TAU * k as f64).collect();
            let (x1, x2) = cheb_points(&centers, &targets);
            let tau = x2 / (TAU * grid.delta_f());
            phase.push((x1 - TAU * grid.f_c() * tau).rem_euclid(TAU));
            delay.push(tau);
        }
    }
    let joint = JptaConfig::new(&geometry, phase, delay).unwrap().normalize_delays(grid.f_c(), None).0;
    let (q, _) = spec.quantize_aligned(&joint, grid.f_c());
    let means: Vec<f64> = dirs.iter().enumerate()
        .map(|(i, &d)| user_mean_gain(&geometry, &grid, &q, d, &scenario.subband_indices(i)).unwrap())
        .collect();
    let db: Vec<f64> = means.iter().map(|g| 10.0 * g.log10()).collect();
    let spread = db.iter().cloned().fold(f64::MIN, f64::max) - db.iter().cloned().fold(f64::MAX, f64::min);
    let gl = log_mean_gain(&means).unwrap();
    eprintln!("joint user-level mm: gl={gl:.2} spread={spread:.3} users={db:?}");
}
