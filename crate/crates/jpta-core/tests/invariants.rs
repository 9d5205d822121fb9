//! Randomized invariance checks on the gain evaluation: common-shift
//! symmetries, the separated factorization, and boundedness.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use jpta_core::*;

const NS: f64 = 1e-9;

fn random_geometry(rng: &mut ChaCha8Rng) -> ArrayGeometry {
    ArrayGeometry::new(rng.gen_range(1..=6), rng.gen_range(1..=8)).unwrap()
}

fn random_grid(rng: &mut ChaCha8Rng) -> FrequencyGrid {
    let m_count = 2 * rng.gen_range(0..=10) + 1;
    FrequencyGrid::new(28e9, rng.gen_range(1e5..5e6), m_count).unwrap()
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    Direction::new(rng.gen_range(-180.0..=180.0), rng.gen_range(0.0..=180.0)).unwrap()
}

fn random_config(rng: &mut ChaCha8Rng, geometry: &ArrayGeometry) -> JptaConfig {
    let n = geometry.element_count();
    let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let delays: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..50.0 * NS)).collect();
    JptaConfig::new(geometry, phases, delays).unwrap()
}

fn random_separated(rng: &mut ChaCha8Rng, geometry: &ArrayGeometry) -> SeparatedJptaConfig {
    let phases = |n: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()
    };
    let delays = |n: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(0.0..50.0 * NS)).collect()
    };
    SeparatedJptaConfig::new(
        geometry,
        phases(geometry.n_az(), rng),
        delays(geometry.n_az(), rng),
        phases(geometry.n_el(), rng),
        delays(geometry.n_el(), rng),
    )
    .unwrap()
}

fn shifted(config: &JptaConfig, dphase: f64, ddelay: f64) -> JptaConfig {
    let geometry = ArrayGeometry::new(config.n_az(), config.n_el()).unwrap();
    JptaConfig::new(
        &geometry,
        config.phases().iter().map(|p| p + dphase).collect(),
        config.delays().iter().map(|t| t + ddelay).collect(),
    )
    .unwrap()
}

#[test]
fn common_phase_shift_leaves_gain_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let geometry = random_geometry(&mut rng);
        let grid = random_grid(&mut rng);
        let config = random_config(&mut rng, &geometry);
        let dir = random_direction(&mut rng);
        let m = rng.gen_range(0..grid.m_count());
        let c = rng.gen_range(-10.0..10.0);
        let a = gain(&geometry, &grid, &config, dir, m).unwrap();
        let b = gain(&geometry, &grid, &shifted(&config, c, 0.0), dir, m).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.max(1e-12), "{a} vs {b}");
    }
}

#[test]
fn common_delay_shift_leaves_gain_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let geometry = random_geometry(&mut rng);
        let grid = random_grid(&mut rng);
        let config = random_config(&mut rng, &geometry);
        let dir = random_direction(&mut rng);
        let m = rng.gen_range(0..grid.m_count());
        let tau0 = rng.gen_range(0.0..20.0 * NS);
        let a = gain(&geometry, &grid, &config, dir, m).unwrap();
        let b = gain(&geometry, &grid, &shifted(&config, 0.0, tau0), dir, m).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.max(1e-12), "{a} vs {b}");
    }
}

#[test]
fn separated_factorization_matches_expanded_gain() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let geometry = random_geometry(&mut rng);
        let grid = random_grid(&mut rng);
        let sep = random_separated(&mut rng, &geometry);
        let dir = random_direction(&mut rng);
        let m = rng.gen_range(0..grid.m_count());
        let factored = gain_separated(&geometry, &grid, &sep, dir, m).unwrap();
        let expanded = gain(&geometry, &grid, &sep.expand(), dir, m).unwrap();
        assert!(
            (factored - expanded).abs() <= 1e-9 * expanded.max(1e-12),
            "{factored} vs {expanded}"
        );
    }
}

#[test]
fn gain_stays_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let geometry = random_geometry(&mut rng);
        let grid = random_grid(&mut rng);
        let config = random_config(&mut rng, &geometry);
        let dir = random_direction(&mut rng);
        let m = rng.gen_range(0..grid.m_count());
        let v = gain(&geometry, &grid, &config, dir, m).unwrap();
        let nn = geometry.element_count() as f64;
        assert!(v >= 0.0 && v <= nn + 1e-9, "gain {v} outside [0, {nn}]");
    }
}

#[test]
fn single_user_joint_ls_reaches_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let geometry = random_geometry(&mut rng);
        let grid = random_grid(&mut rng);
        let dir = random_direction(&mut rng);
        let scenario = UserScenario::new(vec![dir], vec![1.0], grid.m_count()).unwrap();
        let cfg = joint_analytic(&geometry, &grid, &scenario, FitCriterion::LeastSquares).unwrap();
        let v = gain(&geometry, &grid, &cfg, dir, grid.half()).unwrap();
        let nn = geometry.element_count() as f64;
        assert!(v >= 0.99 * nn, "gain {v} below 0.99 * {nn}");
    }
}

#[test]
fn normalization_and_quantization_preserve_beam_quality() {
    // Aligned quantization may cost fractions of a dB but must not collapse
    // the solved beam the way per-entry rounding of the carrier-corrected
    // phases would.
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let spec = QuantizationSpec::new(2.5 * NS, 200.0 * NS, 6).unwrap();
    for _ in 0..10 {
        let geometry = ArrayGeometry::new(4, 6).unwrap();
        let grid = FrequencyGrid::new(28e9, 120e3, 101).unwrap();
        let dirs = vec![
            Direction::new(rng.gen_range(-60.0..0.0), rng.gen_range(85.0..100.0)).unwrap(),
            Direction::new(rng.gen_range(0.0..60.0), rng.gen_range(100.0..120.0)).unwrap(),
        ];
        let scenario = UserScenario::new(dirs.clone(), vec![0.5, 0.5], 101).unwrap();
        let cfg = joint_analytic(&geometry, &grid, &scenario, FitCriterion::LeastSquares).unwrap();
        let (q, _) = spec.quantize_aligned(&cfg, grid.f_c());
        for (i, &dir) in dirs.iter().enumerate() {
            let band = scenario.subband_indices(i);
            let before = user_mean_gain(&geometry, &grid, &cfg, dir, &band).unwrap();
            let after = user_mean_gain(&geometry, &grid, &q, dir, &band).unwrap();
            let drop_db = 10.0 * (before / after).log10();
            assert!(drop_db < 1.0, "quantization dropped user {i} by {drop_db} dB");
        }
    }
}
