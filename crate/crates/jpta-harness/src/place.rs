//! User placement over the served sector.

use jpta_core::Direction;

use crate::error::{HarnessError, Result};

/// Place `n_users` across the 120-degree horizontal by 30-degree vertical
/// sector: user i sits at `(-60 + i 120/(N-1), 90 + i 30/(N-1))` degrees for
/// `i = 0..N-1`, so both sector corners are occupied. A single user sits at
/// the sector center (0, 105).
pub fn place_users(n_users: usize) -> Result<Vec<Direction>> {
    match n_users {
        0 => Err(HarnessError::InvalidConfig("user count must be at least 1".into())),
        1 => Ok(vec![Direction::new(0.0, 105.0)?]),
        n => (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                Direction::new(-60.0 + 120.0 * f, 90.0 + 30.0 * f).map_err(HarnessError::from)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_users_hit_sector_corners() {
        let d = place_users(2).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!((d[0].theta_az_deg(), d[0].theta_el_deg()), (-60.0, 90.0));
        assert_eq!((d[1].theta_az_deg(), d[1].theta_el_deg()), (60.0, 120.0));
    }

    #[test]
    fn three_users_include_center() {
        let d = place_users(3).unwrap();
        assert_eq!((d[1].theta_az_deg(), d[1].theta_el_deg()), (0.0, 105.0));
        assert_eq!((d[2].theta_az_deg(), d[2].theta_el_deg()), (60.0, 120.0));
    }

    #[test]
    fn single_user_sits_at_coverage_center() {
        let d = place_users(1).unwrap();
        assert_eq!((d[0].theta_az_deg(), d[0].theta_el_deg()), (0.0, 105.0));
    }

    #[test]
    fn zero_users_rejected_and_bounds_hold() {
        assert!(place_users(0).is_err());
        for n in 2..=8 {
            for d in place_users(n).unwrap() {
                assert!((-60.0..=60.0).contains(&d.theta_az_deg()));
                assert!((90.0..=120.0).contains(&d.theta_el_deg()));
            }
        }
    }
}
