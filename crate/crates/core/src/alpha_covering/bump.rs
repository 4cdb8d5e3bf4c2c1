//! Compactly supported smooth profiles.

/// `C^∞` step rising from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial plateau bump: 1 for `r ≤ inner`, 0 for `r ≥ outer`, smooth between.
pub fn plateau_bump(r: f64, inner: f64, outer: f64) -> f64 {
    debug_assert!(outer > inner);
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        1.0 - smooth_step((r - inner) / (outer - inner))
    }
}

/// Littlewood–Paley profile: 1 on `|ξ| ≤ 4/3`, vanishing for `|ξ| ≥ 3/2`.
pub fn lp_profile(r: f64) -> f64 {
    plateau_bump(r, 4.0 / 3.0, 1.5)
}

pub const LP_INNER: f64 = 4.0 / 3.0;
pub const LP_OUTER: f64 = 1.5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_monotone_and_symmetric() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let v = smooth_step(t);
            assert!(v >= prev);
            assert!((v + smooth_step(1.0 - t) - 1.0).abs() < 1e-14);
            prev = v;
        }
    }

    #[test]
    fn bump_levels() {
        assert_eq!(plateau_bump(0.2, 0.25, 0.5), 1.0);
        assert_eq!(plateau_bump(0.5, 0.25, 0.5), 0.0);
        let mid = plateau_bump(0.375, 0.25, 0.5);
        assert!((mid - 0.5).abs() < 1e-14);
        assert_eq!(lp_profile(1.3), 1.0);
        assert_eq!(lp_profile(1.5), 0.0);
    }
}
