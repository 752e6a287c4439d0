//! Habituation and dishabituation dynamics.
//!
//! A habituating quantity `h` starts at its maximum `H` and decays towards
//! `H - 1/alpha`; a dishabituating one recovers towards `H`. The network
//! integrates both with explicit Euler steps, one step per signal.

/// `dh/dt = (alpha * (H - h) - 1) / tau`
#[inline]
pub fn habituation_rate(h: f64, max: f64, alpha: f64, tau: f64) -> f64 {
    (alpha * (max - h) - 1.0) / tau
}

/// `dh/dt = (alpha / tau) * (H - h)`
#[inline]
pub fn dishabituation_rate(h: f64, max: f64, alpha: f64, tau: f64) -> f64 {
    alpha / tau * (max - h)
}

#[inline]
pub fn habituate(h: f64, max: f64, alpha: f64, tau: f64, dt: f64) -> f64 {
    h + dt * habituation_rate(h, max, alpha, tau)
}

#[inline]
pub fn dishabituate(h: f64, max: f64, alpha: f64, tau: f64, dt: f64) -> f64 {
    h + dt * dishabituation_rate(h, max, alpha, tau)
}

/// Closed-form habituation from `h(0) = H`.
pub fn habituation_curve(t: f64, max: f64, alpha: f64, tau: f64) -> f64 {
    max - (1.0 - (-alpha * t / tau).exp()) / alpha
}

/// Closed-form dishabituation from `h(0) = H - 1/alpha`.
pub fn dishabituation_curve(t: f64, max: f64, alpha: f64, tau: f64) -> f64 {
    max - (-alpha * t / tau).exp() / alpha
}

/// Asymptote of the habituation dynamics.
pub fn habituation_floor(max: f64, alpha: f64) -> f64 {
    max - 1.0 / alpha
}

/// Integrates `steps` Euler steps of size `dt`, returning the trajectory
/// including the initial value.
pub fn integrate(h0: f64, steps: usize, dt: f64, mut step: impl FnMut(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut h = h0;
    out.push(h);
    for _ in 0..steps {
        h = step(h, dt);
        out.push(h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_at_extremes() {
        // decay starts right away at the maximum
        assert!((habituation_rate(1.0, 1.0, 1.05, 3.33) + 1.0 / 3.33).abs() < 1e-15);
        // zero at the floor
        let floor = habituation_floor(1.0, 1.05);
        assert!(habituation_rate(floor, 1.0, 1.05, 3.33).abs() < 1e-15);
        assert_eq!(dishabituation_rate(25.0, 25.0, 0.04, 9.0), 0.0);
    }

    #[test]
    fn curves_start_where_expected() {
        assert_eq!(habituation_curve(0.0, 1.0, 1.05, 3.33), 1.0);
        assert!((dishabituation_curve(0.0, 1.0, 1.05, 9.0) - habituation_floor(1.0, 1.05)).abs() < 1e-15);
        assert!((habituation_curve(1e4, 1.0, 1.05, 3.33) - habituation_floor(1.0, 1.05)).abs() < 1e-12);
    }

    #[test]
    fn euler_tracks_closed_form() {
        let (alpha, tau, h) = (1.05, 3.33, 0.01);
        let steps = (10.0 * tau / h) as usize;
        let traj = integrate(1.0, steps, h, |v, dt| habituate(v, 1.0, alpha, tau, dt));
        for (i, v) in traj.iter().enumerate() {
            let t = i as f64 * h;
            assert!((v - habituation_curve(t, 1.0, alpha, tau)).abs() < 1e-3);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            // one Euler step per signal never leaves [floor, max] when tau >= alpha
            #[test]
            fn prop_unit_steps_stay_in_range(
                alpha in 0.05f64..2.0,
                slack in 0.0f64..20.0,
                max in 0.5f64..30.0,
                pattern in proptest::collection::vec(any::<bool>(), 1..300),
            ) {
                let tau = alpha + slack;
                let floor = habituation_floor(max, alpha);
                let mut h = max;
                for down in pattern {
                    h = if down { habituate(h, max, alpha, tau, 1.0) } else { dishabituate(h, max, alpha, tau, 1.0) };
                    prop_assert!(h <= max + 1e-12 && h >= floor - 1e-12);
                }
            }

            #[test]
            fn prop_fine_euler_matches_closed_form(alpha in 0.2f64..2.0, tau in 2.0f64..15.0) {
                let h = 0.01;
                let steps = (10.0 * tau / h) as usize;
                let up = integrate(1.0, steps, h, |v, dt| habituate(v, 1.0, alpha, tau, dt));
                let down = integrate(habituation_floor(1.0, alpha), steps, h, |v, dt| dishabituate(v, 1.0, alpha, tau, dt));
                for (i, (u, d)) in up.iter().zip(&down).enumerate() {
                    let t = i as f64 * h;
                    prop_assert!((u - habituation_curve(t, 1.0, alpha, tau)).abs() < 1e-3);
                    prop_assert!((d - dishabituation_curve(t, 1.0, alpha, tau)).abs() < 1e-3);
                }
            }
        }
    }
}
