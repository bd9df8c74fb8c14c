//! Proper times along piecewise-hyperbolic trajectories, the time-dilation
//! control parameter, and causal classification of the two interaction
//! regions.
//!
//! Each trajectory is four identical hyperbolic segments traversed in a
//! common inertial frame; the clock carried along the higher-acceleration
//! branch accrues less proper time.

use crate::error::{Error, Result};

/// Spin-dependent trajectory pair: proper accelerations for the two spin
/// branches and the total coordinate travel time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryParams {
    pub accel_up: f64,
    pub accel_down: f64,
    pub coordinate_duration: f64,
}

impl TrajectoryParams {
    /// Requires `accel_up > accel_down > 0` (the spin-up branch is the more
    /// strongly accelerated, hence younger, one) and a positive travel time.
    pub fn new(accel_up: f64, accel_down: f64, coordinate_duration: f64) -> Result<Self> {
        if !(accel_down > 0.0) {
            return Err(Error::Domain(format!(
                "accelerations must be positive, got accel_down = {accel_down}"
            )));
        }
        if !(accel_up > accel_down) {
            return Err(Error::Domain(format!(
                "need accel_up > accel_down (sign convention), got {accel_up} <= {accel_down}"
            )));
        }
        if !(coordinate_duration > 0.0) {
            return Err(Error::Domain(format!(
                "coordinate duration must be positive, got {coordinate_duration}"
            )));
        }
        Ok(Self { accel_up, accel_down, coordinate_duration })
    }
}

/// Proper time along four identical hyperbolic segments of total coordinate
/// duration `t_total`: `tau = (4/A) asinh(A t_total / 4)`.
///
/// Always below `t_total` (time dilation) and tends to it as `A -> 0`.
pub fn proper_time_hyperbolic(accel: f64, t_total: f64) -> Result<f64> {
    if !(accel > 0.0) || !(t_total > 0.0) {
        return Err(Error::Domain(format!(
            "proper_time_hyperbolic needs positive inputs, got A = {accel}, T = {t_total}"
        )));
    }
    Ok(4.0 / accel * (accel * t_total / 4.0).asinh())
}

/// Differential aging `tau_down - tau_up`; strictly positive under the
/// `accel_up > accel_down` convention.
pub fn delta_tau(p: &TrajectoryParams) -> f64 {
    let tau_down = 4.0 / p.accel_down * (p.accel_down * p.coordinate_duration / 4.0).asinh();
    let tau_up = 4.0 / p.accel_up * (p.accel_up * p.coordinate_duration / 4.0).asinh();
    tau_down - tau_up
}

/// Large-travel-time expansion of [`delta_tau`]:
///
/// `2 (log(Ad^2/4)/Ad - log(Au^2/4)/Au) + 4 (1/Ad - 1/Au) log(T)`,
///
/// with an `O(1/T^2)` remainder. The dilation grows without bound in `T`
/// even for arbitrarily small accelerations.
pub fn delta_tau_asymptotic(p: &TrajectoryParams) -> f64 {
    let au = p.accel_up;
    let ad = p.accel_down;
    2.0 * ((ad * ad / 4.0).ln() / ad - (au * au / 4.0).ln() / au)
        + 4.0 * (1.0 / ad - 1.0 / au) * p.coordinate_duration.ln()
}

/// Two fixed-position interaction windows in the cavity frame: positions,
/// coordinate-time offset of the later window, and common window duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionRegions {
    pub x1: f64,
    pub x2: f64,
    pub delta_tau: f64,
    pub duration: f64,
}

impl InteractionRegions {
    /// Window duration must be positive and, for a nonzero offset, no longer
    /// than the offset: the two detectors never interact simultaneously in
    /// the cavity frame. Positions are validated against the cavity length
    /// when combined into protocol parameters; coincident positions are
    /// allowed (they degenerate the exchange symmetry rather than break it).
    pub fn new(x1: f64, x2: f64, delta_tau: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::Domain(format!(
                "interaction duration must be positive, got {duration}"
            )));
        }
        if !(delta_tau >= 0.0) {
            return Err(Error::Domain(format!(
                "time-dilation offset must be non-negative, got {delta_tau}"
            )));
        }
        if delta_tau > 0.0 && duration > delta_tau {
            return Err(Error::Domain(format!(
                "window duration {duration} exceeds the dilation offset {delta_tau}; \
                 the windows would overlap in the cavity frame"
            )));
        }
        Ok(Self { x1, x2, delta_tau, duration })
    }
}

/// Causal relation between the two interaction regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationClass {
    /// Every event of one window is spacelike from every event of the other.
    Spacelike,
    /// Every event of the later window lies in the future cone of every
    /// event of the earlier one.
    Timelike,
    /// Neither strict relation holds; lightlike boundary ties land here.
    Mixed,
}

impl std::fmt::Display for SeparationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SeparationClass::Spacelike => "spacelike",
            SeparationClass::Timelike => "timelike",
            SeparationClass::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Light-cone classification of two fixed-position windows (`c = 1`):
/// with `dx = |x2 - x1|`, spacelike iff `delta_tau + T < dx` and timelike
/// iff `delta_tau - T > dx`. The protocol's claims need the strict classes,
/// so closed lightlike boundaries classify as `Mixed`.
pub fn classify_separation(r: &InteractionRegions) -> SeparationClass {
    let dx = (r.x2 - r.x1).abs();
    if r.delta_tau + r.duration < dx {
        SeparationClass::Spacelike
    } else if r.delta_tau - r.duration > dx {
        SeparationClass::Timelike
    } else {
        SeparationClass::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Worldline quadrature oracle: composite Simpson integration of
    /// `dtau = dt / sqrt(1 + (A t)^2)` over one segment, times four.
    fn proper_time_oracle(accel: f64, t_total: f64) -> f64 {
        let seg = t_total / 4.0;
        let n = 20_000; // even
        let h = seg / n as f64;
        let f = |t: f64| 1.0 / (1.0 + (accel * t).powi(2)).sqrt();
        let mut sum = f(0.0) + f(seg);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        4.0 * sum * h / 3.0
    }

    #[test]
    fn inertial_limit() {
        let tau = proper_time_hyperbolic(1e-9, 10.0).unwrap();
        assert!((tau - 10.0).abs() < 1e-12);
    }

    #[test]
    fn proper_time_reference_values() {
        // frozen from the worldline-integration oracle
        let t1 = proper_time_hyperbolic(1.0, 4.0).unwrap();
        assert!((t1 - 3.525494348078172).abs() < 1e-12);
        assert!((t1 - proper_time_oracle(1.0, 4.0)).abs() < 1e-10);

        let t2 = proper_time_hyperbolic(4.0, 4.0).unwrap();
        assert!((t2 - 2.0947125472611012).abs() < 1e-12);
        assert!((t2 - proper_time_oracle(4.0, 4.0)).abs() < 1e-10);
    }

    #[test]
    fn proper_time_domain() {
        assert!(proper_time_hyperbolic(0.0, 1.0).is_err());
        assert!(proper_time_hyperbolic(1.0, 0.0).is_err());
        assert!(proper_time_hyperbolic(-1.0, 1.0).is_err());
    }

    #[test]
    fn dilation_and_monotonicity() {
        let accels = [0.1, 0.5, 1.0, 2.0, 5.0];
        for &t in &[0.5, 4.0, 50.0] {
            let mut prev = t;
            for &a in &accels {
                let tau = proper_time_hyperbolic(a, t).unwrap();
                assert!(tau < t, "no dilation at A={a}, T={t}");
                assert!(tau < prev, "not decreasing in A at A={a}, T={t}");
                prev = tau;
            }
        }
    }

    #[test]
    fn delta_tau_values() {
        // equal accelerations up to 1e-12: essentially no differential aging
        let p = TrajectoryParams::new(1.0 + 1e-12, 1.0, 7.0).unwrap();
        assert!(delta_tau(&p).abs() < 1e-11);

        // frozen from the high-precision closed forms:
        // 4 asinh(2.5) - 2 asinh(5)
        let p = TrajectoryParams::new(2.0, 1.0, 10.0).unwrap();
        assert!((delta_tau(&p) - 1.9640479029388782).abs() < 1e-12);
    }

    #[test]
    fn trajectory_invariants() {
        assert!(TrajectoryParams::new(1.0, 2.0, 5.0).is_err());
        assert!(TrajectoryParams::new(1.0, 1.0, 5.0).is_err());
        assert!(TrajectoryParams::new(2.0, -1.0, 5.0).is_err());
        assert!(TrajectoryParams::new(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn asymptotic_consistency() {
        let p = TrajectoryParams::new(1.0, 0.5, 1e6).unwrap();
        let exact = delta_tau(&p);
        let asym = delta_tau_asymptotic(&p);
        assert!(((exact - asym) / exact).abs() < 1e-6);

        let p4 = TrajectoryParams::new(1.0, 0.5, 1e4).unwrap();
        assert!(
            ((delta_tau(&p4) - delta_tau_asymptotic(&p4)) / delta_tau(&p4)).abs() < 1e-4
        );

        // expansion prefactors cancel for equal accelerations; probe the
        // formula directly since the constructor forbids exact equality
        let a = 1.3;
        let sym = 2.0 * ((a * a / 4.0f64).ln() / a - (a * a / 4.0f64).ln() / a);
        assert_eq!(sym, 0.0);
    }

    #[test]
    fn asymptotic_remainder_scales_as_inverse_square() {
        // absolute error shrinks by ~10^4 when T grows by 10^2
        let e2 = {
            let p = TrajectoryParams::new(2.0, 1.0, 1e2).unwrap();
            (delta_tau(&p) - delta_tau_asymptotic(&p)).abs()
        };
        let e4 = {
            let p = TrajectoryParams::new(2.0, 1.0, 1e4).unwrap();
            (delta_tau(&p) - delta_tau_asymptotic(&p)).abs()
        };
        assert!(e2 / e4 > 1e3, "ratio {}", e2 / e4);
    }

    #[test]
    fn delta_tau_unbounded_in_travel_time() {
        let mut prev = 0.0;
        for exp in 1..=8 {
            let p = TrajectoryParams::new(1.0, 0.5, 10f64.powi(exp)).unwrap();
            let d = delta_tau(&p);
            assert!(d > prev);
            prev = d;
        }
        assert!(prev > 50.0);
    }

    #[test]
    fn classification_reference_points() {
        let l = 1.0;
        // short simultaneous-looking windows, dx = L/2
        let r = InteractionRegions::new(l / 4.0, 3.0 * l / 4.0, l / 10.0, l / 10.0).unwrap();
        assert_eq!(classify_separation(&r), SeparationClass::Spacelike);

        let r = InteractionRegions::new(l / 4.0, 3.0 * l / 4.0, 3.0 * l, 2.0 * l).unwrap();
        assert_eq!(classify_separation(&r), SeparationClass::Timelike);

        // delta_tau - T = dx exactly: boundary tie goes to Mixed
        let r = InteractionRegions::new(l / 4.0, 3.0 * l / 4.0, l, l / 2.0).unwrap();
        assert_eq!(classify_separation(&r), SeparationClass::Mixed);
    }

    #[test]
    fn classification_swap_invariance() {
        for &(dtau, t) in &[(0.1, 0.1), (3.0, 2.0), (1.0, 0.5), (0.0, 0.2)] {
            let a = InteractionRegions::new(0.25, 0.75, dtau, t).unwrap();
            let b = InteractionRegions::new(0.75, 0.25, dtau, t).unwrap();
            assert_eq!(classify_separation(&a), classify_separation(&b));
        }
    }

    #[test]
    fn region_invariants() {
        assert!(InteractionRegions::new(0.1, 0.9, 1.0, 2.0).is_err()); // T > dtau
        assert!(InteractionRegions::new(0.1, 0.9, 1.0, 0.0).is_err());
        assert!(InteractionRegions::new(0.1, 0.9, -0.5, 0.1).is_err());
        // dtau = 0 places no constraint on T
        assert!(InteractionRegions::new(0.1, 0.9, 0.0, 2.0).is_ok());
    }
}
