//! Constant-speed lane changes along a quintic lateral profile.
//!
//! The lateral offset over the base lane is `y(x) = w * q(x / L)` with
//! `q(u) = 10u³ - 15u⁴ + 6u⁵`, which has zero slope and zero curvature at
//! both ends. At speed `v` the peak lateral acceleration is `C2 |w| v² / L²`
//! and the peak lateral jerk is `C3 |w| v³ / L³`.

use crate::error::{Error, Result};
use crate::opm::OccupantPreferenceMetric;
use crate::path::{PathGeometry, Station};

/// Peak of `|q''|`, reached at `u = (3 ± √3) / 6`.
pub const C2: f64 = 5.773_502_691_896_258; // 10 / sqrt(3)
/// Peak of `|q'''|`, reached at both ends.
pub const C3: f64 = 60.0;

/// Samples per plan used to report the peak lateral acceleration and jerk.
const DENSE_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneChangeRequest {
    /// Current speed, m/s.
    pub v: f64,
    /// Signed lateral displacement, positive to the left.
    pub lane_offset: f64,
    /// Free corridor ahead, m.
    pub gap_free_length: f64,
}

impl LaneChangeRequest {
    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::InvalidRequest(format!("speed must be positive, got {}", self.v)));
        }
        if self.lane_offset == 0.0 || !self.lane_offset.is_finite() {
            return Err(Error::InvalidRequest(format!(
                "lane offset must be non-zero, got {}",
                self.lane_offset
            )));
        }
        if !(self.gap_free_length > 0.0) {
            return Err(Error::InvalidRequest(format!(
                "gap-free length must be positive, got {}",
                self.gap_free_length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneChangePlan {
    pub length: f64,
    pub path: PathGeometry,
    pub max_ay: f64,
    pub max_jy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Infeasibility {
    CorridorTooShort { required: f64, available: f64 },
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasibility::CorridorTooShort { required, available } => {
                write!(f, "corridor too short: need {required:.2} m, have {available:.2} m")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaneChangeDecision {
    Feasible { length: f64 },
    Infeasible(Infeasibility),
}

impl LaneChangeDecision {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LaneChangeDecision::Feasible { .. })
    }
}

fn shape(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        u3 * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 - 60.0 * u3 + 30.0 * u2 * u2,
        60.0 * u - 180.0 * u2 + 120.0 * u3,
        60.0 - 360.0 * u + 360.0 * u2,
    ]
}

/// Numerically maximizes `|q''|` and `|q'''|` over `[0, 1]`: a coarse scan
/// followed by golden-section refinement around the best sample.
pub fn shape_constants() -> (f64, f64) {
    let peak = |order: usize| {
        let f = |u: f64| shape(u)[order].abs();
        let n = 1000;
        let best = (0..=n).max_by(|&a, &b| f(a as f64 / n as f64).total_cmp(&f(b as f64 / n as f64))).unwrap_or(0);
        let (mut lo, mut hi) = (
            (best as f64 - 1.0).max(0.0) / n as f64,
            (best as f64 + 1.0).min(n as f64) / n as f64,
        );
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) >= f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let mid = 0.5 * (lo + hi);
        f(mid).max(f(0.0)).max(f(1.0))
    };
    (peak(2), peak(3))
}

/// Shortest quintic lane change whose lateral acceleration and jerk stay
/// within the metric at constant speed `v`.
pub fn min_lane_change_length(v: f64, w: f64, opm: &OccupantPreferenceMetric) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidRequest(format!("speed must be positive, got {v}")));
    }
    if w == 0.0 || !w.is_finite() {
        return Err(Error::InvalidRequest(format!("lane offset must be non-zero, got {w}")));
    }
    let w = w.abs();
    let by_accel = v * (C2 * w / opm.ay_abs).sqrt();
    let by_jerk = v * (C3 * w / opm.jy_abs).cbrt();
    Ok(by_accel.max(by_jerk))
}

pub fn check_feasibility(req: &LaneChangeRequest, opm: &OccupantPreferenceMetric) -> Result<LaneChangeDecision> {
    req.validate()?;
    let required = min_lane_change_length(req.v, req.lane_offset, opm)?;
    Ok(if required <= req.gap_free_length {
        LaneChangeDecision::Feasible { length: required }
    } else {
        LaneChangeDecision::Infeasible(Infeasibility::CorridorTooShort {
            required,
            available: req.gap_free_length,
        })
    })
}

/// Generates the lane-change path in a frame where the current lane runs
/// along +x from the origin. Station spacing along the curve is at most `ds`.
pub fn generate_lane_change_path(
    req: &LaneChangeRequest,
    opm: &OccupantPreferenceMetric,
    ds: f64,
) -> Result<LaneChangePlan> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::InvalidRequest(format!("ds must be positive, got {ds}")));
    }
    let length = match check_feasibility(req, opm)? {
        LaneChangeDecision::Feasible { length } => length,
        LaneChangeDecision::Infeasible(why) => return Err(Error::Precondition(why.to_string())),
    };
    let w = req.lane_offset;
    // q' peaks at 15/8, so this bounds the arc spacing by ds
    let stretch = (1.0 + (1.875 * w / length).powi(2)).sqrt();
    let n = ((length * stretch / ds).ceil() as usize).max(1);
    let dx = length / n as f64;
    let point = |x: f64| {
        let q = shape(x / length);
        let y1 = w * q[1] / length;
        let y2 = w * q[2] / (length * length);
        (w * q[0], y1, y2)
    };
    let speed = |x: f64| (1.0 + point(x).1.powi(2)).sqrt();
    let mut stations = Vec::with_capacity(n + 1);
    let mut s = 0.0;
    for k in 0..=n {
        let x = k as f64 * dx;
        if k > 0 {
            // Simpson's rule on the arc-length integrand
            let x0 = x - dx;
            s += dx / 6.0 * (speed(x0) + 4.0 * speed(x0 + dx / 2.0) + speed(x));
        }
        let (y, y1, y2) = point(x);
        stations.push(Station {
            s,
            x,
            y,
            heading: y1.atan(),
            kappa: y2 / (1.0 + y1 * y1).powf(1.5),
        });
    }
    let total = s;
    let path = PathGeometry::from_stations(stations, false, total)?;

    let (mut max_ay, mut max_jy) = (0.0f64, 0.0f64);
    for k in 0..=DENSE_SAMPLES {
        let q = shape(k as f64 / DENSE_SAMPLES as f64);
        max_ay = max_ay.max(req.v.powi(2) * w.abs() * q[2].abs() / length.powi(2));
        max_jy = max_jy.max(req.v.powi(3) * w.abs() * q[3].abs() / length.powi(3));
    }
    Ok(LaneChangePlan {
        length,
        path,
        max_ay,
        max_jy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opm::{preset, DrivingStyle};

    const CAUTIOUS: OccupantPreferenceMetric = OccupantPreferenceMetric::CAUTIOUS;
    const DYNAMIC: OccupantPreferenceMetric = OccupantPreferenceMetric::DYNAMIC;

    fn req(v: f64, w: f64, gap: f64) -> LaneChangeRequest {
        LaneChangeRequest {
            v,
            lane_offset: w,
            gap_free_length: gap,
        }
    }

    #[test]
    fn constants_from_numerical_maximization() {
        let (c2, c3) = shape_constants();
        assert!((c2 - 5.7735).abs() < 1e-3, "{c2}");
        assert!((c2 - C2).abs() < 1e-9);
        assert!((c3 - 60.0).abs() < 1e-6, "{c3}");
        assert!((C2 - 10.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn minimum_lengths() {
        let accel_only = CAUTIOUS.without_jerk_limits();
        let l = min_lane_change_length(10.0, 3.5, &accel_only).unwrap();
        assert!((l - 47.38).abs() < 5e-3, "{l}");
        let l = min_lane_change_length(10.0, 3.5, &CAUTIOUS).unwrap();
        assert!((l - 70.47).abs() < 5e-3, "{l}");
        let l = min_lane_change_length(10.0, 3.5, &DYNAMIC).unwrap();
        assert!((l - 51.92).abs() < 5e-3, "{l}");
        assert_eq!(l, min_lane_change_length(10.0, -3.5, &DYNAMIC).unwrap());
    }

    #[test]
    fn invalid_requests() {
        assert!(matches!(min_lane_change_length(10.0, 0.0, &CAUTIOUS), Err(Error::InvalidRequest(_))));
        assert!(matches!(min_lane_change_length(0.0, 3.5, &CAUTIOUS), Err(Error::InvalidRequest(_))));
        assert!(check_feasibility(&req(10.0, 3.5, 0.0), &CAUTIOUS).is_err());
    }

    #[test]
    fn feasibility_decisions() {
        match check_feasibility(&req(10.0, 3.5, 100.0), &CAUTIOUS).unwrap() {
            LaneChangeDecision::Feasible { length } => assert!((length - 70.47).abs() < 5e-3),
            other => panic!("{other:?}"),
        }
        let d = check_feasibility(&req(10.0, 3.5, 50.0), &CAUTIOUS).unwrap();
        assert!(matches!(d, LaneChangeDecision::Infeasible(Infeasibility::CorridorTooShort { .. })));
        assert!(!check_feasibility(&req(10.0, 3.5, 50.0), &DYNAMIC).unwrap().is_feasible());
        assert!(check_feasibility(&req(10.0, 3.5, 52.0), &DYNAMIC).unwrap().is_feasible());
    }

    #[test]
    fn infeasible_generation_is_a_precondition_error() {
        let err = generate_lane_change_path(&req(10.0, 3.5, 50.0), &CAUTIOUS, 0.5);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn end_conditions() {
        let plan = generate_lane_change_path(&req(10.0, 3.5, 100.0), &CAUTIOUS, 0.5).unwrap();
        let st = plan.path.stations();
        let (first, last) = (st[0], st[st.len() - 1]);
        assert_eq!((first.x, first.y), (0.0, 0.0));
        assert!((last.x - plan.length).abs() < 1e-9);
        assert!((last.y - 3.5).abs() < 1e-9);
        for end in [first, last] {
            assert!(end.heading.abs() < 1e-6 && end.kappa.abs() < 1e-6);
        }
        assert!(st.windows(2).all(|w| w[1].s - w[0].s <= 0.5 + 1e-12));
    }

    #[test]
    fn reported_peaks_within_bounds() {
        for opm in [CAUTIOUS, DYNAMIC, preset(DrivingStyle::Normal)] {
            let plan = generate_lane_change_path(&req(10.0, 3.5, 200.0), &opm, 0.5).unwrap();
            assert!(plan.max_ay <= opm.ay_abs + 1e-3);
            assert!(plan.max_jy <= opm.jy_abs + 1e-3);
        }
    }

    #[test]
    fn acceleration_bound_is_tight_when_jerk_is_slack() {
        let opm = CAUTIOUS.without_jerk_limits();
        let plan = generate_lane_change_path(&req(10.0, 3.5, 100.0), &opm, 0.5).unwrap();
        assert!((plan.max_ay - opm.ay_abs).abs() / opm.ay_abs < 0.005, "{}", plan.max_ay);
    }

    #[test]
    fn mirrored_request_mirrors_path() {
        let left = generate_lane_change_path(&req(12.0, 3.5, 150.0), &DYNAMIC, 0.5).unwrap();
        let right = generate_lane_change_path(&req(12.0, -3.5, 150.0), &DYNAMIC, 0.5).unwrap();
        for (a, b) in left.path.stations().iter().zip(right.path.stations()) {
            assert!((a.y + b.y).abs() < 1e-9);
            assert!((a.x - b.x).abs() < 1e-9);
            assert!((a.kappa + b.kappa).abs() < 1e-9);
        }
    }

    #[test]
    fn curvature_jumps_shrink_with_spacing() {
        let max_jump = |ds: f64| {
            let plan = generate_lane_change_path(&req(10.0, 3.5, 100.0), &CAUTIOUS, ds).unwrap();
            plan.path
                .stations()
                .windows(2)
                .map(|w| (w[1].kappa - w[0].kappa).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (max_jump(1.0), max_jump(0.5));
        assert!(fine <= 0.55 * coarse, "{coarse} -> {fine}");
    }
}
