//! Velocity profiles and the discrete comfort quantities evaluated on them.
//!
//! A profile assigns a speed to every planning station. Between stations the
//! acceleration is constant, so segment `i` has
//! `a_i = (v_{i+1}^2 - v_i^2) / (2 h_i)` and lasts `2 h_i / (v_i + v_{i+1})`.
//! Longitudinal jerk at an interior station is the change of segment
//! acceleration divided by the time between segment midpoints; lateral jerk
//! on a segment is the change of `v^2 kappa` across it divided by its
//! duration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opm::OccupantPreferenceMetric;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub v_start: f64,
    pub v_end: f64,
    pub v_global_max: f64,
}

impl BoundaryConditions {
    pub fn rest_to_rest(v_global_max: f64) -> Self {
        Self {
            v_start: 0.0,
            v_end: 0.0,
            v_global_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.v_start, self.v_end, self.v_global_max];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Precondition(format!("boundary speeds must be finite and >= 0: {self:?}")));
        }
        if self.v_global_max <= 0.0 {
            return Err(Error::Precondition("v_global_max must be positive".into()));
        }
        if self.v_start > self.v_global_max || self.v_end > self.v_global_max {
            return Err(Error::Precondition(format!(
                "boundary speeds exceed v_global_max = {}",
                self.v_global_max
            )));
        }
        Ok(())
    }
}

/// One station of a velocity profile. `ax_plan` is the acceleration of the
/// segment starting here; the last station repeats the final segment's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub v: f64,
    pub ax_plan: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityProfile {
    points: Vec<ProfilePoint>,
}

pub(crate) fn segment_time(h: f64, v0: f64, v1: f64) -> f64 {
    2.0 * h / (v0 + v1)
}

pub(crate) fn segment_accel(h: f64, v0: f64, v1: f64) -> f64 {
    (v1 * v1 - v0 * v0) / (2.0 * h)
}

/// Longitudinal jerk between two consecutive segments.
pub(crate) fn junction_jerk(a_prev: f64, a: f64, dt_prev: f64, dt: f64) -> f64 {
    (a - a_prev) / (0.5 * (dt_prev + dt))
}

/// Lateral jerk across one segment.
pub(crate) fn lateral_jerk(v0: f64, k0: f64, v1: f64, k1: f64, dt: f64) -> f64 {
    (v1 * v1 * k1 - v0 * v0 * k0) / dt
}

impl VelocityProfile {
    /// Builds a profile from station arc lengths and speeds.
    pub fn from_speeds(s: &[f64], v: &[f64]) -> Result<Self> {
        if s.len() != v.len() {
            return Err(Error::Precondition("station and speed counts differ".into()));
        }
        if s.len() < 2 {
            return Err(Error::StalledProfile("profile needs at least two stations".into()));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Precondition(format!("invalid speed {} at station {i}", v[i])));
        }
        let mut points = Vec::with_capacity(s.len());
        let mut t = 0.0;
        for i in 0..s.len() {
            let seg = if i + 1 < s.len() { i } else { i - 1 };
            let h = s[seg + 1] - s[seg];
            if h <= 0.0 {
                return Err(Error::Precondition(format!("stations not increasing at {seg}")));
            }
            points.push(ProfilePoint {
                s: s[i],
                v: v[i],
                ax_plan: segment_accel(h, v[seg], v[seg + 1]),
                t,
            });
            if i + 1 < s.len() {
                if v[i] + v[i + 1] <= 0.0 {
                    return Err(Error::StalledProfile(format!("zero speed on segment {i}")));
                }
                t += segment_time(h, v[i], v[i + 1]);
            }
        }
        Ok(Self { points })
    }

    /// Wraps already-computed points (e.g. loaded from CSV) without
    /// recomputing accelerations or times.
    pub fn from_points(points: Vec<ProfilePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::StalledProfile("profile needs at least two stations".into()));
        }
        if points.windows(2).any(|w| w[1].s <= w[0].s) {
            return Err(Error::Precondition("profile stations must increase".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.v).collect()
    }

    pub fn stations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    pub fn total_time(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.t)
    }

    pub fn start_s(&self) -> f64 {
        self.points[0].s
    }

    pub fn end_s(&self) -> f64 {
        self.points[self.points.len() - 1].s
    }

    /// Reference speed and planned acceleration at arc length `s`, exact
    /// under the constant-acceleration-per-segment model.
    pub fn reference_at(&self, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.start_s(), self.end_s());
        if !(s >= lo - 1e-9 && s <= hi + 1e-9) {
            return Err(Error::OutOfRange {
                value: s,
                min: lo,
                max: hi,
            });
        }
        let s = s.clamp(lo, hi);
        let i = self
            .points
            .partition_point(|p| p.s <= s)
            .saturating_sub(1)
            .min(self.points.len() - 2);
        let p = &self.points[i];
        let v2 = p.v * p.v + 2.0 * p.ax_plan * (s - p.s);
        Ok((v2.max(0.0).sqrt(), p.ax_plan))
    }

    /// Plan-level comfort quantities along this profile for the given
    /// station curvatures.
    pub fn metrics(&self, kappa: &[f64]) -> Result<ProfileMetrics> {
        if kappa.len() != self.points.len() {
            return Err(Error::Precondition(format!(
                "{} curvatures for {} profile stations",
                kappa.len(),
                self.points.len()
            )));
        }
        let p = &self.points;
        let n = p.len();
        let mut m = ProfileMetrics::default();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..n {
            m.max_speed = m.max_speed.max(p[i].v);
            m.max_abs_ay = m.max_abs_ay.max(p[i].v * p[i].v * kappa[i].abs());
            if i + 1 == n {
                break;
            }
            let h = p[i + 1].s - p[i].s;
            let a = segment_accel(h, p[i].v, p[i + 1].v);
            let dt = segment_time(h, p[i].v, p[i + 1].v);
            m.max_ax = m.max_ax.max(a);
            m.min_ax = m.min_ax.min(a);
            m.max_abs_jy = m
                .max_abs_jy
                .max(lateral_jerk(p[i].v, kappa[i], p[i + 1].v, kappa[i + 1], dt).abs());
            if let Some((a_prev, dt_prev)) = prev {
                m.max_abs_jx = m.max_abs_jx.max(junction_jerk(a_prev, a, dt_prev, dt).abs());
            }
            prev = Some((a, dt));
        }
        Ok(m)
    }
}

/// Extremes of the planned comfort quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileMetrics {
    pub max_speed: f64,
    pub max_ax: f64,
    pub min_ax: f64,
    pub max_abs_ay: f64,
    pub max_abs_jx: f64,
    pub max_abs_jy: f64,
}

impl ProfileMetrics {
    /// Human-readable list of bounds exceeded by more than `tol`.
    pub fn violations(&self, opm: &OccupantPreferenceMetric, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.max_ax > opm.ax_pos + tol {
            out.push(format!("ax {} > {}", self.max_ax, opm.ax_pos));
        }
        if self.min_ax < opm.ax_neg - tol {
            out.push(format!("ax {} < {}", self.min_ax, opm.ax_neg));
        }
        if self.max_abs_ay > opm.ay_abs + tol {
            out.push(format!("|ay| {} > {}", self.max_abs_ay, opm.ay_abs));
        }
        if self.max_abs_jx > opm.jx_abs + tol {
            out.push(format!("|jx| {} > {}", self.max_abs_jx, opm.jx_abs));
        }
        if self.max_abs_jy > opm.jy_abs + tol {
            out.push(format!("|jy| {} > {}", self.max_abs_jy, opm.jy_abs));
        }
        out
    }
}

/// Traversal time by the harmonic-trapezoid rule, `sum 2 h / (v_i + v_{i+1})`.
pub fn travel_time(profile: &VelocityProfile) -> Result<f64> {
    let p = profile.points();
    if p.len() < 2 {
        return Err(Error::StalledProfile("profile has no segments".into()));
    }
    p.windows(2).enumerate().try_fold(0.0, |acc, (i, w)| {
        let sum = w[0].v + w[1].v;
        if sum <= 0.0 {
            Err(Error::StalledProfile(format!("zero speed on segment {i}")))
        } else {
            Ok(acc + 2.0 * (w[1].s - w[0].s) / sum)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: f64, v: f64) -> ProfilePoint {
        ProfilePoint { s, v, ax_plan: 0.0, t: 0.0 }
    }

    #[test]
    fn constant_speed_time() {
        let s: Vec<f64> = (0..=100).map(f64::from).collect();
        let p = VelocityProfile::from_speeds(&s, &vec![10.0; 101]).unwrap();
        assert!((travel_time(&p).unwrap() - 10.0).abs() < 1e-12);
        assert!((p.total_time() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_linear_segment_time() {
        let p = VelocityProfile::from_points(vec![pt(0.0, 0.0), pt(100.0, 10.0)]).unwrap();
        assert!((travel_time(&p).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_stalled_profiles() {
        assert!(VelocityProfile::from_points(vec![]).is_err());
        let stalled = VelocityProfile::from_points(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 1.0)]).unwrap();
        assert!(matches!(travel_time(&stalled), Err(Error::StalledProfile(_))));
        assert!(matches!(
            VelocityProfile::from_speeds(&[0.0, 1.0], &[0.0, 0.0]),
            Err(Error::StalledProfile(_))
        ));
    }

    #[test]
    fn accelerations_are_consistent_with_speeds() {
        let s = [0.0, 1.0, 2.5, 4.0];
        let v = [0.0, 1.2, 1.9, 1.0];
        let p = VelocityProfile::from_speeds(&s, &v).unwrap();
        for i in 0..3 {
            let expect = (v[i + 1] * v[i + 1] - v[i] * v[i]) / (2.0 * (s[i + 1] - s[i]));
            assert!((p.points()[i].ax_plan - expect).abs() < 1e-12);
        }
        assert_eq!(p.points()[3].ax_plan, p.points()[2].ax_plan);
        assert!(p.points().windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn reference_lookup_interpolates_within_segment() {
        let p = VelocityProfile::from_speeds(&[0.0, 10.0], &[0.0, 10.0]).unwrap();
        let (v, a) = p.reference_at(2.5).unwrap();
        assert!((a - 5.0).abs() < 1e-12);
        assert!((v - 5.0).abs() < 1e-12);
        assert!(p.reference_at(10.5).is_err());
    }

    #[test]
    fn metrics_on_hand_computed_profile() {
        // a = 0.5 then 0 on two 1 m segments
        let s = [0.0, 1.0, 2.0];
        let v = [1.0, 2f64.sqrt(), 2f64.sqrt()];
        let p = VelocityProfile::from_speeds(&s, &v).unwrap();
        let m = p.metrics(&[0.0, 0.1, 0.1]).unwrap();
        assert!((m.max_ax - 0.5).abs() < 1e-12);
        let dt0 = 2.0 / (1.0 + 2f64.sqrt());
        let dt1 = 1.0 / 2f64.sqrt();
        assert!((m.max_abs_jx - 0.5 / (0.5 * (dt0 + dt1))).abs() < 1e-12);
        assert!((m.max_abs_jy - 0.2 / dt0).abs() < 1e-12);
        assert!((m.max_abs_ay - 0.2).abs() < 1e-12);
        let flagged = m.violations(&OccupantPreferenceMetric::CAUTIOUS, 1e-6);
        assert_eq!(flagged.len(), 1, "{flagged:?}");
        assert!(flagged[0].starts_with("|jx|"));
    }
}
