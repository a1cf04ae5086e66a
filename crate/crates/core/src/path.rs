//! Arc-length parameterized route geometry.
//!
//! Waypoints are interpolated with a centripetal Catmull-Rom spline,
//! resampled at uniform arc-length spacing, and curvature is taken from the
//! circle through each station and its two neighbours (Menger curvature).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One resampled point of a route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    /// Unwrapped heading in radians.
    pub heading: f64,
    /// Signed curvature in 1/m, positive when turning left.
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathGeometry {
    stations: Vec<Station>,
    closed: bool,
    length: f64,
}

/// Nearest point on a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the nearest point, in `[0, length]`.
    pub s: f64,
    pub x: f64,
    pub y: f64,
    /// Unsigned distance to the path.
    pub distance: f64,
    /// Signed offset, positive when the query point is left of the path.
    pub lateral: f64,
}

pub const DEFAULT_DS: f64 = 1.0;

/// Builds a resampled route from waypoints.
///
/// A closed route may repeat its first waypoint at the end; the duplicate is
/// dropped. Any other pair of coincident consecutive waypoints is rejected.
pub fn build_path(waypoints: &[(f64, f64)], closed: bool, ds: f64) -> Result<PathGeometry> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("station spacing must be positive, got {ds}")));
    }
    let mut points: Vec<[f64; 2]> = waypoints.iter().map(|&(x, y)| [x, y]).collect();
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateGeometry("non-finite waypoint".into()));
    }
    if closed && points.len() > 1 && dist(points[0], points[points.len() - 1]) < 1e-9 {
        points.pop();
    }
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    for (i, pair) in points.windows(2).enumerate() {
        if dist(pair[0], pair[1]) < 1e-9 {
            return Err(Error::DegenerateGeometry(format!(
                "waypoints {} and {} coincide at ({}, {})",
                i,
                i + 1,
                pair[0][0],
                pair[0][1]
            )));
        }
    }

    let spline = Spline::new(&points, closed);
    let dense = spline.dense_samples(ds / 16.0);
    let length = dense.last().map(|d| d.1).unwrap_or(0.0);
    if length <= 0.0 {
        return Err(Error::DegenerateGeometry("route has zero length".into()));
    }
    let segments = (length / ds).ceil().max(if closed { 3.0 } else { 1.0 }) as usize;
    let step = length / segments as f64;
    let count = if closed { segments } else { segments + 1 };

    let mut positions = Vec::with_capacity(count);
    let mut cursor = 0;
    for i in 0..count {
        let target = if !closed && i == segments { length } else { i as f64 * step };
        while cursor + 2 < dense.len() && dense[cursor + 1].1 < target {
            cursor += 1;
        }
        let (u0, s0) = dense[cursor];
        let (u1, s1) = dense[cursor + 1];
        let frac = if s1 > s0 { ((target - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 0.0 };
        positions.push(spline.eval(u0 + frac * (u1 - u0)));
    }

    let stations = stations_from_positions(&positions, closed, step);
    Ok(PathGeometry {
        stations,
        closed,
        length,
    })
}

fn stations_from_positions(p: &[[f64; 2]], closed: bool, step: f64) -> Vec<Station> {
    let n = p.len();
    let at = |i: isize| -> [f64; 2] { p[i.rem_euclid(n as isize) as usize] };

    let mut headings = Vec::with_capacity(n);
    for i in 0..n as isize {
        let (a, b) = if closed {
            (at(i - 1), at(i + 1))
        } else if i == 0 {
            (p[0], p[1])
        } else if i as usize == n - 1 {
            (p[n - 2], p[n - 1])
        } else {
            (at(i - 1), at(i + 1))
        };
        headings.push((b[1] - a[1]).atan2(b[0] - a[0]));
    }
    for i in 1..n {
        let mut h = headings[i];
        while h - headings[i - 1] > PI {
            h -= 2.0 * PI;
        }
        while h - headings[i - 1] < -PI {
            h += 2.0 * PI;
        }
        headings[i] = h;
    }

    let mut kappa = vec![0.0; n];
    for i in 0..n as isize {
        if !closed && (i == 0 || i as usize == n - 1) {
            continue;
        }
        kappa[i as usize] = menger_curvature(at(i - 1), at(i), at(i + 1));
    }
    if !closed && n >= 3 {
        kappa[0] = kappa[1];
        kappa[n - 1] = kappa[n - 2];
    }

    (0..n)
        .map(|i| Station {
            s: i as f64 * step,
            x: p[i][0],
            y: p[i][1],
            heading: headings[i],
            kappa: kappa[i],
        })
        .collect()
}

/// Signed curvature of the circle through three points.
pub fn menger_curvature(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    let denom = dist(a, b) * dist(b, c) * dist(a, c);
    if denom == 0.0 {
        0.0
    } else {
        2.0 * cross / denom
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Centripetal Catmull-Rom spline through the waypoints.
struct Spline {
    /// Per span: four control points and their knot values.
    spans: Vec<([[f64; 2]; 4], [f64; 4])>,
}

impl Spline {
    fn new(points: &[[f64; 2]], closed: bool) -> Self {
        let n = points.len();
        let get = |i: isize| -> [f64; 2] {
            if closed {
                points[i.rem_euclid(n as isize) as usize]
            } else if i < 0 {
                let (a, b) = (points[0], points[1]);
                [2.0 * a[0] - b[0], 2.0 * a[1] - b[1]]
            } else if i as usize >= n {
                let (a, b) = (points[n - 1], points[n - 2]);
                [2.0 * a[0] - b[0], 2.0 * a[1] - b[1]]
            } else {
                points[i as usize]
            }
        };
        let span_count = if closed { n } else { n - 1 };
        let spans = (0..span_count as isize)
            .map(|j| {
                let ctrl = [get(j - 1), get(j), get(j + 1), get(j + 2)];
                let mut knots = [0.0; 4];
                for k in 1..4 {
                    knots[k] = knots[k - 1] + dist(ctrl[k - 1], ctrl[k]).sqrt().max(1e-12);
                }
                (ctrl, knots)
            })
            .collect();
        Self { spans }
    }

    /// Evaluates at global parameter `u` (span index + local fraction).
    fn eval(&self, u: f64) -> [f64; 2] {
        let j = (u.floor() as usize).min(self.spans.len() - 1);
        let f = u - j as f64;
        let (p, t) = &self.spans[j];
        let tt = t[1] + f * (t[2] - t[1]);
        let lerp = |a: [f64; 2], b: [f64; 2], ta: f64, tb: f64| -> [f64; 2] {
            let w = (tt - ta) / (tb - ta);
            [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]
        };
        let a1 = lerp(p[0], p[1], t[0], t[1]);
        let a2 = lerp(p[1], p[2], t[1], t[2]);
        let a3 = lerp(p[2], p[3], t[2], t[3]);
        let b1 = lerp(a1, a2, t[0], t[2]);
        let b2 = lerp(a2, a3, t[1], t[3]);
        lerp(b1, b2, t[1], t[2])
    }

    /// `(u, cumulative length)` pairs with sub-steps no longer than `max_step`.
    fn dense_samples(&self, max_step: f64) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0)];
        let mut prev = self.eval(0.0);
        let mut total = 0.0;
        for (j, (p, _)) in self.spans.iter().enumerate() {
            let chord = dist(p[1], p[2]);
            let sub = ((chord / max_step).ceil() as usize).max(16);
            for k in 1..=sub {
                let u = j as f64 + k as f64 / sub as f64;
                let q = self.eval(u);
                total += dist(prev, q);
                out.push((u, total));
                prev = q;
            }
        }
        out
    }
}

impl PathGeometry {
    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Total arc length (for closed routes, the length of one lap).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Wraps a path from already-computed stations. Stations must start at
    /// `s = 0` with strictly increasing arc length.
    pub fn from_stations(stations: Vec<Station>, closed: bool, length: f64) -> Result<Self> {
        if stations.len() < 2 {
            return Err(Error::InsufficientPoints {
                needed: 2,
                got: stations.len(),
            });
        }
        if stations.windows(2).any(|w| w[1].s <= w[0].s) || stations[0].s != 0.0 {
            return Err(Error::DegenerateGeometry("station arc lengths must increase from 0".into()));
        }
        if length < stations[stations.len() - 1].s {
            return Err(Error::DegenerateGeometry("length shorter than last station".into()));
        }
        Ok(Self {
            stations,
            closed,
            length,
        })
    }

    /// Station arc lengths and curvatures for speed planning. Closed routes
    /// get an extra closing station at `s = length` so that a profile covers
    /// one full lap.
    pub fn planning_stations(&self) -> (Vec<f64>, Vec<f64>) {
        let mut s: Vec<f64> = self.stations.iter().map(|st| st.s).collect();
        let mut k: Vec<f64> = self.stations.iter().map(|st| st.kappa).collect();
        if self.closed {
            s.push(self.length);
            k.push(self.stations[0].kappa);
        }
        (s, k)
    }

    fn normalize(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::OutOfRange {
                value: s,
                min: 0.0,
                max: self.length,
            });
        }
        if self.closed {
            Ok(s.rem_euclid(self.length))
        } else if s < -1e-9 || s > self.length + 1e-9 {
            Err(Error::OutOfRange {
                value: s,
                min: 0.0,
                max: self.length,
            })
        } else {
            Ok(s.clamp(0.0, self.length))
        }
    }

    /// Index of the station at or before `s` plus the fraction to the next.
    fn bracket(&self, s: f64) -> (usize, usize, f64) {
        let n = self.stations.len();
        let i = self.stations.partition_point(|st| st.s <= s).saturating_sub(1);
        if self.closed {
            let j = (i + 1) % n;
            let s1 = if j == 0 { self.length } else { self.stations[j].s };
            let frac = (s - self.stations[i].s) / (s1 - self.stations[i].s);
            (i, j, frac.clamp(0.0, 1.0))
        } else if i + 1 >= n {
            (n - 2, n - 1, 1.0)
        } else {
            let frac = (s - self.stations[i].s) / (self.stations[i + 1].s - self.stations[i].s);
            (i, i + 1, frac.clamp(0.0, 1.0))
        }
    }

    /// Curvature at arc length `s`, linearly interpolated between stations.
    /// Closed routes wrap `s` modulo the lap length.
    pub fn curvature_at(&self, s: f64) -> Result<f64> {
        let s = self.normalize(s)?;
        let (i, j, f) = self.bracket(s);
        Ok(self.stations[i].kappa + f * (self.stations[j].kappa - self.stations[i].kappa))
    }

    /// Position and heading at arc length `s`. On open routes, `s` beyond
    /// either end extrapolates along the end tangent.
    pub fn pose_at(&self, s: f64) -> (f64, f64, f64) {
        let n = self.stations.len();
        if !self.closed {
            let (end, overshoot) = if s < 0.0 {
                (&self.stations[0], s)
            } else if s > self.length {
                (&self.stations[n - 1], s - self.length)
            } else {
                (&self.stations[0], 0.0)
            };
            if overshoot != 0.0 {
                let (sin, cos) = end.heading.sin_cos();
                return (end.x + overshoot * cos, end.y + overshoot * sin, end.heading);
            }
        }
        let s = if self.closed { s.rem_euclid(self.length) } else { s };
        let (i, _, f) = self.bracket(s);
        // quadratic through the bracketing stations and one neighbour
        let c = self.center_index(if f < 0.5 { i } else { i + 1 });
        let t = (s - self.unwrapped_s(c, i)) / self.spacing(c);
        let (p, _, _) = self.quadratic(c, t);
        let (x0, x1) = (self.stations[i].heading, self.stations[(i + 1) % n].heading);
        let heading = if self.closed || i + 1 < n {
            let dh = wrap_angle(x1 - x0);
            x0 + f * dh
        } else {
            x0
        };
        (p[0], p[1], heading)
    }

    fn spacing(&self, c: usize) -> f64 {
        let n = self.stations.len();
        let next = if c + 1 < n { self.stations[c + 1].s } else { self.length };
        let prev = if c > 0 { self.stations[c - 1].s } else { self.stations[n - 1].s - self.length };
        0.5 * (next - prev)
    }

    /// Arc length of station `c` expressed on the same lap as station `near`.
    fn unwrapped_s(&self, c: usize, near: usize) -> f64 {
        let n = self.stations.len();
        let c = c % n;
        let s = self.stations[c].s;
        if self.closed {
            let ref_s = self.stations[near % n].s;
            if s - ref_s > 0.5 * self.length {
                s - self.length
            } else if ref_s - s > 0.5 * self.length {
                s + self.length
            } else {
                s
            }
        } else {
            s
        }
    }

    fn center_index(&self, i: usize) -> usize {
        let n = self.stations.len();
        if self.closed {
            i % n
        } else {
            i.clamp(1, n.saturating_sub(2).max(1))
        }
    }

    fn point(&self, i: isize) -> [f64; 2] {
        let n = self.stations.len() as isize;
        let st = &self.stations[i.rem_euclid(n) as usize];
        [st.x, st.y]
    }

    /// Quadratic through stations c-1, c, c+1 at local parameter t (t = ±1
    /// at the neighbours). Returns point, first and second derivative in t.
    fn quadratic(&self, c: usize, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let n = self.stations.len();
        if n == 2 {
            let (a, b) = (self.point(0), self.point(1));
            let d = [0.5 * (b[0] - a[0]), 0.5 * (b[1] - a[1])];
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            return ([m[0] + t * d[0], m[1] + t * d[1]], d, [0.0, 0.0]);
        }
        let c = c as isize;
        let (a, b, e) = (self.point(c - 1), self.point(c), self.point(c + 1));
        let d1 = [0.5 * (e[0] - a[0]), 0.5 * (e[1] - a[1])];
        let d2 = [e[0] - 2.0 * b[0] + a[0], e[1] - 2.0 * b[1] + a[1]];
        (
            [b[0] + t * d1[0] + 0.5 * t * t * d2[0], b[1] + t * d1[1] + 0.5 * t * t * d2[1]],
            [d1[0] + t * d2[0], d1[1] + t * d2[1]],
            d2,
        )
    }

    /// Nearest point on the path to `(x, y)`, searching every station.
    pub fn project(&self, x: f64, y: f64) -> Projection {
        let best = (0..self.stations.len())
            .min_by(|&a, &b| {
                let da = sq_dist(&self.stations[a], x, y);
                let db = sq_dist(&self.stations[b], x, y);
                da.total_cmp(&db)
            })
            .unwrap_or(0);
        self.refine(best, x, y)
    }

    /// Nearest point restricted to stations within `window` metres of arc
    /// length around `s_hint`.
    pub fn project_near(&self, x: f64, y: f64, s_hint: f64, window: f64) -> Projection {
        let n = self.stations.len();
        let spacing = self.length / if self.closed { n } else { n - 1 } as f64;
        let reach = (window / spacing).ceil() as isize + 1;
        if 2 * reach as usize + 1 >= n {
            return self.project(x, y);
        }
        let s_hint = if self.closed { s_hint.rem_euclid(self.length) } else { s_hint.clamp(0.0, self.length) };
        let center = self.stations.partition_point(|st| st.s <= s_hint).saturating_sub(1) as isize;
        let mut best = center;
        let mut best_d = f64::INFINITY;
        for k in center - reach..=center + reach {
            let idx = if self.closed {
                k.rem_euclid(n as isize)
            } else if k < 0 || k >= n as isize {
                continue;
            } else {
                k
            };
            let d = sq_dist(&self.stations[idx as usize], x, y);
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        self.refine(best as usize, x, y)
    }

    fn refine(&self, nearest: usize, x: f64, y: f64) -> Projection {
        let n = self.stations.len();
        let c = self.center_index(nearest);
        let q = [x, y];
        let objective = |t: f64| {
            let (p, _, _) = self.quadratic(c, t);
            (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
        };
        let mut t = [-1.0, -0.5, 0.0, 0.5, 1.0]
            .into_iter()
            .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
            .unwrap_or(0.0);
        for _ in 0..20 {
            let (p, d, dd) = self.quadratic(c, t);
            let r = [p[0] - q[0], p[1] - q[1]];
            let g = r[0] * d[0] + r[1] * d[1];
            let h = d[0] * d[0] + d[1] * d[1] + r[0] * dd[0] + r[1] * dd[1];
            let step = if h > 0.0 { g / h } else { g / (d[0] * d[0] + d[1] * d[1]).max(1e-12) };
            let next = (t - step).clamp(-1.0, 1.0);
            if (next - t).abs() < 1e-14 {
                t = next;
                break;
            }
            t = next;
        }
        let (p, d, _) = self.quadratic(c, t);
        let s_c = if n == 2 { 0.5 * self.stations[1].s } else { self.stations[c].s };
        let spacing = if n == 2 { 0.5 * self.stations[1].s } else { self.spacing(c) };
        let mut s = s_c + t * spacing;
        s = if self.closed { s.rem_euclid(self.length) } else { s.clamp(0.0, self.length) };
        let r = [q[0] - p[0], q[1] - p[1]];
        let distance = r[0].hypot(r[1]);
        let cross = d[0] * r[1] - d[1] * r[0];
        Projection {
            s,
            x: p[0],
            y: p[1],
            distance,
            lateral: if cross >= 0.0 { distance } else { -distance },
        }
    }
}

fn sq_dist(st: &Station, x: f64, y: f64) -> f64 {
    (st.x - x).powi(2) + (st.y - y).powi(2)
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle(radius: f64, step_deg: f64) -> Vec<(f64, f64)> {
        let n = (360.0 / step_deg).round() as usize;
        (0..n)
            .map(|i| {
                let a = (i as f64 * step_deg).to_radians();
                (radius * a.cos(), radius * a.sin())
            })
            .collect()
    }

    #[test]
    fn straight_line_has_zero_curvature() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64 * 25.0, 0.0)).collect();
        let path = build_path(&pts, false, 1.0).unwrap();
        assert!(path.stations().iter().all(|st| st.kappa == 0.0 && st.y == 0.0));
        assert!((path.length() - 100.0).abs() < 1e-9);
        assert_eq!(path.len(), 101);
        assert_eq!(path.curvature_at(37.3).unwrap(), 0.0);
    }

    #[test]
    fn circle_curvature_matches_inverse_radius() {
        let path = build_path(&circle(50.0, 1.0), true, 1.0).unwrap();
        for st in path.stations() {
            assert!((st.kappa - 0.02).abs() < 1e-3, "kappa {} at s={}", st.kappa, st.s);
        }
        let analytic = 2.0 * PI * 50.0;
        assert!((path.length() - analytic).abs() / analytic < 1e-3);
        let chords: f64 = path
            .stations()
            .iter()
            .zip(path.stations().iter().cycle().skip(1))
            .map(|(a, b)| (b.x - a.x).hypot(b.y - a.y))
            .sum();
        assert!((chords - analytic).abs() / analytic < 1e-3);
        for s in [0.0, 12.3, 100.0, 250.0] {
            assert!((path.curvature_at(s).unwrap() - 0.02).abs() < 1e-3);
        }
    }

    #[test]
    fn spacing_and_heading_invariants() {
        let path = build_path(&circle(20.0, 5.0), true, 0.7).unwrap();
        for w in path.stations().windows(2) {
            assert!(w[1].s > w[0].s);
            assert!(w[1].s - w[0].s <= 0.7 + 1e-12);
            assert!((w[1].heading - w[0].heading).abs() < 0.5);
        }
    }

    #[test]
    fn too_few_or_duplicate_waypoints() {
        assert!(matches!(
            build_path(&[(0.0, 0.0), (1.0, 0.0)], false, 1.0),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
        assert!(matches!(
            build_path(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (2.0, 0.0)], false, 1.0),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(build_path(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], false, 0.0).is_err());
    }

    #[test]
    fn closed_route_drops_repeated_start() {
        let mut pts = circle(30.0, 10.0);
        pts.push(pts[0]);
        let a = build_path(&pts, true, 1.0).unwrap();
        let b = build_path(&circle(30.0, 10.0), true, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn curvature_lookup_wraps_and_bounds() {
        let closed = build_path(&circle(40.0, 2.0), true, 1.0).unwrap();
        let l = closed.length();
        assert_eq!(closed.curvature_at(l + 5.0).unwrap(), closed.curvature_at(5.0).unwrap());
        let open = build_path(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)], false, 1.0).unwrap();
        assert!(matches!(open.curvature_at(25.0), Err(Error::OutOfRange { .. })));
        assert!(open.curvature_at(-1.0).is_err());
        assert!(open.curvature_at(20.0).is_ok());
    }

    #[test]
    fn projection_on_circle_is_exact_to_sub_millimetre() {
        let path = build_path(&circle(30.0, 1.0), true, 1.0).unwrap();
        for k in 0..50 {
            let a = k as f64 * 0.1237;
            let r = 30.0 + 0.2 * ((k % 5) as f64 - 2.0);
            let p = path.project(r * a.cos(), r * a.sin());
            assert!((p.distance - (r - 30.0).abs()).abs() < 2e-4, "{} vs {}", p.distance, r - 30.0);
            // circle runs counter-clockwise, so inside is left
            if r < 30.0 {
                assert!(p.lateral > 0.0);
            }
        }
    }

    #[test]
    fn windowed_projection_agrees_with_global() {
        let path = build_path(&circle(30.0, 1.0), true, 1.0).unwrap();
        let a: f64 = 1.0;
        let (x, y) = (30.3 * a.cos(), 30.3 * a.sin());
        let global = path.project(x, y);
        let local = path.project_near(x, y, global.s + 3.0, 10.0);
        assert!((global.s - local.s).abs() < 1e-9);
        // hint on the other side of the seam
        let near_seam = path.project_near(30.1, -0.05, path.length() - 0.5, 10.0);
        assert!(near_seam.distance < 0.2);
    }

    #[test]
    fn pose_extrapolates_past_open_end() {
        let path = build_path(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)], false, 1.0).unwrap();
        let (x, y, h) = path.pose_at(25.0);
        assert!((x - 25.0).abs() < 1e-12 && y.abs() < 1e-12 && h.abs() < 1e-12);
        let (x, _, _) = path.pose_at(12.5);
        assert!((x - 12.5).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn deterministic(seed in 0u64..1000) {
            let pts: Vec<(f64, f64)> = (0..6)
                .map(|i| {
                    let t = i as f64 + (seed as f64 * 0.37).sin();
                    (t * 15.0, (t * 0.7 + seed as f64).sin() * 8.0)
                })
                .collect();
            let a = build_path(&pts, false, 1.0);
            let b = build_path(&pts, false, 1.0);
            prop_assert_eq!(a.is_ok(), b.is_ok());
            if let (Ok(a), Ok(b)) = (a, b) {
                for (x, y) in a.stations().iter().zip(b.stations()) {
                    prop_assert_eq!(x.x.to_bits(), y.x.to_bits());
                    prop_assert_eq!(x.kappa.to_bits(), y.kappa.to_bits());
                }
            }
        }
    }
}
