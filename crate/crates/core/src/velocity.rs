//! Minimum-time velocity planning under the comfort bounds.
//!
//! The planner is a two-pass sweep over the planning stations:
//!
//! 1. A backward pass builds a speed envelope `E[i][a]`: the highest speed
//!    at station `i`, having arrived with segment acceleration `a`, from
//!    which the rest of the route can still be driven within every bound
//!    and finish at `v_end`. Accelerations are drawn from a fine grid.
//! 2. A forward label search starts at `v_start` and branches over the
//!    grid accelerations that keep the next speed under the envelope and
//!    satisfy the jerk and lateral-jerk limits. Labels are thinned to the
//!    earliest one per (acceleration, speed cell), and the earliest label at
//!    the last station is traced back.
//!
//! When the problem reads the same from both ends (symmetric route, equal
//! boundary speeds, braking limit equal to the acceleration limit), the
//! first half of the result is mirrored onto the second half if the joint
//! is feasible, which removes the small bias of a one-directional search.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::opm::OccupantPreferenceMetric;
use crate::path::PathGeometry;
use crate::profile::{junction_jerk, lateral_jerk, segment_time, BoundaryConditions, VelocityProfile};

/// Curvature floor used when converting the lateral limit to a speed cap.
pub const KAPPA_FLOOR: f64 = 1e-9;

/// Absolute slack on every constraint check inside the planner.
pub(crate) const CHECK_TOL: f64 = 1e-9;

/// Per-station speed caps from the lateral-acceleration limit:
/// `min(v_global_max, sqrt(ay_abs / max(|kappa|, 1e-9)))`.
///
/// Closed routes include the closing station at `s = length`.
pub fn curvature_speed_cap(path: &PathGeometry, opm: &OccupantPreferenceMetric, v_global_max: f64) -> Vec<f64> {
    let (_, kappa) = path.planning_stations();
    caps_for(&kappa, opm.ay_abs, v_global_max)
}

pub(crate) fn caps_for(kappa: &[f64], ay_abs: f64, v_global_max: f64) -> Vec<f64> {
    kappa
        .iter()
        .map(|k| v_global_max.min((ay_abs / k.abs().max(KAPPA_FLOOR)).sqrt()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerOptions {
    /// Spacing of the acceleration grid, m/s².
    pub accel_step: f64,
    /// Width of the speed cells used to thin the forward search, m/s.
    pub speed_cell: f64,
    /// Labels kept per grid acceleration at each station, earliest first.
    pub per_accel: usize,
    pub execution: Execution,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self {
            accel_step: 0.03,
            speed_cell: 0.1,
            per_accel: 16,
            execution: Execution::default(),
        }
    }
}

/// Discretized speed-planning problem shared by the planner and the oracle.
#[derive(Debug, Clone)]
pub(crate) struct SpeedProblem {
    pub s: Vec<f64>,
    /// Segment lengths, `h[i] = s[i + 1] - s[i]`.
    pub h: Vec<f64>,
    pub kappa: Vec<f64>,
    pub cap: Vec<f64>,
    pub opm: OccupantPreferenceMetric,
    pub v_start: f64,
    pub v_end: f64,
}

impl SpeedProblem {
    pub fn new(path: &PathGeometry, opm: &OccupantPreferenceMetric, bc: &BoundaryConditions) -> Result<Self> {
        bc.validate()?;
        let (s, kappa) = path.planning_stations();
        if s.len() < 2 {
            return Err(Error::Precondition("path needs at least two stations".into()));
        }
        let h = s.windows(2).map(|w| w[1] - w[0]).collect();
        let cap = caps_for(&kappa, opm.ay_abs, bc.v_global_max);
        let problem = Self {
            s,
            h,
            kappa,
            cap,
            opm: *opm,
            v_start: bc.v_start,
            v_end: bc.v_end,
        };
        problem.check_boundaries()?;
        Ok(problem)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    fn check_boundaries(&self) -> Result<()> {
        let n = self.len();
        if self.v_start > self.cap[0] + CHECK_TOL {
            return Err(Error::Infeasible {
                station: 0,
                reason: format!("v_start {} exceeds the speed cap {}", self.v_start, self.cap[0]),
            });
        }
        if self.v_end > self.cap[n - 1] + CHECK_TOL {
            return Err(Error::Infeasible {
                station: n - 1,
                reason: format!("v_end {} exceeds the speed cap {}", self.v_end, self.cap[n - 1]),
            });
        }
        Ok(())
    }

    /// `true` when driving the route backwards poses the same problem.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        let mirror = |x: &[f64], sign: f64| (0..x.len()).all(|i| close(x[i], sign * x[x.len() - 1 - i]));
        n >= 2
            && self.v_start == self.v_end
            && self.opm.ax_pos == -self.opm.ax_neg
            && mirror(&self.h, 1.0)
            && mirror(&self.cap, 1.0)
            && (mirror(&self.kappa, 1.0) || mirror(&self.kappa, -1.0))
    }

    /// Checks the move from station `i` at speed `v` (arrived with
    /// `incoming = (a_prev, v_prev)`) to speed `w` at station `i + 1`.
    pub fn transition_ok(&self, i: usize, v: f64, incoming: Option<(f64, f64)>, w: f64) -> bool {
        self.transition_slack(i, v, incoming, w) >= -CHECK_TOL
    }

    /// Smallest margin over all constraints of a move; negative when
    /// infeasible and `-inf` for moves that stall or reverse.
    pub fn transition_slack(&self, i: usize, v: f64, incoming: Option<(f64, f64)>, w: f64) -> f64 {
        let h = self.h[i];
        if !(w >= 0.0) || v + w <= 0.0 || (i + 1 < self.len() - 1 && w <= 0.0) {
            return f64::NEG_INFINITY;
        }
        let a = (w * w - v * v) / (2.0 * h);
        let dt = segment_time(h, v, w);
        let jy = lateral_jerk(v, self.kappa[i], w, self.kappa[i + 1], dt);
        let mut slack = (self.cap[i + 1] - w)
            .min(self.opm.ax_pos - a)
            .min(a - self.opm.ax_neg)
            .min(self.opm.jy_abs - jy.abs());
        if let Some((a_prev, v_prev)) = incoming {
            let dt_prev = segment_time(self.h[i - 1], v_prev, v);
            slack = slack.min(self.opm.jx_abs - junction_jerk(a_prev, a, dt_prev, dt).abs());
        }
        slack
    }

    /// Speed at station `i - 1` implied by speed `v` at `i` and segment
    /// acceleration `a_prev`.
    pub fn previous_speed(&self, i: usize, v: f64, a_prev: f64) -> Option<f64> {
        let r = v * v - 2.0 * a_prev * self.h[i - 1];
        if r < -1e-12 {
            None
        } else {
            Some(r.max(0.0).sqrt())
        }
    }

    /// Plain acceleration-limited forward/backward profile (no jerk). Every
    /// feasible profile lies at or below it.
    pub fn acceleration_limited_bound(&self) -> Vec<f64> {
        let n = self.len();
        let mut v = self.cap.clone();
        v[0] = v[0].min(self.v_start);
        v[n - 1] = v[n - 1].min(self.v_end);
        for i in 0..n - 1 {
            let reach = (v[i] * v[i] + 2.0 * self.opm.ax_pos * self.h[i]).sqrt();
            v[i + 1] = v[i + 1].min(reach);
        }
        for i in (0..n - 1).rev() {
            let reach = (v[i + 1] * v[i + 1] - 2.0 * self.opm.ax_neg * self.h[i]).sqrt();
            v[i] = v[i].min(reach);
        }
        v
    }
}

pub(crate) fn accel_grid(ax_neg: f64, ax_pos: f64, step: f64) -> Vec<f64> {
    let lo = (ax_neg / step).ceil() as i64;
    let hi = (ax_pos / step).floor() as i64;
    let mut grid: Vec<f64> = (lo..=hi).map(|k| k as f64 * step).collect();
    if grid.first().is_none_or(|&g| g - ax_neg > 1e-12) {
        grid.insert(0, ax_neg);
    }
    if grid.last().is_none_or(|&g| ax_pos - g > 1e-12) {
        grid.push(ax_pos);
    }
    grid
}

const DEAD: f64 = -1.0;

/// Largest `v` in `[lo, hi]` with `slack(v) >= 0`, assuming the feasible
/// set is a prefix of the interval. Returns `None` when `lo` is infeasible.
pub(crate) fn largest_feasible(lo: f64, hi: f64, slack: impl Fn(f64) -> f64) -> Option<f64> {
    let mut fb = slack(hi);
    if fb >= 0.0 {
        return Some(hi);
    }
    let mut fa = slack(lo);
    if !(fa >= 0.0) {
        return None;
    }
    // Illinois regula falsi, bisecting whenever a slack is not finite
    let (mut a, mut b) = (lo, hi);
    let mut side = 0;
    for _ in 0..100 {
        if b - a <= 1e-12 * b.max(1.0) {
            break;
        }
        let x = if fa.is_finite() && fb.is_finite() && fa != fb {
            let x = b - fb * (b - a) / (fb - fa);
            if x > a && x < b {
                x
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        let fx = slack(x);
        if fx >= 0.0 {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Some(a)
}

struct Sweep<'a> {
    p: &'a SpeedProblem,
    grid: Vec<f64>,
    /// envelope[i][k]: max speed at station i after arriving with grid[k].
    envelope: Vec<Vec<f64>>,
}

impl<'a> Sweep<'a> {
    fn new(p: &'a SpeedProblem, step: f64, exec: Execution) -> Self {
        let grid = accel_grid(p.opm.ax_neg, p.opm.ax_pos, step);
        let n = p.len();
        let m = grid.len();
        let mut envelope = vec![vec![DEAD; m]; n];
        envelope[n - 1] = vec![p.v_end; m];
        if n >= 3 {
            envelope[n - 2] = exec.map_range(m, |k| Self::terminal_envelope(p, grid[k]));
            for i in (1..n - 2).rev() {
                let next = &envelope[i + 1];
                let row = exec.map_range(m, |j| Self::interior_envelope(p, &grid, next, i, j));
                envelope[i] = row;
            }
        }
        Self { p, grid, envelope }
    }

    /// Envelope at station n-2, whose outgoing segment must end at v_end.
    fn terminal_envelope(p: &SpeedProblem, a_prev: f64) -> f64 {
        let i = p.len() - 2;
        let min_state = (2.0 * a_prev * p.h[i - 1]).max(0.0).sqrt();
        let hi = p.cap[i];
        if hi < min_state {
            return DEAD;
        }
        let ok = |v: f64| match p.previous_speed(i, v, a_prev) {
            Some(v_prev) => v > 0.0 && p.transition_ok(i, v, Some((a_prev, v_prev)), p.v_end),
            None => false,
        };
        const SAMPLES: usize = 256;
        let mut prev_bad = None;
        for k in 0..=SAMPLES {
            let v = hi - (hi - min_state) * k as f64 / SAMPLES as f64;
            if ok(v) {
                return match prev_bad {
                    None => v,
                    Some(bad) => {
                        let (mut a, mut b) = (v, bad);
                        for _ in 0..60 {
                            let mid = 0.5 * (a + b);
                            if ok(mid) {
                                a = mid;
                            } else {
                                b = mid;
                            }
                        }
                        a
                    }
                };
            }
            prev_bad = Some(v);
        }
        DEAD
    }

    fn interior_envelope(p: &SpeedProblem, grid: &[f64], next: &[f64], i: usize, j: usize) -> f64 {
        let a_prev = grid[j];
        let h = p.h[i];
        let span = p.h[i - 1] + h;
        let state_min = (2.0 * a_prev * p.h[i - 1]).max(0.0).sqrt();
        let mut best = DEAD;
        let consider = |k: usize, best: &mut f64| {
            let a = grid[k];
            let e = next[k];
            if e < 0.0 {
                return;
            }
            let r = e * e - 2.0 * a * h;
            if r < 0.0 {
                return;
            }
            let hi = p.cap[i].min(r.sqrt());
            let lo = state_min.max((-2.0 * a * h).max(0.0).sqrt());
            if hi <= *best || hi < lo {
                return;
            }
            let w_of = |v: f64| (v * v + 2.0 * a * h).max(0.0).sqrt();
            let slack = |v: f64| {
                if v <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                match p.previous_speed(i, v, a_prev) {
                    Some(v_prev) => {
                        let w = w_of(v);
                        (p.transition_slack(i, v, Some((a_prev, v_prev)), w) + CHECK_TOL).min(e - w)
                    }
                    None => f64::NEG_INFINITY,
                }
            };
            let lo = if lo > 0.0 { lo } else { (hi * 1e-6).min(1e-6) };
            if let Some(v) = largest_feasible(lo, hi, slack) {
                if v > *best {
                    *best = v;
                }
            }
        };
        // scan outward from a_prev; jerk caps v at jx * span / |a - a_prev|
        let bound = |k: usize| {
            let da = (grid[k] - a_prev).abs();
            if da == 0.0 {
                f64::INFINITY
            } else {
                p.opm.jx_abs * span / da
            }
        };
        for k in j..grid.len() {
            if bound(k) <= best {
                break;
            }
            consider(k, &mut best);
        }
        for k in (0..j).rev() {
            if bound(k) <= best {
                break;
            }
            consider(k, &mut best);
        }
        best
    }

    /// Forward label search under the envelope. A label is a speed at a
    /// station together with the grid acceleration it arrived with. After
    /// each station only the earliest label per `(acceleration, speed cell)`
    /// is kept, and of those at most `per_accel` per acceleration.
    fn search(&self, speed_cell: f64, per_accel: usize) -> Result<Vec<f64>> {
        let p = self.p;
        let n = p.len();
        let m = self.grid.len();
        let v_top = p.cap.iter().copied().fold(p.v_start, f64::max);
        let rows = (v_top / speed_cell) as usize + 2;
        // slot = k * rows + speed cell; a slot is live if stamped this station
        let mut slot_label = vec![0u32; m * rows];
        let mut slot_stamp = vec![u32::MAX; m * rows];
        let mut touched: Vec<usize> = Vec::new();
        let mut layers: Vec<Vec<Label>> = Vec::with_capacity(n);
        layers.push(vec![Label {
            v: p.v_start,
            k: NO_ACCEL,
            a: 0.0,
            dt: 0.0,
            t: 0.0,
            parent: 0,
        }]);
        for i in 0..n - 1 {
            let mut next: Vec<Label> = Vec::new();
            touched.clear();
            let stamp = i as u32;
            for (idx, label) in layers[i].iter().enumerate() {
                self.expand(i, idx as u32, label, |cand| {
                    let slot = cand.k as usize * rows + ((cand.v / speed_cell) as usize).min(rows - 1);
                    if slot_stamp[slot] != stamp {
                        slot_stamp[slot] = stamp;
                        slot_label[slot] = next.len() as u32;
                        touched.push(slot);
                        next.push(cand);
                    } else {
                        let kept = &mut next[slot_label[slot] as usize];
                        if cand.t < kept.t {
                            *kept = cand;
                        }
                    }
                });
            }
            if next.is_empty() {
                return Err(Error::Infeasible {
                    station: i,
                    reason: if i + 1 == n - 1 {
                        format!("cannot reach v_end = {}", p.v_end)
                    } else {
                        "no admissible acceleration".into()
                    },
                });
            }
            touched.sort_unstable();
            let mut layer: Vec<Label> = touched.iter().map(|&slot| next[slot_label[slot] as usize]).collect();
            if layer.len() > per_accel {
                layer = thin_per_accel(layer, per_accel);
            }
            layers.push(layer);
        }
        let last = &layers[n - 1];
        let mut best = 0;
        for (k, label) in last.iter().enumerate() {
            if label.t < last[best].t {
                best = k;
            }
        }
        let mut v = vec![0.0; n];
        let mut k = best;
        for i in (0..n).rev() {
            v[i] = layers[i][k].v;
            k = layers[i][k].parent as usize;
        }
        Ok(v)
    }

    fn expand(&self, i: usize, parent: u32, label: &Label, mut emit: impl FnMut(Label)) {
        let p = self.p;
        let h = p.h[i];
        let v = label.v;
        let v2 = v * v;
        let make = |w: f64, k: u32| {
            let dt = segment_time(h, v, w);
            Label {
                v: w,
                k,
                a: (w * w - v2) / (2.0 * h),
                dt,
                t: label.t + dt,
                parent,
            }
        };
        let incoming = (label.k != NO_ACCEL).then_some((label.a, v_prev(v2, label.a, p.h.get(i.wrapping_sub(1)))));
        if i + 1 == p.len() - 1 {
            if p.transition_ok(i, v, incoming, p.v_end) {
                emit(make(p.v_end, 0));
            }
            return;
        }
        let envelope = &self.envelope[i + 1];
        let (k0, k1) = (p.kappa[i], p.kappa[i + 1]);
        let lat0 = v2 * k0;
        let (jx, jy, tol) = (p.opm.jx_abs, p.opm.jy_abs, CHECK_TOL);
        // returns false once the jerk band is left
        let mut try_k = |k: usize| -> bool {
            let w2 = v2 + 2.0 * self.grid[k] * h;
            if w2 <= 0.0 {
                return false;
            }
            let w = w2.sqrt();
            let dt = 2.0 * h / (v + w);
            let a = (w2 - v2) / (2.0 * h);
            if label.k != NO_ACCEL && (a - label.a).abs() > (jx + tol) * 0.5 * (label.dt + dt) {
                return false;
            }
            if w <= envelope[k] * (1.0 + 1e-12) + 1e-12 && (w2 * k1 - lat0).abs() <= (jy + tol) * dt {
                emit(make(w, k as u32));
            }
            true
        };
        if label.k == NO_ACCEL {
            for k in 0..self.grid.len() {
                try_k(k);
            }
        } else {
            // the jerk band around the arrival acceleration is contiguous
            let start = label.k as usize;
            for k in start..self.grid.len() {
                if !try_k(k) {
                    break;
                }
            }
            for k in (0..start).rev() {
                if !try_k(k) {
                    break;
                }
            }
        }
    }
}

fn v_prev(v2: f64, a: f64, h_prev: Option<&f64>) -> f64 {
    h_prev.map_or(0.0, |h| (v2 - 2.0 * a * h).max(0.0).sqrt())
}

/// Keeps the `per_accel` earliest labels of each acceleration. Input and
/// output are ordered by `(k, speed cell)`.
fn thin_per_accel(layer: Vec<Label>, per_accel: usize) -> Vec<Label> {
    let mut out = Vec::with_capacity(layer.len());
    let mut start = 0;
    while start < layer.len() {
        let mut end = start + 1;
        while end < layer.len() && layer[end].k == layer[start].k {
            end += 1;
        }
        if end - start <= per_accel {
            out.extend_from_slice(&layer[start..end]);
        } else {
            let mut order: Vec<usize> = (start..end).collect();
            order.sort_by(|&x, &y| layer[x].t.total_cmp(&layer[y].t).then(x.cmp(&y)));
            order.truncate(per_accel);
            order.sort_unstable();
            out.extend(order.into_iter().map(|x| layer[x]));
        }
        start = end;
    }
    out
}

const NO_ACCEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Label {
    v: f64,
    /// Grid index of the arrival acceleration, `NO_ACCEL` at the start.
    k: u32,
    /// Exact arrival acceleration and segment time.
    a: f64,
    dt: f64,
    t: f64,
    parent: u32,
}

fn forward_profile(p: &SpeedProblem, options: &PlannerOptions) -> Result<Vec<f64>> {
    Sweep::new(p, options.accel_step, options.execution).search(options.speed_cell, options.per_accel)
}

/// Joins the first half of `f` with the second half of `b` when the
/// junction is feasible.
fn splice_middle(p: &SpeedProblem, f: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = f.len();
    let k = (n - 1) / 2;
    let v: Vec<f64> = (0..n).map(|i| if i <= k { f[i] } else { b[i] }).collect();
    let ok = (k.saturating_sub(1)..(k + 2).min(n - 1)).all(|i| {
        let incoming = (i > 0).then(|| ((v[i] * v[i] - v[i - 1] * v[i - 1]) / (2.0 * p.h[i - 1]), v[i - 1]));
        p.transition_ok(i, v[i], incoming, v[i + 1])
    });
    ok.then_some(v)
}

/// Minimum-time velocity profile within all five comfort bounds.
pub fn plan_velocity(
    path: &PathGeometry,
    opm: &OccupantPreferenceMetric,
    bc: &BoundaryConditions,
) -> Result<VelocityProfile> {
    plan_velocity_with(path, opm, bc, &PlannerOptions::default())
}

pub fn plan_velocity_with(
    path: &PathGeometry,
    opm: &OccupantPreferenceMetric,
    bc: &BoundaryConditions,
    options: &PlannerOptions,
) -> Result<VelocityProfile> {
    let problem = SpeedProblem::new(path, opm, bc)?;
    let speeds = plan_problem(&problem, options)?;
    VelocityProfile::from_speeds(&problem.s, &speeds)
}

pub(crate) fn plan_problem(problem: &SpeedProblem, options: &PlannerOptions) -> Result<Vec<f64>> {
    if !(options.accel_step > 0.0) || !(options.speed_cell > 0.0) || options.per_accel == 0 {
        return Err(Error::Precondition("accel_step, speed_cell and per_accel must be positive".into()));
    }
    let forward = forward_profile(problem, options)?;
    if !problem.is_symmetric() {
        return Ok(forward);
    }
    // the reversed problem is the same one, so its solution is the mirror
    let mirrored: Vec<f64> = forward.iter().rev().copied().collect();
    Ok(splice_middle(problem, &forward, &mirrored).unwrap_or(forward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::path::build_path;

    fn straight(length: f64) -> PathGeometry {
        build_path(&[(0.0, 0.0), (length / 2.0, 0.0), (length, 0.0)], false, 1.0).unwrap()
    }

    #[test]
    fn cap_values() {
        let caps = caps_for(&[0.0, 0.01, 0.02, -0.01], 0.9, 30.0);
        assert_eq!(caps[0], 30.0);
        assert!((caps[1] - 90f64.sqrt()).abs() < 1e-12);
        assert!((caps[1] - 9.4868).abs() < 1e-4);
        assert!((caps[3] - caps[1]).abs() < 1e-12);
        let caps = caps_for(&[0.02], 3.5, 30.0);
        assert!((caps[0] - 13.229).abs() < 1e-3);
    }

    #[test]
    fn accel_grid_includes_bounds_and_zero() {
        let g = accel_grid(-0.93, 0.9, 0.02);
        assert_eq!(g[0], -0.93);
        assert_eq!(*g.last().unwrap(), 0.9);
        assert!(g.contains(&0.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn constant_profile_when_caps_never_bind() {
        let path = straight(100.0);
        let bc = BoundaryConditions {
            v_start: 15.0,
            v_end: 15.0,
            v_global_max: 15.0,
        };
        let profile = plan_velocity(&path, &OccupantPreferenceMetric::CAUTIOUS, &bc).unwrap();
        assert!(profile.points().iter().all(|p| (p.v - 15.0).abs() < 1e-12));
        assert!((profile.total_time() - 100.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn rest_to_rest_profile_is_feasible() {
        let path = straight(100.0);
        let opm = OccupantPreferenceMetric::CAUTIOUS;
        let profile = plan_velocity(&path, &opm, &BoundaryConditions::rest_to_rest(20.0)).unwrap();
        let (_, kappa) = path.planning_stations();
        let m = profile.metrics(&kappa).unwrap();
        assert!(m.violations(&opm, 1e-6).is_empty(), "{:?}", m);
        assert_eq!(profile.points()[0].v, 0.0);
        assert_eq!(profile.points().last().unwrap().v, 0.0);
        // with a 0.9 m/s² box and 0.6 m/s³ jerk, 100 m takes roughly 21-24 s
        assert!(profile.total_time() > 20.0 && profile.total_time() < 25.0, "{}", profile.total_time());
    }

    #[test]
    fn infeasible_start_names_station() {
        let path = build_path(&fixtures::circle(20.0, 2.0), true, 1.0).unwrap();
        let bc = BoundaryConditions {
            v_start: 10.0,
            v_end: 0.0,
            v_global_max: 20.0,
        };
        match plan_velocity(&path, &OccupantPreferenceMetric::CAUTIOUS, &bc) {
            Err(Error::Infeasible { station: 0, .. }) => {}
            other => panic!("expected infeasible at 0, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_end_speed_is_infeasible() {
        let path = straight(20.0);
        let bc = BoundaryConditions {
            v_start: 0.0,
            v_end: 15.0,
            v_global_max: 20.0,
        };
        let err = plan_velocity(&path, &OccupantPreferenceMetric::CAUTIOUS, &bc).unwrap_err();
        assert!(err.is_infeasible(), "{err}");
    }

    #[test]
    fn execution_modes_agree() {
        let path = build_path(&fixtures::chicane(), false, 1.0).unwrap();
        let bc = BoundaryConditions::rest_to_rest(20.0);
        let opm = OccupantPreferenceMetric::DYNAMIC;
        let seq = plan_velocity_with(&path, &opm, &bc, &PlannerOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
        let par = plan_velocity_with(&path, &opm, &bc, &PlannerOptions { execution: Execution::Parallel, ..Default::default() }).unwrap();
        assert_eq!(seq, par);
    }
}
