//! Dynamic-programming reference planner for small instances.
//!
//! Labels sweep forward station by station. Each label carries its exact
//! speed, the acceleration of the segment it arrived on and its elapsed
//! time. Successors branch over accelerations spaced `a_grid` apart inside
//! the jerk band of the incoming acceleration, plus the band edges and a
//! few landmark values (zero, hitting the speed cap, hitting the braking
//! bound). Every successor is checked exactly, so the result is always
//! feasible. Labels are bucketed into `(v_grid, a_grid)` cells and only the
//! fastest label of each cell survives.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::opm::OccupantPreferenceMetric;
use crate::path::PathGeometry;
use crate::profile::{BoundaryConditions, VelocityProfile};
use crate::velocity::{largest_feasible, SpeedProblem, CHECK_TOL};

const CHUNK: usize = 1024;

/// Largest instance the oracle accepts.
pub const MAX_ORACLE_STATIONS: usize = 500;

#[derive(Debug, Clone, Copy)]
struct Label {
    v: f64,
    /// Acceleration and duration of the arriving segment; `dt` is NaN at the start.
    a: f64,
    dt: f64,
    t: f64,
    parent: u32,
}

/// Minimum-time profile over the label lattice.
pub fn dp_oracle_plan(
    path: &PathGeometry,
    opm: &OccupantPreferenceMetric,
    bc: &BoundaryConditions,
    v_grid: f64,
    a_grid: f64,
) -> Result<VelocityProfile> {
    dp_oracle_plan_with(path, opm, bc, v_grid, a_grid, Execution::default())
}

pub fn dp_oracle_plan_with(
    path: &PathGeometry,
    opm: &OccupantPreferenceMetric,
    bc: &BoundaryConditions,
    v_grid: f64,
    a_grid: f64,
    exec: Execution,
) -> Result<VelocityProfile> {
    if !(v_grid > 0.0 && v_grid.is_finite()) || !(a_grid > 0.0 && a_grid.is_finite()) {
        return Err(Error::Precondition("v_grid and a_grid must be positive".into()));
    }
    let problem = SpeedProblem::new(path, opm, bc)?;
    if problem.len() > MAX_ORACLE_STATIONS {
        return Err(Error::Precondition(format!(
            "oracle is limited to {MAX_ORACLE_STATIONS} stations, path has {}",
            problem.len()
        )));
    }
    let speeds = Lattice::new(&problem, v_grid, a_grid).solve(exec)?;
    VelocityProfile::from_speeds(&problem.s, &speeds)
}

struct Lattice<'a> {
    p: &'a SpeedProblem,
    bound: Vec<f64>,
    v_grid: f64,
    a_grid: f64,
    v_cells: usize,
    a_cells: usize,
}

impl<'a> Lattice<'a> {
    fn new(p: &'a SpeedProblem, v_grid: f64, a_grid: f64) -> Self {
        let bound = p.acceleration_limited_bound();
        let v_max = bound.iter().copied().fold(0.0, f64::max);
        let v_cells = (v_max / v_grid).floor() as usize + 2;
        let a_cells = ((p.opm.ax_pos - p.opm.ax_neg) / a_grid).round() as usize + 2;
        Lattice { p, bound, v_grid, a_grid, v_cells, a_cells }
    }

    fn solve(&self, exec: Execution) -> Result<Vec<f64>> {
        let n = self.p.len();
        let mut layers: Vec<Vec<Label>> = Vec::with_capacity(n);
        layers.push(vec![Label {
            v: self.p.v_start,
            a: 0.0,
            dt: f64::NAN,
            t: 0.0,
            parent: 0,
        }]);
        let mut slots = vec![(u32::MAX, 0u32); self.v_cells * self.a_cells];
        for i in 0..n - 1 {
            let starts: Vec<usize> = (0..layers[i].len()).step_by(CHUNK).collect();
            let successors = exec.flat_map(&starts, |&start| {
                let chunk = &layers[i][start..(start + CHUNK).min(layers[i].len())];
                let mut out = Vec::with_capacity(chunk.len() * 8);
                for (k, label) in chunk.iter().enumerate() {
                    self.expand(i, (start + k) as u32, label, &mut out);
                }
                out
            });
            let next = self.dominate(i as u32, successors, &mut slots);
            if next.is_empty() {
                return Err(Error::Infeasible {
                    station: i,
                    reason: "no admissible transition in the oracle lattice".into(),
                });
            }
            layers.push(next);
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
            let label = layers[i][k];
            v[i] = label.v;
            k = label.parent as usize;
        }
        Ok(v)
    }

    /// Segment time and jerk slack of leaving `label` with acceleration `a`.
    fn jerk_slack(&self, i: usize, label: &Label, a: f64) -> Option<(f64, f64, f64)> {
        let (v, h) = (label.v, self.p.h[i]);
        let w2 = v * v + 2.0 * a * h;
        if w2 <= 0.0 {
            return None;
        }
        let w = w2.sqrt();
        let dt = 2.0 * h / (v + w);
        let slack = if label.dt.is_nan() {
            f64::INFINITY
        } else {
            self.p.opm.jx_abs * 0.5 * (label.dt + dt) - (a - label.a).abs()
        };
        Some((w, dt, slack))
    }

    fn expand(&self, i: usize, parent: u32, label: &Label, out: &mut Vec<Label>) {
        let p = self.p;
        let n = p.len();
        let h = p.h[i];
        let v = label.v;
        let (k0, k1) = (p.kappa[i], p.kappa[i + 1]);
        let opm = &p.opm;
        let mut emit = |w: f64| {
            if !(w >= 0.0) || v + w <= 0.0 || (i + 2 < n && w <= 0.0) || w > p.cap[i + 1] + CHECK_TOL {
                return;
            }
            let a = (w * w - v * v) / (2.0 * h);
            let dt = 2.0 * h / (v + w);
            let ok = a <= opm.ax_pos + CHECK_TOL
                && a >= opm.ax_neg - CHECK_TOL
                && (w * w * k1 - v * v * k0).abs() <= (opm.jy_abs + CHECK_TOL) * dt
                && (label.dt.is_nan() || (a - label.a).abs() <= (opm.jx_abs + CHECK_TOL) * 0.5 * (label.dt + dt));
            if ok {
                out.push(Label {
                    v: w,
                    a,
                    dt,
                    t: label.t + dt,
                    parent,
                });
            }
        };
        if i + 1 == n - 1 {
            emit(p.v_end);
            return;
        }
        let (lo, hi) = (p.opm.ax_neg, p.opm.ax_pos);
        let mut candidates = Vec::with_capacity(16);
        if label.dt.is_nan() {
            let (k_lo, k_hi) = ((lo / self.a_grid).ceil() as i64, (hi / self.a_grid).floor() as i64);
            candidates.extend((k_lo..=k_hi).map(|k| k as f64 * self.a_grid));
            candidates.extend([lo, hi]);
        } else {
            let origin = label.a.clamp(lo, hi);
            let slack = |a: f64| self.jerk_slack(i, label, a).map_or(f64::NEG_INFINITY, |(_, _, s)| s);
            let ok = |a: f64| slack(a) >= 0.0;
            if !ok(origin) {
                return;
            }
            // last feasible acceleration on the way from `good` to `bad`
            let edge = |good: f64, bad: f64| {
                let d = bad - good;
                largest_feasible(0.0, 1.0, |x| slack(good + x * d)).map_or(good, |x| good + x * d)
            };
            candidates.push(origin);
            for (dir, limit) in [(1.0, hi), (-1.0, lo)] {
                let mut good = origin;
                for k in 1.. {
                    let a = origin + dir * k as f64 * self.a_grid;
                    if dir * (a - limit) >= 0.0 {
                        candidates.push(if ok(limit) { limit } else { edge(good, limit) });
                        break;
                    }
                    if !ok(a) {
                        candidates.push(edge(good, a));
                        break;
                    }
                    candidates.push(a);
                    good = a;
                }
            }
        }
        let (band_lo, band_hi) = candidates
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &a| (l.min(a), u.max(a)));
        for target in [p.cap[i + 1], self.bound[i + 1]] {
            let a = (target * target - v * v) / (2.0 * h);
            if a >= band_lo && a <= band_hi {
                candidates.push(a);
            }
        }
        if band_lo <= 0.0 && band_hi >= 0.0 {
            candidates.push(0.0);
        }
        for a in candidates {
            let w2 = v * v + 2.0 * a * h;
            if w2 <= 0.0 {
                continue;
            }
            let w = w2.sqrt().min(p.cap[i + 1]);
            if w > self.bound[i + 1] + CHECK_TOL {
                continue;
            }
            emit(w);
        }
    }

    /// Keeps the fastest label per `(v, a)` cell, in a deterministic order.
    fn dominate(&self, stamp: u32, labels: Vec<Label>, slots: &mut [(u32, u32)]) -> Vec<Label> {
        let mut touched: Vec<usize> = Vec::new();
        for (idx, label) in labels.iter().enumerate() {
            let vc = ((label.v / self.v_grid).floor() as usize).min(self.v_cells - 1);
            let ac = (((label.a - self.p.opm.ax_neg) / self.a_grid).round().max(0.0) as usize).min(self.a_cells - 1);
            let slot = vc * self.a_cells + ac;
            let entry = &mut slots[slot];
            if entry.0 != stamp {
                *entry = (stamp, idx as u32);
                touched.push(slot);
            } else if better(label, &labels[entry.1 as usize]) {
                entry.1 = idx as u32;
            }
        }
        touched.sort_unstable();
        touched.into_iter().map(|slot| labels[slots[slot].1 as usize]).collect()
    }
}

fn better(a: &Label, b: &Label) -> bool {
    let ka = (a.t, -a.v, a.parent);
    let kb = (b.t, -b.v, b.parent);
    ka.partial_cmp(&kb) == Some(std::cmp::Ordering::Less)
}
