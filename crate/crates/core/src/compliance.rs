//! Auditing of fixed-rate trajectory logs against an occupant metric.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opm::{preset, DrivingStyle, OccupantPreferenceMetric};
use crate::path::PathGeometry;

pub const DEFAULT_RATE: f64 = 10.0;

/// Default smoothing window for jerk estimation, s.
pub const DEFAULT_JERK_WINDOW: f64 = 0.5;

/// Shortest log `classify_style` accepts, s.
pub const MIN_CLASSIFY_SPAN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LogRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
    pub ax: f64,
    pub ay: f64,
    pub steer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    rows: Vec<LogRow>,
    rate: f64,
}

impl TrajectoryLog {
    /// Checks that timestamps are spaced `1 / rate` apart within 1e-6 s.
    pub fn new(rows: Vec<LogRow>, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InsufficientData(format!("log rate must be positive, got {rate}")));
        }
        let dt = 1.0 / rate;
        if let Some(k) = rows.windows(2).position(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-6) {
            return Err(Error::InsufficientData(format!(
                "log rows {k} and {} are not {dt} s apart",
                k + 1
            )));
        }
        Ok(Self { rows, rate })
    }

    /// Infers the rate from the first two rows.
    pub fn from_rows(rows: Vec<LogRow>) -> Result<Self> {
        let rate = match rows.as_slice() {
            [a, b, ..] => 1.0 / (b.t - a.t),
            _ => DEFAULT_RATE,
        };
        Self::new(rows, rate)
    }

    pub fn rows(&self) -> &[LogRow] {
        &self.rows
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn duration(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    fn column(&self, f: impl Fn(&LogRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Jerk from a uniformly sampled acceleration series.
///
/// The series is first smoothed by a centred moving average over `window`
/// seconds, rounded to an odd number of samples (shrinking near the ends).
/// Interior points then use central differences and the ends one-sided
/// differences.
pub fn estimate_jerk(accel: &[f64], rate: f64, window: f64) -> Result<Vec<f64>> {
    let n = accel.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("jerk needs at least 3 samples, got {n}")));
    }
    if !(window >= 0.0) || !(rate > 0.0) {
        return Err(Error::InsufficientData(format!("invalid window {window} s at {rate} Hz")));
    }
    let width = window_samples(window, rate);
    let smooth = moving_average(accel, width / 2);
    let dt = 1.0 / rate;
    let mut jerk = vec![0.0; n];
    jerk[0] = (smooth[1] - smooth[0]) / dt;
    jerk[n - 1] = (smooth[n - 1] - smooth[n - 2]) / dt;
    for i in 1..n - 1 {
        jerk[i] = (smooth[i + 1] - smooth[i - 1]) / (2.0 * dt);
    }
    Ok(jerk)
}

/// Odd sample count covering `window` seconds; 1 means no smoothing.
pub fn window_samples(window: f64, rate: f64) -> usize {
    let raw = (window * rate).round() as usize;
    if raw <= 1 {
        1
    } else if raw.is_multiple_of(2) {
        raw + 1
    } else {
        raw
    }
}

/// Centred mean over `half` samples either side; the window is trimmed
/// symmetrically near the ends so it stays centred.
fn moving_average(x: &[f64], half: usize) -> Vec<f64> {
    if half == 0 {
        return x.to_vec();
    }
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            (prefix[i + h + 1] - prefix[i - h]) / (2 * h + 1) as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub accel_compliance_fraction: f64,
    pub jerk_compliance_fraction: f64,
    pub max_ax: f64,
    pub min_ax: f64,
    pub max_abs_ay: f64,
    pub max_abs_jx: f64,
    pub max_abs_jy: f64,
    pub lap_time: f64,
    pub max_lateral_error: f64,
    /// `None` when the log is too short to classify.
    pub style: Option<DrivingStyle>,
}

impl fmt::Display for ComplianceReport {
    /// `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accel_compliance_fraction={:.6}", self.accel_compliance_fraction)?;
        writeln!(f, "jerk_compliance_fraction={:.6}", self.jerk_compliance_fraction)?;
        writeln!(f, "max_ax={:.6}", self.max_ax)?;
        writeln!(f, "min_ax={:.6}", self.min_ax)?;
        writeln!(f, "max_abs_ay={:.6}", self.max_abs_ay)?;
        writeln!(f, "max_abs_jx={:.6}", self.max_abs_jx)?;
        writeln!(f, "max_abs_jy={:.6}", self.max_abs_jy)?;
        writeln!(f, "lap_time={:.6}", self.lap_time)?;
        writeln!(f, "max_lateral_error={:.6}", self.max_lateral_error)?;
        match self.style {
            Some(style) => writeln!(f, "style={style}"),
            None => writeln!(f, "style=unclassified"),
        }
    }
}

/// Per-sample flags used for plotting and for the report fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleFlags {
    pub t: f64,
    pub ax: f64,
    pub ay: f64,
    pub jx: f64,
    pub jy: f64,
    pub accel_inside: bool,
    pub jerk_inside: bool,
}

/// Estimated jerks and inside/outside flags for every log row.
pub fn sample_flags(log: &TrajectoryLog, opm: &OccupantPreferenceMetric) -> Result<Vec<SampleFlags>> {
    if log.is_empty() {
        return Err(Error::InsufficientData("empty log".into()));
    }
    let (jx, jy) = jerks(log)?;
    Ok(log
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| SampleFlags {
            t: r.t,
            ax: r.ax,
            ay: r.ay,
            jx: jx[i],
            jy: jy[i],
            accel_inside: opm.contains_acceleration(r.ax, r.ay),
            jerk_inside: opm.contains_jerk(jx[i], jy[i]),
        })
        .collect())
}

/// Jerk columns with the default window; logs too short to differentiate
/// get zero jerk.
fn jerks(log: &TrajectoryLog) -> Result<(Vec<f64>, Vec<f64>)> {
    if log.len() < 3 {
        return Ok((vec![0.0; log.len()], vec![0.0; log.len()]));
    }
    let jx = estimate_jerk(&log.column(|r| r.ax), log.rate, DEFAULT_JERK_WINDOW)?;
    let jy = estimate_jerk(&log.column(|r| r.ay), log.rate, DEFAULT_JERK_WINDOW)?;
    Ok((jx, jy))
}

pub fn compliance_report(
    log: &TrajectoryLog,
    opm: &OccupantPreferenceMetric,
    path: &PathGeometry,
) -> Result<ComplianceReport> {
    let flags = sample_flags(log, opm)?;
    let n = flags.len() as f64;
    let fraction = |f: fn(&SampleFlags) -> bool| flags.iter().filter(|s| f(s)).count() as f64 / n;
    let max_of = |f: fn(&SampleFlags) -> f64| flags.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(ComplianceReport {
        accel_compliance_fraction: fraction(|s| s.accel_inside),
        jerk_compliance_fraction: fraction(|s| s.jerk_inside),
        max_ax: max_of(|s| s.ax),
        min_ax: -max_of(|s| -s.ax),
        max_abs_ay: max_of(|s| s.ay.abs()),
        max_abs_jx: max_of(|s| s.jx.abs()),
        max_abs_jy: max_of(|s| s.jy.abs()),
        lap_time: log.duration(),
        max_lateral_error: max_lateral_error(log, path),
        style: classify_style(log).ok(),
    })
}

/// Largest distance from a logged position to the path, following the log
/// along the route so that parallel stretches are not confused.
pub fn max_lateral_error(log: &TrajectoryLog, path: &PathGeometry) -> f64 {
    let mut hint: Option<f64> = None;
    let mut worst: f64 = 0.0;
    for r in &log.rows {
        let p = match hint {
            Some(s) => path.project_near(r.x, r.y, s, 30.0),
            None => path.project(r.x, r.y),
        };
        hint = Some(p.s);
        worst = worst.max(p.distance);
    }
    worst
}

/// Linear-interpolated percentile of `values`, `q` in `[0, 1]`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// 95th-percentile magnitudes `[ax+, ax-, ay, jx, jy]` of a log.
pub fn style_statistics(log: &TrajectoryLog) -> Result<[f64; 5]> {
    if log.len() < 3 || log.duration() < MIN_CLASSIFY_SPAN - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_CLASSIFY_SPAN} s of data, got {:.3} s",
            log.duration()
        )));
    }
    let (jx, jy) = jerks(log)?;
    let p95 = |v: Vec<f64>| percentile(&v, 0.95);
    Ok([
        p95(log.column(|r| r.ax.max(0.0))),
        p95(log.column(|r| (-r.ax).max(0.0))),
        p95(log.column(|r| r.ay.abs())),
        p95(jx.iter().map(|j| j.abs()).collect()),
        p95(jy.iter().map(|j| j.abs()).collect()),
    ])
}

/// Calmest preset whose region holds the log's 95th-percentile magnitudes;
/// anything beyond `Aggressive` is `ExtremelyAggressive`.
pub fn classify_style(log: &TrajectoryLog) -> Result<DrivingStyle> {
    let [ax_pos, ax_neg, ay, jx, jy] = style_statistics(log)?;
    let fits = |m: OccupantPreferenceMetric| {
        ax_pos <= m.ax_pos && ax_neg <= -m.ax_neg && ay <= m.ay_abs && jx <= m.jx_abs && jy <= m.jy_abs
    };
    Ok(DrivingStyle::ALL
        .into_iter()
        .find(|&style| fits(preset(style)))
        .unwrap_or(DrivingStyle::ExtremelyAggressive))
}
