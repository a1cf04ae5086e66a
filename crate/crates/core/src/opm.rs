//! Occupant preference metric: the five comfort thresholds and the driving
//! style presets built from them.
//!
//! The region is a closed rectangle in the (ax, ay) plane plus independent
//! bounds on longitudinal and lateral jerk. Boundary points count as inside.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comfort thresholds in SI units.
///
/// `ax_neg` is stored signed (negative). Jerk limits may be `f64::INFINITY`
/// to disable them, see [`OccupantPreferenceMetric::without_jerk_limits`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 5]", into = "[f64; 5]")]
pub struct OccupantPreferenceMetric {
    pub ax_pos: f64,
    pub ax_neg: f64,
    pub ay_abs: f64,
    pub jx_abs: f64,
    pub jy_abs: f64,
}

/// The four representative driving styles, calmest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivingStyle {
    PublicTransport,
    Normal,
    Aggressive,
    ExtremelyAggressive,
}

impl DrivingStyle {
    pub const ALL: [DrivingStyle; 4] = [
        DrivingStyle::PublicTransport,
        DrivingStyle::Normal,
        DrivingStyle::Aggressive,
        DrivingStyle::ExtremelyAggressive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DrivingStyle::PublicTransport => "public_transport",
            DrivingStyle::Normal => "normal",
            DrivingStyle::Aggressive => "aggressive",
            DrivingStyle::ExtremelyAggressive => "extremely_aggressive",
        }
    }
}

impl fmt::Display for DrivingStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DrivingStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        DrivingStyle::ALL
            .into_iter()
            .find(|style| style.name() == key)
            .ok_or_else(|| Error::InvalidMetric(format!("unknown driving style `{s}`")))
    }
}

/// Preset thresholds for a driving style.
///
/// `ExtremelyAggressive` is synthetic beyond its -5.1 m/s² deceleration
/// bound: its acceleration, lateral and jerk limits are fixture constants
/// chosen to enclose the `Aggressive` region.
pub fn preset(style: DrivingStyle) -> OccupantPreferenceMetric {
    let [ax_pos, ax_neg, ay_abs, jx_abs, jy_abs] = match style {
        DrivingStyle::PublicTransport => [0.93, -0.93, 0.93, 0.6, 0.6],
        DrivingStyle::Normal => [2.0, -2.0, 2.0, 0.9, 0.9],
        DrivingStyle::Aggressive => [3.07, -5.08, 4.0, 2.0, 2.0],
        DrivingStyle::ExtremelyAggressive => [4.0, -5.1, 5.0, 3.0, 3.0],
    };
    OccupantPreferenceMetric {
        ax_pos,
        ax_neg,
        ay_abs,
        jx_abs,
        jy_abs,
    }
}

/// Normalizes a raw five-number tuple `[ax_pos, ax_neg, ay_abs, jx_abs, jy_abs]`.
///
/// The deceleration may be given with either sign; it is stored negative.
/// Zero or non-finite entries leave an empty comfort region and are rejected.
pub fn validate_opm(raw: [f64; 5]) -> Result<OccupantPreferenceMetric> {
    const NAMES: [&str; 5] = ["ax_pos", "ax_neg", "ay_abs", "jx_abs", "jy_abs"];
    for (value, name) in raw.iter().zip(NAMES) {
        if !value.is_finite() {
            return Err(Error::InvalidMetric(format!("{name} is not finite ({value})")));
        }
        if *value == 0.0 {
            return Err(Error::InvalidMetric(format!("{name} is zero")));
        }
    }
    let [ax_pos, ax_neg, ay_abs, jx_abs, jy_abs] = raw;
    for (value, name) in [(ax_pos, "ax_pos"), (ay_abs, "ay_abs"), (jx_abs, "jx_abs"), (jy_abs, "jy_abs")] {
        if value < 0.0 {
            return Err(Error::InvalidMetric(format!("{name} must be positive, got {value}")));
        }
    }
    Ok(OccupantPreferenceMetric {
        ax_pos,
        ax_neg: -ax_neg.abs(),
        ay_abs,
        jx_abs,
        jy_abs,
    })
}

impl OccupantPreferenceMetric {
    /// The metric used for cautious occupants in the reference simulations.
    pub const CAUTIOUS: OccupantPreferenceMetric = OccupantPreferenceMetric {
        ax_pos: 0.9,
        ax_neg: -0.9,
        ay_abs: 0.9,
        jx_abs: 0.6,
        jy_abs: 0.6,
    };

    /// The metric used for dynamic (sporty) occupants in the reference simulations.
    pub const DYNAMIC: OccupantPreferenceMetric = OccupantPreferenceMetric {
        ax_pos: 2.2,
        ax_neg: -2.5,
        ay_abs: 3.5,
        jx_abs: 1.5,
        jy_abs: 1.5,
    };

    pub fn to_array(self) -> [f64; 5] {
        [self.ax_pos, self.ax_neg, self.ay_abs, self.jx_abs, self.jy_abs]
    }

    /// Same acceleration box with both jerk limits disabled.
    pub fn without_jerk_limits(self) -> Self {
        Self {
            jx_abs: f64::INFINITY,
            jy_abs: f64::INFINITY,
            ..self
        }
    }

    pub fn contains_acceleration(&self, ax: f64, ay: f64) -> bool {
        self.ax_neg <= ax && ax <= self.ax_pos && ay.abs() <= self.ay_abs
    }

    pub fn contains_jerk(&self, jx: f64, jy: f64) -> bool {
        jx.abs() <= self.jx_abs && jy.abs() <= self.jy_abs
    }

    /// Looks up a named metric: a driving style, `cautious`, or `dynamic`.
    pub fn named(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cautious" => Ok(Self::CAUTIOUS),
            "dynamic" => Ok(Self::DYNAMIC),
            other => other.parse::<DrivingStyle>().map(preset),
        }
    }
}

impl TryFrom<[f64; 5]> for OccupantPreferenceMetric {
    type Error = Error;

    fn try_from(raw: [f64; 5]) -> Result<Self> {
        validate_opm(raw)
    }
}

impl From<OccupantPreferenceMetric> for [f64; 5] {
    fn from(opm: OccupantPreferenceMetric) -> Self {
        opm.to_array()
    }
}

/// Accepts a metric name or five comma/space separated numbers.
impl FromStr for OccupantPreferenceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Self::named(s);
        }
        let values = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidMetric(format!("`{t}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let raw: [f64; 5] = values
            .try_into()
            .map_err(|v: Vec<f64>| Error::InvalidMetric(format!("expected 5 values, got {}", v.len())))?;
        validate_opm(raw)
    }
}
