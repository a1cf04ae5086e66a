//! Pure-pursuit steering and feedforward-plus-PI speed control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opm::OccupantPreferenceMetric;
use crate::path::{PathGeometry, Projection};
use crate::profile::VelocityProfile;
use crate::vehicle::{ControlCommand, VehicleParameters, VehicleState};

/// Farthest the vehicle may be from the path before control gives up, m.
pub const OFF_PATH_LIMIT: f64 = 50.0;

/// Arc-length window searched around the previous projection, m.
const PROJECTION_WINDOW: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Lookahead distance is `lookahead_base + lookahead_gain * vx`.
    pub lookahead_base: f64,
    pub lookahead_gain: f64,
    pub kp_speed: f64,
    pub ki_speed: f64,
    pub opm_clamp: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            lookahead_base: 2.0,
            lookahead_gain: 0.5,
            kp_speed: 0.8,
            ki_speed: 0.2,
            opm_clamp: true,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lookahead_base > 0.0 && self.lookahead_base.is_finite()) {
            return Err(Error::Config(format!(
                "controller.lookahead_base must be positive, got {}",
                self.lookahead_base
            )));
        }
        for (name, value) in [
            ("lookahead_gain", self.lookahead_gain),
            ("kp_speed", self.kp_speed),
            ("ki_speed", self.ki_speed),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("controller.{name} must be non-negative, got {value}")));
            }
        }
        Ok(())
    }

    pub fn lookahead(&self, vx: f64) -> f64 {
        self.lookahead_base + self.lookahead_gain * vx.max(0.0)
    }
}

fn checked(projection: Projection) -> Result<Projection> {
    if projection.distance > OFF_PATH_LIMIT {
        return Err(Error::OffPath {
            distance: projection.distance,
            limit: OFF_PATH_LIMIT,
        });
    }
    Ok(projection)
}

/// Pure-pursuit steering command for the rear-axle `state`, clamped to the
/// steering limit. Left turns are positive.
pub fn lateral_control(
    state: &VehicleState,
    path: &PathGeometry,
    cfg: &ControllerConfig,
    vehicle: &VehicleParameters,
) -> Result<f64> {
    let projection = checked(path.project(state.x, state.y))?;
    Ok(pursue(state, path, projection.s, cfg, vehicle))
}

fn pursue(state: &VehicleState, path: &PathGeometry, s: f64, cfg: &ControllerConfig, vehicle: &VehicleParameters) -> f64 {
    let (tx, ty, _) = path.pose_at(s + cfg.lookahead(state.vx));
    let (dx, dy) = (tx - state.x, ty - state.y);
    let chord = dx.hypot(dy);
    if chord < 1e-9 {
        return 0.0;
    }
    let alpha = dy.atan2(dx) - state.yaw;
    let steer = (2.0 * vehicle.wheelbase() * alpha.sin() / chord).atan();
    steer.clamp(-vehicle.steer_limit, vehicle.steer_limit)
}

/// Speed controller with integrator state. One instance per simulation.
#[derive(Debug, Clone, Default)]
pub struct Controller {
    cfg: ControllerConfig,
    vehicle: VehicleParameters,
    integral: f64,
    s_hint: Option<f64>,
}

impl Controller {
    pub fn new(cfg: ControllerConfig, vehicle: VehicleParameters) -> Self {
        Self {
            cfg,
            vehicle,
            integral: 0.0,
            s_hint: None,
        }
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Feedforward plus PI acceleration command at arc length `s_now`.
    /// The feedforward is read one acceleration time constant ahead so the
    /// lagged actuator meets the plan on time. The integrator advances by
    /// `dt` unless the output is clamped.
    pub fn longitudinal_control(
        &mut self,
        state: &VehicleState,
        profile: &VelocityProfile,
        s_now: f64,
        opm: &OccupantPreferenceMetric,
        dt: f64,
    ) -> Result<f64> {
        let (v_ref, _) = profile.reference_at(s_now)?;
        let s_ahead = (s_now + state.vx.max(0.0) * self.vehicle.accel_lag_tau).min(profile.end_s());
        let (_, ax_plan) = profile.reference_at(s_ahead)?;
        let error = v_ref - state.vx;
        let raw = ax_plan + self.cfg.kp_speed * error + self.cfg.ki_speed * self.integral;
        if !self.cfg.opm_clamp {
            self.integral += error * dt;
            return Ok(raw);
        }
        let clamped = raw.clamp(opm.ax_neg, opm.ax_pos);
        if clamped == raw {
            self.integral += error * dt;
        }
        Ok(clamped)
    }

    /// Projects the vehicle, then computes both commands. Also returns the
    /// projection so callers can log tracking error.
    pub fn control_step(
        &mut self,
        state: &VehicleState,
        path: &PathGeometry,
        profile: &VelocityProfile,
        opm: &OccupantPreferenceMetric,
        dt: f64,
    ) -> Result<(ControlCommand, Projection)> {
        let projection = match self.s_hint {
            Some(s) => path.project_near(state.x, state.y, s, PROJECTION_WINDOW),
            None => path.project(state.x, state.y),
        };
        let projection = checked(projection)?;
        self.s_hint = Some(projection.s);
        let steer_cmd = pursue(state, path, projection.s, &self.cfg, &self.vehicle);
        let s_now = projection.s.clamp(profile.start_s(), profile.end_s());
        let ax_cmd = self.longitudinal_control(state, profile, s_now, opm, dt)?;
        Ok((ControlCommand { steer_cmd, ax_cmd }, projection))
    }
}
