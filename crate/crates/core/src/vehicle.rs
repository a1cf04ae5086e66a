//! Bicycle-model vehicle with first-order actuator lags.
//!
//! The state is referenced to the rear axle, which keeps the kinematic
//! model free of side slip there (`vy = 0`) and makes pure pursuit exact.
//! The dynamic model uses the linear tire model at the centre of gravity
//! and converts to the rear axle for its lateral velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this speed the dynamic model uses kinematic derivatives; the
/// linear tire model divides by `vx`.
const DYNAMIC_MIN_SPEED: f64 = 1.0;

/// Largest accepted integration step, s.
pub const MAX_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StiffnessUnit {
    #[default]
    PerRad,
    PerDeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParameters {
    pub m: f64,
    pub iz: f64,
    pub lf: f64,
    pub lr: f64,
    /// Front and rear cornering stiffness in `stiffness_unit`.
    pub caf: f64,
    pub car: f64,
    pub steer_limit: f64,
    /// Actuator time constants, s. Zero means no lag.
    pub steer_lag_tau: f64,
    pub accel_lag_tau: f64,
    pub stiffness_unit: StiffnessUnit,
}

impl Default for VehicleParameters {
    fn default() -> Self {
        Self {
            m: 1740.0,
            iz: 3000.0,
            lf: 1.4,
            lr: 1.65,
            caf: 81000.0,
            car: 81000.0,
            steer_limit: 32f64.to_radians(),
            steer_lag_tau: 0.2,
            accel_lag_tau: 0.4,
            stiffness_unit: StiffnessUnit::PerRad,
        }
    }
}

impl VehicleParameters {
    pub fn wheelbase(&self) -> f64 {
        self.lf + self.lr
    }

    /// Cornering stiffness `(front, rear)` in N/rad.
    pub fn stiffness_per_rad(&self) -> (f64, f64) {
        match self.stiffness_unit {
            StiffnessUnit::PerRad => (self.caf, self.car),
            StiffnessUnit::PerDeg => (self.caf.to_degrees(), self.car.to_degrees()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("iz", self.iz),
            ("lf", self.lf),
            ("lr", self.lr),
            ("caf", self.caf),
            ("car", self.car),
            ("steer_limit", self.steer_limit),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("vehicle.{name} must be positive, got {value}")));
            }
        }
        for (name, value) in [("steer_lag_tau", self.steer_lag_tau), ("accel_lag_tau", self.accel_lag_tau)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("vehicle.{name} must be non-negative, got {value}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    /// Rear-axle position, m.
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    /// Body-frame velocity of the rear axle, m/s.
    pub vx: f64,
    pub vy: f64,
    pub yaw_rate: f64,
    pub steer_actual: f64,
    pub ax_actual: f64,
}

impl VehicleState {
    pub fn at_rest(x: f64, y: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            yaw,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub steer_cmd: f64,
    pub ax_cmd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleModel {
    #[default]
    Kinematic,
    Dynamic,
}

type Vector = [f64; 8];

fn pack(s: &VehicleState) -> Vector {
    [s.x, s.y, s.yaw, s.vx, s.vy, s.yaw_rate, s.steer_actual, s.ax_actual]
}

fn unpack(v: &Vector) -> VehicleState {
    VehicleState {
        x: v[0],
        y: v[1],
        yaw: v[2],
        vx: v[3],
        vy: v[4],
        yaw_rate: v[5],
        steer_actual: v[6],
        ax_actual: v[7],
    }
}

fn lag(target: f64, actual: f64, tau: f64) -> f64 {
    if tau > 0.0 {
        (target - actual) / tau
    } else {
        0.0
    }
}

/// Time derivative of the packed state for a command already clamped.
fn derivative(v: &Vector, cmd: &ControlCommand, p: &VehicleParameters, model: VehicleModel) -> Vector {
    let s = unpack(v);
    let delta = s.steer_actual;
    let vx = s.vx.max(0.0);
    let mut d = [0.0; 8];
    d[3] = if s.vx <= 0.0 && s.ax_actual < 0.0 { 0.0 } else { s.ax_actual };
    d[6] = lag(cmd.steer_cmd, delta, p.steer_lag_tau);
    d[7] = lag(cmd.ax_cmd, s.ax_actual, p.accel_lag_tau);
    let (sin, cos) = s.yaw.sin_cos();
    let kinematic = model == VehicleModel::Kinematic || vx < DYNAMIC_MIN_SPEED;
    if kinematic {
        // rates follow the geometry directly; vy and yaw_rate are algebraic
        d[0] = vx * cos;
        d[1] = vx * sin;
        d[2] = vx * delta.tan() / p.wheelbase();
        return d;
    }
    let (caf, car) = p.stiffness_per_rad();
    let vy_cg = s.vy + p.lr * s.yaw_rate;
    let alpha_f = delta - (vy_cg + p.lf * s.yaw_rate) / vx;
    let alpha_r = -(vy_cg - p.lr * s.yaw_rate) / vx;
    let fyf = caf * alpha_f;
    let fyr = car * alpha_r;
    let vy_cg_dot = (fyf * delta.cos() + fyr) / p.m - vx * s.yaw_rate;
    let r_dot = (p.lf * fyf * delta.cos() - p.lr * fyr) / p.iz;
    d[0] = vx * cos - s.vy * sin;
    d[1] = vx * sin + s.vy * cos;
    d[2] = s.yaw_rate;
    d[4] = vy_cg_dot - p.lr * r_dot;
    d[5] = r_dot;
    d
}

/// Re-derives the algebraic parts of a kinematic state.
fn settle(v: &mut Vector, p: &VehicleParameters, model: VehicleModel) {
    if v[3] < 0.0 {
        v[3] = 0.0;
    }
    v[6] = v[6].clamp(-p.steer_limit, p.steer_limit);
    if model == VehicleModel::Kinematic || v[3] < DYNAMIC_MIN_SPEED {
        v[4] = 0.0;
        v[5] = v[3] * v[6].tan() / p.wheelbase();
    }
}

/// Advances the vehicle by `dt` with one classical Runge-Kutta step.
pub fn step(
    state: &VehicleState,
    cmd: &ControlCommand,
    params: &VehicleParameters,
    dt: f64,
    model: VehicleModel,
) -> Result<VehicleState> {
    if !cmd.steer_cmd.is_finite() || !cmd.ax_cmd.is_finite() {
        return Err(Error::InvalidCommand(format!("non-finite command {cmd:?}")));
    }
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::OutOfRange {
            value: dt,
            min: 0.0,
            max: MAX_STEP,
        });
    }
    let cmd = ControlCommand {
        steer_cmd: cmd.steer_cmd.clamp(-params.steer_limit, params.steer_limit),
        ax_cmd: cmd.ax_cmd,
    };
    let mut y0 = pack(state);
    if params.steer_lag_tau == 0.0 {
        y0[6] = cmd.steer_cmd;
    }
    if params.accel_lag_tau == 0.0 {
        y0[7] = cmd.ax_cmd;
    }
    let f = |y: &Vector| derivative(y, &cmd, params, model);
    let add = |y: &Vector, k: &Vector, h: f64| -> Vector { std::array::from_fn(|i| y[i] + h * k[i]) };
    let k1 = f(&y0);
    let k2 = f(&add(&y0, &k1, 0.5 * dt));
    let k3 = f(&add(&y0, &k2, 0.5 * dt));
    let k4 = f(&add(&y0, &k3, dt));
    let mut y1: Vector = std::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    settle(&mut y1, params, model);
    Ok(unpack(&y1))
}

/// Lateral acceleration of the rear axle, m/s².
pub fn lateral_acceleration(
    state: &VehicleState,
    cmd: &ControlCommand,
    params: &VehicleParameters,
    model: VehicleModel,
) -> f64 {
    let d = derivative(&pack(state), cmd, params, model);
    d[4] + state.vx * state.yaw_rate
}
