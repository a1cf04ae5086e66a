//! Scenario files and the closed-loop simulation.
//!
//! A scenario is a TOML file:
//!
//! ```toml
//! route_file = "lap.csv"      # relative to the scenario file
//! opm = "cautious"            # or [ax_pos, ax_neg, ay_abs, jx_abs, jy_abs]
//! duration_limit = 400.0
//! seed = 1
//!
//! [bc]
//! v_start = 0.0
//! v_end = 0.0
//! v_global_max = 25.0
//! ```
//!
//! Optional keys: `ds`, `model`, `imu_noise_std`, and `[vehicle]` /
//! `[controller]` tables overriding the defaults.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::compliance::{LogRow, TrajectoryLog, DEFAULT_RATE};
use crate::controller::{Controller, ControllerConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io;
use crate::opm::OccupantPreferenceMetric;
use crate::path::{build_path, PathGeometry, DEFAULT_DS};
use crate::profile::{BoundaryConditions, VelocityProfile};
use crate::vehicle::{lateral_acceleration, step, VehicleModel, VehicleParameters, VehicleState};
use crate::velocity::plan_velocity;

/// Integration step of the closed loop, s.
pub const SIM_STEP: f64 = 0.01;

/// A vehicle this slow counts as stopped, m/s.
const STOPPED: f64 = 1e-3;

/// Metric given by name or as five numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpmSpec {
    Name(String),
    Values(OccupantPreferenceMetric),
}

impl OpmSpec {
    pub fn resolve(&self) -> Result<OccupantPreferenceMetric> {
        match self {
            OpmSpec::Name(name) => OccupantPreferenceMetric::named(name),
            OpmSpec::Values(opm) => Ok(*opm),
        }
    }
}

/// On-disk form of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub route_file: PathBuf,
    pub opm: OpmSpec,
    pub bc: BoundaryConditions,
    pub duration_limit: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ds")]
    pub ds: f64,
    #[serde(default)]
    pub model: VehicleModel,
    /// Standard deviation of noise added to logged accelerations, m/s².
    #[serde(default)]
    pub imu_noise_std: f64,
    #[serde(default)]
    pub vehicle: VehicleParameters,
    #[serde(default)]
    pub controller: ControllerConfig,
}

fn default_ds() -> f64 {
    DEFAULT_DS
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub route: PathGeometry,
    pub opm: OccupantPreferenceMetric,
    pub vehicle: VehicleParameters,
    pub controller: ControllerConfig,
    pub bc: BoundaryConditions,
    pub duration_limit: f64,
    pub seed: u64,
    pub model: VehicleModel,
    pub imu_noise_std: f64,
}

impl Scenario {
    /// Scenario with default vehicle and controller on an in-memory route.
    pub fn new(name: impl Into<String>, route: PathGeometry, opm: OccupantPreferenceMetric, bc: BoundaryConditions) -> Self {
        Self {
            name: name.into(),
            route,
            opm,
            vehicle: VehicleParameters::default(),
            controller: ControllerConfig::default(),
            bc,
            duration_limit: 1000.0,
            seed: 0,
            model: VehicleModel::Kinematic,
            imu_noise_std: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_limit > 0.0 && self.duration_limit.is_finite()) {
            return Err(Error::Config(format!("duration_limit must be positive, got {}", self.duration_limit)));
        }
        if !(self.imu_noise_std >= 0.0 && self.imu_noise_std.is_finite()) {
            return Err(Error::Config(format!("imu_noise_std must be non-negative, got {}", self.imu_noise_std)));
        }
        self.vehicle.validate()?;
        self.controller.validate()?;
        self.bc.validate()
    }

    /// Resolves a parsed file; `base` is the directory relative paths start from.
    pub fn from_file(file: ScenarioFile, name: impl Into<String>, base: &Path) -> Result<Self> {
        let route_path = base.join(&file.route_file);
        let (waypoints, closed) = io::load_route(&route_path)?;
        let route = build_path(&waypoints, closed, file.ds)?;
        let scenario = Self {
            name: name.into(),
            route,
            opm: file.opm.resolve()?,
            vehicle: file.vehicle,
            controller: file.controller,
            bc: file.bc,
            duration_limit: file.duration_limit,
            seed: file.seed,
            model: file.model,
            imu_noise_std: file.imu_noise_std,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario(&text)
        .and_then(|file| Scenario::from_file(file, name, base))
        .map_err(|e| e.context(format!("scenario {}", path.display())))
}

/// Planned profile and the resulting log of one run.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub profile: VelocityProfile,
    pub log: TrajectoryLog,
}

pub fn run_simulation(scenario: &Scenario) -> Result<TrajectoryLog> {
    simulate(scenario).map(|o| o.log)
}

/// Plans the profile, then drives it closed-loop at `SIM_STEP`, logging at
/// 10 Hz. Stops after one lap (closed route), at the route end (open
/// route), or at the duration limit.
pub fn simulate(scenario: &Scenario) -> Result<SimulationOutcome> {
    let context = |e: Error| e.context(format!("scenario {}", scenario.name));
    scenario.validate().map_err(context)?;
    let route = &scenario.route;
    let profile = plan_velocity(route, &scenario.opm, &scenario.bc).map_err(context)?;
    let (x0, y0, yaw0) = route.pose_at(0.0);
    let mut state = VehicleState {
        vx: scenario.bc.v_start,
        ..VehicleState::at_rest(x0, y0, yaw0)
    };
    let mut controller = Controller::new(scenario.controller, scenario.vehicle);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let noise = Normal::new(0.0, scenario.imu_noise_std).map_err(|e| Error::Config(e.to_string()))?;
    let decimation = (1.0 / (DEFAULT_RATE * SIM_STEP)).round() as usize;
    let max_steps = (scenario.duration_limit / SIM_STEP).round() as usize;
    let length = route.length();
    let mut rows = Vec::new();
    let mut progress = 0.0;
    let mut last_s = 0.0;
    let mut moved = false;
    for k in 0..max_steps {
        let (cmd, projection) = controller
            .control_step(&state, route, &profile, &scenario.opm, SIM_STEP)
            .map_err(context)?;
        let mut ds = projection.s - last_s;
        if route.is_closed() {
            ds -= length * (ds / length).round();
        }
        progress += ds;
        last_s = projection.s;
        moved |= state.vx > 0.5;
        let remaining = length - progress;
        // an open route planned to a standstill runs until the vehicle stops
        let crossed = remaining <= 0.0 && (route.is_closed() || scenario.bc.v_end > 0.0);
        let finished = crossed || (moved && state.vx < STOPPED && remaining < 1.0);
        if k % decimation == 0 {
            let ay = lateral_acceleration(&state, &cmd, &scenario.vehicle, scenario.model);
            let (nx, ny) = if scenario.imu_noise_std > 0.0 {
                (noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            rows.push(LogRow {
                t: rows.len() as f64 / DEFAULT_RATE,
                x: state.x,
                y: state.y,
                yaw: state.yaw,
                v: state.vx,
                ax: state.ax_actual + nx,
                ay: ay + ny,
                steer: state.steer_actual,
            });
        }
        if finished {
            break;
        }
        state = step(&state, &cmd, &scenario.vehicle, SIM_STEP, scenario.model).map_err(context)?;
    }
    Ok(SimulationOutcome {
        profile,
        log: TrajectoryLog::new(rows, DEFAULT_RATE)?,
    })
}

/// Runs independent scenarios, possibly concurrently. Results keep input
/// order.
pub fn run_batch(scenarios: &[Scenario], exec: Execution) -> Vec<Result<SimulationOutcome>> {
    exec.map(scenarios, simulate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn straight_scenario(opm: OccupantPreferenceMetric) -> Scenario {
        let route = build_path(&fixtures::straight(200.0), false, 1.0).unwrap();
        Scenario::new("straight", route, opm, BoundaryConditions::rest_to_rest(15.0))
    }

    #[test]
    fn stops_at_route_end() {
        let sc = straight_scenario(OccupantPreferenceMetric::CAUTIOUS);
        let log = run_simulation(&sc).unwrap();
        let last = log.rows().last().unwrap();
        assert!((last.x - 200.0).abs() < 1.0, "{last:?}");
        assert!(last.v < 0.05, "{:?}", &log.rows()[log.len() - 30..]);
    }

    #[test]
    fn duration_limit_truncates() {
        let mut sc = straight_scenario(OccupantPreferenceMetric::CAUTIOUS);
        sc.duration_limit = 1.0;
        let log = run_simulation(&sc).unwrap();
        assert_eq!(log.len(), 10);
        assert_eq!(log.rate(), 10.0);
    }

    #[test]
    fn noise_is_seeded() {
        let mut sc = straight_scenario(OccupantPreferenceMetric::CAUTIOUS);
        sc.duration_limit = 5.0;
        sc.imu_noise_std = 0.05;
        let a = run_simulation(&sc).unwrap();
        let b = run_simulation(&sc).unwrap();
        assert_eq!(a, b);
        sc.seed = 1;
        let c = run_simulation(&sc).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn infeasible_plan_propagates() {
        let mut sc = straight_scenario(OccupantPreferenceMetric::CAUTIOUS);
        sc.bc = BoundaryConditions {
            v_start: 15.0,
            v_end: 0.0,
            v_global_max: 15.0,
        };
        let route = build_path(&fixtures::straight(20.0), false, 1.0).unwrap();
        sc.route = route;
        let err = run_simulation(&sc).unwrap_err();
        assert!(err.is_infeasible(), "{err}");
    }

    #[test]
    fn parses_named_and_numeric_metrics() {
        let text = r#"
            route_file = "r.csv"
            opm = "normal"
            duration_limit = 10.0
            [bc]
            v_start = 0.0
            v_end = 0.0
            v_global_max = 20.0
        "#;
        let file = parse_scenario(text).unwrap();
        assert_eq!(file.opm.resolve().unwrap(), crate::opm::preset(crate::opm::DrivingStyle::Normal));
        assert_eq!(file.ds, 1.0);
        let numeric = text.replace("\"normal\"", "[0.9, 0.9, 0.9, 0.6, 0.6]");
        assert_eq!(parse_scenario(&numeric).unwrap().opm.resolve().unwrap(), OccupantPreferenceMetric::CAUTIOUS);
        assert!(parse_scenario("route_file = 3").is_err());
        assert!(parse_scenario(&format!("unknown = 1\n{text}")).is_err());
    }

    #[test]
    fn batch_keeps_order() {
        let mut a = straight_scenario(OccupantPreferenceMetric::CAUTIOUS);
        a.duration_limit = 2.0;
        let mut b = straight_scenario(OccupantPreferenceMetric::DYNAMIC);
        b.duration_limit = 3.0;
        let seq = run_batch(&[a.clone(), b.clone()], Execution::Sequential);
        let par = run_batch(&[a, b], Execution::Parallel);
        let lens: Vec<usize> = seq.iter().map(|r| r.as_ref().unwrap().log.len()).collect();
        assert_eq!(lens, vec![20, 30]);
        for (x, y) in seq.iter().zip(&par) {
            assert_eq!(x.as_ref().unwrap().log, y.as_ref().unwrap().log);
        }
    }
}
