//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 infeasible request,
//! 3 file I/O failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::compliance::{compliance_report, sample_flags};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io;
use crate::lane_change::{check_feasibility, generate_lane_change_path, LaneChangeDecision, LaneChangeRequest};
use crate::opm::OccupantPreferenceMetric;
use crate::path::{build_path, PathGeometry, DEFAULT_DS};
use crate::profile::BoundaryConditions;
use crate::scenario::{load_scenario, run_batch, simulate, Scenario};
use crate::velocity::plan_velocity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opm-drive", version, about = "Comfort-constrained speed planning, simulation and log auditing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a minimum-time velocity profile along a route.
    Plan(PlanArgs),
    /// Run closed-loop scenarios and write logs and reports.
    Simulate(SimulateArgs),
    /// Generate a lane-change path.
    Lanechange(LaneChangeArgs),
    /// Audit a trajectory log against a metric.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct RouteArgs {
    /// Route CSV with `x,y` columns.
    #[arg(long)]
    route: PathBuf,
    /// Station spacing, m.
    #[arg(long, default_value_t = DEFAULT_DS)]
    ds: f64,
}

impl RouteArgs {
    fn load(&self) -> Result<PathGeometry> {
        let (waypoints, closed) = io::load_route(&self.route)?;
        build_path(&waypoints, closed, self.ds).map_err(|e| e.context(format!("route {}", self.route.display())))
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    route: RouteArgs,
    /// Preset name or five numbers `ax_pos,ax_neg,ay_abs,jx_abs,jy_abs`.
    #[arg(long)]
    opm: OccupantPreferenceMetric,
    #[arg(long, default_value_t = 0.0)]
    v_start: f64,
    #[arg(long, default_value_t = 0.0)]
    v_end: f64,
    #[arg(long, default_value_t = 25.0)]
    v_max: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario TOML file; repeat for several scenarios.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Run the scenarios concurrently.
    #[arg(long)]
    batch: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct LaneChangeArgs {
    /// Current speed, m/s.
    #[arg(long)]
    v: f64,
    /// Lateral offset, m, positive to the left.
    #[arg(long, allow_negative_numbers = true)]
    offset: f64,
    /// Free corridor ahead, m.
    #[arg(long)]
    gap: f64,
    #[arg(long)]
    opm: OccupantPreferenceMetric,
    #[arg(long, default_value_t = DEFAULT_DS)]
    ds: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Trajectory log CSV.
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    opm: OccupantPreferenceMetric,
    #[command(flatten)]
    route: RouteArgs,
    /// Also write the report, per-sample flags and G-G scatter here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Plan(a) => plan(&a),
        Command::Simulate(a) => simulate_cmd(&a),
        Command::Lanechange(a) => lane_change(&a),
        Command::Analyze(a) => analyze(&a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_io() {
        EXIT_IO
    } else if e.is_infeasible() {
        EXIT_INFEASIBLE
    } else {
        EXIT_USAGE
    }
}

fn plan(a: &PlanArgs) -> Result<()> {
    let path = a.route.load()?;
    let bc = BoundaryConditions {
        v_start: a.v_start,
        v_end: a.v_end,
        v_global_max: a.v_max,
    };
    let profile = plan_velocity(&path, &a.opm, &bc)?;
    let file = a.out.join("profile.csv");
    io::save_profile(&file, &profile)?;
    println!("total_time={:.6}", profile.total_time());
    println!("wrote {}", file.display());
    Ok(())
}

fn simulate_cmd(a: &SimulateArgs) -> Result<()> {
    let scenarios = a.configs.iter().map(|c| load_scenario(c)).collect::<Result<Vec<Scenario>>>()?;
    let outcomes = if a.batch {
        run_batch(&scenarios, Execution::Parallel)
    } else {
        scenarios.iter().map(simulate).collect()
    };
    let mut first_error = None;
    for (scenario, outcome) in scenarios.iter().zip(outcomes) {
        let written = outcome.and_then(|o| {
            let report = compliance_report(&o.log, &scenario.opm, &scenario.route)?;
            io::save_log(&a.out.join(format!("{}_log.csv", scenario.name)), &o.log)?;
            io::save_profile(&a.out.join(format!("{}_profile.csv", scenario.name)), &o.profile)?;
            io::save_text(&a.out.join(format!("{}_report.txt", scenario.name)), &report.to_string())?;
            println!("[{}]\n{report}", scenario.name);
            Ok(())
        });
        if let Err(e) = written {
            eprintln!("error: {e}");
            first_error.get_or_insert(e);
        }
    }
    first_error.map_or(Ok(()), Err)
}

fn lane_change(a: &LaneChangeArgs) -> Result<()> {
    let req = LaneChangeRequest {
        v: a.v,
        lane_offset: a.offset,
        gap_free_length: a.gap,
    };
    if let LaneChangeDecision::Infeasible(why) = check_feasibility(&req, &a.opm)? {
        return Err(Error::Infeasible {
            station: 0,
            reason: why.to_string(),
        });
    }
    let plan = generate_lane_change_path(&req, &a.opm, a.ds)?;
    let file = a.out.join("lane_change.csv");
    io::save_lane_change(&file, &plan)?;
    println!("L={:.6}\nmax_ay={:.6}\nmax_jy={:.6}", plan.length, plan.max_ay, plan.max_jy);
    println!("wrote {}", file.display());
    Ok(())
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let log = io::load_log(&a.log)?;
    let path = a.route.load()?;
    let report = compliance_report(&log, &a.opm, &path)?;
    print!("{report}");
    if let Some(out) = &a.out {
        write_analysis(out, &log, &a.opm, &report.to_string())?;
    }
    Ok(())
}

fn write_analysis(out: &Path, log: &crate::compliance::TrajectoryLog, opm: &OccupantPreferenceMetric, report: &str) -> Result<()> {
    let flags = sample_flags(log, opm)?;
    io::save_text(&out.join("report.txt"), report)?;
    io::save_with(&out.join("flags.csv"), |f| io::write_flags(f, &flags))?;
    io::save_with(&out.join("gg.csv"), |f| io::write_gg(f, &flags))
}
