//! CSV readers and writers for routes, profiles, logs and plans.
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so every file round-trips exactly.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compliance::{LogRow, SampleFlags, TrajectoryLog};
use crate::error::{Error, Result};
use crate::lane_change::LaneChangePlan;
use crate::path::{PathGeometry, Station};
use crate::profile::{ProfilePoint, VelocityProfile};

const CLOSED_DIRECTIVE: &str = "closed=true";

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(reader: impl Read) -> Result<Vec<T>> {
    let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    csv.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write_rows<T: Serialize>(writer: impl Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Waypoint {
    x: f64,
    y: f64,
}

/// Waypoints and the closed flag of a route file. A first line of
/// `# closed=true` marks a lap.
pub fn read_route(reader: impl Read) -> Result<(Vec<(f64, f64)>, bool)> {
    let mut reader = BufReader::new(reader);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::Csv(e.into()))?;
    let closed = first
        .trim()
        .strip_prefix('#')
        .is_some_and(|d| d.trim().replace(' ', "").eq_ignore_ascii_case(CLOSED_DIRECTIVE));
    let rest = first.as_bytes().chain(reader);
    let rows: Vec<Waypoint> = read_rows(rest)?;
    Ok((rows.into_iter().map(|w| (w.x, w.y)).collect(), closed))
}

pub fn load_route(path: &Path) -> Result<(Vec<(f64, f64)>, bool)> {
    read_route(open(path)?).map_err(|e| e.context(format!("route {}", path.display())))
}

pub fn write_route(writer: impl Write, waypoints: &[(f64, f64)], closed: bool) -> Result<()> {
    let mut writer = writer;
    if closed {
        writeln!(writer, "# {CLOSED_DIRECTIVE}").map_err(|e| Error::Csv(e.into()))?;
    }
    write_rows(writer, waypoints.iter().map(|&(x, y)| Waypoint { x, y }))
}

pub fn save_route(path: &Path, waypoints: &[(f64, f64)], closed: bool) -> Result<()> {
    write_route(create(path)?, waypoints, closed)
}

pub fn write_profile(writer: impl Write, profile: &VelocityProfile) -> Result<()> {
    write_rows(writer, profile.points())
}

pub fn read_profile(reader: impl Read) -> Result<VelocityProfile> {
    VelocityProfile::from_points(read_rows::<ProfilePoint>(reader)?)
}

pub fn save_profile(path: &Path, profile: &VelocityProfile) -> Result<()> {
    write_profile(create(path)?, profile)
}

pub fn load_profile(path: &Path) -> Result<VelocityProfile> {
    read_profile(open(path)?).map_err(|e| e.context(format!("profile {}", path.display())))
}

pub fn write_log(writer: impl Write, log: &TrajectoryLog) -> Result<()> {
    write_rows(writer, log.rows())
}

/// Reads a log; the rate is taken from the first two timestamps.
pub fn read_log(reader: impl Read) -> Result<TrajectoryLog> {
    TrajectoryLog::from_rows(read_rows::<LogRow>(reader)?)
}

pub fn save_log(path: &Path, log: &TrajectoryLog) -> Result<()> {
    write_log(create(path)?, log)
}

pub fn load_log(path: &Path) -> Result<TrajectoryLog> {
    read_log(open(path)?).map_err(|e| e.context(format!("log {}", path.display())))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PlanRow {
    s: f64,
    x: f64,
    y: f64,
    heading: f64,
    kappa: f64,
}

/// Summary of a lane-change plan file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSummary {
    pub length: f64,
    pub max_ay: f64,
    pub max_jy: f64,
}

/// Writes `# L,max_ay,max_jy` and its values as comment lines, then the
/// stations.
pub fn write_lane_change(writer: impl Write, plan: &LaneChangePlan) -> Result<()> {
    let mut writer = writer;
    writeln!(writer, "# L,max_ay,max_jy\n# {},{},{}", plan.length, plan.max_ay, plan.max_jy)
        .map_err(|e| Error::Csv(e.into()))?;
    write_rows(
        writer,
        plan.path.stations().iter().map(|st| PlanRow {
            s: st.s,
            x: st.x,
            y: st.y,
            heading: st.heading,
            kappa: st.kappa,
        }),
    )
}

pub fn read_lane_change(reader: impl Read) -> Result<(PlanSummary, PathGeometry)> {
    let mut reader = BufReader::new(reader);
    let mut header = String::new();
    let mut values = String::new();
    for line in [&mut header, &mut values] {
        reader.read_line(line).map_err(|e| Error::Csv(e.into()))?;
    }
    if header.trim().trim_start_matches('#').trim() != "L,max_ay,max_jy" {
        return Err(Error::Config("lane-change file lacks its summary line".into()));
    }
    let numbers: Vec<f64> = values
        .trim()
        .trim_start_matches('#')
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad lane-change summary: {e}")))?;
    let [length, max_ay, max_jy] = numbers[..] else {
        return Err(Error::Config("lane-change summary needs 3 values".into()));
    };
    let rows: Vec<PlanRow> = read_rows(reader)?;
    let arc_length = rows.last().map_or(0.0, |r| r.s);
    let stations = rows
        .into_iter()
        .map(|r| Station {
            s: r.s,
            x: r.x,
            y: r.y,
            heading: r.heading,
            kappa: r.kappa,
        })
        .collect();
    let path = PathGeometry::from_stations(stations, false, arc_length)?;
    Ok((PlanSummary { length, max_ay, max_jy }, path))
}

pub fn save_lane_change(path: &Path, plan: &LaneChangePlan) -> Result<()> {
    write_lane_change(create(path)?, plan)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GgPoint {
    ax: f64,
    ay: f64,
    inside: bool,
}

/// G-G scatter `ax,ay,inside`.
pub fn write_gg(writer: impl Write, flags: &[SampleFlags]) -> Result<()> {
    write_rows(
        writer,
        flags.iter().map(|f| GgPoint {
            ax: f.ax,
            ay: f.ay,
            inside: f.accel_inside,
        }),
    )
}

/// Per-sample accelerations, estimated jerks and inside flags.
pub fn write_flags(writer: impl Write, flags: &[SampleFlags]) -> Result<()> {
    write_rows(writer, flags)
}

pub fn save_with(path: &Path, write: impl FnOnce(fs::File) -> Result<()>) -> Result<()> {
    write(create(path)?)
}

pub fn save_text(path: &Path, text: &str) -> Result<()> {
    create(path)?.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
