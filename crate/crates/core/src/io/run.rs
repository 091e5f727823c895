//! A simulation run directory: what `simulate` writes and what `classify`,
//! `speeds` and `plot` read back.
//!
//! ```text
//! <dir>/config.toml          normalized copy of the configuration
//! <dir>/timeseries.csv       11-column record table
//! <dir>/timeseries.json      same records, when "json" is among the formats
//! <dir>/snapshots/times.csv  index,t
//! <dir>/snapshots/snapshot_NNNN.csv
//! <dir>/outcome.json         labels, speeds and monitor summary
//! <dir>/fronts.svg           when plotting is enabled
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{classify_records, measure_record_speeds, Outcome, SpeedReport};
use crate::error::{Error, Result};
use crate::fbm::{simulate, MonitorSummary, Record, Snapshot, Trajectory};
use crate::io::config::{LoadedRun, OutputFormat, RunConfig};
use crate::io::csv::{parse_snapshot, parse_timeseries, snapshot_csv, text_field, timeseries_csv};
use crate::io::svg::{fronts_svg, profile_svg};
use crate::model::{derive_constants, DerivedConstants, ModelParams};
use crate::semiwave::speed_table;

pub const CONFIG_FILE: &str = "config.toml";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const OUTCOME_FILE: &str = "outcome.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub params: ModelParams,
    pub derived: DerivedConstants,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speeds: Option<SpeedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speeds_error: Option<String>,
    pub monitor: MonitorSummary,
    pub final_t: f64,
    pub final_g: f64,
    pub final_h: f64,
}

pub fn summarize(run: &LoadedRun, traj: &Trajectory) -> RunSummary {
    let params = run.config.model;
    let (speeds, speeds_error) = match measure_record_speeds(&traj.records, &params) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    RunSummary {
        params,
        derived: derive_constants(&params, &run.u0, &run.v0),
        outcome: classify_records(&traj.records, &params, &run.config.detect),
        speeds,
        speeds_error,
        monitor: traj.monitor,
        final_t: traj.final_state.t,
        final_g: traj.final_state.g,
        final_h: traj.final_state.h,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn snapshot_name(i: usize) -> String {
    format!("snapshot_{i:04}.csv")
}

/// Runs the configured simulation and writes the run directory `out`.
pub fn run_simulation(run: &LoadedRun, out: &Path) -> Result<RunSummary> {
    let cfg = &run.config;
    let traj = simulate(&cfg.model, &run.u0, &run.v0, &cfg.solver)?;
    let summary = summarize(run, &traj);

    fs::create_dir_all(out)?;
    fs::write(out.join(CONFIG_FILE), cfg.to_toml()?)?;
    fs::write(out.join(TIMESERIES_FILE), timeseries_csv(&traj.records))?;
    if cfg.output.formats.contains(&OutputFormat::Json) {
        fs::write(out.join("timeseries.json"), to_json(&traj.records)?)?;
    }
    if !traj.snapshots.is_empty() {
        let dir = out.join(SNAPSHOT_DIR);
        fs::create_dir_all(&dir)?;
        let mut index = String::from("index,t\n");
        for (i, s) in traj.snapshots.iter().enumerate() {
            fs::write(dir.join(snapshot_name(i)), snapshot_csv(s))?;
            index.push_str(&format!("{i},{:.16e}\n", s.t));
        }
        fs::write(dir.join("times.csv"), index)?;
    }
    fs::write(out.join(OUTCOME_FILE), to_json(&summary)?)?;
    if cfg.output.plot {
        let table = speed_table(&cfg.model).ok();
        fs::write(out.join("fronts.svg"), fronts_svg(&traj.records, table.as_ref())?)?;
        if let Some(last) = traj.snapshots.last() {
            fs::write(out.join("profiles.svg"), profile_svg(last)?)?;
        }
    }
    Ok(summary)
}

/// A run directory read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub records: Vec<Record>,
}

impl StoredRun {
    pub fn open(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            fs::read_to_string(dir.join(name))
                .map_err(|e| Error::Data(format!("cannot read {}: {e}", dir.join(name).display())))
        };
        let config = RunConfig::from_toml(&read(CONFIG_FILE)?)?;
        config.validate()?;
        let records = parse_timeseries(&read(TIMESERIES_FILE)?)?;
        if records.is_empty() {
            return Err(Error::Data(format!(
                "{} has no records",
                dir.join(TIMESERIES_FILE).display()
            )));
        }
        Ok(StoredRun {
            dir: dir.to_path_buf(),
            config,
            records,
        })
    }

    pub fn outcome(&self) -> Outcome {
        classify_records(&self.records, &self.config.model, &self.config.detect)
    }

    pub fn speeds(&self) -> Result<SpeedReport> {
        measure_record_speeds(&self.records, &self.config.model)
    }

    pub fn snapshots(&self) -> Result<Vec<Snapshot>> {
        let dir = self.dir.join(SNAPSHOT_DIR);
        let index = match fs::read_to_string(dir.join("times.csv")) {
            Ok(text) => text,
            Err(_) => return Ok(Vec::new()),
        };
        let mut out = Vec::new();
        for line in index.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let (i, t) = line
                .split_once(',')
                .and_then(|(i, t)| Some((i.trim().parse::<usize>().ok()?, t.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| Error::Data(format!("bad snapshot index line `{}`", text_field(line))))?;
            let text = fs::read_to_string(dir.join(snapshot_name(i)))?;
            out.push(parse_snapshot(&text, t)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::RunConfig;

    #[test]
    fn write_and_read_back() {
        let text = r#"
[model]
a = 2.0
b = 0.5
c = 0.5
d = 1.0
beta = 2.0
mu = 2.0
g0 = 2.0
h0 = 1.5

[solver]
ny = 64
nxi = 64
t_max = 2.0
record_interval = 0.1
snapshot_interval = 1.0
snapshot_nodes = 33

[output]
formats = ["csv", "json"]
plot = true
"#;
        let run = RunConfig::from_toml(text).unwrap().load(Path::new(".")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let summary = run_simulation(&run, dir.path()).unwrap();
        for f in [
            CONFIG_FILE,
            TIMESERIES_FILE,
            OUTCOME_FILE,
            "timeseries.json",
            "fronts.svg",
            "profiles.svg",
        ] {
            assert!(dir.path().join(f).exists(), "{f} missing");
        }
        let stored = StoredRun::open(dir.path()).unwrap();
        assert_eq!(stored.config, run.config);
        assert_eq!(stored.records.last().unwrap().g, summary.final_g);
        assert_eq!(stored.outcome(), summary.outcome);
        let snaps = stored.snapshots().unwrap();
        assert_eq!(snaps.len(), 3);
        assert_eq!(snaps[2].x.len(), 33);
    }
}
