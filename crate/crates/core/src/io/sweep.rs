//! Parallel parameter sweeps over model fields.
//!
//! ```toml
//! base = "base.toml"     # run configuration, relative to this file
//! max_runs = 400         # refuse larger grids
//! threads = 4            # optional; FRONTS_LV_THREADS overrides
//!
//! [[axes]]
//! name = "beta"
//! values = [0.5, 1.0, 2.0]
//!
//! [[axes]]
//! name = "mu"
//! values = [0.5, 1.0]
//! ```
//!
//! Rows enumerate the grid with the first axis varying slowest.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_records, measure_record_speeds};
use crate::error::{Error, Result};
use crate::fbm::simulate;
use crate::io::config::{load_run, LoadedRun};
use crate::io::csv::{fmt_num, text_field};
use crate::logistic::Classification;

pub const THREADS_ENV: &str = "FRONTS_LV_THREADS";
const MODEL_KEYS: [&str; 8] = ["a", "b", "c", "d", "beta", "mu", "g0", "h0"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: PathBuf,
    pub axes: Vec<Axis>,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_max_runs() -> usize {
    10_000
}

fn axis_key(name: &str) -> Option<&'static str> {
    let bare = name.strip_prefix("model.").unwrap_or(name);
    MODEL_KEYS.iter().copied().find(|k| *k == bare)
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Config("axes: at least one axis is required".into()));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if axis_key(&axis.name).is_none() {
                return Err(Error::Config(format!(
                    "axes[{i}].name: `{}` is not a model parameter (expected one of {})",
                    axis.name,
                    MODEL_KEYS.join(", ")
                )));
            }
            if axis.values.is_empty() {
                return Err(Error::Config(format!("axes[{i}].values: empty")));
            }
        }
        let total = self.total_runs();
        if total > self.max_runs {
            return Err(Error::Config(format!(
                "sweep has {total} runs, above max_runs = {}",
                self.max_runs
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads: must be at least 1".into()));
        }
        Ok(())
    }

    pub fn total_runs(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of grid point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = axis.values[rem % axis.values.len()];
            rem /= axis.values.len();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub result: std::result::Result<RowResult, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowResult {
    pub prey: Classification,
    pub predator: Classification,
    pub g_final: f64,
    pub h_final: f64,
    pub prey_speed: Option<f64>,
    pub predator_speed: Option<f64>,
}

impl SweepRow {
    /// `prey/predator` label pair, or `failed`.
    pub fn label(&self) -> String {
        match &self.result {
            Ok(r) => format!("{}/{}", label(r.prey), label(r.predator)),
            Err(_) => "failed".into(),
        }
    }
}

fn label(c: Classification) -> &'static str {
    match c {
        Classification::Spreading => "spreading",
        Classification::Vanishing => "vanishing",
        Classification::Undecided => "undecided",
    }
}

fn run_point(base: &LoadedRun, spec: &SweepSpec, point: &[f64]) -> Result<RowResult> {
    let mut cfg = base.config.clone();
    for (axis, &v) in spec.axes.iter().zip(point) {
        let slot = match axis_key(&axis.name).expect("validated axis") {
            "a" => &mut cfg.model.a,
            "b" => &mut cfg.model.b,
            "c" => &mut cfg.model.c,
            "d" => &mut cfg.model.d,
            "beta" => &mut cfg.model.beta,
            "mu" => &mut cfg.model.mu,
            "g0" => &mut cfg.model.g0,
            _ => &mut cfg.model.h0,
        };
        *slot = v;
    }
    cfg.solver.snapshot_interval = None;
    let run = cfg.load(&base.base)?;
    let c = &run.config;
    let traj = simulate(&c.model, &run.u0, &run.v0, &c.solver)?;
    let outcome = classify_records(&traj.records, &c.model, &c.detect);
    let speeds = measure_record_speeds(&traj.records, &c.model).ok();
    Ok(RowResult {
        prey: outcome.prey,
        predator: outcome.predator,
        g_final: traj.final_state.g,
        h_final: traj.final_state.h,
        prey_speed: speeds.map(|s| s.prey_fit.slope),
        predator_speed: speeds.map(|s| s.predator_fit.slope),
    })
}

/// Thread count: environment override, then the spec, then rayon's default.
pub fn thread_count(spec: &SweepSpec) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV}: expected a positive integer, got `{s}`"
            ))),
        },
        Err(_) => Ok(spec.threads),
    }
}

/// Runs every grid point on a bounded pool; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec, base: &LoadedRun, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        (0..spec.total_runs())
            .into_par_iter()
            .map(|index| {
                let point = spec.point(index);
                let result = run_point(base, spec, &point).map_err(|e| e.to_string());
                SweepRow { index, point, result }
            })
            .collect::<Vec<_>>()
    });
    Ok(rows)
}

pub fn load_sweep(path: &Path) -> Result<(SweepSpec, LoadedRun)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let spec = SweepSpec::from_toml(&text)?;
    let base_path = path.parent().unwrap_or(Path::new("")).join(&spec.base);
    let base = load_run(&base_path)?;
    Ok((spec, base))
}

pub fn sweep_header(spec: &SweepSpec) -> String {
    let mut cols = vec!["index".to_string()];
    cols.extend(spec.axes.iter().map(|a| a.name.clone()));
    cols.extend(
        [
            "status",
            "prey",
            "predator",
            "g_final",
            "h_final",
            "prey_speed",
            "predator_speed",
            "error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols.join(",")
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = sweep_header(spec);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for row in rows {
        let mut cols = vec![row.index.to_string()];
        cols.extend(row.point.iter().map(|&v| fmt_num(v)));
        match &row.result {
            Ok(r) => cols.extend([
                "ok".to_string(),
                label(r.prey).to_string(),
                label(r.predator).to_string(),
                fmt_num(r.g_final),
                fmt_num(r.h_final),
                opt(r.prey_speed),
                opt(r.predator_speed),
                String::new(),
            ]),
            Err(e) => cols.extend([
                "failed".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                text_field(e),
            ]),
        }
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Label grid for a two-axis sweep: `labels[iy][ix]`, `x` = first axis.
pub fn phase_labels(spec: &SweepSpec, rows: &[SweepRow]) -> Option<Vec<Vec<String>>> {
    if spec.axes.len() != 2 {
        return None;
    }
    let (nx, ny) = (spec.axes[0].values.len(), spec.axes[1].values.len());
    let mut grid = vec![vec![String::new(); nx]; ny];
    for row in rows {
        grid[row.index % ny][row.index / ny] = row.label();
    }
    Some(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_order_first_axis_slowest() {
        let spec = SweepSpec {
            base: "b.toml".into(),
            axes: vec![
                Axis {
                    name: "beta".into(),
                    values: vec![1.0, 2.0],
                },
                Axis {
                    name: "model.mu".into(),
                    values: vec![3.0, 4.0, 5.0],
                },
            ],
            max_runs: 10,
            threads: None,
        };
        spec.validate().unwrap();
        assert_eq!(spec.total_runs(), 6);
        assert_eq!(spec.point(0), vec![1.0, 3.0]);
        assert_eq!(spec.point(2), vec![1.0, 5.0]);
        assert_eq!(spec.point(3), vec![2.0, 3.0]);
        assert_eq!(
            sweep_header(&spec),
            "index,beta,model.mu,status,prey,predator,g_final,h_final,prey_speed,predator_speed,error"
        );
    }

    #[test]
    fn rejects_unknown_axis_and_oversized_grid() {
        let bad = "base = \"b.toml\"\n[[axes]]\nname = \"bta\"\nvalues = [1.0]\n";
        assert!(SweepSpec::from_toml(bad)
            .unwrap_err()
            .to_string()
            .contains("axes[0].name"));
        let big = "base = \"b.toml\"\nmax_runs = 2\n[[axes]]\nname = \"beta\"\nvalues = [1.0, 2.0, 3.0]\n";
        assert!(SweepSpec::from_toml(big).is_err());
    }
}
