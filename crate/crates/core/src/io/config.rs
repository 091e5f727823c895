//! TOML run configuration.
//!
//! ```toml
//! [model]
//! a = 2.0
//! b = 0.5
//! c = 0.5
//! d = 1.0
//! beta = 10.0
//! mu = 10.0
//! g0 = 2.0
//! h0 = 1.5
//!
//! [initial.prey]
//! kind = "cosine"        # cosine | bump | table
//! amplitude = 1.0
//!
//! [initial.predator]
//! kind = "table"
//! path = "v0.csv"        # two columns x,value; relative to the config file
//!
//! [solver]
//! ny = 400
//! nxi = 400
//! t_max = 200.0
//! record_interval = 0.5
//! snapshot_interval = 10.0
//! dt = { kind = "cfl", dt_max = 1e-3, cfl = 0.5 }
//!
//! [detect]
//! eps_vanish = 1e-4
//!
//! [output]
//! directory = "runs/weak"
//! formats = ["csv", "json"]
//! plot = true
//! ```
//!
//! Every section except `[model]` is optional; unknown keys are errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::SolverConfig;
use crate::logistic::DetectConfig;
use crate::model::{InitialProfile, ModelParams, TabulatedProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ProfileSpec {
    Cosine {
        amplitude: f64,
    },
    Bump {
        amplitude: f64,
    },
    /// CSV with columns `x,value`; the last `x` must equal the species' front.
    Table {
        path: PathBuf,
        /// Slope at the front; estimated from the last two rows when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        front_slope: Option<f64>,
    },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Cosine { amplitude: 1.0 }
    }
}

impl ProfileSpec {
    /// Builds the profile on `[0, support]`, resolving table paths against `base`.
    pub fn build(&self, support: f64, base: &Path, field: &str) -> Result<InitialProfile> {
        let wrap = |e: Error| match e {
            Error::InvalidParameter { field: f, reason } => Error::Config(format!("{field}.{f}: {reason}")),
            other => other,
        };
        match self {
            ProfileSpec::Cosine { amplitude } => InitialProfile::cosine(support, *amplitude).map_err(wrap),
            ProfileSpec::Bump { amplitude } => InitialProfile::bump(support, *amplitude).map_err(wrap),
            ProfileSpec::Table { path, front_slope } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Config(format!("{field}.path: cannot read {}: {e}", full.display())))?;
                let (xs, values) = parse_table(&text).map_err(|e| Error::Config(format!("{field}.path: {e}")))?;
                let slope = front_slope.unwrap_or_else(|| {
                    let n = xs.len();
                    if n >= 2 {
                        ((values[n - 1] - values[n - 2]) / (xs[n - 1] - xs[n - 2])).min(0.0)
                    } else {
                        0.0
                    }
                });
                let profile = InitialProfile::Tabulated(TabulatedProfile::new(xs, values, slope).map_err(wrap)?);
                if (profile.support() - support).abs() > 1e-12 * support.max(1.0) {
                    return Err(Error::Config(format!(
                        "{field}.path: table ends at x = {} but the front is at {support}",
                        profile.support()
                    )));
                }
                Ok(profile)
            }
        }
    }
}

fn parse_table(text: &str) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(format!("line {}: expected 2 columns, found {}", i + 1, cols.len()));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(x), Ok(v)) => {
                xs.push(x);
                values.push(v);
            }
            // A non-numeric first line is a header.
            _ if xs.is_empty() && i == 0 => continue,
            _ => return Err(format!("line {}: cannot parse numbers", i + 1)),
        }
    }
    Ok((xs, values))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub prey: ProfileSpec,
    #[serde(default)]
    pub predator: ProfileSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub detect: DetectConfig,
    #[serde(default)]
    pub output: OutputSection,
}

/// A validated configuration with its profiles built.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub config: RunConfig,
    pub u0: InitialProfile,
    pub v0: InitialProfile,
    /// Directory relative paths in the config resolve against.
    pub base: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let prefix = |section: &str, e: Error| match e {
            Error::InvalidParameter { field, reason } => {
                let field = field.strip_prefix("solver.").unwrap_or(&field).to_string();
                Error::Config(format!("{section}.{field}: {reason}"))
            }
            other => other,
        };
        self.model.validate().map_err(|e| prefix("model", e))?;
        self.solver.validate().map_err(|e| prefix("solver", e))?;
        let d = &self.detect;
        for (name, v) in [("eps_vanish", d.eps_vanish), ("window", d.window), ("t_cap", d.t_cap)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "detect.{name}: must be finite and positive, got {v}"
                )));
            }
        }
        if !(d.spread_margin.is_finite() && d.spread_margin >= 0.0) {
            return Err(Error::Config(
                "detect.spread_margin: must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Validates and builds both initial profiles.
    pub fn load(self, base: &Path) -> Result<LoadedRun> {
        self.validate()?;
        let u0 = self.initial.prey.build(self.model.g0, base, "initial.prey")?;
        let v0 = self.initial.predator.build(self.model.h0, base, "initial.predator")?;
        Ok(LoadedRun {
            config: self,
            u0,
            v0,
            base: base.to_path_buf(),
        })
    }
}

/// Reads, parses and validates a configuration file.
pub fn load_run(path: &Path) -> Result<LoadedRun> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::from_toml(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    cfg.load(&base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
a = 2.0
b = 0.5
c = 0.5
d = 1.0
beta = 10.0
mu = 10.0
g0 = 2.0
h0 = 1.5
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.initial.prey, ProfileSpec::Cosine { amplitude: 1.0 });
        let run = cfg.load(Path::new(".")).unwrap();
        assert_eq!(run.u0.support(), 2.0);
        assert_eq!(run.v0.support(), 1.5);
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::from_toml(MINIMAL).unwrap();
        cfg.initial.predator = ProfileSpec::Table {
            path: "v0.csv".into(),
            front_slope: Some(-1.0),
        };
        cfg.solver.snapshot_interval = Some(5.0);
        cfg.output.formats.push(OutputFormat::Json);
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("beta", "bta");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("bta"), "{err}");
        let text = format!("{MINIMAL}\n[solver]\nnyy = 3\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn negative_parameter_has_field_path() {
        let text = MINIMAL.replace("a = 2.0", "a = -2.0");
        let err = RunConfig::from_toml(&text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("model.a"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn table_profile_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = String::from("x,value\n");
        for i in 0..=20 {
            let x = 1.5 * i as f64 / 20.0;
            rows.push_str(&format!(
                "{x},{}\n",
                if i == 20 { 0.0 } else { 1.0 - (x / 1.5).powi(2) }
            ));
        }
        std::fs::write(dir.path().join("v0.csv"), rows).unwrap();
        let text = format!("{MINIMAL}\n[initial.predator]\nkind = \"table\"\npath = \"v0.csv\"\n");
        let run = RunConfig::from_toml(&text).unwrap().load(dir.path()).unwrap();
        assert!((run.v0.value(0.75) - 0.75).abs() < 1e-3);

        let bad = text.replace("h0 = 1.5", "h0 = 1.4");
        let err = RunConfig::from_toml(&bad).unwrap().load(dir.path()).unwrap_err();
        assert!(err.to_string().contains("initial.predator"), "{err}");
    }
}
