use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fronts_lv_core::analysis::{max_frame_speed, moving_frame_error};
use fronts_lv_core::io::config::load_run;
use fronts_lv_core::io::csv::{parse_snapshot, parse_timeseries};
use fronts_lv_core::io::run::{run_simulation, to_json, StoredRun};
use fronts_lv_core::io::svg::{fronts_svg, phase_svg, profile_svg};
use fronts_lv_core::io::sweep::{load_sweep, phase_labels, run_sweep, sweep_csv, thread_count, THREADS_ENV};
use fronts_lv_core::logistic::DetectConfig;
use fronts_lv_core::model::InitialProfile;
use fronts_lv_core::semiwave::{solve_semiwave, speed_table, DEFAULT_TOL};
use fronts_lv_core::thresholds::{check_criteria, critical_gamma, ThresholdOptions};
use fronts_lv_core::{Error, Result};

#[derive(Parser)]
#[command(name = "fronts-lv", version, about = "Prey-predator fronts with two free boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Cosine,
    Bump,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Fronts,
    Profile,
    Phase,
}

#[derive(clap::Args)]
struct ThresholdArgs {
    /// Relative bracket width at which bisection stops.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Grid nodes of each classification run.
    #[arg(long, default_value_t = 100)]
    ny: usize,
    /// First horizon of each classification run.
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    /// Largest horizon undecided runs escalate to.
    #[arg(long, default_value_t = 1000.0)]
    t_cap: f64,
}

impl ThresholdArgs {
    fn options(&self, detect: DetectConfig) -> ThresholdOptions {
        let mut opts = ThresholdOptions {
            tol: self.tol,
            detect,
            ..ThresholdOptions::default()
        };
        opts.solver.ny = self.ny;
        opts.solver.t_max = self.t_max;
        opts.detect.t_cap = self.t_cap;
        opts
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write its run directory.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides `output.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Semi-wave speed k(nu, d, theta).
    Semiwave {
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the profile as `y,q` CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Critical Stefan coefficient of the scalar problem.
    GammaStar {
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long)]
        rho0: f64,
        #[arg(long, value_enum, default_value_t = ProfileKind::Cosine)]
        kind: ProfileKind,
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
        #[command(flatten)]
        search: ThresholdArgs,
    },
    /// Evaluate the sufficient spreading/vanishing criteria for a config.
    Check {
        config: PathBuf,
        #[command(flatten)]
        search: ThresholdArgs,
    },
    /// Re-classify a stored run directory.
    Classify { run: PathBuf },
    /// Front speeds of a stored run with the theoretical sandwich.
    Speeds {
        run: PathBuf,
        /// Also report the moving-frame errors at this fraction of the admissible speed.
        #[arg(long)]
        frame_fraction: Option<f64>,
    },
    /// Run a parameter sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
        /// Pool size (FRONTS_LV_THREADS takes precedence).
        #[arg(long)]
        threads: Option<usize>,
        /// Write a phase map for two-axis sweeps.
        #[arg(long)]
        plot: bool,
    },
    /// Render an SVG from a time series, snapshot or sweep table.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long, short)]
        output: PathBuf,
        /// Run config whose speed table supplies reference slopes (fronts plots).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    print!("{}", to_json(value)?);
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize)]
struct SemiwaveReport {
    nu: f64,
    d: f64,
    theta: f64,
    k: f64,
    speed_limit: f64,
    slope_at_origin: f64,
}

#[derive(Serialize)]
struct SpeedsOutput {
    speeds: fronts_lv_core::analysis::SpeedReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    moving_frame: Option<Vec<fronts_lv_core::analysis::FrameError>>,
}

fn phase_from_csv(text: &str) -> Result<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let status_col = header
        .iter()
        .position(|c| *c == "status")
        .ok_or_else(|| Error::Data("not a sweep table: no status column".into()))?;
    if status_col != 3 {
        return Err(Error::Data("phase maps need a sweep over exactly two axes".into()));
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut cells = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.splitn(status_col + 4, ',').collect();
        if cols.len() < status_col + 3 {
            return Err(Error::Data(format!("short sweep row `{line}`")));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Data(format!("sweep row `{line}`: {e}")))
        };
        let (x, y) = (parse(cols[1])?, parse(cols[2])?);
        let label = if cols[3] == "ok" {
            format!("{}/{}", cols[4], cols[5])
        } else {
            "failed".to_string()
        };
        if !xs.contains(&x) {
            xs.push(x);
        }
        if !ys.contains(&y) {
            ys.push(y);
        }
        cells.push((x, y, label));
    }
    let mut grid = vec![vec!["undecided".to_string(); xs.len()]; ys.len()];
    for (x, y, label) in cells {
        let ix = xs.iter().position(|v| *v == x).expect("collected");
        let iy = ys.iter().position(|v| *v == y).expect("collected");
        grid[iy][ix] = label;
    }
    phase_svg(header[1], &xs, header[2], &ys, &grid)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let loaded = load_run(&config)?;
            let dir = out.unwrap_or_else(|| loaded.base.join(&loaded.config.output.directory));
            let summary = run_simulation(&loaded, &dir)?;
            eprintln!("wrote {}", dir.display());
            print_json(&summary.outcome)
        }
        Command::Semiwave {
            nu,
            d,
            theta,
            tol,
            profile,
        } => {
            let wave = solve_semiwave(nu, d, theta, tol)?;
            if let Some(path) = profile {
                let mut text = String::from("y,q\n");
                for (y, q) in &wave.profile {
                    text.push_str(&format!("{y:.16e},{q:.16e}\n"));
                }
                fs::write(path, text)?;
            }
            print_json(&SemiwaveReport {
                nu,
                d,
                theta,
                k: wave.k,
                speed_limit: wave.speed_limit(),
                slope_at_origin: wave.slope_at_origin,
            })
        }
        Command::GammaStar {
            d,
            theta,
            rho0,
            kind,
            amplitude,
            search,
        } => {
            let z0 = match kind {
                ProfileKind::Cosine => InitialProfile::cosine(rho0, amplitude)?,
                ProfileKind::Bump => InitialProfile::bump(rho0, amplitude)?,
            };
            let t = critical_gamma(d, theta, rho0, &z0, &search.options(DetectConfig::default()))?;
            print_json(&t)
        }
        Command::Check { config, search } => {
            let loaded = load_run(&config)?;
            let opts = search.options(loaded.config.detect);
            print_json(&check_criteria(&loaded.config.model, &loaded.u0, &loaded.v0, &opts)?)
        }
        Command::Classify { run } => print_json(&StoredRun::open(&run)?.outcome()),
        Command::Speeds { run, frame_fraction } => {
            let stored = StoredRun::open(&run)?;
            let speeds = stored.speeds()?;
            let moving_frame = match frame_fraction {
                Some(f) => {
                    let p = &stored.config.model;
                    let k0 = f * max_frame_speed(p)?;
                    let a_lim = (p.a - p.b) / (1.0 + p.b * p.c);
                    let b_lim = (1.0 + p.a * p.c) / (1.0 + p.b * p.c);
                    Some(moving_frame_error(&stored.snapshots()?, k0, a_lim, b_lim)?)
                }
                None => None,
            };
            print_json(&SpeedsOutput { speeds, moving_frame })
        }
        Command::Sweep {
            spec,
            out,
            threads,
            plot,
        } => {
            let (spec, base) = load_sweep(&spec)?;
            let threads = match std::env::var_os(THREADS_ENV) {
                Some(_) => thread_count(&spec)?,
                None => threads.or(spec.threads),
            };
            let rows = run_sweep(&spec, &base, threads)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("sweep.csv"), sweep_csv(&spec, &rows))?;
            if plot {
                if let Some(labels) = phase_labels(&spec, &rows) {
                    let svg = phase_svg(
                        &spec.axes[0].name,
                        &spec.axes[0].values,
                        &spec.axes[1].name,
                        &spec.axes[1].values,
                        &labels,
                    )?;
                    fs::write(out.join("phase.svg"), svg)?;
                }
            }
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            eprintln!(
                "{} runs, {failed} failed; wrote {}",
                rows.len(),
                out.join("sweep.csv").display()
            );
            Ok(())
        }
        Command::Plot {
            input,
            kind,
            output,
            config,
        } => {
            let text = read(&input)?;
            let svg = match kind {
                PlotKind::Fronts => {
                    let records = parse_timeseries(&text)?;
                    let table = match config {
                        Some(path) => Some(speed_table(&load_run(&path)?.config.model)?),
                        None => None,
                    };
                    fronts_svg(&records, table.as_ref())?
                }
                PlotKind::Profile => profile_svg(&parse_snapshot(&text, f64::NAN)?)?,
                PlotKind::Phase => phase_from_csv(&text)?,
            };
            fs::write(output, svg)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
