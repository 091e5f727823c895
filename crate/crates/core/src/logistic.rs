//! Single-species logistic equation with a Stefan free boundary:
//!
//! ```text
//! z_t - d z_xx = z (theta - z),  0 < x < rho(t),   rho'(t) = -gamma z_x(t, rho(t))
//! ```
//!
//! Solved in the front-fixed coordinate `y = x / rho(t)` with the same
//! stepper the coupled solver uses for each species.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::SolverConfig;
use crate::grid::FrontGrid;
use crate::model::{habitat_barrier, InitialProfile};
use crate::stats::{trailing_half_fit, LineFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Spreading,
    Vanishing,
    Undecided,
}

/// Thresholds used to turn a finite run into a spreading/vanishing call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectConfig {
    /// Density and front-velocity level below which a species counts as gone.
    pub eps_vanish: f64,
    /// Relative margin above the habitat barrier before declaring spreading.
    pub spread_margin: f64,
    /// Length (in time) of the trailing window inspected for vanishing.
    pub window: f64,
    /// Longest `t_max` threshold searches may escalate to.
    pub t_cap: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            eps_vanish: 1e-4,
            spread_margin: 0.2,
            window: 2.0,
            t_cap: 1000.0,
        }
    }
}

/// Scalar problem data `(d, theta, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticProblem {
    pub d: f64,
    pub theta: f64,
    pub gamma: f64,
}

impl LogisticProblem {
    pub fn barrier(&self) -> f64 {
        habitat_barrier(self.d, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFrontState {
    pub t: f64,
    pub rho: f64,
    /// Density at `y_j = j / (n - 1)`, i.e. at `x = rho y_j`.
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarRecord {
    pub t: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub z_max: f64,
}

#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub problem: LogisticProblem,
    pub rho0: f64,
    pub records: Vec<ScalarRecord>,
    pub classification: Classification,
    pub clamp_mass: f64,
    pub final_state: ScalarFrontState,
}

/// Runs the single-species problem to `cfg.t_max`, or until a decision when
/// `cfg.stop_on_decision` is set. Uses `cfg.ny` nodes.
pub fn solve_logistic(
    problem: LogisticProblem,
    rho0: f64,
    z0: &InitialProfile,
    cfg: &SolverConfig,
    detect: &DetectConfig,
) -> Result<ScalarTrajectory> {
    let LogisticProblem { d, theta, gamma } = problem;
    for (name, v) in [("d", d), ("theta", theta), ("gamma", gamma), ("rho0", rho0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be finite and positive, got {v}")));
        }
    }
    cfg.validate()?;
    check_support(z0, rho0, "rho0")?;

    let mut grid = FrontGrid::new(cfg.ny);
    let mut z = grid.sample(|y| z0.value(rho0 * y));
    let mut rho = rho0;
    let mut t = 0.0;

    let m = theta.max(z0.sup());
    let z_bound = m * (1.0 + 1e-6);
    let rho_dot_bound = 2.0 * gamma * (m * (theta / (2.0 * d)).sqrt()).max(-z0.min_derivative()) * (1.0 + 1e-3);
    let initial_mass = rho * grid.integral(&z);
    let mut clamp_mass = 0.0;
    let spread_level = problem.barrier() * (1.0 + detect.spread_margin);

    let mut records = Vec::new();
    let mut rho_dot = -gamma * grid.front_slope(&z) / rho;
    records.push(ScalarRecord {
        t,
        rho,
        rho_dot,
        z_max: max_of(&z),
    });
    let mut next_record = cfg.record_interval;

    while t < cfg.t_max {
        rho_dot = -gamma * grid.front_slope(&z) / rho;
        let dt = crate::fbm::final_step(cfg.dt.dt(grid.spacing(), rho, rho_dot, d), t, cfg.t_max);
        let rho_new = rho + dt * rho_dot;
        clamp_mass += grid.advance(&mut z, rho_new, rho_dot, d, dt, |_, zj| zj * (theta - zj));
        rho = rho_new;
        t += dt;

        let z_max = max_of(&z);
        if !z_max.is_finite() || !rho.is_finite() {
            return Err(Error::Instability {
                t,
                reason: "non-finite density or front".into(),
            });
        }
        if clamp_mass > 1e-6 * initial_mass {
            return Err(Error::Instability {
                t,
                reason: format!("clamped mass {clamp_mass:.3e} exceeds 1e-6 of the initial mass"),
            });
        }
        if z_max > z_bound {
            return Err(Error::InvariantBreach {
                t,
                what: format!("max z = {z_max} above bound {m}"),
            });
        }
        if rho_dot < -1e-12 || rho_dot > rho_dot_bound {
            return Err(Error::InvariantBreach {
                t,
                what: format!("front velocity {rho_dot} outside [0, {rho_dot_bound}]"),
            });
        }

        let last = t >= cfg.t_max;
        if t >= next_record - 1e-12 || last {
            records.push(ScalarRecord { t, rho, rho_dot, z_max });
            while next_record <= t + 1e-12 {
                next_record += cfg.record_interval;
            }
            if cfg.stop_on_decision && (rho > spread_level || vanished(&records, detect)) {
                break;
            }
        }
    }

    let mut traj = ScalarTrajectory {
        problem,
        rho0,
        records,
        classification: Classification::Undecided,
        clamp_mass,
        final_state: ScalarFrontState { t, rho, z },
    };
    traj.classification = classify_scalar(&traj, detect);
    Ok(traj)
}

pub(crate) fn check_support(profile: &InitialProfile, front: f64, name: &str) -> Result<()> {
    if (profile.support() - front).abs() > 1e-12 * front.max(1.0) {
        return Err(Error::invalid(
            name,
            format!(
                "initial profile support {} differs from front {}",
                profile.support(),
                front
            ),
        ));
    }
    Ok(())
}

pub(crate) fn max_of(z: &[f64]) -> f64 {
    z.iter().copied().fold(0.0, f64::max)
}

/// Trailing-window vanishing test shared by the scalar and coupled classifiers.
pub(crate) fn window_vanished<'a>(
    samples: impl DoubleEndedIterator<Item = (f64, f64, f64)> + 'a,
    t_end: f64,
    detect: &DetectConfig,
) -> bool {
    if t_end < detect.window {
        return false;
    }
    let mut covered = false;
    for (t, density, front_dot) in samples.rev() {
        if density >= detect.eps_vanish || front_dot >= detect.eps_vanish {
            return false;
        }
        if t <= t_end - detect.window {
            covered = true;
            break;
        }
    }
    covered
}

fn vanished(records: &[ScalarRecord], detect: &DetectConfig) -> bool {
    let Some(last) = records.last() else {
        return false;
    };
    window_vanished(records.iter().map(|r| (r.t, r.z_max, r.rho_dot)), last.t, detect)
}

/// Spreading once the front clears the habitat barrier by the margin;
/// vanishing when density and front velocity stay below `eps_vanish` over
/// the trailing window; undecided otherwise.
pub fn classify_scalar(traj: &ScalarTrajectory, detect: &DetectConfig) -> Classification {
    let spread_level = traj.problem.barrier() * (1.0 + detect.spread_margin);
    if traj.records.iter().any(|r| r.rho > spread_level) {
        Classification::Spreading
    } else if vanished(&traj.records, detect) {
        Classification::Vanishing
    } else {
        Classification::Undecided
    }
}

/// Least-squares slope of `rho(t)` over the trailing half of the record.
pub fn front_speed(traj: &ScalarTrajectory) -> Result<LineFit> {
    let ts: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
    let rhos: Vec<f64> = traj.records.iter().map(|r| r.rho).collect();
    trailing_half_fit(&ts, &rhos, 10)
}
