//! Post-processing of coupled trajectories: long-time labels, front speeds,
//! regime expectations and moving-frame convergence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::{Record, Snapshot, Trajectory};
use crate::logistic::{window_vanished, Classification, DetectConfig};
use crate::model::{habitat_barrier, ModelParams};
use crate::semiwave::{speed_table, SpeedTable};
use crate::stats::{trailing_half_fit, LineFit};

const MIN_FIT_SAMPLES: usize = 10;
/// Sandwich inflation used for the in/out verdicts.
pub const SANDWICH_SLACK: f64 = 0.05;
/// Without a usable barrier, a front must keep advancing at this fraction of
/// its free spreading speed `2 sqrt(D theta)`, with density above
/// `GROWTH_DENSITY_FACTOR * eps_vanish`, to count as spreading.
const GROWTH_SPEED_FRACTION: f64 = 0.1;
const GROWTH_DENSITY_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeciesEvidence {
    pub label: Classification,
    pub final_front: f64,
    /// Front level above which spreading is certain, if one is known.
    pub barrier: Option<f64>,
    pub trailing_slope: Option<f64>,
    pub final_max_density: f64,
    pub final_front_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub prey: Classification,
    pub predator: Classification,
    pub prey_evidence: SpeciesEvidence,
    pub predator_evidence: SpeciesEvidence,
}

fn trailing_slope(records: &[Record], front: impl Fn(&Record) -> f64) -> Option<f64> {
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = records.iter().map(front).collect();
    trailing_half_fit(&ts, &ys, MIN_FIT_SAMPLES).ok().map(|f| f.slope)
}

fn classify_species(
    records: &[Record],
    detect: &DetectConfig,
    barrier: Option<f64>,
    free_speed: f64,
    front: impl Fn(&Record) -> f64 + Copy,
    density: impl Fn(&Record) -> f64 + Copy,
    velocity: impl Fn(&Record) -> f64 + Copy,
) -> SpeciesEvidence {
    let last = records.last().expect("trajectory has at least the initial record");
    let slope = trailing_slope(records, front);
    let vanished = window_vanished(records.iter().map(|r| (r.t, density(r), velocity(r))), last.t, detect);
    let label = match barrier {
        Some(level) if records.iter().any(|r| front(r) > level * (1.0 + detect.spread_margin)) => {
            Classification::Spreading
        }
        _ if vanished => Classification::Vanishing,
        None if slope.is_some_and(|s| s > GROWTH_SPEED_FRACTION * free_speed)
            && density(last) > GROWTH_DENSITY_FACTOR * detect.eps_vanish =>
        {
            Classification::Spreading
        }
        _ => Classification::Undecided,
    };
    SpeciesEvidence {
        label,
        final_front: front(last),
        barrier,
        trailing_slope: slope,
        final_max_density: density(last),
        final_front_speed: velocity(last),
    }
}

/// Labels each species from a finished run.
///
/// The prey barrier uses the residual growth rate `a - b(1 + ac)` when it is
/// positive; otherwise prey spreading can only be inferred from sustained
/// front growth. The predator barrier is `pi / 2`.
pub fn classify_outcome(traj: &Trajectory, params: &ModelParams, detect: &DetectConfig) -> Outcome {
    classify_records(&traj.records, params, detect)
}

/// [`classify_outcome`] on bare records, e.g. read back from a time series.
pub fn classify_records(records: &[Record], params: &ModelParams, detect: &DetectConfig) -> Outcome {
    let residual = params.prey_residual_growth();
    let prey_barrier = (residual > 0.0).then(|| habitat_barrier(params.d, residual));
    let prey = classify_species(
        records,
        detect,
        prey_barrier,
        2.0 * (params.d * params.a).sqrt(),
        |r| r.g,
        |r| r.umax,
        |r| r.gdot,
    );
    let predator = classify_species(
        records,
        detect,
        Some(habitat_barrier(1.0, 1.0)),
        2.0,
        |r| r.h,
        |r| r.vmax,
        |r| r.hdot,
    );
    Outcome {
        prey: prey.label,
        predator: predator.label,
        prey_evidence: prey,
        predator_evidence: predator,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `d a < 1`.
    #[serde(rename = "W")]
    Weak,
    /// `d [a - b(1 + ac)] > 1 + ac`.
    #[serde(rename = "S")]
    Strong,
    #[serde(rename = "neither")]
    Neither,
}

pub fn regime(params: &ModelParams) -> Regime {
    let ModelParams { a, b, c, d, .. } = *params;
    if d * a < 1.0 {
        Regime::Weak
    } else if d * (a - b * (1.0 + a * c)) > 1.0 + a * c {
        Regime::Strong
    } else {
        Regime::Neither
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpeedExpectation {
    /// Limit for large Stefan coefficients.
    Value { speed: f64 },
    /// Limiting window for large Stefan coefficients.
    Window { lo: f64, hi: f64 },
    /// Bounds valid at the given coefficients.
    Sandwich { lo: f64, hi: f64 },
}

impl SpeedExpectation {
    pub fn range(&self) -> (f64, f64) {
        match *self {
            SpeedExpectation::Value { speed } => (speed, speed),
            SpeedExpectation::Window { lo, hi } | SpeedExpectation::Sandwich { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeBounds {
    pub regime: Regime,
    pub prey: SpeedExpectation,
    pub predator: SpeedExpectation,
}

/// Speed expectations for the regime `params` falls in; requires `a > b(1 + ac)`.
pub fn speed_regime_bounds(params: &ModelParams) -> Result<RegimeBounds> {
    params.validate()?;
    let ModelParams { a, b, c, d, .. } = *params;
    let residual = a - b * (1.0 + a * c);
    if residual <= 0.0 {
        return Err(Error::NotApplicable(format!(
            "regime bounds need a > b(1 + ac); a - b(1 + ac) = {residual}"
        )));
    }
    Ok(match regime(params) {
        Regime::Weak => RegimeBounds {
            regime: Regime::Weak,
            prey: SpeedExpectation::Window {
                lo: 2.0 * (d * residual).sqrt(),
                hi: 2.0 * (d * (a - b)).sqrt(),
            },
            predator: SpeedExpectation::Value { speed: 2.0 },
        },
        Regime::Strong => RegimeBounds {
            regime: Regime::Strong,
            prey: SpeedExpectation::Value {
                speed: 2.0 * (d * a).sqrt(),
            },
            predator: SpeedExpectation::Window {
                lo: 2.0 * ((1.0 + a * c) * (1.0 - b * c)).sqrt(),
                hi: 2.0 * (1.0 + a * c).sqrt(),
            },
        },
        Regime::Neither => {
            let table = speed_table(params)?;
            RegimeBounds {
                regime: Regime::Neither,
                prey: SpeedExpectation::Sandwich {
                    lo: table.kund_beta.unwrap_or(0.0),
                    hi: table.kbar_beta,
                },
                predator: SpeedExpectation::Sandwich {
                    lo: table.kund_mu,
                    hi: table.kbar_mu,
                },
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedReport {
    pub prey_fit: LineFit,
    pub predator_fit: LineFit,
    pub table: SpeedTable,
    /// `[kund_beta, kbar_beta]`; the lower end is absent when `a <= b(1 + ac)`.
    pub prey_sandwich: (Option<f64>, f64),
    pub predator_sandwich: (f64, f64),
    /// Measured slope inside the sandwich inflated by 5% at each end.
    pub prey_in_sandwich: bool,
    pub predator_in_sandwich: bool,
    pub regime: Regime,
    pub regime_bounds: Option<RegimeBounds>,
}

fn in_band(slope: f64, lo: f64, hi: f64) -> bool {
    slope >= (1.0 - SANDWICH_SLACK) * lo && slope <= (1.0 + SANDWICH_SLACK) * hi
}

/// Trailing-half slopes of `g` and `h` with the theoretical bounds attached.
pub fn measure_speeds(traj: &Trajectory) -> Result<SpeedReport> {
    measure_record_speeds(&traj.records, &traj.params)
}

pub fn measure_record_speeds(records: &[Record], params: &ModelParams) -> Result<SpeedReport> {
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let gs: Vec<f64> = records.iter().map(|r| r.g).collect();
    let hs: Vec<f64> = records.iter().map(|r| r.h).collect();
    let prey_fit = trailing_half_fit(&ts, &gs, MIN_FIT_SAMPLES)?;
    let predator_fit = trailing_half_fit(&ts, &hs, MIN_FIT_SAMPLES)?;
    let table = speed_table(params)?;
    let prey_lo = table.kund_beta.unwrap_or(0.0);
    Ok(SpeedReport {
        prey_fit,
        predator_fit,
        table,
        prey_sandwich: (table.kund_beta, table.kbar_beta),
        predator_sandwich: (table.kund_mu, table.kbar_mu),
        prey_in_sandwich: in_band(prey_fit.slope, prey_lo, table.kbar_beta),
        predator_in_sandwich: in_band(predator_fit.slope, table.kund_mu, table.kbar_mu),
        regime: regime(params),
        regime_bounds: speed_regime_bounds(params).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameError {
    pub t: f64,
    /// `sup |u - A|` on `[0, k0 t]`.
    pub u_err: f64,
    /// `sup |v - B|` on `[0, k0 t]`.
    pub v_err: f64,
}

/// Largest admissible moving-frame speed, `min(kund_beta, kund_mu)`.
pub fn max_frame_speed(params: &ModelParams) -> Result<f64> {
    let table = speed_table(params)?;
    table
        .kund_beta
        .map(|k| k.min(table.kund_mu))
        .ok_or_else(|| Error::NotApplicable("prey lower speed undefined: a <= b(1 + ac)".into()))
}

/// Sup-norm distance to `(A, B)` over the window `[0, k0 t]` of each snapshot.
pub fn moving_frame_error(snapshots: &[Snapshot], k0: f64, a_lim: f64, b_lim: f64) -> Result<Vec<FrameError>> {
    if !(k0 >= 0.0 && k0.is_finite()) {
        return Err(Error::invalid("k0", "must be finite and non-negative"));
    }
    snapshots
        .iter()
        .map(|s| {
            let window = k0 * s.t;
            let extent = s.x.last().copied().unwrap_or(0.0);
            if window > extent {
                return Err(Error::Data(format!(
                    "window [0, {window}] at t = {} exceeds snapshot domain [0, {extent}]",
                    s.t
                )));
            }
            let mut u_err = 0.0f64;
            let mut v_err = 0.0f64;
            for ((&x, &u), &v) in s.x.iter().zip(&s.u).zip(&s.v) {
                if x > window && x > 0.0 {
                    break;
                }
                u_err = u_err.max((u - a_lim).abs());
                v_err = v_err.max((v - b_lim).abs());
            }
            Ok(FrameError { t: s.t, u_err, v_err })
        })
        .collect()
}
