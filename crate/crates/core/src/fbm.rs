//! Coupled prey-predator system with two free boundaries.
//!
//! Each species has its own front-fixed grid: prey `w(y) = u(g y)` and
//! predator `phi(xi) = v(h xi)`. The coupling terms are read across grids by
//! interpolation; beyond the other species' front the value is exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DtPolicy, FrontGrid, Interpolation};
use crate::logistic::{check_support, max_of};
use crate::model::{derive_constants, DerivedConstants, InitialProfile, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Prey grid nodes.
    pub ny: usize,
    /// Predator grid nodes.
    pub nxi: usize,
    pub dt: DtPolicy,
    pub t_max: f64,
    pub record_interval: f64,
    pub snapshot_interval: Option<f64>,
    /// Points per snapshot on the physical grid `[0, max(g, h)]`.
    pub snapshot_nodes: usize,
    pub interpolation: Interpolation,
    /// Stop a single-species run once it is classified.
    pub stop_on_decision: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            ny: 400,
            nxi: 400,
            dt: DtPolicy::default(),
            t_max: 50.0,
            record_interval: 0.1,
            snapshot_interval: None,
            snapshot_nodes: 401,
            interpolation: Interpolation::Linear,
            stop_on_decision: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ny < 16 || self.nxi < 16 {
            return Err(Error::invalid("solver.ny/nxi", "need at least 16 nodes per grid"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::invalid("solver.t_max", "must be finite and positive"));
        }
        if !(self.record_interval.is_finite() && self.record_interval > 0.0) {
            return Err(Error::invalid("solver.record_interval", "must be finite and positive"));
        }
        if let Some(s) = self.snapshot_interval {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid(
                    "solver.snapshot_interval",
                    "must be finite and positive",
                ));
            }
        }
        if self.snapshot_nodes < 2 {
            return Err(Error::invalid("solver.snapshot_nodes", "need at least 2 points"));
        }
        self.dt.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontState {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    /// Prey at `y_j`, physical position `g y_j`.
    pub w: Vec<f64>,
    /// Predator at `xi_i`, physical position `h xi_i`.
    pub phi: Vec<f64>,
}

impl FrontState {
    pub fn initial(params: &ModelParams, u0: &InitialProfile, v0: &InitialProfile, cfg: &SolverConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        check_support(u0, params.g0, "g0")?;
        check_support(v0, params.h0, "h0")?;
        let prey = FrontGrid::new(cfg.ny);
        let pred = FrontGrid::new(cfg.nxi);
        Ok(FrontState {
            t: 0.0,
            g: params.g0,
            h: params.h0,
            w: prey.sample(|y| u0.value(params.g0 * y)),
            phi: pred.sample(|xi| v0.value(params.h0 * xi)),
        })
    }

    /// Prey density at physical `x`, zero beyond `g`.
    pub fn u_at(&self, x: f64, interp: Interpolation) -> f64 {
        if x > self.g {
            0.0
        } else {
            interp.eval(&self.w, x / self.g)
        }
    }

    /// Predator density at physical `x`, zero beyond `h`.
    pub fn v_at(&self, x: f64, interp: Interpolation) -> f64 {
        if x > self.h {
            0.0
        } else {
            interp.eval(&self.phi, x / self.h)
        }
    }
}

/// Front velocities and clamp diagnostics of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepInfo {
    pub dt: f64,
    pub gdot: f64,
    pub hdot: f64,
    pub clamp_mass: f64,
}

/// Reusable buffers for repeated steps on fixed grids.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: ModelParams,
    cfg: SolverConfig,
    prey: FrontGrid,
    pred: FrontGrid,
    v_on_prey: Vec<f64>,
    u_on_pred: Vec<f64>,
}

impl Stepper {
    pub fn new(params: ModelParams, cfg: SolverConfig) -> Self {
        Stepper {
            params,
            cfg,
            prey: FrontGrid::new(cfg.ny),
            pred: FrontGrid::new(cfg.nxi),
            v_on_prey: vec![0.0; cfg.ny],
            u_on_pred: vec![0.0; cfg.nxi],
        }
    }

    /// `(g', h')` from the one-sided front stencils of `state`.
    pub fn front_velocities(&self, state: &FrontState) -> (f64, f64) {
        (
            -self.params.beta * self.prey.front_slope(&state.w) / state.g,
            -self.params.mu * self.pred.front_slope(&state.phi) / state.h,
        )
    }

    pub fn next_dt(&self, state: &FrontState) -> f64 {
        let dt = &self.cfg.dt;
        let (gdot, hdot) = self.front_velocities(state);
        dt.dt(self.prey.spacing(), state.g, gdot, self.params.d)
            .min(dt.dt(self.pred.spacing(), state.h, hdot, 1.0))
    }

    /// Advances `state` by `dt` (old-level coupling, explicit fronts).
    pub fn step_by(&mut self, state: &mut FrontState, dt: f64) -> StepInfo {
        let ModelParams { a, b, c, d, .. } = self.params;
        let interp = self.cfg.interpolation;
        let (gdot, hdot) = self.front_velocities(state);

        for j in 0..self.prey.nodes() {
            self.v_on_prey[j] = state.v_at(state.g * self.prey.coord(j), interp);
        }
        for i in 0..self.pred.nodes() {
            self.u_on_pred[i] = state.u_at(state.h * self.pred.coord(i), interp);
        }

        let g_new = state.g + dt * gdot;
        let h_new = state.h + dt * hdot;
        let v_on_prey = &self.v_on_prey;
        let u_on_pred = &self.u_on_pred;
        let mut clamp = self
            .prey
            .advance(&mut state.w, g_new, gdot, d, dt, |j, u| u * (a - u - b * v_on_prey[j]));
        clamp += self.pred.advance(&mut state.phi, h_new, hdot, 1.0, dt, |i, v| {
            v * (1.0 - v + c * u_on_pred[i])
        });
        state.g = g_new;
        state.h = h_new;
        state.t += dt;
        StepInfo {
            dt,
            gdot,
            hdot,
            clamp_mass: clamp,
        }
    }

    pub fn step(&mut self, state: &mut FrontState) -> StepInfo {
        let dt = self.next_dt(state);
        self.step_by(state, dt)
    }
}

/// One step with the configured time-step policy.
pub fn step(state: &FrontState, params: &ModelParams, cfg: &SolverConfig) -> Result<FrontState> {
    let mut next = state.clone();
    let info = Stepper::new(*params, *cfg).step(&mut next);
    if next.w.iter().chain(&next.phi).any(|v| !v.is_finite()) || !next.g.is_finite() || !next.h.is_finite() {
        return Err(Error::Instability {
            t: next.t,
            reason: format!("non-finite state after step (g' = {}, h' = {})", info.gdot, info.hdot),
        });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub gdot: f64,
    pub hdot: f64,
    pub umax: f64,
    pub vmax: f64,
    pub u_at_0: f64,
    pub v_at_0: f64,
    pub mass_u: f64,
    pub mass_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Worst observed ratios against the a-priori bounds, plus clamp totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorSummary {
    pub m1: f64,
    pub m2: f64,
    pub gdot_bound: f64,
    pub hdot_bound: f64,
    pub max_u_ratio: f64,
    pub max_v_ratio: f64,
    pub max_gdot_ratio: f64,
    pub max_hdot_ratio: f64,
    pub min_gdot: f64,
    pub min_hdot: f64,
    pub clamp_mass: f64,
    pub steps: u64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
    pub monitor: MonitorSummary,
    pub final_state: FrontState,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

/// Shortens the last step to land on `t_max`, and absorbs a round-off sized
/// remainder instead of taking a sliver step.
pub(crate) fn final_step(dt: f64, t: f64, t_max: f64) -> f64 {
    let rest = t_max - t;
    if rest - dt < 1e-6 * dt {
        rest
    } else {
        dt
    }
}

const DENSITY_SLACK: f64 = 1e-6;
const VELOCITY_SLACK: f64 = 1e-3;
const CLAMP_LIMIT: f64 = 1e-6;

fn record_of(state: &FrontState, stepper: &Stepper, gdot: f64, hdot: f64) -> Record {
    Record {
        t: state.t,
        g: state.g,
        h: state.h,
        gdot,
        hdot,
        umax: max_of(&state.w),
        vmax: max_of(&state.phi),
        u_at_0: state.w[0],
        v_at_0: state.phi[0],
        mass_u: state.g * stepper.prey.integral(&state.w),
        mass_v: state.h * stepper.pred.integral(&state.phi),
    }
}

/// Integrates to `cfg.t_max`, checking the a-priori density and front-speed
/// bounds after every step.
pub fn simulate(
    params: &ModelParams,
    u0: &InitialProfile,
    v0: &InitialProfile,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let mut state = FrontState::initial(params, u0, v0, cfg)?;
    let consts: DerivedConstants = derive_constants(params, u0, v0);
    let mut stepper = Stepper::new(*params, *cfg);
    let mut monitor = MonitorSummary {
        m1: consts.m1,
        m2: consts.m2,
        gdot_bound: consts.gdot_bound,
        hdot_bound: consts.hdot_bound,
        max_u_ratio: 0.0,
        max_v_ratio: 0.0,
        max_gdot_ratio: 0.0,
        max_hdot_ratio: 0.0,
        min_gdot: f64::INFINITY,
        min_hdot: f64::INFINITY,
        clamp_mass: 0.0,
        steps: 0,
    };
    let initial_mass = {
        let r = record_of(&state, &stepper, 0.0, 0.0);
        r.mass_u + r.mass_v
    };

    let (gdot0, hdot0) = stepper.front_velocities(&state);
    let mut records = vec![record_of(&state, &stepper, gdot0, hdot0)];
    let mut snapshots = Vec::new();
    if cfg.snapshot_interval.is_some() {
        snapshots.push(resample_physical(&state, cfg.snapshot_nodes, cfg.interpolation));
    }
    let mut next_record = cfg.record_interval;
    let mut next_snapshot = cfg.snapshot_interval.unwrap_or(f64::INFINITY);

    while state.t < cfg.t_max {
        let dt = final_step(stepper.next_dt(&state), state.t, cfg.t_max);
        let info = stepper.step_by(&mut state, dt);
        let t = state.t;
        monitor.steps += 1;
        monitor.clamp_mass += info.clamp_mass;

        let umax = max_of(&state.w);
        let vmax = max_of(&state.phi);
        if !(umax.is_finite() && vmax.is_finite() && state.g.is_finite() && state.h.is_finite()) {
            return Err(Error::Instability {
                t,
                reason: "non-finite density or front".into(),
            });
        }
        if monitor.clamp_mass > CLAMP_LIMIT * initial_mass {
            return Err(Error::Instability {
                t,
                reason: format!(
                    "clamped mass {:.3e} exceeds {CLAMP_LIMIT:e} of the initial mass",
                    monitor.clamp_mass
                ),
            });
        }
        monitor.max_u_ratio = monitor.max_u_ratio.max(umax / consts.m1);
        monitor.max_v_ratio = monitor.max_v_ratio.max(vmax / consts.m2);
        monitor.max_gdot_ratio = monitor.max_gdot_ratio.max(info.gdot / consts.gdot_bound);
        monitor.max_hdot_ratio = monitor.max_hdot_ratio.max(info.hdot / consts.hdot_bound);
        monitor.min_gdot = monitor.min_gdot.min(info.gdot);
        monitor.min_hdot = monitor.min_hdot.min(info.hdot);
        if umax > consts.m1 * (1.0 + DENSITY_SLACK) {
            return Err(Error::InvariantBreach {
                t,
                what: format!("max u = {umax} exceeds M1 = {}", consts.m1),
            });
        }
        if vmax > consts.m2 * (1.0 + DENSITY_SLACK) {
            return Err(Error::InvariantBreach {
                t,
                what: format!("max v = {vmax} exceeds M2 = {}", consts.m2),
            });
        }
        if info.gdot < -1e-12 || info.gdot > consts.gdot_bound * (1.0 + VELOCITY_SLACK) {
            return Err(Error::InvariantBreach {
                t,
                what: format!("g' = {} outside [0, {}]", info.gdot, consts.gdot_bound),
            });
        }
        if info.hdot < -1e-12 || info.hdot > consts.hdot_bound * (1.0 + VELOCITY_SLACK) {
            return Err(Error::InvariantBreach {
                t,
                what: format!("h' = {} outside [0, {}]", info.hdot, consts.hdot_bound),
            });
        }

        let last = t >= cfg.t_max;
        if t >= next_record - 1e-12 || last {
            // Velocities reported at the new level, matching the next step.
            let (gdot, hdot) = stepper.front_velocities(&state);
            records.push(record_of(&state, &stepper, gdot, hdot));
            while next_record <= t + 1e-12 {
                next_record += cfg.record_interval;
            }
        }
        if let Some(interval) = cfg.snapshot_interval {
            if t >= next_snapshot - 1e-12 || last {
                snapshots.push(resample_physical(&state, cfg.snapshot_nodes, cfg.interpolation));
                while next_snapshot <= t + 1e-12 {
                    next_snapshot += interval;
                }
            }
        }
    }

    Ok(Trajectory {
        params: *params,
        records,
        snapshots,
        monitor,
        final_state: state,
    })
}

/// Undoes the front-fixing maps: `(x, u, v)` on `nx` uniform points of `[0, max(g, h)]`.
pub fn resample_physical(state: &FrontState, nx: usize, interp: Interpolation) -> Snapshot {
    let extent = state.g.max(state.h);
    let x: Vec<f64> = (0..nx)
        .map(|i| {
            if i + 1 == nx {
                extent
            } else {
                extent * i as f64 / (nx - 1) as f64
            }
        })
        .collect();
    let u = x.iter().map(|&xi| state.u_at(xi, interp)).collect();
    let v = x.iter().map(|&xi| state.v_at(xi, interp)).collect();
    Snapshot { t: state.t, x, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::{solve_logistic, DetectConfig, LogisticProblem};

    fn params() -> ModelParams {
        ModelParams {
            a: 2.0,
            b: 0.5,
            c: 0.5,
            d: 1.0,
            beta: 2.0,
            mu: 2.0,
            g0: 3.0,
            h0: 2.0,
        }
    }

    fn small_cfg() -> SolverConfig {
        SolverConfig {
            ny: 101,
            nxi: 81,
            t_max: 1.0,
            record_interval: 0.1,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn fronts_may_cross() {
        let p = ModelParams {
            beta: 0.1,
            mu: 20.0,
            g0: 2.05,
            h0: 2.0,
            ..params()
        };
        let u0 = InitialProfile::cosine(p.g0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(p.h0, 1.0).unwrap();
        let traj = simulate(
            &p,
            &u0,
            &v0,
            &SolverConfig {
                t_max: 2.0,
                ..small_cfg()
            },
        )
        .unwrap();
        assert!(traj.records[0].g > traj.records[0].h);
        let last = traj.records.last().unwrap();
        assert!(last.h > last.g, "h = {} g = {}", last.h, last.g);
        assert!(traj.records.iter().all(|r| r.umax.is_finite() && r.vmax.is_finite()));
    }

    #[test]
    fn zero_prey_stays_zero() {
        let p = params();
        let u0 = InitialProfile::cosine(p.g0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(p.h0, 1.0).unwrap();
        let cfg = small_cfg();
        let mut s = FrontState::initial(&p, &u0, &v0, &cfg).unwrap();
        s.w.iter_mut().for_each(|w| *w = 0.0);
        let mut stepper = Stepper::new(p, cfg);
        let info = stepper.step(&mut s);
        assert_eq!(info.gdot, 0.0);
        assert!(s.w.iter().all(|&w| w == 0.0));
        assert_eq!(s.g, p.g0);
    }

    #[test]
    fn coupling_reads_interpolated_prey_inside_and_zero_outside() {
        // Matched analytic profile: w is the cosine profile, so the predator
        // grid must see u0(h xi) inside [0, g] and 0 beyond.
        let mut p = params();
        p.g0 = 2.0;
        p.h0 = 2.0;
        let u0 = InitialProfile::cosine(2.0, 1.5).unwrap();
        let v0 = InitialProfile::cosine(2.0, 1.0).unwrap();
        let cfg = SolverConfig { ny: 401, ..small_cfg() };
        let mut s = FrontState::initial(&p, &u0, &v0, &cfg).unwrap();
        s.h = 3.0; // front crossing: predator ahead of prey
        for i in 0..=30 {
            let x = 3.0 * i as f64 / 30.0;
            let read = s.u_at(x, Interpolation::Linear);
            if x > 2.0 {
                assert_eq!(read, 0.0);
            } else {
                assert!((read - u0.value(x)).abs() < 1e-5, "x = {x}: {read} vs {}", u0.value(x));
                if x < 2.0 {
                    assert!(read > 0.0);
                }
            }
        }
        let cubic = s.u_at(1.234, Interpolation::Cubic);
        assert!((cubic - u0.value(1.234)).abs() < 1e-8);
    }

    #[test]
    fn decoupled_prey_matches_logistic_solver() {
        let mut p = params();
        p.b = 0.0;
        p.c = 0.0;
        let u0 = InitialProfile::cosine(p.g0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(p.h0, 0.8).unwrap();
        let cfg = SolverConfig {
            dt: DtPolicy::Fixed { dt: 1e-3 },
            t_max: 2.0,
            ..small_cfg()
        };
        let traj = simulate(&p, &u0, &v0, &cfg).unwrap();
        let prey = solve_logistic(
            LogisticProblem {
                d: p.d,
                theta: p.a,
                gamma: p.beta,
            },
            p.g0,
            &u0,
            &cfg,
            &DetectConfig::default(),
        )
        .unwrap();
        assert_eq!(traj.records.len(), prey.records.len());
        for (r, s) in traj.records.iter().zip(&prey.records) {
            assert!((r.g - s.rho).abs() < 1e-10);
        }
        for (a, b) in traj.final_state.w.iter().zip(&prey.final_state.z) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn fronts_are_monotone_and_bounded() {
        let p = params();
        let u0 = InitialProfile::cosine(p.g0, 1.0).unwrap();
        let v0 = InitialProfile::bump(p.h0, 2.5).unwrap();
        let traj = simulate(
            &p,
            &u0,
            &v0,
            &SolverConfig {
                t_max: 3.0,
                ..small_cfg()
            },
        )
        .unwrap();
        for w in traj.records.windows(2) {
            assert!(w[1].g >= w[0].g && w[1].h >= w[0].h);
        }
        assert!(traj.monitor.max_u_ratio <= 1.0 + 1e-6);
        assert!(traj.monitor.max_v_ratio <= 1.0 + 1e-6);
        assert!(traj.monitor.min_gdot >= -1e-12);
    }

    #[test]
    fn resample_round_trip_and_zero_extension() {
        let mut p = params();
        p.g0 = 2.0;
        p.h0 = 2.0;
        let u0 = InitialProfile::cosine(2.0, 1.0).unwrap();
        let v0 = InitialProfile::bump(2.0, 1.0).unwrap();
        let cfg = small_cfg();
        let mut s = FrontState::initial(&p, &u0, &v0, &cfg).unwrap();
        s.h = 2.5;
        let snap = resample_physical(&s, 501, Interpolation::Linear);
        assert_eq!(snap.x[0], 0.0);
        assert_eq!((snap.u[0], snap.v[0]), (s.w[0], s.phi[0]));
        assert_eq!(*snap.x.last().unwrap(), 2.5);
        for ((&x, &u), &v) in snap.x.iter().zip(&snap.u).zip(&snap.v) {
            if x > 2.0 {
                assert_eq!(u, 0.0);
                if x < 2.5 {
                    assert!(v > 0.0);
                }
            }
        }
        // Re-interpolating the snapshot at the prey grid images reproduces
        // the node values to linear-interpolation order.
        let grid = FrontGrid::new(cfg.ny);
        let dx = snap.x[1];
        for j in 0..cfg.ny {
            let x = s.g * grid.coord(j);
            let k = ((x / dx).floor() as usize).min(snap.x.len() - 2);
            let t = (x - snap.x[k]) / dx;
            let back = snap.u[k] + t * (snap.u[k + 1] - snap.u[k]);
            assert!((back - s.w[j]).abs() < 2e-4, "node {j}: {back} vs {}", s.w[j]);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let p = params();
        let u0 = InitialProfile::cosine(p.g0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(p.h0, 1.0).unwrap();
        let cfg = SolverConfig { ny: 8, ..small_cfg() };
        assert!(simulate(&p, &u0, &v0, &cfg).is_err());
    }
}
