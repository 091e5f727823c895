//! Critical Stefan coefficients and the sufficient spreading/vanishing criteria.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::SolverConfig;
use crate::logistic::{solve_logistic, Classification, DetectConfig, LogisticProblem};
use crate::model::{derive_constants, habitat_barrier, InitialProfile, ModelParams};
use crate::semiwave::kappa;

const EXPANSION_FACTOR: f64 = 4.0;
const MAX_EXPANSIONS: usize = 12;
const MAX_RETRIES: usize = 3;

/// Bisection settings for [`critical_gamma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdOptions {
    /// Relative width `(hi - lo) / hi` at which bisection stops.
    pub tol: f64,
    /// Solver used for each classification run; `t_max` is the first horizon.
    pub solver: SolverConfig,
    pub detect: DetectConfig,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            tol: 1e-3,
            solver: SolverConfig {
                ny: 100,
                t_max: 100.0,
                record_interval: 0.1,
                stop_on_decision: true,
                ..SolverConfig::default()
            },
            detect: DetectConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThresholdValue {
    Finite {
        gamma: f64,
    },
    /// The initial habitat already exceeds the barrier.
    SpreadsForAllGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaThreshold {
    pub value: ThresholdValue,
    /// Final `(lo, hi)`: `lo` vanishes, `hi` spreads.
    pub bracket: Option<(f64, f64)>,
    pub runs: usize,
    /// Some run stayed undecided at the horizon cap and was counted as vanishing.
    pub flagged: bool,
}

impl GammaThreshold {
    pub fn gamma(&self) -> Option<f64> {
        match self.value {
            ThresholdValue::Finite { gamma } => Some(gamma),
            ThresholdValue::SpreadsForAllGamma => None,
        }
    }

    /// Whether `gamma` lies strictly above the threshold (spreading side).
    pub fn spreads_at(&self, gamma: f64) -> bool {
        self.gamma().is_none_or(|g| gamma > g)
    }
}

struct Oracle<'a> {
    d: f64,
    theta: f64,
    rho0: f64,
    z0: &'a InitialProfile,
    opts: &'a ThresholdOptions,
    runs: usize,
    flagged: bool,
}

impl Oracle<'_> {
    /// Spreading (`true`) or vanishing (`false`) at `gamma`, escalating the
    /// horizon on undecided runs.
    fn spreads(&mut self, gamma: f64) -> Result<bool> {
        let mut cfg = self.opts.solver;
        cfg.stop_on_decision = true;
        let cap = self.opts.detect.t_cap.max(cfg.t_max);
        for attempt in 0..=MAX_RETRIES {
            self.runs += 1;
            let problem = LogisticProblem {
                d: self.d,
                theta: self.theta,
                gamma,
            };
            match solve_logistic(problem, self.rho0, self.z0, &cfg, &self.opts.detect)?.classification {
                Classification::Spreading => return Ok(true),
                Classification::Vanishing => return Ok(false),
                Classification::Undecided if attempt < MAX_RETRIES && cfg.t_max < cap => {
                    cfg.t_max = (2.0 * cfg.t_max).min(cap);
                }
                Classification::Undecided => break,
            }
        }
        self.flagged = true;
        Ok(false)
    }
}

/// Critical `gamma(d, theta, rho0, z0)` separating vanishing from spreading
/// for the scalar free boundary problem.
pub fn critical_gamma(
    d: f64,
    theta: f64,
    rho0: f64,
    z0: &InitialProfile,
    opts: &ThresholdOptions,
) -> Result<GammaThreshold> {
    for (name, v) in [("d", d), ("theta", theta), ("rho0", rho0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be finite and positive, got {v}")));
        }
    }
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::invalid("tol", "must lie in (0, 1)"));
    }
    if rho0 >= habitat_barrier(d, theta) {
        return Ok(GammaThreshold {
            value: ThresholdValue::SpreadsForAllGamma,
            bracket: None,
            runs: 0,
            flagged: false,
        });
    }
    opts.solver.validate()?;

    let mut oracle = Oracle {
        d,
        theta,
        rho0,
        z0,
        opts,
        runs: 0,
        flagged: false,
    };
    let start = 1.0;
    let (mut lo, mut hi) = if oracle.spreads(start)? {
        let mut hi = start;
        let mut found = None;
        for _ in 0..MAX_EXPANSIONS {
            let g = hi / EXPANSION_FACTOR;
            if oracle.spreads(g)? {
                hi = g;
            } else {
                found = Some(g);
                break;
            }
        }
        match found {
            Some(lo) => (lo, hi),
            None => return Err(Error::InconclusiveThreshold { lo: 0.0, hi }),
        }
    } else {
        let mut lo = start;
        let mut found = None;
        for _ in 0..MAX_EXPANSIONS {
            let g = lo * EXPANSION_FACTOR;
            if oracle.spreads(g)? {
                found = Some(g);
                break;
            }
            lo = g;
        }
        match found {
            Some(hi) => (lo, hi),
            None => return Err(Error::InconclusiveThreshold { lo, hi: f64::INFINITY }),
        }
    };

    while hi - lo > opts.tol * hi {
        let mid = 0.5 * (lo + hi);
        if oracle.spreads(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(GammaThreshold {
        value: ThresholdValue::Finite { gamma: 0.5 * (lo + hi) },
        bracket: Some((lo, hi)),
        runs: oracle.runs,
        flagged: oracle.flagged,
    })
}

/// The three named thresholds of the coupled model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NamedThresholds {
    /// `gamma(d, a, g0, u0)`.
    pub beta_star: GammaThreshold,
    /// `gamma(1, 1, h0, v0)`.
    pub mu_star: GammaThreshold,
    /// `gamma(1, 1 + ac, h0, v0)`.
    pub mu_lower: GammaThreshold,
}

pub fn named_thresholds(
    params: &ModelParams,
    u0: &InitialProfile,
    v0: &InitialProfile,
    opts: &ThresholdOptions,
) -> Result<NamedThresholds> {
    params.validate()?;
    Ok(NamedThresholds {
        beta_star: critical_gamma(params.d, params.a, params.g0, u0, opts)?,
        mu_star: critical_gamma(1.0, 1.0, params.h0, v0, opts)?,
        mu_lower: critical_gamma(1.0, 1.0 + params.a * params.c, params.h0, v0, opts)?,
    })
}

/// Outcome of checking one sufficient criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    NotSatisfied,
    NotApplicable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub description: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionEntry {
    /// Stable identifier of the criterion.
    pub id: &'static str,
    /// The statement being instantiated, in words.
    pub statement: &'static str,
    pub values: Vec<(String, f64)>,
    pub hypotheses: Vec<Hypothesis>,
    pub verdict: Verdict,
    /// What the criterion predicts when satisfied.
    pub prediction: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CriterionEntry {
    fn new(id: &'static str, statement: &'static str, prediction: &'static str) -> Self {
        CriterionEntry {
            id,
            statement,
            values: Vec::new(),
            hypotheses: Vec::new(),
            verdict: Verdict::NotSatisfied,
            prediction,
            note: None,
        }
    }

    fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push((name.to_string(), v));
        self
    }

    fn hyp(mut self, description: String, holds: bool) -> Self {
        self.hypotheses.push(Hypothesis { description, holds });
        self
    }

    fn conclude(mut self) -> Self {
        self.verdict = if self.hypotheses.iter().all(|h| h.holds) {
            Verdict::Satisfied
        } else {
            Verdict::NotSatisfied
        };
        self
    }

    fn inconclusive(mut self, err: &Error) -> Self {
        self.verdict = Verdict::Inconclusive;
        self.note = Some(err.to_string());
        self
    }

    pub fn satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub params: ModelParams,
    pub entries: Vec<CriterionEntry>,
}

impl CriteriaReport {
    pub fn entry(&self, id: &str) -> Option<&CriterionEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

pub const PREY_VANISHING: &str = "prey_vanishing";
pub const PREDATOR_SPREADING: &str = "predator_spreading";
pub const PREDATOR_VANISHING: &str = "predator_vanishing";
pub const PREY_SPREADING: &str = "prey_spreading";
pub const FAST_PREDATOR: &str = "fast_predator_strong_predation";
pub const SEPARATION: &str = "separation_envelope";

fn threshold_text(t: &GammaThreshold) -> String {
    match t.gamma() {
        Some(g) => format!("{g:.6}"),
        None => "spreads for all".into(),
    }
}

/// Evaluates every sufficient spreading/vanishing criterion at `params`.
pub fn check_criteria(
    params: &ModelParams,
    u0: &InitialProfile,
    v0: &InitialProfile,
    opts: &ThresholdOptions,
) -> Result<CriteriaReport> {
    params.validate()?;
    let ModelParams {
        a,
        b,
        c,
        d,
        beta,
        mu,
        g0,
        h0,
    } = *params;
    let prey_barrier = habitat_barrier(d, a);
    let pred_barrier = habitat_barrier(1.0, 1.0);
    let pred_barrier_c = habitat_barrier(1.0, 1.0 + a * c);
    let u0_below_a = u0.sup() <= a;

    let beta_star = critical_gamma(d, a, g0, u0, opts);
    let mu_star = critical_gamma(1.0, 1.0, h0, v0, opts);
    let mu_lower = critical_gamma(1.0, 1.0 + a * c, h0, v0, opts);

    let mut entries = Vec::new();

    let e = CriterionEntry::new(
        PREY_VANISHING,
        "g0 below the prey barrier and beta <= beta* imply a bounded prey front",
        "g_inf finite",
    )
    .value("g0", g0)
    .value("prey_barrier", prey_barrier)
    .value("beta", beta);
    entries.push(match &beta_star {
        Ok(t) => e
            .value("beta_star", t.gamma().unwrap_or(f64::INFINITY))
            .hyp(format!("g0 = {g0} < {prey_barrier:.6}"), g0 < prey_barrier)
            .hyp(
                format!("beta = {beta} <= beta* = {}", threshold_text(t)),
                !t.spreads_at(beta),
            )
            .conclude(),
        Err(err) => e.inconclusive(err),
    });

    let e = CriterionEntry::new(
        PREDATOR_SPREADING,
        "h0 >= pi/2, or mu > mu*, implies an unbounded predator front",
        "h_inf infinite",
    )
    .value("h0", h0)
    .value("predator_barrier", pred_barrier)
    .value("mu", mu);
    entries.push(if h0 >= pred_barrier {
        e.hyp(format!("h0 = {h0} >= {pred_barrier:.6}"), true).conclude()
    } else {
        match &mu_star {
            Ok(t) => e
                .value("mu_star", t.gamma().unwrap_or(f64::INFINITY))
                .hyp(format!("mu = {mu} > mu* = {}", threshold_text(t)), t.spreads_at(mu))
                .conclude(),
            Err(err) => e.inconclusive(err),
        }
    });

    let pred_vanish_hyps = |e: CriterionEntry, t: &GammaThreshold| {
        e.value("mu_lower", t.gamma().unwrap_or(0.0))
            .hyp(format!("sup u0 = {} <= a = {a}", u0.sup()), u0_below_a)
            .hyp(format!("h0 = {h0} < {pred_barrier_c:.6}"), h0 < pred_barrier_c)
            .hyp(
                format!("mu = {mu} < mu_lower = {}", threshold_text(t)),
                t.gamma().is_some_and(|g| mu < g),
            )
    };

    let e = CriterionEntry::new(
        PREDATOR_VANISHING,
        "u0 <= a, h0 below the predator barrier for theta = 1 + ac, and mu < mu_lower imply a bounded predator front",
        "h_inf finite",
    )
    .value("h0", h0)
    .value("predator_barrier_1_plus_ac", pred_barrier_c)
    .value("mu", mu);
    let pred_vanish_entry = match &mu_lower {
        Ok(t) => pred_vanish_hyps(e, t).conclude(),
        Err(err) => e.inconclusive(err),
    };
    entries.push(pred_vanish_entry);

    let e = CriterionEntry::new(
        PREY_SPREADING,
        "the predator-vanishing hypotheses plus g0 above the prey barrier or beta > beta* imply an unbounded prey front",
        "g_inf infinite and h_inf finite",
    )
    .value("g0", g0)
    .value("prey_barrier", prey_barrier)
    .value("beta", beta);
    entries.push(match (&mu_lower, &beta_star) {
        (Ok(ml), Ok(bs)) => {
            let prey_large = g0 > prey_barrier || (g0 < prey_barrier && bs.spreads_at(beta));
            pred_vanish_hyps(e, ml)
                .value("beta_star", bs.gamma().unwrap_or(f64::INFINITY))
                .hyp(
                    format!(
                        "g0 = {g0} > {prey_barrier:.6} or beta = {beta} > beta* = {}",
                        threshold_text(bs)
                    ),
                    prey_large,
                )
                .conclude()
        }
        (Err(err), _) | (_, Err(err)) => e.inconclusive(err),
    });

    let e = CriterionEntry::new(
        FAST_PREDATOR,
        "(beta, mu) with k(beta, d, a) < k(mu, 1, 1) and b > a: a spreading predator forces a bounded prey front",
        "g_inf finite provided h_inf infinite",
    )
    .value("b", b)
    .value("a", a);
    entries.push(match (kappa(beta, d, a), kappa(mu, 1.0, 1.0)) {
        (Ok(kb), Ok(km)) => e
            .value("k_beta", kb)
            .value("k_mu", km)
            .hyp(format!("k(beta,d,a) = {kb:.6} < k(mu,1,1) = {km:.6}"), kb < km)
            .hyp(format!("b = {b} > a = {a}"), b > a)
            .conclude(),
        (Err(err), _) | (_, Err(err)) => e.inconclusive(&err),
    });

    let sep = separation_condition(params, u0, v0)?;
    let mut e = CriterionEntry::new(
        SEPARATION,
        "a slow predator and a wide prey head start keep g(t) >= K mu t + h0 + L for all t",
        "g(t) >= K mu t + h0 + L and g(t) > h(t) for all t",
    )
    .value("K", sep.k)
    .value("sigma", sep.sigma);
    if sep.applicable {
        e = e
            .value("L_sigma", sep.l_sigma)
            .value("delta_sigma", sep.delta_sigma)
            .value("rhs", sep.rhs)
            .hyp(
                format!("sigma = {:.6} < {:.6}", sep.sigma, sep.rhs),
                sep.condition_satisfied,
            )
            .hyp(format!("g0 - h0 = {} > L = {:.6}", g0 - h0, sep.l_sigma), sep.gap_ok)
            .conclude();
    } else {
        e.verdict = Verdict::NotApplicable;
        e.note = Some(format!(
            "sigma = K mu = {:.6} >= sqrt(2da) = {:.6}",
            sep.sigma,
            (2.0 * d * a).sqrt()
        ));
    }
    entries.push(e);

    Ok(CriteriaReport {
        params: *params,
        entries,
    })
}

/// Constructive separation test for a slow predator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationReport {
    pub k: f64,
    pub sigma: f64,
    /// `sigma < sqrt(2 d a)`; the remaining fields are NaN otherwise.
    pub applicable: bool,
    pub l_sigma: f64,
    pub delta_sigma: f64,
    /// `beta * delta * (pi / L) * exp(-sigma L / (2d))`.
    pub rhs: f64,
    pub condition_satisfied: bool,
    pub gap_ok: bool,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.applicable && self.condition_satisfied && self.gap_ok
    }

    /// Guaranteed lower envelope `K mu t + h0 + L` for the prey front.
    pub fn envelope(&self, h0: f64, t: f64) -> f64 {
        self.sigma * t + h0 + self.l_sigma
    }
}

const SEPARATION_SAMPLES: usize = 10_000;

/// `L_sigma = 2 d pi / sqrt(2 d a - sigma^2)`.
pub fn separation_length(d: f64, a: f64, sigma: f64) -> f64 {
    2.0 * d * PI / (2.0 * d * a - sigma * sigma).sqrt()
}

fn delta_sigma(params: &ModelParams, u0: &InitialProfile, sigma: f64, l: f64, samples: usize) -> f64 {
    let ModelParams { a, d, h0, g0, .. } = *params;
    let mut ratio_inf = f64::INFINITY;
    let mut inv_inf = f64::INFINITY;
    // Interior samples only: phi vanishes at both ends.
    for i in 1..samples {
        let y = l * i as f64 / samples as f64;
        let phi = (-sigma * y / (2.0 * d)).exp() * (PI * y / l).sin();
        let x = y + h0;
        let u = if x <= g0 { u0.value(x) } else { 0.0 };
        ratio_inf = ratio_inf.min(u / phi);
        inv_inf = inv_inf.min(1.0 / phi);
    }
    ratio_inf.min(0.5 * a * inv_inf)
}

pub fn separation_condition(
    params: &ModelParams,
    u0: &InitialProfile,
    v0: &InitialProfile,
) -> Result<SeparationReport> {
    params.validate()?;
    let consts = derive_constants(params, u0, v0);
    let ModelParams {
        a, d, beta, mu, g0, h0, ..
    } = *params;
    let sigma = consts.k * mu;
    if sigma * sigma >= 2.0 * d * a {
        return Ok(SeparationReport {
            k: consts.k,
            sigma,
            applicable: false,
            l_sigma: f64::NAN,
            delta_sigma: f64::NAN,
            rhs: f64::NAN,
            condition_satisfied: false,
            gap_ok: false,
        });
    }
    let l = separation_length(d, a, sigma);
    let coarse = delta_sigma(params, u0, sigma, l, SEPARATION_SAMPLES);
    let fine = delta_sigma(params, u0, sigma, l, 4 * SEPARATION_SAMPLES);
    if (coarse - fine).abs() > 1e-3 * fine.abs().max(1e-12) {
        return Err(Error::Numerical(format!(
            "delta_sigma not stable under refinement: {coarse} vs {fine}"
        )));
    }
    let delta = fine;
    let rhs = beta * delta * (PI / l) * (-sigma * l / (2.0 * d)).exp();
    Ok(SeparationReport {
        k: consts.k,
        sigma,
        applicable: true,
        l_sigma: l,
        delta_sigma: delta,
        rhs,
        condition_satisfied: sigma < rhs,
        gap_ok: g0 - h0 > l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ThresholdOptions {
        ThresholdOptions {
            tol: 1e-2,
            solver: SolverConfig {
                ny: 64,
                t_max: 50.0,
                stop_on_decision: true,
                ..SolverConfig::default()
            },
            ..ThresholdOptions::default()
        }
    }

    #[test]
    fn spreads_for_all_gamma_above_barrier() {
        let rho0 = PI / 2.0 + 0.1;
        let z0 = InitialProfile::cosine(rho0, 0.5).unwrap();
        let t = critical_gamma(1.0, 1.0, rho0, &z0, &quick()).unwrap();
        assert_eq!(t.value, ThresholdValue::SpreadsForAllGamma);
        assert_eq!(t.runs, 0);
        assert!(t.spreads_at(1e-9));
    }

    #[test]
    fn finite_threshold_has_consistent_bracket() {
        let z0 = InitialProfile::cosine(0.8, 0.5).unwrap();
        let opts = quick();
        let t = critical_gamma(1.0, 1.0, 0.8, &z0, &opts).unwrap();
        let (lo, hi) = t.bracket.unwrap();
        let g = t.gamma().unwrap();
        assert!(lo < g && g < hi && (hi - lo) <= opts.tol * hi);
        let run = |gamma| {
            let mut cfg = opts.solver;
            cfg.t_max = opts.detect.t_cap;
            solve_logistic(
                LogisticProblem {
                    d: 1.0,
                    theta: 1.0,
                    gamma,
                },
                0.8,
                &z0,
                &cfg,
                &opts.detect,
            )
            .unwrap()
            .classification
        };
        assert_eq!(run(hi), Classification::Spreading);
        assert_ne!(run(lo), Classification::Spreading);
    }

    #[test]
    fn separation_length_identities() {
        let (d, a) = (1.3, 2.1);
        assert!((separation_length(d, a, 0.0) - PI * (2.0 * d / a).sqrt()).abs() < 1e-12);
        let sigma = 0.7;
        let l = separation_length(d, a, sigma);
        let eig = (4.0 * d * (a - a / 2.0) - sigma * sigma).sqrt() / (2.0 * d);
        assert!((PI / l - eig).abs() < 1e-14);
    }

    #[test]
    fn separation_not_applicable_for_fast_predator() {
        let p = ModelParams {
            a: 1.0,
            b: 0.5,
            c: 0.5,
            d: 1.0,
            beta: 1.0,
            mu: 10.0,
            g0: 5.0,
            h0: 1.0,
        };
        let u0 = InitialProfile::cosine(5.0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(1.0, 1.0).unwrap();
        let s = separation_condition(&p, &u0, &v0).unwrap();
        assert!(!s.applicable && !s.holds());
    }

    #[test]
    fn separation_holds_for_wide_head_start() {
        let p = ModelParams {
            a: 2.0,
            b: 0.5,
            c: 0.5,
            d: 1.0,
            beta: 5.0,
            mu: 0.1,
            g0: 8.0,
            h0: 0.5,
        };
        let u0 = InitialProfile::cosine(8.0, 1.5).unwrap();
        // Slope of v0 is pi/2 < M2 sqrt((1 + c M1) / 2) = 2, so K = 4.
        let v0 = InitialProfile::cosine(0.5, 0.5).unwrap();
        let s = separation_condition(&p, &u0, &v0).unwrap();
        assert!((s.k - 4.0).abs() < 1e-12);
        assert!(s.holds(), "{s:?}");
        assert!(s.delta_sigma > 0.0 && s.delta_sigma.is_finite());
    }
}
