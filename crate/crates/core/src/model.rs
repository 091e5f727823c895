//! Model parameters, closed-form derived constants and initial profiles.
//!
//! Prey `u` lives on `[0, g(t)]`, predator `v` on `[0, h(t)]`:
//!
//! ```text
//! u_t - d u_xx = u (a - u - b v)      g'(t) = -beta u_x(t, g(t))
//! v_t -   v_xx = v (1 - v + c u)      h'(t) = -mu   v_x(t, h(t))
//! ```
//!
//! with Neumann conditions at `x = 0` and zero extension beyond each front.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub beta: f64,
    pub mu: f64,
    pub g0: f64,
    pub h0: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_fields() {
            // b = c = 0 is the decoupled limit and stays admissible.
            let coupling = matches!(name, "b" | "c");
            if !value.is_finite() || value < 0.0 || (value == 0.0 && !coupling) {
                let need = if coupling { "non-negative" } else { "positive" };
                return Err(Error::invalid(name, format!("must be finite and {need}, got {value}")));
            }
        }
        if self.h0 > self.g0 {
            return Err(Error::invalid(
                "h0",
                format!("h0 = {} exceeds g0 = {}", self.h0, self.g0),
            ));
        }
        Ok(())
    }

    pub fn named_fields(&self) -> [(&'static str, f64); 8] {
        [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("beta", self.beta),
            ("mu", self.mu),
            ("g0", self.g0),
            ("h0", self.h0),
        ]
    }

    /// `b < min{a, 1/c}`.
    pub fn is_weak_predation(&self) -> bool {
        self.b < self.a && self.b * self.c < 1.0
    }

    /// `b >= a`.
    pub fn is_strong_predation(&self) -> bool {
        self.b >= self.a
    }

    /// `a - b(1 + ac)`: the prey growth rate left over under maximal predation.
    pub fn prey_residual_growth(&self) -> f64 {
        self.a - self.b * (1.0 + self.a * self.c)
    }

    /// Fact-(a) habitat barrier for the prey alone, `(pi/2) sqrt(d/a)`.
    pub fn prey_barrier(&self) -> f64 {
        habitat_barrier(self.d, self.a)
    }

    /// Barrier for the predator fed by maximal prey, `(pi/2) sqrt(1/(1+ac))`.
    pub fn predator_barrier(&self) -> f64 {
        habitat_barrier(1.0, 1.0 + self.a * self.c)
    }
}

/// `(pi/2) sqrt(d/theta)`: an initial habitat at least this wide always spreads.
pub fn habitat_barrier(d: f64, theta: f64) -> f64 {
    FRAC_PI_2 * (d / theta).sqrt()
}

/// Initial density, positive on `[0, support)` and zero from `support` on.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `amplitude * cos(pi x / (2 support))`.
    Cosine {
        support: f64,
        amplitude: f64,
    },
    /// `amplitude * (1 - (x/support)^2)^2`, zero slope at the front.
    Bump {
        support: f64,
        amplitude: f64,
    },
    Tabulated(TabulatedProfile),
}

impl InitialProfile {
    pub fn cosine(support: f64, amplitude: f64) -> Result<Self> {
        let p = InitialProfile::Cosine { support, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn bump(support: f64, amplitude: f64) -> Result<Self> {
        let p = InitialProfile::Bump { support, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialProfile::Cosine { support, amplitude } | InitialProfile::Bump { support, amplitude } => {
                if !(support.is_finite() && *support > 0.0) {
                    return Err(Error::invalid("support", "must be finite and positive"));
                }
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    return Err(Error::invalid("amplitude", "must be finite and positive"));
                }
                Ok(())
            }
            // Checked on construction.
            InitialProfile::Tabulated(_) => Ok(()),
        }
    }

    pub fn support(&self) -> f64 {
        match self {
            InitialProfile::Cosine { support, .. } | InitialProfile::Bump { support, .. } => *support,
            InitialProfile::Tabulated(t) => t.support(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        let s = self.support();
        if x >= s {
            return 0.0;
        }
        match self {
            InitialProfile::Cosine { amplitude, .. } => amplitude * (FRAC_PI_2 * x / s).cos(),
            InitialProfile::Bump { amplitude, .. } => {
                let r = x / s;
                amplitude * (1.0 - r * r).powi(2)
            }
            InitialProfile::Tabulated(t) => t.value(x),
        }
    }

    /// First derivative on `[0, support]`; the one-sided value at the front.
    pub fn derivative(&self, x: f64) -> f64 {
        let s = self.support();
        if x > s {
            return 0.0;
        }
        match self {
            InitialProfile::Cosine { amplitude, .. } => -amplitude * FRAC_PI_2 / s * (FRAC_PI_2 * x / s).sin(),
            InitialProfile::Bump { amplitude, .. } => {
                let r = x / s;
                -4.0 * amplitude * r * (1.0 - r * r) / s
            }
            InitialProfile::Tabulated(t) => t.derivative(x),
        }
    }

    /// `sup u0`.
    pub fn sup(&self) -> f64 {
        match self {
            InitialProfile::Cosine { amplitude, .. } | InitialProfile::Bump { amplitude, .. } => *amplitude,
            InitialProfile::Tabulated(t) => t.sup(),
        }
    }

    /// `min u0'` over `[0, support]`.
    pub fn min_derivative(&self) -> f64 {
        match self {
            InitialProfile::Cosine { support, amplitude } => -amplitude * FRAC_PI_2 / support,
            InitialProfile::Bump { support, amplitude } => -8.0 * amplitude / (3.0 * 3f64.sqrt() * support),
            InitialProfile::Tabulated(t) => t.min_derivative(),
        }
    }

    /// Same shape, new support; used when a profile family is re-anchored.
    pub fn with_support(&self, support: f64) -> Result<Self> {
        match self {
            InitialProfile::Cosine { amplitude, .. } => InitialProfile::cosine(support, *amplitude),
            InitialProfile::Bump { amplitude, .. } => InitialProfile::bump(support, *amplitude),
            InitialProfile::Tabulated(t) => {
                let scale = support / t.support();
                let xs: Vec<f64> = t.xs.iter().map(|x| x * scale).collect();
                TabulatedProfile::new(xs, t.values.clone(), t.front_slope / scale).map(InitialProfile::Tabulated)
            }
        }
    }
}

/// Sampled profile, interpolated by a cubic spline clamped to zero slope at
/// `x = 0` and to `front_slope` at the support.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    xs: Vec<f64>,
    values: Vec<f64>,
    front_slope: f64,
    second: Vec<f64>,
}

const PROFILE_SCAN: usize = 4000;

impl TabulatedProfile {
    pub fn new(xs: Vec<f64>, values: Vec<f64>, front_slope: f64) -> Result<Self> {
        let n = xs.len();
        if n < 3 || values.len() != n {
            return Err(Error::invalid(
                "table",
                "need at least 3 (x, value) pairs of equal length",
            ));
        }
        if xs[0] != 0.0 {
            return Err(Error::invalid("table", "first abscissa must be 0"));
        }
        if xs
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
            || xs.iter().any(|x| !x.is_finite())
        {
            return Err(Error::invalid(
                "table",
                "abscissae must be finite and strictly increasing",
            ));
        }
        if values[..n - 1].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("table", "values must be positive before the front"));
        }
        if values[n - 1] != 0.0 {
            return Err(Error::invalid("table", "value at the front must be exactly 0"));
        }
        if !(front_slope.is_finite() && front_slope <= 0.0) {
            return Err(Error::invalid("table", "front slope must be finite and non-positive"));
        }

        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        upper[0] = h[0];
        rhs[0] = 6.0 * ((values[1] - values[0]) / h[0]);
        for i in 1..n - 1 {
            lower[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            upper[i] = h[i];
            rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
        }
        lower[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (front_slope - (values[n - 1] - values[n - 2]) / h[n - 2]);
        let mut scratch = vec![0.0; n];
        tridiag::solve_in_place(&lower, &diag, &upper, &mut rhs, &mut scratch);

        let table = TabulatedProfile {
            xs,
            values,
            front_slope,
            second: rhs,
        };
        let s = table.support();
        for i in 0..PROFILE_SCAN {
            let x = s * i as f64 / PROFILE_SCAN as f64;
            if table.value(x) <= 0.0 {
                return Err(Error::invalid(
                    "table",
                    format!("interpolant is not positive at x = {x}"),
                ));
            }
        }
        Ok(table)
    }

    pub fn support(&self) -> f64 {
        *self.xs.last().expect("non-empty table")
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn front_slope(&self) -> f64 {
        self.front_slope
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&xi| xi <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }

    fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        (self.values[i + 1] - self.values[i]) / h - (3.0 * a * a - 1.0) * h * self.second[i] / 6.0
            + (3.0 * b * b - 1.0) * h * self.second[i + 1] / 6.0
    }

    fn scan(&self) -> impl Iterator<Item = f64> + '_ {
        let s = self.support();
        (0..=PROFILE_SCAN)
            .map(move |i| s * i as f64 / PROFILE_SCAN as f64)
            .chain(self.xs.iter().copied())
    }

    fn sup(&self) -> f64 {
        self.scan().map(|x| self.value(x)).fold(0.0, f64::max)
    }

    fn min_derivative(&self) -> f64 {
        self.scan().map(|x| self.derivative(x)).fold(0.0, f64::min)
    }
}

/// Constants computed in closed form from the parameters and initial data.
///
/// Quantities that only exist in a restricted regime (negative radicand or a
/// violated predation inequality) are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// `max{a, sup u0}`.
    pub m1: f64,
    /// `max{1 + c M1, sup v0}`.
    pub m2: f64,
    /// `2 max{M2 sqrt((1 + c M1)/2), -min v0'}`; `h(t) <= K mu t + h0`.
    pub k: f64,
    /// Upper bound on `g'(t)`.
    pub gdot_bound: f64,
    /// Upper bound on `h'(t)`, equal to `mu K`.
    pub hdot_bound: f64,
    /// Coexistence limit of the prey, weak predation only.
    pub coexist_u: Option<f64>,
    /// Coexistence limit of the predator, weak predation only.
    pub coexist_v: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub prey_barrier: f64,
    pub pred_barrier: f64,
}

fn two_sqrt(radicand: f64) -> Option<f64> {
    (radicand > 0.0).then(|| 2.0 * radicand.sqrt())
}

pub fn derive_constants(params: &ModelParams, u0: &InitialProfile, v0: &InitialProfile) -> DerivedConstants {
    let ModelParams {
        a, b, c, d, beta, mu, ..
    } = *params;
    let m1 = a.max(u0.sup());
    let m2 = (1.0 + c * m1).max(v0.sup());
    let k = 2.0 * (m2 * ((1.0 + c * m1) / 2.0).sqrt()).max(-v0.min_derivative());
    let gdot_bound = 2.0 * beta * (m1 * (a / (2.0 * d)).sqrt()).max(-u0.min_derivative());
    let (coexist_u, coexist_v) = if params.is_weak_predation() {
        (Some((a - b) / (1.0 + b * c)), Some((1.0 + a * c) / (1.0 + b * c)))
    } else {
        (None, None)
    };
    DerivedConstants {
        m1,
        m2,
        k,
        gdot_bound,
        hdot_bound: mu * k,
        coexist_u,
        coexist_v,
        c1: 2.0 * (d * a).sqrt(),
        c2: 2.0 * (1.0 + a * c).sqrt(),
        c3: two_sqrt(d * a - d * b * (1.0 + a * c)),
        c4: two_sqrt(d * a - d * b),
        c5: two_sqrt((1.0 + a * c) * (1.0 - b * c)),
        prey_barrier: params.prey_barrier(),
        pred_barrier: params.predator_barrier(),
    }
}

/// One round of the upper/lower bound iteration for the coexistence state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoexistenceBounds {
    pub u_upper: f64,
    pub v_upper: f64,
    pub u_lower: f64,
    pub v_lower: f64,
    /// The lower predator bound seeding the next round.
    pub v_lower_next: f64,
}

/// Iterates `u_up = a - b v_lo`, `v_up = 1 + c u_up`, `u_lo = a - b v_up`,
/// `v_lo' = 1 + c u_lo` starting from `v_lo = 1`.
pub fn iterate_coexistence_bounds(params: &ModelParams, n: usize) -> Result<Vec<CoexistenceBounds>> {
    let ModelParams { a, b, c, .. } = *params;
    if !params.is_weak_predation() {
        return Err(Error::Regime(format!(
            "need b < min(a, 1/c), got a = {a}, b = {b}, c = {c}"
        )));
    }
    if params.prey_residual_growth() <= 0.0 {
        return Err(Error::Regime(format!(
            "need a > b(1 + ac), got a = {a}, b = {b}, c = {c}"
        )));
    }
    let mut v_lower = 1.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u_upper = a - b * v_lower;
        let v_upper = 1.0 + c * u_upper;
        let u_lower = a - b * v_upper;
        let v_lower_next = 1.0 + c * u_lower;
        out.push(CoexistenceBounds {
            u_upper,
            v_upper,
            u_lower,
            v_lower,
            v_lower_next,
        });
        v_lower = v_lower_next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(a: f64, b: f64, c: f64, d: f64) -> ModelParams {
        ModelParams {
            a,
            b,
            c,
            d,
            beta: 1.0,
            mu: 1.0,
            g0: 2.0,
            h0: 1.0,
        }
    }

    #[test]
    fn m1_takes_initial_sup_when_larger() {
        let p = params(2.0, 0.5, 0.5, 1.0);
        let u0 = InitialProfile::cosine(2.0, 3.0).unwrap();
        let v0 = InitialProfile::cosine(1.0, 1.0).unwrap();
        let dc = derive_constants(&p, &u0, &v0);
        assert_eq!(dc.m1, 3.0);
        assert_relative_eq!(dc.m2, 2.5);
    }

    #[test]
    fn coexistence_and_speed_constants() {
        let p = params(2.0, 0.5, 0.5, 1.0);
        let u0 = InitialProfile::cosine(2.0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(1.0, 1.0).unwrap();
        let dc = derive_constants(&p, &u0, &v0);
        assert_relative_eq!(dc.coexist_u.unwrap(), 1.2, epsilon = 1e-15);
        assert_relative_eq!(dc.coexist_v.unwrap(), 1.6, epsilon = 1e-15);
        assert_relative_eq!(dc.c1, 2.0 * 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(dc.c3.unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(dc.c4.unwrap(), 2.0 * 1.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn undefined_constants_are_absent() {
        // a < b(1+ac) and bc > 1
        let p = params(1.0, 3.0, 0.5, 1.0);
        let u0 = InitialProfile::cosine(2.0, 1.0).unwrap();
        let v0 = InitialProfile::cosine(1.0, 1.0).unwrap();
        let dc = derive_constants(&p, &u0, &v0);
        assert!(dc.c3.is_none() && dc.c4.is_none() && dc.c5.is_none());
        assert!(dc.coexist_u.is_none() && dc.coexist_v.is_none());
    }

    #[test]
    fn one_round_of_bounds() {
        let b = iterate_coexistence_bounds(&params(2.0, 0.5, 0.5, 1.0), 1).unwrap();
        assert_eq!(b.len(), 1);
        assert_relative_eq!(b[0].u_upper, 1.5);
        assert_relative_eq!(b[0].v_upper, 1.75);
        assert_relative_eq!(b[0].u_lower, 1.125);
        assert_relative_eq!(b[0].v_lower, 1.0);
        assert_relative_eq!(b[0].v_lower_next, 1.5625);
    }

    #[test]
    fn fifty_rounds_converge() {
        let b = iterate_coexistence_bounds(&params(2.0, 0.5, 0.5, 1.0), 50).unwrap();
        let last = b.last().unwrap();
        for x in [last.u_upper, last.u_lower] {
            assert!((x - 1.2).abs() < 1e-10);
        }
        for x in [last.v_upper, last.v_lower] {
            assert!((x - 1.6).abs() < 1e-10);
        }
    }

    #[test]
    fn decoupled_limit() {
        let b = iterate_coexistence_bounds(&params(2.0, 1e-9, 0.5, 1.0), 1).unwrap();
        assert_relative_eq!(b[0].u_upper, 2.0, epsilon = 1e-8);
        assert_relative_eq!(b[0].v_upper, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(
            iterate_coexistence_bounds(&params(1.0, 3.0, 0.5, 1.0), 5),
            Err(Error::Regime(_))
        ));
        // weak predation but a <= b(1+ac): a=1, b=0.6, c=0.5 -> b(1+ac) = 0.9 < 1 is fine,
        // a=1, b=0.8, c=0.5 -> 1.2 > 1.
        assert!(matches!(
            iterate_coexistence_bounds(&params(1.0, 0.8, 0.5, 1.0), 5),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn parameter_validation() {
        let mut p = params(2.0, 0.5, 0.5, 1.0);
        assert!(p.validate().is_ok());
        p.a = -1.0;
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { ref field, .. }) if field == "a"));
        let mut p = params(2.0, 0.5, 0.5, 1.0);
        p.h0 = 3.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn cosine_profile_endpoints() {
        let p = InitialProfile::cosine(1.7, 0.9).unwrap();
        assert_eq!(p.derivative(0.0), 0.0);
        assert_eq!(p.value(0.0), 0.9);
        assert!(p.value(1.7).abs() < 1e-15);
        assert_eq!(p.value(2.0), 0.0);
        assert_relative_eq!(p.min_derivative(), p.derivative(1.7), epsilon = 1e-15);
    }

    #[test]
    fn bump_profile_has_flat_front() {
        let p = InitialProfile::bump(2.0, 1.5).unwrap();
        assert_eq!(p.derivative(0.0), 0.0);
        assert_eq!(p.derivative(2.0), 0.0);
        assert_eq!(p.value(2.0), 0.0);
        let xmin = 2.0 / 3f64.sqrt();
        assert_relative_eq!(p.min_derivative(), p.derivative(xmin), epsilon = 1e-14);
    }

    #[test]
    fn tabulated_reproduces_cosine() {
        let s = 2.0;
        let n = 41;
        let xs: Vec<f64> = (0..n).map(|i| s * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| if i == n - 1 { 0.0 } else { (FRAC_PI_2 * x / s).cos() })
            .collect();
        let cos = InitialProfile::cosine(s, 1.0).unwrap();
        let tab = InitialProfile::Tabulated(TabulatedProfile::new(xs, values, cos.derivative(s)).unwrap());
        for i in 0..200 {
            let x = s * i as f64 / 200.0;
            assert!((tab.value(x) - cos.value(x)).abs() < 1e-6);
            assert!((tab.derivative(x) - cos.derivative(x)).abs() < 1e-4);
        }
        assert!(tab.derivative(0.0).abs() < 1e-12);
        assert_relative_eq!(tab.derivative(s), cos.derivative(s), epsilon = 1e-12);
        assert!((tab.min_derivative() - cos.min_derivative()).abs() < 1e-4);
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(TabulatedProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.1], -1.0).is_err());
        assert!(TabulatedProfile::new(vec![0.1, 1.0, 2.0], vec![1.0, 0.5, 0.0], -1.0).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, -0.5, 0.0], -1.0).is_err());
    }

    proptest! {
        #[test]
        fn bounds_bracket_and_are_monotone(a in 0.5f64..5.0, bf in 0.01f64..0.95, c in 0.05f64..3.0) {
            // b chosen so that a > b(1+ac) (which also implies weak predation).
            let b = bf * a / (1.0 + a * c);
            let p = params(a, b, c, 1.0);
            let big_a = (a - b) / (1.0 + b * c);
            let big_b = (1.0 + a * c) / (1.0 + b * c);
            let seq = iterate_coexistence_bounds(&p, 30).unwrap();
            let tol = 1e-12;
            for w in seq.windows(2) {
                prop_assert!(w[1].u_upper <= w[0].u_upper + tol);
                prop_assert!(w[1].u_lower >= w[0].u_lower - tol);
                prop_assert!(w[1].v_upper <= w[0].v_upper + tol);
                prop_assert!(w[1].v_lower >= w[0].v_lower - tol);
            }
            for s in &seq {
                prop_assert!(s.u_lower <= big_a + tol && big_a <= s.u_upper + tol);
                prop_assert!(s.v_lower <= big_b + tol && big_b <= s.v_upper + tol);
            }
        }

        #[test]
        fn speed_constants_ordered(a in 0.5f64..5.0, bf in 0.01f64..0.95, c in 0.05f64..3.0, d in 0.1f64..10.0) {
            let b = bf * a / (1.0 + a * c);
            let p = params(a, b, c, d);
            let u0 = InitialProfile::cosine(2.0, 1.0).unwrap();
            let v0 = InitialProfile::cosine(1.0, 1.0).unwrap();
            let dc = derive_constants(&p, &u0, &v0);
            let (c3, c4) = (dc.c3.unwrap(), dc.c4.unwrap());
            prop_assert!(c3 < c4 && c4 < dc.c1);
        }
    }
}
