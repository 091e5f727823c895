//! Semi-wave speed `k(nu, d, theta)`.
//!
//! The semi-wave is the monotone solution of
//!
//! ```text
//! d q'' - k q' + q (theta - q) = 0,   q(0) = 0,   q'(0) = k / nu,   q(inf) = theta
//! ```
//!
//! with `0 < k < 2 sqrt(theta d)`. In the phase plane `(q, p = q')` the profile
//! is the stable manifold of the saddle `(theta, 0)`. We leave the saddle along
//! its eigendirection, integrate `dp/dq = (k p - q(theta - q)) / (d p)` down to
//! `q = 0` and root-find on `p(0; k) - k / nu`.

use serde::Serialize;

use crate::error::{Error, Result, ScanPoint};
use crate::model::ModelParams;

/// Default relative tolerance on `k`.
pub const DEFAULT_TOL: f64 = 1e-9;

const SCAN_POINTS: usize = 32;
const MANIFOLD_OFFSET: f64 = 1e-6;
const MAX_RK_STEPS: usize = 200_000;

#[derive(Debug, Clone, Serialize)]
pub struct SemiWave {
    pub k: f64,
    pub nu: f64,
    pub d: f64,
    pub theta: f64,
    /// `(y, q(y))`, starting at `(0, 0)` and ending where `q = theta (1 - 1e-6)`.
    pub profile: Vec<(f64, f64)>,
    /// `q'(0)` of the reconstructed profile.
    pub slope_at_origin: f64,
}

impl SemiWave {
    /// Speed ceiling `2 sqrt(theta d)`.
    pub fn speed_limit(&self) -> f64 {
        2.0 * (self.theta * self.d).sqrt()
    }
}

/// Adaptive Dormand–Prince 5(4) integrator for small autonomous-in-form systems.
struct DormandPrince {
    rtol: f64,
    atol: f64,
    max_step: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

enum Flow {
    Continue,
    Stop,
}

impl DormandPrince {
    /// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction). `f`
    /// returns `None` when the state leaves the domain of the vector field;
    /// `observe` sees every accepted point and may stop early.
    fn integrate<const N: usize>(
        &self,
        x0: f64,
        x1: f64,
        y0: [f64; N],
        f: impl Fn(f64, &[f64; N]) -> Option<[f64; N]>,
        mut observe: impl FnMut(f64, &[f64; N]) -> Flow,
    ) -> Result<(f64, [f64; N])> {
        let dir = (x1 - x0).signum();
        let span = (x1 - x0).abs();
        let mut x = x0;
        let mut y = y0;
        let mut h = (span * 1e-3).min(self.max_step) * dir;
        let combine = |y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]| {
            let mut out = *y;
            for (w, k) in terms {
                for i in 0..N {
                    out[i] += h * w * k[i];
                }
            }
            out
        };
        let Some(mut k1) = f(x, &y) else {
            return Err(Error::Numerical("vector field undefined at the initial point".into()));
        };
        if let Flow::Stop = observe(x, &y) {
            return Ok((x, y));
        }
        for _ in 0..MAX_RK_STEPS {
            if (x1 - x) * dir <= 0.0 {
                return Ok((x, y));
            }
            if (x + h - x1) * dir > 0.0 {
                h = x1 - x;
            }
            let stages = (|| {
                let k2 = f(x + C2 * h, &combine(&y, h, &[(A21, &k1)]))?;
                let k3 = f(x + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]))?;
                let k4 = f(x + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
                let k5 = f(
                    x + C5 * h,
                    &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                )?;
                let k6 = f(
                    x + h,
                    &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                )?;
                let y5 = combine(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let k7 = f(x + h, &y5)?;
                Some((k3, k4, k5, k6, k7, y5))
            })();
            let Some((k3, k4, k5, k6, k7, y5)) = stages else {
                // Left the domain inside the step: retry smaller.
                h *= 0.25;
                if h.abs() < 1e-14 * span.max(1.0) {
                    return Err(Error::Numerical("step size underflow near a singular point".into()));
                }
                continue;
            };
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / scale).abs());
            }
            if err <= 1.0 {
                x += h;
                y = y5;
                k1 = k7;
                if let Flow::Stop = observe(x, &y) {
                    return Ok((x, y));
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).abs().min(self.max_step) * dir;
            if h.abs() < 1e-14 * span.max(1.0) {
                return Err(Error::Numerical("step size underflow".into()));
            }
        }
        Err(Error::Numerical("too many integration steps".into()))
    }
}

struct PhasePlane {
    d: f64,
    theta: f64,
    rtol: f64,
}

impl PhasePlane {
    fn manifold_start(&self, k: f64) -> (f64, f64) {
        let delta = MANIFOLD_OFFSET * self.theta;
        let slope = (-k + (k * k + 4.0 * self.d * self.theta).sqrt()) / (2.0 * self.d);
        (self.theta - delta, slope * delta)
    }

    fn integrator(&self, max_step: f64) -> DormandPrince {
        // p is O(theta sqrt(theta/d)) on the manifold.
        let p_scale = self.theta * (self.theta / self.d).sqrt();
        DormandPrince {
            rtol: self.rtol,
            atol: self.rtol * 1e-3 * p_scale,
            max_step,
        }
    }

    /// `p(0; k)`, or 0 when the manifold reaches `p = 0` before `q = 0`.
    fn slope_at_origin(&self, k: f64) -> Result<f64> {
        let (q0, p0) = self.manifold_start(k);
        let (d, theta) = (self.d, self.theta);
        let hit_axis = std::cell::Cell::new(false);
        let (_, y) = self
            .integrator(self.theta)
            .integrate(
                q0,
                0.0,
                [p0],
                |q, y: &[f64; 1]| {
                    let p = y[0];
                    (p > 0.0).then(|| [(k * p - q * (theta - q)) / (d * p)])
                },
                |_, y| {
                    if y[0] <= 1e-12 * theta {
                        hit_axis.set(true);
                        Flow::Stop
                    } else {
                        Flow::Continue
                    }
                },
            )
            .or_else(|e| match e {
                // Singular approach to p = 0 near the speed ceiling.
                Error::Numerical(_) => {
                    hit_axis.set(true);
                    Ok((0.0, [0.0]))
                }
                other => Err(other),
            })?;
        Ok(if hit_axis.get() { 0.0 } else { y[0] })
    }

    /// Samples `(q, p, y)` with `y` measured from the manifold start.
    fn trace(&self, k: f64) -> Result<Vec<[f64; 3]>> {
        let (q0, p0) = self.manifold_start(k);
        let (d, theta) = (self.d, self.theta);
        let mut samples = Vec::new();
        self.integrator(theta / 400.0).integrate(
            q0,
            0.0,
            [p0, 0.0],
            |q, y: &[f64; 2]| {
                let p = y[0];
                (p > 0.0).then(|| [(k * p - q * (theta - q)) / (d * p), 1.0 / p])
            },
            |q, y| {
                samples.push([q, y[0], y[1]]);
                Flow::Continue
            },
        )?;
        Ok(samples)
    }
}

/// Solves for the unique semi-wave `(q, k)`; `k` to relative tolerance `tol`.
pub fn solve_semiwave(nu: f64, d: f64, theta: f64, tol: f64) -> Result<SemiWave> {
    for (name, v) in [("nu", nu), ("d", d), ("theta", theta)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be finite and positive, got {v}")));
        }
    }
    if !(tol > 1e-12 && tol < 1e-2) {
        return Err(Error::invalid("tol", format!("must lie in (1e-12, 1e-2), got {tol}")));
    }
    let plane = PhasePlane {
        d,
        theta,
        rtol: tol / 10.0,
    };
    let residual = |k: f64| plane.slope_at_origin(k).map(|p| p - k / nu);

    let limit = 2.0 * (theta * d).sqrt();
    let eps = 1e-8 * (theta * d).sqrt();
    let (lo, hi) = (eps, limit - eps);
    let ratio = (hi / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut scan = Vec::with_capacity(SCAN_POINTS);
    let mut bracket = None;
    for i in 0..SCAN_POINTS {
        let k = if i == SCAN_POINTS - 1 {
            hi
        } else {
            lo * ratio.powi(i as i32)
        };
        let r = residual(k)?;
        scan.push(ScanPoint { k, residual: r });
        if i > 0 {
            let prev = scan[i - 1];
            if prev.residual > 0.0 && r <= 0.0 {
                bracket = Some((prev.k, k));
                break;
            }
        }
    }
    let Some((mut k_lo, mut k_hi)) = bracket else {
        return Err(Error::Bracketing { scan });
    };
    while (k_hi - k_lo) > tol * k_lo {
        let mid = 0.5 * (k_lo + k_hi);
        if residual(mid)? > 0.0 {
            k_lo = mid;
        } else {
            k_hi = mid;
        }
    }
    let k = 0.5 * (k_lo + k_hi);

    let mut samples = plane.trace(k)?;
    samples.reverse();
    let y_origin = samples[0][2];
    let profile: Vec<(f64, f64)> = samples.iter().map(|s| (s[2] - y_origin, s[0].max(0.0))).collect();
    Ok(SemiWave {
        k,
        nu,
        d,
        theta,
        profile,
        slope_at_origin: samples[0][1],
    })
}

pub fn kappa(nu: f64, d: f64, theta: f64) -> Result<f64> {
    solve_semiwave(nu, d, theta, DEFAULT_TOL).map(|w| w.k)
}

/// The four comparison speeds bounding the asymptotic front speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedTable {
    /// `k(beta, d, a)`: upper bound for `g(t)/t`.
    pub kbar_beta: f64,
    /// `k(mu, 1, 1)`: lower bound for `h(t)/t`.
    pub kund_mu: f64,
    /// `k(mu, 1, 1 + ac)`: upper bound for `h(t)/t`.
    pub kbar_mu: f64,
    /// `k(beta, d, a - b(1 + ac))`, present only when `a > b(1 + ac)`.
    pub kund_beta: Option<f64>,
}

pub fn speed_table(params: &ModelParams) -> Result<SpeedTable> {
    params.validate()?;
    let ModelParams { a, c, d, beta, mu, .. } = *params;
    let residual = params.prey_residual_growth();
    let table = SpeedTable {
        kbar_beta: kappa(beta, d, a)?,
        kund_mu: kappa(mu, 1.0, 1.0)?,
        kbar_mu: kappa(mu, 1.0, 1.0 + a * c)?,
        kund_beta: if residual > 0.0 {
            Some(kappa(beta, d, residual)?)
        } else {
            None
        },
    };
    debug_assert!(table.kund_mu <= table.kbar_mu);
    debug_assert!(table.kund_beta.is_none_or(|k| k <= table.kbar_beta));
    Ok(table)
}
