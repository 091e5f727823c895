//! One species on a front-fixed grid.
//!
//! With `y = x / s(t)` the moving interval `[0, s(t)]` becomes `[0, 1]` and
//!
//! ```text
//! z_t - (D / s^2) z_yy - (s'/s) y z_y = R(z)
//! ```
//!
//! Diffusion and drift are implicit (one tridiagonal solve), the reaction is
//! explicit. `z_y(0) = 0` via a ghost node, `z(1) = 0`.

use serde::{Deserialize, Serialize};

use crate::tridiag;

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum DtPolicy {
    Fixed {
        dt: f64,
    },
    /// `dt = min(dt_max, factor * dy^2 * s^2 / D)`.
    Parabolic {
        dt_max: f64,
        factor: f64,
    },
    /// `dt = min(dt_max, cfl * dy * s / |s'|)`: the front crosses at most
    /// `cfl` cells per step.
    Cfl {
        dt_max: f64,
        cfl: f64,
    },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl { dt_max: 1e-3, cfl: 0.5 }
    }
}

impl DtPolicy {
    pub fn dt(&self, dy: f64, front: f64, front_dot: f64, diffusivity: f64) -> f64 {
        match *self {
            DtPolicy::Fixed { dt } => dt,
            DtPolicy::Parabolic { dt_max, factor } => dt_max.min(factor * dy * dy * front * front / diffusivity),
            DtPolicy::Cfl { dt_max, cfl } => {
                let speed = front_dot.abs();
                if speed > 0.0 {
                    dt_max.min(cfl * dy * front / speed)
                } else {
                    dt_max
                }
            }
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = match *self {
            DtPolicy::Fixed { dt } => dt.is_finite() && dt > 0.0,
            DtPolicy::Parabolic { dt_max, factor: k } | DtPolicy::Cfl { dt_max, cfl: k } => {
                dt_max.is_finite() && dt_max > 0.0 && k.is_finite() && k > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(crate::Error::invalid(
                "solver.dt",
                "step parameters must be finite and positive",
            ))
        }
    }
}

/// Uniform grid on `[0, 1]` plus the scratch buffers for one implicit step.
#[derive(Debug, Clone)]
pub struct FrontGrid {
    nodes: usize,
    dy: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl FrontGrid {
    pub fn new(nodes: usize) -> Self {
        assert!(nodes >= 3, "front grid needs at least 3 nodes");
        let m = nodes - 1;
        FrontGrid {
            nodes,
            dy: 1.0 / m as f64,
            lower: vec![0.0; m],
            diag: vec![0.0; m],
            upper: vec![0.0; m],
            rhs: vec![0.0; m],
            scratch: vec![0.0; m],
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.dy
    }

    pub fn coord(&self, j: usize) -> f64 {
        if j + 1 == self.nodes {
            1.0
        } else {
            j as f64 * self.dy
        }
    }

    /// Samples `f(y)` at the nodes, forcing the boundary value `z(1) = 0`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut z: Vec<f64> = (0..self.nodes).map(|j| f(self.coord(j))).collect();
        z[self.nodes - 1] = 0.0;
        z
    }

    /// Second-order one-sided `z_y(1)`. In boundary layers steep enough
    /// that this comes out positive for non-negative data, the first-order
    /// difference is used instead so the front never recedes.
    pub fn front_slope(&self, z: &[f64]) -> f64 {
        let n = self.nodes - 1;
        let second = (3.0 * z[n] - 4.0 * z[n - 1] + z[n - 2]) / (2.0 * self.dy);
        if second > 0.0 && z[n] <= 0.0 {
            (z[n] - z[n - 1]) / self.dy
        } else {
            second
        }
    }

    /// Trapezoidal `∫_0^1 z dy`.
    pub fn integral(&self, z: &[f64]) -> f64 {
        let inner: f64 = z[1..self.nodes - 1].iter().sum();
        self.dy * (inner + 0.5 * (z[0] + z[self.nodes - 1]))
    }

    /// Advances `z` by `dt`, with `front` and `front_dot` already at the new
    /// level. `rate(j, z_j)` is the explicit reaction at node `j`. Negative
    /// values are clamped; the clamped mass `∫ |z^-| dx` is returned.
    #[allow(clippy::needless_range_loop)]
    pub fn advance(
        &mut self,
        z: &mut [f64],
        front: f64,
        front_dot: f64,
        diffusivity: f64,
        dt: f64,
        rate: impl Fn(usize, f64) -> f64,
    ) -> f64 {
        let m = self.nodes - 1;
        let dy = self.dy;
        let r = diffusivity * dt / (front * front * dy * dy);
        let drift = front_dot / front;
        for j in 0..m {
            let zj = z[j];
            self.rhs[j] = zj + dt * rate(j, zj);
            if j == 0 {
                // Ghost node z_{-1} = z_1; the drift vanishes at y = 0.
                self.lower[0] = 0.0;
                self.diag[0] = 1.0 + 2.0 * r;
                self.upper[0] = -2.0 * r;
                continue;
            }
            let vel = drift * j as f64 * dy;
            let half = 0.5 * dt * vel / dy;
            if half.abs() <= r {
                self.lower[j] = -r + half;
                self.diag[j] = 1.0 + 2.0 * r;
                self.upper[j] = -r - half;
            } else if vel > 0.0 {
                // Upwind from the front side keeps the matrix monotone.
                self.lower[j] = -r;
                self.diag[j] = 1.0 + 2.0 * r + 2.0 * half;
                self.upper[j] = -r - 2.0 * half;
            } else {
                self.lower[j] = -r + 2.0 * half;
                self.diag[j] = 1.0 + 2.0 * r - 2.0 * half;
                self.upper[j] = -r;
            }
        }
        // z_m = 0 contributes nothing to the last row.
        tridiag::solve_in_place(&self.lower, &self.diag, &self.upper, &mut self.rhs, &mut self.scratch);
        let mut clamped = 0.0;
        for j in 0..m {
            let v = self.rhs[j];
            if v < 0.0 {
                clamped -= v;
                z[j] = 0.0;
            } else {
                z[j] = v;
            }
        }
        z[m] = 0.0;
        clamped * dy * front
    }
}

/// Linear or four-point Lagrange interpolation on the uniform nodes of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    Cubic,
}

impl Interpolation {
    /// Value of the grid function `z` at `s ∈ [0, 1]`.
    pub fn eval(self, z: &[f64], s: f64) -> f64 {
        let m = z.len() - 1;
        let pos = (s.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let i = (pos.floor() as usize).min(m - 1);
        let t = pos - i as f64;
        match self {
            Interpolation::Linear => z[i] + t * (z[i + 1] - z[i]),
            Interpolation::Cubic => {
                if m < 3 {
                    return z[i] + t * (z[i + 1] - z[i]);
                }
                let base = i.saturating_sub(1).min(m - 3);
                let x = pos - base as f64;
                let mut acc = 0.0;
                for a in 0..4 {
                    let mut w = 1.0;
                    for b in 0..4 {
                        if a != b {
                            w *= (x - b as f64) / (a as f64 - b as f64);
                        }
                    }
                    acc += w * z[base + a];
                }
                acc
            }
        }
    }
}
