//! Independent construction of the stationary spiral near an isolated zero,
//! by integrating the polar profile ODEs on a graded grid.
//!
//! With `g = r e_R(gamma)`, `j = gamma'`, `d = r^2 j`, the conservation law
//! `s r^2 = tau d^{s+1} + d^{s+2}` holds for some constant `tau >= 0`. The
//! `tau = 0` branch carries the infinite spiral (`j ~ 1/(beta theta)`,
//! `r ~ C theta^{n(s)}`); `tau > 0` winds only finitely.
//!
//! Both branches are integrated in regularized variables that vanish at
//! `theta = 0`: `w = 1/j` for `tau = 0` (with `w' = beta V(w)`), and
//! `v = j^{-(2s+1)/(2s)}` for `tau > 0` (with `v' = ((2s+1)/(2s)) Y`). That
//! turns the boundary condition `j -> inf` into the exact initial value 0.

use crate::curve::{AngularGrid, Curve};
use crate::math::{FloatExt, Pchip};
use crate::report::ResidualReport;
use crate::vec2::Vec2;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum SpiralError {
    InvalidParams(&'static str),
    /// `1 + d^s (r^2 + 2c)/(s+2) <= 0` inside the window: the radial turning
    /// point was reached (happens for sufficiently negative `c`).
    NonpositiveV { theta: f64 },
    /// The implicit relation `d^{-s} = (tau + d) j / s` failed to converge.
    NewtonFailure { theta: f64 },
    /// The squared radial-slope factor went nonpositive inside the window.
    NonpositiveF2 { theta: f64 },
    /// Asymptotic fit window holds fewer than 20 nodes.
    WindowTooSmall { nodes: usize },
    /// Requested embedding window is not covered by the solution.
    DomainMismatch { lo: f64, hi: f64 },
}

impl fmt::Display for SpiralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpiralError::InvalidParams(m) => write!(f, "invalid profile parameters: {m}"),
            SpiralError::NonpositiveV { theta } => {
                write!(f, "V^2 <= 0 at theta = {theta}: radial turning point inside the window")
            }
            SpiralError::NewtonFailure { theta } => {
                write!(f, "implicit Jacobian relation did not converge at theta = {theta}")
            }
            SpiralError::NonpositiveF2 { theta } => write!(f, "F^2 <= 0 at theta = {theta}"),
            SpiralError::WindowTooSmall { nodes } => {
                write!(f, "fit window holds only {nodes} nodes (need 20)")
            }
            SpiralError::DomainMismatch { lo, hi } => {
                write!(f, "embedding window ({lo}, {hi}) not covered by the solution domain")
            }
        }
    }
}

impl core::error::Error for SpiralError {}

/// Parameters of the profile ODE.
#[derive(Clone, Copy, Debug)]
pub struct ProfileParams {
    pub s: f64,
    /// The constant of the first integral (circle average of
    /// `f(d) + |g'|^2/2 - |g|^2/2` for the minimizer). Standalone default:
    /// `-(s+1)`, the value that makes the identity map stationary.
    pub c: f64,
    pub tau: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub nodes: usize,
}

impl ProfileParams {
    pub fn new(s: f64, c: f64, tau: f64, theta_min: f64, theta_max: f64, nodes: usize) -> Result<Self, SpiralError> {
        let p = ProfileParams {
            s,
            c,
            tau,
            theta_min,
            theta_max,
            nodes,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default window for exponent work: eight decades below `theta_max`,
    /// 2000 nodes.
    pub fn standard(s: f64, c: f64, tau: f64, theta_max: f64) -> Result<Self, SpiralError> {
        Self::new(s, c, tau, 1e-8 * theta_max, theta_max, 2000)
    }

    fn validate(&self) -> Result<(), SpiralError> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(SpiralError::InvalidParams("s must be positive"));
        }
        if !(self.tau >= 0.0) {
            return Err(SpiralError::InvalidParams("tau must be nonnegative"));
        }
        if !(self.theta_min > 0.0 && self.theta_min < self.theta_max) {
            return Err(SpiralError::InvalidParams("need 0 < theta_min < theta_max"));
        }
        if !self.c.is_finite() {
            return Err(SpiralError::InvalidParams("c must be finite"));
        }
        if self.nodes < 50 {
            return Err(SpiralError::InvalidParams("need at least 50 grid nodes"));
        }
        Ok(())
    }

    /// `beta = 2(s+1)/sqrt(s(s+2))`.
    pub fn beta(&self) -> f64 {
        2.0 * (self.s + 1.0) / (self.s * (self.s + 2.0)).sqrt()
    }

    /// Radius exponent `n(s) = (s+2)/(2(s+1))`.
    pub fn n_of_s(&self) -> f64 {
        (self.s + 2.0) / (2.0 * (self.s + 1.0))
    }
}

/// Profile solution on a geometrically graded grid (log-uniform from
/// `theta_min` to `theta_max`). `gamma` is normalized by
/// `gamma(theta_max) = 0`.
#[derive(Clone, Debug)]
pub struct SpiralSolution {
    pub params: ProfileParams,
    pub thetas: Vec<f64>,
    pub j: Vec<f64>,
    pub w: Vec<f64>,
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    pub gamma: Vec<f64>,
    pub v: Vec<f64>,
    pub f2: Vec<f64>,
}

impl SpiralSolution {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Indices of nodes with `lo <= theta <= hi`.
    pub fn window_indices(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.thetas[i] >= lo && self.thetas[i] <= hi)
            .collect()
    }

    /// `|DW(grad u^g) e_R| = |r(1-j^2) e_R + r' j e_theta|` with the
    /// closed-form radial slope.
    pub fn dw_radial_norm(&self, i: usize) -> f64 {
        let rp = self.radial_slope(i);
        (self.r[i] * (1.0 - self.j[i] * self.j[i])).hypot(rp * self.j[i])
    }

    /// Closed-form `r' = sqrt(2 (1 + 1/s) tau~ j) F`.
    pub fn radial_slope(&self, i: usize) -> f64 {
        let s = self.params.s;
        let tt = self.params.tau + self.d[i];
        (2.0 * (1.0 + 1.0 / s) * tt * self.j[i]).sqrt() * self.f2[i].max(0.0).sqrt()
    }
}

fn log_grid(theta_min: f64, theta_max: f64, n: usize) -> Vec<f64> {
    let lr = (theta_max / theta_min).ln() / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(theta_min * (lr * k as f64).exp());
    }
    out[n - 1] = theta_max;
    out
}

/// `F^2` from the radial-slope equation, general `tau`:
/// `1 + (r^2+2c)/(2(1+1/s) tau~ j) - s^{1/s}/(2(1+1/s)) tau~^{-(1+1/s)} j^{-1/s}`.
fn f2_value(s: f64, c: f64, tau_tilde: f64, j: f64, r2: f64) -> f64 {
    let a = 2.0 * (1.0 + 1.0 / s);
    1.0 + (r2 + 2.0 * c) / (a * tau_tilde * j)
        - s.powf(1.0 / s) / a * tau_tilde.powf(-(1.0 + 1.0 / s)) * j.powf(-1.0 / s)
}

/// Integrate the `tau = 0` branch: RK4 on `w' = beta V(w)` from the exact
/// initial value `w(0) = 0` (where `V = 1` since `d(0) = 0`), then
/// reconstruct `d = (s w)^{1/(s+1)}`, `r = s^{1/(2(s+1))} w^{n(s)}`, and
/// `gamma` by trapezoidal integration of `j` downward from `theta_max`.
pub fn solve_tau_zero(params: &ProfileParams) -> Result<SpiralSolution, SpiralError> {
    params.validate()?;
    if params.tau != 0.0 {
        return Err(SpiralError::InvalidParams("solve_tau_zero needs tau = 0"));
    }
    let s = params.s;
    let c = params.c;
    let beta = params.beta();
    let n_s = params.n_of_s();
    let thetas = log_grid(params.theta_min, params.theta_max, params.nodes);

    let d_of_w = |w: f64| (s * w).powf(1.0 / (s + 1.0));
    let r2_of_w = |w: f64| s.powf(1.0 / (s + 1.0)) * w.powf(2.0 * n_s);
    let v2_of_w = |w: f64| {
        if w <= 0.0 {
            1.0
        } else {
            1.0 + d_of_w(w).powf(s) * (r2_of_w(w) + 2.0 * c) / (s + 2.0)
        }
    };

    let mut w = 0.0f64;
    let mut ws = Vec::with_capacity(params.nodes);
    let mut prev = 0.0f64;
    for &theta in &thetas {
        // Two RK4 substeps per grid interval.
        let mut t = prev;
        let h = (theta - prev) / 2.0;
        for _ in 0..2 {
            let rhs = |wv: f64, at: f64| -> Result<f64, SpiralError> {
                let v2 = v2_of_w(wv);
                if v2 <= 0.0 {
                    return Err(SpiralError::NonpositiveV { theta: at });
                }
                Ok(beta * v2.sqrt())
            };
            let k1 = rhs(w, t)?;
            let k2 = rhs(w + 0.5 * h * k1, t + 0.5 * h)?;
            let k3 = rhs(w + 0.5 * h * k2, t + 0.5 * h)?;
            let k4 = rhs(w + h * k3, t + h)?;
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        ws.push(w);
        prev = theta;
    }

    let n = params.nodes;
    let mut sol = SpiralSolution {
        params: *params,
        thetas,
        j: Vec::with_capacity(n),
        w: ws,
        r: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        gamma: Vec::new(),
        v: Vec::with_capacity(n),
        f2: Vec::with_capacity(n),
    };
    for i in 0..n {
        let wv = sol.w[i];
        let j = 1.0 / wv;
        let d = d_of_w(wv);
        let r2 = r2_of_w(wv);
        let v2 = v2_of_w(wv);
        if v2 <= 0.0 {
            return Err(SpiralError::NonpositiveV { theta: sol.thetas[i] });
        }
        sol.j.push(j);
        sol.d.push(d);
        sol.r.push(r2.sqrt());
        sol.v.push(v2.sqrt());
        sol.f2.push(f2_value(s, c, d, j, r2));
    }
    sol.gamma = integrate_gamma(&sol.thetas, &sol.j);
    Ok(sol)
}

/// Solve `d^{-s} = (tau + d) j / s` for `d` in `(0, (s/j)^{1/(s+1)}]` by
/// safeguarded Newton with a bisection fallback. The left side decreases and
/// the right side increases in `d`, so the root is unique; at the upper
/// bracket end the residual equals exactly `-tau j / s <= 0`.
fn solve_implicit_d(s: f64, tau: f64, j: f64, theta: f64) -> Result<f64, SpiralError> {
    let d_up = s.powf(1.0 / (s + 1.0)) * j.powf(-1.0 / (s + 1.0));
    if tau == 0.0 {
        return Ok(d_up);
    }
    let phi = |d: f64| d.powf(-s) - (tau + d) * j / s;
    let dphi = |d: f64| -s * d.powf(-s - 1.0) - j / s;
    // Start from the d << tau limit, clipped into the bracket.
    let mut x = (s / (tau * j)).powf(1.0 / s).min(d_up);
    let mut lo = 0.0f64;
    let mut hi = d_up;
    for _ in 0..200 {
        let fx = phi(x);
        if fx.abs() <= 1e-13 * ((tau + x) * j / s) {
            return Ok(x);
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / dphi(x);
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x {
            return Ok(next);
        }
        x = next;
    }
    Err(SpiralError::NewtonFailure { theta })
}

/// Integrate the `tau > 0` branch: RK4 on `v' = ((2s+1)/(2s)) Y(v)` with
/// `v = j^{-(2s+1)/(2s)}`, `v(0) = 0`. Each right-hand-side evaluation
/// solves the implicit relation for `d` at the current `j`.
pub fn solve_tau_positive(params: &ProfileParams) -> Result<SpiralSolution, SpiralError> {
    params.validate()?;
    if !(params.tau > 0.0) {
        return Err(SpiralError::InvalidParams("solve_tau_positive needs tau > 0"));
    }
    let s = params.s;
    let c = params.c;
    let tau = params.tau;
    let ev = (2.0 * s + 1.0) / (2.0 * s);
    let amp = 2.0 * s.powf(-1.0 / (2.0 * s)) * (2.0 * (1.0 + 1.0 / s)).sqrt();
    let thetas = log_grid(params.theta_min, params.theta_max, params.nodes);

    let y_of_v = |v: f64, at: f64| -> Result<f64, SpiralError> {
        if v <= 0.0 {
            // d = 0, F = 1 limit.
            return Ok(amp * tau.powf(0.5 + 0.5 / s) * (s / (s + 1.0)));
        }
        let j = v.powf(-1.0 / ev);
        let d = solve_implicit_d(s, tau, j, at)?;
        let tt = tau + d;
        let r2 = (s / tt).powf(1.0 / s) * j.powf(-(s + 1.0) / s);
        let f2 = f2_value(s, c, tt, j, r2);
        if f2 <= 0.0 {
            return Err(SpiralError::NonpositiveF2 { theta: at });
        }
        let bracket = 1.0 - tt / ((s + 1.0) * tau + (s + 2.0) * d);
        Ok(amp * f2.sqrt() * tt.powf(0.5 + 0.5 / s) * bracket)
    };

    let mut v = 0.0f64;
    let mut vs = Vec::with_capacity(params.nodes);
    let mut prev = 0.0f64;
    for &theta in &thetas {
        let mut t = prev;
        let h = (theta - prev) / 2.0;
        for _ in 0..2 {
            let k1 = ev * y_of_v(v, t)?;
            let k2 = ev * y_of_v(v + 0.5 * h * k1, t + 0.5 * h)?;
            let k3 = ev * y_of_v(v + 0.5 * h * k2, t + 0.5 * h)?;
            let k4 = ev * y_of_v(v + h * k3, t + h)?;
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        vs.push(v);
        prev = theta;
    }

    let n = params.nodes;
    let mut sol = SpiralSolution {
        params: *params,
        thetas,
        j: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        gamma: Vec::new(),
        v: Vec::with_capacity(n),
        f2: Vec::with_capacity(n),
    };
    for i in 0..n {
        let theta = sol.thetas[i];
        let j = vs[i].powf(-1.0 / ev);
        let d = solve_implicit_d(s, tau, j, theta)?;
        let tt = tau + d;
        let r2 = (s / tt).powf(1.0 / s) * j.powf(-(s + 1.0) / s);
        let f2 = f2_value(s, c, tt, j, r2);
        if f2 <= 0.0 {
            return Err(SpiralError::NonpositiveF2 { theta });
        }
        // The tau = 0 reduction factor; F^2 = n(s) V^2 only on that branch.
        let v2 = 1.0 + d.powf(s) * (r2 + 2.0 * c) / (s + 2.0);
        sol.j.push(j);
        sol.w.push(1.0 / j);
        sol.d.push(d);
        sol.r.push(r2.sqrt());
        sol.v.push(v2.max(0.0).sqrt());
        sol.f2.push(f2);
    }
    sol.gamma = integrate_gamma(&sol.thetas, &sol.j);
    Ok(sol)
}

/// Trapezoidal integral of `j` with `gamma(theta_max) = 0`.
fn integrate_gamma(thetas: &[f64], j: &[f64]) -> Vec<f64> {
    let n = thetas.len();
    let mut gamma = alloc::vec![0.0; n];
    for i in (0..n - 1).rev() {
        let panel = 0.5 * (j[i] + j[i + 1]) * (thetas[i + 1] - thetas[i]);
        gamma[i] = gamma[i + 1] - panel;
    }
    gamma
}

/// First derivative on a non-uniform grid, 3-point formula (exact for
/// quadratics), interior nodes only.
fn nonuniform_derivative(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let hm = xs[i] - xs[i - 1];
    let hp = xs[i + 1] - xs[i];
    (ys[i + 1] * hm * hm - ys[i - 1] * hp * hp + ys[i] * (hp * hp - hm * hm)) / (hm * hp * (hm + hp))
}

/// Second derivative on a non-uniform grid, 3-point formula.
fn nonuniform_second_derivative(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let hm = xs[i] - xs[i - 1];
    let hp = xs[i + 1] - xs[i];
    2.0 * (ys[i - 1] * hp - ys[i] * (hp + hm) + ys[i + 1] * hm) / (hm * hp * (hm + hp))
}

/// Tolerances for [`verify_profile`].
#[derive(Clone, Copy, Debug)]
pub struct ProfileTolerances {
    pub conservation: f64,
    pub eq1: f64,
    pub eq2: f64,
}

impl Default for ProfileTolerances {
    fn default() -> Self {
        ProfileTolerances {
            conservation: 1e-12,
            eq1: 1e-2,
            eq2: 1e-2,
        }
    }
}

/// Pointwise residuals of the two profile equations
///
/// ```text
/// (eq1)  1/2 (r'^2 + (rj)^2) = c + 1/2 r^2 + (s+1) d^{-s}
/// (eq2)  1/4 (r^2)''         = c + r^2 + d^{-s}
/// ```
///
/// using graded-grid finite differences, plus the conservation residual
/// `s r^2 - (tau d^{s+1} + d^{s+2})`. All normalized by local magnitudes;
/// maxima over interior nodes are reported.
pub fn verify_profile(sol: &SpiralSolution, tol: &ProfileTolerances) -> ResidualReport {
    let s = sol.params.s;
    let c = sol.params.c;
    let tau = sol.params.tau;
    let n = sol.len();
    let mut cons_max = 0.0f64;
    for i in 0..n {
        let sr2 = s * sol.r[i] * sol.r[i];
        let rhs = tau * sol.d[i].powf(s + 1.0) + sol.d[i].powf(s + 2.0);
        cons_max = cons_max.max((sr2 - rhs).abs() / sr2);
    }
    let r2: Vec<f64> = sol.r.iter().map(|&r| r * r).collect();
    let mut eq1_max = 0.0f64;
    let mut eq2_max = 0.0f64;
    for i in 1..n - 1 {
        let rp = nonuniform_derivative(&sol.thetas, &sol.r, i);
        let dis = sol.d[i].powf(-s);
        let lhs1 = 0.5 * (rp * rp + (sol.r[i] * sol.j[i]) * (sol.r[i] * sol.j[i]));
        let rhs1 = c + 0.5 * r2[i] + (s + 1.0) * dis;
        let scale1 = c.abs() + 0.5 * r2[i] + (s + 1.0) * dis + lhs1;
        eq1_max = eq1_max.max((lhs1 - rhs1).abs() / scale1);
        let lhs2 = 0.25 * nonuniform_second_derivative(&sol.thetas, &r2, i);
        let rhs2 = c + r2[i] + dis;
        let scale2 = c.abs() + r2[i] + dis + lhs2.abs();
        eq2_max = eq2_max.max((lhs2 - rhs2).abs() / scale2);
    }
    let mut report = ResidualReport::new();
    report.push("conservation", cons_max, tol.conservation);
    report.push("profile_eq1", eq1_max, tol.eq1);
    report.push("profile_eq2", eq2_max, tol.eq2);
    report
}

/// What to fit in [`fit_asymptotics`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitQuantity {
    /// `log j` against `log theta`.
    J,
    /// `log r` against `log theta`.
    R,
    /// `gamma` against `ln theta` (a slope, not a power law).
    Gamma,
    /// `log |DW e_R|` against `log theta`.
    DwEr,
}

/// Least-squares exponent and prefactor over a window.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    /// Log-log slope (for `Gamma`: the slope of `gamma` against `ln theta`).
    pub exponent: f64,
    /// `exp(intercept)`, the constant in `q ~ prefactor theta^exponent`
    /// (for `Gamma`: the intercept itself).
    pub prefactor: f64,
    pub window: (f64, f64),
    /// RMS residual of the fit in log space.
    pub residual: f64,
    pub nodes: usize,
}

pub fn fit_asymptotics(
    sol: &SpiralSolution,
    quantity: FitQuantity,
    window: (f64, f64),
) -> Result<FitResult, SpiralError> {
    let idx = sol.window_indices(window.0, window.1);
    if idx.len() < 20 {
        return Err(SpiralError::WindowTooSmall { nodes: idx.len() });
    }
    let mut xs = Vec::with_capacity(idx.len());
    let mut ys = Vec::with_capacity(idx.len());
    for &i in &idx {
        xs.push(sol.thetas[i].ln());
        ys.push(match quantity {
            FitQuantity::J => sol.j[i].ln(),
            FitQuantity::R => sol.r[i].ln(),
            FitQuantity::Gamma => sol.gamma[i],
            FitQuantity::DwEr => sol.dw_radial_norm(i).ln(),
        });
    }
    let (slope, icept, res) = crate::math::line_fit(&xs, &ys);
    Ok(FitResult {
        exponent: slope,
        prefactor: if quantity == FitQuantity::Gamma { icept } else { icept.exp() },
        window,
        residual: res,
        nodes: idx.len(),
    })
}

/// The windowed profile energy, by two algebraically equivalent routes.
#[derive(Clone, Copy, Debug)]
pub struct WindowEnergy {
    /// `int ((s+1)F^2 + 1) tau~ j/s + 1/2 s^{1/s} tau~^{-1/s} j^{-(s+1)/s} (1+j^2)`.
    pub reduced_form: f64,
    /// `int 1/2 (r^2 + r'^2 + (rj)^2) + d^{-s}` with the closed-form `r'`.
    pub direct_form: f64,
    /// Share of the `tau~ j` term in the reduced form.
    pub leading_share: f64,
}

/// Evaluate the energy of the profile over `[theta_lo, theta_hi]` by the
/// reduced closed form and the direct polar integrand. A window with fewer
/// than two nodes yields zeros.
pub fn energy_window(sol: &SpiralSolution, theta_lo: f64, theta_hi: f64) -> WindowEnergy {
    let s = sol.params.s;
    let idx = sol.window_indices(theta_lo, theta_hi);
    if idx.len() < 2 {
        return WindowEnergy {
            reduced_form: 0.0,
            direct_form: 0.0,
            leading_share: 0.0,
        };
    }
    let mut reduced = 0.0;
    let mut leading = 0.0;
    let mut direct = 0.0;
    for pair in idx.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = sol.thetas[b] - sol.thetas[a];
        let mut lead_ab = [0.0; 2];
        let mut red_ab = [0.0; 2];
        let mut dir_ab = [0.0; 2];
        for (k, &i) in [a, b].iter().enumerate() {
            let tt = sol.params.tau + sol.d[i];
            let j = sol.j[i];
            let lead = ((s + 1.0) * sol.f2[i] + 1.0) * tt * j / s;
            let tail = 0.5 * s.powf(1.0 / s) * tt.powf(-1.0 / s) * j.powf(-(s + 1.0) / s) * (1.0 + j * j);
            lead_ab[k] = lead;
            red_ab[k] = lead + tail;
            let rp = sol.radial_slope(i);
            let r2 = sol.r[i] * sol.r[i];
            dir_ab[k] = 0.5 * (r2 + rp * rp + r2 * j * j) + sol.d[i].powf(-s);
        }
        reduced += 0.5 * (red_ab[0] + red_ab[1]) * h;
        leading += 0.5 * (lead_ab[0] + lead_ab[1]) * h;
        direct += 0.5 * (dir_ab[0] + dir_ab[1]) * h;
    }
    WindowEnergy {
        reduced_form: reduced,
        direct_form: direct,
        leading_share: leading / reduced,
    }
}

/// Embed the profile as a closed curve on a circle grid: `g = r e_R(gamma)`
/// on `(0, theta_hi]` by monotone cubic interpolation of `r` and `gamma`,
/// the origin at the node `theta = 0` (pinned), and the unit circle
/// elsewhere. Evaluations should restrict to the embedded window; the fill
/// joins it discontinuously at `theta_hi`.
pub fn to_curve(sol: &SpiralSolution, grid: AngularGrid, theta_hi: f64) -> Result<Curve, SpiralError> {
    if theta_hi > sol.params.theta_max || theta_hi <= sol.params.theta_min {
        return Err(SpiralError::DomainMismatch {
            lo: sol.params.theta_min,
            hi: theta_hi,
        });
    }
    if grid.spacing() < sol.params.theta_min {
        return Err(SpiralError::DomainMismatch {
            lo: sol.params.theta_min,
            hi: grid.spacing(),
        });
    }
    let r_itp = Pchip::new(&sol.thetas, &sol.r);
    let g_itp = Pchip::new(&sol.thetas, &sol.gamma);
    let mut samples = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let theta = grid.node(i);
        if i == 0 {
            samples.push(Vec2::ZERO);
        } else if theta <= theta_hi {
            samples.push(Vec2::e_r(g_itp.eval(theta)) * r_itp.eval(theta));
        } else {
            samples.push(Vec2::e_r(theta));
        }
    }
    Curve::new(grid, samples, Some(0)).map_err(|_| SpiralError::DomainMismatch {
        lo: 0.0,
        hi: theta_hi,
    })
}
