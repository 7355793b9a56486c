//! The stored energy `W(F) = 1/2 |F|^2 + h(det F)` with `h(t) = t^{-s}`, its
//! derivative `DW`, the energy-momentum tensor `M = F^T DW - W 1`, and the
//! circle quadrature for `I(g)`.
//!
//! `+inf` is an in-band value throughout: trial curves with nonpositive
//! Jacobian somewhere get infinite energy, which is what the minimizer's line
//! search uses as a barrier.

use crate::curve::DerivedCurve;
use crate::math::{FloatExt, TAU};
use crate::vec2::{Mat2, Vec2};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum EnergyError {
    /// `s` must be strictly positive.
    InvalidExponent { s: f64 },
    /// Operation requires `det grad u^g > 0`.
    NonpositiveJacobian { det: f64 },
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::InvalidExponent { s } => write!(f, "energy exponent must satisfy s > 0, got {s}"),
            EnergyError::NonpositiveJacobian { det } => {
                write!(f, "operation needs a positive Jacobian, got det = {det}")
            }
        }
    }
}

impl core::error::Error for EnergyError {}

/// The singular-energy exponent `s > 0` of `h(t) = t^{-s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyModel {
    s: f64,
}

/// `h`, `h'`, `h''`, and `f(t) = t h'(t) - h(t)` at a point, with a
/// feasibility flag. For `t <= 0` the values are the `t -> 0+` limits
/// (`h = +inf` and so on) and `feasible` is false.
#[derive(Clone, Copy, Debug)]
pub struct HFamily {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
    pub f: f64,
    pub feasible: bool,
}

impl EnergyModel {
    pub fn new(s: f64) -> Result<Self, EnergyError> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(EnergyError::InvalidExponent { s });
        }
        Ok(EnergyModel { s })
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn h_family(&self, t: f64) -> HFamily {
        if t > 0.0 {
            let s = self.s;
            let h = t.powf(-s);
            let dh = -s * h / t;
            HFamily {
                h,
                dh,
                d2h: s * (s + 1.0) * h / (t * t),
                f: -(s + 1.0) * h,
                feasible: true,
            }
        } else {
            HFamily {
                h: f64::INFINITY,
                dh: f64::NEG_INFINITY,
                d2h: f64::INFINITY,
                f: f64::NEG_INFINITY,
                feasible: false,
            }
        }
    }

    /// `h(t) = t^{-s}` for `t > 0`, `+inf` otherwise.
    #[inline]
    pub fn h(&self, t: f64) -> f64 {
        if t > 0.0 {
            t.powf(-self.s)
        } else {
            f64::INFINITY
        }
    }

    /// `h'(t) = -s t^{-s-1}` for `t > 0`.
    #[inline]
    pub fn dh(&self, t: f64) -> f64 {
        if t > 0.0 {
            -self.s * t.powf(-self.s - 1.0)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `f(t) = t h'(t) - h(t) = -(s+1) t^{-s}` for `t > 0`.
    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        if t > 0.0 {
            -(self.s + 1.0) * t.powf(-self.s)
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// `W(F) = 1/2 |F|^2 + h(det F)`; `+inf` iff `det F <= 0`.
pub fn stored_energy(f: Mat2, model: &EnergyModel) -> f64 {
    0.5 * f.norm2() + model.h(f.det())
}

/// `DW` at a one-homogeneous gradient, in tensor form:
/// `g (x) e_R + g' (x) e_theta + h'(d) (Jg (x) e_theta - Jg' (x) e_R)`.
pub fn dw(g: Vec2, dg: Vec2, theta: f64, model: &EnergyModel) -> Result<Mat2, EnergyError> {
    let d = crate::curve::jacobian(g, dg);
    if d <= 0.0 {
        return Err(EnergyError::NonpositiveJacobian { det: d });
    }
    let er = Vec2::e_r(theta);
    let et = Vec2::e_theta(theta);
    let hp = model.dh(d);
    Ok(g.outer(er) + dg.outer(et) + (g.perp().outer(et) - dg.perp().outer(er)) * hp)
}

/// Matrix-calculus form `DW(F) = F + h'(det F) cof F`. Test oracle for
/// [`dw`]; the two agree at every one-homogeneous gradient.
pub fn dw_matrix_form(f: Mat2, model: &EnergyModel) -> Result<Mat2, EnergyError> {
    let d = f.det();
    if d <= 0.0 {
        return Err(EnergyError::NonpositiveJacobian { det: d });
    }
    Ok(f + f.cof() * model.dh(d))
}

/// Energy-momentum tensor `M(F) = F^T DW(F) - W(F) 1` at the
/// one-homogeneous gradient built from `(g, g', theta)`.
pub fn energy_momentum(g: Vec2, dg: Vec2, theta: f64, model: &EnergyModel) -> Result<Mat2, EnergyError> {
    let f = crate::curve::one_homogeneous_gradient(g, dg, theta);
    let dwf = dw_matrix_form(f, model)?;
    Ok(f.transpose().mul_mat(dwf) - Mat2::identity() * stored_energy(f, model))
}

/// Closed-form contractions `(M e_R, M e_theta)`:
///
/// ```text
/// M e_R     = (1/2 |g|^2 + f(d) - 1/2 |g'|^2) e_R + (g'.g) e_theta
/// M e_theta = (g'.g) e_R + (1/2 |g'|^2 + f(d) - 1/2 |g|^2) e_theta
/// ```
///
/// Independent of the matrix route in [`energy_momentum`]; the two are
/// cross-checked in tests.
pub fn energy_momentum_contractions(
    g: Vec2,
    dg: Vec2,
    theta: f64,
    model: &EnergyModel,
) -> Result<(Vec2, Vec2), EnergyError> {
    let d = crate::curve::jacobian(g, dg);
    if d <= 0.0 {
        return Err(EnergyError::NonpositiveJacobian { det: d });
    }
    let fd = model.f(d);
    let er = Vec2::e_r(theta);
    let et = Vec2::e_theta(theta);
    let gg = g.dot(dg);
    let me_r = er * (0.5 * g.norm2() + fd - 0.5 * dg.norm2()) + et * gg;
    let me_t = er * gg + et * (0.5 * dg.norm2() + fd - 0.5 * g.norm2());
    Ok((me_r, me_t))
}

/// Quadrature split of `I(g)`.
#[derive(Clone, Copy, Debug)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub quadratic_part: f64,
    pub singular_part: f64,
}

/// Parameters of the circle rule: composite trapezoid, with the two panels
/// adjacent to a pinned node replaced by a geometrically graded sub-rule.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    /// Points of the graded sub-rule on each pin panel.
    pub graded_points: usize,
    /// Geometric ratio of successive sub-points toward the pin.
    pub grading_ratio: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            graded_points: 16,
            grading_ratio: 0.5,
        }
    }
}

/// Scalar state of the curve at a quadrature point: everything the circle
/// integrands consume.
#[derive(Clone, Copy, Debug)]
pub struct NodeState {
    pub theta: f64,
    /// `|g|^2`
    pub g2: f64,
    /// `|g'|^2`
    pub dg2: f64,
    /// `d = Jg . g'`
    pub d: f64,
    /// `g . g'`
    pub g_dot_dg: f64,
}

/// Robustness clamps on the fitted panel exponents. The power-law model on a
/// pin panel extrapolates from the two nearest nodes; wild fitted exponents
/// from a rough iterate would otherwise blow up the extrapolation.
const P_G2: (f64, f64) = (0.1, 4.0);
const P_DG2: (f64, f64) = (-0.9, 4.0);
const P_D: (f64, f64) = (0.1, 4.0);

#[derive(Clone, Copy)]
struct PanelModel {
    v1: f64,
    p: f64,
    clamped: bool,
}

impl PanelModel {
    /// Fit `q(xi) = v1 (xi/h)^p` through the node values `v1` at `xi = h` and
    /// `v2` at `xi = 2h`.
    fn fit(v1: f64, v2: f64, range: (f64, f64)) -> PanelModel {
        if v1 > 0.0 && v2 > 0.0 {
            let p = (v2 / v1).log2();
            if p < range.0 {
                PanelModel { v1, p: range.0, clamped: true }
            } else if p > range.1 {
                PanelModel { v1, p: range.1, clamped: true }
            } else {
                PanelModel { v1, p, clamped: false }
            }
        } else {
            // Degenerate data; fall back to a linear decay to zero.
            PanelModel { v1, p: 1.0, clamped: true }
        }
    }

    /// Value at `xi = h * ratio^j`.
    #[inline]
    fn at(&self, j: usize, ratio: f64) -> f64 {
        self.v1 * ratio.powf(self.p * j as f64)
    }

    /// `(d q / d v1, d q / d v2)` at sub-point `j`, for the energy adjoint.
    #[inline]
    fn grad(&self, j: usize, ratio: f64, v1: f64, v2: f64) -> (f64, f64) {
        let q = self.at(j, ratio);
        if self.clamped {
            (q / v1, 0.0)
        } else {
            // Only ratio = 1/2 keeps q = v1^{1+j} v2^{-j}; general ratio goes
            // through p = log2(v2/v1).
            let jf = j as f64;
            let lr = ratio.ln() / core::f64::consts::LN_2;
            (q * (1.0 - jf * lr) / v1, q * jf * lr / v2)
        }
    }
}

fn node_state(theta: f64, g: Vec2, dg: Vec2) -> NodeState {
    NodeState {
        theta,
        g2: g.norm2(),
        dg2: dg.norm2(),
        d: crate::curve::jacobian(g, dg),
        g_dot_dg: g.dot(dg),
    }
}

fn wrap_tau(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    t
}

/// Walk every quadrature point of the circle rule, calling
/// `visit(weight, state)`. Composite trapezoid away from the pin; on the two
/// pin panels, a graded sub-rule on power-law-modelled states fitted from the
/// two nearest nodes on each side. The innermost stub is closed with a
/// rectangle.
pub fn for_each_quad_point(
    samples: &[Vec2],
    dg: &[Vec2],
    spacing: f64,
    pinned: Option<usize>,
    cfg: &QuadratureConfig,
    mut visit: impl FnMut(f64, &NodeState),
) {
    let n = samples.len();
    let h = spacing;
    for i in 0..n {
        let weight = match pinned {
            Some(p) if i == p => 0.0,
            Some(p) if i == (p + 1) % n || i == (p + n - 1) % n => 0.5 * h,
            _ => h,
        };
        if weight > 0.0 {
            let st = node_state(h * i as f64, samples[i], dg[i]);
            visit(weight, &st);
        }
    }
    let Some(p) = pinned else { return };
    let theta_pin = h * p as f64;
    for dir in [1.0f64, -1.0] {
        let i1 = if dir > 0.0 { (p + 1) % n } else { (p + n - 1) % n };
        let i2 = if dir > 0.0 { (p + 2) % n } else { (p + n - 2) % n };
        let mg = PanelModel::fit(samples[i1].norm2(), samples[i2].norm2(), P_G2);
        let mdg = PanelModel::fit(dg[i1].norm2(), dg[i2].norm2(), P_DG2);
        let d1 = crate::curve::jacobian(samples[i1], dg[i1]);
        let d2 = crate::curve::jacobian(samples[i2], dg[i2]);
        let md = PanelModel::fit(d1, d2, P_D);
        let np = cfg.graded_points;
        let ratio = cfg.grading_ratio;
        let mut xi = Vec::with_capacity(np);
        let mut x = h;
        for _ in 0..np {
            xi.push(x);
            x *= ratio;
        }
        for j in 0..np {
            let w = if j == 0 {
                0.5 * (xi[0] - xi[1])
            } else if j + 1 < np {
                0.5 * (xi[j - 1] - xi[j + 1])
            } else {
                // Last trapezoid half plus the rectangle stub down to 0.
                0.5 * (xi[j - 1] - xi[j]) + xi[j]
            };
            let g2 = mg.at(j, ratio);
            let st = NodeState {
                theta: wrap_tau(theta_pin + dir * xi[j]),
                g2,
                dg2: mdg.at(j, ratio),
                d: md.at(j, ratio),
                g_dot_dg: dir * 0.5 * mg.p * g2 / xi[j],
            };
            visit(w, &st);
        }
    }
}

/// Integrate a scalar integrand over the circle with the rule of
/// [`for_each_quad_point`].
pub fn integrate_scalar(
    curve: &DerivedCurve,
    cfg: &QuadratureConfig,
    mut integrand: impl FnMut(&NodeState) -> f64,
) -> f64 {
    let mut total = 0.0;
    for_each_quad_point(
        &curve.curve.samples,
        &curve.dg,
        curve.grid().spacing(),
        curve.curve.pinned_index,
        cfg,
        |w, st| total += w * integrand(st),
    );
    total
}

/// Trapezoidal quadrature of `I(g)` with the graded pin sub-rule, split into
/// quadratic and singular parts. Infinite singular part (hence total) iff
/// `d <= 0` somewhere off the pinned node.
pub fn energy_i(curve: &DerivedCurve, model: &EnergyModel, cfg: &QuadratureConfig) -> EnergyBreakdown {
    discrete_energy(
        &curve.curve.samples,
        &curve.dg,
        curve.grid().spacing(),
        curve.curve.pinned_index,
        model,
        cfg,
    )
}

/// [`energy_i`] on raw sample/derivative arrays; the minimizer's objective.
pub fn discrete_energy(
    samples: &[Vec2],
    dg: &[Vec2],
    spacing: f64,
    pinned: Option<usize>,
    model: &EnergyModel,
    cfg: &QuadratureConfig,
) -> EnergyBreakdown {
    let mut quad = 0.0;
    let mut sing = 0.0;
    for_each_quad_point(samples, dg, spacing, pinned, cfg, |w, st| {
        quad += w * 0.5 * (st.g2 + st.dg2);
        sing += w * model.h(st.d);
    });
    EnergyBreakdown {
        total: quad + sing,
        quadratic_part: quad,
        singular_part: sing,
    }
}

/// Energy and its exact gradient with respect to the samples.
///
/// The gradient is the adjoint of the full discrete composition (stencil,
/// trapezoid weights, graded pin panels, power-law panel models), so it
/// matches finite differences of [`discrete_energy`] to rounding. The entry
/// at the pinned node is zeroed.
pub fn discrete_energy_gradient(
    samples: &[Vec2],
    dg: &[Vec2],
    spacing: f64,
    pinned: Option<usize>,
    model: &EnergyModel,
    cfg: &QuadratureConfig,
) -> (EnergyBreakdown, Vec<Vec2>) {
    let n = samples.len();
    let h = spacing;
    let mut quad = 0.0;
    let mut sing = 0.0;
    let mut grad = vec![Vec2::ZERO; n];
    let mut dg_adj = vec![Vec2::ZERO; n];

    let mut feasible = true;
    for i in 0..n {
        let weight = match pinned {
            Some(p) if i == p => 0.0,
            Some(p) if i == (p + 1) % n || i == (p + n - 1) % n => 0.5 * h,
            _ => h,
        };
        if weight == 0.0 {
            continue;
        }
        let g = samples[i];
        let d = crate::curve::jacobian(g, dg[i]);
        quad += weight * 0.5 * (g.norm2() + dg[i].norm2());
        sing += weight * model.h(d);
        if d <= 0.0 {
            feasible = false;
            continue;
        }
        let hp = model.dh(d);
        grad[i] += (g - dg[i].perp() * hp) * weight;
        dg_adj[i] += (dg[i] + g.perp() * hp) * weight;
    }

    if let Some(p) = pinned {
        let theta_unused = 0.0;
        let _ = theta_unused;
        for dir in [1usize, 2] {
            // dir 1: panel [theta_p, theta_p + h]; dir 2: [theta_p - h, theta_p].
            let (i1, i2) = if dir == 1 {
                ((p + 1) % n, (p + 2) % n)
            } else {
                ((p + n - 1) % n, (p + n - 2) % n)
            };
            let v1g = samples[i1].norm2();
            let v2g = samples[i2].norm2();
            let v1dg = dg[i1].norm2();
            let v2dg = dg[i2].norm2();
            let v1d = crate::curve::jacobian(samples[i1], dg[i1]);
            let v2d = crate::curve::jacobian(samples[i2], dg[i2]);
            let mg = PanelModel::fit(v1g, v2g, P_G2);
            let mdg = PanelModel::fit(v1dg, v2dg, P_DG2);
            let md = PanelModel::fit(v1d, v2d, P_D);
            if v1d <= 0.0 || v2d <= 0.0 {
                feasible = false;
            }

            let np = cfg.graded_points;
            let ratio = cfg.grading_ratio;
            let mut xi = Vec::with_capacity(np);
            let mut x = h;
            for _ in 0..np {
                xi.push(x);
                x *= ratio;
            }
            // Adjoints with respect to the six node quantities.
            let (mut a1g, mut a2g, mut a1dg, mut a2dg, mut a1d, mut a2d) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for j in 0..np {
                let w = if j == 0 {
                    0.5 * (xi[0] - xi[1])
                } else if j + 1 < np {
                    0.5 * (xi[j - 1] - xi[j + 1])
                } else {
                    0.5 * (xi[j - 1] - xi[j]) + xi[j]
                };
                let qg = mg.at(j, ratio);
                let qdg = mdg.at(j, ratio);
                let qd = md.at(j, ratio);
                quad += w * 0.5 * (qg + qdg);
                sing += w * model.h(qd);
                if qd <= 0.0 || !feasible {
                    continue;
                }
                let hp = model.dh(qd);
                let (dg1, dg2_) = mg.grad(j, ratio, v1g, v2g);
                a1g += w * 0.5 * dg1;
                a2g += w * 0.5 * dg2_;
                let (dd1, dd2) = mdg.grad(j, ratio, v1dg, v2dg);
                a1dg += w * 0.5 * dd1;
                a2dg += w * 0.5 * dd2;
                let (dj1, dj2) = md.grad(j, ratio, v1d, v2d);
                a1d += w * hp * dj1;
                a2d += w * hp * dj2;
            }
            // Distribute through v_g = |g|^2, v_dg = |g'|^2, v_d = Jg . g'.
            grad[i1] += samples[i1] * (2.0 * a1g);
            grad[i2] += samples[i2] * (2.0 * a2g);
            dg_adj[i1] += dg[i1] * (2.0 * a1dg);
            dg_adj[i2] += dg[i2] * (2.0 * a2dg);
            grad[i1] += -dg[i1].perp() * a1d;
            grad[i2] += -dg[i2].perp() * a2d;
            dg_adj[i1] += samples[i1].perp() * a1d;
            dg_adj[i2] += samples[i2].perp() * a2d;
        }
    }

    // Transpose of the periodic 4th-order stencil.
    let c1 = 8.0 / (12.0 * h);
    let c2 = 1.0 / (12.0 * h);
    for i in 0..n {
        let a = dg_adj[i];
        if a == Vec2::ZERO {
            continue;
        }
        grad[(i + 1) % n] += a * c1;
        grad[(i + n - 1) % n] += a * (-c1);
        grad[(i + 2) % n] += a * (-c2);
        grad[(i + n - 2) % n] += a * c2;
    }
    if let Some(p) = pinned {
        grad[p] = Vec2::ZERO;
    }
    (
        EnergyBreakdown {
            total: quad + sing,
            quadratic_part: quad,
            singular_part: sing,
        },
        grad,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{differentiate, AngularGrid, Curve};

    fn model(s: f64) -> EnergyModel {
        EnergyModel::new(s).unwrap()
    }

    #[test]
    fn h_family_values() {
        let m = model(0.5);
        let hf = m.h_family(4.0);
        assert!((hf.h - 0.5).abs() < 1e-15);
        assert!((hf.dh + 0.0625).abs() < 1e-15);
        assert!((hf.f + 0.75).abs() < 1e-15);
        let m1 = model(1.7);
        let hf1 = m1.h_family(1.0);
        assert!((hf1.h - 1.0).abs() < 1e-15);
        assert!((hf1.f + 2.7).abs() < 1e-15);
        let inf = m.h_family(-1.0);
        assert!(!inf.feasible);
        assert!(inf.h.is_infinite() && inf.h > 0.0);
    }

    #[test]
    fn stored_energy_examples() {
        let m = model(1.0);
        assert!((stored_energy(Mat2::identity(), &m) - 2.0).abs() < 1e-15);
        assert!((stored_energy(Mat2::identity() * 2.0, &m) - 4.25).abs() < 1e-15);
        let flipped = Mat2 {
            m: [[1.0, 0.0], [0.0, -1.0]],
        };
        assert!(stored_energy(flipped, &m).is_infinite());
    }

    #[test]
    fn dw_vanishes_at_identity_map() {
        let m = model(1.0);
        let theta = 0.9;
        let d = dw(Vec2::e_r(theta), Vec2::e_theta(theta), theta, &m).unwrap();
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn dw_scaled_identity() {
        // g = 2 e_R, g' = 2 e_theta: F = 2 Id, det = 4, h'(4) = -1/16,
        // cof F = 2 Id, so DW = 2 Id - (1/16) 2 Id = (15/8) Id.
        let m = model(1.0);
        let theta = 0.3;
        let d = dw(Vec2::e_r(theta) * 2.0, Vec2::e_theta(theta) * 2.0, theta, &m).unwrap();
        assert!((d - Mat2::identity() * (15.0 / 8.0)).max_abs() < 1e-14);
    }

    #[test]
    fn dw_tensor_and_matrix_forms_agree() {
        let m = model(0.7);
        let cases = [
            (Vec2::new(0.9, 0.2), Vec2::new(-0.3, 1.1), 0.4),
            (Vec2::new(1.4, -0.6), Vec2::new(0.8, 0.9), 2.2),
            (Vec2::new(0.1, 1.0), Vec2::new(-1.2, 0.4), 5.0),
        ];
        for (g, dg, theta) in cases {
            if crate::curve::jacobian(g, dg) <= 0.0 {
                continue;
            }
            let a = dw(g, dg, theta, &m).unwrap();
            let b = dw_matrix_form(crate::curve::one_homogeneous_gradient(g, dg, theta), &m).unwrap();
            assert!((a - b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn dw_radial_contraction_identity() {
        // DW e_R = g + s d^{-(s+1)} J g'.
        let m = model(0.5);
        let g = Vec2::new(0.7, 0.4);
        let dg = Vec2::new(-0.5, 1.3);
        let theta = 1.1;
        let d = crate::curve::jacobian(g, dg);
        assert!(d > 0.0);
        let lhs = dw(g, dg, theta, &m).unwrap().mul_vec(Vec2::e_r(theta));
        let rhs = g + dg.perp() * (m.s() * d.powf(-(m.s() + 1.0)));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dw_rejects_nonpositive_jacobian() {
        let m = model(1.0);
        let err = dw(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), 0.0, &m).unwrap_err();
        assert!(matches!(err, EnergyError::NonpositiveJacobian { .. }));
    }

    #[test]
    fn energy_momentum_identity_map() {
        let m = model(1.0);
        let theta = 2.0;
        let mm = energy_momentum(Vec2::e_r(theta), Vec2::e_theta(theta), theta, &m).unwrap();
        assert!((mm - Mat2::identity() * -2.0).max_abs() < 1e-14);
        let (me_r, _) = energy_momentum_contractions(Vec2::e_r(theta), Vec2::e_theta(theta), theta, &m).unwrap();
        assert!((me_r - Vec2::e_r(theta) * -2.0).norm() < 1e-14);
    }

    #[test]
    fn energy_momentum_matrix_matches_contractions() {
        let m = model(1.3);
        let cases = [
            (Vec2::new(0.9, 0.2), Vec2::new(-0.3, 1.1), 0.4),
            (Vec2::new(1.4, -0.6), Vec2::new(0.8, 0.9), 2.2),
            (Vec2::new(0.2, 0.9), Vec2::new(-1.0, 0.3), 4.8),
        ];
        for (g, dg, theta) in cases {
            if crate::curve::jacobian(g, dg) <= 0.0 {
                continue;
            }
            let mm = energy_momentum(g, dg, theta, &m).unwrap();
            let (me_r, me_t) = energy_momentum_contractions(g, dg, theta, &m).unwrap();
            assert!((mm.mul_vec(Vec2::e_r(theta)) - me_r).norm() < 1e-12);
            assert!((mm.mul_vec(Vec2::e_theta(theta)) - me_t).norm() < 1e-12);
        }
    }

    #[test]
    fn energy_of_unit_circle_is_4pi() {
        let m = model(1.0);
        let grid = AngularGrid::new(256).unwrap();
        let dc = differentiate(Curve::from_fn(grid, Vec2::e_r));
        let e = energy_i(&dc, &m, &QuadratureConfig::default());
        assert!((e.total - 4.0 * core::f64::consts::PI).abs() < 1e-12);
        assert_eq!(e.total, e.quadratic_part + e.singular_part);
    }

    #[test]
    fn energy_of_scaled_circle() {
        // g = a e_R: I = 2 pi (a^2 + a^{-2}) at s = 1.
        let m = model(1.0);
        let a = 1.7;
        let grid = AngularGrid::new(1024).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(t) * a));
        let e = energy_i(&dc, &m, &QuadratureConfig::default());
        let expect = TAU * (a * a + 1.0 / (a * a));
        assert!((e.total - expect).abs() < 1e-8, "got {} want {}", e.total, expect);
    }

    #[test]
    fn energy_infinite_when_jacobian_flips() {
        let m = model(1.0);
        let grid = AngularGrid::new(64).unwrap();
        // Clockwise circle: d = -1 everywhere.
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(-t)));
        let e = energy_i(&dc, &m, &QuadratureConfig::default());
        assert!(e.total.is_infinite());
        assert!(e.quadratic_part.is_finite());
    }

    #[test]
    fn energy_blows_up_as_det_shrinks() {
        // W(F) -> inf along det -> 0+ at fixed |F|.
        let m = model(0.8);
        let mut last = 0.0;
        for k in 1..=6 {
            let d = 10f64.powi(-k);
            // diag(a, d/a) with a chosen to keep |F|^2 = 2.
            let a = (1.0 + (1.0 - d * d).sqrt()).sqrt();
            let f = Mat2 {
                m: [[a, 0.0], [0.0, d / a]],
            };
            assert!((f.norm2() - 2.0).abs() < 1e-12);
            let w = stored_energy(f, &m);
            assert!(w > last);
            last = w;
        }
        assert!(last > 1e4);
    }

    #[test]
    fn energy_invariant_under_grid_rotation() {
        let m = model(0.9);
        let grid = AngularGrid::new(128).unwrap();
        let f = |t: f64| Vec2::e_r(t) * (1.5 + 0.3 * t.sin() * t.sin());
        let dc = differentiate(Curve::from_fn(grid, f));
        let e0 = energy_i(&dc, &m, &QuadratureConfig::default());
        // Rotate the parameter by 17 grid steps.
        let shift = 17usize;
        let rotated: alloc::vec::Vec<Vec2> = (0..128).map(|i| dc.curve.samples[(i + shift) % 128]).collect();
        let dc2 = differentiate(Curve::new(grid, rotated, None).unwrap());
        let e1 = energy_i(&dc2, &m, &QuadratureConfig::default());
        assert!((e0.total - e1.total).abs() < 1e-13);
    }
}
