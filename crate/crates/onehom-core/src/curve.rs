//! Periodic angular grids, discrete curves `g: S^1 -> R^2`, differentiation,
//! one-homogeneous gradients, Jacobians, and polar decomposition.

use crate::math::{FloatExt, TAU};
use crate::vec2::{Mat2, Vec2};
use alloc::vec::Vec;
use core::fmt;

/// Default radius below which the polar chart is treated as invalid.
pub const R_MIN_DEFAULT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum CurveError {
    /// Grid too small for the differentiation stencil.
    GridTooSmall { n_nodes: usize },
    /// Sample vector length does not match the grid.
    LengthMismatch { expected: usize, got: usize },
    /// A sample is NaN or infinite.
    NonFiniteSample { index: usize },
    /// The pinned node is not exactly the origin.
    PinNotZero { index: usize },
    /// `|g|` dropped to (or below) `r_min` inside a polar chart.
    ZeroRadius { index: usize, theta: f64, radius: f64 },
    /// Adjacent unwrapped angles jump by more than pi/2: the winding rate is
    /// unresolved at this spacing.
    GridTooCoarse { index: usize, jump: f64 },
    /// Requested interval contains too few nodes.
    IntervalTooSmall { nodes: usize },
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::GridTooSmall { n_nodes } => {
                write!(f, "angular grid needs at least 16 nodes, got {n_nodes}")
            }
            CurveError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} samples, got {got}")
            }
            CurveError::NonFiniteSample { index } => {
                write!(f, "sample {index} is not finite")
            }
            CurveError::PinNotZero { index } => {
                write!(f, "pinned node {index} must be exactly (0,0)")
            }
            CurveError::ZeroRadius { index, theta, radius } => {
                write!(f, "|g| = {radius:e} at node {index} (theta = {theta}): polar chart invalid")
            }
            CurveError::GridTooCoarse { index, jump } => {
                write!(f, "angle jump {jump} > pi/2 at node {index}: grid too coarse to resolve winding")
            }
            CurveError::IntervalTooSmall { nodes } => {
                write!(f, "interval holds only {nodes} nodes")
            }
        }
    }
}

impl core::error::Error for CurveError {}

/// Uniform grid of `n` angles `theta_i = 2 pi i / n` on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularGrid {
    n_nodes: usize,
    spacing: f64,
}

impl AngularGrid {
    pub fn new(n_nodes: usize) -> Result<Self, CurveError> {
        if n_nodes < 16 {
            return Err(CurveError::GridTooSmall { n_nodes });
        }
        Ok(AngularGrid {
            n_nodes,
            spacing: TAU / n_nodes as f64,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.spacing * i as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes).map(move |i| self.node(i))
    }

    /// Sample an angular function at every node.
    pub fn sample(&self, mut f: impl FnMut(f64) -> Vec2) -> Vec<Vec2> {
        self.nodes().map(|t| f(t)).collect()
    }
}

/// Discrete closed curve: one `R^2` sample per grid node, optionally pinned
/// to the origin at one node.
#[derive(Clone, Debug)]
pub struct Curve {
    pub grid: AngularGrid,
    pub samples: Vec<Vec2>,
    pub pinned_index: Option<usize>,
}

impl Curve {
    pub fn new(grid: AngularGrid, samples: Vec<Vec2>, pinned_index: Option<usize>) -> Result<Self, CurveError> {
        if samples.len() != grid.len() {
            return Err(CurveError::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(CurveError::NonFiniteSample { index: i });
            }
        }
        if let Some(p) = pinned_index {
            if p >= samples.len() || samples[p] != Vec2::ZERO {
                return Err(CurveError::PinNotZero { index: p });
            }
        }
        Ok(Curve {
            grid,
            samples,
            pinned_index,
        })
    }

    /// Build from an angular function, no pin.
    pub fn from_fn(grid: AngularGrid, f: impl FnMut(f64) -> Vec2) -> Self {
        let samples = grid.sample(f);
        Curve {
            grid,
            samples,
            pinned_index: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Curve together with its discrete derivative `g'` and Jacobian
/// `d = Jg . g'` at every node.
#[derive(Clone, Debug)]
pub struct DerivedCurve {
    pub curve: Curve,
    pub dg: Vec<Vec2>,
    pub jac: Vec<f64>,
}

impl DerivedCurve {
    #[inline]
    pub fn grid(&self) -> &AngularGrid {
        &self.curve.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }
}

/// 4th-order periodic central differences:
/// `g'_i = (8(g_{i+1} - g_{i-1}) - (g_{i+2} - g_{i-2})) / (12 h)`.
pub fn periodic_derivative(samples: &[Vec2], spacing: f64) -> Vec<Vec2> {
    let n = samples.len();
    let mut dg = Vec::with_capacity(n);
    for i in 0..n {
        let p1 = samples[(i + 1) % n];
        let m1 = samples[(i + n - 1) % n];
        let p2 = samples[(i + 2) % n];
        let m2 = samples[(i + n - 2) % n];
        dg.push(((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * spacing)));
    }
    dg
}

/// Scalar version of [`periodic_derivative`].
pub fn periodic_scalar_derivative(values: &[f64], spacing: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let p1 = values[(i + 1) % n];
            let m1 = values[(i + n - 1) % n];
            let p2 = values[(i + 2) % n];
            let m2 = values[(i + n - 2) % n];
            (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * spacing)
        })
        .collect()
}

/// 4th-order periodic second derivative:
/// `g''_i = (-f_{i+2} + 16 f_{i+1} - 30 f_i + 16 f_{i-1} - f_{i-2}) / (12 h^2)`.
pub fn periodic_scalar_second_derivative(values: &[f64], spacing: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let p1 = values[(i + 1) % n];
            let m1 = values[(i + n - 1) % n];
            let p2 = values[(i + 2) % n];
            let m2 = values[(i + n - 2) % n];
            (-p2 + 16.0 * p1 - 30.0 * values[i] + 16.0 * m1 - m2) / (12.0 * spacing * spacing)
        })
        .collect()
}

/// Differentiate a curve with the periodic 4th-order stencil and fill in the
/// per-node Jacobians.
pub fn differentiate(curve: Curve) -> DerivedCurve {
    let dg = periodic_derivative(&curve.samples, curve.grid.spacing());
    let jac = curve
        .samples
        .iter()
        .zip(&dg)
        .map(|(&g, &d)| jacobian(g, d))
        .collect();
    DerivedCurve { curve, dg, jac }
}

/// Gradient of the one-homogeneous extension:
/// `grad u^g = g (x) e_R(theta) + g' (x) e_theta(theta)`.
pub fn one_homogeneous_gradient(g: Vec2, dg: Vec2, theta: f64) -> Mat2 {
    g.outer(Vec2::e_r(theta)) + dg.outer(Vec2::e_theta(theta))
}

/// `det grad u^g = Jg . g'`, independent of theta.
#[inline]
pub fn jacobian(g: Vec2, dg: Vec2) -> f64 {
    g.perp().dot(dg)
}

/// Polar representation `g = r e_R(gamma)` of a curve on an interval where
/// `|g| > 0`, with the unwrapped continuous angle branch and its discrete
/// derivative `j = gamma'`.
#[derive(Clone, Debug)]
pub struct PolarProfile {
    /// Closed interval of grid angles covered by the profile.
    pub interval: (f64, f64),
    /// Index of the first grid node in the profile.
    pub first_index: usize,
    /// Grid angles of the profile nodes.
    pub thetas: Vec<f64>,
    pub r: Vec<f64>,
    pub gamma: Vec<f64>,
    pub j: Vec<f64>,
}

impl PolarProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Reconstruct the curve samples `r e_R(gamma)`.
    pub fn reconstruct(&self) -> Vec<Vec2> {
        self.r
            .iter()
            .zip(&self.gamma)
            .map(|(&r, &gm)| Vec2::e_r(gm) * r)
            .collect()
    }
}

/// Polar decomposition with the default radius floor [`R_MIN_DEFAULT`].
pub fn polar_decompose(curve: &DerivedCurve, interval: (f64, f64)) -> Result<PolarProfile, CurveError> {
    polar_decompose_with(curve, interval, R_MIN_DEFAULT)
}

/// Polar decomposition of the curve restricted to grid nodes with
/// `interval.0 <= theta_i <= interval.1`.
///
/// Errors with `ZeroRadius` if `|g| <= r_min` anywhere on the interval, and
/// with `GridTooCoarse` if adjacent unwrapped angles jump by more than pi/2.
pub fn polar_decompose_with(
    curve: &DerivedCurve,
    interval: (f64, f64),
    r_min: f64,
) -> Result<PolarProfile, CurveError> {
    let grid = curve.grid();
    let mut first_index = None;
    let mut thetas = Vec::new();
    let mut r = Vec::new();
    let mut gamma = Vec::new();
    for i in 0..grid.len() {
        let theta = grid.node(i);
        if theta < interval.0 || theta > interval.1 {
            continue;
        }
        let g = curve.curve.samples[i];
        let radius = g.norm();
        if radius <= r_min {
            return Err(CurveError::ZeroRadius {
                index: i,
                theta,
                radius,
            });
        }
        if first_index.is_none() {
            first_index = Some(i);
        }
        thetas.push(theta);
        r.push(radius);
        let raw = g.angle();
        if let Some(&prev) = gamma.last() {
            // Branch correction: force the step into (-pi, pi].
            let mut step = raw - wrap_angle(prev);
            while step > core::f64::consts::PI {
                step -= TAU;
            }
            while step <= -core::f64::consts::PI {
                step += TAU;
            }
            if step.abs() > core::f64::consts::PI / 2.0 {
                return Err(CurveError::GridTooCoarse {
                    index: i,
                    jump: step,
                });
            }
            gamma.push(prev + step);
        } else {
            gamma.push(raw);
        }
    }
    let len = r.len();
    if len < 5 {
        return Err(CurveError::IntervalTooSmall { nodes: len });
    }
    let j = window_derivative(&gamma, grid.spacing());
    Ok(PolarProfile {
        interval,
        first_index: first_index.unwrap(),
        thetas,
        r,
        gamma,
        j,
    })
}

/// Wrap an angle into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let mut w = a - TAU * (a / TAU).round();
    if w <= -core::f64::consts::PI {
        w += TAU;
    }
    w
}

/// Derivative on a non-periodic uniform window: 4th-order central inside,
/// 2nd-order central then one-sided at the edges.
pub fn window_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = if i >= 2 && i + 2 < n {
            (8.0 * (values[i + 1] - values[i - 1]) - (values[i + 2] - values[i - 2])) / (12.0 * h)
        } else if i >= 1 && i + 1 < n {
            (values[i + 1] - values[i - 1]) / (2.0 * h)
        } else if i == 0 {
            (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
        } else {
            (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
        };
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::FloatExt;
    use alloc::vec;

    fn unit_circle(n: usize) -> DerivedCurve {
        let grid = AngularGrid::new(n).unwrap();
        differentiate(Curve::from_fn(grid, Vec2::e_r))
    }

    #[test]
    fn grid_rejects_fewer_than_16_nodes() {
        assert!(AngularGrid::new(15).is_err());
        assert!(AngularGrid::new(16).is_ok());
    }

    #[test]
    fn derivative_of_circle_is_tangent() {
        let dc = unit_circle(256);
        for (i, dg) in dc.dg.iter().enumerate() {
            let expect = Vec2::e_theta(dc.grid().node(i));
            assert!((*dg - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn derivative_of_constant_curve_vanishes() {
        let grid = AngularGrid::new(64).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |_| Vec2::new(1.0, 0.0)));
        for (dg, d) in dc.dg.iter().zip(&dc.jac) {
            assert_eq!(*dg, Vec2::ZERO);
            assert_eq!(*d, 0.0);
        }
    }

    #[test]
    fn derivative_of_triple_winding_matches_stencil_error() {
        // The stencil applied to e^{ik theta} has relative error (kh)^4/30,
        // so max|dg - 3 e_theta(3 theta)| = 3 (3h)^4 / 30: 2.94e-6 at n = 256.
        let grid = AngularGrid::new(256).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(3.0 * t)));
        let mut worst: f64 = 0.0;
        for (i, dg) in dc.dg.iter().enumerate() {
            let expect = Vec2::e_theta(3.0 * dc.grid().node(i)) * 3.0;
            worst = worst.max((*dg - expect).norm());
        }
        let predicted = 3.0 * (3.0 * grid.spacing()).powi(4) / 30.0;
        assert!(worst <= 1.1 * predicted, "worst = {worst:e}, predicted {predicted:e}");
        // At n = 384 the same error drops under 1e-6.
        let grid2 = AngularGrid::new(384).unwrap();
        let dc2 = differentiate(Curve::from_fn(grid2, |t| Vec2::e_r(3.0 * t)));
        let mut worst2: f64 = 0.0;
        for (i, dg) in dc2.dg.iter().enumerate() {
            let expect = Vec2::e_theta(3.0 * dc2.grid().node(i)) * 3.0;
            worst2 = worst2.max((*dg - expect).norm());
        }
        assert!(worst2 <= 1e-6, "worst = {worst2:e}");
    }

    #[test]
    fn gradient_of_identity_is_identity() {
        for &theta in &[0.0, 0.7, 2.9, 5.5] {
            let f = one_homogeneous_gradient(Vec2::e_r(theta), Vec2::e_theta(theta), theta);
            assert!((f - Mat2::identity()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_of_linear_map_recovers_matrix() {
        let t = Mat2 {
            m: [[1.2, -0.4], [0.3, 2.1]],
        };
        for &theta in &[0.3, 1.9, 4.4] {
            let g = t.mul_vec(Vec2::e_r(theta));
            let dg = t.mul_vec(Vec2::e_theta(theta));
            let f = one_homogeneous_gradient(g, dg, theta);
            assert!((f - t).max_abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_gradient() {
        let f = one_homogeneous_gradient(Vec2::new(1.0, 0.0), Vec2::ZERO, 0.0);
        assert_eq!(f.m, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(f.det(), 0.0);
    }

    #[test]
    fn jacobian_matches_handedness_examples() {
        let theta = 0.8;
        assert!((jacobian(Vec2::e_r(theta), Vec2::e_theta(theta)) - 1.0).abs() < 1e-15);
        assert!((jacobian(Vec2::e_r(theta) * 2.0, Vec2::e_theta(theta) * 2.0) - 4.0).abs() < 1e-15);
        // Clockwise traversal flips the sign.
        assert!((jacobian(Vec2::e_r(-theta), -Vec2::e_theta(-theta)) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_equals_det_of_gradient() {
        let g = Vec2::new(0.4, -1.1);
        let dg = Vec2::new(2.0, 0.5);
        for &theta in &[0.0, 1.0, 2.5, 4.0, 6.0] {
            let f = one_homogeneous_gradient(g, dg, theta);
            assert!((f.det() - jacobian(g, dg)).abs() < 1e-14);
        }
    }

    #[test]
    fn polar_decompose_unit_circle() {
        let dc = unit_circle(256);
        let p = polar_decompose(&dc, (0.1, 2.0)).unwrap();
        for (k, &r) in p.r.iter().enumerate() {
            assert!((r - 1.0).abs() < 1e-15);
            assert!((p.gamma[k] - p.thetas[k]).abs() < 1e-12);
        }
        for &j in &p.j {
            assert!((j - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_decompose_double_winding() {
        let grid = AngularGrid::new(256).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(2.0 * t)));
        let p = polar_decompose(&dc, (0.1, 2.0)).unwrap();
        for &j in &p.j {
            assert!((j - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn polar_decompose_flags_zero_radius() {
        let grid = AngularGrid::new(64).unwrap();
        let mut samples: Vec<Vec2> = grid.sample(Vec2::e_r);
        samples[10] = Vec2::ZERO;
        let dc = differentiate(Curve::new(grid, samples, None).unwrap());
        let err = polar_decompose(&dc, (0.0, 2.0)).unwrap_err();
        assert!(matches!(err, CurveError::ZeroRadius { index: 10, .. }));
    }

    #[test]
    fn polar_decompose_flags_coarse_winding() {
        // 33 windings on 64 nodes: adjacent angle step > pi/2.
        let grid = AngularGrid::new(64).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(33.0 * t)));
        let err = polar_decompose(&dc, (0.0, 6.0)).unwrap_err();
        assert!(matches!(err, CurveError::GridTooCoarse { .. }));
    }

    #[test]
    fn reconstruction_round_trips() {
        let grid = AngularGrid::new(128).unwrap();
        let dc = differentiate(Curve::from_fn(grid, |t| Vec2::e_r(2.0 * t + 0.3) * (1.5 + 0.2 * t.sin())));
        let p = polar_decompose(&dc, (0.05, 6.0)).unwrap();
        let rec = p.reconstruct();
        for (k, v) in rec.iter().enumerate() {
            let orig = dc.curve.samples[p.first_index + k];
            assert!((*v - orig).norm() < 1e-12);
        }
    }

    #[test]
    fn pinned_curve_requires_exact_zero() {
        let grid = AngularGrid::new(32).unwrap();
        let samples = grid.sample(Vec2::e_r);
        assert!(matches!(
            Curve::new(grid, samples, Some(0)),
            Err(CurveError::PinNotZero { index: 0 })
        ));
    }

    #[test]
    fn fourth_order_convergence_of_stencil() {
        let mut errs = vec![];
        for &n in &[64usize, 128, 256] {
            let grid = AngularGrid::new(n).unwrap();
            let dc = differentiate(Curve::from_fn(grid, |t| {
                Vec2::new((2.0 * t).cos() + 0.3 * (3.0 * t).sin(), (t).sin())
            }));
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let t = dc.grid().node(i);
                let exact = Vec2::new(-2.0 * (2.0 * t).sin() + 0.9 * (3.0 * t).cos(), t.cos());
                worst = worst.max((dc.dg[i] - exact).norm());
            }
            errs.push(worst);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 > 3.8 && order2 > 3.8, "orders {order1} {order2}");
    }
}
