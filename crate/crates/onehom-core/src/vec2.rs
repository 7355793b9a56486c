//! Plane vectors and 2x2 matrices. `J` is the quarter-turn rotation
//! `[[0,-1],[1,0]]`; `v.perp()` applies it.

use crate::math::FloatExt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit radial vector `e_R(theta) = (cos theta, sin theta)`.
    #[inline]
    pub fn e_r(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    /// Unit tangential vector `e_theta(theta) = (-sin theta, cos theta)`.
    #[inline]
    pub fn e_theta(theta: f64) -> Self {
        Vec2::new(-theta.sin(), theta.cos())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// `J v`: rotation anticlockwise by a quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in `(-pi, pi]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Outer product `self (x) o` as a 2x2 matrix.
    #[inline]
    pub fn outer(self, o: Vec2) -> Mat2 {
        Mat2 {
            m: [[self.x * o.x, self.x * o.y], [self.y * o.x, self.y * o.y]],
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { m: [[0.0; 2]; 2] };

    #[inline]
    pub fn identity() -> Mat2 {
        Mat2 {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    #[inline]
    pub fn det(self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Cofactor matrix: `cof(F) = det(F) F^{-T}`, i.e. `d(det F)/dF`.
    #[inline]
    pub fn cof(self) -> Mat2 {
        Mat2 {
            m: [[self.m[1][1], -self.m[1][0]], [-self.m[0][1], self.m[0][0]]],
        }
    }

    #[inline]
    pub fn transpose(self) -> Mat2 {
        Mat2 {
            m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]],
        }
    }

    /// Squared Frobenius norm `|F|^2`.
    #[inline]
    pub fn norm2(self) -> f64 {
        self.m[0][0] * self.m[0][0]
            + self.m[0][1] * self.m[0][1]
            + self.m[1][0] * self.m[1][0]
            + self.m[1][1] * self.m[1][1]
    }

    #[inline]
    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    #[inline]
    pub fn mul_mat(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }

    pub fn max_abs(self) -> f64 {
        let mut v: f64 = 0.0;
        for row in &self.m {
            for &e in row {
                v = v.max(e.abs());
            }
        }
        v
    }

    pub fn is_finite(self) -> bool {
        self.m.iter().all(|r| r.iter().all(|e| e.is_finite()))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] * s;
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_is_quarter_turn() {
        let v = Vec2::new(3.0, -2.0);
        assert_eq!(v.perp(), Vec2::new(2.0, 3.0));
        assert_eq!(v.perp().perp(), -v);
    }

    #[test]
    fn cof_matches_det_identity() {
        let f = Mat2 {
            m: [[1.5, -0.3], [0.7, 2.0]],
        };
        // F^T cof(F)^T? Sanity: tr(F cof(F)^T)/2 = det F for 2x2.
        let c = f.cof();
        let d = 0.5 * (f.m[0][0] * c.m[0][0] + f.m[0][1] * c.m[0][1] + f.m[1][0] * c.m[1][0] + f.m[1][1] * c.m[1][1]);
        assert!((d - f.det()).abs() < 1e-15);
    }

    #[test]
    fn outer_product_entries() {
        let a = Vec2::new(2.0, 3.0);
        let b = Vec2::new(-1.0, 4.0);
        let m = a.outer(b);
        assert_eq!(m.m, [[-2.0, 8.0], [-3.0, 12.0]]);
    }
}
