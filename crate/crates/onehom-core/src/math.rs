//! Float math shims for `no_std` plus the small numeric helpers shared across
//! modules: smooth bump profiles, Gauss-Legendre rules, monotone cubic
//! interpolation, and least-squares line fits.

use alloc::vec::Vec;

/// Extension trait routing `f64` math through `libm`.
///
/// The crate is `no_std`, so the inherent `std` methods are unavailable;
/// every module uses these instead.
pub trait FloatExt: Sized {
    fn sin(self) -> f64;
    fn cos(self) -> f64;
    fn atan2(self, other: f64) -> f64;
    fn sqrt(self) -> f64;
    fn powf(self, e: f64) -> f64;
    fn powi(self, e: i32) -> f64;
    fn ln(self) -> f64;
    fn log2(self) -> f64;
    fn log10(self) -> f64;
    fn exp(self) -> f64;
    fn abs(self) -> f64;
    fn hypot(self, other: f64) -> f64;
    fn floor(self) -> f64;
    fn round(self) -> f64;
}

impl FloatExt for f64 {
    #[inline]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    #[inline]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn atan2(self, other: f64) -> f64 {
        libm::atan2(self, other)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline]
    fn powi(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn log2(self) -> f64 {
        libm::log2(self)
    }
    #[inline]
    fn log10(self) -> f64 {
        libm::log10(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        libm::fabs(self)
    }
    #[inline]
    fn hypot(self, other: f64) -> f64 {
        libm::hypot(self, other)
    }
    #[inline]
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn round(self) -> f64 {
        libm::round(self)
    }
}

pub const TAU: f64 = 2.0 * core::f64::consts::PI;

/// `exp(-1/t)` for `t > 0`, zero otherwise. Building block of the smooth
/// transition below; vanishes with all derivatives at `t = 0`.
#[inline]
fn exp_knee(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// The standard C-infinity step: 0 for `t <= 0`, 1 for `t >= 1`, and
/// `B(t) / (B(t) + B(1-t))` with `B(t) = exp(-1/t)` in between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = exp_knee(t);
        let b = exp_knee(1.0 - t);
        a / (a + b)
    }
}

/// Derivative of [`smoothstep`].
pub fn smoothstep_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let a = exp_knee(t);
        let b = exp_knee(1.0 - t);
        let da = a / (t * t);
        let db = -b / ((1.0 - t) * (1.0 - t));
        (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
    }
}

/// Mollifier-profile bump on `(lo, hi)`: `exp(-1/(1 - t^2))` in the centred
/// coordinate `t = (2x - lo - hi)/(hi - lo)`, zero outside. C-infinity with
/// compact support; peak value `exp(-1)` at the midpoint.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
}

impl Bump {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bump { lo, hi }
    }

    #[inline]
    fn centred(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.centred(x);
        if t * t >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t * t)).exp()
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let t = self.centred(x);
        if t * t >= 1.0 {
            0.0
        } else {
            let u = 1.0 - t * t;
            let dt = 2.0 / (self.hi - self.lo);
            self.eval(x) * (-2.0 * t / (u * u)) * dt
        }
    }

    /// Mass `\int bump` computed once with a fixed 256-point Gauss-Legendre
    /// rule; used to normalise bumps to unit integral.
    pub fn mass(&self) -> f64 {
        let rule = gauss_legendre(256);
        let mid = 0.5 * (self.lo + self.hi);
        let half = 0.5 * (self.hi - self.lo);
        let mut total = 0.0;
        for (x, w) in rule.iter() {
            total += w * half * self.eval(mid + half * x);
        }
        total
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial. Accurate to close to machine precision for the small
/// `n` used here.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut rule = Vec::with_capacity(n);
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((-x, w));
    }
    // Mirror to the full rule, midpoint without duplication for odd n.
    for i in (0..n - m).rev() {
        let (x, w) = rule[i];
        rule.push((-x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing
/// abscissae. Preserves monotonicity of the data, which is what embedding a
/// spiral profile onto a coarser grid needs.
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 3);
        let n = xs.len();
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            delta.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut m = Vec::with_capacity(n);
        m.push(delta[0]);
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                m.push(0.0);
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                m.push((w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]));
            }
        }
        m.push(delta[n - 2]);
        Pchip {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes: m,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Least-squares straight line `y = slope * x + intercept`. Returns
/// `(slope, intercept, rms_residual)`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - slope * x - intercept;
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn smoothstep_endpoints_and_symmetry() {
        assert_eq!(smoothstep(-0.5), 0.0);
        assert_eq!(smoothstep(1.5), 1.0);
        let s = smoothstep(0.3) + smoothstep(0.7);
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        // Exact for degree <= 15; check x^10 against 2/11.
        let got: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((got - 2.0 / 11.0).abs() < 1e-14, "got {got}");
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_32_matches_known_endpoint_node() {
        let rule = gauss_legendre(32);
        // Largest abscissa of the 32-point rule, standard tables.
        assert!((rule[31].0 - 0.997263861849481563545).abs() < 1e-14);
    }

    #[test]
    fn pchip_reproduces_monotone_power() {
        let xs: Vec<f64> = (1..40).map(|i| 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.powf(0.8)).collect();
        let p = Pchip::new(&xs, &ys);
        for &x in &[0.12, 0.5, 1.3, 1.9] {
            let err = (p.eval(x) - x.powf(0.8)).abs();
            assert!(err < 2e-4, "x={x} err={err}");
        }
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = vec![0.0, 1.0, 2.0, 3.0];
        let ys = vec![1.0, 3.0, 5.0, 7.0];
        let (slope, icept, res) = line_fit(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-14);
        assert!((icept - 1.0).abs() < 1e-14);
        assert!(res < 1e-14);
    }
}
