//! One-dimensional quadrature rules: Gauss-Legendre nodes and double
//! exponential (tanh-sinh) integration.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Nodes and weights of the `q`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_q(x) and P_q'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = qf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    (nodes, weights)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const TS_TMAX: f64 = 4.0;
const TS_MAX_LEVEL: u32 = 12;

/// `∫_a^b f` by tanh-sinh with step halving. The error of a level is
/// roughly the square of the difference between the two previous levels,
/// so iteration stops once that squared difference is below `rel_tol`.
/// `f` is never evaluated at the end points, so integrable end point
/// singularities are allowed.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Estimate> {
    tanh_sinh_tol(f, a, b, rel_tol, 0.0)
}

/// As [`tanh_sinh`], additionally accepting once successive levels differ
/// by at most `abs_tol`.
pub fn tanh_sinh_tol<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("tanh_sinh needs a finite interval, got [{a}, {b}]")));
    }
    if b <= a {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let r = 0.5 * (b - a);
    // Contribution of node t (and -t), using the distance to each end point
    // to keep nodes distinct from a and b.
    let mut pair = |t: f64| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        let d = r / (u.exp() * ch);
        let mut s = 0.0;
        let xr = b - d;
        let xl = a + d;
        if xr < b && xr > a {
            s += f(xr);
        }
        if t != 0.0 && xl > a && xl < b {
            s += f(xl);
        }
        if !s.is_finite() {
            return Err(Error::NonIntegrable(format!("integrand not finite near t = {t}")));
        }
        Ok(w * s)
    };

    let mut h = 1.0;
    let mut sum = pair(0.0)?;
    let mut k = 1;
    while k as f64 * h <= TS_TMAX {
        sum += pair(k as f64 * h)?;
        k += 1;
    }
    let mut prev = sum * h * r;
    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TS_TMAX {
            sum += pair(k as f64 * h)?;
            k += 2;
        }
        let cur = sum * h * r;
        let diff = (cur - prev).abs();
        let scale = cur.abs();
        if diff == 0.0 || (level >= 3 && (diff * diff <= rel_tol * scale * scale || diff <= abs_tol)) {
            let error = (diff * diff / scale.max(f64::MIN_POSITIVE)).max(4.0 * f64::EPSILON * scale);
            return Ok(Estimate { value: cur, error });
        }
        prev = cur;
    }
    Ok(Estimate {
        value: prev,
        error: f64::NAN,
    })
}

/// `∫_a^∞ f` through `x = a + u/(1−u)`.
pub fn tanh_sinh_upper<F: FnMut(f64) -> f64>(mut f: F, a: f64, rel_tol: f64) -> Result<Estimate> {
    tanh_sinh(
        |u| {
            let v = 1.0 - u;
            f(a + u / v) / (v * v)
        },
        0.0,
        1.0,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for q in [1usize, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(q);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * q - 1;
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((approx - exact).abs() < 1e-13, "q = {q}");
        }
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let e = tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-13).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
        let e = tanh_sinh(|x| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-13).unwrap();
        assert!((e.value - FRAC_PI_2).abs() < 1e-12);
        let e = tanh_sinh_upper(|x| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11);
        assert_eq!(tanh_sinh(|_| 1.0, 1.0, 1.0, 1e-10).unwrap().value, 0.0);
    }
}
