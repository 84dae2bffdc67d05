//! Gamma function and Riemann zeta at integer arguments.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `B_{2m}` for `m = 1..=10`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1)).
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// `Γ(x)` for real `x` off the non-positive integers.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma pole at {x}")));
    }
    if x == x.floor() && x <= 171.0 {
        // Exact factorial for small positive integers.
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// `ζ(k)` for integer `k ≥ 2`.
pub fn riemann_zeta(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("zeta pole or non-convergent at {k}")));
    }
    if k % 2 == 0 && (k as usize / 2) <= BERNOULLI_EVEN.len() {
        let m = k as i32 / 2;
        let b = BERNOULLI_EVEN[m as usize - 1];
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let fact = gamma_fn(k as f64 + 1.0)?;
        return Ok(sign * b * (2.0 * PI).powi(k as i32) / (2.0 * fact));
    }
    Ok(zeta_euler_maclaurin(k as f64))
}

/// Direct sum to `N − 1` plus the Euler-Maclaurin tail at `N`.
fn zeta_euler_maclaurin(s: f64) -> f64 {
    const N: usize = 12;
    let nf = N as f64;
    let mut sum: f64 = (1..N).rev().map(|j| (j as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Σ_m B_{2m}/(2m)! · s(s+1)…(s+2m−2) · N^{−s−2m+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (i, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = i + 1;
        let term = b / fact * rising * nf.powf(-s - 2.0 * m as f64 + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum {
            break;
        }
        let k = 2.0 * m as f64;
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_values() {
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(rel(gamma_fn(1.5).unwrap(), PI.sqrt() / 2.0) < 1e-14);
        assert!(rel(gamma_fn(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
        assert!(rel(ln_gamma(30.5).unwrap(), gamma_fn(30.5).unwrap().ln()) < 1e-14);
    }

    #[test]
    fn functional_equation() {
        let mut x = 0.5;
        while x <= 20.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
            x += 0.173;
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn zeta_values() {
        assert!(rel(riemann_zeta(2).unwrap(), PI * PI / 6.0) < 1e-15);
        assert!(rel(riemann_zeta(4).unwrap(), PI.powi(4) / 90.0) < 1e-15);
        assert!(rel(riemann_zeta(3).unwrap(), 1.202_056_903_159_594_2) < 1e-14);
        assert!(rel(riemann_zeta(5).unwrap(), 1.036_927_755_143_369_9) < 1e-14);
        assert!(rel(riemann_zeta(7).unwrap(), 1.008_349_277_381_922_8) < 1e-14);
        // Even values through the series agree with the closed form.
        for k in [2u32, 6, 10, 20] {
            assert!(rel(zeta_euler_maclaurin(k as f64), riemann_zeta(k).unwrap()) < 1e-14);
        }
        assert!(riemann_zeta(1).is_err());
    }
}
