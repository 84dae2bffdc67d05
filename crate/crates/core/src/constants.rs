//! Closed-form constants of the counting asymptotics.
//!
//! With `1 ≤ l ≤ n − 1` throughout:
//!
//! * `d_{n,l}` normalises the frame measure against `dk`,
//! * `γ_{n,l}` is the leading coefficient of the norm-ball volume in `B°_l`,
//! * `a_{n,l} = γ_{n,l} / d_{n,l}`,
//! * `b_{n,l} = a_{n,l} / covol(SL(n,Z))`, also available in closed form,
//! * `c_{n,l}` is the unit-ball volume in dimension `(n−l)(n+l−1)/2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::special::{gamma_fn, riemann_zeta};

fn check_nl(n: usize, l: usize) -> Result<()> {
    if n < 2 || l < 1 || l >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= l <= n - 1, got n = {n}, l = {l}"
        )));
    }
    Ok(())
}

/// `V_k = π^{k/2} / Γ(1 + k/2)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    PI.powf(h) / gamma_fn(1.0 + h).expect("positive argument")
}

pub fn d_nl(n: usize, l: usize) -> Result<f64> {
    check_nl(n, l)?;
    let (nf, lf) = (n as f64, l as f64);
    let mut denom = 1.0;
    for i in 1..=l {
        denom *= gamma_fn((nf - i as f64 + 1.0) / 2.0)?;
    }
    Ok(2f64.powi(l as i32) * PI.powf(lf * (2.0 * nf - lf + 1.0) / 4.0) / denom)
}

pub fn gamma_nl(n: usize, l: usize) -> Result<f64> {
    check_nl(n, l)?;
    let (nf, lf) = (n as f64, l as f64);
    let mut prod = 1.0;
    for j in l + 1..n {
        prod *= gamma_fn((nf - j as f64) / 2.0)?;
    }
    let head = PI.powf((nf + lf - 1.0) * (nf - lf) / 4.0)
        / (2f64.powi((n - l - 1) as i32) * gamma_fn((nf - 1.0) * (nf - lf) / 2.0 + 1.0)?);
    Ok(head * prod)
}

pub fn a_nl(n: usize, l: usize) -> Result<f64> {
    Ok(gamma_nl(n, l)? / d_nl(n, l)?)
}

pub fn c_nl(n: usize, l: usize) -> Result<f64> {
    check_nl(n, l)?;
    let e = (n - l) as f64 * (n + l - 1) as f64 / 4.0;
    Ok(PI.powf(e) / gamma_fn(1.0 + e)?)
}

/// Haar covolume of SL(n,Z) in SL(n,R) for the normalisation used by
/// `a_{n,l}`: `2^{−(n−1)} ∏_{i=2}^n π^{−i/2} Γ(i/2) ζ(i)`.
pub fn covolume_slnz(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("covolume needs n >= 2, got {n}")));
    }
    let mut v = 2f64.powi(-(n as i32 - 1));
    for i in 2..=n {
        let h = i as f64 / 2.0;
        v *= PI.powf(-h) * gamma_fn(h)? * riemann_zeta(i as u32)?;
    }
    Ok(v)
}

pub fn b_nl(n: usize, l: usize) -> Result<f64> {
    check_nl(n, l)?;
    let (nf, lf) = (n as f64, l as f64);
    let mut zeta = 1.0;
    for i in 2..=n {
        zeta *= riemann_zeta(i as u32)?;
    }
    Ok(PI.powf(nf * (nf - lf) / 2.0)
        / (gamma_fn((nf - 1.0) * (nf - lf) / 2.0 + 1.0)? * gamma_fn((nf - lf) / 2.0)?)
        / zeta)
}

/// `F(z) = π^{(n+l−1)(n−l)/4} 2^{l−n} ∏_{j=l+1}^n Γ((z−j+1)/2)`, defined for
/// `z > n − 1` (the first pole sits at `z = n − 1`).
pub fn mellin_f(z: f64, n: usize, l: usize) -> Result<f64> {
    check_nl(n, l)?;
    if !(z > (n - 1) as f64) {
        return Err(Error::Domain(format!("F(z) needs z > {}, got {z}", n - 1)));
    }
    let (nf, lf) = (n as f64, l as f64);
    let mut prod = 1.0;
    for j in l + 1..=n {
        prod *= gamma_fn((z - j as f64 + 1.0) / 2.0)?;
    }
    Ok(PI.powf((nf + lf - 1.0) * (nf - lf) / 4.0) / 2f64.powi((n - l) as i32) * prod)
}

/// All constants for one `(n, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTable {
    pub n: usize,
    pub l: usize,
    /// `V_k` for `k = 0..=n`.
    pub v_k: Vec<f64>,
    pub d_nl: f64,
    pub gamma_nl: f64,
    pub a_nl: f64,
    pub c_nl: f64,
    pub covolume: f64,
    pub b_nl: f64,
}

impl ConstantTable {
    fn compute(n: usize, l: usize) -> Result<Self> {
        let d = d_nl(n, l)?;
        let g = gamma_nl(n, l)?;
        Ok(Self {
            n,
            l,
            v_k: (0..=n).map(unit_ball_volume).collect(),
            d_nl: d,
            gamma_nl: g,
            a_nl: g / d,
            c_nl: c_nl(n, l)?,
            covolume: covolume_slnz(n)?,
            b_nl: b_nl(n, l)?,
        })
    }

    /// Memoised per `(n, l)`.
    pub fn get(n: usize, l: usize) -> Result<Self> {
        static MEMO: OnceLock<RwLock<HashMap<(usize, usize), ConstantTable>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(t) = memo.read().expect("memo lock").get(&(n, l)) {
            return Ok(t.clone());
        }
        let t = Self::compute(n, l)?;
        memo.write().expect("memo lock").insert((n, l), t.clone());
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tanh_sinh_upper;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert!(rel(unit_ball_volume(1), 2.0) < 1e-15);
        assert!(rel(unit_ball_volume(2), PI) < 1e-15);
        for k in 2..=30 {
            let rec = unit_ball_volume(k - 2) * 2.0 * PI / k as f64;
            assert!(rel(unit_ball_volume(k), rec) < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn small_cases() {
        assert!(rel(d_nl(2, 1).unwrap(), 2.0 * PI) < 1e-14);
        assert!(rel(d_nl(3, 1).unwrap(), 4.0 * PI) < 1e-14);
        assert!(rel(gamma_nl(2, 1).unwrap(), 2.0) < 1e-14);
        assert!(rel(gamma_nl(3, 1).unwrap(), PI * PI / 4.0) < 1e-14);
        assert!(rel(covolume_slnz(2).unwrap(), PI / 12.0) < 1e-14);
        let c3 = 0.25 / PI * (PI * PI / 6.0) * PI.powf(-1.5) * (PI.sqrt() / 2.0) * 1.202_056_903_159_594_2;
        assert!(rel(covolume_slnz(3).unwrap(), c3) < 1e-14);
        assert!(rel(b_nl(2, 1).unwrap(), 12.0 / (PI * PI)) < 1e-12);
        assert!(rel(c_nl(2, 1).unwrap(), 2.0) < 1e-14);
        assert!(rel(c_nl(3, 1).unwrap(), 4.0 * PI / 3.0) < 1e-14);
        assert!(rel(c_nl(3, 2).unwrap(), PI) < 1e-14);
        assert!(d_nl(2, 2).is_err());
        assert!(gamma_nl(3, 0).is_err());
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn frozen_reference_values() {
        // 30-digit evaluations.
        let cases = [
            (3, 1, 7.840_542_270_500_212_7, 2.467_401_100_272_339_7),
            (3, 2, 1.588_826_046_489_728, PI),
            (4, 1, 9.684_273_045_270_723_1, 0.262_486_998_351_744_51),
            (4, 3, 1.957_303_199_885_258, 4.188_790_204_786_391),
            (5, 2, 3.780_659_853_885_455_5, 0.106_256_834_994_889_39),
            (6, 3, 1.061_606_105_025_994_3, 0.030_354_291_826_109_438),
        ];
        for (n, l, b, g) in cases {
            assert!(rel(b_nl(n, l).unwrap(), b) < 1e-12, "b n = {n}, l = {l}");
            assert!(rel(gamma_nl(n, l).unwrap(), g) < 1e-12, "γ n = {n}, l = {l}");
        }
    }

    #[test]
    fn mellin_values_and_pole() {
        assert!(rel(mellin_f(4.0, 3, 1).unwrap(), PI * PI / 8.0) < 1e-14);
        assert!(rel(mellin_f(3.0, 2, 1).unwrap(), PI.sqrt() / 2.0) < 1e-14);
        assert!(mellin_f(2.0, 3, 1).is_err());
        assert!(mellin_f(2.0 + 1e-9, 3, 1).is_ok());
        // F blows up approaching the pole.
        assert!(mellin_f(2.0 + 1e-9, 3, 1).unwrap() > 1e8);
    }

    #[test]
    fn b_matches_a_over_covolume() {
        for n in 2..=6 {
            for l in 1..n {
                let t = ConstantTable::get(n, l).unwrap();
                assert_eq!(t.a_nl, t.gamma_nl / t.d_nl);
                assert!(rel(t.b_nl, t.a_nl / t.covolume) < 1e-10, "n = {n}, l = {l}");
                assert!(t.b_nl > 0.0 && t.c_nl > 0.0);
            }
        }
    }

    #[test]
    fn gaussian_moments() {
        for p in [0.0, 1.0, 2.5, 3.7] {
            let e = tanh_sinh_upper(|a| (-a * a).exp() * a.powf(p), 0.0, 1e-12).unwrap();
            let exact = gamma_fn((p + 1.0) / 2.0).unwrap() / 2.0;
            assert!(rel(e.value, exact) < 1e-8, "p = {p}");
        }
    }
}
