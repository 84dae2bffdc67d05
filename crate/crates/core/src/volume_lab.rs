//! Norm-ball volumes in the triangular group `B°_l = A°_{l+} N_{l+}` under
//! its right Haar measure `ϱ_l = δ_l⁺(s) ds dn`.
//!
//! Integrating out the unipotent coordinates leaves
//!
//! ```text
//! ϱ_l(B^C_{l,T}) = c_{n,l} ∫ (T² − l − N(s))^{(n−l)(n+l−1)/4} exp(Σ_{k>l} (n−k) s_k) ds
//! ```
//!
//! over the free coordinates `s_{l+1}, …, s_{n−1}` (with `s_n = −Σ` of them,
//! `N(s) = Σ_{i>l} e^{2 s_i}` and `s_i > C`). The domain `N(s) < T² − l` is
//! bounded and convex, so the integral is done by nested tanh-sinh rules on
//! exact support intervals. The Monte Carlo oracle instead samples the raw
//! `(s, t)` coordinates and tests `‖a(s) n(t)‖ < T` on the matrix itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{c_nl, gamma_nl};
use crate::error::{Error, Result};
use crate::geometry::{delta, torus, unipotent, DeltaSign};
use crate::quadrature::{tanh_sinh_tol, Estimate};

const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeMethod {
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `ϱ_l(B^C_{l,T})`; `c = −∞` gives the full ball `B°_{l,T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallVolumeQuery {
    pub n: usize,
    pub l: usize,
    pub t: f64,
    pub c: f64,
    pub method: VolumeMethod,
}

impl BallVolumeQuery {
    pub fn new(n: usize, l: usize, t: f64) -> Result<Self> {
        if n < 2 || l < 1 || l >= n {
            return Err(Error::InvalidParameter(format!("need 1 <= l <= n - 1, got n = {n}, l = {l}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
        }
        Ok(Self {
            n,
            l,
            t,
            c: f64::NEG_INFINITY,
            method: VolumeMethod::Quadrature,
        })
    }

    pub fn with_floor(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_method(mut self, method: VolumeMethod) -> Self {
        self.method = method;
        self
    }

    fn free_dim(&self) -> usize {
        self.n - self.l - 1
    }
}

/// Bounds `[lo_j, hi_j]` on the free coordinates `s_{l+1+j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl FreeBounds {
    pub fn unbounded(d: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; d],
            hi: vec![f64::INFINITY; d],
        }
    }

    pub fn floor(d: usize, c: f64) -> Self {
        Self {
            lo: vec![c; d],
            hi: vec![f64::INFINITY; d],
        }
    }

    pub fn uniform(d: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; d],
            hi: vec![hi; d],
        }
    }
}

struct Reduced<'a> {
    n: usize,
    l: usize,
    r: f64,
    power: f64,
    bounds: &'a FreeBounds,
    /// Absolute tolerance of an innermost integral.
    abs_tol: f64,
}

impl Reduced<'_> {
    fn dim(&self) -> usize {
        self.n - self.l - 1
    }

    /// `min N` over coordinates `from..` with the earlier ones fixed
    /// (their sum `p` and `Σ e^{2s}` = `e` given). Returns the minimum and
    /// the optimal common value `q` (each free coordinate sits at
    /// `clamp(q)`, `s_n` at `−(p + Σ)`).
    fn min_norm(&self, from: usize, p: f64, e: f64) -> (f64, f64) {
        let d = self.dim();
        let (lo, hi) = (&self.bounds.lo[from..d], &self.bounds.hi[from..d]);
        let clamp_sum = |q: f64| -> f64 { lo.iter().zip(hi).map(|(a, b)| q.clamp(*a, *b)).sum() };
        // φ(q) = q + p + Σ clamp(q) is increasing with slope ≥ 1.
        let phi = |q: f64| q + p + clamp_sum(q);
        let mut a = -1.0 - p.abs();
        while phi(a) > 0.0 {
            a = 2.0 * a - 1.0;
        }
        let mut b = 1.0 + p.abs();
        while phi(b) < 0.0 {
            b = 2.0 * b + 1.0;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if phi(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let q = 0.5 * (a + b);
        let mut total = e;
        let mut sum = p;
        for (lo, hi) in lo.iter().zip(hi) {
            let y = q.clamp(*lo, *hi);
            total += (2.0 * y).exp();
            sum += y;
        }
        total += (-2.0 * sum).exp();
        (total, q)
    }

    /// Support of coordinate `depth` given the prefix: `{x : min N < R}`.
    fn support(&self, depth: usize, p: f64, e: f64) -> Option<(f64, f64)> {
        let (lo, hi) = (self.bounds.lo[depth], self.bounds.hi[depth]);
        let h = |x: f64| self.min_norm(depth + 1, p + x, e + (2.0 * x).exp()).0;
        let (_, q) = self.min_norm(depth, p, e);
        let x_star = q.clamp(lo, hi);
        if h(x_star) >= self.r {
            return None;
        }
        let root = |inside: f64, dir: f64, limit: f64| -> f64 {
            if limit.is_finite() && h(limit) < self.r {
                return limit;
            }
            let mut step = 1.0;
            let mut outside = inside + dir * step;
            while h(outside) < self.r && (outside - limit) * dir < 0.0 {
                step *= 2.0;
                outside = inside + dir * step;
            }
            if (outside - limit) * dir > 0.0 {
                outside = limit;
            }
            let (mut a, mut b) = (inside, outside);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                if h(m) < self.r {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        Some((root(x_star, -1.0, lo), root(x_star, 1.0, hi)))
    }

    fn integrand(&self, prefix: &[f64]) -> f64 {
        let n = self.n;
        let l = self.l;
        let mut norm = 0.0;
        let mut sum = 0.0;
        let mut expo = 0.0;
        for (j, &s) in prefix.iter().enumerate() {
            norm += (2.0 * s).exp();
            sum += s;
            // Coordinate s_k with k = l + 1 + j (1-based) has weight n − k.
            expo += (n - l - 1 - j) as f64 * s;
        }
        norm += (-2.0 * sum).exp();
        if norm >= self.r {
            return 0.0;
        }
        (self.r - norm).powf(self.power) * expo.exp()
    }

    fn integrate(&self, depth: usize, prefix: &mut Vec<f64>, p: f64, e: f64) -> Result<f64> {
        if depth == self.dim() {
            return Ok(self.integrand(prefix));
        }
        let Some((a, b)) = self.support(depth, p, e) else {
            return Ok(0.0);
        };
        let mut failure = None;
        let depth_scale = ((self.r.ln() + 2.0).max(1.0)).powi((self.dim() - depth - 1) as i32);
        let est = tanh_sinh_tol(
            |x| {
                prefix.push(x);
                let v = self.integrate(depth + 1, prefix, p + x, e + (2.0 * x).exp());
                prefix.pop();
                v.unwrap_or_else(|err| {
                    failure = Some(err);
                    0.0
                })
            },
            a,
            b,
            INNER_TOL,
            self.abs_tol * depth_scale,
        )?;
        if let Some(err) = failure {
            return Err(err);
        }
        Ok(est.value)
    }
}

/// `ϱ_l` of the ball `‖b‖ < T` in `B°_l` restricted to `s ∈ bounds`.
pub fn rho_ball_bounded(n: usize, l: usize, t: f64, bounds: &FreeBounds, method: VolumeMethod) -> Result<Estimate> {
    let q = BallVolumeQuery::new(n, l, t)?;
    let d = q.free_dim();
    if bounds.lo.len() != d || bounds.hi.len() != d {
        return Err(Error::DimensionMismatch(format!("expected {d} free-coordinate bounds")));
    }
    let r = t * t - l as f64;
    if r <= 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    match method {
        VolumeMethod::Quadrature => {
            let power = ((n - l) * (n + l - 1)) as f64 / 4.0;
            // The integrand is at most R^power · e^{Σ_k (n−k) s_k} with every
            // s_k below ½ ln R.
            let weights = ((n - l - 1) * (n - l)) as f64 / 2.0;
            let peak = r.powf(power + weights / 2.0);
            let red = Reduced {
                n,
                l,
                r,
                power,
                bounds,
                abs_tol: INNER_TOL * peak,
            };
            let c = c_nl(n, l)?;
            let v = c * red.integrate(0, &mut Vec::with_capacity(d), 0.0, 0.0)?;
            Ok(Estimate {
                value: v,
                error: v.abs() * 1e-10,
            })
        }
        VolumeMethod::MonteCarlo { samples, seed } => monte_carlo(n, l, t, bounds, samples, seed),
    }
}

/// Direct sampling of `δ_l⁺(s) ds dt` on the box `bounds × {|t_ij| < W_ij}`
/// with `W_ij = T` for `i ≤ l` and `T e^{−s_i}` otherwise, which contains
/// the ball.
fn monte_carlo(n: usize, l: usize, t: f64, bounds: &FreeBounds, samples: usize, seed: u64) -> Result<Estimate> {
    let d = n - l - 1;
    if bounds.lo.iter().chain(&bounds.hi).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("Monte Carlo needs finite s bounds".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least two samples".into()));
    }
    let box_vol: f64 = bounds.lo.iter().zip(&bounds.hi).map(|(a, b)| b - a).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = vec![0.0; n];
    // Strictly upper entries in row-major order, as `unipotent` expects.
    let mut tv = vec![0.0; n * (n - 1) / 2];
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 0..samples {
        let mut sum = 0.0;
        for j in 0..d {
            let x = bounds.lo[j] + (bounds.hi[j] - bounds.lo[j]) * rng.random::<f64>();
            s[l + j] = x;
            sum += x;
        }
        s[n - 1] = -sum;
        let mut width = 1.0;
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                tv[idx] = if j < l {
                    0.0
                } else {
                    let w = if i < l { t } else { t * (-s[i]).exp() };
                    width *= 2.0 * w;
                    w * (2.0 * rng.random::<f64>() - 1.0)
                };
                idx += 1;
            }
        }
        let b = &torus(&s) * &unipotent(n, &tv);
        let y = if b.frobenius_norm() < t {
            delta(&s, l, DeltaSign::Plus) * width * box_vol
        } else {
            0.0
        };
        let dy = y - mean;
        mean += dy / (k + 1) as f64;
        m2 += dy * (y - mean);
    }
    Ok(Estimate {
        value: mean,
        error: (m2 / (samples - 1) as f64 / samples as f64).sqrt(),
    })
}

pub fn rho_ball(query: &BallVolumeQuery) -> Result<Estimate> {
    let d = query.free_dim();
    let bounds = FreeBounds::floor(d, query.c);
    if let VolumeMethod::MonteCarlo { .. } = query.method {
        if !query.c.is_finite() {
            // The oracle needs a finite box; every point of the ball has
            // s_i < ln T and, with N ≥ e^{2 s_n}, s_i > −(d) ln T.
            let r = (query.t * query.t - query.l as f64).max(1.0).ln() * 0.5;
            let lo = -(d as f64) * r - 1.0;
            return rho_ball_bounded(query.n, query.l, query.t, &FreeBounds::uniform(d, lo, r), query.method);
        }
        let r = (query.t * query.t).ln() * 0.5;
        return rho_ball_bounded(query.n, query.l, query.t, &FreeBounds::uniform(d, query.c, r), query.method);
    }
    rho_ball_bounded(query.n, query.l, query.t, &bounds, query.method)
}

/// Exponent `(n−1)(n−l)` of the volume growth.
fn growth(n: usize, l: usize) -> f64 {
    ((n - 1) * (n - l)) as f64
}

/// `γ_{n,l} T^{(n−1)(n−l)}`.
pub fn asymptote(n: usize, l: usize, t: f64) -> Result<f64> {
    Ok(gamma_nl(n, l)? * t.powf(growth(n, l)))
}

/// `ϱ_l(B°_{l,T}) / (γ_{n,l} T^{(n−1)(n−l)})`.
pub fn asymptotic_ratio(n: usize, l: usize, t: f64) -> Result<f64> {
    let q = BallVolumeQuery::new(n, l, t)?;
    Ok(rho_ball(&q)?.value / asymptote(n, l, t)?)
}

/// `ϱ_l(B^C_{l,T}) / ϱ_l(B°_{l,T})`.
pub fn concentration_ratio(n: usize, l: usize, t: f64, c: f64) -> Result<f64> {
    let q = BallVolumeQuery::new(n, l, t)?;
    let full = rho_ball(&q)?.value;
    if full == 0.0 {
        return Ok(1.0);
    }
    if c == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    Ok(rho_ball(&q.with_floor(c))?.value / full)
}

/// `ϱ_l({b ∈ B°_{l,T} : s_{i0} ≤ C}) / T^{(n−1)(n−l)}` for `l < i0 < n`
/// (1-based `i0`).
pub fn complement_decay(n: usize, l: usize, t: f64, c: f64, i0: usize) -> Result<f64> {
    let q = BallVolumeQuery::new(n, l, t)?;
    if !(l < i0 && i0 < n) {
        return Err(Error::InvalidParameter(format!("need l < i0 < n, got i0 = {i0}")));
    }
    let mut bounds = FreeBounds::unbounded(q.free_dim());
    bounds.hi[i0 - l - 1] = c;
    Ok(rho_ball_bounded(n, l, t, &bounds, VolumeMethod::Quadrature)?.value / t.powf(growth(n, l)))
}

/// One row of a volume sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub c: f64,
    pub rho: f64,
    pub asymptote: f64,
    pub ratio: f64,
}

/// `ϱ_l(B^C_{l,T})` against `γ_{n,l} T^{(n−1)(n−l)}` along `ts`. Radii with
/// `T² ≤ l` give `rho = 0`.
pub fn volume_sweep(n: usize, l: usize, ts: &[f64], c: f64) -> Result<Vec<SweepRow>> {
    ts.iter()
        .map(|&t| {
            let q = BallVolumeQuery::new(n, l, t)?.with_floor(c);
            let rho = rho_ball(&q)?.value;
            let asym = asymptote(n, l, t)?;
            Ok(SweepRow {
                t,
                c,
                rho,
                asymptote: asym,
                ratio: rho / asym,
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "T,C,rho,asymptote,ratio";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!("{},{},{:.12e},{:.12e},{:.12}", self.t, self.c, self.rho, self.asymptote, self.ratio)
    }
}
