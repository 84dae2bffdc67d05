//! Test regions in frame coordinates, the limit measure `dv / Vol(v)`,
//! predicted counts and empirical orbit counts.
//!
//! Boxes are closed. Coordinates are column-major frame coordinates, so a
//! box in `R^{n l}` lists the bounds of `v_1` first.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::ConstantTable;
use crate::enumerate::{orbit_point_into, IntMatrix, MatrixStream};
use crate::error::{Error, Result};
use crate::geometry::Frame;
use crate::quadrature::{gauss_legendre, Estimate};

/// Evaluation budget for one tensor-product rule (all sub-boxes included).
const GL_BUDGET: f64 = 4.0e6;
const GL_MAX_NODES: usize = 32;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Closed axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("box bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("box needs finite lo <= hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Interiors intersect.
    fn overlaps(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    fn dist_to_origin(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| if *a > 0.0 { *a } else if *b < 0.0 { -*b } else { 0.0 })
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
    }

    fn diameter(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }
}

pub type RegionPredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A relatively compact test set `Ω`.
#[derive(Clone)]
pub enum Region {
    /// Union of pairwise interior-disjoint closed boxes.
    Boxes(Vec<AxisBox>),
    /// `{v ∈ R^n : r_min ≤ ‖v‖ ≤ r_max}`, frames of length one.
    Annulus { r_min: f64, r_max: f64 },
    /// Arbitrary membership test inside a bounding box.
    Predicate { bounds: AxisBox, test: RegionPredicate },
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Boxes(b) => f.debug_tuple("Boxes").field(b).finish(),
            Region::Annulus { r_min, r_max } => {
                f.debug_struct("Annulus").field("r_min", r_min).field("r_max", r_max).finish()
            }
            Region::Predicate { bounds, .. } => f.debug_struct("Predicate").field("bounds", bounds).finish(),
        }
    }
}

impl Region {
    pub fn boxes(boxes: Vec<AxisBox>) -> Result<Self> {
        if let Some(d) = boxes.first().map(AxisBox::dim) {
            if boxes.iter().any(|b| b.dim() != d) {
                return Err(Error::DimensionMismatch("boxes of different dimension".into()));
            }
        }
        for (i, a) in boxes.iter().enumerate() {
            if boxes[i + 1..].iter().any(|b| a.overlaps(b)) {
                return Err(Error::InvalidParameter("boxes must be pairwise disjoint".into()));
            }
        }
        Ok(Region::Boxes(boxes))
    }

    pub fn single_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::boxes(vec![AxisBox::new(lo, hi)?])
    }

    pub fn annulus(r_min: f64, r_max: f64) -> Result<Self> {
        if !(0.0 <= r_min && r_min <= r_max && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad annulus ({r_min}, {r_max})")));
        }
        Ok(Region::Annulus { r_min, r_max })
    }

    pub fn empty() -> Self {
        Region::Boxes(Vec::new())
    }

    /// Membership of a point given by its column-major coordinates.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Boxes(b) => b.iter().any(|b| b.dim() == x.len() && b.contains(x)),
            Region::Annulus { r_min, r_max } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                r_min * r_min <= r2 && r2 <= r_max * r_max
            }
            Region::Predicate { bounds, test } => bounds.contains(x) && test(x),
        }
    }

    /// Closed-set membership of a frame.
    pub fn member(&self, v: &Frame) -> bool {
        self.contains(v.coords())
    }

    /// Parses one line of a region file:
    /// `box lo_1 hi_1 … lo_d hi_d` or `annulus r_min r_max`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let kind = parts.next().ok_or_else(|| Error::Config("empty region line".into()))?;
        let nums: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::Config(format!("bad number '{p}' in region"))))
            .collect::<Result<_>>()?;
        match kind {
            "box" => {
                if nums.is_empty() || nums.len() % 2 != 0 {
                    return Err(Error::Config("box needs lo/hi pairs".into()));
                }
                let lo = nums.iter().step_by(2).copied().collect();
                let hi = nums.iter().skip(1).step_by(2).copied().collect();
                Self::single_box(lo, hi)
            }
            "annulus" => match nums[..] {
                [a, b] => Self::annulus(a, b),
                _ => Err(Error::Config("annulus needs r_min r_max".into())),
            },
            other => Err(Error::Config(format!("unknown region kind '{other}'"))),
        }
    }

    /// One region per non-empty, non-`#` line.
    pub fn parse_file(text: &str) -> Result<Vec<Region>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(Self::parse_line)
            .collect()
    }

    pub(crate) fn check_dim(&self, n: usize, l: usize) -> Result<()> {
        let d = n * l;
        match self {
            Region::Boxes(b) if b.iter().any(|b| b.dim() != d) => Err(Error::DimensionMismatch(format!(
                "region boxes must live in R^{d}"
            ))),
            Region::Annulus { .. } if l != 1 => {
                Err(Error::InvalidParameter("annulus regions need l = 1".into()))
            }
            Region::Predicate { bounds, .. } if bounds.dim() != d => {
                Err(Error::DimensionMismatch(format!("predicate bounds must live in R^{d}")))
            }
            _ => Ok(()),
        }
    }
}

/// `Vol(v)` from column-major coordinates; zero for dependent columns.
pub fn frame_volume_coords(n: usize, l: usize, x: &[f64]) -> f64 {
    if l == 1 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let col = |i: usize| &x[i * n..(i + 1) * n];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    if l == 2 {
        let (a, b) = (col(0), col(1));
        let g = dot(a, a) * dot(b, b) - dot(a, b).powi(2);
        return g.max(0.0).sqrt();
    }
    let mut g = vec![0.0; l * l];
    for i in 0..l {
        for j in i..l {
            let d = dot(col(i), col(j));
            g[i * l + j] = d;
            g[j * l + i] = d;
        }
    }
    // Cholesky: det = ∏ pivots.
    let mut det = 1.0;
    for k in 0..l {
        let p = g[k * l + k];
        if p <= 0.0 {
            return 0.0;
        }
        det *= p;
        for i in k + 1..l {
            let f = g[i * l + k] / p;
            for j in k + 1..l {
                g[i * l + j] -= f * g[k * l + j];
            }
        }
    }
    det.sqrt()
}

/// Tensor Gauss-Legendre with `q` nodes per axis.
fn gl_tensor<F: FnMut(&[f64]) -> f64>(f: &mut F, lo: &[f64], hi: &[f64], nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let d = lo.len();
    let q = nodes.0.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let jac: f64 = half.iter().product();
    if d == 0 {
        return f(&[]);
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..d {
            x[k] = mid[k] + half[k] * nodes.0[idx[k]];
            w *= nodes.1[idx[k]];
        }
        total += w * f(&x);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < q {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return total * jac;
            }
        }
    }
}

/// Nodes per axis so that `pieces · (2^d + 1) · q^d` stays in budget.
fn nodes_per_axis(d: usize, pieces: usize) -> usize {
    if d == 0 {
        return 1;
    }
    let per = GL_BUDGET / (pieces.max(1) as f64 * (2f64.powi(d as i32) + 1.0));
    (per.powf(1.0 / d as f64).floor() as usize).clamp(2, GL_MAX_NODES)
}

/// Whole-box rule against the sum over its `2^d` halves; the halves are
/// returned as the value and the difference as the error.
fn gl_refined<F: FnMut(&[f64]) -> f64>(f: &mut F, lo: &[f64], hi: &[f64], q: usize) -> Estimate {
    let rule = gauss_legendre(q);
    let d = lo.len();
    let coarse = gl_tensor(f, lo, hi, &rule);
    let mut fine = 0.0;
    let mut sub_lo = vec![0.0; d];
    let mut sub_hi = vec![0.0; d];
    for mask in 0..(1usize << d) {
        for k in 0..d {
            let m = 0.5 * (lo[k] + hi[k]);
            if mask >> k & 1 == 0 {
                sub_lo[k] = lo[k];
                sub_hi[k] = m;
            } else {
                sub_lo[k] = m;
                sub_hi[k] = hi[k];
            }
        }
        fine += gl_tensor(f, &sub_lo, &sub_hi, &rule);
    }
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

/// `∫_{[0,c]} dx/‖x‖` for `c ≥ 0` in `R^d`, `d ≥ 2`, by splitting into `d`
/// pyramids with apex at the origin. On the pyramid over the face
/// `x_i = c_i`, `x = u y` gives `dx = u^{d−1} c_i du dy`, so the integral is
/// `c_i/(d−1) ∫_face dy/‖y‖`. Each face axis is graded geometrically from
/// the apex side at scale `c_i`.
fn corner_integral(c: &[f64]) -> Estimate {
    let d = c.len();
    let mut out = Estimate { value: 0.0, error: 0.0 };
    if c.iter().any(|&x| x <= 0.0) {
        return out;
    }
    for i in 0..d {
        let ci = c[i];
        let axes: Vec<Vec<f64>> = (0..d)
            .filter(|&j| j != i)
            .map(|j| {
                let mut cuts = vec![0.0];
                let mut x = ci;
                while x < c[j] {
                    cuts.push(x);
                    x *= 2.0;
                }
                cuts.push(c[j]);
                cuts
            })
            .collect();
        let pieces: usize = axes.iter().map(|a| a.len() - 1).product();
        let q = nodes_per_axis(d - 1, pieces);
        let mut f = |y: &[f64]| 1.0 / (ci * ci + y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let mut idx = vec![0usize; d - 1];
        let mut lo = vec![0.0; d - 1];
        let mut hi = vec![0.0; d - 1];
        loop {
            for k in 0..d - 1 {
                lo[k] = axes[k][idx[k]];
                hi[k] = axes[k][idx[k] + 1];
            }
            let e = gl_refined(&mut f, &lo, &hi, q);
            out.value += ci / (d as f64 - 1.0) * e.value;
            out.error += ci / (d as f64 - 1.0) * e.error;
            let mut k = 0;
            loop {
                if k == d - 1 {
                    break;
                }
                idx[k] += 1;
                if idx[k] + 1 < axes[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d - 1 {
                break;
            }
        }
    }
    out
}

/// `∫_B dv/‖v‖` for a box in `R^d`, `d ≥ 2`.
fn box_integral_l1(b: &AxisBox) -> Estimate {
    let d = b.dim();
    if b.volume() == 0.0 {
        return Estimate { value: 0.0, error: 0.0 };
    }
    if b.dist_to_origin() > b.diameter() {
        let q = nodes_per_axis(d, 1);
        let mut f = |x: &[f64]| 1.0 / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        return gl_refined(&mut f, &b.lo, &b.hi, q);
    }
    // ∫_{lo}^{hi} = Σ over corners of ±∫_0^{corner}, and by reflection
    // symmetry ∫_0^c = sign(∏ c) ∫_{[0,|c|]}.
    let mut out = Estimate { value: 0.0, error: 0.0 };
    let mut c = vec![0.0; d];
    for mask in 0..(1usize << d) {
        let mut sign = 1.0;
        for k in 0..d {
            // ∫_lo^hi = ∫_0^hi − ∫_0^lo and ∫_0^x = sign(x) ∫_0^{|x|}.
            let (val, s) = if mask >> k & 1 == 1 {
                (b.hi[k].abs(), b.hi[k].signum())
            } else {
                (b.lo[k].abs(), -b.lo[k].signum())
            };
            c[k] = val;
            sign *= if val == 0.0 { 0.0 } else { s };
        }
        if sign == 0.0 {
            continue;
        }
        let e = corner_integral(&c);
        out.value += sign * e.value;
        out.error += e.error;
    }
    out
}

/// `∫_B dv/Vol(v)` for `l ≥ 2`; the box must stay away from degenerate
/// frames.
fn box_integral_general(b: &AxisBox, n: usize, l: usize) -> Result<Estimate> {
    let d = b.dim();
    if n == l {
        // det is affine in each entry, so its sign on the box is decided by
        // the vertices.
        let mut pos = false;
        let mut neg = false;
        let mut x = vec![0.0; d];
        for mask in 0..(1u64 << d) {
            for k in 0..d {
                x[k] = if mask >> k & 1 == 1 { b.hi[k] } else { b.lo[k] };
            }
            let m = crate::geometry::RealMatrix::from_row_major(n, transpose(&x, n))?;
            let det = m.det();
            pos |= det > 0.0;
            neg |= det < 0.0;
            if det == 0.0 {
                pos = true;
                neg = true;
            }
        }
        if pos && neg {
            return Err(Error::NonIntegrable("box meets the degenerate frames".into()));
        }
    }
    let mut degenerate = false;
    let mut f = |x: &[f64]| {
        let v = frame_volume_coords(n, l, x);
        if v <= 0.0 {
            degenerate = true;
            0.0
        } else {
            1.0 / v
        }
    };
    let e = gl_refined(&mut f, &b.lo, &b.hi, nodes_per_axis(d, 1));
    if degenerate || !(e.error <= 1e-3 * e.value.abs()) {
        return Err(Error::NonIntegrable(format!(
            "box too close to degenerate frames (estimate {} ± {})",
            e.value, e.error
        )));
    }
    Ok(e)
}

/// Column-major `n × n` coordinates to row-major entries.
fn transpose(x: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for c in 0..n {
        for r in 0..n {
            out[r * n + c] = x[c * n + r];
        }
    }
    out
}

/// `∫_Ω dv/Vol(v)` over `V_{n,l}` with an error estimate. Annuli use the
/// closed form `n V_n (r_max^{n−1} − r_min^{n−1})/(n−1)`, boxes tensor
/// Gauss-Legendre and predicates Monte Carlo with `DEFAULT_MC_SAMPLES`
/// points from `seed`.
pub fn target_integral(omega: &Region, n: usize, l: usize) -> Result<Estimate> {
    target_integral_seeded(omega, n, l, 0)
}

pub fn target_integral_seeded(omega: &Region, n: usize, l: usize, seed: u64) -> Result<Estimate> {
    omega.check_dim(n, l)?;
    if n < 2 && l == 1 {
        return Err(Error::InvalidParameter("1/‖v‖ is not integrable at the origin of R^1".into()));
    }
    match omega {
        Region::Annulus { r_min, r_max } => {
            let nf = n as f64;
            let v = nf * crate::constants::unit_ball_volume(n) * (r_max.powf(nf - 1.0) - r_min.powf(nf - 1.0))
                / (nf - 1.0);
            Ok(Estimate { value: v, error: 0.0 })
        }
        Region::Boxes(boxes) => {
            let mut out = Estimate { value: 0.0, error: 0.0 };
            for b in boxes {
                let e = if l == 1 {
                    box_integral_l1(b)
                } else {
                    box_integral_general(b, n, l)?
                };
                out.value += e.value;
                out.error += e.error;
            }
            Ok(out)
        }
        Region::Predicate { .. } => monte_carlo_integral(omega, n, l, DEFAULT_MC_SAMPLES, seed),
    }
}

/// Plain Monte Carlo over the bounding box; the error is one standard
/// error.
pub fn monte_carlo_integral(omega: &Region, n: usize, l: usize, samples: usize, seed: u64) -> Result<Estimate> {
    omega.check_dim(n, l)?;
    let bounds = match omega {
        Region::Boxes(b) if b.len() == 1 => b[0].clone(),
        Region::Boxes(b) => {
            let mut out = Estimate { value: 0.0, error: 0.0 };
            let mut var = 0.0;
            for (i, bx) in b.iter().enumerate() {
                let e = monte_carlo_integral(&Region::Boxes(vec![bx.clone()]), n, l, samples, seed.wrapping_add(i as u64))?;
                out.value += e.value;
                var += e.error * e.error;
            }
            out.error = var.sqrt();
            return Ok(out);
        }
        Region::Annulus { r_max, .. } => AxisBox::new(vec![-r_max; n], vec![*r_max; n])?,
        Region::Predicate { bounds, .. } => bounds.clone(),
    };
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least two samples".into()));
    }
    let vol = bounds.volume();
    let d = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; d];
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 0..samples {
        for i in 0..d {
            x[i] = bounds.lo[i] + (bounds.hi[i] - bounds.lo[i]) * rng.random::<f64>();
        }
        let y = if omega.contains(&x) {
            let v = frame_volume_coords(n, l, &x);
            if v > 0.0 {
                1.0 / v
            } else {
                0.0
            }
        } else {
            0.0
        };
        let delta = y - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (y - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(Estimate {
        value: vol * mean,
        error: vol * (var / samples as f64).sqrt(),
    })
}

/// `N_T(Ω, v⁰)` against its prediction at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub t: f64,
    pub empirical: u64,
    pub predicted: f64,
    pub ratio: f64,
}

impl CountResult {
    pub fn new(t: f64, empirical: u64, predicted: f64) -> Self {
        let ratio = if predicted > 0.0 {
            empirical as f64 / predicted
        } else {
            f64::NAN
        };
        Self {
            t,
            empirical,
            predicted,
            ratio,
        }
    }
}

/// Exponent `(n−1)(n−l)` of `T` in the counting asymptotic.
pub fn growth_exponent(n: usize, l: usize) -> f64 {
    ((n - 1) * (n - l)) as f64
}

/// `a_{n,l} Vol(v⁰)^{1−n} / covol · I · T^{(n−1)(n−l)}` for a precomputed
/// `I = ∫_Ω dv/Vol(v)`.
pub fn predicted_from_integral(n: usize, l: usize, v0: &Frame, integral: f64, t: f64, covolume: f64) -> Result<f64> {
    if !(t > 0.0) || !(covolume > 0.0) {
        return Err(Error::InvalidParameter("T and covolume must be positive".into()));
    }
    let vol = v0.volume()?;
    let table = ConstantTable::get(n, l)?;
    Ok(table.a_nl * vol.powf(1.0 - n as f64) / covolume * integral * t.powf(growth_exponent(n, l)))
}

/// Right side of the counting asymptotic with an explicit covolume.
pub fn predicted_count(n: usize, l: usize, v0: &Frame, omega: &Region, t: f64, covolume: f64) -> Result<f64> {
    if v0.ambient_dim() != n || v0.len() != l {
        return Err(Error::DimensionMismatch("v0 shape differs from (n, l)".into()));
    }
    let integral = target_integral(omega, n, l)?;
    predicted_from_integral(n, l, v0, integral.value, t, covolume)
}

/// The same prediction for `Γ = SL(n,Z)` through the closed form `b_{n,l}`.
pub fn predicted_count_sl(n: usize, l: usize, v0: &Frame, omega: &Region, t: f64) -> Result<f64> {
    if v0.ambient_dim() != n || v0.len() != l {
        return Err(Error::DimensionMismatch("v0 shape differs from (n, l)".into()));
    }
    let integral = target_integral(omega, n, l)?;
    let table = ConstantTable::get(n, l)?;
    Ok(table.b_nl * v0.volume()?.powf(1.0 - n as f64) * integral.value * t.powf(growth_exponent(n, l)))
}

fn check_stream_dim(v0: &Frame, g: &IntMatrix) -> Result<()> {
    if g.dim() != v0.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrices cannot act on R^{}",
            g.dim(),
            g.dim(),
            v0.ambient_dim()
        )));
    }
    Ok(())
}

/// `|{γ : γ·v⁰ ∈ Ω}|` over the stream.
pub fn empirical_count(v0: &Frame, omega: &Region, stream: &MatrixStream) -> Result<u64> {
    let mut buf = vec![0.0; v0.coords().len()];
    let mut c = 0;
    for g in stream {
        check_stream_dim(v0, g)?;
        orbit_point_into(g, v0, &mut buf);
        if omega.contains(&buf) {
            c += 1;
        }
    }
    Ok(c)
}

/// `N_T(cell)/T^exponent` for each cell.
pub fn empirical_cell_measure(
    v0: &Frame,
    cells: &[Region],
    stream: &MatrixStream,
    t: f64,
    exponent: f64,
) -> Result<Vec<f64>> {
    let mut counts = vec![0u64; cells.len()];
    let mut buf = vec![0.0; v0.coords().len()];
    for g in stream {
        check_stream_dim(v0, g)?;
        orbit_point_into(g, v0, &mut buf);
        for (c, cell) in counts.iter_mut().zip(cells) {
            if cell.contains(&buf) {
                *c += 1;
            }
        }
    }
    let scale = t.powf(exponent);
    Ok(counts.into_iter().map(|c| c as f64 / scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_sl, BallQuery};
    use std::f64::consts::PI;

    /// `∫∫ dx dy/√(x²+y²)` over `[0,a]×[0,b]`-type rectangles from the
    /// antiderivative `x asinh(y/x) + y asinh(x/y)`.
    fn rect_exact(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let g = |x: f64, y: f64| {
            let mut s = 0.0;
            if x != 0.0 {
                s += x * (y / x).asinh();
            }
            if y != 0.0 {
                s += y * (x / y).asinh();
            }
            s
        };
        g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0)
    }

    #[test]
    fn membership() {
        let a = Region::annulus(1.0, 2.0).unwrap();
        assert!(a.contains(&[1.5, 0.0]));
        assert!(!a.contains(&[3.0, 0.0]));
        assert!(a.contains(&[2.0, 0.0]));
        let b = Region::single_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[1.0, 0.5]));
        assert!(!b.contains(&[1.0 + 1e-12, 0.5]));
        assert!(Region::boxes(vec![
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            AxisBox::new(vec![0.5, 0.5], vec![2.0, 2.0]).unwrap(),
        ])
        .is_err());
        // Shared faces are allowed.
        assert!(Region::boxes(vec![
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            AxisBox::new(vec![1.0, 0.0], vec![2.0, 1.0]).unwrap(),
        ])
        .is_ok());
    }

    #[test]
    fn annulus_and_empty() {
        let e = target_integral(&Region::annulus(1.0, 2.0).unwrap(), 2, 1).unwrap();
        assert!((e.value - 2.0 * PI).abs() < 1e-12);
        assert_eq!(target_integral(&Region::empty(), 2, 1).unwrap().value, 0.0);
        // R^3: 4π (r2² − r1²)/2.
        let e = target_integral(&Region::annulus(1.0, 2.0).unwrap(), 3, 1).unwrap();
        assert!((e.value - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rectangles_match_antiderivative() {
        let cases = [
            [1.0, 2.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 1.0],
            [-1.0, 1.0, -1.0, 1.0],
            [-0.3, 2.0, 0.01, 0.7],
            [0.001, 0.5, -3.0, 0.2],
            [5.0, 6.0, -1.0, 1.0],
        ];
        for [x0, x1, y0, y1] in cases {
            let r = Region::single_box(vec![x0, y0], vec![x1, y1]).unwrap();
            let e = target_integral(&r, 2, 1).unwrap();
            // Split at the axes for the exact side.
            let split = |a: f64, b: f64| -> Vec<(f64, f64)> {
                if a < 0.0 && b > 0.0 {
                    vec![(0.0, -a), (0.0, b)]
                } else if b <= 0.0 {
                    vec![(-b, -a)]
                } else {
                    vec![(a, b)]
                }
            };
            let mut exact = 0.0;
            for (xa, xb) in split(x0, x1) {
                for (ya, yb) in split(y0, y1) {
                    exact += rect_exact(xa, xb, ya, yb);
                }
            }
            assert!((e.value - exact).abs() < 1e-9 * exact, "{x0} {x1} {y0} {y1}: {} vs {exact}", e.value);
        }
    }

    #[test]
    fn cube_around_origin_in_r3() {
        // ∫_{[-1,1]^3} 1/|x| = 8 ∫_{[0,1]^3}; the latter is 3 ∫_face/2 by
        // symmetry, checked against nested tanh-sinh.
        let e = target_integral(&Region::single_box(vec![-1.0; 3], vec![1.0; 3]).unwrap(), 3, 1).unwrap();
        let inner = |y: f64| {
            crate::quadrature::tanh_sinh(|z| 1.0 / (1.0 + y * y + z * z).sqrt(), 0.0, 1.0, 1e-14)
                .unwrap()
                .value
        };
        let face = crate::quadrature::tanh_sinh(inner, 0.0, 1.0, 1e-13).unwrap().value;
        let exact = 8.0 * 3.0 * face / 2.0;
        assert!((e.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn ledrappier_prediction() {
        let v0 = Frame::new(2, 1, vec![2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let a = Region::annulus(1.0, 2.0).unwrap();
        let p = predicted_count_sl(2, 1, &v0, &a, 10.0).unwrap();
        let expected = 24.0 * 10.0 / (PI * 5f64.sqrt());
        assert!((p - expected).abs() < 1e-12 * expected);
        let q = predicted_count(2, 1, &v0, &a, 10.0, PI / 12.0).unwrap();
        assert!((p - q).abs() < 1e-10 * p);
        let p2 = predicted_count_sl(2, 1, &v0, &a, 20.0).unwrap();
        assert!((p2 - 2.0 * p).abs() < 1e-12 * p);
    }

    #[test]
    fn counts_and_cells() {
        let s = enumerate_sl(&BallQuery::sl(2, 6.0).unwrap()).unwrap();
        let v0 = Frame::new(2, 1, vec![2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let all = Region::single_box(vec![-100.0; 2], vec![100.0; 2]).unwrap();
        assert_eq!(empirical_count(&v0, &all, &s).unwrap(), s.len() as u64);
        assert_eq!(empirical_count(&v0, &Region::empty(), &s).unwrap(), 0);
        let left = Region::single_box(vec![-100.0, -100.0], vec![0.0, 100.0]).unwrap();
        let right = Region::single_box(vec![0.0, -100.0], vec![100.0, 100.0]).unwrap();
        let cells = empirical_cell_measure(&v0, &[left, right, all], &s, 6.0, 1.0).unwrap();
        // No orbit point has a zero first coordinate.
        assert!((cells[0] + cells[1] - cells[2]).abs() < 1e-12);
    }

    #[test]
    fn region_file() {
        let regions = Region::parse_file("# cells\nbox 0 1 -1 2\n\nannulus 1 2\n").unwrap();
        assert_eq!(regions.len(), 2);
        assert!(regions[0].contains(&[0.5, 1.5]));
        assert!(Region::parse_file("box 0 1 2").is_err());
        assert!(Region::parse_file("disc 1").is_err());
    }

    #[test]
    fn square_frames_crossing_zero_det_are_rejected() {
        let r = Region::single_box(vec![-1.0, -1.0, -1.0, -1.0], vec![1.0; 4]).unwrap();
        assert!(matches!(target_integral(&r, 2, 2), Err(Error::NonIntegrable(_))));
    }
}
