//! Exact enumeration of `{γ ∈ Γ : ‖γ‖ < T}` for `Γ = SL(n,Z)` and
//! `Γ = Sp(n,Z)`.
//!
//! Both searches fill the matrix column by column under a running
//! square-sum budget. For SL the first `n − 1` columns are free (subject to
//! primitivity of the partial sublattice) and the last column runs over the
//! affine lattice `Σ cᵢ xᵢ = 1` given by the cofactors. For Sp every new
//! column must satisfy `ᵗcol_i J x = J_ij` against the columns already
//! placed, which again is an affine lattice. SL(2,Z) has a dedicated
//! Bezout path.
//!
//! The search space is split by the leading entries of the first column;
//! partitions are independent and can run on separate threads.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::int_matrix::{bareiss_det, IntMatrix};
use super::lattice::{ext_gcd, gcd, AffineLattice};
use crate::error::{Error, Result};

pub const DEFAULT_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Sl,
    Sp,
}

impl std::str::FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl" => Ok(Group::Sl),
            "sp" => Ok(Group::Sp),
            other => Err(Error::InvalidParameter(format!("unknown group '{other}'"))),
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Group::Sl => "sl",
            Group::Sp => "sp",
        })
    }
}

/// `{γ ∈ Γ : ‖γ‖ < T}`; `n` is the matrix size for SL and half of it for Sp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallQuery {
    pub group: Group,
    pub n: usize,
    pub radius: f64,
}

impl BallQuery {
    pub fn new(group: Group, n: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self { group, n, radius })
    }

    pub fn sl(n: usize, radius: f64) -> Result<Self> {
        Self::new(Group::Sl, n, radius)
    }

    pub fn sp(n: usize, radius: f64) -> Result<Self> {
        Self::new(Group::Sp, n, radius)
    }

    pub fn matrix_size(&self) -> usize {
        match self.group {
            Group::Sl => self.n,
            Group::Sp => 2 * self.n,
        }
    }

    /// Largest integer `k` with `k < T²`. When `T²` is within relative
    /// `1e-9` of an integer it is treated as that integer, so `T = √3`
    /// excludes norm² 3 however it was rounded.
    pub fn max_norm_sq(&self) -> Result<i64> {
        max_sq_below(self.radius)
    }
}

pub(crate) fn max_sq_below(radius: f64) -> Result<i64> {
    let t2 = radius * radius;
    if t2 > 2f64.powi(60) {
        return Err(Error::Overflow);
    }
    let near = t2.round();
    if (t2 - near).abs() <= 1e-9 * t2.max(1.0) {
        Ok(near as i64 - 1)
    } else {
        Ok(t2.ceil() as i64 - 1)
    }
}

/// Algorithm used for SL(2,Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sl2Method {
    #[default]
    Bezout,
    Search,
}

/// Leading entries of the first column that select one partition.
pub type Partition = Vec<i64>;

/// Enumerator for one ball query.
#[derive(Debug, Clone)]
pub struct BallEnumerator {
    query: BallQuery,
    size: usize,
    bound: i64,
    cap: u64,
    sl2: Sl2Method,
}

impl BallEnumerator {
    pub fn new(query: BallQuery) -> Result<Self> {
        let size = query.matrix_size();
        if size > 12 {
            return Err(Error::InvalidParameter(format!("matrix size {size} is beyond desk scale")));
        }
        Ok(Self {
            query,
            size,
            bound: query.max_norm_sq()?,
            cap: DEFAULT_CAP,
            sl2: Sl2Method::default(),
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_sl2_method(mut self, method: Sl2Method) -> Self {
        self.sl2 = method;
        self
    }

    pub fn query(&self) -> &BallQuery {
        &self.query
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Squared-norm bound: every output has `Σ γ_ij² ≤ bound`.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Rough output-size projection; only the 2×2 case (`~6 T²`) is known
    /// in closed form, larger groups return `None`.
    pub fn projected_count(&self) -> Option<f64> {
        (self.size == 2).then(|| 6.0 * (self.bound as f64 + 1.0))
    }

    fn key_len(&self) -> usize {
        if self.size >= 3 {
            2
        } else {
            1
        }
    }

    /// Disjoint partitions covering the search space, in ascending order.
    pub fn partitions(&self) -> Vec<Partition> {
        let reserve = self.size as i64 - 1;
        let budget = self.bound - reserve;
        if budget < 1 {
            return Vec::new();
        }
        if self.size == 1 {
            return vec![vec![1]];
        }
        let r = isqrt(budget);
        let mut out = Vec::new();
        for a in -r..=r {
            if self.key_len() == 1 {
                out.push(vec![a]);
            } else {
                let r2 = isqrt(budget - a * a);
                for b in -r2..=r2 {
                    out.push(vec![a, b]);
                }
            }
        }
        out
    }

    /// Visits every matrix of the partition. `emitted` is shared across
    /// partitions for cap enforcement.
    pub fn visit_partition<F>(&self, part: &[i64], emitted: &AtomicU64, mut f: F) -> Result<()>
    where
        F: FnMut(&IntMatrix),
    {
        let mut local = 0u64;
        let mut status: Result<()> = Ok(());
        let cap = self.cap;
        let mut sink = |m: &IntMatrix| -> ControlFlow<()> {
            f(m);
            local += 1;
            if local == 1024 {
                let total = emitted.fetch_add(local, Ordering::Relaxed) + local;
                local = 0;
                if total > cap {
                    status = Err(Error::CapExceeded { cap, emitted: total });
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        };
        let flow = match (self.query.group, self.size) {
            (_, 1) => {
                let m = IntMatrix::identity(1);
                if self.bound >= 1 && part == [1] {
                    sink(&m)
                } else {
                    ControlFlow::Continue(())
                }
            }
            (Group::Sl, 2) | (Group::Sp, 2) if self.sl2 == Sl2Method::Bezout => {
                self.bezout_partition(part[0], &mut sink)
            }
            (Group::Sl, _) => {
                let mut dfs = Dfs::new(self, Group::Sl);
                dfs.first_column(part, &mut sink)
            }
            (Group::Sp, _) => {
                let mut dfs = Dfs::new(self, Group::Sp);
                dfs.first_column(part, &mut sink)
            }
        };
        let _ = flow;
        status?;
        let total = emitted.fetch_add(local, Ordering::Relaxed) + local;
        if total > cap {
            return Err(Error::CapExceeded { cap, emitted: total });
        }
        Ok(())
    }

    fn check_projection(&self) -> Result<()> {
        if let Some(p) = self.projected_count() {
            if p > self.cap as f64 * 1.05 {
                return Err(Error::CapExceeded {
                    cap: self.cap,
                    emitted: 0,
                });
            }
        }
        Ok(())
    }

    /// Single-threaded visit in partition order.
    pub fn for_each<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(&IntMatrix),
    {
        self.check_projection()?;
        let emitted = AtomicU64::new(0);
        for p in self.partitions() {
            self.visit_partition(&p, &emitted, &mut f)?;
        }
        Ok(())
    }

    /// Parallel fold over partitions; each partition starts from
    /// `init()`, results are merged by `reduce`.
    pub fn par_fold<A, I, F, R>(&self, init: I, fold: F, reduce: R) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &IntMatrix) + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        self.check_projection()?;
        let emitted = AtomicU64::new(0);
        let parts = self.partitions();
        parts
            .par_iter()
            .map(|p| {
                let mut acc = init();
                self.visit_partition(p, &emitted, |m| fold(&mut acc, m))?;
                Ok(acc)
            })
            .try_reduce(&init, |a, b| Ok(reduce(a, b)))
    }

    /// Number of matrices in the ball, without materialising them.
    pub fn count(&self) -> Result<u64> {
        self.par_fold(|| 0u64, |c, _| *c += 1, |a, b| a + b)
    }

    /// All matrices, sorted lexicographically on row-major entries.
    pub fn collect(&self) -> Result<MatrixStream> {
        let mut v = self.par_fold(Vec::new, |v, m| v.push(m.clone()), |mut a, mut b| {
            a.append(&mut b);
            a
        })?;
        v.sort();
        Ok(MatrixStream { matrices: v })
    }

    fn bezout_partition<S>(&self, a: i64, sink: &mut S) -> ControlFlow<()>
    where
        S: FnMut(&IntMatrix) -> ControlFlow<()>,
    {
        let budget = self.bound - 1;
        let rem = budget - a * a;
        if rem < 0 {
            return ControlFlow::Continue(());
        }
        let r = isqrt(rem);
        let mut m = IntMatrix::zeros(2);
        for c in -r..=r {
            if gcd(a, c) != 1 {
                continue;
            }
            let col_sq = (a * a + c * c) as i128;
            let second = self.bound as i128 - col_sq;
            // a d0 − c b0 = 1
            let (_, x, y) = ext_gcd(a as i128, c as i128);
            let (mut b0, mut d0) = (-y, x);
            let uu = col_sq as f64;
            let shift = (-((b0 * a as i128 + d0 * c as i128) as f64) / uu).round() as i128;
            b0 += shift * a as i128;
            d0 += shift * c as i128;
            // |p + t u|² ≤ second; the discriminant is |u|² second − 1.
            let disc = uu * second as f64 - 1.0;
            if disc < 0.0 {
                continue;
            }
            let center = -((b0 * a as i128 + d0 * c as i128) as f64) / uu;
            let half = disc.sqrt() / uu + 1e-9;
            let lo = (center - half).ceil() as i128 - 1;
            let hi = (center + half).floor() as i128 + 1;
            for t in lo..=hi {
                let b = b0 + t * a as i128;
                let d = d0 + t * c as i128;
                if b * b + d * d <= second {
                    m.set(0, 0, a);
                    m.set(1, 0, c);
                    m.set(0, 1, b as i64);
                    m.set(1, 1, d as i64);
                    sink(&m)?;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

pub(crate) fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Depth-first column search shared by SL and Sp.
struct Dfs<'a> {
    en: &'a BallEnumerator,
    group: Group,
    size: usize,
    /// Column placement order.
    order: Vec<usize>,
    m: IntMatrix,
}

impl<'a> Dfs<'a> {
    fn new(en: &'a BallEnumerator, group: Group) -> Self {
        let size = en.size;
        let order = match group {
            Group::Sl => (0..size).collect(),
            Group::Sp => {
                let h = size / 2;
                (0..h).flat_map(|i| [i, i + h]).collect()
            }
        };
        Self {
            en,
            group,
            size,
            order,
            m: IntMatrix::zeros(size),
        }
    }

    fn first_column<S>(&mut self, key: &[i64], sink: &mut S) -> ControlFlow<()>
    where
        S: FnMut(&IntMatrix) -> ControlFlow<()>,
    {
        let size = self.size;
        let reserve = size as i64 - 1;
        let fixed_sq: i64 = key.iter().map(|x| x * x).sum();
        let budget = self.en.bound - reserve - fixed_sq;
        if budget < 0 {
            return ControlFlow::Continue(());
        }
        let free = size - key.len();
        let mut col = vec![0i64; size];
        col[..key.len()].copy_from_slice(key);
        let lattice = AffineLattice::full(free);
        let key_gcd = key.iter().fold(0, |g, &x| gcd(g, x));
        let first = self.order[0];
        lattice.for_each_in_ball(budget, |tail| {
            if tail.iter().fold(key_gcd, |g, &x| gcd(g, x)) != 1 {
                return ControlFlow::Continue(());
            }
            col[key.len()..].copy_from_slice(tail);
            self.m.set_column(first, &col);
            let used = fixed_sq + tail.iter().map(|x| x * x).sum::<i64>();
            self.descend(1, used, sink)
        })
    }

    fn descend<S>(&mut self, depth: usize, used: i64, sink: &mut S) -> ControlFlow<()>
    where
        S: FnMut(&IntMatrix) -> ControlFlow<()>,
    {
        let size = self.size;
        if depth == size {
            debug_assert!(match self.group {
                Group::Sl => self.m.det().ok() == Some(1),
                Group::Sp => self.m.is_symplectic(),
            });
            return sink(&self.m);
        }
        let remaining_after = (size - depth - 1) as i64;
        let budget = self.en.bound - used - remaining_after;
        if budget < 1 {
            return ControlFlow::Continue(());
        }
        if !self.hadamard_feasible(depth, self.en.bound - used) {
            return ControlFlow::Continue(());
        }
        let target = self.order[depth];
        let lattice = match self.constraints(depth) {
            Ok(Some(l)) => l,
            Ok(None) => return ControlFlow::Continue(()),
            // Overflow in the constraint solve cannot occur for desk-scale
            // radii; treat it as an empty branch.
            Err(_) => return ControlFlow::Continue(()),
        };
        let check_prefix = self.group == Group::Sl && depth + 1 < size - 1;
        let mut col_buf = vec![0i64; size];
        lattice.for_each_in_ball(budget, |x| {
            col_buf.copy_from_slice(x);
            self.m.set_column(target, &col_buf);
            if check_prefix && !self.prefix_primitive(depth + 1) {
                return ControlFlow::Continue(());
            }
            let sq: i64 = x.iter().map(|v| v * v).sum();
            self.descend(depth + 1, used + sq, sink)
        })
    }

    /// Affine lattice for the column placed at `depth`.
    fn constraints(&self, depth: usize) -> Result<Option<AffineLattice>> {
        let size = self.size;
        match self.group {
            Group::Sl => {
                if depth + 1 < size {
                    return Ok(Some(AffineLattice::full(size)));
                }
                let cof = self.last_column_cofactors()?;
                AffineLattice::solve(&[cof], &[1], size)
            }
            Group::Sp => {
                let h = size / 2;
                let j = self.order[depth];
                let mut rows = Vec::with_capacity(depth);
                let mut rhs = Vec::with_capacity(depth);
                for &i in &self.order[..depth] {
                    // ᵗc J x with (ᵗc J)_k = c_{k−h} for k ≥ h, −c_{k+h} for k < h.
                    let c = self.m.column(i);
                    let row: Vec<i64> = (0..size)
                        .map(|k| if k >= h { c[k - h] } else { -c[k + h] })
                        .collect();
                    rows.push(row);
                    rhs.push(if j == i + h && i < h {
                        1
                    } else if i == j + h && j < h {
                        -1
                    } else {
                        0
                    });
                }
                AffineLattice::solve(&rows, &rhs, size)
            }
        }
    }

    /// Cofactors `C_i` with `det γ = Σ_i C_i γ_{i,n−1}`.
    fn last_column_cofactors(&self) -> Result<Vec<i64>> {
        let n = self.size;
        let last = n - 1;
        (0..n)
            .map(|i| {
                let minor: Vec<Vec<i128>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..last).map(|c| self.m.get(r, c) as i128).collect())
                    .collect();
                let d = bareiss_det(minor)?;
                let signed = if (i + last) % 2 == 0 { d } else { -d };
                i64::try_from(signed).map_err(|_| Error::Overflow)
            })
            .collect()
    }

    /// Columns `0..k` span a primitive sublattice iff the gcd of their
    /// `k × k` minors is one.
    fn prefix_primitive(&self, k: usize) -> bool {
        let n = self.size;
        let mut g: i64 = 0;
        for rows in combinations(n, k) {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|&r| (0..k).map(|c| self.m.get(r, c) as i128).collect())
                .collect();
            let Ok(d) = bareiss_det(minor) else {
                return true;
            };
            g = gcd(g, d as i64);
            if g == 1 {
                return true;
            }
        }
        g == 1
    }

    /// Hadamard bound: with `depth` columns placed and squared budget `left`
    /// for the rest, `vol(prefix) · (left / r)^{r/2} ≥ 1` is necessary for
    /// `|det| = 1`.
    fn hadamard_feasible(&self, depth: usize, left: i64) -> bool {
        let r = (self.size - depth) as f64;
        let cols: Vec<usize> = self.order[..depth].to_vec();
        let gram: Vec<Vec<i128>> = cols
            .iter()
            .map(|&a| {
                cols.iter()
                    .map(|&b| (0..self.size).map(|i| self.m.get(i, a) as i128 * self.m.get(i, b) as i128).sum())
                    .collect()
            })
            .collect();
        let Ok(g) = bareiss_det(gram) else {
            return true;
        };
        let vol = (g as f64).sqrt();
        vol * (left as f64 / r).powf(r / 2.0) >= 1.0 - 1e-9
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Deterministically ordered collection of ball elements (lexicographic on
/// row-major entries).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatrixStream {
    matrices: Vec<IntMatrix>,
}

impl MatrixStream {
    pub fn from_unsorted(mut matrices: Vec<IntMatrix>) -> Self {
        matrices.sort();
        matrices.dedup();
        Self { matrices }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IntMatrix> {
        self.matrices.iter()
    }

    pub fn as_slice(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn into_vec(self) -> Vec<IntMatrix> {
        self.matrices
    }
}

impl<'a> IntoIterator for &'a MatrixStream {
    type Item = &'a IntMatrix;
    type IntoIter = std::slice::Iter<'a, IntMatrix>;
    fn into_iter(self) -> Self::IntoIter {
        self.matrices.iter()
    }
}

pub fn enumerate_sl(query: &BallQuery) -> Result<MatrixStream> {
    if query.group != Group::Sl {
        return Err(Error::InvalidParameter("enumerate_sl needs an SL query".into()));
    }
    BallEnumerator::new(*query)?.collect()
}

pub fn enumerate_sp(query: &BallQuery) -> Result<MatrixStream> {
    if query.group != Group::Sp {
        return Err(Error::InvalidParameter("enumerate_sp needs an Sp query".into()));
    }
    BallEnumerator::new(*query)?.collect()
}

pub fn count_ball(query: &BallQuery) -> Result<u64> {
    BallEnumerator::new(*query)?.count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_radius_budget() {
        assert_eq!(max_sq_below(3f64.sqrt()).unwrap(), 2);
        assert_eq!(max_sq_below(1.7320508).unwrap(), 2);
        assert_eq!(max_sq_below(2.0).unwrap(), 3);
        assert_eq!(max_sq_below(2.5).unwrap(), 6);
        assert_eq!(max_sq_below(1.0).unwrap(), 0);
    }

    #[test]
    fn small_sl2_balls() {
        assert_eq!(count_ball(&BallQuery::sl(2, 1.0).unwrap()).unwrap(), 0);
        let s = enumerate_sl(&BallQuery::sl(2, 3f64.sqrt()).unwrap()).unwrap();
        let got: Vec<String> = s.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, vec!["-1 0 0 -1", "0 -1 1 0", "0 1 -1 0", "1 0 0 1"]);
    }

    #[test]
    fn sl3_radius_two_is_signed_permutations() {
        let s = enumerate_sl(&BallQuery::sl(3, 2.0).unwrap()).unwrap();
        assert_eq!(s.len(), 24);
        for m in &s {
            assert_eq!(m.norm_sq(), 3);
            assert_eq!(m.det().unwrap(), 1);
        }
    }

    #[test]
    fn sl1_and_sp_edge_cases() {
        assert_eq!(count_ball(&BallQuery::sl(1, 1.5).unwrap()).unwrap(), 1);
        assert_eq!(count_ball(&BallQuery::sl(1, 1.0).unwrap()).unwrap(), 0);
        assert_eq!(count_ball(&BallQuery::sp(2, 1.0).unwrap()).unwrap(), 0);
        assert!(enumerate_sl(&BallQuery::sp(1, 2.0).unwrap()).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let e = BallEnumerator::new(BallQuery::sl(2, 40.0).unwrap()).unwrap().with_cap(100);
        assert!(matches!(e.count(), Err(Error::CapExceeded { .. })));
        let e = BallEnumerator::new(BallQuery::sl(3, 6.0).unwrap()).unwrap().with_cap(5000);
        assert!(matches!(e.count(), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn bezout_and_search_agree() {
        for t in [3.0, 5.5, 9.0] {
            let q = BallQuery::sl(2, t).unwrap();
            let a = BallEnumerator::new(q).unwrap().collect().unwrap();
            let b = BallEnumerator::new(q)
                .unwrap()
                .with_sl2_method(Sl2Method::Search)
                .collect()
                .unwrap();
            assert_eq!(a, b);
        }
    }
}
