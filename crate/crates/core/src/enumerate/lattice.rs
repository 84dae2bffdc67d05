//! Integer points of affine lattices `{x ∈ Z^d : A x = b}` inside a
//! Euclidean ball.
//!
//! The solution set is computed by unimodular column reduction of `A`,
//! the kernel basis is LLL-reduced, and points are listed by Fincke-Pohst
//! enumeration around the point of the affine subspace closest to the
//! origin. Floating point only drives the search; every emitted point is
//! checked in exact integer arithmetic.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// `origin + span_Z(basis)`.
#[derive(Debug, Clone)]
pub struct AffineLattice {
    dim: usize,
    origin: Vec<i64>,
    basis: Vec<Vec<i64>>,
}

pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt data: `(b*_i as f64 vectors, |b*_i|², μ_ij for j < i)`.
fn gram_schmidt(basis: &[Vec<i64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let k = basis.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut norms = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    for i in 0..k {
        let bi: Vec<f64> = basis[i].iter().map(|&x| x as f64).collect();
        let mut v = bi.clone();
        for j in 0..i {
            let m = dot(&bi, &star[j]) / norms[j];
            mu[i][j] = m;
            for (vt, st) in v.iter_mut().zip(&star[j]) {
                *vt -= m * st;
            }
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (star, norms, mu)
}

/// Textbook LLL with δ = 0.99 on a small integer basis.
fn lll_reduce(basis: &mut [Vec<i64>]) -> Result<()> {
    let k = basis.len();
    if k < 2 {
        return Ok(());
    }
    let delta = 0.99;
    let (mut _star, mut norms, mut mu) = gram_schmidt(basis);
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Overflow);
        }
        for j in (0..i).rev() {
            let q = mu[i][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (head, tail) = basis.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x = x
                        .checked_sub(qi.checked_mul(*y).ok_or(Error::Overflow)?)
                        .ok_or(Error::Overflow)?;
                }
                (_star, norms, mu) = gram_schmidt(basis);
            }
        }
        if norms[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * norms[i - 1] {
            i += 1;
        } else {
            basis.swap(i, i - 1);
            (_star, norms, mu) = gram_schmidt(basis);
            i = (i - 1).max(1);
        }
    }
    Ok(())
}

impl AffineLattice {
    /// The full lattice `Z^d`.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut e = vec![0; dim];
                e[i] = 1;
                e
            })
            .collect();
        Self {
            dim,
            origin: vec![0; dim],
            basis,
        }
    }

    /// Integer solutions of `A x = b` (`A` given by rows of length `dim`).
    /// Returns `None` when no integer solution exists.
    pub fn solve(rows: &[Vec<i64>], rhs: &[i64], dim: usize) -> Result<Option<Self>> {
        if rows.len() != rhs.len() || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("linear system shape".into()));
        }
        let m = rows.len();
        let mut a: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        // u holds the unimodular column transform, stored by columns.
        let mut u: Vec<Vec<i128>> = (0..dim)
            .map(|c| (0..dim).map(|r| i128::from(r == c)).collect())
            .collect();
        let mut pivots: Vec<Option<usize>> = vec![None; m];
        let mut p = 0usize;
        for r in 0..m {
            if p >= dim {
                break;
            }
            for c in p + 1..dim {
                let (x, y) = (a[r][p], a[r][c]);
                if y == 0 {
                    continue;
                }
                let (g, s, t) = ext_gcd(x, y);
                let (xg, yg) = (x / g, y / g);
                for row in a.iter_mut() {
                    let (cp, cc) = (row[p], row[c]);
                    row[p] = s * cp + t * cc;
                    row[c] = -yg * cp + xg * cc;
                }
                let (cp, cc) = (u[p].clone(), u[c].clone());
                for i in 0..dim {
                    u[p][i] = s
                        .checked_mul(cp[i])
                        .and_then(|v| v.checked_add(t.checked_mul(cc[i])?))
                        .ok_or(Error::Overflow)?;
                    u[c][i] = (-yg)
                        .checked_mul(cp[i])
                        .and_then(|v| v.checked_add(xg.checked_mul(cc[i])?))
                        .ok_or(Error::Overflow)?;
                }
            }
            if a[r][p] != 0 {
                pivots[r] = Some(p);
                p += 1;
            }
        }
        // Forward substitution on the echelon form A U.
        let mut y = vec![0i128; p];
        for r in 0..m {
            let known = match pivots[r] {
                Some(c) => c,
                None => p,
            };
            let mut val = rhs[r] as i128;
            for (c, yc) in y.iter().enumerate().take(known) {
                val -= a[r][c] * yc;
            }
            match pivots[r] {
                Some(c) => {
                    if val % a[r][c] != 0 {
                        return Ok(None);
                    }
                    y[c] = val / a[r][c];
                }
                None => {
                    if val != 0 {
                        return Ok(None);
                    }
                }
            }
        }
        let mut origin = vec![0i128; dim];
        for (c, yc) in y.iter().enumerate() {
            for i in 0..dim {
                origin[i] += u[c][i] * yc;
            }
        }
        let mut basis: Vec<Vec<i64>> = u[p..]
            .iter()
            .map(|col| col.iter().map(|&x| to_i64(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        lll_reduce(&mut basis)?;
        let origin = origin.into_iter().map(to_i64).collect::<Result<Vec<_>>>()?;
        let mut lat = Self { dim, origin, basis };
        lat.reduce_origin()?;
        Ok(Some(lat))
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    /// Babai rounding of the origin against the reduced basis.
    fn reduce_origin(&mut self) -> Result<()> {
        let (star, norms, _) = gram_schmidt(&self.basis);
        for i in (0..self.basis.len()).rev() {
            let o: Vec<f64> = self.origin.iter().map(|&x| x as f64).collect();
            let q = (dot(&o, &star[i]) / norms[i]).round() as i64;
            if q != 0 {
                for (x, b) in self.origin.iter_mut().zip(&self.basis[i]) {
                    *x = x.checked_sub(q.checked_mul(*b).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                }
            }
        }
        Ok(())
    }

    /// Calls `f` on every lattice point `x` with `|x|² ≤ bound`. Stops early
    /// if `f` breaks.
    pub fn for_each_in_ball<F>(&self, bound: i64, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        if bound < 0 {
            return ControlFlow::Continue(());
        }
        let k = self.basis.len();
        let mut x = self.origin.clone();
        if k == 0 {
            return if sq_norm(&x) <= bound as i128 {
                f(&x)
            } else {
                ControlFlow::Continue(())
            };
        }
        let (star, norms, mu) = gram_schmidt(&self.basis);
        let o: Vec<f64> = self.origin.iter().map(|&v| v as f64).collect();
        let xi: Vec<f64> = (0..k).map(|i| dot(&o, &star[i]) / norms[i]).collect();
        let perp = dot(&o, &o) - (0..k).map(|i| xi[i] * xi[i] * norms[i]).sum::<f64>();
        let slack = 0.5 + 1e-7 * bound as f64;
        let budget = bound as f64 + slack - perp.max(0.0);
        if budget < 0.0 {
            return ControlFlow::Continue(());
        }
        let mut z = vec![0i64; k];
        let search = Search {
            k,
            norms: &norms,
            mu: &mu,
            xi: &xi,
            basis: &self.basis,
            bound: bound as i128,
        };
        search.level(k - 1, budget, &mut z, &mut x, &mut f)
    }
}

fn sq_norm(x: &[i64]) -> i128 {
    x.iter().map(|&v| (v as i128) * (v as i128)).sum()
}

struct Search<'a> {
    k: usize,
    norms: &'a [f64],
    mu: &'a [Vec<f64>],
    xi: &'a [f64],
    basis: &'a [Vec<i64>],
    bound: i128,
}

impl Search<'_> {
    fn level<F>(&self, i: usize, rem: f64, z: &mut [i64], x: &mut [i64], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        let mut c = -self.xi[i];
        for j in i + 1..self.k {
            c -= self.mu[j][i] * z[j] as f64;
        }
        let w = (rem.max(0.0) / self.norms[i]).sqrt() + 1e-9;
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for zi in lo..=hi {
            let d = zi as f64 - c;
            let r = rem - d * d * self.norms[i];
            if r < 0.0 {
                continue;
            }
            // x tracks origin + Σ z_j b_j incrementally.
            let delta = zi - z[i];
            if delta != 0 {
                for (xt, bt) in x.iter_mut().zip(&self.basis[i]) {
                    *xt += delta * bt;
                }
                z[i] = zi;
            }
            if i == 0 {
                if sq_norm(x) <= self.bound {
                    f(x)?;
                }
            } else {
                self.level(i - 1, r, z, x, f)?;
            }
        }
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(lat: &AffineLattice, bound: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let _ = lat.for_each_in_ball(bound, |x| {
            out.push(x.to_vec());
            ControlFlow::Continue(())
        });
        out.sort();
        out
    }

    fn brute(rows: &[Vec<i64>], rhs: &[i64], dim: usize, bound: i64) -> Vec<Vec<i64>> {
        let r = (bound as f64).sqrt() as i64 + 1;
        let mut out = Vec::new();
        let mut x = vec![-r; dim];
        loop {
            if sq_norm(&x) <= bound as i128
                && rows
                    .iter()
                    .zip(rhs)
                    .all(|(row, &b)| row.iter().zip(&x).map(|(a, v)| a * v).sum::<i64>() == b)
            {
                out.push(x.clone());
            }
            let mut i = 0;
            loop {
                if i == dim {
                    out.sort();
                    return out;
                }
                x[i] += 1;
                if x[i] > r {
                    x[i] = -r;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn full_lattice_ball() {
        let lat = AffineLattice::full(3);
        assert_eq!(collect(&lat, 1).len(), 7);
        assert_eq!(collect(&lat, 9), brute(&[], &[], 3, 9));
    }

    #[test]
    fn single_equation_matches_brute_force() {
        for (c, b) in [(vec![3, -5, 7], 1), (vec![0, 4, 6], 2), (vec![12, 18, 0], 6), (vec![2, 4, 6], 1)] {
            let lat = AffineLattice::solve(std::slice::from_ref(&c), &[b], 3).unwrap();
            let want = brute(std::slice::from_ref(&c), &[b], 3, 60);
            match lat {
                Some(l) => assert_eq!(collect(&l, 60), want, "c={c:?}"),
                None => assert!(want.is_empty(), "c={c:?}"),
            }
        }
    }

    #[test]
    fn two_equations_match_brute_force() {
        let rows = vec![vec![1, 2, -1, 3], vec![0, 1, 1, -2]];
        let rhs = [1, 0];
        let lat = AffineLattice::solve(&rows, &rhs, 4).unwrap().unwrap();
        assert_eq!(lat.rank(), 2);
        assert_eq!(collect(&lat, 40), brute(&rows, &rhs, 4, 40));
        let dependent = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert!(AffineLattice::solve(&dependent, &[1, 3], 3).unwrap().is_none());
        let lat = AffineLattice::solve(&dependent, &[1, 2], 3).unwrap().unwrap();
        assert_eq!(collect(&lat, 30), brute(&dependent, &[1, 2], 3, 30));
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(240, 46), (-7, 3), (0, 5), (5, 0), (-4, -6)] {
            let (g, s, t) = ext_gcd(a, b);
            assert_eq!(s * a + t * b, g);
            assert!(g >= 0);
        }
        assert_eq!(gcd(-12, 18), 6);
    }
}
