//! Finite-height search for nonzero integer vectors in `span(v)`.
//!
//! Pick the `l` rows of `V` with the largest minor; every vector of the span
//! is determined by those `l` coordinates, so the search runs over the
//! `(2h+1)^l` choices of them and reads off the only integer candidates for
//! the remaining coordinates. A `None` result certifies absence up to the
//! height only.

use crate::geometry::{Frame, RealMatrix};

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Euclidean distance from `q` to `span(v)`, via least squares on the Gram
/// system.
fn distance_to_span(v: &Frame, gram_inv: &RealMatrix, q: &[f64]) -> f64 {
    let l = v.len();
    let vq: Vec<f64> = (0..l)
        .map(|j| v.column(j).iter().zip(q).map(|(a, b)| a * b).sum())
        .collect();
    let c = gram_inv.mul_vec(&vq);
    let mut d2 = 0.0;
    for (i, &qi) in q.iter().enumerate() {
        let proj: f64 = (0..l).map(|j| v.column(j)[i] * c[j]).sum();
        d2 += (qi - proj).powi(2);
    }
    d2.sqrt()
}

/// Smallest (by `‖q‖_∞`, then lexicographically) nonzero integer vector with
/// `‖q‖_∞ ≤ height` and distance at most `tol` from `span(v)`, normalised so
/// its first nonzero entry is positive.
pub fn rational_in_span(v: &Frame, height: u64, tol: f64) -> Option<Vec<i64>> {
    let n = v.ambient_dim();
    let l = v.len();
    let h = height as i64;
    if h < 1 {
        return None;
    }
    let gram = RealMatrix::from_row_major(l, v.gram()).ok()?;
    let gram_inv = gram.inverse().ok()?;
    if l == n {
        let mut e = vec![0; n];
        e[n - 1] = 1;
        return Some(e);
    }

    let row_minor = |rows: &[usize]| -> f64 {
        let data: Vec<f64> = rows
            .iter()
            .flat_map(|&r| (0..l).map(move |j| v.column(j)[r]))
            .collect();
        RealMatrix::from_row_major(l, data).map_or(0.0, |m| m.det().abs())
    };
    let sub = combinations(n, l)
        .into_iter()
        .max_by(|a, b| row_minor(a).total_cmp(&row_minor(b)))?;
    let rest: Vec<usize> = (0..n).filter(|i| !sub.contains(i)).collect();

    // Span vectors satisfy x_rest = M x_sub with M = V_rest V_sub⁻¹.
    let v_sub = RealMatrix::from_row_major(
        l,
        sub.iter()
            .flat_map(|&r| (0..l).map(move |j| v.column(j)[r]))
            .collect(),
    )
    .ok()?;
    let v_sub_inv = v_sub.inverse().ok()?;
    let m: Vec<Vec<f64>> = rest
        .iter()
        .map(|&r| {
            (0..l)
                .map(|k| (0..l).map(|j| v.column(j)[r] * v_sub_inv[(j, k)]).sum())
                .collect()
        })
        .collect();
    let m_norm = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let window = tol * (m_norm + 1.0);

    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut q_sub = vec![-h; l];
    let mut q = vec![0i64; n];
    let mut qf = vec![0.0; n];
    loop {
        if q_sub.iter().any(|&x| x != 0) {
            let centers: Vec<f64> = m
                .iter()
                .map(|row| row.iter().zip(&q_sub).map(|(a, &b)| a * b as f64).sum())
                .collect();
            let ranges: Vec<(i64, i64)> = centers
                .iter()
                .map(|&c| ((c - window).ceil() as i64, (c + window).floor() as i64))
                .collect();
            if ranges.iter().all(|&(lo, hi)| lo <= hi && hi >= -h && lo <= h) {
                for (k, &r) in sub.iter().enumerate() {
                    q[r] = q_sub[k];
                }
                visit_box(&ranges, h, 0, &rest, &mut q, &mut |q| {
                    for (f, &x) in qf.iter_mut().zip(q.iter()) {
                        *f = x as f64;
                    }
                    if distance_to_span(v, &gram_inv, &qf) <= tol {
                        let mut cand = q.to_vec();
                        if cand.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                            cand.iter_mut().for_each(|x| *x = -*x);
                        }
                        let norm = cand.iter().map(|x| x.abs()).max().unwrap_or(0);
                        let better = match &best {
                            None => true,
                            Some((bn, bq)) => (norm, &cand) < (*bn, bq),
                        };
                        if better {
                            best = Some((norm, cand));
                        }
                    }
                });
            }
        }
        let Some(i) = (0..l).rev().find(|&i| q_sub[i] < h) else {
            break;
        };
        q_sub[i] += 1;
        for x in q_sub.iter_mut().skip(i + 1) {
            *x = -h;
        }
    }
    best.map(|(_, q)| q)
}

fn visit_box<F: FnMut(&[i64])>(
    ranges: &[(i64, i64)],
    h: i64,
    k: usize,
    rest: &[usize],
    q: &mut [i64],
    f: &mut F,
) {
    if k == ranges.len() {
        f(q);
        return;
    }
    let (lo, hi) = ranges[k];
    for x in lo.max(-h)..=hi.min(h) {
        q[rest[k]] = x;
        visit_box(ranges, h, k + 1, rest, q, f);
    }
}
