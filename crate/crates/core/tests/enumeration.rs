//! Enumeration against exhaustive filters, and structural properties of
//! the balls.

use std::collections::BTreeSet;

use orbit_equidist::enumerate::{
    count_ball, enumerate_sl, enumerate_sp, BallEnumerator, BallQuery, IntMatrix, Sl2Method,
};
use proptest::prelude::*;

/// Every integer vector of length `len` with square sum at most `budget`.
fn integer_ball(len: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    fn rec(v: &mut Vec<i64>, len: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
        if v.len() == len {
            f(v);
            return;
        }
        let r = (budget as f64).sqrt() as i64;
        for x in -r..=r {
            v.push(x);
            rec(v, len, budget - x * x, f);
            v.pop();
        }
    }
    rec(&mut Vec::with_capacity(len), len, budget, f);
}

fn strings(ms: impl IntoIterator<Item = IntMatrix>) -> BTreeSet<String> {
    ms.into_iter().map(|m| m.to_string()).collect()
}

fn exhaustive(size: usize, radius: f64, keep: impl Fn(&IntMatrix) -> bool) -> BTreeSet<String> {
    let budget = BallQuery::sl(size, radius).unwrap().max_norm_sq().unwrap();
    let mut out = Vec::new();
    integer_ball(size * size, budget, &mut |v| {
        let m = IntMatrix::from_row_major(size, v.to_vec()).unwrap();
        if keep(&m) {
            out.push(m);
        }
    });
    strings(out)
}

#[test]
fn sl2_matches_triple_loop() {
    for t in [3.0, 6.0, 12.0] {
        let q = BallQuery::sl(2, t).unwrap();
        let bound = q.max_norm_sq().unwrap();
        let r = (bound as f64).sqrt() as i64;
        // a, b, c free; d from ad − bc = 1.
        let mut brute = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let d_candidates: Vec<i64> = if a != 0 {
                        if (1 + b * c) % a == 0 {
                            vec![(1 + b * c) / a]
                        } else {
                            vec![]
                        }
                    } else if b * c == -1 {
                        (-r..=r).collect()
                    } else {
                        vec![]
                    };
                    for d in d_candidates {
                        if a * a + b * b + c * c + d * d <= bound {
                            brute.push(IntMatrix::from_row_major(2, vec![a, b, c, d]).unwrap());
                        }
                    }
                }
            }
        }
        let brute = strings(brute);
        for method in [Sl2Method::Bezout, Sl2Method::Search] {
            let got = BallEnumerator::new(q).unwrap().with_sl2_method(method).collect().unwrap();
            assert_eq!(strings(got.into_vec()), brute, "T = {t}, {method:?}");
        }
    }
}

#[test]
fn sl3_matches_exhaustive_filter() {
    for t in [1.8, 2.0, 2.5, 3.0] {
        let got = strings(enumerate_sl(&BallQuery::sl(3, t).unwrap()).unwrap().into_vec());
        let want = exhaustive(3, t, |m| m.det().unwrap() == 1);
        assert_eq!(got, want, "T = {t}");
    }
    assert_eq!(count_ball(&BallQuery::sl(3, 2.0).unwrap()).unwrap(), 24);
    assert_eq!(count_ball(&BallQuery::sl(2, 3f64.sqrt()).unwrap()).unwrap(), 4);
}

#[test]
fn sp2_matches_exhaustive_filter() {
    for t in [2.0, 2.1, 5f64.sqrt()] {
        let got = strings(enumerate_sp(&BallQuery::sp(2, t).unwrap()).unwrap().into_vec());
        let want = exhaustive(4, t, IntMatrix::is_symplectic);
        assert_eq!(got, want, "T = {t}");
    }
}

#[test]
fn sp1_is_sl2() {
    for t in [2.0, 5.0, 17.5] {
        let sp = enumerate_sp(&BallQuery::sp(1, t).unwrap()).unwrap();
        let sl = enumerate_sl(&BallQuery::sl(2, t).unwrap()).unwrap();
        assert_eq!(sp, sl);
    }
}

fn transpose(m: &IntMatrix) -> IntMatrix {
    let n = m.dim();
    let mut e = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            e.push(m.get(j, i));
        }
    }
    IntMatrix::from_row_major(n, e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_closed_under_transpose_and_sign(n in 2usize..=3, t in 1.0f64..4.5) {
        let s = enumerate_sl(&BallQuery::sl(n, t).unwrap()).unwrap();
        let set: BTreeSet<&IntMatrix> = s.iter().collect();
        for m in &s {
            let tr = transpose(m);
            prop_assert!(set.contains(&tr));
            prop_assert!((m.norm_sq() as f64) < t * t + 1e-9);
            if n % 2 == 0 {
                prop_assert!(set.contains(&m.neg()));
            }
        }
        let sp = enumerate_sp(&BallQuery::sp(2, t.min(3.2)).unwrap()).unwrap();
        let spset: BTreeSet<&IntMatrix> = sp.iter().collect();
        for m in &sp {
            prop_assert!(m.is_symplectic());
            prop_assert!(spset.contains(&transpose(m)) && spset.contains(&m.neg()));
        }
    }

    #[test]
    fn partitions_are_deterministic_and_disjoint(n in 2usize..=3, t in 1.0f64..5.0) {
        let en = BallEnumerator::new(BallQuery::sl(n, t).unwrap()).unwrap();
        let a = en.collect().unwrap();
        let b = en.collect().unwrap();
        prop_assert_eq!(&a, &b);
        let emitted = std::sync::atomic::AtomicU64::new(0);
        let mut seen = BTreeSet::new();
        let mut total = 0usize;
        for p in en.partitions() {
            en.visit_partition(&p, &emitted, |m| {
                total += 1;
                seen.insert(m.clone());
            }).unwrap();
        }
        prop_assert_eq!(total, a.len());
        prop_assert_eq!(seen.len(), a.len());
        prop_assert_eq!(en.count().unwrap() as usize, a.len());
    }

    #[test]
    fn balls_grow_with_radius(t in 1.0f64..8.0, dt in 0.0f64..3.0) {
        let small = count_ball(&BallQuery::sl(2, t).unwrap()).unwrap();
        let big = count_ball(&BallQuery::sl(2, t + dt).unwrap()).unwrap();
        prop_assert!(small <= big);
    }
}
