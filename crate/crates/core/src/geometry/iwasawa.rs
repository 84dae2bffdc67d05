//! Iwasawa decomposition `G = K N A°` of SL(n,R) and the modified
//! decomposition `g = k n⁻ a⁻ g₀ (a⁺ n⁺)^{g₀}` adapted to the stabiliser of
//! a frame.

use crate::error::{Error, Result};
use crate::geometry::matrix::RealMatrix;

/// Thin QR factorisation `g = Q R` with `R` upper triangular with positive
/// diagonal, by modified Gram-Schmidt on the columns with one
/// reorthogonalisation pass.
pub fn qr_positive(g: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let n = g.dim();
    let scale = g.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = RealMatrix::zeros(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let d: f64 = qi.iter().zip(&v).map(|(a, b)| a * b).sum();
                r[(i, j)] += d;
                for (vk, qk) in v.iter_mut().zip(qi) {
                    *vk -= d * qk;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        r[(j, j)] = norm;
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    let mut qm = RealMatrix::zeros(n);
    for (j, col) in q.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            qm[(i, j)] = x;
        }
    }
    Ok((qm, r))
}

/// Strictly upper-triangular entries `(i, j), i < j`, in row-major order.
fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Unit upper-triangular matrix with the given strictly-upper entries.
pub fn unipotent(n: usize, t: &[f64]) -> RealMatrix {
    let mut m = RealMatrix::identity(n);
    for ((i, j), &x) in upper_pairs(n).zip(t) {
        m[(i, j)] = x;
    }
    m
}

/// `a(s) = diag(e^{s_1}, …, e^{s_n})`.
pub fn torus(s: &[f64]) -> RealMatrix {
    RealMatrix::diag(&s.iter().map(|x| x.exp()).collect::<Vec<_>>())
}

/// `g = k · n(t) · a(s)` with `k ∈ SO(n)`, `n(t)` unit upper triangular and
/// `Σ s_i = 0`.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub k: RealMatrix,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
}

impl IwasawaFactors {
    pub fn n_part(&self) -> RealMatrix {
        unipotent(self.k.dim(), &self.t)
    }

    pub fn a_part(&self) -> RealMatrix {
        torus(&self.s)
    }

    pub fn recompose(&self) -> RealMatrix {
        &(&self.k * &self.n_part()) * &self.a_part()
    }
}

pub fn iwasawa(g: &RealMatrix) -> Result<IwasawaFactors> {
    g.check_special_linear()?;
    let n = g.dim();
    let (k, r) = qr_positive(g)?;
    let s: Vec<f64> = (0..n).map(|i| r[(i, i)].ln()).collect();
    let t = upper_pairs(n).map(|(i, j)| r[(i, j)] / r[(j, j)]).collect();
    Ok(IwasawaFactors { k, t, s })
}

/// Which of the two δ characters to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSign {
    Minus,
    Plus,
}

/// `δ_l⁻(s) = exp(Σ_{i≤l} s_i)` or `δ_l⁺(s) = exp(2 Σ_{i>l} (n−i) s_i)`
/// (indices 1-based).
pub fn delta(s: &[f64], l: usize, sign: DeltaSign) -> f64 {
    let n = s.len();
    match sign {
        DeltaSign::Minus => s[..l.min(n)].iter().sum::<f64>().exp(),
        DeltaSign::Plus => {
            let e: f64 = (l..n).map(|i| (n - 1 - i) as f64 * s[i]).sum();
            (2.0 * e).exp()
        }
    }
}

/// Splits `s = s⁻ + s⁺` with `s⁻ = (s_1, …, s_l, r, …, r)`,
/// `r = −(s_1 + … + s_l)/(n − l)`.
pub fn split_s(s: &[f64], l: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = s.len();
    if l == 0 || l >= n {
        return Err(Error::InvalidParameter(format!(
            "split needs 1 <= l < n, got l={l}, n={n}"
        )));
    }
    let head: f64 = s[..l].iter().sum();
    let r = -head / (n - l) as f64;
    let minus: Vec<f64> = (0..n).map(|i| if i < l { s[i] } else { r }).collect();
    let plus = s.iter().zip(&minus).map(|(a, b)| a - b).collect();
    Ok((minus, plus))
}

/// Factors of `g = k n⁻ a(s⁻) g₀ (a(s⁺) n⁺)^{g₀}`.
#[derive(Debug, Clone)]
pub struct ModifiedFactors {
    pub l: usize,
    pub k: RealMatrix,
    /// Entries `t_ij`, `i < j ≤ l`, row-major.
    pub t_minus: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub s_plus: Vec<f64>,
    /// Entries `t_ij`, `i < j`, `j > l`, row-major.
    pub t_plus: Vec<f64>,
    /// Upper-left `l × l` block of `n⁻ a(s⁻)`, row-major.
    pub b_prime: RealMatrix,
    /// `det(b′)^{−1/(n−l)}`.
    pub beta: f64,
    pub g0: RealMatrix,
}

impl ModifiedFactors {
    fn n(&self) -> usize {
        self.k.dim()
    }

    pub fn n_minus(&self) -> RealMatrix {
        let n = self.n();
        let mut m = RealMatrix::identity(n);
        let pairs = upper_pairs(n).filter(|&(_, j)| j < self.l);
        for ((i, j), &x) in pairs.zip(&self.t_minus) {
            m[(i, j)] = x;
        }
        m
    }

    pub fn n_plus(&self) -> RealMatrix {
        let n = self.n();
        let mut m = RealMatrix::identity(n);
        let pairs = upper_pairs(n).filter(|&(_, j)| j >= self.l);
        for ((i, j), &x) in pairs.zip(&self.t_plus) {
            m[(i, j)] = x;
        }
        m
    }

    /// `k n⁻ a(s⁻) g₀ · g₀⁻¹ a(s⁺) n⁺ g₀`.
    pub fn recompose(&self) -> Result<RealMatrix> {
        let y = &(&(&self.k * &self.n_minus()) * &torus(&self.s_minus)) * &self.g0;
        let b = &torus(&self.s_plus) * &self.n_plus();
        let conj = &(&self.g0.inverse()? * &b) * &self.g0;
        Ok(&y * &conj)
    }
}

pub fn iwasawa_modified(g: &RealMatrix, l: usize, g0: &RealMatrix) -> Result<ModifiedFactors> {
    let n = g.dim();
    if g0.dim() != n {
        return Err(Error::DimensionMismatch("g and g0 differ in size".into()));
    }
    g.check_special_linear()?;
    g0.check_special_linear()?;
    // g g₀⁻¹ = k n a with n = n⁻ n′ and n′ a = a (a⁻¹ n′ a) = a n⁺.
    let h = g * &g0.inverse()?;
    let f = iwasawa(&h)?;
    let (s_minus, s_plus) = split_s(&f.s, l)?;
    let nfull = f.n_part();

    let mut n_minus = RealMatrix::identity(n);
    for i in 0..l {
        for j in i + 1..l {
            n_minus[(i, j)] = nfull[(i, j)];
        }
    }
    let n_prime = &n_minus.inverse()? * &nfull;
    let a = torus(&f.s);
    let a_inv = torus(&f.s.iter().map(|x| -x).collect::<Vec<_>>());
    let n_plus = &(&a_inv * &n_prime) * &a;

    let t_minus = upper_pairs(n)
        .filter(|&(_, j)| j < l)
        .map(|(i, j)| nfull[(i, j)])
        .collect();
    let t_plus = upper_pairs(n)
        .filter(|&(_, j)| j >= l)
        .map(|(i, j)| n_plus[(i, j)])
        .collect();

    let mut b_prime = RealMatrix::zeros(l);
    for i in 0..l {
        for j in i..l {
            b_prime[(i, j)] = nfull[(i, j)] * s_minus[j].exp();
        }
    }
    let log_det: f64 = s_minus[..l].iter().sum();
    let beta = (-log_det / (n - l) as f64).exp();

    Ok(ModifiedFactors {
        l,
        k: f.k,
        t_minus,
        s_minus,
        s_plus,
        t_plus,
        b_prime,
        beta,
        g0: g0.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rotation_is_its_own_k() {
        let g = RealMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let f = iwasawa(&g).unwrap();
        assert!(f.k.relative_distance(&g) < 1e-15);
        assert!(close(f.t[0], 0.0, 1e-15));
        assert!(f.s.iter().all(|s| s.abs() < 1e-15));
    }

    #[test]
    fn upper_triangular_input() {
        let g = RealMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 0.5]]).unwrap();
        let f = iwasawa(&g).unwrap();
        assert!(f.k.relative_distance(&RealMatrix::identity(2)) < 1e-15);
        assert!(close(f.t[0], 2.0, 1e-14));
        assert!(close(f.s[0], 2f64.ln(), 1e-15) && close(f.s[1], -(2f64.ln()), 1e-15));
    }

    #[test]
    fn lower_unipotent_by_hand() {
        let g = RealMatrix::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let f = iwasawa(&g).unwrap();
        let h = 0.5f64.sqrt();
        let k = RealMatrix::from_rows(&[&[h, -h], &[h, h]]).unwrap();
        assert!(f.k.relative_distance(&k) < 1e-15);
        assert!(close(f.t[0], 1.0, 1e-14));
        assert!(close(f.s[0], 0.5 * 2f64.ln(), 1e-15));
        assert!(close(f.s[1], -0.5 * 2f64.ln(), 1e-15));
    }

    #[test]
    fn non_sl_input_rejected() {
        let g = RealMatrix::diag(&[2.0, 1.0]);
        assert!(matches!(iwasawa(&g), Err(Error::NotSpecialLinear(_))));
        let z = RealMatrix::zeros(2);
        assert!(iwasawa(&z).is_err());
    }

    #[test]
    fn split_examples() {
        let u = 0.7;
        let (m, p) = split_s(&[u, -u], 1).unwrap();
        assert_eq!(m, vec![u, -u]);
        assert!(p.iter().all(|x| *x == 0.0));
        let (m, p) = split_s(&[0.0, 1.0, -1.0], 1).unwrap();
        assert_eq!(m, vec![0.0, 0.0, 0.0]);
        assert_eq!(p, vec![0.0, 1.0, -1.0]);
        let (m, p) = split_s(&[2.0, 1.0, -3.0], 1).unwrap();
        assert_eq!(m, vec![2.0, -1.0, -1.0]);
        assert_eq!(p, vec![0.0, 2.0, -2.0]);
        assert!(split_s(&[0.0, 0.0], 2).is_err());
    }

    #[test]
    fn delta_examples() {
        let l2 = 2f64.ln();
        assert!(close(delta(&[l2, -l2], 1, DeltaSign::Minus), 2.0, 1e-15));
        let e2 = 2f64.exp();
        assert!(close(delta(&[0.0, 1.0, -1.0], 1, DeltaSign::Plus), e2, 1e-14));
        assert_eq!(delta(&[0.4, -0.4, 0.0, 0.0], 2, DeltaSign::Plus), 1.0);
    }

    #[test]
    fn modified_identity() {
        let e = RealMatrix::identity(3);
        let f = iwasawa_modified(&e, 1, &e).unwrap();
        assert!(f.k.relative_distance(&e) < 1e-15);
        assert_eq!(f.beta, 1.0);
        assert_eq!(f.b_prime, RealMatrix::identity(1));
        assert!(f.t_minus.is_empty());
        assert!(f.t_plus.iter().all(|t| *t == 0.0));
    }

    #[test]
    fn modified_diagonal() {
        let e = RealMatrix::identity(2);
        let g = RealMatrix::diag(&[2.0, 0.5]);
        let f = iwasawa_modified(&g, 1, &e).unwrap();
        let l2 = 2f64.ln();
        assert!(close(f.s_minus[0], l2, 1e-15) && close(f.s_minus[1], -l2, 1e-15));
        assert!(f.s_plus.iter().all(|x| x.abs() < 1e-15));
        assert!(close(f.b_prime[(0, 0)], 2.0, 1e-15));
        assert!(close(f.beta, 0.5, 1e-15));
    }

    #[test]
    fn modified_round_trip_n3() {
        let g = RealMatrix::from_rows(&[&[1.0, 2.0, 0.5], &[-1.0, 0.0, 1.0], &[0.5, 1.0, 2.0]]).unwrap();
        let g = g.scale(g.det().cbrt().recip());
        let g0 = RealMatrix::from_rows(&[&[2.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.5]]).unwrap();
        let g0 = g0.scale(g0.det().cbrt().recip());
        let f = iwasawa_modified(&g, 1, &g0).unwrap();
        assert!(f.recompose().unwrap().relative_distance(&g) < 1e-12);
        assert!(close(f.b_prime.det() * f.beta.powi(2), 1.0, 1e-12));
    }
}
