//! Iwasawa decomposition `g = k b g₀ n₊^{g₀}` of Sp(n,R), with
//! `k ∈ Sp ∩ SO(2n)`, `b ∈ B = N₋A` and `n₊ ∈ N₊`.
//!
//! Conjugating by the permutation that reverses coordinates `n+1..2n` turns
//! `B N₊` into upper-triangular matrices of SL(2n,R), so the factors come
//! out of one positive-diagonal QR of `g g₀⁻¹ P`.

use crate::error::{Error, Result};
use crate::geometry::iwasawa::qr_positive;
use crate::geometry::matrix::RealMatrix;

#[derive(Debug, Clone)]
pub struct SymplecticFactors {
    pub k: RealMatrix,
    /// Unit upper-triangular `n × n` block of `b`.
    pub m: RealMatrix,
    /// Positive diagonal of the `A` block.
    pub a: Vec<f64>,
    /// Symmetric `n × n` block of `n₊`.
    pub s: RealMatrix,
    pub g0: RealMatrix,
}

fn embed_blocks(ul: &RealMatrix, ur: &RealMatrix, lr: &RealMatrix) -> RealMatrix {
    let n = ul.dim();
    let mut out = RealMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = ul[(i, j)];
            out[(i, j + n)] = ur[(i, j)];
            out[(i + n, j + n)] = lr[(i, j)];
        }
    }
    out
}

impl SymplecticFactors {
    fn half(&self) -> usize {
        self.m.dim()
    }

    /// `b = diag(M A, ᵗ(M A)⁻¹)`.
    pub fn b(&self) -> RealMatrix {
        let ma = &self.m * &RealMatrix::diag(&self.a);
        let lr = ma
            .inverse()
            .expect("M A is invertible by construction")
            .transpose();
        embed_blocks(&ma, &RealMatrix::zeros(self.half()), &lr)
    }

    /// `n₊ = (E S; 0 E)`.
    pub fn n_plus(&self) -> RealMatrix {
        let e = RealMatrix::identity(self.half());
        embed_blocks(&e, &self.s, &e)
    }

    pub fn recompose(&self) -> Result<RealMatrix> {
        let conj = &(&self.g0.inverse()? * &self.n_plus()) * &self.g0;
        Ok(&(&(&self.k * &self.b()) * &self.g0) * &conj)
    }
}

/// Permutation matrix reversing the coordinates `n..2n`.
fn reversal(n: usize) -> RealMatrix {
    let mut p = RealMatrix::zeros(2 * n);
    for i in 0..n {
        p[(i, i)] = 1.0;
        p[(n + i, 2 * n - 1 - i)] = 1.0;
    }
    p
}

pub fn symplectic_iwasawa(g: &RealMatrix, g0: &RealMatrix) -> Result<SymplecticFactors> {
    if g.dim() != g0.dim() {
        return Err(Error::DimensionMismatch("g and g0 differ in size".into()));
    }
    g.check_symplectic()?;
    g0.check_symplectic()?;
    let n = g.dim() / 2;
    // g = k b g₀ g₀⁻¹ n₊ g₀ = k (b n₊) g₀.
    let h = g * &g0.inverse()?;
    let p = reversal(n);
    let (q, r) = qr_positive(&(&h * &p))?;
    let k = &q * &p;
    let u = &(&p * &r) * &p;

    let mut x = RealMatrix::zeros(n);
    let mut y = RealMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] = u[(i, j)];
            y[(i, j)] = u[(i, j + n)];
        }
    }
    let a: Vec<f64> = (0..n).map(|i| x[(i, i)]).collect();
    let m = &x * &RealMatrix::diag(&a.iter().map(|v| v.recip()).collect::<Vec<_>>());
    let s = &x.inverse()? * &y;

    let f = SymplecticFactors {
        k,
        m,
        a,
        s,
        g0: g0.clone(),
    };
    f.k.check_symplectic()?;
    f.b().check_symplectic()?;
    f.n_plus().check_symplectic()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_decomposes_trivially() {
        let e = RealMatrix::identity(4);
        let f = symplectic_iwasawa(&e, &e).unwrap();
        assert!(f.k.relative_distance(&e) < 1e-15);
        assert!(f.b().relative_distance(&e) < 1e-15);
        assert!(f.s.frobenius_norm() < 1e-15);
    }

    #[test]
    fn n1_unipotent_and_torus() {
        let e = RealMatrix::identity(2);
        let g = RealMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let f = symplectic_iwasawa(&g, &e).unwrap();
        assert!(f.k.relative_distance(&e) < 1e-15);
        assert!(f.b().relative_distance(&e) < 1e-15);
        assert!((f.s[(0, 0)] - 1.0).abs() < 1e-15);

        let g = RealMatrix::diag(&[2.0, 0.5]);
        let f = symplectic_iwasawa(&g, &e).unwrap();
        assert!(f.k.relative_distance(&e) < 1e-15);
        assert!(f.b().relative_distance(&g) < 1e-15);
        assert!(f.s.frobenius_norm() < 1e-15);
    }

    #[test]
    fn rejects_non_symplectic() {
        let g = RealMatrix::diag(&[2.0, 1.0, 1.0, 1.0]);
        let e = RealMatrix::identity(4);
        assert!(matches!(symplectic_iwasawa(&g, &e), Err(Error::NotSymplectic(_))));
    }
}
