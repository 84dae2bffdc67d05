//! Dense square matrices over the reals, stored row-major.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};

/// Tolerance for SL(n,R) and Sp(n,R) membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "vector dimension mismatch");
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Hilbert-Schmidt norm `(sum g_ij^2)^{1/2}`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// LU factorisation with partial pivoting. Returns the permuted
    /// combined LU storage and the sign of the permutation, or `None` if a
    /// pivot vanishes exactly.
    fn lu(&self) -> Option<(Vec<f64>, f64)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some((a, sign))
    }

    pub fn det(&self) -> f64 {
        match self.lu() {
            None => 0.0,
            Some((a, sign)) => (0..self.n).map(|i| a[i * self.n + i]).product::<f64>() * sign,
        }
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k].abs() <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= piv;
                inv[k * n + j] /= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] -= f * a[k * n + j];
                    inv[i * n + j] -= f * inv[k * n + j];
                }
            }
        }
        Ok(Self { n, data: inv })
    }

    /// `|det g - 1|`, the defect from SL(n,R).
    pub fn sl_defect(&self) -> f64 {
        (self.det() - 1.0).abs()
    }

    pub fn check_special_linear(&self) -> Result<()> {
        let d = self.sl_defect();
        if d <= MEMBERSHIP_TOL {
            Ok(())
        } else {
            Err(Error::NotSpecialLinear(d))
        }
    }

    /// `‖ᵗg J g − J‖ / max(1, ‖g‖²)`, the relative defect from Sp(n,R).
    /// Odd dimensions are never symplectic and report infinity.
    pub fn symplectic_defect(&self) -> f64 {
        if self.n % 2 != 0 {
            return f64::INFINITY;
        }
        let j = j_matrix(self.n / 2);
        let lhs = &(&self.transpose() * &j) * self;
        let scale = self.frobenius_norm().powi(2).max(1.0);
        lhs.sub(&j).frobenius_norm() / scale
    }

    pub fn check_symplectic(&self) -> Result<()> {
        let d = self.symplectic_defect();
        if d <= MEMBERSHIP_TOL {
            Ok(())
        } else {
            Err(Error::NotSymplectic(d))
        }
    }

    /// Largest entrywise deviation from `ᵗg g = E`.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = &self.transpose() * self;
        p.sub(&Self::identity(self.n))
            .data
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `‖self − other‖ / ‖other‖`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm() / other.frobenius_norm().max(f64::MIN_POSITIVE)
    }
}

/// The standard symplectic matrix `J = (0 E; −E 0)` of size `2n`.
pub fn j_matrix(n: usize) -> RealMatrix {
    let mut j = RealMatrix::zeros(2 * n);
    for i in 0..n {
        j[(i, i + n)] = 1.0;
        j[(i + n, i)] = -1.0;
    }
    j
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &RealMatrix {
    type Output = RealMatrix;
    fn mul(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RealMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:+.6e}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert!((RealMatrix::identity(2).frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert!((RealMatrix::identity(5).frobenius_norm() - 5f64.sqrt()).abs() < 1e-15);
        let g = RealMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 0.5]]).unwrap();
        assert!((g.frobenius_norm() - 5.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_det() {
        let g = RealMatrix::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]).unwrap();
        let inv = g.inverse().unwrap();
        assert!((&g * &inv).relative_distance(&RealMatrix::identity(3)) < 1e-14);
        assert!((g.det() - 18.0).abs() < 1e-12);
        let s = RealMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(s.inverse(), Err(Error::Singular));
        assert_eq!(s.det(), 0.0);
    }

    #[test]
    fn j_is_symplectic_and_rejects_odd() {
        let j = j_matrix(3);
        assert!(j.symplectic_defect() < 1e-15);
        assert!(RealMatrix::identity(3).symplectic_defect().is_infinite());
        assert!(RealMatrix::diag(&[2.0, 1.0]).check_symplectic().is_err());
    }
}
