use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::RealMatrix;

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_row_major(n: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub(crate) fn set_column(&mut self, j: usize, col: &[i64]) {
        for (i, &v) in col.iter().enumerate() {
            self.entries[i * self.n + j] = v;
        }
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// `Σ γ_ij²`, exact.
    pub fn norm_sq(&self) -> i128 {
        self.entries.iter().map(|&x| (x as i128) * (x as i128)).sum()
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_row_major(self.n, self.entries.iter().map(|&x| x as f64).collect())
            .expect("square by construction")
    }

    /// `γ v` in floating point.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.entries[i * n..(i + 1) * n];
            *o = row.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum();
        }
    }

    /// Exact determinant.
    pub fn det(&self) -> Result<i128> {
        let rows: Vec<Vec<i128>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) as i128).collect())
            .collect();
        bareiss_det(rows)
    }

    /// Exact test of `ᵗγ J γ = J`.
    pub fn is_symplectic(&self) -> bool {
        if self.n % 2 != 0 {
            return false;
        }
        let h = self.n / 2;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc: i128 = 0;
                for k in 0..h {
                    acc += self.get(k, i) as i128 * self.get(k + h, j) as i128;
                    acc -= self.get(k + h, i) as i128 * self.get(k, j) as i128;
                }
                let want = if j == i + h && i < h {
                    1
                } else if i == j + h && j < h {
                    -1
                } else {
                    0
                };
                if acc != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Fraction-free Gaussian elimination.
pub(crate) fn bareiss_det(mut a: Vec<Vec<i128>>) -> Result<i128> {
    let n = a.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(Error::Overflow)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

impl fmt::Display for IntMatrix {
    /// Row-major, space separated, one matrix per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_symplectic() {
        let m = IntMatrix::from_row_major(3, vec![2, 3, 0, 1, 2, 0, 0, 5, 1]).unwrap();
        assert_eq!(m.det().unwrap(), 1);
        let s = IntMatrix::from_row_major(2, vec![0, 1, -1, 0]).unwrap();
        assert!(s.is_symplectic());
        assert_eq!(s.det().unwrap(), 1);
        assert!(!IntMatrix::from_row_major(2, vec![2, 0, 0, 1]).unwrap().is_symplectic());
        let zero_pivot = IntMatrix::from_row_major(3, vec![0, 1, 0, 1, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(zero_pivot.det().unwrap(), -1);
        assert_eq!(m.to_string(), "2 3 0 1 2 0 0 5 1");
    }
}
