//! Seeded random elements of SL(n,R) and Sp(n,R) for property checks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::matrix::RealMatrix;

/// Gaussian matrix rescaled to determinant one (a row is negated first if
/// the determinant is negative).
pub fn random_sl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    loop {
        let data: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
        let mut g = RealMatrix::from_row_major(n, data).expect("finite entries");
        let d = g.det();
        if d.abs() < 1e-3 {
            continue;
        }
        if d < 0.0 {
            for j in 0..n {
                g[(0, j)] = -g[(0, j)];
            }
        }
        return g.scale(d.abs().powf(-1.0 / n as f64));
    }
}

/// A random rotation from the QR of a Gaussian matrix, forced into SO(n).
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    let g = random_sl(n, rng);
    super::qr_positive(&g).expect("random_sl is invertible").0
}

/// Product of `len` random generators of Sp(n,R): symmetric shears
/// `(E S; 0 E)` and `(E 0; S E)`, Levi elements `diag(A, ᵗA⁻¹)` and `J`.
pub fn random_sp_word<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> RealMatrix {
    let mut g = RealMatrix::identity(2 * n);
    let coin = Uniform::new(0u8, 4).expect("valid range");
    for _ in 0..len {
        let gen = match coin.sample(rng) {
            0 | 1 => {
                let mut m = RealMatrix::identity(2 * n);
                let upper = coin.sample(rng) % 2 == 0;
                for i in 0..n {
                    for j in i..n {
                        let z: f64 = StandardNormal.sample(rng);
                        let x = 0.7 * z;
                        let (r, c) = if upper { (i, j + n) } else { (i + n, j) };
                        m[(r, c)] = x;
                        let (r, c) = if upper { (j, i + n) } else { (j + n, i) };
                        m[(r, c)] = x;
                    }
                }
                m
            }
            2 => {
                let a = random_sl(n, rng);
                let a_inv_t = a.inverse().expect("invertible").transpose();
                let mut m = RealMatrix::zeros(2 * n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = a[(i, j)];
                        m[(i + n, j + n)] = a_inv_t[(i, j)];
                    }
                }
                m
            }
            _ => super::j_matrix(n),
        };
        g = &g * &gen;
    }
    g
}
