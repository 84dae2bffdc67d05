//! l-frames in R^n and the symplectic form on R^{2n}.

use crate::error::{Error, Result};
use crate::geometry::matrix::RealMatrix;

/// An `n × l` real matrix whose columns are the frame vectors.
///
/// Coordinates are stored column-major: `(v_1, …, v_l)` flattened, which is
/// also the coordinate order used by regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    n: usize,
    l: usize,
    coords: Vec<f64>,
}

impl Frame {
    pub fn new(n: usize, l: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 || l == 0 || l > n {
            return Err(Error::InvalidParameter(format!(
                "frame shape n={n}, l={l} requires 1 <= l <= n"
            )));
        }
        if coords.len() != n * l {
            return Err(Error::DimensionMismatch(format!(
                "frame {n}x{l} needs {} coordinates, got {}",
                n * l,
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite frame coordinate".into()));
        }
        Ok(Self { n, l, coords })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let l = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("ragged frame columns".into()));
        }
        Self::new(n, l, columns.concat())
    }

    /// The standard frame `(e_1, …, e_l)` of R^n.
    pub fn standard(n: usize, l: usize) -> Result<Self> {
        let mut coords = vec![0.0; n * l];
        for i in 0..l.min(n) {
            coords[i * n + i] = 1.0;
        }
        Self::new(n, l, coords)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    /// Gram matrix `ᵗV V` in row-major order.
    pub fn gram(&self) -> Vec<f64> {
        let l = self.l;
        let mut g = vec![0.0; l * l];
        for i in 0..l {
            for j in i..l {
                let d: f64 = self.column(i).iter().zip(self.column(j)).map(|(a, b)| a * b).sum();
                g[i * l + j] = d;
                g[j * l + i] = d;
            }
        }
        g
    }

    /// The `l`-dimensional volume `√det(ᵗV V)` of the parallelepiped spanned
    /// by the columns.
    pub fn volume(&self) -> Result<f64> {
        let l = self.l;
        let gram = RealMatrix::from_row_major(l, self.gram())?;
        let det = gram.det();
        let scale = self.coords.iter().map(|x| x * x).sum::<f64>().powi(l as i32);
        if det <= 1e-12 * scale || det <= 0.0 {
            return Err(Error::DegenerateFrame(det));
        }
        Ok(det.sqrt())
    }

    /// `g · v = (g v_1, …, g v_l)`.
    pub fn transform(&self, g: &RealMatrix) -> Result<Frame> {
        if g.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot act on R^{}",
                g.dim(),
                g.dim(),
                self.n
            )));
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in 0..self.l {
            coords.extend(g.mul_vec(self.column(c)));
        }
        Ok(Frame {
            n: self.n,
            l: self.l,
            coords,
        })
    }

    /// Euclidean norm of the coordinate vector; for `l = 1` this is `‖v‖`.
    pub fn coordinate_norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `ᵗx J y` for the standard symplectic `J` on R^{2n}.
pub fn symplectic_form(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "symplectic form needs equal even dimensions, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() / 2;
    Ok((0..n).map(|i| x[i] * y[i + n] - x[i + n] * y[i]).sum())
}

/// True iff `|ᵗv_i J v_j| ≤ tol` for every pair of frame vectors.
/// Frames in odd dimension are never isotropic.
pub fn is_isotropic(v: &Frame, tol: f64) -> bool {
    if v.ambient_dim() % 2 != 0 {
        return false;
    }
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            match symplectic_form(v.column(i), v.column(j)) {
                Ok(w) if w.abs() <= tol => {}
                _ => return false,
            }
        }
    }
    true
}
