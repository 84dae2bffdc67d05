//! Lattice elements in Frobenius-norm balls, their orbit points, and the
//! rational-vector density certificate.

mod ball;
mod int_matrix;
mod lattice;
mod span;

pub use ball::{
    count_ball, enumerate_sl, enumerate_sp, BallEnumerator, BallQuery, Group, MatrixStream,
    Partition, Sl2Method, DEFAULT_CAP,
};
pub use int_matrix::IntMatrix;
pub use lattice::AffineLattice;
pub use span::rational_in_span;

use crate::error::{Error, Result};
use crate::geometry::Frame;

/// Writes the column-major coordinates of `γ · v0` into `out`.
pub fn orbit_point_into(gamma: &IntMatrix, v0: &Frame, out: &mut [f64]) {
    let n = v0.ambient_dim();
    for c in 0..v0.len() {
        gamma.apply(v0.column(c), &mut out[c * n..(c + 1) * n]);
    }
}

/// `γ · v0` for every `γ` of the stream, in stream order.
pub fn orbit_points(v0: &Frame, stream: &MatrixStream) -> Result<Vec<Frame>> {
    let n = v0.ambient_dim();
    let mut buf = vec![0.0; n * v0.len()];
    stream
        .iter()
        .map(|g| {
            if g.dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} matrix cannot act on R^{n}",
                    g.dim(),
                    g.dim()
                )));
            }
            orbit_point_into(g, v0, &mut buf);
            Frame::new(n, v0.len(), buf.clone())
        })
        .collect()
}
