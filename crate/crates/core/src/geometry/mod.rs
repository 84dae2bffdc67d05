//! Linear algebra over SL(n,R) and Sp(n,R): norms, frame volumes, the
//! Iwasawa-type decompositions and the δ density characters.

mod frame;
mod iwasawa;
mod matrix;
pub mod random;
mod symplectic;

pub use frame::{is_isotropic, symplectic_form, Frame};
pub use iwasawa::{
    delta, iwasawa, iwasawa_modified, qr_positive, split_s, torus, unipotent, DeltaSign,
    IwasawaFactors, ModifiedFactors,
};
pub use matrix::{j_matrix, RealMatrix, MEMBERSHIP_TOL};
pub use symplectic::{symplectic_iwasawa, SymplecticFactors};

/// `‖g‖ = (Σ g_ij²)^{1/2}`.
pub fn frobenius_norm(g: &RealMatrix) -> f64 {
    g.frobenius_norm()
}

/// `√det(ᵗV V)`.
pub fn frame_volume(v: &Frame) -> crate::Result<f64> {
    v.volume()
}
