//! Symplectic eigenvalues from the spectrum of `Ω V`.

use nalgebra::Matrix4;

use crate::covariance::CovarianceMatrix;
use crate::info::SymplecticPair;

/// The 4×4 symplectic form with 2×2 blocks `[[0, 1], [-1, 0]]`.
pub fn omega() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// Moduli of the eigenvalues of `Ω V`; they come in pairs `±i d`.
pub fn symplectic_eigenvalues_eigen(v: &CovarianceMatrix) -> SymplecticPair {
    let m = omega() * v.as_matrix();
    let mut mods: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| a.total_cmp(b));
    let d_minus = 0.5 * (mods[0] + mods[1]);
    let d_plus = 0.5 * (mods[2] + mods[3]);
    let delta = v.det_a1() + v.det_a2() + 2.0 * v.det_c();
    SymplecticPair { d_plus, d_minus, discriminant: delta }
}
