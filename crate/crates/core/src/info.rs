//! Gaussian information quantities: symplectic eigenvalues, entropies, key rate.
//!
//! All quantities are in nats.

use crate::covariance::{apply_cloner_to_covariance, covariance_matrix_exact, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::model::{ClonerParams, LinkParams, SourceParams};

/// Symplectic eigenvalues of a two-mode covariance matrix (vacuum value ¼).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPair {
    pub d_plus: f64,
    pub d_minus: f64,
    /// `Δ = det A1 + det A2 + 2 det C`.
    pub discriminant: f64,
}

/// `d±² = (Δ ± √(Δ² - 4 det V)) / 2`.
///
/// The radicand is evaluated as `tr(P²)` with `P = (ΩV)² + Δ/2`, which equals `Δ² - 4 det V`
/// but goes to zero entrywise as `d+ → d-`. `d-²` is taken as `det V / d+²`.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<SymplecticPair> {
    let delta = v.det_a1() + v.det_a2() + 2.0 * v.det_c();
    let det = v.det();
    let rad = radicand(v, delta);
    let scale = delta * delta;
    if rad < -1e-12 * scale.max(1.0) {
        return Err(Error::Physicality(format!("negative radicand {rad:e} in symplectic spectrum")));
    }
    let plus_sq = 0.5 * (delta + rad.max(0.0).sqrt());
    if !(plus_sq > 0.0) || !(det > 0.0) {
        return Err(Error::Physicality(format!("det V = {det:e}, Δ = {delta:e}")));
    }
    Ok(SymplecticPair { d_plus: plus_sq.sqrt(), d_minus: (det / plus_sq).sqrt(), discriminant: delta })
}

fn radicand(v: &CovarianceMatrix, delta: f64) -> f64 {
    let m = v.as_matrix();
    // Ω V swaps rows within each mode and negates the second of each pair.
    let mut ov = m;
    for (r, s) in [(0, 1), (2, 3)] {
        for c in 0..4 {
            ov[(r, c)] = m[(s, c)];
            ov[(s, c)] = -m[(r, c)];
        }
    }
    let mut p = ov * ov;
    for i in 0..4 {
        p[(i, i)] += 0.5 * delta;
    }
    (p * p).trace()
}

/// The nested-root expression `d± = √((Δ ± √(Δ² - √(Δ² - 4 det V)))/2)`, kept for comparison.
///
/// Returns `None` where a radicand is negative.
pub fn symplectic_eigenvalues_printed(v: &CovarianceMatrix) -> Option<SymplecticPair> {
    let delta = v.det_a1() + v.det_a2() + 2.0 * v.det_c();
    let inner = delta * delta - 4.0 * v.det();
    if inner < 0.0 {
        return None;
    }
    let mid = delta * delta - inner.sqrt();
    if mid < 0.0 {
        return None;
    }
    let p = 0.5 * (delta + mid.sqrt());
    let m = 0.5 * (delta - mid.sqrt());
    (p >= 0.0 && m >= 0.0).then(|| SymplecticPair { d_plus: p.sqrt(), d_minus: m.sqrt(), discriminant: delta })
}

/// Tolerance below ¼ accepted as vacuum rounding.
const VACUUM_SLACK: f64 = 1e-9;

/// Von Neumann entropy of a single-mode Gaussian with symplectic eigenvalue `x`
/// (vacuum ¼): `g(ν) = (ν+½)ln(ν+½) - (ν-½)ln(ν-½)` with `ν = 2x`.
pub fn entropy_h(x: f64) -> Result<f64> {
    if !(x >= 0.25 - VACUUM_SLACK) || !x.is_finite() {
        return Err(Error::domain(format!("entropy argument must be >= 1/4, got {x}")));
    }
    let nu = (2.0 * x).max(0.5);
    let lo = nu - 0.5;
    let hi = nu + 0.5;
    let lo_term = if lo == 0.0 { 0.0 } else { lo * lo.ln() };
    Ok(hi * hi.ln() - lo_term)
}

/// `(x + ¼) ln(x + ¼) + (x - ¼) ln(x - ¼)`, kept for comparison; nonzero at the vacuum.
pub fn entropy_h_printed(x: f64) -> f64 {
    let lo = x - 0.25;
    let lo_term = if lo == 0.0 { 0.0 } else { lo * lo.ln() };
    (x + 0.25) * (x + 0.25).ln() + lo_term
}

/// `I(A:B) = h(√det A1) + h(√det A2) - h(d+) - h(d-)`, clamped at zero.
pub fn mutual_information(v: &CovarianceMatrix) -> Result<f64> {
    let sp = symplectic_eigenvalues(v)?;
    let (da, db) = (v.det_a1(), v.det_a2());
    if !(da > 0.0) || !(db > 0.0) {
        return Err(Error::Physicality(format!("local determinants {da:e}, {db:e}")));
    }
    let i = entropy_h(da.sqrt())? + entropy_h(db.sqrt())? - entropy_h(sp.d_plus)? - entropy_h(sp.d_minus)?;
    let scale = entropy_h(da.sqrt())?.max(1.0);
    if i < -1e-9 * scale {
        return Err(Error::Numerical(format!("mutual information {i:e} is negative")));
    }
    Ok(i.max(0.0))
}

/// Information report at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoReport {
    pub i_ab: f64,
    pub i_be: f64,
    /// `max(0, i_ab - i_be)`.
    pub kappa: f64,
}

/// Alice–Bob information with the cloner on Bob's arm, the eavesdropper's information
/// from the same expression with γ → -γ, and the key rate.
///
/// Uses the state's own covariance matrix, which stays physical at every amplitude.
pub fn eve_information_and_key_rate(src: &SourceParams, link: &LinkParams, c: &ClonerParams) -> Result<InfoReport> {
    let v = covariance_matrix_exact(src, link)?;
    let i_ab = mutual_information(&apply_cloner_to_covariance(&v, c))?;
    // γ = +∞ leaves Bob's arm untouched and gives Eve's copy infinite noise.
    let i_be = if c.gamma() == f64::INFINITY {
        0.0
    } else {
        mutual_information(&apply_cloner_to_covariance(&v, &c.swapped()))?
    };
    Ok(InfoReport { i_ab, i_be, kappa: (i_ab - i_be).max(0.0) })
}

/// Alice–Bob information without eavesdropper.
pub fn alice_bob_information(src: &SourceParams, link: &LinkParams) -> Result<f64> {
    mutual_information(&covariance_matrix_exact(src, link)?)
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}
