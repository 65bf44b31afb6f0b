//! Brute-force references used to verify the closed forms.
//!
//! [`dyad`] keeps the density operator as a sum of two-mode coherent dyads and is exact.
//! [`fock`] expands the state in a truncated number basis and applies loss through its
//! Kraus operators, so it shares no coherent-state algebra with the analytic code.

pub mod check;
pub mod cloner;
pub mod dyad;
pub mod fock;
pub mod symplectic;

use num_complex::Complex64;

use crate::covariance::CovarianceMatrix;
use crate::moments::Powers;

/// Quadrature covariance matrix (order q1, p1, q2, p2) from normal-ordered moments.
pub fn covariance_from_moments<F: Fn(Powers) -> Complex64>(f: F) -> CovarianceMatrix {
    let mu = [f(Powers::A1), f(Powers::A2)];
    let sq = [f(Powers::A1_SQ), f(Powers::A2_SQ)];
    let n = [f(Powers::N1).re, f(Powers::N2).re];
    let mut v = [[0.0; 4]; 4];
    for j in 0..2 {
        let a2 = sq[j] - mu[j] * mu[j];
        let nc = n[j] - mu[j].norm_sqr();
        let (q, p) = (2 * j, 2 * j + 1);
        v[q][q] = 0.25 + 0.5 * (a2.re + nc);
        v[p][p] = 0.25 + 0.5 * (nc - a2.re);
        v[q][p] = 0.5 * a2.im;
        v[p][q] = v[q][p];
    }
    let pp = f(Powers::A1_A2) - mu[0] * mu[1];
    let qq = f(Powers::A1_A2DAG) - mu[0] * mu[1].conj();
    let cross = [
        [0.5 * (pp + qq).re, 0.5 * (pp.im - qq.im)],
        [0.5 * (pp.im + qq.im), 0.5 * (qq - pp).re],
    ];
    for (r, row) in cross.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            v[r][2 + c] = x;
            v[2 + c][r] = x;
        }
    }
    CovarianceMatrix::from_entries_unchecked(v)
}

/// `|x - y| / max(|x|, |y|)`, or the absolute difference when both are below `1e-12`.
pub fn deviation(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale < 1e-12 {
        (x - y).abs()
    } else {
        (x - y).abs() / scale
    }
}

/// Complex version of [`deviation`].
pub fn deviation_c(x: Complex64, y: Complex64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale < 1e-12 {
        (x - y).norm()
    } else {
        (x - y).norm() / scale
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * f64::from(n - i) / f64::from(i + 1);
    }
    r
}
