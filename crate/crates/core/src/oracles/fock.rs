//! Truncated number-basis representation of the two-mode state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{binomial, covariance_from_moments};
use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::SourceParams;
use crate::moments::{MomentSet, Powers};

/// Largest Poisson tail mass accepted beyond `n_max`.
pub const TAIL_TOLERANCE: f64 = 1e-12;

type CMat = DMatrix<Complex64>;

/// Two-mode pure state with amplitudes `psi[(n1, n2)]`, `n_j <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: CMat,
    n_max: usize,
}

/// Poisson mass above `n_max` for mean photon number `mean`.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_p = -mean;
    for n in 1..=n_max + 1 {
        ln_p += ln_mean - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = ln_p.exp();
        tail += p;
        n += 1;
        ln_p += ln_mean - (n as f64).ln();
        if (n as f64) > mean && ln_p.exp() < 1e-18 * tail.max(1e-300) {
            break;
        }
        if n > n_max + 100_000 {
            break;
        }
    }
    tail
}

/// Smallest truncation order whose tail mass is below [`TAIL_TOLERANCE`].
pub fn required_n_max(mean: f64) -> usize {
    let mut n = mean.floor() as usize;
    while poisson_tail(mean, n) > TAIL_TOLERANCE {
        n += 1;
    }
    n
}

fn coherent_coefficients(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut v = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    c.push(v);
    for n in 1..=n_max {
        v = v * z / (n as f64).sqrt();
        c.push(v);
    }
    c
}

/// Operator with a single nonzero diagonal: `op[(col + offset, col)] = values[col]`.
///
/// Normal-ordered products `a†^m a^l` have this shape with `offset = m - l`, and the
/// Heisenberg-picture loss map preserves it.
#[derive(Debug, Clone, PartialEq)]
struct BandOp {
    offset: isize,
    values: Vec<f64>,
}

impl BandOp {
    fn dim(&self) -> usize {
        self.values.len()
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        if row as isize - col as isize == self.offset {
            self.values[col]
        } else {
            0.0
        }
    }

    fn row_of(&self, col: usize) -> Option<usize> {
        let r = col as isize + self.offset;
        (r >= 0 && (r as usize) < self.dim()).then_some(r as usize)
    }
}

/// `a†^m a^l` on `0..=n_max`, truncated at the top of the basis.
fn normal_product(m: u32, l: u32, n_max: usize) -> BandOp {
    let dim = n_max + 1;
    let (m, l) = (m as usize, l as usize);
    let mut values = vec![0.0; dim];
    for (n, v) in values.iter_mut().enumerate().skip(l) {
        let k = n - l + m;
        if k >= dim {
            continue;
        }
        let mut amp = 1.0;
        for j in (n - l + 1)..=n {
            amp *= (j as f64).sqrt();
        }
        for j in (n - l + 1)..=k {
            amp *= (j as f64).sqrt();
        }
        *v = amp;
    }
    BandOp { offset: m as isize - l as isize, values }
}

/// Heisenberg-picture pure loss: `Σ_k A_k† O A_k` with `A_k|n⟩ = √C(n,k) t^{n-k} (1-t²)^{k/2} |n-k⟩`.
fn loss_dual(o: &BandOp, t: f64) -> BandOp {
    if t == 1.0 {
        return o.clone();
    }
    let dim = o.dim();
    let r2 = 1.0 - t * t;
    let kraus = |k: usize, n: usize| -> f64 {
        binomial(n as u32, k as u32).sqrt() * t.powi((n - k) as i32) * r2.powf(0.5 * k as f64)
    };
    let mut values = vec![0.0; dim];
    for (c, v) in values.iter_mut().enumerate() {
        let Some(r) = o.row_of(c) else { continue };
        *v = (0..=r.min(c)).map(|k| kraus(k, r) * kraus(k, c) * o.at(r - k, c - k)).sum();
    }
    BandOp { offset: o.offset, values }
}

impl FockState {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &CMat {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`; both states must share `n_max`.
    pub fn overlap(&self, other: &FockState) -> Complex64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ| O1 ⊗ O2 |ψ⟩ = Σ conj(Ψ[r1, r2]) O1[r1, c1] O2[r2, c2] Ψ[c1, c2]`.
    fn expectation(&self, o1: &BandOp, o2: &BandOp) -> Complex64 {
        let psi = &self.amplitudes;
        let mut acc = Complex64::new(0.0, 0.0);
        for c1 in 0..o1.dim() {
            let Some(r1) = o1.row_of(c1) else { continue };
            let v1 = o1.values[c1];
            if v1 == 0.0 {
                continue;
            }
            for c2 in 0..o2.dim() {
                let Some(r2) = o2.row_of(c2) else { continue };
                acc += psi[(r1, r2)].conj() * (v1 * o2.values[c2]) * psi[(c1, c2)];
            }
        }
        acc
    }

    /// Normal-ordered moment of the state.
    pub fn moment(&self, p: Powers) -> Complex64 {
        self.moment_after_loss(p, 1.0, 1.0)
    }

    /// Normal-ordered moment after pure loss with transmissions `t1`, `t2`,
    /// evaluated by pulling the operators back through the Kraus maps.
    pub fn moment_after_loss(&self, p: Powers, t1: f64, t2: f64) -> Complex64 {
        let o1 = loss_dual(&normal_product(p.a1_dag, p.a1, self.n_max), t1);
        let o2 = loss_dual(&normal_product(p.a2_dag, p.a2, self.n_max), t2);
        self.expectation(&o1, &o2)
    }

    pub fn moments_after_loss(&self, t1: f64, t2: f64) -> MomentSet {
        MomentSet::from_fn(|p| self.moment_after_loss(p, t1, t2), true)
    }

    pub fn covariance_after_loss(&self, t1: f64, t2: f64) -> CovarianceMatrix {
        covariance_from_moments(|p| self.moment_after_loss(p, t1, t2))
    }
}

/// Source state in the number basis.
pub fn build_fock(src: &SourceParams, n_max: usize) -> Result<FockState> {
    build_fock_with_amplitudes(src.alpha(), src.bob_amplitude(), src.phi(), src.theta(), n_max)
}

/// As [`build_fock`] with explicit arm amplitudes; the vector is renormalized after truncation.
pub fn build_fock_with_amplitudes(
    alice: f64,
    bob: f64,
    phi: f64,
    theta: f64,
    n_max: usize,
) -> Result<FockState> {
    for a in [alice, bob] {
        let tail = poisson_tail(a * a, n_max);
        if tail > TAIL_TOLERANCE {
            return Err(Error::Truncation { tail, required_n_max: required_n_max(a * a) });
        }
    }
    let ap = coherent_coefficients(Complex64::from_polar(alice, phi), n_max);
    let am = coherent_coefficients(Complex64::from_polar(alice, -phi), n_max);
    let bp = coherent_coefficients(Complex64::from_polar(bob, phi), n_max);
    let bm = coherent_coefficients(Complex64::from_polar(bob, -phi), n_max);
    let phase = Complex64::from_polar(1.0, theta);
    let dim = n_max + 1;
    let mut psi = CMat::from_fn(dim, dim, |i, j| ap[i] * bm[j] + phase * am[i] * bp[j]);
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-150) {
        return Err(Error::DegenerateState(format!("Fock vector norm {norm:e} vanishes")));
    }
    psi /= Complex64::new(norm, 0.0);
    Ok(FockState { amplitudes: psi, n_max })
}

/// Vacuum in both modes.
pub fn vacuum(n_max: usize) -> FockState {
    let mut psi = CMat::zeros(n_max + 1, n_max + 1);
    psi[(0, 0)] = Complex64::new(1.0, 0.0);
    FockState { amplitudes: psi, n_max }
}

/// Covariance matrix of a Fock state.
pub fn fock_covariance(f: &FockState) -> CovarianceMatrix {
    f.covariance_after_loss(1.0, 1.0)
}
