//! Exact coherent-dyad representation of the two-mode density operator.

use num_complex::Complex64;

use super::covariance_from_moments;
use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::{LinkParams, LossModel, SourceParams};
use crate::moments::{MomentSet, Powers};

/// `weight · |ket[0], ket[1]⟩⟨bra[0], bra[1]|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad {
    pub weight: Complex64,
    pub ket: [Complex64; 2],
    pub bra: [Complex64; 2],
}

impl Dyad {
    /// `Π_j ⟨bra_j|ket_j⟩^{λ_j}`, with `⟨c|a⟩^λ = exp(λ(-|a|²/2 - |c|²/2 + c̄a))`.
    fn overlap_pow(&self, lambda: [f64; 2]) -> Complex64 {
        let mut ln = Complex64::new(0.0, 0.0);
        for j in 0..2 {
            let (a, c) = (self.ket[j], self.bra[j]);
            ln += lambda[j] * (-0.5 * a.norm_sqr() - 0.5 * c.norm_sqr() + c.conj() * a);
        }
        ln.exp()
    }

    fn adjoint(&self) -> Dyad {
        Dyad { weight: self.weight.conj(), ket: self.bra, bra: self.ket }
    }
}

/// ⟨c|a⟩ for coherent states.
pub fn coherent_overlap(bra: Complex64, ket: Complex64) -> Complex64 {
    (-0.5 * ket.norm_sqr() - 0.5 * bra.norm_sqr() + bra.conj() * ket).exp()
}

/// Density operator stored as a list of coherent dyads.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadState {
    terms: Vec<Dyad>,
}

/// A single ladder operator in an operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A1,
    A1Dag,
    A2,
    A2Dag,
}

impl DyadState {
    pub fn from_terms(terms: Vec<Dyad>) -> Self {
        DyadState { terms }
    }

    pub fn terms(&self) -> &[Dyad] {
        &self.terms
    }

    pub fn trace(&self) -> Complex64 {
        self.terms.iter().map(|t| t.weight * t.overlap_pow([1.0, 1.0])).sum()
    }

    /// True when every dyad's adjoint appears with the conjugate weight.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| {
            let adj = t.adjoint();
            self.terms.iter().any(|u| {
                (u.weight - adj.weight).norm() <= tol
                    && (0..2).all(|j| {
                        (u.ket[j] - adj.ket[j]).norm() <= tol && (u.bra[j] - adj.bra[j]).norm() <= tol
                    })
            })
        })
    }

    /// Normal-ordered moment `⟨a1†^m a1^l a2†^p a2^n⟩`.
    pub fn moment(&self, p: Powers) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let [a, b] = t.ket;
            let [c, d] = t.bra;
            let mono = c.conj().powu(p.a1_dag) * a.powu(p.a1) * d.conj().powu(p.a2_dag) * b.powu(p.a2);
            acc += t.weight * mono * t.overlap_pow([1.0, 1.0]);
        }
        acc / self.trace()
    }

    /// Expectation of an arbitrary operator word, normal-ordered with `[a, a†] = 1` first.
    pub fn moment_of_word(&self, word: &[Ladder]) -> Complex64 {
        let w1: Vec<bool> = word
            .iter()
            .filter_map(|x| match x {
                Ladder::A1 => Some(false),
                Ladder::A1Dag => Some(true),
                _ => None,
            })
            .collect();
        let w2: Vec<bool> = word
            .iter()
            .filter_map(|x| match x {
                Ladder::A2 => Some(false),
                Ladder::A2Dag => Some(true),
                _ => None,
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(m, l, c1) in &normal_order(&w1) {
            for &(p, n, c2) in &normal_order(&w2) {
                acc += c1 * c2 * self.moment(Powers::new(m, l, p, n));
            }
        }
        acc
    }

    pub fn moments(&self) -> MomentSet {
        MomentSet::from_fn(|p| self.moment(p), true)
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        covariance_from_moments(|p| self.moment(p))
    }

    /// State after the fibers: pure-loss channel on the source state, or the pure state
    /// rebuilt from decayed amplitudes, depending on the link's loss model.
    pub fn for_link(src: &SourceParams, link: &LinkParams) -> Result<Self> {
        let (t1, t2) = link.transmissions();
        match link.loss_model() {
            LossModel::Channel => apply_loss_to_dyads(&build_dyads(src)?, t1, t2),
            LossModel::AmplitudeDecay => build_dyads_with_amplitudes(
                src.alpha() * t1,
                src.bob_amplitude() * t2,
                src.phi(),
                src.theta(),
            ),
        }
    }
}

/// Normal-ordered expansion of a single-mode word (`true` = a†) as `(m, l, coeff)` terms.
fn normal_order(word: &[bool]) -> Vec<(u32, u32, f64)> {
    let mut poly: Vec<(u32, u32, f64)> = vec![(0, 0, 1.0)];
    for &dag in word {
        let mut next: Vec<(u32, u32, f64)> = Vec::new();
        let mut push = |m: u32, l: u32, c: f64| {
            if let Some(e) = next.iter_mut().find(|e| e.0 == m && e.1 == l) {
                e.2 += c;
            } else {
                next.push((m, l, c));
            }
        };
        for &(m, l, c) in &poly {
            if dag {
                push(m + 1, l, c);
                if l > 0 {
                    push(m, l - 1, c * f64::from(l));
                }
            } else {
                push(m, l + 1, c);
            }
        }
        poly = next;
    }
    poly
}

/// Density operator of the source state `N/√2 (|α₊⟩|β₋⟩ + e^{iθ}|α₋⟩|β₊⟩)`.
pub fn build_dyads(src: &SourceParams) -> Result<DyadState> {
    build_dyads_with_amplitudes(src.alpha(), src.bob_amplitude(), src.phi(), src.theta())
}

/// As [`build_dyads`] with explicit arm amplitudes.
pub fn build_dyads_with_amplitudes(alice: f64, bob: f64, phi: f64, theta: f64) -> Result<DyadState> {
    let rot = |a: f64, sgn: f64| Complex64::from_polar(a, sgn * phi);
    let branches = [[rot(alice, 1.0), rot(bob, -1.0)], [rot(alice, -1.0), rot(bob, 1.0)]];
    let coeff = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)];
    let mut terms = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            terms.push(Dyad {
                weight: coeff[i] * coeff[j].conj(),
                ket: branches[i],
                bra: branches[j],
            });
        }
    }
    let state = DyadState { terms };
    let tr = state.trace();
    if !(tr.re > 1e-300) {
        return Err(Error::DegenerateState(format!("dyad trace {tr} vanishes")));
    }
    let terms = state.terms.into_iter().map(|t| Dyad { weight: t.weight / tr.re, ..t }).collect();
    Ok(DyadState { terms })
}

/// Pure-loss channel with amplitude transmissions `t1`, `t2`:
/// `|a,b⟩⟨c,d| -> ⟨c|a⟩^{1-t1²} ⟨d|b⟩^{1-t2²} |t1 a, t2 b⟩⟨t1 c, t2 d|`.
pub fn apply_loss_to_dyads(s: &DyadState, t1: f64, t2: f64) -> Result<DyadState> {
    for t in [t1, t2] {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("transmission must lie in [0, 1], got {t}")));
        }
    }
    let terms = s
        .terms
        .iter()
        .map(|d| Dyad {
            weight: d.weight * d.overlap_pow([1.0 - t1 * t1, 1.0 - t2 * t2]),
            ket: [d.ket[0] * t1, d.ket[1] * t2],
            bra: [d.bra[0] * t1, d.bra[1] * t2],
        })
        .collect();
    Ok(DyadState { terms })
}

/// Normal-ordered moment of a dyad state.
pub fn dyad_moment(s: &DyadState, powers: Powers) -> Complex64 {
    s.moment(powers)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn trace_and_hermiticity() {
        let s = build_dyads(&SourceParams::new(1.0, 0.1, PI).unwrap()).unwrap();
        assert!((s.trace() - 1.0).norm() < 1e-12);
        assert!(s.is_hermitian(1e-14));
        let l = apply_loss_to_dyads(&s, 0.7, 0.4).unwrap();
        assert!((l.trace() - 1.0).norm() < 1e-12);
        assert!(l.is_hermitian(1e-14));
    }

    #[test]
    fn branch_overlap_magnitude() {
        let (alpha, phi) = (1.3, 0.4);
        let p = Complex64::from_polar(alpha, phi);
        let m = Complex64::from_polar(alpha, -phi);
        let o = coherent_overlap(p, m).norm();
        assert!((o - (-2.0 * alpha * alpha * phi.sin().powi(2)).exp()).abs() < 1e-15);
    }

    #[test]
    fn separable_limit() {
        let s = build_dyads(&SourceParams::new(1.5, 0.0, 0.0).unwrap()).unwrap();
        let t = &s.terms()[0];
        assert!(s.terms().iter().all(|u| u.ket == t.ket && u.bra == t.ket));
        let n1n2 = s.moment(Powers::N1_N2);
        assert!((n1n2.re - 1.5f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn vacuum_moments_vanish() {
        let zero = Complex64::new(0.0, 0.0);
        let s = DyadState::from_terms(vec![Dyad {
            weight: Complex64::new(1.0, 0.0),
            ket: [zero, zero],
            bra: [zero, zero],
        }]);
        for p in [Powers::A1, Powers::N2, Powers::A1_N2, Powers::N1_N2] {
            assert_eq!(s.moment(p), zero);
        }
    }

    #[test]
    fn loss_identity_and_full_absorption() {
        let s = build_dyads(&SourceParams::new(2.0, 0.3, 0.0).unwrap()).unwrap();
        let same = apply_loss_to_dyads(&s, 1.0, 1.0).unwrap();
        for p in [Powers::A1_A2DAG, Powers::N1_N2] {
            assert!((same.moment(p) - s.moment(p)).norm() < 1e-13);
        }
        let gone = apply_loss_to_dyads(&s, 1.0, 0.0).unwrap();
        assert_eq!(gone.moment(Powers::N2).norm(), 0.0);
        assert_eq!(gone.moment(Powers::A2).norm(), 0.0);
        assert!(apply_loss_to_dyads(&s, 1.2, 1.0).is_err());
    }

    #[test]
    fn commutator_rewrite() {
        let s = build_dyads(&SourceParams::new(0.8, 0.5, PI).unwrap()).unwrap();
        // a a† = a† a + 1
        let anti = s.moment_of_word(&[Ladder::A2, Ladder::A2Dag]);
        assert!((anti - s.moment(Powers::N2) - 1.0).norm() < 1e-13);
        // a² a†² = a†² a² + 4 a† a + 2
        let w = [Ladder::A1, Ladder::A1, Ladder::A1Dag, Ladder::A1Dag];
        let expect = s.moment(Powers::new(2, 2, 0, 0)) + 4.0 * s.moment(Powers::N1) + 2.0;
        assert!((s.moment_of_word(&w) - expect).norm() < 1e-12);
    }
}
