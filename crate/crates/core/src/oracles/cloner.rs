//! Cloner output moments by explicit expansion over the vacuum ancillas.
//!
//! Bob's copy is `a_out = a - e^{-γ}/√2 (c + b†)`, Eve's is `c_out = a + e^{γ}/√2 (c - b†)`.
//! Writing either as `a + X`, a normal-ordered output moment expands into input moments of
//! `a` times vacuum expectations `⟨X†^j X^k⟩`, which are computed here by acting with `X`
//! on a small two-mode ancilla number basis.

use num_complex::Complex64;

use super::binomial;
use super::dyad::DyadState;
use crate::model::ClonerParams;
use crate::moments::{MomentSet, Powers};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClonerPort {
    Bob,
    Eve,
}

/// `X = kappa (c + sign · b†)` for the chosen port.
fn ancilla_operator(c: &ClonerParams, port: ClonerPort) -> (f64, f64) {
    let g = c.gamma();
    match port {
        ClonerPort::Bob => (-(-g).exp() / 2f64.sqrt(), 1.0),
        ClonerPort::Eve => (g.exp() / 2f64.sqrt(), -1.0),
    }
}

/// `⟨0,0| X†^j X^k |0,0⟩` on ancilla modes (c, b), each truncated at `j + k`,
/// which is exact because `X` raises the b occupation by at most one per application.
pub fn ancilla_expectation(c: &ClonerParams, port: ClonerPort, j: u32, k: u32) -> Complex64 {
    let (kappa, sign) = ancilla_operator(c, port);
    if kappa == 0.0 {
        return Complex64::new(if j == 0 && k == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let dim = (j + k + 1) as usize;
    let idx = |nc: usize, nb: usize| nc * dim + nb;
    let apply_x = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dim * dim];
        for nc in 0..dim {
            for nb in 0..dim {
                let x = v[idx(nc, nb)];
                if x == 0.0 {
                    continue;
                }
                if nc > 0 {
                    out[idx(nc - 1, nb)] += kappa * (nc as f64).sqrt() * x;
                }
                if nb + 1 < dim {
                    out[idx(nc, nb + 1)] += kappa * sign * ((nb + 1) as f64).sqrt() * x;
                }
            }
        }
        out
    };
    let mut vac = vec![0.0; dim * dim];
    vac[0] = 1.0;
    let power = |n: u32| (0..n).fold(vac.clone(), |v, _| apply_x(&v));
    let (vj, vk) = (power(j), power(k));
    Complex64::new(vj.iter().zip(&vk).map(|(a, b)| a * b).sum(), 0.0)
}

/// Normal-ordered moment with mode 2 replaced by the chosen cloner output port.
pub fn cloner_output_moments_oracle(
    s: &DyadState,
    c: &ClonerParams,
    port: ClonerPort,
    powers: Powers,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=powers.a2_dag {
        for k in 0..=powers.a2 {
            let anc = ancilla_expectation(c, port, j, k);
            if anc == Complex64::new(0.0, 0.0) {
                continue;
            }
            let inner = Powers::new(powers.a1_dag, powers.a1, powers.a2_dag - j, powers.a2 - k);
            acc += binomial(powers.a2_dag, j) * binomial(powers.a2, k) * anc * s.moment(inner);
        }
    }
    acc
}

/// Moment set of Alice's mode together with the chosen cloner output.
pub fn cloner_moment_set(s: &DyadState, c: &ClonerParams, port: ClonerPort) -> MomentSet {
    MomentSet::from_fn(|p| cloner_output_moments_oracle(s, c, port, p), true)
}
