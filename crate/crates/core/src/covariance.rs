//! Quadrature covariance matrix, cloner noise, and the eavesdropping witness 𝒲.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ArmState, ClonerParams, LinkParams, SourceParams};
use crate::moments::{WitnessKind, WitnessValue};
use crate::oracles::dyad::DyadState;

/// 4×4 real symmetric covariance matrix over `(q1, p1, q2, p2)`, with `q = (a + a†)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    entries: [[f64; 4]; 4],
}

impl CovarianceMatrix {
    /// Checks symmetry to `1e-12` relative to the largest entry.
    pub fn new(entries: [[f64; 4]; 4]) -> Result<Self> {
        let scale = entries.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..4 {
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::domain(format!("covariance matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::domain("covariance matrix has non-finite entries"));
        }
        Ok(CovarianceMatrix { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: [[f64; 4]; 4]) -> Self {
        CovarianceMatrix { entries }
    }

    pub fn vacuum() -> Self {
        Self::diagonal([0.25; 4])
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut e = [[0.0; 4]; 4];
        for i in 0..4 {
            e[i][i] = d[i];
        }
        CovarianceMatrix { entries: e }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    fn block(&self, r: usize, c: usize) -> [[f64; 2]; 2] {
        [
            [self.entries[r][c], self.entries[r][c + 1]],
            [self.entries[r + 1][c], self.entries[r + 1][c + 1]],
        ]
    }

    /// Alice's block.
    pub fn a1(&self) -> [[f64; 2]; 2] {
        self.block(0, 0)
    }

    /// Bob's block.
    pub fn a2(&self) -> [[f64; 2]; 2] {
        self.block(2, 2)
    }

    /// Correlation block (rows Alice, columns Bob).
    pub fn c(&self) -> [[f64; 2]; 2] {
        self.block(0, 2)
    }

    pub fn det_a1(&self) -> f64 {
        det2(&self.a1())
    }

    pub fn det_a2(&self) -> f64 {
        det2(&self.a2())
    }

    pub fn det_c(&self) -> f64 {
        det2(&self.c())
    }

    pub fn det(&self) -> f64 {
        self.as_matrix().determinant()
    }

    pub fn as_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.entries[i][j])
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + (i/4) Ω`.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let omega = crate::oracles::symplectic::omega();
        let h = Matrix4::<Complex64>::from_fn(|i, j| {
            Complex64::new(self.entries[i][j], 0.25 * omega[(i, j)])
        });
        h.symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }

    /// Robertson–Schrödinger condition `V + (i/4) Ω ≥ 0`, up to `tol` times the matrix scale.
    pub fn is_physical(&self, tol: f64) -> bool {
        let scale = self.entries.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        self.min_uncertainty_eigenvalue() >= -tol * scale
    }

    /// Adds `noise` to both of Bob's quadrature variances.
    pub fn with_bob_noise(&self, noise: f64) -> Self {
        let mut e = self.entries;
        e[2][2] += noise;
        e[3][3] += noise;
        CovarianceMatrix { entries: e }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        m
    }
}

pub(crate) fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Which closed form builds the covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceForm {
    /// `A_j = diag(a_j', a_j')`, `C = diag(b', c')` with
    /// `a_j' = ¼ + (α_j²/2)(|N|² f_j - 1)`, `b' = (α1α2/2)(|N|² g - cos2φ)`,
    /// `c' = (α1α2/2)(|N|² g - 1)`, where `f_j` uses the single-arm overlap.
    #[default]
    Printed,
    /// The covariance matrix of the state itself. It differs from `Printed` in the
    /// momentum variances, `Var p_j = a_j' + α_j² sin²φ`, and is always physical.
    Exact,
}

impl CovarianceForm {
    pub fn name(&self) -> &'static str {
        match self {
            CovarianceForm::Printed => "printed",
            CovarianceForm::Exact => "exact",
        }
    }
}

impl std::str::FromStr for CovarianceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(CovarianceForm::Printed),
            "exact" => Ok(CovarianceForm::Exact),
            other => Err(Error::config("covariance", format!("unknown covariance form `{other}`"))),
        }
    }
}

/// Covariance matrix in the block layout `A_j = diag(a_j', a_j')`, `C = diag(b', c')`.
pub fn covariance_matrix(src: &SourceParams, link: &LinkParams) -> Result<CovarianceMatrix> {
    let st = ArmState::new(src, link)?;
    let ct = st.cos_theta;
    let e = st.overlap();
    let s2 = st.sin_phi * st.sin_phi;
    let d = st.denominator;
    // |N|² f_j - 1 = cosθ (cos2φ E_j - E) / D
    let a = |amp: f64, ln_ej: f64| 0.25 + 0.5 * amp * amp * ct * (st.cos_2phi * ln_ej.exp() - e) / d;
    let a1 = a(st.alice, st.ln_overlap_alice);
    let a2 = a(st.bob, st.ln_overlap_bob);
    let b = st.alice * st.bob * ct * e * s2 / d;
    let c = -st.alice * st.bob * s2 / d;
    Ok(CovarianceMatrix::from_entries_unchecked([
        [a1, 0.0, b, 0.0],
        [0.0, a1, 0.0, c],
        [b, 0.0, a2, 0.0],
        [0.0, c, 0.0, a2],
    ]))
}

/// Covariance matrix of the state itself.
///
/// θ = 0 and θ = π use closed forms; other θ go through the dyad oracle.
pub fn covariance_matrix_exact(src: &SourceParams, link: &LinkParams) -> Result<CovarianceMatrix> {
    let st = ArmState::new(src, link)?;
    let Some(ct) = st.branch else {
        return Ok(DyadState::for_link(src, link)?.covariance());
    };
    let e = st.overlap();
    let s2 = st.sin_phi * st.sin_phi;
    let d = st.denominator;
    let vq = |amp: f64| 0.25 - amp * amp * ct * e * s2 / d;
    let vp = |amp: f64| 0.25 + amp * amp * s2 / d;
    let b = st.alice * st.bob * ct * e * s2 / d;
    let c = -st.alice * st.bob * s2 / d;
    Ok(CovarianceMatrix::from_entries_unchecked([
        [vq(st.alice), 0.0, b, 0.0],
        [0.0, vp(st.alice), 0.0, c],
        [b, 0.0, vq(st.bob), 0.0],
        [0.0, c, 0.0, vp(st.bob)],
    ]))
}

pub fn covariance_with(form: CovarianceForm, src: &SourceParams, link: &LinkParams) -> Result<CovarianceMatrix> {
    match form {
        CovarianceForm::Printed => covariance_matrix(src, link),
        CovarianceForm::Exact => covariance_matrix_exact(src, link),
    }
}

/// Adds the cloner's `σ_B² = e^{-2γ}/4` to both of Bob's quadrature variances.
pub fn apply_cloner_to_covariance(v: &CovarianceMatrix, c: &ClonerParams) -> CovarianceMatrix {
    v.with_bob_noise(c.bob_noise())
}

/// `𝒲 = 1 + det V + 2 det C - det A1 - det A2`.
pub fn witness_w(v: &CovarianceMatrix) -> WitnessValue {
    let value = 1.0 + v.det() + 2.0 * v.det_c() - v.det_a1() - v.det_a2();
    WitnessValue { value, kind: WitnessKind::W }
}

/// 𝒲 at total distance `d`, with optional cloner.
pub fn eavesdropping_witness(
    src: &SourceParams,
    link: &LinkParams,
    cloner: Option<&ClonerParams>,
    form: CovarianceForm,
) -> Result<f64> {
    let v = covariance_with(form, src, link)?;
    let v = match cloner {
        Some(c) => apply_cloner_to_covariance(&v, c),
        None => v,
    };
    Ok(witness_w(&v).value)
}
