//! Moments of the entangled state and the third-order witness 𝒮.

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{ArmState, ClonerParams, LinkParams, SourceParams};
use crate::oracles::dyad::DyadState;

/// Exponents of a normal-ordered product `a1†^a1_dag a1^a1 a2†^a2_dag a2^a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Powers {
    pub a1_dag: u32,
    pub a1: u32,
    pub a2_dag: u32,
    pub a2: u32,
}

impl Powers {
    pub const fn new(a1_dag: u32, a1: u32, a2_dag: u32, a2: u32) -> Self {
        Powers { a1_dag, a1, a2_dag, a2 }
    }

    pub const A1: Powers = Powers::new(0, 1, 0, 0);
    pub const A2: Powers = Powers::new(0, 0, 0, 1);
    pub const N1: Powers = Powers::new(1, 1, 0, 0);
    pub const N2: Powers = Powers::new(0, 0, 1, 1);
    pub const A1_A2DAG: Powers = Powers::new(0, 1, 1, 0);
    pub const A1_N2: Powers = Powers::new(0, 1, 1, 1);
    pub const N1_N2: Powers = Powers::new(1, 1, 1, 1);
    pub const A1_SQ: Powers = Powers::new(0, 2, 0, 0);
    pub const A2_SQ: Powers = Powers::new(0, 0, 0, 2);
    pub const A1_A2: Powers = Powers::new(0, 1, 0, 1);

    pub fn order(&self) -> u32 {
        self.a1_dag + self.a1 + self.a2_dag + self.a2
    }
}

/// The moments entering the 𝒮 determinant, plus Alice's `⟨a1⟩` and `⟨n1⟩`
/// which the cloner corrections need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// ⟨a2⟩
    pub m_a2: Complex64,
    /// ⟨a1 a2†⟩
    pub m_a1a2d: Complex64,
    /// ⟨a2† a2⟩
    pub m_n2: f64,
    /// ⟨a1 a2† a2⟩
    pub m_a1n2: Complex64,
    /// ⟨a1† a1 a2† a2⟩
    pub m_n1n2: f64,
    /// ⟨a1⟩
    pub m_a1: Complex64,
    /// ⟨a1† a1⟩
    pub m_n1: f64,
    /// Set when θ is off the analytic branches and the values came from the dyad oracle.
    pub from_oracle: bool,
}

impl MomentSet {
    /// Fills the set from any normal-ordered moment evaluator.
    pub fn from_fn<F: Fn(Powers) -> Complex64>(f: F, from_oracle: bool) -> Self {
        MomentSet {
            m_a2: f(Powers::A2),
            m_a1a2d: f(Powers::A1_A2DAG),
            m_n2: f(Powers::N2).re,
            m_a1n2: f(Powers::A1_N2),
            m_n1n2: f(Powers::N1_N2).re,
            m_a1: f(Powers::A1),
            m_n1: f(Powers::N1).re,
            from_oracle,
        }
    }

    /// Applies `a_j -> e^{i chi_j} a_j` to every stored moment.
    pub fn rotated(&self, chi1: f64, chi2: f64) -> Self {
        let u1 = Complex64::from_polar(1.0, chi1);
        let u2 = Complex64::from_polar(1.0, chi2);
        MomentSet {
            m_a2: self.m_a2 * u2,
            m_a1a2d: self.m_a1a2d * u1 * u2.conj(),
            m_a1n2: self.m_a1n2 * u1,
            m_a1: self.m_a1 * u1,
            ..*self
        }
    }

    /// `(name, value)` pairs in a fixed order, for comparisons and reports.
    pub fn entries(&self) -> [(&'static str, Complex64); 7] {
        [
            ("<a2>", self.m_a2),
            ("<a1 a2+>", self.m_a1a2d),
            ("<n2>", Complex64::new(self.m_n2, 0.0)),
            ("<a1 a2+ a2>", self.m_a1n2),
            ("<n1 n2>", Complex64::new(self.m_n1n2, 0.0)),
            ("<a1>", self.m_a1),
            ("<n1>", Complex64::new(self.m_n1, 0.0)),
        ]
    }
}

/// Which witness a [`WitnessValue`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    S,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessValue {
    pub value: f64,
    pub kind: WitnessKind,
}

impl WitnessValue {
    /// For 𝒮 a negative value certifies entanglement.
    pub fn is_negative(&self) -> bool {
        self.value < 0.0
    }
}

/// Analytic moments after the fibers.
///
/// θ = 0 and θ = π use closed forms; any other θ is evaluated through the
/// coherent-dyad oracle and flagged with `from_oracle`.
pub fn moment_set(src: &SourceParams, link: &LinkParams) -> Result<MomentSet> {
    let st = ArmState::new(src, link)?;
    let Some(ct) = st.branch else {
        let dyads = DyadState::for_link(src, link)?;
        return Ok(MomentSet::from_fn(|p| dyads.moment(p), true));
    };
    let e = st.overlap();
    let s2 = st.sin_phi * st.sin_phi;
    let (a1, a2) = (st.alice, st.bob);
    // |N|²(cos2φ + ctE) and |N|²(1 + ct cos2φ E) written as offsets from their large-α limits.
    let g = st.cos_2phi + ct * e * 2.0 * s2 / st.denominator;
    let h = 1.0 - ct * e * 2.0 * s2 / st.denominator;
    let c = st.cos_phi;
    Ok(MomentSet {
        m_a2: Complex64::new(a2 * c, 0.0),
        m_a1a2d: Complex64::new(a1 * a2 * g, 0.0),
        m_n2: a2 * a2 * h,
        m_a1n2: Complex64::new(a1 * a2 * a2 * c, 0.0),
        m_n1n2: a1 * a1 * a2 * a2,
        m_a1: Complex64::new(a1 * c, 0.0),
        m_n1: a1 * a1 * h,
        from_oracle: false,
    })
}

/// Moments after the cloner acts on Bob's arm with vacuum ancillas.
///
/// With `a2 -> a2 + X`, `⟨X⟩ = 0` and `⟨X†X⟩ = δ = e^{-2γ}/2`:
/// `⟨n2⟩ += δ`, `⟨a1 a2† a2⟩ += δ⟨a1⟩`, `⟨n1 n2⟩ += δ⟨n1⟩`; all other entries are unchanged.
pub fn apply_cloner_to_moments(m: &MomentSet, c: &ClonerParams) -> MomentSet {
    let delta = 2.0 * c.bob_noise();
    MomentSet {
        m_n2: m.m_n2 + delta,
        m_a1n2: m.m_a1n2 + m.m_a1 * delta,
        m_n1n2: m.m_n1n2 + delta * m.m_n1,
        ..*m
    }
}

/// The 3×3 moment matrix whose determinant is 𝒮; conjugate entries filled by hermiticity.
pub fn moment_matrix(m: &MomentSet) -> [[Complex64; 3]; 3] {
    let one = Complex64::new(1.0, 0.0);
    [
        [one, m.m_a2.conj(), m.m_a1a2d],
        [m.m_a2, Complex64::new(m.m_n2, 0.0), m.m_a1n2],
        [m.m_a1a2d.conj(), m.m_a1n2.conj(), Complex64::new(m.m_n1n2, 0.0)],
    ]
}

pub(crate) fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// 𝒮 as the determinant of [`moment_matrix`]. Negative values certify entanglement.
pub fn witness_s(m: &MomentSet) -> WitnessValue {
    WitnessValue { value: det3(&moment_matrix(m)).re, kind: WitnessKind::S }
}

/// A real number stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    /// -1, 0 or +1.
    pub sign: f64,
    /// `ln |x|`; meaningless when `sign == 0`.
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: x.signum(), ln_abs: x.abs().ln() }
        }
    }

    pub fn from_parts(sign: f64, ln_abs: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign: sign.signum(), ln_abs }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0.0
    }

    pub fn add(self, other: SignedLog) -> SignedLog {
        if other.sign == 0.0 {
            return self;
        }
        if self.sign == 0.0 {
            return other;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs { (self, other) } else { (other, self) };
        let r = (small.ln_abs - big.ln_abs).exp();
        if big.sign == small.sign {
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + r.ln_1p() }
        } else if r == 1.0 {
            Self::ZERO
        } else {
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + (-r).ln_1p() }
        }
    }
}

/// 𝒮 with loss and optional cloner, evaluated in the log domain.
///
/// Expanding the determinant around its large-α structure gives, with
/// `δ = e^{-2γ}/2` (zero without cloner), `D = 1 + ctE` and `G = cos2φ + ctE`:
///
/// `𝒮 = -ct·4 s⁴ E G / D³ · α1²α2⁴ + s² (1 - ct cos2φ E)/D · δ α1²α2² + s² (1 - ctE)/D · δ² α1²`
///
/// which stays finite and sign-exact for amplitudes far beyond where the
/// plain determinant cancels to rounding noise.
pub fn entanglement_witness(
    src: &SourceParams,
    link: &LinkParams,
    cloner: Option<&ClonerParams>,
) -> Result<SignedLog> {
    let st = ArmState::new(src, link)?;
    let Some(ct) = st.branch else {
        let m = moment_set(src, link)?;
        let m = match cloner {
            Some(c) => apply_cloner_to_moments(&m, c),
            None => m,
        };
        return Ok(SignedLog::from_value(witness_s(&m).value));
    };
    let s = st.sin_phi;
    if s == 0.0 {
        return Ok(SignedLog::ZERO);
    }
    let ln_s = s.ln();
    let s2 = s * s;
    let ln_e = st.ln_overlap;
    let e = ln_e.exp();
    let one_minus_e = -ln_e.exp_m1();
    let ln_d = st.denominator.ln();
    let (ln_a1, ln_a2) = (st.alice.ln(), st.bob.ln());

    // cos2φ + ctE
    let g = if ct > 0.0 { st.cos_2phi + e } else { one_minus_e - 2.0 * s2 };
    let term0 = SignedLog::from_parts(
        -ct * g.signum(),
        4.0_f64.ln() + 4.0 * ln_s + ln_e + g.abs().ln() - 3.0 * ln_d + 2.0 * ln_a1 + 4.0 * ln_a2,
    );
    let Some(c) = cloner else {
        return Ok(term0);
    };
    let delta = 2.0 * c.bob_noise();
    if delta == 0.0 {
        return Ok(term0);
    }
    let ln_delta = delta.ln();
    // 1 - ct cos2φ E and 1 - ctE
    let (h_num, one_minus_cte) =
        if ct > 0.0 { (one_minus_e + 2.0 * s2 * e, one_minus_e) } else { (1.0 + st.cos_2phi * e, 1.0 + e) };
    let term1 = SignedLog::from_parts(
        1.0,
        2.0 * ln_a1 + 2.0 * ln_a2 + 2.0 * ln_s + h_num.ln() - ln_d + ln_delta,
    );
    let term2 =
        SignedLog::from_parts(1.0, 2.0 * ln_a1 + 2.0 * ln_s + one_minus_cte.ln() - ln_d + 2.0 * ln_delta);
    Ok(term0.add(term1).add(term2))
}
