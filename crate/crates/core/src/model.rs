//! Physical parameters: source state, fiber links, loss, and the Gaussian cloner.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Fiber loss constant in km⁻¹ (about 3 dB per 15 km).
pub const DEFAULT_LOSS_PER_KM: f64 = 0.046;

/// Tolerance used to decide whether θ sits on one of the post-selected values 0 or π.
const THETA_BRANCH_TOL: f64 = 1e-12;

/// Complex field amplitude of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Amplitude(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Amplitude(Complex64::new(re, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Amplitude transmission `t = exp(-K d / 2)` of a fiber of length `d` km.
pub fn transmission(k: f64, d: f64) -> Result<f64> {
    check_loss_and_distance(k, d)?;
    Ok((-0.5 * k * d).exp())
}

/// Amplitude after `d` km of fiber with loss constant `k`.
pub fn propagate_amplitude(alpha: Amplitude, k: f64, d: f64) -> Result<Amplitude> {
    if !alpha.0.re.is_finite() || !alpha.0.im.is_finite() {
        return Err(Error::domain("amplitude must be finite"));
    }
    let t = transmission(k, d)?;
    Ok(Amplitude(alpha.0 * t))
}

fn check_loss_and_distance(k: f64, d: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("loss constant must be finite and >= 0, got {k}")));
    }
    if !(d >= 0.0) || d.is_nan() {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    Ok(())
}

/// Distance at which the mean photon number `alpha²` has decayed to `n`.
///
/// Returns 0 when the amplitude is already at the target.
pub fn photon_decay_distance(alpha: f64, k: f64, n: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("loss constant must be > 0, got {k}")));
    }
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(format!("target photon number must be > 0, got {n}")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    if alpha * alpha < n {
        return Err(Error::NoSolution(format!(
            "alpha² = {} is already below the target photon number {n}",
            alpha * alpha
        )));
    }
    Ok((2.0 / k) * (alpha.ln() - 0.5 * n.ln()))
}

/// Parameters of the phase-entangled coherent state.
///
/// Alice's arm carries amplitude `alpha`, Bob's arm `beta` (equal to `alpha` unless set).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    alpha: f64,
    beta: Option<f64>,
    phi: f64,
    theta: f64,
}

impl SourceParams {
    pub fn new(alpha: f64, phi: f64, theta: f64) -> Result<Self> {
        check_amplitude("alpha", alpha)?;
        if !(0.0..=PI / 2.0).contains(&phi) {
            return Err(Error::domain(format!("phi must lie in [0, pi/2], got {phi}")));
        }
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::domain(format!("theta must lie in [0, 2pi), got {theta}")));
        }
        if phi == 0.0 && (1.0 + theta.cos()) <= THETA_BRANCH_TOL {
            return Err(Error::DegenerateState(
                "phi = 0 together with theta = pi has a vanishing norm".into(),
            ));
        }
        Ok(SourceParams { alpha, beta: None, phi, theta })
    }

    /// Gives Bob's arm its own initial amplitude.
    pub fn with_bob_amplitude(mut self, beta: f64) -> Result<Self> {
        check_amplitude("beta", beta)?;
        self.beta = Some(beta);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Bob's initial amplitude.
    pub fn bob_amplitude(&self) -> f64 {
        self.beta.unwrap_or(self.alpha)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta.is_none_or(|b| b == self.alpha)
    }

    /// `Some(cos θ)` when θ is (numerically) 0 or π, the two post-selected values.
    pub fn theta_branch(&self) -> Option<f64> {
        if self.theta.sin().abs() < THETA_BRANCH_TOL {
            Some(self.theta.cos().signum())
        } else {
            None
        }
    }
}

fn check_amplitude(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("{name} must be finite and > 0, got {a}")));
    }
    Ok(())
}

/// How the overlap between the two branches of the state evolves with distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossModel {
    /// Beam-splitter pure-loss channel acting on each arm. The branch overlap keeps its
    /// source value while every field operator is scaled by its arm's transmission.
    #[default]
    Channel,
    /// The overlap is re-evaluated with the decayed amplitudes, i.e. the state at
    /// distance `d` is the pure entangled state built from `alpha·t_j`.
    AmplitudeDecay,
}

impl LossModel {
    pub fn name(&self) -> &'static str {
        match self {
            LossModel::Channel => "channel",
            LossModel::AmplitudeDecay => "amplitude-decay",
        }
    }
}

impl std::str::FromStr for LossModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "channel" => Ok(LossModel::Channel),
            "amplitude-decay" | "decay" => Ok(LossModel::AmplitudeDecay),
            other => Err(Error::config("loss", format!("unknown loss model `{other}`"))),
        }
    }
}

/// How a total Alice–Bob distance is split between the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Source in the middle: `d1 = d2 = d/2`.
    #[default]
    Symmetric,
    /// Source at Alice: `d1 = 0`, `d2 = d`.
    SourceAtAlice,
}

impl SplitMode {
    pub fn name(&self) -> &'static str {
        match self {
            SplitMode::Symmetric => "symmetric",
            SplitMode::SourceAtAlice => "source-at-alice",
        }
    }
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(SplitMode::Symmetric),
            "source-at-alice" | "alice" => Ok(SplitMode::SourceAtAlice),
            other => Err(Error::config("split", format!("unknown split mode `{other}`"))),
        }
    }
}

/// Loss constants and arm lengths of the two fibers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    k1: f64,
    k2: f64,
    d1: f64,
    d2: f64,
    loss: LossModel,
}

impl LinkParams {
    pub fn new(k1: f64, k2: f64, d1: f64, d2: f64) -> Result<Self> {
        check_loss_and_distance(k1, d1)?;
        check_loss_and_distance(k2, d2)?;
        Ok(LinkParams { k1, k2, d1, d2, loss: LossModel::default() })
    }

    /// No fiber at all.
    pub fn lossless() -> Self {
        LinkParams { k1: 0.0, k2: 0.0, d1: 0.0, d2: 0.0, loss: LossModel::default() }
    }

    pub fn symmetric(k: f64, d: f64) -> Result<Self> {
        Self::new(k, k, 0.5 * d, 0.5 * d)
    }

    pub fn source_at_alice(k: f64, d: f64) -> Result<Self> {
        Self::new(k, k, 0.0, d)
    }

    pub fn with_loss_model(mut self, loss: LossModel) -> Self {
        self.loss = loss;
        self
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn loss_model(&self) -> LossModel {
        self.loss
    }

    pub fn total_distance(&self) -> f64 {
        self.d1 + self.d2
    }

    /// Amplitude transmissions `(t1, t2)` of the two arms.
    pub fn transmissions(&self) -> (f64, f64) {
        ((-0.5 * self.k1 * self.d1).exp(), (-0.5 * self.k2 * self.d2).exp())
    }
}

/// Loss constants and split rule, turned into [`LinkParams`] for a given total distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTemplate {
    pub k1: f64,
    pub k2: f64,
    pub split: SplitMode,
    pub loss: LossModel,
}

impl LinkTemplate {
    pub fn new(k: f64, split: SplitMode) -> Self {
        LinkTemplate { k1: k, k2: k, split, loss: LossModel::default() }
    }

    pub fn with_loss_model(mut self, loss: LossModel) -> Self {
        self.loss = loss;
        self
    }

    pub fn at(&self, d: f64) -> Result<LinkParams> {
        let (d1, d2) = match self.split {
            SplitMode::Symmetric => (0.5 * d, 0.5 * d),
            SplitMode::SourceAtAlice => (0.0, d),
        };
        Ok(LinkParams::new(self.k1, self.k2, d1, d2)?.with_loss_model(self.loss))
    }
}

impl Default for LinkTemplate {
    fn default() -> Self {
        LinkTemplate::new(DEFAULT_LOSS_PER_KM, SplitMode::Symmetric)
    }
}

/// Amplitudes and overlap exponents of the state after the fibers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    /// Amplitudes multiplying the field operators of each arm (`alpha·t1`, `beta·t2`).
    pub alice: f64,
    pub bob: f64,
    /// `ln E`, with `E` the overlap factor shared by both arms.
    pub ln_overlap: f64,
    /// `ln E_j`, the single-arm overlap exponents entering the local variances.
    pub ln_overlap_alice: f64,
    pub ln_overlap_bob: f64,
    pub sin_phi: f64,
    pub cos_phi: f64,
    /// `cos 2φ`, also available as `1 - 2 sin²φ` without cancellation.
    pub cos_2phi: f64,
    pub cos_theta: f64,
    /// `1 + cos θ · E`, evaluated without cancellation.
    pub denominator: f64,
    /// `Some(cos θ)` when the θ ∈ {0, π} closed forms are exact for this state.
    ///
    /// Unequal source amplitudes give the overlap a phase `(β² - α²) sin 2φ`, so the
    /// closed forms only hold there once `E` underflows.
    pub branch: Option<f64>,
}

impl ArmState {
    pub fn new(src: &SourceParams, link: &LinkParams) -> Result<Self> {
        let (t1, t2) = link.transmissions();
        let (a, b) = (src.alpha(), src.bob_amplitude());
        let (e1, e2) = match link.loss_model() {
            LossModel::Channel => (a, b),
            LossModel::AmplitudeDecay => (a * t1, b * t2),
        };
        let s = src.phi().sin();
        let s2 = s * s;
        let ln_overlap = match link.loss_model() {
            LossModel::Channel => -2.0 * (a * a + b * b) * s2,
            LossModel::AmplitudeDecay => -4.0 * e1 * e2 * s2,
        };
        let branch = src.theta_branch().filter(|_| {
            link.loss_model() == LossModel::AmplitudeDecay || a == b || ln_overlap.exp() == 0.0
        });
        let cos_theta = match src.theta_branch() {
            Some(c) => c,
            None => src.theta().cos(),
        };
        let denominator = normalization_denominator(src.theta(), ln_overlap);
        if !(denominator >= f64::MIN_POSITIVE) {
            return Err(Error::DegenerateState(format!(
                "normalization denominator 1 + cos(theta)·E = {denominator:e} vanishes"
            )));
        }
        Ok(ArmState {
            alice: a * t1,
            bob: b * t2,
            ln_overlap,
            ln_overlap_alice: -4.0 * e1 * e1 * s2,
            ln_overlap_bob: -4.0 * e2 * e2 * s2,
            sin_phi: s,
            cos_phi: src.phi().cos(),
            cos_2phi: 1.0 - 2.0 * s2,
            cos_theta,
            denominator,
            branch,
        })
    }

    pub fn overlap(&self) -> f64 {
        self.ln_overlap.exp()
    }

    /// `1 - E`.
    pub fn one_minus_overlap(&self) -> f64 {
        -self.ln_overlap.exp_m1()
    }

    /// `|N|² = 1 / (1 + cos θ · E)`.
    pub fn norm_sq(&self) -> f64 {
        1.0 / self.denominator
    }
}

/// `1 + cos θ · exp(ln_e)` written as `(1 - E) + 2cos²(θ/2)·E`, both terms nonnegative.
pub(crate) fn normalization_denominator(theta: f64, ln_e: f64) -> f64 {
    let c = (0.5 * theta).cos();
    let one_plus_cos = if (theta - PI).abs() < THETA_BRANCH_TOL { 0.0 } else { 2.0 * c * c };
    -ln_e.exp_m1() + one_plus_cos * ln_e.exp()
}

/// `|N|² = [1 + cos θ · E]⁻¹` with the overlap evaluated according to the link's loss model.
pub fn normalization_sq(src: &SourceParams, link: &LinkParams) -> Result<f64> {
    Ok(ArmState::new(src, link)?.norm_sq())
}

/// Asymmetric Gaussian cloner acting on Bob's arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerParams {
    gamma: f64,
}

/// Added variances of the two clones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerVariances {
    /// Noise added to Bob's copy, `e^{-2γ}/4`.
    pub bob: f64,
    /// Noise added to Eve's copy, `e^{2γ}/4`.
    pub eve: f64,
    /// `eve / bob = e^{4γ}`.
    pub ratio: f64,
}

impl ClonerParams {
    /// `gamma = +inf` is accepted and means a cloner that leaves Bob's mode untouched.
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_nan() || gamma == f64::NEG_INFINITY {
            return Err(Error::domain(format!("gamma must be a number or +inf, got {gamma}")));
        }
        Ok(ClonerParams { gamma })
    }

    /// From the raw asymmetry `xi = gamma + ln2/2`.
    pub fn from_xi(xi: f64) -> Result<Self> {
        Self::new(xi - 0.5 * LN_2)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn xi(&self) -> f64 {
        self.gamma + 0.5 * LN_2
    }

    /// The same cloner with the roles of Bob and Eve exchanged.
    pub fn swapped(&self) -> Self {
        ClonerParams { gamma: -self.gamma }
    }

    pub fn variances(&self) -> ClonerVariances {
        ClonerVariances {
            bob: 0.25 * (-2.0 * self.gamma).exp(),
            eve: 0.25 * (2.0 * self.gamma).exp(),
            ratio: (4.0 * self.gamma).exp(),
        }
    }

    /// Added variance on Bob's copy.
    pub fn bob_noise(&self) -> f64 {
        0.25 * (-2.0 * self.gamma).exp()
    }
}

/// `(σ_B², σ_E², r)` of the cloner.
pub fn cloner_variances(c: &ClonerParams) -> (f64, f64, f64) {
    let v = c.variances();
    (v.bob, v.eve, v.ratio)
}
