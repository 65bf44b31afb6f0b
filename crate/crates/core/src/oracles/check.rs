//! Route-agreement matrix: closed forms against both oracles, plus formula adjudications.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::cloner::{cloner_moment_set, cloner_output_moments_oracle, ClonerPort};
use super::dyad::{apply_loss_to_dyads, build_dyads, DyadState};
use super::fock::{build_fock, build_fock_with_amplitudes, FockState};
use super::symplectic::symplectic_eigenvalues_eigen;
use super::{deviation, deviation_c};
use crate::covariance::{covariance_matrix, covariance_matrix_exact, witness_w, CovarianceMatrix};
use crate::crossing::{asymptotic_gamma_threshold, crossing_distance_numeric, gamma_threshold, CrossingOptions};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::info::{entropy_h, entropy_h_printed, symplectic_eigenvalues, symplectic_eigenvalues_printed};
use crate::model::{
    photon_decay_distance, propagate_amplitude, Amplitude, ClonerParams, LinkParams, LinkTemplate, LossModel,
    SourceParams, SplitMode, DEFAULT_LOSS_PER_KM,
};
use crate::moments::{apply_cloner_to_moments, entanglement_witness, moment_set, MomentSet, Powers};
use crate::notes::{Discrepancy, Notes};

/// `Verified` checks must pass; `Logged` checks only feed the discrepancy report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckClass {
    Verified,
    Logged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub class: CheckClass,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.class == CheckClass::Logged || self.max_deviation <= self.tolerance
    }
}

/// Parameter grid of the route-agreement matrix. Each transmission is applied to both arms.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub alphas: Vec<f64>,
    pub phis: Vec<f64>,
    pub thetas: Vec<f64>,
    pub transmissions: Vec<f64>,
    pub gammas: Vec<f64>,
    pub n_max: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            alphas: vec![0.5, 1.0, 2.0],
            phis: vec![0.1, 0.5],
            thetas: vec![0.0, PI],
            transmissions: vec![1.0, 0.8, 0.5],
            gammas: vec![-1.0, 0.0, 1.0],
            n_max: 60,
        }
    }
}

impl OracleGrid {
    /// Largest amplitude the number-basis oracle is asked to handle.
    pub const MAX_ALPHA: f64 = 3.0;

    fn cases(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for &a in &self.alphas {
            for &p in &self.phis {
                for &th in &self.thetas {
                    for &t in &self.transmissions {
                        out.push((a, p, th, t));
                    }
                }
            }
        }
        out
    }
}

/// Link of unit loss constant whose arms both transmit amplitude `t`.
pub fn link_for_transmission(t: f64, loss: LossModel) -> Result<LinkParams> {
    let d = -2.0 * t.ln();
    Ok(LinkParams::new(1.0, 1.0, d, d)?.with_loss_model(loss))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheckReport {
    pub checks: Vec<CheckResult>,
    pub notes: Notes,
}

impl OracleCheckReport {
    pub fn all_verified_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match (c.class, c.passed()) {
                (CheckClass::Logged, _) => "LOGGED",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            let _ = writeln!(
                out,
                "[{status:6}] {:58} max_dev={:.3e} tol={:.0e} cases={}",
                c.name, c.max_deviation, c.tolerance, c.cases
            );
        }
        let _ = writeln!(out, "{} discrepancy lines", self.notes.entries().len());
        out
    }
}

struct Acc {
    name: String,
    class: CheckClass,
    tolerance: f64,
    max: f64,
    cases: usize,
}

impl Acc {
    fn new(name: &str, class: CheckClass, tolerance: f64) -> Self {
        Acc { name: name.to_string(), class, tolerance, max: 0.0, cases: 0 }
    }

    fn add(&mut self, dev: f64) {
        self.max = if dev.is_nan() { f64::INFINITY } else { self.max.max(dev) };
        self.cases += 1;
    }

    fn finish(self) -> CheckResult {
        CheckResult { name: self.name, class: self.class, max_deviation: self.max, tolerance: self.tolerance, cases: self.cases }
    }
}

fn moment_deviation(a: &MomentSet, b: &MomentSet) -> f64 {
    a.entries().iter().zip(b.entries().iter()).map(|(x, y)| deviation_c(x.1, y.1)).fold(0.0, f64::max)
}

fn covariance_deviation(a: &CovarianceMatrix, b: &CovarianceMatrix) -> f64 {
    let mut m = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max(deviation(a.get(i, j), b.get(i, j)));
        }
    }
    m
}

const ENTRY_NAMES: [&str; 4] = ["q1", "p1", "q2", "p2"];

/// Per-case oracle values, computed once and reused by several checks.
struct CaseData {
    label: String,
    src: SourceParams,
    t: f64,
    dyad_channel: DyadState,
    dyad_decay: DyadState,
    fock_source: FockState,
    fock_decay: FockState,
}

fn case_data(alpha: f64, phi: f64, theta: f64, t: f64, n_max: usize) -> Result<CaseData> {
    let src = SourceParams::new(alpha, phi, theta)?;
    let dyad_channel = DyadState::for_link(&src, &link_for_transmission(t, LossModel::Channel)?)?;
    let dyad_decay = DyadState::for_link(&src, &link_for_transmission(t, LossModel::AmplitudeDecay)?)?;
    let fock_source = build_fock(&src, n_max)?;
    let fock_decay = build_fock_with_amplitudes(alpha * t, alpha * t, phi, theta, n_max)?;
    Ok(CaseData {
        label: format!("alpha={alpha} phi={phi} theta={theta:.6} t={t}"),
        src,
        t,
        dyad_channel,
        dyad_decay,
        fock_source,
        fock_decay,
    })
}

/// Runs the full route-agreement matrix and collects the discrepancy report.
pub fn run_oracle_checks(grid: &OracleGrid, exec: Execution) -> Result<OracleCheckReport> {
    if let Some(a) = grid.alphas.iter().find(|&&a| a > OracleGrid::MAX_ALPHA) {
        return Err(Error::config("alpha", format!("oracle checks need alpha <= {}, got {a}", OracleGrid::MAX_ALPHA)));
    }
    let cases = grid.cases();
    let data = exec.try_map(cases.len(), |i| {
        let (a, p, th, t) = cases[i];
        case_data(a, p, th, t, grid.n_max)
    })?;

    use CheckClass::{Logged, Verified};
    let mut m_ch_dyad = Acc::new("moments closed form [channel] vs dyad", Verified, 1e-9);
    let mut m_ch_fock = Acc::new("moments closed form [channel] vs Fock/Kraus", Verified, 1e-8);
    let mut m_dec_dyad = Acc::new("moments closed form [amplitude-decay] vs dyad", Verified, 1e-9);
    let mut m_dec_fock = Acc::new("moments closed form [amplitude-decay] vs Fock", Verified, 1e-8);
    let mut m_routes = Acc::new("moments dyad vs Fock/Kraus route", Verified, 1e-8);
    let mut v_ch_dyad = Acc::new("covariance exact [channel] vs dyad", Verified, 1e-9);
    let mut v_ch_fock = Acc::new("covariance exact [channel] vs Fock/Kraus", Verified, 1e-8);
    let mut v_dec_dyad = Acc::new("covariance exact [amplitude-decay] vs dyad", Verified, 1e-9);
    let mut v_dec_fock = Acc::new("covariance exact [amplitude-decay] vs Fock", Verified, 1e-8);
    let mut v_routes = Acc::new("covariance dyad vs Fock/Kraus route", Verified, 1e-8);
    let mut v_pr_ch = Acc::new("covariance block layout [channel] vs dyad", Logged, 1e-9);
    let mut v_pr_dec = Acc::new("covariance block layout [amplitude-decay] vs dyad", Logged, 1e-9);
    let mut loss_models = Acc::new("moments amplitude-decay vs channel", Logged, 1e-9);
    let mut sym = Acc::new("symplectic closed form vs eigen route", Verified, 1e-10);
    let mut trace = Acc::new("dyad trace and hermiticity under loss", Verified, 1e-12);
    let mut semigroup = Acc::new("dyad loss semigroup t(0.9) after t vs t*0.9", Verified, 1e-10);

    let mut notes = Notes::new();
    for c in &data {
        let link_ch = link_for_transmission(c.t, LossModel::Channel)?;
        let link_dec = link_for_transmission(c.t, LossModel::AmplitudeDecay)?;
        let an_ch = moment_set(&c.src, &link_ch)?;
        let an_dec = moment_set(&c.src, &link_dec)?;
        let dy_ch = c.dyad_channel.moments();
        let dy_dec = c.dyad_decay.moments();
        let fk_ch = c.fock_source.moments_after_loss(c.t, c.t);
        let fk_dec = c.fock_decay.moments_after_loss(1.0, 1.0);
        m_ch_dyad.add(moment_deviation(&an_ch, &dy_ch));
        m_ch_fock.add(moment_deviation(&an_ch, &fk_ch));
        m_dec_dyad.add(moment_deviation(&an_dec, &dy_dec));
        m_dec_fock.add(moment_deviation(&an_dec, &fk_dec));
        m_routes.add(moment_deviation(&dy_ch, &fk_ch));
        m_routes.add(moment_deviation(&dy_dec, &fk_dec));
        loss_models.add(moment_deviation(&an_dec, &an_ch));

        let ex_ch = covariance_matrix_exact(&c.src, &link_ch)?;
        let ex_dec = covariance_matrix_exact(&c.src, &link_dec)?;
        let dv_ch = c.dyad_channel.covariance();
        let dv_dec = c.dyad_decay.covariance();
        let fv_ch = c.fock_source.covariance_after_loss(c.t, c.t);
        let fv_dec = c.fock_decay.covariance_after_loss(1.0, 1.0);
        v_ch_dyad.add(covariance_deviation(&ex_ch, &dv_ch));
        v_ch_fock.add(covariance_deviation(&ex_ch, &fv_ch));
        v_dec_dyad.add(covariance_deviation(&ex_dec, &dv_dec));
        v_dec_fock.add(covariance_deviation(&ex_dec, &fv_dec));
        v_routes.add(covariance_deviation(&dv_ch, &fv_ch));
        v_routes.add(covariance_deviation(&dv_dec, &fv_dec));

        for (acc, link, oracle, model) in
            [(&mut v_pr_ch, &link_ch, &dv_ch, "channel"), (&mut v_pr_dec, &link_dec, &dv_dec, "amplitude-decay")]
        {
            let printed = covariance_matrix(&c.src, link)?;
            acc.add(covariance_deviation(&printed, oracle));
            for i in 0..4 {
                for j in i..4 {
                    let (p, o) = (printed.get(i, j), oracle.get(i, j));
                    if deviation(p, o) > acc.tolerance {
                        notes.push(Discrepancy::new(
                            covariance_anchor(i, j),
                            p,
                            o,
                            format!("V({},{}) [{model}] {}", ENTRY_NAMES[i], ENTRY_NAMES[j], c.label),
                        ));
                    }
                }
            }
        }

        for v in [&ex_ch, &ex_dec] {
            let a = symplectic_eigenvalues(v)?;
            let b = symplectic_eigenvalues_eigen(v);
            sym.add(deviation(a.d_plus, b.d_plus).max(deviation(a.d_minus, b.d_minus)));
        }

        let herm = if c.dyad_channel.is_hermitian(1e-13) { 0.0 } else { 1.0 };
        trace.add((c.dyad_channel.trace() - 1.0).norm().max(herm));
        let step = apply_loss_to_dyads(&c.dyad_channel, 0.9, 0.9)?;
        let direct = apply_loss_to_dyads(&build_dyads(&c.src)?, c.t * 0.9, c.t * 0.9)?;
        semigroup.add(moment_deviation(&step.moments(), &direct.moments()));
    }

    let mut checks = vec![
        m_ch_dyad.finish(),
        m_ch_fock.finish(),
        m_dec_dyad.finish(),
        m_dec_fock.finish(),
        m_routes.finish(),
        v_ch_dyad.finish(),
        v_ch_fock.finish(),
        v_dec_dyad.finish(),
        v_dec_fock.finish(),
        v_routes.finish(),
        v_pr_ch.finish(),
        v_pr_dec.finish(),
        loss_models.finish(),
        sym.finish(),
        trace.finish(),
        semigroup.finish(),
    ];
    let (cloner_checks, cloner_notes) = cloner_checks(&data, &grid.gammas)?;
    checks.extend(cloner_checks);
    notes.extend(cloner_notes);
    notes.extend(formula_adjudications(exec)?);
    Ok(OracleCheckReport { checks, notes })
}

fn covariance_anchor(i: usize, j: usize) -> String {
    match (i, j) {
        (0, 0) | (1, 1) => "a1'(d1) = |alpha|^2/2 (|N|^2 f(theta,phi,d1) - 1) e^{-K1 d1} + 1/4".into(),
        (2, 2) | (3, 3) => "a2'(d2) = |alpha|^2/2 (|N|^2 f(theta,phi,d2) - 1) e^{-K2 d2} + 1/4".into(),
        (0, 2) => "b' = |alpha|^2/2 (|N|^2 g - cos 2phi) e^{-(K1 d1 + K2 d2)/2}".into(),
        (1, 3) => "c' = |alpha|^2/2 (|N|^2 g - 1) e^{-(K1 d1 + K2 d2)/2}".into(),
        _ => format!("V = [[A1, C], [C^T, A2]], zero entry ({i},{j})"),
    }
}

fn cloner_checks(data: &[CaseData], gammas: &[f64]) -> Result<(Vec<CheckResult>, Notes)> {
    use CheckClass::Verified;
    let mut moments = Acc::new("cloner moments closed form vs ancilla expansion", Verified, 1e-12);
    let mut means = Acc::new("cloner mean preservation (exact)", Verified, 0.0);
    let mut bob_var = Acc::new("cloner Bob quadrature variance increment", Verified, 1e-12);
    let mut eve_var = Acc::new("cloner Eve quadrature variance increment", Verified, 1e-12);
    let mut notes = Notes::new();
    for c in data {
        let base = c.dyad_channel.moments();
        for &g in gammas {
            let cl = ClonerParams::new(g)?;
            let oracle = cloner_moment_set(&c.dyad_channel, &cl, ClonerPort::Bob);
            moments.add(moment_deviation(&apply_cloner_to_moments(&base, &cl), &oracle));
            for port in [ClonerPort::Bob, ClonerPort::Eve] {
                let out = cloner_output_moments_oracle(&c.dyad_channel, &cl, port, Powers::A2);
                means.add((out - base.m_a2).norm());
            }
            let v = cl.variances();
            for (acc, port, noise) in [(&mut bob_var, ClonerPort::Bob, v.bob), (&mut eve_var, ClonerPort::Eve, v.eve)] {
                for quad in [1.0, -1.0] {
                    let vin = quadrature_variance(|p| c.dyad_channel.moment(p), quad);
                    let vout = quadrature_variance(|p| cloner_output_moments_oracle(&c.dyad_channel, &cl, port, p), quad);
                    acc.add(deviation(vout - vin, noise));
                }
            }
        }
    }
    // The cross moment ⟨a1 a2† a2⟩ picks up δ⟨a1⟩; recorded once against the unchanged value.
    if let Some(c) = data.iter().find(|c| c.t == 1.0 && c.src.theta() == 0.0) {
        let cl = ClonerParams::new(0.0)?;
        let before = c.dyad_channel.moment(Powers::A1_N2).re;
        let after = cloner_output_moments_oracle(&c.dyad_channel, &cl, ClonerPort::Bob, Powers::A1_N2).re;
        notes.push(Discrepancy::new(
            "<a1 a2+ a2> unchanged under the cloner",
            before,
            after,
            format!("gamma=0 {}; vacuum ancillas add e^(-2gamma)/2 <a1>", c.label),
        ));
    }
    Ok((vec![moments.finish(), means.finish(), bob_var.finish(), eve_var.finish()], notes))
}

/// Variance of `q` (`sign = 1`) or `p` (`sign = -1`) of mode 2.
fn quadrature_variance<F: Fn(Powers) -> Complex64>(m: F, sign: f64) -> f64 {
    let mu = m(Powers::A2);
    let a2 = m(Powers::A2_SQ) - mu * mu;
    let nc = m(Powers::N2).re - mu.norm_sqr();
    0.25 + 0.5 * (nc + sign * a2.re)
}

/// Closed forms that can be checked against a reference without a grid.
fn formula_adjudications(exec: Execution) -> Result<Notes> {
    let mut notes = Notes::new();
    let a = 0.25f64;
    notes.push(Discrepancy::new(
        "W = 1 - a^4 - 2a^2 (phi = 0)",
        1.0 - a.powi(4) - 2.0 * a * a,
        witness_w(&CovarianceMatrix::vacuum()).value,
        "a=1/4, b=c=0; the determinant definition gives (1-a^2)^2",
    ));
    notes.push(Discrepancy::new(
        "h(x) = (x+1/4)ln(x+1/4) + (x-1/4)ln(x-1/4)",
        entropy_h_printed(0.25),
        entropy_h(0.25)?,
        "vacuum x=1/4 must have zero entropy",
    ));
    notes.push(Discrepancy::new(
        "h(x) = (x+1/4)ln(x+1/4) + (x-1/4)ln(x-1/4)",
        entropy_h_printed(0.75),
        entropy_h(0.75)?,
        "x=3/4 (thermal state, nu=3/2)",
    ));

    let src = SourceParams::new(1.0, 0.5, PI)?;
    let v = covariance_matrix_exact(&src, &LinkParams::symmetric(DEFAULT_LOSS_PER_KM, 10.0)?)?;
    let eig = symplectic_eigenvalues_eigen(&v);
    let printed = symplectic_eigenvalues_printed(&v);
    notes.push(Discrepancy::new(
        "d+ = sqrt((Delta + sqrt(Delta^2 - sqrt(Delta^2 - 4 det V)))/2)",
        printed.map_or(f64::NAN, |p| p.d_plus),
        eig.d_plus,
        "alpha=1 phi=0.5 theta=pi d=10 km; reference is |eig(Omega V)|",
    ));
    notes.push(Discrepancy::new(
        "d- = sqrt((Delta - sqrt(Delta^2 - sqrt(Delta^2 - 4 det V)))/2)",
        printed.map_or(f64::NAN, |p| p.d_minus),
        eig.d_minus,
        "alpha=1 phi=0.5 theta=pi d=10 km; reference is |eig(Omega V)|",
    ));

    // Moments written without cosθ, evaluated at θ = π.
    let src = SourceParams::new(1.0, 0.1, PI)?;
    let st = crate::model::ArmState::new(&src, &LinkParams::lossless())?;
    let dy = build_dyads(&src)?;
    notes.push(Discrepancy::new(
        "<a1 a2+> = alpha^2 |N|^2 (cos 2phi + e^{-4 alpha^2 sin^2 phi})",
        st.norm_sq() * (st.cos_2phi + st.overlap()),
        dy.moment(Powers::A1_A2DAG).re,
        "alpha=1 phi=0.1 theta=pi; the overlap term carries cos(theta)",
    ));

    let s100 = SourceParams::new(100.0, 0.1, PI)?;
    let witness = entanglement_witness(&s100, &LinkParams::lossless(), None)?;
    notes.push(Discrepancy::new(
        "S < 0 at all finite alpha (theta = pi)",
        -1.0,
        witness.sign,
        format!("sign of S at alpha=100 phi=0.1 theta=pi d=0; ln|S| = {:.6}", witness.ln_abs),
    ));

    let template = LinkTemplate::new(DEFAULT_LOSS_PER_KM, SplitMode::Symmetric);
    let opts = CrossingOptions { exec, ..CrossingOptions::default() };
    let r = crossing_distance_numeric(&s100, &template, None, 0.0, 400.0, &opts)?;
    if let (Some(num), Some(d0)) = (r.d_numeric, r.d_closed_d0) {
        notes.push(Discrepancy::new(
            "d0 = (2/K) ln(sqrt(8/15) alpha sin phi)",
            d0,
            num,
            "alpha=100 phi=0.1 K=0.046 symmetric, W=0 crossing by bisection",
        ));
    }
    if let Some(g) = asymptotic_gamma_threshold(0.0) {
        notes.push(Discrepancy::new(
            "gamma_0 = -(1/2) ln 15",
            gamma_threshold(),
            g,
            "smallest gamma whose large-distance W (vacuum + noise on both A2 variances) is positive",
        ));
    }
    let d100 = photon_decay_distance(100.0, DEFAULT_LOSS_PER_KM, 1.0)?;
    let at = propagate_amplitude(Amplitude::real(100.0), DEFAULT_LOSS_PER_KM, 200.2)?;
    notes.push(Discrepancy::new(
        "alpha(d) = alpha e^{-K d/2}: 100 -> 10 at d = 200.2 km",
        10.0,
        at.re(),
        format!("200.2 km is the one-photon distance D_1(100) = {d100:.4} km; 100 -> 10 needs D_1/2"),
    ));
    Ok(notes)
}
