//! Distances at which 𝒲 crosses a threshold Λ, numerically and from closed forms.

use std::fmt;

use crate::covariance::{eavesdropping_witness, witness_w, CovarianceForm, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{ClonerParams, LinkTemplate, SourceParams};

/// Threshold `-½ ln 15` below which the closed-form crossing distance has no real value.
pub fn gamma_threshold() -> f64 {
    -0.5 * 15f64.ln()
}

/// 𝒲 of the vacuum, the common large-distance limit, `(15/16)²`.
pub const VACUUM_WITNESS: f64 = 225.0 / 256.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Points of the uniform bracketing scan on `[0, d_max]`, endpoints included.
    pub grid_points: usize,
    /// Bisection stops once the bracket is narrower than this (km) and the residual is small.
    pub tolerance_km: f64,
    pub form: CovarianceForm,
    pub exec: Execution,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions {
            grid_points: 512,
            tolerance_km: 1e-6,
            form: CovarianceForm::Printed,
            exec: Execution::default(),
        }
    }
}

/// Numeric crossing next to the closed-form distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    /// First root of `𝒲(d) = Λ` on the scanned interval.
    pub d_numeric: Option<f64>,
    /// `𝒲(d_numeric) - Λ`.
    pub residual: Option<f64>,
    /// `(2/K) ln(√(8/15) α sinφ)`.
    pub d_closed_d0: Option<f64>,
    /// `(2/K) ln[√(8/15) (1 - e^{-2γ}/15)⁻¹ α² sin²φ]`, only when a cloner is given.
    pub d_closed_gamma: Option<f64>,
    /// `(2/K) ln[α² sin²φ / (F(γ) - Λ/F(γ))]`.
    pub d_closed_gamma_lambda: Option<f64>,
    /// `(2/K) ln[(15/16 - 16Λ/15) / (F(γ) - Λ/F(γ))]`.
    pub delta_d: Option<f64>,
    pub lambda: f64,
    pub gamma: Option<f64>,
}

impl CrossingReport {
    pub fn below_gamma_threshold(&self) -> bool {
        self.gamma.is_some_and(|g| g < gamma_threshold())
    }
}

fn fmt_km(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.6} km"),
        None => "NONE".to_string(),
    }
}

impl fmt::Display for CrossingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gamma {
            Some(g) => writeln!(f, "gamma                 {g}")?,
            None => writeln!(f, "gamma                 none (no cloner)")?,
        }
        writeln!(f, "lambda                {}", self.lambda)?;
        writeln!(f, "d numeric             {}", fmt_km(self.d_numeric))?;
        if let Some(r) = self.residual {
            writeln!(f, "residual W - lambda   {r:.3e}")?;
        }
        writeln!(f, "d0 closed form        {}", fmt_km(self.d_closed_d0))?;
        if self.gamma.is_some() {
            writeln!(f, "d(gamma) closed form  {}", fmt_km(self.d_closed_gamma))?;
        }
        writeln!(f, "d(gamma,lambda)       {}", fmt_km(self.d_closed_gamma_lambda))?;
        writeln!(f, "delta d closed form   {}", fmt_km(self.delta_d))?;
        let g0 = gamma_threshold();
        if self.below_gamma_threshold() {
            write!(f, "verdict               gamma < gamma_0 = {g0:.4}")
        } else {
            write!(f, "verdict               gamma_0 = {g0:.4} not exceeded")
        }
    }
}

fn ln_or_none(x: f64) -> Option<f64> {
    (x > 0.0 && x.is_finite()).then(|| x.ln())
}

/// `F(γ) = (15/16)(1 - e^{-2γ}/15)`; `None` means no cloner.
pub fn f_gamma(gamma: Option<f64>) -> f64 {
    let noise = gamma.map_or(0.0, |g| (-2.0 * g).exp());
    15.0 / 16.0 * (1.0 - noise / 15.0)
}

/// Closed-form crossing distances, evaluated as printed. A non-positive logarithm
/// argument leaves the field empty.
pub fn crossing_closed_forms(src: &SourceParams, k: f64, gamma: Option<f64>, lambda: f64) -> CrossingReport {
    let alpha = src.alpha();
    let s = src.phi().sin();
    let pre = 2.0 / k;
    let root = (8.0f64 / 15.0).sqrt();
    let d0 = ln_or_none(root * alpha * s).map(|l| pre * l);
    let d_gamma = gamma.and_then(|g| {
        let bracket = 1.0 - (-2.0 * g).exp() / 15.0;
        ln_or_none(root / bracket * alpha * alpha * s * s).filter(|_| bracket > 0.0).map(|l| pre * l)
    });
    let f = f_gamma(gamma);
    let denom = f - lambda / f;
    let (d_gl, dd) = if f > 0.0 && denom > 0.0 {
        (
            ln_or_none(alpha * alpha * s * s / denom).map(|l| pre * l),
            ln_or_none((15.0 / 16.0 - 16.0 / 15.0 * lambda) / denom).map(|l| pre * l),
        )
    } else {
        (None, None)
    };
    CrossingReport {
        d_numeric: None,
        residual: None,
        d_closed_d0: d0,
        d_closed_gamma: d_gamma,
        d_closed_gamma_lambda: d_gl,
        delta_d: dd,
        lambda,
        gamma,
    }
}

/// First root of `f` on `[0, d_max]`: uniform scan to bracket, then bisection.
///
/// Returns `(root, f(root))`, or `None` when the scan sees no sign change.
pub fn first_root<F>(f: F, d_max: f64, opts: &CrossingOptions, residual_tol: f64) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    if !(d_max > 0.0) || !d_max.is_finite() {
        return Err(Error::domain(format!("d_max must be finite and > 0, got {d_max}")));
    }
    let n = opts.grid_points.max(2);
    let grid = |i: usize| d_max * i as f64 / (n - 1) as f64;
    let values = opts.exec.try_map(n, |i| f(grid(i)))?;
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("witness is not finite at d = {} km", grid(bad))));
    }
    for i in 0..n - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            return Ok(Some((grid(i), 0.0)));
        }
        if fa.signum() != fb.signum() {
            return bisect(&f, (grid(i), fa), (grid(i + 1), fb), opts.tolerance_km, residual_tol).map(Some);
        }
    }
    if values[n - 1] == 0.0 {
        return Ok(Some((grid(n - 1), 0.0)));
    }
    Ok(None)
}

fn bisect<F>(f: &F, lo: (f64, f64), hi: (f64, f64), tol: f64, residual_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..400 {
        let best = if lo.1.abs() <= hi.1.abs() { lo } else { hi };
        let width = hi.0 - lo.0;
        if (width <= tol && best.1.abs() <= residual_tol) || width <= 4.0 * f64::EPSILON * hi.0.abs() {
            return Ok(best);
        }
        let mid = 0.5 * (lo.0 + hi.0);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == lo.1.signum() {
            lo = (mid, fm);
        } else {
            hi = (mid, fm);
        }
    }
    Err(Error::Numerical("bisection did not converge".into()))
}

/// First distance in `[0, d_max]` where 𝒲 equals `lambda`, plus the closed forms.
pub fn crossing_distance_numeric(
    src: &SourceParams,
    template: &LinkTemplate,
    cloner: Option<&ClonerParams>,
    lambda: f64,
    d_max: f64,
    opts: &CrossingOptions,
) -> Result<CrossingReport> {
    let f = |d: f64| -> Result<f64> {
        let link = template.at(d)?;
        Ok(eavesdropping_witness(src, &link, cloner, opts.form)? - lambda)
    };
    let root = first_root(f, d_max, opts, 1e-9 * lambda.abs().max(1.0))?;
    let mut report = crossing_closed_forms(src, template.k2, cloner.map(|c| c.gamma()), lambda);
    report.d_numeric = root.map(|r| r.0);
    report.residual = root.map(|r| r.1);
    Ok(report)
}

/// 𝒲 of the vacuum with the cloner's noise on Bob's arm: the large-distance limit.
pub fn asymptotic_witness(cloner: Option<&ClonerParams>) -> f64 {
    let noise = cloner.map_or(0.0, |c| c.bob_noise());
    witness_w(&CovarianceMatrix::vacuum().with_bob_noise(noise)).value
}

/// Smallest γ for which the large-distance limit of 𝒲 exceeds `lambda`, i.e. below which
/// a curve starting under `lambda` can never reach it. `None` when `lambda >= (15/16)²`.
pub fn asymptotic_gamma_threshold(lambda: f64) -> Option<f64> {
    if lambda >= VACUUM_WITNESS {
        return None;
    }
    let g = |gamma: f64| asymptotic_witness(Some(&ClonerParams::new(gamma).ok()?)).partial_cmp(&lambda);
    let (mut lo, mut hi) = (-40.0, 40.0);
    if g(lo) != Some(std::cmp::Ordering::Less) {
        return Some(f64::NEG_INFINITY);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) == Some(std::cmp::Ordering::Less) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::{LinkParams, SplitMode, DEFAULT_LOSS_PER_KM};

    fn src(alpha: f64, phi: f64) -> SourceParams {
        SourceParams::new(alpha, phi, PI).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert!((gamma_threshold() + 1.35403).abs() < 1e-5);
        let r = crossing_closed_forms(&src(100.0, 0.1), DEFAULT_LOSS_PER_KM, None, 0.0);
        assert!((r.d_closed_d0.unwrap() - 86.4).abs() < 0.05);
        assert!(r.d_closed_gamma.is_none());
        let r = crossing_closed_forms(&src(100.0, 0.1), DEFAULT_LOSS_PER_KM, Some(-2.0), 0.0);
        assert!(r.d_closed_gamma.is_none());
        let r = crossing_closed_forms(&src(100.0, 0.1), DEFAULT_LOSS_PER_KM, Some(-1.0), 0.0);
        assert!(r.d_closed_gamma.is_some());
    }

    #[test]
    fn closed_form_shift_independent_of_alpha() {
        let a = crossing_closed_forms(&src(100.0, 0.1), 0.046, Some(0.3), -10.0).delta_d.unwrap();
        let b = crossing_closed_forms(&src(1e5, 0.1), 0.046, Some(0.3), -10.0).delta_d.unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn separable_state_never_crosses() {
        let s = SourceParams::new(50.0, 0.0, 0.0).unwrap();
        let t = LinkTemplate::new(0.046, SplitMode::Symmetric);
        for lambda in [-10.0, 0.0, 0.8] {
            let r = crossing_distance_numeric(&s, &t, None, lambda, 300.0, &CrossingOptions::default()).unwrap();
            assert!(r.d_numeric.is_none());
        }
    }

    #[test]
    fn root_residual_is_tight() {
        let t = LinkTemplate::new(0.046, SplitMode::Symmetric);
        for lambda in [0.0, -1.0, -10.0] {
            let r = crossing_distance_numeric(&src(100.0, 0.1), &t, None, lambda, 400.0, &CrossingOptions::default()).unwrap();
            let d = r.d_numeric.unwrap();
            let w = eavesdropping_witness(&src(100.0, 0.1), &t.at(d).unwrap(), None, CovarianceForm::Printed).unwrap();
            assert!((w - lambda).abs() <= 1e-9 * lambda.abs().max(1.0));
        }
    }

    #[test]
    fn asymptote_threshold_is_minus_half_ln3_at_zero() {
        let g = asymptotic_gamma_threshold(0.0).unwrap();
        assert!((g + 0.5 * 3f64.ln()).abs() < 1e-10);
        assert!(asymptotic_gamma_threshold(0.9).is_none());
    }

    #[test]
    fn far_field_is_vacuum() {
        let s = src(1000.0, 0.1);
        let link = LinkParams::symmetric(0.046, 900.0).unwrap();
        let w = eavesdropping_witness(&s, &link, None, CovarianceForm::Printed).unwrap();
        assert!((w - VACUUM_WITNESS).abs() < 1e-6);
    }
}
