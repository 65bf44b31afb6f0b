//! Sweep configuration from flat `key = value` files and command-line overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::covariance::CovarianceForm;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{photon_decay_distance, LinkTemplate, LossModel, SourceParams, SplitMode, DEFAULT_LOSS_PER_KM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    WitnessCurve,
    Crossing,
    Keyrate,
    OracleCheck,
    DeltaD,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::WitnessCurve => "witness-curve",
            Scenario::Crossing => "crossing",
            Scenario::Keyrate => "keyrate",
            Scenario::OracleCheck => "oracle-check",
            Scenario::DeltaD => "delta-d",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "witness-curve" => Ok(Scenario::WitnessCurve),
            "crossing" => Ok(Scenario::Crossing),
            "keyrate" => Ok(Scenario::Keyrate),
            "oracle-check" => Ok(Scenario::OracleCheck),
            "delta-d" => Ok(Scenario::DeltaD),
            other => Err(Error::config("scenario", format!("unknown scenario `{other}`"))),
        }
    }
}

/// Amplitude used when a scenario other than `oracle-check` leaves `alpha` unset.
pub const DEFAULT_ALPHA: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Unset means [`DEFAULT_ALPHA`], or the built-in grid for `oracle-check`.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub phi: f64,
    pub theta: f64,
    pub k: f64,
    pub gamma: Option<f64>,
    pub lambda: f64,
    /// Unset means twice the one-photon distance of `alpha`.
    pub d_max: Option<f64>,
    pub steps: usize,
    pub split: SplitMode,
    pub loss: LossModel,
    pub covariance: CovarianceForm,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub out: Option<PathBuf>,
    pub notes: Option<PathBuf>,
    pub exec: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scenario: Scenario::WitnessCurve,
            alpha: None,
            beta: None,
            phi: 0.1,
            theta: PI,
            k: DEFAULT_LOSS_PER_KM,
            gamma: None,
            lambda: -10.0,
            d_max: None,
            steps: 201,
            split: SplitMode::Symmetric,
            loss: LossModel::Channel,
            covariance: CovarianceForm::Printed,
            gamma_min: -1.3,
            gamma_max: 3.0,
            out: None,
            notes: None,
            exec: Execution::default(),
        }
    }
}

fn parse_f64(field: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let x = match v {
        "pi" => PI,
        "-pi" => -PI,
        _ => {
            if let Some(den) = v.strip_prefix("pi/") {
                PI / parse_f64(field, den)?
            } else {
                v.parse::<f64>().map_err(|_| Error::config(field, format!("`{v}` is not a number")))?
            }
        }
    };
    if x.is_nan() {
        return Err(Error::config(field, "NaN is not allowed"));
    }
    Ok(x)
}

fn parse_optional(field: &str, v: &str) -> Result<Option<f64>> {
    match v.trim() {
        "none" | "" => Ok(None),
        other => parse_f64(field, other).map(Some),
    }
}

fn reparse<T, E: std::fmt::Display>(field: &str, r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| Error::config(field, e.to_string()))
}

/// `key = value` pairs from a config file body; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::config(format!("line {}", n + 1), format!("expected key = value, got `{line}`")));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl SweepConfig {
    pub fn for_scenario(scenario: Scenario) -> Self {
        SweepConfig { scenario, ..Self::default() }
    }

    /// Sets one field by name. Dashes and underscores are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let field = key.as_str();
        match field {
            "scenario" => self.scenario = value.parse()?,
            "alpha" => self.alpha = parse_optional(field, value)?,
            "beta" => self.beta = parse_optional(field, value)?,
            "phi" => self.phi = parse_f64(field, value)?,
            "theta" => self.theta = parse_f64(field, value)?,
            "K" | "k" => self.k = parse_f64("K", value)?,
            "gamma" => self.gamma = parse_optional(field, value)?,
            "lambda" => self.lambda = parse_f64(field, value)?,
            "d-max" => self.d_max = parse_optional(field, value)?,
            "steps" => self.steps = reparse(field, value.trim().parse::<usize>())?,
            "split" => self.split = value.trim().parse()?,
            "loss" => self.loss = value.trim().parse()?,
            "covariance" => self.covariance = value.trim().parse()?,
            "gamma-min" => self.gamma_min = parse_f64(field, value)?,
            "gamma-max" => self.gamma_max = parse_f64(field, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "notes" => self.notes = Some(PathBuf::from(value.trim())),
            "exec" => {
                self.exec = match value.trim() {
                    "serial" => Execution::Serial,
                    "parallel" => Execution::Parallel,
                    other => return Err(Error::config(field, format!("unknown execution mode `{other}`"))),
                }
            }
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    pub fn apply_pairs<'a, I>(&mut self, pairs: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Loads a config file over `self`. A `scenario` key in the file is ignored when
    /// `keep_scenario` is set, so that the subcommand wins.
    pub fn load_file(&mut self, path: &Path, keep_scenario: bool) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        let scenario = self.scenario;
        let pairs = parse_pairs(&text)?;
        self.apply_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        if keep_scenario {
            self.scenario = scenario;
        }
        Ok(())
    }

    pub fn alpha_or_default(&self) -> f64 {
        self.alpha.unwrap_or(DEFAULT_ALPHA)
    }

    pub fn source(&self) -> Result<SourceParams> {
        let alpha = self.alpha_or_default();
        let s = SourceParams::new(alpha, self.phi, self.theta).map_err(|e| {
            let field = if !(alpha > 0.0) || !alpha.is_finite() {
                "alpha"
            } else if !(0.0..=PI / 2.0).contains(&self.phi) {
                "phi"
            } else {
                "theta"
            };
            Error::config(field, e.to_string())
        })?;
        match self.beta {
            Some(b) => s.with_bob_amplitude(b).map_err(|e| Error::config("beta", e.to_string())),
            None => Ok(s),
        }
    }

    pub fn template(&self) -> LinkTemplate {
        LinkTemplate::new(self.k, self.split).with_loss_model(self.loss)
    }

    /// Scan range in km: the configured value, or twice the one-photon distance.
    pub fn d_max_or_default(&self) -> f64 {
        if let Some(d) = self.d_max {
            return d;
        }
        let alpha = self.alpha_or_default().min(self.beta.unwrap_or(f64::INFINITY));
        match photon_decay_distance(alpha, self.k, 1.0) {
            Ok(d) if d > 0.0 => 2.0 * d,
            _ => 100.0,
        }
    }

    /// Distances of the sweep, `steps` points from 0 to `d_max` inclusive.
    pub fn distances(&self) -> Vec<f64> {
        let d_max = self.d_max_or_default();
        let n = self.steps;
        (0..n).map(|i| d_max * i as f64 / (n - 1) as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario != Scenario::OracleCheck || self.alpha.is_some() {
            self.source()?;
        }
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return Err(Error::config("K", format!("must be finite and >= 0, got {}", self.k)));
        }
        if self.steps < 2 {
            return Err(Error::config("steps", format!("must be >= 2, got {}", self.steps)));
        }
        if let Some(d) = self.d_max {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::config("d-max", format!("must be finite and > 0, got {d}")));
            }
        }
        if !self.lambda.is_finite() {
            return Err(Error::config("lambda", "must be finite"));
        }
        if self.gamma == Some(f64::NEG_INFINITY) {
            return Err(Error::config("gamma", "must not be -inf"));
        }
        if !(self.gamma_min < self.gamma_max) || !self.gamma_min.is_finite() || !self.gamma_max.is_finite() {
            return Err(Error::config("gamma-min", "need finite gamma-min < gamma-max"));
        }
        if self.scenario == Scenario::Keyrate && self.gamma.is_none() {
            return Err(Error::config("gamma", "the keyrate scenario needs a cloner gamma"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = SweepConfig::default();
        let pairs = parse_pairs("# recipe\nalpha = 100\nphi=0.1 # small\ntheta = pi\nd_max = 300\nsplit = source-at-alice\n").unwrap();
        c.apply_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
        assert_eq!(c.alpha, Some(100.0));
        assert_eq!(c.theta, PI);
        assert_eq!(c.d_max, Some(300.0));
        assert_eq!(c.split, SplitMode::SourceAtAlice);
        c.set("alpha", "10").unwrap();
        assert_eq!(c.alpha, Some(10.0));
        c.validate().unwrap();
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = SweepConfig::default();
        match c.set("phi", "abc") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "phi"),
            other => panic!("{other:?}"),
        }
        c.steps = 1;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "steps"),
            other => panic!("{other:?}"),
        }
        let mut c = SweepConfig::default();
        c.alpha = Some(-1.0);
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("{other:?}"),
        }
        assert!(parse_pairs("alpha 3").is_err());
        assert!(SweepConfig::default().set("colour", "red").is_err());
        let k = SweepConfig::for_scenario(Scenario::Keyrate);
        assert!(matches!(k.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn default_range_is_two_photon_distances() {
        let c = SweepConfig::default();
        let d1 = photon_decay_distance(1000.0, DEFAULT_LOSS_PER_KM, 1.0).unwrap();
        assert!((c.d_max_or_default() - 2.0 * d1).abs() < 1e-9);
        let d = c.distances();
        assert_eq!(d.len(), 201);
        assert_eq!(d[0], 0.0);
        assert!((d[200] - 2.0 * d1).abs() < 1e-9);
    }
}
