//! The five command-line scenarios.

use std::fmt::Write as _;

use super::config::{Scenario, SweepConfig};
use super::table::SweepTable;
use crate::covariance::eavesdropping_witness;
use crate::crossing::{crossing_closed_forms, crossing_distance_numeric, gamma_threshold, CrossingOptions, CrossingReport};
use crate::error::{Error, Result};
use crate::info::{alice_bob_information, eve_information_and_key_rate};
use crate::model::ClonerParams;
use crate::moments::entanglement_witness;
use crate::oracles::check::{run_oracle_checks, OracleCheckReport, OracleGrid};

fn cloner(cfg: &SweepConfig) -> Result<Option<ClonerParams>> {
    cfg.gamma.map(|g| ClonerParams::new(g).map_err(|e| Error::config("gamma", e.to_string()))).transpose()
}

/// 𝒮 and 𝒲 versus total distance, with and without the configured cloner.
///
/// Columns: `S`, `W`, and `S_eve`, `W_eve` when a cloner is configured.
pub fn run_witness_curve(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let src = cfg.source()?;
    let template = cfg.template();
    let c = cloner(cfg)?;
    let ds = cfg.distances();
    let mut table =
        if c.is_some() { SweepTable::new("d", &["S", "W", "S_eve", "W_eve"]) } else { SweepTable::new("d", &["S", "W"]) };
    let rows = cfg.exec.try_map(ds.len(), |i| -> Result<Vec<f64>> {
        let link = template.at(ds[i])?;
        let mut v = vec![
            entanglement_witness(&src, &link, None)?.value(),
            eavesdropping_witness(&src, &link, None, cfg.covariance)?,
        ];
        if let Some(c) = &c {
            v.push(entanglement_witness(&src, &link, Some(c))?.value());
            v.push(eavesdropping_witness(&src, &link, Some(c), cfg.covariance)?);
        }
        Ok(v)
    })?;
    for (d, v) in ds.iter().zip(rows) {
        table.push(*d, v);
    }
    Ok(table)
}

fn crossing_options(cfg: &SweepConfig) -> CrossingOptions {
    CrossingOptions { form: cfg.covariance, exec: cfg.exec, ..CrossingOptions::default() }
}

/// Numeric threshold crossing of 𝒲 next to the closed forms.
pub fn run_crossing(cfg: &SweepConfig) -> Result<CrossingReport> {
    cfg.validate()?;
    let src = cfg.source()?;
    let c = cloner(cfg)?;
    crossing_distance_numeric(&src, &cfg.template(), c.as_ref(), cfg.lambda, cfg.d_max_or_default(), &crossing_options(cfg))
}

/// One-row CSV view of a crossing report; absent values are written as NaN.
pub fn crossing_table(r: &CrossingReport) -> SweepTable {
    let mut t = SweepTable::new(
        "lambda",
        &["gamma", "d_numeric", "d0_closed", "d_gamma_closed", "d_gamma_lambda_closed", "delta_d_closed"],
    );
    let o = |x: Option<f64>| x.unwrap_or(f64::NAN);
    t.push(
        r.lambda,
        vec![
            r.gamma.unwrap_or(f64::INFINITY),
            o(r.d_numeric),
            o(r.d_closed_d0),
            o(r.d_closed_gamma),
            o(r.d_closed_gamma_lambda),
            o(r.delta_d),
        ],
    );
    t
}

/// Mutual informations and key rate versus distance.
///
/// Columns: `I_AB`, `I_BE`, `kappa` (nats), then `I_AB_no_eve`.
pub fn run_keyrate(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let src = cfg.source()?;
    let template = cfg.template();
    let c = cloner(cfg)?.ok_or_else(|| Error::config("gamma", "the keyrate scenario needs a cloner gamma"))?;
    let ds = cfg.distances();
    let rows = cfg.exec.try_map(ds.len(), |i| -> Result<Vec<f64>> {
        let link = template.at(ds[i])?;
        let r = eve_information_and_key_rate(&src, &link, &c)?;
        Ok(vec![r.i_ab, r.i_be, r.kappa, alice_bob_information(&src, &link)?])
    })?;
    let mut table = SweepTable::new("d", &["I_AB", "I_BE", "kappa", "I_AB_no_eve"]);
    for (d, v) in ds.iter().zip(rows) {
        table.push(*d, v);
    }
    Ok(table)
}

/// Cloner asymmetry at which the numeric crossing shift reaches a target size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPair {
    /// Target |Δd| in km.
    pub target_km: f64,
    pub gamma: Option<f64>,
    /// `σ_E²/σ_B² = e^{4γ}` at that γ.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaDReport {
    /// Columns per γ: `r`, `d_cross`, `delta_d_numeric`, `delta_d_closed` (km).
    pub table: SweepTable,
    /// Crossing without cloner.
    pub baseline_km: Option<f64>,
    pub pairs: Vec<RatioPair>,
    pub lambda: f64,
}

impl DeltaDReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "lambda {}", self.lambda);
        match self.baseline_km {
            Some(d) => {
                let _ = writeln!(s, "crossing without cloner {d:.9} km");
            }
            None => {
                let _ = writeln!(s, "crossing without cloner NONE");
            }
        }
        for p in &self.pairs {
            match (p.gamma, p.ratio) {
                (Some(g), Some(r)) => {
                    let _ = writeln!(s, "|delta d| = {:.1} m at gamma = {g:.6}, r = {r:.6e}", p.target_km * 1e3);
                }
                _ => {
                    let _ = writeln!(s, "|delta d| = {:.1} m not reached in the search range", p.target_km * 1e3);
                }
            }
        }
        s
    }
}

/// Shift targets reported by [`run_delta_d`]: 1 m and 0.5 m.
pub const DELTA_D_TARGETS_KM: [f64; 2] = [1e-3, 5e-4];

/// Crossing shift `Δd(γ, Λ) = d(γ, Λ) - d(∞, Λ)` over a γ grid, plus the γ (and r) where
/// the shift falls to 1 m and 0.5 m.
pub fn run_delta_d(cfg: &SweepConfig) -> Result<DeltaDReport> {
    cfg.validate()?;
    let src = cfg.source()?;
    let template = cfg.template();
    let d_max = cfg.d_max_or_default();
    let opts = CrossingOptions { exec: crate::exec::Execution::Serial, ..crossing_options(cfg) };
    let crossing = |c: Option<&ClonerParams>| -> Result<Option<f64>> {
        Ok(crossing_distance_numeric(&src, &template, c, cfg.lambda, d_max, &opts)?.d_numeric)
    };
    let baseline = crossing(None)?;
    let n = cfg.steps;
    let gammas: Vec<f64> =
        (0..n).map(|i| cfg.gamma_min + (cfg.gamma_max - cfg.gamma_min) * i as f64 / (n - 1) as f64).collect();
    let rows = cfg.exec.try_map(n, |i| -> Result<Vec<f64>> {
        let c = ClonerParams::new(gammas[i])?;
        let d = crossing(Some(&c))?;
        let shift = match (d, baseline) {
            (Some(d), Some(b)) => d - b,
            _ => f64::NAN,
        };
        let closed = crossing_closed_forms(&src, template.k2, Some(gammas[i]), cfg.lambda).delta_d;
        Ok(vec![c.variances().ratio, d.unwrap_or(f64::NAN), shift, closed.unwrap_or(f64::NAN)])
    })?;
    let mut table = SweepTable::new("gamma", &["r", "d_cross", "delta_d_numeric", "delta_d_closed"]);
    for (g, v) in gammas.iter().zip(rows) {
        table.push(*g, v);
    }

    let shift_at = |g: f64| -> Result<f64> {
        let c = ClonerParams::new(g)?;
        Ok(match (crossing(Some(&c))?, baseline) {
            (Some(d), Some(b)) => (d - b).abs(),
            _ => f64::INFINITY,
        })
    };
    let targets = cfg.exec.try_map(DELTA_D_TARGETS_KM.len(), |i| -> Result<RatioPair> {
        let target = DELTA_D_TARGETS_KM[i];
        let gamma = if baseline.is_some() { bisect_shift(&shift_at, target)? } else { None };
        Ok(RatioPair { target_km: target, gamma, ratio: gamma.map(|g| (4.0 * g).exp()) })
    })?;
    Ok(DeltaDReport { table, baseline_km: baseline, pairs: targets, lambda: cfg.lambda })
}

/// γ where the (decreasing) shift equals `target`, searched on `[γ_0, 20]`.
fn bisect_shift<F: Fn(f64) -> Result<f64>>(shift_at: &F, target: f64) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (gamma_threshold(), 20.0);
    if shift_at(hi)? > target || shift_at(lo)? < target {
        return Ok(None);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if shift_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Route-agreement matrix; an explicit `alpha` is added to the default amplitude grid.
pub fn run_oracle_check(cfg: &SweepConfig) -> Result<OracleCheckReport> {
    cfg.validate()?;
    let mut grid = OracleGrid::default();
    if let Some(a) = cfg.alpha {
        if a > OracleGrid::MAX_ALPHA {
            return Err(Error::config("alpha", format!("oracle checks need alpha <= {}, got {a}", OracleGrid::MAX_ALPHA)));
        }
        if !grid.alphas.contains(&a) {
            grid.alphas.push(a);
        }
    }
    run_oracle_checks(&grid, cfg.exec)
}

/// Result of any scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioOutput {
    Table(SweepTable),
    Crossing(CrossingReport),
    DeltaD(DeltaDReport),
    Oracle(OracleCheckReport),
}

impl ScenarioOutput {
    /// The CSV view of the result, if it has one.
    pub fn table(&self) -> Option<SweepTable> {
        match self {
            ScenarioOutput::Table(t) => Some(t.clone()),
            ScenarioOutput::Crossing(r) => Some(crossing_table(r)),
            ScenarioOutput::DeltaD(r) => Some(r.table.clone()),
            ScenarioOutput::Oracle(_) => None,
        }
    }

    /// Human-readable summary for the terminal, if the scenario has one.
    pub fn summary(&self) -> Option<String> {
        match self {
            ScenarioOutput::Table(_) => None,
            ScenarioOutput::Crossing(r) => Some(format!("{r}\n")),
            ScenarioOutput::DeltaD(r) => Some(r.summary()),
            ScenarioOutput::Oracle(r) => Some(r.render()),
        }
    }
}

pub fn run(cfg: &SweepConfig) -> Result<ScenarioOutput> {
    Ok(match cfg.scenario {
        Scenario::WitnessCurve => ScenarioOutput::Table(run_witness_curve(cfg)?),
        Scenario::Crossing => ScenarioOutput::Crossing(run_crossing(cfg)?),
        Scenario::Keyrate => ScenarioOutput::Table(run_keyrate(cfg)?),
        Scenario::DeltaD => ScenarioOutput::DeltaD(run_delta_d(cfg)?),
        Scenario::OracleCheck => ScenarioOutput::Oracle(run_oracle_check(cfg)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    #[test]
    fn witness_curve_columns() {
        let mut cfg = SweepConfig::for_scenario(Scenario::WitnessCurve);
        cfg.alpha = Some(100.0);
        cfg.steps = 11;
        let t = run_witness_curve(&cfg).unwrap();
        assert_eq!(t.columns, ["S", "W"]);
        assert_eq!(t.rows.len(), 11);
        cfg.gamma = Some(0.0);
        let t = run_witness_curve(&cfg).unwrap();
        assert_eq!(t.columns, ["S", "W", "S_eve", "W_eve"]);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut cfg = SweepConfig::for_scenario(Scenario::Keyrate);
        cfg.gamma = Some(1.0);
        cfg.steps = 33;
        cfg.exec = Execution::Serial;
        let a = run_keyrate(&cfg).unwrap().to_csv_string().unwrap();
        cfg.exec = Execution::Parallel;
        let b = run_keyrate(&cfg).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn keyrate_needs_gamma() {
        let cfg = SweepConfig::for_scenario(Scenario::Keyrate);
        assert!(matches!(run_keyrate(&cfg), Err(Error::Config { .. })));
    }
}
