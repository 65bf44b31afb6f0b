//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use ecqkd::crossing::VACUUM_WITNESS;
use ecqkd::oracles::check::{link_for_transmission, run_oracle_checks, OracleGrid};
use ecqkd::oracles::deviation;
use ecqkd::oracles::dyad::DyadState;
use ecqkd::oracles::fock::build_fock;
use ecqkd::oracles::symplectic::symplectic_eigenvalues_eigen;
use ecqkd::sweep::{self, Scenario, SweepConfig};
use ecqkd::*;

use common::{random_physical, rng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn moment_dev(a: &MomentSet, b: &MomentSet) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|((_, x), (_, y))| ecqkd::oracles::deviation_c(*x, y))
        .fold(0.0, f64::max)
}

struct GridCase {
    src: SourceParams,
    t: f64,
}

fn grid() -> Vec<GridCase> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        for phi in [0.1, 0.5] {
            for theta in [0.0, PI] {
                for t in [1.0, 0.8, 0.5] {
                    out.push(GridCase { src: SourceParams::new(alpha, phi, theta).unwrap(), t });
                }
            }
        }
    }
    out
}

fn c1_moments() -> Result<Outcome> {
    let start = Instant::now();
    let (mut fock_dev, mut dyad_dev) = (0.0f64, 0.0f64);
    for c in grid() {
        let link = link_for_transmission(c.t, LossModel::Channel)?;
        let analytic = moment_set(&c.src, &link)?;
        let fock = build_fock(&c.src, 60)?.moments_after_loss(c.t, c.t);
        let dyad = DyadState::for_link(&c.src, &link)?.moments();
        fock_dev = fock_dev.max(moment_dev(&analytic, &fock));
        dyad_dev = dyad_dev.max(moment_dev(&analytic, &dyad));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        fock_dev <= 1e-8 && dyad_dev <= 1e-9 && secs < 10.0,
        format!("max rel dev Fock {fock_dev:.2e} (tol 1e-8), dyad {dyad_dev:.2e} (tol 1e-9), {secs:.2} s (limit 10 s)"),
    ))
}

fn c2_covariance() -> Result<Outcome> {
    let report = run_oracle_checks(&OracleGrid::default(), Execution::default())?;
    let (mut matched, mut deviating, mut unlogged, mut worst) = (0usize, 0usize, 0usize, 0.0f64);
    for c in grid() {
        let link = link_for_transmission(c.t, LossModel::Channel)?;
        let printed = covariance_matrix(&c.src, &link)?;
        let oracle = DyadState::for_link(&c.src, &link)?.covariance();
        for i in 0..4 {
            for j in 0..4 {
                let (p, o) = (printed.get(i, j), oracle.get(i, j));
                let dev = deviation(p, o);
                if dev <= 1e-9 {
                    matched += 1;
                    continue;
                }
                deviating += 1;
                worst = worst.max(dev);
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                let (p, o) = (printed.get(a, b), oracle.get(a, b));
                let logged = report
                    .notes
                    .entries()
                    .iter()
                    .any(|n| !n.anchor.is_empty() && n.printed == p && n.oracle == o && n.context.contains("[channel]"));
                if !logged {
                    unlogged += 1;
                }
            }
        }
    }
    Ok(outcome(
        unlogged == 0,
        format!(
            "{matched} entries within 1e-9, {deviating} deviating (max rel {worst:.2e}), {unlogged} unlogged; NOTES has {} lines",
            report.notes.entries().len()
        ),
    ))
}

fn c3_fixed_points() -> Result<Outcome> {
    let mut zero_phi_dev = 0.0f64;
    for alpha in [0.1, 1.0, 100.0, 1e4, 1e6] {
        for d in [0.0, 10.0, 200.0] {
            let src = SourceParams::new(alpha, 0.0, 0.0)?;
            let link = LinkParams::symmetric(DEFAULT_LOSS_PER_KM, d)?;
            let w = witness_w(&covariance_matrix(&src, &link)?).value;
            zero_phi_dev = zero_phi_dev.max((w - VACUUM_WITNESS).abs());
        }
    }
    let d1 = photon_decay_distance(1000.0, DEFAULT_LOSS_PER_KM, 1.0)?;
    let src = SourceParams::new(1000.0, 0.1, PI)?;
    let link = LinkParams::symmetric(DEFAULT_LOSS_PER_KM, 3.0 * d1)?;
    let far = witness_w(&covariance_matrix(&src, &link)?).value;
    let far_dev = (far - VACUUM_WITNESS).abs();
    Ok(outcome(
        zero_phi_dev <= 1e-12 && far_dev <= 1e-6,
        format!("|W(phi=0) - 225/256| = {zero_phi_dev:.2e} (tol 1e-12); |W(3 D1 = {:.2} km) - 225/256| = {far_dev:.2e} (tol 1e-6)", 3.0 * d1),
    ))
}

fn c4_sign_structure() -> Result<Outcome> {
    let phis = [0.01, 0.1, 0.5];
    let alphas: Vec<f64> = (0..=50).map(|i| 10f64.powf(-1.0 + 5.0 * i as f64 / 50.0)).collect();
    let lossless = LinkParams::lossless();
    let (mut negative, mut total, mut max_s) = (0usize, 0usize, f64::NEG_INFINITY);
    for &phi in &phis {
        for &alpha in &alphas {
            let s = entanglement_witness(&SourceParams::new(alpha, phi, PI)?, &lossless, None)?.value();
            total += 1;
            if s < 0.0 {
                negative += 1;
            }
            max_s = max_s.max(s);
        }
    }
    let mut extreme = 0.0f64;
    for &phi in &phis {
        for alpha in [alphas[0], *alphas.last().unwrap()] {
            let s = entanglement_witness(&SourceParams::new(alpha, phi, PI)?, &lossless, None)?;
            // |S| / alpha^6 in the log domain
            let scaled = if s.value() == 0.0 { 0.0 } else { (s.ln_abs - 6.0 * alpha.ln()).exp() };
            extreme = extreme.max(scaled);
        }
    }
    let src = SourceParams::new(1000.0, 0.1, PI)?;
    let eve = entanglement_witness(&src, &LinkParams::symmetric(DEFAULT_LOSS_PER_KM, 50.0)?, Some(&ClonerParams::new(0.0)?))?
        .value();
    Ok(outcome(
        negative == total && extreme < 1e-6 && eve > 0.0,
        format!(
            "S<0 at d=0 in {negative}/{total} grid points (max S {max_s:.3e}); max |S|/alpha^6 at alpha extremes {extreme:.3e} (tol 1e-6); S with gamma=0 at 50 km = {eve:.3e} (need > 0)"
        ),
    ))
}

fn c5_gamma_threshold() -> Result<Outcome> {
    let src = SourceParams::new(1e5, 0.1, PI)?;
    let template = LinkTemplate::new(DEFAULT_LOSS_PER_KM, SplitMode::Symmetric);
    let d_max = 2.0 * photon_decay_distance(1e5, DEFAULT_LOSS_PER_KM, 1.0)?;
    let opts = CrossingOptions::default();
    let root = |g: Option<f64>| -> Result<Option<f64>> {
        let c = g.map(ClonerParams::new).transpose()?;
        Ok(crossing_distance_numeric(&src, &template, c.as_ref(), 0.0, d_max, &opts)?.d_numeric)
    };
    let below = root(Some(-2.0))?;
    let base = root(None)?;
    let ds: Vec<Option<f64>> = [-1.0, 0.0, 1.0].iter().map(|&g| root(Some(g))).collect::<Result<_>>()?;
    let d3 = root(Some(3.0))?;
    let all_exist = ds.iter().all(Option::is_some);
    let monotone = all_exist && ds.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap() + 1e-9);
    let converged = matches!((d3, base), (Some(a), Some(b)) if (a - b).abs() <= 1.0);
    let fmt = |x: Option<f64>| x.map_or("NONE".to_string(), |v| format!("{v:.4}"));
    Ok(outcome(
        below.is_none() && all_exist && monotone && converged,
        format!(
            "gamma=-2: {}; gamma=-1,0,1: {}, {}, {} km; gamma=3: {} vs no cloner {} km (tol 1 km)",
            fmt(below),
            fmt(ds[0]),
            fmt(ds[1]),
            fmt(ds[2]),
            fmt(d3),
            fmt(base)
        ),
    ))
}

fn c6_crossing_closed_form() -> Result<Outcome> {
    let src = SourceParams::new(100.0, 0.1, PI)?;
    let template = LinkTemplate::new(0.046, SplitMode::Symmetric);
    let d_max = 2.0 * photon_decay_distance(100.0, 0.046, 1.0)?;
    let coarse = CrossingOptions::default();
    let fine = CrossingOptions { grid_points: 8192, tolerance_km: 1e-9, ..coarse };
    let a = crossing_distance_numeric(&src, &template, None, 0.0, d_max, &coarse)?;
    let b = crossing_distance_numeric(&src, &template, None, 0.0, d_max, &fine)?;
    let (Some(da), Some(db)) = (a.d_numeric, b.d_numeric) else {
        return Ok(outcome(false, "no numeric crossing found"));
    };
    let d0 = a.d_closed_d0.unwrap_or(f64::NAN);
    let rel = (d0 - db).abs() / db;
    Ok(outcome(
        (da - db).abs() <= 1e-6,
        format!(
            "numeric {db:.9} km, refinement shift {:.2e} km (tol 1e-6); closed-form d0 {d0:.6} km, rel dev {rel:.4} (NOTES entry)",
            (da - db).abs()
        ),
    ))
}

fn c7_symplectic() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut r = rng(20240607);
    for _ in 0..100 {
        let (v, _, _) = random_physical(&mut r);
        let a = symplectic_eigenvalues(&v)?;
        let b = symplectic_eigenvalues_eigen(&v);
        worst = worst.max(deviation(a.d_plus, b.d_plus)).max(deviation(a.d_minus, b.d_minus));
    }
    for c in grid() {
        for loss in [LossModel::Channel, LossModel::AmplitudeDecay] {
            let v = covariance_matrix_exact(&c.src, &link_for_transmission(c.t, loss)?)?;
            let a = symplectic_eigenvalues(&v)?;
            let b = symplectic_eigenvalues_eigen(&v);
            worst = worst.max(deviation(a.d_plus, b.d_plus)).max(deviation(a.d_minus, b.d_minus));
        }
    }
    let vac = symplectic_eigenvalues(&CovarianceMatrix::vacuum())?;
    let h = entropy_h(vac.d_plus)? + entropy_h(vac.d_minus)?;
    Ok(outcome(
        worst <= 1e-10 && vac.d_plus == 0.25 && vac.d_minus == 0.25 && h == 0.0,
        format!("max rel dev {worst:.2e} over 100 random + 72 grid matrices (tol 1e-10); vacuum d+ {} d- {} h {h}", vac.d_plus, vac.d_minus),
    ))
}

fn c8_key_rate() -> Result<Outcome> {
    let src = SourceParams::new(1000.0, 0.1, PI)?;
    let (mut violations, mut kappa0) = (0usize, 0.0f64);
    for g in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        for d in [0.0, 25.0, 50.0, 100.0] {
            let r = eve_information_and_key_rate(&src, &LinkParams::symmetric(DEFAULT_LOSS_PER_KM, d)?, &ClonerParams::new(g)?)?;
            if (r.kappa > 0.0) != (g > 0.0) {
                violations += 1;
            }
            if g == 0.0 {
                kappa0 = kappa0.max(r.kappa.abs());
            }
        }
    }
    Ok(outcome(
        violations == 0 && kappa0 <= 1e-12,
        format!("{violations} sign-law violations over 28 points; max |kappa(gamma=0)| {kappa0:.2e} (tol 1e-12)"),
    ))
}

fn c9_delta_d() -> Result<Outcome> {
    let template = LinkTemplate::new(DEFAULT_LOSS_PER_KM, SplitMode::Symmetric);
    let opts = CrossingOptions { tolerance_km: 1e-9, ..CrossingOptions::default() };
    let gammas = [-0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
    let lambda = 0.0;
    let shifts = |alpha: f64| -> Result<Vec<Option<f64>>> {
        let src = SourceParams::new(alpha, 0.1, PI)?;
        let d_max = 2.0 * photon_decay_distance(alpha, DEFAULT_LOSS_PER_KM, 1.0)?;
        let base = crossing_distance_numeric(&src, &template, None, lambda, d_max, &opts)?.d_numeric;
        gammas
            .iter()
            .map(|&g| {
                let c = ClonerParams::new(g)?;
                let d = crossing_distance_numeric(&src, &template, Some(&c), lambda, d_max, &opts)?.d_numeric;
                Ok(d.zip(base).map(|(d, b)| d - b))
            })
            .collect()
    };
    let lo = shifts(1e3)?;
    let hi = shifts(1e5)?;
    let mut spread = 0.0f64;
    let mut complete = true;
    for (a, b) in lo.iter().zip(&hi) {
        match (a, b) {
            (Some(a), Some(b)) => spread = spread.max((a - b).abs()),
            _ => complete = false,
        }
    }
    let vals: Vec<f64> = lo.iter().flatten().map(|x| x.abs()).collect();
    let monotone = complete && vals.windows(2).all(|w| w[1] <= w[0] + 1e-9);

    let mut cfg = SweepConfig::for_scenario(Scenario::DeltaD);
    cfg.alpha = Some(1e3);
    cfg.lambda = lambda;
    cfg.steps = 2;
    let report = sweep::run_delta_d(&cfg)?;
    let pairs: Vec<String> = report
        .pairs
        .iter()
        .zip([2.2, 8.6])
        .map(|(p, claimed)| match p.ratio {
            Some(r) => format!("{:.1} m: r = {r:.4e} (claimed {claimed}, factor {:.3e})", p.target_km * 1e3, r / claimed),
            None => format!("{:.1} m: not reached (claimed r = {claimed})", p.target_km * 1e3),
        })
        .collect();
    Ok(outcome(
        complete && spread <= 1e-3 && monotone,
        format!(
            "alpha 1e3 vs 1e5 max |delta d| spread {spread:.2e} km (tol 1e-3), monotone {monotone}; {}",
            pairs.join("; ")
        ),
    ))
}

fn c10_determinism() -> Result<Outcome> {
    let mut configs = Vec::new();
    for scenario in [Scenario::WitnessCurve, Scenario::Keyrate, Scenario::Crossing, Scenario::DeltaD] {
        let mut cfg = SweepConfig::for_scenario(scenario);
        cfg.gamma = Some(1.0);
        cfg.steps = 64;
        configs.push(cfg);
    }
    let mut mismatches = Vec::new();
    for cfg in &mut configs {
        let mut outputs = Vec::new();
        for exec in [Execution::Serial, Execution::Serial, Execution::Parallel, Execution::Parallel] {
            cfg.exec = exec;
            let table = sweep::run(cfg)?.table().expect("tabular scenario");
            outputs.push(table.to_csv_string()?);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(cfg.scenario.name());
        }
    }
    Ok(outcome(
        mismatches.is_empty(),
        format!("4 scenarios x (2 serial + 2 parallel) runs; mismatching: {mismatches:?}"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("C1 oracle equivalence (moments)", c1_moments),
        ("C2 oracle equivalence (covariance)", c2_covariance),
        ("C3 W fixed points", c3_fixed_points),
        ("C4 sign structure of S", c4_sign_structure),
        ("C5 gamma threshold", c5_gamma_threshold),
        ("C6 crossing closed-form cross-check", c6_crossing_closed_form),
        ("C7 symplectic route agreement", c7_symplectic),
        ("C8 key-rate sign law", c8_key_rate),
        ("C9 delta d properties", c9_delta_d),
        ("C10 determinism and parallel equivalence", c10_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
