use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ecqkd::sweep::{self, Scenario, ScenarioOutput, SweepConfig};
use ecqkd::Error;

/// Entanglement and eavesdropping witness sweeps for entangled coherent state links.
#[derive(Parser, Debug)]
#[command(name = "ecqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// S and W versus distance.
    WitnessCurve(Flags),
    /// Distance at which W crosses the threshold, numeric and closed forms.
    Crossing(Flags),
    /// I_AB, I_BE and key rate versus distance.
    Keyrate(Flags),
    /// Compare analytic formulas against the Fock and dyad oracles.
    OracleCheck(Flags),
    /// Crossing shift versus cloner asymmetry.
    DeltaD(Flags),
}

impl Command {
    fn split(&self) -> (Scenario, &Flags) {
        match self {
            Command::WitnessCurve(f) => (Scenario::WitnessCurve, f),
            Command::Crossing(f) => (Scenario::Crossing, f),
            Command::Keyrate(f) => (Scenario::Keyrate, f),
            Command::OracleCheck(f) => (Scenario::OracleCheck, f),
            Command::DeltaD(f) => (Scenario::DeltaD, f),
        }
    }
}

/// Values are parsed by the library so that `pi`, `pi/2` and `none` work everywhere.
#[derive(Args, Debug)]
struct Flags {
    /// Flat key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Bob's amplitude, or `none` for beta = alpha.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Loss per km.
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<String>,
    /// Cloner asymmetry, `none` for no cloner, `inf` for a transparent one.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long = "d-max", allow_hyphen_values = true)]
    d_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<String>,
    /// symmetric | source-at-alice
    #[arg(long)]
    split: Option<String>,
    /// channel | amplitude-decay
    #[arg(long)]
    loss: Option<String>,
    /// printed | exact
    #[arg(long)]
    covariance: Option<String>,
    #[arg(long = "gamma-min", allow_hyphen_values = true)]
    gamma_min: Option<String>,
    #[arg(long = "gamma-max", allow_hyphen_values = true)]
    gamma_max: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Discrepancy file written by oracle-check.
    #[arg(long)]
    notes: Option<PathBuf>,
    /// Evaluate rows sequentially.
    #[arg(long)]
    serial: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut add = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        add("alpha", &self.alpha);
        add("beta", &self.beta);
        add("phi", &self.phi);
        add("theta", &self.theta);
        add("K", &self.k);
        add("gamma", &self.gamma);
        add("lambda", &self.lambda);
        add("d-max", &self.d_max);
        add("steps", &self.steps);
        add("split", &self.split);
        add("loss", &self.loss);
        add("covariance", &self.covariance);
        add("gamma-min", &self.gamma_min);
        add("gamma-max", &self.gamma_max);
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        add("out", &path(&self.out));
        add("notes", &path(&self.notes));
        if self.serial {
            out.push(("exec", "serial".into()));
        }
        out
    }
}

fn build_config(scenario: Scenario, flags: &Flags) -> ecqkd::Result<SweepConfig> {
    let mut cfg = SweepConfig::for_scenario(scenario);
    if let Some(path) = &flags.config {
        cfg.load_file(path, true)?;
    }
    let pairs = flags.pairs();
    cfg.apply_pairs(pairs.iter().map(|(k, v)| (*k, v.as_str())))?;
    cfg.validate()?;
    Ok(cfg)
}

const DEFAULT_NOTES: &str = "NOTES.txt";

fn execute(cfg: &SweepConfig) -> ecqkd::Result<bool> {
    let output = sweep::run(cfg)?;
    let mut ok = true;
    if let ScenarioOutput::Oracle(report) = &output {
        let path = cfg.notes.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_NOTES));
        report.notes.write_to(&path)?;
        ok = report.all_verified_pass();
    }
    if let Some(summary) = output.summary() {
        if output.table().is_some() && cfg.out.is_none() {
            eprint!("{summary}");
        } else {
            print!("{summary}");
        }
    }
    if let Some(table) = output.table() {
        match &cfg.out {
            Some(path) => sweep::emit_csv(&table, path)?,
            None => {
                let csv = table.to_csv_string()?;
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(csv.as_bytes())?;
                stdout.flush()?;
            }
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (scenario, flags) = cli.command.split();
    let result = build_config(scenario, flags).and_then(|cfg| execute(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one verified oracle check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
