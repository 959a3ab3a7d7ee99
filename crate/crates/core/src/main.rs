use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ks2d::dynamics::Dealias;
use ks2d::harness::config::{DataKind, ScaleTo};
use ks2d::harness::{run_scenario, Experiment, ScenarioConfig, EXIT_INVALID_CONFIG};
use ks2d::{KsError, TorusSpec};

#[derive(Parser)]
#[command(name = "ks2d", version, about = "Pseudo-spectral 2D Kuramoto-Sivashinsky laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symbol table, growing modes and the gap constant.
    Modes(Flags),
    /// Integrate with IF-RK4 and write the norm series.
    Simulate(Flags),
    /// Picard iteration for the mild solution.
    Picard(Flags),
    /// Complexified hierarchy along y = alpha_vec t.
    ComplexShift(Flags),
    /// Smallness thresholds, short-time horizon and strip halfwidths.
    Thresholds(Flags),
    /// Operator-norm probes and smoothing-estimate checks.
    Estimates(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum DataArg {
    Zero,
    SingleMode,
    RandomEnvelope,
}

#[derive(Clone, Copy, ValueEnum)]
enum DealiasArg {
    TwoThirds,
    None,
}

#[derive(Args)]
struct Flags {
    /// JSON scenario file; its contents replace every other flag.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    l1: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    l2: f64,
    #[arg(long, default_value_t = 64)]
    n1: usize,
    #[arg(long, default_value_t = 64)]
    n2: usize,
    #[arg(long, value_enum, default_value_t = DataArg::Zero)]
    data: DataArg,
    #[arg(long, default_value_t = 0.0)]
    amplitude: f64,
    /// Envelope exponent p.
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lattice index for single-mode data, e.g. `1,0`.
    #[arg(long, value_delimiter = ',', default_values_t = [1i64, 0])]
    mode: Vec<i64>,
    /// Rescale data to this Wiener norm.
    #[arg(long, conflicts_with = "scale_l2")]
    scale_wiener: Option<f64>,
    /// Rescale data to this L2 norm.
    #[arg(long)]
    scale_l2: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long = "t-final", default_value_t = 1.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1)]
    save_every: usize,
    #[arg(long, value_enum, default_value_t = DealiasArg::TwoThirds)]
    dealias: DealiasArg,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    m_cap: Option<f64>,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0f64, 0.0])]
    alpha_vec: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    probes: usize,
    #[arg(long, default_value = "ks2d-out")]
    out: PathBuf,
    #[arg(long, default_value = "norms.csv")]
    csv: PathBuf,
    #[arg(long, default_value_t = 0)]
    spectra_every: usize,
}

impl Flags {
    fn scenario(&self, experiment: Experiment) -> Result<ScenarioConfig, KsError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| KsError::Config(format!("{}: {e}", path.display())))?;
            let mut cfg = ScenarioConfig::from_json(&text)?;
            cfg.experiment = experiment;
            cfg.validate()?;
            return Ok(cfg);
        }
        if self.mode.len() != 2 || self.alpha_vec.len() != 2 {
            return Err(KsError::Config("--mode and --alpha-vec take two comma-separated values".into()));
        }
        let domain =
            TorusSpec::new(self.l1, self.l2, self.n1, self.n2).map_err(|e| KsError::Config(e.to_string()))?;
        let mut cfg = ScenarioConfig::new(experiment, domain);
        let d = &mut cfg.initial_data;
        d.kind = match self.data {
            DataArg::Zero => DataKind::Zero,
            DataArg::SingleMode => DataKind::SingleMode,
            DataArg::RandomEnvelope => DataKind::RandomEnvelope,
        };
        d.amplitude = self.amplitude;
        d.spectral_exponent = self.exponent;
        d.seed = self.seed;
        d.mode = [self.mode[0], self.mode[1]];
        d.scale_to = self
            .scale_wiener
            .map(ScaleTo::Wiener0)
            .or(self.scale_l2.map(ScaleTo::L2));
        cfg.stepper.dt = self.dt;
        cfg.stepper.t_final = self.t_final;
        cfg.stepper.save_every = self.save_every;
        cfg.stepper.dealias = match self.dealias {
            DealiasArg::TwoThirds => Dealias::TwoThirds,
            DealiasArg::None => Dealias::None,
        };
        cfg.alpha = self.alpha;
        cfg.horizon = self.horizon;
        cfg.m_cap = self.m_cap;
        cfg.complex_shift.levels = self.levels;
        cfg.complex_shift.alpha_vec = [self.alpha_vec[0], self.alpha_vec[1]];
        cfg.estimates.probes = self.probes;
        cfg.outputs.dir = self.out.clone();
        cfg.outputs.csv_path = self.csv.clone();
        cfg.outputs.spectra_every = self.spectra_every;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("KS2D_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let (experiment, flags) = match &cli.command {
        Command::Modes(f) => (Experiment::Modes, f),
        Command::Simulate(f) => (Experiment::Simulate, f),
        Command::Picard(f) => (Experiment::Picard, f),
        Command::ComplexShift(f) => (Experiment::ComplexShift, f),
        Command::Thresholds(f) => (Experiment::Thresholds, f),
        Command::Estimates(f) => (Experiment::Estimates, f),
    };
    let result = flags.scenario(experiment).and_then(|cfg| run_scenario(&cfg));
    match result {
        Ok(manifest) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest.summary).unwrap_or_default()
            );
            for v in &manifest.verdicts {
                println!("verdict: {v}");
            }
            ExitCode::from(manifest.exit_code as u8)
        }
        // Parameter errors found while running are configuration errors too.
        Err(
            e @ (KsError::Config(_)
            | KsError::InvalidTorus(_)
            | KsError::InvalidArgument(_)
            | KsError::NoGap { .. }
            | KsError::UnderResolvedGap { .. }),
        ) => {
            eprintln!("ks2d: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG as u8)
        }
        Err(e) => {
            eprintln!("ks2d: {e}");
            ExitCode::FAILURE
        }
    }
}
