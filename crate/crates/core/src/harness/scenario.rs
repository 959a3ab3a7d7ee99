use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{Experiment, ScenarioConfig};
use super::initial::make_initial_data;
use crate::analysis::{calibrate_constant, continuation_monitor_with, thresholds, NormSeries, Verdict};
use crate::dynamics::{complex_shift_solve, picard_mild_solve, ComplexShiftConfig, Integrator, PicardConfig};
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::io::write_spectra_file;
use crate::linear::{i_norm_bound, measure_operator_norms, random_probes, smoothing_check, Trajectory};
use crate::spectral::build_symbol_table;

pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub version: String,
    pub experiment: Experiment,
    /// SHA-256 of the compact JSON form of the config.
    pub config_hash: String,
    pub start_unix: f64,
    pub end_unix: f64,
    pub verdicts: Vec<Value>,
    pub outputs: Vec<OutputFile>,
    pub exit_code: i32,
    /// Short human-oriented result, printed by the CLI.
    pub summary: Value,
}

impl RunManifest {
    /// Every listed file exists with the recorded size.
    pub fn verify_outputs(&self) -> bool {
        self.outputs
            .iter()
            .all(|o| fs::metadata(&o.path).map(|m| m.len() == o.bytes).unwrap_or(false))
    }
}

pub fn config_hash(cfg: &ScenarioConfig) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_vec(cfg)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: impl AsRef<Path>) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(p, text)?;
        Ok(())
    }

    fn norms(&mut self, name: &Path, traj: &Trajectory) -> Result<()> {
        let p = self.path(name);
        let mut out = BufWriter::new(fs::File::create(p)?);
        NormSeries::from_trajectory(traj).write_csv(&mut out)?;
        std::io::Write::flush(&mut out)?;
        Ok(())
    }

    fn spectra(&mut self, traj: &Trajectory, every: usize) -> Result<()> {
        if every == 0 {
            return Ok(());
        }
        for (n, (t, f)) in traj.times.iter().zip(&traj.fields).enumerate() {
            if n % every == 0 {
                let p = self.path(format!("spectra_{n:06}.bin"));
                write_spectra_file(&p, f, *t)?;
            }
        }
        Ok(())
    }

    fn manifest_entries(&self) -> Result<Vec<OutputFile>> {
        self.files
            .iter()
            .map(|p| {
                Ok(OutputFile {
                    path: p.clone(),
                    bytes: fs::metadata(p)?.len(),
                })
            })
            .collect()
    }
}

struct Outcome {
    verdicts: Vec<Value>,
    summary: Value,
    exit_code: i32,
}

/// Executes the configured experiment, writes its outputs and finally
/// `manifest.json` into `outputs.dir`. A blow-up is not an error: the
/// manifest carries a SUSPECT verdict and exit code 3.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let start_unix = unix_now();
    let spec = cfg.domain;
    let u0 = make_initial_data(&spec, &cfg.initial_data).map_err(|e| match e {
        KsError::Io(e) => KsError::Config(format!("cannot read initial data: {e}")),
        KsError::Format(m) => KsError::Config(format!("cannot read initial data: {m}")),
        KsError::LatticeMismatch => KsError::Config("initial data lattice differs from domain".into()),
        other => other,
    })?;
    fs::create_dir_all(&cfg.outputs.dir)?;
    let mut out = Outputs {
        dir: cfg.outputs.dir.clone(),
        files: Vec::new(),
    };

    let outcome = match cfg.experiment {
        Experiment::Modes => run_modes(cfg, &mut out)?,
        Experiment::Simulate => run_simulate(cfg, &u0, &mut out)?,
        Experiment::Picard => run_picard(cfg, &u0, &mut out)?,
        Experiment::ComplexShift => run_complex_shift(cfg, &u0, &mut out)?,
        Experiment::Thresholds => run_thresholds(cfg, &u0, &mut out)?,
        Experiment::Estimates => run_estimates(cfg, &mut out)?,
    };

    let manifest = RunManifest {
        schema: cfg.schema,
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment,
        config_hash: config_hash(cfg)?,
        start_unix,
        end_unix: unix_now(),
        verdicts: outcome.verdicts,
        outputs: out.manifest_entries()?,
        exit_code: outcome.exit_code,
        summary: outcome.summary,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(cfg.outputs.dir.join("manifest.json"), text)?;
    Ok(manifest)
}

fn run_modes(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Outcome> {
    let table = build_symbol_table(&cfg.domain)?;
    let csv = out.path("modes.csv");
    table.write_csv(BufWriter::new(fs::File::create(csv)?))?;
    let growing: Vec<Value> = table
        .growing
        .iter()
        .map(|&(k1, k2)| json!({"k": [k1, k2], "sigma": table.sigma_of(k1, k2)}))
        .collect();
    let summary = json!({
        "growing_modes": growing.len(),
        "growing": growing,
        "A": table.gap,
        "has_gap": table.has_gap(),
        "k0": [table.k0.0, table.k0.1],
        "min_sigma": table.min_sigma(),
    });
    out.json("modes.json", &summary)?;
    Ok(Outcome {
        verdicts: vec![json!({"has_gap": table.has_gap()})],
        summary,
        exit_code: 0,
    })
}

fn run_simulate(cfg: &ScenarioConfig, u0: &SpectralField, out: &mut Outputs) -> Result<Outcome> {
    let c = calibrate_constant(&cfg.domain).c;
    let m_cap = cfg.m_cap.unwrap_or(f64::INFINITY);
    let (traj, exit_code) = match Integrator::new(&cfg.domain, cfg.stepper)?.run(u0) {
        Ok(traj) => (traj, 0),
        Err(KsError::BlowUp { partial, .. }) => (*partial, EXIT_BLOWUP),
        Err(e) => return Err(e),
    };
    out.norms(&cfg.outputs.csv_path, &traj)?;
    out.spectra(&traj, cfg.outputs.spectra_every)?;
    let verdict: Verdict = continuation_monitor_with(&traj, m_cap, c);
    out.json("verdict.json", &verdict)?;
    let last = traj.last();
    let summary = json!({
        "final_time": traj.final_time(),
        "final_l2": last.l2_norm(),
        "sup_l2": traj.sup_l2(),
        "frames": traj.len(),
    });
    Ok(Outcome {
        verdicts: vec![serde_json::to_value(&verdict)?],
        summary,
        exit_code,
    })
}

fn run_picard(cfg: &ScenarioConfig, u0: &SpectralField, out: &mut Outputs) -> Result<Outcome> {
    let table = build_symbol_table(&cfg.domain)?;
    let pc = PicardConfig {
        alpha: cfg.alpha,
        horizon: cfg.horizon,
        t_final: cfg.stepper.t_final,
        dt: cfg.stepper.dt,
        max_iters: cfg.picard.max_iters,
        tol: cfg.picard.tol,
        dealias: cfg.stepper.dealias,
    };
    let (traj, report) = picard_mild_solve(&table, u0, &pc)?;
    out.norms(&cfg.outputs.csv_path, &traj)?;
    out.json("picard.json", &report)?;
    let summary = json!({
        "iterates": report.iterates,
        "converged": report.converged,
        "diverged": report.diverged,
        "r1": report.threshold_r1,
        "data_norm": report.data_norm,
        "last_ratio": report.contraction_ratios.last(),
    });
    Ok(Outcome {
        verdicts: vec![json!({"converged": report.converged, "diverged": report.diverged})],
        summary,
        exit_code: 0,
    })
}

fn run_complex_shift(cfg: &ScenarioConfig, u0: &SpectralField, out: &mut Outputs) -> Result<Outcome> {
    let cs = ComplexShiftConfig {
        alpha_vec: cfg.complex_shift.alpha_vec,
        levels: cfg.complex_shift.levels,
        stepper: cfg.stepper,
    };
    let result = match complex_shift_solve(u0, &cs) {
        Ok(r) => r,
        Err(KsError::LevelBlowUp { level, last_valid_time }) => {
            let v = json!({"verdict": "SUSPECT", "level": level, "last_valid_time": last_valid_time});
            out.json("complex_shift.json", &v)?;
            return Ok(Outcome {
                verdicts: vec![v.clone()],
                summary: v,
                exit_code: EXIT_BLOWUP,
            });
        }
        Err(e) => return Err(e),
    };
    let m = u0.l2_norm();
    let worst = result.table.iter().map(|l| l.sup_norm).fold(0.0, f64::max);
    let report = json!({
        "alpha_vec": result.alpha_vec,
        "data_l2": m,
        "levels": result.table,
        "max_over_levels": worst,
        "max_over_levels_per_data": if m > 0.0 { worst / m } else { 0.0 },
    });
    out.json("complex_shift.json", &report)?;
    Ok(Outcome {
        verdicts: vec![json!({"levels_finite": worst.is_finite()})],
        summary: report,
        exit_code: 0,
    })
}

fn run_thresholds(cfg: &ScenarioConfig, u0: &SpectralField, out: &mut Outputs) -> Result<Outcome> {
    let table = build_symbol_table(&cfg.domain)?;
    let m = u0.l2_norm();
    let report = thresholds(&table, cfg.alpha, cfg.horizon, (m > 0.0).then_some(m))?;
    out.json("thresholds.json", &report)?;
    let summary = json!({
        "A": report.gap,
        "r1": report.r1,
        "r": report.r,
        "C": report.calibration.c,
        "T_star": report.t_star,
        "alpha_vec_max": report.alpha_vec_max,
    });
    Ok(Outcome {
        verdicts: vec![],
        summary,
        exit_code: 0,
    })
}

fn run_estimates(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Outcome> {
    let table = build_symbol_table(&cfg.domain)?;
    let e = &cfg.estimates;
    let mut report = i_norm_bound(&table, cfg.alpha, cfg.horizon)?;
    let probes = random_probes(&cfg.domain, cfg.alpha, e.probe_kmax, e.probes, cfg.initial_data.seed);
    let steps = (e.probe_span / cfg.stepper.dt).round().max(1.0) as usize;
    measure_operator_norms(&table, &mut report, &probes, cfg.stepper.dt, steps)?;
    let mut smoothing = Vec::new();
    for &t in &e.smoothing_times {
        for (s, r) in [(1.0, 0.0), (2.0, 0.0), (1.0, 1.0)] {
            smoothing.push(smoothing_check(&cfg.domain, t, s, r)?);
        }
    }
    let within = report.empirical_i1.unwrap_or(0.0) <= report.bound_i1 * (1.0 + 1e-6)
        && report.empirical_i2.unwrap_or(0.0) <= report.bound_i2 * (1.0 + 1e-6);
    let smoothing_ok = smoothing.iter().all(|c| c.ratio <= 1.0);
    let full = json!({"operator_norms": report, "smoothing": smoothing});
    out.json("estimates.json", &full)?;
    Ok(Outcome {
        verdicts: vec![json!({"operator_bounds_hold": within, "smoothing_bounds_hold": smoothing_ok})],
        summary: json!({
            "bound_i1": report.bound_i1,
            "empirical_i1": report.empirical_i1,
            "bound_i2": report.bound_i2,
            "empirical_i2": report.empirical_i2,
            "max_smoothing_ratio": smoothing.iter().map(|c| c.ratio).fold(0.0, f64::max),
        }),
        exit_code: 0,
    })
}
