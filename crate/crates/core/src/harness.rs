//! Scenario runner: loads an experiment description, expands its parameter
//! sweep, evaluates every point and writes CSV or JSON tables plus a run
//! manifest.
//!
//! Results do not depend on the thread count. Random trials draw from a
//! ChaCha stream keyed by the trial index, parallel work is collected in
//! index order, and all reductions run sequentially afterwards.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::jointdesign::{criterion_nt, criterion_tmax, design_benchmark, design_theorem1};
use crate::metrics::{
    frequency_flat_profile, gain_profile, ideal_gain_profile, rate_profile, write_cdf_csv, AnalogChoice,
    EmpiricalCdf, GainProfile,
};
use crate::model::{sample_channel, SystemConfig};
use crate::sizing::{divisors, size_ttds, subarray_gains, SizingResult};

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"), "-", env!("TTD_GIT_DESCRIBE"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    GainCdf,
    RateCdf,
    Sizing,
    Prop1Sweep,
    CriteriaReport,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::GainCdf => "gain_cdf",
            Experiment::RateCdf => "rate_cdf",
            Experiment::Sizing => "sizing",
            Experiment::Prop1Sweep => "prop1_sweep",
            Experiment::CriteriaReport => "criteria_report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

fn default_trials() -> usize {
    100
}

fn default_psi() -> f64 {
    0.8
}

fn default_g0() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub experiment: Experiment,
    #[serde(default)]
    pub config: SystemConfig,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    /// Channel draws per sweep point (rate experiments).
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Evaluation direction for gain experiments and the selection criteria.
    #[serde(default = "default_psi")]
    pub psi_eval: f64,
    /// Gain threshold for sizing.
    #[serde(default = "default_g0")]
    pub g0: f64,
    /// Output directory, overridden by the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Extra abscissae at which CDFs are tabulated.
    #[serde(default)]
    pub grid: Vec<f64>,
}

const SWEEPABLE: &[&str] = &[
    "fc_hz",
    "bandwidth_hz",
    "subcarriers",
    "nt",
    "nr",
    "n_rf",
    "n_s",
    "ttds_per_rf",
    "ps_per_ttd",
    "t_max_s",
    "rho",
    "path_delay_max_s",
];

impl Scenario {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        for axis in &self.sweep {
            if !SWEEPABLE.contains(&axis.parameter.as_str()) {
                return bad(format!(
                    "unknown sweep parameter '{}' (expected one of {})",
                    axis.parameter,
                    SWEEPABLE.join(", ")
                ));
            }
            if axis.values.is_empty() {
                return bad(format!("sweep over '{}' has no values", axis.parameter));
            }
        }
        if self.experiment == Experiment::RateCdf && self.trials == 0 {
            return bad("rate_cdf needs at least one trial".into());
        }
        if !(self.psi_eval.abs() <= 1.0) {
            return bad(format!("psi_eval {} outside [-1, 1]", self.psi_eval));
        }
        if self.experiment == Experiment::Sizing && !(self.g0 > 0.0 && self.g0 < 1.0) {
            return bad(format!("g0 {} outside (0, 1)", self.g0));
        }
        for p in self.points()? {
            p.config.validate()?;
        }
        Ok(())
    }

    /// Cartesian product of the sweep axes, first axis varying slowest.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let mut points = vec![SweepPoint { assignments: Vec::new(), config: self.config.clone() }];
        for axis in &self.sweep {
            let mut next = Vec::with_capacity(points.len() * axis.values.len());
            for p in &points {
                for &v in &axis.values {
                    let mut config = p.config.clone();
                    apply(&mut config, &axis.parameter, v)?;
                    let mut assignments = p.assignments.clone();
                    assignments.push(Assignment { parameter: axis.parameter.clone(), value: v });
                    next.push(SweepPoint { assignments, config });
                }
            }
            points = next;
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub parameter: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub assignments: Vec<Assignment>,
    pub config: SystemConfig,
}

impl SweepPoint {
    /// `param=value` pairs joined by `_`; empty without a sweep.
    pub fn label(&self) -> String {
        self.assignments
            .iter()
            .map(|a| format!("{}={}", a.parameter, fmt_g(a.value)))
            .collect::<Vec<_>>()
            .join("_")
    }
}

fn as_count(parameter: &str, v: f64) -> Result<usize> {
    if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(Error::InvalidScenario(format!("{parameter} must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

/// Sets one field. Changing the array size or either factor of
/// `N_t = M N` rebalances the other factor; the chain/stream/receive counts
/// move together.
fn apply(cfg: &mut SystemConfig, parameter: &str, v: f64) -> Result<()> {
    let rebalance = |total: usize, factor: usize, what: &str| -> Result<usize> {
        if !total.is_multiple_of(factor) {
            return Err(Error::InvalidScenario(format!(
                "{what}: {total} antennas cannot be split into groups of {factor}"
            )));
        }
        Ok(total / factor)
    };
    match parameter {
        "fc_hz" => cfg.fc_hz = v,
        "bandwidth_hz" => cfg.bandwidth_hz = v,
        "t_max_s" => cfg.t_max_s = v,
        "rho" => cfg.rho = v,
        "path_delay_max_s" => cfg.path_delay_max_s = v,
        "subcarriers" => cfg.subcarriers = as_count(parameter, v)?,
        "nt" => {
            cfg.nt = as_count(parameter, v)?;
            cfg.ps_per_ttd = rebalance(cfg.nt, cfg.ttds_per_rf, "nt sweep")?;
        }
        "ttds_per_rf" => {
            cfg.ttds_per_rf = as_count(parameter, v)?;
            cfg.ps_per_ttd = rebalance(cfg.nt, cfg.ttds_per_rf, "ttds_per_rf sweep")?;
        }
        "ps_per_ttd" => {
            cfg.ps_per_ttd = as_count(parameter, v)?;
            cfg.nt = cfg.ttds_per_rf * cfg.ps_per_ttd;
        }
        "nr" | "n_rf" | "n_s" => {
            let n = as_count(parameter, v)?;
            cfg.nr = n;
            cfg.n_rf = n;
            cfg.n_s = n;
        }
        other => return Err(Error::InvalidScenario(format!("unknown sweep parameter '{other}'"))),
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignGain {
    pub design: String,
    pub profile: GainProfile,
    pub fraction_at_least_g0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRates {
    pub design: String,
    /// Subcarrier-mean rate of each trial.
    pub trial_means: Vec<f64>,
    pub trial_bound_means: Vec<f64>,
    /// Trial-averaged rate at each subcarrier.
    pub mean_by_k: Vec<f64>,
    pub bound_mean_by_k: Vec<f64>,
    /// All per-subcarrier rates, trial-major.
    pub pooled: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Gain {
        designs: Vec<DesignGain>,
    },
    Rate {
        trials: usize,
        frequencies_hz: Vec<f64>,
        designs: Vec<DesignRates>,
    },
    Sizing {
        result: SizingResult,
        /// Gain profiles at the closed-form count and at the next smaller divisor.
        profiles: Vec<DesignGain>,
    },
    Prop1 {
        profile: GainProfile,
        edge_gain: f64,
        central_gain: f64,
    },
    Criteria {
        psi_max: f64,
        nt_max: Option<u64>,
        tmax_min_s: f64,
        nt_admissible: bool,
        tmax_admissible: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub label: String,
    pub point: SweepPoint,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub seed: u64,
    pub points: Vec<PointResult>,
}

/// Evaluates every sweep point on the current rayon pool.
pub fn evaluate(scenario: &Scenario, seed: u64) -> Result<ExperimentResult> {
    scenario.validate()?;
    let points = scenario
        .points()?
        .into_par_iter()
        .map(|point| {
            let outcome = evaluate_point(scenario, &point.config, seed)?;
            Ok(PointResult { label: point.label(), point, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { experiment: scenario.experiment, seed, points })
}

fn evaluate_point(sc: &Scenario, cfg: &SystemConfig, seed: u64) -> Result<Outcome> {
    match sc.experiment {
        Experiment::GainCdf => gain_outcome(sc, cfg),
        Experiment::RateCdf => rate_outcome(sc, cfg, seed),
        Experiment::Sizing => sizing_outcome(sc, cfg),
        Experiment::Prop1Sweep => {
            let profile = frequency_flat_profile(cfg, sc.psi_eval)?;
            Ok(Outcome::Prop1 {
                edge_gain: *profile.gains.last().unwrap(),
                central_gain: profile.gains[cfg.central_subcarrier() - 1],
                profile,
            })
        }
        Experiment::CriteriaReport => {
            let psi_max = sc.psi_eval.abs();
            let nt_max = criterion_nt(cfg, psi_max)?;
            let tmax_min_s = criterion_tmax(cfg, psi_max)?;
            Ok(Outcome::Criteria {
                psi_max,
                nt_max,
                tmax_min_s,
                nt_admissible: nt_max.is_none_or(|b| cfg.nt as u64 <= b),
                tmax_admissible: cfg.t_max_s >= tmax_min_s,
            })
        }
    }
}

fn gain_outcome(sc: &Scenario, cfg: &SystemConfig) -> Result<Outcome> {
    let psi = vec![sc.psi_eval; cfg.n_rf];
    let proposed = design_theorem1(cfg, &psi)?.design;
    let benchmark = design_benchmark(cfg, &psi)?;
    let profiles = [
        ("proposed", gain_profile(cfg, &proposed, 0, sc.psi_eval)?),
        ("benchmark", gain_profile(cfg, &benchmark, 0, sc.psi_eval)?),
        ("ideal", ideal_gain_profile(cfg, sc.psi_eval)?),
    ];
    Ok(Outcome::Gain {
        designs: profiles
            .into_iter()
            .map(|(name, profile)| DesignGain {
                design: name.to_string(),
                fraction_at_least_g0: profile.fraction_at_least(sc.g0),
                profile,
            })
            .collect(),
    })
}

const RATE_DESIGNS: [&str; 3] = ["ideal", "proposed", "benchmark"];

/// Rate profiles of the three analog precoders on one channel draw.
pub fn rate_trial(cfg: &SystemConfig, seed: u64, trial: u64) -> Result<[crate::metrics::RateProfile; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let channel = sample_channel(cfg, &mut rng)?;
    let proposed = design_theorem1(cfg, &channel.paths.psi)?.design;
    let benchmark = design_benchmark(cfg, &channel.paths.psi)?;
    Ok([
        rate_profile(cfg, &channel, AnalogChoice::Ideal)?,
        rate_profile(cfg, &channel, AnalogChoice::Design(&proposed))?,
        rate_profile(cfg, &channel, AnalogChoice::Design(&benchmark))?,
    ])
}

fn rate_outcome(sc: &Scenario, cfg: &SystemConfig, seed: u64) -> Result<Outcome> {
    let per_trial = (0..sc.trials as u64)
        .into_par_iter()
        .map(|t| rate_trial(cfg, seed, t))
        .collect::<Result<Vec<_>>>()?;
    let k_count = cfg.subcarriers;
    let trials = per_trial.len() as f64;
    let designs = RATE_DESIGNS
        .iter()
        .enumerate()
        .map(|(d, name)| {
            let mut mean_by_k = vec![0.0; k_count];
            let mut bound_mean_by_k = vec![0.0; k_count];
            let mut pooled = Vec::with_capacity(k_count * per_trial.len());
            let mut trial_means = Vec::with_capacity(per_trial.len());
            let mut trial_bound_means = Vec::with_capacity(per_trial.len());
            for profiles in &per_trial {
                let p = &profiles[d];
                for k in 0..k_count {
                    mean_by_k[k] += p.rates[k];
                    bound_mean_by_k[k] += p.lower_bounds[k];
                }
                pooled.extend_from_slice(&p.rates);
                trial_means.push(p.mean());
                trial_bound_means.push(p.mean_lower_bound());
            }
            mean_by_k.iter_mut().for_each(|v| *v /= trials);
            bound_mean_by_k.iter_mut().for_each(|v| *v /= trials);
            DesignRates {
                design: name.to_string(),
                trial_means,
                trial_bound_means,
                mean_by_k,
                bound_mean_by_k,
                pooled,
            }
        })
        .collect();
    Ok(Outcome::Rate {
        trials: per_trial.len(),
        frequencies_hz: per_trial[0][0].frequencies_hz.clone(),
        designs,
    })
}

fn sizing_outcome(sc: &Scenario, cfg: &SystemConfig) -> Result<Outcome> {
    let psi_set = [sc.psi_eval];
    let result = size_ttds(cfg, sc.g0, &psi_set)?;
    let divs = divisors(cfg.nt);
    let pos = divs.iter().position(|&d| d == result.m_star).unwrap_or(0);
    let mut chosen = vec![("m_star", result.m_star)];
    if pos > 0 {
        chosen.push(("m_prev", divs[pos - 1]));
    }
    let freqs: Vec<f64> = (1..=cfg.subcarriers).map(|k| cfg.subcarrier_frequency(k)).collect::<Result<_>>()?;
    let profiles = chosen
        .into_iter()
        .map(|(name, m)| {
            let gains = subarray_gains(cfg, m, sc.psi_eval)?;
            let profile = GainProfile { psi: sc.psi_eval, frequencies_hz: freqs.clone(), gains };
            Ok(DesignGain {
                design: format!("{name}={m}"),
                fraction_at_least_g0: profile.fraction_at_least(sc.g0),
                profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::Sizing { result, profiles })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub format: OutputFormat,
    pub trials: usize,
    pub psi_eval: f64,
    pub g0: f64,
    pub config: SystemConfig,
    pub sweep: Vec<SweepAxis>,
    pub files: Vec<String>,
    pub wall_clock: WallClock,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub result: ExperimentResult,
}

/// Evaluates the scenario and writes its tables and manifest.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let seed = opts.seed.unwrap_or(scenario.config.seed);
    let mut resolved = scenario.clone();
    resolved.config.seed = seed;
    let threads = opts.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let result = pool.install(|| evaluate(&resolved, seed))?;

    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir)?;
    let files = match opts.format {
        OutputFormat::Csv => write_csv_tables(&resolved, &result, &out_dir)?,
        OutputFormat::Json => {
            let path = out_dir.join(format!("{}.json", scenario.experiment.as_str()));
            fs::write(&path, serde_json::to_string_pretty(&result)?)?;
            vec![path]
        }
    };
    let manifest = Manifest {
        experiment: scenario.experiment,
        version: VERSION.to_string(),
        seed,
        threads,
        format: opts.format,
        trials: scenario.trials,
        psi_eval: scenario.psi_eval,
        g0: scenario.g0,
        config: resolved.config.clone(),
        sweep: scenario.sweep.clone(),
        files: files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        wall_clock: WallClock {
            started_unix_s: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_s: clock.elapsed().as_secs_f64(),
        },
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    log::info!("wrote {} files to {}", files.len(), out_dir.display());
    Ok(RunSummary { out_dir, files, manifest: manifest_path, result })
}

fn file_name(experiment: Experiment, design: &str, label: &str) -> String {
    if label.is_empty() {
        format!("{}_{design}.csv", experiment.as_str())
    } else {
        format!("{}_{design}_{label}.csv", experiment.as_str())
    }
}

struct SummaryWriter {
    w: csv::Writer<fs::File>,
}

impl SummaryWriter {
    fn new(path: &Path) -> Result<Self> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["point", "design", "k", "f_k", "value"])?;
        Ok(SummaryWriter { w })
    }

    /// Rows for one point, ordered by `k` then by the order of `series`.
    fn point(&mut self, label: &str, freqs: &[f64], series: &[(&str, &[f64])]) -> Result<()> {
        for (i, f) in freqs.iter().enumerate() {
            for (name, values) in series {
                self.w.write_record([
                    label.to_string(),
                    name.to_string(),
                    (i + 1).to_string(),
                    fmt_g(*f),
                    fmt_g(values[i]),
                ])?;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

fn write_cdf_file(path: &Path, values: &[f64], grid: &[f64]) -> Result<()> {
    let cdf = EmpiricalCdf::new(values)?;
    write_cdf_csv(fs::File::create(path)?, &cdf.table(grid))
}

fn write_csv_tables(sc: &Scenario, result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let exp = sc.experiment;
    let mut files = Vec::new();
    let summary_path = dir.join(format!("{}_summary.csv", exp.as_str()));
    let mut summary = SummaryWriter::new(&summary_path)?;
    let mut extra: Option<csv::Writer<fs::File>> = None;
    let mut extra_path = None;
    for pr in &result.points {
        let label = pr.label.as_str();
        match &pr.outcome {
            Outcome::Gain { designs } | Outcome::Sizing { profiles: designs, .. } => {
                for d in designs {
                    let path = dir.join(file_name(exp, &d.design, label));
                    write_cdf_file(&path, &d.profile.gains, &sc.grid)?;
                    files.push(path);
                }
                let series: Vec<(&str, &[f64])> =
                    designs.iter().map(|d| (d.design.as_str(), d.profile.gains.as_slice())).collect();
                summary.point(label, &designs[0].profile.frequencies_hz, &series)?;
                if let Outcome::Sizing { result: sr, .. } = &pr.outcome {
                    let json_path = dir.join(if label.is_empty() {
                        "sizing_result.json".to_string()
                    } else {
                        format!("sizing_result_{label}.json")
                    });
                    fs::write(&json_path, serde_json::to_string_pretty(sr)?)?;
                    files.push(json_path);
                    let path = dir.join(file_name(exp, "divisors", label));
                    let mut w = csv::Writer::from_path(&path)?;
                    w.write_record(["m", "worst_gain", "fraction_below"])?;
                    for e in &sr.per_divisor {
                        w.write_record([e.m.to_string(), fmt_g(e.worst_gain), fmt_g(e.fraction_below)])?;
                    }
                    w.flush()?;
                    files.push(path);
                }
            }
            Outcome::Rate { frequencies_hz, designs, .. } => {
                for d in designs {
                    let path = dir.join(file_name(exp, &d.design, label));
                    write_cdf_file(&path, &d.pooled, &sc.grid)?;
                    files.push(path);
                }
                let bound_names: Vec<String> = designs.iter().map(|d| format!("{}_bound", d.design)).collect();
                let mut series: Vec<(&str, &[f64])> = Vec::new();
                for (d, bn) in designs.iter().zip(&bound_names) {
                    series.push((d.design.as_str(), d.mean_by_k.as_slice()));
                    series.push((bn.as_str(), d.bound_mean_by_k.as_slice()));
                }
                summary.point(label, frequencies_hz, &series)?;
                let path = dir.join(file_name(exp, "trials", label));
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(["trial", "design", "mean_rate", "mean_lower_bound"])?;
                for t in 0..designs[0].trial_means.len() {
                    for d in designs {
                        w.write_record([
                            t.to_string(),
                            d.design.clone(),
                            fmt_g(d.trial_means[t]),
                            fmt_g(d.trial_bound_means[t]),
                        ])?;
                    }
                }
                w.flush()?;
                files.push(path);
            }
            Outcome::Prop1 { profile, edge_gain, central_gain } => {
                let path = dir.join(file_name(exp, "flat", label));
                profile.write_csv(fs::File::create(&path)?)?;
                files.push(path);
                summary.point(label, &profile.frequencies_hz, &[("flat", profile.gains.as_slice())])?;
                let w = extra.get_or_insert_with(|| {
                    let p = dir.join(format!("{}_edge.csv", exp.as_str()));
                    extra_path = Some(p.clone());
                    let mut w = csv::Writer::from_path(p).expect("create edge table");
                    w.write_record(["point", "nt", "edge_gain", "central_gain"]).expect("header");
                    w
                });
                w.write_record([
                    label.to_string(),
                    pr.point.config.nt.to_string(),
                    fmt_g(*edge_gain),
                    fmt_g(*central_gain),
                ])?;
            }
            Outcome::Criteria { psi_max, nt_max, tmax_min_s, nt_admissible, tmax_admissible } => {
                let w = extra.get_or_insert_with(|| {
                    let p = dir.join(format!("{}.csv", exp.as_str()));
                    extra_path = Some(p.clone());
                    let mut w = csv::Writer::from_path(p).expect("create criteria table");
                    w.write_record(["point", "psi_max", "nt", "nt_max", "t_max_s", "tmax_min_s", "nt_admissible", "tmax_admissible"])
                        .expect("header");
                    w
                });
                w.write_record([
                    label.to_string(),
                    fmt_g(*psi_max),
                    pr.point.config.nt.to_string(),
                    nt_max.map_or("inf".to_string(), |v| v.to_string()),
                    fmt_g(pr.point.config.t_max_s),
                    fmt_g(*tmax_min_s),
                    nt_admissible.to_string(),
                    tmax_admissible.to_string(),
                ])?;
            }
        }
    }
    if let Some(mut w) = extra {
        w.flush()?;
        files.push(extra_path.unwrap());
    }
    if exp == Experiment::CriteriaReport {
        drop(summary);
        fs::remove_file(&summary_path)?;
    } else {
        summary.finish()?;
        files.push(summary_path);
    }
    Ok(files)
}
