//! Experiment runner: seeded execution, CSV/JSON artifact emission, replay
//! verification, baseline comparison and robust grid evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{compare_suite, BaselineConfig, CompareRow};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::models::ControlModel;
use crate::noise::{average_fidelity, noise_grid, worst_case_fidelity, ChannelSpec};
use crate::pgtrain::{
    pretrain_then_correlate, train, PolicyCheckpoint, PolicyState, TrainRecord, ADAM_BETA1,
    ADAM_BETA2, ADAM_EPSILON, LR_DECAY_EVERY, LR_DECAY_FACTOR,
};
use crate::policy::{SIGMA_FLOOR, TRUNCATION_SIGMAS};
use crate::qsim::bloch_coordinates;

/// Number of protocols sampled from the final policy for the Bloch CSV.
pub const BLOCH_SAMPLES: usize = 10;

/// All floating-point output uses 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Build fingerprint echoed into each summary and checked on replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub package: String,
    pub version: String,
    pub float_format: String,
}

impl Fingerprint {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            float_format: "%.11e".into(),
        }
    }
}

/// Every numeric default in play, echoed verbatim into each summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Defaults {
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub lr_decay_factor: f64,
    pub lr_decay_every: usize,
    pub sigma_floor: f64,
    pub init_truncation_sigmas: f64,
    pub robust_draws: usize,
    pub grid_points: usize,
    pub bloch_samples: usize,
    pub baselines: BaselineConfig,
}

impl Defaults {
    pub fn current() -> Self {
        Self {
            adam_beta1: ADAM_BETA1,
            adam_beta2: ADAM_BETA2,
            adam_epsilon: ADAM_EPSILON,
            lr_decay_factor: LR_DECAY_FACTOR,
            lr_decay_every: LR_DECAY_EVERY,
            sigma_floor: SIGMA_FLOOR,
            init_truncation_sigmas: TRUNCATION_SIGMAS,
            robust_draws: crate::noise::DEFAULT_ROBUST_DRAWS,
            grid_points: crate::noise::DEFAULT_GRID_POINTS,
            bloch_samples: BLOCH_SAMPLES,
            baselines: BaselineConfig::new(1),
        }
    }
}

/// Final metrics recorded per seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedResults {
    pub final_mean_reward: f64,
    pub final_exact_mean_fidelity: f64,
    pub final_greedy_fidelity: f64,
    pub negative_duration_total: usize,
    pub sigma_floor_hits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robust_average: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robust_worst_case: Option<f64>,
}

/// Per-seed summary JSON: full config echo plus seed reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub fingerprint: Fingerprint,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub defaults: Defaults,
    pub results: SeedResults,
}

/// Paths produced for one seed.
#[derive(Debug, Clone)]
pub struct SeedArtifacts {
    pub seed: u64,
    pub dir: PathBuf,
    pub summary_path: PathBuf,
    pub record: TrainRecord,
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn training_rows(record: &TrainRecord) -> Vec<Vec<String>> {
    record
        .iterations
        .iter()
        .map(|l| {
            vec![
                l.iteration.to_string(),
                fmt_f64(l.mean_reward),
                fmt_f64(l.exact_mean_fidelity),
                fmt_f64(l.greedy_fidelity),
                fmt_f64(l.lr),
                l.neg_duration_count.to_string(),
                fmt_f64(l.wall_ms),
                l.phase.to_string(),
            ]
        })
        .collect()
}

const TRAINING_HEADER: [&str; 8] = [
    "iteration",
    "mean_reward",
    "exact_mean_fidelity",
    "greedy_fidelity",
    "lr",
    "neg_duration_count",
    "wall_ms",
    "phase",
];

fn write_training_csv(dir: &Path, record: &TrainRecord) -> Result<()> {
    write_csv(
        &dir.join("training.csv"),
        &TRAINING_HEADER,
        &training_rows(record),
    )
}

fn write_snapshots(dir: &Path, record: &TrainRecord) -> Result<()> {
    for snap in &record.snapshots {
        let rows: Vec<Vec<String>> = snap
            .rows
            .iter()
            .map(|&(t, r, f)| vec![fmt_f64(t), fmt_f64(r), fmt_f64(f)])
            .collect();
        write_csv(
            &dir.join(format!("snapshot_{}.csv", snap.iteration)),
            &["total_duration", "reward", "exact_fidelity"],
            &rows,
        )?;
    }
    Ok(())
}

fn write_bloch_csv(
    dir: &Path,
    model: &ControlModel,
    policy: &PolicyState,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let protocols = policy.sample_batch(BLOCH_SAMPLES, &mut rng);
    let mut rows = Vec::new();
    for (sample, protocol) in protocols.iter().enumerate() {
        let states = model.trajectory(protocol, &[])?;
        for (step, state) in states.iter().enumerate() {
            let (x, y, z) = bloch_coordinates(state)?;
            rows.push(vec![
                sample.to_string(),
                step.to_string(),
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(z),
            ]);
        }
    }
    write_csv(
        &dir.join("bloch.csv"),
        &["sample", "step", "x", "y", "z"],
        &rows,
    )
}

fn robust_support(config: &ExperimentConfig) -> Option<(f64, f64)> {
    match &config.train.channel {
        ChannelSpec::Robust { support, .. } => Some(*support),
        _ => None,
    }
}

fn write_robust_outputs(
    dir: &Path,
    model: &ControlModel,
    config: &ExperimentConfig,
    record: &TrainRecord,
) -> Result<(f64, f64)> {
    let support = robust_support(config).expect("robust channel");
    let grid_points = config.train.grid_points;
    let protocol = record.final_policy.mean_protocol();

    // Per-grid-point fidelity of the policy-mean protocol.
    let grid = noise_grid(model.noise_dim(), support, grid_points);
    let mut header: Vec<String> = (1..=model.noise_dim())
        .map(|d| format!("delta_{d}"))
        .collect();
    header.push("fidelity".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|delta| {
            let f = model.protocol_fidelity(&protocol, delta)?;
            let mut row: Vec<String> = delta.iter().map(|&d| fmt_f64(d)).collect();
            row.push(fmt_f64(f));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    write_csv(&dir.join("robust_grid.csv"), &header_refs, &rows)?;

    // Average/worst-case trajectory recorded during training.
    let curve: Vec<Vec<String>> = record
        .robust_eval
        .iter()
        .map(|p| {
            vec![
                p.iteration.to_string(),
                fmt_f64(p.average),
                fmt_f64(p.worst_case),
            ]
        })
        .collect();
    write_csv(
        &dir.join("robust_training.csv"),
        &["iteration", "average", "worst_case"],
        &curve,
    )?;

    let avg = average_fidelity(model, &protocol, support, grid_points)?;
    let worst = worst_case_fidelity(model, &protocol, support, grid_points)?;
    Ok((avg, worst))
}

/// Trains one seed and writes its artifacts into `dir`.
pub fn run_seed(config: &ExperimentConfig, seed: u64, dir: &Path) -> Result<SeedArtifacts> {
    fs::create_dir_all(dir)?;
    let model = config.model.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let record = match config.pretrain_config() {
        Some(pre) => {
            let initial = config.policy.build_diagonal(config.action_dim(), &mut rng)?;
            pretrain_then_correlate(&model, initial, &pre, &mut rng)?
        }
        None => {
            let policy = config.policy.build(config.action_dim(), &mut rng)?;
            train(&model, policy, &config.train, &mut rng)?
        }
    };

    write_training_csv(dir, &record)?;
    write_snapshots(dir, &record)?;
    if model.num_qubits() == 1 {
        write_bloch_csv(dir, &model, &record.final_policy, seed)?;
    }
    let (robust_average, robust_worst_case) = if config.train.channel.is_robust() {
        let (a, w) = write_robust_outputs(dir, &model, config, &record)?;
        (Some(a), Some(w))
    } else {
        (None, None)
    };

    let checkpoint = record.final_policy.checkpoint();
    fs::write(
        dir.join("checkpoint.json"),
        serde_json::to_string_pretty(&checkpoint)?,
    )?;

    let last = record.final_log();
    let summary = RunSummary {
        fingerprint: Fingerprint::current(),
        seed,
        config: config.clone(),
        defaults: Defaults::current(),
        results: SeedResults {
            final_mean_reward: last.mean_reward,
            final_exact_mean_fidelity: last.exact_mean_fidelity,
            final_greedy_fidelity: last.greedy_fidelity,
            negative_duration_total: record.negative_duration_total,
            sigma_floor_hits: record.sigma_floor_hits,
            robust_average,
            robust_worst_case,
        },
    };
    let summary_path = dir.join("summary.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;

    Ok(SeedArtifacts {
        seed,
        dir: dir.to_path_buf(),
        summary_path,
        record,
    })
}

/// Runs every seed of an experiment into `<output_dir>/seed_<k>/`.
pub fn run(
    config: &ExperimentConfig,
    out_override: Option<&Path>,
    seeds_override: Option<&[u64]>,
) -> Result<Vec<SeedArtifacts>> {
    let mut config = config.clone();
    if let Some(out) = out_override {
        config.output_dir = out.to_path_buf();
    }
    if let Some(seeds) = seeds_override {
        config.seeds = seeds.to_vec();
    }
    config.validate()?;
    let mut artifacts = Vec::new();
    for &seed in &config.seeds {
        let dir = config.output_dir.join(format!("seed_{seed}"));
        artifacts.push(run_seed(&config, seed, &dir)?);
    }
    Ok(artifacts)
}

/// Per-file replay verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileCheck {
    pub name: String,
    pub matches: bool,
}

/// Outcome of replaying one summary.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub seed: u64,
    pub files: Vec<FileCheck>,
    pub fingerprint_matches: bool,
}

impl ReplayReport {
    pub fn all_match(&self) -> bool {
        !self.files.is_empty() && self.files.iter().all(|f| f.matches)
    }
}

/// Drops the named column from CSV text; used to ignore wall-clock times,
/// the one legitimately nondeterministic output field.
fn strip_column(text: &str, column: &str) -> String {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let cols: Vec<&str> = header.split(',').collect();
    let Some(drop) = cols.iter().position(|c| *c == column) else {
        return text.to_string();
    };
    let filter = |line: &str| -> String {
        line.split(',')
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out: Vec<String> = vec![filter(header)];
    out.extend(lines.map(filter));
    out.join("\n")
}

fn csv_files(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

/// Compares the CSVs of two completed seed directories, ignoring wall_ms.
pub fn compare_seed_dirs(original: &Path, replayed: &Path) -> Result<Vec<FileCheck>> {
    let mut checks = Vec::new();
    for name in csv_files(original)? {
        let a = fs::read_to_string(original.join(&name))?;
        let b = fs::read_to_string(replayed.join(&name)).unwrap_or_default();
        let matches = strip_column(&a, "wall_ms") == strip_column(&b, "wall_ms");
        checks.push(FileCheck { name, matches });
    }
    Ok(checks)
}

/// Re-executes the run described by a summary JSON into `work_dir` and
/// verifies the CSVs are byte-identical (wall_ms aside).
pub fn replay(summary_path: &Path, work_dir: &Path) -> Result<ReplayReport> {
    let text = fs::read_to_string(summary_path)?;
    let summary: RunSummary = serde_json::from_str(&text)?;
    let fingerprint_matches = summary.fingerprint == Fingerprint::current();
    let original_dir = summary_path
        .parent()
        .ok_or_else(|| Error::InvalidConfig("summary has no parent directory".into()))?;

    fs::create_dir_all(work_dir)?;
    run_seed(&summary.config, summary.seed, work_dir)?;
    let files = compare_seed_dirs(original_dir, work_dir)?;
    Ok(ReplayReport {
        seed: summary.seed,
        files,
        fingerprint_matches,
    })
}

/// Runs the baseline comparison suite and writes `compare.csv`.
pub fn compare(config: &ExperimentConfig, out_override: Option<&Path>) -> Result<Vec<CompareRow>> {
    config.validate()?;
    let model = config.model.build()?;
    let rows = compare_suite(
        &model,
        &config.train.channel,
        &config.compare_config(),
        &config.seeds,
    )?;
    let out_dir = out_override.unwrap_or(&config.output_dir);
    fs::create_dir_all(out_dir)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.algorithm.clone(),
                r.seed.to_string(),
                r.noise.clone(),
                fmt_f64(r.exact_fidelity),
                fmt_f64(r.log_infidelity),
                r.evaluations.to_string(),
                r.wall_ms.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out_dir.join("compare.csv"),
        &[
            "algorithm",
            "seed",
            "noise",
            "exact_fidelity",
            "log_infidelity",
            "evaluations",
            "wall_ms",
        ],
        &csv_rows,
    )?;
    Ok(rows)
}

/// One row of the robust grid table for a saved policy.
#[derive(Debug, Clone, Serialize)]
pub struct RobustGridRow {
    pub delta: Vec<f64>,
    pub fidelity: f64,
}

/// Average/worst-case grid evaluation of a checkpointed policy mean.
#[derive(Debug, Clone, Serialize)]
pub struct RobustEvalReport {
    pub rows: Vec<RobustGridRow>,
    pub average: f64,
    pub worst_case: f64,
}

pub fn robust_eval(
    checkpoint_path: &Path,
    config: &ExperimentConfig,
) -> Result<RobustEvalReport> {
    let model = config.model.build()?;
    let support = robust_support(config)
        .or(model.noise_support())
        .ok_or_else(|| {
            Error::InvalidConfig("robust-eval needs a noisy model or robust channel".into())
        })?;
    let text = fs::read_to_string(checkpoint_path)?;
    let checkpoint: PolicyCheckpoint = serde_json::from_str(&text)?;
    let policy = checkpoint.into_policy()?;
    let protocol = policy.mean_protocol();
    let grid_points = config.train.grid_points;

    let rows: Vec<RobustGridRow> = noise_grid(model.noise_dim(), support, grid_points)
        .into_iter()
        .map(|delta| {
            let fidelity = model.protocol_fidelity(&protocol, &delta)?;
            Ok(RobustGridRow { delta, fidelity })
        })
        .collect::<Result<_>>()?;
    let average = average_fidelity(&model, &protocol, support, grid_points)?;
    let worst_case = worst_case_fidelity(&model, &protocol, support, grid_points)?;
    Ok(RobustEvalReport { rows, average, worst_case })
}
