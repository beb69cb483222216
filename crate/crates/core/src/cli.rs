//! Command-line interface: dataset synthesis, training, evaluation,
//! ablations and diagnostics.
//!
//! Every config key is also a `--<key>` flag. Precedence is flags, then
//! `--config` file, then defaults.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Arg, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use crate::config::{self, KEYS};
use crate::diagnostics::{self, DifficultyTrace};
use crate::graphstore::{
    load_graph, positive_samples, read_splits, sample_negatives, split, synth_graph, write_edges,
    write_nodes, write_splits, Graph, NegativeMode, SplitName, SplitSet, SynthConfig,
};
use crate::model::Checkpoint;
use crate::textfeat::PairTextTable;
use crate::trainer::{self, AblationAxis, MetricsSummary, TrainConfig};

pub const OUT_DIR_ENV: &str = "GTNN_OUT_DIR";
pub const NODES_FILE: &str = "nodes.tsv";
pub const EDGES_FILE: &str = "edges.tsv";
pub const SPLITS_FILE: &str = "splits.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Bad flag values detected after parsing; the binary exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "gtnn",
    version,
    about = "Link prediction on text-attributed graphs with curriculum weighting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Write a planted-partition dataset (nodes, edges, splits).
    #[command(after_help = config::key_help())]
    Synth(SynthArgs),
    /// Train one model per seed and write a run manifest.
    Train(TrainArgs),
    /// Score a split with a saved checkpoint.
    Eval(EvalArgs),
    /// Train every (setting, seed) of an ablation grid.
    Ablate(AblateArgs),
    /// Compute inversion, transition and heatmap CSVs from a trace.
    #[command(after_help = config::key_help())]
    Diagnose(DiagnoseArgs),
}

/// `--<key> VALUE` for every config key, plus a few short aliases.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyFlags {
    pub values: Vec<(String, String)>,
}

const ALIASES: &[(&str, &str)] = &[
    ("curriculum.mode", "curriculum"),
    ("curriculum.alpha", "alpha"),
    ("curriculum.lambda", "lambda"),
    ("curriculum.k", "k"),
    ("train.seed", "seed"),
];

impl FromArgMatches for KeyFlags {
    fn from_arg_matches(m: &ArgMatches) -> std::result::Result<Self, clap::Error> {
        let mut flags = KeyFlags::default();
        flags.update_from_arg_matches(m)?;
        Ok(flags)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> std::result::Result<(), clap::Error> {
        for (key, _) in KEYS {
            if let Some(v) = m.get_one::<String>(key) {
                self.values.retain(|(k, _)| k != key);
                self.values.push((key.to_string(), v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for KeyFlags {
    fn augment_args(mut cmd: Command) -> Command {
        for (key, desc) in KEYS {
            let mut arg = Arg::new(*key)
                .long(*key)
                .value_name("VALUE")
                .help(*desc)
                .help_heading("Config keys");
            if let Some((_, alias)) = ALIASES.iter().find(|(k, _)| k == key) {
                arg = arg.visible_alias(*alias);
            }
            cmd = cmd.arg(arg);
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

#[derive(Clone, Debug, Args)]
pub struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub keys: KeyFlags,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::default();
        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (k, v) in config::parse_str(&text)? {
                config::apply(&mut cfg, &k, &v)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
        }
        for (k, v) in &self.keys.values {
            config::apply(&mut cfg, k, v).map_err(|e| usage(e.to_string()))?;
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Args)]
pub struct DataArgs {
    /// Directory holding nodes.tsv, edges.tsv and splits.tsv.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub data: PathBuf,
    /// Per-pair text embeddings (`id_u  id_v  floats`).
    #[arg(long)]
    pub pair_text: Option<PathBuf>,
}

pub struct Dataset {
    pub graph: Graph,
    pub splits: SplitSet,
    pub pair_text: Option<PairTextTable>,
}

impl DataArgs {
    pub fn load(&self) -> Result<Dataset> {
        let graph = load_graph(&self.data.join(NODES_FILE), &self.data.join(EDGES_FILE))?;
        let splits = read_splits(&self.data.join(SPLITS_FILE), &graph)?;
        let pair_text = self
            .pair_text
            .as_deref()
            .map(PairTextTable::load)
            .transpose()?;
        Ok(Dataset {
            graph,
            splits,
            pair_text,
        })
    }
}

#[derive(Clone, Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,
    /// Number of planted groups (at least 2).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub groups: u64,
    #[arg(long, default_value_t = 0.05)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_out: f64,
    /// Embedding width.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Probability that a description names a given neighbor.
    #[arg(long, default_value_t = 0.9)]
    pub mention_prob: f64,
    /// Negatives per positive.
    #[arg(long, default_value_t = 5)]
    pub neg_ratio: usize,
    /// `hard_plus_random` or `random`.
    #[arg(long, default_value = "hard_plus_random")]
    pub neg_mode: NegativeMode,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.8, 0.1, 0.1])]
    pub split: Vec<f64>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Seeds to train; overrides `train.seed`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Worker threads for parallel seeds (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: SplitName,
    /// Write the metrics JSON here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// `embedding_init` or `additional_features`.
    #[arg(long)]
    pub axis: AblationAxis,
    /// Settings to compare, e.g. `file,random` or `on,off`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct DiagnoseArgs {
    /// Trace CSV written by `train`.
    #[arg(long)]
    pub trace: PathBuf,
    /// Transition window radius k; the trace needs 2k+1 epochs.
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

/// Per-seed artifacts of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SeedArtifacts {
    pub seed: u64,
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
    pub trace: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: std::collections::BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedArtifacts>,
    pub summary: PathBuf,
    pub wall_clock_secs: f64,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
fn write_atomic(path: &Path, body: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let fractions: [f64; 3] = args
        .split
        .as_slice()
        .try_into()
        .map_err(|_| usage("--split takes three fractions"))?;
    let cfg = SynthConfig {
        n_nodes: args.nodes,
        n_groups: args.groups as usize,
        p_in: args.p_in,
        p_out: args.p_out,
        d_in: args.dim,
        noise: args.noise,
        mention_prob: args.mention_prob,
        seed: args.seed,
    };
    let g = synth_graph(&cfg).map_err(|e| usage(e.to_string()))?;
    let negatives = sample_negatives(&g, &g.edge_list(), args.neg_ratio, args.neg_mode, args.seed)?;
    let samples: Vec<_> = positive_samples(&g).into_iter().chain(negatives).collect();
    let splits = split(&samples, fractions, args.seed)?;
    create_dir(&args.out)?;
    let paths = [NODES_FILE, EDGES_FILE, SPLITS_FILE].map(|f| args.out.join(f));
    write_nodes(&g, &paths[0])?;
    write_edges(&g, &paths[1])?;
    write_splits(&splits, &paths[2])?;
    Ok(paths.to_vec())
}

pub fn cmd_train(args: &TrainArgs) -> Result<RunManifest> {
    let started = Instant::now();
    let cfg = args.config.resolve()?;
    let seeds = if args.seeds.is_empty() {
        vec![cfg.seed]
    } else {
        args.seeds.clone()
    };
    let data = args.data.load()?;
    create_dir(&args.out)?;
    let manifest_path = args.out.join(MANIFEST_FILE);
    // a stale manifest would describe artifacts this run may not produce
    if manifest_path.exists() {
        fs::remove_file(&manifest_path)
            .with_context(|| format!("removing {}", manifest_path.display()))?;
    }
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<RunManifest> {
        let outcomes = pool(args.jobs)?.install(|| {
            trainer::train_seeds(
                &data.graph,
                &data.splits,
                &cfg,
                &seeds,
                data.pair_text.as_ref(),
            )
        })?;
        let mut runs = Vec::new();
        for out in &outcomes {
            let dir = args.out.join(format!("seed_{}", out.config.seed));
            create_dir(&dir)?;
            written.push(dir.clone());
            let art = SeedArtifacts {
                seed: out.config.seed,
                checkpoint: dir.join("checkpoint.json"),
                metrics: dir.join("metrics.json"),
                trace: dir.join("trace.csv"),
            };
            out.checkpoint.save(&art.checkpoint)?;
            fs::write(&art.metrics, out.metrics_json()?)
                .with_context(|| format!("writing {}", art.metrics.display()))?;
            out.write_trace(&art.trace)?;
            runs.push(art);
        }
        let tests: Vec<_> = outcomes.iter().map(|o| o.test).collect();
        let summary = Summary {
            curriculum: cfg.curriculum.mode.as_str(),
            seeds: seeds.clone(),
            test: MetricsSummary::of(&tests),
            per_seed: outcomes.iter().map(|o| (o.config.seed, o.test)).collect(),
        };
        let summary_path = args.out.join("summary.json");
        written.push(summary_path.clone());
        fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
            .with_context(|| format!("writing {}", summary_path.display()))?;
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config::snapshot(&cfg),
            seeds: seeds.clone(),
            runs,
            summary: summary_path,
            wall_clock_secs: started.elapsed().as_secs_f64(),
        })
    })();
    match result {
        Ok(manifest) => {
            write_atomic(
                &manifest_path,
                serde_json::to_string_pretty(&manifest)?.as_bytes(),
            )?;
            Ok(manifest)
        }
        Err(e) => {
            for p in written {
                let _ = if p.is_dir() {
                    fs::remove_dir_all(&p)
                } else {
                    fs::remove_file(&p)
                };
            }
            Err(e)
        }
    }
}

#[derive(Serialize)]
struct Summary {
    curriculum: &'static str,
    seeds: Vec<u64>,
    test: MetricsSummary,
    per_seed: Vec<(u64, trainer::Metrics)>,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<trainer::Metrics> {
    let cfg = args.config.resolve()?;
    let data = args.data.load()?;
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let metrics = trainer::evaluate_checkpoint(
        &ckpt,
        &data.graph,
        data.splits.get(args.split),
        data.pair_text.as_ref(),
        cfg.eval_threshold,
    )?;
    if let Some(out) = &args.out {
        fs::write(out, serde_json::to_string_pretty(&metrics)?)
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(metrics)
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<Vec<trainer::AblationRow>> {
    let cfg = args.config.resolve()?;
    for setting in &args.grid {
        args.axis
            .apply(&cfg, setting)
            .map_err(|e| usage(e.to_string()))?;
    }
    let data = args.data.load()?;
    let rows = pool(args.jobs)?.install(|| {
        trainer::ablate(
            &data.graph,
            &data.splits,
            &cfg,
            args.axis,
            &args.grid,
            &args.seeds,
            data.pair_text.as_ref(),
        )
    })?;
    create_dir(&args.out)?;
    write_atomic(
        &args.out.join("ablation.csv"),
        trainer::ablation_csv(&rows).as_bytes(),
    )?;
    let summary = trainer::summarize_ablation(&rows);
    write_atomic(
        &args.out.join("ablation_summary.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    Ok(rows)
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<Vec<PathBuf>> {
    let rows = diagnostics::read_trace(&args.trace)?;
    let trace = DifficultyTrace::from_rows(&rows)
        .with_context(|| format!("in {}", args.trace.display()))?;
    let need = 2 * args.window + 1;
    if trace.n_epochs() < need {
        return Err(usage(format!(
            "--window {} needs a trace of at least {need} epochs, {} has {}",
            args.window,
            args.trace.display(),
            trace.n_epochs()
        )));
    }
    Ok(diagnostics::write_all(&trace, args.window, &args.out)?.paths)
}

/// Runs a parsed command, printing a short report to stdout.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Synth(a) => {
            for p in cmd_synth(&a)? {
                println!("wrote {}", p.display());
            }
        }
        Cmd::Train(a) => {
            let m = cmd_train(&a)?;
            let summary: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(&m.summary)?)?;
            println!("{}", serde_json::to_string_pretty(&summary["test"])?);
            println!("wrote {}", a.out.join(MANIFEST_FILE).display());
        }
        Cmd::Eval(a) => {
            let m = cmd_eval(&a)?;
            println!("{}", serde_json::to_string_pretty(&m)?);
        }
        Cmd::Ablate(a) => {
            let rows = cmd_ablate(&a)?;
            for (setting, s) in trainer::summarize_ablation(&rows) {
                println!("{setting}: F1 {} over {} seeds", s.f1, s.runs);
            }
        }
        Cmd::Diagnose(a) => {
            for p in cmd_diagnose(&a)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}
