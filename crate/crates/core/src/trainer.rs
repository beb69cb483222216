//! Training orchestration: batching, curriculum weighting, Adam, early
//! stopping on validation F1, and the ablation harness.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curriculum::{CurriculumConfig, CurriculumMode, CurriculumState, Difficulty};
use crate::diagnostics::TraceRow;
use crate::error::{Error, Result};
use crate::graphstore::{Graph, PairSample, SplitName, SplitSet};
use crate::model::{
    backward_batch, bce_loss, encode, forward_pair, Adam, BackwardItem, Checkpoint, GtnnParams,
    HyperParams, ModelDims, Tensor, CHECKPOINT_FORMAT, CHECKPOINT_VERSION,
};
use crate::rng::{rng_for, stream};
use crate::textfeat::{
    build_corpus, Bm25Params, CorpusStats, FeatureFlags, FeatureLayout, FeatureSource,
    PairTextTable, RelevanceCache, RelevanceScaler,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingInit {
    /// Embeddings from the nodes file.
    File,
    /// Uniform noise in `[-1, 1]`, seeded by the run seed.
    Random,
}

impl EmbeddingInit {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingInit::File => "file",
            EmbeddingInit::Random => "random",
        }
    }
}

impl FromStr for EmbeddingInit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "file" => Ok(EmbeddingInit::File),
            "random" => Ok(EmbeddingInit::Random),
            other => Err(format!("unknown embedding init {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hyper: HyperParams,
    pub curriculum: CurriculumConfig,
    pub seed: u64,
    pub embedding_init: EmbeddingInit,
    /// Width of random embeddings when the graph carries none.
    pub random_embedding_dim: usize,
    pub features: FeatureFlags,
    pub bm25: Bm25Params,
    pub eval_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hyper: HyperParams::default(),
            curriculum: CurriculumConfig::default(),
            seed: 0,
            embedding_init: EmbeddingInit::File,
            random_embedding_dim: 8,
            features: FeatureFlags::default(),
            bm25: Bm25Params::default(),
            eval_threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        self.curriculum.validate()?;
        if !(self.eval_threshold > 0.0 && self.eval_threshold < 1.0) {
            return Err(Error::Config {
                key: "train.eval_threshold".into(),
                msg: format!("{} not in (0, 1)", self.eval_threshold),
            });
        }
        if self.random_embedding_dim == 0 {
            return Err(Error::Config {
                key: "embedding.random_dim".into(),
                msg: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Metrics {
    /// Zero denominators give 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            tn,
        }
    }

    pub fn from_predictions(probs: &[f64], labels: &[u8], threshold: f64) -> Self {
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for (&p, &y) in probs.iter().zip(labels) {
            match (p >= threshold, y == 1) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        Metrics::from_counts(tp, fp, fn_, tn)
    }
}

/// Mean and sample standard deviation over runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return MeanStd {
                mean: 0.0,
                std: 0.0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanStd { mean, std }
    }
}

impl fmt::Display for MeanStd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.mean, self.std)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub runs: usize,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
}

impl MetricsSummary {
    pub fn of(metrics: &[Metrics]) -> Self {
        let col = |f: fn(&Metrics) -> f64| MeanStd::of(&metrics.iter().map(f).collect::<Vec<_>>());
        MetricsSummary {
            runs: metrics.len(),
            precision: col(|m| m.precision),
            recall: col(|m| m.recall),
            f1: col(|m| m.f1),
        }
    }
}

/// Curriculum view of one training sample in one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSnapshot {
    pub loss: f64,
    pub delta: f64,
    pub sigma: f64,
    pub label: Difficulty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub tau: f64,
    pub easy_fraction: f64,
    pub valid: Metrics,
    /// One entry per training sample, in training-split order.
    #[serde(skip)]
    pub snapshot: Vec<SampleSnapshot>,
}

/// Dataset tensors shared by training and evaluation.
pub struct Prepared {
    pub message_graph: Graph,
    pub embeddings: Vec<Vec<f64>>,
    pub x: Tensor,
    pub layout: FeatureLayout,
    pub scaler: Option<RelevanceScaler>,
    pub splits: BTreeMap<&'static str, PreparedSplit>,
}

#[derive(Clone, Debug, Default)]
pub struct PreparedSplit {
    pub pairs: Vec<(usize, usize)>,
    pub labels: Vec<u8>,
    pub features: Vec<Vec<f64>>,
    pub ids: Vec<String>,
}

impl Prepared {
    pub fn split(&self, name: SplitName) -> &PreparedSplit {
        &self.splits[name.as_str()]
    }
}

pub fn resolve_embeddings(g: &Graph, cfg: &TrainConfig) -> Result<Vec<Vec<f64>>> {
    match cfg.embedding_init {
        EmbeddingInit::File => g
            .nodes()
            .iter()
            .map(|n| {
                n.init_embedding
                    .clone()
                    .ok_or_else(|| Error::MissingFeature {
                        feature: "embedding",
                        reason: format!("node {:?} has no embedding in the nodes file", n.id),
                    })
            })
            .collect(),
        EmbeddingInit::Random => {
            let dim = g.d_in().unwrap_or(cfg.random_embedding_dim);
            let mut rng = rng_for(cfg.seed, stream::INIT_EMBED, 0);
            Ok((0..g.len())
                .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                .collect())
        }
    }
}

fn index_pairs(g: &Graph, samples: &[PairSample]) -> Result<Vec<(usize, usize)>> {
    samples
        .iter()
        .map(|s| Ok((g.require(&s.u)?, g.require(&s.v)?)))
        .collect()
}

/// Resolves embeddings, builds the training-positive message graph and
/// computes `a_uv` for every sampled pair once.
///
/// Relevance columns are min-max scaled over all sampled pairs.
pub fn prepare(
    g: &Graph,
    splits: &SplitSet,
    cfg: &TrainConfig,
    pair_text: Option<&PairTextTable>,
) -> Result<Prepared> {
    let embeddings = resolve_embeddings(g, cfg)?;
    let train_pos: Vec<(usize, usize)> = index_pairs(g, &splits.train)?
        .into_iter()
        .zip(&splits.train)
        .filter(|(_, s)| s.label() == 1)
        .map(|(p, _)| p)
        .collect();
    let message_graph = g.with_edges(train_pos)?;
    let stats = if cfg.features.relevance {
        Some(build_corpus(g)?)
    } else {
        None
    };
    let mut source = FeatureSource {
        graph: g,
        embeddings: &embeddings,
        stats: stats.as_ref(),
        pair_text,
        flags: cfg.features,
        bm25: cfg.bm25,
        scaler: None,
    };
    source.check()?;
    let layout = source.layout();

    let mut cache = RelevanceCache::new();
    let mut raw = Vec::new();
    for name in [SplitName::Train, SplitName::Valid, SplitName::Test] {
        let samples = splits.get(name);
        let pairs = index_pairs(g, samples)?;
        let mut rel = Vec::with_capacity(pairs.len());
        if cfg.features.relevance {
            for &(u, v) in &pairs {
                rel.push(source.raw_relevance(u, v, Some(&mut cache))?);
            }
        }
        raw.push((name, pairs, rel));
    }
    let scaler = cfg
        .features
        .relevance
        .then(|| RelevanceScaler::fit(raw.iter().flat_map(|(_, _, r)| r.iter())));
    source.scaler = scaler;

    let mut out = BTreeMap::new();
    for (name, pairs, _) in raw {
        let samples = splits.get(name);
        let mut features = Vec::with_capacity(pairs.len());
        for &(u, v) in &pairs {
            features.push(source.pair_features(u, v, Some(&mut cache))?.to_vec());
        }
        out.insert(
            name.as_str(),
            PreparedSplit {
                labels: samples.iter().map(PairSample::label).collect(),
                ids: samples.iter().map(PairSample::sample_id).collect(),
                pairs,
                features,
            },
        );
    }
    let x = Tensor::from_rows(&embeddings);
    Ok(Prepared {
        message_graph,
        embeddings,
        x,
        layout,
        scaler,
        splits: out,
    })
}

/// Edge probabilities for `pairs`.
pub fn predict(
    params: &GtnnParams,
    graph: &Graph,
    x: &Tensor,
    pairs: &[(usize, usize)],
    features: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let enc = encode(graph, x, params)?;
    pairs
        .iter()
        .zip(features)
        .map(|(&(u, v), a)| Ok(forward_pair(u, v, enc.z(), a, params)?.p))
        .collect()
}

/// Precision, recall and F1 with label 1 predicted iff `p >= threshold`.
pub fn evaluate(
    params: &GtnnParams,
    graph: &Graph,
    x: &Tensor,
    split: &PreparedSplit,
    threshold: f64,
) -> Result<Metrics> {
    if split.pairs.is_empty() {
        return Err(Error::invalid("cannot evaluate an empty pair set"));
    }
    let probs = predict(params, graph, x, &split.pairs, &split.features)?;
    Ok(Metrics::from_predictions(&probs, &split.labels, threshold))
}

pub struct TrainOutcome {
    pub config: TrainConfig,
    pub checkpoint: Checkpoint,
    pub records: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub test: Metrics,
    /// Training-sample ids in split order; aligns with every snapshot.
    pub sample_ids: Vec<String>,
}

#[derive(Serialize)]
struct MetricsReport<'a> {
    seed: u64,
    curriculum: CurriculumMode,
    config: BTreeMap<String, String>,
    best_epoch: Option<usize>,
    epochs: &'a [EpochRecord],
    test: Metrics,
}

impl TrainOutcome {
    pub fn metrics_json(&self) -> Result<String> {
        let report = MetricsReport {
            seed: self.config.seed,
            curriculum: self.config.curriculum.mode,
            config: crate::config::snapshot(&self.config),
            best_epoch: self.best_epoch,
            epochs: &self.records,
            test: self.test,
        };
        Ok(serde_json::to_string_pretty(&report)?)
    }

    pub fn trace_rows(&self) -> Vec<TraceRow> {
        let mut rows = Vec::new();
        for rec in &self.records {
            for (id, s) in self.sample_ids.iter().zip(&rec.snapshot) {
                rows.push(TraceRow {
                    epoch: rec.epoch,
                    sample_id: id.clone(),
                    loss: s.loss,
                    delta: s.delta,
                    sigma: s.sigma,
                    label: s.label,
                });
            }
        }
        rows
    }

    pub fn write_trace(&self, path: &Path) -> Result<()> {
        crate::diagnostics::write_trace(&self.trace_rows(), path)
    }
}

/// Trains one model. Deterministic given the configuration and data.
pub fn train(
    g: &Graph,
    splits: &SplitSet,
    cfg: &TrainConfig,
    pair_text: Option<&PairTextTable>,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if splits.train.is_empty() {
        return Err(Error::invalid("training split is empty"));
    }
    let data = prepare(g, splits, cfg, pair_text)?;
    train_prepared(g, &data, cfg)
}

pub fn train_prepared(g: &Graph, data: &Prepared, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let hyper = &cfg.hyper;
    let d_in = data.x.cols();
    let dims = ModelDims::new(hyper, d_in, data.layout.len());
    let mut params = GtnnParams::init(&dims, cfg.seed);
    let mut adam = Adam::new(&params, hyper);
    let mut curriculum = CurriculumState::new(cfg.curriculum)?;
    let train = data.split(SplitName::Train);
    let valid = data.split(SplitName::Valid);
    let graph = &data.message_graph;

    let mut best = params.clone();
    let mut best_f1 = f64::NEG_INFINITY;
    let mut best_epoch = None;
    let mut wait = 0usize;
    let mut records = Vec::new();
    let mut iteration = 0u64;
    let mut order: Vec<usize> = (0..train.pairs.len()).collect();

    for epoch in 0..hyper.max_epochs {
        order.shuffle(&mut rng_for(cfg.seed, stream::SHUFFLE, epoch as u64));
        let mut snapshot = vec![
            SampleSnapshot {
                loss: 0.0,
                delta: 0.0,
                sigma: 1.0,
                label: Difficulty::Easy,
            };
            train.pairs.len()
        ];
        let mut loss_sum = 0.0;
        for (batch_idx, batch) in order.chunks(hyper.batch_size).enumerate() {
            let enc = encode(graph, &data.x, &params)?;
            let traces = batch
                .iter()
                .map(|&i| {
                    let (u, v) = train.pairs[i];
                    forward_pair(u, v, enc.z(), &train.features[i], &params)
                })
                .collect::<Result<Vec<_>>>()?;
            let losses: Vec<f64> = traces
                .iter()
                .zip(batch)
                .map(|(t, &i)| bce_loss(t.p, train.labels[i]))
                .collect();
            if losses.iter().any(|l| !l.is_finite()) {
                return Err(Error::Diverged {
                    epoch,
                    batch: batch_idx,
                });
            }
            let ids: Vec<u64> = batch.iter().map(|&i| i as u64).collect();
            let weights = curriculum.weight_batch(&ids, &losses, iteration)?;
            iteration += 1;
            let items: Vec<BackwardItem<'_>> = traces
                .iter()
                .zip(batch)
                .zip(&weights.sigma)
                .map(|((t, &i), &w)| BackwardItem {
                    trace: t,
                    label: train.labels[i],
                    weight: w,
                })
                .collect();
            let grads = backward_batch(&items, &enc, graph, &params)?;
            adam.step(&mut params, &grads);
            for (k, &i) in batch.iter().enumerate() {
                snapshot[i] = SampleSnapshot {
                    loss: losses[k],
                    delta: weights.deltas[k],
                    sigma: weights.sigma[k],
                    label: weights.labels[k].difficulty,
                };
                loss_sum += losses[k];
            }
        }
        let metrics = evaluate(&params, graph, &data.x, valid, cfg.eval_threshold)?;
        let easy = snapshot
            .iter()
            .filter(|s| s.label == Difficulty::Easy)
            .count();
        records.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train.pairs.len() as f64,
            tau: curriculum.tau().unwrap_or(0.0),
            easy_fraction: easy as f64 / train.pairs.len() as f64,
            valid: metrics,
            snapshot,
        });
        if metrics.f1 > best_f1 {
            best_f1 = metrics.f1;
            best = params.clone();
            best_epoch = Some(epoch);
            wait = 0;
        } else {
            wait += 1;
            if wait >= hyper.patience {
                break;
            }
        }
    }

    let test = evaluate(
        &best,
        graph,
        &data.x,
        data.split(SplitName::Test),
        cfg.eval_threshold,
    )?;
    let checkpoint = Checkpoint {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        hyper: hyper.clone(),
        node_ids: g.nodes().iter().map(|n| n.id.clone()).collect(),
        embeddings: data.embeddings.clone(),
        message_edges: graph.edge_list(),
        features: cfg.features,
        layout: data.layout,
        bm25: cfg.bm25,
        scaler: data.scaler,
        params: best,
    };
    Ok(TrainOutcome {
        config: cfg.clone(),
        checkpoint,
        records,
        best_epoch,
        test,
        sample_ids: train.ids.clone(),
    })
}

/// A saved model bound to a graph, ready to score arbitrary pairs.
pub struct Scorer<'a> {
    ckpt: &'a Checkpoint,
    graph: &'a Graph,
    pair_text: Option<&'a PairTextTable>,
    stats: Option<CorpusStats>,
    z: Tensor,
}

impl<'a> Scorer<'a> {
    /// Encodes every node once. The graph must list the checkpoint's nodes
    /// in the same order.
    pub fn new(
        ckpt: &'a Checkpoint,
        graph: &'a Graph,
        pair_text: Option<&'a PairTextTable>,
    ) -> Result<Self> {
        let same = graph.len() == ckpt.node_ids.len()
            && graph
                .nodes()
                .iter()
                .zip(&ckpt.node_ids)
                .all(|(n, id)| &n.id == id);
        if !same {
            return Err(Error::Checkpoint(
                "graph node ids differ from the checkpoint's".into(),
            ));
        }
        let message_graph = graph.with_edges(ckpt.message_edges.iter().copied())?;
        let stats = if ckpt.features.relevance {
            Some(build_corpus(graph)?)
        } else {
            None
        };
        let x = Tensor::from_rows(&ckpt.embeddings);
        let z = encode(&message_graph, &x, &ckpt.params)?.z().clone();
        let scorer = Scorer {
            ckpt,
            graph,
            pair_text,
            stats,
            z,
        };
        let layout = scorer.source().layout();
        if layout != ckpt.layout {
            return Err(Error::Checkpoint(format!(
                "feature layout {layout:?} differs from the checkpoint's {:?}",
                ckpt.layout
            )));
        }
        Ok(scorer)
    }

    fn source(&self) -> FeatureSource<'_> {
        FeatureSource {
            graph: self.graph,
            embeddings: &self.ckpt.embeddings,
            stats: self.stats.as_ref(),
            pair_text: self.pair_text,
            flags: self.ckpt.features,
            bm25: self.ckpt.bm25,
            scaler: self.ckpt.scaler,
        }
    }

    pub fn score_idx(&self, u: usize, v: usize) -> Result<f64> {
        let a = self.source().pair_features(u, v, None)?.to_vec();
        Ok(forward_pair(u, v, &self.z, &a, &self.ckpt.params)?.p)
    }

    pub fn score(&self, u: &str, v: &str) -> Result<f64> {
        self.score_idx(self.graph.require(u)?, self.graph.require(v)?)
    }
}

/// Scores the pairs of one split with a saved model.
pub fn evaluate_checkpoint(
    ckpt: &Checkpoint,
    g: &Graph,
    samples: &[PairSample],
    pair_text: Option<&PairTextTable>,
    threshold: f64,
) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot evaluate an empty pair set"));
    }
    let scorer = Scorer::new(ckpt, g, pair_text)?;
    let probs = samples
        .iter()
        .map(|s| scorer.score(&s.u, &s.v))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<u8> = samples.iter().map(PairSample::label).collect();
    Ok(Metrics::from_predictions(&probs, &labels, threshold))
}

/// Trains one run per seed in parallel; results come back in seed order.
pub fn train_seeds(
    g: &Graph,
    splits: &SplitSet,
    base: &TrainConfig,
    seeds: &[u64],
    pair_text: Option<&PairTextTable>,
) -> Result<Vec<TrainOutcome>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = TrainConfig {
                seed,
                ..base.clone()
            };
            train(g, splits, &cfg, pair_text)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationAxis {
    EmbeddingInit,
    AdditionalFeatures,
}

impl FromStr for AblationAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "embedding_init" => Ok(AblationAxis::EmbeddingInit),
            "additional_features" => Ok(AblationAxis::AdditionalFeatures),
            other => Err(format!("unknown ablation axis {other:?}")),
        }
    }
}

impl AblationAxis {
    /// Applies one grid setting to a copy of `base`.
    pub fn apply(self, base: &TrainConfig, setting: &str) -> Result<TrainConfig> {
        let mut cfg = base.clone();
        match self {
            AblationAxis::EmbeddingInit => {
                cfg.embedding_init = setting.parse().map_err(Error::InvalidArgument)?;
            }
            AblationAxis::AdditionalFeatures => {
                let on = match setting {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    other => {
                        return Err(Error::invalid(format!(
                            "additional_features setting {other:?}"
                        )))
                    }
                };
                // passthrough embeddings stay; relevance and pair text toggle together
                cfg.features.relevance = on;
                cfg.features.pair_text = on && base.features.pair_text;
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub setting: String,
    pub seed: u64,
    pub metrics: Metrics,
}

/// Trains every `(setting, seed)` combination.
pub fn ablate(
    g: &Graph,
    splits: &SplitSet,
    base: &TrainConfig,
    axis: AblationAxis,
    grid: &[String],
    seeds: &[u64],
    pair_text: Option<&PairTextTable>,
) -> Result<Vec<AblationRow>> {
    if grid.is_empty() {
        return Err(Error::invalid("ablation grid is empty"));
    }
    if seeds.is_empty() {
        return Err(Error::invalid("ablation needs at least one seed"));
    }
    let jobs: Vec<(String, TrainConfig)> = grid
        .iter()
        .flat_map(|setting| {
            seeds.iter().map(move |&seed| {
                axis.apply(base, setting)
                    .map(|cfg| (setting.clone(), TrainConfig { seed, ..cfg }))
            })
        })
        .collect::<Result<_>>()?;
    jobs.par_iter()
        .map(|(setting, cfg)| {
            let out = train(g, splits, cfg, pair_text)?;
            Ok(AblationRow {
                setting: setting.clone(),
                seed: cfg.seed,
                metrics: out.test,
            })
        })
        .collect()
}

/// Mean test metrics per setting, in grid order.
pub fn summarize_ablation(rows: &[AblationRow]) -> Vec<(String, MetricsSummary)> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.setting.as_str()) {
            order.push(&r.setting);
        }
    }
    order
        .into_iter()
        .map(|s| {
            let ms: Vec<Metrics> = rows
                .iter()
                .filter(|r| r.setting == s)
                .map(|r| r.metrics)
                .collect();
            (s.to_string(), MetricsSummary::of(&ms))
        })
        .collect()
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("setting,seed,precision,recall,f1,tp,fp,fn,tn\n");
    for r in rows {
        let m = &r.metrics;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.setting, r.seed, m.precision, m.recall, m.f1, m.tp, m.fp, m.fn_, m.tn
        ));
    }
    out
}
