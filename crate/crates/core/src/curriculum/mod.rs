//! Confidence-based sample weighting.
//!
//! SuperLoss assigns each sample the weight minimizing
//! `(l - threshold) * sigma + lambda * ln(sigma)^2`, with the threshold a
//! running average `tau` of batch losses. The trend-aware variant shifts the
//! threshold per sample to `tau - alpha * delta`, where `delta` in `[-1, 1]`
//! summarizes whether the sample's recent losses are rising or falling.

mod lambert;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lambert::{lambert_w0, BRANCH_POINT, BRANCH_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurriculumMode {
    /// Unweighted training; every weight is 1.
    None,
    /// SuperLoss: the trend shift is disabled regardless of `alpha`.
    Sl,
    TrendSl,
}

impl CurriculumMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CurriculumMode::None => "none",
            CurriculumMode::Sl => "sl",
            CurriculumMode::TrendSl => "trend_sl",
        }
    }
}

impl fmt::Display for CurriculumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurriculumMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" | "rote" => Ok(CurriculumMode::None),
            "sl" => Ok(CurriculumMode::Sl),
            "trend_sl" | "trend-sl" => Ok(CurriculumMode::TrendSl),
            other => Err(format!("unknown curriculum mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurriculumConfig {
    pub mode: CurriculumMode,
    pub alpha: f64,
    pub lambda: f64,
    /// Loss window length.
    pub k: usize,
    pub ema_gamma: f64,
}

impl Default for CurriculumConfig {
    fn default() -> Self {
        CurriculumConfig {
            mode: CurriculumMode::TrendSl,
            alpha: 0.3,
            lambda: 1.0,
            k: 5,
            ema_gamma: 0.9,
        }
    }
}

impl CurriculumConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| {
            Err(Error::Config {
                key: key.into(),
                msg,
            })
        };
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("curriculum.alpha", format!("{} not in [0, 1]", self.alpha));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(
                "curriculum.lambda",
                format!("{} must be positive", self.lambda),
            );
        }
        if self.k == 0 {
            return bad("curriculum.k", "must be at least 1".into());
        }
        if !(self.ema_gamma > 0.0 && self.ema_gamma < 1.0) {
            return bad(
                "curriculum.ema_gamma",
                format!("{} not in (0, 1)", self.ema_gamma),
            );
        }
        Ok(())
    }

    /// The trend weight actually applied.
    pub fn effective_alpha(&self) -> f64 {
        match self.mode {
            CurriculumMode::TrendSl => self.alpha,
            _ => 0.0,
        }
    }
}

/// The last `k` losses of one sample with their iteration indices.
#[derive(Clone, Debug, PartialEq)]
pub struct LossHistory {
    capacity: usize,
    entries: VecDeque<(u64, f64)>,
}

impl LossHistory {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        LossHistory {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn from_losses(capacity: usize, losses: &[f64]) -> Self {
        let mut h = LossHistory::new(capacity);
        for (i, &l) in losses.iter().enumerate() {
            h.push(i as u64, l);
        }
        h
    }

    pub fn push(&mut self, iteration: u64, loss: f64) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((iteration, loss));
    }

    pub fn losses(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, l)| l)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// Normalized sum of consecutive loss differences over a window.
///
/// Returns 0 with fewer than two losses or when all losses are equal.
pub fn trend_delta_of(losses: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for w in losses.windows(2) {
        let d = w[1] - w[0];
        num += d;
        den += d.abs();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).clamp(-1.0, 1.0)
    }
}

pub fn trend_delta(hist: &LossHistory) -> f64 {
    let losses: Vec<f64> = hist.losses().collect();
    trend_delta_of(&losses)
}

/// Closed-form confidence `exp(-W0(max(-2/e, beta) / 2))` with
/// `beta = (l - (tau - alpha * delta)) / lambda`. Lies in `(0, e]`.
pub fn sigma_star(l: f64, tau: f64, delta: f64, alpha: f64, lambda: f64) -> f64 {
    sigma_from_threshold(l, tau - alpha * delta, lambda)
}

fn sigma_from_threshold(l: f64, threshold: f64, lambda: f64) -> f64 {
    let beta = (l - threshold) / lambda;
    let y = 0.5 * beta.max(-2.0 / std::f64::consts::E);
    (-lambert::w0_unchecked(y)).exp()
}

/// The weighted objective minimized by [`sigma_star`].
pub fn confidence_objective(sigma: f64, l: f64, threshold: f64, lambda: f64) -> f64 {
    (l - threshold) * sigma + lambda * sigma.ln().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl Difficulty {
    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
        }
    }
}

impl FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "easy" => Ok(Difficulty::Easy),
            "hard" => Ok(Difficulty::Hard),
            other => Err(format!("unknown difficulty {other:?}")),
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultyLabel {
    pub difficulty: Difficulty,
    /// `tau - alpha * delta` for this sample; a tie counts as easy.
    pub threshold_used: f64,
}

impl DifficultyLabel {
    pub fn classify(loss: f64, threshold: f64) -> Self {
        let difficulty = if loss <= threshold {
            Difficulty::Easy
        } else {
            Difficulty::Hard
        };
        DifficultyLabel {
            difficulty,
            threshold_used: threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchWeights {
    pub sigma: Vec<f64>,
    pub labels: Vec<DifficultyLabel>,
    pub deltas: Vec<f64>,
    /// Threshold after this batch's update.
    pub tau: f64,
}

/// Mutable curriculum state: the EMA threshold and per-sample histories.
#[derive(Clone, Debug)]
pub struct CurriculumState {
    pub config: CurriculumConfig,
    tau: Option<f64>,
    histories: HashMap<u64, LossHistory>,
}

impl CurriculumState {
    pub fn new(config: CurriculumConfig) -> Result<Self> {
        config.validate()?;
        Ok(CurriculumState {
            config,
            tau: None,
            histories: HashMap::new(),
        })
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn history(&self, sample: u64) -> Option<&LossHistory> {
        self.histories.get(&sample)
    }

    /// First call sets `tau` to the batch mean; later calls blend it in with
    /// weight `1 - ema_gamma`.
    pub fn update_tau(&mut self, batch_losses: &[f64]) -> Result<f64> {
        if batch_losses.is_empty() {
            return Err(Error::invalid("update_tau needs a nonempty batch"));
        }
        if batch_losses.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid("batch losses must be finite"));
        }
        let mean = batch_losses.iter().sum::<f64>() / batch_losses.len() as f64;
        let gamma = self.config.ema_gamma;
        let tau = match self.tau {
            None => mean,
            Some(t) => gamma * t + (1.0 - gamma) * mean,
        };
        self.tau = Some(tau);
        Ok(tau)
    }

    /// Records the batch losses, updates `tau`, then weights every sample.
    ///
    /// Order within a batch: losses are appended to each history first, `tau`
    /// is updated second, and each `delta` is computed over the window after
    /// insertion (so it includes the current loss).
    pub fn weight_batch(
        &mut self,
        sample_ids: &[u64],
        losses: &[f64],
        iteration: u64,
    ) -> Result<BatchWeights> {
        if sample_ids.len() != losses.len() {
            return Err(Error::invalid(format!(
                "{} sample ids but {} losses",
                sample_ids.len(),
                losses.len()
            )));
        }
        let tau = self.update_tau(losses)?;
        let k = self.config.k;
        let alpha = self.config.effective_alpha();
        let n = losses.len();
        let mut out = BatchWeights {
            sigma: Vec::with_capacity(n),
            labels: Vec::with_capacity(n),
            deltas: Vec::with_capacity(n),
            tau,
        };
        for (&id, &l) in sample_ids.iter().zip(losses) {
            let hist = self
                .histories
                .entry(id)
                .or_insert_with(|| LossHistory::new(k));
            hist.push(iteration, l);
            let delta = trend_delta(hist);
            let threshold = tau - alpha * delta;
            let sigma = match self.config.mode {
                CurriculumMode::None => 1.0,
                _ => sigma_from_threshold(l, threshold, self.config.lambda),
            };
            out.sigma.push(sigma);
            out.labels.push(DifficultyLabel::classify(l, threshold));
            out.deltas.push(delta);
        }
        Ok(out)
    }
}
