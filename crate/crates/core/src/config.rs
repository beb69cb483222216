//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Every key also exists as a
//! command-line flag; flags override the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("model.d", "node embedding width after message passing"),
    ("model.d_e", "width of the projected pair feature h_uv"),
    ("model.d_h", "hidden width of the last decoder layer"),
    ("model.t_layers", "number of message-passing layers"),
    ("optim.lr", "Adam learning rate"),
    ("optim.beta1", "Adam first-moment decay"),
    ("optim.beta2", "Adam second-moment decay"),
    ("optim.eps", "Adam denominator epsilon"),
    ("train.batch_size", "pairs per mini-batch"),
    ("train.max_epochs", "upper bound on training epochs"),
    (
        "train.patience",
        "epochs without validation F1 gain before stopping, or inf",
    ),
    (
        "train.eval_threshold",
        "probability at or above which a pair is predicted linked",
    ),
    ("train.seed", "root seed for initialization and shuffling"),
    ("embedding.init", "initial node embeddings: file or random"),
    (
        "embedding.random_dim",
        "width of random embeddings when the nodes file has none",
    ),
    (
        "features.relevance",
        "append BM25 and TF-IDF relevance to a_uv",
    ),
    (
        "features.passthrough",
        "append both initial node embeddings to a_uv",
    ),
    (
        "features.pair_text",
        "append the per-pair text embedding to a_uv",
    ),
    ("curriculum.mode", "none, sl or trend_sl"),
    ("curriculum.alpha", "trend weight in [0, 1]"),
    ("curriculum.lambda", "confidence regularization strength"),
    ("curriculum.k", "per-sample loss history length"),
    (
        "curriculum.ema_gamma",
        "decay of the loss threshold moving average",
    ),
    ("textfeat.bm25_k1", "BM25 term-frequency saturation"),
    ("textfeat.bm25_b", "BM25 length normalization"),
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Config {
        key: key.into(),
        msg: format!("{value:?}: {e}"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(Error::Config {
            key: key.into(),
            msg: format!("{value:?} is not a boolean"),
        }),
    }
}

/// Sets one key. Values are checked for syntax here and for range by
/// [`TrainConfig::validate`].
pub fn apply(cfg: &mut TrainConfig, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    let h = &mut cfg.hyper;
    let c = &mut cfg.curriculum;
    match key {
        "model.d" => h.d = parse(key, value)?,
        "model.d_e" => h.d_e = parse(key, value)?,
        "model.d_h" => h.d_h = parse(key, value)?,
        "model.t_layers" => h.t_layers = parse(key, value)?,
        "optim.lr" => h.lr = parse(key, value)?,
        "optim.beta1" => h.beta1 = parse(key, value)?,
        "optim.beta2" => h.beta2 = parse(key, value)?,
        "optim.eps" => h.eps = parse(key, value)?,
        "train.batch_size" => h.batch_size = parse(key, value)?,
        "train.max_epochs" => h.max_epochs = parse(key, value)?,
        "train.patience" => {
            h.patience = if value == "inf" {
                usize::MAX
            } else {
                parse(key, value)?
            }
        }
        "train.eval_threshold" => cfg.eval_threshold = parse(key, value)?,
        "train.seed" => cfg.seed = parse(key, value)?,
        "embedding.init" => cfg.embedding_init = parse(key, value)?,
        "embedding.random_dim" => cfg.random_embedding_dim = parse(key, value)?,
        "features.relevance" => cfg.features.relevance = parse_bool(key, value)?,
        "features.passthrough" => cfg.features.passthrough = parse_bool(key, value)?,
        "features.pair_text" => cfg.features.pair_text = parse_bool(key, value)?,
        "curriculum.mode" => c.mode = parse(key, value)?,
        "curriculum.alpha" => c.alpha = parse(key, value)?,
        "curriculum.lambda" => c.lambda = parse(key, value)?,
        "curriculum.k" => c.k = parse(key, value)?,
        "curriculum.ema_gamma" => c.ema_gamma = parse(key, value)?,
        "textfeat.bm25_k1" => cfg.bm25.k1 = parse(key, value)?,
        "textfeat.bm25_b" => cfg.bm25.b = parse(key, value)?,
        _ => {
            return Err(Error::Config {
                key: key.into(),
                msg: "unknown key".into(),
            })
        }
    }
    Ok(())
}

/// Parses `key = value` lines without applying them.
pub fn parse_str(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
            key: format!("line {}", n + 1),
            msg: format!("expected key = value, got {line:?}"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Applies a config file on top of `base` and validates the result.
pub fn load(path: &Path, base: TrainConfig) -> Result<TrainConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = base;
    for (k, v) in parse_str(&text)? {
        apply(&mut cfg, &k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Every key with its current value; `apply` on these reproduces `cfg`.
pub fn snapshot(cfg: &TrainConfig) -> BTreeMap<String, String> {
    let h = &cfg.hyper;
    let c = &cfg.curriculum;
    let patience = if h.patience == usize::MAX {
        "inf".to_string()
    } else {
        h.patience.to_string()
    };
    [
        ("model.d", h.d.to_string()),
        ("model.d_e", h.d_e.to_string()),
        ("model.d_h", h.d_h.to_string()),
        ("model.t_layers", h.t_layers.to_string()),
        ("optim.lr", h.lr.to_string()),
        ("optim.beta1", h.beta1.to_string()),
        ("optim.beta2", h.beta2.to_string()),
        ("optim.eps", h.eps.to_string()),
        ("train.batch_size", h.batch_size.to_string()),
        ("train.max_epochs", h.max_epochs.to_string()),
        ("train.patience", patience),
        ("train.eval_threshold", cfg.eval_threshold.to_string()),
        ("train.seed", cfg.seed.to_string()),
        ("embedding.init", cfg.embedding_init.as_str().to_string()),
        ("embedding.random_dim", cfg.random_embedding_dim.to_string()),
        ("features.relevance", cfg.features.relevance.to_string()),
        ("features.passthrough", cfg.features.passthrough.to_string()),
        ("features.pair_text", cfg.features.pair_text.to_string()),
        ("curriculum.mode", c.mode.as_str().to_string()),
        ("curriculum.alpha", c.alpha.to_string()),
        ("curriculum.lambda", c.lambda.to_string()),
        ("curriculum.k", c.k.to_string()),
        ("curriculum.ema_gamma", c.ema_gamma.to_string()),
        ("textfeat.bm25_k1", cfg.bm25.k1.to_string()),
        ("textfeat.bm25_b", cfg.bm25.b.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Key reference for `--help` output.
pub fn key_help() -> String {
    let width = KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let defaults = snapshot(&TrainConfig::default());
    let mut out = String::from("Config keys (file `key = value`, or the matching --flag):\n");
    for (k, desc) in KEYS {
        out.push_str(&format!(
            "  {k:<width$}  {desc} [default: {}]\n",
            defaults[*k]
        ));
    }
    out
}
