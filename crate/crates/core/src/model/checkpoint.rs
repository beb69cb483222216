//! Versioned JSON checkpoint holding everything evaluation needs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GtnnParams, HyperParams};
use crate::error::{Error, Result};
use crate::textfeat::{Bm25Params, FeatureFlags, FeatureLayout, RelevanceScaler};

pub const CHECKPOINT_FORMAT: &str = "gtnn-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub hyper: HyperParams,
    /// Node ids in index order.
    pub node_ids: Vec<String>,
    /// Initial node embeddings used by the encoder, by index.
    pub embeddings: Vec<Vec<f64>>,
    /// Message-passing edges as index pairs.
    pub message_edges: Vec<(usize, usize)>,
    pub features: FeatureFlags,
    pub layout: FeatureLayout,
    pub bm25: Bm25Params,
    pub scaler: Option<RelevanceScaler>,
    pub params: GtnnParams,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!(
                "unexpected format {:?}",
                ckpt.format
            )));
        }
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {} (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        ckpt.params.validate()?;
        if ckpt.embeddings.len() != ckpt.node_ids.len() {
            return Err(Error::Checkpoint(
                "embedding count does not match node count".into(),
            ));
        }
        Ok(ckpt)
    }
}
