//! Pair-level "additional features": lexical relevance between node
//! descriptions, pass-through of the nodes' initial embeddings, and
//! optional externally supplied pair-text embeddings.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstore::{parse_floats, Graph};

/// Lowercases and splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn term_counts(tokens: &[String]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    counts
}

/// Document statistics over all nonempty node descriptions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub doc_count: usize,
    pub avg_doc_len: f64,
    pub doc_freq: BTreeMap<String, usize>,
    pub doc_lens: BTreeMap<String, usize>,
    /// Raw term counts per document, keyed by node id.
    pub term_counts: BTreeMap<String, BTreeMap<String, usize>>,
}

impl CorpusStats {
    /// Builds the corpus from `(node id, description)` pairs. Empty
    /// descriptions are skipped.
    pub fn from_documents<'a, I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut doc_freq = BTreeMap::new();
        let mut doc_lens = BTreeMap::new();
        let mut all_counts = BTreeMap::new();
        for (id, text) in docs {
            let tokens = tokenize(text);
            if tokens.is_empty() {
                continue;
            }
            let counts = term_counts(&tokens);
            for term in counts.keys() {
                *doc_freq.entry(term.clone()).or_insert(0) += 1;
            }
            doc_lens.insert(id.to_string(), tokens.len());
            all_counts.insert(id.to_string(), counts);
        }
        if doc_lens.is_empty() {
            return Err(Error::NoCorpus);
        }
        let doc_count = doc_lens.len();
        let total: usize = doc_lens.values().sum();
        Ok(CorpusStats {
            doc_count,
            avg_doc_len: total as f64 / doc_count as f64,
            doc_freq,
            doc_lens,
            term_counts: all_counts,
        })
    }

    fn doc(&self, id: &str) -> Result<&BTreeMap<String, usize>> {
        self.term_counts
            .get(id)
            .ok_or_else(|| Error::MissingFeature {
                feature: "relevance",
                reason: format!("node {id:?} has no description"),
            })
    }

    fn df(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }
}

pub fn build_corpus(g: &Graph) -> Result<CorpusStats> {
    CorpusStats::from_documents(
        g.nodes()
            .iter()
            .filter_map(|n| n.description.as_deref().map(|d| (n.id.as_str(), d))),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Non-negative BM25 inverse document frequency.
pub fn bm25_idf(doc_count: usize, df: usize) -> f64 {
    let n = doc_count as f64;
    let df = df as f64;
    ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
}

/// Okapi BM25 of `doc`'s description against the token multiset of
/// `query`'s description. Not symmetric.
pub fn bm25(query: &str, doc: &str, stats: &CorpusStats, params: Bm25Params) -> Result<f64> {
    let q = stats.doc(query)?;
    let d = stats.doc(doc)?;
    let dl = stats.doc_lens[doc] as f64;
    let norm = params.k1 * (1.0 - params.b + params.b * dl / stats.avg_doc_len);
    let mut score = 0.0;
    for (term, &qtf) in q {
        let Some(&tf) = d.get(term) else { continue };
        let tf = tf as f64;
        let idf = bm25_idf(stats.doc_count, stats.df(term));
        score += qtf as f64 * idf * tf * (params.k1 + 1.0) / (tf + norm);
    }
    Ok(score)
}

/// Cosine similarity of raw-count tf times `ln(N/df)` vectors; 0 when either
/// vector has zero norm.
pub fn tfidf_cosine(u: &str, v: &str, stats: &CorpusStats) -> Result<f64> {
    let a = stats.doc(u)?;
    let b = stats.doc(v)?;
    let n = stats.doc_count as f64;
    let weight = |term: &str, tf: usize| tf as f64 * (n / stats.df(term) as f64).ln();
    let norm = |doc: &BTreeMap<String, usize>| {
        doc.iter()
            .map(|(t, &tf)| weight(t, tf).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(t, &tf)| b.get(t).map(|&tf2| weight(t, tf) * weight(t, tf2)))
        .sum();
    Ok((dot / (na * nb)).clamp(0.0, 1.0))
}

/// Unscaled `[bm25, tfidf]` for a pair; BM25 is averaged over both query
/// directions.
pub fn raw_relevance(
    u: &str,
    v: &str,
    stats: &CorpusStats,
    params: Bm25Params,
) -> Result<[f64; 2]> {
    let forward = bm25(u, v, stats, params)?;
    let backward = bm25(v, u, stats, params)?;
    Ok([0.5 * (forward + backward), tfidf_cosine(u, v, stats)?])
}

/// Memoizes raw relevance by ordered pair.
#[derive(Debug, Default)]
pub struct RelevanceCache {
    scores: HashMap<(String, String), [f64; 2]>,
}

impl RelevanceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &mut self,
        u: &str,
        v: &str,
        stats: &CorpusStats,
        params: Bm25Params,
    ) -> Result<[f64; 2]> {
        let key = (u.to_string(), v.to_string());
        if let Some(s) = self.scores.get(&key) {
            return Ok(*s);
        }
        let s = raw_relevance(u, v, stats, params)?;
        self.scores.insert(key, s);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Per-dataset min-max scaling of the relevance columns to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelevanceScaler {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl RelevanceScaler {
    pub fn fit<'a, I>(rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64; 2]>,
    {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for row in rows {
            for k in 0..2 {
                min[k] = min[k].min(row[k]);
                max[k] = max[k].max(row[k]);
            }
        }
        if !min[0].is_finite() {
            return RelevanceScaler {
                min: [0.0; 2],
                max: [0.0; 2],
            };
        }
        RelevanceScaler { min, max }
    }

    pub fn apply(&self, raw: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for k in 0..2 {
            let span = self.max[k] - self.min[k];
            out[k] = if span > 0.0 {
                ((raw[k] - self.min[k]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureFlags {
    /// `features.relevance`
    pub relevance: bool,
    /// `features.passthrough`
    pub passthrough: bool,
    /// `features.pair_text`
    pub pair_text: bool,
}

impl Default for FeatureFlags {
    fn default() -> Self {
        FeatureFlags {
            relevance: true,
            passthrough: true,
            pair_text: false,
        }
    }
}

/// Order and widths of the blocks inside `a_uv`:
/// `[x_u | x_v | bm25, tfidf | pair text]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub passthrough_dim: usize,
    pub relevance_dim: usize,
    pub pair_text_dim: usize,
}

impl FeatureLayout {
    pub fn new(flags: FeatureFlags, d_in: usize, pair_text_dim: usize) -> Self {
        FeatureLayout {
            passthrough_dim: if flags.passthrough { d_in } else { 0 },
            relevance_dim: if flags.relevance { 2 } else { 0 },
            pair_text_dim: if flags.pair_text { pair_text_dim } else { 0 },
        }
    }

    pub fn len(&self) -> usize {
        2 * self.passthrough_dim + self.relevance_dim + self.pair_text_dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairFeatures {
    pub relevance: Option<[f64; 2]>,
    pub pair_text_embedding: Option<Vec<f64>>,
    pub passthrough_u: Vec<f64>,
    pub passthrough_v: Vec<f64>,
}

impl PairFeatures {
    /// Concatenates the blocks in layout order.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut a = Vec::new();
        a.extend_from_slice(&self.passthrough_u);
        a.extend_from_slice(&self.passthrough_v);
        if let Some(r) = self.relevance {
            a.extend_from_slice(&r);
        }
        if let Some(p) = &self.pair_text_embedding {
            a.extend_from_slice(p);
        }
        a
    }
}

/// Pair-sentence embeddings read from `id_u \t id_v \t floats`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairTextTable {
    dim: usize,
    rows: HashMap<(String, String), Vec<f64>>,
}

impl PairTextTable {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut table = PairTextTable::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg,
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let emb = parse_floats(cols[2]).map_err(err)?;
            table
                .insert(cols[0], cols[1], emb)
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, u: &str, v: &str, emb: Vec<f64>) -> Result<()> {
        if self.rows.is_empty() {
            self.dim = emb.len();
        } else if emb.len() != self.dim {
            return Err(Error::Dimension(format!(
                "pair ({u}, {v}) embedding has length {}, expected {}",
                emb.len(),
                self.dim
            )));
        }
        self.rows.insert((u.to_string(), v.to_string()), emb);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Looks up `(u, v)`, then `(v, u)`.
    pub fn get(&self, u: &str, v: &str) -> Option<&[f64]> {
        self.rows
            .get(&(u.to_string(), v.to_string()))
            .or_else(|| self.rows.get(&(v.to_string(), u.to_string())))
            .map(Vec::as_slice)
    }
}

/// Everything needed to assemble `a_uv` for arbitrary pairs of one graph.
pub struct FeatureSource<'a> {
    pub graph: &'a Graph,
    /// Initial node embeddings by node index.
    pub embeddings: &'a [Vec<f64>],
    pub stats: Option<&'a CorpusStats>,
    pub pair_text: Option<&'a PairTextTable>,
    pub flags: FeatureFlags,
    pub bm25: Bm25Params,
    pub scaler: Option<RelevanceScaler>,
}

impl FeatureSource<'_> {
    pub fn layout(&self) -> FeatureLayout {
        let d_in = self.embeddings.first().map_or(0, Vec::len);
        FeatureLayout::new(
            self.flags,
            d_in,
            self.pair_text.map_or(0, PairTextTable::dim),
        )
    }

    /// Checks that every toggled feature has its inputs.
    pub fn check(&self) -> Result<()> {
        if self.flags.relevance && self.stats.is_none() {
            return Err(Error::MissingFeature {
                feature: "relevance",
                reason: "no corpus statistics".into(),
            });
        }
        if self.flags.pair_text && self.pair_text.is_none() {
            return Err(Error::MissingFeature {
                feature: "pair_text",
                reason: "no pair embedding file supplied".into(),
            });
        }
        if self.flags.passthrough && self.embeddings.len() != self.graph.len() {
            return Err(Error::MissingFeature {
                feature: "passthrough",
                reason: format!(
                    "{} embeddings for {} nodes",
                    self.embeddings.len(),
                    self.graph.len()
                ),
            });
        }
        Ok(())
    }

    pub fn raw_relevance(
        &self,
        u: usize,
        v: usize,
        cache: Option<&mut RelevanceCache>,
    ) -> Result<[f64; 2]> {
        let stats = self.stats.ok_or_else(|| Error::MissingFeature {
            feature: "relevance",
            reason: "no corpus statistics".into(),
        })?;
        let (iu, iv) = (&self.graph.node(u).id, &self.graph.node(v).id);
        match cache {
            Some(c) => c.get_or_compute(iu, iv, stats, self.bm25),
            None => raw_relevance(iu, iv, stats, self.bm25),
        }
    }

    pub fn pair_features(
        &self,
        u: usize,
        v: usize,
        cache: Option<&mut RelevanceCache>,
    ) -> Result<PairFeatures> {
        self.check()?;
        let (passthrough_u, passthrough_v) = if self.flags.passthrough {
            (self.embeddings[u].clone(), self.embeddings[v].clone())
        } else {
            (Vec::new(), Vec::new())
        };
        let relevance = if self.flags.relevance {
            let raw = self.raw_relevance(u, v, cache)?;
            Some(match &self.scaler {
                Some(s) => s.apply(raw),
                None => raw,
            })
        } else {
            None
        };
        let pair_text_embedding = if self.flags.pair_text {
            let (iu, iv) = (&self.graph.node(u).id, &self.graph.node(v).id);
            let table = self.pair_text.expect("checked above");
            Some(
                table
                    .get(iu, iv)
                    .ok_or_else(|| Error::MissingFeature {
                        feature: "pair_text",
                        reason: format!("no embedding for pair ({iu}, {iv})"),
                    })?
                    .to_vec(),
            )
        } else {
            None
        };
        Ok(PairFeatures {
            relevance,
            pair_text_embedding,
            passthrough_u,
            passthrough_v,
        })
    }
}

/// One-shot assembly of `a_uv` for a single pair, without scaling.
pub fn assemble_pair_features(
    u: &str,
    v: &str,
    g: &Graph,
    embeddings: &[Vec<f64>],
    stats: Option<&CorpusStats>,
    pair_text: Option<&PairTextTable>,
    flags: FeatureFlags,
) -> Result<PairFeatures> {
    let source = FeatureSource {
        graph: g,
        embeddings,
        stats,
        pair_text,
        flags,
        bm25: Bm25Params::default(),
        scaler: None,
    };
    source.pair_features(g.require(u)?, g.require(v)?, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstore::Node;
    use proptest::prelude::*;

    fn docs(texts: &[&str]) -> CorpusStats {
        let ids: Vec<String> = (0..texts.len()).map(|i| format!("d{i}")).collect();
        CorpusStats::from_documents(ids.iter().map(String::as_str).zip(texts.iter().copied()))
            .unwrap()
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(
            tokenize("Barth Syndrome, type-I"),
            ["barth", "syndrome", "type", "i"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("Gene2 GENE2"), ["gene2", "gene2"]);
    }

    #[test]
    fn corpus_counts() {
        let s = docs(&["a b", "b c"]);
        assert_eq!(s.doc_freq["a"], 1);
        assert_eq!(s.doc_freq["b"], 2);
        assert_eq!(s.doc_freq["c"], 1);
        assert_eq!(s.avg_doc_len, 2.0);
        assert_eq!(docs(&["x y z"]).avg_doc_len, 3.0);
        assert!(matches!(
            CorpusStats::from_documents([("a", ""), ("b", " ,, ")]),
            Err(Error::NoCorpus)
        ));
    }

    #[test]
    fn corpus_matches_recount() {
        let texts: Vec<String> = (0..100)
            .map(|i| {
                (0..(i % 7 + 1))
                    .map(|j| format!("t{}", (i * j) % 13))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let s = docs(&refs);
        assert_eq!(s.doc_count, 100);
        let recount: usize = texts.iter().map(|t| t.split(' ').count()).sum();
        assert_eq!(s.avg_doc_len, recount as f64 / 100.0);
        for (term, &df) in &s.doc_freq {
            let oracle = texts
                .iter()
                .filter(|t| t.split(' ').any(|w| w == term))
                .count();
            assert_eq!(df, oracle, "{term}");
        }
    }

    #[test]
    fn bm25_zero_without_overlap() {
        let s = docs(&["a b", "c d"]);
        assert_eq!(bm25("d0", "d1", &s, Bm25Params::default()).unwrap(), 0.0);
    }

    #[test]
    fn bm25_single_document_by_hand() {
        // doc "x x y": N=1, avgdl=3, dl=3, so the length norm is k1.
        // idf(df=1) = ln(0.5/1.5 + 1) = ln(4/3)
        // x: qtf=2, tf=2 -> 2*idf*2*2.2/(2+1.2); y: qtf=1, tf=1 -> idf*2.2/2.2
        let s = docs(&["x x y"]);
        let idf = (4.0f64 / 3.0).ln();
        let expected = 2.0 * idf * 2.0 * 2.2 / 3.2 + idf * 1.0 * 2.2 / 2.2;
        let got = bm25("d0", "d0", &s, Bm25Params::default()).unwrap();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn idf_of_ubiquitous_term_is_positive() {
        for n in [1usize, 2, 10, 1000] {
            let idf = bm25_idf(n, n);
            assert!((idf - (1.0 + 0.5 / (n as f64 + 0.5)).ln()).abs() < 1e-15);
            assert!(idf > 0.0);
        }
    }

    #[test]
    fn tfidf_cases() {
        let s = docs(&["a b", "a b", "c"]);
        assert!((tfidf_cosine("d0", "d1", &s).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tfidf_cosine("d0", "d2", &s).unwrap(), 0.0);
        // single document: every idf is ln(1) = 0
        let one = docs(&["a b"]);
        assert_eq!(tfidf_cosine("d0", "d0", &one).unwrap(), 0.0);
    }

    #[test]
    fn tfidf_two_docs_by_hand() {
        // "a b" and "b c c" plus a third doc "d" so the shared term b has nonzero idf.
        // N=3: idf(a)=idf(c)=idf(d)=ln3, idf(b)=ln(3/2)
        // u = [a:ln3, b:ln1.5], v = [b:ln1.5, c:2ln3]
        let s = docs(&["a b", "b c c", "d"]);
        let (l3, l15) = (3f64.ln(), 1.5f64.ln());
        let dot = l15 * l15;
        let nu = (l3 * l3 + l15 * l15).sqrt();
        let nv = (l15 * l15 + 4.0 * l3 * l3).sqrt();
        let got = tfidf_cosine("d0", "d1", &s).unwrap();
        assert!((got - dot / (nu * nv)).abs() < 1e-14);
    }

    fn feature_graph() -> (Graph, Vec<Vec<f64>>) {
        let mut g = Graph::new();
        for (i, text) in ["alpha beta", "beta gamma", "delta"].iter().enumerate() {
            g.add_node(Node::new(format!("n{i}")).with_description(*text))
                .unwrap();
        }
        g.add_edge_idx(0, 1).unwrap();
        g.add_edge_idx(1, 2).unwrap();
        let emb = vec![
            vec![1.0, 0.0, 0.5],
            vec![0.0, 1.0, 0.5],
            vec![0.2, 0.2, 0.2],
        ];
        (g, emb)
    }

    #[test]
    fn layout_lengths() {
        let (g, emb) = feature_graph();
        let stats = build_corpus(&g).unwrap();
        let off = FeatureFlags {
            relevance: false,
            passthrough: true,
            pair_text: false,
        };
        let f = assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), None, off).unwrap();
        assert_eq!(f.to_vec().len(), 6);
        let on = FeatureFlags {
            relevance: true,
            ..off
        };
        let f = assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), None, on).unwrap();
        assert_eq!(f.to_vec().len(), 8);
        assert_eq!(
            f,
            assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), None, on).unwrap()
        );
        let none = FeatureFlags {
            relevance: false,
            passthrough: false,
            pair_text: false,
        };
        let f = assemble_pair_features("n0", "n1", &g, &emb, None, None, none).unwrap();
        assert!(f.to_vec().is_empty());
    }

    #[test]
    fn missing_prerequisites_name_the_feature() {
        let (g, emb) = feature_graph();
        let flags = FeatureFlags {
            pair_text: true,
            ..FeatureFlags::default()
        };
        let stats = build_corpus(&g).unwrap();
        let err =
            assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), None, flags).unwrap_err();
        assert!(err.to_string().contains("pair_text"), "{err}");

        let mut table = PairTextTable::default();
        table.insert("n1", "n0", vec![0.1, 0.2]).unwrap();
        let f = assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), Some(&table), flags)
            .unwrap();
        assert_eq!(f.pair_text_embedding.as_deref(), Some(&[0.1, 0.2][..]));
        let err = assemble_pair_features("n0", "n2", &g, &emb, Some(&stats), Some(&table), flags)
            .unwrap_err();
        assert!(err.to_string().contains("pair_text"));

        let err = assemble_pair_features("n0", "n1", &g, &emb, None, None, FeatureFlags::default())
            .unwrap_err();
        assert!(err.to_string().contains("relevance"));
    }

    #[test]
    fn serialized_stats_reproduce_features() {
        let (g, emb) = feature_graph();
        let stats = build_corpus(&g).unwrap();
        let json = serde_json::to_string(&stats).unwrap();
        let back: CorpusStats = serde_json::from_str(&json).unwrap();
        assert_eq!(back, stats);
        let flags = FeatureFlags::default();
        let a = assemble_pair_features("n0", "n1", &g, &emb, Some(&stats), None, flags).unwrap();
        let b = assemble_pair_features("n0", "n1", &g, &emb, Some(&back), None, flags).unwrap();
        let bits = |f: &PairFeatures| f.to_vec().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn scaler_maps_to_unit_interval() {
        let rows = [[1.0, 0.2], [3.0, 0.2], [2.0, 0.2]];
        let s = RelevanceScaler::fit(rows.iter());
        assert_eq!(s.apply([1.0, 0.2]), [0.0, 0.0]);
        assert_eq!(s.apply([3.0, 0.2]), [1.0, 0.0]);
        assert_eq!(s.apply([2.0, 0.2]), [0.5, 0.0]);
        assert_eq!(s.apply([9.0, 0.2]), [1.0, 0.0]);
    }

    fn word() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]).prop_map(String::from)
    }

    fn corpus() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::collection::vec(word(), 1..6).prop_map(|w| w.join(" ")),
            2..8,
        )
    }

    proptest! {
        #[test]
        fn scores_ignore_document_order(texts in corpus(), rot in 0usize..8) {
            let ids: Vec<String> = (0..texts.len()).map(|i| format!("d{i}")).collect();
            let pairs: Vec<(&str, &str)> = ids.iter().map(String::as_str).zip(texts.iter().map(String::as_str)).collect();
            let mut rotated = pairs.clone();
            rotated.rotate_left(rot % pairs.len());
            rotated.reverse();
            let a = CorpusStats::from_documents(pairs.iter().copied()).unwrap();
            let b = CorpusStats::from_documents(rotated.iter().copied()).unwrap();
            for u in &ids {
                for v in &ids {
                    let p = Bm25Params::default();
                    prop_assert_eq!(bm25(u, v, &a, p).unwrap().to_bits(), bm25(u, v, &b, p).unwrap().to_bits());
                    prop_assert_eq!(tfidf_cosine(u, v, &a).unwrap().to_bits(), tfidf_cosine(u, v, &b).unwrap().to_bits());
                    let r = raw_relevance(u, v, &a, p).unwrap();
                    prop_assert!(r.iter().all(|x| x.is_finite() && *x >= 0.0));
                }
            }
        }

        #[test]
        fn cache_matches_fresh_computation(texts in corpus()) {
            let ids: Vec<String> = (0..texts.len()).map(|i| format!("d{i}")).collect();
            let stats = CorpusStats::from_documents(ids.iter().map(String::as_str).zip(texts.iter().map(String::as_str))).unwrap();
            let mut cache = RelevanceCache::new();
            let p = Bm25Params::default();
            for _ in 0..2 {
                for u in &ids {
                    for v in &ids {
                        let cached = cache.get_or_compute(u, v, &stats, p).unwrap();
                        let fresh = raw_relevance(u, v, &stats, p).unwrap();
                        prop_assert_eq!(cached.map(f64::to_bits), fresh.map(f64::to_bits));
                    }
                }
            }
            prop_assert_eq!(cache.len(), ids.len() * ids.len());
        }
    }
}
