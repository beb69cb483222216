//! Undirected text-attributed graphs, dataset ingestion, negative sampling
//! and stratified train/validation/test splitting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_for, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    /// Categorical label used for hard negatives (e.g. a disease type).
    pub group: Option<String>,
    pub description: Option<String>,
    pub init_embedding: Option<Vec<f64>>,
}

impl Node {
    pub fn new(id: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            group: None,
            description: None,
            init_embedding: None,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = Some(text.into());
        self
    }

    pub fn with_embedding(mut self, embedding: Vec<f64>) -> Self {
        self.init_embedding = Some(embedding);
        self
    }
}

/// Undirected simple graph over string-identified nodes.
///
/// Node ids map to dense indices in insertion order. Edges are stored once
/// as `(min, max)` index pairs and mirrored into sorted neighbor lists.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
    d_in: Option<usize>,
}

fn canonical(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: Node) -> Result<usize> {
        if node.id.is_empty() {
            return Err(Error::invalid("node id must be nonempty"));
        }
        if self.index.contains_key(&node.id) {
            return Err(Error::invalid(format!("duplicate node id {:?}", node.id)));
        }
        if let Some(emb) = &node.init_embedding {
            match self.d_in {
                Some(d) if d != emb.len() => {
                    return Err(Error::Dimension(format!(
                        "node {:?} has embedding of length {}, expected {}",
                        node.id,
                        emb.len(),
                        d
                    )))
                }
                None => self.d_in = Some(emb.len()),
                _ => {}
            }
        }
        let idx = self.nodes.len();
        self.index.insert(node.id.clone(), idx);
        self.nodes.push(node);
        self.adjacency.push(Vec::new());
        Ok(idx)
    }

    /// Adds an undirected edge by index. Returns `false` if it already existed.
    pub fn add_edge_idx(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.nodes.len();
        if u >= n || v >= n {
            return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::invalid(format!(
                "self-loop on node {:?}",
                self.nodes[u].id
            )));
        }
        if !self.edges.insert(canonical(u, v)) {
            return Ok(false);
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adjacency[a];
            let pos = list.binary_search(&b).unwrap_or_else(|p| p);
            list.insert(pos, b);
        }
        Ok(true)
    }

    pub fn add_edge(&mut self, u: &str, v: &str) -> Result<bool> {
        let a = self.require(u)?;
        let b = self.require(v)?;
        self.add_edge_idx(a, b)
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn d_in(&self) -> Option<usize> {
        self.d_in
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&canonical(u, v))
    }

    /// Edges as canonical `(min, max)` index pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Same nodes and indexing, restricted edge set. Used to build the
    /// message-passing graph from training positives only.
    pub fn with_edges<I>(&self, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            adjacency: vec![Vec::new(); self.nodes.len()],
            edges: BTreeSet::new(),
            d_in: self.d_in,
        };
        for (u, v) in edges {
            g.add_edge_idx(u, v)?;
        }
        Ok(g)
    }

    /// Drops nodes without neighbors, preserving the relative order of the rest.
    pub fn remove_isolated(&self) -> Graph {
        let mut g = Graph::new();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if self.degree(i) > 0 {
                // ids and dimensions were validated on first insertion
                remap[i] = g.add_node(node.clone()).expect("valid node");
            }
        }
        for &(u, v) in &self.edges {
            g.add_edge_idx(remap[u], remap[v]).expect("valid edge");
        }
        if g.d_in.is_none() {
            g.d_in = self.d_in.filter(|_| !g.is_empty());
        }
        g
    }

    /// Checks the structural invariants; used by tests after mutations.
    pub fn validate(&self) -> Result<()> {
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                if i == j {
                    return Err(Error::invalid(format!("self-loop at {i}")));
                }
                if self.adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::invalid(format!("asymmetric adjacency {i}-{j}")));
                }
                if !self.edges.contains(&canonical(i, j)) {
                    return Err(Error::invalid(format!("adjacency {i}-{j} not in edge set")));
                }
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "unsorted or duplicate neighbors at {i}"
                )));
            }
        }
        let degree_sum: usize = self.adjacency.iter().map(Vec::len).sum();
        if degree_sum != 2 * self.edges.len() {
            return Err(Error::invalid("degree sum does not match edge count"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Positive,
    RandomNegative,
    HardNegative,
}

impl SampleSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleSource::Positive => "positive",
            SampleSource::RandomNegative => "random_negative",
            SampleSource::HardNegative => "hard_negative",
        }
    }
}

impl fmt::Display for SampleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SampleSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "positive" => Ok(SampleSource::Positive),
            "random_negative" => Ok(SampleSource::RandomNegative),
            "hard_negative" => Ok(SampleSource::HardNegative),
            other => Err(format!("unknown sample source {other:?}")),
        }
    }
}

/// A labeled node pair. The label is implied by the source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairSample {
    pub u: String,
    pub v: String,
    pub source: SampleSource,
}

impl PairSample {
    pub fn new(u: impl Into<String>, v: impl Into<String>, source: SampleSource) -> Self {
        PairSample {
            u: u.into(),
            v: v.into(),
            source,
        }
    }

    pub fn label(&self) -> u8 {
        u8::from(self.source == SampleSource::Positive)
    }

    /// Order-independent identity of the pair.
    pub fn key(&self) -> (&str, &str) {
        if self.u <= self.v {
            (&self.u, &self.v)
        } else {
            (&self.v, &self.u)
        }
    }

    /// Stable string identity used in traces.
    pub fn sample_id(&self) -> String {
        format!("{}|{}", self.u, self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeMode {
    Random,
    HardPlusRandom,
}

impl FromStr for NegativeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(NegativeMode::Random),
            "hard_plus_random" | "hard" => Ok(NegativeMode::HardPlusRandom),
            other => Err(format!("unknown negative mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitName {
    Train,
    Valid,
    Test,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Valid => "valid",
            SplitName::Test => "test",
        }
    }
}

impl FromStr for SplitName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitName::Train),
            "valid" | "validation" => Ok(SplitName::Valid),
            "test" => Ok(SplitName::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitSet {
    pub train: Vec<PairSample>,
    pub valid: Vec<PairSample>,
    pub test: Vec<PairSample>,
    pub seed: u64,
}

impl SplitSet {
    pub fn get(&self, name: SplitName) -> &[PairSample] {
        match name {
            SplitName::Train => &self.train,
            SplitName::Valid => &self.valid,
            SplitName::Test => &self.test,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (SplitName, &PairSample)> {
        [SplitName::Train, SplitName::Valid, SplitName::Test]
            .into_iter()
            .flat_map(move |name| self.get(name).iter().map(move |s| (name, s)))
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// ---------------------------------------------------------------------------
// File formats

fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect())
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub(crate) fn parse_floats(field: &str) -> std::result::Result<Vec<f64>, String> {
    field
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| format!("bad number {s:?}"))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(format!("non-finite number {s:?}"))
                    }
                })
        })
        .collect()
}

fn non_empty(s: &str) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s.to_string())
    }
}

/// Reads the nodes and edges TSV files and drops isolated nodes.
pub fn load_graph(nodes_path: &Path, edges_path: &Path) -> Result<Graph> {
    let mut g = Graph::new();
    for (line, text) in data_lines(nodes_path)? {
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() > 4 {
            return Err(parse_err(
                nodes_path,
                line,
                format!("expected at most 4 columns, found {}", cols.len()),
            ));
        }
        let id = cols[0].trim();
        if id.is_empty() {
            return Err(parse_err(nodes_path, line, "empty node id"));
        }
        let col = |i: usize| cols.get(i).map(|s| s.trim()).unwrap_or("");
        let embedding = match col(3) {
            "" => None,
            field => Some(parse_floats(field).map_err(|m| parse_err(nodes_path, line, m))?),
        };
        let node = Node {
            id: id.to_string(),
            group: non_empty(col(1)),
            description: non_empty(col(2)),
            init_embedding: embedding,
        };
        g.add_node(node)
            .map_err(|e| parse_err(nodes_path, line, e.to_string()))?;
    }
    for (line, text) in data_lines(edges_path)? {
        let cols: Vec<&str> = text.split('\t').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(parse_err(
                edges_path,
                line,
                format!("expected 2 columns, found {}", cols.len()),
            ));
        }
        let u = g.require(cols[0])?;
        let v = g.require(cols[1])?;
        g.add_edge_idx(u, v)
            .map_err(|e| parse_err(edges_path, line, e.to_string()))?;
    }
    Ok(g.remove_isolated())
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn check_field(field: &str, what: &str) -> Result<()> {
    if field.contains(['\t', '\n', '\r']) {
        return Err(Error::invalid(format!(
            "{what} {field:?} contains a tab or newline"
        )));
    }
    Ok(())
}

pub fn write_nodes(g: &Graph, path: &Path) -> Result<()> {
    let mut out = String::from("# id\tgroup\tdescription\tembedding\n");
    for node in g.nodes() {
        let group = node.group.as_deref().unwrap_or("");
        let desc = node.description.as_deref().unwrap_or("");
        check_field(&node.id, "node id")?;
        check_field(group, "group")?;
        check_field(desc, "description")?;
        let emb = node
            .init_embedding
            .as_deref()
            .map(join_floats)
            .unwrap_or_default();
        out.push_str(&format!("{}\t{}\t{}\t{}\n", node.id, group, desc, emb));
    }
    create(path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn write_edges(g: &Graph, path: &Path) -> Result<()> {
    let mut out = String::from("# id_u\tid_v\n");
    for (u, v) in g.edges() {
        out.push_str(&format!("{}\t{}\n", g.node(u).id, g.node(v).id));
    }
    create(path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn write_splits(splits: &SplitSet, path: &Path) -> Result<()> {
    let mut out = format!(
        "# seed={}\n# id_u\tid_v\tlabel\tsplit\tsource\n",
        splits.seed
    );
    for (name, s) in splits.iter() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            s.u,
            s.v,
            s.label(),
            name.as_str(),
            s.source
        ));
    }
    create(path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Reads a splits file. Every referenced id must exist in `g`.
pub fn read_splits(path: &Path, g: &Graph) -> Result<SplitSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut splits = SplitSet::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(rest) = raw.strip_prefix("# seed=") {
            splits.seed = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(path, line, "bad seed"))?;
            continue;
        }
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(parse_err(
                path,
                line,
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        let (u, v) = (cols[0], cols[1]);
        g.require(u)?;
        g.require(v)?;
        if u == v {
            return Err(parse_err(path, line, "pair with identical endpoints"));
        }
        let label: u8 = cols[2]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad label {:?}", cols[2])))?;
        let split: SplitName = cols[3]
            .parse()
            .map_err(|m: String| parse_err(path, line, m))?;
        let source: SampleSource = cols[4]
            .parse()
            .map_err(|m: String| parse_err(path, line, m))?;
        let sample = PairSample::new(u, v, source);
        if sample.label() != label {
            return Err(parse_err(
                path,
                line,
                format!("label {label} inconsistent with source {source}"),
            ));
        }
        let (a, b) = sample.key();
        if !seen.insert((a.to_string(), b.to_string())) {
            return Err(parse_err(path, line, format!("duplicate pair ({u}, {v})")));
        }
        match split {
            SplitName::Train => splits.train.push(sample),
            SplitName::Valid => splits.valid.push(sample),
            SplitName::Test => splits.test.push(sample),
        }
    }
    Ok(splits)
}

// ---------------------------------------------------------------------------
// Negative sampling

/// Enumerates the hard-negative pool: pairs `(u', v)` where `u'` links to
/// some other node sharing `v`'s group while `(u', v)` is not an edge.
///
/// Keys are canonical index pairs; values keep the `(u', v)` orientation
/// of the first discovery.
pub fn hard_negative_pool(g: &Graph) -> Result<BTreeMap<(usize, usize), (usize, usize)>> {
    let mut by_group: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, node) in g.nodes().iter().enumerate() {
        let group = node.group.as_deref().ok_or_else(|| {
            Error::invalid(format!(
                "hard negatives need group labels; node {:?} has none",
                node.id
            ))
        })?;
        by_group.entry(group).or_default().push(i);
    }
    let mut pool = BTreeMap::new();
    for v in 0..g.len() {
        let group = g.node(v).group.as_deref().unwrap_or_default();
        for &w in &by_group[group] {
            if w == v {
                continue;
            }
            for &u in g.neighbors(w) {
                if u != v && !g.has_edge(u, v) {
                    pool.entry(canonical(u, v)).or_insert((u, v));
                }
            }
        }
    }
    Ok(pool)
}

/// Draws `ratio * positives.len()` non-edges.
///
/// In `HardPlusRandom` mode, `ceil(total / 2)` come from the hard pool and
/// the rest are uniform non-edges; a short hard pool is topped up with
/// random negatives. Output never repeats a pair (in either orientation).
pub fn sample_negatives(
    g: &Graph,
    positives: &[(usize, usize)],
    ratio: usize,
    mode: NegativeMode,
    seed: u64,
) -> Result<Vec<PairSample>> {
    if ratio == 0 {
        return Err(Error::invalid("negative ratio must be at least 1"));
    }
    let total = ratio * positives.len();
    let excluded: HashSet<(usize, usize)> =
        positives.iter().map(|&(u, v)| canonical(u, v)).collect();
    let mut taken: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::with_capacity(total);

    if mode == NegativeMode::HardPlusRandom {
        let quota = total.div_ceil(2);
        let mut pool: Vec<(usize, usize)> = hard_negative_pool(g)?
            .into_iter()
            .filter(|(key, _)| !excluded.contains(key))
            .map(|(_, oriented)| oriented)
            .collect();
        pool.shuffle(&mut rng_for(seed, stream::NEG_HARD, 0));
        for (u, v) in pool.into_iter().take(quota) {
            taken.insert(canonical(u, v));
            out.push(PairSample::new(
                g.node(u).id.clone(),
                g.node(v).id.clone(),
                SampleSource::HardNegative,
            ));
        }
    }

    let need = total - out.len();
    let n = g.len();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let blocked = g.edge_count() + excluded.iter().filter(|&&(u, v)| !g.has_edge(u, v)).count();
    let available = all_pairs.saturating_sub(blocked + taken.len());
    if need > available {
        return Err(Error::Sampling(format!(
            "requested {need} random non-edges but only {available} exist"
        )));
    }
    let mut rng = rng_for(seed, stream::NEG_RANDOM, 0);
    let budget = 100 * need + 10_000;
    let mut tries = 0usize;
    let mut drawn = 0usize;
    while drawn < need {
        if tries >= budget {
            return Err(Error::Sampling(format!(
                "retry budget of {budget} exhausted after {drawn} of {need} random non-edges"
            )));
        }
        tries += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = canonical(u, v);
        if g.has_edge(u, v) || excluded.contains(&key) || !taken.insert(key) {
            continue;
        }
        out.push(PairSample::new(
            g.node(u).id.clone(),
            g.node(v).id.clone(),
            SampleSource::RandomNegative,
        ));
        drawn += 1;
    }
    Ok(out)
}

/// All edges of `g` as positive samples, in canonical edge order.
pub fn positive_samples(g: &Graph) -> Vec<PairSample> {
    g.edges()
        .map(|(u, v)| {
            PairSample::new(
                g.node(u).id.clone(),
                g.node(v).id.clone(),
                SampleSource::Positive,
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Splitting

/// Splits `total` into parts proportional to `fractions`, largest remainder first.
fn apportion(total: usize, fractions: [f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: [usize; 3] = [0; 3];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = e.floor() as usize;
    }
    let mut order: Vec<usize> = (0..3).collect();
    // ties resolve toward the earlier split
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut rest = total - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        counts[i] += 1;
        rest -= 1;
    }
    counts
}

/// Stratified split: overall sizes follow `fractions` to within one sample
/// and each split keeps the global positive ratio.
pub fn split(samples: &[PairSample], fractions: [f64; 3], seed: u64) -> Result<SplitSet> {
    if samples.len() < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 samples to split, got {}",
            samples.len()
        )));
    }
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::invalid("split fractions must lie in [0, 1]"));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "split fractions sum to {sum}, not 1"
        )));
    }
    let mut seen = HashSet::new();
    for s in samples {
        if s.u == s.v {
            return Err(Error::invalid(format!(
                "pair ({}, {}) has identical endpoints",
                s.u, s.v
            )));
        }
        if !seen.insert(s.key()) {
            return Err(Error::invalid(format!("duplicate pair ({}, {})", s.u, s.v)));
        }
    }

    let mut rng = rng_for(seed, stream::SPLIT, 0);
    let mut pos: Vec<&PairSample> = samples.iter().filter(|s| s.label() == 1).collect();
    let mut neg: Vec<&PairSample> = samples.iter().filter(|s| s.label() == 0).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let totals = apportion(samples.len(), fractions);
    let pos_counts = apportion(pos.len(), fractions);
    let mut neg_counts = [0usize; 3];
    let mut deficit = 0usize;
    for i in 0..3 {
        if totals[i] >= pos_counts[i] {
            neg_counts[i] = totals[i] - pos_counts[i];
        } else {
            deficit += pos_counts[i] - totals[i];
        }
    }
    // rare tiny-sample case: some split got more positives than its total
    while deficit > 0 {
        let i = (0..3)
            .max_by_key(|&i| (neg_counts[i], usize::MAX - i))
            .unwrap();
        neg_counts[i] -= 1;
        deficit -= 1;
    }

    let mut parts: [Vec<PairSample>; 3] = Default::default();
    let (mut pi, mut ni) = (0, 0);
    for k in 0..3 {
        parts[k].extend(pos[pi..pi + pos_counts[k]].iter().map(|s| (*s).clone()));
        parts[k].extend(neg[ni..ni + neg_counts[k]].iter().map(|s| (*s).clone()));
        pi += pos_counts[k];
        ni += neg_counts[k];
        parts[k].shuffle(&mut rng);
    }
    let [train, valid, test] = parts;
    Ok(SplitSet {
        train,
        valid,
        test,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Synthetic data

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub n_groups: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub d_in: usize,
    pub noise: f64,
    /// Probability that a node's description names a given neighbor.
    pub mention_prob: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_nodes: 200,
            n_groups: 2,
            p_in: 0.05,
            p_out: 0.01,
            d_in: 8,
            noise: 0.1,
            mention_prob: 0.9,
            seed: 7,
        }
    }
}

const GROUP_VOCAB: usize = 400;
const GROUP_TOKENS: usize = 8;
const SHARED_VOCAB: usize = 1000;
const SHARED_TOKENS: usize = 6;
/// Times a description repeats its own id, as entity summaries repeat their subject.
const SELF_MENTIONS: usize = 3;

pub fn synth_node_id(i: usize) -> String {
    format!("n{i:04}")
}

/// Planted-partition graph with group-aware embeddings and descriptions.
///
/// Node `i` belongs to group `i % n_groups`. Its embedding is the group
/// one-hot tiled to `d_in` plus uniform noise in `[-noise, noise]`. Its
/// description carries its own id token, a bag of group-specific and shared
/// filler words, and the id token of each neighbor with probability
/// `mention_prob`. Isolated nodes are removed.
pub fn synth_graph(cfg: &SynthConfig) -> Result<Graph> {
    if cfg.n_groups < 2 {
        return Err(Error::invalid("n_groups must be at least 2"));
    }
    if !(0.0 <= cfg.p_out && cfg.p_out < cfg.p_in && cfg.p_in <= 1.0) {
        return Err(Error::invalid(format!(
            "need 0 <= p_out < p_in <= 1, got p_in={} p_out={}",
            cfg.p_in, cfg.p_out
        )));
    }
    if cfg.d_in == 0 {
        return Err(Error::invalid("d_in must be at least 1"));
    }
    if !(cfg.noise >= 0.0 && cfg.noise.is_finite()) {
        return Err(Error::invalid("noise must be finite and non-negative"));
    }
    if !(0.0..=1.0).contains(&cfg.mention_prob) {
        return Err(Error::invalid("mention_prob must lie in [0, 1]"));
    }
    let n = cfg.n_nodes;
    let group_of = |i: usize| i % cfg.n_groups;

    let mut edge_rng = rng_for(cfg.seed, stream::SYNTH_GRAPH, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if group_of(u) == group_of(v) {
                cfg.p_in
            } else {
                cfg.p_out
            };
            if edge_rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(u, v) in &edges {
        neighbors[u].push(v);
        neighbors[v].push(u);
    }

    let mut emb_rng = rng_for(cfg.seed, stream::SYNTH_EMBED, 0);
    let mut text_rng = rng_for(cfg.seed, stream::SYNTH_TEXT, 0);
    let mut g = Graph::new();
    for i in 0..n {
        let group = group_of(i);
        let embedding: Vec<f64> = (0..cfg.d_in)
            .map(|k| {
                let base = if k % cfg.n_groups == group { 1.0 } else { 0.0 };
                if cfg.noise > 0.0 {
                    base + emb_rng.gen_range(-cfg.noise..=cfg.noise)
                } else {
                    base
                }
            })
            .collect();
        let mut words = vec![synth_node_id(i); SELF_MENTIONS];
        for _ in 0..GROUP_TOKENS {
            words.push(format!("g{group}w{}", text_rng.gen_range(0..GROUP_VOCAB)));
        }
        for _ in 0..SHARED_TOKENS {
            words.push(format!("w{}", text_rng.gen_range(0..SHARED_VOCAB)));
        }
        for &j in &neighbors[i] {
            if text_rng.gen::<f64>() < cfg.mention_prob {
                words.push(synth_node_id(j));
            }
        }
        words.shuffle(&mut text_rng);
        g.add_node(
            Node::new(synth_node_id(i))
                .with_group(format!("g{group}"))
                .with_description(words.join(" "))
                .with_embedding(embedding),
        )?;
    }
    for (u, v) in edges {
        g.add_edge_idx(u, v)?;
    }
    Ok(g.remove_isolated())
}
