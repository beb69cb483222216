//! Curriculum dynamics over a recorded training trace: inversion
//! fractions, transition windows and trend-conditioned inversion heatmaps.
//!
//! Everything here is a pure function of the trace, so the CSVs can be
//! regenerated byte-for-byte from a persisted trace file.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curriculum::Difficulty;
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "epoch,sample_id,loss,delta,sigma,label";

/// One `(epoch, sample)` record of the trainer's curriculum stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub sample_id: String,
    pub loss: f64,
    pub delta: f64,
    pub sigma: f64,
    pub label: Difficulty,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.epoch, r.sample_id, r.loss, r.delta, r.sigma, r.label
        );
    }
    out
}

pub fn write_trace(rows: &[TraceRow], path: &Path) -> Result<()> {
    fs::write(path, trace_csv(rows)).map_err(|e| Error::io(path, e))
}

pub fn parse_trace(text: &str, path: &Path) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRACE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("expected header {TRACE_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg,
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(err(format!("expected 6 columns, found {}", cols.len())));
        }
        let num = |i: usize| -> Result<f64> {
            let v: f64 = cols[i]
                .parse()
                .map_err(|_| err(format!("bad number {:?}", cols[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("non-finite value {:?}", cols[i])))
            }
        };
        rows.push(TraceRow {
            epoch: cols[0]
                .parse()
                .map_err(|_| err(format!("bad epoch {:?}", cols[0])))?,
            sample_id: cols[1].to_string(),
            loss: num(2)?,
            delta: num(3)?,
            sigma: num(4)?,
            label: cols[5].parse().map_err(err)?,
        });
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text, path)
}

/// Rectangular `(epoch, sample)` view of a trace. Row-major by epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct DifficultyTrace {
    pub epochs: Vec<usize>,
    pub sample_ids: Vec<String>,
    pub labels: Vec<Vec<Difficulty>>,
    pub losses: Vec<Vec<f64>>,
    pub deltas: Vec<Vec<f64>>,
}

impl DifficultyTrace {
    /// Builds a trace with epochs numbered from 0.
    pub fn new(
        sample_ids: Vec<String>,
        labels: Vec<Vec<Difficulty>>,
        losses: Vec<Vec<f64>>,
        deltas: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = sample_ids.len();
        let e = labels.len();
        if losses.len() != e || deltas.len() != e {
            return Err(Error::invalid(
                "labels, losses and deltas cover different epochs",
            ));
        }
        for rows in [
            labels.iter().map(Vec::len).collect::<Vec<_>>(),
            losses.iter().map(Vec::len).collect(),
            deltas.iter().map(Vec::len).collect(),
        ] {
            if rows.iter().any(|&len| len != n) {
                return Err(Error::invalid("trace is not rectangular"));
            }
        }
        Ok(DifficultyTrace {
            epochs: (0..e).collect(),
            sample_ids,
            labels,
            losses,
            deltas,
        })
    }

    /// Groups rows by epoch. Samples keep their first-seen order; every
    /// sample must appear exactly once per epoch.
    pub fn from_rows(rows: &[TraceRow]) -> Result<Self> {
        let epochs: Vec<usize> = rows
            .iter()
            .map(|r| r.epoch)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut sample_ids: Vec<String> = Vec::new();
        let mut sample_index = HashMap::new();
        for r in rows {
            if !sample_index.contains_key(&r.sample_id) {
                sample_index.insert(r.sample_id.clone(), sample_ids.len());
                sample_ids.push(r.sample_id.clone());
            }
        }
        let epoch_index: HashMap<usize, usize> =
            epochs.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let (e, n) = (epochs.len(), sample_ids.len());
        let mut seen = vec![vec![false; n]; e];
        let mut labels = vec![vec![Difficulty::Easy; n]; e];
        let mut losses = vec![vec![0.0; n]; e];
        let mut deltas = vec![vec![0.0; n]; e];
        for r in rows {
            let (i, s) = (epoch_index[&r.epoch], sample_index[&r.sample_id]);
            if seen[i][s] {
                return Err(Error::invalid(format!(
                    "sample {:?} appears twice in epoch {}",
                    r.sample_id, r.epoch
                )));
            }
            seen[i][s] = true;
            labels[i][s] = r.label;
            losses[i][s] = r.loss;
            deltas[i][s] = r.delta;
        }
        for (i, row) in seen.iter().enumerate() {
            if let Some(s) = row.iter().position(|&x| !x) {
                return Err(Error::invalid(format!(
                    "trace is not rectangular: sample {:?} missing from epoch {}",
                    sample_ids[s], epochs[i]
                )));
            }
        }
        Ok(DifficultyTrace {
            epochs,
            sample_ids,
            labels,
            losses,
            deltas,
        })
    }

    pub fn n_epochs(&self) -> usize {
        self.epochs.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    /// Losses min-max scaled per sample over the whole trace. A sample
    /// with constant loss maps to 0.
    pub fn normalized_losses(&self) -> Vec<Vec<f64>> {
        let mut out = self.losses.clone();
        for s in 0..self.n_samples() {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for row in &self.losses {
                lo = lo.min(row[s]);
                hi = hi.max(row[s]);
            }
            let span = hi - lo;
            for row in &mut out {
                row[s] = if span > 0.0 {
                    (row[s] - lo) / span
                } else {
                    0.0
                };
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransitionKind {
    E2E,
    E2H,
    H2E,
    H2H,
}

impl TransitionKind {
    pub const ALL: [TransitionKind; 4] = [
        TransitionKind::E2E,
        TransitionKind::E2H,
        TransitionKind::H2E,
        TransitionKind::H2H,
    ];

    pub fn of(prev: Difficulty, cur: Difficulty) -> Self {
        match (prev, cur) {
            (Difficulty::Easy, Difficulty::Easy) => TransitionKind::E2E,
            (Difficulty::Easy, Difficulty::Hard) => TransitionKind::E2H,
            (Difficulty::Hard, Difficulty::Easy) => TransitionKind::H2E,
            (Difficulty::Hard, Difficulty::Hard) => TransitionKind::H2H,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransitionKind::E2E => "E2E",
            TransitionKind::E2H => "E2H",
            TransitionKind::H2E => "H2E",
            TransitionKind::H2H => "H2H",
        }
    }

    pub fn is_inversion(self) -> bool {
        matches!(self, TransitionKind::E2H | TransitionKind::H2E)
    }
}

/// Per-epoch transition counts for epochs `1..E`, indexed by `TransitionKind as usize`.
pub fn transition_counts(trace: &DifficultyTrace) -> Vec<[usize; 4]> {
    (1..trace.n_epochs())
        .map(|e| {
            let mut c = [0usize; 4];
            for s in 0..trace.n_samples() {
                c[TransitionKind::of(trace.labels[e - 1][s], trace.labels[e][s]) as usize] += 1;
            }
            c
        })
        .collect()
}

/// Fraction of samples whose label differs from the previous epoch, for
/// epochs `1..E`.
pub fn inversion_fraction(trace: &DifficultyTrace) -> Result<Vec<f64>> {
    if trace.n_epochs() < 2 {
        return Err(Error::invalid("inversion fraction needs at least 2 epochs"));
    }
    if trace.n_samples() == 0 {
        return Err(Error::invalid("trace has no samples"));
    }
    let n = trace.n_samples() as f64;
    Ok(transition_counts(trace)
        .into_iter()
        .map(|c| (c[TransitionKind::E2H as usize] + c[TransitionKind::H2E as usize]) as f64 / n)
        .collect())
}

/// Trapezoidal integral with unit spacing. Fewer than 2 points give 0.
pub fn curve_auc(series: &[f64]) -> f64 {
    series.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// Trapezoidal integral with the x-axis rescaled to `[0, 1]`.
pub fn curve_auc_normalized(series: &[f64]) -> f64 {
    if series.len() < 2 {
        return 0.0;
    }
    curve_auc(series) / (series.len() - 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionProfile {
    pub kind: TransitionKind,
    pub radius: usize,
    pub events: usize,
    /// Mean normalized loss at offsets `-radius..=radius`; `None` without events.
    pub window: Option<Vec<f64>>,
}

/// Averages normalized losses around every transition event whose full
/// window fits inside the trace.
pub fn transition_profiles(trace: &DifficultyTrace, k: usize) -> Result<Vec<TransitionProfile>> {
    let e_count = trace.n_epochs();
    if e_count < 2 * k + 1 {
        return Err(Error::invalid(format!(
            "window radius {k} needs at least {} epochs, trace has {e_count}",
            2 * k + 1
        )));
    }
    let norm = trace.normalized_losses();
    let width = 2 * k + 1;
    let mut sums = [(); 4].map(|_| vec![0.0; width]);
    let mut events = [0usize; 4];
    for e in k.max(1)..e_count - k {
        for s in 0..trace.n_samples() {
            let kind = TransitionKind::of(trace.labels[e - 1][s], trace.labels[e][s]) as usize;
            events[kind] += 1;
            for (o, slot) in sums[kind].iter_mut().enumerate() {
                *slot += norm[e - k + o][s];
            }
        }
    }
    Ok(TransitionKind::ALL
        .iter()
        .map(|&kind| {
            let i = kind as usize;
            TransitionProfile {
                kind,
                radius: k,
                events: events[i],
                window: (events[i] > 0)
                    .then(|| sums[i].iter().map(|x| x / events[i] as f64).collect()),
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeatmapDirection {
    /// Easy with a rising trend at epoch i, hard at epoch j.
    E2hRising,
    /// Hard with a falling trend at epoch i, easy at epoch j.
    H2eFalling,
}

impl HeatmapDirection {
    pub const ALL: [HeatmapDirection; 2] =
        [HeatmapDirection::E2hRising, HeatmapDirection::H2eFalling];

    pub fn as_str(self) -> &'static str {
        match self {
            HeatmapDirection::E2hRising => "E2H_rising",
            HeatmapDirection::H2eFalling => "H2E_falling",
        }
    }

    fn source(self, label: Difficulty, delta: f64) -> bool {
        match self {
            HeatmapDirection::E2hRising => label == Difficulty::Easy && delta > 0.0,
            HeatmapDirection::H2eFalling => label == Difficulty::Hard && delta < 0.0,
        }
    }

    fn target(self) -> Difficulty {
        match self {
            HeatmapDirection::E2hRising => Difficulty::Hard,
            HeatmapDirection::H2eFalling => Difficulty::Easy,
        }
    }
}

impl FromStr for HeatmapDirection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "E2H_rising" => Ok(HeatmapDirection::E2hRising),
            "H2E_falling" => Ok(HeatmapDirection::H2eFalling),
            other => Err(format!("unknown heatmap direction {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub direction: HeatmapDirection,
    /// `fractions[i][j]` is defined for `j > i` only.
    pub fractions: Vec<Vec<Option<f64>>>,
    /// Number of samples meeting the epoch-i condition.
    pub denominators: Vec<usize>,
    /// `fractions[i][i + 1]` for every `i`.
    pub diagonal: Vec<f64>,
    pub diagonal_auc: f64,
}

/// Among samples meeting the direction's condition at epoch i, the
/// fraction in the target group at epoch j. An empty condition set gives 0.
pub fn inversion_heatmap(trace: &DifficultyTrace, direction: HeatmapDirection) -> Heatmap {
    let e_count = trace.n_epochs();
    let mut fractions = vec![vec![None; e_count]; e_count];
    let mut denominators = vec![0; e_count];
    for i in 0..e_count {
        let members: Vec<usize> = (0..trace.n_samples())
            .filter(|&s| direction.source(trace.labels[i][s], trace.deltas[i][s]))
            .collect();
        denominators[i] = members.len();
        for j in i + 1..e_count {
            let hits = members
                .iter()
                .filter(|&&s| trace.labels[j][s] == direction.target())
                .count();
            fractions[i][j] = Some(if members.is_empty() {
                0.0
            } else {
                hits as f64 / members.len() as f64
            });
        }
    }
    let diagonal: Vec<f64> = (0..e_count.saturating_sub(1))
        .map(|i| fractions[i][i + 1].unwrap_or(0.0))
        .collect();
    let diagonal_auc = curve_auc(&diagonal);
    Heatmap {
        direction,
        fractions,
        denominators,
        diagonal,
        diagonal_auc,
    }
}

/// Paths written by [`write_all`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsFiles {
    pub paths: Vec<PathBuf>,
}

fn write(path: PathBuf, body: String, out: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    out.push(path);
    Ok(())
}

/// Writes every diagnostic CSV into `dir`.
///
/// Schemas:
/// - `inversion_fraction.csv`: `epoch,fraction` for epochs `1..E`
/// - `transition_<kind>.csv`: `offset,mean_normalized_loss,events`; a kind
///   without events has a header and a `# empty` line
/// - `heatmap_<direction>.csv`: `epoch_i,epoch_j,fraction,denominator` for `j > i`
/// - `auc_summary.csv`: `curve,auc_epoch_axis,auc_normalized_axis`
pub fn write_all(trace: &DifficultyTrace, radius: usize, dir: &Path) -> Result<DiagnosticsFiles> {
    let fractions = inversion_fraction(trace)?;
    let profiles = transition_profiles(trace, radius)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();

    let mut body = String::from("epoch,fraction\n");
    for (i, f) in fractions.iter().enumerate() {
        let _ = writeln!(body, "{},{}", trace.epochs[i + 1], f);
    }
    write(dir.join("inversion_fraction.csv"), body, &mut paths)?;

    for p in &profiles {
        let mut body = String::from("offset,mean_normalized_loss,events\n");
        match &p.window {
            Some(w) => {
                for (o, v) in w.iter().enumerate() {
                    let _ = writeln!(body, "{},{},{}", o as i64 - radius as i64, v, p.events);
                }
            }
            None => body.push_str("# empty\n"),
        }
        write(
            dir.join(format!("transition_{}.csv", p.kind.as_str())),
            body,
            &mut paths,
        )?;
    }

    let mut summary = String::from("curve,auc_epoch_axis,auc_normalized_axis\n");
    let _ = writeln!(
        summary,
        "inversion_fraction,{},{}",
        curve_auc(&fractions),
        curve_auc_normalized(&fractions)
    );
    for dir_kind in HeatmapDirection::ALL {
        let h = inversion_heatmap(trace, dir_kind);
        let mut body = String::from("epoch_i,epoch_j,fraction,denominator\n");
        for i in 0..trace.n_epochs() {
            for j in i + 1..trace.n_epochs() {
                let _ = writeln!(
                    body,
                    "{},{},{},{}",
                    trace.epochs[i],
                    trace.epochs[j],
                    h.fractions[i][j].unwrap_or(0.0),
                    h.denominators[i]
                );
            }
        }
        write(
            dir.join(format!("heatmap_{}.csv", dir_kind.as_str())),
            body,
            &mut paths,
        )?;
        let _ = writeln!(
            summary,
            "heatmap_{}_diagonal,{},{}",
            dir_kind.as_str(),
            h.diagonal_auc,
            curve_auc_normalized(&h.diagonal)
        );
    }
    write(dir.join("auc_summary.csv"), summary, &mut paths)?;
    Ok(DiagnosticsFiles { paths })
}
