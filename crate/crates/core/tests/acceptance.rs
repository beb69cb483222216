//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any gating criterion fails.

use std::f64::consts::E;
use std::time::Instant;

use gtnn::curriculum::{
    confidence_objective, lambert_w0, sigma_star, trend_delta_of, CurriculumConfig, CurriculumMode,
    Difficulty,
};
use gtnn::diagnostics::{
    curve_auc, inversion_fraction, inversion_heatmap, transition_profiles, DifficultyTrace,
    HeatmapDirection, TransitionKind,
};
use gtnn::graphstore::{
    positive_samples, sample_negatives, split, synth_graph, Graph, NegativeMode, Node, SplitName,
    SplitSet, SynthConfig,
};
use gtnn::model::{
    backward_batch, bce_loss, encode, forward_pair, BackwardItem, GtnnParams, ModelDims, Tensor,
};
use gtnn::trainer::{self, AblationAxis, EmbeddingInit, Metrics, MetricsSummary, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Bisection on `w e^w = x` over a bracket known to contain the root.
fn w_bisect(x: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, if x < 1.0 { 1.0 } else { x.ln() + 1.0 });
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let branch = -1.0 / E;
    let mut xs = Vec::with_capacity(10_000);
    for i in 0..2_000 {
        xs.push(branch + (0.0 - branch) * i as f64 / 1_999.0);
    }
    for i in 0..8_000 {
        xs.push(10f64.powf(-12.0 + 18.0 * i as f64 / 7_999.0));
    }
    let mut worst = 0.0f64;
    for &x in &xs {
        let w = match lambert_w0(x) {
            Ok(w) => w,
            Err(e) => return outcome(false, format!("W({x}) failed: {e}")),
        };
        worst = worst.max((w * w.exp() - x).abs() / x.abs().max(1.0));
    }
    let w1 = lambert_w0(1.0).unwrap();
    let oracle = w_bisect(1.0);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10
        && (w1 - 0.5671432904097838).abs() <= 1e-12
        && (w1 - oracle).abs() <= 1e-12
        && elapsed < 1.0;
    outcome(
        pass,
        format!("max scaled residual {worst:.2e} over {} points; W(1)={w1} (bisection {oracle}); {elapsed:.3}s", xs.len()),
    )
}

/// SuperLoss confidence written out independently of the trend code path.
fn sl_sigma(l: f64, tau: f64, lambda: f64) -> f64 {
    let beta = (l - tau) / lambda;
    (-lambert_w0(0.5 * beta.max(-2.0 / E)).unwrap()).exp()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let l = rng.gen_range(0.0..5.0);
        let tau = rng.gen_range(0.0..3.0);
        let lambda = rng.gen_range(0.05..5.0);
        let delta = rng.gen_range(-1.0..=1.0);
        worst =
            worst.max((sigma_star(l, tau, delta, 0.0, lambda) - sl_sigma(l, tau, lambda)).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |trend(alpha=0) - SL| = {worst:.2e} over 10000 draws"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut optimum_checked = 0;
    for _ in 0..1_000 {
        let l = rng.gen_range(0.0..5.0);
        let tau = rng.gen_range(0.0..3.0);
        let delta = rng.gen_range(-1.0..=1.0);
        let alpha = rng.gen_range(0.01..=1.0);
        let lambda = rng.gen_range(0.05..5.0);
        let s = sigma_star(l, tau, delta, alpha, lambda);
        if !(s > 0.0 && s <= E) {
            failures.push(format!("range: sigma={s}"));
        }
        let threshold = tau - alpha * delta;
        if sigma_star(threshold, tau, delta, alpha, lambda) != 1.0 {
            failures.push(format!("unit at threshold: l={threshold}"));
        }
        // strict decrease holds where the closed form is not clamped
        let beta = (l - threshold) / lambda;
        if beta > -2.0 / E {
            let step = 1e-3 * (1.0 + l.abs());
            if sigma_star(l + step, tau, delta, alpha, lambda) >= s {
                failures.push(format!("not decreasing in l at beta={beta}"));
            }
            let f = confidence_objective(s, l, threshold, lambda);
            for factor in [0.999, 1.001] {
                if confidence_objective(s * factor, l, threshold, lambda) < f {
                    failures.push(format!("not a minimizer at beta={beta}"));
                }
            }
            optimum_checked += 1;
        }
        if sigma_star(l, tau, (delta + 0.1).min(1.0), alpha, lambda) > s {
            failures.push("increasing in delta".into());
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "1000 draws, {optimum_checked} unclamped optimality checks, {} violations{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(" (first: {f})"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    for _ in 0..2_000 {
        let len = rng.gen_range(0..12);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..10.0)).collect();
        let d = trend_delta_of(&xs);
        if !(-1.0..=1.0).contains(&d) {
            failures.push(format!("out of range {d}"));
        }
        let c = rng.gen_range(1e-3..1e3);
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        if (trend_delta_of(&scaled) - d).abs() > 1e-12 {
            failures.push("scale invariance".into());
        }
    }
    let rising = trend_delta_of(&[0.1, 0.2, 0.5, 0.9, 1.4]);
    let falling = trend_delta_of(&[1.4, 0.9, 0.5, 0.2, 0.1]);
    let flat = trend_delta_of(&[0.7; 5]);
    let pass = failures.is_empty() && rising == 1.0 && falling == -1.0 && flat == 0.0;
    outcome(
        pass,
        format!("rising {rising}, falling {falling}, constant {flat}; {} violations on 2000 random windows", failures.len()),
    )
}

fn tiny_graph() -> Graph {
    let mut g = Graph::new();
    for i in 0..5 {
        g.add_node(Node::new(format!("n{i}"))).unwrap();
    }
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 3)] {
        g.add_edge_idx(u, v).unwrap();
    }
    g
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let g = tiny_graph();
    let dims = ModelDims {
        d_in: 3,
        d: 2,
        d_e: 2,
        d_h: 2,
        feat_dim: 4,
        t_layers: 1,
    };
    let mut worst = 0.0f64;
    let mut coords = 0;
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let mut params = GtnnParams::zeros(&dims);
        for t in params.blocks_mut() {
            for x in t.as_mut_slice() {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        let x = Tensor::from_vec(5, 3, (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let pairs: Vec<(usize, usize, Vec<f64>, u8, f64)> = (0..6)
            .map(|k| {
                let u = k % 5;
                let v = (u + 1 + k % 4) % 5;
                let a = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (u, v, a, (k % 2) as u8, rng.gen_range(0.1..2.7))
            })
            .collect();
        let loss = |p: &GtnnParams| -> f64 {
            let enc = encode(&g, &x, p).unwrap();
            pairs
                .iter()
                .map(|(u, v, a, y, w)| {
                    w * bce_loss(forward_pair(*u, *v, enc.z(), a, p).unwrap().p, *y)
                })
                .sum::<f64>()
                / pairs.len() as f64
        };
        let enc = encode(&g, &x, &params).unwrap();
        let traces: Vec<_> = pairs
            .iter()
            .map(|(u, v, a, _, _)| forward_pair(*u, *v, enc.z(), a, &params).unwrap())
            .collect();
        let items: Vec<_> = traces
            .iter()
            .zip(&pairs)
            .map(|(t, (_, _, _, y, w))| BackwardItem {
                trace: t,
                label: *y,
                weight: *w,
            })
            .collect();
        let grads = backward_batch(&items, &enc, &g, &params).unwrap();
        let analytic: Vec<f64> = grads
            .blocks()
            .iter()
            .flat_map(|(_, t)| t.as_slice().to_vec())
            .collect();
        let n_blocks = params.blocks().len();
        let mut k = 0;
        for b in 0..n_blocks {
            for i in 0..params.blocks()[b].1.len() {
                let h = 1e-5;
                let mut plus = params.clone();
                plus.blocks_mut()[b].as_mut_slice()[i] += h;
                let mut minus = params.clone();
                minus.blocks_mut()[b].as_mut_slice()[i] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let exact = analytic[k];
                let rel = (exact - numeric).abs() / exact.abs().max(numeric.abs()).max(1e-7);
                worst = worst.max(rel);
                k += 1;
                coords += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-4 && elapsed < 10.0,
        format!("6 models, {coords} coordinates, max relative error {worst:.2e}; {elapsed:.3}s"),
    )
}

fn synthetic() -> (Graph, SplitSet) {
    let g = synth_graph(&SynthConfig {
        n_nodes: 200,
        n_groups: 2,
        seed: 7,
        ..Default::default()
    })
    .unwrap();
    let negatives =
        sample_negatives(&g, &g.edge_list(), 5, NegativeMode::HardPlusRandom, 7).unwrap();
    let samples: Vec<_> = positive_samples(&g).into_iter().chain(negatives).collect();
    let splits = split(&samples, [0.8, 0.1, 0.1], 7).unwrap();
    (g, splits)
}

/// Logistic regression by full-batch gradient descent on standardized inputs.
fn logistic_probe(
    train_x: &[Vec<f64>],
    train_y: &[u8],
    test_x: &[Vec<f64>],
    test_y: &[u8],
) -> Metrics {
    let dim = train_x[0].len();
    let n = train_x.len() as f64;
    let mut mean = vec![0.0; dim];
    let mut sd = vec![0.0; dim];
    for r in train_x {
        for j in 0..dim {
            mean[j] += r[j] / n;
        }
    }
    for r in train_x {
        for j in 0..dim {
            sd[j] += (r[j] - mean[j]).powi(2) / n;
        }
    }
    let sd: Vec<f64> = sd.iter().map(|v| v.sqrt().max(1e-12)).collect();
    let norm = |r: &Vec<f64>| -> Vec<f64> { (0..dim).map(|j| (r[j] - mean[j]) / sd[j]).collect() };
    let xs: Vec<Vec<f64>> = train_x.iter().map(norm).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    for _ in 0..3_000 {
        let mut gw = vec![0.0; dim];
        let mut gb = 0.0;
        for (x, &y) in xs.iter().zip(train_y) {
            let z = b + x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
            let err = 1.0 / (1.0 + (-z).exp()) - y as f64;
            for j in 0..dim {
                gw[j] += err * x[j] / n;
            }
            gb += err / n;
        }
        for j in 0..dim {
            w[j] -= 0.5 * gw[j];
        }
        b -= 0.5 * gb;
    }
    let probs: Vec<f64> = test_x
        .iter()
        .map(|r| {
            let x = norm(r);
            1.0 / (1.0 + (-(b + x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>())).exp())
        })
        .collect();
    Metrics::from_predictions(&probs, test_y, 0.5)
}

fn criterion_6(g: &Graph, splits: &SplitSet) -> Outcome {
    let start = Instant::now();
    let cfg = TrainConfig::default();
    let data = trainer::prepare(g, splits, &cfg, None).unwrap();
    let d_in = g.d_in().unwrap();
    let probe_features = |name: SplitName| -> (Vec<Vec<f64>>, Vec<u8>) {
        let s = data.split(name);
        let rows = s
            .pairs
            .iter()
            .zip(&s.features)
            .map(|(&(u, v), a)| {
                let mut r = a[2 * d_in..2 * d_in + 2].to_vec();
                r.extend(
                    g.node(u)
                        .init_embedding
                        .as_ref()
                        .unwrap()
                        .iter()
                        .zip(g.node(v).init_embedding.as_ref().unwrap())
                        .map(|(p, q)| p * q),
                );
                r
            })
            .collect();
        (rows, s.labels.clone())
    };
    let (tx, ty) = probe_features(SplitName::Train);
    let (sx, sy) = probe_features(SplitName::Test);
    let probe = logistic_probe(&tx, &ty, &sx, &sy);

    let seeds = [1, 2, 3, 4, 5];
    let mut parts = vec![format!("probe F1 {:.4}", probe.f1)];
    let mut pass = probe.f1 >= 0.95;
    for mode in [
        CurriculumMode::None,
        CurriculumMode::Sl,
        CurriculumMode::TrendSl,
    ] {
        let cfg = TrainConfig {
            curriculum: CurriculumConfig {
                mode,
                ..Default::default()
            },
            ..Default::default()
        };
        let runs = trainer::train_seeds(g, splits, &cfg, &seeds, None).unwrap();
        let max_epochs = runs.iter().map(|r| r.records.len()).max().unwrap();
        let summary = MetricsSummary::of(&runs.iter().map(|r| r.test).collect::<Vec<_>>());
        pass &= summary.f1.mean >= 0.9 && max_epochs <= 100;
        parts.push(format!("{} F1 {}", mode.as_str(), summary.f1));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 120.0;
    parts.push(format!("{elapsed:.1}s"));
    outcome(pass, parts.join("; "))
}

/// Random scripted trace: 4 samples, 10 epochs.
fn scripted_trace(seed: u64) -> DifficultyTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (e, n) = (10, 4);
    let labels = (0..e)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Difficulty::Easy
                    } else {
                        Difficulty::Hard
                    }
                })
                .collect()
        })
        .collect();
    let losses = (0..e)
        .map(|_| (0..n).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect())
        .collect();
    let deltas = (0..e)
        .map(|_| {
            (0..n)
                .map(|_| [-1.0, -0.5, 0.0, 0.5, 1.0][rng.gen_range(0..5)])
                .collect()
        })
        .collect();
    DifficultyTrace::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        labels,
        losses,
        deltas,
    )
    .unwrap()
}

fn oracle_auc(ys: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 1..ys.len() {
        total += (ys[i - 1] + ys[i]) / 2.0;
    }
    total
}

fn criterion_7() -> Outcome {
    use Difficulty::{Easy, Hard};
    let mut failures = Vec::new();
    for seed in 0..20 {
        let t = scripted_trace(seed);
        let (e, n) = (t.n_epochs(), t.n_samples());

        let mut flips = Vec::new();
        for ep in 1..e {
            let c = (0..n)
                .filter(|&s| t.labels[ep][s] != t.labels[ep - 1][s])
                .count();
            flips.push(c as f64 / n as f64);
        }
        if inversion_fraction(&t).unwrap() != flips {
            failures.push(format!("seed {seed}: inversion fraction"));
        }
        if curve_auc(&flips) != oracle_auc(&flips) {
            failures.push(format!("seed {seed}: inversion AUC"));
        }

        // per-sample min-max, then enumerate events kind by kind
        let mut norm = vec![vec![0.0; n]; e];
        for s in 0..n {
            let col: Vec<f64> = (0..e).map(|ep| t.losses[ep][s]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for ep in 0..e {
                norm[ep][s] = if hi > lo {
                    (col[ep] - lo) / (hi - lo)
                } else {
                    0.0
                };
            }
        }
        for k in 1..=4 {
            let profiles = transition_profiles(&t, k).unwrap();
            for (kind, from, to) in [
                (TransitionKind::E2E, Easy, Easy),
                (TransitionKind::E2H, Easy, Hard),
                (TransitionKind::H2E, Hard, Easy),
                (TransitionKind::H2H, Hard, Hard),
            ] {
                let mut windows: Vec<Vec<f64>> = Vec::new();
                for ep in 1..e {
                    if ep < k || ep + k >= e {
                        continue;
                    }
                    for s in 0..n {
                        if t.labels[ep - 1][s] == from && t.labels[ep][s] == to {
                            windows.push((ep - k..=ep + k).map(|x| norm[x][s]).collect());
                        }
                    }
                }
                let expect = if windows.is_empty() {
                    None
                } else {
                    let mut avg = vec![0.0; 2 * k + 1];
                    for w in &windows {
                        for (a, x) in avg.iter_mut().zip(w) {
                            *a += x;
                        }
                    }
                    Some(
                        avg.into_iter()
                            .map(|a| a / windows.len() as f64)
                            .collect::<Vec<_>>(),
                    )
                };
                let got = profiles.iter().find(|p| p.kind == kind).unwrap();
                if got.window != expect || got.events != windows.len() {
                    failures.push(format!("seed {seed}: {} window k={k}", kind.as_str()));
                }
            }
        }

        for dir in [HeatmapDirection::E2hRising, HeatmapDirection::H2eFalling] {
            let h = inversion_heatmap(&t, dir);
            let mut diag = Vec::new();
            for i in 0..e {
                for j in 0..e {
                    let expect = if j <= i {
                        None
                    } else {
                        let mut num = 0;
                        let mut den = 0;
                        for s in 0..n {
                            let cond = match dir {
                                HeatmapDirection::E2hRising => {
                                    t.labels[i][s] == Easy && t.deltas[i][s] > 0.0
                                }
                                HeatmapDirection::H2eFalling => {
                                    t.labels[i][s] == Hard && t.deltas[i][s] < 0.0
                                }
                            };
                            if cond {
                                den += 1;
                                let target = if dir == HeatmapDirection::E2hRising {
                                    Hard
                                } else {
                                    Easy
                                };
                                if t.labels[j][s] == target {
                                    num += 1;
                                }
                            }
                        }
                        Some(if den == 0 {
                            0.0
                        } else {
                            num as f64 / den as f64
                        })
                    };
                    if h.fractions[i][j] != expect {
                        failures.push(format!("seed {seed}: heatmap {} ({i},{j})", dir.as_str()));
                    }
                    if j == i + 1 {
                        diag.push(expect.unwrap());
                    }
                }
            }
            if h.diagonal != diag || h.diagonal_auc != oracle_auc(&diag) {
                failures.push(format!("seed {seed}: heatmap {} diagonal", dir.as_str()));
            }
        }
    }
    let triangle = curve_auc(&[0.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut linear_err = 0.0f64;
    for _ in 0..200 {
        let s: Vec<f64> = (0..rng.gen_range(2..30))
            .map(|_| rng.gen_range(0.0..1.0))
            .collect();
        let a = rng.gen_range(-10.0..10.0);
        let scaled: Vec<f64> = s.iter().map(|x| a * x).collect();
        linear_err = linear_err.max((curve_auc(&scaled) - a * curve_auc(&s)).abs());
    }
    let pass = failures.is_empty() && triangle == 0.5 && linear_err <= 1e-12;
    outcome(
        pass,
        format!(
            "20 scripted 4x10 traces, {} mismatches; auc([0,1])={triangle}; linearity error {linear_err:.1e}{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn criterion_8(g: &Graph, splits: &SplitSet) -> Outcome {
    let cfg = TrainConfig {
        seed: 11,
        ..Default::default()
    };
    let a = trainer::train(g, splits, &cfg, None).unwrap();
    let b = trainer::train(g, splits, &cfg, None).unwrap();
    let json_same = a.metrics_json().unwrap() == b.metrics_json().unwrap();
    let trace_a = gtnn::diagnostics::trace_csv(&a.trace_rows());
    let trace_same = trace_a == gtnn::diagnostics::trace_csv(&b.trace_rows());
    outcome(
        json_same && trace_same,
        format!(
            "metrics JSON identical: {json_same}; trace CSV identical: {trace_same} ({} bytes)",
            trace_a.len()
        ),
    )
}

fn criterion_9(g: &Graph, splits: &SplitSet) -> Outcome {
    let grid: Vec<String> = [EmbeddingInit::File, EmbeddingInit::Random]
        .iter()
        .map(|e| e.as_str().to_string())
        .collect();
    let rows = trainer::ablate(
        g,
        splits,
        &TrainConfig::default(),
        AblationAxis::EmbeddingInit,
        &grid,
        &[1, 2, 3, 4, 5],
        None,
    )
    .unwrap();
    let summary = trainer::summarize_ablation(&rows);
    let f1 = |name: &str| summary.iter().find(|(s, _)| s == name).unwrap().1.f1;
    let (file, random) = (f1("file"), f1("random"));
    outcome(
        file.mean >= random.mean,
        format!("file F1 {file}; random F1 {random}"),
    )
}

fn criterion_10(g: &Graph, splits: &SplitSet) -> Outcome {
    let mut parts = Vec::new();
    for mode in [CurriculumMode::Sl, CurriculumMode::TrendSl] {
        let cfg = TrainConfig {
            curriculum: CurriculumConfig {
                mode,
                ..Default::default()
            },
            seed: 1,
            ..Default::default()
        };
        let run = trainer::train(g, splits, &cfg, None).unwrap();
        let trace = DifficultyTrace::from_rows(&run.trace_rows()).unwrap();
        let fractions = inversion_fraction(&trace).unwrap();
        parts.push(format!(
            "{} inversion AUC {:.4} over {} epochs",
            mode.as_str(),
            curve_auc(&fractions),
            trace.n_epochs()
        ));
    }
    parts.push("reference values 2.12 (trend_sl) vs 2.15 (sl), not asserted".into());
    outcome(true, parts.join("; "))
}

fn main() {
    let (g, splits) = synthetic();
    let criteria: Vec<(u32, &str, bool, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "Lambert W correctness", true, Box::new(criterion_1)),
        (2, "SL reduction at alpha = 0", true, Box::new(criterion_2)),
        (3, "confidence properties", true, Box::new(criterion_3)),
        (4, "trend statistic", true, Box::new(criterion_4)),
        (5, "gradient correctness", true, Box::new(criterion_5)),
        (
            6,
            "end-to-end smoke",
            true,
            Box::new(|| criterion_6(&g, &splits)),
        ),
        (
            7,
            "diagnostics oracle equivalence",
            true,
            Box::new(criterion_7),
        ),
        (
            8,
            "determinism",
            true,
            Box::new(|| criterion_8(&g, &splits)),
        ),
        (
            9,
            "informative embedding ablation",
            true,
            Box::new(|| criterion_9(&g, &splits)),
        ),
        (
            10,
            "inversion AUC report (informational)",
            false,
            Box::new(|| criterion_10(&g, &splits)),
        ),
    ];
    let mut failed = 0;
    for (n, name, gating, run) in criteria {
        let result = run();
        let status = match (result.pass, gating) {
            (true, true) => "PASS",
            (true, false) => "INFO",
            (false, _) => "FAIL",
        };
        if !result.pass {
            failed += 1;
        }
        println!("criterion {n:>2} {status} {name}: {}", result.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
