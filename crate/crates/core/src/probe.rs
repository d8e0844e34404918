//! Random-graph experiments: sample ordered graphs over a grid of edge
//! probabilities, run the tiling oracle on each, and aggregate.
//!
//! Trial `i` always uses the seed derived from `(seed, i)`, and the graph is
//! generated by drawing one uniform number per pair in a fixed order, so the
//! same trial at a larger `p` yields a supergraph. Tileability is monotone
//! under adding edges, hence so is every row's success count along the grid.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{perfect_tiling_with, TilingOptions, TilingOutcome};
use crate::graph::OrderedGraph;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("pattern order {h} does not divide n = {n}")]
    NotDivisible { h: usize, n: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("no sample with min degree in [{lo}, {hi}] after {tries} tries (p = {p}, trial {trial})")]
    RejectionBudget {
        lo: usize,
        hi: usize,
        tries: usize,
        p: f64,
        trial: usize,
    },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Each pair `{i, j}` is an edge independently with probability `p`.
pub fn random_ordered_graph(n: usize, p: f64, seed: u64) -> OrderedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = OrderedGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let u: f64 = rng.gen();
            if u < p {
                g.insert_edge(i, j);
            }
        }
    }
    g
}

/// SplitMix64 finaliser, used to derive per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, trial: usize, attempt: usize) -> u64 {
    mix(mix(seed ^ mix(trial as u64)) ^ attempt as u64)
}

/// Parses `"start:stop:step"` (inclusive) or a comma-separated list,
/// optionally prefixed with `p=`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ProbeError> {
    let body = spec.trim().strip_prefix("p=").unwrap_or(spec.trim());
    let bad = || ProbeError::Grid(spec.to_string());
    let values: Vec<f64> = if body.contains(':') {
        let parts: Vec<f64> = body
            .split(':')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| round9(start + i as f64 * step)).collect()
    } else {
        body.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    /// Edge probability of this grid point.
    pub param: f64,
    pub trials: usize,
    pub successes: usize,
    pub timeouts: usize,
    pub mean_nodes: f64,
    pub seed: u64,
}

impl ProbeRow {
    pub fn tiling_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub tiling: TilingOptions,
    /// Keep only samples whose minimum degree lies in `[lo, hi]`.
    pub min_degree_band: Option<(usize, usize)>,
    /// Resamples allowed per trial before giving up on the band.
    pub max_rejections: usize,
    /// Threads across trials. The oracle itself runs sequentially per trial.
    pub jobs: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            tiling: TilingOptions::default(),
            min_degree_band: None,
            max_rejections: 10_000,
            jobs: 1,
        }
    }
}

fn sample(n: usize, p: f64, seed: u64, trial: usize, opts: &ProbeOptions) -> Result<OrderedGraph, ProbeError> {
    let Some((lo, hi)) = opts.min_degree_band else {
        return Ok(random_ordered_graph(n, p, trial_seed(seed, trial, 0)));
    };
    for attempt in 0..=opts.max_rejections {
        let g = random_ordered_graph(n, p, trial_seed(seed, trial, attempt));
        if (lo..=hi).contains(&g.min_degree()) {
            return Ok(g);
        }
    }
    Err(ProbeError::RejectionBudget {
        lo,
        hi,
        tries: opts.max_rejections + 1,
        p,
        trial,
    })
}

struct TrialResult {
    outcome: TilingOutcome,
    nodes: u64,
}

fn run_trial(
    pattern: &OrderedGraph,
    n: usize,
    p: f64,
    seed: u64,
    trial: usize,
    opts: &ProbeOptions,
) -> Result<TrialResult, ProbeError> {
    let host = sample(n, p, seed, trial, opts)?;
    let tiling = TilingOptions { jobs: 1, ..opts.tiling };
    let report = perfect_tiling_with(&host, pattern, &tiling);
    Ok(TrialResult {
        outcome: report.outcome,
        nodes: report.nodes,
    })
}

pub fn threshold_probe(
    pattern: &OrderedGraph,
    n: usize,
    grid: &[f64],
    trials: usize,
    seed: u64,
    opts: &ProbeOptions,
) -> Result<Vec<ProbeRow>, ProbeError> {
    let h = pattern.n();
    if n == 0 || !n.is_multiple_of(h) {
        return Err(ProbeError::NotDivisible { h, n });
    }
    if let Some(&p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(ProbeError::BadProbability(p));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .expect("thread pool");

    grid.iter()
        .map(|&p| {
            let results: Vec<TrialResult> = pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|trial| run_trial(pattern, n, p, seed, trial, opts))
                    .collect::<Result<_, _>>()
            })?;
            let successes = results.iter().filter(|r| r.outcome.is_tiling()).count();
            let timeouts = results.iter().filter(|r| r.outcome == TilingOutcome::Timeout).count();
            let total_nodes: u64 = results.iter().map(|r| r.nodes).sum();
            Ok(ProbeRow {
                n,
                param: p,
                trials,
                successes,
                timeouts,
                mean_nodes: if trials == 0 {
                    0.0
                } else {
                    total_nodes as f64 / trials as f64
                },
                seed,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    param: String,
    trials: usize,
    successes: usize,
    timeouts: usize,
    mean_nodes: String,
    seed: u64,
}

/// Writes rows with the header `n,param,trials,successes,timeouts,mean_nodes,seed`.
pub fn write_csv<W: Write>(rows: &[ProbeRow], out: W) -> Result<(), ProbeError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            n: r.n,
            param: format!("{}", round9(r.param)),
            trials: r.trials,
            successes: r.successes,
            timeouts: r.timeouts,
            mean_nodes: format!("{:.3}", r.mean_nodes),
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_csv(rows: &[ProbeRow]) -> Result<String, ProbeError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// One sanity anchor: a host with a known outcome.
#[derive(Debug, Clone)]
pub struct Anchor {
    pub name: String,
    pub outcome: TilingOutcome,
    pub expect_tiling: bool,
}

impl Anchor {
    pub fn holds(&self) -> bool {
        if self.expect_tiling {
            self.outcome.is_tiling()
        } else {
            self.outcome == TilingOutcome::NoTiling
        }
    }
}

/// Runs the oracle on hosts with known answers at order `n`: the complete
/// graph must tile, and every barrier that applies to the pattern must not.
pub fn anchors(pattern: &OrderedGraph, n: usize, opts: &TilingOptions) -> Vec<Anchor> {
    use crate::barriers;

    let mut hosts: Vec<(String, OrderedGraph, bool)> = vec![("complete".into(), OrderedGraph::complete(n), true)];
    let chi = crate::profile::interval_chromatic_number(pattern);
    for ell in 1..chi {
        if let Ok(c) = barriers::space_barrier(pattern, ell, n) {
            hosts.push((format!("space(ell={ell})"), c.graph, false));
        }
        if let Ok(c) = barriers::space_barrier_mirrored(pattern, ell, n) {
            hosts.push((format!("space-mirrored(ell={ell})"), c.graph, false));
        }
    }
    if chi == 2 {
        if let Ok(c) = barriers::divisibility_barrier(pattern, n) {
            hosts.push(("divisibility".into(), c.graph, false));
        }
        if let Ok(c) = barriers::local_barrier(pattern, n) {
            hosts.push(("local".into(), c.graph, false));
        }
    }
    hosts
        .into_iter()
        .map(|(name, host, expect_tiling)| Anchor {
            name,
            outcome: perfect_tiling_with(&host, pattern, opts).outcome,
            expect_tiling,
        })
        .collect()
}
