//! Experiment orchestration: plan files, trial scheduling, trimmed-mean
//! reports, ε sweeps, tree-formulation comparisons and CSV output.
//!
//! # Plan files
//!
//! One `key = value` pair per line; `#` starts a comment.
//!
//! ```text
//! dataset = er:2000:0.005        # graph source, as for --graph
//! seed = 7                       # master seed
//! trials = 10
//! eps = 0.5, 1, 2                # list, or a range start..end:step
//! nrep = 1, 4                    # optional, default 1
//! query = walk-opt walk:4        # <mech> <spec> [root=R] [distinct]; repeatable
//! query = pattern 0-1,1-2,1-3 root=1 distinct
//! exact_cache = exact.txt        # optional sidecar of exact counts
//! output = report.csv            # optional
//! ```
//!
//! Every cell `(query, ε, n_rep)` derives its randomness from the master
//! seed and the cell label, so results do not depend on scheduling. The
//! worker count comes from the `LDP_WORKERS` environment variable.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{load_graph_source, Graph};
use crate::mechanism::{Estimate, Mechanism, RunConfig};
use crate::pattern::{formulate_tree, Pattern, PatternSpec};
use crate::privacy::mix_words;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "LDP_WORKERS";

/// One query of a plan.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub mechanism: Mechanism,
    pub distinct: bool,
}

impl Query {
    /// Parses `<mech> <spec> [root=R] [distinct]`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let name = tokens
            .next()
            .ok_or_else(|| Error::arg("query", "expected `<mech> <spec>`"))?;
        let spec: PatternSpec = tokens
            .next()
            .ok_or_else(|| Error::arg("query", format!("`{text}` has no pattern spec")))?
            .parse()?;
        let mut root = None;
        let mut distinct = false;
        for token in tokens {
            if token == "distinct" {
                distinct = true;
            } else if let Some(r) = token.strip_prefix("root=") {
                root = Some(
                    r.parse::<usize>()
                        .map_err(|_| Error::arg("query", format!("bad root `{r}`")))?,
                );
            } else {
                return Err(Error::arg("query", format!("unexpected token `{token}`")));
            }
        }
        Ok(Query {
            mechanism: Mechanism::parse(name, &spec, root)?,
            distinct,
        })
    }

    /// Stable label, also the exact-cache key: `<mech> <query>[ distinct]`.
    pub fn label(&self) -> String {
        let mut label = format!("{} {}", self.mechanism.name(), self.mechanism.query());
        if self.distinct {
            label.push_str(" distinct");
        }
        label
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub dataset: String,
    pub seed: u64,
    pub trials: usize,
    pub epsilons: Vec<f64>,
    pub n_reps: Vec<u32>,
    pub queries: Vec<Query>,
    pub exact_cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// `start, start+step, …` up to `end` inclusive (with rounding tolerance).
pub fn eps_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || start.is_nan() || start <= 0.0 || end < start {
        return Err(Error::arg("eps", format!("bad range {start}..{end}:{step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    // round to suppress accumulated binary error in labels
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn parse_list<T: std::str::FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| Error::Parse {
                line,
                message: format!("bad list entry `{}`", t.trim()),
            })
        })
        .collect()
}

impl ExperimentPlan {
    pub fn parse(text: &str) -> Result<Self> {
        let mut dataset = None;
        let mut seed = 0;
        let mut trials = 10;
        let mut epsilons = Vec::new();
        let mut n_reps = vec![1];
        let mut queries = Vec::new();
        let mut exact_cache = None;
        let mut output = None;
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| Error::Parse { line, message };
            match key {
                "dataset" => dataset = Some(value.to_string()),
                "seed" => seed = value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?,
                "trials" => {
                    trials = value.parse().map_err(|_| bad(format!("bad trial count `{value}`")))?
                }
                "eps" => {
                    epsilons = match value.split_once("..") {
                        Some((start, rest)) => {
                            let (end, step) = rest
                                .split_once(':')
                                .ok_or_else(|| bad("ranges are written start..end:step".into()))?;
                            let num = |s: &str| {
                                s.trim().parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")))
                            };
                            eps_grid(num(start)?, num(end)?, num(step)?)
                                .map_err(|e| bad(e.to_string()))?
                        }
                        None => parse_list(value, line)?,
                    }
                }
                "nrep" => n_reps = parse_list(value, line)?,
                "query" => queries.push(Query::parse(value).map_err(|e| bad(e.to_string()))?),
                "exact_cache" => exact_cache = Some(PathBuf::from(value)),
                "output" => output = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let plan = ExperimentPlan {
            dataset: dataset.ok_or_else(|| Error::Parse {
                line: 0,
                message: "plan has no `dataset`".into(),
            })?,
            seed,
            trials,
            epsilons,
            n_reps,
            queries,
            exact_cache,
            output,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::arg("trials", "must be at least 1"));
        }
        if self.epsilons.is_empty() {
            return Err(Error::arg("eps", "plan has no ε values"));
        }
        if let Some(e) = self.epsilons.iter().find(|&&e| e.is_nan() || e <= 0.0) {
            return Err(Error::arg("eps", format!("{e} is not positive")));
        }
        if self.n_reps.is_empty() || self.n_reps.contains(&0) {
            return Err(Error::arg("nrep", "values must be at least 1"));
        }
        if self.queries.is_empty() {
            return Err(Error::arg("query", "plan has no queries"));
        }
        Ok(())
    }
}

/// One line of the report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub query: String,
    pub mechanism: String,
    pub epsilon: f64,
    pub n_rep: u32,
    pub trials: usize,
    /// Whether the §6.1 trimmed mean was applied (exactly 10 trials).
    pub trimmed: bool,
    pub exact: Option<u128>,
    pub mean_estimate: f64,
    pub rel_err_pct: Option<f64>,
    pub rel_err_se_pct: Option<f64>,
    pub bytes_node_to_node: f64,
    pub bytes_node_to_analyzer: f64,
    pub bytes_analyzer_to_node: f64,
    pub rounds: usize,
    pub wall_ms_median: f64,
}

impl ReportRow {
    /// Equality on everything except wall time.
    pub fn same_results(&self, other: &ReportRow) -> bool {
        let strip = |r: &ReportRow| ReportRow {
            wall_ms_median: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }

    pub fn total_bytes(&self) -> f64 {
        self.bytes_node_to_node + self.bytes_node_to_analyzer + self.bytes_analyzer_to_node
    }
}

/// CSV header, in column order.
pub const REPORT_COLUMNS: [&str; 16] = [
    "dataset",
    "query",
    "mechanism",
    "epsilon",
    "n_rep",
    "trials",
    "trimmed",
    "exact",
    "mean_estimate",
    "rel_err_pct",
    "rel_err_se_pct",
    "bytes_node_to_node",
    "bytes_node_to_analyzer",
    "bytes_analyzer_to_node",
    "rounds",
    "wall_ms_median",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.query.clone(),
            r.mechanism.clone(),
            r.epsilon.to_string(),
            r.n_rep.to_string(),
            r.trials.to_string(),
            r.trimmed.to_string(),
            opt(r.exact),
            r.mean_estimate.to_string(),
            opt(r.rel_err_pct),
            opt(r.rel_err_se_pct),
            r.bytes_node_to_node.to_string(),
            r.bytes_node_to_analyzer.to_string(),
            r.bytes_analyzer_to_node.to_string(),
            r.rounds.to_string(),
            format!("{:.3}", r.wall_ms_median),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Relative error in percent, trimmed per §6.1 when there are exactly 10
/// estimates: sort by estimate, drop the 2 highest and 2 lowest, average the
/// relative errors of the remaining 6. Otherwise the plain mean. Also
/// returns the standard error of the averaged values and the trimming flag.
pub fn trimmed_relative_error(estimates: &[f64], exact: u128) -> Option<(f64, f64, bool)> {
    if exact == 0 || estimates.is_empty() {
        return None;
    }
    let exact = exact as f64;
    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let trimmed = sorted.len() == 10;
    let kept = if trimmed { &sorted[2..8] } else { &sorted[..] };
    let errors: Vec<f64> = kept.iter().map(|e| 100.0 * (e - exact).abs() / exact).collect();
    let (mean, se) = mean_and_se(&errors);
    Some((mean, se, trimmed))
}

/// Sample mean and standard error (0 for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Seed of a report cell: FNV-1a of the label mixed with the master seed.
pub fn cell_seed(master: u64, label: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in label.bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    mix_words(&[master, hash])
}

/// Runs `trials` independent trials in parallel; trial `t` uses key
/// `(seed, t)`. Returns the estimates in trial order with per-trial wall
/// time in milliseconds.
pub fn run_trials(
    g: &Graph,
    mech: &Mechanism,
    cfg: &RunConfig,
    seed: u64,
    trials: usize,
) -> Result<Vec<(Estimate, f64)>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let est = mech.run(g, &cfg.clone().with_trial(seed, t))?;
            Ok((est, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}

/// Summarizes trial estimates into a row.
pub fn summarize(
    dataset: &str,
    query: &Query,
    cfg: &RunConfig,
    exact: Option<u128>,
    runs: &[(Estimate, f64)],
) -> ReportRow {
    use crate::netsim::Channel;
    let values: Vec<f64> = runs.iter().map(|(e, _)| e.value).collect();
    let n = runs.len().max(1) as f64;
    let mean_bytes = |c: Channel| runs.iter().map(|(e, _)| e.comm.bytes(c) as f64).sum::<f64>() / n;
    let error = exact.and_then(|x| trimmed_relative_error(&values, x));
    let mut walls: Vec<f64> = runs.iter().map(|(_, w)| *w).collect();
    ReportRow {
        dataset: dataset.to_string(),
        query: query.mechanism.query() + if query.distinct { " distinct" } else { "" },
        mechanism: query.mechanism.name().to_string(),
        epsilon: cfg.epsilon,
        n_rep: cfg.n_rep,
        trials: runs.len(),
        trimmed: error.is_some_and(|e| e.2) || (error.is_none() && runs.len() == 10),
        exact,
        mean_estimate: values.iter().sum::<f64>() / n,
        rel_err_pct: error.map(|e| e.0),
        rel_err_se_pct: error.map(|e| e.1),
        bytes_node_to_node: mean_bytes(Channel::NodeToNode),
        bytes_node_to_analyzer: mean_bytes(Channel::NodeToAnalyzer),
        bytes_analyzer_to_node: mean_bytes(Channel::AnalyzerToNode),
        rounds: query.mechanism.rounds(),
        wall_ms_median: median(&mut walls),
    }
}

/// Exact-count sidecar: `<query label> = <count|NA>` per line.
pub fn load_exact_cache(path: &Path) -> Result<BTreeMap<String, Option<u128>>> {
    let mut cache = BTreeMap::new();
    if !path.exists() {
        return Ok(cache);
    }
    for (index, line) in std::fs::read_to_string(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.rsplit_once('=').ok_or_else(|| Error::Parse {
            line: index + 1,
            message: "expected `<query> = <count>`".into(),
        })?;
        let value = value.trim();
        let count = if value == "NA" {
            None
        } else {
            Some(value.parse::<u128>().map_err(|_| Error::Parse {
                line: index + 1,
                message: format!("bad count `{value}`"),
            })?)
        };
        cache.insert(key.trim().to_string(), count);
    }
    Ok(cache)
}

pub fn write_exact_cache(path: &Path, cache: &BTreeMap<String, Option<u128>>) -> Result<()> {
    let mut out = String::from("# exact counts: <query> = <count|NA>\n");
    for (key, value) in cache {
        out.push_str(&format!("{key} = {}\n", opt(*value)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Oracle count, or `None` when the size guard rejects the query.
pub fn exact_or_na(g: &Graph, query: &Query) -> Result<Option<u128>> {
    match query.mechanism.exact_count(g, query.distinct) {
        Ok(c) => Ok(Some(c)),
        Err(Error::Size(_) | Error::Overflow(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Thread pool sized by [`WORKERS_ENV`], or rayon's default.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let workers = value
            .parse::<usize>()
            .map_err(|_| Error::arg("LDP_WORKERS", format!("`{value}` is not a worker count")))?;
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map_err(|e| Error::arg("LDP_WORKERS", e.to_string()))
}

/// Runs every cell of `plan` on an already loaded graph.
pub fn run_plan_on(plan: &ExperimentPlan, g: &Graph) -> Result<Vec<ReportRow>> {
    plan.validate()?;
    let mut cache = match &plan.exact_cache {
        Some(path) => load_exact_cache(path)?,
        None => BTreeMap::new(),
    };
    let mut dirty = false;
    let mut rows = Vec::new();
    for query in &plan.queries {
        let label = query.label();
        let exact = match cache.get(&label) {
            Some(v) => *v,
            None => {
                let v = exact_or_na(g, query)?;
                cache.insert(label.clone(), v);
                dirty = true;
                v
            }
        };
        for &epsilon in &plan.epsilons {
            for &n_rep in &plan.n_reps {
                let cfg = RunConfig::new(epsilon).with_n_rep(n_rep).distinct(query.distinct);
                let cell = format!("{}|{label}|{epsilon}|{n_rep}", plan.dataset);
                let seed = cell_seed(plan.seed, &cell);
                let runs = run_trials(g, &query.mechanism, &cfg, seed, plan.trials)?;
                rows.push(summarize(&plan.dataset, query, &cfg, exact, &runs));
            }
        }
    }
    if let (Some(path), true) = (&plan.exact_cache, dirty) {
        write_exact_cache(path, &cache)?;
    }
    Ok(rows)
}

/// Loads the dataset, runs the plan on the worker pool and writes the CSV
/// to `plan.output` when set.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ReportRow>> {
    let g = load_graph_source(&plan.dataset, plan.seed)?;
    let rows = worker_pool()?.install(|| run_plan_on(plan, &g))?;
    if let Some(path) = &plan.output {
        write_csv(&rows, std::fs::File::create(path)?)?;
    }
    Ok(rows)
}

/// One formulation in a tree comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeRow {
    pub root: usize,
    pub rounds: usize,
    pub leaves: usize,
    pub sigma: u64,
    pub exact: Option<u128>,
    pub mean_estimate: f64,
    pub estimate_se: f64,
    pub rel_err_pct: Option<f64>,
    pub mean_total_bytes: f64,
}

/// Runs the pattern mechanism under each root and reports them side by side.
#[allow(clippy::too_many_arguments)]
pub fn compare_trees(
    g: &Graph,
    pattern: &Pattern,
    roots: &[usize],
    epsilon: f64,
    trials: usize,
    seed: u64,
    distinct: bool,
) -> Result<Vec<TreeRow>> {
    if roots.is_empty() {
        return Err(Error::arg("roots", "need at least one root"));
    }
    let mut exact = None;
    let mut rows = Vec::new();
    for &root in roots {
        let tree = formulate_tree(pattern, Some(root))?;
        let query = Query {
            mechanism: Mechanism::Pattern(tree.clone()),
            distinct,
        };
        if exact.is_none() {
            exact = Some(exact_or_na(g, &query)?);
        }
        let exact = exact.flatten();
        let cfg = RunConfig::new(epsilon).distinct(distinct);
        let cell = cell_seed(seed, &format!("compare|{pattern}|root={root}"));
        let runs = run_trials(g, &query.mechanism, &cfg, cell, trials)?;
        let values: Vec<f64> = runs.iter().map(|(e, _)| e.value).collect();
        let (mean, se) = mean_and_se(&values);
        rows.push(TreeRow {
            root,
            rounds: tree.round_count(),
            leaves: tree.leaves().len(),
            sigma: tree.sigma(),
            exact,
            mean_estimate: mean,
            estimate_se: se,
            rel_err_pct: exact.and_then(|x| trimmed_relative_error(&values, x)).map(|e| e.0),
            mean_total_bytes: runs.iter().map(|(e, _)| e.comm.total_bytes() as f64).sum::<f64>()
                / runs.len() as f64,
        });
    }
    Ok(rows)
}

pub fn write_tree_csv<W: Write>(rows: &[TreeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "root",
        "rounds",
        "leaves",
        "sigma",
        "exact",
        "mean_estimate",
        "estimate_se",
        "rel_err_pct",
        "mean_total_bytes",
    ])?;
    for r in rows {
        w.write_record([
            r.root.to_string(),
            r.rounds.to_string(),
            r.leaves.to_string(),
            r.sigma.to_string(),
            opt(r.exact),
            r.mean_estimate.to_string(),
            r.estimate_se.to_string(),
            opt(r.rel_err_pct),
            r.mean_total_bytes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
