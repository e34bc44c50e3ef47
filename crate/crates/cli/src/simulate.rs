//! Replicated sampling-learning-evaluation runs against a reference network,
//! emitting one results row per (ratio, replicate, strategy).
//!
//! Determinism: replicate r of ratio index k samples its training set from
//! stream 2*(k*replicates + r) of the master seed and its test set from the
//! following stream, so any row can be reproduced in isolation. Rows are
//! produced in (ratio, replicate, strategy) order regardless of the worker
//! pool's scheduling. Wall-clock seconds are recorded only when `timing` is
//! set; otherwise the column is a constant 0.000 so reruns are byte-identical.

use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;

use bnsl::{
    hill_climb, nominal_parameter_count, shd, Bn, LearnConfig, PriorKind, ScoreKind,
};

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub ratios: Vec<f64>,
    pub replicates: usize,
    pub strategies: Vec<(ScoreKind, PriorKind)>,
    pub test_set_size: usize,
    pub master_seed: u64,
    pub max_parents: Option<usize>,
    pub fit_alpha: f64,
    pub timing: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            ratios: vec![0.1, 0.2, 0.5],
            replicates: 20,
            strategies: Vec::new(),
            test_set_size: 10_000,
            master_seed: 1,
            max_parents: None,
            fit_alpha: 1.0,
            timing: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub network: String,
    pub n_over_p: f64,
    pub replicate: usize,
    pub score: ScoreKind,
    pub prior: PriorKind,
    pub shd: Option<usize>,
    pub arcs: Option<usize>,
    pub arcs_ratio: Option<f64>,
    pub loglik: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

pub const RESULTS_HEADER: &str =
    "network,n_over_p,replicate,score,prior,alpha,beta_or_c,shd,arcs,arcs_ratio,loglik,seconds,error";

pub fn write_results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("# bnsl-results v1\n");
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        let opt = |v: Option<String>| v.unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.3},{}\n",
            row.network,
            row.n_over_p,
            row.replicate,
            row.score.name(),
            row.prior.name(),
            opt(row.score.alpha().map(|a| a.to_string())),
            opt(row.prior.parameter().map(|p| p.to_string())),
            opt(row.shd.map(|v| v.to_string())),
            opt(row.arcs.map(|v| v.to_string())),
            opt(row.arcs_ratio.map(|v| v.to_string())),
            opt(row.loglik.map(|v| v.to_string())),
            row.seconds,
            row.error.as_deref().unwrap_or(""),
        ));
    }
    out
}

/// One full simulation over the reference network: for every ratio and
/// replicate, sample a training set of ceil(ratio * p) rows and a fresh test
/// set, then learn, fit and evaluate each strategy. Strategy failures land
/// in the row's error column; the run continues.
pub fn run_simulation(reference: &Bn, network_name: &str, config: &SimulationConfig) -> Vec<ResultRow> {
    let p = nominal_parameter_count(reference.variables(), reference.dag())
        .expect("reference network parameter count fits in 64 bits");
    let reference_cpdag = reference.dag().to_cpdag();
    let reference_arcs = reference.dag().arc_count();

    let tasks: Vec<(usize, usize)> = (0..config.ratios.len())
        .flat_map(|k| (0..config.replicates).map(move |r| (k, r)))
        .collect();

    let rows: Vec<Vec<ResultRow>> = tasks
        .par_iter()
        .map(|&(ratio_idx, replicate)| {
            let ratio = config.ratios[ratio_idx];
            let n = (ratio * p as f64).ceil() as usize;
            let base_stream = 2 * (ratio_idx * config.replicates + replicate) as u64;
            let train = reference.sample_stream(n, config.master_seed, base_stream);
            let test =
                reference.sample_stream(config.test_set_size, config.master_seed, base_stream + 1);

            config
                .strategies
                .iter()
                .map(|&(score, prior)| {
                    let started = Instant::now();
                    let learn = LearnConfig {
                        max_parents: config.max_parents,
                        ..LearnConfig::default()
                    };
                    let outcome = hill_climb(&train, score, prior, &learn)
                        .map_err(|e| e.to_string())
                        .and_then(|(dag, _)| {
                            let fitted =
                                Bn::fit(&dag, &train, config.fit_alpha).map_err(|e| e.to_string())?;
                            let distance = shd(&dag.to_cpdag(), &reference_cpdag)
                                .map_err(|e| e.to_string())?;
                            let loglik =
                                fitted.predictive_loglik(&test).map_err(|e| e.to_string())?;
                            Ok((dag.arc_count(), distance, loglik))
                        });
                    let seconds = if config.timing {
                        started.elapsed().as_secs_f64()
                    } else {
                        0.0
                    };
                    let mut row = ResultRow {
                        network: network_name.to_string(),
                        n_over_p: ratio,
                        replicate,
                        score,
                        prior,
                        shd: None,
                        arcs: None,
                        arcs_ratio: None,
                        loglik: None,
                        seconds,
                        error: None,
                    };
                    match outcome {
                        Ok((arcs, distance, loglik)) => {
                            row.arcs = Some(arcs);
                            row.arcs_ratio = Some(arcs as f64 / reference_arcs as f64);
                            row.shd = Some(distance);
                            row.loglik = Some(loglik);
                        }
                        Err(message) => row.error = Some(message),
                    }
                    row
                })
                .collect()
        })
        .collect();

    rows.into_iter().flatten().collect()
}

/// Mean of a per-replicate metric for one (ratio, strategy) cell; rows with
/// errors are skipped.
pub fn mean_metric(
    rows: &[ResultRow],
    ratio: f64,
    score: ScoreKind,
    prior: PriorKind,
    metric: impl Fn(&ResultRow) -> Option<f64>,
) -> Option<f64> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.n_over_p == ratio && r.score == score && r.prior == prior)
        .filter_map(metric)
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Flat key-value configuration text for the simulate command. Grammar: one
/// `key = value` pair per line, `#` comments; keys `ref`, `ratios`,
/// `replicates`, `test_size`, `seed`, `strategy` (repeatable), `out`,
/// `threads`, `max_parents`, `fit_alpha`, `timing`.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    pub reference: Option<String>,
    pub ratios: Option<Vec<f64>>,
    pub replicates: Option<usize>,
    pub strategies: Vec<String>,
    pub test_set_size: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub max_parents: Option<usize>,
    pub fit_alpha: Option<f64>,
    pub timing: Option<bool>,
}

pub fn parse_config_file(text: &str) -> Result<ConfigFile> {
    let mut config = ConfigFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected `key = value`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let context = || format!("config line {}: bad value for {key}", i + 1);
        match key {
            "ref" => config.reference = Some(value.to_string()),
            "ratios" => {
                let ratios: Result<Vec<f64>, _> =
                    value.split(',').map(|v| v.trim().parse::<f64>()).collect();
                config.ratios = Some(ratios.with_context(context)?);
            }
            "replicates" => config.replicates = Some(value.parse().with_context(context)?),
            "strategy" => config.strategies.push(value.to_string()),
            "test_size" => config.test_set_size = Some(value.parse().with_context(context)?),
            "seed" => config.seed = Some(value.parse().with_context(context)?),
            "out" => config.out = Some(value.to_string()),
            "threads" => config.threads = Some(value.parse().with_context(context)?),
            "max_parents" => config.max_parents = Some(value.parse().with_context(context)?),
            "fit_alpha" => config.fit_alpha = Some(value.parse().with_context(context)?),
            "timing" => config.timing = Some(value.parse().with_context(context)?),
            other => anyhow::bail!("config line {}: unknown key {other:?}", i + 1),
        }
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_grammar() {
        let text = "# comment\nref = networks/synth10.bif\nratios = 0.1, 0.5\nreplicates = 3\nstrategy = bdeu:1+u\nstrategy = bds:1+mu:0.5\nseed = 42\n";
        let config = parse_config_file(text).unwrap();
        assert_eq!(config.reference.as_deref(), Some("networks/synth10.bif"));
        assert_eq!(config.ratios, Some(vec![0.1, 0.5]));
        assert_eq!(config.replicates, Some(3));
        assert_eq!(config.strategies.len(), 2);
        assert_eq!(config.seed, Some(42));
        assert!(parse_config_file("nonsense\n").is_err());
        assert!(parse_config_file("bogus_key = 1\n").is_err());
    }
}
