//! Monte Carlo internal validation.
//!
//! Each trial clears all labels, ignites one uniformly chosen vertex with its
//! original label and lets that single fire burn out. The labels collected
//! at each vertex across trials form its posterior label distribution, from
//! which a significance value and a Shannon entropy are derived.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::affinity::AffinityGraph;
use crate::error::{Error, Result};
use crate::fire::{check_temperature, spread, ClusterResult, UNLABELED};
use crate::rng;

pub const DEFAULT_TRIALS: u32 = 300;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Per-vertex validation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValidation {
    /// Original cluster label.
    pub label: u32,
    /// Trial count per received label.
    pub posterior_counts: BTreeMap<u32, u32>,
    /// Trials in which the vertex received any label.
    pub coverage: u32,
    /// Fraction of all trials in which the vertex did not receive its
    /// original label; unreached trials count as mismatches.
    pub p_value: f64,
    /// `1 - P(original label)` under the posterior distribution, i.e. over
    /// covering trials only. `1.0` when the vertex was never reached.
    pub posterior_p_value: f64,
    /// Shannon entropy (nats) of the posterior distribution; `ln(k)` when
    /// the vertex was never reached.
    pub entropy: f64,
}

impl PointValidation {
    pub fn is_covered(&self) -> bool {
        self.coverage > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points: Vec<PointValidation>,
    pub trials: u32,
    pub num_clusters: u32,
    /// Significance cutoff used by [`ValidationReport::significant`].
    pub alpha: f64,
}

impl ValidationReport {
    pub fn p_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p_value).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.entropy).collect()
    }

    pub fn significant(&self) -> Vec<bool> {
        significant_mask(self, self.alpha)
    }
}

/// `p_value <= alpha` per vertex.
pub fn significant_mask(report: &ValidationReport, alpha: f64) -> Vec<bool> {
    report.points.iter().map(|p| p.p_value <= alpha).collect()
}

/// `posterior_p_value <= alpha` per vertex: significance among the trials
/// that reached the vertex at all.
pub fn posterior_significant_mask(report: &ValidationReport, alpha: f64) -> Vec<bool> {
    report
        .points
        .iter()
        .map(|p| p.posterior_p_value <= alpha)
        .collect()
}

/// Validates a clustering produced by [`crate::fire::cluster`] with its own fire temperature.
pub fn validate(
    graph: &AffinityGraph,
    original: &ClusterResult,
    trials: u32,
    rng_seed: u64,
) -> Result<ValidationReport> {
    validate_labels(graph, &original.labels, original.params.c, trials, rng_seed)
}

/// Runs `trials` single-seed re-propagations of `labels` over `graph`.
///
/// Trial `t` draws from its own stream keyed by `(rng_seed, t)`, so the
/// report does not depend on how trials are scheduled across threads.
pub fn validate_labels(
    graph: &AffinityGraph,
    labels: &[u32],
    c: f64,
    trials: u32,
    rng_seed: u64,
) -> Result<ValidationReport> {
    check_temperature(c)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let n = graph.len();
    if labels.len() != n {
        return Err(Error::Validation(format!(
            "{} labels for a graph of {n} vertices",
            labels.len()
        )));
    }
    if let Some(i) = labels.iter().position(|&l| l == UNLABELED) {
        return Err(Error::Validation(format!("vertex {i} is unlabeled")));
    }

    let outcomes: Vec<(u32, Vec<usize>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(rng_seed, u64::from(t));
            let seed = rng.random_range(0..n);
            let label = labels[seed];
            let mut state = vec![UNLABELED; n];
            let mut reached = vec![seed];
            spread(graph, &mut state, seed, label, c, |v, _| reached.push(v));
            (label, reached)
        })
        .collect();

    let mut counts: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
    for (label, reached) in &outcomes {
        for &v in reached {
            *counts[v].entry(*label).or_insert(0) += 1;
        }
    }

    let num_clusters = labels.iter().copied().max().unwrap_or(0);
    let max_entropy = f64::from(num_clusters.max(1)).ln();
    let points = counts
        .into_iter()
        .zip(labels)
        .map(|(posterior_counts, &label)| summarize(label, posterior_counts, trials, max_entropy))
        .collect();

    Ok(ValidationReport {
        points,
        trials,
        num_clusters,
        alpha: DEFAULT_ALPHA,
    })
}

fn summarize(
    label: u32,
    posterior_counts: BTreeMap<u32, u32>,
    trials: u32,
    max_entropy: f64,
) -> PointValidation {
    let coverage: u32 = posterior_counts.values().sum();
    let hits = f64::from(posterior_counts.get(&label).copied().unwrap_or(0));
    let (posterior_p_value, entropy) = if coverage == 0 {
        (1.0, max_entropy)
    } else {
        let cov = f64::from(coverage);
        (
            1.0 - hits / cov,
            entropy(posterior_counts.values().copied(), cov),
        )
    };
    PointValidation {
        label,
        coverage,
        p_value: 1.0 - hits / f64::from(trials),
        posterior_p_value,
        entropy,
        posterior_counts,
    }
}

fn entropy(counts: impl Iterator<Item = u32>, total: f64) -> f64 {
    let h: f64 = counts
        .filter(|&k| k > 0)
        .map(|k| {
            let p = f64::from(k) / total;
            -p * p.ln()
        })
        .sum();
    // a single outcome gives -1·ln 1 = -0.0
    h.max(0.0)
}
