//! Cluster agreement and cohesion metrics: purity, adjusted Rand index and silhouette.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{euclidean, DataMatrix};
use crate::error::{Error, Result};

/// Joint counts of predicted (rows) against reference (columns) cluster ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    pub n: u64,
}

impl ContingencyTable {
    pub fn new(pred: &[u32], truth: &[u32]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::Validation(format!(
                "label vectors differ in length: {} vs {}",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::Validation("label vectors are empty".into()));
        }
        let rows = dense_ids(pred);
        let cols = dense_ids(truth);
        let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
        for (p, t) in pred.iter().zip(truth) {
            counts[rows[p]][cols[t]] += 1;
        }
        let row_totals = counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals = (0..cols.len())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(ContingencyTable {
            counts,
            row_totals,
            col_totals,
            n: pred.len() as u64,
        })
    }
}

fn dense_ids(labels: &[u32]) -> BTreeMap<u32, usize> {
    let mut ids: BTreeMap<u32, usize> = labels.iter().map(|&l| (l, 0)).collect();
    for (k, v) in ids.values_mut().enumerate() {
        *v = k;
    }
    ids
}

/// Fraction of points that belong to the majority reference cluster of their
/// predicted cluster.
pub fn purity(pred: &[u32], truth: &[u32]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let hits: u64 = table
        .counts
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(hits as f64 / table.n as f64)
}

/// Purity in the opposite direction: each reference cluster contributes its
/// largest overlap with any predicted cluster. Equals `purity(truth, pred)`.
pub fn purity_by_truth(pred: &[u32], truth: &[u32]) -> Result<f64> {
    purity(truth, pred)
}

fn pairs(k: u64) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index. Returns 1.0 when both partitions are trivially
/// identical (index equals its expectation and its maximum).
pub fn adjusted_rand_index(pred: &[u32], truth: &[u32]) -> Result<f64> {
    if pred.len() < 2 {
        return Err(Error::Validation(format!(
            "adjusted Rand index needs at least 2 points, got {}",
            pred.len()
        )));
    }
    let table = ContingencyTable::new(pred, truth)?;
    let index: f64 = table.counts.iter().flatten().map(|&k| pairs(k)).sum();
    let row_pairs: f64 = table.row_totals.iter().map(|&k| pairs(k)).sum();
    let col_pairs: f64 = table.col_totals.iter().map(|&k| pairs(k)).sum();
    let expected = row_pairs * col_pairs / pairs(table.n);
    let max = 0.5 * (row_pairs + col_pairs);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Per-point silhouette values with Euclidean distances. Points in singleton
/// clusters score 0.
pub fn silhouette_samples(data: &DataMatrix, labels: &[u32]) -> Result<Vec<f64>> {
    if labels.len() != data.nrows() {
        return Err(Error::Validation(format!(
            "{} labels for {} rows",
            labels.len(),
            data.nrows()
        )));
    }
    let ids = dense_ids(labels);
    if ids.len() < 2 {
        return Err(Error::MetricUndefined(
            "silhouette needs at least 2 clusters".into(),
        ));
    }
    let dense: Vec<usize> = labels.iter().map(|l| ids[l]).collect();
    let mut sizes = vec![0usize; ids.len()];
    for &d in &dense {
        sizes[d] += 1;
    }
    Ok((0..data.nrows())
        .into_par_iter()
        .map(|i| {
            let own = dense[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; sizes.len()];
            for (j, &cl) in dense.iter().enumerate() {
                if j != i {
                    sums[cl] += euclidean(data.row(i), data.row(j));
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = sums
                .iter()
                .zip(&sizes)
                .enumerate()
                .filter(|&(c, _)| c != own)
                .map(|(_, (s, &k))| s / k as f64)
                .fold(f64::INFINITY, f64::min);
            let scale = a.max(b);
            if scale > 0.0 {
                (b - a) / scale
            } else {
                0.0
            }
        })
        .collect())
}

/// Mean silhouette over all points.
pub fn silhouette(data: &DataMatrix, labels: &[u32]) -> Result<f64> {
    let s = silhouette_samples(data, labels)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}
