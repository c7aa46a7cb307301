//! Data graph construction: pairwise distances, kernel affinities, weighted
//! degrees and label-acceptance thresholds.
//!
//! All matrices are dense and row-major. Rows are computed in parallel, but
//! every entry is evaluated by the same expression in the same order as a
//! sequential pass, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::data::{euclidean, DataMatrix};
use crate::error::{Error, Result};

/// Symmetric `n × n` matrix of Euclidean distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Vec<f64>,
    n: usize,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Kernel used to turn distances into affinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-d² / (2σ²))`.
    Gaussian { sigma: f64 },
    /// Symmetrised alpha-decay kernel with a per-point bandwidth equal to the
    /// distance to the `k`-th nearest neighbour.
    Adaptive { k: usize, alpha: f64 },
}

impl KernelSpec {
    /// Checks the kernel parameters against a dataset of `n` points.
    pub fn check(&self, n: usize) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::param(
                        "sigma",
                        format!("must be positive, got {sigma}"),
                    ));
                }
            }
            KernelSpec::Adaptive { k, alpha } => {
                if k < 1 || k >= n {
                    return Err(Error::param(
                        "k",
                        format!("must satisfy 1 <= k < n = {n}, got {k}"),
                    ));
                }
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::param(
                        "alpha",
                        format!("must be positive, got {alpha}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Builds the affinity graph of `data` under this kernel.
    pub fn build(&self, data: &DataMatrix) -> Result<AffinityGraph> {
        self.check(data.nrows())?;
        let distances = pairwise_distances(data);
        let mut graph = match *self {
            KernelSpec::Gaussian { sigma } => gaussian_affinity(&distances, sigma)?,
            KernelSpec::Adaptive { k, alpha } => adaptive_from_distances(&distances, k, alpha)?,
        };
        graph.kernel = Some(*self);
        Ok(graph)
    }
}

/// Complete weighted graph over the data points.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    affinities: Vec<f64>,
    degrees: Vec<f64>,
    thresholds: Vec<f64>,
    degenerate_bandwidth: Vec<bool>,
    n: usize,
    kernel: Option<KernelSpec>,
}

impl AffinityGraph {
    /// Wraps a precomputed row-major affinity matrix.
    ///
    /// The matrix must be exactly symmetric with entries in `[0, 1]` and a
    /// zero diagonal.
    pub fn from_affinities(n: usize, affinities: Vec<f64>) -> Result<Self> {
        if affinities.len() != n * n {
            return Err(Error::Validation(format!(
                "affinity matrix for {n} vertices needs {} entries, got {}",
                n * n,
                affinities.len()
            )));
        }
        for i in 0..n {
            if affinities[i * n + i] != 0.0 {
                return Err(Error::Validation(format!(
                    "affinity diagonal at {i} is not zero"
                )));
            }
            for j in (i + 1)..n {
                let a = affinities[i * n + j];
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::Validation(format!(
                        "affinity ({i}, {j}) = {a} is outside [0, 1]"
                    )));
                }
                if a.to_bits() != affinities[j * n + i].to_bits() {
                    return Err(Error::Validation(format!(
                        "affinity matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::assemble(n, affinities, vec![false; n]))
    }

    fn assemble(n: usize, affinities: Vec<f64>, degenerate_bandwidth: Vec<bool>) -> Self {
        let degrees: Vec<f64> = affinities
            .par_chunks(n.max(1))
            .map(|row| row.iter().sum())
            .collect();
        let thresholds = thresholds(&degrees);
        AffinityGraph {
            affinities,
            degrees,
            thresholds,
            degenerate_bandwidth,
            n,
            kernel: None,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn affinity(&self, i: usize, j: usize) -> f64 {
        self.affinities[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.affinities[i * self.n..(i + 1) * self.n]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// A vertex with zero weighted degree can never accept a label.
    pub fn is_isolated(&self, i: usize) -> bool {
        self.degrees[i] == 0.0
    }

    /// Vertices whose adaptive bandwidth could not be resolved because every
    /// other point coincides with them.
    pub fn degenerate_bandwidth(&self) -> &[bool] {
        &self.degenerate_bandwidth
    }

    pub fn kernel(&self) -> Option<KernelSpec> {
        self.kernel
    }
}

/// Euclidean distance between every pair of rows.
pub fn pairwise_distances(data: &DataMatrix) -> DistanceMatrix {
    let n = data.nrows();
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        let ri = data.row(i);
        for (j, slot) in out.iter_mut().enumerate() {
            if j != i {
                *slot = euclidean(ri, data.row(j));
            }
        }
    });
    DistanceMatrix { values, n }
}

/// Gaussian kernel affinities `exp(-d² / (2σ²))` with a zero diagonal.
pub fn gaussian_affinity(distances: &DistanceMatrix, sigma: f64) -> Result<AffinityGraph> {
    KernelSpec::Gaussian { sigma }.check(distances.n)?;
    let n = distances.n;
    let denom = 2.0 * sigma * sigma;
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        for (j, slot) in out.iter_mut().enumerate() {
            if j != i {
                let d = distances.get(i, j);
                *slot = (-(d * d) / denom).exp();
            }
        }
    });
    let mut graph = AffinityGraph::assemble(n, values, vec![false; n]);
    graph.kernel = Some(KernelSpec::Gaussian { sigma });
    Ok(graph)
}

/// Adaptive k-nearest-neighbour kernel:
/// `½·exp(-(d/ε(i))^α) + ½·exp(-(d/ε(j))^α)` where `ε(x)` is the distance
/// from `x` to its `k`-th nearest neighbour.
pub fn adaptive_affinity(data: &DataMatrix, k: usize, alpha: f64) -> Result<AffinityGraph> {
    KernelSpec::Adaptive { k, alpha }.build(data)
}

fn adaptive_from_distances(
    distances: &DistanceMatrix,
    k: usize,
    alpha: f64,
) -> Result<AffinityGraph> {
    let n = distances.n;
    KernelSpec::Adaptive { k, alpha }.check(n)?;
    let bandwidths: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| knn_bandwidth(distances.row(i), i, k))
        .collect();
    let degenerate: Vec<bool> = bandwidths.iter().map(|&e| e == 0.0).collect();

    let term = |d: f64, eps: f64| -> f64 {
        if d == 0.0 {
            1.0
        } else if eps == 0.0 {
            0.0
        } else {
            (-(d / eps).powf(alpha)).exp()
        }
    };

    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        for (j, slot) in out.iter_mut().enumerate() {
            if j != i {
                let d = distances.get(i, j);
                *slot = 0.5 * term(d, bandwidths[i]) + 0.5 * term(d, bandwidths[j]);
            }
        }
    });
    let mut graph = AffinityGraph::assemble(n, values, degenerate);
    graph.kernel = Some(KernelSpec::Adaptive { k, alpha });
    Ok(graph)
}

/// Distance to the `k`-th nearest other point; falls back to the smallest
/// positive distance when that is zero, and returns 0 only if every other
/// point coincides with `self_index`.
pub(crate) fn knn_bandwidth(row: &[f64], self_index: usize, k: usize) -> f64 {
    let mut others: Vec<f64> = row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != self_index)
        .map(|(_, &d)| d)
        .collect();
    let kth = k.min(others.len()) - 1;
    let (_, eps, _) = others.select_nth_unstable_by(kth, f64::total_cmp);
    let eps = *eps;
    if eps > 0.0 {
        return eps;
    }
    let smallest = others
        .iter()
        .copied()
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if smallest.is_finite() {
        smallest
    } else {
        0.0
    }
}

/// Reciprocal degrees; a zero degree maps to `+∞`.
pub fn thresholds(degrees: &[f64]) -> Vec<f64> {
    degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { f64::INFINITY })
        .collect()
}
