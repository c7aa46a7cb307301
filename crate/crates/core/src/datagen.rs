//! Synthetic datasets: Gaussian mixtures around a circle, train/test splits
//! with held-out components, and heterotypic doublets.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Equal-weight isotropic 2-D Gaussian mixture with centers evenly spaced on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    pub n: usize,
    pub k: usize,
    pub sigma: f64,
    pub radius: f64,
    pub seed: u64,
}

impl MixtureSpec {
    /// Unit-circle mixture.
    pub fn new(n: usize, k: usize, sigma: f64, seed: u64) -> Self {
        MixtureSpec {
            n,
            k,
            sigma,
            radius: 1.0,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::param("k", "need at least one component"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(
                "sigma",
                format!("must be positive, got {}", self.sigma),
            ));
        }
        if !self.radius.is_finite() {
            return Err(Error::param("radius", "must be finite"));
        }
        Ok(())
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        circle_centers(self.k, self.radius)
    }
}

/// `k` points at angles `2πj/k` on a circle.
pub fn circle_centers(k: usize, radius: f64) -> Vec<[f64; 2]> {
    (0..k)
        .map(|j| {
            let theta = TAU * j as f64 / k as f64;
            [radius * theta.cos(), radius * theta.sin()]
        })
        .collect()
}

/// A dataset with ground-truth component labels (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled {
    pub data: DataMatrix,
    pub labels: Vec<u32>,
}

/// Samples `spec.n` points; component `j` gets label `j + 1`.
pub fn gaussian_circle(spec: &MixtureSpec) -> Result<Labeled> {
    spec.check()?;
    sample_mixture(&spec.centers(), spec.n, spec.sigma, spec.seed)
}

/// Samples an equal-weight mixture around arbitrary 2-D centers. Component
/// sizes differ by at most one and points come out in shuffled order.
pub fn sample_mixture(centers: &[[f64; 2]], n: usize, sigma: f64, seed: u64) -> Result<Labeled> {
    if centers.is_empty() {
        return Err(Error::param("k", "need at least one component"));
    }
    let k = centers.len();
    let mut labels: Vec<u32> = (0..k)
        .flat_map(|j| std::iter::repeat_n(j as u32 + 1, n / k + usize::from(j < n % k)))
        .collect();
    labels.shuffle(&mut rng::stream(seed, 0));

    let noise = Normal::new(0.0, sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut draw = rng::stream(seed, 1);
    let mut values = Vec::with_capacity(2 * n);
    for &l in &labels {
        let [cx, cy] = centers[l as usize - 1];
        values.push(cx + noise.sample(&mut draw));
        values.push(cy + noise.sample(&mut draw));
    }
    Ok(Labeled {
        data: DataMatrix::with_shape(values, n, 2)?,
        labels,
    })
}

/// Training set from `train`, test set from a mixture whose first
/// `train.k` components sit on the training centers (same labels) and whose
/// remaining `test.k - train.k` components are novel, placed on the
/// `test.k`-gon vertices farthest from any training center.
pub fn holdout_split(train: &MixtureSpec, test: &MixtureSpec) -> Result<(Labeled, Labeled)> {
    train.check()?;
    test.check()?;
    if test.k < train.k {
        return Err(Error::param(
            "k",
            format!(
                "test components ({}) fewer than training ({})",
                test.k, train.k
            ),
        ));
    }
    if test.radius != train.radius {
        return Err(Error::param(
            "radius",
            "train and test must share the radius",
        ));
    }
    let known = train.centers();
    let ring = circle_centers(test.k, test.radius);
    let gap = |c: &[f64; 2]| {
        known
            .iter()
            .map(|t| (c[0] - t[0]).hypot(c[1] - t[1]))
            .fold(f64::INFINITY, f64::min)
    };
    let mut order: Vec<usize> = (0..ring.len()).collect();
    order.sort_by(|&a, &b| gap(&ring[b]).total_cmp(&gap(&ring[a])));
    let mut novel: Vec<usize> = order[..test.k - train.k].to_vec();
    novel.sort_unstable();

    let mut centers = known;
    centers.extend(novel.iter().map(|&i| ring[i]));
    Ok((
        gaussian_circle(train)?,
        sample_mixture(&centers, test.n, test.sigma, test.seed)?,
    ))
}

/// Dataset after doublet synthesis: surviving singlets in original order,
/// followed by the synthetic rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Doublets {
    pub data: DataMatrix,
    /// True for synthetic rows.
    pub flags: Vec<bool>,
    /// Original label for singlets, 0 for doublets.
    pub labels: Vec<u32>,
    /// Source row indices (into the input) of each synthetic row.
    pub parents: Vec<(usize, usize)>,
}

/// Replaces `2·count` rows by `count` rows, each the elementwise sum of two
/// rows drawn without replacement from different clusters.
pub fn make_doublets(
    data: &DataMatrix,
    labels: &[u32],
    count: usize,
    seed: u64,
) -> Result<Doublets> {
    let n = data.nrows();
    if labels.len() != n {
        return Err(Error::Validation(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    if 2 * count > n {
        return Err(Error::param(
            "count",
            format!("{count} doublets need {} rows, have {n}", 2 * count),
        ));
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if count > 0 && distinct.len() < 2 {
        return Err(Error::param(
            "labels",
            "doublets need at least two clusters",
        ));
    }

    let mut rng = rng::stream(seed, 0);
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(&mut rng);
    let mut used = vec![false; n];
    let mut parents = Vec::with_capacity(count);
    for _ in 0..count {
        let a = pool.pop().expect("pool holds at least 2·count rows");
        let partners: Vec<usize> = pool
            .iter()
            .enumerate()
            .filter(|&(_, &b)| labels[b] != labels[a])
            .map(|(pos, _)| pos)
            .collect();
        if partners.is_empty() {
            return Err(Error::param(
                "count",
                "not enough rows from distinct clusters left to pair",
            ));
        }
        let b = pool.swap_remove(partners[rng.random_range(0..partners.len())]);
        used[a] = true;
        used[b] = true;
        parents.push((a, b));
    }

    let m = data.ncols();
    let rows = n - count;
    let mut values = Vec::with_capacity(rows * m);
    let mut out_labels = Vec::with_capacity(rows);
    for i in (0..n).filter(|&i| !used[i]) {
        values.extend_from_slice(data.row(i));
        out_labels.push(labels[i]);
    }
    for &(a, b) in &parents {
        values.extend(data.row(a).iter().zip(data.row(b)).map(|(x, y)| x + y));
        out_labels.push(0);
    }
    let mut flags = vec![false; rows - count];
    flags.resize(rows, true);
    Ok(Doublets {
        data: DataMatrix::with_shape(values, rows, m)?,
        flags,
        labels: out_labels,
        parents,
    })
}
