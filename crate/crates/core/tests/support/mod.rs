//! Reference implementations shared by the integration tests.

#![allow(dead_code)]

use forestfire::{rng, AffinityGraph, DataMatrix};
use rand::Rng;

/// Literal rescan propagation: after every acceptance the scan restarts at
/// vertex 0 and each candidate's heat is recomputed from scratch over the
/// current cluster members. Degrees and thresholds are recomputed from the
/// raw affinities as well.
#[allow(clippy::needless_range_loop)]
pub fn naive_cluster(graph: &AffinityGraph, c: f64, rng_seed: u64) -> Vec<u32> {
    let n = graph.len();
    let threshold: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = (0..n).map(|j| graph.affinity(i, j)).sum();
            if d > 0.0 {
                1.0 / d
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut labels = vec![0u32; n];
    let mut rng = rng::stream(rng_seed, 0);
    let mut next = 0u32;
    while labels.contains(&0) {
        let remaining = labels.iter().filter(|&&l| l == 0).count();
        let pick = rng.random_range(0..remaining);
        let seed = (0..n).filter(|&i| labels[i] == 0).nth(pick).unwrap();
        next += 1;
        labels[seed] = next;
        'rescan: loop {
            for i in 0..n {
                if labels[i] != 0 {
                    continue;
                }
                let mut total = 0.0;
                let mut count = 0usize;
                for j in 0..n {
                    if labels[j] == next {
                        total += c * graph.affinity(i, j);
                        count += 1;
                    }
                }
                if total / count as f64 >= threshold[i] {
                    labels[i] = next;
                    continue 'rescan;
                }
            }
            break;
        }
    }
    labels
}

/// Points scattered in a few loose groups so that rounds of all sizes occur.
pub fn scattered(n: usize, dims: usize, seed: u64) -> DataMatrix {
    let mut rng = rng::stream(seed, 99);
    let groups = 1 + n / 25;
    let centers: Vec<Vec<f64>> = (0..groups)
        .map(|_| (0..dims).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let mut values = Vec::with_capacity(n * dims);
    for i in 0..n {
        let center = &centers[i % groups];
        for &x in center {
            values.push(x + rng.random_range(-0.8..0.8));
        }
    }
    DataMatrix::new(values, n, dims).unwrap()
}

/// Mean of `c · a(v, u)` over the members `u` of `cluster` (recomputed, not incremental).
pub fn heat_from(graph: &AffinityGraph, labels: &[u32], cluster: u32, v: usize, c: f64) -> f64 {
    let members: Vec<usize> = (0..labels.len())
        .filter(|&u| labels[u] == cluster)
        .collect();
    members
        .iter()
        .map(|&u| c * graph.affinity(v, u))
        .sum::<f64>()
        / members.len() as f64
}
