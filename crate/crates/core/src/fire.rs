//! Label propagation ("forest fire") clustering.
//!
//! A seed vertex ignites a new label; every unlabeled vertex whose average
//! heat from the burning cluster reaches its acceptance threshold catches
//! fire, and the scan restarts from the lowest index after each acceptance.
//! When no unlabeled vertex can be ignited the round stops and a new seed is
//! drawn, until every vertex carries a label.

use rand::Rng;

use crate::affinity::{AffinityGraph, KernelSpec};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Label value of a vertex that has not been assigned to a cluster.
pub const UNLABELED: u32 = 0;

/// Fire temperature and the seed for seed-vertex selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireParams {
    pub c: f64,
    pub rng_seed: u64,
}

impl FireParams {
    pub fn new(c: f64, rng_seed: u64) -> Result<Self> {
        check_temperature(c)?;
        Ok(FireParams { c, rng_seed })
    }
}

pub(crate) fn check_temperature(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "c",
            format!("fire temperature must be positive, got {c}"),
        ))
    }
}

/// One labeling event. Seeds carry `heat = +∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub step: usize,
    pub vertex: usize,
    pub cluster: u32,
    pub heat: f64,
}

impl TraceEntry {
    pub fn is_seed(&self) -> bool {
        self.heat == f64::INFINITY
    }
}

/// Heat-over-time log: the heat each vertex received at the moment it was labeled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeatTrace {
    entries: Vec<TraceEntry>,
}

impl HeatTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn record(&mut self, vertex: usize, cluster: u32, heat: f64) {
        let step = self.entries.len();
        self.entries.push(TraceEntry {
            step,
            vertex,
            cluster,
            heat,
        });
    }

    /// Seed vertices in ignition order.
    pub fn seeds(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .filter(|e| e.is_seed())
            .map(|e| e.vertex)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<u32>,
    pub trace: HeatTrace,
    pub num_clusters: u32,
    pub params: FireParams,
    pub kernel: Option<KernelSpec>,
}

/// `c` times the mean affinity between `vertex` and the members of `cluster`.
pub fn average_heat(
    graph: &AffinityGraph,
    labels: &[u32],
    cluster: u32,
    vertex: usize,
    c: f64,
) -> Result<f64> {
    if labels.len() != graph.len() {
        return Err(Error::Contract(format!(
            "{} labels for a graph of {} vertices",
            labels.len(),
            graph.len()
        )));
    }
    if vertex >= graph.len() {
        return Err(Error::Contract(format!("vertex {vertex} out of range")));
    }
    if labels[vertex] != UNLABELED {
        return Err(Error::Contract(format!(
            "vertex {vertex} is already labeled"
        )));
    }
    let row = graph.row(vertex);
    let (sum, count) = labels
        .iter()
        .zip(row)
        .filter(|(&l, _)| l == cluster)
        .fold((0.0, 0usize), |(s, k), (_, &a)| (s + a, k + 1));
    if count == 0 {
        return Err(Error::Contract(format!("cluster {cluster} has no members")));
    }
    Ok(c * sum / count as f64)
}

/// Burns one cluster outward from `seed`, calling `on_accept(vertex, heat)`
/// for every vertex that catches fire (the seed is not reported).
///
/// Keeps a running affinity sum from every vertex to the burning cluster, so
/// each acceptance costs one O(n) update plus one O(n) scan for the lowest
/// ignitable index.
pub(crate) fn spread(
    graph: &AffinityGraph,
    labels: &mut [u32],
    seed: usize,
    cluster: u32,
    c: f64,
    mut on_accept: impl FnMut(usize, f64),
) {
    let thresholds = graph.thresholds();
    labels[seed] = cluster;
    let mut sums = graph.row(seed).to_vec();
    let mut members = 1usize;
    loop {
        let size = members as f64;
        let ignited = labels
            .iter()
            .zip(&sums)
            .zip(thresholds)
            .enumerate()
            .find_map(|(i, ((&l, &s), &t))| {
                if l != UNLABELED {
                    return None;
                }
                let heat = c * s / size;
                (heat >= t).then_some((i, heat))
            });
        let Some((v, heat)) = ignited else {
            break;
        };
        labels[v] = cluster;
        members += 1;
        for (s, &a) in sums.iter_mut().zip(graph.row(v)) {
            *s += a;
        }
        on_accept(v, heat);
    }
}

/// Runs one label-propagation round from `seed_vertex` with label `cluster`.
///
/// On return no unlabeled vertex has average heat from `cluster` at or above
/// its threshold.
pub fn propagate(
    graph: &AffinityGraph,
    labels: &mut [u32],
    seed_vertex: usize,
    cluster: u32,
    c: f64,
    trace: &mut HeatTrace,
) -> Result<()> {
    check_temperature(c)?;
    if labels.len() != graph.len() {
        return Err(Error::Contract(format!(
            "{} labels for a graph of {} vertices",
            labels.len(),
            graph.len()
        )));
    }
    if seed_vertex >= labels.len() || labels[seed_vertex] != UNLABELED {
        return Err(Error::Contract(format!(
            "seed vertex {seed_vertex} is out of range or already labeled"
        )));
    }
    if cluster == UNLABELED || labels.contains(&cluster) {
        return Err(Error::Contract(format!("cluster id {cluster} is not free")));
    }
    trace.record(seed_vertex, cluster, f64::INFINITY);
    spread(graph, labels, seed_vertex, cluster, c, |v, heat| {
        trace.record(v, cluster, heat)
    });
    Ok(())
}

/// Clusters every vertex of `graph`, drawing seeds uniformly from the
/// unlabeled vertices with the generator keyed by `params.rng_seed`.
pub fn cluster(graph: &AffinityGraph, params: FireParams) -> Result<ClusterResult> {
    check_temperature(params.c)?;
    let n = graph.len();
    let mut rng = rng::stream(params.rng_seed, 0);
    let (labels, trace) = run_rounds(graph, params.c, |labels, remaining| {
        let pick = rng.random_range(0..remaining);
        Ok(labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == UNLABELED)
            .nth(pick)
            .map(|(i, _)| i)
            .expect("remaining counts unlabeled vertices"))
    })?;
    debug_assert_eq!(trace.len(), n);
    let num_clusters = labels.iter().copied().max().unwrap_or(0);
    Ok(ClusterResult {
        labels,
        trace,
        num_clusters,
        params,
        kernel: graph.kernel(),
    })
}

/// Clusters with an explicit seed sequence instead of random draws. Each
/// seed must still be unlabeled when its round starts, and the sequence must
/// be long enough to label every vertex.
pub fn cluster_from_seeds(
    graph: &AffinityGraph,
    c: f64,
    seeds: &[usize],
) -> Result<(Vec<u32>, HeatTrace)> {
    check_temperature(c)?;
    let mut next = seeds.iter();
    run_rounds(graph, c, |labels, _| {
        let &s = next
            .next()
            .ok_or_else(|| Error::Contract("seed sequence exhausted".into()))?;
        match labels.get(s) {
            Some(&UNLABELED) => Ok(s),
            Some(_) => Err(Error::Contract(format!("seed {s} is already labeled"))),
            None => Err(Error::Contract(format!("seed {s} out of range"))),
        }
    })
}

fn run_rounds(
    graph: &AffinityGraph,
    c: f64,
    mut choose_seed: impl FnMut(&[u32], usize) -> Result<usize>,
) -> Result<(Vec<u32>, HeatTrace)> {
    let n = graph.len();
    let mut labels = vec![UNLABELED; n];
    let mut trace = HeatTrace::new();
    let mut remaining = n;
    let mut cluster = 0u32;
    while remaining > 0 {
        let seed = choose_seed(&labels, remaining)?;
        cluster += 1;
        trace.record(seed, cluster, f64::INFINITY);
        let mut accepted = 1;
        spread(graph, &mut labels, seed, cluster, c, |v, heat| {
            trace.record(v, cluster, heat);
            accepted += 1;
        });
        remaining -= accepted;
    }
    Ok((labels, trace))
}

/// Labels assigned to streamed points by [`online_assign`].
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineAssignment {
    pub labels: Vec<u32>,
    /// True where the label is a cluster id that did not exist in training.
    pub novel: Vec<bool>,
    /// Smallest id handed to a newly opened cluster.
    pub first_new_id: u32,
}

/// Extends a fitted clustering to new points without revising training labels.
///
/// Points are visited in input order. A point still unlabeled when visited
/// compares the heat from every existing cluster against a threshold derived
/// from its weighted degree to the points seen before it, and takes the
/// hottest cluster that crosses it (lowest id on ties). If none crosses, it
/// ignites a fresh cluster that propagates over the remaining unvisited
/// points, whose thresholds come from the full combined graph.
pub fn online_assign(
    train: &DataMatrix,
    train_labels: &[u32],
    new_points: &DataMatrix,
    kernel: KernelSpec,
    c: f64,
) -> Result<OnlineAssignment> {
    check_temperature(c)?;
    if train.ncols() != new_points.ncols() {
        return Err(Error::Validation(format!(
            "feature count mismatch: training data has {}, new data has {}",
            train.ncols(),
            new_points.ncols()
        )));
    }
    if train_labels.len() != train.nrows() {
        return Err(Error::Validation(format!(
            "{} training labels for {} training rows",
            train_labels.len(),
            train.nrows()
        )));
    }
    if let Some(i) = train_labels.iter().position(|&l| l == UNLABELED) {
        return Err(Error::Validation(format!(
            "training point {i} is unlabeled"
        )));
    }

    let n_train = train.nrows();
    let combined = train.vstack(new_points)?;
    let graph = kernel.build(&combined)?;
    let mut labels = train_labels.to_vec();
    labels.resize(combined.nrows(), UNLABELED);

    let first_new_id = train_labels.iter().copied().max().unwrap_or(0) + 1;
    let mut next_id = first_new_id;
    let mut trace = HeatTrace::new();
    let mut cluster_sums: Vec<(f64, usize)> = Vec::new();

    for p in n_train..combined.nrows() {
        if labels[p] != UNLABELED {
            continue;
        }
        cluster_sums.clear();
        cluster_sums.resize(next_id as usize, (0.0, 0));
        let mut degree = 0.0;
        // only points seen before p: training data plus earlier stream items
        for (&l, &a) in labels[..p].iter().zip(graph.row(p)) {
            if l != UNLABELED {
                degree += a;
                let slot = &mut cluster_sums[l as usize];
                slot.0 += a;
                slot.1 += 1;
            }
        }
        let threshold = if degree > 0.0 {
            1.0 / degree
        } else {
            f64::INFINITY
        };
        let mut best: Option<(u32, f64)> = None;
        for (id, &(sum, count)) in cluster_sums.iter().enumerate().skip(1) {
            if count == 0 {
                continue;
            }
            let heat = c * sum / count as f64;
            if best.is_none_or(|(_, h)| heat > h) {
                best = Some((id as u32, heat));
            }
        }
        match best {
            Some((id, heat)) if heat >= threshold => labels[p] = id,
            _ => {
                propagate(&graph, &mut labels, p, next_id, c, &mut trace)?;
                next_id += 1;
            }
        }
    }

    let labels = labels.split_off(n_train);
    let novel = labels.iter().map(|&l| l >= first_new_id).collect();
    Ok(OnlineAssignment {
        labels,
        novel,
        first_new_id,
    })
}
