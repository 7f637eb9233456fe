//! Markov Clustering over the per-timepoint token graphs.
//!
//! The iteration is the standard expansion / inflation scheme on a
//! column-stochastic matrix: expansion raises the matrix to a power
//! (random-walk composition), inflation raises entries to a power and
//! renormalizes, small entries are pruned for stability. Flow concentrates on
//! attractors; nodes sharing an attractor system form a cluster.
//!
//! Matrices are dense column-major; the corpora this targets stay in the
//! hundreds of nodes per timepoint.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gow::TemporalGraph;

/// Knobs of the MCL iteration. Every parameter is validated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MclParams {
    /// Matrix power applied at the expansion step.
    pub expansion: u32,
    /// Entrywise power applied at the inflation step; higher values give
    /// more, tighter clusters.
    pub inflation: f64,
    /// Weight of the self-loop added to every node before normalization.
    pub self_loop_weight: f64,
    /// Entries below this value are zeroed after inflation.
    pub prune_threshold: f64,
    /// Convergence threshold on the max absolute entry change per iteration.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for MclParams {
    fn default() -> Self {
        MclParams {
            expansion: 2,
            inflation: 2.0,
            self_loop_weight: 1.0,
            prune_threshold: 1e-5,
            tolerance: 1e-6,
            max_iterations: 100,
        }
    }
}

impl MclParams {
    pub fn validate(&self) -> Result<()> {
        if self.expansion < 2 {
            return Err(Error::InvalidConfig(format!(
                "mcl.expansion must be >= 2, got {}",
                self.expansion
            )));
        }
        if !(self.inflation > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mcl.inflation must be > 1, got {}",
                self.inflation
            )));
        }
        if !(self.self_loop_weight >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mcl.self_loop_weight must be >= 0, got {}",
                self.self_loop_weight
            )));
        }
        if !(self.prune_threshold >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mcl.prune_threshold must be >= 0, got {}",
                self.prune_threshold
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mcl.tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "mcl.max_iterations must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Dense column-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ColumnMatrix {
    pub fn zeros(n: usize) -> Self {
        ColumnMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.n + row] = value;
    }

    fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.n..(col + 1) * self.n]
    }

    /// Adjacency matrix of an undirected graph plus uniform self-loops,
    /// indexed by the graph's (sorted) node order.
    pub fn from_graph(graph: &TemporalGraph, self_loop_weight: f64) -> Result<Self> {
        let index: BTreeMap<&str, usize> = graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let mut m = ColumnMatrix::zeros(graph.nodes.len());
        for (u, v, w) in &graph.edges {
            if !(*w > 0.0) {
                return Err(Error::InvalidArtifact {
                    path: format!("graph timepoint {}", graph.timepoint_index),
                    reason: format!("edge ({u}, {v}) has non-positive weight {w}"),
                });
            }
            let (i, j) = match (index.get(u.as_str()), index.get(v.as_str())) {
                (Some(&i), Some(&j)) => (i, j),
                _ => {
                    return Err(Error::InvalidArtifact {
                        path: format!("graph timepoint {}", graph.timepoint_index),
                        reason: format!("edge ({u}, {v}) references unknown node"),
                    })
                }
            };
            m.set(i, j, *w);
            m.set(j, i, *w);
        }
        for i in 0..m.n {
            let v = m.get(i, i) + self_loop_weight;
            m.set(i, i, v);
        }
        Ok(m)
    }

    /// `self * rhs`, skipping zero entries of `rhs`.
    fn multiply(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = ColumnMatrix::zeros(n);
        for j in 0..n {
            let rhs_col = rhs.column(j);
            let out_col = out.column_mut(j);
            for (k, &v) in rhs_col.iter().enumerate() {
                if v != 0.0 {
                    let self_col = self.column(k);
                    for i in 0..n {
                        out_col[i] += v * self_col[i];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.column(j).iter().sum()).collect()
    }
}

/// Scale every column to sum 1. Fails on an all-zero column (an isolated
/// node with `self_loop_weight = 0`).
pub fn normalize_columns(matrix: &mut ColumnMatrix) -> Result<()> {
    for j in 0..matrix.size() {
        let sum: f64 = matrix.column(j).iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        for v in matrix.column_mut(j) {
            *v /= sum;
        }
    }
    Ok(())
}

/// One expand -> inflate -> prune -> renormalize step.
pub fn mcl_step(matrix: &ColumnMatrix, params: &MclParams) -> Result<ColumnMatrix> {
    // Expansion: matrix power.
    let mut expanded = matrix.clone();
    for _ in 1..params.expansion {
        expanded = expanded.multiply(matrix);
    }
    // Inflation: entrywise power, then renormalize.
    for v in &mut expanded.data {
        if *v != 0.0 {
            *v = v.powf(params.inflation);
        }
    }
    normalize_columns(&mut expanded)?;
    // Prune small entries, then restore stochasticity.
    for v in &mut expanded.data {
        if *v < params.prune_threshold {
            *v = 0.0;
        }
    }
    normalize_columns(&mut expanded)?;
    Ok(expanded)
}

/// Result of the MCL fixpoint iteration.
#[derive(Debug, Clone)]
pub struct MclOutcome {
    pub matrix: ColumnMatrix,
    pub converged: bool,
    pub iterations: u32,
}

/// Iterate [`mcl_step`] until the max absolute entry change drops below
/// `tolerance` or `max_iterations` is hit. Non-convergence is not an error;
/// the outcome carries a flag and the caller may still extract clusters.
pub fn mcl_iterate(matrix: ColumnMatrix, params: &MclParams) -> Result<MclOutcome> {
    params.validate()?;
    let mut current = matrix;
    for iteration in 1..=params.max_iterations {
        let next = mcl_step(&current, params)?;
        let delta = next.max_abs_diff(&current);
        current = next;
        if delta < params.tolerance {
            return Ok(MclOutcome {
                matrix: current,
                converged: true,
                iterations: iteration,
            });
        }
    }
    log::warn!(
        "mcl did not converge within {} iterations",
        params.max_iterations
    );
    Ok(MclOutcome {
        matrix: current,
        converged: false,
        iterations: params.max_iterations,
    })
}

/// One labeled token cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: String,
    pub tokens: BTreeSet<String>,
}

impl Cluster {
    pub fn intersection_size(&self, other: &Cluster) -> usize {
        self.tokens.intersection(&other.tokens).count()
    }
}

/// The clusters of one timepoint: pairwise disjoint, covering all graph nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSet {
    #[serde(rename = "timepoint")]
    pub timepoint_index: usize,
    pub clusters: Vec<Cluster>,
}

impl ClusterSet {
    /// Build a cluster set from disjoint token sets: sorts by size descending
    /// then smallest token, and assigns ids per the timepoint letter scheme
    /// ("A00", "A01", ... at timepoint 0; "B00", ... at timepoint 1).
    pub fn from_partition(timepoint_index: usize, parts: Vec<BTreeSet<String>>) -> ClusterSet {
        let mut parts: Vec<BTreeSet<String>> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        parts.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.iter().next().cmp(&b.iter().next()))
        });
        let letters = timepoint_letters(timepoint_index);
        let clusters = parts
            .into_iter()
            .enumerate()
            .map(|(ordinal, tokens)| Cluster {
                id: format!("{letters}{ordinal:02}"),
                tokens,
            })
            .collect();
        ClusterSet {
            timepoint_index,
            clusters,
        }
    }

    pub fn cluster(&self, id: &str) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    /// Union of all cluster tokens at this timepoint.
    pub fn token_union(&self) -> BTreeSet<String> {
        self.clusters
            .iter()
            .flat_map(|c| c.tokens.iter().cloned())
            .collect()
    }
}

/// Letter prefix for a timepoint index: A..Z, then AA, AB, ...
pub fn timepoint_letters(index: usize) -> String {
    let mut n = index + 1;
    let mut letters = Vec::new();
    while n > 0 {
        n -= 1;
        letters.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    letters.reverse();
    String::from_utf8(letters).expect("ASCII letters")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root for deterministic grouping.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Read clusters off a converged (or max-iteration) matrix.
///
/// Attractors are nodes with positive mass on their own diagonal; attractors
/// reaching each other form an attractor system, and every node joins the
/// system it is attracted to. A node attracted to several systems goes to the
/// attractor holding the largest matrix entry; ties break toward the
/// lexicographically smallest attractor node.
pub fn extract_clusters(
    matrix: &ColumnMatrix,
    nodes: &[String],
    timepoint_index: usize,
) -> ClusterSet {
    let n = matrix.size();
    assert_eq!(n, nodes.len(), "node order must match matrix dimension");

    let attractors: Vec<usize> = (0..n).filter(|&i| matrix.get(i, i) > 0.0).collect();
    let is_attractor: Vec<bool> = {
        let mut flags = vec![false; n];
        for &a in &attractors {
            flags[a] = true;
        }
        flags
    };

    let mut systems = UnionFind::new(n);
    for &j in &attractors {
        for &i in &attractors {
            if matrix.get(i, j) > 0.0 {
                systems.union(i, j);
            }
        }
    }

    // cluster key: attractor-system root, or usize::MAX - j for degenerate
    // unattracted nodes (possible only on non-converged matrices).
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for j in 0..n {
        let key = if is_attractor[j] {
            systems.find(j)
        } else {
            let mut best: Option<(f64, usize)> = None;
            for &a in &attractors {
                let v = matrix.get(a, j);
                if v > 0.0 {
                    let better = match best {
                        None => true,
                        Some((bv, ba)) => v > bv || (v == bv && a < ba),
                    };
                    if better {
                        best = Some((v, a));
                    }
                }
            }
            match best {
                Some((_, a)) => systems.find(a),
                None => {
                    // No attractor reaches this node; fall back to the row
                    // holding the most mass, else isolate it.
                    let mut row_best: Option<(f64, usize)> = None;
                    for i in 0..n {
                        let v = matrix.get(i, j);
                        if v > 0.0 {
                            let better = match row_best {
                                None => true,
                                Some((bv, bi)) => v > bv || (v == bv && i < bi),
                            };
                            if better {
                                row_best = Some((v, i));
                            }
                        }
                    }
                    match row_best {
                        Some((_, i)) if is_attractor[i] => systems.find(i),
                        _ => usize::MAX - j,
                    }
                }
            }
        };
        groups.entry(key).or_default().insert(nodes[j].clone());
    }

    ClusterSet::from_partition(timepoint_index, groups.into_values().collect())
}

/// Full per-timepoint clustering: adjacency + self-loops, normalize, iterate,
/// extract.
pub fn cluster_graph(graph: &TemporalGraph, params: &MclParams) -> Result<ClusterSet> {
    params.validate()?;
    let mut matrix = ColumnMatrix::from_graph(graph, params.self_loop_weight)?;
    normalize_columns(&mut matrix)?;
    let outcome = mcl_iterate(matrix, params)?;
    if !outcome.converged {
        log::warn!(
            "timepoint {}: extracting clusters from a non-converged matrix",
            graph.timepoint_index
        );
    }
    Ok(extract_clusters(
        &outcome.matrix,
        &graph.nodes,
        graph.timepoint_index,
    ))
}
