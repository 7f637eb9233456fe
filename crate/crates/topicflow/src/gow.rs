//! Graph-of-words construction: one weighted token graph per timepoint.
//!
//! Nodes are the unique tokens of the timepoint; an undirected edge connects
//! two tokens when they co-occur in at least one document and their normalized
//! pointwise mutual information clears the configured floor. Probabilities are
//! document-set estimates: a token counts once per document, the co-occurrence
//! window is the whole document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Timepoint};

/// Weighted token graph for a single timepoint. Edges are stored as
/// `(u, v, weight)` with `u < v`, sorted; nodes are sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalGraph {
    #[serde(rename = "timepoint")]
    pub timepoint_index: usize,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
}

impl TemporalGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Document-frequency counts backing the NPMI estimates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceCounts {
    /// Number of documents.
    pub doc_count: usize,
    /// token -> number of documents containing it.
    pub token_doc_freq: BTreeMap<String, usize>,
    /// (u, v) with u < v -> number of documents containing both.
    pub pair_doc_freq: BTreeMap<(String, String), usize>,
}

/// Count per-document token and token-pair frequencies with set semantics:
/// a token repeated inside one document counts once.
pub fn cooccurrence_counts(documents: &[Document]) -> CooccurrenceCounts {
    let mut counts = CooccurrenceCounts {
        doc_count: documents.len(),
        ..Default::default()
    };
    for doc in documents {
        let tokens: Vec<&str> = doc.token_set().into_iter().collect();
        for &t in &tokens {
            *counts.token_doc_freq.entry(t.to_string()).or_insert(0) += 1;
        }
        for i in 0..tokens.len() {
            for j in (i + 1)..tokens.len() {
                let key = (tokens[i].to_string(), tokens[j].to_string());
                *counts.pair_doc_freq.entry(key).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Normalized pointwise mutual information from document counts, natural log:
/// `ln(p(x,y) / (p(x) p(y))) / -ln p(x,y)`.
///
/// Requires `0 < n_xy <= min(n_x, n_y) <= n`. Perfect co-occurrence
/// (`n_x == n_y == n_xy`) returns exactly 1.0, covering the `p(x,y) = 1`
/// limit case. Output is clamped to [-1, 1] against rounding.
pub fn npmi(n_x: usize, n_y: usize, n_xy: usize, n: usize) -> f64 {
    assert!(n_xy > 0, "npmi undefined for n_xy = 0: no edge exists");
    assert!(
        n_xy <= n_x && n_xy <= n_y && n_x <= n && n_y <= n,
        "npmi counts must satisfy 0 < n_xy <= min(n_x, n_y) <= n"
    );
    if n_x == n_xy && n_y == n_xy {
        return 1.0;
    }
    let n = n as f64;
    let p_x = n_x as f64 / n;
    let p_y = n_y as f64 / n;
    let p_xy = n_xy as f64 / n;
    let pmi = (p_xy / (p_x * p_y)).ln();
    (pmi / -p_xy.ln()).clamp(-1.0, 1.0)
}

/// Build the graph-of-words for one timepoint. An edge is kept when its NPMI
/// is strictly greater than `min_npmi`.
pub fn build_graph(timepoint: &Timepoint, min_npmi: f64) -> TemporalGraph {
    let counts = cooccurrence_counts(&timepoint.documents);
    let nodes: Vec<String> = counts.token_doc_freq.keys().cloned().collect();
    let mut edges = Vec::new();
    for ((u, v), &n_uv) in &counts.pair_doc_freq {
        let n_u = counts.token_doc_freq[u];
        let n_v = counts.token_doc_freq[v];
        let weight = npmi(n_u, n_v, n_uv, counts.doc_count);
        if weight > min_npmi {
            edges.push((u.clone(), v.clone(), weight));
        }
    }
    TemporalGraph {
        timepoint_index: timepoint.index,
        nodes,
        edges,
    }
}

/// Unique tokens of a timepoint, sorted.
pub fn timepoint_vocabulary(timepoint: &Timepoint) -> BTreeSet<String> {
    timepoint
        .documents
        .iter()
        .flat_map(|d| d.token_set())
        .map(str::to_string)
        .collect()
}
