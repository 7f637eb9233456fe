//! Crisp cluster transitions between consecutive timepoints.
//!
//! Each cluster at `t_i` receives exactly one transition kind, decided by a
//! threshold match over token overlap. The result is a two-sided partition:
//! every current cluster appears in exactly one transition's sources and
//! every next cluster in exactly one transition's targets; next clusters
//! nobody claims emerge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcl::{Cluster, ClusterSet};

/// Threshold configuration for the crisp model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrispConfig {
    /// Overlap threshold for a match; two thirds unless configured.
    pub alpha: f64,
}

impl Default for CrispConfig {
    fn default() -> Self {
        CrispConfig { alpha: 2.0 / 3.0 }
    }
}

impl CrispConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "crisp.alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// The seven transition kinds, shared by the crisp and fuzzy models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Unchanged,
    Absorb,
    Dissolve,
    Split,
    Merge,
    Disappear,
    Emerge,
}

impl TransitionKind {
    pub const ALL: [TransitionKind; 7] = [
        TransitionKind::Unchanged,
        TransitionKind::Absorb,
        TransitionKind::Dissolve,
        TransitionKind::Split,
        TransitionKind::Merge,
        TransitionKind::Disappear,
        TransitionKind::Emerge,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TransitionKind::Unchanged => "unchanged",
            TransitionKind::Absorb => "absorb",
            TransitionKind::Dissolve => "dissolve",
            TransitionKind::Split => "split",
            TransitionKind::Merge => "merge",
            TransitionKind::Disappear => "disappear",
            TransitionKind::Emerge => "emerge",
        }
    }
}

impl std::fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One crisp transition: source cluster ids at `t_i`, target ids at `t_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrispTransition {
    pub kind: TransitionKind,
    pub sources: Vec<String>,
    pub targets: Vec<String>,
}

/// Source-relative token overlap `|A ∩ B| / |A|`.
pub fn overlap_ratio(a: &Cluster, b: &Cluster) -> f64 {
    assert!(!a.tokens.is_empty(), "overlap_ratio over an empty cluster");
    a.intersection_size(b) as f64 / a.tokens.len() as f64
}

/// Best α-match of `a` among `next`: the cluster maximizing [`overlap_ratio`],
/// admitted when the maximum reaches `alpha`. Ties break toward the larger
/// intersection, then the lexicographically smallest cluster id.
pub fn match_alpha<'a>(a: &Cluster, next: &'a ClusterSet, alpha: f64) -> Option<&'a Cluster> {
    let mut best: Option<(f64, usize, &Cluster)> = None;
    for candidate in &next.clusters {
        let inter = a.intersection_size(candidate);
        let ratio = inter as f64 / a.tokens.len() as f64;
        let better = match best {
            None => true,
            Some((br, bi, bc)) => {
                ratio > br
                    || (ratio == br && inter > bi)
                    || (ratio == br && inter == bi && candidate.id < bc.id)
            }
        };
        if better {
            best = Some((ratio, inter, candidate));
        }
    }
    match best {
        Some((ratio, _, cluster)) if ratio >= alpha => Some(cluster),
        _ => None,
    }
}

fn covered_size(a: &Cluster, parts: &[&Cluster]) -> usize {
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    for part in parts {
        covered.extend(a.tokens.intersection(&part.tokens).map(String::as_str));
    }
    covered.len()
}

/// Classify every cluster of `current` against `next`.
///
/// Kinds are evaluated in precedence order unchanged -> absorb -> dissolve ->
/// split -> merge -> disappear, with one carve-out that keeps both sides a
/// partition: when several sources α-match the same target, that group is a
/// merge rather than competing unchanged/absorb claims on one cluster.
/// Unclaimed next clusters emerge.
pub fn classify_crisp(
    current: &ClusterSet,
    next: &ClusterSet,
    cfg: &CrispConfig,
) -> Vec<CrispTransition> {
    let alpha = cfg.alpha;
    let n_sources = current.clusters.len();
    let mut done = vec![false; n_sources];
    let mut consumed: BTreeSet<&str> = BTreeSet::new();
    let mut transitions: Vec<CrispTransition> = Vec::new();

    // Forward matches, then group sources sharing a matched target.
    let matches: Vec<Option<&Cluster>> = current
        .clusters
        .iter()
        .map(|a| match_alpha(a, next, alpha))
        .collect();
    let mut by_target: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, matched) in matches.iter().enumerate() {
        if let Some(b) = matched {
            by_target.entry(b.id.as_str()).or_default().push(idx);
        }
    }
    for (target_id, group) in &by_target {
        if group.len() >= 2 {
            transitions.push(CrispTransition {
                kind: TransitionKind::Merge,
                sources: group
                    .iter()
                    .map(|&i| current.clusters[i].id.clone())
                    .collect(),
                targets: vec![target_id.to_string()],
            });
            consumed.insert(target_id);
            for &i in group {
                done[i] = true;
            }
        }
    }

    // Exclusive matches: unchanged when the target holds nothing beyond the
    // source, absorb when it strictly exceeds the matched material.
    for (idx, a) in current.clusters.iter().enumerate() {
        if done[idx] {
            continue;
        }
        if let Some(b) = matches[idx] {
            let target_grew = b.tokens.difference(&a.tokens).next().is_some();
            transitions.push(CrispTransition {
                kind: if target_grew {
                    TransitionKind::Absorb
                } else {
                    TransitionKind::Unchanged
                },
                sources: vec![a.id.clone()],
                targets: vec![b.id.clone()],
            });
            consumed.insert(b.id.as_str());
            done[idx] = true;
        }
    }

    // Dissolve: an unmatched source survives as the shrunken remnant that
    // back-matches into it. The remnant's own best match must be this source.
    for (idx, a) in current.clusters.iter().enumerate() {
        if done[idx] {
            continue;
        }
        let mut best: Option<(f64, usize, &Cluster)> = None;
        for b in &next.clusters {
            if consumed.contains(b.id.as_str()) || a.intersection_size(b) == 0 {
                continue;
            }
            let back = match_alpha(b, current, alpha);
            if !matches!(back, Some(m) if m.id == a.id) {
                continue;
            }
            if a.tokens.difference(&b.tokens).next().is_none() {
                continue; // source must strictly exceed the matched material
            }
            let inter = a.intersection_size(b);
            let ratio = inter as f64 / b.tokens.len() as f64;
            let better = match best {
                None => true,
                Some((br, bi, bc)) => {
                    ratio > br
                        || (ratio == br && inter > bi)
                        || (ratio == br && inter == bi && b.id < bc.id)
                }
            };
            if better {
                best = Some((ratio, inter, b));
            }
        }
        if let Some((_, _, b)) = best {
            transitions.push(CrispTransition {
                kind: TransitionKind::Dissolve,
                sources: vec![a.id.clone()],
                targets: vec![b.id.clone()],
            });
            consumed.insert(b.id.as_str());
            done[idx] = true;
        }
    }

    // Split: at least two unclaimed next clusters intersect the source and
    // together cover an α share of it.
    for (idx, a) in current.clusters.iter().enumerate() {
        if done[idx] {
            continue;
        }
        let parts: Vec<&Cluster> = next
            .clusters
            .iter()
            .filter(|b| !consumed.contains(b.id.as_str()) && a.intersection_size(b) > 0)
            .collect();
        if parts.len() >= 2 {
            let coverage = covered_size(a, &parts) as f64 / a.tokens.len() as f64;
            if coverage >= alpha {
                transitions.push(CrispTransition {
                    kind: TransitionKind::Split,
                    sources: vec![a.id.clone()],
                    targets: parts.iter().map(|b| b.id.clone()).collect(),
                });
                for b in &parts {
                    consumed.insert(b.id.as_str());
                }
                done[idx] = true;
            }
        }
    }

    // Merge by coverage: remaining sources that jointly compose an α share of
    // one next cluster.
    for idx in 0..n_sources {
        if done[idx] {
            continue;
        }
        let a = &current.clusters[idx];
        let mut chosen: Option<(Vec<usize>, &Cluster)> = None;
        for b in &next.clusters {
            if consumed.contains(b.id.as_str()) || a.intersection_size(b) == 0 {
                continue;
            }
            let group: Vec<usize> = (0..n_sources)
                .filter(|&i| !done[i] && current.clusters[i].intersection_size(b) > 0)
                .collect();
            if group.len() < 2 {
                continue;
            }
            let sources: Vec<&Cluster> = group.iter().map(|&i| &current.clusters[i]).collect();
            let coverage = covered_size(b, &sources) as f64 / b.tokens.len() as f64;
            if coverage >= alpha {
                chosen = Some((group, b));
                break;
            }
        }
        if let Some((group, b)) = chosen {
            transitions.push(CrispTransition {
                kind: TransitionKind::Merge,
                sources: group
                    .iter()
                    .map(|&i| current.clusters[i].id.clone())
                    .collect(),
                targets: vec![b.id.clone()],
            });
            consumed.insert(b.id.as_str());
            for i in group {
                done[i] = true;
            }
        }
    }

    // Disappear: everything still unclassified.
    for (idx, a) in current.clusters.iter().enumerate() {
        if !done[idx] {
            transitions.push(CrispTransition {
                kind: TransitionKind::Disappear,
                sources: vec![a.id.clone()],
                targets: Vec::new(),
            });
        }
    }

    // Emerge: next clusters no transition claimed.
    for b in &next.clusters {
        if !consumed.contains(b.id.as_str()) {
            transitions.push(CrispTransition {
                kind: TransitionKind::Emerge,
                sources: Vec::new(),
                targets: vec![b.id.clone()],
            });
        }
    }

    transitions.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then_with(|| a.sources.cmp(&b.sources))
            .then_with(|| a.targets.cmp(&b.targets))
    });
    transitions
}
