//! Fuzzy cluster transitions: trapezoidal weak/medium/strong memberships over
//! per-type discourse values.
//!
//! Where the crisp model thresholds overlap into a single verdict, the fuzzy
//! model admits every pair of clusters sharing at least one token and grades
//! each applicable transition type on [0, 1]. The three membership functions
//! share breakpoints, so weak + medium + strong sums to 1 everywhere (a
//! Ruspini partition) for the default parameter sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::crisp::TransitionKind;
use crate::error::{Error, Result};
use crate::mcl::ClusterSet;

/// Breakpoints of one trapezoid family: support `[a, d]`, core `[b, c]`,
/// with `0 < a < b < c < d < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapezoidParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TrapezoidParams {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        TrapezoidParams { a, b, c, d }
    }

    /// Default breakpoints shared by unchanged/absorb/dissolve/split/merge.
    pub const fn standard() -> Self {
        TrapezoidParams::new(0.3, 0.4, 0.6, 0.7)
    }

    /// Lower breakpoints used for disappearance, reflecting how much loss it
    /// takes for a cluster to start counting as gone.
    pub const fn disappear() -> Self {
        TrapezoidParams::new(0.25, 0.35, 0.55, 0.65)
    }

    pub fn validate(&self, context: &str) -> Result<()> {
        let TrapezoidParams { a, b, c, d } = *self;
        if !(0.0 < a && a < b && b < c && c < d && d < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "{context}: trapezoid breakpoints must satisfy 0 < a < b < c < d < 1, \
                 got a={a}, b={b}, c={c}, d={d}"
            )));
        }
        Ok(())
    }
}

/// Membership values of one discourse point in the weak/medium/strong sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyGrade {
    pub weak: f64,
    pub medium: f64,
    pub strong: f64,
}

/// The three strength labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Medium,
    Strong,
}

impl std::fmt::Display for Strength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strength::Weak => "weak",
            Strength::Medium => "medium",
            Strength::Strong => "strong",
        })
    }
}

impl FuzzyGrade {
    /// Tolerance for tie detection: memberships that are mathematically equal
    /// (e.g. both ramps at a breakpoint midpoint) differ by a few ulps.
    const TIE_EPS: f64 = 1e-9;

    /// Label with the maximum membership; ties resolve toward the stronger
    /// set so thresholded renderings err conservative.
    pub fn dominant(&self) -> Strength {
        if self.strong >= self.medium - Self::TIE_EPS && self.strong >= self.weak - Self::TIE_EPS {
            Strength::Strong
        } else if self.medium >= self.weak - Self::TIE_EPS {
            Strength::Medium
        } else {
            Strength::Weak
        }
    }

    pub fn value(&self, strength: Strength) -> f64 {
        match strength {
            Strength::Weak => self.weak,
            Strength::Medium => self.medium,
            Strength::Strong => self.strong,
        }
    }

    pub fn dominant_value(&self) -> f64 {
        self.value(self.dominant())
    }
}

/// Evaluate the weak/medium/strong trapezoids at `x in [0, 1]`.
///
/// weak is 1 below `a` and falls to 0 across `[a, b]`; medium ramps up over
/// `[a, b]`, holds 1 on the core `[b, c]`, and falls over `[c, d]`; strong
/// rises over `[c, d]` and is 1 beyond `d`.
pub fn trapezoid_grade(x: f64, params: &TrapezoidParams) -> Result<FuzzyGrade> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainViolation(x));
    }
    let TrapezoidParams { a, b, c, d } = *params;

    let weak = if x <= a {
        1.0
    } else if x <= b {
        (b - x) / (b - a)
    } else {
        0.0
    };

    let medium = if x <= a || x >= d {
        0.0
    } else if x <= b {
        (x - a) / (b - a)
    } else if x <= c {
        1.0
    } else {
        (d - x) / (d - c)
    };

    let strong = if x <= c {
        0.0
    } else if x <= d {
        (x - c) / (d - c)
    } else {
        1.0
    };

    Ok(FuzzyGrade {
        weak,
        medium,
        strong,
    })
}

/// Per-transition-type trapezoid parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuzzyParams {
    pub unchanged: TrapezoidParams,
    pub absorb: TrapezoidParams,
    pub dissolve: TrapezoidParams,
    pub split: TrapezoidParams,
    pub merge: TrapezoidParams,
    pub disappear: TrapezoidParams,
}

impl Default for FuzzyParams {
    fn default() -> Self {
        FuzzyParams {
            unchanged: TrapezoidParams::standard(),
            absorb: TrapezoidParams::standard(),
            dissolve: TrapezoidParams::standard(),
            split: TrapezoidParams::standard(),
            merge: TrapezoidParams::standard(),
            disappear: TrapezoidParams::disappear(),
        }
    }
}

impl FuzzyParams {
    pub fn validate(&self) -> Result<()> {
        self.unchanged.validate("fuzzy.unchanged")?;
        self.absorb.validate("fuzzy.absorb")?;
        self.dissolve.validate("fuzzy.dissolve")?;
        self.split.validate("fuzzy.split")?;
        self.merge.validate("fuzzy.merge")?;
        self.disappear.validate("fuzzy.disappear")?;
        Ok(())
    }

    pub fn for_kind(&self, kind: TransitionKind) -> &TrapezoidParams {
        match kind {
            TransitionKind::Unchanged => &self.unchanged,
            TransitionKind::Absorb => &self.absorb,
            TransitionKind::Dissolve => &self.dissolve,
            TransitionKind::Split => &self.split,
            TransitionKind::Merge => &self.merge,
            TransitionKind::Disappear | TransitionKind::Emerge => &self.disappear,
        }
    }
}

type Tokens = BTreeSet<String>;

fn intersection_size(a: &Tokens, b: &Tokens) -> usize {
    a.intersection(b).count()
}

fn union_size(a: &Tokens, b: &Tokens) -> usize {
    a.union(b).count()
}

/// Jaccard index of the two token sets. Requires a non-empty intersection
/// (no intersection means no transition to grade).
pub fn discourse_unchanged(a: &Tokens, b: &Tokens) -> f64 {
    let inter = intersection_size(a, b);
    assert!(inter > 0, "unchanged discourse requires a shared token");
    inter as f64 / union_size(a, b) as f64
}

/// How much of the source's presence in the target exceeds plain sameness:
/// `max(|A∩B|/|A| - |A∩B|/|A∪B|, 0)`.
pub fn discourse_absorb(a: &Tokens, b: &Tokens) -> f64 {
    let inter = intersection_size(a, b);
    assert!(inter > 0, "absorb discourse requires a shared token");
    let inter = inter as f64;
    (inter / a.len() as f64 - inter / union_size(a, b) as f64).max(0.0)
}

/// Mirror of [`discourse_absorb`] with the target-side normalizer:
/// `max(|A∩B|/|B| - |A∩B|/|A∪B|, 0)`.
pub fn discourse_dissolve(a: &Tokens, b: &Tokens) -> f64 {
    let inter = intersection_size(a, b);
    assert!(inter > 0, "dissolve discourse requires a shared token");
    let inter = inter as f64;
    (inter / b.len() as f64 - inter / union_size(a, b) as f64).max(0.0)
}

/// Coverage of a source by its fragments: `|⋃(A∩Bj)| / |⋃(A∪Bj)|`.
pub fn discourse_split(a: &Tokens, parts: &[&Tokens]) -> f64 {
    assert!(parts.len() >= 2, "a split needs at least two fragments");
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut union: BTreeSet<&str> = a.iter().map(String::as_str).collect();
    for part in parts {
        let inter: Vec<&str> = a.intersection(part).map(String::as_str).collect();
        assert!(!inter.is_empty(), "every split fragment must intersect the source");
        covered.extend(inter);
        union.extend(part.iter().map(String::as_str));
    }
    covered.len() as f64 / union.len() as f64
}

/// Coverage of a target by its sources: `|⋃(Ai∩B)| / |⋃(Ai∪B)|`.
pub fn discourse_merge(parts: &[&Tokens], b: &Tokens) -> f64 {
    assert!(parts.len() >= 2, "a merge needs at least two sources");
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut union: BTreeSet<&str> = b.iter().map(String::as_str).collect();
    for part in parts {
        let inter: Vec<&str> = part.intersection(b).map(String::as_str).collect();
        assert!(!inter.is_empty(), "every merge source must intersect the target");
        covered.extend(inter);
        union.extend(part.iter().map(String::as_str));
    }
    covered.len() as f64 / union.len() as f64
}

/// Fraction of the cluster's tokens absent from the next timepoint's
/// cluster-union vocabulary.
pub fn discourse_disappear(a: &Tokens, next_vocab: &Tokens) -> f64 {
    assert!(!a.is_empty(), "disappear discourse over an empty cluster");
    let gone = a.iter().filter(|t| !next_vocab.contains(*t)).count();
    gone as f64 / a.len() as f64
}

/// One graded transition. Emerge carries no discourse or grade: a newly
/// appearing cluster is strong by definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyTransition {
    pub kind: TransitionKind,
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub discourse: Option<f64>,
    pub grade: Option<FuzzyGrade>,
    pub dominant: Strength,
}

impl FuzzyTransition {
    fn graded(
        kind: TransitionKind,
        sources: Vec<String>,
        targets: Vec<String>,
        x: f64,
        params: &FuzzyParams,
    ) -> Result<Self> {
        let grade = trapezoid_grade(x, params.for_kind(kind))?;
        Ok(FuzzyTransition {
            kind,
            sources,
            targets,
            discourse: Some(x),
            grade: Some(grade),
            dominant: grade.dominant(),
        })
    }
}

/// Grade every admissible transition between two consecutive cluster sets.
///
/// Every pair sharing a token yields unchanged, absorb, and dissolve
/// gradings; a source touching two or more next clusters yields one split
/// over all of them, and symmetrically for merge; every current cluster gets
/// a disappearance grade against the next cluster-union vocabulary; next
/// clusters touching nothing emerge strong.
pub fn fuzzify_transitions(
    current: &ClusterSet,
    next: &ClusterSet,
    params: &FuzzyParams,
) -> Result<Vec<FuzzyTransition>> {
    params.validate()?;
    let mut transitions = Vec::new();
    let next_vocab = next.token_union();

    for a in &current.clusters {
        let intersecting: Vec<&crate::mcl::Cluster> = next
            .clusters
            .iter()
            .filter(|b| a.intersection_size(b) > 0)
            .collect();
        for b in &intersecting {
            let pair = (vec![a.id.clone()], vec![b.id.clone()]);
            transitions.push(FuzzyTransition::graded(
                TransitionKind::Unchanged,
                pair.0.clone(),
                pair.1.clone(),
                discourse_unchanged(&a.tokens, &b.tokens),
                params,
            )?);
            transitions.push(FuzzyTransition::graded(
                TransitionKind::Absorb,
                pair.0.clone(),
                pair.1.clone(),
                discourse_absorb(&a.tokens, &b.tokens),
                params,
            )?);
            transitions.push(FuzzyTransition::graded(
                TransitionKind::Dissolve,
                pair.0,
                pair.1,
                discourse_dissolve(&a.tokens, &b.tokens),
                params,
            )?);
        }
        if intersecting.len() >= 2 {
            let parts: Vec<&Tokens> = intersecting.iter().map(|b| &b.tokens).collect();
            transitions.push(FuzzyTransition::graded(
                TransitionKind::Split,
                vec![a.id.clone()],
                intersecting.iter().map(|b| b.id.clone()).collect(),
                discourse_split(&a.tokens, &parts),
                params,
            )?);
        }
        transitions.push(FuzzyTransition::graded(
            TransitionKind::Disappear,
            vec![a.id.clone()],
            Vec::new(),
            discourse_disappear(&a.tokens, &next_vocab),
            params,
        )?);
    }

    for b in &next.clusters {
        let intersecting: Vec<&crate::mcl::Cluster> = current
            .clusters
            .iter()
            .filter(|a| a.intersection_size(b) > 0)
            .collect();
        if intersecting.len() >= 2 {
            let parts: Vec<&Tokens> = intersecting.iter().map(|a| &a.tokens).collect();
            transitions.push(FuzzyTransition::graded(
                TransitionKind::Merge,
                intersecting.iter().map(|a| a.id.clone()).collect(),
                vec![b.id.clone()],
                discourse_merge(&parts, &b.tokens),
                params,
            )?);
        }
        if intersecting.is_empty() {
            transitions.push(FuzzyTransition {
                kind: TransitionKind::Emerge,
                sources: Vec::new(),
                targets: vec![b.id.clone()],
                discourse: None,
                grade: None,
                dominant: Strength::Strong,
            });
        }
    }

    transitions.sort_by(|left, right| {
        left.kind
            .cmp(&right.kind)
            .then_with(|| left.sources.cmp(&right.sources))
            .then_with(|| left.targets.cmp(&right.targets))
    });
    Ok(transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcl::Cluster;

    fn tokens(items: &[&str]) -> Tokens {
        items.iter().map(|t| t.to_string()).collect()
    }

    fn cluster(id: &str, items: &[&str]) -> Cluster {
        Cluster {
            id: id.to_string(),
            tokens: tokens(items),
        }
    }

    fn set(timepoint: usize, clusters: Vec<Cluster>) -> ClusterSet {
        ClusterSet {
            timepoint_index: timepoint,
            clusters,
        }
    }

    fn grade(x: f64) -> FuzzyGrade {
        trapezoid_grade(x, &TrapezoidParams::standard()).unwrap()
    }

    fn assert_grade(g: FuzzyGrade, weak: f64, medium: f64, strong: f64) {
        assert!((g.weak - weak).abs() < 1e-12, "weak {} != {weak}", g.weak);
        assert!((g.medium - medium).abs() < 1e-12, "medium {} != {medium}", g.medium);
        assert!((g.strong - strong).abs() < 1e-12, "strong {} != {strong}", g.strong);
    }

    #[test]
    fn trapezoid_point_checks() {
        assert_grade(grade(0.0), 1.0, 0.0, 0.0);
        assert_grade(grade(0.35), 0.5, 0.5, 0.0);
        assert_grade(grade(0.5), 0.0, 1.0, 0.0);
        assert_grade(grade(0.65), 0.0, 0.5, 0.5);
        assert_grade(grade(1.0), 0.0, 0.0, 1.0);
    }

    #[test]
    fn trapezoid_rejects_out_of_domain() {
        assert!(trapezoid_grade(-0.1, &TrapezoidParams::standard()).is_err());
        assert!(trapezoid_grade(1.1, &TrapezoidParams::standard()).is_err());
    }

    #[test]
    fn dominant_ties_favor_the_stronger_set() {
        assert_eq!(grade(0.35).dominant(), Strength::Medium);
        assert_eq!(grade(0.65).dominant(), Strength::Strong);
        assert_eq!(grade(0.0).dominant(), Strength::Weak);
    }

    #[test]
    fn trapezoid_validation() {
        assert!(TrapezoidParams::new(0.4, 0.3, 0.6, 0.7).validate("t").is_err());
        assert!(TrapezoidParams::new(0.0, 0.4, 0.6, 0.7).validate("t").is_err());
        assert!(TrapezoidParams::new(0.3, 0.4, 0.6, 1.0).validate("t").is_err());
        assert!(TrapezoidParams::standard().validate("t").is_ok());
        assert!(TrapezoidParams::disappear().validate("t").is_ok());
    }

    #[test]
    fn unchanged_is_jaccard() {
        assert_eq!(discourse_unchanged(&tokens(&["a", "b"]), &tokens(&["a", "b"])), 1.0);
        assert_eq!(
            discourse_unchanged(&tokens(&["a", "b", "c", "d"]), &tokens(&["a", "b"])),
            0.5
        );
        let x = discourse_unchanged(&tokens(&["a", "x"]), &tokens(&["a", "y"]));
        assert!((x - 1.0 / 3.0).abs() < 1e-12);
        let g = trapezoid_grade(x, &TrapezoidParams::standard()).unwrap();
        assert!((g.weak - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(g.dominant(), Strength::Weak);
    }

    #[test]
    fn absorb_collapses_on_identity() {
        let a = tokens(&["a", "b"]);
        assert_eq!(discourse_absorb(&a, &a), 0.0);
        let g = trapezoid_grade(0.0, &TrapezoidParams::standard()).unwrap();
        assert_eq!(g.dominant(), Strength::Weak);
    }

    #[test]
    fn absorb_grows_with_foreign_material() {
        let x = discourse_absorb(&tokens(&["a", "b"]), &tokens(&["a", "b", "c", "d", "e", "f"]));
        assert!((x - 2.0 / 3.0).abs() < 1e-12);
        let g = trapezoid_grade(x, &TrapezoidParams::standard()).unwrap();
        assert!((g.strong - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(g.dominant(), Strength::Strong);

        let small = discourse_absorb(&tokens(&["a", "b", "c", "d"]), &tokens(&["d", "e"]));
        assert!((small - 0.05).abs() < 1e-12);
        let g = trapezoid_grade(small, &TrapezoidParams::standard()).unwrap();
        assert_grade(g, 1.0, 0.0, 0.0);
    }

    #[test]
    fn dissolve_mirrors_absorb() {
        let a = tokens(&["a", "b", "c", "d", "e", "f"]);
        let b = tokens(&["a", "b"]);
        let x = discourse_dissolve(&a, &b);
        assert!((x - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(discourse_dissolve(&a, &a), 0.0);
        // exact duality
        assert_eq!(discourse_dissolve(&a, &b), discourse_absorb(&b, &a));
    }

    #[test]
    fn split_discourse_cases() {
        let a = tokens(&["a", "b", "c", "d"]);
        let exact = discourse_split(&a, &[&tokens(&["a", "b"]), &tokens(&["c", "d"])]);
        assert_eq!(exact, 1.0);

        let diluted = discourse_split(&a, &[&tokens(&["a", "x"]), &tokens(&["b", "y"])]);
        assert!((diluted - 2.0 / 6.0).abs() < 1e-12);
        let g = trapezoid_grade(diluted, &TrapezoidParams::standard()).unwrap();
        assert_eq!(g.dominant(), Strength::Weak);

        let wide = discourse_split(
            &tokens(&["a", "b", "c", "d", "e", "f"]),
            &[&tokens(&["a", "b", "c"]), &tokens(&["d", "e"])],
        );
        assert!((wide - 5.0 / 6.0).abs() < 1e-12);
        let g = trapezoid_grade(wide, &TrapezoidParams::standard()).unwrap();
        assert_eq!(g.dominant(), Strength::Strong);
    }

    #[test]
    fn merge_discourse_cases() {
        let exact = discourse_merge(
            &[&tokens(&["a", "b"]), &tokens(&["c", "d"])],
            &tokens(&["a", "b", "c", "d"]),
        );
        assert_eq!(exact, 1.0);

        let partial = discourse_merge(
            &[&tokens(&["a", "x"]), &tokens(&["b", "y"])],
            &tokens(&["a", "b", "c"]),
        );
        assert!((partial - 0.4).abs() < 1e-12);
        let g = trapezoid_grade(partial, &TrapezoidParams::standard()).unwrap();
        assert_grade(g, 0.0, 1.0, 0.0);

        // exact duality with split
        let b = tokens(&["a", "b", "c"]);
        let p1 = tokens(&["a", "x"]);
        let p2 = tokens(&["b", "y"]);
        assert_eq!(
            discourse_merge(&[&p1, &p2], &b),
            discourse_split(&b, &[&p1, &p2])
        );
    }

    #[test]
    fn disappear_discourse_cases() {
        let a = tokens(&["a", "b", "c", "d"]);
        assert_eq!(discourse_disappear(&a, &tokens(&["a", "b", "c", "d", "z"])), 0.0);
        let half = discourse_disappear(&a, &tokens(&["a", "b", "q"]));
        assert_eq!(half, 0.5);
        let g = trapezoid_grade(half, &TrapezoidParams::disappear()).unwrap();
        assert_grade(g, 0.0, 1.0, 0.0);
        assert_eq!(discourse_disappear(&a, &tokens(&["q"])), 1.0);
    }

    #[test]
    fn identity_timestep_grades() {
        let current = set(
            0,
            vec![cluster("A00", &["a", "b"]), cluster("A01", &["c", "d", "e"])],
        );
        let next = set(
            1,
            vec![cluster("B00", &["a", "b"]), cluster("B01", &["c", "d", "e"])],
        );
        let transitions = fuzzify_transitions(&current, &next, &FuzzyParams::default()).unwrap();

        assert!(!transitions.iter().any(|t| t.kind == TransitionKind::Emerge));
        for t in &transitions {
            match t.kind {
                TransitionKind::Unchanged => {
                    assert_grade(t.grade.unwrap(), 0.0, 0.0, 1.0);
                    assert_eq!(t.dominant, Strength::Strong);
                }
                TransitionKind::Absorb | TransitionKind::Dissolve | TransitionKind::Disappear => {
                    assert_grade(t.grade.unwrap(), 1.0, 0.0, 0.0);
                    assert_eq!(t.dominant, Strength::Weak);
                }
                other => panic!("unexpected kind {other} in identity timestep"),
            }
        }
    }

    #[test]
    fn one_shared_token_grades_both_unchanged_and_absorb() {
        // Single-token cluster flowing into a three-token cluster: the pair
        // carries a weak-dominant unchanged grading and a strong-dominant
        // absorb grading at the same time.
        let current = set(1, vec![cluster("B00", &["shared"])]);
        let next = set(2, vec![cluster("C02", &["shared", "new1", "new2"])]);
        let transitions = fuzzify_transitions(&current, &next, &FuzzyParams::default()).unwrap();

        let unchanged = transitions
            .iter()
            .find(|t| t.kind == TransitionKind::Unchanged)
            .unwrap();
        assert!((unchanged.discourse.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(unchanged.dominant, Strength::Weak);
        assert!((unchanged.grade.unwrap().weak - 2.0 / 3.0).abs() < 1e-9);
        assert!((unchanged.grade.unwrap().medium - 1.0 / 3.0).abs() < 1e-9);

        let absorb = transitions
            .iter()
            .find(|t| t.kind == TransitionKind::Absorb)
            .unwrap();
        assert!((absorb.discourse.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(absorb.dominant, Strength::Strong);
        assert!((absorb.grade.unwrap().strong - 2.0 / 3.0).abs() < 1e-9);
        assert!((absorb.grade.unwrap().medium - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn emerge_skips_grading() {
        let current = set(0, vec![cluster("A00", &["a"])]);
        let next = set(1, vec![cluster("B00", &["a"]), cluster("B01", &["fresh"])]);
        let transitions = fuzzify_transitions(&current, &next, &FuzzyParams::default()).unwrap();
        let emerge = transitions
            .iter()
            .find(|t| t.kind == TransitionKind::Emerge)
            .unwrap();
        assert_eq!(emerge.targets, vec!["B01"]);
        assert!(emerge.discourse.is_none());
        assert!(emerge.grade.is_none());
        assert_eq!(emerge.dominant, Strength::Strong);
    }

    #[test]
    fn split_and_merge_need_two_intersections() {
        let current = set(0, vec![cluster("A00", &["a", "b", "c", "d"])]);
        let next = set(
            1,
            vec![cluster("B00", &["a", "b"]), cluster("B01", &["c", "d"])],
        );
        let transitions = fuzzify_transitions(&current, &next, &FuzzyParams::default()).unwrap();
        let split = transitions
            .iter()
            .find(|t| t.kind == TransitionKind::Split)
            .unwrap();
        assert_eq!(split.discourse, Some(1.0));
        assert_eq!(split.dominant, Strength::Strong);
        assert_eq!(split.targets, vec!["B00", "B01"]);
        assert!(!transitions.iter().any(|t| t.kind == TransitionKind::Merge));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_tokens(max_id: usize) -> impl Strategy<Value = Tokens> {
            proptest::collection::btree_set(0..max_id, 1..8)
                .prop_map(|ids| ids.into_iter().map(|i| format!("t{i}")).collect())
        }

        proptest! {
            // All 1-to-1 discourse values stay in [0, 1]; duality is exact.
            #[test]
            fn pairwise_discourse_bounds_and_duality(
                a in arb_tokens(12),
                b in arb_tokens(12),
            ) {
                prop_assume!(a.intersection(&b).next().is_some());
                let unchanged = discourse_unchanged(&a, &b);
                let absorb = discourse_absorb(&a, &b);
                let dissolve = discourse_dissolve(&a, &b);
                for x in [unchanged, absorb, dissolve] {
                    prop_assert!((0.0..=1.0).contains(&x));
                }
                prop_assert_eq!(dissolve, discourse_absorb(&b, &a));
                prop_assert_eq!(absorb, discourse_dissolve(&b, &a));
            }

            // Ruspini partition holds across the whole domain for any valid
            // symmetric breakpoints (b - a == d - c), which both defaults use.
            #[test]
            fn ruspini_partition_for_defaults(x in 0.0f64..=1.0) {
                for params in [TrapezoidParams::standard(), TrapezoidParams::disappear()] {
                    let g = trapezoid_grade(x, &params).unwrap();
                    prop_assert!((g.weak + g.medium + g.strong - 1.0).abs() < 1e-9);
                    prop_assert!((0.0..=1.0).contains(&g.weak));
                    prop_assert!((0.0..=1.0).contains(&g.medium));
                    prop_assert!((0.0..=1.0).contains(&g.strong));
                }
            }

            // Split/merge discourse stays in [0, 1] over random partitions.
            #[test]
            fn split_merge_bounds(
                a in arb_tokens(10),
                p1 in arb_tokens(10),
                p2 in arb_tokens(10),
            ) {
                prop_assume!(a.intersection(&p1).next().is_some());
                prop_assume!(a.intersection(&p2).next().is_some());
                let split = discourse_split(&a, &[&p1, &p2]);
                let merge = discourse_merge(&[&p1, &p2], &a);
                prop_assert!((0.0..=1.0).contains(&split));
                prop_assert!((0.0..=1.0).contains(&merge));
                prop_assert_eq!(split, merge);
            }
        }
    }
}
