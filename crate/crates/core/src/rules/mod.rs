//! Root-to-leaf paths of classifier trees as implication rules.

mod render;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::model::{coord, Interval, Label, LeafPayload, ModelError, Mode, NodeId, NodeKind, Tree};

pub use render::{render, render_predicate, FeatureSchema, RuleExport, RuleSchema};

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rules require classifier mode")]
    NotClassifier,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("schema: {0}")]
    Schema(String),
}

/// Condition on a single feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Relation {
    /// `x <= bound`
    Le { bound: f64 },
    /// `x > bound`
    Gt { bound: f64 },
    /// `lo < x <= hi`
    Range { lo: f64, hi: f64 },
    /// `x` equals one of the codes.
    In { codes: BTreeSet<i64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub feature: usize,
    #[serde(flatten)]
    pub relation: Relation,
}

impl Predicate {
    pub fn le(feature: usize, bound: f64) -> Self {
        Predicate {
            feature,
            relation: Relation::Le { bound },
        }
    }

    pub fn gt(feature: usize, bound: f64) -> Self {
        Predicate {
            feature,
            relation: Relation::Gt { bound },
        }
    }

    pub fn codes(feature: usize, codes: impl IntoIterator<Item = i64>) -> Self {
        Predicate {
            feature,
            relation: Relation::In {
                codes: codes.into_iter().collect(),
            },
        }
    }

    pub fn holds(&self, x: &[f64]) -> bool {
        let v = coord(x, self.feature);
        match &self.relation {
            Relation::Le { bound } => v <= *bound,
            Relation::Gt { bound } => v > *bound,
            Relation::Range { lo, hi } => *lo < v && v <= *hi,
            Relation::In { codes } => codes.iter().any(|&c| c as f64 == v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleStats {
    /// Examples routed to the rule's leaf.
    pub support: usize,
    /// Share of the support carrying the consequent label.
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Conjunction; empty means always.
    pub antecedent: Vec<Predicate>,
    pub consequent: Label,
    pub leaf: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<RuleStats>,
}

impl Rule {
    pub fn holds(&self, x: &[f64]) -> bool {
        self.antecedent.iter().all(|p| p.holds(x))
    }
}

/// One rule per leaf labelled `target`, with the branch conditions in path
/// order: `feature <= threshold` for a left edge, `feature > threshold` for
/// a right edge.
pub fn extract_rules(tree: &Tree, target: Label) -> Result<Vec<Rule>, RulesError> {
    if tree.mode() != Mode::Classifier {
        return Err(RulesError::NotClassifier);
    }
    let mut out = Vec::new();
    let mut stack = vec![(tree.root(), Vec::new())];
    while let Some((id, path)) = stack.pop() {
        match &tree.node(id).kind {
            NodeKind::Leaf(LeafPayload::Label(l)) => {
                if *l == target {
                    out.push(Rule {
                        antecedent: path,
                        consequent: target,
                        leaf: id,
                        stats: None,
                    });
                }
            }
            NodeKind::Leaf(LeafPayload::Value(_)) => return Err(RulesError::NotClassifier),
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let mut r = path.clone();
                r.push(Predicate::gt(*feature, *threshold));
                stack.push((*right, r));
                let mut l = path;
                l.push(Predicate::le(*feature, *threshold));
                stack.push((*left, l));
            }
        }
    }
    Ok(out)
}

/// Counts, for each rule, the examples the tree routes to its leaf and the
/// share of those labelled with the consequent.
pub fn attach_stats(rules: &mut [Rule], tree: &Tree, data: &Dataset) {
    let dims = data.n_features.max(tree.required_features());
    let mut per_leaf: BTreeMap<NodeId, BTreeMap<Label, usize>> = BTreeMap::new();
    for ex in &data.examples {
        let leaf = tree.traverse(&ex.dense(dims));
        *per_leaf.entry(leaf).or_default().entry(ex.label).or_default() += 1;
    }
    for rule in rules {
        let counts = per_leaf.get(&rule.leaf);
        let support: usize = counts.map_or(0, |c| c.values().sum());
        let hits = counts.and_then(|c| c.get(&rule.consequent)).copied().unwrap_or(0);
        rule.stats = Some(RuleStats {
            support,
            confidence: if support == 0 { 0.0 } else { hits as f64 / support as f64 },
        });
    }
}

/// Merges the predicates on each feature into one.
///
/// Features with a codebook get their interval replaced by the member codes
/// that fall inside it; a predicate every code satisfies is dropped. Returns
/// `None` when the antecedent can never hold.
pub fn simplify(rule: &Rule, codebooks: &BTreeMap<usize, BTreeSet<i64>>) -> Option<Rule> {
    let mut order = Vec::new();
    let mut intervals: BTreeMap<usize, Interval> = BTreeMap::new();
    let mut sets: BTreeMap<usize, BTreeSet<i64>> = BTreeMap::new();
    for p in &rule.antecedent {
        let iv = intervals.entry(p.feature).or_insert_with(|| {
            order.push(p.feature);
            Interval::UNBOUNDED
        });
        match &p.relation {
            Relation::Le { bound } => *iv = iv.clip_left(*bound),
            Relation::Gt { bound } => *iv = iv.clip_right(*bound),
            Relation::Range { lo, hi } => *iv = iv.intersect(&Interval::new(*lo, *hi)),
            Relation::In { codes } => {
                let merged = match sets.remove(&p.feature) {
                    Some(s) => s.intersection(codes).copied().collect(),
                    None => codes.clone(),
                };
                sets.insert(p.feature, merged);
            }
        }
    }

    let mut antecedent = Vec::new();
    for feature in order {
        let iv = intervals[&feature];
        if iv.is_empty() {
            return None;
        }
        let book = codebooks.get(&feature);
        let set = sets.remove(&feature);
        if book.is_none() && set.is_none() {
            let relation = match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (false, false) => continue,
                (false, true) => Relation::Le { bound: iv.hi },
                (true, false) => Relation::Gt { bound: iv.lo },
                (true, true) => Relation::Range { lo: iv.lo, hi: iv.hi },
            };
            antecedent.push(Predicate { feature, relation });
            continue;
        }
        let candidates = set.clone().or_else(|| book.cloned()).unwrap_or_default();
        let codes: BTreeSet<i64> = candidates
            .into_iter()
            .filter(|&c| iv.contains(c as f64))
            .filter(|c| book.is_none_or(|b| b.contains(c)))
            .collect();
        if codes.is_empty() {
            return None;
        }
        if set.is_none() && Some(&codes) == book {
            continue;
        }
        antecedent.push(Predicate {
            feature,
            relation: Relation::In { codes },
        });
    }
    Some(Rule {
        antecedent,
        consequent: rule.consequent,
        leaf: rule.leaf,
        stats: rule.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Example;
    use crate::model::fixtures::*;
    use crate::model::Node;
    use proptest::prelude::*;

    fn rule(antecedent: Vec<Predicate>) -> Rule {
        Rule {
            antecedent,
            consequent: 1,
            leaf: NodeId(0),
            stats: None,
        }
    }

    #[test]
    fn tree_b_target_one() {
        let rules = extract_rules(&tree_b(), 1).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].antecedent, vec![Predicate::le(0, 0.5), Predicate::gt(1, 0.3)]);
        assert_eq!(rules[0].leaf, TREE_B_L2);
        assert_eq!(rules[1].antecedent, vec![Predicate::gt(0, 0.5)]);
        assert_eq!(rules[1].leaf, TREE_B_L3);
    }

    #[test]
    fn tree_b_target_zero() {
        let rules = extract_rules(&tree_b(), 0).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].antecedent, vec![Predicate::le(0, 0.5), Predicate::le(1, 0.3)]);
        assert_eq!(rules[0].consequent, 0);
    }

    #[test]
    fn absent_target_and_single_leaf() {
        assert!(extract_rules(&tree_b(), 7).unwrap().is_empty());
        let t = Tree::new(vec![Node::label(0, 1)], NodeId(0), Mode::Classifier).unwrap();
        let rules = extract_rules(&t, 1).unwrap();
        assert_eq!(rules.len(), 1);
        assert!(rules[0].antecedent.is_empty());
    }

    #[test]
    fn additive_rejected() {
        assert!(matches!(extract_rules(&stump(0, 0.5, -1.0, 1.0), 1), Err(RulesError::NotClassifier)));
    }

    #[test]
    fn merges_upper_bounds() {
        let r = simplify(&rule(vec![Predicate::le(0, 5.0), Predicate::le(0, 3.0)]), &BTreeMap::new()).unwrap();
        assert_eq!(r.antecedent, vec![Predicate::le(0, 3.0)]);
    }

    #[test]
    fn contradiction_dropped() {
        let r = rule(vec![Predicate::gt(0, 1.0), Predicate::le(0, 1.0)]);
        assert!(simplify(&r, &BTreeMap::new()).is_none());
    }

    #[test]
    fn codebook_rewrite() {
        let book: BTreeSet<i64> = (1..=10).chain([99]).collect();
        let books = BTreeMap::from([(0, book)]);
        let r = simplify(&rule(vec![Predicate::le(0, 2.5)]), &books).unwrap();
        assert_eq!(r.antecedent, vec![Predicate::codes(0, [1, 2])]);
        // Covering the whole codebook says nothing.
        let r = simplify(&rule(vec![Predicate::gt(0, 0.5)]), &books).unwrap();
        assert!(r.antecedent.is_empty());
        assert!(simplify(&rule(vec![Predicate::gt(0, 99.0)]), &books).is_none());
    }

    #[test]
    fn two_sided_interval() {
        let r = simplify(&rule(vec![Predicate::gt(1, 0.2), Predicate::le(1, 0.7)]), &BTreeMap::new()).unwrap();
        assert_eq!(
            r.antecedent,
            vec![Predicate {
                feature: 1,
                relation: Relation::Range { lo: 0.2, hi: 0.7 }
            }]
        );
    }

    #[test]
    fn stats_count_leaf_members() {
        let t = tree_b();
        let mut rules = extract_rules(&t, 1).unwrap();
        let ds = Dataset::new(
            vec![
                Example::new(1, [(0, 0.9)]),
                Example::new(0, [(0, 0.8)]),
                Example::new(1, [(0, 0.7)]),
                Example::new(0, [(0, 0.1), (1, 0.1)]),
            ],
            2,
        );
        attach_stats(&mut rules, &t, &ds);
        assert_eq!(rules[0].stats, Some(RuleStats { support: 0, confidence: 0.0 }));
        let s = rules[1].stats.unwrap();
        assert_eq!(s.support, 3);
        assert!((s.confidence - 2.0 / 3.0).abs() < 1e-12);
    }

    fn arb_predicate() -> impl Strategy<Value = Predicate> {
        (0usize..3, 0u8..2, -1i32..12).prop_map(|(f, op, b)| {
            let bound = b as f64 + 0.5;
            if op == 0 {
                Predicate::le(f, bound)
            } else {
                Predicate::gt(f, bound)
            }
        })
    }

    proptest! {
        #[test]
        fn simplify_preserves_meaning(
            preds in proptest::collection::vec(arb_predicate(), 0..6),
            coded in proptest::collection::vec(any::<bool>(), 3),
            point in proptest::collection::vec(0i64..12, 3),
        ) {
            let book: BTreeSet<i64> = (0..12).collect();
            let books: BTreeMap<usize, BTreeSet<i64>> = coded
                .iter()
                .enumerate()
                .filter(|(_, c)| **c)
                .map(|(f, _)| (f, book.clone()))
                .collect();
            let r = rule(preds);
            let x: Vec<f64> = point.iter().map(|&v| v as f64).collect();
            let after = simplify(&r, &books).is_some_and(|s| s.holds(&x));
            prop_assert_eq!(r.holds(&x), after);
        }
    }
}
