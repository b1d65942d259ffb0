mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use proptest::prelude::*;
use rand::Rng;
use treecert::rules::{extract_rules, simplify, Rule};

fn all_rules(tree: &treecert::model::Tree) -> Vec<Rule> {
    let mut rules = extract_rules(tree, 0).unwrap();
    rules.extend(extract_rules(tree, 1).unwrap());
    rules
}

proptest! {
    #[test]
    fn antecedents_partition_the_input_space(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = r.gen_range(1..=4);
        let tree = classifier_tree(&mut r, dims, 4);
        let rules = all_rules(&tree);
        prop_assert_eq!(rules.len(), tree.leaf_count());
        for _ in 0..50 {
            let x = point(&mut r, dims);
            let holding: Vec<&Rule> = rules.iter().filter(|rule| rule.holds(&x)).collect();
            prop_assert_eq!(holding.len(), 1);
            prop_assert_eq!(holding[0].leaf, route(&tree, &x));
        }
    }

    #[test]
    fn simplified_rules_are_sound_on_the_code_grid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = r.gen_range(1..=3);
        let tree = classifier_tree(&mut r, dims, 4);
        // Codes 0..=10 scaled onto the tenths the generator draws thresholds from.
        let book: BTreeSet<i64> = (0..=10).collect();
        let coded: BTreeMap<usize, BTreeSet<i64>> = (0..dims)
            .filter(|_| r.gen_bool(0.5))
            .map(|f| (f, book.clone()))
            .collect();
        let scaled = scale_tree(&tree);
        for rule in all_rules(&scaled) {
            let simple = simplify(&rule, &coded);
            let mut features = BTreeSet::new();
            if let Some(s) = &simple {
                prop_assert!(s.antecedent.iter().all(|p| features.insert(p.feature)));
            }
            for _ in 0..30 {
                let x: Vec<f64> = (0..dims)
                    .map(|f| if coded.contains_key(&f) { r.gen_range(0..=10) as f64 } else { 10.0 * coordinate(&mut r) })
                    .collect();
                let after = simple.as_ref().is_some_and(|s| s.holds(&x));
                prop_assert_eq!(rule.holds(&x), after);
                if after {
                    prop_assert_eq!(route(&scaled, &x), rule.leaf);
                }
            }
        }
    }
}

/// Same tree with thresholds multiplied by ten, so integer codes straddle them.
fn scale_tree(tree: &treecert::model::Tree) -> treecert::model::Tree {
    use treecert::model::{Node, NodeKind, Tree};
    let nodes = tree
        .nodes()
        .map(|n| match n.kind {
            NodeKind::Split { feature, threshold, left, right } => Node::split(n.id.0, feature, threshold * 10.0, left.0, right.0),
            NodeKind::Leaf(_) => n.clone(),
        })
        .collect();
    Tree::new(nodes, tree.root(), tree.mode()).unwrap()
}
