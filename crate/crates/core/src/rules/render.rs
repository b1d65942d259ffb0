use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Predicate, Relation, Rule, RulesError};
use crate::model::Label;

/// Name and code dictionary of one feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSchema {
    pub name: String,
    /// Code to category description; a nonempty map marks the feature
    /// categorical with these codes as its codebook.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub codes: BTreeMap<i64, String>,
    /// Values are whole numbers, so thresholds render as `>=`/`<=` on
    /// integers.
    #[serde(default)]
    pub integer: bool,
}

impl FeatureSchema {
    fn is_integer(&self) -> bool {
        self.integer || !self.codes.is_empty()
    }
}

/// Feature columns in index order. Stored on disk as a JSON list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleSchema {
    pub features: Vec<FeatureSchema>,
}

impl RuleSchema {
    pub fn from_json(text: &str) -> Result<Self, RulesError> {
        serde_json::from_str(text).map_err(|e| RulesError::Schema(e.to_string()))
    }

    pub fn feature(&self, index: usize) -> Option<&FeatureSchema> {
        self.features.get(index)
    }

    /// Codebooks of the categorical features, for [`super::simplify`].
    pub fn codebooks(&self) -> BTreeMap<usize, BTreeSet<i64>> {
        self.features
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.codes.is_empty())
            .map(|(i, f)| (i, f.codes.keys().copied().collect()))
            .collect()
    }
}

fn feature_name(schema: Option<&RuleSchema>, index: usize) -> String {
    match schema.and_then(|s| s.feature(index)) {
        Some(f) => f.name.clone(),
        None => {
            log::warn!("feature {index} is not in the schema; rendering it by index");
            format!("f{index}")
        }
    }
}

/// One atom, e.g. `(vno ≥ 2)` or `((pba⇒pba_0) ∨ (pba⇒pba_1))`.
pub fn render_predicate(p: &Predicate, schema: Option<&RuleSchema>) -> String {
    let name = feature_name(schema, p.feature);
    let integer = schema.and_then(|s| s.feature(p.feature)).is_some_and(FeatureSchema::is_integer);
    match &p.relation {
        Relation::In { codes } => {
            let atoms: Vec<String> = codes.iter().map(|c| format!("({name}⇒{name}_{c})")).collect();
            if atoms.len() == 1 {
                atoms.into_iter().next().expect("one atom")
            } else {
                format!("({})", atoms.join(" ∨ "))
            }
        }
        Relation::Le { bound } if integer => format!("({name} ≤ {})", bound.floor()),
        Relation::Gt { bound } if integer => format!("({name} ≥ {})", bound.floor() + 1.0),
        Relation::Range { lo, hi } if integer => {
            let (a, b) = (lo.floor() + 1.0, hi.floor());
            if a == b {
                format!("({name} = {a})")
            } else {
                format!("({a} ≤ {name} ≤ {b})")
            }
        }
        Relation::Le { bound } => format!("({name} ≤ {bound})"),
        Relation::Gt { bound } => format!("({name} > {bound})"),
        Relation::Range { lo, hi } => format!("({lo} < {name} ≤ {hi})"),
    }
}

fn consequent(label: Label) -> String {
    match label {
        1 => "(label⇒label_yes)".to_string(),
        0 => "(label⇒label_no)".to_string(),
        other => format!("(label⇒label_{other})"),
    }
}

/// Implication string such as `(A ∧ B) ⇒ (label⇒label_yes)`.
pub fn render(rule: &Rule, schema: Option<&RuleSchema>) -> String {
    let atoms: Vec<String> = rule.antecedent.iter().map(|p| render_predicate(p, schema)).collect();
    let lhs = match atoms.len() {
        0 => "true".to_string(),
        1 => atoms[0].clone(),
        _ => format!("({})", atoms.join(" ∧ ")),
    };
    format!("{lhs} ⇒ {}", consequent(rule.consequent))
}

/// Serialized form of a rule for review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleExport {
    pub antecedent: Vec<Predicate>,
    pub atoms: Vec<String>,
    pub consequent: Label,
    pub support: Option<usize>,
    pub confidence: Option<f64>,
    pub rendered: String,
    /// Category symbol to description, for the codes the rule mentions.
    pub legend: BTreeMap<String, String>,
}

impl RuleExport {
    pub fn new(rule: &Rule, schema: Option<&RuleSchema>) -> Self {
        let mut legend = BTreeMap::new();
        for p in &rule.antecedent {
            let (Relation::In { codes }, Some(f)) = (&p.relation, schema.and_then(|s| s.feature(p.feature))) else {
                continue;
            };
            for c in codes {
                if let Some(desc) = f.codes.get(c) {
                    legend.insert(format!("{}_{c}", f.name), desc.clone());
                }
            }
        }
        RuleExport {
            antecedent: rule.antecedent.clone(),
            atoms: rule.antecedent.iter().map(|p| render_predicate(p, schema)).collect(),
            consequent: rule.consequent,
            support: rule.stats.map(|s| s.support),
            confidence: rule.stats.map(|s| s.confidence),
            rendered: render(rule, schema),
            legend,
        }
    }
}
