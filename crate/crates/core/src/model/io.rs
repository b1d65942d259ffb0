//! JSON model documents.
//!
//! ```json
//! { "mode": "additive", "n_features": 1, "base_score": 0.0,
//!   "trees": [ { "root": 0, "nodes": [
//!       {"id": 0, "feature": 0, "threshold": 0.5, "left": 1, "right": 2},
//!       {"id": 1, "value": -1.0},
//!       {"id": 2, "value": 1.0} ] } ] }
//! ```

use serde::{Deserialize, Serialize};

use super::{Ensemble, LeafPayload, Mode, ModelError, Node, NodeId, NodeKind, Tree};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    mode: Mode,
    n_features: usize,
    #[serde(default)]
    base_score: f64,
    trees: Vec<TreeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    nodes: Vec<NodeDoc>,
    root: u32,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

impl NodeDoc {
    fn into_node(self, path: &str) -> Result<Node, ModelError> {
        let err = |message: &str| ModelError::Parse {
            path: path.to_string(),
            message: message.to_string(),
        };
        match self {
            NodeDoc {
                id,
                feature: Some(feature),
                threshold: Some(threshold),
                left: Some(left),
                right: Some(right),
                label: None,
                value: None,
            } => Ok(Node::split(id, feature, threshold, left, right)),
            NodeDoc {
                id,
                feature: None,
                threshold: None,
                left: None,
                right: None,
                label: Some(label),
                value: None,
            } => Ok(Node::label(id, label)),
            NodeDoc {
                id,
                feature: None,
                threshold: None,
                left: None,
                right: None,
                label: None,
                value: Some(value),
            } => Ok(Node::value(id, value)),
            _ => Err(err(
                "node must be a split {id, feature, threshold, left, right} or a leaf {id, label} / {id, value}",
            )),
        }
    }

    fn from_node(node: &Node) -> Self {
        let id = node.id.0;
        match node.kind {
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => NodeDoc {
                id,
                feature: Some(feature),
                threshold: Some(threshold),
                left: Some(left.0),
                right: Some(right.0),
                ..Default::default()
            },
            NodeKind::Leaf(LeafPayload::Label(l)) => NodeDoc {
                id,
                label: Some(l),
                ..Default::default()
            },
            NodeKind::Leaf(LeafPayload::Value(v)) => NodeDoc {
                id,
                value: Some(v),
                ..Default::default()
            },
        }
    }
}

/// Parses and validates a model document.
pub fn load_ensemble(text: &str) -> Result<Ensemble, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut trees = Vec::with_capacity(doc.trees.len());
    for (ti, tdoc) in doc.trees.into_iter().enumerate() {
        let mut nodes = Vec::with_capacity(tdoc.nodes.len());
        for (ni, ndoc) in tdoc.nodes.into_iter().enumerate() {
            nodes.push(ndoc.into_node(&format!("trees[{ti}].nodes[{ni}]"))?);
        }
        trees.push(Tree::build(nodes, NodeId(tdoc.root), doc.mode, ti)?);
    }
    if doc.mode == Mode::Classifier && trees.len() != 1 {
        return Err(ModelError::Mode {
            tree: 0,
            message: format!("classifier documents hold exactly one tree, found {}", trees.len()),
        });
    }
    Ensemble::new(doc.mode, doc.n_features, doc.base_score, trees)
}

/// Serializes an ensemble; nodes are written in id order.
pub fn dump_ensemble(ensemble: &Ensemble) -> String {
    let doc = ModelDoc {
        mode: ensemble.mode(),
        n_features: ensemble.n_features(),
        base_score: ensemble.base_score(),
        trees: ensemble
            .trees()
            .iter()
            .map(|t| TreeDoc {
                nodes: t.nodes().map(NodeDoc::from_node).collect(),
                root: t.root().0,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model documents serialize");
    out.push('\n');
    out
}
