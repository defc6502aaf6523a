//! Tree ensemble and its JSON persistence format.
//!
//! ```json
//! {"version":1,"base_prediction":..,"feature_count":..,"params":{..},
//!  "trees":[{"nodes":[{"f":0,"t":0.5,"l":-1,"r":1}],"leaves":[..]}]}
//! ```
//! A child reference `c >= 0` points at `nodes[c]`; `c < 0` points at
//! `leaves[-c - 1]`. A tree with no nodes is the single leaf `leaves[0]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GbdtError, Matrix, TrainParams};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "i64", into = "i64")]
pub enum Child {
    Node(usize),
    Leaf(usize),
}

impl From<i64> for Child {
    fn from(v: i64) -> Self {
        if v >= 0 {
            Child::Node(v as usize)
        } else {
            Child::Leaf((-v - 1) as usize)
        }
    }
}

impl From<Child> for i64 {
    fn from(c: Child) -> i64 {
        match c {
            Child::Node(i) => i as i64,
            Child::Leaf(i) => -(i as i64) - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitNode {
    #[serde(rename = "f")]
    pub feature: usize,
    #[serde(rename = "t")]
    pub threshold: f64,
    #[serde(rename = "l")]
    pub left: Child,
    #[serde(rename = "r")]
    pub right: Child,
}

/// Binary regression tree; rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<SplitNode>,
    pub leaves: Vec<f64>,
}

impl Tree {
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        let mut node = &self.nodes[0];
        loop {
            let next = if row[node.feature] <= node.threshold { node.left } else { node.right };
            match next {
                Child::Node(i) => node = &self.nodes[i],
                Child::Leaf(i) => return i,
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.leaves[self.leaf_index(row)]
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, c: Child) -> usize {
            match c {
                Child::Leaf(_) => 0,
                Child::Node(i) => 1 + walk(t, t.nodes[i].left).max(walk(t, t.nodes[i].right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(self, Child::Node(0))
        }
    }

    fn validate(&self, feature_count: usize) -> Result<(), String> {
        if self.leaves.is_empty() {
            return Err("tree without leaves".into());
        }
        if self.leaves.iter().any(|v| !v.is_finite()) {
            return Err("non-finite leaf value".into());
        }
        if self.nodes.is_empty() {
            return if self.leaves.len() == 1 { Ok(()) } else { Err("orphan leaves".into()) };
        }
        // Each node and leaf must be referenced exactly once, children after parents.
        let mut node_refs = vec![0usize; self.nodes.len()];
        let mut leaf_refs = vec![0usize; self.leaves.len()];
        node_refs[0] = 1;
        for (i, n) in self.nodes.iter().enumerate() {
            if n.feature >= feature_count {
                return Err(format!("feature index {} out of range", n.feature));
            }
            if !n.threshold.is_finite() {
                return Err("non-finite threshold".into());
            }
            for c in [n.left, n.right] {
                match c {
                    Child::Node(j) if j > i && j < self.nodes.len() => node_refs[j] += 1,
                    Child::Leaf(j) if j < self.leaves.len() => leaf_refs[j] += 1,
                    _ => return Err("dangling child reference".into()),
                }
            }
        }
        if node_refs.iter().chain(&leaf_refs).any(|&r| r != 1) {
            return Err("tree is not a proper binary tree".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbdtModel {
    pub version: u32,
    pub base_prediction: f64,
    pub feature_count: usize,
    pub params: TrainParams,
    pub trees: Vec<Tree>,
}

impl GbdtModel {
    pub fn constant(base_prediction: f64, feature_count: usize, params: TrainParams) -> Self {
        GbdtModel { version: MODEL_VERSION, base_prediction, feature_count, params, trees: Vec::new() }
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64, GbdtError> {
        if row.len() != self.feature_count {
            return Err(GbdtError::DimensionMismatch { expected: self.feature_count, found: row.len() });
        }
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[f64]) -> f64 {
        let lr = self.params.learning_rate;
        self.trees
            .iter()
            .fold(self.base_prediction, |acc, t| acc + lr * t.predict(row))
    }

    pub fn predict_batch(&self, x: &Matrix) -> Result<Vec<f64>, GbdtError> {
        if x.n_cols() != self.feature_count {
            return Err(GbdtError::DimensionMismatch { expected: self.feature_count, found: x.n_cols() });
        }
        Ok(x.rows().map(|r| self.predict_unchecked(r)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GbdtError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GbdtError::CorruptModel(e.to_string()))?;
        let version = match value.get("version") {
            Some(serde_json::Value::Number(n)) => n.as_u64().map(|v| v.to_string()),
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            _ => None,
        }
        .ok_or_else(|| GbdtError::CorruptModel("missing version field".into()))?;
        if version != MODEL_VERSION.to_string() {
            return Err(GbdtError::VersionMismatch { found: version, expected: MODEL_VERSION });
        }
        let model: GbdtModel =
            serde_json::from_value(value).map_err(|e| GbdtError::CorruptModel(e.to_string()))?;
        model.validate().map_err(GbdtError::CorruptModel)?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), String> {
        if !self.base_prediction.is_finite() {
            return Err("non-finite base prediction".into());
        }
        self.params.validate().map_err(|e| e.to_string())?;
        for (i, t) in self.trees.iter().enumerate() {
            t.validate(self.feature_count).map_err(|e| format!("tree {i}: {e}"))?;
            if t.depth() > self.params.max_depth {
                return Err(format!("tree {i}: depth exceeds max_depth"));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), GbdtError> {
        std::fs::write(path, self.to_json()).map_err(|e| GbdtError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, GbdtError> {
        let text = std::fs::read_to_string(path).map_err(|e| GbdtError::Io(e.to_string()))?;
        Self::from_json(&text)
    }
}
