//! Single decision trees: CART (Gini, binary splits), CHAID and Exhaustive
//! CHAID (chi-square category merging, multi-way splits).

mod cart;
mod chaid;
mod view;

use serde::{Deserialize, Serialize};

pub use cart::{gini, train_cart};
pub(crate) use cart::{grow_cart, CartOptions};
pub use chaid::{
    bonferroni_nominal, bonferroni_ordinal, merge_categories, train_chaid, train_exhaustive_chaid,
    Grouping, MergeMode,
};
pub(crate) use view::TrainingView;

use crate::data::{ColumnKind, Dataset, Schema, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows without a depth limit.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub alpha_merge: f64,
    pub alpha_split: f64,
    /// Equal-frequency bins for numeric features (CHAID only).
    pub numeric_bins: usize,
}

impl TreeParams {
    pub fn cart() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 5,
            min_samples_leaf: 2,
            alpha_merge: 0.05,
            alpha_split: 0.05,
            numeric_bins: 10,
        }
    }

    pub fn chaid() -> Self {
        Self {
            max_depth: Some(5),
            ..Self::cart()
        }
    }

    /// Grow until pure: no depth limit, one-row leaves.
    pub fn unlimited() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            ..Self::cart()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("tree params: {m}")));
        if self.max_depth == Some(0) {
            return bad("max_depth must be positive");
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split must be >= 2");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be >= 1");
        }
        if !(self.alpha_merge > 0.0 && self.alpha_merge < 1.0) {
            return bad("alpha_merge must lie in (0, 1)");
        }
        if !(self.alpha_split > 0.0 && self.alpha_split < 1.0) {
            return bad("alpha_split must lie in (0, 1)");
        }
        if self.numeric_bins < 2 {
            return bad("numeric_bins must be >= 2");
        }
        Ok(())
    }
}

impl Default for TreeParams {
    fn default() -> Self {
        Self::cart()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    Cart,
    Chaid,
    ExhaustiveChaid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// How a split routes a value to a branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitForm {
    /// Branch 0 takes `x <= value`, branch 1 the rest.
    Threshold { value: f64 },
    /// One branch per group of categories.
    Groups { groups: Vec<Vec<String>> },
    /// Ordered numeric intervals: branch `i` takes `cuts[i-1] < x <= cuts[i]`.
    Intervals { cuts: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaidStats {
    pub statistic: f64,
    pub dof: usize,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub bonferroni: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRule {
    /// Index into the tree's feature list.
    pub feature: usize,
    pub form: SplitForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaid: Option<ChaidStats>,
}

impl SplitRule {
    pub fn branch_count(&self) -> usize {
        match &self.form {
            SplitForm::Threshold { .. } => 2,
            SplitForm::Groups { groups } => groups.len(),
            SplitForm::Intervals { cuts } => cuts.len() + 1,
        }
    }

    /// Branch for `value`, or `None` for a category no group contains.
    pub fn route(&self, value: &Value) -> Option<usize> {
        match (&self.form, value) {
            (SplitForm::Threshold { value: t }, Value::Number(x)) => {
                Some(if *x <= *t { 0 } else { 1 })
            }
            (SplitForm::Intervals { cuts }, Value::Number(x)) => {
                Some(cuts.iter().position(|c| *x <= *c).unwrap_or(cuts.len()))
            }
            (SplitForm::Groups { groups }, Value::Category(c)) => {
                groups.iter().position(|g| g.iter().any(|m| m == c))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    /// Training rows (with bootstrap repeats) per class.
    pub class_counts: Vec<u64>,
    pub distribution: Vec<f64>,
    pub prediction: usize,
}

impl Leaf {
    /// `weighted` are the per-class masses used for the distribution and the
    /// prediction; pass the raw counts for unweighted training.
    pub(crate) fn new(class_counts: Vec<u64>, weighted: &[f64]) -> Leaf {
        let total: f64 = weighted.iter().sum();
        let distribution = if total > 0.0 {
            weighted.iter().map(|w| w / total).collect()
        } else {
            vec![0.0; weighted.len()]
        };
        Leaf {
            class_counts,
            distribution,
            prediction: argmax(weighted),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf(Leaf),
    Split {
        rule: SplitRule,
        /// Training rows reaching each child.
        child_rows: Vec<u64>,
        children: Vec<Node>,
    },
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf(_))
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { children, .. } => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split { children, .. } => children.iter().map(Node::leaf_count).sum(),
        }
    }

    /// Depth-first visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        f(self);
        if let Node::Split { children, .. } = self {
            for c in children {
                c.walk(f);
            }
        }
    }

    fn find_leaf(&self, row: &[Value], binding: &[usize]) -> &Leaf {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(leaf) => return leaf,
                Node::Split {
                    rule,
                    child_rows,
                    children,
                } => {
                    let value = &row[binding[rule.feature]];
                    let branch = rule.route(value).unwrap_or_else(|| argmax_u64(child_rows));
                    node = &children[branch];
                }
            }
        }
    }
}

/// Index of the largest entry; ties go to the earliest.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn argmax_u64(values: &[u64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Class prediction plus per-class probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub distribution: Vec<f64>,
}

/// Maps model feature `i` to the column index of a row laid out by `schema`.
pub fn bind_features(features: &[FeatureSpec], schema: &Schema) -> Result<Vec<usize>> {
    features
        .iter()
        .map(|f| {
            let idx = schema
                .index_of(&f.name)
                .ok_or_else(|| Error::SchemaMismatch(format!("column `{}` is missing", f.name)))?;
            if schema.columns()[idx].kind != f.kind {
                return Err(Error::SchemaMismatch(format!(
                    "column `{}` has kind {:?}, model expects {:?}",
                    f.name,
                    schema.columns()[idx].kind,
                    f.kind
                )));
            }
            Ok(idx)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub kind: TreeKind,
    pub features: Vec<FeatureSpec>,
    pub classes: Vec<String>,
    pub root: Node,
}

impl DecisionTree {
    /// Prediction for a row already bound with [`bind_features`].
    pub fn predict_bound(&self, row: &[Value], binding: &[usize]) -> Prediction {
        let leaf = self.root.find_leaf(row, binding);
        Prediction {
            class: leaf.prediction,
            distribution: leaf.distribution.clone(),
        }
    }

    pub fn predict(&self, schema: &Schema, row: &[Value]) -> Result<usize> {
        Ok(self.predict_dist(schema, row)?.class)
    }

    pub fn predict_dist(&self, schema: &Schema, row: &[Value]) -> Result<Prediction> {
        if row.len() != schema.columns().len() {
            return Err(Error::SchemaMismatch(format!(
                "row has {} values, schema has {} columns",
                row.len(),
                schema.columns().len()
            )));
        }
        let binding = bind_features(&self.features, schema)?;
        Ok(self.predict_bound(row, &binding))
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<Prediction>> {
        let binding = bind_features(&self.features, data.schema())?;
        Ok(data
            .rows()
            .iter()
            .map(|r| self.predict_bound(r, &binding))
            .collect())
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
