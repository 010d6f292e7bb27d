//! Bagging, SAMME boosting, random forests and heterogeneous voting.
//!
//! Every ensemble predicts by a weighted indicator vote
//! `argmax_y Σ_i w_i · I(h_i(x) = y)`. Tied classes are separated by the
//! summed member probabilities `Σ_i w_i · p_i(y)` and then by class order.

mod bagging;
mod boosting;
mod committee;
mod forest;

use serde::{Deserialize, Serialize};

pub use bagging::{bag, BagParams, BaseLearner, Sampling};
pub use boosting::{samme_alpha, train_boosted, BoostParams, MAX_MEMBER_WEIGHT};
pub use committee::committee;
pub use forest::{default_mtry, train_random_forest, ForestParams};

use crate::data::{Dataset, Schema, Value};
use crate::error::{Error, Result};
use crate::tree::{bind_features, DecisionTree, FeatureSpec, Prediction};

/// Relative tolerance when deciding that two vote totals tie.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Tree(DecisionTree),
    Ensemble(EnsembleModel),
}

impl Model {
    pub fn features(&self) -> &[FeatureSpec] {
        match self {
            Model::Tree(t) => &t.features,
            Model::Ensemble(e) => &e.features,
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            Model::Tree(t) => &t.classes,
            Model::Ensemble(e) => &e.classes,
        }
    }

    pub fn predict_bound(&self, row: &[Value], binding: &[usize]) -> Prediction {
        match self {
            Model::Tree(t) => t.predict_bound(row, binding),
            Model::Ensemble(e) => e.predict_bound(row, binding),
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
        let binding = bind_features(self.features(), schema)?;
        Ok(self.predict_bound(row, &binding))
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<Prediction>> {
        if data.schema().classes() != self.classes() {
            return Err(Error::SchemaMismatch(
                "class labels differ from the model's".into(),
            ));
        }
        let binding = bind_features(self.features(), data.schema())?;
        Ok(data
            .rows()
            .iter()
            .map(|r| self.predict_bound(r, &binding))
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl From<DecisionTree> for Model {
    fn from(t: DecisionTree) -> Self {
        Model::Tree(t)
    }
}

impl From<EnsembleModel> for Model {
    fn from(e: EnsembleModel) -> Self {
        Model::Ensemble(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Majority,
    WeightedMajority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Bagging,
    Boosted,
    RandomForest,
    Committee,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub weight: f64,
    pub model: Model,
}

/// Per-class vote totals for one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    /// `Σ_i w_i · I(h_i(x) = y)`.
    pub votes: Vec<f64>,
    /// `Σ_i w_i · p_i(y)`.
    pub probability_sums: Vec<f64>,
    pub total_weight: f64,
}

impl Tally {
    /// Winning class under the vote and tie rules.
    pub fn winner(&self) -> usize {
        let tied = near_max(&self.votes, (0..self.votes.len()).collect());
        let tied = near_max(&self.probability_sums, tied);
        tied[0]
    }
}

/// Members of `candidates` whose value is within tolerance of the maximum.
fn near_max(values: &[f64], candidates: Vec<usize>) -> Vec<usize> {
    let max = candidates
        .iter()
        .map(|&i| values[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * max.abs().max(1.0);
    candidates
        .into_iter()
        .filter(|&i| values[i] >= max - tol)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub kind: EnsembleKind,
    pub aggregation: Aggregation,
    pub features: Vec<FeatureSpec>,
    /// Class order used for the final tie-break.
    pub classes: Vec<String>,
    pub members: Vec<Member>,
}

impl EnsembleModel {
    pub fn new(kind: EnsembleKind, aggregation: Aggregation, members: Vec<Member>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("ensemble needs at least one member".into()))?;
        let features = first.model.features().to_vec();
        let classes = first.model.classes().to_vec();
        for (i, m) in members.iter().enumerate() {
            if !(m.weight.is_finite() && m.weight > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "member {i} has weight {}",
                    m.weight
                )));
            }
            if m.model.features() != features.as_slice() || m.model.classes() != classes.as_slice()
            {
                return Err(Error::SchemaMismatch(format!(
                    "member {i} was trained on a different schema"
                )));
            }
        }
        Ok(Self {
            kind,
            aggregation,
            features,
            classes,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn tally_bound(&self, row: &[Value], binding: &[usize]) -> Tally {
        let k = self.classes.len();
        let mut votes = vec![0.0; k];
        let mut probability_sums = vec![0.0; k];
        let mut total_weight = 0.0;
        for m in &self.members {
            let p = m.model.predict_bound(row, binding);
            votes[p.class] += m.weight;
            for (s, q) in probability_sums.iter_mut().zip(&p.distribution) {
                *s += m.weight * q;
            }
            total_weight += m.weight;
        }
        Tally {
            votes,
            probability_sums,
            total_weight,
        }
    }

    /// Voted class; the distribution is the weight-averaged member
    /// distribution.
    pub fn predict_bound(&self, row: &[Value], binding: &[usize]) -> Prediction {
        let tally = self.tally_bound(row, binding);
        Prediction {
            class: tally.winner(),
            distribution: tally
                .probability_sums
                .iter()
                .map(|s| s / tally.total_weight)
                .collect(),
        }
    }

    pub fn vote(&self, schema: &Schema, row: &[Value]) -> Result<usize> {
        let binding = bind_features(&self.features, schema)?;
        Ok(self.predict_bound(row, &binding).class)
    }
}

/// Builds `n` members, in parallel when asked; results keep index order.
pub(crate) fn build_members<T, F>(n: usize, parallel: bool, build: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(&build).collect()
    } else {
        (0..n).map(build).collect()
    }
}
