use serde::{Deserialize, Serialize};

use crate::data::{bootstrap_indices, BootstrapSample, Dataset};
use crate::ensemble::{build_members, Aggregation, EnsembleKind, EnsembleModel, Member, Model};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tree::{train_cart, train_chaid, train_exhaustive_chaid, DecisionTree, TreeParams};

/// Single-tree learner used as the bagging base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", content = "params", rename_all = "snake_case")]
pub enum BaseLearner {
    Cart(TreeParams),
    Chaid(TreeParams),
    ExhaustiveChaid(TreeParams),
}

impl BaseLearner {
    pub fn train(&self, data: &Dataset) -> Result<DecisionTree> {
        match self {
            BaseLearner::Cart(p) => train_cart(data, p),
            BaseLearner::Chaid(p) => train_chaid(data, p),
            BaseLearner::ExhaustiveChaid(p) => train_exhaustive_chaid(data, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Bootstrap,
    /// Every member sees the full training set (degenerate bagging).
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagParams {
    pub base: BaseLearner,
    pub members: usize,
    pub sampling: Sampling,
    #[serde(default)]
    pub parallel: bool,
}

impl BagParams {
    pub fn new(base: BaseLearner, members: usize) -> Self {
        Self {
            base,
            members,
            sampling: Sampling::Bootstrap,
            parallel: false,
        }
    }
}

/// Sample used by member `i`: bootstrap draws from `rng.derive(i)`.
pub(crate) fn member_sample(
    n: usize,
    sampling: Sampling,
    rng: &SeededRng,
    i: usize,
) -> Result<(BootstrapSample, SeededRng)> {
    let mut member_rng = rng.derive(i as u64);
    let sample = match sampling {
        Sampling::Bootstrap => bootstrap_indices(n, &mut member_rng)?,
        Sampling::Identity => BootstrapSample::identity(n),
    };
    Ok((sample, member_rng))
}

/// Trains `members` base models, model `i` on the bootstrap sample drawn
/// from `rng.derive(i)`, and combines them with an unweighted majority vote.
/// `rng` itself is not advanced.
pub fn bag(train: &Dataset, params: &BagParams, rng: &SeededRng) -> Result<EnsembleModel> {
    if train.is_empty() {
        return Err(Error::InvalidArgument(
            "bagging an empty training set".into(),
        ));
    }
    if params.members == 0 {
        return Err(Error::InvalidArgument(
            "bagging needs at least one member".into(),
        ));
    }
    let members = build_members(params.members, params.parallel, |i| {
        let (sample, _) = member_sample(train.len(), params.sampling, rng, i)?;
        let tree = params.base.train(&train.select_rows(&sample.indices))?;
        Ok(Member {
            weight: 1.0,
            model: Model::Tree(tree),
        })
    })?;
    EnsembleModel::new(EnsembleKind::Bagging, Aggregation::Majority, members)
}
