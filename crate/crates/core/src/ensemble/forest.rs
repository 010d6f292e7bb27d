use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::ensemble::bagging::member_sample;
use crate::ensemble::{
    build_members, Aggregation, EnsembleKind, EnsembleModel, Member, Model, Sampling,
};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tree::{grow_cart, CartOptions, TrainingView, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(feature count))`.
    #[serde(default)]
    pub mtry: Option<usize>,
    #[serde(default = "yes")]
    pub bootstrap: bool,
    #[serde(default)]
    pub parallel: bool,
}

fn yes() -> bool {
    true
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            mtry: None,
            bootstrap: true,
            parallel: false,
        }
    }
}

pub fn default_mtry(n_features: usize) -> usize {
    (n_features as f64).sqrt().ceil() as usize
}

/// Unpruned CART trees on bootstrap samples, each split choosing among
/// `mtry` freshly sampled features. Tree `i` draws its sample and its
/// feature subsets from `rng.derive(i)`.
pub fn train_random_forest(
    train: &Dataset,
    params: &ForestParams,
    rng: &SeededRng,
) -> Result<EnsembleModel> {
    let view = TrainingView::new(train)?;
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument(
            "forest needs at least one tree".into(),
        ));
    }
    let p = view.features.len();
    let mtry = params.mtry.unwrap_or_else(|| default_mtry(p));
    if mtry == 0 || mtry > p {
        return Err(Error::InvalidArgument(format!(
            "mtry {mtry} outside 1..={p}"
        )));
    }
    let sampling = if params.bootstrap {
        Sampling::Bootstrap
    } else {
        Sampling::Identity
    };
    let tree_params = TreeParams::unlimited();
    let members = build_members(params.n_trees, params.parallel, |i| {
        let (sample, mut tree_rng) = member_sample(view.n_rows(), sampling, rng, i)?;
        let opts = CartOptions {
            weights: None,
            mtry: Some((mtry, &mut tree_rng)),
        };
        let tree = grow_cart(&view, sample.indices, &tree_params, opts);
        Ok(Member {
            weight: 1.0,
            model: Model::Tree(tree),
        })
    })?;
    EnsembleModel::new(EnsembleKind::RandomForest, Aggregation::Majority, members)
}
