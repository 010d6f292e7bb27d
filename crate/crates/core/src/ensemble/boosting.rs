//! SAMME multiclass AdaBoost over depth-limited CART trees.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::ensemble::{Aggregation, EnsembleKind, EnsembleModel, Member, Model};
use crate::error::{Error, Result};
use crate::tree::{grow_cart, CartOptions, TrainingView, TreeParams};

/// Upper bound on a member weight; reached when a round makes no errors.
pub const MAX_MEMBER_WEIGHT: f64 = 23.025_850_929_940_457; // ln(1e10)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub rounds: usize,
    pub base_max_depth: usize,
    pub learning_rate: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            rounds: 50,
            base_max_depth: 3,
            learning_rate: 1.0,
        }
    }
}

/// `learning_rate · (ln((1 − ε) / ε) + ln(K − 1))`, capped at
/// [`MAX_MEMBER_WEIGHT`].
pub fn samme_alpha(error: f64, classes: usize, learning_rate: f64) -> f64 {
    let raw = learning_rate * (((1.0 - error) / error).ln() + ((classes - 1) as f64).ln());
    raw.min(MAX_MEMBER_WEIGHT)
}

pub(crate) struct BoostTrace {
    pub model: EnsembleModel,
    /// Row-weight sum after each kept round's renormalisation.
    #[cfg_attr(not(test), allow(dead_code))]
    pub weight_sums: Vec<f64>,
}

pub(crate) fn boost(train: &Dataset, params: &BoostParams) -> Result<BoostTrace> {
    if params.rounds == 0 {
        return Err(Error::InvalidArgument(
            "boosting needs at least one round".into(),
        ));
    }
    if params.base_max_depth == 0 {
        return Err(Error::InvalidArgument(
            "base_max_depth must be positive".into(),
        ));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "learning_rate {} outside (0, 1]",
            params.learning_rate
        )));
    }
    let view = TrainingView::new(train)?;
    let k = train.classes_present();
    if k < 2 {
        return Err(Error::Degenerate(
            "boosting needs at least two classes".into(),
        ));
    }
    let n = view.n_rows();
    let tree_params = TreeParams {
        max_depth: Some(params.base_max_depth),
        ..TreeParams::unlimited()
    };
    let all_rows: Vec<usize> = (0..n).collect();
    let mut weights = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut weight_sums = Vec::new();

    for _ in 0..params.rounds {
        let opts = CartOptions {
            weights: Some(&weights),
            mtry: None,
        };
        let tree = grow_cart(&view, all_rows.clone(), &tree_params, opts);
        let missed: Vec<bool> = tree
            .predict_dataset(train)?
            .iter()
            .zip(&view.labels)
            .map(|(p, &y)| p.class != y)
            .collect();
        let total: f64 = weights.iter().sum();
        let error: f64 = weights
            .iter()
            .zip(&missed)
            .filter(|(_, &m)| m)
            .map(|(w, _)| w)
            .sum::<f64>()
            / total;

        if error >= 1.0 - 1.0 / k as f64 {
            break;
        }
        let alpha = samme_alpha(error, k, params.learning_rate);
        members.push(Member {
            weight: alpha,
            model: Model::Tree(tree),
        });
        if error == 0.0 {
            break;
        }
        let boost = alpha.exp();
        for (w, &m) in weights.iter_mut().zip(&missed) {
            if m {
                *w *= boost;
            }
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        weight_sums.push(weights.iter().sum());
    }

    if members.is_empty() {
        return Err(Error::Degenerate(
            "boosting degenerate: no round survived".into(),
        ));
    }
    Ok(BoostTrace {
        model: EnsembleModel::new(
            EnsembleKind::Boosted,
            Aggregation::WeightedMajority,
            members,
        )?,
        weight_sums,
    })
}

/// SAMME: each round fits a weighted CART of depth `base_max_depth`, stops
/// when the weighted error reaches `1 − 1/K` (round discarded) or 0 (round
/// kept with the capped weight).
pub fn train_boosted(train: &Dataset, params: &BoostParams) -> Result<EnsembleModel> {
    Ok(boost(train, params)?.model)
}
