use crate::ensemble::{Aggregation, EnsembleKind, EnsembleModel, Member, Model};
use crate::error::Result;

/// Heterogeneous majority vote over already-trained models, each with
/// weight 1. All members must share features and class order.
pub fn committee(models: Vec<Model>) -> Result<EnsembleModel> {
    let members = models
        .into_iter()
        .map(|model| Member { weight: 1.0, model })
        .collect();
    EnsembleModel::new(EnsembleKind::Committee, Aggregation::Majority, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnKind;
    use crate::error::Error;
    use crate::tree::{DecisionTree, FeatureSpec, Leaf, Node, TreeKind};

    fn constant(dist: &[f64]) -> Model {
        Model::Tree(DecisionTree {
            kind: TreeKind::Cart,
            features: vec![FeatureSpec {
                name: "x".into(),
                kind: ColumnKind::Numeric,
            }],
            classes: vec!["A".into(), "B".into(), "C".into()],
            root: Node::Leaf(Leaf::new(vec![0, 0, 0], dist)),
        })
    }

    #[test]
    fn majority_of_four() {
        let c = committee(vec![
            constant(&[0.1, 0.9, 0.0]),
            constant(&[0.2, 0.8, 0.0]),
            constant(&[0.9, 0.1, 0.0]),
            constant(&[0.3, 0.7, 0.0]),
        ])
        .unwrap();
        assert_eq!(c.predict_bound(&[], &[0]).class, 1);
    }

    #[test]
    fn two_two_tie_by_probability() {
        let c = committee(vec![
            constant(&[0.6, 0.4, 0.0]),
            constant(&[0.55, 0.45, 0.0]),
            constant(&[0.1, 0.9, 0.0]),
            constant(&[0.2, 0.8, 0.0]),
        ])
        .unwrap();
        // A: 1.15 + 0.3 = 1.45, B: 0.85 + 1.7 = 2.55.
        assert_eq!(c.predict_bound(&[], &[0]).class, 1);
    }

    #[test]
    fn single_member_passthrough() {
        let c = committee(vec![constant(&[0.2, 0.3, 0.5])]).unwrap();
        let p = c.predict_bound(&[], &[0]);
        assert_eq!(p.class, 2);
        assert_eq!(p.distribution, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn schema_mismatch_rejected() {
        let mut other = constant(&[1.0, 0.0, 0.0]);
        if let Model::Tree(t) = &mut other {
            t.classes.reverse();
        }
        assert!(matches!(
            committee(vec![constant(&[1.0, 0.0, 0.0]), other]),
            Err(Error::SchemaMismatch(_))
        ));
        assert!(committee(vec![]).is_err());
    }
}
