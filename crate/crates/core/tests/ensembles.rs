use treevote::data::{bootstrap, generate_workers, Dataset};
use treevote::ensemble::{
    bag, committee, train_boosted, train_random_forest, Aggregation, BagParams, BaseLearner,
    BoostParams, EnsembleKind, EnsembleModel, ForestParams, Member, Model, Sampling,
};
use treevote::tree::{bind_features, train_cart, train_chaid, TreeParams};
use treevote::SeededRng;

fn workers() -> Dataset {
    generate_workers(5, 300).unwrap()
}

fn members(data: &Dataset, n: usize) -> Vec<Member> {
    let mut rng = SeededRng::new(9);
    (0..n)
        .map(|i| {
            let (sample, _) = bootstrap(data, &mut rng).unwrap();
            Member {
                weight: 0.5 + i as f64 * 0.75,
                model: Model::Tree(train_cart(&sample, &TreeParams::cart()).unwrap()),
            }
        })
        .collect()
}

fn classes_of(model: &EnsembleModel, data: &Dataset) -> Vec<usize> {
    Model::Ensemble(model.clone())
        .predict_dataset(data)
        .unwrap()
        .into_iter()
        .map(|p| p.class)
        .collect()
}

#[test]
fn uniform_weight_scaling_preserves_votes() {
    let data = workers();
    let base = members(&data, 7);
    let reference = EnsembleModel::new(
        EnsembleKind::Boosted,
        Aggregation::WeightedMajority,
        base.clone(),
    )
    .unwrap();
    for scale in [0.25, 8.0] {
        let scaled = base
            .iter()
            .map(|m| Member {
                weight: m.weight * scale,
                model: m.model.clone(),
            })
            .collect();
        let scaled =
            EnsembleModel::new(EnsembleKind::Boosted, Aggregation::WeightedMajority, scaled)
                .unwrap();
        assert_eq!(classes_of(&scaled, &data), classes_of(&reference, &data));
    }
}

#[test]
fn member_order_does_not_matter() {
    let data = workers();
    let base = members(&data, 6);
    let reference = EnsembleModel::new(
        EnsembleKind::Boosted,
        Aggregation::WeightedMajority,
        base.clone(),
    )
    .unwrap();
    let mut rng = SeededRng::new(17);
    for _ in 0..5 {
        let mut shuffled = base.clone();
        rng.shuffle(&mut shuffled);
        let m = EnsembleModel::new(
            EnsembleKind::Boosted,
            Aggregation::WeightedMajority,
            shuffled,
        )
        .unwrap();
        assert_eq!(classes_of(&m, &data), classes_of(&reference, &data));
    }
}

#[test]
fn tally_conserves_weight_and_distribution_sums_to_one() {
    let data = workers();
    let m = EnsembleModel::new(
        EnsembleKind::Boosted,
        Aggregation::WeightedMajority,
        members(&data, 5),
    )
    .unwrap();
    let binding = bind_features(&m.features, data.schema()).unwrap();
    let total: f64 = m.members.iter().map(|m| m.weight).sum();
    for row in data.rows() {
        let t = m.tally_bound(row, &binding);
        assert!((t.votes.iter().sum::<f64>() - total).abs() < 1e-9);
        assert!((t.total_weight - total).abs() < 1e-12);
        let p = m.predict_bound(row, &binding);
        assert!((p.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(t.votes[p.class] >= t.votes.iter().cloned().fold(0.0, f64::max) - 1e-9);
    }
}

#[test]
fn identity_bagging_reproduces_the_single_tree() {
    let data = workers();
    let mut params = BagParams::new(BaseLearner::Cart(TreeParams::cart()), 4);
    params.sampling = Sampling::Identity;
    let bagged = bag(&data, &params, &SeededRng::new(1)).unwrap();
    let single = Model::Tree(train_cart(&data, &TreeParams::cart()).unwrap());
    let expected: Vec<usize> = single
        .predict_dataset(&data)
        .unwrap()
        .iter()
        .map(|p| p.class)
        .collect();
    assert_eq!(classes_of(&bagged, &data), expected);
}

#[test]
fn member_streams_are_independent_of_ensemble_size() {
    let data = workers();
    let rng = SeededRng::new(3);
    let small = bag(
        &data,
        &BagParams::new(BaseLearner::Chaid(TreeParams::chaid()), 3),
        &rng,
    )
    .unwrap();
    let large = bag(
        &data,
        &BagParams::new(BaseLearner::Chaid(TreeParams::chaid()), 6),
        &rng,
    )
    .unwrap();
    assert_eq!(small.members[..], large.members[..3]);

    let forest = |n| {
        let p = ForestParams {
            n_trees: n,
            ..ForestParams::default()
        };
        train_random_forest(&data, &p, &rng).unwrap()
    };
    assert_eq!(forest(4).members[..], forest(9).members[..4]);
}

#[test]
fn ensembles_are_deterministic_in_parallel_and_nested() {
    let data = workers();
    let rng = SeededRng::new(11);
    let serial = ForestParams {
        n_trees: 12,
        ..ForestParams::default()
    };
    let parallel = ForestParams {
        parallel: true,
        ..serial.clone()
    };
    let forest = train_random_forest(&data, &serial, &rng).unwrap();
    assert_eq!(forest, train_random_forest(&data, &parallel, &rng).unwrap());

    let boosted = train_boosted(
        &data,
        &BoostParams {
            rounds: 10,
            ..BoostParams::default()
        },
    )
    .unwrap();
    assert!(boosted.members.iter().all(|m| m.weight > 0.0));
    let chaid = Model::Tree(train_chaid(&data, &TreeParams::chaid()).unwrap());
    let build = || {
        committee(vec![
            forest.clone().into(),
            boosted.clone().into(),
            chaid.clone(),
        ])
        .unwrap()
    };
    let a = build();
    assert_eq!(a, build());
    let back = Model::from_json(&Model::Ensemble(a.clone()).to_json()).unwrap();
    assert_eq!(
        back.predict_dataset(&data).unwrap(),
        Model::Ensemble(a).predict_dataset(&data).unwrap()
    );
}
