use crate::data::binning::midpoint;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tree::view::{FeatureData, TrainingView};
use crate::tree::{DecisionTree, Leaf, Node, SplitForm, SplitRule, TreeKind, TreeParams};

const SCORE_EPS: f64 = 1e-12;

/// Gini impurity `1 - Σ p_k²`.
pub fn gini(class_counts: &[f64]) -> Result<f64> {
    let total: f64 = class_counts.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidArgument("gini of an empty node".into()));
    }
    Ok(gini_unchecked(class_counts, total))
}

fn gini_unchecked(counts: &[f64], total: f64) -> f64 {
    1.0 - counts
        .iter()
        .map(|c| (c / total) * (c / total))
        .sum::<f64>()
}

/// Knobs the ensembles need on top of [`TreeParams`].
pub(crate) struct CartOptions<'a> {
    /// Per-row weights indexed by view row; `None` means all 1.
    pub weights: Option<&'a [f64]>,
    /// Features examined per node, sampled fresh at every node.
    pub mtry: Option<(usize, &'a mut SeededRng)>,
}

impl CartOptions<'_> {
    pub fn plain() -> Self {
        Self {
            weights: None,
            mtry: None,
        }
    }
}

struct Candidate {
    score: f64,
    feature: usize,
    form: SplitForm,
    left: Vec<usize>,
    right: Vec<usize>,
}

struct Grower<'v, 'o> {
    view: &'v TrainingView,
    params: &'v TreeParams,
    opts: CartOptions<'o>,
}

impl Grower<'_, '_> {
    fn weight(&self, row: usize) -> f64 {
        self.opts.weights.map_or(1.0, |w| w[row])
    }

    fn weighted_counts(&self, rows: &[usize]) -> Vec<f64> {
        let mut w = vec![0.0; self.view.n_classes()];
        for &r in rows {
            w[self.view.labels[r]] += self.weight(r);
        }
        w
    }

    fn leaf(&self, rows: &[usize]) -> Node {
        Node::Leaf(Leaf::new(
            self.view.class_counts(rows),
            &self.weighted_counts(rows),
        ))
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> Node {
        let raw = self.view.class_counts(&rows);
        let pure = raw.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < self.params.min_samples_split {
            return self.leaf(&rows);
        }

        let mut features: Vec<usize> = (0..self.view.features.len()).collect();
        if let Some((m, rng)) = self.opts.mtry.as_mut() {
            features = rng.sample_without_replacement(&features, *m);
            features.sort_unstable();
        }

        let weighted = self.weighted_counts(&rows);
        let total: f64 = weighted.iter().sum();
        let parent = gini_unchecked(&weighted, total);
        let mut best: Option<Candidate> = None;
        for f in features {
            let cand = match &self.view.columns[f] {
                FeatureData::Numeric(values) => self.best_threshold(f, values, &rows, total),
                FeatureData::Categorical { codes, levels } => {
                    self.best_one_vs_rest(f, codes, levels, &rows, total)
                }
            };
            if let Some(c) = cand {
                if best.as_ref().is_none_or(|b| c.score < b.score - SCORE_EPS) {
                    best = Some(c);
                }
            }
        }

        match best {
            // Gini is concave, so a valid split never raises weighted impurity;
            // the check guards against rounding only.
            Some(c) if c.score <= parent + SCORE_EPS => {
                let child_rows = vec![c.left.len() as u64, c.right.len() as u64];
                let left = self.grow(c.left, depth + 1);
                let right = self.grow(c.right, depth + 1);
                Node::Split {
                    rule: SplitRule {
                        feature: c.feature,
                        form: c.form,
                        chaid: None,
                    },
                    child_rows,
                    children: vec![left, right],
                }
            }
            _ => self.leaf(&rows),
        }
    }

    fn split_score(&self, left: &[f64], right: &[f64], total: f64) -> f64 {
        let wl: f64 = left.iter().sum();
        let wr: f64 = right.iter().sum();
        (wl * gini_unchecked(left, wl) + wr * gini_unchecked(right, wr)) / total
    }

    fn best_threshold(
        &self,
        f: usize,
        values: &[f64],
        rows: &[usize],
        total: f64,
    ) -> Option<Candidate> {
        let k = self.view.n_classes();
        let min_leaf = self.params.min_samples_leaf;
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

        let mut right = self.weighted_counts(rows);
        let mut left = vec![0.0; k];
        let mut best: Option<(f64, usize)> = None;
        for i in 0..order.len() - 1 {
            let r = order[i];
            let w = self.weight(r);
            left[self.view.labels[r]] += w;
            right[self.view.labels[r]] -= w;
            let (lo, hi) = (values[r], values[order[i + 1]]);
            if lo == hi || i + 1 < min_leaf || order.len() - i - 1 < min_leaf {
                continue;
            }
            let score = self.split_score(&left, &right, total);
            if best.is_none_or(|(s, _)| score < s - SCORE_EPS) {
                best = Some((score, i));
            }
        }
        let (score, i) = best?;
        let t = midpoint(values[order[i]], values[order[i + 1]]);
        let (left, right) = rows.iter().partition(|&&r| values[r] <= t);
        Some(Candidate {
            score,
            feature: f,
            form: SplitForm::Threshold { value: t },
            left,
            right,
        })
    }

    fn best_one_vs_rest(
        &self,
        f: usize,
        codes: &[u32],
        levels: &[String],
        rows: &[usize],
        total: f64,
    ) -> Option<Candidate> {
        let k = self.view.n_classes();
        let mut per_level = vec![vec![0.0; k]; levels.len()];
        let mut level_rows = vec![0usize; levels.len()];
        for &r in rows {
            let c = codes[r] as usize;
            per_level[c][self.view.labels[r]] += self.weight(r);
            level_rows[c] += 1;
        }
        let all = self.weighted_counts(rows);
        let present: Vec<usize> = (0..levels.len()).filter(|&c| level_rows[c] > 0).collect();
        let min_leaf = self.params.min_samples_leaf;

        let mut best: Option<(f64, usize)> = None;
        for &c in &present {
            let n_in = level_rows[c];
            if n_in < min_leaf || rows.len() - n_in < min_leaf || n_in == rows.len() {
                continue;
            }
            let rest: Vec<f64> = all.iter().zip(&per_level[c]).map(|(a, b)| a - b).collect();
            let score = self.split_score(&per_level[c], &rest, total);
            if best.is_none_or(|(s, _)| score < s - SCORE_EPS) {
                best = Some((score, c));
            }
        }
        let (score, chosen) = best?;
        let others = present
            .iter()
            .filter(|&&c| c != chosen)
            .map(|&c| levels[c].clone())
            .collect();
        let (left, right) = rows.iter().partition(|&&r| codes[r] as usize == chosen);
        Some(Candidate {
            score,
            feature: f,
            form: SplitForm::Groups {
                groups: vec![vec![levels[chosen].clone()], others],
            },
            left,
            right,
        })
    }
}

/// Grows a CART tree over `rows` of `view` (repeats allowed).
pub(crate) fn grow_cart(
    view: &TrainingView,
    rows: Vec<usize>,
    params: &TreeParams,
    opts: CartOptions<'_>,
) -> DecisionTree {
    let mut grower = Grower { view, params, opts };
    let root = grower.grow(rows, 0);
    DecisionTree {
        kind: TreeKind::Cart,
        features: view.features.clone(),
        classes: view.classes.clone(),
        root,
    }
}

/// Greedy binary CART minimising weighted child Gini. Numeric candidates
/// are midpoints between consecutive distinct values; categorical
/// candidates are one category versus the rest.
pub fn train_cart(train: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    params.validate()?;
    let view = TrainingView::new(train)?;
    let rows = (0..view.n_rows()).collect();
    Ok(grow_cart(&view, rows, params, CartOptions::plain()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, Schema, Value};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[5.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(gini(&[1.0, 1.0]).unwrap(), 0.5);
        assert_abs_diff_eq!(gini(&[2.0, 1.0, 1.0]).unwrap(), 0.625);
        assert!(gini(&[0.0, 0.0]).is_err());
        assert!(gini(&[]).is_err());
    }

    fn numeric(xs: &[f64], ys: &[&str]) -> Dataset {
        let schema = Schema::new(
            vec![Column::numeric("x"), Column::categorical("y")],
            "y",
            vec!["A".into(), "B".into()],
        )
        .unwrap();
        let rows = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| vec![Value::Number(*x), Value::cat(*y)])
            .collect();
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn single_class_is_leaf() {
        let d = numeric(&[1.0, 2.0, 3.0], &["A", "A", "A"]);
        let t = train_cart(&d, &TreeParams::unlimited()).unwrap();
        assert!(t.root.is_leaf());
        assert_eq!(t.predict_dataset(&d).unwrap()[0].class, 0);
    }

    #[test]
    fn numeric_threshold_midpoint() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &["A", "A", "B", "B"]);
        let t = train_cart(&d, &TreeParams::unlimited()).unwrap();
        match &t.root {
            Node::Split { rule, children, .. } => {
                assert_eq!(rule.form, SplitForm::Threshold { value: 2.5 });
                assert!(children.iter().all(Node::is_leaf));
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn xor_needs_depth_two() {
        let schema = Schema::new(
            vec![
                Column::categorical("a"),
                Column::categorical("b"),
                Column::categorical("y"),
            ],
            "y",
            vec!["A".into(), "B".into()],
        )
        .unwrap();
        let rows = [
            ("0", "0", "A"),
            ("0", "1", "B"),
            ("1", "0", "B"),
            ("1", "1", "A"),
        ]
        .iter()
        .map(|(a, b, y)| vec![Value::cat(*a), Value::cat(*b), Value::cat(*y)])
        .collect();
        let d = Dataset::new(schema, rows).unwrap();
        let t = train_cart(&d, &TreeParams::unlimited()).unwrap();
        assert_eq!(t.depth(), 2);
        let preds = t.predict_dataset(&d).unwrap();
        assert!(preds.iter().zip(d.labels()).all(|(p, &l)| p.class == l));
    }

    #[test]
    fn min_samples_leaf_respected() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0, 5.0], &["A", "B", "B", "B", "B"]);
        let p = TreeParams {
            min_samples_leaf: 2,
            min_samples_split: 2,
            ..TreeParams::unlimited()
        };
        let t = train_cart(&d, &p).unwrap();
        t.root.walk(&mut |n| {
            if let Node::Leaf(l) = n {
                assert!(l.class_counts.iter().sum::<u64>() >= 2);
            }
        });
    }

    #[test]
    fn empty_training_set_fails() {
        let d = numeric(&[1.0], &["A"]).select_rows(&[]);
        assert!(train_cart(&d, &TreeParams::cart()).is_err());
    }
}
