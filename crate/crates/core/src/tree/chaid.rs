//! CHAID: merge categories whose class distributions are not significantly
//! different, then split multi-way on the feature with the smallest
//! Bonferroni-adjusted p-value.

use serde::{Deserialize, Serialize};

use crate::data::binning::midpoint;
use crate::data::{equal_frequency_bins, Binning, Dataset};
use crate::error::Result;
use crate::feature_select::pearson_test;
use crate::tree::view::{FeatureData, TrainingView};
use crate::tree::{
    ChaidStats, DecisionTree, Leaf, Node, SplitForm, SplitRule, TreeKind, TreeParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeMode {
    /// Any two groups may merge.
    Nominal,
    /// Only neighbouring groups may merge (binned numeric features).
    Ordinal,
}

/// Final category grouping for one feature at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    /// Category indices per group, each sorted; groups ordered by first member.
    pub groups: Vec<Vec<usize>>,
    pub statistic: f64,
    pub dof: usize,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub bonferroni: f64,
}

/// Stirling number of the second kind via the additive recurrence.
pub fn bonferroni_nominal(categories: usize, groups: usize) -> f64 {
    if groups == 0 || groups > categories {
        return 0.0;
    }
    let mut row = vec![0.0f64; groups + 1];
    row[0] = 1.0;
    for n in 1..=categories {
        for k in (1..=groups.min(n)).rev() {
            row[k] = k as f64 * row[k] + row[k - 1];
        }
        row[0] = 0.0;
    }
    row[groups]
}

/// `binomial(c - 1, g - 1)`: ways to cut `c` ordered categories into `g` runs.
pub fn bonferroni_ordinal(categories: usize, groups: usize) -> f64 {
    if groups == 0 || groups > categories {
        return 0.0;
    }
    let (n, k) = (categories - 1, groups - 1);
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct MergeState<'a> {
    counts: &'a [Vec<u64>],
    mode: MergeMode,
    groups: Vec<Vec<usize>>,
    sums: Vec<Vec<u64>>,
}

impl<'a> MergeState<'a> {
    fn new(counts: &'a [Vec<u64>], mode: MergeMode) -> Self {
        Self {
            counts,
            mode,
            groups: (0..counts.len()).map(|i| vec![i]).collect(),
            sums: counts.to_vec(),
        }
    }

    fn size(&self, g: usize) -> u64 {
        self.sums[g].iter().sum()
    }

    fn pair_p(&self, a: usize, b: usize) -> f64 {
        pearson_test(&[self.sums[a].clone(), self.sums[b].clone()]).map_or(1.0, |t| t.2)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let g = self.groups.len();
        match self.mode {
            MergeMode::Ordinal => (0..g.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            MergeMode::Nominal => (0..g)
                .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
                .collect(),
        }
    }

    /// Least significantly different admissible pair (first on ties).
    fn most_similar(&self, involving: Option<usize>) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (a, b) in self.pairs() {
            if involving.is_some_and(|g| a != g && b != g) {
                continue;
            }
            let p = self.pair_p(a, b);
            if best.is_none_or(|(_, _, q)| p > q) {
                best = Some((a, b, p));
            }
        }
        best
    }

    fn merge(&mut self, a: usize, b: usize) {
        let moved = self.groups.remove(b);
        self.groups[a].extend(moved);
        self.groups[a].sort_unstable();
        let moved = self.sums.remove(b);
        for (x, y) in self.sums[a].iter_mut().zip(moved) {
            *x += y;
        }
    }

    fn respects_min_size(&self, min_size: usize) -> bool {
        (0..self.groups.len()).all(|g| self.size(g) >= min_size as u64)
    }

    fn evaluate(&self) -> Grouping {
        let c = self.counts.len();
        let g = self.groups.len();
        let (statistic, dof, raw_p) = pearson_test(&self.sums).unwrap_or((0.0, 1, 1.0));
        let bonferroni = match self.mode {
            MergeMode::Nominal => bonferroni_nominal(c, g),
            MergeMode::Ordinal => bonferroni_ordinal(c, g),
        };
        let adjusted_p = if raw_p == 0.0 {
            0.0
        } else {
            (bonferroni * raw_p).min(1.0)
        };
        Grouping {
            groups: self.groups.clone(),
            statistic,
            dof,
            raw_p,
            adjusted_p,
            bonferroni,
        }
    }
}

/// Merges the categories of a `categories × classes` count table.
///
/// Plain CHAID repeatedly merges the pair with the largest pairwise p while
/// that p exceeds `alpha_merge` and more than two groups remain; groups
/// smaller than `min_size` rows are then folded into their most similar
/// partner. With `exhaustive`, merging continues down to two groups and the
/// grouping with the smallest raw p along the way is kept.
///
/// Returns `None` when fewer than two categories are present or no grouping
/// satisfies `min_size`.
pub fn merge_categories(
    counts: &[Vec<u64>],
    mode: MergeMode,
    alpha_merge: f64,
    min_size: usize,
    exhaustive: bool,
) -> Option<Grouping> {
    if counts.len() < 2 {
        return None;
    }
    let mut state = MergeState::new(counts, mode);
    let mut best: Option<Grouping> = None;
    let mut consider = |state: &MergeState<'_>, best: &mut Option<Grouping>| {
        if exhaustive && state.respects_min_size(min_size) {
            let g = state.evaluate();
            if best.as_ref().is_none_or(|b| g.raw_p < b.raw_p) {
                *best = Some(g);
            }
        }
    };
    consider(&state, &mut best);

    let significance_pass =
        |state: &mut MergeState<'_>,
         best: &mut Option<Grouping>,
         consider: &mut dyn FnMut(&MergeState<'_>, &mut Option<Grouping>)| {
            while state.groups.len() > 2 {
                match state.most_similar(None) {
                    Some((a, b, p)) if p > alpha_merge => {
                        state.merge(a, b);
                        consider(state, best);
                    }
                    _ => break,
                }
            }
        };
    significance_pass(&mut state, &mut best, &mut consider);

    while state.groups.len() > 2 {
        let small = (0..state.groups.len())
            .filter(|&g| state.size(g) < min_size as u64)
            .min_by_key(|&g| (state.size(g), g));
        let Some(small) = small else { break };
        let (a, b, _) = state.most_similar(Some(small)).expect("a partner exists");
        state.merge(a, b);
        consider(&state, &mut best);
        significance_pass(&mut state, &mut best, &mut consider);
    }

    if exhaustive {
        while state.groups.len() > 2 {
            let (a, b, _) = state.most_similar(None).expect("at least one pair");
            state.merge(a, b);
            consider(&state, &mut best);
        }
        best
    } else if state.respects_min_size(min_size) {
        Some(state.evaluate())
    } else {
        None
    }
}

struct Grower<'v> {
    view: &'v TrainingView,
    params: &'v TreeParams,
    exhaustive: bool,
    /// Global equal-frequency binning of each numeric feature.
    bins: Vec<Option<Binning>>,
}

struct Best {
    feature: usize,
    grouping: Grouping,
    /// Category (level or bin) index of each candidate category at the node.
    categories: Vec<usize>,
}

impl Grower<'_> {
    fn category_of(&self, f: usize, row: usize) -> usize {
        match &self.view.columns[f] {
            FeatureData::Categorical { codes, .. } => codes[row] as usize,
            FeatureData::Numeric(_) => self.bins[f].as_ref().expect("binned").assignment[row],
        }
    }

    fn n_categories(&self, f: usize) -> usize {
        match &self.view.columns[f] {
            FeatureData::Categorical { levels, .. } => levels.len(),
            FeatureData::Numeric(_) => self.bins[f].as_ref().expect("binned").len(),
        }
    }

    fn leaf(&self, rows: &[usize]) -> Node {
        let counts = self.view.class_counts(rows);
        let w: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Node::Leaf(Leaf::new(counts, &w))
    }

    fn best_feature(&self, rows: &[usize]) -> Option<Best> {
        let k = self.view.n_classes();
        let mut best: Option<Best> = None;
        for f in 0..self.view.features.len() {
            let mut table = vec![vec![0u64; k]; self.n_categories(f)];
            for &r in rows {
                table[self.category_of(f, r)][self.view.labels[r]] += 1;
            }
            let categories: Vec<usize> = (0..table.len())
                .filter(|&c| table[c].iter().any(|&n| n > 0))
                .collect();
            let present: Vec<Vec<u64>> = categories.iter().map(|&c| table[c].clone()).collect();
            let mode = match self.view.columns[f] {
                FeatureData::Categorical { .. } => MergeMode::Nominal,
                FeatureData::Numeric(_) => MergeMode::Ordinal,
            };
            let Some(grouping) = merge_categories(
                &present,
                mode,
                self.params.alpha_merge,
                self.params.min_samples_leaf,
                self.exhaustive,
            ) else {
                continue;
            };
            if best
                .as_ref()
                .is_none_or(|b| grouping.adjusted_p < b.grouping.adjusted_p)
            {
                best = Some(Best {
                    feature: f,
                    grouping,
                    categories,
                });
            }
        }
        best
    }

    fn form(&self, best: &Best) -> SplitForm {
        let members = |g: &Vec<usize>| g.iter().map(|&i| best.categories[i]).collect::<Vec<_>>();
        match &self.view.columns[best.feature] {
            FeatureData::Categorical { levels, .. } => SplitForm::Groups {
                groups: best
                    .grouping
                    .groups
                    .iter()
                    .map(|g| members(g).into_iter().map(|c| levels[c].clone()).collect())
                    .collect(),
            },
            FeatureData::Numeric(_) => {
                let bins = self.bins[best.feature].as_ref().expect("binned");
                let cuts = best
                    .grouping
                    .groups
                    .windows(2)
                    .map(|w| {
                        let last = *members(&w[0]).last().expect("non-empty group");
                        let next = members(&w[1])[0];
                        midpoint(bins.bounds[last].1, bins.bounds[next].0)
                    })
                    .collect();
                SplitForm::Intervals { cuts }
            }
        }
    }

    fn grow(&self, rows: Vec<usize>, depth: usize) -> Node {
        let raw = self.view.class_counts(&rows);
        let pure = raw.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < self.params.min_samples_split {
            return self.leaf(&rows);
        }
        let Some(best) = self.best_feature(&rows) else {
            return self.leaf(&rows);
        };
        if best.grouping.adjusted_p > self.params.alpha_split {
            return self.leaf(&rows);
        }

        let mut group_of = vec![usize::MAX; self.n_categories(best.feature)];
        for (g, members) in best.grouping.groups.iter().enumerate() {
            for &i in members {
                group_of[best.categories[i]] = g;
            }
        }
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); best.grouping.groups.len()];
        for &r in &rows {
            parts[group_of[self.category_of(best.feature, r)]].push(r);
        }
        let rule = SplitRule {
            feature: best.feature,
            form: self.form(&best),
            chaid: Some(ChaidStats {
                statistic: best.grouping.statistic,
                dof: best.grouping.dof,
                raw_p: best.grouping.raw_p,
                adjusted_p: best.grouping.adjusted_p,
                bonferroni: best.grouping.bonferroni,
            }),
        };
        let child_rows = parts.iter().map(|p| p.len() as u64).collect();
        let children = parts.into_iter().map(|p| self.grow(p, depth + 1)).collect();
        Node::Split {
            rule,
            child_rows,
            children,
        }
    }
}

fn train(train: &Dataset, params: &TreeParams, exhaustive: bool) -> Result<DecisionTree> {
    params.validate()?;
    let view = TrainingView::new(train)?;
    let bins = view
        .columns
        .iter()
        .map(|c| match c {
            FeatureData::Numeric(values) => Some(equal_frequency_bins(values, params.numeric_bins)),
            FeatureData::Categorical { .. } => None,
        })
        .collect();
    let grower = Grower {
        view: &view,
        params,
        exhaustive,
        bins,
    };
    let root = grower.grow((0..view.n_rows()).collect(), 0);
    Ok(DecisionTree {
        kind: if exhaustive {
            TreeKind::ExhaustiveChaid
        } else {
            TreeKind::Chaid
        },
        features: view.features.clone(),
        classes: view.classes.clone(),
        root,
    })
}

pub fn train_chaid(data: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    train(data, params, false)
}

pub fn train_exhaustive_chaid(data: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    train(data, params, true)
}
