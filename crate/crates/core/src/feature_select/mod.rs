//! Chi-square association screening of each feature against the target.

mod chi_square;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use chi_square::{chi_square_pvalue, gamma_q, ln_gamma, pearson, pearson_test};

use crate::data::{equal_frequency_bins, format_number, ColumnKind, Dataset, Value};
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Upper bound on equal-frequency bins when screening a numeric feature.
pub const SCREENING_BINS: usize = 10;

/// Feature categories (or bins) by target classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Categorical features get one row per observed category (lexicographic);
/// numeric features are cut into `min(10, distinct)` equal-frequency bins
/// ordered by lower bound. Columns follow the schema's class order.
pub fn contingency(data: &Dataset, feature: &str) -> Result<ContingencyTable> {
    let schema = data.schema();
    let col = schema
        .index_of(feature)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown feature `{feature}`")))?;
    if col == schema.target_index() {
        return Err(Error::InvalidArgument(format!(
            "`{feature}` is the target column"
        )));
    }
    let k = schema.classes().len();
    let labels = data.labels();
    let (row_labels, counts) = match schema.columns()[col].kind {
        ColumnKind::Categorical => {
            let mut by_cat: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
            for (v, &l) in data.column(col).zip(labels) {
                let cat = v.as_category().expect("categorical column");
                by_cat.entry(cat).or_insert_with(|| vec![0; k])[l] += 1;
            }
            by_cat
                .into_iter()
                .map(|(c, row)| (c.to_string(), row))
                .unzip()
        }
        ColumnKind::Numeric => {
            let values: Vec<f64> = data.column(col).filter_map(Value::as_number).collect();
            let bins = equal_frequency_bins(&values, SCREENING_BINS);
            let mut counts = vec![vec![0u64; k]; bins.len()];
            for (&b, &l) in bins.assignment.iter().zip(labels) {
                counts[b][l] += 1;
            }
            ((0..bins.len()).map(|b| bins.label(b)).collect(), counts)
        }
    };
    Ok(ContingencyTable {
        row_labels,
        col_labels: schema.classes().to_vec(),
        counts,
    })
}

/// Pearson statistic and degrees of freedom. An untestable table (fewer
/// than two non-empty rows or columns) is [`Error::Degenerate`].
pub fn chi_square_stat(table: &ContingencyTable) -> Result<(f64, usize)> {
    if table.total() == 0 {
        return Err(Error::Degenerate("empty contingency table".into()));
    }
    pearson(&table.counts).ok_or_else(|| Error::Degenerate("no association testable".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub retained: bool,
}

/// Per-feature chi-square results sorted by ascending p-value (ties by
/// descending statistic, then schema order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub alpha: f64,
    pub entries: Vec<FeatureScore>,
}

impl ChiSquareReport {
    pub fn retained(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.retained)
            .map(|e| e.feature.as_str())
            .collect()
    }

    pub fn dropped(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.retained)
            .map(|e| e.feature.as_str())
            .collect()
    }

    pub fn get(&self, feature: &str) -> Option<&FeatureScore> {
        self.entries.iter().find(|e| e.feature == feature)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,chi_square,dof,p_value,retained\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&e.feature),
                format_number(e.statistic),
                e.dof,
                format_number(e.p_value),
                e.retained
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn select_features(data: &Dataset, alpha: f64) -> Result<ChiSquareReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside (0, 1)"
        )));
    }
    let names: Vec<&str> = data
        .schema()
        .features()
        .map(|(_, c)| c.name.as_str())
        .collect();
    if names.is_empty() {
        return Err(Error::InvalidArgument(
            "dataset has no feature columns".into(),
        ));
    }
    let mut entries = Vec::with_capacity(names.len());
    for name in names {
        let table = contingency(data, name)?;
        let (statistic, dof, p_value) = match chi_square_stat(&table) {
            Ok((s, d)) => (s, d, chi_square_pvalue(s, d)?),
            Err(Error::Degenerate(_)) => (0.0, 1, 1.0),
            Err(e) => return Err(e),
        };
        entries.push(FeatureScore {
            feature: name.to_string(),
            statistic,
            dof,
            p_value,
            retained: p_value <= alpha,
        });
    }
    entries.sort_by(|a, b| {
        a.p_value
            .total_cmp(&b.p_value)
            .then(b.statistic.total_cmp(&a.statistic))
    });
    Ok(ChiSquareReport { alpha, entries })
}
