use std::collections::BTreeSet;

use crate::data::{ColumnKind, Dataset, Value};
use crate::error::{Error, Result};
use crate::tree::FeatureSpec;

/// Column-major encoding of a training set: numeric features as `f64`,
/// categorical features as codes into a sorted level list.
#[derive(Debug, Clone)]
pub(crate) enum FeatureData {
    Numeric(Vec<f64>),
    Categorical {
        codes: Vec<u32>,
        levels: Vec<String>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct TrainingView {
    pub features: Vec<FeatureSpec>,
    pub columns: Vec<FeatureData>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
}

impl TrainingView {
    pub fn new(data: &Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("training set is empty".into()));
        }
        let mut features = Vec::new();
        let mut columns = Vec::new();
        for (idx, col) in data.schema().features() {
            features.push(FeatureSpec {
                name: col.name.clone(),
                kind: col.kind,
            });
            let encoded = match col.kind {
                ColumnKind::Numeric => {
                    FeatureData::Numeric(data.column(idx).filter_map(Value::as_number).collect())
                }
                ColumnKind::Categorical => {
                    let levels: Vec<String> = data
                        .column(idx)
                        .filter_map(Value::as_category)
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .map(str::to_string)
                        .collect();
                    let codes = data
                        .column(idx)
                        .map(|v| {
                            let c = v.as_category().expect("categorical column");
                            levels
                                .binary_search_by(|l| l.as_str().cmp(c))
                                .expect("level") as u32
                        })
                        .collect();
                    FeatureData::Categorical { codes, levels }
                }
            };
            columns.push(encoded);
        }
        Ok(Self {
            features,
            columns,
            labels: data.labels().to_vec(),
            classes: data.schema().classes().to_vec(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_counts(&self, rows: &[usize]) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_classes()];
        for &r in rows {
            counts[self.labels[r]] += 1;
        }
        counts
    }
}
