use std::fmt;

use crate::data::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};

/// Reserved token for an empty categorical cell.
pub const MISSING: &str = "__MISSING__";

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Category(String),
    Number(f64),
}

impl Value {
    pub fn cat(s: impl Into<String>) -> Self {
        Value::Category(s.into())
    }

    pub fn as_category(&self) -> Option<&str> {
        match self {
            Value::Category(s) => Some(s),
            Value::Number(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Category(_) => None,
        }
    }

    fn kind(&self) -> ColumnKind {
        match self {
            Value::Category(_) => ColumnKind::Categorical,
            Value::Number(_) => ColumnKind::Numeric,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Category(s) => f.write_str(s),
            Value::Number(x) => write!(f, "{x}"),
        }
    }
}

/// Rows of values laid out in schema column order. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Vec<Value>>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self> {
        let width = schema.columns().len();
        let target = schema.target_index();
        let mut labels = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Data(format!(
                    "row {} has {} values, schema has {width} columns",
                    r + 1,
                    row.len()
                )));
            }
            for (value, col) in row.iter().zip(schema.columns()) {
                if value.kind() != col.kind {
                    return Err(Error::Cell {
                        row: r + 1,
                        column: col.name.clone(),
                        message: format!("expected {:?} value, got `{value}`", col.kind),
                    });
                }
                if let Value::Number(x) = value {
                    if !x.is_finite() {
                        return Err(Error::Cell {
                            row: r + 1,
                            column: col.name.clone(),
                            message: "non-finite number".into(),
                        });
                    }
                }
            }
            let label = row[target].as_category().unwrap_or_default();
            let class = schema.class_index(label).ok_or_else(|| Error::Cell {
                row: r + 1,
                column: schema.target().to_string(),
                message: format!("unknown class label `{label}`"),
            })?;
            labels.push(class);
        }
        Ok(Self {
            schema,
            rows,
            labels,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Class index (into `schema().classes()`) of every row.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.classes().len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Number of distinct classes that actually occur.
    pub fn classes_present(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = &Value> {
        self.rows.iter().map(move |r| &r[index])
    }

    /// New dataset holding the given rows (repeats allowed) in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Keeps only the named feature columns (plus the target).
    pub fn project(&self, keep: &[&str]) -> Result<Dataset> {
        let schema = self.schema.project(keep)?;
        let idx: Vec<usize> = schema
            .columns()
            .iter()
            .map(|c| {
                self.schema
                    .index_of(&c.name)
                    .expect("projected column exists")
            })
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
            .collect();
        Ok(Dataset {
            schema,
            rows,
            labels: self.labels.clone(),
        })
    }
}
