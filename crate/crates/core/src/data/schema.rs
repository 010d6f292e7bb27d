use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn categorical(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
        }
    }
}

/// Column list plus the target column and its ordered class labels.
///
/// Class order matters: it fixes confusion-matrix layout and every
/// "earliest class wins" tie-break.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schema {
    columns: Vec<Column>,
    target: String,
    classes: Vec<String>,
    #[serde(skip)]
    target_index: usize,
}

#[derive(Deserialize)]
struct RawSchema {
    columns: Vec<Column>,
    target: String,
    classes: Vec<String>,
}

impl<'de> Deserialize<'de> for Schema {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSchema::deserialize(d)?;
        Schema::new(raw.columns, raw.target, raw.classes).map_err(serde::de::Error::custom)
    }
}

impl Schema {
    pub fn new(
        columns: Vec<Column>,
        target: impl Into<String>,
        classes: Vec<String>,
    ) -> Result<Self> {
        let target = target.into();
        let mut seen = HashSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::Schema("empty column name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        let target_index = columns
            .iter()
            .position(|c| c.name == target)
            .ok_or_else(|| Error::Schema(format!("target `{target}` is not a column")))?;
        if columns[target_index].kind != ColumnKind::Categorical {
            return Err(Error::Schema(format!(
                "target `{target}` must be categorical"
            )));
        }
        if classes.is_empty() {
            return Err(Error::Schema("no classes".into()));
        }
        let mut seen = HashSet::new();
        for c in &classes {
            if !seen.insert(c.as_str()) {
                return Err(Error::Schema(format!("duplicate class `{c}`")));
            }
        }
        Ok(Self {
            columns,
            target,
            classes,
            target_index,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Non-target columns, in schema order, with their column index.
    pub fn features(&self) -> impl Iterator<Item = (usize, &Column)> {
        let t = self.target_index;
        self.columns
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != t)
    }

    /// Schema restricted to `keep` (plus the target), preserving order.
    pub fn project(&self, keep: &[&str]) -> Result<Schema> {
        for name in keep {
            if self.index_of(name).is_none() {
                return Err(Error::Schema(format!("unknown column `{name}`")));
            }
        }
        let columns = self
            .columns
            .iter()
            .filter(|c| c.name == self.target || keep.contains(&c.name.as_str()))
            .cloned()
            .collect();
        Schema::new(columns, self.target.clone(), self.classes.clone())
    }
}
