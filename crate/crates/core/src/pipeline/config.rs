use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::ensemble::{BagParams, BaseLearner, BoostParams, ForestParams};
use crate::error::{Error, Result};
use crate::feature_select::DEFAULT_ALPHA;
use crate::tree::TreeParams;

/// Name under which the committee appears in the bundle.
pub const COMMITTEE_NAME: &str = "voted";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    Synthetic { seed: u64, n: usize },
    Csv(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Score every model on its own training data.
    #[default]
    Resubstitution,
    Split {
        test_fraction: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Cart,
    Chaid,
    ExhaustiveChaid,
    Boosted,
    RandomForest,
    Bagged,
}

/// A configured model. `params` holds only the overrides; missing keys
/// take the kind's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Json::is_null")]
    pub params: Json,
}

/// Fully resolved learner settings for one model.
#[derive(Debug, Clone, PartialEq)]
pub enum Learner {
    Cart(TreeParams),
    Chaid(TreeParams),
    ExhaustiveChaid(TreeParams),
    Boosted(BoostParams),
    RandomForest(ForestParams),
    Bagged(BagParams),
}

fn overlay<T: Serialize + for<'de> Deserialize<'de>>(
    defaults: T,
    name: &str,
    params: &Json,
) -> Result<T> {
    let mut base = serde_json::to_value(defaults)?;
    match params {
        Json::Null => {}
        Json::Object(over) => {
            let obj = base.as_object_mut().expect("params serialize as objects");
            for (k, v) in over {
                if !obj.contains_key(k) {
                    return Err(Error::InvalidArgument(format!(
                        "model `{name}`: unknown parameter `{k}`"
                    )));
                }
                obj.insert(k.clone(), v.clone());
            }
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "model `{name}`: params must be an object"
            )))
        }
    }
    serde_json::from_value(base).map_err(|e| Error::InvalidArgument(format!("model `{name}`: {e}")))
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, kind: ModelKind) -> Self {
        Self {
            name: name.into(),
            kind,
            params: Json::Null,
        }
    }

    pub fn learner(&self) -> Result<Learner> {
        let n = &self.name;
        let p = &self.params;
        let learner = match self.kind {
            ModelKind::Cart => Learner::Cart(overlay(TreeParams::cart(), n, p)?),
            ModelKind::Chaid => Learner::Chaid(overlay(TreeParams::chaid(), n, p)?),
            ModelKind::ExhaustiveChaid => {
                Learner::ExhaustiveChaid(overlay(TreeParams::chaid(), n, p)?)
            }
            ModelKind::Boosted => Learner::Boosted(overlay(BoostParams::default(), n, p)?),
            ModelKind::RandomForest => {
                Learner::RandomForest(overlay(ForestParams::default(), n, p)?)
            }
            ModelKind::Bagged => Learner::Bagged(overlay(
                BagParams::new(BaseLearner::Cart(TreeParams::cart()), 25),
                n,
                p,
            )?),
        };
        match &learner {
            Learner::Cart(t) | Learner::Chaid(t) | Learner::ExhaustiveChaid(t) => t.validate()?,
            Learner::Bagged(b) => match &b.base {
                BaseLearner::Cart(t) | BaseLearner::Chaid(t) | BaseLearner::ExhaustiveChaid(t) => {
                    t.validate()?
                }
            },
            _ => {}
        }
        Ok(learner)
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::new("random_forest", ModelKind::RandomForest),
        ModelSpec::new("boosted", ModelKind::Boosted),
        ModelSpec::new("cart", ModelKind::Cart),
        ModelSpec::new("chaid", ModelKind::Chaid),
    ]
}

fn default_output() -> PathBuf {
    PathBuf::from("report")
}

/// Everything a pipeline run depends on. Relative paths are resolved
/// against the directory of the config file by [`PipelineConfig::load`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputSpec,
    /// Required for CSV input; synthetic input uses the worker schema.
    #[serde(default)]
    pub schema: Option<PathBuf>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub evaluation: Evaluation,
    #[serde(default = "default_models")]
    pub models: Vec<ModelSpec>,
    /// Defaults to every configured model.
    #[serde(default)]
    pub committee_members: Option<Vec<String>>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    /// Train ensemble members on the rayon pool.
    #[serde(default)]
    pub parallel: bool,
    /// Also write SVG charts next to the curve CSVs.
    #[serde(default)]
    pub svg: bool,
}

impl PipelineConfig {
    /// Default pipeline over synthetic worker data.
    pub fn synthetic(seed: u64, n: usize) -> Self {
        Self {
            input: InputSpec::Synthetic { seed, n },
            schema: None,
            alpha: DEFAULT_ALPHA,
            evaluation: Evaluation::Resubstitution,
            models: default_models(),
            committee_members: None,
            output_dir: default_output(),
            master_seed: 0,
            parallel: false,
            svg: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let InputSpec::Csv(p) = &mut self.input {
            fix(p);
        }
        if let Some(p) = &mut self.schema {
            fix(p);
        }
        fix(&mut self.output_dir);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Names of the committee members, in configured order.
    pub fn committee(&self) -> Vec<String> {
        match &self.committee_members {
            Some(m) => m.clone(),
            None => self.models.iter().map(|m| m.name.clone()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if let Evaluation::Split { test_fraction, .. } = self.evaluation {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "test_fraction {test_fraction} outside (0, 1)"
                )));
            }
        }
        if let InputSpec::Csv(_) = self.input {
            if self.schema.is_none() {
                return Err(Error::InvalidArgument(
                    "csv input needs a schema path".into(),
                ));
            }
        }
        if self.models.is_empty() {
            return Err(Error::InvalidArgument("no models configured".into()));
        }
        let mut names = BTreeSet::new();
        for m in &self.models {
            if m.name.is_empty()
                || !m
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(Error::InvalidArgument(format!(
                    "model name `{}` must be non-empty ASCII letters, digits, `_` or `-`",
                    m.name
                )));
            }
            if m.name == COMMITTEE_NAME {
                return Err(Error::InvalidArgument(format!(
                    "model name `{COMMITTEE_NAME}` is reserved for the committee"
                )));
            }
            if !names.insert(m.name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate model name `{}`",
                    m.name
                )));
            }
            m.learner()?;
        }
        let committee = self.committee();
        if committee.is_empty() {
            return Err(Error::InvalidArgument("committee has no members".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &committee {
            if !names.contains(c.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "committee member `{c}` is not a configured model"
                )));
            }
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "committee member `{c}` listed twice"
                )));
            }
        }
        Ok(())
    }
}
