//! End-to-end driver: load or generate data, screen features, train the
//! configured models and their committee, evaluate, and assemble the report
//! bundle. Every stage is also exposed on its own so the command-line tool
//! can run it on serialized intermediates.

mod config;
mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{
    Evaluation, InputSpec, Learner, ModelKind, ModelSpec, PipelineConfig, COMMITTEE_NAME,
};
pub use svg::{parse_points_csv, render_svg, CurveKind};

use crate::data::{
    generate_workers, load_csv_path, stratified_split, write_csv_string, Dataset, Schema,
};
use crate::ensemble::{bag, committee, train_boosted, train_random_forest, Model};
use crate::error::Error;
use crate::feature_select::{select_features, ChiSquareReport};
use crate::metrics::{
    evaluate, format_percent, frequency_report, points_csv, ConfusionMatrix, EvalSummary,
    Evaluation as ModelEvaluation, FrequencyReport,
};
use crate::rng::SeededRng;
use crate::tree::{train_cart, train_chaid, train_exhaustive_chaid};

/// Pipeline stage that failed; decides the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Data,
    Select,
    Train,
    Evaluate,
    Write,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 1,
            Stage::Data => 2,
            Stage::Select | Stage::Train | Stage::Evaluate => 3,
            Stage::Write => 4,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Data => "data load",
            Stage::Select => "feature selection",
            Stage::Train => "training",
            Stage::Evaluate => "evaluation",
            Stage::Write => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn new(stage: Stage, source: Error) -> Self {
        Self { stage, source }
    }

    pub fn exit_code(&self) -> i32 {
        self.stage.exit_code()
    }
}

pub type StageResult<T> = std::result::Result<T, PipelineError>;

fn at(stage: Stage) -> impl FnOnce(Error) -> PipelineError {
    move |e| PipelineError::new(stage, e)
}

/// Loads the CSV input or generates the synthetic worker data.
pub fn load_input(config: &PipelineConfig) -> StageResult<Dataset> {
    match &config.input {
        InputSpec::Synthetic { seed, n } => {
            let data = generate_workers(*seed, *n).map_err(at(Stage::Data))?;
            if let Some(path) = &config.schema {
                let schema = Schema::load(path).map_err(at(Stage::Data))?;
                if &schema != data.schema() {
                    return Err(PipelineError::new(
                        Stage::Data,
                        Error::Schema(format!(
                            "{} does not describe the synthetic worker data",
                            path.display()
                        )),
                    ));
                }
            }
            Ok(data)
        }
        InputSpec::Csv(path) => {
            let schema_path = config.schema.as_ref().ok_or_else(|| {
                PipelineError::new(
                    Stage::Config,
                    Error::InvalidArgument("csv input needs a schema".into()),
                )
            })?;
            let schema = Schema::load(schema_path).map_err(at(Stage::Data))?;
            load_csv_path(path, &schema).map_err(at(Stage::Data))
        }
    }
}

/// Chi-square screening; returns the report and the data restricted to
/// the retained features.
pub fn screen(config: &PipelineConfig, data: &Dataset) -> StageResult<(ChiSquareReport, Dataset)> {
    if data.classes_present() < 2 {
        return Err(PipelineError::new(
            Stage::Select,
            Error::Degenerate("the target takes a single class".into()),
        ));
    }
    let report = select_features(data, config.alpha).map_err(at(Stage::Select))?;
    let keep = report.retained();
    if keep.is_empty() {
        return Err(PipelineError::new(
            Stage::Select,
            Error::Degenerate(format!("no features retained at alpha {}", config.alpha)),
        ));
    }
    let projected = data.project(&keep).map_err(at(Stage::Select))?;
    Ok((report, projected))
}

/// `(training set, evaluation set)` per the configured evaluation mode.
pub fn evaluation_sets(config: &PipelineConfig, data: &Dataset) -> StageResult<(Dataset, Dataset)> {
    match config.evaluation {
        Evaluation::Resubstitution => Ok((data.clone(), data.clone())),
        Evaluation::Split {
            test_fraction,
            seed,
        } => {
            let mut rng = SeededRng::new(seed);
            stratified_split(data, test_fraction, &mut rng).map_err(at(Stage::Select))
        }
    }
}

/// Configured models in order, followed by the committee.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels {
    pub models: Vec<(String, Model)>,
    pub committee: Model,
}

impl TrainedModels {
    /// All models including the committee (last, named [`COMMITTEE_NAME`]).
    pub fn all(&self) -> impl Iterator<Item = (&str, &Model)> {
        self.models
            .iter()
            .map(|(n, m)| (n.as_str(), m))
            .chain(std::iter::once((COMMITTEE_NAME, &self.committee)))
    }
}

/// Trains model `i` of the config with randomness from
/// `SeededRng::new(master_seed).derive(i)`.
pub fn train_models(config: &PipelineConfig, train: &Dataset) -> StageResult<TrainedModels> {
    let master = SeededRng::new(config.master_seed);
    let mut models = Vec::with_capacity(config.models.len());
    for (i, spec) in config.models.iter().enumerate() {
        let learner = spec.learner().map_err(at(Stage::Config))?;
        let rng = master.derive(i as u64);
        let fail = |e: Error| {
            PipelineError::new(
                Stage::Train,
                Error::Degenerate(format!("model `{}`: {e}", spec.name)),
            )
        };
        let model: Model = match learner {
            Learner::Cart(p) => train_cart(train, &p).map_err(fail)?.into(),
            Learner::Chaid(p) => train_chaid(train, &p).map_err(fail)?.into(),
            Learner::ExhaustiveChaid(p) => train_exhaustive_chaid(train, &p).map_err(fail)?.into(),
            Learner::Boosted(p) => train_boosted(train, &p).map_err(fail)?.into(),
            Learner::RandomForest(mut p) => {
                p.parallel |= config.parallel;
                train_random_forest(train, &p, &rng).map_err(fail)?.into()
            }
            Learner::Bagged(mut p) => {
                p.parallel |= config.parallel;
                bag(train, &p, &rng).map_err(fail)?.into()
            }
        };
        models.push((spec.name.clone(), model));
    }
    let committee = assemble_committee(config, &models)?;
    Ok(TrainedModels { models, committee })
}

/// Committee over the configured members, taken from `models` by name.
pub fn assemble_committee(
    config: &PipelineConfig,
    models: &[(String, Model)],
) -> StageResult<Model> {
    let members = config
        .committee()
        .iter()
        .map(|name| {
            models
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| {
                    PipelineError::new(
                        Stage::Config,
                        Error::InvalidArgument(format!(
                            "committee member `{name}` was not trained"
                        )),
                    )
                })
        })
        .collect::<StageResult<Vec<_>>>()?;
    Ok(committee(members).map_err(at(Stage::Train))?.into())
}

/// One model's evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub name: String,
    pub evaluation: ModelEvaluation,
}

pub fn evaluate_models(trained: &TrainedModels, eval: &Dataset) -> StageResult<Vec<ModelReport>> {
    trained
        .all()
        .map(|(name, model)| {
            let predictions = model.predict_dataset(eval).map_err(at(Stage::Evaluate))?;
            let evaluation = evaluate(&predictions, eval.labels(), eval.schema().classes())
                .map_err(at(Stage::Evaluate))?;
            Ok(ModelReport {
                name: name.to_string(),
                evaluation,
            })
        })
        .collect()
}

/// Console table of accuracies, one row per model plus `Voted`.
pub fn accuracy_table(reports: &[ModelReport]) -> String {
    let label = |n: &str| {
        if n == COMMITTEE_NAME {
            "Voted".to_string()
        } else {
            n.to_string()
        }
    };
    let width = reports
        .iter()
        .map(|r| label(&r.name).len())
        .max()
        .unwrap_or(0)
        .max(5);
    let mut out = format!(
        "{:<width$}  {:>8}  {:>10}  {:>10}\n",
        "Model", "Accuracy", "Error rate", "Std error"
    );
    for r in reports {
        let cm = &r.evaluation.confusion;
        let s = &r.evaluation.summary;
        out.push_str(&format!(
            "{:<width$}  {:>8}  {:>10.6}  {:>10.6}\n",
            label(&r.name),
            format_percent(cm.trace(), cm.total()),
            s.error_rate,
            s.std_error
        ));
    }
    out
}

/// Relative path → file contents, written only after everything is computed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bundle {
    pub files: BTreeMap<String, String>,
}

impl Bundle {
    pub fn insert(&mut self, path: impl Into<String>, contents: impl Into<String>) {
        self.files.insert(path.into(), contents.into());
    }

    pub fn extend(&mut self, other: Bundle) {
        self.files.extend(other.files);
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    pub fn write(&self, dir: &Path) -> StageResult<()> {
        for (rel, contents) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| PipelineError::new(Stage::Write, Error::io(parent, e)))?;
            }
            std::fs::write(&path, contents)
                .map_err(|e| PipelineError::new(Stage::Write, Error::io(&path, e)))?;
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

/// Feature report, retained-column schema and the screened data.
pub fn selection_files(report: &ChiSquareReport, screened: &Dataset) -> Bundle {
    let mut b = Bundle::default();
    b.insert("features.csv", report.to_csv());
    b.insert("schema.json", screened.schema().to_json() + "\n");
    b.insert("data.csv", write_csv_string(screened));
    b
}

pub fn model_files(trained: &TrainedModels) -> Bundle {
    let mut b = Bundle::default();
    for (name, model) in trained.all() {
        b.insert(format!("models/{name}.json"), model.to_json() + "\n");
    }
    b
}

/// File-name stems for the classes; falls back to indices on collisions.
fn class_stems(classes: &[String]) -> Vec<String> {
    let clean: Vec<String> = classes
        .iter()
        .map(|c| {
            c.chars()
                .map(|ch| {
                    if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' {
                        ch
                    } else {
                        '_'
                    }
                })
                .collect()
        })
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    if clean
        .iter()
        .all(|c| !c.is_empty() && seen.insert(c.clone()))
    {
        clean
    } else {
        (0..classes.len()).map(|i| format!("class{i}")).collect()
    }
}

#[derive(Serialize)]
struct ModelSummaryDoc<'a> {
    model: &'a str,
    summary: &'a EvalSummary,
    confusion: &'a ConfusionMatrix,
}

/// Summaries, confusion matrices, curves and the committee's frequency report.
pub fn evaluation_files(
    reports: &[ModelReport],
    svg: bool,
) -> StageResult<(Bundle, FrequencyReport)> {
    let mut b = Bundle::default();
    let mut frequency = None;
    let mut rows = Vec::new();
    for r in reports {
        let ev = &r.evaluation;
        let doc = ModelSummaryDoc {
            model: &r.name,
            summary: &ev.summary,
            confusion: &ev.confusion,
        };
        b.insert(format!("evaluation/{}.json", r.name), json(&doc));
        rows.push(doc);
        let stems = class_stems(&ev.confusion.classes);
        for (c, stem) in stems.iter().enumerate() {
            let roc = ev.roc[c]
                .as_ref()
                .map(|r| r.points.as_slice())
                .unwrap_or(&[]);
            let gain = ev.gain[c]
                .as_ref()
                .map(|g| g.points.as_slice())
                .unwrap_or(&[]);
            let roc_csv = points_csv("fpr", "tpr", roc);
            let gain_csv = points_csv("targeted", "captured", gain);
            if svg {
                // drawn from the written points so `render` reproduces the chart exactly
                for (kind, prefix, text) in [
                    (CurveKind::Roc, "roc", &roc_csv),
                    (CurveKind::Gain, "gain", &gain_csv),
                ] {
                    let pts = parse_points_csv(text).map_err(at(Stage::Evaluate))?;
                    if pts.len() >= 2 {
                        let chart = render_svg(&pts, kind, true).map_err(at(Stage::Evaluate))?;
                        b.insert(format!("curves/{}/{prefix}_{stem}.svg", r.name), chart);
                    }
                }
            }
            b.insert(format!("curves/{}/roc_{stem}.csv", r.name), roc_csv);
            b.insert(format!("curves/{}/gain_{stem}.csv", r.name), gain_csv);
        }
        if r.name == COMMITTEE_NAME {
            let f = frequency_report(&ev.confusion).map_err(at(Stage::Evaluate))?;
            b.insert("frequency.txt", f.to_text());
            b.insert("frequency.csv", f.to_csv());
            frequency = Some(f);
        }
    }
    b.insert("summary.json", json(&rows));
    b.insert("accuracy.txt", accuracy_table(reports));
    let frequency = frequency.ok_or_else(|| {
        PipelineError::new(
            Stage::Evaluate,
            Error::InvalidArgument("no committee among the evaluated models".into()),
        )
    })?;
    Ok((b, frequency))
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub features: ChiSquareReport,
    pub trained: TrainedModels,
    /// Configured models in order, then the committee.
    pub reports: Vec<ModelReport>,
    pub frequency: FrequencyReport,
    pub accuracy_table: String,
    pub files: Bundle,
}

impl ReportBundle {
    pub fn report(&self, name: &str) -> Option<&ModelReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn committee(&self) -> &ModelReport {
        self.report(COMMITTEE_NAME)
            .expect("bundle always holds the committee")
    }

    pub fn write(&self, dir: &Path) -> StageResult<()> {
        self.files.write(dir)
    }
}

/// Runs every stage in memory; nothing touches the filesystem except
/// reading the input.
pub fn run_pipeline(config: &PipelineConfig) -> StageResult<ReportBundle> {
    config.validate().map_err(at(Stage::Config))?;
    let data = load_input(config)?;
    let (features, screened) = screen(config, &data)?;
    let (train, eval) = evaluation_sets(config, &screened)?;
    let trained = train_models(config, &train)?;
    let reports = evaluate_models(&trained, &eval)?;
    let mut files = Bundle::default();
    files.insert("features.csv", features.to_csv());
    files.insert("schema.json", screened.schema().to_json() + "\n");
    files.extend(model_files(&trained));
    let (eval_files, frequency) = evaluation_files(&reports, config.svg)?;
    files.extend(eval_files);
    Ok(ReportBundle {
        features,
        trained,
        accuracy_table: accuracy_table(&reports),
        reports,
        frequency,
        files,
    })
}

/// Output directory, honouring an override.
pub fn output_dir(config: &PipelineConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir.clone())
}
