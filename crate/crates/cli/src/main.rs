use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treevote::data::write_csv_string;
use treevote::ensemble::Model;
use treevote::pipeline::{
    accuracy_table, evaluate_models, evaluation_files, evaluation_sets, load_input, model_files,
    output_dir, parse_points_csv, render_svg, run_pipeline, screen, selection_files, train_models,
    Bundle, CurveKind, InputSpec, PipelineConfig, PipelineError, Stage, TrainedModels,
    COMMITTEE_NAME,
};
use treevote::Error;

/// Decision-tree ensembles over tabular CSV data.
#[derive(Parser)]
#[command(name = "treevote", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// For `gen`, the generator seed; otherwise the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic worker data (data.csv, schema.json).
    Gen(Common),
    /// Chi-square feature screening (features.csv, screened data.csv, schema.json).
    Select(Common),
    /// Screen features and train every configured model plus the committee.
    Train(Common),
    /// Evaluate models previously written by `train` into the output directory.
    Evaluate(Common),
    /// Run every stage and write the full report bundle.
    Pipeline(Common),
    /// Render SVG charts for the curve CSVs in the output directory.
    Render(Common),
}

fn load_config(
    common: &Common,
    generator_seed: bool,
) -> Result<(PipelineConfig, PathBuf), PipelineError> {
    let mut config =
        PipelineConfig::load(&common.config).map_err(|e| PipelineError::new(Stage::Config, e))?;
    if let Some(seed) = common.seed {
        match (&mut config.input, generator_seed) {
            (InputSpec::Synthetic { seed: s, .. }, true) => *s = seed,
            (_, true) => {}
            (_, false) => config.master_seed = seed,
        }
    }
    let out = output_dir(&config, common.out.as_deref());
    Ok((config, out))
}

fn gen(common: &Common) -> Result<(), PipelineError> {
    let (config, out) = load_config(common, true)?;
    if !matches!(config.input, InputSpec::Synthetic { .. }) {
        return Err(PipelineError::new(
            Stage::Config,
            Error::InvalidArgument("`gen` needs a synthetic input".into()),
        ));
    }
    let data = load_input(&config)?;
    let mut b = Bundle::default();
    b.insert("data.csv", write_csv_string(&data));
    b.insert("schema.json", data.schema().to_json() + "\n");
    b.write(&out)?;
    println!(
        "wrote {} rows to {}",
        data.len(),
        out.join("data.csv").display()
    );
    Ok(())
}

fn select(common: &Common) -> Result<(), PipelineError> {
    let (config, out) = load_config(common, false)?;
    let data = load_input(&config)?;
    let (report, screened) = screen(&config, &data)?;
    selection_files(&report, &screened).write(&out)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn train(common: &Common) -> Result<(), PipelineError> {
    let (config, out) = load_config(common, false)?;
    let data = load_input(&config)?;
    let (report, screened) = screen(&config, &data)?;
    let (train, _) = evaluation_sets(&config, &screened)?;
    let trained = train_models(&config, &train)?;
    let mut b = selection_files(&report, &screened);
    b.extend(model_files(&trained));
    b.write(&out)?;
    for (name, _) in trained.all() {
        println!("trained {name}");
    }
    Ok(())
}

fn read_model(dir: &Path, name: &str) -> Result<Model, PipelineError> {
    let path = dir.join("models").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| PipelineError::new(Stage::Data, Error::io(&path, e)))?;
    Model::from_json(&text).map_err(|e| PipelineError::new(Stage::Data, e))
}

fn evaluate(common: &Common) -> Result<(), PipelineError> {
    let (config, out) = load_config(common, false)?;
    let data = load_input(&config)?;
    let (_, screened) = screen(&config, &data)?;
    let (_, eval) = evaluation_sets(&config, &screened)?;
    let models = config
        .models
        .iter()
        .map(|m| Ok((m.name.clone(), read_model(&out, &m.name)?)))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let trained = TrainedModels {
        models,
        committee: read_model(&out, COMMITTEE_NAME)?,
    };
    let reports = evaluate_models(&trained, &eval)?;
    let (b, _) = evaluation_files(&reports, config.svg)?;
    b.write(&out)?;
    print!("{}", accuracy_table(&reports));
    Ok(())
}

fn pipeline(common: &Common) -> Result<(), PipelineError> {
    let (config, out) = load_config(common, false)?;
    let bundle = run_pipeline(&config)?;
    bundle.write(&out)?;
    print!("{}", bundle.accuracy_table);
    Ok(())
}

fn render(common: &Common) -> Result<(), PipelineError> {
    let (_, out) = load_config(common, false)?;
    let curves = out.join("curves");
    let data_err = |e| PipelineError::new(Stage::Data, e);
    let mut files: Vec<PathBuf> = Vec::new();
    let models = std::fs::read_dir(&curves).map_err(|e| data_err(Error::io(&curves, e)))?;
    for model in models {
        let model = model.map_err(|e| data_err(Error::io(&curves, e)))?.path();
        if !model.is_dir() {
            continue;
        }
        for entry in std::fs::read_dir(&model).map_err(|e| data_err(Error::io(&model, e)))? {
            let path = entry.map_err(|e| data_err(Error::io(&model, e)))?.path();
            if path.extension().is_some_and(|x| x == "csv") {
                files.push(path);
            }
        }
    }
    files.sort();
    let mut b = Bundle::default();
    let mut rendered = 0;
    for path in &files {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        let kind = if stem.starts_with("roc_") {
            CurveKind::Roc
        } else if stem.starts_with("gain_") {
            CurveKind::Gain
        } else {
            continue;
        };
        let text = std::fs::read_to_string(path).map_err(|e| data_err(Error::io(path, e)))?;
        let points = parse_points_csv(&text).map_err(data_err)?;
        if points.len() < 2 {
            // curve undefined for this class on the evaluation set
            continue;
        }
        let svg = render_svg(&points, kind, true).map_err(data_err)?;
        let rel = path.with_extension("svg");
        let rel = rel.strip_prefix(&out).unwrap_or(&rel);
        b.insert(rel.to_string_lossy().into_owned(), svg);
        rendered += 1;
    }
    b.write(&out)?;
    println!("rendered {rendered} charts");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(c) => gen(c),
        Command::Select(c) => select(c),
        Command::Train(c) => train(c),
        Command::Evaluate(c) => evaluate(c),
        Command::Pipeline(c) => pipeline(c),
        Command::Render(c) => render(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("treevote: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
