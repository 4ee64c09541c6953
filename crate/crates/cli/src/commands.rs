//! Subcommand implementations. Every command follows the same shape:
//! resolve configuration, load inputs, do the work through the library,
//! write machine-readable documents (with manifests) and a human summary.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use ginidebias::correction::corrected_predict;
use ginidebias::{
    anneal, evaluate_on_test, load_accuracy_vector, load_predictions, metrics_report,
    per_class_accuracy, split, synthesize, write_predictions, ClassAccuracyVector,
    CorrectionError, DatasetError, LabeledPredictionSet, OptimizerError, PredictionFormat,
    SelectionVector, SplitSpec, SynthSpec,
};

use crate::args::{
    ApplyArgs, Command, FormatArg, MetricsArgs, OptimizeArgs, ReportArgs, SynthArgs,
};
use crate::config::{self, RunOverrides};
use crate::docs::{
    check_schema_version, read_json, write_json, ApplyReportDoc, ArtifactDoc, ComparisonDoc,
    Manifest, ManifestDoc, MetricsDoc, OptimizeReportDoc, SCHEMA_VERSION,
};
use crate::error::CliError;
use crate::render;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Metrics(args) => cmd_metrics(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Apply(args) => cmd_apply(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn dataset_error(e: DatasetError) -> CliError {
    match &e {
        DatasetError::BadFraction(_) | DatasetError::BadSynthSpec(_) => {
            CliError::config(e.to_string())
        }
        DatasetError::SplitInfeasible(_) | DatasetError::MissingClass { .. } => {
            CliError::infeasible(e.to_string())
        }
        _ => CliError::data(e.to_string()),
    }
}

fn correction_error(e: CorrectionError) -> CliError {
    match e {
        CorrectionError::Dataset(inner) => dataset_error(inner),
        other => CliError::data(other.to_string()),
    }
}

fn optimizer_error(e: OptimizerError) -> CliError {
    match e {
        OptimizerError::BadConfig(_) => CliError::config(e.to_string()),
        OptimizerError::BudgetExceeded { .. } => CliError::infeasible(e.to_string()),
        OptimizerError::Dataset(inner) => dataset_error(inner),
        OptimizerError::Correction(inner) => correction_error(inner),
        OptimizerError::Metrics(inner) => CliError::data(inner.to_string()),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::data(format!("{}: {e}", path.display()))
}

/// Pick the input format: an explicit flag wins, otherwise the extension
/// decides (.csv, .jsonl/.ndjson, .json for accuracy vectors).
fn resolve_format(path: &Path, arg: Option<FormatArg>) -> Result<FormatArg, CliError> {
    if let Some(format) = arg {
        return Ok(format);
    }
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        return Ok(FormatArg::Accuracy);
    }
    match PredictionFormat::from_path(path) {
        Some(PredictionFormat::Csv) => Ok(FormatArg::Csv),
        Some(PredictionFormat::Jsonl) => Ok(FormatArg::Jsonl),
        None => Err(CliError::config(format!(
            "cannot infer the format of {}; pass --format",
            path.display()
        ))),
    }
}

fn resolve_prediction_format(
    path: &Path,
    arg: Option<FormatArg>,
) -> Result<PredictionFormat, CliError> {
    match resolve_format(path, arg)? {
        FormatArg::Csv => Ok(PredictionFormat::Csv),
        FormatArg::Jsonl => Ok(PredictionFormat::Jsonl),
        FormatArg::Accuracy => Err(CliError::config(format!(
            "{} is an accuracy vector; this command needs per-instance predictions",
            path.display()
        ))),
    }
}

fn format_name(format: FormatArg) -> &'static str {
    match format {
        FormatArg::Csv => "csv",
        FormatArg::Jsonl => "jsonl",
        FormatArg::Accuracy => "accuracy",
    }
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let format = resolve_format(&args.input, args.format)?;
    let (vector, names) = match format {
        FormatArg::Accuracy => load_accuracy_vector(&args.input).map_err(dataset_error)?,
        FormatArg::Csv | FormatArg::Jsonl => {
            let prediction_format = resolve_prediction_format(&args.input, Some(format))?;
            let set = load_predictions(&args.input, prediction_format).map_err(dataset_error)?;
            let accuracy =
                per_class_accuracy(&set, &set.predictions(), false).map_err(dataset_error)?;
            (accuracy, set.class_names().map(<[String]>::to_vec))
        }
    };

    let dropped: Vec<usize> = vector
        .supports()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0)
        .map(|(class, _)| class)
        .collect();
    if args.strict && !dropped.is_empty() {
        return Err(CliError::data(format!(
            "class(es) {dropped:?} have no instances; drop --strict to skip them"
        )));
    }
    let (vector, names, dropped) = if dropped.is_empty() {
        (vector, names, None)
    } else {
        eprintln!(
            "warning: dropping {} class(es) with no instances: {dropped:?}",
            dropped.len()
        );
        let keep: Vec<usize> = (0..vector.n_classes())
            .filter(|class| !dropped.contains(class))
            .collect();
        let accuracies = keep.iter().map(|&c| vector.accuracies()[c]).collect();
        let supports = keep.iter().map(|&c| vector.supports()[c]).collect();
        let names = names.map(|all| keep.iter().map(|&c| all[c].clone()).collect());
        let filtered = ClassAccuracyVector::new(accuracies, supports)
            .map_err(|_| CliError::data("every class has zero instances"))?;
        (filtered, names, Some(dropped))
    };

    if args.strict && vector.n_classes() < 2 {
        return Err(CliError::data(
            "only one measurable class; pairwise metrics are undefined",
        ));
    }

    let manifest = Manifest::new(
        "metrics",
        None,
        &[("input", args.input.as_path())],
        json!({ "format": format_name(format), "strict": args.strict }),
    )?;
    let doc = if vector.n_classes() >= 2 {
        let report = metrics_report(&vector).map_err(|e| CliError::data(e.to_string()))?;
        let mut doc = MetricsDoc::from_report(&report, names, Some(manifest));
        doc.dropped_classes = dropped;
        doc
    } else {
        // A single class still has a mean and a trivial gini, but no pair
        // to compare, so cobias renders as n/a.
        MetricsDoc {
            schema_version: SCHEMA_VERSION,
            n_classes: 1,
            class_names: names,
            accuracies: vector.accuracies().to_vec(),
            supports: vector.supports().to_vec(),
            dropped_classes: dropped,
            mean_accuracy: vector.mean_accuracy(),
            gini: vector.gini(),
            cobias: None,
            top_class_dominance: vector.top_class_dominance(),
            max_gini_bound: 0.0,
            manifest: Some(manifest),
        }
    };

    print!("{}", render::render_metrics(&doc));
    if let Some(out) = &args.out {
        write_json(out, &doc)?;
    }
    Ok(())
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let format = resolve_prediction_format(&args.input, args.format)?;
    let config = config::resolve(
        args.config.as_deref(),
        RunOverrides {
            seed: args.seed,
            objective: args.objective.map(Into::into),
            optimization_fraction: args.split,
            stratified: args.stratified,
            strict: false,
        },
    )?;
    let set = load_predictions(&args.input, format).map_err(dataset_error)?;
    let n_classes = set.n_classes();
    let map = config.map.build();
    if map.len() == 1 {
        eprintln!(
            "warning: the correction map holds only the identity; \
             the search cannot change any prediction"
        );
    }
    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;

    let mut manifest_inputs: Vec<(&str, &Path)> = vec![("input", args.input.as_path())];
    if let Some(path) = &args.config {
        manifest_inputs.push(("config", path));
    }
    if let Some(path) = &args.test {
        manifest_inputs.push(("test", path));
    }
    let manifest = Manifest::new(
        "optimize",
        Some(config.seed),
        &manifest_inputs,
        serde_json::to_value(&config).expect("config serializes"),
    )?;

    let (opt_part, test_part, split_path) = match &args.test {
        Some(path) => {
            let test_format = resolve_prediction_format(path, args.format)?;
            let test_set = load_predictions(path, test_format).map_err(dataset_error)?;
            if test_set.n_classes() != n_classes {
                return Err(CliError::data(format!(
                    "--test has {} classes, --input has {n_classes}",
                    test_set.n_classes()
                )));
            }
            (set, test_set, None)
        }
        None => {
            let spec = SplitSpec {
                optimization_fraction: config.optimization_fraction,
                seed: config.seed,
                stratified: config.stratified,
            };
            let (opt_part, test_part) = split(&set, &spec).map_err(dataset_error)?;
            let path = args.out.join(format!("test_split.{}", format.extension()));
            write_predictions(&test_part, &path, format).map_err(dataset_error)?;
            (opt_part, test_part, Some(path))
        }
    };

    let result = anneal(&opt_part, &map, config.objective, &config.anneal)
        .map_err(optimizer_error)?;

    let original_accuracy = per_class_accuracy(&test_part, &test_part.predictions(), true)
        .map_err(|e| match dataset_error(e) {
            CliError::Infeasible(msg) => CliError::infeasible(format!(
                "{msg} in the held-out part; try --stratified or a larger test share"
            )),
            other => other,
        })?;
    let original_report =
        metrics_report(&original_accuracy).map_err(|e| CliError::data(e.to_string()))?;
    let debiased_report =
        evaluate_on_test(&test_part, &result.best_xi, &map).map_err(optimizer_error)?;

    let names = test_part.class_names().map(<[String]>::to_vec);
    let original_doc = MetricsDoc::from_report(&original_report, names.clone(), None);
    let debiased_doc = MetricsDoc::from_report(&debiased_report, names.clone(), None);
    let improvement = render::improvement(&original_doc, &debiased_doc);

    let artifact = ArtifactDoc {
        schema_version: SCHEMA_VERSION,
        n_classes,
        objective: config.objective,
        functions: map.clone(),
        xi: result.best_xi.indices().to_vec(),
        class_names: names,
        manifest: Some(manifest.clone()),
    };
    let artifact_path = args.out.join("artifact.json");
    write_json(&artifact_path, &artifact)?;

    let report_doc = OptimizeReportDoc {
        schema_version: SCHEMA_VERSION,
        objective: config.objective,
        initial_objective: result.initial_objective,
        best_objective: result.best_objective,
        evaluations: result.evaluations,
        objective_trace: result.objective_trace.clone(),
        xi: result.best_xi.indices().to_vec(),
        original_test_metrics: original_doc.clone(),
        debiased_test_metrics: debiased_doc.clone(),
        improvement: improvement.clone(),
        manifest: Some(manifest),
    };
    write_json(&args.out.join("optimize_report.json"), &report_doc)?;

    println!(
        "objective {}: initial {:.6} -> best {:.6} ({} evaluations)",
        config.objective.name(),
        result.initial_objective,
        result.best_objective,
        result.evaluations
    );
    println!("artifact: {}", artifact_path.display());
    if let Some(path) = split_path {
        println!("held-out part: {}", path.display());
    }
    println!();
    print!(
        "{}",
        render::render_comparison(&original_doc, &debiased_doc, &improvement)
    );
    Ok(())
}

fn cmd_apply(args: ApplyArgs) -> Result<(), CliError> {
    let format = resolve_prediction_format(&args.input, args.format)?;
    let set = load_predictions(&args.input, format).map_err(dataset_error)?;
    let artifact: ArtifactDoc = read_json(&args.artifact)?;
    check_schema_version(artifact.schema_version, &args.artifact)?;
    if artifact.n_classes != set.n_classes() {
        return Err(CliError::data(format!(
            "artifact was built for {} classes, {} has {}",
            artifact.n_classes,
            args.input.display(),
            set.n_classes()
        )));
    }
    if artifact.xi.len() != set.n_classes() {
        return Err(CliError::data(format!(
            "artifact selection has {} entries for {} classes",
            artifact.xi.len(),
            set.n_classes()
        )));
    }
    let map = artifact.functions.clone();
    let xi = SelectionVector::new(artifact.xi.clone(), &map)
        .map_err(|e| CliError::data(format!("{}: {e}", args.artifact.display())))?;

    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let original = set.predictions();
    let corrected: Vec<usize> = (0..set.n_instances())
        .map(|m| corrected_predict(set.prob_row(m), &xi, &map))
        .collect();
    let changed = original
        .iter()
        .zip(&corrected)
        .filter(|(a, b)| a != b)
        .count();

    let corrected_path = args.out.join("corrected.csv");
    write_corrected_csv(&corrected_path, &set, &original, &corrected)?;

    let original_accuracy =
        per_class_accuracy(&set, &original, false).map_err(dataset_error)?;
    let corrected_accuracy =
        per_class_accuracy(&set, &corrected, false).map_err(dataset_error)?;
    let (original_metrics, corrected_metrics) = if original_accuracy.fully_supported() {
        let names = set.class_names().map(<[String]>::to_vec);
        let before = metrics_report(&original_accuracy)
            .map_err(|e| CliError::data(e.to_string()))?;
        let after = metrics_report(&corrected_accuracy)
            .map_err(|e| CliError::data(e.to_string()))?;
        (
            Some(MetricsDoc::from_report(&before, names.clone(), None)),
            Some(MetricsDoc::from_report(&after, names, None)),
        )
    } else {
        eprintln!("warning: some classes have no instances here; metrics omitted");
        (None, None)
    };

    let manifest = Manifest::new(
        "apply",
        None,
        &[
            ("input", args.input.as_path()),
            ("artifact", args.artifact.as_path()),
        ],
        json!({ "format": format.extension() }),
    )?;
    let report = ApplyReportDoc {
        schema_version: SCHEMA_VERSION,
        n_instances: set.n_instances(),
        n_classes: set.n_classes(),
        changed,
        original_metrics,
        corrected_metrics,
        manifest: Some(manifest),
    };
    write_json(&args.out.join("apply_report.json"), &report)?;

    println!(
        "{} instance(s), {} prediction(s) changed",
        set.n_instances(),
        changed
    );
    println!("corrected predictions: {}", corrected_path.display());
    if let (Some(before), Some(after)) = (&report.original_metrics, &report.corrected_metrics) {
        println!();
        let improvement = render::improvement(before, after);
        print!("{}", render::render_comparison(before, after, &improvement));
    }
    Ok(())
}

fn write_corrected_csv(
    path: &PathBuf,
    set: &LabeledPredictionSet,
    original: &[usize],
    corrected: &[usize],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    writer
        .write_record(["id", "original", "corrected"])
        .map_err(|e| CliError::data(e.to_string()))?;
    for m in 0..set.n_instances() {
        let id = set.ids()[m].clone().unwrap_or_else(|| m.to_string());
        writer
            .write_record([id, original[m].to_string(), corrected[m].to_string()])
            .map_err(|e| CliError::data(e.to_string()))?;
    }
    writer.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let seed = args.seed.unwrap_or(0);
    let instances_per_class = parse_count_list(&args.per_class, args.classes)?;
    let head_classes = parse_index_set(&args.head_classes)?;
    let spec = SynthSpec {
        n_classes: args.classes,
        instances_per_class,
        head_bias: args.head_bias,
        head_classes,
        noise_scale: args.noise,
        seed,
    };
    let set = synthesize(&spec).map_err(dataset_error)?;

    let format = match args.format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => PredictionFormat::Csv,
        FormatArg::Jsonl => PredictionFormat::Jsonl,
        FormatArg::Accuracy => {
            return Err(CliError::config(
                "synth produces per-instance predictions; --format accuracy is not writable",
            ))
        }
    };
    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let data_path = args.out.join(format!("synth.{}", format.extension()));
    write_predictions(&set, &data_path, format).map_err(dataset_error)?;

    let manifest = Manifest::new(
        "synth",
        Some(seed),
        &[],
        json!({
            "n_classes": spec.n_classes,
            "instances_per_class": spec.instances_per_class,
            "head_bias": spec.head_bias,
            "head_classes": spec.head_classes,
            "noise_scale": spec.noise_scale,
            "seed": spec.seed,
            "format": format.extension(),
        }),
    )?;
    write_json(
        &args.out.join("manifest.json"),
        &ManifestDoc {
            schema_version: SCHEMA_VERSION,
            manifest,
        },
    )?;

    let accuracy =
        per_class_accuracy(&set, &set.predictions(), true).map_err(dataset_error)?;
    let report = metrics_report(&accuracy).map_err(|e| CliError::data(e.to_string()))?;
    let doc = MetricsDoc::from_report(&report, None, None);
    println!("wrote {}", data_path.display());
    println!();
    print!("{}", render::render_metrics(&doc));
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let before: MetricsDoc = read_json(&args.before)?;
    check_schema_version(before.schema_version, &args.before)?;
    let after: MetricsDoc = read_json(&args.after)?;
    check_schema_version(after.schema_version, &args.after)?;

    let improvement = render::improvement(&before, &after);
    let manifest = Manifest::new(
        "report",
        None,
        &[
            ("before", args.before.as_path()),
            ("after", args.after.as_path()),
        ],
        json!({}),
    )?;
    print!(
        "{}",
        render::render_comparison(&before, &after, &improvement)
    );
    if let Some(out) = &args.out {
        let doc = ComparisonDoc {
            schema_version: SCHEMA_VERSION,
            improvement,
            before,
            after,
            manifest: Some(manifest),
        };
        write_json(out, &doc)?;
    }
    Ok(())
}

fn parse_count_list(text: &str, classes: usize) -> Result<Vec<usize>, CliError> {
    let counts: Vec<usize> = text
        .split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| CliError::config(format!("bad count {part:?} in --per-class")))
        })
        .collect::<Result<_, _>>()?;
    match counts.len() {
        0 => Err(CliError::config("--per-class must not be empty")),
        1 => Ok(vec![counts[0]; classes]),
        n if n == classes => Ok(counts),
        n => Err(CliError::config(format!(
            "--per-class has {n} entries for {classes} classes"
        ))),
    }
}

fn parse_index_set(text: &str) -> Result<BTreeSet<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| CliError::config(format!("bad index {part:?} in --head-classes")))
        })
        .collect()
}
