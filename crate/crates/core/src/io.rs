//! On-disk formats.
//!
//! Prediction sets travel as CSV (header `prob_0,..,prob_{N-1},label`) or
//! JSONL (one `{"probs": [..], "label": k}` object per line, optional
//! `"id"`). Accuracy vectors travel as a single JSON object. Floats are
//! written in shortest round-trip form, so write-then-read reproduces the
//! same values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetError, LabeledPredictionSet};
use crate::metrics::ClassAccuracyVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionFormat {
    Csv,
    Jsonl,
}

impl PredictionFormat {
    /// Infer the format from a file extension. `.csv` and `.jsonl`/`.ndjson`
    /// are recognized.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "jsonl" | "ndjson" => Some(Self::Jsonl),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Jsonl => "jsonl",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonlRow {
    probs: Vec<f64>,
    label: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
}

pub fn load_predictions(
    path: &Path,
    format: PredictionFormat,
) -> Result<LabeledPredictionSet, DatasetError> {
    match format {
        PredictionFormat::Csv => load_csv(path),
        PredictionFormat::Jsonl => load_jsonl(path),
    }
}

fn load_csv(path: &Path) -> Result<LabeledPredictionSet, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(csv_open_error)?;
    let headers = reader
        .headers()
        .map_err(|e| DatasetError::BadHeader(e.to_string()))?
        .clone();
    let n_classes = validate_csv_header(&headers)?;

    let mut probs = Vec::new();
    let mut labels = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| DatasetError::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if record.len() != n_classes + 1 {
            return Err(DatasetError::InconsistentWidth {
                row,
                expected: n_classes,
                found: record.len().saturating_sub(1),
            });
        }
        let mut row_probs = Vec::with_capacity(n_classes);
        for field in record.iter().take(n_classes) {
            let value: f64 = field.trim().parse().map_err(|_| DatasetError::MalformedRow {
                row,
                message: format!("cannot parse probability {field:?}"),
            })?;
            row_probs.push(value);
        }
        let label_field = &record[n_classes];
        let label: usize = label_field
            .trim()
            .parse()
            .map_err(|_| DatasetError::MalformedRow {
                row,
                message: format!("cannot parse label {label_field:?}"),
            })?;
        probs.push(row_probs);
        labels.push(label);
    }
    LabeledPredictionSet::new(probs, labels)
}

fn validate_csv_header(headers: &csv::StringRecord) -> Result<usize, DatasetError> {
    if headers.len() < 2 {
        return Err(DatasetError::BadHeader(format!(
            "expected prob_0,..,prob_{{N-1}},label, found {} column(s)",
            headers.len()
        )));
    }
    let n_classes = headers.len() - 1;
    for (i, name) in headers.iter().take(n_classes).enumerate() {
        let expected = format!("prob_{i}");
        if name != expected {
            return Err(DatasetError::BadHeader(format!(
                "column {i} is {name:?}, expected {expected:?}"
            )));
        }
    }
    if &headers[n_classes] != "label" {
        return Err(DatasetError::BadHeader(format!(
            "last column is {:?}, expected \"label\"",
            &headers[n_classes]
        )));
    }
    Ok(n_classes)
}

fn csv_open_error(e: csv::Error) -> DatasetError {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => DatasetError::Io(io),
            _ => unreachable!(),
        },
        _ => DatasetError::BadHeader(e.to_string()),
    }
}

fn load_jsonl(path: &Path) -> Result<LabeledPredictionSet, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut probs = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    let mut row = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        row += 1;
        let parsed: JsonlRow =
            serde_json::from_str(&line).map_err(|e| DatasetError::MalformedRow {
                row,
                message: e.to_string(),
            })?;
        probs.push(parsed.probs);
        labels.push(parsed.label);
        ids.push(parsed.id);
    }
    LabeledPredictionSet::new(probs, labels)?.with_ids(ids)
}

pub fn write_predictions(
    set: &LabeledPredictionSet,
    path: &Path,
    format: PredictionFormat,
) -> Result<(), DatasetError> {
    match format {
        PredictionFormat::Csv => write_csv(set, path),
        PredictionFormat::Jsonl => write_jsonl(set, path),
    }
}

fn write_csv(set: &LabeledPredictionSet, path: &Path) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_open_error)?;
    let mut header: Vec<String> = (0..set.n_classes()).map(|i| format!("prob_{i}")).collect();
    header.push("label".to_string());
    writer
        .write_record(&header)
        .map_err(|e| DatasetError::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
    for m in 0..set.n_instances() {
        let mut record: Vec<String> =
            set.prob_row(m).iter().map(|v| format!("{v}")).collect();
        record.push(set.labels()[m].to_string());
        writer
            .write_record(&record)
            .map_err(|e| DatasetError::MalformedRow {
                row: m + 1,
                message: e.to_string(),
            })?;
    }
    writer.flush().map_err(DatasetError::Io)?;
    Ok(())
}

fn write_jsonl(set: &LabeledPredictionSet, path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    for m in 0..set.n_instances() {
        let row = JsonlRow {
            probs: set.prob_row(m).to_vec(),
            label: set.labels()[m],
            id: set.ids()[m].clone(),
        };
        let line = serde_json::to_string(&row).expect("row serialization cannot fail");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct AccuracyFile {
    accuracies: Vec<f64>,
    #[serde(default)]
    supports: Option<Vec<usize>>,
    #[serde(default)]
    class_names: Option<Vec<String>>,
}

/// Load a bare accuracy vector: `{"accuracies": [..], "supports": [..],
/// "class_names": [..]}` with the latter two optional. Missing supports
/// default to one instance per class.
pub fn load_accuracy_vector(
    path: &Path,
) -> Result<(ClassAccuracyVector, Option<Vec<String>>), DatasetError> {
    let file = File::open(path)?;
    let parsed: AccuracyFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| DatasetError::MalformedRow {
            row: e.line().max(1),
            message: e.to_string(),
        })?;
    let n = parsed.accuracies.len();
    let supports = parsed.supports.unwrap_or_else(|| vec![1; n]);
    if let Some(names) = &parsed.class_names {
        if names.len() != n {
            return Err(DatasetError::ClassNameCount(names.len(), n));
        }
    }
    let vector = ClassAccuracyVector::new(parsed.accuracies, supports)?;
    Ok((vector, parsed.class_names))
}
