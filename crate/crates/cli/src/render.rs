//! Human-readable tables for stdout. Values render with two decimals;
//! undefined values render as "n/a". Relative changes render as an arrow
//! and an integer percent, e.g. "↓ 86%".

use crate::docs::{ChangeDoc, ImprovementDoc, MetricsDoc};

pub fn fmt_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}"),
        None => "n/a".to_string(),
    }
}

/// Signed relative change (after - before) / before. `None` when either
/// side is undefined or the baseline is zero, where the ratio says nothing.
pub fn relative_change(before: Option<f64>, after: Option<f64>) -> Option<f64> {
    let (before, after) = (before?, after?);
    if before == 0.0 {
        return None;
    }
    Some((after - before) / before)
}

pub fn change_display(relative: Option<f64>) -> String {
    match relative {
        None => "n/a".to_string(),
        Some(0.0) => "0%".to_string(),
        Some(r) => {
            let percent = (r.abs() * 100.0).round() as i64;
            let arrow = if r < 0.0 { '↓' } else { '↑' };
            format!("{arrow} {percent}%")
        }
    }
}

pub fn change(before: Option<f64>, after: Option<f64>) -> ChangeDoc {
    let relative = relative_change(before, after);
    ChangeDoc {
        before,
        after,
        relative,
        display: change_display(relative),
    }
}

pub fn improvement(before: &MetricsDoc, after: &MetricsDoc) -> ImprovementDoc {
    ImprovementDoc {
        mean_accuracy: change(Some(before.mean_accuracy), Some(after.mean_accuracy)),
        top_class_dominance: change(before.top_class_dominance, after.top_class_dominance),
        cobias: change(before.cobias, after.cobias),
        gini: change(before.gini, after.gini),
    }
}

fn class_label(doc: &MetricsDoc, class: usize) -> String {
    match &doc.class_names {
        Some(names) => names[class].clone(),
        None => format!("class {class}"),
    }
}

pub fn render_metrics(doc: &MetricsDoc) -> String {
    let mut out = String::new();
    let mut line = |label: &str, value: String| {
        out.push_str(&format!("{label:<22}{value}\n"));
    };
    line("classes", doc.n_classes.to_string());
    line("mean accuracy", fmt_metric(Some(doc.mean_accuracy)));
    line(
        "gini",
        format!(
            "{} (bound {})",
            fmt_metric(doc.gini),
            fmt_metric(Some(doc.max_gini_bound))
        ),
    );
    line("cobias", fmt_metric(doc.cobias));
    line("top-class dominance", fmt_metric(doc.top_class_dominance));
    out.push('\n');
    let with_support = doc.supports.len() == doc.n_classes;
    for class in 0..doc.n_classes {
        let support = if with_support {
            format!("  ({} instances)", doc.supports[class])
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{:<22}{}{}\n",
            class_label(doc, class),
            fmt_metric(Some(doc.accuracies[class])),
            support
        ));
    }
    if let Some(dropped) = &doc.dropped_classes {
        out.push_str(&format!(
            "\ndropped {} class(es) with no instances: {:?}\n",
            dropped.len(),
            dropped
        ));
    }
    out
}

pub fn render_comparison(
    before: &MetricsDoc,
    after: &MetricsDoc,
    improvement: &ImprovementDoc,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<22}{:>10}{:>10}   {}\n",
        "metric", "original", "debiased", "change"
    ));
    let mut row = |label: &str, change: &ChangeDoc| {
        out.push_str(&format!(
            "{label:<22}{:>10}{:>10}   {}\n",
            fmt_metric(change.before),
            fmt_metric(change.after),
            change.display
        ));
    };
    row("mean accuracy", &improvement.mean_accuracy);
    row("top-class dominance", &improvement.top_class_dominance);
    row("cobias", &improvement.cobias);
    row("gini", &improvement.gini);

    if before.n_classes == after.n_classes
        && before.accuracies.len() == after.accuracies.len()
        && before.dropped_classes.is_none()
        && after.dropped_classes.is_none()
    {
        out.push('\n');
        out.push_str(&format!(
            "{:<22}{:>10}{:>10}\n",
            "class", "original", "debiased"
        ));
        for class in 0..before.n_classes {
            out.push_str(&format!(
                "{:<22}{:>10}{:>10}\n",
                class_label(before, class),
                fmt_metric(Some(before.accuracies[class])),
                fmt_metric(Some(after.accuracies[class])),
            ));
        }
    }
    out
}
