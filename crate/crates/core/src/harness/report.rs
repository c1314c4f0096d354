//! Experiment report rows, CSV/SVG emission, and aggregation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub defense: String,
    pub fraction: f64,
    pub trial: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub wall_ms: u64,
}

/// A failed pipeline stage: the run continues, the row is recorded here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunError {
    pub defense: String,
    pub fraction: f64,
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub errors: Vec<RunError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub defense: String,
    pub fraction: f64,
    pub trials: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_f1: f64,
    pub std_f1: f64,
}

impl ExperimentReport {
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            a.defense
                .cmp(&b.defense)
                .then(a.fraction.total_cmp(&b.fraction))
                .then(a.trial.cmp(&b.trial))
        });
    }

    /// Mean and sample standard deviation per (defense, fraction) cell, in
    /// row order.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut sorted = self.clone();
        sorted.sort_rows();
        let mut out: Vec<AggregateRow> = Vec::new();
        let mut group: Vec<&ReportRow> = Vec::new();

        let flush = |group: &mut Vec<&ReportRow>, out: &mut Vec<AggregateRow>| {
            if group.is_empty() {
                return;
            }
            let n = group.len() as f64;
            let mean = |f: &dyn Fn(&ReportRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
            let std = |f: &dyn Fn(&ReportRow) -> f64, mu: f64| {
                if group.len() < 2 {
                    0.0
                } else {
                    (group.iter().map(|r| (f(r) - mu).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                }
            };
            let acc = |r: &ReportRow| r.accuracy;
            let f1v = |r: &ReportRow| r.f1;
            let mean_accuracy = mean(&acc);
            let mean_f1 = mean(&f1v);
            out.push(AggregateRow {
                defense: group[0].defense.clone(),
                fraction: group[0].fraction,
                trials: group.len(),
                mean_accuracy,
                std_accuracy: std(&acc, mean_accuracy),
                mean_f1,
                std_f1: std(&f1v, mean_f1),
            });
            group.clear();
        };

        for row in &sorted.rows {
            if let Some(first) = group.first() {
                if first.defense != row.defense || first.fraction != row.fraction {
                    flush(&mut group, &mut out);
                }
            }
            group.push(row);
        }
        flush(&mut group, &mut out);
        out
    }

    pub fn defenses(&self) -> Vec<String> {
        let mut names: Vec<String> = self.rows.iter().map(|r| r.defense.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Writes `defense,fraction,trial,accuracy,f1,wall_ms` rows in sorted order.
/// Floats use the shortest round-trippable representation.
pub fn emit_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if report.rows.is_empty() {
        return Err(Error::EmptyData("nothing to emit".into()));
    }
    let mut sorted = report.clone();
    sorted.sort_rows();
    let mut out = String::from("defense,fraction,trial,accuracy,f1,wall_ms\n");
    for r in &sorted.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.defense, r.fraction, r.trial, r.accuracy, r.f1, r.wall_ms
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Parses the CSV written by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<ExperimentReport> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if line != "defense,fraction,trial,accuracy,f1,wall_ms" {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unexpected header `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad float `{s}`"),
            })
        };
        let parse_u = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad integer `{s}`"),
            })
        };
        rows.push(ReportRow {
            defense: fields[0].to_string(),
            fraction: parse_f(fields[1])?,
            trial: parse_u(fields[2])? as usize,
            accuracy: parse_f(fields[3])?,
            f1: parse_f(fields[4])?,
            wall_ms: parse_u(fields[5])?,
        });
    }
    Ok(ExperimentReport {
        rows,
        errors: Vec::new(),
    })
}

const SVG_COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Line chart of mean accuracy vs fraction, one polyline per defense.
pub fn emit_svg(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if report.rows.is_empty() {
        return Err(Error::EmptyData("nothing to emit".into()));
    }
    let aggregates = report.aggregate();
    let defenses = report.defenses();

    let (width, height) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (60.0, 150.0, 20.0, 45.0);
    let plot_w = width - ml - mr;
    let plot_h = height - mt - mb;

    let mut fractions: Vec<f64> = aggregates.iter().map(|a| a.fraction).collect();
    fractions.sort_by(f64::total_cmp);
    fractions.dedup();
    let (fmin, fmax) = (fractions[0], *fractions.last().expect("nonempty"));
    let span = if fmax > fmin { fmax - fmin } else { 1.0 };

    let x_of = |f: f64| ml + (f - fmin) / span * plot_w;
    let y_of = |a: f64| mt + (1.0 - a.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + plot_h,
        ml + plot_w,
        mt + plot_h
    ));
    svg.push_str(&format!(
        "  <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + plot_h
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">poisoned fraction</text>\n",
        ml + plot_w / 2.0,
        height - 8.0
    ));
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">mean accuracy</text>\n",
        mt + plot_h / 2.0,
        mt + plot_h / 2.0
    ));
    for f in &fractions {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{f}</text>\n",
            x_of(*f),
            mt + plot_h + 16.0
        ));
    }
    for tick in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{tick}</text>\n",
            ml - 6.0,
            y_of(tick) + 3.0
        ));
    }

    for (di, defense) in defenses.iter().enumerate() {
        let color = SVG_COLORS[di % SVG_COLORS.len()];
        let mut pts: Vec<(f64, f64)> = aggregates
            .iter()
            .filter(|a| &a.defense == defense)
            .map(|a| (a.fraction, a.mean_accuracy))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path_points: Vec<String> = pts
            .iter()
            .map(|(f, a)| format!("{:.2},{:.2}", x_of(*f), y_of(*a)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            path_points.join(" ")
        ));
        for (f, a) in &pts {
            svg.push_str(&format!(
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                x_of(*f),
                y_of(*a)
            ));
        }
        let ly = mt + 16.0 + 18.0 * di as f64;
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            ml + plot_w + 10.0,
            ml + plot_w + 34.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{defense}</text>\n",
            ml + plot_w + 40.0,
            ly + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
