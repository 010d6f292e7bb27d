use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Roc,
    Gain,
}

impl CurveKind {
    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            CurveKind::Roc => ("false positive rate", "true positive rate"),
            CurveKind::Gain => ("fraction targeted", "fraction captured"),
        }
    }
}

fn coord(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// Standalone SVG of a curve in the unit square. The viewBox is
/// `0 0 1000 1000` and point `(x, y)` is drawn at `(1000x, 1000 − 1000y)`.
pub fn render_svg(points: &[(f64, f64)], kind: CurveKind, baseline: bool) -> Result<String> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a curve needs at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some((x, y)) = points
        .iter()
        .find(|(x, y)| !((0.0..=1.0).contains(x) && (0.0..=1.0).contains(y)))
    {
        return Err(Error::InvalidArgument(format!(
            "point ({x}, {y}) outside the unit square"
        )));
    }
    let (x_label, y_label) = kind.axis_labels();
    let mut svg = String::new();
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"500\" height=\"500\">\n",
    );
    svg.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n");
    svg.push_str("<line x1=\"0\" y1=\"1000\" x2=\"1000\" y2=\"1000\" stroke=\"black\" stroke-width=\"4\"/>\n");
    svg.push_str(
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"1000\" stroke=\"black\" stroke-width=\"4\"/>\n",
    );
    let _ = writeln!(
        svg,
        "<text x=\"500\" y=\"985\" text-anchor=\"middle\" font-size=\"28\">{x_label}</text>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"30\" y=\"500\" text-anchor=\"middle\" font-size=\"28\" transform=\"rotate(-90 30 500)\">{y_label}</text>"
    );
    if baseline {
        svg.push_str("<line x1=\"0\" y1=\"1000\" x2=\"1000\" y2=\"0\" stroke=\"gray\" stroke-width=\"2\" stroke-dasharray=\"10 10\"/>\n");
    }
    let pairs: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{},{}", coord(1000.0 * x), coord(1000.0 - 1000.0 * y)))
        .collect();
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"4\" points=\"{}\"/>",
        pairs.join(" ")
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a two-column point list with a header row, as written by
/// [`crate::metrics::points_csv`].
pub fn parse_points_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Data(format!(
                "point row {} has {} fields",
                i + 1,
                record.len()
            )));
        }
        let field = |j: usize| {
            record[j]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Data(format!("point row {}: {e}", i + 1)))
        };
        points.push((field(0)?, field(1)?));
    }
    Ok(points)
}
