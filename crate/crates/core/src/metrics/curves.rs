use serde::{Deserialize, Serialize};

use crate::data::format_number;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCurve {
    /// `(fraction of rows taken, fraction of positives captured)`.
    pub points: Vec<(f64, f64)>,
}

/// Sorts by descending score and returns `(positives, negatives)` per tie group.
fn tie_groups(scores: &[f64], actual: &[usize], positive: usize) -> Result<Vec<(u64, u64)>> {
    if scores.len() != actual.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores but {} labels",
            scores.len(),
            actual.len()
        )));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no rows to score".into()));
    }
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite score {s}")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(u64, u64)> = Vec::new();
    let mut last = f64::NAN;
    for &i in &order {
        if groups.is_empty() || scores[i] != last {
            groups.push((0, 0));
            last = scores[i];
        }
        let g = groups.last_mut().expect("group pushed above");
        if actual[i] == positive {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
    }
    Ok(groups)
}

/// One-vs-rest ROC curve; tied scores form a single diagonal step.
pub fn roc_auc(scores: &[f64], actual: &[usize], positive: usize) -> Result<RocCurve> {
    let groups = tie_groups(scores, actual, positive)?;
    let pos: u64 = groups.iter().map(|g| g.0).sum();
    let neg: u64 = groups.iter().map(|g| g.1).sum();
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidArgument(
            "AUC undefined: evaluation rows contain only one class".into(),
        ));
    }
    let mut points = Vec::with_capacity(groups.len() + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut area2 = 0u128;
    for &(p, n) in &groups {
        // doubled trapezoid in count units keeps the sum exact
        area2 += n as u128 * (2 * tp as u128 + p as u128);
        tp += p;
        fp += n;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auc = area2 as f64 / (2.0 * pos as f64 * neg as f64);
    Ok(RocCurve { points, auc })
}

/// Cumulative gain curve for `positive`.
pub fn gain(scores: &[f64], actual: &[usize], positive: usize) -> Result<GainCurve> {
    let groups = tie_groups(scores, actual, positive)?;
    let pos: u64 = groups.iter().map(|g| g.0).sum();
    if pos == 0 {
        return Err(Error::InvalidArgument(
            "gain undefined: no positive rows".into(),
        ));
    }
    let n = actual.len() as f64;
    let mut points = Vec::with_capacity(groups.len() + 1);
    points.push((0.0, 0.0));
    let (mut taken, mut hit) = (0u64, 0u64);
    for &(p, q) in &groups {
        taken += p + q;
        hit += p;
        points.push((taken as f64 / n, hit as f64 / pos as f64));
    }
    Ok(GainCurve { points })
}

/// Two-column CSV of curve points.
pub fn points_csv(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for &(x, y) in points {
        out.push_str(&format_number(x));
        out.push(',');
        out.push_str(&format_number(y));
        out.push('\n');
    }
    out
}
