use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[actual][predicted]` over an ordered class list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_total(&self, actual: usize) -> u64 {
        self.counts[actual].iter().sum()
    }

    pub fn column_total(&self, predicted: usize) -> u64 {
        self.counts.iter().map(|r| r[predicted]).sum()
    }

    pub fn errors(&self) -> u64 {
        self.total() - self.trace()
    }
}

pub fn confusion_from_indices(
    actual: &[usize],
    predicted: &[usize],
    classes: &[String],
) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} actual labels but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InvalidArgument("no rows to tally".into()));
    }
    let k = classes.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&a, &p) in actual.iter().zip(predicted) {
        if a >= k || p >= k {
            return Err(Error::InvalidArgument(format!(
                "class index out of range 0..{k}"
            )));
        }
        counts[a][p] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

/// Tallies label strings; every label must appear in `classes`.
pub fn confusion<S: AsRef<str>>(
    actual: &[S],
    predicted: &[S],
    classes: &[String],
) -> Result<ConfusionMatrix> {
    let index = |s: &S| {
        classes
            .iter()
            .position(|c| c == s.as_ref())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown label `{}`", s.as_ref())))
    };
    let a = actual.iter().map(index).collect::<Result<Vec<_>>>()?;
    let p = predicted.iter().map(index).collect::<Result<Vec<_>>>()?;
    confusion_from_indices(&a, &p, classes)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    Ok(cm.trace() as f64 / total as f64)
}

pub fn error_rate(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    Ok(cm.errors() as f64 / total as f64)
}

/// Binomial standard error `sqrt(e (1 − e) / n)`.
pub fn std_error(error_rate: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&error_rate) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "std_error needs 0 <= e <= 1 and n >= 1, got e={error_rate}, n={n}"
        )));
    }
    Ok((error_rate * (1.0 - error_rate) / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn abc() -> Vec<String> {
        vec!["A".into(), "B".into(), "C".into()]
    }

    #[test]
    fn diagonal_when_perfect() {
        let cm = confusion(&["A", "B", "C", "B"], &["A", "B", "C", "B"], &abc()).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        assert_eq!(error_rate(&cm).unwrap(), 0.0);
    }

    #[test]
    fn all_to_one_column() {
        let cm = confusion(&["A", "B", "C"], &["B", "C", "A"], &abc()).unwrap();
        let cm2 = confusion(&["A", "B", "C"], &["C", "C", "C"], &abc()).unwrap();
        assert_eq!(cm.trace(), 0);
        assert_eq!(cm2.column_total(2), 3);
    }

    #[test]
    fn errors_reported() {
        assert!(confusion(&["A"], &["A", "B"], &abc()).is_err());
        assert!(confusion(&["A"], &["Z"], &abc()).is_err());
        let empty: [&str; 0] = [];
        assert!(confusion(&empty, &empty, &abc()).is_err());
    }

    #[test]
    fn std_error_cases() {
        assert_eq!(std_error(0.0, 10).unwrap(), 0.0);
        assert_abs_diff_eq!(std_error(0.5, 100).unwrap(), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(std_error(0.025210, 119).unwrap(), 0.01437, epsilon = 1e-5);
        assert!(std_error(1.5, 10).is_err());
        assert!(std_error(0.1, 0).is_err());
    }
}
