use crate::data::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Row indices drawn with replacement, in draw order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapSample {
    pub indices: Vec<usize>,
}

impl BootstrapSample {
    pub fn identity(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    /// Fraction of source rows that appear at least once.
    pub fn unique_fraction(&self, n: usize) -> f64 {
        let mut seen = vec![false; n];
        for &i in &self.indices {
            seen[i] = true;
        }
        seen.iter().filter(|&&s| s).count() as f64 / n as f64
    }
}

/// `n` draws of `random_integer(0, n - 1)`.
pub fn bootstrap_indices(n: usize, rng: &mut SeededRng) -> Result<BootstrapSample> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "bootstrap of an empty dataset".into(),
        ));
    }
    let hi = n as i64 - 1;
    let indices = (0..n)
        .map(|_| rng.random_integer(0, hi).map(|i| i as usize))
        .collect::<Result<_>>()?;
    Ok(BootstrapSample { indices })
}

pub fn bootstrap(data: &Dataset, rng: &mut SeededRng) -> Result<(Dataset, BootstrapSample)> {
    let sample = bootstrap_indices(data.len(), rng)?;
    Ok((data.select_rows(&sample.indices), sample))
}

/// Per-class shuffle, then the first `round_half_up(count * test_fraction)`
/// rows of each class go to the test set (capped so every class keeps at
/// least one training row). Both halves keep the original row order.
pub fn stratified_split(
    data: &Dataset,
    test_fraction: f64,
    rng: &mut SeededRng,
) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let classes = data.schema().classes();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (i, &l) in data.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    for (members, name) in by_class.iter().zip(classes) {
        if members.len() == 1 {
            return Err(Error::Degenerate(format!(
                "class `{name}` has a single row; stratified split needs at least 2"
            )));
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in by_class.into_iter().filter(|m| !m.is_empty()) {
        rng.shuffle(&mut members);
        let want = (members.len() as f64 * test_fraction + 0.5 + 1e-9).floor() as usize;
        let k = want.min(members.len() - 1);
        test.extend_from_slice(&members[..k]);
        train.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select_rows(&train), data.select_rows(&test)))
}
