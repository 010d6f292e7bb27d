/// Equal-frequency discretisation of one numeric column.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    /// Bin of each input value, in input order. Bins are numbered in
    /// increasing value order with no gaps.
    pub assignment: Vec<usize>,
    /// `(min, max)` observed value of each bin.
    pub bounds: Vec<(f64, f64)>,
}

impl Binning {
    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn label(&self, bin: usize) -> String {
        let (lo, hi) = self.bounds[bin];
        format!(
            "[{}, {}]",
            crate::data::format_number(lo),
            crate::data::format_number(hi)
        )
    }

    /// Threshold strictly between bin `bin` and bin `bin + 1`.
    pub fn cut_after(&self, bin: usize) -> f64 {
        midpoint(self.bounds[bin].1, self.bounds[bin + 1].0)
    }
}

/// A value strictly between `lo < hi` (the midpoint, unless rounding lands
/// on an endpoint).
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid < hi {
        mid
    } else {
        lo
    }
}

/// Bin count is `min(max_bins, distinct values)`. A value whose first sorted
/// position is `p` lands in nominal bin `floor(p * k / n)`, so equal values
/// never straddle a boundary (ties go to the lower bin). Empty nominal bins
/// are dropped.
pub fn equal_frequency_bins(values: &[f64], max_bins: usize) -> Binning {
    let n = values.len();
    if n == 0 {
        return Binning {
            assignment: Vec::new(),
            bounds: Vec::new(),
        };
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for (p, &v) in sorted.iter().enumerate() {
        if distinct.last().is_none_or(|&(u, _)| u != v) {
            distinct.push((v, p));
        }
    }
    let k = max_bins.max(1).min(distinct.len());

    let mut value_bin = Vec::with_capacity(distinct.len());
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut last_nominal = usize::MAX;
    for &(v, p) in &distinct {
        let nominal = p * k / n;
        if nominal != last_nominal {
            bounds.push((v, v));
            last_nominal = nominal;
        } else {
            bounds.last_mut().expect("open bin").1 = v;
        }
        value_bin.push(bounds.len() - 1);
    }

    let assignment = values
        .iter()
        .map(|v| {
            let i = distinct
                .binary_search_by(|(u, _)| u.total_cmp(v))
                .expect("value is in its own column");
            value_bin[i]
        })
        .collect();
    Binning { assignment, bounds }
}
