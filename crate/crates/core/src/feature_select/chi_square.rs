//! Pearson chi-square statistic and its upper-tail probability.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 500;
const REL_EPS: f64 = 1e-14;
const TINY: f64 = 1e-300;

/// ln Γ(z) for z > 0 (Lanczos, g = 7, 9 terms).
pub fn ln_gamma(z: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..MAX_TERMS {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() < sum.abs() * REL_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    // Modified Lentz on the Legendre continued fraction for Γ(a, x).
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < REL_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let q = if x < a + 1.0 {
        1.0 - lower_series(a, x)
    } else {
        upper_continued_fraction(a, x)
    };
    q.clamp(0.0, 1.0)
}

/// Upper-tail chi-square probability `Q(dof / 2, statistic / 2)`.
pub fn chi_square_pvalue(statistic: f64, dof: usize) -> Result<f64> {
    if statistic.is_nan() || statistic < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chi-square statistic must be >= 0, got {statistic}"
        )));
    }
    if dof < 1 {
        return Err(Error::InvalidArgument("chi-square dof must be >= 1".into()));
    }
    Ok(gamma_q(dof as f64 / 2.0, statistic / 2.0))
}

/// Pearson Σ (O − E)² / E over the table with zero-margin rows and columns
/// removed. `None` when fewer than two rows or two columns survive.
pub fn pearson(counts: &[Vec<u64>]) -> Option<(f64, usize)> {
    let ncols = counts.first().map_or(0, Vec::len);
    let row_tot: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_tot: Vec<u64> = (0..ncols)
        .map(|j| counts.iter().map(|r| r[j]).sum())
        .collect();
    let rows: Vec<usize> = (0..counts.len()).filter(|&i| row_tot[i] > 0).collect();
    let cols: Vec<usize> = (0..ncols).filter(|&j| col_tot[j] > 0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return None;
    }
    let total: u64 = row_tot.iter().sum();
    let total = total as f64;
    let mut stat = 0.0;
    for &i in &rows {
        for &j in &cols {
            let expected = row_tot[i] as f64 * col_tot[j] as f64 / total;
            let diff = counts[i][j] as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    Some((stat, (rows.len() - 1) * (cols.len() - 1)))
}

/// Statistic, dof and p-value for a raw count table; `None` if untestable.
pub fn pearson_test(counts: &[Vec<u64>]) -> Option<(f64, usize, f64)> {
    let (stat, dof) = pearson(counts)?;
    let p = gamma_q(dof as f64 / 2.0, stat / 2.0);
    Some((stat, dof, p))
}
