use crate::error::{Error, Result};

use super::ConfusionMatrix;

/// `num / den` as a percentage rounded half-up to two decimals, e.g. `"96.43%"`.
/// A zero denominator renders as `"0.00%"`.
pub fn format_percent(num: u64, den: u64) -> String {
    if den == 0 {
        return "0.00%".to_string();
    }
    let (num, den) = (num as u128, den as u128);
    let hundredths = (2 * num * 10_000 + den) / (2 * den);
    format!("{}.{:02}%", hundredths / 100, hundredths % 100)
}

/// A real ratio in `[0, 1]` as a two-decimal percentage.
pub fn format_ratio_percent(ratio: f64) -> String {
    let hundredths = (ratio * 10_000.0 + 0.5 + 1e-9).floor() as i64;
    format!("{}.{:02}%", hundredths / 100, hundredths % 100)
}

const STATS: [&str; 4] = ["Count", "Column percent", "Row percent", "Total percent"];

/// Count and column/row/total percentages for every confusion cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub classes: Vec<String>,
    /// `cells[actual][predicted]` as `[count, column %, row %, total %]`.
    pub cells: Vec<Vec<[String; 4]>>,
    pub row_totals: Vec<u64>,
    pub column_totals: Vec<u64>,
    pub total: u64,
}

pub fn frequency_report(cm: &ConfusionMatrix) -> Result<FrequencyReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    let k = cm.classes.len();
    let row_totals: Vec<u64> = (0..k).map(|a| cm.row_total(a)).collect();
    let column_totals: Vec<u64> = (0..k).map(|p| cm.column_total(p)).collect();
    let cells = (0..k)
        .map(|a| {
            (0..k)
                .map(|p| {
                    let c = cm.counts[a][p];
                    [
                        c.to_string(),
                        format_percent(c, column_totals[p]),
                        format_percent(c, row_totals[a]),
                        format_percent(c, total),
                    ]
                })
                .collect()
        })
        .collect();
    Ok(FrequencyReport {
        classes: cm.classes.clone(),
        cells,
        row_totals,
        column_totals,
        total,
    })
}

impl FrequencyReport {
    fn grid(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        let mut header = vec!["actual".to_string(), "statistic".to_string()];
        header.extend(self.classes.iter().map(|c| format!("predicted {c}")));
        header.push("total".to_string());
        rows.push(header);
        for (a, class) in self.classes.iter().enumerate() {
            for (s, stat) in STATS.iter().enumerate() {
                let mut line = vec![
                    if s == 0 { class.clone() } else { String::new() },
                    stat.to_string(),
                ];
                line.extend(self.cells[a].iter().map(|cell| cell[s].clone()));
                line.push(match s {
                    0 => self.row_totals[a].to_string(),
                    3 => format_percent(self.row_totals[a], self.total),
                    _ => String::new(),
                });
                rows.push(line);
            }
        }
        let mut count = vec!["all groups".to_string(), "Count".to_string()];
        count.extend(self.column_totals.iter().map(u64::to_string));
        count.push(self.total.to_string());
        rows.push(count);
        let mut pct = vec![String::new(), "Total percent".to_string()];
        pct.extend(
            self.column_totals
                .iter()
                .map(|&c| format_percent(c, self.total)),
        );
        pct.push(format_percent(self.total, self.total));
        rows.push(pct);
        rows
    }

    /// Column-aligned plain text.
    pub fn to_text(&self) -> String {
        let grid = self.grid();
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|j| grid.iter().map(|r| r[j].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &grid {
            let mut line = String::new();
            for (j, cell) in row.iter().enumerate() {
                if j < 2 {
                    line.push_str(&format!("{cell:<w$}  ", w = widths[j]));
                } else {
                    line.push_str(&format!("{cell:>w$}  ", w = widths[j]));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.grid() {
            let quoted: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            out.push_str(&quoted.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
