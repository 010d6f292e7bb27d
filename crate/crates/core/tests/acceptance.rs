//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use statrs::distribution::{ChiSquared, ContinuousCDF};
use treevote::data::{bootstrap_indices, Column, Dataset, Schema, Value};
use treevote::feature_select::{chi_square_pvalue, chi_square_stat, contingency, ContingencyTable};
use treevote::metrics::{
    accuracy, confusion, error_rate, format_percent, format_ratio_percent, frequency_report,
    roc_auc,
};
use treevote::pipeline::{run_pipeline, PipelineConfig, COMMITTEE_NAME};
use treevote::tree::{
    merge_categories, train_cart, train_chaid, train_exhaustive_chaid, MergeMode, Node, SplitForm,
    TreeParams,
};
use treevote::SeededRng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn uniform(rng: &mut SeededRng, lo: usize, hi: usize) -> usize {
    rng.random_integer(lo as i64, hi as i64).unwrap() as usize
}

// Literal sum over cells after dropping empty rows and columns.
fn brute_chi_square(counts: &[Vec<u64>]) -> Option<f64> {
    let rows: Vec<&Vec<u64>> = counts
        .iter()
        .filter(|r| r.iter().sum::<u64>() > 0)
        .collect();
    let ncols = counts.first().map_or(0, Vec::len);
    let cols: Vec<usize> = (0..ncols)
        .filter(|&j| counts.iter().map(|r| r[j]).sum::<u64>() > 0)
        .collect();
    if rows.len() < 2 || cols.len() < 2 {
        return None;
    }
    let n: f64 = rows
        .iter()
        .flat_map(|r| cols.iter().map(move |&j| r[j] as f64))
        .sum();
    let mut stat = 0.0;
    for r in &rows {
        let rt: f64 = cols.iter().map(|&j| r[j] as f64).sum();
        for &j in &cols {
            let ct: f64 = rows.iter().map(|rr| rr[j] as f64).sum();
            let e = rt * ct / n;
            let o = r[j] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    Some(stat)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    let mut mismatches = 0u64;
    for r in 1..=3usize {
        for c in 1..=3usize {
            let cells = r * c;
            let row_labels: Vec<String> = (0..r).map(|i| i.to_string()).collect();
            let col_labels: Vec<String> = (0..c).map(|j| j.to_string()).collect();
            for code in 0..5u64.pow(cells as u32) {
                let mut k = code;
                let mut counts = vec![vec![0u64; c]; r];
                for cell in 0..cells {
                    counts[cell / c][cell % c] = k % 5;
                    k /= 5;
                }
                let table = ContingencyTable {
                    row_labels: row_labels.clone(),
                    col_labels: col_labels.clone(),
                    counts,
                };
                let got = chi_square_stat(&table).ok().map(|(s, _)| s);
                match (got, brute_chi_square(&table.counts)) {
                    (Some(a), Some(b)) => {
                        let d = (a - b).abs();
                        worst = worst.max(d);
                        if d > 1e-9 {
                            mismatches += 1;
                        }
                    }
                    (None, None) => {}
                    _ => mismatches += 1,
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{checked} tables, max |diff| {worst:.2e}, {mismatches} mismatches, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let machine = chi_square_pvalue(0.7942, 2).unwrap();
    let product = chi_square_pvalue(6.4121, 8).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=5000 {
        let x = i as f64 * 0.01;
        worst = worst.max((chi_square_pvalue(x, 2).unwrap() - (-x / 2.0).exp()).abs());
    }
    let pass =
        (machine - 0.672260).abs() <= 5e-5 && (product - 0.601180).abs() <= 5e-4 && worst <= 1e-10;
    outcome(
        pass,
        format!(
            "p(0.7942, 2) = {machine:.6}, p(6.4121, 8) = {product:.6}, dof-2 closed form max |diff| {worst:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let classes = strings(&["Average", "Good", "Excellent"]);
    let schema = Schema::new(
        vec![
            Column::categorical("operator"),
            Column::categorical("evaluation"),
        ],
        "evaluation",
        classes.clone(),
    )
    .unwrap();
    let rows = (0..121)
        .map(|i| {
            vec![
                Value::cat(format!("op{i:03}")),
                Value::cat(classes[i % 3].clone()),
            ]
        })
        .collect();
    let data = Dataset::new(schema, rows).unwrap();
    let (stat, dof) = chi_square_stat(&contingency(&data, "operator").unwrap()).unwrap();
    outcome(
        (stat - 242.0).abs() <= 1e-9,
        format!("statistic {stat}, dof {dof}"),
    )
}

fn criterion_4() -> Outcome {
    let classes = strings(&["Average", "Good", "Excellent"]);
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for (a, p, n) in [
        ("Average", "Average", 27),
        ("Good", "Good", 62),
        ("Excellent", "Excellent", 29),
        ("Excellent", "Average", 1),
    ] {
        for _ in 0..n {
            actual.push(a);
            predicted.push(p);
        }
    }
    let cm = confusion(&actual, &predicted, &classes).unwrap();
    let acc = accuracy(&cm).unwrap();
    let err = error_rate(&cm).unwrap();
    let report = frequency_report(&cm).unwrap();
    let cell_a = &report.cells[0][0];
    let cell_e = &report.cells[2][0];
    let e3 = format!("{:.6}", 3.0 / 119.0);
    let e5 = format!("{:.6}", 5.0 / 119.0);
    let pass = cm.counts == vec![vec![27, 0, 0], vec![0, 62, 0], vec![1, 0, 29]]
        && format!("{acc:.6}") == "0.991597"
        && format_percent(cm.trace(), cm.total()) == "99.16%"
        && format_ratio_percent(acc) == "99.16%"
        && (acc + err - 1.0).abs() < 1e-12
        && e3 == "0.025210"
        && e5 == "0.042017"
        && cell_a[1] == "96.43%"
        && cell_a[2] == "100.00%"
        && cell_a[3] == "22.69%"
        && cell_e[1] == "3.57%"
        && cell_e[2] == "3.33%"
        && cell_e[3] == "0.84%";
    outcome(
        pass,
        format!(
            "accuracy {acc:.6} ({}), error rates {e3} / {e5}, cells {} {} {} / {} {} {}",
            format_percent(cm.trace(), cm.total()),
            cell_a[1],
            cell_a[2],
            cell_a[3],
            cell_e[1],
            cell_e[2],
            cell_e[3]
        ),
    )
}

// Pair-counting Mann-Whitney AUC, written independently of the library.
fn mann_whitney(scores: &[f64], positive: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(5);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = uniform(&mut rng, 2, 200);
        let levels = uniform(&mut rng, 2, 12);
        let scores: Vec<f64> = (0..n)
            .map(|_| uniform(&mut rng, 0, levels) as f64 / levels as f64)
            .collect();
        let labels: Vec<usize> = (0..n).map(|_| uniform(&mut rng, 0, 2)).collect();
        let positive: Vec<bool> = labels.iter().map(|&l| l == 1).collect();
        if positive.iter().all(|&p| p) || positive.iter().all(|&p| !p) {
            continue;
        }
        let auc = roc_auc(&scores, &labels, 1).unwrap().auc;
        worst = worst.max((auc - mann_whitney(&scores, &positive)).abs());
        done += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!(
            "100 instances, max |diff| {worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn random_dataset(
    rng: &mut SeededRng,
    n: usize,
    features: usize,
    classes: usize,
    consistent: bool,
) -> Dataset {
    let class_names: Vec<String> = (0..classes).map(|k| format!("k{k}")).collect();
    let numeric: Vec<bool> = (0..features).map(|_| uniform(rng, 0, 1) == 1).collect();
    let mut columns: Vec<Column> = (0..features)
        .map(|f| {
            if numeric[f] {
                Column::numeric(format!("f{f}"))
            } else {
                Column::categorical(format!("f{f}"))
            }
        })
        .collect();
    columns.push(Column::categorical("y"));
    let schema = Schema::new(columns, "y", class_names.clone()).unwrap();
    let mut assigned: BTreeMap<String, usize> = BTreeMap::new();
    let rows = (0..n)
        .map(|_| {
            let mut row: Vec<Value> = (0..features)
                .map(|f| {
                    if numeric[f] {
                        Value::Number(uniform(rng, 0, 6) as f64 * 0.5)
                    } else {
                        Value::cat(["a", "b", "c", "d", "e"][uniform(rng, 0, 4)])
                    }
                })
                .collect();
            let label = if consistent {
                let fresh = uniform(rng, 0, classes - 1);
                *assigned.entry(format!("{row:?}")).or_insert(fresh)
            } else {
                // signal on the first feature plus noise
                let base = match &row[0] {
                    Value::Number(x) => (*x * 2.0) as usize % classes,
                    Value::Category(c) => c.as_bytes()[0] as usize % classes,
                };
                if uniform(rng, 0, 9) < 7 {
                    base
                } else {
                    uniform(rng, 0, classes - 1)
                }
            };
            row.push(Value::cat(class_names[label].clone()));
            row
        })
        .collect();
    Dataset::new(schema, rows).unwrap()
}

struct NodeCheck {
    internal: usize,
    violations: Vec<String>,
}

fn rows_under(node: &Node) -> u64 {
    match node {
        Node::Leaf(l) => l.class_counts.iter().sum(),
        Node::Split { children, .. } => children.iter().map(rows_under).sum(),
    }
}

fn check_chaid(node: &Node, params: &TreeParams, depth: usize, out: &mut NodeCheck) {
    let Node::Split {
        rule,
        child_rows,
        children,
    } = node
    else {
        return;
    };
    out.internal += 1;
    let mut bad = |m: String| out.violations.push(m);
    if params.max_depth.is_some_and(|d| depth >= d) {
        bad(format!("split at depth {depth}"));
    }
    let k = rule.branch_count();
    if k < 2 || children.len() != k || child_rows.len() != k {
        bad(format!(
            "branch count {k}, children {}, child_rows {}",
            children.len(),
            child_rows.len()
        ));
    }
    for (child, &rows) in children.iter().zip(child_rows) {
        if rows_under(child) != rows {
            bad("child_rows disagree with leaves".into());
        }
        if (rows as usize) < params.min_samples_leaf {
            bad(format!("child with {rows} rows"));
        }
    }
    match &rule.form {
        SplitForm::Groups { groups } => {
            let mut seen = BTreeSet::new();
            for g in groups {
                if g.is_empty() {
                    bad("empty group".into());
                }
                for m in g {
                    if !seen.insert(m.clone()) {
                        bad(format!("category {m} in two groups"));
                    }
                }
            }
        }
        SplitForm::Intervals { cuts } => {
            if cuts.windows(2).any(|w| w[0] >= w[1]) {
                bad("cuts not increasing".into());
            }
        }
        SplitForm::Threshold { .. } => bad("binary threshold in a CHAID tree".into()),
    }
    match &rule.chaid {
        None => bad("split without statistics".into()),
        Some(s) => {
            let oracle = ChiSquared::new(s.dof as f64).unwrap().sf(s.statistic);
            if (oracle - s.raw_p).abs() > 1e-9 {
                bad(format!("raw p {} vs oracle {oracle}", s.raw_p));
            }
            let want = (s.bonferroni * s.raw_p).min(1.0);
            if (s.adjusted_p - want).abs() > 1e-12 * want {
                bad(format!(
                    "adjusted p {} != min(1, {} * {})",
                    s.adjusted_p, s.bonferroni, s.raw_p
                ));
            }
            if s.bonferroni < 1.0 || s.adjusted_p < s.raw_p || s.adjusted_p > params.alpha_split {
                bad(format!(
                    "adjusted p {} with multiplier {}",
                    s.adjusted_p, s.bonferroni
                ));
            }
        }
    }
    for child in children {
        check_chaid(child, params, depth + 1, out);
    }
}

// Set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for g in 0..=max + 1 {
            cur.push(g);
            go(i + 1, n, cur, max.max(g), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(1, n, &mut vec![0], 0, &mut out);
    }
    out
}

fn oracle_raw_p(counts: &[Vec<u64>], assignment: &[usize]) -> Option<f64> {
    let groups = assignment.iter().max()? + 1;
    let mut merged = vec![vec![0u64; counts[0].len()]; groups];
    for (cat, &g) in assignment.iter().enumerate() {
        for (j, &v) in counts[cat].iter().enumerate() {
            merged[g][j] += v;
        }
    }
    let stat = brute_chi_square(&merged)?;
    let rows = merged.iter().filter(|r| r.iter().sum::<u64>() > 0).count();
    let cols = (0..merged[0].len())
        .filter(|&j| merged.iter().map(|r| r[j]).sum::<u64>() > 0)
        .count();
    let dof = ((rows - 1) * (cols - 1)) as f64;
    Some(ChiSquared::new(dof).unwrap().sf(stat))
}

fn criterion_6() -> Outcome {
    let mut rng = SeededRng::new(6);

    let mut cart_fail = 0;
    for _ in 0..50 {
        let n = uniform(&mut rng, 2, 64);
        let p = uniform(&mut rng, 1, 4);
        let k = uniform(&mut rng, 2, 3);
        let data = random_dataset(&mut rng, n, p, k, true);
        let tree = train_cart(&data, &TreeParams::unlimited()).unwrap();
        let preds = tree.predict_dataset(&data).unwrap();
        if preds.iter().zip(data.labels()).any(|(p, &l)| p.class != l) {
            cart_fail += 1;
        }
    }

    let mut check = NodeCheck {
        internal: 0,
        violations: Vec::new(),
    };
    let params = TreeParams::chaid();
    for _ in 0..20 {
        let n = uniform(&mut rng, 60, 240);
        let data = random_dataset(&mut rng, n, 3, 3, false);
        for tree in [
            train_chaid(&data, &params).unwrap(),
            train_exhaustive_chaid(&data, &params).unwrap(),
        ] {
            check_chaid(&tree.root, &params, 0, &mut check);
        }
    }

    let mut order_fail = 0;
    let mut oracle_fail = 0;
    let mut cases = 0;
    while cases < 200 {
        let c = uniform(&mut rng, 2, 5);
        let k = uniform(&mut rng, 2, 3);
        let counts: Vec<Vec<u64>> = (0..c)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let lift = if i % k == j {
                            uniform(&mut rng, 0, 8)
                        } else {
                            0
                        };
                        (uniform(&mut rng, 0, 12) + lift) as u64
                    })
                    .collect()
            })
            .collect();
        let mode = if uniform(&mut rng, 0, 1) == 0 {
            MergeMode::Nominal
        } else {
            MergeMode::Ordinal
        };
        let (Some(plain), Some(exh)) = (
            merge_categories(&counts, mode, 0.05, 1, false),
            merge_categories(&counts, mode, 0.05, 1, true),
        ) else {
            continue;
        };
        cases += 1;
        if exh.raw_p > plain.raw_p {
            order_fail += 1;
        }
        let mut best = f64::INFINITY;
        for part in partitions(c) {
            let groups = part.iter().max().unwrap() + 1;
            let contiguous = part.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
            if groups < 2 || (mode == MergeMode::Ordinal && !contiguous) {
                continue;
            }
            if let Some(p) = oracle_raw_p(&counts, &part) {
                best = best.min(p);
            }
        }
        for grouping in [&plain, &exh] {
            let mut assignment = vec![0; c];
            for (gi, g) in grouping.groups.iter().enumerate() {
                for &cat in g {
                    assignment[cat] = gi;
                }
            }
            match oracle_raw_p(&counts, &assignment) {
                Some(p) if (p - grouping.raw_p).abs() <= 1e-9 && grouping.raw_p >= best - 1e-12 => {
                }
                _ => oracle_fail += 1,
            }
        }
    }

    let pass = cart_fail == 0
        && check.violations.is_empty()
        && check.internal > 0
        && order_fail == 0
        && oracle_fail == 0;
    let mut detail = format!(
        "CART {}/50 perfect; CHAID {} internal nodes, {} violations; exhaustive above CHAID {order_fail}/200, oracle mismatches {oracle_fail}",
        50 - cart_fail,
        check.internal,
        check.violations.len()
    );
    if let Some(v) = check.violations.first() {
        detail.push_str(&format!(" (first: {v})"));
    }
    outcome(pass, detail)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn criterion_7() -> Outcome {
    let noise = ["machine", "product", "unit", "elapsed_time"];
    let mut dropped = [0usize; 4];
    let mut all_noise_dropped = 0;
    let (mut rate_kept, mut eff_kept) = (0, 0);
    let (mut ge_worst, mut ge_median) = (0, 0);
    let mut slowest = Duration::ZERO;
    for seed in 1..=20u64 {
        let mut config = PipelineConfig::synthetic(seed, 121);
        config.master_seed = seed;
        let start = Instant::now();
        let bundle = run_pipeline(&config).unwrap();
        slowest = slowest.max(start.elapsed());
        let retained = bundle.features.retained();
        let mut all = true;
        for (i, f) in noise.iter().enumerate() {
            if retained.contains(f) {
                all = false;
            } else {
                dropped[i] += 1;
            }
        }
        all_noise_dropped += all as usize;
        rate_kept += retained.contains(&"production_rate") as usize;
        eff_kept += retained.contains(&"labor_efficiency") as usize;
        let mut base: Vec<f64> = bundle
            .reports
            .iter()
            .filter(|r| r.name != COMMITTEE_NAME)
            .map(|r| r.evaluation.summary.accuracy)
            .collect();
        let voted = bundle.committee().evaluation.summary.accuracy;
        let worst = base.iter().copied().fold(f64::INFINITY, f64::min);
        ge_worst += (voted >= worst) as usize;
        ge_median += (voted >= median(&mut base)) as usize;
    }
    let pass = all_noise_dropped >= 18
        && rate_kept >= 19
        && eff_kept >= 19
        && ge_worst >= 19
        && ge_median >= 14
        && slowest < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "all four noise features dropped {all_noise_dropped}/20 (per feature {dropped:?}), production_rate kept {rate_kept}/20, labor_efficiency kept {eff_kept}/20, voted >= worst {ge_worst}/20, >= median {ge_median}/20, slowest seed {:.3}s",
            slowest.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut config = PipelineConfig::synthetic(8, 121);
    config.master_seed = 2024;
    config.svg = true;
    let a = run_pipeline(&config).unwrap();
    let b = run_pipeline(&config).unwrap();
    config.parallel = true;
    let c = run_pipeline(&config).unwrap();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (bundle, dir) in [&a, &b, &c].iter().zip(&dirs) {
        bundle.write(dir.path()).unwrap();
    }
    let read = |d: &tempfile::TempDir| {
        a.files
            .files
            .keys()
            .map(|k| std::fs::read(d.path().join(k)).unwrap())
            .collect::<Vec<_>>()
    };
    let (ra, rb, rc) = (read(&dirs[0]), read(&dirs[1]), read(&dirs[2]));
    let same = a.files == b.files && a.files == c.files && ra == rb && ra == rc;
    outcome(
        same,
        format!(
            "{} files compared across repeated sequential and parallel runs",
            ra.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mean = (0..100u64)
        .map(|seed| {
            let mut rng = SeededRng::new(seed);
            bootstrap_indices(1000, &mut rng)
                .unwrap()
                .unique_fraction(1000)
        })
        .sum::<f64>()
        / 100.0;
    outcome(
        (mean - 0.632).abs() <= 0.02,
        format!("mean unique fraction {mean:.4}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("chi-square oracle equivalence", criterion_1),
        ("p-value anchors", criterion_2),
        ("degenerate-feature identity", criterion_3),
        ("metrics anchors", criterion_4),
        ("AUC oracle equivalence", criterion_5),
        ("tree correctness", criterion_6),
        ("synthetic pipeline", criterion_7),
        ("determinism", criterion_8),
        ("bootstrap law", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
