//! Synthetic stand-in for the factory worker table.
//!
//! Twelve input columns plus `evaluation`. The label is a pure function of
//! `production_rate`; `machine`, `product`, `unit` and `elapsed_time` are
//! drawn independently of everything else.

use rand_distr::{Distribution, Normal};

use crate::data::dataset::{Dataset, Value};
use crate::data::schema::{Column, Schema};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub const WORKER_CLASSES: [&str; 3] = ["Average", "Good", "Excellent"];

const JOB_TITLES: [(&str, f64); 5] = [
    ("Weaver", 1000.0),
    ("Spinner", 1200.0),
    ("Dyer", 800.0),
    ("Finisher", 900.0),
    ("Knotter", 600.0),
];
const MACHINES: [&str; 2] = ["Old", "New"];
const PRODUCTS: [&str; 5] = ["Woven", "Tufted", "Knotted", "Flatweave", "Shag"];
const UNITS: [&str; 7] = ["U1", "U2", "U3", "U4", "U5", "U6", "U7"];

// Normal(mean, sd) of the raw production rate; puts ~22.7% below 1.0 and
// ~25.2% above 1.1.
const RATE_MEAN: f64 = 1.0528;
const RATE_SD: f64 = 0.0706;
const INCENTIVE_PER_UNIT: f64 = 0.75;

/// Average below base production, Good within 10% above it, Excellent beyond.
pub fn evaluation_band(production_rate: f64) -> &'static str {
    if production_rate < 1.0 {
        WORKER_CLASSES[0]
    } else if production_rate <= 1.1 {
        WORKER_CLASSES[1]
    } else {
        WORKER_CLASSES[2]
    }
}

pub fn worker_schema() -> Schema {
    Schema::new(
        vec![
            Column::categorical("operator"),
            Column::numeric("badge_no"),
            Column::categorical("job_title"),
            Column::numeric("base_production"),
            Column::numeric("production_achieved"),
            Column::numeric("incentive_wages"),
            Column::numeric("production_rate"),
            Column::numeric("labor_efficiency"),
            Column::categorical("machine"),
            Column::categorical("product"),
            Column::numeric("elapsed_time"),
            Column::categorical("unit"),
            Column::categorical("evaluation"),
        ],
        "evaluation",
        WORKER_CLASSES.iter().map(|s| s.to_string()).collect(),
    )
    .expect("worker schema is valid")
}

fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn pick<'a>(rng: &mut SeededRng, options: &[&'a str]) -> &'a str {
    options[rng.index(options.len())]
}

pub fn generate_workers(seed: u64, n: usize) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "generate_workers needs n >= 10, got {n}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let rate_dist = Normal::new(RATE_MEAN, RATE_SD).expect("valid normal");
    let effort_noise = Normal::new(0.0, 2.0).expect("valid normal");

    let mut badges: Vec<u32> = (0..n as u32).map(|i| 1000 + 7 * i).collect();
    rng.shuffle(&mut badges);

    let mut rows = Vec::with_capacity(n);
    for (i, badge) in badges.into_iter().enumerate() {
        let (title, nominal) = JOB_TITLES[rng.index(JOB_TITLES.len())];
        let base = (nominal * (0.9 + 0.2 * rng.unit_f64())).round();
        let raw_rate = rate_dist.sample(&mut rng).clamp(0.6, 1.6);
        let achieved = (raw_rate * base).round();
        let rate = round_to(achieved / base, 6);
        let efficiency = round_to(100.0 * rate + effort_noise.sample(&mut rng), 1);
        let incentive = round_to((achieved - base).max(0.0) * INCENTIVE_PER_UNIT, 2);

        let machine = pick(&mut rng, &MACHINES);
        let product = pick(&mut rng, &PRODUCTS);
        let elapsed = round_to(6.0 + 4.0 * rng.unit_f64(), 2);
        let unit = pick(&mut rng, &UNITS);

        rows.push(vec![
            Value::cat(format!("W{:04}", i + 1)),
            Value::Number(f64::from(badge)),
            Value::cat(title),
            Value::Number(base),
            Value::Number(achieved),
            Value::Number(incentive),
            Value::Number(rate),
            Value::Number(efficiency),
            Value::cat(machine),
            Value::cat(product),
            Value::Number(elapsed),
            Value::cat(unit),
            Value::cat(evaluation_band(rate)),
        ]);
    }
    Dataset::new(worker_schema(), rows)
}
