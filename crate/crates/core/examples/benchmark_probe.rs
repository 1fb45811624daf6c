//! Runs the synthetic benchmark for a few seeds and prints the
//! per-dataset mean distances, one row per estimator.
//!
//! Usage: benchmark_probe [quarter|full] [min_cooc] [seed...]

use std::time::Instant;

use volatext_core::evaluation::{run_benchmark_seed, BenchmarkConfig};
use volatext_core::synthgen::DatasetPreset;
use volatext_core::volatility::Estimator;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scale = args.first().map(String::as_str).unwrap_or("quarter");
    let min_cooc: u32 = args.get(1).map_or(1, |s| s.parse().unwrap());
    let seeds: Vec<u64> = if args.len() > 2 {
        args[2..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        vec![1]
    };

    let mut cfg = BenchmarkConfig {
        min_cooc_count: min_cooc,
        ..BenchmarkConfig::default()
    };
    if scale == "quarter" {
        cfg.base = cfg.base.quarter_scale();
    }

    for &seed in &seeds {
        let start = Instant::now();
        let run = run_benchmark_seed(&cfg, seed).unwrap();
        let elapsed = start.elapsed();
        println!("seed {seed} ({scale} scale, {elapsed:.2?})");
        println!("{:<16} {:>7} {:>7} {:>7} {:>7}", "estimator", "A", "B", "C", "mean");
        for estimator in Estimator::ALL {
            let score = |p| run.dataset_score(estimator, p).unwrap_or(f64::NAN);
            println!(
                "{:<16} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
                estimator.name(),
                score(DatasetPreset::A),
                score(DatasetPreset::B),
                score(DatasetPreset::C),
                run.grand_mean(estimator, &DatasetPreset::ALL)
                    .unwrap_or(f64::NAN),
            );
        }
        println!();
    }
}
