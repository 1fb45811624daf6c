use std::time::Instant;
use volatext_core::cooccurrence::Measure;
use volatext_core::evaluation::{run_benchmark_seed, BenchmarkConfig};
use volatext_core::synthgen::DatasetPreset;
use volatext_core::volatility::Estimator;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let measure = Measure::parse(&args[0]).unwrap();
    let min_cooc: u32 = args.get(1).map_or(1, |s| s.parse().unwrap());
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().unwrap());
    let cfg = BenchmarkConfig { measure, min_cooc_count: min_cooc, ..BenchmarkConfig::default() };
    let start = Instant::now();
    let run = run_benchmark_seed(&cfg, seed).unwrap();
    println!("measure {} min_cooc {min_cooc} seed {seed} ({:.1?})", measure.name(), start.elapsed());
    println!("{:<16} {:>7} {:>7} {:>7} {:>7}", "estimator", "A", "B", "C", "mean");
    for estimator in Estimator::ALL {
        let score = |p| run.dataset_score(estimator, p).unwrap_or(f64::NAN);
        println!("{:<16} {:>7.3} {:>7.3} {:>7.3} {:>7.3}", estimator.name(),
            score(DatasetPreset::A), score(DatasetPreset::B), score(DatasetPreset::C),
            run.grand_mean(estimator, &DatasetPreset::ALL).unwrap_or(f64::NAN));
    }
}
