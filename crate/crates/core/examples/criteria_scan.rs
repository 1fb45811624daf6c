//! Evaluates the acceptance-style orderings for a grid of benchmark
//! configurations (measure x min_cooc_count) over several seeds.
//!
//! Usage: criteria_scan [quarter|full] [seeds...]

use volatext_core::cooccurrence::Measure;
use volatext_core::evaluation::{
    run_benchmark_seed, run_boost_seed, BenchmarkConfig, BenchmarkRun,
};
use volatext_core::synthgen::{DatasetPreset, TargetFunction};
use volatext_core::volatility::Estimator;

fn ordering_a(run: &BenchmarkRun) -> bool {
    let c = |e| run.dataset_score(e, DatasetPreset::C).unwrap();
    let good = [Estimator::Sig, Estimator::GlobalSig, Estimator::MinMax];
    let bad = [Estimator::Baseline, Estimator::GlobalBaseline];
    good.iter().all(|&g| bad.iter().all(|&b| c(g) < c(b)))
}

fn ordering_b(run: &BenchmarkRun) -> bool {
    let mut scores: Vec<(Estimator, f64)> = Estimator::ALL
        .iter()
        .map(|&e| (e, run.dataset_score(e, DatasetPreset::B).unwrap()))
        .collect();
    scores.sort_by(|a, b| a.1.total_cmp(&b.1));
    let top: Vec<Estimator> = scores[..2].iter().map(|s| s.0).collect();
    top.contains(&Estimator::Baseline) && top.contains(&Estimator::MinMax)
}

fn ordering_c(run: &BenchmarkRun) -> Option<f64> {
    run.grand_mean(Estimator::MinMax, &DatasetPreset::ALL)
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scale = args.first().map(String::as_str).unwrap_or("full");
    let seeds: Vec<u64> = if args.len() > 1 {
        args[1..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        vec![1, 2, 3, 4, 5]
    };

    println!(
        "{:<6} {:>3} | {:>4} {:>4} {:>6} {:>7} | {:>5} {:>5} {:>5}",
        "meas", "mc", "a", "b", "c-mean", "Bmargin", "boost", "mmtri", "sigtri"
    );
    for measure in [Measure::Dice, Measure::Llr] {
        for mc in [3u32, 4, 5, 6, 8, 10] {
            let mut cfg = BenchmarkConfig {
                measure,
                min_cooc_count: mc,
                ..BenchmarkConfig::default()
            };
            if scale == "quarter" {
                cfg.base = cfg.base.quarter_scale();
            }
            let mut pass_a = 0;
            let mut pass_b = 0;
            let mut grand = Vec::new();
            let mut boost_pass = 0;
            let mut mm_tri = Vec::new();
            let mut sig_tri = Vec::new();
            let mut b_margin = Vec::new();
            for &seed in &seeds {
                let run = run_benchmark_seed(&cfg, seed).unwrap();
                pass_a += ordering_a(&run) as u32;
                pass_b += ordering_b(&run) as u32;
                grand.push(ordering_c(&run).unwrap());
                // how far minmax sits below the best non-baseline rival on B
                let rival = [Estimator::GlobalBaseline, Estimator::Sig, Estimator::GlobalSig]
                    .iter()
                    .map(|&e| run.dataset_score(e, DatasetPreset::B).unwrap())
                    .fold(f64::INFINITY, f64::min);
                b_margin
                    .push(rival - run.dataset_score(Estimator::MinMax, DatasetPreset::B).unwrap());
                let boost = run_boost_seed(&cfg, 0, 5, seed).unwrap();
                let mm = boost
                    .distance(Estimator::MinMax, TargetFunction::Triangle)
                    .unwrap();
                let sg = boost
                    .distance(Estimator::Sig, TargetFunction::Triangle)
                    .unwrap();
                boost_pass += (mm < sg && mm <= 0.25) as u32;
                mm_tri.push(mm);
                sig_tri.push(sg);
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            println!(
                "{:<6} {:>3} | {:>3}/{} {:>3}/{} {:>6.3} {:>7.3} | {:>4}/{} {:>5.3} {:>5.3}",
                measure.name(),
                mc,
                pass_a,
                seeds.len(),
                pass_b,
                seeds.len(),
                mean(&grand),
                mean(&b_margin),
                boost_pass,
                seeds.len(),
                mean(&mm_tri),
                mean(&sig_tri),
            );
        }
    }
}
