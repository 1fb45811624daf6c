//! Dumps raw reference-word series against the target trace for one
//! dataset, to eyeball how (and whether) each estimator tracks it.
//!
//! Usage: series_probe [A|B|C] [factor 1-7] [min_cooc] [seed]

use volatext_core::cooccurrence::Measure;
use volatext_core::evaluation::{dataset_reference_series, spec_for};
use volatext_core::synthgen::{DatasetPreset, SynthSpec};
use volatext_core::volatility::Estimator;

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let raw = args.first().map(String::as_str).unwrap_or("B");
    let quiet = raw.ends_with('q'); // "Bq" = preset B with Zipf noise off
    let preset = DatasetPreset::parse(&raw[..1]).unwrap();
    let factor: usize = args.get(1).map_or(1, |s| s.parse().unwrap());
    let min_cooc: u32 = args.get(2).map_or(1, |s| s.parse().unwrap());
    let seed: u64 = args.get(3).map_or(1, |s| s.parse().unwrap());

    let mut spec = spec_for(&SynthSpec::default(), preset, seed);
    if quiet {
        spec.zipf_enabled = false;
        spec.background_value = 0.0;
    }
    let all = dataset_reference_series(&spec, preset, &Estimator::ALL, 2, Measure::Dice, min_cooc)
        .unwrap();

    for estimator in Estimator::ALL {
        let s = all
            .iter()
            .find(|s| s.estimator == estimator && s.factor == factor)
            .unwrap();
        let pairs: Vec<(f64, f64)> = s
            .values
            .iter()
            .zip(&s.trace)
            .filter_map(|(v, t)| v.map(|v| (v, *t)))
            .collect();
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ts: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<16} raw min {:>9.5} max {:>9.5} corr(trace) {:>6.3}",
            estimator.name(),
            min,
            max,
            pearson(&xs, &ts)
        );
        let line: Vec<String> = xs.iter().step_by(5).map(|v| format!("{v:.4}")).collect();
        println!("    every 5th: {}", line.join(" "));
    }
    let s = &all[0];
    let line: Vec<String> = s.trace.iter().step_by(5).map(|v| format!("{v:.2}")).collect();
    println!("trace every 5th: {}", line.join(" "));
}
