//! Scoring estimators against the synthetic ground truth.
//!
//! For every benchmark run the reference-word series of all estimators
//! are min-max normalized in one shared frame per estimator (across all
//! datasets of the run), then compared against the per-factor target
//! traces by mean absolute distance. Lower is better; a flat series
//! against a moving target lands near the target's own mean.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cooccurrence::{FocusCoocBuilder, Measure};
use crate::synthgen::{
    DatasetPreset, SynthError, SynthSpec, SynthStream, TargetFunction, N_FACTORS,
};
use crate::volatility::{volatility_series, Estimator, VolatilityError};
use crate::{synthgen, TermId};

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Synth(SynthError),
    Volatility(VolatilityError),
}

impl From<SynthError> for EvalError {
    fn from(e: SynthError) -> Self {
        EvalError::Synth(e)
    }
}

impl From<VolatilityError> for EvalError {
    fn from(e: VolatilityError) -> Self {
        EvalError::Volatility(e)
    }
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::Synth(e) => write!(f, "generator error: {e}"),
            EvalError::Volatility(e) => write!(f, "volatility error: {e}"),
        }
    }
}

impl core::error::Error for EvalError {}

// ---------------------------------------------------------------------------
// Normalization and distance

/// Min-max normalizes a set of series in one shared frame: the minimum
/// and maximum are taken over every non-missing value of every series.
/// Missing values stay missing; a constant set maps to all zeros.
pub fn normalize_series(series: &mut [Vec<Option<f64>>]) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for s in series.iter() {
        for v in s.iter().flatten() {
            min = min.min(*v);
            max = max.max(*v);
        }
    }
    if !min.is_finite() {
        return;
    }
    let span = max - min;
    for s in series.iter_mut() {
        for v in s.iter_mut().flatten() {
            *v = if span > 0.0 { (*v - min) / span } else { 0.0 };
        }
    }
}

/// Mean absolute distance between a (normalized) series and a
/// (normalized) target trace over the slices where the series has a
/// value. `None` when the series is entirely missing.
pub fn mean_distance(series: &[Option<f64>], target: &[f64]) -> Option<f64> {
    debug_assert_eq!(series.len(), target.len());
    let mut sum = 0.0;
    let mut n = 0u32;
    for (v, t) in series.iter().zip(target) {
        if let Some(v) = v {
            sum += (v - t).abs();
            n += 1;
        }
    }
    (n > 0).then(|| sum / f64::from(n))
}

// ---------------------------------------------------------------------------
// Per-dataset series

/// One reference-word series of one estimator on one dataset, together
/// with the target trace it will be scored against.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub dataset: DatasetPreset,
    pub estimator: Estimator,
    /// 1-based factor index.
    pub factor: usize,
    pub word: String,
    pub target: TargetFunction,
    /// Target trace normalized by its own maximum.
    pub trace: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

/// Generates one dataset and computes the reference-word volatility
/// series of every requested estimator on it.
///
/// Counting runs in the generator's id space with stopwords masked out,
/// exactly mirroring what string-level ingestion with stopword removal
/// would produce (zero-padded surfaces keep both id orders aligned, so
/// even rank tie-breaking agrees).
pub fn dataset_reference_series(
    spec: &SynthSpec,
    dataset: DatasetPreset,
    estimators: &[Estimator],
    h: usize,
    measure: Measure,
    min_cooc_count: u32,
) -> Result<Vec<LabeledSeries>, EvalError> {
    let mut stream = SynthStream::new(spec.clone())?;
    let focus: Vec<TermId> = spec.reference_ids().to_vec();
    let skip: Vec<bool> = (0..spec.vocab_size).map(|id| spec.is_stopword(id)).collect();
    let mut builder = FocusCoocBuilder::new(spec.vocab_size as usize, focus.clone(), skip);

    let mut change_counts: Vec<Vec<u32>> = vec![Vec::new(); N_FACTORS];
    while let Some(slice) = stream.next_slice() {
        let slice = slice?;
        for doc in &slice.documents {
            builder.add_sentence(doc);
        }
        builder.finish_slice();
        for j in 0..N_FACTORS {
            change_counts[j].push(slice.change_counts[j]);
        }
    }
    let stats = builder.finish(measure, min_cooc_count);

    let mut out = Vec::with_capacity(estimators.len() * N_FACTORS);
    for (j, &reference) in focus.iter().enumerate() {
        let trace = synthgen::normalize_trace(&change_counts[j]);
        for &estimator in estimators {
            let series = volatility_series(&stats, reference, estimator, h)?;
            out.push(LabeledSeries {
                dataset,
                estimator,
                factor: j + 1,
                word: synthgen::term_surface(reference, spec.vocab_size),
                target: TargetFunction::PER_FACTOR[j],
                trace: trace.clone(),
                values: series.values,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Benchmark runs

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    /// Scale template; per-preset flags (case mix, Zipf, background) and
    /// the seed are applied on top of it.
    pub base: SynthSpec,
    pub presets: Vec<DatasetPreset>,
    pub estimators: Vec<Estimator>,
    pub h: usize,
    pub measure: Measure,
    pub min_cooc_count: u32,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            base: SynthSpec::default(),
            presets: DatasetPreset::ALL.to_vec(),
            estimators: Estimator::ALL.to_vec(),
            h: 2,
            measure: Measure::Dice,
            min_cooc_count: 1,
        }
    }
}

/// Applies a preset's change-case flags onto a scale template.
pub fn spec_for(base: &SynthSpec, preset: DatasetPreset, seed: u64) -> SynthSpec {
    let mut spec = base.clone();
    spec.seed = seed;
    match preset {
        DatasetPreset::A => {
            spec.case_mix = crate::synthgen::CaseMix::ALL;
            spec.zipf_enabled = true;
        }
        DatasetPreset::B => {
            spec.case_mix = crate::synthgen::CaseMix::SWAP_ONLY;
            spec.zipf_enabled = true;
        }
        DatasetPreset::C => {
            spec.case_mix = crate::synthgen::CaseMix::CHURN_ONLY;
            spec.zipf_enabled = false;
            spec.background_value = 0.0;
        }
    }
    spec
}

/// One scored cell of a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCell {
    pub dataset: DatasetPreset,
    pub estimator: Estimator,
    pub factor: usize,
    pub word: String,
    pub target: TargetFunction,
    /// `None` when the series was entirely missing.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub seed: u64,
    pub h: usize,
    pub measure: Measure,
    pub cells: Vec<RunCell>,
}

impl BenchmarkRun {
    /// Mean distance of one estimator over the reference words of one
    /// dataset.
    pub fn dataset_score(&self, estimator: Estimator, dataset: DatasetPreset) -> Option<f64> {
        let distances: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.estimator == estimator && c.dataset == dataset)
            .filter_map(|c| c.distance)
            .collect();
        (!distances.is_empty()).then(|| distances.iter().sum::<f64>() / distances.len() as f64)
    }

    /// Arithmetic mean of the dataset scores of one estimator.
    pub fn grand_mean(&self, estimator: Estimator, presets: &[DatasetPreset]) -> Option<f64> {
        let scores: Vec<f64> = presets
            .iter()
            .filter_map(|&p| self.dataset_score(estimator, p))
            .collect();
        (scores.len() == presets.len())
            .then(|| scores.iter().sum::<f64>() / scores.len() as f64)
    }
}

/// Normalizes a run's series per estimator and scores every cell.
pub fn assemble_run(
    seed: u64,
    h: usize,
    measure: Measure,
    mut all: Vec<LabeledSeries>,
) -> BenchmarkRun {
    for estimator in Estimator::ALL {
        let indices: Vec<usize> = all
            .iter()
            .enumerate()
            .filter(|(_, s)| s.estimator == estimator)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            continue;
        }
        let mut group: Vec<Vec<Option<f64>>> = indices
            .iter()
            .map(|&i| core::mem::take(&mut all[i].values))
            .collect();
        normalize_series(&mut group);
        for (&i, values) in indices.iter().zip(group) {
            all[i].values = values;
        }
    }
    let cells = all
        .into_iter()
        .map(|s| RunCell {
            distance: mean_distance(&s.values, &s.trace),
            dataset: s.dataset,
            estimator: s.estimator,
            factor: s.factor,
            word: s.word,
            target: s.target,
        })
        .collect();
    BenchmarkRun {
        seed,
        h,
        measure,
        cells,
    }
}

/// Runs every configured preset for one seed and scores the result.
pub fn run_benchmark_seed(cfg: &BenchmarkConfig, seed: u64) -> Result<BenchmarkRun, EvalError> {
    let mut all = Vec::new();
    for &preset in &cfg.presets {
        let spec = spec_for(&cfg.base, preset, seed);
        all.extend(dataset_reference_series(
            &spec,
            preset,
            &cfg.estimators,
            cfg.h,
            cfg.measure,
            cfg.min_cooc_count,
        )?);
    }
    Ok(assemble_run(seed, cfg.h, cfg.measure, all))
}

// ---------------------------------------------------------------------------
// Frequency-boost run

/// Result of a boosted dataset-A run: distances are normalized within
/// the run; raw (pre-normalization) series means expose how estimator
/// value ranges react to term frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostRun {
    pub seed: u64,
    pub multiplier: u32,
    pub cells: Vec<RunCell>,
    /// Mean of the raw series per (estimator, factor index).
    pub raw_means: Vec<(Estimator, usize, Option<f64>)>,
}

impl BoostRun {
    pub fn distance(&self, estimator: Estimator, target: TargetFunction) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.target == target)
            .and_then(|c| c.distance)
    }

    pub fn raw_mean(&self, estimator: Estimator, factor: usize) -> Option<f64> {
        self.raw_means
            .iter()
            .find(|(e, f, _)| *e == estimator && *f == factor)
            .and_then(|(_, _, m)| *m)
    }
}

fn raw_mean_of(values: &[Option<f64>]) -> Option<f64> {
    let observed: Vec<f64> = values.iter().flatten().copied().collect();
    (!observed.is_empty()).then(|| observed.iter().sum::<f64>() / observed.len() as f64)
}

/// Dataset A with one factor's document weight boosted; scoring is
/// normalized over this run's own series.
pub fn run_boost_seed(
    cfg: &BenchmarkConfig,
    boosted_factor: usize,
    multiplier: u32,
    seed: u64,
) -> Result<BoostRun, EvalError> {
    let spec = spec_for(&cfg.base, DatasetPreset::A, seed).boost_factor(boosted_factor, multiplier);
    let all = dataset_reference_series(
        &spec,
        DatasetPreset::A,
        &cfg.estimators,
        cfg.h,
        cfg.measure,
        cfg.min_cooc_count,
    )?;
    let raw_means = all
        .iter()
        .map(|s| (s.estimator, s.factor, raw_mean_of(&s.values)))
        .collect();
    let run = assemble_run(seed, cfg.h, cfg.measure, all);
    Ok(BoostRun {
        seed,
        multiplier,
        cells: run.cells,
        raw_means,
    })
}

// ---------------------------------------------------------------------------
// Cross-seed aggregation

/// Mean and population standard deviation of per-seed values; `None`
/// when no seed produced a value.
pub fn aggregate(values: &[Option<f64>]) -> Option<(f64, f64)> {
    let xs: Vec<f64> = values.iter().flatten().copied().collect();
    if xs.is_empty() {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
    Some((mean, libm::sqrt(var)))
}
