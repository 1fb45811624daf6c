//! Synthetic diachronic corpora with controlled contextual change.
//!
//! The generator superimposes a Zipf-shaped noise factor and seven
//! change factors over one artificial vocabulary. Each factor pins a
//! reference word to a high sampling weight and gives an evolving set of
//! context words elevated weights; documents draw all their tokens from
//! the combination of the Zipf factor and one uniformly chosen change
//! factor, so the context words of that factor co-occur with its
//! reference word.
//!
//! Between slices every factor undergoes a number of change operations
//! dictated by its target function (triangle, sinus, …): swapping the
//! weights of two context words, introducing a fresh context word,
//! and/or retiring one. The per-slice change counts form the ground
//! truth the volatility estimators are scored against.
//!
//! All randomness is drawn from substreams keyed by `(seed, role, slice,
//! index)`, so a corpus is a pure function of its [`SynthSpec`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::corpus::{Granularity, SlicedCorpus, TimeSlice, Vocabulary};
use crate::rng::{
    substream, DOMAIN_DOCUMENT, DOMAIN_FACTOR_CHANGE, DOMAIN_FACTOR_INIT, DOMAIN_SLICE_DOCS,
};
use crate::TermId;

/// Number of change factors (and reference words).
pub const N_FACTORS: usize = 7;

/// First synthetic calendar day; slice `t` (1-based) is dated
/// `EPOCH + (t - 1)` days.
pub const EPOCH: (i32, u32, u32) = (2000, 1, 1);

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthError {
    EmptyCaseMix,
    /// Combined sampling weights are all zero.
    ZeroMass,
    BadParameter(&'static str),
}

impl core::fmt::Display for SynthError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SynthError::EmptyCaseMix => write!(f, "at least one change case must be enabled"),
            SynthError::ZeroMass => write!(f, "sampling distribution has zero total mass"),
            SynthError::BadParameter(what) => write!(f, "invalid generator parameter: {what}"),
        }
    }
}

impl core::error::Error for SynthError {}

// ---------------------------------------------------------------------------
// Target functions

/// Predefined curve controlling how many change operations a factor
/// undergoes per slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetFunction {
    Triangle,
    Sinus,
    Constant0,
    Slide,
    HalfCircle,
    Hat,
    Canyon,
}

impl TargetFunction {
    /// Factor j (0-based) follows `PER_FACTOR[j]`.
    pub const PER_FACTOR: [TargetFunction; N_FACTORS] = [
        TargetFunction::Triangle,
        TargetFunction::Sinus,
        TargetFunction::Constant0,
        TargetFunction::Slide,
        TargetFunction::HalfCircle,
        TargetFunction::Hat,
        TargetFunction::Canyon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetFunction::Triangle => "triangle",
            TargetFunction::Sinus => "sinus",
            TargetFunction::Constant0 => "constant0",
            TargetFunction::Slide => "slide",
            TargetFunction::HalfCircle => "half_circle",
            TargetFunction::Hat => "hat",
            TargetFunction::Canyon => "canyon",
        }
    }
}

/// Number of change operations for slice `t` (1-based) at the given
/// peak. The triangle rises one-for-one with `t` and falls with `n - t`
/// when `peak` is half the slice count; the other shapes are scaled
/// onto the same `[0, peak]` range.
pub fn target_change_count(f: TargetFunction, t: u32, peak: u32, n_slices: u32) -> u32 {
    debug_assert!(t >= 1 && t <= n_slices);
    let tf = f64::from(t);
    let nf = f64::from(n_slices);
    let peakf = f64::from(peak);
    let value = match f {
        TargetFunction::Triangle => {
            let half = nf / 2.0;
            peakf * f64::from(t.min(n_slices - t)) / half
        }
        TargetFunction::Sinus => {
            peakf * (1.0 + libm::sin(2.0 * core::f64::consts::PI * tf / nf)) / 2.0
        }
        TargetFunction::Constant0 => 0.0,
        TargetFunction::Slide => peakf * tf / nf,
        TargetFunction::HalfCircle => {
            let x = 2.0 * tf / nf - 1.0;
            peakf * libm::sqrt((1.0 - x * x).max(0.0))
        }
        TargetFunction::Hat => {
            if tf >= 0.4 * nf && tf <= 0.6 * nf {
                peakf
            } else {
                0.0
            }
        }
        TargetFunction::Canyon => {
            if tf >= 0.4 * nf && tf <= 0.6 * nf {
                0.0
            } else {
                peakf
            }
        }
    };
    libm::round(value) as u32
}

// ---------------------------------------------------------------------------
// Spec

/// Which of the three change cases a run applies: (i) swap the weights
/// of two context words, (ii) introduce a new context word, (iii) retire
/// one. When appear and disappear are both enabled they run as a fused
/// pair per change operation so the context size stays constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseMix {
    pub swap: bool,
    pub appear: bool,
    pub disappear: bool,
}

impl CaseMix {
    pub const ALL: CaseMix = CaseMix {
        swap: true,
        appear: true,
        disappear: true,
    };
    pub const SWAP_ONLY: CaseMix = CaseMix {
        swap: true,
        appear: false,
        disappear: false,
    };
    pub const CHURN_ONLY: CaseMix = CaseMix {
        swap: false,
        appear: true,
        disappear: true,
    };

    pub fn is_empty(self) -> bool {
        !(self.swap || self.appear || self.disappear)
    }
}

/// The three benchmark corpora: A exercises all change cases over Zipf
/// noise, B only re-weights existing contexts, C forces appearance/
/// disappearance gaps with the noise factor switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetPreset {
    A,
    B,
    C,
}

impl DatasetPreset {
    pub const ALL: [DatasetPreset; 3] = [DatasetPreset::A, DatasetPreset::B, DatasetPreset::C];

    pub fn name(self) -> &'static str {
        match self {
            DatasetPreset::A => "A",
            DatasetPreset::B => "B",
            DatasetPreset::C => "C",
        }
    }

    pub fn parse(s: &str) -> Option<DatasetPreset> {
        match s {
            "A" | "a" => Some(DatasetPreset::A),
            "B" | "b" => Some(DatasetPreset::B),
            "C" | "c" => Some(DatasetPreset::C),
            _ => None,
        }
    }
}

/// Full parameterization of one synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_slices: u32,
    pub vocab_size: u32,
    pub mean_docs_per_slice: f64,
    pub mean_tokens_per_doc: f64,
    pub n_stopwords: u32,
    pub n_context_words_per_factor: u32,
    pub context_value_mean: f64,
    pub context_value_sd: f64,
    /// Lower clamp for drawn context values.
    pub context_value_floor: f64,
    pub reference_value: f64,
    /// Weight of words that are neither context nor reference in a
    /// factor. Preset C sets this to 0 so that forced gaps are the only
    /// source of absence.
    pub background_value: f64,
    pub zipf_enabled: bool,
    pub case_mix: CaseMix,
    pub peak_changes_per_slice: u32,
    /// Relative document-sampling weight per factor.
    pub factor_weights: [u32; N_FACTORS],
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_slices: 100,
            vocab_size: 1000,
            mean_docs_per_slice: 500.0,
            mean_tokens_per_doc: 300.0,
            n_stopwords: 50,
            n_context_words_per_factor: 150,
            context_value_mean: 75.0,
            context_value_sd: 25.0,
            context_value_floor: 0.1,
            reference_value: 200.0,
            background_value: 0.1,
            zipf_enabled: true,
            case_mix: CaseMix::ALL,
            peak_changes_per_slice: 50,
            factor_weights: [1; N_FACTORS],
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn preset(preset: DatasetPreset, seed: u64) -> SynthSpec {
        let mut spec = SynthSpec {
            seed,
            ..SynthSpec::default()
        };
        match preset {
            DatasetPreset::A => {
                spec.case_mix = CaseMix::ALL;
            }
            DatasetPreset::B => {
                spec.case_mix = CaseMix::SWAP_ONLY;
            }
            DatasetPreset::C => {
                spec.case_mix = CaseMix::CHURN_ONLY;
                spec.zipf_enabled = false;
                spec.background_value = 0.0;
            }
        }
        spec
    }

    /// Quarter-scale variant for fast runs: half the slices, half the
    /// documents per slice.
    pub fn quarter_scale(mut self) -> SynthSpec {
        self.n_slices = 50;
        self.mean_docs_per_slice = 250.0;
        self
    }

    /// Makes documents `multiplier` times as likely to sample from
    /// factor `j` (0-based) as from any other factor.
    pub fn boost_factor(mut self, j: usize, multiplier: u32) -> SynthSpec {
        debug_assert!(multiplier >= 1);
        self.factor_weights[j] = multiplier;
        self
    }

    /// 0-based ids of the reference words, one per factor.
    pub fn reference_ids(&self) -> [TermId; N_FACTORS] {
        core::array::from_fn(|j| self.n_stopwords + j as TermId)
    }

    pub fn is_reference(&self, id: TermId) -> bool {
        id >= self.n_stopwords && id < self.n_stopwords + N_FACTORS as TermId
    }

    pub fn is_stopword(&self, id: TermId) -> bool {
        id < self.n_stopwords
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.case_mix.is_empty() {
            return Err(SynthError::EmptyCaseMix);
        }
        if self.n_slices == 0 {
            return Err(SynthError::BadParameter("n_slices must be positive"));
        }
        if self.mean_docs_per_slice <= 0.0 || self.mean_tokens_per_doc <= 0.0 {
            return Err(SynthError::BadParameter("document/token means must be positive"));
        }
        if self.reference_value <= 0.0 {
            return Err(SynthError::BadParameter("reference value must be positive"));
        }
        if self.context_value_floor <= self.background_value && self.background_value > 0.0 {
            // floor == background is tolerated (0.1 default); below it the
            // context membership would be meaningless
            if self.context_value_floor < self.background_value {
                return Err(SynthError::BadParameter(
                    "context floor below background value",
                ));
            }
        }
        let needed = u64::from(self.n_stopwords)
            + N_FACTORS as u64
            + u64::from(self.n_context_words_per_factor);
        if u64::from(self.vocab_size) < needed {
            return Err(SynthError::BadParameter(
                "vocabulary too small for stopwords, references and contexts",
            ));
        }
        if self.factor_weights.iter().all(|&w| w == 0) {
            return Err(SynthError::BadParameter("factor weights are all zero"));
        }
        Ok(())
    }

    /// The Zipf noise factor: weight `vocab_size / i` for the i-th word
    /// (1-based), zeroed for reference words. All-zero when disabled.
    pub fn zipf_factor(&self) -> Vec<f64> {
        let mut zipf = vec![0.0; self.vocab_size as usize];
        if self.zipf_enabled {
            for (i, z) in zipf.iter_mut().enumerate() {
                *z = f64::from(self.vocab_size) / (i as f64 + 1.0);
            }
            for id in self.reference_ids() {
                zipf[id as usize] = 0.0;
            }
        }
        zipf
    }
}

/// Surface form of a generator word: `w0001`... (1-based, zero-padded to
/// the width of the vocabulary size so lexicographic and numeric order
/// agree).
pub fn term_surface(id: TermId, vocab_size: u32) -> String {
    let width = vocab_size.to_string().len();
    format!("w{:0width$}", id + 1)
}

// ---------------------------------------------------------------------------
// Factors

/// Sampling-weight vector of one change factor plus its current context
/// membership. Membership is tracked structurally so that value
/// coincidences (a drawn value clamped onto the background level) cannot
/// corrupt the bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorState {
    /// 0-based factor index.
    pub index: usize,
    pub target: TargetFunction,
    pub reference: TermId,
    pub values: Vec<f64>,
    /// Sorted ids of the current context words.
    pub context: Vec<TermId>,
}

impl FactorState {
    pub fn context_size(&self) -> usize {
        self.context.len()
    }
}

/// Outcome of one slice's change operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChangeReport {
    pub requested: u32,
    pub applied: u32,
    /// Operations skipped because no eligible word was left.
    pub skipped: u32,
}

/// Initializes the seven factors: per factor, `n_context_words_per_factor`
/// distinct random non-stopword, non-reference words get values drawn
/// from the context distribution; the factor's own reference word is
/// pinned at `reference_value`; reference words of other factors stay at
/// exactly 0; everything else (including stopwords) sits at the
/// background value, with stopwords at 0 so only the Zipf factor drives
/// them.
pub fn init_factors(spec: &SynthSpec) -> Result<Vec<FactorState>, SynthError> {
    spec.validate()?;
    let v = spec.vocab_size as usize;
    let refs = spec.reference_ids();
    let normal = Normal::new(spec.context_value_mean, spec.context_value_sd)
        .map_err(|_| SynthError::BadParameter("context value distribution"))?;

    let eligible: Vec<TermId> = (0..spec.vocab_size)
        .filter(|&id| !spec.is_stopword(id) && !spec.is_reference(id))
        .collect();

    let mut factors = Vec::with_capacity(N_FACTORS);
    for (j, &reference) in refs.iter().enumerate() {
        let mut rng = substream(spec.seed, DOMAIN_FACTOR_INIT, j as u64, 0);
        let mut values = vec![spec.background_value; v];
        for id in 0..spec.vocab_size {
            if spec.is_stopword(id) || spec.is_reference(id) {
                values[id as usize] = 0.0;
            }
        }
        values[reference as usize] = spec.reference_value;

        // partial Fisher-Yates draw of distinct context words
        let mut pool = eligible.clone();
        let mut context = Vec::with_capacity(spec.n_context_words_per_factor as usize);
        for i in 0..spec.n_context_words_per_factor as usize {
            let pick = i + rng.random_range(0..pool.len() - i);
            pool.swap(i, pick);
            let id = pool[i];
            values[id as usize] = normal.sample(&mut rng).max(spec.context_value_floor);
            context.push(id);
        }
        context.sort_unstable();

        factors.push(FactorState {
            index: j,
            target: TargetFunction::PER_FACTOR[j],
            reference,
            values,
            context,
        });
    }
    Ok(factors)
}

enum ChangeOp {
    Swap,
    Appear,
    Disappear,
    /// Appear followed by disappear, keeping the context size constant.
    Replace,
}

/// Applies `k` change operations to one factor, cycling through the
/// enabled cases. Operations that cannot run (no context word left, no
/// background word left) are counted as skipped.
pub fn apply_changes(
    factor: &mut FactorState,
    k: u32,
    spec: &SynthSpec,
    rng: &mut ChaCha8Rng,
) -> ChangeReport {
    let mut ops: Vec<ChangeOp> = Vec::new();
    if spec.case_mix.swap {
        ops.push(ChangeOp::Swap);
    }
    match (spec.case_mix.appear, spec.case_mix.disappear) {
        (true, true) => ops.push(ChangeOp::Replace),
        (true, false) => ops.push(ChangeOp::Appear),
        (false, true) => ops.push(ChangeOp::Disappear),
        (false, false) => {}
    }
    debug_assert!(!ops.is_empty(), "validated case mix cannot be empty");

    let normal = Normal::new(spec.context_value_mean, spec.context_value_sd)
        .expect("context distribution validated at init");
    let mut report = ChangeReport {
        requested: k,
        ..ChangeReport::default()
    };

    let eligible_background = |factor: &FactorState| -> Vec<TermId> {
        (0..spec.vocab_size)
            .filter(|&id| {
                !spec.is_stopword(id)
                    && !spec.is_reference(id)
                    && factor.context.binary_search(&id).is_err()
            })
            .collect()
    };

    let appear = |factor: &mut FactorState, rng: &mut ChaCha8Rng| -> Option<TermId> {
        let pool = eligible_background(factor);
        if pool.is_empty() {
            return None;
        }
        let id = pool[rng.random_range(0..pool.len())];
        factor.values[id as usize] = normal.sample(rng).max(spec.context_value_floor);
        let at = factor.context.binary_search(&id).unwrap_err();
        factor.context.insert(at, id);
        Some(id)
    };

    let disappear = |factor: &mut FactorState, rng: &mut ChaCha8Rng, keep: Option<TermId>| -> bool {
        let candidates: Vec<usize> = (0..factor.context.len())
            .filter(|&i| Some(factor.context[i]) != keep)
            .collect();
        if candidates.is_empty() {
            return false;
        }
        let at = candidates[rng.random_range(0..candidates.len())];
        let id = factor.context.remove(at);
        factor.values[id as usize] = spec.background_value;
        true
    };

    for op_index in 0..k {
        let op = &ops[op_index as usize % ops.len()];
        let ok = match op {
            ChangeOp::Swap => {
                if factor.context.len() < 2 {
                    false
                } else {
                    let i = rng.random_range(0..factor.context.len());
                    let mut j = rng.random_range(0..factor.context.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    let (a, b) = (factor.context[i] as usize, factor.context[j] as usize);
                    factor.values.swap(a, b);
                    true
                }
            }
            ChangeOp::Appear => appear(factor, rng).is_some(),
            ChangeOp::Disappear => disappear(factor, rng, None),
            ChangeOp::Replace => match appear(factor, rng) {
                Some(new_id) => disappear(factor, rng, Some(new_id)),
                None => false,
            },
        };
        if ok {
            report.applied += 1;
        } else {
            report.skipped += 1;
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Document sampling

/// Draws `n_tokens` tokens from the multinomial distribution
/// proportional to `zipf + factor.values`. The document is one single
/// sentence: everything sampled together forms one co-occurrence
/// context.
pub fn sample_document(
    zipf: &[f64],
    factor: &FactorState,
    n_tokens: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TermId>, SynthError> {
    debug_assert_eq!(zipf.len(), factor.values.len());
    let mut prefix = Vec::with_capacity(zipf.len());
    let mut total = 0.0;
    for (z, v) in zipf.iter().zip(&factor.values) {
        total += z + v;
        prefix.push(total);
    }
    sample_tokens(&prefix, n_tokens, rng)
}

fn sample_tokens(
    prefix: &[f64],
    n_tokens: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TermId>, SynthError> {
    let total = *prefix.last().ok_or(SynthError::ZeroMass)?;
    if total <= 0.0 {
        return Err(SynthError::ZeroMass);
    }
    let mut tokens = Vec::with_capacity(n_tokens);
    for _ in 0..n_tokens {
        let u = rng.random::<f64>() * total;
        let mut idx = prefix.partition_point(|&c| c <= u);
        // guard against the draw rounding up onto the total
        if idx >= prefix.len() {
            idx = prefix.len() - 1;
            while idx > 0 && prefix[idx] == prefix[idx - 1] {
                idx -= 1;
            }
        }
        tokens.push(idx as TermId);
    }
    Ok(tokens)
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    let dist = Poisson::new(mean).expect("positive mean validated");
    dist.sample(rng) as u64
}

// ---------------------------------------------------------------------------
// Streaming generation

/// One generated slice: its sampled documents (each a single sentence of
/// generator-space term ids) plus the factor ground truth at that slice.
#[derive(Debug, Clone)]
pub struct SliceSample {
    /// 0-based slice index.
    pub index: usize,
    pub date: NaiveDate,
    pub documents: Vec<Vec<TermId>>,
    /// Change operations requested per factor for this slice.
    pub change_counts: [u32; N_FACTORS],
    /// Context membership per factor after this slice's changes.
    pub contexts: Vec<Vec<TermId>>,
}

/// Slice-by-slice corpus generation. Factor evolution is inherently
/// sequential; holding only one slice of documents at a time keeps
/// paper-scale runs in a few megabytes.
pub struct SynthStream {
    spec: SynthSpec,
    zipf: Vec<f64>,
    factors: Vec<FactorState>,
    factor_weight_prefix: Vec<f64>,
    next_t: u32,
}

impl SynthStream {
    pub fn new(spec: SynthSpec) -> Result<SynthStream, SynthError> {
        let factors = init_factors(&spec)?;
        let zipf = spec.zipf_factor();
        let mut factor_weight_prefix = Vec::with_capacity(N_FACTORS);
        let mut acc = 0.0;
        for w in spec.factor_weights {
            acc += f64::from(w);
            factor_weight_prefix.push(acc);
        }
        Ok(SynthStream {
            spec,
            zipf,
            factors,
            factor_weight_prefix,
            next_t: 1,
        })
    }

    pub fn spec(&self) -> &SynthSpec {
        &self.spec
    }

    pub fn epoch() -> NaiveDate {
        NaiveDate::from_ymd_opt(EPOCH.0, EPOCH.1, EPOCH.2).expect("valid epoch")
    }

    /// Generates the next slice, or `None` after the last one.
    pub fn next_slice(&mut self) -> Option<Result<SliceSample, SynthError>> {
        let t = self.next_t;
        if t > self.spec.n_slices {
            return None;
        }
        self.next_t += 1;

        // evolve factors, then sample documents from the evolved state
        let mut change_counts = [0u32; N_FACTORS];
        for j in 0..N_FACTORS {
            let k = target_change_count(
                self.factors[j].target,
                t,
                self.spec.peak_changes_per_slice,
                self.spec.n_slices,
            );
            change_counts[j] = k;
            let mut rng = substream(self.spec.seed, DOMAIN_FACTOR_CHANGE, j as u64, u64::from(t));
            apply_changes(&mut self.factors[j], k, &self.spec, &mut rng);
        }

        let prefixes: Vec<Vec<f64>> = self
            .factors
            .iter()
            .map(|f| {
                let mut acc = 0.0;
                f.values
                    .iter()
                    .zip(&self.zipf)
                    .map(|(v, z)| {
                        acc += v + z;
                        acc
                    })
                    .collect()
            })
            .collect();

        let mut slice_rng = substream(self.spec.seed, DOMAIN_SLICE_DOCS, u64::from(t), 0);
        let n_docs = poisson_count(&mut slice_rng, self.spec.mean_docs_per_slice);

        let mut documents = Vec::with_capacity(n_docs as usize);
        for i in 0..n_docs {
            let mut rng = substream(self.spec.seed, DOMAIN_DOCUMENT, u64::from(t), i);
            let u = rng.random::<f64>() * self.factor_weight_prefix[N_FACTORS - 1];
            let mut j = self.factor_weight_prefix.partition_point(|&c| c <= u);
            if j >= N_FACTORS {
                j = N_FACTORS - 1;
            }
            let n_tokens = poisson_count(&mut rng, self.spec.mean_tokens_per_doc).max(1) as usize;
            match sample_tokens(&prefixes[j], n_tokens, &mut rng) {
                Ok(tokens) => documents.push(tokens),
                Err(e) => return Some(Err(e)),
            }
        }

        let date = Self::epoch() + chrono::Days::new(u64::from(t - 1));
        Some(Ok(SliceSample {
            index: (t - 1) as usize,
            date,
            documents,
            change_counts,
            contexts: self.factors.iter().map(|f| f.context.clone()).collect(),
        }))
    }
}

// ---------------------------------------------------------------------------
// Ground truth and full materialization

#[derive(Debug, Clone, PartialEq)]
pub struct FactorTruth {
    /// 1-based factor index, matching the reference word number.
    pub factor: usize,
    pub reference_surface: String,
    pub target: TargetFunction,
    /// Requested change operations per slice.
    pub change_counts: Vec<u32>,
    /// `change_counts` normalized by its own maximum (all zeros for a
    /// constant-zero target).
    pub normalized_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub factors: Vec<FactorTruth>,
    /// Context membership per slice per factor, in generator ids.
    pub contexts_by_slice: Vec<Vec<Vec<TermId>>>,
}

pub fn normalize_trace(counts: &[u32]) -> Vec<f64> {
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0.0; counts.len()];
    }
    counts
        .iter()
        .map(|&c| f64::from(c) / f64::from(max))
        .collect()
}

/// Generates the whole corpus. The returned corpus is the raw one —
/// stopwords included, vocabulary restricted to terms that actually
/// occur — with one slice per synthetic day; ids are re-mapped to the
/// dense lexicographic order the string ingestion path would produce.
pub fn generate_dataset(spec: &SynthSpec) -> Result<(SlicedCorpus, GroundTruth), SynthError> {
    let mut stream = SynthStream::new(spec.clone())?;
    let mut slices: Vec<SliceSample> = Vec::with_capacity(spec.n_slices as usize);
    while let Some(slice) = stream.next_slice() {
        slices.push(slice?);
    }

    // frequency over generator ids; surviving ids keep their relative
    // order, which equals lexicographic order of the surface forms
    let mut freq = vec![0u64; spec.vocab_size as usize];
    for slice in &slices {
        for doc in &slice.documents {
            for &id in doc {
                freq[id as usize] += 1;
            }
        }
    }
    let mut remap = vec![TermId::MAX; spec.vocab_size as usize];
    let mut terms: Vec<(String, u64)> = Vec::new();
    let mut stop_surfaces = alloc::collections::BTreeSet::new();
    for id in 0..spec.vocab_size {
        if freq[id as usize] > 0 {
            remap[id as usize] = terms.len() as TermId;
            let surface = term_surface(id, spec.vocab_size);
            if spec.is_stopword(id) {
                stop_surfaces.insert(surface.clone());
            }
            terms.push((surface, freq[id as usize]));
        }
    }
    let vocab = Vocabulary::new(terms, &stop_surfaces);

    let mut truth_counts: Vec<Vec<u32>> = vec![Vec::new(); N_FACTORS];
    let mut contexts_by_slice = Vec::with_capacity(slices.len());
    let time_slices: Vec<TimeSlice> = slices
        .into_iter()
        .map(|s| {
            for j in 0..N_FACTORS {
                truth_counts[j].push(s.change_counts[j]);
            }
            contexts_by_slice.push(s.contexts);
            TimeSlice {
                index: s.index,
                label: s.date.to_string(),
                documents: s
                    .documents
                    .into_iter()
                    .map(|doc| {
                        vec![doc
                            .into_iter()
                            .map(|id| remap[id as usize])
                            .collect::<Vec<TermId>>()]
                    })
                    .collect(),
            }
        })
        .collect();

    let refs = spec.reference_ids();
    let factors = (0..N_FACTORS)
        .map(|j| FactorTruth {
            factor: j + 1,
            reference_surface: term_surface(refs[j], spec.vocab_size),
            target: TargetFunction::PER_FACTOR[j],
            normalized_trace: normalize_trace(&truth_counts[j]),
            change_counts: core::mem::take(&mut truth_counts[j]),
        })
        .collect();

    Ok((
        SlicedCorpus {
            slices: time_slices,
            granularity: Granularity::Day,
            vocab,
        },
        GroundTruth {
            factors,
            contexts_by_slice,
        },
    ))
}
