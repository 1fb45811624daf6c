//! Per-word context-volatility time series.
//!
//! For a focus word `w`, a history of `h` consecutive slices and one of
//! five estimators, the engine derives a single volatility value per
//! window from the ranked significance rows of `w`:
//!
//! * `baseline` — coefficient of variation of each co-occurrence's ranks,
//!   computed over the slices where the pair is observable; gaps are
//!   skipped entirely, which makes the estimator blind to appearing and
//!   disappearing contexts.
//! * `sig` — standard deviation of each co-occurrence's significance
//!   values, with unobserved slices entering as significance 0.
//! * `global_baseline` / `global_sig` — the same two statistics after
//!   every slice has been gap-filled with the corpus-global significance,
//!   so no gaps remain for pairs seen anywhere in the corpus.
//! * `minmax` — mean distance of min-max-normalized ranks between
//!   consecutive slices, using one normalization when a pair is present
//!   on both sides of a transition and a second, gap-aware one otherwise.
//!   Values are always in [0, 1], which makes words of very different
//!   frequencies comparable.
//!
//! The window ending at slice `t` is reported at `t`; windows in which
//! the word has no co-occurrences at all yield a missing value.

use alloc::vec;
use alloc::vec::Vec;

use crate::cooccurrence::{SigSlice, SigSource};
use crate::stats;
use crate::TermId;

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VolatilityError {
    /// History must span at least two slices.
    HistoryTooShort(usize),
    /// History exceeds the number of slices.
    HistoryExceedsSlices { h: usize, n_slices: usize },
    /// A global-variant estimator was requested without a global statistic.
    MissingGlobal,
}

impl core::fmt::Display for VolatilityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VolatilityError::HistoryTooShort(h) => {
                write!(f, "history must be >= 2, got {h}")
            }
            VolatilityError::HistoryExceedsSlices { h, n_slices } => {
                write!(f, "history {h} exceeds the {n_slices} available slices")
            }
            VolatilityError::MissingGlobal => {
                write!(f, "estimator needs a global co-occurrence statistic")
            }
        }
    }
}

impl core::error::Error for VolatilityError {}

// ---------------------------------------------------------------------------
// Estimators

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Baseline,
    GlobalBaseline,
    Sig,
    GlobalSig,
    MinMax,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Baseline,
        Estimator::GlobalBaseline,
        Estimator::Sig,
        Estimator::GlobalSig,
        Estimator::MinMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Baseline => "baseline",
            Estimator::GlobalBaseline => "global_baseline",
            Estimator::Sig => "sig",
            Estimator::GlobalSig => "global_sig",
            Estimator::MinMax => "minmax",
        }
    }

    pub fn parse(s: &str) -> Option<Estimator> {
        let canon = s.replace('-', "_");
        Estimator::ALL.into_iter().find(|e| e.name() == canon)
    }

    /// Whether the estimator reads gap-filled rows.
    pub fn uses_global(self) -> bool {
        matches!(self, Estimator::GlobalBaseline | Estimator::GlobalSig)
    }
}

// ---------------------------------------------------------------------------
// Ranking

/// One ranked co-occurrence of a focus word in one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedCooc {
    pub term: TermId,
    /// Dense rank, 1 = highest significance.
    pub raw_rank: u32,
    pub significance: f64,
}

/// Ranked co-occurrence row of a focus word in one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct RankView {
    pub focus: TermId,
    pub slice_index: usize,
    /// Ordered by rank (descending significance, ties by ascending id).
    pub entries: Vec<RankedCooc>,
}

impl RankView {
    pub fn n_cooc(&self) -> u32 {
        self.entries.len() as u32
    }
}

/// Ranks a significance row: descending significance, ties broken by
/// ascending term id, dense ranks `1..=n`.
fn rank_row(row: &[(TermId, f64)]) -> Vec<RankedCooc> {
    let mut entries: Vec<RankedCooc> = row
        .iter()
        .map(|&(term, significance)| RankedCooc {
            term,
            raw_rank: 0,
            significance,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.significance
            .total_cmp(&a.significance)
            .then_with(|| a.term.cmp(&b.term))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.raw_rank = i as u32 + 1;
    }
    entries
}

/// Ranked co-occurrences of `w` in one slice. Words without
/// co-occurrences yield an empty view.
pub fn rank_slice(s: &SigSlice, w: TermId) -> RankView {
    RankView {
        focus: w,
        slice_index: s.slice_index,
        entries: rank_row(s.row(w)),
    }
}

// ---------------------------------------------------------------------------
// Per-pair statistics

/// Coefficient of variation of the observable ranks of one pair across a
/// history: population standard deviation over mean. Gaps (`None`) are
/// excluded entirely, so interleaving empty slices between the same
/// observations does not change the value. At least one rank must be
/// observable.
pub fn cv_baseline(ranks: &[Option<u32>]) -> f64 {
    let observed: Vec<f64> = ranks.iter().flatten().map(|&r| f64::from(r)).collect();
    assert!(
        !observed.is_empty(),
        "cv_baseline needs at least one observable rank"
    );
    stats::population_std(&observed) / stats::mean(&observed)
}

/// Population standard deviation of the observable significance values
/// of one pair across a history. Gaps (`None`) are excluded; callers
/// that want gap information pre-fill the sequence (with 0 for the sig
/// estimator, with the global value for global_sig).
pub fn cv_sig(sigs: &[Option<f64>]) -> f64 {
    let observed: Vec<f64> = sigs.iter().flatten().copied().collect();
    assert!(
        !observed.is_empty(),
        "cv_sig needs at least one observable significance"
    );
    stats::population_std(&observed)
}

/// Normalized rank used when a pair is present on both sides of a
/// transition: ranks decrease from the maximum co-occurrence count of
/// the history, `(max_h + 1 - raw_rank) / max_h`, in (0, 1].
///
/// # Panics
///
/// Panics when `raw_rank` is 0 or exceeds `max_h`; that means rank
/// bookkeeping went wrong upstream.
pub fn minmax_rank_nonzero(raw_rank: u32, max_h: u32) -> f64 {
    assert!(
        raw_rank >= 1 && raw_rank <= max_h,
        "raw rank {raw_rank} outside 1..={max_h}"
    );
    f64::from(max_h + 1 - raw_rank) / f64::from(max_h)
}

/// Normalized rank used when a transition touches a gap: ranks decrease
/// from the slice-local co-occurrence count but are still normalized by
/// the history-wide maximum, `(n_cooc_t + 1 - raw_rank) / max_h`; a gap
/// itself maps to the absolute minimum 0.
///
/// # Panics
///
/// Panics on inconsistent rank bookkeeping (`raw_rank > n_cooc_t` or
/// `n_cooc_t > max_h`).
pub fn minmax_rank_zero(raw_rank: Option<u32>, n_cooc_t: u32, max_h: u32) -> f64 {
    let Some(rank) = raw_rank else {
        return 0.0;
    };
    assert!(
        rank >= 1 && rank <= n_cooc_t,
        "raw rank {rank} outside 1..={n_cooc_t}"
    );
    assert!(
        n_cooc_t <= max_h,
        "slice co-occurrence count {n_cooc_t} exceeds history maximum {max_h}"
    );
    f64::from(n_cooc_t + 1 - rank) / f64::from(max_h)
}

/// Summed normalized-rank distance of one pair over the `h - 1`
/// transitions of a history. `seq` holds, per slice, the pair's rank (or
/// `None` for a gap) and the focus word's co-occurrence count in that
/// slice; `max_h` is the largest such count in the history. Transitions
/// with both sides present compare [`minmax_rank_nonzero`] values, all
/// others compare [`minmax_rank_zero`] values. The caller divides by
/// `pairs * (h - 1)`.
pub fn cv_minmax(seq: &[(Option<u32>, u32)], max_h: u32) -> f64 {
    debug_assert!(seq.len() >= 2, "minmax needs at least one transition");
    debug_assert!(seq.iter().any(|(rank, _)| rank.is_some()));
    let mut sum = 0.0;
    for window in seq.windows(2) {
        let (rank_a, n_a) = window[0];
        let (rank_b, n_b) = window[1];
        let d = match (rank_a, rank_b) {
            (Some(ra), Some(rb)) => {
                (minmax_rank_nonzero(ra, max_h) - minmax_rank_nonzero(rb, max_h)).abs()
            }
            _ => (minmax_rank_zero(rank_a, n_a, max_h) - minmax_rank_zero(rank_b, n_b, max_h))
                .abs(),
        };
        sum += d;
    }
    sum
}

// ---------------------------------------------------------------------------
// Series

/// Per-word volatility time series. `values[t]` covers the window of
/// `h` slices ending at `t`; the first `h - 1` entries and every window
/// without observable co-occurrences are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub focus: TermId,
    pub estimator: Estimator,
    pub h: usize,
    pub values: Vec<Option<f64>>,
}

/// Ranked row of one slice indexed by term for window merging.
struct RankedRow {
    /// (term, raw rank, significance), sorted by term id.
    by_id: Vec<(TermId, u32, f64)>,
    n_cooc: u32,
}

fn ranked_row_from(row_entries: Vec<RankedCooc>) -> RankedRow {
    let n_cooc = row_entries.len() as u32;
    let mut by_id: Vec<(TermId, u32, f64)> = row_entries
        .into_iter()
        .map(|e| (e.term, e.raw_rank, e.significance))
        .collect();
    by_id.sort_unstable_by_key(|&(term, _, _)| term);
    RankedRow { by_id, n_cooc }
}

/// Merges a slice row with the global row (slice priority) before
/// ranking; used by the global-variant estimators.
fn merge_with_global(row: &[(TermId, f64)], global: &[(TermId, f64)]) -> Vec<(TermId, f64)> {
    let mut out = Vec::with_capacity(global.len().max(row.len()));
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < global.len() {
        match (row.get(i), global.get(j)) {
            (Some(&(a, va)), Some(&(b, _))) if a < b => {
                out.push((a, va));
                i += 1;
            }
            (Some(&(a, va)), Some(&(b, _))) if a == b => {
                out.push((a, va));
                i += 1;
                j += 1;
            }
            (_, Some(&(b, vb))) => {
                out.push((b, vb));
                j += 1;
            }
            (Some(&(a, va)), None) => {
                out.push((a, va));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Computes the volatility series of `w` by sliding a history of `h`
/// slices over the source, one slice at a time.
pub fn volatility_series<S: SigSource>(
    src: &S,
    w: TermId,
    estimator: Estimator,
    h: usize,
) -> Result<VolatilitySeries, VolatilityError> {
    let n_slices = src.n_slices();
    if h < 2 {
        return Err(VolatilityError::HistoryTooShort(h));
    }
    if h > n_slices {
        return Err(VolatilityError::HistoryExceedsSlices { h, n_slices });
    }
    if estimator.uses_global() && !src.has_global() {
        return Err(VolatilityError::MissingGlobal);
    }

    let ranked: Vec<RankedRow> = (0..n_slices)
        .map(|t| {
            let row = src.row(t, w);
            if estimator.uses_global() {
                ranked_row_from(rank_row(&merge_with_global(row, src.global_row(w))))
            } else {
                ranked_row_from(rank_row(row))
            }
        })
        .collect();

    let mut values = vec![None; n_slices];
    let mut seq: Vec<(Option<u32>, f64, u32)> = vec![(None, 0.0, 0); h];
    for end in (h - 1)..n_slices {
        values[end] = window_value(&ranked[end + 1 - h..=end], estimator, &mut seq);
    }
    Ok(VolatilitySeries {
        focus: w,
        estimator,
        h,
        values,
    })
}

/// One window: iterates the union of the window's co-occurring terms and
/// averages the per-pair statistic. Returns `None` when the union is
/// empty (the word has no observable co-occurrence in the window).
fn window_value(
    window: &[RankedRow],
    estimator: Estimator,
    seq: &mut [(Option<u32>, f64, u32)],
) -> Option<f64> {
    let h = window.len();
    let max_h = window.iter().map(|r| r.n_cooc).max().unwrap_or(0);
    let mut cursors = vec![0usize; h];
    let mut n_pairs = 0u64;
    let mut sum = 0.0;

    loop {
        let mut next_term: Option<TermId> = None;
        for (t, row) in window.iter().enumerate() {
            if let Some(&(term, _, _)) = row.by_id.get(cursors[t]) {
                next_term = Some(match next_term {
                    Some(cur) => cur.min(term),
                    None => term,
                });
            }
        }
        let Some(term) = next_term else {
            break;
        };

        for (t, row) in window.iter().enumerate() {
            match row.by_id.get(cursors[t]) {
                Some(&(id, rank, sig)) if id == term => {
                    seq[t] = (Some(rank), sig, row.n_cooc);
                    cursors[t] += 1;
                }
                _ => seq[t] = (None, 0.0, row.n_cooc),
            }
        }

        n_pairs += 1;
        sum += match estimator {
            Estimator::Baseline | Estimator::GlobalBaseline => {
                let ranks: Vec<Option<u32>> = seq.iter().map(|&(r, _, _)| r).collect();
                cv_baseline(&ranks)
            }
            Estimator::Sig => {
                // unobserved slices enter as significance 0
                let sigs: Vec<Option<f64>> = seq
                    .iter()
                    .map(|&(r, s, _)| Some(if r.is_some() { s } else { 0.0 }))
                    .collect();
                cv_sig(&sigs)
            }
            Estimator::GlobalSig => {
                // rows are gap-filled, so every slice is observable
                let sigs: Vec<Option<f64>> = seq.iter().map(|&(r, s, _)| r.map(|_| s)).collect();
                cv_sig(&sigs)
            }
            Estimator::MinMax => {
                let pair_seq: Vec<(Option<u32>, u32)> =
                    seq.iter().map(|&(r, _, n)| (r, n)).collect();
                cv_minmax(&pair_seq, max_h)
            }
        };
    }

    if n_pairs == 0 {
        return None;
    }
    let denom = match estimator {
        Estimator::MinMax => n_pairs as f64 * (h as f64 - 1.0),
        _ => n_pairs as f64,
    };
    Some(sum / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccurrence::{
        count_cooccurrences, global_significance, significance, Measure, SliceSigSource,
    };
    use crate::corpus::TimeSlice;
    use alloc::string::String;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} != {b}");
    }

    // -- ranking ------------------------------------------------------------

    fn sig_slice_from(sentences: Vec<Vec<TermId>>, n_terms: usize) -> SigSlice {
        let slice = TimeSlice {
            index: 0,
            label: String::from("t"),
            documents: alloc::vec![sentences],
        };
        significance(&count_cooccurrences(&slice, n_terms), Measure::Dice, 1)
    }

    #[test]
    fn ranks_break_ties_by_ascending_id() {
        // focus 0: term 1 clearly strongest, terms 2 and 3 exactly tied
        let s = sig_slice_from(
            alloc::vec![
                alloc::vec![0, 1],
                alloc::vec![0, 1],
                alloc::vec![0, 2],
                alloc::vec![0, 3]
            ],
            4,
        );
        let view = rank_slice(&s, 0);
        assert_eq!(view.n_cooc(), 3);
        assert_eq!((view.entries[0].term, view.entries[0].raw_rank), (1, 1));
        assert_eq!((view.entries[1].term, view.entries[1].raw_rank), (2, 2));
        assert_eq!((view.entries[2].term, view.entries[2].raw_rank), (3, 3));
        assert_eq!(view.entries[1].significance, view.entries[2].significance);
    }

    #[test]
    fn single_cooccurrence_gets_rank_one() {
        let s = sig_slice_from(alloc::vec![alloc::vec![0, 1]], 2);
        let view = rank_slice(&s, 0);
        assert_eq!(view.entries.len(), 1);
        assert_eq!(view.entries[0].raw_rank, 1);
    }

    #[test]
    fn word_without_cooccurrences_yields_empty_view() {
        let s = sig_slice_from(alloc::vec![alloc::vec![0, 1]], 3);
        let view = rank_slice(&s, 2);
        assert_eq!(view.n_cooc(), 0);
    }

    #[test]
    fn ranks_match_reference_sort() {
        let mut row: Vec<(TermId, f64)> = (0..20u32)
            .map(|i| (i + 1, f64::from((i * 7) % 13) / 13.0))
            .collect();
        row.sort_unstable_by_key(|&(t, _)| t);
        let ranked = rank_row(&row);
        // oracle: position in an independent full sort
        let mut oracle = row.clone();
        oracle.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        for (i, &(term, _)) in oracle.iter().enumerate() {
            let got = ranked.iter().find(|e| e.term == term).unwrap();
            assert_eq!(got.raw_rank as usize, i + 1);
        }
    }

    // -- cv primitives --------------------------------------------------------

    #[test]
    fn cv_baseline_ignores_gaps() {
        let with_gaps = [
            Some(1),
            None,
            Some(2),
            None,
            Some(3),
            None,
            Some(4),
            None,
            Some(5),
            None,
        ];
        let compact = [Some(1), Some(2), Some(3), Some(4), Some(5)];
        let v = cv_baseline(&with_gaps);
        close(v, cv_baseline(&compact));
        // sigma = sqrt(2), mean = 3
        close(v, libm::sqrt(2.0) / 3.0);
    }

    #[test]
    fn cv_baseline_constant_ranks_zero() {
        assert_eq!(cv_baseline(&[Some(4), Some(4), Some(4)]), 0.0);
    }

    #[test]
    fn cv_baseline_two_ranks() {
        close(cv_baseline(&[Some(1), Some(3)]), 0.5);
    }

    #[test]
    #[should_panic]
    fn cv_baseline_rejects_all_gaps() {
        cv_baseline(&[None, None]);
    }

    #[test]
    fn cv_sig_examples() {
        close(cv_sig(&[Some(0.4), Some(0.2)]), 0.1);
        assert_eq!(cv_sig(&[Some(0.3), Some(0.3), Some(0.3)]), 0.0);
        assert_eq!(cv_sig(&[Some(0.7)]), 0.0);
    }

    #[test]
    fn minmax_rank_nonzero_examples() {
        close(minmax_rank_nonzero(1, 2), 1.0);
        close(minmax_rank_nonzero(4, 4), 0.25);
        close(minmax_rank_nonzero(3, 4), 0.5);
    }

    #[test]
    #[should_panic]
    fn minmax_rank_nonzero_rejects_rank_beyond_max() {
        minmax_rank_nonzero(5, 4);
    }

    #[test]
    fn minmax_rank_zero_examples() {
        assert_eq!(minmax_rank_zero(None, 0, 7), 0.0);
        close(minmax_rank_zero(Some(2), 2, 2), 0.5);
        close(minmax_rank_zero(Some(1), 3, 3), 1.0);
    }

    #[test]
    #[should_panic]
    fn minmax_rank_zero_rejects_rank_beyond_slice_count() {
        minmax_rank_zero(Some(3), 2, 4);
    }

    #[test]
    fn minmax_transition_distances_stay_in_unit_interval() {
        for max_h in 1..6u32 {
            for n_a in 0..=max_h {
                for n_b in 0..=max_h {
                    for ra in 1..=n_a.max(1) {
                        for rb in 1..=n_b.max(1) {
                            let seq = [
                                ((n_a > 0).then_some(ra.min(n_a.max(1))), n_a),
                                ((n_b > 0).then_some(rb.min(n_b.max(1))), n_b),
                            ];
                            if seq[0].0.is_none() && seq[1].0.is_none() {
                                continue;
                            }
                            let d = cv_minmax(&seq, max_h);
                            assert!((0.0..=1.0).contains(&d), "d={d}");
                        }
                    }
                }
            }
        }
    }

    // -- the worked h=2 example ------------------------------------------------

    #[test]
    fn cv_minmax_worked_example() {
        // slice 1 ranks {x:1, y:2} (n=2); slice 2 {x:1, z:2} (n=2); max_h=2
        close(cv_minmax(&[(Some(1), 2), (Some(1), 2)], 2), 0.0); // pair x
        close(cv_minmax(&[(Some(2), 2), (None, 2)], 2), 0.5); // pair y
        close(cv_minmax(&[(None, 2), (Some(2), 2)], 2), 0.5); // pair z
        let total = (0.0 + 0.5 + 0.5) / 3.0;
        close(total, 1.0 / 3.0);
    }

    #[test]
    fn cv_minmax_identical_rank_views_zero() {
        let seq = [(Some(3), 5), (Some(3), 5), (Some(3), 5)];
        assert_eq!(cv_minmax(&seq, 5), 0.0);
    }

    #[test]
    fn cv_minmax_single_slice_presence_closed_form() {
        // h=2, word present only in slice 1 with n co-occurrences: the
        // window mean is sum_r (n+1-r) / n^2 = (n+1)/(2n)
        let n = 3u32;
        let mut sum = 0.0;
        for r in 1..=n {
            sum += cv_minmax(&[(Some(r), n), (None, 0)], n);
        }
        let cv = sum / f64::from(n);
        close(cv, f64::from(n + 1) / (2.0 * f64::from(n)));
        close(cv, 2.0 / 3.0);
    }

    // -- the engine -------------------------------------------------------------

    fn stats_for(
        slices: Vec<Vec<Vec<TermId>>>,
        n_terms: usize,
    ) -> (Vec<SigSlice>, crate::cooccurrence::GlobalSig) {
        let cooc: Vec<_> = slices
            .into_iter()
            .enumerate()
            .map(|(i, sentences)| {
                let slice = TimeSlice {
                    index: i,
                    label: String::from("t"),
                    documents: alloc::vec![sentences],
                };
                count_cooccurrences(&slice, n_terms)
            })
            .collect();
        let sigs = cooc
            .iter()
            .map(|c| significance(c, Measure::Dice, 1))
            .collect();
        let global = global_significance(&cooc, Measure::Dice, 1);
        (sigs, global)
    }

    #[test]
    fn engine_reproduces_worked_minmax_example() {
        // focus 0: slice 0 co-occurs strongly with 1, weakly with 2;
        // slice 1 strongly with 1, weakly with 3 — the x/y/z example.
        let (sigs, _) = stats_for(
            alloc::vec![
                alloc::vec![alloc::vec![0, 1], alloc::vec![0, 1], alloc::vec![0, 2]],
                alloc::vec![alloc::vec![0, 1], alloc::vec![0, 1], alloc::vec![0, 3]],
            ],
            4,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: None,
        };
        let series = volatility_series(&src, 0, Estimator::MinMax, 2).unwrap();
        assert_eq!(series.values.len(), 2);
        assert_eq!(series.values[0], None);
        close(series.values[1].unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn identical_slices_give_all_zero_series() {
        let sentences = alloc::vec![
            alloc::vec![0, 1, 2],
            alloc::vec![0, 1],
            alloc::vec![2, 3],
            alloc::vec![0, 3]
        ];
        let (sigs, global) = stats_for(
            alloc::vec![sentences.clone(), sentences.clone(), sentences],
            4,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: Some(&global),
        };
        for estimator in Estimator::ALL {
            for w in 0..4u32 {
                let series = volatility_series(&src, w, estimator, 2).unwrap();
                for v in series.values.iter().flatten() {
                    assert_eq!(*v, 0.0, "{} word {w}", estimator.name());
                }
            }
        }
    }

    #[test]
    fn missing_windows_are_none() {
        // word 3 co-occurs only in the last slice
        let (sigs, _) = stats_for(
            alloc::vec![
                alloc::vec![alloc::vec![0, 1]],
                alloc::vec![alloc::vec![0, 1]],
                alloc::vec![alloc::vec![0, 3]],
            ],
            4,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: None,
        };
        let series = volatility_series(&src, 3, Estimator::MinMax, 2).unwrap();
        assert_eq!(series.values[1], None);
        assert!(series.values[2].is_some());
    }

    #[test]
    fn history_bounds_are_enforced() {
        let (sigs, _) = stats_for(
            alloc::vec![alloc::vec![alloc::vec![0, 1]], alloc::vec![alloc::vec![0, 1]]],
            2,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: None,
        };
        assert_eq!(
            volatility_series(&src, 0, Estimator::Baseline, 1).unwrap_err(),
            VolatilityError::HistoryTooShort(1)
        );
        assert_eq!(
            volatility_series(&src, 0, Estimator::Baseline, 3).unwrap_err(),
            VolatilityError::HistoryExceedsSlices { h: 3, n_slices: 2 }
        );
        assert_eq!(
            volatility_series(&src, 0, Estimator::GlobalSig, 2).unwrap_err(),
            VolatilityError::MissingGlobal
        );
    }

    #[test]
    fn three_slice_toy_corpus_matches_hand_trace() {
        // dice values:
        //   slice 0: (0,1) = 2*2/(3+2) = 0.8, (0,2) = 2*1/(3+1) = 0.5
        //   slice 1: (0,1) = 1.0
        //   slice 2: (0,1) = 2*1/(2+1) = 2/3, (0,2) = 2*2/(2+2) = 1.0
        let (sigs, _) = stats_for(
            alloc::vec![
                alloc::vec![alloc::vec![0, 1], alloc::vec![0, 1, 2], alloc::vec![0]],
                alloc::vec![alloc::vec![0, 1]],
                alloc::vec![alloc::vec![0, 2], alloc::vec![0, 1, 2]],
            ],
            3,
        );
        assert_eq!(sigs[0].get(0, 1), Some(0.8));
        assert_eq!(sigs[0].get(0, 2), Some(0.5));
        assert_eq!(sigs[1].get(0, 1), Some(1.0));
        assert_eq!(sigs[2].get(0, 1), Some(2.0 / 3.0));
        assert_eq!(sigs[2].get(0, 2), Some(1.0));
        let src = SliceSigSource {
            slices: &sigs,
            global: None,
        };

        // ranks for focus 0: slice 0 {1:r1, 2:r2} n=2; slice 1 {1:r1} n=1;
        // slice 2 {2:r1, 1:r2} n=2
        //
        // minmax window 0-1 (max_h=2): pair 1 both present |1-1|=0;
        //   pair 2 present/gap |0.5-0|=0.5 → (0+0.5)/(2*1)
        // minmax window 1-2 (max_h=2): pair 1 |1-0.5|=0.5;
        //   pair 2 gap/present |0-1|=1 → 1.5/2
        let minmax = volatility_series(&src, 0, Estimator::MinMax, 2).unwrap();
        close(minmax.values[1].unwrap(), 0.25);
        close(minmax.values[2].unwrap(), 0.75);

        // baseline window 0-1: pair 1 ranks {1,1} → 0; pair 2 single rank → 0
        // baseline window 1-2: pair 1 ranks {1,2} → (0.5/1.5); pair 2 single → 0
        let baseline = volatility_series(&src, 0, Estimator::Baseline, 2).unwrap();
        close(baseline.values[1].unwrap(), 0.0);
        close(baseline.values[2].unwrap(), (0.5 / 1.5) / 2.0);

        // sig window 0-1: pair 1 sigma{0.8,1.0}=0.1; pair 2 sigma{0.5,0}=0.25
        let sig = volatility_series(&src, 0, Estimator::Sig, 2).unwrap();
        close(sig.values[1].unwrap(), 0.175);
    }

    #[test]
    fn global_variants_fill_gaps_before_ranking() {
        let (sigs, global) = stats_for(
            alloc::vec![
                alloc::vec![alloc::vec![0, 1], alloc::vec![0, 2]],
                alloc::vec![alloc::vec![0, 1]],
            ],
            3,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: Some(&global),
        };
        let series = volatility_series(&src, 0, Estimator::GlobalSig, 2).unwrap();
        let v01 = [sigs[0].get(0, 1).unwrap(), sigs[1].get(0, 1).unwrap()];
        let v02 = [sigs[0].get(0, 2).unwrap(), global.get(0, 2).unwrap()];
        let expect = (cv_sig(&[Some(v01[0]), Some(v01[1])])
            + cv_sig(&[Some(v02[0]), Some(v02[1])]))
            / 2.0;
        close(series.values[1].unwrap(), expect);
    }

    #[test]
    fn sig_scores_gaps_as_zero_significance() {
        let (sigs, _) = stats_for(
            alloc::vec![
                alloc::vec![alloc::vec![0, 1], alloc::vec![0, 2]],
                alloc::vec![alloc::vec![0, 1]],
            ],
            3,
        );
        let src = SliceSigSource {
            slices: &sigs,
            global: None,
        };
        let series = volatility_series(&src, 0, Estimator::Sig, 2).unwrap();
        let v01 = cv_sig(&[sigs[0].get(0, 1), sigs[1].get(0, 1)]);
        let v02 = cv_sig(&[sigs[0].get(0, 2), Some(0.0)]);
        close(series.values[1].unwrap(), (v01 + v02) / 2.0);
    }
}
