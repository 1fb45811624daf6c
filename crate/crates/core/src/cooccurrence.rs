//! Per-slice sparse co-occurrence counting, significance weighting and
//! the corpus-global statistic used to fill gaps.
//!
//! Two terms co-occur when they appear in the same sentence; a pair is
//! counted once per sentence regardless of multiplicity, so
//! `n_ab <= min(n_a, n_b)` always holds. Pairs never observed in a slice
//! are simply absent from its matrix — such absences are the "gaps" the
//! volatility estimators have to deal with.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::corpus::TimeSlice;
use crate::TermId;

/// Below this vocabulary size counting uses a dense triangular buffer
/// instead of a hash map.
const DENSE_COUNT_LIMIT: usize = 4096;

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoocError {
    /// Gap filling combined matrices built under different measures.
    MeasureMismatch { slice: Measure, global: Measure },
}

impl core::fmt::Display for CoocError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CoocError::MeasureMismatch { slice, global } => write!(
                f,
                "measure mismatch: slice built with {}, global with {}",
                slice.name(),
                global.name()
            ),
        }
    }
}

impl core::error::Error for CoocError {}

// ---------------------------------------------------------------------------
// Significance measures

/// Association weight assigned to a co-occurring pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// 2·n_ab / (n_a + n_b), in (0, 1].
    Dice,
    /// Log-likelihood ratio of the 2x2 sentence contingency table.
    Llr,
    /// log2(n_ab·N / (n_a·n_b)); non-positive values are dropped.
    Mi,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Dice, Measure::Llr, Measure::Mi];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Dice => "dice",
            Measure::Llr => "llr",
            Measure::Mi => "mi",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Significance of one pair from its sentence counts. Returns `None`
/// when the measure assigns no positive weight (the pair is then treated
/// as absent downstream).
pub fn pair_significance(
    n_ab: u64,
    n_a: u64,
    n_b: u64,
    n_sentences: u64,
    measure: Measure,
) -> Option<f64> {
    debug_assert!(n_ab >= 1);
    debug_assert!(n_ab <= n_a.min(n_b));
    debug_assert!(n_a.max(n_b) <= n_sentences);
    match measure {
        Measure::Dice => Some(2.0 * n_ab as f64 / (n_a as f64 + n_b as f64)),
        Measure::Mi => {
            let v = libm::log2((n_ab as f64 * n_sentences as f64) / (n_a as f64 * n_b as f64));
            (v > 0.0).then_some(v)
        }
        Measure::Llr => {
            let n = n_sentences as f64;
            let cells = [
                (n_ab as f64, n_a as f64, n_b as f64),
                ((n_a - n_ab) as f64, n_a as f64, n - n_b as f64),
                ((n_b - n_ab) as f64, n - n_a as f64, n_b as f64),
                (
                    (n_sentences + n_ab - n_a - n_b) as f64,
                    n - n_a as f64,
                    n - n_b as f64,
                ),
            ];
            let mut g2 = 0.0;
            for (k, row, col) in cells {
                if k > 0.0 {
                    g2 += k * libm::log(k * n / (row * col));
                }
            }
            let v = 2.0 * g2;
            (v > 0.0).then_some(v)
        }
    }
}

// ---------------------------------------------------------------------------
// Symmetric CSR storage

/// Symmetric sparse matrix in CSR form; every unordered pair is stored
/// in both rows so that per-term rows can be read off directly.
#[derive(Debug, Clone, PartialEq)]
struct SymCsr<T> {
    offsets: Vec<u32>,
    entries: Vec<(TermId, T)>,
}

impl<T: Copy + Default> SymCsr<T> {
    /// `pairs` must be sorted by `(a, b)` with `a < b` and no duplicates;
    /// the resulting rows are then sorted by neighbor id.
    fn from_sorted_pairs(n_terms: usize, pairs: &[(TermId, TermId, T)]) -> SymCsr<T> {
        debug_assert!(pairs.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        let total = pairs
            .len()
            .checked_mul(2)
            .and_then(|n| u32::try_from(n).ok())
            .expect("pair count exceeds u32 range");
        let mut offsets = vec![0u32; n_terms + 1];
        for &(a, b, _) in pairs {
            debug_assert!(a < b && (b as usize) < n_terms);
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n_terms {
            offsets[i + 1] += offsets[i];
        }
        debug_assert_eq!(offsets[n_terms], total);
        let mut cursor: Vec<u32> = offsets[..n_terms].to_vec();
        let mut entries = vec![(0 as TermId, T::default()); total as usize];
        for &(a, b, v) in pairs {
            entries[cursor[a as usize] as usize] = (b, v);
            cursor[a as usize] += 1;
            entries[cursor[b as usize] as usize] = (a, v);
            cursor[b as usize] += 1;
        }
        SymCsr { offsets, entries }
    }

    fn from_rows(rows: Vec<Vec<(TermId, T)>>) -> SymCsr<T> {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0u32);
        let mut entries = Vec::new();
        for row in rows {
            entries.extend(row);
            offsets.push(u32::try_from(entries.len()).expect("entry count exceeds u32 range"));
        }
        SymCsr { offsets, entries }
    }

    fn n_terms(&self) -> usize {
        self.offsets.len() - 1
    }

    fn row(&self, w: TermId) -> &[(TermId, T)] {
        let lo = self.offsets[w as usize] as usize;
        let hi = self.offsets[w as usize + 1] as usize;
        &self.entries[lo..hi]
    }

    fn get(&self, a: TermId, b: TermId) -> Option<T> {
        let row = self.row(a);
        row.binary_search_by_key(&b, |e| e.0).ok().map(|i| row[i].1)
    }

    /// Upper-triangle iteration: yields each unordered pair once,
    /// lexicographically ordered.
    fn pairs(&self) -> impl Iterator<Item = (TermId, TermId, T)> + '_ {
        (0..self.n_terms() as TermId).flat_map(move |a| {
            self.row(a)
                .iter()
                .filter(move |&&(b, _)| b > a)
                .map(move |&(b, v)| (a, b, v))
        })
    }
}

// ---------------------------------------------------------------------------
// Counting

/// Sparse symmetric co-occurrence counts of one slice, with per-term
/// sentence marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct CoocSlice {
    pub slice_index: usize,
    matrix: SymCsr<u32>,
    marginals: Vec<u32>,
    n_sentences: u64,
}

impl CoocSlice {
    pub fn n_terms(&self) -> usize {
        self.matrix.n_terms()
    }

    pub fn n_sentences(&self) -> u64 {
        self.n_sentences
    }

    /// Number of sentences of the slice containing `w`.
    pub fn marginal(&self, w: TermId) -> u32 {
        self.marginals[w as usize]
    }

    /// Co-occurrence row of `w`, sorted by neighbor id.
    pub fn row(&self, w: TermId) -> &[(TermId, u32)] {
        self.matrix.row(w)
    }

    pub fn count(&self, a: TermId, b: TermId) -> u32 {
        if a == b {
            return 0;
        }
        self.matrix.get(a, b).unwrap_or(0)
    }

    pub fn n_pairs(&self) -> usize {
        self.matrix.entries.len() / 2
    }

    /// Each unordered pair once, lexicographically ordered.
    pub fn pairs(&self) -> impl Iterator<Item = (TermId, TermId, u32)> + '_ {
        self.matrix.pairs()
    }
}

/// Collects the distinct term ids of `tokens` into `out`.
fn distinct_ids(tokens: &[TermId], out: &mut Vec<TermId>) {
    out.clear();
    out.extend_from_slice(tokens);
    out.sort_unstable();
    out.dedup();
}

/// Counts sentence-window co-occurrences of one slice. Every unordered
/// pair of distinct terms is counted once per sentence in which both
/// occur; marginals count sentences containing the term.
pub fn count_cooccurrences(slice: &TimeSlice, n_terms: usize) -> CoocSlice {
    let mut marginals = vec![0u32; n_terms];
    let mut n_sentences = 0u64;
    let mut scratch: Vec<TermId> = Vec::new();

    let pairs: Vec<(TermId, TermId, u32)> = if n_terms <= DENSE_COUNT_LIMIT {
        // triangular index of (a, b), a < b
        let tri = |a: usize, b: usize| a * (2 * n_terms - a - 1) / 2 + (b - a - 1);
        let mut dense = vec![0u32; n_terms * n_terms.saturating_sub(1) / 2];
        for sentence in slice.sentences() {
            n_sentences += 1;
            distinct_ids(sentence, &mut scratch);
            for (i, &a) in scratch.iter().enumerate() {
                marginals[a as usize] += 1;
                for &b in &scratch[i + 1..] {
                    dense[tri(a as usize, b as usize)] += 1;
                }
            }
        }
        let mut pairs = Vec::new();
        for a in 0..n_terms {
            for b in (a + 1)..n_terms {
                let c = dense[tri(a, b)];
                if c > 0 {
                    pairs.push((a as TermId, b as TermId, c));
                }
            }
        }
        pairs
    } else {
        let mut map: HashMap<(TermId, TermId), u32> = HashMap::new();
        for sentence in slice.sentences() {
            n_sentences += 1;
            distinct_ids(sentence, &mut scratch);
            for (i, &a) in scratch.iter().enumerate() {
                marginals[a as usize] += 1;
                for &b in &scratch[i + 1..] {
                    *map.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        let mut pairs: Vec<(TermId, TermId, u32)> =
            map.into_iter().map(|((a, b), c)| (a, b, c)).collect();
        pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
        pairs
    };

    CoocSlice {
        slice_index: slice.index,
        matrix: SymCsr::from_sorted_pairs(n_terms, &pairs),
        marginals,
        n_sentences,
    }
}

// ---------------------------------------------------------------------------
// Significance

/// Sparse symmetric significance weights of one slice. Support is a
/// subset of the count support: pairs the measure maps to a
/// non-positive weight are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct SigSlice {
    pub slice_index: usize,
    pub measure: Measure,
    matrix: SymCsr<f64>,
}

impl SigSlice {
    pub fn n_terms(&self) -> usize {
        self.matrix.n_terms()
    }

    pub fn row(&self, w: TermId) -> &[(TermId, f64)] {
        self.matrix.row(w)
    }

    pub fn get(&self, a: TermId, b: TermId) -> Option<f64> {
        self.matrix.get(a, b)
    }

    pub fn n_pairs(&self) -> usize {
        self.matrix.entries.len() / 2
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TermId, TermId, f64)> + '_ {
        self.matrix.pairs()
    }
}

/// Converts counts to significance weights. Pairs with fewer than
/// `min_cooc_count` joint sentences are skipped before weighting.
pub fn significance(c: &CoocSlice, measure: Measure, min_cooc_count: u32) -> SigSlice {
    let pairs: Vec<(TermId, TermId, f64)> = c
        .pairs()
        .filter(|&(_, _, cnt)| cnt >= min_cooc_count)
        .filter_map(|(a, b, cnt)| {
            pair_significance(
                u64::from(cnt),
                u64::from(c.marginal(a)),
                u64::from(c.marginal(b)),
                c.n_sentences,
                measure,
            )
            .map(|v| (a, b, v))
        })
        .collect();
    SigSlice {
        slice_index: c.slice_index,
        measure,
        matrix: SymCsr::from_sorted_pairs(c.n_terms(), &pairs),
    }
}

/// Corpus-global significance: the same formulas applied to counts
/// pooled over all slices, i.e. to the concatenated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSig {
    pub measure: Measure,
    matrix: SymCsr<f64>,
}

impl GlobalSig {
    pub fn n_terms(&self) -> usize {
        self.matrix.n_terms()
    }

    pub fn row(&self, w: TermId) -> &[(TermId, f64)] {
        self.matrix.row(w)
    }

    pub fn get(&self, a: TermId, b: TermId) -> Option<f64> {
        self.matrix.get(a, b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TermId, TermId, f64)> + '_ {
        self.matrix.pairs()
    }
}

pub fn global_significance(slices: &[CoocSlice], measure: Measure, min_cooc_count: u32) -> GlobalSig {
    let n_terms = slices.first().map_or(0, CoocSlice::n_terms);
    debug_assert!(slices.iter().all(|s| s.n_terms() == n_terms));

    let mut counts: HashMap<(TermId, TermId), u64> = HashMap::new();
    let mut marginals = vec![0u64; n_terms];
    let mut n_sentences = 0u64;
    for slice in slices {
        n_sentences += slice.n_sentences;
        for (w, m) in slice.marginals.iter().enumerate() {
            marginals[w] += u64::from(*m);
        }
        for (a, b, cnt) in slice.pairs() {
            *counts.entry((a, b)).or_insert(0) += u64::from(cnt);
        }
    }
    let mut pairs: Vec<(TermId, TermId, f64)> = counts
        .into_iter()
        .filter(|&(_, cnt)| cnt >= u64::from(min_cooc_count))
        .filter_map(|((a, b), cnt)| {
            pair_significance(
                cnt,
                marginals[a as usize],
                marginals[b as usize],
                n_sentences,
                measure,
            )
            .map(|v| (a, b, v))
        })
        .collect();
    pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
    GlobalSig {
        measure,
        matrix: SymCsr::from_sorted_pairs(n_terms, &pairs),
    }
}

/// Merges two id-sorted significance rows, giving `primary` priority.
fn merge_rows(primary: &[(TermId, f64)], fallback: &[(TermId, f64)]) -> Vec<(TermId, f64)> {
    let mut out = Vec::with_capacity(primary.len().max(fallback.len()));
    let (mut i, mut j) = (0, 0);
    while i < primary.len() || j < fallback.len() {
        match (primary.get(i), fallback.get(j)) {
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

/// Inserts the global value for every pair present in the global
/// statistic but absent from the slice; slice-local values are never
/// overwritten. Pairs absent from both stay absent.
pub fn fill_gaps(s: &SigSlice, g: &GlobalSig) -> Result<SigSlice, CoocError> {
    if s.measure != g.measure {
        return Err(CoocError::MeasureMismatch {
            slice: s.measure,
            global: g.measure,
        });
    }
    debug_assert_eq!(s.n_terms(), g.n_terms());
    let rows: Vec<Vec<(TermId, f64)>> = (0..s.n_terms() as TermId)
        .map(|w| merge_rows(s.row(w), g.row(w)))
        .collect();
    Ok(SigSlice {
        slice_index: s.slice_index,
        measure: s.measure,
        matrix: SymCsr::from_rows(rows),
    })
}

// ---------------------------------------------------------------------------
// Abstract row access for the volatility engine

/// Read access to per-slice (and optionally global) significance rows.
/// Implemented both by full matrices and by focused per-term statistics,
/// which produce identical rows for the terms they cover.
pub trait SigSource {
    fn n_slices(&self) -> usize;
    /// Significance row of `w` in slice `t`, sorted by neighbor id.
    fn row(&self, t: usize, w: TermId) -> &[(TermId, f64)];
    fn has_global(&self) -> bool;
    /// Global significance row of `w`, sorted by neighbor id.
    fn global_row(&self, w: TermId) -> &[(TermId, f64)];
}

/// [`SigSource`] over fully materialized slice matrices.
pub struct SliceSigSource<'a> {
    pub slices: &'a [SigSlice],
    pub global: Option<&'a GlobalSig>,
}

impl SigSource for SliceSigSource<'_> {
    fn n_slices(&self) -> usize {
        self.slices.len()
    }

    fn row(&self, t: usize, w: TermId) -> &[(TermId, f64)] {
        self.slices[t].row(w)
    }

    fn has_global(&self) -> bool {
        self.global.is_some()
    }

    fn global_row(&self, w: TermId) -> &[(TermId, f64)] {
        self.global.expect("global statistic not built").row(w)
    }
}

// ---------------------------------------------------------------------------
// Focused statistics

/// Streaming co-occurrence statistics restricted to a set of focus
/// terms. Produces exactly the rows a full [`CoocSlice`] would, but
/// without materializing the complete pair matrix — at generator scale
/// that matrix has hundreds of thousands of pairs per slice while only a
/// handful of rows are ever read.
pub struct FocusCoocBuilder {
    n_terms: usize,
    focus: Vec<TermId>,
    skip: Vec<bool>,
    dense_rows: Vec<Vec<u32>>,
    touched: Vec<Vec<TermId>>,
    marginals: Vec<u32>,
    n_sentences: u64,
    scratch: Vec<TermId>,
    slices: Vec<FocusCoocSlice>,
}

#[derive(Debug, Clone)]
pub struct FocusCoocSlice {
    /// Per focus term: co-occurrence row sorted by neighbor id.
    pub rows: Vec<Vec<(TermId, u32)>>,
    pub marginals: Vec<u32>,
    pub n_sentences: u64,
}

impl FocusCoocBuilder {
    /// `skip[w]` drops term `w` from counting entirely (used for
    /// stopwords that a string-level pipeline would have removed at
    /// tokenization). Focus terms must not be skipped.
    pub fn new(n_terms: usize, mut focus: Vec<TermId>, skip: Vec<bool>) -> FocusCoocBuilder {
        focus.sort_unstable();
        focus.dedup();
        debug_assert_eq!(skip.len(), n_terms);
        debug_assert!(focus.iter().all(|&f| !skip[f as usize]));
        FocusCoocBuilder {
            n_terms,
            dense_rows: focus.iter().map(|_| vec![0u32; n_terms]).collect(),
            touched: focus.iter().map(|_| Vec::new()).collect(),
            focus,
            skip,
            marginals: vec![0; n_terms],
            n_sentences: 0,
            scratch: Vec::new(),
            slices: Vec::new(),
        }
    }

    pub fn add_sentence(&mut self, tokens: &[TermId]) {
        self.n_sentences += 1;
        let scratch = &mut self.scratch;
        scratch.clear();
        scratch.extend(tokens.iter().filter(|&&t| !self.skip[t as usize]));
        scratch.sort_unstable();
        scratch.dedup();
        for &id in scratch.iter() {
            self.marginals[id as usize] += 1;
        }
        for (fi, &f) in self.focus.iter().enumerate() {
            if scratch.binary_search(&f).is_err() {
                continue;
            }
            let row = &mut self.dense_rows[fi];
            let touched = &mut self.touched[fi];
            for &id in scratch.iter() {
                if id != f {
                    if row[id as usize] == 0 {
                        touched.push(id);
                    }
                    row[id as usize] += 1;
                }
            }
        }
    }

    /// Closes the current slice and starts the next one.
    pub fn finish_slice(&mut self) {
        let mut rows = Vec::with_capacity(self.focus.len());
        for fi in 0..self.focus.len() {
            let touched = &mut self.touched[fi];
            touched.sort_unstable();
            let dense = &mut self.dense_rows[fi];
            let mut row = Vec::with_capacity(touched.len());
            for &id in touched.iter() {
                row.push((id, dense[id as usize]));
                dense[id as usize] = 0;
            }
            touched.clear();
            rows.push(row);
        }
        self.slices.push(FocusCoocSlice {
            rows,
            marginals: core::mem::replace(&mut self.marginals, vec![0; self.n_terms]),
            n_sentences: core::mem::take(&mut self.n_sentences),
        });
    }

    /// Converts the accumulated counts to significance rows plus the
    /// pooled global rows for the focus terms.
    pub fn finish(self, measure: Measure, min_cooc_count: u32) -> FocusSig {
        let n_slices = self.slices.len();
        let mut slice_rows: Vec<Vec<Vec<(TermId, f64)>>> = Vec::with_capacity(n_slices);
        for slice in &self.slices {
            let rows = self
                .focus
                .iter()
                .enumerate()
                .map(|(fi, &f)| {
                    slice.rows[fi]
                        .iter()
                        .filter(|&&(_, cnt)| cnt >= min_cooc_count)
                        .filter_map(|&(b, cnt)| {
                            pair_significance(
                                u64::from(cnt),
                                u64::from(slice.marginals[f as usize]),
                                u64::from(slice.marginals[b as usize]),
                                slice.n_sentences,
                                measure,
                            )
                            .map(|v| (b, v))
                        })
                        .collect::<Vec<(TermId, f64)>>()
                })
                .collect();
            slice_rows.push(rows);
        }

        let mut pooled_marginals = vec![0u64; self.n_terms];
        let mut pooled_sentences = 0u64;
        for slice in &self.slices {
            pooled_sentences += slice.n_sentences;
            for (w, m) in slice.marginals.iter().enumerate() {
                pooled_marginals[w] += u64::from(*m);
            }
        }
        let global_rows: Vec<Vec<(TermId, f64)>> = self
            .focus
            .iter()
            .enumerate()
            .map(|(fi, &f)| {
                let mut pooled: BTreeMap<TermId, u64> = BTreeMap::new();
                for slice in &self.slices {
                    for &(b, cnt) in &slice.rows[fi] {
                        *pooled.entry(b).or_insert(0) += u64::from(cnt);
                    }
                }
                pooled
                    .into_iter()
                    .filter(|&(_, cnt)| cnt >= u64::from(min_cooc_count))
                    .filter_map(|(b, cnt)| {
                        pair_significance(
                            cnt,
                            pooled_marginals[f as usize],
                            pooled_marginals[b as usize],
                            pooled_sentences,
                            measure,
                        )
                        .map(|v| (b, v))
                    })
                    .collect()
            })
            .collect();

        let focus_index = self
            .focus
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, i))
            .collect();
        FocusSig {
            measure,
            n_slices,
            focus_index,
            slice_rows,
            global_rows,
        }
    }

    /// Raw count rows, for equivalence checks against full matrices.
    pub fn count_slices(&self) -> &[FocusCoocSlice] {
        &self.slices
    }

    pub fn focus(&self) -> &[TermId] {
        &self.focus
    }
}

/// Significance rows of a fixed focus-term set, one per slice, plus
/// their pooled global rows.
pub struct FocusSig {
    pub measure: Measure,
    n_slices: usize,
    focus_index: BTreeMap<TermId, usize>,
    slice_rows: Vec<Vec<Vec<(TermId, f64)>>>,
    global_rows: Vec<Vec<(TermId, f64)>>,
}

impl FocusSig {
    fn index_of(&self, w: TermId) -> usize {
        *self
            .focus_index
            .get(&w)
            .expect("term is not part of the focus set")
    }
}

impl SigSource for FocusSig {
    fn n_slices(&self) -> usize {
        self.n_slices
    }

    fn row(&self, t: usize, w: TermId) -> &[(TermId, f64)] {
        &self.slice_rows[t][self.index_of(w)]
    }

    fn has_global(&self) -> bool {
        true
    }

    fn global_row(&self, w: TermId) -> &[(TermId, f64)] {
        &self.global_rows[self.index_of(w)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TimeSlice;
    use alloc::vec;

    fn slice_of(sentences: Vec<Vec<TermId>>) -> TimeSlice {
        TimeSlice {
            index: 0,
            label: alloc::string::String::from("t0"),
            documents: vec![sentences],
        }
    }

    #[test]
    fn pairs_counted_once_per_sentence() {
        // [[a,b],[a,b]] with a=0, b=1
        let slice = slice_of(vec![vec![0, 1], vec![0, 1]]);
        let c = count_cooccurrences(&slice, 2);
        assert_eq!(c.count(0, 1), 2);
        assert_eq!(c.marginal(0), 2);
        assert_eq!(c.marginal(1), 2);
        assert_eq!(c.n_sentences(), 2);
    }

    #[test]
    fn duplicates_within_a_sentence_collapse() {
        let slice = slice_of(vec![vec![0, 0, 1]]);
        let c = count_cooccurrences(&slice, 2);
        assert_eq!(c.count(0, 1), 1);
        assert_eq!(c.marginal(0), 1);
    }

    #[test]
    fn empty_slice_yields_empty_counts() {
        let slice = slice_of(vec![]);
        let c = count_cooccurrences(&slice, 3);
        assert_eq!(c.n_sentences(), 0);
        assert_eq!(c.n_pairs(), 0);
    }

    /// Exhaustive per-sentence pair enumeration, kept deliberately naive.
    fn brute_force_counts(sentences: &[Vec<TermId>], n_terms: usize) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0u32; n_terms]; n_terms];
        for s in sentences {
            for a in 0..n_terms as TermId {
                for b in 0..n_terms as TermId {
                    if a < b && s.contains(&a) && s.contains(&b) {
                        m[a as usize][b as usize] += 1;
                        m[b as usize][a as usize] += 1;
                    }
                }
            }
        }
        m
    }

    #[test]
    fn five_sentence_toy_slice_matches_brute_force() {
        let sentences = vec![
            vec![0, 1, 2],
            vec![2, 3],
            vec![0, 2, 2, 4],
            vec![1],
            vec![4, 0, 3],
        ];
        let slice = slice_of(sentences.clone());
        let c = count_cooccurrences(&slice, 5);
        let expect = brute_force_counts(&sentences, 5);
        for a in 0..5u32 {
            for b in 0..5u32 {
                if a != b {
                    assert_eq!(c.count(a, b), expect[a as usize][b as usize], "({a},{b})");
                }
            }
        }
    }

    #[test]
    fn dense_and_hash_counting_agree() {
        // same toy data pushed through both paths by lying about n_terms
        let sentences = vec![vec![0, 1, 2], vec![2, 3], vec![0, 2, 4], vec![4, 0, 3]];
        let slice = slice_of(sentences);
        let dense = count_cooccurrences(&slice, 5);
        let sparse = count_cooccurrences(&slice, DENSE_COUNT_LIMIT + 1);
        for (a, b, cnt) in dense.pairs() {
            assert_eq!(sparse.count(a, b), cnt);
        }
        assert_eq!(dense.n_pairs(), sparse.n_pairs());
    }

    fn toy_cooc() -> CoocSlice {
        // n_ab=2, n_a=4, n_b=6 within 8 sentences
        let mut sentences = Vec::new();
        sentences.push(vec![0, 1]);
        sentences.push(vec![0, 1]);
        sentences.push(vec![0]);
        sentences.push(vec![0]);
        sentences.push(vec![1]);
        sentences.push(vec![1]);
        sentences.push(vec![1]);
        sentences.push(vec![1]);
        count_cooccurrences(&slice_of(sentences), 2)
    }

    #[test]
    fn dice_formula() {
        let c = toy_cooc();
        let s = significance(&c, Measure::Dice, 1);
        assert_eq!(s.get(0, 1), Some(0.4));
        assert_eq!(s.get(1, 0), Some(0.4));
    }

    #[test]
    fn dice_is_one_for_perfect_association() {
        let slice = slice_of(vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
        let c = count_cooccurrences(&slice, 2);
        let s = significance(&c, Measure::Dice, 1);
        assert_eq!(s.get(0, 1), Some(1.0));
    }

    #[test]
    fn mi_drops_independent_pairs() {
        // n_ab*N == n_a*n_b: 1*4 == 2*2
        let slice = slice_of(vec![vec![0, 1], vec![0], vec![1], vec![2]]);
        let c = count_cooccurrences(&slice, 3);
        assert_eq!(c.count(0, 1), 1);
        let s = significance(&c, Measure::Mi, 1);
        assert_eq!(s.get(0, 1), None);
        assert_eq!(s.n_pairs(), 0);
    }

    #[test]
    fn llr_matches_direct_contingency_evaluation() {
        let c = toy_cooc();
        let s = significance(&c, Measure::Llr, 1);
        // independent evaluation of 2*sum k*ln(k/E) over the 2x2 table
        let (n_ab, n_a, n_b, n) = (2.0f64, 4.0, 6.0, 8.0);
        let table = [
            (n_ab, n_a * n_b / n),
            (n_a - n_ab, n_a * (n - n_b) / n),
            (n_b - n_ab, (n - n_a) * n_b / n),
            (n - n_a - n_b + n_ab, (n - n_a) * (n - n_b) / n),
        ];
        let expect: f64 = 2.0
            * table
                .iter()
                .filter(|(k, _)| *k > 0.0)
                .map(|(k, e)| k * libm::log(k / e))
                .sum::<f64>();
        let got = s.get(0, 1);
        if expect > 0.0 {
            assert!((got.unwrap() - expect).abs() < 1e-12);
        } else {
            assert_eq!(got, None);
        }
    }

    #[test]
    fn significance_is_symmetric() {
        let slice = slice_of(vec![vec![0, 1, 2], vec![1, 2], vec![0, 2], vec![0, 1, 2]]);
        let c = count_cooccurrences(&slice, 3);
        for m in Measure::ALL {
            let s = significance(&c, m, 1);
            for (a, b, v) in s.pairs() {
                assert_eq!(s.get(b, a), Some(v));
            }
        }
    }

    #[test]
    fn min_cooc_count_prunes_pairs() {
        let slice = slice_of(vec![vec![0, 1], vec![0, 1], vec![1, 2]]);
        let c = count_cooccurrences(&slice, 3);
        let s = significance(&c, Measure::Dice, 2);
        assert!(s.get(0, 1).is_some());
        assert_eq!(s.get(1, 2), None);
    }

    fn two_slices() -> (TimeSlice, TimeSlice) {
        let s0 = slice_of(vec![vec![0, 1, 2], vec![0, 1]]);
        let mut s1 = slice_of(vec![vec![1, 2], vec![0, 2], vec![2, 3]]);
        s1.index = 1;
        (s0, s1)
    }

    #[test]
    fn global_equals_concatenated_corpus() {
        let (s0, s1) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let c1 = count_cooccurrences(&s1, 4);
        let global = global_significance(&[c0, c1], Measure::Dice, 1);

        // oracle: recompute on the concatenation of both slices
        let mut all = s0.documents.clone();
        all.extend(s1.documents.clone());
        let merged = TimeSlice {
            index: 0,
            label: alloc::string::String::from("all"),
            documents: all,
        };
        let cm = count_cooccurrences(&merged, 4);
        let sm = significance(&cm, Measure::Dice, 1);
        let got: Vec<_> = global.pairs().collect();
        let expect: Vec<_> = sm.pairs().collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn global_support_is_union_of_slice_supports() {
        let (s0, s1) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let c1 = count_cooccurrences(&s1, 4);
        let global = global_significance(&[c0.clone(), c1.clone()], Measure::Dice, 1);
        // pair (2,3) only occurs in slice 1
        assert_eq!(c0.count(2, 3), 0);
        assert!(c1.count(2, 3) > 0);
        assert!(global.get(2, 3).is_some());
    }

    #[test]
    fn single_slice_global_matches_slice_significance() {
        let (s0, _) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let local = significance(&c0, Measure::Dice, 1);
        let global = global_significance(core::slice::from_ref(&c0), Measure::Dice, 1);
        let got: Vec<_> = global.pairs().collect();
        let expect: Vec<_> = local.pairs().collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn fill_gaps_inserts_only_missing_pairs() {
        let (s0, s1) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let c1 = count_cooccurrences(&s1, 4);
        let sig0 = significance(&c0, Measure::Dice, 1);
        let global = global_significance(&[c0, c1], Measure::Dice, 1);
        let filled = fill_gaps(&sig0, &global).unwrap();

        // slice-local values survive
        for (a, b, v) in sig0.pairs() {
            assert_eq!(filled.get(a, b), Some(v));
        }
        // gaps take the global value
        for (a, b, v) in global.pairs() {
            if sig0.get(a, b).is_none() {
                assert_eq!(filled.get(a, b), Some(v));
            }
        }
        // support is exactly the global support
        assert_eq!(
            filled.pairs().map(|(a, b, _)| (a, b)).collect::<Vec<_>>(),
            global.pairs().map(|(a, b, _)| (a, b)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn fill_gaps_on_empty_slice_copies_global() {
        let (s0, s1) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let c1 = count_cooccurrences(&s1, 4);
        let empty = significance(&count_cooccurrences(&slice_of(vec![]), 4), Measure::Dice, 1);
        let global = global_significance(&[c0, c1], Measure::Dice, 1);
        let filled = fill_gaps(&empty, &global).unwrap();
        assert_eq!(
            filled.pairs().collect::<Vec<_>>(),
            global.pairs().collect::<Vec<_>>()
        );
    }

    #[test]
    fn fill_gaps_rejects_measure_mismatch() {
        let (s0, s1) = two_slices();
        let c0 = count_cooccurrences(&s0, 4);
        let c1 = count_cooccurrences(&s1, 4);
        let sig0 = significance(&c0, Measure::Dice, 1);
        let global = global_significance(&[c0, c1], Measure::Llr, 1);
        assert!(matches!(
            fill_gaps(&sig0, &global),
            Err(CoocError::MeasureMismatch { .. })
        ));
    }

    #[test]
    fn focused_rows_match_full_matrix() {
        let (s0, s1) = two_slices();
        let c: Vec<CoocSlice> = [&s0, &s1]
            .iter()
            .map(|s| count_cooccurrences(s, 4))
            .collect();
        let sigs: Vec<SigSlice> = c.iter().map(|c| significance(c, Measure::Dice, 1)).collect();
        let global = global_significance(&c, Measure::Dice, 1);

        let mut builder = FocusCoocBuilder::new(4, vec![2, 0], vec![false; 4]);
        for s in [&s0, &s1] {
            for sentence in s.sentences() {
                builder.add_sentence(sentence);
            }
            builder.finish_slice();
        }
        let focus = builder.finish(Measure::Dice, 1);
        for t in 0..2 {
            for &w in &[0u32, 2u32] {
                assert_eq!(focus.row(t, w), sigs[t].row(w), "slice {t} term {w}");
            }
        }
        for &w in &[0u32, 2u32] {
            assert_eq!(focus.global_row(w), global.row(w), "global row {w}");
        }
    }

    #[test]
    fn focused_skip_mask_mirrors_token_removal() {
        // skipping term 1 must equal counting sentences with 1 removed
        let sentences = vec![vec![0, 1, 2], vec![1, 2], vec![0, 2]];
        let mut builder = FocusCoocBuilder::new(3, vec![0, 2], vec![false, true, false]);
        for s in &sentences {
            builder.add_sentence(s);
        }
        builder.finish_slice();
        let focus = builder.finish(Measure::Dice, 1);

        let stripped: Vec<Vec<TermId>> = sentences
            .iter()
            .map(|s| s.iter().copied().filter(|&t| t != 1).collect())
            .collect();
        let c = count_cooccurrences(&slice_of(stripped), 3);
        let sig = significance(&c, Measure::Dice, 1);
        assert_eq!(focus.row(0, 0), sig.row(0));
        assert_eq!(focus.row(0, 2), sig.row(2));
    }
}
