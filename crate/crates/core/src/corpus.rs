//! Document ingestion: tokenization, vocabulary construction and the
//! bucketing of dated documents into contiguous calendar slices.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate};
use hashbrown::HashMap;

use crate::TermId;

/// Hard cap on the number of slices a corpus may span. A single stray
/// document dated centuries away would otherwise allocate millions of
/// empty slices.
pub const MAX_SLICES: i64 = 1_000_000;

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentError {
    /// Timestamp not parseable as an ISO-8601 calendar date.
    InvalidDate(String),
    /// Text empty after whitespace trim.
    EmptyText,
}

impl core::fmt::Display for DocumentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DocumentError::InvalidDate(s) => write!(f, "invalid date `{s}` (expected YYYY-MM-DD)"),
            DocumentError::EmptyText => write!(f, "document text is empty"),
        }
    }
}

impl core::error::Error for DocumentError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    /// No documents survived ingestion.
    NoDocuments,
    /// Date span too wide for the requested granularity.
    TooManySlices(i64),
}

impl core::fmt::Display for CorpusError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CorpusError::NoDocuments => write!(f, "no documents to build a corpus from"),
            CorpusError::TooManySlices(n) => {
                write!(f, "date span covers {n} slices (limit {MAX_SLICES})")
            }
        }
    }
}

impl core::error::Error for CorpusError {}

// ---------------------------------------------------------------------------
// Granularity

/// Calendar width of one time slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    Year,
    Month,
    Week,
    Day,
    Hour,
    Minute,
}

impl Granularity {
    pub const ALL: [Granularity; 6] = [
        Granularity::Year,
        Granularity::Month,
        Granularity::Week,
        Granularity::Day,
        Granularity::Hour,
        Granularity::Minute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Granularity::Year => "year",
            Granularity::Month => "month",
            Granularity::Week => "week",
            Granularity::Day => "day",
            Granularity::Hour => "hour",
            Granularity::Minute => "minute",
        }
    }

    pub fn parse(s: &str) -> Option<Granularity> {
        Granularity::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Bucket index of `date`. Indices of adjacent buckets differ by 1,
    /// so retaining every bucket between the observed minimum and maximum
    /// yields a contiguous timeline.
    ///
    /// Weeks are ISO-8601 weeks (Monday start). Documents carry day
    /// precision, so sub-day granularities bucket at 00:00.
    fn bucket_key(self, date: NaiveDate) -> i64 {
        let days = i64::from(date.num_days_from_ce());
        match self {
            Granularity::Year => i64::from(date.year()),
            Granularity::Month => i64::from(date.year()) * 12 + i64::from(date.month0()),
            // Day 1 of the proleptic Gregorian calendar (0001-01-01) is a
            // Monday, so Mondays satisfy days ≡ 1 (mod 7).
            Granularity::Week => {
                let monday = days - i64::from(date.weekday().num_days_from_monday());
                (monday - 1) / 7
            }
            Granularity::Day => days,
            Granularity::Hour => days * 24,
            Granularity::Minute => days * 24 * 60,
        }
    }

    fn bucket_label(self, key: i64) -> String {
        fn date_of(days: i64) -> NaiveDate {
            NaiveDate::from_num_days_from_ce_opt(days as i32).expect("bucket key out of range")
        }
        match self {
            Granularity::Year => format!("{key:04}"),
            Granularity::Month => {
                format!("{:04}-{:02}", key.div_euclid(12), key.rem_euclid(12) + 1)
            }
            Granularity::Week => {
                let monday = date_of(key * 7 + 1);
                let iso = monday.iso_week();
                format!("{:04}-W{:02}", iso.year(), iso.week())
            }
            Granularity::Day => date_of(key).to_string(),
            Granularity::Hour => {
                format!("{}T{:02}", date_of(key.div_euclid(24)), key.rem_euclid(24))
            }
            Granularity::Minute => {
                let minutes = key.rem_euclid(24 * 60);
                format!(
                    "{}T{:02}:{:02}",
                    date_of(key.div_euclid(24 * 60)),
                    minutes / 60,
                    minutes % 60
                )
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Tokenization

/// Hook for a caller-supplied stemmer. The default pipeline applies none.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;
}

pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Characters that end a sentence.
    pub sentence_terminators: Vec<char>,
    /// Matched after lowercasing (when enabled).
    pub stopwords: BTreeSet<String>,
    pub remove_stopwords: bool,
    pub stemmer: Option<Box<dyn Stemmer>>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            sentence_terminators: alloc::vec!['.', '!', '?'],
            stopwords: BTreeSet::new(),
            remove_stopwords: true,
            stemmer: None,
        }
    }
}

/// Splits `text` into sentences of tokens.
///
/// Sentences end at any configured terminator; tokens are maximal
/// alphanumeric runs, all other characters separate tokens. Stopword
/// removal and the stemmer hook run after case folding. Empty sentences
/// are dropped, so the result may be empty.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut sentence: Vec<String> = Vec::new();
    let mut token = String::new();

    fn flush_token(token: &mut String, sentence: &mut Vec<String>, cfg: &TokenizerConfig) {
        if token.is_empty() {
            return;
        }
        let t = core::mem::take(token);
        if cfg.remove_stopwords && cfg.stopwords.contains(&t) {
            return;
        }
        let t = match &cfg.stemmer {
            Some(stemmer) => stemmer.stem(&t),
            None => t,
        };
        if !t.is_empty() {
            sentence.push(t);
        }
    }

    for ch in text.chars() {
        if cfg.sentence_terminators.contains(&ch) {
            flush_token(&mut token, &mut sentence, cfg);
            if !sentence.is_empty() {
                sentences.push(core::mem::take(&mut sentence));
            }
        } else if ch.is_alphanumeric() {
            if cfg.lowercase {
                token.extend(ch.to_lowercase());
            } else {
                token.push(ch);
            }
        } else {
            flush_token(&mut token, &mut sentence, cfg);
        }
    }
    flush_token(&mut token, &mut sentence, cfg);
    if !sentence.is_empty() {
        sentences.push(sentence);
    }
    sentences
}

// ---------------------------------------------------------------------------
// Documents

/// One dated input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub date: NaiveDate,
    pub text: String,
}

impl RawDocument {
    /// Validates and parses one record. `date` must be `YYYY-MM-DD`;
    /// `text` must be non-empty after trimming.
    pub fn new(id: &str, date: &str, text: &str) -> Result<RawDocument, DocumentError> {
        let parsed = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|_| DocumentError::InvalidDate(date.to_string()))?;
        if text.trim().is_empty() {
            return Err(DocumentError::EmptyText);
        }
        Ok(RawDocument {
            id: id.to_string(),
            date: parsed,
            text: text.to_string(),
        })
    }
}

/// A document after tokenization, before id assignment.
#[derive(Debug, Clone)]
pub struct TokenizedDocument {
    pub id: String,
    pub date: NaiveDate,
    pub sentences: Vec<Vec<String>>,
}

// ---------------------------------------------------------------------------
// Vocabulary

/// Bidirectional term ↔ dense-id map with corpus frequencies and
/// stopword flags. Ids are assigned in lexicographic term order, which
/// makes them reproducible across ingestion paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: BTreeMap<String, TermId>,
    freq: Vec<u64>,
    stopword: Vec<bool>,
}

impl Vocabulary {
    pub fn new(terms_with_freq: Vec<(String, u64)>, stopwords: &BTreeSet<String>) -> Vocabulary {
        let mut terms_with_freq = terms_with_freq;
        terms_with_freq.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms = Vec::with_capacity(terms_with_freq.len());
        let mut freq = Vec::with_capacity(terms_with_freq.len());
        let mut stopword = Vec::with_capacity(terms_with_freq.len());
        let mut ids = BTreeMap::new();
        for (i, (term, f)) in terms_with_freq.into_iter().enumerate() {
            debug_assert!(f >= 1, "retained terms must occur at least once");
            ids.insert(term.clone(), i as TermId);
            stopword.push(stopwords.contains(&term));
            terms.push(term);
            freq.push(f);
        }
        Vocabulary {
            terms,
            ids,
            freq,
            stopword,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id as usize]
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn frequency(&self, id: TermId) -> u64 {
        self.freq[id as usize]
    }

    pub fn is_stopword(&self, id: TermId) -> bool {
        self.stopword[id as usize]
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// Slices

/// Documents of one calendar bucket, tokenized and id-mapped.
/// `documents[d][s]` is the s-th sentence of document d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSlice {
    pub index: usize,
    pub label: String,
    pub documents: Vec<Vec<Vec<TermId>>>,
}

impl TimeSlice {
    pub fn n_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[TermId]> {
        self.documents
            .iter()
            .flat_map(|doc| doc.iter().map(Vec::as_slice))
    }
}

/// An ordered, contiguous sequence of time slices over one vocabulary.
/// Buckets without documents are retained as empty slices.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedCorpus {
    pub slices: Vec<TimeSlice>,
    pub granularity: Granularity,
    pub vocab: Vocabulary,
}

impl SlicedCorpus {
    pub fn n_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn n_documents(&self) -> usize {
        self.slices.iter().map(TimeSlice::n_documents).sum()
    }

    /// Token occurrence counts per term in slice `t`.
    pub fn slice_term_counts(&self, t: usize) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.vocab.len()];
        for sentence in self.slices[t].sentences() {
            for &id in sentence {
                counts[id as usize] += 1;
            }
        }
        counts
    }

    /// Token occurrence counts of the whole corpus.
    pub fn total_term_counts(&self) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.vocab.len()];
        for slice in &self.slices {
            for sentence in slice.sentences() {
                for &id in sentence {
                    counts[id as usize] += 1;
                }
            }
        }
        counts
    }
}

/// Tokenizes and buckets validated documents.
///
/// Terms below `min_term_freq` corpus frequency are dropped from the
/// vocabulary and from every sentence. Document order is normalized to
/// `(date, id)` so repeated runs produce identical output.
pub fn build_sliced_corpus(
    docs: Vec<RawDocument>,
    granularity: Granularity,
    cfg: &TokenizerConfig,
    min_term_freq: u64,
) -> Result<SlicedCorpus, CorpusError> {
    let tokenized = docs
        .into_iter()
        .map(|d| TokenizedDocument {
            sentences: tokenize(&d.text, cfg),
            id: d.id,
            date: d.date,
        })
        .collect();
    build_from_tokenized(tokenized, granularity, min_term_freq, &cfg.stopwords)
}

/// Same as [`build_sliced_corpus`] for callers that tokenized documents
/// themselves (e.g. in parallel). `stopwords` only sets vocabulary
/// flags; removal is the tokenizer's job.
pub fn build_from_tokenized(
    mut docs: Vec<TokenizedDocument>,
    granularity: Granularity,
    min_term_freq: u64,
    stopwords: &BTreeSet<String>,
) -> Result<SlicedCorpus, CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::NoDocuments);
    }
    docs.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.id.cmp(&b.id)));

    let mut freq: HashMap<&str, u64> = HashMap::new();
    for doc in &docs {
        for sentence in &doc.sentences {
            for token in sentence {
                *freq.entry(token.as_str()).or_insert(0) += 1;
            }
        }
    }
    let retained: Vec<(String, u64)> = freq
        .iter()
        .filter(|(_, &f)| f >= min_term_freq)
        .map(|(&t, &f)| (t.to_string(), f))
        .collect();
    drop(freq);
    let vocab = Vocabulary::new(retained, stopwords);

    let min_key = docs
        .iter()
        .map(|d| granularity.bucket_key(d.date))
        .min()
        .expect("non-empty");
    let max_key = docs
        .iter()
        .map(|d| granularity.bucket_key(d.date))
        .max()
        .expect("non-empty");
    let span = max_key - min_key + 1;
    if span > MAX_SLICES {
        return Err(CorpusError::TooManySlices(span));
    }

    let mut slices: Vec<TimeSlice> = (0..span)
        .map(|i| TimeSlice {
            index: i as usize,
            label: granularity.bucket_label(min_key + i),
            documents: Vec::new(),
        })
        .collect();

    for doc in docs {
        let slot = (granularity.bucket_key(doc.date) - min_key) as usize;
        let mapped: Vec<Vec<TermId>> = doc
            .sentences
            .iter()
            .map(|sentence| {
                sentence
                    .iter()
                    .filter_map(|token| vocab.id(token))
                    .collect::<Vec<TermId>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        slices[slot].documents.push(mapped);
    }

    Ok(SlicedCorpus {
        slices,
        granularity,
        vocab,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cfg() -> TokenizerConfig {
        TokenizerConfig::default()
    }

    #[test]
    fn tokenize_splits_sentences_on_terminators() {
        let out = tokenize("The vote. The vote.", &cfg());
        assert_eq!(
            out,
            vec![vec!["the", "vote"], vec!["the", "vote"]]
        );
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("", &cfg()).is_empty());
    }

    #[test]
    fn semicolon_is_not_a_terminator() {
        let out = tokenize("Brexit wins; markets fall", &cfg());
        assert_eq!(out, vec![vec!["brexit", "wins", "markets", "fall"]]);
    }

    #[test]
    fn stopwords_are_removed_when_configured() {
        let mut c = cfg();
        c.stopwords.insert("the".into());
        let out = tokenize("The vote. The vote.", &c);
        assert_eq!(out, vec![vec!["vote"], vec!["vote"]]);
    }

    struct TruncateStemmer;
    impl Stemmer for TruncateStemmer {
        fn stem(&self, token: &str) -> String {
            token.chars().take(4).collect()
        }
    }

    #[test]
    fn stemmer_hook_applies_after_stopword_removal() {
        let mut c = cfg();
        c.stopwords.insert("markets".into());
        c.stemmer = Some(Box::new(TruncateStemmer));
        let out = tokenize("Brexit wins; markets fall", &c);
        assert_eq!(out, vec![vec!["brex", "wins", "fall"]]);
    }

    fn doc(id: &str, date: &str, text: &str) -> RawDocument {
        RawDocument::new(id, date, text).unwrap()
    }

    #[test]
    fn invalid_date_and_empty_text_are_rejected() {
        assert_eq!(
            RawDocument::new("a", "not-a-date", "x"),
            Err(DocumentError::InvalidDate("not-a-date".into()))
        );
        assert_eq!(
            RawDocument::new("a", "2016-01-01", "  \n "),
            Err(DocumentError::EmptyText)
        );
    }

    #[test]
    fn week_bucketing_follows_iso_weeks() {
        // 2016-01-04 and 2016-01-05 share ISO week 2016-W01;
        // 2016-01-12 falls in 2016-W02.
        let docs = vec![
            doc("a", "2016-01-04", "alpha beta."),
            doc("b", "2016-01-05", "alpha gamma."),
            doc("c", "2016-01-12", "beta gamma."),
        ];
        let corpus = build_sliced_corpus(docs, Granularity::Week, &cfg(), 1).unwrap();
        assert_eq!(corpus.n_slices(), 2);
        assert_eq!(corpus.slices[0].n_documents(), 2);
        assert_eq!(corpus.slices[1].n_documents(), 1);
        assert_eq!(corpus.slices[0].label, "2016-W01");
        assert_eq!(corpus.slices[1].label, "2016-W02");
    }

    #[test]
    fn sunday_belongs_to_previous_iso_week() {
        let docs = vec![
            doc("a", "2016-01-03", "alpha beta."), // Sunday, 2015-W53
            doc("b", "2016-01-04", "alpha beta."), // Monday, 2016-W01
        ];
        let corpus = build_sliced_corpus(docs, Granularity::Week, &cfg(), 1).unwrap();
        assert_eq!(corpus.n_slices(), 2);
        assert_eq!(corpus.slices[0].label, "2015-W53");
        assert_eq!(corpus.slices[1].label, "2016-W01");
    }

    #[test]
    fn empty_buckets_are_retained_between_occupied_ones() {
        let docs = vec![
            doc("a", "2016-01-01", "alpha beta."),
            doc("b", "2016-01-04", "alpha beta."),
        ];
        let corpus = build_sliced_corpus(docs, Granularity::Day, &cfg(), 1).unwrap();
        assert_eq!(corpus.n_slices(), 4);
        assert_eq!(corpus.slices[1].n_documents(), 0);
        assert_eq!(corpus.slices[2].n_documents(), 0);
        assert_eq!(corpus.n_documents(), 2);
    }

    #[test]
    fn no_documents_is_an_error() {
        assert_eq!(
            build_sliced_corpus(Vec::new(), Granularity::Week, &cfg(), 1).unwrap_err(),
            CorpusError::NoDocuments
        );
    }

    #[test]
    fn min_term_freq_drops_rare_terms_and_empty_sentences() {
        let docs = vec![
            doc("a", "2016-01-01", "alpha beta. unique."),
            doc("b", "2016-01-01", "alpha beta."),
        ];
        let corpus = build_sliced_corpus(docs, Granularity::Day, &cfg(), 2).unwrap();
        assert_eq!(corpus.vocab.len(), 2);
        assert!(corpus.vocab.id("unique").is_none());
        // the sentence that only contained "unique" vanishes
        assert_eq!(corpus.slices[0].documents[0].len(), 1);
    }

    #[test]
    fn vocabulary_ids_are_dense_lexicographic_with_frequencies() {
        let docs = vec![doc("a", "2016-01-01", "beta alpha beta.")];
        let corpus = build_sliced_corpus(docs, Granularity::Day, &cfg(), 1).unwrap();
        assert_eq!(corpus.vocab.term(0), "alpha");
        assert_eq!(corpus.vocab.term(1), "beta");
        assert_eq!(corpus.vocab.id("beta"), Some(1));
        assert_eq!(corpus.vocab.frequency(1), 2);
        for slice in &corpus.slices {
            for sentence in slice.sentences() {
                for &id in sentence {
                    assert!((id as usize) < corpus.vocab.len());
                }
            }
        }
    }

    #[test]
    fn ingestion_is_order_independent() {
        let mk = |order: &[usize]| {
            let all = vec![
                doc("b", "2016-01-02", "beta gamma. alpha."),
                doc("a", "2016-01-02", "alpha beta."),
                doc("c", "2016-01-09", "gamma alpha."),
            ];
            let docs: Vec<RawDocument> = order.iter().map(|&i| all[i].clone()).collect();
            build_sliced_corpus(docs, Granularity::Week, &cfg(), 1).unwrap()
        };
        assert_eq!(mk(&[0, 1, 2]), mk(&[2, 1, 0]));
        assert_eq!(mk(&[0, 1, 2]), mk(&[1, 2, 0]));
    }

    #[test]
    fn month_and_year_labels() {
        let docs = vec![
            doc("a", "2015-12-31", "alpha beta."),
            doc("b", "2016-01-01", "alpha beta."),
        ];
        let by_month = build_sliced_corpus(docs.clone(), Granularity::Month, &cfg(), 1).unwrap();
        assert_eq!(by_month.slices[0].label, "2015-12");
        assert_eq!(by_month.slices[1].label, "2016-01");
        let by_year = build_sliced_corpus(docs, Granularity::Year, &cfg(), 1).unwrap();
        assert_eq!(by_year.slices[0].label, "2015");
        assert_eq!(by_year.slices[1].label, "2016");
    }
}
