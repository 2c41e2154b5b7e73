//! Vocabulary construction.

use std::collections::{BTreeSet, HashMap};

use crate::ngrams::{hanja_ngrams, units_for_word, NGramConfig, UnitSet, WordIndex};
use crate::text_units::{AnnotatedToken, CorpusSource, StreamStats};
use crate::trainer::TrainError;

/// One vocabulary word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    /// Surface form.
    pub surface: String,
    /// Corpus occurrences.
    pub count: u64,
    /// Hanja annotation adopted for this word: the first non-empty
    /// annotation observed in corpus order.
    pub hanja_seqs: Vec<String>,
    /// Units the word trains through, fixed at construction.
    pub units: UnitSet,
}

impl VocabEntry {
    /// The entry as an annotated token.
    pub fn token(&self) -> AnnotatedToken {
        AnnotatedToken {
            surface: self.surface.clone(),
            hanja_seqs: self.hanja_seqs.clone(),
        }
    }
}

/// Corpus vocabulary with dense ids.
///
/// Entries are sorted by descending count with lexicographic tie-breaks,
/// so ids are deterministic for a given corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    entries: Vec<VocabEntry>,
    index: HashMap<String, u32>,
    total_tokens: u64,
    hanja_inventory: Vec<String>,
}

struct IndexView<'a> {
    index: &'a HashMap<String, u32>,
    len: u64,
}

impl WordIndex for IndexView<'_> {
    fn word_id(&self, surface: &str) -> Option<u32> {
        self.index.get(surface).copied()
    }

    fn vocab_len(&self) -> u64 {
        self.len
    }
}

impl WordIndex for Vocab {
    fn word_id(&self, surface: &str) -> Option<u32> {
        self.index.get(surface).copied()
    }

    fn vocab_len(&self) -> u64 {
        self.entries.len() as u64
    }
}

impl Vocab {
    /// Counts a corpus and keeps every word seen at least `min_count`
    /// times. Returns the vocabulary together with the stream statistics
    /// of the counting pass.
    pub fn build(
        source: &CorpusSource,
        min_count: u32,
        config: &NGramConfig,
    ) -> Result<(Vocab, StreamStats), TrainError> {
        let mut stream = source.stream().map_err(TrainError::CorpusIo)?;
        let mut counts: HashMap<String, (u64, Vec<String>)> = HashMap::new();
        let mut total_tokens = 0u64;
        for item in stream.by_ref() {
            let (_, token) = item?;
            total_tokens += 1;
            let slot = counts.entry(token.surface).or_insert_with(|| (0, Vec::new()));
            slot.0 += 1;
            if slot.1.is_empty() && !token.hanja_seqs.is_empty() {
                slot.1 = token.hanja_seqs;
            }
        }
        let stats = stream.stats().clone();
        if total_tokens == 0 {
            return Err(TrainError::EmptyCorpus);
        }

        let mut raw: Vec<(String, u64, Vec<String>)> = counts
            .into_iter()
            .filter(|(_, (count, _))| *count >= u64::from(min_count))
            .map(|(surface, (count, seqs))| (surface, count, seqs))
            .collect();
        raw.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        Ok((Self::from_counted(raw, total_tokens, config), stats))
    }

    /// Assembles a vocabulary from already-ordered `(surface, count,
    /// hanja_seqs)` triples. Also used when loading a stored model, where
    /// the entry order is the stored order.
    pub(crate) fn from_counted(
        raw: Vec<(String, u64, Vec<String>)>,
        total_tokens: u64,
        config: &NGramConfig,
    ) -> Vocab {
        let mut index = HashMap::with_capacity(raw.len());
        for (id, (surface, _, _)) in raw.iter().enumerate() {
            index.insert(surface.clone(), id as u32);
        }
        let len = raw.len() as u64;
        let view = IndexView { index: &index, len };

        let mut hanja_inventory = BTreeSet::new();
        let entries: Vec<VocabEntry> = raw
            .into_iter()
            .map(|(surface, count, hanja_seqs)| {
                let token = AnnotatedToken {
                    surface,
                    hanja_seqs,
                };
                let units = units_for_word(&token, &view, config);
                if config.granularities.hanja() {
                    for gram in
                        hanja_ngrams(&token.hanja_seqs, config.hanja_min, config.hanja_max)
                    {
                        hanja_inventory.insert(gram);
                    }
                }
                VocabEntry {
                    surface: token.surface,
                    count,
                    hanja_seqs: token.hanja_seqs,
                    units,
                }
            })
            .collect();

        Vocab {
            entries,
            index,
            total_tokens,
            hanja_inventory: hanja_inventory.into_iter().collect(),
        }
    }

    /// Number of words.
    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    /// True if no word survived the count threshold.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries in id order.
    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    /// Entry for a dense id.
    pub fn entry(&self, id: u32) -> &VocabEntry {
        &self.entries[id as usize]
    }

    /// Dense id of a surface form.
    pub fn id_of(&self, surface: &str) -> Option<u32> {
        self.index.get(surface).copied()
    }

    /// Tokens counted over the whole corpus, including occurrences of
    /// words later dropped by the count threshold.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Relative corpus frequency of a word.
    pub fn frequency(&self, id: u32) -> f64 {
        self.entries[id as usize].count as f64 / self.total_tokens as f64
    }

    /// Distinct Hanja n-grams across all kept entries, sorted; the
    /// transfer initializer scans exactly this inventory.
    pub fn hanja_ngram_inventory(&self) -> &[String] {
        &self.hanja_inventory
    }
}
