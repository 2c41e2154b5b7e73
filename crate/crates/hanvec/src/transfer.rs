//! Seeding Hanja n-gram slots from pretrained Chinese embeddings.
//!
//! Korean Hanja are traditional-form CJK ideographs, while large pretrained
//! Chinese embedding sets are keyed by simplified forms. This module loads
//! such a lexicon from the common `.vec` text format, converts each Hanja
//! n-gram observed in the corpus to its simplified spelling through a
//! character mapping table, and copies matching vectors into the model's
//! hashed bucket rows before training begins. Slots that never match keep
//! their random initialization, so transfer is a strict refinement of the
//! usual setup.
//!
//! The scan runs over the distinct Hanja n-grams collected during vocabulary
//! construction, sorted lexicographically. Boundary markers are stripped for
//! the lookup only; the bucket slot is derived from the original marked
//! n-gram, exactly as the trainer will hash it. When two n-grams land in the
//! same slot the first write wins and the collision is counted, keeping the
//! procedure deterministic and idempotent.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::ngrams::unit_slot;
use crate::text_units::{is_cjk_ideograph, BOH_SYMBOL, EOH_SYMBOL};
use crate::trainer::EmbeddingModel;

/// Errors from lexicon loading, mapping loading, and slot initialization.
#[derive(Debug, Error)]
pub enum TransferError {
    /// Underlying file read failed.
    #[error("transfer i/o error")]
    Io(#[from] std::io::Error),
    /// The first line of a `.vec` file was not `<count> <dim>`.
    #[error("malformed lexicon header: {0:?}")]
    MalformedHeader(String),
    /// The header promised more entries than the file contains.
    #[error("truncated lexicon: header promised {expected} entries, found {found}")]
    TruncatedLexicon { expected: usize, found: usize },
    /// The file contains non-empty lines after the promised entries.
    #[error("trailing data after entry {expected} in lexicon (line {line})")]
    TrailingData { expected: usize, line: usize },
    /// An entry line did not have exactly one token plus `dim` coordinates.
    #[error("lexicon line {line}: expected {expected} fields, found {found}")]
    TokenCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    /// A coordinate failed to parse as a finite number.
    #[error("lexicon line {line}: non-numeric coordinate {token:?}")]
    NonNumeric { line: usize, token: String },
    /// A mapping line was not two tab-separated single CJK characters.
    #[error("mapping line {line}: {reason}")]
    MalformedMapping { line: usize, reason: String },
    /// The lexicon dimensionality does not equal the model dimensionality.
    #[error("dimension mismatch: lexicon has {lexicon}, model has {model}")]
    DimMismatch { lexicon: usize, model: usize },
}

/// A pretrained embedding table loaded from `.vec` text format.
///
/// Keys are the surface strings of the source vocabulary, typically
/// simplified Chinese words and characters. All vectors share one
/// dimensionality and contain only finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct PretrainedLexicon {
    dim: usize,
    vectors: BTreeMap<String, Vec<f32>>,
    duplicate_keys: u64,
}

impl PretrainedLexicon {
    /// Builds a lexicon directly from entries, validating lengths and
    /// finiteness. Duplicate keys keep the last occurrence and are counted.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<Self, TransferError>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        let mut vectors = BTreeMap::new();
        let mut duplicate_keys = 0;
        for (line, (key, vector)) in entries.into_iter().enumerate() {
            let key = key.into();
            if vector.len() != dim {
                return Err(TransferError::TokenCountMismatch {
                    line: line + 1,
                    expected: dim + 1,
                    found: vector.len() + 1,
                });
            }
            if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
                return Err(TransferError::NonNumeric {
                    line: line + 1,
                    token: bad.to_string(),
                });
            }
            if vectors.insert(key, vector).is_some() {
                duplicate_keys += 1;
            }
        }
        Ok(Self {
            dim,
            vectors,
            duplicate_keys,
        })
    }

    /// Vector dimensionality shared by every entry.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct keys.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// True when the lexicon holds no entries.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Looks up one key.
    pub fn get(&self, key: &str) -> Option<&[f32]> {
        self.vectors.get(key).map(Vec::as_slice)
    }

    /// How many duplicate keys were overwritten during loading (last-wins).
    pub fn duplicate_keys(&self) -> u64 {
        self.duplicate_keys
    }

    /// Iterates entries in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.vectors
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// A character-level traditional-to-simplified conversion table.
///
/// Unmapped characters pass through unchanged, so an empty mapping is the
/// identity conversion. Identity entries are permitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CharMapping {
    table: HashMap<char, char>,
}

impl CharMapping {
    /// An empty mapping; conversion through it is the identity.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a mapping from pairs; later pairs overwrite earlier ones.
    pub fn from_pairs<I: IntoIterator<Item = (char, char)>>(pairs: I) -> Self {
        Self {
            table: pairs.into_iter().collect(),
        }
    }

    /// Looks up the simplified form of one character, if mapped.
    pub fn get(&self, c: char) -> Option<char> {
        self.table.get(&c).copied()
    }

    /// Number of mapped characters.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    /// True when no characters are mapped.
    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Result summary of one `init_hanja_slots` run.
///
/// `ngrams_matched + ngrams_missed` equals the number of distinct Hanja
/// n-grams scanned, and `slots_initialized + collisions_detected` equals
/// `ngrams_matched`. `matched_by_len` breaks the matches down by n-gram
/// length in symbols, boundary markers included, so multi-character
/// lexicon hits can be told apart from single-character ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferReport {
    /// Distinct bucket rows that received a pretrained vector.
    pub slots_initialized: u64,
    /// Distinct n-grams whose converted form was a lexicon key.
    pub ngrams_matched: u64,
    /// Distinct n-grams with no lexicon entry after conversion.
    pub ngrams_missed: u64,
    /// Matched n-grams whose slot had already been written this run.
    pub collisions_detected: u64,
    /// Whether the lexicon and model dimensionalities agreed. Always true
    /// on a returned report; a mismatch is an error instead.
    pub dim_check: bool,
    /// Matched n-gram counts keyed by symbol length, markers included.
    pub matched_by_len: BTreeMap<usize, u64>,
}

/// Loads a pretrained lexicon from `.vec` text format.
///
/// The first line is `<count> <dim>`; each following line is one surface
/// token and `dim` coordinates, all space-separated. Duplicate keys keep
/// the last occurrence and increment the lexicon's duplicate counter.
/// Blank lines are permitted only after the final entry.
pub fn load_pretrained<P: AsRef<Path>>(path: P) -> Result<PretrainedLexicon, TransferError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| TransferError::MalformedHeader(String::new()))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    let parse_field = |field: Option<&str>| {
        field
            .and_then(|f| f.parse::<usize>().ok())
            .ok_or_else(|| TransferError::MalformedHeader(header.clone()))
    };
    let count = parse_field(fields.next())?;
    let dim = parse_field(fields.next())?;
    if fields.next().is_some() || dim == 0 {
        return Err(TransferError::MalformedHeader(header.clone()));
    }

    let mut vectors = BTreeMap::new();
    let mut duplicate_keys = 0;
    let mut loaded = 0;
    for (idx, line) in &mut lines {
        let line = line?;
        let line_no = idx + 1;
        if loaded == count {
            if line.trim().is_empty() {
                continue;
            }
            return Err(TransferError::TrailingData {
                expected: count,
                line: line_no,
            });
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(TransferError::TokenCountMismatch {
                line: line_no,
                expected: dim + 1,
                found: fields.len(),
            });
        }
        let mut vector = Vec::with_capacity(dim);
        for token in &fields[1..] {
            let value: f32 = token.parse().map_err(|_| TransferError::NonNumeric {
                line: line_no,
                token: (*token).to_string(),
            })?;
            if !value.is_finite() {
                return Err(TransferError::NonNumeric {
                    line: line_no,
                    token: (*token).to_string(),
                });
            }
            vector.push(value);
        }
        if vectors.insert(fields[0].to_string(), vector).is_some() {
            duplicate_keys += 1;
        }
        loaded += 1;
    }
    if loaded < count {
        return Err(TransferError::TruncatedLexicon {
            expected: count,
            found: loaded,
        });
    }

    Ok(PretrainedLexicon {
        dim,
        vectors,
        duplicate_keys,
    })
}

/// Loads a character mapping from a UTF-8 TSV file.
///
/// Each data line is exactly two tab-separated fields of one CJK ideograph
/// each. Lines starting with `#` and blank lines are ignored. Later entries
/// for the same source character overwrite earlier ones.
pub fn load_char_mapping<P: AsRef<Path>>(path: P) -> Result<CharMapping, TransferError> {
    let reader = BufReader::new(File::open(path)?);
    let mut table = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 2 {
            return Err(TransferError::MalformedMapping {
                line: line_no,
                reason: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        let mut pair = Vec::with_capacity(2);
        for field in &fields {
            let mut chars = field.chars();
            let (first, rest) = (chars.next(), chars.next());
            match (first, rest) {
                (Some(c), None) if is_cjk_ideograph(c) => pair.push(c),
                (Some(_), None) => {
                    return Err(TransferError::MalformedMapping {
                        line: line_no,
                        reason: format!("field {field:?} is not a CJK ideograph"),
                    });
                }
                _ => {
                    return Err(TransferError::MalformedMapping {
                        line: line_no,
                        reason: format!("field {field:?} is not a single character"),
                    });
                }
            }
        }
        table.insert(pair[0], pair[1]);
    }
    Ok(CharMapping { table })
}

/// Converts a string character-wise through the mapping.
///
/// Unmapped characters are copied unchanged, so the output always has the
/// same number of characters as the input.
pub fn to_simplified(s: &str, mapping: &CharMapping) -> String {
    s.chars().map(|c| mapping.get(c).unwrap_or(c)).collect()
}

/// Copies pretrained vectors into the bucket slots of matching Hanja
/// n-grams.
///
/// The distinct n-grams are scanned in lexicographic order. For each, the
/// boundary markers are stripped, the remainder is converted through the
/// mapping, and the result is looked up in the lexicon. On a hit the
/// lexicon vector is copied verbatim into the input matrix row addressed by
/// hashing the original marked n-gram; a slot already written this run
/// keeps its first value and the collision is counted. Rows outside the
/// written set, including every vocabulary row and the whole output
/// matrix, are untouched.
///
/// Dimensionalities are checked before any mutation; on mismatch the model
/// is returned unchanged behind a `DimMismatch` error. An empty n-gram
/// list yields a report with all-zero counts.
pub fn init_hanja_slots(
    model: &mut EmbeddingModel,
    lexicon: &PretrainedLexicon,
    mapping: &CharMapping,
    corpus_hanja_ngrams: &[String],
) -> Result<TransferReport, TransferError> {
    if lexicon.dim() != model.dim() {
        return Err(TransferError::DimMismatch {
            lexicon: lexicon.dim(),
            model: model.dim(),
        });
    }

    let vocab_len = u64::from(model.vocab().len());
    let bucket_size = model.config().ngram.bucket_size;

    let mut scan: Vec<&String> = corpus_hanja_ngrams.iter().collect();
    scan.sort_unstable();
    scan.dedup();

    let mut report = TransferReport {
        dim_check: true,
        ..TransferReport::default()
    };
    let mut written: HashSet<u64> = HashSet::new();

    for ngram in scan {
        let stripped: String = ngram
            .chars()
            .filter(|&c| c != BOH_SYMBOL && c != EOH_SYMBOL)
            .collect();
        let key = to_simplified(&stripped, mapping);
        let Some(vector) = lexicon.get(&key) else {
            report.ngrams_missed += 1;
            continue;
        };
        report.ngrams_matched += 1;
        *report
            .matched_by_len
            .entry(ngram.chars().count())
            .or_insert(0) += 1;
        let slot = unit_slot(ngram, vocab_len, bucket_size).0;
        if !written.insert(slot) {
            report.collisions_detected += 1;
            continue;
        }
        model.input_row_mut(slot).copy_from_slice(vector);
        report.slots_initialized += 1;
    }

    Ok(report)
}
