//! Line-oriented corpus streaming.
//!
//! A corpus is UTF-8 text with one sentence per line and tokens separated
//! by ASCII spaces. Streams can be opened over a byte range so that
//! training workers can partition a corpus without coordination: a range
//! owns exactly the lines whose first byte falls inside it, and a line is
//! always consumed to its end even when it crosses the range boundary.
//! Ownership is resolved by reading from one byte before the range start
//! and discarding everything up to the first newline; when the range
//! happens to start at a line beginning, that discards just the preceding
//! newline and the line is kept.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Cursor, Seek, SeekFrom};
use std::path::PathBuf;
use std::sync::Arc;

use crate::text_units::token::{parse_annotated_token, AnnotatedToken};
use crate::text_units::TextUnitError;

/// Where a corpus lives. `Memory` exists so tests and examples can stream
/// without touching disk; both variants support byte-range partitioning.
#[derive(Debug, Clone)]
pub enum CorpusSource {
    /// A corpus file on disk.
    File(PathBuf),
    /// An in-memory corpus.
    Memory(Arc<str>),
}

impl CorpusSource {
    /// Corpus source for a file path.
    pub fn file(path: impl Into<PathBuf>) -> Self {
        CorpusSource::File(path.into())
    }

    /// Corpus source over in-memory text.
    pub fn memory(text: impl Into<String>) -> Self {
        CorpusSource::Memory(Arc::from(text.into().into_boxed_str()))
    }

    /// Total corpus length in bytes.
    pub fn byte_len(&self) -> io::Result<u64> {
        match self {
            CorpusSource::File(path) => Ok(std::fs::metadata(path)?.len()),
            CorpusSource::Memory(text) => Ok(text.len() as u64),
        }
    }

    /// Opens a token stream over the whole corpus.
    pub fn stream(&self) -> io::Result<TokenStream> {
        let len = self.byte_len()?;
        self.stream_range(0, len)
    }

    /// Opens a token stream over the byte range `start..end`. The stream
    /// yields the lines whose first byte lies in the range, each consumed
    /// to its end.
    pub fn stream_range(&self, start: u64, end: u64) -> io::Result<TokenStream> {
        // Reading begins one byte early so that a range starting exactly
        // at a line beginning still owns that line: the discarded prefix
        // is then just the previous line's newline.
        let seek_to = start.saturating_sub(1);
        let reader: Box<dyn BufRead + Send> = match self {
            CorpusSource::File(path) => {
                let mut file = File::open(path)?;
                file.seek(SeekFrom::Start(seek_to))?;
                Box::new(BufReader::with_capacity(64 * 1024, file))
            }
            CorpusSource::Memory(text) => {
                let mut cursor = Cursor::new(ArcStrBytes(text.clone()));
                cursor.seek(SeekFrom::Start(seek_to))?;
                Box::new(BufReader::new(cursor))
            }
        };
        Ok(TokenStream::new(reader, seek_to, start == 0, end))
    }
}

/// `AsRef<[u8]>` view of a shared string so a `Cursor` can seek in it.
struct ArcStrBytes(Arc<str>);

impl AsRef<[u8]> for ArcStrBytes {
    fn as_ref(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

/// Counters accumulated while streaming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamStats {
    /// Sentences (lines) read.
    pub sentences: u64,
    /// Tokens successfully parsed and yielded.
    pub tokens: u64,
    /// Malformed tokens skipped.
    pub malformed_skipped: u64,
    /// First malformed token, as (sentence index, byte offset in token,
    /// description), kept for reporting.
    pub first_malformed: Option<(u64, usize, String)>,
}

impl StreamStats {
    /// Merges counters from another stream (used when workers each stream
    /// a partition).
    pub fn merge(&mut self, other: &StreamStats) {
        self.sentences += other.sentences;
        self.tokens += other.tokens;
        self.malformed_skipped += other.malformed_skipped;
        if self.first_malformed.is_none() {
            self.first_malformed = other.first_malformed.clone();
        }
    }
}

/// Iterator over `(sentence_index, token)` pairs of a corpus range.
///
/// Malformed tokens are counted in [`StreamStats`] and skipped; I/O and
/// UTF-8 failures terminate the stream with an error item.
pub struct TokenStream {
    reader: Box<dyn BufRead + Send>,
    /// Bytes consumed so far, as an absolute corpus offset.
    position: u64,
    /// Absolute end of the range; a line starting at or past this offset
    /// is not consumed.
    end: u64,
    sentence_index: u64,
    /// Tokens of the current line, already split out.
    pending: std::vec::IntoIter<(u64, AnnotatedToken)>,
    stats: StreamStats,
    skipped_partial_line: bool,
    done: bool,
}

impl TokenStream {
    fn new(reader: Box<dyn BufRead + Send>, position: u64, at_line_start: bool, end: u64) -> Self {
        TokenStream {
            reader,
            position,
            end,
            sentence_index: 0,
            pending: Vec::new().into_iter(),
            stats: StreamStats::default(),
            // Offset 0 always starts a line; any later position sits one
            // byte before the range and reads up to a newline first.
            skipped_partial_line: at_line_start,
            done: false,
        }
    }

    /// Counters for everything streamed so far.
    pub fn stats(&self) -> &StreamStats {
        &self.stats
    }

    fn read_line(&mut self) -> Result<Option<String>, TextUnitError> {
        let mut buf = Vec::new();
        loop {
            if self.position >= self.end {
                return Ok(None);
            }
            buf.clear();
            let n = self.reader.read_until(b'\n', &mut buf)?;
            if n == 0 {
                return Ok(None);
            }
            self.position += n as u64;
            if !self.skipped_partial_line {
                self.skipped_partial_line = true;
                continue;
            }
            if buf.last() == Some(&b'\n') {
                buf.pop();
                if buf.last() == Some(&b'\r') {
                    buf.pop();
                }
            }
            let line = String::from_utf8(std::mem::take(&mut buf))
                .map_err(|e| TextUnitError::InvalidUtf8 {
                    sentence: self.sentence_index,
                    source: e.utf8_error(),
                })?;
            return Ok(Some(line));
        }
    }

    fn fill_pending(&mut self) -> Result<bool, TextUnitError> {
        let Some(line) = self.read_line()? else {
            return Ok(false);
        };
        let sentence = self.sentence_index;
        self.sentence_index += 1;
        self.stats.sentences += 1;
        let mut tokens = Vec::new();
        for raw in line.split(' ').filter(|t| !t.is_empty()) {
            match parse_annotated_token(raw) {
                Ok(token) => {
                    self.stats.tokens += 1;
                    tokens.push((sentence, token));
                }
                Err(err) => {
                    self.stats.malformed_skipped += 1;
                    if self.stats.first_malformed.is_none() {
                        let position = match &err {
                            TextUnitError::MalformedAnnotation { position, .. } => *position,
                            _ => 0,
                        };
                        self.stats.first_malformed =
                            Some((sentence, position, err.to_string()));
                    }
                }
            }
        }
        self.pending = tokens.into_iter();
        Ok(true)
    }
}

impl Iterator for TokenStream {
    type Item = Result<(u64, AnnotatedToken), TextUnitError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if let Some(item) = self.pending.next() {
                return Some(Ok(item));
            }
            match self.fill_pending() {
                Ok(true) => continue,
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Err(err) => {
                    self.done = true;
                    return Some(Err(err));
                }
            }
        }
    }
}

/// Streams every token of a corpus with its sentence index.
pub fn stream_tokens(source: &CorpusSource) -> io::Result<TokenStream> {
    source.stream()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn collect(source: &CorpusSource) -> (Vec<(u64, String)>, StreamStats) {
        let mut stream = source.stream().unwrap();
        let mut items = Vec::new();
        for item in stream.by_ref() {
            let (sentence, token) = item.unwrap();
            items.push((sentence, token.serialize()));
        }
        (items, stream.stats().clone())
    }

    #[test]
    fn yields_tokens_with_sentence_indices() {
        let source = CorpusSource::memory("가 나\n다");
        let (items, stats) = collect(&source);
        assert_eq!(
            items,
            vec![(0, "가".to_string()), (0, "나".to_string()), (1, "다".to_string())]
        );
        assert_eq!(stats.sentences, 2);
        assert_eq!(stats.tokens, 3);
        assert_eq!(stats.malformed_skipped, 0);
    }

    #[test]
    fn skips_malformed_tokens_and_counts_them() {
        let source = CorpusSource::memory("가 |社 나\n사회형|社會,型 큰|");
        let (items, stats) = collect(&source);
        assert_eq!(
            items,
            vec![
                (0, "가".to_string()),
                (0, "나".to_string()),
                (1, "사회형|社會,型".to_string())
            ]
        );
        assert_eq!(stats.malformed_skipped, 2);
        let (sentence, _, _) = stats.first_malformed.clone().unwrap();
        assert_eq!(sentence, 0);
    }

    #[test]
    fn handles_repeated_spaces_and_blank_lines() {
        let source = CorpusSource::memory("가  나\n\n다 ");
        let (items, stats) = collect(&source);
        assert_eq!(items.len(), 3);
        assert_eq!(items[2].0, 2);
        assert_eq!(stats.sentences, 3);
    }

    #[test]
    fn invalid_utf8_terminates_with_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        std::fs::write(&path, b"\xba\xad\n\xff\xfe\n").unwrap();
        let stream = CorpusSource::file(&path).stream().unwrap();
        let results: Vec<_> = stream.collect();
        assert_eq!(results.len(), 1);
        assert!(matches!(results[0], Err(TextUnitError::InvalidUtf8 { .. })));
    }

    #[test]
    fn byte_ranges_partition_without_loss_or_overlap() {
        let text =
            "가 나 다\n라 마\n바 사 아 자\n차\n카 타 파 하\n".repeat(40);
        let source = CorpusSource::memory(text.clone());
        let len = source.byte_len().unwrap();
        let full: Vec<String> = source
            .stream()
            .unwrap()
            .map(|r| r.unwrap().1.surface)
            .collect();
        for parts in [2, 3, 7] {
            let mut combined = Vec::new();
            for i in 0..parts {
                let start = len * i / parts;
                let end = len * (i + 1) / parts;
                let stream = source.stream_range(start, end).unwrap();
                combined.extend(stream.map(|r| r.unwrap().1.surface));
            }
            assert_eq!(combined, full, "partition into {parts} ranges");
        }
    }

    proptest! {
        #[test]
        fn token_count_matches_whitespace_split(
            lines in proptest::collection::vec(
                proptest::collection::vec("[가-힣a-z0-9]{1,4}", 0..6),
                1..8,
            )
        ) {
            let text = lines
                .iter()
                .map(|l| l.join(" "))
                .collect::<Vec<_>>()
                .join("\n");
            let expected: u64 = text
                .lines()
                .map(|l| l.split_whitespace().count() as u64)
                .sum();
            let mut stream = CorpusSource::memory(text.clone()).stream().unwrap();
            let mut seen = 0u64;
            for item in stream.by_ref() {
                item.unwrap();
                seen += 1;
            }
            prop_assert_eq!(seen, expected);
            prop_assert_eq!(stream.stats().tokens, expected);
        }
    }
}
