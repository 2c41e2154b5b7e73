//! Model serialization.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic   6 bytes  "HSISG" 0x01
//! header  u32 version (currently 1)
//!         u32 dim
//!         u64 vocab_len
//!         u64 bucket_size
//!         u32 char_min, char_max, jamo_min, jamo_max, hanja_min, hanja_max
//!         u8  granularity bitmask (bit 0 char, bit 1 jamo, bit 2 hanja)
//!         f64 lr, f64 subsample_t
//!         u32 epochs, u32 negatives, u32 window
//!         u64 seed
//! vocab   vocab_len entries: u32 byte length, UTF-8 token (the surface,
//!         with its `|`-annotation when the word carries one), u64 count
//! input   (vocab_len + bucket_size) * dim f32, row-major
//! output  vocab_len * dim f32, row-major
//! crc     u32 CRC32 (IEEE) of every preceding byte
//! ```
//!
//! Entries store the annotated token form so a loaded model rebuilds the
//! exact unit sets it trained with. The reserved marker codepoints baked
//! into unit strings (and therefore into the hash space of any stored
//! model) are U+E000 (empty jongseong), U+E001/U+E002 (word boundaries),
//! and U+E003/U+E004 (Hanja sequence boundaries).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::ngrams::{Granularities, NGramConfig};
use crate::text_units::parse_annotated_token;
use crate::trainer::model::{DenseMatrix, EmbeddingModel, VectorStore};
use crate::trainer::vocab::Vocab;
use crate::trainer::TrainConfig;

/// File signature, version byte included.
pub const MAGIC: [u8; 6] = *b"HSISG\x01";
/// Current header version.
pub const FORMAT_VERSION: u32 = 1;
/// Sanity cap on a stored token's byte length.
const MAX_TOKEN_BYTES: u32 = 1 << 16;

/// Errors reading or writing model files.
#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    /// Underlying I/O failure.
    #[error("model I/O error")]
    Io(#[from] io::Error),

    /// The file does not start with the model signature.
    #[error("not a model file (bad magic)")]
    BadMagic,

    /// The header version is newer than this build understands.
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),

    /// The file ends before the declared payload does.
    #[error("model file is truncated")]
    Truncated,

    /// Stored and recomputed checksums disagree.
    #[error("model checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch {
        /// Checksum read from the file.
        stored: u32,
        /// Checksum of the bytes actually read.
        computed: u32,
    },

    /// A structurally impossible value in the payload.
    #[error("corrupt model file: {0}")]
    Corrupt(String),

    /// Bytes remain after the checksum.
    #[error("trailing bytes after model payload")]
    TrailingData,
}

fn eof_as_truncated(err: io::Error) -> PersistError {
    if err.kind() == io::ErrorKind::UnexpectedEof {
        PersistError::Truncated
    } else {
        PersistError::Io(err)
    }
}

struct CrcWriter<W: Write> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> CrcWriter<W> {
    fn new(inner: W) -> Self {
        CrcWriter {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }

    fn finish(self) -> (W, u32) {
        (self.inner, self.hasher.finalize())
    }
}

impl<W: Write> Write for CrcWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let written = self.inner.write(buf)?;
        self.hasher.update(&buf[..written]);
        Ok(written)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

struct CrcReader<R: Read> {
    inner: R,
    hasher: crc32fast::Hasher,
    consumed: u64,
}

impl<R: Read> CrcReader<R> {
    fn new(inner: R) -> Self {
        CrcReader {
            inner,
            hasher: crc32fast::Hasher::new(),
            consumed: 0,
        }
    }

    fn read_exact(&mut self, buf: &mut [u8]) -> Result<(), PersistError> {
        self.inner.read_exact(buf).map_err(eof_as_truncated)?;
        self.hasher.update(buf);
        self.consumed += buf.len() as u64;
        Ok(())
    }

    fn read_u8(&mut self) -> Result<u8, PersistError> {
        let mut buf = [0u8; 1];
        self.read_exact(&mut buf)?;
        Ok(buf[0])
    }

    fn read_u32(&mut self) -> Result<u32, PersistError> {
        let mut buf = [0u8; 4];
        self.read_exact(&mut buf)?;
        Ok(u32::from_le_bytes(buf))
    }

    fn read_u64(&mut self) -> Result<u64, PersistError> {
        let mut buf = [0u8; 8];
        self.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }

    fn read_f64(&mut self) -> Result<f64, PersistError> {
        let mut buf = [0u8; 8];
        self.read_exact(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    }

    fn digest(&self) -> u32 {
        self.hasher.clone().finalize()
    }
}

fn write_u32<W: Write>(w: &mut W, value: u32) -> io::Result<()> {
    w.write_all(&value.to_le_bytes())
}

fn write_u64<W: Write>(w: &mut W, value: u64) -> io::Result<()> {
    w.write_all(&value.to_le_bytes())
}

fn write_f64<W: Write>(w: &mut W, value: f64) -> io::Result<()> {
    w.write_all(&value.to_le_bytes())
}

/// Writes a file through a sibling temp file and an atomic rename, so a
/// crash mid-write never leaves a half-written artifact at `path`.
pub(crate) fn atomic_write<F>(path: &Path, write: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp_path = path.with_file_name(tmp_name);
    let result = (|| {
        let mut writer = BufWriter::new(File::create(&tmp_path)?);
        write(&mut writer)?;
        writer.flush()?;
        writer.get_ref().sync_all()?;
        Ok(())
    })();
    match result {
        Ok(()) => std::fs::rename(&tmp_path, path),
        Err(err) => {
            let _ = std::fs::remove_file(&tmp_path);
            Err(err)
        }
    }
}

fn write_header<W: Write>(w: &mut W, model: &EmbeddingModel) -> io::Result<()> {
    let config = model.config();
    let ngram = &config.ngram;
    w.write_all(&MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u32(w, config.dim)?;
    write_u64(w, u64::from(model.vocab().len()))?;
    write_u64(w, ngram.bucket_size)?;
    for value in [
        ngram.char_min,
        ngram.char_max,
        ngram.jamo_min,
        ngram.jamo_max,
        ngram.hanja_min,
        ngram.hanja_max,
    ] {
        write_u32(w, value)?;
    }
    w.write_all(&[ngram.granularities.bits()])?;
    write_f64(w, config.lr)?;
    write_f64(w, config.subsample_t)?;
    write_u32(w, config.epochs)?;
    write_u32(w, config.negatives)?;
    write_u32(w, config.window)?;
    write_u64(w, config.seed)
}

fn write_matrix<W: Write>(w: &mut W, matrix: &DenseMatrix<f32>) -> io::Result<()> {
    let mut buf = Vec::with_capacity(16 * 1024);
    for chunk in matrix.as_slice().chunks(4 * 1024) {
        buf.clear();
        for &value in chunk {
            buf.extend_from_slice(&value.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

/// Saves a model. The write is atomic: the bytes land in a temp file that
/// is renamed over `path` only after a successful flush.
pub fn save_model(model: &EmbeddingModel, path: &Path) -> Result<(), PersistError> {
    atomic_write(path, |file| {
        let mut w = CrcWriter::new(file);
        write_header(&mut w, model)?;
        for entry in model.vocab().entries() {
            let token = entry.token().serialize();
            write_u32(&mut w, token.len() as u32)?;
            w.write_all(token.as_bytes())?;
            write_u64(&mut w, entry.count)?;
        }
        write_matrix(&mut w, model.input())?;
        write_matrix(&mut w, model.output())?;
        let (file, crc) = w.finish();
        write_u32(file, crc)
    })
    .map_err(PersistError::Io)
}

struct Header {
    dim: u32,
    vocab_len: u64,
    ngram: NGramConfig,
    lr: f64,
    subsample_t: f64,
    epochs: u32,
    negatives: u32,
    window: u32,
    seed: u64,
}

fn read_header<R: Read>(r: &mut CrcReader<R>) -> Result<Header, PersistError> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(PersistError::BadMagic);
    }
    let version = r.read_u32()?;
    if version != FORMAT_VERSION {
        return Err(PersistError::UnsupportedVersion(version));
    }
    let dim = r.read_u32()?;
    let vocab_len = r.read_u64()?;
    let bucket_size = r.read_u64()?;
    let char_min = r.read_u32()?;
    let char_max = r.read_u32()?;
    let jamo_min = r.read_u32()?;
    let jamo_max = r.read_u32()?;
    let hanja_min = r.read_u32()?;
    let hanja_max = r.read_u32()?;
    let bits = r.read_u8()?;
    let granularities = Granularities::from_bits(bits)
        .ok_or_else(|| PersistError::Corrupt(format!("granularity bitmask {bits:#04x}")))?;
    let lr = r.read_f64()?;
    let subsample_t = r.read_f64()?;
    let epochs = r.read_u32()?;
    let negatives = r.read_u32()?;
    let window = r.read_u32()?;
    let seed = r.read_u64()?;
    Ok(Header {
        dim,
        vocab_len,
        ngram: NGramConfig {
            char_min,
            char_max,
            jamo_min,
            jamo_max,
            hanja_min,
            hanja_max,
            bucket_size,
            granularities,
        },
        lr,
        subsample_t,
        epochs,
        negatives,
        window,
        seed,
    })
}

fn read_vocab_block<R: Read>(
    r: &mut CrcReader<R>,
    header: &Header,
) -> Result<Vec<(String, u64, Vec<String>)>, PersistError> {
    let mut raw = Vec::with_capacity(header.vocab_len.min(1 << 20) as usize);
    for i in 0..header.vocab_len {
        let len = r.read_u32()?;
        if len == 0 || len > MAX_TOKEN_BYTES {
            return Err(PersistError::Corrupt(format!(
                "vocab entry {i} has byte length {len}"
            )));
        }
        let mut bytes = vec![0u8; len as usize];
        r.read_exact(&mut bytes)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| PersistError::Corrupt(format!("vocab entry {i} is not UTF-8")))?;
        let token = parse_annotated_token(&text)
            .map_err(|e| PersistError::Corrupt(format!("vocab entry {i}: {e}")))?;
        let count = r.read_u64()?;
        raw.push((token.surface, count, token.hanja_seqs));
    }
    Ok(raw)
}

fn read_matrix<R: Read>(
    r: &mut CrcReader<R>,
    rows: usize,
    dim: usize,
) -> Result<DenseMatrix<f32>, PersistError> {
    let total = rows * dim;
    let mut data = Vec::with_capacity(total);
    let mut buf = vec![0u8; 16 * 1024];
    let mut remaining = total * 4;
    while remaining > 0 {
        let take = remaining.min(buf.len());
        r.read_exact(&mut buf[..take])?;
        for chunk in buf[..take].chunks_exact(4) {
            data.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]));
        }
        remaining -= take;
    }
    Ok(DenseMatrix::from_vec(rows, dim, data))
}

/// Loads a model saved by [`save_model`], verifying the trailing
/// checksum. Unit sets are rebuilt from the stored annotated tokens, so
/// the loaded model composes exactly the vectors the saved one did.
pub fn load_model(path: &Path) -> Result<EmbeddingModel, PersistError> {
    let file = File::open(path)?;
    let file_len = file.metadata()?.len();
    let mut r = CrcReader::new(BufReader::with_capacity(256 * 1024, file));

    let header = read_header(&mut r)?;
    if header.dim == 0 {
        return Err(PersistError::Corrupt("zero dimension".to_string()));
    }
    let raw = read_vocab_block(&mut r, &header)?;

    // With the variable-length vocab consumed, the rest of the file has a
    // known exact size; check it before allocating matrix buffers.
    let rows = header
        .vocab_len
        .checked_add(header.ngram.bucket_size)
        .ok_or_else(|| PersistError::Corrupt("row count overflow".to_string()))?;
    let matrix_bytes = (rows + header.vocab_len) * u64::from(header.dim) * 4;
    let expected = r.consumed + matrix_bytes + 4;
    if file_len < expected {
        return Err(PersistError::Truncated);
    }
    if file_len > expected {
        return Err(PersistError::TrailingData);
    }

    let dim = header.dim as usize;
    let input = read_matrix(&mut r, rows as usize, dim)?;
    let output = read_matrix(&mut r, header.vocab_len as usize, dim)?;

    let computed = r.digest();
    let mut crc_buf = [0u8; 4];
    r.inner.read_exact(&mut crc_buf).map_err(eof_as_truncated)?;
    let stored = u32::from_le_bytes(crc_buf);
    if stored != computed {
        return Err(PersistError::ChecksumMismatch { stored, computed });
    }

    let total_tokens: u64 = raw.iter().map(|(_, count, _)| *count).sum();
    let vocab = Vocab::from_counted(raw, total_tokens.max(1), &header.ngram);
    let config = TrainConfig {
        dim: header.dim,
        epochs: header.epochs,
        lr: header.lr,
        negatives: header.negatives,
        window: header.window,
        subsample_t: header.subsample_t,
        min_count: 1,
        ngram: header.ngram,
        threads: 1,
        seed: header.seed,
    };
    Ok(EmbeddingModel::from_parts(input, output, vocab, config))
}

/// Header and vocabulary statistics of a stored model, read without
/// touching the matrices.
#[derive(Debug, Clone)]
pub struct ModelSummary {
    /// Header version.
    pub version: u32,
    /// Vector width.
    pub dim: u32,
    /// Vocabulary size.
    pub vocab_len: u64,
    /// Hashed slot count.
    pub bucket_size: u64,
    /// N-gram configuration.
    pub ngram: NGramConfig,
    /// Initial learning rate.
    pub lr: f64,
    /// Subsampling threshold.
    pub subsample_t: f64,
    /// Training epochs.
    pub epochs: u32,
    /// Negative samples per pair.
    pub negatives: u32,
    /// Maximum context window.
    pub window: u32,
    /// Training seed.
    pub seed: u64,
    /// Sum of stored word counts.
    pub total_count: u64,
    /// Entries carrying a Hanja annotation.
    pub annotated_entries: u64,
    /// Actual file size in bytes.
    pub file_len: u64,
    /// Size the header implies; a mismatch means truncation or junk.
    pub expected_len: u64,
}

/// Reads header and vocabulary only; cost is independent of the matrix
/// payload. The checksum is not verified (that would require reading
/// everything).
pub fn read_model_summary(path: &Path) -> Result<ModelSummary, PersistError> {
    let file = File::open(path)?;
    let file_len = file.metadata()?.len();
    let mut r = CrcReader::new(BufReader::with_capacity(64 * 1024, file));
    let header = read_header(&mut r)?;
    let raw = read_vocab_block(&mut r, &header)?;
    let total_count = raw.iter().map(|(_, count, _)| *count).sum();
    let annotated_entries = raw.iter().filter(|(_, _, seqs)| !seqs.is_empty()).count() as u64;
    let rows = header
        .vocab_len
        .checked_add(header.ngram.bucket_size)
        .ok_or_else(|| PersistError::Corrupt("row count overflow".to_string()))?;
    let expected_len = r.consumed + (rows + header.vocab_len) * u64::from(header.dim) * 4 + 4;
    Ok(ModelSummary {
        version: FORMAT_VERSION,
        dim: header.dim,
        vocab_len: header.vocab_len,
        bucket_size: header.ngram.bucket_size,
        ngram: header.ngram,
        lr: header.lr,
        subsample_t: header.subsample_t,
        epochs: header.epochs,
        negatives: header.negatives,
        window: header.window,
        seed: header.seed,
        total_count,
        annotated_entries,
        file_len,
        expected_len,
    })
}

/// Formats a float with six significant digits, in the style of C's
/// `%.6g`: fixed notation for moderate magnitudes, scientific otherwise,
/// trailing zeros trimmed.
pub(crate) fn format_g6(x: f32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.5e}", f64::from(x).abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: Vec<u8> = mantissa
        .bytes()
        .filter(|b| b.is_ascii_digit())
        .collect();
    debug_assert_eq!(digits.len(), 6);
    let sign = if x < 0.0 { "-" } else { "" };

    if !(-4..6).contains(&exp) {
        let mantissa = trim_fixed(mantissa.to_string());
        return format!("{sign}{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let body = if exp >= 0 {
        let int_len = (exp + 1) as usize;
        let int: String = digits[..int_len].iter().map(|&b| b as char).collect();
        let frac: String = digits[int_len..].iter().map(|&b| b as char).collect();
        trim_fixed(format!("{int}.{frac}"))
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let all: String = digits.iter().map(|&b| b as char).collect();
        trim_fixed(format!("0.{zeros}{all}"))
    };
    format!("{sign}{body}")
}

fn trim_fixed(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes the model as word2vec-style text: a `vocab_len dim` header line,
/// then one line per word with six-significant-digit coordinates.
///
/// With `composed` set, each word's line carries its composed vector (the
/// sum over its units, the representation evaluation uses); otherwise the
/// raw whole-word input row is written.
pub fn export_vec(model: &EmbeddingModel, path: &Path, composed: bool) -> Result<(), PersistError> {
    atomic_write(path, |w| {
        writeln!(w, "{} {}", model.vocab().len(), model.dim())?;
        for (id, entry) in model.vocab().entries().iter().enumerate() {
            w.write_all(entry.surface.as_bytes())?;
            if composed {
                let vector = model.word_vector_for(&entry.token());
                for value in vector.values {
                    write!(w, " {}", format_g6(value))?;
                }
            } else {
                for &value in model.input().row(id) {
                    write!(w, " {}", format_g6(value))?;
                }
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    })
    .map_err(PersistError::Io)
}
