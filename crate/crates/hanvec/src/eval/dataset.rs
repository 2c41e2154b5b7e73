//! Evaluation dataset formats.
//!
//! Analogy files group items under category headers: a header line starts
//! with `:` followed by the category name, and each item line holds exactly
//! four space-separated surfaces. Similarity files hold one pair per line
//! as `w1 TAB w2 TAB score`. Blank lines are ignored in both formats, and
//! surfaces may carry Hanja annotations in the same `surface|seq1,seq2`
//! syntax the corpus uses, so out-of-vocabulary items can still contribute
//! Hanja n-grams.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::text_units::{parse_annotated_token, AnnotatedToken};

use super::EvalError;

/// One word-analogy question `a : b <-> c : d` under a category label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyItem {
    pub a: AnnotatedToken,
    pub b: AnnotatedToken,
    pub c: AnnotatedToken,
    pub d: AnnotatedToken,
    /// The section header the item appeared under.
    pub category: String,
}

/// One word-similarity pair with its human-annotated gold score.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityItem {
    pub w1: AnnotatedToken,
    pub w2: AnnotatedToken,
    pub gold: f64,
}

fn parse_surface(field: &str, line: usize) -> Result<AnnotatedToken, EvalError> {
    parse_annotated_token(field).map_err(|err| EvalError::Dataset {
        line,
        reason: format!("bad surface {field:?}: {err}"),
    })
}

/// Parses an analogy dataset from a reader. Line numbers are 1-based.
pub fn parse_analogy<R: BufRead>(reader: R) -> Result<Vec<AnalogyItem>, EvalError> {
    let mut items = Vec::new();
    let mut category: Option<String> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(':') {
            let name = rest.trim();
            if name.is_empty() {
                return Err(EvalError::Dataset {
                    line: line_no,
                    reason: "empty category name".to_string(),
                });
            }
            category = Some(name.to_string());
            continue;
        }
        let Some(category) = category.clone() else {
            return Err(EvalError::Dataset {
                line: line_no,
                reason: "item before any category header".to_string(),
            });
        };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(EvalError::Dataset {
                line: line_no,
                reason: format!("expected 4 surfaces, found {}", fields.len()),
            });
        }
        items.push(AnalogyItem {
            a: parse_surface(fields[0], line_no)?,
            b: parse_surface(fields[1], line_no)?,
            c: parse_surface(fields[2], line_no)?,
            d: parse_surface(fields[3], line_no)?,
            category,
        });
    }
    Ok(items)
}

/// Loads an analogy dataset from a file.
pub fn load_analogy<P: AsRef<Path>>(path: P) -> Result<Vec<AnalogyItem>, EvalError> {
    parse_analogy(BufReader::new(File::open(path)?))
}

/// Parses a similarity dataset from a reader. Line numbers are 1-based.
pub fn parse_similarity<R: BufRead>(reader: R) -> Result<Vec<SimilarityItem>, EvalError> {
    let mut items = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(EvalError::Dataset {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let gold: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| EvalError::Dataset {
                line: line_no,
                reason: format!("bad score {:?}", fields[2]),
            })?;
        if !gold.is_finite() {
            return Err(EvalError::Dataset {
                line: line_no,
                reason: format!("non-finite score {:?}", fields[2]),
            });
        }
        items.push(SimilarityItem {
            w1: parse_surface(fields[0].trim(), line_no)?,
            w2: parse_surface(fields[1].trim(), line_no)?,
            gold,
        });
    }
    Ok(items)
}

/// Loads a similarity dataset from a file.
pub fn load_similarity<P: AsRef<Path>>(path: P) -> Result<Vec<SimilarityItem>, EvalError> {
    parse_similarity(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn parses_headers_items_and_blank_lines() {
        let text = ": City\n\n서울 한국 도쿄 일본\n: Tense\n가다 갔다 오다 왔다\n";
        let items = parse_analogy(Cursor::new(text)).expect("valid dataset");
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].category, "City");
        assert_eq!(items[0].a.surface, "서울");
        assert_eq!(items[0].d.surface, "일본");
        assert_eq!(items[1].category, "Tense");
    }

    #[test]
    fn analogy_surfaces_may_carry_annotations() {
        let text = ": Misc\n학교|學校 평화 회사|會社 전쟁\n";
        let items = parse_analogy(Cursor::new(text)).expect("valid dataset");
        assert_eq!(items[0].a.surface, "학교");
        assert_eq!(items[0].a.hanja_seqs, vec!["學校".to_string()]);
        assert_eq!(items[0].c.hanja_seqs, vec!["會社".to_string()]);
    }

    #[test]
    fn item_before_any_header_is_an_error() {
        let err = parse_analogy(Cursor::new("서울 한국 도쿄 일본\n")).unwrap_err();
        match err {
            EvalError::Dataset { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("before any category header"));
            }
            other => panic!("expected Dataset error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_surface_count_is_an_error() {
        let err = parse_analogy(Cursor::new(": City\n서울 한국 도쿄\n")).unwrap_err();
        match err {
            EvalError::Dataset { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("expected 4 surfaces"));
            }
            other => panic!("expected Dataset error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_annotation_is_an_error_with_its_line() {
        let err = parse_analogy(Cursor::new(": City\n서울 한국 도쿄|x 일본\n")).unwrap_err();
        assert!(matches!(err, EvalError::Dataset { line: 2, .. }));
    }

    #[test]
    fn parses_similarity_pairs() {
        let text = "사과\t배\t7.5\n\n수도|首都\t도시|都市\t6\n";
        let items = parse_similarity(Cursor::new(text)).expect("valid dataset");
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].w1.surface, "사과");
        assert_eq!(items[0].gold, 7.5);
        assert_eq!(items[1].w2.hanja_seqs, vec!["都市".to_string()]);
    }

    #[test]
    fn similarity_field_count_and_score_errors_carry_lines() {
        let err = parse_similarity(Cursor::new("사과 배 7.5\n")).unwrap_err();
        assert!(matches!(err, EvalError::Dataset { line: 1, .. }));

        let err = parse_similarity(Cursor::new("사과\t배\tabc\n")).unwrap_err();
        match err {
            EvalError::Dataset { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("bad score"));
            }
            other => panic!("expected Dataset error, got {other:?}"),
        }

        let err = parse_similarity(Cursor::new("사과\t배\tinf\n")).unwrap_err();
        assert!(matches!(err, EvalError::Dataset { line: 1, .. }));
    }
}
