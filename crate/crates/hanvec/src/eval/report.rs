//! Evaluation reports: human-readable tables via `Display` and a flat
//! machine-readable `metric TAB value` form with deterministically sorted
//! keys. Counts print as integers; scores print with 12 decimal places.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

/// Mean analogy distance and item count for one category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryMean {
    /// Mean distance over the category's scored items; lower is better.
    pub mean: f64,
    /// Items that contributed to the mean.
    pub scored: u64,
}

/// Results of a word-analogy run.
///
/// `overall_mean` is the unweighted mean over all scored items. The
/// semantic and syntactic means average the per-category means of their
/// fixed category sets, so every category weighs equally regardless of
/// its item count. A mean is `None` when no item of its scope could be
/// scored. Skipped items (a word with no units, or a zero vector) are
/// counted, never silently dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalogyReport {
    pub per_category: BTreeMap<String, CategoryMean>,
    pub semantic_mean: Option<f64>,
    pub syntactic_mean: Option<f64>,
    pub overall_mean: Option<f64>,
    pub scored: u64,
    pub skipped: u64,
}

/// Results of a word-similarity run over the scorable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub pearson: f64,
    pub spearman: f64,
    /// Pairs that contributed to both correlations.
    pub pairs: u64,
    /// Pairs dropped for unit-less words or zero vectors.
    pub skipped: u64,
}

fn fmt_mean(mean: Option<f64>) -> String {
    match mean {
        Some(m) => format!("{m:.6}"),
        None => "n/a".to_string(),
    }
}

impl AnalogyReport {
    /// Machine-readable `(key, value)` lines in sorted key order.
    /// Undefined means are omitted rather than printed as placeholders.
    pub fn machine_lines(&self) -> Vec<(String, String)> {
        let mut lines = Vec::new();
        for (category, score) in &self.per_category {
            lines.push((
                format!("analogy.category.{category}.mean"),
                format!("{:.12}", score.mean),
            ));
            lines.push((
                format!("analogy.category.{category}.scored"),
                score.scored.to_string(),
            ));
        }
        if let Some(m) = self.overall_mean {
            lines.push(("analogy.mean.all".to_string(), format!("{m:.12}")));
        }
        if let Some(m) = self.semantic_mean {
            lines.push(("analogy.mean.semantic".to_string(), format!("{m:.12}")));
        }
        if let Some(m) = self.syntactic_mean {
            lines.push(("analogy.mean.syntactic".to_string(), format!("{m:.12}")));
        }
        lines.push(("analogy.scored".to_string(), self.scored.to_string()));
        lines.push(("analogy.skipped".to_string(), self.skipped.to_string()));
        lines.sort();
        lines
    }

    /// Writes the machine-readable form, one `key TAB value` line each.
    pub fn write_machine<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for (key, value) in self.machine_lines() {
            writeln!(writer, "{key}\t{value}")?;
        }
        Ok(())
    }
}

impl fmt::Display for AnalogyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "analogy evaluation (mean cosine distance, lower is better)")?;
        writeln!(f, "  {:<12} {:>8} {:>12}", "category", "scored", "mean")?;
        for (category, score) in &self.per_category {
            writeln!(
                f,
                "  {:<12} {:>8} {:>12.6}",
                category, score.scored, score.mean
            )?;
        }
        writeln!(
            f,
            "  {:<12} {:>8} {:>12}",
            "semantic",
            "",
            fmt_mean(self.semantic_mean)
        )?;
        writeln!(
            f,
            "  {:<12} {:>8} {:>12}",
            "syntactic",
            "",
            fmt_mean(self.syntactic_mean)
        )?;
        writeln!(
            f,
            "  {:<12} {:>8} {:>12}",
            "all",
            self.scored,
            fmt_mean(self.overall_mean)
        )?;
        write!(f, "  skipped items: {}", self.skipped)
    }
}

impl SimilarityReport {
    /// Machine-readable `(key, value)` lines in sorted key order.
    pub fn machine_lines(&self) -> Vec<(String, String)> {
        vec![
            ("similarity.pairs".to_string(), self.pairs.to_string()),
            ("similarity.pearson".to_string(), format!("{:.12}", self.pearson)),
            ("similarity.skipped".to_string(), self.skipped.to_string()),
            ("similarity.spearman".to_string(), format!("{:.12}", self.spearman)),
        ]
    }

    /// Writes the machine-readable form, one `key TAB value` line each.
    pub fn write_machine<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for (key, value) in self.machine_lines() {
            writeln!(writer, "{key}\t{value}")?;
        }
        Ok(())
    }
}

impl fmt::Display for SimilarityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "similarity evaluation")?;
        writeln!(f, "  scored pairs  {:>8}", self.pairs)?;
        writeln!(f, "  skipped pairs {:>8}", self.skipped)?;
        writeln!(f, "  pearson r     {:>12.6}", self.pearson)?;
        write!(f, "  spearman rho  {:>12.6}", self.spearman)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_analogy() -> AnalogyReport {
        let mut per_category = BTreeMap::new();
        per_category.insert(
            "City".to_string(),
            CategoryMean {
                mean: 0.25,
                scored: 2,
            },
        );
        per_category.insert(
            "Tense".to_string(),
            CategoryMean {
                mean: 0.5,
                scored: 1,
            },
        );
        AnalogyReport {
            per_category,
            semantic_mean: Some(0.25),
            syntactic_mean: Some(0.5),
            overall_mean: Some(1.0 / 3.0),
            scored: 3,
            skipped: 1,
        }
    }

    #[test]
    fn machine_lines_are_sorted_and_tab_free() {
        let report = sample_analogy();
        let lines = report.machine_lines();
        let keys: Vec<&String> = lines.iter().map(|(k, _)| k).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(lines
            .iter()
            .all(|(k, v)| !k.contains('\t') && !v.contains('\t')));

        let mut buffer = Vec::new();
        report.write_machine(&mut buffer).expect("in-memory write");
        let text = String::from_utf8(buffer).expect("utf-8");
        assert!(text.contains("analogy.mean.all\t0.333333333333\n"));
        assert!(text.contains("analogy.category.City.scored\t2\n"));
        assert!(text.contains("analogy.skipped\t1\n"));
    }

    #[test]
    fn undefined_means_are_omitted_from_machine_output() {
        let report = AnalogyReport {
            skipped: 4,
            ..AnalogyReport::default()
        };
        let lines = report.machine_lines();
        assert!(lines.iter().all(|(k, _)| !k.starts_with("analogy.mean")));
        assert!(lines.contains(&("analogy.skipped".to_string(), "4".to_string())));
    }

    #[test]
    fn display_renders_every_category_and_the_skip_count() {
        let text = sample_analogy().to_string();
        assert!(text.contains("City"));
        assert!(text.contains("Tense"));
        assert!(text.contains("skipped items: 1"));

        let sim = SimilarityReport {
            pearson: 0.5,
            spearman: 0.25,
            pairs: 7,
            skipped: 2,
        };
        let text = sim.to_string();
        assert!(text.contains("0.500000"));
        assert!(text.contains("7"));
        let machine = sim.machine_lines();
        assert_eq!(machine[1].0, "similarity.pearson");
        assert_eq!(machine[1].1, "0.500000000000");
    }
}
