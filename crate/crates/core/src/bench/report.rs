//! Aggregates over evaluation results, as CSV.

use std::collections::BTreeMap;
use std::path::Path;

use super::{BenchError, EvalResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub converter: String,
    pub entries: usize,
    pub successes: usize,
    /// Over successful conversions.
    pub mean_presentation: Option<f64>,
    /// Over conversions that produced content markup.
    pub mean_content: Option<f64>,
    pub content_scored: usize,
    pub total_wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Sorted by converter name.
    pub rows: Vec<ReportRow>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn report(results: &[EvalResult]) -> Result<Report, BenchError> {
    if results.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    let mut by: BTreeMap<&str, Vec<&EvalResult>> = BTreeMap::new();
    for r in results {
        by.entry(&r.converter).or_default().push(r);
    }
    let rows = by
        .into_iter()
        .map(|(name, rs)| {
            let pres: Vec<f64> = rs.iter().filter_map(|r| r.presentation_distance.value()).collect();
            let content: Vec<f64> = rs.iter().filter_map(|r| r.content_distance.value()).collect();
            ReportRow {
                converter: name.to_string(),
                entries: rs.len(),
                successes: rs.iter().filter(|r| r.success).count(),
                mean_presentation: mean(&pres),
                mean_content: mean(&content),
                content_scored: content.len(),
                total_wall_time: rs.iter().map(|r| r.wall_time).sum(),
            }
        })
        .collect();
    Ok(Report { rows })
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

impl Report {
    /// Distances and success counts; contains no timings and is therefore
    /// reproducible byte for byte.
    pub fn summary_csv(&self) -> Result<String, BenchError> {
        csv_string(
            &["converter", "entries", "successes", "mean_presentation_distance", "mean_content_distance", "content_scored"],
            self.rows.iter().map(|r| {
                vec![
                    r.converter.clone(),
                    r.entries.to_string(),
                    r.successes.to_string(),
                    num(r.mean_presentation),
                    num(r.mean_content),
                    r.content_scored.to_string(),
                ]
            }),
        )
    }

    pub fn timing_csv(&self) -> Result<String, BenchError> {
        csv_string(
            &["converter", "total_wall_time_s", "mean_wall_time_s"],
            self.rows.iter().map(|r| {
                vec![
                    r.converter.clone(),
                    format!("{:.6}", r.total_wall_time),
                    format!("{:.6}", r.total_wall_time / r.entries as f64),
                ]
            }),
        )
    }
}

/// One line per (converter, entry) for external plotting.
pub fn plot_csv(results: &[EvalResult]) -> Result<String, BenchError> {
    let mut sorted: Vec<&EvalResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.converter.cmp(&b.converter).then(a.entry_id.cmp(&b.entry_id)));
    csv_string(
        &["converter", "entry_id", "success", "presentation_distance", "content_distance"],
        sorted.into_iter().map(|r| {
            vec![
                r.converter.clone(),
                r.entry_id.to_string(),
                r.success.to_string(),
                num(r.presentation_distance.value()),
                num(r.content_distance.value()),
            ]
        }),
    )
}

/// Writes `summary.csv`, `timing.csv` and `plot.csv` into `dir`.
pub fn write_report(results: &[EvalResult], dir: impl AsRef<Path>) -> Result<Report, BenchError> {
    let dir = dir.as_ref();
    let rep = report(results)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.csv"), rep.summary_csv()?)?;
    std::fs::write(dir.join("timing.csv"), rep.timing_csv()?)?;
    std::fs::write(dir.join("plot.csv"), plot_csv(results)?)?;
    Ok(rep)
}

pub fn write_results(results: &[EvalResult]) -> Result<String, BenchError> {
    let mut out = String::new();
    for r in results {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_results(src: &str) -> Result<Vec<EvalResult>, BenchError> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| BenchError::Schema { line: i + 1, message: e.to_string() }))
        .collect()
}
