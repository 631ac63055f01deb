use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use super::{Cell, CellStats, ComparisonReport, HarnessError};
use crate::models::ModelKind;
use crate::optimizers::Algorithm;

pub const CSV_HEADER: [&str; 5] = ["dataset", "model", "algorithm", "statistic", "value"];

/// Statistic names of the CSV form, in emission order.
pub const STATISTICS: [&str; 8] = [
    "fit_median",
    "fit_min",
    "fit_mean",
    "test_median",
    "time_ms_median",
    "iters_median",
    "best_a",
    "best_b",
];

const TITLE: &str = "SRGM comparison report";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format '{s}', expected text, csv or markdown")),
        }
    }
}

/// Writes the report. Text and Markdown render one table per dataset with
/// models as rows and, per algorithm, the median training fitness, median
/// test fitness (when any run has a test window), median wall time and
/// median iteration of the best.
pub fn emit_report<W: Write>(report: &ComparisonReport, format: ReportFormat, out: W) -> Result<(), HarnessError> {
    match format {
        ReportFormat::Csv => emit_csv(report, out),
        ReportFormat::Text => emit_table(report, false, out),
        ReportFormat::Markdown => emit_table(report, true, out),
    }
}

fn emit_csv<W: Write>(report: &ComparisonReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for cell in &report.cells {
        for stat in STATISTICS {
            if let Some(v) = cell.stats.get(stat) {
                // Display prints the shortest string that parses back to v
                w.write_record([
                    cell.dataset.as_str(),
                    cell.model.name(),
                    cell.algorithm.name(),
                    stat,
                    &v.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a report written in CSV form. Per-run records are not part of the
/// format, so cells come back with empty `runs`.
pub fn parse_csv_report<R: Read>(source: R) -> Result<ComparisonReport, HarnessError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::ParseReport {
            line: 1,
            message: format!("expected header '{}'", CSV_HEADER.join(",")),
        });
    }
    let mut cells: Vec<Cell> = Vec::new();
    let mut index: BTreeMap<(String, ModelKind, Algorithm), usize> = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let bad = |message: String| HarnessError::ParseReport { line, message };
        if rec.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", rec.len())));
        }
        let model: ModelKind = rec[1].parse().map_err(|e| bad(format!("{e}")))?;
        let algorithm: Algorithm = rec[2].parse().map_err(|e| bad(format!("{e}")))?;
        let value: f64 = rec[4].parse().map_err(|_| bad(format!("'{}' is not a number", &rec[4])))?;
        let key = (rec[0].to_string(), model, algorithm);
        let at = *index.entry(key).or_insert_with(|| {
            cells.push(Cell {
                dataset: rec[0].to_string(),
                model,
                algorithm,
                runs: Vec::new(),
                stats: CellStats::default(),
            });
            cells.len() - 1
        });
        let slot = cells[at]
            .stats
            .slot(&rec[3])
            .ok_or_else(|| bad(format!("unknown statistic '{}'", &rec[3])))?;
        if slot.replace(value).is_some() {
            return Err(bad(format!("statistic '{}' repeated for this cell", &rec[3])));
        }
    }
    Ok(ComparisonReport { cells })
}

fn fmt_value(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "-".into(),
    }
}

fn emit_table<W: Write>(report: &ComparisonReport, markdown: bool, mut out: W) -> Result<(), HarnessError> {
    if markdown {
        writeln!(out, "# {TITLE}")?;
    } else {
        writeln!(out, "{TITLE}")?;
    }
    for dataset in report.datasets() {
        let cells: Vec<&Cell> = report.cells.iter().filter(|c| c.dataset == dataset).collect();
        let mut models: Vec<ModelKind> = Vec::new();
        let mut algs: Vec<Algorithm> = Vec::new();
        for c in &cells {
            if !models.contains(&c.model) {
                models.push(c.model);
            }
            if !algs.contains(&c.algorithm) {
                algs.push(c.algorithm);
            }
        }
        let with_test = cells.iter().any(|c| c.stats.test_median.is_some());

        let mut header = vec!["Model".to_string()];
        for a in &algs {
            let n = a.name().to_uppercase();
            header.push(format!("{n} fit"));
            if with_test {
                header.push(format!("{n} test"));
            }
            header.push(format!("{n} T(ms)"));
            header.push(format!("{n} I"));
        }
        let mut rows = Vec::new();
        for m in &models {
            let mut row = vec![m.label().to_string()];
            for a in &algs {
                let s = cells
                    .iter()
                    .find(|c| c.model == *m && c.algorithm == *a)
                    .map(|c| c.stats.clone())
                    .unwrap_or_default();
                row.push(fmt_value(s.fit_median, 4));
                if with_test {
                    row.push(fmt_value(s.test_median, 4));
                }
                row.push(fmt_value(s.time_ms_median, 3));
                row.push(fmt_value(s.iters_median, 0));
            }
            rows.push(row);
        }

        writeln!(out)?;
        if markdown {
            writeln!(out, "## {dataset}")?;
            writeln!(out)?;
            writeln!(out, "| {} |", header.join(" | "))?;
            let rule: Vec<String> = header
                .iter()
                .enumerate()
                .map(|(i, _)| if i == 0 { ":--".to_string() } else { "--:".to_string() })
                .collect();
            writeln!(out, "| {} |", rule.join(" | "))?;
            for row in &rows {
                writeln!(out, "| {} |", row.join(" | "))?;
            }
        } else {
            writeln!(out, "Dataset: {dataset}")?;
            let widths: Vec<usize> = (0..header.len())
                .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cols: &[String]| {
                cols.iter()
                    .enumerate()
                    .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&header))?;
            writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)))?;
            for row in &rows {
                writeln!(out, "{}", line(row))?;
            }
        }
        for c in &cells {
            for (seed, err) in c.failures() {
                writeln!(out)?;
                writeln!(out, "failed run: {} / {} seed {seed}: {err}", c.model.label(), c.algorithm.name())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(dataset: &str, model: ModelKind, algorithm: Algorithm, fit: f64) -> Cell {
        Cell {
            dataset: dataset.into(),
            model,
            algorithm,
            runs: Vec::new(),
            stats: CellStats {
                fit_median: Some(fit),
                fit_min: Some(fit / 3.0),
                fit_mean: Some(fit * 1.1),
                test_median: None,
                time_ms_median: Some(0.25),
                iters_median: Some(41.0),
                best_a: Some(0.1 + 0.2),
                best_b: Some(1e-7 / 3.0),
            },
        }
    }

    fn render(r: &ComparisonReport, f: ReportFormat) -> String {
        let mut buf = Vec::new();
        emit_report(r, f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = ComparisonReport::default();
        assert_eq!(render(&r, ReportFormat::Csv), "dataset,model,algorithm,statistic,value\n");
        assert_eq!(render(&r, ReportFormat::Text).lines().count(), 1);
        assert_eq!(render(&r, ReportFormat::Markdown).lines().count(), 1);
    }

    #[test]
    fn one_cell_csv_has_one_row_per_statistic() {
        let r = ComparisonReport { cells: vec![cell("d", ModelKind::Power, Algorithm::Aco, 2.0)] };
        let csv = render(&r, ReportFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 7);
        assert!(lines[1..].iter().all(|l| l.starts_with("d,pow,aco,")));
    }

    #[test]
    fn csv_round_trips_exactly() {
        let mut c = cell("Project, 2", ModelKind::MusaOkumoto, Algorithm::Cuckoo, 41.797123456789);
        c.stats.test_median = Some(f64::MIN_POSITIVE);
        let r = ComparisonReport {
            cells: vec![c, cell("x", ModelKind::GoExponential, Algorithm::Firefly, 1e-300)],
        };
        let back = parse_csv_report(render(&r, ReportFormat::Csv).as_bytes()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn tables_put_models_in_rows() {
        let r = ComparisonReport {
            cells: ModelKind::ALL
                .iter()
                .flat_map(|&m| [Algorithm::Cuckoo, Algorithm::Aco].map(|a| cell("Project2", m, a, 1.5)))
                .collect(),
        };
        let text = render(&r, ReportFormat::Text);
        let labels: Vec<&str> = text.lines().skip(5).map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(labels, ["EXP(G-O)", "POW", "DSS", "M-O"]);
        let md = render(&r, ReportFormat::Markdown);
        assert!(md.contains("| Model | CS fit | CS T(ms) | CS I | ACO fit | ACO T(ms) | ACO I |"));
        assert!(md.contains("| M-O | 1.5000 | 0.250 | 41 | 1.5000 | 0.250 | 41 |"));
    }

    #[test]
    fn malformed_reports_are_rejected() {
        assert!(parse_csv_report("a,b\n".as_bytes()).is_err());
        let bad = "dataset,model,algorithm,statistic,value\nd,go,cs,fit_median,abc\n";
        assert!(matches!(parse_csv_report(bad.as_bytes()), Err(HarnessError::ParseReport { line: 2, .. })));
        let unknown = "dataset,model,algorithm,statistic,value\nd,go,cs,speed,1\n";
        assert!(parse_csv_report(unknown.as_bytes()).is_err());
    }
}
