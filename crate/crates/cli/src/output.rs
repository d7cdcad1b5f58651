//! Number formatting and the CSV dialect.
//!
//! CSV: comma-separated, `.` decimal point, LF line endings, mandatory
//! header row, comment and footer lines prefixed with `#`. Numeric fields
//! carry 17 significant digits unless the output section lowers the
//! precision, so emitted files reparse to bit-identical doubles.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// `x` with `sig` significant digits in scientific notation.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    format!("{:.*e}", sig.saturating_sub(1), x)
}

/// Destination for a report: a file path or standard output.
pub enum Sink {
    File(BufWriter<File>),
    Stdout(io::Stdout),
}

impl Sink {
    pub fn file(path: &Path) -> Result<Self, CliError> {
        Ok(Sink::File(BufWriter::new(File::create(path)?)))
    }

    pub fn stdout() -> Self {
        Sink::Stdout(io::stdout())
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::File(w) => w.write(buf),
            Sink::Stdout(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::File(w) => w.flush(),
            Sink::Stdout(w) => w.flush(),
        }
    }
}

/// A parsed CSV: comment lines and the data table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    /// Row-major cells; empty cells parse as None.
    pub rows: Vec<Vec<Option<f64>>>,
    /// Raw (unparsed) cells, for non-numeric columns such as verdicts.
    pub raw_rows: Vec<Vec<String>>,
}

/// Parses the dialect written by this crate; used by the round-trip tests
/// and by anything downstream that wants the numbers back.
pub fn parse_csv(text: &str) -> Result<CsvTable, CliError> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut raw_rows = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment.trim().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        match &header {
            None => header = Some(cells),
            Some(h) => {
                if cells.len() != h.len() {
                    return Err(CliError::Numerical(format!(
                        "csv row has {} cells, header has {}",
                        cells.len(),
                        h.len()
                    )));
                }
                rows.push(
                    cells
                        .iter()
                        .map(|c| if c.is_empty() { None } else { c.parse().ok() })
                        .collect(),
                );
                raw_rows.push(cells);
            }
        }
    }
    let header = header.ok_or_else(|| CliError::Numerical("csv has no header row".into()))?;
    Ok(CsvTable {
        comments,
        header,
        rows,
        raw_rows,
    })
}

/// Optional `# generated = <seconds since epoch>` header line.
pub fn timestamp_line(enabled: bool) -> Option<String> {
    if !enabled {
        return None;
    }
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Some(format!("# generated = {secs}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting_round_trips() {
        for &x in &[
            std::f64::consts::PI,
            -758.380350314616,
            0.02,
            1.0 / 3.0,
            6.02e23,
            -1.6e-19,
        ] {
            let s = fmt_sig(x, 17);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
        assert_eq!(fmt_sig(0.02, 3), "2.00e-2");
    }

    #[test]
    fn csv_parse_handles_comments_and_gaps() {
        let table = parse_csv("# note\n a,b \n1.5,\n2.0,3.0\n# footer\n").unwrap();
        assert_eq!(table.comments, vec!["note", "footer"]);
        assert_eq!(table.header, vec!["a", "b"]);
        assert_eq!(table.rows[0], vec![Some(1.5), None]);
        assert_eq!(table.rows[1], vec![Some(2.0), Some(3.0)]);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(parse_csv("a,b\n1.0\n").is_err());
        assert!(parse_csv("").is_err());
    }
}
