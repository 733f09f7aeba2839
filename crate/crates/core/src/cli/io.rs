//! CSV matrices and label vectors, and atomic file writes.
//!
//! Matrices are one row per line, comma separated, no header unless asked
//! for. Values are written with 17 significant digits so a write/read
//! round trip is exact.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{LrrError, Result};
use crate::linalg::{ensure_finite, Matrix};

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn reader(header: bool, source: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn parse_err(path: &Path, line: Option<u64>, what: impl std::fmt::Display) -> LrrError {
    match line {
        Some(l) => LrrError::Parse(format!("{}:{l}: {what}", path.display())),
        None => LrrError::Parse(format!("{}: {what}", path.display())),
    }
}

/// Parses a dense matrix from CSV text.
pub fn parse_matrix(text: &str, header: bool, origin: &Path) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader(header, text.as_bytes()).records() {
        let record = record.map_err(|e| parse_err(origin, None, e))?;
        let line = record.position().map(|p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(origin, line, format!("`{f}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    origin,
                    line,
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(parse_err(origin, None, "no data"));
    }
    let m = Array2::from_shape_vec((rows.len(), cols), rows.into_iter().flatten().collect())
        .expect("rows have equal length");
    ensure_finite(&m)?;
    Ok(m)
}

pub fn read_matrix(path: &Path, header: bool) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text, header, path)
}

/// CSV text of a matrix; the optional header names the columns `c0, c1, ...`.
pub fn format_matrix(m: &Matrix, header: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if header {
        w.write_record((0..m.ncols()).map(|j| format!("c{j}")))
            .expect("in-memory write");
    }
    for row in m.rows() {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn write_matrix(path: &Path, m: &Matrix, header: bool) -> Result<()> {
    write_atomic(path, format_matrix(m, header).as_bytes())
}

/// Reads integer labels, one per line or all on one line. `-1` marks an
/// outlier.
pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for record in reader(false, text.as_bytes()).records() {
        let record = record.map_err(|e| parse_err(path, None, e))?;
        let line = record.position().map(|p| p.line());
        for f in record.iter().filter(|f| !f.is_empty()) {
            let v = f
                .parse::<i64>()
                .map_err(|_| parse_err(path, line, format!("`{f}` is not an integer label")))?;
            if v < -1 {
                return Err(parse_err(path, line, format!("label {v} is below -1")));
            }
            labels.push(v);
        }
    }
    Ok(labels)
}

pub fn format_labels<T: std::fmt::Display>(labels: &[T]) -> String {
    labels.iter().map(|l| format!("{l}\n")).collect()
}

/// Writes a small table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    write_atomic(path, &w.into_inner().expect("in-memory flush"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn round_trip_is_exact() {
        let m = array![[0.1, -1.0 / 3.0, 1e-300], [f64::MAX, 2.0f64.sqrt(), -0.0]];
        for header in [false, true] {
            let text = format_matrix(&m, header);
            let back = parse_matrix(&text, header, Path::new("m.csv")).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = Path::new("bad.csv");
        assert!(matches!(parse_matrix("1,2\n3\n", false, p), Err(LrrError::Parse(_))));
        assert!(matches!(parse_matrix("1,x\n", false, p), Err(LrrError::Parse(_))));
        assert!(matches!(parse_matrix("", false, p), Err(LrrError::Parse(_))));
        assert!(matches!(parse_matrix("1,inf\n", false, p), Err(LrrError::NonFinite { .. })));
    }

    #[test]
    fn tolerates_spaces_and_blank_lines() {
        let m = parse_matrix(" 1, 2 \n\n3,4\n", false, Path::new("m.csv")).unwrap();
        assert_eq!(m, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn atomic_write_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        write_atomic(&path, format_labels(&[0, 1, -1]).as_bytes()).unwrap();
        assert_eq!(read_labels(&path).unwrap(), vec![0, 1, -1]);
        write_atomic(&path, b"2,2,0\n").unwrap();
        assert_eq!(read_labels(&path).unwrap(), vec![2, 2, 0]);
        write_atomic(&path, b"-2\n").unwrap();
        assert!(read_labels(&path).is_err());
    }
}
