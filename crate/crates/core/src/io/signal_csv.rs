//! CSV import of 3-D signals.

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::qvec::QVector;
use std::io::BufRead;
use std::path::Path;

/// Reads a signal from a CSV file with `t, r, g, b` columns (header row
/// optional, `#`/empty lines ignored). Rows are sorted by `t`; the channel
/// values become the imaginary components of a pure quaternion signal.
pub fn read_signal_csv(path: &Path) -> Result<QVector> {
    let file = std::fs::File::open(path)?;
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(|f| f.trim()).collect();
        if fields.len() != 4 {
            return Err(Error::Format(format!(
                "line {}: expected `t, r, g, b`, got {trimmed:?}",
                lineno + 1
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push((v[0], v[1], v[2], v[3])),
            Err(_) if rows.is_empty() => continue, // header row
            Err(e) => {
                return Err(Error::Format(format!("line {}: {e}", lineno + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Format("no data rows in signal CSV".into()));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(QVector::from_fn(rows.len(), |i| {
        Quaternion::pure(rows[i].1, rows[i].2, rows[i].3)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_with_header_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "t, r, g, b").unwrap();
        writeln!(f, "1, 0.4, 0.5, 0.6").unwrap();
        writeln!(f, "0, 0.1, 0.2, 0.3").unwrap();
        writeln!(f, "# trailing comment").unwrap();
        drop(f);
        let v = read_signal_csv(&path).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.get(0), Quaternion::pure(0.1, 0.2, 0.3));
        assert_eq!(v.get(1), Quaternion::pure(0.4, 0.5, 0.6));
    }

    #[test]
    fn malformed_row_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "0, 0.1, 0.2, 0.3\n1, oops, 0.2, 0.3\n").unwrap();
        assert!(matches!(read_signal_csv(&path), Err(Error::Format(_))));
    }
}
