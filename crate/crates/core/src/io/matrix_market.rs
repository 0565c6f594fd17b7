//! Matrix Market readers for quaternion matrices.
//!
//! A quaternion matrix can be specified two ways:
//!
//! 1. **Part bundle** — up to four standard Matrix Market files holding the
//!    real part and the i/j/k coefficient matrices. Any part may be omitted
//!    (it defaults to zero; at least one must be present) and all parts must
//!    agree on the dimensions. Supported flavors: `matrix coordinate
//!    real|integer|pattern general|symmetric|skew-symmetric` and `matrix
//!    array real|integer general`. Pattern entries read as `1.0`.
//!
//! 2. **Extended single file** — one ASCII file with the header line
//!    `%%QuaternionMatrixMarket matrix coordinate quaternion general`.
//!    Comment lines start with `%`. The first data line is
//!    `rows cols nnz`; each of the following `nnz` lines is
//!    `row col a0 a1 a2 a3` (1-based indices, whitespace-separated, one
//!    entry per line). Vectors are `n x 1` matrices in the same format.
//!
//! Both readers accept an optional *order* parameter selecting the leading
//! `k x k` principal submatrix.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::qvec::QVector;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

/// Source description for [`read_qmatrix`].
#[derive(Clone, Debug)]
pub enum MatrixMarketBundle {
    /// Up to four standard Matrix Market files `[A0, A1, A2, A3]`.
    Parts([Option<PathBuf>; 4]),
    /// One extended quaternion Matrix Market file.
    Extended(PathBuf),
}

struct RealMmData {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, f64)>,
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Format(format!("bad {what}: {tok}")))
}

fn parse_f64(tok: &str, what: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::Format(format!("bad {what}: {tok}")))
}

fn read_real_mm(path: &Path) -> Result<RealMmData> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))??;
    let toks: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_lowercase())
        .collect();
    if toks.len() < 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(Error::Format(format!(
            "not a Matrix Market header: {header}"
        )));
    }
    let layout = toks[2].as_str();
    let field = toks[3].as_str();
    let symmetry = toks[4].as_str();
    if !matches!(field, "real" | "integer" | "pattern") {
        return Err(Error::Format(format!("unsupported value field: {field}")));
    }
    if !matches!(symmetry, "general" | "symmetric" | "skew-symmetric") {
        return Err(Error::Format(format!("unsupported symmetry: {symmetry}")));
    }

    let mut data_lines = lines.map(|l| l.map_err(Error::from)).filter(|l| match l {
        Ok(s) => {
            let t = s.trim();
            !t.is_empty() && !t.starts_with('%')
        }
        Err(_) => true,
    });
    let size_line = data_lines
        .next()
        .ok_or_else(|| Error::Format("missing size line".into()))??;
    let st: Vec<&str> = size_line.split_whitespace().collect();

    match layout {
        "coordinate" => {
            if st.len() != 3 {
                return Err(Error::Format(
                    "coordinate size line needs rows cols nnz".into(),
                ));
            }
            let rows = parse_usize(st[0], "rows")?;
            let cols = parse_usize(st[1], "cols")?;
            let nnz = parse_usize(st[2], "nnz")?;
            let mut triplets = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let line = data_lines
                    .next()
                    .ok_or_else(|| Error::Format("truncated coordinate data".into()))??;
                let t: Vec<&str> = line.split_whitespace().collect();
                let need = if field == "pattern" { 2 } else { 3 };
                if t.len() < need {
                    return Err(Error::Format(format!("short entry line: {line}")));
                }
                let i = parse_usize(t[0], "row index")?;
                let j = parse_usize(t[1], "col index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::Format(format!("index out of range: {line}")));
                }
                let v = if field == "pattern" {
                    1.0
                } else {
                    parse_f64(t[2], "value")?
                };
                triplets.push((i - 1, j - 1, v));
                match symmetry {
                    "symmetric" if i != j => triplets.push((j - 1, i - 1, v)),
                    "skew-symmetric" if i != j => triplets.push((j - 1, i - 1, -v)),
                    _ => {}
                }
            }
            Ok(RealMmData {
                rows,
                cols,
                triplets,
            })
        }
        "array" => {
            if st.len() != 2 {
                return Err(Error::Format("array size line needs rows cols".into()));
            }
            if symmetry != "general" {
                return Err(Error::Format(
                    "array format supports general symmetry only".into(),
                ));
            }
            let rows = parse_usize(st[0], "rows")?;
            let cols = parse_usize(st[1], "cols")?;
            let mut triplets = Vec::with_capacity(rows * cols);
            let mut count = 0usize;
            for line in data_lines {
                let line = line?;
                for tok in line.split_whitespace() {
                    let v = parse_f64(tok, "value")?;
                    let j = count / rows;
                    let i = count % rows;
                    if v != 0.0 {
                        triplets.push((i, j, v));
                    }
                    count += 1;
                }
            }
            if count != rows * cols {
                return Err(Error::Format(format!(
                    "array data holds {count} values, expected {}",
                    rows * cols
                )));
            }
            Ok(RealMmData {
                rows,
                cols,
                triplets,
            })
        }
        other => Err(Error::Format(format!("unsupported layout: {other}"))),
    }
}

const EXTENDED_HEADER: &str = "%%QuaternionMatrixMarket";

struct ExtendedData {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Quaternion)>,
}

fn read_extended(path: &Path) -> Result<ExtendedData> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))??;
    if !header.trim_start().starts_with(EXTENDED_HEADER) {
        return Err(Error::Format(format!(
            "missing {EXTENDED_HEADER} header, found: {header}"
        )));
    }
    let mut data_lines = lines.map(|l| l.map_err(Error::from)).filter(|l| match l {
        Ok(s) => {
            let t = s.trim();
            !t.is_empty() && !t.starts_with('%')
        }
        Err(_) => true,
    });
    let size_line = data_lines
        .next()
        .ok_or_else(|| Error::Format("missing size line".into()))??;
    let st: Vec<&str> = size_line.split_whitespace().collect();
    if st.len() != 3 {
        return Err(Error::Format("size line needs rows cols nnz".into()));
    }
    let rows = parse_usize(st[0], "rows")?;
    let cols = parse_usize(st[1], "cols")?;
    let nnz = parse_usize(st[2], "nnz")?;
    let mut entries = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let line = data_lines
            .next()
            .ok_or_else(|| Error::Format("truncated quaternion data".into()))??;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 6 {
            return Err(Error::Format(format!(
                "entry line needs `row col a0 a1 a2 a3`: {line}"
            )));
        }
        let i = parse_usize(t[0], "row index")?;
        let j = parse_usize(t[1], "col index")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Format(format!("index out of range: {line}")));
        }
        entries.push((
            i - 1,
            j - 1,
            Quaternion::new(
                parse_f64(t[2], "a0")?,
                parse_f64(t[3], "a1")?,
                parse_f64(t[4], "a2")?,
                parse_f64(t[5], "a3")?,
            ),
        ));
    }
    Ok(ExtendedData {
        rows,
        cols,
        entries,
    })
}

/// Reads a sparse quaternion matrix from a bundle; `order` selects the
/// leading `k x k` principal submatrix.
pub fn read_qmatrix(bundle: &MatrixMarketBundle, order: Option<usize>) -> Result<QMatrix> {
    let (rows, cols, entries) = match bundle {
        MatrixMarketBundle::Extended(path) => {
            let d = read_extended(path)?;
            (d.rows, d.cols, d.entries)
        }
        MatrixMarketBundle::Parts(paths) => {
            if paths.iter().all(|p| p.is_none()) {
                return Err(Error::Format("bundle holds no part files".into()));
            }
            let mut dims: Option<(usize, usize)> = None;
            let mut entries: Vec<(usize, usize, Quaternion)> = Vec::new();
            for (c, path) in paths.iter().enumerate() {
                let Some(path) = path else { continue };
                let d = read_real_mm(path)?;
                match dims {
                    None => dims = Some((d.rows, d.cols)),
                    Some((r, k)) if r != d.rows || k != d.cols => {
                        return Err(Error::Format(format!(
                            "part {c} is {}x{}, expected {r}x{k}",
                            d.rows, d.cols
                        )))
                    }
                    _ => {}
                }
                for (i, j, v) in d.triplets {
                    let mut q = Quaternion::ZERO;
                    match c {
                        0 => q.w = v,
                        1 => q.x = v,
                        2 => q.y = v,
                        _ => q.z = v,
                    }
                    entries.push((i, j, q));
                }
            }
            let (rows, cols) = dims.unwrap();
            (rows, cols, entries)
        }
    };
    match order {
        None => QMatrix::from_triplets(rows, cols, &entries),
        Some(k) => {
            if k > rows || k > cols {
                return Err(Error::InvalidParameter(format!(
                    "order {k} exceeds matrix size {rows}x{cols}"
                )));
            }
            let subset: Vec<_> = entries
                .into_iter()
                .filter(|&(i, j, _)| i < k && j < k)
                .collect();
            QMatrix::from_triplets(k, k, &subset)
        }
    }
}

/// Reads an `n x 1` extended quaternion Matrix Market file as a vector.
pub fn read_qvector(path: &Path) -> Result<QVector> {
    let d = read_extended(path)?;
    if d.cols != 1 {
        return Err(Error::Format(format!(
            "expected an n x 1 vector, found {}x{}",
            d.rows, d.cols
        )));
    }
    let mut v = QVector::zeros(d.rows);
    for (i, _, q) in d.entries {
        v.set(i, q);
    }
    Ok(v)
}

/// Writes a quaternion matrix in the extended single-file format (stored
/// entries only for sparse matrices; all entries for dense ones).
pub fn write_extended(a: &QMatrix, path: &Path) -> Result<()> {
    let mut entries = Vec::new();
    a.for_each_entry(|i, j, q| {
        if !q.is_zero() {
            entries.push((i, j, q));
        }
    });
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(
        out,
        "{EXTENDED_HEADER} matrix coordinate quaternion general"
    )?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), entries.len())?;
    for (i, j, q) in entries {
        writeln!(
            out,
            "{} {} {:.17e} {:.17e} {:.17e} {:.17e}",
            i + 1,
            j + 1,
            q.w,
            q.x,
            q.y,
            q.z
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn four_identity_parts_give_unit_quaternion_identity() {
        let dir = tempfile::tempdir().unwrap();
        let content = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n";
        let paths: Vec<PathBuf> = (0..4)
            .map(|i| write_file(dir.path(), &format!("p{i}.mtx"), content))
            .collect();
        let bundle = MatrixMarketBundle::Parts([
            Some(paths[0].clone()),
            Some(paths[1].clone()),
            Some(paths[2].clone()),
            Some(paths[3].clone()),
        ]);
        let a = read_qmatrix(&bundle, None).unwrap();
        for i in 0..2 {
            assert_eq!(a.get(i, i), Quaternion::new(1.0, 1.0, 1.0, 1.0));
        }
        assert_eq!(a.get(0, 1), Quaternion::ZERO);
    }

    #[test]
    fn missing_real_part_defaults_to_zero() {
        let dir = tempfile::tempdir().unwrap();
        let content = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 -3.5\n";
        let p = write_file(dir.path(), "ai.mtx", content);
        let bundle = MatrixMarketBundle::Parts([None, Some(p), None, None]);
        let a = read_qmatrix(&bundle, None).unwrap();
        assert_eq!(a.get(0, 1), Quaternion::new(0.0, -3.5, 0.0, 0.0));
        assert!(a.is_pure(0.0));
    }

    #[test]
    fn principal_submatrix_extraction() {
        let dir = tempfile::tempdir().unwrap();
        let mut content = String::from("%%MatrixMarket matrix coordinate real general\n5 5 25\n");
        for i in 1..=5 {
            for j in 1..=5 {
                content.push_str(&format!("{i} {j} {}\n", (i * 10 + j) as f64));
            }
        }
        let p = write_file(dir.path(), "a0.mtx", &content);
        let bundle = MatrixMarketBundle::Parts([Some(p), None, None, None]);
        let full = read_qmatrix(&bundle, None).unwrap();
        let sub = read_qmatrix(&bundle, Some(3)).unwrap();
        assert_eq!(sub.nrows(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(sub.get(i, j), full.get(i, j));
            }
        }
        assert!(read_qmatrix(&bundle, Some(9)).is_err());
    }

    #[test]
    fn pattern_and_symmetric_files() {
        let dir = tempfile::tempdir().unwrap();
        let content = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n";
        let p = write_file(dir.path(), "pat.mtx", content);
        let bundle = MatrixMarketBundle::Parts([Some(p), None, None, None]);
        let a = read_qmatrix(&bundle, None).unwrap();
        assert_eq!(a.get(1, 0).w, 1.0);
        assert_eq!(a.get(0, 1).w, 1.0);
        assert_eq!(a.get(2, 2).w, 1.0);
    }

    #[test]
    fn array_format_reads_column_major() {
        let dir = tempfile::tempdir().unwrap();
        let content = "%%MatrixMarket matrix array real general\n2 2\n1.0\n2.0\n3.0\n4.0\n";
        let p = write_file(dir.path(), "arr.mtx", content);
        let bundle = MatrixMarketBundle::Parts([Some(p), None, None, None]);
        let a = read_qmatrix(&bundle, None).unwrap();
        assert_eq!(a.get(0, 0).w, 1.0);
        assert_eq!(a.get(1, 0).w, 2.0);
        assert_eq!(a.get(0, 1).w, 3.0);
        assert_eq!(a.get(1, 1).w, 4.0);
    }

    #[test]
    fn dimension_mismatch_across_parts_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_file(
            dir.path(),
            "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n",
        );
        let b = write_file(
            dir.path(),
            "b.mtx",
            "%%MatrixMarket matrix coordinate real general\n3 3 1\n1 1 1.0\n",
        );
        let bundle = MatrixMarketBundle::Parts([Some(a), Some(b), None, None]);
        assert!(matches!(read_qmatrix(&bundle, None), Err(Error::Format(_))));
    }

    #[test]
    fn unsupported_field_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "c.mtx",
            "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n",
        );
        let bundle = MatrixMarketBundle::Parts([Some(p), None, None, None]);
        assert!(matches!(read_qmatrix(&bundle, None), Err(Error::Format(_))));
    }

    #[test]
    fn extended_round_trip_and_vector_read() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(181);
        let dir = tempfile::tempdir().unwrap();
        let mut trip = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                if rng.random::<f64>() < 0.4 {
                    trip.push((
                        i,
                        j,
                        Quaternion::new(
                            rng.random::<f64>() - 0.5,
                            rng.random::<f64>() - 0.5,
                            rng.random::<f64>() - 0.5,
                            rng.random::<f64>() - 0.5,
                        ),
                    ));
                }
            }
        }
        let a = QMatrix::from_triplets(6, 6, &trip).unwrap();
        let path = dir.path().join("m.qmm");
        write_extended(&a, &path).unwrap();
        let back = read_qmatrix(&MatrixMarketBundle::Extended(path.clone()), None).unwrap();
        assert_eq!(back, a);
        // Reading twice gives identical values.
        let again = read_qmatrix(&MatrixMarketBundle::Extended(path), None).unwrap();
        assert_eq!(again, back);

        let v = QVector::from_fn(4, |i| Quaternion::new(i as f64, 1.0, 0.0, -2.0));
        let vm = QMatrix::from_fn(4, 1, |i, _| v.get(i));
        let vp = dir.path().join("v.qmm");
        write_extended(&vm, &vp).unwrap();
        let vback = read_qvector(&vp).unwrap();
        assert_eq!(vback, v);
    }
}
