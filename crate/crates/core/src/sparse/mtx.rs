use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Symmetry declared in a Matrix Market header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixSymmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<(SparseMatrix, MatrixSymmetry)> {
    let file = File::open(path)?;
    read_matrix_market_from(BufReader::new(file))
}

/// Parses a coordinate-format Matrix Market stream (`real` or `integer`
/// field, `general` or `symmetric`). Symmetric files are expanded to full
/// storage.
pub fn read_matrix_market_from<R: BufRead>(reader: R) -> Result<(SparseMatrix, MatrixSymmetry)> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad header `{header}`"),
        });
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("format `{}`", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::UnsupportedFormat(format!("field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => MatrixSymmetry::General,
        "symmetric" => MatrixSymmetry::Symmetric,
        other => return Err(Error::UnsupportedFormat(format!("symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let mut field = |what: &str| {
            parts.next().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("missing {what}"),
            })
        };
        match size {
            None => {
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad size `{s}`: {e}"),
                    })
                };
                let m = parse(field("row count")?)?;
                let n = parse(field("column count")?)?;
                let nnz = parse(field("entry count")?)?;
                entries.reserve(if symmetry == MatrixSymmetry::Symmetric { 2 * nnz } else { nnz });
                size = Some((m, n, nnz));
            }
            Some((m, n, _)) => {
                let parse_index = |s: &str, bound: usize| -> Result<usize> {
                    let k = s.parse::<usize>().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad index `{s}`: {e}"),
                    })?;
                    if k == 0 || k > bound {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("index {k} outside 1..={bound}"),
                        });
                    }
                    Ok(k - 1)
                };
                let i = parse_index(field("row index")?, m)?;
                let j = parse_index(field("column index")?, n)?;
                let vs = field("value")?;
                let v: f64 = vs.parse().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad value `{vs}`: {e}"),
                })?;
                entries.push((i, j, v));
                if symmetry == MatrixSymmetry::Symmetric && i != j {
                    entries.push((j, i, v));
                }
            }
        }
    }
    let (m, n, nnz) = size.ok_or(Error::Parse {
        line: 0,
        msg: "missing size line".into(),
    })?;
    let stored = if symmetry == MatrixSymmetry::Symmetric {
        entries.iter().filter(|e| e.0 >= e.1).count()
    } else {
        entries.len()
    };
    if stored != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {nnz} entries, found {stored}"),
        });
    }
    Ok((SparseMatrix::from_triplets(m, n, &entries)?, symmetry))
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market_to(&mut w, a)?;
    w.flush()?;
    Ok(())
}

/// Writes `a` in `coordinate real general` form with round-trip precision.
pub fn write_matrix_market_to<W: Write>(w: &mut W, a: &SparseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            // `{:e}` prints the shortest representation that parses back exactly
            writeln!(w, "{} {} {:e}", i + 1, c + 1, v)?;
        }
    }
    Ok(())
}
