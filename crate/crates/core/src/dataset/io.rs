//! LIBSVM sparse text and CSV dataset i/o.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Label, LabeledDataset, Point};

/// Reads the LIBSVM sparse format: one sample per line,
/// `label idx:val idx:val ...` with 1-based strictly increasing indices.
///
/// The dataset dimension is the maximum index seen anywhere in the file.
/// Raw labels must be numeric and take at most two distinct values; they are
/// remapped to ±1 (canonical ±1 labels are kept as-is, otherwise the smaller
/// raw label becomes −1).
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut raw_labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let line_1 = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_1,
            msg: format!("label `{label_tok}` is not numeric"),
        })?;

        let mut row = Vec::new();
        let mut prev_index = 0usize;
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_1,
                msg: format!("feature `{tok}` is not in idx:val form"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: line_1,
                msg: format!("feature index `{idx_str}` is not a positive integer"),
            })?;
            let val: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: line_1,
                msg: format!("feature value `{val_str}` is not numeric"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_1,
                    msg: "feature indices are 1-based".into(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: line_1,
                    msg: format!("feature indices must be strictly increasing (saw {idx} after {prev_index})"),
                });
            }
            prev_index = idx;
            max_index = max_index.max(idx);
            row.push((idx, val));
        }
        raw_labels.push(label);
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::EmptyData("no samples".into()));
    }
    if max_index == 0 {
        return Err(Error::EmptyData("no features in file".into()));
    }

    let labels = remap_labels(&raw_labels)?;
    let points = rows
        .into_iter()
        .map(|row| {
            let mut coords = vec![0.0; max_index];
            for (idx, val) in row {
                coords[idx - 1] = val;
            }
            Point::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "libsvm".into());
    LabeledDataset::new(points, labels, None, name)
}

/// Two-class remap: a raw label set that is already a subset of {−1, +1} is
/// kept verbatim; otherwise the numerically smaller raw label maps to −1 and
/// the larger to +1. More than two distinct raw labels is an error.
fn remap_labels(raw: &[f64]) -> Result<Vec<Label>> {
    let mut distinct: BTreeMap<u64, f64> = BTreeMap::new();
    for &l in raw {
        distinct.insert(l.to_bits(), l);
    }
    let mut values: Vec<f64> = distinct.values().copied().collect();
    values.sort_by(f64::total_cmp);
    if values.len() > 2 {
        return Err(Error::TooManyLabels(
            values.iter().map(|v| v.to_string()).collect(),
        ));
    }
    let canonical = values.iter().all(|&v| v == 1.0 || v == -1.0);
    let map = |l: f64| -> Label {
        if canonical {
            Label::from_sign(l)
        } else if l == values[0] {
            Label::Minus
        } else {
            Label::Plus
        }
    };
    Ok(raw.iter().map(|&l| map(l)).collect())
}

/// Writes the LIBSVM sparse format (zero coordinates omitted).
pub fn save_libsvm(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for i in 0..data.n() {
        out.push_str(&data.label(i).to_string());
        for (j, &v) in data.point(i).coords().iter().enumerate() {
            if v != 0.0 {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes `label,x1,...,xd` CSV with a header row.
pub fn save_csv(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        write!(w, "label")?;
        for j in 0..data.dim() {
            write!(w, ",x{}", j + 1)?;
        }
        writeln!(w)?;
        for i in 0..data.n() {
            write!(w, "{}", data.label(i))?;
            for &v in data.point(i).coords() {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads the `label,x1,...,xd` CSV written by [`save_csv`]. A leading header
/// row is detected by its `label` first field.
pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut raw_labels = Vec::new();
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_1 = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let first = fields.next().expect("non-empty line has a field").trim();
        if lineno == 0 && first == "label" {
            continue;
        }
        let label: f64 = first.parse().map_err(|_| Error::Parse {
            line: line_1,
            msg: format!("label `{first}` is not numeric"),
        })?;
        let coords = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: line_1,
                    msg: format!("value `{f}` is not numeric"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse {
                line: line_1,
                msg: "row has no feature columns".into(),
            });
        }
        raw_labels.push(label);
        points.push(Point::new(coords)?);
    }
    if points.is_empty() {
        return Err(Error::EmptyData("no samples".into()));
    }
    let labels = remap_labels(&raw_labels)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    LabeledDataset::new(points, labels, None, name)
}

/// Sidecar poison mask: one `0`/`1` line per point.
pub fn save_mask(mask: &[bool], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text: String = mask
        .iter()
        .map(|&m| if m { "1\n" } else { "0\n" })
        .collect();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .map(|(lineno, line)| match line.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::Parse {
                line: lineno + 1,
                msg: format!("mask entry `{other}` is not 0 or 1"),
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn libsvm_basic_line() {
        let f = write_tmp("+1 1:0.5 3:2.0\n-1 2:1.0\n");
        let data = load_libsvm(f.path()).unwrap();
        assert_eq!(data.dim(), 3);
        assert_eq!(data.point(0).coords(), &[0.5, 0.0, 2.0]);
        assert_eq!(data.label(0), Label::Plus);
        assert_eq!(data.label(1), Label::Minus);
    }

    #[test]
    fn libsvm_empty_file_errors() {
        let f = write_tmp("");
        let err = load_libsvm(f.path()).unwrap_err();
        assert!(err.to_string().contains("no samples"), "{err}");
    }

    #[test]
    fn libsvm_zero_one_labels_remap() {
        let f = write_tmp("0 1:1.0\n1 1:2.0\n0 1:3.0\n");
        let data = load_libsvm(f.path()).unwrap();
        assert_eq!(data.label(0), Label::Minus);
        assert_eq!(data.label(1), Label::Plus);
        assert_eq!(data.label(2), Label::Minus);
    }

    #[test]
    fn libsvm_three_labels_rejected() {
        let f = write_tmp("0 1:1.0\n1 1:2.0\n2 1:3.0\n");
        assert!(matches!(
            load_libsvm(f.path()),
            Err(Error::TooManyLabels(_))
        ));
    }

    #[test]
    fn libsvm_nonincreasing_indices_rejected() {
        let f = write_tmp("+1 2:1.0 2:2.0\n");
        let err = load_libsvm(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn libsvm_bad_token_reports_line() {
        let f = write_tmp("+1 1:1.0\n-1 oops\n");
        let err = load_libsvm(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let data = LabeledDataset::new(
            vec![
                Point::new(vec![0.5, -1.25]).unwrap(),
                Point::new(vec![0.0, 3.5]).unwrap(),
            ],
            vec![Label::Plus, Label::Minus],
            None,
            "rt",
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_csv(&data, f.path()).unwrap();
        let back = load_csv(f.path()).unwrap();
        assert_eq!(back.points(), data.points());
        assert_eq!(back.labels(), data.labels());
    }

    #[test]
    fn libsvm_round_trip() {
        let data = LabeledDataset::new(
            vec![
                Point::new(vec![0.5, 0.0, 2.0]).unwrap(),
                Point::new(vec![0.0, 1.0, 0.0]).unwrap(),
            ],
            vec![Label::Plus, Label::Minus],
            None,
            "rt",
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_libsvm(&data, f.path()).unwrap();
        let back = load_libsvm(f.path()).unwrap();
        assert_eq!(back.points(), data.points());
        assert_eq!(back.labels(), data.labels());
    }

    #[test]
    fn mask_round_trip() {
        let mask = vec![true, false, true];
        let f = tempfile::NamedTempFile::new().unwrap();
        save_mask(&mask, f.path()).unwrap();
        assert_eq!(load_mask(f.path()).unwrap(), mask);
    }
}
