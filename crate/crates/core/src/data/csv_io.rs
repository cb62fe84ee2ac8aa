use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::Dataset;
use crate::error::{QfsError, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Name(String),
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Integers select by position, anything else by header name. A header
    /// that happens to be numeric is still found: see [`LabelColumn::resolve`].
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl LabelColumn {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Last => Ok(headers.len() - 1),
            LabelColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| QfsError::MissingLabelColumn(name.clone())),
            LabelColumn::Index(i) => {
                let as_name = i.to_string();
                if let Some(pos) = headers.iter().position(|h| *h == as_name) {
                    Ok(pos)
                } else if *i < headers.len() {
                    Ok(*i)
                } else {
                    Err(QfsError::MissingLabelColumn(as_name))
                }
            }
        }
    }
}

/// Reads a headered, comma-separated file into a [`Dataset`]. Lines starting
/// with `#` are comments.
///
/// Label values are remapped to `0..c`: numerically ascending when every label
/// parses as a non-negative integer, lexicographically otherwise. The original
/// spellings are kept in [`Dataset::label_names`].
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| QfsError::io(path, e))?;
    let csv_err = |e: csv::Error| QfsError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(QfsError::Malformed(format!(
            "{}: need at least one feature column and a label column",
            path.display()
        )));
    }
    let label_col = label.resolve(&headers)?;
    let n_features = headers.len() - 1;

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        // data rows are numbered from 1, the header being row 0
        let row = r + 1;
        for (c, cell) in record.iter().enumerate() {
            if c == label_col {
                if cell.is_empty() {
                    return Err(QfsError::Malformed(format!(
                        "row {row}: empty label in column '{}'",
                        headers[c]
                    )));
                }
                raw_labels.push(cell.to_string());
                continue;
            }
            let v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| QfsError::UnparseableCell {
                    row,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
            features.push(v);
        }
    }
    if raw_labels.is_empty() {
        return Err(QfsError::Malformed(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    let (labels, label_names) = remap_labels(&raw_labels);
    let feature_names = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label_col)
        .map(|(_, h)| Some(h.clone()))
        .collect();
    Ok(Dataset::from_parts(
        features,
        labels,
        n_features,
        feature_names,
        label_names,
    ))
}

fn remap_labels(raw: &[String]) -> (Vec<u32>, Vec<String>) {
    let numeric: Option<Vec<u64>> = raw.iter().map(|s| s.parse::<u64>().ok()).collect();
    match numeric {
        Some(values) => {
            let mut distinct = values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let codes = values
                .iter()
                .map(|v| distinct.binary_search(v).unwrap() as u32)
                .collect();
            (codes, distinct.iter().map(u64::to_string).collect())
        }
        None => {
            let mut distinct: Vec<&String> = raw.iter().collect();
            distinct.sort();
            distinct.dedup();
            let codes = raw
                .iter()
                .map(|v| distinct.binary_search(&v).unwrap() as u32)
                .collect();
            (codes, distinct.into_iter().cloned().collect())
        }
    }
}

/// Writes a dataset as CSV with the label in a trailing `y` column.
///
/// Values use the shortest representation that round-trips, so identical
/// datasets produce identical bytes.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv_with_comment(dataset, path, None)
}

/// [`write_csv`] preceded by a `# comment` line, which [`load_csv`] skips.
pub fn write_csv_with_comment(
    dataset: &Dataset,
    path: impl AsRef<Path>,
    comment: Option<&str>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| QfsError::io(path, e))?;
    write_csv_to(dataset, file, comment).map_err(|e| match e {
        QfsError::Csv { message, .. } => QfsError::Csv {
            path: path.to_path_buf(),
            message,
        },
        QfsError::Io { source, .. } => QfsError::io(path, source),
        other => other,
    })
}

/// Writes CSV text to any writer, optionally preceded by a `# comment` line.
pub fn write_csv_to<W: Write>(dataset: &Dataset, mut out: W, comment: Option<&str>) -> Result<()> {
    let io_err = |e| QfsError::io("<output>", e);
    if let Some(text) = comment {
        if text.contains('\n') {
            return Err(QfsError::InvalidArgument(
                "comment must be a single line".into(),
            ));
        }
        writeln!(out, "# {text}").map_err(io_err)?;
    }
    let csv_err = |e: csv::Error| QfsError::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = dataset
        .feature_names()
        .iter()
        .enumerate()
        .map(|(i, name)| name.clone().unwrap_or_else(|| format!("f{i}")))
        .collect();
    header.push("y".to_string());
    writer.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(header.len());
    for s in 0..dataset.n_samples() {
        record.clear();
        record.extend(dataset.row(s).iter().map(|v| v.to_string()));
        record.push(dataset.label_names()[dataset.labels()[s] as usize].clone());
        writer.write_record(&record).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn remaps_labels_to_contiguous_codes() {
        let f = write_tmp("a,b,y\n1,2,2\n3,4,5\n5,6,5\n");
        let d = load_csv(f.path(), &"y".parse().unwrap()).unwrap();
        assert_eq!(d.labels(), &[0, 1, 1]);
        assert_eq!(d.label_names(), &["2", "5"]);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn single_row() {
        let f = write_tmp("a,y\n0.5,1\n");
        let d = load_csv(f.path(), &LabelColumn::Last).unwrap();
        assert_eq!(d.n_samples(), 1);
        assert_eq!(d.labels(), &[0]);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let f = write_tmp("a,b,y\n1,2,0\n3,oops,1\n");
        let err = load_csv(f.path(), &LabelColumn::Last).unwrap_err();
        match err {
            QfsError::UnparseableCell { row, column, value } => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn label_column_by_index_and_missing_name() {
        let f = write_tmp("y,a,b\ng,1,2\nb,3,4\n");
        let d = load_csv(f.path(), &"0".parse().unwrap()).unwrap();
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(d.row(0), &[1.0, 2.0]);
        assert_eq!(
            d.feature_names(),
            &[Some("a".to_string()), Some("b".to_string())]
        );

        let err = load_csv(f.path(), &"label".parse().unwrap()).unwrap_err();
        assert!(matches!(err, QfsError::MissingLabelColumn(_)));
    }

    #[test]
    fn missing_file() {
        let err = load_csv("/nonexistent/data.csv", &LabelColumn::Last).unwrap_err();
        assert!(matches!(err, QfsError::Io { .. }));
    }

    #[test]
    fn write_then_load_preserves_values() {
        let d = Dataset::new(vec![vec![0.1, -2.5], vec![1e-300, 3.0]], vec![1, 0]).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&d, out.path()).unwrap();
        let back = load_csv(out.path(), &LabelColumn::Last).unwrap();
        assert_eq!(back.row(0), d.row(0));
        assert_eq!(back.row(1), d.row(1));
        assert_eq!(back.labels(), d.labels());
    }

    #[test]
    fn comment_line_is_skipped() {
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![0, 1]).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv_with_comment(&d, out.path(), Some("seed 3")).unwrap();
        let text = std::fs::read_to_string(out.path()).unwrap();
        assert!(text.starts_with("# seed 3\nf0,y\n"));
        assert_eq!(
            load_csv(out.path(), &LabelColumn::Last).unwrap().column(0),
            vec![1.0, 2.0]
        );
        assert!(write_csv_with_comment(&d, out.path(), Some("a\nb")).is_err());
    }
}
