//! CSV readers and writers for covariance matrices, correlation tables and
//! raw data.
//!
//! * Covariance CSV: a header row of labels followed by `p` numeric rows.
//!   A leading row-label column is accepted when the header starts with an
//!   empty cell.
//! * Correlation table: a header row of labels, then one row per variable
//!   from the second onwards holding its strict lower-triangular
//!   correlations (`label, r, r, ...`), then `SD, s1, ..., sp`.
//! * Data CSV: one row per variable, `label, x1, ..., xn`; transposed
//!   files have a header row of labels and one row per subject.
//!
//! Lines starting with `#` are comments; surrounding whitespace is ignored.

use nalgebra::DMatrix;

use super::{from_correlation_table, CovarianceMatrix};
use crate::{Error, Result};

fn records(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Input(format!("CSV: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn number(cell: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = cell
        .parse()
        .map_err(|_| Error::Input(format!("row {row}, column {col}: `{cell}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Input(format!("row {row}, column {col}: non-finite value")));
    }
    Ok(v)
}

pub fn read_covariance_csv(text: &str) -> Result<CovarianceMatrix> {
    let rows = records(text)?;
    let (header, body) = rows
        .split_first()
        .ok_or_else(|| Error::Input("empty covariance file".into()))?;
    let row_labels = header.first().is_some_and(String::is_empty);
    let labels: Vec<String> = if row_labels { header[1..].to_vec() } else { header.clone() };
    let p = labels.len();
    if body.len() != p {
        return Err(Error::Input(format!("covariance file has {} rows for {p} labels", body.len())));
    }
    let mut m = DMatrix::zeros(p, p);
    for (i, row) in body.iter().enumerate() {
        let cells = if row_labels {
            if row[0] != labels[i] {
                return Err(Error::Input(format!(
                    "row {}: label `{}` does not match column label `{}`",
                    i + 2,
                    row[0],
                    labels[i]
                )));
            }
            &row[1..]
        } else {
            &row[..]
        };
        if cells.len() != p {
            return Err(Error::Input(format!("row {}: expected {p} values, found {}", i + 2, cells.len())));
        }
        for (j, c) in cells.iter().enumerate() {
            m[(i, j)] = number(c, i + 2, j + 1)?;
        }
    }
    CovarianceMatrix::new(labels, m)
}

pub fn write_covariance_csv(cov: &CovarianceMatrix) -> String {
    let mut out = cov.labels().join(",");
    out.push('\n');
    for i in 0..cov.dim() {
        let row: Vec<String> = (0..cov.dim()).map(|j| format!("{}", cov.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_correlation_table(text: &str) -> Result<CovarianceMatrix> {
    let rows = records(text)?;
    let (header, body) = rows
        .split_first()
        .ok_or_else(|| Error::Input("empty correlation table".into()))?;
    let labels: Vec<String> = header.iter().filter(|c| !c.is_empty()).cloned().collect();
    let p = labels.len();
    if body.len() != p {
        return Err(Error::Input(format!(
            "correlation table needs {} correlation rows and an SD row for {p} variables, found {} rows",
            p.saturating_sub(1),
            body.len()
        )));
    }
    let mut correlations = Vec::with_capacity(p.saturating_sub(1));
    for (k, row) in body[..p - 1].iter().enumerate() {
        let i = k + 1;
        if row[0] != labels[i] {
            return Err(Error::Input(format!(
                "row {}: expected correlations of `{}`, found `{}`",
                k + 2,
                labels[i],
                row[0]
            )));
        }
        let cells: Vec<&String> = row[1..].iter().filter(|c| !c.is_empty()).collect();
        if cells.len() != i {
            return Err(Error::Input(format!(
                "row {}: `{}` needs {i} correlations, found {}",
                k + 2,
                labels[i],
                cells.len()
            )));
        }
        correlations.push(
            cells
                .iter()
                .enumerate()
                .map(|(j, c)| number(c, k + 2, j + 2))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let sd_row = &body[p - 1];
    if !sd_row[0].eq_ignore_ascii_case("SD") {
        return Err(Error::Input(format!("row {}: expected the `SD` row, found `{}`", p + 1, sd_row[0])));
    }
    let sds = sd_row[1..]
        .iter()
        .enumerate()
        .map(|(j, c)| number(c, p + 1, j + 2))
        .collect::<Result<Vec<_>>>()?;
    from_correlation_table(labels, &correlations, &sds)
}

/// Reads a data file into labels and a `p × n` matrix.
pub fn read_data_csv(text: &str, transpose: bool) -> Result<(Vec<String>, DMatrix<f64>)> {
    let rows = records(text)?;
    if rows.is_empty() {
        return Err(Error::Input("empty data file".into()));
    }
    if transpose {
        let labels = rows[0].clone();
        let p = labels.len();
        let n = rows.len() - 1;
        let mut m = DMatrix::zeros(p, n);
        for (k, row) in rows[1..].iter().enumerate() {
            if row.len() != p {
                return Err(Error::Input(format!("row {}: expected {p} values, found {}", k + 2, row.len())));
            }
            for (i, c) in row.iter().enumerate() {
                m[(i, k)] = number(c, k + 2, i + 1)?;
            }
        }
        Ok((labels, m))
    } else {
        let labels: Vec<String> = rows.iter().map(|r| r[0].clone()).collect();
        let n = rows[0].len() - 1;
        let mut m = DMatrix::zeros(rows.len(), n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() - 1 != n {
                return Err(Error::Input(format!(
                    "row {}: expected {n} observations, found {}",
                    i + 1,
                    row.len() - 1
                )));
            }
            for (k, c) in row[1..].iter().enumerate() {
                m[(i, k)] = number(c, i + 1, k + 2)?;
            }
        }
        Ok((labels, m))
    }
}
