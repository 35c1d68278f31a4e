//! Dataset and distance-matrix ingestion, label alignment, and consistent
//! reordering of observations.
//!
//! CSV dialect is fixed: comma separated, `.` decimal point, mandatory header
//! row, UTF-8. The first column always holds the region label.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Smallest sample any statistic in this crate accepts.
pub const MIN_OBSERVATIONS: usize = 2;

const TABLE2_CONVENTIONAL: &str = include_str!("../../../fixtures/table2_conventional.csv");
const TABLE2_ALPHABETICAL: &str = include_str!("../../../fixtures/table2_alphabetical.csv");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Ordered, labeled observations. Row order is significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    labels: Vec<String>,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(labels: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if n < MIN_OBSERVATIONS {
            return Err(Error::TooSmall {
                n,
                min: MIN_OBSERVATIONS,
            });
        }
        check_unique(&labels)?;
        let mut names = HashSet::new();
        for col in &columns {
            if !names.insert(col.name.as_str()) {
                return Err(Error::Csv(format!("duplicate column {:?}", col.name)));
            }
            if col.values.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: col.values.len(),
                });
            }
            if let Some(row) = col.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: row + 1,
                    column: col.name.clone(),
                });
            }
        }
        Ok(Self { labels, columns })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    /// Writes the dataset back out in the same dialect it is read in.
    /// Floats use the shortest representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label".to_owned()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.columns.iter().map(|c| format!("{:?}", c.values[i])));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Symmetric, zero-diagonal matrix of pairwise distances between labeled
/// locations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: SquareMatrix,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, values: SquareMatrix) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if values.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.n(),
            });
        }
        check_unique(&labels)?;
        for i in 0..n {
            let d = values.get(i, i);
            if d != 0.0 {
                return Err(Error::NonzeroDiagonal(labels[i].clone()));
            }
            for j in (i + 1)..n {
                let (ab, ba) = (values.get(i, j), values.get(j, i));
                if !ab.is_finite() || !ba.is_finite() {
                    return Err(Error::NonFinite {
                        row: i + 1,
                        column: labels[j].clone(),
                    });
                }
                for (v, a, b) in [(ab, i, j), (ba, j, i)] {
                    if v < 0.0 {
                        return Err(Error::NegativeDistance {
                            a: labels[a].clone(),
                            b: labels[b].clone(),
                            value: v,
                        });
                    }
                }
                if (ab - ba).abs() > 1e-9 * ab.max(1.0) {
                    return Err(Error::Asymmetric {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                        ab,
                        ba,
                    });
                }
            }
        }
        Ok(Self { labels, values })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label".to_owned()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.values.row(i).iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// A reordering of `n` observations: position `i` of the result takes the
/// element at `mapping[i]` of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(Error::NotBijective(n));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    /// The permutation that sorts `labels` in byte order.
    pub fn sorting(labels: &[String]) -> Self {
        let mut mapping: Vec<usize> = (0..labels.len()).collect();
        mapping.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        Self { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    pub fn apply<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        self.mapping.iter().map(|&m| xs[m].clone()).collect()
    }
}

pub fn parse_dataset<R: Read>(reader: R, schema: &[&str]) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.is_empty() {
        return Err(Error::Empty);
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    for required in schema {
        if !names.iter().any(|n| n == required) {
            return Err(Error::MissingColumn((*required).to_owned()));
        }
    }

    let mut labels = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = r + 1;
        labels.push(rec.get(0).unwrap_or_default().to_owned());
        for (c, name) in names.iter().enumerate() {
            let cell = rec.get(c + 1).unwrap_or_default();
            values[c].push(parse_number(cell, row, name)?);
        }
    }

    let columns = names
        .into_iter()
        .zip(values)
        .map(|(name, values)| Column { name, values })
        .collect();
    Dataset::new(labels, columns)
}

/// Reads a dataset CSV; `schema` lists columns that must be present.
pub fn load_dataset(path: impl AsRef<Path>, schema: &[&str]) -> Result<Dataset> {
    parse_dataset(open(path.as_ref())?, schema)
}

pub fn parse_distance_matrix<R: Read>(reader: R) -> Result<DistanceMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let n = labels.len();
    if n == 0 {
        return Err(Error::Empty);
    }

    let mut rows = Vec::with_capacity(n);
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if r >= n {
            return Err(Error::NotSquare(format!("more than {n} rows")));
        }
        let label = rec.get(0).unwrap_or_default();
        if label != labels[r] {
            return Err(Error::HeaderMismatch {
                index: r,
                header: labels[r].clone(),
                row: label.to_owned(),
            });
        }
        let row = (0..n)
            .map(|c| parse_number(rec.get(c + 1).unwrap_or_default(), r + 1, &labels[c]))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::NotSquare(format!(
            "{} columns but {} rows",
            n,
            rows.len()
        )));
    }
    let values =
        SquareMatrix::from_rows(&rows).ok_or_else(|| Error::NotSquare("ragged rows".into()))?;
    DistanceMatrix::new(labels, values)
}

pub fn load_distance_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    parse_distance_matrix(open(path.as_ref())?)
}

/// Reorders the distance matrix so its labels follow the dataset's order.
/// Already-aligned input is returned unchanged.
pub fn align(dataset: &Dataset, dm: &DistanceMatrix) -> Result<(Dataset, DistanceMatrix)> {
    if dataset.labels() == dm.labels() {
        return Ok((dataset.clone(), dm.clone()));
    }
    let data_set: BTreeSet<&String> = dataset.labels().iter().collect();
    let matrix_set: BTreeSet<&String> = dm.labels().iter().collect();
    if data_set != matrix_set {
        return Err(Error::LabelMismatch {
            only_in_dataset: data_set
                .difference(&matrix_set)
                .map(|s| (*s).clone())
                .collect(),
            only_in_matrix: matrix_set
                .difference(&data_set)
                .map(|s| (*s).clone())
                .collect(),
        });
    }
    let order: Vec<usize> = dataset
        .labels()
        .iter()
        .map(|l| {
            dm.labels()
                .iter()
                .position(|m| m == l)
                .expect("label sets are equal")
        })
        .collect();
    let aligned = DistanceMatrix {
        labels: dataset.labels().to_vec(),
        values: dm.values().reorder(&order),
    };
    Ok((dataset.clone(), aligned))
}

/// Permutes dataset rows and distance-matrix rows and columns together.
pub fn apply_permutation(
    dataset: &Dataset,
    dm: &DistanceMatrix,
    p: &Permutation,
) -> Result<(Dataset, DistanceMatrix)> {
    let n = dataset.n();
    for found in [dm.n(), p.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    Ok((permute_dataset(dataset, p)?, permute_distances(dm, p)?))
}

pub fn permute_dataset(dataset: &Dataset, p: &Permutation) -> Result<Dataset> {
    if p.len() != dataset.n() {
        return Err(Error::DimensionMismatch {
            expected: dataset.n(),
            found: p.len(),
        });
    }
    Ok(Dataset {
        labels: p.apply(&dataset.labels),
        columns: dataset
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                values: p.apply(&c.values),
            })
            .collect(),
    })
}

pub fn permute_distances(dm: &DistanceMatrix, p: &Permutation) -> Result<DistanceMatrix> {
    if p.len() != dm.n() {
        return Err(Error::DimensionMismatch {
            expected: dm.n(),
            found: p.len(),
        });
    }
    Ok(DistanceMatrix {
        labels: p.apply(&dm.labels),
        values: dm.values.reorder(p.mapping()),
    })
}

/// The 2012 urbanization / per-capita GRP sample for 29 regions, in the
/// official (conventional) order. Columns: `grp`, `urb`, `residual`.
pub fn table2_conventional() -> Dataset {
    parse_dataset(TABLE2_CONVENTIONAL.as_bytes(), &["grp", "urb", "residual"])
        .expect("bundled fixture is valid")
}

/// Same sample as [`table2_conventional`], sorted alphabetically by region.
pub fn table2_alphabetical() -> Dataset {
    parse_dataset(TABLE2_ALPHABETICAL.as_bytes(), &["grp", "urb", "residual"])
        .expect("bundled fixture is valid")
}

/// Raw CSV text of a bundled fixture, by name.
pub fn fixture_csv(name: &str) -> Option<&'static str> {
    match name {
        "table2_conventional" => Some(TABLE2_CONVENTIONAL),
        "table2_alphabetical" => Some(TABLE2_ALPHABETICAL),
        _ => None,
    }
}

fn parse_number(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        row,
        column: column.to_owned(),
        value: cell.to_owned(),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            row,
            column: column.to_owned(),
        });
    }
    Ok(v)
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}
