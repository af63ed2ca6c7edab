//! Binary data tables and their CSV representation.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An `n x p` table of 0/1 values, one row per object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    values: Vec<u8>,
    n: usize,
    p: usize,
    ids: Option<Vec<String>>,
}

impl BinaryDataset {
    /// Builds a dataset from rows, rejecting ragged rows and non-binary cells.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidData(format!("need at least 2 objects, got {n}")));
        }
        let p = rows[0].as_ref().len();
        if p == 0 {
            return Err(Error::InvalidData("need at least 1 variable".into()));
        }
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::Dimension { expected: p, found: row.len() });
            }
            if let Some(j) = row.iter().position(|&v| v > 1) {
                return Err(Error::InvalidData(format!(
                    "row {i}, column {j}: value {} is not 0 or 1",
                    row[j]
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Self { values, n, p, ids: None })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: ids.len() });
        }
        self.ids = Some(ids);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.values.chunks_exact(self.p)
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Reads CSV with one object per row. A first row containing any cell other
    /// than `0`/`1` is treated as a header; any such cell later is an error.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr =
            csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: Option<Vec<u8>> = record
                .iter()
                .map(|cell| match cell {
                    "0" => Some(0),
                    "1" => Some(1),
                    _ => None,
                })
                .collect();
            match parsed {
                Some(row) => rows.push(row),
                None if line == 0 => continue,
                None => {
                    return Err(Error::InvalidData(format!(
                        "line {}: cells must be 0 or 1, got {:?}",
                        line + 1,
                        record.iter().collect::<Vec<_>>()
                    )))
                }
            }
        }
        Self::from_rows(&rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes one comma-separated 0/1 row per object, without header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for row in self.rows() {
            wtr.write_record(row.iter().map(|v| if *v == 1 { "1" } else { "0" }))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
