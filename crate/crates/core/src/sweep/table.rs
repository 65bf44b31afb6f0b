//! CSV tables with full double precision.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One row: the key column value (distance for distance sweeps) and the remaining columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub key: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Name of the key column, `d` for distance sweeps.
    pub key: String,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(key: &str, columns: &[&str]) -> Self {
        SweepTable { key: key.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, key: f64, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(SweepRow { key, values });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn keys(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.key).collect()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_csv(self, &mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

/// 17 significant digits, exponent form, independent of locale.
fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn write_csv<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let mut header = vec![table.key.clone()];
    header.extend(table.columns.iter().cloned());
    wr.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![format_value(row.key)];
        rec.extend(row.values.iter().map(|&v| format_value(v)));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes the table to `path`: header row, then one line per row.
pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(table, std::io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<SweepTable> {
    let mut rd = csv::Reader::from_path(path)?;
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    let Some((key, columns)) = header.split_first() else {
        return Err(Error::Io(format!("{}: empty header", path.display())));
    };
    let mut table = SweepTable { key: key.clone(), columns: columns.to_vec(), rows: Vec::new() };
    for rec in rd.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Io(format!("bad number `{s}`"))))
            .collect::<Result<_>>()?;
        let (k, rest) = vals.split_first().ok_or_else(|| Error::Io("empty record".into()))?;
        table.push(*k, rest.to_vec());
    }
    Ok(table)
}
