use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::HarnessError;

/// One table cell. Non-finite numbers are exported as empty/null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn num(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Null
        }
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::num)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn parse_field(field: &str) -> Self {
        if field.is_empty() {
            Cell::Null
        } else if let Ok(v) = field.parse::<f64>() {
            Cell::num(v)
        } else {
            Cell::Text(field.to_string())
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::num(v)
    }
}

/// A named tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub dim: usize,
    /// Effective inputs after defaults were applied.
    pub config: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Not exported, so that repeated runs give identical bytes.
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Header line followed by one line per row.
pub fn export_csv<W: Write>(table: &ResultTable, out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_json<W: Write>(table: &ResultTable, mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, table).map_err(|e| HarnessError::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn export<W: Write>(table: &ResultTable, format: Format, out: W) -> Result<(), HarnessError> {
    match format {
        Format::Csv => export_csv(table, out),
        Format::Json => export_json(table, out),
    }
}

pub fn export_bytes(table: &ResultTable, format: Format) -> Result<Vec<u8>, HarnessError> {
    let mut buf = Vec::new();
    export(table, format, &mut buf)?;
    Ok(buf)
}

/// Reads a CSV export back as `(columns, rows)`.
pub fn read_csv(bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<Cell>>), HarnessError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        rows.push(record?.iter().map(Cell::parse_field).collect());
    }
    Ok((columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: Vec<Vec<Cell>>) -> ResultTable {
        ResultTable {
            experiment: "integrate".into(),
            columns: vec!["f".into(), "value".into(), "expected".into()],
            rows,
            metadata: Metadata {
                version: "0.0.0".into(),
                dim: 1,
                config: BTreeMap::new(),
            },
            checks: vec![Check::at_most("max_residual", 0.0, 1e-8)],
            passed: true,
            wall_time: Some(Duration::from_millis(5)),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let bytes = export_bytes(&table(vec![]), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "f,value,expected\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let row = vec![Cell::text("gauss:0.1"), Cell::num(0.1 + 0.2), Cell::Null];
        let t = table(vec![row.clone()]);
        let bytes = export_bytes(&t, Format::Csv).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        let (cols, rows) = read_csv(&bytes).unwrap();
        assert_eq!(cols, t.columns);
        assert_eq!(rows, vec![row]);
    }

    #[test]
    fn tiny_and_huge_numbers_survive() {
        let row = vec![Cell::text("x"), Cell::num(1e-300), Cell::num(-6.02e23)];
        let bytes = export_bytes(&table(vec![row.clone()]), Format::Csv).unwrap();
        assert_eq!(read_csv(&bytes).unwrap().1, vec![row]);
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(Cell::num(f64::NAN), Cell::Null);
        assert_eq!(Cell::from(f64::INFINITY), Cell::Null);
    }

    #[test]
    fn json_omits_wall_time_and_round_trips() {
        let t = table(vec![vec![Cell::text("a"), Cell::num(1.5), Cell::Null]]);
        let bytes = export_bytes(&t, Format::Json).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(!text.contains("wall"));
        let back: ResultTable = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.wall_time, None);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
