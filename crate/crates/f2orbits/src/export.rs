//! Census export as JSON, CSV or an aligned text table.
//!
//! Representatives are fixed-width lowercase hex of the flattened bit vector
//! with index 0 as the least significant bit. Heights are bit strings
//! `h_1 h_2 ...`.

use std::fmt::Write as _;
use std::io;

use f2orbits_core::orbits::{OrbitCensus, OrbitRecord};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub representative_hex: String,
    pub cardinality: u64,
    pub height_bits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusDoc {
    pub spec: String,
    pub n: Option<usize>,
    pub kind: String,
    pub total_states: u64,
    pub orbits: Vec<OrbitRow>,
}

impl From<&OrbitRecord> for OrbitRow {
    fn from(r: &OrbitRecord) -> Self {
        OrbitRow {
            representative_hex: r.representative.to_hex(),
            cardinality: r.cardinality,
            height_bits: r.height.as_ref().map(|h| h.to_string()),
            type_label: r.label.map(|l| l.name().to_string()),
        }
    }
}

impl From<&OrbitCensus> for CensusDoc {
    fn from(c: &OrbitCensus) -> Self {
        CensusDoc {
            spec: c.descriptor.to_string(),
            n: c.descriptor.n(),
            kind: c.descriptor.kind_name().to_string(),
            total_states: c.total_states,
            orbits: c.records.iter().map(OrbitRow::from).collect(),
        }
    }
}

pub fn to_json(census: &OrbitCensus) -> String {
    let mut s = serde_json::to_string_pretty(&CensusDoc::from(census)).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CsvRow<'a> {
    representative_hex: &'a str,
    cardinality: u64,
    height_bits: &'a str,
    type_label: &'a str,
}

pub fn write_csv<W: io::Write>(census: &OrbitCensus, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in CensusDoc::from(census).orbits {
        w.serialize(CsvRow {
            representative_hex: &row.representative_hex,
            cardinality: row.cardinality,
            height_bits: row.height_bits.as_deref().unwrap_or(""),
            type_label: row.type_label.as_deref().unwrap_or(""),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(census: &OrbitCensus) -> String {
    let mut buf = Vec::new();
    write_csv(census, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn to_table(census: &OrbitCensus) -> String {
    let doc = CensusDoc::from(census);
    let headers = ["representative", "cardinality", "height", "type"];
    let rows: Vec<[String; 4]> = doc
        .orbits
        .iter()
        .map(|r| {
            [
                r.representative_hex.clone(),
                r.cardinality.to_string(),
                r.height_bits.clone().unwrap_or_else(|| "-".into()),
                r.type_label.clone().unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let mut widths = headers.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# {} total_states={}", doc.spec, doc.total_states);
    let line = |cells: [&str; 4]| {
        format!(
            "{:<w0$}  {:>w1$}  {:<w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
        )
        .trim_end()
        .to_string()
    };
    let _ = writeln!(out, "{}", line(headers));
    for row in &rows {
        let _ = writeln!(out, "{}", line([&row[0], &row[1], &row[2], &row[3]]));
    }
    out
}

pub fn render(census: &OrbitCensus, format: Format) -> String {
    match format {
        Format::Json => to_json(census),
        Format::Csv => to_csv(census),
        Format::Table => to_table(census),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use f2orbits_core::actions::{ActionKind, ActionSpec};
    use f2orbits_core::orbits::enumerate;

    fn census() -> OrbitCensus {
        enumerate(&ActionSpec::new(2, ActionKind::First).unwrap()).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let c = census();
        let doc: CensusDoc = serde_json::from_str(&to_json(&c)).unwrap();
        assert_eq!(doc, CensusDoc::from(&c));
        assert_eq!(doc.kind, "first");
        assert_eq!(doc.n, Some(2));
        assert_eq!(doc.total_states, 8);
        assert_eq!(doc.orbits.len(), 6);
        assert_eq!(doc.orbits[0].representative_hex, "0");
        assert!(!to_json(&c).contains("type_label"));
    }

    #[test]
    fn csv_columns() {
        let csv = to_csv(&census());
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("representative_hex,cardinality,height_bits,type_label")
        );
        assert_eq!(lines.count(), 6);
    }

    #[test]
    fn table_has_a_row_per_orbit() {
        let t = to_table(&census());
        assert_eq!(t.lines().count(), 8);
        assert!(t.starts_with("# first n=2 total_states=8"));
    }
}
