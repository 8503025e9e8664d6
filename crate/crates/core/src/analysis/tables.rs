//! Coefficient, norm and root tables in the printed layout, their CSV and
//! JSON forms, and comparison against the bundled golden transcriptions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::search::find_q2_root;
use crate::autocov::HurstIndex;
use crate::bilateral::{norm_bilateral, q_solve};
use crate::error::{FgnError, Result};
use crate::format::fmt_fixed;
use crate::onesided::norm_one_sided_ladder;
use crate::parallel::par_map;

const Q_HURSTS: [&str; 6] = ["0.51", "0.6", "0.7", "0.8", "0.9", "0.99"];
const NORM_HURSTS: [&str; 5] = ["0.6", "0.7", "0.8", "0.9", "0.99"];
const NORM_SIZES: [usize; 6] = [2, 50, 100, 200, 300, 400];
const Q_WINDOWS: usize = 10;
const ROOT_TOLERANCE: f64 = 1e-7;
/// Slack added to one unit in the last printed place when comparing.
const SOLVER_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableId {
    /// Coefficients `Q_j^k` for the given `H` label.
    Q(&'static str),
    Norms,
    Roots,
}

impl TableId {
    pub fn all() -> Vec<TableId> {
        let mut v: Vec<TableId> = Q_HURSTS.iter().map(|h| TableId::Q(h)).collect();
        v.push(TableId::Norms);
        v.push(TableId::Roots);
        v
    }

    pub fn decimals(&self) -> usize {
        match self {
            TableId::Roots => 5,
            _ => 6,
        }
    }

    /// Comparison tolerance against the golden files.
    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.decimals() as i32)) + SOLVER_SLACK
    }

    fn golden_source(&self) -> &'static str {
        match self {
            TableId::Q("0.51") => include_str!("../../golden/q_0.51.csv"),
            TableId::Q("0.6") => include_str!("../../golden/q_0.6.csv"),
            TableId::Q("0.7") => include_str!("../../golden/q_0.7.csv"),
            TableId::Q("0.8") => include_str!("../../golden/q_0.8.csv"),
            TableId::Q("0.9") => include_str!("../../golden/q_0.9.csv"),
            TableId::Q(_) => include_str!("../../golden/q_0.99.csv"),
            TableId::Norms => include_str!("../../golden/norms.csv"),
            TableId::Roots => include_str!("../../golden/roots.csv"),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableId::Q(h) => write!(f, "Q@{h}"),
            TableId::Norms => f.write_str("NORMS"),
            TableId::Roots => f.write_str("ROOTS"),
        }
    }
}

impl FromStr for TableId {
    type Err = FgnError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "NORMS" => return Ok(TableId::Norms),
            "ROOTS" => return Ok(TableId::Roots),
            _ => {}
        }
        if let Some(h) = upper.strip_prefix("Q@") {
            let v: f64 = h
                .parse()
                .map_err(|_| FgnError::UnknownTable(s.to_string()))?;
            if let Some(label) = Q_HURSTS.iter().find(|l| l.parse::<f64>().ok() == Some(v)) {
                return Ok(TableId::Q(label));
            }
        }
        Err(FgnError::UnknownTable(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = FgnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(FgnError::Parse(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub labels: Vec<String>,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub id: TableId,
    pub label_columns: Vec<String>,
    pub value_columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonMeta {
    table: String,
    label_columns: Vec<String>,
    value_columns: Vec<String>,
    decimals: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    meta: JsonMeta,
    rows: Vec<TableRow>,
}

fn layout(id: &TableId) -> (Vec<String>, Vec<String>) {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    match id {
        TableId::Q(_) => (s(&["n"]), (1..=Q_WINDOWS).map(|k| k.to_string()).collect()),
        TableId::Norms => (
            s(&["hurst", "norm"]),
            NORM_SIZES.iter().map(|n| n.to_string()).collect(),
        ),
        TableId::Roots => (s(&["n"]), s(&["root"])),
    }
}

impl Table {
    /// Computes the table from scratch.
    pub fn build(id: &TableId) -> Result<Table> {
        let (label_columns, value_columns) = layout(id);
        let rows = match id {
            TableId::Q(label) => {
                let h = HurstIndex::new(label.parse().expect("static label"))?;
                let windows: Vec<usize> = (1..=Q_WINDOWS).collect();
                par_map(&windows, |&j| {
                    let q = q_solve(h, j)?;
                    Ok(TableRow {
                        labels: vec![j.to_string()],
                        values: (1..=Q_WINDOWS)
                            .map(|k| (k <= j).then(|| q.get(k)))
                            .collect(),
                    })
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?
            }
            TableId::Norms => {
                let per_h = par_map(&NORM_HURSTS, |label| -> Result<[TableRow; 2]> {
                    let h = HurstIndex::new(label.parse().expect("static label"))?;
                    let r1 = norm_one_sided_ladder(h, *NORM_SIZES.last().expect("sizes"))?;
                    let r2 = NORM_SIZES
                        .iter()
                        .map(|&n| norm_bilateral(h, n).map(Some))
                        .collect::<Result<Vec<_>>>()?;
                    Ok([
                        TableRow {
                            labels: vec![label.to_string(), "R1".into()],
                            values: NORM_SIZES.iter().map(|&n| Some(r1[n - 2])).collect(),
                        },
                        TableRow {
                            labels: vec![label.to_string(), "R2".into()],
                            values: r2,
                        },
                    ])
                });
                let mut rows = Vec::new();
                for pair in per_h {
                    rows.extend(pair?);
                }
                rows
            }
            TableId::Roots => {
                let windows: Vec<usize> = (3..=10).collect();
                par_map(&windows, |&j| {
                    Ok(TableRow {
                        labels: vec![j.to_string()],
                        values: vec![Some(find_q2_root(j, ROOT_TOLERANCE)?.root)],
                    })
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Table {
            id: id.clone(),
            label_columns,
            value_columns,
            rows,
        })
    }

    /// Header row then one line per row; values at the table's print precision,
    /// missing cells empty.
    pub fn to_csv(&self) -> String {
        let dp = self.id.decimals();
        let mut out = self
            .label_columns
            .iter()
            .chain(&self.value_columns)
            .cloned()
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in &self.rows {
            let cells = row.labels.iter().cloned().chain(
                row.values
                    .iter()
                    .map(|v| v.map(|x| fmt_fixed(x, dp)).unwrap_or_default()),
            );
            out.push_str(&cells.collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// Full precision JSON: `{"meta": {...}, "rows": [...]}`.
    pub fn to_json(&self) -> String {
        let doc = JsonTable {
            meta: JsonMeta {
                table: self.id.to_string(),
                label_columns: self.label_columns.clone(),
                value_columns: self.value_columns.clone(),
                decimals: self.id.decimals(),
            },
            rows: self.rows.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("tables serialize")
    }

    /// Values rounded to the print precision, as a CSV round trip sees them.
    pub fn rounded(&self) -> Table {
        let dp = self.id.decimals();
        let mut t = self.clone();
        for row in &mut t.rows {
            for v in row.values.iter_mut().flatten() {
                *v = fmt_fixed(*v, dp).parse().expect("formatted float parses");
            }
        }
        t
    }

    pub fn cell(&self, labels: &[String], column: &str) -> Option<f64> {
        let c = self.value_columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|r| r.labels == labels)?.values[c]
    }
}

pub fn emit_tables(id: &TableId, format: TableFormat) -> Result<String> {
    let t = Table::build(id)?;
    Ok(match format {
        TableFormat::Csv => t.to_csv(),
        TableFormat::Json => t.to_json(),
    })
}

pub fn parse_table_csv(id: &TableId, text: &str) -> Result<Table> {
    let (label_columns, value_columns) = layout(id);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| FgnError::Parse("empty table".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let expected: Vec<String> = label_columns
        .iter()
        .chain(&value_columns)
        .cloned()
        .collect();
    if header != expected {
        return Err(FgnError::Parse(format!(
            "header {header:?} does not match {id}"
        )));
    }
    let nl = label_columns.len();
    let rows = lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != expected.len() {
                return Err(FgnError::Parse(format!(
                    "row {line:?} has {} cells",
                    cells.len()
                )));
            }
            let values = cells[nl..]
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse()
                            .map(Some)
                            .map_err(|_| FgnError::Parse(format!("bad number {c:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TableRow {
                labels: cells[..nl].iter().map(|s| s.to_string()).collect(),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        id: id.clone(),
        label_columns,
        value_columns,
        rows,
    })
}

pub fn parse_table_json(text: &str) -> Result<Table> {
    let doc: JsonTable = serde_json::from_str(text).map_err(|e| FgnError::Parse(e.to_string()))?;
    let id: TableId = doc.meta.table.parse()?;
    let width = doc.meta.value_columns.len();
    if doc.rows.iter().any(|r| r.values.len() != width) {
        return Err(FgnError::Parse(
            "row width does not match the header".into(),
        ));
    }
    Ok(Table {
        id,
        label_columns: doc.meta.label_columns,
        value_columns: doc.meta.value_columns,
        rows: doc.rows,
    })
}

/// The bundled transcription of a printed table.
pub fn golden_table(id: &TableId) -> Result<Table> {
    parse_table_csv(id, id.golden_source())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub row: String,
    pub column: String,
    pub expected: f64,
    pub got: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub table: String,
    pub checked: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares a computed table with its golden file cell by cell.
pub fn compare_tables(golden: &Table, computed: &Table) -> VerifyReport {
    let tolerance = golden.id.tolerance();
    let mut report = VerifyReport {
        table: golden.id.to_string(),
        checked: 0,
        tolerance,
        max_deviation: 0.0,
        mismatches: Vec::new(),
    };
    for row in &golden.rows {
        for (col, expected) in golden.value_columns.iter().zip(&row.values) {
            let Some(expected) = *expected else { continue };
            report.checked += 1;
            let got = computed.cell(&row.labels, col);
            let dev = got.map_or(f64::INFINITY, |g| (g - expected).abs());
            report.max_deviation = report.max_deviation.max(dev);
            if !(dev <= tolerance) {
                report.mismatches.push(Mismatch {
                    row: row.labels.join(" "),
                    column: col.clone(),
                    expected,
                    got,
                });
            }
        }
    }
    report
}

pub fn verify_table(id: &TableId) -> Result<VerifyReport> {
    Ok(compare_tables(&golden_table(id)?, &Table::build(id)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse_and_print() {
        for id in TableId::all() {
            assert_eq!(id.to_string().parse::<TableId>().unwrap(), id);
        }
        assert_eq!("q@0.60".parse::<TableId>().unwrap(), TableId::Q("0.6"));
        assert!("Q@0.65".parse::<TableId>().is_err());
        assert!("TABLE9".parse::<TableId>().is_err());
    }

    #[test]
    fn golden_files_parse() {
        for id in TableId::all() {
            let g = golden_table(&id).unwrap();
            let cells: usize = g
                .rows
                .iter()
                .map(|r| r.values.iter().flatten().count())
                .sum();
            let expected = match id {
                TableId::Q(_) => 55,
                TableId::Norms => 60,
                TableId::Roots => 8,
            };
            assert_eq!(cells, expected, "{id}");
        }
    }

    #[test]
    fn table_five_row() {
        let t = Table::build(&TableId::Q("0.9")).unwrap();
        let row = &t.rows[4];
        let expected = [0.385560, 0.020488, 0.031750, 0.019333, 0.025609];
        for (v, e) in row.values.iter().zip(expected) {
            assert!((v.unwrap() - e).abs() < 2e-6);
        }
        assert!(row.values[5].is_none());
        let report = compare_tables(&golden_table(&t.id).unwrap(), &t);
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.checked, 55);
    }

    #[test]
    fn round_trips() {
        let t = Table::build(&TableId::Q("0.7")).unwrap();
        let csv = t.to_csv();
        assert_eq!(parse_table_csv(&t.id, &csv).unwrap(), t.rounded());
        assert_eq!(parse_table_json(&t.to_json()).unwrap(), t);
        assert_eq!(Table::build(&t.id).unwrap().to_csv(), csv);
        assert!(csv.starts_with("n,1,2,3,4,5,6,7,8,9,10\n1,0.268776,,"));
    }

    #[test]
    fn mismatch_is_reported() {
        let g = golden_table(&TableId::Roots).unwrap();
        let mut c = g.clone();
        c.rows[0].values[0] = Some(0.99400);
        c.rows[1].values[0] = None;
        let r = compare_tables(&g, &c);
        assert_eq!(r.mismatches.len(), 2);
        assert_eq!(r.mismatches[0].row, "3");
        assert_eq!(r.mismatches[1].got, None);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_table_csv(&TableId::Roots, "n,value\n3,0.9\n").is_err());
        assert!(parse_table_csv(&TableId::Roots, "n,root\n3,abc\n").is_err());
        assert!(parse_table_json("{}").is_err());
    }
}
