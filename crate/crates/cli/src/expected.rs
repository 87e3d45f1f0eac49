//! Bundled expected values for the subgroup tables.
//!
//! One CSV row per table entry. Table 1 rows carry only a label and order;
//! rows of Tables 2 to 4 also carry the facet split `(d, h)`, the normalizer
//! quotient and the row numbers of their maximal semisparse subgroups. Row
//! numbers are global: Table 1 row `k` describes the same subgroup as row `k`
//! of whichever later table lists it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use w535::labels::label_order;

pub const EXPECTED_CSV: &str = include_str!("../data/expected_tables.csv");

/// Number of facets of the universal polytope: `d·|N| + h·|N|/2` for every
/// quotient.
pub const FACET_TOTAL: u64 = 5_003_460;

const HEADER: [&str; 10] = ["table", "row", "label", "order", "d", "h", "aut_label", "aut_order", "subgroups", "note"];

#[derive(Error, Debug)]
pub enum ExpectedError {
    #[error("line {line}: {msg}")]
    Schema { line: u64, msg: String },
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub table: u8,
    pub row: u32,
    pub label: String,
    pub order: u64,
    pub d: Option<u64>,
    pub h: Option<u64>,
    pub aut_label: Option<String>,
    pub aut_order: Option<u64>,
    pub subgroups: Vec<u32>,
    pub note: Option<String>,
}

impl ExpectedRow {
    pub fn key(&self) -> (u8, u32) {
        (self.table, self.row)
    }

    pub fn facets(&self) -> Option<u64> {
        Some(self.d? + self.h?)
    }
}

#[derive(Deserialize)]
struct RawRow {
    table: u8,
    row: u32,
    label: String,
    order: u64,
    d: Option<u64>,
    h: Option<u64>,
    aut_label: Option<String>,
    aut_order: Option<u64>,
    subgroups: Option<String>,
    note: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ExpectedTables {
    rows: BTreeMap<(u8, u32), ExpectedRow>,
}

impl ExpectedTables {
    pub fn bundled() -> Self {
        parse_expected(EXPECTED_CSV).expect("bundled expected table is valid")
    }

    pub fn rows(&self) -> impl Iterator<Item = &ExpectedRow> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, table: u8, row: u32) -> Option<&ExpectedRow> {
        self.rows.get(&(table, row))
    }

    pub fn table(&self, table: u8) -> impl Iterator<Item = &ExpectedRow> {
        self.rows.range((table, 0)..=(table, u32::MAX)).map(|(_, r)| r)
    }

    /// The census row (Tables 2 to 4) with global number `row`.
    pub fn census_row(&self, row: u32) -> Option<&ExpectedRow> {
        (2..=4).find_map(|t| self.get(t, row))
    }
}

fn none_if_empty(s: Option<String>) -> Option<String> {
    s.filter(|s| !s.trim().is_empty())
}

/// Parses and validates an expected-values CSV.
pub fn parse_expected(text: &str) -> Result<ExpectedTables, ExpectedError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| ExpectedError::Csv { line: 1, source: e })?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(ExpectedError::Schema {
            line: 1,
            msg: format!("header must be {}", HEADER.join(",")),
        });
    }
    let mut rows = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ExpectedError::Csv { line, source: e }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let schema = |msg: String| ExpectedError::Schema { line, msg };
        let raw: RawRow = rec.deserialize(Some(&header)).map_err(|e| schema(e.to_string()))?;
        if !(1..=4).contains(&raw.table) {
            return Err(schema(format!("table {} out of range 1..=4", raw.table)));
        }
        if raw.row == 0 || raw.order == 0 {
            return Err(schema("row and order must be positive".into()));
        }
        let computed = label_order(&raw.label).map_err(|e| schema(e.to_string()))?;
        let note = none_if_empty(raw.note);
        if computed != raw.order && note.is_none() {
            return Err(schema(format!(
                "label {:?} has order {computed} but the row records {} without a note",
                raw.label, raw.order
            )));
        }
        let subgroups = raw
            .subgroups
            .unwrap_or_default()
            .split_whitespace()
            .map(|s| s.parse::<u32>().map_err(|_| schema(format!("bad subgroup reference {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let aut_label = none_if_empty(raw.aut_label);
        if raw.table >= 2 {
            let (Some(d), Some(h), Some(aut)) = (raw.d, raw.h, raw.aut_order) else {
                return Err(schema("census rows need d, h and aut_order".into()));
            };
            if raw.order % 2 == 1 && h > 0 {
                return Err(schema("odd order with hemi-dodecahedral facets".into()));
            }
            if d * raw.order + h * (raw.order / 2) != FACET_TOTAL {
                return Err(schema(format!(
                    "d·|N| + h·|N|/2 = {} (expected {FACET_TOTAL})",
                    d * raw.order + h * (raw.order / 2)
                )));
            }
            if aut == 0 {
                return Err(schema("aut_order must be positive".into()));
            }
            if let Some(al) = &aut_label {
                let a = label_order(al).map_err(|e| schema(e.to_string()))?;
                if a != aut {
                    return Err(schema(format!("aut label {al:?} has order {a}, row records {aut}")));
                }
            }
        } else if raw.d.is_some() || raw.h.is_some() || raw.aut_order.is_some() {
            return Err(schema("table 1 rows carry no census data".into()));
        }
        let row = ExpectedRow {
            table: raw.table,
            row: raw.row,
            label: raw.label,
            order: raw.order,
            d: raw.d,
            h: raw.h,
            aut_label,
            aut_order: raw.aut_order,
            subgroups,
            note,
        };
        if rows.insert(row.key(), row).is_some() {
            return Err(schema(format!("duplicate row key (table {}, row {})", raw.table, raw.row)));
        }
    }
    let census: BTreeSet<u32> = rows.keys().filter(|k| k.0 >= 2).map(|k| k.1).collect();
    let census_count = rows.keys().filter(|k| k.0 >= 2).count();
    if census.len() != census_count {
        return Err(ExpectedError::Schema {
            line: 0,
            msg: "a row number appears in more than one of tables 2 to 4".into(),
        });
    }
    Ok(ExpectedTables { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "table,row,label,order,d,h,aut_label,aut_order,subgroups,note\n";

    #[test]
    fn bundled_table_shape() {
        let t = ExpectedTables::bundled();
        assert_eq!(t.table(1).count(), 30);
        assert_eq!((2..=4).map(|k| t.table(k).count()).sum::<usize>(), 145);
        let r = t.census_row(143).unwrap();
        assert_eq!((r.d, r.h, r.aut_order), (Some(2_500_020), Some(3420), Some(205_200)));
        let r = t.census_row(145).unwrap();
        assert_eq!((r.facets(), r.aut_order), (Some(5_003_460), Some(600_415_200)));
        for k in t.table(1) {
            assert!(t.census_row(k.row).is_some(), "table 1 row {} has no census row", k.row);
        }
    }

    #[test]
    fn duplicate_key_is_a_schema_error() {
        let text = format!("{HEAD}1,1,J_1,175560,,,,,,\n1,1,J_1,175560,,,,,,\n");
        match parse_expected(&text) {
            Err(ExpectedError::Schema { line: 3, msg }) => assert!(msg.contains("duplicate")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conservation_violation_is_reported_with_line() {
        let text = format!("{HEAD}4,143,2,2,2500020,3421,A_5\\times L_2(19),205200,,\n");
        assert!(matches!(parse_expected(&text), Err(ExpectedError::Schema { line: 2, .. })));
    }

    #[test]
    fn bad_header_and_bad_numbers() {
        assert!(matches!(parse_expected("a,b\n"), Err(ExpectedError::Schema { line: 1, .. })));
        let text = format!("{HEAD}1,x,J_1,175560,,,,,,\n");
        assert!(matches!(parse_expected(&text), Err(ExpectedError::Schema { line: 2, .. })));
        let text = format!("{HEAD}1,1,J_1,99,,,,,,\n");
        assert!(matches!(parse_expected(&text), Err(ExpectedError::Schema { line: 2, .. })));
    }
}
