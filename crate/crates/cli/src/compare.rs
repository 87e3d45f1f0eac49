//! Diffs computed census rows against the expected tables.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use w535::census::QuotientReport;

use crate::expected::ExpectedTables;

/// One computed census row, keyed by its global row number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub row: u32,
    pub subgroup: String,
    pub order: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugates: Option<u64>,
}

impl CensusRecord {
    pub fn from_report(row: u32, q: &QuotientReport) -> Self {
        let conjugates = match q.aut {
            Some(w535::census::AutResult::Computed { conjugates, .. }) => Some(conjugates),
            _ => None,
        };
        CensusRecord {
            row,
            subgroup: q.subgroup.clone(),
            order: q.order,
            d: Some(q.d),
            h: Some(q.h),
            aut_order: q.aut_order(),
            conjugates,
        }
    }

    /// Fills fields missing here from `other`.
    pub fn merge(&mut self, other: &CensusRecord) {
        self.d = self.d.or(other.d);
        self.h = self.h.or(other.h);
        self.aut_order = self.aut_order.or(other.aut_order);
        self.conjugates = self.conjugates.or(other.conjugates);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Match,
    Mismatch,
    Missing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDiff {
    pub field: &'static str,
    pub computed: Value,
    pub expected: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowDiff {
    pub table: Option<u8>,
    pub row: u32,
    pub subgroup: String,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub differences: Vec<FieldDiff>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffSummary {
    pub matched: usize,
    pub mismatched: usize,
    pub missing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diff {
    pub rows: Vec<RowDiff>,
    pub summary: DiffSummary,
}

impl Diff {
    pub fn all_match(&self) -> bool {
        self.summary.mismatched == 0 && self.summary.missing == 0
    }
}

/// Compares each record with the census row of the same number. Fields
/// absent from a record are not compared. Rows with no expected entry are
/// `missing`. Output is sorted by table, then row.
pub fn compare(records: &[CensusRecord], expected: &ExpectedTables) -> Diff {
    let mut rows = Vec::with_capacity(records.len());
    let mut summary = DiffSummary::default();
    for rec in records {
        let Some(exp) = expected.census_row(rec.row) else {
            summary.missing += 1;
            rows.push(RowDiff {
                table: None,
                row: rec.row,
                subgroup: rec.subgroup.clone(),
                status: RowStatus::Missing,
                differences: Vec::new(),
            });
            continue;
        };
        let mut differences = Vec::new();
        let mut field = |name: &'static str, computed: Option<u64>, expected: Option<u64>| {
            if let Some(c) = computed {
                if Some(c) != expected {
                    differences.push(FieldDiff {
                        field: name,
                        computed: json!(c),
                        expected: json!(expected),
                    });
                }
            }
        };
        field("order", Some(rec.order), Some(exp.order));
        field("d", rec.d, exp.d);
        field("h", rec.h, exp.h);
        field("aut_order", rec.aut_order, exp.aut_order);
        let status = if differences.is_empty() {
            summary.matched += 1;
            RowStatus::Match
        } else {
            summary.mismatched += 1;
            RowStatus::Mismatch
        };
        rows.push(RowDiff {
            table: Some(exp.table),
            row: rec.row,
            subgroup: rec.subgroup.clone(),
            status,
            differences,
        });
    }
    rows.sort_by_key(|r| (r.table.unwrap_or(u8::MAX), r.row));
    Diff { rows, summary }
}
