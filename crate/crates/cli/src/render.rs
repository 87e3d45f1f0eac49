//! JSON is the canonical output; CSV and text are renderings of it.

use std::fmt::Write as _;

use serde::Serialize;

use crate::compare::Diff;
use crate::config::Format;
use crate::pipeline::Report;

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `[STATUS] n name: failing measures or notes`, one line per check.
pub fn check_lines(report: &Report) -> Vec<String> {
    report
        .checks
        .iter()
        .map(|c| {
            let detail: Vec<String> = c
                .failed_measures()
                .map(|m| format!("{} = {} (expected {})", m.name, m.computed, m.expected))
                .collect();
            let detail = if detail.is_empty() {
                c.measures.len().to_string() + " measures ok"
            } else {
                detail.join("; ")
            };
            format!("[{}] {:>2} {}: {}", c.status.as_str(), c.number, c.check, detail)
        })
        .collect()
}

pub fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Text => {
            let mut s = String::new();
            for (line, c) in check_lines(report).iter().zip(&report.checks) {
                writeln!(s, "{line}").unwrap();
                for n in &c.notes {
                    writeln!(s, "       {n}").unwrap();
                }
            }
            let m = &report.summary;
            writeln!(
                s,
                "pass {} fail {} skip {} not-reproducible {}",
                m.pass, m.fail, m.skip, m.not_reproducible
            )
            .unwrap();
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "name", "measure", "computed", "expected", "ok", "status"]).unwrap();
            for c in &report.checks {
                let status = c.status.as_str();
                if c.measures.is_empty() {
                    w.write_record([&c.number.to_string(), c.check.name(), "", "", "", "", status]).unwrap();
                }
                for m in &c.measures {
                    w.write_record([
                        &c.number.to_string(),
                        c.check.name(),
                        &m.name,
                        &m.computed.to_string(),
                        &m.expected.to_string(),
                        &m.ok.to_string(),
                        status,
                    ])
                    .unwrap();
                }
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
    }
}

pub fn render_diff(diff: &Diff, format: Format) -> String {
    match format {
        Format::Json => to_json(diff),
        Format::Text | Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .delimiter(if format == Format::Csv { b',' } else { b'\t' })
                .from_writer(Vec::new());
            w.write_record(["table", "row", "subgroup", "status", "differences"]).unwrap();
            for r in &diff.rows {
                let diffs: Vec<String> = r
                    .differences
                    .iter()
                    .map(|d| format!("{}: {} vs {}", d.field, d.computed, d.expected))
                    .collect();
                w.write_record([
                    r.table.map(|t| t.to_string()).unwrap_or_default(),
                    r.row.to_string(),
                    r.subgroup.clone(),
                    format!("{:?}", r.status).to_lowercase(),
                    diffs.join("; "),
                ])
                .unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
    }
}
