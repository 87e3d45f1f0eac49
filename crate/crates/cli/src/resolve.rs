//! Subgroup references on the command line: `table1:<row>`,
//! `builtin:<name>` or a path to a file of generator words.

use std::path::Path;

use thiserror::Error;
use w535::semisparse::{builtin, table1_catalog, v_words, SubgroupSpec};
use w535::word::WordError;
use w535::Alphabet;

#[derive(Error, Debug)]
pub enum ResolveError {
    #[error("no table 1 row {0:?}")]
    Row(String),
    #[error("unknown builtin subgroup {0:?} (known: {known})", known = BUILTINS.join(", "))]
    Builtin(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}, line {line}: {source}")]
    Word { path: String, line: usize, source: WordError },
}

pub const BUILTINS: [&str; 10] = ["trivial", "omega", "nu", "nu2", "nu3", "l2-order3", "s0", "s1", "s2", "s3"];

/// Census row numbers of the builtin subgroups that appear in the tables.
pub const BUILTIN_ROWS: [(&str, u32); 5] = [
    ("l2-order3", 141),
    ("nu2", 142),
    ("omega", 143),
    ("nu3", 144),
    ("trivial", 145),
];

pub fn resolve(reference: &str) -> Result<SubgroupSpec, ResolveError> {
    if let Some(row) = reference.strip_prefix("table1:") {
        return table1_catalog()
            .into_iter()
            .find(|s| s.id == row)
            .ok_or_else(|| ResolveError::Row(row.to_string()));
    }
    if let Some(name) = reference.strip_prefix("builtin:") {
        return builtin(name).ok_or_else(|| ResolveError::Builtin(name.to_string()));
    }
    let path = Path::new(reference);
    let text = std::fs::read_to_string(path).map_err(|source| ResolveError::Io {
        path: reference.to_string(),
        source,
    })?;
    parse_word_file(reference, &text)
}

/// One generator per line, in `s0..s3` or in `v1..v6`; `#` starts a comment.
pub fn parse_word_file(name: &str, text: &str) -> Result<SubgroupSpec, ResolveError> {
    let s = Alphabet::s_alphabet();
    let v = Alphabet::v_alphabet();
    let table = v_words();
    let mut words = Vec::new();
    let mut source = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let cleaned = line.replace("v_", "v");
        let parsed = if cleaned.contains('v') {
            v.parse(&cleaned).map(|w| table.to_s(&w))
        } else {
            s.parse(&cleaned)
        };
        let w = parsed.map_err(|source| ResolveError::Word {
            path: name.to_string(),
            line: i + 1,
            source,
        })?;
        words.push(w.reduce(&s));
        source.push(line.to_string());
    }
    let mut spec = SubgroupSpec::from_s_words(name, words);
    spec.source = source;
    Ok(spec)
}

/// Table 1 rows listed under a different number in the census tables.
/// Row 58 generates a `5 x D14` with facets `D^71136 H^684`, which is census
/// row 63; census row 58 is a `2^2 x 19`.
pub const TABLE1_CENSUS_OVERRIDES: [(&str, u32); 1] = [("58", 63)];

/// Census row of a Table 1 row.
pub fn table1_census_row(id: &str) -> Option<u32> {
    match TABLE1_CENSUS_OVERRIDES.iter().find(|(k, _)| *k == id) {
        Some(&(_, row)) => Some(row),
        None => id.parse().ok(),
    }
}

/// The census row a resolved subgroup corresponds to, if any.
pub fn census_row(spec: &SubgroupSpec) -> Option<u32> {
    if let Some(&(_, row)) = BUILTIN_ROWS.iter().find(|(n, _)| *n == spec.id) {
        return Some(row);
    }
    if spec.label.is_some() {
        return table1_census_row(&spec.id);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn references() {
        let r = resolve("table1:2").unwrap();
        assert_eq!(r.expected_order, Some(3420));
        assert_eq!(census_row(&r), Some(2));
        let b = resolve("builtin:omega").unwrap();
        assert_eq!(census_row(&b), Some(143));
        assert_eq!(census_row(&resolve("builtin:nu").unwrap()), None);
        assert!(matches!(resolve("table1:31"), Err(ResolveError::Row(_))));
        assert!(matches!(resolve("builtin:nope"), Err(ResolveError::Builtin(_))));
        assert!(matches!(resolve("/nonexistent/words"), Err(ResolveError::Io { .. })));
    }

    #[test]
    fn table1_rows_land_on_census_rows_of_the_same_order() {
        let t = crate::expected::ExpectedTables::bundled();
        for spec in table1_catalog() {
            let row = census_row(&spec).unwrap();
            let c = t.census_row(row).unwrap();
            assert_eq!(Some(c.order), spec.expected_order, "table 1 row {} -> census row {row}", spec.id);
        }
        assert_eq!(table1_census_row("58"), Some(63));
    }

    #[test]
    fn word_files_accept_both_alphabets() {
        let a = parse_word_file("f", "# omega\n(s0 s1 s2)^5\n").unwrap();
        let b = parse_word_file("f", "v_1 s3\n").err();
        assert!(b.is_some(), "mixed alphabets are rejected");
        let c = parse_word_file("f", "v_1^2\n").unwrap();
        assert_eq!(a.words.len(), 1);
        assert_eq!(c.words.len(), 1);
        match parse_word_file("f", "s0\ns9\n") {
            Err(ResolveError::Word { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
