//! Finitely presented groups and their text format.
//!
//! ```text
//! # comment
//! generators: s0 s1 s2 s3
//! involutions: s0 s1 s2 s3
//! (s0 s1)^5
//! (s1 s2)^3
//! ```
//!
//! The `involutions:` line is optional. Every other non-comment line is one
//! relator in word syntax. Declared involutions get `g^2 = 1` implicitly.

use thiserror::Error;

use crate::word::{Alphabet, Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}: {source}")]
    Word { line: usize, source: WordError },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    name: String,
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Relators are freely reduced; ones that reduce to the empty word are
    /// dropped.
    pub fn new(name: impl Into<String>, alphabet: Alphabet, relators: Vec<Word>) -> Self {
        let relators = relators
            .into_iter()
            .map(|r| r.reduce(&alphabet))
            .filter(|r| !r.is_empty())
            .collect();
        Presentation {
            name: name.into(),
            alphabet,
            relators,
        }
    }

    pub fn parse(name: &str, text: &str) -> Result<Self, PresentationError> {
        let mut names: Option<Vec<String>> = None;
        let mut invols: Vec<String> = Vec::new();
        let mut relator_lines: Vec<(usize, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generators:") {
                if names.is_some() {
                    return Err(PresentationError::Format {
                        line: line_no,
                        msg: "duplicate generators line".into(),
                    });
                }
                names = Some(rest.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = line.strip_prefix("involutions:") {
                invols.extend(rest.split_whitespace().map(str::to_string));
            } else {
                if names.is_none() {
                    return Err(PresentationError::Format {
                        line: line_no,
                        msg: "relator before the generators line".into(),
                    });
                }
                relator_lines.push((line_no, line));
            }
        }
        let names = names.ok_or(PresentationError::Format {
            line: 0,
            msg: "missing generators line".into(),
        })?;
        let mut flags = vec![false; names.len()];
        for inv in &invols {
            let k = names.iter().position(|n| n == inv).ok_or_else(|| PresentationError::Format {
                line: 0,
                msg: format!("involution {inv:?} is not a generator"),
            })?;
            flags[k] = true;
        }
        let alphabet = Alphabet::new(names, flags);
        let relators = relator_lines
            .into_iter()
            .map(|(line, text)| alphabet.parse(text).map_err(|source| PresentationError::Word { line, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation::new(name, alphabet, relators))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    /// Same generators with extra relators appended.
    pub fn with_relators(&self, name: &str, extra: &[Word]) -> Presentation {
        let mut rels = self.relators.clone();
        rels.extend_from_slice(extra);
        Presentation::new(name, self.alphabet.clone(), rels)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\ngenerators: {}\n", self.name, self.alphabet.names().join(" "));
        let invols: Vec<&str> = (0..self.alphabet.len())
            .filter(|&g| self.alphabet.is_involutory(g))
            .map(|g| self.alphabet.name(g))
            .collect();
        if !invols.is_empty() {
            out.push_str(&format!("involutions: {}\n", invols.join(" ")));
        }
        for r in &self.relators {
            out.push_str(&format!("{}\n", r.display(&self.alphabet)));
        }
        out
    }
}

/// One word per non-comment line; an empty file is the trivial subgroup.
pub fn parse_word_list(alphabet: &Alphabet, text: &str) -> Result<Vec<Word>, PresentationError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap().trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .map(|(line, t)| alphabet.parse(t).map_err(|source| PresentationError::Word { line, source }))
        .collect()
}

pub mod bundled {
    //! Presentations shipped with the crate.
    use super::Presentation;

    pub const W_TEXT: &str = include_str!("../data/presentations/w.pres");
    pub const W_PRIME_TEXT: &str = include_str!("../data/presentations/w_prime.pres");
    pub const W_DOUBLE_PRIME_TEXT: &str = include_str!("../data/presentations/w_doubleprime.pres");
    pub const L_TEXT: &str = include_str!("../data/presentations/l.pres");
    /// The three generators of the index-20 subgroup, as words in `s0..s3`.
    pub const L_SUBGROUP_TEXT: &str = include_str!("../data/presentations/l_subgroup.words");

    /// `[5,3,5]` plus `(s1 s2 s3)^5`.
    pub fn w() -> Presentation {
        Presentation::parse("W", W_TEXT).expect("bundled W presentation")
    }

    /// The J1 quotient.
    pub fn w_prime() -> Presentation {
        Presentation::parse("W'", W_PRIME_TEXT).expect("bundled W' presentation")
    }

    /// The L2(19) quotient.
    pub fn w_double_prime() -> Presentation {
        Presentation::parse("W''", W_DOUBLE_PRIME_TEXT).expect("bundled W'' presentation")
    }

    /// Two-generator presentation of the index-20 subgroup.
    pub fn l() -> Presentation {
        Presentation::parse("L", L_TEXT).expect("bundled L presentation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bundled_w() {
        let w = bundled::w();
        assert_eq!(w.generator_count(), 4);
        assert!((0..4).all(|g| w.alphabet().is_involutory(g)));
        assert_eq!(w.relators().len(), 7);
        let wp = bundled::w_prime();
        assert_eq!(wp.relators().len(), 8);
        assert_eq!(wp.relators()[7].len(), 48);
        let wpp = bundled::w_double_prime();
        assert_eq!(wpp.relators().len(), 8);
        let l = bundled::l();
        assert!(!l.alphabet().is_involutory(0));
        assert_eq!(l.relators().len(), 2);
    }

    #[test]
    fn text_round_trip() {
        let w = bundled::w_prime();
        let back = Presentation::parse("W'", &w.to_text()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn format_errors() {
        assert!(matches!(
            Presentation::parse("x", "a b\n"),
            Err(PresentationError::Format { line: 1, .. })
        ));
        assert!(matches!(
            Presentation::parse("x", "generators: a\nb^2\n"),
            Err(PresentationError::Word { line: 2, .. })
        ));
        assert!(Presentation::parse("x", "generators: a\ninvolutions: b\n").is_err());
        let p = Presentation::parse("x", "generators: a\ninvolutions: a\na a\n").unwrap();
        assert!(p.relators().is_empty());
    }

    #[test]
    fn word_lists() {
        let s = crate::word::Alphabet::s_alphabet();
        let ws = parse_word_list(&s, bundled::L_SUBGROUP_TEXT).unwrap();
        assert_eq!(ws.len(), 3);
        assert_eq!(ws[0], s.parse("s2 s1").unwrap());
        assert!(parse_word_list(&s, "# nothing\n\n").unwrap().is_empty());
    }
}
