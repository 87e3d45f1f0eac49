//! Words over a named alphabet and their evaluation as permutations.
//!
//! Text syntax: whitespace-separated generator names, each optionally followed
//! (with no intervening space) by `^k` or `^-k`; parenthesised sub-words may
//! carry an exponent the same way, e.g. `(s0 s1 s2)^5 s3` or `v1^2 (v2 v1)^2`.
//! A lone `1` denotes the empty word.

use std::fmt;

use thiserror::Error;

use crate::perm::{PermError, Permutation};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator {name:?} at byte {pos}")]
    UnknownGenerator { name: String, pos: usize },
}

/// Generator names plus a flag per generator saying whether it is known to be
/// an involution. Inverses of involutions are normalised away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    involutory: Vec<bool>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, involutory: Vec<bool>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        assert_eq!(names.len(), involutory.len());
        Alphabet { names, involutory }
    }

    /// `s0 .. s{n-1}`, all involutions.
    pub fn involutions(prefix: &str, n: usize) -> Self {
        Alphabet::new((0..n).map(|i| format!("{prefix}{i}")), vec![true; n])
    }

    /// `s0 s1 s2 s3`.
    pub fn s_alphabet() -> Self {
        Self::involutions("s", 4)
    }

    /// `v1 .. v6` with explicit inverses.
    pub fn v_alphabet() -> Self {
        Alphabet::new((1..=6).map(|i| format!("v{i}")), vec![false; 6])
    }

    /// `x y` with explicit inverses.
    pub fn xy_alphabet() -> Self {
        Alphabet::new(["x", "y"], vec![false; 2])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_involutory(&self, gen: usize) -> bool {
        self.involutory[gen]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
            alphabet: self,
        }
        .parse_all()
    }
}

/// One letter: a generator index and whether it is inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    /// Word of non-inverted generators, e.g. `Word::gens(&[0, 1, 2])`.
    pub fn gens(gens: &[usize]) -> Self {
        Word {
            letters: gens.iter().map(|&g| Letter::new(g)).collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word { letters }
    }

    /// Replaces inverses of involutory generators by the generators
    /// themselves, then cancels adjacent `g g^-1` pairs.
    pub fn reduce(&self, alphabet: &Alphabet) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.letters {
            let l = if alphabet.is_involutory(l.gen) {
                Letter::new(l.gen)
            } else {
                l
            };
            match out.last() {
                Some(&top) if top.gen == l.gen && (top.inverse != l.inverse || alphabet.is_involutory(l.gen)) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }

    /// Substitutes `images[g]` for every generator `g`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut letters = Vec::new();
        for l in &self.letters {
            let w = &images[l.gen];
            if l.inverse {
                letters.extend(w.inverse().letters);
            } else {
                letters.extend_from_slice(&w.letters);
            }
        }
        Word { letters }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.word.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.alphabet.name(l.gen))?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> WordError {
        WordError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn parse_all(mut self) -> Result<Word, WordError> {
        let w = self.parse_seq()?;
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(self.err(format!("unexpected {:?}", self.bytes[self.pos] as char)));
        }
        Ok(w)
    }

    fn parse_seq(&mut self) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                None | Some(b')') => break,
                Some(b'^') => return Err(self.err("exponent must follow a generator or ')' directly")),
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.parse_seq()?;
                    if self.bytes.get(self.pos) != Some(&b')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    let k = self.parse_exponent()?;
                    letters.extend(inner.pow(k).letters);
                }
                Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric()
                            || matches!(self.bytes[self.pos], b'_' | b'\''))
                    {
                        self.pos += 1;
                    }
                    let name = &self.text[start..self.pos];
                    let gen = self
                        .alphabet
                        .index_of(name)
                        .ok_or_else(|| WordError::UnknownGenerator {
                            name: name.to_string(),
                            pos: start,
                        })?;
                    let k = self.parse_exponent()?;
                    letters.extend(Word::gens(&[gen]).pow(k).letters);
                }
                Some(b'1') => {
                    self.pos += 1;
                    if self.bytes.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                        return Err(self.err("unexpected character after identity '1'"));
                    }
                }
                Some(&c) => return Err(self.err(format!("unexpected {:?}", c as char))),
            }
        }
        Ok(Word { letters })
    }

    fn parse_exponent(&mut self) -> Result<i64, WordError> {
        if self.bytes.get(self.pos) != Some(&b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| WordError::Syntax {
                pos: start,
                msg: "expected integer exponent".into(),
            })
    }
}

/// Permutations assigned to the generators of an alphabet, all of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorAssignment {
    perms: Vec<Permutation>,
    inverses: Vec<Permutation>,
    degree: usize,
}

impl GeneratorAssignment {
    pub fn new(perms: Vec<Permutation>) -> Result<Self, PermError> {
        let degree = perms.first().map_or(0, |p| p.degree());
        if let Some(bad) = perms.iter().find(|p| p.degree() != degree) {
            return Err(PermError::DegreeMismatch {
                left: degree,
                right: bad.degree(),
            });
        }
        let inverses = perms.iter().map(|p| p.inverse()).collect();
        Ok(GeneratorAssignment {
            perms,
            inverses,
            degree,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn get(&self, gen: usize) -> &Permutation {
        &self.perms[gen]
    }

    /// Product of the assigned permutations in word order.
    pub fn evaluate(&self, word: &Word) -> Result<Permutation, PermError> {
        let mut images: Vec<u32> = (0..self.degree as u32).collect();
        for l in word.letters() {
            let g = if l.inverse {
                self.inverses.get(l.gen)
            } else {
                self.perms.get(l.gen)
            }
            .ok_or(PermError::Unassigned(l.gen))?;
            let g = g.images();
            for p in images.iter_mut() {
                *p = g[*p as usize];
            }
        }
        Ok(Permutation::from_images_unchecked(images))
    }

    /// Image of a single 0-based point under a word.
    pub fn trace_point(&self, word: &Word, mut point: u32) -> u32 {
        for l in word.letters() {
            point = if l.inverse {
                self.inverses[l.gen].image(point)
            } else {
                self.perms[l.gen].image(point)
            };
        }
        point
    }
}

/// Convenience wrapper around [`GeneratorAssignment::evaluate`].
pub fn evaluate_word(word: &Word, assignment: &GeneratorAssignment) -> Result<Permutation, PermError> {
    assignment.evaluate(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_powers_and_groups() {
        let s = Alphabet::s_alphabet();
        let w = s.parse("(s0 s1 s2)^5 s3").unwrap();
        assert_eq!(w.len(), 16);
        assert_eq!(w.letters()[15], Letter::new(3));
        let v = Alphabet::v_alphabet();
        let w = v.parse("v1^2 (v2 v1)^2 v3^-1").unwrap();
        assert_eq!(w.len(), 7);
        assert!(w.letters()[6].inverse);
        assert_eq!(s.parse("1").unwrap(), Word::empty());
        assert_eq!(s.parse("  ").unwrap(), Word::empty());
    }

    #[test]
    fn detached_exponent_is_rejected() {
        let s = Alphabet::s_alphabet();
        assert!(matches!(s.parse("s0 s1 s2 ^5"), Err(WordError::Syntax { pos: 9, .. })));
        assert!(s.parse("(s0 s1 s2)^5").is_ok());
        assert!(matches!(s.parse("s0 s7"), Err(WordError::UnknownGenerator { pos: 3, .. })));
        assert!(matches!(s.parse("(s0 s1"), Err(WordError::Syntax { .. })));
        assert!(matches!(s.parse("s0)"), Err(WordError::Syntax { pos: 2, .. })));
        assert!(s.parse("s0s1").is_err());
    }

    #[test]
    fn involutory_inverses_are_normalised() {
        let s = Alphabet::s_alphabet();
        let w = s.parse("s0^-1 s1 s1 s2").unwrap().reduce(&s);
        assert_eq!(w, Word::gens(&[0, 2]));
        let xy = Alphabet::xy_alphabet();
        let w = xy.parse("x y y^-1 x^-1 y").unwrap().reduce(&xy);
        assert_eq!(w, Word::gens(&[1]));
        let w = xy.parse("x x").unwrap().reduce(&xy);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn evaluation_is_left_to_right() {
        let a = Permutation::parse_cycles("(1,2)", 3).unwrap();
        let b = Permutation::parse_cycles("(2,3)", 3).unwrap();
        let asg = GeneratorAssignment::new(vec![a, b]).unwrap();
        let w = Alphabet::involutions("t", 2).parse("t0 t1").unwrap();
        assert_eq!(asg.evaluate(&w).unwrap().to_string(), "(1,3,2)");
        assert_eq!(asg.trace_point(&w, 0), 2);
        assert!(asg.evaluate(&Word::empty()).unwrap().is_identity());
        assert_eq!(asg.evaluate(&Word::gens(&[5])), Err(PermError::Unassigned(5)));
    }

    #[test]
    fn assignment_rejects_mixed_degrees() {
        let r = GeneratorAssignment::new(vec![Permutation::identity(3), Permutation::identity(4)]);
        assert_eq!(r, Err(PermError::DegreeMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn substitution_expands_inverses() {
        let xy = Alphabet::xy_alphabet();
        let images = vec![xy.parse("x y").unwrap(), xy.parse("y").unwrap()];
        let w = xy.parse("x^-1 y").unwrap().substitute(&images);
        assert_eq!(w.display(&xy).to_string(), "y^-1 x^-1 y");
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..30).prop_map(|v| {
            Word::from_letters(v.into_iter().map(|(gen, inverse)| Letter { gen, inverse }).collect())
        })
    }

    proptest! {
        #[test]
        fn reduction_preserves_value(w in arb_word()) {
            let alphabet = Alphabet::new(["a", "b", "c"], vec![false, true, false]);
            let asg = GeneratorAssignment::new(vec![
                Permutation::parse_cycles("(1,2,3,4,5)", 6).unwrap(),
                Permutation::parse_cycles("(1,6)(2,3)", 6).unwrap(),
                Permutation::parse_cycles("(2,4,6)", 6).unwrap(),
            ]).unwrap();
            let r = w.reduce(&alphabet);
            prop_assert_eq!(asg.evaluate(&w).unwrap(), asg.evaluate(&r).unwrap());
            prop_assert_eq!(r.reduce(&alphabet), r.clone());
            let text = r.display(&alphabet).to_string();
            prop_assert_eq!(alphabet.parse(&text).unwrap(), r);
            prop_assert!(asg.evaluate(&w.concat(&w.inverse())).unwrap().is_identity());
        }
    }
}
