//! Orders of groups written in the ATLAS-style notation of the subgroup
//! tables: `19^2:9`, `D_{38}\times 19:3`, `(2^3:7)\times 5`, `L_2(19)`, ...
//!
//! `G\times H`, `G:H` and `G.H` all have order `|G|·|H|`. `C_k` and a bare
//! `k` are cyclic, `D_{2k}` is dihedral of order `2k`, `A_k`/`S_k` are
//! alternating/symmetric, `J_1` is the first Janko group and `L_2(q)` is
//! `PSL(2,q)`. A trailing `~(\cong ...)` annotation is ignored.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label {label:?}, byte {pos}: {msg}")]
    Syntax { label: String, pos: usize, msg: String },
    #[error("label {label:?}: order overflows 64 bits")]
    Overflow { label: String },
}

pub const J1_LABEL_ORDER: u64 = 175_560;

/// Order of the group named by `label`.
pub fn label_order(label: &str) -> Result<u64, LabelError> {
    let cleaned = normalize(label);
    let mut p = Parser {
        s: cleaned.as_bytes(),
        i: 0,
        label,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

/// Strips `$`, `~(\cong ...)` annotations and turns `\times` into `*`.
fn normalize(label: &str) -> String {
    let mut s = label.replace('$', "");
    if let Some(k) = s.find("~(") {
        s.truncate(k);
    }
    s.replace("\\times", "*").trim().to_string()
}

/// Rough structural facts implied by a label, used to cross-check
/// computed fingerprints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelFacts {
    pub order: u64,
    /// Cyclic order if the label is a single cyclic group.
    pub cyclic: Option<u64>,
    /// No factor that is a nonabelian simple group.
    pub solvable: bool,
    /// A single nonabelian simple group.
    pub simple: bool,
}

pub fn label_facts(label: &str) -> Result<LabelFacts, LabelError> {
    let order = label_order(label)?;
    let n = normalize(label);
    let compact: String = n.chars().filter(|c| !c.is_whitespace()).collect();
    let cyclic = if let Some(rest) = compact.strip_prefix("C_") {
        rest.trim_matches(|c| c == '{' || c == '}').parse().ok()
    } else {
        compact.parse().ok()
    };
    let nonsolvable = ["J_1", "L_2", "A_5", "A_6", "A_7", "S_5", "S_6", "S_7"];
    let solvable = !nonsolvable.iter().any(|t| compact.contains(t));
    let simple = ["J_1", "A_5"].contains(&compact.as_str()) || (compact.starts_with("L_2(") && compact.ends_with(')'));
    Ok(LabelFacts {
        order,
        cyclic,
        solvable,
        simple,
    })
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    label: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> LabelError {
        LabelError::Syntax {
            label: self.label.to_string(),
            pos: self.i,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn mul(&self, a: u64, b: u64) -> Result<u64, LabelError> {
        a.checked_mul(b).ok_or(LabelError::Overflow {
            label: self.label.to_string(),
        })
    }

    fn expr(&mut self) -> Result<u64, LabelError> {
        let mut v = self.power()?;
        while let Some(c) = self.peek() {
            if c == b'*' || c == b':' || c == b'.' {
                self.i += 1;
                let r = self.power()?;
                v = self.mul(v, r)?;
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn power(&mut self) -> Result<u64, LabelError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let e = self.braced_int()?;
            let mut v = 1u64;
            for _ in 0..e {
                v = self.mul(v, base)?;
            }
            return Ok(v);
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<u64, LabelError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large"))
    }

    /// `k` or `{k}`.
    fn braced_int(&mut self) -> Result<u64, LabelError> {
        if self.peek() == Some(b'{') {
            self.i += 1;
            let v = self.int()?;
            if self.peek() != Some(b'}') {
                return Err(self.err("expected '}'"));
            }
            self.i += 1;
            Ok(v)
        } else {
            self.int()
        }
    }

    fn subscript(&mut self) -> Result<u64, LabelError> {
        if self.peek() != Some(b'_') {
            return Err(self.err("expected '_'"));
        }
        self.i += 1;
        self.braced_int()
    }

    fn atom(&mut self) -> Result<u64, LabelError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => self.int(),
            Some(c @ (b'C' | b'D' | b'A' | b'S' | b'J' | b'L')) => {
                self.i += 1;
                let k = self.subscript()?;
                match c {
                    b'C' | b'D' => Ok(k),
                    b'A' | b'S' => {
                        let mut f = 1u64;
                        for m in 2..=k {
                            f = self.mul(f, m)?;
                        }
                        Ok(if c == b'A' && k >= 2 { f / 2 } else { f })
                    }
                    b'J' if k == 1 => Ok(J1_LABEL_ORDER),
                    b'J' => Err(self.err("only J_1 is supported")),
                    _ => {
                        if k != 2 || self.peek() != Some(b'(') {
                            return Err(self.err("expected L_2(q)"));
                        }
                        self.i += 1;
                        let q = self.int()?;
                        if self.peek() != Some(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        self.i += 1;
                        let full = self.mul(self.mul(q, q - 1)?, q + 1)?;
                        Ok(if q % 2 == 1 { full / 2 } else { full })
                    }
                }
            }
            _ => Err(self.err("expected a group")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_table_labels() {
        let cases = [
            ("J_1", 175_560),
            ("L_2(19)", 3420),
            ("19^2:9", 3249),
            ("D_{38}\\times 19:3", 2166),
            ("$19\\times 11:10$", 2090),
            ("2^3\\times 19:9", 1368),
            ("19\\times A_5", 1140),
            ("2^2:(19:9)", 684),
            ("C_{95}\\times S_3", 570),
            ("(2^3:7)\\times 5", 280),
            ("(2^3:7)\\times3", 168),
            ("19:9~(\\cong 57.3)", 171),
            ("8:(7:3)", 168),
            ("C_{10}", 10),
            ("1", 1),
            ("A_5\\times L_2(19)", 205_200),
            ("D_{10}\\times J_1", 1_755_600),
            ("J_1\\times L_2(19)", 600_415_200),
            ("3^2\\times 2", 18),
            ("(7:3)\\times L_2(19)", 71_820),
            ("(2^2)\\times (19:9)", 684),
        ];
        for (label, order) in cases {
            assert_eq!(label_order(label).unwrap(), order, "{label}");
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        assert!(matches!(label_order("19 ^"), Err(LabelError::Syntax { pos: 4, .. })));
        assert!(matches!(label_order("(19"), Err(LabelError::Syntax { .. })));
        assert!(matches!(label_order("J_2"), Err(LabelError::Syntax { .. })));
        assert!(matches!(label_order("Q_8"), Err(LabelError::Syntax { pos: 0, .. })));
        assert!(matches!(label_order("2^{99}"), Err(LabelError::Overflow { .. })));
    }

    #[test]
    fn facts() {
        let f = label_facts("C_{10}").unwrap();
        assert_eq!((f.cyclic, f.solvable, f.simple), (Some(10), true, false));
        let f = label_facts("J_1").unwrap();
        assert!(f.simple && !f.solvable);
        let f = label_facts("19\\times A_5").unwrap();
        assert!(!f.simple && !f.solvable);
        assert_eq!(label_facts("19").unwrap().cyclic, Some(19));
        assert_eq!(label_facts("19:3").unwrap().cyclic, None);
    }
}
