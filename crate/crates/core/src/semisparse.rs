//! Semisparse subgroups of `W`.
//!
//! A subgroup `N` is semisparse when no conjugate of `N` meets `H0·H3`
//! outside `{1, ω}`. Equivalently, no nontrivial `n ∈ N` is conjugate in `W`
//! to an element of `S = H0·H3 \ {1, ω}`. Since `W = J1 × L2(19)`, two
//! elements are conjugate exactly when their components are conjugate in
//! each factor, so the test reduces to a lookup of class pairs.

use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::labels::{label_facts, LabelError};
use crate::model::{nu_word, omega_word, Factor, Model};
use crate::perm::{lcm, Permutation};
use crate::stabchain::{StabError, StabilizerChain};
use crate::word::{Alphabet, Letter, Word, WordError};

pub const TABLE1_TEXT: &str = include_str!("../data/table1.txt");

/// Default cap on the number of elements enumerated per subgroup.
pub const ELEMENT_CAP: u128 = 1 << 20;

#[derive(Error, Debug)]
pub enum SemisparseError {
    #[error("table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("row {row}: {source}")]
    Word { row: String, source: WordError },
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error("v-word identity fails: {0}")]
    VWord(String),
    #[error("witness check failed: {0}")]
    Witness(String),
}

/// `v1..v6` as words in `s0..s3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VWordTable {
    words: Vec<Word>,
}

/// `v1 = (s0 s1 s2)^5 s3`, `v2 = v1 s2`, then `v3 = v2 s1`, `v4 = v3 s0`,
/// `v5 = v4 s1`, `v6 = v5 s0`.
pub fn v_words() -> VWordTable {
    let v1 = nu_word();
    let mut words = vec![v1];
    for g in [2, 1, 0, 1, 0] {
        let next = words.last().unwrap().concat(&Word::gens(&[g]));
        words.push(next);
    }
    VWordTable { words }
}

impl VWordTable {
    /// `v_i` for `i` in `1..=6`.
    pub fn v(&self, i: usize) -> &Word {
        &self.words[i - 1]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Rewrites a word over `v1..v6` into `s0..s3`.
    pub fn to_s(&self, w: &Word) -> Word {
        w.substitute(&self.words).reduce(&Alphabet::s_alphabet())
    }

    /// Checks `v6 = v5 s0 = v4 s1 s0 = v3 s0 s1 s0 = v2 (s1 s0)^2` as
    /// permutations.
    pub fn verify(&self, model: &Model) -> Result<(), SemisparseError> {
        let s = Alphabet::s_alphabet();
        let forms = [
            (5, "s0"),
            (4, "s1 s0"),
            (3, "s0 s1 s0"),
            (2, "(s1 s0)^2"),
        ];
        let v6 = model.evaluate(self.v(6));
        for (k, tail) in forms {
            let w = self.v(k).concat(&s.parse(tail).expect("fixed word"));
            if model.evaluate(&w) != v6 {
                return Err(SemisparseError::VWord(format!("v6 != v{k} {tail}")));
            }
        }
        let v1 = model.evaluate(&omega_word()).compose(&model.generators()[3]);
        if model.evaluate(self.v(1)) != v1 {
            return Err(SemisparseError::VWord("v1 != (s0 s1 s2)^5 s3".into()));
        }
        Ok(())
    }
}

/// A subgroup of `W` given by generator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub id: String,
    pub label: Option<String>,
    pub expected_order: Option<u64>,
    /// Generators as written in the source (v- or s-words).
    pub source: Vec<String>,
    /// Generators as words in `s0..s3`.
    pub words: Vec<Word>,
}

impl SubgroupSpec {
    pub fn from_s_words(id: &str, words: Vec<Word>) -> Self {
        let s = Alphabet::s_alphabet();
        SubgroupSpec {
            id: id.to_string(),
            label: None,
            expected_order: None,
            source: words.iter().map(|w| w.display(&s).to_string()).collect(),
            words,
        }
    }

    pub fn generators(&self, model: &Model) -> Vec<Permutation> {
        self.words.iter().map(|w| model.evaluate(w)).collect()
    }

    pub fn chain(&self, model: &Model) -> StabilizerChain {
        StabilizerChain::build(model.degree(), &self.generators(model))
    }

    /// Element codes in `W`, generators' codes first.
    pub fn codes(&self, model: &Model, cap: u128) -> Result<Vec<u32>, StabError> {
        let chain = self.chain(model);
        model.chain_codes(&chain, cap)
    }
}

/// Parses the `row | label | generators` table format.
pub fn parse_table1(text: &str) -> Result<Vec<SubgroupSpec>, SemisparseError> {
    let v = v_words();
    let valpha = Alphabet::v_alphabet();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(SemisparseError::Table {
                line: line_no,
                msg: "expected `row | label | generators`".into(),
            });
        }
        let row = parts[0];
        if row.parse::<u32>().is_err() || !seen.insert(row.to_string()) {
            return Err(SemisparseError::Table {
                line: line_no,
                msg: format!("bad or duplicate row number {row:?}"),
            });
        }
        let source: Vec<String> = parts[2].split(',').map(|g| g.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
        let words = source
            .iter()
            .map(|g| {
                valpha
                    .parse(&g.replace("v_", "v"))
                    .map(|w| v.to_s(&w))
                    .map_err(|source| SemisparseError::Word {
                        row: row.to_string(),
                        source,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(SubgroupSpec {
            id: row.to_string(),
            label: Some(parts[1].to_string()),
            expected_order: Some(label_facts(parts[1])?.order),
            source,
            words,
        });
    }
    Ok(out)
}

/// Table rows whose generated subgroup contains an element conjugate into
/// `H0·H3 \ {1, ω}`; each comes with a verified witness.
pub const TABLE1_NOT_SEMISPARSE: [&str; 4] = ["13", "70", "95", "127"];

/// The thirty maximal semisparse subgroups, from the bundled table.
pub fn table1_catalog() -> Vec<SubgroupSpec> {
    parse_table1(TABLE1_TEXT).expect("bundled table parses")
}

/// Named subgroups used by the census: `trivial`, `omega`, `nu`, `nu2`,
/// `nu3`, `l2-order3`, `s0`..`s3`.
pub fn builtin(name: &str) -> Option<SubgroupSpec> {
    let s = Alphabet::s_alphabet();
    let words = match name {
        "trivial" => vec![],
        "omega" => vec![omega_word()],
        "nu" => vec![nu_word()],
        "nu2" => vec![nu_word().pow(2)],
        "nu3" => vec![nu_word().pow(3)],
        // ν³ = (1, s''3) and its conjugate by s2 s1 s3 s2 multiply to an element
        // of order 3 in the L2(19) factor.
        "l2-order3" => {
            let n3 = nu_word().pow(3);
            let c = s.parse("s2 s1 s3 s2").expect("fixed word");
            vec![n3.concat(&c.inverse().concat(&n3).concat(&c))]
        }
        "s0" | "s1" | "s2" | "s3" => vec![s.parse(name).expect("generator name")],
        _ => return None,
    };
    let mut spec = SubgroupSpec::from_s_words(name, words.into_iter().map(|w| w.reduce(&s)).collect());
    spec.id = name.to_string();
    Some(spec)
}

/// The product set `H0·H3` as sorted element codes.
#[derive(Clone, Debug)]
pub struct ProductSet {
    pub codes: Vec<u32>,
    pub identity: u32,
    pub omega: u32,
}

impl ProductSet {
    pub fn contains(&self, code: u32) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

fn parabolic_codes(model: &Model, gens: &[usize]) -> Vec<u32> {
    let words: Vec<Word> = gens.iter().map(|&g| Word::gens(&[g])).collect();
    model.subgroup_codes_of_words(&words, ELEMENT_CAP).expect("parabolics are small")
}

pub fn product_set_h0h3(model: &Model) -> ProductSet {
    let h0 = parabolic_codes(model, &[1, 2, 3]);
    let h3 = parabolic_codes(model, &[0, 1, 2]);
    let mut codes: Vec<u32> = h0.iter().flat_map(|&a| h3.iter().map(move |&b| model.product(a, b))).collect();
    codes.sort_unstable();
    codes.dedup();
    ProductSet {
        codes,
        identity: model.code_of_word(&Word::empty()),
        omega: model.code_of_word(&omega_word()),
    }
}

/// `n ∈ N` conjugate to `s ∈ S \ {1, ω}`, with conjugating words for each
/// factor: `j^-1 n' j = s'` and `l^-1 n'' l = s''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub n: u32,
    pub s: u32,
    pub j1_conjugator: Word,
    pub l2_conjugator: Word,
}

impl Witness {
    /// The element of `W` with components given by the two conjugators.
    pub fn conjugator_code(&self, model: &Model) -> u32 {
        model.join(
            model.j1().code_of_word(&self.j1_conjugator),
            model.l2().code_of_word(&self.l2_conjugator),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemisparseVerdict {
    pub semisparse: bool,
    pub order: u64,
    pub witness: Option<Witness>,
}

/// Precomputed product set and its conjugacy classes.
pub struct SemisparseChecker<'a> {
    model: &'a Model,
    set: ProductSet,
    /// Class pair of each element of `S \ {1, ω}` mapped to its least code.
    bad: BTreeMap<(u32, u32), u32>,
}

impl<'a> SemisparseChecker<'a> {
    pub fn new(model: &'a Model) -> Self {
        let set = product_set_h0h3(model);
        let mut bad = BTreeMap::new();
        for &c in &set.codes {
            if c != set.identity && c != set.omega {
                bad.entry(model.class_pair(c)).or_insert(c);
            }
        }
        SemisparseChecker { model, set, bad }
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn product_set(&self) -> &ProductSet {
        &self.set
    }

    /// Number of `W`-classes met by `S \ {1, ω}`.
    pub fn bad_class_count(&self) -> usize {
        self.bad.len()
    }

    /// Tests the elements in the given order and reports the first failure.
    pub fn check_codes(&self, codes: &[u32]) -> Result<SemisparseVerdict, SemisparseError> {
        let order = codes.iter().collect::<HashSet<_>>().len() as u64;
        for &n in codes {
            if n == self.set.identity {
                continue;
            }
            if let Some(&least) = self.bad.get(&self.model.class_pair(n)) {
                let s = if self.set.contains(n) { n } else { least };
                let witness = self.conjugators(n, s)?;
                return Ok(SemisparseVerdict {
                    semisparse: false,
                    order,
                    witness: Some(witness),
                });
            }
        }
        Ok(SemisparseVerdict {
            semisparse: true,
            order,
            witness: None,
        })
    }

    /// Checks generators first, then every element in enumeration order.
    pub fn check(&self, spec: &SubgroupSpec, cap: u128) -> Result<SemisparseVerdict, SemisparseError> {
        let mut codes: Vec<u32> = spec.words.iter().map(|w| self.model.code_of_word(w)).collect();
        let all = spec.codes(self.model, cap)?;
        let order = all.len() as u64;
        codes.extend(all);
        let mut v = self.check_codes(&codes)?;
        v.order = order;
        Ok(v)
    }

    fn conjugators(&self, n: u32, s: u32) -> Result<Witness, SemisparseError> {
        let (n1, n2) = self.model.split(n);
        let (s1, s2) = self.model.split(s);
        let j = conjugator(self.model.j1(), n1, s1)
            .ok_or_else(|| SemisparseError::Witness("J1 components are not conjugate".into()))?;
        let l = conjugator(self.model.l2(), n2, s2)
            .ok_or_else(|| SemisparseError::Witness("L2(19) components are not conjugate".into()))?;
        let w = Witness {
            n,
            s,
            j1_conjugator: j,
            l2_conjugator: l,
        };
        self.verify_witness(&w)?;
        Ok(w)
    }

    /// Re-checks a witness with explicit permutations.
    pub fn verify_witness(&self, w: &Witness) -> Result<(), SemisparseError> {
        if !self.set.contains(w.s) || w.s == self.set.identity || w.s == self.set.omega {
            return Err(SemisparseError::Witness("s is not in H0·H3 \\ {1, ω}".into()));
        }
        let (n1, n2) = self.model.split(w.n);
        let (s1, s2) = self.model.split(w.s);
        for (f, a, b, c) in [
            (self.model.j1(), n1, s1, &w.j1_conjugator),
            (self.model.l2(), n2, s2, &w.l2_conjugator),
        ] {
            let g = f.evaluate(c);
            if f.element(a).conjugate_by(&g) != f.element(b) {
                return Err(SemisparseError::Witness(format!("{} conjugator does not conjugate", f.name())));
            }
        }
        Ok(())
    }
}

/// A word `w` in the marks with `w^-1 a w = b`, by breadth-first search over
/// the conjugation tables.
pub fn conjugator(f: &Factor, a: u32, b: u32) -> Option<Word> {
    const UNSEEN: u32 = u32::MAX;
    let n = f.order() as usize;
    let mut parent = vec![(UNSEEN, 0u8); n];
    parent[a as usize] = (a, 0);
    let mut queue = VecDeque::from([a]);
    let gens = f.marks().len();
    while let Some(x) = queue.pop_front() {
        if x == b {
            let mut letters = Vec::new();
            let mut y = x;
            while y != a {
                let (p, g) = parent[y as usize];
                letters.push(Letter::new(g as usize));
                y = p;
            }
            letters.reverse();
            return Some(Word::from_letters(letters));
        }
        for g in 0..gens {
            let y = f.conjugate(x, g);
            if parent[y as usize].0 == UNSEEN {
                parent[y as usize] = (x, g as u8);
                queue.push_back(y);
            }
        }
    }
    None
}

/// Invariants used to compare a subgroup with its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub order: u64,
    pub exponent: u64,
    pub center_order: u64,
    /// Invariant factors of `N/N'`, each dividing the next.
    pub abelian_invariants: Vec<u64>,
    /// Orders along the derived series, starting with `|N|`.
    pub derived_orders: Vec<u64>,
    pub abelian: bool,
    pub perfect: bool,
    pub solvable: bool,
}

impl Fingerprint {
    /// Disagreements with the facts implied by a group label.
    pub fn label_mismatches(&self, label: &str) -> Result<Vec<String>, LabelError> {
        let facts = label_facts(label)?;
        let mut out = Vec::new();
        if facts.order != self.order {
            out.push(format!("order {} but label implies {}", self.order, facts.order));
        }
        if let Some(k) = facts.cyclic {
            if !(self.abelian && (k == 1 || self.abelian_invariants == [k])) {
                out.push(format!("label is cyclic of order {k}, invariants {:?}", self.abelian_invariants));
            }
        }
        if facts.simple && !(self.perfect && self.center_order == 1) {
            out.push("label is simple but the group is not perfect with trivial center".into());
        }
        if facts.solvable != self.solvable {
            out.push(format!("solvable = {}, label implies {}", self.solvable, facts.solvable));
        }
        Ok(out)
    }
}

fn class_orders(f: &Factor) -> Vec<u64> {
    f.classes().reps.iter().map(|&r| f.element_order(r)).collect()
}

/// Normal closure of the commutators of `gens`.
pub fn derived_subgroup(degree: usize, gens: &[Permutation]) -> StabilizerChain {
    let mut cgens: Vec<Permutation> = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = a.inverse().compose(&b.inverse()).compose(a).compose(b);
            if !c.is_identity() {
                cgens.push(c);
            }
        }
    }
    let mut chain = StabilizerChain::build(degree, &cgens);
    let mut i = 0;
    while i < cgens.len() {
        for g in gens {
            let x = cgens[i].conjugate_by(g);
            if !chain.contains(&x).expect("same degree") {
                cgens.push(x);
                chain = StabilizerChain::build(degree, &cgens);
            }
        }
        i += 1;
    }
    chain
}

fn pow_code(model: &Model, mut x: u32, mut e: u64) -> u32 {
    let mut acc = model.code_of_word(&Word::empty());
    while e > 0 {
        if e & 1 == 1 {
            acc = model.product(acc, x);
        }
        x = model.product(x, x);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Fingerprint of `⟨gens⟩ ≤ W`.
pub fn structure_fingerprint(model: &Model, gens: &[Permutation], cap: u128) -> Result<Fingerprint, StabError> {
    let degree = model.degree();
    let chain = StabilizerChain::build(degree, gens);
    let codes = model.chain_codes(&chain, cap)?;
    let order = codes.len() as u64;
    let (o1, o2) = (class_orders(model.j1()), class_orders(model.l2()));
    let exponent = codes.iter().fold(1, |e, &c| {
        let (a, b) = model.class_pair(c);
        lcm(e, lcm(o1[a as usize], o2[b as usize]))
    });
    let gen_codes: Vec<u32> = gens.iter().map(|g| model.code_of(g).expect("in W")).collect();
    let center_order = codes
        .iter()
        .filter(|&&n| gen_codes.iter().all(|&g| model.product(n, g) == model.product(g, n)))
        .count() as u64;

    let mut derived_orders = vec![order];
    let mut cur_gens = gens.to_vec();
    let mut derived: Option<StabilizerChain> = None;
    loop {
        let d = derived_subgroup(degree, &cur_gens);
        let o = d.order() as u64;
        let done = o == *derived_orders.last().unwrap() || o == 1;
        derived_orders.push(o);
        cur_gens = d.generators().to_vec();
        if derived.is_none() {
            derived = Some(d);
        }
        if done {
            break;
        }
    }
    let derived = derived.expect("at least one step");
    let d_order = derived.order() as u64;
    let solvable = *derived_orders.last().unwrap() == 1;
    let perfect = d_order == order;

    let mut abelian_invariants = Vec::new();
    let quotient = order / d_order;
    if quotient > 1 {
        let d_codes: HashSet<u32> = model.chain_codes(&derived, cap)?.into_iter().collect();
        let mut per_prime: Vec<Vec<u64>> = Vec::new();
        for p in prime_factors(quotient) {
            let mut v = 0u32;
            let mut q = quotient;
            while q.is_multiple_of(p) {
                q /= p;
                v += 1;
            }
            // c[k] = log_p |{a ∈ N/N' : a^(p^k) = 1}|
            let mut c = vec![0u32];
            let mut pk = 1u64;
            while *c.last().unwrap() < v {
                pk *= p;
                let count = codes.iter().filter(|&&n| d_codes.contains(&pow_code(model, n, pk))).count() as u64 / d_order;
                c.push(count.ilog(p));
            }
            let m: Vec<u32> = c.windows(2).map(|w| w[1] - w[0]).collect();
            let mut divisors = Vec::new();
            for k in 0..m.len() {
                let exact = m[k] - m.get(k + 1).copied().unwrap_or(0);
                for _ in 0..exact {
                    divisors.push(p.pow(k as u32 + 1));
                }
            }
            divisors.sort_unstable_by(|a, b| b.cmp(a));
            per_prime.push(divisors);
        }
        let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
        for j in 0..len {
            abelian_invariants.push(per_prime.iter().filter_map(|d| d.get(j)).product());
        }
        abelian_invariants.reverse();
    }
    Ok(Fingerprint {
        order,
        exponent,
        center_order,
        abelian_invariants,
        derived_orders,
        abelian: d_order == 1,
        perfect,
        solvable,
    })
}

/// Subgroups of `⟨gens⟩` used for downward-closure checks: each cyclic
/// `⟨g⟩`, each `⟨g^p⟩` for primes `p` dividing the order of `g`, and each
/// subgroup generated by all but one generator.
pub fn sample_subgroups(gens: &[Permutation]) -> Vec<Vec<Permutation>> {
    let mut out = Vec::new();
    for g in gens {
        out.push(vec![g.clone()]);
        let o = g.order();
        for p in prime_factors(o) {
            if p < o {
                out.push(vec![g.pow(p as i64)]);
            }
        }
    }
    if gens.len() > 1 {
        for skip in 0..gens.len() {
            out.push(gens.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, g)| g.clone()).collect());
        }
    }
    out
}

/// The five words over `s'0..s'3` used to show that `H'0·H'3` meets
/// elements of orders 3, 5, 19, 11 and 7 in J1.
pub fn prime_order_words() -> Vec<Word> {
    let s = Alphabet::s_alphabet();
    [
        "s1 s2",
        "s0 s1",
        "s3 s1 s2 s1 s0",
        "s3 s2 s1 s0 s1 s0",
        "s1 s3 s2 s1 s3 s0 s1 s0 s2 s1 s0",
    ]
    .iter()
    .map(|t| s.parse(t).expect("fixed word"))
    .collect()
}

/// Codes of `H'0·H'3` inside the J1 factor.
pub fn j1_product_set(model: &Model) -> HashSet<u32> {
    let j1 = model.j1();
    let sub = |gens: &[usize]| -> Vec<u32> {
        let perms: Vec<Permutation> = gens.iter().map(|&g| j1.marks()[g].clone()).collect();
        StabilizerChain::build(j1.degree(), &perms)
            .elements(ELEMENT_CAP)
            .expect("small")
            .map(|p| j1.code_of(&p).expect("in J1"))
            .collect()
    };
    let (h0, h3) = (sub(&[1, 2, 3]), sub(&[0, 1, 2]));
    h0.iter().flat_map(|&a| h3.iter().map(move |&b| j1.product(a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::shared;

    fn brute_product_set(model: &Model) -> HashSet<Permutation> {
        let w = crate::cgroup::MarkedGroup::w(model);
        let h0: Vec<Permutation> = w.maximal_parabolic(0).elements(200).unwrap().collect();
        let h3: Vec<Permutation> = w.maximal_parabolic(3).elements(200).unwrap().collect();
        h0.iter().flat_map(|a| h3.iter().map(move |b| a.compose(b))).collect()
    }

    #[test]
    fn product_set_matches_brute_force() {
        let m = shared();
        let s = product_set_h0h3(m);
        assert_eq!(s.len(), 1200);
        let brute = brute_product_set(m);
        assert_eq!(brute.len(), 1200);
        for p in &brute {
            assert!(s.contains(m.code_of(p).unwrap()));
        }
        assert!(s.contains(s.omega) && s.contains(s.identity));
        for g in 0..4 {
            assert!(s.contains(m.code_of_word(&Word::gens(&[g]))));
        }
        // Elements of S with trivial L2(19) component are exactly 1 and ω.
        let l2_identity = m.split(s.identity).1;
        let trivial_second: Vec<u32> = s.codes.iter().copied().filter(|&c| m.split(c).1 == l2_identity).collect();
        let mut expect = vec![s.identity, s.omega];
        expect.sort_unstable();
        assert_eq!(trivial_second, expect);
    }

    #[test]
    fn v_word_chain() {
        let m = shared();
        let v = v_words();
        v.verify(m).unwrap();
        let s = Alphabet::s_alphabet();
        assert_eq!(v.v(3), &nu_word().concat(&s.parse("s2 s1").unwrap()));
        assert_eq!(v.v(6), &nu_word().concat(&s.parse("s2 s1 s0 s1 s0").unwrap()));
        let v1 = m.evaluate(v.v(1));
        assert_eq!(v1.order(), 6);
        assert_eq!(v1.restrict(1463, 20), m.l2().marks()[3]);
    }

    #[test]
    fn basic_verdicts() {
        let m = shared();
        let chk = SemisparseChecker::new(m);
        let v = chk.check(&builtin("trivial").unwrap(), ELEMENT_CAP).unwrap();
        assert!(v.semisparse && v.order == 1);
        let v = chk.check(&builtin("omega").unwrap(), ELEMENT_CAP).unwrap();
        assert!(v.semisparse && v.order == 2);
        for g in ["s0", "s1", "s2", "s3"] {
            let v = chk.check(&builtin(g).unwrap(), ELEMENT_CAP).unwrap();
            assert!(!v.semisparse, "{g}");
            let w = v.witness.unwrap();
            assert_eq!(w.n, w.s, "{g} is its own witness");
            chk.verify_witness(&w).unwrap();
        }
        let v = chk.check(&builtin("nu").unwrap(), ELEMENT_CAP).unwrap();
        assert!(!v.semisparse);
        let w = v.witness.unwrap();
        assert_eq!(w.n, m.code_of_word(&nu_word()));
        chk.verify_witness(&w).unwrap();
        // ν^s3 = s3 ω lies in S.
        let s3 = Word::gens(&[3]);
        let conj = s3.concat(&nu_word()).concat(&s3);
        assert_eq!(m.code_of_word(&conj), m.code_of_word(&s3.concat(&omega_word())));
        assert!(chk.product_set().contains(m.code_of_word(&conj)));
    }

    #[test]
    fn builtin_orders() {
        let m = shared();
        for (name, order) in [("nu2", 3), ("nu3", 2), ("l2-order3", 3), ("nu", 6)] {
            let spec = builtin(name).unwrap();
            assert_eq!(spec.chain(m).order(), order, "{name}");
        }
        let p = m.evaluate(&builtin("l2-order3").unwrap().words[0]);
        assert!(p.restrict(0, 1463).is_identity());
        let p = m.evaluate(&builtin("nu2").unwrap().words[0]);
        assert!(p.restrict(1463, 20).is_identity());
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn table_parsing() {
        let rows = table1_catalog();
        assert_eq!(rows.len(), 30);
        assert_eq!(rows[0].id, "1");
        assert_eq!(rows[0].expected_order, Some(175_560));
        assert_eq!(rows[0].source[1], "(v_2 v_1)^2");
        assert_eq!(rows[29].id, "127");
        assert_eq!(rows[29].words.len(), 1);
        assert!(matches!(parse_table1("1 | C_2\n"), Err(SemisparseError::Table { line: 1, .. })));
        assert!(matches!(
            parse_table1("1 | C_2 | v_1\n1 | C_2 | v_1\n"),
            Err(SemisparseError::Table { line: 2, .. })
        ));
        assert!(matches!(parse_table1("1 | C_2 | v_9\n"), Err(SemisparseError::Word { .. })));
    }

    #[test]
    fn small_table_rows() {
        let m = shared();
        let chk = SemisparseChecker::new(m);
        let mut failing = Vec::new();
        for row in table1_catalog().iter().filter(|r| r.expected_order.unwrap() <= 1000) {
            let v = chk.check(row, ELEMENT_CAP).unwrap();
            assert_eq!(Some(v.order), row.expected_order, "row {}", row.id);
            if let Some(w) = v.witness {
                chk.verify_witness(&w).unwrap();
                failing.push(row.id.clone());
            }
        }
        assert_eq!(failing, TABLE1_NOT_SEMISPARSE);
    }

    #[test]
    fn fingerprints() {
        let m = shared();
        let rows = table1_catalog();
        let c10 = rows.iter().find(|r| r.id == "127").unwrap();
        let fp = structure_fingerprint(m, &c10.generators(m), ELEMENT_CAP).unwrap();
        assert_eq!(fp.order, 10);
        assert!(fp.abelian && fp.solvable);
        assert_eq!(fp.abelian_invariants, vec![10]);
        assert_eq!(fp.exponent, 10);
        assert!(fp.label_mismatches("C_{10}").unwrap().is_empty());
        assert!(!fp.label_mismatches("C_{20}").unwrap().is_empty());
        let r = rows.iter().find(|r| r.id == "54").unwrap();
        let fp = structure_fingerprint(m, &r.generators(m), ELEMENT_CAP).unwrap();
        assert_eq!(fp.order, 110);
        // 5 × D22 has abelianization C5 × C2 = C10 and center of order 5.
        assert_eq!(fp.abelian_invariants, vec![10]);
        assert_eq!(fp.center_order, 5);
        assert!(fp.solvable && !fp.abelian);
        assert!(fp.label_mismatches(r.label.as_deref().unwrap()).unwrap().is_empty());
    }

    #[test]
    fn abelian_invariants_of_klein_four() {
        // ω and ν³ lie in different factors, so ⟨ω, ν³⟩ ≅ 2².
        let m = shared();
        let gens = vec![m.evaluate(&omega_word()), m.evaluate(&nu_word().pow(3))];
        let fp = structure_fingerprint(m, &gens, ELEMENT_CAP).unwrap();
        assert_eq!(fp.order, 4);
        assert_eq!(fp.abelian_invariants, vec![2, 2]);
        assert_eq!(fp.exponent, 2);
    }

    #[test]
    fn j1_prime_order_words() {
        let m = shared();
        let set = j1_product_set(m);
        assert_eq!(set.len(), 1200);
        let orders: Vec<u64> = prime_order_words()
            .iter()
            .map(|w| {
                assert!(set.contains(&m.j1().code_of_word(w)));
                m.j1().evaluate(w).order()
            })
            .collect();
        assert_eq!(orders, vec![3, 5, 19, 11, 7]);
    }

    #[test]
    fn downward_closure_on_small_rows() {
        let m = shared();
        let chk = SemisparseChecker::new(m);
        for row in table1_catalog()
            .iter()
            .filter(|r| r.expected_order.unwrap() <= 200 && !TABLE1_NOT_SEMISPARSE.contains(&r.id.as_str()))
        {
            for sub in sample_subgroups(&row.generators(m)) {
                let codes = m.subgroup_codes(&sub, ELEMENT_CAP).unwrap();
                assert!(chk.check_codes(&codes).unwrap().semisparse, "row {}", row.id);
            }
        }
    }
}
