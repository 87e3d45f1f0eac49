//! The concrete model of `W` as `J1 × L2(19)`.
//!
//! The J1 factor is the action of `W'` on the 1463 cosets of `⟨s0,s1,s2⟩`;
//! the L2(19) factor is the bundled action on twenty points. `W` itself acts
//! on the disjoint union (1483 points) with `s_i = (s'_i, s''_i)`.
//!
//! Elements of a factor are identified by their stabilizer-chain codes, which
//! are dense in `0..order`. An element of `W` has code
//! `j1_code * 3420 + l2_code`.

use std::sync::OnceLock;

use thiserror::Error;

use crate::coset::{enumerate, CosetError, EnumLimits};
use crate::perm::{PermError, Permutation};
use crate::presentation::{bundled, Presentation};
use crate::stabchain::{ConjugationAction, StabError, StabilizerChain};
use crate::word::{GeneratorAssignment, Word};

pub const J1_ORDER: u32 = 175_560;
pub const L2_ORDER: u32 = 3_420;
pub const W_ORDER: u64 = J1_ORDER as u64 * L2_ORDER as u64;
pub const J1_DEGREE: usize = 1463;
pub const L2_DEGREE: usize = 20;

pub const L2_PERMS_TEXT: &str = include_str!("../data/l2_19.perms");

#[derive(Error, Debug)]
pub enum ModelError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error("permutation file line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error("{factor}: relator {relator} is not the identity")]
    Relator { factor: String, relator: String },
    #[error("{factor}: expected order {expected}, found {found}")]
    Order { factor: String, expected: u128, found: u128 },
}

/// Parses a permutation file: a `degree: n` line followed by lines
/// `name cycles`. Blank lines and `#` comments are ignored.
pub fn parse_perm_file(text: &str) -> Result<Vec<(String, Permutation)>, ModelError> {
    let mut degree = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("degree:") {
            let d = rest.trim().parse::<usize>().map_err(|e| ModelError::Data {
                line: line_no,
                msg: format!("bad degree: {e}"),
            })?;
            degree = Some(d);
            continue;
        }
        let d = degree.ok_or(ModelError::Data {
            line: line_no,
            msg: "permutation before the degree line".into(),
        })?;
        let (name, cycles) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let p = Permutation::parse_cycles(cycles, d).map_err(|e| ModelError::Data {
            line: line_no,
            msg: e.to_string(),
        })?;
        out.push((name.to_string(), p));
    }
    Ok(out)
}

/// `(s0 s1 s2)^5`, the central involution of the facet group.
pub fn omega_word() -> Word {
    Word::gens(&[0, 1, 2]).pow(5)
}

/// `ω s3`.
pub fn nu_word() -> Word {
    omega_word().concat(&Word::gens(&[3]))
}

/// Conjugacy classes of a factor, labelled in order of their least code.
#[derive(Clone, Debug)]
pub struct ClassLabels {
    pub label: Vec<u32>,
    /// Least code in each class.
    pub reps: Vec<u32>,
    pub sizes: Vec<u32>,
}

impl ClassLabels {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// A finite group generated by marked involutions, with dense element codes
/// and precomputed conjugation by each mark.
pub struct Factor {
    name: String,
    marks: GeneratorAssignment,
    chain: StabilizerChain,
    base: Vec<u32>,
    conj: Vec<Vec<u32>>,
    classes: OnceLock<ClassLabels>,
    mul: OnceLock<Vec<u16>>,
}

impl std::fmt::Debug for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factor")
            .field("name", &self.name)
            .field("degree", &self.degree())
            .field("order", &self.order())
            .finish()
    }
}

impl Factor {
    pub fn new(name: &str, marks: Vec<Permutation>) -> Result<Self, ModelError> {
        let degree = marks.first().map_or(1, |p| p.degree());
        let chain = StabilizerChain::build(degree, &marks);
        if chain.order() > u32::MAX as u128 {
            return Err(StabError::OrderTooLarge(chain.order()).into());
        }
        let base = chain.base();
        let marks = GeneratorAssignment::new(marks)?;
        let mut f = Factor {
            name: name.to_string(),
            marks,
            chain,
            base,
            conj: Vec::new(),
            classes: OnceLock::new(),
            mul: OnceLock::new(),
        };
        f.conj = (0..f.marks.len())
            .map(|g| (0..f.order()).map(|c| f.conjugate_slow(c, g)).collect())
            .collect();
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    pub fn order(&self) -> u32 {
        self.chain.order() as u32
    }

    pub fn marks(&self) -> &[Permutation] {
        self.marks.perms()
    }

    pub fn assignment(&self) -> &GeneratorAssignment {
        &self.marks
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    /// Code of a member of the factor.
    pub fn code_of(&self, p: &Permutation) -> Option<u32> {
        self.chain.code_of(p).map(|c| c as u32)
    }

    /// Code from the images of the base points; the slice is scratch.
    pub fn code_of_base_images(&self, images: &mut [u32]) -> Option<u32> {
        self.chain.code_of_base_images(images).map(|c| c as u32)
    }

    /// Code of the value of a word in the marks, traced on base points only.
    pub fn code_of_word(&self, w: &Word) -> u32 {
        let mut imgs: Vec<u32> = self.base.iter().map(|&b| self.marks.trace_point(w, b)).collect();
        self.code_of_base_images(&mut imgs).expect("words in the marks lie in the group")
    }

    pub fn evaluate(&self, w: &Word) -> Permutation {
        self.marks.evaluate(w).expect("word over the marks")
    }

    pub fn element(&self, code: u32) -> Permutation {
        self.chain.element(code as u64)
    }

    pub fn image_under_code(&self, code: u32, point: u32) -> u32 {
        self.chain.image_under_code(code as u64, point)
    }

    /// Code of `a` followed by `b`.
    pub fn product(&self, a: u32, b: u32) -> u32 {
        let mut imgs: Vec<u32> = self
            .base
            .iter()
            .map(|&p| self.image_under_code(b, self.image_under_code(a, p)))
            .collect();
        self.code_of_base_images(&mut imgs).expect("closed under products")
    }

    pub fn inverse(&self, a: u32) -> u32 {
        self.code_of(&self.element(a).inverse()).expect("closed under inverses")
    }

    /// Code of `g^-1 x g` for mark `g`.
    #[inline]
    pub fn conjugate(&self, code: u32, gen: usize) -> u32 {
        self.conj[gen][code as usize]
    }

    fn conjugate_slow(&self, code: u32, gen: usize) -> u32 {
        self.chain.conjugate(code as u64, gen) as u32
    }

    pub fn element_order(&self, code: u32) -> u64 {
        self.element(code).order()
    }

    /// Conjugacy classes, computed on first use by orbits of the
    /// conjugation tables.
    pub fn classes(&self) -> &ClassLabels {
        self.classes.get_or_init(|| {
            const UNSET: u32 = u32::MAX;
            let n = self.order() as usize;
            let mut label = vec![UNSET; n];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            let mut stack = Vec::new();
            for start in 0..n {
                if label[start] != UNSET {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push(start as u32);
                label[start] = id;
                stack.push(start as u32);
                let mut size = 1u32;
                while let Some(c) = stack.pop() {
                    for table in &self.conj {
                        let d = table[c as usize];
                        if label[d as usize] == UNSET {
                            label[d as usize] = id;
                            size += 1;
                            stack.push(d);
                        }
                    }
                }
                sizes.push(size);
            }
            ClassLabels { label, reps, sizes }
        })
    }

    /// Full multiplication table, `table[a * order + b]` = code of `a` then
    /// `b`. Only for factors of order below 65536.
    pub fn mul_table(&self) -> &[u16] {
        self.mul.get_or_init(|| {
            let n = self.order();
            assert!(n <= 1 << 16, "multiplication table needs 16-bit codes");
            let k = self.base.len();
            // Base images of every element, then one chain walk per product.
            let imgs: Vec<u32> = (0..n)
                .flat_map(|a| self.base.iter().map(move |&p| self.image_under_code(a, p)))
                .collect();
            let mut table = Vec::with_capacity(n as usize * n as usize);
            let mut scratch = vec![0u32; k];
            for a in 0..n as usize {
                for b in 0..n {
                    for (s, &p) in scratch.iter_mut().zip(&imgs[a * k..a * k + k]) {
                        *s = self.image_under_code(b, p);
                    }
                    table.push(self.code_of_base_images(&mut scratch).expect("closed") as u16);
                }
            }
            table
        })
    }

    /// Checks that every relator of `pres` evaluates to the identity.
    pub fn verify_relators(&self, pres: &Presentation) -> Result<(), ModelError> {
        for r in pres.relators() {
            if !self.evaluate(r).is_identity() {
                return Err(ModelError::Relator {
                    factor: self.name.clone(),
                    relator: r.display(pres.alphabet()).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// `W` as `J1 × L2(19)` with factor-indexed element codes.
#[derive(Debug)]
pub struct Model {
    j1: Factor,
    l2: Factor,
    w: GeneratorAssignment,
    chain: OnceLock<StabilizerChain>,
}

impl Model {
    /// Builds both factors from the bundled data and checks them against
    /// their presentations.
    pub fn build() -> Result<Model, ModelError> {
        let wp = bundled::w_prime();
        let facet: Vec<Word> = (0..3).map(|g| Word::gens(&[g])).collect();
        let table = enumerate(&wp, &facet, &EnumLimits::default())?;
        let j1_marks = table.coset_action()?.perms().to_vec();
        let l2_marks: Vec<Permutation> = parse_perm_file(L2_PERMS_TEXT)?.into_iter().map(|(_, p)| p).collect();
        let model = Model::from_marks(j1_marks, l2_marks)?;
        model.j1.verify_relators(&wp)?;
        model.l2.verify_relators(&bundled::w_double_prime())?;
        for (f, expected) in [(&model.j1, J1_ORDER), (&model.l2, L2_ORDER)] {
            if f.order() != expected {
                return Err(ModelError::Order {
                    factor: f.name().to_string(),
                    expected: expected as u128,
                    found: f.order() as u128,
                });
            }
        }
        Ok(model)
    }

    pub fn from_marks(j1_marks: Vec<Permutation>, l2_marks: Vec<Permutation>) -> Result<Model, ModelError> {
        if j1_marks.len() != l2_marks.len() {
            return Err(ModelError::Data {
                line: 0,
                msg: "factors have different numbers of marks".into(),
            });
        }
        let w = j1_marks
            .iter()
            .zip(&l2_marks)
            .map(|(a, b)| Permutation::embed_direct_product(a, b))
            .collect();
        Ok(Model {
            j1: Factor::new("J1", j1_marks)?,
            l2: Factor::new("L2(19)", l2_marks)?,
            w: GeneratorAssignment::new(w)?,
            chain: OnceLock::new(),
        })
    }

    pub fn j1(&self) -> &Factor {
        &self.j1
    }

    pub fn l2(&self) -> &Factor {
        &self.l2
    }

    pub fn degree(&self) -> usize {
        self.j1.degree() + self.l2.degree()
    }

    /// `s0..s3` acting on both factors.
    pub fn generators(&self) -> &[Permutation] {
        self.w.perms()
    }

    pub fn assignment(&self) -> &GeneratorAssignment {
        &self.w
    }

    /// Product of the factor orders.
    pub fn order(&self) -> u64 {
        self.j1.order() as u64 * self.l2.order() as u64
    }

    /// Stabilizer chain of `⟨s0..s3⟩` on all 1483 points, built on first use.
    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree(), self.generators()))
    }

    #[inline]
    pub fn split(&self, code: u32) -> (u32, u32) {
        (code / self.l2.order(), code % self.l2.order())
    }

    #[inline]
    pub fn join(&self, j1: u32, l2: u32) -> u32 {
        j1 * self.l2.order() + l2
    }

    pub fn evaluate(&self, w: &Word) -> Permutation {
        self.w.evaluate(w).expect("word over s0..s3")
    }

    pub fn code_of_word(&self, w: &Word) -> u32 {
        self.join(self.j1.code_of_word(w), self.l2.code_of_word(w))
    }

    /// Code of an element of `J1 × L2(19)` given on 1483 points.
    pub fn code_of(&self, p: &Permutation) -> Option<u32> {
        let a = self.j1.code_of(&p.restrict(0, self.j1.degree()))?;
        let b = self.l2.code_of(&p.restrict(self.j1.degree(), self.l2.degree()))?;
        Some(self.join(a, b))
    }

    pub fn element(&self, code: u32) -> Permutation {
        let (a, b) = self.split(code);
        Permutation::embed_direct_product(&self.j1.element(a), &self.l2.element(b))
    }

    pub fn product(&self, a: u32, b: u32) -> u32 {
        let (a1, a2) = self.split(a);
        let (b1, b2) = self.split(b);
        self.join(self.j1.product(a1, b1), self.l2.product(a2, b2))
    }

    pub fn inverse(&self, code: u32) -> u32 {
        let (a, b) = self.split(code);
        self.join(self.j1.inverse(a), self.l2.inverse(b))
    }

    /// Code of `g^-1 x g`.
    pub fn conjugate_code(&self, x: u32, g: u32) -> u32 {
        self.product(self.inverse(g), self.product(x, g))
    }

    pub fn element_order(&self, code: u32) -> u64 {
        let (a, b) = self.split(code);
        crate::perm::lcm(self.j1.element_order(a), self.l2.element_order(b))
    }

    /// `(J1 class, L2 class)`, the conjugacy class of an element of `W`.
    pub fn class_pair(&self, code: u32) -> (u32, u32) {
        let (a, b) = self.split(code);
        (self.j1.classes().label[a as usize], self.l2.classes().label[b as usize])
    }

    /// Codes of every element of `⟨gens⟩` (permutations on 1483 points),
    /// in the enumeration order of the subgroup's own chain.
    pub fn subgroup_codes(&self, gens: &[Permutation], cap: u128) -> Result<Vec<u32>, StabError> {
        let chain = StabilizerChain::build(self.degree(), gens);
        self.chain_codes(&chain, cap)
    }

    pub fn chain_codes(&self, chain: &StabilizerChain, cap: u128) -> Result<Vec<u32>, StabError> {
        let off = self.j1.degree() as u32;
        let k = self.j1.base().len();
        let points: Vec<u32> = self
            .j1
            .base()
            .iter()
            .copied()
            .chain(self.l2.base().iter().map(|&p| p + off))
            .collect();
        let mut it = chain.point_images(&points, cap)?;
        let mut codes = Vec::with_capacity(chain.order() as usize);
        let mut sa = vec![0u32; k];
        let mut sb = vec![0u32; points.len() - k];
        let mut ok = true;
        while it.next_with(|imgs| {
            sa.copy_from_slice(&imgs[..k]);
            for (s, &p) in sb.iter_mut().zip(&imgs[k..]) {
                *s = p.wrapping_sub(off);
            }
            match (self.j1.code_of_base_images(&mut sa), self.l2.code_of_base_images(&mut sb)) {
                (Some(a), Some(b)) => codes.push(a * self.l2.order() + b),
                _ => ok = false,
            }
        }) {}
        if ok {
            Ok(codes)
        } else {
            Err(StabError::NotMember)
        }
    }

    /// Codes of the subgroup generated by words in `s0..s3`.
    pub fn subgroup_codes_of_words(&self, words: &[Word], cap: u128) -> Result<Vec<u32>, StabError> {
        let gens: Vec<Permutation> = words.iter().map(|w| self.evaluate(w)).collect();
        self.subgroup_codes(&gens, cap)
    }
}

impl ConjugationAction for Model {
    fn group_order(&self) -> u128 {
        self.order() as u128
    }

    fn generator_count(&self) -> usize {
        self.w.len()
    }

    fn conjugate(&self, code: u64, gen: usize) -> u64 {
        let (a, b) = self.split(code as u32);
        self.join(self.j1.conjugate(a, gen), self.l2.conjugate(b, gen)) as u64
    }
}

/// Model shared by tests and benchmarks; built once per process.
pub fn shared() -> &'static Model {
    static MODEL: OnceLock<Model> = OnceLock::new();
    MODEL.get_or_init(|| Model::build().expect("bundled model data is consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn factor_orders_and_degrees() {
        let m = shared();
        assert_eq!(m.j1().degree(), J1_DEGREE);
        assert_eq!(m.l2().degree(), L2_DEGREE);
        assert_eq!(m.j1().order(), J1_ORDER);
        assert_eq!(m.l2().order(), L2_ORDER);
        assert_eq!(m.degree(), 1483);
        assert_eq!(m.order(), W_ORDER);
    }

    #[test]
    fn l2_s0_image() {
        let perms = parse_perm_file(L2_PERMS_TEXT).unwrap();
        assert_eq!(perms.len(), 4);
        assert_eq!(
            perms[0].1.to_string(),
            "(1,2)(3,6)(4,7)(5,10)(8,14)(9,15)(11,19)(12,16)(13,17)(18,20)"
        );
        assert!(perms.iter().all(|(_, p)| p.order() == 2));
    }

    #[test]
    fn perm_file_errors() {
        assert!(matches!(parse_perm_file("a (1,2)\n"), Err(ModelError::Data { line: 1, .. })));
        assert!(matches!(
            parse_perm_file("degree: 3\na (1,4)\n"),
            Err(ModelError::Data { line: 2, .. })
        ));
    }

    #[test]
    fn omega_and_nu() {
        let m = shared();
        let omega = m.evaluate(&omega_word());
        assert_eq!(omega.order(), 2);
        // ω lies in the J1 factor only.
        assert!(omega.restrict(J1_DEGREE, L2_DEGREE).is_identity());
        let nu = m.evaluate(&nu_word());
        assert_eq!(nu.order(), 6);
        let nu3 = nu.pow(3);
        assert!(nu3.restrict(0, J1_DEGREE).is_identity());
        assert_eq!(nu3.restrict(J1_DEGREE, L2_DEGREE), m.l2().marks()[3]);
    }

    #[test]
    fn codes_agree_with_permutations() {
        let m = shared();
        let words = [omega_word(), nu_word(), Word::gens(&[3, 1, 2, 1, 0]), Word::gens(&[0, 1, 2, 3]).pow(7)];
        for w in &words {
            let p = m.evaluate(w);
            let c = m.code_of_word(w);
            assert_eq!(m.code_of(&p), Some(c));
            assert_eq!(m.element(c), p);
            assert_eq!(m.element_order(c), p.order());
        }
        let a = m.code_of_word(&words[2]);
        let b = m.code_of_word(&words[3]);
        assert_eq!(m.element(m.product(a, b)), m.element(a).compose(&m.element(b)));
        assert_eq!(m.l2().inverse(m.l2().code_of_word(&words[3])), m.l2().code_of(&m.l2().evaluate(&words[3]).inverse()).unwrap());
    }

    #[test]
    fn conjugation_tables_match_permutations() {
        let m = shared();
        for code in [0u32, 1, 7_777_777, 600_415_199, 123_456_789] {
            for g in 0..4 {
                let x = m.element(code);
                let s = &m.generators()[g];
                let expect = m.code_of(&x.conjugate_by(s)).unwrap();
                assert_eq!(m.conjugate(code as u64, g) as u32, expect);
            }
        }
    }

    #[test]
    fn class_counts() {
        let m = shared();
        // J1 has 15 conjugacy classes, L2(19) has 12.
        assert_eq!(m.j1().classes().count(), 15);
        assert_eq!(m.l2().classes().count(), 12);
        assert_eq!(m.l2().classes().sizes.iter().sum::<u32>(), L2_ORDER);
        // Involutions of J1 form one class of size 1463.
        let omega = m.j1().code_of_word(&omega_word());
        let cls = m.j1().classes();
        assert_eq!(cls.sizes[cls.label[omega as usize] as usize], 1463);
    }

    #[test]
    fn l2_multiplication_table() {
        let l2 = shared().l2();
        let t = l2.mul_table();
        let n = l2.order() as usize;
        for (a, b) in [(0usize, 5usize), (17, 2000), (3419, 1)] {
            assert_eq!(t[a * n + b] as u32, l2.product(a as u32, b as u32));
        }
        // Identity row, and every row a permutation.
        assert!((0..n).all(|b| t[b] as usize == b));
        let row: HashSet<u16> = t[1234 * n..1235 * n].iter().copied().collect();
        assert_eq!(row.len(), n);
    }

    #[test]
    fn subgroup_codes_of_facet_group() {
        let m = shared();
        let words: Vec<Word> = (0..3).map(|g| Word::gens(&[g])).collect();
        let codes = m.subgroup_codes_of_words(&words, 1 << 20).unwrap();
        assert_eq!(codes.len(), 120);
        let set: HashSet<u32> = codes.iter().copied().collect();
        assert_eq!(set.len(), 120);
        assert!(set.contains(&m.code_of_word(&omega_word())));
        assert!(set.contains(&0));
    }
}
