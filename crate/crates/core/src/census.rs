//! Orbits of subgroups `N ≤ W` on the faces of the universal polytope.
//!
//! Faces of rank `i` are the right cosets `H_i g`. Every maximal parabolic
//! `H_i` maps injectively into the J1 factor, so a coset is determined by
//! the J1 coset `t = H'_i g'` and one element `x` of L2(19): writing
//! `g' = h' r_t` with `r_t` the coset representative, `x = φ(h')^-1 g''`
//! where `φ(h')` is the L2(19) part of the unique lift of `h'` to `H_i`.
//! Right multiplication by `s_j` sends `(t, x)` to `(t s_j, c x s''_j)`
//! with `c = φ(r_t s_j r_{t s_j}^-1)^-1`.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::coset::{enumerate, CosetError, EnumLimits};
use crate::model::Model;
use crate::presentation::bundled;
use crate::semisparse::{SubgroupSpec, ELEMENT_CAP};
use crate::stabchain::{normalizer_via_orbit, StabError, SubgroupKey};
use crate::word::{Letter, Word};

pub const RANK_NAMES: [&str; 4] = ["vertices", "edges", "2-faces", "facets"];

#[derive(Error, Debug)]
pub enum CensusError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error("rank must be 0..=3, got {0}")]
    Rank(usize),
    #[error("H{rank} has order {order} but its J1 image has order {image}")]
    NotInjective { rank: usize, order: usize, image: usize },
    #[error("face space for rank {rank} is inconsistent: {msg}")]
    Space { rank: usize, msg: String },
    #[error(
        "NON-SEMISPARSE-INPUT: facet orbit of size {orbit_size} for a subgroup of order {order} \
         (seed coset {seed_coset}, L2 element {seed_element})"
    )]
    NonSemisparse {
        orbit_size: u64,
        order: u64,
        seed_coset: u32,
        seed_element: u32,
    },
}

/// Generators of `H_i` as words.
pub fn parabolic_words(rank: usize) -> Vec<Word> {
    (0..4).filter(|&k| k != rank).map(|k| Word::gens(&[k])).collect()
}

/// The cosets of `H_i` in `W`, parametrized by `(t, x)`.
pub struct FaceCosetSpace<'a> {
    model: &'a Model,
    rank: usize,
    cosets: u32,
    next: Vec<[u32; 4]>,
    corr: Vec<[u16; 4]>,
    gen_l2: [u16; 4],
    l2_identity: u16,
}

/// The precomputed action of one word: `(t, x) -> (tmap[t], cmap[t] x right)`.
pub struct WordAction {
    tmap: Vec<u32>,
    cmap: Vec<u16>,
    right: u16,
}

/// Builds the face space of rank `i` from a coset enumeration of the J1
/// quotient over the image of `H_i`.
pub fn build_face_space<'a>(model: &'a Model, rank: usize, limits: &EnumLimits) -> Result<FaceCosetSpace<'a>, CensusError> {
    if rank > 3 {
        return Err(CensusError::Rank(rank));
    }
    let words = parabolic_words(rank);
    let h = model.subgroup_codes_of_words(&words, ELEMENT_CAP)?;
    let mut phi: HashMap<u32, u32> = HashMap::with_capacity(h.len());
    for &c in &h {
        let (a, b) = model.split(c);
        phi.insert(a, b);
    }
    if phi.len() != h.len() {
        return Err(CensusError::NotInjective {
            rank,
            order: h.len(),
            image: phi.len(),
        });
    }
    let table = enumerate(&bundled::w_prime(), &words, limits)?;
    let reps = table.representatives().ok_or_else(|| CensusError::Space {
        rank,
        msg: "coset table has no representatives".into(),
    })?;
    let (j1, l2) = (model.j1(), model.l2());
    let cosets = reps.len() as u32;
    let mut next = Vec::with_capacity(reps.len());
    let mut corr = Vec::with_capacity(reps.len());
    for (t, rep) in reps.iter().enumerate() {
        let mut n = [0u32; 4];
        let mut c = [0u16; 4];
        for j in 0..4 {
            let letter = Letter::new(j);
            let u = table.image(t as u32, letter).ok_or_else(|| CensusError::Space {
                rank,
                msg: format!("coset {t} has no image under s{j}"),
            })?;
            let k = rep.concat(&Word::gens(&[j])).concat(&reps[u as usize].inverse());
            let lifted = *phi.get(&j1.code_of_word(&k)).ok_or_else(|| CensusError::Space {
                rank,
                msg: format!("r_{t} s{j} r_{u}^-1 is not in the parabolic image"),
            })?;
            n[j] = u;
            c[j] = l2.inverse(lifted) as u16;
        }
        next.push(n);
        corr.push(c);
    }
    let mut gen_l2 = [0u16; 4];
    for (j, g) in gen_l2.iter_mut().enumerate() {
        *g = l2.code_of_word(&Word::gens(&[j])) as u16;
    }
    Ok(FaceCosetSpace {
        model,
        rank,
        cosets,
        next,
        corr,
        gen_l2,
        l2_identity: l2.code_of_word(&Word::empty()) as u16,
    })
}

impl<'a> FaceCosetSpace<'a> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of J1 cosets `t`.
    pub fn coset_count(&self) -> u32 {
        self.cosets
    }

    pub fn point_count(&self) -> u64 {
        self.cosets as u64 * self.model.l2().order() as u64
    }

    /// The coset `H_i` itself.
    pub fn base(&self) -> u32 {
        self.l2_identity as u32
    }

    #[inline]
    pub fn split(&self, state: u32) -> (u32, u32) {
        let n = self.model.l2().order();
        (state / n, state % n)
    }

    #[inline]
    fn join(&self, t: u32, x: u32) -> u32 {
        t * self.model.l2().order() + x
    }

    /// Image of a state under `s_j`.
    pub fn act(&self, state: u32, j: usize) -> u32 {
        let (t, x) = self.split(state);
        let mul = self.model.l2().mul_table();
        let n = self.model.l2().order() as usize;
        let y = mul[mul[self.corr[t as usize][j] as usize * n + x as usize] as usize * n + self.gen_l2[j] as usize];
        self.join(self.next[t as usize][j], y as u32)
    }

    /// State of the coset `H_i w`.
    pub fn state_of_word(&self, w: &Word) -> u32 {
        w.letters().iter().fold(self.base(), |s, l| self.act(s, l.gen))
    }

    pub fn word_action(&self, w: &Word) -> WordAction {
        let mul = self.model.l2().mul_table();
        let n = self.model.l2().order() as usize;
        let mut tmap: Vec<u32> = (0..self.cosets).collect();
        let mut cmap = vec![self.l2_identity; self.cosets as usize];
        let mut right = self.l2_identity;
        for l in w.letters() {
            let j = l.gen;
            for (t, c) in tmap.iter_mut().zip(cmap.iter_mut()) {
                *c = mul[self.corr[*t as usize][j] as usize * n + *c as usize];
                *t = self.next[*t as usize][j];
            }
            right = mul[right as usize * n + self.gen_l2[j] as usize];
        }
        WordAction { tmap, cmap, right }
    }

    #[inline]
    pub fn apply(&self, a: &WordAction, state: u32) -> u32 {
        let (t, x) = self.split(state);
        let mul = self.model.l2().mul_table();
        let n = self.model.l2().order() as usize;
        let y = mul[mul[a.cmap[t as usize] as usize * n + x as usize] as usize * n + a.right as usize];
        self.join(a.tmap[t as usize], y as u32)
    }

    /// Checks that each `s_j` acts as an involution on every state and that
    /// `H_i` fixes the base state.
    pub fn verify(&self) -> Result<(), CensusError> {
        for j in 0..4 {
            for s in 0..self.point_count() as u32 {
                if self.act(self.act(s, j), j) != s {
                    return Err(CensusError::Space {
                        rank: self.rank,
                        msg: format!("s{j} is not an involution at state {s}"),
                    });
                }
            }
            if j != self.rank && self.act(self.base(), j) != self.base() {
                return Err(CensusError::Space {
                    rank: self.rank,
                    msg: format!("s{j} moves the base coset"),
                });
            }
        }
        Ok(())
    }

    /// Orbit-size histogram of `⟨words⟩` over the whole space.
    pub fn orbit_sizes(&self, words: &[Word]) -> BTreeMap<u64, u64> {
        let actions: Vec<WordAction> = words.iter().map(|w| self.word_action(w)).collect();
        let total = self.point_count() as usize;
        let mut seen = vec![0u64; total.div_ceil(64)];
        let mut hist = BTreeMap::new();
        let mut stack = Vec::new();
        for start in 0..total {
            if seen[start / 64] >> (start % 64) & 1 == 1 {
                continue;
            }
            seen[start / 64] |= 1 << (start % 64);
            stack.push(start as u32);
            let mut size = 0u64;
            while let Some(s) = stack.pop() {
                size += 1;
                for a in &actions {
                    let y = self.apply(a, s) as usize;
                    if seen[y / 64] >> (y % 64) & 1 == 0 {
                        seen[y / 64] |= 1 << (y % 64);
                        stack.push(y as u32);
                    }
                }
            }
            *hist.entry(size).or_insert(0) += 1;
        }
        hist
    }

    /// Size of the orbit of one state.
    pub fn orbit_size_at(&self, words: &[Word], state: u32) -> u64 {
        let actions: Vec<WordAction> = words.iter().map(|w| self.word_action(w)).collect();
        let mut seen = HashSet::from([state]);
        let mut stack = vec![state];
        while let Some(s) = stack.pop() {
            for a in &actions {
                let y = self.apply(a, s);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() as u64
    }
}

/// Cosets `H_i g` represented by the least element code of `H_i g`.
/// Needs no injectivity, at the cost of `|H_i|` products per step.
pub struct CanonicalCosetSpace<'a> {
    model: &'a Model,
    rank: usize,
    h: Vec<u32>,
}

impl<'a> CanonicalCosetSpace<'a> {
    pub fn new(model: &'a Model, rank: usize) -> Result<Self, CensusError> {
        if rank > 3 {
            return Err(CensusError::Rank(rank));
        }
        let h = model.subgroup_codes_of_words(&parabolic_words(rank), ELEMENT_CAP)?;
        Ok(CanonicalCosetSpace { model, rank, h })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn canonical(&self, g: u32) -> u32 {
        self.h.iter().map(|&h| self.model.product(h, g)).min().expect("H contains 1")
    }

    pub fn state_of_word(&self, w: &Word) -> u32 {
        self.canonical(self.model.code_of_word(w))
    }

    /// Size of the orbit of `H_i w` under the elements `gens`.
    pub fn orbit_size(&self, gens: &[u32], w: &Word) -> u64 {
        let start = self.state_of_word(w);
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for &g in gens {
                let y = self.canonical(self.model.product(s, g));
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() as u64
    }
}

/// Number of pairs `(h, n)` with `h ∈ H3`, `n ∈ N \ H3` such that `n` sends
/// the vertex `H0 h` of the base facet to a different vertex of the same
/// facet. Any such pair merges two vertices of the base facet in `P/N`
/// without a facet symmetry doing so.
pub fn facet_vertex_collisions(model: &Model, n_codes: &[u32]) -> Result<u64, CensusError> {
    let vertices = CanonicalCosetSpace::new(model, 0)?;
    let h3 = model.subgroup_codes_of_words(&parabolic_words(3), ELEMENT_CAP)?;
    let in_h3: HashSet<u32> = h3.iter().copied().collect();
    let facet: HashSet<u32> = h3.iter().map(|&h| vertices.canonical(h)).collect();
    let mut count = 0;
    for &h in &h3 {
        let v = vertices.canonical(h);
        for &n in n_codes.iter().filter(|n| !in_h3.contains(n)) {
            let img = vertices.canonical(model.product(h, n));
            if img != v && facet.contains(&img) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Facet orbits of a semisparse subgroup: `d` full orbits (dodecahedra) and
/// `h` half orbits (hemi-dodecahedra).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCensus {
    pub order: u64,
    pub point_count: u64,
    pub d: u64,
    pub h: u64,
}

/// Classifies the facet orbits of `⟨words⟩`, a subgroup of order `order`.
pub fn orbit_census(space: &FaceCosetSpace, words: &[Word], order: u64) -> Result<OrbitCensus, CensusError> {
    if space.rank() != 3 {
        return Err(CensusError::Rank(space.rank()));
    }
    let hist = space.orbit_sizes(words);
    let mut census = OrbitCensus {
        order,
        point_count: space.point_count(),
        d: 0,
        h: 0,
    };
    for (&size, &count) in &hist {
        if size == order {
            census.d += count;
        } else if 2 * size == order {
            census.h += count;
        } else {
            let seed = (0..space.point_count() as u32)
                .find(|&s| space.orbit_size_at(words, s) == size)
                .expect("histogram entry has a seed");
            let (t, x) = space.split(seed);
            return Err(CensusError::NonSemisparse {
                orbit_size: size,
                order,
                seed_coset: t,
                seed_element: x,
            });
        }
    }
    assert_eq!(
        census.d * order + census.h * order / 2,
        census.point_count,
        "orbit sizes must sum to the facet count"
    );
    Ok(census)
}

/// Face spaces of all four ranks, built on first use.
pub struct FaceSpaces<'a> {
    model: &'a Model,
    limits: EnumLimits,
    spaces: [std::sync::OnceLock<FaceCosetSpace<'a>>; 4],
}

impl<'a> FaceSpaces<'a> {
    pub fn new(model: &'a Model, limits: EnumLimits) -> Self {
        FaceSpaces {
            model,
            limits,
            spaces: Default::default(),
        }
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn get(&self, rank: usize) -> Result<&FaceCosetSpace<'a>, CensusError> {
        if rank > 3 {
            return Err(CensusError::Rank(rank));
        }
        if let Some(s) = self.spaces[rank].get() {
            return Ok(s);
        }
        let s = build_face_space(self.model, rank, &self.limits)?;
        Ok(self.spaces[rank].get_or_init(|| s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutResult {
    Computed { conjugates: u64, aut_order: u64 },
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    /// Also count vertices, edges and 2-faces.
    pub all_ranks: bool,
    /// Compute `|N_W(N)/N|`.
    pub aut: bool,
    /// Bytes of subgroup keys the normalizer orbit may hold.
    pub budget_bytes: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            all_ranks: true,
            aut: true,
            budget_bytes: 512 << 20,
        }
    }
}

/// One row of a quotient census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientReport {
    pub subgroup: String,
    pub order: u64,
    pub d: u64,
    pub h: u64,
    /// Orbit counts on vertices, edges and 2-faces.
    pub vertices: Option<u64>,
    pub edges: Option<u64>,
    pub faces2: Option<u64>,
    /// All facets of one type.
    pub uniform: bool,
    pub aut: Option<AutResult>,
}

impl QuotientReport {
    pub fn facets(&self) -> u64 {
        self.d + self.h
    }

    pub fn aut_order(&self) -> Option<u64> {
        match self.aut {
            Some(AutResult::Computed { aut_order, .. }) => Some(aut_order),
            _ => None,
        }
    }
}

/// `|N_W(N)| / |N|` by the conjugation orbit of the element set of `N`.
pub fn aut_order(model: &Model, codes: Vec<u32>, budget_bytes: usize) -> Result<AutResult, CensusError> {
    match normalizer_via_orbit(model, SubgroupKey::from_codes(codes), budget_bytes, false) {
        Ok(o) => Ok(AutResult::Computed {
            conjugates: o.conjugates,
            aut_order: o.quotient_order() as u64,
        }),
        Err(StabError::BudgetExceeded { partial }) => Ok(AutResult::Skipped(format!(
            "conjugate orbit exceeds the memory budget of {budget_bytes} bytes after {partial} subgroups"
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn quotient_report(spaces: &FaceSpaces, spec: &SubgroupSpec, opts: &ReportOptions) -> Result<QuotientReport, CensusError> {
    let model = spaces.model();
    let codes = spec.codes(model, ELEMENT_CAP)?;
    let order = codes.len() as u64;
    let facets = orbit_census(spaces.get(3)?, &spec.words, order)?;
    let mut counts = [None; 3];
    if opts.all_ranks {
        for (rank, slot) in counts.iter_mut().enumerate() {
            *slot = Some(spaces.get(rank)?.orbit_sizes(&spec.words).values().sum());
        }
    }
    let aut = if opts.aut {
        Some(aut_order(model, codes, opts.budget_bytes)?)
    } else {
        None
    };
    Ok(QuotientReport {
        subgroup: spec.id.clone(),
        order,
        d: facets.d,
        h: facets.h,
        vertices: counts[0],
        edges: counts[1],
        faces2: counts[2],
        uniform: facets.d == 0 || facets.h == 0,
        aut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{omega_word, shared};
    use crate::semisparse::builtin;
    use crate::word::Alphabet;

    fn spaces() -> &'static FaceSpaces<'static> {
        static S: std::sync::OnceLock<FaceSpaces<'static>> = std::sync::OnceLock::new();
        S.get_or_init(|| FaceSpaces::new(shared(), EnumLimits::default()))
    }

    #[test]
    fn point_counts() {
        let s = spaces();
        let expect = [10_006_920u64, 30_020_760, 30_020_760, 5_003_460];
        for (rank, &n) in expect.iter().enumerate() {
            let sp = s.get(rank).unwrap();
            assert_eq!(sp.point_count(), n, "rank {rank}");
            assert_eq!(sp.point_count(), shared().order() / parabolic_order(rank));
        }
    }

    fn parabolic_order(rank: usize) -> u64 {
        shared().subgroup_codes_of_words(&parabolic_words(rank), ELEMENT_CAP).unwrap().len() as u64
    }

    #[test]
    fn generator_actions_are_involutions() {
        let s = spaces();
        s.get(3).unwrap().verify().unwrap();
        s.get(0).unwrap().verify().unwrap();
    }

    #[test]
    fn states_do_not_depend_on_representative() {
        let s = spaces();
        let alpha = Alphabet::s_alphabet();
        let samples = ["s0 s1 s2 s3 s1", "s3 s2 s1 s0 s3 s2 s3 s1", "(s0 s1 s2 s3)^7 s2"];
        for rank in 0..4 {
            let sp = s.get(rank).unwrap();
            let h = parabolic_words(rank);
            for text in samples {
                let w = alpha.parse(text).unwrap();
                let state = sp.state_of_word(&w);
                for k in &h {
                    let pre = k.concat(&h[0]).concat(&w);
                    assert_eq!(sp.state_of_word(&pre), state, "rank {rank}, {text}");
                }
                // Word action agrees with letter-by-letter action.
                let a = sp.word_action(&w);
                assert_eq!(sp.apply(&a, sp.base()), state);
            }
        }
    }

    #[test]
    fn trivial_and_omega_censuses() {
        let s = spaces();
        let f = s.get(3).unwrap();
        let c = orbit_census(f, &[], 1).unwrap();
        assert_eq!((c.d, c.h), (5_003_460, 0));
        let c = orbit_census(f, &[omega_word()], 2).unwrap();
        assert_eq!((c.d, c.h), (2_500_020, 3420));
    }

    #[test]
    fn non_semisparse_input_is_rejected() {
        let s = spaces();
        let f = s.get(3).unwrap();
        // ⟨s0, s1⟩ ≅ D10 fixes the base facet.
        let err = orbit_census(f, &[Word::gens(&[0]), Word::gens(&[1])], 10).unwrap_err();
        assert!(matches!(err, CensusError::NonSemisparse { order: 10, .. }), "{err}");
    }

    #[test]
    fn canonical_space_matches_parametrized() {
        let m = shared();
        let s = spaces();
        let alpha = Alphabet::s_alphabet();
        let subgroups = ["omega", "nu3", "nu2", "l2-order3"];
        let samples = ["", "s3", "s0 s1 s2 s3 s1", "(s0 s1 s2 s3)^7 s2"];
        for rank in [0, 3] {
            let canon = CanonicalCosetSpace::new(m, rank).unwrap();
            let sp = s.get(rank).unwrap();
            for name in subgroups {
                let spec = builtin(name).unwrap();
                let gens: Vec<u32> = spec.words.iter().map(|w| m.code_of_word(w)).collect();
                for text in samples {
                    let w = alpha.parse(text).unwrap();
                    assert_eq!(
                        canon.orbit_size(&gens, &w),
                        sp.orbit_size_at(&spec.words, sp.state_of_word(&w)),
                        "rank {rank}, {name}, {text:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn witnesses_merge_facet_vertices() {
        use crate::semisparse::{table1_catalog, SemisparseChecker, TABLE1_NOT_SEMISPARSE};
        let m = shared();
        let chk = SemisparseChecker::new(m);
        for row in table1_catalog().iter().filter(|r| r.expected_order.unwrap() <= 200) {
            let codes = row.codes(m, ELEMENT_CAP).unwrap();
            let v = chk.check(row, ELEMENT_CAP).unwrap();
            let n = match v.witness {
                Some(w) => {
                    let g = w.conjugator_code(m);
                    codes.iter().map(|&x| m.conjugate_code(x, g)).collect()
                }
                None => codes,
            };
            let collisions = facet_vertex_collisions(m, &n).unwrap();
            assert_eq!(collisions > 0, TABLE1_NOT_SEMISPARSE.contains(&row.id.as_str()), "row {}", row.id);
        }
        assert_eq!(facet_vertex_collisions(m, &[m.code_of_word(&Word::empty())]).unwrap(), 0);
    }

    #[test]
    fn small_builtin_reports() {
        let s = spaces();
        let opts = ReportOptions {
            all_ranks: false,
            ..Default::default()
        };
        let r = quotient_report(s, &builtin("nu3").unwrap(), &opts).unwrap();
        assert_eq!((r.d, r.h, r.uniform), (2_501_730, 0, true));
        assert_eq!(r.aut_order(), Some(1_755_600));
        let r = quotient_report(s, &builtin("omega").unwrap(), &opts).unwrap();
        assert_eq!(r.aut_order(), Some(205_200));
        assert!(!r.uniform);
        let r = quotient_report(s, &builtin("nu2").unwrap(), &opts).unwrap();
        assert_eq!((r.d, r.h), (1_667_820, 0));
        assert_eq!(r.aut_order(), Some(68_400));
        let r = quotient_report(s, &builtin("l2-order3").unwrap(), &opts).unwrap();
        assert_eq!((r.d, r.h), (1_667_820, 0));
        assert_eq!(r.aut_order(), Some(1_053_360));
    }

    #[test]
    fn face_counts_of_trivial_quotient() {
        let r = quotient_report(spaces(), &builtin("trivial").unwrap(), &ReportOptions::default()).unwrap();
        assert_eq!(r.vertices, Some(10_006_920));
        assert_eq!(r.edges, Some(30_020_760));
        assert_eq!(r.faces2, Some(30_020_760));
        assert_eq!(r.aut_order(), Some(600_415_200));
    }

    #[test]
    fn budget_exceeded_is_a_skip() {
        let m = shared();
        let codes = builtin("nu2").unwrap().codes(m, ELEMENT_CAP).unwrap();
        assert!(matches!(aut_order(m, codes, 1024).unwrap(), AutResult::Skipped(_)));
    }
}
