//! Base and strong generating set via deterministic Schreier–Sims.
//!
//! Every element `g` of the group factors uniquely as
//! `g = u[k-1] * ... * u[1] * u[0]` with `u[l]` taken from the transversal of
//! level `l`; the tuple of transversal positions, read as a mixed-radix number
//! with level 0 least significant, is the element's *code*. Codes are what the
//! orbit machinery in this module hashes.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::perm::Permutation;
use crate::word::{Letter, Word};

const NONE: u32 = u32::MAX;

#[derive(Error, Debug)]
pub enum StabError {
    #[error("degree mismatch: chain acts on {chain} points, element on {element}")]
    DegreeMismatch { chain: usize, element: usize },
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
    #[error("orbit exceeded its memory budget after {partial} entries")]
    BudgetExceeded { partial: usize },
    #[error("group order {0} is too large for 32-bit element codes")]
    OrderTooLarge(u128),
    #[error("element is not in the group")]
    NotMember,
    #[error("chain cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    /// Position of each point in `orbit`, or `NONE`.
    pos: Vec<u32>,
    reps: Vec<Permutation>,
    inv_reps: Vec<Permutation>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut pos = vec![NONE; degree];
        pos[base as usize] = 0;
        let id = Permutation::identity(degree);
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            pos,
            reps: vec![id.clone()],
            inv_reps: vec![id],
        }
    }

    fn push_point(&mut self, point: u32, rep: Permutation) {
        self.pos[point as usize] = self.orbit.len() as u32;
        self.orbit.push(point);
        self.inv_reps.push(rep.inverse());
        self.reps.push(rep);
    }

    /// Adds a generator and extends the orbit and transversal in place.
    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        let new = self.gens.len() - 1;
        let old_len = self.orbit.len();
        for k in 0..old_len {
            let q = self.gens[new].image(self.orbit[k]);
            if self.pos[q as usize] == NONE {
                let rep = self.reps[k].compose(&self.gens[new]);
                self.push_point(q, rep);
            }
        }
        let mut k = old_len;
        while k < self.orbit.len() {
            for gi in 0..self.gens.len() {
                let q = self.gens[gi].image(self.orbit[k]);
                if self.pos[q as usize] == NONE {
                    let rep = self.reps[k].compose(&self.gens[gi]);
                    self.push_point(q, rep);
                }
            }
            k += 1;
        }
    }
}

/// A verified stabilizer chain.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    generators: Vec<Permutation>,
    generator_inverses: Vec<Permutation>,
    levels: Vec<Level>,
    radix: Vec<u64>,
}

impl StabilizerChain {
    /// Deterministic Schreier–Sims. The base is grown by taking the first
    /// point moved by the earliest generator that fixes the current base, and
    /// later the first point moved by each new strong generator.
    pub fn build(degree: usize, generators: &[Permutation]) -> Self {
        for g in generators {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        let gens: Vec<Permutation> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<u32> = Vec::new();
        for g in &gens {
            if base.iter().all(|&b| g.image(b) == b) {
                base.push(g.first_moved_point().unwrap());
            }
        }
        let mut levels: Vec<Level> = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            let mut lvl = Level::new(b, degree);
            for g in gens.iter().filter(|g| base[..i].iter().all(|&c| g.image(c) == c)) {
                lvl.add_gen(g.clone());
            }
            levels.push(lvl);
        }

        let mut i = levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut restart = None;
            'scan: for k in 0..levels[lvl].orbit.len() {
                for s in 0..levels[lvl].gens.len() {
                    let (sg, trivial) = {
                        let l = &levels[lvl];
                        let q = l.gens[s].image(l.orbit[k]);
                        let j = l.pos[q as usize] as usize;
                        let mut sg = l.reps[k].compose(&l.gens[s]);
                        if sg == l.reps[j] {
                            (sg, true)
                        } else {
                            sg.compose_assign(&l.inv_reps[j]);
                            (sg, false)
                        }
                    };
                    if trivial {
                        continue;
                    }
                    let (h, fail) = strip(&levels, lvl + 1, sg);
                    if fail == levels.len() && h.is_identity() {
                        continue;
                    }
                    if fail == levels.len() {
                        let b = h.first_moved_point().unwrap();
                        levels.push(Level::new(b, degree));
                    }
                    for l in levels.iter_mut().take(fail + 1).skip(lvl + 1) {
                        l.add_gen(h.clone());
                    }
                    restart = Some(fail);
                    break 'scan;
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
        Self::assemble(degree, gens, levels)
    }

    fn assemble(degree: usize, generators: Vec<Permutation>, levels: Vec<Level>) -> Self {
        let mut radix = Vec::with_capacity(levels.len());
        let mut r: u64 = 1;
        for l in &levels {
            radix.push(r);
            r = r.saturating_mul(l.orbit.len() as u64);
        }
        let generator_inverses = generators.iter().map(|g| g.inverse()).collect();
        StabilizerChain {
            degree,
            generators,
            generator_inverses,
            levels,
            radix,
        }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::build(degree, &[])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Non-identity input generators, in input order.
    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Strong generators of the stabilizer of the first `level` base points.
    pub fn strong_generators(&self, level: usize) -> &[Permutation] {
        &self.levels[level].gens
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Orbit of the first base point (empty for the trivial group).
    pub fn basic_orbit(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    /// Transversal element mapping the level's base point to `point`.
    pub fn transversal_element(&self, level: usize, point: u32) -> Option<&Permutation> {
        let k = self.levels[level].pos[point as usize];
        (k != NONE).then(|| &self.levels[level].reps[k as usize])
    }

    /// Residue of sifting and the level at which sifting stopped
    /// (`levels` when it passed every level).
    pub fn sift(&self, g: &Permutation) -> (Permutation, usize) {
        strip(&self.levels, 0, g.clone())
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool, StabError> {
        if g.degree() != self.degree {
            return Err(StabError::DegreeMismatch {
                chain: self.degree,
                element: g.degree(),
            });
        }
        let (h, fail) = self.sift(g);
        Ok(fail == self.levels.len() && h.is_identity())
    }

    /// Code of an element given the images of all base points. The slice is
    /// used as scratch. Returns `None` if some image leaves a basic orbit.
    pub fn code_of_base_images(&self, images: &mut [u32]) -> Option<u64> {
        debug_assert_eq!(images.len(), self.levels.len());
        let mut code = 0u64;
        for l in 0..self.levels.len() {
            let lvl = &self.levels[l];
            let d = lvl.pos[images[l] as usize];
            if d == NONE {
                return None;
            }
            code += d as u64 * self.radix[l];
            let inv = &lvl.inv_reps[d as usize];
            for img in images.iter_mut().skip(l + 1) {
                *img = inv.image(*img);
            }
        }
        Some(code)
    }

    /// Code of a group element. Elements outside the group may alias; check
    /// with [`contains`](Self::contains) first when that matters.
    pub fn code_of(&self, g: &Permutation) -> Option<u64> {
        let mut imgs: Vec<u32> = self.levels.iter().map(|l| g.image(l.base)).collect();
        self.code_of_base_images(&mut imgs)
    }

    #[inline]
    fn digit(&self, code: u64, level: usize) -> usize {
        ((code / self.radix[level]) % self.levels[level].orbit.len() as u64) as usize
    }

    /// Image of a 0-based point under the element with the given code.
    pub fn image_under_code(&self, code: u64, point: u32) -> u32 {
        let mut p = point;
        for l in (0..self.levels.len()).rev() {
            p = self.levels[l].reps[self.digit(code, l)].image(p);
        }
        p
    }

    pub fn element(&self, code: u64) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for l in (0..self.levels.len()).rev() {
            g.compose_assign(&self.levels[l].reps[self.digit(code, l)]);
        }
        g
    }

    /// All elements, each exactly once, in code order.
    pub fn elements(&self, cap: u128) -> Result<ElementIter<'_>, StabError> {
        let order = self.order();
        if order > cap {
            return Err(StabError::CapExceeded { order, cap });
        }
        Ok(ElementIter::new(self))
    }

    /// Images of `points` under every element, in code order. Much cheaper
    /// than [`elements`](Self::elements) when only a few images are needed.
    pub fn point_images(&self, points: &[u32], cap: u128) -> Result<PointImagesIter<'_>, StabError> {
        let order = self.order();
        if order > cap {
            return Err(StabError::CapExceeded { order, cap });
        }
        Ok(PointImagesIter::new(self, points))
    }

    /// Orbit-stabilizer run for the conjugation action of the chain's own
    /// generators on `g`.
    pub fn conjugacy_orbit(&self, g: &Permutation, max_size: usize) -> Result<ConjugacyOrbit, StabError> {
        if !self.contains(g)? {
            return Err(StabError::NotMember);
        }
        let code = self.code_of(g).expect("member has a code");
        let orbit = conjugacy_orbit_codes(self, code, max_size)?;
        Ok(ConjugacyOrbit::from_sizes(self.order(), orbit.len()))
    }
}

fn strip(levels: &[Level], start: usize, mut h: Permutation) -> (Permutation, usize) {
    for (i, lvl) in levels.iter().enumerate().skip(start) {
        let b = h.image(lvl.base);
        let k = lvl.pos[b as usize];
        if k == NONE {
            return (h, i);
        }
        if k != 0 {
            h.compose_assign(&lvl.inv_reps[k as usize]);
        }
    }
    (h, levels.len())
}

/// Odometer over transversal products; recomputes only the changed prefix.
pub struct ElementIter<'a> {
    chain: &'a StabilizerChain,
    digits: Vec<usize>,
    /// `prefix[l] = u[k-1] * ... * u[l]`; `prefix[k]` is the identity.
    prefix: Vec<Permutation>,
    done: bool,
}

impl<'a> ElementIter<'a> {
    fn new(chain: &'a StabilizerChain) -> Self {
        let k = chain.levels.len();
        let prefix = vec![Permutation::identity(chain.degree); k + 1];
        ElementIter {
            chain,
            digits: vec![0; k],
            prefix,
            done: false,
        }
    }
}

impl Iterator for ElementIter<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let out = self.prefix[0].clone();
        // advance
        let k = self.digits.len();
        let mut l = 0;
        while l < k {
            self.digits[l] += 1;
            if self.digits[l] < self.chain.levels[l].orbit.len() {
                break;
            }
            self.digits[l] = 0;
            l += 1;
        }
        if l == k {
            self.done = true;
        } else {
            for m in (0..=l).rev() {
                let next = self.prefix[m + 1].compose(&self.chain.levels[m].reps[self.digits[m]]);
                self.prefix[m] = next;
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        if self.done {
            (0, Some(0))
        } else {
            (1, None)
        }
    }
}

/// Like [`ElementIter`] but tracks only the images of selected points.
pub struct PointImagesIter<'a> {
    chain: &'a StabilizerChain,
    digits: Vec<usize>,
    prefix: Vec<Vec<u32>>,
    done: bool,
}

impl<'a> PointImagesIter<'a> {
    fn new(chain: &'a StabilizerChain, points: &[u32]) -> Self {
        let k = chain.levels.len();
        let mut prefix = vec![points.to_vec(); k + 1];
        for m in (0..k).rev() {
            let next: Vec<u32> = prefix[m + 1].iter().map(|&p| chain.levels[m].reps[0].image(p)).collect();
            prefix[m] = next;
        }
        PointImagesIter {
            chain,
            digits: vec![0; k],
            prefix,
            done: false,
        }
    }

    /// Advances and hands the current images to `f`; false when exhausted.
    pub fn next_with<F: FnMut(&[u32])>(&mut self, mut f: F) -> bool {
        if self.done {
            return false;
        }
        f(&self.prefix[0]);
        let k = self.digits.len();
        let mut l = 0;
        while l < k {
            self.digits[l] += 1;
            if self.digits[l] < self.chain.levels[l].orbit.len() {
                break;
            }
            self.digits[l] = 0;
            l += 1;
        }
        if l == k {
            self.done = true;
        } else {
            for m in (0..=l).rev() {
                let rep = &self.chain.levels[m].reps[self.digits[m]];
                let (lo, hi) = self.prefix.split_at_mut(m + 1);
                for (dst, &src) in lo[m].iter_mut().zip(hi[0].iter()) {
                    *dst = rep.image(src);
                }
            }
        }
        true
    }
}

/// Orbit size and centralizer order from one orbit-stabilizer run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConjugacyOrbit {
    pub orbit_size: u64,
    pub centralizer_order: u128,
}

impl ConjugacyOrbit {
    fn from_sizes(group_order: u128, orbit_len: usize) -> Self {
        let orbit_size = orbit_len as u64;
        assert_eq!(group_order % orbit_size as u128, 0, "orbit size must divide the group order");
        ConjugacyOrbit {
            orbit_size,
            centralizer_order: group_order / orbit_size as u128,
        }
    }
}

/// A group whose elements have integer codes and on which each generator
/// acts by conjugation.
pub trait ConjugationAction: Sync {
    fn group_order(&self) -> u128;
    fn generator_count(&self) -> usize;
    /// Code of `g^-1 x g` where `g` is generator `gen` and `x` has `code`.
    fn conjugate(&self, code: u64, gen: usize) -> u64;
}

impl ConjugationAction for StabilizerChain {
    fn group_order(&self) -> u128 {
        self.order()
    }

    fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn conjugate(&self, code: u64, gen: usize) -> u64 {
        let g = &self.generators[gen];
        let gi = &self.generator_inverses[gen];
        let mut imgs: Vec<u32> = self
            .levels
            .iter()
            .map(|l| g.image(self.image_under_code(code, gi.image(l.base))))
            .collect();
        self.code_of_base_images(&mut imgs).expect("conjugate stays in the group")
    }
}

/// Conjugacy class of `code`, in breadth-first discovery order.
pub fn conjugacy_orbit_codes<A: ConjugationAction + ?Sized>(
    action: &A,
    code: u64,
    max_size: usize,
) -> Result<Vec<u64>, StabError> {
    let mut seen: HashSet<u64> = HashSet::new();
    let mut orbit = vec![code];
    seen.insert(code);
    let mut k = 0;
    while k < orbit.len() {
        let x = orbit[k];
        for g in 0..action.generator_count() {
            let y = action.conjugate(x, g);
            if seen.insert(y) {
                if orbit.len() >= max_size {
                    return Err(StabError::BudgetExceeded { partial: orbit.len() });
                }
                orbit.push(y);
            }
        }
        k += 1;
    }
    Ok(orbit)
}

/// Canonical fingerprint of a subgroup: its sorted element codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupKey(Box<[u32]>);

impl SubgroupKey {
    pub fn from_codes(mut codes: Vec<u32>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        SubgroupKey(codes.into_boxed_slice())
    }

    pub fn codes(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    fn conjugate<A: ConjugationAction + ?Sized>(&self, action: &A, gen: usize) -> SubgroupKey {
        SubgroupKey::from_codes(self.0.iter().map(|&c| action.conjugate(c as u64, gen) as u32).collect())
    }

    fn heap_bytes(&self) -> usize {
        self.0.len() * 4 + 64
    }
}

/// Result of orbit-stabilizer on the conjugates of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizerOrbit {
    pub subgroup_order: u64,
    pub conjugates: u64,
    pub normalizer_order: u128,
    /// Schreier words (over the action's generators) generating the
    /// normalizer, when requested.
    pub schreier_words: Option<Vec<Word>>,
}

impl NormalizerOrbit {
    /// `|N_G(N)| / |N|`.
    pub fn quotient_order(&self) -> u128 {
        self.normalizer_order / self.subgroup_order as u128
    }
}

/// Runs the conjugation action of the ambient group on subgroup keys starting
/// from `subgroup`, within `budget_bytes` of key storage.
pub fn normalizer_via_orbit<A: ConjugationAction + ?Sized>(
    action: &A,
    subgroup: SubgroupKey,
    budget_bytes: usize,
    want_words: bool,
) -> Result<NormalizerOrbit, StabError> {
    if action.group_order() > u32::MAX as u128 + 1 {
        return Err(StabError::OrderTooLarge(action.group_order()));
    }
    let subgroup_order = subgroup.order() as u64;
    let per_key = subgroup.heap_bytes() + 16;
    let ngens = action.generator_count();
    let mut index: HashMap<SubgroupKey, u32> = HashMap::new();
    let mut orbit: Vec<SubgroupKey> = vec![subgroup.clone()];
    let mut parent: Vec<(u32, u8)> = vec![(NONE, 0)];
    let mut edges: Vec<(u32, u8, u32)> = Vec::new();
    index.insert(subgroup, 0);
    let mut k = 0;
    while k < orbit.len() {
        for g in 0..ngens {
            let y = orbit[k].conjugate(action, g);
            match index.get(&y) {
                Some(&j) => {
                    if want_words {
                        edges.push((k as u32, g as u8, j));
                    }
                }
                None => {
                    if orbit.len().saturating_mul(per_key).saturating_mul(2) > budget_bytes {
                        return Err(StabError::BudgetExceeded { partial: orbit.len() });
                    }
                    let j = orbit.len() as u32;
                    index.insert(y.clone(), j);
                    orbit.push(y);
                    parent.push((k as u32, g as u8));
                }
            }
        }
        k += 1;
    }
    let conjugates = orbit.len() as u64;
    let order = action.group_order();
    assert_eq!(order % conjugates as u128, 0, "orbit length must divide the group order");
    let schreier_words = want_words.then(|| {
        let path = |mut i: u32| {
            let mut letters = Vec::new();
            while parent[i as usize].0 != NONE {
                let (p, g) = parent[i as usize];
                letters.push(Letter::new(g as usize));
                i = p;
            }
            letters.reverse();
            Word::from_letters(letters)
        };
        edges
            .iter()
            .filter(|&&(i, g, j)| parent[j as usize] != (i, g))
            .map(|&(i, g, j)| {
                path(i)
                    .concat(&Word::from_letters(vec![Letter::new(g as usize)]))
                    .concat(&path(j).inverse())
            })
            .collect()
    });
    Ok(NormalizerOrbit {
        subgroup_order,
        conjugates,
        normalizer_order: order / conjugates as u128,
        schreier_words,
    })
}

/// Normalizer order of `⟨n_generators⟩` in the group of `ambient`, by
/// conjugating subgroup keys with the ambient chain's generators.
pub fn normalizer_of(
    n_generators: &[Permutation],
    ambient: &StabilizerChain,
    element_cap: u128,
    budget_bytes: usize,
) -> Result<NormalizerOrbit, StabError> {
    let n = StabilizerChain::build(ambient.degree(), n_generators);
    let key = subgroup_key(&n, ambient, element_cap)?;
    normalizer_via_orbit(ambient, key, budget_bytes, false)
}

/// Subgroup key of `sub` with respect to the codes of `ambient`.
pub fn subgroup_key(
    sub: &StabilizerChain,
    ambient: &StabilizerChain,
    element_cap: u128,
) -> Result<SubgroupKey, StabError> {
    if ambient.order() > u32::MAX as u128 + 1 {
        return Err(StabError::OrderTooLarge(ambient.order()));
    }
    let base = ambient.base();
    let mut it = sub.point_images(&base, element_cap)?;
    let mut codes = Vec::with_capacity(sub.order() as usize);
    let mut scratch = vec![0u32; base.len()];
    let mut ok = true;
    while it.next_with(|imgs| {
        scratch.copy_from_slice(imgs);
        match ambient.code_of_base_images(&mut scratch) {
            Some(c) => codes.push(c as u32),
            None => ok = false,
        }
    }) {}
    if !ok {
        return Err(StabError::NotMember);
    }
    Ok(SubgroupKey::from_codes(codes))
}

/// Points of the orbit of `point` under `gens`, in discovery order.
pub fn orbit(point: u32, gens: &[Permutation]) -> Vec<u32> {
    let degree = gens.first().map_or(point as usize + 1, |g| g.degree());
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut out = vec![point];
    let mut queue = VecDeque::from([point]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.image(p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                out.push(q);
                queue.push_back(q);
            }
        }
    }
    out
}

// --- binary cache -----------------------------------------------------------

const MAGIC: &[u8; 8] = b"W535CHN\0";
const VERSION: u32 = 1;

/// Hex SHA-256 of the generators' degree and image arrays.
pub fn generators_hash(degree: usize, gens: &[Permutation]) -> String {
    let mut h = Sha256::new();
    h.update((degree as u64).to_le_bytes());
    h.update((gens.len() as u64).to_le_bytes());
    for g in gens {
        for &p in g.images() {
            h.update(p.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn put_u32(w: &mut impl Write, x: u32) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn get_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn put_perm(w: &mut impl Write, p: &Permutation) -> io::Result<()> {
    for &x in p.images() {
        put_u32(w, x)?;
    }
    Ok(())
}

fn get_perm(r: &mut impl Read, degree: usize) -> Result<Permutation, StabError> {
    let mut images = Vec::with_capacity(degree);
    for _ in 0..degree {
        images.push(get_u32(r)?);
    }
    Permutation::from_images(images).map_err(|e| StabError::Cache(e.to_string()))
}

impl StabilizerChain {
    /// Header magic, version, degree, generators, then per level the base
    /// point, strong generators and transversal (orbit point + element).
    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(MAGIC)?;
        put_u32(w, VERSION)?;
        put_u32(w, self.degree as u32)?;
        put_u32(w, self.generators.len() as u32)?;
        for g in &self.generators {
            put_perm(w, g)?;
        }
        put_u32(w, self.levels.len() as u32)?;
        for l in &self.levels {
            put_u32(w, l.base)?;
            put_u32(w, l.gens.len() as u32)?;
            for g in &l.gens {
                put_perm(w, g)?;
            }
            put_u32(w, l.orbit.len() as u32)?;
            for (p, rep) in l.orbit.iter().zip(&l.reps) {
                put_u32(w, *p)?;
                put_perm(w, rep)?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, StabError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(StabError::Cache("bad magic".into()));
        }
        let version = get_u32(r)?;
        if version != VERSION {
            return Err(StabError::Cache(format!("unsupported version {version}")));
        }
        let degree = get_u32(r)? as usize;
        let ngens = get_u32(r)? as usize;
        let mut gens = Vec::with_capacity(ngens);
        for _ in 0..ngens {
            gens.push(get_perm(r, degree)?);
        }
        let nlevels = get_u32(r)? as usize;
        let mut levels = Vec::with_capacity(nlevels);
        for _ in 0..nlevels {
            let base = get_u32(r)?;
            if base as usize >= degree {
                return Err(StabError::Cache("base point out of range".into()));
            }
            let mut lvl = Level::new(base, degree);
            lvl.orbit.clear();
            lvl.reps.clear();
            lvl.inv_reps.clear();
            lvl.pos[base as usize] = NONE;
            let nsg = get_u32(r)? as usize;
            for _ in 0..nsg {
                lvl.gens.push(get_perm(r, degree)?);
            }
            let norb = get_u32(r)? as usize;
            for _ in 0..norb {
                let p = get_u32(r)?;
                let rep = get_perm(r, degree)?;
                if p as usize >= degree || rep.image(base) != p || lvl.pos[p as usize] != NONE {
                    return Err(StabError::Cache("inconsistent transversal".into()));
                }
                lvl.push_point(p, rep);
            }
            levels.push(lvl);
        }
        Ok(Self::assemble(degree, gens, levels))
    }

    /// Loads the chain for `gens` from `dir` if cached, else builds and
    /// stores it.
    pub fn load_or_build(dir: &Path, degree: usize, gens: &[Permutation]) -> Result<Self, StabError> {
        let path: PathBuf = dir.join(format!("{}.chain", generators_hash(degree, gens)));
        if let Ok(f) = std::fs::File::open(&path) {
            let chain = Self::read_from(&mut io::BufReader::new(f))?;
            let expected: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
            if chain.generators == expected {
                return Ok(chain);
            }
            return Err(StabError::Cache(format!("{} does not match its generators", path.display())));
        }
        let chain = Self::build(degree, gens);
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        {
            let mut w = io::BufWriter::new(std::fs::File::create(&tmp)?);
            chain.write_to(&mut w)?;
            w.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    /// Closure by breadth-first multiplication; the independent oracle.
    fn brute_closure(gens: &[Permutation], degree: usize) -> HashSet<Permutation> {
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = x.compose(g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen
    }

    fn m12_like() -> Vec<Permutation> {
        // generators of the Mathieu group M11 on 11 points (order 7920)
        vec![p("(1,2,3,4,5,6,7,8,9,10,11)", 11), p("(3,7,11,8)(4,10,5,6)", 11)]
    }

    #[test]
    fn trivial_chain() {
        let c = StabilizerChain::trivial(10);
        assert_eq!(c.order(), 1);
        let all: Vec<_> = c.elements(10).unwrap().collect();
        assert_eq!(all, vec![Permutation::identity(10)]);
        assert!(!c.contains(&p("(1,2)", 10)).unwrap());
        assert!(c.contains(&Permutation::identity(10)).unwrap());
        assert!(matches!(c.contains(&Permutation::identity(3)), Err(StabError::DegreeMismatch { .. })));
    }

    #[test]
    fn symmetric_and_mathieu_orders() {
        let s6 = StabilizerChain::build(6, &[p("(1,2)", 6), p("(1,2,3,4,5,6)", 6)]);
        assert_eq!(s6.order(), 720);
        let m11 = StabilizerChain::build(11, &m12_like());
        assert_eq!(m11.order(), 7920);
        let prod: u128 = m11.transversal_sizes().iter().map(|&x| x as u128).product();
        assert_eq!(prod, 7920);
    }

    #[test]
    fn membership_matches_brute_force() {
        let gens = vec![p("(1,2,3)(4,5)", 7), p("(2,6,7)", 7)];
        let chain = StabilizerChain::build(7, &gens);
        let closure = brute_closure(&gens, 7);
        assert_eq!(chain.order(), closure.len() as u128);
        let s7 = StabilizerChain::build(7, &[p("(1,2)", 7), p("(1,2,3,4,5,6,7)", 7)]);
        for g in s7.elements(10_000).unwrap() {
            assert_eq!(chain.contains(&g).unwrap(), closure.contains(&g));
        }
    }

    #[test]
    fn enumeration_is_exact_and_code_ordered() {
        let m11 = StabilizerChain::build(11, &m12_like());
        let elems: Vec<_> = m11.elements(10_000).unwrap().collect();
        assert_eq!(elems.len(), 7920);
        let set: HashSet<_> = elems.iter().cloned().collect();
        assert_eq!(set.len(), 7920);
        for (i, g) in elems.iter().enumerate().step_by(97) {
            assert_eq!(m11.code_of(g), Some(i as u64));
            assert_eq!(&m11.element(i as u64), g);
            assert_eq!(m11.image_under_code(i as u64, 4), g.image(4));
        }
        assert!(matches!(m11.elements(100), Err(StabError::CapExceeded { .. })));
        let base = m11.base();
        let mut it = m11.point_images(&base, 10_000).unwrap();
        let mut k = 0usize;
        while it.next_with(|imgs| {
            let expect: Vec<u32> = base.iter().map(|&b| elems[k].image(b)).collect();
            assert_eq!(imgs, &expect[..]);
        }) {
            k += 1;
        }
        assert_eq!(k, 7920);
    }

    #[test]
    fn dihedral_subgroup_of_order_six() {
        // <(1,2),(2,3)> in S4 is S3
        let c = StabilizerChain::build(4, &[p("(1,2)", 4), p("(2,3)", 4)]);
        let oracle = brute_closure(&[p("(1,2)", 4), p("(2,3)", 4)], 4);
        let elems: HashSet<_> = c.elements(100).unwrap().collect();
        assert_eq!(elems.len(), 6);
        assert_eq!(elems, oracle);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = StabilizerChain::build(11, &m12_like());
        let b = StabilizerChain::build(11, &m12_like());
        assert_eq!(a.base(), b.base());
        assert_eq!(a.base()[0], 0);
        for l in 0..a.levels.len() {
            assert_eq!(a.levels[l].orbit, b.levels[l].orbit);
            assert_eq!(a.levels[l].reps, b.levels[l].reps);
        }
        for (l, lvl) in a.levels.iter().enumerate() {
            for g in &lvl.gens {
                for prev in &a.levels[..l] {
                    assert_eq!(g.image(prev.base), prev.base);
                }
            }
        }
    }

    #[test]
    fn conjugacy_orbit_stabilizer_identity() {
        let s5 = StabilizerChain::build(5, &[p("(1,2)", 5), p("(1,2,3,4,5)", 5)]);
        let id = s5.conjugacy_orbit(&Permutation::identity(5), 100).unwrap();
        assert_eq!(id.orbit_size, 1);
        assert_eq!(id.centralizer_order, 120);
        let t = s5.conjugacy_orbit(&p("(1,2)", 5), 100).unwrap();
        assert_eq!(t.orbit_size, 10);
        // centralizer by brute force
        let cent = s5
            .elements(200)
            .unwrap()
            .filter(|g| g.commutes_with(&p("(1,2)", 5)))
            .count();
        assert_eq!(t.centralizer_order, cent as u128);
        let c5 = s5.conjugacy_orbit(&p("(1,2,3,4,5)", 5), 100).unwrap();
        assert_eq!(c5.orbit_size, 24);
        assert!(matches!(s5.conjugacy_orbit(&p("(1,2,3,4,5)", 5), 10), Err(StabError::BudgetExceeded { .. })));
    }

    #[test]
    fn normalizers_in_s5() {
        let s5 = StabilizerChain::build(5, &[p("(1,2)", 5), p("(1,2,3,4,5)", 5)]);
        // <(1,2,3,4,5)>: normalizer of order 20
        let r = normalizer_of(&[p("(1,2,3,4,5)", 5)], &s5, 1000, 1 << 20).unwrap();
        assert_eq!(r.conjugates, 6);
        assert_eq!(r.normalizer_order, 20);
        assert_eq!(r.quotient_order(), 4);
        // A5 is normal
        let a5 = normalizer_of(&[p("(1,2,3)", 5), p("(1,2,3,4,5)", 5)], &s5, 1000, 1 << 20).unwrap();
        assert_eq!(a5.conjugates, 1);
        assert_eq!(a5.normalizer_order, 120);
        // brute-force normalizer of <(1,2)(3,4)>
        let v = p("(1,2)(3,4)", 5);
        let nsub = StabilizerChain::build(5, std::slice::from_ref(&v));
        let brute = s5
            .elements(200)
            .unwrap()
            .filter(|g| nsub.contains(&v.conjugate_by(g)).unwrap())
            .count();
        let r = normalizer_of(&[v], &s5, 1000, 1 << 20).unwrap();
        assert_eq!(r.normalizer_order, brute as u128);
        assert!(matches!(
            normalizer_of(&[p("(1,2)", 5)], &s5, 1000, 100),
            Err(StabError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn schreier_words_generate_the_normalizer() {
        use crate::word::GeneratorAssignment;
        let s5 = StabilizerChain::build(5, &[p("(1,2)", 5), p("(1,2,3,4,5)", 5)]);
        let n = StabilizerChain::build(5, &[p("(1,2,3)", 5)]);
        let key = subgroup_key(&n, &s5, 100).unwrap();
        let r = normalizer_via_orbit(&s5, key, 1 << 20, true).unwrap();
        let asg = GeneratorAssignment::new(s5.generators().to_vec()).unwrap();
        let gens: Vec<Permutation> = r
            .schreier_words
            .unwrap()
            .iter()
            .map(|w| asg.evaluate(w).unwrap())
            .collect();
        let norm = StabilizerChain::build(5, &gens);
        assert_eq!(norm.order(), r.normalizer_order);
        assert_eq!(norm.order(), 12);
    }

    #[test]
    fn cache_round_trip() {
        let m11 = StabilizerChain::build(11, &m12_like());
        let mut buf = Vec::new();
        m11.write_to(&mut buf).unwrap();
        let back = StabilizerChain::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.order(), 7920);
        assert_eq!(back.base(), m11.base());
        assert_eq!(back.code_of(&p("(1,2,3,4,5,6,7,8,9,10,11)", 11)), m11.code_of(&p("(1,2,3,4,5,6,7,8,9,10,11)", 11)));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(StabilizerChain::read_from(&mut bad.as_slice()), Err(StabError::Cache(_))));

        let dir = std::env::temp_dir().join(format!("w535-cache-{}", std::process::id()));
        let a = StabilizerChain::load_or_build(&dir, 11, &m12_like()).unwrap();
        let b = StabilizerChain::load_or_build(&dir, 11, &m12_like()).unwrap();
        assert_eq!(a.order(), b.order());
        assert_eq!(generators_hash(11, &m12_like()).len(), 64);
        std::fs::remove_dir_all(&dir).ok();
    }
}
