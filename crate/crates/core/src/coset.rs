//! Todd–Coxeter coset enumeration.
//!
//! Two strategies are available: HLT (relator-driven, with a lookahead pass
//! when the coset limit is reached) and Felsch (definition-driven, with a
//! deduction stack). Coincidences are resolved with a union-find forest and a
//! queue; the surviving coset of a merge is always the older one, so coset 0
//! (the subgroup itself) never dies.
//!
//! Cosets are right cosets: `table.image(c, x)` is `c·x`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::Permutation;
use crate::presentation::Presentation;
use crate::word::{Alphabet, GeneratorAssignment, Letter, Word};

const NONE: u32 = u32::MAX;
const DEDUCTION_STACK_CAP: usize = 1 << 20;
const COMPACT_MIN_ROWS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Hlt,
    Felsch,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!("unknown strategy {other:?} (expected hlt or felsch)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Hlt => "hlt",
            Strategy::Felsch => "felsch",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumLimits {
    /// Maximum number of simultaneously live cosets.
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_cosets: 20_000_000,
            strategy: Strategy::Hlt,
        }
    }
}

impl EnumLimits {
    pub fn new(max_cosets: usize, strategy: Strategy) -> Self {
        EnumLimits { max_cosets, strategy }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub total_defined: u64,
    pub max_live: usize,
    pub coincidences: u64,
    pub lookaheads: u32,
    pub compactions: u32,
}

#[derive(Error, Debug)]
pub enum CosetError {
    #[error("coset limit of {max_cosets} reached ({live} live, {} defined in total)", stats.total_defined)]
    LimitExceeded {
        max_cosets: usize,
        live: usize,
        stats: EnumStats,
        partial: Box<CosetTable>,
    },
    #[error("word uses generator {0}, which is not in the presentation")]
    BadGenerator(usize),
    #[error("coset table is incomplete")]
    Incomplete,
    #[error("relator {index} does not act trivially on the cosets")]
    RelatorFails { index: usize },
    #[error("subgroup generator {index} does not fix the subgroup coset")]
    SubgroupFails { index: usize },
}

/// Column layout: an involutory generator has one column, any other
/// generator has a column for itself followed by one for its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Columns {
    of_gen: Vec<[u32; 2]>,
    inv: Vec<u32>,
    letter: Vec<Letter>,
}

impl Columns {
    fn new(alphabet: &Alphabet) -> Self {
        let mut of_gen = Vec::new();
        let mut inv = Vec::new();
        let mut letter = Vec::new();
        for g in 0..alphabet.len() {
            let c = inv.len() as u32;
            if alphabet.is_involutory(g) {
                of_gen.push([c, c]);
                inv.push(c);
                letter.push(Letter::new(g));
            } else {
                of_gen.push([c, c + 1]);
                inv.extend([c + 1, c]);
                letter.extend([Letter::new(g), Letter::new(g).inv()]);
            }
        }
        Columns { of_gen, inv, letter }
    }

    fn len(&self) -> usize {
        self.inv.len()
    }

    fn of_letter(&self, l: Letter) -> u32 {
        self.of_gen[l.gen][l.inverse as usize]
    }

    fn word(&self, w: &Word, ngens: usize) -> Result<Vec<u32>, CosetError> {
        w.letters()
            .iter()
            .map(|&l| {
                if l.gen < ngens {
                    Ok(self.of_letter(l))
                } else {
                    Err(CosetError::BadGenerator(l.gen))
                }
            })
            .collect()
    }
}

/// A (possibly partial) coset table.
#[derive(Clone, Debug)]
pub struct CosetTable {
    alphabet: Alphabet,
    relators: Vec<Word>,
    subgroup: Vec<Word>,
    cols: Columns,
    rows: Vec<u32>,
    len: usize,
    complete: bool,
    /// Breadth-first spanning tree `(parent, column)`, present once standardized.
    tree: Option<Vec<(u32, u32)>>,
    stats: EnumStats,
}

impl CosetTable {
    /// Number of cosets in the table.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The index of the subgroup, if the enumeration completed.
    pub fn index(&self) -> Option<usize> {
        self.complete.then_some(self.len)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn is_standardized(&self) -> bool {
        self.tree.is_some()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn subgroup(&self) -> &[Word] {
        &self.subgroup
    }

    pub fn stats(&self) -> &EnumStats {
        &self.stats
    }

    /// `coset·letter`, or `None` for an undefined entry.
    pub fn image(&self, coset: u32, letter: Letter) -> Option<u32> {
        let e = self.rows[coset as usize * self.cols.len() + self.cols.of_letter(letter) as usize];
        (e != NONE).then_some(e)
    }

    /// `coset·word`, or `None` if the trace hits an undefined entry.
    pub fn trace(&self, coset: u32, word: &Word) -> Option<u32> {
        word.letters().iter().try_fold(coset, |c, &l| self.image(c, l))
    }

    /// Renumbers cosets in breadth-first order from coset 0, taking columns
    /// in generator order, and records the spanning tree.
    pub fn standardize(&mut self) -> Result<(), CosetError> {
        if !self.complete {
            return Err(CosetError::Incomplete);
        }
        let n = self.cols.len();
        let mut new_of = vec![NONE; self.len];
        let mut order = Vec::with_capacity(self.len);
        let mut tree = Vec::with_capacity(self.len);
        new_of[0] = 0;
        order.push(0u32);
        tree.push((NONE, NONE));
        let mut i = 0;
        while i < order.len() {
            let c = order[i] as usize;
            for x in 0..n {
                let d = self.rows[c * n + x] as usize;
                if new_of[d] == NONE {
                    new_of[d] = order.len() as u32;
                    order.push(d as u32);
                    tree.push((i as u32, x as u32));
                }
            }
            i += 1;
        }
        debug_assert_eq!(order.len(), self.len, "complete coset tables are connected");
        let mut rows = vec![NONE; self.rows.len()];
        for (new, &old) in order.iter().enumerate() {
            for x in 0..n {
                rows[new * n + x] = new_of[self.rows[old as usize * n + x] as usize];
            }
        }
        self.rows = rows;
        self.tree = Some(tree);
        Ok(())
    }

    /// A word `w` with `H·w` equal to the given coset. Needs a standardized
    /// table; the words are the breadth-first tree paths, so they are
    /// shortest in the Cayley graph of the coset action.
    pub fn representative(&self, coset: u32) -> Option<Word> {
        let tree = self.tree.as_ref()?;
        let mut letters = Vec::new();
        let mut c = coset;
        while c != 0 {
            let (p, x) = *tree.get(c as usize)?;
            letters.push(self.cols.letter[x as usize]);
            c = p;
        }
        letters.reverse();
        Some(Word::from_letters(letters))
    }

    pub fn representatives(&self) -> Option<Vec<Word>> {
        (0..self.len as u32).map(|c| self.representative(c)).collect()
    }

    /// The permutation action of the generators on the cosets, checked
    /// against every relator and subgroup generator.
    pub fn coset_action(&self) -> Result<GeneratorAssignment, CosetError> {
        if !self.complete {
            return Err(CosetError::Incomplete);
        }
        let n = self.cols.len();
        let perms: Vec<Permutation> = self
            .cols
            .of_gen
            .iter()
            .map(|cols| {
                let images = (0..self.len).map(|c| self.rows[c * n + cols[0] as usize]).collect();
                Permutation::from_images(images).expect("complete coset table columns are bijections")
            })
            .collect();
        let action = GeneratorAssignment::new(perms).expect("equal degrees");
        for (index, r) in self.relators.iter().enumerate() {
            if !action.evaluate(r).expect("relator generators in range").is_identity() {
                return Err(CosetError::RelatorFails { index });
            }
        }
        for (index, w) in self.subgroup.iter().enumerate() {
            if action.trace_point(w, 0) != 0 {
                return Err(CosetError::SubgroupFails { index });
            }
        }
        Ok(action)
    }
}

#[derive(Debug)]
struct Full;

struct Enumerator {
    n: usize,
    inv: Vec<u32>,
    table: Vec<u32>,
    parent: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    tail: u32,
    live: usize,
    dead: usize,
    max_cosets: usize,
    queue: Vec<u32>,
    track: bool,
    deductions: Vec<(u32, u32)>,
    overflow: bool,
    stats: EnumStats,
}

impl Enumerator {
    fn new(cols: &Columns, max_cosets: usize) -> Self {
        let n = cols.len();
        Enumerator {
            n,
            inv: cols.inv.clone(),
            table: vec![NONE; n],
            parent: vec![0],
            next: vec![NONE],
            prev: vec![NONE],
            tail: 0,
            live: 1,
            dead: 0,
            max_cosets: max_cosets.max(1),
            queue: Vec::new(),
            track: false,
            deductions: Vec::new(),
            overflow: false,
            stats: EnumStats {
                total_defined: 1,
                max_live: 1,
                ..EnumStats::default()
            },
        }
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.n + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, d: u32) {
        self.table[c as usize * self.n + x as usize] = d;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn push_deduction(&mut self, c: u32, x: u32) {
        if !self.track {
            return;
        }
        if self.deductions.len() < DEDUCTION_STACK_CAP {
            self.deductions.push((c, x));
        } else {
            self.overflow = true;
        }
    }

    /// Sets `c·x = d` and `d·x⁻¹ = c`.
    fn join(&mut self, c: u32, x: u32, d: u32) {
        self.set(c, x, d);
        let xi = self.inv[x as usize];
        self.set(d, xi, c);
        self.push_deduction(c, x);
    }

    fn define(&mut self, c: u32, x: u32) -> Result<u32, Full> {
        if self.live >= self.max_cosets {
            return Err(Full);
        }
        let d = self.parent.len() as u32;
        self.table.extend(std::iter::repeat_n(NONE, self.n));
        self.parent.push(d);
        self.next.push(NONE);
        self.prev.push(self.tail);
        self.next[self.tail as usize] = d;
        self.tail = d;
        self.live += 1;
        self.stats.total_defined += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        self.join(c, x, d);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let nx = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = nx;
        }
        r
    }

    fn merge(&mut self, k: u32, l: u32) {
        let phi = self.rep(k);
        let psi = self.rep(l);
        if phi == psi {
            return;
        }
        let (mu, nu) = if phi < psi { (phi, psi) } else { (psi, phi) };
        self.parent[nu as usize] = mu;
        self.queue.push(nu);
        // Unlink, leaving next[nu] intact so cursors on nu can move forward.
        let p = self.prev[nu as usize];
        let nx = self.next[nu as usize];
        self.next[p as usize] = nx;
        if nx != NONE {
            self.prev[nx as usize] = p;
        } else {
            self.tail = p;
        }
        self.live -= 1;
        self.dead += 1;
        self.stats.coincidences += 1;
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.n as u32 {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                let xi = self.inv[x as usize];
                self.set(d, xi, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != NONE {
                    self.merge(nu, mx);
                } else {
                    let nxi = self.get(nu, xi);
                    if nxi != NONE {
                        self.merge(mu, nxi);
                    } else {
                        self.join(mu, x, nu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Traces `w` from `c` in both directions; closes a single gap by
    /// deduction and resolves a mismatch as a coincidence. With `fill`,
    /// longer gaps are bridged with new cosets.
    fn scan(&mut self, c: u32, w: &[u32], fill: bool) -> Result<(), Full> {
        let mut f = c;
        let mut i = 0;
        let mut b = c;
        let mut j = w.len();
        loop {
            while i < j {
                let e = self.get(f, w[i]);
                if e == NONE {
                    break;
                }
                f = e;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let e = self.get(b, self.inv[w[j - 1] as usize]);
                if e == NONE {
                    break;
                }
                b = e;
                j -= 1;
            }
            if j == i {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            if j == i + 1 {
                self.join(f, w[i], b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            f = self.define(f, w[i])?;
            i += 1;
        }
    }

    fn next_live(&self, c: u32) -> u32 {
        let mut n = self.next[c as usize];
        while n != NONE && !self.is_live(n) {
            n = self.next[n as usize];
        }
        n
    }

    fn first_hole(&self, c: u32) -> Option<u32> {
        (0..self.n as u32).find(|&x| self.get(c, x) == NONE)
    }

    /// Scans every relator at every live coset without defining new ones.
    fn lookahead(&mut self, rels: &[Vec<u32>]) {
        self.stats.lookaheads += 1;
        let mut c = 0;
        while c != NONE {
            for r in rels {
                if !self.is_live(c) {
                    break;
                }
                let _ = self.scan(c, r, false);
            }
            c = self.next_live(c);
        }
    }

    /// Drops dead rows once they make up a quarter of the table. The cursor
    /// is moved to the next live coset first and renumbered afterwards.
    fn maybe_compact(&mut self, cursor: &mut u32) {
        let rows = self.parent.len();
        if rows < COMPACT_MIN_ROWS || self.dead * 4 < rows {
            return;
        }
        if *cursor != NONE && !self.is_live(*cursor) {
            *cursor = self.next_live(*cursor);
        }
        let map = self.compact();
        if *cursor != NONE {
            *cursor = map[*cursor as usize];
        }
    }

    fn compact(&mut self) -> Vec<u32> {
        debug_assert!(self.queue.is_empty() && self.deductions.is_empty());
        let rows = self.parent.len();
        let mut map = vec![NONE; rows];
        let mut order = Vec::with_capacity(self.live);
        let mut c = 0;
        while c != NONE {
            map[c as usize] = order.len() as u32;
            order.push(c);
            c = self.next[c as usize];
        }
        let mut table = Vec::with_capacity(order.len() * self.n);
        for &old in &order {
            for x in 0..self.n {
                let e = self.table[old as usize * self.n + x];
                table.push(if e == NONE { NONE } else { map[self.rep(e) as usize] });
            }
        }
        let m = order.len() as u32;
        self.table = table;
        self.parent = (0..m).collect();
        self.next = (1..=m).map(|k| if k == m { NONE } else { k }).collect();
        self.prev = (0..m).map(|k| if k == 0 { NONE } else { k - 1 }).collect();
        self.tail = m - 1;
        self.dead = 0;
        self.stats.compactions += 1;
        map
    }

    /// Complete, and every relator closes at every coset.
    fn is_valid(&self, rels: &[Vec<u32>]) -> bool {
        let mut c = 0;
        while c != NONE {
            if self.first_hole(c).is_some() {
                return false;
            }
            for r in rels {
                if r.iter().fold(c, |d, &x| self.get(d, x)) != c {
                    return false;
                }
            }
            c = self.next_live(c);
        }
        true
    }

    fn fill_subgroup(&mut self, sub: &[Vec<u32>], rels: &[Vec<u32>]) -> Result<(), Full> {
        for w in sub {
            loop {
                match self.scan(0, w, true) {
                    Ok(()) => break,
                    Err(Full) => {
                        let before = self.live;
                        self.lookahead(rels);
                        if self.live >= before && self.live >= self.max_cosets {
                            return Err(Full);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn hlt_row(&mut self, a: u32, rels: &[Vec<u32>]) -> Result<(), Full> {
        for r in rels {
            if !self.is_live(a) {
                return Ok(());
            }
            self.scan(a, r, true)?;
        }
        for x in 0..self.n as u32 {
            if !self.is_live(a) {
                return Ok(());
            }
            if self.get(a, x) == NONE {
                self.define(a, x)?;
            }
        }
        Ok(())
    }

    fn run_hlt(&mut self, sub: &[Vec<u32>], rels: &[Vec<u32>]) -> Result<(), Full> {
        self.fill_subgroup(sub, rels)?;
        loop {
            let mut a = 0;
            while a != NONE {
                while let Err(Full) = self.hlt_row(a, rels) {
                    self.lookahead(rels);
                    if self.live >= self.max_cosets {
                        return Err(Full);
                    }
                }
                a = self.next_live(a);
                self.maybe_compact(&mut a);
            }
            if self.is_valid(rels) {
                return Ok(());
            }
        }
    }

    fn process_deductions(&mut self, by_col: &[Vec<Vec<u32>>], rels: &[Vec<u32>]) {
        loop {
            while let Some((c, x)) = self.deductions.pop() {
                if !self.is_live(c) {
                    continue;
                }
                for r in &by_col[x as usize] {
                    if !self.is_live(c) {
                        break;
                    }
                    let _ = self.scan(c, r, false);
                }
                if !self.is_live(c) {
                    continue;
                }
                let d = self.get(c, x);
                if d == NONE || !self.is_live(d) {
                    continue;
                }
                for r in &by_col[self.inv[x as usize] as usize] {
                    if !self.is_live(d) {
                        break;
                    }
                    let _ = self.scan(d, r, false);
                }
            }
            if !self.overflow {
                return;
            }
            self.overflow = false;
            self.lookahead(rels);
        }
    }

    fn run_felsch(&mut self, sub: &[Vec<u32>], rels: &[Vec<u32>]) -> Result<(), Full> {
        let mut by_col: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.n];
        let mut seen = HashSet::new();
        for r in rels {
            for k in 0..r.len() {
                let rot: Vec<u32> = r[k..].iter().chain(&r[..k]).copied().collect();
                if seen.insert(rot.clone()) {
                    by_col[rot[0] as usize].push(rot);
                }
            }
        }
        self.track = true;
        self.fill_subgroup(sub, rels)?;
        self.process_deductions(&by_col, rels);
        let mut a = 0;
        loop {
            while a != NONE && (!self.is_live(a) || self.first_hole(a).is_none()) {
                a = self.next_live(a);
            }
            if a == NONE {
                if self.is_valid(rels) {
                    return Ok(());
                }
                self.lookahead(rels);
                self.process_deductions(&by_col, rels);
                a = 0;
                continue;
            }
            let x = self.first_hole(a).expect("hole found above");
            if self.define(a, x).is_err() {
                self.lookahead(rels);
                self.process_deductions(&by_col, rels);
                if self.live >= self.max_cosets {
                    return Err(Full);
                }
                continue;
            }
            self.process_deductions(&by_col, rels);
            self.maybe_compact(&mut a);
            if a == NONE {
                a = 0;
            }
        }
    }

    fn into_table(mut self, pres: &Presentation, subgroup: &[Word], cols: Columns, complete: bool) -> CosetTable {
        self.deductions.clear();
        self.compact();
        let len = self.parent.len();
        CosetTable {
            alphabet: pres.alphabet().clone(),
            relators: pres.relators().to_vec(),
            subgroup: subgroup.to_vec(),
            cols,
            rows: self.table,
            len,
            complete,
            tree: None,
            stats: self.stats,
        }
    }
}

/// Enumerates the right cosets of `⟨subgroup⟩` in the presented group. The
/// returned table is complete and standardized.
pub fn enumerate(pres: &Presentation, subgroup: &[Word], limits: &EnumLimits) -> Result<CosetTable, CosetError> {
    let cols = Columns::new(pres.alphabet());
    let ngens = pres.generator_count();
    let rels = pres
        .relators()
        .iter()
        .map(|r| cols.word(r, ngens))
        .collect::<Result<Vec<_>, _>>()?;
    let sub = subgroup
        .iter()
        .map(|w| {
            cols.word(w, ngens)?;
            cols.word(&w.reduce(pres.alphabet()), ngens)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut e = Enumerator::new(&cols, limits.max_cosets);
    let outcome = match limits.strategy {
        Strategy::Hlt => e.run_hlt(&sub, &rels),
        Strategy::Felsch => e.run_felsch(&sub, &rels),
    };
    match outcome {
        Ok(()) => {
            let mut table = e.into_table(pres, subgroup, cols, true);
            table.standardize()?;
            Ok(table)
        }
        Err(Full) => {
            let live = e.live;
            let stats = e.stats;
            Err(CosetError::LimitExceeded {
                max_cosets: limits.max_cosets,
                live,
                stats,
                partial: Box::new(e.into_table(pres, subgroup, cols, false)),
            })
        }
    }
}

/// Index of `⟨subgroup⟩` in the presented group.
pub fn index(pres: &Presentation, subgroup: &[Word], limits: &EnumLimits) -> Result<usize, CosetError> {
    Ok(enumerate(pres, subgroup, limits)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{bundled, parse_word_list};
    use crate::stabchain::StabilizerChain;

    fn both(pres: &Presentation, sub: &[Word]) -> (CosetTable, CosetTable) {
        let h = enumerate(pres, sub, &EnumLimits::new(1_000_000, Strategy::Hlt)).unwrap();
        let f = enumerate(pres, sub, &EnumLimits::new(1_000_000, Strategy::Felsch)).unwrap();
        (h, f)
    }

    #[test]
    fn cyclic_group() {
        let p = Presentation::parse("C2", "generators: a\na^2\n").unwrap();
        let (h, f) = both(&p, &[]);
        assert_eq!(h.index(), Some(2));
        assert_eq!(f.index(), Some(2));
        let p = Presentation::parse("C7", "generators: a\na^7\n").unwrap();
        assert_eq!(index(&p, &[], &EnumLimits::default()).unwrap(), 7);
    }

    #[test]
    fn dihedral_and_symmetric() {
        let p = Presentation::parse("D5", "generators: a b\ninvolutions: a b\n(a b)^5\n").unwrap();
        let (h, f) = both(&p, &[]);
        assert_eq!((h.len(), f.len()), (10, 10));
        let s = p.alphabet().parse("a").unwrap();
        assert_eq!(index(&p, &[s], &EnumLimits::default()).unwrap(), 5);
        // S4 as the Coxeter group A3.
        let p = Presentation::parse(
            "A3",
            "generators: a b c\ninvolutions: a b c\n(a b)^3\n(b c)^3\n(a c)^2\n",
        )
        .unwrap();
        let (h, f) = both(&p, &[]);
        assert_eq!((h.len(), f.len()), (24, 24));
    }

    #[test]
    fn coincidences_collapse_to_trivial() {
        // a^b = a^2 with a^5 = 1 forces a = 1, so the group is cyclic of order 3.
        let p = Presentation::parse("Q", "generators: a b\na^5\nb^3\na b a^-2 b^-1\n").unwrap();
        let (h, f) = both(&p, &[]);
        assert_eq!((h.len(), f.len()), (3, 3));
        let act = h.coset_action().unwrap();
        let chain = StabilizerChain::build(act.degree(), act.perms());
        assert_eq!(chain.order() as usize, h.len());
    }

    #[test]
    fn l2_19_quotient() {
        let wpp = bundled::w_double_prime();
        let (h, f) = both(&wpp, &[]);
        assert_eq!(h.index(), Some(3420));
        assert_eq!(f.index(), Some(3420));
        let parab: Vec<Word> = [0, 1, 2].iter().map(|&g| Word::gens(&[g])).collect();
        let (h, f) = both(&wpp, &parab);
        assert_eq!((h.len(), f.len()), (57, 57));
    }

    #[test]
    fn j1_facet_cosets() {
        let wp = bundled::w_prime();
        let parab: Vec<Word> = [0, 1, 2].iter().map(|&g| Word::gens(&[g])).collect();
        let (h, f) = both(&wp, &parab);
        assert_eq!((h.len(), f.len()), (1463, 1463));
        let act = h.coset_action().unwrap();
        let chain = StabilizerChain::build(act.degree(), act.perms());
        assert_eq!(chain.order(), 175_560);
    }

    #[test]
    fn index_twenty_subgroup() {
        let w = bundled::w();
        let sub = parse_word_list(w.alphabet(), bundled::L_SUBGROUP_TEXT).unwrap();
        let (h, f) = both(&w, &sub);
        assert_eq!((h.len(), f.len()), (20, 20));
    }

    #[test]
    fn standardized_representatives() {
        let wpp = bundled::w_double_prime();
        let parab: Vec<Word> = [0, 1, 2].iter().map(|&g| Word::gens(&[g])).collect();
        let t = enumerate(&wpp, &parab, &EnumLimits::default()).unwrap();
        assert!(t.is_standardized());
        let reps = t.representatives().unwrap();
        for (c, w) in reps.iter().enumerate() {
            assert_eq!(t.trace(0, w), Some(c as u32));
        }
        assert!(reps[0].is_empty());
        // Breadth-first numbering: representative lengths never decrease.
        assert!(reps.windows(2).all(|p| p[0].len() <= p[1].len()));
        // Standardization is canonical, so both strategies agree exactly.
        let f = enumerate(&wpp, &parab, &EnumLimits::new(1 << 20, Strategy::Felsch)).unwrap();
        assert_eq!(f.rows, t.rows);
    }

    #[test]
    fn limit_reports_partial_table() {
        let wpp = bundled::w_double_prime();
        match enumerate(&wpp, &[], &EnumLimits::new(100, Strategy::Hlt)) {
            Err(CosetError::LimitExceeded { max_cosets, live, partial, .. }) => {
                assert_eq!(max_cosets, 100);
                assert!(live <= 100);
                assert!(!partial.is_complete());
                assert_eq!(partial.index(), None);
                assert!(matches!(partial.coset_action(), Err(CosetError::Incomplete)));
            }
            other => panic!("expected limit error, got {other:?}"),
        }
    }

    #[test]
    fn bad_generator() {
        let p = Presentation::parse("C2", "generators: a\na^2\n").unwrap();
        let w = Word::gens(&[3]);
        assert!(matches!(enumerate(&p, &[w], &EnumLimits::default()), Err(CosetError::BadGenerator(3))));
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("HLT".parse::<Strategy>().unwrap(), Strategy::Hlt);
        assert_eq!("felsch".parse::<Strategy>().unwrap(), Strategy::Felsch);
        assert!("x".parse::<Strategy>().is_err());
    }
}
