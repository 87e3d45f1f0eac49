//! String C-group checks on groups generated by marked involutions.

use std::sync::OnceLock;

use thiserror::Error;

use crate::model::{omega_word, Model};
use crate::perm::Permutation;
use crate::stabchain::StabilizerChain;
use crate::word::{GeneratorAssignment, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CGroupError {
    #[error("mark s{mark} has order {order}, not an involution")]
    NotInvolution { mark: usize, order: u64 },
    #[error("marks s{i} and s{j} do not commute")]
    NotString { i: usize, j: usize },
    #[error("parabolic {} has order {order}, above the enumeration cap {cap}", mask_name(*.mask))]
    CapExceeded { mask: u32, order: u128, cap: u128 },
    #[error("need at least {needed} marks, have {have}")]
    Rank { needed: usize, have: usize },
    #[error("facet central involution check failed: {0}")]
    Omega(String),
    #[error("marks act on different degrees")]
    Degree,
}

/// `{0,2}` style name of a subset of marks.
pub fn mask_name(mask: u32) -> String {
    let idx: Vec<String> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", idx.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectionVerdict {
    Pass {
        pairs_checked: usize,
    },
    Fail {
        i: u32,
        j: u32,
        /// Element of `H_I ∩ H_J` outside `H_{I∩J}`.
        witness: Permutation,
    },
}

impl IntersectionVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, IntersectionVerdict::Pass { .. })
    }
}

/// A permutation group with an ordered list of generating involutions and
/// lazily built parabolic subgroups `H_I = ⟨s_i : i ∈ I⟩`.
pub struct MarkedGroup {
    name: String,
    marks: GeneratorAssignment,
    chain: OnceLock<StabilizerChain>,
    parabolics: Vec<OnceLock<StabilizerChain>>,
}

impl std::fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarkedGroup").field("name", &self.name).field("rank", &self.rank()).finish()
    }
}

impl MarkedGroup {
    pub fn new(name: &str, marks: Vec<Permutation>) -> Result<Self, CGroupError> {
        for (mark, p) in marks.iter().enumerate() {
            let order = p.order();
            if order > 2 {
                return Err(CGroupError::NotInvolution { mark, order });
            }
        }
        let rank = marks.len();
        let marks = GeneratorAssignment::new(marks).map_err(|_| CGroupError::Degree)?;
        Ok(MarkedGroup {
            name: name.to_string(),
            marks,
            chain: OnceLock::new(),
            parabolics: (0..1usize << rank).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `W` on 1483 points.
    pub fn w(model: &Model) -> Self {
        Self::new("W", model.generators().to_vec()).expect("marks of W are involutions")
    }

    /// The J1 quotient on 1463 points.
    pub fn w_prime(model: &Model) -> Self {
        Self::new("W'", model.j1().marks().to_vec()).expect("marks of W' are involutions")
    }

    /// The L2(19) quotient on 20 points.
    pub fn w_double_prime(model: &Model) -> Self {
        Self::new("W''", model.l2().marks().to_vec()).expect("marks of W'' are involutions")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.marks.len()
    }

    pub fn degree(&self) -> usize {
        self.marks.degree()
    }

    pub fn marks(&self) -> &[Permutation] {
        self.marks.perms()
    }

    pub fn evaluate(&self, w: &Word) -> Permutation {
        self.marks.evaluate(w).expect("word over the marks")
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree(), self.marks()))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    fn full_mask(&self) -> u32 {
        ((1u64 << self.rank()) - 1) as u32
    }

    /// `H_I` for the subset `I` given as a bit mask.
    pub fn parabolic(&self, mask: u32) -> &StabilizerChain {
        if mask == self.full_mask() {
            return self.chain();
        }
        self.parabolics[mask as usize].get_or_init(|| {
            let gens: Vec<Permutation> = (0..self.rank())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.marks()[i].clone())
                .collect();
            StabilizerChain::build(self.degree(), &gens)
        })
    }

    /// The maximal parabolic omitting `s_i`.
    pub fn maximal_parabolic(&self, i: usize) -> &StabilizerChain {
        self.parabolic(self.full_mask() & !(1 << i))
    }

    /// Orders of `s_i s_j`; the diagonal is 1.
    pub fn coxeter_type(&self) -> Vec<Vec<u64>> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 1 } else { self.marks()[i].compose(&self.marks()[j]).order() })
                    .collect()
            })
            .collect()
    }

    /// The string condition: `s_i s_j = s_j s_i` whenever `|i - j| ≥ 2`.
    pub fn check_string(&self) -> Result<(), CGroupError> {
        let n = self.rank();
        for i in 0..n {
            for j in i + 2..n {
                if !self.marks()[i].commutes_with(&self.marks()[j]) {
                    return Err(CGroupError::NotString { i, j });
                }
            }
        }
        Ok(())
    }

    /// Orders of consecutive products, e.g. `[5, 3, 5]`.
    pub fn schlafli(&self) -> Vec<u64> {
        let m = self.coxeter_type();
        (1..self.rank()).map(|i| m[i - 1][i]).collect()
    }

    /// Checks `H_I ∩ H_J = H_{I∩J}` for every pair of subsets. Pairs where
    /// one subset contains the other hold trivially; for the rest the
    /// smaller parabolic is enumerated (up to `cap` elements) and each
    /// element tested for membership in the other.
    pub fn intersection_property(&self, cap: u128) -> Result<IntersectionVerdict, CGroupError> {
        let full = self.full_mask();
        let mut pairs = 0;
        for i in 0..=full {
            for j in i + 1..=full {
                pairs += 1;
                if i & j == i || i & j == j {
                    continue;
                }
                let (hi, hj) = (self.parabolic(i), self.parabolic(j));
                let (small, small_mask, other) = if hi.order() <= hj.order() { (hi, i, hj) } else { (hj, j, hi) };
                let meet = self.parabolic(i & j);
                let elements = small.elements(cap).map_err(|_| CGroupError::CapExceeded {
                    mask: small_mask,
                    order: small.order(),
                    cap,
                })?;
                let mut common = 0u128;
                let mut witness = None;
                for g in elements {
                    if other.contains(&g).expect("same degree") {
                        common += 1;
                        if witness.is_none() && !meet.contains(&g).expect("same degree") {
                            witness = Some(g);
                        }
                    }
                }
                if common != meet.order() {
                    let witness = witness.expect("an extra common element exists");
                    return Ok(IntersectionVerdict::Fail { i, j, witness });
                }
            }
        }
        Ok(IntersectionVerdict::Pass { pairs_checked: pairs })
    }

    /// `ω = (s0 s1 s2)^5`, checked to be a nontrivial involution in `H_3`
    /// commuting with `s0, s1, s2`.
    pub fn facet_central_involution(&self) -> Result<Permutation, CGroupError> {
        if self.rank() < 4 {
            return Err(CGroupError::Rank {
                needed: 4,
                have: self.rank(),
            });
        }
        let omega = self.evaluate(&omega_word());
        if omega.is_identity() {
            return Err(CGroupError::Omega("ω is the identity".into()));
        }
        if !omega.compose(&omega).is_identity() {
            return Err(CGroupError::Omega("ω² is not the identity".into()));
        }
        if !self.maximal_parabolic(3).contains(&omega).expect("same degree") {
            return Err(CGroupError::Omega("ω is not in H3".into()));
        }
        for (k, s) in self.marks()[..3].iter().enumerate() {
            if !omega.commutes_with(s) {
                return Err(CGroupError::Omega(format!("ω does not commute with s{k}")));
            }
        }
        Ok(omega)
    }
}
