//! Computational group theory for the universal locally projective polytope
//! of type {5,3,5}: permutations, stabilizer chains, coset enumeration,
//! string C-group checks, semisparse subgroups and quotient censuses.

pub mod census;
pub mod cgroup;
pub mod coset;
pub mod labels;
pub mod model;
pub mod perm;
pub mod presentation;
pub mod semisparse;
pub mod stabchain;
pub mod word;

pub use cgroup::MarkedGroup;
pub use coset::{CosetError, CosetTable, EnumLimits, Strategy};
pub use model::{Factor, Model};
pub use perm::{PermError, Permutation};
pub use presentation::Presentation;
pub use stabchain::StabilizerChain;
pub use word::{Alphabet, GeneratorAssignment, Letter, Word};
