//! Facet censuses are invariant under conjugating the subgroup.

use std::sync::OnceLock;

use proptest::prelude::*;
use w535::census::{orbit_census, FaceSpaces, OrbitCensus};
use w535::model::{nu_word, omega_word, shared};
use w535::{EnumLimits, Word};

fn spaces() -> &'static FaceSpaces<'static> {
    static S: OnceLock<FaceSpaces<'static>> = OnceLock::new();
    S.get_or_init(|| FaceSpaces::new(shared(), EnumLimits::default()))
}

fn census_of(words: &[Word], order: u64) -> OrbitCensus {
    orbit_census(spaces().get(3).unwrap(), words, order).unwrap()
}

fn conjugate(x: &Word, g: &Word) -> Word {
    g.inverse().concat(x).concat(g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn conjugates_of_omega_and_nu_cubed(gens in prop::collection::vec(0usize..4, 0..24)) {
        let g = Word::gens(&gens);
        let omega = census_of(&[conjugate(&omega_word(), &g)], 2);
        prop_assert_eq!((omega.d, omega.h), (2_500_020, 3420));
        let nu3 = census_of(&[conjugate(&nu_word().pow(3), &g)], 2);
        prop_assert_eq!((nu3.d, nu3.h), (2_501_730, 0));
    }
}
