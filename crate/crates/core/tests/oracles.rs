//! Engine results checked against brute-force closures and exhaustive
//! searches on small groups, plus randomized invariants on W.

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;
use w535::cgroup::MarkedGroup;
use w535::coset::{enumerate, index};
use w535::model::{nu_word, omega_word, shared};
use w535::semisparse::{SemisparseChecker, ELEMENT_CAP};
use w535::{Alphabet, EnumLimits, Permutation, Presentation, StabilizerChain, Word};

/// All elements of `<gens>` by breadth-first closure.
fn closure(degree: usize, gens: &[Permutation]) -> HashSet<Vec<u32>> {
    let id = Permutation::identity(degree);
    let mut seen = HashSet::from([id.images().to_vec()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.compose(s);
            if seen.insert(h.images().to_vec()) {
                queue.push_back(h);
            }
        }
    }
    seen
}

fn perm_strategy(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u32).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_order_and_membership_match_closure(
        gens in prop::collection::vec(perm_strategy(7), 1..3),
        probe in perm_strategy(7),
    ) {
        let chain = StabilizerChain::build(7, &gens);
        let all = closure(7, &gens);
        prop_assert_eq!(chain.order(), all.len() as u128);
        prop_assert_eq!(chain.contains(&probe).unwrap(), all.contains(probe.images()));
        let listed: HashSet<Vec<u32>> = chain.elements(10_000).unwrap().map(|p| p.images().to_vec()).collect();
        prop_assert_eq!(listed, all);
    }

    #[test]
    fn dihedral_coset_indices(n in 2usize..40) {
        let text = format!("generators: a b\ninvolutions: a b\n(a b)^{n}\n");
        let pres = Presentation::parse("D", &text).unwrap();
        let limits = EnumLimits::default();
        prop_assert_eq!(index(&pres, &[], &limits).unwrap(), 2 * n);
        let a = pres.alphabet().parse("a").unwrap();
        prop_assert_eq!(index(&pres, &[a], &limits).unwrap(), n);
    }

    #[test]
    fn cyclic_quotients_of_the_free_group(n in 1usize..60, k in 1usize..60) {
        // <a | a^n, a^k> is cyclic of order gcd(n, k).
        let text = format!("generators: a\na^{n}\na^{k}\n");
        let pres = Presentation::parse("C", &text).unwrap();
        let g = w535::perm::gcd(n as u64, k as u64) as usize;
        prop_assert_eq!(index(&pres, &[], &EnumLimits::default()).unwrap(), g);
    }

    #[test]
    fn model_products_match_permutations(a in 0u32..600_415_200, b in 0u32..600_415_200) {
        let m = shared();
        let (pa, pb) = (m.element(a), m.element(b));
        prop_assert_eq!(m.element(m.product(a, b)), pa.compose(&pb));
        prop_assert_eq!(m.element(m.inverse(a)), pa.inverse());
        prop_assert_eq!(m.element_order(a), pa.order());
        prop_assert_eq!(m.class_pair(m.conjugate_code(a, b)), m.class_pair(a));
    }

    #[test]
    fn semisparse_verdicts_are_conjugation_invariant(g in 0u32..600_415_200) {
        let m = shared();
        let checker = checker();
        let omega = m.code_of_word(&omega_word());
        let nu = m.code_of_word(&nu_word());
        let conj = |x: u32| m.conjugate_code(x, g);
        let one = m.code_of_word(&Word::empty());
        prop_assert!(checker.check_codes(&[one, conj(omega)]).unwrap().semisparse);
        let mut nu_powers = vec![one];
        for _ in 1..6 {
            nu_powers.push(m.product(*nu_powers.last().unwrap(), nu));
        }
        let conjugated: Vec<u32> = nu_powers.iter().map(|&x| conj(x)).collect();
        let v = checker.check_codes(&conjugated).unwrap();
        prop_assert!(!v.semisparse);
        prop_assert!(checker.verify_witness(v.witness.as_ref().unwrap()).is_ok());
    }
}

fn checker() -> &'static SemisparseChecker<'static> {
    static C: std::sync::OnceLock<SemisparseChecker<'static>> = std::sync::OnceLock::new();
    C.get_or_init(|| SemisparseChecker::new(shared()))
}

#[test]
fn symmetric_group_is_a_string_c_group_of_type_3_3() {
    // S4 generated by the transpositions (0 1), (1 2), (2 3).
    let t = |a: u32, b: u32| Permutation::from_cycles(4, &[&[a + 1, b + 1]]).unwrap();
    let g = MarkedGroup::new("S4", vec![t(0, 1), t(1, 2), t(2, 3)]).unwrap();
    g.check_string().unwrap();
    assert_eq!(g.schlafli(), [3, 3]);
    assert_eq!(g.order(), 24);
    assert!(g.intersection_property(ELEMENT_CAP).unwrap().passed());
}

#[test]
fn intersection_property_failure_is_detected() {
    // s0 = s2 breaks H_{0,1} ∩ H_{1,2} = H_{1}.
    let t = |a: u32, b: u32| Permutation::from_cycles(3, &[&[a + 1, b + 1]]).unwrap();
    let g = MarkedGroup::new("bad", vec![t(0, 1), t(1, 2), t(0, 1)]).unwrap();
    assert!(!g.intersection_property(ELEMENT_CAP).unwrap().passed());
}

#[test]
fn coset_action_matches_exhaustive_cosets_in_a_small_quotient() {
    // The [3,3] Coxeter group is S4; cosets of <s0, s1> are the 4 points.
    let pres = Presentation::parse(
        "A3",
        "generators: s0 s1 s2\ninvolutions: s0 s1 s2\n(s0 s1)^3\n(s1 s2)^3\n(s0 s2)^2\n",
    )
    .unwrap();
    let alpha = Alphabet::involutions("s", 3);
    let sub = vec![alpha.parse("s0").unwrap(), alpha.parse("s1").unwrap()];
    let table = enumerate(&pres, &sub, &EnumLimits::default()).unwrap();
    assert_eq!(table.index(), Some(4));
    let action = table.coset_action().unwrap();
    assert_eq!(closure(4, action.perms()).len(), 24);
    for rel in pres.relators() {
        assert!(action.evaluate(rel).unwrap().is_identity());
    }
}

#[test]
fn omega_and_nu_orders() {
    let m = shared();
    assert_eq!(m.evaluate(&omega_word()).order(), 2);
    assert_eq!(m.evaluate(&nu_word()).order(), 6);
}
