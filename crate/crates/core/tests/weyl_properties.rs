mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weylkit::weyl::{weyl_polynomials, weyl_space, PolyFamily, WeylSpace};

fn family_strategy() -> impl Strategy<Value = PolyFamily> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, 1..=4), 1..=3)
        .prop_filter_map("essentially distinct", |c| family_from_monomials(&c))
}

fn linear_family_strategy() -> impl Strategy<Value = PolyFamily> {
    prop::collection::btree_set(prop_oneof![-6i64..=-1, 1i64..=6], 1..=4)
        .prop_map(|s| family_from_monomials(&s.into_iter().map(|a| vec![a]).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_spaces_stabilize(f in family_strategy()) {
        prop_assert_eq!(check_stabilization(&f), Ok(()));
    }

    #[test]
    fn family_lies_in_its_weyl_spaces(f in family_strategy()) {
        prop_assert_eq!(check_containment(&f, 3), Ok(()));
    }

    #[test]
    fn larger_family_larger_space(f in family_strategy(), extra in prop::collection::vec(-3i64..=3, 1..=3)) {
        let mut all: Vec<Vec<i64>> = f.polys().iter().map(|p| {
            let mono = p.to_monomial();
            (1..mono.coeffs().len()).map(|j| mono.coeff(j).to_integer().try_into().unwrap()).collect()
        }).collect();
        all.push(extra);
        if let Some(q) = family_from_monomials(&all) {
            prop_assert_eq!(check_inclusion(&f, &q, 2), Ok(()));
        }
    }

    #[test]
    fn composition_commutes(f in family_strategy(), d in 1usize..=2, q in prop_oneof![Just("2n"), Just("n^2")]) {
        prop_assert_eq!(check_composition(&f, &q.parse().unwrap(), d), Ok(()));
    }

    #[test]
    fn difference_family_same_space(f in family_strategy(), d in 1usize..=3) {
        prop_assert_eq!(check_difference(&f, d), Ok(()));
    }

    #[test]
    fn scaling_preserves_membership(f in family_strategy(), m in 2i64..=3, i in 0i64..=1, d in 1usize..=2) {
        prop_assert_eq!(check_scaling(&f, m, i, d, &[]), Ok(()));
    }

    #[test]
    fn xi_is_injective(f in family_strategy()) {
        prop_assert_eq!(check_xi_injective(&f), Ok(()));
    }

    #[test]
    fn linear_families_fill_degree_r(f in linear_family_strategy()) {
        let r = f.len();
        let wp = weyl_polynomials(&f, f.default_k_max()).unwrap();
        let monomials: Vec<_> = (1..=r).map(|j| format!("n^{j}").parse().unwrap()).collect();
        prop_assert_eq!(wp, WeylSpace::span_of_integral(&monomials));
    }
}

#[test]
fn seeded_suite_is_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let f = random_family(&mut rng, 3, 4, 3);
        assert_eq!(check_family_properties(&mut rng, &f), Ok(()));
    }
}

#[test]
fn weyl_space_zero_and_one() {
    let f = PolyFamily::parse("n^2 + n, 3n").unwrap();
    assert_eq!(weyl_space(&f, 0).unwrap().dim(), 0);
    assert_eq!(weyl_space(&f, 1).unwrap(), WeylSpace::span_of_integral(f.polys()));
}
