use std::sync::Arc;

use proptest::prelude::*;

use cflkit::io::{parse, serialize};
use cflkit::library::builtin;
use cflkit::maps::{phi, psi};
use cflkit::KnotComplex;

const POOL: [&str; 6] = ["unknot", "trefoil_right", "figure8", "T34", "T45", "hopf_neg_model"];

/// A word of factors, each a pool index and a dualize flag.
fn build(word: &[(usize, bool)]) -> KnotComplex {
    let mut out: Option<KnotComplex> = None;
    for &(i, dual) in word {
        let c = builtin(POOL[i]).unwrap();
        let c = if dual { c.dual() } else { c };
        out = Some(match out {
            None => c,
            Some(acc) if acc.len() * c.len() <= 250 => acc.tensor(&c).unwrap(),
            Some(acc) => acc,
        });
    }
    out.unwrap()
}

fn word() -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0..POOL.len(), any::<bool>()), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn combinations_are_valid_complexes(w in word()) {
        let c = build(&w);
        prop_assert!(c.validate().is_ok());
        prop_assert!(c.dual().dual().validate().is_ok());
    }

    #[test]
    fn text_format_round_trips(w in word()) {
        let c = build(&w);
        let text = serialize(&c);
        let back = parse(&text).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back.len(), c.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn phi_psi_anticommute_with_the_differential(w in word()) {
        let c = Arc::new(build(&w));
        prop_assert!(phi(&c).unwrap().is_chain_map());
        prop_assert!(psi(&c).unwrap().is_chain_map());
    }
}

#[test]
fn dual_of_tensor_matches_tensor_of_duals_in_size_and_euler_characteristic() {
    let a = builtin("T34").unwrap();
    let b = builtin("figure8").unwrap();
    let left = a.tensor(&b).unwrap().dual();
    let right = a.dual().tensor(&b.dual()).unwrap();
    assert_eq!(left.len(), right.len());
    assert_eq!(left.graded_euler_characteristic(), right.graded_euler_characteristic());
}
