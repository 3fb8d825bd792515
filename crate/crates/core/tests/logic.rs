use preflab_core::bits::Bits;
use preflab_core::logic::{
    closure_hat, models_of, models_of_phi, modelset_algebra_suite, theory_of, Formula,
    Language, ModelSet, Theory,
};
use proptest::prelude::*;

/// Independent oracle: evaluate a formula under one valuation by recursion
/// on the syntax tree, without any bitset machinery.
fn eval(lang: &Language, phi: &Formula, i: usize) -> bool {
    match phi {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Var(v) => {
            let j = lang.var_index(v).expect("unknown var in oracle");
            i >> j & 1 == 1
        }
        Formula::Not(a) => !eval(lang, a, i),
        Formula::And(a, b) => eval(lang, a, i) && eval(lang, b, i),
        Formula::Or(a, b) => eval(lang, a, i) || eval(lang, b, i),
        Formula::Implies(a, b) => !eval(lang, a, i) || eval(lang, b, i),
        Formula::Iff(a, b) => eval(lang, a, i) == eval(lang, b, i),
    }
}

fn lang3() -> Language {
    Language::new(&["p", "q", "r"]).unwrap()
}

#[test]
fn models_match_truth_table_oracle() {
    let lang = lang3();
    let samples = [
        "p",
        "~p",
        "p & q",
        "p | q",
        "p -> q",
        "p <-> q",
        "~(p & q) <-> ~p | ~q",
        "p -> q -> r",
        "(p -> q) -> r",
        "p & q & r | ~p & ~q",
        "true",
        "false",
        "~~p",
        "p <-> q <-> r",
    ];
    for text in samples {
        let phi = Formula::parse(text).unwrap();
        let m = models_of_phi(&lang, &phi).unwrap();
        for i in 0..lang.num_valuations() {
            assert_eq!(m.contains(i), eval(&lang, &phi, i), "formula {text} at {i}");
        }
    }
}

#[test]
fn parser_precedence_and_associativity() {
    // ~ binds tighter than &, & tighter than |, | tighter than ->, -> than <->.
    let a = Formula::parse("~p & q | r -> p <-> q").unwrap();
    let b = Formula::parse("((((~p) & q) | r) -> p) <-> q").unwrap();
    assert_eq!(a, b);
    // Arrows associate to the right.
    assert_eq!(
        Formula::parse("p -> q -> r").unwrap(),
        Formula::parse("p -> (q -> r)").unwrap()
    );
    assert_eq!(
        Formula::parse("p <-> q <-> r").unwrap(),
        Formula::parse("p <-> (q <-> r)").unwrap()
    );
}

#[test]
fn parser_rejects_garbage() {
    for bad in ["p &", "& p", "p -> ", "(p", "p)", "p $ q", "p - q", "p < q", ""] {
        assert!(Formula::parse(bad).is_err(), "accepted {bad:?}");
    }
}

#[test]
fn unknown_variable_is_input_error() {
    let lang = lang3();
    let phi = Formula::parse("p & z").unwrap();
    let err = models_of_phi(&lang, &phi).unwrap_err();
    assert!(matches!(err, preflab_core::Error::Input(_)));
}

#[test]
fn theory_of_round_trips_every_subset() {
    let lang = lang3();
    for mask in 0..(1u64 << lang.num_valuations()) {
        let x = ModelSet::from_bits(&lang, Bits::from_mask(lang.num_valuations(), mask));
        let t = theory_of(&x);
        let back = models_of(&lang, &t).unwrap();
        assert_eq!(back, x, "mask {mask:#x}");
    }
}

#[test]
fn theory_of_edge_cases() {
    let lang = lang3();
    assert_eq!(theory_of(&ModelSet::empty(&lang)).to_string(), "false");
    assert_eq!(theory_of(&ModelSet::full(&lang)).to_string(), "true");
    // A single valuation prints as one conjunction of literals.
    let lang2 = Language::new(&["p", "q"]).unwrap();
    // Index 2 = p false, q true.
    let x = ModelSet::from_indices(&lang2, &[2]);
    assert_eq!(theory_of(&x).to_string(), "~p & q");
}

#[test]
fn modelset_text_round_trip() {
    let lang = lang3();
    let x = ModelSet::from_indices(&lang, &[0, 3, 5, 7]);
    let text = x.to_text();
    let back = ModelSet::from_text(&text).unwrap();
    assert_eq!(back, x);
    assert!(ModelSet::from_text("vars: p; bits: zz").is_err());
    assert!(ModelSet::from_text("bits: 0").is_err());
}

#[test]
fn closure_hat_requires_intersection_closure() {
    let lang = Language::new(&["p", "q"]).unwrap();
    let a = ModelSet::from_indices(&lang, &[0, 1]);
    let b = ModelSet::from_indices(&lang, &[1, 2]);
    // {a, b} misses a ∩ b = {1}.
    let err = closure_hat(&a, &[a.clone(), b.clone()]).unwrap_err();
    assert!(matches!(err, preflab_core::Error::Contract(_)));
    let meet = a.intersect(&b);
    let dom = vec![a.clone(), b.clone(), meet.clone()];
    // Smallest domain member containing {1} is the meet itself.
    let got = closure_hat(&ModelSet::from_indices(&lang, &[1]), &dom).unwrap();
    assert_eq!(got, meet);
    // Nothing in the domain contains {3}: hull falls back to the full set.
    let got = closure_hat(&ModelSet::from_indices(&lang, &[3]), &dom).unwrap();
    assert_eq!(got, ModelSet::full(&lang));
}

#[test]
fn algebra_suite_exhaustive_small() {
    for vars in [&["p"][..], &["p", "q"][..], &["p", "q", "r"][..]] {
        let lang = Language::new(vars).unwrap();
        let report = modelset_algebra_suite(&lang, 7).unwrap();
        assert!(report.exhaustive);
        for e in &report.entries {
            assert!(e.holds, "{} failed: {:?}", e.name, e.counterexample);
        }
    }
}

#[test]
fn algebra_suite_sampled_at_four_vars() {
    let lang = Language::new(&["p", "q", "r", "s"]).unwrap();
    let report = modelset_algebra_suite(&lang, 7).unwrap();
    assert!(!report.exhaustive);
    assert!(report.all_hold());
    let lang5 = Language::new(&["a", "b", "c", "d", "e"]).unwrap();
    assert!(modelset_algebra_suite(&lang5, 7).is_err());
}

#[test]
fn theory_parse_and_display() {
    let t = Theory::parse("p & q; ~r; p -> q").unwrap();
    assert_eq!(t.formulas.len(), 3);
    assert_eq!(t.to_string(), "p & q; ~r; p -> q");
}

fn arb_formula(vars: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        proptest::sample::select(vars).prop_map(Formula::var),
    ];
    leaf.prop_recursive(5, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| !f),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

proptest! {
    /// Display then parse is the identity on syntax trees.
    #[test]
    fn display_parse_round_trip(f in arb_formula(&["p", "q", "r"])) {
        let text = f.to_string();
        let back = Formula::parse(&text).unwrap();
        prop_assert_eq!(back, f);
    }

    /// Bitset evaluation agrees with the per-valuation oracle.
    #[test]
    fn eval_agrees_with_oracle(f in arb_formula(&["p", "q", "r"])) {
        let lang = lang3();
        let m = models_of_phi(&lang, &f).unwrap();
        for i in 0..lang.num_valuations() {
            prop_assert_eq!(m.contains(i), eval(&lang, &f, i));
        }
    }

    /// Hex serialization round-trips arbitrary bitsets.
    #[test]
    fn bits_hex_round_trip(len in 1usize..40, mask in any::<u64>()) {
        let mask = mask & if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
        let b = Bits::from_mask(len.min(64), mask);
        let hex = b.to_hex();
        let back = Bits::from_hex(b.len(), &hex).unwrap();
        prop_assert_eq!(back, b);
    }
}
