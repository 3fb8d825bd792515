use preflab_core::bits::Bits;
use preflab_core::cond::{
    check_cum_alpha, check_hu_property, check_mu_condition, check_mu_condition_by_id,
    check_mwor_consequence, compute_hu, eval_mu_instance, ChoiceFunction, MuCondition,
    ALL_MU_CONDITIONS,
};
use preflab_core::fixtures;
use preflab_core::pref::PrefStructure;
use proptest::prelude::*;

fn holds(f: &ChoiceFunction, c: MuCondition) -> bool {
    check_mu_condition(f, c).unwrap().holds
}

#[test]
fn overlapping_pair_separates_mutual_inclusion_from_cumulativity() {
    let f = fixtures::mu_cum_cd();
    assert!(holds(&f, MuCondition::Sub));
    assert!(holds(&f, MuCondition::Cum));
    let rep = check_mu_condition(&f, MuCondition::SubSup).unwrap();
    assert!(!rep.holds);
    let inst = rep.counterexample.unwrap();
    let abc = f.set_of(&["a", "b", "c"]).unwrap();
    let abd = f.set_of(&["a", "b", "d"]).unwrap();
    let bound: Vec<Bits> = inst.sets.iter().map(|(_, b)| b.clone()).collect();
    assert!(bound.contains(&abc) && bound.contains(&abd));
}

#[test]
fn identity_with_one_dent_breaks_projection_only() {
    let f = fixtures::need_pr();
    for c in [
        MuCondition::Sub,
        MuCondition::SubSup,
        MuCondition::Cum,
        MuCondition::RatM,
        MuCondition::ResM,
    ] {
        assert!(holds(&f, c), "{} should hold", c.display_name());
    }
    let rep = check_mu_condition(&f, MuCondition::Pr).unwrap();
    assert!(!rep.holds);
    let inst = rep.counterexample.unwrap();
    let ab = f.set_of(&["a", "b"]).unwrap();
    let abc = f.set_of(&["a", "b", "c"]).unwrap();
    let bound: Vec<Bits> = inst.sets.iter().map(|(_, b)| b.clone()).collect();
    assert!(bound.contains(&ab) && bound.contains(&abc));
}

#[test]
fn empty_choice_on_a_pair_only_fails_nonemptiness() {
    let f = fixtures::rank_copies();
    for c in [
        MuCondition::Sub,
        MuCondition::Pr,
        MuCondition::Eq,
        MuCondition::Cup,
        MuCondition::In,
    ] {
        assert!(holds(&f, c), "{} should hold", c.display_name());
    }
    for c in [MuCondition::Empty, MuCondition::EmptyFin] {
        let rep = check_mu_condition(&f, c).unwrap();
        assert!(!rep.holds);
        let inst = rep.counterexample.unwrap();
        assert_eq!(inst.sets[0].1, f.set_of(&["a", "b"]).unwrap());
    }
}

#[test]
fn smoothness_target_values_fail_cumulativity() {
    let f = fixtures::need_smooth_values();
    let rep = check_mu_condition(&f, MuCondition::Cum).unwrap();
    assert!(!rep.holds);
    let inst = rep.counterexample.unwrap();
    assert_eq!(inst.sets[0].1, f.set_of(&["a", "b", "c"]).unwrap());
    assert_eq!(inst.sets[1].1, f.set_of(&["a", "c"]).unwrap());
}

#[test]
fn staged_cumulativity_ladder_at_stage_one() {
    let f = fixtures::inf_cum_alpha(1).unwrap();
    assert!(f.is_closed_under_intersection());
    assert!(holds(&f, MuCondition::Sub));
    assert!(holds(&f, MuCondition::Pr));
    assert!(holds(&f, MuCondition::Cum));

    assert!(check_cum_alpha(&f, 0, false).unwrap().holds);
    assert!(check_cum_alpha(&f, 0, true).unwrap().holds);

    let rep = check_cum_alpha(&f, 1, false).unwrap();
    assert!(!rep.holds);
    let inst = rep.counterexample.unwrap();
    let u = f.set_of(&["a", "c", "x0"]).unwrap();
    assert_eq!(inst.sets[0].1, u);

    // The weakened conclusion fails at the top stage as well.
    assert!(!check_cum_alpha(&f, 1, true).unwrap().holds);
}

#[test]
fn staged_cumulativity_ladder_at_stage_two() {
    let f = fixtures::inf_cum_alpha(2).unwrap();
    assert!(f.is_closed_under_intersection());
    assert!(holds(&f, MuCondition::Cum));
    assert!(check_cum_alpha(&f, 0, false).unwrap().holds);
    assert!(check_cum_alpha(&f, 1, true).unwrap().holds);
    assert!(!check_cum_alpha(&f, 2, false).unwrap().holds);
}

#[test]
fn hull_fixpoint_and_failure_of_the_hull_property() {
    let f = fixtures::inf_cum_alpha(1).unwrap();
    let u = f.set_of(&["a", "c", "x0"]).unwrap();
    let c_idx = f.elements().iter().position(|e| e == "c").unwrap();
    let hu = compute_hu(&f, Some(c_idx), &u).unwrap();
    // One step absorbs the first generator; the fixpoint then swallows
    // the second and with it everything.
    let x0 = f.set_of(&["c", "x0", "x'0", "x1"]).unwrap();
    assert_eq!(hu.hu_single, u.union(&x0));
    assert_eq!(hu.hu_iterated, Bits::full(f.num_elements()));
    assert_eq!(hu.huu.unwrap(), Bits::full(f.num_elements()));

    let rep = check_hu_property(&f, true).unwrap();
    assert!(!rep.holds);
    let inst = rep.counterexample.unwrap();
    assert_eq!(inst.sets[0].1, u);

    let missing = Bits::singleton(f.num_elements(), c_idx);
    assert!(compute_hu(&f, None, &missing).is_ok());
    let outside = f.set_of(&["b"]).unwrap_or_else(|_| Bits::empty(f.num_elements()));
    assert!(compute_hu(&f, None, &outside).is_err());
}

#[test]
fn weak_or_consequence_needs_its_premises() {
    let err = check_mwor_consequence(&fixtures::need_pr()).unwrap_err();
    assert!(err.to_string().contains("wOR"), "got: {err}");

    let f = fixtures::identity_full(&["a", "b", "c"]);
    let rep = check_mwor_consequence(&f).unwrap();
    assert!(rep.holds);
}

#[test]
fn ranked_structure_choice_satisfies_the_ranked_family() {
    // Layers {a} < {b,c} < {d}, all cross-layer arrows.
    let mut s =
        PrefStructure::discrete(vec!["a".into(), "b".into(), "c".into(), "d".into()]);
    for target in [1, 2, 3] {
        s.add_arrow(0, target);
    }
    s.add_arrow(1, 3);
    s.add_arrow(2, 3);
    let f = ChoiceFunction::from_structure(&s, &Bits::full(4).subsets()).unwrap();
    for c in [
        MuCondition::Sub,
        MuCondition::Pr,
        MuCondition::Eq,
        MuCondition::Par,
        MuCondition::Cup,
        MuCondition::In,
        MuCondition::RatM,
        MuCondition::Cum,
    ] {
        assert!(holds(&f, c), "{} should hold on a ranked structure", c.display_name());
    }
}

#[test]
fn unsmooth_chain_choice_fails_cumulativity() {
    let s = fixtures::chain_structure(&["a", "b", "c"]);
    let f = ChoiceFunction::from_structure(&s, &Bits::full(3).subsets()).unwrap();
    assert!(holds(&f, MuCondition::Sub));
    assert!(holds(&f, MuCondition::Pr));
    assert!(!holds(&f, MuCondition::Cum));
}

#[test]
fn condition_ids_parse_with_aliases() {
    for c in ALL_MU_CONDITIONS {
        assert_eq!(MuCondition::parse(c.id()).unwrap(), c);
    }
    assert_eq!(MuCondition::parse("mu-SC").unwrap(), MuCondition::Sub);
    assert_eq!(MuCondition::parse("mu-CP").unwrap(), MuCondition::Empty);
    assert_eq!(MuCondition::parse("mu-RatM=").unwrap(), MuCondition::Eq);
    assert!(MuCondition::parse("mu-nonsense").is_err());

    let f = fixtures::need_pr();
    let via_id = check_mu_condition_by_id(&f, "mu-PR").unwrap();
    assert!(!via_id.holds);
}

#[test]
fn text_round_trip_keeps_every_value() {
    for f in [
        fixtures::mu_cum_cd(),
        fixtures::rank_copies(),
        fixtures::inf_cum_alpha(1).unwrap(),
    ] {
        let text = f.to_text();
        let back = ChoiceFunction::from_text(&text).unwrap();
        assert_eq!(back.elements(), f.elements());
        assert_eq!(back.domain(), f.domain());
        for x in f.domain() {
            assert_eq!(back.value(x).unwrap(), f.value(x).unwrap());
        }
    }
}

#[test]
fn text_parser_rejects_malformed_input() {
    assert!(ChoiceFunction::from_text("f{a}={a}; f{b}={b}; f{a}={}").is_err());
    assert!(ChoiceFunction::from_text("universe: a; f{a,b}={a}").is_err());
    assert!(ChoiceFunction::from_text("universe: a").is_ok());
}

#[test]
fn cum_alpha_rejects_large_stage_and_missing_domain() {
    let f = fixtures::mu_cum_cd();
    assert!(check_cum_alpha(&f, 5, false).is_err());
}

fn arb_choice() -> impl Strategy<Value = ChoiceFunction> {
    (1usize..=3, prop::collection::vec(any::<u8>(), 8)).prop_map(|(m, picks)| {
        let names: Vec<String> = (0..m).map(|i| format!("e{i}")).collect();
        let entries: Vec<(Bits, Bits)> = Bits::full(m)
            .subsets()
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                let mask = u64::from(picks[i % picks.len()]);
                let mut fx = Bits::empty(m);
                for b in x.iter() {
                    if mask >> b & 1 == 1 {
                        fx.insert(b);
                    }
                }
                (x, fx)
            })
            .collect();
        ChoiceFunction::new(names, entries).unwrap()
    })
}

proptest! {
    // Whatever verdict a checker returns, a reported counterexample must
    // actually falsify the condition instance it names.
    #[test]
    fn counterexamples_replay(f in arb_choice()) {
        for c in ALL_MU_CONDITIONS {
            let rep = check_mu_condition(&f, c).unwrap();
            if let Some(inst) = rep.counterexample {
                prop_assert!(!eval_mu_instance(&f, c, &inst).unwrap());
                prop_assert!(!rep.holds);
            }
        }
    }

    // Any structure-derived choice function satisfies inclusion and
    // projection.
    #[test]
    fn structure_choices_are_sound(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let names: Vec<String> = (0..m).map(|i| format!("e{i}")).collect();
        let mut nodes = Vec::new();
        for e in 0..m {
            for c in 0..rng.gen_range(1..=2) {
                nodes.push((e, c));
            }
        }
        let mut s = PrefStructure::new(names, nodes).unwrap();
        let n = s.num_nodes();
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.3) {
                    s.add_arrow(i, j);
                }
            }
        }
        let f = ChoiceFunction::from_structure(&s, &Bits::full(m).subsets()).unwrap();
        prop_assert!(check_mu_condition(&f, MuCondition::Sub).unwrap().holds);
        prop_assert!(check_mu_condition(&f, MuCondition::Pr).unwrap().holds);
    }
}
