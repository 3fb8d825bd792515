use preflab_core::bits::Bits;
use preflab_core::cond::{check_mu_condition, compute_hu, ChoiceFunction, MuCondition};
use preflab_core::error::Error;
use preflab_core::fixtures;
use preflab_core::pref::PrefStructure;
use preflab_core::repr::{
    equiv_transitive, extend_to_total_preorder, minimizing_tree, represent_general,
    represent_general_with_budget, represent_ranked, represent_smooth,
    represent_smooth_transitive, represent_smooth_transitive_with_budget,
    represent_smooth_with_budget, represent_transitive, represent_transitive_with_budget,
    selection_indices, verify_round_trip, ChoiceTree,
};

fn holds(f: &ChoiceFunction, c: MuCondition) -> bool {
    check_mu_condition(f, c).unwrap().holds
}

/// Every inclusive choice function on three elements over the seven
/// nonempty subsets: 2^12 = 4096 functions.
fn all_inclusive_functions() -> Vec<ChoiceFunction> {
    let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
    let sets: Vec<u64> = (1..8).collect();
    let subs: Vec<Vec<u64>> = sets
        .iter()
        .map(|&m| (0u64..8).filter(|s| s & !m == 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; sets.len()];
    loop {
        let entries: Vec<(Bits, Bits)> = sets
            .iter()
            .enumerate()
            .map(|(i, &m)| (Bits::from_mask(3, m), Bits::from_mask(3, subs[i][idx[i]])))
            .collect();
        out.push(ChoiceFunction::new(names.clone(), entries).unwrap());
        let mut p = sets.len();
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < subs[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

#[test]
fn synthesizers_cover_exactly_their_precondition_tiers() {
    let mut pr_count = 0usize;
    let mut smooth_count = 0usize;
    let mut ranked_count = 0usize;
    for f in all_inclusive_functions() {
        let pr = holds(&f, MuCondition::Pr);
        let cum = holds(&f, MuCondition::Cum);
        let empty = holds(&f, MuCondition::Empty);
        let eq = holds(&f, MuCondition::Eq);
        assert_eq!(represent_general(&f).is_ok(), pr);
        assert_eq!(represent_transitive(&f).is_ok(), pr);
        assert_eq!(represent_smooth(&f).is_ok(), pr && cum);
        assert_eq!(represent_smooth_transitive(&f).is_ok(), pr && cum);
        assert_eq!(represent_ranked(&f).is_ok(), empty && eq);
        if empty && eq {
            // rank synthesis lands in the smooth tier as well
            assert!(pr && cum);
        }
        pr_count += pr as usize;
        smooth_count += (pr && cum) as usize;
        ranked_count += (empty && eq) as usize;
    }
    // exactly the choice functions of the 13 total preorders on three
    // elements survive the rank preconditions
    assert_eq!(ranked_count, 13);
    assert!(smooth_count > 13);
    assert!(smooth_count < pr_count);
}

#[test]
fn choice_through_dropping_sets_characterizes_selection() {
    for f in all_inclusive_functions() {
        if !holds(&f, MuCondition::Pr) {
            continue;
        }
        for x in 0..3 {
            let indices = selection_indices(&f, x, false).unwrap();
            assert!(indices.iter().all(|g| g.is_valid()));
            for u in f.domain() {
                let lhs = f.value(u).unwrap().contains(x);
                let rhs =
                    u.contains(x) && indices.iter().any(|g| !g.range(3).intersects(u));
                assert_eq!(lhs, rhs, "element {x} in {}", f.set_name(u));
            }
        }
    }
}

#[test]
fn hull_and_direct_forms_agree_for_image_choices() {
    for f in all_inclusive_functions() {
        if !(holds(&f, MuCondition::Pr) && holds(&f, MuCondition::Cum)) {
            continue;
        }
        let mut chosen = Bits::empty(3);
        for u in f.domain() {
            chosen = chosen.union(f.value(u).unwrap());
        }
        for x in chosen.iter() {
            let indices = selection_indices(&f, x, true).unwrap();
            for u in f.domain() {
                let hull = compute_hu(&f, None, u).unwrap().hu_single;
                let lhs = f.value(u).unwrap().contains(x);
                let direct =
                    u.contains(x) && indices.iter().any(|g| !g.range(3).intersects(u));
                let through_hull =
                    u.contains(x) && indices.iter().any(|g| !g.range(3).intersects(&hull));
                assert_eq!(lhs, direct);
                assert_eq!(lhs, through_hull);
            }
        }
    }
}

#[test]
fn identity_choice_round_trips_through_every_synthesizer() {
    let f = fixtures::identity_full(&["a", "b", "c"]);
    let built = [
        represent_general(&f).unwrap(),
        represent_transitive(&f).unwrap(),
        represent_smooth(&f).unwrap(),
        represent_smooth_transitive(&f).unwrap(),
        represent_ranked(&f).unwrap(),
    ];
    for s in &built {
        verify_round_trip(&f, s).unwrap();
    }
}

#[test]
fn chain_choice_round_trips_and_both_general_forms_agree() {
    let s0 = fixtures::chain_structure(&["a", "b", "c"]);
    let dom = Bits::full(3).subsets();
    let f = ChoiceFunction::from_structure(&s0, &dom).unwrap();
    let g = represent_general(&f).unwrap();
    let t = represent_transitive(&f).unwrap();
    assert!(t.is_transitive());
    for x in f.domain() {
        assert_eq!(g.mu(x).unwrap(), t.mu(x).unwrap());
    }
    let full = Bits::full(3);
    assert_eq!(g.mu(&full).unwrap(), Bits::singleton(3, 0));
}

#[test]
fn preference_preservation_failure_is_reported_by_name() {
    let f = fixtures::need_pr();
    for result in [represent_general(&f), represent_transitive(&f)] {
        let err = result.unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(err.to_string().contains("(μPR)"));
    }
}

#[test]
fn cumulativity_failure_blocks_the_smooth_synthesizers() {
    let f = fixtures::need_smooth_values();
    for result in [represent_smooth(&f), represent_smooth_transitive(&f)] {
        let err = result.unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(err.to_string().contains("(μCUM)"));
    }
}

#[test]
fn missing_union_closure_is_a_distinct_error() {
    let f = ChoiceFunction::identity_on(
        vec!["a".into(), "b".into()],
        vec![Bits::singleton(2, 0), Bits::singleton(2, 1)],
    )
    .unwrap();
    for result in [
        represent_smooth(&f),
        represent_smooth_transitive(&f),
        represent_ranked(&f),
    ] {
        let err = result.unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        let msg = err.to_string();
        assert!(msg.contains("not closed under union"));
        assert!(msg.contains("{a,b}"));
        assert!(!msg.contains("fails on"));
    }
}

#[test]
fn empty_choice_on_a_pair_blocks_rank_synthesis_by_name() {
    let err = represent_ranked(&fixtures::rank_copies()).unwrap_err();
    assert_eq!(err.to_string(), "contract error: (μ∅) fails on {a,b}");
}

#[test]
fn two_element_rank_puts_the_chosen_element_below() {
    let a = Bits::singleton(2, 0);
    let b = Bits::singleton(2, 1);
    let ab = Bits::full(2);
    let f = ChoiceFunction::new(
        vec!["a".into(), "b".into()],
        vec![(a.clone(), a.clone()), (b.clone(), b), (ab, a)],
    )
    .unwrap();
    let s = represent_ranked(&f).unwrap();
    let na = s.node_index(0, 0).unwrap();
    let nb = s.node_index(1, 0).unwrap();
    assert!(s.has_arrow(na, nb));
    assert!(!s.has_arrow(nb, na));
    assert!(s.is_ranked().ranked);
}

#[test]
fn total_preorder_completion_is_stable_and_faithful() {
    let empty = extend_to_total_preorder(3, &[]).unwrap();
    assert!(empty.lt(0, 1) && empty.lt(1, 2));

    let one = extend_to_total_preorder(3, &[(2, 0)]).unwrap();
    assert!(one.le(2, 0) && !one.le(0, 2));

    let cycle = extend_to_total_preorder(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    assert!(cycle.le(0, 1) && cycle.le(1, 0) && cycle.le(2, 1) && cycle.le(1, 2));

    let err = extend_to_total_preorder(2, &[(0, 5)]).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
}

#[test]
fn chain_replacement_makes_transitive_without_changing_selection() {
    let s = fixtures::chain_structure(&["a", "b", "c"]);
    assert!(!s.is_transitive());
    let t = equiv_transitive(&s).unwrap();
    assert!(t.is_transitive());
    assert_eq!(t.num_nodes(), 5);
    for mask in 0..8u64 {
        let x = Bits::from_mask(3, mask);
        assert_eq!(s.mu(&x).unwrap(), t.mu(&x).unwrap());
    }
}

/// Two copies of x, one shielded by each y; closing the raw relation
/// lets the z elements reach x and wrongly removes it from a set the
/// y elements are missing from. Both repairs keep x there.
#[test]
fn layered_copies_survive_transitive_repair_where_naive_closure_fails() {
    let names: Vec<String> =
        ["x", "y1", "y2", "z1", "z2"].iter().map(|s| s.to_string()).collect();
    let nodes = vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0), (4, 0)];
    let arrows = [(2, 0), (3, 0), (4, 1), (5, 2), (6, 3)];
    let mut s = PrefStructure::new(names.clone(), nodes.clone()).unwrap();
    for &(a, b) in &arrows {
        s.add_arrow(a, b);
    }
    let w = Bits::from_indices(5, &[0, 2, 3, 4]);
    assert!(s.mu(&w).unwrap().contains(0));
    let full = Bits::full(5);
    assert_eq!(s.mu(&full).unwrap(), Bits::from_indices(5, &[2, 3, 4]));

    let mut tc = PrefStructure::new(names, nodes).unwrap();
    for &(a, b) in &arrows {
        tc.add_arrow(a, b);
    }
    loop {
        let mut added = false;
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    if tc.has_arrow(a, b) && tc.has_arrow(b, c) && !tc.has_arrow(a, c) {
                        tc.add_arrow(a, c);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    assert!(tc.is_transitive());
    assert!(!tc.mu(&w).unwrap().contains(0));

    let e = equiv_transitive(&s).unwrap();
    assert!(e.is_transitive());
    assert!(e.mu(&w).unwrap().contains(0));

    let dom = Bits::full(5).subsets();
    let f = ChoiceFunction::from_structure(&s, &dom).unwrap();
    let t = represent_transitive(&f).unwrap();
    assert!(t.is_transitive());
    assert!(t.mu(&w).unwrap().contains(0));
}

#[test]
fn smooth_synthesizers_rebuild_a_smooth_structure() {
    let mut s0 = PrefStructure::discrete(vec!["a".into(), "b".into(), "c".into()]);
    s0.add_arrow(0, 1);
    s0.add_arrow(0, 2);
    let dom = Bits::full(3).subsets();
    let f = ChoiceFunction::from_structure(&s0, &dom).unwrap();
    let s = represent_smooth(&f).unwrap();
    assert!(s.is_smooth(f.domain()).smooth);
    let t = represent_smooth_transitive(&f).unwrap();
    assert!(t.is_transitive());
    assert!(t.is_cycle_free());
    let full = Bits::full(3);
    assert_eq!(s.mu(&full).unwrap(), Bits::singleton(3, 0));
    assert_eq!(t.mu(&full).unwrap(), Bits::singleton(3, 0));
}

#[test]
fn node_budget_is_enforced_before_construction() {
    let f = fixtures::identity_full(&["a", "b", "c"]);
    let results = [
        represent_general_with_budget(&f, 1),
        represent_transitive_with_budget(&f, 1),
        represent_smooth_with_budget(&f, 1),
        represent_smooth_transitive_with_budget(&f, 1),
    ];
    for result in results {
        assert!(matches!(result.unwrap_err(), Error::Resource(_)));
    }
}

fn walk_tree(t: &ChoiceTree, f: &ChoiceFunction) {
    let base = t.base.as_ref().unwrap();
    let hull = compute_hu(f, None, base).unwrap().hu_single;
    assert!(f.value(base).unwrap().contains(t.element) || !hull.contains(t.element));
    for c in &t.children {
        let cb = c.base.as_ref().unwrap();
        assert!(base.is_subset(cb) && base != cb);
        assert!(!hull.contains(c.element));
        walk_tree(c, f);
    }
}

#[test]
fn minimizing_tree_bases_grow_and_children_avoid_the_hull() {
    let f = fixtures::identity_full(&["a", "b", "c"]);
    let a = Bits::singleton(3, 0);
    let tree = minimizing_tree(&f, &a, 0).unwrap();
    assert_eq!(tree.base, Some(a.clone()));
    assert_eq!(tree.element, 0);
    assert!(tree.height() <= 4);
    assert!(!tree.children.is_empty());
    walk_tree(&tree, &f);

    let err = minimizing_tree(&f, &a, 1).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
}

#[test]
fn selection_index_families_follow_the_domain() {
    let s0 = fixtures::chain_structure(&["a", "b", "c"]);
    let dom = Bits::full(3).subsets();
    let f = ChoiceFunction::from_structure(&s0, &dom).unwrap();
    let by_sets = selection_indices(&f, 2, false).unwrap();
    assert_eq!(by_sets.len(), 6);
    for g in &by_sets {
        assert!(g.is_valid());
        assert_eq!(g.family.len(), 2);
    }
    let by_images = selection_indices(&f, 2, true).unwrap();
    assert_eq!(by_images.len(), 1);
    assert!(by_images[0].is_valid());
    assert_eq!(by_images[0].range(3), Bits::from_indices(3, &[0, 1]));
}
