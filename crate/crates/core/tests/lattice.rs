use preflab_core::bits::Bits;
use preflab_core::cond::{
    check_cum_alpha, check_mu_condition, eval_mu_instance, ChoiceFunction, MuCondition,
};
use preflab_core::lattice::{mu_base_rows, verify_mu_base_row, verify_mu_base_row_seeded};

#[test]
fn positive_rows_hold_exhaustively_up_to_three_elements() {
    for row in mu_base_rows().iter().filter(|r| r.positive) {
        let rep = verify_mu_base_row(row.id, 3).unwrap();
        assert!(rep.confirmed, "row {} broke: {}", row.id, rep.render());
        assert!(rep.counterexample.is_none());
        assert!(rep.functions_checked > 0);
        assert!(rep.instances_checked > rep.functions_checked);
        assert!(!rep.sampled);
    }
}

#[test]
fn projection_gives_cut_and_mutual_inclusion_gives_cumulativity() {
    let three = verify_mu_base_row("3", 3).unwrap();
    assert!(three.positive && three.confirmed);
    let seven = verify_mu_base_row("7", 3).unwrap();
    assert!(seven.positive && seven.confirmed);
}

fn assert_replayable(rep: &preflab_core::lattice::RowReport) {
    let cex = rep.counterexample.as_ref().expect("counterexample expected");
    for &h in &cex.hypotheses {
        let check = check_mu_condition(&cex.function, h).unwrap();
        assert!(check.holds, "hypothesis {} does not hold on the reported function", h);
    }
    assert!(
        !eval_mu_instance(&cex.function, cex.condition, &cex.instance).unwrap(),
        "reported instance does not violate {}",
        cex.condition
    );
}

#[test]
fn cumulativity_alone_misses_mutual_inclusion() {
    let rep = verify_mu_base_row("9", 3).unwrap();
    assert!(!rep.positive);
    assert!(rep.confirmed, "expected a counterexample for row 9");
    assert_replayable(&rep);
    let cex = rep.counterexample.unwrap();
    assert_eq!(cex.condition, MuCondition::SubSup);
    // The found function has the same shape as the fixture separating
    // these conditions: two overlapping sets whose values sit inside
    // the overlap, one landing strictly below the other.
    let f = &cex.function;
    assert_eq!(f.domain().len(), 2);
    let (x, y) = (&f.domain()[0], &f.domain()[1]);
    let (fx, fy) = (f.value(x).unwrap().clone(), f.value(y).unwrap().clone());
    assert!(fx.is_subset(y) && fy.is_subset(x));
    assert_ne!(fx, fy);
}

#[test]
fn rational_monotony_family_misses_projection() {
    let rep = verify_mu_base_row("4", 3).unwrap();
    assert!(!rep.positive);
    assert!(rep.confirmed, "expected a counterexample for row 4");
    assert_replayable(&rep);
    assert_eq!(rep.counterexample.unwrap().condition, MuCondition::Pr);
}

#[test]
fn membership_row_needs_inclusion_beyond_three_elements() {
    let small = verify_mu_base_row("17", 3).unwrap();
    assert!(small.confirmed, "row 17 must hold up to three elements");

    // At four elements the two hypotheses no longer force values to
    // stay inside their arguments, and the membership conclusion
    // breaks. The sampling pass must surface that.
    let wide = verify_mu_base_row("17", 4).unwrap();
    assert!(wide.sampled);
    assert!(!wide.confirmed);
    assert_replayable(&wide);
    let cex = wide.counterexample.unwrap();
    let viol = cex
        .instance
        .sets
        .iter()
        .find(|(n, _)| *n == "X")
        .map(|(_, b)| b.clone())
        .unwrap();
    let escaped = cex.function.domain().iter().any(|x| {
        let v = cex.function.value(x).unwrap();
        !v.is_subset(x)
    });
    assert!(escaped, "the gap needs a value escaping its argument");
    assert!(!viol.is_empty());
}

#[test]
fn sampling_pass_is_deterministic_for_a_fixed_seed() {
    let a = verify_mu_base_row_seeded("8", 4, 23).unwrap();
    let b = verify_mu_base_row_seeded("8", 4, 23).unwrap();
    assert!(a.sampled && b.sampled);
    assert_eq!(a.confirmed, b.confirmed);
    assert_eq!(a.functions_checked, b.functions_checked);
    assert_eq!(a.instances_checked, b.instances_checked);
}

#[test]
fn out_of_scope_and_malformed_requests_are_rejected() {
    for id in ["19", "20", "21", "22", "0", "42", "twelve"] {
        let err = verify_mu_base_row(id, 3).unwrap_err();
        assert!(matches!(err, preflab_core::Error::Input(_)), "{id}: {err}");
    }
    assert!(verify_mu_base_row("3", 0).is_err());
    assert!(verify_mu_base_row("3", 5).is_err());
}

/// All inclusion-respecting choice functions on a family of subsets of
/// a universe of size k, visited as ChoiceFunctions.
fn for_each_inclusive_function(
    k: usize,
    family: &[u64],
    visit: &mut impl FnMut(&ChoiceFunction),
) {
    let names: Vec<String> =
        ["a", "b", "c", "d"][..k].iter().map(|s| s.to_string()).collect();
    let mut choice: Vec<u64> = vec![0; family.len()];
    loop {
        let entries: Vec<(Bits, Bits)> = family
            .iter()
            .zip(&choice)
            .map(|(&x, &v)| (Bits::from_mask(k, x), Bits::from_mask(k, v)))
            .collect();
        visit(&ChoiceFunction::new(names.clone(), entries).unwrap());
        // Odometer over submasks of each family set.
        let mut pos = 0;
        loop {
            if pos == family.len() {
                return;
            }
            let x = family[pos];
            // Next submask of x after choice[pos] in ascending order.
            let mut v = choice[pos].wrapping_add(1);
            while v <= x && v & !x != 0 {
                v += 1;
            }
            if v <= x {
                choice[pos] = v;
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn equality_and_its_primed_form_agree_under_intersection_closure() {
    // Exhaustive over every intersection-closed family on two elements
    // and every inclusion-respecting function on it.
    let k = 2;
    for fam_mask in 0u32..16 {
        let family: Vec<u64> = (0..4u64).filter(|s| fam_mask & (1 << s) != 0).collect();
        let closed = family
            .iter()
            .all(|&a| family.iter().all(|&b| family.contains(&(a & b))));
        if !closed {
            continue;
        }
        let mut fam = family.clone();
        fam.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        for_each_inclusive_function(k, &fam, &mut |f| {
            let eq = check_mu_condition(f, MuCondition::Eq).unwrap().holds;
            let eqp = check_mu_condition(f, MuCondition::EqPrime).unwrap().holds;
            assert_eq!(eq, eqp, "diverged on {}", f.to_text());
        });
    }
}

#[test]
fn equality_forms_agree_on_the_full_three_element_lattice() {
    let k = 3;
    let fam: Vec<u64> = {
        let mut v: Vec<u64> = (0..8).collect();
        v.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        v
    };
    let mut seen = 0u64;
    for_each_inclusive_function(k, &fam, &mut |f| {
        seen += 1;
        let eq = check_mu_condition(f, MuCondition::Eq).unwrap().holds;
        let eqp = check_mu_condition(f, MuCondition::EqPrime).unwrap().holds;
        assert_eq!(eq, eqp, "diverged on {}", f.to_text());
    });
    assert_eq!(seen, 4096);
}

#[test]
fn staged_cumulativity_weakens_as_the_stage_drops() {
    let k = 2;
    let fam: Vec<u64> = {
        let mut v: Vec<u64> = (0..4).collect();
        v.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        v
    };
    for_each_inclusive_function(k, &fam, &mut |f| {
        for transitive in [false, true] {
            let holds: Vec<bool> = (0..=3)
                .map(|alpha| check_cum_alpha(f, alpha, transitive).unwrap().holds)
                .collect();
            for hi in 0..holds.len() {
                for lo in 0..hi {
                    assert!(
                        !holds[hi] || holds[lo],
                        "stage {hi} held but stage {lo} failed on {}",
                        f.to_text()
                    );
                }
            }
        }
    });
}
