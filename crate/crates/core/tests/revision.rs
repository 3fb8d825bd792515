use preflab_core::bits::Bits;
use preflab_core::error::Error;
use preflab_core::logic::{models_of, theory_of, Language, ModelSet, Theory};
use preflab_core::revision::{
    check_agm, check_agm_sampled, check_loop, check_suite, collective_revise,
    contraction_from_entrenchment, contraction_from_revision, entrenchment_from_contraction,
    individual_revise, interdefine, render_report, revise_theories, revision_from_contraction,
    revision_row_from_contraction_row, umgebung, weaktr_demo, AgmSubject, BeliefKind,
    BeliefObject, OpTable, PseudoDistance, RevisionOperator, TableDefault,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(len: usize, indices: &[usize]) -> Bits {
    Bits::from_indices(len, indices)
}

/// Symmetric matrix from the strict upper triangle, row by row.
fn symmetric(n: usize, upper: &[u64]) -> PseudoDistance {
    let at = |i: usize, j: usize| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let before = i * (n - 1) - i * (i.saturating_sub(1)) / 2;
        upper[before + (j - i - 1)]
    };
    let matrix: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { at(i, j) }).collect())
        .collect();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    PseudoDistance::new(points, matrix).expect("square matrix")
}

fn random_identity_distance(n: usize, max: u64, rng: &mut ChaCha8Rng) -> PseudoDistance {
    let upper: Vec<u64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(1..=max)).collect();
    symmetric(n, &upper)
}

#[test]
fn collective_revision_keeps_global_minimizers() {
    // d(x,y)=1, d(x,z)=2, d(y,z)=3.
    let d = symmetric(3, &[1, 2, 3]);
    assert!(d.respects_identity() && d.symmetric());
    let got = collective_revise(&bits(3, &[0]), &bits(3, &[1, 2]), &d).unwrap();
    assert_eq!(got, bits(3, &[1]));

    // Identical and overlapping arguments collapse to the overlap.
    for a_mask in 0..8u64 {
        let a = Bits::from_mask(3, a_mask);
        assert_eq!(collective_revise(&a, &a, &d).unwrap(), a);
        for b_mask in 0..8u64 {
            let b = Bits::from_mask(3, b_mask);
            let got = collective_revise(&a, &b, &d).unwrap();
            if a.intersects(&b) {
                assert_eq!(got, a.intersect(&b));
            }
            assert!(got.is_subset(&b));
            assert_eq!(got.is_empty(), a.is_empty() || b.is_empty());
        }
    }
}

#[test]
fn individual_revision_unions_per_source_minimizers() {
    let d = symmetric(3, &[1, 2, 3]);
    for a_mask in 1..8u64 {
        let a = Bits::from_mask(3, a_mask);
        if a.count() == 1 {
            for b_mask in 0..8u64 {
                let b = Bits::from_mask(3, b_mask);
                assert_eq!(
                    individual_revise(&a, &b, &d).unwrap(),
                    collective_revise(&a, &b, &d).unwrap()
                );
            }
        }
        assert!(individual_revise(&a, &Bits::empty(3), &d).unwrap().is_empty());
    }

    // Sources with different nearest targets contribute all of them:
    // from y the nearest of {x,z} is x (1 < 3), from z it is x too (2 < 3),
    // so pull z's target apart with a fresh matrix.
    let d2 = symmetric(3, &[5, 2, 1]); // d(x,y)=5, d(x,z)=2, d(y,z)=1
    let got = individual_revise(&bits(3, &[0, 1]), &bits(3, &[0, 2]), &d2).unwrap();
    // x keeps itself (distance 0), y picks z (1 < 5).
    assert_eq!(got, bits(3, &[0, 2]));
    let coll = collective_revise(&bits(3, &[0, 1]), &bits(3, &[0, 2]), &d2).unwrap();
    assert_eq!(coll, bits(3, &[0]));
}

#[test]
fn theory_revision_follows_the_model_distance() {
    let lang = Language::new(&["p", "q"]).unwrap();
    let d = PseudoDistance::hamming(2).unwrap();
    let t = Theory::parse("p & q").unwrap();
    let t2 = Theory::parse("~p").unwrap();
    let revised = revise_theories(&lang, &t, &t2, &d).unwrap();
    let got = models_of(&lang, &revised).unwrap();
    let expected = models_of(&lang, &Theory::parse("~p & q").unwrap()).unwrap();
    assert_eq!(got.bits(), expected.bits());

    // Consistent union: revision is the union's closure.
    for t_mask in 0..16u64 {
        for u_mask in 0..16u64 {
            let tm = ModelSet::from_bits(&lang, Bits::from_mask(4, t_mask));
            let um = ModelSet::from_bits(&lang, Bits::from_mask(4, u_mask));
            let joint = tm.bits().intersect(um.bits());
            let out = revise_theories(&lang, &theory_of(&tm), &theory_of(&um), &d).unwrap();
            let out_models = models_of(&lang, &out).unwrap();
            if !joint.is_empty() {
                assert_eq!(out_models.bits(), &joint);
            }
            if u_mask == 0 {
                assert!(out_models.bits().is_empty());
            }
        }
    }

    let short = PseudoDistance::hamming(1).unwrap();
    let err = revise_theories(&lang, &t, &t2, &short).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
}

#[test]
fn umgebung_collects_points_within_the_set_distance() {
    let d = symmetric(3, &[1, 2, 3]); // d(x,y)=1 < d(x,z)=2
    let got = umgebung(&bits(3, &[0]), &bits(3, &[1]), &d).unwrap();
    assert_eq!(got, bits(3, &[0, 1]));

    for x_mask in 1..8u64 {
        let x = Bits::from_mask(3, x_mask);
        // Same set: exactly the distance-zero points.
        assert_eq!(umgebung(&x, &x, &d).unwrap(), x);
        for y_mask in 1..8u64 {
            let y = Bits::from_mask(3, y_mask);
            if y.is_subset(&x) {
                assert!(x.is_subset(&umgebung(&x, &y, &d).unwrap()));
            }
        }
    }

    let err = umgebung(&Bits::empty(3), &bits(3, &[1]), &d).unwrap_err();
    assert_eq!(err.to_string(), "contract error: umgebung needs nonempty sets");
}

#[test]
fn umgebung_matches_revision_and_entrenchment_queries() {
    // All symmetric identity-respecting matrices on 3 points, values 1..=3.
    for v01 in 1..=3u64 {
        for v02 in 1..=3u64 {
            for v12 in 1..=3u64 {
                let d = symmetric(3, &[v01, v02, v12]);
                let op = RevisionOperator::Distance(d.clone());
                let c = contraction_from_revision(&op).unwrap();
                for x_mask in 1..8u64 {
                    let x = Bits::from_mask(3, x_mask);
                    let e = entrenchment_from_contraction(&c, &x).unwrap();
                    for y_mask in 1..8u64 {
                        let y = Bits::from_mask(3, y_mask);
                        let hood = umgebung(&x, &y, &d).unwrap();
                        for z_mask in 1..8u64 {
                            let z = Bits::from_mask(3, z_mask);
                            let lhs = hood.intersects(&z);
                            let via_revision = collective_revise(&x, &y.union(&z), &d)
                                .unwrap()
                                .intersects(&z);
                            let via_entrenchment =
                                e.holds(&z.complement(), &y.complement()).unwrap();
                            assert_eq!(lhs, via_revision);
                            assert_eq!(lhs, via_entrenchment);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn hamming_revision_satisfies_the_revision_suite() {
    let op = RevisionOperator::Distance(PseudoDistance::hamming(2).unwrap());
    let subject = AgmSubject::Revision(&op);
    for rep in check_suite(&subject).unwrap() {
        assert!(rep.holds, "{}", render_report(op.points(), &rep));
    }
    let rep = check_agm(&subject, "X|2").unwrap();
    assert_eq!(rep.instances_checked, 15 * 16);
    let rep = check_agm(&subject, "X|7").unwrap();
    assert_eq!(rep.instances_checked, 15 * 16 * 16);

    // Syntactic aliases run the same sweeps.
    let via_alias = check_agm(&subject, "K*8").unwrap();
    let direct = check_agm(&subject, "X|8").unwrap();
    assert_eq!(via_alias.holds, direct.holds);
    assert_eq!(via_alias.instances_checked, direct.instances_checked);
    assert_eq!(via_alias.condition, "(K*8)");

    for trivial in ["K*1", "K*6"] {
        let rep = check_agm(&subject, trivial).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.instances_checked, 0);
    }

    for bad in ["X|1", "X|6", "X|9", "EE6", "EE0", "nonsense", "μPR"] {
        let err = check_agm(&subject, bad).unwrap_err();
        assert!(matches!(err, Error::Input(_)), "{bad}");
    }

    // Contraction ids need a contraction operator.
    let err = check_agm(&subject, "X-4").unwrap_err();
    assert!(err.to_string().contains("needs a contraction operator"));
}

#[test]
fn degenerate_tables_fail_the_named_postulates() {
    let points: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let empty_op =
        RevisionOperator::Table(OpTable::new(points.clone(), TableDefault::Empty).unwrap());
    let rep = check_agm(&AgmSubject::Revision(&empty_op), "X|5").unwrap();
    assert!(!rep.holds);
    let cex = rep.counterexample.as_ref().unwrap();
    let a = &cex.sets.iter().find(|(n, _)| *n == "A").unwrap().1;
    assert!(!a.is_empty());
    assert_eq!(
        render_report(empty_op.points(), &rep),
        "(X|5): fails at X={a}, A={a}"
    );

    let second_op =
        RevisionOperator::Table(OpTable::new(points, TableDefault::Second).unwrap());
    let rep = check_agm(&AgmSubject::Revision(&second_op), "X|4").unwrap();
    assert!(!rep.holds);
    let cex = rep.counterexample.unwrap();
    let x = &cex.sets.iter().find(|(n, _)| *n == "X").unwrap().1;
    let a = &cex.sets.iter().find(|(n, _)| *n == "A").unwrap().1;
    assert!(!x.intersect(a).is_empty());
    assert!(!second_op.apply(x, a).unwrap().is_subset(&x.intersect(a)));
}

#[test]
fn sampled_checks_are_deterministic_and_match_exhaustive() {
    let op = RevisionOperator::Distance(PseudoDistance::hamming(3).unwrap());
    let subject = AgmSubject::Revision(&op);
    for id in ["X|2", "X|3", "X|4", "X|5", "X|7", "X|8"] {
        let rep = check_agm_sampled(&subject, id, 10_000, 0xfeed).unwrap();
        assert!(rep.holds, "{id}");
        assert_eq!(rep.instances_checked, 10_000);
    }

    // The exhaustive ternary sweep at three variables overflows the cap.
    let err = check_agm(&subject, "X|7").unwrap_err();
    assert!(matches!(err, Error::Resource(_)));

    // Sampling a failing table twice reproduces the same counterexample.
    let points: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let bad = RevisionOperator::Table(OpTable::new(points, TableDefault::Second).unwrap());
    let first = check_agm_sampled(&AgmSubject::Revision(&bad), "X|4", 4_000, 7).unwrap();
    let again = check_agm_sampled(&AgmSubject::Revision(&bad), "X|4", 4_000, 7).unwrap();
    assert!(!first.holds);
    assert_eq!(first.instances_checked, again.instances_checked);
    assert_eq!(first.counterexample, again.counterexample);
}

#[test]
fn interdefinability_round_trips_at_two_variables() {
    let op = RevisionOperator::Distance(PseudoDistance::hamming(2).unwrap());
    let c = contraction_from_revision(&op).unwrap();
    let back = revision_from_contraction(&c).unwrap();
    for x_mask in 0..16u64 {
        for a_mask in 0..16u64 {
            let x = Bits::from_mask(4, x_mask);
            let a = Bits::from_mask(4, a_mask);
            assert_eq!(op.apply(&x, &a).unwrap(), back.apply(&x, &a).unwrap());
        }
    }

    let full = Bits::full(4);
    for x_mask in 1..16u64 {
        let x = Bits::from_mask(4, x_mask);
        let e = entrenchment_from_contraction(&c, &x).unwrap();
        // The top set compares to itself by the first disjunct alone.
        assert!(e.holds(&full, &full).unwrap());
        assert!(c.apply(&x, &full).unwrap().is_subset(&full));

        let row = contraction_from_entrenchment(&e).unwrap();
        assert_eq!(row.value(&full).unwrap(), x, "removing the top set keeps the state");
        for a_mask in 0..16u64 {
            let a = Bits::from_mask(4, a_mask);
            assert_eq!(
                row.value(&a).unwrap(),
                c.apply(&x, &a).unwrap(),
                "entrenchment rebuilds the contraction row at {x:?}, A={a:?}"
            );
        }

        let rev_row = revision_row_from_contraction_row(&row).unwrap();
        for a_mask in 0..16u64 {
            let a = Bits::from_mask(4, a_mask);
            assert_eq!(rev_row.value(&a).unwrap(), op.apply(&x, &a).unwrap());
        }
    }
}

#[test]
fn interdefine_dispatches_and_validates() {
    let op = RevisionOperator::Distance(PseudoDistance::hamming(1).unwrap());
    let obj = BeliefObject::Revision(op.clone());
    let x = bits(2, &[0]);

    let err = interdefine(&obj, BeliefKind::Revision, None).unwrap_err();
    assert_eq!(err.to_string(), "input error: source and target kinds are equal");
    let err = interdefine(&obj, BeliefKind::Entrenchment, None).unwrap_err();
    assert!(matches!(err, Error::Input(_)));

    let contraction = interdefine(&obj, BeliefKind::Contraction, None).unwrap();
    assert_eq!(contraction.kind(), BeliefKind::Contraction);
    let entrenchment = interdefine(&obj, BeliefKind::Entrenchment, Some(&x)).unwrap();
    assert_eq!(entrenchment.kind(), BeliefKind::Entrenchment);
    // A fixed-state source yields a row carrying the same state.
    let row = interdefine(&entrenchment, BeliefKind::Revision, None).unwrap();
    let BeliefObject::RevisionRow(row) = &row else {
        panic!("expected a revision row");
    };
    assert_eq!(row.fixed_set(), &x);
    for a_mask in 0..4u64 {
        let a = Bits::from_mask(2, a_mask);
        assert_eq!(row.value(&a).unwrap(), op.apply(&x, &a).unwrap());
    }
    for rep in check_suite(&AgmSubject::RevisionAt(row)).unwrap() {
        assert!(rep.holds);
    }

    // A source that breaks its suite is rejected by name.
    let points: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let bad = RevisionOperator::Table(OpTable::new(points, TableDefault::Empty).unwrap());
    let err = interdefine(&BeliefObject::Revision(bad), BeliefKind::Contraction, None).unwrap_err();
    assert_eq!(err.to_string(), "contract error: source fails (X|3) at X={a}, A={a}");
}

#[test]
fn loop_condition_fails_on_the_rotating_table() {
    let table = OpTable::parse(
        "points x y z\n\
         default second\n\
         {y} {x,z} -> {x}\n\
         {z} {x,y} -> {y}\n\
         {x} {y,z} -> {z}\n",
    )
    .unwrap();
    let op = RevisionOperator::Table(table);
    let rep = check_loop(&op, "|Loop", 6).unwrap();
    assert!(!rep.holds);
    let cex = rep.counterexample.unwrap();
    let chain: Vec<Bits> = cex.sets.iter().map(|(_, b)| b.clone()).collect();
    assert!(chain.len() >= 2 && chain.len() <= 7);
    for w in &chain {
        assert!(!w.is_empty());
    }
    // Re-check the witness against the condition as written.
    let k = chain.len() - 1;
    for i in 1..k {
        let premise = op
            .apply(&chain[i], &chain[i - 1].union(&chain[i + 1]))
            .unwrap()
            .intersects(&chain[i - 1]);
        assert!(premise, "inner premise {i} of the returned chain");
    }
    let last = op
        .apply(&chain[k], &chain[k - 1].union(&chain[0]))
        .unwrap()
        .intersects(&chain[k - 1]);
    assert!(last, "closing premise of the returned chain");
    let conclusion = op
        .apply(&chain[0], &chain[k].union(&chain[1]))
        .unwrap()
        .intersects(&chain[1]);
    assert!(!conclusion, "the conclusion must fail on a witness");
}

#[test]
fn loop_condition_holds_for_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    for _ in 0..25 {
        let d = random_identity_distance(4, 9, &mut rng);
        let op = RevisionOperator::Distance(d);
        let rep = check_loop(&op, "|Loop", 6).unwrap();
        assert!(rep.holds, "{}", render_report(op.points(), &rep));
        assert!(rep.instances_checked > 0);
    }
    let op = RevisionOperator::Distance(PseudoDistance::hamming(2).unwrap());
    let rep = check_loop(&op, "*Loop", 6).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.condition, "(*Loop)");

    // Degenerate and invalid inputs.
    let empty = RevisionOperator::Distance(PseudoDistance::new(vec![], vec![]).unwrap());
    let rep = check_loop(&empty, "|Loop", 6).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.instances_checked, 0);
    assert!(matches!(check_loop(&op, "|Loop", 0), Err(Error::Input(_))));
    assert!(matches!(check_loop(&op, "|Loop", 9), Err(Error::Input(_))));
    assert!(matches!(check_loop(&op, "oops", 3), Err(Error::Input(_))));
    let six = RevisionOperator::Distance(PseudoDistance::hamming(3).unwrap());
    assert!(matches!(check_loop(&six, "|Loop", 3), Err(Error::Resource(_))));
}

#[test]
fn loop_check_catches_single_step_violations() {
    // {a}|{b} is empty by table entry, so the one-link chain a,b already
    // confirms forward but not backward.
    let mut table = OpTable::new(
        ["a", "b"].iter().map(|s| s.to_string()).collect(),
        TableDefault::Second,
    )
    .unwrap();
    table.insert(&bits(2, &[0]), &bits(2, &[1]), &Bits::empty(2)).unwrap();
    let op = RevisionOperator::Table(table);
    let rep = check_loop(&op, "|Loop", 1).unwrap();
    assert!(!rep.holds);
    let chain = rep.counterexample.unwrap().sets;
    assert_eq!(chain.len(), 2);
    assert_eq!(chain[0].1, bits(2, &[0]));
    assert_eq!(chain[1].1, bits(2, &[1]));
}

#[test]
fn succ_and_con_hold_for_every_distance() {
    // All symmetric 3-point matrices with values up to 2, zero diagonal.
    for v01 in 0..=2u64 {
        for v02 in 0..=2u64 {
            for v12 in 0..=2u64 {
                let d = symmetric(3, &[v01, v02, v12]);
                for a_mask in 1..8u64 {
                    for b_mask in 1..8u64 {
                        let a = Bits::from_mask(3, a_mask);
                        let b = Bits::from_mask(3, b_mask);
                        let got = collective_revise(&a, &b, &d).unwrap();
                        assert!(got.is_subset(&b), "revision stays inside the input");
                        if d.respects_identity() && a.intersects(&b) {
                            assert_eq!(got, a.intersect(&b));
                        }
                    }
                }
            }
        }
    }
    // Random 4-point matrices, exhaustive over set pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..60 {
        let d = random_identity_distance(4, 7, &mut rng);
        for a_mask in 1..16u64 {
            for b_mask in 1..16u64 {
                let a = Bits::from_mask(4, a_mask);
                let b = Bits::from_mask(4, b_mask);
                let got = collective_revise(&a, &b, &d).unwrap();
                assert!(got.is_subset(&b));
                if a.intersects(&b) {
                    assert_eq!(got, a.intersect(&b));
                }
            }
        }
    }
}

#[test]
fn individual_distance_cannot_order_shared_targets() {
    // Sweep every symmetric 3-point matrix with values up to 4, diagonal
    // included: no matrix selects b from {a,b} and c from {a,c} against
    // the shared targets {b,c}.
    let ab = bits(3, &[0, 1]);
    let ac = bits(3, &[0, 2]);
    let targets = bits(3, &[1, 2]);
    let just_b = bits(3, &[1]);
    let just_c = bits(3, &[2]);
    let mut swept = 0u64;
    for daa in 0..=4u64 {
        for dbb in 0..=4u64 {
            for dcc in 0..=4u64 {
                for dab in 0..=4u64 {
                    for dac in 0..=4u64 {
                        for dbc in 0..=4u64 {
                            let matrix = vec![
                                vec![daa, dab, dac],
                                vec![dab, dbb, dbc],
                                vec![dac, dbc, dcc],
                            ];
                            let d = PseudoDistance::new(
                                vec!["a".into(), "b".into(), "c".into()],
                                matrix,
                            )
                            .unwrap();
                            swept += 1;
                            let first = individual_revise(&ab, &targets, &d).unwrap();
                            let second = individual_revise(&ac, &targets, &d).unwrap();
                            assert!(
                                !(first == just_b && second == just_c),
                                "d(a,b)={dab} d(a,c)={dac} cannot order both ways"
                            );
                        }
                    }
                }
            }
        }
    }
    assert_eq!(swept, 5u64.pow(6));
}

#[test]
fn weaktr_configurations_are_indiscernible() {
    let report = weaktr_demo();
    assert!(report.all_equal);
    assert!(report.mismatch.is_none());
    assert_eq!(report.pairs_compared, 225);

    // The orderings agree pointwise but the endpoint-free comparison flips.
    assert!(report.first.value(0, 1) < report.first.value(2, 3));
    assert!(report.second.value(0, 1) > report.second.value(2, 3));

    // Singleton queries coincide, and C=D returns C under both.
    let a = bits(4, &[0]);
    let bx = bits(4, &[1, 2]);
    assert_eq!(
        collective_revise(&a, &bx, &report.first).unwrap(),
        collective_revise(&a, &bx, &report.second).unwrap()
    );
    for mask in 1..16u64 {
        let c = Bits::from_mask(4, mask);
        assert_eq!(collective_revise(&c, &c, &report.first).unwrap(), c);
        assert_eq!(collective_revise(&c, &c, &report.second).unwrap(), c);
    }
}

#[test]
fn distance_and_table_listings_parse() {
    let d = PseudoDistance::parse_triangular(
        "# four points\n\
         a\n\
         b 2\n\
         x 4 4\n\
         y 1 1 3\n",
    )
    .unwrap();
    assert_eq!(d.len(), 4);
    assert_eq!(d.points(), ["a", "b", "x", "y"]);
    assert_eq!(d.value(0, 1), 2);
    assert_eq!(d.value(2, 0), 4);
    assert_eq!(d.value(3, 2), 3);
    assert!(d.symmetric() && d.respects_identity());

    for bad in [
        "a\nb\n",              // missing distance
        "a\nb 1 2\n",          // too many distances
        "a\nb one\n",          // not a natural
        "a\na 1\n",            // duplicate name
        "",                    // no points
    ] {
        assert!(matches!(PseudoDistance::parse_triangular(bad), Err(Error::Input(_))), "{bad:?}");
    }

    let table = OpTable::parse(
        "points x y z\n\
         default overlap\n\
         {y} {x,z} -> {x}\n\
         {} {x} -> {}\n",
    )
    .unwrap();
    assert_eq!(table.len(), 3);
    let y = bits(3, &[1]);
    let xz = bits(3, &[0, 2]);
    assert_eq!(table.apply(&y, &xz).unwrap(), bits(3, &[0]));
    // Overlap default: y | {y,z} = {y}; disjoint pairs fall back to the input.
    assert_eq!(table.apply(&y, &bits(3, &[1, 2])).unwrap(), y);
    assert_eq!(table.apply(&bits(3, &[0]), &y).unwrap(), y);
    assert_eq!(table.apply(&Bits::empty(3), &bits(3, &[0])).unwrap(), Bits::empty(3));

    for bad in [
        "{x} {y} -> {y}\n",                        // entry before points
        "points x y\npoints x y\n",                // repeated points line
        "points x y\ndefault maybe\n",             // unknown default
        "points x y\n{x} {y}\n",                   // missing arrow
        "points x y\n{x} -> {y}\n",                // one set on the left
        "points x y\n{w} {y} -> {y}\n",            // unknown point
        "points x y\n{x} {y} -> {y}\n{x} {y} -> {}\n", // duplicate entry
        "",                                        // nothing at all
    ] {
        assert!(matches!(OpTable::parse(bad), Err(Error::Input(_))), "{bad:?}");
    }

    // Values escaping the second argument violate the operator shape.
    let err = OpTable::parse("points x y\n{x} {y} -> {x}\n").unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
    assert!(err.to_string().contains("not contained"));
}

#[test]
fn entrenchment_suite_reports_shape() {
    let op = RevisionOperator::Distance(PseudoDistance::hamming(2).unwrap());
    let c = contraction_from_revision(&op).unwrap();
    let x = bits(4, &[3]);
    let e = entrenchment_from_contraction(&c, &x).unwrap();
    let subject = AgmSubject::Entrenchment(&e);
    for rep in check_suite(&subject).unwrap() {
        assert!(rep.holds, "{}", render_report(e.points(), &rep));
    }
    assert_eq!(check_agm(&subject, "EE1").unwrap().instances_checked, 16 * 16 * 16);
    assert_eq!(check_agm(&subject, "EE2").unwrap().instances_checked, 16 * 16);
    assert_eq!(check_agm(&subject, "EE4").unwrap().instances_checked, 16);

    // Entrenchment ids reject operator subjects and vice versa.
    assert!(matches!(check_agm(&subject, "X|4"), Err(Error::Input(_))));
    assert!(matches!(
        check_agm(&AgmSubject::Revision(&op), "EE2"),
        Err(Error::Input(_))
    ));

    // An arbitrary reflexive relation that ranks the top set low fails EE5.
    let full = Bits::full(2);
    let points: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let bad = preflab_core::revision::EntrenchmentRelation::from_fn(
        points,
        bits(2, &[0]),
        |_, _| Ok(true),
    )
    .unwrap();
    let rep = check_agm(&AgmSubject::Entrenchment(&bad), "EE5").unwrap();
    assert!(!rep.holds);
    let cex = rep.counterexample.unwrap();
    assert_ne!(cex.sets[0].1, full);
}
