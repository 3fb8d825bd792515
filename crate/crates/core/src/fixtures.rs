//! Small named inputs used across tests and shipped as CLI data files.
//!
//! Each constructor builds the object from first principles (explicit sets
//! and values), never by running the code under test, so tests that replay
//! them are anchored to hand-checkable data.

use crate::bits::Bits;
use crate::cond::ChoiceFunction;
use crate::error::Result;
use crate::pref::PrefStructure;

/// Two overlapping four-element sets whose values agree on the overlap
/// only partially: inclusion and cumulativity hold, the mutual-inclusion
/// equality fails.
pub fn mu_cum_cd() -> ChoiceFunction {
    build(
        &["a", "b", "c", "d"],
        &[(&["a", "b", "c"], &["a"]), (&["a", "b", "d"], &["a", "b"])],
    )
}

/// Identity on the full power set of three elements except one two-element
/// set; breaks the projection condition while keeping the cumulative ones.
pub fn need_pr() -> ChoiceFunction {
    let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
    let ab = Bits::from_indices(3, &[0, 1]);
    let b = Bits::singleton(3, 1);
    let entries = Bits::full(3)
        .subsets()
        .into_iter()
        .map(|x| {
            let fx = if x == ab { b.clone() } else { x.clone() };
            (x, fx)
        })
        .collect();
    ChoiceFunction::new(names, entries).unwrap()
}

/// Identity on the full power set of the given elements.
pub fn identity_full(elements: &[&str]) -> ChoiceFunction {
    let m = elements.len();
    let names: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
    let entries = Bits::full(m).subsets().into_iter().map(|x| (x.clone(), x)).collect();
    ChoiceFunction::new(names, entries).unwrap()
}

/// Both singletons keep themselves but the pair chooses nothing: fine for
/// every preferential condition, hopeless for nonemptiness, hence not
/// ranked-representable.
pub fn rank_copies() -> ChoiceFunction {
    build(
        &["a", "b"],
        &[(&["a"], &["a"]), (&["b"], &["b"]), (&["a", "b"], &[])],
    )
}

/// Target values of a structure that is preferential but not smooth:
/// the big set chooses a, dropping b makes c reappear.
pub fn need_smooth_values() -> ChoiceFunction {
    build(&["a", "b", "c"], &[(&["a", "b", "c"], &["a"]), (&["a", "c"], &["a", "c"])])
}

/// The staged-cumulativity separating family at finite stage kappa: a
/// chain of generators each reaching into the next, built over elements
/// a, b, c, x0..x{kappa+1}, x'0..x'{kappa}. Every cumulativity stage below
/// kappa holds, stage kappa fails, and the domain is closed under
/// intersections but not unions.
pub fn inf_cum_alpha(kappa: usize) -> Result<ChoiceFunction> {
    assert!(kappa >= 1, "stage must be positive");
    let mut names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
    for i in 0..=kappa + 1 {
        names.push(format!("x{i}"));
    }
    for i in 0..=kappa {
        names.push(format!("x'{i}"));
    }
    let m = names.len();
    let idx = |n: &str| names.iter().position(|x| x == n).unwrap();
    let set = |members: &[String]| -> Bits {
        Bits::from_indices(m, &members.iter().map(|n| idx(n)).collect::<Vec<_>>())
    };
    let mut entries: Vec<(Bits, Bits)> = Vec::new();
    // U = {a, c, x0}, chosen entirely.
    let u = set(&["a".into(), "c".into(), "x0".into()]);
    entries.push((u.clone(), u.clone()));
    // X_i = {c, x_i, x'_i, x_{i+1}}, choosing {c, x_i}.
    for i in 0..kappa {
        let x = set(&[
            "c".into(),
            format!("x{i}"),
            format!("x'{i}"),
            format!("x{}", i + 1),
        ]);
        let fx = set(&["c".into(), format!("x{i}")]);
        entries.push((x, fx));
    }
    // X'_kappa = {a, b, c, x_k, x'_k, x_{k+1}}, choosing {a, x_k}.
    let xk = set(&[
        "a".into(),
        "b".into(),
        "c".into(),
        format!("x{kappa}"),
        format!("x'{kappa}"),
        format!("x{}", kappa + 1),
    ]);
    let fxk = set(&["a".into(), format!("x{kappa}")]);
    entries.push((xk, fxk));
    // Close under pairwise intersections; every new set keeps itself.
    loop {
        let current: Vec<Bits> = entries.iter().map(|(x, _)| x.clone()).collect();
        let mut added = false;
        for a in &current {
            for b in &current {
                let meet = a.intersect(b);
                if !current.contains(&meet) && !entries.iter().any(|(x, _)| *x == meet) {
                    entries.push((meet.clone(), meet));
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    ChoiceFunction::new(names, entries)
}

/// Plain chain without transitivity: one copy per element, each attacked
/// by its predecessor.
pub fn chain_structure(elements: &[&str]) -> PrefStructure {
    let mut s = PrefStructure::discrete(elements.iter().map(|e| e.to_string()).collect());
    for i in 1..elements.len() {
        s.add_arrow(i - 1, i);
    }
    s
}

fn build(elements: &[&str], entries: &[(&[&str], &[&str])]) -> ChoiceFunction {
    let m = elements.len();
    let names: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
    let idx = |n: &str| elements.iter().position(|x| *x == n).unwrap();
    let pairs = entries
        .iter()
        .map(|(x, fx)| {
            (
                Bits::from_indices(m, &x.iter().map(|n| idx(n)).collect::<Vec<_>>()),
                Bits::from_indices(m, &fx.iter().map(|n| idx(n)).collect::<Vec<_>>()),
            )
        })
        .collect();
    ChoiceFunction::new(names, pairs).unwrap()
}
