//! Synthesizers that rebuild preferential structures from choice
//! functions, plus the total-preorder completion they share.
//!
//! Every synthesizer checks its preconditions up front, builds the
//! structure, and re-derives the choice function from the result before
//! returning. A mismatch there is reported as a contract error, never as
//! a silently wrong structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::Bits;
use crate::cond::{
    check_mu_condition, compute_hu, ChoiceFunction, ConditionReport, MuCondition,
};
use crate::error::{Error, Result};
use crate::pref::PrefStructure;

/// Hard cap on synthesized node counts. Exceeding it is a resource
/// error; nothing is ever truncated to fit.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// One element's index family together with one choice through it:
/// `picks[i]` is the chosen member of `family[i]`. The general
/// synthesizer ranges over the domain sets that drop x from their value;
/// the smooth ones range over the values of those sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionIndex {
    pub element: usize,
    pub family: Vec<Bits>,
    pub picks: Vec<usize>,
}

impl SelectionIndex {
    /// The set of picked elements.
    pub fn range(&self, len: usize) -> Bits {
        Bits::from_indices(len, &self.picks)
    }

    /// Each pick lies in its set.
    pub fn is_valid(&self) -> bool {
        self.family.len() == self.picks.len()
            && self.family.iter().zip(&self.picks).all(|(s, &p)| s.contains(p))
    }
}

/// Tree indexing one copy of an element. `base` is the bookkeeping set
/// carried by the smooth transitive construction; the plain transitive
/// one leaves it out. A `constant` node stands for the branch that
/// repeats its element forever, realized as a self-loop in the
/// synthesized structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceTree {
    pub base: Option<Bits>,
    pub element: usize,
    pub constant: bool,
    pub children: Vec<ChoiceTree>,
}

impl ChoiceTree {
    pub fn leaf(element: usize) -> ChoiceTree {
        ChoiceTree { base: None, element, constant: false, children: Vec::new() }
    }

    pub fn constant(element: usize) -> ChoiceTree {
        ChoiceTree { base: None, element, constant: true, children: Vec::new() }
    }

    pub fn fan(element: usize, children: Vec<ChoiceTree>) -> ChoiceTree {
        ChoiceTree { base: None, element, constant: false, children }
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }
}

/// The domain sets Y with x in Y - f(Y), in domain order.
fn missing_family(f: &ChoiceFunction, x: usize) -> Result<Vec<Bits>> {
    let mut fam = Vec::new();
    for y in f.domain() {
        if y.contains(x) && !f.value(y)?.contains(x) {
            fam.push(y.clone());
        }
    }
    Ok(fam)
}

/// The values of the missing family, deduplicated, in first-seen order.
fn image_family(f: &ChoiceFunction, x: usize) -> Result<Vec<Bits>> {
    let mut seen = BTreeSet::new();
    let mut fam = Vec::new();
    for y in f.domain() {
        if y.contains(x) && !f.value(y)?.contains(x) {
            let img = f.value(y)?.clone();
            if seen.insert(img.clone()) {
                fam.push(img);
            }
        }
    }
    Ok(fam)
}

/// Number of choices through the family, saturating. A family member
/// with no elements admits no choice at all.
fn choice_count(family: &[Bits]) -> usize {
    family.iter().fold(1usize, |acc, s| acc.saturating_mul(s.count()))
}

/// Visits every choice through the family, one member per set, in
/// ascending odometer order. The empty family yields exactly the empty
/// choice.
fn for_each_choice(
    family: &[Bits],
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let members: Vec<Vec<usize>> = family.iter().map(|s| s.iter().collect()).collect();
    if members.iter().any(|m| m.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; members.len()];
    loop {
        let picks: Vec<usize> = idx.iter().zip(&members).map(|(&i, m)| m[i]).collect();
        visit(&picks)?;
        let mut p = members.len();
        loop {
            if p == 0 {
                return Ok(());
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < members[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Materializes every selection index for x. `images` switches the
/// family from the missing sets themselves to their values.
pub fn selection_indices(
    f: &ChoiceFunction,
    x: usize,
    images: bool,
) -> Result<Vec<SelectionIndex>> {
    let family = if images { image_family(f, x)? } else { missing_family(f, x)? };
    let count = choice_count(&family);
    if count > DEFAULT_NODE_BUDGET {
        return Err(Error::resource(format!(
            "{count} selection indices requested, budget is {DEFAULT_NODE_BUDGET}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    for_each_choice(&family, &mut |picks| {
        out.push(SelectionIndex { element: x, family: family.clone(), picks: picks.to_vec() });
        Ok(())
    })?;
    Ok(out)
}

fn violation_error(f: &ChoiceFunction, cond: MuCondition, report: &ConditionReport) -> Error {
    let detail = match &report.counterexample {
        Some(i) if i.sets.len() == 1 && i.elems.is_empty() => f.set_name(&i.sets[0].1),
        Some(i) => format!("({})", i.render(f)),
        None => "an unnamed instance".to_string(),
    };
    Error::contract(format!("{} fails on {}", cond.display_name(), detail))
}

fn require_conditions(f: &ChoiceFunction, conds: &[MuCondition]) -> Result<()> {
    for &c in conds {
        let report = check_mu_condition(f, c)?;
        if !report.holds {
            return Err(violation_error(f, c, &report));
        }
    }
    Ok(())
}

/// Union closure is a separate requirement from the conditions, so its
/// error names the offending pair instead of a condition.
fn require_union_closed(f: &ChoiceFunction) -> Result<()> {
    for x in f.domain() {
        for y in f.domain() {
            let u = x.union(y);
            if !f.contains(&u) {
                return Err(Error::contract(format!(
                    "domain not closed under union: {} of {} and {} is missing",
                    f.set_name(&u),
                    f.set_name(x),
                    f.set_name(y)
                )));
            }
        }
    }
    Ok(())
}

fn budget_error(needed: usize, budget: usize) -> Error {
    Error::resource(format!("construction needs {needed} nodes, budget is {budget}"))
}

/// Recomputes the choice function from the structure over the whole
/// domain and reports the first mismatch.
pub fn verify_round_trip(f: &ChoiceFunction, s: &PrefStructure) -> Result<()> {
    for x in f.domain() {
        let got = s.mu(x)?;
        let want = f.value(x)?;
        if got != *want {
            return Err(Error::contract(format!(
                "round-trip mismatch on {}: structure gives {}, function gives {}",
                f.set_name(x),
                f.set_name(&got),
                f.set_name(want)
            )));
        }
    }
    Ok(())
}

pub fn represent_general(f: &ChoiceFunction) -> Result<PrefStructure> {
    represent_general_with_budget(f, DEFAULT_NODE_BUDGET)
}

/// One copy of x per choice through the sets that drop x, each copy
/// attacked by every copy of every element its choice picked. An element
/// dropped nowhere keeps a single unattacked copy.
pub fn represent_general_with_budget(
    f: &ChoiceFunction,
    budget: usize,
) -> Result<PrefStructure> {
    require_conditions(f, &[MuCondition::Sub, MuCondition::Pr])?;
    let m = f.num_elements();
    let mut families = Vec::with_capacity(m);
    let mut total = 0usize;
    for x in 0..m {
        let fam = missing_family(f, x)?;
        total = total.saturating_add(choice_count(&fam));
        families.push(fam);
    }
    if total > budget {
        return Err(budget_error(total, budget));
    }
    let mut nodes = Vec::with_capacity(total);
    let mut ranges = Vec::with_capacity(total);
    for (x, fam) in families.iter().enumerate() {
        let mut copy = 0usize;
        for_each_choice(fam, &mut |picks| {
            nodes.push((x, copy));
            ranges.push(Bits::from_indices(m, picks));
            copy += 1;
            Ok(())
        })?;
    }
    let mut s = PrefStructure::new(f.elements().to_vec(), nodes)?;
    for (target, range) in ranges.iter().enumerate() {
        for attacker in range.iter() {
            s.add_element_attack(attacker, target);
        }
    }
    verify_round_trip(f, &s)?;
    Ok(s)
}

pub fn represent_transitive(f: &ChoiceFunction) -> Result<PrefStructure> {
    represent_transitive_with_budget(f, DEFAULT_NODE_BUDGET)
}

/// Transitive variant of the general synthesizer. Copies are indexed by
/// shallow trees: one fan per choice, whose children are realized as
/// unattacked leaves (element dropped nowhere) or self-loop constants.
/// Only leaves and constants ever attack, and a constant's sole attacker
/// is itself, so the relation is transitive as built.
pub fn represent_transitive_with_budget(
    f: &ChoiceFunction,
    budget: usize,
) -> Result<PrefStructure> {
    require_conditions(f, &[MuCondition::Sub, MuCondition::Pr])?;
    let m = f.num_elements();
    let mut families = Vec::with_capacity(m);
    let mut total = 0usize;
    for x in 0..m {
        let fam = missing_family(f, x)?;
        // the base copy, plus one fan per choice when there are any
        total = total.saturating_add(1);
        if !fam.is_empty() {
            total = total.saturating_add(choice_count(&fam));
        }
        families.push(fam);
    }
    if total > budget {
        return Err(budget_error(total, budget));
    }

    let mut nodes: Vec<(usize, usize)> = Vec::with_capacity(total);
    let mut trees: Vec<ChoiceTree> = Vec::with_capacity(total);
    let mut base_node = vec![0usize; m];
    for (x, fam) in families.iter().enumerate() {
        base_node[x] = nodes.len();
        nodes.push((x, 0));
        trees.push(if fam.is_empty() {
            ChoiceTree::leaf(x)
        } else {
            ChoiceTree::constant(x)
        });
    }
    let mut fan_ranges: Vec<(usize, Bits)> = Vec::new();
    for (x, fam) in families.iter().enumerate() {
        if fam.is_empty() {
            continue;
        }
        let mut copy = 1usize;
        for_each_choice(fam, &mut |picks| {
            let children = picks.iter().map(|&y| trees[base_node[y]].clone()).collect();
            let tree = ChoiceTree::fan(x, children);
            debug_assert_eq!(tree.children.len(), fam.len());
            fan_ranges.push((nodes.len(), Bits::from_indices(m, picks)));
            nodes.push((x, copy));
            trees.push(tree);
            copy += 1;
            Ok(())
        })?;
    }

    let mut s = PrefStructure::new(f.elements().to_vec(), nodes)?;
    for (x, fam) in families.iter().enumerate() {
        if !fam.is_empty() {
            s.add_self_loop(base_node[x]);
        }
    }
    for (target, range) in &fan_ranges {
        for y in range.iter() {
            s.add_arrow(base_node[y], *target);
        }
    }
    if !s.is_transitive() {
        return Err(Error::contract("transitive synthesizer produced a nontransitive relation"));
    }
    for t in &trees {
        if t.height() > 2 {
            return Err(Error::contract("index tree grew past its two-level shape"));
        }
    }
    verify_round_trip(f, &s)?;
    Ok(s)
}

pub fn represent_smooth(f: &ChoiceFunction) -> Result<PrefStructure> {
    represent_smooth_with_budget(f, DEFAULT_NODE_BUDGET)
}

/// Smooth synthesizer. A copy of x is the union of a selection sequence
/// built for one set U choosing x: stage zero picks, from the value of
/// every set that drops x, the least element outside the hull of U;
/// each later stage repairs every set X keeping x whose previous stage
/// range meets X, picking the least element of the value of U with X
/// joined, again outside the hull. Stage ranges over a finite universe
/// repeat eventually; the union over the repeating run is the copy's
/// attacker set. Keeping every stage outside the hull makes the copy
/// minimal in U; the repair stages restore smoothness everywhere else.
pub fn represent_smooth_with_budget(
    f: &ChoiceFunction,
    budget: usize,
) -> Result<PrefStructure> {
    require_conditions(f, &[MuCondition::Sub, MuCondition::Pr, MuCondition::Cum])?;
    require_union_closed(f)?;
    let m = f.num_elements();

    let mut hulls: BTreeMap<Bits, Bits> = BTreeMap::new();
    let mut seen: BTreeSet<(usize, Bits)> = BTreeSet::new();
    let mut node_sets: Vec<(usize, Bits)> = Vec::new();
    for u in f.domain() {
        let hull = hull_of(f, u, &mut hulls)?;
        for x in f.value(u)?.iter() {
            let s = admissible_union(f, x, u, &hull)?;
            if seen.insert((x, s.clone())) {
                if node_sets.len() >= budget {
                    return Err(budget_error(node_sets.len() + 1, budget));
                }
                node_sets.push((x, s));
            }
        }
    }

    let mut copies = vec![0usize; m];
    let mut nodes = Vec::with_capacity(node_sets.len());
    for &(x, _) in &node_sets {
        nodes.push((x, copies[x]));
        copies[x] += 1;
    }
    let mut s = PrefStructure::new(f.elements().to_vec(), nodes)?;
    for (target, (_, set)) in node_sets.iter().enumerate() {
        for attacker in set.iter() {
            s.add_element_attack(attacker, target);
        }
    }
    verify_round_trip(f, &s)?;
    let report = s.is_smooth(f.domain());
    if !report.smooth {
        return Err(Error::contract("smooth synthesizer produced a nonsmooth structure"));
    }
    Ok(s)
}

fn hull_of(f: &ChoiceFunction, u: &Bits, cache: &mut BTreeMap<Bits, Bits>) -> Result<Bits> {
    if let Some(h) = cache.get(u) {
        return Ok(h.clone());
    }
    let h = compute_hu(f, None, u)?.hu_single;
    cache.insert(u.clone(), h.clone());
    Ok(h)
}

fn stalled() -> Error {
    Error::contract("selection sequence stalled: a required value lies inside the hull")
}

/// Union of the deterministic selection sequence for x chosen in U. All
/// picks avoid the hull of U, so the union avoids U itself.
fn admissible_union(f: &ChoiceFunction, x: usize, u: &Bits, hull: &Bits) -> Result<Bits> {
    let m = f.num_elements();
    let mut r = Bits::empty(m);
    for y in f.domain() {
        if y.contains(x) && !f.value(y)?.contains(x) {
            let pool = f.value(y)?.difference(hull);
            r.insert(pool.first().ok_or_else(stalled)?);
        }
    }
    let mut acc = r.clone();
    let mut states = BTreeSet::new();
    states.insert(r.clone());
    loop {
        let mut next = Bits::empty(m);
        for xs in f.domain() {
            if f.value(xs)?.contains(x) && xs.intersects(&r) {
                let joined = u.union(xs);
                let pool = f.value(&joined)?.difference(hull);
                next.insert(pool.first().ok_or_else(stalled)?);
            }
        }
        acc = acc.union(&next);
        if !states.insert(next.clone()) {
            return Ok(acc);
        }
        r = next;
    }
}

/// Canonical minimizing tree for x chosen in `base`: the root carries
/// (base, x); for every domain set Y keeping x and reaching outside the
/// hull of `base`, the root gets one child built from the join of base
/// and Y and the least element of the join's value outside the hull.
/// Bases grow strictly along every branch, so the tree is finite with
/// height at most the element count plus one.
pub fn minimizing_tree(f: &ChoiceFunction, base: &Bits, x: usize) -> Result<ChoiceTree> {
    if !f.value(base)?.contains(x) {
        return Err(Error::input(format!(
            "{} is not chosen in {}",
            f.elements()[x],
            f.set_name(base)
        )));
    }
    let mut budget = DEFAULT_NODE_BUDGET;
    let mut hulls = BTreeMap::new();
    minimizing_tree_inner(f, base, x, &mut hulls, &mut budget)
}

fn minimizing_tree_inner(
    f: &ChoiceFunction,
    base: &Bits,
    x: usize,
    hulls: &mut BTreeMap<Bits, Bits>,
    budget: &mut usize,
) -> Result<ChoiceTree> {
    if *budget == 0 {
        return Err(Error::resource(format!(
            "minimizing tree exceeds {DEFAULT_NODE_BUDGET} nodes"
        )));
    }
    *budget -= 1;
    let hull = hull_of(f, base, hulls)?;
    let mut children = Vec::new();
    for y in f.domain() {
        if y.contains(x) && !y.is_subset(&hull) {
            let joined = base.union(y);
            let pool = f.value(&joined)?.difference(&hull);
            let pick = pool.first().ok_or_else(stalled)?;
            let child = minimizing_tree_inner(f, &joined, pick, hulls, budget)?;
            if !children.contains(&child) {
                children.push(child);
            }
        }
    }
    Ok(ChoiceTree { base: Some(base.clone()), element: x, constant: false, children })
}

/// Shared-subtree graph of canonical minimizing trees plus one spare
/// tree per chosen element, with the descendant relation as arrows.
struct TreeGraph {
    keys: BTreeMap<(Bits, usize), usize>,
    elem: Vec<usize>,
    base: Vec<Bits>,
    kids: Vec<Vec<usize>>,
}

impl TreeGraph {
    fn len(&self) -> usize {
        self.elem.len()
    }
}

fn build_min_tree(
    f: &ChoiceFunction,
    u: &Bits,
    x: usize,
    g: &mut TreeGraph,
    hulls: &mut BTreeMap<Bits, Bits>,
    budget: usize,
) -> Result<usize> {
    if let Some(&i) = g.keys.get(&(u.clone(), x)) {
        return Ok(i);
    }
    let hull = hull_of(f, u, hulls)?;
    let mut kids = Vec::new();
    for y in f.domain() {
        if y.contains(x) && !y.is_subset(&hull) {
            let joined = u.union(y);
            let pool = f.value(&joined)?.difference(&hull);
            let pick = pool.first().ok_or_else(stalled)?;
            // the joined base strictly grows: y reaches outside the
            // hull, which contains u
            let child = build_min_tree(f, &joined, pick, g, hulls, budget)?;
            if !kids.contains(&child) {
                kids.push(child);
            }
        }
    }
    kids.sort_unstable();
    if g.len() >= budget {
        return Err(budget_error(g.len() + 1, budget));
    }
    let i = g.len();
    g.keys.insert((u.clone(), x), i);
    g.elem.push(x);
    g.base.push(u.clone());
    g.kids.push(kids);
    Ok(i)
}

fn descendants(kids: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
    // child graphs are acyclic: bases strictly grow toward children's
    // sources, and spare trees only point into the minimizing part
    let n = kids.len();
    let mut memo: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    fn go(i: usize, kids: &[Vec<usize>], memo: &mut Vec<Option<BTreeSet<usize>>>) -> BTreeSet<usize> {
        if let Some(s) = &memo[i] {
            return s.clone();
        }
        let mut out = BTreeSet::new();
        for &k in &kids[i] {
            out.insert(k);
            out.extend(go(k, kids, memo));
        }
        memo[i] = Some(out.clone());
        out
    }
    (0..n).map(|i| go(i, kids, &mut memo)).collect()
}

pub fn represent_smooth_transitive(f: &ChoiceFunction) -> Result<PrefStructure> {
    represent_smooth_transitive_with_budget(f, DEFAULT_NODE_BUDGET)
}

/// Smooth and transitive synthesizer. Copies are the canonical
/// minimizing trees, shared across bases, plus one spare tree per chosen
/// element whose level-one children cover every domain set containing
/// it; a tree is attacked by all its subtrees, so the relation is
/// transitive by construction. The minimizing-tree invariants are
/// re-checked on the finished graph: every descendant avoids the hull of
/// its ancestor's base, spare trees are never minimal, and minimizing
/// roots are minimal in their own base.
pub fn represent_smooth_transitive_with_budget(
    f: &ChoiceFunction,
    budget: usize,
) -> Result<PrefStructure> {
    require_conditions(f, &[MuCondition::Sub, MuCondition::Pr, MuCondition::Cum])?;
    require_union_closed(f)?;
    let m = f.num_elements();
    let mut hulls = BTreeMap::new();
    let mut g = TreeGraph {
        keys: BTreeMap::new(),
        elem: Vec::new(),
        base: Vec::new(),
        kids: Vec::new(),
    };
    for u in f.domain() {
        for x in f.value(u)?.iter() {
            build_min_tree(f, u, x, &mut g, &mut hulls, budget)?;
        }
    }
    let min_count = g.len();

    let mut chosen = Bits::empty(m);
    for u in f.domain() {
        chosen = chosen.union(f.value(u)?);
    }
    let mut spare_kids: Vec<(usize, Vec<usize>)> = Vec::new();
    for x in chosen.iter() {
        let mut kids = Vec::new();
        for u in f.domain() {
            if !u.contains(x) {
                continue;
            }
            let pick = f.value(u)?.first().ok_or_else(|| {
                Error::contract("a chosen element sits in a set with an empty value")
            })?;
            if !u.contains(pick) {
                return Err(Error::contract("a value escapes its set despite inclusion"));
            }
            let child = *g
                .keys
                .get(&(u.clone(), pick))
                .expect("minimizing trees cover every chosen pair");
            if !kids.contains(&child) {
                kids.push(child);
            }
        }
        kids.sort_unstable();
        spare_kids.push((x, kids));
    }

    let total = min_count + spare_kids.len();
    if total > budget {
        return Err(budget_error(total, budget));
    }

    let mut all_kids = g.kids.clone();
    for (_, kids) in &spare_kids {
        all_kids.push(kids.clone());
    }
    let reach = descendants(&all_kids);

    // every direct or indirect subtree avoids the hull of its
    // ancestor's base, which makes each minimizing root minimal there
    for (base, reached) in g.base.iter().zip(&reach) {
        let hull = hull_of(f, base, &mut hulls)?;
        for &d in reached {
            if hull.contains(g.elem[d]) {
                return Err(Error::contract(
                    "minimizing tree reaches back into the hull of its base",
                ));
            }
        }
    }

    let mut copies = vec![0usize; m];
    let mut nodes: Vec<(usize, usize)> = Vec::with_capacity(total);
    for i in 0..min_count {
        let x = g.elem[i];
        nodes.push((x, copies[x]));
        copies[x] += 1;
    }
    for &(x, _) in &spare_kids {
        nodes.push((x, copies[x]));
        copies[x] += 1;
    }
    let mut s = PrefStructure::new(f.elements().to_vec(), nodes)?;
    for (i, reached) in reach.iter().enumerate() {
        for &d in reached {
            s.add_arrow(d, i);
        }
    }

    if !s.is_transitive() {
        return Err(Error::contract("descendant arrows failed to be transitive"));
    }
    if !s.is_cycle_free() {
        return Err(Error::contract("tree subsumption produced a cycle"));
    }
    // spare trees are never minimal: each one has, for every domain set
    // containing its element, a child inside that set
    for (p, (x, kids)) in spare_kids.iter().enumerate() {
        for u in f.domain() {
            if u.contains(*x)
                && !kids.iter().any(|&k| u.contains(g.elem[k]))
            {
                return Err(Error::contract("spare tree left minimal in a domain set"));
            }
        }
        let _ = p;
    }
    verify_round_trip(f, &s)?;
    let report = s.is_smooth(f.domain());
    if !report.smooth {
        return Err(Error::contract("tree synthesizer produced a nonsmooth structure"));
    }
    Ok(s)
}

/// A total preorder given as one rank per element; lower ranks sit
/// strictly below higher ones and equal ranks are mutually comparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalPreorder {
    pub rank: Vec<usize>,
}

impl TotalPreorder {
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.rank[a] <= self.rank[b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// Completes an arbitrary relation on 0..n to a total preorder that only
/// ties elements already mutually reachable through the input. The
/// classes of mutual reachability are emitted in a stable order: among
/// the classes whose predecessors are all placed, the one with the
/// smallest member goes first.
pub fn extend_to_total_preorder(n: usize, pairs: &[(usize, usize)]) -> Result<TotalPreorder> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::input(format!(
                "relation pair ({a},{b}) falls outside 0..{n}"
            )));
        }
        reach[a][b] = true;
    }
    for k in 0..n {
        let row_k = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (j, &v) in row_k.iter().enumerate() {
                    if v {
                        row[j] = true;
                    }
                }
            }
        }
    }

    let mut class = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if class[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        class[i] = c;
        reps.push(i);
        for j in i + 1..n {
            if reach[i][j] && reach[j][i] {
                class[j] = c;
            }
        }
    }

    let k = reps.len();
    let mut before = vec![vec![false; k]; k];
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] && class[i] != class[j] {
                before[class[i]][class[j]] = true;
            }
        }
    }
    let mut placed = vec![false; k];
    let mut rank = vec![0usize; n];
    for next_rank in 0..k {
        let mut pick = usize::MAX;
        for c in 0..k {
            if placed[c] {
                continue;
            }
            let ready = (0..k).all(|d| placed[d] || !before[d][c]);
            if ready && (pick == usize::MAX || reps[c] < reps[pick]) {
                pick = c;
            }
        }
        if pick == usize::MAX {
            return Err(Error::contract("class order has a cycle after quotienting"));
        }
        placed[pick] = true;
        for i in 0..n {
            if class[i] == pick {
                rank[i] = next_rank;
            }
        }
    }

    let order = TotalPreorder { rank };
    for &(a, b) in pairs {
        if !order.le(a, b) {
            return Err(Error::contract("completion dropped an input pair"));
        }
    }
    for (a, row) in reach.iter().enumerate() {
        for (b, &fwd) in row.iter().enumerate() {
            if order.le(a, b) && order.le(b, a) && !(fwd && reach[b][a]) {
                return Err(Error::contract(
                    "completion tied elements that are not mutually reachable",
                ));
            }
        }
    }
    Ok(order)
}

/// Single-copy ranked synthesizer: a sits weakly below b when some
/// domain set shows a chosen while b is present; the relation is
/// completed to a total preorder and strict comparisons become arrows.
pub fn represent_ranked(f: &ChoiceFunction) -> Result<PrefStructure> {
    require_conditions(f, &[MuCondition::Sub, MuCondition::Empty, MuCondition::Eq])?;
    require_union_closed(f)?;
    let m = f.num_elements();
    let mut pairs = Vec::new();
    for a_set in f.domain() {
        let v = f.value(a_set)?;
        for a in v.iter() {
            for b in a_set.iter() {
                pairs.push((a, b));
            }
        }
    }
    let order = extend_to_total_preorder(m, &pairs)?;
    let mut s = PrefStructure::new(f.elements().to_vec(), (0..m).map(|e| (e, 0)).collect())?;
    for a in 0..m {
        for b in 0..m {
            if order.lt(a, b) {
                s.add_arrow(a, b);
            }
        }
    }
    let ranked = s.is_ranked();
    if !ranked.ranked {
        return Err(Error::contract("rank synthesizer produced an unranked relation"));
    }
    if !s.is_cycle_free() {
        return Err(Error::contract("rank synthesizer produced a cycle"));
    }
    let smooth = s.is_smooth(f.domain());
    if !smooth.smooth {
        return Err(Error::contract("rank synthesizer produced a nonsmooth structure"));
    }
    verify_round_trip(f, &s)?;
    Ok(s)
}

/// Rebuilds a structure so its relation is transitive without changing
/// any minimization: every arrow is replaced by a fresh self-looped copy
/// of the attacker's element aimed at the old target, standing in for an
/// unbounded descending chain of copies. The output is verified to be
/// transitive, and minimization-equal to the input on every element
/// subset up to twelve elements.
pub fn equiv_transitive(s: &PrefStructure) -> Result<PrefStructure> {
    let n = s.num_nodes();
    let m = s.elements().len();
    let mut arrows = Vec::new();
    for a in 0..n {
        for t in 0..n {
            if s.has_arrow(a, t) {
                arrows.push((a, t));
            }
        }
    }
    let orig: Vec<(usize, usize)> = s.nodes().iter().map(|nd| (nd.element, nd.copy)).collect();
    let mut next_copy = vec![0usize; m];
    for &(e, c) in &orig {
        next_copy[e] = next_copy[e].max(c + 1);
    }
    let mut nodes = orig.clone();
    for &(a, _) in &arrows {
        let e = orig[a].0;
        nodes.push((e, next_copy[e]));
        next_copy[e] += 1;
    }
    let mut out = PrefStructure::new(s.elements().to_vec(), nodes)?;
    for (i, &(_, t)) in arrows.iter().enumerate() {
        let w = n + i;
        out.add_self_loop(w);
        out.add_arrow(w, t);
    }
    if !out.is_transitive() {
        return Err(Error::contract("chain replacement failed to be transitive"));
    }
    if m <= 12 {
        for mask in 0..(1u64 << m) {
            let x = Bits::from_mask(m, mask);
            let a = s.mu(&x)?;
            let b = out.mu(&x)?;
            if a != b {
                return Err(Error::contract(format!(
                    "chain replacement changed minimization on mask {mask:#x}"
                )));
            }
        }
    }
    Ok(out)
}
