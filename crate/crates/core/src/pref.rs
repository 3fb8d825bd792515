//! Preferential structures with copies.
//!
//! Elements may occur as several nodes (copies). The strict relation reads
//! "smaller attacks larger": an arrow u -> t makes t non-minimal whenever
//! u's element lies in the queried set. A self-loop encodes an infinitely
//! descending chain of copies; such a node can never be minimal.
//!
//! Adjacency is stored two ways per node: an explicit list of attacking
//! nodes, plus an element mask meaning "every copy of these elements
//! attacks this node". The mask form keeps synthesized structures small
//! when attackers are uniform across copies.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::logic::{models_of, models_of_phi, Formula, Language, Theory};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub element: usize,
    pub copy: usize,
}

#[derive(Clone, Debug)]
pub struct PrefStructure {
    elements: Vec<String>,
    nodes: Vec<Node>,
    /// attackers_nodes[t] = indices of nodes u with u ≺ t.
    attackers_nodes: Vec<Vec<usize>>,
    /// attackers_elems[t] = elements every copy of which attacks t.
    attackers_elems: Vec<Bits>,
}

impl PrefStructure {
    pub fn new(elements: Vec<String>, nodes: Vec<(usize, usize)>) -> Result<PrefStructure> {
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::input(format!("duplicate element {e:?}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(e, c) in &nodes {
            if e >= elements.len() {
                return Err(Error::input(format!("node references element index {e}")));
            }
            if !seen.insert((e, c)) {
                return Err(Error::input(format!("duplicate node {e}#{c}")));
            }
        }
        let n = nodes.len();
        let m = elements.len();
        Ok(PrefStructure {
            elements,
            nodes: nodes.into_iter().map(|(element, copy)| Node { element, copy }).collect(),
            attackers_nodes: vec![Vec::new(); n],
            attackers_elems: vec![Bits::empty(m); n],
        })
    }

    /// One node per element, no arrows.
    pub fn discrete(elements: Vec<String>) -> PrefStructure {
        let nodes: Vec<(usize, usize)> = (0..elements.len()).map(|e| (e, 0)).collect();
        PrefStructure::new(elements, nodes).expect("discrete structure is well formed")
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn node_index(&self, element: usize, copy: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.element == element && n.copy == copy)
    }

    /// Records attacker ≺ target.
    pub fn add_arrow(&mut self, attacker: usize, target: usize) {
        assert!(attacker < self.nodes.len() && target < self.nodes.len());
        if !self.attackers_nodes[target].contains(&attacker) {
            self.attackers_nodes[target].push(attacker);
        }
    }

    /// Records that every copy of `element` attacks `target`.
    pub fn add_element_attack(&mut self, element: usize, target: usize) {
        assert!(element < self.elements.len() && target < self.nodes.len());
        self.attackers_elems[target].insert(element);
    }

    pub fn add_self_loop(&mut self, node: usize) {
        self.add_arrow(node, node);
    }

    pub fn has_arrow(&self, attacker: usize, target: usize) -> bool {
        self.attackers_nodes[target].contains(&attacker)
            || self.attackers_elems[target].contains(self.nodes[attacker].element)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn full_element_set(&self) -> Bits {
        Bits::full(self.elements.len())
    }

    /// Minimal elements of x: those with a copy no copy of an x-element
    /// attacks.
    pub fn mu(&self, x: &Bits) -> Result<Bits> {
        if x.len() != self.elements.len() {
            return Err(Error::input("queried set is over a different element universe"));
        }
        let mut out = Bits::empty(self.elements.len());
        for (t, node) in self.nodes.iter().enumerate() {
            if !x.contains(node.element) || out.contains(node.element) {
                continue;
            }
            if self.node_minimal_in(t, x) {
                out.insert(node.element);
            }
        }
        Ok(out)
    }

    /// Node t has no attacker whose element lies in x.
    fn node_minimal_in(&self, t: usize, x: &Bits) -> bool {
        if self.attackers_elems[t].intersects(x) {
            return false;
        }
        self.attackers_nodes[t].iter().all(|&u| !x.contains(self.nodes[u].element))
    }

    /// Smoothness over a domain: every copy of an element of X is minimal
    /// in X or attacked by a copy that is minimal in X.
    pub fn is_smooth(&self, domain: &[Bits]) -> SmoothReport {
        for x in domain {
            // Node-level minimality within x.
            let minimal: Vec<bool> =
                (0..self.nodes.len()).map(|t| self.node_minimal_in(t, x)).collect();
            for (t, node) in self.nodes.iter().enumerate() {
                if !x.contains(node.element) || minimal[t] {
                    continue;
                }
                let has_minimal_attacker = (0..self.nodes.len()).any(|u| {
                    x.contains(self.nodes[u].element) && minimal[u] && self.has_arrow(u, t)
                });
                if !has_minimal_attacker {
                    return SmoothReport {
                        smooth: false,
                        witness: Some((x.clone(), node.clone())),
                    };
                }
            }
        }
        SmoothReport { smooth: true, witness: None }
    }

    pub fn is_smooth_full(&self) -> SmoothReport {
        self.is_smooth(&self.full_element_set().subsets())
    }

    /// Rankedness on nodes: incomparable nodes have the same attackers and
    /// attack the same nodes.
    pub fn is_ranked(&self) -> RankedReport {
        let n = self.nodes.len();
        for x in 0..n {
            for y in 0..n {
                if x == y || self.has_arrow(x, y) || self.has_arrow(y, x) {
                    continue;
                }
                for z in 0..n {
                    if self.has_arrow(z, x) != self.has_arrow(z, y) {
                        return RankedReport {
                            ranked: false,
                            witness: Some((z, x, y)),
                        };
                    }
                    if self.has_arrow(x, z) != self.has_arrow(y, z) {
                        return RankedReport {
                            ranked: false,
                            witness: Some((x, y, z)),
                        };
                    }
                }
            }
        }
        RankedReport { ranked: true, witness: None }
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.nodes.len();
        for a in 0..n {
            for b in 0..n {
                if !self.has_arrow(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.has_arrow(b, c) && !self.has_arrow(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.nodes.len()).all(|t| !self.has_arrow(t, t))
    }

    /// No node reaches itself through the transitive closure.
    pub fn is_cycle_free(&self) -> bool {
        let n = self.nodes.len();
        // reach[t] = set of nodes reachable from t going downward (to attackers).
        let mut reach: Vec<Bits> = (0..n)
            .map(|t| {
                let mut b = Bits::empty(n);
                for u in 0..n {
                    if self.has_arrow(u, t) {
                        b.insert(u);
                    }
                }
                b
            })
            .collect();
        loop {
            let mut changed = false;
            for t in 0..n {
                let mut acc = reach[t].clone();
                for u in reach[t].iter().collect::<Vec<_>>() {
                    acc = acc.union(&reach[u]);
                }
                if acc != reach[t] {
                    reach[t] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).all(|t| !reach[t].contains(t))
    }

    /// T |~ phi under this structure: structure elements must name
    /// valuation indices of the language.
    pub fn consequence(&self, lang: &Language, t: &Theory, phi: &Formula) -> Result<bool> {
        let mt = models_of(lang, t)?;
        let mphi = models_of_phi(lang, phi)?;
        // Element names are decimal valuation indices.
        let mut x = Bits::empty(self.elements.len());
        for (e, name) in self.elements.iter().enumerate() {
            let idx: usize = name
                .parse()
                .map_err(|_| Error::input(format!("element {name:?} is not a valuation index")))?;
            if idx >= lang.num_valuations() {
                return Err(Error::input(format!(
                    "element {name:?} exceeds the valuation count {}",
                    lang.num_valuations()
                )));
            }
            if mt.contains(idx) {
                x.insert(e);
            }
        }
        let m = self.mu(&x)?;
        for e in m.iter() {
            let idx: usize = self.elements[e].parse().unwrap();
            if !mphi.contains(idx) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rewrites a ranked cycle-free structure so each element keeps exactly
    /// one copy, or one self-loop node when all its copies are attacked by
    /// its own element. The result has the same mu on every element subset,
    /// which is verified exhaustively.
    pub fn to_one_infinity(&self) -> Result<PrefStructure> {
        if !self.is_ranked().ranked {
            return Err(Error::contract("to_one_infinity requires a ranked structure"));
        }
        if !self.is_cycle_free() {
            return Err(Error::contract("to_one_infinity requires a cycle-free structure"));
        }
        let m = self.elements.len();
        // For each node, the set of elements attacking it (in any copy).
        let node_attack_elems: Vec<Bits> = (0..self.nodes.len())
            .map(|t| {
                let mut b = self.attackers_elems[t].clone();
                for &u in &self.attackers_nodes[t] {
                    b.insert(self.nodes[u].element);
                }
                b
            })
            .collect();
        // Elements with no copy never enter any mu; realize them as
        // self-loop nodes so they stay absent.
        let mut chosen: Vec<Option<Bits>> = vec![None; m];
        for (t, node) in self.nodes.iter().enumerate() {
            let d = &node_attack_elems[t];
            let better = match &chosen[node.element] {
                None => true,
                Some(old) => d.is_subset(old) && d != old,
            };
            if better {
                chosen[node.element] = Some(d.clone());
            }
        }
        let names = self.elements.clone();
        let nodes: Vec<(usize, usize)> = (0..m).map(|e| (e, 0)).collect();
        let mut out = PrefStructure::new(names, nodes)?;
        for (e, pick) in chosen.iter().enumerate() {
            match pick {
                None => out.add_self_loop(e),
                Some(d) => {
                    if d.contains(e) {
                        out.add_self_loop(e);
                    }
                    for a in d.iter() {
                        if a != e {
                            out.add_element_attack(a, e);
                        }
                    }
                    if d.contains(e) {
                        // Self-attack already forces non-minimality whenever
                        // e is queried; keep the rest of the mask too.
                        out.add_element_attack(e, e);
                    }
                }
            }
        }
        for x in self.full_element_set().subsets() {
            if self.mu(&x)? != out.mu(&x)? {
                return Err(Error::contract(format!(
                    "one-copy rewrite changed mu on {x:?}"
                )));
            }
        }
        Ok(out)
    }

    /// Structure text format: element list, node list, arrow list.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "elements: {}", self.elements.join(", "));
        let names: Vec<String> = self
            .nodes
            .iter()
            .map(|n| format!("{}#{}", self.elements[n.element], n.copy))
            .collect();
        let _ = writeln!(s, "nodes: {}", names.join(", "));
        for t in 0..self.nodes.len() {
            for u in 0..self.nodes.len() {
                if self.has_arrow(u, t) {
                    let _ = writeln!(s, "{} < {}", names[u], names[t]);
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PrefStructure> {
        let mut elements: Option<Vec<String>> = None;
        let mut node_specs: Option<Vec<(usize, usize)>> = None;
        let mut arrows: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("elements:") {
                elements = Some(
                    rest.split(',')
                        .map(|e| e.trim().to_string())
                        .filter(|e| !e.is_empty())
                        .collect(),
                );
            } else if let Some(rest) = line.strip_prefix("nodes:") {
                let els = elements
                    .as_ref()
                    .ok_or_else(|| Error::input("nodes listed before elements"))?;
                let mut specs = Vec::new();
                for tok in rest.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        continue;
                    }
                    specs.push(parse_node_name(tok, els)?);
                }
                node_specs = Some(specs);
            } else if let Some((l, r)) = line.split_once('<') {
                arrows.push((l.trim().to_string(), r.trim().to_string()));
            } else {
                return Err(Error::input(format!("cannot parse line {line:?}")));
            }
        }
        let elements = elements.ok_or_else(|| Error::input("missing 'elements:' line"))?;
        let node_specs = match node_specs {
            Some(s) => s,
            // Without an explicit node list, one copy per element.
            None => (0..elements.len()).map(|e| (e, 0)).collect(),
        };
        let mut s = PrefStructure::new(elements, node_specs)?;
        for (l, r) in arrows {
            let (le, lc) = parse_node_name(&l, &s.elements)?;
            let (re, rc) = parse_node_name(&r, &s.elements)?;
            let li = s
                .node_index(le, lc)
                .ok_or_else(|| Error::input(format!("arrow references unknown node {l:?}")))?;
            let ri = s
                .node_index(re, rc)
                .ok_or_else(|| Error::input(format!("arrow references unknown node {r:?}")))?;
            s.add_arrow(li, ri);
        }
        Ok(s)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph pref {\n");
        let names: Vec<String> = self
            .nodes
            .iter()
            .map(|n| format!("{}#{}", self.elements[n.element], n.copy))
            .collect();
        for name in &names {
            let _ = writeln!(s, "  \"{name}\";");
        }
        for t in 0..self.nodes.len() {
            for u in 0..self.nodes.len() {
                if self.has_arrow(u, t) {
                    let _ = writeln!(s, "  \"{}\" -> \"{}\";", names[u], names[t]);
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// Element-set helper for tests and callers working with names.
    pub fn set_of(&self, names: &[&str]) -> Result<Bits> {
        let mut b = Bits::empty(self.elements.len());
        for n in names {
            let i = self
                .element_index(n)
                .ok_or_else(|| Error::input(format!("unknown element {n:?}")))?;
            b.insert(i);
        }
        Ok(b)
    }
}

fn parse_node_name(tok: &str, elements: &[String]) -> Result<(usize, usize)> {
    let (name, copy) = match tok.split_once('#') {
        Some((n, c)) => {
            let copy: usize = c
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad copy index in {tok:?}")))?;
            (n.trim(), copy)
        }
        None => (tok, 0),
    };
    let e = elements
        .iter()
        .position(|x| x == name)
        .ok_or_else(|| Error::input(format!("unknown element {name:?} in node {tok:?}")))?;
    Ok((e, copy))
}

#[derive(Debug, Clone)]
pub struct SmoothReport {
    pub smooth: bool,
    pub witness: Option<(Bits, Node)>,
}

#[derive(Debug, Clone)]
pub struct RankedReport {
    pub ranked: bool,
    /// (a, b, c): b and c incomparable yet related differently to a.
    pub witness: Option<(usize, usize, usize)>,
}

/// All structures over the given element names with up to `max_copies`
/// copies per element and every attack pattern drawn from "all copies of
/// element e attack node t". The per-node attack masks determine mu
/// exactly, so this family covers every mu any copy-respecting structure
/// over these elements can produce.
pub fn enumerate_mask_structures(
    element_names: &[String],
    max_copies: usize,
    mut visit: impl FnMut(&PrefStructure),
) {
    let m = element_names.len();
    let num_masks = 1usize << m;
    // Per element: a multiset of attack masks, one per copy. Copy order is
    // irrelevant to mu, so only nondecreasing mask sequences are generated,
    // and repeated masks beyond the first add nothing, so masks within a
    // sequence are strictly increasing.
    let mut options: Vec<Vec<usize>> = Vec::new();
    for count in 1..=max_copies {
        strictly_increasing_sequences(num_masks, count, &mut |seq| options.push(seq.to_vec()));
    }
    let mut choice = vec![0usize; m];
    loop {
        let mut nodes = Vec::new();
        for (e, &c) in choice.iter().enumerate() {
            for copy in 0..options[c].len() {
                nodes.push((e, copy));
            }
        }
        let mut s = PrefStructure::new(element_names.to_vec(), nodes).unwrap();
        let mut t = 0;
        for &c in &choice {
            for &mask in &options[c] {
                for a in 0..m {
                    if mask >> a & 1 == 1 {
                        s.add_element_attack(a, t);
                    }
                }
                t += 1;
            }
        }
        visit(&s);
        let mut k = 0;
        loop {
            if k == m {
                return;
            }
            choice[k] += 1;
            if choice[k] < options.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn strictly_increasing_sequences(bound: usize, len: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(bound: usize, len: usize, start: usize, acc: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if acc.len() == len {
            visit(acc);
            return;
        }
        for v in start..bound {
            acc.push(v);
            rec(bound, len, v + 1, acc, visit);
            acc.pop();
        }
    }
    rec(bound, len, 0, &mut Vec::new(), visit);
}

/// Maps each domain set to mu of it.
pub fn mu_table(s: &PrefStructure, domain: &[Bits]) -> Result<HashMap<Bits, Bits>> {
    let mut out = HashMap::new();
    for x in domain {
        out.insert(x.clone(), s.mu(x)?);
    }
    Ok(out)
}
