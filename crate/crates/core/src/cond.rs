//! Conditions on choice functions over finite set domains.
//!
//! A choice function maps each domain set X to an arbitrary subset of the
//! universe; the conditions below are what checkers test, never what the
//! type enforces. Quantified letters that occur as arguments of f range
//! over the domain, and an instance applies only when every composite
//! argument (X∪Y, X∩A, ...) is itself in the domain. Letters that never
//! occur inside f(·) range over arbitrary subsets of the universe; their
//! checks use the minimal witness set, which is recorded in the
//! counterexample.

use crate::bits::Bits;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceFunction {
    elements: Vec<String>,
    domain: Vec<Bits>,
    map: HashMap<Bits, Bits>,
}

impl ChoiceFunction {
    pub fn new(elements: Vec<String>, entries: Vec<(Bits, Bits)>) -> Result<ChoiceFunction> {
        let m = elements.len();
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::input(format!("duplicate element {e:?}")));
            }
        }
        let mut map = HashMap::new();
        let mut domain = Vec::new();
        for (x, fx) in entries {
            if x.len() != m || fx.len() != m {
                return Err(Error::input("set over a different universe"));
            }
            if map.insert(x.clone(), fx).is_some() {
                return Err(Error::input(format!("duplicate domain set {x:?}")));
            }
            domain.push(x);
        }
        domain.sort();
        Ok(ChoiceFunction { elements, domain, map })
    }

    pub fn identity_on(elements: Vec<String>, domain: Vec<Bits>) -> Result<ChoiceFunction> {
        let entries = domain.into_iter().map(|x| (x.clone(), x)).collect();
        ChoiceFunction::new(elements, entries)
    }

    /// f = mu of the structure, on the given domain.
    pub fn from_structure(
        s: &crate::pref::PrefStructure,
        domain: &[Bits],
    ) -> Result<ChoiceFunction> {
        let mut entries = Vec::new();
        for x in domain {
            entries.push((x.clone(), s.mu(x)?));
        }
        ChoiceFunction::new(s.elements().to_vec(), entries)
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Domain in canonical order.
    pub fn domain(&self) -> &[Bits] {
        &self.domain
    }

    pub fn contains(&self, x: &Bits) -> bool {
        self.map.contains_key(x)
    }

    pub fn value(&self, x: &Bits) -> Result<&Bits> {
        self.map
            .get(x)
            .ok_or_else(|| Error::input(format!("set {} not in domain", self.set_name(x))))
    }

    pub fn set_of(&self, names: &[&str]) -> Result<Bits> {
        let mut b = Bits::empty(self.elements.len());
        for n in names {
            let i = self
                .elements
                .iter()
                .position(|e| e == n)
                .ok_or_else(|| Error::input(format!("unknown element {n:?}")))?;
            b.insert(i);
        }
        Ok(b)
    }

    pub fn set_name(&self, x: &Bits) -> String {
        let names: Vec<&str> = x.iter().map(|i| self.elements[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn is_closed_under_intersection(&self) -> bool {
        self.closed_under(|a, b| a.intersect(b))
    }

    pub fn is_closed_under_union(&self) -> bool {
        self.closed_under(|a, b| a.union(b))
    }

    pub fn is_closed_under_difference(&self) -> bool {
        self.closed_under(|a, b| a.difference(b))
    }

    pub fn has_all_singletons(&self) -> bool {
        (0..self.elements.len())
            .all(|i| self.map.contains_key(&Bits::singleton(self.elements.len(), i)))
    }

    fn closed_under(&self, op: impl Fn(&Bits, &Bits) -> Bits) -> bool {
        for a in &self.domain {
            for b in &self.domain {
                if !self.map.contains_key(&op(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Text format: `domain: {a,b},{a,b,c}; f{a,b}={b}; f{a,b,c}={a};`
    /// with an optional leading `universe: a,b,c;` naming elements that
    /// appear in no set.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "universe: {}; ", self.elements.join(","));
        let sets: Vec<String> = self.domain.iter().map(|x| self.set_name(x)).collect();
        let _ = write!(s, "domain: {}; ", sets.join(","));
        for x in &self.domain {
            let _ = write!(s, "f{}={}; ", self.set_name(x), self.set_name(&self.map[x]));
        }
        s.trim_end().to_string()
    }

    pub fn from_text(text: &str) -> Result<ChoiceFunction> {
        let mut universe: Option<Vec<String>> = None;
        let mut domain_specs: Vec<Vec<String>> = Vec::new();
        let mut value_specs: Vec<(Vec<String>, Vec<String>)> = Vec::new();
        let mut saw_domain = false;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() || part.starts_with('#') {
                continue;
            }
            if let Some(rest) = part.strip_prefix("universe:") {
                universe = Some(
                    rest.split(',')
                        .map(|e| e.trim().to_string())
                        .filter(|e| !e.is_empty())
                        .collect(),
                );
            } else if let Some(rest) = part.strip_prefix("domain:") {
                saw_domain = true;
                for set in split_set_list(rest)? {
                    domain_specs.push(set);
                }
            } else if let Some(rest) = part.strip_prefix('f') {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::input(format!("bad f entry {part:?}")))?;
                value_specs.push((parse_braced_set(lhs.trim())?, parse_braced_set(rhs.trim())?));
            } else {
                return Err(Error::input(format!("cannot parse {part:?}")));
            }
        }
        if !saw_domain {
            // Without an explicit section the domain is read off the f entries.
            for (l, _) in &value_specs {
                domain_specs.push(l.clone());
            }
        }
        let elements: Vec<String> = match universe {
            Some(u) => u,
            None => {
                // Infer the universe from every mentioned name, in first-seen order.
                let mut names: Vec<String> = Vec::new();
                let mentioned = domain_specs
                    .iter()
                    .chain(value_specs.iter().map(|(l, _)| l))
                    .chain(value_specs.iter().map(|(_, r)| r));
                for set in mentioned {
                    for n in set {
                        if !names.contains(n) {
                            names.push(n.clone());
                        }
                    }
                }
                names
            }
        };
        let to_bits = |names: &[String]| -> Result<Bits> {
            let mut b = Bits::empty(elements.len());
            for n in names {
                let i = elements
                    .iter()
                    .position(|e| e == n)
                    .ok_or_else(|| Error::input(format!("element {n:?} not in universe")))?;
                b.insert(i);
            }
            Ok(b)
        };
        let mut values: HashMap<Bits, Bits> = HashMap::new();
        for (l, r) in &value_specs {
            values.insert(to_bits(l)?, to_bits(r)?);
        }
        let mut entries = Vec::new();
        for spec in &domain_specs {
            let x = to_bits(spec)?;
            let fx = values
                .remove(&x)
                .ok_or_else(|| Error::input(format!("no f value for {{{}}}", spec.join(","))))?;
            entries.push((x, fx));
        }
        if let Some(extra) = values.keys().next() {
            return Err(Error::input(format!(
                "f defined on a set outside the domain: index set {extra:?}"
            )));
        }
        ChoiceFunction::new(elements, entries)
    }
}

fn split_set_list(text: &str) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '{' => {
                depth += 1;
                cur.push(c);
            }
            '}' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::input("unbalanced braces in set list"))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(parse_braced_set(cur.trim())?);
                }
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::input("unbalanced braces in set list"));
    }
    if !cur.trim().is_empty() {
        out.push(parse_braced_set(cur.trim())?);
    }
    Ok(out)
}

fn parse_braced_set(text: &str) -> Result<Vec<String>> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::input(format!("expected a braced set, got {text:?}")))?;
    Ok(inner
        .split(',')
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MuCondition {
    Sub,
    Pr,
    PrPrime,
    Or,
    WOr,
    DisjOr,
    Cut,
    Cm,
    ResM,
    Cum,
    SubSup,
    RatM,
    Eq,
    EqPrime,
    Par,
    Cup,
    CupPrime,
    In,
    Empty,
    EmptyFin,
}

pub const ALL_MU_CONDITIONS: [MuCondition; 20] = [
    MuCondition::Sub,
    MuCondition::Pr,
    MuCondition::PrPrime,
    MuCondition::Or,
    MuCondition::WOr,
    MuCondition::DisjOr,
    MuCondition::Cut,
    MuCondition::Cm,
    MuCondition::ResM,
    MuCondition::Cum,
    MuCondition::SubSup,
    MuCondition::RatM,
    MuCondition::Eq,
    MuCondition::EqPrime,
    MuCondition::Par,
    MuCondition::Cup,
    MuCondition::CupPrime,
    MuCondition::In,
    MuCondition::Empty,
    MuCondition::EmptyFin,
];

impl MuCondition {
    /// ASCII id, accepted by parsers and printed in machine-readable output.
    pub fn id(self) -> &'static str {
        match self {
            MuCondition::Sub => "mu-sub",
            MuCondition::Pr => "mu-PR",
            MuCondition::PrPrime => "mu-PR'",
            MuCondition::Or => "mu-OR",
            MuCondition::WOr => "mu-wOR",
            MuCondition::DisjOr => "mu-disjOR",
            MuCondition::Cut => "mu-CUT",
            MuCondition::Cm => "mu-CM",
            MuCondition::ResM => "mu-ResM",
            MuCondition::Cum => "mu-CUM",
            MuCondition::SubSup => "mu-sub-sup",
            MuCondition::RatM => "mu-RatM",
            MuCondition::Eq => "mu-eq",
            MuCondition::EqPrime => "mu-eq'",
            MuCondition::Par => "mu-par",
            MuCondition::Cup => "mu-cup",
            MuCondition::CupPrime => "mu-cup'",
            MuCondition::In => "mu-in",
            MuCondition::Empty => "mu-empty",
            MuCondition::EmptyFin => "mu-empty-fin",
        }
    }

    /// Notation used in human-readable reports.
    pub fn display_name(self) -> &'static str {
        match self {
            MuCondition::Sub => "(μ⊆)",
            MuCondition::Pr => "(μPR)",
            MuCondition::PrPrime => "(μPR′)",
            MuCondition::Or => "(μOR)",
            MuCondition::WOr => "(μwOR)",
            MuCondition::DisjOr => "(μdisjOR)",
            MuCondition::Cut => "(μCUT)",
            MuCondition::Cm => "(μCM)",
            MuCondition::ResM => "(μResM)",
            MuCondition::Cum => "(μCUM)",
            MuCondition::SubSup => "(μ⊆⊇)",
            MuCondition::RatM => "(μRatM)",
            MuCondition::Eq => "(μ=)",
            MuCondition::EqPrime => "(μ=′)",
            MuCondition::Par => "(μ∥)",
            MuCondition::Cup => "(μ∪)",
            MuCondition::CupPrime => "(μ∪′)",
            MuCondition::In => "(μ∈)",
            MuCondition::Empty => "(μ∅)",
            MuCondition::EmptyFin => "(μ∅fin)",
        }
    }

    /// Accepts the ASCII id, plus aliases named after the consequence-
    /// relation rule that translates to the condition (row-wise: SC maps
    /// to inclusion, CP to nonemptiness, and so on).
    pub fn parse(name: &str) -> Result<MuCondition> {
        let c = match name {
            "mu-sub" | "mu-SC" | "mu-subseteq" => MuCondition::Sub,
            "mu-PR" => MuCondition::Pr,
            "mu-PR'" => MuCondition::PrPrime,
            "mu-OR" => MuCondition::Or,
            "mu-wOR" => MuCondition::WOr,
            "mu-disjOR" => MuCondition::DisjOr,
            "mu-CUT" => MuCondition::Cut,
            "mu-CM" => MuCondition::Cm,
            "mu-ResM" => MuCondition::ResM,
            "mu-CUM" => MuCondition::Cum,
            "mu-sub-sup" | "mu-subsup" => MuCondition::SubSup,
            "mu-RatM" => MuCondition::RatM,
            "mu-eq" | "mu-RatM=" => MuCondition::Eq,
            "mu-eq'" => MuCondition::EqPrime,
            "mu-par" => MuCondition::Par,
            "mu-cup" => MuCondition::Cup,
            "mu-cup'" => MuCondition::CupPrime,
            "mu-in" => MuCondition::In,
            "mu-empty" | "mu-CP" => MuCondition::Empty,
            "mu-empty-fin" => MuCondition::EmptyFin,
            _ => return Err(Error::input(format!("unknown condition id {name:?}"))),
        };
        Ok(c)
    }
}

impl fmt::Display for MuCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name())
    }
}

/// One instantiation of a condition schema: named sets and elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub sets: Vec<(&'static str, Bits)>,
    pub elems: Vec<(&'static str, usize)>,
}

impl Instance {
    fn sets(pairs: &[(&'static str, &Bits)]) -> Instance {
        Instance {
            sets: pairs.iter().map(|(n, b)| (*n, (*b).clone())).collect(),
            elems: Vec::new(),
        }
    }

    pub fn render(&self, f: &ChoiceFunction) -> String {
        let mut parts: Vec<String> = self
            .sets
            .iter()
            .map(|(n, b)| format!("{n}={}", f.set_name(b)))
            .collect();
        for (n, e) in &self.elems {
            parts.push(format!("{n}={}", f.elements()[*e]));
        }
        parts.join(", ")
    }
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition: String,
    pub holds: bool,
    pub counterexample: Option<Instance>,
    pub instances_checked: u64,
}

impl ConditionReport {
    pub fn render(&self, f: &ChoiceFunction) -> String {
        match &self.counterexample {
            None => format!("{}: holds ({} instances)", self.condition, self.instances_checked),
            Some(i) => format!("{}: fails at {}", self.condition, i.render(f)),
        }
    }
}

/// Evaluates one instance of a condition. Returns true when the instance
/// is satisfied (premise false or conclusion true). Instances whose
/// composite arguments fall outside the domain must not be constructed;
/// this function treats missing values as an input error.
pub fn eval_mu_instance(f: &ChoiceFunction, cond: MuCondition, inst: &Instance) -> Result<bool> {
    let get = |name: &str| -> Result<&Bits> {
        inst.sets
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| b)
            .ok_or_else(|| Error::input(format!("instance missing set {name}")))
    };
    Ok(match cond {
        MuCondition::Sub => {
            let x = get("X")?;
            f.value(x)?.is_subset(x)
        }
        MuCondition::Pr => {
            let (x, y) = (get("X")?, get("Y")?);
            !x.is_subset(y) || f.value(y)?.intersect(x).is_subset(f.value(x)?)
        }
        MuCondition::PrPrime => {
            let (x, y) = (get("X")?, get("Y")?);
            f.value(x)?.intersect(y).is_subset(f.value(&x.intersect(y))?)
        }
        MuCondition::Or => {
            let (x, y) = (get("X")?, get("Y")?);
            f.value(&x.union(y))?.is_subset(&f.value(x)?.union(f.value(y)?))
        }
        MuCondition::WOr => {
            let (x, y) = (get("X")?, get("Y")?);
            f.value(&x.union(y))?.is_subset(&f.value(x)?.union(y))
        }
        MuCondition::DisjOr => {
            let (x, y) = (get("X")?, get("Y")?);
            !x.intersect(y).is_empty()
                || f.value(&x.union(y))?.is_subset(&f.value(x)?.union(f.value(y)?))
        }
        MuCondition::Cut => {
            let (x, y) = (get("X")?, get("Y")?);
            let fx = f.value(x)?;
            !(fx.is_subset(y) && y.is_subset(x)) || fx.is_subset(f.value(y)?)
        }
        MuCondition::Cm => {
            let (x, y) = (get("X")?, get("Y")?);
            let fx = f.value(x)?;
            !(fx.is_subset(y) && y.is_subset(x)) || f.value(y)?.is_subset(fx)
        }
        MuCondition::ResM => {
            // B ranges over arbitrary subsets; the minimal B containing
            // f(X) decides all of them, so the schema reduces to
            // f(X) ⊆ A → f(X∩A) ⊆ f(X).
            let (x, a) = (get("X")?, get("A")?);
            let fx = f.value(x)?;
            !fx.is_subset(a) || f.value(&x.intersect(a))?.is_subset(fx)
        }
        MuCondition::Cum => {
            let (x, y) = (get("X")?, get("Y")?);
            let fx = f.value(x)?;
            !(fx.is_subset(y) && y.is_subset(x)) || f.value(y)? == fx
        }
        MuCondition::SubSup => {
            let (x, y) = (get("X")?, get("Y")?);
            let (fx, fy) = (f.value(x)?, f.value(y)?);
            !(fx.is_subset(y) && fy.is_subset(x)) || fx == fy
        }
        MuCondition::RatM => {
            let (x, y) = (get("X")?, get("Y")?);
            let fy = f.value(y)?;
            !(x.is_subset(y) && x.intersects(fy))
                || f.value(x)?.is_subset(&fy.intersect(x))
        }
        MuCondition::Eq => {
            let (x, y) = (get("X")?, get("Y")?);
            let fy = f.value(y)?;
            !(x.is_subset(y) && x.intersects(fy)) || *f.value(x)? == fy.intersect(x)
        }
        MuCondition::EqPrime => {
            let (x, y) = (get("X")?, get("Y")?);
            let fy = f.value(y)?;
            !fy.intersects(x) || *f.value(&y.intersect(x))? == fy.intersect(x)
        }
        MuCondition::Par => {
            let (x, y) = (get("X")?, get("Y")?);
            let u = f.value(&x.union(y))?;
            let (fx, fy) = (f.value(x)?, f.value(y)?);
            *u == *fx || *u == *fy || *u == fx.union(fy)
        }
        MuCondition::Cup => {
            let (x, y) = (get("X")?, get("Y")?);
            let fy = f.value(y)?;
            let fx = f.value(x)?;
            !fy.intersects(&x.difference(fx)) || !f.value(&x.union(y))?.intersects(y)
        }
        MuCondition::CupPrime => {
            let (x, y) = (get("X")?, get("Y")?);
            let fy = f.value(y)?;
            let fx = f.value(x)?;
            !fy.intersects(&x.difference(fx)) || f.value(&x.union(y))? == fx
        }
        MuCondition::In => {
            let x = get("X")?;
            let a = inst
                .elems
                .iter()
                .find(|(n, _)| *n == "a")
                .map(|(_, e)| *e)
                .ok_or_else(|| Error::input("instance missing element a"))?;
            if !x.contains(a) || f.value(x)?.contains(a) {
                true
            } else {
                let m = f.num_elements();
                x.iter().any(|b| {
                    let pair = Bits::from_indices(m, &[a, b]);
                    matches!(f.value(&pair), Ok(fp) if !fp.contains(a))
                })
            }
        }
        MuCondition::Empty | MuCondition::EmptyFin => {
            let x = get("X")?;
            x.is_empty() || !f.value(x)?.is_empty()
        }
    })
}

/// Exhaustive check of a condition over the domain, reporting the first
/// counterexample in canonical domain order.
pub fn check_mu_condition(f: &ChoiceFunction, cond: MuCondition) -> Result<ConditionReport> {
    let mut checked = 0u64;
    let mut cex = None;
    for_each_instance(f, cond, &mut |inst| {
        checked += 1;
        if cex.is_none() && !eval_mu_instance(f, cond, &inst)? {
            cex = Some(inst);
        }
        Ok(())
    })?;
    Ok(ConditionReport {
        condition: cond.display_name().to_string(),
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}

pub fn check_mu_condition_by_id(f: &ChoiceFunction, id: &str) -> Result<ConditionReport> {
    check_mu_condition(f, MuCondition::parse(id)?)
}

/// Enumerates the applicable instances of a condition in canonical order.
fn for_each_instance(
    f: &ChoiceFunction,
    cond: MuCondition,
    visit: &mut impl FnMut(Instance) -> Result<()>,
) -> Result<()> {
    let dom = f.domain();
    match cond {
        MuCondition::Sub | MuCondition::Empty | MuCondition::EmptyFin => {
            for x in dom {
                visit(Instance::sets(&[("X", x)]))?;
            }
        }
        MuCondition::Pr
        | MuCondition::Cut
        | MuCondition::Cm
        | MuCondition::Cum
        | MuCondition::SubSup
        | MuCondition::RatM
        | MuCondition::Eq => {
            for x in dom {
                for y in dom {
                    visit(Instance::sets(&[("X", x), ("Y", y)]))?;
                }
            }
        }
        MuCondition::PrPrime | MuCondition::EqPrime => {
            for x in dom {
                for y in dom {
                    if f.contains(&x.intersect(y)) {
                        visit(Instance::sets(&[("X", x), ("Y", y)]))?;
                    }
                }
            }
        }
        MuCondition::ResM => {
            for x in dom {
                for a in dom {
                    if f.contains(&x.intersect(a)) {
                        visit(Instance::sets(&[("X", x), ("A", a)]))?;
                    }
                }
            }
        }
        MuCondition::Or
        | MuCondition::WOr
        | MuCondition::DisjOr
        | MuCondition::Par
        | MuCondition::Cup
        | MuCondition::CupPrime => {
            for x in dom {
                for y in dom {
                    if f.contains(&x.union(y)) {
                        visit(Instance::sets(&[("X", x), ("Y", y)]))?;
                    }
                }
            }
        }
        MuCondition::In => {
            for x in dom {
                for a in x.iter() {
                    visit(Instance {
                        sets: vec![("X", x.clone())],
                        elems: vec![("a", a)],
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Checks several conditions and returns the reports in input order.
pub fn check_mu_conditions(
    f: &ChoiceFunction,
    conds: &[MuCondition],
) -> Result<Vec<ConditionReport>> {
    conds.iter().map(|&c| check_mu_condition(f, c)).collect()
}

#[derive(Clone, Debug)]
pub struct HuSets {
    /// Single-step union of all domain sets whose image lies inside U.
    pub hu_single: Bits,
    /// Fixpoint starting from U, absorbing every X with f(X) inside the
    /// current stage.
    pub hu_iterated: Bits,
    /// Same fixpoint but only through sets containing u.
    pub huu: Option<Bits>,
    /// Everything chosen somewhere: union of all f(X).
    pub k: Bits,
}

pub fn compute_hu(f: &ChoiceFunction, u_elem: Option<usize>, big_u: &Bits) -> Result<HuSets> {
    if !f.contains(big_u) {
        return Err(Error::input(format!("{} not in domain", f.set_name(big_u))));
    }
    let m = f.num_elements();
    let mut hu_single = Bits::empty(m);
    for x in f.domain() {
        if f.value(x)?.is_subset(big_u) {
            hu_single = hu_single.union(x);
        }
    }
    let iterate = |require: Option<usize>| -> Result<Bits> {
        let mut h = big_u.clone();
        loop {
            let mut next = h.clone();
            for x in f.domain() {
                if let Some(u) = require {
                    if !x.contains(u) {
                        continue;
                    }
                }
                if f.value(x)?.is_subset(&h) {
                    next = next.union(x);
                }
            }
            if next == h {
                return Ok(h);
            }
            h = next;
        }
    };
    let hu_iterated = iterate(None)?;
    let huu = match u_elem {
        Some(u) => Some(iterate(Some(u))?),
        None => None,
    };
    let mut k = Bits::empty(m);
    for x in f.domain() {
        k = k.union(f.value(x)?);
    }
    Ok(HuSets { hu_single, hu_iterated, huu, k })
}

/// The staged cumulativity condition at level alpha: for sequences
/// X_0..X_alpha from the domain, if every f(X_beta) stays inside
/// U ∪ X_0 ∪ .. ∪ X_{beta-1}, then the intersection of the X_gamma
/// with f(U) lies in f(X_alpha). The transitive variant weakens the
/// intersection to X_alpha alone.
pub fn check_cum_alpha(
    f: &ChoiceFunction,
    alpha: usize,
    transitive_variant: bool,
) -> Result<ConditionReport> {
    if alpha > 4 {
        return Err(Error::input("alpha capped at 4"));
    }
    let name = if transitive_variant {
        format!("(μCumt{alpha})")
    } else {
        format!("(μCum{alpha})")
    };
    // Depth-first over sequences, pruning as soon as the premise fails at
    // some prefix: every extension has the same failing stage.
    struct Walk<'a> {
        f: &'a ChoiceFunction,
        big_u: Bits,
        fu: Bits,
        alpha: usize,
        transitive_variant: bool,
        checked: u64,
        cex: Option<Instance>,
    }

    impl Walk<'_> {
        fn rec(&mut self, seq: &mut Vec<Bits>, acc_union: &Bits, acc_inter: &Bits) -> Result<()> {
            if self.cex.is_some() {
                return Ok(());
            }
            if seq.len() == self.alpha + 1 {
                self.checked += 1;
                let x_alpha = seq.last().unwrap();
                let lhs = if self.transitive_variant {
                    x_alpha.intersect(&self.fu)
                } else {
                    acc_inter.intersect(&self.fu)
                };
                if !lhs.is_subset(self.f.value(x_alpha)?) {
                    let mut sets: Vec<(&'static str, Bits)> = vec![("U", self.big_u.clone())];
                    const NAMES: [&str; 5] = ["X0", "X1", "X2", "X3", "X4"];
                    for (i, x) in seq.iter().enumerate() {
                        sets.push((NAMES[i], x.clone()));
                    }
                    self.cex = Some(Instance { sets, elems: Vec::new() });
                }
                return Ok(());
            }
            let reachable = self.big_u.union(acc_union);
            for i in 0..self.f.domain().len() {
                let x = self.f.domain()[i].clone();
                // Premise at this stage: f(X_beta) ⊆ U ∪ (earlier X's).
                if !self.f.value(&x)?.is_subset(&reachable) {
                    continue;
                }
                let next_union = acc_union.union(&x);
                let next_inter = acc_inter.intersect(&x);
                seq.push(x);
                self.rec(seq, &next_union, &next_inter)?;
                seq.pop();
                if self.cex.is_some() {
                    return Ok(());
                }
            }
            Ok(())
        }
    }

    let mut checked = 0u64;
    let mut cex: Option<Instance> = None;
    for big_u in f.domain().to_vec() {
        let fu = f.value(&big_u)?.clone();
        let empty = Bits::empty(f.num_elements());
        let full = Bits::full(f.num_elements());
        let mut walk = Walk {
            f,
            big_u,
            fu,
            alpha,
            transitive_variant,
            checked: 0,
            cex: None,
        };
        walk.rec(&mut Vec::new(), &empty, &full)?;
        checked += walk.checked;
        cex = walk.cex;
        if cex.is_some() {
            break;
        }
    }
    Ok(ConditionReport {
        condition: name,
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}

/// u ∈ f(U) and u ∈ Y − f(Y) must force f(Y) to reach outside the
/// u-staged hull of U (or the unstaged hull when u_mode is false).
pub fn check_hu_property(f: &ChoiceFunction, u_mode: bool) -> Result<ConditionReport> {
    let name = if u_mode { "(HU,u)" } else { "(HU)" };
    let mut checked = 0u64;
    let mut cex = None;
    'outer: for big_u in f.domain() {
        let fu = f.value(big_u)?.clone();
        for u in fu.iter() {
            let hull = if u_mode {
                compute_hu(f, Some(u), big_u)?.huu.unwrap()
            } else {
                compute_hu(f, None, big_u)?.hu_iterated
            };
            for y in f.domain() {
                let fy = f.value(y)?;
                checked += 1;
                if y.contains(u) && !fy.contains(u) && fy.is_subset(&hull) {
                    cex = Some(Instance {
                        sets: vec![("U", big_u.clone()), ("Y", y.clone())],
                        elems: vec![("u", u)],
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(ConditionReport {
        condition: name.to_string(),
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}

/// Derived bound f(X∪Y) ⊆ f(X) ∪ f(Y) ∪ (X∩Y); requires the weak-or
/// and inclusion conditions to hold first.
pub fn check_mwor_consequence(f: &ChoiceFunction) -> Result<ConditionReport> {
    for pre in [MuCondition::WOr, MuCondition::Sub] {
        let r = check_mu_condition(f, pre)?;
        if !r.holds {
            return Err(Error::contract(format!(
                "premise {} fails at {}",
                pre.display_name(),
                r.counterexample.unwrap().render(f)
            )));
        }
    }
    let mut checked = 0u64;
    let mut cex = None;
    'outer: for x in f.domain() {
        for y in f.domain() {
            if !f.contains(&x.union(y)) {
                continue;
            }
            checked += 1;
            let bound = f.value(x)?.union(f.value(y)?).union(&x.intersect(y));
            if !f.value(&x.union(y))?.is_subset(&bound) {
                cex = Some(Instance::sets(&[("X", x), ("Y", y)]));
                break 'outer;
            }
        }
    }
    Ok(ConditionReport {
        condition: "f(X∪Y) ⊆ f(X)∪f(Y)∪(X∩Y)".to_string(),
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}
