//! Finite propositional model theory.
//!
//! A language fixes an ordered list of at most 16 variables. Valuations are
//! indices 0..2^n; bit j of an index is the truth value of the j-th
//! variable. Model sets are bitsets over all valuations, so every model set
//! is definable and the hull operator over the full definable domain is the
//! identity.

use crate::bits::Bits;
use crate::error::{Error, Result};
use std::fmt;

pub const MAX_VARS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Language {
    vars: Vec<String>,
}

impl Language {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Result<Language> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        if vars.len() > MAX_VARS {
            return Err(Error::input(format!(
                "language has {} variables, maximum is {MAX_VARS}",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_ident(v) {
                return Err(Error::input(format!("bad variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::input(format!("duplicate variable {v:?}")));
            }
        }
        Ok(Language { vars })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_valuations(&self) -> usize {
        1 << self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Truth value of variable `j` under valuation index `i`.
    pub fn truth(&self, i: usize, j: usize) -> bool {
        i >> j & 1 == 1
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && s != "true" && s != "false"
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Top,
    Bot,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    /// Grammar: `~ & | -> <-> ( ) true false ident`, precedence
    /// `~` > `&` > `|` > `->` > `<->`, arrows right-associative.
    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.parse_iff()?;
        if p.pos != p.tokens.len() {
            return Err(Error::input(format!(
                "unexpected trailing token {:?} in formula",
                p.tokens[p.pos]
            )));
        }
        Ok(f)
    }

    pub fn vars_used(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::Not(a) => a.collect_vars(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        let paren = p < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Top => write!(f, "true")?,
            Formula::Bot => write!(f, "false")?,
            Formula::Var(v) => write!(f, "{v}")?,
            Formula::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 5)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 5)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " <-> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    True,
    False,
    Ident(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '~' => {
                out.push(Token::Not);
                i += 1;
            }
            '&' => {
                out.push(Token::And);
                i += 1;
            }
            '|' => {
                out.push(Token::Or);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push(Token::Implies);
                    i += 2;
                } else {
                    return Err(Error::input(format!("stray '-' at offset {i}")));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    out.push(Token::Iff);
                    i += 3;
                } else {
                    return Err(Error::input(format!("stray '<' at offset {i}")));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(match word.as_str() {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word),
                });
            }
            other => {
                return Err(Error::input(format!(
                    "unexpected character {other:?} at offset {i}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn parse_iff(&mut self) -> Result<Formula> {
        let left = self.parse_implies()?;
        if self.peek() == Some(&Token::Iff) {
            self.pos += 1;
            let right = self.parse_iff()?;
            Ok(Formula::iff(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula> {
        let left = self.parse_or()?;
        if self.peek() == Some(&Token::Implies) {
            self.pos += 1;
            let right = self.parse_implies()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut acc = self.parse_and()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut acc = self.parse_not()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let rhs = self.parse_not()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_not(&mut self) -> Result<Formula> {
        if self.peek() == Some(&Token::Not) {
            self.pos += 1;
            Ok(!self.parse_not()?)
        } else {
            self.parse_atom()
        }
    }

    fn parse_atom(&mut self) -> Result<Formula> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::True) => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Token::False) => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Var(name))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_iff()?;
                if self.peek() == Some(&Token::RParen) {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(Error::input("missing closing parenthesis"))
                }
            }
            other => Err(Error::input(format!("unexpected token {other:?}"))),
        }
    }
}

/// A finite set of formulas; deductive closure is computed, never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Theory {
    pub formulas: Vec<Formula>,
}

impl Theory {
    pub fn new(formulas: Vec<Formula>) -> Theory {
        Theory { formulas }
    }

    pub fn parse(text: &str) -> Result<Theory> {
        let mut formulas = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if !part.is_empty() {
                formulas.push(Formula::parse(part)?);
            }
        }
        Ok(Theory { formulas })
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.formulas.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Bitset over all valuations of a language; bit i is valuation index i.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModelSet {
    lang: Language,
    bits: Bits,
}

impl ModelSet {
    pub fn empty(lang: &Language) -> ModelSet {
        ModelSet { lang: lang.clone(), bits: Bits::empty(lang.num_valuations()) }
    }

    pub fn full(lang: &Language) -> ModelSet {
        ModelSet { lang: lang.clone(), bits: Bits::full(lang.num_valuations()) }
    }

    pub fn from_bits(lang: &Language, bits: Bits) -> ModelSet {
        assert_eq!(bits.len(), lang.num_valuations());
        ModelSet { lang: lang.clone(), bits }
    }

    pub fn from_indices(lang: &Language, indices: &[usize]) -> ModelSet {
        ModelSet {
            lang: lang.clone(),
            bits: Bits::from_indices(lang.num_valuations(), indices),
        }
    }

    pub fn lang(&self) -> &Language {
        &self.lang
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        self.zip(other, Bits::union)
    }

    pub fn intersect(&self, other: &ModelSet) -> ModelSet {
        self.zip(other, Bits::intersect)
    }

    pub fn difference(&self, other: &ModelSet) -> ModelSet {
        self.zip(other, Bits::difference)
    }

    pub fn complement(&self) -> ModelSet {
        ModelSet { lang: self.lang.clone(), bits: self.bits.complement() }
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        assert_eq!(self.lang, other.lang);
        self.bits.is_subset(&other.bits)
    }

    fn zip(&self, other: &ModelSet, f: impl Fn(&Bits, &Bits) -> Bits) -> ModelSet {
        assert_eq!(self.lang, other.lang, "model sets over different languages");
        ModelSet { lang: self.lang.clone(), bits: f(&self.bits, &other.bits) }
    }

    /// `X ⊨ φ`: every valuation in the set satisfies the formula.
    pub fn satisfies(&self, phi: &Formula) -> Result<bool> {
        let m = models_of_formula(&self.lang, phi)?;
        Ok(self.bits.is_subset(&m.bits))
    }

    /// Serializes as the variable list plus a hex bit string.
    pub fn to_text(&self) -> String {
        format!("vars: {}; bits: {}", self.lang.vars().join(","), self.bits.to_hex())
    }

    pub fn from_text(text: &str) -> Result<ModelSet> {
        let mut vars_part = None;
        let mut bits_part = None;
        for part in text.split(';') {
            let part = part.trim();
            if let Some(rest) = part.strip_prefix("vars:") {
                vars_part = Some(rest.trim().to_string());
            } else if let Some(rest) = part.strip_prefix("bits:") {
                bits_part = Some(rest.trim().to_string());
            } else if !part.is_empty() {
                return Err(Error::input(format!("unknown model-set field {part:?}")));
            }
        }
        let vars_part =
            vars_part.ok_or_else(|| Error::input("model set text missing 'vars:'"))?;
        let bits_part =
            bits_part.ok_or_else(|| Error::input("model set text missing 'bits:'"))?;
        let vars: Vec<&str> = vars_part
            .split(',')
            .map(|v| v.trim())
            .filter(|v| !v.is_empty())
            .collect();
        let lang = Language::new(&vars)?;
        let bits = Bits::from_hex(lang.num_valuations(), &bits_part)
            .ok_or_else(|| Error::input(format!("bad hex bit string {bits_part:?}")))?;
        Ok(ModelSet { lang, bits })
    }
}

fn models_of_formula(lang: &Language, phi: &Formula) -> Result<ModelSet> {
    let n = lang.num_valuations();
    let bits = eval_bits(lang, phi, n)?;
    Ok(ModelSet { lang: lang.clone(), bits })
}

fn eval_bits(lang: &Language, phi: &Formula, n: usize) -> Result<Bits> {
    Ok(match phi {
        Formula::Top => Bits::full(n),
        Formula::Bot => Bits::empty(n),
        Formula::Var(v) => {
            let j = lang
                .var_index(v)
                .ok_or_else(|| Error::input(format!("unknown variable {v:?}")))?;
            let mut b = Bits::empty(n);
            for i in 0..n {
                if lang.truth(i, j) {
                    b.insert(i);
                }
            }
            b
        }
        Formula::Not(a) => eval_bits(lang, a, n)?.complement(),
        Formula::And(a, b) => eval_bits(lang, a, n)?.intersect(&eval_bits(lang, b, n)?),
        Formula::Or(a, b) => eval_bits(lang, a, n)?.union(&eval_bits(lang, b, n)?),
        Formula::Implies(a, b) => {
            eval_bits(lang, a, n)?.complement().union(&eval_bits(lang, b, n)?)
        }
        Formula::Iff(a, b) => {
            let x = eval_bits(lang, a, n)?;
            let y = eval_bits(lang, b, n)?;
            x.intersect(&y).union(&x.complement().intersect(&y.complement()))
        }
    })
}

/// Set of valuations satisfying every formula of the theory.
pub fn models_of(lang: &Language, t: &Theory) -> Result<ModelSet> {
    let mut acc = ModelSet::full(lang);
    for phi in &t.formulas {
        acc = acc.intersect(&models_of_formula(lang, phi)?);
    }
    Ok(acc)
}

pub fn models_of_phi(lang: &Language, phi: &Formula) -> Result<ModelSet> {
    models_of_formula(lang, phi)
}

/// Canonical finite axiomatization of a model set: full disjunctive normal
/// form over its valuations. The empty set yields `{false}`, the full set
/// `{true}`; `models_of(theory_of(x)) = x` always.
pub fn theory_of(x: &ModelSet) -> Theory {
    if x.is_empty() {
        return Theory::new(vec![Formula::Bot]);
    }
    if x.count() == x.lang.num_valuations() {
        return Theory::new(vec![Formula::Top]);
    }
    let mut disjuncts: Option<Formula> = None;
    for i in x.iter() {
        let m = minterm(&x.lang, i);
        disjuncts = Some(match disjuncts {
            None => m,
            Some(acc) => Formula::or(acc, m),
        });
    }
    Theory::new(vec![disjuncts.unwrap()])
}

/// Conjunction of literals pinning valuation `i` exactly.
pub fn minterm(lang: &Language, i: usize) -> Formula {
    let mut acc: Option<Formula> = None;
    for (j, v) in lang.vars().iter().enumerate() {
        let lit = if lang.truth(i, j) {
            Formula::var(v)
        } else {
            !Formula::var(v)
        };
        acc = Some(match acc {
            None => lit,
            Some(a) => Formula::and(a, lit),
        });
    }
    acc.unwrap_or(Formula::Top)
}

/// Smallest domain member containing `a`; the intersection of all domain
/// supersets, with the full set as the intersection over an empty family.
/// The domain must be closed under pairwise intersections.
pub fn closure_hat(a: &ModelSet, domain: &[ModelSet]) -> Result<ModelSet> {
    for x in domain {
        if x.lang != a.lang {
            return Err(Error::input("closure domain over a different language"));
        }
    }
    for (i, x) in domain.iter().enumerate() {
        for y in &domain[i..] {
            let meet = x.intersect(y);
            if !domain.contains(&meet) {
                return Err(Error::contract(format!(
                    "domain not closed under intersection: missing {}",
                    meet.bits().to_hex()
                )));
            }
        }
    }
    let mut acc = ModelSet::full(&a.lang);
    for x in domain {
        if a.is_subset(x) {
            acc = acc.intersect(x);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: String,
    pub holds: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
    pub exhaustive: bool,
    pub seed: u64,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

/// Asserts the basic model-set identities over a language of at most 4
/// variables: exhaustively up to 3 variables, by seeded sampling at 4.
pub fn modelset_algebra_suite(lang: &Language, seed: u64) -> Result<SuiteReport> {
    use rand::{Rng, SeedableRng};
    if lang.num_vars() > 4 {
        return Err(Error::input("algebra suite capped at 4 variables"));
    }
    let n = lang.num_valuations();
    let exhaustive = lang.num_vars() <= 3;
    let all_sets: Vec<Bits> = if exhaustive {
        Bits::full(n).subsets()
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Bits> = (0..512)
            .map(|_| {
                let mut b = Bits::empty(n);
                for i in 0..n {
                    if rng.gen_bool(0.5) {
                        b.insert(i);
                    }
                }
                b
            })
            .collect();
        v.push(Bits::empty(n));
        v.push(Bits::full(n));
        v.sort();
        v.dedup();
        v
    };
    let sets: Vec<ModelSet> = all_sets
        .iter()
        .map(|b| ModelSet::from_bits(lang, b.clone()))
        .collect();

    let mut entries = Vec::new();
    let mut record = |name: &str, cex: Option<String>| {
        entries.push(SuiteEntry {
            name: name.to_string(),
            holds: cex.is_none(),
            counterexample: cex,
        });
    };

    // The two entries below build and evaluate theory objects per pair,
    // which is much costlier than bit arithmetic; above 3 variables they
    // run on a slice of the sample.
    let theory_sets: &[ModelSet] = if exhaustive { &sets } else { &sets[..96.min(sets.len())] };
    let theories: Vec<Theory> = theory_sets.iter().map(theory_of).collect();

    // models_of(T ∪ T') = models_of(T) ∩ models_of(T').
    let mut cex = None;
    'outer1: for (x, tx) in theory_sets.iter().zip(&theories) {
        for (y, ty) in theory_sets.iter().zip(&theories) {
            let mut both = tx.clone();
            both.formulas.extend(ty.formulas.clone());
            let joint = models_of(lang, &both)?;
            if joint != x.intersect(y) {
                cex = Some(format!("X={} Y={}", x.bits().to_hex(), y.bits().to_hex()));
                break 'outer1;
            }
        }
    }
    record("union-of-theories-is-intersection", cex);

    // models_of(T ∨ T') = models_of(T) ∪ models_of(T'),
    // where T ∨ T' is the set of pairwise disjunctions.
    let mut cex = None;
    'outer2: for (x, tx) in theory_sets.iter().zip(&theories) {
        for (y, ty) in theory_sets.iter().zip(&theories) {
            let mut disj = Vec::new();
            for a in &tx.formulas {
                for b in &ty.formulas {
                    disj.push(Formula::or(a.clone(), b.clone()));
                }
            }
            let got = models_of(lang, &Theory::new(disj))?;
            if got != x.union(y) {
                cex = Some(format!("X={} Y={}", x.bits().to_hex(), y.bits().to_hex()));
                break 'outer2;
            }
        }
    }
    record("disjunction-of-theories-is-union", cex);

    // Th(A ∪ B) = Th(A) ∩ Th(B): a set of valuations satisfies exactly the
    // formulas true on both halves.
    let mut cex = None;
    'outer3: for x in &sets {
        for y in &sets {
            let u = x.union(y);
            for z in &sets {
                let phi_on_union = u.bits().is_subset(z.bits());
                let phi_on_both =
                    x.bits().is_subset(z.bits()) && y.bits().is_subset(z.bits());
                if phi_on_union != phi_on_both {
                    cex = Some(format!(
                        "A={} B={} M(phi)={}",
                        x.bits().to_hex(),
                        y.bits().to_hex(),
                        z.bits().to_hex()
                    ));
                    break 'outer3;
                }
            }
        }
    }
    record("theory-of-union-is-intersection-of-theories", cex);

    // X ∩ M(φ) ⊨ ψ iff X ⊨ φ → ψ.
    let mut cex = None;
    'outer4: for x in &sets {
        for phi in &sets {
            for psi in &sets {
                let lhs = x.bits().intersect(phi.bits()).is_subset(psi.bits());
                let rhs = x.bits().is_subset(&phi.bits().complement().union(psi.bits()));
                if lhs != rhs {
                    cex = Some(format!(
                        "X={} phi={} psi={}",
                        x.bits().to_hex(),
                        phi.bits().to_hex(),
                        psi.bits().to_hex()
                    ));
                    break 'outer4;
                }
            }
        }
    }
    record("conditionalization", cex);

    // Hull distribution over union. Over the full definable domain the
    // hull is the identity and the law is immediate, so it is also checked
    // against a small lattice domain (closed under both operations, with
    // the full set as top) where hulls genuinely grow.
    let mut cex = None;
    let lattice = {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let mut gens: Vec<Bits> = (0..4)
            .map(|_| {
                let mut b = Bits::empty(n);
                for i in 0..n {
                    if rng.gen_bool(0.5) {
                        b.insert(i);
                    }
                }
                b
            })
            .collect();
        gens.push(Bits::full(n));
        loop {
            let mut grown = false;
            let snapshot = gens.clone();
            for a in &snapshot {
                for b in &snapshot {
                    for c in [a.union(b), a.intersect(b)] {
                        if !gens.contains(&c) {
                            gens.push(c);
                            grown = true;
                        }
                    }
                }
            }
            if !grown {
                break;
            }
        }
        gens.sort();
        gens.into_iter().map(|b| ModelSet::from_bits(lang, b)).collect::<Vec<_>>()
    };
    let hull_sets: &[ModelSet] = if exhaustive { &sets } else { &sets[..64.min(sets.len())] };
    // The hull op re-validates its domain on every call, so hulls are
    // cached per distinct argument to keep the pair loop cheap.
    let mut cache_full: std::collections::HashMap<Bits, ModelSet> = Default::default();
    let mut cache_lat: std::collections::HashMap<Bits, ModelSet> = Default::default();
    let mut hull_of = |s: &ModelSet, full_domain: bool| -> Result<ModelSet> {
        let (cache, domain) = if full_domain {
            (&mut cache_full, &sets)
        } else {
            (&mut cache_lat, &lattice)
        };
        if let Some(h) = cache.get(s.bits()) {
            return Ok(h.clone());
        }
        let h = closure_hat(s, domain)?;
        cache.insert(s.bits().clone(), h.clone());
        Ok(h)
    };
    'outer5: for x in hull_sets {
        for y in hull_sets {
            if exhaustive {
                let hx = hull_of(x, true)?;
                let hy = hull_of(y, true)?;
                let hu = hull_of(&x.union(y), true)?;
                if hu != hx.union(&hy) || hx != *x || hy != *y {
                    cex = Some(format!("X={} Y={}", x.bits().to_hex(), y.bits().to_hex()));
                    break 'outer5;
                }
            }
            let hx = hull_of(x, false)?;
            let hy = hull_of(y, false)?;
            let hu = hull_of(&x.union(y), false)?;
            if hu != hx.union(&hy) || !x.bits().is_subset(hx.bits()) {
                cex = Some(format!(
                    "X={} Y={} (lattice domain)",
                    x.bits().to_hex(),
                    y.bits().to_hex()
                ));
                break 'outer5;
            }
        }
    }
    record("hull-distributes-over-union", cex);

    // Th(X) ∪ Th(Y) ⊆ Th(X ∩ Y).
    let mut cex = None;
    'outer6: for x in &sets {
        for y in &sets {
            let meet = x.intersect(y);
            for z in &sets {
                let on_either =
                    x.bits().is_subset(z.bits()) || y.bits().is_subset(z.bits());
                if on_either && !meet.bits().is_subset(z.bits()) {
                    cex = Some(format!(
                        "X={} Y={} M(phi)={}",
                        x.bits().to_hex(),
                        y.bits().to_hex(),
                        z.bits().to_hex()
                    ));
                    break 'outer6;
                }
            }
        }
    }
    record("intersection-keeps-theories", cex);

    // Round-trip: models_of(theory_of(X)) = X.
    let mut cex = None;
    for x in &sets {
        if models_of(lang, &theory_of(x))? != *x {
            cex = Some(format!("X={}", x.bits().to_hex()));
            break;
        }
    }
    record("definability-round-trip", cex);

    Ok(SuiteReport { entries, exhaustive, seed })
}
