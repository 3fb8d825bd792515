//! Inference-rule checkers for consequence relations induced by a choice
//! function over model sets.
//!
//! Throughout, the elements of the choice function are the valuations of a
//! finite language (element i is valuation index i), so every set of
//! valuations is definable by a formula and sets double as theories. The
//! induced relation is: T |~ phi iff f(M(T)) ⊆ M(phi), and C(T) is its
//! consequence set. For classically closed sets of formulas with definable
//! model sets, A ⊆ B holds iff M(B) ⊆ M(A); each rule below is evaluated
//! through that translation, with the remaining formula quantifiers run
//! literally over all definable sets.

use crate::bits::Bits;
use crate::cond::ChoiceFunction;
use crate::error::{Error, Result};
use crate::logic::{minterm, Formula, Language, ModelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRule {
    /// alpha |~ beta implies alpha does not entail-by-|~ the negation.
    And,
    /// n-1 premises alpha |~ beta_i; alpha must not |~ the disjunction of
    /// the negations. Parameter is n, 2..=5.
    AndN(u8),
    Or,
    WOr,
    DisjOr,
    Lle,
    Rw,
    Ccl,
    Sc,
    Ref,
    Cp,
    Pr,
    Cut,
    Cm,
    /// n premises alpha |~ beta_i; adding beta_1..beta_{n-1} to alpha must
    /// stay classically consistent with beta_n. Parameter is n, 2..=5.
    CmN(u8),
    ResM,
    Cum,
    SubSup,
    RatM,
    RatMEq,
    EqPrime,
    Par,
    CupRule,
    CupPrime,
}

pub const BASE_LOG_RULES: [LogRule; 22] = [
    LogRule::And,
    LogRule::Or,
    LogRule::WOr,
    LogRule::DisjOr,
    LogRule::Lle,
    LogRule::Rw,
    LogRule::Ccl,
    LogRule::Sc,
    LogRule::Ref,
    LogRule::Cp,
    LogRule::Pr,
    LogRule::Cut,
    LogRule::Cm,
    LogRule::ResM,
    LogRule::Cum,
    LogRule::SubSup,
    LogRule::RatM,
    LogRule::RatMEq,
    LogRule::EqPrime,
    LogRule::Par,
    LogRule::CupRule,
    LogRule::CupPrime,
];

/// Every supported rule, with the indexed families expanded over n.
pub fn all_log_rules() -> Vec<LogRule> {
    let mut v = BASE_LOG_RULES.to_vec();
    for n in 2..=5 {
        v.push(LogRule::AndN(n));
        v.push(LogRule::CmN(n));
    }
    v
}

impl LogRule {
    pub fn id(self) -> String {
        match self {
            LogRule::And => "AND".into(),
            LogRule::AndN(n) => format!("AND_{n}"),
            LogRule::Or => "OR".into(),
            LogRule::WOr => "wOR".into(),
            LogRule::DisjOr => "disjOR".into(),
            LogRule::Lle => "LLE".into(),
            LogRule::Rw => "RW".into(),
            LogRule::Ccl => "CCL".into(),
            LogRule::Sc => "SC".into(),
            LogRule::Ref => "REF".into(),
            LogRule::Cp => "CP".into(),
            LogRule::Pr => "PR".into(),
            LogRule::Cut => "CUT".into(),
            LogRule::Cm => "CM".into(),
            LogRule::CmN(n) => format!("CM_{n}"),
            LogRule::ResM => "ResM".into(),
            LogRule::Cum => "CUM".into(),
            LogRule::SubSup => "sub-sup".into(),
            LogRule::RatM => "RatM".into(),
            LogRule::RatMEq => "RatM=".into(),
            LogRule::EqPrime => "Log='".into(),
            LogRule::Par => "Log-par".into(),
            LogRule::CupRule => "Log-cup".into(),
            LogRule::CupPrime => "Log-cup'".into(),
        }
    }

    pub fn parse(id: &str) -> Result<LogRule> {
        let base = match id {
            "AND" => Some(LogRule::And),
            "OR" => Some(LogRule::Or),
            "wOR" => Some(LogRule::WOr),
            "disjOR" => Some(LogRule::DisjOr),
            "LLE" => Some(LogRule::Lle),
            "RW" => Some(LogRule::Rw),
            "CCL" => Some(LogRule::Ccl),
            "SC" => Some(LogRule::Sc),
            "REF" => Some(LogRule::Ref),
            "CP" => Some(LogRule::Cp),
            "PR" => Some(LogRule::Pr),
            "CUT" => Some(LogRule::Cut),
            "CM" => Some(LogRule::Cm),
            "ResM" => Some(LogRule::ResM),
            "CUM" => Some(LogRule::Cum),
            "sub-sup" => Some(LogRule::SubSup),
            "RatM" => Some(LogRule::RatM),
            "RatM=" => Some(LogRule::RatMEq),
            "Log='" => Some(LogRule::EqPrime),
            "Log-par" => Some(LogRule::Par),
            "Log-cup" => Some(LogRule::CupRule),
            "Log-cup'" => Some(LogRule::CupPrime),
            _ => None,
        };
        if let Some(r) = base {
            return Ok(r);
        }
        for (prefix, mk) in [
            ("AND_", LogRule::AndN as fn(u8) -> LogRule),
            ("CM_", LogRule::CmN as fn(u8) -> LogRule),
        ] {
            if let Some(n) = id.strip_prefix(prefix) {
                let n: u8 = n
                    .parse()
                    .map_err(|_| Error::input(format!("bad rule index in {id:?}")))?;
                if !(2..=5).contains(&n) {
                    return Err(Error::input(format!("rule index out of range in {id:?}")));
                }
                return Ok(mk(n));
            }
        }
        Err(Error::input(format!("unknown rule id {id:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct RuleReport {
    pub rule: String,
    pub holds: bool,
    pub counterexample: Option<String>,
    pub instances_checked: u64,
}

/// f tabulated over valuation-set masks: fm[x] = f(X) for every subset x.
struct MaskTable {
    n: usize,
    fm: Vec<u64>,
}

fn build_table(f: &ChoiceFunction, lang: &Language) -> Result<MaskTable> {
    let n = lang.num_valuations();
    if f.num_elements() != n {
        return Err(Error::input(format!(
            "choice function has {} elements but the language has {} valuations",
            f.num_elements(),
            n
        )));
    }
    if n > 8 {
        return Err(Error::resource(
            "exhaustive rule checking is limited to 3 variables; use the sampled checker",
        ));
    }
    let mut fm = vec![0u64; 1 << n];
    for mask in 0..(1u64 << n) {
        let x = Bits::from_mask(n, mask);
        if !f.contains(&x) {
            return Err(Error::contract(format!(
                "f must be defined on every definable model set; missing {}",
                f.set_name(&x)
            )));
        }
        fm[mask as usize] = f.value(&x)?.mask64();
    }
    Ok(MaskTable { n, fm })
}

fn formula_of(lang: &Language, mask: u64) -> Formula {
    let n = lang.num_valuations();
    if mask == 0 {
        return Formula::parse("false").unwrap();
    }
    if mask == low_mask(n) {
        return Formula::parse("true").unwrap();
    }
    let mut out: Option<Formula> = None;
    for i in 0..n {
        if mask >> i & 1 == 1 {
            let m = minterm(lang, i);
            out = Some(match out {
                None => m,
                Some(acc) => Formula::or(acc, m),
            });
        }
    }
    out.unwrap()
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn theory_str(lang: &Language, mask: u64) -> String {
    let n = lang.num_valuations();
    format!("{}", crate::logic::theory_of(&ModelSet::from_bits(lang, Bits::from_mask(n, mask))))
}

fn formula_str(lang: &Language, mask: u64) -> String {
    format!("{}", formula_of(lang, mask))
}

/// Exhaustive check of one rule over all canonical theories (one per set
/// of valuations) of a language with at most 3 variables.
pub fn check_logical_rule(
    f: &ChoiceFunction,
    lang: &Language,
    rule: LogRule,
) -> Result<RuleReport> {
    let t = build_table(f, lang)?;
    let total = 1u64 << t.n;
    let masks = || 0..total;
    let mut checked = 0u64;
    let mut cex: Option<String> = None;

    macro_rules! fail {
        ($($fmt:tt)*) => {{ cex = Some(format!($($fmt)*)); }};
    }

    match rule {
        // alpha |~ beta forbids alpha |~ ~beta, for consistent alpha.
        // (An inconsistent alpha entails everything even classically.)
        LogRule::And => {
            'go: for x in masks() {
                if x == 0 {
                    continue;
                }
                for b in masks() {
                    checked += 1;
                    let fx = t.fm[x as usize];
                    if fx & !b == 0 && fx & !(!b & low_mask(t.n)) == 0 {
                        fail!(
                            "alpha = {}; beta = {}",
                            formula_str(lang, x),
                            formula_str(lang, b)
                        );
                        break 'go;
                    }
                }
            }
        }
        // With premises f(X) ⊆ M(beta_i), the negated disjunction has model
        // set disjoint from the intersection of the M(beta_i), which
        // contains f(X); so a violation forces f(X) = ∅, and conversely
        // beta_i := false violates the rule then. The loop below therefore
        // checks only the emptiness core and reports that witness.
        LogRule::AndN(_) => {
            for x in masks() {
                if x == 0 {
                    continue;
                }
                checked += 1;
                if t.fm[x as usize] == 0 {
                    fail!(
                        "alpha = {}; every beta_i = false (alpha |~ false, so alpha |~ the \
                         disjunction of negations)",
                        formula_str(lang, x)
                    );
                    break;
                }
            }
        }
        // C(T) ∩ C(T') ⊆ C(T ∨ T'): every phi entailed on both sides is
        // entailed on the disjunction.
        LogRule::Or => {
            'go: for x in masks() {
                for y in masks() {
                    let fu = t.fm[(x | y) as usize];
                    for m in masks() {
                        checked += 1;
                        if t.fm[x as usize] & !m == 0
                            && t.fm[y as usize] & !m == 0
                            && fu & !m != 0
                        {
                            fail!(
                                "T = {}; T' = {}; phi = {}",
                                theory_str(lang, x),
                                theory_str(lang, y),
                                formula_str(lang, m)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // C(T) ∩ cl(T') ⊆ C(T ∨ T').
        LogRule::WOr => {
            'go: for x in masks() {
                for y in masks() {
                    let fu = t.fm[(x | y) as usize];
                    for m in masks() {
                        checked += 1;
                        if t.fm[x as usize] & !m == 0 && y & !m == 0 && fu & !m != 0 {
                            fail!(
                                "T = {}; T' = {}; phi = {}",
                                theory_str(lang, x),
                                theory_str(lang, y),
                                formula_str(lang, m)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // Like OR but only for T, T' jointly inconsistent.
        LogRule::DisjOr => {
            'go: for x in masks() {
                for y in masks() {
                    if x & y != 0 {
                        continue;
                    }
                    let fu = t.fm[(x | y) as usize];
                    for m in masks() {
                        checked += 1;
                        if t.fm[x as usize] & !m == 0
                            && t.fm[y as usize] & !m == 0
                            && fu & !m != 0
                        {
                            fail!(
                                "T = {}; T' = {}; phi = {}",
                                theory_str(lang, x),
                                theory_str(lang, y),
                                formula_str(lang, m)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // The relation only sees model sets, so logically equivalent
        // premises get identical consequences by construction; checked on
        // two syntactic presentations of each set.
        LogRule::Lle => {
            for x in masks() {
                checked += 1;
                let phi = formula_of(lang, x);
                let psi = !!phi.clone();
                let mx = crate::logic::models_of_phi(lang, &phi)?.bits().mask64();
                let my = crate::logic::models_of_phi(lang, &psi)?.bits().mask64();
                if t.fm[mx as usize] != t.fm[my as usize] {
                    fail!("alpha = {}; alpha' = {}", phi, psi);
                    break;
                }
            }
        }
        // alpha |~ beta and beta ⊢ beta' give alpha |~ beta'.
        LogRule::Rw => {
            'go: for x in masks() {
                for b in masks() {
                    if t.fm[x as usize] & !b != 0 {
                        continue;
                    }
                    for b2 in masks() {
                        checked += 1;
                        if b & !b2 == 0 && t.fm[x as usize] & !b2 != 0 {
                            fail!(
                                "alpha = {}; beta = {}; beta' = {}",
                                formula_str(lang, x),
                                formula_str(lang, b),
                                formula_str(lang, b2)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // C(T) is classically closed: the intersection of all definable
        // supersets of f(M(T)) is f(M(T)) itself.
        LogRule::Ccl => {
            for x in masks() {
                checked += 1;
                let fx = t.fm[x as usize];
                let mut meet = low_mask(t.n);
                for m in masks() {
                    if fx & !m == 0 {
                        meet &= m;
                    }
                }
                if meet != fx {
                    fail!("T = {}", theory_str(lang, x));
                    break;
                }
            }
        }
        // cl(T) ⊆ C(T).
        LogRule::Sc => {
            'go: for x in masks() {
                for m in masks() {
                    checked += 1;
                    if x & !m == 0 && t.fm[x as usize] & !m != 0 {
                        fail!("T = {}; phi = {}", theory_str(lang, x), formula_str(lang, m));
                        break 'go;
                    }
                }
            }
        }
        // alpha |~ alpha.
        LogRule::Ref => {
            for x in masks() {
                checked += 1;
                if t.fm[x as usize] & !x != 0 {
                    fail!("alpha = {}", formula_str(lang, x));
                    break;
                }
            }
        }
        // T |~ false only for inconsistent T.
        LogRule::Cp => {
            for x in masks() {
                checked += 1;
                if t.fm[x as usize] == 0 && x != 0 {
                    fail!("T = {}", theory_str(lang, x));
                    break;
                }
            }
        }
        // C(T ∪ T') ⊆ cl(C(T) ∪ T'): phi ranges over the consequences of
        // the combined theory.
        LogRule::Pr => {
            'go: for x in masks() {
                for y in masks() {
                    let fi = t.fm[(x & y) as usize];
                    let bound = t.fm[x as usize] & y;
                    for m in masks() {
                        checked += 1;
                        if fi & !m == 0 && bound & !m != 0 {
                            fail!(
                                "T = {}; T' = {}; phi = {}",
                                theory_str(lang, x),
                                theory_str(lang, y),
                                formula_str(lang, m)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // T ⊆ cl(T') ⊆ C(T) gives C(T') ⊆ C(T); in model sets, the
        // premises read M(T') ⊆ M(T) and f(M(T)) ⊆ M(T').
        LogRule::Cut => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    let fx = t.fm[x as usize];
                    if y & !x == 0 && fx & !y == 0 && fx & !t.fm[y as usize] != 0 {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Same premises, reversed conclusion C(T) ⊆ C(T').
        LogRule::Cm => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    let fx = t.fm[x as usize];
                    if y & !x == 0 && fx & !y == 0 && t.fm[y as usize] & !fx != 0 {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // With premises f(X) ⊆ M(beta_i), the conjunction
        // alpha ∧ beta_1 ∧ .. ∧ beta_{n-1} keeps every beta's models above
        // f(X) ∩ M(alpha), so classical inconsistency with beta_n forces
        // f(X) ∩ X = ∅; conversely beta_i := the formula of f(X) then
        // violates the rule. Only that core is enumerated.
        LogRule::CmN(_) => {
            for x in masks() {
                if x == 0 {
                    continue;
                }
                checked += 1;
                let fx = t.fm[x as usize];
                if fx & x == 0 {
                    fail!(
                        "alpha = {}; every beta_i = {} (premises hold, conjunction \
                         classically entails the negation)",
                        formula_str(lang, x),
                        formula_str(lang, fx)
                    );
                    break;
                }
            }
        }
        // T |~ alpha and T |~ beta give T ∪ {alpha} |~ beta.
        LogRule::ResM => {
            'go: for x in masks() {
                for a in masks() {
                    let fx = t.fm[x as usize];
                    if fx & !a != 0 {
                        continue;
                    }
                    for b in masks() {
                        checked += 1;
                        if fx & !b == 0 && t.fm[(x & a) as usize] & !b != 0 {
                            fail!(
                                "T = {}; alpha = {}; beta = {}",
                                theory_str(lang, x),
                                formula_str(lang, a),
                                formula_str(lang, b)
                            );
                            break 'go;
                        }
                    }
                }
            }
        }
        // Cumulativity: both CUT and CM.
        LogRule::Cum => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    let fx = t.fm[x as usize];
                    if y & !x == 0 && fx & !y == 0 && t.fm[y as usize] != fx {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // T ⊆ C(T') and T' ⊆ C(T) give C(T) = C(T'); in model sets the
        // premises read f(M(T')) ⊆ M(T) and f(M(T)) ⊆ M(T').
        LogRule::SubSup => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if t.fm[y as usize] & !x == 0
                        && t.fm[x as usize] & !y == 0
                        && t.fm[x as usize] != t.fm[y as usize]
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Con(T ∪ C(T')) and T ⊢ T' give cl(C(T') ∪ T) ⊆ C(T).
        LogRule::RatM => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if x & t.fm[y as usize] != 0
                        && x & !y == 0
                        && t.fm[x as usize] & !(t.fm[y as usize] & x) != 0
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Same premises, full equality C(T) = cl(C(T') ∪ T).
        LogRule::RatMEq => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if x & t.fm[y as usize] != 0
                        && x & !y == 0
                        && t.fm[x as usize] != t.fm[y as usize] & x
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Con(C(T') ∪ T) gives C(T ∪ T') = cl(C(T') ∪ T).
        LogRule::EqPrime => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if t.fm[y as usize] & x != 0
                        && t.fm[(x & y) as usize] != t.fm[y as usize] & x
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // C(T ∨ T') is C(T), C(T'), or C(T) ∩ C(T').
        LogRule::Par => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    let fu = t.fm[(x | y) as usize];
                    let fx = t.fm[x as usize];
                    let fy = t.fm[y as usize];
                    if fu != fx && fu != fy && fu != fx | fy {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Con(C(T') ∪ T) and ¬Con(C(T') ∪ C(T)) force ¬Con(C(T ∨ T') ∪ T').
        LogRule::CupRule => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if t.fm[y as usize] & x != 0
                        && t.fm[y as usize] & t.fm[x as usize] == 0
                        && t.fm[(x | y) as usize] & y != 0
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
        // Same premises force C(T ∨ T') = C(T).
        LogRule::CupPrime => {
            'go: for x in masks() {
                for y in masks() {
                    checked += 1;
                    if t.fm[y as usize] & x != 0
                        && t.fm[y as usize] & t.fm[x as usize] == 0
                        && t.fm[(x | y) as usize] != t.fm[x as usize]
                    {
                        fail!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y));
                        break 'go;
                    }
                }
            }
        }
    }

    Ok(RuleReport {
        rule: rule.id(),
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}

/// Seeded spot-check of one rule for larger languages or partial domains:
/// instances are drawn at random and skipped when the function is not
/// defined on every set the rule mentions.
pub fn check_logical_rule_sampled(
    f: &ChoiceFunction,
    lang: &Language,
    rule: LogRule,
    seed: u64,
    samples: u64,
) -> Result<RuleReport> {
    use rand::{Rng, SeedableRng};
    let n = lang.num_valuations();
    if f.num_elements() != n {
        return Err(Error::input(format!(
            "choice function has {} elements but the language has {} valuations",
            f.num_elements(),
            n
        )));
    }
    if n > 64 {
        return Err(Error::resource("sampled rule checking is limited to 6 variables"));
    }
    if f.domain().is_empty() {
        return Err(Error::input("empty domain"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dom = f.domain();
    let val = |x: &Bits| -> Option<u64> {
        if f.contains(x) {
            Some(f.value(x).unwrap().mask64())
        } else {
            None
        }
    };
    let mut checked = 0u64;
    let mut cex = None;
    let mut draws = 0u64;
    while draws < samples && cex.is_none() {
        draws += 1;
        let xb = &dom[rng.gen_range(0..dom.len())];
        let yb = &dom[rng.gen_range(0..dom.len())];
        let m = rng.gen::<u64>() & low_mask(n);
        let x = xb.mask64();
        let y = yb.mask64();
        let (fx, fy) = match (val(xb), val(yb)) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        let fu = val(&xb.union(yb));
        let fi = val(&xb.intersect(yb));
        let mut fail = |msg: String| cex = Some(msg);
        checked += 1;
        match rule {
            LogRule::And | LogRule::AndN(_) => {
                if x != 0 && fx == 0 {
                    fail(format!("alpha = {}", theory_str(lang, x)));
                }
            }
            LogRule::CmN(_) => {
                if x != 0 && fx & x == 0 {
                    fail(format!("alpha = {}", theory_str(lang, x)));
                }
            }
            LogRule::Or => {
                if let Some(fu) = fu {
                    if fx & !m == 0 && fy & !m == 0 && fu & !m != 0 {
                        fail(format!(
                            "T = {}; T' = {}; phi = {}",
                            theory_str(lang, x),
                            theory_str(lang, y),
                            formula_str(lang, m)
                        ));
                    }
                }
            }
            LogRule::WOr => {
                if let Some(fu) = fu {
                    if fx & !m == 0 && y & !m == 0 && fu & !m != 0 {
                        fail(format!(
                            "T = {}; T' = {}; phi = {}",
                            theory_str(lang, x),
                            theory_str(lang, y),
                            formula_str(lang, m)
                        ));
                    }
                }
            }
            LogRule::DisjOr => {
                if let Some(fu) = fu {
                    if x & y == 0 && fx & !m == 0 && fy & !m == 0 && fu & !m != 0 {
                        fail(format!(
                            "T = {}; T' = {}; phi = {}",
                            theory_str(lang, x),
                            theory_str(lang, y),
                            formula_str(lang, m)
                        ));
                    }
                }
            }
            LogRule::Lle | LogRule::Ccl => {
                // Both hold structurally for relations defined from model
                // sets; nothing to sample.
            }
            LogRule::Rw => {
                let b2 = rng.gen::<u64>() & low_mask(n);
                if fx & !m == 0 && m & !b2 == 0 && fx & !b2 != 0 {
                    fail(format!(
                        "alpha = {}; beta = {}; beta' = {}",
                        theory_str(lang, x),
                        formula_str(lang, m),
                        formula_str(lang, b2)
                    ));
                }
            }
            LogRule::Sc => {
                if x & !m == 0 && fx & !m != 0 {
                    fail(format!("T = {}; phi = {}", theory_str(lang, x), formula_str(lang, m)));
                }
            }
            LogRule::Ref => {
                if fx & !x != 0 {
                    fail(format!("alpha = {}", theory_str(lang, x)));
                }
            }
            LogRule::Cp => {
                if fx == 0 && x != 0 {
                    fail(format!("T = {}", theory_str(lang, x)));
                }
            }
            LogRule::Pr => {
                if let Some(fi) = fi {
                    if fi & !m == 0 && (fx & y) & !m != 0 {
                        fail(format!(
                            "T = {}; T' = {}; phi = {}",
                            theory_str(lang, x),
                            theory_str(lang, y),
                            formula_str(lang, m)
                        ));
                    }
                }
            }
            LogRule::Cut => {
                if y & !x == 0 && fx & !y == 0 && fx & !fy != 0 {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::Cm => {
                if y & !x == 0 && fx & !y == 0 && fy & !fx != 0 {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::ResM => {
                if let Some(fi) = fi {
                    // Here T' plays alpha: the premise is f(X) ⊆ M(T').
                    if fx & !y == 0 && fx & !m == 0 && fi & !m != 0 {
                        fail(format!(
                            "T = {}; alpha = {}; beta = {}",
                            theory_str(lang, x),
                            theory_str(lang, y),
                            formula_str(lang, m)
                        ));
                    }
                }
            }
            LogRule::Cum => {
                if y & !x == 0 && fx & !y == 0 && fy != fx {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::SubSup => {
                if fy & !x == 0 && fx & !y == 0 && fx != fy {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::RatM => {
                if x & fy != 0 && x & !y == 0 && fx & !(fy & x) != 0 {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::RatMEq => {
                if x & fy != 0 && x & !y == 0 && fx != fy & x {
                    fail(format!("T = {}; T' = {}", theory_str(lang, x), theory_str(lang, y)));
                }
            }
            LogRule::EqPrime => {
                if let Some(fi) = fi {
                    if fy & x != 0 && fi != fy & x {
                        fail(format!(
                            "T = {}; T' = {}",
                            theory_str(lang, x),
                            theory_str(lang, y)
                        ));
                    }
                }
            }
            LogRule::Par => {
                if let Some(fu) = fu {
                    if fu != fx && fu != fy && fu != fx | fy {
                        fail(format!(
                            "T = {}; T' = {}",
                            theory_str(lang, x),
                            theory_str(lang, y)
                        ));
                    }
                }
            }
            LogRule::CupRule => {
                if let Some(fu) = fu {
                    if fy & x != 0 && fy & fx == 0 && fu & y != 0 {
                        fail(format!(
                            "T = {}; T' = {}",
                            theory_str(lang, x),
                            theory_str(lang, y)
                        ));
                    }
                }
            }
            LogRule::CupPrime => {
                if let Some(fu) = fu {
                    if fy & x != 0 && fy & fx == 0 && fu != fx {
                        fail(format!(
                            "T = {}; T' = {}",
                            theory_str(lang, x),
                            theory_str(lang, y)
                        ));
                    }
                }
            }
        }
    }
    Ok(RuleReport {
        rule: rule.id(),
        holds: cex.is_none(),
        counterexample: cex,
        instances_checked: checked,
    })
}

/// Checks a list of rules; `ids` may name indexed families by element
/// (e.g. AND_3) or plain ids.
pub fn check_rules(
    f: &ChoiceFunction,
    lang: &Language,
    ids: &[&str],
) -> Result<Vec<RuleReport>> {
    let mut out = Vec::new();
    for id in ids {
        out.push(check_logical_rule(f, lang, LogRule::parse(id)?)?);
    }
    Ok(out)
}
