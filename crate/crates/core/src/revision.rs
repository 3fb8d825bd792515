//! Distance-based belief revision over finite point sets.
//!
//! A [`PseudoDistance`] is a plain value matrix; the operators compare
//! values and never add them, so no triangle inequality is assumed and
//! any strictly monotone rescaling yields the same operators. Collective
//! revision keeps the globally nearest points of the second set, the
//! individual variant keeps each source point's nearest targets.
//! Postulate checkers cover revision, contraction, and entrenchment,
//! quantifying the belief state over nonempty sets: the consistency
//! postulates are stated for real states, and revising the empty state
//! is degenerate. The interdefinability transforms verify the source's
//! postulate suite before translating and assert the target's suite
//! afterwards. `check_loop` decides the chain condition exactly by a
//! reachability search over ordered set pairs.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::cond::{ConditionReport, Instance};
use crate::error::{Error, Result};
use crate::logic::{models_of, theory_of, Language, ModelSet, Theory};

/// Hard cap on exhaustive postulate sweeps, measured in evaluated
/// instances. Beyond it the sampled checker is the supported route.
pub const SWEEP_INSTANCE_CAP: u64 = 4_194_304;

/// Extensional operator tables hold one entry per pair of subsets, so
/// their universes stay small.
pub const TABLE_POINT_CAP: usize = 8;

/// Loop checking enumerates ordered pairs of nonempty subsets.
pub const LOOP_POINT_CAP: usize = 5;

fn set_label(points: &[String], x: &Bits) -> String {
    let names: Vec<&str> = x.iter().map(|i| points[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn check_len(points: usize, x: &Bits) -> Result<()> {
    if x.len() != points {
        return Err(Error::input(format!(
            "set over {} points does not match the {points}-point universe",
            x.len()
        )));
    }
    Ok(())
}

/// Renders a counterexample against a point universe, e.g. `X={a}, A={a,b}`.
pub fn render_instance(points: &[String], inst: &Instance) -> String {
    let mut parts: Vec<String> = inst
        .sets
        .iter()
        .map(|(n, b)| format!("{n}={}", set_label(points, b)))
        .collect();
    for (n, e) in &inst.elems {
        parts.push(format!("{n}={}", points[*e]));
    }
    parts.join(", ")
}

/// Renders a report against a point universe in the shared
/// `name: holds (n instances)` / `name: fails at ...` shape.
pub fn render_report(points: &[String], rep: &ConditionReport) -> String {
    match &rep.counterexample {
        None => format!("{}: holds ({} instances)", rep.condition, rep.instances_checked),
        Some(i) => format!("{}: fails at {}", rep.condition, render_instance(points, i)),
    }
}

/// Value matrix over a finite named point set.
///
/// Values are naturals under their usual order. The flags are computed,
/// not declared: `symmetric` means the matrix equals its transpose,
/// `respects_identity` means zero appears exactly on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoDistance {
    points: Vec<String>,
    matrix: Vec<Vec<u64>>,
    respects_identity: bool,
    symmetric: bool,
}

impl PseudoDistance {
    pub fn new(points: Vec<String>, matrix: Vec<Vec<u64>>) -> Result<PseudoDistance> {
        let n = points.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::input(format!("distance matrix must be {n}x{n}")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(Error::input(format!("duplicate point name {}", points[i])));
                }
            }
        }
        let symmetric = (0..n).all(|i| (0..n).all(|j| matrix[i][j] == matrix[j][i]));
        let respects_identity = (0..n).all(|i| (0..n).all(|j| (matrix[i][j] == 0) == (i == j)));
        Ok(PseudoDistance { points, matrix, respects_identity, symmetric })
    }

    /// Bit-flip count between valuations of `num_vars` variables. Point
    /// `i` is valuation `i`; names are the assignment bits, variable 0
    /// leftmost. Symmetric and identity-respecting by construction.
    pub fn hamming(num_vars: usize) -> Result<PseudoDistance> {
        if num_vars > 8 {
            return Err(Error::resource(format!(
                "hamming distance over {num_vars} variables needs {} points, cap is 256",
                1u64 << num_vars
            )));
        }
        let n = 1usize << num_vars;
        let width = num_vars.max(1);
        let points: Vec<String> = (0..n)
            .map(|i| {
                (0..width)
                    .map(|j| if i >> j & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        let matrix: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| (i ^ j).count_ones() as u64).collect())
            .collect();
        PseudoDistance::new(points, matrix)
    }

    /// Parses a lower-triangular listing: one point per line, each line
    /// naming the point and giving its distances to all earlier points.
    /// The diagonal is zero and the matrix symmetric by construction.
    ///
    /// ```text
    /// a
    /// b 2
    /// x 4 4
    /// y 1 1 3
    /// ```
    pub fn parse_triangular(text: &str) -> Result<PseudoDistance> {
        let mut points: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let name = tokens.next().unwrap().to_string();
            let values: Vec<u64> = tokens
                .map(|t| {
                    t.parse::<u64>().map_err(|_| {
                        Error::input(format!("line {}: {t} is not a natural", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != points.len() {
                return Err(Error::input(format!(
                    "line {}: point {name} needs {} distances, got {}",
                    lineno + 1,
                    points.len(),
                    values.len()
                )));
            }
            points.push(name);
            rows.push(values);
        }
        if points.is_empty() {
            return Err(Error::input("distance listing has no points"));
        }
        let n = points.len();
        let mut matrix = vec![vec![0u64; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                matrix[i][j] = *v;
                matrix[j][i] = *v;
            }
        }
        PseudoDistance::new(points, matrix)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn value(&self, i: usize, j: usize) -> u64 {
        self.matrix[i][j]
    }

    pub fn respects_identity(&self) -> bool {
        self.respects_identity
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn set_name(&self, x: &Bits) -> String {
        set_label(&self.points, x)
    }

    /// Minimum value over the pair rectangle; `None` when either set is
    /// empty.
    pub fn set_distance(&self, a: &Bits, b: &Bits) -> Result<Option<u64>> {
        check_len(self.len(), a)?;
        check_len(self.len(), b)?;
        let mut best: Option<u64> = None;
        for x in a.iter() {
            for y in b.iter() {
                let v = self.matrix[x][y];
                best = Some(best.map_or(v, |cur| cur.min(v)));
            }
        }
        Ok(best)
    }
}

/// Nearest points of `b` seen from anywhere in `a`: the minimum of the
/// distance over `a`×`b` is taken globally and every witness in `b` is
/// kept. Empty inputs give the empty set.
pub fn collective_revise(a: &Bits, b: &Bits, d: &PseudoDistance) -> Result<Bits> {
    check_len(d.len(), a)?;
    check_len(d.len(), b)?;
    let mut out = Bits::empty(d.len());
    let Some(best) = d.set_distance(a, b)? else {
        return Ok(out);
    };
    for y in b.iter() {
        if a.iter().any(|x| d.value(x, y) == best) {
            out.insert(y);
        }
    }
    Ok(out)
}

/// Union over the source points of their individually nearest targets.
pub fn individual_revise(a: &Bits, b: &Bits, d: &PseudoDistance) -> Result<Bits> {
    check_len(d.len(), a)?;
    check_len(d.len(), b)?;
    let mut out = Bits::empty(d.len());
    for x in a.iter() {
        let Some(best) = b.iter().map(|y| d.value(x, y)).min() else {
            continue;
        };
        for y in b.iter() {
            if d.value(x, y) == best {
                out.insert(y);
            }
        }
    }
    Ok(out)
}

/// Revises one theory by another: the models of the result are the
/// collectively nearest models of `t2` seen from the models of `t`.
/// The distance must cover the language's valuations, point `i` being
/// valuation `i`.
pub fn revise_theories(lang: &Language, t: &Theory, t2: &Theory, d: &PseudoDistance) -> Result<Theory> {
    if d.len() != lang.num_valuations() {
        return Err(Error::input(format!(
            "distance covers {} points, the language has {} valuations",
            d.len(),
            lang.num_valuations()
        )));
    }
    let x = models_of(lang, t)?;
    let y = models_of(lang, t2)?;
    let revised = collective_revise(x.bits(), y.bits(), d)?;
    Ok(theory_of(&ModelSet::from_bits(lang, revised)))
}

/// Everything at least as close to `x` as `y` is: the points `z` with
/// d(x,{z}) ≤ d(x,y), distances between sets taken as pair minima.
pub fn umgebung(x: &Bits, y: &Bits, d: &PseudoDistance) -> Result<Bits> {
    check_len(d.len(), x)?;
    check_len(d.len(), y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::contract("umgebung needs nonempty sets"));
    }
    let bound = d.set_distance(x, y)?.expect("nonempty sets have a distance");
    let mut out = Bits::empty(d.len());
    for z in 0..d.len() {
        let dz = x.iter().map(|p| d.value(p, z)).min().expect("x is nonempty");
        if dz <= bound {
            out.insert(z);
        }
    }
    Ok(out)
}

/// Fallback rule for pairs absent from an operator table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableDefault {
    /// a|b = b.
    Second,
    /// a|b = a∩b when nonempty, otherwise b.
    Overlap,
    /// a|b = ∅.
    Empty,
}

impl TableDefault {
    fn parse(word: &str) -> Result<TableDefault> {
        match word {
            "second" => Ok(TableDefault::Second),
            "overlap" => Ok(TableDefault::Overlap),
            "empty" => Ok(TableDefault::Empty),
            other => Err(Error::input(format!("unknown table default {other}"))),
        }
    }
}

/// Explicit revision table: listed pairs map to their entries, all other
/// pairs follow the default rule. Entries are forced inside the second
/// argument, so every table realizes an operator with that shape.
#[derive(Clone, Debug)]
pub struct OpTable {
    points: Vec<String>,
    entries: BTreeMap<(u64, u64), Bits>,
    default: TableDefault,
}

impl OpTable {
    pub fn new(points: Vec<String>, default: TableDefault) -> Result<OpTable> {
        if points.len() > TABLE_POINT_CAP {
            return Err(Error::resource(format!(
                "operator table over {} points, cap is {TABLE_POINT_CAP}",
                points.len()
            )));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::input(format!("duplicate point name {}", points[i])));
                }
            }
        }
        Ok(OpTable { points, entries: BTreeMap::new(), default })
    }

    pub fn insert(&mut self, a: &Bits, b: &Bits, value: &Bits) -> Result<()> {
        let n = self.points.len();
        check_len(n, a)?;
        check_len(n, b)?;
        check_len(n, value)?;
        if !value.is_subset(b) {
            return Err(Error::contract(format!(
                "table value {} is not contained in the second argument {}",
                set_label(&self.points, value),
                set_label(&self.points, b)
            )));
        }
        let key = (a.mask64(), b.mask64());
        if self.entries.contains_key(&key) {
            return Err(Error::input(format!(
                "duplicate table entry for ({}, {})",
                set_label(&self.points, a),
                set_label(&self.points, b)
            )));
        }
        self.entries.insert(key, value.clone());
        Ok(())
    }

    /// Parses a listing of `(C,D) -> E` triples:
    ///
    /// ```text
    /// points x y z
    /// default second
    /// {y} {x,z} -> {x}
    /// ```
    ///
    /// The `points` line comes first; the `default` line is optional and
    /// defaults to `second`. Sets are brace literals over the point names.
    pub fn parse(text: &str) -> Result<OpTable> {
        let mut table: Option<OpTable> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err_at = |msg: String| Error::input(format!("line {}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix("points ") {
                if table.is_some() {
                    return Err(err_at("repeated points line".into()));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                table = Some(OpTable::new(names, TableDefault::Second)?);
                continue;
            }
            let Some(t) = table.as_mut() else {
                return Err(err_at("the points line must come first".into()));
            };
            if let Some(rest) = line.strip_prefix("default ") {
                t.default = TableDefault::parse(rest.trim())?;
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| err_at("expected {C} {D} -> {E}".into()))?;
            let value = parse_set(&t.points, rhs.trim()).map_err(|e| err_at(e.to_string()))?;
            let lhs_sets = split_set_literals(lhs.trim()).map_err(|e| err_at(e.to_string()))?;
            if lhs_sets.len() != 2 {
                return Err(err_at(format!("expected two sets before ->, got {}", lhs_sets.len())));
            }
            let a = parse_set(&t.points, &lhs_sets[0]).map_err(|e| err_at(e.to_string()))?;
            let b = parse_set(&t.points, &lhs_sets[1]).map_err(|e| err_at(e.to_string()))?;
            t.insert(&a, &b, &value)?;
        }
        table.ok_or_else(|| Error::input("operator listing has no points line"))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn apply(&self, a: &Bits, b: &Bits) -> Result<Bits> {
        let n = self.points.len();
        check_len(n, a)?;
        check_len(n, b)?;
        if let Some(v) = self.entries.get(&(a.mask64(), b.mask64())) {
            return Ok(v.clone());
        }
        Ok(match self.default {
            TableDefault::Second => b.clone(),
            TableDefault::Overlap => {
                let both = a.intersect(b);
                if both.is_empty() {
                    b.clone()
                } else {
                    both
                }
            }
            TableDefault::Empty => Bits::empty(n),
        })
    }
}

fn split_set_literals(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        if !rest.starts_with('{') {
            return Err(Error::input(format!("expected a set literal at {rest}")));
        }
        let end = rest
            .find('}')
            .ok_or_else(|| Error::input(format!("unterminated set literal at {rest}")))?;
        out.push(rest[..=end].to_string());
        rest = rest[end + 1..].trim_start();
    }
    Ok(out)
}

fn parse_set(points: &[String], literal: &str) -> Result<Bits> {
    let body = literal
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::input(format!("expected a set literal, got {literal}")))?;
    let mut out = Bits::empty(points.len());
    for name in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i = points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::input(format!("unknown point {name}")))?;
        out.insert(i);
    }
    Ok(out)
}

/// Binary revision operator: nearest-point selection for a distance, or
/// an explicit table. Either way the result sits inside the second
/// argument.
#[derive(Clone, Debug)]
pub enum RevisionOperator {
    Distance(PseudoDistance),
    Table(OpTable),
}

impl RevisionOperator {
    pub fn apply(&self, a: &Bits, b: &Bits) -> Result<Bits> {
        match self {
            RevisionOperator::Distance(d) => collective_revise(a, b, d),
            RevisionOperator::Table(t) => t.apply(a, b),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RevisionOperator::Distance(d) => d.len(),
            RevisionOperator::Table(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &[String] {
        match self {
            RevisionOperator::Distance(d) => d.points(),
            RevisionOperator::Table(t) => t.points(),
        }
    }

    pub fn set_name(&self, x: &Bits) -> String {
        set_label(self.points(), x)
    }
}

fn require_table_cap(points: &[String], what: &str) -> Result<()> {
    if points.len() > TABLE_POINT_CAP {
        return Err(Error::resource(format!(
            "{what} over {} points needs {} entries, cap is {}",
            points.len(),
            1u128 << (2 * points.len()),
            1u64 << (2 * TABLE_POINT_CAP)
        )));
    }
    Ok(())
}

/// Total contraction operator stored extensionally: one value per pair
/// of subsets.
#[derive(Clone, Debug)]
pub struct ContractionOperator {
    points: Vec<String>,
    values: Vec<Bits>,
}

impl ContractionOperator {
    pub fn from_fn(
        points: Vec<String>,
        mut f: impl FnMut(&Bits, &Bits) -> Result<Bits>,
    ) -> Result<ContractionOperator> {
        require_table_cap(&points, "contraction table")?;
        let m = points.len();
        let mut values = Vec::with_capacity(1 << (2 * m));
        for a_mask in 0..1u64 << m {
            let a = Bits::from_mask(m, a_mask);
            for b_mask in 0..1u64 << m {
                let b = Bits::from_mask(m, b_mask);
                let v = f(&a, &b)?;
                check_len(m, &v)?;
                values.push(v);
            }
        }
        Ok(ContractionOperator { points, values })
    }

    pub fn apply(&self, a: &Bits, b: &Bits) -> Result<Bits> {
        let m = self.points.len();
        check_len(m, a)?;
        check_len(m, b)?;
        Ok(self.values[((a.mask64() << m) | b.mask64()) as usize].clone())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn set_name(&self, x: &Bits) -> String {
        set_label(&self.points, x)
    }
}

/// Revision behavior of one fixed belief state: A ↦ x|A.
#[derive(Clone, Debug)]
pub struct RevisionRow {
    points: Vec<String>,
    x: Bits,
    values: Vec<Bits>,
}

/// Contraction behavior of one fixed belief state: A ↦ x⊖A.
#[derive(Clone, Debug)]
pub struct ContractionRow {
    points: Vec<String>,
    x: Bits,
    values: Vec<Bits>,
}

macro_rules! row_impl {
    ($ty:ident) => {
        impl $ty {
            pub fn from_fn(
                points: Vec<String>,
                x: Bits,
                mut f: impl FnMut(&Bits) -> Result<Bits>,
            ) -> Result<$ty> {
                require_table_cap(&points, "operator row")?;
                let m = points.len();
                check_len(m, &x)?;
                let mut values = Vec::with_capacity(1 << m);
                for a_mask in 0..1u64 << m {
                    let a = Bits::from_mask(m, a_mask);
                    let v = f(&a)?;
                    check_len(m, &v)?;
                    values.push(v);
                }
                Ok($ty { points, x, values })
            }

            pub fn value(&self, a: &Bits) -> Result<Bits> {
                check_len(self.points.len(), a)?;
                Ok(self.values[a.mask64() as usize].clone())
            }

            /// The fixed belief state the row describes.
            pub fn fixed_set(&self) -> &Bits {
                &self.x
            }

            pub fn len(&self) -> usize {
                self.points.len()
            }

            pub fn is_empty(&self) -> bool {
                self.points.is_empty()
            }

            pub fn points(&self) -> &[String] {
                &self.points
            }
        }
    };
}

row_impl!(RevisionRow);
row_impl!(ContractionRow);

/// Entrenchment order over subsets relative to one fixed belief state.
#[derive(Clone, Debug)]
pub struct EntrenchmentRelation {
    points: Vec<String>,
    x: Bits,
    le: Vec<bool>,
}

impl EntrenchmentRelation {
    pub fn from_fn(
        points: Vec<String>,
        x: Bits,
        mut f: impl FnMut(&Bits, &Bits) -> Result<bool>,
    ) -> Result<EntrenchmentRelation> {
        require_table_cap(&points, "entrenchment relation")?;
        let m = points.len();
        check_len(m, &x)?;
        let mut le = Vec::with_capacity(1 << (2 * m));
        for a_mask in 0..1u64 << m {
            let a = Bits::from_mask(m, a_mask);
            for b_mask in 0..1u64 << m {
                let b = Bits::from_mask(m, b_mask);
                le.push(f(&a, &b)?);
            }
        }
        Ok(EntrenchmentRelation { points, x, le })
    }

    /// Whether A is at most as entrenched as B.
    pub fn holds(&self, a: &Bits, b: &Bits) -> Result<bool> {
        let m = self.points.len();
        check_len(m, a)?;
        check_len(m, b)?;
        Ok(self.le[((a.mask64() << m) | b.mask64()) as usize])
    }

    pub fn fixed_set(&self) -> &Bits {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }
}

/// What a postulate check runs against.
#[derive(Clone, Copy)]
pub enum AgmSubject<'a> {
    /// Total revision operator; the belief state is quantified.
    Revision(&'a RevisionOperator),
    /// Total contraction operator; the belief state is quantified.
    Contraction(&'a ContractionOperator),
    /// One belief state's revision row.
    RevisionAt(&'a RevisionRow),
    /// One belief state's contraction row.
    ContractionAt(&'a ContractionRow),
    /// Entrenchment order, already relative to its state.
    Entrenchment(&'a EntrenchmentRelation),
}

impl AgmSubject<'_> {
    pub fn len(&self) -> usize {
        match self {
            AgmSubject::Revision(r) => r.len(),
            AgmSubject::Contraction(c) => c.len(),
            AgmSubject::RevisionAt(r) => r.len(),
            AgmSubject::ContractionAt(c) => c.len(),
            AgmSubject::Entrenchment(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &[String] {
        match self {
            AgmSubject::Revision(r) => r.points(),
            AgmSubject::Contraction(c) => c.points(),
            AgmSubject::RevisionAt(r) => r.points(),
            AgmSubject::ContractionAt(c) => c.points(),
            AgmSubject::Entrenchment(e) => e.points(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PostulateId {
    Rev(u8),
    Con(u8),
    Ee(u8),
    /// Closure and syntax-equivalence postulates hold by construction
    /// for extensional operators; they report success over zero
    /// instances.
    TrivialRev(u8),
    TrivialCon(u8),
}

fn parse_postulate(which: &str) -> Result<(PostulateId, String)> {
    let cleaned: String = which
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .chars()
        .map(|c| match c {
            '⊖' => '-',
            '∗' => '*',
            '∣' => '|',
            c => c,
        })
        .collect();
    let unknown = || Error::input(format!("unknown postulate id {which}"));
    if let Some(num) = cleaned.strip_prefix("EE") {
        let k: u8 = num.parse().map_err(|_| unknown())?;
        if (1..=5).contains(&k) {
            return Ok((PostulateId::Ee(k), format!("(EE{k})")));
        }
        return Err(unknown());
    }
    let (family, num) = match cleaned.get(..2) {
        Some(f) => (f, &cleaned[2..]),
        None => return Err(unknown()),
    };
    let k: u8 = num.parse().map_err(|_| unknown())?;
    match family {
        "X|" if matches!(k, 2..=5 | 7 | 8) => Ok((PostulateId::Rev(k), format!("(X|{k})"))),
        "X-" if matches!(k, 2..=5 | 7 | 8) => Ok((PostulateId::Con(k), format!("(X⊖{k})"))),
        "K*" if matches!(k, 2..=5 | 7 | 8) => Ok((PostulateId::Rev(k), format!("(K*{k})"))),
        "K-" if matches!(k, 2..=5 | 7 | 8) => Ok((PostulateId::Con(k), format!("(K-{k})"))),
        "K*" if k == 1 || k == 6 => Ok((PostulateId::TrivialRev(k), format!("(K*{k})"))),
        "K-" if k == 1 || k == 6 => Ok((PostulateId::TrivialCon(k), format!("(K-{k})"))),
        _ => Err(unknown()),
    }
}

fn fail(condition: &str, checked: u64, sets: Vec<(&'static str, Bits)>) -> ConditionReport {
    ConditionReport {
        condition: condition.to_string(),
        holds: false,
        counterexample: Some(Instance { sets, elems: Vec::new() }),
        instances_checked: checked,
    }
}

fn pass(condition: &str, checked: u64) -> ConditionReport {
    ConditionReport {
        condition: condition.to_string(),
        holds: true,
        counterexample: None,
        instances_checked: checked,
    }
}

/// One revision-postulate instance; `fxa` is x|a, recomputed here only
/// for the ternary postulates' second application.
fn rev_instance_ok(
    rev: &mut dyn FnMut(&Bits, &Bits) -> Result<Bits>,
    k: u8,
    x: &Bits,
    a: &Bits,
    b: Option<&Bits>,
    fxa: &Bits,
) -> Result<bool> {
    Ok(match k {
        2 => fxa.is_subset(a),
        3 => x.intersect(a).is_subset(fxa),
        4 => x.intersect(a).is_empty() || fxa.is_subset(&x.intersect(a)),
        5 => !fxa.is_empty() || a.is_empty(),
        7 => {
            let b = b.expect("ternary postulate");
            fxa.intersect(b).is_subset(&rev(x, &a.intersect(b))?)
        }
        8 => {
            let b = b.expect("ternary postulate");
            let fab = fxa.intersect(b);
            fab.is_empty() || rev(x, &a.intersect(b))?.is_subset(&fab)
        }
        _ => unreachable!("revision postulates are 2..=5, 7, 8"),
    })
}

fn con_instance_ok(
    con: &mut dyn FnMut(&Bits, &Bits) -> Result<Bits>,
    k: u8,
    x: &Bits,
    a: &Bits,
    b: Option<&Bits>,
    cxa: &Bits,
) -> Result<bool> {
    let full = Bits::full(x.len());
    Ok(match k {
        2 => x.is_subset(cxa),
        3 => x.is_subset(a) || cxa == x,
        4 => *a == full || !cxa.is_subset(a),
        5 => cxa.intersect(a).is_subset(x),
        7 => {
            let b = b.expect("ternary postulate");
            con(x, &a.intersect(b))?.is_subset(&cxa.union(&con(x, b)?))
        }
        8 => {
            let b = b.expect("ternary postulate");
            let cab = con(x, &a.intersect(b))?;
            cab.is_subset(a) || cxa.is_subset(&cab)
        }
        _ => unreachable!("contraction postulates are 2..=5, 7, 8"),
    })
}

fn is_ternary(k: u8) -> bool {
    k == 7 || k == 8
}

/// Belief states the sweep ranges over: every nonempty subset, or the
/// one state of a row.
enum States<'a> {
    AllNonempty,
    Fixed(&'a Bits),
}

impl States<'_> {
    fn count(&self, m: usize) -> u64 {
        match self {
            States::AllNonempty => (1u64 << m) - 1,
            States::Fixed(_) => 1,
        }
    }

    fn for_each(&self, m: usize, mut f: impl FnMut(&Bits) -> Result<bool>) -> Result<bool> {
        match self {
            States::AllNonempty => {
                for mask in 1..1u64 << m {
                    if !f(&Bits::from_mask(m, mask))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            States::Fixed(x) => f(x),
        }
    }
}

fn sweep_pair_op(
    name: &str,
    m: usize,
    states: States<'_>,
    k: u8,
    contraction: bool,
    op: &mut dyn FnMut(&Bits, &Bits) -> Result<Bits>,
) -> Result<ConditionReport> {
    let per_state = if is_ternary(k) { 1u64 << (2 * m) } else { 1u64 << m };
    let total = states.count(m).saturating_mul(per_state);
    if total > SWEEP_INSTANCE_CAP {
        return Err(Error::resource(format!(
            "postulate sweep needs {total} instances, cap is {SWEEP_INSTANCE_CAP}"
        )));
    }
    let mut checked = 0u64;
    let mut cex: Option<Vec<(&'static str, Bits)>> = None;
    states.for_each(m, |x| {
        for a_mask in 0..1u64 << m {
            let a = Bits::from_mask(m, a_mask);
            let fxa = op(x, &a)?;
            if is_ternary(k) {
                for b_mask in 0..1u64 << m {
                    let b = Bits::from_mask(m, b_mask);
                    checked += 1;
                    let ok = if contraction {
                        con_instance_ok(op, k, x, &a, Some(&b), &fxa)?
                    } else {
                        rev_instance_ok(op, k, x, &a, Some(&b), &fxa)?
                    };
                    if !ok {
                        cex = Some(vec![("X", x.clone()), ("A", a.clone()), ("B", b)]);
                        return Ok(false);
                    }
                }
            } else {
                checked += 1;
                let ok = if contraction {
                    con_instance_ok(op, k, x, &a, None, &fxa)?
                } else {
                    rev_instance_ok(op, k, x, &a, None, &fxa)?
                };
                if !ok {
                    cex = Some(vec![("X", x.clone()), ("A", a.clone())]);
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    Ok(match cex {
        Some(sets) => fail(name, checked, sets),
        None => pass(name, checked),
    })
}

fn sweep_entrenchment(name: &str, e: &EntrenchmentRelation, k: u8) -> Result<ConditionReport> {
    let m = e.len();
    let n = 1u64 << m;
    let total = match k {
        1 => n * n * n,
        _ => n * n,
    };
    if total > SWEEP_INSTANCE_CAP {
        return Err(Error::resource(format!(
            "postulate sweep needs {total} instances, cap is {SWEEP_INSTANCE_CAP}"
        )));
    }
    let full = Bits::full(m);
    let mut checked = 0u64;
    for a_mask in 0..n {
        let a = Bits::from_mask(m, a_mask);
        match k {
            1 => {
                for b_mask in 0..n {
                    let b = Bits::from_mask(m, b_mask);
                    if !e.holds(&a, &b)? {
                        checked += n;
                        continue;
                    }
                    for c_mask in 0..n {
                        let c = Bits::from_mask(m, c_mask);
                        checked += 1;
                        if e.holds(&b, &c)? && !e.holds(&a, &c)? {
                            return Ok(fail(
                                name,
                                checked,
                                vec![("A", a), ("B", b), ("C", c)],
                            ));
                        }
                    }
                }
            }
            2 => {
                for b_mask in 0..n {
                    let b = Bits::from_mask(m, b_mask);
                    checked += 1;
                    if a.is_subset(&b) && !e.holds(&a, &b)? {
                        return Ok(fail(name, checked, vec![("A", a), ("B", b)]));
                    }
                }
            }
            3 => {
                for b_mask in 0..n {
                    let b = Bits::from_mask(m, b_mask);
                    checked += 1;
                    let both = a.intersect(&b);
                    if !e.holds(&a, &both)? && !e.holds(&b, &both)? {
                        return Ok(fail(name, checked, vec![("A", a), ("B", b)]));
                    }
                }
            }
            4 => {
                if e.fixed_set().is_empty() {
                    continue;
                }
                let below_all = (0..n).try_fold(true, |acc, b_mask| {
                    Ok::<bool, Error>(acc && e.holds(&a, &Bits::from_mask(m, b_mask))?)
                })?;
                checked += 1;
                if !e.fixed_set().is_subset(&a) != below_all {
                    return Ok(fail(name, checked, vec![("A", a)]));
                }
            }
            5 => {
                let above_all = (0..n).try_fold(true, |acc, b_mask| {
                    Ok::<bool, Error>(acc && e.holds(&Bits::from_mask(m, b_mask), &a)?)
                })?;
                checked += 1;
                if above_all && a != full {
                    return Ok(fail(name, checked, vec![("A", a)]));
                }
            }
            _ => unreachable!("entrenchment postulates are 1..=5"),
        }
    }
    Ok(pass(name, checked))
}

type PairOp<'a> = Box<dyn FnMut(&Bits, &Bits) -> Result<Bits> + 'a>;

fn subject_op<'a>(subject: &'a AgmSubject<'a>, contraction: bool) -> Option<(States<'a>, PairOp<'a>)> {
    match (subject, contraction) {
        (AgmSubject::Revision(r), false) => {
            Some((States::AllNonempty, Box::new(move |x, a| r.apply(x, a))))
        }
        (AgmSubject::Contraction(c), true) => {
            Some((States::AllNonempty, Box::new(move |x, a| c.apply(x, a))))
        }
        (AgmSubject::RevisionAt(r), false) => {
            Some((States::Fixed(r.fixed_set()), Box::new(move |_, a| r.value(a))))
        }
        (AgmSubject::ContractionAt(c), true) => {
            Some((States::Fixed(c.fixed_set()), Box::new(move |_, a| c.value(a))))
        }
        _ => None,
    }
}

/// Checks one rationality postulate exhaustively.
///
/// Ids: `X|2`..`X|8` without 6 for revision, `X-2`..`X-8` without 6 for
/// contraction, `EE1`..`EE5` for entrenchment. The syntactic aliases
/// `K*1`..`K*8` and `K-1`..`K-8` map to the same checks; their closure
/// and equivalence members (1 and 6) hold by construction for
/// extensional operators and report zero instances. The belief state
/// ranges over nonempty sets for total operators and is fixed for rows.
pub fn check_agm(subject: &AgmSubject<'_>, which: &str) -> Result<ConditionReport> {
    let (id, name) = parse_postulate(which)?;
    let mismatch = |need: &str| {
        Error::input(format!("postulate {name} needs {need}"))
    };
    match id {
        PostulateId::TrivialRev(_) => match subject {
            AgmSubject::Revision(_) | AgmSubject::RevisionAt(_) => Ok(pass(&name, 0)),
            _ => Err(mismatch("a revision operator")),
        },
        PostulateId::TrivialCon(_) => match subject {
            AgmSubject::Contraction(_) | AgmSubject::ContractionAt(_) => Ok(pass(&name, 0)),
            _ => Err(mismatch("a contraction operator")),
        },
        PostulateId::Rev(k) => {
            let (states, mut op) =
                subject_op(subject, false).ok_or_else(|| mismatch("a revision operator"))?;
            sweep_pair_op(&name, subject.len(), states, k, false, &mut op)
        }
        PostulateId::Con(k) => {
            let (states, mut op) =
                subject_op(subject, true).ok_or_else(|| mismatch("a contraction operator"))?;
            sweep_pair_op(&name, subject.len(), states, k, true, &mut op)
        }
        PostulateId::Ee(k) => match subject {
            AgmSubject::Entrenchment(e) => sweep_entrenchment(&name, e, k),
            _ => Err(mismatch("an entrenchment relation")),
        },
    }
}

/// Seeded random spot-check of one postulate; instances are drawn
/// uniformly, the state from nonempty sets. Same ids as [`check_agm`].
/// The report is deterministic in `(samples, seed)`.
pub fn check_agm_sampled(
    subject: &AgmSubject<'_>,
    which: &str,
    samples: u64,
    seed: u64,
) -> Result<ConditionReport> {
    let (id, name) = parse_postulate(which)?;
    let m = subject.len();
    let mismatch = |need: &str| Error::input(format!("postulate {name} needs {need}"));
    match id {
        PostulateId::TrivialRev(_) => {
            return match subject {
                AgmSubject::Revision(_) | AgmSubject::RevisionAt(_) => Ok(pass(&name, 0)),
                _ => Err(mismatch("a revision operator")),
            };
        }
        PostulateId::TrivialCon(_) => {
            return match subject {
                AgmSubject::Contraction(_) | AgmSubject::ContractionAt(_) => Ok(pass(&name, 0)),
                _ => Err(mismatch("a contraction operator")),
            };
        }
        _ => {}
    }
    if m == 0 {
        return Ok(pass(&name, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1u64 << m;
    let draw = |rng: &mut ChaCha8Rng| Bits::from_mask(m, rng.gen_range(0..n));
    match id {
        PostulateId::Rev(k) | PostulateId::Con(k) => {
            let contraction = matches!(id, PostulateId::Con(_));
            let (states, mut op) = subject_op(subject, contraction)
                .ok_or_else(|| mismatch(if contraction { "a contraction operator" } else { "a revision operator" }))?;
            for checked in 1..=samples {
                let x = match &states {
                    States::Fixed(x) => (*x).clone(),
                    States::AllNonempty => Bits::from_mask(m, rng.gen_range(1..n)),
                };
                let a = draw(&mut rng);
                let b = if is_ternary(k) { Some(draw(&mut rng)) } else { None };
                let fxa = op(&x, &a)?;
                let ok = if contraction {
                    con_instance_ok(&mut op, k, &x, &a, b.as_ref(), &fxa)?
                } else {
                    rev_instance_ok(&mut op, k, &x, &a, b.as_ref(), &fxa)?
                };
                if !ok {
                    let mut sets = vec![("X", x), ("A", a)];
                    if let Some(b) = b {
                        sets.push(("B", b));
                    }
                    return Ok(fail(&name, checked, sets));
                }
            }
            Ok(pass(&name, samples))
        }
        PostulateId::Ee(k) => {
            let AgmSubject::Entrenchment(e) = subject else {
                return Err(mismatch("an entrenchment relation"));
            };
            let full = Bits::full(m);
            for checked in 1..=samples {
                let a = draw(&mut rng);
                let ok = match k {
                    1 => {
                        let b = draw(&mut rng);
                        let c = draw(&mut rng);
                        let bad = e.holds(&a, &b)? && e.holds(&b, &c)? && !e.holds(&a, &c)?;
                        if bad {
                            return Ok(fail(&name, checked, vec![("A", a), ("B", b), ("C", c)]));
                        }
                        true
                    }
                    2 => {
                        let b = draw(&mut rng);
                        let bad = a.is_subset(&b) && !e.holds(&a, &b)?;
                        if bad {
                            return Ok(fail(&name, checked, vec![("A", a), ("B", b)]));
                        }
                        true
                    }
                    3 => {
                        let b = draw(&mut rng);
                        let both = a.intersect(&b);
                        let bad = !e.holds(&a, &both)? && !e.holds(&b, &both)?;
                        if bad {
                            return Ok(fail(&name, checked, vec![("A", a), ("B", b)]));
                        }
                        true
                    }
                    4 => {
                        if e.fixed_set().is_empty() {
                            true
                        } else {
                            let below_all = (0..n).try_fold(true, |acc, b_mask| {
                                Ok::<bool, Error>(acc && e.holds(&a, &Bits::from_mask(m, b_mask))?)
                            })?;
                            !e.fixed_set().is_subset(&a) == below_all
                        }
                    }
                    5 => {
                        let above_all = (0..n).try_fold(true, |acc, b_mask| {
                            Ok::<bool, Error>(acc && e.holds(&Bits::from_mask(m, b_mask), &a)?)
                        })?;
                        !above_all || a == full
                    }
                    _ => unreachable!("entrenchment postulates are 1..=5"),
                };
                if !ok {
                    return Ok(fail(&name, checked, vec![("A", a)]));
                }
            }
            Ok(pass(&name, samples))
        }
        PostulateId::TrivialRev(_) | PostulateId::TrivialCon(_) => unreachable!("handled above"),
    }
}

const REVISION_SUITE: [&str; 6] = ["X|2", "X|3", "X|4", "X|5", "X|7", "X|8"];
const CONTRACTION_SUITE: [&str; 6] = ["X-2", "X-3", "X-4", "X-5", "X-7", "X-8"];
const ENTRENCHMENT_SUITE: [&str; 5] = ["EE1", "EE2", "EE3", "EE4", "EE5"];

fn suite_ids(subject: &AgmSubject<'_>) -> &'static [&'static str] {
    match subject {
        AgmSubject::Revision(_) | AgmSubject::RevisionAt(_) => &REVISION_SUITE,
        AgmSubject::Contraction(_) | AgmSubject::ContractionAt(_) => &CONTRACTION_SUITE,
        AgmSubject::Entrenchment(_) => &ENTRENCHMENT_SUITE,
    }
}

/// Runs the subject's whole postulate suite, reporting each member.
pub fn check_suite(subject: &AgmSubject<'_>) -> Result<Vec<ConditionReport>> {
    suite_ids(subject).iter().map(|id| check_agm(subject, id)).collect()
}

fn require_suite(subject: &AgmSubject<'_>) -> Result<()> {
    for rep in check_suite(subject)? {
        if !rep.holds {
            let cex = rep.counterexample.as_ref().expect("failing report has a counterexample");
            return Err(Error::contract(format!(
                "source fails {} at {}",
                rep.condition,
                render_instance(subject.points(), cex)
            )));
        }
    }
    Ok(())
}

fn assert_suite(subject: &AgmSubject<'_>, what: &str) {
    for rep in check_suite(subject).expect("suite sweep stays in budget") {
        assert!(
            rep.holds,
            "{what} violates {} at {}",
            rep.condition,
            render_instance(subject.points(), rep.counterexample.as_ref().unwrap())
        );
    }
}

fn require_state(x: &Bits, what: &str) -> Result<()> {
    if x.is_empty() {
        return Err(Error::contract(format!("{what} needs a nonempty belief state")));
    }
    Ok(())
}

/// x⊖A := x ∪ (x|∁A), rowwise over all states. The source must satisfy
/// the revision postulates; the result then satisfies the contraction
/// postulates over nonempty states.
pub fn contraction_from_revision(r: &RevisionOperator) -> Result<ContractionOperator> {
    require_suite(&AgmSubject::Revision(r))?;
    let c = ContractionOperator::from_fn(r.points().to_vec(), |x, a| {
        Ok(x.union(&r.apply(x, &a.complement())?))
    })?;
    assert_suite(&AgmSubject::Contraction(&c), "derived contraction");
    Ok(c)
}

/// x|A := (x⊖∁A) ∩ A, rowwise over all states.
pub fn revision_from_contraction(c: &ContractionOperator) -> Result<RevisionOperator> {
    require_suite(&AgmSubject::Contraction(c))?;
    let m = c.len();
    let mut table = OpTable::new(c.points().to_vec(), TableDefault::Empty)?;
    for x_mask in 0..1u64 << m {
        let x = Bits::from_mask(m, x_mask);
        for a_mask in 0..1u64 << m {
            let a = Bits::from_mask(m, a_mask);
            let value = c.apply(&x, &a.complement())?.intersect(&a);
            table.insert(&x, &a, &value)?;
        }
    }
    let r = RevisionOperator::Table(table);
    assert_suite(&AgmSubject::Revision(&r), "derived revision");
    Ok(r)
}

/// A ≤ B :iff A,B = U or x⊖(A∩B) ⊄ A, relative to the state `x`.
pub fn entrenchment_from_contraction(
    c: &ContractionOperator,
    x: &Bits,
) -> Result<EntrenchmentRelation> {
    require_state(x, "an entrenchment relation")?;
    check_len(c.len(), x)?;
    require_suite(&AgmSubject::Contraction(c))?;
    let full = Bits::full(c.len());
    let e = EntrenchmentRelation::from_fn(c.points().to_vec(), x.clone(), |a, b| {
        Ok((*a == full && *b == full) || !c.apply(x, &a.intersect(b))?.is_subset(a))
    })?;
    assert_suite(&AgmSubject::Entrenchment(&e), "derived entrenchment");
    Ok(e)
}

/// x⊖A := x when A = U, otherwise the intersection of all B between x
/// and U with A strictly less entrenched than A∪B. Only the relation's
/// own state is determined, so the result is a row.
pub fn contraction_from_entrenchment(e: &EntrenchmentRelation) -> Result<ContractionRow> {
    require_state(e.fixed_set(), "contraction from entrenchment")?;
    require_suite(&AgmSubject::Entrenchment(e))?;
    let m = e.len();
    let full = Bits::full(m);
    let x = e.fixed_set().clone();
    let row = ContractionRow::from_fn(e.points().to_vec(), x.clone(), |a| {
        if *a == full {
            return Ok(x.clone());
        }
        let mut acc = full.clone();
        for b_mask in 0..1u64 << m {
            let b = Bits::from_mask(m, b_mask);
            if !x.is_subset(&b) {
                continue;
            }
            let ab = a.union(&b);
            if e.holds(a, &ab)? && !e.holds(&ab, a)? {
                acc = acc.intersect(&b);
            }
        }
        Ok(acc)
    })?;
    assert_suite(&AgmSubject::ContractionAt(&row), "derived contraction row");
    Ok(row)
}

/// x|A := (x⊖∁A) ∩ A at the row's fixed state.
pub fn revision_row_from_contraction_row(c: &ContractionRow) -> Result<RevisionRow> {
    require_state(c.fixed_set(), "revision from a contraction row")?;
    require_suite(&AgmSubject::ContractionAt(c))?;
    let row = RevisionRow::from_fn(c.points().to_vec(), c.fixed_set().clone(), |a| {
        Ok(c.value(&a.complement())?.intersect(a))
    })?;
    assert_suite(&AgmSubject::RevisionAt(&row), "derived revision row");
    Ok(row)
}

/// x⊖A := x ∪ (x|∁A) at the row's fixed state.
pub fn contraction_row_from_revision_row(r: &RevisionRow) -> Result<ContractionRow> {
    require_state(r.fixed_set(), "contraction from a revision row")?;
    require_suite(&AgmSubject::RevisionAt(r))?;
    let x = r.fixed_set().clone();
    let row = ContractionRow::from_fn(r.points().to_vec(), x.clone(), |a| {
        Ok(x.union(&r.value(&a.complement())?))
    })?;
    assert_suite(&AgmSubject::ContractionAt(&row), "derived contraction row");
    Ok(row)
}

/// Entrenchment read off a single contraction row at its own state.
pub fn entrenchment_from_contraction_row(c: &ContractionRow) -> Result<EntrenchmentRelation> {
    require_state(c.fixed_set(), "an entrenchment relation")?;
    require_suite(&AgmSubject::ContractionAt(c))?;
    let full = Bits::full(c.len());
    let e = EntrenchmentRelation::from_fn(c.points().to_vec(), c.fixed_set().clone(), |a, b| {
        Ok((*a == full && *b == full) || !c.value(&a.intersect(b))?.is_subset(a))
    })?;
    assert_suite(&AgmSubject::Entrenchment(&e), "derived entrenchment");
    Ok(e)
}

/// The three interdefinable belief-change representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeliefKind {
    Revision,
    Contraction,
    Entrenchment,
}

/// A belief-change object of any kind. Rows appear when a fixed-state
/// source (an entrenchment relation, or another row) cannot determine a
/// total operator.
#[derive(Clone, Debug)]
pub enum BeliefObject {
    Revision(RevisionOperator),
    Contraction(ContractionOperator),
    RevisionRow(RevisionRow),
    ContractionRow(ContractionRow),
    Entrenchment(EntrenchmentRelation),
}

impl BeliefObject {
    pub fn kind(&self) -> BeliefKind {
        match self {
            BeliefObject::Revision(_) | BeliefObject::RevisionRow(_) => BeliefKind::Revision,
            BeliefObject::Contraction(_) | BeliefObject::ContractionRow(_) => BeliefKind::Contraction,
            BeliefObject::Entrenchment(_) => BeliefKind::Entrenchment,
        }
    }

    pub fn subject(&self) -> AgmSubject<'_> {
        match self {
            BeliefObject::Revision(r) => AgmSubject::Revision(r),
            BeliefObject::Contraction(c) => AgmSubject::Contraction(c),
            BeliefObject::RevisionRow(r) => AgmSubject::RevisionAt(r),
            BeliefObject::ContractionRow(c) => AgmSubject::ContractionAt(c),
            BeliefObject::Entrenchment(e) => AgmSubject::Entrenchment(e),
        }
    }
}

fn entrench_state<'a>(fixed: &'a Bits, x: Option<&'a Bits>, what: &str) -> Result<&'a Bits> {
    match x {
        None => Ok(fixed),
        Some(x) if x == fixed => Ok(fixed),
        Some(_) => Err(Error::input(format!(
            "the fixed set disagrees with the {what}'s belief state"
        ))),
    }
}

/// Translates between the representations. The source's postulate suite
/// is verified first and a failure is a contract error naming the
/// postulate. Targets of kind entrenchment need the belief state `x`;
/// total sources translate rowwise, fixed-state sources yield rows.
pub fn interdefine(obj: &BeliefObject, to: BeliefKind, x: Option<&Bits>) -> Result<BeliefObject> {
    if obj.kind() == to {
        return Err(Error::input("source and target kinds are equal"));
    }
    let need_x = || {
        x.ok_or_else(|| Error::input("an entrenchment target needs the fixed belief set"))
    };
    Ok(match (obj, to) {
        (BeliefObject::Revision(r), BeliefKind::Contraction) => {
            BeliefObject::Contraction(contraction_from_revision(r)?)
        }
        (BeliefObject::Revision(r), BeliefKind::Entrenchment) => {
            let c = contraction_from_revision(r)?;
            BeliefObject::Entrenchment(entrenchment_from_contraction(&c, need_x()?)?)
        }
        (BeliefObject::Contraction(c), BeliefKind::Revision) => {
            BeliefObject::Revision(revision_from_contraction(c)?)
        }
        (BeliefObject::Contraction(c), BeliefKind::Entrenchment) => {
            BeliefObject::Entrenchment(entrenchment_from_contraction(c, need_x()?)?)
        }
        (BeliefObject::Entrenchment(e), BeliefKind::Contraction) => {
            BeliefObject::ContractionRow(contraction_from_entrenchment(e)?)
        }
        (BeliefObject::Entrenchment(e), BeliefKind::Revision) => {
            let row = contraction_from_entrenchment(e)?;
            BeliefObject::RevisionRow(revision_row_from_contraction_row(&row)?)
        }
        (BeliefObject::RevisionRow(r), BeliefKind::Contraction) => {
            BeliefObject::ContractionRow(contraction_row_from_revision_row(r)?)
        }
        (BeliefObject::RevisionRow(r), BeliefKind::Entrenchment) => {
            entrench_state(r.fixed_set(), x, "row")?;
            let row = contraction_row_from_revision_row(r)?;
            BeliefObject::Entrenchment(entrenchment_from_contraction_row(&row)?)
        }
        (BeliefObject::ContractionRow(c), BeliefKind::Revision) => {
            BeliefObject::RevisionRow(revision_row_from_contraction_row(c)?)
        }
        (BeliefObject::ContractionRow(c), BeliefKind::Entrenchment) => {
            entrench_state(c.fixed_set(), x, "row")?;
            BeliefObject::Entrenchment(entrenchment_from_contraction_row(c)?)
        }
        _ => unreachable!("equal kinds are rejected above"),
    })
}

const CHAIN_LABELS: [&str; 9] = ["X0", "X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8"];

/// Memoized operator applications keyed by (first set, second set) masks.
struct OpCache<'a> {
    op: &'a RevisionOperator,
    m: usize,
    slots: Vec<Option<Bits>>,
}

impl<'a> OpCache<'a> {
    fn new(op: &'a RevisionOperator) -> OpCache<'a> {
        let m = op.len();
        OpCache { op, m, slots: vec![None; 1 << (2 * m)] }
    }

    fn get(&mut self, a_mask: u64, b_mask: u64) -> Result<&Bits> {
        let idx = ((a_mask << self.m) | b_mask) as usize;
        if self.slots[idx].is_none() {
            let a = Bits::from_mask(self.m, a_mask);
            let b = Bits::from_mask(self.m, b_mask);
            self.slots[idx] = Some(self.op.apply(&a, &b)?);
        }
        Ok(self.slots[idx].as_ref().unwrap())
    }
}

/// Checks the chain condition: whenever consecutive links of a chain
/// X0..Xk are each confirmed by revision, with the last link closing
/// back on X0, the first link must be confirmed in the reverse
/// direction too. Chains run over all nonempty subsets with repeats
/// allowed, k from 1 to `max_len`.
///
/// A chain satisfies the inner premises exactly when its consecutive
/// set pairs form a path in the graph whose edge (A,B) → (B,C) requires
/// (B|(A∪C)) ∩ A ≠ ∅, so the search runs over pair reachability within
/// `max_len - 1` steps and is exact. Kinds `|Loop` and `*Loop` coincide
/// on finite model sets; the requested name labels the report.
/// Instances count the start/end pair combinations whose premises hold.
pub fn check_loop(op: &RevisionOperator, kind: &str, max_len: usize) -> Result<ConditionReport> {
    let name = match kind {
        "|Loop" | "(|Loop)" => "(|Loop)",
        "*Loop" | "(*Loop)" | "∗Loop" | "(∗Loop)" => "(*Loop)",
        other => return Err(Error::input(format!("unknown loop condition {other}"))),
    };
    if !(1..=8).contains(&max_len) {
        return Err(Error::input("chain length bound must be between 1 and 8"));
    }
    let m = op.len();
    if m == 0 {
        return Ok(pass(name, 0));
    }
    if m > LOOP_POINT_CAP {
        return Err(Error::resource(format!(
            "loop checking over {m} points enumerates {} set pairs, cap is {}",
            ((1u64 << m) - 1).pow(2),
            ((1u64 << LOOP_POINT_CAP) - 1).pow(2)
        )));
    }
    let n = (1usize << m) - 1;
    let pair_id = |a: usize, b: usize| (a - 1) * n + (b - 1);
    let mut cache = OpCache::new(op);

    // Edge (A,B) -> (B,C) holds when (B | (A∪C)) ∩ A ≠ ∅.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n * n];
    for a in 1..=n {
        for b in 1..=n {
            let id = pair_id(a, b);
            for c in 1..=n {
                let union = (a | c) as u64;
                if cache.get(b as u64, union)?.intersects(&Bits::from_mask(m, a as u64)) {
                    adj[id].push(pair_id(b, c) as u32);
                }
            }
        }
    }

    let mut checked = 0u64;
    let mut dist: Vec<usize> = vec![usize::MAX; n * n];
    let mut parent: Vec<u32> = vec![u32::MAX; n * n];
    let mut queue: Vec<u32> = Vec::with_capacity(n * n);
    for x0 in 1..=n {
        for x1 in 1..=n {
            let start = pair_id(x0, x1);
            dist.fill(usize::MAX);
            parent.fill(u32::MAX);
            queue.clear();
            dist[start] = 0;
            queue.push(start as u32);
            let mut head = 0;
            while head < queue.len() {
                let cur = queue[head] as usize;
                head += 1;
                if dist[cur] >= max_len - 1 {
                    continue;
                }
                for &next in &adj[cur] {
                    if dist[next as usize] == usize::MAX {
                        dist[next as usize] = dist[cur] + 1;
                        parent[next as usize] = cur as u32;
                        queue.push(next);
                    }
                }
            }
            for &reached in &queue {
                let q = reached as usize;
                let (xk_prev, xk) = (q / n + 1, q % n + 1);
                let final_premise = cache
                    .get(xk as u64, (xk_prev | x0) as u64)?
                    .intersects(&Bits::from_mask(m, xk_prev as u64));
                if !final_premise {
                    continue;
                }
                checked += 1;
                let conclusion = cache
                    .get(x0 as u64, (xk | x1) as u64)?
                    .intersects(&Bits::from_mask(m, x1 as u64));
                if conclusion {
                    continue;
                }
                // Reconstruct X0..Xk from the pair path.
                let mut pairs = vec![q];
                let mut cur = q;
                while cur != start {
                    cur = parent[cur] as usize;
                    pairs.push(cur);
                }
                pairs.reverse();
                let mut masks = vec![x0 as u64, x1 as u64];
                for &p in &pairs[1..] {
                    masks.push((p % n + 1) as u64);
                }
                let sets = masks
                    .iter()
                    .enumerate()
                    .map(|(i, &mask)| (CHAIN_LABELS[i], Bits::from_mask(m, mask)))
                    .collect();
                return Ok(fail(name, checked, sets));
            }
        }
    }
    Ok(pass(name, checked))
}

/// Output of [`weaktr_demo`]: two distance matrices whose internal
/// orderings differ, yet whose collective revision operators agree on
/// every pair of nonempty sets.
#[derive(Clone, Debug)]
pub struct WeakTrReport {
    pub first: PseudoDistance,
    pub second: PseudoDistance,
    pub pairs_compared: usize,
    pub all_equal: bool,
    /// First disagreeing pair, by mask over the shared index space.
    pub mismatch: Option<(Bits, Bits)>,
}

/// Two four-point configurations around points a, b, x, y. Both realize
/// the same per-point distance orderings, but the first puts a closer
/// to b than x is to y while the second does the opposite. Revision
/// only ever compares distances that share an endpoint, so the two
/// operators agree on all 225 pairs of nonempty sets: the comparison
/// that differs is unobservable.
pub fn weaktr_demo() -> WeakTrReport {
    let name =
        |names: [&str; 4]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    // Indices: 0 = a, 1 = b, 2 = x, 3 = y.
    let first = PseudoDistance::new(
        name(["a", "b", "x", "y"]),
        vec![
            vec![0, 2, 4, 1],
            vec![2, 0, 4, 1],
            vec![4, 4, 0, 3],
            vec![1, 1, 3, 0],
        ],
    )
    .expect("square matrix");
    let second = PseudoDistance::new(
        name(["a'", "b'", "x", "y"]),
        vec![
            vec![0, 5, 9, 2],
            vec![5, 0, 9, 2],
            vec![9, 9, 0, 4],
            vec![2, 2, 4, 0],
        ],
    )
    .expect("square matrix");
    for d in [&first, &second] {
        // Orderings seen from each point: a: y<b<x, b: y<a<x, y: a=b<x, x: y<a=b.
        assert!(d.value(0, 3) < d.value(0, 1) && d.value(0, 1) < d.value(0, 2));
        assert!(d.value(1, 3) < d.value(1, 0) && d.value(1, 0) < d.value(1, 2));
        assert!(d.value(3, 0) == d.value(3, 1) && d.value(3, 0) < d.value(3, 2));
        assert!(d.value(2, 3) < d.value(2, 0) && d.value(2, 0) == d.value(2, 1));
        assert!(d.symmetric() && d.respects_identity());
    }
    // The one comparison without a shared endpoint flips between them.
    assert!(first.value(0, 1) < first.value(2, 3));
    assert!(second.value(0, 1) > second.value(2, 3));

    let mut pairs_compared = 0;
    let mut mismatch = None;
    for c_mask in 1..16u64 {
        for d_mask in 1..16u64 {
            let c = Bits::from_mask(4, c_mask);
            let d = Bits::from_mask(4, d_mask);
            pairs_compared += 1;
            let lhs = collective_revise(&c, &d, &first).expect("matching universe");
            let rhs = collective_revise(&c, &d, &second).expect("matching universe");
            if lhs != rhs && mismatch.is_none() {
                mismatch = Some((c, d));
            }
        }
    }
    WeakTrReport { first, second, pairs_compared, all_equal: mismatch.is_none(), mismatch }
}
