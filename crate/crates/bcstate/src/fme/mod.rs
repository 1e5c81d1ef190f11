//! Symbolic Fourier–Motzkin elimination over rate variables with opaque,
//! nonnegative information-measure symbols, plus exact redundancy removal.
//!
//! A system is a set of rows `Σ c·unknown ≤ 0` where unknowns are rate
//! variables (`R0`, `R12`, `R'1`, …) and atomic measure symbols
//! (`I(U0,U1;Y~1)`, …). Everything is exact integer/rational arithmetic —
//! no floats anywhere in this module.
//!
//! [`verify_reduction`] eliminates a builtin proof system's auxiliary
//! variables, strips redundant rows, and compares the surviving
//! rate-variable rows against the published region. Pure-symbol rows that
//! survive (feasibility requirements on the measures themselves, with no
//! rate content) are segregated and reported as side conditions rather than
//! counted against the comparison.

pub mod builtins;
pub mod parse;

pub use builtins::BuiltinSystem;
pub use parse::{parse_system, render_row, ParseError};

use crate::exact::{lp_maximize, LpOutcome, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A single inequality `Σ coeff·unknown ≤ 0` in primitive integer form
/// (coefficients coprime, zero entries absent). Unknowns are variable or
/// symbol names; symbol names start with `I(`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    coeffs: BTreeMap<String, BigInt>,
}

/// True for atomic measure symbols, false for rate variables.
pub fn is_symbol(name: &str) -> bool {
    name.starts_with("I(")
}

impl Row {
    /// Builds a row from integer coefficients, normalizing to primitive form.
    /// Returns `None` when the row is empty or trivially true (all
    /// coefficients ≤ 0 cannot be violated by nonnegative unknowns).
    pub fn new<I>(entries: I) -> Option<Row>
    where
        I: IntoIterator<Item = (String, BigInt)>,
    {
        let mut coeffs: BTreeMap<String, BigInt> = BTreeMap::new();
        for (k, v) in entries {
            let e = coeffs.entry(k).or_insert_with(BigInt::zero);
            *e += v;
        }
        coeffs.retain(|_, v| !v.is_zero());
        if coeffs.is_empty() || coeffs.values().all(|v| v.is_negative()) {
            return None;
        }
        let mut g = BigInt::zero();
        for v in coeffs.values() {
            g = num_integer::gcd(g, v.abs());
        }
        if !g.is_zero() {
            for v in coeffs.values_mut() {
                *v /= &g;
            }
        }
        Some(Row { coeffs })
    }

    pub fn from_pairs(entries: &[(&str, i64)]) -> Option<Row> {
        Row::new(
            entries
                .iter()
                .map(|(k, v)| ((*k).to_string(), BigInt::from(*v))),
        )
    }

    pub fn coeff(&self, name: &str) -> BigInt {
        self.coeffs.get(name).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<String, BigInt> {
        &self.coeffs
    }

    /// True when no rate variable carries a nonzero coefficient — the row
    /// constrains only the measure symbols.
    pub fn is_pure_symbol(&self) -> bool {
        self.coeffs.keys().all(|k| is_symbol(k))
    }

    /// `other` implies `self` pointwise: every coefficient of `self` is ≤
    /// the matching coefficient of `other` (absent = 0), so
    /// `self·z ≤ other·z ≤ 0` for all `z ≥ 0`.
    fn dominated_by(&self, other: &Row) -> bool {
        let keys: BTreeSet<&String> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter()
            .all(|k| self.coeff(k) <= other.coeff(k))
    }

    /// Positive scale combination `a·self + b·other` (FME pairing step).
    fn combine(&self, a: &BigInt, other: &Row, b: &BigInt) -> Option<Row> {
        let mut entries: Vec<(String, BigInt)> = Vec::new();
        for (k, v) in &self.coeffs {
            entries.push((k.clone(), a * v));
        }
        for (k, v) in &other.coeffs {
            entries.push((k.clone(), b * v));
        }
        Row::new(entries)
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_row(self))
    }
}

/// An inequality system over rate variables and measure symbols, with
/// implicit nonnegativity of every unknown. `identities` are declared
/// pure-symbol axioms (e.g. monotonicity between overlapping measures) that
/// strengthen redundancy tests but are never rows of the system itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSystem {
    pub vars: Vec<String>,
    pub rows: BTreeSet<Row>,
    pub identities: Vec<Row>,
}

impl SymbolicSystem {
    pub fn new(vars: Vec<String>, rows: Vec<Row>) -> SymbolicSystem {
        SymbolicSystem {
            vars,
            rows: rows.into_iter().collect(),
            identities: Vec::new(),
        }
    }

    pub fn with_identities(mut self, identities: Vec<Row>) -> SymbolicSystem {
        self.identities = identities;
        self
    }

    /// All symbol names referenced anywhere in the system.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.rows
            .iter()
            .chain(self.identities.iter())
            .flat_map(|r| r.coeffs.keys())
            .filter(|k| is_symbol(k))
            .cloned()
            .collect()
    }
}

/// Standard Fourier–Motzkin elimination of `var`: every upper bound on `var`
/// is paired with every lower bound (including the implicit `var ≥ 0`), the
/// variable is dropped, and the output is deduplicated in primitive integer
/// form with trivially-true and pointwise-dominated rows removed (the cheap
/// domination filter keeps the row explosion in check without any LP work).
/// A system not mentioning `var` is returned unchanged (minus the variable
/// from its list).
pub fn eliminate(sys: &SymbolicSystem, var: &str) -> SymbolicSystem {
    let mut keep: BTreeSet<Row> = BTreeSet::new();
    let mut uppers: Vec<(Row, BigInt)> = Vec::new();
    let mut lowers: Vec<(Row, BigInt)> = Vec::new();
    for row in &sys.rows {
        let a = row.coeff(var);
        if a.is_positive() {
            uppers.push((row.clone(), a));
        } else if a.is_negative() {
            lowers.push((row.clone(), -a));
        } else {
            keep.insert(row.clone());
        }
    }
    // Implicit lower bound var ≥ 0, i.e. the row −var ≤ 0.
    let nonneg = Row {
        coeffs: [(var.to_string(), BigInt::from(-1))].into_iter().collect(),
    };
    lowers.push((nonneg, BigInt::from(1)));
    for (ru, au) in &uppers {
        for (rl, al) in &lowers {
            if let Some(mut comb) = ru.combine(al, rl, au) {
                comb.coeffs.remove(var);
                if let Some(normalized) = Row::new(comb.coeffs) {
                    keep.insert(normalized);
                }
            } else {
                // Combination cancelled to a trivially-true row; in that case
                // the var column also cancelled, nothing to keep.
            }
        }
    }
    SymbolicSystem {
        vars: sys.vars.iter().filter(|v| *v != var).cloned().collect(),
        rows: prune_dominated(keep),
        identities: sys.identities.clone(),
    }
}

/// Drops every row pointwise-dominated by another row. Distinct rows cannot
/// dominate each other mutually (mutual domination means equality), so the
/// result is order-independent.
fn prune_dominated(rows: BTreeSet<Row>) -> BTreeSet<Row> {
    let all: Vec<Row> = rows.into_iter().collect();
    all.iter()
        .enumerate()
        .filter(|(i, r)| {
            !all.iter()
                .enumerate()
                .any(|(j, o)| *i != j && r.dominated_by(o))
        })
        .map(|(_, r)| r.clone())
        .collect()
}

/// True when `candidate` is implied by `rows` + `identities` + nonnegativity:
/// the maximum of `candidate·z` over the cone `{z ≥ 0 : row·z ≤ 0 ∀ rows}`
/// is zero (the cone is homogeneous, so the only alternatives are 0 and +∞).
fn implied_by(candidate: &Row, rows: &[&Row], identities: &[Row]) -> bool {
    let names: Vec<String> = {
        let mut set: BTreeSet<String> = BTreeSet::new();
        set.extend(candidate.coeffs.keys().cloned());
        for r in rows {
            set.extend(r.coeffs.keys().cloned());
        }
        for r in identities {
            set.extend(r.coeffs.keys().cloned());
        }
        set.into_iter().collect()
    };
    let to_vec = |r: &Row| -> Vec<Rat> {
        names
            .iter()
            .map(|n| Rat::from_integer(r.coeff(n)))
            .collect()
    };
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| to_vec(r)).collect();
    a.extend(identities.iter().map(to_vec));
    let b = vec![Rat::zero(); a.len()];
    let c = to_vec(candidate);
    match lp_maximize(&a, &b, &c) {
        LpOutcome::Optimal(v, _) => v <= Rat::zero(),
        LpOutcome::Unbounded => false,
        LpOutcome::Infeasible => unreachable!("the origin is feasible in a homogeneous cone"),
    }
}

/// Removes every row implied by the remaining rows, the declared identities,
/// and nonnegativity of all unknowns. Implication is decided exactly (LP
/// over the homogeneous cone). A cheap pointwise-domination prefilter fires
/// first. The greedy pass yields an irredundant system: removing a redundant
/// row never changes the solution set, and a row that once survived against
/// a larger row set also survives against any subset of it.
pub fn reduce_redundant(sys: &SymbolicSystem) -> SymbolicSystem {
    let mut rows: Vec<Row> = sys.rows.iter().cloned().collect();
    // Pointwise domination prefilter.
    let mut alive: Vec<bool> = vec![true; rows.len()];
    for i in 0..rows.len() {
        if !alive[i] {
            continue;
        }
        for j in 0..rows.len() {
            if i != j && alive[j] && rows[i].dominated_by(&rows[j]) {
                alive[i] = false;
                break;
            }
        }
    }
    rows = rows
        .into_iter()
        .zip(alive)
        .filter_map(|(r, a)| a.then_some(r))
        .collect();
    // Exact LP pass.
    let mut kept: Vec<bool> = vec![true; rows.len()];
    for i in 0..rows.len() {
        let others: Vec<&Row> = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && kept[*j])
            .map(|(_, r)| r)
            .collect();
        if implied_by(&rows[i], &others, &sys.identities) {
            kept[i] = false;
        }
    }
    SymbolicSystem {
        vars: sys.vars.clone(),
        rows: rows
            .into_iter()
            .zip(kept)
            .filter_map(|(r, k)| k.then_some(r))
            .collect(),
        identities: sys.identities.clone(),
    }
}

/// Canonical form: rows already normalize on construction, so this is the
/// sorted, deduplicated row list (the `BTreeSet` order).
pub fn canonicalize(sys: &SymbolicSystem) -> Vec<Row> {
    sys.rows.iter().cloned().collect()
}

/// Outcome of comparing a derived reduced system against a published target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    DerivedSuperset,
    TargetSuperset,
    Incomparable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Equal => "EQUAL",
            Verdict::DerivedSuperset => "DERIVED⊋TARGET",
            Verdict::TargetSuperset => "TARGET⊋DERIVED",
            Verdict::Incomparable => "INCOMPARABLE",
        };
        write!(f, "{s}")
    }
}

/// Machine- and human-readable result of [`verify_reduction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub system: String,
    pub verdict: Verdict,
    pub raw_row_count: usize,
    /// Reduced rows that involve rate variables, rendered.
    pub rate_rows: Vec<String>,
    /// Reduced rows over measure symbols only: feasibility requirements on
    /// the measures that carry no rate content and are therefore not part of
    /// the published region's row list.
    pub side_conditions: Vec<String>,
    /// Declared symbol identities admitted during redundancy removal.
    pub identities: Vec<String>,
    /// Rate rows derived but absent from the target (witnesses).
    pub extra_rows: Vec<String>,
    /// Target rows not derived (witnesses).
    pub missing_rows: Vec<String>,
}

impl ProofReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system: {}", self.system)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "raw rows after elimination: {}", self.raw_row_count)?;
        writeln!(f, "reduced rate rows ({}):", self.rate_rows.len())?;
        for r in &self.rate_rows {
            writeln!(f, "  {r}")?;
        }
        if !self.side_conditions.is_empty() {
            writeln!(
                f,
                "side conditions on the measures ({}):",
                self.side_conditions.len()
            )?;
            for r in &self.side_conditions {
                writeln!(f, "  {r}")?;
            }
        }
        if !self.identities.is_empty() {
            writeln!(f, "symbol identities admitted ({}):", self.identities.len())?;
            for r in &self.identities {
                writeln!(f, "  {r}")?;
            }
        }
        for (label, rows) in [("extra", &self.extra_rows), ("missing", &self.missing_rows)] {
            if !rows.is_empty() {
                writeln!(f, "{label} rows ({}):", rows.len())?;
                for r in rows {
                    writeln!(f, "  {r}")?;
                }
            }
        }
        Ok(())
    }
}

/// Eliminates a builtin proof system's auxiliary variables, reduces
/// redundancy, and compares the surviving rate rows against the published
/// target region. Mismatch is reported, never raised.
pub fn verify_reduction(builtin: BuiltinSystem) -> ProofReport {
    let sys = builtin.system();
    let mut cur = sys;
    for v in builtin.eliminated_vars() {
        cur = eliminate(&cur, v);
    }
    let raw_row_count = cur.rows.len();
    let reduced = reduce_redundant(&cur);
    let target: BTreeSet<Row> = builtin.target().into_iter().collect();

    let mut rate_rows: BTreeSet<Row> = BTreeSet::new();
    let mut side: Vec<Row> = Vec::new();
    for row in &reduced.rows {
        if row.is_pure_symbol() {
            side.push(row.clone());
        } else {
            rate_rows.insert(row.clone());
        }
    }
    let extra: Vec<Row> = rate_rows.difference(&target).cloned().collect();
    let missing: Vec<Row> = target.difference(&rate_rows).cloned().collect();
    let verdict = match (extra.is_empty(), missing.is_empty()) {
        (true, true) => Verdict::Equal,
        (false, true) => Verdict::DerivedSuperset,
        (true, false) => Verdict::TargetSuperset,
        (false, false) => Verdict::Incomparable,
    };
    let render_all = |rows: &[Row]| rows.iter().map(render_row).collect::<Vec<_>>();
    ProofReport {
        system: builtin.name().to_string(),
        verdict,
        raw_row_count,
        rate_rows: rate_rows.iter().map(render_row).collect(),
        side_conditions: render_all(&side),
        identities: render_all(&reduced.identities),
        extra_rows: render_all(&extra),
        missing_rows: render_all(&missing),
    }
}

/// Reduces a user-supplied system: eliminates every variable outside
/// R0..R4, then strips redundancy. Returns the reduced system and the raw
/// row count after elimination.
pub fn reduce_user_system(sys: &SymbolicSystem) -> (SymbolicSystem, usize) {
    let keep = ["R0", "R1", "R2", "R3", "R4"];
    let mut cur = sys.clone();
    let to_eliminate: Vec<String> = cur
        .vars
        .iter()
        .filter(|v| !keep.contains(&v.as_str()))
        .cloned()
        .collect();
    for v in &to_eliminate {
        cur = eliminate(&cur, v);
    }
    let raw = cur.rows.len();
    (reduce_redundant(&cur), raw)
}

/// Result of instantiating a symbolic system at numeric symbol values and
/// maximizing a weighted rate sum over it (all variables, including split
/// and bin rates, remain free nonnegative unknowns).
#[derive(Debug, Clone, PartialEq)]
pub enum NumericSupport {
    Value(f64),
    Unbounded,
    Infeasible,
}

/// Substitutes measured values for the symbols of `sys` and maximizes
/// `Σ w(v)·v` over the resulting polyhedron in the system's variables.
/// Connects the symbolic layer to numeric region evaluation.
pub fn numeric_support(
    sys: &SymbolicSystem,
    symbol_values: &BTreeMap<String, f64>,
    weights: &BTreeMap<String, f64>,
) -> NumericSupport {
    use crate::exact::rat_from_f64;
    let vars: Vec<String> = sys.vars.clone();
    let mut a: Vec<Vec<Rat>> = Vec::new();
    let mut b: Vec<Rat> = Vec::new();
    for row in &sys.rows {
        let coeffs: Vec<Rat> = vars
            .iter()
            .map(|v| Rat::from_integer(row.coeff(v)))
            .collect();
        // Move symbol terms to the right-hand side: Σ a·v ≤ −Σ c·σ(value).
        let mut rhs = Rat::zero();
        for (k, c) in row.coeffs() {
            if is_symbol(k) {
                let val = symbol_values
                    .get(k)
                    .unwrap_or_else(|| panic!("no value supplied for symbol {k}"));
                rhs -= Rat::from_integer(c.clone()) * rat_from_f64(*val);
            }
        }
        a.push(coeffs);
        b.push(rhs);
    }
    let c: Vec<Rat> = vars
        .iter()
        .map(|v| rat_from_f64(weights.get(v).copied().unwrap_or(0.0)))
        .collect();
    match lp_maximize(&a, &b, &c) {
        LpOutcome::Optimal(v, _) => NumericSupport::Value(crate::exact::rat_to_f64(&v)),
        LpOutcome::Unbounded => NumericSupport::Unbounded,
        LpOutcome::Infeasible => NumericSupport::Infeasible,
    }
}
