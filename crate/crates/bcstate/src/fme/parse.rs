//! Text format for inequality systems: one inequality per line, e.g.
//!
//! ```text
//! # receiver 1, common layer
//! 2R0 + R1 + R2 <= I(U0,U1;Y~1) + I(U0,U2;Y~2) - I(U1;U2|U0)
//! R12 <= R1
//! ```
//!
//! Relations are `<=`, `>=` or `=` (an equality contributes both
//! directions). Terms are an optional integer or `INT/INT` rational
//! coefficient (with an optional `*`), followed by a rate variable
//! (`R0`–`R4`, `R11`, `R12`, `R21`, `R22`, `R'0`, `R'1`, `R'2`) or an
//! atomic measure symbol `I(...)` (parentheses balanced, content opaque).
//! A side that is exactly `0` is the empty sum. `#` starts a comment;
//! blank lines are skipped. All arithmetic is exact.

use super::{is_symbol, Row, SymbolicSystem};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Rate variables accepted by the parser, in canonical render order.
pub const CANON_VARS: [&str; 12] = [
    "R0", "R1", "R2", "R3", "R4", "R11", "R12", "R21", "R22", "R'0", "R'1", "R'2",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected exactly one relation (<=, >= or =)")]
    Relation { line: usize },
    #[error("line {line}: cannot parse term '{term}'")]
    Term { line: usize, term: String },
    #[error(
        "line {line}: unknown variable '{name}' \
         (allowed: R0-R4, R11, R12, R21, R22, R'0, R'1, R'2)"
    )]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: unbalanced parentheses in symbol")]
    Unbalanced { line: usize },
    #[error("line {line}: empty side (write 0 for an empty sum)")]
    EmptySide { line: usize },
}

/// Parses a whole system. Lines that normalize to trivially-true rows
/// (satisfied by every nonnegative assignment) are dropped, mirroring row
/// normalization everywhere else in this module.
pub fn parse_system(text: &str) -> Result<SymbolicSystem, ParseError> {
    let mut rows: Vec<Row> = Vec::new();
    let mut seen_vars: Vec<String> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, op, rhs) = split_relation(line, line_no)?;
        let left = parse_side(lhs, line_no)?;
        let right = parse_side(rhs, line_no)?;
        for (name, _) in left.iter().chain(right.iter()) {
            if !is_symbol(name) && !seen_vars.iter().any(|v| v == name) {
                seen_vars.push(name.clone());
            }
        }
        // Normalize to `difference ≤ 0` rows.
        let difference = |a: &[(String, BigRational)], b: &[(String, BigRational)]| {
            let mut acc: BTreeMap<String, BigRational> = BTreeMap::new();
            for (k, v) in a {
                *acc.entry(k.clone()).or_insert_with(BigRational::zero) += v;
            }
            for (k, v) in b {
                *acc.entry(k.clone()).or_insert_with(BigRational::zero) -= v;
            }
            acc
        };
        let mut sides: Vec<BTreeMap<String, BigRational>> = Vec::new();
        match op {
            Relation::Le => sides.push(difference(&left, &right)),
            Relation::Ge => sides.push(difference(&right, &left)),
            Relation::Eq => {
                sides.push(difference(&left, &right));
                sides.push(difference(&right, &left));
            }
        }
        for side in sides {
            if let Some(row) = clear_denominators(side) {
                rows.push(row);
            }
        }
    }
    let vars: Vec<String> = CANON_VARS
        .iter()
        .filter(|v| seen_vars.iter().any(|s| s == *v))
        .map(|v| v.to_string())
        .collect();
    Ok(SymbolicSystem::new(vars, rows))
}

enum Relation {
    Le,
    Ge,
    Eq,
}

/// Finds the single top-level relation operator. Characters inside `I(...)`
/// symbols are ignored.
fn split_relation(line: &str, line_no: usize) -> Result<(&str, Relation, &str), ParseError> {
    let bytes = line.as_bytes();
    let mut depth = 0usize;
    let mut found: Option<(usize, usize, Relation)> = None;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth = depth.checked_sub(1).ok_or(ParseError::Unbalanced { line: line_no })?,
            b'<' | b'>' | b'=' if depth == 0 => {
                let (len, rel) = match bytes[i] {
                    b'<' if bytes.get(i + 1) == Some(&b'=') => (2, Relation::Le),
                    b'>' if bytes.get(i + 1) == Some(&b'=') => (2, Relation::Ge),
                    b'=' => (1, Relation::Eq),
                    _ => return Err(ParseError::Relation { line: line_no }),
                };
                if found.is_some() {
                    return Err(ParseError::Relation { line: line_no });
                }
                found = Some((i, i + len, rel));
                i += len;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err(ParseError::Unbalanced { line: line_no });
    }
    match found {
        Some((start, end, rel)) => Ok((&line[..start], rel, &line[end..])),
        None => Err(ParseError::Relation { line: line_no }),
    }
}

/// Parses one side into (name, coefficient) terms. `0` is the empty sum.
fn parse_side(side: &str, line_no: usize) -> Result<Vec<(String, BigRational)>, ParseError> {
    let trimmed = side.trim();
    if trimmed.is_empty() {
        return Err(ParseError::EmptySide { line: line_no });
    }
    if trimmed == "0" {
        return Ok(Vec::new());
    }
    let mut terms: Vec<(String, BigRational)> = Vec::new();
    for (piece, negative) in split_terms(trimmed, line_no)? {
        let (name, coeff) = parse_term(&piece, line_no)?;
        let signed = if negative { -coeff } else { coeff };
        terms.push((name, signed));
    }
    Ok(terms)
}

/// Splits a sum on top-level `+`/`-`, keeping each piece's sign.
fn split_terms(side: &str, line_no: usize) -> Result<Vec<(String, bool)>, ParseError> {
    let mut pieces: Vec<(String, bool)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    let mut depth = 0usize;
    for ch in side.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or(ParseError::Unbalanced { line: line_no })?;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if cur.trim().is_empty() {
                    if ch == '-' && !pieces.is_empty() {
                        // "a + - b" — reject rather than guess.
                        return Err(ParseError::Term {
                            line: line_no,
                            term: side.to_string(),
                        });
                    }
                    // Leading sign of the first term.
                    negative = ch == '-';
                } else {
                    pieces.push((cur.trim().to_string(), negative));
                    cur.clear();
                    negative = ch == '-';
                }
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(ParseError::Unbalanced { line: line_no });
    }
    if cur.trim().is_empty() {
        return Err(ParseError::Term {
            line: line_no,
            term: side.to_string(),
        });
    }
    pieces.push((cur.trim().to_string(), negative));
    Ok(pieces)
}

/// Parses `[INT[/INT]][*] atom` where atom is a variable or `I(...)`.
fn parse_term(piece: &str, line_no: usize) -> Result<(String, BigRational), ParseError> {
    let bad = || ParseError::Term {
        line: line_no,
        term: piece.to_string(),
    };
    let mut rest = piece.trim();
    let mut coeff = BigRational::one();
    if rest.starts_with(|c: char| c.is_ascii_digit()) {
        let num_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let numer: BigInt = rest[..num_end].parse().map_err(|_| bad())?;
        rest = &rest[num_end..];
        let mut denom = BigInt::one();
        if let Some(after) = rest.strip_prefix('/') {
            let den_end = after
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(after.len());
            if den_end == 0 {
                return Err(bad());
            }
            denom = after[..den_end].parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            rest = &after[den_end..];
        }
        coeff = BigRational::new(numer, denom);
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix('*') {
            rest = after.trim_start();
        }
        if rest.is_empty() {
            return Err(bad());
        }
    }
    let atom = rest.trim();
    if atom.starts_with("I(") {
        if !balanced(atom) || !atom.ends_with(')') {
            return Err(ParseError::Unbalanced { line: line_no });
        }
        return Ok((atom.to_string(), coeff));
    }
    if atom.starts_with('R')
        && atom.len() > 1
        && atom[1..].chars().all(|c| c.is_ascii_digit() || c == '\'')
    {
        if !CANON_VARS.contains(&atom) {
            return Err(ParseError::UnknownVariable {
                line: line_no,
                name: atom.to_string(),
            });
        }
        return Ok((atom.to_string(), coeff));
    }
    Err(bad())
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i64;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Multiplies a rational row through by the least common denominator and
/// normalizes. `None` when the line is trivially true (e.g. `R0 <= R0`).
fn clear_denominators(side: BTreeMap<String, BigRational>) -> Option<Row> {
    let mut lcm = BigInt::one();
    for v in side.values() {
        lcm = lcm.lcm(v.denom());
    }
    Row::new(
        side.into_iter()
            .map(|(k, v)| (k, (v * BigRational::from_integer(lcm.clone())).to_integer())),
    )
}

/// Renders a row in the text format above: variables on the left, measure
/// symbols (negated) on the right; if no variable has a positive
/// coefficient, positive symbols move to the left instead, so e.g. the
/// covering condition renders as `I(U1;U2|U0) <= R'1 + R'2`. An empty side
/// renders as `0`.
pub fn render_row(row: &Row) -> String {
    let order_key = |name: &str| -> (usize, usize, String) {
        if let Some(i) = CANON_VARS.iter().position(|v| *v == name) {
            (0, i, String::new())
        } else if let Some(i) = super::builtins::ALL_SYMBOLS
            .iter()
            .position(|s| *s == name)
        {
            (1, i, String::new())
        } else {
            (2, 0, name.to_string())
        }
    };
    let mut names: Vec<&String> = row.coeffs().keys().collect();
    names.sort_by_key(|n| order_key(n));

    let has_positive_var = names
        .iter()
        .any(|n| !is_symbol(n) && row.coeff(n).is_positive());
    // Terms whose rendered-positive form belongs on the left.
    let on_left = |name: &str, coeff: &BigInt| -> bool {
        if has_positive_var {
            !is_symbol(name) && coeff.is_positive()
        } else {
            coeff.is_positive()
        }
    };
    let mut left: Vec<String> = Vec::new();
    let mut right: Vec<String> = Vec::new();
    for name in names {
        let coeff = row.coeff(name);
        if on_left(name, &coeff) {
            left.push(term_string(name, &coeff, left.is_empty()));
        } else {
            let negated = -coeff;
            right.push(term_string(name, &negated, right.is_empty()));
        }
    }
    let join = |parts: Vec<String>| -> String {
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ")
        }
    };
    format!("{} <= {}", join(left), join(right))
}

fn term_string(name: &str, coeff: &BigInt, first: bool) -> String {
    let magnitude = coeff.abs();
    let body = if magnitude.is_one() {
        name.to_string()
    } else if is_symbol(name) {
        format!("{magnitude}*{name}")
    } else {
        format!("{magnitude}{name}")
    };
    if first {
        if coeff.is_negative() {
            format!("-{body}")
        } else {
            body
        }
    } else if coeff.is_negative() {
        format!("- {body}")
    } else {
        format!("+ {body}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_line() {
        let sys = parse_system("2R0 + R1 + R2 <= I(U0,U1;Y~1) + I(U0,U2;Y~2) - I(U1;U2|U0)")
            .unwrap();
        assert_eq!(sys.rows.len(), 1);
        let row = sys.rows.iter().next().unwrap();
        assert_eq!(row.coeff("R0"), BigInt::from(2));
        assert_eq!(row.coeff("I(U0,U1;Y~1)"), BigInt::from(-1));
        assert_eq!(row.coeff("I(U1;U2|U0)"), BigInt::from(1));
        assert_eq!(sys.vars, vec!["R0", "R1", "R2"]);
    }

    #[test]
    fn comments_blanks_zero_sides_and_ge() {
        let text = "# covering\nI(U1;U2|U0) - R'1 - R'2 <= 0\n\nR12 + R'1 >= 0 # trivially true\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.rows.len(), 1);
        assert_eq!(
            render_row(sys.rows.iter().next().unwrap()),
            "I(U1;U2|U0) <= R'1 + R'2"
        );
    }

    #[test]
    fn equality_gives_both_directions() {
        let sys = parse_system("R1 = R11 + R12").unwrap();
        assert_eq!(sys.rows.len(), 2);
    }

    #[test]
    fn rational_coefficients_clear_exactly() {
        let sys = parse_system("1/2 R0 + 1/3*R1 <= I(U0;S)").unwrap();
        let row = sys.rows.iter().next().unwrap();
        assert_eq!(row.coeff("R0"), BigInt::from(3));
        assert_eq!(row.coeff("R1"), BigInt::from(2));
        assert_eq!(row.coeff("I(U0;S)"), BigInt::from(-6));
    }

    #[test]
    fn rejects_unknown_variables_and_bad_lines() {
        assert!(matches!(
            parse_system("R9 <= I(U0;S)"),
            Err(ParseError::UnknownVariable { line: 1, .. })
        ));
        assert!(matches!(
            parse_system("R0 + R1"),
            Err(ParseError::Relation { line: 1 })
        ));
        assert!(matches!(
            parse_system("R0 <= I(U0;S"),
            Err(ParseError::Unbalanced { line: 1 })
        ));
        assert!(matches!(
            parse_system("R0 <= "),
            Err(ParseError::EmptySide { line: 1 })
        ));
        assert!(matches!(
            parse_system("R0 <= 2"),
            Err(ParseError::Term { line: 1, .. })
        ));
    }

    #[test]
    fn render_parse_round_trip_on_builtin_rows() {
        for b in super::super::BuiltinSystem::ALL {
            let sys = b.system();
            for row in sys.rows.iter().chain(b.target().iter()) {
                let line = render_row(row);
                let back = parse_system(&line)
                    .unwrap_or_else(|e| panic!("{}: '{line}': {e}", b.name()));
                assert_eq!(back.rows.len(), 1, "{line}");
                assert_eq!(back.rows.iter().next().unwrap(), row, "{line}");
            }
        }
    }
}
