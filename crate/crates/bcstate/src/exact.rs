//! Exact-rational polyhedral kernels: a small two-phase simplex and basic
//! feasible point enumeration over `BigRational`.
//!
//! Every polytope this crate touches is tiny (at most a dozen inequalities
//! over at most a dozen unknowns), so exact arbitrary-precision arithmetic is
//! affordable and eliminates the tolerance tuning that plagues float LPs:
//! support values, redundancy certificates, and inclusion verdicts are exact
//! for rational inputs (and `f64` inputs convert to rationals exactly).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Exact conversion of a finite `f64` into a rational (every finite float is
/// a dyadic rational).
pub fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_float(x).expect("finite float required")
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Split to avoid precision loss on big integers: use string round-trip only
    // as a last resort; typical magnitudes here are tiny.
    let nf = bigint_to_f64(num);
    let df = bigint_to_f64(den);
    nf / df
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::NAN)
}

pub fn rzero() -> Rat {
    Rat::zero()
}

pub fn rone() -> Rat {
    Rat::one()
}

/// Outcome of an exact linear program `max c·z  s.t.  A z ≤ b, z ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// Optimum attained; value and one optimal point.
    Optimal(Rat, Vec<Rat>),
    /// Objective unbounded above over the feasible set.
    Unbounded,
    /// Feasible set empty.
    Infeasible,
}

/// Exact two-phase primal simplex with Bland's rule (guaranteed termination).
///
/// Maximizes `c·z` subject to `A z ≤ b` and `z ≥ 0`.
pub fn lp_maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Tableau columns: n structural + m slacks (+ artificials in phase 1).
    // Row i encodes: sum_j T[i][j]·col_j = rhs[i], with basis[i] the basic
    // column of row i.
    let neg_rows: Vec<usize> = (0..m).filter(|&i| b[i] < Rat::zero()).collect();
    let n_art = neg_rows.len();
    let cols = n + m + n_art;
    let mut t = vec![vec![Rat::zero(); cols]; m];
    let mut rhs = b.to_vec();
    let mut basis = vec![0usize; m];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j].clone();
        }
        t[i][n + i] = Rat::one();
        basis[i] = n + i;
    }
    // Phase 1: flip negative rows, add artificials, minimize their sum.
    if n_art > 0 {
        for (k, &i) in neg_rows.iter().enumerate() {
            for j in 0..n + m {
                t[i][j] = -t[i][j].clone();
            }
            rhs[i] = -rhs[i].clone();
            t[i][n + m + k] = Rat::one();
            basis[i] = n + m + k;
        }
        let mut obj1 = vec![Rat::zero(); cols];
        for k in 0..n_art {
            obj1[n + m + k] = -Rat::one(); // maximize −Σ artificials
        }
        let val = simplex_run(&mut t, &mut rhs, &mut basis, &obj1, cols);
        match val {
            SimplexEnd::Optimal(v) => {
                if v < Rat::zero() {
                    return LpOutcome::Infeasible;
                }
            }
            SimplexEnd::Unbounded => unreachable!("phase-1 objective is bounded above by 0"),
        }
        // Pivot any artificial still in the basis out (degenerate row), or the
        // row is redundant and the artificial sits at zero; either way zero
        // the artificial columns so phase 2 cannot re-enter them.
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| !t[i][j].is_zero()) {
                    pivot(&mut t, &mut rhs, &mut basis, i, j);
                }
            }
        }
        for row in t.iter_mut() {
            for j in n + m..cols {
                row[j] = Rat::zero();
            }
        }
    }
    // Phase 2.
    let mut obj = vec![Rat::zero(); cols];
    obj[..n].clone_from_slice(&c[..n]);
    match simplex_run(&mut t, &mut rhs, &mut basis, &obj, n + m) {
        SimplexEnd::Unbounded => LpOutcome::Unbounded,
        SimplexEnd::Optimal(_) => {
            let mut z = vec![Rat::zero(); n];
            for i in 0..m {
                if basis[i] < n {
                    z[basis[i]] = rhs[i].clone();
                }
            }
            let value = z
                .iter()
                .zip(c.iter())
                .fold(Rat::zero(), |acc, (zi, ci)| acc + zi * ci);
            LpOutcome::Optimal(value, z)
        }
    }
}

enum SimplexEnd {
    Optimal(Rat),
    Unbounded,
}

fn pivot(t: &mut [Vec<Rat>], rhs: &mut [Rat], basis: &mut [usize], row: usize, col: usize) {
    let piv = t[row][col].clone();
    debug_assert!(!piv.is_zero());
    for v in t[row].iter_mut() {
        *v /= piv.clone();
    }
    rhs[row] /= piv;
    for i in 0..t.len() {
        if i != row && !t[i][col].is_zero() {
            let f = t[i][col].clone();
            let prow = t[row].clone();
            for (v, pv) in t[i].iter_mut().zip(prow.iter()) {
                *v -= &f * pv;
            }
            let pr = rhs[row].clone();
            rhs[i] -= &f * &pr;
        }
    }
    basis[row] = col;
}

/// Runs Bland-rule simplex on the current tableau maximizing `obj`, allowing
/// entering columns `< col_limit`. Returns the optimal objective value or
/// unboundedness. The tableau/basis are updated in place.
fn simplex_run(
    t: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    obj: &[Rat],
    col_limit: usize,
) -> SimplexEnd {
    let m = t.len();
    loop {
        // Reduced cost of column j: obj[j] − Σ_i obj[basis[i]]·t[i][j].
        let mut entering = None;
        'cols: for j in 0..col_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut red = obj[j].clone();
            for i in 0..m {
                if !obj[basis[i]].is_zero() && !t[i][j].is_zero() {
                    red -= &obj[basis[i]] * &t[i][j];
                }
            }
            if red > Rat::zero() {
                entering = Some(j);
                break 'cols; // Bland: smallest improving index
            }
        }
        let Some(col) = entering else {
            let mut val = Rat::zero();
            for i in 0..m {
                if !obj[basis[i]].is_zero() {
                    val += &obj[basis[i]] * &rhs[i];
                }
            }
            return SimplexEnd::Optimal(val);
        };
        // Ratio test (Bland ties: smallest basis index).
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][col] > Rat::zero() {
                let ratio = &rhs[i] / &t[i][col];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return SimplexEnd::Unbounded;
        };
        pivot(t, rhs, basis, row, col);
    }
}

/// Solves the square system `M x = v` by exact Gaussian elimination; `None`
/// when `M` is singular.
pub fn solve_square(m: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let d = v.len();
    debug_assert!(m.len() == d && m.iter().all(|r| r.len() == d));
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .zip(v.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..d {
        let piv_row = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv_row);
        let piv = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= piv.clone();
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let prow = a[col].clone();
                for (x, px) in a[r].iter_mut().zip(prow.iter()) {
                    *x -= &f * px;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Enumerates the vertices (basic feasible points) of
/// `{ z : A z ≤ b, z ≥ 0 }` in dimension `dim`, by solving every `dim`-subset
/// of tight constraints (including the nonnegativity facets) and keeping the
/// feasible solutions. Suitable only for small systems.
pub fn enumerate_vertices(a: &[Vec<Rat>], b: &[Rat], dim: usize) -> Vec<Vec<Rat>> {
    // Build the full row list: structural rows then −e_i ≤ 0.
    let mut rows: Vec<(Vec<Rat>, Rat)> = a
        .iter()
        .zip(b.iter())
        .map(|(r, rhs)| (r.clone(), rhs.clone()))
        .collect();
    for i in 0..dim {
        let mut r = vec![Rat::zero(); dim];
        r[i] = -Rat::one();
        rows.push((r, Rat::zero()));
    }
    let n = rows.len();
    let mut verts: Vec<Vec<Rat>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    if dim == 0 || n < dim {
        return verts;
    }
    loop {
        let m: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
        let v: Vec<Rat> = subset.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(z) = solve_square(&m, &v) {
            let feasible = z.iter().all(|zi| !zi.is_negative())
                && rows.iter().all(|(r, rhs)| {
                    r.iter()
                        .zip(z.iter())
                        .fold(Rat::zero(), |acc, (ri, zi)| acc + ri * zi)
                        <= *rhs
                });
            if feasible && !verts.contains(&z) {
                verts.push(z);
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return verts;
            }
            k -= 1;
            if subset[k] < n - (dim - k) {
                subset[k] += 1;
                for j in k + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact feasibility of `{ z ≥ 0 : E z = f }` (used for the stochastic
/// degradedness factorization test). Equalities are passed as pairs of
/// inequalities to the two-phase simplex.
pub fn equality_system_feasible(e: &[Vec<Rat>], f: &[Rat]) -> bool {
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(2 * e.len());
    let mut b: Vec<Rat> = Vec::with_capacity(2 * e.len());
    for (row, rhs) in e.iter().zip(f.iter()) {
        a.push(row.clone());
        b.push(rhs.clone());
        a.push(row.iter().map(|v| -v.clone()).collect());
        b.push(-rhs.clone());
    }
    let c = vec![Rat::zero(); e.first().map_or(0, |r| r.len())];
    !matches!(lp_maximize(&a, &b, &c), LpOutcome::Infeasible)
}
