//! Rate regions: polyhedra over the five message rates (R0..R4) with
//! inequality rows `Σ cᵢ·Rᵢ ≤ rhs`, plus exact polytope queries.
//!
//! [`eval_bound`] instantiates each supported inequality family at a joint
//! distribution by computing the information-measure right-hand sides.
//! Queries ([`support`], [`region_subset`], [`hull_extreme_points`]) run on
//! exact rationals so results carry no LP tolerance noise; every finite `f64`
//! converts to a rational exactly.

use crate::channel::{Csit, JointDist};
use crate::exact::{self, rat_from_f64, rat_to_f64, LpOutcome, Rat};
use crate::measures::{conditional_mi, mutual_information, Axis, InfoError, VarGroup};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of rate coordinates (R0..R4).
pub const RATE_DIMS: usize = 5;

/// Slack allowed when testing membership with float arithmetic.
pub const CONTAINS_TOL: f64 = 1e-9;

/// A tuple of message rates in bits per channel use. R0 is the common
/// message; R1/R2 are the receiver-1/receiver-2 private messages; R3/R4 are
/// the private-message parts known a priori to the *other* receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl RatePoint {
    pub const ORIGIN: RatePoint = RatePoint {
        r0: 0.0,
        r1: 0.0,
        r2: 0.0,
        r3: 0.0,
        r4: 0.0,
    };

    pub fn new(r0: f64, r1: f64, r2: f64, r3: f64, r4: f64) -> Self {
        RatePoint { r0, r1, r2, r3, r4 }
    }

    pub fn as_array(self) -> [f64; RATE_DIMS] {
        [self.r0, self.r1, self.r2, self.r3, self.r4]
    }

    pub fn from_array(a: [f64; RATE_DIMS]) -> Self {
        RatePoint::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// All coordinates finite and nonnegative.
    pub fn is_valid(self) -> bool {
        self.as_array().iter().all(|r| r.is_finite() && *r >= 0.0)
    }
}

/// One region row: `coeffs · (R0..R4) ≤ rhs` (closure semantics throughout;
/// the achievability statements use strict inequalities, but only the closed
/// region has a testable boundary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub coeffs: [u32; RATE_DIMS],
    pub rhs: f64,
}

/// Intersection of [`Inequality`] rows with implicit `R ≥ 0`. A negative rhs
/// is reported as-is (never clamped): it certifies an empty region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateRegion {
    pub rows: Vec<Inequality>,
}

impl RateRegion {
    pub fn new(rows: Vec<Inequality>) -> Self {
        RateRegion { rows }
    }

    pub fn is_empty_region(&self) -> bool {
        self.rows.iter().any(|r| r.rhs < 0.0)
    }

    /// Serializes as a JSON list of `{"coeffs":[c0..c4],"rhs":..}` objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, RegionError> {
        let region: RateRegion = serde_json::from_str(text)
            .map_err(|e| RegionError::InvalidRegion(e.to_string()))?;
        for row in &region.rows {
            if !row.rhs.is_finite() {
                return Err(RegionError::InvalidRegion(format!(
                    "non-finite rhs {}",
                    row.rhs
                )));
            }
        }
        Ok(region)
    }
}

/// The inequality families this crate evaluates at a scheme.
///
/// * `CausalNoRmsi` — five-row inner bound for causal transmitter state
///   knowledge, no receiver message side information.
/// * `UnifiedNoRmsi` — same five left-hand patterns with the `I(·;S)`
///   corrections, valid for causal and non-causal alike.
/// * `UnifiedRmsi` — the unified bound with the R3/R4 side-information rates.
/// * `DegradedCausalTxOnly` — three-row capacity formula for a degraded pair
///   with causal state at the transmitter only (U2 degenerate).
/// * `DegradedCausalStateRx1` — causal variant with state also at receiver 1
///   (receiver 2 optionally).
/// * `DegradedNonCausalStateRx1` — non-causal variant with state at
///   receiver 1 (receiver 2 optionally).
///
/// The degraded families are capacity formulas only under a degradedness
/// assumption the caller must assert; this module does not check it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    CausalNoRmsi,
    UnifiedNoRmsi,
    UnifiedRmsi,
    DegradedCausalTxOnly,
    DegradedCausalStateRx1,
    DegradedNonCausalStateRx1,
}

impl BoundFamily {
    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::CausalNoRmsi => "causal-no-rmsi",
            BoundFamily::UnifiedNoRmsi => "unified-no-rmsi",
            BoundFamily::UnifiedRmsi => "unified-rmsi",
            BoundFamily::DegradedCausalTxOnly => "degraded-causal-tx-only",
            BoundFamily::DegradedCausalStateRx1 => "degraded-causal-state-rx1",
            BoundFamily::DegradedNonCausalStateRx1 => "degraded-noncausal-state-rx1",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("region is empty: an inequality has negative right-hand side")]
    EmptyRegion,
    #[error("objective unbounded: weight on R{0}, which no inequality bounds")]
    UnboundedObjective(usize),
    #[error("bound family incompatible with configuration: {0}")]
    FamilyConfigMismatch(String),
    #[error("invalid weight vector: {0}")]
    BadWeight(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Info(#[from] InfoError),
}

fn mismatch(msg: impl Into<String>) -> RegionError {
    RegionError::FamilyConfigMismatch(msg.into())
}

/// Evaluates `family` at the joint distribution, producing the region rows
/// with right-hand sides computed from information measures. Negative rhs
/// values pass through untouched.
pub fn eval_bound(joint: &JointDist, family: BoundFamily) -> Result<RateRegion, RegionError> {
    let cfg = joint.cfg;
    let u0 = VarGroup::of(&[Axis::U0]);
    let u1 = VarGroup::of(&[Axis::U1]);
    let u2 = VarGroup::of(&[Axis::U2]);
    let x = VarGroup::of(&[Axis::X]);
    let s = VarGroup::of(&[Axis::S]);
    let y1t = VarGroup::y1_tilde();
    let y2t = VarGroup::y2_tilde();

    let rows = match family {
        BoundFamily::CausalNoRmsi => {
            if cfg.csit == Csit::NonCausal {
                return Err(mismatch(
                    "causal-no-rmsi requires causal (or absent) transmitter state knowledge",
                ));
            }
            let a = mutual_information(joint, u0.with(u1), y1t)?;
            let b = conditional_mi(joint, u1, y1t, u0)?;
            let c = mutual_information(joint, u0.with(u2), y2t)?;
            let d = conditional_mi(joint, u2, y2t, u0)?;
            let k = conditional_mi(joint, u1, u2, u0)?;
            vec![
                Inequality { coeffs: [1, 1, 0, 0, 0], rhs: a },
                Inequality { coeffs: [1, 0, 1, 0, 0], rhs: c },
                Inequality { coeffs: [1, 1, 1, 0, 0], rhs: a + d - k },
                Inequality { coeffs: [1, 1, 1, 0, 0], rhs: b + c - k },
                Inequality { coeffs: [2, 1, 1, 0, 0], rhs: a + c - k },
            ]
        }
        BoundFamily::UnifiedNoRmsi | BoundFamily::UnifiedRmsi => {
            let a = mutual_information(joint, u0.with(u1), y1t)?;
            let b = conditional_mi(joint, u1, y1t, u0)?;
            let c = mutual_information(joint, u0.with(u2), y2t)?;
            let d = conditional_mi(joint, u2, y2t, u0)?;
            let k = conditional_mi(joint, u1, u2, u0)?;
            let s0 = mutual_information(joint, u0, s)?;
            let s01 = mutual_information(joint, u0.with(u1), s)?;
            let s02 = mutual_information(joint, u0.with(u2), s)?;
            let s012 = mutual_information(joint, u0.with(u1).with(u2), s)?;
            let rmsi = family == BoundFamily::UnifiedRmsi;
            let p = |no_rmsi: [u32; 5], with_rmsi: [u32; 5]| {
                if rmsi {
                    with_rmsi
                } else {
                    no_rmsi
                }
            };
            vec![
                Inequality { coeffs: p([1, 1, 0, 0, 0], [1, 1, 0, 1, 0]), rhs: a - s01 },
                Inequality { coeffs: p([1, 0, 1, 0, 0], [1, 0, 1, 0, 1]), rhs: c - s02 },
                Inequality { coeffs: p([1, 1, 1, 0, 0], [1, 1, 1, 1, 0]), rhs: a + d - k - s012 },
                Inequality { coeffs: p([1, 1, 1, 0, 0], [1, 1, 1, 0, 1]), rhs: b + c - k - s012 },
                Inequality {
                    coeffs: p([2, 1, 1, 0, 0], [2, 1, 1, 1, 1]),
                    rhs: a + c - k - s012 - s0,
                },
            ]
        }
        BoundFamily::DegradedCausalTxOnly
        | BoundFamily::DegradedCausalStateRx1
        | BoundFamily::DegradedNonCausalStateRx1 => {
            if joint.dims[3] != 1 {
                return Err(mismatch("degraded capacity formulas require u2_size = 1"));
            }
            match family {
                BoundFamily::DegradedCausalTxOnly => {
                    if cfg.csit != Csit::Causal || cfg.state_at_rx1 || cfg.state_at_rx2 {
                        return Err(mismatch(
                            "degraded-causal-tx-only requires causal CSIT and no receiver state",
                        ));
                    }
                }
                BoundFamily::DegradedCausalStateRx1 => {
                    if cfg.csit != Csit::Causal || !cfg.state_at_rx1 {
                        return Err(mismatch(
                            "degraded-causal-state-rx1 requires causal CSIT and state at receiver 1",
                        ));
                    }
                }
                _ => {
                    if cfg.csit != Csit::NonCausal || !cfg.state_at_rx1 {
                        return Err(mismatch(
                            "degraded-noncausal-state-rx1 requires non-causal CSIT and state at receiver 1",
                        ));
                    }
                }
            }
            // Receiver 2's observation carries the state only when it has it.
            let rx2_obs = y2t;
            let (first, third_extra) = match family {
                BoundFamily::DegradedCausalTxOnly => {
                    let i_u0_y2 = mutual_information(joint, u0, rx2_obs)?;
                    let i_u1_y1_u0 = conditional_mi(joint, u1, y1t, u0)?;
                    (i_u0_y2, i_u1_y1_u0)
                }
                BoundFamily::DegradedCausalStateRx1 => {
                    let i_u0_y2 = mutual_information(joint, u0, rx2_obs)?;
                    let i_x_y1_u0s = conditional_mi(
                        joint,
                        x,
                        VarGroup::of(&[Axis::Y1]),
                        u0.with(s),
                    )?;
                    (i_u0_y2, i_x_y1_u0s)
                }
                _ => {
                    let i_u0_y2 = mutual_information(joint, u0, rx2_obs)?;
                    let s0 = mutual_information(joint, u0, s)?;
                    let i_x_y1_u0s = conditional_mi(
                        joint,
                        x,
                        VarGroup::of(&[Axis::Y1]),
                        u0.with(s),
                    )?;
                    (i_u0_y2 - s0, i_x_y1_u0s)
                }
            };
            let second = match family {
                BoundFamily::DegradedCausalTxOnly => {
                    mutual_information(joint, u0.with(u1), VarGroup::of(&[Axis::Y1]))?
                }
                _ => conditional_mi(joint, x, VarGroup::of(&[Axis::Y1]), s)?,
            };
            vec![
                Inequality { coeffs: [1, 0, 1, 0, 1], rhs: first },
                Inequality { coeffs: [1, 1, 1, 1, 0], rhs: second },
                Inequality { coeffs: [1, 1, 1, 0, 1], rhs: first + third_extra },
            ]
        }
    };
    Ok(RateRegion::new(rows))
}

/// Membership with closure semantics: every row satisfied with slack
/// ≥ −[`CONTAINS_TOL`], and coordinates nonnegative to the same slack.
pub fn region_contains(region: &RateRegion, p: RatePoint) -> bool {
    let arr = p.as_array();
    if arr.iter().any(|r| *r < -CONTAINS_TOL) {
        return false;
    }
    region.rows.iter().all(|row| {
        let lhs: f64 = row
            .coeffs
            .iter()
            .zip(arr.iter())
            .map(|(c, r)| f64::from(*c) * r)
            .sum();
        lhs <= row.rhs + CONTAINS_TOL
    })
}

fn validate_weights(w: &[f64; RATE_DIMS]) -> Result<(), RegionError> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(RegionError::BadWeight(
            "weights must be finite and nonnegative".into(),
        ));
    }
    if w.iter().all(|x| *x == 0.0) {
        return Err(RegionError::BadWeight("weights must not all be zero".into()));
    }
    Ok(())
}

/// Maximum of `w · R` over the region (with `R ≥ 0`), solved exactly.
///
/// Coordinates with zero weight are pinned to zero first — with nonnegative
/// row coefficients this never lowers the optimum, and it keeps the program
/// bounded when an unweighted coordinate appears in no row. A *weighted*
/// coordinate that appears in no row makes the objective genuinely unbounded
/// and is reported as [`RegionError::UnboundedObjective`].
pub fn support(region: &RateRegion, w: &[f64; RATE_DIMS]) -> Result<f64, RegionError> {
    validate_weights(w)?;
    for row in &region.rows {
        if !row.rhs.is_finite() {
            return Err(RegionError::InvalidRegion(format!(
                "non-finite rhs {}",
                row.rhs
            )));
        }
        if row.rhs < 0.0 {
            return Err(RegionError::EmptyRegion);
        }
    }
    let coords: Vec<usize> = (0..RATE_DIMS).filter(|&i| w[i] > 0.0).collect();
    for &i in &coords {
        if !region.rows.iter().any(|row| row.coeffs[i] > 0) {
            return Err(RegionError::UnboundedObjective(i));
        }
    }
    let a: Vec<Vec<Rat>> = region
        .rows
        .iter()
        .map(|row| {
            coords
                .iter()
                .map(|&i| Rat::from_integer(row.coeffs[i].into()))
                .collect()
        })
        .collect();
    let b: Vec<Rat> = region.rows.iter().map(|row| rat_from_f64(row.rhs)).collect();
    let c: Vec<Rat> = coords.iter().map(|&i| rat_from_f64(w[i])).collect();
    match exact::lp_maximize(&a, &b, &c) {
        LpOutcome::Optimal(v, _) => Ok(rat_to_f64(&v)),
        // Unreachable given the per-coordinate bounding check above, but map
        // it faithfully rather than panic.
        LpOutcome::Unbounded => Err(RegionError::UnboundedObjective(coords[0])),
        LpOutcome::Infeasible => Err(RegionError::EmptyRegion),
    }
}

/// Coordinates no row bounds (recession directions beyond the origin).
fn unbounded_coords(region: &RateRegion) -> [bool; RATE_DIMS] {
    let mut free = [true; RATE_DIMS];
    for row in &region.rows {
        for i in 0..RATE_DIMS {
            if row.coeffs[i] > 0 {
                free[i] = false;
            }
        }
    }
    free
}

fn exact_rows(region: &RateRegion) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let a = region
        .rows
        .iter()
        .map(|row| {
            row.coeffs
                .iter()
                .map(|&c| Rat::from_integer(c.into()))
                .collect()
        })
        .collect();
    let b = region.rows.iter().map(|row| rat_from_f64(row.rhs)).collect();
    (a, b)
}

/// Exact vertices (basic feasible points) of the region.
pub fn region_vertices(region: &RateRegion) -> Vec<Vec<Rat>> {
    let (a, b) = exact_rows(region);
    exact::enumerate_vertices(&a, &b, RATE_DIMS)
}

/// True iff `inner ⊆ outer` up to `tol` bits of slack per row: every vertex
/// of `inner` satisfies every row of `outer` within `tol`, and every
/// direction `inner` leaves unbounded is also unbounded in `outer` (both
/// regions' recession cones are spanned by the coordinate axes their rows do
/// not touch, so the vertex check plus this direction check is exact).
pub fn region_subset(
    inner: &RateRegion,
    outer: &RateRegion,
    tol: f64,
) -> Result<bool, RegionError> {
    if inner.is_empty_region() {
        return Err(RegionError::EmptyRegion);
    }
    let free_inner = unbounded_coords(inner);
    let free_outer = unbounded_coords(outer);
    for i in 0..RATE_DIMS {
        if free_inner[i] && !free_outer[i] {
            return Ok(false);
        }
    }
    let tol_r = rat_from_f64(tol);
    let (oa, ob) = exact_rows(outer);
    for v in region_vertices(inner) {
        for (row, rhs) in oa.iter().zip(ob.iter()) {
            let lhs = row
                .iter()
                .zip(v.iter())
                .fold(Rat::zero(), |acc, (c, x)| acc + c * x);
            if lhs > rhs + &tol_r {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Convex-hull post-step over a union of regions (not applied anywhere by
/// default): collects the exact vertices of every region and returns the
/// extreme points of their convex hull — the V-representation of the
/// time-shared union for bounded regions. Coordinates left unbounded by a
/// region are recession directions this step does not attempt to merge.
/// Empty regions (negative rhs) contribute nothing.
pub fn hull_extreme_points(regions: &[RateRegion]) -> Vec<[f64; RATE_DIMS]> {
    let mut points: Vec<Vec<Rat>> = Vec::new();
    for region in regions {
        if region.is_empty_region() {
            continue;
        }
        for v in region_vertices(region) {
            if !points.contains(&v) {
                points.push(v);
            }
        }
    }
    points.sort();
    let mut extreme: Vec<Vec<Rat>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let others: Vec<&Vec<Rat>> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q)
            .collect();
        if others.is_empty() || !in_convex_hull(p, &others) {
            extreme.push(p.clone());
        }
    }
    extreme
        .into_iter()
        .map(|v| {
            let mut out = [0.0; RATE_DIMS];
            for (o, r) in out.iter_mut().zip(v.iter()) {
                *o = rat_to_f64(r);
            }
            out
        })
        .collect()
}

/// Exact test whether `p` is a convex combination of `points`.
fn in_convex_hull(p: &[Rat], points: &[&Vec<Rat>]) -> bool {
    // Unknowns λ_j ≥ 0 with Σ λ_j q_j = p and Σ λ_j = 1.
    let m = points.len();
    let mut e: Vec<Vec<Rat>> = Vec::with_capacity(RATE_DIMS + 1);
    let mut f: Vec<Rat> = Vec::with_capacity(RATE_DIMS + 1);
    for d in 0..RATE_DIMS {
        e.push((0..m).map(|j| points[j][d].clone()).collect());
        f.push(p[d].clone());
    }
    e.push(vec![Rat::from_integer(1.into()); m]);
    f.push(Rat::from_integer(1.into()));
    exact::equality_system_feasible(&e, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(rows: &[([u32; 5], f64)]) -> RateRegion {
        RateRegion::new(
            rows.iter()
                .map(|&(coeffs, rhs)| Inequality { coeffs, rhs })
                .collect(),
        )
    }

    #[test]
    fn support_restricts_to_weighted_coordinates() {
        // R0 + R1 ≤ 1 leaves R2..R4 unbounded; weights confined to R0,R1 are
        // fine, a weight on R3 is an error.
        let r = region(&[([1, 1, 0, 0, 0], 1.0)]);
        assert_eq!(support(&r, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(
            support(&r, &[0.0, 0.0, 0.0, 1.0, 0.0]),
            Err(RegionError::UnboundedObjective(3))
        );
    }

    #[test]
    fn empty_region_is_reported() {
        let r = region(&[([1, 0, 0, 0, 0], -0.25)]);
        assert_eq!(
            support(&r, &[1.0, 0.0, 0.0, 0.0, 0.0]),
            Err(RegionError::EmptyRegion)
        );
        assert!(r.is_empty_region());
    }

    #[test]
    fn subset_is_reflexive_and_strict_shrink_is_one_sided() {
        let full = region(&[
            ([1, 1, 0, 0, 0], 1.0),
            ([1, 0, 1, 0, 0], 1.0),
            ([1, 1, 1, 0, 0], 1.0),
            ([1, 1, 1, 0, 0], 1.0),
            ([2, 1, 1, 0, 0], 2.0),
        ]);
        let shrunk = region(&[
            ([1, 1, 0, 0, 0], 0.9),
            ([1, 0, 1, 0, 0], 0.9),
            ([1, 1, 1, 0, 0], 0.9),
            ([1, 1, 1, 0, 0], 0.9),
            ([2, 1, 1, 0, 0], 1.9),
        ]);
        assert!(region_subset(&full, &full, 0.0).unwrap());
        assert!(region_subset(&shrunk, &full, 1e-9).unwrap());
        assert!(!region_subset(&full, &shrunk, 1e-9).unwrap());
    }

    #[test]
    fn hull_extreme_points_drop_interior_vertices() {
        // Two nested one-row regions in R0: hull extreme points are the
        // origin-adjacent axis vertices of the larger one only.
        let small = region(&[([1, 0, 0, 0, 0], 0.5), ([0, 1, 0, 0, 0], 0.5)]);
        let large = region(&[([1, 0, 0, 0, 0], 1.0), ([0, 1, 0, 0, 0], 1.0)]);
        let pts = hull_extreme_points(&[small, large]);
        // Square [0,1]² in (R0,R1): 4 extreme points; the 0.5-square's
        // non-origin vertices are interior or on faces spanned by them.
        assert!(pts.contains(&[1.0, 1.0, 0.0, 0.0, 0.0]));
        assert!(pts.contains(&[0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(!pts.contains(&[0.5, 0.5, 0.0, 0.0, 0.0]));
    }
}
