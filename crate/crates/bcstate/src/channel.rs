//! Channel model, side-information configuration, auxiliary schemes, and the
//! joint distribution they induce.
//!
//! The model is a two-receiver memoryless broadcast channel with an i.i.d.
//! state: in each use, a state `S ~ p(s)` is drawn, the encoder puts `X` on
//! the channel, and the receivers observe `(Y1, Y2) ~ p(y1,y2|x,s)`.
//! Availability of the state is configured per terminal:
//!
//! * at the transmitter: not at all, causally (past and current states), or
//!   non-causally (the whole state sequence ahead of time);
//! * at each receiver: yes or no. A receiver that knows the state effectively
//!   observes the pair `Ỹi = (Yi, S)`.
//!
//! A coding scheme is described in single-letter form by auxiliary variables
//! `(U0, U1, U2) ~ p_aux(·|s̃)` and a deterministic symbol map
//! `x = γ(u0, u1, u2, s̃)`, where `s̃` is the state as seen by the encoder:
//! `s̃ = s` when the transmitter has (causal or non-causal) state access and a
//! dummy constant otherwise. Only a non-causal encoder may *correlate* the
//! auxiliaries with the state, so `p_aux` has one slice per state value under
//! non-causal access and exactly one slice otherwise; the causal encoder still
//! gets to *react* to the current state through `γ` (a Shannon strategy).
//!
//! [`build_joint`] assembles the seven-variable joint
//! `p(s) · p_aux(u0,u1,u2|s̃(s)) · 1{x = γ(u0,u1,u2,s̃(s))} · p(y1,y2|x,s)`
//! from which every information measure downstream is computed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for human-authored probability inputs (file or API).
pub const INPUT_TOL: f64 = 1e-9;
/// Tolerance for internally constructed distributions (float-exact sums).
pub const INTERNAL_TOL: f64 = 1e-12;
/// Maximum number of entries in the dense seven-variable joint.
pub const MAX_JOINT_ENTRIES: usize = 100_000_000;

/// Where the transmitter learns the channel state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Csit {
    /// The encoder never sees the state.
    None,
    /// At time `j` the encoder has seen states `s_1..s_j`.
    Causal,
    /// The encoder sees the entire state sequence before transmitting.
    NonCausal,
}

/// Side-information configuration: state availability at each terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideInfoConfig {
    pub csit: Csit,
    pub state_at_rx1: bool,
    pub state_at_rx2: bool,
}

impl SideInfoConfig {
    /// Number of distinct `s̃` values the auxiliary distribution may condition
    /// on: the state alphabet size under non-causal access, one otherwise.
    pub fn aux_slice_count(&self, s_size: usize) -> usize {
        match self.csit {
            Csit::NonCausal => s_size,
            _ => 1,
        }
    }

    /// Number of distinct `s̃` values the symbol map `γ` may depend on: the
    /// state alphabet size whenever the transmitter has state access.
    pub fn gamma_slice_count(&self, s_size: usize) -> usize {
        match self.csit {
            Csit::Causal | Csit::NonCausal => s_size,
            Csit::None => 1,
        }
    }
}

/// Finite-alphabet broadcast channel with i.i.d. state.
///
/// `p_trans` is indexed `[s][x][y1][y2]`, row-major and zero-based, exactly as
/// in the JSON interchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub x_size: usize,
    pub s_size: usize,
    pub y1_size: usize,
    pub y2_size: usize,
    pub p_s: Vec<f64>,
    pub p_trans: Vec<Vec<Vec<Vec<f64>>>>,
}

impl ChannelSpec {
    /// Transition probability `p(y1, y2 | x, s)`.
    pub fn trans(&self, s: usize, x: usize, y1: usize, y2: usize) -> f64 {
        self.p_trans[s][x][y1][y2]
    }
}

/// Auxiliary-variable scheme: `p_aux(u0,u1,u2|s̃)` plus `x = γ(u0,u1,u2,s̃)`.
///
/// `p_aux` is indexed `[s̃][u0][u1][u2]`; `gamma` is indexed `[u0][u1][u2][s̃]`.
/// The `s̃` extents are dictated by the [`SideInfoConfig`], see
/// [`SideInfoConfig::aux_slice_count`] and [`SideInfoConfig::gamma_slice_count`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxScheme {
    pub u0_size: usize,
    pub u1_size: usize,
    pub u2_size: usize,
    pub p_aux: Vec<Vec<Vec<Vec<f64>>>>,
    pub gamma: Vec<Vec<Vec<Vec<usize>>>>,
}

impl AuxScheme {
    pub fn aux(&self, s_tilde: usize, u0: usize, u1: usize, u2: usize) -> f64 {
        self.p_aux[s_tilde][u0][u1][u2]
    }

    pub fn map(&self, u0: usize, u1: usize, u2: usize, s_tilde: usize) -> usize {
        self.gamma[u0][u1][u2][s_tilde]
    }
}

/// Validation and construction failures for channel-layer objects.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("negative probability {value} at {location}")]
    NegativeProbability { location: String, value: f64 },
    #[error("probability row {location} sums to {sum} (deviation {deviation})")]
    RowSumMismatch {
        location: String,
        sum: f64,
        deviation: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("joint distribution would need {0} entries (limit {MAX_JOINT_ENTRIES})")]
    TooLarge(usize),
    #[error("gamma output {value} out of range for x_size {x_size} at {location}")]
    GammaOutOfRange {
        location: String,
        value: usize,
        x_size: usize,
    },
}

fn check_row(location: &str, row: impl Iterator<Item = f64> + Clone) -> Result<(), ChannelError> {
    for (i, p) in row.clone().enumerate() {
        if p < 0.0 || !p.is_finite() {
            return Err(ChannelError::NegativeProbability {
                location: format!("{location}[{i}]"),
                value: p,
            });
        }
    }
    let sum: f64 = row.sum();
    let deviation = (sum - 1.0).abs();
    if deviation > INPUT_TOL {
        return Err(ChannelError::RowSumMismatch {
            location: location.to_string(),
            sum,
            deviation,
        });
    }
    Ok(())
}

/// Checks the [`ChannelSpec`] invariants: positive alphabet sizes, array
/// shapes, entries in `[0,1]`, `p_s` and every `p(·,·|x,s)` row summing to one
/// within [`INPUT_TOL`]. The first violated row is reported with its sum.
pub fn validate_channel(spec: &ChannelSpec) -> Result<(), ChannelError> {
    if spec.x_size == 0 || spec.s_size == 0 || spec.y1_size == 0 || spec.y2_size == 0 {
        return Err(ChannelError::DimensionMismatch(
            "alphabet sizes must be positive".into(),
        ));
    }
    if spec.p_s.len() != spec.s_size {
        return Err(ChannelError::DimensionMismatch(format!(
            "p_s has {} entries, expected s_size = {}",
            spec.p_s.len(),
            spec.s_size
        )));
    }
    check_row("p_s", spec.p_s.iter().copied())?;
    if spec.p_trans.len() != spec.s_size {
        return Err(ChannelError::DimensionMismatch(format!(
            "p_trans has {} state slices, expected {}",
            spec.p_trans.len(),
            spec.s_size
        )));
    }
    for (s, per_x) in spec.p_trans.iter().enumerate() {
        if per_x.len() != spec.x_size {
            return Err(ChannelError::DimensionMismatch(format!(
                "p_trans[{s}] has {} input slices, expected {}",
                per_x.len(),
                spec.x_size
            )));
        }
        for (x, per_y1) in per_x.iter().enumerate() {
            if per_y1.len() != spec.y1_size
                || per_y1.iter().any(|per_y2| per_y2.len() != spec.y2_size)
            {
                return Err(ChannelError::DimensionMismatch(format!(
                    "p_trans[{s}][{x}] is not a {}x{} table",
                    spec.y1_size, spec.y2_size
                )));
            }
            check_row(
                &format!("p_trans[{s}][{x}]"),
                per_y1.iter().flat_map(|r| r.iter().copied()),
            )?;
        }
    }
    Ok(())
}

/// Checks an [`AuxScheme`] against a channel and side-information
/// configuration: slice counts, per-slice normalization, and `γ` landing in
/// the channel input alphabet.
pub fn validate_scheme(
    scheme: &AuxScheme,
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
) -> Result<(), ChannelError> {
    if scheme.u0_size == 0 || scheme.u1_size == 0 || scheme.u2_size == 0 {
        return Err(ChannelError::DimensionMismatch(
            "auxiliary cardinalities must be positive".into(),
        ));
    }
    let aux_slices = cfg.aux_slice_count(spec.s_size);
    if scheme.p_aux.len() != aux_slices {
        return Err(ChannelError::DimensionMismatch(format!(
            "p_aux has {} slices, expected {aux_slices} for this CSIT mode",
            scheme.p_aux.len()
        )));
    }
    for (st, slice) in scheme.p_aux.iter().enumerate() {
        if slice.len() != scheme.u0_size
            || slice.iter().any(|a| {
                a.len() != scheme.u1_size || a.iter().any(|b| b.len() != scheme.u2_size)
            })
        {
            return Err(ChannelError::DimensionMismatch(format!(
                "p_aux[{st}] is not a {}x{}x{} table",
                scheme.u0_size, scheme.u1_size, scheme.u2_size
            )));
        }
        check_row(
            &format!("p_aux[{st}]"),
            slice
                .iter()
                .flat_map(|a| a.iter().flat_map(|b| b.iter().copied())),
        )?;
    }
    let gamma_slices = cfg.gamma_slice_count(spec.s_size);
    if scheme.gamma.len() != scheme.u0_size {
        return Err(ChannelError::DimensionMismatch(format!(
            "gamma has {} u0 slices, expected {}",
            scheme.gamma.len(),
            scheme.u0_size
        )));
    }
    for (u0, a) in scheme.gamma.iter().enumerate() {
        if a.len() != scheme.u1_size {
            return Err(ChannelError::DimensionMismatch(format!(
                "gamma[{u0}] has {} u1 slices, expected {}",
                a.len(),
                scheme.u1_size
            )));
        }
        for (u1, b) in a.iter().enumerate() {
            if b.len() != scheme.u2_size {
                return Err(ChannelError::DimensionMismatch(format!(
                    "gamma[{u0}][{u1}] has {} u2 slices, expected {}",
                    b.len(),
                    scheme.u2_size
                )));
            }
            for (u2, c) in b.iter().enumerate() {
                if c.len() != gamma_slices {
                    return Err(ChannelError::DimensionMismatch(format!(
                        "gamma[{u0}][{u1}][{u2}] has {} s̃ entries, expected {gamma_slices}",
                        c.len()
                    )));
                }
                for (st, &x) in c.iter().enumerate() {
                    if x >= spec.x_size {
                        return Err(ChannelError::GammaOutOfRange {
                            location: format!("gamma[{u0}][{u1}][{u2}][{st}]"),
                            value: x,
                            x_size: spec.x_size,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Alphabet sizes of the effective receiver observations `Ỹ1, Ỹ2`.
///
/// A receiver with state access observes the pair `(Yi, S)`, realized as the
/// paired index `ỹi = yi · s_size + s`; otherwise it observes `Yi` alone.
pub fn effective_output_sizes(spec: &ChannelSpec, cfg: &SideInfoConfig) -> (usize, usize) {
    let y1 = if cfg.state_at_rx1 {
        spec.y1_size * spec.s_size
    } else {
        spec.y1_size
    };
    let y2 = if cfg.state_at_rx2 {
        spec.y2_size * spec.s_size
    } else {
        spec.y2_size
    };
    (y1, y2)
}

/// Dense joint PMF over `(S, U0, U1, U2, X, Y1, Y2)` in that axis order.
#[derive(Debug, Clone)]
pub struct JointDist {
    /// Alphabet sizes per axis, ordered `(s, u0, u1, u2, x, y1, y2)`.
    pub dims: [usize; 7],
    /// Row-major probability mass; `dims` products to `p.len()`.
    pub p: Vec<f64>,
    /// Configuration the joint was built under (drives `Ỹi` expansion).
    pub cfg: SideInfoConfig,
}

impl JointDist {
    /// Row-major strides matching `dims`.
    pub fn strides(&self) -> [usize; 7] {
        let mut st = [0usize; 7];
        let mut acc = 1;
        for i in (0..7).rev() {
            st[i] = acc;
            acc *= self.dims[i];
        }
        st
    }

    /// Marginal PMF over the axes selected by `mask` (bit `i` keeps axis `i`),
    /// laid out row-major over the kept axes in axis order.
    pub fn marginal(&self, mask: u8) -> Vec<f64> {
        let kept: Vec<usize> = (0..7).filter(|i| mask & (1 << i) != 0).collect();
        let out_len: usize = kept.iter().map(|&i| self.dims[i]).product();
        let mut out = vec![0.0; out_len.max(1)];
        let strides = self.strides();
        let mut out_strides = vec![0usize; kept.len()];
        {
            let mut acc = 1;
            for (k, &axis) in kept.iter().enumerate().rev() {
                out_strides[k] = acc;
                acc *= self.dims[axis];
            }
        }
        for (flat, &mass) in self.p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let mut idx = 0;
            for (k, &axis) in kept.iter().enumerate() {
                idx += (flat / strides[axis] % self.dims[axis]) * out_strides[k];
            }
            out[idx] += mass;
        }
        out
    }

    /// Total probability mass (should be 1 within [`INTERNAL_TOL`] of float
    /// accumulation for any valid construction).
    pub fn total_mass(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Builds the seven-variable joint
/// `p(s) · p_aux(u0,u1,u2|s̃(s)) · 1{x = γ(u0,u1,u2,s̃(s))} · p(y1,y2|x,s)`
/// where `s̃(s) = s` under causal or non-causal transmitter state access and a
/// single dummy value otherwise (for `p_aux`, only non-causal access exposes
/// the true state).
pub fn build_joint(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    scheme: &AuxScheme,
) -> Result<JointDist, ChannelError> {
    validate_channel(spec)?;
    validate_scheme(scheme, spec, cfg)?;
    let dims = [
        spec.s_size,
        scheme.u0_size,
        scheme.u1_size,
        scheme.u2_size,
        spec.x_size,
        spec.y1_size,
        spec.y2_size,
    ];
    let entries: usize = dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d).filter(|&n| n <= MAX_JOINT_ENTRIES)
    }).ok_or_else(|| {
        ChannelError::TooLarge(dims.iter().map(|&d| d as f64).product::<f64>() as usize)
    })?;
    let mut p = vec![0.0; entries];
    let y_block = spec.y1_size * spec.y2_size;
    let mut base = 0usize;
    for s in 0..spec.s_size {
        let aux_slice = if cfg.aux_slice_count(spec.s_size) == 1 { 0 } else { s };
        let gamma_slice = if cfg.gamma_slice_count(spec.s_size) == 1 { 0 } else { s };
        for u0 in 0..scheme.u0_size {
            for u1 in 0..scheme.u1_size {
                for u2 in 0..scheme.u2_size {
                    let w = spec.p_s[s] * scheme.aux(aux_slice, u0, u1, u2);
                    let x = scheme.map(u0, u1, u2, gamma_slice);
                    if w > 0.0 {
                        let cell = base + x * y_block;
                        let table = &spec.p_trans[s][x];
                        for y1 in 0..spec.y1_size {
                            for y2 in 0..spec.y2_size {
                                p[cell + y1 * spec.y2_size + y2] = w * table[y1][y2];
                            }
                        }
                    }
                    base += spec.x_size * y_block;
                }
            }
        }
    }
    Ok(JointDist {
        dims,
        p,
        cfg: *cfg,
    })
}

// ---------------------------------------------------------------------------
// Stochastic degradedness
// ---------------------------------------------------------------------------

/// Exact test of whether receiver 2 is stochastically degraded with respect to
/// receiver 1: does a single post-processing channel `q(y2|y1)` exist with
/// `p(y2|x,s) = Σ_{y1} p(y1|x,s) · q(y2|y1)` for every `(s, x, y2)`?
///
/// The factorization is decided as an exact rational feasibility problem — the
/// unknowns are the `y1_size · y2_size` entries of `q`, constrained to be
/// non-negative with unit row sums — so boundary cases are resolved without
/// floating-point doubt. The degraded-channel capacity formulas in
/// [`crate::region`] are meaningful exactly when this factorization holds.
pub fn stochastically_degraded(spec: &ChannelSpec) -> Result<bool, ChannelError> {
    use crate::exact::{equality_system_feasible, rat_from_f64, Rat};
    use num_traits::{One, Zero};

    validate_channel(spec)?;
    let (ny1, ny2) = (spec.y1_size, spec.y2_size);
    let cols = ny1 * ny2; // unknowns q[y1][y2], flattened y1-major
    let mut lhs: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    // One factorization constraint per (s, x, y2); marginals of p(y1,y2|x,s)
    // are summed in exact arithmetic so both sides are consistent rationals.
    for s in 0..spec.s_size {
        for x in 0..spec.x_size {
            for y2 in 0..ny2 {
                let mut row = vec![Rat::zero(); cols];
                for y1 in 0..ny1 {
                    row[y1 * ny2 + y2] = (0..ny2)
                        .map(|b| rat_from_f64(spec.trans(s, x, y1, b)))
                        .sum();
                }
                lhs.push(row);
                rhs.push(
                    (0..ny1)
                        .map(|a| rat_from_f64(spec.trans(s, x, a, y2)))
                        .sum(),
                );
            }
        }
    }
    // q must be row-stochastic.
    for y1 in 0..ny1 {
        let mut row = vec![Rat::zero(); cols];
        for y2 in 0..ny2 {
            row[y1 * ny2 + y2] = Rat::one();
        }
        lhs.push(row);
        rhs.push(Rat::one());
    }
    Ok(equality_system_feasible(&lhs, &rhs))
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

/// Parses a [`ChannelSpec`] from its JSON interchange form and validates it.
pub fn channel_from_json(text: &str) -> Result<ChannelSpec, String> {
    let spec: ChannelSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
    validate_channel(&spec).map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Parses an [`AuxScheme`] from its JSON interchange form (validation against
/// a channel and configuration is a separate step, [`validate_scheme`]).
pub fn scheme_from_json(text: &str) -> Result<AuxScheme, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary noiseless channel with a singleton state: `Y1 = Y2 = X`.
    pub(crate) fn bit_pipe() -> ChannelSpec {
        ChannelSpec {
            x_size: 2,
            s_size: 1,
            y1_size: 2,
            y2_size: 2,
            p_s: vec![1.0],
            p_trans: vec![vec![
                vec![vec![1.0, 0.0], vec![0.0, 0.0]],
                vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            ]],
        }
    }

    #[test]
    fn bit_pipe_is_valid() {
        validate_channel(&bit_pipe()).expect("noiseless bit pipe must validate");
    }

    #[test]
    fn bad_state_distribution_reports_deviation() {
        let mut spec = bit_pipe();
        spec.s_size = 2;
        spec.p_s = vec![0.5, 0.6];
        spec.p_trans.push(spec.p_trans[0].clone());
        match validate_channel(&spec) {
            Err(ChannelError::RowSumMismatch { deviation, .. }) => {
                assert!(
                    (deviation - 0.1).abs() < 1e-12,
                    "expected deviation 0.1, got {deviation}"
                );
            }
            other => panic!("expected RowSumMismatch, got {other:?}"),
        }
    }

    #[test]
    fn negative_entry_is_rejected() {
        let mut spec = bit_pipe();
        spec.p_trans[0][0][0][0] = -0.1;
        assert!(matches!(
            validate_channel(&spec),
            Err(ChannelError::NegativeProbability { .. })
        ));
    }

    /// `Y1 = BSC(a)(X ⊕ S)` with `Y2 = BSC(b)(Y1)` when `cascade` is set,
    /// else an independent second leg `Y2 = BSC(b)(X ⊕ S)`.
    fn bsc_pair(a: f64, b: f64, cascade: bool) -> ChannelSpec {
        let bsc = |p: f64, i: usize, o: usize| if i == o { 1.0 - p } else { p };
        let mut p_trans = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
        for (s, x, y1, y2) in
            itertools_free::product4(2, 2, 2, 2)
        {
            let clean = x ^ s;
            let leg2 = if cascade { bsc(b, y1, y2) } else { bsc(b, clean, y2) };
            p_trans[s][x][y1][y2] = bsc(a, clean, y1) * leg2;
        }
        ChannelSpec {
            x_size: 2,
            s_size: 2,
            y1_size: 2,
            y2_size: 2,
            p_s: vec![0.5, 0.5],
            p_trans,
        }
    }

    /// Tiny local product iterator so the test reads as one loop.
    mod itertools_free {
        pub fn product4(
            a: usize,
            b: usize,
            c: usize,
            d: usize,
        ) -> impl Iterator<Item = (usize, usize, usize, usize)> {
            (0..a).flat_map(move |i| {
                (0..b).flat_map(move |j| {
                    (0..c).flat_map(move |k| (0..d).map(move |l| (i, j, k, l)))
                })
            })
        }
    }

    #[test]
    fn degradedness_factorization_is_decided_exactly() {
        // A genuine cascade factors through q = BSC(0.15).
        assert_eq!(stochastically_degraded(&bsc_pair(0.1, 0.15, true)), Ok(true));
        // The identity map witnesses a noiseless pipe.
        assert_eq!(stochastically_degraded(&bit_pipe()), Ok(true));
        // Swapping the roles makes receiver 2 the *cleaner* one: the required
        // post-processing would need q(0|0) - q(0|1) = 0.8 / 0.56 > 1.
        let mut swapped = bsc_pair(0.1, 0.15, true);
        for s in 0..2 {
            for x in 0..2 {
                let mut t = vec![vec![0.0; 2]; 2];
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        t[y2][y1] = swapped.p_trans[s][x][y1][y2];
                    }
                }
                swapped.p_trans[s][x] = t;
            }
        }
        assert_eq!(stochastically_degraded(&swapped), Ok(false));
        // Degradedness is about conditional *marginals*, not the joint:
        // independent parallel legs with a noisier second leg still factor,
        // through q = BSC(c) with 0.1 + 0.8c = 0.15.
        assert_eq!(
            stochastically_degraded(&bsc_pair(0.1, 0.15, false)),
            Ok(true)
        );
        // Non-comparable outputs never factor: with Y1 = X and Y2 = S, any
        // post-processing of Y1 is state-independent while p(y2|x,s) is not.
        let incomparable = ChannelSpec {
            x_size: 2,
            s_size: 2,
            y1_size: 2,
            y2_size: 2,
            p_s: vec![0.5, 0.5],
            p_trans: (0..2)
                .map(|s| {
                    (0..2)
                        .map(|x| {
                            let mut block = vec![vec![0.0; 2]; 2];
                            block[x][s] = 1.0;
                            block
                        })
                        .collect()
                })
                .collect(),
        };
        assert_eq!(stochastically_degraded(&incomparable), Ok(false));
    }
}
