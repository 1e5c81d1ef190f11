//! Monte Carlo simulation of the layered random-coding schemes at small
//! blocklength: a common superposition layer, Marton-binned private layers,
//! Shannon strategies under causal transmitter state access, bin-selection
//! multicoding under non-causal access, and message side-information
//! pre-coding (the common index absorbs the pre-known private parts).
//!
//! Each trial draws fresh codebooks (random-coding average), encodes with
//! lexicographic first-hit bin selection, decodes by exhaustive
//! joint-typicality scan over each receiver's candidate set, and the run
//! reports the empirical block-error rate with a Wilson 95% interval and a
//! per-cause breakdown. Everything is deterministic given the seed: trial
//! `t` uses an independent counter-mode stream `(seed, t)`, so the report is
//! independent of execution order.

use crate::channel::{build_joint, AuxScheme, ChannelError, ChannelSpec, Csit, SideInfoConfig};
use crate::region::RatePoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on every individual codebook size.
pub const MAX_CODEBOOK: u64 = 1 << 20;
/// Per-trial symbol-operation budget (codebook generation + encoder scan +
/// both decoder scans, each multiplied by the blocklength).
pub const MAX_TRIAL_OPS: u128 = 1_000_000_000;
/// Cap on stored codeword symbols per trial.
pub const MAX_STORED_SYMBOLS: u128 = 200_000_000;
/// Largest alphabet representable in the `u8` sequence storage.
pub const MAX_ALPHABET: usize = 256;

const WILSON_Z: f64 = 1.959963984540054;
/// RNG stream reserved for the shared codebooks in fixed-codebook mode.
const FIXED_BOOKS_STREAM: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error(
        "per-trial budget exceeded: {ops} symbol operations / {symbols} stored symbols \
         (caps {MAX_TRIAL_OPS} / {MAX_STORED_SYMBOLS})"
    )]
    BudgetExceeded { ops: u128, symbols: u128 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Full rate description of one simulated operating point: the five message
/// rates, the private-rate splits between the common and satellite layers,
/// and the three bin rates, all in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRates {
    #[serde(flatten)]
    pub point: RatePoint,
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
    pub rp0: f64,
    pub rp1: f64,
    pub rp2: f64,
}

impl SimRates {
    pub const ZERO: SimRates = SimRates {
        point: RatePoint::ORIGIN,
        r11: 0.0,
        r12: 0.0,
        r21: 0.0,
        r22: 0.0,
        rp0: 0.0,
        rp1: 0.0,
        rp2: 0.0,
    };

    /// A common-message-only point (everything else zero).
    pub fn common_only(r0: f64) -> SimRates {
        SimRates {
            point: RatePoint::new(r0, 0.0, 0.0, 0.0, 0.0),
            ..SimRates::ZERO
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let all = [
            self.point.r0,
            self.point.r1,
            self.point.r2,
            self.point.r3,
            self.point.r4,
            self.r11,
            self.r12,
            self.r21,
            self.r22,
            self.rp0,
            self.rp1,
            self.rp2,
        ];
        if all.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(SimError::BadConfig(
                "all rates must be finite and nonnegative".into(),
            ));
        }
        if (self.point.r1 - self.r11 - self.r12).abs() > 1e-9 {
            return Err(SimError::BadConfig(format!(
                "split mismatch: R1 = {} but R11 + R12 = {}",
                self.point.r1,
                self.r11 + self.r12
            )));
        }
        if (self.point.r2 - self.r21 - self.r22).abs() > 1e-9 {
            return Err(SimError::BadConfig(format!(
                "split mismatch: R2 = {} but R21 + R22 = {}",
                self.point.r2,
                self.r21 + self.r22
            )));
        }
        Ok(())
    }
}

/// One simulation request: blocklength, operating point, typicality slacks
/// (the encoder slack must be strictly smaller than the decoder slacks),
/// trial count, and seed. With `fixed_codebooks` the codebooks are drawn
/// once (from a reserved stream) instead of fresh per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub rates: SimRates,
    pub eps_prime: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub fixed_codebooks: bool,
}

impl SimConfig {
    /// Conventional slacks: encoder 0.1, decoders 0.2.
    pub fn new(n: usize, rates: SimRates, trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            n,
            rates,
            eps_prime: 0.1,
            eps1: 0.2,
            eps2: 0.2,
            trials,
            seed,
            fixed_codebooks: false,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.n < 1 {
            return Err(SimError::BadConfig("blocklength must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(SimError::BadConfig("trial count must be at least 1".into()));
        }
        if !(self.eps_prime > 0.0 && self.eps_prime < self.eps1 && self.eps_prime < self.eps2) {
            return Err(SimError::BadConfig(format!(
                "need 0 < eps_prime < eps1, eps2 (got {}, {}, {})",
                self.eps_prime, self.eps1, self.eps2
            )));
        }
        self.rates.validate()
    }
}

/// Codebook index ranges: message alphabet sizes `2^ceil(n·R)` per layer and
/// the bin counts. With message side information disabled the pre-known
/// parts are absent (`m3 = m4 = 1`); without non-causal state access there
/// is no common bin (`l0 = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub m0: usize,
    pub m3: usize,
    pub m4: usize,
    pub m11: usize,
    pub m12: usize,
    pub m21: usize,
    pub m22: usize,
    pub l0: usize,
    pub l1: usize,
    pub l2: usize,
}

/// `2^ceil(n·rate)` with a dust guard so that integer products of `n` and
/// `rate` do not round up.
fn codebook_size(n: usize, rate: f64) -> Result<usize, SimError> {
    if rate == 0.0 {
        return Ok(1);
    }
    let bits = (n as f64 * rate - 1e-9).ceil().max(0.0) as u64;
    if (1u64 << bits.min(63)) > MAX_CODEBOOK {
        return Err(SimError::BadConfig(format!(
            "codebook size 2^{bits} exceeds the 2^20 cap (n = {n}, rate = {rate})"
        )));
    }
    Ok(1usize << bits)
}

impl Sizes {
    pub fn derive(
        n: usize,
        rates: &SimRates,
        csit: Csit,
        rmsi: bool,
    ) -> Result<Sizes, SimError> {
        if !rmsi && (rates.point.r3 != 0.0 || rates.point.r4 != 0.0) {
            return Err(SimError::BadConfig(
                "R3 and R4 require side-information pre-coding mode".into(),
            ));
        }
        if csit != Csit::NonCausal && rates.rp0 != 0.0 {
            return Err(SimError::BadConfig(
                "a common bin rate R'0 requires non-causal state access".into(),
            ));
        }
        Ok(Sizes {
            m0: codebook_size(n, rates.point.r0)?,
            m3: codebook_size(n, rates.point.r3)?,
            m4: codebook_size(n, rates.point.r4)?,
            m11: codebook_size(n, rates.r11)?,
            m12: codebook_size(n, rates.r12)?,
            m21: codebook_size(n, rates.r21)?,
            m22: codebook_size(n, rates.r22)?,
            l0: codebook_size(n, rates.rp0)?,
            l1: codebook_size(n, rates.rp1)?,
            l2: codebook_size(n, rates.rp2)?,
        })
    }

    /// Number of common-layer codewords (all common indices × bins).
    pub fn common_count(&self) -> u128 {
        self.m0 as u128
            * self.m3 as u128
            * self.m4 as u128
            * self.m11 as u128
            * self.m21 as u128
            * self.l0 as u128
    }
}

/// Messages for one trial, all zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Messages {
    pub m0: usize,
    pub m3: usize,
    pub m4: usize,
    pub m11: usize,
    pub m12: usize,
    pub m21: usize,
    pub m22: usize,
}

/// One trial's codebooks. The common book is indexed by
/// `(m0, m3, m4, m11, m21, l0)` row-major with `l0` fastest; satellite book
/// `i` is indexed by `(common, m_i2, l_i)` row-major and its codewords are
/// drawn symbol-by-symbol conditioned on the common codeword.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub n: usize,
    pub sizes: Sizes,
    pub book0: Vec<Vec<u8>>,
    pub book1: Vec<Vec<u8>>,
    pub book2: Vec<Vec<u8>>,
}

impl Codebooks {
    pub fn common_flat(
        &self,
        m0: usize,
        m3: usize,
        m4: usize,
        m11: usize,
        m21: usize,
        l0: usize,
    ) -> usize {
        let s = &self.sizes;
        ((((m0 * s.m3 + m3) * s.m4 + m4) * s.m11 + m11) * s.m21 + m21) * s.l0 + l0
    }

    pub fn book1_flat(&self, common: usize, m12: usize, l1: usize) -> usize {
        (common * self.sizes.m12 + m12) * self.sizes.l1 + l1
    }

    pub fn book2_flat(&self, common: usize, m22: usize, l2: usize) -> usize {
        (common * self.sizes.m22 + m22) * self.sizes.l2 + l2
    }
}

/// Reference distributions and sampling tables derived from one channel,
/// side-information configuration, and scheme.
#[derive(Debug, Clone)]
pub struct References {
    pub csit: Csit,
    pub state_at_rx1: bool,
    pub state_at_rx2: bool,
    pub s_size: usize,
    /// Whether the symbol map has one slice per state value.
    gamma_by_state: bool,
    pub u_sizes: (usize, usize, usize),
    /// Codeword sampling: marginal of the common layer and the two
    /// satellite conditionals given the common symbol.
    p_u0: Vec<f64>,
    cond1: Vec<Vec<f64>>,
    cond2: Vec<Vec<f64>>,
    /// Encoder covering reference over `(u0, u1, u2)`.
    cover_dims: [usize; 3],
    cover_pmf: Vec<f64>,
    /// Non-causal covering reference over `(s, u0, u1, u2)`.
    ncover_dims: [usize; 4],
    ncover_pmf: Vec<f64>,
    /// Receiver packing references over `(s?, u0, ui, yi)`.
    rx1_dims: Vec<usize>,
    rx1_pmf: Vec<f64>,
    rx2_dims: Vec<usize>,
    rx2_pmf: Vec<f64>,
    /// Channel law rows: `[s][x]` → PMF over the pair index `y1·|Y2| + y2`.
    chan: Vec<Vec<Vec<f64>>>,
    p_s: Vec<f64>,
    y2_size: usize,
}

impl References {
    pub fn new(
        spec: &ChannelSpec,
        cfg: &SideInfoConfig,
        scheme: &AuxScheme,
    ) -> Result<References, SimError> {
        for (name, size) in [
            ("state", spec.s_size),
            ("input", spec.x_size),
            ("output 1", spec.y1_size),
            ("output 2", spec.y2_size),
            ("u0", scheme.u0_size),
            ("u1", scheme.u1_size),
            ("u2", scheme.u2_size),
        ] {
            if size > MAX_ALPHABET {
                return Err(SimError::BadConfig(format!(
                    "{name} alphabet size {size} exceeds {MAX_ALPHABET}"
                )));
            }
        }
        let joint = build_joint(spec, cfg, scheme)?;
        // Axis mask bits: S=1, U0=2, U1=4, U2=8, X=16, Y1=32, Y2=64.
        let cover_pmf = joint.marginal(2 | 4 | 8);
        let ncover_pmf = joint.marginal(1 | 2 | 4 | 8);
        let (rx1_dims, rx1_pmf) = if cfg.state_at_rx1 {
            (
                vec![spec.s_size, scheme.u0_size, scheme.u1_size, spec.y1_size],
                joint.marginal(1 | 2 | 4 | 32),
            )
        } else {
            (
                vec![scheme.u0_size, scheme.u1_size, spec.y1_size],
                joint.marginal(2 | 4 | 32),
            )
        };
        let (rx2_dims, rx2_pmf) = if cfg.state_at_rx2 {
            (
                vec![spec.s_size, scheme.u0_size, scheme.u2_size, spec.y2_size],
                joint.marginal(1 | 2 | 8 | 64),
            )
        } else {
            (
                vec![scheme.u0_size, scheme.u2_size, spec.y2_size],
                joint.marginal(2 | 8 | 64),
            )
        };
        let (u0s, u1s, u2s) = (scheme.u0_size, scheme.u1_size, scheme.u2_size);
        let mut p_u0 = vec![0.0; u0s];
        for (i, &m) in cover_pmf.iter().enumerate() {
            p_u0[i / (u1s * u2s)] += m;
        }
        let mut cond1 = vec![vec![0.0; u1s]; u0s];
        let mut cond2 = vec![vec![0.0; u2s]; u0s];
        for a in 0..u0s {
            if p_u0[a] <= 0.0 {
                continue;
            }
            for b in 0..u1s {
                for c in 0..u2s {
                    let m = cover_pmf[(a * u1s + b) * u2s + c];
                    cond1[a][b] += m / p_u0[a];
                    cond2[a][c] += m / p_u0[a];
                }
            }
        }
        let chan = spec
            .p_trans
            .iter()
            .map(|per_x| {
                per_x
                    .iter()
                    .map(|rows| rows.iter().flatten().copied().collect())
                    .collect()
            })
            .collect();
        Ok(References {
            csit: cfg.csit,
            state_at_rx1: cfg.state_at_rx1,
            state_at_rx2: cfg.state_at_rx2,
            s_size: spec.s_size,
            gamma_by_state: cfg.gamma_slice_count(spec.s_size) > 1,
            u_sizes: (u0s, u1s, u2s),
            p_u0,
            cond1,
            cond2,
            cover_dims: [u0s, u1s, u2s],
            cover_pmf,
            ncover_dims: [spec.s_size, u0s, u1s, u2s],
            ncover_pmf,
            rx1_dims,
            rx1_pmf,
            rx2_dims,
            rx2_pmf,
            chan,
            p_s: spec.p_s.clone(),
            y2_size: spec.y2_size,
        })
    }
}

/// Inverse-CDF draw from a PMF row; zero-mass cells are never selected.
fn inv_cdf(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in row.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// One symbol draw; degenerate alphabets consume no randomness.
fn draw_symbol<R: Rng>(rng: &mut R, row: &[f64]) -> u8 {
    if row.len() <= 1 {
        0
    } else {
        inv_cdf(row, rng.random::<f64>()) as u8
    }
}

/// Uniform index draw; degenerate ranges consume no randomness.
fn draw_index<R: Rng>(rng: &mut R, size: usize) -> usize {
    if size <= 1 {
        0
    } else {
        rng.random_range(0..size)
    }
}

/// Robust joint typicality: for every joint symbol `a`,
/// `|count(a) − n·p(a)| ≤ eps·n·p(a)`; in particular any occurrence of a
/// zero-probability symbol fails.
pub fn typical(seqs: &[&[u8]], dims: &[usize], pmf: &[f64], eps: f64) -> bool {
    let mut scratch = vec![0u32; pmf.len()];
    typical_with(&mut scratch, seqs, dims, pmf, eps)
}

fn typical_with(scratch: &mut [u32], seqs: &[&[u8]], dims: &[usize], pmf: &[f64], eps: f64) -> bool {
    debug_assert_eq!(seqs.len(), dims.len());
    let n = seqs[0].len();
    scratch.fill(0);
    for j in 0..n {
        let mut flat = 0usize;
        for (seq, &d) in seqs.iter().zip(dims.iter()) {
            flat = flat * d + seq[j] as usize;
        }
        if pmf[flat] <= 0.0 {
            return false;
        }
        scratch[flat] += 1;
    }
    let nf = n as f64;
    scratch
        .iter()
        .zip(pmf.iter())
        .all(|(&c, &p)| (c as f64 - nf * p).abs() <= eps * nf * p)
}

/// Draws one full set of codebooks in index order: common book first, then
/// each satellite book, every codeword symbol-by-symbol by inverse CDF.
pub fn draw_codebooks<R: Rng>(rng: &mut R, refs: &References, sizes: Sizes, n: usize) -> Codebooks {
    let common = sizes.common_count() as usize;
    let mut book0 = Vec::with_capacity(common);
    for _ in 0..common {
        let mut seq = vec![0u8; n];
        for sym in seq.iter_mut() {
            *sym = draw_symbol(rng, &refs.p_u0);
        }
        book0.push(seq);
    }
    let mut book1 = Vec::with_capacity(common * sizes.m12 * sizes.l1);
    for u0 in book0.iter() {
        for _ in 0..sizes.m12 * sizes.l1 {
            let mut seq = vec![0u8; n];
            for (sym, &c) in seq.iter_mut().zip(u0.iter()) {
                *sym = draw_symbol(rng, &refs.cond1[c as usize]);
            }
            book1.push(seq);
        }
    }
    let mut book2 = Vec::with_capacity(common * sizes.m22 * sizes.l2);
    for u0 in book0.iter() {
        for _ in 0..sizes.m22 * sizes.l2 {
            let mut seq = vec![0u8; n];
            for (sym, &c) in seq.iter_mut().zip(u0.iter()) {
                *sym = draw_symbol(rng, &refs.cond2[c as usize]);
            }
            book2.push(seq);
        }
    }
    Codebooks {
        n,
        sizes,
        book0,
        book1,
        book2,
    }
}

/// Encoder output: the channel input sequence, the chosen bin indices
/// `(l0, l1, l2)` (zero-based; unused bins report 0), and whether the
/// covering search fell back to the first bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeResult {
    pub x: Vec<u8>,
    pub chosen: (usize, usize, usize),
    pub covering_failed: bool,
}

fn build_x(
    scheme: &AuxScheme,
    refs: &References,
    u0: &[u8],
    u1: &[u8],
    u2: &[u8],
    s_seq: &[u8],
) -> Vec<u8> {
    s_seq
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let slice = if refs.gamma_by_state { s as usize } else { 0 };
            scheme.map(u0[j] as usize, u1[j] as usize, u2[j] as usize, slice) as u8
        })
        .collect()
}

/// Causal encoder: scans `(l1, l2)` in lexicographic order for the first
/// private-layer pair jointly typical with the common codeword (the state
/// plays no role in the selection), falling back to `(0, 0)`; the input
/// symbol at time `j` then depends on the state only through `s_j`.
pub fn encode_causal(
    books: &Codebooks,
    msgs: &Messages,
    s_seq: &[u8],
    scheme: &AuxScheme,
    refs: &References,
    eps_prime: f64,
) -> EncodeResult {
    let sz = &books.sizes;
    let cf = books.common_flat(msgs.m0, msgs.m3, msgs.m4, msgs.m11, msgs.m21, 0);
    let u0 = &books.book0[cf];
    let mut scratch = vec![0u32; refs.cover_pmf.len()];
    let mut chosen = None;
    'outer: for l1 in 0..sz.l1 {
        let u1 = &books.book1[books.book1_flat(cf, msgs.m12, l1)];
        for l2 in 0..sz.l2 {
            let u2 = &books.book2[books.book2_flat(cf, msgs.m22, l2)];
            if typical_with(
                &mut scratch,
                &[u0, u1, u2],
                &refs.cover_dims,
                &refs.cover_pmf,
                eps_prime,
            ) {
                chosen = Some((l1, l2));
                break 'outer;
            }
        }
    }
    let covering_failed = chosen.is_none();
    let (l1, l2) = chosen.unwrap_or((0, 0));
    let u1 = &books.book1[books.book1_flat(cf, msgs.m12, l1)];
    let u2 = &books.book2[books.book2_flat(cf, msgs.m22, l2)];
    EncodeResult {
        x: build_x(scheme, refs, u0, u1, u2, s_seq),
        chosen: (0, l1, l2),
        covering_failed,
    }
}

/// Non-causal encoder: scans `(l0, l1, l2)` in lexicographic order for the
/// first codeword triple jointly typical *with the full state sequence*,
/// falling back to `(0, 0, 0)`.
pub fn encode_noncausal(
    books: &Codebooks,
    msgs: &Messages,
    s_seq: &[u8],
    scheme: &AuxScheme,
    refs: &References,
    eps_prime: f64,
) -> EncodeResult {
    let sz = &books.sizes;
    let mut scratch = vec![0u32; refs.ncover_pmf.len()];
    let mut chosen = None;
    'outer: for l0 in 0..sz.l0 {
        let cf = books.common_flat(msgs.m0, msgs.m3, msgs.m4, msgs.m11, msgs.m21, l0);
        let u0 = &books.book0[cf];
        for l1 in 0..sz.l1 {
            let u1 = &books.book1[books.book1_flat(cf, msgs.m12, l1)];
            for l2 in 0..sz.l2 {
                let u2 = &books.book2[books.book2_flat(cf, msgs.m22, l2)];
                if typical_with(
                    &mut scratch,
                    &[s_seq, u0, u1, u2],
                    &refs.ncover_dims,
                    &refs.ncover_pmf,
                    eps_prime,
                ) {
                    chosen = Some((l0, l1, l2));
                    break 'outer;
                }
            }
        }
    }
    let covering_failed = chosen.is_none();
    let (l0, l1, l2) = chosen.unwrap_or((0, 0, 0));
    let cf = books.common_flat(msgs.m0, msgs.m3, msgs.m4, msgs.m11, msgs.m21, l0);
    let u0 = &books.book0[cf];
    let u1 = &books.book1[books.book1_flat(cf, msgs.m12, l1)];
    let u2 = &books.book2[books.book2_flat(cf, msgs.m22, l2)];
    EncodeResult {
        x: build_x(scheme, refs, u0, u1, u2, s_seq),
        chosen: (l0, l1, l2),
        covering_failed,
    }
}

/// Decoder verdict. The decoded tuple is `(m0, m11, m12, m3)` for receiver 1
/// and `(m0, m21, m22, m4)` for receiver 2. No-candidate and ambiguity are
/// distinct packing failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded([usize; 4]),
    NoCandidate,
    Ambiguous,
}

/// Exhaustive typicality decoding for one receiver. The candidate set runs
/// over every index the receiver does not know: its own messages, the other
/// receiver's common-layer split, and all bin indices; the pre-known side
/// message (`m4` for receiver 1, `m3` for receiver 2) pins its dimension.
/// Candidates count as hits on their decoded-message projection, so bin or
/// nuisance ambiguity alone is harmless. When the receiver's message space
/// is a single tuple it is returned outright (nothing to decode).
fn decode_rx(
    rx2: bool,
    books: &Codebooks,
    y: &[u8],
    s: Option<&[u8]>,
    known_side: usize,
    refs: &References,
    eps: f64,
) -> DecodeOutcome {
    let sz = &books.sizes;
    let (dec_split, nuis_split) = if rx2 {
        (sz.m21, sz.m11)
    } else {
        (sz.m11, sz.m21)
    };
    let (side_size, sat_m, sat_l) = if rx2 {
        (sz.m4, sz.m22, sz.l2)
    } else {
        (sz.m3, sz.m12, sz.l1)
    };
    let space = sz.m0 as u128 * dec_split as u128 * sat_m as u128 * side_size as u128;
    if space == 1 {
        return DecodeOutcome::Decoded([0, 0, 0, 0]);
    }
    let (dims, pmf) = if rx2 {
        (&refs.rx2_dims, &refs.rx2_pmf)
    } else {
        (&refs.rx1_dims, &refs.rx1_pmf)
    };
    let mut scratch = vec![0u32; pmf.len()];
    let mut found: Option<[usize; 4]> = None;
    for m0 in 0..sz.m0 {
        for side in 0..side_size {
            for dsp in 0..dec_split {
                for nsp in 0..nuis_split {
                    for l0 in 0..sz.l0 {
                        let (m3, m4, m11, m21) = if rx2 {
                            (known_side, side, nsp, dsp)
                        } else {
                            (side, known_side, dsp, nsp)
                        };
                        let cf = books.common_flat(m0, m3, m4, m11, m21, l0);
                        let u0 = &books.book0[cf];
                        for sm in 0..sat_m {
                            for sl in 0..sat_l {
                                let usat = if rx2 {
                                    &books.book2[books.book2_flat(cf, sm, sl)]
                                } else {
                                    &books.book1[books.book1_flat(cf, sm, sl)]
                                };
                                let hit = match s {
                                    Some(s_seq) => typical_with(
                                        &mut scratch,
                                        &[s_seq, u0, usat, y],
                                        dims,
                                        pmf,
                                        eps,
                                    ),
                                    None => typical_with(
                                        &mut scratch,
                                        &[u0, usat, y],
                                        dims,
                                        pmf,
                                        eps,
                                    ),
                                };
                                if hit {
                                    let proj = [m0, dsp, sm, side];
                                    match found {
                                        None => found = Some(proj),
                                        Some(prev) if prev == proj => {}
                                        Some(_) => return DecodeOutcome::Ambiguous,
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    match found {
        Some(proj) => DecodeOutcome::Decoded(proj),
        None => DecodeOutcome::NoCandidate,
    }
}

pub fn decode_rx1(
    books: &Codebooks,
    y1: &[u8],
    s: Option<&[u8]>,
    m4_known: usize,
    refs: &References,
    eps: f64,
) -> DecodeOutcome {
    decode_rx(false, books, y1, s, m4_known, refs, eps)
}

pub fn decode_rx2(
    books: &Codebooks,
    y2: &[u8],
    s: Option<&[u8]>,
    m3_known: usize,
    refs: &References,
    eps: f64,
) -> DecodeOutcome {
    decode_rx(true, books, y2, s, m3_known, refs, eps)
}

/// Everything observable from one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub rx1: DecodeOutcome,
    pub rx2: DecodeOutcome,
    pub rx1_ok: bool,
    pub rx2_ok: bool,
    pub covering_failed: bool,
    pub chosen: (usize, usize, usize),
}

/// Failure tallies across trials. A trial can contribute to several causes;
/// a covering failure alone is not a decoding error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseCounts {
    pub covering: u64,
    pub rx1_packing: u64,
    pub rx2_packing: u64,
    pub rx1_ambiguous: u64,
    pub rx2_ambiguous: u64,
}

/// Simulation result: empirical block-error probability (a block error is
/// either receiver outputting the wrong message tuple) with a Wilson 95%
/// interval and the per-cause breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub rates: SimRates,
    pub trials: u64,
    pub p_e: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub causes: CauseCounts,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Wilson 95% score interval for `k` successes in `t` trials.
fn wilson(k: u64, t: u64) -> (f64, f64, f64) {
    let (kf, tf) = (k as f64, t as f64);
    let p = kf / tf;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / tf;
    let center = (p + z2 / (2.0 * tf)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / tf + z2 / (4.0 * tf * tf)).sqrt() / denom;
    (p, (center - half).max(0.0), (center + half).min(1.0))
}

struct SimContext<'a> {
    scheme: &'a AuxScheme,
    sim: &'a SimConfig,
    sizes: Sizes,
    refs: References,
}

impl<'a> SimContext<'a> {
    fn new(
        spec: &'a ChannelSpec,
        cfg: &SideInfoConfig,
        scheme: &'a AuxScheme,
        sim: &'a SimConfig,
        rmsi: bool,
    ) -> Result<SimContext<'a>, SimError> {
        sim.validate()?;
        let refs = References::new(spec, cfg, scheme)?;
        let sizes = Sizes::derive(sim.n, &sim.rates, cfg.csit, rmsi)?;
        let n = sim.n as u128;
        let c0 = sizes.common_count();
        let c1 = c0 * sizes.m12 as u128 * sizes.l1 as u128;
        let c2 = c0 * sizes.m22 as u128 * sizes.l2 as u128;
        let enc = sizes.l0 as u128 * sizes.l1 as u128 * sizes.l2 as u128;
        let rx1 = c1 / sizes.m4 as u128;
        let rx2 = c2 / sizes.m3 as u128;
        let symbols = n * (c0 + c1 + c2);
        let ops = symbols + n * (enc + rx1 + rx2);
        if ops > MAX_TRIAL_OPS || symbols > MAX_STORED_SYMBOLS {
            return Err(SimError::BudgetExceeded { ops, symbols });
        }
        Ok(SimContext {
            scheme,
            sim,
            sizes,
            refs,
        })
    }

    /// Runs trial `t` on its own RNG stream. Consumption order within the
    /// stream: codebooks (skipped in fixed-codebook mode), state sequence,
    /// messages, channel noise; degenerate draws consume nothing.
    fn run_trial(&self, trial: u64, fixed: Option<&Codebooks>) -> TrialOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(self.sim.seed);
        rng.set_stream(trial);
        let fresh;
        let books = match fixed {
            Some(b) => b,
            None => {
                fresh = draw_codebooks(&mut rng, &self.refs, self.sizes, self.sim.n);
                &fresh
            }
        };
        let s_seq: Vec<u8> = (0..self.sim.n)
            .map(|_| draw_symbol(&mut rng, &self.refs.p_s))
            .collect();
        let sz = &self.sizes;
        let msgs = Messages {
            m0: draw_index(&mut rng, sz.m0),
            m3: draw_index(&mut rng, sz.m3),
            m4: draw_index(&mut rng, sz.m4),
            m11: draw_index(&mut rng, sz.m11),
            m12: draw_index(&mut rng, sz.m12),
            m21: draw_index(&mut rng, sz.m21),
            m22: draw_index(&mut rng, sz.m22),
        };
        let enc = if self.refs.csit == Csit::NonCausal {
            encode_noncausal(
                books,
                &msgs,
                &s_seq,
                self.scheme,
                &self.refs,
                self.sim.eps_prime,
            )
        } else {
            encode_causal(
                books,
                &msgs,
                &s_seq,
                self.scheme,
                &self.refs,
                self.sim.eps_prime,
            )
        };
        let mut y1 = vec![0u8; self.sim.n];
        let mut y2 = vec![0u8; self.sim.n];
        for j in 0..self.sim.n {
            let row = &self.refs.chan[s_seq[j] as usize][enc.x[j] as usize];
            let pair = draw_symbol(&mut rng, row) as usize;
            y1[j] = (pair / self.refs.y2_size) as u8;
            y2[j] = (pair % self.refs.y2_size) as u8;
        }
        let rx1 = decode_rx1(
            books,
            &y1,
            if self.refs.state_at_rx1 {
                Some(&s_seq)
            } else {
                None
            },
            msgs.m4,
            &self.refs,
            self.sim.eps1,
        );
        let rx2 = decode_rx2(
            books,
            &y2,
            if self.refs.state_at_rx2 {
                Some(&s_seq)
            } else {
                None
            },
            msgs.m3,
            &self.refs,
            self.sim.eps2,
        );
        let rx1_ok = rx1 == DecodeOutcome::Decoded([msgs.m0, msgs.m11, msgs.m12, msgs.m3]);
        let rx2_ok = rx2 == DecodeOutcome::Decoded([msgs.m0, msgs.m21, msgs.m22, msgs.m4]);
        TrialOutcome {
            rx1,
            rx2,
            rx1_ok,
            rx2_ok,
            covering_failed: enc.covering_failed,
            chosen: enc.chosen,
        }
    }
}

/// Runs one trial in isolation (test hook; identical arithmetic to
/// [`run_trials`]).
pub fn run_single_trial(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    scheme: &AuxScheme,
    sim: &SimConfig,
    rmsi: bool,
    trial: u64,
) -> Result<TrialOutcome, SimError> {
    let ctx = SimContext::new(spec, cfg, scheme, sim, rmsi)?;
    let fixed = if sim.fixed_codebooks {
        let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
        rng.set_stream(FIXED_BOOKS_STREAM);
        Some(draw_codebooks(&mut rng, &ctx.refs, ctx.sizes, sim.n))
    } else {
        None
    };
    Ok(ctx.run_trial(trial, fixed.as_ref()))
}

/// Runs the configured number of independent trials and aggregates the
/// error report. Deterministic given the seed.
pub fn run_trials(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    scheme: &AuxScheme,
    sim: &SimConfig,
    rmsi: bool,
) -> Result<SimReport, SimError> {
    let ctx = SimContext::new(spec, cfg, scheme, sim, rmsi)?;
    let fixed = if sim.fixed_codebooks {
        let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
        rng.set_stream(FIXED_BOOKS_STREAM);
        Some(draw_codebooks(&mut rng, &ctx.refs, ctx.sizes, sim.n))
    } else {
        None
    };
    let mut errors = 0u64;
    let mut causes = CauseCounts::default();
    for t in 0..sim.trials {
        let out = ctx.run_trial(t, fixed.as_ref());
        if !(out.rx1_ok && out.rx2_ok) {
            errors += 1;
        }
        causes.covering += out.covering_failed as u64;
        causes.rx1_packing += !out.rx1_ok as u64;
        causes.rx2_packing += !out.rx2_ok as u64;
        causes.rx1_ambiguous += (out.rx1 == DecodeOutcome::Ambiguous) as u64;
        causes.rx2_ambiguous += (out.rx2 == DecodeOutcome::Ambiguous) as u64;
    }
    let (p_e, ci_low, ci_high) = wilson(errors, sim.trials);
    Ok(SimReport {
        n: sim.n,
        rates: sim.rates,
        trials: sim.trials,
        p_e,
        ci_low,
        ci_high,
        causes,
    })
}

/// [`run_trials`] across a blocklength sweep (same seed per point).
pub fn n_sweep(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    scheme: &AuxScheme,
    base: &SimConfig,
    rmsi: bool,
    ns: &[usize],
) -> Result<Vec<SimReport>, SimError> {
    ns.iter()
        .map(|&n| {
            let sim = SimConfig {
                n,
                ..base.clone()
            };
            run_trials(spec, cfg, scheme, &sim, rmsi)
        })
        .collect()
}

/// CSV across a sweep for external plotting.
pub fn sweep_csv(reports: &[SimReport]) -> String {
    let mut out = String::from("n,p_e,ci_low,ci_high,covering,rx1_packing,rx2_packing\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.p_e, r.ci_low, r.ci_high, r.causes.covering, r.causes.rx1_packing,
            r.causes.rx2_packing
        ));
    }
    out
}
