//! Randomized search over auxiliary schemes to approximate rate frontiers:
//! sample schemes (Dirichlet-uniform distributions, uniform symbol maps),
//! score each weight vector by the supported weighted rate sum, and locally
//! refine the best candidate. When the symbol-map space is small the map is
//! optimized exhaustively instead of by mutation, which removes the main
//! source of search noise.

use crate::channel::{build_joint, AuxScheme, ChannelError, ChannelSpec, SideInfoConfig};
use crate::region::{eval_bound, support, BoundFamily, RateRegion, RegionError, RATE_DIMS};
use crate::Csit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Symbol-map spaces up to this size are searched exhaustively.
pub const GAMMA_EXHAUSTIVE_LIMIT: u64 = 4096;

/// Tolerance for the causal-within-non-causal inclusion verdict.
pub const INCLUSION_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid search budget: {0}")]
    BadBudget(String),
}

/// Search effort and scope: how many random schemes, how many refinement
/// iterations, the auxiliary cardinalities, and the weight vectors to
/// maximize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub n_random: usize,
    pub n_refine: usize,
    pub seed: u64,
    pub cardinalities: (usize, usize, usize),
    pub weight_set: Vec<[f64; RATE_DIMS]>,
}

impl SearchBudget {
    fn validate(&self) -> Result<(), SearchError> {
        let (u0, u1, u2) = self.cardinalities;
        if u0 < 1 || u1 < 1 || u2 < 1 {
            return Err(SearchError::BadBudget(format!(
                "cardinalities must be at least 1, got ({u0}, {u1}, {u2})"
            )));
        }
        Ok(())
    }
}

/// Best result found for one weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightOutcome {
    pub weights: [f64; RATE_DIMS],
    /// Best supported weighted rate sum, in bits.
    pub value: f64,
    /// The scheme achieving it.
    pub scheme: AuxScheme,
    /// The region that scheme certifies.
    pub region: RateRegion,
    /// Best value after each candidate evaluation and refinement step;
    /// nondecreasing by construction.
    pub trace: Vec<f64>,
}

/// Search result: one outcome per requested weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub outcomes: Vec<WeightOutcome>,
}

impl FrontierReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// CSV of weight vectors and best values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w0,w1,w2,w3,w4,value\n");
        for o in &self.outcomes {
            let w = o.weights;
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                w[0], w[1], w[2], w[3], w[4], o.value
            ));
        }
        out
    }
}

/// Draws a scheme at random: every `p_aux` slice uniform on the probability
/// simplex (symmetric Dirichlet with unit concentration, via normalized
/// exponential draws), the symbol map uniform over all maps. Deterministic
/// given the generator state.
pub fn sample_scheme<R: Rng>(
    rng: &mut R,
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    cardinalities: (usize, usize, usize),
) -> AuxScheme {
    let (u0, u1, u2) = cardinalities;
    let slices = cfg.aux_slice_count(spec.s_size);
    let gslices = cfg.gamma_slice_count(spec.s_size);
    let mut p_aux = vec![vec![vec![vec![0.0f64; u2]; u1]; u0]; slices];
    for slice in p_aux.iter_mut() {
        let mut total = 0.0;
        for a in slice.iter_mut() {
            for b in a.iter_mut() {
                for c in b.iter_mut() {
                    *c = -(1.0 - rng.random::<f64>()).ln();
                    total += *c;
                }
            }
        }
        for a in slice.iter_mut() {
            for b in a.iter_mut() {
                for c in b.iter_mut() {
                    *c /= total;
                }
            }
        }
    }
    let mut gamma = vec![vec![vec![vec![0usize; gslices]; u2]; u1]; u0];
    for a in gamma.iter_mut() {
        for b in a.iter_mut() {
            for c in b.iter_mut() {
                for g in c.iter_mut() {
                    *g = rng.random_range(0..spec.x_size);
                }
            }
        }
    }
    AuxScheme {
        u0_size: u0,
        u1_size: u1,
        u2_size: u2,
        p_aux,
        gamma,
    }
}

/// Deterministic starting points: every product of per-axis uniform or
/// point-mass marginals, replicated across slices. These cover the extreme
/// corners random sampling is unlikely to hit exactly (degenerate layers,
/// uniform inputs), which several closed-form optima require.
fn canonical_candidates(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    cardinalities: (usize, usize, usize),
) -> Vec<AuxScheme> {
    let (u0, u1, u2) = cardinalities;
    let slices = cfg.aux_slice_count(spec.s_size);
    let gslices = cfg.gamma_slice_count(spec.s_size);
    let marginal = |size: usize, degenerate: bool| -> Vec<f64> {
        if degenerate {
            let mut v = vec![0.0; size];
            v[0] = 1.0;
            v
        } else {
            vec![1.0 / size as f64; size]
        }
    };
    let mut out: Vec<AuxScheme> = Vec::new();
    for mask in 0..8usize {
        let q0 = marginal(u0, mask & 1 != 0);
        let q1 = marginal(u1, mask & 2 != 0);
        let q2 = marginal(u2, mask & 4 != 0);
        let mut slice = vec![vec![vec![0.0; u2]; u1]; u0];
        for (i, a) in slice.iter_mut().enumerate() {
            for (j, b) in a.iter_mut().enumerate() {
                for (k, c) in b.iter_mut().enumerate() {
                    *c = q0[i] * q1[j] * q2[k];
                }
            }
        }
        let scheme = AuxScheme {
            u0_size: u0,
            u1_size: u1,
            u2_size: u2,
            p_aux: vec![slice; slices],
            gamma: vec![vec![vec![vec![0usize; gslices]; u2]; u1]; u0],
        };
        if !out.iter().any(|s| s.p_aux == scheme.p_aux) {
            out.push(scheme);
        }
    }
    out
}

/// Size of the symbol-map space `x_size^(u0·u1·u2·s̃)`, saturating.
fn gamma_space(spec: &ChannelSpec, cfg: &SideInfoConfig, cards: (usize, usize, usize)) -> u64 {
    let cells = (cards.0 * cards.1 * cards.2 * cfg.gamma_slice_count(spec.s_size)) as u32;
    (spec.x_size as u64).saturating_pow(cells)
}

/// Writes the `idx`-th map (base-`x_size` digits, cells in row-major
/// `(u0, u1, u2, s̃)` order) into the scheme.
fn set_gamma_by_index(scheme: &mut AuxScheme, x_size: usize, mut idx: u64) {
    for a in scheme.gamma.iter_mut() {
        for b in a.iter_mut() {
            for c in b.iter_mut() {
                for g in c.iter_mut() {
                    *g = (idx % x_size as u64) as usize;
                    idx /= x_size as u64;
                }
            }
        }
    }
}

/// Supported weighted rate sum of one scheme; an empty region scores zero
/// (such a scheme certifies nothing).
fn score_scheme(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    family: BoundFamily,
    scheme: &AuxScheme,
    w: &[f64; RATE_DIMS],
) -> Result<(f64, RateRegion), SearchError> {
    let joint = build_joint(spec, cfg, scheme)?;
    let region = eval_bound(&joint, family)?;
    match support(&region, w) {
        Ok(v) => Ok((v, region)),
        Err(RegionError::EmptyRegion) => Ok((0.0, region)),
        Err(e) => Err(e.into()),
    }
}

/// Scores a scheme, exhausting the symbol map when the map space is small;
/// returns the best value, the map achieving it, and its region.
fn score_with_gamma_opt(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    family: BoundFamily,
    scheme: &AuxScheme,
    w: &[f64; RATE_DIMS],
    exhaustive: bool,
) -> Result<(f64, AuxScheme, RateRegion), SearchError> {
    if !exhaustive {
        let (v, region) = score_scheme(spec, cfg, family, scheme, w)?;
        return Ok((v, scheme.clone(), region));
    }
    let space = gamma_space(spec, cfg, (scheme.u0_size, scheme.u1_size, scheme.u2_size));
    let mut best: Option<(f64, AuxScheme, RateRegion)> = None;
    let mut probe = scheme.clone();
    for idx in 0..space {
        set_gamma_by_index(&mut probe, spec.x_size, idx);
        let (v, region) = score_scheme(spec, cfg, family, &probe, w)?;
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, probe.clone(), region));
        }
    }
    Ok(best.expect("map space is nonempty"))
}

/// Renormalizes each slice after a perturbation, clamping at zero. Returns
/// false when a slice lost all its mass (step rejected).
fn project_to_simplex(p_aux: &mut [Vec<Vec<Vec<f64>>>]) -> bool {
    for slice in p_aux.iter_mut() {
        let mut total = 0.0;
        for a in slice.iter_mut() {
            for b in a.iter_mut() {
                for c in b.iter_mut() {
                    if *c < 0.0 {
                        *c = 0.0;
                    }
                    total += *c;
                }
            }
        }
        if total <= 0.0 {
            return false;
        }
        for a in slice.iter_mut() {
            for b in a.iter_mut() {
                for c in b.iter_mut() {
                    *c /= total;
                }
            }
        }
    }
    true
}

/// Maximizes each weight vector's supported rate sum over sampled and
/// refined schemes. See [`optimize_with_pool`] for the variant that accepts
/// extra starting candidates.
pub fn optimize(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    family: BoundFamily,
    budget: &SearchBudget,
) -> Result<FrontierReport, SearchError> {
    optimize_with_pool(spec, cfg, family, budget, &[])
}

/// [`optimize`] with extra candidate schemes appended to the pool (used to
/// seed the non-causal search with causal optima so that comparisons are
/// structural rather than statistical).
pub fn optimize_with_pool(
    spec: &ChannelSpec,
    cfg: &SideInfoConfig,
    family: BoundFamily,
    budget: &SearchBudget,
    pool: &[AuxScheme],
) -> Result<FrontierReport, SearchError> {
    budget.validate()?;
    crate::channel::validate_channel(spec)?;
    let cards = budget.cardinalities;
    let exhaustive = gamma_space(spec, cfg, cards) <= GAMMA_EXHAUSTIVE_LIMIT;

    let mut candidates = canonical_candidates(spec, cfg, cards);
    for i in 0..budget.n_random {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(i as u64);
        candidates.push(sample_scheme(&mut rng, spec, cfg, cards));
    }
    candidates.extend(pool.iter().cloned());

    let mut outcomes = Vec::with_capacity(budget.weight_set.len());
    for (widx, w) in budget.weight_set.iter().enumerate() {
        let mut trace = Vec::new();
        let mut best: Option<(f64, AuxScheme, RateRegion)> = None;
        for cand in &candidates {
            let (v, scheme, region) = score_with_gamma_opt(spec, cfg, family, cand, w, exhaustive)?;
            if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                best = Some((v, scheme, region));
            }
            trace.push(best.as_ref().unwrap().0);
        }
        let (mut best_v, mut best_scheme, mut best_region) =
            best.expect("candidate list is never empty");

        // Accept-only local refinement with its own derived stream.
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream((1u64 << 63) | widx as u64);
        let mut sigma = 0.25f64;
        for _ in 0..budget.n_refine {
            let mut proposal = best_scheme.clone();
            let perturb_gamma = !exhaustive && rng.random::<f64>() < 0.5;
            let valid = if perturb_gamma {
                // Single-entry map mutation.
                let flat: usize = proposal.u0_size
                    * proposal.u1_size
                    * proposal.u2_size
                    * cfg.gamma_slice_count(spec.s_size);
                let target = rng.random_range(0..flat);
                let mut pos = 0usize;
                for a in proposal.gamma.iter_mut() {
                    for b in a.iter_mut() {
                        for c in b.iter_mut() {
                            for g in c.iter_mut() {
                                if pos == target {
                                    *g = rng.random_range(0..spec.x_size);
                                }
                                pos += 1;
                            }
                        }
                    }
                }
                true
            } else {
                for slice in proposal.p_aux.iter_mut() {
                    for a in slice.iter_mut() {
                        for b in a.iter_mut() {
                            for c in b.iter_mut() {
                                let g: f64 = rng.sample(StandardNormal);
                                *c += sigma * g;
                            }
                        }
                    }
                }
                project_to_simplex(&mut proposal.p_aux)
            };
            if valid {
                let (v, scheme, region) =
                    score_with_gamma_opt(spec, cfg, family, &proposal, w, exhaustive)?;
                if v > best_v {
                    best_v = v;
                    best_scheme = scheme;
                    best_region = region;
                } else if !perturb_gamma {
                    sigma = (sigma / 2.0).max(1e-6);
                }
            } else {
                sigma = (sigma / 2.0).max(1e-6);
            }
            trace.push(best_v);
        }
        outcomes.push(WeightOutcome {
            weights: *w,
            value: best_v,
            scheme: best_scheme,
            region: best_region,
            trace,
        });
    }
    Ok(FrontierReport { outcomes })
}

/// Result of comparing the causal and non-causal searches on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub causal: FrontierReport,
    pub noncausal: FrontierReport,
    /// Non-causal best ≥ causal best for every weight, as raw floats. Pool
    /// seeding makes this structural: the non-causal run scores the causal
    /// optimum itself (replicated across state slices) through the same
    /// arithmetic path.
    pub holds_exactly: bool,
    /// Non-causal best ≥ causal best − 1e-6 for every weight.
    pub holds_within_tolerance: bool,
}

impl InclusionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Replicates a causal scheme's single distribution slice across all state
/// values, producing the non-causal scheme with the same behaviour.
pub fn replicate_across_slices(scheme: &AuxScheme, s_size: usize) -> AuxScheme {
    AuxScheme {
        p_aux: vec![scheme.p_aux[0].clone(); s_size],
        ..scheme.clone()
    }
}

/// Runs the same search with causal and non-causal transmitter state access
/// and checks that non-causal access never loses. The non-causal pool is
/// seeded with every causal optimum (replicated across slices), so the
/// comparison holds exactly, not merely statistically.
pub fn causal_vs_noncausal(
    spec: &ChannelSpec,
    state_at_rx1: bool,
    state_at_rx2: bool,
    budget: &SearchBudget,
) -> Result<InclusionReport, SearchError> {
    let cfg_causal = SideInfoConfig {
        csit: Csit::Causal,
        state_at_rx1,
        state_at_rx2,
    };
    let cfg_noncausal = SideInfoConfig {
        csit: Csit::NonCausal,
        state_at_rx1,
        state_at_rx2,
    };
    let causal = optimize(spec, &cfg_causal, BoundFamily::UnifiedNoRmsi, budget)?;
    let pool: Vec<AuxScheme> = causal
        .outcomes
        .iter()
        .map(|o| replicate_across_slices(&o.scheme, spec.s_size))
        .collect();
    let noncausal = optimize_with_pool(
        spec,
        &cfg_noncausal,
        BoundFamily::UnifiedNoRmsi,
        budget,
        &pool,
    )?;
    let mut holds_exactly = true;
    let mut holds_within_tolerance = true;
    for (c, n) in causal.outcomes.iter().zip(noncausal.outcomes.iter()) {
        holds_exactly &= n.value >= c.value;
        holds_within_tolerance &= n.value >= c.value - INCLUSION_TOL;
    }
    Ok(InclusionReport {
        causal,
        noncausal,
        holds_exactly,
        holds_within_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Csit;

    fn noiseless_bit_pipe() -> ChannelSpec {
        // Y1 = Y2 = X, no state.
        let mut p_trans = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 1];
        for x in 0..2 {
            p_trans[0][x][x][x] = 1.0;
        }
        ChannelSpec {
            x_size: 2,
            s_size: 1,
            y1_size: 2,
            y2_size: 2,
            p_s: vec![1.0],
            p_trans,
        }
    }

    fn bsc_both(p: f64) -> ChannelSpec {
        let mut p_trans = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 1];
        for x in 0..2 {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    let p1 = if y1 == x { 1.0 - p } else { p };
                    let p2 = if y2 == x { 1.0 - p } else { p };
                    p_trans[0][x][y1][y2] = p1 * p2;
                }
            }
        }
        ChannelSpec {
            x_size: 2,
            s_size: 1,
            y1_size: 2,
            y2_size: 2,
            p_s: vec![1.0],
            p_trans,
        }
    }

    /// Both receivers see X ⊕ S noiselessly, S uniform.
    fn flip_interference() -> ChannelSpec {
        let mut p_trans = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
        for s in 0..2 {
            for x in 0..2 {
                let y = x ^ s;
                p_trans[s][x][y][y] = 1.0;
            }
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

    fn no_state_cfg() -> SideInfoConfig {
        SideInfoConfig {
            csit: Csit::None,
            state_at_rx1: false,
            state_at_rx2: false,
        }
    }

    fn budget(n_random: usize, n_refine: usize, cards: (usize, usize, usize)) -> SearchBudget {
        SearchBudget {
            n_random,
            n_refine,
            seed: 17,
            cardinalities: cards,
            weight_set: vec![[1.0, 0.0, 0.0, 0.0, 0.0]],
        }
    }

    #[test]
    fn sampling_is_deterministic_and_handles_trivial_cardinalities() {
        let spec = noiseless_bit_pipe();
        let cfg = no_state_cfg();
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        let a = sample_scheme(&mut r1, &spec, &cfg, (2, 2, 2));
        let b = sample_scheme(&mut r2, &spec, &cfg, (2, 2, 2));
        assert_eq!(a, b);
        let mut r3 = ChaCha8Rng::seed_from_u64(5);
        let c = sample_scheme(&mut r3, &spec, &cfg, (1, 1, 1));
        assert_eq!(c.p_aux, vec![vec![vec![vec![1.0]]]]);
    }

    #[test]
    fn dirichlet_sampling_has_the_symmetric_mean() {
        let spec = noiseless_bit_pipe();
        let cfg = no_state_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut sums = [0.0f64; 8];
        let n = 10_000;
        for _ in 0..n {
            let s = sample_scheme(&mut rng, &spec, &cfg, (2, 2, 2));
            for (i, v) in sums.iter_mut().enumerate() {
                *v += s.p_aux[0][i / 4][(i / 2) % 2][i % 2];
            }
        }
        for v in sums {
            assert!((v / n as f64 - 0.125).abs() < 0.01, "mean {}", v / n as f64);
        }
    }

    #[test]
    fn bit_pipe_search_reaches_capacity() {
        let report = optimize(
            &noiseless_bit_pipe(),
            &no_state_cfg(),
            BoundFamily::UnifiedNoRmsi,
            &budget(4, 4, (2, 1, 1)),
        )
        .unwrap();
        assert!((report.outcomes[0].value - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn symmetric_noisy_channel_search_reaches_its_closed_form() {
        let report = optimize(
            &bsc_both(0.25),
            &no_state_cfg(),
            BoundFamily::UnifiedNoRmsi,
            &budget(8, 8, (2, 1, 1)),
        )
        .unwrap();
        assert!((report.outcomes[0].value - 0.188722).abs() <= 5e-3);
    }

    #[test]
    fn causal_state_preinversion_restores_the_full_bit() {
        let cfg = SideInfoConfig {
            csit: Csit::Causal,
            state_at_rx1: false,
            state_at_rx2: false,
        };
        let report = optimize(
            &flip_interference(),
            &cfg,
            BoundFamily::UnifiedNoRmsi,
            &budget(4, 4, (2, 1, 1)),
        )
        .unwrap();
        assert!((report.outcomes[0].value - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn optimization_is_deterministic_and_traces_are_monotone() {
        let b = SearchBudget {
            n_random: 6,
            n_refine: 10,
            seed: 3,
            cardinalities: (2, 2, 1),
            weight_set: vec![[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0, 0.0]],
        };
        let spec = bsc_both(0.1);
        let cfg = no_state_cfg();
        let r1 = optimize(&spec, &cfg, BoundFamily::UnifiedNoRmsi, &b).unwrap();
        let r2 = optimize(&spec, &cfg, BoundFamily::UnifiedNoRmsi, &b).unwrap();
        assert_eq!(r1.to_json(), r2.to_json());
        for o in &r1.outcomes {
            for pair in o.trace.windows(2) {
                assert!(pair[1] >= pair[0]);
            }
            assert_eq!(*o.trace.last().unwrap(), o.value);
        }
    }

    #[test]
    fn noncausal_never_loses_and_trivial_state_ties_exactly() {
        // |S| = 1: the two configurations describe the same channel.
        let b = budget(3, 3, (2, 1, 1));
        let tie = causal_vs_noncausal(&noiseless_bit_pipe(), false, false, &b).unwrap();
        assert!(tie.holds_exactly);
        for (c, n) in tie.causal.outcomes.iter().zip(tie.noncausal.outcomes.iter()) {
            assert!((c.value - n.value).abs() <= 1e-9);
        }
        // Real state: seeded domination must hold exactly, including at zero
        // budget (canonical candidates only).
        for b in [budget(4, 4, (2, 1, 1)), budget(0, 0, (2, 1, 1))] {
            let rep = causal_vs_noncausal(&flip_interference(), false, false, &b).unwrap();
            assert!(rep.holds_exactly);
            assert!(rep.holds_within_tolerance);
        }
        let zb = budget(0, 0, (2, 1, 1));
        let rep = causal_vs_noncausal(&noiseless_bit_pipe(), false, false, &zb).unwrap();
        for (c, n) in rep.causal.outcomes.iter().zip(rep.noncausal.outcomes.iter()) {
            assert_eq!(c.value, n.value);
        }
    }

    #[test]
    fn replicated_slices_reproduce_the_causal_evaluation() {
        // A non-causal scheme whose distribution is the same for every state
        // value carries no state information, so the unified bound evaluated
        // there must coincide with the causal bound at the original scheme.
        let spec = flip_interference();
        let cfg_causal = SideInfoConfig {
            csit: Csit::Causal,
            state_at_rx1: false,
            state_at_rx2: false,
        };
        let cfg_noncausal = SideInfoConfig {
            csit: Csit::NonCausal,
            state_at_rx1: false,
            state_at_rx2: false,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let causal_scheme = sample_scheme(&mut rng, &spec, &cfg_causal, (2, 2, 2));
            let noncausal_scheme = replicate_across_slices(&causal_scheme, spec.s_size);
            let jc = build_joint(&spec, &cfg_causal, &causal_scheme).unwrap();
            let jn = build_joint(&spec, &cfg_noncausal, &noncausal_scheme).unwrap();
            let rc = eval_bound(&jc, BoundFamily::CausalNoRmsi).unwrap();
            let rn = eval_bound(&jn, BoundFamily::UnifiedNoRmsi).unwrap();
            assert_eq!(rc.rows.len(), rn.rows.len());
            for (a, b) in rc.rows.iter().zip(rn.rows.iter()) {
                assert_eq!(a.coeffs, b.coeffs);
                assert!(
                    (a.rhs - b.rhs).abs() <= 1e-10,
                    "rhs mismatch: {} vs {}",
                    a.rhs,
                    b.rhs
                );
            }
        }
    }

    #[test]
    fn csv_export_has_one_row_per_weight() {
        let report = optimize(
            &noiseless_bit_pipe(),
            &no_state_cfg(),
            BoundFamily::UnifiedNoRmsi,
            &budget(2, 0, (2, 1, 1)),
        )
        .unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("w0,w1,w2,w3,w4,value\n"));
    }

    #[test]
    fn invalid_cardinalities_are_rejected() {
        let err = optimize(
            &noiseless_bit_pipe(),
            &no_state_cfg(),
            BoundFamily::UnifiedNoRmsi,
            &budget(1, 0, (0, 1, 1)),
        )
        .unwrap_err();
        assert!(matches!(err, SearchError::BadBudget(_)));
    }
}
