//! Toolkit for the two-receiver memoryless broadcast channel with an i.i.d.
//! channel state and receiver message side information.
//!
//! The toolkit is organized around one pipeline:
//!
//! 1. [`channel`] describes a finite channel `p(s) · p(y1,y2|x,s)`, a
//!    side-information configuration (where the state is known), and an
//!    auxiliary coding scheme `p(u0,u1,u2|s̃)` with a deterministic symbol map
//!    `x = γ(u0,u1,u2,s̃)`; from these it builds the full joint distribution
//!    over `(S, U0, U1, U2, X, Y1, Y2)`.
//! 2. [`measures`] computes entropies and (conditional) mutual informations of
//!    variable groups from that joint, in bits.
//! 3. [`region`] evaluates the achievable-rate inequality systems (inner
//!    bounds and degraded-channel capacity formulas) at a scheme and answers
//!    polytope queries: membership, weighted-sum support, inclusion.
//! 4. [`search`] optimizes over schemes to trace out rate frontiers.
//! 5. [`fme`] performs exact symbolic Fourier–Motzkin elimination to certify
//!    that the coding sufficient-condition systems project onto the published
//!    five-inequality regions.
//! 6. [`sim`] runs Monte Carlo simulations of the actual coding schemes
//!    (superposition + Marton binning, Shannon strategies for causal state,
//!    Gelfand–Pinsker multicoding for non-causal state) at desk-scale
//!    blocklengths.
//!
//! All probability mass functions are dense `f64` arrays over small finite
//! alphabets; all rate arithmetic in [`fme`] and the polytope kernels in
//! [`exact`] use arbitrary-precision rationals so that polyhedral reasoning is
//! exact.

pub mod channel;
pub mod exact;
pub mod fme;
pub mod measures;
pub mod region;
pub mod search;
pub mod sim;

pub use channel::{
    build_joint, effective_output_sizes, stochastically_degraded, validate_channel,
    validate_scheme, AuxScheme, ChannelError, ChannelSpec, Csit, JointDist, SideInfoConfig,
};
pub use measures::{conditional_mi, entropy, mutual_information, InfoError, VarGroup};
pub use region::{eval_bound, region_contains, region_subset, support, BoundFamily, RateRegion};
pub use search::{
    causal_vs_noncausal, optimize, optimize_with_pool, sample_scheme, FrontierReport,
    InclusionReport, SearchBudget, SearchError,
};
pub use sim::{
    n_sweep, run_single_trial, run_trials, sweep_csv, typical, SimConfig, SimError, SimRates,
    SimReport,
};
