//! The three built-in achievability proof systems and their published
//! target regions.
//!
//! Each system is the set of sufficient conditions produced by the random
//! coding argument, transcribed verbatim after normalizing strict
//! inequalities to non-strict (closure) and applying the rate-splitting
//! substitutions `R11 = R1 − R12`, `R21 = R2 − R22` (which turn the
//! nonnegativity of the substituted split rates into `R12 ≤ R1`,
//! `R22 ≤ R2`). Auxiliary unknowns — the split rates and the binning
//! rates `R'0`, `R'1`, `R'2` — are what [`crate::fme::verify_reduction`]
//! eliminates.

use super::{Row, SymbolicSystem};

/// `I(U0,U1;Y~1)` — rate resolvable by receiver 1 across the common and
/// first private layer.
pub const MI_U01_Y1: &str = "I(U0,U1;Y~1)";
/// `I(U1;Y~1|U0)` — first private layer given the common layer.
pub const MI_U1_Y1_GIVEN_U0: &str = "I(U1;Y~1|U0)";
/// `I(U0,U2;Y~2)` — rate resolvable by receiver 2 across the common and
/// second private layer.
pub const MI_U02_Y2: &str = "I(U0,U2;Y~2)";
/// `I(U2;Y~2|U0)` — second private layer given the common layer.
pub const MI_U2_Y2_GIVEN_U0: &str = "I(U2;Y~2|U0)";
/// `I(U1;U2|U0)` — correlation penalty between the private layers.
pub const MI_U1_U2_GIVEN_U0: &str = "I(U1;U2|U0)";
/// `I(U0;S)` — state knowledge embedded in the common layer.
pub const MI_U0_S: &str = "I(U0;S)";
/// `I(U0,U1;S)` — state knowledge across the common and first layer.
pub const MI_U01_S: &str = "I(U0,U1;S)";
/// `I(U0,U2;S)` — state knowledge across the common and second layer.
pub const MI_U02_S: &str = "I(U0,U2;S)";
/// `I(U0,U1,U2;S)` — state knowledge across all three layers.
pub const MI_U012_S: &str = "I(U0,U1,U2;S)";

/// All nine measure symbols in canonical render order.
pub const ALL_SYMBOLS: [&str; 9] = [
    MI_U01_Y1,
    MI_U1_Y1_GIVEN_U0,
    MI_U02_Y2,
    MI_U2_Y2_GIVEN_U0,
    MI_U1_U2_GIVEN_U0,
    MI_U0_S,
    MI_U01_S,
    MI_U02_S,
    MI_U012_S,
];

/// A built-in proof system paired with its published target region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinSystem {
    /// Causal state at the transmitter, no a-priori message side
    /// information: Marton coding over (U0, U1, U2) independent of the
    /// state.
    CausalMarton,
    /// Causal variant with receiver-side message knowledge (rates R3, R4
    /// rider on the decoding constraints); state terms are all zero.
    RmsiCausal,
    /// Non-causal state at the transmitter with receiver-side message
    /// knowledge: multicoding against the state adds the `R'0..R'2`
    /// covering constraints and the state-information penalties.
    RmsiNonCausal,
}

impl BuiltinSystem {
    pub const ALL: [BuiltinSystem; 3] = [
        BuiltinSystem::CausalMarton,
        BuiltinSystem::RmsiCausal,
        BuiltinSystem::RmsiNonCausal,
    ];

    /// Canonical name, also accepted by [`BuiltinSystem::from_name`].
    pub fn name(self) -> &'static str {
        match self {
            BuiltinSystem::CausalMarton => "causal-marton",
            BuiltinSystem::RmsiCausal => "rmsi-causal",
            BuiltinSystem::RmsiNonCausal => "rmsi-noncausal",
        }
    }

    /// Parses a builtin name. Canonical names are preferred; a few legacy
    /// aliases are accepted for compatibility.
    pub fn from_name(name: &str) -> Option<BuiltinSystem> {
        match name {
            "causal-marton" | "causal-th1" => Some(BuiltinSystem::CausalMarton),
            "rmsi-causal" | "rmsi-causal-th2" => Some(BuiltinSystem::RmsiCausal),
            "rmsi-noncausal" | "rmsi-noncausal-th2" => Some(BuiltinSystem::RmsiNonCausal),
            _ => None,
        }
    }

    /// Auxiliary variables to eliminate, in the order used by the proof.
    pub fn eliminated_vars(self) -> &'static [&'static str] {
        match self {
            BuiltinSystem::CausalMarton | BuiltinSystem::RmsiCausal => {
                &["R12", "R22", "R'1", "R'2"]
            }
            BuiltinSystem::RmsiNonCausal => &["R12", "R22", "R'0", "R'1", "R'2"],
        }
    }

    /// The pre-elimination sufficient-condition system. The non-causal
    /// system carries the four monotonicity identities between overlapping
    /// state-information symbols (`I(U0;S) ≤ I(U0,U1;S)` etc.), which hold
    /// for every joint distribution and are needed to recognize some
    /// FME by-products as redundant.
    pub fn system(self) -> SymbolicSystem {
        let rows = |defs: &[&[(&str, i64)]]| -> Vec<Row> {
            defs.iter()
                .map(|d| Row::from_pairs(d).expect("builtin rows are nontrivial"))
                .collect()
        };
        match self {
            BuiltinSystem::CausalMarton => SymbolicSystem::new(
                vars(&["R0", "R1", "R2", "R12", "R22", "R'1", "R'2"]),
                rows(&[
                    // Binning covers the private-layer correlation.
                    &[(MI_U1_U2_GIVEN_U0, 1), ("R'1", -1), ("R'2", -1)],
                    // Receiver 1, private layer.
                    &[("R12", 1), ("R'1", 1), (MI_U1_Y1_GIVEN_U0, -1)],
                    // Receiver 1, common layer (R21 = R2 − R22 substituted).
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R22", -1),
                        ("R'1", 1),
                        (MI_U01_Y1, -1),
                    ],
                    // Receiver 2, private layer.
                    &[("R22", 1), ("R'2", 1), (MI_U2_Y2_GIVEN_U0, -1)],
                    // Receiver 2, common layer (R11 = R1 − R12 substituted).
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R12", -1),
                        ("R'2", 1),
                        (MI_U02_Y2, -1),
                    ],
                    // Split-rate nonnegativity after substitution.
                    &[("R12", 1), ("R1", -1)],
                    &[("R22", 1), ("R2", -1)],
                ]),
            ),
            BuiltinSystem::RmsiCausal => SymbolicSystem::new(
                vars(&["R0", "R1", "R2", "R3", "R4", "R12", "R22", "R'1", "R'2"]),
                rows(&[
                    &[(MI_U1_U2_GIVEN_U0, 1), ("R'1", -1), ("R'2", -1)],
                    &[("R12", 1), ("R'1", 1), (MI_U1_Y1_GIVEN_U0, -1)],
                    // Receiver 1 additionally resolves its extra message.
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R3", 1),
                        ("R22", -1),
                        ("R'1", 1),
                        (MI_U01_Y1, -1),
                    ],
                    &[("R22", 1), ("R'2", 1), (MI_U2_Y2_GIVEN_U0, -1)],
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R4", 1),
                        ("R12", -1),
                        ("R'2", 1),
                        (MI_U02_Y2, -1),
                    ],
                    &[("R12", 1), ("R1", -1)],
                    &[("R22", 1), ("R2", -1)],
                ]),
            ),
            BuiltinSystem::RmsiNonCausal => SymbolicSystem::new(
                vars(&[
                    "R0", "R1", "R2", "R3", "R4", "R12", "R22", "R'0", "R'1", "R'2",
                ]),
                rows(&[
                    // Multicoding covers the state at every layer.
                    &[(MI_U0_S, 1), ("R'0", -1)],
                    &[(MI_U01_S, 1), ("R'0", -1), ("R'1", -1)],
                    &[(MI_U02_S, 1), ("R'0", -1), ("R'2", -1)],
                    &[
                        (MI_U012_S, 1),
                        (MI_U1_U2_GIVEN_U0, 1),
                        ("R'0", -1),
                        ("R'1", -1),
                        ("R'2", -1),
                    ],
                    &[("R12", 1), ("R'1", 1), (MI_U1_Y1_GIVEN_U0, -1)],
                    // Receivers also resolve the common-layer bin index.
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R3", 1),
                        ("R22", -1),
                        ("R'0", 1),
                        ("R'1", 1),
                        (MI_U01_Y1, -1),
                    ],
                    &[("R22", 1), ("R'2", 1), (MI_U2_Y2_GIVEN_U0, -1)],
                    &[
                        ("R0", 1),
                        ("R1", 1),
                        ("R2", 1),
                        ("R4", 1),
                        ("R12", -1),
                        ("R'0", 1),
                        ("R'2", 1),
                        (MI_U02_Y2, -1),
                    ],
                    &[("R12", 1), ("R1", -1)],
                    &[("R22", 1), ("R2", -1)],
                ]),
            )
            .with_identities(monotonicity_identities()),
        }
    }

    /// The published region the reduction must reproduce.
    pub fn target(self) -> Vec<Row> {
        let rows = |defs: &[&[(&str, i64)]]| -> Vec<Row> {
            defs.iter()
                .map(|d| Row::from_pairs(d).expect("target rows are nontrivial"))
                .collect()
        };
        match self {
            BuiltinSystem::CausalMarton => rows(&[
                &[("R0", 1), ("R1", 1), (MI_U01_Y1, -1)],
                &[("R0", 1), ("R2", 1), (MI_U02_Y2, -1)],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    (MI_U01_Y1, -1),
                    (MI_U2_Y2_GIVEN_U0, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    (MI_U1_Y1_GIVEN_U0, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
                &[
                    ("R0", 2),
                    ("R1", 1),
                    ("R2", 1),
                    (MI_U01_Y1, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
            ]),
            BuiltinSystem::RmsiCausal => rows(&[
                &[("R0", 1), ("R1", 1), ("R3", 1), (MI_U01_Y1, -1)],
                &[("R0", 1), ("R2", 1), ("R4", 1), (MI_U02_Y2, -1)],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    ("R3", 1),
                    (MI_U01_Y1, -1),
                    (MI_U2_Y2_GIVEN_U0, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    ("R4", 1),
                    (MI_U1_Y1_GIVEN_U0, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
                &[
                    ("R0", 2),
                    ("R1", 1),
                    ("R2", 1),
                    ("R3", 1),
                    ("R4", 1),
                    (MI_U01_Y1, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                ],
            ]),
            BuiltinSystem::RmsiNonCausal => rows(&[
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R3", 1),
                    (MI_U01_Y1, -1),
                    (MI_U01_S, 1),
                ],
                &[
                    ("R0", 1),
                    ("R2", 1),
                    ("R4", 1),
                    (MI_U02_Y2, -1),
                    (MI_U02_S, 1),
                ],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    ("R3", 1),
                    (MI_U01_Y1, -1),
                    (MI_U2_Y2_GIVEN_U0, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                    (MI_U012_S, 1),
                ],
                &[
                    ("R0", 1),
                    ("R1", 1),
                    ("R2", 1),
                    ("R4", 1),
                    (MI_U1_Y1_GIVEN_U0, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                    (MI_U012_S, 1),
                ],
                &[
                    ("R0", 2),
                    ("R1", 1),
                    ("R2", 1),
                    ("R3", 1),
                    ("R4", 1),
                    (MI_U01_Y1, -1),
                    (MI_U02_Y2, -1),
                    (MI_U1_U2_GIVEN_U0, 1),
                    (MI_U012_S, 1),
                    (MI_U0_S, 1),
                ],
            ]),
        }
    }
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The four monotonicity relations between overlapping state-information
/// symbols: information about the state in a subset of the layers never
/// exceeds the information in a superset. These hold for every joint
/// distribution (adding coordinates to the first argument of a mutual
/// information cannot decrease it).
pub fn monotonicity_identities() -> Vec<Row> {
    [
        [(MI_U0_S, 1), (MI_U01_S, -1)],
        [(MI_U0_S, 1), (MI_U02_S, -1)],
        [(MI_U01_S, 1), (MI_U012_S, -1)],
        [(MI_U02_S, 1), (MI_U012_S, -1)],
    ]
    .iter()
    .map(|d| Row::from_pairs(d).expect("identity rows are nontrivial"))
    .collect()
}

/// The causal system before the rate-splitting substitution: split rates
/// `R11`, `R12`, `R21`, `R22` appear explicitly and the definitions
/// `R1 = R11 + R12`, `R2 = R21 + R22` are carried as inequality pairs.
/// Eliminating all six auxiliary variables projects onto the same region
/// as [`BuiltinSystem::CausalMarton`].
pub fn causal_presubstitution_system() -> SymbolicSystem {
    let defs: &[&[(&str, i64)]] = &[
        &[(MI_U1_U2_GIVEN_U0, 1), ("R'1", -1), ("R'2", -1)],
        &[("R12", 1), ("R'1", 1), (MI_U1_Y1_GIVEN_U0, -1)],
        &[("R0", 1), ("R1", 1), ("R21", 1), ("R'1", 1), (MI_U01_Y1, -1)],
        &[("R22", 1), ("R'2", 1), (MI_U2_Y2_GIVEN_U0, -1)],
        &[("R0", 1), ("R2", 1), ("R11", 1), ("R'2", 1), (MI_U02_Y2, -1)],
        // R1 = R11 + R12 and R2 = R21 + R22, as inequality pairs.
        &[("R1", 1), ("R11", -1), ("R12", -1)],
        &[("R11", 1), ("R12", 1), ("R1", -1)],
        &[("R2", 1), ("R21", -1), ("R22", -1)],
        &[("R21", 1), ("R22", 1), ("R2", -1)],
    ];
    SymbolicSystem::new(
        vars(&[
            "R0", "R1", "R2", "R11", "R12", "R21", "R22", "R'1", "R'2",
        ]),
        defs.iter()
            .map(|d| Row::from_pairs(d).expect("rows are nontrivial"))
            .collect(),
    )
}

/// Auxiliary variables of [`causal_presubstitution_system`].
pub const PRESUBSTITUTION_AUX: [&str; 6] = ["R12", "R22", "R11", "R21", "R'1", "R'2"];
