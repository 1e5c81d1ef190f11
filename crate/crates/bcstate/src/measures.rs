//! Entropies and (conditional) mutual informations of variable groups, in
//! bits, computed from a [`JointDist`].
//!
//! A [`VarGroup`] selects a subset of the seven joint axes
//! `{S, U0, U1, U2, X, Y1, Y2}` or one of the two derived observations
//! `Ỹ1, Ỹ2`, which expand to `{Y1, S}` / `{Y1}` (resp. `Y2`) depending on
//! whether the receiver has state access in the joint's configuration.
//!
//! Formulas (all logs base 2, `0·log 0 = 0`):
//!
//! | quantity            | formula                                  |
//! |---------------------|------------------------------------------|
//! | `H(A)`              | `−Σ p(a) log p(a)` over the `A`-marginal |
//! | `I(A;B)`            | `H(A) + H(B) − H(A,B)`                   |
//! | `I(A;B|C)`          | `H(A,C) + H(B,C) − H(A,B,C) − H(C)`      |
//!
//! Floating-point cancellation can push a mathematically nonnegative mutual
//! information a hair below zero; values within [`MI_CLAMP`] of zero are
//! clamped to zero, anything more negative is reported as an
//! internal-consistency error rather than silently repaired.

use crate::channel::JointDist;
use thiserror::Error;

/// Negative mutual-information clamping window.
pub const MI_CLAMP: f64 = 1e-10;

/// One of the seven joint axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    S = 0,
    U0 = 1,
    U1 = 2,
    U2 = 3,
    X = 4,
    Y1 = 5,
    Y2 = 6,
}

/// A group of joint axes, possibly including the derived observations
/// `Ỹ1`/`Ỹ2`, resolved against a joint's side-information configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarGroup {
    axes: u8,
    y1_tilde: bool,
    y2_tilde: bool,
}

impl VarGroup {
    /// Empty group (useful as a conditioning set meaning "nothing").
    pub const NONE: VarGroup = VarGroup {
        axes: 0,
        y1_tilde: false,
        y2_tilde: false,
    };

    /// Group consisting of the given plain axes.
    pub fn of(axes: &[Axis]) -> VarGroup {
        let mut mask = 0u8;
        for &a in axes {
            mask |= 1 << a as u8;
        }
        VarGroup {
            axes: mask,
            y1_tilde: false,
            y2_tilde: false,
        }
    }

    /// The effective observation of receiver 1: `(Y1, S)` when the state is
    /// available there, `Y1` otherwise.
    pub fn y1_tilde() -> VarGroup {
        VarGroup {
            axes: 0,
            y1_tilde: true,
            y2_tilde: false,
        }
    }

    /// The effective observation of receiver 2.
    pub fn y2_tilde() -> VarGroup {
        VarGroup {
            axes: 0,
            y1_tilde: false,
            y2_tilde: true,
        }
    }

    /// Union of two groups.
    pub fn with(self, other: VarGroup) -> VarGroup {
        VarGroup {
            axes: self.axes | other.axes,
            y1_tilde: self.y1_tilde || other.y1_tilde,
            y2_tilde: self.y2_tilde || other.y2_tilde,
        }
    }

    /// Expands derived observations into plain axes for a given joint and
    /// returns the axis bitmask.
    pub fn resolve(self, joint: &JointDist) -> u8 {
        let mut mask = self.axes;
        if self.y1_tilde {
            mask |= 1 << Axis::Y1 as u8;
            if joint.cfg.state_at_rx1 {
                mask |= 1 << Axis::S as u8;
            }
        }
        if self.y2_tilde {
            mask |= 1 << Axis::Y2 as u8;
            if joint.cfg.state_at_rx2 {
                mask |= 1 << Axis::S as u8;
            }
        }
        mask
    }
}

/// Failures of information-measure computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("entropy of an empty variable group is undefined")]
    EmptyGroup,
    #[error("variable groups overlap after Ỹ expansion (shared axis mask {0:#09b})")]
    OverlappingGroups(u8),
    #[error("mutual information evaluated to {0}, below the -{MI_CLAMP} clamping window")]
    InternalConsistency(f64),
}

fn entropy_of_mask(joint: &JointDist, mask: u8) -> f64 {
    let marg = joint.marginal(mask);
    let mut h = 0.0;
    for &p in &marg {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// Entropy `H(g)` in bits.
pub fn entropy(joint: &JointDist, g: VarGroup) -> Result<f64, InfoError> {
    let mask = g.resolve(joint);
    if mask == 0 {
        return Err(InfoError::EmptyGroup);
    }
    Ok(entropy_of_mask(joint, mask))
}

fn clamp_mi(v: f64) -> Result<f64, InfoError> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -MI_CLAMP {
        Ok(0.0)
    } else {
        Err(InfoError::InternalConsistency(v))
    }
}

/// Mutual information `I(a; b)` in bits; `a` and `b` must be disjoint after
/// `Ỹ` expansion.
pub fn mutual_information(joint: &JointDist, a: VarGroup, b: VarGroup) -> Result<f64, InfoError> {
    let (ma, mb) = (a.resolve(joint), b.resolve(joint));
    if ma == 0 || mb == 0 {
        return Err(InfoError::EmptyGroup);
    }
    if ma & mb != 0 {
        return Err(InfoError::OverlappingGroups(ma & mb));
    }
    clamp_mi(entropy_of_mask(joint, ma) + entropy_of_mask(joint, mb) - entropy_of_mask(joint, ma | mb))
}

/// Conditional mutual information `I(a; b | c)` in bits; the three groups
/// must be pairwise disjoint after `Ỹ` expansion. An empty `c` reduces to
/// [`mutual_information`].
pub fn conditional_mi(
    joint: &JointDist,
    a: VarGroup,
    b: VarGroup,
    c: VarGroup,
) -> Result<f64, InfoError> {
    let (ma, mb, mc) = (a.resolve(joint), b.resolve(joint), c.resolve(joint));
    if ma == 0 || mb == 0 {
        return Err(InfoError::EmptyGroup);
    }
    let overlap = (ma & mb) | (ma & mc) | (mb & mc);
    if overlap != 0 {
        return Err(InfoError::OverlappingGroups(overlap));
    }
    if mc == 0 {
        return mutual_information(joint, a, b);
    }
    clamp_mi(
        entropy_of_mask(joint, ma | mc) + entropy_of_mask(joint, mb | mc)
            - entropy_of_mask(joint, ma | mb | mc)
            - entropy_of_mask(joint, mc),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_expansion_respects_receiver_state_access() {
        use crate::channel::{Csit, SideInfoConfig};
        let joint = JointDist {
            dims: [1; 7],
            p: vec![1.0],
            cfg: SideInfoConfig {
                csit: Csit::None,
                state_at_rx1: true,
                state_at_rx2: false,
            },
        };
        let m1 = VarGroup::y1_tilde().resolve(&joint);
        let m2 = VarGroup::y2_tilde().resolve(&joint);
        assert_eq!(m1, (1 << Axis::Y1 as u8) | (1 << Axis::S as u8));
        assert_eq!(m2, 1 << Axis::Y2 as u8);
    }
}
