//! Exact VC and Littlestone dimensions, their certificates, and the online
//! mistake-bound game.

mod game;
mod littlestone;
mod vc;

pub use game::{
    run_online_game, run_online_game_with, soa_predict, GameStep, GameTranscript, Learner,
    Opponent, Soa,
};
pub use littlestone::{
    ls_at_most, ls_at_most_counted, ls_dimension, verify_mistake_tree, LsSolver, MistakeTree,
};
pub use vc::{is_shattered, vc_dimension};

/// Result of a dimension computation. The dimension of an empty class is
/// left undefined rather than encoded as a sentinel number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dimension<C> {
    Undefined,
    Defined { value: usize, certificate: C },
}

impl<C> Dimension<C> {
    pub fn value(&self) -> Option<usize> {
        match self {
            Dimension::Undefined => None,
            Dimension::Defined { value, .. } => Some(*value),
        }
    }

    pub fn certificate(&self) -> Option<&C> {
        match self {
            Dimension::Undefined => None,
            Dimension::Defined { certificate, .. } => Some(certificate),
        }
    }

    pub fn into_parts(self) -> Option<(usize, C)> {
        match self {
            Dimension::Undefined => None,
            Dimension::Defined { value, certificate } => Some((value, certificate)),
        }
    }
}

/// `⌊log2 m⌋` for `m ≥ 1`.
pub fn floor_log2(m: usize) -> usize {
    debug_assert!(m > 0);
    (usize::BITS - 1 - m.leading_zeros()) as usize
}
