//! Cop strategies, robber strategies, and resolving-set constructions.

mod cop;
mod family;
mod resolving;
mod robber;

pub use cop::{
    build_distinguishing_set, delta_regime, family_squares, quadrilaterate_step, CompositeCop,
    DeltaBranch, DeltaRegime, DistinguishingSet, FamilySquare, FloodingCop, GridProbe,
    OrientedSquare, QuadOutcome,
};
pub use family::{special_family, SpecialFamily};
pub use resolving::{greedy_resolving_set, random_resolving_set, twin_pair_count};
pub use robber::{sparse_site_finder, xi_target, BallHider, MaxClassRobber, SparseSite, SparseSiteHider};

use crate::rgg::{Profile, RggError, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum StrategyError {
    #[error("no square has an empty annulus around its center")]
    NoEmptyAnnulus,
    #[error("shrink step failed: {0}")]
    ShrinkFailed(String),
    #[error("unresolvable twins (identical full signatures): {0:?}")]
    UnresolvableTwins(Vec<(VertexId, VertexId)>),
    #[error("distinguishing-set verification failed")]
    VerificationFailed,
    #[error(transparent)]
    Rgg(#[from] RggError),
}

/// Strategy constants. The paper profile carries the literal constants of
/// the analysis; the desk profile substitutes values that let the same
/// phases run on instances that fit in memory, with the asymptotic
/// guarantees explicitly waived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsProfile {
    /// Probe grid is `grid_divisions x grid_divisions`.
    pub grid_divisions: u32,
    /// Four-sensor shrinking runs while the square side exceeds
    /// `loc_square_coef * r`.
    pub loc_square_coef: f64,
    /// Side of the tessellation squares is `family_square_coef * r`,
    /// stepped by a tenth of the side.
    pub family_square_coef: f64,
    /// Lower radius scale `r0 = r0_coef * sqrt(log n)`.
    pub r0_coef: f64,
    /// Side divisor per shrink round.
    pub shrink_guard: f64,
}

impl ConstantsProfile {
    pub fn paper() -> Self {
        ConstantsProfile {
            grid_divisions: 20,
            loc_square_coef: 20000.0,
            family_square_coef: 1e5,
            r0_coef: 70.0,
            shrink_guard: 4.0,
        }
    }

    pub fn desk() -> Self {
        ConstantsProfile {
            grid_divisions: 20,
            loc_square_coef: 20.0,
            family_square_coef: 100.0,
            r0_coef: 3.0,
            shrink_guard: 4.0,
        }
    }

    pub fn for_profile(p: Profile) -> Self {
        match p {
            Profile::Paper => Self::paper(),
            Profile::Desk => Self::desk(),
        }
    }

    pub fn r0(&self, n: u64) -> f64 {
        self.r0_coef * ((n.max(2) as f64).ln()).sqrt()
    }
}
