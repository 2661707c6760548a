//! Exact verification toolkit for the symplectic and exotic nilpotent cones
//! in characteristic 2.

pub mod combinatorics;
pub mod gf2k;
pub mod linalg;
pub mod orbit;
pub mod partition;
pub mod suite;
pub mod theta;

pub use gf2k::{Field, FieldElem, FiniteField, Gf2k};
pub use linalg::{Mat, MatSpace, Subspace};
pub use partition::Partition;

pub type Gf2 = Gf2k<1>;
pub type Gf4 = Gf2k<2>;
pub type Gf8 = Gf2k<3>;
pub type Gf16 = Gf2k<4>;
pub type Gf32 = Gf2k<5>;
pub type Gf64 = Gf2k<6>;

/// Default ceiling on enumerated groups and flag varieties.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Guards against accidental exponential blow-up. `unsafe_limits` lifts both
/// ceilings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_group_order: u128,
    pub max_flags: u128,
    pub unsafe_limits: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_group_order: DEFAULT_ENUMERATION_LIMIT,
            max_flags: DEFAULT_ENUMERATION_LIMIT,
            unsafe_limits: false,
        }
    }
}
