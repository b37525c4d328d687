//! Polymatroid tools for locally repairable codes.
//!
//! Any block code over a finite alphabet induces a polymatroid through the
//! joint entropy of its coordinates. This crate computes that polymatroid,
//! derives the code's LRC parameters `(n, k, d, r, δ, t)` from it (directly
//! and through its cyclic flats), evaluates the generalized Singleton bound,
//! builds matroids with prescribed cyclic flats, and represents those
//! matroids as linear codes over prime fields.
//!
//! Elements are 0-based in the API and 1-based in every serialized format.

pub mod construction;
pub mod entropy;
pub mod error;
pub mod field;
pub mod formats;
pub mod linear;
pub mod lrc;
pub mod oracle;
pub mod polymatroid;
pub mod representation;
pub mod subset;

pub use error::{Error, Result};
pub use oracle::{RankOracle, RankValue};
pub use subset::Subset;

/// Work caps shared by the enumeration-heavy operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Exhaustive loops over `2^n` subsets require `n <= enumeration`; searches
    /// over flats or repair-set candidates stop after `2^enumeration` items.
    pub enumeration: usize,
    /// Maximum number of codewords produced by expanding a generator matrix.
    pub expansion: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 20,
            expansion: 1 << 20,
        }
    }
}

impl Limits {
    pub fn enumeration_cap(&self) -> usize {
        1usize.checked_shl(self.enumeration as u32).unwrap_or(usize::MAX)
    }

    pub(crate) fn check_subsets(&self, what: &'static str, n: usize) -> Result<()> {
        if n > self.enumeration {
            Err(Error::EnumerationInfeasible {
                what,
                n,
                limit: self.enumeration,
            })
        } else {
            Ok(())
        }
    }
}
