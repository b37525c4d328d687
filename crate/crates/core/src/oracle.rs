//! Rank functions over a finite ground set.
//!
//! A [`RankOracle`] answers `rank(X)` numerically, and additionally exposes two
//! exact predicates. Every algorithmic branch in this crate (closure, cyclicity,
//! minimum distance, repair sets) goes through those predicates; the numeric
//! value and [`RankOracle::tolerance`] are only used for axiom spot checks and
//! for reporting.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::subset::Subset;

/// Tolerance for comparing double-precision rank values.
pub const EPSILON: f64 = 1e-9;

/// A rank value. `exact` is present when the value is known to be an integer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankValue {
    value: f64,
    exact: Option<i64>,
}

impl RankValue {
    pub const ZERO: RankValue = RankValue {
        value: 0.0,
        exact: Some(0),
    };

    pub fn integer(v: i64) -> Self {
        RankValue {
            value: v as f64,
            exact: Some(v),
        }
    }

    /// A real value without an integrality certificate.
    pub fn real(v: f64) -> Self {
        RankValue {
            value: v,
            exact: None,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn exact(&self) -> Option<i64> {
        self.exact
    }

    /// Integer value if certified, or if the numeric value is within `tol` of one.
    pub fn as_integer(&self, tol: f64) -> Option<i64> {
        self.exact.or_else(|| {
            let r = self.value.round();
            ((self.value - r).abs() <= tol).then_some(r as i64)
        })
    }

    /// `⌈value⌉`, treating values within `tol` of an integer as that integer.
    pub fn ceil(&self, tol: f64) -> i64 {
        match self.as_integer(tol) {
            Some(v) => v,
            None => self.value.ceil() as i64,
        }
    }

    /// `⌊value⌋`, treating values within `tol` of an integer as that integer.
    pub fn floor(&self, tol: f64) -> i64 {
        match self.as_integer(tol) {
            Some(v) => v,
            None => self.value.floor() as i64,
        }
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{:.6}", self.value),
        }
    }
}

impl Serialize for RankValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.exact {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_f64(self.value),
        }
    }
}

/// `a == b`, exactly when both are certified integers, otherwise within `tol`.
pub fn values_equal(a: RankValue, b: RankValue, tol: f64) -> bool {
    match (a.exact, b.exact) {
        (Some(x), Some(y)) => x == y,
        _ => (a.value - b.value).abs() <= tol,
    }
}

/// A set function `ρ : 2^E → R` with exact comparison hooks.
///
/// Implementations must be immutable after construction; all methods may be
/// called concurrently.
pub trait RankOracle: Send + Sync {
    fn ground_size(&self) -> usize;

    fn rank(&self, x: Subset) -> RankValue;

    /// Tolerance used by the default predicates and axiom checks.
    fn tolerance(&self) -> f64 {
        EPSILON
    }

    /// `ρ(x) == ρ(y)` for `x ⊆ y`.
    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        values_equal(self.rank(x), self.rank(y), self.tolerance())
    }

    /// `ρ(x) - ρ(x ∖ {e}) == 1` for `e ∈ x`.
    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        let hi = self.rank(x);
        let lo = self.rank(x.without(e));
        match (hi.exact, lo.exact) {
            (Some(a), Some(b)) => a - b == 1,
            _ => (hi.value - lo.value - 1.0).abs() <= self.tolerance(),
        }
    }

    /// `cl(x) = {y : ρ(x ∪ {y}) = ρ(x)}`.
    fn closure(&self, x: Subset) -> Subset {
        self.ground()
            .difference(x)
            .iter()
            .filter(|&y| self.rank_equal(x, x.with(y)))
            .fold(x, Subset::with)
    }

    /// The full list of cyclic flats, when the oracle knows it by construction.
    fn known_cyclic_flats(&self) -> Option<Vec<(Subset, RankValue)>> {
        None
    }

    fn ground(&self) -> Subset {
        Subset::full(self.ground_size())
    }
}

impl<O: RankOracle + ?Sized> RankOracle for &O {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn rank(&self, x: Subset) -> RankValue {
        (**self).rank(x)
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        (**self).rank_equal(x, y)
    }
    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        (**self).unit_drop(x, e)
    }
    fn closure(&self, x: Subset) -> Subset {
        (**self).closure(x)
    }
    fn known_cyclic_flats(&self) -> Option<Vec<(Subset, RankValue)>> {
        (**self).known_cyclic_flats()
    }
}

impl<O: RankOracle + ?Sized> RankOracle for Box<O> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn rank(&self, x: Subset) -> RankValue {
        (**self).rank(x)
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        (**self).rank_equal(x, y)
    }
    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        (**self).unit_drop(x, e)
    }
    fn closure(&self, x: Subset) -> Subset {
        (**self).closure(x)
    }
    fn known_cyclic_flats(&self) -> Option<Vec<(Subset, RankValue)>> {
        (**self).known_cyclic_flats()
    }
}

/// An oracle backed by a closure. Its predicates are the tolerance-based defaults,
/// which are exact whenever the closure returns certified integers.
pub struct FnOracle<F> {
    n: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(Subset) -> RankValue + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        FnOracle { n, f }
    }
}

impl<F> RankOracle for FnOracle<F>
where
    F: Fn(Subset) -> RankValue + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.n
    }

    fn rank(&self, x: Subset) -> RankValue {
        (self.f)(x)
    }
}

/// Uniform matroid `U_{k,n}`: `ρ(X) = min(|X|, k)`.
pub fn uniform_matroid(n: usize, k: usize) -> FnOracle<impl Fn(Subset) -> RankValue + Send + Sync> {
    FnOracle::new(n, move |x: Subset| RankValue::integer(x.len().min(k) as i64))
}

/// Free matroid: `ρ(X) = |X|`.
pub fn free_matroid(n: usize) -> FnOracle<impl Fn(Subset) -> RankValue + Send + Sync> {
    FnOracle::new(n, |x: Subset| RankValue::integer(x.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_predicates_are_exact() {
        let u = uniform_matroid(4, 2);
        let e = Subset::full(4);
        assert!(u.rank_equal(Subset::from_elements([0, 1]), e));
        assert!(!u.rank_equal(Subset::singleton(0), e));
        assert!(u.unit_drop(Subset::from_elements([0, 1]), 1));
        assert!(!u.unit_drop(e, 1));
    }

    #[test]
    fn rounding_helpers() {
        let v = RankValue::real(2.5);
        assert_eq!(v.ceil(EPSILON), 3);
        assert_eq!(v.floor(EPSILON), 2);
        let w = RankValue::real(3.0 - 1e-12);
        assert_eq!(w.ceil(EPSILON), 3);
        assert_eq!(w.floor(EPSILON), 3);
        assert_eq!(RankValue::integer(4).to_string(), "4");
    }
}
