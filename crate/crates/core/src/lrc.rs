//! LRC parameters of a rank function: minimum distance, repair sets,
//! availability, information sets, and the generalized Singleton bound.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::EntropyOracle;
use crate::error::{Error, Result};
use crate::oracle::{RankOracle, RankValue};
use crate::polymatroid::{cyclic_flats, eta, explore_flats, is_cyclic};
use crate::subset::Subset;
use crate::Limits;

/// `(r, δ, t)` locality parameters. `primed` selects the `(r, δ)'` repair
/// condition, where any `|R| − (δ − 1)` elements of `R` itself (rather than of
/// `R ∖ {x}`) must determine `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LocalityParams {
    pub r: usize,
    pub delta: usize,
    pub t: usize,
    pub primed: bool,
}

impl LocalityParams {
    pub fn new(r: usize, delta: usize, t: usize, primed: bool) -> Result<Self> {
        if r < 1 || delta < 2 || t < 1 {
            return Err(Error::InvalidParams(format!(
                "need r >= 1, delta >= 2, t >= 1; got r = {r}, delta = {delta}, t = {t}"
            )));
        }
        Ok(LocalityParams { r, delta, t, primed })
    }

    /// Largest allowed repair set, `r + δ − 1`.
    pub fn max_repair_size(&self) -> usize {
        self.r + self.delta - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalityClass {
    #[serde(rename = "info")]
    InfoSymbol,
    #[serde(rename = "1info")]
    OneInfoSymbol,
    #[serde(rename = "all")]
    AllSymbol,
}

impl LocalityClass {
    pub fn name(&self) -> &'static str {
        match self {
            LocalityClass::InfoSymbol => "info",
            LocalityClass::OneInfoSymbol => "1info",
            LocalityClass::AllSymbol => "all",
        }
    }
}

impl fmt::Display for LocalityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LocalityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "info" => Ok(LocalityClass::InfoSymbol),
            "1info" => Ok(LocalityClass::OneInfoSymbol),
            "all" => Ok(LocalityClass::AllSymbol),
            _ => Err(Error::InvalidParams(format!("unknown locality class {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvailabilityRecord {
    #[serde(serialize_with = "crate::formats::ser_element")]
    pub element: usize,
    #[serde(serialize_with = "crate::formats::ser_subsets")]
    pub sets: Vec<Subset>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LrcProfile {
    pub n: usize,
    pub k: RankValue,
    pub d: usize,
    pub bound: i64,
    pub perfect: bool,
    pub class: LocalityClass,
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub target: Subset,
    pub params: LocalityParams,
    pub availability: Vec<AvailabilityRecord>,
}

fn require_positive_rank<O: RankOracle + ?Sized>(oracle: &O) -> Result<RankValue> {
    if oracle.rank_equal(Subset::EMPTY, oracle.ground()) {
        return Err(Error::ZeroRank);
    }
    Ok(oracle.rank(oracle.ground()))
}

/// `d = min{|X| : ρ(E ∖ X) < ρ(E)}`.
///
/// A largest non-spanning set is a flat, so `d = n − max |F|` over the
/// non-spanning flats, which are found by walking the lattice of flats from
/// `cl(∅)`.
pub fn min_distance<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<usize> {
    require_positive_rank(oracle)?;
    let ground = oracle.ground();
    let non_spanning = explore_flats(oracle, limits, |f| !oracle.rank_equal(f, ground))?;
    let largest = non_spanning.iter().map(|f| f.len()).max().unwrap_or(0);
    Ok(oracle.ground_size() - largest)
}

/// `d` straight from the definition, trying every `X` in increasing size.
/// Needs `n ≤ limits.enumeration`.
pub fn min_distance_exhaustive<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<usize> {
    require_positive_rank(oracle)?;
    let n = oracle.ground_size();
    limits.check_subsets("distance enumeration", n)?;
    let ground = oracle.ground();
    (1..=n)
        .find(|&size| {
            ground
                .subsets_of_size(size)
                .any(|x| !oracle.rank_equal(ground.difference(x), ground))
        })
        .ok_or(Error::ZeroRank)
}

/// `d = ⌊n − k + 1 − max{η(Y) : Y ∈ Z ∖ {1_Z}}⌋`, valid when `k > 0` and the
/// cyclic flats cover the ground set.
pub fn min_distance_via_cyclic_flats<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<i64> {
    let k = require_positive_rank(oracle)?;
    let ground = oracle.ground();
    let z = cyclic_flats(oracle, limits)?;
    let covered = z.iter().fold(Subset::EMPTY, |acc, (f, _)| acc.union(*f));
    if covered != ground {
        return Err(Error::UncoveredElements {
            uncovered: ground.difference(covered),
        });
    }
    let max_eta = z
        .iter()
        .filter(|(f, _)| *f != ground)
        .map(|(f, _)| eta(oracle, *f))
        .fold(None::<RankValue>, |m, v| match m {
            Some(m) if m.value() >= v.value() => Some(m),
            _ => Some(v),
        })
        .unwrap_or(RankValue::ZERO);
    let n = oracle.ground_size() as i64;
    let value = match (k.exact(), max_eta.exact()) {
        (Some(k), Some(e)) => RankValue::integer(n - k + 1 - e),
        _ => RankValue::real(n as f64 - k.value() + 1.0 - max_eta.value()),
    };
    Ok(value.floor(oracle.tolerance()))
}

/// Checks that `set` is a repair set for `x` with locality `(r, δ)` (or
/// `(r, δ)'`): `x ∈ R`, `|R| ≤ r + δ − 1`, and every `Y` of size
/// `|R| − (δ − 1)` drawn from `R ∖ {x}` (or from `R`) has `ρ(Y) = ρ(R)`.
///
/// When `|R| − (δ − 1) < 0` the only admissible `Y` is `∅`.
pub fn is_repair_set<O: RankOracle + ?Sized>(oracle: &O, x: usize, set: Subset, params: &LocalityParams) -> bool {
    if !set.contains(x) || set.len() > params.max_repair_size() {
        return false;
    }
    let size = set.len().saturating_sub(params.delta - 1);
    let pool = if params.primed { set } else { set.without(x) };
    pool.subsets_of_size(size).all(|y| oracle.rank_equal(y, set))
}

fn binomial_sum(n: usize, up_to: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for j in 0..=up_to.min(n) {
        total += c;
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    total
}

/// Minimal repair sets for `x`, sorted by size then lexicographically.
///
/// Candidates must satisfy `x ∈ cl(R ∖ {x})` and be cyclic; supersets of a
/// repair set already found are skipped. Any repair set contains a minimal
/// one, and minimal repair sets are cyclic, so no availability is lost.
pub fn minimal_repair_sets<O: RankOracle + ?Sized>(
    oracle: &O,
    x: usize,
    params: &LocalityParams,
    limits: &Limits,
) -> Result<Vec<Subset>> {
    let others = oracle.ground().without(x);
    let max_extra = params.max_repair_size() - 1;
    if binomial_sum(others.len(), max_extra) > limits.enumeration_cap() as u128 {
        return Err(Error::EnumerationInfeasible {
            what: "repair-set search",
            n: oracle.ground_size(),
            limit: limits.enumeration,
        });
    }
    let mut found: Vec<Subset> = Vec::new();
    for extra in 0..=max_extra.min(others.len()) {
        let layer: Vec<Subset> = others
            .subsets_of_size(extra)
            .map(|s| s.with(x))
            .filter(|r| !found.iter().any(|f| f.is_subset_of(*r)))
            .collect();
        let mut hits: Vec<Subset> = layer
            .into_par_iter()
            .filter(|&r| {
                oracle.rank_equal(r.without(x), r) && is_cyclic(oracle, r) && is_repair_set(oracle, x, r, params)
            })
            .collect();
        hits.sort_by(Subset::cmp_size_lex);
        found.extend(hits);
    }
    Ok(found)
}

/// Repair sets worth considering for availability. Normally these are the
/// minimal ones: shrinking each chosen set to a minimal repair set inside it
/// keeps pairwise intersections equal to `{x}`. The exception is a loop `x`,
/// where `{x}` itself is a repair set that can be chosen only once, so every
/// repair set of allowed size is returned.
pub fn repair_candidates<O: RankOracle + ?Sized>(
    oracle: &O,
    x: usize,
    params: &LocalityParams,
    limits: &Limits,
) -> Result<Vec<Subset>> {
    let minimal = minimal_repair_sets(oracle, x, params, limits)?;
    if minimal.first() != Some(&Subset::singleton(x)) {
        return Ok(minimal);
    }
    let others = oracle.ground().without(x);
    let mut all = Vec::new();
    for extra in 0..=(params.max_repair_size() - 1).min(others.len()) {
        all.extend(
            others
                .subsets_of_size(extra)
                .map(|s| s.with(x))
                .filter(|&r| is_repair_set(oracle, x, r, params)),
        );
    }
    Ok(all)
}

/// Picks `t` sets from `candidates` whose pairwise intersections are `{x}`.
fn select_disjoint(candidates: &[Subset], x: usize, t: usize) -> Option<Vec<Subset>> {
    fn go(c: &[Subset], x: usize, t: usize, from: usize, used: Subset, acc: &mut Vec<Subset>) -> bool {
        if acc.len() == t {
            return true;
        }
        for i in from..c.len() {
            if c.len() - i < t - acc.len() {
                break;
            }
            let rest = c[i].without(x);
            if rest.intersection(used).is_empty() {
                acc.push(c[i]);
                if go(c, x, t, i + 1, used.union(rest), acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::with_capacity(t);
    go(candidates, x, t, 0, Subset::EMPTY, &mut acc).then_some(acc)
}

/// `t` repair sets for `x` pairwise intersecting in exactly `{x}`, if they exist.
pub fn find_availability<O: RankOracle + ?Sized>(
    oracle: &O,
    x: usize,
    params: &LocalityParams,
    limits: &Limits,
) -> Result<Option<AvailabilityRecord>> {
    let candidates = repair_candidates(oracle, x, params, limits)?;
    Ok(select_disjoint(&candidates, x, params.t).map(|sets| AvailabilityRecord { element: x, sets }))
}

/// Availability search over every repair set for `x`, with no cyclicity or
/// minimality pruning. Needs `n ≤ limits.enumeration`.
pub fn find_availability_unrestricted<O: RankOracle + ?Sized>(
    oracle: &O,
    x: usize,
    params: &LocalityParams,
    limits: &Limits,
) -> Result<Option<AvailabilityRecord>> {
    limits.check_subsets("repair-set enumeration", oracle.ground_size())?;
    let mut all: Vec<Subset> = oracle
        .ground()
        .without(x)
        .subsets()
        .map(|s| s.with(x))
        .filter(|&r| is_repair_set(oracle, x, r, params))
        .collect();
    all.sort_by(Subset::cmp_size_lex);
    Ok(select_disjoint(&all, x, params.t).map(|sets| AvailabilityRecord { element: x, sets }))
}

/// Largest `t` for which `x` has `(r, δ, t)` availability (0 if none).
pub fn max_availability<O: RankOracle + ?Sized>(
    oracle: &O,
    x: usize,
    r: usize,
    delta: usize,
    primed: bool,
    limits: &Limits,
) -> Result<usize> {
    let params = LocalityParams::new(r, delta, 1, primed)?;
    let candidates = repair_candidates(oracle, x, &params, limits)?;
    let mut t = 0;
    while t < candidates.len() && select_disjoint(&candidates, x, t + 1).is_some() {
        t += 1;
    }
    Ok(t)
}

/// `ρ(K) = k` and `ρ(K ∖ {x}) < k` for every `x ∈ K`.
pub fn is_information_set<O: RankOracle + ?Sized>(oracle: &O, set: Subset) -> bool {
    let ground = oracle.ground();
    oracle.rank_equal(set, ground) && set.iter().all(|x| !oracle.rank_equal(set.without(x), ground))
}

/// An information set whose elements all have rank exactly 1.
pub fn is_one_information<O: RankOracle + ?Sized>(oracle: &O, set: Subset) -> bool {
    is_information_set(oracle, set) && set.iter().all(|x| oracle.unit_drop(Subset::singleton(x), x))
}

/// Code-level 1-information test: the polymatroid test plus, for every
/// `i ∈ K`, equally many codewords for each symbol occurring at `i`.
pub fn is_one_information_code(oracle: &EntropyOracle, set: Subset) -> bool {
    is_one_information(oracle, set) && set.iter().all(|i| oracle.code().coordinate_balanced(i))
}

/// All information sets, lexicographically by element list.
/// Needs `n ≤ limits.enumeration`.
pub fn information_sets<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<Vec<Subset>> {
    let n = oracle.ground_size();
    limits.check_subsets("information-set enumeration", n)?;
    let mut out: Vec<Subset> = (0..1u64 << n)
        .into_par_iter()
        .map(Subset::from_bits)
        .filter(|&k| is_information_set(oracle, k))
        .collect();
    out.sort_by(|a, b| a.iter().cmp(b.iter()));
    Ok(out)
}

/// A greedy information set: scan elements in order keeping those that raise
/// the rank, then drop any that became redundant. For matroids this is the
/// lexicographically smallest basis.
pub fn greedy_information_set<O: RankOracle + ?Sized>(oracle: &O) -> Subset {
    let ground = oracle.ground();
    let mut set = Subset::EMPTY;
    for e in ground.iter() {
        if oracle.rank_equal(set, ground) {
            break;
        }
        if !oracle.rank_equal(set, set.with(e)) {
            set = set.with(e);
        }
    }
    for e in set.iter() {
        if oracle.rank_equal(set.without(e), ground) {
            set = set.without(e);
        }
    }
    set
}

/// Generalized Singleton bound with `⌈k⌉` already applied:
/// `n − ⌈k⌉ + 1 − (⌈(t(⌈k⌉ − 1) + 1) / (t(r − 1) + 1)⌉ − 1)(δ − 1)`.
pub fn singleton_bound(n: usize, k_ceil: i64, r: usize, delta: usize, t: usize) -> i64 {
    let (n, r, delta, t) = (n as i64, r as i64, delta as i64, t as i64);
    let num = t * (k_ceil - 1) + 1;
    let den = t * (r - 1) + 1;
    let ceil = -((-num).div_euclid(den));
    n - k_ceil + 1 - (ceil - 1) * (delta - 1)
}

/// [`singleton_bound`] for a real-valued `k`.
pub fn singleton_bound_real(n: usize, k: f64, r: usize, delta: usize, t: usize) -> i64 {
    singleton_bound(n, RankValue::real(k).ceil(crate::oracle::EPSILON), r, delta, t)
}

/// Computes `(n, k, d)`, availability on `target`, the bound, and whether it is met.
pub fn build_profile<O: RankOracle + ?Sized>(
    oracle: &O,
    target: Subset,
    params: &LocalityParams,
    class: LocalityClass,
    limits: &Limits,
) -> Result<LrcProfile> {
    profile_with(oracle, target, params, class, limits, |k| is_one_information(oracle, k))
}

/// [`build_profile`] for a code, using the code-level 1-information test.
pub fn build_code_profile(
    oracle: &EntropyOracle,
    target: Subset,
    params: &LocalityParams,
    class: LocalityClass,
    limits: &Limits,
) -> Result<LrcProfile> {
    profile_with(oracle, target, params, class, limits, |k| is_one_information_code(oracle, k))
}

fn profile_with<O, F>(
    oracle: &O,
    target: Subset,
    params: &LocalityParams,
    class: LocalityClass,
    limits: &Limits,
    one_info: F,
) -> Result<LrcProfile>
where
    O: RankOracle + ?Sized,
    F: Fn(Subset) -> bool,
{
    let k = require_positive_rank(oracle)?;
    let ground = oracle.ground();
    let class_ok = target.is_subset_of(ground)
        && match class {
            LocalityClass::InfoSymbol => is_information_set(oracle, target),
            LocalityClass::OneInfoSymbol => one_info(target),
            LocalityClass::AllSymbol => target == ground,
        };
    if !class_ok {
        return Err(Error::ClassMismatch {
            target,
            class: class.name(),
        });
    }
    let d = min_distance(oracle, limits)?;
    let found = target
        .iter()
        .map(|x| find_availability(oracle, x, params, limits))
        .collect::<Result<Vec<_>>>()?;
    let missing = target
        .iter()
        .zip(&found)
        .filter(|(_, r)| r.is_none())
        .fold(Subset::EMPTY, |acc, (x, _)| acc.with(x));
    if !missing.is_empty() {
        return Err(Error::AvailabilityMissing { elements: missing });
    }
    let n = oracle.ground_size();
    let bound = singleton_bound(n, k.ceil(oracle.tolerance()), params.r, params.delta, params.t);
    Ok(LrcProfile {
        n,
        k,
        d,
        bound,
        perfect: d as i64 == bound,
        class,
        target,
        params: *params,
        availability: found.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{entropy_oracle, Code};
    use crate::oracle::{free_matroid, uniform_matroid, FnOracle};

    fn l(labels: &[usize]) -> Subset {
        Subset::from_labels(labels.iter().copied())
    }

    fn repetition(n: usize) -> FnOracle<impl Fn(Subset) -> RankValue + Send + Sync> {
        FnOracle::new(n, |x: Subset| RankValue::integer(i64::from(!x.is_empty())))
    }

    #[test]
    fn bound_values() {
        assert_eq!(singleton_bound(36, 4, 3, 3, 2), 31);
        assert_eq!(singleton_bound(10, 2, 2, 2, 1), 9);
        assert_eq!(singleton_bound_real(10, 2.5, 2, 2, 1), 7);
        for (n, k) in [(5, 1), (9, 4), (20, 7)] {
            assert_eq!(singleton_bound(n, k, k as usize, 2, 1), n as i64 - k + 1);
        }
        // k = 1, r = 2, δ = 2, t = 1: ⌈1/2⌉ − 1 = 0
        assert_eq!(singleton_bound(3, 1, 2, 2, 1), 3);
    }

    #[test]
    fn distances_of_standard_matroids() {
        let limits = Limits::default();
        for (n, k) in [(4, 2), (6, 3), (5, 1), (5, 5)] {
            let u = uniform_matroid(n, k);
            assert_eq!(min_distance(&u, &limits).unwrap(), n - k + 1);
            assert_eq!(min_distance_exhaustive(&u, &limits).unwrap(), n - k + 1);
            if k < n {
                assert_eq!(min_distance_via_cyclic_flats(&u, &limits).unwrap(), (n - k + 1) as i64);
            }
        }
        assert_eq!(min_distance(&free_matroid(4), &limits).unwrap(), 1);
        assert!(matches!(
            min_distance_via_cyclic_flats(&free_matroid(4), &limits),
            Err(Error::UncoveredElements { .. })
        ));
        let zero = FnOracle::new(3, |_| RankValue::ZERO);
        assert!(matches!(min_distance(&zero, &limits), Err(Error::ZeroRank)));
    }

    #[test]
    fn repair_set_examples() {
        let u = uniform_matroid(3, 1);
        let p = LocalityParams::new(1, 2, 1, false).unwrap();
        assert!(!is_repair_set(&u, 0, l(&[1]), &p));
        let rep = repetition(3);
        let primed = LocalityParams::new(1, 2, 1, true).unwrap();
        assert!(is_repair_set(&rep, 0, l(&[1, 2]), &primed));
        assert!(is_repair_set(&rep, 0, l(&[1, 2]), &p));
        assert!(!is_repair_set(&rep, 0, l(&[2, 3]), &p));
        assert!(!is_repair_set(&rep, 0, l(&[1, 2, 3]), &p));
    }

    #[test]
    fn availability_on_repetition_code() {
        let limits = Limits::default();
        let rep = repetition(3);
        let p = LocalityParams::new(1, 2, 2, false).unwrap();
        let rec = find_availability(&rep, 0, &p, &limits).unwrap().unwrap();
        assert_eq!(rec.sets, vec![l(&[1, 2]), l(&[1, 3])]);
        let p3 = LocalityParams::new(1, 2, 3, false).unwrap();
        assert!(find_availability(&rep, 0, &p3, &limits).unwrap().is_none());
        assert_eq!(max_availability(&rep, 0, 1, 2, false, &limits).unwrap(), 2);
    }

    #[test]
    fn free_elements_have_no_repair_sets() {
        let limits = Limits::default();
        let p = LocalityParams::new(3, 2, 1, false).unwrap();
        assert!(find_availability(&free_matroid(4), 2, &p, &limits).unwrap().is_none());
    }

    #[test]
    fn information_set_examples() {
        let limits = Limits::default();
        let u = uniform_matroid(4, 2);
        let sets = information_sets(&u, &limits).unwrap();
        assert_eq!(sets.len(), 6);
        assert_eq!(sets[0], l(&[1, 2]));
        assert_eq!(greedy_information_set(&u), l(&[1, 2]));

        let c = entropy_oracle(Code::new(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap());
        assert!(is_information_set(&c, l(&[1, 2])));
        assert!(!is_one_information(&c, l(&[1, 2])));
        assert!(!is_one_information_code(&c, l(&[1, 2])));
    }

    #[test]
    fn profile_of_repetition_code() {
        let limits = Limits::default();
        let rep = entropy_oracle(Code::new(2, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap());
        let p = LocalityParams::new(1, 2, 2, false).unwrap();
        for class in [LocalityClass::InfoSymbol, LocalityClass::OneInfoSymbol] {
            let prof = build_code_profile(&rep, l(&[1]), &p, class, &limits).unwrap();
            assert_eq!((prof.d, prof.bound, prof.perfect), (3, 3, true));
        }
        let prof = build_code_profile(&rep, Subset::full(3), &p, LocalityClass::AllSymbol, &limits).unwrap();
        assert_eq!((prof.d, prof.bound, prof.perfect), (3, 3, true));
        assert_eq!(prof.availability.len(), 3);
        assert!(matches!(
            build_code_profile(&rep, l(&[1, 2]), &p, LocalityClass::InfoSymbol, &limits),
            Err(Error::ClassMismatch { .. })
        ));
    }

    #[test]
    fn profile_of_mds() {
        let limits = Limits::default();
        let u = uniform_matroid(6, 3);
        let p = LocalityParams::new(3, 2, 1, false).unwrap();
        let prof = build_profile(&u, Subset::full(6), &p, LocalityClass::AllSymbol, &limits).unwrap();
        assert_eq!(prof.d, 4);
        assert!(prof.perfect);
        let tight = LocalityParams::new(2, 2, 1, false).unwrap();
        assert!(matches!(
            build_profile(&u, Subset::full(6), &tight, LocalityClass::AllSymbol, &limits),
            Err(Error::AvailabilityMissing { .. })
        ));
    }

    #[test]
    fn class_parsing() {
        assert_eq!("1info".parse::<LocalityClass>().unwrap(), LocalityClass::OneInfoSymbol);
        assert!("x".parse::<LocalityClass>().is_err());
        assert!(LocalityParams::new(1, 1, 1, false).is_err());
    }
}
