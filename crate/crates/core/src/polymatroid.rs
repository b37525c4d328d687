//! Polymatroid structure on top of a [`RankOracle`]: axiom checks, nullity,
//! closure, flats, cyclic sets and cyclic flats, restriction and rescaling.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{values_equal, RankOracle, RankValue};
use crate::subset::Subset;
use crate::Limits;

/// Largest ground set for exhaustive axiom checks.
pub const EXHAUSTIVE_MAX: usize = 16;

/// Violations kept verbatim in a report; the rest are only counted.
const MAX_RECORDED: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, trials: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// `ρ(∅) = 0`
    R1,
    /// monotone
    R2,
    /// submodular
    R3,
    /// integral
    R4,
    /// `ρ(X) ≤ |X|`
    R5,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::R1 => "R1 (normalized)",
            Axiom::R2 => "R2 (monotone)",
            Axiom::R3 => "R3 (submodular)",
            Axiom::R4 => "R4 (integral)",
            Axiom::R5 => "R5 (rank at most size)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    #[serde(serialize_with = "crate::formats::ser_subsets")]
    pub witnesses: Vec<Subset>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub mode: CheckMode,
    /// Number of elementary inequalities evaluated.
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    fn new(mode: CheckMode) -> Self {
        AxiomReport {
            mode,
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED {
            self.violations.push(v);
        }
    }

    fn absorb(&mut self, checked: u64, found: Vec<Violation>, count: u64) {
        self.checked += checked;
        self.violation_count += count;
        let room = MAX_RECORDED.saturating_sub(self.violations.len());
        self.violations.extend(found.into_iter().take(room));
    }
}

/// Checks (R1)–(R3).
///
/// The exhaustive mode uses the elementary forms of (R2) and (R3), which are
/// equivalent to the pairwise forms on a Boolean lattice:
/// `ρ(X) ≤ ρ(X+a)` and `ρ(X+a) + ρ(X+b) ≥ ρ(X+a+b) + ρ(X)` for all `X` and
/// `a ≠ b ∉ X`. A submodularity witness is reported as the pair `(X+a, X+b)`.
pub fn check_polymatroid<O: RankOracle + ?Sized>(oracle: &O, mode: CheckMode) -> Result<AxiomReport> {
    check(oracle, mode, false)
}

/// Checks (R1)–(R5).
pub fn check_matroid<O: RankOracle + ?Sized>(oracle: &O, mode: CheckMode) -> Result<AxiomReport> {
    check(oracle, mode, true)
}

fn check<O: RankOracle + ?Sized>(oracle: &O, mode: CheckMode, matroid: bool) -> Result<AxiomReport> {
    let n = oracle.ground_size();
    let tol = oracle.tolerance();
    let mut report = AxiomReport::new(mode);

    let r0 = oracle.rank(Subset::EMPTY);
    report.checked += 1;
    if !values_equal(r0, RankValue::ZERO, tol) {
        report.record(Violation {
            axiom: Axiom::R1,
            witnesses: vec![Subset::EMPTY],
            values: vec![r0.value()],
        });
    }

    match mode {
        CheckMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX {
                return Err(Error::ModeInfeasible {
                    n,
                    max: EXHAUSTIVE_MAX,
                });
            }
            let table = rank_table(oracle);
            let results: Vec<(u64, Vec<Violation>, u64)> = (0..table.len())
                .into_par_iter()
                .map(|bits| local_checks(&table, n, Subset::from_bits(bits as u64), tol, matroid))
                .collect();
            for (checked, found, count) in results {
                report.absorb(checked, found, count);
            }
        }
        CheckMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ground = oracle.ground().bits();
            for _ in 0..trials {
                let x = Subset::from_bits(rng.gen::<u64>() & ground);
                let y = Subset::from_bits(rng.gen::<u64>() & ground);
                let (rx, ry) = (oracle.rank(x), oracle.rank(y));
                let (ru, ri) = (oracle.rank(x.union(y)), oracle.rank(x.intersection(y)));
                report.checked += 2;
                if rx.value() > ru.value() + tol {
                    report.record(Violation {
                        axiom: Axiom::R2,
                        witnesses: vec![x, x.union(y)],
                        values: vec![rx.value(), ru.value()],
                    });
                }
                if rx.value() + ry.value() + tol < ru.value() + ri.value() {
                    report.record(Violation {
                        axiom: Axiom::R3,
                        witnesses: vec![x, y],
                        values: vec![rx.value(), ry.value(), ru.value(), ri.value()],
                    });
                }
                if matroid {
                    report.checked += 2;
                    if let Some(v) = integrality_violation(x, rx, tol) {
                        report.record(v);
                    }
                    if let Some(v) = size_violation(x, rx, tol) {
                        report.record(v);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// All `2^n` rank values, indexed by bitmask.
pub(crate) fn rank_table<O: RankOracle + ?Sized>(oracle: &O) -> Vec<RankValue> {
    let n = oracle.ground_size();
    (0..1u64 << n)
        .into_par_iter()
        .map(|bits| oracle.rank(Subset::from_bits(bits)))
        .collect()
}

fn local_checks(
    table: &[RankValue],
    n: usize,
    x: Subset,
    tol: f64,
    matroid: bool,
) -> (u64, Vec<Violation>, u64) {
    let mut checked = 0;
    let mut count = 0;
    let mut found = Vec::new();
    let mut push = |v: Violation| {
        count += 1;
        if found.len() < 4 {
            found.push(v);
        }
    };
    let rx = table[x.bits() as usize];
    if matroid {
        checked += 2;
        if let Some(v) = integrality_violation(x, rx, tol) {
            push(v);
        }
        if let Some(v) = size_violation(x, rx, tol) {
            push(v);
        }
    }
    let outside = Subset::full(n).difference(x);
    for a in outside.iter() {
        let xa = x.with(a);
        let rxa = table[xa.bits() as usize];
        checked += 1;
        if rx.value() > rxa.value() + tol {
            push(Violation {
                axiom: Axiom::R2,
                witnesses: vec![x, xa],
                values: vec![rx.value(), rxa.value()],
            });
        }
        for b in outside.iter().filter(|&b| b > a) {
            let xb = x.with(b);
            let xab = xa.with(b);
            let (rxb, rxab) = (table[xb.bits() as usize], table[xab.bits() as usize]);
            checked += 1;
            if rxa.value() + rxb.value() + tol < rxab.value() + rx.value() {
                push(Violation {
                    axiom: Axiom::R3,
                    witnesses: vec![xa, xb],
                    values: vec![rxa.value(), rxb.value(), rxab.value(), rx.value()],
                });
            }
        }
    }
    (checked, found, count)
}

fn integrality_violation(x: Subset, r: RankValue, tol: f64) -> Option<Violation> {
    r.as_integer(tol).is_none().then(|| Violation {
        axiom: Axiom::R4,
        witnesses: vec![x],
        values: vec![r.value()],
    })
}

fn size_violation(x: Subset, r: RankValue, tol: f64) -> Option<Violation> {
    (r.value() > x.len() as f64 + tol).then(|| Violation {
        axiom: Axiom::R5,
        witnesses: vec![x],
        values: vec![r.value()],
    })
}

/// Nullity `η(X) = |X| − ρ(X)`.
pub fn eta<O: RankOracle + ?Sized>(oracle: &O, x: Subset) -> RankValue {
    let r = oracle.rank(x);
    match r.exact() {
        Some(v) => RankValue::integer(x.len() as i64 - v),
        None => RankValue::real(x.len() as f64 - r.value()),
    }
}

pub fn closure<O: RankOracle + ?Sized>(oracle: &O, x: Subset) -> Subset {
    oracle.closure(x)
}

pub fn is_flat<O: RankOracle + ?Sized>(oracle: &O, x: Subset) -> bool {
    oracle.closure(x) == x
}

/// `X` is cyclic when no element drops the rank by a full unit. `∅` is cyclic.
pub fn is_cyclic<O: RankOracle + ?Sized>(oracle: &O, x: Subset) -> bool {
    x.iter().all(|e| !oracle.unit_drop(x, e))
}

pub fn is_cyclic_flat<O: RankOracle + ?Sized>(oracle: &O, x: Subset) -> bool {
    is_cyclic(oracle, x) && is_flat(oracle, x)
}

/// Visits flats reachable from `cl(∅)` by repeatedly adding one element and
/// closing, expanding only flats accepted by `keep`. Since closure is monotone,
/// when `keep` is down-closed on flats this reaches every accepted flat.
///
/// Returns the accepted flats sorted by size, then lexicographically.
pub fn explore_flats<O, F>(oracle: &O, limits: &Limits, keep: F) -> Result<Vec<Subset>>
where
    O: RankOracle + ?Sized,
    F: Fn(Subset) -> bool + Sync,
{
    let n = oracle.ground_size();
    let cap = limits.enumeration_cap();
    let ground = oracle.ground();
    let start = oracle.closure(Subset::EMPTY);
    if !keep(start) {
        return Ok(Vec::new());
    }
    let mut seen: HashSet<Subset> = HashSet::from([start]);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let next: Vec<Subset> = frontier
            .par_iter()
            .flat_map_iter(|&f| {
                // A flat G ⊇ F + e with ρ(F + e) = ρ(G) is cl(F + e), so such
                // e need no closure of their own.
                let mut children: Vec<Subset> = Vec::new();
                for e in ground.difference(f).iter() {
                    let fe = f.with(e);
                    if children.iter().any(|&g| g.contains(e) && oracle.rank_equal(fe, g)) {
                        continue;
                    }
                    children.push(oracle.closure(fe));
                }
                children
            })
            .collect();
        frontier.clear();
        for g in next {
            if !seen.contains(&g) && keep(g) {
                seen.insert(g);
                frontier.push(g);
                if seen.len() > cap {
                    return Err(Error::EnumerationInfeasible {
                        what: "flat search",
                        n,
                        limit: limits.enumeration,
                    });
                }
            }
        }
    }
    let mut out: Vec<Subset> = seen.into_iter().collect();
    out.sort_by(Subset::cmp_size_lex);
    Ok(out)
}

/// All flats.
pub fn flats<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<Vec<Subset>> {
    explore_flats(oracle, limits, |_| true)
}

/// Cyclic flats with their ranks, sorted by size then lexicographically.
///
/// Oracles that know their cyclic flats by construction answer directly;
/// otherwise this is [`cyclic_flats_by_search`].
pub fn cyclic_flats<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<Vec<(Subset, RankValue)>> {
    match oracle.known_cyclic_flats() {
        Some(mut z) => {
            z.sort_by(|a, b| a.0.cmp_size_lex(&b.0));
            Ok(z)
        }
        None => cyclic_flats_by_search(oracle, limits),
    }
}

/// Cyclic flats found by walking the lattice of flats.
pub fn cyclic_flats_by_search<O: RankOracle + ?Sized>(
    oracle: &O,
    limits: &Limits,
) -> Result<Vec<(Subset, RankValue)>> {
    let all = flats(oracle, limits)?;
    Ok(all
        .into_par_iter()
        .filter(|&f| is_cyclic(oracle, f))
        .map(|f| (f, oracle.rank(f)))
        .collect())
}

/// Cyclic flats found by testing every subset. Needs `n ≤ limits.enumeration`.
pub fn cyclic_flats_exhaustive<O: RankOracle + ?Sized>(
    oracle: &O,
    limits: &Limits,
) -> Result<Vec<(Subset, RankValue)>> {
    let n = oracle.ground_size();
    limits.check_subsets("cyclic flat enumeration", n)?;
    let mut out: Vec<(Subset, RankValue)> = (0..1u64 << n)
        .into_par_iter()
        .map(Subset::from_bits)
        .filter(|&x| is_cyclic_flat(oracle, x))
        .map(|x| (x, oracle.rank(x)))
        .collect();
    out.sort_by(|a, b| a.0.cmp_size_lex(&b.0));
    Ok(out)
}

/// `1_Z`, the union of all cyclic flats.
pub fn one_z<O: RankOracle + ?Sized>(oracle: &O, limits: &Limits) -> Result<Subset> {
    Ok(cyclic_flats(oracle, limits)?
        .iter()
        .fold(Subset::EMPTY, |acc, (z, _)| acc.union(*z)))
}

/// `ρ|Y`: the oracle restricted to `Y`, relabelled so the elements of `Y` become
/// `0..|Y|` in increasing order.
pub struct Restriction<O> {
    inner: O,
    elements: Vec<usize>,
}

impl<O: RankOracle> Restriction<O> {
    /// Maps a subset of the restricted ground set back to the original one.
    pub fn lift(&self, local: Subset) -> Subset {
        local.iter().map(|i| self.elements[i]).collect()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }
}

impl<O: RankOracle> RankOracle for Restriction<O> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }
    fn rank(&self, x: Subset) -> RankValue {
        self.inner.rank(self.lift(x))
    }
    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }
    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        self.inner.rank_equal(self.lift(x), self.lift(y))
    }
    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        self.inner.unit_drop(self.lift(x), self.elements[e])
    }
}

pub fn restrict<O: RankOracle>(oracle: O, y: Subset) -> Restriction<O> {
    debug_assert!(y.is_subset_of(oracle.ground()));
    Restriction {
        elements: y.iter().collect(),
        inner: oracle,
    }
}

/// `ρ / c` where `c` is the largest singleton rank, so every singleton has rank
/// at most 1.
pub struct Scaled<O> {
    inner: O,
    unit: RankValue,
}

impl<O: RankOracle> Scaled<O> {
    /// The divisor applied to the inner rank function.
    pub fn unit(&self) -> RankValue {
        self.unit
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: RankOracle> RankOracle for Scaled<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn rank(&self, x: Subset) -> RankValue {
        let r = self.inner.rank(x);
        match (r.exact(), self.unit.exact()) {
            (Some(a), Some(u)) if a % u == 0 => RankValue::integer(a / u),
            _ => RankValue::real(r.value() / self.unit.value()),
        }
    }

    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        self.inner.rank_equal(x, y)
    }

    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        if self.unit.exact() == Some(1) {
            return self.inner.unit_drop(x, e);
        }
        let hi = self.inner.rank(x);
        let lo = self.inner.rank(x.without(e));
        match (hi.exact(), lo.exact(), self.unit.exact()) {
            (Some(a), Some(b), Some(u)) => a - b == u,
            _ => (hi.value() - lo.value() - self.unit.value()).abs() <= self.tolerance(),
        }
    }

    fn closure(&self, x: Subset) -> Subset {
        self.inner.closure(x)
    }
}

/// Rescales so that the largest singleton rank is 1. An identically-zero
/// oracle is returned unscaled.
pub fn normalize_to_unit<O: RankOracle>(oracle: O) -> Scaled<O> {
    let tol = oracle.tolerance();
    let unit = oracle
        .ground()
        .iter()
        .map(|e| oracle.rank(Subset::singleton(e)))
        .fold(RankValue::ZERO, |m, r| if r.value() > m.value() { r } else { m });
    let unit = if unit.value() <= tol {
        RankValue::integer(1)
    } else {
        unit
    };
    Scaled { inner: oracle, unit }
}
