//! Matroids with prescribed cyclic flats, built from blocks `F_1, …, F_m` with
//! assigned ranks, and the perfect-LRC family obtained from hub-and-block specs.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lrc::{is_repair_set, singleton_bound, LocalityParams};
use crate::oracle::{RankOracle, RankValue};
use crate::subset::{Subset, MAX_GROUND};

/// Most blocks [`build_matroid`] accepts, since it enumerates block index sets.
pub const MAX_BLOCKS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub elements: Subset,
    pub rank: usize,
}

impl Block {
    pub fn nullity(&self) -> usize {
        self.elements.len().saturating_sub(self.rank)
    }
}

/// Ground set `[n]`, blocks with their ranks, and the target rank `k` of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<Block>,
}

impl ConstructionSpec {
    pub fn union(&self) -> Subset {
        self.blocks.iter().fold(Subset::EMPTY, |acc, b| acc.union(b.elements))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecViolation {
    /// `"structure"`, `"i"`, `"ii"` or `"iii"`.
    pub condition: &'static str,
    /// 1-based block index, when the violation concerns one block.
    pub block: Option<usize>,
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub witness: Subset,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecReport {
    pub valid: bool,
    pub violations: Vec<SpecViolation>,
}

impl fmt::Display for SpecReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("all conditions hold");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "condition ({}): {}", v.condition, v.detail)?;
        }
        Ok(())
    }
}

/// Checks `0 < ρ(F_i) < |F_i|`, `k ≤ |F_[m]| − Σ η(F_i)` and
/// `|F_{[m]∖{i}} ∩ F_i| < ρ(F_i)`, plus that blocks lie inside `[n]`.
pub fn validate_spec(spec: &ConstructionSpec) -> SpecReport {
    let mut violations = Vec::new();
    let ground_ok = (1..=MAX_GROUND).contains(&spec.n);
    if !ground_ok {
        violations.push(SpecViolation {
            condition: "structure",
            block: None,
            witness: Subset::EMPTY,
            detail: format!("n = {} outside 1..={MAX_GROUND}", spec.n),
        });
    }
    let ground = if ground_ok { Subset::full(spec.n) } else { Subset::EMPTY };
    for (i, b) in spec.blocks.iter().enumerate() {
        if ground_ok && !b.elements.is_subset_of(ground) {
            violations.push(SpecViolation {
                condition: "structure",
                block: Some(i + 1),
                witness: b.elements.difference(ground),
                detail: format!("F_{} has elements outside [{}]", i + 1, spec.n),
            });
        }
        if b.rank == 0 || b.rank >= b.elements.len() {
            violations.push(SpecViolation {
                condition: "i",
                block: Some(i + 1),
                witness: b.elements,
                detail: format!(
                    "F_{} = {} has rank {} but needs 0 < rank < {}",
                    i + 1,
                    b.elements,
                    b.rank,
                    b.elements.len()
                ),
            });
        }
    }
    let union = spec.union();
    let total_nullity: usize = spec.blocks.iter().map(Block::nullity).sum();
    let capacity = union.len() as i64 - total_nullity as i64;
    if (spec.k as i64) > capacity {
        violations.push(SpecViolation {
            condition: "ii",
            block: None,
            witness: union,
            detail: format!("k = {} exceeds |F_[m]| - sum of nullities = {capacity}", spec.k),
        });
    }
    for (i, b) in spec.blocks.iter().enumerate() {
        let others = spec
            .blocks
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Subset::EMPTY, |acc, (_, c)| acc.union(c.elements));
        let overlap = others.intersection(b.elements);
        if overlap.len() >= b.rank {
            violations.push(SpecViolation {
                condition: "iii",
                block: Some(i + 1),
                witness: overlap,
                detail: format!(
                    "F_{} meets the other blocks in {} elements, not fewer than its rank {}",
                    i + 1,
                    overlap.len(),
                    b.rank
                ),
            });
        }
    }
    SpecReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// One member of `Z`: the set `F_I`, its rank, and the lexicographically first
/// block index set `I` producing it (`None` for `E`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicFlat {
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub set: Subset,
    pub rank: usize,
    /// 1-based block indices.
    pub blocks: Option<Vec<usize>>,
}

impl CyclicFlat {
    /// `∅`, `F_3`, `F_{1,2}` or `E`.
    pub fn name(&self) -> String {
        match &self.blocks {
            None => "E".to_string(),
            Some(b) if b.is_empty() => "∅".to_string(),
            Some(b) if b.len() == 1 => format!("F_{}", b[0]),
            Some(b) => {
                let idx: Vec<String> = b.iter().map(usize::to_string).collect();
                format!("F_{{{}}}", idx.join(","))
            }
        }
    }
}

/// The matroid `M_Z` with `ρ_Z(X) = min{ρ(F) + |X ∖ F| : F ∈ Z}`.
#[derive(Clone, Debug)]
pub struct ConstructedMatroid {
    spec: ConstructionSpec,
    z: Vec<CyclicFlat>,
}

impl ConstructedMatroid {
    pub fn spec(&self) -> &ConstructionSpec {
        &self.spec
    }

    /// `Z`, ordered by block index set with `E` last.
    pub fn z(&self) -> &[CyclicFlat] {
        &self.z
    }

    pub fn rank_of(&self, x: Subset) -> usize {
        self.z
            .iter()
            .map(|f| f.rank + x.difference(f.set).len())
            .min()
            .expect("Z always contains E")
    }
}

impl RankOracle for ConstructedMatroid {
    fn ground_size(&self) -> usize {
        self.spec.n
    }

    fn rank(&self, x: Subset) -> RankValue {
        RankValue::integer(self.rank_of(x) as i64)
    }

    fn known_cyclic_flats(&self) -> Option<Vec<(Subset, RankValue)>> {
        Some(
            self.z
                .iter()
                .map(|f| (f.set, RankValue::integer(f.rank as i64)))
                .collect(),
        )
    }
}

/// Builds `M_Z` from a valid spec.
///
/// `Z` holds every `F_I` with `ρ(F_I) = min(|F_I| − Σ_{i∈I} η(F_i), k) < k`,
/// plus `E` with rank `k`. Condition (iii) makes the uncapped value strictly
/// increasing in `I`, so index sets reaching `k` are not extended.
pub fn build_matroid(spec: &ConstructionSpec) -> Result<ConstructedMatroid> {
    let report = validate_spec(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report));
    }
    let m = spec.blocks.len();
    if m > MAX_BLOCKS {
        return Err(Error::TooManyBlocks { m, max: MAX_BLOCKS });
    }
    let k = spec.k;
    let mut found: HashMap<Subset, (usize, Vec<usize>)> = HashMap::new();

    fn visit(
        spec: &ConstructionSpec,
        next: usize,
        union: Subset,
        nullity: usize,
        index: &mut Vec<usize>,
        found: &mut HashMap<Subset, (usize, Vec<usize>)>,
    ) {
        let value = union.len() - nullity;
        if value >= spec.k {
            return;
        }
        let labels: Vec<usize> = index.iter().map(|i| i + 1).collect();
        found
            .entry(union)
            .and_modify(|e| {
                if (value, &labels) < (e.0, &e.1) {
                    *e = (value, labels.clone());
                }
            })
            .or_insert((value, labels));
        for j in next..spec.blocks.len() {
            let b = &spec.blocks[j];
            index.push(j);
            visit(spec, j + 1, union.union(b.elements), nullity + b.nullity(), index, found);
            index.pop();
        }
    }

    if k > 0 {
        visit(spec, 0, Subset::EMPTY, 0, &mut Vec::new(), &mut found);
    }
    let ground = Subset::full(spec.n);
    found.remove(&ground);
    let mut z: Vec<CyclicFlat> = found
        .into_iter()
        .map(|(set, (rank, blocks))| CyclicFlat {
            set,
            rank,
            blocks: Some(blocks),
        })
        .collect();
    z.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    z.push(CyclicFlat {
        set: ground,
        rank: k,
        blocks: None,
    });
    Ok(ConstructedMatroid { spec: spec.clone(), z })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLocality {
    /// 1-based.
    pub block: usize,
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub elements: Subset,
    pub r: usize,
    pub delta: usize,
    /// Every element of the block has it as an `(r, δ)` repair set.
    pub repair_verified: bool,
}

/// `(r, δ, t)` locality of the information set through the blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InformationLocality {
    pub r: usize,
    pub delta: usize,
    pub t: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionSummary {
    pub n: usize,
    pub k: usize,
    pub d: i64,
    pub z: Vec<CyclicFlat>,
    pub blocks: Vec<BlockLocality>,
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub information_set: Subset,
    pub information_set_valid: bool,
    pub locality: Option<InformationLocality>,
    pub bound: Option<i64>,
    pub perfect: Option<bool>,
}

/// `|K| = k` and `|K ∩ F| ≤ ρ(F)` for every `F ∈ Z`.
pub fn is_information_set_by_z(matroid: &ConstructedMatroid, k: Subset) -> bool {
    k.len() == matroid.spec.k && matroid.z.iter().all(|f| k.intersection(f.set).len() <= f.rank)
}

/// Picks a lexicographically first basis: greedily add elements that keep
/// `|K ∩ F| ≤ ρ(F)` for all `F ∈ Z`.
fn first_information_set(matroid: &ConstructedMatroid) -> Subset {
    let mut k = Subset::EMPTY;
    for e in 0..matroid.spec.n {
        if k.len() == matroid.spec.k {
            break;
        }
        if matroid.rank_of(k.with(e)) == k.len() + 1 {
            k = k.with(e);
        }
    }
    k
}

/// Largest number of sets in `sets` pairwise meeting exactly in `{x}`.
fn max_disjoint_through(x: usize, sets: &[Subset]) -> usize {
    fn go(x: usize, sets: &[Subset], used: Subset) -> usize {
        match sets.split_first() {
            None => 0,
            Some((first, rest)) => {
                let own = first.without(x);
                let skip = go(x, rest, used);
                if own.intersection(used).is_empty() {
                    skip.max(1 + go(x, rest, used.union(own)))
                } else {
                    skip
                }
            }
        }
    }
    go(x, sets, Subset::EMPTY)
}

/// `n`, `k`, `d = n − k + 1 − max{η(F) : F ∈ Z ∖ {E}}`, the locality of each
/// block, an information set with its locality through the blocks, and the
/// resulting bound.
pub fn derived_parameters(matroid: &ConstructedMatroid) -> Result<ConstructionSummary> {
    let spec = &matroid.spec;
    if spec.k == 0 {
        return Err(Error::ZeroRank);
    }
    let (n, k) = (spec.n, spec.k);
    let max_eta = matroid
        .z
        .iter()
        .filter(|f| f.blocks.is_some())
        .map(|f| f.set.len() - f.rank)
        .max()
        .unwrap_or(0);
    let d = n as i64 - k as i64 + 1 - max_eta as i64;

    let blocks: Vec<BlockLocality> = spec
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (r, delta) = (b.rank, b.nullity() + 1);
            let params = LocalityParams {
                r,
                delta,
                t: 1,
                primed: false,
            };
            BlockLocality {
                block: i + 1,
                elements: b.elements,
                r,
                delta,
                repair_verified: b.elements.iter().all(|x| is_repair_set(matroid, x, b.elements, &params)),
            }
        })
        .collect();

    let info = first_information_set(matroid);
    let information_set_valid = is_information_set_by_z(matroid, info);

    let locality = info_locality(info, &blocks);
    let bound = locality.map(|l| singleton_bound(n, k as i64, l.r, l.delta, l.t));
    Ok(ConstructionSummary {
        n,
        k,
        d,
        z: matroid.z.clone(),
        blocks,
        information_set: info,
        information_set_valid,
        locality,
        bound,
        perfect: bound.map(|b| b == d),
    })
}

/// Every element of `info` must lie in at least one block, and all such blocks
/// must share one `(r, δ)`; `t` is the worst case over `info` of the largest
/// family of those blocks pairwise meeting only in the element.
fn info_locality(info: Subset, blocks: &[BlockLocality]) -> Option<InformationLocality> {
    let mut rd: Option<(usize, usize)> = None;
    let mut t = usize::MAX;
    for x in info.iter() {
        let through: Vec<&BlockLocality> = blocks.iter().filter(|b| b.elements.contains(x)).collect();
        if through.is_empty() || through.iter().any(|b| !b.repair_verified) {
            return None;
        }
        for b in &through {
            match rd {
                None => rd = Some((b.r, b.delta)),
                Some(p) if p != (b.r, b.delta) => return None,
                _ => {}
            }
        }
        let sets: Vec<Subset> = through.iter().map(|b| b.elements).collect();
        t = t.min(max_disjoint_through(x, &sets));
    }
    rd.map(|(r, delta)| InformationLocality { r, delta, t })
}

fn check_family_params(k: usize, r: usize, delta: usize, t: usize) -> Result<usize> {
    if k < 1 || t < 1 || delta < 2 {
        return Err(Error::InvalidParams(format!(
            "need k >= 1, delta >= 2, t >= 1; got k = {k}, delta = {delta}, t = {t}"
        )));
    }
    if r < 2 {
        return Err(Error::InvalidParams(format!(
            "r = {r}: blocks sharing a hub need rank at least 2"
        )));
    }
    let n = k * (t * (r + delta - 2) + 1);
    if n > MAX_GROUND {
        return Err(Error::InvalidParams(format!("n = {n} exceeds {MAX_GROUND}")));
    }
    Ok(n)
}

/// The hub-and-block spec with `n = k(t(r + δ − 2) + 1)`: hubs `1..=k`, and for
/// each hub `t` blocks of rank `r` made of the hub and `r + δ − 2` fresh elements.
pub fn generate_perfect_family(k: usize, r: usize, delta: usize, t: usize) -> Result<ConstructionSpec> {
    let n = check_family_params(k, r, delta, t)?;
    generate_family_with_n(k, r, delta, t, n)
}

/// The family spec padded to `n` elements. Elements beyond the threshold form
/// further blocks of the same shape, assigned to hubs round-robin; any
/// remainder smaller than a block's `r + δ − 2` fresh elements is left
/// outside all blocks.
pub fn generate_family_with_n(k: usize, r: usize, delta: usize, t: usize, n: usize) -> Result<ConstructionSpec> {
    let base = check_family_params(k, r, delta, t)?;
    if n < base || n > MAX_GROUND {
        return Err(Error::InvalidParams(format!("n = {n} outside {base}..={MAX_GROUND}")));
    }
    let fresh_per_block = r + delta - 2;
    let mut next = k;
    let mut blocks = Vec::new();
    let mut push = |hub: usize, next: &mut usize| {
        let elements = Subset::from_elements((*next..*next + fresh_per_block).chain([hub]));
        *next += fresh_per_block;
        blocks.push(Block { elements, rank: r });
    };
    for hub in 0..k {
        for _ in 0..t {
            push(hub, &mut next);
        }
    }
    let mut hub = 0;
    while n - next >= fresh_per_block {
        push(hub, &mut next);
        hub = (hub + 1) % k;
    }
    Ok(ConstructionSpec { n, k, blocks })
}

/// A random spec on `[n]` satisfying all construction conditions, with up to
/// four blocks of size at least 3. Draws are rejected until valid, so `n`
/// should be at least 3.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ConstructionSpec {
    assert!((3..=MAX_GROUND).contains(&n), "random specs need 3 <= n <= {MAX_GROUND}");
    loop {
        let m = rng.gen_range(1..=4);
        let blocks: Vec<Block> = (0..m)
            .map(|_| {
                let size = rng.gen_range(3..=n.min(6));
                let elements = Subset::from_elements(rand::seq::index::sample(rng, n, size).into_iter());
                Block {
                    elements,
                    rank: rng.gen_range(1..size),
                }
            })
            .collect();
        let mut spec = ConstructionSpec { n, k: 1, blocks };
        let capacity = spec.union().len() as i64 - spec.blocks.iter().map(Block::nullity).sum::<usize>() as i64;
        if capacity < 1 {
            continue;
        }
        spec.k = rng.gen_range(1..=capacity as usize);
        if validate_spec(&spec).valid {
            return spec;
        }
    }
}
