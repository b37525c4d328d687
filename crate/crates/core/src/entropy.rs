//! Codes over arbitrary finite alphabets and the polymatroid `P_C` induced by
//! the joint entropy of their coordinates under the uniform distribution on
//! codewords.
//!
//! Rank values are computed in double precision, but the two exact predicates
//! are counting certificates:
//!
//! * `ρ(X) = ρ(Y)` for `X ⊆ Y` iff `|C_X| = |C_Y|`;
//! * `ρ(X) − ρ(X∖{x}) = 1` iff, inside every fiber of `X∖{x}`, coordinate `x`
//!   takes all `s` symbols equally often (the equality case of
//!   `H(Z_x | Z_{X∖x}) ≤ log_s s`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{is_prime, PrimeField};
use crate::linear::row_rank;
use crate::oracle::{values_equal, RankOracle, RankValue};
use crate::subset::{Subset, MAX_GROUND};
use crate::Limits;

/// A nonempty set of distinct words of length `n` over `{0, .., s-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    s: u32,
    n: usize,
    /// Row-major, sorted lexicographically.
    words: Vec<u32>,
}

impl Code {
    pub fn new(s: u32, n: usize, words: Vec<Vec<u32>>) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidCode(format!("alphabet size {s} < 2")));
        }
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidCode(format!("length {n} outside 1..={MAX_GROUND}")));
        }
        if words.is_empty() {
            return Err(Error::InvalidCode("no codewords".into()));
        }
        for (i, w) in words.iter().enumerate() {
            if w.len() != n {
                return Err(Error::InvalidCode(format!(
                    "word {} has length {}, expected {n}",
                    i + 1,
                    w.len()
                )));
            }
            if let Some(&a) = w.iter().find(|&&a| a >= s) {
                return Err(Error::InvalidCode(format!(
                    "word {} has symbol {a} outside the alphabet of size {s}",
                    i + 1
                )));
            }
        }
        let mut words = words;
        words.sort_unstable();
        if let Some(w) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::InvalidCode(format!("duplicate codeword {:?}", w[0])));
        }
        Ok(Code {
            s,
            n,
            words: words.concat(),
        })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.s
    }

    pub fn length(&self) -> usize {
        self.n
    }

    /// `|C|`
    pub fn size(&self) -> usize {
        self.words.len() / self.n
    }

    pub fn word(&self, i: usize) -> &[u32] {
        &self.words[i * self.n..(i + 1) * self.n]
    }

    pub fn words(&self) -> impl Iterator<Item = &[u32]> {
        self.words.chunks_exact(self.n)
    }

    /// `k = log_s |C|`, certified integral when `|C|` is a power of `s`.
    pub fn k(&self) -> RankValue {
        log_count(self.size(), self.s)
    }

    /// `⌈k⌉`, computed exactly as the least `m` with `s^m ≥ |C|`.
    pub fn k_ceil(&self) -> i64 {
        let target = self.size() as u128;
        let mut m = 0;
        let mut p: u128 = 1;
        while p < target {
            p = p.saturating_mul(self.s as u128);
            m += 1;
        }
        m
    }

    /// Sorts codeword indices by their projection onto `x`, then by `tie`.
    fn sorted_by_projection(&self, x: Subset, tie: Option<usize>) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.size()).collect();
        idx.sort_unstable_by(|&a, &b| {
            self.cmp_on(a, b, x)
                .then_with(|| tie.map_or(Ordering::Equal, |t| self.word(a)[t].cmp(&self.word(b)[t])))
        });
        idx
    }

    fn cmp_on(&self, a: usize, b: usize, x: Subset) -> Ordering {
        let (wa, wb) = (self.word(a), self.word(b));
        for i in x.iter() {
            match wa[i].cmp(&wb[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Sizes of the fibers `{c : c_X = z}` over all `z ∈ C_X`, in the
    /// lexicographic order of `z`.
    pub fn fiber_counts(&self, x: Subset) -> Vec<usize> {
        let idx = self.sorted_by_projection(x, None);
        let mut counts = Vec::new();
        let mut run = 0;
        for (j, &i) in idx.iter().enumerate() {
            if j > 0 && self.cmp_on(idx[j - 1], i, x) != Ordering::Equal {
                counts.push(run);
                run = 0;
            }
            run += 1;
        }
        counts.push(run);
        counts
    }

    /// `|C_X|`
    pub fn projection_size(&self, x: Subset) -> usize {
        if x.is_empty() {
            return 1;
        }
        self.fiber_counts(x).len()
    }

    /// Equal number of codewords for every symbol that appears at coordinate `i`.
    pub fn coordinate_balanced(&self, i: usize) -> bool {
        let counts = self.fiber_counts(Subset::singleton(i));
        counts.iter().all(|&c| c == counts[0])
    }
}

/// `log_s(count)`, with an integer certificate when `count` is a power of `s`.
fn log_count(count: usize, s: u32) -> RankValue {
    let mut p: u128 = 1;
    let mut m = 0;
    while p < count as u128 {
        p *= s as u128;
        m += 1;
    }
    if p == count as u128 {
        RankValue::integer(m)
    } else {
        RankValue::real((count as f64).ln() / (s as f64).ln())
    }
}

/// `C_X` with the number of codewords above each projected word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionTable {
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub subset: Subset,
    pub fibers: Vec<(Vec<u32>, usize)>,
}

impl ProjectionTable {
    /// `|C_X|`
    pub fn size(&self) -> usize {
        self.fibers.len()
    }
}

pub fn project(code: &Code, x: Subset) -> ProjectionTable {
    let idx = code.sorted_by_projection(x, None);
    let mut fibers: Vec<(Vec<u32>, usize)> = Vec::new();
    for i in idx {
        let key: Vec<u32> = x.iter().map(|j| code.word(i)[j]).collect();
        match fibers.last_mut() {
            Some((k, c)) if *k == key => *c += 1,
            _ => fibers.push((key, 1)),
        }
    }
    ProjectionTable { subset: x, fibers }
}

/// `H_C(Z_X)` in base `s`. Uniform fibers are reported as `log_s |C_X|`, with an
/// integer certificate when `|C_X|` is a power of `s`.
pub fn entropy_rank(code: &Code, x: Subset) -> RankValue {
    if x.is_empty() {
        return RankValue::ZERO;
    }
    stats(code, x).rank
}

#[derive(Clone, Copy, Debug)]
struct FiberStats {
    distinct: usize,
    rank: RankValue,
}

fn stats(code: &Code, x: Subset) -> FiberStats {
    let counts = code.fiber_counts(x);
    let total = code.size();
    let distinct = counts.len();
    let rank = if counts.iter().all(|&c| c == counts[0]) {
        log_count(distinct, code.s)
    } else {
        let ln_s = (code.s as f64).ln();
        let sum: f64 = counts.iter().map(|&c| c as f64 * (c as f64).ln()).sum();
        RankValue::real(((total as f64).ln() - sum / total as f64) / ln_s)
    };
    FiberStats { distinct, rank }
}

/// The entropy polymatroid `P_C = (ρ_C, [n])`.
pub struct EntropyOracle {
    code: Code,
    cache: RwLock<HashMap<Subset, FiberStats>>,
}

impl EntropyOracle {
    pub fn code(&self) -> &Code {
        &self.code
    }

    fn stats(&self, x: Subset) -> FiberStats {
        if let Some(s) = self.cache.read().unwrap().get(&x) {
            return *s;
        }
        let s = if x.is_empty() {
            FiberStats {
                distinct: 1,
                rank: RankValue::ZERO,
            }
        } else {
            stats(&self.code, x)
        };
        self.cache.write().unwrap().insert(x, s);
        s
    }
}

pub fn entropy_oracle(code: Code) -> EntropyOracle {
    EntropyOracle {
        code,
        cache: RwLock::new(HashMap::new()),
    }
}

impl RankOracle for EntropyOracle {
    fn ground_size(&self) -> usize {
        self.code.n
    }

    fn rank(&self, x: Subset) -> RankValue {
        self.stats(x).rank
    }

    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        if x.is_subset_of(y) {
            self.stats(x).distinct == self.stats(y).distinct
        } else {
            values_equal(self.rank(x), self.rank(y), self.tolerance())
        }
    }

    fn unit_drop(&self, x: Subset, e: usize) -> bool {
        debug_assert!(x.contains(e));
        let code = &self.code;
        let rest = x.without(e);
        let idx = code.sorted_by_projection(rest, Some(e));
        let s = code.s as usize;
        let mut start = 0;
        while start < idx.len() {
            let mut end = start + 1;
            while end < idx.len() && code.cmp_on(idx[start], idx[end], rest) == Ordering::Equal {
                end += 1;
            }
            // Within the fiber, symbols at `e` are sorted; each of the s
            // symbols must occupy a run of identical length.
            let len = end - start;
            if len % s != 0 {
                return false;
            }
            let per = len / s;
            for (a, chunk) in idx[start..end].chunks(per).enumerate() {
                if chunk.iter().any(|&i| code.word(i)[e] as usize != a) {
                    return false;
                }
            }
            start = end;
        }
        true
    }
}

/// Minimum Hamming distance from the projection definition:
/// the least `|X|` with `|C_{[n]∖X}| < |C|`.
pub fn brute_force_distance(code: &Code, limits: &Limits) -> Result<usize> {
    if code.size() < 2 {
        return Err(Error::DegenerateCode);
    }
    limits.check_subsets("distance enumeration", code.n)?;
    let ground = Subset::full(code.n);
    for size in 1..=code.n {
        if ground
            .subsets_of_size(size)
            .any(|x| code.projection_size(ground.difference(x)) < code.size())
        {
            return Ok(size);
        }
    }
    unreachable!("removing every coordinate collapses a code with two words")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeClass {
    /// `None` when the alphabet size is not prime.
    pub linear: Option<bool>,
    pub quasi_uniform: bool,
    pub integral_rank: bool,
}

/// Tags a code as linear over `F_s`, quasi-uniform, and/or integral-rank
/// (almost affine). Needs `n ≤ limits.enumeration`.
pub fn classify(code: &Code, limits: &Limits) -> Result<CodeClass> {
    limits.check_subsets("classification", code.n)?;
    let linear = is_prime(code.s as u64).then(|| {
        let field = PrimeField::new(code.s as u64).expect("prime checked");
        let rows: Vec<Vec<u64>> = code
            .words()
            .map(|w| w.iter().map(|&a| a as u64).collect())
            .collect();
        let r = row_rank(&field, rows);
        // C ⊆ span(C) and |span(C)| = s^r, so C is a subspace iff the sizes agree.
        (code.s as u128).checked_pow(r as u32) == Some(code.size() as u128)
    });
    let mut quasi_uniform = true;
    let mut integral_rank = true;
    for x in Subset::full(code.n).subsets() {
        let counts = code.fiber_counts(x);
        if counts.iter().any(|&c| c != counts[0]) {
            quasi_uniform = false;
        }
        if entropy_rank(code, x).as_integer(crate::oracle::EPSILON).is_none() {
            integral_rank = false;
        }
        if !quasi_uniform && !integral_rank {
            break;
        }
    }
    Ok(CodeClass {
        linear,
        quasi_uniform,
        integral_rank,
    })
}
