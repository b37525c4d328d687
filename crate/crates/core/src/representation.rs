//! Random linear representations of constructed matroids over prime fields,
//! and checks that a generator matrix has a given rank function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::ConstructedMatroid;
use crate::error::{Error, Result};
use crate::field::{smallest_prime_at_least, PrimeField};
use crate::linear::GeneratorMatrix;
use crate::oracle::RankOracle;
use crate::polymatroid::cyclic_flats;
use crate::subset::Subset;
use crate::Limits;

/// Largest `n` for which [`VerifyPolicy::Auto`] compares all subsets.
pub const EXHAUSTIVE_VERIFY_MAX: usize = 18;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VerifyPolicy {
    /// Exhaustive up to [`EXHAUSTIVE_VERIFY_MAX`], structural with
    /// [`DEFAULT_SAMPLES`] samples above.
    Auto { seed: u64 },
    Exhaustive,
    /// Every cyclic flat `F`, every singleton, every `F ∪ {e}`, and `samples`
    /// random subsets.
    Structural { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    #[serde(serialize_with = "crate::formats::ser_subset")]
    pub set: Subset,
    pub matrix_rank: usize,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub exhaustive: bool,
    pub checked: usize,
    pub passed: bool,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepresentationResult {
    #[serde(skip)]
    pub matrix: GeneratorMatrix,
    pub q: u64,
    pub seed: u64,
    pub attempts: usize,
    pub verification: VerificationReport,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct RepresentOptions {
    /// Field size; defaults to the least prime `≥ 2^min(n, 30)`.
    pub q: Option<u64>,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for RepresentOptions {
    fn default() -> Self {
        RepresentOptions {
            q: None,
            seed: 0,
            max_attempts: 3,
        }
    }
}

/// Compares the column ranks of `matrix` against `oracle`.
pub fn verify_representation<O: RankOracle + ?Sized>(
    matrix: &GeneratorMatrix,
    oracle: &O,
    policy: VerifyPolicy,
) -> Result<VerificationReport> {
    let n = oracle.ground_size();
    if matrix.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, rank function has {n} elements",
            matrix.cols()
        )));
    }
    let policy = match policy {
        VerifyPolicy::Auto { seed } if n > EXHAUSTIVE_VERIFY_MAX => VerifyPolicy::Structural {
            samples: DEFAULT_SAMPLES,
            seed,
        },
        VerifyPolicy::Auto { .. } => VerifyPolicy::Exhaustive,
        p => p,
    };
    let (exhaustive, sets) = match policy {
        VerifyPolicy::Exhaustive => {
            if n > EXHAUSTIVE_VERIFY_MAX {
                return Err(Error::ModeInfeasible {
                    n,
                    max: EXHAUSTIVE_VERIFY_MAX,
                });
            }
            (true, (0..1u64 << n).map(Subset::from_bits).collect())
        }
        VerifyPolicy::Structural { samples, seed } => (false, structural_sets(oracle, samples, seed)?),
        VerifyPolicy::Auto { .. } => unreachable!(),
    };
    let tol = oracle.tolerance();
    let mismatch = sets
        .par_iter()
        .map(|&x| (x, matrix.column_rank(x), oracle.rank(x).value()))
        .find_first(|&(_, got, want)| (got as f64 - want).abs() > tol)
        .map(|(set, matrix_rank, expected)| Mismatch {
            set,
            matrix_rank,
            expected,
        });
    Ok(VerificationReport {
        exhaustive,
        checked: sets.len(),
        passed: mismatch.is_none(),
        mismatch,
    })
}

fn structural_sets<O: RankOracle + ?Sized>(oracle: &O, samples: usize, seed: u64) -> Result<Vec<Subset>> {
    let ground = oracle.ground();
    let mut sets = Vec::new();
    for (f, _) in cyclic_flats(oracle, &Limits::default())? {
        sets.push(f);
        sets.extend(ground.difference(f).iter().map(|e| f.with(e)));
    }
    sets.extend(ground.iter().map(Subset::singleton));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sets.extend((0..samples).map(|_| Subset::from_bits(rng.gen::<u64>() & ground.bits())));
    Ok(sets)
}

/// Derives the seed of attempt `a` from the user seed.
fn attempt_seed(seed: u64, a: usize) -> u64 {
    seed ^ (a as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn random_vector(field: &PrimeField, k: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..k).map(|_| rng.gen_range(0..field.modulus())).collect()
}

fn combination(field: &PrimeField, basis: &[Vec<u64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut v = vec![0; k];
    for b in basis {
        let c = rng.gen_range(0..field.modulus());
        for (vi, &bi) in v.iter_mut().zip(b) {
            *vi = field.add(*vi, field.mul(c, bi));
        }
    }
    v
}

/// Draws columns for one attempt. Elements in several blocks, and elements
/// in none, get uniform columns. Each block `F_i` then spans the columns of
/// its shared elements plus fresh random vectors, up to dimension
/// `min(ρ(F_i), k)`, and its remaining elements are random combinations of
/// that spanning set.
fn sample_columns(matroid: &ConstructedMatroid, field: &PrimeField, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let spec = matroid.spec();
    let k = spec.k;
    let mut count = vec![0usize; spec.n];
    for b in &spec.blocks {
        for e in b.elements.iter() {
            count[e] += 1;
        }
    }
    let mut columns: Vec<Option<Vec<u64>>> = vec![None; spec.n];
    for e in 0..spec.n {
        if count[e] != 1 {
            columns[e] = Some(random_vector(field, k, rng));
        }
    }
    for b in &spec.blocks {
        let mut basis: Vec<Vec<u64>> = b
            .elements
            .iter()
            .filter(|&e| count[e] > 1)
            .map(|e| columns[e].clone().expect("shared columns drawn first"))
            .collect();
        let dim = b.rank.min(k);
        while basis.len() < dim {
            basis.push(random_vector(field, k, rng));
        }
        for e in b.elements.iter().filter(|&e| count[e] == 1) {
            columns[e] = Some(combination(field, &basis, k, rng));
        }
    }
    columns.into_iter().map(|c| c.expect("every column drawn")).collect()
}

/// Finds a `k × n` generator matrix over `F_q` whose column matroid is `matroid`,
/// retrying with derived seeds until verification passes.
pub fn represent(matroid: &ConstructedMatroid, opts: &RepresentOptions) -> Result<RepresentationResult> {
    let n = matroid.ground_size();
    let k = matroid.spec().k;
    if k == 0 {
        return Err(Error::ZeroRank);
    }
    let field = match opts.q {
        Some(q) => PrimeField::new(q)?,
        None => smallest_prime_at_least(1u64 << n.min(30))?,
    };
    let q = field.modulus();
    let warning = (n >= 64 || q < 1u64 << n).then(|| {
        format!("q = {q} is below 2^{n}; success is likely but not guaranteed, and failed draws are retried")
    });
    let mut witness = Subset::EMPTY;
    for a in 0..opts.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed(opts.seed, a));
        let columns = sample_columns(matroid, &field, &mut rng);
        let rows: Vec<Vec<u64>> = (0..k).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let matrix = match GeneratorMatrix::new(field, rows) {
            Ok(m) => m,
            Err(_) => {
                witness = matroid.ground();
                continue;
            }
        };
        let report = verify_representation(&matrix, matroid, VerifyPolicy::Auto { seed: opts.seed })?;
        if report.passed {
            return Ok(RepresentationResult {
                matrix,
                q,
                seed: opts.seed,
                attempts: a + 1,
                verification: report,
                warning,
            });
        }
        witness = report.mismatch.map_or(Subset::EMPTY, |m| m.set);
    }
    Err(Error::RepresentationFailed {
        attempts: opts.max_attempts,
        witness,
    })
}
