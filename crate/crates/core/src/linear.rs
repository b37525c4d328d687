//! Generator matrices over prime fields and the matroid of a linear code.

use crate::entropy::Code;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::oracle::{RankOracle, RankValue};
use crate::subset::{Subset, MAX_GROUND};
use crate::Limits;

/// A full-row-rank `k × n` matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    field: PrimeField,
    k: usize,
    n: usize,
    /// Row-major.
    entries: Vec<u64>,
}

impl GeneratorMatrix {
    pub fn new(field: PrimeField, rows: Vec<Vec<u64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidMatrix(format!("{n} columns outside 1..={MAX_GROUND}")));
        }
        if k > n {
            return Err(Error::InvalidMatrix(format!("{k} rows exceed {n} columns")));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    r.len()
                )));
            }
            if let Some(&a) = r.iter().find(|&&a| a >= field.modulus()) {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has entry {a} not reduced mod {}",
                    i + 1,
                    field.modulus()
                )));
            }
        }
        let rank = row_rank(&field, rows.clone());
        if rank != k {
            return Err(Error::InvalidMatrix(format!("row rank {rank} < {k} rows")));
        }
        Ok(GeneratorMatrix {
            field,
            k,
            n,
            entries: rows.concat(),
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.k).map(|i| self.entry(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.k).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rank of the columns indexed by `x`.
    pub fn column_rank(&self, x: Subset) -> usize {
        row_rank(&self.field, x.iter().map(|j| self.column(j)).collect())
    }
}

/// Rank of a list of equal-length vectors, by fraction-free forward
/// elimination pivoting on the first nonzero entry.
pub fn row_rank(field: &PrimeField, mut rows: Vec<Vec<u64>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col];
        for row in rest.iter_mut() {
            let a = row[col];
            if a == 0 {
                continue;
            }
            for j in col..width {
                row[j] = field.sub(field.mul(pivot, row[j]), field.mul(a, pivot_row[j]));
            }
        }
        rank += 1;
    }
    rank
}

/// An incrementally built echelon basis of a subspace of `F_q^k`.
struct Span<'a> {
    field: &'a PrimeField,
    basis: Vec<(usize, Vec<u64>)>,
}

impl<'a> Span<'a> {
    fn new(field: &'a PrimeField) -> Self {
        Span {
            field,
            basis: Vec::new(),
        }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let f = self.field;
        for (p, b) in &self.basis {
            let a = v[*p];
            if a != 0 {
                let piv = b[*p];
                for j in 0..v.len() {
                    v[j] = f.sub(f.mul(piv, v[j]), f.mul(a, b[j]));
                }
            }
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    fn insert(&mut self, v: Vec<u64>) -> bool {
        let v = self.reduce(v);
        match v.iter().position(|&a| a != 0) {
            Some(p) => {
                self.basis.push((p, v));
                true
            }
            None => false,
        }
    }

    fn contains(&self, v: Vec<u64>) -> bool {
        self.reduce(v).iter().all(|&a| a == 0)
    }
}

/// `ρ(X) = rank of the columns in X`, the matroid of the code generated by the matrix.
#[derive(Clone, Debug)]
pub struct LinearRankOracle {
    matrix: GeneratorMatrix,
}

impl LinearRankOracle {
    pub fn new(matrix: GeneratorMatrix) -> Self {
        LinearRankOracle { matrix }
    }

    pub fn matrix(&self) -> &GeneratorMatrix {
        &self.matrix
    }
}

impl RankOracle for LinearRankOracle {
    fn ground_size(&self) -> usize {
        self.matrix.n
    }

    fn rank(&self, x: Subset) -> RankValue {
        let mut span = Span::new(&self.matrix.field);
        for j in x.iter() {
            if span.basis.len() == self.matrix.k {
                break;
            }
            span.insert(self.matrix.column(j));
        }
        RankValue::integer(span.basis.len() as i64)
    }

    fn rank_equal(&self, x: Subset, y: Subset) -> bool {
        if !x.is_subset_of(y) {
            return self.rank(x) == self.rank(y);
        }
        let mut span = Span::new(&self.matrix.field);
        for j in x.iter() {
            span.insert(self.matrix.column(j));
        }
        span.basis.len() == self.matrix.k || y.difference(x).iter().all(|j| span.contains(self.matrix.column(j)))
    }

    fn closure(&self, x: Subset) -> Subset {
        let mut span = Span::new(&self.matrix.field);
        for j in x.iter() {
            span.insert(self.matrix.column(j));
        }
        self.ground()
            .difference(x)
            .iter()
            .filter(|&y| span.contains(self.matrix.column(y)))
            .fold(x, Subset::with)
    }
}

/// All `q^k` codewords `m · G`.
pub fn expand_codewords(matrix: &GeneratorMatrix, limits: &Limits) -> Result<Code> {
    let q = matrix.field.modulus();
    let count = q
        .checked_pow(matrix.k as u32)
        .filter(|&c| c <= limits.expansion)
        .ok_or(Error::ExpansionInfeasible {
            q,
            k: matrix.k,
            limit: limits.expansion,
        })?;
    let f = &matrix.field;
    let mut words = Vec::with_capacity(count as usize);
    let mut msg = vec![0u64; matrix.k];
    for _ in 0..count {
        let word: Vec<u32> = (0..matrix.n)
            .map(|j| {
                msg.iter()
                    .enumerate()
                    .fold(0, |acc, (i, &m)| f.add(acc, f.mul(m, matrix.entry(i, j)))) as u32
            })
            .collect();
        words.push(word);
        // next message in base-q counting order
        for m in msg.iter_mut() {
            *m += 1;
            if *m < q {
                break;
            }
            *m = 0;
        }
    }
    Code::new(q as u32, matrix.n, words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{entropy_oracle, Code};
    use crate::polymatroid::{check_matroid, CheckMode};

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn l(labels: &[usize]) -> Subset {
        Subset::from_labels(labels.iter().copied())
    }

    #[test]
    fn column_ranks() {
        let id = GeneratorMatrix::new(gf(2), vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.column_rank(l(&[1, 2])), 2);
        assert_eq!(id.column_rank(Subset::EMPTY), 0);
        let g = GeneratorMatrix::new(gf(2), vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(g.column_rank(l(&[1, 3])), 2);
        assert_eq!(g.column_rank(l(&[1, 2, 3])), 2);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(GeneratorMatrix::new(gf(2), vec![]).is_err());
        assert!(GeneratorMatrix::new(gf(2), vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(GeneratorMatrix::new(gf(3), vec![vec![1, 3]]).is_err());
        assert!(GeneratorMatrix::new(gf(3), vec![vec![1, 2], vec![1]]).is_err());
        assert!(GeneratorMatrix::new(gf(3), vec![vec![1], vec![2]]).is_err());
    }

    #[test]
    fn expansion() {
        let limits = Limits::default();
        let rep = GeneratorMatrix::new(gf(2), vec![vec![1, 1, 1]]).unwrap();
        let c = expand_codewords(&rep, &limits).unwrap();
        assert_eq!(c, Code::new(2, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap());

        let g = GeneratorMatrix::new(gf(2), vec![vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let c = expand_codewords(&g, &limits).unwrap();
        let even = Code::new(
            2,
            3,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        assert_eq!(c, even);

        let id3 = GeneratorMatrix::new(gf(3), vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(expand_codewords(&id3, &limits).unwrap().size(), 9);

        let tight = Limits {
            expansion: 8,
            ..Limits::default()
        };
        assert!(matches!(
            expand_codewords(&id3, &tight),
            Err(Error::ExpansionInfeasible { .. })
        ));
    }

    #[test]
    fn entropy_of_expansion_matches_column_rank() {
        let g = GeneratorMatrix::new(gf(3), vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap();
        let lin = LinearRankOracle::new(g.clone());
        let ent = entropy_oracle(expand_codewords(&g, &Limits::default()).unwrap());
        for x in Subset::full(4).subsets() {
            assert_eq!(lin.rank(x), ent.rank(x), "{x}");
            assert_eq!(lin.closure(x), ent.closure(x));
        }
        assert!(check_matroid(&lin, CheckMode::Exhaustive).unwrap().passed());
    }
}
