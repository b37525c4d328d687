//! JSON formats for codes, generator matrices and construction specs.
//!
//! Elements are written as 1-based labels everywhere.

use serde::de::DeserializeOwned;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::construction::{Block, ConstructionSpec};
use crate::entropy::Code;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linear::GeneratorMatrix;
use crate::subset::{Subset, MAX_GROUND};

pub(crate) fn ser_element<S: Serializer>(e: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*e as u64 + 1)
}

pub(crate) fn ser_subset<S: Serializer>(x: &Subset, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.labels())
}

pub(crate) fn ser_subsets<S: Serializer>(xs: &[Subset], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.labels())?;
    }
    seq.end()
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializing plain data cannot fail")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeJson {
    s: u32,
    n: usize,
    words: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    q: u64,
    k: usize,
    n: usize,
    rows: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    elements: Vec<usize>,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    n: usize,
    k: usize,
    blocks: Vec<BlockJson>,
}

/// `{"s": int, "n": int, "words": [[int, ...], ...]}`
pub fn parse_code(text: &str) -> Result<Code> {
    let j: CodeJson = from_json(text)?;
    Code::new(j.s, j.n, j.words)
}

pub fn code_to_json(code: &Code) -> String {
    to_json(&CodeJson {
        s: code.alphabet_size(),
        n: code.length(),
        words: code.words().map(<[u32]>::to_vec).collect(),
    })
}

/// `{"q": int, "k": int, "n": int, "rows": [[int, ...], ...]}`
pub fn parse_matrix(text: &str) -> Result<GeneratorMatrix> {
    let j: MatrixJson = from_json(text)?;
    if j.rows.len() != j.k {
        return Err(Error::InvalidMatrix(format!("k = {} but {} rows given", j.k, j.rows.len())));
    }
    if let Some(r) = j.rows.iter().find(|r| r.len() != j.n) {
        return Err(Error::InvalidMatrix(format!("n = {} but a row has {} entries", j.n, r.len())));
    }
    let field = PrimeField::new(j.q).map_err(|e| Error::InvalidMatrix(e.to_string()))?;
    GeneratorMatrix::new(field, j.rows)
}

pub fn matrix_to_json(matrix: &GeneratorMatrix) -> String {
    to_json(&MatrixJson {
        q: matrix.field().modulus(),
        k: matrix.rows(),
        n: matrix.cols(),
        rows: matrix.to_rows(),
    })
}

/// `{"n": int, "k": int, "blocks": [{"elements": [int, ...], "rank": int}, ...]}`
///
/// Only checks that labels lie in `1..=n`; the construction conditions are
/// left to [`crate::construction::validate_spec`].
pub fn parse_spec(text: &str) -> Result<ConstructionSpec> {
    let j: SpecJson = from_json(text)?;
    if j.n == 0 || j.n > MAX_GROUND {
        return Err(Error::Format(format!("n = {} outside 1..={MAX_GROUND}", j.n)));
    }
    let blocks = j
        .blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            if let Some(&bad) = b.elements.iter().find(|&&e| e == 0 || e > j.n) {
                return Err(Error::Format(format!("block {} has label {bad} outside 1..={}", i + 1, j.n)));
            }
            Ok(Block {
                elements: Subset::from_labels(b.elements),
                rank: b.rank,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstructionSpec { n: j.n, k: j.k, blocks })
}

pub fn spec_to_json(spec: &ConstructionSpec) -> String {
    to_json(&SpecJson {
        n: spec.n,
        k: spec.k,
        blocks: spec
            .blocks
            .iter()
            .map(|b| BlockJson {
                elements: b.elements.labels(),
                rank: b.rank,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_round_trip() {
        let text = r#"{"s": 2, "n": 3, "words": [[0,0,0],[0,1,1],[1,0,1],[1,1,0]]}"#;
        let c = parse_code(text).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(parse_code(&code_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn matrix_round_trip() {
        let text = r#"{"q": 5, "k": 2, "n": 3, "rows": [[1,0,1],[0,1,4]]}"#;
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.entry(1, 2), 4);
        assert_eq!(parse_matrix(&matrix_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn spec_round_trip() {
        let text = r#"{"n": 3, "k": 2, "blocks": [{"elements": [1,2,3], "rank": 2}]}"#;
        let s = parse_spec(text).unwrap();
        assert_eq!(s.blocks[0].elements, Subset::full(3));
        let again = parse_spec(&spec_to_json(&s)).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_code("{"), Err(Error::Format(_))));
        assert!(matches!(parse_code(r#"{"s":2,"n":1}"#), Err(Error::Format(_))));
        assert!(matches!(parse_code(r#"{"s":2,"n":1,"words":[[0]],"x":1}"#), Err(Error::Format(_))));
        assert!(parse_code(r#"{"s":2,"n":2,"words":[[0,2]]}"#).is_err());
        assert!(parse_matrix(r#"{"q":4,"k":1,"n":1,"rows":[[1]]}"#).is_err());
        assert!(parse_matrix(r#"{"q":5,"k":2,"n":1,"rows":[[1]]}"#).is_err());
        assert!(matches!(
            parse_spec(r#"{"n":3,"k":1,"blocks":[{"elements":[0,1],"rank":1}]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_spec(r#"{"n":3,"k":1,"blocks":[{"elements":[4],"rank":1}]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(parse_spec(r#"{"n":65,"k":1,"blocks":[]}"#), Err(Error::Format(_))));
    }
}
