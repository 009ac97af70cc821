//! JSON concept-class files.
//!
//! ```json
//! {"d1": 2, "d2": 2, "concepts": [[[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]], ...], ...]}
//! ```
//!
//! `concepts[c][x]` is the d2×d2 output of concept `c` on input `x`, written row-major as
//! `[re, im]` pairs. Floats are written in shortest round-trip form, so a load of a saved class
//! reproduces every entry bit for bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityMatrix};

use super::concept::{ChannelConcept, ConceptClass};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
struct ClassFile {
    d1: usize,
    d2: usize,
    concepts: Vec<Vec<JsonMatrix>>,
}

pub fn class_to_json(class: &ConceptClass) -> String {
    let file = ClassFile {
        d1: class.in_dim(),
        d2: class.out_dim(),
        concepts: class
            .concepts()
            .iter()
            .map(|c| c.outputs().iter().map(|o| matrix_to_json(o.matrix())).collect())
            .collect(),
    };
    serde_json::to_string(&file).expect("class file serialization cannot fail")
}

fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect()).collect()
}

pub fn class_from_json(text: &str) -> Result<ConceptClass> {
    let file: ClassFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.concepts.is_empty() {
        return Err(Error::Parse("concepts array is empty".into()));
    }
    if file.d1 == 0 || file.d2 == 0 {
        return Err(Error::Parse("d1 and d2 must be positive".into()));
    }
    let mut concepts = Vec::with_capacity(file.concepts.len());
    for (ci, outputs) in file.concepts.iter().enumerate() {
        if outputs.len() != file.d1 {
            return Err(Error::Parse(format!("concept {ci} has {} outputs, expected d1 = {}", outputs.len(), file.d1)));
        }
        let mut states = Vec::with_capacity(outputs.len());
        for (x, rows) in outputs.iter().enumerate() {
            if rows.len() != file.d2 || rows.iter().any(|r| r.len() != file.d2) {
                return Err(Error::Parse(format!("concept {ci} input {x}: output is not {0}x{0}", file.d2)));
            }
            let m = DMatrix::from_fn(file.d2, file.d2, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
            let state = ComplexMatrix::new(m)
                .and_then(DensityMatrix::new)
                .map_err(|e| Error::InvariantViolation { concept: ci, reason: format!("input {x}: {e}") })?;
            states.push(state);
        }
        concepts.push(ChannelConcept::new(states)?);
    }
    ConceptClass::new(concepts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_concepts_is_a_parse_error() {
        let err = class_from_json(r#"{"d1": 1, "d2": 2, "concepts": []}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn bad_trace_names_the_concept() {
        let text = r#"{"d1": 1, "d2": 2, "concepts": [
            [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]],
            [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]]]
        ]}"#;
        match class_from_json(text).unwrap_err() {
            Error::InvariantViolation { concept, .. } => assert_eq!(concept, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_a_parse_error() {
        let text = r#"{"d1": 2, "d2": 2, "concepts": [[[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]]]}"#;
        assert!(matches!(class_from_json(text), Err(Error::Parse(_))));
        assert!(matches!(class_from_json("not json"), Err(Error::Parse(_))));
    }
}
