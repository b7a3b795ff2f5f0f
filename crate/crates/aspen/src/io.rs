//! JSON problem files. The format stores the conic program
//! `min cᵀx  s.t. Gx = h, Ax + s = b, s ∈ K` with both matrices as triplet
//! lists (duplicate entries sum) and the cone product as a tagged list:
//!
//! ```json
//! {
//!   "version": "1",
//!   "n": 2, "p": 1, "m": 3,
//!   "c": [0.0, -1.0],
//!   "h": [1.0],
//!   "b": [0.0, 0.0, 0.0],
//!   "G": { "triplets": [[0, 0, 1.0]] },
//!   "A": { "triplets": [[0, 0, -1.0], [1, 1, -1.0], [2, 0, 0.5]] },
//!   "cones": [ { "type": "genpow", "alpha": [0.3, 0.7], "d1": 2, "d2": 1 } ]
//! }
//! ```

use crate::algebra::CscMatrix;
use crate::cones::ConeSpec;
use crate::problem::ProblemData;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid problem file: {0}")]
    Format(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct TripletMatrix {
    triplets: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ConeJson {
    Zero { n: usize },
    NonNeg { n: usize },
    GenPow { alpha: Vec<f64>, d1: usize, d2: usize },
    PowMean { alpha: Vec<f64> },
    RelEntropy { d: usize },
}

impl From<&ConeSpec> for ConeJson {
    fn from(cone: &ConeSpec) -> Self {
        match cone {
            ConeSpec::Zero { n } => ConeJson::Zero { n: *n },
            ConeSpec::NonNeg { n } => ConeJson::NonNeg { n: *n },
            ConeSpec::GenPow { alpha, d1, d2 } => {
                ConeJson::GenPow { alpha: alpha.clone(), d1: *d1, d2: *d2 }
            }
            ConeSpec::PowMean { alpha } => ConeJson::PowMean { alpha: alpha.clone() },
            ConeSpec::RelEntropy { d } => ConeJson::RelEntropy { d: *d },
        }
    }
}

impl From<ConeJson> for ConeSpec {
    fn from(cone: ConeJson) -> Self {
        match cone {
            ConeJson::Zero { n } => ConeSpec::Zero { n },
            ConeJson::NonNeg { n } => ConeSpec::NonNeg { n },
            ConeJson::GenPow { alpha, d1, d2 } => ConeSpec::GenPow { alpha, d1, d2 },
            ConeJson::PowMean { alpha } => ConeSpec::PowMean { alpha },
            ConeJson::RelEntropy { d } => ConeSpec::RelEntropy { d },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    version: String,
    n: usize,
    p: usize,
    m: usize,
    c: Vec<f64>,
    h: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "G")]
    g: TripletMatrix,
    #[serde(rename = "A")]
    a: TripletMatrix,
    cones: Vec<ConeJson>,
}

const VERSION: &str = "1";

fn checked_matrix(
    name: &str,
    nrows: usize,
    ncols: usize,
    t: &TripletMatrix,
) -> Result<CscMatrix, IoError> {
    for &(i, j, _) in &t.triplets {
        if i >= nrows || j >= ncols {
            return Err(IoError::Format(format!(
                "{name} entry ({i}, {j}) outside its {nrows}x{ncols} shape"
            )));
        }
    }
    Ok(CscMatrix::from_triplets(nrows, ncols, &t.triplets))
}

pub fn from_json_str(text: &str) -> Result<ProblemData, IoError> {
    let file: ProblemFile = serde_json::from_str(text)?;
    if file.version != VERSION {
        return Err(IoError::Format(format!(
            "unsupported version {:?}, expected {VERSION:?}",
            file.version
        )));
    }
    for (name, len, want) in [("c", file.c.len(), file.n), ("h", file.h.len(), file.p), ("b", file.b.len(), file.m)]
    {
        if len != want {
            return Err(IoError::Format(format!("{name} has {len} entries, header says {want}")));
        }
    }
    let prob = ProblemData {
        c: file.c,
        g_mat: checked_matrix("G", file.p, file.n, &file.g)?,
        h: file.h,
        a_mat: checked_matrix("A", file.m, file.n, &file.a)?,
        b: file.b,
        cones: file.cones.into_iter().map(ConeSpec::from).collect(),
    };
    prob.validate().map_err(|errs| IoError::Format(errs.join("; ")))?;
    Ok(prob)
}

pub fn to_json_string(prob: &ProblemData) -> Result<String, IoError> {
    let file = ProblemFile {
        version: VERSION.to_string(),
        n: prob.n(),
        p: prob.p(),
        m: prob.m(),
        c: prob.c.clone(),
        h: prob.h.clone(),
        b: prob.b.clone(),
        g: TripletMatrix { triplets: prob.g_mat.to_triplets() },
        a: TripletMatrix { triplets: prob.a_mat.to_triplets() },
        cones: prob.cones.iter().map(ConeJson::from).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<ProblemData, IoError> {
    from_json_str(&std::fs::read_to_string(path)?)
}

pub fn write_problem(path: impl AsRef<Path>, prob: &ProblemData) -> Result<(), IoError> {
    Ok(std::fs::write(path, to_json_string(prob)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_problem() -> ProblemData {
        ProblemData {
            c: vec![0.0, 0.0, -1.0],
            g_mat: CscMatrix::from_triplets(1, 3, &[(0, 0, 1.0), (0, 1, 1.0)]),
            h: vec![1.0],
            a_mat: CscMatrix::from_triplets(
                11,
                3,
                &[(0, 0, -1.0), (1, 1, -1.0), (2, 2, -1.0), (3, 0, 1.0), (10, 2, 0.25)],
            ),
            b: vec![0.0, 0.0, 0.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            cones: vec![
                ConeSpec::GenPow { alpha: vec![0.3, 0.7], d1: 2, d2: 1 },
                ConeSpec::NonNeg { n: 1 },
                ConeSpec::Zero { n: 1 },
                ConeSpec::PowMean { alpha: vec![0.5, 0.5] },
                ConeSpec::RelEntropy { d: 1 },
            ],
        }
    }

    #[test]
    fn round_trips_every_cone_family() {
        let prob = sample_problem();
        let text = to_json_string(&prob).unwrap();
        let back = from_json_str(&text).unwrap();
        assert_eq!(back.c, prob.c);
        assert_eq!(back.h, prob.h);
        assert_eq!(back.b, prob.b);
        assert_eq!(back.g_mat.to_triplets(), prob.g_mat.to_triplets());
        assert_eq!(back.a_mat.to_triplets(), prob.a_mat.to_triplets());
        assert_eq!(format!("{:?}", back.cones), format!("{:?}", prob.cones));
    }

    #[test]
    fn round_trips_100_randomized_problems_bit_exactly() {
        use crate::bench::{generate, Family};

        let mut count = 0;
        'outer: for seed in 0..u64::MAX {
            for family in Family::ALL {
                for &form in family.formulations() {
                    let prob = generate(family, form, 3 + (seed as usize % 7), seed)
                        .unwrap()
                        .prob;
                    let text = to_json_string(&prob).unwrap();
                    let back = from_json_str(&text).unwrap();
                    // Full-precision random data: text equality after a second
                    // round implies every f64 survived parse bit-for-bit.
                    assert_eq!(text, to_json_string(&back).unwrap(), "seed {seed}");
                    assert_eq!(back.c, prob.c);
                    assert_eq!(back.a_mat.to_triplets(), prob.a_mat.to_triplets());
                    count += 1;
                    if count == 100 {
                        break 'outer;
                    }
                }
            }
        }
    }

    #[test]
    fn round_trips_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prob.json");
        let prob = sample_problem();
        write_problem(&path, &prob).unwrap();
        let back = read_problem(&path).unwrap();
        assert_eq!(back.b, prob.b);
        assert_eq!(back.a_mat.to_triplets(), prob.a_mat.to_triplets());
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let text = r#"{
            "version": "1", "n": 1, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] },
            "A": { "triplets": [[0, 0, -0.25], [0, 0, -0.75]] },
            "cones": [ { "type": "nonneg", "n": 1 } ]
        }"#;
        let prob = from_json_str(text).unwrap();
        assert_eq!(prob.a_mat.to_triplets(), vec![(0, 0, -1.0)]);
    }

    #[test]
    fn rejects_unknown_cone_types() {
        let text = r#"{
            "version": "1", "n": 1, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] },
            "A": { "triplets": [[0, 0, -1.0]] },
            "cones": [ { "type": "exponential", "n": 1 } ]
        }"#;
        match from_json_str(text) {
            Err(IoError::Json(e)) => assert!(e.to_string().contains("exponential")),
            other => panic!("expected a JSON error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_version_and_bad_shapes() {
        let v2 = r#"{
            "version": "2", "n": 1, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] }, "A": { "triplets": [[0, 0, -1.0]] },
            "cones": [ { "type": "nonneg", "n": 1 } ]
        }"#;
        assert!(matches!(from_json_str(v2), Err(IoError::Format(m)) if m.contains("version")));

        let short_c = r#"{
            "version": "1", "n": 2, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] }, "A": { "triplets": [[0, 0, -1.0]] },
            "cones": [ { "type": "nonneg", "n": 1 } ]
        }"#;
        assert!(matches!(from_json_str(short_c), Err(IoError::Format(m)) if m.contains("c has")));

        let oob = r#"{
            "version": "1", "n": 1, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] }, "A": { "triplets": [[3, 0, -1.0]] },
            "cones": [ { "type": "nonneg", "n": 1 } ]
        }"#;
        assert!(matches!(from_json_str(oob), Err(IoError::Format(m)) if m.contains("outside")));
    }

    #[test]
    fn rejects_inconsistent_cone_span() {
        let text = r#"{
            "version": "1", "n": 1, "p": 0, "m": 1,
            "c": [1.0], "h": [], "b": [0.0],
            "G": { "triplets": [] }, "A": { "triplets": [[0, 0, -1.0]] },
            "cones": [ { "type": "nonneg", "n": 4 } ]
        }"#;
        assert!(matches!(from_json_str(text), Err(IoError::Format(_))));
    }
}
