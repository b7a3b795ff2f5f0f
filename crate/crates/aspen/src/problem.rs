//! Problem container for conic programs in the form
//!
//! ```text
//! minimize    cᵀx
//! subject to  G x = h
//!             A x + s = b,   s ∈ K₁ × … × K_r
//! ```

use crate::algebra::CscMatrix;
use crate::cones::ConeSpec;

#[derive(Debug, Clone)]
pub struct ProblemData {
    pub c: Vec<f64>,
    pub g_mat: CscMatrix,
    pub h: Vec<f64>,
    pub a_mat: CscMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<ConeSpec>,
}

impl ProblemData {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn p(&self) -> usize {
        self.g_mat.nrows
    }

    pub fn m(&self) -> usize {
        self.a_mat.nrows
    }

    /// Collect every structural violation rather than stopping at the first;
    /// a caller rejecting a file wants the full list.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let n = self.c.len();
        if self.g_mat.ncols != n {
            errs.push(format!("G has {} columns, c has {} entries", self.g_mat.ncols, n));
        }
        if self.a_mat.ncols != n {
            errs.push(format!("A has {} columns, c has {} entries", self.a_mat.ncols, n));
        }
        if self.h.len() != self.g_mat.nrows {
            errs.push(format!(
                "h has {} entries, G has {} rows",
                self.h.len(),
                self.g_mat.nrows
            ));
        }
        if self.b.len() != self.a_mat.nrows {
            errs.push(format!(
                "b has {} entries, A has {} rows",
                self.b.len(),
                self.a_mat.nrows
            ));
        }
        let cone_dim = crate::cones::total_dim(&self.cones);
        if cone_dim != self.a_mat.nrows {
            errs.push(format!(
                "cones span {cone_dim} rows, A has {} rows",
                self.a_mat.nrows
            ));
        }
        for (k, cone) in self.cones.iter().enumerate() {
            if let Err(e) = cone.validate() {
                errs.push(format!("cone {k}: {e}"));
            }
        }
        for (name, vals) in [("c", &self.c), ("h", &self.h), ("b", &self.b)] {
            if vals.iter().any(|v| !v.is_finite()) {
                errs.push(format!("{name} contains a non-finite entry"));
            }
        }
        for (name, mat) in [("G", &self.g_mat), ("A", &self.a_mat)] {
            if mat.values.iter().any(|v| !v.is_finite()) {
                errs.push(format!("{name} contains a non-finite entry"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid_problem() -> ProblemData {
        ProblemData {
            c: vec![0.0, -1.0],
            g_mat: CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]),
            h: vec![1.0],
            a_mat: CscMatrix::from_triplets(2, 2, &[(0, 0, -1.0), (1, 1, -1.0)]),
            b: vec![0.0, 0.0],
            cones: vec![ConeSpec::NonNeg { n: 2 }],
        }
    }

    #[test]
    fn valid_problem_passes() {
        assert!(valid_problem().validate().is_ok());
    }

    #[test]
    fn all_violations_are_reported_together() {
        let mut p = valid_problem();
        p.h.push(2.0); // wrong h length
        p.cones = vec![ConeSpec::GenPow { alpha: vec![0.4], d1: 2, d2: 1 }]; // bad cone + wrong span
        p.b[0] = f64::NAN;
        let errs = p.validate().unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
    }
}
