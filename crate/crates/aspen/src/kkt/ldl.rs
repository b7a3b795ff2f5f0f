//! Sparse LDLᵀ factorization for symmetric quasi-definite matrices:
//! elimination-tree symbolic analysis followed by an up-looking numeric
//! factorization, both taking the upper triangle in CSC form. Pivots are
//! guarded by a signed dynamic bump — each row carries its expected pivot
//! sign, and a pivot on the wrong side of ±`DYN_PIVOT_MIN` is replaced by
//! that signed epsilon so the factorization always completes; the raw pivot
//! signs are reported as the factored inertia.

use super::{Inertia, KktError};

/// Smallest admissible magnitude of a pivot, after which it is set to
/// `sign · DYN_PIVOT_MIN`.
pub(crate) const DYN_PIVOT_MIN: f64 = 1e-13;

pub struct LdlFactorization {
    n: usize,
    parent: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    // workspace for the numeric phase
    lnz_cur: Vec<usize>,
    y: Vec<f64>,
    pattern: Vec<usize>,
    flag: Vec<usize>,
    factored: bool,
}

const NONE: usize = usize::MAX;

impl LdlFactorization {
    /// Symbolic analysis of the upper-triangular pattern: elimination tree
    /// and exact column counts of L. The diagonal must be structurally
    /// present in every column.
    pub fn new(n: usize, col_ptr: &[usize], row_idx: &[usize]) -> Result<Self, KktError> {
        if col_ptr.len() != n + 1 {
            return Err(KktError::Dimension(format!(
                "col_ptr has {} entries for n = {n}",
                col_ptr.len()
            )));
        }
        let mut parent = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut flag = vec![NONE; n];
        for k in 0..n {
            flag[k] = k;
            let mut has_diag = false;
            for p in col_ptr[k]..col_ptr[k + 1] {
                let mut i = row_idx[p];
                if i > k {
                    return Err(KktError::Dimension(format!(
                        "entry ({i}, {k}) below the diagonal in upper-triangular input"
                    )));
                }
                has_diag |= i == k;
                // walk toward the root, stopping at nodes already reached for k
                while flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
            if !has_diag {
                return Err(KktError::Dimension(format!("column {k} has no diagonal entry")));
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let nnz = lp[n];
        Ok(LdlFactorization {
            n,
            parent,
            lp,
            li: vec![0; nnz],
            lx: vec![0.0; nnz],
            d: vec![0.0; n],
            lnz_cur: vec![0; n],
            y: vec![0.0; n],
            pattern: vec![0; n],
            flag,
            factored: false,
        })
    }

    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    /// Up-looking numeric factorization of the matrix whose upper triangle is
    /// `(col_ptr, row_idx, values)` — the same pattern the symbolic phase saw.
    /// `signs[k] = ±1` is the expected pivot sign of row k.
    pub fn factor(
        &mut self,
        col_ptr: &[usize],
        row_idx: &[usize],
        values: &[f64],
        signs: &[f64],
    ) -> Result<Inertia, KktError> {
        let n = self.n;
        self.flag.fill(NONE);
        self.y.fill(0.0);
        let mut inertia = Inertia::default();
        for k in 0..n {
            // nonzero pattern of row k of L, in topological order from the etree
            let mut top = n;
            self.flag[k] = k;
            self.lnz_cur[k] = 0;
            for p in col_ptr[k]..col_ptr[k + 1] {
                let mut i = row_idx[p];
                debug_assert!(i <= k);
                self.y[i] += values[p];
                let mut len = 0;
                while self.flag[i] != k {
                    self.pattern[len] = i;
                    len += 1;
                    self.flag[i] = k;
                    i = self.parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    self.pattern[top] = self.pattern[len];
                }
            }
            // sparse triangular solve against the columns in the pattern
            let mut dk = self.y[k];
            self.y[k] = 0.0;
            for t in top..n {
                let i = self.pattern[t];
                let yi = self.y[i];
                self.y[i] = 0.0;
                let p2 = self.lp[i] + self.lnz_cur[i];
                for p in self.lp[i]..p2 {
                    self.y[self.li[p]] -= self.lx[p] * yi;
                }
                let l_ki = yi / self.d[i];
                dk -= l_ki * yi;
                self.li[p2] = k;
                self.lx[p2] = l_ki;
                self.lnz_cur[i] += 1;
            }
            // raw sign drives the reported inertia; the bump only keeps the
            // factorization alive
            if dk > 0.0 {
                inertia.pos += 1;
            } else if dk < 0.0 {
                inertia.neg += 1;
            } else {
                inertia.zero += 1;
            }
            if signs[k] * dk < DYN_PIVOT_MIN {
                dk = signs[k] * DYN_PIVOT_MIN;
                inertia.bumps += 1;
            }
            self.d[k] = dk;
        }
        self.factored = true;
        Ok(inertia)
    }

    /// In-place solve of `L D Lᵀ x = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), KktError> {
        if !self.factored {
            return Err(KktError::Factorization("solve before factor".into()));
        }
        debug_assert_eq!(b.len(), self.n);
        for j in 0..self.n {
            let bj = b[j];
            for p in self.lp[j]..self.lp[j + 1] {
                b[self.li[p]] -= self.lx[p] * bj;
            }
        }
        for j in 0..self.n {
            b[j] /= self.d[j];
        }
        for j in (0..self.n).rev() {
            let mut bj = b[j];
            for p in self.lp[j]..self.lp[j + 1] {
                bj -= self.lx[p] * b[self.li[p]];
            }
            b[j] = bj;
        }
        Ok(())
    }
}
