//! Cone kernels: membership tests, dual barriers, and the structured
//! Hessian decompositions the KKT assembly consumes.
//!
//! Every nonsymmetric Hessian here is carried as `H = D + Σ uuᵀ − Σ vvᵀ`
//! with `D` sparse and at most three rank-one columns, so the KKT matrix
//! stays sparse after the quasi-definite expansion.

mod genpow;
mod powmean;
mod relentropy;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("point outside cone domain: {0}")]
    Domain(String),
    #[error("invalid cone parameters: {0}")]
    BadParams(String),
    #[error("hessian decomposition lost positivity: {0}")]
    Decomposition(String),
}

/// Which side of the conic pair a vector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSide {
    Primal,
    Dual,
}

/// One cone block of the product cone `K = K_1 × … × K_N`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// `{0}^n`; its dual is all of `R^n` (equality rows).
    Zero { n: usize },
    /// Nonnegative orthant `R_+^n` (self-dual).
    NonNeg { n: usize },
    /// Generalized power cone `{(u, w) ∈ R_+^{d1} × R^{d2} : Π u_i^{α_i} ≥ ‖w‖}`.
    GenPow { alpha: Vec<f64>, d1: usize, d2: usize },
    /// Power mean cone `{(u, w) ∈ R_+^d × R : Π u_i^{α_i} ≥ w}`.
    PowMean { alpha: Vec<f64> },
    /// Relative entropy cone `{(u, v, w) : u ≥ Σ w_i ln(w_i / v_i), v, w > 0}`.
    RelEntropy { d: usize },
}

/// Barrier value and gradient at a dual-interior point, plus the barrier degree.
#[derive(Debug, Clone)]
pub struct BarrierInfo {
    pub value: f64,
    pub grad: Vec<f64>,
    pub nu: usize,
}

/// Sparse column with explicit support.
#[derive(Debug, Clone)]
pub struct SparseVec {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

impl SparseVec {
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.idx.iter().zip(&self.val).map(|(&i, &v)| v * x[i]).sum()
    }

    /// y += a * self
    pub fn axpy_into(&self, y: &mut [f64], a: f64) {
        for (&i, &v) in self.idx.iter().zip(&self.val) {
            y[i] += a * v;
        }
    }
}

/// Scaled dual Hessian `μ H*(z)` in augmented-sparse form
/// `μ (D + Σ added addedᵀ − Σ subtracted subtractedᵀ)`.
///
/// `d_entries` and the columns are stored unscaled; the KKT assembly applies
/// `μ` to `D` and `√μ` to each rank-one column so refreshing an iterate
/// touches values only, never the pattern.
#[derive(Debug, Clone)]
pub struct AugmentedHessian {
    pub dim: usize,
    pub mu: f64,
    /// Upper-triangle (row, col, value) entries of `D`, column-sorted.
    pub d_entries: Vec<(usize, usize, f64)>,
    /// Rank-one columns entering with `+` (the `p` column, or none).
    pub added: Vec<SparseVec>,
    /// Rank-one columns entering with `−` (the `q`, `r` columns, or none).
    pub subtracted: Vec<SparseVec>,
}

impl AugmentedHessian {
    pub fn ext_dim(&self) -> usize {
        self.added.len() + self.subtracted.len()
    }

    /// y += μ H*(z) x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for &(i, j, v) in &self.d_entries {
            y[i] += self.mu * v * x[j];
            if i != j {
                y[j] += self.mu * v * x[i];
            }
        }
        for col in &self.added {
            col.axpy_into(y, self.mu * col.dot(x));
        }
        for col in &self.subtracted {
            col.axpy_into(y, -self.mu * col.dot(x));
        }
    }

    /// Dense `μ H*(z)`, row-major. Test and forced-dense-assembly use.
    pub fn dense_scaled(&self) -> Vec<f64> {
        let n = self.dim;
        let mut h = vec![0.0; n * n];
        for &(i, j, v) in &self.d_entries {
            h[i * n + j] += self.mu * v;
            if i != j {
                h[j * n + i] += self.mu * v;
            }
        }
        let rank1 = |h: &mut Vec<f64>, col: &SparseVec, sign: f64| {
            for (&i, &vi) in col.idx.iter().zip(&col.val) {
                for (&j, &vj) in col.idx.iter().zip(&col.val) {
                    h[i * n + j] += sign * self.mu * vi * vj;
                }
            }
        };
        for col in &self.added {
            rank1(&mut h, col, 1.0);
        }
        for col in &self.subtracted {
            rank1(&mut h, col, -1.0);
        }
        h
    }
}

impl ConeSpec {
    /// Dimension of the block (length of its slice of s and z).
    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Zero { n } | ConeSpec::NonNeg { n } => *n,
            ConeSpec::GenPow { d1, d2, .. } => d1 + d2,
            ConeSpec::PowMean { alpha } => alpha.len() + 1,
            ConeSpec::RelEntropy { d } => 2 * d + 1,
        }
    }

    /// Barrier degree ν. The zero cone carries no barrier and contributes 0.
    pub fn degree(&self) -> usize {
        match self {
            ConeSpec::Zero { .. } => 0,
            ConeSpec::NonNeg { n } => *n,
            ConeSpec::GenPow { d1, .. } => d1 + 1,
            ConeSpec::PowMean { alpha } => alpha.len() + 1,
            ConeSpec::RelEntropy { d } => 3 * d,
        }
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        let check_alpha = |alpha: &[f64], what: &str| -> Result<(), ConeError> {
            if alpha.is_empty() {
                return Err(ConeError::BadParams(format!("{what}: empty exponent vector")));
            }
            for &a in alpha {
                if !(a > 1e-10) {
                    return Err(ConeError::BadParams(format!("{what}: exponent {a} below 1e-10")));
                }
            }
            let sum: f64 = alpha.iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(ConeError::BadParams(format!("{what}: exponents sum to {sum}, expected 1")));
            }
            Ok(())
        };
        match self {
            ConeSpec::Zero { n } | ConeSpec::NonNeg { n } => {
                if *n == 0 {
                    return Err(ConeError::BadParams("zero-dimensional cone block".into()));
                }
            }
            ConeSpec::GenPow { alpha, d1, d2 } => {
                check_alpha(alpha, "genpow")?;
                if *d1 != alpha.len() {
                    return Err(ConeError::BadParams(format!(
                        "genpow: d1 = {d1} does not match {} exponents",
                        alpha.len()
                    )));
                }
                if *d2 == 0 {
                    return Err(ConeError::BadParams("genpow: d2 must be at least 1".into()));
                }
            }
            ConeSpec::PowMean { alpha } => check_alpha(alpha, "powmean")?,
            ConeSpec::RelEntropy { d } => {
                if *d == 0 {
                    return Err(ConeError::BadParams("relentropy: d must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Strict interior test on the given side. NaN anywhere fails.
    pub fn is_interior(&self, v: &[f64], side: ConeSide) -> bool {
        debug_assert_eq!(v.len(), self.dim());
        match (self, side) {
            (ConeSpec::Zero { .. }, ConeSide::Primal) => v.iter().all(|&x| x == 0.0),
            (ConeSpec::Zero { .. }, ConeSide::Dual) => v.iter().all(|&x| x.is_finite()),
            (ConeSpec::NonNeg { .. }, _) => v.iter().all(|&x| x > 0.0),
            (ConeSpec::GenPow { alpha, d1, .. }, ConeSide::Primal) => {
                genpow::is_primal_interior(alpha, *d1, v)
            }
            (ConeSpec::GenPow { alpha, d1, .. }, ConeSide::Dual) => {
                genpow::is_dual_interior(alpha, *d1, v)
            }
            (ConeSpec::PowMean { alpha }, ConeSide::Primal) => powmean::is_primal_interior(alpha, v),
            (ConeSpec::PowMean { alpha }, ConeSide::Dual) => powmean::is_dual_interior(alpha, v),
            (ConeSpec::RelEntropy { d }, ConeSide::Primal) => relentropy::is_primal_interior(*d, v),
            (ConeSpec::RelEntropy { d }, ConeSide::Dual) => relentropy::is_dual_interior(*d, v),
        }
    }

    /// Value and gradient of the dual barrier f* at a dual-interior z.
    pub fn dual_barrier(&self, z: &[f64]) -> Result<BarrierInfo, ConeError> {
        if !self.is_interior(z, ConeSide::Dual) {
            return Err(ConeError::Domain("dual_barrier: z not in dual interior".into()));
        }
        let (value, grad) = match self {
            ConeSpec::Zero { n } => (0.0, vec![0.0; *n]),
            ConeSpec::NonNeg { .. } => {
                let value = -z.iter().map(|x| x.ln()).sum::<f64>();
                (value, z.iter().map(|x| -1.0 / x).collect())
            }
            ConeSpec::GenPow { alpha, d1, .. } => genpow::barrier(alpha, *d1, z),
            ConeSpec::PowMean { alpha } => powmean::barrier(alpha, z),
            ConeSpec::RelEntropy { d } => relentropy::barrier(*d, z),
        };
        Ok(BarrierInfo { value, grad, nu: self.degree() })
    }

    /// Dense dual Hessian ∇²f*(z), row-major. Oracle and forced-dense use;
    /// the solver itself always goes through `augmented_hessian`.
    pub fn dense_dual_hessian(&self, z: &[f64]) -> Result<Vec<f64>, ConeError> {
        if !self.is_interior(z, ConeSide::Dual) {
            return Err(ConeError::Domain("dense_dual_hessian: z not in dual interior".into()));
        }
        let n = self.dim();
        Ok(match self {
            ConeSpec::Zero { .. } => vec![0.0; n * n],
            ConeSpec::NonNeg { .. } => {
                let mut h = vec![0.0; n * n];
                for (i, &zi) in z.iter().enumerate() {
                    h[i * n + i] = 1.0 / (zi * zi);
                }
                h
            }
            ConeSpec::GenPow { alpha, d1, .. } => genpow::dense_hessian(alpha, *d1, z),
            ConeSpec::PowMean { alpha } => powmean::dense_hessian(alpha, z),
            ConeSpec::RelEntropy { d } => relentropy::dense_hessian(*d, z),
        })
    }

    /// Augmented-sparse form of `μ ∇²f*(z)`.
    pub fn augmented_hessian(&self, z: &[f64], mu: f64) -> Result<AugmentedHessian, ConeError> {
        if !(mu > 0.0) {
            return Err(ConeError::Domain(format!("augmented_hessian: μ = {mu} must be positive")));
        }
        if !self.is_interior(z, ConeSide::Dual) {
            return Err(ConeError::Domain("augmented_hessian: z not in dual interior".into()));
        }
        let dim = self.dim();
        let (d_entries, added, subtracted) = match self {
            ConeSpec::Zero { .. } => (Vec::new(), Vec::new(), Vec::new()),
            ConeSpec::NonNeg { .. } => {
                let d = z.iter().enumerate().map(|(i, &zi)| (i, i, 1.0 / (zi * zi))).collect();
                (d, Vec::new(), Vec::new())
            }
            ConeSpec::GenPow { alpha, d1, .. } => genpow::decomposition(alpha, *d1, z),
            ConeSpec::PowMean { alpha } => powmean::decomposition(alpha, z),
            ConeSpec::RelEntropy { d } => relentropy::decomposition(*d, z),
        };
        let aug = AugmentedHessian { dim, mu, d_entries, added, subtracted };
        self.check_schur_positivity(&aug)?;
        Ok(aug)
    }

    /// `D − Σ vvᵀ ⪰ 0` is what makes the expansion quasi-definite. For the
    /// power families D is diagonal on each column's support, so the Schur
    /// scalar `1 − vᵀ D⁻¹ v` per subtracted column decides it. The scalar is
    /// exactly zero in the one-exponent corner (α = [1], where the cone
    /// degenerates to a halfspace slice), so the guard accepts the boundary
    /// within roundoff; static regularization restores the pivot sign there.
    fn check_schur_positivity(&self, aug: &AugmentedHessian) -> Result<(), ConeError> {
        if aug.subtracted.is_empty() {
            return Ok(());
        }
        let mut diag = vec![0.0; aug.dim];
        for &(i, j, v) in &aug.d_entries {
            if i == j {
                diag[i] = v;
            }
        }
        for (k, col) in aug.subtracted.iter().enumerate() {
            let mut schur = 1.0;
            for (&i, &v) in col.idx.iter().zip(&col.val) {
                schur -= v * v / diag[i];
            }
            if !(schur > -1e-12) {
                return Err(ConeError::Decomposition(format!(
                    "subtracted column {k}: 1 − vᵀD⁻¹v = {schur:e} not positive"
                )));
            }
        }
        Ok(())
    }

    /// Initialization pair: z⁰ interior to the dual cone and s⁰ = −∇f*(z⁰),
    /// so that ⟨s⁰, z⁰⟩ = ν and the starting point sits on the central path.
    pub fn unit_init(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConeSpec::Zero { n } => (vec![0.0; *n], vec![0.0; *n]),
            ConeSpec::NonNeg { n } => (vec![1.0; *n], vec![1.0; *n]),
            ConeSpec::GenPow { alpha, d1, d2 } => {
                let mut z = vec![0.0; d1 + d2];
                for i in 0..*d1 {
                    z[i] = (1.0 + alpha[i]).sqrt();
                }
                (z.clone(), z)
            }
            ConeSpec::PowMean { alpha } => {
                let d = alpha.len();
                let mut z = vec![1.0; d + 1];
                z[d] = -0.5;
                let info = self.dual_barrier(&z).expect("unit init point is interior");
                let s = info.grad.iter().map(|g| -g).collect();
                (s, z)
            }
            ConeSpec::RelEntropy { d } => {
                let mut z = vec![1.0; d + 1];
                z.extend(std::iter::repeat(0.0).take(*d));
                let mut s = vec![*d as f64];
                s.extend(std::iter::repeat(2.0).take(*d));
                s.extend(std::iter::repeat(1.0).take(*d));
                (s, z)
            }
        }
    }

    /// Largest admissible step in `{1, 0.9, 0.9², …}` (floor 1e-7) keeping
    /// `v + α dv` strictly interior; `+∞` when the full step is interior.
    /// NonNeg uses the exact ratio test capped at 1; the zero cone never
    /// constrains a step. Returns 0 only if even the floor fails.
    pub fn step_to_boundary(&self, v: &[f64], dv: &[f64], side: ConeSide) -> f64 {
        debug_assert_eq!(v.len(), dv.len());
        match self {
            ConeSpec::Zero { .. } => f64::INFINITY,
            ConeSpec::NonNeg { .. } => {
                let mut alpha = f64::INFINITY;
                for (&vi, &di) in v.iter().zip(dv) {
                    if di < 0.0 {
                        alpha = alpha.min(-vi / di);
                    }
                }
                if alpha.is_finite() {
                    alpha.min(1.0)
                } else {
                    alpha
                }
            }
            _ => {
                let mut trial = vec![0.0; v.len()];
                let mut alpha = 1.0;
                loop {
                    for ((t, &vi), &di) in trial.iter_mut().zip(v).zip(dv) {
                        *t = vi + alpha * di;
                    }
                    if self.is_interior(&trial, side) {
                        return if alpha == 1.0 { f64::INFINITY } else { alpha };
                    }
                    alpha *= 0.9;
                    if alpha < 1e-7 {
                        return 0.0;
                    }
                }
            }
        }
    }
}

/// Total barrier degree of a product cone.
pub fn total_degree(cones: &[ConeSpec]) -> usize {
    cones.iter().map(|c| c.degree()).sum()
}

/// Total dimension of a product cone.
pub fn total_dim(cones: &[ConeSpec]) -> usize {
    cones.iter().map(|c| c.dim()).sum()
}

/// Shared helpers for the crate's test suites (unit and integration); not
/// part of the public API.
#[doc(hidden)]
pub mod test_support {
    use super::*;
    use rand::Rng;

    /// Central-difference Jacobian of the dual barrier gradient (row-major).
    pub fn fd_hessian(cone: &ConeSpec, z: &[f64]) -> Vec<f64> {
        let n = cone.dim();
        let mut h = vec![0.0; n * n];
        for j in 0..n {
            let step = 1e-6 * z[j].abs().max(1.0);
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[j] += step;
            zm[j] -= step;
            let gp = cone.dual_barrier(&zp).unwrap().grad;
            let gm = cone.dual_barrier(&zm).unwrap().grad;
            for i in 0..n {
                h[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        h
    }

    pub fn frob(a: &[f64]) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn random_alpha<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
        let mut a: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = a.iter().sum();
        a.iter_mut().for_each(|x| *x /= s);
        a
    }

    /// Sample a point with a comfortable margin to the boundary.
    pub fn sample_interior<R: Rng>(cone: &ConeSpec, side: ConeSide, rng: &mut R) -> Vec<f64> {
        let v = match (cone, side) {
            (ConeSpec::Zero { n }, ConeSide::Primal) => vec![0.0; *n],
            (ConeSpec::Zero { n }, ConeSide::Dual) => (0..*n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            (ConeSpec::NonNeg { n }, _) => (0..*n).map(|_| rng.gen_range(0.3..2.0)).collect(),
            (ConeSpec::GenPow { alpha, d1, d2 }, _) => {
                let u: Vec<f64> = (0..*d1).map(|_| rng.gen_range(0.3..2.0)).collect();
                let log_prod: f64 = match side {
                    ConeSide::Dual => alpha.iter().zip(&u).map(|(a, ui)| a * (ui / a).ln()).sum(),
                    ConeSide::Primal => alpha.iter().zip(&u).map(|(a, ui)| a * ui.ln()).sum(),
                };
                let mut w: Vec<f64> = (0..*d2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nw = crate::algebra::norm2(&w);
                let target = rng.gen_range(0.0..0.85) * log_prod.exp();
                if nw > 0.0 {
                    w.iter_mut().for_each(|x| *x *= target / nw);
                }
                let mut v = u;
                v.extend(w);
                v
            }
            (ConeSpec::PowMean { alpha }, _) => {
                let d = alpha.len();
                let u: Vec<f64> = (0..d).map(|_| rng.gen_range(0.3..2.0)).collect();
                let log_prod: f64 = match side {
                    ConeSide::Dual => alpha.iter().zip(&u).map(|(a, ui)| a * (ui / a).ln()).sum(),
                    ConeSide::Primal => alpha.iter().zip(&u).map(|(a, ui)| a * ui.ln()).sum(),
                };
                let prod = log_prod.exp();
                let w = match side {
                    // dual side needs w < 0 with Π(u_i/α_i)^{α_i} + w > 0
                    ConeSide::Dual => -rng.gen_range(0.05..0.9) * prod,
                    ConeSide::Primal => prod * rng.gen_range(-1.5..0.85),
                };
                let mut v = u;
                v.push(w);
                v
            }
            (ConeSpec::RelEntropy { d }, ConeSide::Dual) => {
                let u: f64 = rng.gen_range(0.3..2.0);
                let vv: Vec<f64> = (0..*d).map(|_| rng.gen_range(0.3..2.0)).collect();
                let mut out = vec![u];
                let w: Vec<f64> =
                    vv.iter().map(|vi| u * ((u / vi).ln() - 1.0) + rng.gen_range(0.1..2.0)).collect();
                out.extend(vv);
                out.extend(w);
                out
            }
            (ConeSpec::RelEntropy { d }, ConeSide::Primal) => {
                let vv: Vec<f64> = (0..*d).map(|_| rng.gen_range(0.3..2.0)).collect();
                let w: Vec<f64> = (0..*d).map(|_| rng.gen_range(0.3..2.0)).collect();
                let rel: f64 = w.iter().zip(&vv).map(|(wi, vi)| wi * (wi / vi).ln()).sum();
                let mut out = vec![rel + rng.gen_range(0.1..2.0)];
                out.extend(vv);
                out.extend(w);
                out
            }
        };
        assert!(cone.is_interior(&v, side), "sampler produced non-interior point for {cone:?}");
        v
    }
}
