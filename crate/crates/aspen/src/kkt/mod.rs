//! Assembly and factorization of the reduced KKT system
//!
//! ```text
//!     [ 0    Gᵀ    Aᵀ    0 ]  x      signs  +
//! K = [ G    0     0     0 ]  y             −
//!     [ A    0   −μD     E ]  z             −
//!     [ 0    0     Eᵀ    S ]  ext           S = diag(±1)
//! ```
//!
//! Each cone's dual Hessian enters as its diagonal-plus-low-rank form: the
//! diagonal part lands on the z block, and every rank-one column `v` becomes
//! one extension row with coupling `−√μ·v` and diagonal `+1` (added columns)
//! or `−1` (subtracted columns). Eliminating the extension rows reproduces
//! `−μH` exactly, so right-hand sides are just zero-padded. The pattern is
//! probed once (structural supports never change between iterations), then
//! refreshed in place each iteration.
//!
//! The factorization works on a permuted, statically regularized copy
//! `P(K + δ·diag(signs))Pᵀ`; solves are corrected by iterative refinement
//! against the unregularized K kept alongside.

pub mod ldl;
pub mod ordering;

use crate::algebra::{self, CscMatrix};
use crate::cones::{AugmentedHessian, ConeError, ConeSpec};
use ldl::LdlFactorization;
pub use ordering::FillOrdering;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KktError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Signed pivot counts of the factored (regularized) matrix, with `bumps`
/// recording dynamic pivot replacements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
    pub bumps: usize,
}

impl Inertia {
    pub fn matches(&self, expected: (usize, usize)) -> bool {
        self.pos == expected.0 && self.neg == expected.1 && self.zero == 0
    }
}

/// How cone Hessians enter the z block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianForm {
    /// Diagonal on z plus extension rows per rank-one column.
    Augmented,
    /// Dense `−μH` blocks, no extension rows. Exists to measure what the
    /// augmented form buys; not used by the solver path.
    Dense,
}

pub struct KktSystem {
    n_x: usize,
    n_y: usize,
    n_z: usize,
    n_ext: usize,
    form: HessianForm,
    static_reg: f64,
    /// Upper triangle of the unregularized K, refreshed in place.
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    /// Slots zeroed at the start of every refresh.
    dyn_slots: Vec<usize>,
    /// Per cone: slot of each `d_entries` element.
    dslot_map: Vec<Vec<usize>>,
    /// Per extension variable: its source and the slots of its coupling column.
    ext_src: Vec<(usize, bool, usize)>,
    ext_col_slots: Vec<Vec<usize>>,
    /// Per cone: slots of the dense upper block (Dense form only).
    dense_slots: Vec<Vec<usize>>,
    n_added: usize,
    // permuted + regularized copy that actually gets factored
    perm: Vec<usize>,
    kp_col_ptr: Vec<usize>,
    kp_row_idx: Vec<usize>,
    kp_values: Vec<f64>,
    kval_map: Vec<usize>,
    kp_diag_slot: Vec<usize>,
    signs_p: Vec<f64>,
    ldl: LdlFactorization,
    factored: bool,
}

/// Apply `perm[new] = old` to an upper-triangular pattern, returning the
/// permuted upper pattern (rows sorted within columns) and, per permuted
/// slot, the source slot it reads from.
pub(crate) fn permute_upper(
    n: usize,
    col_ptr: &[usize],
    row_idx: &[usize],
    perm: &[usize],
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut iperm = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        iperm[old] = new;
    }
    let mut trips: Vec<(usize, usize, usize)> = Vec::with_capacity(col_ptr[n]);
    for j in 0..n {
        for p in col_ptr[j]..col_ptr[j + 1] {
            let (pi, pj) = (iperm[row_idx[p]], iperm[j]);
            let (r, c) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            trips.push((c, r, p));
        }
    }
    trips.sort_unstable();
    let mut cp = vec![0usize; n + 1];
    for &(c, _, _) in &trips {
        cp[c + 1] += 1;
    }
    for j in 0..n {
        cp[j + 1] += cp[j];
    }
    let ri = trips.iter().map(|&(_, r, _)| r).collect();
    let map = trips.iter().map(|&(_, _, s)| s).collect();
    (cp, ri, map)
}

impl KktSystem {
    pub fn new(
        g: &CscMatrix,
        a: &CscMatrix,
        cones: &[ConeSpec],
        order: FillOrdering,
        form: HessianForm,
        static_reg: f64,
    ) -> Result<Self, KktError> {
        let n_x = a.ncols;
        let (n_y, n_z) = (g.nrows, a.nrows);
        if g.ncols != n_x {
            return Err(KktError::Dimension(format!(
                "G has {} columns, A has {}",
                g.ncols, n_x
            )));
        }
        if crate::cones::total_dim(cones) != n_z {
            return Err(KktError::Dimension(format!(
                "cones span {} rows, A has {}",
                crate::cones::total_dim(cones),
                n_z
            )));
        }
        // probe structural supports at the reference point; they are
        // invariant across iterates by construction
        let mut probes = Vec::with_capacity(cones.len());
        for cone in cones {
            let (_, z0) = cone.unit_init();
            probes.push(cone.augmented_hessian(&z0, 1.0)?);
        }
        let mut cone_offsets = Vec::with_capacity(cones.len());
        let mut off = 0;
        for cone in cones {
            cone_offsets.push(off);
            off += cone.dim();
        }
        let mut ext_src = Vec::new();
        if form == HessianForm::Augmented {
            for (c, probe) in probes.iter().enumerate() {
                for k in 0..probe.added.len() {
                    ext_src.push((c, true, k));
                }
                for k in 0..probe.subtracted.len() {
                    ext_src.push((c, false, k));
                }
            }
        }
        let n_ext = ext_src.len();
        let n_added = ext_src.iter().filter(|&&(_, added, _)| added).count();
        let n = n_x + n_y + n_z + n_ext;
        let (y_base, z_base, ext_base) = (n_x, n_x + n_y, n_x + n_y + n_z);

        // collect the pattern with static values and dynamic-slot flags
        let mut entries: BTreeMap<(usize, usize), (f64, bool)> = BTreeMap::new();
        let put = |entries: &mut BTreeMap<(usize, usize), (f64, bool)>,
                       r: usize,
                       c: usize,
                       v: f64,
                       dynamic: bool| {
            debug_assert!(r <= c);
            let e = entries.entry((c, r)).or_insert((0.0, false));
            e.0 += v;
            e.1 |= dynamic;
        };
        for i in 0..n {
            put(&mut entries, i, i, 0.0, i >= z_base && i < ext_base);
        }
        for j in 0..n_x {
            for (i, v) in g.col(j) {
                put(&mut entries, j, y_base + i, v, false);
            }
            for (i, v) in a.col(j) {
                put(&mut entries, j, z_base + i, v, false);
            }
        }
        match form {
            HessianForm::Augmented => {
                for (c, probe) in probes.iter().enumerate() {
                    let zo = z_base + cone_offsets[c];
                    for &(i, j, _) in &probe.d_entries {
                        put(&mut entries, zo + i, zo + j, 0.0, true);
                    }
                }
                for (e, &(c, added, k)) in ext_src.iter().enumerate() {
                    let probe = &probes[c];
                    let col = if added { &probe.added[k] } else { &probe.subtracted[k] };
                    let zo = z_base + cone_offsets[c];
                    for &i in &col.idx {
                        put(&mut entries, zo + i, ext_base + e, 0.0, true);
                    }
                    let sign = if added { 1.0 } else { -1.0 };
                    put(&mut entries, ext_base + e, ext_base + e, sign, false);
                }
            }
            HessianForm::Dense => {
                for (c, cone) in cones.iter().enumerate() {
                    let zo = z_base + cone_offsets[c];
                    if matches!(cone, ConeSpec::Zero { .. }) {
                        continue;
                    }
                    for jj in 0..cone.dim() {
                        for ii in 0..=jj {
                            put(&mut entries, zo + ii, zo + jj, 0.0, true);
                        }
                    }
                }
            }
        }

        // freeze slots in (col, row) order — CSC-ready
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut dyn_slots = Vec::new();
        let mut slot_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (t, (&(c, r), &(v, dynamic))) in entries.iter().enumerate() {
            col_ptr[c + 1] += 1;
            row_idx.push(r);
            values.push(v);
            if dynamic {
                debug_assert_eq!(v, 0.0, "dynamic slot ({r}, {c}) has static contribution");
                dyn_slots.push(t);
            }
            slot_of.insert((c, r), t);
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }

        let slot = |r: usize, c: usize| slot_of[&(c, r)];
        let mut dslot_map = vec![Vec::new(); cones.len()];
        let mut dense_slots = vec![Vec::new(); cones.len()];
        match form {
            HessianForm::Augmented => {
                for (c, probe) in probes.iter().enumerate() {
                    let zo = z_base + cone_offsets[c];
                    dslot_map[c] =
                        probe.d_entries.iter().map(|&(i, j, _)| slot(zo + i, zo + j)).collect();
                }
            }
            HessianForm::Dense => {
                for (c, cone) in cones.iter().enumerate() {
                    if matches!(cone, ConeSpec::Zero { .. }) {
                        continue;
                    }
                    let zo = z_base + cone_offsets[c];
                    let mut slots = Vec::with_capacity(cone.dim() * (cone.dim() + 1) / 2);
                    for jj in 0..cone.dim() {
                        for ii in 0..=jj {
                            slots.push(slot(zo + ii, zo + jj));
                        }
                    }
                    dense_slots[c] = slots;
                }
            }
        }
        let mut ext_col_slots = Vec::with_capacity(n_ext);
        for (e, &(c, added, k)) in ext_src.iter().enumerate() {
            let probe = &probes[c];
            let col = if added { &probe.added[k] } else { &probe.subtracted[k] };
            let zo = z_base + cone_offsets[c];
            ext_col_slots.push(col.idx.iter().map(|&i| slot(zo + i, ext_base + e)).collect());
        }

        let mut signs = vec![1.0; n];
        for s in signs[y_base..ext_base].iter_mut() {
            *s = -1.0;
        }
        for (e, &(_, added, _)) in ext_src.iter().enumerate() {
            signs[ext_base + e] = if added { 1.0 } else { -1.0 };
        }

        let perm = ordering::compute(order, n, &col_ptr, &row_idx);
        let (kp_col_ptr, kp_row_idx, kval_map) = permute_upper(n, &col_ptr, &row_idx, &perm);
        let mut kp_diag_slot = vec![usize::MAX; n];
        for j in 0..n {
            for p in kp_col_ptr[j]..kp_col_ptr[j + 1] {
                if kp_row_idx[p] == j {
                    kp_diag_slot[j] = p;
                }
            }
            debug_assert_ne!(kp_diag_slot[j], usize::MAX);
        }
        let signs_p: Vec<f64> = perm.iter().map(|&old| signs[old]).collect();
        let ldl = LdlFactorization::new(n, &kp_col_ptr, &kp_row_idx)?;
        let kp_values = vec![0.0; kval_map.len()];

        Ok(KktSystem {
            n_x,
            n_y,
            n_z,
            n_ext,
            form,
            static_reg,
            col_ptr,
            row_idx,
            values,
            dyn_slots,
            dslot_map,
            ext_src,
            ext_col_slots,
            dense_slots,
            n_added,
            perm,
            kp_col_ptr,
            kp_row_idx,
            kp_values,
            kval_map,
            kp_diag_slot,
            signs_p,
            ldl,
            factored: false,
        })
    }

    /// Full expanded dimension, extension rows included.
    pub fn dim(&self) -> usize {
        self.n_x + self.n_y + self.n_z + self.n_ext
    }

    /// Dimension of the caller-visible (x, y, z) part.
    pub fn dim_xyz(&self) -> usize {
        self.n_x + self.n_y + self.n_z
    }

    /// Inertia a healthy factorization must report: one positive pivot per
    /// x variable and added column, one negative per y row, z row, and
    /// subtracted column.
    pub fn expected_inertia(&self) -> (usize, usize) {
        (self.n_x + self.n_added, self.n_y + self.n_z + (self.n_ext - self.n_added))
    }

    pub fn nnz_l(&self) -> usize {
        self.ldl.nnz_l()
    }

    /// Write this iteration's scaling blocks, then refresh the regularized
    /// permuted copy. `hessians` must align with the cone list.
    pub fn update(&mut self, hessians: &[AugmentedHessian]) {
        assert_eq!(hessians.len(), self.dslot_map.len());
        for &t in &self.dyn_slots {
            self.values[t] = 0.0;
        }
        match self.form {
            HessianForm::Augmented => {
                for (c, aug) in hessians.iter().enumerate() {
                    debug_assert_eq!(aug.d_entries.len(), self.dslot_map[c].len());
                    for (k, &(_, _, v)) in aug.d_entries.iter().enumerate() {
                        self.values[self.dslot_map[c][k]] -= aug.mu * v;
                    }
                }
                for (e, &(c, added, k)) in self.ext_src.iter().enumerate() {
                    let aug = &hessians[c];
                    let col = if added { &aug.added[k] } else { &aug.subtracted[k] };
                    debug_assert_eq!(col.idx.len(), self.ext_col_slots[e].len());
                    let root_mu = aug.mu.sqrt();
                    for (t, &v) in col.val.iter().enumerate() {
                        self.values[self.ext_col_slots[e][t]] -= root_mu * v;
                    }
                }
            }
            HessianForm::Dense => {
                for (c, aug) in hessians.iter().enumerate() {
                    if self.dense_slots[c].is_empty() {
                        continue;
                    }
                    let h = aug.dense_scaled();
                    let dim = aug.dim;
                    let mut t = 0;
                    for jj in 0..dim {
                        for ii in 0..=jj {
                            self.values[self.dense_slots[c][t]] -= h[ii * dim + jj];
                            t += 1;
                        }
                    }
                }
            }
        }
        for (tp, &t) in self.kval_map.iter().enumerate() {
            self.kp_values[tp] = self.values[t];
        }
        for k in 0..self.dim() {
            self.kp_values[self.kp_diag_slot[k]] += self.static_reg * self.signs_p[k];
        }
        self.factored = false;
    }

    pub fn factor(&mut self) -> Result<Inertia, KktError> {
        let inertia =
            self.ldl.factor(&self.kp_col_ptr, &self.kp_row_idx, &self.kp_values, &self.signs_p)?;
        self.factored = true;
        Ok(inertia)
    }

    fn raw_solve(&self, b: &[f64]) -> Result<Vec<f64>, KktError> {
        let n = self.dim();
        let mut w = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            w[new] = b[old];
        }
        self.ldl.solve_in_place(&mut w)?;
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = w[new];
        }
        Ok(x)
    }

    /// y = K x with the unregularized values.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for j in 0..self.dim() {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let (i, v) = (self.row_idx[p], self.values[p]);
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
    }

    /// Solve `K (x, y, z) = rhs` with the extension coordinates eliminated
    /// internally (their right-hand sides are structurally zero). Iterative
    /// refinement runs against the unregularized K until the residual drops
    /// below `1e-10 · max(1, ‖rhs‖∞)` or stops decreasing, and the best
    /// iterate seen is returned. A stalled refinement is not an error — near
    /// a solution or a certificate ray the regularized factor caps the
    /// attainable absolute residual while the direction stays perfectly
    /// usable — so only a solve with no finite iterate at all fails.
    pub fn solve(&mut self, rhs: &[f64]) -> Result<Vec<f64>, KktError> {
        if rhs.len() != self.dim_xyz() {
            return Err(KktError::Dimension(format!(
                "rhs has {} entries, expected {}",
                rhs.len(),
                self.dim_xyz()
            )));
        }
        if !self.factored {
            return Err(KktError::Factorization("solve before factor".into()));
        }
        let n = self.dim();
        let mut b = vec![0.0; n];
        b[..rhs.len()].copy_from_slice(rhs);
        let tol = 1e-10 * algebra::norm_inf(&b).max(1.0);
        let mut x = self.raw_solve(&b)?;
        let mut best = vec![0.0; n];
        let mut best_res = f64::INFINITY;
        let mut kx = vec![0.0; n];
        let mut prev = f64::INFINITY;
        for round in 0..=10 {
            self.apply(&x, &mut kx);
            let mut r = b.clone();
            for i in 0..n {
                r[i] -= kx[i];
            }
            let nr = algebra::norm_inf(&r);
            if nr < best_res {
                best_res = nr;
                best.copy_from_slice(&x);
            }
            if nr <= tol || round == 10 || !(nr < 0.9 * prev) {
                break;
            }
            prev = nr;
            let dx = self.raw_solve(&r)?;
            algebra::axpy(&mut x, 1.0, &dx);
        }
        if best_res.is_finite() {
            Ok(best[..self.dim_xyz()].to_vec())
        } else {
            Err(KktError::Factorization("no finite refinement iterate".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_problem() -> (CscMatrix, CscMatrix, Vec<ConeSpec>) {
        // n_x = 2, one equality row, cones of total dimension 5
        let g = CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]);
        let a = CscMatrix::from_triplets(
            5,
            2,
            &[(0, 0, -1.0), (1, 1, -1.0), (2, 0, 0.5), (3, 0, 1.0), (4, 1, 1.0)],
        );
        let cones = vec![
            ConeSpec::GenPow { alpha: vec![0.3, 0.7], d1: 2, d2: 1 },
            ConeSpec::NonNeg { n: 2 },
        ];
        (g, a, cones)
    }

    fn hessians_at(cones: &[ConeSpec], z: &[&[f64]], mu: f64) -> Vec<AugmentedHessian> {
        cones
            .iter()
            .zip(z)
            .map(|(c, zb)| c.augmented_hessian(zb, mu).unwrap())
            .collect()
    }

    /// Dense unexpanded K with −μH blocks, solved by LU: the oracle for the
    /// expanded sparse path.
    fn dense_oracle(
        g: &CscMatrix,
        a: &CscMatrix,
        cones: &[ConeSpec],
        z: &[&[f64]],
        mu: f64,
        rhs: &[f64],
    ) -> Vec<f64> {
        let (n, p, m) = (a.ncols, g.nrows, a.nrows);
        let dim = n + p + m;
        let mut k = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..n {
            for (i, v) in g.col(j) {
                k[(j, n + i)] = v;
                k[(n + i, j)] = v;
            }
            for (i, v) in a.col(j) {
                k[(j, n + p + i)] = v;
                k[(n + p + i, j)] = v;
            }
        }
        let mut off = 0;
        for (c, zb) in cones.iter().zip(z) {
            let d = c.dim();
            if !matches!(c, ConeSpec::Zero { .. }) {
                let h = c.dense_dual_hessian(zb).unwrap();
                for i in 0..d {
                    for j in 0..d {
                        k[(n + p + off + i, n + p + off + j)] = -mu * h[i * d + j];
                    }
                }
            }
            off += d;
        }
        let sol = k.lu().solve(&DVector::from_column_slice(rhs)).unwrap();
        sol.as_slice().to_vec()
    }

    #[test]
    fn expanded_solve_matches_dense_unexpanded() {
        let (g, a, cones) = small_problem();
        let z_gp = [1.0, 2.0, 0.3];
        let z_nn = [0.5, 1.5];
        let zs: Vec<&[f64]> = vec![&z_gp, &z_nn];
        let mu = 0.37;
        for order in [FillOrdering::Natural, FillOrdering::MinDegree] {
            let mut sys =
                KktSystem::new(&g, &a, &cones, order, HessianForm::Augmented, 1e-7).unwrap();
            assert_eq!(sys.dim(), 2 + 1 + 5 + 3);
            assert_eq!(sys.expected_inertia(), (3, 8));
            sys.update(&hessians_at(&cones, &zs, mu));
            let inertia = sys.factor().unwrap();
            assert!(inertia.matches(sys.expected_inertia()), "inertia {inertia:?}");
            assert_eq!(inertia.bumps, 0);
            let rhs: Vec<f64> = (0..sys.dim_xyz()).map(|i| 0.3 * i as f64 - 1.0).collect();
            let got = sys.solve(&rhs).unwrap();
            let want = dense_oracle(&g, &a, &cones, &zs, mu, &rhs);
            for (gi, wi) in got.iter().zip(&want) {
                assert!((gi - wi).abs() <= 1e-8 * wi.abs().max(1.0), "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn update_refreshes_all_dynamic_values() {
        let (g, a, cones) = small_problem();
        let z_gp = [1.0, 2.0, 0.3];
        let z_nn = [0.5, 1.5];
        let zs: Vec<&[f64]> = vec![&z_gp, &z_nn];
        let mut sys = KktSystem::new(
            &g,
            &a,
            &cones,
            FillOrdering::MinDegree,
            HessianForm::Augmented,
            1e-7,
        )
        .unwrap();
        let rhs: Vec<f64> = (0..sys.dim_xyz()).map(|i| (i as f64).sin()).collect();
        for mu in [0.37, 2.5] {
            sys.update(&hessians_at(&cones, &zs, mu));
            sys.factor().unwrap();
            let got = sys.solve(&rhs).unwrap();
            let want = dense_oracle(&g, &a, &cones, &zs, mu, &rhs);
            for (gi, wi) in got.iter().zip(&want) {
                assert!((gi - wi).abs() <= 1e-8 * wi.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dense_form_matches_expanded_form() {
        let (g, a, cones) = small_problem();
        let z_gp = [1.2, 0.8, -0.4];
        let z_nn = [2.0, 0.7];
        let zs: Vec<&[f64]> = vec![&z_gp, &z_nn];
        let mu = 1.3;
        let rhs: Vec<f64> = (0..8).map(|i| 1.0 - 0.2 * i as f64).collect();
        let mut solutions = Vec::new();
        for form in [HessianForm::Augmented, HessianForm::Dense] {
            let mut sys =
                KktSystem::new(&g, &a, &cones, FillOrdering::MinDegree, form, 1e-7).unwrap();
            sys.update(&hessians_at(&cones, &zs, mu));
            sys.factor().unwrap();
            solutions.push(sys.solve(&rhs).unwrap());
        }
        for (x1, x2) in solutions[0].iter().zip(&solutions[1]) {
            assert!((x1 - x2).abs() <= 1e-8 * x2.abs().max(1.0));
        }
    }

    #[test]
    fn min_degree_keeps_arrowhead_factor_sparse() {
        // arrowhead: dense column 0 over a diagonal; natural order fills
        // completely, minimum degree defers the hub and fills nothing
        let n = 40;
        let mut trips = vec![(0usize, 0usize)];
        for i in 1..n {
            trips.push((i, i));
            trips.push((0, i));
        }
        trips.sort_by_key(|&(i, j)| (j, i));
        let mut cp = vec![0usize; n + 1];
        for &(_, j) in &trips {
            cp[j + 1] += 1;
        }
        for j in 0..n {
            cp[j + 1] += cp[j];
        }
        let ri: Vec<usize> = trips.iter().map(|&(i, _)| i).collect();

        let natural = LdlFactorization::new(n, &cp, &ri).unwrap().nnz_l();
        assert_eq!(natural, n * (n - 1) / 2);

        let perm = ordering::compute(FillOrdering::MinDegree, n, &cp, &ri);
        let (cp2, ri2, _) = permute_upper(n, &cp, &ri, &perm);
        let md = LdlFactorization::new(n, &cp2, &ri2).unwrap().nnz_l();
        assert_eq!(md, n - 1);
    }

    #[test]
    fn factorization_is_exact_on_random_quasidefinite_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let na = rng.gen_range(3..16);
            let nb = rng.gen_range(3..15);
            let n = na + nb;
            let mut k = DMatrix::<f64>::zeros(n, n);
            let r = DMatrix::from_fn(na, na, |_, _| rng.gen_range(-1.0..1.0));
            let s = DMatrix::from_fn(nb, nb, |_, _| rng.gen_range(-1.0..1.0));
            let c = DMatrix::from_fn(na, nb, |_, _| rng.gen_range(-1.0..1.0));
            k.view_mut((0, 0), (na, na)).copy_from(&(&r * r.transpose() + DMatrix::identity(na, na)));
            k.view_mut((na, na), (nb, nb))
                .copy_from(&(-(&s * s.transpose()) - DMatrix::identity(nb, nb)));
            k.view_mut((0, na), (na, nb)).copy_from(&c);
            k.view_mut((na, 0), (nb, na)).copy_from(&c.transpose());

            let mut trips = Vec::new();
            for j in 0..n {
                for i in 0..=j {
                    trips.push((i, j, k[(i, j)]));
                }
            }
            trips.sort_by_key(|&(i, j, _)| (j, i));
            let mut cp = vec![0usize; n + 1];
            for &(_, j, _) in &trips {
                cp[j + 1] += 1;
            }
            for j in 0..n {
                cp[j + 1] += cp[j];
            }
            let ri: Vec<usize> = trips.iter().map(|&(i, _, _)| i).collect();
            let vals: Vec<f64> = trips.iter().map(|&(_, _, v)| v).collect();
            let signs: Vec<f64> =
                (0..n).map(|i| if i < na { 1.0 } else { -1.0 }).collect();

            let mut ldl = LdlFactorization::new(n, &cp, &ri).unwrap();
            let inertia = ldl.factor(&cp, &ri, &vals, &signs).unwrap();
            assert!(inertia.matches((na, nb)));
            assert_eq!(inertia.bumps, 0);

            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
            let mut x = b.clone();
            ldl.solve_in_place(&mut x).unwrap();
            let want = k.lu().solve(&DVector::from_column_slice(&b)).unwrap();
            for (xi, wi) in x.iter().zip(want.iter()) {
                assert!((xi - wi).abs() <= 1e-8 * wi.abs().max(1.0));
            }
        }
    }

    #[test]
    fn refinement_returns_finite_best_effort_on_a_singular_target() {
        let (g, a, cones) = small_problem();
        let z_gp = [1.0, 2.0, 0.3];
        let z_nn = [0.5, 1.5];
        let zs: Vec<&[f64]> = vec![&z_gp, &z_nn];
        let mut sys = KktSystem::new(
            &g,
            &a,
            &cones,
            FillOrdering::Natural,
            HessianForm::Augmented,
            1e-7,
        )
        .unwrap();
        sys.update(&hessians_at(&cones, &zs, 1.0));
        sys.factor().unwrap();
        // sabotage the refinement target: the factored copy stays intact but
        // the residual is now measured against an all-zero K, so refinement
        // can never converge and must hand back its best finite iterate
        sys.values.iter_mut().for_each(|v| *v = 0.0);
        let rhs = vec![1.0; sys.dim_xyz()];
        let x = sys.solve(&rhs).unwrap();
        assert_eq!(x.len(), sys.dim_xyz());
        assert!(x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn rhs_dimension_is_checked() {
        let (g, a, cones) = small_problem();
        let mut sys = KktSystem::new(
            &g,
            &a,
            &cones,
            FillOrdering::Natural,
            HessianForm::Augmented,
            1e-7,
        )
        .unwrap();
        let z_gp = [1.0, 2.0, 0.3];
        let z_nn = [0.5, 1.5];
        sys.update(&hessians_at(&cones, &[&z_gp, &z_nn], 1.0));
        sys.factor().unwrap();
        assert!(matches!(sys.solve(&[1.0, 2.0]), Err(KktError::Dimension(_))));
    }

    #[test]
    fn zero_cone_rows_factor_with_regularization_only() {
        // a zero cone contributes an empty Hessian block; its KKT rows are
        // kept factorizable purely by the signed static shift
        let g = CscMatrix::zeros(0, 2);
        let a = CscMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0)]);
        let cones = vec![ConeSpec::Zero { n: 1 }, ConeSpec::NonNeg { n: 2 }];
        let mut sys = KktSystem::new(
            &g,
            &a,
            &cones,
            FillOrdering::MinDegree,
            HessianForm::Augmented,
            1e-7,
        )
        .unwrap();
        let z_zero = [0.4]; // dual of the zero cone is free
        let z_nn = [1.0, 2.0];
        sys.update(&hessians_at(&cones, &[&z_zero, &z_nn], 0.8));
        let inertia = sys.factor().unwrap();
        assert!(inertia.matches(sys.expected_inertia()));
        let rhs: Vec<f64> = (0..5).map(|i| i as f64 - 2.0).collect();
        let got = sys.solve(&rhs).unwrap();
        let want = dense_oracle(&g, &a, &cones, &[&z_zero, &z_nn], 0.8, &rhs);
        for (gi, wi) in got.iter().zip(&want) {
            assert!((gi - wi).abs() <= 1e-8 * wi.abs().max(1.0));
        }
    }
}
