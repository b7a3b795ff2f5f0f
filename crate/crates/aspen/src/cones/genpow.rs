//! Generalized power cone `{(u, w) : Π u_i^{α_i} ≥ ‖w‖, u ≥ 0}`.
//!
//! Dual barrier (on the dual cone scaled by 1/α):
//! `f*(u, w) = −ln(φ − ‖w‖²) − Σ (1−α_i) ln(u_i/α_i)` with
//! `φ = Π (u_i/α_i)^{2α_i}`, degree ν = d1 + 1.

use super::SparseVec;

/// log Π (u_i/α_i)^{w_i α_i}; products are always evaluated through logs so
/// large d stays in range.
fn log_prod(alpha: &[f64], u: &[f64], weight: f64) -> f64 {
    alpha.iter().zip(u).map(|(&a, &ui)| weight * a * (ui / a).ln()).sum()
}

pub(super) fn is_primal_interior(alpha: &[f64], d1: usize, v: &[f64]) -> bool {
    let (u, w) = v.split_at(d1);
    if !u.iter().all(|&x| x > 0.0) || !w.iter().all(|&x| x.is_finite()) {
        return false;
    }
    let log_geo: f64 = alpha.iter().zip(u).map(|(&a, &ui)| a * ui.ln()).sum();
    let nw = crate::algebra::norm2(w);
    nw.ln() < log_geo
}

pub(super) fn is_dual_interior(alpha: &[f64], d1: usize, v: &[f64]) -> bool {
    let (u, w) = v.split_at(d1);
    if !u.iter().all(|&x| x > 0.0) || !w.iter().all(|&x| x.is_finite()) {
        return false;
    }
    let nw = crate::algebra::norm2(w);
    nw.ln() < log_prod(alpha, u, 1.0)
}

/// φ, ζ = φ − ‖w‖², and τ_i = 2α_i/u_i at a dual-interior point.
fn scalars(alpha: &[f64], u: &[f64], w: &[f64]) -> (f64, f64, Vec<f64>) {
    let phi = log_prod(alpha, u, 2.0).exp();
    let ww = crate::algebra::dot(w, w);
    let zeta = phi - ww;
    let tau = alpha.iter().zip(u).map(|(&a, &ui)| 2.0 * a / ui).collect();
    (phi, zeta, tau)
}

pub(super) fn barrier(alpha: &[f64], d1: usize, z: &[f64]) -> (f64, Vec<f64>) {
    let (u, w) = z.split_at(d1);
    let (phi, zeta, tau) = scalars(alpha, u, w);
    let value = -zeta.ln() - alpha.iter().zip(u).map(|(&a, &ui)| (1.0 - a) * (ui / a).ln()).sum::<f64>();
    let mut grad = Vec::with_capacity(z.len());
    for i in 0..d1 {
        grad.push(-tau[i] * phi / zeta - (1.0 - alpha[i]) / u[i]);
    }
    for &wj in w {
        grad.push(2.0 * wj / zeta);
    }
    (value, grad)
}

pub(super) fn dense_hessian(alpha: &[f64], d1: usize, z: &[f64]) -> Vec<f64> {
    let (u, w) = z.split_at(d1);
    let n = z.len();
    let (phi, zeta, tau) = scalars(alpha, u, w);
    let mut h = vec![0.0; n * n];
    for i in 0..d1 {
        for j in 0..d1 {
            h[i * n + j] = tau[i] * tau[j] * phi / zeta * (phi / zeta - 1.0);
            if i == j {
                h[i * n + j] += tau[i] * phi / (zeta * u[i]) + (1.0 - alpha[i]) / (u[i] * u[i]);
            }
        }
        for (j, &wj) in w.iter().enumerate() {
            let v = -2.0 * tau[i] * phi * wj / (zeta * zeta);
            h[i * n + d1 + j] = v;
            h[(d1 + j) * n + i] = v;
        }
    }
    for (i, &wi) in w.iter().enumerate() {
        for (j, &wj) in w.iter().enumerate() {
            h[(d1 + i) * n + (d1 + j)] = 4.0 * wi * wj / (zeta * zeta);
            if i == j {
                h[(d1 + i) * n + (d1 + j)] += 2.0 / zeta;
            }
        }
    }
    h
}

/// `H* = D + ppᵀ − qqᵀ − rrᵀ`: diagonal D, one added column with full
/// support, one subtracted column on the u side, one on the w side.
pub(super) fn decomposition(
    alpha: &[f64],
    d1: usize,
    z: &[f64],
) -> (Vec<(usize, usize, f64)>, Vec<SparseVec>, Vec<SparseVec>) {
    let (u, w) = z.split_at(d1);
    let d2 = w.len();
    let (phi, zeta, tau) = scalars(alpha, u, w);
    let ww = crate::algebra::dot(w, w);

    let mut d_entries = Vec::with_capacity(d1 + d2);
    for i in 0..d1 {
        d_entries.push((i, i, tau[i] * phi / (zeta * u[i]) + (1.0 - alpha[i]) / (u[i] * u[i])));
    }
    for j in 0..d2 {
        d_entries.push((d1 + j, d1 + j, 2.0 / zeta));
    }

    let p0 = (phi * (phi + ww) / 2.0).sqrt();
    let p1 = -2.0 * (2.0 * phi / (phi + ww)).sqrt();
    let q0 = (zeta * phi / 2.0).sqrt();
    let r1 = 2.0 * (zeta / (phi + ww)).sqrt();

    let mut p = SparseVec { idx: (0..d1 + d2).collect(), val: Vec::with_capacity(d1 + d2) };
    for i in 0..d1 {
        p.val.push(p0 * tau[i] / zeta);
    }
    for &wj in w {
        p.val.push(p1 * wj / zeta);
    }
    let q = SparseVec { idx: (0..d1).collect(), val: tau.iter().map(|&t| q0 * t / zeta).collect() };
    let r = SparseVec {
        idx: (d1..d1 + d2).collect(),
        val: w.iter().map(|&wj| r1 * wj / zeta).collect(),
    };
    (d_entries, vec![p], vec![q, r])
}
