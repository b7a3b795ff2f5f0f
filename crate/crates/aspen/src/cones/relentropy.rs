//! Relative entropy cone
//! `{(u, v, w) ∈ R × R_+^d × R_+^d : u ≥ Σ w_i ln(w_i / v_i)}`.
//!
//! Dual barrier (dual cone reordered/scaled): with `γ_i = w_i − u ln(u/v_i) + u`,
//! `f*(u, v, w) = −Σ ln(γ_i) − d ln(u) − Σ ln(v_i)`, degree ν = 3d.
//!
//! The Hessian is already sparse — a dense first row/column plus three
//! diagonals (5d+1 upper-triangle entries) — so no rank-one expansion
//! columns are needed.

use super::SparseVec;

pub(super) fn is_primal_interior(d: usize, s: &[f64]) -> bool {
    let (u, rest) = (s[0], &s[1..]);
    let (v, w) = rest.split_at(d);
    if !u.is_finite() || !v.iter().all(|&x| x > 0.0) || !w.iter().all(|&x| x > 0.0) {
        return false;
    }
    let rel: f64 = w.iter().zip(v).map(|(&wi, &vi)| wi * (wi / vi).ln()).sum();
    u > rel
}

pub(super) fn is_dual_interior(d: usize, z: &[f64]) -> bool {
    let (u, rest) = (z[0], &z[1..]);
    let (v, w) = rest.split_at(d);
    if !(u > 0.0) || !v.iter().all(|&x| x > 0.0) || !w.iter().all(|&x| x.is_finite()) {
        return false;
    }
    // γ_i = w_i − u ln(u/v_i) + u > 0
    w.iter().zip(v).all(|(&wi, &vi)| wi - u * (u / vi).ln() + u > 0.0)
}

/// τ_i = ln(u/v_i) and γ_i = w_i − u τ_i + u.
fn scalars(d: usize, z: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let u = z[0];
    let (v, w) = z[1..].split_at(d);
    let tau: Vec<f64> = v.iter().map(|&vi| (u / vi).ln()).collect();
    let gamma: Vec<f64> = w.iter().zip(&tau).map(|(&wi, &ti)| wi - u * ti + u).collect();
    (u, tau, gamma)
}

pub(super) fn barrier(d: usize, z: &[f64]) -> (f64, Vec<f64>) {
    let (u, tau, gamma) = scalars(d, z);
    let v = &z[1..1 + d];
    let value = -gamma.iter().map(|g| g.ln()).sum::<f64>()
        - (d as f64) * u.ln()
        - v.iter().map(|x| x.ln()).sum::<f64>();
    let mut grad = Vec::with_capacity(2 * d + 1);
    grad.push(tau.iter().zip(&gamma).map(|(t, g)| t / g).sum::<f64>() - d as f64 / u);
    for i in 0..d {
        grad.push(-u / (gamma[i] * v[i]) - 1.0 / v[i]);
    }
    for i in 0..d {
        grad.push(-1.0 / gamma[i]);
    }
    (value, grad)
}

/// Upper-triangle entries in column-sorted order; this IS the augmented form
/// (no expansion columns), shared by the dense builder below.
fn upper_entries(d: usize, z: &[f64]) -> Vec<(usize, usize, f64)> {
    let (u, tau, gamma) = scalars(d, z);
    let v = &z[1..1 + d];
    let mut e = Vec::with_capacity(5 * d + 1);
    let huu = (d as f64) / (u * u)
        + gamma.iter().map(|g| 1.0 / (u * g)).sum::<f64>()
        + tau.iter().zip(&gamma).map(|(t, g)| (t / g) * (t / g)).sum::<f64>();
    e.push((0, 0, huu));
    for i in 0..d {
        let col = 1 + i;
        e.push((0, col, -1.0 / (gamma[i] * v[i]) - u * tau[i] / (gamma[i] * gamma[i] * v[i])));
        e.push((col, col, u * (gamma[i] + u) / (gamma[i] * gamma[i] * v[i] * v[i]) + 1.0 / (v[i] * v[i])));
    }
    for i in 0..d {
        let col = 1 + d + i;
        e.push((0, col, -tau[i] / (gamma[i] * gamma[i])));
        e.push((1 + i, col, u / (gamma[i] * gamma[i] * v[i])));
        e.push((col, col, 1.0 / (gamma[i] * gamma[i])));
    }
    e
}

pub(super) fn dense_hessian(d: usize, z: &[f64]) -> Vec<f64> {
    let n = 2 * d + 1;
    let mut h = vec![0.0; n * n];
    for (i, j, val) in upper_entries(d, z) {
        h[i * n + j] = val;
        if i != j {
            h[j * n + i] = val;
        }
    }
    h
}

pub(super) fn decomposition(
    d: usize,
    z: &[f64],
) -> (Vec<(usize, usize, f64)>, Vec<SparseVec>, Vec<SparseVec>) {
    (upper_entries(d, z), Vec::new(), Vec::new())
}
