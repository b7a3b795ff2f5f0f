//! Power mean cone `{(u, w) ∈ R_+^d × R : Π u_i^{α_i} ≥ w}`.
//!
//! Dual barrier (dual cone scaled by 1/α, w < 0 there):
//! `f*(u, w) = −ln(φ + w) − Σ (1−α_i) ln(u_i/α_i) − ln(−w)` with
//! `φ = Π (u_i/α_i)^{α_i}`, degree ν = d + 1.

use super::SparseVec;

pub(super) fn is_primal_interior(alpha: &[f64], v: &[f64]) -> bool {
    let d = alpha.len();
    let (u, w) = (&v[..d], v[d]);
    if !u.iter().all(|&x| x > 0.0) || !w.is_finite() {
        return false;
    }
    let log_geo: f64 = alpha.iter().zip(u).map(|(&a, &ui)| a * ui.ln()).sum();
    w < log_geo.exp()
}

pub(super) fn is_dual_interior(alpha: &[f64], v: &[f64]) -> bool {
    let d = alpha.len();
    let (u, w) = (&v[..d], v[d]);
    if !u.iter().all(|&x| x > 0.0) || !(w < 0.0) {
        return false;
    }
    let log_phi: f64 = alpha.iter().zip(u).map(|(&a, &ui)| a * (ui / a).ln()).sum();
    (-w).ln() < log_phi
}

/// φ, ζ = φ + w, τ_i = α_i / (u_i ζ) at a dual-interior point.
fn scalars(alpha: &[f64], u: &[f64], w: f64) -> (f64, f64, Vec<f64>) {
    let phi: f64 = alpha.iter().zip(u).map(|(&a, &ui)| a * (ui / a).ln()).sum::<f64>().exp();
    let zeta = phi + w;
    let tau = alpha.iter().zip(u).map(|(&a, &ui)| a / (ui * zeta)).collect();
    (phi, zeta, tau)
}

pub(super) fn barrier(alpha: &[f64], z: &[f64]) -> (f64, Vec<f64>) {
    let d = alpha.len();
    let (u, w) = (&z[..d], z[d]);
    let (phi, zeta, tau) = scalars(alpha, u, w);
    let value = -zeta.ln()
        - alpha.iter().zip(u).map(|(&a, &ui)| (1.0 - a) * (ui / a).ln()).sum::<f64>()
        - (-w).ln();
    let mut grad = Vec::with_capacity(d + 1);
    for i in 0..d {
        grad.push(-tau[i] * phi - (1.0 - alpha[i]) / u[i]);
    }
    grad.push(-1.0 / zeta - 1.0 / w);
    (value, grad)
}

pub(super) fn dense_hessian(alpha: &[f64], z: &[f64]) -> Vec<f64> {
    let d = alpha.len();
    let n = d + 1;
    let (u, w) = (&z[..d], z[d]);
    let (phi, zeta, tau) = scalars(alpha, u, w);
    let mut h = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            h[i * n + j] = -phi * w * tau[i] * tau[j];
            if i == j {
                h[i * n + j] += tau[i] * phi / u[i] + (1.0 - alpha[i]) / (u[i] * u[i]);
            }
        }
        let v = tau[i] * phi / zeta;
        h[i * n + d] = v;
        h[d * n + i] = v;
    }
    h[d * n + d] = 1.0 / (zeta * zeta) + 1.0 / (w * w);
    h
}

/// `H* = D + ppᵀ − qqᵀ − rrᵀ` with diagonal D; the subtracted w-column is
/// the bare unit vector e_w.
pub(super) fn decomposition(
    alpha: &[f64],
    z: &[f64],
) -> (Vec<(usize, usize, f64)>, Vec<SparseVec>, Vec<SparseVec>) {
    let d = alpha.len();
    let (u, w) = (&z[..d], z[d]);
    let (phi, zeta, tau) = scalars(alpha, u, w);

    let mut d_entries = Vec::with_capacity(d + 1);
    for i in 0..d {
        d_entries.push((i, i, tau[i] * phi / u[i] + (1.0 - alpha[i]) / (u[i] * u[i])));
    }
    d_entries.push((d, d, 1.0 + 1.0 / (w * w)));

    let mut p = SparseVec { idx: (0..d + 1).collect(), val: Vec::with_capacity(d + 1) };
    for i in 0..d {
        p.val.push(phi * tau[i]);
    }
    p.val.push(1.0 / zeta);
    let sq = (zeta * phi).sqrt();
    let q = SparseVec { idx: (0..d).collect(), val: tau.iter().map(|&t| sq * t).collect() };
    let r = SparseVec { idx: vec![d], val: vec![1.0] };
    (d_entries, vec![p], vec![q, r])
}

#[cfg(test)]
mod tests {
    use crate::cones::{ConeSide, ConeSpec};

    #[test]
    fn membership_examples() {
        let c = ConeSpec::PowMean { alpha: vec![0.5, 0.5] };
        // primal: √(1·1) = 1 > 0.5, and w may be negative
        assert!(c.is_interior(&[1.0, 1.0, 0.5], ConeSide::Primal));
        assert!(c.is_interior(&[1.0, 1.0, -3.0], ConeSide::Primal));
        assert!(!c.is_interior(&[1.0, 1.0, 1.5], ConeSide::Primal));
        // dual: Π(u_i/α_i)^{α_i} = 2 > −w, w < 0
        assert!(c.is_interior(&[1.0, 1.0, -0.5], ConeSide::Dual));
        assert!(!c.is_interior(&[1.0, 1.0, -2.5], ConeSide::Dual));
        assert!(!c.is_interior(&[1.0, 1.0, 0.5], ConeSide::Dual));
    }

    #[test]
    fn hessian_and_decomposition_at_frozen_point() {
        // α = [1], z = (2, −1): φ = 2, ζ = 1, τ = 1/2
        let c = ConeSpec::PowMean { alpha: vec![1.0] };
        let z = [2.0, -1.0];
        let h = c.dense_dual_hessian(&z).unwrap();
        let want = [1.0, 1.0, 1.0, 2.0];
        for (a, b) in h.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14, "H = {h:?}");
        }
        let aug = c.augmented_hessian(&z, 1.0).unwrap();
        // D = diag(τφ/u + (1−α)/u², 1 + 1/w²) = diag(1/2, 2)
        assert_eq!(aug.d_entries.len(), 2);
        assert!((aug.d_entries[0].2 - 0.5).abs() < 1e-14);
        assert!((aug.d_entries[1].2 - 2.0).abs() < 1e-14);
        let p = &aug.added[0];
        assert!((p.val[0] - 1.0).abs() < 1e-14 && (p.val[1] - 1.0).abs() < 1e-14);
        let q = &aug.subtracted[0];
        assert_eq!(q.idx, vec![0]);
        assert!((q.val[0] - 2.0f64.sqrt() / 2.0).abs() < 1e-14);
        let r = &aug.subtracted[1];
        assert_eq!(r.idx, vec![1]);
        assert_eq!(r.val, vec![1.0]);
    }

    #[test]
    fn unit_init_point_is_valid_for_any_alpha() {
        for alpha in [vec![1.0], vec![0.9, 0.1], vec![0.2, 0.3, 0.5]] {
            let c = ConeSpec::PowMean { alpha };
            let d = c.dim() - 1;
            let mut z = vec![1.0; d + 1];
            z[d] = -0.5;
            assert!(c.is_interior(&z, ConeSide::Dual));
        }
    }
}
