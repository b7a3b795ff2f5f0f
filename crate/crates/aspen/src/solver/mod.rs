//! Predictor–corrector interior-point method on the homogeneous self-dual
//! embedding. All scaling information comes from the dual barrier (`μ·H*(z)`
//! per cone); centrality of candidate steps is gated by the conjugacy-based
//! proximity Φ, so no primal barrier evaluations are needed beyond one scalar
//! Newton solve per cone and step.

use crate::algebra;
use crate::cones::{ConeSide, ConeSpec};
use crate::conjugacy;
use crate::kkt::{FillOrdering, HessianForm, KktError, KktSystem};
use crate::problem::ProblemData;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct Settings {
    pub max_iter: usize,
    /// Full termination tolerance.
    pub eps: f64,
    /// Relaxed tolerance applied once on exhaustion or a numerical bail-out.
    pub eps_reduced: f64,
    /// Signed static shift δ applied to the factored KKT copy.
    pub static_reg: f64,
    /// Size of the functional-proximity neighborhood per unit of barrier
    /// degree: steps must keep Φ ≤ max(1, neighborhood · (ν + 1)).
    pub neighborhood: f64,
    pub ordering: FillOrdering,
    pub verbose: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_iter: 200,
            eps: 1e-8,
            eps_reduced: 1e-5,
            static_reg: 1e-7,
            neighborhood: 0.1,
            ordering: FillOrdering::MinDegree,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    AlmostSolved,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    NumericalError,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Status::Solved => "solved",
            Status::AlmostSolved => "almost_solved",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::MaxIterations => "max_iterations",
            Status::NumericalError => "numerical_error",
        };
        f.write_str(name)
    }
}

impl Status {
    /// Statuses that settle the problem: an optimum or a certificate.
    pub fn is_definitive(&self) -> bool {
        matches!(self, Status::Solved | Status::PrimalInfeasible | Status::DualInfeasible)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub mu: f64,
    pub alpha_affine: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub phi: f64,
    pub res_primal: f64,
    pub res_dual: f64,
    pub inertia_ok: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    /// Solution scaled by 1/τ when solved; the certificate ray when
    /// infeasible (normalized so hᵀy + bᵀz = −1, resp. cᵀx = −1).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub s: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
    pub obj_primal: f64,
    pub obj_dual: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid problem: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Kkt(#[from] KktError),
}

pub(crate) struct Iterate {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub s: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
}

pub(crate) struct Residuals {
    pub r_x: Vec<f64>,
    pub r_y: Vec<f64>,
    pub r_z: Vec<f64>,
    pub r_tau: f64,
    pub mu: f64,
}

pub(crate) struct Direction {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub s: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
}

pub(crate) struct DirRhs {
    pub d_x: Vec<f64>,
    pub d_y: Vec<f64>,
    pub d_z: Vec<f64>,
    pub d_s: Vec<f64>,
    pub d_tau: f64,
    pub d_kappa: f64,
}

pub(crate) fn initial_iterate(prob: &ProblemData) -> Iterate {
    let mut s = Vec::with_capacity(prob.m());
    let mut z = Vec::with_capacity(prob.m());
    for cone in &prob.cones {
        let (s0, z0) = cone.unit_init();
        s.extend(s0);
        z.extend(z0);
    }
    Iterate { x: vec![0.0; prob.n()], y: vec![0.0; prob.p()], z, s, tau: 1.0, kappa: 1.0 }
}

pub(crate) fn residuals(prob: &ProblemData, it: &Iterate) -> Residuals {
    let nu_bar = (crate::cones::total_degree(&prob.cones) + 1) as f64;
    // r_x = −Gᵀy − Aᵀz − cτ
    let mut r_x: Vec<f64> = prob.c.iter().map(|ci| -ci * it.tau).collect();
    let mut gt_y = vec![0.0; prob.n()];
    prob.g_mat.gemv_t(&mut gt_y, &it.y);
    let mut at_z = vec![0.0; prob.n()];
    prob.a_mat.gemv_t(&mut at_z, &it.z);
    for i in 0..prob.n() {
        r_x[i] -= gt_y[i] + at_z[i];
    }
    // r_y = Gx − hτ
    let mut r_y: Vec<f64> = prob.h.iter().map(|hi| -hi * it.tau).collect();
    prob.g_mat.gemv(&mut r_y, &it.x);
    // r_z = s + Ax − bτ
    let mut r_z: Vec<f64> = it.s.iter().zip(&prob.b).map(|(si, bi)| si - bi * it.tau).collect();
    prob.a_mat.gemv(&mut r_z, &it.x);
    let r_tau = it.kappa
        + algebra::dot(&prob.c, &it.x)
        + algebra::dot(&prob.h, &it.y)
        + algebra::dot(&prob.b, &it.z);
    let gap = algebra::dot(&it.s, &it.z) + it.tau * it.kappa;
    Residuals { r_x, r_y, r_z, r_tau, mu: gap / nu_bar }
}

/// Scale-invariant convergence measures (all homogeneous of degree zero in
/// the embedding variables).
pub(crate) struct Metrics {
    pub res_primal: f64,
    pub res_dual: f64,
    pub gap_violation: f64,
    pub obj_primal: f64,
    pub obj_dual: f64,
    /// `‖Gᵀy + Aᵀz‖∞ / −(hᵀy + bᵀz)` when the denominator is positive.
    pub pinf: Option<f64>,
    /// `max(‖G x̂‖∞, ‖A x̂ + ŝ‖∞)` for the ray x̂ = x/(−cᵀx) when cᵀx < 0.
    pub dinf: Option<f64>,
}

pub(crate) fn metrics(prob: &ProblemData, it: &Iterate) -> Metrics {
    let res = residuals(prob, it);
    let obj_primal = algebra::dot(&prob.c, &it.x) / it.tau;
    let obj_dual = -(algebra::dot(&prob.h, &it.y) + algebra::dot(&prob.b, &it.z)) / it.tau;
    let res_primal =
        algebra::norm_inf(&res.r_y).max(algebra::norm_inf(&res.r_z)) / it.tau;
    let res_dual = algebra::norm_inf(&res.r_x) / it.tau;
    let gap_violation = (obj_primal - obj_dual).abs() / (1.0 + obj_primal.abs());

    let hy_bz = algebra::dot(&prob.h, &it.y) + algebra::dot(&prob.b, &it.z);
    let pinf = if hy_bz < 0.0 {
        let mut dres = vec![0.0; prob.n()];
        prob.g_mat.gemv_t(&mut dres, &it.y);
        prob.a_mat.gemv_t(&mut dres, &it.z);
        Some(algebra::norm_inf(&dres) / -hy_bz)
    } else {
        None
    };
    let cx = algebra::dot(&prob.c, &it.x);
    let dinf = if cx < 0.0 {
        let xhat: Vec<f64> = it.x.iter().map(|v| v / -cx).collect();
        let shat: Vec<f64> = it.s.iter().map(|v| v / -cx).collect();
        let mut gx = vec![0.0; prob.p()];
        prob.g_mat.gemv(&mut gx, &xhat);
        let mut axs = shat;
        prob.a_mat.gemv(&mut axs, &xhat);
        Some(algebra::norm_inf(&gx).max(algebra::norm_inf(&axs)))
    } else {
        None
    };
    Metrics { res_primal, res_dual, gap_violation, obj_primal, obj_dual, pinf, dinf }
}

pub(crate) fn decide(m: &Metrics, scale: f64, eps: f64) -> Option<Status> {
    if m.res_primal <= eps * scale && m.res_dual <= eps * scale && m.gap_violation <= eps {
        return Some(Status::Solved);
    }
    if let Some(p) = m.pinf {
        if p <= eps * scale {
            return Some(Status::PrimalInfeasible);
        }
    }
    if let Some(d) = m.dinf {
        if d <= eps * scale {
            return Some(Status::DualInfeasible);
        }
    }
    None
}

/// One Newton direction through the reduced KKT solve: the extension-free
/// unknowns (Δx, Δy, Δz) come from two solves against K (one with the
/// right-hand side, one reused constant solve against (−c, h, b)), after
/// which Δτ, Δs, Δκ are recovered by elimination. Δs comes from the conic
/// primal row — not from the scaled complementarity row, whose μH*(z)
/// factor would amplify solve error without bound as the iterates approach
/// the boundary.
pub(crate) fn newton_direction(
    kkt: &mut KktSystem,
    prob: &ProblemData,
    it: &Iterate,
    rhs: &DirRhs,
    sol2: &[f64],
) -> Result<Direction, KktError> {
    let (n, p, m) = (prob.n(), prob.p(), prob.m());
    let mut r1 = Vec::with_capacity(n + p + m);
    r1.extend_from_slice(&rhs.d_x);
    r1.extend(rhs.d_y.iter().map(|v| -v));
    r1.extend(rhs.d_s.iter().zip(&rhs.d_z).map(|(ds, dz)| ds - dz));
    let sol1 = kkt.solve(&r1)?;

    let (x1, rest1) = sol1.split_at(n);
    let (y1, z1) = rest1.split_at(p);
    let (x2, rest2) = sol2.split_at(n);
    let (y2, z2) = rest2.split_at(p);

    let num = rhs.d_tau - rhs.d_kappa / it.tau
        + algebra::dot(&prob.c, x1)
        + algebra::dot(&prob.h, y1)
        + algebra::dot(&prob.b, z1);
    let den = it.kappa / it.tau
        - algebra::dot(&prob.c, x2)
        - algebra::dot(&prob.h, y2)
        - algebra::dot(&prob.b, z2);
    let dtau = num / den;
    if !dtau.is_finite() {
        return Err(KktError::Factorization(format!("tau recovery: {num} / {den}")));
    }

    let dx: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + dtau * b).collect();
    let dy: Vec<f64> = y1.iter().zip(y2).map(|(a, b)| a + dtau * b).collect();
    let dz: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| a + dtau * b).collect();

    // Δs = −d_z − AΔx + bΔτ
    let mut ds = vec![0.0; m];
    prob.a_mat.gemv(&mut ds, &dx);
    for i in 0..m {
        ds[i] = -rhs.d_z[i] - ds[i] + prob.b[i] * dtau;
    }
    let dkappa = -(rhs.d_kappa + it.kappa * dtau) / it.tau;
    Ok(Direction { x: dx, y: dy, z: dz, s: ds, tau: dtau, kappa: dkappa })
}

/// Largest step in `[0, 1]` keeping every block inside its cone and τ, κ
/// positive.
pub(crate) fn max_step(cones: &[ConeSpec], it: &Iterate, dir: &Direction) -> f64 {
    let mut alpha = 1.0f64;
    let mut off = 0;
    for cone in cones {
        let dim = cone.dim();
        alpha = alpha
            .min(cone.step_to_boundary(&it.s[off..off + dim], &dir.s[off..off + dim], ConeSide::Primal))
            .min(cone.step_to_boundary(&it.z[off..off + dim], &dir.z[off..off + dim], ConeSide::Dual));
        off += dim;
    }
    if dir.tau < 0.0 {
        alpha = alpha.min(-it.tau / dir.tau);
    }
    if dir.kappa < 0.0 {
        alpha = alpha.min(-it.kappa / dir.kappa);
    }
    alpha.min(1.0)
}

/// Backtrack from `0.99 · α_max` until the trial point is strictly interior
/// on both sides and its proximity satisfies Φ ≤ gate.
fn line_search(
    prob: &ProblemData,
    it: &Iterate,
    dir: &Direction,
    alpha_max: f64,
    gate: f64,
) -> Option<(f64, f64)> {
    let m = prob.m();
    let mut s_trial = vec![0.0; m];
    let mut z_trial = vec![0.0; m];
    let mut alpha = 0.99 * alpha_max;
    while alpha >= 1e-6 {
        let tau = it.tau + alpha * dir.tau;
        let kappa = it.kappa + alpha * dir.kappa;
        if tau > 0.0 && kappa > 0.0 {
            for i in 0..m {
                s_trial[i] = it.s[i] + alpha * dir.s[i];
                z_trial[i] = it.z[i] + alpha * dir.z[i];
            }
            let mut interior = true;
            let mut off = 0;
            for cone in &prob.cones {
                let dim = cone.dim();
                if !cone.is_interior(&s_trial[off..off + dim], ConeSide::Primal)
                    || !cone.is_interior(&z_trial[off..off + dim], ConeSide::Dual)
                {
                    interior = false;
                    break;
                }
                off += dim;
            }
            if interior {
                if let Ok(phi) = conjugacy::proximity(&prob.cones, &s_trial, &z_trial, tau, kappa)
                {
                    if phi <= gate {
                        return Some((alpha, phi));
                    }
                }
            }
        }
        alpha *= 0.9;
    }
    None
}

fn centering(alpha_affine: f64) -> f64 {
    (1.0 - alpha_affine).clamp(0.0, 1.0).powi(3)
}

pub fn solve(prob: &ProblemData, settings: &Settings) -> Result<SolveResult, SolveError> {
    prob.validate().map_err(SolveError::Invalid)?;
    let (n, p, m) = (prob.n(), prob.p(), prob.m());
    let scale = algebra::norm_inf(&prob.c)
        .max(algebra::norm_inf(&prob.h))
        .max(algebra::norm_inf(&prob.b))
        .max(1.0);
    let mut kkt = KktSystem::new(
        &prob.g_mat,
        &prob.a_mat,
        &prob.cones,
        settings.ordering,
        HessianForm::Augmented,
        settings.static_reg,
    )?;
    let expected_inertia = kkt.expected_inertia();
    // the functional proximity is extensive in the barrier degree; keep the
    // acceptance neighborhood proportional so step lengths do not shrink
    // with problem size
    let nu_bar = (crate::cones::total_degree(&prob.cones) + 1) as f64;
    let gate = (settings.neighborhood * nu_bar).max(1.0);
    let mut rhs2 = Vec::with_capacity(n + p + m);
    rhs2.extend(prob.c.iter().map(|v| -v));
    rhs2.extend_from_slice(&prob.h);
    rhs2.extend_from_slice(&prob.b);

    let mut it = initial_iterate(prob);
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut status = Status::MaxIterations;
    if settings.verbose {
        println!("iter          mu       res_p       res_d   alpha   sigma      phi");
    }

    for _iter in 0..settings.max_iter {
        let res = residuals(prob, &it);
        let met = metrics(prob, &it);
        if let Some(st) = decide(&met, scale, settings.eps) {
            status = st;
            break;
        }

        // dual-scaling Hessians at the current z
        let mut hessians = Vec::with_capacity(prob.cones.len());
        let mut grads = Vec::with_capacity(prob.cones.len());
        let mut off = 0;
        let mut cone_ok = true;
        for cone in &prob.cones {
            let dim = cone.dim();
            let zb = &it.z[off..off + dim];
            match (cone.augmented_hessian(zb, res.mu), cone.dual_barrier(zb)) {
                (Ok(aug), Ok(info)) => {
                    hessians.push(aug);
                    grads.push(info.grad);
                }
                _ => {
                    cone_ok = false;
                    break;
                }
            }
            off += dim;
        }
        if !cone_ok {
            status = Status::NumericalError;
            break;
        }

        kkt.update(&hessians);
        let inertia = match kkt.factor() {
            Ok(i) => i,
            Err(_) => {
                status = Status::NumericalError;
                break;
            }
        };
        let inertia_ok = inertia.matches(expected_inertia);
        let sol2 = match kkt.solve(&rhs2) {
            Ok(s) => s,
            Err(_) => {
                status = Status::NumericalError;
                break;
            }
        };

        // predictor: aim at the full residuals with μ → 0
        let rhs_affine = DirRhs {
            d_x: res.r_x.clone(),
            d_y: res.r_y.clone(),
            d_z: res.r_z.clone(),
            d_s: it.s.clone(),
            d_tau: res.r_tau,
            d_kappa: it.tau * it.kappa,
        };
        let affine = match newton_direction(&mut kkt, prob, &it, &rhs_affine, &sol2) {
            Ok(d) => d,
            Err(_) => {
                status = Status::NumericalError;
                break;
            }
        };
        // measure the usable predictor length inside the Φ ≤ 1 neighborhood
        // (interiority alone would badly overestimate it for nonsymmetric
        // blocks and starve the corrector of centering weight)
        let alpha_affine = match line_search(prob, &it, &affine, max_step(&prob.cones, &it, &affine), gate)
        {
            Some((a, _)) => a,
            None => 0.0,
        };
        let sigma = centering(alpha_affine);

        // corrector: recenter toward σμ with a second-order term on the
        // symmetric blocks
        let one_minus = 1.0 - sigma;
        let mut d_s = vec![0.0; m];
        let mut off = 0;
        for (k, cone) in prob.cones.iter().enumerate() {
            let dim = cone.dim();
            for i in 0..dim {
                d_s[off + i] = it.s[off + i] + sigma * res.mu * grads[k][i];
            }
            if matches!(cone, ConeSpec::NonNeg { .. }) {
                for i in 0..dim {
                    d_s[off + i] += affine.s[off + i] * affine.z[off + i] / it.z[off + i];
                }
            }
            off += dim;
        }
        let rhs_combined = DirRhs {
            d_x: res.r_x.iter().map(|v| one_minus * v).collect(),
            d_y: res.r_y.iter().map(|v| one_minus * v).collect(),
            d_z: res.r_z.iter().map(|v| one_minus * v).collect(),
            d_s,
            d_tau: one_minus * res.r_tau,
            d_kappa: it.tau * it.kappa - sigma * res.mu + affine.tau * affine.kappa,
        };
        let combined =
            match newton_direction(&mut kkt, prob, &it, &rhs_combined, &sol2) {
                Ok(d) => d,
                Err(_) => {
                    status = Status::NumericalError;
                    break;
                }
            };

        let alpha_max = max_step(&prob.cones, &it, &combined);
        // a collapsed step means the neighborhood Φ ≤ 1 leaves no room in
        // this direction; fall back to a pure recentering step at the
        // current μ (zero residual targets, σ = 1), which reopens it
        let attempt = match line_search(prob, &it, &combined, alpha_max, gate) {
            Some((a, phi)) if a >= 1e-4 => Some((combined, a, phi, sigma)),
            _ => None,
        };
        let (dir, alpha, phi, sigma) = match attempt {
            Some(t) => t,
            None => {
                let mut d_s = vec![0.0; m];
                let mut off = 0;
                for (k, cone) in prob.cones.iter().enumerate() {
                    for i in 0..cone.dim() {
                        d_s[off + i] = it.s[off + i] + res.mu * grads[k][i];
                    }
                    off += cone.dim();
                }
                let rhs_center = DirRhs {
                    d_x: vec![0.0; n],
                    d_y: vec![0.0; p],
                    d_z: vec![0.0; m],
                    d_s,
                    d_tau: 0.0,
                    d_kappa: it.tau * it.kappa - res.mu,
                };
                let center = match newton_direction(&mut kkt, prob, &it, &rhs_center, &sol2) {
                    Ok(d) => d,
                    Err(_) => {
                        status = Status::NumericalError;
                        break;
                    }
                };
                let am = max_step(&prob.cones, &it, &center);
                match line_search(prob, &it, &center, am, gate) {
                    Some((a, phi)) => (center, a, phi, 1.0),
                    None => {
                        status = Status::NumericalError;
                        break;
                    }
                }
            }
        };

        algebra::axpy(&mut it.x, alpha, &dir.x);
        algebra::axpy(&mut it.y, alpha, &dir.y);
        algebra::axpy(&mut it.z, alpha, &dir.z);
        algebra::axpy(&mut it.s, alpha, &dir.s);
        it.tau += alpha * dir.tau;
        it.kappa += alpha * dir.kappa;

        trace.push(IterationRecord {
            mu: res.mu,
            alpha_affine,
            alpha,
            sigma,
            phi,
            res_primal: met.res_primal,
            res_dual: met.res_dual,
            inertia_ok,
        });
        if settings.verbose {
            println!(
                "{:4}  {:10.3e}  {:10.3e}  {:10.3e}  {:6.4}  {:6.4}  {:7.4}",
                trace.len(),
                res.mu,
                met.res_primal,
                met.res_dual,
                alpha,
                sigma,
                phi
            );
        }
    }

    // relaxed re-check when the loop ended without a verdict
    let met = metrics(prob, &it);
    if matches!(status, Status::MaxIterations | Status::NumericalError) {
        if let Some(Status::Solved) = decide(&met, scale, settings.eps_reduced) {
            status = Status::AlmostSolved;
        }
    }

    let mut result = SolveResult {
        status,
        x: it.x,
        y: it.y,
        z: it.z,
        s: it.s,
        tau: it.tau,
        kappa: it.kappa,
        obj_primal: met.obj_primal,
        obj_dual: met.obj_dual,
        iterations: trace.len(),
        trace,
    };
    match status {
        Status::PrimalInfeasible => {
            let hy_bz =
                algebra::dot(&prob.h, &result.y) + algebra::dot(&prob.b, &result.z);
            let f = -1.0 / hy_bz;
            algebra::scale(&mut result.y, f);
            algebra::scale(&mut result.z, f);
            result.obj_primal = f64::NAN;
            result.obj_dual = f64::NAN;
        }
        Status::DualInfeasible => {
            let cx = algebra::dot(&prob.c, &result.x);
            let f = -1.0 / cx;
            algebra::scale(&mut result.x, f);
            algebra::scale(&mut result.s, f);
            result.obj_primal = f64::NAN;
            result.obj_dual = f64::NAN;
        }
        _ => {
            if result.tau > f64::MIN_POSITIVE {
                let f = 1.0 / result.tau;
                algebra::scale(&mut result.x, f);
                algebra::scale(&mut result.y, f);
                algebra::scale(&mut result.z, f);
                algebra::scale(&mut result.s, f);
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CscMatrix;

    /// min −t over Σxᵢ = 1, (x, t) ∈ GenPow(α): optimum t* = Πᵢ αᵢ^αᵢ.
    fn max_likelihood(alpha: Vec<f64>) -> ProblemData {
        let n = alpha.len();
        let g = CscMatrix::from_triplets(1, n + 1, &(0..n).map(|j| (0, j, 1.0)).collect::<Vec<_>>());
        let a = CscMatrix::from_triplets(
            n + 1,
            n + 1,
            &(0..n + 1).map(|i| (i, i, -1.0)).collect::<Vec<_>>(),
        );
        let mut c = vec![0.0; n + 1];
        c[n] = -1.0;
        ProblemData {
            c,
            g_mat: g,
            h: vec![1.0],
            a_mat: a,
            b: vec![0.0; n + 1],
            cones: vec![ConeSpec::GenPow { alpha, d1: n, d2: 1 }],
        }
    }

    fn tiny_lp() -> ProblemData {
        // min −x₁ s.t. x₁ + x₂ = 1, x ≥ 0: optimum (1, 0), objective −1
        ProblemData {
            c: vec![-1.0, 0.0],
            g_mat: CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]),
            h: vec![1.0],
            a_mat: CscMatrix::from_triplets(2, 2, &[(0, 0, -1.0), (1, 1, -1.0)]),
            b: vec![0.0, 0.0],
            cones: vec![ConeSpec::NonNeg { n: 2 }],
        }
    }

    #[test]
    fn residuals_at_the_unit_initialization() {
        let prob = max_likelihood(vec![0.3, 0.7]);
        let it = initial_iterate(&prob);
        let res = residuals(&prob, &it);
        // x = 0, y = 0, τ = 1: r_x = −Aᵀz⁰ − c, r_y = −h, r_z = s⁰ − b,
        // r_τ = 1 + bᵀz⁰
        let mut want_rx: Vec<f64> = prob.c.iter().map(|v| -v).collect();
        let mut atz = vec![0.0; prob.n()];
        prob.a_mat.gemv_t(&mut atz, &it.z);
        for i in 0..prob.n() {
            want_rx[i] -= atz[i];
        }
        assert_eq!(res.r_x, want_rx);
        assert_eq!(res.r_y, vec![-1.0]);
        assert_eq!(res.r_z, it.s);
        assert_eq!(res.r_tau, 1.0);
        // the unit initialization sits on the central path at μ = 1
        assert!((res.mu - 1.0).abs() < 1e-14);
        let phi = conjugacy::proximity(&prob.cones, &it.s, &it.z, it.tau, it.kappa).unwrap();
        assert!(phi.abs() < 1e-10, "initial proximity {phi}");
    }

    #[test]
    fn affine_direction_satisfies_the_newton_equations() {
        let prob = max_likelihood(vec![0.3, 0.7]);
        let it = initial_iterate(&prob);
        let res = residuals(&prob, &it);
        let mut kkt = KktSystem::new(
            &prob.g_mat,
            &prob.a_mat,
            &prob.cones,
            FillOrdering::MinDegree,
            HessianForm::Augmented,
            1e-7,
        )
        .unwrap();
        let hessians: Vec<_> = prob
            .cones
            .iter()
            .map(|c| c.augmented_hessian(&it.z, res.mu).unwrap())
            .collect();
        kkt.update(&hessians);
        kkt.factor().unwrap();
        let mut rhs2 = Vec::new();
        rhs2.extend(prob.c.iter().map(|v| -v));
        rhs2.extend_from_slice(&prob.h);
        rhs2.extend_from_slice(&prob.b);
        let sol2 = kkt.solve(&rhs2).unwrap();
        let rhs = DirRhs {
            d_x: res.r_x.clone(),
            d_y: res.r_y.clone(),
            d_z: res.r_z.clone(),
            d_s: it.s.clone(),
            d_tau: res.r_tau,
            d_kappa: it.tau * it.kappa,
        };
        let d = newton_direction(&mut kkt, &prob, &it, &rhs, &sol2).unwrap();

        // (a) GᵀΔy + AᵀΔz + cΔτ = r_x
        let mut lhs = vec![0.0; prob.n()];
        prob.g_mat.gemv_t(&mut lhs, &d.y);
        prob.a_mat.gemv_t(&mut lhs, &d.z);
        for i in 0..prob.n() {
            lhs[i] += prob.c[i] * d.tau;
            assert!((lhs[i] - res.r_x[i]).abs() < 1e-8, "dual row {i}");
        }
        // (b) GΔx − hΔτ = −r_y
        let mut gy = vec![0.0; prob.p()];
        prob.g_mat.gemv(&mut gy, &d.x);
        for i in 0..prob.p() {
            assert!((gy[i] - prob.h[i] * d.tau + res.r_y[i]).abs() < 1e-8);
        }
        // (c) AΔx + Δs − bΔτ = −r_z
        let mut az = vec![0.0; prob.m()];
        prob.a_mat.gemv(&mut az, &d.x);
        for i in 0..prob.m() {
            assert!((az[i] + d.s[i] - prob.b[i] * d.tau + res.r_z[i]).abs() < 1e-8);
        }
        // (d) cᵀΔx + hᵀΔy + bᵀΔz + Δκ = −r_τ
        let lhs_tau = algebra::dot(&prob.c, &d.x)
            + algebra::dot(&prob.h, &d.y)
            + algebra::dot(&prob.b, &d.z)
            + d.kappa;
        assert!((lhs_tau + res.r_tau).abs() < 1e-8);
        // (e) Δs + μH*(z)Δz = −d_s
        let mut hdz = vec![0.0; prob.m()];
        hessians[0].apply(&d.z, &mut hdz);
        for i in 0..prob.m() {
            assert!((d.s[i] + hdz[i] + rhs.d_s[i]).abs() < 1e-8);
        }
        // (f) τΔκ + κΔτ = −d_κ
        assert!((it.tau * d.kappa + it.kappa * d.tau + rhs.d_kappa).abs() < 1e-8);
    }

    #[test]
    fn centering_parameter_edges() {
        assert_eq!(centering(1.0), 0.0);
        assert_eq!(centering(0.0), 1.0);
        assert!(centering(0.5) > 0.0 && centering(0.5) < 1.0);
    }

    #[test]
    fn termination_metrics_are_scale_invariant() {
        let prob = max_likelihood(vec![0.5, 0.5]);
        let mut it = initial_iterate(&prob);
        it.x = vec![0.2, 0.3, 0.1];
        it.y = vec![-0.4];
        let m1 = metrics(&prob, &it);
        let t = 3.7;
        algebra::scale(&mut it.x, t);
        algebra::scale(&mut it.y, t);
        algebra::scale(&mut it.z, t);
        algebra::scale(&mut it.s, t);
        it.tau *= t;
        it.kappa *= t;
        let m2 = metrics(&prob, &it);
        for (a, b) in [
            (m1.res_primal, m2.res_primal),
            (m1.res_dual, m2.res_dual),
            (m1.gap_violation, m2.gap_violation),
            (m1.obj_primal, m2.obj_primal),
        ] {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn solves_a_tiny_lp() {
        let prob = tiny_lp();
        let r = solve(&prob, &Settings::default()).unwrap();
        assert_eq!(r.status, Status::Solved);
        assert!((r.obj_primal + 1.0).abs() < 1e-6);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && r.x[1].abs() < 1e-6);
        assert!(r.trace.iter().all(|t| t.inertia_ok));
    }

    #[test]
    fn solves_maximum_likelihood_to_the_known_optimum() {
        let prob = max_likelihood(vec![0.3, 0.7]);
        let r = solve(&prob, &Settings::default()).unwrap();
        assert_eq!(r.status, Status::Solved);
        // optimum value of t is 0.3^0.3 · 0.7^0.7
        let t_star = 0.54288145268982536069;
        assert!((r.x[2] - t_star).abs() < 1e-6, "t = {}", r.x[2]);
        assert!((r.x[0] - 0.3).abs() < 1e-5 && (r.x[1] - 0.7).abs() < 1e-5);
        assert!(r.iterations <= 30);
    }

    #[test]
    fn mu_decreases_across_iteration_windows() {
        let prob = max_likelihood(vec![0.15, 0.25, 0.25, 0.35]);
        let r = solve(&prob, &Settings::default()).unwrap();
        assert_eq!(r.status, Status::Solved);
        let mus: Vec<f64> = r.trace.iter().map(|t| t.mu).collect();
        for w in mus.windows(5) {
            assert!(w[4] < w[0], "mu not decreasing over window: {w:?}");
        }
    }

    #[test]
    fn detects_primal_infeasibility_with_certificate() {
        // x ≥ 1 and x ≤ 0 cannot hold together; an unrelated power block
        // keeps the nonsymmetric path exercised
        let prob = ProblemData {
            c: vec![0.0, 0.0, 0.0],
            g_mat: CscMatrix::zeros(0, 3),
            h: vec![],
            a_mat: CscMatrix::from_triplets(
                4,
                3,
                &[(0, 0, -1.0), (1, 0, 1.0), (2, 1, -1.0), (3, 2, -1.0)],
            ),
            b: vec![-1.0, 0.0, 0.0, 0.0],
            cones: vec![
                ConeSpec::NonNeg { n: 2 },
                ConeSpec::GenPow { alpha: vec![1.0], d1: 1, d2: 1 },
            ],
        };
        let r = solve(&prob, &Settings::default()).unwrap();
        assert_eq!(r.status, Status::PrimalInfeasible);
        // certificate: hᵀy + bᵀz = −1 and Gᵀy + Aᵀz ≈ 0
        let hy_bz = algebra::dot(&prob.b, &r.z);
        assert!((hy_bz + 1.0).abs() < 1e-12);
        let mut dres = vec![0.0; 3];
        prob.a_mat.gemv_t(&mut dres, &r.z);
        assert!(algebra::norm_inf(&dres) <= 1e-8);
    }

    #[test]
    fn detects_dual_infeasibility_with_certificate() {
        // min −x₁ with only x₁ ≥ 0: unbounded below
        let prob = ProblemData {
            c: vec![-1.0, 0.0, 0.0],
            g_mat: CscMatrix::zeros(0, 3),
            h: vec![],
            a_mat: CscMatrix::from_triplets(
                3,
                3,
                &[(0, 0, -1.0), (1, 1, -1.0), (2, 2, -1.0)],
            ),
            b: vec![0.0; 3],
            cones: vec![
                ConeSpec::NonNeg { n: 1 },
                ConeSpec::GenPow { alpha: vec![1.0], d1: 1, d2: 1 },
            ],
        };
        let r = solve(&prob, &Settings::default()).unwrap();
        assert_eq!(r.status, Status::DualInfeasible);
        assert!((algebra::dot(&prob.c, &r.x) + 1.0).abs() < 1e-12);
        let mut ax_s = r.s.clone();
        prob.a_mat.gemv(&mut ax_s, &r.x);
        assert!(algebra::norm_inf(&ax_s) <= 1e-8);
    }

    #[test]
    fn reduced_tolerance_recheck_reports_almost_solved() {
        let prob = tiny_lp();
        let settings = Settings { eps: 0.0, max_iter: 30, ..Settings::default() };
        let r = solve(&prob, &settings).unwrap();
        assert_eq!(r.status, Status::AlmostSolved);
        assert!((r.obj_primal + 1.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_invalid_problems_with_the_full_violation_list() {
        let mut prob = tiny_lp();
        prob.b.pop();
        prob.c[0] = f64::INFINITY;
        match solve(&prob, &Settings::default()) {
            Err(SolveError::Invalid(errs)) => assert!(errs.len() >= 2),
            other => panic!("expected invalid, got {other:?}"),
        }
    }
}
