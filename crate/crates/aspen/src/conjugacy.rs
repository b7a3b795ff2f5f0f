//! Primal-side quantities recovered through conjugacy: the gradient of the
//! (implicit) primal barrier, its value, and the centrality proximity Φ.
//!
//! Each nonsymmetric cone reduces the gradient recovery to one scalar root
//! problem with a known shape (monotone + one-sided curvature), so a plain
//! Newton iteration started on the guaranteed side converges monotonically
//! and quadratically; a bisection guard covers floating-point excursions
//! past the domain boundary.

use crate::algebra;
use crate::cones::{ConeSide, ConeSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("point outside cone domain: {0}")]
    Domain(String),
    #[error("root search did not converge: {0}")]
    NoConvergence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

/// Scalar root problem `h(x) = 0` with shape guarantees. The two shapes used
/// here — (decreasing, convex) with `h(x0) ≥ 0` and (increasing, concave)
/// with `h(x0) ≤ 0` — both put `x0` left of the root and make the Newton
/// iterates increase monotonically without overshoot.
pub struct RootProblem<F, G> {
    pub h: F,
    pub h_prime: G,
    pub x0: f64,
    pub monotonicity: Monotonicity,
    pub curvature: Curvature,
    /// Accepted when `|h(x)| ≤ tol · max(1, |x|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Open lower boundary of h's domain; iterates crossing it are bisected
    /// back toward the last valid point.
    pub domain_min: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    pub iterations: usize,
    /// Last two Newton increments, for the quadratic-tail diagnostic.
    pub last_step: f64,
    pub prev_step: f64,
}

pub const ROOT_TOL: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 100;

pub fn newton_root<F, G>(p: RootProblem<F, G>) -> Result<RootResult, RecoveryError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut x = p.x0;
    let mut last_step = 0.0;
    let mut prev_step = 0.0;
    for k in 0..p.max_iter {
        let hx = (p.h)(x);
        if !hx.is_finite() {
            return Err(RecoveryError::NoConvergence(format!("h({x}) = {hx}")));
        }
        if hx.abs() <= p.tol * x.abs().max(1.0) {
            return Ok(RootResult { x, iterations: k, last_step, prev_step });
        }
        let slope = (p.h_prime)(x);
        if !slope.is_finite() || slope == 0.0 {
            return Err(RecoveryError::NoConvergence(format!("h'({x}) = {slope}")));
        }
        let mut xn = x - hx / slope;
        if xn <= p.domain_min {
            // bisect toward the boundary instead of leaving the domain
            xn = 0.5 * (x + p.domain_min);
        }
        if xn == x {
            // float fixpoint short of the tolerance: no further progress possible
            return Err(RecoveryError::NoConvergence(format!("stalled at x = {x}, h = {hx:e}")));
        }
        prev_step = last_step;
        last_step = xn - x;
        x = xn;
    }
    Err(RecoveryError::NoConvergence(format!("no root after {} iterations", p.max_iter)))
}

// ---------------------------------------------------------------------------
// Per-family root problems. Exposed crate-internally so tests can probe the
// shape guarantees (start-side sign, slope signs) directly.
// ---------------------------------------------------------------------------

/// Generalized power, ‖r‖ > 0: decreasing convex on x > 0, h(x0) ≥ 0.
pub(crate) fn genpow_root_problem<'a>(
    alpha: &'a [f64],
    p: &'a [f64],
    nr: f64,
) -> RootProblem<impl Fn(f64) -> f64 + 'a, impl Fn(f64) -> f64 + 'a> {
    let log_p2: f64 = alpha.iter().zip(p).map(|(&a, &pi)| 2.0 * a * pi.ln()).sum();
    let chi = log_p2.exp();
    let psi = 1.0 / alpha.iter().map(|&a| a * a).sum::<f64>();
    let x0 = -1.0 / nr
        + (psi * nr + (chi * (chi / (nr * nr) + psi * psi - 1.0)).sqrt()) / (chi - nr * nr);
    RootProblem {
        h: move |x: f64| {
            alpha
                .iter()
                .map(|&a| 2.0 * a * (nr * x + (1.0 + a) / a).ln())
                .sum::<f64>()
                - (2.0 * x / nr + x * x).ln()
                - log_p2
        },
        h_prime: move |x: f64| {
            alpha.iter().map(|&a| 2.0 * a * nr / (nr * x + (1.0 + a) / a)).sum::<f64>()
                - (2.0 / nr + 2.0 * x) / (2.0 * x / nr + x * x)
        },
        x0: x0.max(1e-300),
        monotonicity: Monotonicity::Decreasing,
        curvature: Curvature::Convex,
        tol: ROOT_TOL,
        max_iter: ROOT_MAX_ITER,
        domain_min: 0.0,
    }
}

/// Power mean, r > 0: increasing concave on x ≥ 0, h(0) ≤ 0.
pub(crate) fn powmean_root_problem_pos<'a>(
    alpha: &'a [f64],
    p: &'a [f64],
    r: f64,
) -> RootProblem<impl Fn(f64) -> f64 + 'a, impl Fn(f64) -> f64 + 'a> {
    RootProblem {
        h: move |x: f64| {
            alpha
                .iter()
                .zip(p)
                .map(|(&a, &pi)| a * ((1.0 + a) / (a * pi) * x + r / pi).ln())
                .sum::<f64>()
                - ((r + 2.0 * x) / (r + x)).ln()
        },
        h_prime: move |x: f64| {
            alpha.iter().map(|&a| a / (x + a * r / (1.0 + a))).sum::<f64>()
                - r / ((r + 2.0 * x) * (r + x))
        },
        x0: 0.0,
        monotonicity: Monotonicity::Increasing,
        curvature: Curvature::Concave,
        tol: ROOT_TOL,
        max_iter: ROOT_MAX_ITER,
        domain_min: -0.5 * r,
    }
}

/// Power mean, r < 0: increasing concave on x > 0, h(x0) ≤ 0.
pub(crate) fn powmean_root_problem_neg<'a>(
    alpha: &'a [f64],
    p: &'a [f64],
    r: f64,
) -> RootProblem<impl Fn(f64) -> f64 + 'a, impl Fn(f64) -> f64 + 'a> {
    let x0: f64 =
        alpha.iter().zip(p).map(|(&a, &pi)| a * (a * pi / (1.0 + a)).ln()).sum::<f64>().exp();
    RootProblem {
        h: move |x: f64| {
            let s = (r * r + 4.0 * x * x).sqrt();
            alpha
                .iter()
                .zip(p)
                .map(|(&a, &pi)| a * (x / (a * pi) + (r + s) / (2.0 * pi)).ln())
                .sum::<f64>()
        },
        h_prime: move |x: f64| {
            let s = (r * r + 4.0 * x * x).sqrt();
            alpha
                .iter()
                .map(|&a| a * (1.0 / a + 2.0 * x / s) / (x / a + (r + s) / 2.0))
                .sum::<f64>()
        },
        x0,
        monotonicity: Monotonicity::Increasing,
        curvature: Curvature::Concave,
        tol: ROOT_TOL,
        max_iter: ROOT_MAX_ITER,
        domain_min: 0.0,
    }
}

/// Relative entropy: increasing concave on x > −min(r), h(0) ≤ 0.
pub(crate) fn relentropy_root_problem<'a>(
    p: f64,
    q: &'a [f64],
    r: &'a [f64],
) -> RootProblem<impl Fn(f64) -> f64 + 'a, impl Fn(f64) -> f64 + 'a> {
    let d = q.len() as f64;
    let domain_min = -r.iter().cloned().fold(f64::INFINITY, f64::min);
    RootProblem {
        h: move |x: f64| {
            d * x + r.iter().zip(q).map(|(&ri, &qi)| ri * ((ri + x) / qi).ln()).sum::<f64>() - p
        },
        h_prime: move |x: f64| d + r.iter().map(|&ri| ri / (ri + x)).sum::<f64>(),
        x0: 0.0,
        monotonicity: Monotonicity::Increasing,
        curvature: Curvature::Concave,
        tol: ROOT_TOL,
        max_iter: ROOT_MAX_ITER,
        domain_min,
    }
}

// ---------------------------------------------------------------------------
// Conjugate gradient per cone family
// ---------------------------------------------------------------------------

/// Gradient g(s) of the primal barrier, defined by `−∇f*(−g(s)) = s`.
pub fn conj_gradient(cone: &ConeSpec, s: &[f64]) -> Result<Vec<f64>, RecoveryError> {
    if !cone.is_interior(s, ConeSide::Primal) {
        return Err(RecoveryError::Domain("conj_gradient: s not in primal interior".into()));
    }
    match cone {
        ConeSpec::Zero { n } => Ok(vec![0.0; *n]),
        ConeSpec::NonNeg { .. } => Ok(s.iter().map(|&si| -1.0 / si).collect()),
        ConeSpec::GenPow { alpha, d1, .. } => {
            let (p, r) = s.split_at(*d1);
            let nr = algebra::norm2(r);
            if nr <= 1e-14 * algebra::norm2(p) {
                // closed form on the w = 0 slice
                let mut g: Vec<f64> = alpha.iter().zip(p).map(|(&a, &pi)| -(1.0 + a) / pi).collect();
                g.extend(std::iter::repeat(0.0).take(r.len()));
                return Ok(g);
            }
            let root = newton_root(genpow_root_problem(alpha, p, nr))?;
            let g_nr = positive_root(root.x, "genpow")?;
            let mut g: Vec<f64> = alpha
                .iter()
                .zip(p)
                .map(|(&a, &pi)| -(1.0 + a + a * g_nr * nr) / pi)
                .collect();
            g.extend(r.iter().map(|&ri| g_nr * ri / nr));
            Ok(g)
        }
        ConeSpec::PowMean { alpha } => {
            let d = alpha.len();
            let (p, r) = (&s[..d], s[d]);
            let log_geo: f64 = alpha.iter().zip(p).map(|(&a, &pi)| a * pi.ln()).sum();
            let g_r = if r.abs() <= 1e-14 * log_geo.exp() {
                // w = 0 slice: g_p closes, then ζ(−g) = φ(−g_p) − g_r = g_r
                let log_phi: f64 =
                    alpha.iter().zip(p).map(|(&a, &pi)| a * ((1.0 + a) / (a * pi)).ln()).sum();
                let g: Vec<f64> = alpha.iter().zip(p).map(|(&a, &pi)| -(1.0 + a) / pi).collect();
                let mut out = g;
                out.push(log_phi.exp() / 2.0);
                return Ok(out);
            } else if r > 0.0 {
                let root = newton_root(powmean_root_problem_pos(alpha, p, r))?;
                1.0 / positive_root(root.x, "powmean r>0")?
            } else {
                let root = newton_root(powmean_root_problem_neg(alpha, p, r))?;
                let phi = 1.0 / positive_root(root.x, "powmean r<0")?;
                // φ − √(φ²+4/r²) written cancellation-free
                let c = 4.0 / (r * r);
                -c / (2.0 * (phi + (phi * phi + c).sqrt())) - 1.0 / r
            };
            let mut g: Vec<f64> =
                alpha.iter().zip(p).map(|(&a, &pi)| -(1.0 + a * (1.0 + r * g_r)) / pi).collect();
            g.push(g_r);
            Ok(g)
        }
        ConeSpec::RelEntropy { d } => {
            let (p, rest) = (s[0], &s[1..]);
            let (q, r) = rest.split_at(*d);
            let root = newton_root(relentropy_root_problem(p, q, r))?;
            let x = positive_root(root.x, "relentropy")?;
            let g_p = -1.0 / x;
            let g_q: Vec<f64> = q.iter().zip(r).map(|(&qi, &ri)| (g_p * ri - 1.0) / qi).collect();
            let mut g = vec![g_p];
            g.extend(g_q.iter().copied());
            g.extend(
                g_q.iter().zip(r).map(|(&gqi, &ri)| g_p * (g_p / gqi).ln() - g_p - 1.0 / ri),
            );
            Ok(g)
        }
    }
}

fn positive_root(x: f64, what: &str) -> Result<f64, RecoveryError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(RecoveryError::NoConvergence(format!("{what}: root {x} not positive (point too close to boundary)")))
    }
}

/// Primal barrier value through the conjugacy identity
/// `f(s) = −ν − f*(−g(s))`.
pub fn primal_barrier(cone: &ConeSpec, s: &[f64]) -> Result<f64, RecoveryError> {
    if matches!(cone, ConeSpec::Zero { .. }) {
        return Ok(0.0);
    }
    let g = conj_gradient(cone, s)?;
    let z: Vec<f64> = g.iter().map(|x| -x).collect();
    let info = cone
        .dual_barrier(&z)
        .map_err(|e| RecoveryError::NoConvergence(format!("recovered point left the dual cone: {e}")))?;
    Ok(-(cone.degree() as f64) - info.value)
}

/// Functional proximity to the central path,
/// `Φ = ν̄ ln((sᵀz + τκ)/ν̄) + ν̄ + Σ_blocks (f(s_b) + f*(z_b)) + f(τ) + f*(κ)`,
/// with every primal value taken conjugacy-consistently so that Φ = 0 exactly
/// on the central path (including the τκ pair as a 1-D nonnegative block)
/// and Φ > 0 everywhere else.
pub fn proximity(
    cones: &[ConeSpec],
    s: &[f64],
    z: &[f64],
    tau: f64,
    kappa: f64,
) -> Result<f64, RecoveryError> {
    if !(tau > 0.0) || !(kappa > 0.0) {
        return Err(RecoveryError::Domain(format!("proximity: tau = {tau}, kappa = {kappa}")));
    }
    let nu_bar = (crate::cones::total_degree(cones) + 1) as f64;
    let gap = algebra::dot(s, z) + tau * kappa;
    if !(gap > 0.0) {
        return Err(RecoveryError::Domain(format!("proximity: duality gap {gap} not positive")));
    }
    let mut phi = nu_bar * (gap / nu_bar).ln() + nu_bar;
    let mut off = 0;
    for cone in cones {
        let dim = cone.dim();
        if !matches!(cone, ConeSpec::Zero { .. }) {
            let sb = &s[off..off + dim];
            let zb = &z[off..off + dim];
            let dual = cone
                .dual_barrier(zb)
                .map_err(|e| RecoveryError::Domain(format!("proximity: {e}")))?;
            phi += dual.value + primal_barrier(cone, sb)?;
        }
        off += dim;
    }
    // (τ, κ) as a conjugate pair on R_+: f(τ) + f*(κ) = −ln τ − ln κ − 1
    phi += -tau.ln() - kappa.ln() - 1.0;
    Ok(phi)
}
