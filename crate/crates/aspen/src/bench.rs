//! Benchmark problem generators with analytically known optima, plus report
//! rendering. Three families, each in a native one-cone form and a split
//! form over three-dimensional cones (and, where the objective permits, a
//! power-mean form), so formulations of the same instance can be compared
//! by objective value and iteration count.

use crate::algebra::CscMatrix;
use crate::cones::ConeSpec;
use crate::problem::ProblemData;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// max Π xᵢ^{αᵢ} over the simplex Σx = 1; optimum Π αᵢ^{αᵢ}.
    MaxLikelihood,
    /// max (Π xᵢ)^{1/n} inside |xᵢ| ≤ uᵢ, Σu ≤ 1, |xᵢ| ≤ 1; optimum 1/n.
    MaxVolume,
    /// min KL(p ‖ q) over the simplex Σp = 1; optimum 0 at p = q.
    EntropyMax,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::MaxLikelihood, Family::MaxVolume, Family::EntropyMax];

    pub fn formulations(&self) -> &'static [Formulation] {
        match self {
            Family::EntropyMax => &[Formulation::Native, Formulation::Split3d],
            _ => &[Formulation::Native, Formulation::Split3d, Formulation::PowMean],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::MaxLikelihood => "max_likelihood",
            Family::MaxVolume => "max_volume",
            Family::EntropyMax => "entropy_max",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max_likelihood" => Ok(Family::MaxLikelihood),
            "max_volume" => Ok(Family::MaxVolume),
            "entropy_max" => Ok(Family::EntropyMax),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// One cone of the family's natural dimension.
    Native,
    /// A chain of three-dimensional cones plus linking rows.
    Split3d,
    /// The power-mean cone in place of the generalized power cone.
    PowMean,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Native => "native",
            Formulation::Split3d => "split3d",
            Formulation::PowMean => "powmean",
        })
    }
}

impl FromStr for Formulation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "native" => Ok(Formulation::Native),
            "split3d" => Ok(Formulation::Split3d),
            "powmean" => Ok(Formulation::PowMean),
            other => Err(format!("unknown formulation {other:?}")),
        }
    }
}

/// A generated instance together with its analytic optimal objective.
#[derive(Debug, Clone)]
pub struct BenchProblem {
    pub prob: ProblemData,
    pub obj_star: f64,
}

/// Positive weights summing to one, each at least 1e-3 before normalization.
fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().max(1e-3)).collect();
    let total: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= total;
    }
    w
}

/// The chain exponents for splitting Π xᵢ^{αᵢ} ≥ t into 3-d cones:
/// v₂ = x₁^{1−p₂} x₂^{p₂}, vᵢ = v_{i−1}^{1−pᵢ} xᵢ^{pᵢ}, with
/// pᵢ = αᵢ / Σ_{j≤i} αⱼ so that v_n = Π xᵢ^{αᵢ}.
fn chain_exponents(alpha: &[f64]) -> Vec<f64> {
    let mut beta = 0.0;
    alpha
        .iter()
        .map(|&a| {
            beta += a;
            a / beta
        })
        .collect()
}

/// Rows of a chain of `GenPow((1−pᵢ, pᵢ), 2, 1)` cones tying `t` to the
/// weighted geometric mean of `x_vars`. Appends triplets/b rows in place and
/// returns the cones; `next_row` and `next_var` advance past what was used.
#[allow(clippy::too_many_arguments)]
fn push_geomean_chain(
    alpha: &[f64],
    x_vars: &[usize],
    t_var: usize,
    triplets: &mut Vec<(usize, usize, f64)>,
    next_row: &mut usize,
    next_var: &mut usize,
    b: &mut Vec<f64>,
    cones: &mut Vec<ConeSpec>,
) {
    let n = alpha.len();
    assert!(n >= 2, "chain needs at least two factors");
    let p = chain_exponents(alpha);
    let mut prev = x_vars[0];
    for i in 1..n {
        let cur = if i == n - 1 {
            t_var
        } else {
            let v = *next_var;
            *next_var += 1;
            v
        };
        for var in [prev, x_vars[i], cur] {
            triplets.push((*next_row, var, -1.0));
            b.push(0.0);
            *next_row += 1;
        }
        cones.push(ConeSpec::GenPow { alpha: vec![1.0 - p[i], p[i]], d1: 2, d2: 1 });
        prev = cur;
    }
}

/// max Π xᵢ^{αᵢ} over Σx = 1, x ≥ 0: as min −t with (x, t) in a power cone.
fn max_likelihood(form: Formulation, n: usize, rng: &mut ChaCha8Rng) -> BenchProblem {
    let alpha = random_simplex(rng, n);
    let obj_star = -alpha.iter().map(|&a| a * a.ln()).sum::<f64>().exp();
    let g =
        CscMatrix::from_triplets(1, if form == Formulation::Split3d { 2 * n - 1 } else { n + 1 }, &(0..n).map(|j| (0, j, 1.0)).collect::<Vec<_>>());
    match form {
        Formulation::Native | Formulation::PowMean => {
            let a = CscMatrix::from_triplets(
                n + 1,
                n + 1,
                &(0..n + 1).map(|i| (i, i, -1.0)).collect::<Vec<_>>(),
            );
            let mut c = vec![0.0; n + 1];
            c[n] = -1.0;
            let cone = if form == Formulation::Native {
                ConeSpec::GenPow { alpha, d1: n, d2: 1 }
            } else {
                ConeSpec::PowMean { alpha }
            };
            BenchProblem {
                prob: ProblemData {
                    c,
                    g_mat: g,
                    h: vec![1.0],
                    a_mat: a,
                    b: vec![0.0; n + 1],
                    cones: vec![cone],
                },
                obj_star,
            }
        }
        Formulation::Split3d => {
            // variables [x (n), t, v₂ … v_{n−1}]
            let n_var = 2 * n - 1;
            let t_var = n;
            let mut triplets = Vec::new();
            let mut b = Vec::new();
            let mut cones = Vec::new();
            let mut next_row = 0;
            for i in 0..n {
                triplets.push((next_row, i, -1.0));
                b.push(0.0);
                next_row += 1;
            }
            cones.push(ConeSpec::NonNeg { n });
            let mut next_var = n + 1;
            let x_vars: Vec<usize> = (0..n).collect();
            push_geomean_chain(
                &alpha,
                &x_vars,
                t_var,
                &mut triplets,
                &mut next_row,
                &mut next_var,
                &mut b,
                &mut cones,
            );
            let mut c = vec![0.0; n_var];
            c[t_var] = -1.0;
            BenchProblem {
                prob: ProblemData {
                    c,
                    g_mat: g,
                    h: vec![1.0],
                    a_mat: CscMatrix::from_triplets(next_row, n_var, &triplets),
                    b,
                    cones,
                },
                obj_star,
            }
        }
    }
}

/// max (Π xᵢ)^{1/n} with |xᵢ| ≤ uᵢ, Σuᵢ ≤ 1, |xᵢ| ≤ 1: optimum 1/n at
/// xᵢ = uᵢ = 1/n.
fn max_volume(form: Formulation, n: usize, _rng: &mut ChaCha8Rng) -> BenchProblem {
    let gamma = 1.0;
    let alpha = vec![1.0 / n as f64; n];
    let obj_star = -gamma / n as f64;
    // variables [x (n), u (n), t, chain auxiliaries…]
    let t_var = 2 * n;
    let n_var = if form == Formulation::Split3d { 3 * n - 1 } else { 2 * n + 1 };
    let mut triplets = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut next_row = 0;
    match form {
        Formulation::Native | Formulation::PowMean => {
            for i in 0..n {
                triplets.push((next_row, i, -1.0));
                b.push(0.0);
                next_row += 1;
            }
            triplets.push((next_row, t_var, -1.0));
            b.push(0.0);
            next_row += 1;
            cones.push(if form == Formulation::Native {
                ConeSpec::GenPow { alpha, d1: n, d2: 1 }
            } else {
                ConeSpec::PowMean { alpha }
            });
        }
        Formulation::Split3d => {
            let mut next_var = 2 * n + 1;
            let x_vars: Vec<usize> = (0..n).collect();
            push_geomean_chain(
                &alpha,
                &x_vars,
                t_var,
                &mut triplets,
                &mut next_row,
                &mut next_var,
                &mut b,
                &mut cones,
            );
        }
    }
    // uᵢ − xᵢ ≥ 0 and uᵢ + xᵢ ≥ 0
    for sign in [1.0, -1.0] {
        for i in 0..n {
            triplets.push((next_row, i, sign));
            triplets.push((next_row, n + i, -1.0));
            b.push(0.0);
            next_row += 1;
        }
    }
    // γ − Σuᵢ ≥ 0
    for i in 0..n {
        triplets.push((next_row, n + i, 1.0));
    }
    b.push(gamma);
    next_row += 1;
    // γ − xᵢ ≥ 0 and γ + xᵢ ≥ 0
    for sign in [1.0, -1.0] {
        for i in 0..n {
            triplets.push((next_row, i, sign));
            b.push(gamma);
            next_row += 1;
        }
    }
    cones.push(ConeSpec::NonNeg { n: 4 * n + 1 });
    let mut c = vec![0.0; n_var];
    c[t_var] = -1.0;
    BenchProblem {
        prob: ProblemData {
            c,
            g_mat: CscMatrix::zeros(0, n_var),
            h: vec![],
            a_mat: CscMatrix::from_triplets(next_row, n_var, &triplets),
            b,
            cones,
        },
        obj_star,
    }
}

/// min Σ pᵢ ln(pᵢ/qᵢ) over Σp = 1: optimum 0 at p = q.
fn entropy_max(form: Formulation, d: usize, rng: &mut ChaCha8Rng) -> BenchProblem {
    let q = random_simplex(rng, d);
    match form {
        Formulation::Native => {
            // variables [t, p (d)]; s = (t, q, p) in the relative entropy cone
            let n_var = d + 1;
            let mut triplets = vec![(0, 0, -1.0)];
            let mut b = vec![0.0];
            for (i, &qi) in q.iter().enumerate() {
                b.push(qi);
                let _ = i;
            }
            for i in 0..d {
                triplets.push((1 + d + i, 1 + i, -1.0));
                b.push(0.0);
            }
            BenchProblem {
                prob: ProblemData {
                    c: {
                        let mut c = vec![0.0; n_var];
                        c[0] = 1.0;
                        c
                    },
                    g_mat: CscMatrix::from_triplets(
                        1,
                        n_var,
                        &(0..d).map(|i| (0, 1 + i, 1.0)).collect::<Vec<_>>(),
                    ),
                    h: vec![1.0],
                    a_mat: CscMatrix::from_triplets(2 * d + 1, n_var, &triplets),
                    b,
                    cones: vec![ConeSpec::RelEntropy { d }],
                },
                obj_star: 0.0,
            }
        }
        Formulation::Split3d => {
            // variables [t, p (d), w (d)]: wᵢ ≥ pᵢ ln(pᵢ/qᵢ) in scalar
            // relative-entropy cones, plus t − Σw ≥ 0
            let n_var = 1 + 2 * d;
            let mut triplets = Vec::new();
            let mut b = Vec::new();
            let mut cones = Vec::new();
            let mut next_row = 0;
            for i in 0..d {
                triplets.push((next_row, 1 + d + i, -1.0));
                b.push(0.0);
                next_row += 1;
                b.push(q[i]);
                next_row += 1;
                triplets.push((next_row, 1 + i, -1.0));
                b.push(0.0);
                next_row += 1;
                cones.push(ConeSpec::RelEntropy { d: 1 });
            }
            triplets.push((next_row, 0, -1.0));
            for i in 0..d {
                triplets.push((next_row, 1 + d + i, 1.0));
            }
            b.push(0.0);
            next_row += 1;
            cones.push(ConeSpec::NonNeg { n: 1 });
            BenchProblem {
                prob: ProblemData {
                    c: {
                        let mut c = vec![0.0; n_var];
                        c[0] = 1.0;
                        c
                    },
                    g_mat: CscMatrix::from_triplets(
                        1,
                        n_var,
                        &(0..d).map(|i| (0, 1 + i, 1.0)).collect::<Vec<_>>(),
                    ),
                    h: vec![1.0],
                    a_mat: CscMatrix::from_triplets(next_row, n_var, &triplets),
                    b,
                    cones,
                },
                obj_star: 0.0,
            }
        }
        Formulation::PowMean => unreachable!("rejected by generate"),
    }
}

/// Generate one instance. The same `(family, size, seed)` draws the same
/// data in every formulation, so objective values are directly comparable.
pub fn generate(
    family: Family,
    form: Formulation,
    size: usize,
    seed: u64,
) -> Result<BenchProblem, String> {
    if !family.formulations().contains(&form) {
        return Err(format!("{family} has no {form} formulation"));
    }
    let min_size = if form == Formulation::Split3d || family != Family::EntropyMax { 2 } else { 1 };
    if size < min_size {
        return Err(format!("{family}/{form} needs size >= {min_size}, got {size}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bp = match family {
        Family::MaxLikelihood => max_likelihood(form, size, &mut rng),
        Family::MaxVolume => max_volume(form, size, &mut rng),
        Family::EntropyMax => entropy_max(form, size, &mut rng),
    };
    debug_assert!(bp.prob.validate().is_ok(), "{:?}", bp.prob.validate());
    Ok(bp)
}

/// x ≥ 1 and x ≤ 0 together, with a power-cone block keeping the
/// nonsymmetric path exercised. Feasibility is impossible; the dual
/// improving ray is the certificate.
pub fn primal_infeasible(seed: u64) -> ProblemData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = random_simplex(&mut rng, 2);
    ProblemData {
        c: vec![0.0; 4],
        g_mat: CscMatrix::zeros(0, 4),
        h: vec![],
        a_mat: CscMatrix::from_triplets(
            5,
            4,
            &[(0, 0, -1.0), (1, 0, 1.0), (2, 1, -1.0), (3, 2, -1.0), (4, 3, -1.0)],
        ),
        b: vec![-1.0, 0.0, 0.0, 0.0, 0.0],
        cones: vec![ConeSpec::NonNeg { n: 2 }, ConeSpec::GenPow { alpha, d1: 2, d2: 1 }],
    }
}

/// min −x₁ with only x₁ ≥ 0 binding: unbounded below; the primal improving
/// ray is the certificate.
pub fn dual_infeasible(seed: u64) -> ProblemData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = random_simplex(&mut rng, 2);
    ProblemData {
        c: vec![-1.0, 0.0, 0.0, 0.0],
        g_mat: CscMatrix::zeros(0, 4),
        h: vec![],
        a_mat: CscMatrix::from_triplets(
            4,
            4,
            &[(0, 0, -1.0), (1, 1, -1.0), (2, 2, -1.0), (3, 3, -1.0)],
        ),
        b: vec![0.0; 4],
        cones: vec![ConeSpec::NonNeg { n: 1 }, ConeSpec::GenPow { alpha, d1: 2, d2: 1 }],
    }
}

/// One benchmark measurement, one row of the report.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub family: String,
    pub formulation: String,
    pub size: usize,
    pub iterations: usize,
    pub solve_ms: f64,
    pub status: String,
    pub objective: f64,
}

pub fn csv_report(rows: &[BenchRow]) -> String {
    let mut out = String::from("family,formulation,size,iterations,solve_ms,status,objective\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.3},{},{:.12e}\n",
            r.family, r.formulation, r.size, r.iterations, r.solve_ms, r.status, r.objective
        ));
    }
    out
}

pub fn markdown_report(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "| family | formulation | size | iterations | solve_ms | status | objective |\n\
         |---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.3} | {} | {:.6e} |\n",
            r.family, r.formulation, r.size, r.iterations, r.solve_ms, r.status, r.objective
        ));
    }
    out
}
