//! Command-line driver: solve problem files, run the benchmark suites, and
//! run a quick self-check. Exit code 0 iff every case reached a definitive
//! status (solved or an infeasibility certificate).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use aspen::bench::{self, BenchRow, Family, Formulation};
use aspen::{io, solve, Settings, Status};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aspen", version, about = "Interior-point solver for power and relative-entropy cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file (JSON) and print the result
    Solve(SolveArgs),
    /// Generate and solve a benchmark suite; print a markdown report
    Bench(BenchArgs),
    /// Run a quick end-to-end self-check
    Check,
}

#[derive(Args)]
struct SolverOpts {
    /// Iteration limit
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Feasibility/gap tolerance
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Static regularization added to the factored KKT matrix
    #[arg(long, default_value_t = 1e-7)]
    static_reg: f64,
    /// Proximity-neighborhood size per unit of barrier degree
    #[arg(long, default_value_t = 0.1)]
    neighborhood: f64,
    /// Print per-iteration progress
    #[arg(long)]
    verbose: bool,
}

impl SolverOpts {
    fn settings(&self) -> Settings {
        Settings {
            max_iter: self.max_iter,
            eps: self.eps,
            static_reg: self.static_reg,
            neighborhood: self.neighborhood,
            verbose: self.verbose,
            ..Settings::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file to solve
    file: PathBuf,
    #[command(flatten)]
    opts: SolverOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite: a family name (max_likelihood, max_volume, entropy_max),
    /// "infeasible", or "all"
    suite: String,
    /// Instance sizes, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100])]
    sizes: Vec<usize>,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as CSV to this path
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: SolverOpts,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Bench(args) => run_bench(&args),
        Command::Check => run_check(),
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_solve(args: &SolveArgs) -> bool {
    let prob = match io::read_problem(&args.file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return false;
        }
    };
    let result = match solve(&prob, &args.opts.settings()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return false;
        }
    };
    println!("status:     {}", result.status);
    println!("iterations: {}", result.iterations);
    match result.status {
        Status::PrimalInfeasible | Status::DualInfeasible => {
            println!("objective:  none (infeasibility certificate returned)")
        }
        _ => {
            println!("objective:  {:.12e} (primal)", result.obj_primal);
            println!("            {:.12e} (dual)", result.obj_dual);
        }
    }
    result.status.is_definitive()
}

/// One benchmark solve: median-of-3 wall time, plus the solver outputs
/// (deterministic across the repeats, so the last result is reported).
fn timed_row(
    family: &str,
    formulation: &str,
    size: usize,
    prob: &aspen::ProblemData,
    settings: &Settings,
) -> BenchRow {
    let mut times = Vec::with_capacity(3);
    let mut last = None;
    for _ in 0..3 {
        let t0 = Instant::now();
        let result = solve(prob, settings);
        times.push(t0.elapsed().as_secs_f64() * 1e3);
        last = Some(result);
    }
    times.sort_by(f64::total_cmp);
    let solve_ms = times[1];
    match last.unwrap() {
        Ok(r) => BenchRow {
            family: family.to_string(),
            formulation: formulation.to_string(),
            size,
            iterations: r.iterations,
            solve_ms,
            status: r.status.to_string(),
            objective: r.obj_primal,
        },
        Err(e) => BenchRow {
            family: family.to_string(),
            formulation: formulation.to_string(),
            size,
            iterations: 0,
            solve_ms,
            status: format!("error: {e}"),
            objective: f64::NAN,
        },
    }
}

fn run_bench(args: &BenchArgs) -> bool {
    let settings = args.opts.settings();
    let families: Vec<Family> = if args.suite == "all" {
        Family::ALL.to_vec()
    } else if args.suite == "infeasible" {
        Vec::new()
    } else {
        match Family::from_str(&args.suite) {
            Ok(f) => vec![f],
            Err(e) => {
                eprintln!("error: {e}");
                return false;
            }
        }
    };

    let mut rows = Vec::new();
    for family in &families {
        for &formulation in family.formulations() {
            for &size in &args.sizes {
                match bench::generate(*family, formulation, size, args.seed) {
                    Ok(case) => rows.push(timed_row(
                        &family.to_string(),
                        &formulation.to_string(),
                        size,
                        &case.prob,
                        &settings,
                    )),
                    Err(e) => rows.push(BenchRow {
                        family: family.to_string(),
                        formulation: formulation.to_string(),
                        size,
                        iterations: 0,
                        solve_ms: 0.0,
                        status: format!("error: {e}"),
                        objective: f64::NAN,
                    }),
                }
            }
        }
    }
    if args.suite == "all" || args.suite == "infeasible" {
        let primal = bench::primal_infeasible(args.seed);
        let dual = bench::dual_infeasible(args.seed);
        rows.push(timed_row("infeasible_primal", "native", primal.n(), &primal, &settings));
        rows.push(timed_row("infeasible_dual", "native", dual.n(), &dual, &settings));
    }

    print!("{}", bench::markdown_report(&rows));
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, bench::csv_report(&rows)) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return false;
        }
    }
    rows.iter().all(|r| {
        matches!(
            r.status.as_str(),
            "solved" | "primal_infeasible" | "dual_infeasible"
        )
    })
}

/// Fast end-to-end sanity checks: problem-file round-trip, formulation
/// equivalence on small instances, infeasibility detection, determinism.
fn run_check() -> bool {
    let settings = Settings::default();
    let mut ok = true;
    let mut report = |name: &str, pass: bool, detail: String| {
        if pass {
            println!("ok   {name}");
        } else {
            println!("FAIL {name}: {detail}");
            ok = false;
        }
    };

    for family in Family::ALL {
        let case = bench::generate(family, Formulation::Native, 20, 7).unwrap();
        let text = io::to_json_string(&case.prob).unwrap();
        let back = io::from_json_str(&text).unwrap();
        let again = io::to_json_string(&back).unwrap();
        report(
            &format!("round_trip/{family}"),
            text == again,
            "serialized forms differ".into(),
        );
    }

    for family in Family::ALL {
        let native = bench::generate(family, Formulation::Native, 30, 3).unwrap();
        let base = solve(&native.prob, &settings).unwrap();
        for &formulation in family.formulations() {
            if formulation == Formulation::Native {
                continue;
            }
            let alt = bench::generate(family, formulation, 30, 3).unwrap();
            let r = solve(&alt.prob, &settings).unwrap();
            let err = (r.obj_primal - base.obj_primal).abs() / (1.0 + base.obj_primal.abs());
            report(
                &format!("agreement/{family}/{formulation}"),
                r.status == Status::Solved && err <= 1e-6,
                format!("status {} relative gap {err:.2e}", r.status),
            );
        }
    }

    let primal = solve(&bench::primal_infeasible(5), &settings).unwrap();
    report(
        "certificate/primal",
        primal.status == Status::PrimalInfeasible,
        format!("status {}", primal.status),
    );
    let dual = solve(&bench::dual_infeasible(5), &settings).unwrap();
    report(
        "certificate/dual",
        dual.status == Status::DualInfeasible,
        format!("status {}", dual.status),
    );

    let a = bench::generate(Family::MaxLikelihood, Formulation::Split3d, 40, 11).unwrap();
    let b = bench::generate(Family::MaxLikelihood, Formulation::Split3d, 40, 11).unwrap();
    let ra = solve(&a.prob, &settings).unwrap();
    let rb = solve(&b.prob, &settings).unwrap();
    report(
        "determinism/max_likelihood",
        ra.iterations == rb.iterations && ra.obj_primal == rb.obj_primal,
        format!("{} vs {} iterations", ra.iterations, rb.iterations),
    );

    ok
}
