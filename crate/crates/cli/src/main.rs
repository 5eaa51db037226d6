//! `caphs`: command-line front end for the capacitated hitting-set solvers
//! and the knapsack reductions.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use caphs::approx::{parse_ratio, size_bound, solve_approx, ApproxMode, SolverConfig};
use caphs::exact::{solve_exact, solve_exact_weighted, ExactSolution, DEFAULT_EXACT_BUDGET};
use caphs::feasibility::check_feasible;
use caphs::generate::{generate_instance, GenParams};
use caphs::io::{
    parse_instance, parse_solution, serialize_instance, solution_json, FORMAT_VERSION,
};
use caphs::reductions::{
    build_covering_family, csp_to_mdk, csp_to_mdk_covering, mdk_to_cvc, mdk_to_wcvc,
    min_covering_r, parse_csp, parse_mdk, serialize_mdk, CvcReduction,
};
use caphs::{Error, Instance, Solution};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

/// Local assignments enumerated per family set by `reduce csp-mdk-cov`.
const COVERING_ENUM_BUDGET: u64 = 1_000_000;
/// Random families tried by `reduce csp-mdk-cov`.
const COVERING_TRIALS: usize = 50;

#[derive(Parser)]
#[command(
    name = "caphs",
    version,
    about = "Capacitated d-Hitting Set solvers and reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a solution; exit 0 if feasible, 1 if not.
    Check {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Minimum-size (or minimum-weight) solution of size at most k.
    SolveExact {
        instance: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        weighted: bool,
    },
    /// Run the approximation pipeline.
    SolveApprox {
        instance: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = ratio_arg)]
        epsilon: Option<Ratio<u64>>,
        #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Caps both the tuple and the recursion budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Override a solver constant, e.g. `rho=1/4`. Repeatable.
        #[arg(long = "override-const", value_name = "KEY=VAL")]
        overrides: Vec<String>,
    },
    /// Exact oracle then guided approximation, as one CSV record.
    Certify {
        instance: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        weighted: bool,
    },
    /// Apply a reduction to a CSP or knapsack instance.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        input: PathBuf,
        #[arg(long, value_parser = ratio_arg, default_value = "1/2")]
        alpha: Ratio<u64>,
        #[arg(long, value_parser = ratio_arg, default_value = "1/2")]
        beta: Ratio<u64>,
        /// Covering set size; defaults to the smallest admissible value.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Certify a seeded corpus and print one CSV row per instance.
    Bench {
        #[arg(long)]
        corpus_seed: u64,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        kmax: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Enumerate,
    Guided,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    CspMdk,
    MdkCvc,
    MdkWcvc,
    CspMdkCov,
}

fn ratio_arg(s: &str) -> Result<Ratio<u64>, String> {
    parse_ratio(s).ok_or_else(|| format!("expected a rational a/b, got {s:?}"))
}

/// Failures reported as `{"error": {...}}` with exit code 2.
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        kind: "IoError",
        message: format!("{}: {e}", path.display()),
    })
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn is_weighted(inst: &Instance) -> bool {
    inst.elements().iter().any(|e| e.weight != 1)
}

fn oracle(inst: &Instance, k: u32, weighted: bool) -> Result<Option<ExactSolution>, Error> {
    if weighted {
        solve_exact_weighted(inst, k, DEFAULT_EXACT_BUDGET)
    } else {
        solve_exact(inst, k, DEFAULT_EXACT_BUDGET)
    }
}

fn solution_output(sol: &Solution, asg: &caphs::Assignment, weight: u64) -> Value {
    let mut out = solution_json(sol, Some(asg));
    out["status"] = json!("solved");
    out["size"] = json!(sol.size());
    out["weight"] = json!(weight);
    out
}

fn none_output() -> Value {
    json!({"format": FORMAT_VERSION, "status": "none"})
}

/// Writes one line to stdout; a closed pipe is not an error worth a panic.
fn emit(line: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn print_json(v: &Value) {
    emit(v);
}

fn check(instance: &Path, solution: &Path) -> Result<ExitCode, Failure> {
    let inst = load_instance(instance)?;
    let (sol, _) = parse_solution(&read(solution)?)?;
    sol.validate(&inst)?;
    match check_feasible(&inst, &sol)? {
        Some(asg) => {
            let mut out = solution_output(&sol, &asg, sol.weight(&inst));
            out["feasible"] = json!(true);
            print_json(&out);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            print_json(&json!({"format": FORMAT_VERSION, "feasible": false}));
            Ok(ExitCode::from(1))
        }
    }
}

fn solve_exact_cmd(instance: &Path, k: u32, weighted: bool) -> Result<ExitCode, Failure> {
    let inst = load_instance(instance)?;
    Ok(match oracle(&inst, k, weighted)? {
        Some(opt) => {
            print_json(&solution_output(&opt.sol, &opt.asg, opt.weight));
            ExitCode::SUCCESS
        }
        None => {
            print_json(&none_output());
            ExitCode::from(1)
        }
    })
}

struct ApproxArgs {
    k: u32,
    epsilon: Option<Ratio<u64>>,
    mode: Mode,
    seed: u64,
    budget: Option<u64>,
    overrides: Vec<String>,
}

fn solve_approx_cmd(instance: &Path, a: ApproxArgs) -> Result<ExitCode, Failure> {
    let inst = load_instance(instance)?;
    let mut cfg = SolverConfig::defaults(a.k, inst.d());
    cfg.seed = a.seed;
    if let Some(eps) = a.epsilon {
        cfg.epsilon = eps;
    }
    if let Some(b) = a.budget {
        cfg.tuple_budget = b;
        cfg.recursion_budget = b;
    }
    for o in &a.overrides {
        let (key, val) = o.split_once('=').ok_or_else(|| Failure {
            kind: "UsageError",
            message: format!("override {o:?} is not key=value"),
        })?;
        cfg.set(key.trim(), val)?;
    }
    cfg.validate()?;

    let found = match a.mode {
        Mode::Enumerate => solve_approx(&inst, a.k, &cfg, ApproxMode::Enumerate)?,
        Mode::Guided => match oracle(&inst, a.k, is_weighted(&inst))? {
            Some(opt) => solve_approx(
                &inst,
                a.k,
                &cfg,
                ApproxMode::Guided {
                    opt: &opt.sol,
                    asg: &opt.asg,
                },
            )?,
            None => None,
        },
    };
    let Some(res) = found else {
        print_json(&none_output());
        return Ok(ExitCode::from(1));
    };
    let mut out = solution_output(&res.sol, &res.asg, res.weight);
    out["size_bound"] = json!(size_bound(a.k as usize));
    out["ratio_bound"] = json!(4.0 / 3.0);
    out["weight_ratio_bound"] = json!(2.0 + ratio_f64(cfg.epsilon));
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

const CSV_HEADER: &str = "label,n,m,d,kmax,status,exact_size,exact_weight,approx_size,approx_weight,size_bound,size_ratio,weight_ratio";

/// Exact optimum then guided approximation; one CSV record.
fn certify_record(label: &str, inst: &Instance, kmax: u32, seed: u64) -> Result<String, Error> {
    let mut row = format!("{label},{},{},{},{kmax}", inst.n(), inst.m(), inst.d());
    let Some(opt) = oracle(inst, kmax, is_weighted(inst))? else {
        row.push_str(",no_solution,,,,,,,");
        return Ok(row);
    };
    let k = u32::try_from(opt.sol.size())
        .expect("size at most kmax")
        .max(1);
    let mut cfg = SolverConfig::defaults(k, inst.d());
    cfg.seed = seed;
    let res = solve_approx(
        inst,
        k,
        &cfg,
        ApproxMode::Guided {
            opt: &opt.sol,
            asg: &opt.asg,
        },
    )?;
    let ratio = |a: u64, b: u64| {
        if b == 0 {
            String::from("1")
        } else {
            Ratio::new(a, b).to_string()
        }
    };
    match res {
        Some(res) => {
            let feasible = check_feasible(inst, &res.sol)?.is_some();
            write!(
                row,
                ",{},{},{},{},{},{},{},{}",
                if feasible { "ok" } else { "infeasible" },
                opt.sol.size(),
                opt.weight,
                res.sol.size(),
                res.weight,
                size_bound(k as usize),
                ratio(res.sol.size(), opt.sol.size()),
                ratio(res.weight, opt.weight),
            )
            .unwrap();
        }
        None => {
            write!(
                row,
                ",approx_none,{},{},,,{},,",
                opt.sol.size(),
                opt.weight,
                size_bound(k as usize)
            )
            .unwrap();
        }
    }
    Ok(row)
}

fn certify(instance: &Path, k: u32, seed: u64) -> Result<ExitCode, Failure> {
    let inst = load_instance(instance)?;
    let label = instance
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    emit(certify_record(&label, &inst, k, seed)?);
    Ok(ExitCode::SUCCESS)
}

/// Corpus shape for bench seed `s`: `n` in 5..=6, `m` in 4..=8, `d` in
/// 2..=3, weighted on odd seeds.
fn corpus_params(s: u64) -> GenParams {
    let n = 5 + (s % 2) as usize;
    let m = 4 + (s / 2 % 5) as usize;
    let d = 2 + (s / 10 % 2) as usize;
    if s % 2 == 1 {
        GenParams::weighted(n, m, d)
    } else {
        GenParams::unweighted(n, m, d)
    }
}

fn bench(corpus_seed: u64, count: u64, kmax: u32) -> Result<ExitCode, Failure> {
    emit(CSV_HEADER);
    for i in 0..count {
        let s = corpus_seed.wrapping_add(i);
        let inst = generate_instance(&corpus_params(s), s);
        emit(certify_record(&format!("seed{s}"), &inst, kmax, s)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(n: usize, m: usize, d: usize, seed: u64, weighted: bool) -> Result<ExitCode, Failure> {
    if n == 0 || m == 0 || d == 0 {
        return Err(Failure {
            kind: "UsageError",
            message: "n, m and d must be positive".into(),
        });
    }
    let params = if weighted {
        GenParams::weighted(n, m, d)
    } else {
        GenParams::unweighted(n, m, d)
    };
    emit(serialize_instance(&generate_instance(&params, seed)).trim_end());
    Ok(ExitCode::SUCCESS)
}

fn cvc_output(red: &CvcReduction) -> Value {
    let mut out: Value =
        serde_json::from_str(&serialize_instance(&red.inst)).expect("instance JSON");
    out["k"] = json!(red.k);
    out["weight_budget"] = json!(red.weight_budget);
    out
}

struct ReduceArgs {
    alpha: Ratio<u64>,
    beta: Ratio<u64>,
    r: Option<usize>,
    seed: u64,
    q: Option<u64>,
}

fn reduce(kind: ReduceKind, input: &Path, a: ReduceArgs) -> Result<ExitCode, Failure> {
    let text = read(input)?;
    let out: Value = match kind {
        ReduceKind::CspMdk => {
            serde_json::from_str(&serialize_mdk(&csp_to_mdk(&parse_csp(&text)?)?))
                .expect("mdk JSON")
        }
        ReduceKind::MdkCvc => cvc_output(&mdk_to_cvc(&parse_mdk(&text)?)?),
        ReduceKind::MdkWcvc => cvc_output(&mdk_to_wcvc(&parse_mdk(&text)?)?),
        ReduceKind::CspMdkCov => {
            let csp = parse_csp(&text)?;
            let r = match a.r {
                Some(r) => r,
                None => min_covering_r(a.alpha, a.beta)?,
            };
            let family =
                build_covering_family(csp.k(), a.alpha, a.beta, r, a.seed, COVERING_TRIALS)?
                    .ok_or_else(|| Failure {
                        kind: "NoCoveringFamily",
                        message: format!("no verified family after {COVERING_TRIALS} trials"),
                    })?;
            let red = csp_to_mdk_covering(&csp, &family, a.q, COVERING_ENUM_BUDGET)?;
            let mut out: Value = serde_json::from_str(&serialize_mdk(&red.mdk)).expect("mdk JSON");
            out["family"] = json!(family);
            out["q"] = json!(red.q);
            out
        }
    };
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Check { instance, solution } => check(&instance, &solution),
        Command::SolveExact {
            instance,
            k,
            weighted,
        } => solve_exact_cmd(&instance, k, weighted),
        Command::SolveApprox {
            instance,
            k,
            epsilon,
            mode,
            seed,
            budget,
            overrides,
        } => solve_approx_cmd(
            &instance,
            ApproxArgs {
                k,
                epsilon,
                mode,
                seed,
                budget,
                overrides,
            },
        ),
        Command::Certify { instance, k, seed } => certify(&instance, k, seed),
        Command::Gen {
            n,
            m,
            d,
            seed,
            weighted,
        } => gen(n, m, d, seed, weighted),
        Command::Reduce {
            kind,
            input,
            alpha,
            beta,
            r,
            seed,
            q,
        } => reduce(
            kind,
            &input,
            ReduceArgs {
                alpha,
                beta,
                r,
                seed,
                q,
            },
        ),
        Command::Bench {
            corpus_seed,
            count,
            kmax,
        } => bench(corpus_seed, count, kmax),
    }
}

fn fail(f: Failure) -> ExitCode {
    print_json(&json!({"error": {"kind": f.kind, "message": f.message}}));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            let first = e.to_string().lines().next().unwrap_or_default().to_owned();
            let message = first.trim_start_matches("error: ").to_owned();
            return fail(Failure {
                kind: "UsageError",
                message,
            });
        }
    };
    run(cli).unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        fail(f)
    })
}
