//! `quatkrylov bench` and `quatkrylov reproduce`: solver comparison suites.

use crate::common::thread_cap;
use anyhow::{Context, Result};
use quatkrylov_core::imaging::{build_signal_system, piecewise_filter, synthetic_rgb_signal};
use quatkrylov_core::instances::{
    random_qvector, sparse_surrogate, toeplitz_dominant, unit_solution_rhs,
};
use quatkrylov_core::krylov::{
    fqgmres, jacobi_sqrt_residual, qgmres, qgmres_left, qgmres_right, sgs_preconditioner,
    SolveReport, SolverConfig, SqrtResidualPreconditioner,
};
use quatkrylov_core::realrep::{embed_block_counterpart, embed_block_vector};
use quatkrylov_core::tv::{qtv_fqgmres, DifferenceStack, QtvConfig};

use std::io::Write;
use std::process::ExitCode;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    #[value(name = "precond-table")]
    PrecondTable,
    #[value(name = "sparse-table")]
    SparseTable,
    #[value(name = "signal-table")]
    SignalTable,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Markdown,
    Csv,
}

#[derive(clap::Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Problem size (system order, or signal length for the signal suite).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of random seeds to average over.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Relative residual threshold.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Iteration cap per solve.
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Markdown)]
    pub format: TableFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct ReproduceArgs {
    /// Shrink problem sizes for a quick pass.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Clone, Debug)]
struct BenchRow {
    algorithm: &'static str,
    iterations: f64,
    seconds: f64,
    residual: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn aggregate(algorithm: &'static str, reports: &[SolveReport]) -> BenchRow {
    BenchRow {
        algorithm,
        iterations: mean(
            &reports
                .iter()
                .map(|r| r.iterations as f64)
                .collect::<Vec<_>>(),
        ),
        seconds: mean(&reports.iter().map(|r| r.wall_time).collect::<Vec<_>>()),
        residual: mean(
            &reports
                .iter()
                .map(|r| r.final_relative_residual())
                .collect::<Vec<_>>(),
        ),
    }
}

/// Runs `job` for every seed, at most `thread_cap()` at a time.
fn run_seeds<F>(seeds: u64, job: F) -> Result<Vec<Vec<SolveReport>>>
where
    F: Fn(u64) -> Result<Vec<SolveReport>> + Sync,
{
    let job = &job;
    let cap = thread_cap().max(1);
    let mut out: Vec<Option<Vec<SolveReport>>> = (0..seeds).map(|_| None).collect();
    let mut next = 0u64;
    while next < seeds {
        let batch: Vec<u64> = (next..seeds.min(next + cap as u64)).collect();
        let results: Vec<(u64, Result<Vec<SolveReport>>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&seed| scope.spawn(move || (seed, job(seed))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker"))
                .collect()
        });
        for (seed, res) in results {
            out[seed as usize] = Some(res?);
        }
        next += cap as u64;
    }
    Ok(out.into_iter().map(|o| o.expect("all seeds ran")).collect())
}

fn transpose_reports(per_seed: Vec<Vec<SolveReport>>) -> Vec<Vec<SolveReport>> {
    let algos = per_seed[0].len();
    let mut out: Vec<Vec<SolveReport>> = (0..algos).map(|_| Vec::new()).collect();
    for seed_reports in per_seed {
        for (i, rep) in seed_reports.into_iter().enumerate() {
            out[i].push(rep);
        }
    }
    out
}

/// Dense dominant systems: plain vs SGS-preconditioned variants, with the
/// real-counterpart baseline in the first row.
fn precond_suite(n: usize, seeds: u64, cfg: &SolverConfig) -> Result<Vec<BenchRow>> {
    let per_seed = run_seeds(seeds, |seed| {
        let a = toeplitz_dominant(n, 0.1, 1.5, seed);
        let b = random_qvector(n, seed ^ 0x5eed);
        let emb = embed_block_counterpart(&a);
        let eb = embed_block_vector(&b);
        let p = sgs_preconditioner(&a)?;
        Ok(vec![
            qgmres(&emb, &eb, None, cfg)?,
            qgmres(&a, &b, None, cfg)?,
            qgmres_left(&a, &b, None, &p, cfg)?,
            qgmres_right(&a, &b, None, &p, cfg)?,
        ])
    })?;
    let by_algo = transpose_reports(per_seed);
    Ok(vec![
        aggregate("gmres", &by_algo[0]),
        aggregate("qgmres", &by_algo[1]),
        aggregate("qgmres-lp", &by_algo[2]),
        aggregate("qgmres-rp", &by_algo[3]),
    ])
}

/// Ill-scaled sparse systems: plain and flexible solvers plus their
/// real-counterpart baselines.
fn sparse_suite(n: usize, seeds: u64, cfg: &SolverConfig) -> Result<Vec<BenchRow>> {
    let per_seed = run_seeds(seeds, |seed| {
        let a = sparse_surrogate(n, 3.5, 0.05, seed.wrapping_add(1));
        let b = unit_solution_rhs(&a);
        let emb = embed_block_counterpart(&a);
        let eb = embed_block_vector(&b);
        let generic = SqrtResidualPreconditioner::with_relative_floor(0.3);
        Ok(vec![
            qgmres(&emb, &eb, None, cfg)?,
            qgmres(&a, &b, None, cfg)?,
            fqgmres(&emb, &eb, None, &generic, cfg)?,
            fqgmres(&a, &b, None, &jacobi_sqrt_residual(), cfg)?,
        ])
    })?;
    let by_algo = transpose_reports(per_seed);
    Ok(vec![
        aggregate("gmres", &by_algo[0]),
        aggregate("qgmres", &by_algo[1]),
        aggregate("irfgmres", &by_algo[2]),
        aggregate("fqgmres", &by_algo[3]),
    ])
}

/// Filter-identification systems (normal equations of the tall Toeplitz
/// system) with the TV-regularized flexible solver in the last row.
fn signal_suite(t_len: usize, seeds: u64, cfg: &SolverConfig) -> Result<Vec<BenchRow>> {
    let order = (2 * t_len / 3).saturating_sub(1);
    let per_seed = run_seeds(seeds, |seed| {
        let samples = synthetic_rgb_signal(t_len, seed.wrapping_add(1));
        let sys = build_signal_system(&samples, order)?;
        let w_true = piecewise_filter(order + 1, seed.wrapping_add(101));
        let y = sys.apply_filter(&w_true)?;
        let (gram, rhs) = sys.normal_equations(&y)?;
        let emb = embed_block_counterpart(&gram);
        let erhs = embed_block_vector(&rhs);
        let generic = SqrtResidualPreconditioner::with_relative_floor(0.3);
        let stack = DifferenceStack::signal(gram.nrows())?;
        let qcfg = QtvConfig {
            inner: cfg.clone(),
            ..Default::default()
        };
        Ok(vec![
            qgmres(&emb, &erhs, None, cfg)?,
            qgmres(&gram, &rhs, None, cfg)?,
            fqgmres(&emb, &erhs, None, &generic, cfg)?,
            qtv_fqgmres(&gram, &rhs, &stack, &qcfg)?,
        ])
    })?;
    let by_algo = transpose_reports(per_seed);
    Ok(vec![
        aggregate("gmres", &by_algo[0]),
        aggregate("qgmres", &by_algo[1]),
        aggregate("irfgmres", &by_algo[2]),
        aggregate("qtv-fqgmres", &by_algo[3]),
    ])
}

fn render(rows: &[BenchRow], format: TableFormat, title: &str) -> String {
    let mut s = String::new();
    match format {
        TableFormat::Markdown => {
            s.push_str(&format!("### {title}\n\n"));
            s.push_str("| algorithm | iterations | cpu time (s) | relative residual |\n");
            s.push_str("|---|---:|---:|---:|\n");
            for r in rows {
                s.push_str(&format!(
                    "| {} | {:.1} | {:.4} | {:.4e} |\n",
                    r.algorithm, r.iterations, r.seconds, r.residual
                ));
            }
        }
        TableFormat::Csv => {
            s.push_str("algorithm,iterations,cpu_time_s,relative_residual\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{:.1},{:.6},{:.6e}\n",
                    r.algorithm, r.iterations, r.seconds, r.residual
                ));
            }
        }
    }
    s
}

pub fn run(args: BenchArgs) -> Result<ExitCode> {
    let cfg = SolverConfig {
        tol: args.tol,
        max_iter: args.max_iter,
        restart: None,
        breakdown_tol: None,
    };
    let (rows, title) = match args.suite {
        Suite::PrecondTable => (
            precond_suite(args.n.unwrap_or(500), args.seeds, &cfg)?,
            "SGS preconditioning on dense dominant systems",
        ),
        Suite::SparseTable => (
            sparse_suite(args.n.unwrap_or(3000), args.seeds, &cfg)?,
            "Flexible solvers on ill-scaled sparse systems",
        ),
        Suite::SignalTable => (
            signal_suite(args.n.unwrap_or(150), args.seeds, &cfg)?,
            "Filter identification",
        ),
    };
    let text = render(&rows, args.format, title);
    match &args.out {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("writing table to {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// Reference iteration counts and residuals the `reproduce` command compares
/// against. Iteration counts depend on the random instances, so agreement is
/// expected at the pattern level only (orderings and magnitudes), never
/// exactly.
struct Reference {
    algorithm: &'static str,
    iterations: f64,
    residual: f64,
}

const PRECOND_REFERENCE: [Reference; 4] = [
    Reference {
        algorithm: "gmres",
        iterations: 14.0,
        residual: 7.2450e-7,
    },
    Reference {
        algorithm: "qgmres",
        iterations: 14.0,
        residual: 3.2147e-7,
    },
    Reference {
        algorithm: "qgmres-lp",
        iterations: 3.0,
        residual: 1.4067e-7,
    },
    Reference {
        algorithm: "qgmres-rp",
        iterations: 3.0,
        residual: 1.6287e-7,
    },
];

const SPARSE_REFERENCE: [Reference; 4] = [
    Reference {
        algorithm: "gmres",
        iterations: 254.0,
        residual: 9.5702e-7,
    },
    Reference {
        algorithm: "qgmres",
        iterations: 233.0,
        residual: 9.6491e-7,
    },
    Reference {
        algorithm: "irfgmres",
        iterations: 249.0,
        residual: 1.0052e-6,
    },
    Reference {
        algorithm: "fqgmres",
        iterations: 226.0,
        residual: 9.4253e-7,
    },
];

const SIGNAL_REFERENCE: [Reference; 4] = [
    Reference {
        algorithm: "gmres",
        iterations: 300.0,
        residual: 5.3672e-7,
    },
    Reference {
        algorithm: "qgmres",
        iterations: 105.0,
        residual: 2.2624e-10,
    },
    Reference {
        algorithm: "irfgmres",
        iterations: 297.0,
        residual: 8.1931e-7,
    },
    Reference {
        algorithm: "qtv-fqgmres",
        iterations: 104.0,
        residual: 4.9865e-7,
    },
];

fn print_comparison(title: &str, rows: &[BenchRow], reference: &[Reference]) {
    println!("\n### {title}\n");
    println!("| algorithm | iterations (ref) | iterations (observed) | residual (ref) | residual (observed) | match |");
    println!("|---|---:|---:|---:|---:|---|");
    for (row, re) in rows.iter().zip(reference) {
        debug_assert_eq!(row.algorithm, re.algorithm);
        println!(
            "| {} | {:.0} | {:.1} | {:.4e} | {:.4e} | pattern |",
            row.algorithm, re.iterations, row.iterations, re.residual, row.residual
        );
    }
}

pub fn run_reproduce(args: ReproduceArgs) -> Result<ExitCode> {
    let cfg = SolverConfig {
        tol: 1e-6,
        max_iter: 2000,
        restart: None,
        breakdown_tol: None,
    };
    let (n_dense, n_sparse, t_signal, seeds) = if args.fast {
        (200, 800, 90, 2)
    } else {
        (500, 3000, 150, 3)
    };

    println!("Reproduction of the three comparison tables (seeded synthetic instances;");
    println!("iteration counts match the reference values as patterns, not exactly).");

    let stdout = std::io::stdout();
    let mut lock = stdout.lock();

    let rows = precond_suite(n_dense, seeds, &cfg)?;
    print_comparison(
        &format!("SGS preconditioning (dense dominant, n = {n_dense})"),
        &rows,
        &PRECOND_REFERENCE,
    );
    let lp_fewer = rows[2].iterations < rows[1].iterations;
    let rp_fewer = rows[3].iterations < rows[1].iterations;
    writeln!(
        lock,
        "pattern check: preconditioned strictly fewer iterations than plain: {}",
        if lp_fewer && rp_fewer { "yes" } else { "NO" }
    )?;

    let rows = sparse_suite(n_sparse, seeds.min(2), &cfg)?;
    print_comparison(
        &format!("Flexible solvers (ill-scaled sparse, n = {n_sparse})"),
        &rows,
        &SPARSE_REFERENCE,
    );
    writeln!(
        lock,
        "pattern check: flexible no slower than plain + 5%: {}",
        if rows[3].iterations <= rows[1].iterations * 1.05 {
            "yes"
        } else {
            "NO"
        }
    )?;

    let rows = signal_suite(t_signal, seeds, &cfg)?;
    print_comparison(
        &format!("Filter identification (T = {t_signal})"),
        &rows,
        &SIGNAL_REFERENCE,
    );
    writeln!(
        lock,
        "pattern check: qtv-fqgmres no slower than qgmres, and the real flexible baseline >= 1.5x: {}",
        if rows[3].iterations <= rows[1].iterations
            && rows[2].iterations >= 1.5 * rows[3].iterations
        {
            "yes"
        } else {
            "NO"
        }
    )?;
    Ok(ExitCode::SUCCESS)
}
