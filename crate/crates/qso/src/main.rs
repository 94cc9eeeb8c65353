use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qso::cf_engine::{
    fixed_point_residual, iterate_cf, kernel_limit_cf, stable_limit_check, verify_tail_bound,
    CFGrid, IterateSpec, TailBoundParams,
};
use qso::config::{
    parse_dist, parse_grid, parse_iterations, parse_log_base, read_samples_csv, CommandConfig,
    GridSpec, Manifest,
};
use qso::figures::{replicate_figures, FigureOptions};
use qso::io;
use qso::samplers::{
    draw_approx, draw_approx_collapsed, draw_exact_with_guard, evolve_population, truncation_depth,
    PopulationOptions, TruncationBudget, EXACT_DEPTH_GUARD,
};
use qso::{analysis, QsoError, RandomStream, Result};

const DEFAULT_SEED: u64 = 42;

/// Simulation and verification of a quadratic trait-inheritance model:
/// characteristic-function iterates, exact and approximate sampling,
/// fixed-point and tail-bound checks.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Master RNG seed (env QSO_SEED takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cap on the worker thread count (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory for data files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Replay a previous run from its manifest JSON; any subcommand given
    /// alongside is rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct GridArg {
    /// Evaluation grid as delta:half_points (symmetric around 0).
    #[arg(long)]
    grid: String,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a population of mid-parent children through n generations.
    SimulatePopulation {
        /// Initial trait distribution, family:params.
        #[arg(long)]
        f: String,
        /// Perturbation kernel distribution, family:params.
        #[arg(long)]
        g: String,
        /// Population size (at least 2).
        #[arg(long)]
        k: usize,
        /// Number of generations.
        #[arg(long)]
        n: u32,
        /// Redraw the second parent until it differs from the first.
        #[arg(long)]
        forbid_self_pairing: bool,
    },
    /// Draw exactly-distributed iterate values (cost 2^n draws per value).
    DrawExact {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        count: usize,
        /// Raise the feasibility guard on n (default 26).
        #[arg(long)]
        guard_override: Option<u32>,
    },
    /// Draw approximate iterate values via the truncated perturbation sum.
    DrawApprox {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "0.05")]
        alpha: f64,
        #[arg(long, default_value = "0.01")]
        delta: f64,
        /// Iteration count, a number or 'inf'.
        #[arg(long, default_value = "inf")]
        n: String,
        /// Log base of the depth formula: natural or base2.
        #[arg(long, default_value = "natural")]
        log: String,
        /// Divide alpha by this population size (union bound).
        #[arg(long)]
        bonferroni: Option<u64>,
        #[arg(long)]
        count: usize,
        /// Draw each level average in one step (convolution-closed kernels
        /// only; same law, cost N instead of 2^N per value).
        #[arg(long)]
        collapse: bool,
    },
    /// Print the truncation depth N(alpha, delta, n).
    Depth {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        /// Seed (initial trait) variance.
        #[arg(long)]
        vf: f64,
        /// Kernel variance.
        #[arg(long)]
        vg: f64,
        #[arg(long, default_value = "inf")]
        n: String,
        #[arg(long, default_value = "natural")]
        log: String,
        #[arg(long)]
        bonferroni: Option<u64>,
    },
    /// Evaluate the iterate characteristic function on a grid.
    CfIterate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Evaluate the infinite-depth perturbation-limit CF on a grid.
    CfLimit {
        #[arg(long)]
        g: String,
        #[command(flatten)]
        grid: GridArg,
        #[arg(long, default_value = "96")]
        depth_cap: u32,
        #[arg(long, default_value = "1e-12")]
        tol: f64,
        /// Tail bound amplitude A in |ln phi_G(s)| <= A |s|^p.
        #[arg(long)]
        tail_a: Option<f64>,
        /// Tail bound power p.
        #[arg(long)]
        tail_p: Option<f64>,
    },
    /// Sup-residual of the limit-law functional equation for a candidate CF.
    FixedPoint {
        /// Candidate limit distribution, family:params.
        #[arg(long)]
        candidate: String,
        /// Perturbation kernel, family:params.
        #[arg(long)]
        kernel: String,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Check the log-CF tail bound |ln phi_G(s)| <= A |s|^p on a grid.
    TailCheck {
        #[arg(long)]
        g: String,
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        power: f64,
        #[arg(long)]
        smax: f64,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Sup-error of (phi(s/n))^n against the heavy-tail Cauchy limit.
    StableLimit {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        tail_constant: f64,
        /// Comma-separated list of n values.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Two-sample comparison (KS statistic and summaries) of two value CSVs.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Re-run the three published simulation experiments and compare means.
    ReplicateFigures {
        /// Population / sample size per panel.
        #[arg(long, default_value = "10000")]
        k: usize,
        /// Use the explicit level-by-level sampler for the Bonferroni run.
        #[arg(long)]
        no_collapse: bool,
        /// Comma-separated figure numbers (default: all three).
        #[arg(long)]
        figures: Option<String>,
    },
}

fn to_config(cmd: Command) -> Result<CommandConfig> {
    Ok(match cmd {
        Command::SimulatePopulation {
            f,
            g,
            k,
            n,
            forbid_self_pairing,
        } => CommandConfig::SimulatePopulation {
            seed_dist: parse_dist(&f)?,
            kernel: parse_dist(&g)?,
            population: k,
            generations: n,
            forbid_self_pairing,
        },
        Command::DrawExact {
            f,
            g,
            n,
            count,
            guard_override,
        } => CommandConfig::DrawExact {
            seed_dist: parse_dist(&f)?,
            kernel: parse_dist(&g)?,
            iterations: n,
            count,
            guard_override,
        },
        Command::DrawApprox {
            f,
            g,
            alpha,
            delta,
            n,
            log,
            bonferroni,
            count,
            collapse,
        } => CommandConfig::DrawApprox {
            seed_dist: parse_dist(&f)?,
            kernel: parse_dist(&g)?,
            alpha,
            delta,
            iterations: parse_iterations(&n)?,
            log_base: parse_log_base(&log)?,
            bonferroni_k: bonferroni,
            count,
            collapse,
        },
        Command::Depth {
            alpha,
            delta,
            vf,
            vg,
            n,
            log,
            bonferroni,
        } => CommandConfig::Depth {
            alpha,
            delta,
            seed_variance: vf,
            kernel_variance: vg,
            iterations: parse_iterations(&n)?,
            log_base: parse_log_base(&log)?,
            bonferroni_k: bonferroni,
        },
        Command::CfIterate { f, g, n, grid } => CommandConfig::CfIterate {
            seed_dist: parse_dist(&f)?,
            kernel: parse_dist(&g)?,
            iterations: n,
            grid: parse_grid(&grid.grid)?,
        },
        Command::CfLimit {
            g,
            grid,
            depth_cap,
            tol,
            tail_a,
            tail_p,
        } => CommandConfig::CfLimit {
            kernel: parse_dist(&g)?,
            grid: parse_grid(&grid.grid)?,
            depth_cap,
            tol,
            tail_amplitude: tail_a,
            tail_power: tail_p,
        },
        Command::FixedPoint {
            candidate,
            kernel,
            grid,
        } => CommandConfig::FixedPoint {
            candidate: parse_dist(&candidate)?,
            kernel: parse_dist(&kernel)?,
            grid: parse_grid(&grid.grid)?,
        },
        Command::TailCheck {
            g,
            amplitude,
            power,
            smax,
            grid,
        } => CommandConfig::TailCheck {
            kernel: parse_dist(&g)?,
            amplitude,
            power,
            s_max: smax,
            grid: parse_grid(&grid.grid)?,
        },
        Command::StableLimit {
            dist,
            tail_constant,
            n,
            grid,
        } => CommandConfig::StableLimit {
            dist: parse_dist(&dist)?,
            tail_constant,
            n_values: n
                .split(',')
                .map(|p| {
                    p.trim().parse::<u64>().map_err(|_| {
                        QsoError::InvalidSpec(format!("bad n value {p:?} in {n:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            grid: parse_grid(&grid.grid)?,
        },
        Command::Compare { a, b } => CommandConfig::Compare {
            a: a.display().to_string(),
            b: b.display().to_string(),
        },
        Command::ReplicateFigures {
            k,
            no_collapse,
            figures,
        } => CommandConfig::ReplicateFigures {
            population: k,
            no_collapse,
            figures: match figures {
                None => vec![],
                Some(text) => text
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<u8>()
                            .ok()
                            .filter(|f| (1..=3).contains(f))
                            .ok_or_else(|| {
                                QsoError::InvalidSpec(format!("figures must be among 1,2,3; got {text:?}"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()?,
            },
        },
    })
}

fn grid_points(grid: &GridSpec) -> Vec<f64> {
    grid.points()
}

fn write_samples_with_summary(out: &Path, values: &[f64]) -> Result<()> {
    io::write_text(&out.join("samples.csv"), &io::samples_csv(values))?;
    let summary = analysis::summarize(values)?;
    let text = io::to_json_pretty(&summary)?;
    io::write_text(&out.join("summary.json"), &text)?;
    print!("{text}");
    Ok(())
}

fn execute(cmd: &CommandConfig, master_seed: u64, out: &Path) -> Result<()> {
    let stream = RandomStream::root(master_seed);
    match cmd {
        CommandConfig::SimulatePopulation {
            seed_dist,
            kernel,
            population,
            generations,
            forbid_self_pairing,
        } => {
            let states = evolve_population(
                seed_dist,
                kernel,
                *population,
                *generations,
                &stream,
                &PopulationOptions {
                    forbid_self_pairing: *forbid_self_pairing,
                },
            )?;
            io::write_text(&out.join("population.csv"), &io::population_csv(&states))?;
            let final_summary = analysis::summarize(&states.last().unwrap().values)?;
            let text = io::to_json_pretty(&final_summary)?;
            io::write_text(&out.join("summary.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::DrawExact {
            seed_dist,
            kernel,
            iterations,
            count,
            guard_override,
        } => {
            let spec = IterateSpec {
                seed: seed_dist.clone(),
                kernel: kernel.clone(),
                n: *iterations,
            };
            let guard = Some(guard_override.unwrap_or(EXACT_DEPTH_GUARD));
            let values = draw_exact_with_guard(&spec, *count, &stream, guard)?;
            write_samples_with_summary(out, &values)?;
        }
        CommandConfig::DrawApprox {
            seed_dist,
            kernel,
            alpha,
            delta,
            iterations,
            log_base,
            bonferroni_k,
            count,
            collapse,
        } => {
            let moments = seed_dist.moments();
            let Some(seed_variance) = moments.variance.finite() else {
                return Err(QsoError::BudgetInapplicable(format!(
                    "seed {seed_dist:?} has infinite variance"
                )));
            };
            let kernel_variance = kernel.moments().variance.finite().ok_or_else(|| {
                QsoError::BudgetInapplicable(format!("kernel {kernel:?} has infinite variance"))
            })?;
            let budget = TruncationBudget {
                alpha: *alpha,
                delta: *delta,
                iterations: *iterations,
                seed_variance,
                kernel_variance,
                log_base: *log_base,
                bonferroni_k: *bonferroni_k,
            };
            let values = if *collapse {
                draw_approx_collapsed(moments.mean, kernel, &budget, *count, &stream)?
            } else {
                draw_approx(moments.mean, kernel, &budget, *count, &stream)?
            };
            write_samples_with_summary(out, &values)?;
        }
        CommandConfig::Depth {
            alpha,
            delta,
            seed_variance,
            kernel_variance,
            iterations,
            log_base,
            bonferroni_k,
        } => {
            let depth = truncation_depth(&TruncationBudget {
                alpha: *alpha,
                delta: *delta,
                iterations: *iterations,
                seed_variance: *seed_variance,
                kernel_variance: *kernel_variance,
                log_base: *log_base,
                bonferroni_k: *bonferroni_k,
            })?;
            println!("{depth}");
        }
        CommandConfig::CfIterate {
            seed_dist,
            kernel,
            iterations,
            grid,
        } => {
            let spec = IterateSpec {
                seed: seed_dist.clone(),
                kernel: kernel.clone(),
                n: *iterations,
            };
            let cf = iterate_cf(&spec, &grid_points(grid))?;
            io::write_text(&out.join("cf.csv"), &io::cf_grid_csv(&cf))?;
        }
        CommandConfig::CfLimit {
            kernel,
            grid,
            depth_cap,
            tol,
            tail_amplitude,
            tail_power,
        } => {
            let points = grid_points(grid);
            let s_max = points.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            let tail = match (tail_amplitude, tail_power) {
                (Some(a), Some(p)) => Some(TailBoundParams::new(*a, *p, s_max)?),
                (None, None) => None,
                _ => {
                    return Err(QsoError::InvalidSpec(
                        "--tail-a and --tail-p must be given together".into(),
                    ))
                }
            };
            let limit = kernel_limit_cf(kernel, &points, *depth_cap, *tol, tail.as_ref())?;
            io::write_text(&out.join("cf.csv"), &io::cf_grid_csv(&limit.grid))?;
            #[derive(serde::Serialize)]
            struct LimitReport {
                depth: u32,
                converged: bool,
                last_increment: f64,
                truncation_bound: Option<f64>,
            }
            let text = io::to_json_pretty(&LimitReport {
                depth: limit.depth,
                converged: limit.converged,
                last_increment: limit.last_increment,
                truncation_bound: limit.truncation_bound,
            })?;
            io::write_text(&out.join("limit_report.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::FixedPoint {
            candidate,
            kernel,
            grid,
        } => {
            let points = grid_points(grid);
            let cf = CFGrid::from_spec(candidate, &points)?;
            let report = fixed_point_residual(&cf, kernel)?;
            let text = io::to_json_pretty(&report)?;
            io::write_text(&out.join("fixed_point.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::TailCheck {
            kernel,
            amplitude,
            power,
            s_max,
            grid,
        } => {
            let params = TailBoundParams::new(*amplitude, *power, *s_max)?;
            let report = verify_tail_bound(kernel, &params, &grid_points(grid))?;
            let text = io::to_json_pretty(&report)?;
            io::write_text(&out.join("tail_check.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::StableLimit {
            dist,
            tail_constant,
            n_values,
            grid,
        } => {
            let rows = stable_limit_check(dist, *tail_constant, n_values, &grid_points(grid))?;
            let text = io::to_json_pretty(&rows)?;
            io::write_text(&out.join("stable_limit.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::Compare { a, b } => {
            let va = read_samples_csv(Path::new(a))?;
            let vb = read_samples_csv(Path::new(b))?;
            #[derive(serde::Serialize)]
            struct CompareReport {
                ks: analysis::KsResult,
                below_critical: bool,
                summary_a: analysis::SampleSummary,
                summary_b: analysis::SampleSummary,
            }
            let ks = analysis::ks_two_sample(&va, &vb)?;
            let report = CompareReport {
                ks,
                below_critical: ks.statistic < ks.critical_value_1pct,
                summary_a: analysis::summarize(&va)?,
                summary_b: analysis::summarize(&vb)?,
            };
            let text = io::to_json_pretty(&report)?;
            io::write_text(&out.join("compare.json"), &text)?;
            print!("{text}");
        }
        CommandConfig::ReplicateFigures {
            population,
            no_collapse,
            figures,
        } => {
            let summary = replicate_figures(
                out,
                &stream,
                &FigureOptions {
                    population: *population,
                    no_collapse: *no_collapse,
                    figures: figures.clone(),
                },
            )?;
            print!("{}", io::to_json_pretty(&summary)?);
        }
    }
    Ok(())
}

fn exit_code_for(err: &QsoError) -> u8 {
    match err {
        QsoError::NumericFailure { .. } | QsoError::NonConvergence { .. } => 3,
        _ => 2,
    }
}

fn resolve_seed(flag: Option<u64>, manifest: Option<u64>) -> Result<u64> {
    if let Ok(text) = std::env::var("QSO_SEED") {
        return text.parse::<u64>().map_err(|_| {
            QsoError::InvalidInput(format!("QSO_SEED must be an unsigned integer, got {text:?}"))
        });
    }
    Ok(flag.or(manifest).unwrap_or(DEFAULT_SEED))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| QsoError::InvalidInput(format!("thread pool: {e}")))?;
    }

    let (command, manifest_seed) = match (&cli.config, cli.command) {
        (Some(path), None) => {
            let manifest = Manifest::load(path)?;
            (manifest.command, Some(manifest.master_seed))
        }
        (Some(_), Some(_)) => {
            return Err(QsoError::InvalidInput(
                "--config replays a manifest; do not also give a subcommand".into(),
            ))
        }
        (None, Some(cmd)) => (to_config(cmd)?, None),
        (None, None) => {
            return Err(QsoError::InvalidInput(
                "a subcommand or --config is required (see --help)".into(),
            ))
        }
    };

    let master_seed = resolve_seed(cli.seed, manifest_seed)?;
    let start = Instant::now();
    execute(&command, master_seed, &cli.out)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed,
        threads: cli.threads,
        out_dir: cli.out.display().to_string(),
        command,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    io::write_text(&cli.out.join("manifest.json"), &io::to_json_pretty(&manifest)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let diag = serde_json::json!({
                "error": err.to_string(),
            });
            eprintln!("{diag}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
