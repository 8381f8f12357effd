use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use paraknap::fptas::{fptas_with, verify_partition, Variant};
use paraknap::generate::{generate, GenParams};
use paraknap::greedy::greedy_partition_with;
use paraknap::instance::SolutionRecord;
use paraknap::oracle::exact_profit_function;
use paraknap::par::with_threads;
use paraknap::{Error, ExecMode, ParametricInstance, PartitionFile, Rational};

#[derive(Parser)]
#[command(name = "paraknap", version, about = "Parametric-weight knapsack approximation")]
struct Cli {
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Explicit,
    Implicit,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Explicit => Variant::Explicit,
            VariantArg::Implicit => Variant::Implicit,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate the optimal profit for every λ.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, value_enum, default_value = "explicit")]
        variant: VariantArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exact optimal profit function by enumeration (n ≤ 20).
    Exact {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Partition on which the greedy ½-approximation is constant.
    Greedy {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve (or load a partition) and check the guarantee against the exact optimum.
    Verify {
        instance: PathBuf,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, value_enum, default_value = "explicit")]
        variant: VariantArg,
        /// Check this partition file instead of solving.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Replace the most profitable cell by the empty solution before checking.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        coeff_min: i64,
        #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
        coeff_max: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        profit_min: i64,
        #[arg(long, default_value_t = 20, allow_hyphen_values = true)]
        profit_max: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        w_min: i64,
        #[arg(long, default_value_t = 50, allow_hyphen_values = true)]
        w_max: i64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Time both variants sequentially and in parallel; CSV on stdout.
    Bench {
        /// Instance files; without any, `--count` instances are generated.
        instances: Vec<PathBuf>,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a partition's profit step function as `lambda,profit` CSV.
    PlotData {
        partition: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Guarantee,
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Contract(_) => Failure::Internal(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, move || run(cli.cmd)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Guarantee) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read_instance(path: &Path) -> std::result::Result<ParametricInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(ParametricInstance::from_json(&text)?)
}

fn parse_rational(s: &str) -> std::result::Result<Rational, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Internal(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct GreedyFile {
    breakpoints: Vec<Rational>,
    approx_profits: Vec<i64>,
    cells: Vec<SolutionRecord>,
    event_count: usize,
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Solve { instance, eps, variant, out } => {
            let inst = read_instance(&instance)?;
            let eps = parse_rational(&eps)?;
            let res = fptas_with(&inst, &eps, variant.into(), ExecMode::default())?;
            emit(out.as_deref(), &res.partition.to_json())
        }
        Cmd::Exact { instance, out } => {
            let inst = read_instance(&instance)?;
            emit(out.as_deref(), &exact_profit_function(&inst)?.to_json())
        }
        Cmd::Greedy { instance, out } => {
            let inst = read_instance(&instance)?;
            let g = greedy_partition_with(&inst, ExecMode::default());
            let file = GreedyFile {
                breakpoints: g.breakpoints().to_vec(),
                approx_profits: g.approx_profits(),
                cells: g.cells().iter().map(|c| c.to_record()).collect(),
                event_count: g.event_count,
            };
            emit(out.as_deref(), &serde_json::to_string_pretty(&file).expect("serializable"))
        }
        Cmd::Verify { instance, eps, variant, partition, corrupt } => {
            let inst = read_instance(&instance)?;
            let eps = parse_rational(&eps)?;
            let mut part = match partition {
                Some(p) => {
                    let text = fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                    paraknap::SolutionPartition::from_json(&text, &inst)?
                }
                None => fptas_with(&inst, &eps, variant.into(), ExecMode::default())?.partition,
            };
            if corrupt {
                if let Some(top) = (0..part.cells.len()).max_by_key(|&j| part.cells[j].profit) {
                    part.cells[top] = inst.empty_solution();
                }
            }
            let report = verify_partition(&inst, &part, &eps)?;
            println!(
                "worst_ratio {} ({:.6}) over {} samples: {}",
                report.worst_ratio,
                report.worst_ratio.to_f64(),
                report.samples,
                if report.pass { "pass" } else { "FAIL" }
            );
            if let Some(l) = &report.worst_lambda {
                println!("worst at lambda {l} (cell {})", report.max_gap_cell.unwrap_or(0));
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Guarantee)
            }
        }
        Cmd::Gen { n, seed, coeff_min, coeff_max, profit_min, profit_max, w_min, w_max, out } => {
            let params = GenParams {
                n,
                coeff: (coeff_min, coeff_max),
                profit: (profit_min, profit_max),
                capacity: (w_min, w_max),
                seed,
            };
            emit(out.as_deref(), &generate(&params)?.to_json())
        }
        Cmd::Bench { instances, eps, n, count, seed } => {
            let eps = parse_rational(&eps)?;
            let mut named = Vec::new();
            for p in &instances {
                named.push((p.display().to_string(), read_instance(p)?));
            }
            if instances.is_empty() {
                for s in seed..seed + count {
                    named.push((format!("gen-n{n}-s{s}"), generate(&GenParams::small(n, s))?));
                }
            }
            println!("instance,n,variant,mode,eps,seconds,cells,candidates");
            for (name, inst) in &named {
                for variant in [Variant::Explicit, Variant::Implicit] {
                    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
                        let t = Instant::now();
                        let res = fptas_with(inst, &eps, variant, mode)?;
                        println!(
                            "{name},{},{},{},{eps},{:.6},{},{}",
                            inst.len(),
                            match variant {
                                Variant::Explicit => "explicit",
                                Variant::Implicit => "implicit",
                            },
                            match mode.effective() {
                                ExecMode::Sequential => "sequential",
                                ExecMode::Parallel => "parallel",
                            },
                            t.elapsed().as_secs_f64(),
                            res.partition.cells.len(),
                            res.candidates
                        );
                    }
                }
            }
            Ok(())
        }
        Cmd::PlotData { partition, lambda_min, lambda_max, samples, out } => {
            let lo = parse_rational(&lambda_min)?;
            let hi = parse_rational(&lambda_max)?;
            if lo >= hi {
                return Err(Failure::Usage(format!("empty range [{lo}, {hi}]")));
            }
            let text = fs::read_to_string(&partition)
                .map_err(|e| Failure::Usage(format!("{}: {e}", partition.display())))?;
            let file: PartitionFile = serde_json::from_str(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            file.check_shape()?;
            emit(out.as_deref(), &plot_rows(&file, &lo, &hi, samples))
        }
    }
}

/// Uniform samples over `[lo, hi]` plus a pair of rows just either side of
/// every breakpoint in range.
fn plot_rows(file: &PartitionFile, lo: &Rational, hi: &Rational, samples: usize) -> String {
    let width = hi - lo;
    let h = &width / &Rational::from_integer(1_000_000);
    let mut pts: Vec<Rational> = match samples {
        0 => Vec::new(),
        1 => vec![lo.clone()],
        s => (0..s).map(|i| lo + &(&width * &Rational::new(i as i64, (s - 1) as i64))).collect(),
    };
    for b in file.breakpoints.iter().filter(|b| lo < *b && *b < hi) {
        pts.push(b - &h);
        pts.push(b + &h);
    }
    pts.sort();
    pts.dedup();
    let mut out = String::from("lambda,profit");
    for x in &pts {
        out.push_str(&format!("\n{},{}", x.to_f64(), file.profit_at(x)));
    }
    out
}
