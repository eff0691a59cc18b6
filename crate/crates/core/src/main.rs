use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use corrclust::io::write_atomic;
use corrclust::{
    count_mistakes, exact_cc, gen_planted, parse_clustering, parse_instance, solve, write_clustering, write_instance,
    CutSolver, DeltaParams, Error, InstanceSpec, PipelineConfig, Result, RunReport, SolverChoice,
};

#[derive(Parser)]
#[command(name = "corrclust", version, about = "Correlation clustering with missing pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompleteArg {
    Pivot,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutArg {
    Isolating,
    Exact,
}

#[derive(clap::Args, Clone)]
struct SolveArgs {
    /// δ as a fraction `a/b`, within (0, 1/5].
    #[arg(long, default_value = "1/65")]
    delta: String,
    #[arg(long, default_value_t = 6)]
    max_k: usize,
    #[arg(long, value_enum, default_value_t = CompleteArg::Pivot)]
    complete_solver: CompleteArg,
    #[arg(long, value_enum, default_value_t = CutArg::Isolating)]
    cut_solver: CutArg,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 4096)]
    enum_max_subsets: usize,
    /// Largest subset tried once enumeration is truncated (default 2|B|).
    #[arg(long)]
    enum_max_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolveArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let complete_solver = match self.complete_solver {
            CompleteArg::Pivot => SolverChoice::pivot(self.repeats),
            CompleteArg::Exact => SolverChoice::exact(),
        };
        let cfg = PipelineConfig {
            delta: self.delta.parse::<DeltaParams>()?,
            complete_solver,
            cut_solver: match self.cut_solver {
                CutArg::Isolating => CutSolver::Isolating,
                CutArg::Exact => CutSolver::Exact,
            },
            enum_max_subsets: self.enum_max_subsets,
            enum_max_size: self.enum_max_size,
            max_k: self.max_k,
            seed: self.seed,
            ..PipelineConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the approximation pipeline on one instance.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        /// Also compute the exact optimum when n is at most this value.
        #[arg(long)]
        with_exact: Option<usize>,
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Write the clustering in the clustering-file format.
        #[arg(long)]
        clustering_out: Option<PathBuf>,
    },
    /// Exhaustive optimum for a small instance.
    Exact {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = corrclust::EXACT_CAP)]
        max_n: usize,
    },
    /// Write a planted instance and its ground truth (`<out>.truth`).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        bad_k: usize,
        #[arg(long)]
        clusters: usize,
        #[arg(long, default_value_t = 0.0)]
        flip_prob: f64,
        #[arg(long, default_value_t = 0.0)]
        missing_frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count the mistakes of a clustering file.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
    },
    /// Solve every instance in a directory and compare with the exact optimum.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        #[arg(long, default_value_t = corrclust::EXACT_CAP)]
        exact_max_n: usize,
        #[arg(long)]
        json_out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<corrclust::SignedGraph> {
    parse_instance(&read(path)?).map_err(|e| e.with_context(&path.display().to_string()))
}

#[derive(Serialize)]
struct BenchEntry {
    file: String,
    n: usize,
    k: usize,
    mistakes: usize,
    exact_opt: Option<usize>,
    ratio: Option<f64>,
    truncated: bool,
}

#[derive(Serialize)]
struct BenchReport {
    instances: usize,
    with_exact: usize,
    mean_ratio: Option<f64>,
    max_ratio: Option<f64>,
    entries: Vec<BenchEntry>,
}

fn bench_one(path: &Path, cfg: &PipelineConfig, exact_max_n: usize) -> Result<BenchEntry> {
    let g = load(path)?;
    let mut report = solve(&g, cfg)?;
    if g.n() <= exact_max_n {
        let opt = exact_cc(&g, exact_max_n)?;
        report.set_exact_opt(count_mistakes(&g, &opt)?.total);
    }
    Ok(BenchEntry {
        file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        n: report.n,
        k: report.k,
        mistakes: report.mistakes.total,
        exact_opt: report.exact_opt,
        ratio: report.ratio,
        truncated: report.truncated,
    })
}

fn bench(suite: &Path, cfg: &PipelineConfig, exact_max_n: usize) -> Result<BenchReport> {
    let mut files: Vec<PathBuf> = fs::read_dir(suite)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_none_or(|x| x != "truth" && x != "json"))
        .collect();
    files.sort();
    let entries = files
        .par_iter()
        .map(|p| bench_one(p, cfg, exact_max_n))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = entries.iter().filter_map(|e| e.ratio).collect();
    let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let max_ratio = ratios.iter().copied().reduce(f64::max);
    Ok(BenchReport {
        instances: entries.len(),
        with_exact: ratios.len(),
        mean_ratio,
        max_ratio,
        entries,
    })
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit(report: &RunReport, json_out: Option<&Path>) -> Result<()> {
    let json = report.to_json()?;
    match json_out {
        Some(p) => write_atomic(p, &json),
        None => print_out(&format!("{json}\n")),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            input,
            opts,
            with_exact,
            json_out,
            clustering_out,
        } => {
            let cfg = opts.config()?;
            let g = load(&input)?;
            let mut report = solve(&g, &cfg)?;
            if let Some(cap) = with_exact.filter(|&cap| g.n() <= cap) {
                let opt = exact_cc(&g, cap)?;
                report.set_exact_opt(count_mistakes(&g, &opt)?.total);
            }
            if let Some(p) = clustering_out {
                write_atomic(&p, &write_clustering(&report.clustering))?;
            }
            emit(&report, json_out.as_deref())
        }
        Command::Exact { input, max_n } => {
            let g = load(&input)?;
            let c = exact_cc(&g, max_n)?;
            let m = count_mistakes(&g, &c)?;
            print_out(&write_clustering(&c))?;
            eprintln!("mistakes {} (positive {}, negative {})", m.total, m.positive_mistakes, m.negative_mistakes);
            Ok(())
        }
        Command::Gen {
            n,
            bad_k,
            clusters,
            flip_prob,
            missing_frac,
            seed,
            out,
        } => {
            let planted = gen_planted(&InstanceSpec {
                n,
                k_bad: bad_k,
                num_clusters: clusters,
                flip_prob,
                missing_frac,
                seed,
            })?;
            write_atomic(&out, &write_instance(&planted.graph))?;
            let mut truth = out.clone().into_os_string();
            truth.push(".truth");
            write_atomic(Path::new(&truth), &write_clustering(&planted.ground_truth))
        }
        Command::Check { input, clustering } => {
            let g = load(&input)?;
            let c = parse_clustering(&read(&clustering)?, g.n())
                .map_err(|e| e.with_context(&clustering.display().to_string()))?;
            let m = count_mistakes(&g, &c)?;
            print_out(&format!("{}\n", serde_json::to_string(&m)?))
        }
        Command::Bench {
            suite,
            opts,
            exact_max_n,
            json_out,
        } => {
            let cfg = opts.config()?;
            let report = bench(&suite, &cfg, exact_max_n)?;
            write_atomic(&json_out, &serde_json::to_string_pretty(&report)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
