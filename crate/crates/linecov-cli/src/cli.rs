//! The `linecov` command line: the `bench` comparison harness and a
//! dataset-driven `predict` subcommand.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linecov::bench::{histogram, summarize, BenchRecord, SetSpec, SummaryRow};
use linecov::double_integral::DegeneracyPolicy;
use linecov::gp::gp_predict;
use linecov::kernel::ScalingMatrix;

use crate::dataset::{read_line_dataset, read_points};
use crate::harness::{parse_method, run_benchmark};

#[derive(Parser)]
#[command(name = "linecov", version, about = "Line-integral covariance toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the double-integral methods on the generated benchmark sets
    Bench(BenchArgs),
    /// GP posterior prediction from a line dataset file
    Predict(PredictArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated set ids from 1..=8
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    sets: Vec<u8>,
    /// Pairs per set
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    /// Input dimension m
    #[arg(long, default_value_t = 6)]
    dim: usize,
    /// Root seed of the set generator
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated methods: proposed, bivariate, simpson<p>
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "proposed,bivariate,simpson10,simpson100,simpson200"
    )]
    methods: Vec<String>,
    /// Timed repeats per pair and method (median is reported)
    #[arg(long, default_value_t = 11)]
    repeats: u32,
    /// Threshold on ||V w|| for the point-measurement branches
    #[arg(long, default_value_t = linecov::DEFAULT_EPS_W)]
    eps_w: f64,
    /// Relative threshold on |ac - b^2| for the bivariate colinear branch
    #[arg(long, default_value_t = linecov::DEFAULT_EPS_DET)]
    eps_det: f64,
    /// Bins of the per-(set, method) error histograms
    #[arg(long, default_value_t = 30)]
    bins: usize,
    /// Output directory for summary.csv, records.csv and hist_*.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Dataset file: `m sigma_n` header, then rows `p[0..m) w[0..m) y`
    #[arg(long)]
    data: PathBuf,
    /// Test points file, m columns per row
    #[arg(long)]
    points: PathBuf,
    /// Double-integral method for the covariance matrix
    #[arg(long, default_value = "proposed")]
    method: String,
    #[arg(long, default_value_t = linecov::DEFAULT_EPS_W)]
    eps_w: f64,
    #[arg(long, default_value_t = linecov::DEFAULT_EPS_DET)]
    eps_det: f64,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse arguments, run, and translate failures into exit codes: 2 for
/// usage or evaluation errors, 1 when any reference integration hit its
/// depth cap.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Predict(args) => predict(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn bench(args: BenchArgs) -> Result<ExitCode, AnyError> {
    let specs = args
        .sets
        .iter()
        .map(|&id| SetSpec::new(id, args.pairs, args.dim, args.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let methods = args
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<Vec<_>, _>>()?;
    let policy = DegeneracyPolicy::new(args.eps_w, args.eps_det)?;

    let outcome = run_benchmark(&specs, &methods, &policy, args.repeats)?;
    let (rows, grand) = summarize(&outcome.records);

    fs::create_dir_all(&args.out)?;
    write_records(&args.out.join("records.csv"), &outcome.records)?;
    write_summary(&args.out.join("summary.csv"), &rows)?;
    for spec in &specs {
        for method in &args.methods {
            let hist = match histogram(&outcome.records, spec.set_id, method, args.bins) {
                Ok(h) => h,
                Err(_) => continue, // no records for this slice (all depth-capped)
            };
            let path = args
                .out
                .join(format!("hist_{}_{}.csv", spec.set_id, method));
            let mut f = fs::File::create(path)?;
            writeln!(f, "bin_lo_log10,bin_hi_log10,count")?;
            if hist.underflow > 0 {
                writeln!(f, "-inf,-inf,{}", hist.underflow)?;
            }
            for (lo, hi, count) in &hist.bins {
                writeln!(f, "{lo},{hi},{count}")?;
            }
        }
    }

    print_table(&rows, &grand);
    if !outcome.depth_capped.is_empty() {
        eprintln!(
            "warning: reference integrator hit its depth cap on {} pair(s): {:?}",
            outcome.depth_capped.len(),
            outcome.depth_capped
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_records(path: &PathBuf, records: &[BenchRecord]) -> Result<(), AnyError> {
    let mut f = fs::File::create(path)?;
    writeln!(
        f,
        "set_id,pair_index,method,value,oracle,signed_error,elapsed_s"
    )?;
    for r in records {
        writeln!(
            f,
            "{},{},{},{:e},{:e},{:e},{:e}",
            r.set_id, r.pair_index, r.method, r.value, r.oracle, r.signed_error, r.elapsed_s
        )?;
    }
    Ok(())
}

fn write_summary(path: &PathBuf, rows: &[SummaryRow]) -> Result<(), AnyError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "set_id,method,mean_abs_error,max_abs_error,mean_time_s")?;
    for r in rows {
        writeln!(
            f,
            "{},{},{:e},{:e},{:e}",
            r.set_id, r.method, r.mean_abs_error, r.max_abs_error, r.mean_time_s
        )?;
    }
    Ok(())
}

fn print_table(rows: &[SummaryRow], grand: &[(String, f64)]) {
    println!(
        "{:<6} {:<12} {:>14} {:>14} {:>12}",
        "set", "method", "mean|err|", "max|err|", "mean time"
    );
    for r in rows {
        println!(
            "{:<6} {:<12} {:>14.3e} {:>14.3e} {:>10.3e} s",
            r.set_id, r.method, r.mean_abs_error, r.max_abs_error, r.mean_time_s
        );
    }
    println!();
    println!("{:<12} {:>12}", "method", "grand mean");
    for (method, time) in grand {
        println!("{:<12} {:>10.3e} s", method, time);
    }
}

fn predict(args: PredictArgs) -> Result<ExitCode, AnyError> {
    let data = read_line_dataset(&args.data)?;
    let points = read_points(&args.points, data.dim())?;
    let method = parse_method(&args.method)?;
    let policy = DegeneracyPolicy::new(args.eps_w, args.eps_det)?;
    let scaling = ScalingMatrix::identity(data.dim());

    let posterior = gp_predict(&data, &points, &scaling, method, &policy)?;

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    let coord_header: Vec<String> = (0..data.dim()).map(|k| format!("z{k}")).collect();
    writeln!(out, "{},mean,variance", coord_header.join(","))?;
    for (point, (mean, var)) in points
        .iter()
        .zip(posterior.mean.iter().zip(&posterior.variance))
    {
        let coords: Vec<String> = point.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{},{},{}", coords.join(","), mean, var)?;
    }
    Ok(ExitCode::SUCCESS)
}
