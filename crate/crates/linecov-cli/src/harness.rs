//! Timed benchmark runs: per-pair reference values, per-method signed
//! errors, and median-of-repeats wall times.

use std::hint::black_box;
use std::time::Instant;

use linecov::bench::{generate_set, BenchRecord, PairSample, SetSpec};
use linecov::double_integral::{
    evaluate, reference_double_integral, DegeneracyPolicy, MethodChoice,
};
use linecov::quadrature::Tolerance;
use linecov::{Error, Result};

/// CSV / table label of a method.
pub fn method_label(method: MethodChoice) -> String {
    match method {
        MethodChoice::Proposed => "proposed".to_string(),
        MethodChoice::Bivariate => "bivariate".to_string(),
        MethodChoice::Simpson(p) => format!("simpson{p}"),
    }
}

/// Parse a method label: `proposed`, `bivariate`, or `simpson<p>`.
pub fn parse_method(label: &str) -> Result<MethodChoice> {
    match label {
        "proposed" => Ok(MethodChoice::Proposed),
        "bivariate" => Ok(MethodChoice::Bivariate),
        _ => {
            let p = label
                .strip_prefix("simpson")
                .and_then(|p| p.parse::<u32>().ok())
                .filter(|&p| p >= 1)
                .ok_or(Error::InvalidArgument(
                    "method must be proposed, bivariate, or simpson<p> with p >= 1",
                ))?;
            Ok(MethodChoice::Simpson(p))
        }
    }
}

/// A full benchmark outcome: the per-pair records plus the pairs whose
/// reference integration hit the subdivision depth cap (excluded from the
/// records and reported separately).
#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub depth_capped: Vec<(u8, usize)>,
}

/// A method evaluation for benchmarking purposes: a quadrature tolerance
/// failure still carries a usable value.
fn eval_value(pair: &PairSample, method: MethodChoice, policy: &DegeneracyPolicy) -> Result<f64> {
    match evaluate(&pair.line_i, &pair.line_j, &pair.scaling, method, policy) {
        Ok(v) => Ok(v),
        Err(Error::ToleranceNotReached(r)) => Ok(r.value),
        Err(e) => Err(e),
    }
}

/// Run every method over every generated pair of every set.
///
/// Per pair the reference value is computed once; per method the value and
/// signed error are recorded together with the median of `repeats` timed
/// evaluations after one warmup. Timed evaluations run strictly
/// single-threaded on the calling thread.
pub fn run_benchmark(
    specs: &[SetSpec],
    methods: &[MethodChoice],
    policy: &DegeneracyPolicy,
    repeats: u32,
) -> Result<BenchOutcome> {
    if repeats < 1 {
        return Err(Error::InvalidArgument("repeats must be >= 1"));
    }
    let mut records = Vec::new();
    let mut depth_capped = Vec::new();

    for spec in specs {
        let pairs = generate_set(spec)?;
        for (pair_index, pair) in pairs.iter().enumerate() {
            let oracle = match reference_double_integral(
                &pair.line_i,
                &pair.line_j,
                &pair.scaling,
                Tolerance::oracle(),
            ) {
                Ok(v) => v,
                Err(Error::DepthCapReached(_)) => {
                    depth_capped.push((spec.set_id, pair_index));
                    continue;
                }
                Err(e) => return Err(e),
            };

            for &method in methods {
                let value = eval_value(pair, method, policy)?;
                let elapsed_s = time_evaluation(pair, method, policy, repeats)?;
                records.push(BenchRecord {
                    set_id: spec.set_id,
                    pair_index,
                    method: method_label(method),
                    value,
                    oracle,
                    signed_error: value - oracle,
                    elapsed_s,
                });
            }
        }
    }
    Ok(BenchOutcome {
        records,
        depth_capped,
    })
}

/// Median wall time of `repeats` evaluations after one warmup run.
fn time_evaluation(
    pair: &PairSample,
    method: MethodChoice,
    policy: &DegeneracyPolicy,
    repeats: u32,
) -> Result<f64> {
    black_box(eval_value(pair, method, policy)?);
    let mut times = Vec::with_capacity(repeats as usize);
    for _ in 0..repeats {
        let start = Instant::now();
        black_box(eval_value(black_box(pair), method, policy)?);
        times.push(start.elapsed());
    }
    times.sort();
    Ok(times[times.len() / 2].as_secs_f64())
}
