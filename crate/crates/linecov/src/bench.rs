//! Deterministic generation of the eight benchmark input distributions and
//! the pure aggregation of benchmark records (summary tables, error
//! histograms). Timing and file output live in the companion CLI crate.

use alloc::string::String;
use alloc::vec::Vec;

use crate::kernel::{Line, ScalingMatrix};
use crate::math;
use crate::{Error, Result};

/// Counter-based generator: the k-th output is a SplitMix64-style mix of
/// `key + (k + 1) * GOLDEN`, so any draw is a pure function of `(key, k)`.
/// Substreams are derived by remixing the key, which makes pair `k` of a
/// set reproducible independently of how many pairs are generated.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

#[inline]
fn mix(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        CounterRng { key, counter: 0 }
    }

    /// Substream `index` of this generator's key.
    pub fn substream(&self, index: u64) -> Self {
        CounterRng::new(mix(self
            .key
            .wrapping_add(mix(index.wrapping_add(1).wrapping_mul(GOLDEN)))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in `[a, b)` from a 53-bit mantissa, so the sequence is
    /// bit-exact across platforms.
    #[inline]
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        a + (b - a) * ((self.next_u64() >> 11) as f64 / DEN)
    }
}

/// One of the eight benchmark input distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetSpec {
    pub set_id: u8,
    pub n_pairs: usize,
    pub dim: usize,
    pub seed: u64,
}

impl SetSpec {
    pub fn new(set_id: u8, n_pairs: usize, dim: usize, seed: u64) -> Result<Self> {
        if !(1..=8).contains(&set_id) {
            return Err(Error::InvalidArgument("set_id must lie in 1..=8"));
        }
        if n_pairs == 0 || dim == 0 {
            return Err(Error::InvalidArgument("n_pairs and dim must be positive"));
        }
        Ok(SetSpec {
            set_id,
            n_pairs,
            dim,
            seed,
        })
    }
}

/// A generated input pair: two lines and a scaling matrix. The first line
/// starts at `u = p_i - p_j` and the second at the origin, which realizes
/// the sampled start-point difference.
#[derive(Debug, Clone)]
pub struct PairSample {
    pub line_i: Line,
    pub line_j: Line,
    pub scaling: ScalingMatrix,
}

/// Deterministically generate the pairs of a benchmark set.
///
/// Per pair, draws are consumed in the fixed order `w_i`, `w_j`, `u`, then
/// the diagonal of `V` for the sets with a random scaling matrix:
///
/// - Set 1: standard; `V = I`, all entries `U(0, 1)`.
/// - Set 2: almost colinear; `w_j = w_i + U(0, 1e-8)` per entry.
/// - Set 3: random diagonal scaling, `V_kk ~ U(0, 1)`.
/// - Set 4: reduced to a single integral; `w_i = 0` exactly.
/// - Set 5: nicely scaled; `V_kk ~ U(0, 0.01)`, vectors `U(0, 10)`.
/// - Set 6: poorly scaled; `V_kk ~ U(0, 10)`, vectors `U(0, 10)`.
/// - Set 7: almost reduced to a single integral; `w_i` entries `U(0, 1e-8)`.
/// - Set 8: almost reduced to no integral; both spans `U(0, 1e-8)`.
pub fn generate_set(spec: &SetSpec) -> Result<Vec<PairSample>> {
    let root = CounterRng::new(spec.seed).substream(spec.set_id as u64);
    let mut pairs = Vec::with_capacity(spec.n_pairs);
    for k in 0..spec.n_pairs {
        let mut rng = root.substream(k as u64);
        pairs.push(generate_pair(spec, &mut rng)?);
    }
    Ok(pairs)
}

fn generate_pair(spec: &SetSpec, rng: &mut CounterRng) -> Result<PairSample> {
    let m = spec.dim;
    let draw = |rng: &mut CounterRng, lo: f64, hi: f64| -> Vec<f64> {
        (0..m).map(|_| rng.uniform(lo, hi)).collect()
    };
    // scaling diagonals must stay positive definite, so draw from the open
    // interval; an exact-zero draw (probability 2^-53) is redrawn
    let draw_diag = |rng: &mut CounterRng, hi: f64| -> Vec<f64> {
        (0..m)
            .map(|_| loop {
                let x = rng.uniform(0.0, hi);
                if x > 0.0 {
                    break x;
                }
            })
            .collect()
    };

    let (w_i, w_j, u, diag): (Vec<f64>, Vec<f64>, Vec<f64>, Option<Vec<f64>>) = match spec.set_id {
        1 => (
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            None,
        ),
        2 => {
            let w_i = draw(rng, 0.0, 1.0);
            let w_j: Vec<f64> = w_i.iter().map(|&w| w + rng.uniform(0.0, 1e-8)).collect();
            (w_i, w_j, draw(rng, 0.0, 1.0), None)
        }
        3 => (
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            Some(draw_diag(rng, 1.0)),
        ),
        4 => (
            alloc::vec![0.0; m],
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            None,
        ),
        5 => (
            draw(rng, 0.0, 10.0),
            draw(rng, 0.0, 10.0),
            draw(rng, 0.0, 10.0),
            Some(draw_diag(rng, 0.01)),
        ),
        6 => (
            draw(rng, 0.0, 10.0),
            draw(rng, 0.0, 10.0),
            draw(rng, 0.0, 10.0),
            Some(draw_diag(rng, 10.0)),
        ),
        7 => (
            draw(rng, 0.0, 1e-8),
            draw(rng, 0.0, 1.0),
            draw(rng, 0.0, 1.0),
            None,
        ),
        8 => (
            draw(rng, 0.0, 1e-8),
            draw(rng, 0.0, 1e-8),
            draw(rng, 0.0, 1.0),
            None,
        ),
        _ => return Err(Error::InvalidArgument("set_id must lie in 1..=8")),
    };

    let scaling = match diag {
        Some(d) => ScalingMatrix::diagonal(&d)?,
        None => ScalingMatrix::identity(m),
    };
    Ok(PairSample {
        line_i: Line::new(u, w_i)?,
        line_j: Line::new(alloc::vec![0.0; m], w_j)?,
        scaling,
    })
}

/// Uniform `U(0,1)` lines for GP-level tests and examples: start and span
/// entries drawn per the Set-1 distribution, one substream per line.
pub fn sample_lines(n: usize, dim: usize, seed: u64) -> Vec<Line> {
    let root = CounterRng::new(seed).substream(0x11);
    (0..n)
        .map(|k| {
            let mut rng = root.substream(k as u64);
            let start = (0..dim).map(|_| rng.uniform(0.0, 1.0)).collect();
            let span = (0..dim).map(|_| rng.uniform(0.0, 1.0)).collect();
            Line::new(start, span).expect("finite draws")
        })
        .collect()
}

/// One benchmark measurement: a method's value on one pair, its signed
/// error against the reference value, and a median elapsed time.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub set_id: u8,
    pub pair_index: usize,
    pub method: String,
    pub value: f64,
    pub oracle: f64,
    pub signed_error: f64,
    pub elapsed_s: f64,
}

/// Per-(set, method) aggregate row of a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set_id: u8,
    pub method: String,
    pub n: usize,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
    pub mean_time_s: f64,
}

/// Aggregate records into per-(set, method) rows plus a per-method grand
/// mean time across sets. Non-finite errors (possible only when the
/// colinear gate is deliberately disabled) are excluded from the error
/// statistics; times average over all records.
pub fn summarize(records: &[BenchRecord]) -> (Vec<SummaryRow>, Vec<(String, f64)>) {
    let mut keys: Vec<(u8, String)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(s, m)| *s == r.set_id && *m == r.method) {
            keys.push((r.set_id, r.method.clone()));
        }
    }
    keys.sort();

    let mut rows = Vec::with_capacity(keys.len());
    for (set_id, method) in keys {
        let group: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.set_id == set_id && r.method == method)
            .collect();
        let finite: Vec<f64> = group
            .iter()
            .map(|r| math::abs(r.signed_error))
            .filter(|e| e.is_finite())
            .collect();
        let n = finite.len();
        rows.push(SummaryRow {
            set_id,
            method,
            n,
            mean_abs_error: if n > 0 {
                finite.iter().sum::<f64>() / n as f64
            } else {
                f64::NAN
            },
            max_abs_error: finite.iter().cloned().fold(0.0, f64::max),
            mean_time_s: group.iter().map(|r| r.elapsed_s).sum::<f64>() / group.len() as f64,
        });
    }

    let mut methods: Vec<String> = Vec::new();
    for r in records {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    let grand = methods
        .into_iter()
        .map(|method| {
            let times: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.elapsed_s)
                .collect();
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            (method, mean)
        })
        .collect();
    (rows, grand)
}

/// A histogram of `log10(|error|)` with a dedicated underflow bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Count of exactly zero errors (log10 undefined).
    pub underflow: usize,
    /// `(bin_lo_log10, bin_hi_log10, count)` rows over the observed range.
    pub bins: Vec<(f64, f64, usize)>,
}

/// Bin the error magnitudes of one `(set, method)` slice of records into
/// `n_bins` equal-width bins of `log10(|error|)` spanning the observed
/// range. Zero errors land in the underflow bin; non-finite errors are
/// dropped.
pub fn histogram(
    records: &[BenchRecord],
    set_id: u8,
    method: &str,
    n_bins: usize,
) -> Result<Histogram> {
    let logs: Vec<f64> = records
        .iter()
        .filter(|r| r.set_id == set_id && r.method == method)
        .filter(|r| r.signed_error.is_finite())
        .filter(|r| r.signed_error != 0.0)
        .map(|r| math::log10(math::abs(r.signed_error)))
        .collect();
    let underflow = records
        .iter()
        .filter(|r| r.set_id == set_id && r.method == method && r.signed_error == 0.0)
        .count();
    if logs.is_empty() && underflow == 0 {
        return Err(Error::InvalidArgument(
            "no records for the requested set and method",
        ));
    }
    if n_bins == 0 {
        return Err(Error::InvalidArgument("n_bins must be positive"));
    }

    let mut bins = Vec::new();
    if !logs.is_empty() {
        let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo {
            (hi - lo) / n_bins as f64
        } else {
            1.0
        };
        let mut counts = alloc::vec![0usize; n_bins];
        for &l in &logs {
            let mut idx = math::floor((l - lo) / width) as usize;
            if idx >= n_bins {
                idx = n_bins - 1;
            }
            counts[idx] += 1;
        }
        for (i, &count) in counts.iter().enumerate() {
            let b_lo = lo + i as f64 * width;
            bins.push((b_lo, b_lo + width, count));
        }
    }
    Ok(Histogram { underflow, bins })
}
