use std::path::PathBuf;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raz_core::extractor::ExtractorInstance;
use raz_core::generator::max_l;
use raz_core::gf2x::{trinomial_lookup, TrinomialTable};
use raz_core::BitVector;

use crate::{Failure, TableArg};

/// `n1 = 2s` for bundled degrees `s` near `2^11, 2^13, ..., 2^21`.
pub const DEFAULT_SIZES: [usize; 6] = [4562, 19378, 46418, 264098, 1513678, 6042754];

#[derive(Debug, Clone, clap::Args)]
pub struct BenchArgs {
    /// Comma-separated n1 values; an empty list gives an empty CSV.
    #[arg(long, value_parser = parse_sizes)]
    pub sizes: Option<Sizes>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// log2 of p', capped by n2 + log2(n1/2).
    #[arg(long, default_value_t = 8)]
    pub l: u32,
    /// Second-source length, capped at n1 / 2.
    #[arg(long, default_value_t = 32)]
    pub n2: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableArg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

fn parse_sizes(text: &str) -> Result<Sizes, String> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e| format!("bad size {t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n1: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// `bits` pseudorandom bits from a ChaCha8 stream keyed by `key`.
pub fn pseudorandom_bits(key: u64, bits: usize) -> BitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    BitVector::from_bytes_lsb(&bytes, bits).expect("enough bytes")
}

/// Times `runs` extractions of `m = n1/2` bits per size, after one untimed
/// warm-up call. Sizes without a trinomial are skipped with a warning.
pub fn measure(
    sizes: &[usize],
    runs: usize,
    l: u32,
    n2: usize,
    table: Option<&TrinomialTable>,
    mut warn: impl FnMut(String),
) -> Result<Vec<BenchRow>, Failure> {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::new();
    for n1 in sorted {
        let field = if n1 % 2 == 0 && n1 >= 4 {
            match table {
                Some(t) => t.lookup(n1 / 2),
                None => trinomial_lookup(n1 / 2),
            }
        } else {
            None
        };
        let Some(field) = field else {
            warn(format!("skipping n1 = {n1}: no trinomial for degree n1/2"));
            continue;
        };
        let n2 = n2.clamp(1, n1 / 2);
        let l = l.clamp(1, max_l(n1, n2));
        let inst = ExtractorInstance::with_field(n1, n2, n1 / 2, l, field)?;
        let x = pseudorandom_bits(2 * n1 as u64, n1);
        let y = pseudorandom_bits(2 * n1 as u64 + 1, n2);
        inst.extract(&x, &y)?;
        let mut times = Vec::with_capacity(runs);
        for _ in 0..runs {
            let t = Instant::now();
            std::hint::black_box(inst.extract(&x, &y)?);
            times.push(t.elapsed().as_secs_f64());
        }
        let (mean, std) = mean_std(&times);
        rows.push(BenchRow {
            n1,
            mean_seconds: mean,
            std_seconds: std,
        });
    }
    Ok(rows)
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `log(time)` against `log(n1)`.
pub fn loglog_slope(rows: &[BenchRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n1 as f64).ln(), r.mean_seconds.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("n1,mean_seconds,std_seconds\n");
    for r in rows {
        s.push_str(&format!("{},{:.9},{:.9}\n", r.n1, r.mean_seconds, r.std_seconds));
    }
    s
}

pub fn run_bench(a: &BenchArgs) -> Result<i32, Failure> {
    if a.runs == 0 {
        return Err(Failure::usage("--runs must be positive"));
    }
    let table = a.table.load()?;
    let sizes = a.sizes.as_ref().map_or(&DEFAULT_SIZES[..], |s| &s.0[..]);
    let rows = measure(sizes, a.runs, a.l, a.n2, table.as_ref(), |w| {
        eprintln!("warning: {w}")
    })?;
    let csv = to_csv(&rows);
    match &a.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(0)
}
