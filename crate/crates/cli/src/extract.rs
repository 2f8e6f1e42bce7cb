use std::path::PathBuf;

use raz_core::error::Error;
use raz_core::extractor::ExtractorInstance;
use raz_core::gf2x::trinomial_lookup;
use raz_core::params::{best_moment, lemma5_from_gamma, SourcePair};

use crate::io::{read_bits, write_bits, Format};
use crate::{Failure, TableArg};

#[derive(Debug, Clone, clap::Args)]
pub struct ExtractArgs {
    /// First source file (at least n1 bits).
    #[arg(long)]
    pub x: PathBuf,
    /// Second source file (at least n2 bits).
    #[arg(long)]
    pub y: PathBuf,
    /// Output file; receives exactly m bits, zero-padded to a whole byte.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    #[arg(long)]
    pub m: usize,
    /// log2 of p'.
    #[arg(long)]
    pub l: u32,
    /// Min-entropy of the first source, for the reported error claim.
    #[arg(long, requires = "k2")]
    pub k1: Option<usize>,
    /// Min-entropy of the second source, for the reported error claim.
    #[arg(long, requires = "k1")]
    pub k2: Option<usize>,
    #[arg(long, value_enum, default_value = "raw")]
    pub format: Format,
    #[command(flatten)]
    pub table: TableArg,
}

pub fn build_instance(a: &ExtractArgs) -> Result<ExtractorInstance, Failure> {
    if a.n1 % 2 != 0 {
        return Err(Failure::usage(format!("n1 must be even, got {}", a.n1)));
    }
    if a.n2 == 0 || a.n2 > a.n1 / 2 {
        return Err(Failure::usage(format!(
            "n2 <= n1/2 violated: n2 = {}, n1/2 = {}",
            a.n2,
            a.n1 / 2
        )));
    }
    let field = match a.table.load()? {
        Some(t) => t.lookup(a.n1 / 2),
        None => trinomial_lookup(a.n1 / 2),
    }
    .ok_or(Error::UnsupportedDegree(a.n1 / 2))?;
    Ok(ExtractorInstance::with_field(a.n1, a.n2, a.m, a.l, field)?)
}

/// Weak and strong error claims at the best `p` for this `l`, as
/// JSON lines.
pub fn claim_lines(a: &ExtractArgs, k1: usize, k2: usize) -> Result<Vec<String>, Failure> {
    let src = SourcePair::new(a.n1, k1, a.n2, k2)?;
    let Some((fp, g)) = best_moment(&src, a.l, a.m) else {
        return Ok(vec![format!(
            "no even p satisfies p <= 2^l / m for l = {}, m = {}; no error claim",
            a.l, a.m
        )]);
    };
    let (weak, strong) = lemma5_from_gamma(&src, g, a.m)?;
    let mut lines = Vec::new();
    for mut c in [weak, strong] {
        c.p = Some(fp.p);
        c.l = Some(fp.l);
        lines.push(serde_json::to_string(&c).expect("claims serialize"));
        lines.extend(c.notes.iter().map(|n| format!("note: {n}")));
    }
    Ok(lines)
}

pub fn run_extract(a: &ExtractArgs) -> Result<i32, Failure> {
    let inst = build_instance(a)?;
    let x = read_bits(&a.x, a.format, a.n1, "first source")?;
    let y = read_bits(&a.y, a.format, a.n2, "second source")?;
    let out = inst.extract(&x, &y)?;
    write_bits(&a.out, a.format, &out)?;
    if let (Some(k1), Some(k2)) = (a.k1, a.k2) {
        for line in claim_lines(a, k1, k2)? {
            eprintln!("{line}");
        }
    }
    Ok(0)
}
