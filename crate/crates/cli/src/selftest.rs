use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raz_core::extractor::{Distribution, ExtractorInstance, SdMode};
use raz_core::generator::{make_generator_spec, Generator};
use raz_core::gf2x::{
    irreducibility_check, trinomial_lookup, Field, FieldElement, TrinomialTable,
    IRREDUCIBILITY_BUDGET,
};
use raz_core::params::{gamma_bound, theorem1_eval, FreeParams, SourcePair};
use raz_core::BitVector;
use raz_oracle::{alpha_of, bias_exhaustive, block_by_sum, field_mul_naive};

use crate::{Failure, TableArg};

pub const SUITES: [&str; 6] = ["table", "field", "generator", "bias", "extractor", "params"];

#[derive(Debug, Clone, clap::Args)]
pub struct SelftestArgs {
    /// Run only this suite: table, field, generator, bias, extractor, params.
    #[arg(long)]
    pub suite: Option<String>,
    #[command(flatten)]
    pub table: TableArg,
}

type SuiteResult = Result<String, String>;

fn show(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Every entry within the checker's budget is irreducible and degree 8 is
/// absent.
pub fn table_suite(table: &TrinomialTable) -> SuiteResult {
    let mut checked = 0;
    for spec in table.entries() {
        if spec.degree() > IRREDUCIBILITY_BUDGET {
            continue;
        }
        if !irreducibility_check(*spec).map_err(show)? {
            return Err(format!(
                "irreducibility failure: x^{} + x^{} + 1 is reducible",
                spec.degree(),
                spec.middle()
            ));
        }
        checked += 1;
    }
    if table.lookup(8).is_some() {
        return Err("table lists degree 8, which has no irreducible trinomial".into());
    }
    Ok(format!("{checked} entries irreducible"))
}

fn field_suite() -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pairs = 0;
    for s in [2usize, 3, 4, 7, 15, 31, 127] {
        let spec = trinomial_lookup(s).ok_or(format!("no trinomial for {s}"))?;
        let field = Field::new(spec).map_err(show)?;
        let el = |bits: BitVector| FieldElement::new(bits, spec).map_err(show);
        let operands: Vec<(BitVector, BitVector)> = if s <= 4 {
            (0..1u64 << s)
                .flat_map(|a| (0..1u64 << s).map(move |b| (a, b)))
                .map(|(a, b)| (BitVector::from_u64(a, s), BitVector::from_u64(b, s)))
                .collect()
        } else {
            (0..1000)
                .map(|_| {
                    let mut r = || BitVector::from_bits((0..s).map(|_| rng.gen::<bool>()));
                    (r(), r())
                })
                .collect()
        };
        for (a, b) in operands {
            let (a, b) = (el(a)?, el(b)?);
            let fast = field.mul(&a, &b).map_err(show)?;
            if fast != field_mul_naive(&a, &b).map_err(show)? {
                return Err(format!("product mismatch in GF(2^{s}): {a:?} * {b:?}"));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} products agree"))
}

fn generator_suite() -> SuiteResult {
    let mut blocks = 0;
    for l in 1..=3 {
        let spec = make_generator_spec(8, l, 4).map_err(show)?;
        let g = Generator::new(spec).map_err(show)?;
        for y in 0..16 {
            let alpha = alpha_of(y, 4, spec.field()).map_err(show)?;
            for x in 0..256 {
                let x = BitVector::from_u64(x, 8);
                let fast = g.block_fast(&x, &alpha).map_err(show)?;
                if fast != block_by_sum(&spec, &x, &alpha).map_err(show)? {
                    return Err(format!("block mismatch at l={l}, x={x:?}, alpha={y}"));
                }
                blocks += 1;
            }
        }
    }
    Ok(format!("{blocks} blocks agree"))
}

fn bias_suite() -> SuiteResult {
    let mut out = Vec::new();
    for l in [1u32, 2] {
        let spec = make_generator_spec(8, l, 2).map_err(show)?;
        let bias = bias_exhaustive(&spec, 2, 1 << l).map_err(show)?;
        // bias <= 2^{l-3}  <=>  8 num <= 2^l den
        if 8 * bias.num > (bias.den << l) {
            return Err(format!(
                "l = {l}: bias {}/{} exceeds 2^{}",
                bias.num,
                bias.den,
                l as i32 - 3
            ));
        }
        out.push(format!("l={l}: {}/{}", bias.num, bias.den));
    }
    Ok(out.join(", "))
}

fn extractor_suite() -> SuiteResult {
    let inst = ExtractorInstance::new(8, 2, 2, 2).map_err(show)?;
    let table = inst.output_table().map_err(show)?;
    let ux = Distribution::uniform(8);
    let y0 = Distribution::point(2, 0).map_err(show)?;
    let x0 = Distribution::point(8, 0).map_err(show)?;
    let sd = table.statistical_distance(&ux, &y0, SdMode::Weak).map_err(show)?;
    if !sd.is_zero() {
        return Err(format!("uniform X with y = 0 gave SD {}", sd.to_f64()));
    }
    let sd = table.statistical_distance(&x0, &y0, SdMode::Weak).map_err(show)?;
    if sd.to_f64() != 0.75 {
        return Err(format!("point masses gave SD {}, expected 0.75", sd.to_f64()));
    }
    for x in 0..256u64 {
        let xv = BitVector::from_u64(x, 8);
        let out = inst.extract(&xv, &BitVector::zeros(2)).map_err(show)?;
        if out != xv.slice(4, 6) {
            return Err(format!("y = 0 output differs from nu bits at x = {x}"));
        }
    }
    Ok("exact distances and y = 0 outputs as expected".into())
}

fn params_suite() -> SuiteResult {
    let src = SourcePair::new(10_000, 8000, 5000, 2000).map_err(show)?;
    let g = gamma_bound(&src, FreeParams { p: 8, l: 14 }).map_err(show)?;
    if (g + 373.125).abs() > 1e-9 {
        return Err(format!("log2 gamma = {g}, expected -373.125"));
    }
    let src = SourcePair::new(10_000, 8000, 5000, 1000).map_err(show)?;
    let t = theorem1_eval(&src, 1.0)
        .map_err(show)?
        .feasible()
        .ok_or("closed-form example infeasible")?;
    if t.weak.m != 17 || t.weak.log2_eps != -26.5 {
        return Err(format!("theorem example gave m = {}, log2 eps = {}", t.weak.m, t.weak.log2_eps));
    }
    Ok("reference values reproduce".into())
}

/// Runs the named suites in order, reporting one line per suite.
pub fn run_suites(
    names: &[&str],
    table: &TrinomialTable,
    mut report: impl FnMut(String),
) -> bool {
    let mut all_pass = true;
    for &name in names {
        let result = match name {
            "table" => table_suite(table),
            "field" => field_suite(),
            "generator" => generator_suite(),
            "bias" => bias_suite(),
            "extractor" => extractor_suite(),
            "params" => params_suite(),
            other => Err(format!("unknown suite {other}")),
        };
        match result {
            Ok(detail) => report(format!("suite {name}: pass ({detail})")),
            Err(e) => {
                all_pass = false;
                report(format!("suite {name}: FAIL: {e}"));
            }
        }
    }
    all_pass
}

pub fn run_selftest(a: &SelftestArgs) -> Result<i32, Failure> {
    let names: Vec<&str> = match &a.suite {
        Some(s) if SUITES.contains(&s.as_str()) => vec![s.as_str()],
        Some(s) => {
            return Err(Failure::usage(format!(
                "unknown suite {s:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
        None => SUITES.to_vec(),
    };
    let custom = a.table.load()?;
    let table = custom.as_ref().unwrap_or(TrinomialTable::bundled());
    let ok = run_suites(&names, table, |line| println!("{line}"));
    Ok(if ok { 0 } else { crate::EXIT_FAILURE })
}
