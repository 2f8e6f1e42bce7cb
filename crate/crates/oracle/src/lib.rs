//! Slow, obviously-correct references for the arithmetic and searches in
//! `raz_core`, plus the measurement helpers the test suites share.
//!
//! Nothing here calls into the fast paths it is meant to check: products are
//! shift-and-XOR, reduction is long division, generator blocks are summed term
//! by term.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use raz_core::error::{Error, Result};
use raz_core::extractor::{Distribution, Ratio};
use raz_core::generator::GeneratorSpec;
use raz_core::gf2x::{FieldElement, FieldSpec};
use raz_core::params::{gamma_bound, FreeParams, Model, SourcePair};
use raz_core::BitVector;

/// Parity evaluations allowed in [`bias_exhaustive`].
pub const BIAS_BUDGET: u128 = 1_000_000_000;

/// Largest `n` for [`flat_source`].
pub const FLAT_SOURCE_MAX_BITS: usize = 24;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Shift-and-XOR product in GF(2)\[x\].
pub fn clmul_schoolbook(a: &BitVector, b: &BitVector) -> BitVector {
    if a.is_empty() || b.is_empty() {
        return BitVector::zeros(0);
    }
    let mut out = BitVector::zeros(a.len() + b.len() - 1);
    for i in (0..a.len()).filter(|&i| a.get(i)) {
        for j in (0..b.len()).filter(|&j| b.get(j)) {
            let bit = out.get(i + j);
            out.set(i + j, !bit);
        }
    }
    out
}

/// Remainder of `p` divided by `x^s + x^k + 1`, one leading term at a time.
pub fn long_division_remainder(p: &BitVector, spec: FieldSpec) -> BitVector {
    let (s, k) = (spec.degree(), spec.middle());
    let mut r = p.clone();
    if r.len() < s {
        r.resize(s);
    }
    for top in (s..r.len()).rev() {
        if r.get(top) {
            r.set(top, false);
            for e in [top - s + k, top - s] {
                let bit = r.get(e);
                r.set(e, !bit);
            }
        }
    }
    r.resize(s);
    r
}

/// Schoolbook product followed by long division.
pub fn field_mul_naive(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    if a.spec() != b.spec() {
        let (l, r) = (a.spec(), b.spec());
        return Err(Error::IncompatibleField {
            left_s: l.degree(),
            left_k: l.middle(),
            right_s: r.degree(),
            right_k: r.middle(),
        });
    }
    let product = clmul_schoolbook(a.coeffs(), b.coeffs());
    FieldElement::new(long_division_remainder(&product, a.spec()), a.spec())
}

fn field_add_naive(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let bits = a.coeffs().iter().zip(b.coeffs().iter()).map(|(x, y)| x ^ y);
    FieldElement::new(BitVector::from_bits(bits), a.spec()).expect("same length")
}

/// The generator block `nu * sum_{i < 2^l} (alpha beta)^i` by direct summation.
pub fn block_by_sum(spec: &GeneratorSpec, x: &BitVector, alpha: &FieldElement) -> Result<BitVector> {
    let f = spec.field();
    let s = f.degree();
    if x.len() != 2 * s {
        return Err(invalid(format!("seed has {} bits, expected {}", x.len(), 2 * s)));
    }
    if spec.l() > 20 {
        return Err(Error::BudgetExceeded(format!("2^{} terms", spec.l())));
    }
    let beta = FieldElement::new(x.slice(0, s), f)?;
    let nu = FieldElement::new(x.slice(s, 2 * s), f)?;
    let ab = field_mul_naive(alpha, &beta)?;
    let mut term = FieldElement::new(BitVector::from_u64(1, s), f)?;
    let mut sum = FieldElement::new(BitVector::zeros(s), f)?;
    for _ in 0..1u32 << spec.l() {
        sum = field_add_naive(&sum, &term);
        term = field_mul_naive(&term, &ab)?;
    }
    Ok(field_mul_naive(&nu, &sum)?.into_coeffs())
}

/// `y` zero-extended to `s` bits.
pub fn alpha_of(y: u64, n2: usize, spec: FieldSpec) -> Result<FieldElement> {
    FieldElement::new(BitVector::from_u64(y, spec.degree().max(n2)).slice(0, spec.degree()), spec)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Largest `2 SD[parity, U_1]` over every non-empty set of at most `size_cap`
/// output bits, with the seed uniform over `{0,1}^{n1}`.
///
/// Output bit `(i, y)` (bit `i` of block `y`) sits at index `y (n1/2) + i`.
/// Returns the exact fraction `|#even - #odd| / 2^{n1}`.
pub fn bias_exhaustive(spec: &GeneratorSpec, n2: usize, size_cap: usize) -> Result<Ratio> {
    if size_cap == 0 {
        return Err(invalid("tests must be non-empty, so size_cap >= 1"));
    }
    let n1 = spec.n1();
    let s = spec.block_len();
    let outputs = s << n2;
    if n1 > 24 {
        return Err(Error::BudgetExceeded(format!("2^{n1} seeds")));
    }
    let seeds = 1usize << n1;
    let tests: u128 = (1..=size_cap.min(outputs) as u128)
        .map(|j| binomial(outputs as u128, j))
        .sum();
    if tests.saturating_mul(seeds as u128) > BIAS_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{tests} tests over {seeds} seeds exceeds {BIAS_BUDGET} parity evaluations"
        )));
    }

    // column t holds output bit t for every seed, packed by seed index
    let words = seeds.div_ceil(64);
    let mut columns = vec![vec![0u64; words]; outputs];
    let alphas = (0..1u64 << n2)
        .map(|y| alpha_of(y, n2, spec.field()))
        .collect::<Result<Vec<_>>>()?;
    for seed in 0..seeds {
        let x = BitVector::from_u64(seed as u64, n1);
        for (y, alpha) in alphas.iter().enumerate() {
            let block = block_by_sum(spec, &x, alpha)?;
            for i in (0..s).filter(|&i| block.get(i)) {
                columns[y * s + i][seed / 64] |= 1 << (seed % 64);
            }
        }
    }

    let mut worst = 0u128;
    let mut acc = vec![0u64; words];
    walk_subsets(&columns, 0, size_cap, &mut acc, &mut |parity| {
        let ones = parity.iter().map(|w| w.count_ones() as u128).sum::<u128>();
        worst = worst.max((2 * ones).abs_diff(seeds as u128));
    });
    Ok(Ratio {
        num: worst,
        den: seeds as u128,
    })
}

/// Visits the XOR of every non-empty subset of `columns[start..]` with at most
/// `budget` members, XORed into `acc`.
fn walk_subsets(
    columns: &[Vec<u64>],
    start: usize,
    budget: usize,
    acc: &mut [u64],
    visit: &mut impl FnMut(&[u64]),
) {
    if budget == 0 {
        return;
    }
    for t in start..columns.len() {
        xor_into(acc, &columns[t]);
        visit(acc);
        walk_subsets(columns, t + 1, budget - 1, acc, visit);
        xor_into(acc, &columns[t]);
    }
}

fn xor_into(acc: &mut [u64], col: &[u64]) {
    for (a, c) in acc.iter_mut().zip(col) {
        *a ^= c;
    }
}

/// A uniform distribution over `2^k` distinct `n`-bit strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSource {
    pub n: usize,
    pub k: usize,
    pub support: Vec<u64>,
}

impl FlatSource {
    pub fn distribution(&self) -> Distribution {
        Distribution::flat(self.n, self.support.clone()).expect("support is valid")
    }
}

/// A flat `(n, k)`-source whose support is drawn with a seeded ChaCha8 stream.
pub fn flat_source(n: usize, k: usize, seed: u64) -> Result<FlatSource> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if n > FLAT_SOURCE_MAX_BITS {
        return Err(Error::BudgetExceeded(format!(
            "flat sources are limited to {FLAT_SOURCE_MAX_BITS} bits, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support: Vec<u64> = index::sample(&mut rng, 1 << n, 1 << k)
        .into_iter()
        .map(|v| v as u64)
        .collect();
    support.sort_unstable();
    Ok(FlatSource { n, k, support })
}

/// Half the L1 distance between two distributions on the same indexed domain.
pub fn statistical_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(invalid(format!(
            "domains differ: {} vs {} atoms",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("P", p), ("Q", q)] {
        if d.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(invalid(format!("{name} has a negative or non-finite weight")));
        }
        let total = kahan_sum(d.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("{name} sums to {total}, not 1")));
        }
    }
    Ok(kahan_sum(p.iter().zip(q).map(|(a, b)| (a - b).abs())) / 2.0)
}

fn kahan_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Grid limits for [`max_m_exhaustive`].
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_l: u32,
    pub max_p: u64,
}

/// The first `(l, p)` (ascending) at which `m` output bits meet the target,
/// scanning the whole bounded grid and every entropy shift.
pub fn feasible_exhaustive(
    src: &SourcePair,
    target: f64,
    model: Model,
    m: usize,
    limits: SearchLimits,
) -> Option<FreeParams> {
    let half_m = m as f64 / 2.0;
    for l in 1..=limits.max_l {
        let mut p = 2u64;
        while p <= limits.max_p {
            let fp = FreeParams { p, l };
            if !fp.fits_output(m) {
                break;
            }
            let meets = |d: usize| -> Option<bool> {
                let base = SourcePair { k1: src.k1 - d, k2: src.k2 - d, ..*src };
                let g = gamma_bound(&base, fp).ok()?;
                Some(match model {
                    Model::Weak => d == 0 && half_m + g <= target,
                    Model::Strong => d as f64 >= half_m + 2.0 - g && g + half_m + 1.0 <= target,
                    Model::QuantumMarkov => {
                        d as f64 >= 1.0 - 2.0 * g
                            && 1.5 * half_m + (3f64.log2() + g - 1.0) / 2.0 <= target
                    }
                    Model::CqXor => false,
                })
            };
            let shifts = if model == Model::Weak { 0 } else { src.k1.min(src.k2) };
            if (0..=shifts).any(|d| meets(d) == Some(true)) {
                return Some(fp);
            }
            p += 2;
        }
    }
    None
}

/// Largest `m` found by [`feasible_exhaustive`], scanning every `m`.
pub fn max_m_exhaustive(
    src: &SourcePair,
    target: f64,
    model: Model,
    limits: SearchLimits,
) -> Option<(usize, FreeParams)> {
    (1..=src.n1 / 2)
        .rev()
        .find_map(|m| feasible_exhaustive(src, target, model, m, limits).map(|fp| (m, fp)))
}
