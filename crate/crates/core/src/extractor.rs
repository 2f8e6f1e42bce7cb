//! `Ext(x, y)`: the first `m` bits of the generator block selected by `y`.

use crate::bitvec::BitVector;
use crate::error::{invalid, Error, Result};
use crate::gf2x::FieldSpec;
use crate::generator::{make_generator_spec, Generator, GeneratorSpec};

/// Largest `n1 + n2` accepted by exhaustive enumeration.
pub const ENUMERATION_BUDGET_BITS: usize = 24;

/// A configured extractor for sources of `n1` and `n2` bits producing `m` bits.
#[derive(Debug, Clone)]
pub struct ExtractorInstance {
    n2: usize,
    m: usize,
    generator: Generator,
}

impl ExtractorInstance {
    /// Uses the bundled trinomial for `n1/2`.
    pub fn new(n1: usize, n2: usize, m: usize, l: u32) -> Result<Self> {
        Self::check_shape(n1, n2, m)?;
        Self::from_spec(make_generator_spec(n1, l, n2)?, n2, m)
    }

    pub fn with_field(n1: usize, n2: usize, m: usize, l: u32, field: FieldSpec) -> Result<Self> {
        Self::check_shape(n1, n2, m)?;
        Self::from_spec(GeneratorSpec::with_field(n1, l, n2, field)?, n2, m)
    }

    fn check_shape(n1: usize, n2: usize, m: usize) -> Result<()> {
        if n1 % 2 != 0 {
            return Err(invalid(format!("n1 must be even, got {n1}")));
        }
        if n2 == 0 || n2 > n1 / 2 {
            return Err(invalid(format!(
                "n2 <= n1/2 violated: n2 = {n2}, n1/2 = {}",
                n1 / 2
            )));
        }
        if m == 0 || m > n1 / 2 {
            return Err(invalid(format!(
                "m must satisfy 1 <= m <= n1/2 = {}, got {m}",
                n1 / 2
            )));
        }
        Ok(())
    }

    fn from_spec(spec: GeneratorSpec, n2: usize, m: usize) -> Result<Self> {
        Self::check_shape(spec.n1(), n2, m)?;
        Ok(ExtractorInstance {
            n2,
            m,
            generator: Generator::new(spec)?,
        })
    }

    pub fn n1(&self) -> usize {
        self.generator.spec().n1()
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn extract(&self, x: &BitVector, y: &BitVector) -> Result<BitVector> {
        if y.len() != self.n2 {
            return Err(Error::Length {
                what: "second source",
                expected: self.n2,
                actual: y.len(),
            });
        }
        let alpha = self.generator.embed_alpha(y)?;
        let block = self.generator.block_fast(x, &alpha)?;
        Ok(block.slice(0, self.m))
    }

    /// `Ext` on every input pair, for exhaustive analysis.
    pub fn output_table(&self) -> Result<OutputTable> {
        let (n1, n2) = (self.n1(), self.n2);
        if n1 + n2 > ENUMERATION_BUDGET_BITS {
            return Err(Error::BudgetExceeded(format!(
                "n1 + n2 = {} exceeds {ENUMERATION_BUDGET_BITS}",
                n1 + n2
            )));
        }
        let alphas = (0..1u64 << n2)
            .map(|y| self.generator.embed_alpha(&BitVector::from_u64(y, n2)))
            .collect::<Result<Vec<_>>>()?;
        let mut outputs = Vec::with_capacity(1 << (n1 + n2));
        for x in 0..1u64 << n1 {
            let xv = BitVector::from_u64(x, n1);
            for alpha in &alphas {
                let block = self.generator.block_fast(&xv, alpha)?;
                outputs.push(block.slice(0, self.m).to_u64() as u32);
            }
        }
        Ok(OutputTable {
            n1,
            n2,
            m: self.m,
            outputs,
        })
    }
}

/// A distribution over `{0,1}^n` with positive integer weights.
///
/// Outcomes are integers whose bit `i` is string bit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    n: usize,
    atoms: Vec<(u64, u64)>,
}

impl Distribution {
    pub fn new(n: usize, mut atoms: Vec<(u64, u64)>) -> Result<Self> {
        if n > 63 {
            return Err(invalid(format!("distribution over {n}-bit strings is too wide")));
        }
        if atoms.is_empty() {
            return Err(invalid("distribution has no atoms"));
        }
        atoms.sort_unstable();
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid(format!("outcome {} listed twice", w[0].0)));
            }
        }
        if let Some(&(v, _)) = atoms.iter().find(|(v, _)| v >> n != 0) {
            return Err(invalid(format!("outcome {v} does not fit in {n} bits")));
        }
        if atoms.iter().any(|&(_, w)| w == 0) {
            return Err(invalid("zero weight"));
        }
        Ok(Distribution { n, atoms })
    }

    pub fn uniform(n: usize) -> Self {
        Self::flat(n, (0..1u64 << n).collect()).expect("full support is valid")
    }

    pub fn point(n: usize, value: u64) -> Result<Self> {
        Self::new(n, vec![(value, 1)])
    }

    /// Uniform over `support`.
    pub fn flat(n: usize, support: Vec<u64>) -> Result<Self> {
        Self::new(n, support.into_iter().map(|v| (v, 1)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(u64, u64)] {
        &self.atoms
    }

    pub fn total_weight(&self) -> u64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    /// `-log2(max probability)`.
    pub fn min_entropy(&self) -> f64 {
        let max = self.atoms.iter().map(|&(_, w)| w).max().unwrap_or(1);
        (self.total_weight() as f64 / max as f64).log2()
    }
}

/// Which input, if any, is published alongside the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdMode {
    Weak,
    StrongInX,
    StrongInY,
}

/// A nonnegative fraction with exact integer parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `self <= 2^log2_bound`, evaluated without rounding the fraction.
    pub fn at_most_pow2(self, log2_bound: f64) -> bool {
        if self.num == 0 {
            return true;
        }
        (self.num as f64).log2() - (self.den as f64).log2() <= log2_bound
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let lhs = self.num.checked_mul(other.den)?;
        let rhs = other.num.checked_mul(self.den)?;
        Some(lhs.cmp(&rhs))
    }
}

/// `Ext(x, y)` for all `x < 2^n1`, `y < 2^n2`, stored at `x * 2^n2 + y`.
#[derive(Debug, Clone)]
pub struct OutputTable {
    n1: usize,
    n2: usize,
    m: usize,
    outputs: Vec<u32>,
}

impl OutputTable {
    pub fn get(&self, x: u64, y: u64) -> u32 {
        self.outputs[((x << self.n2) | y) as usize]
    }

    /// Exact statistical distance between the output (paired with the
    /// published input in strong modes) and uniform.
    pub fn statistical_distance(
        &self,
        source_x: &Distribution,
        source_y: &Distribution,
        mode: SdMode,
    ) -> Result<Ratio> {
        if source_x.n != self.n1 || source_y.n != self.n2 {
            return Err(invalid(format!(
                "sources over {} and {} bits do not match n1 = {}, n2 = {}",
                source_x.n, source_y.n, self.n1, self.n2
            )));
        }
        let outcomes = 1usize << self.m;
        let wx = source_x.total_weight() as u128;
        let wy = source_y.total_weight() as u128;
        let scale = outcomes as u128;
        let mut counts = vec![0u128; outcomes];
        let deviation = |counts: &mut [u128], total: u128| -> u128 {
            let d = counts.iter().map(|&c| (c * scale).abs_diff(total)).sum();
            counts.iter_mut().for_each(|c| *c = 0);
            d
        };
        // Each branch sums |count * 2^m - total| over a block of outcomes; the
        // common denominator is 2 * wx * wy * 2^m.
        let num = match mode {
            SdMode::Weak => {
                for &(x, a) in &source_x.atoms {
                    for &(y, b) in &source_y.atoms {
                        counts[self.get(x, y) as usize] += (a as u128) * (b as u128);
                    }
                }
                deviation(&mut counts, wx * wy)
            }
            SdMode::StrongInX => {
                let mut sum = 0u128;
                for &(x, a) in &source_x.atoms {
                    for &(y, b) in &source_y.atoms {
                        counts[self.get(x, y) as usize] += b as u128;
                    }
                    sum += a as u128 * deviation(&mut counts, wy);
                }
                sum
            }
            SdMode::StrongInY => {
                let mut sum = 0u128;
                for &(y, b) in &source_y.atoms {
                    for &(x, a) in &source_x.atoms {
                        counts[self.get(x, y) as usize] += a as u128;
                    }
                    sum += b as u128 * deviation(&mut counts, wx);
                }
                sum
            }
        };
        Ok(Ratio {
            num,
            den: 2 * wx * wy * scale,
        })
    }
}

/// Exact statistical distance of `Ext(X, Y)` from uniform by full enumeration.
pub fn sd_exhaustive(
    inst: &ExtractorInstance,
    source_x: &Distribution,
    source_y: &Distribution,
    mode: SdMode,
) -> Result<Ratio> {
    inst.output_table()?
        .statistical_distance(source_x, source_y, mode)
}
