//! The small-bias generator, one output block at a time.
//!
//! A seed `x` of `n1` bits splits into `beta = x[0..n1/2]` and
//! `nu = x[n1/2..n1]`, both read as elements of `GF(2^{n1/2})`. The block
//! indexed by `alpha` is
//!
//! ```text
//! nu * sum_{i < p'} (alpha*beta)^i  =  nu * prod_{j < l} (1 + (alpha*beta)^{2^j})
//! ```
//!
//! with `p' = 2^l`. The product form needs only `l - 1` squarings.

use crate::bitvec::BitVector;
use crate::error::{invalid, Error, Result};
use crate::gf2x::{trinomial_lookup, Field, FieldElement, FieldSpec};

/// Largest `l` accepted by [`Generator::block_naive`].
pub const NAIVE_MAX_L: u32 = 16;

/// Validated generator parameters: seed length `n1`, `p' = 2^l`, and the field
/// of degree `n1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    n1: usize,
    l: u32,
    field: FieldSpec,
}

/// `floor(log2(n))` for `n >= 1`.
pub(crate) fn ilog2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

/// The largest `l` allowed with a second source of `n2` bits:
/// `l <= n2 + log2(n1/2)`, i.e. `2^l <= (n1/2) * 2^n2`.
pub fn max_l(n1: usize, n2: usize) -> u32 {
    let s = n1 / 2;
    // 2^l <= s * 2^n2  <=>  l <= n2 + floor(log2 s)
    (n2 as u32).saturating_add(ilog2(s.max(1)))
}

/// Builds a spec using the bundled trinomial for `n1/2`.
pub fn make_generator_spec(n1: usize, l: u32, n2: usize) -> Result<GeneratorSpec> {
    check_seed_length(n1)?;
    let field = trinomial_lookup(n1 / 2).ok_or(Error::UnsupportedDegree(n1 / 2))?;
    GeneratorSpec::with_field(n1, l, n2, field)
}

fn check_seed_length(n1: usize) -> Result<()> {
    if n1 < 4 || n1 % 2 != 0 {
        return Err(invalid(format!("n1 must be even and at least 4, got {n1}")));
    }
    Ok(())
}

impl GeneratorSpec {
    /// Like [`make_generator_spec`] with an explicit trinomial.
    pub fn with_field(n1: usize, l: u32, n2: usize, field: FieldSpec) -> Result<Self> {
        check_seed_length(n1)?;
        if field.degree() != n1 / 2 {
            return Err(invalid(format!(
                "field degree {} does not match n1/2 = {}",
                field.degree(),
                n1 / 2
            )));
        }
        let cap = max_l(n1, n2);
        if l == 0 || l > cap {
            return Err(invalid(format!(
                "l must satisfy 1 <= l <= n2 + log2(n1/2) = {cap}, got {l}"
            )));
        }
        Ok(GeneratorSpec { n1, l, field })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Block length `n1/2`.
    pub fn block_len(&self) -> usize {
        self.n1 / 2
    }

    /// `log2(zeta) = l - n1/2`.
    pub fn log2_zeta(&self) -> f64 {
        self.l as f64 - (self.n1 / 2) as f64
    }

    /// Total output length `(n1/2) * 2^n2`, when it fits in a `u128`.
    pub fn output_len(&self, n2: usize) -> Option<u128> {
        1u128
            .checked_shl(n2 as u32)
            .and_then(|b| b.checked_mul(self.block_len() as u128))
    }
}

/// Field operations performed by one call to [`Generator::block_fast_counted`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub squarings: u32,
    pub additions: u32,
    pub multiplications: u32,
}

/// A generator spec bound to its field arithmetic.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: GeneratorSpec,
    field: Field,
}

impl Generator {
    pub fn new(spec: GeneratorSpec) -> Result<Self> {
        Ok(Generator {
            spec,
            field: Field::new(spec.field)?,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Zero-extends a second-source string `y` (at most `n1/2` bits) to a
    /// field element, so `y = 0` maps to `alpha = 0`.
    pub fn embed_alpha(&self, y: &BitVector) -> Result<FieldElement> {
        let s = self.spec.block_len();
        if y.len() > s {
            return Err(Error::Length {
                what: "second-source string",
                expected: s,
                actual: y.len(),
            });
        }
        let mut bits = y.clone();
        bits.resize(s);
        self.field.element(bits)
    }

    fn split_seed(&self, x: &BitVector) -> Result<(FieldElement, FieldElement)> {
        if x.len() != self.spec.n1 {
            return Err(Error::Length {
                what: "seed",
                expected: self.spec.n1,
                actual: x.len(),
            });
        }
        let s = self.spec.block_len();
        let beta = self.field.element(x.slice(0, s))?;
        let nu = self.field.element(x.slice(s, 2 * s))?;
        Ok((beta, nu))
    }

    pub fn block_fast(&self, x: &BitVector, alpha: &FieldElement) -> Result<BitVector> {
        self.block_fast_counted(x, alpha).map(|(b, _)| b)
    }

    /// [`block_fast`](Self::block_fast) together with its operation count,
    /// which is always `l - 1` squarings, `l` additions and `l + 1`
    /// multiplications.
    pub fn block_fast_counted(
        &self,
        x: &BitVector,
        alpha: &FieldElement,
    ) -> Result<(BitVector, OpCounts)> {
        let (beta, nu) = self.split_seed(x)?;
        let f = &self.field;
        let mut ops = OpCounts::default();

        let mut delta = f.mul(alpha, &beta)?;
        ops.multiplications += 1;
        let mut acc = f.add_one(&delta)?;
        ops.additions += 1;
        for _ in 1..self.spec.l {
            delta = f.square(&delta)?;
            ops.squarings += 1;
            let factor = f.add_one(&delta)?;
            ops.additions += 1;
            acc = f.mul(&acc, &factor)?;
            ops.multiplications += 1;
        }
        let block = f.mul(&nu, &acc)?;
        ops.multiplications += 1;
        Ok((block.into_coeffs(), ops))
    }

    /// Term-by-term `nu * sum_{i < 2^l} (alpha*beta)^i`; reference semantics
    /// for [`block_fast`](Self::block_fast). Requires `l <= NAIVE_MAX_L`.
    pub fn block_naive(&self, x: &BitVector, alpha: &FieldElement) -> Result<BitVector> {
        if self.spec.l > NAIVE_MAX_L {
            return Err(Error::BudgetExceeded(format!(
                "term-by-term evaluation supports l <= {NAIVE_MAX_L}, got {}",
                self.spec.l
            )));
        }
        let (beta, nu) = self.split_seed(x)?;
        let f = &self.field;
        let ab = f.mul(alpha, &beta)?;
        let mut power = f.one();
        let mut sum = f.zero();
        for _ in 0..1u32 << self.spec.l {
            sum = f.add(&sum, &power)?;
            power = f.mul(&power, &ab)?;
        }
        Ok(f.mul(&nu, &sum)?.into_coeffs())
    }
}
