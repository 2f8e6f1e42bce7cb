//! Binary polynomials and the fields `GF(2^s) = GF(2)[x] / (x^s + x^k + 1)`.
//!
//! Products go through [`crate::ntt`]: the 0/1 coefficient sequences are
//! convolved exactly over the integers and reduced mod 2, then folded down by
//! the trinomial. Squaring takes a shortcut, since over GF(2) the square of
//! `sum a_i x^i` is `sum a_i x^{2i}`.

use std::sync::OnceLock;

use crate::bitvec::{shr_words, words_for, xor_shifted, BitVector};
use crate::error::{invalid, Error, Result};
use crate::ntt::{make_plan, ConvolutionPlan};

/// Degree bound for [`irreducibility_check`].
pub const IRREDUCIBILITY_BUDGET: usize = 4096;

/// The trinomial `x^s + x^k + 1` defining a field of degree `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    degree: usize,
    middle: usize,
}

impl FieldSpec {
    pub fn new(degree: usize, middle: usize) -> Result<Self> {
        if middle == 0 || middle >= degree {
            return Err(invalid(format!(
                "trinomial middle exponent must satisfy 0 < k < s, got s={degree} k={middle}"
            )));
        }
        Ok(FieldSpec { degree, middle })
    }

    /// The field degree `s`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The middle exponent `k`.
    pub fn middle(&self) -> usize {
        self.middle
    }
}

/// An element of `GF(2^s)`: exactly `s` coefficient bits, little-endian.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: BitVector,
    spec: FieldSpec,
}

impl FieldElement {
    /// Wraps exactly `s` coefficient bits.
    pub fn new(coeffs: BitVector, spec: FieldSpec) -> Result<Self> {
        if coeffs.len() != spec.degree {
            return Err(Error::Length {
                what: "field element",
                expected: spec.degree,
                actual: coeffs.len(),
            });
        }
        Ok(FieldElement { coeffs, spec })
    }

    pub fn coeffs(&self) -> &BitVector {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> BitVector {
        self.coeffs
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }
}

fn same_field(a: FieldSpec, b: FieldSpec) -> Result<()> {
    if a != b {
        return Err(Error::IncompatibleField {
            left_s: a.degree,
            left_k: a.middle,
            right_s: b.degree,
            right_k: b.middle,
        });
    }
    Ok(())
}

fn bits_to_coeffs(v: &BitVector) -> Vec<u32> {
    let mut out = Vec::with_capacity(v.len());
    for (wi, &w) in v.words().iter().enumerate() {
        let take = (v.len() - wi * 64).min(64);
        for b in 0..take {
            out.push(((w >> b) & 1) as u32);
        }
    }
    out
}

fn coeffs_to_bits(c: &[u32], len: usize) -> BitVector {
    let mut words = vec![0u64; words_for(len)];
    for (i, &x) in c[..len].iter().enumerate() {
        words[i / 64] |= ((x & 1) as u64) << (i % 64);
    }
    BitVector::from_words(words, len)
}

/// Carry-less product in GF(2)\[x\]; the result has `len(a) + len(b) - 1` bits.
pub fn clmul(a: &BitVector, b: &BitVector, plan: &ConvolutionPlan) -> Result<BitVector> {
    if a.is_empty() || b.is_empty() {
        return Ok(BitVector::zeros(0));
    }
    let out_len = a.len() + b.len() - 1;
    if out_len > plan.len() {
        return Err(Error::Length {
            what: "carry-less product",
            expected: plan.len(),
            actual: out_len,
        });
    }
    let conv = plan.convolve(&bits_to_coeffs(a), &bits_to_coeffs(b))?;
    Ok(coeffs_to_bits(&conv, out_len))
}

/// Folds `x^{s+j} -> x^{k+j} + x^j` until every set bit is below `s`.
/// Returns exactly `words_for(s)` words.
fn fold_trinomial(mut words: Vec<u64>, s: usize, k: usize) -> Vec<u64> {
    loop {
        let deg = match poly_degree(&words) {
            Some(d) if d >= s => d,
            _ => break,
        };
        let high = shr_words(&words, s);
        let keep = words_for(s);
        words.truncate(keep);
        if s % 64 != 0 {
            words[keep - 1] &= (1u64 << (s % 64)) - 1;
        }
        // the folded terms reach degree deg - s + k < deg
        words.resize(words_for(deg - s + k + 1).max(keep), 0);
        xor_shifted(&mut words, &high, 0);
        xor_shifted(&mut words, &high, k);
    }
    words.resize(words_for(s), 0);
    words
}

/// `p mod (x^s + x^k + 1)` for `len(p) <= 2s - 1`.
pub fn reduce_trinomial(p: &BitVector, spec: FieldSpec) -> Result<FieldElement> {
    let s = spec.degree;
    if p.len() > 2 * s - 1 {
        return Err(Error::Length {
            what: "polynomial to reduce",
            expected: 2 * s - 1,
            actual: p.len(),
        });
    }
    let words = fold_trinomial(p.words().to_vec(), s, spec.middle);
    Ok(FieldElement {
        coeffs: BitVector::from_words(words, s),
        spec,
    })
}

#[inline]
fn spread32(x: u32) -> u64 {
    let mut x = x as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    (x | (x << 1)) & 0x5555_5555_5555_5555
}

/// `a(x)^2` over GF(2), before reduction.
fn square_words(a: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 * a.len());
    for &w in a {
        out.push(spread32(w as u32));
        out.push(spread32((w >> 32) as u32));
    }
    out
}

fn square_mod(a: &[u64], s: usize, k: usize) -> Vec<u64> {
    fold_trinomial(square_words(a), s, k)
}

/// Arithmetic context for one field: the trinomial plus a convolution plan
/// long enough for a full product.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    plan: ConvolutionPlan,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let product_len = (2 * spec.degree - 1).max(2);
        let plan = make_plan(product_len.next_power_of_two())?;
        Ok(Field { spec, plan })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn plan(&self) -> &ConvolutionPlan {
        &self.plan
    }

    /// Wraps an `s`-bit vector as a field element.
    pub fn element(&self, coeffs: BitVector) -> Result<FieldElement> {
        FieldElement::new(coeffs, self.spec)
    }

    pub fn from_u64(&self, value: u64) -> Result<FieldElement> {
        if self.spec.degree < 64 && value >> self.spec.degree != 0 {
            return Err(invalid(format!(
                "{value:#b} does not fit in GF(2^{})",
                self.spec.degree
            )));
        }
        self.element(BitVector::from_u64(value, self.spec.degree))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: BitVector::zeros(self.spec.degree),
            spec: self.spec,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            coeffs: BitVector::from_u64(1, self.spec.degree),
            spec: self.spec,
        }
    }

    fn owns(&self, a: &FieldElement) -> Result<()> {
        same_field(self.spec, a.spec)
    }

    /// `reduce_trinomial(clmul(a, b))`.
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.owns(a)?;
        self.owns(b)?;
        let product = if a.coeffs == b.coeffs {
            let conv = self.plan.convolve_square(&bits_to_coeffs(&a.coeffs))?;
            coeffs_to_bits(&conv, 2 * self.spec.degree - 1)
        } else {
            clmul(&a.coeffs, &b.coeffs, &self.plan)?
        };
        reduce_trinomial(&product, self.spec)
    }

    /// `a^2` by coefficient spreading; agrees with `mul(a, a)`.
    pub fn square(&self, a: &FieldElement) -> Result<FieldElement> {
        self.owns(a)?;
        let words = square_mod(a.coeffs.words(), self.spec.degree, self.spec.middle);
        Ok(FieldElement {
            coeffs: BitVector::from_words(words, self.spec.degree),
            spec: self.spec,
        })
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.owns(a)?;
        field_add(a, b)
    }

    /// `a + 1`, i.e. flip the constant coefficient.
    pub fn add_one(&self, a: &FieldElement) -> Result<FieldElement> {
        self.owns(a)?;
        let mut out = a.clone();
        let c0 = out.coeffs.get(0);
        out.coeffs.set(0, !c0);
        Ok(out)
    }
}

/// Coefficient-wise XOR.
pub fn field_add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    same_field(a.spec, b.spec)?;
    let mut out = a.clone();
    out.coeffs.xor_assign(&b.coeffs)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Irreducibility

fn poly_degree(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    loop {
        let db = match poly_degree(&b) {
            None => return a,
            Some(d) => d,
        };
        // a <- a mod b
        while let Some(da) = poly_degree(&a) {
            if da < db {
                break;
            }
            xor_shifted(&mut a, &b, da - db);
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn is_one(words: &[u64]) -> bool {
    poly_degree(words) == Some(0)
}

fn trinomial_words(spec: FieldSpec) -> Vec<u64> {
    let mut f = vec![0u64; words_for(spec.degree + 1)];
    for e in [0, spec.middle, spec.degree] {
        f[e / 64] |= 1 << (e % 64);
    }
    f
}

/// `x^{2^j} mod f` for j = 0..=max, as an iterator of word vectors.
fn frobenius_orbit(spec: FieldSpec) -> impl Iterator<Item = Vec<u64>> {
    let (s, k) = (spec.degree, spec.middle);
    let mut cur = vec![0u64; words_for(s)];
    cur[0] = 0b10;
    std::iter::successors(Some(cur), move |c| Some(square_mod(c, s, k)))
}

fn x_power_minus_x(mut xp: Vec<u64>) -> Vec<u64> {
    xp[0] ^= 0b10;
    xp
}

fn distinct_primes(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `x^s + x^k + 1` is irreducible iff `x^{2^s} = x (mod f)` and
/// `gcd(x^{2^{s/d}} - x, f) = 1` for every prime `d | s`.
///
/// Limited to `s <= IRREDUCIBILITY_BUDGET`.
pub fn irreducibility_check(spec: FieldSpec) -> Result<bool> {
    let s = spec.degree;
    if s > IRREDUCIBILITY_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "irreducibility check supports s <= {IRREDUCIBILITY_BUDGET}, got {s}"
        )));
    }
    let orbit: Vec<Vec<u64>> = frobenius_orbit(spec).take(s + 1).collect();
    let xs = x_power_minus_x(orbit[s].clone());
    if poly_degree(&xs).is_some() {
        return Ok(false);
    }
    let f = trinomial_words(spec);
    for d in distinct_primes(s) {
        let g = x_power_minus_x(orbit[s / d].clone());
        if !is_one(&poly_gcd(f.clone(), g)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For prime `s`, irreducibility reduces to `x^{2^s} = x (mod f)`.
///
/// No degree budget: the cost is `s` squarings of an `s`-bit polynomial, which
/// is minutes of CPU at `s ~ 10^6`. Returns an error when `s` is not prime.
pub fn prime_degree_irreducible(spec: FieldSpec) -> Result<bool> {
    let s = spec.degree;
    if distinct_primes(s) != [s] {
        return Err(invalid(format!("{s} is not prime")));
    }
    let last = frobenius_orbit(spec).nth(s).expect("orbit is infinite");
    Ok(poly_degree(&x_power_minus_x(last)).is_none())
}

/// True when `x^s + x^k + 1` has no irreducible factor of degree `<= max_degree`.
///
/// Computes `gcd(x^{2^d} - x, f mod (x^{2^d} - x))` for each `d`, folding the
/// exponents of `f` directly, so the cost does not depend on `s`. Only
/// meaningful for `s > max_degree` (an irreducible `f` of small degree is
/// itself such a factor).
pub fn small_factor_free(spec: FieldSpec, max_degree: u32) -> bool {
    assert!(max_degree <= 24, "sieve degree {max_degree} too large");
    for d in 1..=max_degree {
        let big = 1usize << d; // x^big = x modulo g
        let mut g = vec![0u64; words_for(big + 1)];
        g[big / 64] |= 1 << (big % 64);
        g[0] ^= 0b10;
        let mut r = vec![0u64; words_for(big)];
        for e in [spec.degree, spec.middle] {
            let folded = (e - 1) % (big - 1) + 1;
            r[folded / 64] ^= 1 << (folded % 64);
        }
        r[0] ^= 1;
        if !is_one(&poly_gcd(g, r)) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Trinomial table

/// Sorted `(s, k)` pairs of irreducible trinomials, one per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrinomialTable {
    entries: Vec<FieldSpec>,
}

const BUNDLED_TABLE: &str = include_str!("../data/trinomials.txt");

impl TrinomialTable {
    /// Parses `s k` lines in strictly ascending `s`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<FieldSpec> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::TableFormat {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split_whitespace();
            let (s, k) = match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(k), None) => (
                    s.parse::<usize>().map_err(|_| bad("degree is not an integer"))?,
                    k.parse::<usize>().map_err(|_| bad("middle exponent is not an integer"))?,
                ),
                _ => return Err(bad("expected exactly two fields \"s k\"")),
            };
            let spec = FieldSpec::new(s, k).map_err(|_| bad("requires 0 < k < s"))?;
            if entries.last().is_some_and(|prev| prev.degree >= s) {
                return Err(bad("degrees must be strictly ascending"));
            }
            entries.push(spec);
        }
        Ok(TrinomialTable { entries })
    }

    /// The table shipped with the crate.
    pub fn bundled() -> &'static TrinomialTable {
        static TABLE: OnceLock<TrinomialTable> = OnceLock::new();
        TABLE.get_or_init(|| TrinomialTable::parse(BUNDLED_TABLE).expect("bundled table parses"))
    }

    pub fn lookup(&self, s: usize) -> Option<FieldSpec> {
        self.entries
            .binary_search_by_key(&s, |e| e.degree)
            .ok()
            .map(|i| self.entries[i])
    }

    pub fn entries(&self) -> &[FieldSpec] {
        &self.entries
    }

    /// Largest entry with `degree <= s`.
    pub fn at_most(&self, s: usize) -> Option<FieldSpec> {
        let i = self.entries.partition_point(|e| e.degree <= s);
        i.checked_sub(1).map(|i| self.entries[i])
    }
}

/// The bundled trinomial for degree `s`, if one is known.
pub fn trinomial_lookup(s: usize) -> Option<FieldSpec> {
    TrinomialTable::bundled().lookup(s)
}
