//! Exact cyclic convolution over the integers via a number-theoretic transform.
//!
//! A plan of length `L` works modulo a single prime `q ≡ 1 (mod 2L)` chosen as
//! the smallest such prime above `max(L, 2^31)`. Any convolution whose true
//! coefficients stay below `q` (in particular every convolution of bit
//! sequences, whose coefficients are at most `L`) is recovered exactly.
//!
//! Arithmetic is Montgomery form with `R = 2^32`, so `q` must stay below
//! `2^32`; lengths whose prime would exceed that are rejected.

use crate::error::{Error, Result};

/// Largest supported transform length.
pub const MAX_LEN: usize = 1 << 30;

const MIN_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy)]
struct Montgomery {
    q: u32,
    /// `-q^{-1} mod 2^32` is not needed by the subtraction form; this is `q^{-1}`.
    q_inv: u32,
    /// `R^2 mod q`, for conversion into Montgomery form.
    r2: u32,
}

impl Montgomery {
    fn new(q: u32) -> Self {
        debug_assert!(q % 2 == 1);
        let mut inv: u32 = 1;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = (1u64 << 32) % q as u64;
        let r2 = ((r * r) % q as u64) as u32;
        Montgomery { q, q_inv: inv, r2 }
    }

    /// `t * 2^-32 mod q` for `t < q * 2^32`.
    #[inline(always)]
    fn reduce(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.q_inv);
        let mq = m as u64 * self.q as u64;
        // low halves of t and mq agree, so the difference is exact in the high half
        let (hi, borrow) = ((t >> 32) as u32).overflowing_sub((mq >> 32) as u32);
        if borrow {
            hi.wrapping_add(self.q)
        } else {
            hi
        }
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(a as u64 * b as u64)
    }

    fn to_mont(&self, a: u32) -> u32 {
        self.mul(a, self.r2)
    }

    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.q as u64 {
            (s - self.q as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline(always)]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.q)
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(q: u64) -> u64 {
    let factors = distinct_prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (q - 1) / f, q) != 1))
        .expect("a prime modulus always has a primitive root")
}

/// Precomputed tables for length-`L` cyclic convolution.
///
/// Immutable after construction and safe to share between threads.
#[derive(Debug, Clone)]
pub struct ConvolutionPlan {
    len: usize,
    modulus: u32,
    /// A primitive `2L`-th root of unity; its square drives the transform.
    psi: u32,
    mont: Montgomery,
    /// Stage tables in Montgomery form: entry `h + j` holds `w_{2h}^j`
    /// for `h = 1, 2, 4, ..., L/2` and `j < h`.
    fwd: Vec<u32>,
    inv: Vec<u32>,
    /// `L^{-1}` in Montgomery form.
    len_inv: u32,
}

/// Builds the plan for power-of-two length `len >= 2`.
pub fn make_plan(len: usize) -> Result<ConvolutionPlan> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::UnsupportedLength(len, "must be a power of two >= 2"));
    }
    if len > MAX_LEN {
        return Err(Error::UnsupportedLength(len, "exceeds the largest supported length"));
    }
    let step = 2 * len as u64;
    let floor = MIN_MODULUS.max(len as u64);
    let mut q = (floor / step + 1) * step + 1;
    while q < (1u64 << 32) && !is_prime_u32(q) {
        q += step;
    }
    if q >= 1u64 << 32 {
        return Err(Error::UnsupportedLength(len, "no prime q = 1 mod 2L below 2^32"));
    }

    let g = primitive_root(q);
    let psi = pow_mod(g, (q - 1) / step, q);
    let omega = psi * psi % q;
    let omega_inv = pow_mod(omega, q - 2, q);
    let mont = Montgomery::new(q as u32);

    let stage_table = |root: u64| {
        let mut table = vec![0u32; len];
        let mut h = 1usize;
        while h < len {
            // w_{2h} = root^(L / 2h)
            let w = pow_mod(root, (len / (2 * h)) as u64, q);
            let mut cur = 1u64;
            for j in 0..h {
                table[h + j] = mont.to_mont(cur as u32);
                cur = cur * w % q;
            }
            h <<= 1;
        }
        table
    };

    Ok(ConvolutionPlan {
        len,
        modulus: q as u32,
        psi: psi as u32,
        mont,
        fwd: stage_table(omega),
        inv: stage_table(omega_inv),
        len_inv: mont.to_mont(pow_mod(len as u64, q - 2, q) as u32),
    })
}

impl ConvolutionPlan {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The primitive `2L`-th root of unity the plan was built from.
    pub fn root_2l(&self) -> u32 {
        self.psi
    }

    /// Decimation in frequency: natural order in, bit-reversed order out.
    fn dif(&self, a: &mut [u32]) {
        let m = &self.mont;
        let n = a.len();
        let mut h = n / 2;
        while h >= 1 {
            let tw = &self.fwd[h..2 * h];
            for block in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let u = *x;
                    let v = *y;
                    *x = m.add(u, v);
                    *y = m.mul(m.sub(u, v), w);
                }
            }
            h /= 2;
        }
    }

    /// Inverse decimation in time: bit-reversed in, natural out, unscaled.
    fn dit_inverse(&self, a: &mut [u32]) {
        let m = &self.mont;
        let n = a.len();
        let mut h = 1;
        while h < n {
            let tw = &self.inv[h..2 * h];
            for block in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let u = *x;
                    let v = m.mul(*y, w);
                    *x = m.add(u, v);
                    *y = m.sub(u, v);
                }
            }
            h *= 2;
        }
    }

    fn check_len(&self, a: &[u32]) -> Result<()> {
        if a.len() != self.len {
            return Err(Error::Length {
                what: "transform input",
                expected: self.len,
                actual: a.len(),
            });
        }
        Ok(())
    }

    /// Forward transform in natural order: `A_j = sum_i a_i w^{ij} mod q`.
    pub fn forward(&self, a: &mut [u32]) -> Result<()> {
        self.check_len(a)?;
        self.dif(a);
        bit_reverse(a);
        Ok(())
    }

    /// Inverse of [`forward`](Self::forward), including the `1/L` scale.
    pub fn inverse(&self, a: &mut [u32]) -> Result<()> {
        self.check_len(a)?;
        bit_reverse(a);
        self.dit_inverse(a);
        for x in a.iter_mut() {
            *x = self.mont.mul(*x, self.len_inv);
        }
        Ok(())
    }

    /// Length-`L` cyclic convolution modulo `q`; inputs are zero-padded to `L`
    /// and entries must already be reduced below `q`.
    pub fn convolve(&self, a: &[u32], b: &[u32]) -> Result<Vec<u32>> {
        for (what, v) in [("left operand", a), ("right operand", b)] {
            if v.len() > self.len {
                return Err(Error::Length {
                    what,
                    expected: self.len,
                    actual: v.len(),
                });
            }
        }
        let mut fa = self.padded(a);
        self.dif(&mut fa);
        let mut fb = self.padded(b);
        self.dif(&mut fb);
        Ok(self.finish(fa, &fb))
    }

    /// Cyclic square of `a`; one forward transform instead of two.
    pub fn convolve_square(&self, a: &[u32]) -> Result<Vec<u32>> {
        if a.len() > self.len {
            return Err(Error::Length {
                what: "operand",
                expected: self.len,
                actual: a.len(),
            });
        }
        let mut fa = self.padded(a);
        self.dif(&mut fa);
        let copy = fa.clone();
        Ok(self.finish(fa, &copy))
    }

    fn padded(&self, a: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len);
        out.extend_from_slice(a);
        out.resize(self.len, 0);
        out
    }

    fn finish(&self, mut fa: Vec<u32>, fb: &[u32]) -> Vec<u32> {
        let m = &self.mont;
        // Montgomery product drops a factor R; fold it back in with the 1/L scale.
        let scale = m.mul(self.len_inv, m.r2);
        for (x, &y) in fa.iter_mut().zip(fb) {
            *x = m.mul(m.mul(*x, y), scale);
        }
        self.dit_inverse(&mut fa);
        fa
    }
}

fn bit_reverse(a: &mut [u32]) {
    let n = a.len();
    let shift = usize::BITS - n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if i < j {
            a.swap(i, j);
        }
    }
}

/// Exact length-`L` cyclic convolution of two integer sequences.
pub fn cyclic_convolve(a: &[u32], b: &[u32], plan: &ConvolutionPlan) -> Result<Vec<u32>> {
    let q = plan.modulus();
    if a.iter().chain(b).any(|&x| x >= q) {
        return Err(Error::InvalidParameter(format!(
            "sequence entries must be below the modulus {q}"
        )));
    }
    plan.convolve(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_roundtrip() {
        let m = Montgomery::new(3221225473);
        for &(a, b) in &[(1u32, 1u32), (2, 3), (3221225472, 3221225472), (123456789, 987654321)] {
            let expect = (a as u64 * b as u64 % 3221225473) as u32;
            assert_eq!(m.mul(m.to_mont(a), b), expect);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(make_plan(3), Err(Error::UnsupportedLength(3, _))));
        assert!(make_plan(1).is_err());
        assert!(make_plan(0).is_err());
        assert!(make_plan(MAX_LEN * 2).is_err());
    }

    #[test]
    fn smallest_plan_has_valid_prime() {
        let plan = make_plan(4).unwrap();
        let q = plan.modulus() as u64;
        assert_eq!(q % 8, 1);
        assert!(q > 1 << 31);
        assert!(is_prime_u32(q));
    }

    #[test]
    fn root_has_exact_order_2l() {
        for log in 1..12 {
            let plan = make_plan(1 << log).unwrap();
            let q = plan.modulus() as u64;
            let psi = plan.root_2l() as u64;
            assert_eq!(pow_mod(psi, 2 << log, q), 1);
            assert_eq!(pow_mod(psi, 1 << log, q), q - 1);
        }
    }

    #[test]
    fn delta_is_identity() {
        let plan = make_plan(4).unwrap();
        assert_eq!(cyclic_convolve(&[1, 0, 0, 0], &[5, 6, 7, 8], &plan).unwrap(), vec![5, 6, 7, 8]);
        assert_eq!(cyclic_convolve(&[1, 1, 0, 0], &[1, 1, 0, 0], &plan).unwrap(), vec![1, 2, 1, 0]);
        assert_eq!(cyclic_convolve(&[0; 4], &[9, 9, 9, 9], &plan).unwrap(), vec![0; 4]);
    }

    #[test]
    fn wraps_cyclically() {
        let plan = make_plan(4).unwrap();
        // x^3 * x^2 = x^5 = x^1 in Z[x]/(x^4 - 1)
        assert_eq!(cyclic_convolve(&[0, 0, 0, 1], &[0, 0, 1], &plan).unwrap(), vec![0, 1, 0, 0]);
    }

    #[test]
    fn overlong_input_is_rejected() {
        let plan = make_plan(4).unwrap();
        assert!(matches!(
            cyclic_convolve(&[1; 5], &[1], &plan),
            Err(Error::Length { actual: 5, .. })
        ));
        let mut buf = vec![0u32; 8];
        assert!(plan.forward(&mut buf).is_err());
    }
}
