//! Packed little-endian bit vectors.
//!
//! Bit `i` is the coefficient of `x^i` when a vector is read as a binary
//! polynomial, and bit `i` of a byte stream is bit `i % 8` of byte `i / 8`.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// An ordered sequence of bits with an explicit length.
///
/// Storage is packed into `u64` words; bits at positions `>= len` in the last
/// word are always zero, so structural equality is bit equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// The low `len` bits of `value`; `len` may exceed 64 (zero extension).
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = BitVector::default();
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Builds a vector from packed words, discarding anything past `len`.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVector { words, len };
        v.clear_tail();
        v
    }

    /// Reads the first `len` bits of an LSB-first byte stream.
    pub fn from_bytes_lsb(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() * 8 < len {
            return Err(Error::Length {
                what: "bit stream",
                expected: len,
                actual: bytes.len() * 8,
            });
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, &byte) in bytes.iter().take(len.div_ceil(8)).enumerate() {
            words[i / 8] |= (byte as u64) << (8 * (i % 8));
        }
        Ok(Self::from_words(words, len))
    }

    /// Packs into bytes, LSB first; the final byte is zero-padded.
    pub fn to_bytes_lsb(&self) -> Vec<u8> {
        (0..self.len.div_ceil(8))
            .map(|i| (self.words[i / 8] >> (8 * (i % 8))) as u8)
            .collect()
    }

    /// The vector as an integer; requires `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 on a {}-bit vector", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the highest set bit, i.e. the polynomial degree.
    pub fn degree(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + 63 - w.leading_zeros() as usize)
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len, "slice {start}..{end} of {}", self.len);
        BitVector::from_words(shr_words(&self.words, start), end - start)
    }

    /// Changes the length, zero-filling or truncating at the top.
    pub fn resize(&mut self, len: usize) {
        self.words.resize(words_for(len), 0);
        self.len = len;
        self.clear_tail();
    }

    /// In-place XOR; both operands must have the same length.
    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Length {
                what: "xor operand",
                expected: self.len,
                actual: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    // Printed LSB first, matching the stream convention.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len)?;
        for b in self.iter().take(256) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 256 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

/// `src >> shift` as a fresh word vector (same word count as `src`).
pub(crate) fn shr_words(src: &[u64], shift: usize) -> Vec<u64> {
    let word_shift = shift / WORD;
    let bit_shift = shift % WORD;
    let n = src.len();
    let mut out = vec![0u64; n];
    if word_shift >= n {
        return out;
    }
    if bit_shift == 0 {
        out[..n - word_shift].copy_from_slice(&src[word_shift..]);
    } else {
        for i in 0..n - word_shift {
            let lo = src[i + word_shift] >> bit_shift;
            let hi = src
                .get(i + word_shift + 1)
                .map_or(0, |&w| w << (WORD - bit_shift));
            out[i] = lo | hi;
        }
    }
    out
}

/// `dst ^= src << shift`, silently dropping bits beyond `dst`.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / WORD;
    let bit_shift = shift % WORD;
    if bit_shift == 0 {
        for (i, &w) in src.iter().enumerate() {
            match dst.get_mut(i + word_shift) {
                Some(d) => *d ^= w,
                None => break,
            }
        }
    } else {
        for (i, &w) in src.iter().enumerate() {
            let j = i + word_shift;
            if j >= dst.len() {
                break;
            }
            dst[j] ^= w << bit_shift;
            if j + 1 < dst.len() {
                dst[j + 1] ^= w >> (WORD - bit_shift);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn little_endian_integer_view() {
        let v = BitVector::from_u64(0b1010, 4);
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![false, true, false, true]);
        assert_eq!(v.degree(), Some(3));
        assert_eq!(BitVector::zeros(9).degree(), None);
    }

    #[test]
    fn trailing_zeros_count_toward_length() {
        let a = BitVector::from_u64(1, 3);
        let b = BitVector::from_u64(1, 5);
        assert_ne!(a, b);
        assert_eq!(a.degree(), b.degree());
    }

    #[test]
    fn byte_stream_convention() {
        // bit i is bit (i mod 8) of byte i/8
        let v = BitVector::from_bytes_lsb(&[0b0000_0110, 0b1000_0000], 16).unwrap();
        assert!(v.get(1) && v.get(2) && v.get(15));
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.to_bytes_lsb(), vec![0b0000_0110, 0b1000_0000]);

        let short = BitVector::from_bytes_lsb(&[0xff], 5).unwrap();
        assert_eq!(short.to_bytes_lsb(), vec![0b1_1111]);
        assert!(BitVector::from_bytes_lsb(&[0xff], 9).is_err());
    }

    #[test]
    fn slicing_across_words() {
        let bits: Vec<bool> = (0..200).map(|i| i % 3 == 0 || i % 7 == 0).collect();
        let v = BitVector::from_bits(bits.iter().copied());
        let s = v.slice(61, 190);
        assert_eq!(s.len(), 129);
        for i in 0..129 {
            assert_eq!(s.get(i), bits[61 + i]);
        }
    }

    #[test]
    fn shifted_xor_matches_bitwise() {
        let src = BitVector::from_bits((0..100).map(|i| i % 5 == 1));
        for shift in [0, 1, 63, 64, 65, 130] {
            let mut dst = vec![0u64; 4];
            xor_shifted(&mut dst, src.words(), shift);
            let out = BitVector::from_words(dst, 256);
            for i in 0..256 {
                let expect = i >= shift && i - shift < 100 && (i - shift) % 5 == 1;
                assert_eq!(out.get(i), expect, "shift {shift} bit {i}");
            }
        }
    }

    #[test]
    fn xor_length_mismatch_is_an_error() {
        let mut a = BitVector::zeros(3);
        assert!(a.xor_assign(&BitVector::zeros(4)).is_err());
    }
}
