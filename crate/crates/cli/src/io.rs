//! Bit-stream files: raw bytes or hex text, bit `i` = bit `i % 8` of byte `i / 8`.

use std::fs;
use std::path::Path;

use raz_core::BitVector;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Raw,
    Hex,
}

pub fn decode_hex(text: &str) -> Result<Vec<u8>, String> {
    let digits: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if digits.len() % 2 != 0 {
        return Err("hex input has an odd number of digits".into());
    }
    digits
        .chunks(2)
        .map(|pair| {
            let s = std::str::from_utf8(pair).map_err(|_| "non-ASCII hex input".to_string())?;
            u8::from_str_radix(s, 16).map_err(|_| format!("invalid hex byte {s:?}"))
        })
        .collect()
}

pub fn encode_hex(bytes: &[u8]) -> String {
    let mut s: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    s.push('\n');
    s
}

/// The first `bits` bits of a file.
pub fn read_bits(path: &Path, format: Format, bits: usize, what: &str) -> Result<BitVector, Failure> {
    let raw = fs::read(path)
        .map_err(|e| Failure::io(format!("cannot read {what} {}: {e}", path.display())))?;
    let bytes = match format {
        Format::Raw => raw,
        Format::Hex => {
            let text = String::from_utf8(raw)
                .map_err(|_| Failure::usage(format!("{what} {} is not hex text", path.display())))?;
            decode_hex(&text).map_err(|e| Failure::usage(format!("{what}: {e}")))?
        }
    };
    if bytes.len() * 8 < bits {
        return Err(Failure::usage(format!(
            "{what} {} holds {} bits, need at least {bits}",
            path.display(),
            bytes.len() * 8
        )));
    }
    BitVector::from_bytes_lsb(&bytes, bits).map_err(Failure::from)
}

pub fn write_bits(path: &Path, format: Format, bits: &BitVector) -> Result<(), Failure> {
    let bytes = bits.to_bytes_lsb();
    let data = match format {
        Format::Raw => bytes,
        Format::Hex => encode_hex(&bytes).into_bytes(),
    };
    fs::write(path, data).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let bytes = vec![0x00, 0x7f, 0xa5, 0xff];
        assert_eq!(decode_hex(&encode_hex(&bytes)).unwrap(), bytes);
        assert_eq!(decode_hex("a5 0F\n").unwrap(), vec![0xa5, 0x0f]);
        assert!(decode_hex("abc").is_err());
        assert!(decode_hex("zz").is_err());
    }
}
