//! Prints the smallest-k irreducible trinomial for every degree up to a bound.
//!
//! `cargo run --release -p raz-core --example trinomial_table -- 4096`

use raz_core::gf2x::{irreducibility_check, small_factor_free, FieldSpec};

const SIEVE_DEGREE: u32 = 6;

fn main() {
    let max: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("degree bound"))
        .unwrap_or(raz_core::gf2x::IRREDUCIBILITY_BUDGET);
    for s in 2..=max {
        // x^s + x^k + 1 and x^s + x^{s-k} + 1 are reciprocal, so k <= s/2 suffices
        for k in 1..=s / 2 {
            let spec = FieldSpec::new(s, k).expect("0 < k < s");
            if s > SIEVE_DEGREE as usize && !small_factor_free(spec, SIEVE_DEGREE) {
                continue;
            }
            if irreducibility_check(spec).expect("within budget") {
                println!("{s} {k}");
                break;
            }
        }
    }
}
