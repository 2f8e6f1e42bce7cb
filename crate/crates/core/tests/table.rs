use raz_core::gf2x::{
    irreducibility_check, prime_degree_irreducible, small_factor_free, trinomial_lookup, FieldSpec, TrinomialTable,
    IRREDUCIBILITY_BUDGET,
};

const LARGE_BENCH_DEGREES: [usize; 5] = [9689, 23209, 132049, 756839, 3021377];

fn large_entries() -> Vec<FieldSpec> {
    TrinomialTable::bundled()
        .entries()
        .iter()
        .copied()
        .filter(|s| s.degree() > IRREDUCIBILITY_BUDGET)
        .collect()
}

#[test]
fn bundled_table_covers_every_small_degree_it_can() {
    let table = TrinomialTable::bundled();
    for s in 2..=IRREDUCIBILITY_BUDGET {
        match table.lookup(s) {
            Some(spec) => assert!(spec.middle() <= s / 2, "s = {s}"),
            // confirm gaps by brute force where that is cheap
            None if s <= 300 => {
                for k in 1..=s / 2 {
                    let spec = FieldSpec::new(s, k).unwrap();
                    assert!(!irreducibility_check(spec).unwrap(), "{spec:?} missing");
                }
            }
            None => {}
        }
    }
    assert_eq!(table.entries().iter().filter(|e| e.degree() <= 4096).count(), 2114);
    for s in (8..=4096).step_by(8) {
        assert!(table.lookup(s).is_none());
    }
    assert!(trinomial_lookup(13).is_none());
    assert_eq!(trinomial_lookup(9).map(|s| s.middle()), Some(1));
    assert_eq!(trinomial_lookup(3).map(|s| s.middle()), Some(1));
}

#[test]
fn large_entries_have_no_small_factors() {
    let large = large_entries();
    for s in LARGE_BENCH_DEGREES.into_iter().chain([74_207_281]) {
        assert!(large.iter().any(|e| e.degree() == s), "{s} missing");
    }
    for spec in large {
        assert!(small_factor_free(spec, 16), "{spec:?}");
    }
}

#[test]
fn sieve_catches_planted_factors() {
    // x^4 + x + 1 has order 15, so it divides x^s + x^k + 1 whenever
    // s = 4 and k = 1 (mod 15)
    for (s, k) in [(19, 1), (34, 16), (49, 31)] {
        let spec = FieldSpec::new(s, k).unwrap();
        assert!(!small_factor_free(spec, 4), "{spec:?}");
        assert!(!small_factor_free(spec, 16), "{spec:?}");
    }
}

/// Full check of the bench degrees by `x^{2^s} = x`; minutes of CPU.
#[test]
#[ignore]
fn bench_degrees_are_irreducible() {
    for s in LARGE_BENCH_DEGREES {
        let spec = trinomial_lookup(s).unwrap();
        assert!(prime_degree_irreducible(spec).unwrap(), "{spec:?}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = TrinomialTable::parse("2 1\n3 1\n3 1\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = TrinomialTable::parse("# header\n5 x\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = TrinomialTable::parse("5 5\n").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
    let t = TrinomialTable::parse("# c\n\n2 1  # inline\n7 1\n").unwrap();
    assert_eq!(t.entries().len(), 2);
    assert_eq!(t.at_most(6).map(|s| s.degree()), Some(2));
}
