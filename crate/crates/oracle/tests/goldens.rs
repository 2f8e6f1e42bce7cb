//! Values computed once by the brute-force references and frozen.

use raz_core::extractor::{sd_exhaustive, ExtractorInstance, Ratio, SdMode};
use raz_core::generator::make_generator_spec;
use raz_core::params::{optimize_min_k2, FreeParams, Model, SourcePair};
use raz_core::BitVector;
use raz_oracle::{
    alpha_of, bias_exhaustive, block_by_sum, feasible_exhaustive, flat_source, SearchLimits,
};

fn ratio(r: Ratio) -> (u128, u128) {
    (r.num, r.den)
}

#[test]
fn bias_at_eight_bits() {
    let spec = make_generator_spec(8, 1, 2).unwrap();
    assert_eq!(ratio(bias_exhaustive(&spec, 2, 1).unwrap()), (16, 256));
    assert_eq!(ratio(bias_exhaustive(&spec, 2, 2).unwrap()), (16, 256));
    let spec = make_generator_spec(8, 2, 2).unwrap();
    assert_eq!(ratio(bias_exhaustive(&spec, 2, 1).unwrap()), (16, 256));
    assert_eq!(ratio(bias_exhaustive(&spec, 2, 4).unwrap()), (48, 256));
}

#[test]
fn bias_rejects_empty_tests_and_large_budgets() {
    let spec = make_generator_spec(8, 1, 2).unwrap();
    assert!(bias_exhaustive(&spec, 2, 0).is_err());
    let big = make_generator_spec(30, 2, 6).unwrap();
    assert!(bias_exhaustive(&big, 6, 4).is_err());
}

#[test]
fn nu_copy_bits_are_unbiased() {
    // alpha = 0 makes block 0 a copy of nu; any single bit there is uniform
    let spec = make_generator_spec(8, 2, 0).unwrap();
    assert_eq!(bias_exhaustive(&spec, 0, 1).unwrap().num, 0);
}

#[test]
fn seeded_flat_sources() {
    assert_eq!(flat_source(4, 2, 7).unwrap().support, vec![2, 4, 13, 14]);
    assert_eq!(flat_source(4, 2, 7).unwrap(), flat_source(4, 2, 7).unwrap());
    assert_eq!(
        flat_source(8, 3, 1).unwrap().support,
        vec![20, 53, 56, 98, 100, 136, 151, 247]
    );
    assert_eq!(flat_source(5, 5, 3).unwrap().support, (0..32).collect::<Vec<u64>>());
    assert_eq!(flat_source(5, 0, 3).unwrap().support.len(), 1);
    assert!(flat_source(3, 4, 0).is_err());
}

#[test]
fn distance_on_seeded_sources() {
    let inst = ExtractorInstance::new(8, 2, 1, 2).unwrap();
    let x = flat_source(8, 3, 1).unwrap().distribution();
    let y = flat_source(2, 1, 2).unwrap().distribution();
    let sd = |mode| sd_exhaustive(&inst, &x, &y, mode).unwrap().to_f64();
    assert_eq!(sd(SdMode::Weak), 1.0 / 16.0);
    assert_eq!(sd(SdMode::StrongInX), 5.0 / 16.0);
    assert_eq!(sd(SdMode::StrongInY), 1.0 / 16.0);
}

#[test]
fn extraction_at_fourteen_bits() {
    // x = bytes 5a a3 (14 bits), y = 5 (3 bits), l = 2, m = 4
    let spec = make_generator_spec(14, 2, 3).unwrap();
    let x = BitVector::from_bytes_lsb(&[0x5a, 0xa3], 14).unwrap();
    let alpha = alpha_of(5, 3, spec.field()).unwrap();
    let block = block_by_sum(&spec, &x, &alpha).unwrap();
    assert_eq!(block.slice(0, 4).to_u64(), 0b1011);
    let inst = ExtractorInstance::new(14, 3, 4, 2).unwrap();
    let out = inst.extract(&x, &BitVector::from_u64(5, 3)).unwrap();
    assert_eq!(out.to_bytes_lsb(), vec![0x0b]);
}

#[test]
fn least_second_entropy_for_one_bit() {
    let limits = SearchLimits { max_l: 20, max_p: 1000 };
    let at = |k2| SourcePair::new(10_000, 8000, 5000, k2).unwrap();
    let found = feasible_exhaustive(&at(74), -16.0, Model::Weak, 1, limits);
    assert_eq!(found, Some(FreeParams { p: 154, l: 8 }));
    assert_eq!(feasible_exhaustive(&at(73), -16.0, Model::Weak, 1, limits), None);

    let o = optimize_min_k2(10_000, 8000, 5000, -16.0, 1, Model::Weak)
        .unwrap()
        .feasible()
        .unwrap();
    assert_eq!(o.claim.k2, 74);
    assert_eq!(o.params, FreeParams { p: 154, l: 8 });
}
