mod common;

use common::h;
use eacq_core::codes::{block_erasure_for, classical_to_eacq, encoding_ensemble, RSCode};
use eacq_core::converse::{
    bounds_from_info, check_rates, direct_quantities, erasure_single_letter, erasure_witness_channel,
    information_quantities, random_witness, thm1_bounds, CodeRates,
};
use eacq_core::hilbert::{CQEnsemble, DensityMatrix, SystemLayout};
use eacq_core::region::rat;
use eacq_core::sparse::Mixture;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// √p|00⟩ + √(1−p)|11⟩ on (A, Ap).
fn skewed(p: f64) -> DensityMatrix {
    let mut v = nalgebra::DVector::zeros(4);
    v[0] = eacq_core::hilbert::C64::new(p.sqrt(), 0.0);
    v[3] = eacq_core::hilbert::C64::new((1.0 - p).sqrt(), 0.0);
    DensityMatrix::pure(SystemLayout::new([("A", 2), ("Ap", 2)]).unwrap(), &v).unwrap()
}

#[test]
fn erasure_quantities_match_hand_formulas() {
    // With one pure witness, S(A′) = h(p), and under erasure δ:
    // I(A:B) = 2(1−δ)h, I(A⟩B) = (1−2δ)h, I(U:B) = 0.
    for (p, delta) in [(0.5, rat(0, 1)), (0.2, rat(1, 4)), (0.9, rat(2, 3))] {
        let ens = CQEnsemble::single(skewed(p));
        let ch = erasure_witness_channel(2, &delta).unwrap();
        let d = eacq_core::region::rational_to_f64(&delta);
        let hp = h(&[p, 1.0 - p]);
        let b = thm1_bounds(&ens, &ch, &CodeRates::default()).unwrap();
        assert!((b.info.i_ua_b - 2.0 * (1.0 - d) * hp).abs() < 1e-12);
        assert!((b.info.i_a_bu - (1.0 - 2.0 * d) * hp).abs() < 1e-12);
        assert!(b.info.i_u_b.abs() < 1e-12);
    }
}

#[test]
fn rs_ensemble_quantities_are_classical() {
    // The RS witness is a uniform mixture of product codewords: I(U:B) is
    // k log q below d erasures and the coherent information vanishes.
    let code = classical_to_eacq(&RSCode::new(5, 4, 2).unwrap()).unwrap();
    let (items, a) = encoding_ensemble(&code).unwrap();
    let on: Vec<&str> = a.iter().map(String::as_str).collect();
    for w in 0..=4 {
        let info = information_quantities(&items, &block_erasure_for(&code, w).unwrap(), &on).unwrap();
        let want = if w <= 2 { 2.0 * 5f64.log2() } else { (4 - w) as f64 * 5f64.log2() };
        assert!((info.i_u_b - want).abs() < 1e-9, "w={w}: {}", info.i_u_b);
        assert!(info.i_a_bu.abs() < 1e-9);
    }
}

#[test]
fn error_terms_loosen_every_bound() {
    let ens = CQEnsemble::single(skewed(0.3));
    let ch = erasure_witness_channel(2, &rat(1, 3)).unwrap();
    let tight = thm1_bounds(&ens, &ch, &CodeRates::default()).unwrap();
    let rates = CodeRates { c2: 1.0, q2: 1.0, epsilon: 0.05, ..Default::default() };
    let loose = thm1_bounds(&ens, &ch, &rates).unwrap();
    assert!(loose.b1 > tight.b1 && loose.b2 > tight.b2 && loose.b3 > tight.b3);
}

#[test]
fn invalid_rates_are_rejected() {
    let info = eacq_core::converse::InfoQuantities { i_ua_b: 1.0, i_a_bu: 0.0, i_u_b: 0.0 };
    assert!(bounds_from_info(info, &CodeRates { c1: -1.0, ..Default::default() }).is_err());
    assert!(bounds_from_info(info, &CodeRates { epsilon: 1.5, ..Default::default() }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sparse_and_dense_paths_agree(seed in any::<u64>(), size in 1usize..=3, num in 0i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = SystemLayout::new([("A", 3), ("Ap", 2)]).unwrap();
        let ens = random_witness(&l, size, &mut rng).unwrap();
        let delta = rat(num, 4);
        let ch = erasure_witness_channel(2, &delta).unwrap();
        let items: Vec<(f64, Mixture)> = ens.items().iter().map(|(p, s)| (*p, Mixture::from_density(s))).collect();
        let sparse = information_quantities(&items, &ch, &["Ap"]).unwrap();
        let dense = direct_quantities(&ens, &ch, &["Ap"]).unwrap();
        prop_assert!((sparse.i_ua_b - dense.i_ua_b).abs() < 1e-9);
        prop_assert!((sparse.i_a_bu - dense.i_a_bu).abs() < 1e-9);
        prop_assert!((sparse.i_u_b - dense.i_u_b).abs() < 1e-9);
        let e = erasure_single_letter(&ens, eacq_core::region::rational_to_f64(&delta), "Ap").unwrap();
        prop_assert!((e.i2 - dense.i_a_bu).abs() < 1e-9);
    }

    #[test]
    fn lowering_rates_keeps_them_admissible(c in 0.0f64..2.0, q in 0.0f64..1.0, drop in 0.0f64..1.0) {
        let ens = CQEnsemble::single(DensityMatrix::maximally_entangled("A", "Ap", 2).unwrap());
        let ch = erasure_witness_channel(2, &rat(1, 4)).unwrap();
        let rates = CodeRates { c2: c, q2: q, ..Default::default() };
        let b = thm1_bounds(&ens, &ch, &rates).unwrap();
        if check_rates(&b, &rates) {
            let lower = CodeRates { c2: c * drop, q2: q * drop, ..Default::default() };
            let b2 = thm1_bounds(&ens, &ch, &lower).unwrap();
            prop_assert!(check_rates(&b2, &lower));
        }
    }
}
