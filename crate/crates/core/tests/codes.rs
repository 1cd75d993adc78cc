mod common;

use common::{consistent_messages, mds_error, pattern_channel, patterns, poly_eval};
use eacq_core::codes::{
    block_erasure_for, classical_to_eacq, concat, eaq_fixture, fixture_names, load_fixture, simulate, EACQCode,
    Protocol, RSCode,
};
use eacq_core::hilbert::{mutual_information, partial_trace, DensityMatrix, SystemLayout};
use eacq_core::region::{membership_singleton, RateTriple, SingletonParams};
use eacq_core::Error;
use proptest::prelude::*;

fn rs(q: u64, n: usize, k: usize) -> EACQCode {
    classical_to_eacq(&RSCode::new(q, n, k).unwrap()).unwrap()
}

#[test]
fn rs_encoding_matches_polynomial_oracle() {
    let code = RSCode::new(7, 5, 3).unwrap();
    for m in 0..code.num_messages() {
        let msg = code.message_symbols(m);
        let expect: Vec<u64> = code.points().iter().map(|&x| poly_eval(&msg, x, 7)).collect();
        assert_eq!(code.encode(&msg).unwrap(), expect);
        assert_eq!(code.message_index(&msg), m);
    }
}

#[test]
fn pipeline_error_matches_classical_oracle() {
    for (q, n, k) in [(3u64, 3usize, 2usize), (5, 4, 2), (5, 3, 1)] {
        let code = rs(q, n, k);
        let messages = (q as usize).pow(k as u32);
        for w in 0..=n {
            let eps = simulate(&code, &block_erasure_for(&code, w).unwrap()).unwrap().epsilon;
            let want = mds_error(n, k, w, messages);
            assert!((eps - want).abs() < 1e-12, "RS({q},{n},{k}) w={w}: ε={eps}, oracle {want}");
        }
    }
}

#[test]
fn each_correctable_pattern_is_exact() {
    let code = rs(5, 4, 2);
    for w in 0..=2 {
        for p in patterns(4, w) {
            let r = simulate(&code, &pattern_channel(5, 4, &p)).unwrap();
            assert!(r.epsilon < 1e-12, "pattern {p:?}");
            assert!(r.message_error < 1e-12);
        }
    }
}

#[test]
fn shipped_eaq_codes_decouple_the_reference() {
    for name in fixture_names() {
        let code = load_fixture(eaq_fixture(name).unwrap()).unwrap();
        let p = code.params().unwrap();
        let (n, d, q) = (p.n, p.d, p.q);
        // Run the encoder on its input half of Φ(R, X) ⊗ φ_i and inspect
        // the reduced states of the channel inputs.
        let enc = &code.encoders()[0];
        assert_eq!(enc.n_outcomes(), 1);
        let rx = DensityMatrix::maximally_entangled("R", "X", code.registers().x).unwrap();
        let omega = eacq_core::hilbert::tensor(&rx, code.phi_i()).unwrap();
        let order: Vec<&str> = omega.layout().labels();
        assert_eq!(order[..2], ["R", "X"]);
        let ops = &enc.branches()[0];
        let out = apply_ops(&omega, ops, &["X", "TA"], enc.output());
        let a: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
        for j in patterns(n, d - 1) {
            let sites: Vec<&str> = j.iter().map(|&i| a[i].as_str()).collect();
            let mi = mutual_information(&out, &["R"], &sites).unwrap();
            assert!(mi.abs() < 1e-9, "{name}: I(R:{sites:?}) = {mi}");
        }
        let r = partial_trace(&out, &["R"]).unwrap();
        assert!((r.eigenvalues().iter().map(|v| (v - 1.0 / code.registers().x as f64).abs()).fold(0.0, f64::max)) < 1e-12);
        assert_eq!(code.normalized_triple(q).unwrap(), RateTriple::from_ints(0, (n - d + 1) as i64, (d - 1) as i64));
    }
}

/// Dense application of a single-operator branch to the `on` factors,
/// by explicit Kronecker embedding.
fn apply_ops(
    s: &DensityMatrix,
    ops: &[eacq_core::sparse::SparseOp],
    on: &[&str],
    out_layout: &SystemLayout,
) -> DensityMatrix {
    use nalgebra::DMatrix;
    let labels = s.layout().labels();
    let rest: Vec<&str> = labels.iter().copied().filter(|l| !on.contains(l)).collect();
    let order: Vec<&str> = on.iter().copied().chain(rest.iter().copied()).collect();
    let p = s.permute(&order).unwrap();
    let rest_dim: usize = rest.iter().map(|l| s.layout().dim_of(l).unwrap()).product();
    let mut m = DMatrix::zeros(out_layout.total_dim() * rest_dim, out_layout.total_dim() * rest_dim);
    for op in ops {
        let k = op.to_dense().kronecker(&DMatrix::identity(rest_dim, rest_dim));
        m += &k * p.matrix() * k.adjoint();
    }
    let layout = out_layout
        .concat(&SystemLayout::new(rest.iter().map(|l| (l.to_string(), s.layout().dim_of(l).unwrap()))).unwrap())
        .unwrap();
    DensityMatrix::new(layout, m).unwrap()
}

#[test]
fn concatenated_codes_stay_exact_and_in_region() {
    let base = rs(5, 4, 2);
    let c = concat(&base, Protocol::Teleport, 5, 1).unwrap();
    let t = c.normalized_triple(5).unwrap();
    assert_eq!(t, RateTriple::from_ints(0, 1, 1));
    let p = SingletonParams::new(4, 3, 5).unwrap();
    assert!(membership_singleton(&p, &t).is_member());
    assert!(simulate(&c, &block_erasure_for(&c, 2).unwrap()).unwrap().epsilon < 1e-12);
}

#[test]
fn incompatible_concatenation_is_rejected() {
    let base = rs(5, 4, 1);
    assert!(matches!(concat(&base, Protocol::Teleport, 5, 1), Err(Error::Composition(_))));
    assert!(matches!(concat(&base, Protocol::DenseCode, 5, 1), Err(Error::Composition(_))));
}

#[test]
fn json_roundtrip_preserves_behaviour() {
    let code = rs(3, 3, 2);
    let back = EACQCode::from_json(&code.to_json()).unwrap();
    for w in 0..=3 {
        let a = simulate(&code, &block_erasure_for(&code, w).unwrap()).unwrap().epsilon;
        let b = simulate(&back, &block_erasure_for(&back, w).unwrap()).unwrap().epsilon;
        assert!((a - b).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn erasure_decoding_agrees_with_enumeration(
        qi in 0usize..3,
        k in 1usize..=3,
        extra in 0usize..=2,
        m in any::<u64>(),
        mask in any::<u32>(),
    ) {
        let q = [3u64, 5, 7][qi];
        let n = (k + extra).min(q as usize);
        prop_assume!(k <= n);
        let code = RSCode::new(q, n, k).unwrap();
        let msg = code.message_symbols((m % code.num_messages() as u64) as usize);
        let word = code.encode(&msg).unwrap();
        let received: Vec<Option<u64>> = word
            .iter()
            .enumerate()
            .map(|(i, &s)| if mask >> i & 1 == 1 { None } else { Some(s) })
            .collect();
        let survivors = received.iter().filter(|r| r.is_some()).count();
        let oracle = consistent_messages(q, k, code.points(), &received);
        match code.erasure_decode(&received) {
            Ok(dec) => {
                prop_assert!(survivors >= k);
                prop_assert_eq!(oracle.len(), 1);
                prop_assert_eq!(&dec, &msg);
            }
            Err(_) => {
                prop_assert!(survivors < k);
                prop_assert!(oracle.len() > 1);
            }
        }
    }
}
