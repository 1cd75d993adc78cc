use super::*;
use crate::channels::{input_layout, output_layout};
use crate::converse::{check_rates, information_quantities, bounds_from_info};
use crate::hilbert::{partial_trace, C64};
use crate::region::{membership_singleton, SingletonParams};

fn rs(q: u64, n: usize, k: usize) -> EACQCode {
    classical_to_eacq(&RSCode::new(q, n, k).unwrap()).unwrap()
}

fn eps(code: &EACQCode, w: usize) -> f64 {
    simulate(code, &block_erasure_for(code, w).unwrap()).unwrap().epsilon
}

/// One classical bit on A1 and one qubit on A2.
fn bit_and_qubit() -> EACQCode {
    let regs = Registers {
        m: 2,
        v: 1,
        x: 2,
        w: 1,
        ta: 1,
        tb: 1,
        ta_out: 1,
        tb_out: 1,
        a: input_layout(2, 2),
        b: output_layout(2, 2),
    };
    let one = C64::new(1.0, 0.0);
    let encoders = (0..2)
        .map(|m| {
            let op = SparseOp::from_triplets(4, 2, vec![(m * 2, 0, one), (m * 2 + 1, 1, one)]);
            Instrument::new(regs.encoder_input(), regs.encoder_output().unwrap(), vec![vec![op]]).unwrap()
        })
        .collect();
    let mut branches = vec![Vec::new(), Vec::new()];
    for b1 in 0..3 {
        let mut t: Vec<(usize, usize, C64)> = (0..2).map(|x| (x, b1 * 3 + x, one)).collect();
        branches[b1 % 2].push(SparseOp::from_triplets(2, 9, std::mem::take(&mut t)));
        branches[b1 % 2].push(SparseOp::from_triplets(2, 9, vec![(0, b1 * 3 + 2, one)]));
    }
    let decoder = Instrument::new(regs.decoder_input().unwrap(), regs.decoder_output(), branches).unwrap();
    EACQCode::new(
        "bit+qubit",
        regs,
        phi_trivial(labels::TA, labels::TB).unwrap(),
        phi_trivial(labels::TA_OUT, labels::TB_OUT).unwrap(),
        encoders,
        vec![decoder],
        None,
    )
    .unwrap()
}

#[test]
fn ideal_output_examples() {
    let code = bit_and_qubit();
    let ideal = code.ideal_output().unwrap();
    assert_eq!(ideal.dim(), 16);
    assert!((ideal.trace() - 1.0).abs() < 1e-12);
    let rx = partial_trace(&ideal, &[labels::R, labels::X_HAT]).unwrap();
    assert!((rx.purity() - 1.0).abs() < 1e-12);
    let trivial = qubit_to_ebit(2).unwrap();
    let regs = Registers {
        w: 1,
        ta_out: 1,
        tb_out: 1,
        ..trivial.registers().clone()
    };
    let enc = Instrument::new(regs.encoder_input(), regs.encoder_output().unwrap(), vec![vec![SparseOp::identity(1)]]).unwrap();
    let dec = Instrument::new(regs.decoder_input().unwrap(), regs.decoder_output(), vec![vec![SparseOp::identity(1)]]).unwrap();
    let t = EACQCode::new(
        "trivial",
        regs,
        phi_trivial(labels::TA, labels::TB).unwrap(),
        phi_trivial(labels::TA_OUT, labels::TB_OUT).unwrap(),
        vec![enc],
        vec![dec],
        None,
    )
    .unwrap();
    let s = t.ideal_output().unwrap();
    assert_eq!(s.dim(), 1);
    assert!((s.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
}

#[test]
fn hand_built_code_is_exact_without_erasures_only() {
    let code = bit_and_qubit();
    assert!(eps(&code, 0) < 1e-12);
    assert!(eps(&code, 1) > 0.1);
    assert_eq!(code.normalized_triple(2).unwrap(), RateTriple::from_ints(1, 1, 0));
}

#[test]
fn rs_code_distance_and_rates() {
    let code = rs(5, 4, 2);
    assert!(verify_min_distance(&code, 3).unwrap());
    assert!(!verify_min_distance(&code, 4).unwrap());
    let rates = code.rates(0.0).unwrap();
    assert!((rates.c2 - 2.0 * 5f64.log2()).abs() < 1e-12);
    assert_eq!(rates.net().1, 0.0);
    let t = code.normalized_triple(5).unwrap();
    assert_eq!(t, RateTriple::from_ints(2, 0, 0));
    let p = SingletonParams::new(4, 3, 5).unwrap();
    assert!(membership_singleton(&p, &t).is_member());
}

#[test]
fn rs_without_redundancy_has_distance_one() {
    let code = rs(3, 3, 3);
    assert!(verify_min_distance(&code, 1).unwrap());
    assert!(!verify_min_distance(&code, 2).unwrap());
}

#[test]
fn identity_code_distance_one_only() {
    let code = identity_code(3).unwrap();
    assert!(verify_min_distance(&code, 1).unwrap());
    assert!(!verify_min_distance(&code, 2).unwrap());
    assert!(verify_min_distance(&code, 3).is_err());
}

#[test]
fn pipeline_invariants() {
    for code in [teleport(2).unwrap(), rs(3, 3, 2), bit_and_qubit()] {
        let w = usize::from(!code.a_layout().is_empty());
        let ch = if code.a_layout().is_empty() {
            crate::channels::KrausChannel::identity(SystemLayout::empty())
        } else {
            block_erasure_for(&code, w).unwrap()
        };
        let r = simulate(&code, &ch).unwrap();
        for pv in &r.p_v_given_m {
            assert!((pv.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        for snap in [&r.gamma, &r.omega, &r.omega_bar, &r.gamma_bar] {
            assert!((snap.trace() - 1.0).abs() < 1e-12, "{}", code.name());
        }
        assert!((0.0..=1.0).contains(&r.epsilon));
        let dense = r.gamma_bar.to_density().unwrap();
        let qd = r.gamma_bar.layout().total_dim();
        let m = dense.matrix();
        let mut off: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i / qd != j / qd {
                    off = off.max(m[(i, j)].norm());
                }
            }
        }
        assert!(off <= 1e-12);
    }
}

#[test]
fn protocols_are_exact() {
    let id = crate::channels::KrausChannel::identity(SystemLayout::empty());
    for q in [2, 3] {
        for p in Protocol::ALL {
            let (ray, code) = protocol_instrument(p, q).unwrap();
            let r = simulate(&code, &id).unwrap();
            assert!(r.epsilon <= 1e-12, "{} q={q}: {}", p.name(), r.epsilon);
            assert_eq!(code.normalized_triple(q).unwrap(), ray);
        }
    }
    let dc = dense_code(3).unwrap();
    assert_eq!(dc.m_size(), 9);
    assert!(simulate(&dc, &id).unwrap().message_error < 1e-12);
}

#[test]
fn wrong_channel_shape_is_a_layout_error() {
    let code = rs(5, 4, 2);
    let ch = crate::channels::build_block_erasure(&crate::channels::BlockErasureSpec::new(5, 3, 1).unwrap()).unwrap();
    assert!(matches!(simulate(&code, &ch), Err(Error::Layout(_))));
}

#[test]
fn concat_shifts_rates_and_keeps_zero_error() {
    let base = rs(5, 4, 2);
    let tp = concat(&base, Protocol::Teleport, 5, 1).unwrap();
    assert_eq!(
        tp.normalized_triple(5).unwrap(),
        RateTriple::from_ints(2, 0, 0).add(&Protocol::Teleport.ray())
    );
    assert!(eaq_eps(&tp, 2) <= 1e-12);
    assert!(verify_min_distance(&tp, 3).unwrap());

    let eaq = max_ent_eaq_small(2, 2, 3).unwrap();
    let a1 = RateTriple::from_ints(0, 1, 1);
    for p in [Protocol::DenseCode, Protocol::QubitToEbit] {
        let c = concat(&eaq, p, 3, 1).unwrap();
        assert_eq!(c.normalized_triple(3).unwrap(), a1.add(&p.ray()), "{}", p.name());
        assert!(eaq_eps(&c, 1) <= 1e-12, "{}", p.name());
    }
    let same = concat(&base, Protocol::DenseCode, 5, 0).unwrap();
    assert_eq!(same.normalized_triple(5).unwrap(), base.normalized_triple(5).unwrap());
    assert!(matches!(concat(&base, Protocol::DenseCode, 5, 1), Err(Error::Composition(_))));
    assert!(matches!(concat(&base, Protocol::Teleport, 5, 2), Err(Error::Composition(_))));
}

fn eaq_eps(code: &EACQCode, w: usize) -> f64 {
    eps(code, w)
}

#[test]
fn shipped_eaq_instances() {
    for (n, d, q) in [(3, 2, 2), (2, 2, 3)] {
        let code = max_ent_eaq_small(n, d, q).unwrap();
        assert!(verify_min_distance(&code, d).unwrap());
        let k = (n - d + 1) as i64;
        assert_eq!(code.normalized_triple(q).unwrap(), RateTriple::from_ints(0, k, d as i64 - 1));
        let p = SingletonParams::new(n, d, q).unwrap();
        let m = membership_singleton(&p, &code.normalized_triple(q).unwrap());
        assert!(m.is_member());
    }
    assert!(matches!(max_ent_eaq_small(2, 2, 2), Err(Error::Domain(_))));
    assert!(matches!(max_ent_eaq_small(4, 2, 2), Err(Error::NotImplemented(_))));
}

#[test]
fn search_is_reproducible() {
    let a = search_eaq(2, 2, 3, 1, 1000).unwrap();
    let b = search_eaq(2, 2, 3, 1, 1000).unwrap();
    assert_eq!(a.circuit, b.circuit);
    let fixture: serde_json::Value = serde_json::from_str(eaq_fixture("eaq_2_2_3").unwrap()).unwrap();
    let stored: CliffordCircuit = serde_json::from_value(fixture["provenance"]["circuit"].clone()).unwrap();
    assert_eq!(stored, a.circuit);
}

#[test]
fn json_roundtrip() {
    let code = concat(&max_ent_eaq_small(2, 2, 3).unwrap(), Protocol::QubitToEbit, 3, 1).unwrap();
    let back = EACQCode::from_json(&code.to_json()).unwrap();
    assert_eq!(back.registers(), code.registers());
    assert!(eps(&back, 1) <= 1e-12);
}

#[test]
fn encoding_ensemble_satisfies_converse() {
    let code = rs(5, 4, 2);
    let (items, a) = encoding_ensemble(&code).unwrap();
    assert_eq!(items.len(), 25);
    let ch = block_erasure_for(&code, 2).unwrap();
    let on: Vec<&str> = a.iter().map(String::as_str).collect();
    let info = information_quantities(&items, &ch, &on).unwrap();
    let rates = code.rates(0.0).unwrap();
    let b = bounds_from_info(info, &rates).unwrap();
    assert!(check_rates(&b, &rates));
    assert!((info.i_u_b - 2.0 * 5f64.log2()).abs() < 1e-9);
}


#[test]
fn code_specs() {
    assert_eq!(code_from_spec("rs:5,4,2").unwrap().0.name(), "rs:5,4,2");
    assert_eq!(code_from_spec("eaq:2,2,3").unwrap().1, 3);
    assert_eq!(code_from_spec("teleport:3").unwrap().0.m_size(), 1);
    assert_eq!(code_from_spec("eaq_3_2_2").unwrap().1, 2);
    assert!(matches!(code_from_spec("rs:5,4"), Err(Error::Parse(_))));
    assert!(matches!(code_from_spec("nothing"), Err(Error::Parse(_))));
    assert!(matches!(code_from_spec("eaq:2,2,2"), Err(Error::Domain(_))));
}
