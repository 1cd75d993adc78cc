use approx_eq::assert_close;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::config::{TOL_ALG, TOL_NUM};

mod approx_eq {
    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
        }};
    }
    pub(crate) use assert_close;
}

fn qubit(label: &str) -> SystemLayout {
    SystemLayout::single(label, 2).unwrap()
}

fn bell() -> DensityMatrix {
    DensityMatrix::maximally_entangled("A", "B", 2).unwrap()
}

#[test]
fn tensor_examples() {
    let z0 = DensityMatrix::basis(qubit("A"), &[0]).unwrap();
    let z1 = DensityMatrix::basis(qubit("B"), &[1]).unwrap();
    let t = tensor(&z0, &z1).unwrap();
    let diag: Vec<f64> = (0..4).map(|i| t.matrix()[(i, i)].re).collect();
    assert_eq!(diag, vec![0.0, 1.0, 0.0, 0.0]);

    let mm = tensor(
        &DensityMatrix::maximally_mixed(qubit("A")),
        &DensityMatrix::maximally_mixed(qubit("B")),
    )
    .unwrap();
    assert!((mm.matrix() - DensityMatrix::maximally_mixed(mm.layout().clone()).matrix()).camax() < TOL_ALG);

    let phi_z = tensor(&bell(), &DensityMatrix::basis(qubit("C"), &[0]).unwrap()).unwrap();
    assert_eq!(phi_z.dim(), 8);
    assert_close!(phi_z.trace(), 1.0, TOL_ALG);
    assert_close!(phi_z.purity(), 1.0, TOL_ALG);

    assert!(matches!(tensor(&bell(), &bell()), Err(crate::Error::Layout(_))));
}

#[test]
fn partial_trace_examples() {
    let r = partial_trace(&bell(), &["A"]).unwrap();
    assert!((r.matrix() - DensityMatrix::maximally_mixed(qubit("A")).matrix()).camax() < TOL_ALG);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_mixed(&qubit("A"), 2, &mut rng).unwrap();
    let tau = random_mixed(&SystemLayout::single("B", 3).unwrap(), 2, &mut rng).unwrap();
    let prod = tensor(&rho, &tau).unwrap();
    let back = partial_trace(&prod, &["A"]).unwrap();
    assert!((back.matrix() - rho.matrix()).camax() < TOL_ALG);

    let l3 = SystemLayout::numbered("Q", 3, 2);
    let psi = random_pure(&l3, &mut rng);
    let s12 = marginal_entropy(&psi, &["Q1", "Q2"]).unwrap();
    let s3 = marginal_entropy(&psi, &["Q3"]).unwrap();
    assert_close!(s12, s3, TOL_NUM);

    assert!(matches!(partial_trace(&bell(), &["Z"]), Err(crate::Error::Layout(_))));
}

#[test]
fn entropy_examples() {
    assert_close!(entropy(&DensityMatrix::maximally_mixed(qubit("A"))).unwrap(), 1.0, TOL_NUM);
    assert_close!(entropy(&bell()).unwrap(), 0.0, TOL_NUM);
    let d = DensityMatrix::diagonal(SystemLayout::single("A", 3).unwrap(), &[0.25, 0.25, 0.5]).unwrap();
    assert_close!(entropy(&d).unwrap(), 1.5, 1e-14);
}

#[test]
fn entropy_rejects_negative_spectrum() {
    let m = nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::new(1.1, 0.0),
        C64::new(-0.1, 0.0),
    ]));
    assert!(DensityMatrix::new(qubit("A"), m.clone()).is_err());
    let raw = DensityMatrix::from_raw(qubit("A"), m);
    assert!(matches!(entropy(&raw), Err(crate::Error::State(_))));
}

#[test]
fn conditional_and_mutual_examples() {
    assert_close!(conditional_entropy(&bell(), &["A"], &["B"]).unwrap(), -1.0, TOL_NUM);
    assert_close!(coherent_information(&bell(), &["A"], &["B"]).unwrap(), 1.0, TOL_NUM);
    assert_close!(mutual_information(&bell(), &["A"], &["B"]).unwrap(), 2.0, TOL_NUM);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_mixed(&qubit("A"), 2, &mut rng).unwrap();
    let tau = random_mixed(&qubit("B"), 2, &mut rng).unwrap();
    let prod = tensor(&rho, &tau).unwrap();
    assert_close!(
        conditional_entropy(&prod, &["A"], &["B"]).unwrap(),
        entropy(&rho).unwrap(),
        TOL_NUM
    );
    assert_close!(mutual_information(&prod, &["A"], &["B"]).unwrap(), 0.0, TOL_NUM);

    let cc = DensityMatrix::classically_correlated("M", "Mh", 2).unwrap();
    assert_close!(conditional_entropy(&cc, &["M"], &["Mh"]).unwrap(), 0.0, TOL_NUM);
    for q in [2usize, 3, 5] {
        let cc = DensityMatrix::classically_correlated("M", "Mh", q).unwrap();
        assert_close!(mutual_information(&cc, &["M"], &["Mh"]).unwrap(), (q as f64).log2(), TOL_NUM);
    }
    assert!(matches!(
        conditional_entropy(&bell(), &["A"], &["A"]),
        Err(crate::Error::Layout(_))
    ));
}

#[test]
fn trace_distance_examples() {
    let z0 = DensityMatrix::basis(qubit("A"), &[0]).unwrap();
    let z1 = DensityMatrix::basis(qubit("A"), &[1]).unwrap();
    assert_close!(trace_distance(&z0, &z1).unwrap(), 1.0, TOL_ALG);
    assert_close!(trace_distance(&z0, &z0).unwrap(), 0.0, TOL_ALG);
    let mixed = DensityMatrix::maximally_mixed(qubit("A"));
    let d = DensityMatrix::diagonal(qubit("A"), &[0.75, 0.25]).unwrap();
    assert_close!(trace_distance(&mixed, &d).unwrap(), 0.25, TOL_ALG);
    assert!(trace_distance(&z0, &DensityMatrix::basis(qubit("B"), &[0]).unwrap()).is_err());
}

#[test]
fn random_pure_contract() {
    let l = SystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let a = random_pure(&l, &mut ChaCha8Rng::seed_from_u64(11));
    let b = random_pure(&l, &mut ChaCha8Rng::seed_from_u64(11));
    assert_eq!(a, b);
    assert_close!(a.trace(), 1.0, TOL_ALG);
    assert_close!(a.purity(), 1.0, TOL_ALG);
    assert_close!(
        marginal_entropy(&a, &["A"]).unwrap(),
        marginal_entropy(&a, &["B"]).unwrap(),
        TOL_NUM
    );
}

#[test]
fn binary_entropy_and_g() {
    assert_close!(binary_entropy(0.5).unwrap(), 1.0, 1e-15);
    assert_close!(binary_entropy(0.0).unwrap(), 0.0, 1e-15);
    assert_close!(g_function(0.0).unwrap(), 0.0, 1e-15);
    assert_close!(g_function(1.0).unwrap(), 2.0, 1e-15);
    assert!(binary_entropy(1.5).is_err());
    assert!(g_function(-0.1).is_err());
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        assert!(g_function(x).unwrap() >= binary_entropy(x).unwrap() - 1e-15);
    }
}

#[test]
fn permute_matches_relabelled_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_mixed(&qubit("A"), 2, &mut rng).unwrap();
    let b = random_mixed(&SystemLayout::single("B", 3).unwrap(), 2, &mut rng).unwrap();
    let ab = tensor(&a, &b).unwrap();
    let ba = tensor(&b, &a).unwrap();
    let p = ab.permute(&["B", "A"]).unwrap();
    assert!((p.matrix() - ba.matrix()).camax() < 1e-15);
}

#[test]
fn json_roundtrip() {
    let s = bell();
    let text = serde_json::to_string(&s).unwrap();
    let back: DensityMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    let bad = r#"{"layout":[["A",2]],"matrix":[[[2,0],[0,0]],[[0,0],[0,0]]]}"#;
    assert!(serde_json::from_str::<DensityMatrix>(bad).is_err());

    let ens = r#"{"items":[{"p":"1/4","state":{"layout":[["A",2]],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}},
                           {"p":0.75,"state":{"layout":[["A",2]],"matrix":[[[0,0],[0,0]],[[0,0],[1,0]]]}}]}"#;
    let e = CQEnsemble::from_json(ens).unwrap();
    assert_eq!(e.len(), 2);
    assert_close!(e.items()[0].0, 0.25, 0.0);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn tri() -> SystemLayout {
        SystemLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entropy_unitarily_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_mixed(&SystemLayout::single("A", 4).unwrap(), 3, &mut rng).unwrap();
            let u = random_unitary(4, &mut rng);
            let t = conjugate(&s, &u);
            prop_assert!((entropy(&s).unwrap() - entropy(&t).unwrap()).abs() <= TOL_NUM);
        }

        #[test]
        fn strong_subadditivity_and_weak_monotonicity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_mixed(&tri(), 3, &mut rng).unwrap();
            prop_assert!(conditional_mutual_information(&s, &["A"], &["C"], &["B"]).unwrap() >= -TOL_NUM);
            let wm = conditional_entropy(&s, &["A"], &["B"]).unwrap()
                + conditional_entropy(&s, &["A"], &["C"]).unwrap();
            prop_assert!(wm >= -TOL_NUM);
        }

        #[test]
        fn pure_bipartite_marginals_agree(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = SystemLayout::new([("A", da), ("B", db)]).unwrap();
            let s = random_pure(&l, &mut rng);
            let sa = marginal_entropy(&s, &["A"]).unwrap();
            let sb = marginal_entropy(&s, &["B"]).unwrap();
            prop_assert!((sa - sb).abs() <= TOL_NUM);
        }

        #[test]
        fn trace_distance_is_a_metric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = SystemLayout::single("A", 3).unwrap();
            let a = random_mixed(&l, 2, &mut rng).unwrap();
            let b = random_mixed(&l, 2, &mut rng).unwrap();
            let c = random_mixed(&l, 3, &mut rng).unwrap();
            let ab = trace_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, trace_distance(&b, &a).unwrap());
            prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + TOL_NUM);
        }

        #[test]
        fn trace_distance_contracts_under_partial_trace(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_mixed(&tri(), 4, &mut rng).unwrap();
            let b = random_mixed(&tri(), 4, &mut rng).unwrap();
            let full = trace_distance(&a, &b).unwrap();
            let red = trace_distance(
                &partial_trace(&a, &["A", "C"]).unwrap(),
                &partial_trace(&b, &["A", "C"]).unwrap(),
            ).unwrap();
            prop_assert!(red <= full + TOL_NUM);
        }
    }
}
