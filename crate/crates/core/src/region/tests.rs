use super::*;

fn block(n: usize, d: usize) -> RegionParams {
    RegionParams::Singleton(SingletonParams::new(n, d, 2).unwrap())
}

fn iid(delta: Rational) -> RegionParams {
    RegionParams::Iid(IidParams::new(2, delta).unwrap())
}

fn t(c: i64, q: i64, e: i64) -> RateTriple {
    RateTriple::from_ints(c, q, e)
}

#[test]
fn parse_and_format_rationals() {
    assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
    assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
    assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
    assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
    assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("abc").is_err());
    assert_eq!(rat(3, 4).to_string(), "3/4");
    assert_eq!(rat(4, 2).to_string(), "2");
    assert_eq!("1/2, 0,-1".parse::<RateTriple>().unwrap(), RateTriple::new(rat(1, 2), rat(0, 1), rat(-1, 1)));
}

#[test]
fn extreme_points_n5_d3() {
    let p = block(5, 3);
    let a0 = p.membership(&t(3, 0, 0));
    assert_eq!(a0.interval, Some((rat(0, 1), rat(0, 1))));
    let a1 = p.membership(&t(0, 3, 2));
    assert_eq!(a1.interval, Some((rat(1, 1), rat(1, 1))));
    assert!(!p.membership(&t(0, 2, 0)).is_member());
}

#[test]
fn n4_d3_rejects_full_classical_rate() {
    assert!(!block(4, 3).membership(&t(3, 0, 0)).is_member());
}

#[test]
fn iid_examples() {
    assert!(iid(rat(0, 1)).membership(&t(0, 1, 0)).is_member());
    let full = iid(rat(1, 1));
    assert!(full.membership(&t(0, 0, 0)).is_member());
    assert!(!full.membership(&t(0, 1, 1)).is_member());
    assert!(full.membership(&t(-2, 1, 1)).is_member());
    let half = iid(rat(1, 2)).membership(&RateTriple::new(rat(0, 1), rat(1, 2), rat(1, 2)));
    assert!(half.is_member());
    assert_eq!(half.interval.unwrap().1, rat(1, 1));
}

#[test]
fn geometry_and_rays() {
    let p = block(5, 3);
    let g = p.geometry();
    assert_eq!(g.a0, t(3, 0, 0));
    assert_eq!(g.a1, t(0, 3, 2));
    let mid = g.apex(&rat(1, 2));
    assert_eq!(mid, RateTriple::new(rat(3, 2), rat(3, 2), rat(1, 1)));
    assert!(p.membership(&mid).is_member());
    assert_eq!(g.a0.add(&ray_tp()), t(1, 1, 1));
    assert!(p.membership(&t(1, 1, 1)).is_member());
    let j = g.to_json();
    assert_eq!(j["segment"]["status"], "converse-only");
}

#[test]
fn slice_examples() {
    let p = block(5, 3);
    let pts = export_slice(&p, Coord::E, &rat(0, 1), (&rat(-1, 1), &rat(3, 1)), &rat(1, 1)).unwrap();
    let member = |x: i64, y: i64| pts.iter().find(|s| s.x == rat(x, 1) && s.y == rat(y, 1)).unwrap().member;
    assert!(member(3, 0));
    assert!(member(0, 1));
    assert!(!member(0, 2));
    assert!(!member(1, 1));
    let empty = iid(rat(1, 1));
    // On a non-negative (Q, E) grid nothing is reachable at δ = 1 with C = 1.
    let pts = export_slice(&empty, Coord::C, &rat(1, 1), (&rat(0, 1), &rat(2, 1)), &rat(1, 2)).unwrap();
    assert!(pts.iter().all(|s| !s.member));
    // Burning qubits and ebits (dense coding) still reaches it.
    assert!(empty.membership(&RateTriple::new(rat(1, 1), rat(-1, 2), rat(1, 2))).is_member());
    assert!(slice_csv(&pts).starts_with("x,y,member\n"));
    assert!(export_slice(&empty, Coord::C, &rat(0, 1), (&rat(0, 1), &rat(1, 1)), &rat(0, 1)).is_err());
}

#[test]
fn d_equal_one_is_generic() {
    let p = block(3, 1);
    assert!(p.membership(&t(0, 3, 0)).is_member());
    assert!(!p.membership(&t(0, 4, 0)).is_member());
}

#[test]
fn fm_matches_thm3_on_grid() {
    for delta in [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)] {
        let ip = IidParams::new(2, delta.clone()).unwrap();
        let p = RegionParams::Iid(ip.clone());
        let fm = p.hrep();
        let th = hrep_thm3(&ip);
        for c in -4..=4 {
            for q in -4..=4 {
                for e in -4..=4 {
                    let x = RateTriple::new(rat(c, 2), rat(q, 2), rat(e, 2));
                    let m = p.membership(&x).is_member();
                    assert_eq!(fm.contains(&x), m, "delta {delta} at {x}");
                    assert_eq!(th.contains(&x), m, "delta {delta} at {x}");
                }
            }
        }
    }
}

#[test]
fn params_validation() {
    assert!(SingletonParams::new(0, 1, 2).is_err());
    assert!(SingletonParams::new(3, 5, 2).is_err());
    assert!(SingletonParams::new(3, 4, 2).is_ok());
    assert!(SingletonParams::new(3, 2, 1).is_err());
    assert!(IidParams::new(2, rat(3, 2)).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn triple() -> impl Strategy<Value = RateTriple> {
        (-24i64..=24, -24i64..=24, -24i64..=24)
            .prop_map(|(c, q, e)| RateTriple::new(rat(c, 4), rat(q, 4), rat(e, 4)))
    }

    proptest! {
        #[test]
        fn ray_closure(n in 1usize..=8, dd in 0usize..=8, x in triple(), lam in 0i64..=8) {
            let d = 1 + dd % n.max(1);
            let p = block(n, d);
            prop_assume!(p.membership(&x).is_member());
            for (_, r) in p.geometry().rays() {
                let y = x.add(&r.scale(&rat(lam, 4)));
                prop_assert!(p.membership(&y).is_member());
            }
        }

        #[test]
        fn convexity(n in 1usize..=6, dd in 0usize..=6, x in triple(), y in triple(), l in 0i64..=4) {
            let d = 1 + dd % n;
            let p = block(n, d);
            prop_assume!(p.membership(&x).is_member() && p.membership(&y).is_member());
            prop_assert!(p.membership(&x.lerp(&y, &rat(l, 4))).is_member());
        }

        #[test]
        fn block_matches_iid(n in 1usize..=8, dd in 0usize..=8, x in triple()) {
            let d = 1 + dd % n;
            let b = block(n, d).membership(&x).is_member();
            let i = iid(rat(d as i64 - 1, n as i64)).membership(&x.scale(&rat(1, n as i64))).is_member();
            prop_assert_eq!(b, i);
        }
    }
}
