//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use eacq_core::channels::{build_erasure, ErasureSpec, KrausChannel};
use eacq_core::region::{rat, rational_to_f64, RateTriple};

/// Membership by scanning t′ over a fine grid in floating point, with the
/// three inequalities written out from the region's definition:
/// C + 2Q ≤ α(1 + t′), Q − E ≤ β t′, C + Q − E ≤ α − γ t′.
pub fn scan_member(alpha: f64, beta: f64, gamma: f64, x: &RateTriple, steps: usize) -> bool {
    let (c, q, e) = (rational_to_f64(&x.c), rational_to_f64(&x.q), rational_to_f64(&x.e));
    let tol = 1e-12;
    (0..=steps).any(|i| {
        let t = i as f64 / steps as f64;
        c + 2.0 * q <= alpha * (1.0 + t) + tol && q - e <= beta * t + tol && c + q - e <= alpha - gamma * t + tol
    })
}

/// (α, β, γ) for block erasure with n uses and distance d.
pub fn singleton_coefficients(n: usize, d: usize) -> (f64, f64, f64) {
    ((n - d + 1) as f64, n as f64 - 2.0 * d as f64 + 2.0, (d - 1) as f64)
}

/// Erases exactly the sites in `pattern` (0-based), as a tensor product of
/// single-site erasures with probability 0 or 1.
pub fn pattern_channel(q: usize, n: usize, pattern: &[usize]) -> KrausChannel {
    let mut out: Option<KrausChannel> = None;
    for i in 0..n {
        let delta = if pattern.contains(&i) { rat(1, 1) } else { rat(0, 1) };
        let site = build_erasure(&ErasureSpec::new(q, delta).unwrap())
            .with_labels(&[format!("A{}", i + 1)], &[format!("B{}", i + 1)])
            .unwrap();
        out = Some(match out {
            None => site,
            Some(ch) => ch.tensor(&site).unwrap(),
        });
    }
    out.expect("n ≥ 1")
}

/// All w-subsets of 0..n, via bitmasks.
pub fn patterns(n: usize, w: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == w)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Polynomial evaluation mod p, coefficients constant term first.
pub fn poly_eval(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

/// All messages consistent with the unerased symbols, by enumeration.
pub fn consistent_messages(q: u64, k: usize, points: &[u64], received: &[Option<u64>]) -> Vec<Vec<u64>> {
    let total = q.pow(k as u32);
    (0..total)
        .map(|mut m| {
            let mut msg = vec![0; k];
            for slot in msg.iter_mut() {
                *slot = m % q;
                m /= q;
            }
            msg
        })
        .filter(|msg| {
            points
                .iter()
                .zip(received)
                .all(|(&x, r)| r.is_none_or(|y| poly_eval(msg, x, q) == y))
        })
        .collect()
}

/// Classical error of a code that decodes whenever at least k symbols
/// survive and guesses a fixed message otherwise, under w uniform erasures.
pub fn mds_error(n: usize, k: usize, w: usize, messages: usize) -> f64 {
    if n - w >= k {
        0.0
    } else {
        1.0 - 1.0 / messages as f64
    }
}

/// Shannon entropy in bits.
pub fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}
