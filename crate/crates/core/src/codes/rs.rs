//! Reed–Solomon codes over prime fields with Lagrange erasure decoding.

use crate::error::{Error, Result};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= q {
        if q % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Arithmetic modulo a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf {
    p: u64,
}

impl Gf {
    pub fn new(p: u64) -> Result<Gf> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("field size {p} is not prime")));
        }
        Ok(Gf { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }
}

/// Evaluation code of polynomials of degree < k at n distinct points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSCode {
    field: Gf,
    n: usize,
    k: usize,
    points: Vec<u64>,
}

impl RSCode {
    /// Code with evaluation points 0, 1, ..., n−1.
    pub fn new(q: u64, n: usize, k: usize) -> Result<RSCode> {
        let field = Gf::new(q)?;
        if n as u64 > q {
            return Err(Error::Domain(format!("n = {n} exceeds field size {q}")));
        }
        if k == 0 || k > n {
            return Err(Error::Domain(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
        }
        Ok(RSCode {
            field,
            n,
            k,
            points: (0..n as u64).collect(),
        })
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance n − k + 1.
    pub fn d(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn field(&self) -> Gf {
        self.field
    }

    /// Evaluate the polynomial with coefficients `msg` (constant term first).
    pub fn encode(&self, msg: &[u64]) -> Result<Vec<u64>> {
        if msg.len() != self.k {
            return Err(Error::Domain(format!("message has {} symbols, expected {}", msg.len(), self.k)));
        }
        if let Some(&s) = msg.iter().find(|&&s| s >= self.q()) {
            return Err(Error::Domain(format!("symbol {s} outside GF({})", self.q())));
        }
        let f = self.field;
        Ok(self
            .points
            .iter()
            .map(|&x| msg.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)))
            .collect())
    }

    /// Recover the message from a word with erasures (`None`), interpolating
    /// on the first k surviving coordinates.
    pub fn erasure_decode(&self, received: &[Option<u64>]) -> Result<Vec<u64>> {
        if received.len() != self.n {
            return Err(Error::Domain(format!("word has {} symbols, expected {}", received.len(), self.n)));
        }
        let survivors: Vec<(u64, u64)> = received
            .iter()
            .zip(&self.points)
            .filter_map(|(r, &x)| r.map(|y| (x, y)))
            .take(self.k)
            .collect();
        if survivors.len() < self.k {
            return Err(Error::Decode(format!(
                "{} erasures exceed the correctable {}",
                received.iter().filter(|r| r.is_none()).count(),
                self.n - self.k
            )));
        }
        let f = self.field;
        let mut coeffs = vec![0u64; self.k];
        for (j, &(xj, yj)) in survivors.iter().enumerate() {
            // Basis polynomial Π_{i≠j} (x − x_i) / (x_j − x_i), built by coefficients.
            let mut basis = vec![1u64];
            let mut denom = 1u64;
            for (i, &(xi, _)) in survivors.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![0u64; basis.len() + 1];
                for (p, &c) in basis.iter().enumerate() {
                    next[p + 1] = f.add(next[p + 1], c);
                    next[p] = f.sub(next[p], f.mul(c, xi));
                }
                basis = next;
                denom = f.mul(denom, f.sub(xj, xi));
            }
            let scale = f.mul(yj, f.inv(denom));
            for (p, &c) in basis.iter().enumerate() {
                coeffs[p] = f.add(coeffs[p], f.mul(c, scale));
            }
        }
        Ok(coeffs)
    }

    /// Message index ↔ symbols, most significant symbol first.
    pub fn message_symbols(&self, m: usize) -> Vec<u64> {
        let q = self.q() as usize;
        let mut out = vec![0; self.k];
        let mut m = m;
        for s in out.iter_mut().rev() {
            *s = (m % q) as u64;
            m /= q;
        }
        out
    }

    pub fn message_index(&self, symbols: &[u64]) -> usize {
        symbols.iter().fold(0, |acc, &s| acc * self.q() as usize + s as usize)
    }

    pub fn num_messages(&self) -> usize {
        (self.q() as usize).pow(self.k as u32)
    }
}
