//! Exact rational geometry of the Singleton-type rate regions.
//!
//! Rates are triples (C, Q, E) in units of log q: C and Q are net classical
//! and quantum production, E is net entanglement consumption. Both regions
//! handled here are projections of a system that is linear in (C, Q, E, t′)
//! with t′ ∈ [0, 1]:
//!
//! ```text
//! C + 2Q    ≤ α (1 + t′)
//! Q − E     ≤ β t′
//! C + Q − E ≤ α − γ t′
//! ```
//!
//! with (α, β, γ) = (n−d+1, n−2d+2, d−1) for the block erasure channel and
//! (1−δ, 1−2δ, δ) per use of the i.i.d. erasure channel.

mod hrep;
pub mod lp;

pub use hrep::{fourier_motzkin, hrep_thm3, remove_redundant, HRep, Inequality};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{domain_err, Error, Result};

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rate triple (C, Q, E) in units of log q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RateTriple {
    pub c: Rational,
    pub q: Rational,
    pub e: Rational,
}

impl RateTriple {
    pub fn new(c: Rational, q: Rational, e: Rational) -> Self {
        RateTriple { c, q, e }
    }

    pub fn from_ints(c: i64, q: i64, e: i64) -> Self {
        RateTriple::new(rat(c, 1), rat(q, 1), rat(e, 1))
    }

    pub fn zero() -> Self {
        RateTriple::from_ints(0, 0, 0)
    }

    pub fn add(&self, o: &RateTriple) -> RateTriple {
        RateTriple::new(&self.c + &o.c, &self.q + &o.q, &self.e + &o.e)
    }

    pub fn scale(&self, s: &Rational) -> RateTriple {
        RateTriple::new(&self.c * s, &self.q * s, &self.e * s)
    }

    /// `(1−λ) self + λ other`.
    pub fn lerp(&self, other: &RateTriple, lambda: &Rational) -> RateTriple {
        self.scale(&(Rational::one() - lambda)).add(&other.scale(lambda))
    }

    /// Convert to bits for alphabet size `q`.
    pub fn to_bits(&self, q: usize) -> [f64; 3] {
        let l = (q as f64).log2();
        [
            rational_to_f64(&self.c) * l,
            rational_to_f64(&self.q) * l,
            rational_to_f64(&self.e) * l,
        ]
    }

    pub fn to_strings(&self) -> [String; 3] {
        [self.c.to_string(), self.q.to_string(), self.e.to_string()]
    }
}

impl fmt::Display for RateTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.c, self.q, self.e)
    }
}

impl FromStr for RateTriple {
    type Err = Error;

    /// `"C,Q,E"`, each a rational.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected C,Q,E, got {s:?}")));
        }
        Ok(RateTriple::new(
            parse_rational(parts[0])?,
            parse_rational(parts[1])?,
            parse_rational(parts[2])?,
        ))
    }
}

impl Serialize for RateTriple {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RateTriple {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v: [String; 3] = Deserialize::deserialize(de)?;
        let p = |s: &str| parse_rational(s).map_err(serde::de::Error::custom);
        Ok(RateTriple::new(p(&v[0])?, p(&v[1])?, p(&v[2])?))
    }
}

/// Block erasure parameters: n channel uses, minimum distance d (so d−1
/// erasures), alphabet size q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingletonParams {
    pub n: usize,
    pub d: usize,
    pub q: usize,
}

impl SingletonParams {
    pub fn new(n: usize, d: usize, q: usize) -> Result<Self> {
        if n == 0 {
            return domain_err("n must be at least 1");
        }
        if d == 0 || d > n + 1 {
            return domain_err(format!("d = {d} outside 1..={}", n + 1));
        }
        if q < 2 {
            return domain_err(format!("q = {q} must be at least 2"));
        }
        Ok(SingletonParams { n, d, q })
    }
}

/// i.i.d. erasure parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IidParams {
    pub q: usize,
    pub delta: Rational,
}

impl IidParams {
    pub fn new(q: usize, delta: Rational) -> Result<Self> {
        if q < 2 {
            return domain_err(format!("q = {q} must be at least 2"));
        }
        if delta.is_negative() || delta > Rational::one() {
            return domain_err(format!("erasure probability {delta} outside [0, 1]"));
        }
        Ok(IidParams { q, delta })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionParams {
    Singleton(SingletonParams),
    Iid(IidParams),
}

impl RegionParams {
    /// (α, β, γ) of the t′-parameterized system.
    pub fn coefficients(&self) -> (Rational, Rational, Rational) {
        match self {
            RegionParams::Singleton(p) => {
                let (n, d) = (p.n as i64, p.d as i64);
                (rat(n - d + 1, 1), rat(n - 2 * d + 2, 1), rat(d - 1, 1))
            }
            RegionParams::Iid(p) => {
                let one = Rational::one();
                (&one - &p.delta, &one - &p.delta * rat(2, 1), p.delta.clone())
            }
        }
    }

    pub fn q(&self) -> usize {
        match self {
            RegionParams::Singleton(p) => p.q,
            RegionParams::Iid(p) => p.q,
        }
    }

    pub fn t_system(&self) -> Vec<TRow> {
        let (a, b, g) = self.coefficients();
        t_system(&a, &b, &g)
    }

    pub fn membership(&self, x: &RateTriple) -> Membership {
        membership_in_system(&self.t_system(), x)
    }

    /// H-representation obtained by eliminating t′.
    pub fn hrep(&self) -> HRep {
        fourier_motzkin(&self.t_system())
    }

    pub fn geometry(&self) -> ConeGeometry {
        let (a, _, g) = self.coefficients();
        let z = Rational::zero();
        ConeGeometry {
            a0: RateTriple::new(a.clone(), z.clone(), z.clone()),
            a1: RateTriple::new(z, a, g),
            endpoint_status: match self {
                RegionParams::Singleton(_) => "attainable",
                RegionParams::Iid(_) => "asymptotically-achievable (not constructed)",
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RegionParams::Singleton(p) => json!({"kind": "block", "n": p.n, "d": p.d, "q": p.q}),
            RegionParams::Iid(p) => json!({"kind": "iid", "q": p.q, "delta": p.delta.to_string()}),
        }
    }
}

/// `coef · (C, Q, E) + t · t′ ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRow {
    pub coef: [Rational; 3],
    pub t: Rational,
    pub rhs: Rational,
}

impl TRow {
    pub fn new(coef: [Rational; 3], t: Rational, rhs: Rational) -> Self {
        TRow { coef, t, rhs }
    }
}

/// The three-row system for given (α, β, γ) (without the box on t′).
pub fn t_system(alpha: &Rational, beta: &Rational, gamma: &Rational) -> Vec<TRow> {
    let (z, o) = (rat(0, 1), rat(1, 1));
    vec![
        TRow::new([o.clone(), rat(2, 1), z.clone()], -alpha, alpha.clone()),
        TRow::new([z.clone(), o.clone(), -&o], -beta, z.clone()),
        TRow::new([o.clone(), o.clone(), -&o], gamma.clone(), alpha.clone()),
    ]
}

/// Outcome of a membership query: the closed set of feasible t′ values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub interval: Option<(Rational, Rational)>,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.interval.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "member": self.is_member(),
            "t_interval": self.interval.as_ref().map(|(a, b)| vec![a.to_string(), b.to_string()]),
        })
    }
}

/// Intersect the half-lines in t′ cut out by each row with [0, 1].
pub fn membership_in_system(rows: &[TRow], x: &RateTriple) -> Membership {
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for r in rows {
        let lhs = &r.coef[0] * &x.c + &r.coef[1] * &x.q + &r.coef[2] * &x.e;
        let slack = &r.rhs - lhs; // need t · t′ ≤ slack
        if r.t.is_zero() {
            if slack.is_negative() {
                return Membership { interval: None };
            }
        } else {
            let bound = &slack / &r.t;
            if r.t.is_positive() {
                if bound < hi {
                    hi = bound;
                }
            } else if bound > lo {
                lo = bound;
            }
        }
    }
    Membership {
        interval: if lo <= hi { Some((lo, hi)) } else { None },
    }
}

pub fn membership_singleton(p: &SingletonParams, x: &RateTriple) -> Membership {
    RegionParams::Singleton(*p).membership(x)
}

pub fn membership_iid(p: &IidParams, x: &RateTriple) -> Membership {
    RegionParams::Iid(p.clone()).membership(x)
}

/// Apex segment endpoints and the three extremal rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeGeometry {
    pub a0: RateTriple,
    pub a1: RateTriple,
    /// How the endpoints are known to be reached.
    pub endpoint_status: &'static str,
}

/// Teleportation: spend 2 cbits and 1 ebit per qubit.
pub fn ray_tp() -> RateTriple {
    RateTriple::from_ints(-2, 1, 1)
}

/// Resource conversion: one qubit sent to create one ebit.
pub fn ray_rc() -> RateTriple {
    RateTriple::from_ints(0, -1, -1)
}

/// Dense coding: one qubit and one ebit carry 2 cbits.
pub fn ray_dc() -> RateTriple {
    RateTriple::from_ints(2, -1, 1)
}

impl ConeGeometry {
    pub fn rays(&self) -> [(&'static str, RateTriple); 3] {
        [("TP", ray_tp()), ("RC", ray_rc()), ("DC", ray_dc())]
    }

    /// Point of the apex line at parameter t′ ∈ [0, 1].
    pub fn apex(&self, t: &Rational) -> RateTriple {
        self.a0.lerp(&self.a1, t)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "units": "logq",
            "a0": {"triple": self.a0.to_strings(), "status": self.endpoint_status},
            "a1": {"triple": self.a1.to_strings(), "status": self.endpoint_status},
            "segment": {"from": "a0", "to": "a1", "status": "converse-only"},
            "rays": self.rays().iter().map(|(n, r)| json!({"name": n, "direction": r.to_strings()})).collect::<Vec<_>>(),
        })
    }
}

pub fn geometry(p: &RegionParams) -> ConeGeometry {
    p.geometry()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    C,
    Q,
    E,
}

impl FromStr for Coord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "C" | "c" => Ok(Coord::C),
            "Q" | "q" => Ok(Coord::Q),
            "E" | "e" => Ok(Coord::E),
            other => Err(Error::Parse(format!("unknown coordinate {other:?} (use C, Q or E)"))),
        }
    }
}

/// One grid point of a two-dimensional slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePoint {
    pub x: Rational,
    pub y: Rational,
    pub member: bool,
}

/// Membership over a square grid in the two free coordinates (in C, Q, E
/// order), with `fixed` held at `value`.
pub fn export_slice(
    p: &RegionParams,
    fixed: Coord,
    value: &Rational,
    range: (&Rational, &Rational),
    step: &Rational,
) -> Result<Vec<SlicePoint>> {
    if !step.is_positive() {
        return domain_err("slice step must be positive");
    }
    if range.0 > range.1 {
        return domain_err("slice range is empty");
    }
    let rows = p.t_system();
    let mut axis = Vec::new();
    let mut v = range.0.clone();
    while &v <= range.1 {
        axis.push(v.clone());
        v += step;
    }
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for x in &axis {
        for y in &axis {
            let t = match fixed {
                Coord::C => RateTriple::new(value.clone(), x.clone(), y.clone()),
                Coord::Q => RateTriple::new(x.clone(), value.clone(), y.clone()),
                Coord::E => RateTriple::new(x.clone(), y.clone(), value.clone()),
            };
            out.push(SlicePoint {
                x: x.clone(),
                y: y.clone(),
                member: membership_in_system(&rows, &t).is_member(),
            });
        }
    }
    Ok(out)
}

pub fn slice_csv(points: &[SlicePoint]) -> String {
    let mut s = String::from("x,y,member\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.x, p.y, p.member as u8));
    }
    s
}

#[cfg(test)]
mod tests;
