//! Inequality descriptions in (C, Q, E): canonical form, Fourier–Motzkin
//! elimination of the t′ parameter, LP-certified redundancy removal, and the
//! closed-form i.i.d. erasure family.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::lp;
use super::{rat, IidParams, RateTriple, Rational, TRow};
use crate::error::{Error, Result};

/// `c · (C, Q, E) ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inequality {
    pub coef: [Rational; 3],
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coef: [Rational; 3], rhs: Rational) -> Self {
        Inequality { coef, rhs }
    }

    pub fn from_ints(c: i64, q: i64, e: i64, rhs: Rational) -> Self {
        Inequality::new([rat(c, 1), rat(q, 1), rat(e, 1)], rhs)
    }

    pub fn is_zero_row(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
    }

    pub fn holds(&self, x: &RateTriple) -> bool {
        let lhs = &self.coef[0] * &x.c + &self.coef[1] * &x.q + &self.coef[2] * &x.e;
        lhs <= self.rhs
    }

    /// Positive rescaling so that the first nonzero coefficient has modulus 1.
    pub fn canonical(&self) -> Inequality {
        match self.coef.iter().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(lead) => {
                let s = lead.abs();
                Inequality {
                    coef: [&self.coef[0] / &s, &self.coef[1] / &s, &self.coef[2] / &s],
                    rhs: &self.rhs / &s,
                }
            }
        }
    }

    /// Is `other` a positive multiple of `self`?
    pub fn same_halfspace(&self, other: &Inequality) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn to_strings(&self) -> [String; 4] {
        [
            self.coef[0].to_string(),
            self.coef[1].to_string(),
            self.coef[2].to_string(),
            self.rhs.to_string(),
        ]
    }
}

/// A list of inequalities in normalized (log q) units.
///
/// Rows are kept canonically scaled, deduplicated and sorted. An infeasible
/// description is represented by the single row `0 ≤ −1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    rows: Vec<Inequality>,
    infeasible: bool,
}

impl HRep {
    pub fn new(rows: impl IntoIterator<Item = Inequality>) -> HRep {
        let mut out = Vec::new();
        for r in rows {
            if r.is_zero_row() {
                if r.rhs.is_negative() {
                    return HRep::infeasible();
                }
                continue;
            }
            out.push(r.canonical());
        }
        out.sort();
        out.dedup();
        HRep { rows: out, infeasible: false }
    }

    pub fn infeasible() -> HRep {
        HRep {
            rows: vec![Inequality::from_ints(0, 0, 0, rat(-1, 1))],
            infeasible: true,
        }
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn contains(&self, x: &RateTriple) -> bool {
        !self.infeasible && self.rows.iter().all(|r| r.holds(x))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "units": "logq",
            "infeasible": self.infeasible,
            "inequalities": self.rows.iter().map(|r| r.to_strings().to_vec()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<HRep> {
        let rows = v
            .get("inequalities")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("HRep JSON needs an \"inequalities\" array".into()))?;
        let mut out = Vec::new();
        for r in rows {
            let cells = r
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| Error::Parse("each inequality is [cC, cQ, cE, rhs]".into()))?;
            let mut vals = Vec::with_capacity(4);
            for c in cells {
                let s = c
                    .as_str()
                    .map(str::to_owned)
                    .unwrap_or_else(|| c.to_string());
                vals.push(super::parse_rational(&s)?);
            }
            let rhs = vals.pop().unwrap();
            out.push(Inequality::new([vals[0].clone(), vals[1].clone(), vals[2].clone()], rhs));
        }
        Ok(HRep::new(out))
    }
}

/// Eliminate t′ from `rows` together with the box `0 ≤ t′ ≤ 1`, then remove
/// redundant rows.
pub fn fourier_motzkin(rows: &[TRow]) -> HRep {
    let mut all: Vec<TRow> = rows.to_vec();
    all.push(TRow::new([rat(0, 1), rat(0, 1), rat(0, 1)], rat(-1, 1), rat(0, 1)));
    all.push(TRow::new([rat(0, 1), rat(0, 1), rat(0, 1)], rat(1, 1), rat(1, 1)));
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for r in all {
        if r.t.is_positive() {
            pos.push(r);
        } else if r.t.is_negative() {
            neg.push(r);
        } else {
            out.push(Inequality::new(r.coef, r.rhs));
        }
    }
    // a·x + p t ≤ b (p > 0) and c·x − m t ≤ e (m > 0) combine to
    // m a·x + p c·x ≤ m b + p e.
    for p in &pos {
        for n in &neg {
            let (wp, wn) = (-&n.t, p.t.clone());
            let coef = [
                &wp * &p.coef[0] + &wn * &n.coef[0],
                &wp * &p.coef[1] + &wn * &n.coef[1],
                &wp * &p.coef[2] + &wn * &n.coef[2],
            ];
            out.push(Inequality::new(coef, &wp * &p.rhs + &wn * &n.rhs));
        }
    }
    remove_redundant(&HRep::new(out))
}

/// Drop every row implied by the remaining ones (exact LP certificate).
pub fn remove_redundant(h: &HRep) -> HRep {
    if h.infeasible || h.rows.is_empty() {
        return h.clone();
    }
    let a: Vec<Vec<Rational>> = h.rows.iter().map(|r| r.coef.to_vec()).collect();
    let b: Vec<Rational> = h.rows.iter().map(|r| r.rhs.clone()).collect();
    if !lp::feasible(&a, &b) {
        return HRep::infeasible();
    }
    let mut keep: Vec<bool> = vec![true; h.rows.len()];
    for i in 0..h.rows.len() {
        let others: Vec<usize> = (0..h.rows.len()).filter(|&j| j != i && keep[j]).collect();
        let oa: Vec<Vec<Rational>> = others.iter().map(|&j| a[j].clone()).collect();
        let ob: Vec<Rational> = others.iter().map(|&j| b[j].clone()).collect();
        let redundant = if others.is_empty() {
            false
        } else {
            match lp::maximize(&oa, &ob, &a[i]) {
                Some(v) => v <= b[i],
                None => false,
            }
        };
        if redundant {
            keep[i] = false;
        }
    }
    HRep {
        rows: h
            .rows
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(r, _)| r.clone())
            .collect(),
        infeasible: false,
    }
}

/// The eliminated i.i.d. erasure region in closed form.
///
/// For δ > ½ the last family is emitted multiplied through by (1−δ), which
/// keeps it defined at δ = 1.
pub fn hrep_thm3(p: &IidParams) -> HRep {
    let d = p.delta.clone();
    let one = Rational::one();
    let half = rat(1, 2);
    let om = &one - &d; // 1 − δ
    let o2 = &one - &d * rat(2, 1); // 1 − 2δ
    let zero = Rational::zero();
    let mut rows = vec![
        Inequality::new([one.clone(), rat(2, 1), zero.clone()], &om * rat(2, 1)),
        Inequality::new(
            [zero.clone(), one.clone(), -&one],
            if o2.is_positive() { o2.clone() } else { zero.clone() },
        ),
        Inequality::new([one.clone(), one.clone(), -&one], om.clone()),
        Inequality::new([one.clone(), &one + &d, -&om], om.clone()),
    ];
    if d <= half {
        rows.push(Inequality::new([o2.clone(), om.clone(), -&om], &o2 * &om));
    } else {
        let t2 = &d * rat(2, 1) - &one; // 2δ − 1
        let t3 = &d * rat(3, 1) - &one; // 3δ − 1
        rows.push(Inequality::new([t2.clone(), t3, -&om], &t2 * &om));
    }
    HRep::new(rows)
}
