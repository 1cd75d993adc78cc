//! Exact rational simplex (two-phase, Bland's rule) on standard-form problems
//! `min cᵀx  s.t.  Ax = b, x ≥ 0`.

use num_traits::{Signed, Zero};

use super::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimize `cost` over the columns `allowed`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            // reduced costs r_j = c_j − c_Bᵀ column_j
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() {
                        rc -= &cost[b] * &self.t[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][j];
                if a.is_positive() {
                    let ratio = &self.t[i][self.cols] / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Solve `min cᵀx s.t. Ax = b, x ≥ 0` exactly.
pub fn solve_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let zero = Rational::zero();
    let one = Rational::from_integer(1.into());
    // Phase 1 with one artificial per row.
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rational> = a[i].iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { one.clone() } else { zero.clone() }));
        row.push(if flip { -&b[i] } else { b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        cols,
    };
    let mut phase1 = vec![zero.clone(); cols];
    for x in phase1.iter_mut().skip(n) {
        *x = one.clone();
    }
    tab.optimize(&phase1, cols);
    let infeas: Rational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(i, _)| tab.t[i][cols].clone())
        .sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for row in tab.t.iter_mut() {
        row.drain(n..cols);
    }
    tab.cols = n;
    if !tab.optimize(c, n) {
        return LpOutcome::Unbounded;
    }
    let value = tab
        .basis
        .iter()
        .enumerate()
        .map(|(i, &bj)| &c[bj] * &tab.t[i][n])
        .sum();
    LpOutcome::Optimal(value)
}

/// Is `{x : Ax ≤ b}` (x free) nonempty?
pub fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> bool {
    let vars = a.first().map_or(0, Vec::len);
    // x = x⁺ − x⁻, plus one slack per row.
    let m = a.len();
    let rows: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Rational> = r.clone();
            row.extend(r.iter().map(|x| -x));
            row.extend((0..m).map(|k| Rational::from_integer(((k == i) as i64).into())));
            row
        })
        .collect();
    let c = vec![Rational::zero(); 2 * vars + m];
    !matches!(solve_standard(&rows, b, &c), LpOutcome::Infeasible)
}

/// `max cᵀx s.t. Ax ≤ b` for a feasible system, via its dual
/// `min bᵀy s.t. Aᵀy = c, y ≥ 0`. `None` means unbounded.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let vars = c.len();
    let at: Vec<Vec<Rational>> = (0..vars).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect();
    match solve_standard(&at, c, b) {
        LpOutcome::Optimal(v) => Some(v),
        // Dual infeasible: the (feasible) primal is unbounded.
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => None,
    }
}
