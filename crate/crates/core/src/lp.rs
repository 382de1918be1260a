//! Exact feasibility of `A x = b, x >= 0` by phase-one simplex over the
//! rationals with Bland's rule.
//!
//! Either a feasible point is returned, or a Farkas vector `y` with
//! `yᵀA <= 0` and `yᵀb = 1`. Linearly dependent rows are removed before the
//! simplex runs; a dependent row with an inconsistent right-hand side yields
//! the certificate directly from the elimination multipliers.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A point with `A x = b` and `x >= 0`.
    Feasible(Vec<Rational>),
    /// A vector with `yᵀA <= 0` componentwise and `yᵀb = 1`.
    Infeasible(Vec<Rational>),
}

/// Equality system in dense row form.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl LinearSystem {
    pub fn new(cols: usize) -> Self {
        LinearSystem { cols, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn push_row(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.cols, "row width");
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds a row given as sparse `(column, coefficient)` pairs.
    pub fn push_sparse(&mut self, entries: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row = vec![Rational::zero(); self.cols];
        for (c, v) in entries {
            row[c] += v;
        }
        self.push_row(row, rhs);
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.rows[r][c] = v;
    }

    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.cols
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| dot(row, x) == *b)
    }

    pub fn is_farkas_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let by: Rational = dot(&self.rhs, y);
        by.is_positive() && (0..self.cols).all(|j| !column_dot(&self.rows, j, y).is_positive())
    }

    pub fn solve(&self) -> Feasibility {
        let (kept, conflict) = independent_rows(&self.rows, &self.rhs);
        if let Some(mut y) = conflict {
            normalize(&mut y, &self.rhs);
            return Feasibility::Infeasible(y);
        }
        let rows: Vec<&Vec<Rational>> = kept.iter().map(|&i| &self.rows[i]).collect();
        let rhs: Vec<&Rational> = kept.iter().map(|&i| &self.rhs[i]).collect();
        match phase_one(self.cols, &rows, &rhs) {
            Ok(x) => Feasibility::Feasible(x),
            Err(y_kept) => {
                let mut y = vec![Rational::zero(); self.rows.len()];
                for (k, &i) in kept.iter().enumerate() {
                    y[i] = y_kept[k].clone();
                }
                normalize(&mut y, &self.rhs);
                Feasibility::Infeasible(y)
            }
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn column_dot(rows: &[Vec<Rational>], j: usize, y: &[Rational]) -> Rational {
    rows.iter().zip(y).filter(|(r, v)| !r[j].is_zero() && !v.is_zero()).map(|(r, v)| &r[j] * v).sum()
}

fn normalize(y: &mut [Rational], rhs: &[Rational]) {
    let by = dot(rhs, y);
    debug_assert!(by.is_positive());
    for v in y.iter_mut() {
        *v /= &by;
    }
}

struct Pivot {
    col: usize,
    row: Vec<Rational>,
    combo: Vec<Rational>,
    rhs: Rational,
}

/// Greedy row basis by forward elimination. Returns the kept row indices, or
/// a multiplier vector `y` with `yᵀA = 0` and `yᵀb > 0` when some dependent
/// row is inconsistent.
fn independent_rows(rows: &[Vec<Rational>], rhs: &[Rational]) -> (Vec<usize>, Option<Vec<Rational>>) {
    let m = rows.len();
    let mut pivots: Vec<Pivot> = Vec::new();
    let mut kept = Vec::new();
    for (r, (row, b)) in rows.iter().zip(rhs).enumerate() {
        let mut red = row.clone();
        let mut combo = vec![Rational::zero(); m];
        combo[r] = Rational::one();
        let mut beta = b.clone();
        for p in &pivots {
            if red[p.col].is_zero() {
                continue;
            }
            let f = red[p.col].clone();
            for (x, y) in red.iter_mut().zip(&p.row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in combo.iter_mut().zip(&p.combo) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            beta -= &f * &p.rhs;
        }
        match red.iter().position(|v| !v.is_zero()) {
            Some(col) => {
                let inv = red[col].recip();
                red.iter_mut().for_each(|v| *v *= &inv);
                combo.iter_mut().for_each(|v| *v *= &inv);
                beta *= &inv;
                pivots.push(Pivot { col, row: red, combo, rhs: beta });
                kept.push(r);
            }
            None if beta.is_zero() => {}
            None => {
                if beta.is_negative() {
                    combo.iter_mut().for_each(|v| *v = -v.clone());
                }
                return (kept, Some(combo));
            }
        }
    }
    (kept, None)
}

/// Phase-one simplex on `rows x = rhs, x >= 0` with one artificial per row.
fn phase_one(n: usize, rows: &[&Vec<Rational>], rhs: &[&Rational]) -> Result<Vec<Rational>, Vec<Rational>> {
    let m = rows.len();
    let width = n + m;
    let mut sign = vec![false; m];
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut beta: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let neg = rhs[i].is_negative();
        sign[i] = neg;
        let mut t = Vec::with_capacity(width);
        t.extend(rows[i].iter().map(|v| if neg { -v.clone() } else { v.clone() }));
        t.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        tab.push(t);
        beta.push(if neg { -rhs[i].clone() } else { rhs[i].clone() });
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost: Vec<Rational> = (0..width)
        .map(|j| if j < n { -tab.iter().map(|t| &t[j]).sum::<Rational>() } else { Rational::zero() })
        .collect();
    let mut objective: Rational = beta.iter().sum();

    // Bland: lowest-index structural column with negative reduced cost
    while let Some(enter) = (0..n).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &beta[i] / &tab[i][enter];
            leave = match leave {
                None => Some((i, ratio)),
                Some((li, lr)) => {
                    if ratio < lr || (ratio == lr && basis[i] < basis[li]) {
                        Some((i, ratio))
                    } else {
                        Some((li, lr))
                    }
                }
            };
        }
        let (r, _) = leave.expect("phase-one objective is bounded below");
        let inv = tab[r][enter].recip();
        tab[r].iter_mut().for_each(|v| *v *= &inv);
        beta[r] *= &inv;
        let pivot_row = tab[r].clone();
        let pivot_rhs = beta[r].clone();
        for i in 0..m {
            if i == r || tab[i][enter].is_zero() {
                continue;
            }
            let f = tab[i][enter].clone();
            for (x, y) in tab[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            beta[i] -= &f * &pivot_rhs;
        }
        let f = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        objective += &f * &pivot_rhs;
        basis[r] = enter;
    }

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = beta[i].clone();
            }
        }
        Ok(x)
    } else {
        // duals from the artificial columns: y_i = 1 - reduced cost
        Err((0..m)
            .map(|i| {
                let y = Rational::one() - &cost[n + i];
                if sign[i] {
                    -y
                } else {
                    y
                }
            })
            .collect())
    }
}
