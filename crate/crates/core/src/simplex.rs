//! Phase-1 simplex over exact rationals with Bland's rule.
//!
//! Solves `min 1·a` subject to `A x + a = b`, `x, a >= 0` (rows with negative
//! `b` are negated first). The system `A x = b, x >= 0` is feasible exactly
//! when the optimum is zero.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Minimum total artificial value; zero iff the system is feasible.
    pub infeasibility: BigRational,
    /// Values of the structural variables at the optimum.
    pub x: Vec<BigRational>,
}

/// Phase 1 for `rows · x = rhs`, `x >= 0`. Every row must have `cols` entries.
pub fn phase_one(rows: &[Vec<BigRational>], rhs: &[BigRational], cols: usize) -> PhaseOne {
    assert_eq!(rows.len(), rhs.len(), "row and rhs counts differ");
    let m = rows.len();
    let width = cols + m;
    // tableau rows: [x (cols) | artificials (m) | rhs]
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (row, b) in rows.iter().zip(rhs) {
        assert_eq!(row.len(), cols, "row width differs from column count");
        let flip = b.is_negative();
        let mut r: Vec<BigRational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        r.resize(width, BigRational::zero());
        r.push(if flip { -b } else { b.clone() });
        t.push(r);
    }
    for (i, r) in t.iter_mut().enumerate() {
        r[cols + i] = BigRational::from_integer(1.into());
    }
    let mut basis: Vec<usize> = (cols..width).collect();

    // reduced costs of min sum(a): c_j - c_B B^-1 A_j, with c = 1 on artificials
    let mut cost = vec![BigRational::zero(); width + 1];
    for r in &t {
        for j in 0..cols {
            cost[j] -= &r[j];
        }
        cost[width] -= &r[width];
    }

    // Bland: lowest-index entering column with negative reduced cost
    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, r) in t.iter().enumerate() {
            if !r[enter].is_positive() {
                continue;
            }
            let ratio = &r[width] / &r[enter];
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
        let Some((p, _)) = leave else {
            // unbounded cannot occur: the objective is bounded below by 0
            break;
        };
        pivot(&mut t, &mut cost, p, enter);
        basis[p] = enter;
    }

    let mut x = vec![BigRational::zero(); cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            x[b] = t[i][width].clone();
        }
    }
    PhaseOne {
        infeasibility: -cost[width].clone(),
        x,
    }
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], p: usize, q: usize) {
    let piv = t[p][q].clone();
    for v in t[p].iter_mut() {
        *v /= &piv;
    }
    let prow = t[p].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == p || r[q].is_zero() {
            continue;
        }
        let f = r[q].clone();
        for (v, pv) in r.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !cost[q].is_zero() {
        let f = cost[q].clone();
        for (v, pv) in cost.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
