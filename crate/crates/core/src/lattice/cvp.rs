//! Exact minimum of a positive-definite quadratic form over a lattice coset.
//!
//! The form is written as `q(x) = sum_i d_i (x_i + sum_{j>i} r_ij x_j)^2`
//! by rational completion of squares. Coordinates are fixed from the last
//! one down; at each level the admissible integer shifts form an interval
//! around the real minimizer, found by exact rational comparisons only.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Rational square completion of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct SquareCompletion {
    pub pivots: Vec<BigRational>,
    /// `coupling[i][j]` for `j > i`.
    pub coupling: Vec<Vec<BigRational>>,
}

/// `None` if some pivot is not positive.
pub fn complete_squares(gram: &[Vec<BigRational>]) -> Option<SquareCompletion> {
    let d = gram.len();
    let mut q: Vec<Vec<BigRational>> = gram.to_vec();
    let mut pivots = Vec::with_capacity(d);
    let mut coupling = vec![vec![BigRational::zero(); d]; d];
    for i in 0..d {
        let p = q[i][i].clone();
        if p <= BigRational::zero() {
            return None;
        }
        for j in (i + 1)..d {
            coupling[i][j] = &q[i][j] / &p;
        }
        for k in (i + 1)..d {
            for l in (i + 1)..d {
                let delta = &q[k][i] * &q[i][l] / &p;
                q[k][l] -= delta;
            }
        }
        pivots.push(p);
    }
    Some(SquareCompletion { pivots, coupling })
}

pub fn quadratic_form(gram: &[Vec<BigRational>], x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            if !g.is_zero() {
                acc += g * &x[i] * &x[j];
            }
        }
    }
    acc
}

struct Search<'a> {
    sq: &'a SquareCompletion,
    shift: &'a [BigRational],
    x: Vec<BigRational>,
    best: BigRational,
    best_x: Vec<BigRational>,
}

impl Search<'_> {
    fn admissible(&self, i: usize, alpha: &BigInt, center: &BigRational, budget: &BigRational) -> Option<BigRational> {
        let xi = &self.shift[i] + BigRational::from_integer(alpha.clone());
        let t = &xi + center;
        let cost = &self.sq.pivots[i] * &t * &t;
        (cost <= *budget).then_some(cost)
    }

    fn descend(&mut self, level: usize, partial: BigRational) {
        let i = level;
        let center: BigRational = ((i + 1)..self.x.len())
            .map(|j| &self.sq.coupling[i][j] * &self.x[j])
            .fold(BigRational::zero(), |a, b| a + b);
        let budget = &self.best - &partial;
        if budget < BigRational::zero() {
            return;
        }
        // real minimizer of the i-th square: alpha = -(shift_i + center)
        let target = -(&self.shift[i] + &center);
        let start = target.floor().to_integer();

        let mut candidates = Vec::new();
        let mut alpha = start.clone();
        while let Some(cost) = self.admissible(i, &alpha, &center, &budget) {
            candidates.push((alpha.clone(), cost));
            alpha -= 1;
        }
        let mut alpha = start + 1;
        while let Some(cost) = self.admissible(i, &alpha, &center, &budget) {
            candidates.push((alpha.clone(), cost));
            alpha += 1;
        }
        candidates.sort_by(|a, b| a.1.cmp(&b.1));

        for (alpha, cost) in candidates {
            let total = &partial + &cost;
            if total > self.best {
                continue;
            }
            self.x[i] = &self.shift[i] + BigRational::from_integer(alpha);
            if i == 0 {
                if total < self.best {
                    self.best = total;
                    self.best_x = self.x.clone();
                }
            } else {
                self.descend(i - 1, total);
            }
        }
    }
}

/// `min_{alpha in Z^d} q(shift + alpha)` and a minimizing point.
///
/// Returns `None` when the form is not positive definite.
pub fn coset_minimum(
    gram: &[Vec<BigRational>],
    shift: &[BigRational],
) -> Option<(BigRational, Vec<BigRational>)> {
    let d = gram.len();
    if d == 0 {
        return Some((BigRational::zero(), Vec::new()));
    }
    let sq = complete_squares(gram)?;
    // start from the coset element with coordinates in [0, 1)
    let reduced: Vec<BigRational> = shift.iter().map(|s| s - s.floor()).collect();
    let initial = quadratic_form(gram, &reduced);
    let mut search = Search {
        sq: &sq,
        shift: &reduced,
        x: vec![BigRational::zero(); d],
        best: initial,
        best_x: reduced.clone(),
    };
    search.descend(d - 1, BigRational::zero());
    Some((search.best, search.best_x))
}
