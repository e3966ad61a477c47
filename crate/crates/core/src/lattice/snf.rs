//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `u * a * v = diag(divisors)` with `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal entries, each dividing the next; zeros trail for singular input.
    pub diagonal: Vec<BigInt>,
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (x, s) in m[i].iter_mut().zip(src) {
                *x += k * s;
            }
        }
        // u_inv <- u_inv * (I - k E_ij): column j -= k * column i
        for row in self.u_inv.iter_mut() {
            let ci = row[i].clone();
            row[j] -= k * ci;
        }
    }

    /// col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let cj = row[j].clone();
            row[i] += k * cj;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -x.clone();
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -row[i].clone();
        }
    }
}

/// Smith normal form of a square integer matrix.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let n = a.len();
    let mut r = Reducer { a: a.clone(), u: identity(n), u_inv: identity(n), v: identity(n) };

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !r.a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| r.a[i][j].abs() < r.a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(r);
            };
            r.swap_rows(t, pi);
            r.swap_cols(t, pj);

            let mut clean = true;
            for i in (t + 1)..n {
                if !r.a[i][t].is_zero() {
                    let q = r.a[i][t].div_floor(&r.a[t][t]);
                    r.add_row(i, t, &-q);
                    if !r.a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in (t + 1)..n {
                if !r.a[t][j].is_zero() {
                    let q = r.a[t][j].div_floor(&r.a[t][t]);
                    r.add_col(j, t, &-q);
                    if !r.a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad = ((t + 1)..n)
                .flat_map(|i| ((t + 1)..n).map(move |j| (i, j)))
                .find(|&(i, j)| !r.a[i][j].is_multiple_of(&r.a[t][t]));
            match bad {
                Some((i, _)) => r.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if r.a[t][t].is_negative() {
            r.negate_row(t);
        }
    }
    finish(r)
}

fn finish(r: Reducer) -> SmithForm {
    let diagonal = (0..r.a.len()).map(|i| r.a[i][i].clone()).collect();
    SmithForm { u: r.u, u_inv: r.u_inv, v: r.v, diagonal }
}
