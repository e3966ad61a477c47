//! Floating-point semisimple basis of the complexified fusion algebra.
//!
//! The multiplication operator of a generic element has simple spectrum on a
//! semisimple commutative algebra, so its eigenvectors are multiples of the
//! primitive idempotents. Each eigenvector `v = s * eps` is rescaled to the
//! idempotent via `v * v = s v`, then normalized to `e = eps / sqrt(eta(eps, eps))`,
//! which gives `e * e = lambda e` with `lambda = 1 / sqrt(eta(eps, eps))`.

use std::cmp::Ordering;

use nalgebra::{ComplexField, DMatrix, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::FusionDatum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemisimpleError {
    #[error("multiplication operator has a repeated eigenvalue for every trial element")]
    DegenerateSpectrum,
    #[error("idempotent with vanishing norm at eigenvalue {0}: algebra is not semisimple")]
    Nilpotent(usize),
    #[error("semisimple basis residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
}

/// A semisimple basis `e_i` with `eta(e_i, e_j) = delta_ij` and
/// `e_i * e_j = delta_ij lambda_i e_i`, in coordinates of the module basis.
#[derive(Debug, Clone)]
pub struct SemisimpleData<F> {
    pub basis: Vec<Vec<Complex<F>>>,
    pub values: Vec<Complex<F>>,
    /// Largest residual of the two defining identities.
    pub residual: F,
}

impl<F: RealField + Copy> SemisimpleData<F> {
    /// `e^i(h_M) = eta(e_i, h_M)`, the coordinate of `h_M` along `e_i`.
    pub fn dual_coordinate(&self, datum: &FusionDatum, i: usize, module: usize) -> Complex<F> {
        self.basis[i][datum.dual(module)]
    }
}

type C<F> = Complex<F>;

fn fuse_complex<F: RealField + Copy>(d: &FusionDatum, x: &[C<F>], y: &[C<F>]) -> Vec<C<F>> {
    let m = d.len();
    let mut out = vec![C::new(F::zero(), F::zero()); m];
    for i in 0..m {
        for j in 0..m {
            let xy = x[i] * y[j];
            for (k, o) in out.iter_mut().enumerate() {
                let n = d.structure_constant(i, j, k);
                if n != 0 {
                    *o += xy * C::new(F::from_u64(n).unwrap(), F::zero());
                }
            }
        }
    }
    out
}

fn pair_complex<F: RealField + Copy>(d: &FusionDatum, x: &[C<F>], y: &[C<F>]) -> C<F> {
    x.iter()
        .enumerate()
        .fold(C::new(F::zero(), F::zero()), |acc, (i, xi)| acc + *xi * y[d.dual(i)])
}

fn norm<F: RealField + Copy>(v: &[C<F>]) -> F {
    v.iter().fold(F::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Eigenpairs of a complex matrix through its Schur form.
fn eigenpairs<F: RealField + Copy>(a: DMatrix<C<F>>) -> Vec<(C<F>, Vec<C<F>>)> {
    let m = a.nrows();
    let (q, t) = nalgebra::linalg::Schur::new(a).unpack();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let theta = t[(k, k)];
        let mut y = vec![C::new(F::zero(), F::zero()); m];
        y[k] = C::new(F::one(), F::zero());
        for i in (0..k).rev() {
            let mut s = C::new(F::zero(), F::zero());
            for (j, yj) in y.iter().enumerate().take(k + 1).skip(i + 1) {
                s += t[(i, j)] * *yj;
            }
            let denom = t[(i, i)] - theta;
            y[i] = -s / denom;
        }
        let v: Vec<C<F>> = (0..m).map(|r| (0..m).fold(C::new(F::zero(), F::zero()), |acc, c| acc + q[(r, c)] * y[c])).collect();
        out.push((theta, v));
    }
    out
}

fn cmp_with_tol<F: RealField + Copy>(a: F, b: F, tol: F) -> Ordering {
    if (a - b).abs() <= tol {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn cmp_complex<F: RealField + Copy>(a: &C<F>, b: &C<F>, tol: F) -> Ordering {
    cmp_with_tol(a.re, b.re, tol).then_with(|| cmp_with_tol(a.im, b.im, tol))
}

/// Simultaneous diagonalization of the fusion matrices.
///
/// Ordering is by value (real part, then imaginary part), ties broken
/// lexicographically on the basis coordinates, all up to `tol`.
pub fn semisimple_decomposition<F>(
    datum: &FusionDatum,
    tol: F,
) -> Result<SemisimpleData<F>, SemisimpleError>
where
    F: RealField + Copy + FromPrimitive + ToPrimitive,
{
    let m = datum.len();
    let zero = C::new(F::zero(), F::zero());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut last_err = SemisimpleError::DegenerateSpectrum;

    for _attempt in 0..8 {
        let x: Vec<F> = (0..m).map(|_| F::from_f64(rng.random_range(0.5..1.5)).unwrap()).collect();
        // (L_x)[k][j] = sum_i x_i C(i, j, k)
        let lx = DMatrix::from_fn(m, m, |k, j| {
            let mut s = F::zero();
            for (i, xi) in x.iter().enumerate() {
                let n = datum.structure_constant(i, j, k);
                if n != 0 {
                    s += *xi * F::from_u64(n).unwrap();
                }
            }
            C::new(s, F::zero())
        });
        let pairs = eigenpairs(lx);

        let separation = pairs
            .iter()
            .enumerate()
            .flat_map(|(a, (ta, _))| pairs.iter().skip(a + 1).map(move |(tb, _)| (*ta - *tb).modulus()))
            .fold(F::max_value().unwrap_or(F::one()), |acc, d| if d < acc { d } else { acc });
        if m > 1 && separation < F::from_f64(1e-6).unwrap() {
            last_err = SemisimpleError::DegenerateSpectrum;
            continue;
        }

        let mut basis = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        let mut failed = None;
        for (idx, (_, v)) in pairs.into_iter().enumerate() {
            let scale_v = norm(&v);
            let v: Vec<C<F>> = v.iter().map(|z| *z / C::new(scale_v, F::zero())).collect();
            let vv = fuse_complex(datum, &v, &v);
            // least-squares s with vv = s v
            let num = v.iter().zip(&vv).fold(zero, |acc, (a, b)| acc + a.conj() * *b);
            let s = num; // |v| = 1
            if s.modulus() < F::from_f64(1e-12).unwrap() {
                failed = Some(SemisimpleError::Nilpotent(idx));
                break;
            }
            let eps: Vec<C<F>> = v.iter().map(|z| *z / s).collect();
            let t = pair_complex(datum, &eps, &eps);
            if t.modulus() < F::from_f64(1e-12).unwrap() {
                failed = Some(SemisimpleError::Nilpotent(idx));
                break;
            }
            let lambda = C::new(F::one(), F::zero()) / ComplexField::sqrt(t);
            basis.push(eps.iter().map(|z| *z * lambda).collect::<Vec<_>>());
            values.push(lambda);
        }
        if let Some(e) = failed {
            last_err = e;
            continue;
        }

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            cmp_complex(&values[a], &values[b], tol).then_with(|| {
                basis[a]
                    .iter()
                    .zip(&basis[b])
                    .map(|(x, y)| cmp_complex(x, y, tol))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
        });
        let basis: Vec<Vec<C<F>>> = order.iter().map(|&i| basis[i].clone()).collect();
        let values: Vec<C<F>> = order.iter().map(|&i| values[i]).collect();

        let mut residual = F::zero();
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { F::one() } else { F::zero() };
                let eta = pair_complex(datum, &basis[i], &basis[j]);
                residual = residual.max((eta - C::new(target, F::zero())).modulus());
                let prod = fuse_complex(datum, &basis[i], &basis[j]);
                let diff: Vec<C<F>> = prod
                    .iter()
                    .zip(&basis[i])
                    .map(|(p, e)| if i == j { *p - values[i] * *e } else { *p })
                    .collect();
                residual = residual.max(norm(&diff));
            }
        }
        if residual > tol {
            last_err = SemisimpleError::Residual {
                residual: residual.to_f64().unwrap_or(f64::INFINITY),
                tolerance: tol.to_f64().unwrap_or(0.0),
            };
            continue;
        }
        return Ok(SemisimpleData { basis, values, residual });
    }
    Err(last_err)
}
