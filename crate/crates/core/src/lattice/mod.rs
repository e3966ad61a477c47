//! Even positive-definite lattices and the fusion data of their vertex algebras.
//!
//! Simple modules are indexed by the discriminant group `L'/L`, fusion is
//! group addition, the contragredient is negation and the conformal dimension
//! of a coset is half the minimal norm inside it.

pub mod cvp;
pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fusion::{FusionDatum, FusionTables};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GramViolation {
    NotSquare { row: usize, len: usize },
    NotSymmetric { i: usize, j: usize },
    OddDiagonal { i: usize },
    /// Leading principal minor of size `size` is not positive.
    NotPositiveDefinite { size: usize, minor: BigInt },
}

impl fmt::Display for GramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { row, len } => write!(f, "row {row} has length {len}"),
            Self::NotSymmetric { i, j } => write!(f, "entries ({i},{j}) and ({j},{i}) differ"),
            Self::OddDiagonal { i } => write!(f, "diagonal entry {i} is odd"),
            Self::NotPositiveDefinite { size, minor } => {
                write!(f, "leading minor of size {size} is {minor}, not positive")
            }
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum LatticeError {
    #[error("empty Gram matrix")]
    Empty,
    #[error("invalid Gram matrix: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<GramViolation>),
    #[error("coset representative has dimension {found}, lattice rank is {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("vector is not in the dual lattice")]
    NotInDual,
    #[error("generated fusion datum failed validation: {0}")]
    Internal(String),
}

fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match ((k + 1)..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Symmetry, evenness and positive definiteness of a square integer matrix.
pub fn validate_gram(gram: &[Vec<i64>]) -> Vec<GramViolation> {
    let d = gram.len();
    let mut out = Vec::new();
    for (row, r) in gram.iter().enumerate() {
        if r.len() != d {
            out.push(GramViolation::NotSquare { row, len: r.len() });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if gram[i][j] != gram[j][i] {
                out.push(GramViolation::NotSymmetric { i, j });
            }
        }
        if gram[i][i] % 2 != 0 {
            out.push(GramViolation::OddDiagonal { i });
        }
    }
    for size in 1..=d {
        let block: Vec<Vec<BigInt>> =
            (0..size).map(|i| (0..size).map(|j| BigInt::from(gram[i][j])).collect()).collect();
        let minor = determinant(&block);
        if !minor.is_positive() {
            out.push(GramViolation::NotPositiveDefinite { size, minor });
            break;
        }
    }
    out
}

/// A validated even positive-definite Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        if gram.is_empty() {
            return Err(LatticeError::Empty);
        }
        let violations = validate_gram(&gram);
        if violations.is_empty() {
            Ok(Self { gram })
        } else {
            Err(LatticeError::Invalid(violations))
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.big())
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        self.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn rational(&self) -> Vec<Vec<BigRational>> {
        self.gram
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect()
    }

    /// `(x, y)` for rational coordinate vectors.
    pub fn inner(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if g != 0 {
                    acc += BigRational::from_integer(g.into()) * &x[i] * &y[j];
                }
            }
        }
        acc
    }

    /// Root lattice `A_n` (Cartan matrix).
    pub fn a(n: usize) -> Self {
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        Self::new(gram).expect("A_n is even and positive definite")
    }

    /// Root lattice `E_8` (Cartan matrix, Bourbaki labelling).
    pub fn e8() -> Self {
        let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut gram = vec![vec![0i64; 8]; 8];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in edges {
            gram[a][b] = -1;
            gram[b][a] = -1;
        }
        Self::new(gram).expect("E_8 is even unimodular")
    }
}

/// The discriminant group `L'/L` with canonical coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantData {
    /// Invariant factors greater than one.
    pub elementary_divisors: Vec<u64>,
    /// Group elements as coordinate tuples, in lexicographic order.
    pub elements: Vec<Vec<u64>>,
    /// Representative in `L'` with every coordinate in `[0, 1)`, per element.
    pub coset_reps: Vec<Vec<BigRational>>,
}

impl DiscriminantData {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.elementary_divisors)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let coords: Vec<u64> = self.elements[a]
            .iter()
            .zip(&self.elements[b])
            .zip(&self.elementary_divisors)
            .map(|((x, y), d)| (x + y) % d)
            .collect();
        self.index_of(&coords)
    }

    pub fn neg(&self, a: usize) -> usize {
        let coords: Vec<u64> = self.elements[a]
            .iter()
            .zip(&self.elementary_divisors)
            .map(|(x, d)| (d - x) % d)
            .collect();
        self.index_of(&coords)
    }

    /// Coordinates joined by `.`; the trivial group's element is `"0"`.
    pub fn label(&self, a: usize) -> String {
        if self.elementary_divisors.is_empty() {
            "0".to_string()
        } else {
            self.elements[a].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".")
        }
    }
}

fn reduce_unit_interval(v: Vec<BigRational>) -> Vec<BigRational> {
    v.into_iter().map(|x| &x - x.floor()).collect()
}

/// Inverse of an integer matrix with nonzero determinant, exactly.
fn rational_inverse(m: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> =
                r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("matrix is invertible");
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &pivot;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let src = a[c].clone();
                for (x, s) in a[r].iter_mut().zip(src) {
                    *x -= &f * s;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `L'/L` via the Smith normal form `U G V = D`: the map `y -> U y` identifies
/// `Z^d / G Z^d` with `(+) Z/d_i`, and `lambda = G^{-1} y` lifts back to `L'`.
pub fn discriminant_group(lattice: &GramLattice) -> DiscriminantData {
    let g = lattice.big();
    let d = lattice.rank();
    let smith = snf::smith_normal_form(&g);
    let g_inv = rational_inverse(&g);

    let factors: Vec<(usize, u64)> = smith
        .diagonal
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_one())
        .map(|(i, x)| (i, x.to_u64().expect("invariant factor fits in u64")))
        .collect();
    let divisors: Vec<u64> = factors.iter().map(|&(_, x)| x).collect();

    let mut elements: Vec<Vec<u64>> = vec![Vec::new()];
    for &dv in &divisors {
        elements = elements
            .into_iter()
            .flat_map(|prefix| {
                (0..dv).map(move |c| {
                    let mut e = prefix.clone();
                    e.push(c);
                    e
                })
            })
            .collect();
    }

    let coset_reps = elements
        .iter()
        .map(|coords| {
            let mut smith_coords = vec![BigInt::zero(); d];
            for (&(slot, _), &c) in factors.iter().zip(coords) {
                smith_coords[slot] = BigInt::from(c);
            }
            let y: Vec<BigInt> = (0..d)
                .map(|i| (0..d).map(|j| &smith.u_inv[i][j] * &smith_coords[j]).sum())
                .collect();
            let lambda: Vec<BigRational> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| &g_inv[i][j] * BigRational::from_integer(y[j].clone()))
                        .fold(BigRational::zero(), |a, b| a + b)
                })
                .collect();
            reduce_unit_interval(lambda)
        })
        .collect();

    DiscriminantData { elementary_divisors: divisors, elements, coset_reps }
}

/// `min_{alpha in L} (lambda + alpha, lambda + alpha) / 2`, exactly.
pub fn conformal_dimension(
    lattice: &GramLattice,
    coset_rep: &[BigRational],
) -> Result<BigRational, LatticeError> {
    let d = lattice.rank();
    if coset_rep.len() != d {
        return Err(LatticeError::Dimension { expected: d, found: coset_rep.len() });
    }
    // (lambda, e_j) must be integral for each basis vector
    for row in lattice.gram() {
        let pairing = row
            .iter()
            .zip(coset_rep)
            .map(|(&g, x)| BigRational::from_integer(g.into()) * x)
            .fold(BigRational::zero(), |a, b| a + b);
        if !pairing.is_integer() {
            return Err(LatticeError::NotInDual);
        }
    }
    let (min, _) = cvp::coset_minimum(&lattice.rational(), coset_rep)
        .expect("validated lattice is positive definite");
    Ok(min / BigRational::from_integer(2.into()))
}

/// Fusion datum of the lattice vertex algebra: modules `L'/L`, unit `0`,
/// dual by negation, `N(i,j,k) = [i + j + k = 0]`, central charge the rank.
pub fn fusion_datum_from_gram(lattice: &GramLattice) -> Result<FusionDatum, LatticeError> {
    let disc = discriminant_group(lattice);
    let m = disc.order();
    let modules: Vec<String> = (0..m).map(|a| disc.label(a)).collect();
    let dual: Vec<usize> = (0..m).map(|a| disc.neg(a)).collect();
    let mut fusion = vec![0u64; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let k = disc.neg(disc.add(i, j));
            fusion[(i * m + j) * m + k] = 1;
        }
    }
    let conf_dim = disc
        .coset_reps
        .iter()
        .map(|rep| conformal_dimension(lattice, rep))
        .collect::<Result<Vec<_>, _>>()?;
    let c = BigRational::from_integer(BigInt::from(lattice.rank()));
    let tables = FusionTables::new(modules, 0, dual, fusion, conf_dim, c)
        .map_err(|e| LatticeError::Internal(e.to_string()))?;
    FusionDatum::new(tables).map_err(|e| LatticeError::Internal(e.to_string()))
}
