use std::fmt;

use num_traits::{Signed, Zero};

use super::{FusionTables, ModuleIndex};

/// One failed Frobenius-algebra axiom together with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    DualNotInvolution { index: ModuleIndex },
    DualOfUnit,
    NotSymmetric { triple: [ModuleIndex; 3], permuted: [ModuleIndex; 3] },
    /// `N(i, j, unit)` differs from `[j = i']`.
    DeltaRule { i: ModuleIndex, j: ModuleIndex, found: u64 },
    Associativity { quad: [ModuleIndex; 4], left: u64, right: u64 },
    NotCommuting { i: ModuleIndex, j: ModuleIndex },
    /// `eta(h_i * h_j, h_k) != eta(h_i, h_j * h_k)`.
    FrobeniusCompatibility { triple: [ModuleIndex; 3] },
    /// `N(i, j, k) != N(i', j', k')`.
    ContragredientSymmetry { triple: [ModuleIndex; 3] },
    UnitConformalDimension,
    DualConformalDimension { index: ModuleIndex },
    NegativeConformalDimension { index: ModuleIndex },
}

impl AxiomViolation {
    pub fn describe(&self, t: &FusionTables) -> String {
        let l = |i: ModuleIndex| t.label(i);
        match self {
            Self::DualNotInvolution { index } => {
                format!("dual is not an involution at {}", l(*index))
            }
            Self::DualOfUnit => format!("dual of the unit {} is not the unit", l(t.unit())),
            Self::NotSymmetric { triple: [i, j, k], permuted: [a, b, c] } => format!(
                "fusion tensor not symmetric: N({},{},{}) != N({},{},{})",
                l(*i),
                l(*j),
                l(*k),
                l(*a),
                l(*b),
                l(*c)
            ),
            Self::DeltaRule { i, j, found } => format!(
                "delta rule fails at ({},{},{}): N = {found}, expected {}",
                l(*i),
                l(*j),
                l(t.unit()),
                u64::from(t.dual(*i) == *j)
            ),
            Self::Associativity { quad: [i, j, k, m], left, right } => format!(
                "product not associative at ({},{},{},{}): {left} != {right}",
                l(*i),
                l(*j),
                l(*k),
                l(*m)
            ),
            Self::NotCommuting { i, j } => {
                format!("fusion matrices of {} and {} do not commute", l(*i), l(*j))
            }
            Self::FrobeniusCompatibility { triple: [i, j, k] } => format!(
                "pairing not invariant at ({},{},{})",
                l(*i),
                l(*j),
                l(*k)
            ),
            Self::ContragredientSymmetry { triple: [i, j, k] } => format!(
                "N({},{},{}) differs from the value at the contragredient triple",
                l(*i),
                l(*j),
                l(*k)
            ),
            Self::UnitConformalDimension => {
                format!("conformal dimension of the unit {} is not 0", l(t.unit()))
            }
            Self::DualConformalDimension { index } => format!(
                "conformal dimensions of {} and its dual {} differ",
                l(*index),
                l(t.dual(*index))
            ),
            Self::NegativeConformalDimension { index } => {
                format!("conformal dimension of {} is negative", l(*index))
            }
        }
    }
}

/// All axioms violated by a set of tables; empty iff they form a valid datum.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, t: &FusionTables) -> String {
        self.violations.iter().map(|v| v.describe(t)).collect::<Vec<_>>().join("\n")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v:?}")?;
        }
        Ok(())
    }
}

/// Runs every Frobenius-algebra check on structurally sound tables.
pub fn validate(t: &FusionTables) -> ValidationReport {
    let m = t.len();
    let u = t.unit();
    let mut out = Vec::new();

    for i in 0..m {
        if t.dual(t.dual(i)) != i {
            out.push(AxiomViolation::DualNotInvolution { index: i });
        }
    }
    if t.dual(u) != u {
        out.push(AxiomViolation::DualOfUnit);
    }

    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let v = t.n(i, j, k);
                for p in [[j, i, k], [i, k, j], [k, j, i], [j, k, i], [k, i, j]] {
                    if t.n(p[0], p[1], p[2]) != v {
                        out.push(AxiomViolation::NotSymmetric { triple: [i, j, k], permuted: p });
                        break;
                    }
                }
                let (di, dj, dk) = (t.dual(i), t.dual(j), t.dual(k));
                if di < m && dj < m && dk < m && t.n(di, dj, dk) != v {
                    out.push(AxiomViolation::ContragredientSymmetry { triple: [i, j, k] });
                }
            }
        }
    }

    for i in 0..m {
        for j in 0..m {
            let found = t.n(i, j, u);
            if found != u64::from(t.dual(i) == j) {
                out.push(AxiomViolation::DeltaRule { i, j, found });
            }
        }
    }

    // structure matrices C[i][j][k] = coefficient of h_k in h_i * h_j
    let c = |i: usize, j: usize, k: usize| t.structure_constant(i, j, k);

    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let left: u64 = (0..m).map(|w| c(i, j, w) * t.n(w, k, l)).sum();
                    let right: u64 = (0..m).map(|w| c(j, k, w) * t.n(w, i, l)).sum();
                    if left != right {
                        out.push(AxiomViolation::Associativity { quad: [i, j, k, l], left, right });
                    }
                }
            }
        }
    }

    // (L_i L_j)[a][b] = sum_w C[j][b][w] C[i][w][a]
    for i in 0..m {
        for j in (i + 1)..m {
            let commutes = (0..m).all(|a| {
                (0..m).all(|b| {
                    let ij: u64 = (0..m).map(|w| c(j, b, w) * c(i, w, a)).sum();
                    let ji: u64 = (0..m).map(|w| c(i, b, w) * c(j, w, a)).sum();
                    ij == ji
                })
            });
            if !commutes {
                out.push(AxiomViolation::NotCommuting { i, j });
            }
        }
    }

    // eta(h_i*h_j, h_k) = C[i][j][k'] and eta(h_i, h_j*h_k) = C[j][k][i']
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if c(i, j, t.dual(k)) != c(j, k, t.dual(i)) {
                    out.push(AxiomViolation::FrobeniusCompatibility { triple: [i, j, k] });
                }
            }
        }
    }

    if !t.conf_dim(u).is_zero() {
        out.push(AxiomViolation::UnitConformalDimension);
    }
    for i in 0..m {
        if t.conf_dim(i) != t.conf_dim(t.dual(i)) {
            out.push(AxiomViolation::DualConformalDimension { index: i });
        }
        if t.conf_dim(i).is_negative() {
            out.push(AxiomViolation::NegativeConformalDimension { index: i });
        }
    }

    ValidationReport { violations: out }
}
