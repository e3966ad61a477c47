//! Fusion data: the finite Frobenius algebra spanned by simple modules.
//!
//! The fusion tensor is stored fully symmetric, `N(i,j,k)` being the rank of
//! three-point genus-zero coinvariants. Structure constants of the product
//! come from it through the contragredient involution:
//! `h_i * h_j = sum_k N(i, j, k') h_k`.

mod semisimple;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::scalar::Scalar;

pub use semisimple::{semisimple_decomposition, SemisimpleData, SemisimpleError};
pub use validate::{validate, AxiomViolation, ValidationReport};

/// Index of a simple module inside a [`FusionDatum`].
pub type ModuleIndex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("a fusion datum needs at least one module")]
    Empty,
    #[error("duplicate module label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown module label `{0}`")]
    UnknownLabel(String),
    #[error("unit index {0} out of range")]
    UnitOutOfRange(usize),
    #[error("dual table has length {found}, expected {expected}")]
    DualLength { expected: usize, found: usize },
    #[error("dual of module {index} points to {target}, out of range")]
    DualOutOfRange { index: usize, target: usize },
    #[error("fusion tensor has {found} entries, expected {expected}")]
    FusionLength { expected: usize, found: usize },
    #[error("conformal dimension table has length {found}, expected {expected}")]
    ConfDimLength { expected: usize, found: usize },
    #[error("fusion entry ({0}, {1}, {2}) listed twice with different values")]
    ConflictingEntry(String, String, String),
}

#[derive(Debug, Clone, Error)]
pub enum FusionError {
    #[error("malformed fusion datum: {0}")]
    Structure(#[from] StructuralError),
    #[error("fusion datum violates the Frobenius axioms:\n{0}")]
    Axioms(String, ValidationReport),
}

/// Raw, structurally consistent fusion tables. No axioms are implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionTables {
    modules: Vec<String>,
    unit: ModuleIndex,
    dual: Vec<ModuleIndex>,
    fusion: Vec<u64>,
    conf_dim: Vec<BigRational>,
    central_charge: BigRational,
}

impl FusionTables {
    /// Checks index ranges and table sizes. `fusion` is dense, row-major in
    /// `(i, j, k)`.
    pub fn new(
        modules: Vec<String>,
        unit: ModuleIndex,
        dual: Vec<ModuleIndex>,
        fusion: Vec<u64>,
        conf_dim: Vec<BigRational>,
        central_charge: BigRational,
    ) -> Result<Self, StructuralError> {
        let m = modules.len();
        if m == 0 {
            return Err(StructuralError::Empty);
        }
        let mut seen = HashMap::new();
        for (i, label) in modules.iter().enumerate() {
            if seen.insert(label.as_str(), i).is_some() {
                return Err(StructuralError::DuplicateLabel(label.clone()));
            }
        }
        if unit >= m {
            return Err(StructuralError::UnitOutOfRange(unit));
        }
        if dual.len() != m {
            return Err(StructuralError::DualLength { expected: m, found: dual.len() });
        }
        if let Some((index, &target)) = dual.iter().enumerate().find(|(_, &d)| d >= m) {
            return Err(StructuralError::DualOutOfRange { index, target });
        }
        if fusion.len() != m * m * m {
            return Err(StructuralError::FusionLength { expected: m * m * m, found: fusion.len() });
        }
        if conf_dim.len() != m {
            return Err(StructuralError::ConfDimLength { expected: m, found: conf_dim.len() });
        }
        Ok(Self { modules, unit, dual, fusion, conf_dim, central_charge })
    }

    /// Builds tables from sparse labelled entries; unlisted triples are zero.
    /// Each entry sets exactly the listed ordered triple.
    pub fn from_sparse(
        modules: Vec<String>,
        unit: &str,
        dual: &[(String, String)],
        entries: &[(String, String, String, u64)],
        conf_dim: &[(String, BigRational)],
        central_charge: BigRational,
    ) -> Result<Self, StructuralError> {
        let m = modules.len();
        let index: HashMap<&str, usize> =
            modules.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let look = |s: &str| {
            index.get(s).copied().ok_or_else(|| StructuralError::UnknownLabel(s.to_string()))
        };
        let unit_ix = look(unit)?;
        let mut dual_ix = vec![usize::MAX; m];
        for (a, b) in dual {
            dual_ix[look(a)?] = look(b)?;
        }
        if let Some(i) = dual_ix.iter().position(|&d| d == usize::MAX) {
            return Err(StructuralError::DualOutOfRange { index: i, target: usize::MAX });
        }
        let mut fusion = vec![0u64; m * m * m];
        let mut set = vec![false; m * m * m];
        for (a, b, c, value) in entries {
            let (i, j, k) = (look(a)?, look(b)?, look(c)?);
            let slot = (i * m + j) * m + k;
            if set[slot] && fusion[slot] != *value {
                return Err(StructuralError::ConflictingEntry(a.clone(), b.clone(), c.clone()));
            }
            set[slot] = true;
            fusion[slot] = *value;
        }
        let mut dims = vec![None; m];
        for (label, a) in conf_dim {
            dims[look(label)?] = Some(a.clone());
        }
        if dims.iter().any(Option::is_none) {
            return Err(StructuralError::ConfDimLength {
                expected: m,
                found: dims.iter().filter(|d| d.is_some()).count(),
            });
        }
        let dims = dims.into_iter().map(Option::unwrap).collect();
        Self::new(modules, unit_ix, dual_ix, fusion, dims, central_charge)
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> &[String] {
        &self.modules
    }

    pub fn label(&self, i: ModuleIndex) -> &str {
        &self.modules[i]
    }

    pub fn index_of(&self, label: &str) -> Option<ModuleIndex> {
        self.modules.iter().position(|m| m == label)
    }

    pub fn unit(&self) -> ModuleIndex {
        self.unit
    }

    pub fn dual(&self, i: ModuleIndex) -> ModuleIndex {
        self.dual[i]
    }

    pub fn duals(&self) -> &[ModuleIndex] {
        &self.dual
    }

    /// `N(i, j, k)`.
    #[inline]
    pub fn n(&self, i: ModuleIndex, j: ModuleIndex, k: ModuleIndex) -> u64 {
        let m = self.modules.len();
        self.fusion[(i * m + j) * m + k]
    }

    /// Coefficient of `h_k` in `h_i * h_j`.
    #[inline]
    pub fn structure_constant(&self, i: ModuleIndex, j: ModuleIndex, k: ModuleIndex) -> u64 {
        self.n(i, j, self.dual[k])
    }

    pub fn conf_dim(&self, i: ModuleIndex) -> &BigRational {
        &self.conf_dim[i]
    }

    pub fn conf_dims(&self) -> &[BigRational] {
        &self.conf_dim
    }

    pub fn central_charge(&self) -> &BigRational {
        &self.central_charge
    }

    /// Nonzero entries `(i, j, k, N)` in lexicographic order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, usize, u64)> + '_ {
        let m = self.len();
        (0..m * m * m).filter_map(move |slot| {
            let v = self.fusion[slot];
            (v != 0).then(|| (slot / (m * m), (slot / m) % m, slot % m, v))
        })
    }
}

/// Fusion tables that passed every Frobenius-algebra check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionDatum {
    tables: FusionTables,
}

impl FusionDatum {
    pub fn new(tables: FusionTables) -> Result<Self, FusionError> {
        let report = validate(&tables);
        if report.is_valid() {
            Ok(Self { tables })
        } else {
            Err(FusionError::Axioms(report.describe(&tables), report))
        }
    }

    /// The one-module datum of a holomorphic theory with central charge `c`.
    pub fn holomorphic(central_charge: BigRational) -> Self {
        let tables = FusionTables::new(
            vec!["V".to_string()],
            0,
            vec![0],
            vec![1],
            vec![BigRational::zero()],
            central_charge,
        )
        .expect("holomorphic tables are well formed");
        Self::new(tables).expect("holomorphic datum satisfies the axioms")
    }

    pub fn tables(&self) -> &FusionTables {
        &self.tables
    }

    pub fn into_tables(self) -> FusionTables {
        self.tables
    }

    pub fn basis<T: Scalar>(&self, i: ModuleIndex) -> FusionVector<T> {
        FusionVector::basis(self.len(), i)
    }

    pub fn unit_vector<T: Scalar>(&self) -> FusionVector<T> {
        self.basis(self.unit())
    }

    /// Bilinear fusion product.
    pub fn fuse<T: Scalar>(&self, x: &FusionVector<T>, y: &FusionVector<T>) -> FusionVector<T> {
        let m = self.len();
        let mut out = FusionVector::<T>::zero(m);
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let xy = xi.clone() * yj.clone();
                for k in 0..m {
                    let n = self.structure_constant(i, j, k);
                    if n != 0 {
                        let term = xy.clone() * T::from_u64(n);
                        out.coefficients[k] = out.coefficients[k].clone() + term;
                    }
                }
            }
        }
        out
    }

    /// `eta(x, y) = sum_i x_i y_{i'}`.
    pub fn pairing<T: Scalar>(&self, x: &FusionVector<T>, y: &FusionVector<T>) -> T {
        let mut acc = T::zero();
        for (i, xi) in x.iter().enumerate() {
            let yi = &y.coefficients[self.dual(i)];
            if !xi.is_zero() && !yi.is_zero() {
                acc = acc + xi.clone() * yi.clone();
            }
        }
        acc
    }
}

impl Deref for FusionDatum {
    type Target = FusionTables;

    fn deref(&self) -> &FusionTables {
        &self.tables
    }
}

/// An element of the fusion algebra in the basis of simple modules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FusionVector<T> {
    coefficients: Vec<T>,
}

impl<T: Scalar> FusionVector<T> {
    pub fn zero(m: usize) -> Self {
        Self { coefficients: vec![T::zero(); m] }
    }

    pub fn basis(m: usize, i: ModuleIndex) -> Self {
        let mut v = Self::zero(m);
        v.coefficients[i] = T::one();
        v
    }

    pub fn from_coefficients(coefficients: Vec<T>) -> Self {
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn get(&self, i: ModuleIndex) -> &T {
        &self.coefficients[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { coefficients: self.coefficients.iter().map(|a| a.clone() * s.clone()).collect() }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for FusionVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*h{i}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Fusion tables of the group ring of `Z/m`: `N(i,j,k) = [i+j+k = 0 mod m]`.
/// Labels are `"0"..`, conformal dimensions are supplied by the caller.
pub fn cyclic_tables(
    m: usize,
    conf_dim: Vec<BigRational>,
    central_charge: BigRational,
) -> Result<FusionTables, StructuralError> {
    let modules = (0..m).map(|i| i.to_string()).collect();
    let dual = (0..m).map(|i| (m - i) % m).collect();
    let mut fusion = vec![0u64; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let k = (2 * m - i - j) % m;
            fusion[(i * m + j) * m + k] = 1;
        }
    }
    FusionTables::new(modules, 0, dual, fusion, conf_dim, central_charge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn z2() -> FusionDatum {
        FusionDatum::new(cyclic_tables(2, vec![q(0, 1), q(1, 4)], q(1, 1)).unwrap()).unwrap()
    }

    fn z3() -> FusionDatum {
        FusionDatum::new(cyclic_tables(3, vec![q(0, 1), q(1, 3), q(1, 3)], q(2, 1)).unwrap())
            .unwrap()
    }

    #[test]
    fn z2_square_of_twisted_module_is_unit() {
        let d = z2();
        let w = d.basis::<BigRational>(1);
        assert_eq!(d.fuse(&w, &w), d.unit_vector());
    }

    #[test]
    fn unit_acts_trivially() {
        let d = z3();
        let x = FusionVector::from_coefficients(vec![q(1, 2), q(-3, 1), q(5, 7)]);
        assert_eq!(d.fuse(&d.unit_vector(), &x), x);
        assert_eq!(d.fuse(&x, &d.unit_vector()), x);
    }

    #[test]
    fn cyclic_product_adds_group_elements() {
        let d = z3();
        for a in 0..3 {
            for b in 0..3 {
                let prod = d.fuse(&d.basis::<u64>(a), &d.basis::<u64>(b));
                assert_eq!(prod, d.basis((a + b) % 3));
            }
        }
    }

    #[test]
    fn pairing_matches_duality() {
        let d = z3();
        let v: FusionVector<BigRational> = d.unit_vector();
        assert_eq!(d.pairing(&v, &v), q(1, 1));
        assert_eq!(d.pairing(&d.basis::<BigRational>(1), &d.basis(2)), q(1, 1));
        assert_eq!(d.pairing(&d.basis::<BigRational>(1), &d.basis(1)), q(0, 1));
    }

    #[test]
    fn structural_errors_are_reported() {
        let err = FusionTables::new(vec![], 0, vec![], vec![], vec![], q(0, 1)).unwrap_err();
        assert_eq!(err, StructuralError::Empty);
        let err = FusionTables::new(vec!["V".into()], 1, vec![0], vec![1], vec![q(0, 1)], q(0, 1))
            .unwrap_err();
        assert_eq!(err, StructuralError::UnitOutOfRange(1));
        let err = FusionTables::new(vec!["V".into()], 0, vec![3], vec![1], vec![q(0, 1)], q(0, 1))
            .unwrap_err();
        assert!(matches!(err, StructuralError::DualOutOfRange { .. }));
        let err =
            FusionTables::new(vec!["V".into(), "V".into()], 0, vec![0, 1], vec![0; 8], vec![q(0, 1); 2], q(0, 1))
                .unwrap_err();
        assert_eq!(err, StructuralError::DuplicateLabel("V".into()));
    }

    #[test]
    fn sparse_construction_matches_dense() {
        let labels = vec!["V".to_string(), "W".to_string()];
        let entries = vec![
            ("V".into(), "V".into(), "V".into(), 1),
            ("V".into(), "W".into(), "W".into(), 1),
            ("W".into(), "V".into(), "W".into(), 1),
            ("W".into(), "W".into(), "V".into(), 1),
        ];
        let tables = FusionTables::from_sparse(
            labels,
            "V",
            &[("V".into(), "V".into()), ("W".into(), "W".into())],
            &entries,
            &[("V".into(), q(0, 1)), ("W".into(), q(1, 4))],
            q(1, 1),
        )
        .unwrap();
        let dense = cyclic_tables(2, vec![q(0, 1), q(1, 4)], q(1, 1)).unwrap();
        assert_eq!(tables.fusion, dense.fusion);
        assert_eq!(tables.dual, dense.dual);
    }
}
