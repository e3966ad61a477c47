//! Ranks of bundles of coinvariants.
//!
//! The exact path reduces genus by the non-separating factorization
//! `rank_g(M) = sum_W rank_{g-1}(M, W, W')` and evaluates genus zero by
//! iterated fusion. The semisimple formula is kept as an independent check.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex;
use thiserror::Error;

use crate::fusion::{semisimple_decomposition, FusionDatum, ModuleIndex, SemisimpleData, SemisimpleError};
use crate::graphs::is_stable_type;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankError {
    #[error("(g, n) = ({0}, {1}) is unstable: 2g - 2 + n must be positive")]
    Unstable(u32, usize),
    #[error("module index {0} out of range")]
    ModuleOutOfRange(ModuleIndex),
    #[error("rank does not fit in 64 bits")]
    Overflow,
    #[error("{0}")]
    Semisimple(#[from] SemisimpleError),
}

/// A stable pair `(g, modules)`; the modules are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankQuery {
    genus: u32,
    modules: Vec<ModuleIndex>,
}

impl RankQuery {
    pub fn new(genus: u32, modules: &[ModuleIndex]) -> Result<Self, RankError> {
        if !is_stable_type(genus, modules.len()) {
            return Err(RankError::Unstable(genus, modules.len()));
        }
        let mut modules = modules.to_vec();
        modules.sort_unstable();
        Ok(Self { genus, modules })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn modules(&self) -> &[ModuleIndex] {
        &self.modules
    }
}

/// Memoized exact ranks for one datum. Safe to share between threads.
#[derive(Debug)]
pub struct RankTable<'d> {
    datum: &'d FusionDatum,
    memo: RwLock<HashMap<RankQuery, u64>>,
}

impl<'d> RankTable<'d> {
    pub fn new(datum: &'d FusionDatum) -> Self {
        Self { datum, memo: RwLock::new(HashMap::new()) }
    }

    pub fn datum(&self) -> &'d FusionDatum {
        self.datum
    }

    pub fn rank(&self, genus: u32, modules: &[ModuleIndex]) -> Result<u64, RankError> {
        if let Some(&bad) = modules.iter().find(|&&i| i >= self.datum.len()) {
            return Err(RankError::ModuleOutOfRange(bad));
        }
        self.rank_query(&RankQuery::new(genus, modules)?)
    }

    pub fn rank_query(&self, query: &RankQuery) -> Result<u64, RankError> {
        if let Some(&r) = self.memo.read().expect("rank memo").get(query) {
            return Ok(r);
        }
        let r = if query.genus == 0 {
            self.genus_zero(&query.modules)?
        } else {
            let mut total = 0u64;
            for w in 0..self.datum.len() {
                let mut ms = query.modules.clone();
                ms.push(w);
                ms.push(self.datum.dual(w));
                let r = self.rank_query(&RankQuery::new(query.genus - 1, &ms)?)?;
                total = total.checked_add(r).ok_or(RankError::Overflow)?;
            }
            total
        };
        self.memo.write().expect("rank memo").insert(query.clone(), r);
        Ok(r)
    }

    /// `eta(h_1 * ... * h_{n-1}, h_n)` in exact integer arithmetic.
    fn genus_zero(&self, modules: &[ModuleIndex]) -> Result<u64, RankError> {
        let d = self.datum;
        let m = d.len();
        let (last, init) = modules.split_last().expect("stable genus-zero query has n >= 3");
        let mut v = vec![0u64; m];
        v[init[0]] = 1;
        for &x in &init[1..] {
            let mut next = vec![0u64; m];
            for (i, &vi) in v.iter().enumerate().filter(|(_, c)| **c != 0) {
                for (k, slot) in next.iter_mut().enumerate() {
                    let c = d.structure_constant(i, x, k);
                    if c != 0 {
                        let t = vi.checked_mul(c).ok_or(RankError::Overflow)?;
                        *slot = slot.checked_add(t).ok_or(RankError::Overflow)?;
                    }
                }
            }
            v = next;
        }
        Ok(v[d.dual(*last)])
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("rank memo").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Preloads memo entries, e.g. from a checksummed cache file.
    pub fn seed(&self, entries: impl IntoIterator<Item = (RankQuery, u64)>) {
        let mut memo = self.memo.write().expect("rank memo");
        for (q, r) in entries {
            memo.entry(q).or_insert(r);
        }
    }

    /// Memo contents in sorted order.
    pub fn entries(&self) -> Vec<(RankQuery, u64)> {
        let mut out: Vec<_> =
            self.memo.read().expect("rank memo").iter().map(|(q, r)| (q.clone(), *r)).collect();
        out.sort();
        out
    }
}

/// Exact rank with a throwaway memo.
pub fn rank_exact(datum: &FusionDatum, query: &RankQuery) -> Result<u64, RankError> {
    RankTable::new(datum).rank_query(query)
}

/// `sum_i lambda_i^{2g-2+n} prod_j e^i(h_{M_j})`, real part.
pub fn rank_semisimple_with(datum: &FusionDatum, data: &SemisimpleData<f64>, query: &RankQuery) -> f64 {
    let exponent = 2 * query.genus as i32 - 2 + query.modules.len() as i32;
    let mut total = Complex::new(0.0, 0.0);
    for (i, lambda) in data.values.iter().enumerate() {
        let mut term = lambda.powi(exponent);
        for &mj in &query.modules {
            term *= data.dual_coordinate(datum, i, mj);
        }
        total += term;
    }
    total.re
}

pub fn rank_semisimple(datum: &FusionDatum, query: &RankQuery) -> Result<f64, RankError> {
    let data = semisimple_decomposition(datum, 1e-9)?;
    Ok(rank_semisimple_with(datum, &data, query))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub exact: u64,
    pub semisimple: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

pub fn rank_crosscheck(datum: &FusionDatum, query: &RankQuery, tol: f64) -> Result<CrossCheck, RankError> {
    let exact = rank_exact(datum, query)?;
    let semisimple = rank_semisimple(datum, query)?;
    Ok(CrossCheck { exact, semisimple, discrepancy: (semisimple - exact as f64).abs(), tolerance: tol })
}
