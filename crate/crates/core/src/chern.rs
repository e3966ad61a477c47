//! Chern characters of bundles of coinvariants as formal tautological classes.
//!
//! `ch = exp(c/2 lambda) sum_{G, mu} 1/|Aut G| (xi_G)_*( prod_i exp(a_i psi_i)
//!       prod_v rank_{g_v}(...) prod_e (1 - exp(a (psi_h + psi_h'))) / (psi_h + psi_h') )`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::fusion::{FusionDatum, ModuleIndex};
use crate::graphs::{is_stable_type, module_assignments, CanonicalForm, GraphCatalog, GraphError, StableGraph};
use crate::ranks::{RankError, RankTable};
use crate::scalar::{binomial, factorial, rational_pow, Scalar};
use crate::taut::{Generator, TautClass, TautError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChernError {
    #[error("(g, n) = ({0}, {1}) is unstable: 2g - 2 + n must be positive")]
    Unstable(u32, usize),
    #[error("degree {degree} exceeds dim = 3g - 3 + n = {max}")]
    DegreeTooLarge { degree: u32, max: u32 },
    #[error("module index {0} out of range")]
    ModuleOutOfRange(ModuleIndex),
    #[error("{0}")]
    Rank(#[from] RankError),
    #[error("{0}")]
    Taut(#[from] TautError),
    #[error("{0}")]
    Graph(#[from] GraphError),
}

/// Expansion of `(1 - exp(a (x + y))) / (x + y)` up to total degree `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSeries<T> {
    a: BigRational,
    max_degree: u32,
    /// `coefficients[i][j]` for `i + j <= D`.
    coefficients: Vec<Vec<T>>,
}

impl<T: Scalar> EdgeSeries<T> {
    pub fn conformal_dimension(&self) -> &BigRational {
        &self.a
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Coefficient of `psi_h^i psi_h'^j`; zero beyond the bound.
    pub fn coefficient(&self, i: u32, j: u32) -> T {
        if i + j > self.max_degree {
            return T::zero();
        }
        self.coefficients[i as usize][j as usize].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }
}

/// `-a^{i+j+1} binom(i+j, i) / (i+j+1)!`.
pub fn edge_series<T: Scalar>(a: &BigRational, max_degree: u32) -> EdgeSeries<T> {
    let coefficients = (0..=max_degree)
        .map(|i| {
            (0..=max_degree - i)
                .map(|j| {
                    let k = i + j;
                    let c = -rational_pow(a, k + 1) * binomial(k, i) / factorial(k + 1);
                    T::from_rational(&c)
                })
                .collect()
        })
        .collect();
    EdgeSeries { a: a.clone(), max_degree, coefficients }
}

/// `3g - 3 + n`.
pub fn moduli_dimension(genus: u32, legs: usize) -> u32 {
    (3 * genus as i64 - 3 + legs as i64).max(0) as u32
}

/// Shared rank memo and graph catalog for repeated queries on one datum.
#[derive(Debug)]
pub struct ChernEngine<'d> {
    ranks: RankTable<'d>,
    catalog: Arc<GraphCatalog>,
}

impl<'d> ChernEngine<'d> {
    pub fn new(datum: &'d FusionDatum) -> Self {
        Self::with_catalog(datum, Arc::new(GraphCatalog::new()))
    }

    pub fn with_catalog(datum: &'d FusionDatum, catalog: Arc<GraphCatalog>) -> Self {
        Self { ranks: RankTable::new(datum), catalog }
    }

    pub fn datum(&self) -> &'d FusionDatum {
        self.ranks.datum()
    }

    pub fn ranks(&self) -> &RankTable<'d> {
        &self.ranks
    }

    pub fn catalog(&self) -> &Arc<GraphCatalog> {
        &self.catalog
    }

    fn check(&self, genus: u32, modules: &[ModuleIndex]) -> Result<(), ChernError> {
        if !is_stable_type(genus, modules.len()) {
            return Err(ChernError::Unstable(genus, modules.len()));
        }
        if let Some(&bad) = modules.iter().find(|&&i| i >= self.datum().len()) {
            return Err(ChernError::ModuleOutOfRange(bad));
        }
        Ok(())
    }

    fn half_central_charge<T: Scalar>(&self) -> T {
        T::from_rational(&(self.datum().central_charge() / BigRational::from_integer(2.into())))
    }

    /// Full Chern character truncated at `degree` (default and maximum:
    /// `3g - 3 + n`).
    pub fn chern_character<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
        degree: Option<u32>,
    ) -> Result<TautClass<T>, ChernError> {
        let max = moduli_dimension(genus, modules.len());
        let d = degree.unwrap_or(max);
        if d > max {
            return Err(ChernError::DegreeTooLarge { degree: d, max });
        }
        self.chern_character_formal(genus, modules, d)
    }

    /// Same sum with no dimension cap on the truncation degree. Terms above
    /// `3g - 3 + n` vanish geometrically but are kept in the free module.
    pub fn chern_character_formal<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
        max_degree: u32,
    ) -> Result<TautClass<T>, ChernError> {
        self.check(genus, modules)?;
        let graphs = self.catalog.get(genus, modules.len())?;
        let datum = self.datum();

        // modules grouped by conformal dimension
        let mut dims: Vec<BigRational> = datum.conf_dims().to_vec();
        dims.sort();
        dims.dedup();
        let class_of: Vec<usize> =
            datum.conf_dims().iter().map(|a| dims.binary_search(a).expect("present")).collect();
        let series: Vec<EdgeSeries<T>> = dims.iter().map(|a| edge_series(a, max_degree)).collect();

        let parts: Vec<TautClass<T>> = graphs
            .par_iter()
            .filter(|form| form.graph().num_edges() as u32 <= max_degree)
            .map(|form| {
                let ctx = GraphTerm { engine: self, modules, class_of: &class_of, series: &series, max_degree };
                ctx.contribution(&Arc::new(form.clone()))
            })
            .collect::<Result<_, _>>()?;

        let mut sum = TautClass::zero(genus, modules.len(), max_degree);
        for part in &parts {
            sum.add_assign(part)?;
        }
        Ok(sum.scale_by_lambda_exponential(&self.half_central_charge()))
    }

    /// `rank (c/2 lambda + sum a_i psi_i) - b_irr delta_irr - sum b_{i:I} delta_{i:I}`.
    pub fn first_chern_closed_form<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
    ) -> Result<TautClass<T>, ChernError> {
        self.check(genus, modules)?;
        let datum = self.datum();
        let n = modules.len();
        let rank = self.ranks.rank(genus, modules)?;
        let mut out = TautClass::zero(genus, n, 1);
        let smooth = Arc::new(crate::graphs::canonical_form(&StableGraph::smooth(genus, n)?));
        let rank_t = T::from_u64(rank);
        out.add_term(
            Generator::on_canonical(smooth.clone(), 1, vec![0; n], &[])?,
            rank_t.clone() * self.half_central_charge(),
        );
        for (i, &mi) in modules.iter().enumerate() {
            let mut psi = vec![0; n];
            psi[i] = 1;
            out.add_term(
                Generator::on_canonical(smooth.clone(), 0, psi, &[])?,
                rank_t.clone() * T::from_rational(datum.conf_dim(mi)),
            );
        }

        if genus >= 1 {
            let mut b = BigRational::zero();
            for w in 0..datum.len() {
                if datum.conf_dim(w).is_zero() {
                    continue;
                }
                let mut ms = modules.to_vec();
                ms.push(w);
                ms.push(datum.dual(w));
                b += datum.conf_dim(w) * BigRational::from_integer(self.ranks.rank(genus - 1, &ms)?.into());
            }
            let delta = TautClass::<T>::delta_irr(genus, n, 1)?;
            out.add_assign(&delta.scale(&T::from_rational(&-b)))?;
        }

        for i in 0..=genus {
            for mask in 0u64..(1u64 << n) {
                let subset: Vec<usize> = (0..n).filter(|&l| mask >> l & 1 == 1).collect();
                let rest: Vec<usize> = (0..n).filter(|&l| mask >> l & 1 == 0).collect();
                if !is_stable_type(i, subset.len() + 1) || !is_stable_type(genus - i, rest.len() + 1) {
                    continue;
                }
                if !is_representative(genus, n, i, &subset, &rest) {
                    continue;
                }
                let mut b = BigRational::zero();
                for w in 0..datum.len() {
                    if datum.conf_dim(w).is_zero() {
                        continue;
                    }
                    let mut left: Vec<ModuleIndex> = subset.iter().map(|&l| modules[l]).collect();
                    left.push(w);
                    let mut right: Vec<ModuleIndex> = rest.iter().map(|&l| modules[l]).collect();
                    right.push(datum.dual(w));
                    let r = self.ranks.rank(i, &left)? as u128 * self.ranks.rank(genus - i, &right)? as u128;
                    if r != 0 {
                        b += datum.conf_dim(w) * BigRational::from_integer(r.into());
                    }
                }
                let delta = TautClass::<T>::delta_sep(genus, n, i, &subset, 1)?;
                out.add_assign(&delta.scale(&T::from_rational(&-b)))?;
            }
        }
        Ok(out)
    }

    /// `rank exp(c/2 lambda + sum a_i psi_i)` on the smooth stratum.
    pub fn chern_smooth<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
        degree: Option<u32>,
    ) -> Result<TautClass<T>, ChernError> {
        self.check(genus, modules)?;
        let max = moduli_dimension(genus, modules.len());
        let d = degree.unwrap_or(max);
        if d > max {
            return Err(ChernError::DegreeTooLarge { degree: d, max });
        }
        self.chern_smooth_formal(genus, modules, d)
    }

    /// [`Self::chern_smooth`] without the dimension cap.
    pub fn chern_smooth_formal<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
        max_degree: u32,
    ) -> Result<TautClass<T>, ChernError> {
        self.check(genus, modules)?;
        let rank = BigRational::from_integer(self.ranks.rank(genus, modules)?.into());
        self.smooth_series(genus, modules, max_degree, |_| rank.clone())
    }

    /// `(1 + c/2 lambda + sum a_i psi_i)^rank` truncated at `3g - 3 + n`.
    pub fn total_chern_smooth<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
    ) -> Result<TautClass<T>, ChernError> {
        self.check(genus, modules)?;
        let rank = self.ranks.rank(genus, modules)?;
        let d = moduli_dimension(genus, modules.len());
        // (1 + X)^r = sum_d r(r-1)...(r-d+1) X^d / d!
        self.smooth_series(genus, modules, d, |total| {
            (0..total as u64)
                .map(|k| BigRational::from_integer((rank as i128 - k as i128).into()))
                .fold(BigRational::one(), |acc, x| acc * x)
        })
    }

    /// `sum weight(d) (c/2)^k / k! prod a_i^{e_i} / e_i! lambda^k prod psi_i^{e_i}`
    /// over exponents of total degree `d = k + sum e_i <= max_degree`.
    fn smooth_series<T: Scalar>(
        &self,
        genus: u32,
        modules: &[ModuleIndex],
        max_degree: u32,
        weight: impl Fn(u32) -> BigRational,
    ) -> Result<TautClass<T>, ChernError> {
        let datum = self.datum();
        let n = modules.len();
        let smooth = Arc::new(crate::graphs::canonical_form(&StableGraph::smooth(genus, n)?));
        let half_c = datum.central_charge() / BigRational::from_integer(2.into());
        let mut out = TautClass::zero(genus, n, max_degree);
        let mut exps = vec![0u32; n + 1];
        loop {
            let total: u32 = exps.iter().sum();
            if total <= max_degree {
                let mut c = weight(total) * rational_pow(&half_c, exps[0]) / factorial(exps[0]);
                for (i, &mi) in modules.iter().enumerate() {
                    c = c * rational_pow(datum.conf_dim(mi), exps[i + 1]) / factorial(exps[i + 1]);
                }
                let gen = Generator::on_canonical(smooth.clone(), exps[0], exps[1..].to_vec(), &[])?;
                out.add_term(gen, T::from_rational(&c));
            }
            // odometer over exponent vectors with each entry <= max_degree
            let mut slot = 0;
            loop {
                if slot == exps.len() {
                    return Ok(out);
                }
                exps[slot] += 1;
                if exps[slot] <= max_degree && exps.iter().sum::<u32>() <= max_degree {
                    break;
                }
                exps[slot] = 0;
                slot += 1;
            }
        }
    }
}

/// Chooses one of `(i, I)` and `(g - i, I^c)`: smaller genus first, then the
/// side holding leg 1, or the lexicographically smaller subset when `n = 0`.
fn is_representative(genus: u32, n: usize, i: u32, subset: &[usize], rest: &[usize]) -> bool {
    let j = genus - i;
    if i != j {
        return i < j;
    }
    if n >= 1 {
        subset.contains(&0)
    } else {
        subset <= rest
    }
}

struct GraphTerm<'a, 'd, T> {
    engine: &'a ChernEngine<'d>,
    modules: &'a [ModuleIndex],
    class_of: &'a [usize],
    series: &'a [EdgeSeries<T>],
    max_degree: u32,
}

impl<T: Scalar> GraphTerm<'_, '_, T> {
    fn contribution(&self, form: &Arc<CanonicalForm>) -> Result<TautClass<T>, ChernError> {
        let graph = form.graph();
        let datum = self.engine.datum();
        let nv = graph.num_vertices();
        let ne = graph.num_edges();
        let mut out = TautClass::zero(graph.genus(), graph.num_legs(), self.max_degree);

        let legs_at: Vec<Vec<usize>> = (0..nv).map(|v| graph.legs_at(v).collect()).collect();
        let halves_at: Vec<Vec<usize>> = (0..nv).map(|v| graph.half_edges_at(v).collect()).collect();

        // sum of vertex-rank products, grouped by the edge conformal-dimension classes
        let mut groups: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
        'assign: for mu in module_assignments(graph, datum) {
            let classes: Vec<usize> = (0..ne).map(|e| self.class_of[mu[2 * e]]).collect();
            if classes.iter().any(|&c| self.series[c].is_zero()) {
                continue;
            }
            let mut product = 1u128;
            for v in 0..nv {
                let mut ms: Vec<ModuleIndex> = legs_at[v].iter().map(|&l| self.modules[l]).collect();
                ms.extend(halves_at[v].iter().map(|&h| mu[h]));
                let r = self.engine.ranks.rank(graph.vertex_genus(v), &ms)?;
                if r == 0 {
                    continue 'assign;
                }
                product = product.checked_mul(r as u128).ok_or(RankError::Overflow)?;
            }
            let slot = groups.entry(classes).or_insert(0);
            *slot = slot.checked_add(product).ok_or(RankError::Overflow)?;
        }
        if groups.is_empty() {
            return Ok(out);
        }

        let budget = self.max_degree - ne as u32;
        let aut = BigRational::from_integer(form.aut_order().into());
        let leg_series: Vec<Vec<T>> = self
            .modules
            .iter()
            .map(|&mi| {
                let a = datum.conf_dim(mi);
                (0..=budget).map(|k| T::from_rational(&(rational_pow(a, k) / factorial(k)))).collect()
            })
            .collect();

        for (classes, weight) in groups {
            let scale = T::from_rational(&(BigRational::from_integer(weight.into()) / &aut));
            let mut expansion = Expansion {
                legs: &leg_series,
                edges: classes.iter().map(|&c| &self.series[c]).collect(),
                psi_legs: vec![0; graph.num_legs()],
                psi_halves: vec![0; 2 * ne],
                out: Vec::new(),
            };
            expansion.legs_from(0, budget, scale);
            for (psi_legs, psi_halves, c) in expansion.out {
                let gen = Generator::on_canonical(form.clone(), 0, psi_legs, &psi_halves)?;
                out.add_term(gen, c);
            }
        }
        Ok(out)
    }
}

/// Depth-first product of the leg exponentials and edge series.
struct Expansion<'s, T> {
    legs: &'s [Vec<T>],
    edges: Vec<&'s EdgeSeries<T>>,
    psi_legs: Vec<u32>,
    psi_halves: Vec<u32>,
    out: Vec<(Vec<u32>, Vec<u32>, T)>,
}

impl<T: Scalar> Expansion<'_, T> {
    fn legs_from(&mut self, i: usize, budget: u32, coefficient: T) {
        if i == self.legs.len() {
            self.edges_from(0, budget, coefficient);
            return;
        }
        for k in 0..=budget {
            let c = &self.legs[i][k as usize];
            if c.is_zero() {
                continue;
            }
            self.psi_legs[i] = k;
            self.legs_from(i + 1, budget - k, coefficient.clone() * c.clone());
        }
        self.psi_legs[i] = 0;
    }

    fn edges_from(&mut self, e: usize, budget: u32, coefficient: T) {
        if e == self.edges.len() {
            self.out.push((self.psi_legs.clone(), self.psi_halves.clone(), coefficient));
            return;
        }
        for total in 0..=budget {
            for x in 0..=total {
                let c = self.edges[e].coefficient(x, total - x);
                if c.is_zero() {
                    continue;
                }
                self.psi_halves[2 * e] = x;
                self.psi_halves[2 * e + 1] = total - x;
                self.edges_from(e + 1, budget - total, coefficient.clone() * c);
            }
        }
        self.psi_halves[2 * e] = 0;
        self.psi_halves[2 * e + 1] = 0;
    }
}

/// [`ChernEngine::chern_character`] with a fresh engine.
pub fn chern_character<T: Scalar>(
    datum: &FusionDatum,
    genus: u32,
    modules: &[ModuleIndex],
    degree: Option<u32>,
) -> Result<TautClass<T>, ChernError> {
    ChernEngine::new(datum).chern_character(genus, modules, degree)
}

pub fn first_chern_closed_form<T: Scalar>(
    datum: &FusionDatum,
    genus: u32,
    modules: &[ModuleIndex],
) -> Result<TautClass<T>, ChernError> {
    ChernEngine::new(datum).first_chern_closed_form(genus, modules)
}

pub fn chern_smooth<T: Scalar>(
    datum: &FusionDatum,
    genus: u32,
    modules: &[ModuleIndex],
    degree: Option<u32>,
) -> Result<TautClass<T>, ChernError> {
    ChernEngine::new(datum).chern_smooth(genus, modules, degree)
}

pub fn total_chern_smooth<T: Scalar>(
    datum: &FusionDatum,
    genus: u32,
    modules: &[ModuleIndex],
) -> Result<TautClass<T>, ChernError> {
    ChernEngine::new(datum).total_chern_smooth(genus, modules)
}
