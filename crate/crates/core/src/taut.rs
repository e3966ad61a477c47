//! Formal tautological classes: finite linear combinations of decorated
//! boundary strata, with a global λ power and ψ exponents on legs and
//! half-edges. No relations are imposed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::graphs::{canonical_form, canonicalize_decorated, CanonicalCode, CanonicalForm, GraphError, StableGraph};
use crate::scalar::{factorial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("classes live on different spaces: ({0}, {1}) vs ({2}, {3})")]
    MismatchedType(u32, usize, u32, usize),
    #[error("generator of degree {degree} exceeds the truncation bound {max}")]
    DegreeOverflow { degree: u32, max: u32 },
    #[error("expected {expected} exponents, got {found}")]
    DecorationLength { expected: usize, found: usize },
    #[error("{0}")]
    Graph(#[from] GraphError),
}

/// A stratum class `(xi_G)_*(lambda^k prod psi^e)` with `G` in canonical form.
#[derive(Debug, Clone)]
pub struct Generator {
    form: Arc<CanonicalForm>,
    lambda: u32,
    psi_legs: Vec<u32>,
    psi_half_edges: Vec<u32>,
}

impl Generator {
    /// Canonicalizes `graph` and moves the half-edge decoration along.
    pub fn new(
        graph: &StableGraph,
        lambda: u32,
        psi_legs: Vec<u32>,
        psi_half_edges: Vec<u32>,
    ) -> Result<Self, TautError> {
        check_len(graph.num_legs(), psi_legs.len())?;
        check_len(graph.num_half_edges(), psi_half_edges.len())?;
        let (form, psi_half_edges) = canonicalize_decorated(graph, &psi_half_edges);
        Ok(Self { form: Arc::new(form), lambda, psi_legs, psi_half_edges })
    }

    /// `psi_half_edges` is indexed by the half-edges of `form.graph()`.
    pub fn on_canonical(
        form: Arc<CanonicalForm>,
        lambda: u32,
        psi_legs: Vec<u32>,
        psi_half_edges: &[u32],
    ) -> Result<Self, TautError> {
        check_len(form.graph().num_legs(), psi_legs.len())?;
        check_len(form.graph().num_half_edges(), psi_half_edges.len())?;
        let psi_half_edges = form.canonical_decoration(psi_half_edges);
        Ok(Self { form, lambda, psi_legs, psi_half_edges })
    }

    pub fn graph(&self) -> &StableGraph {
        self.form.graph()
    }

    pub fn form(&self) -> &Arc<CanonicalForm> {
        &self.form
    }

    pub fn code(&self) -> &CanonicalCode {
        self.form.code()
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn psi_legs(&self) -> &[u32] {
        &self.psi_legs
    }

    pub fn psi_half_edges(&self) -> &[u32] {
        &self.psi_half_edges
    }

    pub fn degree(&self) -> u32 {
        self.lambda
            + self.psi_legs.iter().sum::<u32>()
            + self.psi_half_edges.iter().sum::<u32>()
            + self.graph().num_edges() as u32
    }

    fn with_lambda(&self, lambda: u32) -> Self {
        Self { lambda, ..self.clone() }
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), TautError> {
    if expected == found {
        Ok(())
    } else {
        Err(TautError::DecorationLength { expected, found })
    }
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Generator {}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code()
            .cmp(other.code())
            .then_with(|| self.lambda.cmp(&other.lambda))
            .then_with(|| self.psi_legs.cmp(&other.psi_legs))
            .then_with(|| self.psi_half_edges.cmp(&other.psi_half_edges))
    }
}

/// Truncated formal class on `M_{g,n}`-bar. Equality compares the space and
/// the terms; the truncation bound is bookkeeping.
#[derive(Debug, Clone)]
pub struct TautClass<T> {
    genus: u32,
    legs: usize,
    max_degree: u32,
    terms: BTreeMap<Generator, T>,
}

impl<T: Scalar> PartialEq for TautClass<T> {
    fn eq(&self, other: &Self) -> bool {
        self.genus == other.genus && self.legs == other.legs && self.terms == other.terms
    }
}

impl<T: Scalar> TautClass<T> {
    pub fn zero(genus: u32, legs: usize, max_degree: u32) -> Self {
        Self { genus, legs, max_degree, terms: BTreeMap::new() }
    }

    /// `coefficient * (xi_G)_*(psi-monomial)` for a single decorated graph.
    /// The caller folds any `1/|Aut|` into `coefficient`.
    pub fn pushforward_term(
        generator: Generator,
        coefficient: T,
        max_degree: u32,
    ) -> Result<Self, TautError> {
        let degree = generator.degree();
        if degree > max_degree {
            return Err(TautError::DegreeOverflow { degree, max: max_degree });
        }
        let g = generator.graph();
        let mut out = Self::zero(g.genus(), g.num_legs(), max_degree);
        out.add_term(generator, coefficient);
        Ok(out)
    }

    /// `(1/|Aut|) [G_irr]`, one vertex of genus `g - 1` carrying a loop.
    pub fn delta_irr(genus: u32, legs: usize, max_degree: u32) -> Result<Self, TautError> {
        if genus == 0 {
            return Err(GraphError::UnstableType(genus, legs).into());
        }
        let graph = StableGraph::new(vec![genus - 1], vec![0; legs], vec![(0, 0)])?;
        Self::boundary_divisor(&graph, max_degree)
    }

    /// `(1/|Aut|) [G]` for the two-vertex graph with genus `i` and legs
    /// `subset` on one side.
    pub fn delta_sep(
        genus: u32,
        legs: usize,
        i: u32,
        subset: &[usize],
        max_degree: u32,
    ) -> Result<Self, TautError> {
        if i > genus {
            return Err(GraphError::UnstableType(i, subset.len() + 1).into());
        }
        let leg_vertex = (0..legs).map(|l| if subset.contains(&l) { 0 } else { 1 }).collect();
        let graph = StableGraph::new(vec![i, genus - i], leg_vertex, vec![(0, 1)])?;
        Self::boundary_divisor(&graph, max_degree)
    }

    fn boundary_divisor(graph: &StableGraph, max_degree: u32) -> Result<Self, TautError> {
        let form = canonical_form(graph);
        let coefficient = T::from_rational(&BigRational::new(1.into(), form.aut_order().into()));
        let generator = Generator::on_canonical(Arc::new(form), 0, vec![0; graph.num_legs()], &[0, 0])?;
        Self::pushforward_term(generator, coefficient, max_degree)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn terms(&self) -> &BTreeMap<Generator, T> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, generator: &Generator) -> T {
        self.terms.get(generator).cloned().unwrap_or_else(T::zero)
    }

    /// Adds a term in place; terms above the bound are dropped.
    pub fn add_term(&mut self, generator: Generator, coefficient: T) {
        if coefficient.is_zero() || generator.degree() > self.max_degree {
            return;
        }
        match self.terms.entry(generator) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().clone() + coefficient;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TautError> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<(), TautError> {
        if (self.genus, self.legs) != (other.genus, other.legs) {
            return Err(TautError::MismatchedType(self.genus, self.legs, other.genus, other.legs));
        }
        self.max_degree = self.max_degree.max(other.max_degree);
        for (gen, c) in &other.terms {
            self.add_term(gen.clone(), c.clone());
        }
        Ok(())
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.genus, self.legs, self.max_degree);
        for (gen, c) in &self.terms {
            out.add_term(gen.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(T::zero() - T::one()))
    }

    /// Multiplies by `exp(c_over_2 * lambda)` truncated at the bound.
    pub fn scale_by_lambda_exponential(&self, c_over_2: &T) -> Self {
        let mut out = Self::zero(self.genus, self.legs, self.max_degree);
        for (gen, c) in &self.terms {
            let room = self.max_degree - gen.degree();
            let mut power = T::one();
            for k in 0..=room {
                let coefficient = c.clone() * power.clone() * T::from_rational(&factorial(k).recip());
                out.add_term(gen.with_lambda(gen.lambda + k), coefficient);
                power = power * c_over_2.clone();
            }
        }
        out
    }

    fn filter(&self, max_degree: u32, keep: impl Fn(&Generator) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(g, _)| keep(g))
            .map(|(g, c)| (g.clone(), c.clone()))
            .collect();
        Self { genus: self.genus, legs: self.legs, max_degree, terms }
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        self.filter(max_degree.min(self.max_degree), |g| g.degree() <= max_degree)
    }

    pub fn degree_part(&self, d: u32) -> Self {
        self.filter(self.max_degree, |g| g.degree() == d)
    }

    /// Drops every generator supported on the boundary.
    pub fn restrict_to_smooth(&self) -> Self {
        self.filter(self.max_degree, |g| g.graph().is_smooth())
    }

    /// Renames leg `i` to `sigma[i]`.
    pub fn permute_legs(&self, sigma: &[usize]) -> Result<Self, TautError> {
        check_len(self.legs, sigma.len())?;
        let mut out = Self::zero(self.genus, self.legs, self.max_degree);
        for (gen, c) in &self.terms {
            let g = gen.graph();
            let mut legs = vec![0; self.legs];
            let mut psi = vec![0; self.legs];
            for i in 0..self.legs {
                legs[sigma[i]] = g.legs()[i];
                psi[sigma[i]] = gen.psi_legs[i];
            }
            let moved = StableGraph::new(g.genera().to_vec(), legs, g.edges().to_vec())?;
            out.add_term(Generator::new(&moved, gen.lambda, psi, gen.psi_half_edges.clone())?, c.clone());
        }
        Ok(out)
    }
}
