//! JSON documents for fusion data, lattices, graphs and classes.
//!
//! Rationals are written as exact strings `"p/q"` (or `"p"`). Legs are
//! labelled from 1 in documents. Half-edge `h` is side `h % 2` of edge
//! `h / 2` in the listed edge order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::{FusionDatum, FusionError, FusionTables, StructuralError};
use crate::graphs::{canonical_form, CanonicalForm, GraphError, StableGraph};
use crate::lattice::{GramLattice, LatticeError};
use crate::scalar::{format_rational, parse_rational};
use crate::taut::{Generator, TautClass, TautError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not an exact rational: {0:?}")]
    Rational(String),
    #[error("{0}")]
    Structure(#[from] StructuralError),
    #[error("{0}")]
    Fusion(#[from] FusionError),
    #[error("{0}")]
    Lattice(#[from] LatticeError),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Taut(#[from] TautError),
    #[error("{0}")]
    Invalid(String),
}

fn rational(s: &str) -> Result<BigRational, IoError> {
    parse_rational(s).ok_or_else(|| IoError::Rational(s.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionDocument {
    pub modules: Vec<String>,
    pub unit: String,
    pub dual: BTreeMap<String, String>,
    pub central_charge: String,
    pub conformal_dimensions: BTreeMap<String, String>,
    pub fusion: Vec<(String, String, String, u64)>,
}

impl FusionDocument {
    pub fn from_tables(t: &FusionTables) -> Self {
        let label = |i: usize| t.label(i).to_string();
        Self {
            modules: t.modules().to_vec(),
            unit: label(t.unit()),
            dual: (0..t.len()).map(|i| (label(i), label(t.dual(i)))).collect(),
            central_charge: format_rational(t.central_charge()),
            conformal_dimensions: (0..t.len()).map(|i| (label(i), format_rational(t.conf_dim(i)))).collect(),
            fusion: t.nonzero_entries().map(|(i, j, k, n)| (label(i), label(j), label(k), n)).collect(),
        }
    }

    /// Structural checks only; see [`Self::into_datum`] for the axioms.
    pub fn into_tables(self) -> Result<FusionTables, IoError> {
        let dual: Vec<(String, String)> = self.dual.into_iter().collect();
        let dims = self
            .conformal_dimensions
            .iter()
            .map(|(l, a)| Ok((l.clone(), rational(a)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        let c = rational(&self.central_charge)?;
        Ok(FusionTables::from_sparse(self.modules, &self.unit, &dual, &self.fusion, &dims, c)?)
    }

    pub fn into_datum(self) -> Result<FusionDatum, IoError> {
        Ok(FusionDatum::new(self.into_tables()?)?)
    }
}

pub fn parse_fusion_tables(text: &str) -> Result<FusionTables, IoError> {
    serde_json::from_str::<FusionDocument>(text)?.into_tables()
}

pub fn parse_fusion_datum(text: &str) -> Result<FusionDatum, IoError> {
    serde_json::from_str::<FusionDocument>(text)?.into_datum()
}

pub fn fusion_datum_to_json(datum: &FusionDatum) -> String {
    serde_json::to_string_pretty(&FusionDocument::from_tables(datum)).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub gram: Vec<Vec<i64>>,
}

pub fn parse_lattice(text: &str) -> Result<GramLattice, IoError> {
    let doc: LatticeDocument = serde_json::from_str(text)?;
    Ok(GramLattice::new(doc.gram)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegDoc {
    pub label: usize,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndDoc {
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub legs: Vec<LegDoc>,
    pub edges: Vec<[EndDoc; 2]>,
}

impl GraphDoc {
    pub fn from_graph(g: &StableGraph) -> Self {
        Self {
            vertices: g.genera().iter().map(|&genus| VertexDoc { genus }).collect(),
            legs: g.legs().iter().enumerate().map(|(i, &vertex)| LegDoc { label: i + 1, vertex }).collect(),
            edges: g.edges().iter().map(|&(a, b)| [EndDoc { vertex: a }, EndDoc { vertex: b }]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<StableGraph, IoError> {
        let n = self.legs.len();
        let mut legs = vec![usize::MAX; n];
        for leg in &self.legs {
            if leg.label == 0 || leg.label > n || legs[leg.label - 1] != usize::MAX {
                return Err(IoError::Invalid(format!("leg labels must be 1..={n}, each once")));
            }
            legs[leg.label - 1] = leg.vertex;
        }
        Ok(StableGraph::new(
            self.vertices.iter().map(|v| v.genus).collect(),
            legs,
            self.edges.iter().map(|[a, b]| (a.vertex, b.vertex)).collect(),
        )?)
    }
}

/// A graph record as emitted by the enumerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub graph: GraphDoc,
    pub aut_order: u64,
    pub code: Vec<u32>,
}

impl GraphRecord {
    pub fn from_form(form: &CanonicalForm) -> Self {
        Self {
            graph: GraphDoc::from_graph(form.graph()),
            aut_order: form.aut_order(),
            code: form.code().0.clone(),
        }
    }

    /// Recanonicalizes and rejects the record unless it is already canonical
    /// with matching code and automorphism order.
    pub fn to_form(&self) -> Result<CanonicalForm, IoError> {
        let graph = self.graph.to_graph()?;
        let form = canonical_form(&graph);
        if form.graph() != &graph || form.code().0 != self.code || form.aut_order() != self.aut_order {
            return Err(IoError::Invalid("graph record is not in canonical form".into()));
        }
        Ok(form)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coefficient: String,
    pub lambda: u32,
    pub graph: GraphDoc,
    /// Leg label (from 1) to exponent; zero exponents omitted.
    pub psi_legs: BTreeMap<usize, u32>,
    /// Half-edge index to exponent; zero exponents omitted.
    pub psi_half_edges: BTreeMap<usize, u32>,
}

impl TermDoc {
    pub fn from_term(gen: &Generator, coefficient: &BigRational) -> Self {
        Self {
            coefficient: format_rational(coefficient),
            lambda: gen.lambda(),
            graph: GraphDoc::from_graph(gen.graph()),
            psi_legs: nonzero(gen.psi_legs(), 1),
            psi_half_edges: nonzero(gen.psi_half_edges(), 0),
        }
    }

    pub fn to_term(&self) -> Result<(Generator, BigRational), IoError> {
        let graph = self.graph.to_graph()?;
        let psi_legs = dense(&self.psi_legs, graph.num_legs(), 1)?;
        let psi_half = dense(&self.psi_half_edges, graph.num_half_edges(), 0)?;
        let gen = Generator::new(&graph, self.lambda, psi_legs, psi_half)?;
        Ok((gen, rational(&self.coefficient)?))
    }
}

fn nonzero(exps: &[u32], offset: usize) -> BTreeMap<usize, u32> {
    exps.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i + offset, e)).collect()
}

fn dense(map: &BTreeMap<usize, u32>, len: usize, offset: usize) -> Result<Vec<u32>, IoError> {
    let mut out = vec![0; len];
    for (&k, &e) in map {
        if k < offset || k - offset >= len {
            return Err(IoError::Invalid(format!("exponent key {k} out of range")));
        }
        out[k - offset] = e;
    }
    Ok(out)
}

/// Terms sorted by generator order.
pub fn class_to_terms(class: &TautClass<BigRational>) -> Vec<TermDoc> {
    class.iter().map(|(g, c)| TermDoc::from_term(g, c)).collect()
}

pub fn class_from_terms(
    terms: &[TermDoc],
    genus: u32,
    legs: usize,
    max_degree: u32,
) -> Result<TautClass<BigRational>, IoError> {
    let mut out = TautClass::zero(genus, legs, max_degree);
    for t in terms {
        let (gen, c) = t.to_term()?;
        if gen.graph().genus() != genus || gen.graph().num_legs() != legs {
            return Err(IoError::Invalid("term lives on a different moduli space".into()));
        }
        out.add_assign(&TautClass::pushforward_term(gen, c, max_degree)?)?;
    }
    Ok(out)
}

/// One-line human-readable form of a generator, e.g. `lambda^1 psi_1^2 [g=(0,1) e=(0-1) legs=(1:0)]`.
pub fn format_generator(gen: &Generator) -> String {
    let mut parts = Vec::new();
    if gen.lambda() > 0 {
        parts.push(format!("lambda^{}", gen.lambda()));
    }
    for (i, &e) in gen.psi_legs().iter().enumerate() {
        if e > 0 {
            parts.push(format!("psi_{}^{}", i + 1, e));
        }
    }
    for (h, &e) in gen.psi_half_edges().iter().enumerate() {
        if e > 0 {
            parts.push(format!("psi_h{h}^{e}"));
        }
    }
    let g = gen.graph();
    let genera: Vec<String> = g.genera().iter().map(|x| x.to_string()).collect();
    let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let legs: Vec<String> = g.legs().iter().enumerate().map(|(i, v)| format!("{}:{v}", i + 1)).collect();
    parts.push(format!("[g=({}) e=({}) legs=({})]", genera.join(","), edges.join(","), legs.join(",")));
    parts.join(" ")
}

pub fn format_class(class: &TautClass<BigRational>) -> String {
    if class.is_zero() {
        return "0\n".into();
    }
    let mut out = String::new();
    for (gen, c) in class.iter() {
        out.push_str(&format!("{:>12}  {}\n", format_rational(c), format_generator(gen)));
    }
    out
}
