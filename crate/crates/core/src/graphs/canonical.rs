//! Canonical labelling of stable graphs by individualization-refinement.
//!
//! A vertex ordering determines a code: vertex genera, leg positions and the
//! upper triangle of the edge-multiplicity matrix. The canonical code is the
//! least code over the leaves of the search tree; the leaves attaining it are
//! exactly the vertex automorphisms. Half-edge symmetries (parallel edges,
//! loop flips) contribute a closed-form factor to `|Aut|`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::{StableGraph, Vertex};

/// Byte-comparable isomorphism invariant of a (possibly decorated) graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub Vec<u32>);

impl CanonicalCode {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_be_bytes()).collect()
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A graph in canonical presentation with its vertex automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    graph: StableGraph,
    code: CanonicalCode,
    /// Each entry maps position to vertex and preserves the code.
    automorphisms: Vec<Vec<Vertex>>,
    aut_order: u64,
}

impl CanonicalForm {
    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    /// `|Aut|` counting vertex permutations and compatible half-edge permutations.
    pub fn aut_order(&self) -> u64 {
        self.aut_order
    }

    pub fn vertex_automorphism_count(&self) -> usize {
        self.automorphisms.len()
    }

    /// Canonical ψ-exponents on this graph's half-edges for a decoration given
    /// on the same half-edges. Two decorations related by an automorphism map
    /// to the same vector.
    pub fn canonical_decoration(&self, psi: &[u32]) -> Vec<u32> {
        let edges: Vec<(Vertex, Vertex, u32, u32)> = self
            .graph
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| (a, b, psi[2 * e], psi[2 * e + 1]))
            .collect();
        self.minimize_decoration(&edges)
    }

    fn minimize_decoration(&self, edges: &[(Vertex, Vertex, u32, u32)]) -> Vec<u32> {
        let mut best: Option<Vec<(Vertex, Vertex, u32, u32)>> = None;
        let nv = self.graph.num_vertices();
        for order in &self.automorphisms {
            let mut inv = vec![0; nv];
            for (p, &v) in order.iter().enumerate() {
                inv[v] = p;
            }
            let mut mapped: Vec<(Vertex, Vertex, u32, u32)> = edges
                .iter()
                .map(|&(a, b, x, y)| {
                    let (p, q) = (inv[a], inv[b]);
                    match p.cmp(&q) {
                        Ordering::Less => (p, q, x, y),
                        Ordering::Greater => (q, p, y, x),
                        Ordering::Equal => (p, q, x.min(y), x.max(y)),
                    }
                })
                .collect();
            mapped.sort_unstable();
            if best.as_ref().is_none_or(|b| mapped < *b) {
                best = Some(mapped);
            }
        }
        best.expect("identity is always an automorphism")
            .into_iter()
            .flat_map(|(_, _, x, y)| [x, y])
            .collect()
    }
}

struct Ctx<'a> {
    graph: &'a StableGraph,
    adj: Vec<Vec<u32>>,
}

fn rank_signatures<K: Ord + Clone>(sigs: &[K]) -> (Vec<u32>, usize) {
    let mut distinct: Vec<K> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    let ranks = sigs
        .iter()
        .map(|s| distinct.binary_search(s).expect("present") as u32)
        .collect();
    (ranks, distinct.len())
}

impl<'a> Ctx<'a> {
    fn new(graph: &'a StableGraph) -> Self {
        let nv = graph.num_vertices();
        let mut adj = vec![vec![0u32; nv]; nv];
        for &(a, b) in &graph.edges {
            adj[a][b] += 1;
            if a != b {
                adj[b][a] += 1;
            }
        }
        Self { graph, adj }
    }

    fn initial_colors(&self) -> Vec<u32> {
        let nv = self.graph.num_vertices();
        let sigs: Vec<(u32, Vec<usize>, u32, usize)> = (0..nv)
            .map(|v| {
                (
                    self.graph.genera[v],
                    self.graph.legs_at(v).collect(),
                    self.adj[v][v],
                    self.graph.valence(v),
                )
            })
            .collect();
        rank_signatures(&sigs).0
    }

    fn refine(&self, colors: &mut Vec<u32>) {
        let nv = colors.len();
        let mut cells = {
            let mut c = colors.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..nv)
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> = (0..nv)
                        .filter(|&w| w != v && self.adj[v][w] > 0)
                        .map(|w| (colors[w], self.adj[v][w]))
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let (ranks, count) = rank_signatures(&sigs);
            *colors = ranks;
            if count == cells {
                break;
            }
            cells = count;
        }
    }

    fn encode(&self, order: &[Vertex]) -> Vec<u32> {
        let g = self.graph;
        let nv = g.num_vertices();
        let mut inv = vec![0u32; nv];
        for (p, &v) in order.iter().enumerate() {
            inv[v] = p as u32;
        }
        let mut code = Vec::with_capacity(3 + nv + g.legs.len() + nv * (nv + 1) / 2);
        code.push(nv as u32);
        code.push(g.edges.len() as u32);
        code.push(g.legs.len() as u32);
        code.extend(order.iter().map(|&v| g.genera[v]));
        code.extend(g.legs.iter().map(|&v| inv[v]));
        for p in 0..nv {
            for q in p..nv {
                code.push(self.adj[order[p]][order[q]]);
            }
        }
        code
    }

    fn search(&self, mut colors: Vec<u32>, best: &mut Option<(Vec<u32>, Vec<Vec<Vertex>>)>) {
        self.refine(&mut colors);
        let nv = colors.len();
        let mut members: BTreeMap<u32, Vec<Vertex>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            members.entry(c).or_default().push(v);
        }
        match members.values().find(|cell| cell.len() > 1) {
            None => {
                let mut order: Vec<Vertex> = (0..nv).collect();
                order.sort_by_key(|&v| colors[v]);
                let code = self.encode(&order);
                match best {
                    Some((b, orders)) => match code.cmp(b) {
                        Ordering::Less => *best = Some((code, vec![order])),
                        Ordering::Equal => orders.push(order),
                        Ordering::Greater => {}
                    },
                    None => *best = Some((code, vec![order])),
                }
            }
            Some(cell) => {
                for &v in cell {
                    let split: Vec<u32> = colors
                        .iter()
                        .enumerate()
                        .map(|(w, &c)| 2 * c + u32::from(w != v))
                        .collect();
                    let (dense, _) = rank_signatures(&split);
                    self.search(dense, best);
                }
            }
        }
    }
}

fn factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

/// Canonical presentation, code and automorphism data of a stable graph.
pub fn canonical_form(graph: &StableGraph) -> CanonicalForm {
    canonical_form_with_map(graph).0
}

/// Also returns, for each input vertex, its vertex in the canonical graph.
pub(crate) fn canonical_form_with_map(graph: &StableGraph) -> (CanonicalForm, Vec<Vertex>) {
    let ctx = Ctx::new(graph);
    let mut best = None;
    ctx.search(ctx.initial_colors(), &mut best);
    let (code, orders) = best.expect("a graph has at least one leaf");
    let order = &orders[0];
    let nv = graph.num_vertices();
    let mut inv = vec![0; nv];
    for (p, &v) in order.iter().enumerate() {
        inv[v] = p;
    }

    let genera = order.iter().map(|&v| graph.genera[v]).collect();
    let legs = graph.legs.iter().map(|&v| inv[v]).collect();
    let mut edges = Vec::with_capacity(graph.edges.len());
    for p in 0..nv {
        for q in p..nv {
            for _ in 0..ctx.adj[order[p]][order[q]] {
                edges.push((p, q));
            }
        }
    }
    let canonical = StableGraph::new_unchecked(genera, legs, edges);

    // automorphisms expressed on the canonical graph: position p -> inv[o[p]]
    let automorphisms: Vec<Vec<Vertex>> =
        orders.iter().map(|o| o.iter().map(|&v| inv[v]).collect()).collect();

    let mut edge_factor = 1u64;
    for p in 0..nv {
        for q in p..nv {
            let k = ctx.adj[order[p]][order[q]];
            edge_factor *= factorial(k);
            if p == q {
                edge_factor *= 1u64 << k;
            }
        }
    }
    let aut_order = automorphisms.len() as u64 * edge_factor;
    (
        CanonicalForm { graph: canonical, code: CanonicalCode(code), automorphisms, aut_order },
        inv,
    )
}

/// Canonical form of a graph with ψ-exponents on its half-edges: the
/// canonical graph and the decoration moved onto its half-edges.
pub fn canonicalize_decorated(graph: &StableGraph, psi: &[u32]) -> (CanonicalForm, Vec<u32>) {
    let (form, inv) = canonical_form_with_map(graph);
    let edges: Vec<(Vertex, Vertex, u32, u32)> = graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| (inv[a], inv[b], psi[2 * e], psi[2 * e + 1]))
        .collect();
    let decoration = form.minimize_decoration(&edges);
    (form, decoration)
}
