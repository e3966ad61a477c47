//! Stable graphs: dual graphs of stable pointed curves.
//!
//! Legs are labelled `0..n` internally (printed as `1..=n`) and every
//! isomorphism fixes them pointwise. Half-edges are implicit: edge `e` owns
//! half-edges `2e` (at its first endpoint) and `2e + 1` (at its second).

mod canonical;
mod enumerate;

use thiserror::Error;

use crate::fusion::{FusionTables, ModuleIndex};

pub use canonical::{canonical_form, canonicalize_decorated, CanonicalCode, CanonicalForm};
pub use enumerate::{enumerate, GraphCatalog};

pub type Vertex = usize;
pub type HalfEdge = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("leg or edge refers to vertex {0}, which does not exist")]
    VertexOutOfRange(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is unstable")]
    UnstableVertex(usize),
    #[error("(g, n) = ({0}, {1}) is unstable: 2g - 2 + n must be positive")]
    UnstableType(u32, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
}

impl StableGraph {
    pub fn new(
        genera: Vec<u32>,
        legs: Vec<Vertex>,
        edges: Vec<(Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let g = Self { genera, legs, edges };
        g.check()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(
        genera: Vec<u32>,
        legs: Vec<Vertex>,
        edges: Vec<(Vertex, Vertex)>,
    ) -> Self {
        Self { genera, legs, edges }
    }

    /// The one-vertex graph of `M_{g,n}`.
    pub fn smooth(genus: u32, n: usize) -> Result<Self, GraphError> {
        Self::new(vec![genus], vec![0; n], Vec::new())
    }

    fn check(&self) -> Result<(), GraphError> {
        let nv = self.genera.len();
        if nv == 0 {
            return Err(GraphError::Empty);
        }
        for &v in self.legs.iter().chain(self.edges.iter().flat_map(|(a, b)| [a, b])) {
            if v >= nv {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        for v in 0..nv {
            if 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 <= 0 {
                return Err(GraphError::UnstableVertex(v));
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut components = nv;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_genus(&self, v: Vertex) -> u32 {
        self.genera[v]
    }

    /// Vertex carrying each leg.
    pub fn legs(&self) -> &[Vertex] {
        &self.legs
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_half_edges(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn half_edge_vertex(&self, h: HalfEdge) -> Vertex {
        let (a, b) = self.edges[h / 2];
        if h.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    /// The other half of the edge containing `h`.
    pub fn partner(h: HalfEdge) -> HalfEdge {
        h ^ 1
    }

    pub fn valence(&self, v: Vertex) -> usize {
        self.legs.iter().filter(|&&x| x == v).count()
            + self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum::<usize>()
    }

    pub fn legs_at(&self, v: Vertex) -> impl Iterator<Item = usize> + '_ {
        self.legs.iter().enumerate().filter(move |(_, &x)| x == v).map(|(i, _)| i)
    }

    pub fn half_edges_at(&self, v: Vertex) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.num_half_edges()).filter(move |&h| self.half_edge_vertex(h) == v)
    }

    /// First Betti number `#E - #V + 1`.
    pub fn h1(&self) -> u32 {
        (self.edges.len() + 1 - self.genera.len()) as u32
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.h1()
    }

    pub fn is_smooth(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Stability of the pair `(g, n)`.
pub fn is_stable_type(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// All module assignments `mu` with `mu(h') = mu(h)'` on every edge.
///
/// An assignment lists one module per half-edge; the first half of each edge
/// runs over all modules in index order, edge 0 varying slowest.
pub fn module_assignments<'a>(
    graph: &StableGraph,
    datum: &'a FusionTables,
) -> impl Iterator<Item = Vec<ModuleIndex>> + 'a {
    let e = graph.num_edges();
    let m = datum.len();
    let total = m.checked_pow(e as u32).expect("assignment count overflows usize");
    (0..total).map(move |mut code| {
        let mut firsts = vec![0; e];
        for slot in firsts.iter_mut().rev() {
            *slot = code % m;
            code /= m;
        }
        let mut mu = Vec::with_capacity(2 * e);
        for w in firsts {
            mu.push(w);
            mu.push(datum.dual(w));
        }
        mu
    })
}
