//! Enumeration of stable graphs of type `(g, n)` by repeated degeneration.
//!
//! Every graph with `k + 1` edges contracts along any of its edges to a graph
//! with `k` edges, so all of them appear among the one-step degenerations of
//! the previous level: a loop added at a vertex of positive genus, or a
//! vertex split in two by a new edge with its legs, half-edges and genus
//! distributed between the sides.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::canonical::{canonical_form, CanonicalCode, CanonicalForm};
use super::{is_stable_type, GraphError, StableGraph};

fn degenerations(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nv = graph.num_vertices();
    for v in 0..nv {
        let gv = graph.genera[v];
        if gv >= 1 {
            let mut genera = graph.genera.clone();
            genera[v] -= 1;
            let mut edges = graph.edges.clone();
            edges.push((v, v));
            out.push(StableGraph::new_unchecked(genera, graph.legs.clone(), edges));
        }

        let legs: Vec<usize> = graph.legs_at(v).collect();
        let halves: Vec<usize> = graph.half_edges_at(v).collect();
        let k = legs.len() + halves.len();
        for mask in 0u64..(1u64 << k) {
            let moved = mask.count_ones() as i64;
            let stay = k as i64 - moved;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                // each side also gets one half of the new edge
                if 2 * g1 as i64 - 1 + moved <= 0 || 2 * g2 as i64 - 1 + stay <= 0 {
                    continue;
                }
                let w = nv;
                let mut genera = graph.genera.clone();
                genera[v] = g2;
                genera.push(g1);
                let mut new_legs = graph.legs.clone();
                let mut edges = graph.edges.clone();
                for (bit, &leg) in legs.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        new_legs[leg] = w;
                    }
                }
                for (bit, &h) in halves.iter().enumerate() {
                    if mask >> (legs.len() + bit) & 1 == 1 {
                        let e = &mut edges[h / 2];
                        if h % 2 == 0 {
                            e.0 = w;
                        } else {
                            e.1 = w;
                        }
                    }
                }
                edges.push((v, w));
                out.push(StableGraph::new_unchecked(genera, new_legs, edges));
            }
        }
    }
    out
}

/// One representative per isomorphism class of stable graphs of type
/// `(g, n)`, sorted by edge count and then canonical code.
pub fn enumerate(g: u32, n: usize) -> Result<Vec<CanonicalForm>, GraphError> {
    if !is_stable_type(g, n) {
        return Err(GraphError::UnstableType(g, n));
    }
    let smooth = canonical_form(&StableGraph::smooth(g, n)?);
    let max_edges = 3 * g as usize + n - 3;
    let mut all = vec![smooth.clone()];
    let mut level = vec![smooth];
    for _ in 0..max_edges {
        let produced: Vec<CanonicalForm> = level
            .par_iter()
            .flat_map_iter(|form| degenerations(form.graph()).into_iter().map(|d| canonical_form(&d)))
            .collect();
        let mut next: HashMap<CanonicalCode, CanonicalForm> = HashMap::new();
        for form in produced {
            next.entry(form.code().clone()).or_insert(form);
        }
        let mut next: Vec<CanonicalForm> = next.into_values().collect();
        next.sort_by(|a, b| a.code().cmp(b.code()));
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    Ok(all)
}

type Entries = HashMap<(u32, usize), Arc<Vec<CanonicalForm>>>;

/// Write-once cache of enumerations keyed by `(g, n)`.
#[derive(Debug, Default)]
pub struct GraphCatalog {
    entries: Mutex<Entries>,
}

impl GraphCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, g: u32, n: usize) -> Result<Arc<Vec<CanonicalForm>>, GraphError> {
        if let Some(found) = self.entries.lock().expect("catalog lock").get(&(g, n)) {
            return Ok(found.clone());
        }
        // computed outside the lock; a racing duplicate is discarded
        let fresh = Arc::new(enumerate(g, n)?);
        let mut entries = self.entries.lock().expect("catalog lock");
        Ok(entries.entry((g, n)).or_insert(fresh).clone())
    }

    /// Seeds the cache, e.g. from disk. An existing entry wins.
    pub fn insert(&self, g: u32, n: usize, graphs: Vec<CanonicalForm>) {
        self.entries.lock().expect("catalog lock").entry((g, n)).or_insert(Arc::new(graphs));
    }
}
