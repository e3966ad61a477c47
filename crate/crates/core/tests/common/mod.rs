//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use cohft_core::fusion::FusionDatum;
use cohft_core::graphs::{is_stable_type, StableGraph};
use cohft_core::ranks::RankTable;
use cohft_core::lattice::{fusion_datum_from_gram, GramLattice};
use cohft_core::Rational;
use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn lattice(rows: &[&[i64]]) -> GramLattice {
    GramLattice::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn lattice_datum(rows: &[&[i64]]) -> FusionDatum {
    fusion_datum_from_gram(&lattice(rows)).unwrap()
}

/// Gram `[[2]]`: modules `0` (= V) and `1` (= W).
pub fn z2() -> FusionDatum {
    lattice_datum(&[&[2]])
}

/// A_2 root lattice: cyclic of order 3.
pub fn z3() -> FusionDatum {
    lattice_datum(&[&[2, -1], &[-1, 2]])
}

/// A_4 root lattice: cyclic of order 5.
pub fn z5() -> FusionDatum {
    fusion_datum_from_gram(&GramLattice::a(4)).unwrap()
}

/// All multisets of size `n` from `0..m`, as sorted vectors.
pub fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in start..m {
            cur.push(x);
            rec(m, n, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, 0, &mut Vec::new(), &mut out);
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn stable_types(max_g: u32, max_n: usize) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for g in 0..=max_g {
        for n in 0..=max_n {
            if 2 * g as i64 - 2 + n as i64 > 0 {
                out.push((g, n));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Graph oracles

/// Presentation-independent key: genera, leg vertices and multiplicity
/// matrix, minimized over every vertex permutation.
pub fn brute_key(genera: &[u32], legs: &[usize], edges: &[(usize, usize)]) -> Vec<u32> {
    let v = genera.len();
    let mut best: Option<Vec<u32>> = None;
    for perm in permutations(v) {
        // perm[old] = new
        let key = key_under(genera, legs, edges, &perm);
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap()
}

fn key_under(genera: &[u32], legs: &[usize], edges: &[(usize, usize)], perm: &[usize]) -> Vec<u32> {
    let v = genera.len();
    let mut g = vec![0u32; v];
    for (old, &new) in perm.iter().enumerate() {
        g[new] = genera[old];
    }
    let mut mult = vec![vec![0u32; v]; v];
    for &(a, b) in edges {
        let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
        mult[x][y] += 1;
    }
    let mut key = vec![v as u32];
    key.extend(g);
    key.extend(legs.iter().map(|&l| perm[l] as u32));
    for (x, row) in mult.iter().enumerate() {
        key.extend(&row[x..]);
    }
    key
}

pub fn graph_brute_key(g: &StableGraph) -> Vec<u32> {
    brute_key(g.genera(), g.legs(), g.edges())
}

fn connected(v: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn all_functions(domain: usize, range: usize) -> Vec<Vec<usize>> {
    let total = range.pow(domain as u32);
    (0..total)
        .map(|mut c| {
            (0..domain)
                .map(|_| {
                    let x = c % range;
                    c /= range;
                    x
                })
                .collect()
        })
        .collect()
}

fn perfect_matchings(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free[0];
        for i in 1..free.len() {
            let b = free[i];
            let rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            cur.push((a, b));
            rec(rest, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec((0..k).collect(), &mut Vec::new(), &mut out);
    out
}

fn genus_vectors(v: usize, total: u32) -> Vec<Vec<u32>> {
    all_functions(v, total as usize + 1)
        .into_iter()
        .map(|f| f.into_iter().map(|x| x as u32).collect::<Vec<u32>>())
        .filter(|g| g.iter().sum::<u32>() == total)
        .collect()
}

/// Every fully labelled stable graph of type `(g, n)`: vertices `0..V`,
/// half-edges `0..2E` with a perfect matching and an attachment map. Returns
/// the number of labelled structures in each isomorphism class, keyed by
/// [`brute_key`], together with `(V, E)` for that class.
pub fn labelled_presentations(g: u32, n: usize) -> BTreeMap<Vec<u32>, (usize, usize, u64)> {
    let mut out: BTreeMap<Vec<u32>, (usize, usize, u64)> = BTreeMap::new();
    let max_v = (2 * g as i64 - 2 + n as i64) as usize;
    let max_e = (3 * g as i64 - 3 + n as i64) as usize;
    for v in 1..=max_v {
        for e in (v - 1)..=max_e {
            let h1 = e + 1 - v;
            if h1 as u32 > g {
                continue;
            }
            let matchings = perfect_matchings(2 * e);
            let attachments = all_functions(2 * e, v);
            let leg_maps = all_functions(n, v);
            for genera in genus_vectors(v, g - h1 as u32) {
                for att in &attachments {
                    for m in &matchings {
                        let edges: Vec<(usize, usize)> = m.iter().map(|&(a, b)| (att[a], att[b])).collect();
                        if !connected(v, &edges) {
                            continue;
                        }
                        for legs in &leg_maps {
                            let stable = (0..v).all(|x| {
                                let val = legs.iter().filter(|&&l| l == x).count()
                                    + att.iter().filter(|&&a| a == x).count();
                                2 * genera[x] as i64 - 2 + val as i64 > 0
                            });
                            if !stable {
                                continue;
                            }
                            let key = brute_key(&genera, legs, &edges);
                            out.entry(key).or_insert((v, e, 0)).2 += 1;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Normalized presentation: vertices carrying legs first, ordered by their
/// smallest leg; leg-free vertices after, by genus. Isomorphic normalized
/// graphs differ only by a permutation of equal-genus leg-free vertices.
fn normalized_key(genera: &[u32], legs: &[usize], edges: &[(usize, usize)]) -> Vec<u32> {
    let v = genera.len();
    let mut order: Vec<usize> = Vec::new();
    for &l in legs {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    let k = order.len();
    let mut free: Vec<usize> = (0..v).filter(|x| !order.contains(x)).collect();
    free.sort_by_key(|&x| genera[x]);
    order.extend(free);
    // order[new] = old
    let mut best: Option<Vec<u32>> = None;
    let tail: Vec<usize> = order[k..].to_vec();
    for p in permutations(tail.len()) {
        let arranged: Vec<usize> = p.iter().map(|&i| tail[i]).collect();
        if arranged.windows(2).any(|w| genera[w[0]] > genera[w[1]]) {
            continue;
        }
        let mut perm = vec![0; v];
        for (new, &old) in order[..k].iter().chain(arranged.iter()).enumerate() {
            perm[old] = new;
        }
        let key = key_under(genera, legs, edges, &perm);
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap()
}

pub fn graph_normalized_key(g: &StableGraph) -> Vec<u32> {
    normalized_key(g.genera(), g.legs(), g.edges())
}

/// Isomorphism classes of stable graphs of type `(g, n)` by generating every
/// normalized multigraph presentation and discarding isomorphs. Returns the
/// class keys with one representative each, plus the number of
/// presentations generated.
pub fn multigraph_classes(g: u32, n: usize) -> (HashMap<Vec<u32>, StableGraph>, usize) {
    let excess = (2 * g as i64 - 2 + n as i64) as usize;
    let mut classes = HashMap::new();
    let mut generated = 0usize;
    for v in 1..=excess {
        // leg maps in first-occurrence order
        let leg_maps: Vec<Vec<usize>> = all_functions(n, v)
            .into_iter()
            .filter(|f| {
                let mut next = 0;
                f.iter().all(|&x| {
                    if x < next {
                        true
                    } else if x == next {
                        next += 1;
                        true
                    } else {
                        false
                    }
                })
            })
            .collect();
        for hsum in 0..=g {
            let e = v - 1 + hsum as usize;
            for genera in genus_vectors(v, g - hsum) {
                for legs in &leg_maps {
                    let k = legs.iter().max().map_or(0, |&x| x + 1);
                    if genera[k..].windows(2).any(|w| w[0] > w[1]) {
                        continue;
                    }
                    let base: Vec<usize> = (0..v).map(|x| legs.iter().filter(|&&l| l == x).count()).collect();
                    let cap: Vec<usize> = (0..v)
                        .map(|x| (excess - (v - 1) + 2).saturating_sub(2 * genera[x] as usize))
                        .collect();
                    let mut fill = Fill { v, genera: &genera, cap: &cap, val: base, edges: Vec::new(), out: Vec::new() };
                    fill.run(0, 0, e);
                    for edges in fill.out {
                        if !connected(v, &edges) {
                            continue;
                        }
                        generated += 1;
                        let key = normalized_key(&genera, legs, &edges);
                        classes
                            .entry(key)
                            .or_insert_with(|| StableGraph::new(genera.clone(), legs.clone(), edges).unwrap());
                    }
                }
            }
        }
    }
    (classes, generated)
}

struct Fill<'a> {
    v: usize,
    genera: &'a [u32],
    cap: &'a [usize],
    val: Vec<usize>,
    edges: Vec<(usize, usize)>,
    out: Vec<Vec<(usize, usize)>>,
}

impl Fill<'_> {
    /// Chooses the multiplicity of pair `(p, q)`, `p <= q`, in row-major order.
    fn run(&mut self, p: usize, q: usize, left: usize) {
        if p == self.v {
            if left == 0 {
                self.out.push(self.edges.clone());
            }
            return;
        }
        let (np, nq) = if q + 1 == self.v { (p + 1, p + 1) } else { (p, q + 1) };
        let per = if p == q { 2 } else { 1 };
        let mut k = 0;
        loop {
            if q + 1 == self.v {
                // row p is complete: check stability of p
                if 2 * self.genera[p] as i64 - 2 + self.val[p] as i64 > 0 {
                    self.run(np, nq, left - k);
                }
            } else {
                self.run(np, nq, left - k);
            }
            if k == left
                || self.val[p] + per > self.cap[p]
                || (p != q && self.val[q] + 1 > self.cap[q])
            {
                break;
            }
            k += 1;
            self.val[p] += per;
            if p != q {
                self.val[q] += 1;
            }
            self.edges.push((p, q));
        }
        for _ in 0..k {
            self.edges.pop();
            self.val[p] -= per;
            if p != q {
                self.val[q] -= 1;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Lattice oracles

/// `min (x, x)/2` over `x` in `rep + Z^d`, by scanning a box derived from a
/// floating-point lower bound on the smallest eigenvalue, padded by two.
pub fn cvp_oracle(gram: &[Vec<i64>], rep: &[Rational]) -> Rational {
    let d = gram.len();
    let m = DMatrix::from_fn(d, d, |i, j| gram[i][j] as f64);
    let lam_min = m.symmetric_eigen().eigenvalues.min() * 0.99;
    assert!(lam_min > 0.0);
    let reduced: Vec<Rational> = rep.iter().map(|x| x - x.floor()).collect();
    let norm = |x: &[Rational]| -> Rational {
        let mut acc = Rational::zero();
        for i in 0..d {
            for j in 0..d {
                acc += Rational::from_integer(gram[i][j].into()) * &x[i] * &x[j];
            }
        }
        acc
    };
    let bound = norm(&reduced).to_f64().unwrap();
    let radius = (bound / lam_min).sqrt().ceil() as i64 + 2;
    let mut best = norm(&reduced);
    let side = (2 * radius + 1) as usize;
    for idx in 0..side.pow(d as u32) {
        let mut c = idx;
        let x: Vec<Rational> = (0..d)
            .map(|i| {
                let a = (c % side) as i64 - radius;
                c /= side;
                &reduced[i] + Rational::from_integer(a.into())
            })
            .collect();
        let v = norm(&x);
        if v < best {
            best = v;
        }
    }
    best / Rational::from_integer(2.into())
}

/// Random even positive-definite Gram matrices of ranks cycling through 1, 2, 3, with entries
/// bounded by 12 in absolute value and determinant at most `max_det`.
pub fn random_lattices(count: usize, max_det: i64, seed: u64) -> Vec<Vec<Vec<i64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let d = 1 + out.len() % 3;
        let mut g = vec![vec![0i64; d]; d];
        for i in 0..d {
            g[i][i] = 2 * rng.random_range(1..=6i64);
            for j in 0..i {
                let x = rng.random_range(-12..=12i64);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        if let Ok(l) = GramLattice::new(g.clone()) {
            let det = l.determinant();
            if det <= max_det.into() {
                out.push(g);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Non-pointed fusion data

fn dense(m: usize, rules: &[(usize, usize, usize)]) -> Vec<u64> {
    // rules are unordered triples with N = 1; fill every permutation
    let mut out = vec![0u64; m * m * m];
    for &(a, b, c) in rules {
        for (i, j, k) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            out[(i * m + j) * m + k] = 1;
        }
    }
    out
}

/// Ising: `1, sigma, psi` with `sigma sigma = 1 + psi`, `psi psi = 1`.
pub fn ising() -> FusionDatum {
    let tables = cohft_core::fusion::FusionTables::new(
        vec!["1".into(), "s".into(), "p".into()],
        0,
        vec![0, 1, 2],
        dense(3, &[(0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 1, 2)]),
        vec![q(0, 1), q(1, 16), q(1, 2)],
        q(1, 2),
    )
    .unwrap();
    FusionDatum::new(tables).unwrap()
}

/// Fibonacci: `1, tau` with `tau tau = 1 + tau`.
pub fn fibonacci() -> FusionDatum {
    let tables = cohft_core::fusion::FusionTables::new(
        vec!["1".into(), "t".into()],
        0,
        vec![0, 1],
        dense(2, &[(0, 0, 0), (0, 1, 1), (1, 1, 1)]),
        vec![q(0, 1), q(2, 5)],
        q(14, 5),
    )
    .unwrap();
    FusionDatum::new(tables).unwrap()
}

// ---------------------------------------------------------------------------
// Rank checks

/// `rank_g(M) = sum_W rank_i(M_I, W) rank_{g-i}(M_J, W')` for every stable split.
pub fn separating_consistent(t: &RankTable<'_>, g: u32, ms: &[usize]) -> bool {
    let d = t.datum();
    let n = ms.len();
    let whole = t.rank(g, ms).unwrap();
    for i in 0..=g {
        for mask in 0u32..(1 << n) {
            let left: Vec<usize> = (0..n).filter(|&l| mask >> l & 1 == 1).map(|l| ms[l]).collect();
            let right: Vec<usize> = (0..n).filter(|&l| mask >> l & 1 == 0).map(|l| ms[l]).collect();
            if !is_stable_type(i, left.len() + 1) || !is_stable_type(g - i, right.len() + 1) {
                continue;
            }
            let mut sum = 0u64;
            for w in 0..d.len() {
                let mut a = left.clone();
                a.push(w);
                let mut b = right.clone();
                b.push(d.dual(w));
                sum += t.rank(i, &a).unwrap() * t.rank(g - i, &b).unwrap();
            }
            if sum != whole {
                return false;
            }
        }
    }
    true
}
