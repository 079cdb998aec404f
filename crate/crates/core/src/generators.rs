//! Host-graph generators for test ensembles.
//!
//! [`random_regular`] samples a uniform simple `d`-regular graph with the
//! pairing model. The catalog functions list small graphs up to
//! isomorphism so that properties can be checked exhaustively.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count the catalog functions accept.
pub const CATALOG_MAX_VERTICES: usize = 12;

/// Uniform random simple `d`-regular graph on `n` vertices.
///
/// Pairs `n * d` half-edges by a uniform perfect matching and rejects the
/// pairing when it contains a loop or a repeated edge; conditioned on
/// acceptance the graph is uniform among labelled `d`-regular graphs.
pub fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Graph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::validation(format!(
            "no simple {d}-regular graph on {n} vertices"
        )));
    }
    const MAX_ATTEMPTS: usize = 1_000_000;
    let mut points: Vec<u32> = (0..n as u32)
        .flat_map(|v| std::iter::repeat_n(v, d))
        .collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(rng);
        let mut edges = HashSet::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !edges.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Graph::new(n, edges);
    }
    Err(Error::validation(format!(
        "pairing model did not produce a simple {d}-regular graph on {n} vertices"
    )))
}

/// Random regular graph whose complement is connected too (and which is
/// itself connected).
pub fn random_regular_with_connected_complement<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Graph> {
    for _ in 0..10_000 {
        let g = random_regular(n, d, rng)?;
        if g.is_connected() && g.is_complement_connected() {
            return Ok(g);
        }
    }
    Err(Error::validation(format!(
        "no connected {d}-regular graph on {n} vertices with connected complement found"
    )))
}

type Masks = Vec<u16>;

fn to_masks(g: &Graph) -> Masks {
    (0..g.vertex_count() as u32)
        .map(|v| g.neighbors(v).iter().fold(0u16, |m, &w| m | 1 << w))
        .collect()
}

fn from_masks(adj: &[u16]) -> Graph {
    let n = adj.len();
    let edges = (0..n).flat_map(|u| {
        (u + 1..n)
            .filter(move |&v| adj[u] >> v & 1 == 1)
            .map(move |v| (u as u32, v as u32))
    });
    Graph::new(n, edges).expect("masks describe a simple graph")
}

/// Colour refinement to the coarsest equitable partition. Colours are
/// renumbered by sorting isomorphism-invariant signatures, so the result is
/// canonical given the input colouring.
fn refine(adj: &[u16], colors: &mut [usize]) {
    let n = adj.len();
    loop {
        let classes = colors.iter().max().map_or(0, |&m| m + 1);
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut counts = vec![0usize; classes];
                for w in 0..n {
                    if adj[v] >> w & 1 == 1 {
                        counts[colors[w]] += 1;
                    }
                }
                (colors[v], counts)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort();
        distinct.dedup();
        for v in 0..n {
            colors[v] = distinct.binary_search(&signatures[v]).expect("present");
        }
        if distinct.len() == classes {
            return;
        }
    }
}

fn relabelled_code(adj: &[u16], colors: &[usize]) -> u128 {
    let n = adj.len();
    let mut code = 0u128;
    for u in 0..n {
        for v in u + 1..n {
            if adj[u] >> v & 1 == 1 {
                let (a, b) = (colors[u].min(colors[v]), colors[u].max(colors[v]));
                // Position of pair (a, b) in the upper triangle.
                let pos = a * n - a * (a + 1) / 2 + (b - a - 1);
                code |= 1u128 << pos;
            }
        }
    }
    code
}

fn search(adj: &[u16], mut colors: Vec<usize>, best: &mut Option<u128>) {
    refine(adj, &mut colors);
    let n = adj.len();
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let Some(cell) = (0..n).find(|&c| sizes[c] > 1) else {
        let code = relabelled_code(adj, &colors);
        if best.is_none_or(|b| code > b) {
            *best = Some(code);
        }
        return;
    };
    for v in 0..n {
        if colors[v] == cell {
            // Individualize v ahead of the rest of its cell.
            let mut next: Vec<usize> = colors.iter().map(|&c| 2 * c + 1).collect();
            next[v] = 2 * cell;
            search(adj, next, best);
        }
    }
}

/// Isomorphism certificate: equal for two graphs iff they are isomorphic.
///
/// Individualization-refinement without automorphism pruning, which is
/// fine for the small graphs it is used on.
pub fn canonical_code(g: &Graph) -> u128 {
    canonical_code_masks(&to_masks(g))
}

fn canonical_code_masks(adj: &[u16]) -> u128 {
    assert!(adj.len() <= 16, "canonical codes are limited to 16 vertices");
    let mut best = None;
    search(adj, vec![0; adj.len()], &mut best);
    best.unwrap_or(0)
}

/// Canonical relabelling of the masks, used as the dedup key during
/// generation.
fn canonical_masks(adj: &[u16]) -> (u128, Masks) {
    let code = canonical_code_masks(adj);
    let n = adj.len();
    let mut out = vec![0u16; n];
    let mut pos = 0;
    for a in 0..n {
        for b in a + 1..n {
            if code >> pos & 1 == 1 {
                out[a] |= 1 << b;
                out[b] |= 1 << a;
            }
            pos += 1;
        }
    }
    (code, out)
}

/// All `d`-regular graphs on `n` vertices up to isomorphism, connected or
/// not.
///
/// Grows partial graphs of maximum degree `d` by completing one unfinished
/// vertex at a time and keeps one representative per isomorphism class at
/// every stage. Any regular extension of a partial graph can be reached by
/// completing any chosen vertex next, so no class is lost.
pub fn regular_graphs(n: usize, d: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > CATALOG_MAX_VERTICES {
        return Err(Error::validation(format!(
            "catalog supports 1..={CATALOG_MAX_VERTICES} vertices"
        )));
    }
    if d >= n || !(n * d).is_multiple_of(2) {
        return Ok(Vec::new());
    }
    if 2 * d > n - 1 {
        // Complements of (n - 1 - d)-regular graphs, which is cheaper.
        return Ok(regular_graphs(n, n - 1 - d)?
            .iter()
            .map(Graph::complement)
            .collect());
    }
    let mut seen: HashSet<u128> = HashSet::new();
    let mut finished: Vec<Graph> = Vec::new();
    let mut frontier: Vec<Masks> = vec![vec![0u16; n]];
    while let Some(adj) = frontier.pop() {
        let degree = |v: usize| adj[v].count_ones() as usize;
        // Unfinished vertex with the fewest missing edges.
        let Some(x) = (0..n).filter(|&v| degree(v) < d).max_by_key(|&v| (degree(v), std::cmp::Reverse(v))) else {
            finished.push(from_masks(&adj));
            continue;
        };
        let need = d - degree(x);
        let candidates: Vec<usize> = (0..n)
            .filter(|&y| y != x && degree(y) < d && adj[x] >> y & 1 == 0)
            .collect();
        if candidates.len() < need {
            continue;
        }
        for_each_combination(&candidates, need, |chosen| {
            let mut next = adj.clone();
            for &y in chosen {
                next[x] |= 1 << y;
                next[y] |= 1 << x;
            }
            if !feasible(&next, d) {
                return;
            }
            let (code, canon) = canonical_masks(&next);
            if seen.insert(code) {
                frontier.push(canon);
            }
        });
    }
    finished.sort_by_key(canonical_code);
    Ok(finished)
}

/// Every unfinished vertex still has enough unfinished non-neighbours.
fn feasible(adj: &[u16], d: usize) -> bool {
    let n = adj.len();
    let open: u16 = (0..n)
        .filter(|&v| (adj[v].count_ones() as usize) < d)
        .fold(0, |m, v| m | 1 << v);
    (0..n).all(|v| {
        let deg = adj[v].count_ones() as usize;
        deg == d || (open & !adj[v] & !(1 << v)).count_ones() as usize >= d - deg
    })
}

fn for_each_combination(items: &[usize], r: usize, mut f: impl FnMut(&[usize])) {
    let mut chosen = Vec::with_capacity(r);
    fn go(items: &[usize], r: usize, start: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if chosen.len() == r {
            f(chosen);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < r - chosen.len() {
                break;
            }
            chosen.push(items[i]);
            go(items, r, i + 1, chosen, f);
            chosen.pop();
        }
    }
    go(items, r, 0, &mut chosen, &mut f);
}

/// Connected regular graphs on `n` vertices of every degree, up to
/// isomorphism.
pub fn connected_regular_graphs(n: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for d in 0..n {
        out.extend(regular_graphs(n, d)?.into_iter().filter(Graph::is_connected));
    }
    Ok(out)
}

/// All connected graphs on `n` vertices up to isomorphism, by adding one
/// edge at a time and deduplicating each level.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > 8 {
        return Err(Error::validation("connected graph catalog supports 1..=8 vertices"));
    }
    let mut level: Vec<Masks> = vec![vec![0u16; n]];
    let mut all: Vec<Masks> = level.clone();
    for _ in 0..n * (n - 1) / 2 {
        let mut seen = HashSet::new();
        let mut next_level = Vec::new();
        for adj in &level {
            for u in 0..n {
                for v in u + 1..n {
                    if adj[u] >> v & 1 == 0 {
                        let mut next = adj.clone();
                        next[u] |= 1 << v;
                        next[v] |= 1 << u;
                        let (code, canon) = canonical_masks(&next);
                        if seen.insert(code) {
                            next_level.push(canon);
                        }
                    }
                }
            }
        }
        all.extend(next_level.iter().cloned());
        level = next_level;
    }
    Ok(all
        .iter()
        .map(|a| from_masks(a))
        .filter(Graph::is_connected)
        .collect())
}
