//! Explicit `k`-token graphs and the exact law of the particle chain on them.
//!
//! Two `k`-subsets are adjacent in the token graph when they differ by moving
//! one element along an edge of the host. The loop-augmented chain moves to
//! each token neighbour with probability `1 / (deg + k)` and stays put with
//! probability `k / (deg + k)`; its stationary law is proportional to
//! `deg + k`.

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};
use crate::graph::{Graph, VertexSubset};
use crate::subsets::{binomial, LexSubsets, SubsetIndexer};

/// Default ceiling on `C(n, k)` for building a token graph.
pub const DEFAULT_TOKEN_CAP: u128 = 1_000_000;
/// Default ceiling on the state count for dense matrix work.
pub const DEFAULT_DENSE_CAP: u128 = 10_000;
/// Default ceiling on the number of subsets an exhaustive scan may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

pub(crate) fn check_cap(what: &'static str, size: Option<u128>, cap: u128, hint: &'static str) -> Result<u128> {
    match size {
        Some(s) if s <= cap => Ok(s),
        other => Err(Error::SizeCap {
            what,
            size: other.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string()),
            cap,
            hint,
        }),
    }
}

pub(crate) fn check_k(g: &Graph, k: usize) -> Result<()> {
    let n = g.vertex_count();
    if k == 0 || k >= n {
        return Err(Error::validation(format!(
            "token count {k} outside 1..={} for {n} vertices",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// The `k`-token graph of a host graph, with states in lexicographic order.
#[derive(Debug, Clone)]
pub struct TokenGraph {
    base: Graph,
    k: usize,
    indexer: SubsetIndexer,
    // Members of state i at members[i * k..(i + 1) * k].
    members: Vec<u32>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl TokenGraph {
    /// Builds with the default cap of 10^6 states.
    pub fn build(g: &Graph, k: usize) -> Result<Self> {
        Self::build_with_cap(g, k, DEFAULT_TOKEN_CAP)
    }

    pub fn build_with_cap(g: &Graph, k: usize, cap: u128) -> Result<Self> {
        check_k(g, k)?;
        if !g.is_connected() {
            return Err(Error::Hypothesis(Hypothesis::Connected));
        }
        let n = g.vertex_count();
        let count = check_cap(
            "token graph",
            binomial(n as u64, k as u64),
            cap,
            "use the particle sampler instead",
        )? as usize;
        let indexer = SubsetIndexer::new(n, k);

        let mut members = Vec::with_capacity(count * k);
        LexSubsets::new(n, k).for_each_ref(|s| members.extend_from_slice(s));

        let mut offsets = Vec::with_capacity(count + 1);
        let mut targets = Vec::new();
        let mut in_set = vec![false; n];
        let mut scratch = Vec::with_capacity(k);
        offsets.push(0);
        for state in 0..count {
            let subset = &members[state * k..(state + 1) * k];
            for &u in subset {
                in_set[u as usize] = true;
            }
            let start = targets.len();
            for &u in subset {
                for &x in g.neighbors(u) {
                    if in_set[x as usize] {
                        continue;
                    }
                    scratch.clear();
                    scratch.extend(subset.iter().copied().filter(|&y| y != u));
                    let pos = scratch.partition_point(|&y| y < x);
                    scratch.insert(pos, x);
                    targets.push(indexer.rank(&scratch) as usize);
                }
            }
            targets[start..].sort_unstable();
            offsets.push(targets.len());
            for &u in subset {
                in_set[u as usize] = false;
            }
        }
        Ok(TokenGraph {
            base: g.clone(),
            k,
            indexer,
            members,
            offsets,
            targets,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn members(&self, state: usize) -> &[u32] {
        &self.members[state * self.k..(state + 1) * self.k]
    }

    pub fn subset(&self, state: usize) -> VertexSubset {
        VertexSubset::from_sorted(self.members(state).to_vec())
    }

    /// Index of a subset of the host's vertices.
    pub fn index_of(&self, subset: &VertexSubset) -> Option<usize> {
        if subset.k() != self.k || self.base.check_subset(subset).is_err() {
            return None;
        }
        Some(self.indexer.rank(subset.members()) as usize)
    }

    pub fn neighbors(&self, state: usize) -> &[usize] {
        &self.targets[self.offsets[state]..self.offsets[state + 1]]
    }

    pub fn degree(&self, state: usize) -> usize {
        self.offsets[state + 1] - self.offsets[state]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    /// Induced edge count in the host for each state.
    pub fn induced_edge_counts(&self) -> Vec<usize> {
        (0..self.state_count())
            .map(|s| self.base.induced_edge_count(self.members(s)))
            .collect()
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.state_count())
            .map(|s| self.neighbors(s).to_vec())
            .collect()
    }

    /// Token adjacency in the edge-list text format, one line per edge
    /// between state indices.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "# {}-token graph: {} states, {} edges\n",
            self.k,
            self.state_count(),
            self.edge_count()
        );
        for s in 0..self.state_count() {
            for &t in self.neighbors(s) {
                if t > s {
                    out.push_str(&format!("{s} {t}\n"));
                }
            }
        }
        out
    }

    /// Sidecar table mapping each state index to its member vertices.
    pub fn subset_table(&self) -> String {
        let mut out = String::from("# index\tmembers\n");
        for s in 0..self.state_count() {
            let members: Vec<String> = self.members(s).iter().map(|m| m.to_string()).collect();
            out.push_str(&format!("{s}\t{}\n", members.join(" ")));
        }
        out
    }

    /// The loop-augmented chain's transition matrix.
    pub fn transition_matrix(&self) -> TransitionMatrix {
        let k = self.k as u64;
        TransitionMatrix {
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            row_denominator: self.degrees().map(|d| d as u64 + k).collect(),
            diagonal_numerator: vec![k; self.state_count()],
        }
    }

    /// Transition matrix of the classical exclusion dynamics, where every
    /// oriented host edge leaving an occupied site is an arrow and internal
    /// arrows leave the state unchanged.
    pub fn classical_transition_matrix(&self) -> TransitionMatrix {
        let mut row_denominator = Vec::with_capacity(self.state_count());
        let mut diagonal_numerator = Vec::with_capacity(self.state_count());
        for s in 0..self.state_count() {
            let arrows: u64 = self
                .members(s)
                .iter()
                .map(|&u| self.base.degree(u) as u64)
                .sum();
            row_denominator.push(arrows);
            diagonal_numerator.push(arrows - self.degree(s) as u64);
        }
        TransitionMatrix {
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            row_denominator,
            diagonal_numerator,
        }
    }

    /// Closed-form stationary law: weight `deg + k` over `2|E_k| + k C(n,k)`.
    pub fn stationary_distribution(&self) -> StationaryDistribution {
        let k = self.k as u64;
        let weights: Vec<u64> = self.degrees().map(|d| d as u64 + k).collect();
        let normalizer = 2 * self.edge_count() as u64 + k * self.state_count() as u64;
        StationaryDistribution {
            weights,
            normalizer,
        }
    }
}

/// Sparse row-stochastic matrix whose row `i` puts `1 / row_denominator[i]`
/// on every token neighbour and `diagonal_numerator[i] / row_denominator[i]`
/// on the diagonal.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    row_denominator: Vec<u64>,
    diagonal_numerator: Vec<u64>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.row_denominator.len()
    }

    /// Off-diagonal support of a row.
    pub fn neighbors(&self, row: usize) -> &[usize] {
        &self.targets[self.offsets[row]..self.offsets[row + 1]]
    }

    pub fn exact(&self, row: usize, col: usize) -> Ratio<u64> {
        let den = self.row_denominator[row];
        if row == col {
            Ratio::new(self.diagonal_numerator[row], den)
        } else if self.neighbors(row).binary_search(&col).is_ok() {
            Ratio::new(1, den)
        } else {
            Ratio::from_integer(0)
        }
    }

    pub fn prob(&self, row: usize, col: usize) -> f64 {
        let r = self.exact(row, col);
        *r.numer() as f64 / *r.denom() as f64
    }

    pub fn diagonal(&self, row: usize) -> Ratio<u64> {
        Ratio::new(self.diagonal_numerator[row], self.row_denominator[row])
    }

    /// Non-zero entries of a row as `(column, probability)`, diagonal first.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let den = self.row_denominator[row] as f64;
        std::iter::once((row, self.diagonal_numerator[row] as f64 / den))
            .chain(self.neighbors(row).iter().map(move |&c| (c, 1.0 / den)))
    }

    /// Exact non-zero entries of a row, diagonal first.
    pub fn exact_row(&self, row: usize) -> impl Iterator<Item = (usize, Ratio<u64>)> + '_ {
        let den = self.row_denominator[row];
        std::iter::once((row, Ratio::new(self.diagonal_numerator[row], den)))
            .chain(self.neighbors(row).iter().map(move |&c| (c, Ratio::new(1, den))))
    }

    /// Row vector times matrix: the law one step after `p`.
    pub fn propagate(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), self.dim());
        let mut out = vec![0.0; p.len()];
        for (i, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (j, prob) in self.row(i) {
                out[j] += mass * prob;
            }
        }
        out
    }

    /// Every diagonal entry is at least 1/2.
    pub fn is_lazy(&self) -> bool {
        self.diagonal_numerator
            .iter()
            .zip(&self.row_denominator)
            .all(|(&num, &den)| 2 * num >= den)
    }
}

/// Stationary weights `weights[i] / normalizer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryDistribution {
    weights: Vec<u64>,
    normalizer: u64,
}

impl StationaryDistribution {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn exact(&self, state: usize) -> Ratio<u64> {
        Ratio::new(self.weights[state], self.normalizer)
    }

    pub fn weight(&self, state: usize) -> f64 {
        self.weights[state] as f64 / self.normalizer as f64
    }

    pub fn unnormalized(&self) -> &[u64] {
        &self.weights
    }

    pub fn normalizer(&self) -> u64 {
        self.normalizer
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|s| self.weight(s)).collect()
    }
}

/// Token degree extremes: exact when enumerable, otherwise the a-priori
/// bounds `d <= min` and `max <= k(n - k)` (regular hosts only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeExtent {
    Exact { min: u64, max: u64 },
    Bounded { min_at_least: u64, max_at_most: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralConstants {
    pub n: usize,
    pub k: usize,
    pub host_degree: Option<usize>,
    /// `C(n, k)`; `None` past `u128`.
    pub vertex_count: Option<u128>,
    /// `k (n - k) C(n,k) d / (2 (n - 1))`, regular hosts only.
    pub edge_count_formula: Option<u128>,
    /// Mean token degree.
    pub avg_degree: Option<f64>,
    /// `d / (n - 1)` as `(numerator, denominator)`, regular hosts only.
    pub avg_degree_ratio: Option<(u64, u64)>,
    pub degree_extent: Option<DegreeExtent>,
    /// Minimum token degree, the claimed vertex connectivity of the token
    /// graph. Only an upper bound in general; see [`vertex_connectivity`].
    pub connectivity_claim: Option<u64>,
}

/// Closed-form and enumerated structural constants of the `k`-token graph.
///
/// Token degrees come from `deg_k(S) = sum_{u in S} deg(u) - 2|E_S|`, so the
/// scan touches subsets but never builds the token graph.
pub fn structural_constants(g: &Graph, k: usize, enumeration_cap: u128) -> Result<StructuralConstants> {
    check_k(g, k)?;
    let n = g.vertex_count();
    let d = g.regular_degree();
    let vertex_count = binomial(n as u64, k as u64);

    let edge_count_formula = match (d, vertex_count) {
        (Some(d), Some(c)) => {
            let numer = (k as u128 * (n - k) as u128)
                .checked_mul(c)
                .and_then(|x| x.checked_mul(d as u128));
            numer.map(|x| {
                let den = 2 * (n as u128 - 1);
                debug_assert_eq!(x % den, 0);
                x / den
            })
        }
        _ => None,
    };
    let avg_degree_ratio = d.map(|d| {
        let r = Ratio::new(d as u64, n as u64 - 1);
        (*r.numer(), *r.denom())
    });

    let enumerable = vertex_count.is_some_and(|c| c <= enumeration_cap);
    let (degree_extent, avg_degree) = if enumerable {
        let mut min = u64::MAX;
        let mut max = 0;
        let mut total: u128 = 0;
        LexSubsets::new(n, k).for_each_ref(|s| {
            let deg_sum: usize = s.iter().map(|&u| g.degree(u)).sum();
            let deg = (deg_sum - 2 * g.induced_edge_count(s)) as u64;
            min = min.min(deg);
            max = max.max(deg);
            total += deg as u128;
        });
        let count = vertex_count.unwrap_or(1) as f64;
        (Some(DegreeExtent::Exact { min, max }), Some(total as f64 / count))
    } else {
        let extent = d.map(|d| DegreeExtent::Bounded {
            min_at_least: d as u64,
            max_at_most: (k * (n - k)) as u64,
        });
        let avg = match (edge_count_formula, vertex_count) {
            (Some(e), Some(c)) => Some(2.0 * e as f64 / c as f64),
            _ => None,
        };
        (extent, avg)
    };
    let connectivity_claim = match degree_extent {
        Some(DegreeExtent::Exact { min, .. }) => Some(min),
        _ => None,
    };

    Ok(StructuralConstants {
        n,
        k,
        host_degree: d,
        vertex_count,
        edge_count_formula,
        avg_degree,
        avg_degree_ratio,
        degree_extent,
        connectivity_claim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Minimum average induced degree below `d - 1`: pointwise bound applies.
    NonLazy,
    /// Minimum average induced degree at least `d - 1`: the chain is lazy.
    Lazy,
    /// Too many subsets to minimize exactly.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazinessReport {
    pub host_degree: usize,
    pub k: usize,
    /// Fewest induced edges over all `k`-subsets.
    pub min_induced_edges: Option<u64>,
    /// `2 min|E_S| / k` as `(numerator, denominator)`.
    pub min_avg_induced_degree: Option<(u64, u64)>,
    pub is_lazy: Option<bool>,
    pub regime: Regime,
    /// `(d + 1 - min avg deg)^-1`.
    pub gamma: Option<f64>,
}

/// Exact laziness test by minimizing the induced edge count over every
/// `k`-subset (a sparsest-subgraph problem, so only under the cap).
pub fn laziness_and_regime(g: &Graph, k: usize, enumeration_cap: u128) -> Result<LazinessReport> {
    check_k(g, k)?;
    let d = g
        .regular_degree()
        .ok_or(Error::Hypothesis(Hypothesis::Regular))?;
    let n = g.vertex_count();
    let count = binomial(n as u64, k as u64);
    if !count.is_some_and(|c| c <= enumeration_cap) {
        return Ok(LazinessReport {
            host_degree: d,
            k,
            min_induced_edges: None,
            min_avg_induced_degree: None,
            is_lazy: None,
            regime: Regime::Unresolved,
            gamma: None,
        });
    }
    let mut min_edges = usize::MAX;
    LexSubsets::new(n, k).for_each_ref(|s| {
        if min_edges > 0 {
            min_edges = min_edges.min(g.induced_edge_count(s));
        }
    });
    let min_edges = min_edges as u64;
    let (k64, d64) = (k as u64, d as u64);
    let min_avg = Ratio::new(2 * min_edges, k64);
    // min avg >= d - 1  <=>  2 min|E| >= k (d - 1)
    let lazy = 2 * min_edges + k64 >= k64 * d64;
    // gamma = k / (k (d + 1) - 2 min|E|)
    let gamma = k as f64 / (k64 * (d64 + 1) - 2 * min_edges) as f64;
    Ok(LazinessReport {
        host_degree: d,
        k,
        min_induced_edges: Some(min_edges),
        min_avg_induced_degree: Some((*min_avg.numer(), *min_avg.denom())),
        is_lazy: Some(lazy),
        regime: if lazy { Regime::Lazy } else { Regime::NonLazy },
        gamma: Some(gamma),
    })
}

/// Vertex connectivity of a simple graph given as adjacency lists.
///
/// Esfahanian–Hakimi: with `v` of minimum degree, the minimum cut separates
/// `v` from some non-neighbour or two neighbours of `v` from each other, so
/// only those pairs need a max-flow computation.
pub fn vertex_connectivity(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    if n <= 1 {
        return 0;
    }
    let v = (0..n).min_by_key(|&u| adj[u].len()).expect("non-empty");
    let mut best = adj[v].len();
    let mut is_adj = vec![false; n];
    for &w in &adj[v] {
        is_adj[w] = true;
    }
    for w in 0..n {
        if w != v && !is_adj[w] {
            best = best.min(local_vertex_connectivity(adj, v, w));
        }
    }
    let nbrs = &adj[v];
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !adj[x].contains(&y) {
                best = best.min(local_vertex_connectivity(adj, x, y));
            }
        }
    }
    best
}

/// Maximum number of internally vertex-disjoint `s`-`t` paths for
/// non-adjacent `s`, `t`, by unit-capacity max flow on the split graph.
pub fn local_vertex_connectivity(adj: &[Vec<usize>], s: usize, t: usize) -> usize {
    assert!(s != t && !adj[s].contains(&t), "endpoints must be distinct and non-adjacent");
    let n = adj.len();
    // Node 2x is x_in, 2x + 1 is x_out. Arcs stored in pairs (arc, reverse).
    let mut head: Vec<usize> = Vec::new();
    let mut cap: Vec<u32> = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut add = |from: usize, to: usize, c: u32, head: &mut Vec<usize>, cap: &mut Vec<u32>| {
        out[from].push(head.len());
        head.push(to);
        cap.push(c);
        out[to].push(head.len());
        head.push(from);
        cap.push(0);
    };
    let big = n as u32 + 1;
    for x in 0..n {
        let c = if x == s || x == t { big } else { 1 };
        add(2 * x, 2 * x + 1, c, &mut head, &mut cap);
        for &y in &adj[x] {
            add(2 * x + 1, 2 * y, big, &mut head, &mut cap);
        }
    }
    let (source, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    let mut parent_arc = vec![usize::MAX; 2 * n];
    loop {
        parent_arc.iter_mut().for_each(|p| *p = usize::MAX);
        let mut queue = VecDeque::from([source]);
        let mut reached = false;
        while let Some(x) = queue.pop_front() {
            for &a in &out[x] {
                let y = head[a];
                if cap[a] > 0 && y != source && parent_arc[y] == usize::MAX {
                    parent_arc[y] = a;
                    if y == sink {
                        reached = true;
                        break;
                    }
                    queue.push_back(y);
                }
            }
            if reached {
                break;
            }
        }
        if !reached {
            return flow;
        }
        // Every augmenting path crosses a unit arc, so push one unit.
        let mut y = sink;
        while y != source {
            let a = parent_arc[y];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            y = head[a ^ 1];
        }
        flow += 1;
    }
}
