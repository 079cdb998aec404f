//! Particle-level simulation of the exclusion process.
//!
//! The state is a `k`-subset of occupied vertices. Each step draws one arrow
//! uniformly from the boundary structure of the current subset and slides
//! the particle at its source to its target when the target is empty.
//!
//! Under [`Dynamics::Loop`] the arrows are the oriented boundary edges plus
//! one loop per particle; under [`Dynamics::Classical`] they are every
//! oriented host edge leaving an occupied vertex, so internal edges count
//! once per direction and act as no-ops.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::analysis::{mixing_bounds, MixingBounds};
use crate::error::{Error, Hypothesis, Result};
use crate::graph::{Graph, VertexSubset};
use crate::subsets::{binomial, uniform_below, uniform_below_u128, SubsetIndexer};
use crate::token_graph::{check_k, laziness_and_regime, LazinessReport, Regime, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    Loop,
    Classical,
}

impl fmt::Display for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dynamics::Loop => "loop",
            Dynamics::Classical => "classical",
        })
    }
}

impl FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loop" => Ok(Dynamics::Loop),
            "classical" => Ok(Dynamics::Classical),
            other => Err(Error::validation(format!("unknown dynamics '{other}'"))),
        }
    }
}

/// Directed move `source -> target`; a loop when both coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub source: u32,
    pub target: u32,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// The arrow multiset a step draws from, sorted by source then target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryStructure {
    pub dynamics: Dynamics,
    pub arrows: Vec<Arrow>,
}

impl BoundaryStructure {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Arrows of `subset`, sorted by `(source, target)`.
///
/// Panics if a member is not a vertex of `g`.
pub fn build_boundary(g: &Graph, subset: &VertexSubset, dynamics: Dynamics) -> BoundaryStructure {
    g.check_subset(subset).expect("subset must live in the host graph");
    let mut arrows = Vec::new();
    for &u in subset.members() {
        let mut targets: Vec<u32> = match dynamics {
            Dynamics::Loop => g
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&w| !subset.contains(w))
                .chain(std::iter::once(u))
                .collect(),
            Dynamics::Classical => g.neighbors(u).to_vec(),
        };
        targets.sort_unstable();
        arrows.extend(targets.into_iter().map(|target| Arrow { source: u, target }));
    }
    BoundaryStructure { dynamics, arrows }
}

/// Position of a chain: current subset, step counter and generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    pub current: VertexSubset,
    pub step: u64,
    pub rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(current: VertexSubset, seed: u64) -> Self {
        ChainState {
            current,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// Applies a drawn arrow: moves the particle when the target is empty.
fn apply(subset: &VertexSubset, arrow: Arrow) -> VertexSubset {
    if arrow.is_loop() || subset.contains(arrow.target) {
        subset.clone()
    } else {
        subset.swapped(arrow.source, arrow.target)
    }
}

/// One transition by rebuilding the boundary from scratch.
///
/// Reference implementation; [`Chain`] produces the same trajectory from the
/// same generator state with `O(d log n)` work per step.
pub fn step(g: &Graph, state: &ChainState, dynamics: Dynamics) -> ChainState {
    let boundary = build_boundary(g, &state.current, dynamics);
    let mut rng = state.rng.clone();
    let arrow = boundary.arrows[uniform_below(&mut rng, boundary.len() as u64) as usize];
    ChainState {
        current: apply(&state.current, arrow),
        step: state.step + 1,
        rng,
    }
}

/// Fenwick tree over per-vertex arrow counts.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<u64>,
    values: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
            values: vec![0; n],
        }
    }

    fn set(&mut self, i: usize, value: u64) {
        let old = self.values[i];
        if old == value {
            return;
        }
        self.values[i] = value;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j].wrapping_add(value.wrapping_sub(old));
            j += j & j.wrapping_neg();
        }
    }

    fn add(&mut self, i: usize, delta: i64) {
        self.set(i, (self.values[i] as i64 + delta) as u64);
    }

    fn total(&self) -> u64 {
        let mut j = self.tree.len() - 1;
        let mut sum = 0;
        while j > 0 {
            sum += self.tree[j];
            j &= j - 1;
        }
        sum
    }

    /// Index `i` with `prefix(i) <= r < prefix(i + 1)`, and `r - prefix(i)`.
    fn locate(&self, mut r: u64) -> (usize, u64) {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        (pos, r)
    }
}

/// Incremental simulator over a shared host graph.
///
/// Arrow counts per occupied vertex sit in a Fenwick tree; a draw picks the
/// `r`-th arrow of the sorted boundary structure, so trajectories match
/// [`step`] exactly. A move `v -> w` only touches `v`, `w` and their
/// neighbours.
#[derive(Debug, Clone)]
pub struct Chain<'g> {
    graph: &'g Graph,
    dynamics: Dynamics,
    members: Vec<u32>,
    occupied: Vec<bool>,
    // Empty neighbours per vertex.
    free_neighbors: Vec<u32>,
    arrows: Fenwick,
    step: u64,
    rng: ChaCha8Rng,
}

impl<'g> Chain<'g> {
    pub fn new(graph: &'g Graph, dynamics: Dynamics, state: ChainState) -> Self {
        graph
            .check_subset(&state.current)
            .expect("subset must live in the host graph");
        let n = graph.vertex_count();
        let mut occupied = vec![false; n];
        for &u in state.current.members() {
            occupied[u as usize] = true;
        }
        let free_neighbors: Vec<u32> = (0..n as u32)
            .map(|v| graph.neighbors(v).iter().filter(|&&w| !occupied[w as usize]).count() as u32)
            .collect();
        let mut chain = Chain {
            graph,
            dynamics,
            members: state.current.members().to_vec(),
            occupied,
            free_neighbors,
            arrows: Fenwick::new(n),
            step: state.step,
            rng: state.rng,
        };
        for &u in &chain.members.clone() {
            chain.refresh(u);
        }
        chain
    }

    fn arrow_count(&self, u: u32) -> u64 {
        if !self.occupied[u as usize] {
            return 0;
        }
        match self.dynamics {
            Dynamics::Loop => self.free_neighbors[u as usize] as u64 + 1,
            Dynamics::Classical => self.graph.degree(u) as u64,
        }
    }

    fn refresh(&mut self, u: u32) {
        let count = self.arrow_count(u);
        self.arrows.set(u as usize, count);
    }

    /// Number of arrows available from the current subset.
    pub fn boundary_size(&self) -> u64 {
        self.arrows.total()
    }

    fn target(&self, source: u32, mut offset: u64) -> u32 {
        let nbrs = self.graph.neighbors(source);
        match self.dynamics {
            Dynamics::Classical => nbrs[offset as usize],
            Dynamics::Loop => {
                // Sorted merge of the free neighbours with the loop.
                let mut loop_pending = true;
                for &w in nbrs {
                    if loop_pending && source < w {
                        if offset == 0 {
                            return source;
                        }
                        offset -= 1;
                        loop_pending = false;
                    }
                    if !self.occupied[w as usize] {
                        if offset == 0 {
                            return w;
                        }
                        offset -= 1;
                    }
                }
                debug_assert!(loop_pending && offset == 0);
                source
            }
        }
    }

    /// Performs one transition and returns the drawn arrow.
    pub fn advance(&mut self) -> Arrow {
        let total = self.arrows.total();
        let r = uniform_below(&mut self.rng, total);
        let (source, offset) = self.arrows.locate(r);
        let source = source as u32;
        let target = self.target(source, offset);
        let arrow = Arrow { source, target };
        if !arrow.is_loop() && !self.occupied[target as usize] {
            self.relocate(source, target);
        }
        self.step += 1;
        arrow
    }

    fn relocate(&mut self, from: u32, to: u32) {
        self.occupied[from as usize] = false;
        self.occupied[to as usize] = true;
        let g = self.graph;
        for &y in g.neighbors(from) {
            self.free_neighbors[y as usize] += 1;
            if self.occupied[y as usize] && self.dynamics == Dynamics::Loop {
                self.arrows.add(y as usize, 1);
            }
        }
        for &y in g.neighbors(to) {
            self.free_neighbors[y as usize] -= 1;
            if self.occupied[y as usize] && self.dynamics == Dynamics::Loop {
                self.arrows.add(y as usize, -1);
            }
        }
        self.refresh(from);
        self.refresh(to);
        let pos = self.members.binary_search(&from).expect("source is occupied");
        self.members.remove(pos);
        let pos = self.members.partition_point(|&x| x < to);
        self.members.insert(pos, to);
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn current(&self) -> VertexSubset {
        VertexSubset::from_sorted(self.members.clone())
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn state(&self) -> ChainState {
        ChainState {
            current: self.current(),
            step: self.step,
            rng: self.rng.clone(),
        }
    }
}

/// Uniform `k`-subset: unranks a uniform rank when `C(n, k)` fits in 128
/// bits, otherwise falls back to uniform index sampling.
pub fn uniform_subset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> VertexSubset {
    match binomial(n as u64, k as u64) {
        Some(count) => {
            let indexer = SubsetIndexer::new(n, k);
            VertexSubset::from_sorted(indexer.unrank(uniform_below_u128(rng, count)))
        }
        None => {
            let mut members: Vec<u32> = index::sample(rng, n, k).into_iter().map(|i| i as u32).collect();
            members.sort_unstable();
            VertexSubset::from_sorted(members)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HostDescription {
    pub vertices: usize,
    pub edges: usize,
    pub degree: Option<usize>,
}

impl HostDescription {
    pub fn of(g: &Graph) -> Self {
        HostDescription {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            degree: g.regular_degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleMetadata {
    /// Seeds of every chain merged into these statistics, ascending.
    pub seeds: Vec<u64>,
    pub k: usize,
    pub burn_in: u64,
    pub dynamics: Dynamics,
    pub host: HostDescription,
}

/// Visit counts of the sampled subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleStatistics {
    #[serde(serialize_with = "serialize_counts")]
    pub counts: BTreeMap<VertexSubset, u64>,
    pub total_samples: u64,
    pub metadata: SampleMetadata,
}

fn serialize_counts<S: Serializer>(
    counts: &BTreeMap<VertexSubset, u64>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(counts.iter())
}

impl SampleStatistics {
    pub fn empty(metadata: SampleMetadata) -> Self {
        SampleStatistics {
            counts: BTreeMap::new(),
            total_samples: 0,
            metadata,
        }
    }

    pub fn record(&mut self, subset: VertexSubset) {
        *self.counts.entry(subset).or_insert(0) += 1;
        self.total_samples += 1;
    }

    /// Pools another run over the same host, `k` and dynamics.
    pub fn merge(&mut self, other: &SampleStatistics) {
        for (s, &c) in &other.counts {
            *self.counts.entry(s.clone()).or_insert(0) += c;
        }
        self.total_samples += other.total_samples;
        self.metadata.seeds.extend_from_slice(&other.metadata.seeds);
        self.metadata.seeds.sort_unstable();
        self.metadata.burn_in = self.metadata.burn_in.min(other.metadata.burn_in);
    }

    /// Subsets by decreasing count, ties in lexicographic order.
    pub fn ranked(&self) -> Vec<(&VertexSubset, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(s, &c)| (s, c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Subsets sharing the largest count.
    pub fn top_tier(&self) -> Vec<&VertexSubset> {
        let max = self.counts.values().copied().max().unwrap_or(0);
        self.counts
            .iter()
            .filter(|&(_, &c)| c == max && c > 0)
            .map(|(s, _)| s)
            .collect()
    }

    /// Empirical law indexed by lexicographic rank over all `C(n, k)` subsets.
    pub fn to_distribution(&self) -> Vec<f64> {
        let indexer = SubsetIndexer::new(self.metadata.host.vertices, self.metadata.k);
        let mut p = vec![0.0; indexer.count() as usize];
        if self.total_samples == 0 {
            return p;
        }
        let m = self.total_samples as f64;
        for (s, &c) in &self.counts {
            p[indexer.rank(s.members()) as usize] = c as f64 / m;
        }
        p
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub k: usize,
    pub burn_in: u64,
    pub samples: u64,
    pub seed: u64,
    pub dynamics: Dynamics,
    pub initial: Option<VertexSubset>,
}

/// Runs one chain: uniform (or given) start, `burn_in` discarded steps, then
/// `samples` steps each recording the state reached.
pub fn run_chain(g: &Graph, opts: &RunOptions) -> Result<SampleStatistics> {
    check_k(g, opts.k)?;
    if !g.is_connected() {
        return Err(Error::Hypothesis(Hypothesis::Connected));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = match &opts.initial {
        Some(s) => {
            g.check_subset(s)?;
            if s.k() != opts.k {
                return Err(Error::validation(format!(
                    "initial subset has {} members, expected {}",
                    s.k(),
                    opts.k
                )));
            }
            s.clone()
        }
        None => uniform_subset(g.vertex_count(), opts.k, &mut rng),
    };
    let mut chain = Chain::new(
        g,
        opts.dynamics,
        ChainState {
            current: start,
            step: 0,
            rng,
        },
    );
    for _ in 0..opts.burn_in {
        chain.advance();
    }
    let mut stats = SampleStatistics::empty(SampleMetadata {
        seeds: vec![opts.seed],
        k: opts.k,
        burn_in: opts.burn_in,
        dynamics: opts.dynamics,
        host: HostDescription::of(g),
    });
    for _ in 0..opts.samples {
        chain.advance();
        *stats.counts.entry(chain.current()).or_insert(0) += 1;
        stats.total_samples += 1;
    }
    Ok(stats)
}

/// How the burn-in length was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BurnInSource {
    Explicit,
    NonLazyThreshold,
    LazyThreshold,
}

/// Default burn-in thresholds above this are refused.
pub const MAX_DERIVED_BURN_IN: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct DensestOptions {
    pub k: usize,
    pub burn_in: Option<u64>,
    pub samples: u64,
    pub seed: u64,
    pub dynamics: Dynamics,
    pub epsilon: f64,
    pub lazy_constant: f64,
    pub enumeration_cap: u128,
}

impl DensestOptions {
    pub fn new(k: usize, samples: u64, seed: u64) -> Self {
        DensestOptions {
            k,
            burn_in: None,
            samples,
            seed,
            dynamics: Dynamics::Loop,
            epsilon: 0.1,
            lazy_constant: 1.0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSubset {
    pub members: VertexSubset,
    pub count: u64,
    pub frequency: f64,
    pub induced_edges: usize,
    pub density: f64,
}

/// Regime of the chain actually simulated (on the complement) with both
/// mixing thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeBlock {
    pub chain_host_degree: usize,
    pub laziness: LazinessReport,
    pub bounds: MixingBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensestReport {
    pub burn_in: u64,
    pub burn_in_source: BurnInSource,
    pub ranked: Vec<RankedSubset>,
    pub analysis: RegimeBlock,
    #[serde(skip)]
    pub statistics: SampleStatistics,
}

impl DensestReport {
    /// Ranked entries sharing the largest count.
    pub fn top_tier(&self) -> &[RankedSubset] {
        let max = self.ranked.first().map_or(0, |r| r.count);
        let len = self.ranked.iter().take_while(|r| r.count == max).count();
        &self.ranked[..len]
    }
}

/// Checks the hypotheses for sampling densest subgraphs of `g`, in order:
/// regularity, connectivity, connectivity of the complement.
pub fn check_hypotheses(g: &Graph) -> Result<usize> {
    let d = g
        .regular_degree()
        .ok_or(Error::Hypothesis(Hypothesis::Regular))?;
    if !g.is_connected() {
        return Err(Error::Hypothesis(Hypothesis::Connected));
    }
    if !g.is_complement_connected() {
        return Err(Error::Hypothesis(Hypothesis::ComplementConnected));
    }
    Ok(d)
}

/// Samples densest `k`-subgraphs of a regular graph by running the chain on
/// its complement, where they become the most likely states.
pub fn sample_densest(g: &Graph, opts: &DensestOptions) -> Result<DensestReport> {
    let d = check_hypotheses(g)?;
    check_k(g, opts.k)?;
    let n = g.vertex_count();
    let complement = g.complement();
    let chain_degree = n - 1 - d;

    let laziness = laziness_and_regime(&complement, opts.k, opts.enumeration_cap)?;
    let mut bounds = mixing_bounds(n, chain_degree, opts.k, opts.epsilon, opts.lazy_constant)?;
    bounds.gamma = laziness.gamma;

    let (burn_in, burn_in_source) = match opts.burn_in {
        Some(b) => (b, BurnInSource::Explicit),
        None => derive_burn_in(&laziness, &bounds)?,
    };

    let stats = run_chain(
        &complement,
        &RunOptions {
            k: opts.k,
            burn_in,
            samples: opts.samples,
            seed: opts.seed,
            dynamics: opts.dynamics,
            initial: None,
        },
    )?;

    let m = stats.total_samples.max(1) as f64;
    let ranked = stats
        .ranked()
        .into_iter()
        .map(|(s, count)| {
            let st = g.induced_stats(s).expect("sampled subsets live in the host");
            RankedSubset {
                members: s.clone(),
                count,
                frequency: count as f64 / m,
                induced_edges: st.edge_count,
                density: st.edge_count as f64 / st.k as f64,
            }
        })
        .collect();

    Ok(DensestReport {
        burn_in,
        burn_in_source,
        ranked,
        analysis: RegimeBlock {
            chain_host_degree: chain_degree,
            laziness,
            bounds,
        },
        statistics: stats,
    })
}

fn derive_burn_in(laziness: &LazinessReport, bounds: &MixingBounds) -> Result<(u64, BurnInSource)> {
    let (threshold, source) = match laziness.regime {
        Regime::NonLazy => (bounds.threshold_non_lazy, BurnInSource::NonLazyThreshold),
        Regime::Lazy if !bounds.lazy_vacuous => (bounds.threshold_lazy, BurnInSource::LazyThreshold),
        Regime::Lazy => {
            return Err(Error::BurnInUnavailable(
                "lazy regime and the lazy-branch bound is non-positive".into(),
            ))
        }
        Regime::Unresolved => {
            return Err(Error::BurnInUnavailable(
                "too many subsets to resolve the regime exactly".into(),
            ))
        }
    };
    if threshold >= MAX_DERIVED_BURN_IN {
        return Err(Error::BurnInUnavailable(format!(
            "mixing threshold {threshold:.3e} exceeds {MAX_DERIVED_BURN_IN:e}"
        )));
    }
    Ok((threshold.ceil() as u64, source))
}
