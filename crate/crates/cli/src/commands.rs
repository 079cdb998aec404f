use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::Serialize;
use tokenwalk::analysis::{mixing_bounds, MixingBounds};
use tokenwalk::sampler::{
    sample_densest, BurnInSource, DensestOptions, HostDescription, RankedSubset, RegimeBlock,
};
use tokenwalk::token_graph::{laziness_and_regime, LazinessReport};
use tokenwalk::{Dynamics, Error, Graph, Hypothesis, TokenGraph, VertexSubset};

use crate::args::{BoundsArgs, ExactArgs, SampleArgs, TokenGraphArgs};
use crate::report::{load_graph, Report};

pub const SAMPLE_SCHEMA: &str = "tokenwalk.sample/v1";
pub const EXACT_SCHEMA: &str = "tokenwalk.exact/v1";
pub const BOUNDS_SCHEMA: &str = "tokenwalk.bounds/v1";
pub const TOKENGRAPH_SCHEMA: &str = "tokenwalk.tokengraph/v1";

pub(crate) fn write_report(path: Option<&Path>, json: &str) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, json)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SampleResult {
    k: usize,
    samples: u64,
    seed: u64,
    dynamics: Dynamics,
    burn_in: u64,
    burn_in_source: BurnInSource,
    host: HostDescription,
    distinct_subsets: usize,
    top_tier: Vec<RankedSubset>,
    ranked: Vec<RankedSubset>,
    analysis: RegimeBlock,
}

pub fn sample(args: &SampleArgs) -> Result<String, Error> {
    let (g, digest) = load_graph(&args.input)?;
    let opts = DensestOptions {
        k: args.k,
        burn_in: args.burn_in,
        samples: args.samples,
        seed: args.seed,
        dynamics: args.dynamics,
        epsilon: args.epsilon,
        lazy_constant: args.lazy_constant,
        enumeration_cap: args.caps.enumeration_cap,
    };
    let report = sample_densest(&g, &opts)?;
    let result = SampleResult {
        k: args.k,
        samples: args.samples,
        seed: args.seed,
        dynamics: args.dynamics,
        burn_in: report.burn_in,
        burn_in_source: report.burn_in_source,
        host: HostDescription::of(&g),
        distinct_subsets: report.ranked.len(),
        top_tier: report.top_tier().to_vec(),
        ranked: report.ranked.iter().take(args.top).cloned().collect(),
        analysis: report.analysis,
    };
    let json = Report::new(SAMPLE_SCHEMA, Some(digest), args, result).to_json();
    write_report(args.output.as_deref(), &json)?;
    Ok(json)
}

#[derive(Debug, Serialize)]
struct StateRow {
    index: usize,
    members: VertexSubset,
    induced_edges: usize,
    token_degree: usize,
}

#[derive(Debug, Serialize)]
struct Probability {
    index: usize,
    exact: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct TransitionRow {
    row: usize,
    entries: Vec<Probability>,
}

#[derive(Debug, Serialize)]
struct ExactResult {
    k: usize,
    dynamics: Dynamics,
    state_count: usize,
    edge_count: usize,
    states: Vec<StateRow>,
    stationary: Vec<Probability>,
    transitions: Vec<TransitionRow>,
}

fn probability(index: usize, r: Ratio<u64>) -> Probability {
    Probability {
        index,
        exact: r.to_string(),
        value: *r.numer() as f64 / *r.denom() as f64,
    }
}

pub(crate) fn dense_cap_check(states: usize, cap: u128) -> Result<(), Error> {
    if states as u128 > cap {
        return Err(Error::SizeCap {
            what: "token graph",
            size: states.to_string(),
            cap,
            hint: "exact matrix work is limited to small state spaces; raise --dense-cap",
        });
    }
    Ok(())
}

/// Stationary law of the classical chain: proportional to the number of
/// arrows, `sum of host degrees over the subset`.
fn classical_stationary(g: &Graph, tg: &TokenGraph) -> Vec<Ratio<u64>> {
    let weights: Vec<u64> = (0..tg.state_count())
        .map(|s| tg.members(s).iter().map(|&u| g.degree(u) as u64).sum())
        .collect();
    let total: u64 = weights.iter().sum();
    weights.into_iter().map(|w| Ratio::new(w, total)).collect()
}

pub fn exact(args: &ExactArgs) -> Result<String, Error> {
    let (g, digest) = load_graph(&args.input)?;
    let tg = TokenGraph::build_with_cap(&g, args.k, args.caps.token_cap)?;
    dense_cap_check(tg.state_count(), args.caps.dense_cap)?;
    let induced = tg.induced_edge_counts();
    let states = (0..tg.state_count())
        .map(|s| StateRow {
            index: s,
            members: tg.subset(s),
            induced_edges: induced[s],
            token_degree: tg.degree(s),
        })
        .collect();
    let (tm, pi) = match args.dynamics {
        Dynamics::Loop => {
            let pi = tg.stationary_distribution();
            (tg.transition_matrix(), (0..pi.len()).map(|s| pi.exact(s)).collect())
        }
        Dynamics::Classical => (tg.classical_transition_matrix(), classical_stationary(&g, &tg)),
    };
    let stationary = pi.iter().enumerate().map(|(s, &p)| probability(s, p)).collect();
    let transitions = (0..tm.dim())
        .map(|row| {
            let mut entries: Vec<Probability> = tm
                .exact_row(row)
                .filter(|(_, p)| *p.numer() != 0)
                .map(|(c, p)| probability(c, p))
                .collect();
            entries.sort_by_key(|p| p.index);
            TransitionRow { row, entries }
        })
        .collect();
    let result = ExactResult {
        k: args.k,
        dynamics: args.dynamics,
        state_count: tg.state_count(),
        edge_count: tg.edge_count(),
        states,
        stationary,
        transitions,
    };
    let json = Report::new(EXACT_SCHEMA, Some(digest), args, result).to_json();
    write_report(args.output.as_deref(), &json)?;
    Ok(json)
}

#[derive(Debug, Serialize)]
struct BoundsResult {
    bounds: MixingBounds,
    laziness: Option<LazinessReport>,
}

pub fn bounds(args: &BoundsArgs) -> Result<String, Error> {
    let (digest, n, d, laziness) = match &args.input {
        Some(path) => {
            let (g, digest) = load_graph(path)?;
            let d = g.regular_degree().ok_or(Error::Hypothesis(Hypothesis::Regular))?;
            let lazy = laziness_and_regime(&g, args.k, args.caps.enumeration_cap)?;
            (Some(digest), g.vertex_count(), d, Some(lazy))
        }
        None => (
            None,
            args.n.expect("clap requires --n without --input"),
            args.d.expect("clap requires --d without --input"),
            None,
        ),
    };
    let mut bounds = mixing_bounds(n, d, args.k, args.epsilon, args.lazy_constant)?;
    bounds.gamma = laziness.as_ref().and_then(|l| l.gamma);
    let result = BoundsResult { bounds, laziness };
    let json = Report::new(BOUNDS_SCHEMA, digest, args, result).to_json();
    write_report(args.output.as_deref(), &json)?;
    Ok(json)
}

#[derive(Debug, Serialize)]
struct TokenGraphResult {
    k: usize,
    state_count: usize,
    edge_count: usize,
    edge_list: PathBuf,
    subsets: PathBuf,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".subsets");
    PathBuf::from(name)
}

pub fn tokengraph(args: &TokenGraphArgs) -> Result<String, Error> {
    let (g, digest) = load_graph(&args.input)?;
    let tg = TokenGraph::build_with_cap(&g, args.k, args.caps.token_cap)?;
    let subsets = sidecar_path(&args.output);
    std::fs::write(&args.output, tg.to_edge_list())?;
    std::fs::write(&subsets, tg.subset_table())?;
    let result = TokenGraphResult {
        k: args.k,
        state_count: tg.state_count(),
        edge_count: tg.edge_count(),
        edge_list: args.output.clone(),
        subsets,
    };
    Ok(Report::new(TOKENGRAPH_SCHEMA, Some(digest), args, result).to_json())
}
