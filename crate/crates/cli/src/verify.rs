use num_rational::Ratio;
use serde::Serialize;
use tokenwalk::sampler::build_boundary;
use tokenwalk::subsets::binomial;
use tokenwalk::token_graph::{laziness_and_regime, structural_constants, vertex_connectivity};
use tokenwalk::{Dynamics, Error, Graph, TokenGraph};

use crate::args::VerifyArgs;
use crate::commands::{dense_cap_check, write_report};
use crate::report::Report;

pub const VERIFY_SCHEMA: &str = "tokenwalk.verify/v1";

/// Token graphs above this many states skip the max-flow connectivity check.
const CONNECTIVITY_LIMIT: usize = 2_000;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub k: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Skipped {
    pub name: &'static str,
    pub k: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Default, Serialize)]
pub struct VerifyResult {
    pub ks: Vec<usize>,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
}

impl VerifyResult {
    fn check(&mut self, name: &'static str, k: Option<usize>, passed: bool, detail: impl Into<String>) {
        if passed {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.checks.push(Check {
            name,
            k,
            passed,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &'static str, k: Option<usize>, reason: impl Into<String>) {
        self.skipped.push(Skipped {
            name,
            k,
            reason: reason.into(),
        });
    }
}

/// Runs every check; the report plus whether all of them held.
pub fn verify(args: &VerifyArgs) -> Result<(String, bool), Error> {
    let (g, digest) = crate::report::load_graph(&args.input)?;
    let n = g.vertex_count();
    let ks: Vec<usize> = match args.k {
        Some(k) => {
            if k == 0 || k >= n {
                return Err(Error::Validation(format!("k = {k} outside 1..={}", n - 1)));
            }
            let states = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
            dense_cap_check(states.min(usize::MAX as u128) as usize, args.caps.dense_cap)?;
            vec![k]
        }
        None => (1..n)
            .filter(|&k| binomial(n as u64, k as u64).is_some_and(|c| c <= args.caps.dense_cap))
            .collect(),
    };
    let mut out = VerifyResult {
        ks: ks.clone(),
        ..Default::default()
    };
    graph_checks(&g, &mut out);
    if g.is_connected() {
        for &k in &ks {
            token_checks(&g, k, args.caps.enumeration_cap, &mut out)?;
        }
    } else {
        out.skip("token_graph", None, "graph disconnected");
    }
    let ok = out.failed == 0;
    let json = Report::new(VERIFY_SCHEMA, Some(digest), args, out).to_json();
    write_report(args.output.as_deref(), &json)?;
    Ok((json, ok))
}

fn graph_checks(g: &Graph, out: &mut VerifyResult) {
    let n = g.vertex_count();
    let sum: usize = (0..n as u32).map(|v| g.degree(v)).sum();
    out.check(
        "degree_sum",
        None,
        sum == 2 * g.edge_count(),
        format!("sum of degrees {sum}, edges {}", g.edge_count()),
    );
    let c = g.complement();
    out.check(
        "complement_involution",
        None,
        c.complement() == *g && c.edge_count() + g.edge_count() == n * (n - 1) / 2,
        format!("complement has {} edges", c.edge_count()),
    );
    match g.regular_degree() {
        Some(d) => out.check(
            "complement_degree",
            None,
            c.regular_degree() == Some(n - 1 - d),
            format!("host degree {d}, complement degree {:?}", c.regular_degree()),
        ),
        None => out.skip("complement_degree", None, "graph is not regular"),
    }
}

fn token_checks(g: &Graph, k: usize, enumeration_cap: u128, out: &mut VerifyResult) -> Result<(), Error> {
    let tg = TokenGraph::build(g, k)?;
    let kk = Some(k);
    let states = tg.state_count();
    let induced = tg.induced_edge_counts();
    let complement = g.complement();
    let d = g.regular_degree();
    let n = g.vertex_count();

    let split_ok = (0..states).all(|s| {
        let outside = complement
            .induced_stats(&tg.subset(s))
            .map(|st| st.edge_count)
            .unwrap_or(usize::MAX);
        induced[s] + outside == k * (k - 1) / 2
    });
    out.check("induced_edges_split", kk, split_ok, "induced edges in graph plus complement equal k(k-1)/2");

    let degree_ok = (0..states).all(|s| {
        let deg_sum: usize = tg.members(s).iter().map(|&u| g.degree(u)).sum();
        tg.degree(s) == deg_sum - 2 * induced[s]
    });
    out.check("degree_identity", kk, degree_ok, "token degree equals boundary edge count");

    let arrows_ok = (0..states).all(|s| {
        let subset = tg.subset(s);
        let deg_sum: usize = subset.members().iter().map(|&u| g.degree(u)).sum();
        build_boundary(g, &subset, Dynamics::Loop).len() == tg.degree(s) + k
            && build_boundary(g, &subset, Dynamics::Classical).len() == deg_sum
    });
    out.check("arrow_count_law", kk, arrows_ok, "loop arrows deg+k, classical arrows sum of degrees");

    match d {
        Some(d) => {
            let sc = structural_constants(g, k, enumeration_cap)?;
            out.check(
                "edge_count_formula",
                kk,
                sc.edge_count_formula == Some(tg.edge_count() as u128),
                format!("formula {:?}, enumerated {}", sc.edge_count_formula, tg.edge_count()),
            );
            let total: usize = tg.degrees().sum();
            let ratio = Ratio::new(total, states * k * (n - k));
            out.check(
                "average_degree_ratio",
                kk,
                ratio == Ratio::new(d, n - 1),
                format!("mean degree over k(n-k) is {ratio}, expected {}", Ratio::new(d, n - 1)),
            );
        }
        None => {
            out.skip("edge_count_formula", kk, "graph is not regular");
            out.skip("average_degree_ratio", kk, "graph is not regular");
        }
    }

    let tm = tg.transition_matrix();
    let pi = tg.stationary_distribution();
    let zero = Ratio::<u64>::from_integer(0);
    let total: Ratio<u64> = (0..states).map(|s| pi.exact(s)).fold(zero, |a, b| a + b);
    let mut image = vec![zero; states];
    for (i, slot) in (0..states).map(|i| (i, pi.exact(i))) {
        for (j, p) in tm.exact_row(i) {
            image[j] += slot * p;
        }
    }
    let invariant = total == Ratio::from_integer(1) && (0..states).all(|s| image[s] == pi.exact(s));
    out.check("stationary_invariance", kk, invariant, "closed-form law is exactly invariant and normalized");

    let balanced = (0..states).all(|i| {
        tm.neighbors(i)
            .iter()
            .all(|&j| pi.exact(i) * tm.exact(i, j) == pi.exact(j) * tm.exact(j, i))
    });
    out.check("detailed_balance", kk, balanced, "pi(x) p(x,y) = pi(y) p(y,x) on every token edge");

    if d.is_some() {
        let cm = tg.classical_transition_matrix();
        let mut cols = vec![zero; states];
        let mut rows_ok = true;
        for i in 0..states {
            let mut row = zero;
            for (j, p) in cm.exact_row(i) {
                row += p;
                cols[j] += p;
            }
            rows_ok &= row == Ratio::from_integer(1);
        }
        let ok = rows_ok && cols.iter().all(|c| *c == Ratio::from_integer(1));
        out.check("classical_doubly_stochastic", kk, ok, "row and column sums of the classical chain");

        let lazy = laziness_and_regime(g, k, enumeration_cap)?;
        match lazy.is_lazy {
            Some(flag) => out.check(
                "laziness_criterion",
                kk,
                flag == tm.is_lazy(),
                format!("criterion says lazy = {flag}, matrix diagonal says {}", tm.is_lazy()),
            ),
            None => out.skip("laziness_criterion", kk, "too many subsets to minimize"),
        }
    } else {
        out.skip("classical_doubly_stochastic", kk, "graph is not regular");
        out.skip("laziness_criterion", kk, "graph is not regular");
    }

    if states <= CONNECTIVITY_LIMIT {
        let min_deg = tg.degrees().min().unwrap_or(0);
        let kappa = vertex_connectivity(&tg.adjacency_lists());
        out.check(
            "token_connectivity_equals_min_degree",
            kk,
            kappa == min_deg,
            format!("vertex connectivity {kappa}, minimum degree {min_deg}"),
        );
    } else {
        out.skip(
            "token_connectivity_equals_min_degree",
            kk,
            format!("{states} states exceed {CONNECTIVITY_LIMIT}"),
        );
    }
    Ok(())
}
