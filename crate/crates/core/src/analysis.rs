//! Mixing-time bounds, exhaustive oracles and distribution distances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::subsets::{binomial, LexSubsets};
use crate::token_graph::{check_cap, check_k, TransitionMatrix, DEFAULT_DENSE_CAP};

pub const NON_LAZY_FORMULA: &str = "1 + rho * (ln(4 / epsilon) + xi)";
pub const LAZY_FORMULA: &str = "C * log2(1 / epsilon) * (xi - (n - 1)^2 / d^4)";

/// Closed-form mixing thresholds of the loop-augmented chain on a
/// `d`-regular host with `n` vertices and `k` particles.
///
/// `rho = 4 (n-1)^2 (n-k)^2 / d^4` and
/// `xi = ln C(n,k) + ln(k (n-k) / (n-1) + k / d)`. The non-lazy threshold
/// bounds the pointwise relative error; the lazy one bounds the total
/// variation mixing time up to the unknown constant `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingBounds {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub rho: f64,
    pub xi: f64,
    pub epsilon: f64,
    pub threshold_non_lazy: f64,
    pub threshold_non_lazy_formula: &'static str,
    pub lazy_constant: f64,
    pub threshold_lazy: f64,
    pub threshold_lazy_formula: &'static str,
    /// Lazy bound is not positive, hence says nothing.
    pub lazy_vacuous: bool,
    pub gamma: Option<f64>,
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    match binomial(n as u64, k as u64) {
        Some(c) => (c as f64).ln(),
        None => {
            let k = k.min(n - k);
            (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
        }
    }
}

pub fn mixing_bounds(n: usize, d: usize, k: usize, epsilon: f64, lazy_constant: f64) -> Result<MixingBounds> {
    if n < 2 || k == 0 || k >= n || d == 0 || d >= n {
        return Err(Error::validation(format!(
            "need n >= 2, 1 <= k <= n-1 and 1 <= d <= n-1; got n={n}, d={d}, k={k}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::validation(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(lazy_constant > 0.0 && lazy_constant.is_finite()) {
        return Err(Error::validation(format!(
            "lazy constant {lazy_constant} must be positive"
        )));
    }
    let (nf, df, kf) = (n as f64, d as f64, k as f64);
    let d4 = df.powi(4);
    let rho = 4.0 * (nf - 1.0).powi(2) * (nf - kf).powi(2) / d4;
    let xi = ln_binomial(n, k) + (kf * (nf - kf) / (nf - 1.0) + kf / df).ln();
    let threshold_non_lazy = 1.0 + rho * ((4.0 / epsilon).ln() + xi);
    let threshold_lazy = lazy_constant * (1.0 / epsilon).log2() * (xi - (nf - 1.0).powi(2) / d4);
    Ok(MixingBounds {
        n,
        d,
        k,
        rho,
        xi,
        epsilon,
        threshold_non_lazy,
        threshold_non_lazy_formula: NON_LAZY_FORMULA,
        lazy_constant,
        threshold_lazy,
        threshold_lazy_formula: LAZY_FORMULA,
        lazy_vacuous: threshold_lazy <= 0.0,
        gamma: None,
    })
}

/// Every `k`-subset with the most induced edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimum: usize,
    pub optimal_subsets: Vec<VertexSubset>,
    pub evaluated: u128,
}

/// Exhaustive densest `k`-subgraph search; argmaxima in lexicographic order.
pub fn brute_force_densest(g: &Graph, k: usize, cap: u128) -> Result<OracleResult> {
    check_k(g, k)?;
    let n = g.vertex_count();
    let count = check_cap(
        "subset enumeration",
        binomial(n as u64, k as u64),
        cap,
        "use the sampler for graphs this large",
    )?;
    let mut optimum = 0;
    let mut optimal = Vec::new();
    LexSubsets::new(n, k).for_each_ref(|s| {
        let e = g.induced_edge_count(s);
        if e > optimum {
            optimum = e;
            optimal.clear();
        }
        if e == optimum {
            optimal.push(VertexSubset::from_sorted(s.to_vec()));
        }
    });
    Ok(OracleResult {
        optimum,
        optimal_subsets: optimal,
        evaluated: count,
    })
}

/// Row `initial` of the `t`-step matrix, by `t` sparse propagations of the
/// point mass.
pub fn exact_chain_distribution(tm: &TransitionMatrix, t: u64, initial: usize, cap: u128) -> Result<Vec<f64>> {
    check_cap(
        "transition matrix",
        Some(tm.dim() as u128),
        cap,
        "exact propagation is limited to small state spaces",
    )?;
    if initial >= tm.dim() {
        return Err(Error::validation(format!(
            "initial state {initial} out of range for {} states",
            tm.dim()
        )));
    }
    let mut p = vec![0.0; tm.dim()];
    p[initial] = 1.0;
    for _ in 0..t {
        p = tm.propagate(&p);
    }
    Ok(p)
}

/// [`exact_chain_distribution`] with the default dense cap.
pub fn exact_chain_distribution_default(tm: &TransitionMatrix, t: u64, initial: usize) -> Result<Vec<f64>> {
    exact_chain_distribution(tm, t, initial, DEFAULT_DENSE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distance {
    /// `1/2 sum |p - q|`.
    pub tv: f64,
    /// `max |p - q| / q`.
    pub max_relative: f64,
}

pub fn distribution_distance(p: &[f64], q: &[f64]) -> Result<Distance> {
    if p.len() != q.len() {
        return Err(Error::validation(format!(
            "distributions have {} and {} states",
            p.len(),
            q.len()
        )));
    }
    let mut tv = 0.0;
    let mut max_relative: f64 = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if b == 0.0 {
            return Err(Error::ZeroReference(i));
        }
        let diff = (a - b).abs();
        tv += diff;
        max_relative = max_relative.max(diff / b);
    }
    Ok(Distance {
        tv: tv / 2.0,
        max_relative,
    })
}
