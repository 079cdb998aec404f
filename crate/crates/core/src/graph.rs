//! Simple undirected graphs, complements and induced-subgraph statistics.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted; adjacency lists are
/// sorted as well so membership is a binary search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a simple graph, dropping duplicate edges.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::validation("vertex count does not fit in 32 bits"));
        }
        let mut canonical = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::validation(format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        canonical.dedup();

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &canonical {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: canonical,
            adjacency,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, std::iter::empty()).expect("empty graph is simple")
    }

    pub fn complete(n: usize) -> Self {
        let n32 = n as u32;
        Graph::new(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
            .expect("complete graph is simple")
    }

    /// Cycle `0-1-...-(n-1)-0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let n32 = n as u32;
        Graph::new(n, (0..n32).map(|u| (u, (u + 1) % n32))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        let n32 = n as u32;
        Graph::new(n, (1..n32).map(|u| (u - 1, u))).expect("path is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adjacency.first()?.len();
        self.adjacency
            .iter()
            .all(|a| a.len() == first)
            .then_some(first)
    }

    /// The graph on the same vertices whose edges are exactly the non-edges.
    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n as u32 {
            let adj = &self.adjacency[u as usize];
            let mut it = adj.iter().copied().peekable();
            for v in 0..self.n as u32 {
                while it.peek().is_some_and(|&a| a < v) {
                    it.next();
                }
                if v > u && it.peek() != Some(&v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(self.n, edges).expect("complement of a simple graph is simple")
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.n
    }

    /// Connectivity of the complement without building it.
    ///
    /// Breadth-first search over complement edges keeping the unvisited
    /// vertices in a list; each scan either removes a vertex or charges the
    /// work to an edge of `self`, so the cost is `O(n + m)`.
    pub fn is_complement_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut unvisited: Vec<u32> = (1..self.n as u32).collect();
        let mut queue = VecDeque::from([0u32]);
        let mut mark = vec![false; self.n];
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                mark[w as usize] = true;
            }
            let mut kept = Vec::new();
            for v in unvisited.drain(..) {
                if mark[v as usize] {
                    kept.push(v);
                } else {
                    queue.push_back(v);
                }
            }
            unvisited = kept;
            for &w in self.neighbors(u) {
                mark[w as usize] = false;
            }
        }
        unvisited.is_empty()
    }

    pub fn structure(&self) -> StructureReport {
        let degree = self.regular_degree();
        StructureReport {
            is_regular: degree.is_some(),
            degree,
            is_connected: self.is_connected(),
            complement_connected: self.is_complement_connected(),
        }
    }

    /// Rejects a subset with a member outside `0..n`.
    pub fn check_subset(&self, subset: &VertexSubset) -> Result<()> {
        match subset.members().last() {
            Some(&max) if max as usize >= self.n => Err(Error::validation(format!(
                "vertex {max} out of range for {} vertices",
                self.n
            ))),
            _ => Ok(()),
        }
    }

    /// Number of edges with both endpoints in the sorted member list.
    pub(crate) fn induced_edge_count(&self, members: &[u32]) -> usize {
        members
            .iter()
            .map(|&u| {
                self.neighbors(u)
                    .iter()
                    .filter(|&&w| w > u && members.binary_search(&w).is_ok())
                    .count()
            })
            .sum()
    }

    pub fn induced_stats(&self, subset: &VertexSubset) -> Result<InducedStats> {
        self.check_subset(subset)?;
        Ok(InducedStats::new(
            self.induced_edge_count(subset.members()),
            subset.k(),
        ))
    }

    /// Serializes in the edge-list text format, one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# {} vertices, {} edges\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses the edge-list text format.
///
/// One edge `u v` per line, 0-based ids; lines starting with `#` and blank
/// lines are skipped. The vertex set is `0..=max_id`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut endpoint = || -> Result<u32> {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            field.parse::<u32>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("'{field}' is not a nonnegative integer"),
            })
        };
        let u = endpoint()?;
        let v = endpoint()?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "trailing fields after the two vertex ids".into(),
            });
        }
        if u == v {
            return Err(Error::validation(format!(
                "line {line_no}: self-loop at vertex {u}"
            )));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = match max_id {
        Some(m) => m as usize + 1,
        None => return Err(Error::validation("edge list contains no edges")),
    };
    Graph::new(n, edges)
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_edge_list(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub is_regular: bool,
    pub degree: Option<usize>,
    pub is_connected: bool,
    pub complement_connected: bool,
}

/// A set of `k` distinct vertices stored in increasing order.
///
/// Doubles as a particle configuration (occupied sites) and as a vertex of
/// the token graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSubset {
    members: Vec<u32>,
}

impl VertexSubset {
    /// Validates `members` against a host with `n` vertices: non-empty,
    /// distinct, in range and with `k <= n - 1`. Order does not matter.
    pub fn new(mut members: Vec<u32>, n: usize) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation("subset has repeated vertices"));
        }
        if members.is_empty() || members.len() >= n {
            return Err(Error::validation(format!(
                "subset size {} outside 1..={} for {n} vertices",
                members.len(),
                n.saturating_sub(1)
            )));
        }
        if let Some(&max) = members.last() {
            if max as usize >= n {
                return Err(Error::validation(format!(
                    "vertex {max} out of range for {n} vertices"
                )));
            }
        }
        Ok(VertexSubset { members })
    }

    /// Wraps members already known to be strictly increasing.
    pub(crate) fn from_sorted(members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSubset { members }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// `(self \ {out}) ∪ {into}`.
    pub fn swapped(&self, out: u32, into: u32) -> VertexSubset {
        let mut members: Vec<u32> = self.members.iter().copied().filter(|&x| x != out).collect();
        let pos = members.partition_point(|&x| x < into);
        members.insert(pos, into);
        VertexSubset { members }
    }
}

impl fmt::Display for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for VertexSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(serializer)
    }
}

/// Edge count, density `|E|/k` and average degree `2|E|/k` of an induced
/// subgraph, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InducedStats {
    pub edge_count: usize,
    pub k: usize,
}

impl InducedStats {
    pub fn new(edge_count: usize, k: usize) -> Self {
        debug_assert!(k == 0 || edge_count <= k * (k - 1) / 2);
        InducedStats { edge_count, k }
    }

    pub fn density(&self) -> Ratio<usize> {
        Ratio::new(self.edge_count, self.k)
    }

    pub fn avg_degree(&self) -> Ratio<usize> {
        Ratio::new(2 * self.edge_count, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const PRISM: &str = "0 3\n0 4\n1 3\n2 5\n2 4\n0 1\n1 2\n3 5\n4 5\n";

    fn subset(m: &[u32], n: usize) -> VertexSubset {
        VertexSubset::new(m.to_vec(), n).unwrap()
    }

    #[test]
    fn parses_minimal_path() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn parses_reference_graph_as_cubic() {
        let g = parse_edge_list(PRISM).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn parse_skips_comments_and_blank_lines_and_dedups() {
        let g = parse_edge_list("# header\n\n0 1\n  # indented\n1 0\n1 2\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn parse_rejects_self_loop() {
        assert!(matches!(parse_edge_list("0 0"), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_reports_line_number() {
        match parse_edge_list("0 1\n# c\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0 1 2"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("4"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_edge_list("-1 2"), Err(Error::Parse { .. })));
        assert!(parse_edge_list("# nothing\n").is_err());
    }

    #[test]
    fn complement_of_complete_is_empty() {
        let c = Graph::complete(4).complement();
        assert_eq!(c.vertex_count(), 4);
        assert_eq!(c.edge_count(), 0);
    }

    #[test]
    fn complement_of_reference_graph_is_six_cycle() {
        let c = parse_edge_list(PRISM).unwrap().complement();
        assert_eq!(
            c.edges(),
            &[(0, 2), (0, 5), (1, 4), (1, 5), (2, 3), (3, 4)]
        );
        assert_eq!(c.regular_degree(), Some(2));
    }

    #[test]
    fn structure_reports() {
        let g = parse_edge_list(PRISM).unwrap();
        assert_eq!(
            g.structure(),
            StructureReport {
                is_regular: true,
                degree: Some(3),
                is_connected: true,
                complement_connected: true
            }
        );
        let k4 = Graph::complete(4).structure();
        assert_eq!(k4.degree, Some(3));
        assert!(k4.is_connected && !k4.complement_connected);
        let p3 = Graph::path(3).structure();
        assert!(!p3.is_regular && p3.degree.is_none());
        assert!(p3.is_connected && !p3.complement_connected);
    }

    #[test]
    fn induced_stats_examples() {
        let g = parse_edge_list(PRISM).unwrap();
        let tri = g.induced_stats(&subset(&[0, 1, 3], 6)).unwrap();
        assert_eq!(tri.edge_count, 3);
        assert_eq!(tri.density(), Ratio::from_integer(1));
        let path = g.induced_stats(&subset(&[0, 1, 2], 6)).unwrap();
        assert_eq!(path.edge_count, 2);
        assert_eq!(path.avg_degree(), Ratio::new(4, 3));
        for v in 0..6 {
            let s = g.induced_stats(&subset(&[v], 6)).unwrap();
            assert_eq!((s.edge_count, s.density()), (0, Ratio::from_integer(0)));
        }
    }

    #[test]
    fn induced_stats_rejects_out_of_range_member() {
        let g = Graph::path(3);
        let foreign = subset(&[0, 7], 10);
        assert!(matches!(g.induced_stats(&foreign), Err(Error::Validation(_))));
    }

    #[test]
    fn subset_validation() {
        assert!(VertexSubset::new(vec![], 4).is_err());
        assert!(VertexSubset::new(vec![0, 1, 2, 3], 4).is_err());
        assert!(VertexSubset::new(vec![1, 1], 4).is_err());
        assert!(VertexSubset::new(vec![0, 4], 4).is_err());
        let s = VertexSubset::new(vec![3, 0], 4).unwrap();
        assert_eq!(s.members(), &[0, 3]);
        assert_eq!(s.to_string(), "{0,3}");
        assert_eq!(s.swapped(0, 2).members(), &[2, 3]);
    }

    #[test]
    fn rejects_out_of_range_edges() {
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list(PRISM).unwrap();
        assert_eq!(parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }
}
