//! Structural validation of an utterance's support graph.

use super::Utterance;

/// One structural finding. Self-loops, out-of-range indices, and duplicate
/// edges are violations; a directed cycle is informational only, because the
/// upstream argument graphs do not have to form trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFinding {
    SelfLoop { src: usize },
    OutOfRange { src: usize, dst: usize, len: usize },
    Duplicate { src: usize, dst: usize },
}

impl std::fmt::Display for GraphFinding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphFinding::SelfLoop { src } => write!(f, "self-loop at sentence {src}"),
            GraphFinding::OutOfRange { src, dst, len } => write!(
                f,
                "edge {src}->{dst} out of range for {len} sentences"
            ),
            GraphFinding::Duplicate { src, dst } => write!(f, "duplicate edge {src}->{dst}"),
        }
    }
}

/// Report from [`validate_graph`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<GraphFinding>,
    /// Whether the in-range, non-self-loop part of the graph contains a
    /// directed cycle. Cycles are flagged, never rejected.
    pub has_cycle: bool,
}

impl ValidationReport {
    /// Findings that make the utterance structurally invalid.
    pub fn violations(&self) -> impl Iterator<Item = &GraphFinding> {
        self.findings.iter()
    }

    pub fn is_structurally_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Check an utterance's support graph for duplicate edges, out-of-range
/// indices, and self-loops, and flag directed cycles.
pub fn validate_graph(u: &Utterance) -> ValidationReport {
    let n = u.sentences.len();
    let mut report = ValidationReport::default();
    let mut seen = std::collections::BTreeSet::new();
    let mut adjacency = vec![Vec::new(); n];

    for e in &u.edges {
        if e.src >= n || e.dst >= n {
            report.findings.push(GraphFinding::OutOfRange {
                src: e.src,
                dst: e.dst,
                len: n,
            });
            continue;
        }
        if e.src == e.dst {
            report.findings.push(GraphFinding::SelfLoop { src: e.src });
            continue;
        }
        if !seen.insert((e.src, e.dst)) {
            report.findings.push(GraphFinding::Duplicate { src: e.src, dst: e.dst });
            continue;
        }
        adjacency[e.src].push(e.dst);
    }

    report.has_cycle = has_directed_cycle(&adjacency);
    report
}

/// Iterative three-color DFS.
fn has_directed_cycle(adjacency: &[Vec<usize>]) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let n = adjacency.len();
    let mut color = vec![Color::White; n];

    for start in 0..n {
        if color[start] != Color::White {
            continue;
        }
        // stack of (node, next child index)
        let mut stack = vec![(start, 0usize)];
        color[start] = Color::Gray;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < adjacency[node].len() {
                let child = adjacency[node][*next];
                *next += 1;
                match color[child] {
                    Color::Gray => return true,
                    Color::White => {
                        color[child] = Color::Gray;
                        stack.push((child, 0));
                    }
                    Color::Black => {}
                }
            } else {
                color[node] = Color::Black;
                stack.pop();
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PropositionType, SupportEdge};

    fn utt(n: usize, edges: &[(usize, usize)]) -> Utterance {
        let mut u = Utterance::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            vec![PropositionType::Value; n],
        );
        u.edges = edges.iter().map(|&(a, b)| SupportEdge::new(a, b)).collect();
        u
    }

    #[test]
    fn chain_is_valid_and_acyclic() {
        let report = validate_graph(&utt(3, &[(0, 1), (1, 2)]));
        assert!(report.is_structurally_valid());
        assert!(!report.has_cycle);
    }

    #[test]
    fn two_node_cycle_flagged_but_valid() {
        let report = validate_graph(&utt(2, &[(0, 1), (1, 0)]));
        assert!(report.is_structurally_valid());
        assert!(report.has_cycle);
    }

    #[test]
    fn self_loop_reported() {
        let report = validate_graph(&utt(1, &[(0, 0)]));
        assert_eq!(report.findings, vec![GraphFinding::SelfLoop { src: 0 }]);
    }

    #[test]
    fn duplicate_and_out_of_range_reported() {
        let report = validate_graph(&utt(2, &[(0, 1), (0, 1), (0, 7)]));
        assert_eq!(report.findings.len(), 2);
        assert!(report
            .findings
            .contains(&GraphFinding::Duplicate { src: 0, dst: 1 }));
        assert!(report
            .findings
            .contains(&GraphFinding::OutOfRange { src: 0, dst: 7, len: 2 }));
    }

    /// Brute-force reachability oracle: a directed cycle exists iff some
    /// node can reach itself through at least one edge.
    fn cycle_by_reachability(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in edges {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..n).any(|i| reach[i][i])
    }

    #[test]
    fn cycle_flag_matches_reachability_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(1..=8usize);
            let mut edges = Vec::new();
            for src in 0..n {
                for dst in 0..n {
                    if src != dst && rng.gen_bool(0.25) {
                        edges.push((src, dst));
                    }
                }
            }
            let report = validate_graph(&utt(n, &edges));
            assert!(report.is_structurally_valid());
            assert_eq!(
                report.has_cycle,
                cycle_by_reachability(n, &edges),
                "n={n} edges={edges:?}"
            );
        }
    }
}
