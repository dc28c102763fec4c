//! Undirected simple graphs: SNAP edge-list ingestion, seeded Erdős–Rényi
//! generation and degree queries.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected graph without self-loops or parallel edges.
///
/// Neighbor lists are sorted ascending so adjacency tests are a binary search.
/// A `Graph` never changes after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes from an edge iterator. Self-loops are
    /// dropped, duplicates (in either direction) merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::arg(
                    "edge",
                    format!("({a}, {b}) references a node outside 0..{n}"),
                ));
            }
            if a == b {
                continue;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Self::from_adjacency(adjacency))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut total = 0;
        let mut max_degree = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            total += list.len();
            max_degree = max_degree.max(list.len());
        }
        Graph {
            adjacency,
            edge_count: total / 2,
            max_degree,
        }
    }

    /// Number of nodes `N`.
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges `M`.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Maximum degree `d(G)`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, node: usize) -> Result<usize> {
        self.check(node)?;
        Ok(self.adjacency[node].len())
    }

    pub fn neighbors(&self, node: usize) -> Result<&[usize]> {
        self.check(node)?;
        Ok(&self.adjacency[node])
    }

    /// Unchecked neighbor access for hot loops; panics when out of range.
    #[inline]
    pub fn adj(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn average_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.adjacency.len() as f64
        }
    }

    /// Edges as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    fn check(&self, node: usize) -> Result<()> {
        if node < self.adjacency.len() {
            Ok(())
        } else {
            Err(Error::arg(
                "node",
                format!("{node} is out of range for a graph with {} nodes", self.adjacency.len()),
            ))
        }
    }

    /// Writes the graph so that [`load_edge_list`] reproduces it exactly,
    /// node indices included.
    ///
    /// Node `i` is introduced on the first line that mentions it; lines are
    /// emitted as `i j` with `j < i`, and a node without a smaller neighbor is
    /// introduced by the self-loop line `i i` (dropped on load, node kept).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# nodes: {} edges: {}", self.node_count(), self.edge_count)?;
        for (i, list) in self.adjacency.iter().enumerate() {
            let mut introduced = false;
            for &j in list.iter().take_while(|&&j| j < i) {
                writeln!(out, "{i} {j}")?;
                introduced = true;
            }
            if !introduced {
                writeln!(out, "{i} {i}")?;
            }
        }
        Ok(())
    }
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped. Each remaining line
/// must start with two non-negative integer IDs; further columns (weights,
/// timestamps) are ignored. IDs are compacted to `0..N` in order of first
/// appearance.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |raw: u64| -> usize {
        let next = ids.len();
        *ids.entry(raw).or_insert(next)
    };

    for (index, line) in source.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node IDs".into(),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("malformed node ID `{token}`"),
            })
        };
        let a = next_id()?;
        let b = next_id()?;
        let (a, b) = (intern(a), intern(b));
        edges.push((a, b));
    }

    if ids.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "edge list is empty".into(),
        });
    }
    Graph::from_edges(ids.len(), edges)
}

/// Erdős–Rényi `G(n, p)`: every unordered pair is an edge independently with
/// probability `p`. Deterministic for a fixed `(n, p, seed)`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::arg("n", "a graph needs at least one node"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}

/// `G(n, p)` with `p` chosen so the expected average degree is `avg_degree`.
pub fn gen_erdos_renyi_avg_degree(n: usize, avg_degree: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::arg("n", "need at least two nodes to target a degree"));
    }
    gen_erdos_renyi(n, (avg_degree / (n - 1) as f64).clamp(0.0, 1.0), seed)
}

/// Parses a graph source: `er:N:p`, `er:N:p:seed`, `file:PATH` or a bare path.
/// Generators without an explicit seed use `default_seed`.
pub fn load_graph_source(source: &str, default_seed: u64) -> Result<Graph> {
    if let Some(rest) = source.strip_prefix("er:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(Error::arg("graph", format!("expected er:N:p[:seed], got `{source}`")));
        }
        let n = parts[0]
            .parse::<usize>()
            .map_err(|_| Error::arg("graph", format!("bad node count `{}`", parts[0])))?;
        let p = parts[1]
            .parse::<f64>()
            .map_err(|_| Error::arg("graph", format!("bad edge probability `{}`", parts[1])))?;
        let seed = match parts.get(2) {
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| Error::arg("graph", format!("bad seed `{s}`")))?,
            None => default_seed,
        };
        return gen_erdos_renyi(n, p, seed);
    }
    let path = source.strip_prefix("file:").unwrap_or(source);
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        load_edge_list(text.as_bytes())
    }

    #[test]
    fn triangle() {
        let g = parse("0 1\n1 2\n2 0").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
    }

    #[test]
    fn preprocessing_rules() {
        let g = parse("# c\n5 5\n5 7\n7 5").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(g.neighbors(0).unwrap(), &[1]);
    }

    #[test]
    fn self_loop_only_node_is_kept() {
        let g = parse("9 9\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(0).unwrap(), 0);
    }

    #[test]
    fn parse_errors_name_the_line() {
        match parse("0 1\n\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse("0 1\n2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("# only\n\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("-1 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn extra_columns_ignored() {
        let g = parse("1 2 1700000000\n2 3 1700000001").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn er_extremes() {
        let k4 = gen_erdos_renyi(4, 1.0, 3).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(k4.max_degree(), 3);
        assert!((0..4).all(|i| k4.degree(i).unwrap() == 3));
        assert_eq!(gen_erdos_renyi(10, 0.0, 3).unwrap().edge_count(), 0);
        assert!(gen_erdos_renyi(10, 1.5, 3).is_err());
        assert!(gen_erdos_renyi(10, -0.1, 3).is_err());
        assert!(gen_erdos_renyi(0, 0.5, 3).is_err());
    }

    #[test]
    fn er_is_deterministic() {
        let a = gen_erdos_renyi(100, 0.05, 7).unwrap();
        let b = gen_erdos_renyi(100, 0.05, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_erdos_renyi(100, 0.05, 8).unwrap());
    }

    #[test]
    fn degree_queries() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree(1).unwrap(), 2);
        assert_eq!(path.degree(0).unwrap(), 1);
        assert!(path.degree(3).is_err());
        assert!(path.neighbors(7).is_err());
        assert!(path.has_edge(1, 0));
        assert!(!path.has_edge(0, 2));
    }

    #[test]
    fn graph_source_parsing() {
        let g = load_graph_source("er:20:0.3:1", 0).unwrap();
        assert_eq!(g, gen_erdos_renyi(20, 0.3, 1).unwrap());
        assert_eq!(load_graph_source("er:20:0.3", 1).unwrap(), g);
        assert!(load_graph_source("er:20", 1).is_err());
        assert!(matches!(
            load_graph_source("file:/definitely/not/here.txt", 1),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn serialization_keeps_isolated_nodes() {
        let g = Graph::from_edges(4, [(1, 3)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(load_edge_list(buf.as_slice()).unwrap(), g);
    }
}
