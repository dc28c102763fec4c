//! Acyclic query patterns and their rooted, post-ordered tree formulations.
//!
//! A [`TreeForm`] assigns every pattern vertex a subscript `0..=k` such that
//! children always precede their parent, so a bottom-up evaluation in
//! subscript order never reads an unset value. The root carries subscript `k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported pattern size (edges).
pub const MAX_PATTERN_EDGES: usize = 10;
/// Largest size accepted in a spec string; walks may go beyond the pattern cap.
pub const MAX_SPEC_SIZE: usize = 30;

/// Connected acyclic pattern with `k` edges over vertex labels `0..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Pattern {
    /// Validates an explicit edge list. Labels must be exactly `0..=k`.
    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Validation("pattern needs at least one edge".into()));
        }
        let k = edges.len();
        if k > MAX_PATTERN_EDGES {
            return Err(Error::Validation(format!(
                "pattern has {k} edges; at most {MAX_PATTERN_EDGES} are supported"
            )));
        }
        let vertex_count = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
        let mut seen = vec![false; vertex_count];
        let mut components = UnionFind::new(vertex_count);
        let mut normalized = Vec::with_capacity(k);
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::Validation(format!("self-loop {a}-{b}")));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::Validation(format!("duplicate edge {a}-{b}")));
            }
            if !components.union(a, b) {
                return Err(Error::Validation(format!("cycle detected at edge {a}-{b}")));
            }
            seen[a] = true;
            seen[b] = true;
            normalized.push(e);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Validation(format!(
                "vertex labels must be exactly 0..={}; label {missing} is unused",
                vertex_count - 1
            )));
        }
        if vertex_count != k + 1 {
            return Err(Error::Validation(format!(
                "disconnected: {k} edges over {vertex_count} vertices"
            )));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &normalized {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Pattern {
            vertex_count,
            edges: normalized,
            adjacency,
        })
    }

    /// `k`-edge path `0-1-…-k`.
    pub fn path(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| (i, i + 1)).collect())
    }

    /// `k`-star: center `0` with leaves `1..=k`.
    pub fn star(k: usize) -> Result<Self> {
        Self::new((1..=k).map(|i| (0, i)).collect())
    }

    /// Number of edges `k`.
    pub fn k(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Highest-degree vertex, smallest label on ties.
    pub fn default_root(&self) -> usize {
        (0..self.vertex_count)
            .max_by(|&a, &b| self.degree(a).cmp(&self.degree(b)).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    /// Whether this is the `k`-path `0-1-…-k` up to relabeling.
    pub fn is_path(&self) -> bool {
        (0..self.vertex_count).all(|v| self.degree(v) <= 2)
    }

    /// Whether this is a `k`-star up to relabeling.
    pub fn is_star(&self) -> bool {
        (0..self.vertex_count).any(|v| self.degree(v) == self.k())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

/// Query target as written on the command line or in plan files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternSpec {
    Walk(usize),
    Path(usize),
    Star(usize),
    Edges(Vec<(usize, usize)>),
}

impl PatternSpec {
    pub fn k(&self) -> usize {
        match self {
            PatternSpec::Walk(k) | PatternSpec::Path(k) | PatternSpec::Star(k) => *k,
            PatternSpec::Edges(e) => e.len(),
        }
    }
}

impl FromStr for PatternSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let builtin = |rest: &str| -> Result<usize> {
            let k = rest
                .parse::<usize>()
                .map_err(|_| Error::Validation(format!("bad size in `{s}`")))?;
            if k == 0 || k > MAX_SPEC_SIZE {
                return Err(Error::Validation(format!("size {k} in `{s}` is out of range")));
            }
            Ok(k)
        };
        if let Some(rest) = s.strip_prefix("walk:") {
            return Ok(PatternSpec::Walk(builtin(rest)?));
        }
        if let Some(rest) = s.strip_prefix("path:") {
            return Ok(PatternSpec::Path(builtin(rest)?));
        }
        if let Some(rest) = s.strip_prefix("star:") {
            return Ok(PatternSpec::Star(builtin(rest)?));
        }
        let mut edges = Vec::new();
        for pair in s.split(',') {
            let (a, b) = pair
                .trim()
                .split_once('-')
                .ok_or_else(|| Error::Validation(format!("expected `a-b`, got `{pair}`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Validation(format!("bad vertex label `{t}`")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        Ok(PatternSpec::Edges(edges))
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSpec::Walk(k) => write!(f, "walk:{k}"),
            PatternSpec::Path(k) => write!(f, "path:{k}"),
            PatternSpec::Star(k) => write!(f, "star:{k}"),
            PatternSpec::Edges(edges) => {
                let parts: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Expands a spec into a validated [`Pattern`]. Walks are not acyclic
/// patterns and are rejected.
pub fn parse_pattern(spec: &PatternSpec) -> Result<Pattern> {
    match spec {
        PatternSpec::Walk(_) => Err(Error::Validation(
            "walks may revisit nodes and are not acyclic patterns; use a walk mechanism".into(),
        )),
        PatternSpec::Path(k) => Pattern::path(*k),
        PatternSpec::Star(k) => Pattern::star(*k),
        PatternSpec::Edges(edges) => Pattern::new(edges.clone()),
    }
}

/// Rooted, post-ordered formulation of a pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeForm {
    pattern: Pattern,
    root_vertex: usize,
    /// `subscript_of[v]`: position of pattern vertex `v` in the post-order.
    subscript_of: Vec<usize>,
    /// `vertex_of[l]`: pattern vertex carrying subscript `l`.
    vertex_of: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    leaves: Vec<usize>,
    subtree_edges: Vec<usize>,
    sigma: u64,
}

impl TreeForm {
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn k(&self) -> usize {
        self.pattern.k()
    }

    /// Pattern vertex chosen as root.
    pub fn root_vertex(&self) -> usize {
        self.root_vertex
    }

    pub fn subscript_of(&self, vertex: usize) -> usize {
        self.subscript_of[vertex]
    }

    pub fn vertex_of(&self, subscript: usize) -> usize {
        self.vertex_of[subscript]
    }

    /// Parent subscript; `None` for the root.
    pub fn parent(&self, subscript: usize) -> Option<usize> {
        self.parent[subscript]
    }

    /// Child subscripts in ascending order.
    pub fn children(&self, subscript: usize) -> &[usize] {
        &self.children[subscript]
    }

    /// Leaf subscripts in ascending order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn is_leaf(&self, subscript: usize) -> bool {
        self.children[subscript].is_empty()
    }

    /// Internal subscripts in ascending (evaluation) order; always ends in `k`.
    pub fn internal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.k()).filter(move |&l| !self.is_leaf(l))
    }

    /// Edge count of the subtree rooted at `subscript`.
    pub fn subtree_edges(&self, subscript: usize) -> usize {
        self.subtree_edges[subscript]
    }

    /// Automorphism count of the underlying pattern.
    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    /// Protocol rounds including the marking round: `k + 2 - |leaves|`.
    pub fn round_count(&self) -> usize {
        round_count(self)
    }
}

/// Roots `pattern` at `root` (or [`Pattern::default_root`]) and numbers the
/// vertices by a depth-first post-order visiting children in label order.
pub fn formulate_tree(pattern: &Pattern, root: Option<usize>) -> Result<TreeForm> {
    let root_vertex = root.unwrap_or_else(|| pattern.default_root());
    if root_vertex >= pattern.vertex_count() {
        return Err(Error::arg(
            "root",
            format!(
                "vertex {root_vertex} is not in a pattern with vertices 0..={}",
                pattern.k()
            ),
        ));
    }
    let n = pattern.vertex_count();
    let mut subscript_of = vec![usize::MAX; n];
    let mut vertex_of = Vec::with_capacity(n);
    let mut parent_vertex = vec![None; n];

    // iterative DFS over (vertex, next child index)
    let mut stack = vec![(root_vertex, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        let child = pattern
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| Some(u) != parent_vertex[v])
            .nth(next);
        match child {
            Some(child) => {
                top.1 += 1;
                parent_vertex[child] = Some(v);
                stack.push((child, 0));
            }
            None => {
                subscript_of[v] = vertex_of.len();
                vertex_of.push(v);
                stack.pop();
            }
        }
    }

    let parent: Vec<Option<usize>> = vertex_of
        .iter()
        .map(|&v| parent_vertex[v].map(|p| subscript_of[p]))
        .collect();
    let mut children = vec![Vec::new(); n];
    for (l, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(l);
        }
    }
    let leaves: Vec<usize> = (0..n).filter(|&l| children[l].is_empty()).collect();
    let mut subtree_edges = vec![0; n];
    for l in 0..n {
        subtree_edges[l] = children[l].iter().map(|&c| 1 + subtree_edges[c]).sum();
    }

    Ok(TreeForm {
        pattern: pattern.clone(),
        root_vertex,
        subscript_of,
        vertex_of,
        parent,
        children,
        leaves,
        subtree_edges,
        sigma: automorphism_count(pattern),
    })
}

/// `k + 2 - |leaves|`, counting the marking round.
pub fn round_count(tree: &TreeForm) -> usize {
    tree.k() + 2 - tree.leaves().len()
}

/// Number of edge-preserving vertex permutations of `pattern`.
///
/// Computed from canonical rooted encodings at the centroid(s): a rooted tree
/// has `Π (multiplicity)!` automorphisms over groups of identical child
/// subtrees, and a bicentroidal tree doubles when its two halves match.
pub fn automorphism_count(pattern: &Pattern) -> u64 {
    let centroids = centroids(pattern);
    match centroids.as_slice() {
        [c] => rooted_encoding(pattern, *c, None).1,
        [a, b] => {
            let (enc_a, aut_a) = rooted_encoding(pattern, *a, Some(*b));
            let (enc_b, aut_b) = rooted_encoding(pattern, *b, Some(*a));
            let swap = if enc_a == enc_b { 2 } else { 1 };
            aut_a * aut_b * swap
        }
        _ => unreachable!("a tree has one or two centroids"),
    }
}

fn centroids(pattern: &Pattern) -> Vec<usize> {
    let n = pattern.vertex_count();
    let mut size = vec![1usize; n];
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &u in pattern.neighbors(v) {
            if parent[u] == usize::MAX {
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    for &v in order.iter().rev().filter(|&&v| v != 0) {
        size[parent[v]] += size[v];
    }
    let heaviest_part = |v: usize| {
        pattern
            .neighbors(v)
            .iter()
            .filter(|&&u| u != 0 && parent[u] == v)
            .map(|&u| size[u])
            .fold(n - size[v], usize::max)
    };
    let best = (0..n).map(heaviest_part).min().unwrap_or(0);
    (0..n).filter(|&v| heaviest_part(v) == best).collect()
}

/// AHU encoding of the subtree at `v` (excluding `blocked`) and its rooted
/// automorphism count.
fn rooted_encoding(pattern: &Pattern, v: usize, blocked: Option<usize>) -> (String, u64) {
    let mut encodings: Vec<(String, u64)> = pattern
        .neighbors(v)
        .iter()
        .filter(|&&u| Some(u) != blocked)
        .map(|&u| rooted_encoding(pattern, u, Some(v)))
        .collect();
    encodings.sort();
    let mut aut: u64 = encodings.iter().map(|(_, a)| a).product();
    let mut run = 1u64;
    for pair in encodings.windows(2) {
        if pair[0].0 == pair[1].0 {
            run += 1;
            aut *= run;
        } else {
            run = 1;
        }
    }
    let mut code = String::from("(");
    for (e, _) in &encodings {
        code.push_str(e);
    }
    code.push(')');
    (code, aut)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
