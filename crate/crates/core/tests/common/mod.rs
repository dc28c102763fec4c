//! Brute-force references shared by the integration tests. Nothing here calls
//! the library's counting code; graphs are read through `has_edge`/`adj` only.
#![allow(dead_code)]

use std::collections::HashSet;

use ldp_motifs::Graph;

/// Every node sequence `v_0..v_k` with consecutive nodes adjacent.
pub fn walks(g: &Graph, k: usize, unoriented: bool) -> u128 {
    let mut seq = Vec::with_capacity(k + 1);
    let mut count = 0u128;
    for v in 0..g.node_count() {
        seq.push(v);
        extend_walk(g, k, unoriented, &mut seq, &mut count);
        seq.pop();
    }
    count
}

fn extend_walk(g: &Graph, k: usize, unoriented: bool, seq: &mut Vec<usize>, count: &mut u128) {
    if seq.len() == k + 1 {
        let reversed: Vec<usize> = seq.iter().rev().copied().collect();
        if !unoriented || *seq <= reversed {
            *count += 1;
        }
        return;
    }
    let last = *seq.last().unwrap();
    for u in 0..g.node_count() {
        if g.has_edge(last, u) {
            seq.push(u);
            extend_walk(g, k, unoriented, seq, count);
            seq.pop();
        }
    }
}

/// Oriented `k`-paths: walks with pairwise distinct nodes.
pub fn paths(g: &Graph, k: usize) -> u128 {
    let n = g.node_count();
    let mut count = 0u128;
    for_each_tuple(n, k + 1, &mut |t| {
        let distinct = (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]));
        if distinct && t.windows(2).all(|w| g.has_edge(w[0], w[1])) {
            count += 1;
        }
    });
    count
}

/// Ordered `k`-stars: center plus `k` distinct ordered leaves.
pub fn ordered_stars(g: &Graph, k: usize) -> u128 {
    let n = g.node_count();
    let mut count = 0u128;
    for_each_tuple(n, k + 1, &mut |t| {
        let distinct = (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]));
        if distinct && t[1..].iter().all(|&l| g.has_edge(t[0], l)) {
            count += 1;
        }
    });
    count
}

/// Distinct subgraphs of `g` isomorphic to the pattern on `vertices`
/// vertices with `edges`: distinct edge-set images of injective maps.
pub fn pattern_instances(g: &Graph, vertices: usize, edges: &[(usize, usize)]) -> u128 {
    let mut images: HashSet<Vec<(usize, usize)>> = HashSet::new();
    for_each_tuple(g.node_count(), vertices, &mut |t| {
        let distinct = (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]));
        if !distinct || !edges.iter().all(|&(a, b)| g.has_edge(t[a], t[b])) {
            return;
        }
        let mut image: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (t[a].min(t[b]), t[a].max(t[b])))
            .collect();
        image.sort_unstable();
        images.insert(image);
    });
    images.len() as u128
}

/// Vertex bijections of the pattern that map its edge set onto itself.
pub fn automorphisms(vertices: usize, edges: &[(usize, usize)]) -> u64 {
    let mut adj = vec![vec![false; vertices]; vertices];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut image = Vec::with_capacity(vertices);
    let mut used = vec![false; vertices];
    count_bijections(&adj, &mut image, &mut used)
}

fn count_bijections(adj: &[Vec<bool>], image: &mut Vec<usize>, used: &mut [bool]) -> u64 {
    let n = adj.len();
    let v = image.len();
    if v == n {
        return 1;
    }
    let mut total = 0;
    for w in 0..n {
        if used[w] {
            continue;
        }
        // Edges and non-edges between v and every earlier vertex must be kept.
        if (0..v).any(|u| adj[u][v] != adj[image[u]][w]) {
            continue;
        }
        used[w] = true;
        image.push(w);
        total += count_bijections(adj, image, used);
        image.pop();
        used[w] = false;
    }
    total
}

/// Number of nodes of `g` matching each subscript when the pattern vertex
/// with subscript `s` must carry mark `s`: embeddings `φ` with
/// `marks[φ(v)] == subscript[v]` for every pattern vertex `v`.
pub fn marked_embeddings(
    g: &Graph,
    vertices: usize,
    edges: &[(usize, usize)],
    subscript: &[usize],
    marks: &[u8],
) -> u128 {
    let mut count = 0u128;
    let by_mark: Vec<Vec<usize>> = (0..vertices)
        .map(|v| {
            (0..g.node_count())
                .filter(|&x| marks[x] as usize == subscript[v])
                .collect()
        })
        .collect();
    let mut assigned = vec![usize::MAX; vertices];
    assign(g, edges, &by_mark, 0, &mut assigned, &mut count);
    count
}

fn assign(
    g: &Graph,
    edges: &[(usize, usize)],
    by_mark: &[Vec<usize>],
    v: usize,
    assigned: &mut Vec<usize>,
    count: &mut u128,
) {
    if v == assigned.len() {
        *count += 1;
        return;
    }
    for &x in &by_mark[v] {
        let ok = edges.iter().all(|&(a, b)| {
            let other = if a == v { b } else if b == v { a } else { return true };
            other > v || g.has_edge(assigned[other], x)
        });
        if ok {
            assigned[v] = x;
            assign(g, edges, by_mark, v + 1, assigned, count);
        }
    }
    assigned[v] = usize::MAX;
}

/// Calls `f` on every length-`len` tuple over `0..n`.
pub fn for_each_tuple(n: usize, len: usize, f: &mut dyn FnMut(&[usize])) {
    let mut t = vec![0usize; len];
    if n == 0 {
        return;
    }
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Every tree on `vertices` vertices with `parent[i] < i`; together these
/// cover every unlabeled tree shape (label any tree in BFS order).
pub fn increasing_trees(vertices: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut parents = vec![0usize; vertices.saturating_sub(1)];
    build_trees(1, vertices, &mut parents, &mut out);
    out
}

fn build_trees(i: usize, n: usize, parents: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
    if i >= n {
        out.push(parents.iter().enumerate().map(|(c, &p)| (p, c + 1)).collect());
        return;
    }
    for p in 0..i {
        parents[i - 1] = p;
        build_trees(i + 1, n, parents, out);
    }
}
