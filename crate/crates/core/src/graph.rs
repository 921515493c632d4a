//! Combinatorial graphs shared by the discrete and metric models.
//!
//! A [`Graph`] is simple and connected. Each undirected edge `(u, v)` keeps
//! the orientation it was created with; the metric model uses it as the
//! direction of the local edge coordinate.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no edges")]
    EmptyEdgeList,
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("self-loop at vertex {vertex}; subdivide it with degree-2 dummy vertices")]
    SelfLoop { vertex: usize },
    #[error("parallel edge ({u}, {v}); subdivide one copy with a degree-2 dummy vertex")]
    ParallelEdge { u: usize, v: usize },
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    DisconnectedGraph { vertex: usize },
    #[error("graph is not a tree (cycle dimension {cycle_dimension})")]
    NotATree { cycle_dimension: usize },
    #[error("sign pattern vanishes at vertex {vertex}")]
    ZeroSign { vertex: usize },
    #[error("sign pattern has {got} entries, graph has {expected} vertices")]
    SignLength { expected: usize, got: usize },
}

/// One of the two orientations of an undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

impl DirectedEdge {
    pub fn reversed(self) -> Self {
        DirectedEdge {
            edge: self.edge,
            from: self.to,
            to: self.from,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    // (neighbour, edge index), ascending by neighbour
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Validates and builds a simple connected graph.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::ParallelEdge { u, v });
            }
            adjacency[u].push((v, idx));
            adjacency[v].push((u, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Graph {
            vertex_count,
            edges: edges.to_vec(),
            adjacency,
        };
        if let Some(vertex) = g.first_unreachable() {
            return Err(GraphError::DisconnectedGraph { vertex });
        }
        Ok(g)
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// `(neighbour, edge index)` pairs, ascending by neighbour.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency
            .get(u)?
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    /// Both orientations of every edge; edge `i` yields entries `2i` and `2i + 1`.
    pub fn directed_edges(&self) -> Vec<DirectedEdge> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(edge, &(from, to))| {
                let d = DirectedEdge { edge, from, to };
                [d, d.reversed()]
            })
            .collect()
    }

    /// Dimension of the cycle space, `|E| - |V| + 1`.
    pub fn cycle_dimension(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn is_tree(&self) -> bool {
        self.cycle_dimension() == 0
    }

    /// Edges whose removal leaves a spanning tree: the non-tree edges of a
    /// depth-first traversal from vertex 0 visiting neighbours in ascending
    /// order. Returned as ascending edge indices.
    pub fn spanning_cut_set(&self) -> Vec<usize> {
        let mut tree_edge = vec![false; self.edges.len()];
        let mut seen = vec![false; self.vertex_count];
        // (vertex, position in its adjacency list)
        let mut stack = vec![(0usize, 0usize)];
        seen[0] = true;
        while let Some(top) = stack.last_mut() {
            let (u, pos) = *top;
            if pos == self.adjacency[u].len() {
                stack.pop();
                continue;
            }
            top.1 += 1;
            let (w, e) = self.adjacency[u][pos];
            if !seen[w] {
                seen[w] = true;
                tree_edge[e] = true;
                stack.push((w, 0));
            }
        }
        (0..self.edges.len()).filter(|&e| !tree_edge[e]).collect()
    }

    /// The graph on the same vertex set with the given edges deleted.
    /// Remaining edges keep their relative order.
    pub fn without_edges(&self, removed: &[usize]) -> Result<Graph, GraphError> {
        let removed: HashSet<usize> = removed.iter().copied().collect();
        let kept: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &e)| e)
            .collect();
        Graph::new(self.vertex_count, &kept)
    }

    /// Whether deleting `edge` keeps the graph connected.
    pub fn is_deletable(&self, edge: usize) -> bool {
        self.edges.len() > 1 && self.without_edges(&[edge]).is_ok()
    }

    pub fn root_tree(&self, root: usize) -> Result<RootedTree, GraphError> {
        RootedTree::new(self.clone(), root)
    }
}

/// A tree with a distinguished root, inducing the partial order in which
/// `v < u` when the path from `v` to the root passes through `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    graph: Graph,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
}

impl RootedTree {
    pub fn new(graph: Graph, root: usize) -> Result<Self, GraphError> {
        if !graph.is_tree() {
            return Err(GraphError::NotATree {
                cycle_dimension: graph.cycle_dimension(),
            });
        }
        let n = graph.vertex_count();
        if root >= n {
            return Err(GraphError::VertexOutOfRange {
                vertex: root,
                count: n,
            });
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut bfs = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[root] = true;
        bfs.push(root);
        let mut head = 0;
        while head < bfs.len() {
            let u = bfs[head];
            head += 1;
            for w in graph.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    children[u].push(w);
                    bfs.push(w);
                }
            }
        }
        bfs.reverse();
        Ok(RootedTree {
            graph,
            root,
            parent,
            children,
            topo_order: bfs,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Vertices `w` with `w ≺ v`.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Every vertex, children before parents; the root comes last.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// `v < u` in the tree order.
    pub fn is_below(&self, v: usize, u: usize) -> bool {
        let mut cur = self.parent[v];
        while let Some(p) = cur {
            if p == u {
                return true;
            }
            cur = self.parent[p];
        }
        false
    }

    /// All `u <= v`, in topological order.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend_from_slice(&self.children[u]);
        }
        out.sort_by_key(|&u| self.topo_position(u));
        out
    }

    fn topo_position(&self, v: usize) -> usize {
        self.topo_order.iter().position(|&u| u == v).unwrap()
    }
}

/// Strict signs (+1 / -1) on every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self, GraphError> {
        if let Some(vertex) = signs.iter().position(|&s| s == 0) {
            return Err(GraphError::ZeroSign { vertex });
        }
        Ok(SignPattern(signs.into_iter().map(|s| s.signum()).collect()))
    }

    /// Signs of `values`; entries with `|x| <= tol` are rejected.
    pub fn from_values(values: &[f64], tol: f64) -> Result<Self, GraphError> {
        let signs = values
            .iter()
            .enumerate()
            .map(|(vertex, &x)| {
                if x.abs() <= tol || x.is_nan() {
                    Err(GraphError::ZeroSign { vertex })
                } else {
                    Ok(if x > 0.0 { 1 } else { -1 })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SignPattern(signs))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }
}

/// Number of maximal connected constant-sign subgraphs.
pub fn sign_components(g: &Graph, s: &SignPattern) -> Result<usize, GraphError> {
    if s.0.len() != g.vertex_count() {
        return Err(GraphError::SignLength {
            expected: g.vertex_count(),
            got: s.0.len(),
        });
    }
    Ok(support_sign_components(g, &s.0))
}

/// Like [`sign_components`] but vertices with sign 0 are dropped from the
/// graph before counting.
pub fn support_sign_components(g: &Graph, signs: &[i8]) -> usize {
    let mut uf = UnionFind::new(g.vertex_count());
    for &(u, v) in g.edges() {
        if signs[u] != 0 && signs[u] == signs[v] {
            uf.union(u, v);
        }
    }
    (0..g.vertex_count())
        .filter(|&v| signs[v] != 0 && uf.find(v) == v)
        .count()
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn count_roots(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Reference graphs used across tests, the CLI corpus and benchmarks.
/// Labels are 0-indexed here; the matching corpus files use 1-indexed ones.
pub mod samples {
    use super::Graph;

    /// Seven vertices, eight edges, `ℓ = 2`; deleting `(2,3)` and `(4,5)`
    /// (1-indexed) leaves the path 6-4-2-1-3-5-7.
    pub fn two_cycle_graph() -> Graph {
        let edges = [(1, 2), (1, 3), (2, 4), (3, 5), (4, 6), (5, 7), (2, 3), (4, 5)];
        let edges: Vec<_> = edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Graph::new(7, &edges).unwrap()
    }

    /// Signs on [`two_cycle_graph`] giving 3 domains on the graph and 5 on
    /// the tree left after deleting `(2,3)` and `(4,5)`.
    pub fn two_cycle_signs() -> Vec<i8> {
        vec![1, -1, -1, 1, 1, 1, 1]
    }

    /// The 1-indexed cut edges `(2,3)` and `(4,5)` as edge indices of
    /// [`two_cycle_graph`].
    pub fn two_cycle_cut() -> [usize; 2] {
        [6, 7]
    }

    /// Five-vertex tree with edges (1,4),(2,4),(3,5),(4,5), 1-indexed; root it at 4 (0-indexed).
    pub fn five_vertex_tree() -> Graph {
        Graph::new(5, &[(0, 3), (1, 3), (2, 4), (3, 4)]).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    /// Star with centre 0 and `arms` leaves.
    pub fn star(arms: usize) -> Graph {
        let edges: Vec<_> = (1..=arms).map(|j| (0, j)).collect();
        Graph::new(arms + 1, &edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builds_smallest_graph() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.directed_edges().len(), 2);
        assert!(g.is_tree());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            Graph::new(3, &[(0, 1)]),
            Err(GraphError::DisconnectedGraph { vertex: 2 })
        );
        assert_eq!(
            Graph::new(2, &[(1, 1)]),
            Err(GraphError::SelfLoop { vertex: 1 })
        );
        assert_eq!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(GraphError::ParallelEdge { u: 1, v: 0 })
        );
        assert_eq!(
            Graph::new(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, count: 2 })
        );
        assert_eq!(Graph::new(1, &[]), Err(GraphError::EmptyEdgeList));
        let msg = GraphError::ParallelEdge { u: 0, v: 1 }.to_string();
        assert!(msg.contains("subdivide"));
    }

    #[test]
    fn directed_edges_pair_up() {
        let g = two_cycle_graph();
        let d = g.directed_edges();
        assert_eq!(d.len(), 2 * g.edge_count());
        for pair in d.chunks(2) {
            assert_eq!(pair[0].reversed(), pair[1]);
            assert_eq!(pair[1].reversed().reversed(), pair[1]);
        }
    }

    #[test]
    fn cycle_dimension_examples() {
        assert_eq!(two_cycle_graph().cycle_dimension(), 2);
        assert_eq!(five_vertex_tree().cycle_dimension(), 0);
        let k4 = complete(4);
        assert_eq!(k4.cycle_dimension(), 3);
        // co-tree edge count of any spanning tree
        assert_eq!(k4.spanning_cut_set().len(), 3);
        assert!(!cycle(3).is_tree());
        assert!(path(2).is_tree());
        assert!(five_vertex_tree().is_tree());
    }

    #[test]
    fn cut_sets_leave_trees() {
        assert!(five_vertex_tree().spanning_cut_set().is_empty());
        let g = two_cycle_graph();
        let cut = g.spanning_cut_set();
        assert_eq!(cut.len(), 2);
        assert!(g.without_edges(&cut).unwrap().is_tree());
        // the hand-picked cut is also a valid co-tree set
        assert!(g.without_edges(&two_cycle_cut()).unwrap().is_tree());
        let tri = cycle(3);
        let cut = tri.spanning_cut_set();
        assert_eq!(cut.len(), 1);
        assert!(tri.without_edges(&cut).unwrap().is_tree());
    }

    #[test]
    fn cut_set_is_deterministic_dfs_back_edges() {
        // DFS 0 -> 1 -> 2 closes the triangle with edge (0, 2).
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.spanning_cut_set(), vec![2]);
    }

    #[test]
    fn rooting_the_five_vertex_tree() {
        // 1-indexed: 1->4, 2->4, 3->5, 4->5 with root 5.
        let t = five_vertex_tree().root_tree(4).unwrap();
        assert_eq!(t.parent(0), Some(3));
        assert_eq!(t.parent(1), Some(3));
        assert_eq!(t.parent(2), Some(4));
        assert_eq!(t.parent(3), Some(4));
        assert_eq!(t.parent(4), None);
        assert_eq!(*t.topo_order().last().unwrap(), 4);
        let pos = |v| t.topo_order().iter().position(|&u| u == v).unwrap();
        for v in 0..5 {
            if let Some(p) = t.parent(v) {
                assert!(pos(v) < pos(p));
            }
        }
        assert!(t.is_below(0, 4) && t.is_below(0, 3) && !t.is_below(3, 0));
        assert_eq!(t.subtree(3).len(), 3);

        let p2 = path(2).root_tree(0).unwrap();
        assert_eq!(p2.parent(1), Some(0));
        assert_eq!(
            cycle(3).root_tree(0),
            Err(GraphError::NotATree { cycle_dimension: 1 })
        );
    }

    #[test]
    fn two_cycle_sign_pattern_counts() {
        let g = two_cycle_graph();
        let s = SignPattern::new(two_cycle_signs()).unwrap();
        assert_eq!(sign_components(&g, &s).unwrap(), 3);
        let tree = g.without_edges(&two_cycle_cut()).unwrap();
        assert_eq!(sign_components(&tree, &s).unwrap(), 5);
        let plus = SignPattern::new(vec![1; 7]).unwrap();
        assert_eq!(sign_components(&g, &plus).unwrap(), 1);
    }

    #[test]
    fn zero_sign_rejected() {
        assert_eq!(
            SignPattern::new(vec![1, 0, -1]),
            Err(GraphError::ZeroSign { vertex: 1 })
        );
        assert_eq!(
            SignPattern::from_values(&[0.3, -1e-14], 1e-12),
            Err(GraphError::ZeroSign { vertex: 1 })
        );
    }

    /// Random tree on `n` vertices by parent attachment.
    fn tree_from_parents(parents: &[usize]) -> Graph {
        let edges: Vec<_> = parents
            .iter()
            .enumerate()
            .map(|(i, &p)| (p % (i + 1), i + 1))
            .collect();
        Graph::new(parents.len() + 1, &edges).unwrap()
    }

    #[test]
    fn tree_sign_components_brute_force() {
        // Every sign pattern on every tree shape of a few sizes: j discordant
        // edges give j + 1 components.
        for n in 2..=10usize {
            let shapes: Vec<Vec<usize>> = vec![
                (0..n - 1).map(|i| i).collect(),
                vec![0; n - 1],
                (0..n - 1).map(|i| i / 2).collect(),
                (0..n - 1).map(|i| (i * 7 + 3) % (i + 1)).collect(),
            ];
            for parents in shapes {
                let g = tree_from_parents(&parents);
                for mask in 0u32..(1 << n) {
                    let signs: Vec<i8> =
                        (0..n).map(|v| if mask >> v & 1 == 1 { 1 } else { -1 }).collect();
                    let discordant = g
                        .edges()
                        .iter()
                        .filter(|&&(u, v)| signs[u] != signs[v])
                        .count();
                    let s = SignPattern::new(signs).unwrap();
                    assert_eq!(sign_components(&g, &s).unwrap(), discordant + 1);
                }
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..10)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(any::<usize>(), n - 1),
                    proptest::collection::vec((any::<usize>(), any::<usize>()), 0..6),
                )
            })
            .prop_map(|(n, parents, extra)| {
                let mut edges: Vec<_> =
                    parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
                for (a, b) in extra {
                    let (u, v) = (a % n, b % n);
                    let key = (u.min(v), u.max(v));
                    if u != v && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key) {
                        edges.push((u, v));
                    }
                }
                Graph::new(n, &edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn cut_set_leaves_connected_tree(g in arb_graph()) {
            let cut = g.spanning_cut_set();
            prop_assert_eq!(cut.len(), g.cycle_dimension());
            let t = g.without_edges(&cut).unwrap();
            prop_assert!(t.is_tree());
            prop_assert_eq!(g.cycle_dimension(), g.edge_count() + 1 - g.vertex_count());
        }

        #[test]
        fn deleting_a_cycle_edge_adds_at_most_one_domain(g in arb_graph(), mask in any::<u32>()) {
            let signs: Vec<i8> = (0..g.vertex_count())
                .map(|v| if mask >> v & 1 == 1 { 1 } else { -1 })
                .collect();
            let s = SignPattern::new(signs).unwrap();
            let before = sign_components(&g, &s).unwrap();
            for e in 0..g.edge_count() {
                if let Ok(h) = g.without_edges(&[e]) {
                    let after = sign_components(&h, &s).unwrap();
                    prop_assert!(after == before || after == before + 1);
                }
            }
        }
    }
}
