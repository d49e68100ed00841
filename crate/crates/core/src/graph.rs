//! Directed reaction graphs: incidence and source matrices, linkage
//! classes, strong components, and the rectangular Laplacian.

use std::collections::{BTreeSet, VecDeque};

use num_traits::One;

use crate::error::{Error, Result};
use crate::ratlin::{kernel_basis, Rat, RatMatrix};

/// Simple digraph on vertices `0..vertex_count`; edge order is significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidNetwork(format!("edge {a}->{b} out of range")));
            }
            if a == b {
                return Err(Error::InvalidNetwork(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidNetwork(format!("duplicate edge {a}->{b}")));
            }
        }
        Ok(Self { vertex_count, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    /// Source vertices (positive out-degree) in ascending order.
    pub fn sources(&self) -> Vec<usize> {
        let tails: BTreeSet<usize> = self.edges.iter().map(|e| e.0).collect();
        tails.into_iter().collect()
    }

    /// Position of each vertex in [`Digraph::sources`], if it is a source.
    pub fn source_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.vertex_count];
        for (i, s) in self.sources().into_iter().enumerate() {
            pos[s] = Some(i);
        }
        pos
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
        }
        adj
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components of the underlying undirected graph, each sorted,
    /// ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbours();
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Strongly connected components (Tarjan), each sorted, ordered by
    /// smallest vertex.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        let adj = self.successors();
        let mut t = Tarjan {
            adj: &adj,
            counter: 0,
            index: vec![None; self.vertex_count],
            low: vec![0; self.vertex_count],
            on_stack: vec![false; self.vertex_count],
            stack: Vec::new(),
            comps: Vec::new(),
        };
        for v in 0..self.vertex_count {
            if t.index[v].is_none() {
                t.visit(v);
            }
        }
        let mut comps = t.comps;
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// `I_E` (|V| × |E|) and `I_{E,s}` (|V_s| × |E|).
    pub fn incidence_matrices(&self) -> (RatMatrix, RatMatrix) {
        let pos = self.source_positions();
        let n_src = self.sources().len();
        let mut ie = RatMatrix::zeros(self.vertex_count, self.edges.len());
        let mut ies = RatMatrix::zeros(n_src, self.edges.len());
        for (j, &(a, b)) in self.edges.iter().enumerate() {
            ie.set(a, j, -Rat::one());
            ie.set(b, j, Rat::one());
            ies.set(pos[a].expect("tail is a source"), j, Rat::one());
        }
        (ie, ies)
    }

    /// `R_k = I_E diag(k) I_{E,s}ᵀ`, of size |V| × |V_s|.
    pub fn rectangular_laplacian(&self, k: &[Rat]) -> RatMatrix {
        assert_eq!(k.len(), self.edges.len(), "one rate constant per edge");
        let pos = self.source_positions();
        let mut r = RatMatrix::zeros(self.vertex_count, self.sources().len());
        for (&(a, b), kk) in self.edges.iter().zip(k) {
            let col = pos[a].expect("tail is a source");
            let v = r.get(b, col) + kk;
            r.set(b, col, v);
            let v = r.get(a, col) - kk;
            r.set(a, col, v);
        }
        r
    }

    /// Subgraph induced by a subset of edges; vertices are relabelled by
    /// ascending global index. Returns the subgraph and the global ids of
    /// its vertices.
    pub fn edge_subgraph(&self, edge_ids: &[usize]) -> (Digraph, Vec<usize>) {
        let verts: BTreeSet<usize> = edge_ids.iter().flat_map(|&e| [self.edges[e].0, self.edges[e].1]).collect();
        let verts: Vec<usize> = verts.into_iter().collect();
        let local = |g: usize| verts.binary_search(&g).expect("vertex in subgraph");
        let edges = edge_ids.iter().map(|&e| (local(self.edges[e].0), local(self.edges[e].1))).collect();
        (Digraph { vertex_count: verts.len(), edges }, verts)
    }
}

struct Tarjan<'a> {
    adj: &'a [Vec<usize>],
    counter: usize,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.index[v] = Some(self.counter);
        self.low[v] = self.counter;
        self.counter += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for &w in &self.adj[v] {
            match self.index[w] {
                None => {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                }
                Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(self.low[v]) == self.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = self.stack.pop().expect("tarjan stack");
                self.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            self.comps.push(comp);
        }
    }
}

/// Linkage-class and strong-component counts of a digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Number of (weakly) connected components.
    pub l: usize,
    /// Number of terminal strong components.
    pub t: usize,
    /// Terminal strong components other than non-source singletons.
    pub t_prime: usize,
    pub sccs: Vec<Vec<usize>>,
    pub terminal_sccs: Vec<Vec<usize>>,
    pub weakly_reversible: bool,
}

pub fn graph_stats(g: &Digraph) -> GraphStats {
    let sccs = g.strong_components();
    let mut scc_of = vec![0; g.vertex_count()];
    for (i, c) in sccs.iter().enumerate() {
        for &v in c {
            scc_of[v] = i;
        }
    }
    let mut has_exit = vec![false; sccs.len()];
    for &(a, b) in g.edges() {
        if scc_of[a] != scc_of[b] {
            has_exit[scc_of[a]] = true;
        }
    }
    let terminal_sccs: Vec<Vec<usize>> =
        sccs.iter().enumerate().filter(|(i, _)| !has_exit[*i]).map(|(_, c)| c.clone()).collect();
    let t = terminal_sccs.len();
    let t_prime = terminal_sccs.iter().filter(|c| !(c.len() == 1 && g.out_degree(c[0]) == 0)).count();
    let l = g.components().len();
    let (ie, _) = g.incidence_matrices();
    debug_assert_eq!(kernel_basis(&ie.transpose()).dim(), l, "dim ker I_Eᵀ = l");
    let weakly_reversible = sccs.len() == l;
    GraphStats { l, t, t_prime, sccs, terminal_sccs, weakly_reversible }
}

/// Incidence matrix (rows indexed by `subset`, in the given order) of a BFS
/// spanning tree of `subset` in the underlying undirected graph, rooted at
/// the lowest vertex. Tree edges are oriented parent → child.
pub fn auxiliary_incidence(g: &Digraph, subset: &[usize]) -> Result<RatMatrix> {
    let n = subset.len();
    if n == 0 {
        return Ok(RatMatrix::zeros(0, 0));
    }
    let local = |v: usize| subset.iter().position(|&s| s == v);
    let adj = g.neighbours();
    let root = *subset.iter().min().expect("non-empty subset");
    let mut visited = vec![false; n];
    visited[local(root).expect("root in subset")] = true;
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if let Some(lw) = local(w) {
                if !visited[lw] {
                    visited[lw] = true;
                    tree.push((local(v).expect("in subset"), lw));
                    queue.push_back(w);
                }
            }
        }
    }
    if tree.len() + 1 != n {
        return Err(Error::AuxiliaryDisconnected);
    }
    let mut m = RatMatrix::zeros(n, tree.len());
    for (j, (a, b)) in tree.into_iter().enumerate() {
        m.set(a, j, -Rat::one());
        m.set(b, j, Rat::one());
    }
    Ok(m)
}

/// Incidence matrix of a star on `n` vertices rooted at the last one:
/// `[id_{n-1}; -1ᵀ]`.
pub fn star_incidence(n: usize) -> RatMatrix {
    if n == 0 {
        return RatMatrix::zeros(0, 0);
    }
    let mut m = RatMatrix::zeros(n, n - 1);
    for i in 0..n - 1 {
        m.set(i, i, Rat::one());
        m.set(n - 1, i, -Rat::one());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{ri, Subspace};
    use num_traits::Zero;

    fn example_two() -> Digraph {
        // Vertices 0..5 are y(1)..y(5); edges 1->2, 2->1, 2->3, 3->4, 4->3, 1->5.
        Digraph::new(5, vec![(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (0, 4)]).unwrap()
    }

    #[test]
    fn single_edge_incidence() {
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let (ie, ies) = g.incidence_matrices();
        assert_eq!(ie, RatMatrix::from_i64(&[&[-1], &[1]]));
        assert_eq!(ies, RatMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn reversible_pair_incidence() {
        let g = Digraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let (ie, ies) = g.incidence_matrices();
        assert_eq!(ie, RatMatrix::from_i64(&[&[-1, 1], &[1, -1]]));
        assert_eq!(ies, RatMatrix::identity(2));
    }

    #[test]
    fn example_two_incidence_columns() {
        let (ie, _) = example_two().incidence_matrices();
        for j in 0..ie.cols() {
            let col = ie.column(j);
            assert_eq!(col.iter().filter(|x| **x == ri(-1)).count(), 1);
            assert_eq!(col.iter().filter(|x| **x == ri(1)).count(), 1);
            assert!(col.iter().sum::<Rat>().is_zero());
        }
    }

    #[test]
    fn example_two_stats() {
        let s = graph_stats(&example_two());
        assert_eq!((s.l, s.t, s.t_prime), (1, 2, 1));
        assert!(!s.weakly_reversible);
    }

    #[test]
    fn example_one_stats() {
        // Path y(1) -> y(4) -> y(2) -> y(3) -> y(5), vertices 0-based.
        let g = Digraph::new(5, vec![(0, 3), (3, 1), (1, 2), (2, 4)]).unwrap();
        let s = graph_stats(&g);
        assert_eq!((s.l, s.t, s.t_prime), (1, 1, 0));
        assert_eq!(s.terminal_sccs, vec![vec![4]]);
    }

    #[test]
    fn cycle_is_weakly_reversible() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = graph_stats(&g);
        assert_eq!((s.l, s.t, s.t_prime), (1, 1, 1));
        assert!(s.weakly_reversible);
    }

    #[test]
    fn rejects_non_simple_graphs() {
        assert!(Digraph::new(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(Digraph::new(2, vec![(1, 1)]).is_err());
        assert!(Digraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn auxiliary_tree_of_reversible_pair() {
        let g = Digraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(auxiliary_incidence(&g, &[0, 1]).unwrap(), RatMatrix::from_i64(&[&[-1], &[1]]));
    }

    #[test]
    fn auxiliary_tree_preserves_image() {
        for n in [3usize, 4] {
            let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let g = Digraph::new(n, edges).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let aux = auxiliary_incidence(&g, &all).unwrap();
            let (ie, _) = g.incidence_matrices();
            assert_eq!(aux.cols(), n - 1);
            assert_eq!(aux.rank(), n - 1);
            assert_eq!(ie.rank(), n - 1);
            assert_eq!(Subspace::column_space(&aux), Subspace::column_space(&ie));
        }
    }

    #[test]
    fn auxiliary_tree_rejects_disconnected_subset() {
        let g = Digraph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(auxiliary_incidence(&g, &[0, 1, 2, 3]), Err(Error::AuxiliaryDisconnected));
    }

    #[test]
    fn laplacian_matches_index_formula() {
        let g = example_two();
        let k: Vec<Rat> = (1..=6).map(ri).collect();
        let r = g.rectangular_laplacian(&k);
        let (ie, ies) = g.incidence_matrices();
        let mut diag = RatMatrix::zeros(6, 6);
        for (i, kk) in k.iter().enumerate() {
            diag.set(i, i, kk.clone());
        }
        assert_eq!(r, ie.mul(&diag).mul(&ies.transpose()));
        // (R_k)_{i,j} = k_{j->i}: column of source 0 has k(0->1)=1 at row 1.
        assert_eq!(*r.get(1, 0), ri(1));
        assert_eq!(*r.get(0, 0), ri(-7));
    }
}
