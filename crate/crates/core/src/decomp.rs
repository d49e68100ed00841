//! Splitting a network into independent subnetworks.
//!
//! The finest partition comes from the free-variable canonical kernel
//! basis of `N`: two reactions share a class when some basis vector is
//! nonzero on both. A canonical basis vector never straddles two blocks of
//! a valid product decomposition of `ker N`, so the resulting classes
//! refine every valid partition. The product property of the output is
//! re-certified by comparing kernel dimensions.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{graph_stats, star_incidence, Digraph};
use crate::network::{build_matrices, MassActionSystem};
use crate::ratlin::{kernel_basis, Rat, RatMatrix, Subspace};

/// One class of the edge partition with its own matrices and invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subnetwork {
    /// Global edge ids, ascending.
    pub edges: Vec<usize>,
    /// Global vertex ids, ascending.
    pub vertices: Vec<usize>,
    /// Global ids of the source vertices of this subgraph, ascending.
    pub sources: Vec<usize>,
    pub graph: Digraph,
    pub incidence: RatMatrix,
    pub source_incidence: RatMatrix,
    pub y: RatMatrix,
    pub y_s: RatMatrix,
    pub laplacian: RatMatrix,
    pub gamma: RatMatrix,
    pub s: Subspace,
    pub k: Subspace,
    pub l: Subspace,
    pub linkage_classes: usize,
    pub delta: usize,
    pub d: usize,
    pub t: usize,
    pub t_prime: usize,
    pub weakly_reversible: bool,
    pub kernel_dim: usize,
}

impl Subnetwork {
    pub fn connected(&self) -> bool {
        self.linkage_classes == 1
    }
}

/// Block-diagonal and concatenated matrices over the disjoint unions
/// `V⊔` and `V⊔_s`. Columns indexed by edges follow `edge_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedMatrices {
    pub edge_order: Vec<usize>,
    pub incidence: RatMatrix,
    pub source_incidence: RatMatrix,
    pub laplacian: RatMatrix,
    pub y: RatMatrix,
    pub y_s: RatMatrix,
    /// `I*_{V,s}`: maps each source vertex of the full graph to its copies.
    pub source_map: RatMatrix,
    pub gamma: RatMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub edge_partition: Vec<Vec<usize>>,
    pub subnetworks: Vec<Subnetwork>,
    pub combined: CombinedMatrices,
    pub connected_ok: bool,
    pub independent_ok: bool,
    pub kernel_dim: usize,
}

impl Decomposition {
    pub fn class_count(&self) -> usize {
        self.subnetworks.len()
    }

    /// Source-vertex counts per class, i.e. the class sizes of the
    /// combined system `Γ_k x^{Y*_s} = 0`.
    pub fn class_sizes(&self) -> Vec<usize> {
        self.subnetworks.iter().map(|s| s.sources.len()).collect()
    }

    /// `L = L₁ + ⋯ + L_ℓ`.
    pub fn monomial_difference_space(&self) -> Subspace {
        let n = self.combined.y.rows();
        Subspace::sum_all(n, &self.subnetworks.iter().map(|s| s.l.clone()).collect::<Vec<_>>())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn finest_independent_decomposition(sys: &MassActionSystem) -> Decomposition {
    let n = build_matrices(sys).stoichiometric;
    let basis = kernel_basis(&n);
    let e = n.cols();
    let mut uf = UnionFind((0..e).collect());
    for v in &basis.vectors {
        let support: Vec<usize> = (0..e).filter(|&j| !v[j].is_zero()).collect();
        for w in support.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class = vec![usize::MAX; e];
    for j in 0..e {
        let r = uf.find(j);
        if root_class[r] == usize::MAX {
            root_class[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_class[r]].push(j);
    }
    let dec = decompose_with_partition(sys, classes).expect("co-occurrence classes partition the edges");
    assert!(dec.independent_ok, "finest decomposition must certify ker N as a direct product");
    dec
}

/// Builds the decomposition for a caller-supplied edge partition. The
/// partition is not required to be independent; `independent_ok` reports
/// whether it is.
pub fn decompose_with_partition(sys: &MassActionSystem, partition: Vec<Vec<usize>>) -> Result<Decomposition> {
    let g = sys.graph();
    let e = g.edge_count();
    let mut seen = vec![false; e];
    let mut partition: Vec<Vec<usize>> = partition
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    for c in &partition {
        if c.is_empty() {
            return Err(Error::InvalidNetwork("empty edge class".into()));
        }
        for &j in c {
            if j >= e || seen[j] {
                return Err(Error::InvalidNetwork(format!("edge {j} missing or repeated in partition")));
            }
            seen[j] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidNetwork("partition does not cover every edge".into()));
    }
    partition.sort_by_key(|c| c[0]);

    let full = build_matrices(sys);
    let y_full = &full.y;
    let nspecies = y_full.rows();
    let subnetworks: Vec<Subnetwork> = partition
        .iter()
        .map(|edges| {
            let (graph, vertices) = g.edge_subgraph(edges);
            let k: Vec<Rat> = edges.iter().map(|&j| sys.rates()[j].clone()).collect();
            let (incidence, source_incidence) = graph.incidence_matrices();
            let y = y_full.select_columns(&vertices);
            let local_sources = graph.sources();
            let sources: Vec<usize> = local_sources.iter().map(|&v| vertices[v]).collect();
            let y_s = y.select_columns(&local_sources);
            let laplacian = graph.rectangular_laplacian(&k);
            let gamma = y.mul(&laplacian);
            let n_j = y.mul(&incidence);
            let s = Subspace::column_space(&n_j);
            let kk = Subspace::column_space(&gamma);
            let l = Subspace::column_space(&y_s.mul(&star_incidence(sources.len())));
            let stats = graph_stats(&graph);
            let delta = vertices.len() - stats.l - s.dim();
            let d = sources.len() - 1 - l.dim();
            Subnetwork {
                edges: edges.clone(),
                kernel_dim: kernel_basis(&n_j).dim(),
                sources,
                incidence,
                source_incidence,
                y_s,
                laplacian,
                gamma,
                s,
                k: kk,
                l,
                linkage_classes: stats.l,
                delta,
                d,
                t: stats.t,
                t_prime: stats.t_prime,
                weakly_reversible: stats.weakly_reversible,
                vertices,
                graph,
                y,
            }
        })
        .collect();

    let kernel_dim = kernel_basis(&full.stoichiometric).dim();
    let independent_ok = subnetworks.iter().map(|s| s.kernel_dim).sum::<usize>() == kernel_dim;
    let connected_ok = subnetworks.iter().all(Subnetwork::connected);
    let combined = combine(sys, &subnetworks, nspecies);
    Ok(Decomposition { edge_partition: partition, subnetworks, combined, connected_ok, independent_ok, kernel_dim })
}

fn combine(sys: &MassActionSystem, subs: &[Subnetwork], nspecies: usize) -> CombinedMatrices {
    let edge_order: Vec<usize> = subs.iter().flat_map(|s| s.edges.iter().copied()).collect();
    let incidence = RatMatrix::block_diagonal(&subs.iter().map(|s| &s.incidence).collect::<Vec<_>>());
    let source_incidence = RatMatrix::block_diagonal(&subs.iter().map(|s| &s.source_incidence).collect::<Vec<_>>());
    let laplacian = RatMatrix::block_diagonal(&subs.iter().map(|s| &s.laplacian).collect::<Vec<_>>());
    let y = RatMatrix::hstack(nspecies, &subs.iter().map(|s| &s.y).collect::<Vec<_>>());
    let y_s = RatMatrix::hstack(nspecies, &subs.iter().map(|s| &s.y_s).collect::<Vec<_>>());
    let gamma = RatMatrix::hstack(nspecies, &subs.iter().map(|s| &s.gamma).collect::<Vec<_>>());
    let global_sources = sys.graph().sources();
    let total: usize = subs.iter().map(|s| s.sources.len()).sum();
    let mut source_map = RatMatrix::zeros(global_sources.len(), total);
    let mut col = 0;
    for s in subs {
        for v in &s.sources {
            let row = global_sources.binary_search(v).expect("subgraph source is a global source");
            source_map.set(row, col, Rat::one());
            col += 1;
        }
    }
    CombinedMatrices { edge_order, incidence, source_incidence, laplacian, y, y_s, source_map, gamma }
}

/// Identities relating the whole network to its subnetworks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionChecks {
    /// `|V⊔_s| − ℓ − dim L` for the combined system.
    pub d: usize,
    pub d_sum: usize,
    /// `dim ker [Y*_s; J]`.
    pub d_via_cayley: usize,
    pub delta: usize,
    pub delta_sum: usize,
    /// `|V⊔| − |V|`.
    pub vertex_excess: usize,
    /// `ℓ − l`.
    pub class_excess: i64,
    pub incidence_kernels_equal: bool,
    pub s_direct: bool,
    pub l_direct: bool,
    pub k_in_sum_of_kj: bool,
    pub gamma_kernel_product: bool,
    pub starred_identities: bool,
}

impl DecompositionChecks {
    pub fn all_hold(&self) -> bool {
        self.d == self.d_sum
            && self.d == self.d_via_cayley
            && self.delta == self.delta_sum
            && self.vertex_excess as i64 == self.class_excess
            && self.incidence_kernels_equal
            && self.s_direct
            && self.l_direct
            && self.k_in_sum_of_kj
            && self.gamma_kernel_product
            && self.starred_identities
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.d != self.d_sum {
            out.push("d = Σ d_j");
        }
        if self.d != self.d_via_cayley {
            out.push("d = dim D");
        }
        if self.delta != self.delta_sum {
            out.push("δ = Σ δ_j");
        }
        if self.vertex_excess as i64 != self.class_excess {
            out.push("|V⊔| − |V| = ℓ − l");
        }
        if !self.incidence_kernels_equal {
            out.push("ker I_E = ker I*_E");
        }
        if !self.s_direct {
            out.push("S = ⊕ S_j");
        }
        if !self.l_direct {
            out.push("L = ⊕ L_j");
        }
        if !self.k_in_sum_of_kj {
            out.push("K ⊆ Σ K_j");
        }
        if !self.gamma_kernel_product {
            out.push("ker Γ_k = ∏ ker Γ_k^j");
        }
        if !self.starred_identities {
            out.push("Y* I*_E = Y I_E, Y*_s = Y_s I*_{V,s}");
        }
        out
    }
}

/// True when `ker m` is the product of the kernels of its column blocks.
pub fn kernel_is_block_product(m: &RatMatrix, block_sizes: &[usize]) -> bool {
    let basis = kernel_basis(m);
    let mut offset = 0;
    let mut sum = 0;
    let mut ranges = Vec::new();
    for &size in block_sizes {
        let cols: Vec<usize> = (offset..offset + size).collect();
        sum += kernel_basis(&m.select_columns(&cols)).dim();
        ranges.push(offset..offset + size);
        offset += size;
    }
    let supports_ok = basis.vectors.iter().all(|v| {
        let blocks: BTreeSet<usize> =
            (0..v.len()).filter(|&i| !v[i].is_zero()).map(|i| ranges.iter().position(|r| r.contains(&i)).unwrap()).collect();
        blocks.len() <= 1
    });
    sum == basis.dim() && supports_ok
}

pub fn decomposition_checks(sys: &MassActionSystem, dec: &Decomposition) -> Result<DecompositionChecks> {
    if !dec.connected_ok {
        return Err(Error::NotApplicable("subnetworks not connected".into()));
    }
    let full = build_matrices(sys);
    let stats = graph_stats(sys.graph());
    let ell = dec.class_count();
    let nspecies = full.y.rows();
    let c = &dec.combined;

    let l = dec.monomial_difference_space();
    let total_sources = c.y_s.cols();
    let d = total_sources - ell - l.dim();
    let d_sum = dec.subnetworks.iter().map(|s| s.d).sum();
    let mut cayley = RatMatrix::zeros(ell, total_sources);
    let mut offset = 0;
    for (j, s) in dec.subnetworks.iter().enumerate() {
        for i in 0..s.sources.len() {
            cayley.set(j, offset + i, Rat::one());
        }
        offset += s.sources.len();
    }
    let d_via_cayley = kernel_basis(&RatMatrix::vstack(total_sources, &[&c.y_s, &cayley])).dim();

    let s = Subspace::column_space(&full.stoichiometric);
    let delta = sys.graph().vertex_count() - stats.l - s.dim();
    let delta_sum = dec.subnetworks.iter().map(|s| s.delta).sum();
    let vertex_excess = c.y.cols() - sys.graph().vertex_count();
    let class_excess = ell as i64 - stats.l as i64;

    let permuted_incidence = full.incidence.select_columns(&c.edge_order);
    let incidence_kernels_equal = Subspace::span(permuted_incidence.cols(), &kernel_basis(&permuted_incidence).vectors)
        == Subspace::span(c.incidence.cols(), &kernel_basis(&c.incidence).vectors);

    let s_parts: Vec<Subspace> = dec.subnetworks.iter().map(|s| s.s.clone()).collect();
    let l_parts: Vec<Subspace> = dec.subnetworks.iter().map(|s| s.l.clone()).collect();
    let k_parts: Vec<Subspace> = dec.subnetworks.iter().map(|s| s.k.clone()).collect();
    let k = Subspace::column_space(&full.gamma);
    let k_sum = Subspace::sum_all(nspecies, &k_parts);

    let starred_identities = c.y.mul(&c.incidence) == full.stoichiometric.select_columns(&c.edge_order)
        && full.y_s.mul(&c.source_map) == c.y_s;

    Ok(DecompositionChecks {
        d,
        d_sum,
        d_via_cayley,
        delta,
        delta_sum,
        vertex_excess,
        class_excess,
        incidence_kernels_equal,
        s_direct: Subspace::is_direct_sum(&s_parts) && Subspace::sum_all(nspecies, &s_parts) == s,
        l_direct: Subspace::is_direct_sum(&l_parts),
        k_in_sum_of_kj: k.is_subspace_of(&k_sum),
        gamma_kernel_product: kernel_is_block_product(&c.gamma, &dec.class_sizes()),
        starred_identities,
    })
}
