//! Test-side oracles and random instance generators. The linear algebra
//! and graph routines here are deliberately naive and share no code with
//! the library.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crn_core::graph::Digraph;
use crn_core::network::{MassActionSystem, ReactionNetwork};
use crn_core::ratlin::RatMatrix;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank by fraction-exact Gaussian elimination on a copy of `rows`.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn rows_of(m: &RatMatrix) -> Vec<Vec<Q>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn mrank(m: &RatMatrix) -> usize {
    rank(&rows_of(m))
}

pub fn transpose(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Same row space, tested via ranks of the stacked matrix.
pub fn same_row_space(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let ra = rank(a);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    ra == rank(b) && ra == rank(&both)
}

pub fn mat_vec(rows: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Boolean reachability closure including `i → i`.
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Strong components as sorted vertex lists, plus which are terminal.
pub fn strong_components(n: usize, edges: &[(usize, usize)]) -> Vec<(Vec<usize>, bool)> {
    let r = reachability(n, edges);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| r[i][j] && r[j][i]).collect();
        comp.iter().for_each(|&j| seen[j] = true);
        let terminal = (0..n).all(|j| !r[i][j] || comp.contains(&j));
        out.push((comp, terminal));
    }
    out
}

pub fn weak_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut undirected = edges.to_vec();
    undirected.extend(edges.iter().map(|&(a, b)| (b, a)));
    let r = reachability(n, &undirected);
    (0..n).filter(|&i| (0..i).all(|j| !r[j][i])).count()
}

/// Terminal strong components `t` and those that are not a single
/// vertex without outgoing edges, `t′`.
pub fn terminal_counts(n: usize, edges: &[(usize, usize)]) -> (usize, usize) {
    let comps = strong_components(n, edges);
    let t = comps.iter().filter(|c| c.1).count();
    let t_prime = comps.iter().filter(|(c, term)| *term && !(c.len() == 1 && !edges.iter().any(|e| e.0 == c[0]))).count();
    (t, t_prime)
}

pub fn random_rate(rng: &mut impl Rng) -> Q {
    qq(rng.gen_range(1..=12), rng.gen_range(1..=12))
}

fn species(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

pub fn system(n: usize, complexes: Vec<Vec<Q>>, edges: Vec<(usize, usize)>, k: Vec<Q>) -> MassActionSystem {
    let g = Digraph::new(complexes.len(), edges).expect("valid graph");
    let net = ReactionNetwork::new(species(n), g, complexes, None).expect("valid network");
    MassActionSystem::new(net, k).expect("positive rates")
}

/// Distinct random complexes with entries in `0..=max_coeff`.
pub fn random_complexes(rng: &mut impl Rng, n: usize, count: usize, max_coeff: i64) -> Option<Vec<Vec<Q>>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let c: Vec<Q> = (0..n).map(|_| q(rng.gen_range(0..=max_coeff))).collect();
        if !out.contains(&c) {
            out.push(c);
        }
    }
    (out.len() == count).then_some(out)
}

/// A random network with `n ≤ max_species` species and `2 ≤ |V| ≤
/// max_vertices` vertices, every vertex on at least one edge.
pub fn random_network(rng: &mut impl Rng, max_species: usize, max_vertices: usize) -> MassActionSystem {
    loop {
        let n = rng.gen_range(1..=max_species);
        let v = rng.gen_range(2..=max_vertices);
        let Some(complexes) = random_complexes(rng, n, v, 3) else { continue };
        let p = rng.gen_range(0.15..0.6);
        let mut edges = Vec::new();
        for a in 0..v {
            for b in 0..v {
                if a != b && rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        if (0..v).any(|x| !edges.iter().any(|e| e.0 == x || e.1 == x)) {
            continue;
        }
        let k = edges.iter().map(|_| random_rate(rng)).collect();
        return system(n, complexes, edges, k);
    }
}

/// A random weakly connected digraph on `2..=max_vertices` vertices.
pub fn random_connected_digraph(rng: &mut impl Rng, max_vertices: usize) -> (usize, Vec<(usize, usize)>) {
    loop {
        let v = rng.gen_range(2..=max_vertices);
        let p = rng.gen_range(0.1..0.5);
        let mut edges = Vec::new();
        for a in 0..v {
            for b in 0..v {
                if a != b && rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        edges.shuffle(rng);
        if !edges.is_empty() && weak_components(v, &edges) == 1 {
            return (v, edges);
        }
    }
}

/// Columns of `N` for the given edge set, as rows of the transpose.
pub fn reaction_vectors(complexes: &[Vec<Q>], edges: &[(usize, usize)]) -> Vec<Vec<Q>> {
    edges.iter().map(|&(a, b)| complexes[b].iter().zip(&complexes[a]).map(|(x, y)| x - y).collect()).collect()
}

/// No proper split `E = E₁ ⊔ E₂` with `r(E₁) + r(E₂) = r(E)`, i.e. the
/// kernel of `N` restricted to these edges is not a direct product.
pub fn kernel_indecomposable(vectors: &[Vec<Q>]) -> bool {
    let m = vectors.len();
    if m <= 1 {
        return true;
    }
    let full = rank(vectors);
    for mask in 1..(1u32 << (m - 1)) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, v) in vectors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.push(v.clone())
            } else {
                b.push(v.clone())
            }
        }
        let ra = if a.is_empty() { 0 } else { rank(&a) };
        let rb = if b.is_empty() { 0 } else { rank(&b) };
        if ra + rb == full {
            return false;
        }
    }
    true
}

pub fn crn_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_crn"))
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn run_crn(args: &[&str]) -> Output {
    Command::new(crn_bin()).args(args).env_remove("CRN_SEED").output().expect("crn binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("UTF-8 output")
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub fn one() -> Q {
    Q::one()
}
