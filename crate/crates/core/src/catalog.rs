//! Small reference networks used in tests, docs and the CLI self-checks.
//!
//! Vertices are numbered so that the default rate labels come out as
//! `k14`, `k42`, ... .

use crate::graph::Digraph;
use crate::network::{MassActionSystem, ReactionNetwork};
use crate::ratlin::{ri, rvec, Rat};

fn two_species() -> Vec<String> {
    vec!["X1".into(), "X2".into()]
}

fn build(complexes: &[[i64; 2]], edges: &[(usize, usize)], k: Vec<Rat>) -> MassActionSystem {
    let g = Digraph::new(complexes.len(), edges.to_vec()).expect("catalog graph is simple");
    let ys = complexes.iter().map(|c| rvec(c)).collect();
    let net = ReactionNetwork::new(two_species(), g, ys, None).expect("catalog network is valid");
    MassActionSystem::new(net, k).expect("catalog rates are positive")
}

/// `0 → X1+X2 → 2X1+X2 → 3X1 → 2X1`: deficiency two, one singleton
/// terminal component. Rates in edge order `k14, k42, k23, k35`.
pub fn deficiency_two_path(k: [Rat; 4]) -> MassActionSystem {
    build(&[[0, 0], [2, 1], [3, 0], [1, 1], [2, 0]], &[(0, 3), (3, 1), (1, 2), (2, 4)], k.to_vec())
}

/// `0 ← X1 ⇄ X1+X2 → X2 ⇄ 3X1`. Rates in edge order
/// `k12, k21, k23, k34, k43, k15`.
pub fn two_terminal_components(k: [Rat; 6]) -> MassActionSystem {
    build(
        &[[1, 0], [1, 1], [0, 1], [3, 0], [0, 0]],
        &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (0, 4)],
        k.to_vec(),
    )
}

/// `X2 ← X1 ⇄ 2X1 → 3X1+X2 → 4X1`: two singleton terminal components.
/// Rates in edge order `k21, k23, k32, k34, k45`.
pub fn two_singleton_terminals(k: [Rat; 5]) -> MassActionSystem {
    build(&[[0, 1], [1, 0], [2, 0], [3, 1], [4, 0]], &[(1, 0), (1, 2), (2, 1), (2, 3), (3, 4)], k.to_vec())
}

/// `X1 ⇄ X2` with unit rates.
pub fn reversible_pair() -> MassActionSystem {
    build(&[[1, 0], [0, 1]], &[(0, 1), (1, 0)], vec![ri(1), ri(1)])
}

pub fn unit<const N: usize>() -> [Rat; N] {
    std::array::from_fn(|_| ri(1))
}
