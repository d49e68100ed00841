//! Reaction networks with mass-action kinetics and their structural
//! matrices and subspaces.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{graph_stats, star_incidence, Digraph};
use crate::ratlin::{fmt_rat, kernel_basis, to_f64, Rat, RatMatrix, Subspace};

/// A digraph whose vertices are labelled with complexes `y(i) ∈ Qⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    graph: Digraph,
    complexes: Vec<Vec<Rat>>,
    edge_labels: Vec<String>,
}

/// Default rate-constant label for the edge `tail -> head` (0-based),
/// written with 1-based vertex numbers: `k12`, or `k10_11` once any index
/// has two digits.
pub fn default_edge_label(tail: usize, head: usize) -> String {
    let (a, b) = (tail + 1, head + 1);
    if a < 10 && b < 10 {
        format!("k{a}{b}")
    } else {
        format!("k{a}_{b}")
    }
}

impl ReactionNetwork {
    pub fn new(
        species: Vec<String>,
        graph: Digraph,
        complexes: Vec<Vec<Rat>>,
        edge_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if species.is_empty() {
            return Err(Error::InvalidNetwork("at least one species required".into()));
        }
        if graph.vertex_count() < 2 {
            return Err(Error::InvalidNetwork("at least two vertices required".into()));
        }
        if graph.edge_count() == 0 {
            return Err(Error::InvalidNetwork("at least one reaction required".into()));
        }
        if complexes.len() != graph.vertex_count() {
            return Err(Error::InvalidNetwork(format!(
                "{} complexes for {} vertices",
                complexes.len(),
                graph.vertex_count()
            )));
        }
        if let Some(bad) = complexes.iter().position(|c| c.len() != species.len()) {
            return Err(Error::InvalidNetwork(format!("complex {} has wrong length", bad + 1)));
        }
        let edge_labels = match edge_labels {
            Some(labels) => {
                if labels.len() != graph.edge_count() {
                    return Err(Error::InvalidNetwork("one label per reaction required".into()));
                }
                labels
            }
            None => graph.edges().iter().map(|&(a, b)| default_edge_label(a, b)).collect(),
        };
        for (i, l) in edge_labels.iter().enumerate() {
            if edge_labels[..i].contains(l) {
                return Err(Error::InvalidNetwork(format!("duplicate reaction label `{l}`")));
            }
        }
        Ok(Self { species, graph, complexes, edge_labels })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn complexes(&self) -> &[Vec<Rat>] {
        &self.complexes
    }

    pub fn edge_labels(&self) -> &[String] {
        &self.edge_labels
    }

    /// `Y`, one column per vertex.
    pub fn complex_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.species.len(), &self.complexes)
    }

    /// `Y_s`, one column per source vertex (ascending).
    pub fn source_complex_matrix(&self) -> RatMatrix {
        self.complex_matrix().select_columns(&self.graph.sources())
    }

    /// Pairs of distinct vertices carrying the same complex.
    pub fn repeated_complexes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.complexes.len() {
            for j in i + 1..self.complexes.len() {
                if self.complexes[i] == self.complexes[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Human-readable complex, e.g. `2 X1 + 1/2 X2` or `0`.
    pub fn complex_label(&self, v: usize) -> String {
        let terms: Vec<String> = self.complexes[v]
            .iter()
            .zip(&self.species)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| if *c == Rat::from_integer(1.into()) { s.clone() } else { format!("{} {}", fmt_rat(c), s) })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// A reaction network with a positive rate constant on every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassActionSystem {
    network: ReactionNetwork,
    k: Vec<Rat>,
}

impl MassActionSystem {
    pub fn new(network: ReactionNetwork, k: Vec<Rat>) -> Result<Self> {
        if k.len() != network.graph.edge_count() {
            return Err(Error::InvalidNetwork("one rate constant per reaction required".into()));
        }
        if let Some(i) = k.iter().position(|x| !x.is_positive()) {
            return Err(Error::InvalidNetwork(format!("rate constant `{}` must be positive", network.edge_labels[i])));
        }
        Ok(Self { network, k })
    }

    pub fn network(&self) -> &ReactionNetwork {
        &self.network
    }

    pub fn graph(&self) -> &Digraph {
        &self.network.graph
    }

    pub fn rates(&self) -> &[Rat] {
        &self.k
    }

    /// Returns a copy with the named rate constants replaced.
    pub fn with_rates(&self, overrides: &[(String, Rat)]) -> Result<Self> {
        let mut k = self.k.clone();
        for (name, value) in overrides {
            let idx = self
                .network
                .edge_labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::InvalidNetwork(format!("unknown rate constant `{name}`")))?;
            k[idx] = value.clone();
        }
        Self::new(self.network.clone(), k)
    }
}

/// `Y`, `Y_s`, `I_E`, `I_{E,s}`, `N = Y I_E`, `R_k` and `Γ_k = Y R_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkMatrices {
    pub y: RatMatrix,
    pub y_s: RatMatrix,
    pub incidence: RatMatrix,
    pub source_incidence: RatMatrix,
    pub stoichiometric: RatMatrix,
    pub laplacian: RatMatrix,
    pub gamma: RatMatrix,
}

pub fn build_matrices(sys: &MassActionSystem) -> NetworkMatrices {
    let g = sys.graph();
    let y = sys.network.complex_matrix();
    let y_s = sys.network.source_complex_matrix();
    let (incidence, source_incidence) = g.incidence_matrices();
    let stoichiometric = y.mul(&incidence);
    let laplacian = g.rectangular_laplacian(&sys.k);
    let gamma = y.mul(&laplacian);
    NetworkMatrices { y, y_s, incidence, source_incidence, stoichiometric, laplacian, gamma }
}

/// Structural invariants of the undecomposed network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub matrices: NetworkMatrices,
    /// Stoichiometric subspace `S = im N`.
    pub s: Subspace,
    /// Kinetic subspace `K = im Γ_k`.
    pub k: Subspace,
    /// Monomial difference subspace of the source complexes.
    pub l: Subspace,
    pub vertex_count: usize,
    pub source_count: usize,
    /// Deficiency `|V| − l − dim S`.
    pub delta: usize,
    /// Monomial dependency `|V_s| − 1 − dim L`.
    pub d: usize,
    /// `dim ker [Y_s; 1ᵀ]`, the Cayley-matrix route to `d`.
    pub d_via_cayley: usize,
    pub linkage_classes: usize,
    pub t: usize,
    pub t_prime: usize,
    pub weakly_reversible: bool,
    pub dim_ker_laplacian: usize,
    pub k_equals_s: bool,
    pub l_equals_s: bool,
    pub k_equals_l: bool,
    pub repeated_complexes: Vec<(usize, usize)>,
}

pub fn structural_report(sys: &MassActionSystem) -> StructuralReport {
    let matrices = build_matrices(sys);
    let stats = graph_stats(sys.graph());
    let n = sys.network.species_count();
    let vertex_count = sys.graph().vertex_count();
    let source_count = matrices.y_s.cols();

    let s = Subspace::column_space(&matrices.stoichiometric);
    let k = Subspace::column_space(&matrices.gamma);
    let l = Subspace::column_space(&matrices.y_s.mul(&star_incidence(source_count)));
    let cayley = RatMatrix::vstack(
        source_count,
        &[&matrices.y_s, &RatMatrix::from_rows(source_count, &[vec![Rat::from_integer(1.into()); source_count]])],
    );
    let d_via_cayley = kernel_basis(&cayley).dim();

    let delta = vertex_count - stats.l - s.dim();
    let d = source_count - 1 - l.dim();
    debug_assert_eq!(d, d_via_cayley);
    debug_assert!(k.is_subspace_of(&s));
    debug_assert_eq!(s.ambient(), n);

    let dim_ker_laplacian = kernel_basis(&matrices.laplacian).dim();
    StructuralReport {
        k_equals_s: k == s,
        l_equals_s: l == s,
        k_equals_l: k == l,
        s,
        k,
        l,
        vertex_count,
        source_count,
        delta,
        d,
        d_via_cayley,
        linkage_classes: stats.l,
        t: stats.t,
        t_prime: stats.t_prime,
        weakly_reversible: stats.weakly_reversible,
        dim_ker_laplacian,
        repeated_complexes: sys.network.repeated_complexes(),
        matrices,
    }
}

/// Monomials `x^{y}` for every column `y` of `exponents`.
pub fn monomials(exponents: &RatMatrix, x: &[f64]) -> Vec<f64> {
    let logx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    (0..exponents.cols())
        .map(|j| (0..exponents.rows()).map(|i| to_f64(exponents.get(i, j)) * logx[i]).sum::<f64>().exp())
        .collect()
}

pub fn mat_vec_f64(m: &RatMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows()).map(|i| m.row(i).iter().zip(v).map(|(a, b)| to_f64(a) * b).sum()).collect()
}

/// Right-hand side `Γ_k x^{Y_s}` of the mass-action ODE.
pub fn evaluate_vector_field(sys: &MassActionSystem, x: &[f64]) -> Result<Vec<f64>> {
    let n = sys.network.species_count();
    if x.len() != n {
        return Err(Error::Dimension(format!("expected {n} concentrations, got {}", x.len())));
    }
    if x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositive("concentrations must be positive".into()));
    }
    let m = build_matrices(sys);
    Ok(mat_vec_f64(&m.gamma, &monomials(&m.y_s, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, reversible_pair, unit};
    use crate::ratlin::ri;

    #[test]
    fn reversible_pair_matrices() {
        let sys = reversible_pair();
        let m = build_matrices(&sys);
        assert_eq!(m.stoichiometric, RatMatrix::from_i64(&[&[-1, 1], &[1, -1]]));
        assert_eq!(m.gamma, m.stoichiometric);
        let r = structural_report(&sys);
        assert_eq!((r.delta, r.d), (0, 0));
        assert!(r.k_equals_s && r.l_equals_s && r.k_equals_l);
    }

    #[test]
    fn reversible_pair_vector_field_vanishes_on_diagonal() {
        let f = evaluate_vector_field(&reversible_pair(), &[2.5, 2.5]).unwrap();
        assert!(f.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn vector_field_rejects_nonpositive() {
        assert!(evaluate_vector_field(&reversible_pair(), &[0.0, 1.0]).is_err());
        assert!(evaluate_vector_field(&reversible_pair(), &[1.0]).is_err());
    }

    #[test]
    fn default_labels() {
        assert_eq!(default_edge_label(0, 4), "k15");
        assert_eq!(default_edge_label(9, 1), "k10_2");
    }

    #[test]
    fn rejects_nonpositive_rates() {
        let sys = reversible_pair();
        assert!(MassActionSystem::new(sys.network().clone(), vec![ri(1), ri(0)]).is_err());
        assert!(sys.with_rates(&[("k12".into(), ri(-1))]).is_err());
        assert!(sys.with_rates(&[("nope".into(), ri(1))]).is_err());
    }

    #[test]
    fn complex_labels() {
        let sys = reversible_pair();
        assert_eq!(sys.network().complex_label(0), "X1");
    }

    #[test]
    fn path_network_counts() {
        let sys = catalog::deficiency_two_path(unit());
        let m = build_matrices(&sys);
        assert_eq!(m.gamma, RatMatrix::from_i64(&[&[1, 1, -1, 1], &[1, -1, 0, 0]]));
        assert_eq!(m.y_s, RatMatrix::from_i64(&[&[0, 2, 3, 1], &[0, 1, 0, 1]]));
        let r = structural_report(&sys);
        assert_eq!((r.vertex_count, r.linkage_classes, r.s.dim(), r.delta), (5, 1, 2, 2));
        assert_eq!((r.source_count, r.l.dim(), r.d, r.d_via_cayley), (4, 2, 1, 1));
    }

    #[test]
    fn path_network_vector_field_at_ones() {
        let f = evaluate_vector_field(&catalog::deficiency_two_path(unit()), &[1.0, 1.0]).unwrap();
        assert_eq!(f, vec![2.0, 0.0]);
    }

    #[test]
    fn singleton_terminals_counts() {
        let sys = catalog::two_singleton_terminals(unit());
        assert_eq!(build_matrices(&sys).gamma, RatMatrix::from_i64(&[&[0, 0, 1], &[1, 1, -1]]));
        let r = structural_report(&sys);
        assert_eq!((r.delta, r.d, r.source_count), (2, 0, 3));
    }

    #[test]
    fn two_terminal_counts() {
        let r = structural_report(&catalog::two_terminal_components(unit()));
        assert_eq!((r.linkage_classes, r.t, r.t_prime, r.delta, r.d), (1, 2, 1, 2, 1));
        assert!(r.k.is_subspace_of(&r.s));
    }
}
