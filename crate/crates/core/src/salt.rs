//! Partial-sum certificate for a terminal strong component.
//!
//! Orders the vertices by the kernel vector `q̂` of the rectangular
//! Laplacian supported on `T` and checks the prefix sums of
//! `β = R_k 1` along that order.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{graph_stats, Digraph};
use crate::ratlin::{kernel_basis, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaltCertificate {
    /// The terminal component, ascending.
    pub terminal: Vec<usize>,
    /// All vertices, `T` first by descending `q̂` (ties by index), then the
    /// rest ascending.
    pub ordering: Vec<usize>,
    /// `q̂` indexed by vertex, zero off `T`, maximum entry one.
    pub q_hat: Vec<Rat>,
    /// `β = R_k 1_{V_s}`, indexed by vertex.
    pub beta: Vec<Rat>,
    /// Prefix sums of `β` along `ordering`, for the first `|T|` positions.
    pub partial_sums: Vec<Rat>,
    /// Positions `i < t` (zero-based) where `q̂` strictly descends.
    pub strict_positions: Vec<usize>,
    pub t_equals_v: bool,
    pub nonnegative_ok: bool,
    pub strict_ok: bool,
    pub total_ok: bool,
}

impl SaltCertificate {
    pub fn holds(&self) -> bool {
        self.nonnegative_ok && self.strict_ok && self.total_ok
    }
}

pub fn salt_certificate(g: &Digraph, k: &[Rat], terminal: &[usize]) -> Result<SaltCertificate> {
    if k.len() != g.edge_count() {
        return Err(Error::Dimension(format!("expected {} rates, got {}", g.edge_count(), k.len())));
    }
    if k.iter().any(|x| !x.is_positive()) {
        return Err(Error::NonPositive("rate constants must be positive".into()));
    }
    if g.components().len() != 1 {
        return Err(Error::Salt("graph must have exactly one component".into()));
    }
    let mut t_set = terminal.to_vec();
    t_set.sort_unstable();
    let stats = graph_stats(g);
    if !stats.terminal_sccs.iter().any(|c| {
        let mut c = c.clone();
        c.sort_unstable();
        c == t_set
    }) {
        return Err(Error::Salt(format!("{t_set:?} is not a terminal strong component")));
    }
    let positions = g.source_positions();
    let t_cols: Vec<usize> = match t_set.iter().map(|&v| positions[v]).collect::<Option<Vec<_>>>() {
        Some(cols) => cols,
        None => return Err(Error::Salt("terminal component is a non-source singleton".into())),
    };

    let laplacian = g.rectangular_laplacian(k);
    let kernel = kernel_basis(&laplacian.select_columns(&t_cols));
    assert_eq!(kernel.dim(), 1, "a terminal strong component contributes one kernel dimension");
    let mut gen = kernel.vectors[0].clone();
    if gen.iter().any(Signed::is_negative) {
        gen.iter_mut().for_each(|x| *x = -x.clone());
    }
    assert!(gen.iter().all(Signed::is_positive), "the kernel generator is positive on T");
    let max = gen.iter().max().cloned().expect("nonempty component");
    let n = g.vertex_count();
    let mut q_hat = vec![Rat::zero(); n];
    for (&v, x) in t_set.iter().zip(&gen) {
        q_hat[v] = x / &max;
    }
    let mut padded = vec![Rat::zero(); laplacian.cols()];
    for (&v, &col) in t_set.iter().zip(&t_cols) {
        padded[col] = q_hat[v].clone();
    }
    assert!(laplacian.mul_vec(&padded).iter().all(Zero::is_zero));

    let beta = laplacian.mul_vec(&vec![Rat::one(); laplacian.cols()]);
    let mut ordering = t_set.clone();
    ordering.sort_by(|&a, &b| q_hat[b].cmp(&q_hat[a]).then(a.cmp(&b)));
    ordering.extend((0..n).filter(|v| t_set.binary_search(v).is_err()));

    let t = t_set.len();
    let mut partial_sums = Vec::with_capacity(t);
    let mut acc = Rat::zero();
    for &v in &ordering[..t] {
        acc += &beta[v];
        partial_sums.push(acc.clone());
    }
    let strict_positions: Vec<usize> =
        (0..t.saturating_sub(1)).filter(|&i| q_hat[ordering[i]] > q_hat[ordering[i + 1]]).collect();
    let t_equals_v = t == n;
    let nonnegative_ok = partial_sums.iter().all(|s| !s.is_negative());
    let strict_ok = strict_positions.iter().all(|&i| partial_sums[i].is_positive());
    let total_ok = partial_sums[t - 1].is_zero() == t_equals_v;
    let cert = SaltCertificate {
        terminal: t_set,
        ordering,
        q_hat,
        beta,
        partial_sums,
        strict_positions,
        t_equals_v,
        nonnegative_ok,
        strict_ok,
        total_ok,
    };
    if !cert.holds() {
        return Err(Error::Salt(format!("partial-sum claims violated: {cert:?}")));
    }
    Ok(cert)
}

/// Certificates for every terminal component that contains a source
/// vertex.
pub fn all_certificates(g: &Digraph, k: &[Rat]) -> Result<Vec<SaltCertificate>> {
    let positions = g.source_positions();
    graph_stats(g)
        .terminal_sccs
        .iter()
        .filter(|c| c.iter().all(|&v| positions[v].is_some()))
        .map(|c| salt_certificate(g, k, c))
        .collect()
}
