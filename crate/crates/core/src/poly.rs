//! Parametrized polynomial systems `A (c ∘ x^B) = 0` split into classes.
//!
//! A class is a block of columns on which `ker A` factors as a direct
//! product. Within each class the monomials are compared against the last
//! column, which gives the monomial difference matrix `M = B I`, its image
//! `L`, and the dependency count `d = m − ℓ − dim L`.

use num_traits::{One, Signed, Zero};

use crate::decomp::{kernel_is_block_product, Decomposition};
use crate::error::{Error, Result};
use crate::graph::star_incidence;
use crate::network::mat_vec_f64;
use crate::ratlin::{
    g_inverse, kernel_basis, normalize_sum, strictly_positive_kernel_point, to_f64, KernelBasis, Rat, RatMatrix,
    Subspace,
};

#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    a: RatMatrix,
    b: RatMatrix,
    class_sizes: Vec<usize>,
    c: Vec<f64>,
}

impl PolySystem {
    pub fn new(a: RatMatrix, b: RatMatrix, class_sizes: Vec<usize>, c: Vec<f64>) -> Result<Self> {
        let m = a.cols();
        if b.cols() != m || c.len() != m {
            return Err(Error::Dimension(format!(
                "A has {m} columns, B has {}, c has {} entries",
                b.cols(),
                c.len()
            )));
        }
        if class_sizes.iter().any(|&s| s == 0) || class_sizes.iter().sum::<usize>() != m {
            return Err(Error::Dimension("class sizes must be positive and sum to the column count".into()));
        }
        if c.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositive("coefficients must be positive".into()));
        }
        Ok(Self { a, b, class_sizes, c })
    }

    /// The system `Γ_k x^{Y*_s} = 0` of a decomposed mass-action network,
    /// with unit coefficients.
    pub fn from_decomposition(dec: &Decomposition) -> Self {
        let m = dec.combined.gamma.cols();
        Self::new(dec.combined.gamma.clone(), dec.combined.y_s.clone(), dec.class_sizes(), vec![1.0; m])
            .expect("combined matrices are consistent")
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &RatMatrix {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn with_coefficients(&self, c: Vec<f64>) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.class_sizes.clone(), c)
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_count(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn species_count(&self) -> usize {
        self.b.rows()
    }

    pub fn class_columns(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.class_sizes[..j].iter().sum();
        start..start + self.class_sizes[j]
    }

    fn class_indices(&self, j: usize) -> Vec<usize> {
        self.class_columns(j).collect()
    }

    pub fn class_a(&self, j: usize) -> RatMatrix {
        self.a.select_columns(&self.class_indices(j))
    }

    pub fn class_b(&self, j: usize) -> RatMatrix {
        self.b.select_columns(&self.class_indices(j))
    }

    pub fn class_c(&self, j: usize) -> &[f64] {
        &self.c[self.class_columns(j)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialStructure {
    /// Block star incidence, `m × (m − ℓ)`.
    pub star: RatMatrix,
    /// Monomial difference matrix `M = B I`.
    pub m: RatMatrix,
    pub l: Subspace,
    pub d: usize,
    /// Cayley matrix `J`, one indicator row per class.
    pub cayley: RatMatrix,
    /// `𝓑 = [B; J]`.
    pub bcal: RatMatrix,
    /// `D = ker 𝓑`.
    pub dependency: KernelBasis,
    /// Exponentiation matrix `E = I M*`, `m × n`.
    pub e: RatMatrix,
}

pub fn monomial_structure(sys: &PolySystem) -> Result<MonomialStructure> {
    if !kernel_is_block_product(&sys.a, &sys.class_sizes) {
        return Err(Error::NotClassDecomposed);
    }
    let m_total = sys.a.cols();
    let ell = sys.class_count();
    let stars: Vec<RatMatrix> = sys.class_sizes.iter().map(|&s| star_incidence(s)).collect();
    let star = RatMatrix::block_diagonal(&stars.iter().collect::<Vec<_>>());
    let m = sys.b.mul(&star);
    let l = Subspace::column_space(&m);
    let d = m_total - ell - l.dim();

    let mut cayley = RatMatrix::zeros(ell, m_total);
    for j in 0..ell {
        for i in sys.class_columns(j) {
            cayley.set(j, i, Rat::one());
        }
    }
    let bcal = RatMatrix::vstack(m_total, &[&sys.b, &cayley]);
    let dependency = kernel_basis(&bcal);
    assert_eq!(dependency.dim(), d, "dim D must equal m − ℓ − dim L");
    let e = star.mul(&g_inverse(&m));
    Ok(MonomialStructure { star, m, l, d, cayley, bcal, dependency, e })
}

impl MonomialStructure {
    /// Dependency vectors restricted to class `j`. A basis vector of `D`
    /// is supported in a single class whenever the classes do not share
    /// dependencies, which is the case for each vector returned here.
    pub fn class_dependency(&self, sys: &PolySystem, j: usize) -> KernelBasis {
        let idx: Vec<usize> = sys.class_columns(j).collect();
        let bj = sys.b.select_columns(&idx);
        let ones = RatMatrix::from_rows(idx.len(), &[vec![Rat::one(); idx.len()]]);
        kernel_basis(&RatMatrix::vstack(idx.len(), &[&bj, &ones]))
    }
}

/// The coefficient polytope of one class: `ker A_j` intersected with the
/// open orthant and the simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeSegment {
    /// A single point (`dim P_j = 0`).
    Point(Vec<Rat>),
    /// The two vertices of a segment (`dim P_j = 1`), `y¹` lexicographically
    /// larger than `y²`.
    Segment(Vec<Rat>, Vec<Rat>),
    /// `dim P_j ≥ 2`; vertices not enumerated.
    Higher(usize),
}

impl PolytopeSegment {
    pub fn dim(&self) -> usize {
        match self {
            PolytopeSegment::Point(_) => 0,
            PolytopeSegment::Segment(..) => 1,
            PolytopeSegment::Higher(k) => *k,
        }
    }
}

pub fn coefficient_polytope_segment(sys: &PolySystem, j: usize) -> Result<PolytopeSegment> {
    polytope_of(&sys.class_a(j))
}

pub(crate) fn polytope_of(a: &RatMatrix) -> Result<PolytopeSegment> {
    let interior = strictly_positive_kernel_point(a).ok_or(Error::NoPositiveKernelPoint)?;
    let basis = kernel_basis(a);
    match basis.dim() {
        0 => unreachable!("a positive kernel point spans a nonzero kernel"),
        1 => Ok(PolytopeSegment::Point(normalize_sum(&interior).expect("positive vector"))),
        2 => {
            let (u, w) = (&basis.vectors[0], &basis.vectors[1]);
            let mut vertices: Vec<Vec<Rat>> = Vec::new();
            for i in 0..u.len() {
                if u[i].is_zero() && w[i].is_zero() {
                    continue;
                }
                let ray: Vec<Rat> = u.iter().zip(w).map(|(ui, wi)| &w[i] * ui - &u[i] * wi).collect();
                for candidate in [ray.clone(), ray.iter().map(|x| -x).collect()] {
                    if candidate.iter().any(Signed::is_negative) || candidate.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let v = normalize_sum(&candidate).expect("nonnegative nonzero vector");
                    if !vertices.contains(&v) {
                        vertices.push(v);
                    }
                }
            }
            assert_eq!(vertices.len(), 2, "a pointed two-dimensional cone has two extreme rays");
            vertices.sort();
            let y1 = vertices.pop().unwrap();
            let y2 = vertices.pop().unwrap();
            Ok(PolytopeSegment::Segment(y1, y2))
        }
        k => Ok(PolytopeSegment::Higher(k - 1)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberSolution {
    pub x_star: Vec<f64>,
    /// Basis of `L⊥`; every `x_star ∘ e^{L⊥ s}` solves the system.
    pub lperp: Subspace,
    pub y: Vec<f64>,
    pub residual: f64,
}

/// Tolerance on the binomial conditions `y^z = c^z`, compared in logs.
pub const BINOMIAL_TOL: f64 = 1e-9;
/// Relative residual bound for reconstructed solutions.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `‖A (c ∘ x^B)‖∞` together with the scale it is measured against.
pub fn residual(sys: &PolySystem, x: &[f64]) -> (f64, f64) {
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let exps = mat_vec_f64(&sys.b.transpose(), &logs);
    let terms: Vec<f64> = exps.iter().zip(&sys.c).map(|(e, c)| c * e.exp()).collect();
    let r = mat_vec_f64(&sys.a, &terms).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = sys.a.max_abs_f64() * terms.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (r, scale)
}

pub fn fiber_from_polytope_point(ms: &MonomialStructure, sys: &PolySystem, y: &[f64]) -> Result<FiberSolution> {
    if y.len() != sys.a.cols() {
        return Err(Error::Dimension("polytope point has wrong length".into()));
    }
    if y.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NonPositive("polytope point must be positive".into()));
    }
    let log_ratio: Vec<f64> = y.iter().zip(&sys.c).map(|(yi, ci)| yi.ln() - ci.ln()).collect();
    for z in &ms.dependency.vectors {
        let zy: f64 = z.iter().zip(y).map(|(zi, yi)| to_f64(zi) * yi.ln()).sum();
        let zc: f64 = z.iter().zip(&sys.c).map(|(zi, ci)| to_f64(zi) * ci.ln()).sum();
        if (zy - zc).abs() > BINOMIAL_TOL * zc.abs().max(1.0) {
            return Err(Error::BinomialViolated(format!("log y^z − log c^z = {:e}", zy - zc)));
        }
    }
    let x_star: Vec<f64> = mat_vec_f64(&ms.e.transpose(), &log_ratio).into_iter().map(f64::exp).collect();
    let (r, scale) = residual(sys, &x_star);
    if !(r <= RESIDUAL_TOL * scale) {
        return Err(Error::Residual(format!("residual {r:e} exceeds tolerance at scale {scale:e}")));
    }
    Ok(FiberSolution { x_star, lperp: ms.l.orthogonal_complement(), y: y.to_vec(), residual: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{rq, rvec, vec_to_f64};

    fn path_system() -> PolySystem {
        PolySystem::new(
            RatMatrix::from_i64(&[&[1, 1, -1, 1], &[1, -1, 0, 0]]),
            RatMatrix::from_i64(&[&[0, 2, 3, 1], &[0, 1, 0, 1]]),
            vec![4],
            vec![1.0; 4],
        )
        .unwrap()
    }

    fn scaled(v: &[i64], d: i64) -> Vec<Rat> {
        v.iter().map(|&x| rq(x, d)).collect()
    }

    #[test]
    fn path_structure() {
        let ms = monomial_structure(&path_system()).unwrap();
        assert_eq!((ms.l.dim(), ms.d), (2, 1));
        let b = &ms.dependency.vectors[0];
        let expected = rvec(&[1, 3, -1, -3]);
        let ratio = &b[0] / &expected[0];
        assert!(b.iter().zip(&expected).all(|(x, y)| *x == &ratio * y));
        assert_eq!(ms.m.mul(&g_inverse(&ms.m)).mul(&ms.m), ms.m);
    }

    #[test]
    fn two_terminal_dependency() {
        let sys = PolySystem::new(
            RatMatrix::from_i64(&[&[-1, -1, 3, -3], &[1, -1, -1, 1]]),
            RatMatrix::from_i64(&[&[1, 1, 0, 3], &[0, 1, 1, 0]]),
            vec![4],
            vec![1.0; 4],
        )
        .unwrap();
        let ms = monomial_structure(&sys).unwrap();
        assert_eq!(ms.d, 1);
        let b = &ms.dependency.vectors[0];
        let expected = rvec(&[1, 2, -2, -1]);
        let ratio = &b[0] / &expected[0];
        assert!(b.iter().zip(&expected).all(|(x, y)| *x == &ratio * y));
    }

    #[test]
    fn identity_exponents_have_no_dependency() {
        let sys =
            PolySystem::new(RatMatrix::from_i64(&[&[1, -1]]), RatMatrix::identity(2), vec![2], vec![1.0, 1.0]).unwrap();
        let ms = monomial_structure(&sys).unwrap();
        assert_eq!((ms.l.dim(), ms.d, ms.dependency.dim()), (1, 0, 0));
        assert_eq!(ms.l, Subspace::span(2, &[rvec(&[1, -1])]));
    }

    #[test]
    fn rejects_non_product_classes() {
        // ker A = span{(1,1,1,1)} straddles the two declared classes.
        let a = RatMatrix::from_i64(&[&[1, -1, 0, 0], &[0, 1, -1, 0], &[0, 0, 1, -1]]);
        let sys = PolySystem::new(a, RatMatrix::identity(4), vec![2, 2], vec![1.0; 4]).unwrap();
        assert_eq!(monomial_structure(&sys), Err(Error::NotClassDecomposed));
    }

    #[test]
    fn path_segment_vertices() {
        match coefficient_polytope_segment(&path_system(), 0).unwrap() {
            PolytopeSegment::Segment(y1, y2) => {
                assert_eq!(y1, scaled(&[1, 1, 2, 0], 4));
                assert_eq!(y2, scaled(&[0, 0, 1, 1], 2));
            }
            other => panic!("expected a segment, got {other:?}"),
        }
    }

    #[test]
    fn orthant_segment() {
        let seg = polytope_of(&RatMatrix::zeros(0, 2)).unwrap();
        assert_eq!(seg, PolytopeSegment::Segment(rvec(&[1, 0]), rvec(&[0, 1])));
    }

    #[test]
    fn singleton_terminal_point() {
        let b = RatMatrix::from_i64(&[&[1, 2, 3], &[0, 0, 1]]);
        // k32 = 3, other rates 1: the kernel is spanned by (1,1,2).
        let a = RatMatrix::from_i64(&[&[0, -2, 1], &[1, 1, -1]]);
        let sys = PolySystem::new(a, b.clone(), vec![3], vec![1.0; 3]).unwrap();
        assert_eq!(coefficient_polytope_segment(&sys, 0).unwrap(), PolytopeSegment::Point(scaled(&[1, 1, 2], 4)));
        // All rates 1: the kernel is spanned by (1,-1,0).
        let a = RatMatrix::from_i64(&[&[0, 0, 1], &[1, 1, -1]]);
        let sys = PolySystem::new(a, b, vec![3], vec![1.0; 3]).unwrap();
        assert_eq!(coefficient_polytope_segment(&sys, 0), Err(Error::NoPositiveKernelPoint));
    }

    #[test]
    fn higher_dimensional_polytope_is_reported() {
        assert_eq!(polytope_of(&RatMatrix::zeros(0, 4)).unwrap(), PolytopeSegment::Higher(3));
    }

    #[test]
    fn fiber_rejects_off_variety_point() {
        let sys = path_system();
        let ms = monomial_structure(&sys).unwrap();
        let y = vec_to_f64(&scaled(&[1, 1, 3, 1], 6));
        assert!(matches!(fiber_from_polytope_point(&ms, &sys, &y), Err(Error::BinomialViolated(_))));
    }

    #[test]
    fn fiber_for_dependency_free_system() {
        // One class, d = 0, dim L = 1 < n = 2: the fiber is a curve.
        let a = RatMatrix::from_i64(&[&[1, -1]]);
        let b = RatMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        let sys = PolySystem::new(a, b, vec![2], vec![2.0, 3.0]).unwrap();
        let ms = monomial_structure(&sys).unwrap();
        let fib = fiber_from_polytope_point(&ms, &sys, &[0.5, 0.5]).unwrap();
        assert_eq!(fib.lperp.dim(), 1);
        let w = vec_to_f64(&fib.lperp.basis()[0]);
        for s in [-2.0, -0.5, 1.0, 2.0] {
            let x: Vec<f64> = fib.x_star.iter().zip(&w).map(|(xi, wi)| xi * (s * wi).exp()).collect();
            let (r, scale) = residual(&sys, &x);
            assert!(r <= 1e-12 * scale);
        }
    }
}
