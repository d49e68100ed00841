//! Numeric equilibrium pipeline: univariate root on each polytope segment,
//! reconstruction of a particular solution, and the intersection of its
//! exponential fiber with a compatibility class.
//!
//! Segment points are parametrized as `y = ȳ ∘ (1 + t q)` with
//! `t = tanh u`. Working in `u` keeps `1 ± t` exact near the endpoints, where
//! the factors with `q̃ = ±1` are evaluated through `ln(1 ± tanh u) =
//! ln 2 − ln(1 + e^{∓2u})`.

use nalgebra::{DMatrix, DVector};

use crate::decomp::Decomposition;
use crate::depone::{analyze_decomposition, ClassAnalysis, Conclusion, TheoremVerdict};
use crate::error::{Error, Result};
use crate::network::{build_matrices, mat_vec_f64, monomials, MassActionSystem};
use crate::poly::fiber_from_polytope_point;
use crate::ratlin::{to_f64, Subspace};

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(1 + q tanh u)`, exact in the limits `q = ±1`.
fn log_factor(q: f64, u: f64) -> f64 {
    if q == 1.0 {
        std::f64::consts::LN_2 - softplus(-2.0 * u)
    } else if q == -1.0 {
        std::f64::consts::LN_2 - softplus(2.0 * u)
    } else {
        (q * u.tanh()).ln_1p()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Zero,
    Finite,
    Infinite,
}

fn limit_of(b: f64) -> Limit {
    if b > 0.0 {
        Limit::Zero
    } else if b < 0.0 {
        Limit::Infinite
    } else {
        Limit::Finite
    }
}

/// `f(t) = Π (1 + t q̃_i)^{b̃_i}` and the target `c*`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateProfile {
    pub q_tilde: Vec<f64>,
    pub b_tilde: Vec<f64>,
    pub c_star: f64,
}

impl UnivariateProfile {
    pub fn new(q_tilde: Vec<f64>, b_tilde: Vec<f64>, c_star: f64) -> Result<Self> {
        if q_tilde.len() != b_tilde.len() || q_tilde.len() < 2 {
            return Err(Error::Dimension("profile needs matching q̃, b̃ of length ≥ 2".into()));
        }
        if q_tilde[0] != 1.0 || *q_tilde.last().unwrap() != -1.0 {
            return Err(Error::InvalidNetwork("q̃ must run from 1 down to −1".into()));
        }
        if !(c_star > 0.0) || !c_star.is_finite() {
            return Err(Error::NonPositive("c* must be positive and finite".into()));
        }
        Ok(Self { q_tilde, b_tilde, c_star })
    }

    /// Profile of a `d = dim P = 1` class for coefficients `c`.
    pub fn from_class(ca: &ClassAnalysis, c: &[f64]) -> Result<Self> {
        let c_star = crate::depone::c_star(ca, c)
            .ok_or_else(|| Error::NotApplicable("class has no one-dimensional dependency".into()))?;
        Self::new(ca.q_tilde.iter().map(to_f64).collect(), ca.b_tilde.iter().map(to_f64).collect(), c_star)
    }

    /// Limits of `f` at `t → −1` and `t → 1`.
    pub fn limits(&self) -> (Limit, Limit) {
        (limit_of(self.b_tilde[0]), limit_of(-*self.b_tilde.last().unwrap()))
    }

    pub fn log_f_at_u(&self, u: f64) -> f64 {
        self.q_tilde.iter().zip(&self.b_tilde).map(|(&q, &b)| if b == 0.0 { 0.0 } else { b * log_factor(q, u) }).sum()
    }

    pub fn log_f(&self, t: f64) -> f64 {
        self.log_f_at_u(t.atanh())
    }

    /// True when the partial sums of `b̃` share a sign and the endpoint
    /// exponents have opposite signs, so `f` is a bijection onto `(0, ∞)`.
    pub fn is_monotone(&self) -> bool {
        let mut acc = 0.0;
        let (mut nonneg, mut nonpos) = (true, true);
        for b in &self.b_tilde[..self.b_tilde.len() - 1] {
            acc += b;
            nonneg &= acc >= 0.0;
            nonpos &= acc <= 0.0;
        }
        (nonneg || nonpos) && self.b_tilde[0] * self.b_tilde.last().unwrap() < 0.0
    }
}

/// Bracket endpoints are `t = ±(1 − 2^{−k})` for `k = 5, …, 60`.
const FIRST_GAP_EXPONENT: i32 = 5;
const LAST_GAP_EXPONENT: i32 = 60;
pub const LOG_TOL: f64 = 1e-12;

fn u_for_gap(k: i32) -> f64 {
    // atanh(1 − 2^{−k}) = ½ ln(2^{k+1} − 1)
    0.5 * (2f64.powi(k + 1) - 1.0).ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnivariateRoot {
    pub u: f64,
    pub t: f64,
    pub log_error: f64,
}

/// Solves `f(t) = c*` on `(−1, 1)` by bisection in `u = atanh t`.
pub fn solve_univariate(p: &UnivariateProfile) -> Result<UnivariateRoot> {
    if !p.is_monotone() {
        return Err(Error::Refused("profile is not monotone with mixed-sign endpoints".into()));
    }
    let target = p.c_star.ln();
    let increasing = p.b_tilde[0] > 0.0;
    let g = |u: f64| {
        let v = p.log_f_at_u(u) - target;
        if increasing {
            v
        } else {
            -v
        }
    };
    let mut k = FIRST_GAP_EXPONENT;
    let (mut lo, mut hi) = (-u_for_gap(k), u_for_gap(k));
    while g(lo) > 0.0 || g(hi) < 0.0 {
        k += 1;
        if k > LAST_GAP_EXPONENT {
            return Err(Error::Convergence(format!("root lies within 2^-{LAST_GAP_EXPONENT} of ±1")));
        }
        if g(lo) > 0.0 {
            lo = -u_for_gap(k);
        }
        if g(hi) < 0.0 {
            hi = u_for_gap(k);
        }
    }
    let tol = LOG_TOL * target.abs().max(1.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v.abs() <= tol * 0.25 || mid <= lo || mid >= hi {
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let log_error = g(mid).abs();
    if log_error > tol {
        return Err(Error::Convergence(format!("bisection stalled with |log f − log c*| = {log_error:e}")));
    }
    Ok(UnivariateRoot { u: mid, t: mid.tanh(), log_error })
}

/// `ȳ ∘ (1 + t q)` for a class segment, evaluated in `u`.
pub fn segment_point(ca: &ClassAnalysis, u: f64) -> Option<Vec<f64>> {
    let ybar = crate::depone::segment_midpoint(ca)?;
    Some(ybar.iter().zip(&ca.q).map(|(y, q)| y * log_factor(to_f64(q), u).exp()).collect())
}

/// Orthonormal basis of a subspace as columns of an `n × dim` matrix.
fn orthonormal_columns(s: &Subspace) -> DMatrix<f64> {
    let n = s.ambient();
    let basis = s.basis();
    let m = DMatrix::from_fn(n, basis.len(), |i, j| to_f64(&basis[j][i]));
    if basis.is_empty() {
        return m;
    }
    m.qr().q()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirchPoint {
    pub x: Vec<f64>,
    pub iterations: usize,
}

pub const BIRCH_GRAD_TOL: f64 = 1e-10;
pub const BIRCH_MAX_ITER: usize = 200;

/// The unique point of `(anchor + S) ∩ (x_star ∘ e^{S⊥})`, found by damped
/// Newton on the convex `φ(λ) = Σ x*_i e^{(Wλ)_i} − (Wᵀ x′)·λ`.
pub fn birch_intersect(x_star: &[f64], s: &Subspace, anchor: &[f64]) -> Result<BirchPoint> {
    let n = s.ambient();
    if x_star.len() != n || anchor.len() != n {
        return Err(Error::Dimension(format!("expected vectors of length {n}")));
    }
    if x_star.iter().chain(anchor).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositive("Birch inputs must be positive".into()));
    }
    let w = orthonormal_columns(&s.orthogonal_complement());
    let p = w.ncols();
    if p == 0 {
        return Ok(BirchPoint { x: x_star.to_vec(), iterations: 0 });
    }
    let xs = DVector::from_column_slice(x_star);
    let target = w.transpose() * DVector::from_column_slice(anchor);
    let tol = BIRCH_GRAD_TOL * target.amax().max(1.0);
    let point = |lambda: &DVector<f64>| -> DVector<f64> {
        let e = &w * lambda;
        DVector::from_iterator(n, xs.iter().zip(e.iter()).map(|(x, e)| x * e.exp()))
    };
    let phi = |lambda: &DVector<f64>| point(lambda).sum() - target.dot(lambda);

    let mut lambda = DVector::zeros(p);
    for it in 0..=BIRCH_MAX_ITER {
        let x = point(&lambda);
        let grad = w.transpose() * &x - &target;
        if grad.amax() <= tol {
            return Ok(BirchPoint { x: x.iter().copied().collect(), iterations: it });
        }
        if it == BIRCH_MAX_ITER {
            break;
        }
        let hess = w.transpose() * DMatrix::from_diagonal(&x) * &w;
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => -&grad,
        };
        let slope = grad.dot(&step);
        // Near the optimum the decrease in φ drops below roundoff; the full
        // step is then safe and the line search would only stall.
        if -slope <= 1e-12 {
            lambda += step;
            continue;
        }
        let f0 = phi(&lambda);
        let mut alpha = 1.0;
        loop {
            let cand = &lambda + &step * alpha;
            let f1 = phi(&cand);
            if f1.is_finite() && f1 <= f0 + 1e-4 * alpha * slope {
                lambda = cand;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-20 {
                lambda = cand;
                break;
            }
        }
    }
    Err(Error::Convergence("Birch Newton failed to converge".into()))
}

/// Distances of `x` from the two Birch sets: `‖P_{S⊥}(x − x′)‖∞` and
/// `‖P_S(ln x − ln x*)‖∞`.
pub fn birch_membership(x: &[f64], x_star: &[f64], anchor: &[f64], s: &Subspace) -> (f64, f64) {
    let n = s.ambient();
    let perp = orthonormal_columns(&s.orthogonal_complement());
    let par = orthonormal_columns(s);
    let diff = DVector::from_iterator(n, x.iter().zip(anchor).map(|(a, b)| a - b));
    let logdiff = DVector::from_iterator(n, x.iter().zip(x_star).map(|(a, b)| a.ln() - b.ln()));
    let aff = if perp.ncols() == 0 { 0.0 } else { (&perp * (perp.transpose() * diff)).amax() };
    let fib = if par.ncols() == 0 { 0.0 } else { (&par * (par.transpose() * logdiff)).amax() };
    (aff, fib)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    Stoichiometric,
    Kinetic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResult {
    pub kind: ClassKind,
    pub x_star: Vec<f64>,
    pub lperp: Subspace,
    pub unique_in_class: bool,
    pub anchor: Vec<f64>,
    pub x: Vec<f64>,
    /// `‖Γ_k x^{Y_s}‖∞`.
    pub residual: f64,
    /// Residual divided by `‖Γ_k‖∞ · max(1, ‖x^{Y_s}‖∞)`.
    pub relative_residual: f64,
    /// Root `t` per class; `None` for classes with a single polytope point.
    pub t_roots: Vec<Option<f64>>,
    pub birch_iterations: usize,
    /// Affine and fiber membership errors of `x`.
    pub membership: (f64, f64),
}

pub const EQUILIBRIUM_TOL: f64 = 1e-8;

pub fn solve_equilibrium(
    sys: &MassActionSystem,
    dec: &Decomposition,
    verdict: &TheoremVerdict,
    anchor: &[f64],
    kind: ClassKind,
) -> Result<EquilibriumResult> {
    let needed = match kind {
        ClassKind::Stoichiometric => Conclusion::UniquePerStoichiometricClass,
        ClassKind::Kinetic => Conclusion::UniquePerKineticClass,
    };
    if !verdict.conclusions.contains(&needed) {
        return Err(Error::Refused(format!("verdict does not conclude \"{needed}\"")));
    }
    let n = sys.network().species_count();
    if anchor.len() != n {
        return Err(Error::Dimension(format!("anchor needs {n} entries, got {}", anchor.len())));
    }
    let (psys, ms, classes) = analyze_decomposition(dec)?;
    let mut y = Vec::with_capacity(psys.a().cols());
    let mut t_roots = Vec::new();
    for (j, ca) in classes.into_iter().enumerate() {
        let ca = ca?;
        match (ca.dim_p, ca.d) {
            (0, 0) => {
                y.extend(ca.point.as_ref().expect("point polytope").iter().map(to_f64));
                t_roots.push(None);
            }
            (1, 1) => {
                let profile = UnivariateProfile::from_class(&ca, psys.class_c(j))?;
                let root = solve_univariate(&profile)?;
                y.extend(segment_point(&ca, root.u).expect("segment polytope"));
                t_roots.push(Some(root.t));
            }
            (p, d) => return Err(Error::Refused(format!("class {} has dim P = {p}, d = {d}", j + 1))),
        }
    }
    let fiber = fiber_from_polytope_point(&ms, &psys, &y)?;
    let m = build_matrices(sys);
    let subspace = match kind {
        ClassKind::Stoichiometric => Subspace::column_space(&m.stoichiometric),
        ClassKind::Kinetic => Subspace::column_space(&m.gamma),
    };
    let birch = birch_intersect(&fiber.x_star, &subspace, anchor)?;
    let mono = monomials(&m.y_s, &birch.x);
    let residual = mat_vec_f64(&m.gamma, &mono).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = m.gamma.max_abs_f64() * mono.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let relative_residual = residual / scale;
    if !(relative_residual <= EQUILIBRIUM_TOL) {
        return Err(Error::Residual(format!("relative residual {relative_residual:e}")));
    }
    let membership = birch_membership(&birch.x, &fiber.x_star, anchor, &subspace);
    Ok(EquilibriumResult {
        kind,
        x_star: fiber.x_star,
        lperp: fiber.lperp,
        unique_in_class: true,
        anchor: anchor.to_vec(),
        x: birch.x,
        residual,
        relative_residual,
        t_roots,
        birch_iterations: birch.iterations,
        membership,
    })
}
