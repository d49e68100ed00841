//! Verdicts for the dependency-one and deficiency-one theorems.
//!
//! Each checker returns a [`TheoremVerdict`] listing every hypothesis with
//! its status and a witness, plus the conclusions that follow. A
//! conclusion is only ever attached when all of its hypotheses passed.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decomp::{Decomposition, Subnetwork};
use crate::error::{Error, Result};
use crate::poly::{coefficient_polytope_segment, monomial_structure, MonomialStructure, PolySystem, PolytopeSegment};
use crate::ratlin::{
    fmt_rat, positive_kernel_feasibility, primitive_integer, strictly_positive_kernel_point, to_f64, Feasibility, Rat,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Dep1OneClass,
    Existence,
    Dep1Decomposable,
    Dep1MassAction,
    Def1,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::Dep1OneClass => "dep1-one-class",
            TheoremId::Existence => "existence",
            TheoremId::Dep1Decomposable => "dep1-decomposable",
            TheoremId::Dep1MassAction => "dep1-mass-action",
            TheoremId::Def1 => "def1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotApplicable => "n/a",
        })
    }
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub status: Status,
    pub witness: String,
}

impl Condition {
    fn new(label: impl Into<String>, status: Status, witness: impl Into<String>) -> Self {
        Self { label: label.into(), status, witness: witness.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    UniquePerStoichiometricClass,
    UniquePerKineticClass,
    SingleSolutionForAllC,
    ExistsForAllC,
    ExistsForAllK,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::UniquePerStoichiometricClass => "unique per stoichiometric class",
            Conclusion::UniquePerKineticClass => "unique per kinetic class",
            Conclusion::SingleSolutionForAllC => "|Y_c| = 1 for all c",
            Conclusion::ExistsForAllC => "exists for all c",
            Conclusion::ExistsForAllK => "exists for all k",
        })
    }
}

/// Overall result, mapped to CLI exit codes 0, 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
            Outcome::NotApplicable => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub conditions: Vec<Condition>,
    pub conclusions: Vec<Conclusion>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl TheoremVerdict {
    fn new(theorem: TheoremId) -> Self {
        Self { theorem, conditions: Vec::new(), conclusions: Vec::new(), diagnostics: Vec::new() }
    }

    fn push(&mut self, label: impl Into<String>, status: Status, witness: impl Into<String>) {
        self.conditions.push(Condition::new(label, status, witness));
    }

    fn all_pass(&self, pred: impl Fn(&Condition) -> bool) -> bool {
        self.conditions.iter().filter(|c| pred(c)).all(|c| c.status == Status::Pass)
    }

    pub fn outcome(&self) -> Outcome {
        if !self.conclusions.is_empty() {
            Outcome::Pass
        } else if self.conditions.iter().any(|c| c.status == Status::Fail) {
            Outcome::Fail
        } else {
            Outcome::NotApplicable
        }
    }

    pub fn condition(&self, label_prefix: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label.starts_with(label_prefix))
    }

    fn not_applicable(theorem: TheoremId, reason: &str) -> Self {
        let mut v = Self::new(theorem);
        v.push("hypotheses", Status::NotApplicable, reason);
        v
    }
}

pub fn fmt_rats(v: &[Rat]) -> String {
    format!("({})", v.iter().map(fmt_rat).collect::<Vec<_>>().join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignBranch {
    NonNegative,
    NonPositive,
    Mixed,
}

/// Per-class data behind the dependency-one conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassAnalysis {
    pub class_index: usize,
    pub dim_p: usize,
    pub d: usize,
    /// Segment vertices `(y¹, y²)` when `dim P_j = 1`.
    pub vertices: Option<(Vec<Rat>, Vec<Rat>)>,
    /// The single polytope point when `dim P_j = 0`.
    pub point: Option<Vec<Rat>>,
    /// `q` in the original column order.
    pub q: Vec<Rat>,
    /// `order[p]` is the column at sorted position `p` (descending `q`).
    pub order: Vec<usize>,
    /// Groups of columns with equal `q`, in descending `q` order.
    pub eq_classes: Vec<Vec<usize>>,
    pub q_tilde: Vec<Rat>,
    /// Dependency vector in the original column order, sign-normalized.
    pub b: Vec<Rat>,
    pub b_tilde: Vec<Rat>,
    /// `Σ_{i' ≤ i} b̃_{i'}` for `i = 1, …, ω − 1`.
    pub partial_sums: Vec<Rat>,
    pub branch: SignBranch,
    pub partial_sums_ok: bool,
    pub endpoints_ok: bool,
}

fn sign_branch(partial: &[Rat]) -> SignBranch {
    if partial.iter().all(|s| !s.is_negative()) {
        SignBranch::NonNegative
    } else if partial.iter().all(|s| !s.is_positive()) {
        SignBranch::NonPositive
    } else {
        SignBranch::Mixed
    }
}

fn partial_sums(b_tilde: &[Rat]) -> Vec<Rat> {
    let mut acc = Rat::zero();
    let mut out = Vec::new();
    for x in b_tilde.iter().take(b_tilde.len().saturating_sub(1)) {
        acc += x;
        out.push(acc.clone());
    }
    out
}

fn endpoints_product(b_tilde: &[Rat]) -> Rat {
    match (b_tilde.first(), b_tilde.last()) {
        (Some(a), Some(z)) => a * z,
        _ => Rat::zero(),
    }
}

/// Builds `q`, the sorted order, equal-`q` groups and the lumped `b̃` for
/// one class.
pub fn analyze_class(sys: &PolySystem, ms: &MonomialStructure, j: usize) -> Result<ClassAnalysis> {
    let segment = coefficient_polytope_segment(sys, j)?;
    let deps = ms.class_dependency(sys, j);
    let d = deps.dim();
    let dim_p = segment.dim();
    if dim_p >= 2 {
        return Err(Error::NotApplicable(format!("class {} has dim P = {dim_p} ≥ 2", j + 1)));
    }
    if d >= 2 {
        return Err(Error::NotApplicable(format!("class {} has d = {d} ≥ 2", j + 1)));
    }
    let mut ca = ClassAnalysis {
        class_index: j,
        dim_p,
        d,
        vertices: None,
        point: None,
        q: Vec::new(),
        order: Vec::new(),
        eq_classes: Vec::new(),
        q_tilde: Vec::new(),
        b: Vec::new(),
        b_tilde: Vec::new(),
        partial_sums: Vec::new(),
        branch: SignBranch::NonNegative,
        partial_sums_ok: true,
        endpoints_ok: true,
    };
    match segment {
        PolytopeSegment::Point(p) => {
            if d == 1 {
                return Err(Error::NotApplicable(format!("class {} has d = 1 but dim P = 0", j + 1)));
            }
            ca.point = Some(p);
            return Ok(ca);
        }
        PolytopeSegment::Segment(y1, y2) => {
            ca.q = y1.iter().zip(&y2).map(|(a, b)| (a - b) / (a + b)).collect();
            ca.vertices = Some((y1, y2));
        }
        PolytopeSegment::Higher(_) => unreachable!(),
    }
    let mut order: Vec<usize> = (0..ca.q.len()).collect();
    order.sort_by(|&a, &b| ca.q[b].cmp(&ca.q[a]));
    debug_assert!(ca.q[order[0]].is_one() && ca.q[*order.last().unwrap()] == -Rat::one());
    for &i in &order {
        match ca.q_tilde.last() {
            Some(last) if *last == ca.q[i] => ca.eq_classes.last_mut().unwrap().push(i),
            _ => {
                ca.q_tilde.push(ca.q[i].clone());
                ca.eq_classes.push(vec![i]);
            }
        }
    }
    ca.order = order;
    if d == 0 {
        return Ok(ca);
    }

    let mut b = primitive_integer(&deps.vectors[0]);
    let mut b_tilde: Vec<Rat> = ca.eq_classes.iter().map(|c| c.iter().map(|&i| &b[i]).sum()).collect();
    let lead = b_tilde.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Rat::one);
    if lead.is_negative() {
        b.iter_mut().for_each(|x| *x = -x.clone());
        b_tilde.iter_mut().for_each(|x| *x = -x.clone());
    }
    debug_assert!(b_tilde.iter().sum::<Rat>().is_zero());
    ca.partial_sums = partial_sums(&b_tilde);
    ca.branch = sign_branch(&ca.partial_sums);
    ca.partial_sums_ok = ca.branch != SignBranch::Mixed;
    ca.endpoints_ok = endpoints_product(&b_tilde).is_negative();
    ca.b = b;
    ca.b_tilde = b_tilde;
    Ok(ca)
}

fn sign_witness(ca: &ClassAnalysis) -> String {
    let branch = match ca.branch {
        SignBranch::NonNegative => "all ≥ 0",
        SignBranch::NonPositive => "all ≤ 0",
        SignBranch::Mixed => "mixed signs",
    };
    format!("partial sums {} ({branch})", fmt_rats(&ca.partial_sums))
}

fn endpoint_witness(ca: &ClassAnalysis) -> String {
    let (a, z) = (&ca.b_tilde[0], ca.b_tilde.last().unwrap());
    format!("b̃₁·b̃_ω = {}·{} = {}", fmt_rat(a), fmt_rat(z), fmt_rat(&(a * z)))
}

/// The one-class theorem: `|Y_c| = 1` for all `c`.
pub fn check_one_class(ca: &ClassAnalysis) -> TheoremVerdict {
    let mut v = TheoremVerdict::new(TheoremId::Dep1OneClass);
    if ca.d == 0 && ca.dim_p == 0 {
        v.push("d = dim P = 0", Status::Pass, "the polytope is a single point");
        v.conclusions.push(Conclusion::SingleSolutionForAllC);
        return v;
    }
    if ca.d != 1 || ca.dim_p != 1 {
        v.push("d = dim P = 1", Status::NotApplicable, format!("d = {}, dim P = {}", ca.d, ca.dim_p));
        return v;
    }
    v.push("partial sums of b̃ uniformly signed", Status::from_bool(ca.partial_sums_ok), sign_witness(ca));
    v.push("b̃₁·b̃_ω < 0", Status::from_bool(ca.endpoints_ok), endpoint_witness(ca));
    if ca.partial_sums_ok && ca.endpoints_ok {
        v.conclusions.push(Conclusion::SingleSolutionForAllC);
    }
    v
}

/// Sign pattern of the endpoint entries of `b̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExistenceCase {
    /// `b̃₁·b̃_ω < 0`: every `c*` is attained.
    MixedEndpoints,
    FirstZeroLastPositive,
    FirstZeroLastNegative,
    BothZero,
    FirstPositiveLastZero,
    FirstNegativeLastZero,
    BothPositive,
    BothNegative,
}

impl ExistenceCase {
    pub fn classify(b_tilde: &[Rat]) -> Self {
        use std::cmp::Ordering::*;
        let zero = Rat::zero();
        let first = b_tilde.first().unwrap_or(&zero).cmp(&zero);
        let last = b_tilde.last().unwrap_or(&zero).cmp(&zero);
        match (first, last) {
            (Greater, Less) | (Less, Greater) => Self::MixedEndpoints,
            (Equal, Greater) => Self::FirstZeroLastPositive,
            (Equal, Less) => Self::FirstZeroLastNegative,
            (Equal, Equal) => Self::BothZero,
            (Greater, Equal) => Self::FirstPositiveLastZero,
            (Less, Equal) => Self::FirstNegativeLastZero,
            (Greater, Greater) => Self::BothPositive,
            (Less, Less) => Self::BothNegative,
        }
    }

    /// `Some(true)` when `f` is bounded above on `(−1, 1)`, `Some(false)`
    /// when bounded below away from zero, `None` when every value is hit.
    pub fn bounded_above(self) -> Option<bool> {
        match self {
            Self::MixedEndpoints => None,
            Self::FirstZeroLastPositive | Self::BothZero | Self::FirstPositiveLastZero | Self::BothPositive => Some(true),
            Self::FirstZeroLastNegative | Self::FirstNegativeLastZero | Self::BothNegative => Some(false),
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::MixedEndpoints => "b̃₁·b̃_ω < 0: f maps (−1,1) onto (0,∞)",
            Self::FirstZeroLastPositive => "b̃₁ = 0 and b̃_ω > 0: f bounded above",
            Self::FirstZeroLastNegative => "b̃₁ = 0 and b̃_ω < 0: f bounded below",
            Self::BothZero => "b̃₁ = 0 and b̃_ω = 0: f bounded above",
            Self::FirstPositiveLastZero => "b̃₁ > 0 and b̃_ω = 0: f bounded above",
            Self::FirstNegativeLastZero => "b̃₁ < 0 and b̃_ω = 0: f bounded below",
            Self::BothPositive => "b̃₁ > 0 and b̃_ω > 0: f bounded above",
            Self::BothNegative => "b̃₁ < 0 and b̃_ω < 0: f bounded below",
        }
    }
}

/// A value `c*` that `f(t) = Π (1 + t q̃_i)^{b̃_i}` never reaches on
/// `(−1, 1)`, or `None` when the endpoints have mixed signs.
pub fn unreachable_c_star(q_tilde: &[Rat], b_tilde: &[Rat]) -> Option<(ExistenceCase, f64)> {
    let case = ExistenceCase::classify(b_tilde);
    let above = case.bounded_above()?;
    let ln2 = std::f64::consts::LN_2;
    let mut bound = 0.0;
    for (q, b) in q_tilde.iter().zip(b_tilde) {
        let (q, b) = (to_f64(q).abs(), to_f64(b));
        let interior = q < 1.0;
        // Each factor 1 + t q lies in (1 − |q|, 1 + |q|) ⊂ (0, 2).
        if above {
            if b > 0.0 {
                bound += b * ln2;
            } else if b < 0.0 {
                assert!(interior, "negative exponent at an endpoint makes f unbounded above");
                bound += -b * -(1.0 - q).ln();
            }
        } else if b < 0.0 {
            bound += b * ln2;
        } else if b > 0.0 {
            assert!(interior, "positive exponent at an endpoint lets f approach zero");
            bound += b * (1.0 - q).ln();
        }
    }
    let ln_c_star = if above { bound + 1.0 } else { bound - 1.0 };
    Some((case, ln_c_star.exp()))
}

/// Midpoint `ȳ = (y¹ + y²)/2` of the segment, in floats.
pub fn segment_midpoint(ca: &ClassAnalysis) -> Option<Vec<f64>> {
    let (y1, y2) = ca.vertices.as_ref()?;
    Some(y1.iter().zip(y2).map(|(a, b)| to_f64(&((a + b) / Rat::from_integer(2.into())))).collect())
}

/// `c* = c^b ȳ^{−b}` for the class coefficients `c`.
pub fn c_star(ca: &ClassAnalysis, c: &[f64]) -> Option<f64> {
    let ybar = segment_midpoint(ca)?;
    if ca.b.is_empty() {
        return None;
    }
    let s: f64 = ca.b.iter().zip(c.iter().zip(&ybar)).map(|(b, (c, y))| to_f64(b) * (c.ln() - y.ln())).sum();
    Some(s.exp())
}

/// Class coefficients `c = exp(s b)` whose target `c^b ȳ^{−b}` equals
/// `target`.
pub fn coefficients_for_c_star(ca: &ClassAnalysis, target: f64) -> Option<Vec<f64>> {
    let ybar = segment_midpoint(ca)?;
    let b: Vec<f64> = ca.b.iter().map(to_f64).collect();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if bb == 0.0 {
        return None;
    }
    let b_ln_ybar: f64 = b.iter().zip(&ybar).map(|(b, y)| b * y.ln()).sum();
    let s = (target.ln() + b_ln_ybar) / bb;
    Some(b.iter().map(|bi| (s * bi).exp()).collect())
}

/// A coefficient vector for which the class has no solution on its
/// polytope, built from the failing endpoint case.
#[derive(Clone, Debug, PartialEq)]
pub struct UnreachableWitness {
    pub case: ExistenceCase,
    pub c_star: f64,
    pub c: Vec<f64>,
}

pub fn existence_counterexample(ca: &ClassAnalysis) -> Option<UnreachableWitness> {
    if ca.d != 1 || ca.dim_p != 1 {
        return None;
    }
    let (case, c_star) = unreachable_c_star(&ca.q_tilde, &ca.b_tilde)?;
    let c = coefficients_for_c_star(ca, c_star)?;
    Some(UnreachableWitness { case, c_star, c })
}

/// Existence for all `c` holds exactly when `b̃₁·b̃_ω < 0`.
pub fn check_existence(ca: &ClassAnalysis) -> TheoremVerdict {
    let mut v = TheoremVerdict::new(TheoremId::Existence);
    if ca.d != 1 || ca.dim_p != 1 {
        v.push("d = dim P = 1", Status::NotApplicable, format!("d = {}, dim P = {}", ca.d, ca.dim_p));
        return v;
    }
    let case = ExistenceCase::classify(&ca.b_tilde);
    let mut witness = format!("{}; {}", endpoint_witness(ca), case.description());
    if let Some((_, cs)) = unreachable_c_star(&ca.q_tilde, &ca.b_tilde) {
        witness.push_str(&format!("; c* = {cs:.6e} is not attained"));
    }
    let ok = case == ExistenceCase::MixedEndpoints;
    v.push("b̃₁·b̃_ω < 0", Status::from_bool(ok), witness);
    if ok {
        v.conclusions.push(Conclusion::ExistsForAllC);
    }
    v
}

fn class_conditions(v: &mut TheoremVerdict, prefix: &str, ca: &ClassAnalysis) {
    if ca.d == 1 {
        v.push(format!("{prefix}: partial sums of b̃ uniformly signed"), Status::from_bool(ca.partial_sums_ok), sign_witness(ca));
        v.push(format!("{prefix}: b̃₁·b̃_ω < 0"), Status::from_bool(ca.endpoints_ok), endpoint_witness(ca));
    }
}

fn positive_kernel_condition(a: &crate::ratlin::RatMatrix) -> (Status, String) {
    match positive_kernel_feasibility(a) {
        Feasibility::Point(p) => (Status::Pass, format!("positive kernel point {}", fmt_rats(&p))),
        Feasibility::Infeasible(cert) => (Status::Fail, format!("certificate u = {} with Aᵀu ≥ 0, Aᵀu ≠ 0", fmt_rats(&cert.u))),
    }
}

/// The polynomial-system theorem for `ℓ` classes.
pub fn check_decomposable(sys: &PolySystem) -> TheoremVerdict {
    let mut v = TheoremVerdict::new(TheoremId::Dep1Decomposable);
    let ms = match monomial_structure(sys) {
        Ok(ms) => ms,
        Err(e) => return TheoremVerdict::not_applicable(TheoremId::Dep1Decomposable, &e.to_string()),
    };
    let (status, witness) = positive_kernel_condition(sys.a());
    v.push("(i) ker A ∩ R^m_> ≠ ∅", status, witness);
    let ds: Vec<usize> = (0..sys.class_count()).map(|j| ms.class_dependency(sys, j).dim()).collect();
    let d_sum: usize = ds.iter().sum();
    v.push("(ii) d = Σ d_j", Status::from_bool(ms.d == d_sum), format!("d = {}, Σ d_j = {d_sum}", ms.d));
    for j in 0..sys.class_count() {
        let prefix = format!("(iii) class {}", j + 1);
        match analyze_class(sys, &ms, j) {
            Ok(ca) => {
                let ok = ca.d == ca.dim_p;
                v.push(format!("{prefix}: d_j = dim P_j ≤ 1"), Status::from_bool(ok), format!("d_j = {}, dim P_j = {}", ca.d, ca.dim_p));
                class_conditions(&mut v, &prefix, &ca);
            }
            Err(Error::NotApplicable(msg)) => v.push(format!("{prefix}: d_j = dim P_j ≤ 1"), Status::Fail, msg),
            Err(e) => v.push(format!("{prefix}: d_j = dim P_j ≤ 1"), Status::NotApplicable, e.to_string()),
        }
    }
    if v.all_pass(|_| true) {
        v.conclusions.push(Conclusion::SingleSolutionForAllC);
    }
    v
}

/// Class analyses for every class of a decomposed mass-action system.
pub fn analyze_decomposition(dec: &Decomposition) -> Result<(PolySystem, MonomialStructure, Vec<Result<ClassAnalysis>>)> {
    let sys = PolySystem::from_decomposition(dec);
    let ms = monomial_structure(&sys)?;
    let classes = (0..sys.class_count()).map(|j| analyze_class(&sys, &ms, j)).collect();
    Ok((sys, ms, classes))
}

fn applicability(dec: &Decomposition) -> Option<&'static str> {
    if !dec.independent_ok {
        Some("subnetworks not independent")
    } else if !dec.connected_ok {
        Some("subnetworks not connected")
    } else {
        None
    }
}

/// The dependency-one theorem for mass-action systems.
pub fn check_mass_action(dec: &Decomposition) -> TheoremVerdict {
    if let Some(reason) = applicability(dec) {
        return TheoremVerdict::not_applicable(TheoremId::Dep1MassAction, reason);
    }
    let mut v = TheoremVerdict::new(TheoremId::Dep1MassAction);
    let (status, witness) = positive_kernel_condition(&dec.combined.gamma);
    v.push("(I) ker Γ_k ∩ R^{V⊔_s}_> ≠ ∅", status, witness);

    let nspecies = dec.combined.y.rows();
    let l = dec.monomial_difference_space();
    let s = crate::ratlin::Subspace::sum_all(nspecies, &dec.subnetworks.iter().map(|s| s.s.clone()).collect::<Vec<_>>());
    let k = crate::ratlin::Subspace::column_space(&dec.combined.gamma);
    v.push("(IIa) K = L", Status::from_bool(k == l), format!("dim K = {}, dim L = {}", k.dim(), l.dim()));
    v.push("(IIb) L = S", Status::from_bool(l == s), format!("dim L = {}, dim S = {}", l.dim(), s.dim()));

    let analyses = analyze_decomposition(dec).map(|(_, _, c)| c);
    for (j, sub) in dec.subnetworks.iter().enumerate() {
        let prefix = format!("(III) class {}", j + 1);
        let kl = sub.k == sub.l;
        v.push(
            format!("{prefix}: d_j ≤ 1 and K_j = L_j"),
            Status::from_bool(sub.d <= 1 && kl),
            format!("d_j = {}, dim K_j = {}, dim L_j = {}", sub.d, sub.k.dim(), sub.l.dim()),
        );
        match analyses.as_ref().map(|a| &a[j]) {
            Ok(Ok(ca)) => {
                debug_assert_eq!(ca.dim_p == ca.d, sub.k.dim() == sub.l.dim());
                if ca.dim_p <= 1 {
                    debug_assert!(sub.t_prime <= 1);
                }
                v.diagnostics.push(format!("class {}: dim P_j = {}, t′_j = {}", j + 1, ca.dim_p, sub.t_prime));
                if sub.d <= 1 && kl {
                    class_conditions(&mut v, &prefix, ca);
                }
            }
            Ok(Err(e)) => {
                if sub.d == 1 {
                    v.push(format!("{prefix}: b̃ sign conditions"), Status::NotApplicable, e.to_string());
                }
            }
            Err(e) => v.push(format!("{prefix}: b̃ sign conditions"), Status::NotApplicable, e.to_string()),
        }
    }
    let core = v.all_pass(|c| !c.label.starts_with("(IIa)") && !c.label.starts_with("(IIb)"));
    if core {
        if v.condition("(IIa)").is_some_and(|c| c.status == Status::Pass) {
            v.conclusions.push(Conclusion::UniquePerKineticClass);
        }
        if v.condition("(IIb)").is_some_and(|c| c.status == Status::Pass) {
            v.conclusions.push(Conclusion::UniquePerStoichiometricClass);
        }
    }
    v
}

/// Consequences of one terminal strong component for a single
/// independent subnetwork with a positive kernel point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneComponentLemma {
    pub k_equals_l: bool,
    pub l_equals_s: bool,
    /// `d = δ + t′ − 1`.
    pub dependency_identity: bool,
}

impl OneComponentLemma {
    pub fn holds(&self) -> bool {
        self.k_equals_l && self.l_equals_s && self.dependency_identity
    }
}

/// Evaluates the lemma when its hypotheses `t = 1` and
/// `ker Γ_k ∩ R_> ≠ ∅` hold; `None` otherwise.
pub fn one_component_lemma(sub: &Subnetwork) -> Option<OneComponentLemma> {
    if sub.t != 1 || strictly_positive_kernel_point(&sub.gamma).is_none() {
        return None;
    }
    Some(OneComponentLemma {
        k_equals_l: sub.k == sub.l,
        l_equals_s: sub.l == sub.s,
        dependency_identity: sub.d as i64 == sub.delta as i64 + sub.t_prime as i64 - 1,
    })
}

/// The deficiency-one theorem for independent subnetworks.
pub fn check_deficiency_one(dec: &Decomposition) -> TheoremVerdict {
    if let Some(reason) = applicability(dec) {
        return TheoremVerdict::not_applicable(TheoremId::Def1, reason);
    }
    let mut v = TheoremVerdict::new(TheoremId::Def1);
    for (j, sub) in dec.subnetworks.iter().enumerate() {
        let n = j + 1;
        v.push(format!("(i) δ_{n} ≤ 1"), Status::from_bool(sub.delta <= 1), format!("δ_{n} = {}", sub.delta));
        v.push(format!("(ii) t_{n} = 1"), Status::from_bool(sub.t == 1), format!("t_{n} = {}", sub.t));
    }
    let weakly_reversible = dec.subnetworks.iter().all(|s| s.weakly_reversible);
    let (status, mut witness) = positive_kernel_condition(&dec.combined.gamma);
    if weakly_reversible {
        witness.push_str("; weakly reversible, so this holds for all k");
    }
    v.push("(iii) positive equilibrium exists", status, witness);
    for (j, sub) in dec.subnetworks.iter().enumerate() {
        if let Some(lemma) = one_component_lemma(sub) {
            debug_assert!(lemma.holds(), "one-component lemma violated in class {}", j + 1);
            v.diagnostics.push(format!(
                "class {}: K = L = S {}, d = δ + t′ − 1 ({} = {} + {} − 1) {}",
                j + 1,
                if lemma.k_equals_l && lemma.l_equals_s { "holds" } else { "VIOLATED" },
                sub.d,
                sub.delta,
                sub.t_prime,
                if lemma.dependency_identity { "holds" } else { "VIOLATED" },
            ));
        }
    }
    if v.all_pass(|_| true) {
        v.conclusions.push(Conclusion::UniquePerStoichiometricClass);
        if weakly_reversible {
            v.conclusions.push(Conclusion::ExistsForAllK);
        }
    }
    v
}

/// `h(t) = Σ b̃_i q̃_i / (1 + t q̃_i)`, the logarithmic derivative of `f`.
pub fn log_derivative(q_tilde: &[Rat], b_tilde: &[Rat], t: f64) -> f64 {
    q_tilde.iter().zip(b_tilde).map(|(q, b)| to_f64(b) * to_f64(q) / (1.0 + t * to_f64(q))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, unit};
    use crate::decomp::finest_independent_decomposition;
    use crate::ratlin::{ri, rq, rvec, RatMatrix};

    #[test]
    fn class_condition_gates_the_conclusions() {
        let sys = crate::netio::parse_network("0 -> X1, k = 1\nX1 -> 2X1, k = 1\n2X1 -> 3X1, k = 1\n3X1 -> 0, k = 1\n").unwrap();
        let v = check_mass_action(&finest_independent_decomposition(&sys));
        assert_eq!(v.condition("(I)").unwrap().status, Status::Pass);
        assert_eq!(v.condition("(IIb)").unwrap().status, Status::Pass);
        assert_eq!(v.condition("(III)").unwrap().status, Status::Fail);
        assert!(v.conclusions.is_empty());
        assert_eq!(v.outcome(), Outcome::Fail);
    }

    fn path_class() -> ClassAnalysis {
        let dec = finest_independent_decomposition(&catalog::deficiency_two_path(unit()));
        let (_, _, mut classes) = analyze_decomposition(&dec).unwrap();
        classes.remove(0).unwrap()
    }

    fn synthetic(b_tilde: &[i64]) -> ClassAnalysis {
        let w = b_tilde.len() as i64;
        let q_tilde: Vec<Rat> = (0..w).map(|i| rq(w - 1 - 2 * i, w - 1)).collect();
        let b_tilde = rvec(b_tilde);
        let partial = partial_sums(&b_tilde);
        let branch = sign_branch(&partial);
        ClassAnalysis {
            class_index: 0,
            dim_p: 1,
            d: 1,
            vertices: None,
            point: None,
            q: q_tilde.clone(),
            order: (0..w as usize).collect(),
            eq_classes: (0..w as usize).map(|i| vec![i]).collect(),
            q_tilde,
            b: b_tilde.clone(),
            endpoints_ok: endpoints_product(&b_tilde).is_negative(),
            b_tilde,
            partial_sums: partial,
            branch,
            partial_sums_ok: branch != SignBranch::Mixed,
        }
    }

    #[test]
    fn path_class_lumping() {
        let ca = path_class();
        assert_eq!(ca.q, vec![ri(1), ri(1), ri(0), ri(-1)]);
        assert_eq!(ca.b, rvec(&[1, 3, -1, -3]));
        assert_eq!(ca.b_tilde, rvec(&[4, -1, -3]));
        assert_eq!(ca.partial_sums, rvec(&[4, 3]));
        assert!(ca.partial_sums_ok && ca.endpoints_ok);
        assert_eq!(check_one_class(&ca).outcome(), Outcome::Pass);
        assert_eq!(check_existence(&ca).conclusions, vec![Conclusion::ExistsForAllC]);
    }

    #[test]
    fn path_class_c_star() {
        let ca = path_class();
        let cs = c_star(&ca, &[1.0; 4]).unwrap();
        assert!((cs - 32.0).abs() < 1e-12);
        let c = coefficients_for_c_star(&ca, 5.0).unwrap();
        assert!((c_star(&ca, &c).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn two_terminal_class() {
        let dec = finest_independent_decomposition(&catalog::two_terminal_components(unit()));
        let (_, _, classes) = analyze_decomposition(&dec).unwrap();
        let ca = classes[0].as_ref().unwrap();
        assert_eq!(ca.q, vec![ri(1), ri(1), rq(-1, 3), ri(-1)]);
        assert_eq!(ca.b, rvec(&[1, 2, -2, -1]));
        assert_eq!(ca.b_tilde, rvec(&[3, -2, -1]));
        assert_eq!(ca.partial_sums, rvec(&[3, 1]));
    }

    #[test]
    fn synthetic_one_class_cases() {
        assert_eq!(check_one_class(&synthetic(&[1, -3, 2])).outcome(), Outcome::Fail);
        let v = check_one_class(&synthetic(&[2, -2]));
        assert_eq!(v.outcome(), Outcome::Pass);
        assert_eq!(check_one_class(&synthetic(&[-2, 1, 1])).outcome(), Outcome::Pass);
    }

    #[test]
    fn existence_cases() {
        assert_eq!(ExistenceCase::classify(&rvec(&[0, 1, -1])), ExistenceCase::FirstZeroLastNegative);
        assert_eq!(ExistenceCase::classify(&rvec(&[-1, 2, -1])), ExistenceCase::BothNegative);
        assert_eq!(ExistenceCase::classify(&rvec(&[1, -2, 1])), ExistenceCase::BothPositive);
        let v = check_existence(&synthetic(&[0, 1, -1]));
        assert_eq!(v.outcome(), Outcome::Fail);
        assert!(v.conditions[0].witness.contains("b̃₁ = 0 and b̃_ω < 0"));
        let v = check_existence(&synthetic(&[-1, 2, -1]));
        assert!(v.conditions[0].witness.contains("b̃₁ < 0 and b̃_ω < 0"));
    }

    #[test]
    fn unreachable_targets_are_unreachable() {
        for bt in [[0, 1, -1], [-1, 2, -1], [1, -2, 1], [0, 0, 0], [1, -1, 0], [-1, 1, 0], [0, -1, 1]] {
            let ca = synthetic(&bt);
            let (case, cs) = unreachable_c_star(&ca.q_tilde, &ca.b_tilde).unwrap();
            let above = case.bounded_above().unwrap();
            for i in 1..10_000 {
                let t = -1.0 + 2.0 * i as f64 / 10_000.0;
                let lf: f64 = ca.q_tilde.iter().zip(&ca.b_tilde).map(|(q, b)| to_f64(b) * (1.0 + t * to_f64(q)).ln()).sum();
                if above {
                    assert!(lf < cs.ln(), "{bt:?} t={t}");
                } else {
                    assert!(lf > cs.ln(), "{bt:?} t={t}");
                }
            }
        }
        assert!(unreachable_c_star(&synthetic(&[4, -1, -3]).q_tilde, &rvec(&[4, -1, -3])).is_none());
    }

    #[test]
    fn mass_action_path() {
        let dec = finest_independent_decomposition(&catalog::deficiency_two_path(unit()));
        let v = check_mass_action(&dec);
        assert_eq!(v.outcome(), Outcome::Pass);
        assert!(v.conclusions.contains(&Conclusion::UniquePerStoichiometricClass));
        let d = check_deficiency_one(&dec);
        assert_eq!(d.outcome(), Outcome::Fail);
        assert_eq!(d.condition("(i)").unwrap().status, Status::Fail);
    }

    #[test]
    fn mass_action_two_terminal_threshold() {
        let pass = catalog::two_terminal_components(unit());
        let fail = pass.with_rates(&[("k15".into(), ri(4))]).unwrap();
        let v = check_mass_action(&finest_independent_decomposition(&pass));
        assert_eq!(v.condition("(I)").unwrap().status, Status::Pass);
        let v = check_mass_action(&finest_independent_decomposition(&fail));
        assert_eq!(v.condition("(I)").unwrap().status, Status::Fail);
        assert_eq!(v.outcome(), Outcome::Fail);
        let d = check_deficiency_one(&finest_independent_decomposition(&pass));
        assert_eq!(d.condition("(i)").unwrap().status, Status::Fail);
        assert_eq!(d.condition("(ii)").unwrap().status, Status::Fail);
    }

    #[test]
    fn mass_action_singleton_terminals() {
        let base = catalog::two_singleton_terminals(unit());
        let pass = base.with_rates(&[("k32".into(), ri(3))]).unwrap();
        let v = check_mass_action(&finest_independent_decomposition(&pass));
        assert_eq!(v.outcome(), Outcome::Pass, "{v:?}");
        let v = check_mass_action(&finest_independent_decomposition(&base));
        assert_eq!(v.outcome(), Outcome::Fail);
    }

    #[test]
    fn deficiency_zero_pair() {
        let v = check_deficiency_one(&finest_independent_decomposition(&catalog::reversible_pair()));
        assert_eq!(v.conclusions, vec![Conclusion::UniquePerStoichiometricClass, Conclusion::ExistsForAllK]);
    }

    #[test]
    fn decomposable_polynomial_system() {
        let sys = PolySystem::new(
            RatMatrix::from_i64(&[&[1, 1, -1, 1], &[1, -1, 0, 0]]),
            RatMatrix::from_i64(&[&[0, 2, 3, 1], &[0, 1, 0, 1]]),
            vec![4],
            vec![1.0; 4],
        )
        .unwrap();
        assert_eq!(check_decomposable(&sys).outcome(), Outcome::Pass);
    }
}
