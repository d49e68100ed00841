//! Seeded randomized self-checks on one network: random rate constants,
//! anchors and coefficients, each run through the structural identities,
//! the salt certificates and the equilibrium pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{decomposition_checks, finest_independent_decomposition};
use crate::depone::{analyze_decomposition, check_mass_action, check_one_class, one_component_lemma, Conclusion};
use crate::equilib::{solve_equilibrium, solve_univariate, ClassKind, UnivariateProfile, EQUILIBRIUM_TOL};
use crate::netio::salt_report;
use crate::network::{structural_report, MassActionSystem};
use crate::ratlin::{to_f64, Rat, Subspace};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl CheckTally {
    fn record(&mut self, outcome: Option<std::result::Result<(), String>>) {
        match outcome {
            None => self.skipped += 1,
            Some(Ok(())) => self.passed += 1,
            Some(Err(msg)) => {
                self.failed += 1;
                self.first_failure.get_or_insert(msg);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckTally>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }
}

fn random_rate(rng: &mut impl Rng) -> Rat {
    Rat::new(rng.gen_range(1..=20).into(), rng.gen_range(1..=10).into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn structural(sys: &MassActionSystem) -> std::result::Result<(), String> {
    let r = structural_report(sys);
    ensure(r.d == r.d_via_cayley, || format!("d = {} but Cayley kernel has dim {}", r.d, r.d_via_cayley))?;
    ensure(r.t != r.linkage_classes || r.k_equals_s, || "t = l but K ≠ S".into())?;
    ensure(r.dim_ker_laplacian == r.t_prime, || format!("dim ker R_k = {} ≠ t′ = {}", r.dim_ker_laplacian, r.t_prime))
}

fn decomposition(sys: &MassActionSystem) -> Option<std::result::Result<(), String>> {
    let dec = finest_independent_decomposition(sys);
    let checks = decomposition_checks(sys, &dec).ok()?;
    Some(ensure(checks.all_hold(), || format!("violated: {:?}", checks.failures())))
}

fn lemma(sys: &MassActionSystem) -> Option<std::result::Result<(), String>> {
    let dec = finest_independent_decomposition(sys);
    let results: Vec<_> = dec.subnetworks.iter().filter_map(one_component_lemma).collect();
    if results.is_empty() {
        return None;
    }
    Some(ensure(results.iter().all(|l| l.holds()), || format!("{results:?}")))
}

fn random_anchor(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.2..5.0)).collect()
}

/// A positive point of `anchor + S`, other than `anchor` when `S ≠ 0`.
fn shift_within(rng: &mut impl Rng, anchor: &[f64], s: &Subspace) -> Vec<f64> {
    let mut v = vec![0.0; anchor.len()];
    for b in s.basis() {
        let w: f64 = rng.gen_range(-1.0..1.0);
        for (vi, bi) in v.iter_mut().zip(&b) {
            *vi += w * to_f64(bi);
        }
    }
    let worst = anchor.iter().zip(&v).map(|(a, d)| if *d < 0.0 { -d / a } else { 0.0 }).fold(0.0, f64::max);
    let scale = if worst > 0.5 { 0.5 / worst } else { 1.0 };
    anchor.iter().zip(&v).map(|(a, d)| a + scale * d).collect()
}

fn equilibrium(sys: &MassActionSystem, rng: &mut impl Rng) -> Option<std::result::Result<(), String>> {
    let dec = finest_independent_decomposition(sys);
    let verdict = check_mass_action(&dec);
    if !verdict.conclusions.contains(&Conclusion::UniquePerStoichiometricClass) {
        return None;
    }
    let n = sys.network().species_count();
    let anchor = random_anchor(rng, n);
    let run = |a: &[f64]| solve_equilibrium(sys, &dec, &verdict, a, ClassKind::Stoichiometric).map_err(|e| e.to_string());
    let mut check = || -> std::result::Result<(), String> {
        let eq = run(&anchor)?;
        ensure(eq.relative_residual <= EQUILIBRIUM_TOL, || format!("relative residual {:e}", eq.relative_residual))?;
        ensure(eq.membership.0 <= EQUILIBRIUM_TOL && eq.membership.1 <= EQUILIBRIUM_TOL, || {
            format!("membership errors {:?}", eq.membership)
        })?;
        let s = structural_report(sys).s;
        let moved = shift_within(rng, &anchor, &s);
        let again = run(&moved)?;
        let gap = eq.x.iter().zip(&again.x).map(|(a, b)| (a - b).abs() / a.abs().max(1.0)).fold(0.0, f64::max);
        ensure(gap <= 1e-7, || format!("equilibrium moved by {gap:e} under a shift within S"))
    };
    Some(check())
}

fn univariate(sys: &MassActionSystem, rng: &mut impl Rng) -> Option<std::result::Result<(), String>> {
    let dec = finest_independent_decomposition(sys);
    let (_, _, classes) = analyze_decomposition(&dec).ok()?;
    let mut ran = false;
    for ca in classes.into_iter().flatten() {
        if ca.d != 1 || ca.dim_p != 1 || check_one_class(&ca).conclusions.is_empty() {
            continue;
        }
        ran = true;
        let c: Vec<f64> = (0..ca.q.len()).map(|_| (rng.gen_range(-3.0..3.0f64)).exp()).collect();
        let outcome = UnivariateProfile::from_class(&ca, &c).and_then(|p| solve_univariate(&p));
        if let Err(e) = outcome {
            return Some(Err(format!("class {}: {e}", ca.class_index + 1)));
        }
    }
    ran.then_some(Ok(()))
}

/// Runs `trials` rounds of randomized checks with the given seed.
pub fn verify_network(sys: &MassActionSystem, trials: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["dependency identities", "decomposition identities", "one-component lemma", "salt certificates", "equilibrium", "univariate roots"];
    let mut checks: Vec<CheckTally> = names.iter().map(|&name| CheckTally { name, ..Default::default() }).collect();
    for _ in 0..trials {
        let k: Vec<Rat> = (0..sys.graph().edge_count()).map(|_| random_rate(&mut rng)).collect();
        let trial = MassActionSystem::new(sys.network().clone(), k).expect("random rates are positive");
        checks[0].record(Some(structural(&trial)));
        checks[1].record(decomposition(&trial));
        checks[2].record(lemma(&trial));
        checks[3].record(Some(salt_report(&trial).map(|_| ()).map_err(|e| e.to_string())));
        checks[4].record(equilibrium(&trial, &mut rng));
        checks[5].record(univariate(&trial, &mut rng));
    }
    VerifyReport { seed, trials, checks }
}
