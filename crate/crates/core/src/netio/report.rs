//! Analysis and salt reports, emitted as JSON or text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::decomp::{finest_independent_decomposition, Decomposition};
use crate::depone::{analyze_decomposition, Outcome, TheoremVerdict};
use crate::equilib::{ClassKind, EquilibriumResult};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::network::{structural_report, MassActionSystem};
use crate::ratlin::fmt_rat;
use crate::salt::all_certificates;

use super::json::{network_to_json_value, to_json_string, NetworkJson};

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralSummary {
    pub species: usize,
    pub vertices: usize,
    pub source_vertices: usize,
    pub reactions: usize,
    pub dim_s: usize,
    pub dim_k: usize,
    pub dim_l: usize,
    pub linkage_classes: usize,
    pub t: usize,
    pub t_prime: usize,
    pub delta: usize,
    pub d: usize,
    pub d_via_cayley: usize,
    pub dim_ker_laplacian: usize,
    pub weakly_reversible: bool,
    pub k_equals_s: bool,
    pub l_equals_s: bool,
    pub k_equals_l: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    /// 1-based.
    pub index: usize,
    pub reactions: Vec<String>,
    pub delta: usize,
    pub d: usize,
    pub t: usize,
    pub t_prime: usize,
    pub linkage_classes: usize,
    pub weakly_reversible: bool,
    pub dim_p: Option<usize>,
    pub q: Vec<String>,
    pub q_tilde: Vec<String>,
    pub b: Vec<String>,
    pub b_tilde: Vec<String>,
    pub partial_sums: Vec<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub connected: bool,
    pub independent: bool,
    pub classes: Vec<ClassRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    /// `stoichiometric` or `kinetic`.
    pub class_kind: String,
    pub anchor: Vec<f64>,
    pub x: Vec<f64>,
    pub x_star: Vec<f64>,
    pub t_roots: Vec<Option<f64>>,
    pub residual: f64,
    pub relative_residual: f64,
    pub affine_error: f64,
    pub fiber_error: f64,
    pub birch_iterations: usize,
}

impl From<&EquilibriumResult> for EquilibriumSummary {
    fn from(r: &EquilibriumResult) -> Self {
        Self {
            class_kind: match r.kind {
                ClassKind::Stoichiometric => "stoichiometric".into(),
                ClassKind::Kinetic => "kinetic".into(),
            },
            anchor: r.anchor.clone(),
            x: r.x.clone(),
            x_star: r.x_star.clone(),
            t_roots: r.t_roots.clone(),
            residual: r.residual,
            relative_residual: r.relative_residual,
            affine_error: r.membership.0,
            fiber_error: r.membership.1,
            birch_iterations: r.birch_iterations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub network: NetworkJson,
    pub structural: StructuralSummary,
    pub decomposition: DecompositionSummary,
    pub verdicts: Vec<TheoremVerdict>,
    pub equilibrium: Option<EquilibriumSummary>,
}

fn strings(v: &[crate::ratlin::Rat]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

fn class_rows(sys: &MassActionSystem, dec: &Decomposition) -> Vec<ClassRow> {
    let labels = sys.network().edge_labels();
    let analyses = analyze_decomposition(dec).map(|(_, _, c)| c);
    dec.subnetworks
        .iter()
        .enumerate()
        .map(|(j, sub)| {
            let mut row = ClassRow {
                index: j + 1,
                reactions: sub.edges.iter().map(|&e| labels[e].clone()).collect(),
                delta: sub.delta,
                d: sub.d,
                t: sub.t,
                t_prime: sub.t_prime,
                linkage_classes: sub.linkage_classes,
                weakly_reversible: sub.weakly_reversible,
                dim_p: None,
                q: Vec::new(),
                q_tilde: Vec::new(),
                b: Vec::new(),
                b_tilde: Vec::new(),
                partial_sums: Vec::new(),
                note: None,
            };
            match analyses.as_ref().map(|a| &a[j]) {
                Ok(Ok(ca)) => {
                    row.dim_p = Some(ca.dim_p);
                    row.q = strings(&ca.q);
                    row.q_tilde = strings(&ca.q_tilde);
                    row.b = strings(&ca.b);
                    row.b_tilde = strings(&ca.b_tilde);
                    row.partial_sums = strings(&ca.partial_sums);
                }
                Ok(Err(e)) | Err(e) => row.note = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// Structural summary and per-class table, with no verdicts attached.
pub fn build_report(sys: &MassActionSystem) -> AnalysisReport {
    let r = structural_report(sys);
    let dec = finest_independent_decomposition(sys);
    AnalysisReport {
        schema_version: SCHEMA_VERSION,
        network: network_to_json_value(sys),
        structural: StructuralSummary {
            species: sys.network().species_count(),
            vertices: r.vertex_count,
            source_vertices: r.source_count,
            reactions: sys.graph().edge_count(),
            dim_s: r.s.dim(),
            dim_k: r.k.dim(),
            dim_l: r.l.dim(),
            linkage_classes: r.linkage_classes,
            t: r.t,
            t_prime: r.t_prime,
            delta: r.delta,
            d: r.d,
            d_via_cayley: r.d_via_cayley,
            dim_ker_laplacian: r.dim_ker_laplacian,
            weakly_reversible: r.weakly_reversible,
            k_equals_s: r.k_equals_s,
            l_equals_s: r.l_equals_s,
            k_equals_l: r.k_equals_l,
        },
        decomposition: DecompositionSummary {
            connected: dec.connected_ok,
            independent: dec.independent_ok,
            classes: class_rows(sys, &dec),
        },
        verdicts: Vec::new(),
        equilibrium: None,
    }
}

pub fn report_from_json(text: &str) -> Result<AnalysisReport> {
    let report: AnalysisReport = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::Json(format!("unsupported schema_version {}", report.schema_version)));
    }
    Ok(report)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn tuple(items: &[String]) -> String {
    format!("({})", items.join(", "))
}

fn float_tuple(v: &[f64]) -> String {
    tuple(&v.iter().map(|x| format!("{x}")).collect::<Vec<_>>())
}

pub fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::NotApplicable => "NOT APPLICABLE",
    }
}

fn write_verdict(out: &mut String, v: &TheoremVerdict) {
    let _ = writeln!(out, "verdict {}: {}", v.theorem, outcome_label(v.outcome()));
    for c in &v.conditions {
        let _ = writeln!(out, "  [{}] {}  ({})", c.status, c.label, c.witness);
    }
    for note in &v.diagnostics {
        let _ = writeln!(out, "  note: {note}");
    }
    if v.conclusions.is_empty() {
        let _ = writeln!(out, "  conclusion: none");
    }
    for c in &v.conclusions {
        let _ = writeln!(out, "  conclusion: {c}");
    }
}

fn text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let net = &report.network;
    let _ = writeln!(out, "network");
    let _ = writeln!(out, "  species: {}", net.species.join(", "));
    let label = |row: &[String]| {
        let terms: Vec<String> = row
            .iter()
            .zip(&net.species)
            .filter(|(c, _)| c.as_str() != "0")
            .map(|(c, s)| if c == "1" { s.clone() } else { format!("{c} {s}") })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    };
    for r in &net.reactions {
        let _ = writeln!(
            out,
            "  {}: {} -> {}, k = {}",
            r.label.as_deref().unwrap_or("?"),
            label(&net.complexes[r.source]),
            label(&net.complexes[r.target]),
            r.k
        );
    }

    let s = &report.structural;
    let _ = writeln!(out, "structural");
    for (name, value) in [
        ("species", s.species.to_string()),
        ("vertices", s.vertices.to_string()),
        ("source vertices", s.source_vertices.to_string()),
        ("reactions", s.reactions.to_string()),
        ("dim S", s.dim_s.to_string()),
        ("dim K", s.dim_k.to_string()),
        ("dim L", s.dim_l.to_string()),
        ("l", s.linkage_classes.to_string()),
        ("t", s.t.to_string()),
        ("t'", s.t_prime.to_string()),
        ("delta", s.delta.to_string()),
        ("d", s.d.to_string()),
        ("dim ker R_k", s.dim_ker_laplacian.to_string()),
    ] {
        let _ = writeln!(out, "  {name} = {value}");
    }
    let _ = writeln!(out, "  weakly reversible: {}", yes_no(s.weakly_reversible));
    let _ = writeln!(out, "  K = S: {}", yes_no(s.k_equals_s));
    let _ = writeln!(out, "  L = S: {}", yes_no(s.l_equals_s));
    let _ = writeln!(out, "  K = L: {}", yes_no(s.k_equals_l));

    let dec = &report.decomposition;
    let n = dec.classes.len();
    let _ = writeln!(
        out,
        "decomposition: {n} class{}, subnetworks {}connected, {}independent",
        if n == 1 { "" } else { "es" },
        if dec.connected { "" } else { "not " },
        if dec.independent { "" } else { "not " },
    );
    for row in &dec.classes {
        let _ = writeln!(out, "  class {}: {}", row.index, row.reactions.join(", "));
        let _ = writeln!(out, "    delta = {}", row.delta);
        let _ = writeln!(out, "    d = {}", row.d);
        let _ = writeln!(out, "    l = {}", row.linkage_classes);
        let _ = writeln!(out, "    t = {}", row.t);
        let _ = writeln!(out, "    t' = {}", row.t_prime);
        if let Some(p) = row.dim_p {
            let _ = writeln!(out, "    dim P = {p}");
        }
        if !row.q.is_empty() {
            let _ = writeln!(out, "    q = {}", tuple(&row.q));
            let _ = writeln!(out, "    q_tilde = {}", tuple(&row.q_tilde));
        }
        if !row.b.is_empty() {
            let _ = writeln!(out, "    b = {}", tuple(&row.b));
            let _ = writeln!(out, "    b_tilde = {}", tuple(&row.b_tilde));
            let _ = writeln!(out, "    partial sums = {}", tuple(&row.partial_sums));
        }
        if let Some(note) = &row.note {
            let _ = writeln!(out, "    note: {note}");
        }
    }

    for v in &report.verdicts {
        write_verdict(&mut out, v);
    }

    if let Some(e) = &report.equilibrium {
        let _ = writeln!(out, "equilibrium ({} class of the anchor)", e.class_kind);
        let _ = writeln!(out, "  anchor = {}", float_tuple(&e.anchor));
        let _ = writeln!(out, "  x = {}", float_tuple(&e.x));
        let _ = writeln!(out, "  x* = {}", float_tuple(&e.x_star));
        for (j, t) in e.t_roots.iter().enumerate() {
            match t {
                Some(t) => {
                    let _ = writeln!(out, "  class {} root t = {t}", j + 1);
                }
                None => {
                    let _ = writeln!(out, "  class {}: single polytope point", j + 1);
                }
            }
        }
        let _ = writeln!(out, "  residual = {:e}", e.residual);
        let _ = writeln!(out, "  relative residual = {:e}", e.relative_residual);
        let _ = writeln!(out, "  affine membership error = {:e}", e.affine_error);
        let _ = writeln!(out, "  fiber membership error = {:e}", e.fiber_error);
        let _ = writeln!(out, "  Newton iterations = {}", e.birch_iterations);
    }
    out
}

pub fn emit_report(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => to_json_string(report),
        Format::Text => text(report),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaltEntry {
    /// Terminal component, as complexes.
    pub terminal: Vec<String>,
    /// Vertex ordering, as complexes.
    pub ordering: Vec<String>,
    /// `q̂` along the ordering.
    pub q_hat: Vec<String>,
    /// `β = R_k 1` along the ordering.
    pub beta: Vec<String>,
    pub partial_sums: Vec<String>,
    /// 1-based positions where `q̂` strictly descends.
    pub strict_positions: Vec<usize>,
    pub t_equals_v: bool,
    pub nonnegative_ok: bool,
    pub strict_ok: bool,
    pub total_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaltReport {
    pub schema_version: u32,
    pub certificates: Vec<SaltEntry>,
}

/// Certificates for every terminal component containing a source vertex,
/// one connected component at a time.
pub fn salt_report(sys: &MassActionSystem) -> Result<SaltReport> {
    let g = sys.graph();
    let net = sys.network();
    let mut certificates = Vec::new();
    for comp in g.components() {
        let edge_ids: Vec<usize> = (0..g.edge_count()).filter(|&e| comp.contains(&g.edges()[e].0)).collect();
        if edge_ids.is_empty() {
            continue;
        }
        let (sub, vertices): (Digraph, Vec<usize>) = g.edge_subgraph(&edge_ids);
        let k: Vec<_> = edge_ids.iter().map(|&e| sys.rates()[e].clone()).collect();
        for c in all_certificates(&sub, &k)? {
            let name = |v: usize| net.complex_label(vertices[v]);
            certificates.push(SaltEntry {
                terminal: c.terminal.iter().map(|&v| name(v)).collect(),
                ordering: c.ordering.iter().map(|&v| name(v)).collect(),
                q_hat: c.ordering.iter().map(|&v| fmt_rat(&c.q_hat[v])).collect(),
                beta: c.ordering.iter().map(|&v| fmt_rat(&c.beta[v])).collect(),
                partial_sums: strings(&c.partial_sums),
                strict_positions: c.strict_positions.iter().map(|i| i + 1).collect(),
                t_equals_v: c.t_equals_v,
                nonnegative_ok: c.nonnegative_ok,
                strict_ok: c.strict_ok,
                total_ok: c.total_ok,
            });
        }
    }
    Ok(SaltReport { schema_version: SCHEMA_VERSION, certificates })
}

pub fn emit_salt_report(report: &SaltReport, format: Format) -> String {
    if format == Format::Json {
        return to_json_string(report);
    }
    let mut out = String::new();
    if report.certificates.is_empty() {
        out.push_str("no terminal component contains a source vertex\n");
    }
    for c in &report.certificates {
        let _ = writeln!(out, "terminal component {{{}}}", c.terminal.join(", "));
        let _ = writeln!(out, "  ordering = ({})", c.ordering.join(", "));
        let _ = writeln!(out, "  q_hat = {}", tuple(&c.q_hat));
        let _ = writeln!(out, "  beta = {}", tuple(&c.beta));
        let _ = writeln!(out, "  partial sums over T = {}", tuple(&c.partial_sums));
        let _ = writeln!(out, "  strict descents at {:?}", c.strict_positions);
        let _ = writeln!(out, "  [{}] partial sums ≥ 0", if c.nonnegative_ok { "pass" } else { "FAIL" });
        let _ = writeln!(out, "  [{}] partial sum > 0 at each strict descent", if c.strict_ok { "pass" } else { "FAIL" });
        let _ = writeln!(
            out,
            "  [{}] total is zero exactly when T = V (T = V: {})",
            if c.total_ok { "pass" } else { "FAIL" },
            yes_no(c.t_equals_v)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, unit};
    use crate::depone::check_mass_action;
    use crate::equilib::solve_equilibrium;

    fn has_line(text: &str, line: &str) -> bool {
        text.lines().any(|l| l.trim() == line)
    }

    #[test]
    fn path_text_report() {
        let sys = catalog::deficiency_two_path(unit());
        let mut report = build_report(&sys);
        report.verdicts.push(check_mass_action(&finest_independent_decomposition(&sys)));
        let text = emit_report(&report, Format::Text);
        assert!(has_line(&text, "delta = 2"), "{text}");
        assert!(has_line(&text, "d = 1"));
        assert!(has_line(&text, "b_tilde = (4, -1, -3)"));
        assert!(text.contains("conclusion: unique per stoichiometric class"));
    }

    #[test]
    fn empty_verdicts_serialize_as_empty_list() {
        let report = build_report(&catalog::reversible_pair());
        let json: serde_json::Value = serde_json::from_str(&emit_report(&report, Format::Json)).unwrap();
        assert_eq!(json["verdicts"], serde_json::json!([]));
        assert_eq!(json["schema_version"], serde_json::json!(SCHEMA_VERSION));
    }

    #[test]
    fn json_round_trip_with_equilibrium() {
        let sys = catalog::deficiency_two_path(unit());
        let dec = finest_independent_decomposition(&sys);
        let verdict = check_mass_action(&dec);
        let eq = solve_equilibrium(&sys, &dec, &verdict, &[1.0, 1.0], ClassKind::Stoichiometric).unwrap();
        let mut report = build_report(&sys);
        report.verdicts.push(verdict);
        report.equilibrium = Some((&eq).into());
        let text = emit_report(&report, Format::Json);
        assert_eq!(report_from_json(&text).unwrap(), report);
    }

    #[test]
    fn salt_report_per_component() {
        let sys = catalog::two_terminal_components(unit());
        let r = salt_report(&sys).unwrap();
        assert_eq!(r.certificates.len(), 1);
        assert_eq!(r.certificates[0].terminal, vec!["X2".to_string(), "3 X1".to_string()]);
        let text = emit_salt_report(&r, Format::Text);
        assert!(!text.contains("FAIL"));
    }
}
