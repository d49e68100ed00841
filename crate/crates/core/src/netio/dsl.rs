//! Line-oriented reaction DSL.
//!
//! ```text
//! # comment
//! species: X1, X2            (optional; fixes species order)
//! complexes: X1 | X1 + X2    (optional; fixes vertex order)
//! X1 <-> X1 + X2, kf = 1, kr = 1/2
//! X1 + X2 -> X2, k = 0.25
//! 0 <- X1, k = 1
//! k99: X2 -> 3 X1, k = 2     (explicit rate label)
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::network::{default_edge_label, MassActionSystem, ReactionNetwork};
use crate::ratlin::{fmt_rat, parse_rat, Rat};

/// A parsed network together with its source and any non-fatal notes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkDocument {
    pub source: String,
    pub system: MassActionSystem,
    /// `(line, message)`; line 0 means the document as a whole.
    pub diagnostics: Vec<(usize, String)>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `2X1`, `1/2 X2` or `X3` into coefficient text and species.
fn split_term(term: &str) -> Option<(&str, &str)> {
    if let Some((coeff, species)) = term.rsplit_once(char::is_whitespace) {
        return Some((coeff.trim(), species));
    }
    let start = term.find(|c: char| c.is_ascii_alphabetic() || c == '_')?;
    Some((&term[..start], &term[start..]))
}

type SparseComplex = Vec<(String, Rat)>;

fn parse_complex(text: &str, line: usize) -> Result<SparseComplex> {
    let text = text.trim();
    if text.is_empty() {
        return Err(perr(line, "empty complex"));
    }
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut terms: Vec<(String, Rat)> = Vec::new();
    for raw in text.split('+') {
        let term = raw.trim();
        let (coeff, species) = split_term(term).ok_or_else(|| perr(line, format!("malformed term `{term}`")))?;
        if !is_identifier(species) {
            return Err(perr(line, format!("malformed species name `{species}` in `{term}`")));
        }
        let coeff = if coeff.is_empty() {
            Rat::one()
        } else {
            parse_rat(coeff).map_err(|_| perr(line, format!("malformed coefficient `{coeff}` in `{term}`")))?
        };
        if !coeff.is_positive() {
            return Err(perr(line, format!("coefficient of `{species}` must be positive")));
        }
        match terms.iter_mut().find(|(s, _)| s == species) {
            Some((_, c)) => *c += coeff,
            None => terms.push((species.to_string(), coeff)),
        }
    }
    Ok(terms)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arrow {
    Forward,
    Backward,
    Both,
}

struct RawReaction {
    line: usize,
    label: Option<String>,
    lhs: SparseComplex,
    rhs: SparseComplex,
    arrow: Arrow,
    rates: BTreeMap<String, Rat>,
}

fn parse_rates(text: &str, line: usize) -> Result<BTreeMap<String, Rat>> {
    let mut rates = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item.split_once('=').ok_or_else(|| perr(line, format!("expected `name = value`, got `{item}`")))?;
        let key = key.trim().to_string();
        if !matches!(key.as_str(), "k" | "kf" | "kr") {
            return Err(perr(line, format!("unknown rate key `{key}` (expected k, kf or kr)")));
        }
        let value = parse_rat(value).map_err(|_| perr(line, format!("malformed rate constant `{}`", value.trim())))?;
        if !value.is_positive() {
            return Err(perr(line, format!("rate constant {key} = {} must be positive", fmt_rat(&value))));
        }
        if rates.insert(key.clone(), value).is_some() {
            return Err(perr(line, format!("rate key `{key}` given twice")));
        }
    }
    Ok(rates)
}

fn parse_reaction(text: &str, line: usize) -> Result<RawReaction> {
    let (label, body) = match text.split_once(':') {
        Some((l, b)) => {
            let l = l.trim();
            if !is_identifier(l) {
                return Err(perr(line, format!("malformed reaction label `{l}`")));
            }
            (Some(l.to_string()), b)
        }
        None => (None, text),
    };
    let (reaction, rates) = body.split_once(',').unwrap_or((body, ""));
    let (arrow, pos, len) = if let Some(p) = reaction.find("<->") {
        (Arrow::Both, p, 3)
    } else if let Some(p) = reaction.find("->") {
        (Arrow::Forward, p, 2)
    } else if let Some(p) = reaction.find("<-") {
        (Arrow::Backward, p, 2)
    } else {
        return Err(perr(line, "expected `->`, `<-` or `<->`"));
    };
    let rest = &reaction[pos + len..];
    if rest.contains("->") || rest.contains("<-") {
        return Err(perr(line, "one reaction per line"));
    }
    let lhs = parse_complex(&reaction[..pos], line)?;
    let rhs = parse_complex(rest, line)?;
    let rates = parse_rates(rates, line)?;
    let expected: &[&str] = if arrow == Arrow::Both { &["kf", "kr"] } else { &["k"] };
    for key in expected {
        if !rates.contains_key(*key) {
            return Err(perr(line, format!("missing rate constant `{key}`")));
        }
    }
    if let Some(extra) = rates.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(perr(line, format!("rate key `{extra}` does not fit this arrow")));
    }
    if arrow == Arrow::Both && label.is_some() {
        return Err(perr(line, "labels apply to single reactions; split `<->` into two lines"));
    }
    Ok(RawReaction { line, label, lhs, rhs, arrow, rates })
}

struct Builder {
    species: Vec<String>,
    species_fixed: bool,
    complexes: Vec<SparseComplex>,
    complex_lines: Vec<usize>,
}

impl Builder {
    fn species_index(&mut self, name: &str, line: usize) -> Result<usize> {
        if let Some(i) = self.species.iter().position(|s| s == name) {
            return Ok(i);
        }
        if self.species_fixed {
            return Err(perr(line, format!("species `{name}` not declared")));
        }
        self.species.push(name.to_string());
        Ok(self.species.len() - 1)
    }

    fn register(&mut self, complex: &SparseComplex, line: usize) -> Result<()> {
        for (s, _) in complex {
            self.species_index(s, line)?;
        }
        Ok(())
    }

    fn dense(&self, complex: &SparseComplex) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.species.len()];
        for (s, c) in complex {
            let i = self.species.iter().position(|x| x == s).expect("registered species");
            v[i] = c.clone();
        }
        v
    }
}

/// Parses the DSL or, when the text starts with `{`, the JSON format.
pub fn parse_network(text: &str) -> Result<MassActionSystem> {
    parse_document(text).map(|d| d.system)
}

pub fn parse_document(text: &str) -> Result<NetworkDocument> {
    if text.trim_start().starts_with('{') {
        let system = super::json::network_from_json(text)?;
        return Ok(NetworkDocument { source: text.to_string(), system, diagnostics: Vec::new() });
    }
    let mut b = Builder { species: Vec::new(), species_fixed: false, complexes: Vec::new(), complex_lines: Vec::new() };
    let mut declared_complexes: Option<Vec<(SparseComplex, usize)>> = None;
    let mut reactions = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(list) = content.strip_prefix("species:") {
            if b.species_fixed || !reactions.is_empty() || declared_complexes.is_some() {
                return Err(perr(line, "`species:` must come first and only once"));
            }
            for name in list.split(',').map(str::trim) {
                if !is_identifier(name) {
                    return Err(perr(line, format!("malformed species name `{name}`")));
                }
                if b.species.iter().any(|s| s == name) {
                    return Err(perr(line, format!("species `{name}` declared twice")));
                }
                b.species.push(name.to_string());
            }
            b.species_fixed = true;
        } else if let Some(list) = content.strip_prefix("complexes:") {
            if declared_complexes.is_some() || !reactions.is_empty() {
                return Err(perr(line, "`complexes:` must precede the reactions and appear once"));
            }
            let parsed = list.split('|').map(|c| parse_complex(c, line).map(|c| (c, line))).collect::<Result<Vec<_>>>()?;
            declared_complexes = Some(parsed);
        } else {
            reactions.push(parse_reaction(content, line)?);
        }
    }
    if reactions.is_empty() {
        return Err(perr(0, "no reactions"));
    }

    if let Some(list) = &declared_complexes {
        for (c, line) in list {
            b.register(c, *line)?;
        }
    }
    for r in &reactions {
        b.register(&r.lhs, r.line)?;
        b.register(&r.rhs, r.line)?;
    }
    if b.species.is_empty() {
        return Err(perr(0, "network has no species"));
    }

    let mut dense_complexes: Vec<Vec<Rat>> = Vec::new();
    let mut vertex_of = |c: &SparseComplex, line: usize, b: &mut Builder, declared: bool| -> Result<usize> {
        let dense = b.dense(c);
        if let Some(i) = dense_complexes.iter().position(|x| *x == dense) {
            if declared {
                return Err(perr(line, "complex listed twice in `complexes:`"));
            }
            return Ok(i);
        }
        dense_complexes.push(dense);
        b.complexes.push(c.clone());
        b.complex_lines.push(line);
        Ok(dense_complexes.len() - 1)
    };
    if let Some(list) = &declared_complexes {
        for (c, line) in list {
            vertex_of(c, *line, &mut b, true)?;
        }
    }
    let mut edges: Vec<(usize, usize, Option<String>, Rat, usize)> = Vec::new();
    for r in &reactions {
        let u = vertex_of(&r.lhs, r.line, &mut b, false)?;
        let v = vertex_of(&r.rhs, r.line, &mut b, false)?;
        if u == v {
            return Err(perr(r.line, "reactant and product complexes coincide"));
        }
        match r.arrow {
            Arrow::Forward => edges.push((u, v, r.label.clone(), r.rates["k"].clone(), r.line)),
            Arrow::Backward => edges.push((v, u, r.label.clone(), r.rates["k"].clone(), r.line)),
            Arrow::Both => {
                edges.push((u, v, None, r.rates["kf"].clone(), r.line));
                edges.push((v, u, None, r.rates["kr"].clone(), r.line));
            }
        }
    }
    let vertex_count = dense_complexes.len();
    if let Some(list) = &declared_complexes {
        let used: Vec<bool> = (0..vertex_count).map(|v| edges.iter().any(|e| e.0 == v || e.1 == v)).collect();
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(perr(list[v].1, "declared complex takes part in no reaction"));
        }
    }
    for (i, e) in edges.iter().enumerate() {
        if let Some(prev) = edges[..i].iter().find(|p| p.0 == e.0 && p.1 == e.1) {
            return Err(perr(e.4, format!("duplicate reaction (first given on line {})", prev.4)));
        }
    }
    let mut labels: Vec<String> = Vec::with_capacity(edges.len());
    for e in &edges {
        let label = e.2.clone().unwrap_or_else(|| default_edge_label(e.0, e.1));
        if labels.contains(&label) {
            return Err(perr(e.4, format!("duplicate rate label `{label}`")));
        }
        labels.push(label);
    }

    let mut diagnostics = Vec::new();
    for s in &b.species {
        if !dense_complexes.iter().any(|c| {
            let i = b.species.iter().position(|x| x == s).unwrap();
            !c[i].is_zero()
        }) {
            diagnostics.push((0, format!("species `{s}` appears in no complex")));
        }
    }
    let graph = Digraph::new(vertex_count, edges.iter().map(|e| (e.0, e.1)).collect())?;
    let network = ReactionNetwork::new(b.species.clone(), graph, dense_complexes, Some(labels))?;
    let system = MassActionSystem::new(network, edges.into_iter().map(|e| e.3).collect())?;
    Ok(NetworkDocument { source: text.to_string(), system, diagnostics })
}

/// Writes a network in the DSL, with explicit species, vertex order and
/// rate labels so that parsing the output gives back the same system.
pub fn to_dsl(sys: &MassActionSystem) -> String {
    let net = sys.network();
    let mut out = format!("species: {}\n", net.species().join(", "));
    let complexes: Vec<String> = (0..net.complexes().len()).map(|v| net.complex_label(v)).collect();
    out.push_str(&format!("complexes: {}\n", complexes.join(" | ")));
    for (((a, b), label), k) in net.graph().edges().iter().zip(net.edge_labels()).zip(sys.rates()) {
        out.push_str(&format!("{label}: {} -> {}, k = {}\n", complexes[*a], complexes[*b], fmt_rat(k)));
    }
    out
}
