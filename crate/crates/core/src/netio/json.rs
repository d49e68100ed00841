//! JSON network format and the shared JSON writer.
//!
//! Objects are written with sorted keys and floats with 17 significant
//! digits, so every `f64` survives a round trip bit for bit.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::network::{MassActionSystem, ReactionNetwork};
use crate::ratlin::{fmt_rat, parse_rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionJson {
    pub source: usize,
    pub target: usize,
    /// Rational as a string, e.g. `"3/7"`.
    pub k: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkJson {
    pub species: Vec<String>,
    /// One row per vertex, entries are rationals as strings.
    pub complexes: Vec<Vec<String>>,
    pub reactions: Vec<ReactionJson>,
}

pub fn network_to_json_value(sys: &MassActionSystem) -> NetworkJson {
    let net = sys.network();
    NetworkJson {
        species: net.species().to_vec(),
        complexes: net.complexes().iter().map(|c| c.iter().map(fmt_rat).collect()).collect(),
        reactions: net
            .graph()
            .edges()
            .iter()
            .zip(net.edge_labels())
            .zip(sys.rates())
            .map(|((&(source, target), label), k)| ReactionJson { source, target, k: fmt_rat(k), label: Some(label.clone()) })
            .collect(),
    }
}

pub fn network_to_json(sys: &MassActionSystem) -> String {
    to_json_string(&network_to_json_value(sys))
}

fn json_err(e: impl std::fmt::Display) -> Error {
    Error::Json(e.to_string())
}

pub fn network_from_json(text: &str) -> Result<MassActionSystem> {
    let doc: NetworkJson = serde_json::from_str(text).map_err(json_err)?;
    let complexes = doc
        .complexes
        .iter()
        .map(|row| row.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let graph = Digraph::new(complexes.len(), doc.reactions.iter().map(|r| (r.source, r.target)).collect())?;
    let labels = if doc.reactions.iter().all(|r| r.label.is_some()) {
        Some(doc.reactions.iter().map(|r| r.label.clone().unwrap()).collect())
    } else if doc.reactions.iter().all(|r| r.label.is_none()) {
        None
    } else {
        return Err(Error::Json("either every reaction has a label or none does".into()));
    };
    let network = ReactionNetwork::new(doc.species, graph, complexes, labels)?;
    let k = doc.reactions.iter().map(|r| parse_rat(&r.k)).collect::<Result<Vec<_>>>()?;
    MassActionSystem::new(network, k)
}

/// Pretty printer that writes floats as `d.dddddddddddddddde±x`.
struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes through [`Value`], whose maps are ordered, so keys come out
/// sorted regardless of field order.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let value: Value = serde_json::to_value(value).expect("report types serialize");
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, unit};
    use crate::netio::dsl::parse_network;

    #[test]
    fn network_round_trip() {
        for sys in [catalog::deficiency_two_path(unit()), catalog::reversible_pair()] {
            let text = network_to_json(&sys);
            assert_eq!(network_from_json(&text).unwrap(), sys);
            assert_eq!(parse_network(&text).unwrap(), sys);
        }
    }

    #[test]
    fn floats_keep_every_bit() {
        #[derive(Serialize)]
        struct F {
            zeta: f64,
            alpha: Vec<f64>,
        }
        let xs = vec![0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.472_389_341_234_567_8];
        let text = to_json_string(&F { zeta: 1.0, alpha: xs.clone() });
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        let back: Value = serde_json::from_str(&text).unwrap();
        let parsed: Vec<f64> = serde_json::from_value(back["alpha"].clone()).unwrap();
        assert_eq!(parsed, xs);
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn rejects_bad_json_networks() {
        assert!(network_from_json("{\"species\":[\"A\"],\"complexes\":[[\"1\"],[\"0\"]],\"reactions\":[{\"source\":0,\"target\":1,\"k\":\"0\"}]}").is_err());
        assert!(network_from_json("{\"species\":[\"A\"]}").is_err());
        assert!(network_from_json("{\"species\":[\"A\"],\"complexes\":[[\"x\"],[\"0\"]],\"reactions\":[{\"source\":0,\"target\":1,\"k\":\"1\"}]}").is_err());
    }
}
