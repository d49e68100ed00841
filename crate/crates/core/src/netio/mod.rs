//! Network ingestion (DSL and JSON) and report serialization.

mod dsl;
mod json;
mod report;

pub use dsl::{parse_document, parse_network, to_dsl, NetworkDocument};
pub use json::{network_from_json, network_to_json, to_json_string, NetworkJson, ReactionJson};
pub use report::{
    build_report, emit_report, emit_salt_report, outcome_label, report_from_json, salt_report, AnalysisReport, ClassRow,
    DecompositionSummary, EquilibriumSummary, Format, SaltEntry, SaltReport, StructuralSummary, SCHEMA_VERSION,
};
