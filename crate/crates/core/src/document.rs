//! Canonical JSON documents for subgraphs, universal FOONs, task trees and
//! the various configuration files.
//!
//! Parsing reports the line, column and field path of the first problem.
//! Unknown fields are not an error: they are collected as warnings and
//! otherwise ignored.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{DocumentError, Error};
use crate::model::Subgraph;

/// A parsed value plus the paths of any fields that were ignored.
#[derive(Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Parsed<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Parsed<U> {
        Parsed {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}

/// Deserializes any document type from JSON text.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<Parsed<T>, DocumentError> {
    let mut warnings = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let value = {
        let mut record = |path: serde_ignored::Path<'_>| warnings.push(path.to_string());
        let ignored = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(ignored).map_err(|err| {
            let path = err.path().to_string();
            syntax_error(path, err.into_inner())
        })?
    };
    de.end().map_err(|e| syntax_error(".".into(), e))?;
    for w in &warnings {
        log::warn!("ignoring unknown field `{w}`");
    }
    Ok(Parsed { value, warnings })
}

fn syntax_error(path: String, err: serde_json::Error) -> DocumentError {
    let text = err.to_string();
    let message = match text.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => text,
    };
    DocumentError::Syntax {
        line: err.line(),
        column: err.column(),
        path,
        message,
    }
}

/// Pretty JSON with a trailing newline. Byte-stable for equal inputs.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document types always serialize");
    s.push('\n');
    s
}

/// Parses and validates a subgraph document.
pub fn parse_subgraph(text: &str) -> Result<Parsed<Subgraph>, DocumentError> {
    let parsed: Parsed<Subgraph> = from_json(text)?;
    parsed
        .value
        .validate()
        .map_err(|source| DocumentError::Invalid {
            path: invalid_path(&source),
            source,
        })?;
    Ok(parsed)
}

fn invalid_path(err: &crate::error::ModelError) -> String {
    use crate::error::ModelError::*;
    match err {
        NoUnits(_) => "units".into(),
        EmptySubgraphId => "id".into(),
        _ => ".".into(),
    }
}

pub fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FunctionalUnit, ObjectNode};

    fn fig2() -> Subgraph {
        Subgraph::new(
            "fig2",
            vec![
                FunctionalUnit::new(
                    vec![
                        ObjectNode::new("onion").with_state("whole"),
                        ObjectNode::new("cutting board"),
                    ],
                    "pick-and-place",
                    vec![ObjectNode::new("onion").with_state("whole").at("cutting board")],
                ),
                FunctionalUnit::new(
                    vec![
                        ObjectNode::new("onion").with_state("whole").at("cutting board"),
                        ObjectNode::new("knife"),
                    ],
                    "slice",
                    vec![
                        ObjectNode::new("onion").with_state("sliced").at("cutting board"),
                        ObjectNode::new("knife"),
                    ],
                ),
            ],
        )
    }

    #[test]
    fn empty_subgraph_is_rejected() {
        let err = parse_subgraph(r#"{"id": "x", "units": []}"#).unwrap_err();
        assert!(err.to_string().contains("units non-empty"), "{err}");
        let err = parse_subgraph(r#"{"id": "x"}"#).unwrap_err();
        assert!(err.to_string().contains("units non-empty"), "{err}");
    }

    #[test]
    fn fig2_round_trips_byte_identical() {
        let text = to_canonical(&fig2());
        let back = parse_subgraph(&text).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(back.value, fig2());
        assert_eq!(to_canonical(&back.value), text);
    }

    #[test]
    fn weight_out_of_range_reports_position() {
        let text = r#"{
  "id": "w",
  "units": [
    {"inputs": [{"name": "onion"}],
     "motion": {"verb": "slice", "weight": 1.2},
     "outputs": [{"name": "onion"}]}
  ]
}"#;
        match parse_subgraph(text).unwrap_err() {
            DocumentError::Syntax { line, path, message, .. } => {
                assert_eq!(line, 5);
                assert!(path.starts_with("units[0].motion"), "{path}");
                assert!(message.contains("1.2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_warn() {
        let text = r#"{"id": "a", "color": "red", "units": [
            {"inputs": [{"name": "onion", "pose": 1}], "motion": {"verb": "pick"},
             "outputs": [{"name": "onion"}]}]}"#;
        let parsed = parse_subgraph(text).unwrap();
        assert_eq!(parsed.warnings, vec!["color", "units.0.inputs.0.pose"]);
    }

    #[test]
    fn names_are_normalized_on_parse() {
        let text = r#"{"id": "a", "units": [
            {"inputs": [{"name": " Red  Onion ", "states": [{"label": "Whole"}]}],
             "motion": {"verb": "Slice"}, "outputs": [{"name": "red onion"}]}]}"#;
        let sg = parse_subgraph(text).unwrap().value;
        assert_eq!(sg.units[0].inputs[0].name, "red onion");
        assert_eq!(sg.units[0].inputs[0].states[0].label, "whole");
        assert_eq!(sg.units[0].motion.verb, "slice");
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = parse_subgraph("{\n  \"id\": \"a\",\n  \"units\": [\n}").unwrap_err();
        assert!(matches!(err, DocumentError::Syntax { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn empty_name_is_rejected() {
        let text = r#"{"id": "a", "units": [
            {"inputs": [{"name": "  "}], "motion": {"verb": "x"}, "outputs": [{"name": "b"}]}]}"#;
        let err = parse_subgraph(text).unwrap_err();
        assert!(err.to_string().contains("invalid name"), "{err}");
    }
}
