//! Import of the line-oriented FOON text format used by public FOON
//! releases. Import only; nothing is ever written back in this format.
//!
//! ```text
//! //
//! O	10	onion	0
//! S	0	whole
//! M	0	slice	<Assumed>	<Assumed>
//! O	10	onion	1
//! S	12	sliced
//! S	13	in	[cutting board]
//! //
//! ```
//!
//! `O` opens an object (trailing flag 0 = input, 1 = output), `S` adds a
//! state to the last object and `M` names the motion. A bracketed argument
//! on `in`/`on`/`at` becomes the object's location; on any other state it is
//! kept as the state argument. A braced list (`contains {onion, tomato}`)
//! becomes the object's ingredient list. Numeric ids are optional.

#![allow(clippy::tabs_in_doc_comments)]

use crate::error::DocumentError;
use crate::model::{FunctionalUnit, MotionNode, ObjectNode, StateLabel, Subgraph};

const LOCATION_LABELS: [&str; 3] = ["in", "on", "at"];

#[derive(Default)]
struct UnitDraft {
    inputs: Vec<ObjectNode>,
    outputs: Vec<ObjectNode>,
    motion: Option<MotionNode>,
    last_is_output: bool,
    start_line: usize,
}

impl UnitDraft {
    fn is_empty(&self) -> bool {
        self.inputs.is_empty() && self.outputs.is_empty() && self.motion.is_none()
    }

    fn finish(self) -> Result<FunctionalUnit, DocumentError> {
        let line = self.start_line;
        let motion = self.motion.ok_or_else(|| DocumentError::Legacy {
            line,
            message: "functional unit has no motion (M) line".into(),
        })?;
        let unit = FunctionalUnit {
            inputs: self.inputs,
            motion,
            outputs: self.outputs,
        };
        unit.validate().map_err(|e| DocumentError::Legacy {
            line,
            message: e.to_string(),
        })?;
        Ok(unit)
    }

    fn last_object(&mut self) -> Option<&mut ObjectNode> {
        if self.last_is_output {
            self.outputs.last_mut()
        } else {
            self.inputs.last_mut()
        }
    }
}

/// Strips a leading numeric id column when present.
fn skip_id<'a>(fields: &'a [&'a str]) -> &'a [&'a str] {
    match fields.first() {
        Some(f) if fields.len() > 1 && f.trim().parse::<u64>().is_ok() => &fields[1..],
        _ => fields,
    }
}

pub fn parse_foon_text(id: &str, text: &str) -> Result<Subgraph, DocumentError> {
    let mut units = Vec::new();
    let mut draft = UnitDraft::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if line.trim() == "//" {
            if !draft.is_empty() {
                units.push(std::mem::take(&mut draft).finish()?);
            }
            continue;
        }
        if draft.is_empty() {
            draft.start_line = line_no;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let err = |message: &str| DocumentError::Legacy {
            line: line_no,
            message: message.to_string(),
        };
        match fields[0].trim() {
            "O" => {
                let rest = skip_id(&fields[1..]);
                let (name, flag) = match rest {
                    [name, flag, ..] => (name.trim(), Some(flag.trim())),
                    [name] => (name.trim(), None),
                    [] => return Err(err("object line without a name")),
                };
                let node = ObjectNode::new(name);
                if node.name.is_empty() {
                    return Err(err("object line without a name"));
                }
                let is_output = match flag {
                    Some("1") => true,
                    Some("0") => false,
                    Some(other) => {
                        return Err(err(&format!("object flag must be 0 or 1, got {other:?}")))
                    }
                    None => draft.motion.is_some(),
                };
                if is_output {
                    draft.outputs.push(node);
                } else {
                    draft.inputs.push(node);
                }
                draft.last_is_output = is_output;
            }
            "S" => {
                let rest = skip_id(&fields[1..]);
                let Some(label) = rest.first().map(|s| s.trim()).filter(|s| !s.is_empty()) else {
                    return Err(err("state line without a label"));
                };
                let argument = rest.get(1).map(|s| s.trim()).filter(|s| !s.is_empty());
                let obj = draft
                    .last_object()
                    .ok_or_else(|| err("state line before any object"))?;
                apply_state(obj, label, argument);
            }
            "M" => {
                let rest = skip_id(&fields[1..]);
                let Some(verb) = rest.first().map(|s| s.trim()).filter(|s| !s.is_empty()) else {
                    return Err(err("motion line without a verb"));
                };
                if draft.motion.is_some() {
                    return Err(err("second motion in one functional unit"));
                }
                draft.motion = Some(MotionNode::new(verb));
            }
            other => return Err(err(&format!("unknown record type {other:?}"))),
        }
    }
    if !draft.is_empty() {
        units.push(draft.finish()?);
    }
    let sg = Subgraph::new(id, units);
    sg.validate().map_err(|e| DocumentError::Legacy {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(sg)
}

fn apply_state(obj: &mut ObjectNode, label: &str, argument: Option<&str>) {
    let label = label.trim();
    match argument {
        Some(arg) if arg.starts_with('[') && arg.ends_with(']') => {
            let inner = &arg[1..arg.len() - 1];
            if LOCATION_LABELS.contains(&label.to_lowercase().as_str()) {
                obj.location = Some(crate::model::normalize_name(inner));
            } else {
                obj.push_state(StateLabel::with_argument(label, inner));
            }
        }
        Some(arg) if arg.starts_with('{') && arg.ends_with('}') => {
            obj.push_state(StateLabel::new(label));
            for item in arg[1..arg.len() - 1].split(',') {
                obj.push_ingredient(item);
            }
        }
        Some(arg) => obj.push_state(StateLabel::with_argument(label, arg)),
        None => obj.push_state(StateLabel::new(label)),
    }
}
