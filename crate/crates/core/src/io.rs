//! The JSON space spec shared by every CLI command:
//!
//! ```json
//! {"weights": [0.5, 0.5], "blocks": [[0, 1]],
//!  "functions": {"u": [[1.0, 0.0], [0.0, 1.0]]},
//!  "p": 2.0, "provenance": "example-3.9", "ids": [0, 1], "coords": [-0.5, 0.5]}
//! ```
//!
//! Only `weights` and `blocks` are required. Complex values are `[re, im]`
//! pairs; block entries are 0-based atom positions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gallery::Gallery;
use crate::measure::{build_partition, AtomicMeasureSpace, MeasFn, Partition};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub weights: Vec<f64>,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

/// A rejected spec, tagged with the field at fault.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid spec field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for SpecError {}

fn field_err(field: impl Into<String>, err: impl fmt::Display) -> SpecError {
    SpecError {
        field: field.into(),
        message: err.to_string(),
    }
}

/// A validated spec.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
    pub functions: BTreeMap<String, MeasFn>,
    pub p: Option<f64>,
    pub provenance: Option<String>,
    pub coords: Option<Vec<f64>>,
}

impl Problem {
    /// The named function, or the constant 1 when the spec omits it.
    pub fn function_or_ones(&self, name: &str) -> MeasFn {
        self.functions
            .get(name)
            .cloned()
            .unwrap_or_else(|| MeasFn::ones(self.space.len()))
    }
}

pub fn parse_spec(text: &str) -> Result<SpaceSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let msg = e.inner().to_string();
        // missing and unknown fields are reported at the parent; the name
        // is the first backquoted token of the message
        let field = if path == "." {
            msg.split('`').nth(1).unwrap_or("<document>").to_string()
        } else {
            path
        };
        field_err(field, msg)
    })
}

impl SpaceSpec {
    pub fn validate(&self) -> Result<Problem, SpecError> {
        let n = self.weights.len();
        let space = match &self.ids {
            Some(ids) => AtomicMeasureSpace::with_ids(ids.clone(), self.weights.clone()),
            None => AtomicMeasureSpace::new(self.weights.clone()),
        }
        .map_err(|e| match e {
            Error::DuplicateAtom(_) => field_err("ids", e),
            Error::DimensionMismatch(_) => field_err("ids", e),
            _ => field_err("weights", e),
        })?;
        let partition = build_partition(&space, self.blocks.clone()).map_err(|e| field_err("blocks", e))?;
        let mut functions = BTreeMap::new();
        for (name, values) in &self.functions {
            let field = format!("functions.{name}");
            if values.len() != n {
                return Err(field_err(
                    field,
                    Error::SpaceMismatch {
                        expected: n,
                        found: values.len(),
                    },
                ));
            }
            if values.iter().flatten().any(|x| !x.is_finite()) {
                return Err(field_err(field, "non-finite value"));
            }
            functions.insert(name.clone(), MeasFn::new(values.iter().map(|&[re, im]| C64::new(re, im)).collect()));
        }
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(field_err("p", Error::InvalidExponent(format!("p = {p} must be in [1, ∞)"))));
            }
        }
        if let Some(coords) = &self.coords {
            if coords.len() != n {
                return Err(field_err(
                    "coords",
                    Error::SpaceMismatch {
                        expected: n,
                        found: coords.len(),
                    },
                ));
            }
        }
        Ok(Problem {
            space,
            partition,
            functions,
            p: self.p,
            provenance: self.provenance.clone(),
            coords: self.coords.clone(),
        })
    }

    pub fn from_problem(problem: &Problem) -> Self {
        let default_ids = problem.space.ids().iter().enumerate().all(|(a, &id)| a == id);
        Self {
            weights: problem.space.weights().to_vec(),
            blocks: problem.partition.blocks().to_vec(),
            functions: problem
                .functions
                .iter()
                .map(|(k, f)| (k.clone(), f.values().iter().map(|z| [z.re, z.im]).collect()))
                .collect(),
            p: problem.p,
            provenance: problem.provenance.clone(),
            ids: (!default_ids).then(|| problem.space.ids().to_vec()),
            coords: problem.coords.clone(),
        }
    }

    /// The gallery's space with its default functions and provenance label.
    pub fn from_gallery(gallery: &Gallery) -> Self {
        Self::from_problem(&Problem {
            space: gallery.space().clone(),
            partition: gallery.partition().clone(),
            functions: gallery.default_functions(),
            p: None,
            provenance: Some(gallery.provenance().to_string()),
            coords: gallery.coords(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec values are finite")
    }
}

pub fn read_problem(text: &str) -> Result<Problem, SpecError> {
    parse_spec(text)?.validate()
}
