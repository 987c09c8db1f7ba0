//! Machine-checkable verdicts shared by every checker in the crate.
//!
//! A [`Certificate`] serializes as `{pass, rule, witnesses}`. Witnesses are
//! either sampled points with a value, integer relations with both sides
//! recorded, or free-form notes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Sample {
        point: Vec<f64>,
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Relation {
        relation: String,
        lhs: i64,
        rhs: i64,
        holds: bool,
    },
    Note {
        note: String,
    },
}

impl Witness {
    pub fn sample(point: impl Into<Vec<f64>>, value: f64) -> Self {
        Witness::Sample {
            point: point.into(),
            value,
            label: None,
        }
    }

    pub fn labeled(label: impl Into<String>, point: impl Into<Vec<f64>>, value: f64) -> Self {
        Witness::Sample {
            point: point.into(),
            value,
            label: Some(label.into()),
        }
    }

    pub fn note(note: impl Into<String>) -> Self {
        Witness::Note { note: note.into() }
    }

    /// `lhs >= rhs`, the shape of every genus-type inequality.
    pub fn at_least(relation: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Witness::Relation {
            relation: relation.into(),
            lhs,
            rhs,
            holds: lhs >= rhs,
        }
    }

    pub fn equal(relation: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Witness::Relation {
            relation: relation.into(),
            lhs,
            rhs,
            holds: lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub pass: bool,
    pub rule: String,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
}

impl Certificate {
    pub fn new(pass: bool, rule: impl Into<String>) -> Self {
        Certificate {
            pass,
            rule: rule.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn with(mut self, witness: Witness) -> Self {
        self.witnesses.push(witness);
        self
    }

    pub fn push(&mut self, witness: Witness) {
        self.witnesses.push(witness);
    }

    /// The first sampled point among the witnesses, if any.
    pub fn first_point(&self) -> Option<&[f64]> {
        self.witnesses.iter().find_map(|w| match w {
            Witness::Sample { point, .. } => Some(point.as_slice()),
            _ => None,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, i64, i64, bool)> {
        self.witnesses.iter().filter_map(|w| match w {
            Witness::Relation {
                relation,
                lhs,
                rhs,
                holds,
            } => Some((relation.as_str(), *lhs, *rhs, *holds)),
            _ => None,
        })
    }
}
