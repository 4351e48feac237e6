//! Prediction files and result formatting.
//!
//! A prediction file holds one JSON object per line:
//!
//! ```text
//! {"id": "a", "samples": [[0.9, 0.1], [0.5, 0.5]], "label": 1}
//! ```
//!
//! `samples` is the M×K matrix of ensemble members, `label` an optional
//! 1-based class. Blank lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use uqscore_core::{SecondOrderSample, UqError};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub id: String,
    pub sample: SecondOrderSample,
    /// 1-based class label.
    pub label: Option<usize>,
    /// Line of the source file, 1-based (0 for records built in memory).
    pub line: usize,
}

impl PredictionRecord {
    /// The label as a 0-based class index.
    pub fn class_index(&self) -> Option<usize> {
        self.label.map(|l| l - 1)
    }
}

#[derive(Deserialize, Serialize)]
struct RawRecord {
    id: String,
    samples: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
}

pub fn parse_predictions(path: &Path, renormalize: bool) -> Result<Vec<PredictionRecord>> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_predictions_str(&text, renormalize)
}

pub fn parse_predictions_str(text: &str, renormalize: bool) -> Result<Vec<PredictionRecord>> {
    let mut records = Vec::new();
    for (i, content) in text.lines().enumerate() {
        let line = i + 1;
        if content.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(content).map_err(|e| CliError::Malformed {
            line,
            message: e.to_string(),
        })?;
        records.push(to_record(raw, line, renormalize)?);
    }
    Ok(records)
}

fn to_record(raw: RawRecord, line: usize, renormalize: bool) -> Result<PredictionRecord> {
    let Some(first) = raw.samples.first() else {
        return Err(CliError::Malformed {
            line,
            message: "`samples` is empty".into(),
        });
    };
    let k = first.len();
    if let Some(row) = raw.samples.iter().position(|r| r.len() != k) {
        return Err(CliError::Malformed {
            line,
            message: format!(
                "row {} has {} entries, expected {k}",
                row + 1,
                raw.samples[row].len()
            ),
        });
    }
    let members = raw
        .samples
        .iter()
        .enumerate()
        .map(|(row, probs)| {
            uqscore_core::validate_simplex(probs, renormalize).map_err(|source| {
                CliError::SimplexViolation {
                    line,
                    row: row + 1,
                    source,
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sample = SecondOrderSample::new(members).map_err(|e: UqError| CliError::Malformed {
        line,
        message: e.to_string(),
    })?;
    if let Some(label) = raw.label {
        if label == 0 || label > k {
            return Err(CliError::LabelOutOfRange {
                line,
                label,
                classes: k,
            });
        }
    }
    Ok(PredictionRecord {
        id: raw.id,
        sample,
        label: raw.label,
        line,
    })
}

/// Inverse of [`parse_predictions_str`]; floats use the shortest exact form.
pub fn serialize_predictions(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let raw = RawRecord {
            id: r.id.clone(),
            samples: r
                .sample
                .members()
                .iter()
                .map(|m| m.probs().to_vec())
                .collect(),
            label: r.label,
        };
        out.push_str(&serde_json::to_string(&raw).expect("finite floats serialize"));
        out.push('\n');
    }
    out
}

/// Real number with 17 significant digits; non-finite values become `inf`,
/// `-inf` or `nan`.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A JSON object written field by field, so reals keep their fixed format.
#[derive(Debug, Default)]
pub struct JsonLine {
    body: String,
}

impl JsonLine {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(&mut self, key: &str) {
        self.body.push(if self.body.is_empty() { '{' } else { ',' });
        self.body
            .push_str(&serde_json::to_string(key).expect("string"));
        self.body.push(':');
    }

    pub fn str(mut self, key: &str, value: &str) -> Self {
        self.key(key);
        self.body
            .push_str(&serde_json::to_string(value).expect("string"));
        self
    }

    pub fn int(mut self, key: &str, value: impl Into<u64>) -> Self {
        self.key(key);
        let _ = write!(self.body, "{}", value.into());
        self
    }

    /// Finite reals as numbers, the rest as quoted sentinels.
    pub fn real(mut self, key: &str, value: f64) -> Self {
        self.key(key);
        let text = format_real(value);
        if value.is_finite() {
            self.body.push_str(&text);
        } else {
            self.body.push('"');
            self.body.push_str(&text);
            self.body.push('"');
        }
        self
    }

    pub fn finish(mut self) -> String {
        if self.body.is_empty() {
            self.body.push('{');
        }
        self.body.push('}');
        self.body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_record() {
        let r = parse_predictions_str(r#"{"id":"a","samples":[[0.5,0.5]]}"#, false).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].sample.n_members(), 1);
        assert_eq!(r[0].sample.n_classes(), 2);
        assert_eq!(r[0].label, None);
    }

    #[test]
    fn row_summing_to_point_nine() {
        let text = "{\"id\":\"a\",\"samples\":[[0.5,0.5]]}\n{\"id\":\"b\",\"samples\":[[0.5,0.5],[0.6,0.3]]}";
        match parse_predictions_str(text, false) {
            Err(CliError::SimplexViolation {
                line: 2, row: 2, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let r = parse_predictions_str(text, true).unwrap();
        assert!((r[1].sample.members()[1].probs()[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_text_is_empty_list() {
        assert!(parse_predictions_str("", false).unwrap().is_empty());
        assert!(parse_predictions_str("\n  \n", false).unwrap().is_empty());
    }

    #[test]
    fn malformed_lines() {
        for bad in [
            "not json",
            r#"{"id":"a"}"#,
            r#"{"id":"a","samples":[]}"#,
            r#"{"id":"a","samples":[[0.5,0.5],[1.0]]}"#,
        ] {
            assert!(matches!(
                parse_predictions_str(bad, false),
                Err(CliError::Malformed { line: 1, .. })
            ));
        }
    }

    #[test]
    fn label_range() {
        let ok = parse_predictions_str(r#"{"id":"a","samples":[[0.5,0.5]],"label":2}"#, false);
        assert_eq!(ok.unwrap()[0].class_index(), Some(1));
        for label in [0, 3] {
            let text = format!(r#"{{"id":"a","samples":[[0.5,0.5]],"label":{label}}}"#);
            assert!(matches!(
                parse_predictions_str(&text, false),
                Err(CliError::LabelOutOfRange { classes: 2, .. })
            ));
        }
    }

    #[test]
    fn reals() {
        assert_eq!(format_real(0.5), "5.0000000000000000e-1");
        assert_eq!(format_real(0.0), "0.0000000000000000e0");
        assert_eq!(format_real(f64::INFINITY), "inf");
        let x = 0.1 + 0.2;
        assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_line_layout() {
        let line = JsonLine::new()
            .str("id", "a\"b")
            .int("n", 3u64)
            .real("x", f64::INFINITY)
            .finish();
        assert_eq!(line, r#"{"id":"a\"b","n":3,"x":"inf"}"#);
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["x"], "inf");
        assert_eq!(JsonLine::new().finish(), "{}");
    }
}
