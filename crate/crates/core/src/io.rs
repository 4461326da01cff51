//! Covariance-matrix documents and the shipped fixtures.
//!
//! A matrix document is a small JSON file with one matrix row per line:
//!
//! ```text
//! {
//!   "schema_version": "opo-cv/matrix/1",
//!   "basis": "plus_minus",
//!   "ordering": "X_A,P_A,X_B,P_B",
//!   "entries": [
//!     [361.0, 0.0, 0.0, 0.0],
//!     ...
//!   ],
//!   "metadata": { ... }
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::condprep::CondPrepConfig;
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, ModeBasis};

pub const MATRIX_SCHEMA: &str = "opo-cv/matrix/1";
pub const ORDERING: &str = "X_A,P_A,X_B,P_B";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub schema_version: String,
    pub basis: ModeBasis,
    pub ordering: String,
    pub entries: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

impl MatrixDocument {
    pub fn from_covariance(g: &CovarianceMatrix<f64>, metadata: BTreeMap<String, Value>) -> Self {
        Self {
            schema_version: MATRIX_SCHEMA.to_string(),
            basis: g.basis(),
            ordering: ORDERING.to_string(),
            entries: g.entries().iter().map(|r| r.to_vec()).collect(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.schema_version != MATRIX_SCHEMA {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!(
                    "unsupported schema_version {:?}, expected {MATRIX_SCHEMA:?}",
                    doc.schema_version
                ),
            });
        }
        if doc.ordering != ORDERING {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("ordering must be {ORDERING:?}, got {:?}", doc.ordering),
            });
        }
        Ok(doc)
    }

    pub fn to_covariance(&self) -> Result<CovarianceMatrix<f64>> {
        CovarianceMatrix::from_rows(&self.entries, self.basis)
    }

    /// Canonical text: fixed key order, one row per line, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("string serialises");
        let mut out = String::from("{\n");
        out += &format!("  \"schema_version\": {},\n", q(&self.schema_version));
        out += &format!("  \"basis\": {},\n", q(self.basis.as_str()));
        out += &format!("  \"ordering\": {},\n", q(&self.ordering));
        out += "  \"entries\": [\n";
        for (i, row) in self.entries.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            let sep = if i + 1 < self.entries.len() { "," } else { "" };
            out += &format!("    [{}]{sep}\n", cells.join(", "));
        }
        out += "  ],\n";
        if self.metadata.is_empty() {
            out += "  \"metadata\": {}\n";
        } else {
            let meta = serde_json::to_string_pretty(&self.metadata).expect("metadata serialises");
            out += "  \"metadata\": ";
            out += &meta.replace('\n', "\n  ");
            out += "\n";
        }
        out += "}\n";
        out
    }
}

/// Shortest round-trip decimal; `-0` is written as `0.0`.
fn format_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub contents: String,
}

fn meta(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn matrix_fixture(
    name: &'static str,
    description: &'static str,
    basis: ModeBasis,
    entries: [[f64; 4]; 4],
    metadata: BTreeMap<String, Value>,
) -> Fixture {
    let doc = MatrixDocument {
        schema_version: MATRIX_SCHEMA.to_string(),
        basis,
        ordering: ORDERING.to_string(),
        entries: entries.iter().map(|r| r.to_vec()).collect(),
        metadata,
    };
    Fixture {
        name,
        description,
        contents: doc.to_canonical_string(),
    }
}

/// Every shipped fixture. Contents are byte-stable.
pub fn fixtures() -> Vec<Fixture> {
    use serde_json::json;
    let common = |source: &str| {
        meta(&[
            ("sigma", json!(0.9)),
            ("omega", json!(0.0)),
            ("plate_angle_deg", json!(1.3)),
            ("source", json!(source)),
        ])
    };
    // The A1/A2 matrices are the exact images of the A± matrices under the
    // 50/50 basis change, so both bases describe the same state.
    let mut out = vec![
        matrix_fixture(
            "fig_matrix_apm.json",
            "self-phase-locked OPO, A+/A- basis, before the non-local phase shift",
            ModeBasis::PlusMinus,
            [
                [361.0, 0.0, 0.0, 0.0],
                [0.0, 0.00277, 0.0, 0.0],
                [0.0, 0.0, 1.383, -0.256],
                [0.0, 0.0, -0.256, 0.770],
            ],
            common("reference A+/A- matrix, 3 significant figures"),
        ),
        matrix_fixture(
            "fig_matrix_apm_post.json",
            "A+/A- basis after the non-local phase shift",
            ModeBasis::PlusMinus,
            [
                [361.0, 0.0, 0.0, 0.0],
                [0.0, 0.00277, 0.0, 0.0],
                [0.0, 0.0, 0.677, 0.0],
                [0.0, 0.0, 0.0, 1.476],
            ],
            common("reference A+/A- matrix after the phase shift"),
        ),
        matrix_fixture(
            "fig_matrix_a1a2.json",
            "signal/idler basis, before the non-local phase shift",
            ModeBasis::SignalIdler,
            [
                [181.1915, -0.128, 179.8085, 0.128],
                [-0.128, 0.386385, 0.128, -0.383615],
                [179.8085, 0.128, 181.1915, -0.128],
                [0.128, -0.383615, -0.128, 0.386385],
            ],
            common("basis change of fig_matrix_apm.json"),
        ),
        matrix_fixture(
            "fig_matrix_a1a2_post.json",
            "signal/idler basis after the non-local phase shift",
            ModeBasis::SignalIdler,
            [
                [180.8385, 0.0, 180.1615, 0.0],
                [0.0, 0.739385, 0.0, -0.736615],
                [180.1615, 0.0, 180.8385, 0.0],
                [0.0, -0.736615, 0.0, 0.739385],
            ],
            common("basis change of fig_matrix_apm_post.json"),
        ),
        matrix_fixture(
            "fig_matrix_a1a2_printed.json",
            "signal/idler reference matrix rounded to 3 decimals",
            ModeBasis::SignalIdler,
            [
                [181.192, 0.0, 179.808, -0.255],
                [0.0, 0.386, -0.255, -0.383],
                [179.808, -0.255, 181.192, 0.0],
                [-0.255, -0.383, 0.0, 0.386],
            ],
            common("reference A1/A2 matrix, rounded; not an exact image of the A+/A- matrix"),
        ),
        matrix_fixture(
            "vacuum.json",
            "two independent vacua",
            ModeBasis::SignalIdler,
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            meta(&[("source", json!("vacuum"))]),
        ),
    ];
    let cfg = serde_json::to_string_pretty(&CondPrepConfig::twin_beam_default())
        .expect("config serialises");
    out.push(Fixture {
        name: "condprep_twin_beam.json",
        description: "conditional preparation: F = 110, G = 0.18, band half-width 0.1 σ₀",
        contents: cfg + "\n",
    });
    out
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}
