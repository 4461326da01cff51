//! Machine-readable criteria report.

use serde::Serialize;
use sha2::{Digest, Sha256};

use opo_cv::criteria::{self, variance_to_db};
use opo_cv::{CovarianceMatrix, CriteriaReport, ModeBasis};

pub const REPORT_SCHEMA: &str = "opo-cv/report/1";

#[derive(Debug, Clone, Serialize)]
pub struct DbRenderings {
    pub gemellity_x_db: Option<f64>,
    pub antigemellity_p_db: Option<f64>,
    pub conditional_variance_x_db: Option<f64>,
    pub conditional_variance_p_db: Option<f64>,
    pub separability_db: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub input_digest: String,
    pub input_basis: ModeBasis,
    pub physical: bool,
    pub min_symplectic_eigenvalue: f64,
    pub criteria: CriteriaReport,
    pub db: DbRenderings,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl ReportDocument {
    pub fn build(input: &[u8], g: &CovarianceMatrix, fano: Option<f64>) -> opo_cv::Result<Self> {
        let phys = g.is_physical();
        let opts = criteria::ClassifyOptions { fano };
        let c = criteria::classify_with(g, opts)?;
        let db = |v: f64| variance_to_db(v).ok();
        Ok(Self {
            schema_version: REPORT_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            input_digest: digest(input),
            input_basis: g.basis(),
            physical: phys.physical,
            min_symplectic_eigenvalue: phys.min_symplectic_eigenvalue,
            db: DbRenderings {
                gemellity_x_db: db(c.gemellity_x),
                antigemellity_p_db: db(c.antigemellity_p),
                conditional_variance_x_db: db(c.conditional_variance_x),
                conditional_variance_p_db: db(c.conditional_variance_p),
                separability_db: db(c.separability),
            },
            criteria: c,
        })
    }

    /// Flat `(column, value)` view in the frozen CSV column order.
    pub fn columns(&self) -> Vec<(&'static str, String)> {
        let c = &self.criteria;
        let f = |x: f64| x.to_string();
        let o = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let b = |x: bool| x.to_string();
        vec![
            ("input_digest", self.input_digest.clone()),
            ("input_basis", self.input_basis.as_str().to_string()),
            ("physical", b(self.physical)),
            (
                "min_symplectic_eigenvalue",
                f(self.min_symplectic_eigenvalue),
            ),
            ("gemellity_x", f(c.gemellity_x)),
            ("antigemellity_p", f(c.antigemellity_p)),
            ("conditional_variance_x", f(c.conditional_variance_x)),
            ("conditional_variance_p", f(c.conditional_variance_p)),
            ("separability", f(c.separability)),
            ("eof_ebits", f(c.eof_ebits)),
            ("epr_product", f(c.epr_product)),
            ("log_negativity", f(c.log_negativity)),
            ("xi", f(c.xi)),
            ("max_log_negativity", f(c.max_log_negativity)),
            ("lambda1", f(c.lambda1)),
            ("lambda2", f(c.lambda2)),
            ("standard_form", b(c.standard_form)),
            ("balanced", b(c.balanced)),
            ("hierarchy_consistent", b(c.hierarchy_consistent)),
            (
                "nonclassical_correlation",
                b(c.flags.nonclassical_correlation),
            ),
            ("qnd_correlated", b(c.flags.qnd_correlated)),
            ("inseparable", b(c.flags.inseparable)),
            ("epr_correlated", b(c.flags.epr_correlated)),
            ("gemellity_x_db", o(self.db.gemellity_x_db)),
            ("antigemellity_p_db", o(self.db.antigemellity_p_db)),
            (
                "conditional_variance_x_db",
                o(self.db.conditional_variance_x_db),
            ),
            (
                "conditional_variance_p_db",
                o(self.db.conditional_variance_p_db),
            ),
            ("separability_db", o(self.db.separability_db)),
            ("tool_version", self.tool_version.to_string()),
        ]
    }
}
