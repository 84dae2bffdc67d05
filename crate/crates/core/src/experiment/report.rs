use std::fmt::Write as _;
use std::time::Duration;

use crate::enumerate::Group;
use crate::measures::CountResult;

pub const SL_HEADER: &str = "region_id,T,empirical,predicted,ratio";
pub const SP_HEADER: &str = "region_id,T,empirical,predicted,ratio,lambda,stability";
pub const NOT_DENSE: &str = "orbit not dense; predictions inapplicable";

/// One `(region, T)` cell of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub region_id: usize,
    pub t: f64,
    pub empirical: u64,
    /// `None` when no limit constant is available for the group or the
    /// region integral failed.
    pub predicted: Option<f64>,
    /// `N_T / T^e` (Sp only).
    pub lambda: Option<f64>,
    /// `|λ_T / λ_{T'} − 1|` against the previous grid point (Sp only).
    pub stability: Option<f64>,
}

impl ReportRow {
    pub fn ratio(&self) -> Option<f64> {
        self.predicted.filter(|p| *p > 0.0).map(|p| self.empirical as f64 / p)
    }

    pub fn count_result(&self) -> Option<CountResult> {
        self.predicted.map(|p| CountResult::new(self.t, self.empirical, p))
    }
}

/// Outcome of the finite-height rational-vector search on `span(v⁰)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCertificate {
    pub height: u64,
    pub tol: f64,
    pub witness: Option<Vec<i64>>,
}

impl DensityCertificate {
    /// No rational vector up to the height. Density itself is not proven.
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn describe(&self) -> String {
        match &self.witness {
            None => format!("no rational vector in span(v0) up to height {} (tol {:e})", self.height, self.tol),
            Some(q) => {
                let q: Vec<String> = q.iter().map(i64::to_string).collect();
                format!("rational vector ({}) in span(v0) (height {}, tol {:e})", q.join(","), self.height, self.tol)
            }
        }
    }
}

/// Wall-clock and size figures; kept out of the CSV so reports stay
/// reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Telemetry {
    pub matrices: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub group: Group,
    /// Sorted by region, then `T`.
    pub rows: Vec<ReportRow>,
    pub certificate: DensityCertificate,
    /// Diagnostics such as [`NOT_DENSE`].
    pub flags: Vec<String>,
    /// Set when the enumeration cap cut the run short; counts are then
    /// lower bounds.
    pub invalid: bool,
    pub telemetry: Telemetry,
}

impl ExperimentReport {
    pub fn header(&self) -> &'static str {
        match self.group {
            Group::Sl => SL_HEADER,
            Group::Sp => SP_HEADER,
        }
    }

    pub fn dense(&self) -> bool {
        self.certificate.passed()
    }

    pub fn rows_at(&self, t: f64) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.t == t)
    }

    /// Header line plus one line per row. Missing values are empty fields.
    pub fn csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut s = String::new();
        s.push_str(self.header());
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{},{}", r.region_id, r.t, r.empirical, opt(r.predicted), opt(r.ratio()));
            if self.group == Group::Sp {
                let _ = write!(s, ",{},{}", opt(r.lambda), opt(r.stability));
            }
            s.push('\n');
        }
        s
    }
}
