use std::fmt;

use serde::Serialize;

use super::PeriodSet;
use crate::multiplicity::Method;

/// One admissible divisor m of M with μ_{f^m}(0), P_m(f,0) and O_m(f,0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoldRow {
    pub m: u32,
    pub mu: u64,
    pub method: Method,
    pub dold: i64,
    pub orbits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoldReport {
    pub period: u32,
    pub periods: PeriodSet,
    pub rows: Vec<DoldRow>,
    /// μ_{f^M}(0), also when M itself is not admissible.
    pub mu_total: u64,
    /// P_M(f,0).
    pub dold: i64,
    /// O_M(f,0).
    pub orbits: u64,
    /// Whether μ_{f^M}(0) equals the sum of the listed P_m.
    pub consistent: bool,
}

impl DoldReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

impl fmt::Display for DoldReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.period;
        writeln!(f, "period M = {m}, admissible periods {}", self.periods)?;
        writeln!(
            f,
            "{:>6} {:>10} {:>8} {:>8}  method",
            "m", "mu(f^m)", "P_m", "O_m"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6} {:>10} {:>8} {:>8}  {}",
                r.m, r.mu, r.dold, r.orbits, r.method
            )?;
        }
        let sum: i64 = self.rows.iter().map(|r| r.dold).sum();
        writeln!(
            f,
            "mu(f^{m}) = {} {} sum of P_m = {} ({})",
            self.mu_total,
            if self.consistent { "==" } else { "!=" },
            sum,
            if self.consistent {
                "consistent"
            } else {
                "INCONSISTENT"
            }
        )?;
        writeln!(f, "P_{m} = {}", self.dold)?;
        write!(f, "O_{m} = {}", self.orbits)
    }
}

/// Outcome of the index identity check for one period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub report: DoldReport,
    pub admissible_sum: i64,
    /// (m, P_m) for divisors m of M outside the admissible set.
    pub off_admissible: Vec<(u32, i64)>,
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.report)?;
        for (m, p) in &self.off_admissible {
            writeln!(f, "non-admissible m = {m}: P_m = {p}")?;
        }
        write!(
            f,
            "mu(f^{}) = {}, admissible sum = {}",
            self.report.period, self.report.mu_total, self.admissible_sum
        )
    }
}
