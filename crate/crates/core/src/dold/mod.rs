//! Dold indices P_M(f,0) and hidden orbit counts O_M(f,0) = P_M(f,0)/M.

mod periods;
mod report;

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::divisors;
use crate::jet::GermMap;
use crate::multiplicity::{fixed_point_index_with, Escalation, MultiplicityResult};

pub use periods::{admissible_periods, eigenvalue_orders, PeriodSet};
pub use report::{ConsistencyReport, DoldReport, DoldRow};

/// Distinct primes of `m` in increasing order.
pub fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// All pairs (M:τ, (−1)^{#τ}) for subsets τ of the primes dividing M.
pub fn prime_subsets(m: u32) -> Vec<(u32, i32)> {
    let primes = prime_factors(m);
    (0u32..1 << primes.len())
        .map(|mask| {
            let (prod, count) = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold((1u32, 0u32), |(p, c), (_, &q)| (p * q, c + 1));
            (m / prod, if count % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// Index engine for one germ; μ_{f^m}(0) values are computed once and shared.
pub struct DoldEngine {
    germ: GermMap,
    periods: PeriodSet,
    cap: u32,
    memo: Mutex<HashMap<u32, MultiplicityResult>>,
}

impl DoldEngine {
    pub fn new(germ: &GermMap) -> DoldEngine {
        let periods = admissible_periods(&germ.linear_part());
        DoldEngine {
            germ: germ.clone(),
            periods,
            cap: Escalation::DEFAULT_CAP,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Lower the truncation cap used when escalating.
    pub fn with_cap(mut self, cap: u32) -> DoldEngine {
        self.cap = cap;
        self
    }

    pub fn germ(&self) -> &GermMap {
        &self.germ
    }

    pub fn periods(&self) -> &PeriodSet {
        &self.periods
    }

    /// μ_{f^m}(0).
    pub fn index(&self, m: u32) -> Result<MultiplicityResult> {
        if let Some(r) = self.memo.lock().expect("memo lock").get(&m) {
            return Ok(r.clone());
        }
        let mut policy = Escalation::for_period(m);
        policy.cap = self.cap;
        policy.initial = policy.initial.min(self.cap);
        let r = fixed_point_index_with(&self.germ, m, policy)?;
        self.memo.lock().expect("memo lock").insert(m, r.clone());
        Ok(r)
    }

    /// Compute μ_{f^d}(0) for every divisor d of `m`, in parallel.
    pub fn prefetch(&self, m: u32) -> Result<()> {
        divisors(m)
            .into_par_iter()
            .try_for_each(|d| self.index(d).map(|_| ()))
    }

    /// Möbius sum Σ_τ (−1)^{#τ} μ_{f^{M:τ}}(0), without the admissibility check.
    pub fn mobius_sum(&self, m: u32) -> Result<i64> {
        check_period(m)?;
        let mut total = 0i64;
        for (d, sign) in prime_subsets(m) {
            total += sign as i64 * self.index(d)?.order as i64;
        }
        Ok(total)
    }

    /// P_M(f,0); non-admissible periods must give zero.
    pub fn dold_index(&self, m: u32) -> Result<i64> {
        check_period(m)?;
        let p = self.mobius_sum(m)?;
        if !self.periods.contains(m) && p != 0 {
            return Err(Error::Inconsistent(format!(
                "P_{m} = {p} but {m} is not an admissible period"
            )));
        }
        Ok(p)
    }

    /// O_M(f,0) = P_M / M.
    pub fn orbit_count(&self, m: u32) -> Result<u64> {
        let p = self.dold_index(m)?;
        if p % m as i64 != 0 {
            return Err(Error::Divisibility {
                period: m,
                value: p,
            });
        }
        if p < 0 {
            return Err(Error::Inconsistent(format!("P_{m} = {p} is negative")));
        }
        Ok((p / m as i64) as u64)
    }

    /// Full divisor table for period `m`.
    pub fn report(&self, m: u32) -> Result<DoldReport> {
        check_period(m)?;
        self.prefetch(m)?;
        let mut rows = Vec::new();
        for d in divisors(m) {
            if !self.periods.contains(d) {
                continue;
            }
            let mu = self.index(d)?;
            let p = self.dold_index(d)?;
            let o = self.orbit_count(d)?;
            rows.push(DoldRow {
                m: d,
                mu: mu.order,
                method: mu.method,
                dold: p,
                orbits: o,
            });
        }
        let mu_total = self.index(m)?.order;
        let sum: i64 = rows.iter().map(|r| r.dold).sum();
        Ok(DoldReport {
            period: m,
            periods: self.periods.clone(),
            dold: self.dold_index(m)?,
            orbits: self.orbit_count(m)?,
            rows,
            mu_total,
            consistent: sum == mu_total as i64,
        })
    }

    /// Check μ_{f^M}(0) = Σ_{m ∈ 𝔐_f, m | M} P_m(f,0) and P_m = 0 off the admissible set.
    pub fn index_consistency(&self, m: u32) -> Result<ConsistencyReport> {
        let report = self.report(m)?;
        let mut off_admissible = Vec::new();
        for d in divisors(m) {
            if !self.periods.contains(d) {
                off_admissible.push((d, self.mobius_sum(d)?));
            }
        }
        let sum: i64 = report.rows.iter().map(|r| r.dold).sum();
        let ok = sum == report.mu_total as i64 && off_admissible.iter().all(|(_, p)| *p == 0);
        let out = ConsistencyReport {
            report,
            admissible_sum: sum,
            off_admissible,
        };
        if !ok {
            return Err(Error::Inconsistent(out.to_string()));
        }
        Ok(out)
    }
}

fn check_period(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    Ok(())
}

pub fn dold_index(f: &GermMap, m: u32) -> Result<i64> {
    DoldEngine::new(f).dold_index(m)
}

pub fn orbit_count(f: &GermMap, m: u32) -> Result<u64> {
    DoldEngine::new(f).orbit_count(m)
}

pub fn index_consistency(f: &GermMap, m: u32) -> Result<ConsistencyReport> {
    DoldEngine::new(f).index_consistency(m)
}
