use std::fmt;

use log::debug;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::witness::{counterexample_germ, decoupled, positive_witness, witness_germ};
use super::{classify_linear, CaseTag, LinearSpec, Outcome, VerdictB};
use crate::dold::DoldEngine;
use crate::error::{Error, Result};
use crate::exactnum::{CycloNum, Rational};
use crate::jet::{Exp, GermMap, Jet2};
use crate::normalform::is_resonant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub max_lcm: u32,
    pub samples: u32,
    pub seed: u64,
    /// Redraws allowed per sample before it is counted as rejected.
    pub attempts: u32,
}

impl ScanConfig {
    pub fn new(max_lcm: u32, samples: u32, seed: u64) -> ScanConfig {
        ScanConfig {
            max_lcm,
            samples,
            seed,
            attempts: 6,
        }
    }
}

/// One germ checked inside a cell.
#[derive(Clone, Debug, Serialize)]
pub struct GermCheck {
    /// `witness`, `base` or `sample`.
    pub role: &'static str,
    /// O_M for witnesses and samples of realizable periods, P_M otherwise.
    pub value: i64,
    pub pass: bool,
    /// Serialized germ, kept only for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub germ: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellResult {
    pub id: usize,
    pub spec: LinearSpec,
    pub period: u32,
    pub verdict: VerdictB,
    pub checks: Vec<GermCheck>,
    /// Samples abandoned because every draw had a non-isolated or undetermined fixed point.
    pub rejected: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub config: ScanConfig,
    pub cells: Vec<CellResult>,
    pub passed: usize,
    pub failed: usize,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn cell(&self, spec: &LinearSpec, period: u32) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.spec == *spec && c.period == period)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.config.max_lcm;
        writeln!(
            f,
            "theorem scan: max_lcm={} samples={} seed={}",
            max, self.config.samples, self.config.seed
        )?;
        writeln!(
            f,
            "legend: G guaranteed, n not guaranteed, . no period M, X failure"
        )?;
        let mut header = format!("{:<34}", "linear part \\ M");
        for m in 2..=max {
            header.push_str(&format!("{m:>4}"));
        }
        writeln!(f, "{header}")?;
        for row in self.cells.chunk_by(|a, b| a.spec == b.spec) {
            let mut line = format!("{:<34}", row[0].spec.to_string());
            for c in row {
                let mark = match (c.pass, c.verdict.outcome) {
                    (false, _) => 'X',
                    (true, Outcome::Guaranteed) => 'G',
                    (true, Outcome::NotGuaranteed) => 'n',
                    (true, Outcome::NoPeriodM) => '.',
                };
                line.push_str(&format!("{mark:>4}"));
            }
            writeln!(f, "{line}")?;
        }
        for c in self.cells.iter().filter(|c| !c.pass) {
            writeln!(f, "FAIL {} M={}: {}", c.spec, c.period, c.verdict)?;
            if let Some(e) = &c.error {
                writeln!(f, "  error: {e}")?;
            }
            for g in c.checks.iter().filter(|g| !g.pass) {
                writeln!(f, "  {} value={}", g.role, g.value)?;
                if let Some(germ) = &g.germ {
                    writeln!(f, "  germ: {germ}")?;
                }
            }
        }
        let rejected: u32 = self.cells.iter().map(|c| c.rejected).sum();
        if rejected > 0 {
            writeln!(
                f,
                "{rejected} samples rejected (fixed point not isolated within the sampling budget)"
            )?;
        }
        if self.all_pass() {
            write!(f, "{} cells, all cells PASS", self.cells.len())
        } else {
            write!(f, "{} cells, {} FAIL", self.cells.len(), self.failed)
        }
    }
}

/// Exponents k of ζ_L with order exactly m.
fn exponents_of_order(level: u32, m: u32) -> Vec<u32> {
    let step = level / m;
    (0..m)
        .filter(|u| u.gcd(&m) == 1 || m == 1)
        .map(|u| u * step)
        .collect()
}

/// Every linear part with eigenvalue orders m1 ≤ m2, lcm ≤ max_lcm, over the
/// level lcm(m1, m2).
pub fn scan_specs(max_lcm: u32) -> Vec<LinearSpec> {
    let mut out = Vec::new();
    for m2 in 1..=max_lcm {
        for m1 in 1..=m2 {
            let level = m1.lcm(&m2);
            if level > max_lcm {
                continue;
            }
            for &k1 in &exponents_of_order(level, m1) {
                for &k2 in &exponents_of_order(level, m2) {
                    if m1 == m2 && k2 < k1 {
                        continue;
                    }
                    out.push(LinearSpec {
                        level,
                        k1,
                        k2,
                        diagonalizable: true,
                    });
                    if k1 == k2 {
                        out.push(LinearSpec {
                            level,
                            k1,
                            k2,
                            diagonalizable: false,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn verify_theorem(max_lcm: u32, samples: u32, seed: u64) -> Result<TheoremReport> {
    verify_theorem_with(&ScanConfig::new(max_lcm, samples, seed))
}

pub fn verify_theorem_with(cfg: &ScanConfig) -> Result<TheoremReport> {
    if cfg.max_lcm < 2 {
        return Err(Error::InvalidParams(format!(
            "max_lcm must be at least 2, got {}",
            cfg.max_lcm
        )));
    }
    let cells: Vec<(LinearSpec, u32)> = scan_specs(cfg.max_lcm)
        .into_iter()
        .flat_map(|s| (2..=cfg.max_lcm).map(move |m| (s, m)))
        .collect();
    let results: Vec<CellResult> = cells
        .into_par_iter()
        .enumerate()
        .map(|(id, (spec, m))| run_cell(cfg, id, &spec, m))
        .collect::<Result<_>>()?;
    let passed = results.iter().filter(|c| c.pass).count();
    Ok(TheoremReport {
        config: *cfg,
        failed: results.len() - passed,
        passed,
        cells: results,
    })
}

/// Quantity compared in a cell: O_M for realizable periods, P_M otherwise.
fn measure(f: &GermMap, period: u32, outcome: Outcome, cap: Option<u32>) -> Result<i64> {
    let mut engine = DoldEngine::new(f);
    if let Some(c) = cap {
        engine = engine.with_cap(c);
    }
    engine.prefetch(period)?;
    if outcome == Outcome::NoPeriodM {
        engine.mobius_sum(period)
    } else {
        Ok(engine.orbit_count(period)? as i64)
    }
}

fn accepts(outcome: Outcome, role: &str, v: i64) -> bool {
    match (outcome, role) {
        (Outcome::Guaranteed, _) => v >= 2,
        (Outcome::NotGuaranteed, "witness") => v == 1,
        (Outcome::NotGuaranteed, _) => v >= 1,
        (Outcome::NoPeriodM, _) => v == 0,
    }
}

fn is_rejection(e: &Error) -> bool {
    matches!(
        e,
        Error::NonIsolated { .. }
            | Error::Untrusted { .. }
            | Error::NotStabilized { .. }
            | Error::TruncationBudget { .. }
    )
}

fn check(role: &'static str, f: &GermMap, outcome: Outcome, value: i64) -> GermCheck {
    let pass = accepts(outcome, role, value);
    let germ = if pass {
        None
    } else {
        serde_json::from_str(&f.to_germ_file()).ok()
    };
    GermCheck {
        role,
        value,
        pass,
        germ,
    }
}

fn run_cell(cfg: &ScanConfig, id: usize, spec: &LinearSpec, period: u32) -> Result<CellResult> {
    let start = std::time::Instant::now();
    let verdict = classify_linear(spec, period)?;
    let outcome = verdict.outcome;
    let (role, base) = match (outcome, verdict.case) {
        (Outcome::Guaranteed, Some(tag)) => ("witness", positive_witness(tag, spec, period)?),
        (Outcome::NotGuaranteed, _) => ("witness", counterexample_germ(spec, period)?),
        _ if spec.diagonalizable => ("base", decoupled(spec)?),
        _ => ("base", jordan_base(spec, period)?),
    };
    let mut cell = CellResult {
        id,
        spec: *spec,
        period,
        verdict,
        checks: Vec::new(),
        rejected: 0,
        pass: true,
        error: None,
    };
    match measure(&base, period, outcome, None) {
        Ok(v) => cell.checks.push(check(role, &base, outcome, v)),
        Err(e) => {
            cell.error = Some(format!("{role}: {e}"));
            cell.pass = false;
            return Ok(cell);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(id as u64);
    let pool = resonant_monomials(spec, period)?;
    let sample_cap = (4 * period + 8).clamp(32, 64);
    for _ in 0..cfg.samples {
        let mut done = false;
        for _ in 0..cfg.attempts.max(1) {
            let g = perturb(&base, &pool, &mut rng)?;
            if fixed_axis(&g, period) {
                debug!("cell {id}: rejected draw (an axis of period-{period} points)");
                continue;
            }
            match measure(&g, period, outcome, Some(sample_cap)) {
                Ok(v) => {
                    cell.checks.push(check("sample", &g, outcome, v));
                    done = true;
                    break;
                }
                Err(e) if is_rejection(&e) => debug!("cell {id}: rejected draw ({e})"),
                Err(e) => {
                    cell.error = Some(format!("sample: {e}"));
                    cell.checks.push(check("sample", &g, outcome, i64::MIN));
                    done = true;
                    break;
                }
            }
        }
        if !done {
            cell.rejected += 1;
        }
    }
    cell.pass = cell.error.is_none() && cell.checks.iter().all(|c| c.pass);
    debug!(
        "cell {id} ({spec}, M={period}) done in {:?}",
        start.elapsed()
    );
    Ok(cell)
}

/// Jordan base germ for a period the linear part does not realize.
fn jordan_base(spec: &LinearSpec, period: u32) -> Result<GermMap> {
    let (m, _) = spec.orders();
    if m == 1 {
        // λ = 1: the (b1)′ shape with exponent 2 keeps the origin isolated
        let ctx = spec.context()?;
        let one = CycloNum::one(&ctx);
        return GermMap::from_terms(
            &ctx,
            16,
            vec![((1, 0), one.clone()), ((0, 2), one.clone())],
            vec![((1, 0), one.clone()), ((0, 1), one)],
        );
    }
    let _ = period;
    witness_germ(CaseTag::B1p, spec, m)
}

/// (component, exponent) pairs of degree 2..=M+1 resonant for the eigenvalues.
fn resonant_monomials(spec: &LinearSpec, period: u32) -> Result<Vec<(usize, Exp)>> {
    let ctx = spec.context()?;
    let (l1, l2) = spec.eigenvalues(&ctx);
    let mut out = Vec::new();
    for d in 2..=period + 1 {
        for i in 0..=d {
            for j in 0..2 {
                if is_resonant(j + 1, i, d - i, &l1, &l2) {
                    out.push((j, (i, d - i)));
                }
            }
        }
    }
    Ok(out)
}

/// Add one to three resonant monomials with coefficients p/q, 0 < |p| ≤ 3, q ∈ {1, 2}.
/// A coordinate axis that f maps into itself by x ↦ λx with λ^M = 1 consists of
/// fixed points of f^M. Cancelling draws produce these often, and the dual space
/// only reports them after a full escalation.
pub(super) fn fixed_axis(f: &GermMap, period: u32) -> bool {
    (0..2).any(|i| {
        let other = 1 - i;
        // the axis {x_i = 0}: every term of f_i carries x_i, and f_other is linear there
        let on_axis = |e: Exp| if i == 0 { e.0 == 0 } else { e.1 == 0 };
        let invariant = f.component(i).terms().all(|(e, _)| !on_axis(e));
        let mut restricted = f.component(other).terms().filter(|&(e, _)| on_axis(e));
        let unit = if other == 0 { (1, 0) } else { (0, 1) };
        let lambda = restricted
            .next()
            .filter(|(e, _)| *e == unit)
            .map(|(_, c)| c);
        invariant
            && restricted.next().is_none()
            && lambda.is_some_and(|l| l.pow(period as u64).is_one())
    })
}

fn perturb(base: &GermMap, pool: &[(usize, Exp)], rng: &mut ChaCha8Rng) -> Result<GermMap> {
    if pool.is_empty() {
        return Ok(base.clone());
    }
    let ctx = base.context().clone();
    let top = pool.iter().map(|(_, (a, b))| a + b).max().unwrap_or(1);
    let mut comps = base
        .with_truncation(base.truncation().max(top))
        .components()
        .clone();
    let count = rng.random_range(1..=3usize);
    for _ in 0..count {
        let (j, e) = pool[rng.random_range(0..pool.len())];
        let mut p: i64 = rng.random_range(1..=3);
        if rng.random_bool(0.5) {
            p = -p;
        }
        let q: i64 = rng.random_range(1..=2);
        let c = CycloNum::from_rational(&ctx, &Rational::new(p.into(), q.into()));
        let t = Jet2::monomial(&ctx, comps[j].truncation(), e, &c)?;
        comps[j] = comps[j].add(&t)?;
    }
    let [c1, c2] = comps;
    GermMap::new(c1, c2)
}
