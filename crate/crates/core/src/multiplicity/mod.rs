//! Local zero orders π_g(0) and fixed-point indices μ_{f^m}(0).
//!
//! Two methods are available. Cronin's theorem gives π = m1·m2 when the
//! lowest homogeneous forms of the two components meet only at the origin.
//! Otherwise the dimension of O/(I + m^{s+1}) is tracked for growing s until it
//! stops increasing; by Nakayama's lemma the stable value is the multiplicity.

use std::fmt;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Coeff;
use crate::jet::{GermMap, Jet2, MAX_TRUNCATION};
use crate::linalg::{bareiss_det, Echelon, SparseRow};

/// Lowest-degree homogeneous parts of the two components.
#[derive(Clone, Debug)]
pub struct HomogForms {
    pub form1: Jet2,
    pub form2: Jet2,
    pub degrees: (u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cronin,
    DualSpace,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cronin => "cronin",
            Method::DualSpace => "dual_space",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityResult {
    pub order: u64,
    pub method: Method,
    /// Degree at which the dual-space dimension stopped growing.
    pub stabilized_at: Option<u32>,
    /// Determinacy certificate: the answer never consulted coefficients at degree D.
    pub trusted: bool,
    /// Truncation degree of the jet the answer was computed from.
    pub truncation: u32,
}

pub fn lowest_forms(g: &GermMap) -> Result<HomogForms> {
    let mut forms = Vec::with_capacity(2);
    let mut degrees = [0u32; 2];
    for (i, comp) in g.components().iter().enumerate() {
        let d = comp.lowest_degree().ok_or(Error::ZeroComponent {
            component: i + 1,
            truncation: g.truncation(),
        })?;
        degrees[i] = d;
        forms.push(comp.homogeneous_part(d));
    }
    let form2 = forms.pop().expect("two forms");
    let form1 = forms.pop().expect("two forms");
    Ok(HomogForms {
        form1,
        form2,
        degrees: (degrees[0], degrees[1]),
    })
}

/// Dehomogenize at x2 = 1: coefficient of t^i is that of x1^i x2^(m−i).
fn dehomogenize(form: &Jet2, m: u32) -> Vec<Coeff> {
    let ctx = form.context();
    let mut p: Vec<Coeff> = (0..=m).map(|i| form.coeff((i, m - i)).val).collect();
    while p.len() > 1 && p.last().is_some_and(Coeff::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(ctx.zero());
    }
    p
}

/// Sylvester resultant of two univariate polynomials given constant term first.
fn resultant(ctx: &crate::exactnum::CycloContext, p: &[Coeff], q: &[Coeff]) -> Coeff {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let n = dp + dq;
    let mut m = vec![vec![ctx.zero(); n]; n];
    for r in 0..dq {
        for (i, c) in p.iter().rev().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..dp {
        for (i, c) in q.iter().rev().enumerate() {
            m[dq + r][r + i] = c.clone();
        }
    }
    bareiss_det(ctx, m)
}

/// True iff the two forms vanish simultaneously only at the origin.
pub fn forms_coprime(h: &HomogForms) -> bool {
    let (m1, m2) = h.degrees;
    if h.form1.is_zero() || h.form2.is_zero() {
        return false;
    }
    if h.form1.coeff((m1, 0)).is_zero() && h.form2.coeff((m2, 0)).is_zero() {
        return false;
    }
    let ctx = h.form1.context();
    let p = dehomogenize(&h.form1, m1);
    let q = dehomogenize(&h.form2, m2);
    !resultant(ctx, &p, &q).is_zero()
}

pub fn cronin_zero_order(g: &GermMap) -> Result<Option<MultiplicityResult>> {
    let forms = lowest_forms(g)?;
    if !forms_coprime(&forms) {
        return Ok(None);
    }
    let (m1, m2) = forms.degrees;
    Ok(Some(MultiplicityResult {
        order: m1 as u64 * m2 as u64,
        method: Method::Cronin,
        stabilized_at: None,
        trusted: true,
        truncation: g.truncation(),
    }))
}

/// Column of x1^i1 x2^i2 when monomials are listed by ascending degree.
fn column(i1: u32, i2: u32) -> usize {
    let d = (i1 + i2) as usize;
    d * (d + 1) / 2 + i2 as usize
}

fn monomial_count(s: u32) -> usize {
    let s = s as usize;
    (s + 1) * (s + 2) / 2
}

/// dim O/(I + m^{s+1}) for s = 0..=t, from a single echelon of the order-t Macaulay matrix.
fn hilbert_samuel(g: &GermMap, t: u32) -> Vec<usize> {
    let ctx = g.context();
    let mut ech = Echelon::new(ctx);
    for comp in g.components() {
        let by_degree: Vec<_> = comp
            .raw_terms()
            .iter()
            .filter(|(e, _)| e.0 + e.1 <= t)
            .collect();
        for shift_deg in 0..t {
            for a1 in 0..=shift_deg {
                let a2 = shift_deg - a1;
                let row: SparseRow = by_degree
                    .iter()
                    .filter(|(e, _)| e.0 + e.1 + shift_deg <= t)
                    .map(|(e, c)| (column(e.0 + a1, e.1 + a2), (*c).clone()))
                    .collect();
                if !row.is_empty() {
                    ech.insert(row);
                }
            }
        }
    }
    let pivots: Vec<usize> = ech.pivot_columns().collect();
    (0..=t)
        .map(|s| {
            let n = monomial_count(s);
            n - pivots.iter().take_while(|&&p| p < n).count()
        })
        .collect()
}

/// Multiplicity from the stabilization of the dual-space dimension, looking at
/// most up to degree `cap` (never beyond the truncation of `g`).
pub fn dual_space_zero_order(g: &GermMap, cap: u32) -> Result<MultiplicityResult> {
    let d = g.truncation();
    let cap = cap.min(d);
    let mut stages: Vec<u32> = [8u32, 16].into_iter().filter(|&t| t < cap).collect();
    stages.push(cap);
    for t in stages {
        let h = hilbert_samuel(g, t);
        if let Some(s) = (1..=t as usize).find(|&s| h[s] == h[s - 1]) {
            let s = s as u32;
            return Ok(MultiplicityResult {
                order: h[s as usize] as u64,
                method: Method::DualSpace,
                stabilized_at: Some(s),
                trusted: s < d,
                truncation: d,
            });
        }
    }
    Err(Error::NotStabilized { cap })
}

/// π_g(0): Cronin when the lowest forms are coprime, the dual-space oracle otherwise.
pub fn zero_order(g: &GermMap) -> Result<MultiplicityResult> {
    let forms = lowest_forms(g)?;
    let (m1, m2) = forms.degrees;
    if forms_coprime(&forms) {
        return Ok(MultiplicityResult {
            order: m1 as u64 * m2 as u64,
            method: Method::Cronin,
            stabilized_at: None,
            trusted: true,
            truncation: g.truncation(),
        });
    }
    let r = dual_space_zero_order(g, g.truncation())?;
    if r.order <= m1 as u64 * m2 as u64 {
        return Err(Error::Inconsistent(format!(
            "zero order {} does not exceed {}·{} although the lowest forms share a root",
            r.order, m1, m2
        )));
    }
    Ok(r)
}

/// Truncation schedule for [`fixed_point_index_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Escalation {
    pub initial: u32,
    pub cap: u32,
}

impl Escalation {
    pub const DEFAULT_CAP: u32 = 128;

    /// Start at max(16, 2m + 3) and double up to 128.
    pub fn for_period(m: u32) -> Escalation {
        Escalation {
            initial: 16u32.max(2 * m + 3),
            cap: Self::DEFAULT_CAP,
        }
    }
}

/// μ_{f^m}(0) = π_{id − f^m}(0).
pub fn fixed_point_index(f: &GermMap, m: u32) -> Result<MultiplicityResult> {
    fixed_point_index_with(f, m, Escalation::for_period(m))
}

pub fn fixed_point_index_with(
    f: &GermMap,
    m: u32,
    policy: Escalation,
) -> Result<MultiplicityResult> {
    if m == 0 {
        return Err(Error::InvalidParams(
            "iteration count must be positive".into(),
        ));
    }
    let cap = policy.cap.min(MAX_TRUNCATION);
    let mut d = policy.initial.min(cap);
    let mut stalls = 0;
    loop {
        let g = f.with_truncation(d).iterate(m)?.displacement();
        match zero_order(&g) {
            Ok(r) if r.trusted => return Ok(r),
            Ok(r) => {
                if d >= cap {
                    return Err(Error::Untrusted {
                        stabilized_at: r.stabilized_at.unwrap_or(d),
                        cap,
                    });
                }
            }
            Err(Error::NotStabilized { .. }) | Err(Error::ZeroComponent { .. }) => {
                stalls += 1;
                if stalls >= 2 || d >= cap {
                    return Err(Error::NonIsolated { truncation: d });
                }
            }
            Err(e) => return Err(e),
        }
        let next = (2 * d).min(cap);
        warn!("escalating truncation for iterate {m}: D {d} -> {next}");
        d = next;
    }
}
