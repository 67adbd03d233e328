//! Which linear parts force at least two hidden orbits of period M.
//!
//! [`classify_linear`] sorts the eigenvalue orders so that m1 ≤ m2 and then
//! decides between the four guaranteed cases and their counterexample
//! families. [`verify_theorem`] checks every verdict on concrete germs.

mod scan;
mod witness;

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::dold::PeriodSet;
use crate::error::{Error, Result};
use crate::exactnum::{power_relation, CycloContext, CycloNum, RootOfUnity};
use crate::jet::Matrix2;

pub use scan::{
    scan_specs, verify_theorem, verify_theorem_with, CellResult, GermCheck, ScanConfig,
    TheoremReport,
};
pub use witness::{
    builtin_example, c8_germ, counterexample_germ, e2_germ, positive_witness, witness_germ,
    C8_DEFAULT,
};

/// Linear part with eigenvalues ζ_L^{k1}, ζ_L^{k2}; a non-diagonalizable spec is
/// the Jordan block [[λ, 0], [1, λ]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinearSpec {
    pub level: u32,
    pub k1: u32,
    pub k2: u32,
    pub diagonalizable: bool,
}

impl LinearSpec {
    pub fn new(level: u32, k1: i64, k2: i64, diagonalizable: bool) -> Result<LinearSpec> {
        if level == 0 {
            return Err(Error::InvalidLevel(level));
        }
        let l = level as i64;
        let (k1, k2) = (k1.rem_euclid(l) as u32, k2.rem_euclid(l) as u32);
        if !diagonalizable && k1 != k2 {
            return Err(Error::InvalidParams(
                "a Jordan block needs equal eigenvalues".into(),
            ));
        }
        Ok(LinearSpec {
            level,
            k1,
            k2,
            diagonalizable,
        })
    }

    pub fn diagonal(level: u32, k1: i64, k2: i64) -> Result<LinearSpec> {
        LinearSpec::new(level, k1, k2, true)
    }

    pub fn context(&self) -> Result<Arc<CycloContext>> {
        CycloContext::new(self.level)
    }

    /// Orders (m1, m2) of ζ_L^{k1} and ζ_L^{k2}, unsorted.
    pub fn orders(&self) -> (u32, u32) {
        let ord = |k: u32| self.level / self.level.gcd(&k);
        (ord(self.k1), ord(self.k2))
    }

    pub fn eigenvalues(&self, ctx: &Arc<CycloContext>) -> (CycloNum, CycloNum) {
        (
            CycloNum::zeta_pow(ctx, self.k1 as i64),
            CycloNum::zeta_pow(ctx, self.k2 as i64),
        )
    }

    pub fn matrix(&self, ctx: &Arc<CycloContext>) -> Matrix2 {
        let (l1, l2) = self.eigenvalues(ctx);
        let mut a = Matrix2::diag(l1, l2);
        if !self.diagonalizable {
            a.a21 = CycloNum::one(ctx);
        }
        a
    }

    pub fn periods(&self) -> PeriodSet {
        let (m1, m2) = self.orders();
        PeriodSet::from_orders(Some(m1), Some(m2))
    }

    /// Whether the eigenvalue order pair is listed with the larger order first.
    pub(crate) fn swapped(&self) -> bool {
        let (m1, m2) = self.orders();
        m1 > m2
    }

    /// The same spec with eigenvalues ordered by increasing order.
    pub(crate) fn sorted(&self) -> LinearSpec {
        if self.swapped() {
            LinearSpec {
                k1: self.k2,
                k2: self.k1,
                ..*self
            }
        } else {
            *self
        }
    }
}

impl fmt::Display for LinearSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m1, m2) = self.orders();
        write!(
            f,
            "L={} k=({},{}) orders=({},{}){}",
            self.level,
            self.k1,
            self.k2,
            m1,
            m2,
            if self.diagonalizable { "" } else { " jordan" }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Guaranteed,
    NotGuaranteed,
    NoPeriodM,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Guaranteed => "guaranteed",
            Outcome::NotGuaranteed => "not_guaranteed",
            Outcome::NoPeriodM => "no_period_M",
        })
    }
}

/// Case labels; the `p` variants are the counterexample families. `Lone` is the
/// family where one eigenvalue is a primitive M-th root of unity and the other
/// satisfies λ^M ≠ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    B1,
    B2,
    B3,
    B4,
    B1p,
    B2p,
    B3p,
    B4p,
    Lone,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::B1,
        CaseTag::B2,
        CaseTag::B3,
        CaseTag::B4,
        CaseTag::B1p,
        CaseTag::B2p,
        CaseTag::B3p,
        CaseTag::B4p,
        CaseTag::Lone,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::B1 => "b1",
            CaseTag::B2 => "b2",
            CaseTag::B3 => "b3",
            CaseTag::B4 => "b4",
            CaseTag::B1p => "b1p",
            CaseTag::B2p => "b2p",
            CaseTag::B3p => "b3p",
            CaseTag::B4p => "b4p",
            CaseTag::Lone => "lone",
        }
    }

    pub fn parse(s: &str) -> Result<CaseTag> {
        CaseTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown case tag {s:?}")))
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, CaseTag::B1 | CaseTag::B2 | CaseTag::B3 | CaseTag::B4)
    }

    /// Label as printed in reports, e.g. `(b2)'`.
    pub fn label(&self) -> String {
        match self {
            CaseTag::B1 | CaseTag::B2 | CaseTag::B3 | CaseTag::B4 => format!("({})", self.name()),
            CaseTag::Lone => "(lone)'".to_string(),
            _ => format!("({})'", &self.name()[..2]),
        }
    }
}

/// Integers witnessing a verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gcd: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictB {
    pub period: u32,
    /// Eigenvalue orders sorted so that m1 ≤ m2.
    pub m1: u32,
    pub m2: u32,
    pub outcome: Outcome,
    pub case: Option<CaseTag>,
    pub certificate: Certificate,
}

impl fmt::Display for VerdictB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.period;
        let c = &self.certificate;
        let Some(case) = self.case else {
            let set = PeriodSet::from_orders(Some(self.m1), Some(self.m2));
            return write!(f, "no_period_M: M={m} is not in {set}");
        };
        write!(f, "{} {}: ", self.outcome, case.label())?;
        match case {
            CaseTag::B1 => write!(f, "m1=m2=M={m}, lambda1=lambda2, diagonalizable"),
            CaseTag::B1p => write!(f, "m1=m2=M={m}, lambda1=lambda2, not diagonalizable"),
            CaseTag::B2 | CaseTag::B2p => {
                let (a, b) = (c.alpha.unwrap_or(0), c.beta.unwrap_or(0));
                let rel = if case == CaseTag::B2 {
                    format!("{}>M+1", a * b)
                } else {
                    "M+1".to_string()
                };
                write!(f, "alpha={a} beta={b} alpha*beta={rel}")
            }
            CaseTag::B3 => write!(f, "d=m2/m1={}, lambda2^d != lambda1", c.d.unwrap_or(0)),
            CaseTag::B3p => write!(f, "d=m2/m1={}, lambda2^d = lambda1", c.d.unwrap_or(0)),
            CaseTag::B4 => write!(
                f,
                "gcd(m1,m2)={} max={} < M={m}",
                c.gcd.unwrap_or(0),
                c.max.unwrap_or(0)
            ),
            CaseTag::B4p => write!(f, "gcd(m1,m2)=1, max={} < M={m}", c.max.unwrap_or(0)),
            CaseTag::Lone => write!(
                f,
                "one eigenvalue has order M={m}, the other satisfies lambda^M != 1"
            ),
        }
    }
}

/// Decide whether every germ with this linear part hides at least two period-M orbits.
pub fn classify_linear(spec: &LinearSpec, period: u32) -> Result<VerdictB> {
    if period <= 1 {
        return Err(Error::InvalidParams(format!(
            "period must exceed 1, got {period}"
        )));
    }
    let s = spec.sorted();
    let (m1, m2) = s.orders();
    let m = period;
    let verdict = |outcome, case, certificate| VerdictB {
        period: m,
        m1,
        m2,
        outcome,
        case: Some(case),
        certificate,
    };
    if !s.periods().contains(m) {
        return Ok(VerdictB {
            period: m,
            m1,
            m2,
            outcome: Outcome::NoPeriodM,
            case: None,
            certificate: Certificate::default(),
        });
    }
    if m1 == m && m2 == m {
        if s.k1 == s.k2 {
            return Ok(if s.diagonalizable {
                verdict(Outcome::Guaranteed, CaseTag::B1, Certificate::default())
            } else {
                verdict(Outcome::NotGuaranteed, CaseTag::B1p, Certificate::default())
            });
        }
        let ctx = s.context()?;
        let r1 = RootOfUnity::new(&ctx, s.k1 as i64);
        let r2 = RootOfUnity::new(&ctx, s.k2 as i64);
        let (alpha, beta) = match (power_relation(&r1, &r2), power_relation(&r2, &r1)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Inconsistent(
                    "distinct primitive roots of one order must be powers of each other".into(),
                ))
            }
        };
        let cert = Certificate {
            alpha: Some(alpha),
            beta: Some(beta),
            ..Certificate::default()
        };
        let ab = alpha as u64 * beta as u64;
        if ab % m as u64 != 1 || ab < m as u64 + 1 {
            return Err(Error::Inconsistent(format!(
                "alpha*beta = {ab} is not kM+1 with k >= 1"
            )));
        }
        return Ok(if ab > m as u64 + 1 {
            verdict(Outcome::Guaranteed, CaseTag::B2, cert)
        } else {
            verdict(Outcome::NotGuaranteed, CaseTag::B2p, cert)
        });
    }
    if m2 == m && m.is_multiple_of(m1) {
        let d = m / m1;
        let ctx = s.context()?;
        let (l1, l2) = s.eigenvalues(&ctx);
        let cert = Certificate {
            d: Some(d),
            ..Certificate::default()
        };
        return Ok(if l2.pow(d as u64) != l1 {
            verdict(Outcome::Guaranteed, CaseTag::B3, cert)
        } else {
            verdict(Outcome::NotGuaranteed, CaseTag::B3p, cert)
        });
    }
    if m1 == m || m2 == m {
        return Ok(verdict(
            Outcome::NotGuaranteed,
            CaseTag::Lone,
            Certificate::default(),
        ));
    }
    debug_assert_eq!(m1.lcm(&m2), m);
    let g = m1.gcd(&m2);
    let cert = Certificate {
        gcd: Some(g),
        max: Some(m2),
        ..Certificate::default()
    };
    Ok(if g > 1 {
        verdict(Outcome::Guaranteed, CaseTag::B4, cert)
    } else {
        verdict(Outcome::NotGuaranteed, CaseTag::B4p, cert)
    })
}

/// Every case condition that holds for (spec, M), evaluated independently of
/// [`classify_linear`]; used to check that the cases are mutually exclusive.
pub fn matching_cases(spec: &LinearSpec, period: u32) -> Result<Vec<CaseTag>> {
    let s = spec.sorted();
    let (m1, m2) = s.orders();
    let m = period;
    let ctx = s.context()?;
    let (l1, l2) = s.eigenvalues(&ctx);
    let mut out = Vec::new();
    if s.diagonalizable && m1 == m && m2 == m && l1 == l2 {
        out.push(CaseTag::B1);
    }
    if m1 == m && m2 == m {
        let exists = (2..m).any(|a| {
            (2..m).any(|b| l1.pow(a as u64) == l2 && l2.pow(b as u64) == l1 && a * b > m + 1)
        });
        if exists {
            out.push(CaseTag::B2);
        }
    }
    // d = m2/m1 > 1, as in the (b3) argument; d = 1 would overlap (b2)
    if m1 < m2 && m2 % m1 == 0 && m2 == m && l2.pow((m2 / m1) as u64) != l1 {
        out.push(CaseTag::B3);
    }
    if m1.lcm(&m2) == m && m1.gcd(&m2) > 1 && m1.max(m2) < m {
        out.push(CaseTag::B4);
    }
    Ok(out)
}
