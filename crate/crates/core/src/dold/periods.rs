use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::exactnum::{root_order, CycloNum};
use crate::jet::Matrix2;

/// Periods of periodic points of a planar linear map: a subset of {1, m1, m2, [m1, m2]}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PeriodSet {
    periods: BTreeSet<u32>,
}

impl PeriodSet {
    /// Period set for eigenvalues of the given orders (`None` for a non-root of unity).
    pub fn from_orders(m1: Option<u32>, m2: Option<u32>) -> PeriodSet {
        let mut periods = BTreeSet::from([1]);
        for m in [m1, m2].into_iter().flatten() {
            periods.insert(m);
        }
        if let (Some(a), Some(b)) = (m1, m2) {
            if a > 1 && b > 1 {
                periods.insert(a.lcm(&b));
            }
        }
        PeriodSet { periods }
    }

    pub fn contains(&self, m: u32) -> bool {
        self.periods.contains(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.periods.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

impl fmt::Display for PeriodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.periods.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Multiplicative orders of the two eigenvalues of `a`, `None` for eigenvalues
/// that are not roots of unity.
///
/// Eigenvalues in the field are found among the candidates ±ζ_L^k. When the
/// characteristic polynomial is irreducible over Q(ζ_L), its roots are
/// conjugate and share an order n, detected as t^n ≡ 1 modulo the polynomial.
pub fn eigenvalue_orders(a: &Matrix2) -> (Option<u32>, Option<u32>) {
    let ctx = a.context().clone();
    let tr = a.trace();
    let det = a.det();
    let char_at = |u: &CycloNum| {
        let v = u.mul(u).unwrap().sub(&tr.mul(u).unwrap()).unwrap();
        v.add(&det).unwrap()
    };
    let l = ctx.level() as i64;
    for k in 0..l {
        for sign in [1, -1] {
            let mut u = CycloNum::zeta_pow(&ctx, k);
            if sign < 0 {
                u = u.neg();
            }
            if char_at(&u).is_zero() {
                let v = tr.sub(&u).unwrap();
                let (m1, m2) = (root_order(&u), root_order(&v));
                return match (m1, m2) {
                    (Some(x), Some(y)) if y < x => (Some(y), Some(x)),
                    (None, Some(y)) => (Some(y), None),
                    other => other,
                };
            }
        }
    }
    if det.is_zero() {
        return (None, None);
    }
    // a + b·t, starting from t^1
    let phi = ctx.phi() as u32;
    let bound = 8 * phi * phi + 8;
    let (mut a0, mut b0) = (CycloNum::zero(&ctx), CycloNum::one(&ctx));
    for n in 1..=bound {
        if a0.is_one() && b0.is_zero() {
            return (Some(n), Some(n));
        }
        let na = b0.mul(&det).unwrap().neg();
        let nb = a0.add(&b0.mul(&tr).unwrap()).unwrap();
        a0 = na;
        b0 = nb;
    }
    (None, None)
}

/// Admissible period set of the linear part.
pub fn admissible_periods(a: &Matrix2) -> PeriodSet {
    let (m1, m2) = eigenvalue_orders(a);
    PeriodSet::from_orders(m1, m2)
}
