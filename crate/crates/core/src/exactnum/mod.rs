//! Exact arithmetic in Q and in cyclotomic fields Q(ζ_L).
//!
//! Every germ coefficient and every eigenvalue lives in a single field
//! Q(ζ_L) chosen by the caller; mixing levels is reported as
//! [`Error::ContextMismatch`](crate::Error::ContextMismatch) rather than lifted.

mod cyclo;
mod parse;

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;

#[cfg(test)]
use cyclo::euler_phi;
pub use cyclo::{cyclo_arith, cyclotomic_poly, ArithOp, CycloContext, CycloNum, MAX_LEVEL};
pub(crate) use cyclo::{divisors, Coeff};
pub use parse::{parse_coeff, parse_rational};

/// Arbitrary-precision rational; always stored in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Least m ≥ 1 with u^m = 1, or `None` when u is not a root of unity.
///
/// The roots of unity of Q(ζ_L) are the ±ζ_L^k, so candidate orders are the
/// divisors of lcm(2, L).
pub fn root_order(u: &CycloNum) -> Option<u32> {
    if u.is_zero() {
        return None;
    }
    let bound = 2u32.lcm(&u.level());
    if !u.pow(bound as u64).is_one() {
        return None;
    }
    divisors(bound)
        .into_iter()
        .find(|&d| u.pow(d as u64).is_one())
}

/// The root of unity ζ_L^k of a fixed context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    ctx: Arc<CycloContext>,
    exponent: u32,
}

impl RootOfUnity {
    pub fn new(ctx: &Arc<CycloContext>, exponent: i64) -> RootOfUnity {
        let l = ctx.level() as i64;
        RootOfUnity {
            ctx: Arc::clone(ctx),
            exponent: exponent.rem_euclid(l) as u32,
        }
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        &self.ctx
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// L / gcd(L, k).
    pub fn order(&self) -> u32 {
        let l = self.ctx.level();
        l / l.gcd(&self.exponent)
    }

    pub fn value(&self) -> CycloNum {
        CycloNum::zeta_pow(&self.ctx, self.exponent as i64)
    }

    /// The root ζ_L^{k·e}.
    pub fn pow(&self, e: u32) -> RootOfUnity {
        RootOfUnity::new(&self.ctx, self.exponent as i64 * e as i64)
    }

    /// Recognize `u` as ζ_L^k if it is one.
    pub fn recognize(u: &CycloNum) -> Option<RootOfUnity> {
        let ctx = u.context();
        (0..ctx.level() as i64)
            .map(|k| RootOfUnity::new(ctx, k))
            .find(|r| r.value() == *u)
    }
}

/// Least α ≥ 1 with l1^α = l2, i.e. the least solution of k1·α ≡ k2 (mod L).
pub fn power_relation(l1: &RootOfUnity, l2: &RootOfUnity) -> Option<u32> {
    if l1.ctx.level() != l2.ctx.level() {
        return None;
    }
    let l = l1.ctx.level() as u64;
    (1..=l as u32).find(|&a| (l1.exponent as u64 * a as u64) % l == l2.exponent as u64 % l)
}
