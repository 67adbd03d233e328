//! Builders shared by unit tests.

use std::sync::Arc;

use proptest::prelude::*;

use crate::exactnum::{CycloContext, CycloNum, Rational};
use crate::jet::{Exp, GermMap, Jet2};

pub fn ctx(level: u32) -> Arc<CycloContext> {
    CycloContext::new(level).unwrap()
}

/// c·ζ^k.
pub fn zc(ctx: &Arc<CycloContext>, c: i64, k: i64) -> CycloNum {
    CycloNum::zeta_pow(ctx, k)
        .mul(&CycloNum::from_int(ctx, c))
        .unwrap()
}

pub fn int(ctx: &Arc<CycloContext>, c: i64) -> CycloNum {
    CycloNum::from_int(ctx, c)
}

pub fn rat(ctx: &Arc<CycloContext>, p: i64, q: i64) -> CycloNum {
    CycloNum::from_rational(ctx, &Rational::new(p.into(), q.into()))
}

pub fn jet(ctx: &Arc<CycloContext>, trunc: u32, terms: &[(Exp, CycloNum)]) -> Jet2 {
    Jet2::from_terms(ctx, trunc, terms.iter().cloned()).unwrap()
}

/// Germ with integer coefficients.
pub fn germ_int(
    ctx: &Arc<CycloContext>,
    trunc: u32,
    f1: &[(u32, u32, i64)],
    f2: &[(u32, u32, i64)],
) -> GermMap {
    let conv = |v: &[(u32, u32, i64)]| v.iter().map(|&(a, b, c)| ((a, b), int(ctx, c))).collect();
    GermMap::from_terms(ctx, trunc, conv(f1), conv(f2)).unwrap()
}

pub fn germ(
    ctx: &Arc<CycloContext>,
    trunc: u32,
    f1: &[(Exp, CycloNum)],
    f2: &[(Exp, CycloNum)],
) -> GermMap {
    GermMap::from_terms(ctx, trunc, f1.to_vec(), f2.to_vec()).unwrap()
}

/// Small random element of Q(ζ_L) given as (c, k) pairs meaning Σ c·ζ^k.
pub fn small_coeff() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, 0i64..12), 1..3)
}

pub fn coeff_from(ctx: &Arc<CycloContext>, parts: &[(i64, i64)]) -> CycloNum {
    parts.iter().fold(CycloNum::zero(ctx), |acc, &(c, k)| {
        acc.add(&zc(ctx, c, k)).unwrap()
    })
}

/// Terms of degree 2..=max_deg with small coefficients.
pub fn nonlinear_terms(
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Vec<(Exp, Vec<(i64, i64)>)>> {
    prop::collection::vec(
        (2..=max_deg)
            .prop_flat_map(|d| (0..=d).prop_map(move |i| (i, d - i)))
            .prop_flat_map(|e| (Just(e), small_coeff())),
        0..=max_terms,
    )
}

pub fn build_terms(
    ctx: &Arc<CycloContext>,
    raw: &[(Exp, Vec<(i64, i64)>)],
) -> Vec<(Exp, CycloNum)> {
    raw.iter().map(|(e, c)| (*e, coeff_from(ctx, c))).collect()
}
