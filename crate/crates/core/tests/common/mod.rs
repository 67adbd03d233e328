#![allow(dead_code)]

use std::sync::Arc;

pub mod props;

use hidden_orbits::exactnum::{CycloContext, CycloNum};
use hidden_orbits::jet::{Exp, GermMap, Jet2};
use proptest::prelude::*;

pub fn ctx(level: u32) -> Arc<CycloContext> {
    CycloContext::new(level).unwrap()
}

/// c·ζ^k.
pub fn num(ctx: &Arc<CycloContext>, c: i64, k: i64) -> CycloNum {
    CycloNum::zeta_pow(ctx, k)
        .mul(&CycloNum::from_int(ctx, c))
        .unwrap()
}

pub fn int(ctx: &Arc<CycloContext>, c: i64) -> CycloNum {
    CycloNum::from_int(ctx, c)
}

pub fn jet(ctx: &Arc<CycloContext>, d: u32, terms: &[(Exp, CycloNum)]) -> Jet2 {
    Jet2::from_terms(ctx, d, terms.iter().cloned()).unwrap()
}

pub fn germ(
    ctx: &Arc<CycloContext>,
    d: u32,
    f1: &[(Exp, CycloNum)],
    f2: &[(Exp, CycloNum)],
) -> GermMap {
    GermMap::from_terms(ctx, d, f1.to_vec(), f2.to_vec()).unwrap()
}

pub fn germ_int(
    ctx: &Arc<CycloContext>,
    d: u32,
    f1: &[(u32, u32, i64)],
    f2: &[(u32, u32, i64)],
) -> GermMap {
    let conv = |v: &[(u32, u32, i64)]| {
        v.iter()
            .map(|&(a, b, c)| ((a, b), int(ctx, c)))
            .collect::<Vec<_>>()
    };
    germ(ctx, d, &conv(f1), &conv(f2))
}

/// A random term: exponent, integer coefficient, power of ζ.
pub type RawTerm = (Exp, i64, i64);

pub fn exponent(min_deg: u32, max_deg: u32) -> impl Strategy<Value = Exp> {
    (min_deg..=max_deg).prop_flat_map(|d| (0..=d).prop_map(move |i| (i, d - i)))
}

pub fn raw_terms(
    min_deg: u32,
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec(
        (
            exponent(min_deg, max_deg),
            prop_oneof![-3i64..=-1, 1i64..=3],
            0i64..12,
        ),
        0..=max_terms,
    )
}

pub fn nonempty_terms(
    min_deg: u32,
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec(
        (
            exponent(min_deg, max_deg),
            prop_oneof![-3i64..=-1, 1i64..=3],
            0i64..12,
        ),
        1..=max_terms,
    )
}

pub fn build(ctx: &Arc<CycloContext>, raw: &[RawTerm]) -> Vec<(Exp, CycloNum)> {
    raw.iter().map(|&(e, c, k)| (e, num(ctx, c, k))).collect()
}

pub fn jet_from(ctx: &Arc<CycloContext>, d: u32, raw: &[RawTerm]) -> Jet2 {
    jet(ctx, d, &build(ctx, raw))
}

/// Germ with the given eigenvalue exponents, the decoupled resonant terms
/// x_i^{m_i+1} and extra random terms.
pub fn perturbed_diagonal(
    level: u32,
    k1: u32,
    k2: u32,
    d: u32,
    extra1: &[RawTerm],
    extra2: &[RawTerm],
) -> GermMap {
    let c = ctx(level);
    let ord = |k: u32| level / num_integer::gcd(level, k);
    let mut f1 = vec![
        ((1, 0), num(&c, 1, k1 as i64)),
        ((ord(k1) + 1, 0), int(&c, 1)),
    ];
    let mut f2 = vec![
        ((0, 1), num(&c, 1, k2 as i64)),
        ((0, ord(k2) + 1), int(&c, 1)),
    ];
    f1.extend(build(&c, extra1));
    f2.extend(build(&c, extra2));
    germ(&c, d, &f1, &f2)
}

/// Eigenvalue exponent pairs over levels up to 6.
pub fn diagonal_spec() -> impl Strategy<Value = (u32, u32, u32)> {
    (1u32..=6).prop_flat_map(|l| (Just(l), 0..l, 0..l))
}

/// Isolation and truncation-budget failures are outside the hypothesis class
/// of the identities under test.
pub fn out_of_class(e: &hidden_orbits::Error) -> bool {
    use hidden_orbits::Error::*;
    matches!(
        e,
        NonIsolated { .. }
            | Untrusted { .. }
            | NotStabilized { .. }
            | ZeroComponent { .. }
            | TruncationBudget { .. }
    )
}
