use std::sync::Arc;

use num_integer::Integer;

use super::{classify_linear, CaseTag, LinearSpec};
use crate::error::{Error, Result};
use crate::exactnum::{CycloContext, CycloNum, RootOfUnity};
use crate::jet::{Exp, GermMap};

type Terms = Vec<(Exp, CycloNum)>;

/// Coefficients (a11, a12; a21, a22) used when none are given.
pub const C8_DEFAULT: [[i64; 2]; 2] = [[1, 2], [1, 1]];

fn truncation_for(f1: &Terms, f2: &Terms) -> u32 {
    f1.iter()
        .chain(f2)
        .map(|((a, b), _)| a + b)
        .max()
        .unwrap_or(1)
        .max(16)
}

fn build(ctx: &Arc<CycloContext>, f1: Terms, f2: Terms) -> Result<GermMap> {
    let d = truncation_for(&f1, &f2);
    GermMap::from_terms(ctx, d, f1, f2)
}

/// Build in sorted coordinates, then exchange x1 ↔ x2 if the linear part lists the
/// larger order first.
fn build_for(spec: &LinearSpec, f1: Terms, f2: Terms) -> Result<GermMap> {
    let ctx = spec.context()?;
    if !spec.swapped() {
        return build(&ctx, f1, f2);
    }
    let flip = |t: Terms| {
        t.into_iter()
            .map(|((a, b), c)| ((b, a), c))
            .collect::<Terms>()
    };
    build(&ctx, flip(f2), flip(f1))
}

fn one(ctx: &Arc<CycloContext>) -> CycloNum {
    CycloNum::one(ctx)
}

fn check_case(spec: &LinearSpec, period: u32, tag: CaseTag) -> Result<()> {
    let v = classify_linear(spec, period)?;
    if v.case != Some(tag) {
        let got = v
            .case
            .map_or("no_period_M".to_string(), |c| c.name().to_string());
        return Err(Error::InvalidParams(format!(
            "{spec} with M={period} is case {got}, not {}",
            tag.name()
        )));
    }
    Ok(())
}

/// Germ realizing `tag` for (spec, M): the counterexample families for the
/// primed tags and [`positive_witness`] for b1–b4.
pub fn witness_germ(tag: CaseTag, spec: &LinearSpec, period: u32) -> Result<GermMap> {
    if tag.is_positive() {
        return positive_witness(tag, spec, period);
    }
    check_case(spec, period, tag)?;
    let s = spec.sorted();
    let ctx = s.context()?;
    let (l1, l2) = s.eigenvalues(&ctx);
    let (m1, m2) = s.orders();
    let m = period;
    match tag {
        CaseTag::B1p => build(
            &ctx,
            vec![((1, 0), l1.clone()), ((0, m + 1), one(&ctx))],
            vec![((1, 0), one(&ctx)), ((0, 1), l1)],
        ),
        CaseTag::B2p => {
            let (alpha, beta) = exponents(&s)?;
            build_for(
                spec,
                vec![((1, 0), l1), ((0, beta), one(&ctx))],
                vec![((0, 1), l2), ((alpha, 0), one(&ctx))],
            )
        }
        CaseTag::B3p => {
            let d = m / m1;
            build_for(
                spec,
                vec![((1, 0), l1), ((m1 + 1, 0), one(&ctx)), ((0, d), one(&ctx))],
                vec![((0, 1), l2), ((m1, 1), one(&ctx))],
            )
        }
        CaseTag::B4p => c8_germ(spec, C8_DEFAULT),
        CaseTag::Lone => {
            if m1 == m {
                build_for(
                    spec,
                    vec![((1, 0), l1), ((m + 1, 0), one(&ctx))],
                    vec![((0, 1), l2)],
                )
            } else {
                debug_assert_eq!(m2, m);
                build_for(
                    spec,
                    vec![((1, 0), l1)],
                    vec![((0, 1), l2), ((0, m + 1), one(&ctx))],
                )
            }
        }
        _ => unreachable!("positive tags handled above"),
    }
}

/// (α, β) with λ1^α = λ2 and λ2^β = λ1, in sorted coordinates.
fn exponents(s: &LinearSpec) -> Result<(u32, u32)> {
    let ctx = s.context()?;
    let r1 = RootOfUnity::new(&ctx, s.k1 as i64);
    let r2 = RootOfUnity::new(&ctx, s.k2 as i64);
    match (
        crate::exactnum::power_relation(&r1, &r2),
        crate::exactnum::power_relation(&r2, &r1),
    ) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::InvalidParams(format!(
            "{s}: eigenvalues are not powers of each other"
        ))),
    }
}

/// Resonant germ with the requested linear part for a guaranteed case:
/// (λ1x1 + x1^{m1+1}, λ2x2 + x2^{m2+1}), or (λ1x1 + x2^β, λ2x2 + x1^α) for b2.
pub fn positive_witness(tag: CaseTag, spec: &LinearSpec, period: u32) -> Result<GermMap> {
    if !tag.is_positive() {
        return Err(Error::InvalidParams(format!(
            "{} is not a positive case",
            tag.name()
        )));
    }
    check_case(spec, period, tag)?;
    let s = spec.sorted();
    let ctx = s.context()?;
    let (l1, l2) = s.eigenvalues(&ctx);
    if tag == CaseTag::B2 {
        let (alpha, beta) = exponents(&s)?;
        return build_for(
            spec,
            vec![((1, 0), l1), ((0, beta), one(&ctx))],
            vec![((0, 1), l2), ((alpha, 0), one(&ctx))],
        );
    }
    decoupled(spec)
}

/// (λ1x1 + x1^{m1+1}, λ2x2 + x2^{m2+1}) in the unsorted coordinates.
pub(crate) fn decoupled(spec: &LinearSpec) -> Result<GermMap> {
    let ctx = spec.context()?;
    let (l1, l2) = spec.eigenvalues(&ctx);
    let (m1, m2) = spec.orders();
    build(
        &ctx,
        vec![((1, 0), l1), ((m1 + 1, 0), one(&ctx))],
        vec![((0, 1), l2), ((0, m2 + 1), one(&ctx))],
    )
}

/// (λ1x1 + x1(a11x1^{m1} + a12x2^{m2}), λ2x2 + x2(a21x1^{m1} + a22x2^{m2})) for
/// relatively prime orders; needs a11, a22 and a11a22 − a12a21 nonzero.
pub fn c8_germ(spec: &LinearSpec, a: [[i64; 2]; 2]) -> Result<GermMap> {
    if !spec.diagonalizable {
        return Err(Error::InvalidParams(
            "c8 needs a diagonal linear part".into(),
        ));
    }
    let s = spec.sorted();
    let (m1, m2) = s.orders();
    if m1.gcd(&m2) != 1 || m1 < 2 {
        return Err(Error::InvalidParams(format!(
            "c8 needs relatively prime orders above 1, got ({m1},{m2})"
        )));
    }
    if a[0][0] == 0 || a[1][1] == 0 || a[0][0] * a[1][1] == a[0][1] * a[1][0] {
        return Err(Error::InvalidParams(
            "c8 needs a11 != 0, a22 != 0 and a nonzero determinant".into(),
        ));
    }
    let ctx = s.context()?;
    let (l1, l2) = s.eigenvalues(&ctx);
    let c = |v: i64| CycloNum::from_int(&ctx, v);
    let mut f1 = vec![((1, 0), l1), ((m1 + 1, 0), c(a[0][0]))];
    let mut f2 = vec![((0, 1), l2), ((0, m2 + 1), c(a[1][1]))];
    if a[0][1] != 0 {
        f1.push(((1, m2), c(a[0][1])));
    }
    if a[1][0] != 0 {
        f2.push(((m1, 1), c(a[1][0])));
    }
    build_for(spec, f1, f2)
}

/// The counterexample witness for a not_guaranteed verdict.
pub fn counterexample_germ(spec: &LinearSpec, period: u32) -> Result<GermMap> {
    let v = classify_linear(spec, period)?;
    match v.case {
        Some(tag) if !tag.is_positive() => witness_germ(tag, spec, period),
        _ => Err(Error::InvalidParams(format!(
            "{spec} with M={period} has no counterexample family"
        ))),
    }
}

/// (−x + x^{2k+1} + xy³, ζ₃y + x²y + y^{3k+1}) over Q(ζ₆).
pub fn e2_germ(k: u32) -> Result<GermMap> {
    if k <= 1 {
        return Err(Error::InvalidParams(format!("e2 needs k > 1, got {k}")));
    }
    let ctx = CycloContext::new(6)?;
    let c = |v: i64| CycloNum::from_int(&ctx, v);
    build(
        &ctx,
        vec![((1, 0), c(-1)), ((2 * k + 1, 0), c(1)), ((1, 3), c(1))],
        vec![
            ((0, 1), CycloNum::zeta_pow(&ctx, 2)),
            ((2, 1), c(1)),
            ((0, 3 * k + 1), c(1)),
        ],
    )
}

/// Named germs: `e2` with args `[k]`, `c8` with args `[m1, m2]` or
/// `[m1, m2, a11, a12, a21, a22]`.
pub fn builtin_example(name: &str, args: &[i64]) -> Result<GermMap> {
    match name {
        "e2" => match args {
            [k] if *k > 1 && *k <= 1000 => e2_germ(*k as u32),
            _ => Err(Error::InvalidParams(format!(
                "e2 takes one argument k > 1, got {args:?}"
            ))),
        },
        "c8" => {
            let (m1, m2, a) = match args {
                [m1, m2] => (*m1, *m2, C8_DEFAULT),
                [m1, m2, a11, a12, a21, a22] => (*m1, *m2, [[*a11, *a12], [*a21, *a22]]),
                _ => {
                    return Err(Error::InvalidParams(format!(
                        "c8 takes [m1, m2] or [m1, m2, a11, a12, a21, a22], got {args:?}"
                    )))
                }
            };
            if m1 < 2 || m2 < 2 || m1 * m2 > crate::exactnum::MAX_LEVEL as i64 {
                return Err(Error::InvalidParams(format!(
                    "c8 orders out of range: ({m1},{m2})"
                )));
            }
            let (m1, m2) = (m1 as u32, m2 as u32);
            let level = m1 * m2;
            let spec = LinearSpec::diagonal(level, m2 as i64, m1 as i64)?;
            c8_germ(&spec, a)
        }
        _ => Err(Error::InvalidParams(format!(
            "unknown example {name:?}; expected e2 or c8"
        ))),
    }
}
