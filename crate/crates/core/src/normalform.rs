//! Poincaré–Dulac normal forms for germs with diagonal linear part.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Coeff, CycloNum};
use crate::jet::{Exp, GermMap, Jet2};

/// The relation λ_j = λ1^{i1} λ2^{i2} for one monomial of one component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResonanceRelation {
    /// Component index, 1 or 2.
    pub j: usize,
    pub exponents: (u32, u32),
    pub holds: bool,
}

/// Transform H (tangent to the identity) with g = H^{-1} ∘ f ∘ H resonant through degree r.
#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub transform: GermMap,
    pub normalized: GermMap,
    pub degree: u32,
}

impl NormalFormResult {
    /// Surviving monomials of degree 2..=r in the normalized germ.
    pub fn resonant_support(&self) -> Vec<ResonanceRelation> {
        let (l1, l2) =
            diagonal(&self.normalized).expect("normal forms keep a diagonal linear part");
        let mut out = Vec::new();
        for (j, comp) in self.normalized.components().iter().enumerate() {
            for (e, _) in comp.terms() {
                let d = e.0 + e.1;
                if (2..=self.degree).contains(&d) {
                    out.push(ResonanceRelation {
                        j: j + 1,
                        exponents: e,
                        holds: is_resonant(j + 1, e.0, e.1, &l1, &l2),
                    });
                }
            }
        }
        out
    }
}

fn monomial_value(l1: &CycloNum, l2: &CycloNum, i1: u32, i2: u32) -> CycloNum {
    l1.pow(i1 as u64)
        .mul(&l2.pow(i2 as u64))
        .expect("eigenvalues share a context")
}

/// λ_j = λ1^{i1} λ2^{i2}, decided exactly; `j` is 1 or 2.
pub fn is_resonant(j: usize, i1: u32, i2: u32, l1: &CycloNum, l2: &CycloNum) -> bool {
    let target = if j == 1 { l1 } else { l2 };
    monomial_value(l1, l2, i1, i2) == *target
}

fn diagonal(f: &GermMap) -> Result<(CycloNum, CycloNum)> {
    let a = f.linear_part();
    if !a.is_diagonal() {
        return Err(Error::NonDiagonal);
    }
    if a.a11.is_zero() || a.a22.is_zero() {
        return Err(Error::SingularLinearPart);
    }
    Ok((a.a11, a.a22))
}

/// Remove every non-resonant coefficient of degree 2..=r, one degree at a time.
pub fn poincare_dulac(f: &GermMap, r: u32) -> Result<NormalFormResult> {
    let (l1, l2) = diagonal(f)?;
    if r > f.truncation() {
        return Err(Error::InvalidParams(format!(
            "degree {r} exceeds truncation {}",
            f.truncation()
        )));
    }
    let ctx = f.context().clone();
    let d = f.truncation();
    let lambdas = [&l1, &l2];
    let mut g = f.clone();
    let mut h_total = GermMap::identity(&ctx, d);
    for s in 2..=r {
        let mut shear: [BTreeMap<Exp, Coeff>; 2] = [BTreeMap::new(), BTreeMap::new()];
        let mut any = false;
        for (j, comp) in g.components().iter().enumerate() {
            for (e, a) in comp.homogeneous_part(s).terms() {
                if is_resonant(j + 1, e.0, e.1, &l1, &l2) {
                    continue;
                }
                let divisor = monomial_value(&l1, &l2, e.0, e.1).sub(lambdas[j])?;
                debug_assert!(!divisor.is_zero());
                shear[j].insert(e, a.div(&divisor)?.val);
                any = true;
            }
        }
        if !any {
            continue;
        }
        let [s1, s2] = shear;
        let mut c1 = Jet2::from_raw(&ctx, d, s1);
        let mut c2 = Jet2::from_raw(&ctx, d, s2);
        c1 = c1.add(&Jet2::var(&ctx, d, 0))?;
        c2 = c2.add(&Jet2::var(&ctx, d, 1))?;
        let h_s = GermMap::new(c1, c2)?;
        g = g.conjugate(&h_s)?;
        h_total = h_total.compose(&h_s)?;
    }
    Ok(NormalFormResult {
        transform: h_total,
        normalized: g,
        degree: r,
    })
}

/// Every coefficient of g^k in degrees 2..=r obeys the resonance relation of g's eigenvalues.
pub fn check_iterate_resonance(g: &GermMap, k: u32, r: u32) -> Result<bool> {
    let (l1, l2) = diagonal(g)?;
    let gk = g.iterate(k)?;
    for (j, comp) in gk.components().iter().enumerate() {
        for (e, _) in comp.terms() {
            let deg = e.0 + e.1;
            if (2..=r).contains(&deg) && !is_resonant(j + 1, e.0, e.1, &l1, &l2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
