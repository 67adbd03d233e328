//! Truncated bivariate polynomials over Q(ζ_L) and germ maps of (C², 0).
//!
//! A [`Jet2`] keeps every coefficient of total degree at most its truncation
//! degree `D`; products and compositions drop anything above `D`. Because all
//! germ maps have zero constant term, the coefficients that survive are exact.

mod io;
mod matrix;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactnum::{Coeff, CycloContext, CycloNum};

pub use matrix::Matrix2;

/// Largest truncation degree any jet may carry.
pub const MAX_TRUNCATION: u32 = 1024;

/// Exponent pair `(i1, i2)` of the monomial x1^i1 x2^i2.
pub type Exp = (u32, u32);

fn degree(e: Exp) -> u32 {
    e.0 + e.1
}

/// A bivariate polynomial truncated at total degree `D`.
#[derive(Clone)]
pub struct Jet2 {
    ctx: Arc<CycloContext>,
    trunc: u32,
    terms: BTreeMap<Exp, Coeff>,
}

impl PartialEq for Jet2 {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.level() == other.ctx.level()
            && self.trunc == other.trunc
            && self.terms == other.terms
    }
}

impl Eq for Jet2 {}

impl Jet2 {
    pub fn zero(ctx: &Arc<CycloContext>, trunc: u32) -> Jet2 {
        Jet2 {
            ctx: Arc::clone(ctx),
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// The coordinate function x1 (`idx = 0`) or x2 (`idx = 1`).
    pub fn var(ctx: &Arc<CycloContext>, trunc: u32, idx: usize) -> Jet2 {
        let e = if idx == 0 { (1, 0) } else { (0, 1) };
        let mut j = Jet2::zero(ctx, trunc);
        if trunc >= 1 {
            j.terms.insert(e, ctx.one());
        }
        j
    }

    pub fn constant(ctx: &Arc<CycloContext>, trunc: u32, c: &CycloNum) -> Result<Jet2> {
        Jet2::monomial(ctx, trunc, (0, 0), c)
    }

    pub fn monomial(ctx: &Arc<CycloContext>, trunc: u32, e: Exp, c: &CycloNum) -> Result<Jet2> {
        Jet2::from_terms(ctx, trunc, [(e, c.clone())])
    }

    /// Sum of the given terms; repeated exponents add up, terms above `trunc` are dropped.
    pub fn from_terms<I>(ctx: &Arc<CycloContext>, trunc: u32, terms: I) -> Result<Jet2>
    where
        I: IntoIterator<Item = (Exp, CycloNum)>,
    {
        let mut j = Jet2::zero(ctx, trunc);
        for (e, c) in terms {
            if c.level() != ctx.level() {
                return Err(Error::ContextMismatch {
                    left: ctx.level(),
                    right: c.level(),
                });
            }
            if degree(e) <= trunc {
                j.add_term(e, &c.val);
            }
        }
        Ok(j)
    }

    pub(crate) fn from_raw(
        ctx: &Arc<CycloContext>,
        trunc: u32,
        terms: BTreeMap<Exp, Coeff>,
    ) -> Jet2 {
        debug_assert!(terms
            .iter()
            .all(|(e, c)| degree(*e) <= trunc && !c.is_zero()));
        Jet2 {
            ctx: Arc::clone(ctx),
            trunc,
            terms,
        }
    }

    pub(crate) fn add_term(&mut self, e: Exp, c: &Coeff) {
        if c.is_zero() || degree(e) > self.trunc {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                self.ctx.add_assign(v, c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        &self.ctx
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, e: Exp) -> CycloNum {
        match self.terms.get(&e) {
            Some(c) => CycloNum::from_coeff(&self.ctx, c.clone()),
            None => CycloNum::zero(&self.ctx),
        }
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<Exp, Coeff> {
        &self.terms
    }

    /// Nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exp, CycloNum)> + '_ {
        self.terms
            .iter()
            .map(|(e, c)| (*e, CycloNum::from_coeff(&self.ctx, c.clone())))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest degree of a stored term.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&e| degree(e)).max()
    }

    /// Lowest degree of a stored term.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&e| degree(e)).min()
    }

    pub fn homogeneous_part(&self, d: u32) -> Jet2 {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| degree(**e) == d)
            .map(|(e, c)| (*e, c.clone()));
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc: self.trunc,
            terms: terms.collect(),
        }
    }

    /// Same polynomial under a new truncation degree. Raising it treats the jet as
    /// an exact polynomial representative.
    pub fn with_truncation(&self, trunc: u32) -> Jet2 {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| degree(**e) <= trunc)
            .map(|(e, c)| (*e, c.clone()));
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc,
            terms: terms.collect(),
        }
    }

    fn check(&self, other: &Jet2) -> Result<()> {
        if self.ctx.level() != other.ctx.level() {
            return Err(Error::ContextMismatch {
                left: self.ctx.level(),
                right: other.ctx.level(),
            });
        }
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet2) -> Result<Jet2> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet2) -> Result<Jet2> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet2 {
        let terms = self.terms.iter().map(|(e, c)| (*e, c.neg())).collect();
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc: self.trunc,
            terms,
        }
    }

    pub fn scale(&self, c: &CycloNum) -> Result<Jet2> {
        if c.level() != self.ctx.level() {
            return Err(Error::ContextMismatch {
                left: self.ctx.level(),
                right: c.level(),
            });
        }
        Ok(self.scale_raw(&c.val))
    }

    pub(crate) fn scale_raw(&self, c: &Coeff) -> Jet2 {
        if c.is_zero() {
            return Jet2::zero(&self.ctx, self.trunc);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (*e, self.ctx.mul(v, c)))
            .collect();
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc: self.trunc,
            terms,
        }
    }

    /// Multiply by the monomial x1^e.0 x2^e.1 (truncating).
    pub fn shift(&self, e: Exp) -> Jet2 {
        let terms = self
            .terms
            .iter()
            .map(|(f, c)| ((f.0 + e.0, f.1 + e.1), c))
            .filter(|(f, _)| degree(*f) <= self.trunc)
            .map(|(f, c)| (f, c.clone()))
            .collect();
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc: self.trunc,
            terms,
        }
    }

    pub fn mul(&self, other: &Jet2) -> Result<Jet2> {
        self.check(other)?;
        Ok(self.mul_raw(other))
    }

    pub(crate) fn mul_raw(&self, other: &Jet2) -> Jet2 {
        let d = self.trunc;
        if self.terms.is_empty() || other.terms.is_empty() {
            return Jet2::zero(&self.ctx, d);
        }
        let (a, b) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut by_degree: Vec<Vec<(Exp, &Coeff)>> = vec![Vec::new(); d as usize + 1];
        for (e, c) in &b.terms {
            by_degree[degree(*e) as usize].push((*e, c));
        }
        let mut acc: HashMap<Exp, Coeff> = HashMap::new();
        for (ea, ca) in &a.terms {
            let room = d - degree(*ea);
            for group in by_degree.iter().take(room as usize + 1) {
                for (eb, cb) in group {
                    let e = (ea.0 + eb.0, ea.1 + eb.1);
                    let p = self.ctx.mul(ca, cb);
                    match acc.get_mut(&e) {
                        Some(v) => self.ctx.add_assign(v, &p),
                        None => {
                            acc.insert(e, p);
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Jet2 {
            ctx: Arc::clone(&self.ctx),
            trunc: d,
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> Jet2 {
        let mut acc = Jet2::one_like(self);
        for _ in 0..e {
            acc = acc.mul_raw(self);
        }
        acc
    }

    fn one_like(j: &Jet2) -> Jet2 {
        let mut out = Jet2::zero(&j.ctx, j.trunc);
        out.terms.insert((0, 0), j.ctx.one());
        out
    }

    /// Substitute (p1, p2) for (x1, x2). Both substitutes must have zero constant term.
    pub fn substitute(&self, p1: &Jet2, p2: &Jet2) -> Result<Jet2> {
        p1.check(p2)?;
        self.check(p1)?;
        if p1.terms.contains_key(&(0, 0)) || p2.terms.contains_key(&(0, 0)) {
            return Err(Error::NonzeroConstantTerm);
        }
        let max1 = self.terms.keys().map(|e| e.0).max().unwrap_or(0);
        let max2 = self.terms.keys().map(|e| e.1).max().unwrap_or(0);
        let pow1 = power_table(p1, max1);
        let pow2 = power_table(p2, max2);
        // group by the x1 exponent: Σ_i p1^i · (Σ_j c_ij p2^j)
        let mut grouped: BTreeMap<u32, Jet2> = BTreeMap::new();
        for (e, c) in &self.terms {
            let inner = grouped
                .entry(e.0)
                .or_insert_with(|| Jet2::zero(&self.ctx, self.trunc));
            let room = self.trunc - e.0;
            for (f, v) in &pow2[e.1 as usize].terms {
                if degree(*f) <= room {
                    inner.add_term(*f, &self.ctx.mul(c, v));
                }
            }
        }
        let mut out = Jet2::zero(&self.ctx, self.trunc);
        for (i, s) in grouped {
            let prod = if i == 0 {
                s
            } else {
                pow1[i as usize].mul_raw(&s)
            };
            for (e, c) in &prod.terms {
                out.add_term(*e, c);
            }
        }
        Ok(out)
    }

    fn display_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut sorted: Vec<(&Exp, &Coeff)> = self.terms.iter().collect();
        sorted.sort_by_key(|(e, _)| (degree(**e), std::cmp::Reverse(e.0)));
        for (n, (e, c)) in sorted.into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let coeff = self.ctx.display(c);
            let mono = monomial_string(*e);
            match (coeff.as_str(), mono.is_empty()) {
                (_, true) => write!(f, "({coeff})")?,
                ("1", false) => f.write_str(&mono)?,
                _ => write!(f, "({coeff})*{mono}")?,
            }
        }
        Ok(())
    }
}

fn monomial_string(e: Exp) -> String {
    let part = |name: &str, k: u32| match k {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{k}")),
    };
    [part("x1", e.0), part("x2", e.1)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join("*")
}

fn power_table(p: &Jet2, max: u32) -> Vec<Jet2> {
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(Jet2::one_like(p));
    for k in 1..=max {
        let next = if k > p.trunc {
            Jet2::zero(&p.ctx, p.trunc)
        } else {
            table[k as usize - 1].mul_raw(p)
        };
        table.push(next);
    }
    table
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2[L={}, D={}](", self.ctx.level(), self.trunc)?;
        self.display_with(f)?;
        f.write_str(")")
    }
}

impl fmt::Display for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(f)
    }
}

/// A germ (f1, f2) of a map (C², 0) → (C², 0), truncated at a shared degree.
#[derive(Clone, PartialEq, Eq)]
pub struct GermMap {
    comps: [Jet2; 2],
}

impl GermMap {
    pub fn new(f1: Jet2, f2: Jet2) -> Result<GermMap> {
        f1.check(&f2)?;
        if f1.terms.contains_key(&(0, 0)) || f2.terms.contains_key(&(0, 0)) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(GermMap { comps: [f1, f2] })
    }

    pub fn identity(ctx: &Arc<CycloContext>, trunc: u32) -> GermMap {
        GermMap {
            comps: [Jet2::var(ctx, trunc, 0), Jet2::var(ctx, trunc, 1)],
        }
    }

    pub fn linear(ctx: &Arc<CycloContext>, trunc: u32, a: &Matrix2) -> Result<GermMap> {
        a.check_context(ctx)?;
        let row = |c1: &CycloNum, c2: &CycloNum| {
            Jet2::from_terms(ctx, trunc, [((1, 0), c1.clone()), ((0, 1), c2.clone())])
        };
        GermMap::new(row(&a.a11, &a.a12)?, row(&a.a21, &a.a22)?)
    }

    /// Build a germ from per-component term lists.
    pub fn from_terms(
        ctx: &Arc<CycloContext>,
        trunc: u32,
        first: Vec<(Exp, CycloNum)>,
        second: Vec<(Exp, CycloNum)>,
    ) -> Result<GermMap> {
        GermMap::new(
            Jet2::from_terms(ctx, trunc, first)?,
            Jet2::from_terms(ctx, trunc, second)?,
        )
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        &self.comps[0].ctx
    }

    pub fn truncation(&self) -> u32 {
        self.comps[0].trunc
    }

    pub fn component(&self, i: usize) -> &Jet2 {
        &self.comps[i]
    }

    pub fn components(&self) -> &[Jet2; 2] {
        &self.comps
    }

    pub fn with_truncation(&self, trunc: u32) -> GermMap {
        GermMap {
            comps: [
                self.comps[0].with_truncation(trunc),
                self.comps[1].with_truncation(trunc),
            ],
        }
    }

    /// Highest degree carried by either component.
    pub fn degree(&self) -> u32 {
        self.comps
            .iter()
            .filter_map(Jet2::degree)
            .max()
            .unwrap_or(0)
    }

    /// Df(0).
    pub fn linear_part(&self) -> Matrix2 {
        let [f1, f2] = &self.comps;
        Matrix2::new(
            f1.coeff((1, 0)),
            f1.coeff((0, 1)),
            f2.coeff((1, 0)),
            f2.coeff((0, 1)),
        )
    }

    fn check(&self, other: &GermMap) -> Result<()> {
        self.comps[0].check(&other.comps[0])
    }

    pub fn add(&self, other: &GermMap) -> Result<GermMap> {
        self.check(other)?;
        Ok(GermMap {
            comps: [
                self.comps[0].add(&other.comps[0])?,
                self.comps[1].add(&other.comps[1])?,
            ],
        })
    }

    pub fn sub(&self, other: &GermMap) -> Result<GermMap> {
        self.check(other)?;
        Ok(GermMap {
            comps: [
                self.comps[0].sub(&other.comps[0])?,
                self.comps[1].sub(&other.comps[1])?,
            ],
        })
    }

    /// The displacement id − f, whose zeros are the fixed points of f.
    pub fn displacement(&self) -> GermMap {
        GermMap::identity(self.context(), self.truncation())
            .sub(self)
            .expect("identity shares context and truncation")
    }

    /// outer ∘ inner, exact through the shared truncation degree.
    pub fn compose(&self, inner: &GermMap) -> Result<GermMap> {
        self.check(inner)?;
        let [p1, p2] = &inner.comps;
        Ok(GermMap {
            comps: [
                self.comps[0].substitute(p1, p2)?,
                self.comps[1].substitute(p1, p2)?,
            ],
        })
    }

    /// f^m = f ∘ f^{m−1}.
    pub fn iterate(&self, m: u32) -> Result<GermMap> {
        if m == 0 {
            return Err(Error::InvalidParams(
                "iteration count must be positive".into(),
            ));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// H^{-1}, built one degree at a time from G ↦ A^{-1}(y − N(G)).
    pub fn invert(&self) -> Result<GermMap> {
        let ctx = self.context().clone();
        let d = self.truncation();
        let a = self.linear_part();
        let a_inv = a.inverse()?;
        let linear = GermMap::linear(&ctx, d, &a)?;
        let nonlinear = self.sub(&linear)?;
        let inv_lin = GermMap::linear(&ctx, d, &a_inv)?;
        let mut g = inv_lin.with_truncation(1);
        for k in 2..=d {
            let n_k = nonlinear.with_truncation(k);
            let corr = n_k.compose(&g.with_truncation(k))?;
            let y = GermMap::identity(&ctx, k).sub(&corr)?;
            g = inv_lin.with_truncation(k).compose(&y)?;
        }
        Ok(g.with_truncation(d))
    }

    /// H^{-1} ∘ f ∘ H.
    pub fn conjugate(&self, h: &GermMap) -> Result<GermMap> {
        self.check(h)?;
        h.invert()?.compose(&self.compose(h)?)
    }

    /// Precompose with (y1^a, y2^b). The result is exact through degree
    /// min(a, b)·(D + 1) − 1, which becomes its truncation.
    pub fn substitute_powers(&self, a: u32, b: u32) -> Result<GermMap> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidParams(
                "substitution exponents must be positive".into(),
            ));
        }
        let needed = a.min(b) as u64 * (self.truncation() as u64 + 1) - 1;
        if needed > MAX_TRUNCATION as u64 {
            return Err(Error::TruncationBudget {
                needed: needed.min(u32::MAX as u64) as u32,
                cap: MAX_TRUNCATION,
            });
        }
        let trunc = needed as u32;
        let map = |j: &Jet2| {
            let terms = j
                .terms
                .iter()
                .map(|(e, c)| ((e.0 * a, e.1 * b), c))
                .filter(|(e, _)| degree(*e) <= trunc)
                .map(|(e, c)| (e, c.clone()))
                .collect();
            Jet2::from_raw(&j.ctx, trunc, terms)
        };
        Ok(GermMap {
            comps: [map(&self.comps[0]), map(&self.comps[1])],
        })
    }
}

impl fmt::Debug for GermMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GermMap[L={}, D={}]({}; {})",
            self.context().level(),
            self.truncation(),
            self.comps[0],
            self.comps[1]
        )
    }
}

impl fmt::Display for GermMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.comps[0], self.comps[1])
    }
}
