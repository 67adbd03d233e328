//! Cyclotomic fields Q(ζ_L) in the power basis modulo Φ_L.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Largest cyclotomic level accepted by [`cyclotomic_poly`] and [`CycloContext::new`].
pub const MAX_LEVEL: u32 = 10_000;

/// Integer coefficients (constant term first) of the `level`-th cyclotomic polynomial.
///
/// Built by exact division of X^L − 1 by Φ_d for every proper divisor d of L.
pub fn cyclotomic_poly(level: u32) -> Result<Vec<BigInt>> {
    if level == 0 {
        return Err(Error::InvalidLevel(level));
    }
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            cap: MAX_LEVEL,
        });
    }
    let divisors = divisors(level);
    let mut table: Vec<(u32, Vec<BigInt>)> = Vec::with_capacity(divisors.len());
    for &d in &divisors {
        let mut poly = vec![BigInt::zero(); d as usize + 1];
        poly[0] = -BigInt::one();
        poly[d as usize] = BigInt::one();
        for (e, phi_e) in &table {
            if d % e == 0 {
                poly = div_exact_monic(&poly, phi_e);
            }
        }
        table.push((d, poly));
    }
    Ok(table.pop().expect("level has at least one divisor").1)
}

/// Quotient of `num` by the monic `den`; the remainder is asserted to vanish.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let n = num.len() - 1;
    let m = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quo = vec![BigInt::zero(); n - m + 1];
    for k in (0..=n - m).rev() {
        let c = rem[k + m].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quo[k] = c;
    }
    debug_assert!(
        rem.iter().all(Zero::is_zero),
        "cyclotomic division is exact"
    );
    quo
}

pub(crate) fn divisors(n: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Raw field element: `num / den` with `num` in the power basis of length φ(L).
///
/// Canonical form: `den > 0` and gcd(content(num), den) = 1; zero has `den = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Coeff {
    pub(crate) num: Vec<BigInt>,
    pub(crate) den: BigInt,
}

impl Coeff {
    pub(crate) fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub(crate) fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if !n.is_zero() {
                g = g.gcd(n);
                if g.is_one() {
                    return;
                }
            }
        }
        for n in &mut self.num {
            *n /= &g;
        }
        self.den /= &g;
    }

    pub(crate) fn neg(&self) -> Coeff {
        Coeff {
            num: self.num.iter().map(|n| -n).collect(),
            den: self.den.clone(),
        }
    }

    pub(crate) fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    /// Rational value when the element lies in Q.
    pub(crate) fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }
}

/// Shared description of the field Q(ζ_L).
#[derive(Debug)]
pub struct CycloContext {
    level: u32,
    phi: usize,
    cyclo_poly: Vec<BigInt>,
    // Φ_L coefficients below the leading one, used during reduction.
    tail: Vec<i64>,
}

impl PartialEq for CycloContext {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
    }
}

impl Eq for CycloContext {}

impl CycloContext {
    pub fn new(level: u32) -> Result<Arc<CycloContext>> {
        let cyclo_poly = cyclotomic_poly(level)?;
        let phi = cyclo_poly.len() - 1;
        debug_assert_eq!(phi as u32, euler_phi(level));
        let tail = cyclo_poly[..phi]
            .iter()
            .map(|c| {
                c.to_i64()
                    .expect("cyclotomic coefficients fit in i64 below the level cap")
            })
            .collect();
        Ok(Arc::new(CycloContext {
            level,
            phi,
            cyclo_poly,
            tail,
        }))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn cyclo_poly(&self) -> &[BigInt] {
        &self.cyclo_poly
    }

    pub(crate) fn zero(&self) -> Coeff {
        Coeff {
            num: vec![BigInt::zero(); self.phi],
            den: BigInt::one(),
        }
    }

    pub(crate) fn one(&self) -> Coeff {
        self.int(1)
    }

    pub(crate) fn int(&self, v: i64) -> Coeff {
        let mut num = vec![BigInt::zero(); self.phi];
        num[0] = BigInt::from(v);
        Coeff {
            num,
            den: BigInt::one(),
        }
    }

    pub(crate) fn rational(&self, r: &Rational) -> Coeff {
        let mut num = vec![BigInt::zero(); self.phi];
        num[0] = r.numer().clone();
        let mut c = Coeff {
            num,
            den: r.denom().clone(),
        };
        if c.den.is_negative() {
            c.den = -c.den;
            c.num[0] = -c.num[0].clone();
        }
        c.normalize();
        c
    }

    pub(crate) fn coeff_from_rationals(&self, coeffs: &[Rational]) -> Coeff {
        assert!(coeffs.len() <= self.phi || self.phi == 0);
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); self.phi];
        for (slot, c) in num.iter_mut().zip(coeffs) {
            *slot = c.numer() * (&den / c.denom());
        }
        let mut out = Coeff { num, den };
        out.normalize();
        out
    }

    /// Reduce an integer polynomial of arbitrary length modulo Φ_L.
    pub(crate) fn reduce(&self, mut poly: Vec<BigInt>) -> Vec<BigInt> {
        let phi = self.phi;
        if poly.len() <= phi {
            poly.resize(phi, BigInt::zero());
            return poly;
        }
        for j in (phi..poly.len()).rev() {
            if poly[j].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[j]);
            for (i, &m) in self.tail.iter().enumerate() {
                if m != 0 {
                    poly[j - phi + i] -= &c * m;
                }
            }
        }
        poly.truncate(phi);
        poly
    }

    /// ζ_L^k reduced, for any integer k.
    pub(crate) fn zeta_pow(&self, k: i64) -> Coeff {
        let l = self.level as i64;
        let k = k.rem_euclid(l) as usize;
        let mut poly = vec![BigInt::zero(); k + 1];
        poly[k] = BigInt::one();
        Coeff {
            num: self.reduce(poly),
            den: BigInt::one(),
        }
    }

    pub(crate) fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        let mut out = if a.den == b.den {
            Coeff {
                num: a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect(),
                den: a.den.clone(),
            }
        } else {
            Coeff {
                num: a
                    .num
                    .iter()
                    .zip(&b.num)
                    .map(|(x, y)| x * &b.den + y * &a.den)
                    .collect(),
                den: &a.den * &b.den,
            }
        };
        out.normalize();
        out
    }

    pub(crate) fn add_assign(&self, a: &mut Coeff, b: &Coeff) {
        if a.den == b.den {
            for (x, y) in a.num.iter_mut().zip(&b.num) {
                *x += y;
            }
            if !a.den.is_one() {
                a.normalize();
            } else if a.is_zero() {
                a.den = BigInt::one();
            }
        } else {
            *a = self.add(a, b);
        }
    }

    pub(crate) fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.add(a, &b.neg())
    }

    pub(crate) fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let phi = self.phi;
        let mut prod = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out = Coeff {
            num: self.reduce(prod),
            den: &a.den * &b.den,
        };
        out.normalize();
        out
    }

    pub(crate) fn pow(&self, a: &Coeff, mut e: u64) -> Coeff {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplicative inverse, by solving the φ×φ multiplication system of `a`.
    pub(crate) fn inv(&self, a: &Coeff) -> Result<Coeff> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi = self.phi;
        // column i holds num(a)·X^i mod Φ_L
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(phi);
        let mut shifted = a.num.clone();
        for _ in 0..phi {
            cols.push(shifted.clone());
            let mut next = vec![BigInt::zero()];
            next.extend(shifted);
            shifted = self.reduce(next);
        }
        // augmented rows: [M | e_0]
        let mut rows: Vec<Vec<BigRational>> = (0..phi)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..phi)
                    .map(|c| BigRational::from_integer(cols[c][r].clone()))
                    .collect();
                row.push(if r == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..phi {
            let pivot = (col..phi)
                .find(|&r| !rows[r][col].is_zero())
                .expect("multiplication matrix of a nonzero field element is invertible");
            rows.swap(col, pivot);
            let inv_p = rows[col][col].recip();
            for v in rows[col].iter_mut() {
                *v *= &inv_p;
            }
            let pivot_row = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        let sol: Vec<BigRational> = rows.into_iter().map(|mut r| r.pop().unwrap()).collect();
        let inv_num = self.coeff_from_rationals(&sol);
        Ok(inv_num.scaled_by(&a.den))
    }

    pub(crate) fn div(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub(crate) fn display(&self, c: &Coeff) -> String {
        format_coeff(&c.coeffs())
    }
}

impl Coeff {
    fn scaled_by(mut self, k: &BigInt) -> Coeff {
        for n in &mut self.num {
            *n *= k;
        }
        self.normalize();
        self
    }
}

/// Render power-basis coefficients with the germ-file coefficient grammar.
pub(crate) fn format_coeff(coeffs: &[Rational]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let first = out.is_empty();
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            } else if !first {
                out.push('+');
            }
            out.push_str(&format_rational(&mag));
            continue;
        }
        let power = if i == 1 {
            "z".to_string()
        } else {
            format!("z^{i}")
        };
        if first {
            if neg {
                out.push_str(&format!("-{}*{power}", format_rational(&mag)));
            } else if mag.is_one() {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{}*{power}", format_rational(&mag)));
            }
        } else {
            out.push(if neg { '-' } else { '+' });
            if mag.is_one() {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{}*{power}", format_rational(&mag)));
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub(crate) fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact element of Q(ζ_L).
#[derive(Clone)]
pub struct CycloNum {
    ctx: Arc<CycloContext>,
    pub(crate) val: Coeff,
}

impl CycloNum {
    pub(crate) fn from_coeff(ctx: &Arc<CycloContext>, val: Coeff) -> CycloNum {
        CycloNum {
            ctx: Arc::clone(ctx),
            val,
        }
    }

    pub fn zero(ctx: &Arc<CycloContext>) -> CycloNum {
        Self::from_coeff(ctx, ctx.zero())
    }

    pub fn one(ctx: &Arc<CycloContext>) -> CycloNum {
        Self::from_coeff(ctx, ctx.one())
    }

    pub fn from_int(ctx: &Arc<CycloContext>, v: i64) -> CycloNum {
        Self::from_coeff(ctx, ctx.int(v))
    }

    pub fn from_rational(ctx: &Arc<CycloContext>, r: &Rational) -> CycloNum {
        Self::from_coeff(ctx, ctx.rational(r))
    }

    /// ζ_L^k.
    pub fn zeta_pow(ctx: &Arc<CycloContext>, k: i64) -> CycloNum {
        Self::from_coeff(ctx, ctx.zeta_pow(k))
    }

    /// Element Σ c_i ζ^i from power-basis coefficients (any length; reduced mod Φ_L).
    pub fn from_coeffs(ctx: &Arc<CycloContext>, coeffs: &[Rational]) -> CycloNum {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let poly: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut val = Coeff {
            num: ctx.reduce(poly),
            den,
        };
        val.normalize();
        Self::from_coeff(ctx, val)
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.ctx.level
    }

    /// Power-basis coefficients, length φ(L).
    pub fn coeffs(&self) -> Vec<Rational> {
        self.val.coeffs()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.val.as_rational()
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.val.is_one()
    }

    fn check(&self, other: &CycloNum) -> Result<()> {
        if self.ctx.level != other.ctx.level {
            return Err(Error::ContextMismatch {
                left: self.ctx.level,
                right: other.ctx.level,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &CycloNum) -> Result<CycloNum> {
        self.check(other)?;
        Ok(Self::from_coeff(
            &self.ctx,
            self.ctx.add(&self.val, &other.val),
        ))
    }

    pub fn sub(&self, other: &CycloNum) -> Result<CycloNum> {
        self.check(other)?;
        Ok(Self::from_coeff(
            &self.ctx,
            self.ctx.sub(&self.val, &other.val),
        ))
    }

    pub fn mul(&self, other: &CycloNum) -> Result<CycloNum> {
        self.check(other)?;
        Ok(Self::from_coeff(
            &self.ctx,
            self.ctx.mul(&self.val, &other.val),
        ))
    }

    pub fn div(&self, other: &CycloNum) -> Result<CycloNum> {
        self.check(other)?;
        Ok(Self::from_coeff(
            &self.ctx,
            self.ctx.div(&self.val, &other.val)?,
        ))
    }

    pub fn inv(&self) -> Result<CycloNum> {
        Ok(Self::from_coeff(&self.ctx, self.ctx.inv(&self.val)?))
    }

    pub fn neg(&self) -> CycloNum {
        Self::from_coeff(&self.ctx, self.val.neg())
    }

    pub fn pow(&self, e: u64) -> CycloNum {
        Self::from_coeff(&self.ctx, self.ctx.pow(&self.val, e))
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.level == other.ctx.level && self.val == other.val
    }
}

impl Eq for CycloNum {}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum[L={}]({})", self.ctx.level, self)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.display(&self.val))
    }
}

/// The four field operations of [`cyclo_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn cyclo_arith(a: &CycloNum, b: &CycloNum, op: ArithOp) -> Result<CycloNum> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}
