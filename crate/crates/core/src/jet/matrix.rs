use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactnum::{CycloContext, CycloNum};

/// A 2×2 matrix over Q(ζ_L), rows (a11 a12) and (a21 a22).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix2 {
    pub a11: CycloNum,
    pub a12: CycloNum,
    pub a21: CycloNum,
    pub a22: CycloNum,
}

impl Matrix2 {
    pub fn new(a11: CycloNum, a12: CycloNum, a21: CycloNum, a22: CycloNum) -> Matrix2 {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn identity(ctx: &Arc<CycloContext>) -> Matrix2 {
        Matrix2::diag(CycloNum::one(ctx), CycloNum::one(ctx))
    }

    pub fn diag(l1: CycloNum, l2: CycloNum) -> Matrix2 {
        let z = CycloNum::zero(l1.context());
        Matrix2 {
            a11: l1,
            a12: z.clone(),
            a21: z,
            a22: l2,
        }
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        self.a11.context()
    }

    pub(crate) fn check_context(&self, ctx: &Arc<CycloContext>) -> Result<()> {
        for e in [&self.a11, &self.a12, &self.a21, &self.a22] {
            if e.level() != ctx.level() {
                return Err(Error::ContextMismatch {
                    left: ctx.level(),
                    right: e.level(),
                });
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> CycloNum {
        self.a11.add(&self.a22).expect("entries share a context")
    }

    pub fn det(&self) -> CycloNum {
        let p = self.a11.mul(&self.a22).expect("entries share a context");
        let q = self.a12.mul(&self.a21).expect("entries share a context");
        p.sub(&q).expect("entries share a context")
    }

    pub fn is_diagonal(&self) -> bool {
        self.a12.is_zero() && self.a21.is_zero()
    }

    pub fn mul(&self, o: &Matrix2) -> Result<Matrix2> {
        let dot = |a: &CycloNum, b: &CycloNum, c: &CycloNum, d: &CycloNum| -> Result<CycloNum> {
            a.mul(b)?.add(&c.mul(d)?)
        };
        Ok(Matrix2 {
            a11: dot(&self.a11, &o.a11, &self.a12, &o.a21)?,
            a12: dot(&self.a11, &o.a12, &self.a12, &o.a22)?,
            a21: dot(&self.a21, &o.a11, &self.a22, &o.a21)?,
            a22: dot(&self.a21, &o.a12, &self.a22, &o.a22)?,
        })
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularLinearPart);
        }
        let inv = det.inv()?;
        let s = |x: &CycloNum| x.mul(&inv).expect("entries share a context");
        Ok(Matrix2 {
            a11: s(&self.a22),
            a12: s(&self.a12.neg()),
            a21: s(&self.a21.neg()),
            a22: s(&self.a11),
        })
    }
}

impl fmt::Debug for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a11, self.a12, self.a21, self.a22
        )
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
