//! Exact elimination over Q(ζ_L): Bareiss determinants and a sparse row echelon.

use std::collections::BTreeMap;

use crate::exactnum::{Coeff, CycloContext};

/// Determinant by fraction-free (Bareiss) elimination.
pub(crate) fn bareiss_det(ctx: &CycloContext, mut m: Vec<Vec<Coeff>>) -> Coeff {
    let n = m.len();
    if n == 0 {
        return ctx.one();
    }
    let mut negate = false;
    let mut prev = ctx.one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return ctx.zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = ctx.sub(&ctx.mul(&m[i][j], &m[k][k]), &ctx.mul(&m[i][k], &m[k][j]));
                m[i][j] = ctx.div(&t, &prev).expect("Bareiss pivots are nonzero");
            }
            m[i][k] = ctx.zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

pub(crate) type SparseRow = BTreeMap<usize, Coeff>;

/// Row echelon form built one row at a time; each stored row is monic at its
/// leading (smallest) column.
pub(crate) struct Echelon<'a> {
    ctx: &'a CycloContext,
    pivots: BTreeMap<usize, SparseRow>,
}

impl<'a> Echelon<'a> {
    pub(crate) fn new(ctx: &'a CycloContext) -> Echelon<'a> {
        Echelon {
            ctx,
            pivots: BTreeMap::new(),
        }
    }

    /// Reduce `row` against the stored pivots; keep it if something survives.
    pub(crate) fn insert(&mut self, mut row: SparseRow) -> Option<usize> {
        row.retain(|_, c| !c.is_zero());
        loop {
            let (&lead, lead_c) = row.iter().next()?;
            let Some(p) = self.pivots.get(&lead) else {
                let inv = self.ctx.inv(lead_c).expect("leading entries are nonzero");
                for c in row.values_mut() {
                    *c = self.ctx.mul(c, &inv);
                }
                self.pivots.insert(lead, row);
                return Some(lead);
            };
            let factor = lead_c.clone();
            for (col, pc) in p {
                let delta = self.ctx.mul(pc, &factor);
                match row.get_mut(col) {
                    Some(v) => {
                        *v = self.ctx.sub(v, &delta);
                        if v.is_zero() {
                            row.remove(col);
                        }
                    }
                    None => {
                        row.insert(*col, delta.neg());
                    }
                }
            }
        }
    }

    /// Pivot columns in increasing order.
    pub(crate) fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }
}
