//! Floating-point cross-check of hidden orbit counts.
//!
//! The germ is embedded into complex doubles, perturbed by small terms of
//! degree one and two that keep the origin fixed, and the periodic points of
//! the perturbation near 0 are located by multi-start Newton iteration. The
//! orbit count of minimal period M is compared across two perturbation sizes.

mod search;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::CycloNum;
use crate::jet::{Exp, GermMap};

pub use search::{
    find_period_points, numeric_orbit_count, DecadeResult, NumericConfig, NumericReport,
    PeriodPoint, PeriodSearch,
};

pub type Point = [Complex64; 2];
pub type Jacobian = [[Complex64; 2]; 2];

/// Polynomial map of C² with complex double coefficients and no constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatGerm {
    comps: [Vec<(Exp, Complex64)>; 2],
    degree: u32,
}

impl FloatGerm {
    pub fn new(f1: Vec<(Exp, Complex64)>, f2: Vec<(Exp, Complex64)>) -> Result<FloatGerm> {
        let mut comps = [f1, f2];
        for c in &mut comps {
            if c.iter()
                .any(|(e, v)| *e == (0, 0) && *v != Complex64::new(0.0, 0.0))
            {
                return Err(Error::NonzeroConstantTerm);
            }
            c.retain(|(e, v)| *e != (0, 0) && *v != Complex64::new(0.0, 0.0));
            c.sort_by_key(|(e, _)| *e);
        }
        let degree = comps
            .iter()
            .flatten()
            .map(|((a, b), _)| a + b)
            .max()
            .unwrap_or(0);
        Ok(FloatGerm { comps, degree })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn component(&self, i: usize) -> &[(Exp, Complex64)] {
        &self.comps[i]
    }

    /// Sum of the two maps, merging equal monomials.
    pub fn add(&self, other: &FloatGerm) -> FloatGerm {
        let merge = |a: &[(Exp, Complex64)], b: &[(Exp, Complex64)]| {
            let mut m = std::collections::BTreeMap::new();
            for (e, v) in a.iter().chain(b) {
                *m.entry(*e).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
            m.into_iter().collect::<Vec<_>>()
        };
        FloatGerm::new(
            merge(&self.comps[0], &other.comps[0]),
            merge(&self.comps[1], &other.comps[1]),
        )
        .expect("sums of germs have no constant term")
    }

    /// g(x) together with Dg(x).
    pub fn eval_jac(&self, x: &Point) -> (Point, Jacobian) {
        let d = self.degree as usize;
        let powers = |z: Complex64| {
            let mut p = Vec::with_capacity(d + 1);
            p.push(Complex64::new(1.0, 0.0));
            for i in 0..d {
                p.push(p[i] * z);
            }
            p
        };
        let (p1, p2) = (powers(x[0]), powers(x[1]));
        let zero = Complex64::new(0.0, 0.0);
        let mut val = [zero; 2];
        let mut jac = [[zero; 2]; 2];
        for (i, comp) in self.comps.iter().enumerate() {
            for &((a, b), c) in comp {
                let (a, b) = (a as usize, b as usize);
                val[i] += c * p1[a] * p2[b];
                if a > 0 {
                    jac[i][0] += c * (a as f64) * p1[a - 1] * p2[b];
                }
                if b > 0 {
                    jac[i][1] += c * (b as f64) * p1[a] * p2[b - 1];
                }
            }
        }
        (val, jac)
    }

    pub fn eval(&self, x: &Point) -> Point {
        self.eval_jac(x).0
    }
}

impl fmt::Display for FloatGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, comp) in self.comps.iter().enumerate() {
            let parts: Vec<String> = comp
                .iter()
                .map(|((a, b), c)| format!("({:.6}{:+.6}i)*x1^{a}*x2^{b}", c.re, c.im))
                .collect();
            write!(
                f,
                "g{} = {}",
                i + 1,
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join(" + ")
                }
            )?;
            if i == 0 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// e^{2πik/L}, exact at multiples of 30° and 45°.
pub fn unit_root(k: i64, level: u32) -> Complex64 {
    let l = level as i64;
    let r = k.rem_euclid(l);
    let h = 3f64.sqrt() / 2.0;
    if (12 * r) % l == 0 {
        let (c, s) = [
            (1.0, 0.0),
            (h, 0.5),
            (0.5, h),
            (0.0, 1.0),
            (-0.5, h),
            (-h, 0.5),
            (-1.0, 0.0),
            (-h, -0.5),
            (-0.5, -h),
            (0.0, -1.0),
            (0.5, -h),
            (h, -0.5),
        ][(12 * r / l) as usize];
        return Complex64::new(c, s);
    }
    if (8 * r) % l == 0 {
        let o = (8 * r / l) as usize;
        let s = [1.0, 1.0, -1.0, -1.0][o / 2];
        let c = [1.0, -1.0, -1.0, 1.0][o / 2];
        return Complex64::new(c * FRAC_1_SQRT_2, s * FRAC_1_SQRT_2);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / l as f64)
}

/// Value of an exact number under ζ_L ↦ e^{2πi/L}, with an error bound.
pub fn embed_num(x: &CycloNum) -> (Complex64, f64) {
    let level = x.level();
    let mut z = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (i, c) in x.coeffs().iter().enumerate() {
        let c = c.to_f64().unwrap_or(f64::NAN);
        z += unit_root(i as i64, level) * c;
        err += c.abs() * 4.0 * f64::EPSILON;
    }
    (z, err + z.norm() * f64::EPSILON)
}

/// Embedded germ and the largest coefficient error bound.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub germ: FloatGerm,
    pub max_error: f64,
}

pub fn embed(f: &GermMap) -> Embedding {
    let mut max_error = 0f64;
    let mut comps: [Vec<(Exp, Complex64)>; 2] = [Vec::new(), Vec::new()];
    for (i, comp) in f.components().iter().enumerate() {
        for (e, c) in comp.terms() {
            let (z, err) = embed_num(&c);
            max_error = max_error.max(err);
            comps[i].push((e, z));
        }
    }
    let [c1, c2] = comps;
    Embedding {
        germ: FloatGerm::new(c1, c2).expect("germs have no constant term"),
        max_error,
    }
}

/// Points x, g(x), …, g^M(x) and the Jacobian of g^M at x.
#[derive(Clone, Debug)]
pub struct OrbitEval {
    pub points: Vec<Point>,
    pub jacobian: Jacobian,
}

impl OrbitEval {
    pub fn end(&self) -> &Point {
        self.points.last().expect("orbits contain their start")
    }
}

pub(crate) fn mat_mul(a: &Jacobian, b: &Jacobian) -> Jacobian {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Iterate `m` times, accumulating the chain-rule product; a non-finite value
/// is reported as a divergent start.
pub fn orbit_eval(g: &FloatGerm, x: &Point, m: u32) -> Result<OrbitEval> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut jac = [[one, zero], [zero, one]];
    let mut points = Vec::with_capacity(m as usize + 1);
    let mut p = *x;
    points.push(p);
    for _ in 0..m {
        let (v, d) = g.eval_jac(&p);
        jac = mat_mul(&d, &jac);
        p = v;
        let finite = p
            .iter()
            .chain(jac.iter().flatten())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::Numeric("divergent start".into()));
        }
        points.push(p);
    }
    Ok(OrbitEval {
        points,
        jacobian: jac,
    })
}

/// Serializable form of a complex point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointRepr {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

impl From<&Point> for PointRepr {
    fn from(p: &Point) -> PointRepr {
        PointRepr {
            x1: [p[0].re, p[0].im],
            x2: [p[1].re, p[1].im],
        }
    }
}

pub(crate) fn dist(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

pub(crate) fn norm(a: &Point) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}
