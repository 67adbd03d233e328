use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{dist, embed, norm, orbit_eval, FloatGerm, Point, PointRepr};
use crate::dold::DoldEngine;
use crate::error::{Error, Result};
use crate::exactnum::divisors;
use crate::jet::GermMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericConfig {
    /// Perturbation size of the first decade; the second uses epsilon / 10.
    pub epsilon: f64,
    pub radius: f64,
    pub starts: usize,
    pub tol_residual: f64,
    pub tol_cluster: f64,
    pub max_newton: u32,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> NumericConfig {
        NumericConfig {
            epsilon: 1e-3,
            radius: 0.35,
            starts: 2000,
            tol_residual: 1e-10,
            tol_cluster: 1e-6,
            max_newton: 60,
            seed: 0,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon > 0.0
            && self.tol_residual > 0.0
            && self.tol_residual < self.tol_cluster
            && self.tol_cluster < self.radius
            && self.starts > 0
            && self.max_newton > 0
            && self.radius.is_finite();
        if !ok {
            return Err(Error::InvalidParams(format!(
                "numeric config needs epsilon > 0 and 0 < tol_residual < tol_cluster < radius, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodPoint {
    pub point: PointRepr,
    #[serde(skip)]
    pub(crate) raw: Point,
    pub period: u32,
    pub residual: f64,
    /// |det(D(g^M) − I)| at the point.
    pub det: f64,
}

/// Certified periodic points of g^M in the search ball.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodSearch {
    pub period: u32,
    pub points: Vec<PeriodPoint>,
    /// Orbits of minimal period M, as indices into `points`.
    pub orbits: Vec<Vec<usize>>,
    /// Converged candidates whose Newton step did not contract (multiple roots).
    pub uncertified: usize,
    pub diverged: usize,
    pub max_residual: f64,
    /// Every orbit point of every reported orbit was found by the search.
    pub closed: bool,
}

impl PeriodSearch {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn count_with_period(&self, m: u32) -> usize {
        self.points.iter().filter(|p| p.period == m).count()
    }
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points of C² = R⁴ with a seeded shift, kept inside the ball of radius ρ.
fn starts(cfg: &NumericConfig) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let shift: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
    let mut out = Vec::with_capacity(cfg.starts);
    let mut i = 1u64;
    while out.len() < cfg.starts {
        let mut c = [0f64; 4];
        for (j, b) in [2u64, 3, 5, 7].into_iter().enumerate() {
            c[j] = ((halton(i, b) + shift[j]).fract() * 2.0 - 1.0) * cfg.radius;
        }
        i += 1;
        let p = [Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])];
        if norm(&p) < cfg.radius {
            out.push(p);
        }
    }
    out
}

enum Outcome {
    Converged {
        x: Point,
        residual: f64,
        det: f64,
        certified: bool,
    },
    Diverged,
    Stalled,
}

fn solve(a: &[[Complex64; 2]; 2], b: &Point) -> Option<(Point, f64)> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() == 0.0 || !det.re.is_finite() {
        return None;
    }
    let x0 = (b[0] * a[1][1] - b[1] * a[0][1]) / det;
    let x1 = (a[0][0] * b[1] - a[1][0] * b[0]) / det;
    Some(([x0, x1], det.norm()))
}

fn displacement_system(g: &FloatGerm, x: &Point, m: u32) -> Result<(Point, [[Complex64; 2]; 2])> {
    let ev = orbit_eval(g, x, m)?;
    let end = ev.end();
    let f = [end[0] - x[0], end[1] - x[1]];
    let mut j = ev.jacobian;
    j[0][0] -= 1.0;
    j[1][1] -= 1.0;
    Ok((f, j))
}

fn newton(g: &FloatGerm, start: &Point, m: u32, cfg: &NumericConfig) -> Outcome {
    let mut x = *start;
    let mut last_step = f64::INFINITY;
    for _ in 0..cfg.max_newton {
        let Ok((f, j)) = displacement_system(g, &x, m) else {
            return Outcome::Diverged;
        };
        let Some((delta, _)) = solve(&j, &f) else {
            return Outcome::Stalled;
        };
        x = [x[0] - delta[0], x[1] - delta[1]];
        last_step = norm(&delta);
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || norm(&x) > 4.0 * cfg.radius {
            return Outcome::Diverged;
        }
        if last_step < 1e-15 * (1.0 + norm(&x)) {
            break;
        }
    }
    let Ok((f, j)) = displacement_system(g, &x, m) else {
        return Outcome::Diverged;
    };
    let residual = norm(&f);
    if residual >= cfg.tol_residual {
        return Outcome::Stalled;
    }
    let det = (j[0][0] * j[1][1] - j[0][1] * j[1][0]).norm();
    // a simple root gives quadratic contraction; a multiple root stalls at a visible step
    let certified = det > 0.0 && last_step < 1e-3 * cfg.tol_cluster;
    Outcome::Converged {
        x,
        residual,
        det,
        certified,
    }
}

fn minimal_period(g: &FloatGerm, x: &Point, m: u32, tol: f64) -> Result<u32> {
    for d in divisors(m) {
        let ev = orbit_eval(g, x, d)?;
        if dist(ev.end(), x) < tol {
            return Ok(d);
        }
    }
    Ok(m)
}

/// Newton's method on g^M − id from quasi-random starts in the ball of radius ρ.
pub fn find_period_points(g: &FloatGerm, m: u32, cfg: &NumericConfig) -> Result<PeriodSearch> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    let outcomes: Vec<Outcome> = starts(cfg)
        .par_iter()
        .map(|s| newton(g, s, m, cfg))
        .collect();
    let mut diverged = 0;
    let mut candidates = Vec::new();
    let mut uncertified_raw = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Converged {
                x,
                residual,
                det,
                certified,
            } if norm(&x) < cfg.radius => {
                if certified {
                    candidates.push((x, residual, det));
                } else {
                    uncertified_raw.push(x);
                }
            }
            Outcome::Converged { .. } | Outcome::Stalled => {}
            Outcome::Diverged => diverged += 1,
        }
    }
    let key = |p: &Point| (norm(p), p[0].re, p[0].im, p[1].re, p[1].im);
    candidates.sort_by(|a, b| {
        key(&a.0)
            .partial_cmp(&key(&b.0))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut points: Vec<PeriodPoint> = Vec::new();
    for (x, residual, det) in candidates {
        if points.iter().any(|p| dist(&p.raw, &x) < cfg.tol_cluster) {
            continue;
        }
        let period = minimal_period(g, &x, m, cfg.tol_cluster)?;
        points.push(PeriodPoint {
            point: PointRepr::from(&x),
            raw: x,
            period,
            residual,
            det,
        });
    }
    // uncertified candidates sitting on a certified point are duplicates, not failures
    uncertified_raw.sort_by(|a, b| {
        key(a)
            .partial_cmp(&key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut distinct_uncertified: Vec<Point> = Vec::new();
    for x in uncertified_raw {
        let near_certified = points.iter().any(|p| dist(&p.raw, &x) < cfg.tol_cluster);
        let seen = distinct_uncertified
            .iter()
            .any(|q| dist(q, &x) < cfg.tol_cluster);
        if !near_certified && !seen {
            distinct_uncertified.push(x);
        }
    }
    let mut orbits = Vec::new();
    let mut assigned = vec![false; points.len()];
    let mut closed = true;
    for i in 0..points.len() {
        if assigned[i] || points[i].period != m {
            continue;
        }
        let ev = orbit_eval(g, &points[i].raw, m)?;
        let mut orbit = Vec::new();
        for q in &ev.points[..m as usize] {
            match points
                .iter()
                .position(|p| dist(&p.raw, q) < 10.0 * cfg.tol_cluster)
            {
                Some(j) => {
                    assigned[j] = true;
                    orbit.push(j);
                }
                None => closed = false,
            }
        }
        orbit.sort_unstable();
        orbit.dedup();
        orbits.push(orbit);
    }
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(PeriodSearch {
        period: m,
        points,
        orbits,
        uncertified: distinct_uncertified.len(),
        diverged,
        max_residual,
        closed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecadeResult {
    pub epsilon: f64,
    pub orbits: usize,
    pub points_of_period: usize,
    pub fixed_points_of_iterate: usize,
    pub uncertified: usize,
    pub diverged: usize,
    pub max_residual: f64,
    pub closed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericReport {
    pub period: u32,
    pub config: NumericConfig,
    pub embedding_error: f64,
    pub decades: Vec<DecadeResult>,
    /// Both decades report the same orbit count with no uncertified candidates.
    pub agreement: bool,
    pub count: Option<usize>,
    pub exact: u64,
    pub matches_exact: bool,
}

impl std::fmt::Display for NumericReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "period M = {}, embedding error <= {:.1e}",
            self.period, self.embedding_error
        )?;
        writeln!(
            f,
            "{:>10} {:>8} {:>10} {:>10} {:>12} {:>10} {:>8}",
            "epsilon", "orbits", "period-M", "fix(g^M)", "uncertified", "max res", "closed"
        )?;
        for d in &self.decades {
            writeln!(
                f,
                "{:>10.0e} {:>8} {:>10} {:>10} {:>12} {:>10.1e} {:>8}",
                d.epsilon,
                d.orbits,
                d.points_of_period,
                d.fixed_points_of_iterate,
                d.uncertified,
                d.max_residual,
                d.closed
            )?;
        }
        let numeric = self.count.map_or("none".to_string(), |c| c.to_string());
        writeln!(
            f,
            "decades agree: {}",
            if self.agreement { "yes" } else { "no" }
        )?;
        write!(
            f,
            "numeric O_{} = {numeric}, exact O_{} = {} ({})",
            self.period,
            self.period,
            self.exact,
            if self.matches_exact {
                "match"
            } else {
                "MISMATCH"
            }
        )
    }
}

/// Random degree-one and degree-two terms with coefficients in the unit square.
fn perturbation(seed: u64) -> FloatGerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let exps = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    let mut comps: [Vec<_>; 2] = [Vec::new(), Vec::new()];
    for comp in &mut comps {
        for &e in &exps {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            comp.push((e, c));
        }
    }
    let [a, b] = comps;
    FloatGerm::new(a, b).expect("no constant term")
}

fn scaled(g: &FloatGerm, s: f64) -> FloatGerm {
    let sc = |c: &[(crate::jet::Exp, Complex64)]| c.iter().map(|&(e, v)| (e, v * s)).collect();
    FloatGerm::new(sc(g.component(0)), sc(g.component(1))).expect("no constant term")
}

/// Count period-M orbits born at 0 under two perturbation sizes and compare
/// with the exact O_M(f,0).
pub fn numeric_orbit_count(f: &GermMap, m: u32, cfg: &NumericConfig) -> Result<NumericReport> {
    cfg.validate()?;
    let exact = DoldEngine::new(f).orbit_count(m)?;
    let emb = embed(f);
    let p = perturbation(cfg.seed);
    let mut decades = Vec::new();
    for eps in [cfg.epsilon, cfg.epsilon / 10.0] {
        let g = emb.germ.add(&scaled(&p, eps));
        let s = find_period_points(&g, m, cfg)?;
        decades.push(DecadeResult {
            epsilon: eps,
            orbits: s.orbit_count(),
            points_of_period: s.count_with_period(m),
            fixed_points_of_iterate: s.points.len(),
            uncertified: s.uncertified,
            diverged: s.diverged,
            max_residual: s.max_residual,
            closed: s.closed,
        });
    }
    let agreement =
        decades[0].orbits == decades[1].orbits && decades.iter().all(|d| d.uncertified == 0);
    let count = agreement.then_some(decades[0].orbits);
    Ok(NumericReport {
        period: m,
        config: *cfg,
        embedding_error: emb.max_error,
        decades,
        agreement,
        count,
        exact,
        matches_exact: count == Some(exact as usize),
    })
}
