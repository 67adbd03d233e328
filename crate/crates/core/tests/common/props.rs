//! Property bodies shared by the randomized suites (full case counts) and the
//! acceptance harness (a short deterministic rerun).

use hidden_orbits::dold::DoldEngine;
use hidden_orbits::jet::{GermMap, Jet2};
use hidden_orbits::multiplicity::{
    cronin_zero_order, dual_space_zero_order, fixed_point_index, zero_order, Method,
};
use hidden_orbits::normalform::{check_iterate_resonance, poincare_dulac};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use super::*;

/// Run `body` on `cases` inputs; `deterministic` fixes the RNG seed.
pub fn run<S>(
    cases: u32,
    deterministic: bool,
    strategy: S,
    body: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: 50 * cases.max(20),
        ..Config::default()
    };
    let mut runner = if deterministic {
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    } else {
        TestRunner::new(config)
    };
    runner.run(&strategy, body).map_err(|e| e.to_string())
}

pub fn divisors(m: u32) -> Vec<u32> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn reject_or_fail(e: hidden_orbits::Error) -> TestCaseError {
    if out_of_class(&e) {
        TestCaseError::reject("not isolated")
    } else {
        TestCaseError::fail(e.to_string())
    }
}

/// Zero order, or `None` when the input falls outside the isolated class.
fn pi(g: &GermMap) -> Result<Option<u64>, TestCaseError> {
    match zero_order(g) {
        Ok(r) if r.trusted => Ok(Some(r.order)),
        Ok(_) => Ok(None),
        Err(e) if out_of_class(&e) => Ok(None),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

/// Every μ_{f^d}, d | M.
fn indices(engine: &DoldEngine, m: u32) -> Result<Vec<u64>, TestCaseError> {
    divisors(m)
        .into_iter()
        .map(|d| engine.index(d).map(|r| r.order).map_err(reject_or_fail))
        .collect()
}

/// Möbius sum written out independently of the engine.
pub fn mobius(m: u32, mu: impl Fn(u32) -> i64) -> i64 {
    let mut primes = Vec::new();
    let mut n = m;
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            primes.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    (0..1u32 << primes.len())
        .map(|mask| {
            let chosen: u32 = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &q)| q)
                .product();
            let sign = if (mask.count_ones()) % 2 == 0 { 1 } else { -1 };
            sign * mu(m / chosen)
        })
        .sum()
}

fn invertible() -> impl Strategy<Value = [i64; 4]> {
    (-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2)
        .prop_filter("invertible", |&(a, b, c, d)| a * d - b * c != 0)
        .prop_map(|(a, b, c, d)| [a, b, c, d])
}

/// Determinant ±1 keeps conjugates free of growing denominators.
fn unimodular() -> impl Strategy<Value = [i64; 4]> {
    (-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2)
        .prop_filter("unimodular", |&(a, b, c, d)| (a * d - b * c).abs() == 1)
        .prop_map(|(a, b, c, d)| [a, b, c, d])
}

/// Map with lowest forms x1^a, x2^b after an invertible linear mix.
fn power_map(
    level: u32,
    d: u32,
    a: u32,
    b: u32,
    mix: [i64; 4],
    t1: &[RawTerm],
    t2: &[RawTerm],
) -> GermMap {
    let c = ctx(level);
    let mut f1 = vec![((a, 0), int(&c, 1))];
    let mut f2 = vec![((0, b), int(&c, 1))];
    f1.extend(build(&c, t1).into_iter().filter(|(e, _)| e.0 + e.1 > a));
    f2.extend(build(&c, t2).into_iter().filter(|(e, _)| e.0 + e.1 > b));
    let (j1, j2) = (jet(&c, d, &f1), jet(&c, d, &f2));
    let m = |x: i64| int(&c, x);
    let g1 = j1
        .scale(&m(mix[0]))
        .unwrap()
        .add(&j2.scale(&m(mix[1])).unwrap())
        .unwrap();
    let g2 = j1
        .scale(&m(mix[2]))
        .unwrap()
        .add(&j2.scale(&m(mix[3])).unwrap())
        .unwrap();
    GermMap::new(g1, g2).unwrap()
}

pub fn cronin_agrees_with_dual_space(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        prop::sample::select(vec![1u32, 3, 4]),
        nonempty_terms(1, 3, 4),
        nonempty_terms(1, 3, 4),
        raw_terms(2, 6, 4),
    );
    run(cases, det, strategy, |(level, p1, p2, high)| {
        let c = ctx(level);
        let d = 24;
        let mut f1 = build(&c, &p1);
        f1.extend(build(&c, &high));
        let g = GermMap::from_terms(&c, d, f1, build(&c, &p2)).unwrap();
        if let Some(r) = cronin_zero_order(&g).map_err(reject_or_fail)? {
            prop_assert_eq!(r.method, Method::Cronin);
            let oracle = dual_space_zero_order(&g, d).unwrap();
            prop_assert!(oracle.trusted);
            prop_assert_eq!(oracle.order, r.order);
        }
        Ok(())
    })
}

pub fn composition_multiplies_zero_orders(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        (1u32..=2, 1u32..=2),
        (1u32..=2, 1u32..=2),
        invertible(),
        invertible(),
        (
            raw_terms(2, 4, 3),
            raw_terms(2, 4, 3),
            raw_terms(2, 4, 3),
            raw_terms(2, 4, 3),
        ),
    );
    run(cases, det, strategy, |(ab1, ab2, mix1, mix2, t)| {
        let d = 24;
        let h1 = power_map(3, d, ab1.0, ab1.1, mix1, &t.0, &t.1);
        let h2 = power_map(3, d, ab2.0, ab2.1, mix2, &t.2, &t.3);
        let (p1, p2) = (pi(&h1)?.unwrap(), pi(&h2)?.unwrap());
        prop_assert_eq!(p1, (ab1.0 * ab1.1) as u64);
        let comp = h1.compose(&h2).unwrap();
        prop_assert_eq!(pi(&comp)?, Some(p1 * p2));
        Ok(())
    })
}

pub fn component_product_adds_zero_orders(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        nonempty_terms(1, 2, 3),
        nonempty_terms(1, 2, 3),
        nonempty_terms(1, 3, 3),
    );
    run(cases, det, strategy, |(a, b, h)| {
        let c = ctx(1);
        let d = 24;
        let (f1, f2, hj) = (
            jet_from(&c, d, &a),
            jet_from(&c, d, &b),
            jet_from(&c, d, &h),
        );
        prop_assume!(!f1.is_zero() && !f2.is_zero() && !hj.is_zero());
        let pair = |x: &Jet2| GermMap::new(x.clone(), hj.clone()).unwrap();
        let (Some(p1), Some(p2)) = (pi(&pair(&f1))?, pi(&pair(&f2))?) else {
            return Err(TestCaseError::reject("not isolated"));
        };
        let prod = pair(&f1.mul(&f2).unwrap());
        prop_assert_eq!(pi(&prod)?, Some(p1 + p2));
        Ok(())
    })
}

pub fn unit_matrix_preserves_zero_order(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        nonempty_terms(1, 3, 3),
        nonempty_terms(1, 3, 3),
        invertible(),
        (
            raw_terms(1, 2, 2),
            raw_terms(1, 2, 2),
            raw_terms(1, 2, 2),
            raw_terms(1, 2, 2),
        ),
    );
    run(cases, det, strategy, |(g1, g2, consts, entries)| {
        let c = ctx(3);
        let d = 24;
        let g = GermMap::new(jet_from(&c, d, &g1), jet_from(&c, d, &g2)).unwrap();
        let Some(p) = pi(&g)? else {
            return Err(TestCaseError::reject("not isolated"));
        };
        let entry = |k: i64, t: &[RawTerm]| {
            Jet2::constant(&c, d, &int(&c, k))
                .unwrap()
                .add(&jet_from(&c, d, t))
                .unwrap()
        };
        let a11 = entry(consts[0], &entries.0);
        let a12 = entry(consts[1], &entries.1);
        let a21 = entry(consts[2], &entries.2);
        let a22 = entry(consts[3], &entries.3);
        let (x, y) = (g.component(0), g.component(1));
        let h1 = a11.mul(x).unwrap().add(&a12.mul(y).unwrap()).unwrap();
        let h2 = a21.mul(x).unwrap().add(&a22.mul(y).unwrap()).unwrap();
        prop_assert_eq!(pi(&GermMap::new(h1, h2).unwrap())?, Some(p));
        Ok(())
    })
}

pub fn power_substitution_scales_zero_order(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        (1u32..=3, 1u32..=3),
        (1u32..=2, 1u32..=2),
        invertible(),
        (raw_terms(2, 4, 3), raw_terms(2, 4, 3)),
    );
    run(cases, det, strategy, |(ab, inner, mix, t)| {
        let g = power_map(4, 12, inner.0, inner.1, mix, &t.0, &t.1);
        let p = pi(&g)?.unwrap();
        let s = g.substitute_powers(ab.0, ab.1).unwrap();
        prop_assert_eq!(pi(&s)?, Some((ab.0 * ab.1) as u64 * p));
        Ok(())
    })
}

pub fn index_is_one_exactly_without_eigenvalue_one(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        (-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2),
        any::<bool>(),
        (raw_terms(2, 3, 3), raw_terms(2, 3, 3)),
    );
    run(cases, det, strategy, |(lin, unit_eigen, t)| {
        let c = ctx(1);
        // eigenvalue 1 forced by an upper triangular block with a11 = 1
        let (a11, a12, a21, a22) = if unit_eigen {
            (1, lin.1, 0, lin.3)
        } else {
            lin
        };
        prop_assume!(a11 * a22 - a12 * a21 != 0);
        let mut f1 = vec![
            ((1, 0), int(&c, a11)),
            ((0, 1), int(&c, a12)),
            ((2, 0), int(&c, 1)),
        ];
        let mut f2 = vec![
            ((1, 0), int(&c, a21)),
            ((0, 1), int(&c, a22)),
            ((0, 2), int(&c, 1)),
        ];
        f1.extend(build(&c, &t.0));
        f2.extend(build(&c, &t.1));
        let f = GermMap::from_terms(&c, 16, f1, f2).unwrap();
        let one_is_eigen = (1 - a11) * (1 - a22) - a12 * a21 == 0;
        match fixed_point_index(&f, 1) {
            Ok(r) => {
                prop_assert!(r.order >= 1);
                prop_assert_eq!(r.order == 1, !one_is_eigen);
            }
            Err(e) => prop_assert!(one_is_eigen && out_of_class(&e), "{}", e),
        }
        Ok(())
    })
}

/// M | P_M, P_M = 0 off the admissible set, and μ_{f^M} = Σ_{m | M admissible} P_m.
pub fn period_divides_dold_index(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        diagonal_spec(),
        2u32..=6,
        (raw_terms(2, 4, 3), raw_terms(2, 4, 3)),
    );
    run(cases, det, strategy, |((level, k1, k2), m, extra)| {
        let f = perturbed_diagonal(level, k1, k2, 24, &extra.0, &extra.1);
        let engine = DoldEngine::new(&f).with_cap(64);
        let mu = indices(&engine, m)?;
        let ds = divisors(m);
        let p = mobius(m, |d| mu[ds.iter().position(|&x| x == d).unwrap()] as i64);
        prop_assert_eq!(p % m as i64, 0, "P_{} = {}", m, p);
        prop_assert_eq!(engine.mobius_sum(m).unwrap(), p);
        if !engine.periods().contains(m) {
            prop_assert_eq!(p, 0);
        }
        let admissible: i64 = ds
            .iter()
            .filter(|&&d| engine.periods().contains(d))
            .map(|&d| engine.mobius_sum(d).unwrap())
            .sum();
        prop_assert_eq!(admissible, *mu.last().unwrap() as i64);
        Ok(())
    })
}

pub fn conjugation_preserves_indices(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        (1u32..=4).prop_flat_map(|l| (Just(l), 0..l, 0..l)),
        2u32..=4,
        (raw_terms(2, 3, 2), raw_terms(2, 3, 2)),
        (unimodular(), raw_terms(2, 3, 2), raw_terms(2, 3, 2)),
    );
    run(
        cases,
        det,
        strategy,
        |((level, k1, k2), m, extra, (mix, h1, h2))| {
            let d = 24;
            let f = perturbed_diagonal(level, k1, k2, d, &extra.0, &extra.1);
            let c = f.context().clone();
            let mut t1 = vec![((1, 0), int(&c, mix[0])), ((0, 1), int(&c, mix[1]))];
            let mut t2 = vec![((1, 0), int(&c, mix[2])), ((0, 1), int(&c, mix[3]))];
            t1.extend(build(&c, &h1));
            t2.extend(build(&c, &h2));
            let h = GermMap::from_terms(&c, d, t1, t2).unwrap();
            let g = f.conjugate(&h).unwrap();
            let (ef, eg) = (
                DoldEngine::new(&f).with_cap(64),
                DoldEngine::new(&g).with_cap(64),
            );
            let mf = indices(&ef, m)?;
            // the conjugate is exact through degree D, which determines every index up to D
            prop_assume!(mf.iter().all(|&v| v <= d as u64));
            let mg = indices(&eg, m)?;
            prop_assert_eq!(&mf, &mg);
            for k in divisors(m) {
                prop_assert_eq!(ef.mobius_sum(k).unwrap(), eg.mobius_sum(k).unwrap());
                if ef.periods().contains(k) {
                    prop_assert_eq!(ef.orbit_count(k).unwrap(), eg.orbit_count(k).unwrap());
                }
            }
            Ok(())
        },
    )
}

/// μ_f = μ_{f^m} when every eigenvalue is 1 or has λ^m ≠ 1.
pub fn shub_sullivan(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        0u32..6,
        2u32..=7,
        any::<bool>(),
        (raw_terms(2, 3, 3), raw_terms(2, 3, 3)),
    );
    run(cases, det, strategy, |(k2, m, both_unit, extra)| {
        // λ1 = 1; λ2 = 1 or ζ_6^{k2} with λ2^m ≠ 1
        let k2 = if both_unit { 0 } else { k2 };
        prop_assume!(k2 == 0 || (k2 * m) % 6 != 0);
        let c = ctx(6);
        let mut f1 = vec![((1, 0), int(&c, 1)), ((2, 0), int(&c, 1))];
        let mut f2 = vec![((0, 1), num(&c, 1, k2 as i64)), ((0, 2), int(&c, 1))];
        f1.extend(build(&c, &extra.0));
        f2.extend(build(&c, &extra.1));
        let f = GermMap::from_terms(&c, 24, f1, f2).unwrap();
        let a = fixed_point_index(&f, 1).map_err(reject_or_fail)?;
        let b = fixed_point_index(&f, m).map_err(reject_or_fail)?;
        prop_assert_eq!(a.order, b.order);
        Ok(())
    })
}

/// Resonance written as exponent arithmetic: λ_j = ζ^{k_j}, so λ^I = λ_j iff k·I ≡ k_j (mod L).
fn resonant(level: u32, k: (u32, u32), j: usize, e: (u32, u32)) -> bool {
    let kj = if j == 0 { k.0 } else { k.1 };
    (k.0 * e.0 + k.1 * e.1) % level == kj % level
}

fn diagonal_germ(level: u32, k1: u32, k2: u32, d: u32, t1: &[RawTerm], t2: &[RawTerm]) -> GermMap {
    let c = ctx(level);
    let mut f1 = vec![((1, 0), num(&c, 1, k1 as i64))];
    let mut f2 = vec![((0, 1), num(&c, 1, k2 as i64))];
    f1.extend(build(&c, t1));
    f2.extend(build(&c, t2));
    germ(&c, d, &f1, &f2)
}

pub fn normal_form_iterates_stay_resonant(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        diagonal_spec(),
        2u32..=6,
        1u32..=6,
        (raw_terms(2, 5, 3), raw_terms(2, 5, 3)),
    );
    run(cases, det, strategy, |((level, k1, k2), r, k, t)| {
        let f = diagonal_germ(level, k1, k2, 8, &t.0, &t.1);
        let nf = poincare_dulac(&f, r).unwrap();
        prop_assert_eq!(&f.conjugate(&nf.transform).unwrap(), &nf.normalized);
        for (j, comp) in nf.normalized.components().iter().enumerate() {
            for (e, _) in comp.terms() {
                let deg = e.0 + e.1;
                prop_assert!(
                    deg < 2 || deg > r || resonant(level, (k1, k2), j, e),
                    "{:?} in component {}",
                    e,
                    j
                );
            }
        }
        prop_assert!(check_iterate_resonance(&nf.normalized, k, r).unwrap());
        Ok(())
    })
}

pub fn lowest_resonant_terms_survive(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        diagonal_spec(),
        2u32..=4,
        (raw_terms(2, 4, 3), raw_terms(2, 4, 3)),
    );
    run(cases, det, strategy, |((level, k1, k2), s, t)| {
        // shift every random term to degree >= s and read off degree s before and after
        let lift = |v: &[RawTerm]| {
            v.iter()
                .map(|&((a, b), c, z)| ((a + s - 2, b), c, z))
                .collect::<Vec<_>>()
        };
        let f = diagonal_germ(level, k1, k2, 10, &lift(&t.0), &lift(&t.1));
        let nf = poincare_dulac(&f, s + 1).unwrap();
        for j in 0..2 {
            let before = f.component(j).homogeneous_part(s);
            let after = nf.normalized.component(j).homogeneous_part(s);
            for (e, a) in before.terms() {
                if resonant(level, (k1, k2), j, e) {
                    prop_assert_eq!(after.coeff(e), a);
                }
            }
        }
        Ok(())
    })
}

pub type Property = fn(u32, bool) -> Result<(), String>;

/// Every shared property with its name, in the order the suites list them.
pub const ALL: &[(&str, Property)] = &[
    (
        "M | P_M, vanishing off the admissible set, index identity",
        period_divides_dold_index,
    ),
    (
        "conjugation invariance of mu, P_k, O_k",
        conjugation_preserves_indices,
    ),
    (
        "zero order of a composition is the product",
        composition_multiplies_zero_orders,
    ),
    (
        "zero order of a component product is the sum",
        component_product_adds_zero_orders,
    ),
    (
        "unit matrix multiplication preserves zero order",
        unit_matrix_preserves_zero_order,
    ),
    (
        "power substitution scales zero order",
        power_substitution_scales_zero_order,
    ),
    ("Shub-Sullivan index equality", shub_sullivan),
    (
        "Cronin fast path agrees with dual space",
        cronin_agrees_with_dual_space,
    ),
    (
        "index 1 exactly without eigenvalue 1",
        index_is_one_exactly_without_eigenvalue_one,
    ),
    (
        "normal-form iterates stay resonant",
        normal_form_iterates_stay_resonant,
    ),
    (
        "lowest resonant terms survive normalization",
        lowest_resonant_terms_survive,
    ),
];
