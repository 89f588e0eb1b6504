use std::fmt::Display;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Assertion, SuiteId};
use crate::analytic::{
    a_poly, a_poly_derivative, cocycle_check, expm1, factorial_valuation, int, log1p, q_bracket,
    q_from_unit, series1,
};
use crate::error::{Error, Result};
use crate::padic::{vp_int, Constraint, PadicNumber, PrimeContext};
use crate::polygon::unit_disk_zero_count;
use crate::solver::{
    certification_threshold, classify_multiplicity, fixed_points_for_q, linear_coefficient,
    local_q, multiplicity_of, phi1_contains, phi2_contains, q_for_x,
};
use crate::valuation::ValuationQ;

type Outcome = std::result::Result<(), String>;

pub(super) fn run(
    id: SuiteId,
    ctxs: &[PrimeContext],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Assertion>> {
    match id {
        SuiteId::Prop1 => isometry(ctxs, rng),
        SuiteId::Prop2 => local_lift(ctxs, rng),
        SuiteId::Prop3 => fixed_point_counts(ctxs, rng),
        SuiteId::Prop4 => projection_images(ctxs, rng),
        SuiteId::Prop5 => residues_of_fixed_points(ctxs, rng),
        SuiteId::Prop6 => parameter_fiber(ctxs, rng),
        SuiteId::Prop7 => simple_point_scaling(ctxs, rng),
        SuiteId::Prop8 => ternary_scaling(ctxs, rng),
        SuiteId::Prop9 => ternary_witness(ctxs, rng),
        SuiteId::RemarkPhi1 => image_and_integers(ctxs, rng),
        SuiteId::RemarkDerivative => derivative_residues(ctxs, rng),
        SuiteId::Cocycle => cocycle(ctxs, rng),
        SuiteId::Legendre => legendre(ctxs),
    }
}

/// Counts counterexamples of a sampled property.
struct Tally {
    name: String,
    anchor: &'static str,
    total: usize,
    bad: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: impl Into<String>, anchor: &'static str) -> Self {
        Tally {
            name: name.into(),
            anchor,
            total: 0,
            bad: 0,
            first: None,
        }
    }

    fn record(&mut self, outcome: Outcome) {
        self.total += 1;
        if let Err(why) = outcome {
            self.bad += 1;
            self.first.get_or_insert(why);
        }
    }

    fn extend(&mut self, outcomes: impl IntoIterator<Item = Outcome>) {
        for o in outcomes {
            self.record(o);
        }
    }

    fn summary(&self) -> String {
        match &self.first {
            None => format!("0 counterexamples in {} cases", self.total),
            Some(first) => format!(
                "{} counterexamples in {} cases; first: {first}",
                self.bad, self.total
            ),
        }
    }

    fn finish(self) -> Assertion {
        Assertion {
            expected: format!("0 counterexamples in {} cases", self.total.max(1)),
            observed: self.summary(),
            pass: self.bad == 0 && self.total > 0,
            name: self.name,
            anchor: self.anchor.to_string(),
        }
    }

    /// Like `finish`, but an empty tally passes (a conditional law with no instances).
    fn finish_conditional(self, what: &str) -> Assertion {
        if self.total == 0 {
            return Assertion {
                expected: format!("law holds on every {what}"),
                observed: format!("vacuous: no {what} encountered"),
                pass: true,
                name: self.name,
                anchor: self.anchor.to_string(),
            };
        }
        self.finish()
    }
}

fn equal(
    name: impl Into<String>,
    anchor: &'static str,
    expected: impl Display,
    observed: impl Display,
) -> Assertion {
    let expected = expected.to_string();
    let observed = observed.to_string();
    Assertion {
        name: name.into(),
        anchor: anchor.to_string(),
        pass: expected == observed,
        expected,
        observed,
    }
}

fn check(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn par_outcomes<T: Sync>(items: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Vec<Outcome> {
    items.par_iter().map(f).collect()
}

fn label(c: &PrimeContext) -> String {
    format!("p={} e={}", c.p(), c.e())
}

fn find(ctxs: &[PrimeContext], p: u32, e: u32) -> Option<&PrimeContext> {
    ctxs.iter().find(|c| c.p() == p && c.e() == e)
}

/// Smallest `s` (pi-units) with `s/e > 1/(p-1)`.
fn s_min(c: &PrimeContext) -> i64 {
    c.e() as i64 / (c.p() as i64 - 1) + 1
}

fn random_q(c: &PrimeContext, rng: &mut ChaCha8Rng) -> PadicNumber {
    let s = s_min(c) + rng.gen_range(0..3);
    q_from_unit(&PadicNumber::sample(c, Constraint::Unit, rng), s)
}

fn near(c: &PrimeContext, x: &PadicNumber, v: i64, rng: &mut ChaCha8Rng) -> PadicNumber {
    x + &PadicNumber::sample(c, Constraint::Valuation(v), rng)
}

fn units(a: &PadicNumber) -> std::result::Result<i64, String> {
    a.val_units()
        .ok_or_else(|| format!("zero at precision {}", a.prec()))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn v_a(x: &PadicNumber) -> i64 {
    a_poly(x.ctx().p() as usize - 2, x).val_lower_units()
}

fn q_frac(c: &PrimeContext, units: i64) -> ValuationQ {
    ValuationQ::from_units(units, c.e())
}

// -- isometry --------------------------------------------------------------

fn isometry(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let samples: Vec<_> = (0..200)
            .map(|_| {
                let x = PadicNumber::sample(c, Constraint::Integral, rng);
                let v = rng.gen_range(0..=4 * c.e() as i64);
                (x.clone(), near(c, &x, v, rng), random_q(c, rng))
            })
            .collect();
        let mut t = Tally::new(
            format!("v([x]_q - [x']_q) = v(x - x') at {}", label(c)),
            "prop1 isometry",
        );
        t.extend(par_outcomes(&samples, |(x, x2, q)| {
            let lhs = q_bracket(x, q).and_then(|a| a.try_sub(&q_bracket(x2, q)?));
            let lhs = units(&lhs.map_err(err)?)?;
            let rhs = units(&x.try_sub(x2).map_err(err)?)?;
            check(lhs == rhs, || {
                format!("x={x} x'={x2} q={q}: {lhs} vs {rhs}")
            })
        }));
        out.push(t.finish());
    }
    Ok(out)
}

// -- local lifts of the implicit function ------------------------------------

fn local_lift(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let p = c.p() as usize;
        let thr = certification_threshold(c);
        let xs: Vec<_> = (0..10)
            .map(|_| PadicNumber::sample(c, Constraint::Residue(rng.gen_range(0..2)), rng))
            .collect();
        let mut exists = Tally::new(
            format!("certified lift exists at {}", label(c)),
            "prop2 implicit q(x)",
        );
        let mut size = Tally::new(
            format!(
                "fiber over x has p-2 points with multiplicity at {}",
                label(c)
            ),
            "prop2 implicit q(x)",
        );
        let mut agree = Tally::new(
            format!("local lift agrees with the direct solve at {}", label(c)),
            "prop2 implicit q(x)",
        );
        let fibers: Vec<_> = xs.par_iter().map(q_for_x).collect();
        for (x, fib) in xs.iter().zip(fibers) {
            let fib = match fib {
                Ok(f) => f,
                Err(e) => {
                    exists.record(Err(format!("x={x}: {e}")));
                    continue;
                }
            };
            exists.record(check(
                !fib.records.is_empty() && fib.records.iter().all(|r| r.certified_to >= thr),
                || format!("x={x}: {} records", fib.records.len()),
            ));
            size.record(check(
                fib.predicted == p - 2 && fib.records.len() + fib.deficit == p - 2,
                || {
                    format!(
                        "x={x}: predicted {} found {}",
                        fib.predicted,
                        fib.records.len()
                    )
                },
            ));
            let Some(r) = fib.records.first() else {
                continue;
            };
            let base = v_a(x);
            let moves: Vec<_> = (0..3)
                .map(|_| near(c, x, base + rng.gen_range(1..=4), rng))
                .collect();
            agree.extend(par_outcomes(&moves, |x2| {
                let q2 = local_q(x, &r.q, x2).map_err(err)?;
                let s = r.m0.to_units(c.e()).unwrap();
                check(q2.try_sub(&r.q).map_err(err)?.val_lower_units() > s, || {
                    format!("x'={x2}: q' left the ball around q")
                })?;
                let direct = q_for_x(x2).map_err(err)?;
                check(
                    direct
                        .records
                        .iter()
                        .any(|d| d.q.equals_to_precision(&q2, thr)),
                    || format!("x'={x2}: q'={q2} not among the direct solutions"),
                )
            }));
        }
        out.extend([exists.finish(), size.finish(), agree.finish()]);
    }
    Ok(out)
}

// -- counts of nontrivial fixed points ---------------------------------------

fn fixed_point_counts(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    // (p, e) -> (v(q - 1) in pi-units, expected nontrivial zeros)
    const TABLE: [(u32, u32, i64, usize); 5] = [
        (2, 1, 2, 0),
        (3, 1, 1, 1),
        (5, 3, 1, 3),
        (7, 5, 1, 5),
        (5, 5, 2, 0),
    ];
    let mut out = Vec::new();
    for c in ctxs {
        let &(_, _, s, expected) = TABLE
            .iter()
            .find(|t| t.0 == c.p() && t.1 == c.e())
            .expect("resolved from defaults");
        let m0 = q_frac(c, s);
        let q = q_from_unit(&PadicNumber::sample(c, Constraint::Unit, rng), s);
        let series = series1(&PadicNumber::zero(c), &q, None)?;
        let observed = match unit_disk_zero_count(&series) {
            Ok(n) => (n as i64 - 2).to_string(),
            Err(e) => e.to_string(),
        };
        out.push(equal(
            format!("nontrivial zeros of [X]_q - X at {} m0={m0}", label(c)),
            "prop3 degree",
            expected,
            &observed,
        ));

        let mut digits = Tally::new(
            format!("v(c_n) = (n-1)m0 - v(n!) at {} m0={m0}", label(c)),
            "prop3 coefficient valuations",
        );
        for n in 2..=(c.p() as usize + 2).min(series.coeffs.len() - 1) {
            let formula = m0 * (n as i64 - 1) - factorial_valuation(n as u64, c.p());
            let got = series.coeffs[n].valuation();
            digits.record(check(got.finite() == Some(formula), || {
                format!("n={n}: {got} vs {formula}")
            }));
        }
        out.push(digits.finish());

        let fib = fixed_points_for_q(&q)?;
        let observed = format!("{} found + {} deficit", fib.records.len(), fib.deficit);
        out.push(Assertion {
            name: format!("solver count matches the polygon at {} m0={m0}", label(c)),
            anchor: "prop3 degree".into(),
            expected: format!("{expected} in total"),
            pass: fib.records.len() + fib.deficit == expected,
            observed,
        });
    }
    Ok(out)
}

// -- images of the two projections ------------------------------------------

fn projection_images(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut agree_x = Tally::new("x in image iff a fiber over x exists", "prop4 image of x");
    let mut identity = Tally::new(
        "v(A_(p-2)(x)) = 1 - (p-2) m0 on every record",
        "prop4 valuation identity",
    );
    let mut agree_m = Tally::new("m0 in image iff fixed points exist", "prop4 image of q-1");
    for c in ctxs {
        let p = c.p();
        match (p, c.e()) {
            (3, 1) | (5, 3) => {
                let xs: Vec<_> = (0..25)
                    .map(|_| PadicNumber::sample(c, Constraint::Integral, rng))
                    .collect();
                let results: Vec<_> = xs.par_iter().map(q_for_x).collect();
                for (x, fib) in xs.iter().zip(results) {
                    let exists = match &fib {
                        Ok(f) => !f.records.is_empty(),
                        Err(Error::NotInImage(_)) => false,
                        Err(e) => {
                            agree_x.record(Err(format!("x={x}: {e}")));
                            continue;
                        }
                    };
                    agree_x.record(check(phi1_contains(x) == exists, || {
                        format!("x={x}: membership {} vs fiber {exists}", phi1_contains(x))
                    }));
                    for r in fib.iter().flat_map(|f| f.records.iter()) {
                        let lhs = a_poly(p as usize - 2, &r.x).valuation();
                        let rhs = ValuationQ::integer(1) - r.m0 * (p as i64 - 2);
                        identity.record(check(lhs.finite() == Some(rhs), || {
                            format!("x={}: {lhs} vs {rhs}", r.x)
                        }));
                    }
                }
            }
            _ => {
                let max_a = c.e() as i64 * 3 / (p as i64 - 2).max(1) + 1;
                let samples: Vec<_> = (0..17)
                    .map(|_| {
                        let a = rng.gen_range(1..=max_a);
                        (a, PadicNumber::sample(c, Constraint::Unit, rng))
                    })
                    .collect();
                agree_m.extend(par_outcomes(&samples, |(a, u)| {
                    let m0 = q_frac(c, *a);
                    let q = q_from_unit(u, *a);
                    let exists = if m0 <= ValuationQ::s_radius(p) {
                        false
                    } else {
                        let s = series1(&PadicNumber::zero(c), &q, None).map_err(err)?;
                        unit_disk_zero_count(&s).map_err(err)? > 2
                    };
                    check(phi2_contains(p, m0) == exists, || {
                        format!(
                            "m0={m0}: membership {} vs zeros {exists}",
                            phi2_contains(p, m0)
                        )
                    })
                }));
            }
        }
    }
    Ok(vec![agree_x.finish(), identity.finish(), agree_m.finish()])
}

// -- residues of fixed points -------------------------------------------------

fn residues_of_fixed_points(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    if let Some(c) = find(ctxs, 5, 10) {
        let us: Vec<_> = (0..10)
            .map(|_| PadicNumber::sample(c, Constraint::Unit, rng))
            .collect();
        let mut t = Tally::new(
            "residues of fixed points are exactly {2,3,4} at m0=3/10",
            "prop5 interior residues",
        );
        t.extend(par_outcomes(&us, |u| {
            let fib = fixed_points_for_q(&q_from_unit(u, 3)).map_err(err)?;
            let mut res: Vec<u32> = fib.records.iter().map(|r| r.residue_x).collect();
            res.sort_unstable();
            check(res == [2, 3, 4], || format!("u={u}: residues {res:?}"))
        }));
        out.push(t.finish());
    }
    if let Some(c) = find(ctxs, 5, 3) {
        let us: Vec<_> = (0..10)
            .map(|_| PadicNumber::sample(c, Constraint::Unit, rng))
            .collect();
        let fibers: Vec<_> = us
            .par_iter()
            .map(|u| fixed_points_for_q(&q_from_unit(u, 1)))
            .collect();
        let mut avoid = Tally::new(
            "no fixed point has residue in {2,3,4} at m0=1/3",
            "prop5 boundary residues",
        );
        let mut count = Tally::new(
            "polygon predicts p-2 zeros with multiplicity at m0=1/3",
            "prop5 boundary residues",
        );
        for (u, fib) in us.iter().zip(fibers) {
            let fib = match fib {
                Ok(f) => f,
                Err(e) => {
                    avoid.record(Err(format!("u={u}: {e}")));
                    continue;
                }
            };
            avoid.record(check(fib.records.iter().all(|r| r.residue_x < 2), || {
                format!(
                    "u={u}: residues {:?}",
                    fib.records.iter().map(|r| r.residue_x).collect::<Vec<_>>()
                )
            }));
            count.record(check(fib.predicted == 3, || {
                format!("u={u}: predicted {}", fib.predicted)
            }));
        }
        out.extend([avoid.finish(), count.finish()]);
    }
    Ok(out)
}

// -- the fiber over x and local uniqueness -----------------------------------

fn uniqueness_law(x: &PadicNumber, q: &PadicNumber, x2: &PadicNumber) -> Outcome {
    let c = x.ctx();
    let q2 = local_q(x, q, x2).map_err(err)?;
    let lhs = q2.try_sub(q).map_err(err)?;
    let one = PadicNumber::one(c);
    let rhs = q_bracket(x2, q)
        .and_then(|b| b.try_sub(x2)?.div(&(x2 * &x2.try_sub(&one)?)))
        .map_err(err)?;
    check(
        lhs.val_units() == rhs.val_units() && lhs.val_units().is_some(),
        || {
            format!(
                "x'={x2}: v(q'-q)={} vs {}",
                lhs.valuation(),
                rhs.valuation()
            )
        },
    )
}

fn parameter_fiber(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let p = c.p() as usize;
        let thr = certification_threshold(c);
        let named = match c.p() {
            3 => PadicNumber::from_rational(c, -1, 2)?,
            _ => int(c, 5),
        };
        let mut xs = vec![(named, 50)];
        for _ in 0..3 {
            let r = rng.gen_range(0..2);
            xs.push((PadicNumber::sample(c, Constraint::Residue(r), rng), 10));
        }
        let mut predicted = Tally::new(
            format!(
                "fiber over x has p-2 points with multiplicity at {}",
                label(c)
            ),
            "prop6 fiber size",
        );
        let mut distinct = Tally::new(
            format!("residues of u are pairwise distinct at {}", label(c)),
            "prop6 distinct residues",
        );
        let mut certified = Tally::new(
            format!("records certified at {}", label(c)),
            "prop6 fiber size",
        );
        let mut law = Tally::new(
            format!("v(q'-q) = v(([x']_q - x')/(x'(x'-1))) at {}", label(c)),
            "prop6 local uniqueness",
        );
        for (x, n) in xs {
            let fib = match q_for_x(&x) {
                Ok(f) => f,
                Err(e) => {
                    predicted.record(Err(format!("x={x}: {e}")));
                    continue;
                }
            };
            predicted.record(check(
                fib.predicted == p - 2 && fib.records.len() + fib.deficit == p - 2,
                || {
                    format!(
                        "x={x}: predicted {} found {}",
                        fib.predicted,
                        fib.records.len()
                    )
                },
            ));
            let mut res: Vec<u32> = fib.records.iter().map(|r| r.residue_u).collect();
            res.sort_unstable();
            res.dedup();
            distinct.record(check(res.len() == fib.records.len(), || {
                format!("x={x}: residues {res:?}")
            }));
            for r in &fib.records {
                certified.record(check(r.certified_to >= thr, || {
                    format!("x={x}: certified to {}", r.certified_to)
                }));
                let base = v_a(&x);
                let moves: Vec<_> = (0..n)
                    .map(|_| near(c, &x, base + rng.gen_range(1..=6), rng))
                    .collect();
                law.extend(par_outcomes(&moves, |x2| uniqueness_law(&x, &r.q, x2)));
            }
        }
        out.extend([
            predicted.finish(),
            distinct.finish(),
            certified.finish(),
            law.finish(),
        ]);
    }
    Ok(out)
}

// -- scaling at simple points -------------------------------------------------

/// `b_1 = c_1 / (x (x - 1))`, the linear coefficient of the deflated bracket at a fixed point.
fn deflated_slope(x: &PadicNumber, q: &PadicNumber) -> Result<PadicNumber> {
    let one = PadicNumber::one(x.ctx());
    linear_coefficient(x, q)?.div(&(x * &x.try_sub(&one)?))
}

fn simple_point_scaling(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let (x, q, steps): (PadicNumber, PadicNumber, Vec<i64>) = match c.p() {
            3 => (
                PadicNumber::from_rational(c, -1, 2)?,
                int(c, 4),
                vec![2, 3, 5],
            ),
            _ => {
                let x = int(c, 5);
                let fib = q_for_x(&x)?;
                let Some(r) = fib.records.first() else {
                    out.push(equal(
                        "fiber over 5 is nonempty",
                        "prop7 simple scaling",
                        "nonempty",
                        "empty",
                    ));
                    continue;
                };
                (x, r.q.clone(), vec![1, 2, 4])
            }
        };
        out.push(equal(
            format!("multiplicity of x={x} at {}", label(c)),
            "prop7 multiplicity",
            1,
            multiplicity_of(&x, &q)?,
        ));
        let b1 = units(&deflated_slope(&x, &q)?).map_err(Error::Uncertified)?;
        for k in steps {
            let moves: Vec<_> = (0..50).map(|_| near(c, &x, k, rng)).collect();
            let mut t = Tally::new(
                format!(
                    "v(q'-q) - v(x'-x) = v(b_1) = {} at v(x'-x)={} ({})",
                    q_frac(c, b1),
                    q_frac(c, k),
                    label(c)
                ),
                "prop7 simple scaling",
            );
            t.extend(par_outcomes(&moves, |x2| {
                let q2 = local_q(&x, &q, x2).map_err(err)?;
                let d = units(&q2.try_sub(&q).map_err(err)?)?;
                check(d - k == b1, || {
                    format!("x'={x2}: offset {}", q_frac(c, d - k))
                })
            }));
            out.push(t.finish());
        }
    }
    // (X - 3)^2 (X - 4): derivative 0 at the double root, unit at the simple one
    let c = PrimeContext::new(5, 1, 20)?;
    let deriv = |a: i64| {
        let x = int(&c, a);
        let u = &x - &int(&c, 3);
        let w = &x - &int(&c, 4);
        &(&u * &u) + &(&u * &w).mul_small(2)
    };
    out.push(equal(
        "classifier on a synthetic double root",
        "prop7 multiplicity",
        2,
        classify_multiplicity(&deriv(3), certification_threshold(&c)),
    ));
    out.push(equal(
        "classifier on a synthetic simple root",
        "prop7 multiplicity",
        1,
        classify_multiplicity(&deriv(4), certification_threshold(&c)),
    ));
    Ok(out)
}

// -- the ternary scaling law and double points --------------------------------

fn ternary_scaling(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let thr = certification_threshold(c);
        let xs: Vec<_> = (0..10)
            .map(|_| PadicNumber::sample(c, Constraint::Residue(rng.gen_range(0..2)), rng))
            .collect();
        let fibers: Vec<_> = xs.par_iter().map(q_for_x).collect();
        if c.p() == 3 {
            let mut law = Tally::new("v(q'-q) = v(x'-x) + 2m0 - 1", "prop8 ternary scaling");
            let mut onto = Tally::new(
                "every q' in B(q, |q-1|) has its x' in B(x, |x-2|)",
                "prop8 ternary surjectivity",
            );
            for (x, fib) in xs.iter().zip(fibers) {
                let r = match fib.map_err(err).and_then(|f| {
                    f.records
                        .into_iter()
                        .next()
                        .ok_or_else(|| format!("x={x}: empty fiber"))
                }) {
                    Ok(r) => r,
                    Err(e) => {
                        law.record(Err(e));
                        continue;
                    }
                };
                let base = v_a(x);
                let s = r.m0.to_units(c.e()).unwrap();
                let shift = 2 * s - c.e() as i64;
                let moves: Vec<_> = (0..10)
                    .map(|_| near(c, x, base + rng.gen_range(1..=5), rng))
                    .collect();
                law.extend(par_outcomes(&moves, |x2| {
                    let q2 = local_q(x, &r.q, x2).map_err(err)?;
                    let dq = units(&q2.try_sub(&r.q).map_err(err)?)?;
                    let dx = units(&x2.try_sub(x).map_err(err)?)?;
                    check(dq == dx + shift, || {
                        format!("x'={x2}: {dq} vs {dx} + {shift}")
                    })
                }));
                let targets: Vec<_> = (0..10)
                    .map(|_| near(c, &r.q, s + rng.gen_range(1..=4), rng))
                    .collect();
                onto.extend(par_outcomes(&targets, |q2| {
                    let fib = fixed_points_for_q(q2).map_err(err)?;
                    let dq = units(&q2.try_sub(&r.q).map_err(err)?)?;
                    let hit = fib.records.iter().any(|rec| {
                        rec.certified_to >= thr
                            && rec.x.try_sub(x).ok().and_then(|d| d.val_units()) == Some(dq - shift)
                            && dq - shift > base
                    });
                    check(hit, || {
                        format!("q'={q2}: no fixed point at the predicted distance")
                    })
                }));
            }
            out.extend([law.finish(), onto.finish()]);
        } else {
            let p = c.p() as i64;
            let mut doubles = Tally::new(
                "v(A'_(p-2)(x)) = 1 - (p-3) m0 at double points",
                "prop8 double points",
            );
            let mut seen = 0;
            for fib in fibers.into_iter().flatten() {
                for r in fib.records {
                    seen += 1;
                    if r.multiplicity != 2 {
                        continue;
                    }
                    let lhs = a_poly_derivative(p as usize - 2, &r.x).valuation();
                    let rhs = ValuationQ::integer(1) - r.m0 * (p - 3);
                    doubles.record(check(lhs.finite() == Some(rhs), || {
                        format!("x={}: {lhs} vs {rhs}", r.x)
                    }));
                }
            }
            let mut a = doubles.finish_conditional("double point");
            a.observed = format!("{} ({seen} records inspected)", a.observed);
            out.push(a);
        }
    }
    Ok(out)
}

// -- the ternary witness ------------------------------------------------------

fn ternary_witness(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let c = &ctxs[0];
    let k = c.k();
    let thr = certification_threshold(c);
    let mut out = Vec::new();
    let q = int(c, 4);
    let half = PadicNumber::from_rational(c, -1, 2)?;
    let fib = fixed_points_for_q(&q)?;
    out.push(equal(
        "one nontrivial fixed point for q=4",
        "prop9 witness",
        1,
        fib.records.len(),
    ));
    let Some(r) = fib.records.first() else {
        return Ok(out);
    };
    let close = r.x.try_sub(&half)?;
    out.push(Assertion {
        name: "fixed point agrees with -1/2".into(),
        anchor: "prop9 witness".into(),
        expected: format!("v(x + 1/2) >= {}", k - 10),
        observed: format!("v(x + 1/2) {}", close.valuation()),
        pass: close.val_lower_units() >= k - 10,
    });
    out.push(Assertion {
        name: "fixed point is certified".into(),
        anchor: "prop9 witness".into(),
        expected: format!("v([x]_4 - x) >= {thr}"),
        observed: format!("v([x]_4 - x) >= {}", r.certified_to),
        pass: r.certified_to >= thr,
    });

    let moves: Vec<_> = (0..50)
        .map(|_| near(c, &r.x, rng.gen_range(1..=5), rng))
        .collect();
    let mut contraction = Tally::new("|q'-q| = |x'-x|/3 around -1/2", "prop9 contraction");
    contraction.extend(par_outcomes(&moves, |x2| {
        let q2 = local_q(&r.x, &q, x2).map_err(err)?;
        let dq = units(&q2.try_sub(&q).map_err(err)?)?;
        let dx = units(&x2.try_sub(&r.x).map_err(err)?)?;
        check(dq == dx + 1, || format!("x'={x2}: {dq} vs {dx} + 1"))
    }));
    out.push(contraction.finish());

    // (residue of x, center of the image ball of q, residue of u)
    for (res_x, center, res_u) in [(1u32, 4i64, 1u32), (0, 7, 2)] {
        let xs: Vec<_> = (0..50)
            .map(|_| PadicNumber::sample(c, Constraint::Residue(res_x), rng))
            .collect();
        let mut image = Tally::new(
            format!("B({res_x},1) maps into B({center},1/3)"),
            "prop9 ball images",
        );
        image.extend(par_outcomes(&xs, |x| {
            let fib = q_for_x(x).map_err(err)?;
            check(
                fib.records.len() == 1
                    && fib.records[0]
                        .q
                        .try_sub(&int(c, center))
                        .is_ok_and(|d| d.val_lower_units() > 1)
                    && fib.records[0].residue_u == res_u,
                || format!("x={x}: {} records", fib.records.len()),
            )
        }));
        out.push(image.finish());

        let pairs: Vec<_> = (0..10)
            .map(|_| {
                let x = PadicNumber::sample(c, Constraint::Residue(res_x), rng);
                let v = rng.gen_range(1..=5);
                (x.clone(), near(c, &x, v, rng))
            })
            .collect();
        let mut iso = Tally::new(
            format!("x -> u is an isometry on B({res_x},1)"),
            "prop9 ball images",
        );
        iso.extend(par_outcomes(&pairs, |(x, x2)| {
            let u = &q_for_x(x).map_err(err)?.records[0].u;
            let u2 = &q_for_x(x2).map_err(err)?.records[0].u;
            let du = units(&u2.try_sub(u).map_err(err)?)?;
            let dx = units(&x2.try_sub(x).map_err(err)?)?;
            check(du == dx, || format!("x={x} x'={x2}: {du} vs {dx}"))
        }));
        out.push(iso.finish());

        let targets: Vec<_> = (0..20)
            .map(|_| {
                &int(c, center) + &PadicNumber::sample(c, Constraint::Integral, rng).mul_pi_pow(2)
            })
            .collect();
        let mut onto = Tally::new(
            format!("every q' in B({center},1/3) has a fixed point in B({res_x},1)"),
            "prop9 ball images",
        );
        onto.extend(par_outcomes(&targets, |q2| {
            let fib = fixed_points_for_q(q2).map_err(err)?;
            check(
                fib.records.len() == 1 && fib.records[0].residue_x == res_x,
                || format!("q'={q2}: {} records", fib.records.len()),
            )
        }));
        out.push(onto.finish());
    }

    let mut integral = Tally::new(
        "an integral admissible m0 exists only for p=3",
        "prop9 integral points",
    );
    for p in [2u32, 3, 5, 7, 11, 13] {
        let any = (1..=3).any(|m| phi2_contains(p, ValuationQ::integer(m)));
        integral.record(check(any == (p == 3), || format!("p={p}: {any}")));
    }
    out.push(integral.finish());
    Ok(out)
}

// -- image of the first projection and integer non-fixedness -------------------

fn image_and_integers(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    let mut ints = Tally::new(
        "no integer n in 2..=25 with n mod p not in {0,1} is fixed",
        "remark integers are not fixed",
    );
    for c in ctxs {
        let p = c.p() as i64;
        if c.e() as i64 >= 2 * (p - 1) {
            // union of balls: every class outside {2..p-1}, and the annuli 0 < v(x - a) < 1/(p-1)
            let mut t = Tally::new(
                format!("membership matches the union of balls at {}", label(c)),
                "remark image of x",
            );
            for _ in 0..100 {
                let a = rng.gen_range(0..p);
                let k = rng.gen_range(1..=6);
                let x = near(c, &int(c, a), k, rng);
                let expect = a < 2 || q_frac(c, k) < ValuationQ::s_radius(c.p());
                t.record(check(phi1_contains(&x) == expect, || {
                    format!("x={x}: expected {expect}")
                }));
            }
            out.push(t.finish());
            continue;
        }
        let thr = certification_threshold(c);
        let s = s_min(c);
        let qs: Vec<_> = (0..50)
            .map(|_| q_from_unit(&PadicNumber::sample(c, Constraint::Unit, rng), s))
            .collect();
        ints.extend(
            qs.par_iter()
                .flat_map_iter(|q| {
                    let y = q - &PadicNumber::one(c);
                    let l = log1p(&y);
                    (2..=25i64).filter(|n| n % p > 1).map(move |n| {
                        let l = l.clone().map_err(err)?;
                        let n_pad = int(c, n);
                        let bracket = expm1(&(&n_pad * &l)).and_then(|z| z.div(&y)).map_err(err)?;
                        let d = bracket.try_sub(&n_pad).map_err(err)?;
                        check(!d.is_zero() && d.val_lower_units() < thr, || {
                            format!("n={n} q={q}: v([n]_q - n) {}", d.valuation())
                        })
                    })
                })
                .collect::<Vec<_>>(),
        );
    }
    out.push(ints.finish());
    Ok(out)
}

// -- the derivative of A_(p-2) on residues ------------------------------------

fn derivative_residues(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let p = c.p();
        if p < 5 {
            return Err(Error::IncompatibleContext {
                suite: SuiteId::RemarkDerivative.to_string(),
                reason: format!("needs p >= 5, got {p}"),
            });
        }
        let n = p as usize - 2;
        let mut poly = Tally::new(
            format!("A_(p-2)(a) = 1 + a + ... + a^(p-2) mod p at {}", label(c)),
            "remark derivative on residues",
        );
        let mut deriv = Tally::new(
            format!("A'_(p-2) is a unit on Z_p-residues at {}", label(c)),
            "remark derivative on residues",
        );
        for a in 0..p as u64 {
            let x = int(c, a as i64);
            let geometric = (0..=n as u32).map(|i| a.pow(i)).sum::<u64>() % p as u64;
            let r = a_poly(n, &x).residue()?;
            poly.record(check(r as u64 == geometric, || {
                format!("a={a}: {r} vs {geometric}")
            }));
            let d = a_poly_derivative(n, &x);
            deriv.record(check(d.is_unit(), || {
                format!("a={a}: v = {}", d.valuation())
            }));
        }
        for _ in 0..20 {
            let x = PadicNumber::sample(c, Constraint::Integral, rng);
            let d = a_poly_derivative(n, &x);
            deriv.record(check(d.is_unit(), || {
                format!("x={x}: v = {}", d.valuation())
            }));
        }
        out.extend([poly.finish(), deriv.finish()]);

        // records exist in this context only when some admissible m0 is a multiple of 1/e
        let admissible = (1..=c.e() as i64).any(|s| phi2_contains(p, q_frac(c, s)));
        if admissible {
            let xs: Vec<_> = (0..5)
                .map(|_| PadicNumber::sample(c, Constraint::Residue(rng.gen_range(0..2)), rng))
                .collect();
            let mut simple = Tally::new(
                format!("fixed points are simple at {}", label(c)),
                "remark no double points",
            );
            simple.extend(par_outcomes(&xs, |x| {
                let fib = match q_for_x(x) {
                    Ok(f) => f,
                    Err(Error::NotRepresentable { .. }) => return Ok(()),
                    Err(e) => return Err(e.to_string()),
                };
                check(
                    !fib.records.is_empty() && fib.records.iter().all(|r| r.multiplicity == 1),
                    || {
                        format!(
                            "x={x}: multiplicities {:?}",
                            fib.records
                                .iter()
                                .map(|r| r.multiplicity)
                                .collect::<Vec<_>>()
                        )
                    },
                )
            }));
            out.push(simple.finish());
        }
    }
    Ok(out)
}

// -- cocycle identity ---------------------------------------------------------

fn cocycle(ctxs: &[PrimeContext], rng: &mut ChaCha8Rng) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let samples: Vec<_> = (0..50)
            .map(|_| {
                (
                    PadicNumber::sample(c, Constraint::Integral, rng),
                    PadicNumber::sample(c, Constraint::Integral, rng),
                    random_q(c, rng),
                )
            })
            .collect();
        let mut t = Tally::new(
            format!("[x+x']_q = [x]_q + q^x [x']_q at {}", label(c)),
            "cocycle identity",
        );
        t.extend(par_outcomes(&samples, |(x, x2, q)| {
            let ok = cocycle_check(x, x2, q).map_err(err)?;
            check(ok, || format!("x={x} x'={x2} q={q}"))
        }));
        out.push(t.finish());
    }
    Ok(out)
}

// -- factorial valuations -----------------------------------------------------

fn legendre(ctxs: &[PrimeContext]) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for c in ctxs {
        let p = c.p();
        let mut t = Tally::new(
            format!("v(n!) = (n - s_p(n))/(p-1) for n <= 300, p={p}"),
            "digit-sum factorial valuation",
        );
        let mut fact = BigInt::from(1);
        for n in 0..=300u64 {
            if n > 0 {
                fact *= n;
            }
            let direct = vp_int(&fact, p);
            let mut digits = 0;
            let mut m = n;
            while m > 0 {
                digits += m % p as u64;
                m /= p as u64;
            }
            let formula = ValuationQ::new((n - digits) as i64, p as i64 - 1);
            let library = factorial_valuation(n, p);
            t.record(check(
                formula == ValuationQ::integer(direct) && library == formula,
                || format!("n={n}: direct {direct}, formula {formula}, library {library}"),
            ));
        }
        out.push(t.finish());
    }
    Ok(out)
}
