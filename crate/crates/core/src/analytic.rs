//! Logarithm and exponential on S, the q-bracket, the polynomials `A_n`, and rigorously
//! truncated expansions of `[X]_q - X` around a point in X and of the deflated bracket in U.

use std::cmp::min;

use crate::error::{Error, Result};
use crate::padic::{ceil_div, PadicNumber, PrimeContext};
use crate::valuation::ValuationQ;

/// `y` is zero-flagged or `v(y) > 1/(p-1)`.
pub fn in_s(y: &PadicNumber) -> bool {
    match y.val_units() {
        None => true,
        Some(v) => v * (y.ctx().p() as i64 - 1) > y.ctx().e() as i64,
    }
}

/// Number of terms `N` such that every omitted term of index `n > N` of a series whose n-th term
/// has valuation at least `v + (n-1)(v - 1/(p-1))` (pi-units `v`) reaches `target`.
/// Returns `(N, bound at N + 1)` with the bound rounded down to whole pi-units.
fn linear_terms(ctx: &PrimeContext, v: i64, target: i64) -> (usize, i64) {
    let p1 = ctx.p() as i64 - 1;
    let e = ctx.e() as i64;
    let slope_num = v * p1 - e; // slope = slope_num / p1 per term
    debug_assert!(slope_num > 0);
    let need = target - v;
    let n = if need <= 0 {
        1
    } else {
        ceil_div(need * p1, slope_num).max(1)
    };
    // omitted terms start at n + 1, bound = v + n * slope
    let bound = v + (n * slope_num) / p1;
    (n as usize, bound)
}

/// `log(1 + y) = sum_{n>=1} (-1)^(n+1) y^n / n` for `y` in S.
pub fn log1p(y: &PadicNumber) -> Result<PadicNumber> {
    if !in_s(y) {
        return Err(Error::OutsideS {
            what: "log argument",
        });
    }
    let Some(v) = y.val_units() else {
        return Ok(y.clone());
    };
    let (terms, tail) = linear_terms(y.ctx(), v, y.prec());
    let mut power = y.clone();
    let mut sum = y.clone();
    for n in 2..=terms as i64 {
        power = &power * y;
        let term = power.div_small(n)?;
        sum = if n % 2 == 0 {
            &sum - &term
        } else {
            &sum + &term
        };
    }
    Ok(sum.with_prec(min(sum.prec(), tail)))
}

/// `exp(z) - 1 = sum_{n>=1} z^n / n!` for `z` in S.
pub fn expm1(z: &PadicNumber) -> Result<PadicNumber> {
    if !in_s(z) {
        return Err(Error::OutsideS {
            what: "exp argument",
        });
    }
    let Some(v) = z.val_units() else {
        return Ok(z.clone());
    };
    let (terms, tail) = linear_terms(z.ctx(), v, z.prec());
    let mut term = z.clone();
    let mut sum = z.clone();
    for n in 2..=terms as i64 {
        term = (&term * z).div_small(n)?;
        sum = &sum + &term;
    }
    Ok(sum.with_prec(min(sum.prec(), tail)))
}

/// `exp(z) = sum_{n>=0} z^n / n!` for `z` in S.
pub fn exp(z: &PadicNumber) -> Result<PadicNumber> {
    let m = expm1(z)?;
    let one = PadicNumber::one_with_prec(z.ctx(), m.prec());
    Ok(&one + &m)
}

fn require_integral(x: &PadicNumber, what: &'static str) -> Result<()> {
    if x.is_integral() {
        Ok(())
    } else {
        Err(Error::OutsideUnitDisk { what })
    }
}

/// `q^x = exp(x log q)` for `x` in the unit disk and `q` in `1 + S`.
pub fn q_pow(x: &PadicNumber, q: &PadicNumber) -> Result<PadicNumber> {
    require_integral(x, "exponent x")?;
    let y = q - &PadicNumber::one(q.ctx());
    let l = log1p(&y)?;
    exp(&(x * &l))
}

/// `[x]_q = (q^x - 1)/(q - 1)`, and `x` itself when `q - 1` is zero-flagged.
pub fn q_bracket(x: &PadicNumber, q: &PadicNumber) -> Result<PadicNumber> {
    require_integral(x, "x")?;
    let y = q - &PadicNumber::one(q.ctx());
    if !in_s(&y) {
        return Err(Error::OutsideS { what: "q - 1" });
    }
    if y.is_zero() {
        return Ok(x.clone());
    }
    let l = log1p(&y)?;
    expm1(&(x * &l))?.div(&y)
}

/// `A_n(x) = (x - 2)(x - 3)...(x - (n + 1))`, `A_0 = 1`.
pub fn a_poly(n: usize, x: &PadicNumber) -> PadicNumber {
    let ctx = x.ctx();
    let mut acc = PadicNumber::one(ctx);
    for i in 2..=(n as i64 + 1) {
        acc = &acc * &(x - &PadicNumber::from_int(ctx, i));
    }
    acc
}

/// Derivative `A_n'(x)`.
pub fn a_poly_derivative(n: usize, x: &PadicNumber) -> PadicNumber {
    let ctx = x.ctx();
    let mut value = PadicNumber::one(ctx);
    let mut deriv = PadicNumber::zero(ctx);
    for i in 2..=(n as i64 + 1) {
        let factor = x - &PadicNumber::from_int(ctx, i);
        deriv = &(&deriv * &factor) + &value;
        value = &value * &factor;
    }
    deriv
}

/// Sum of the base-p digits of `n`.
pub fn digit_sum(mut n: u64, p: u32) -> u64 {
    let p = p as u64;
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v(n!) = (n - s_p(n)) / (p - 1)`.
pub fn factorial_valuation(n: u64, p: u32) -> ValuationQ {
    ValuationQ::new((n - digit_sum(n, p)) as i64, p as i64 - 1)
}

/// Finite expansion `sum_n coeffs[n] (X - center)^n` with a proven bound on what was dropped.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub center: PadicNumber,
    pub coeffs: Vec<PadicNumber>,
    /// Lower bound on `v(c_n) + n * radius` over all omitted indices `n`.
    pub tail_bound: ValuationQ,
    /// Declared evaluation radius as a valuation: valid for `v(X - center) >= radius`.
    pub radius: ValuationQ,
}

impl TruncatedSeries {
    pub fn ctx(&self) -> &PrimeContext {
        self.center.ctx()
    }

    /// Evaluates at `z` with `v(z - center) >= radius`; the result's precision never exceeds the
    /// tail bound.
    pub fn evaluate(&self, z: &PadicNumber) -> Result<PadicNumber> {
        let e = self.ctx().e();
        let t = z.try_sub(&self.center)?;
        if ValuationQ::from_units(t.val_lower_units(), e) < self.radius {
            return Err(Error::OutsideUnitDisk {
                what: "evaluation point (relative to the series radius)",
            });
        }
        let mut acc = PadicNumber::zero_with_prec(self.ctx(), i64::MAX / 4);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &t) + c;
        }
        let cap = self.tail_bound.floor_units(e);
        Ok(acc.with_prec(min(acc.prec(), cap)))
    }

    /// Valuations `v(c_n) + n * radius` as Newton polygon input; zero-flagged coefficients are
    /// reported as `None` together with their precision bound.
    pub fn scaled_points(&self) -> Vec<(usize, ScaledPoint)> {
        let e = self.ctx().e();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let shift = self.radius * n as i64;
                let pt = match c.val_units() {
                    Some(v) => ScaledPoint::Exact(ValuationQ::from_units(v, e) + shift),
                    None => ScaledPoint::AtLeast(ValuationQ::from_units(c.prec(), e) + shift),
                };
                (n, pt)
            })
            .collect()
    }
}

/// A coefficient valuation observed at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaledPoint {
    Exact(ValuationQ),
    AtLeast(ValuationQ),
}

/// Expansion of `[X]_q - X` around `x` (closed unit disk):
/// `c_0 = [x]_q - x`, `c_1 = q^x log q/(q-1) - 1`, `c_n = q^x (log q)^n / ((q-1) n!)`.
pub fn series1(x: &PadicNumber, q: &PadicNumber, n_max: Option<usize>) -> Result<TruncatedSeries> {
    require_integral(x, "x")?;
    let ctx = x.ctx();
    let one = PadicNumber::one(ctx);
    let y = q - &one;
    if !in_s(&y) {
        return Err(Error::OutsideS { what: "q - 1" });
    }
    let Some(s) = y.val_units() else {
        return Err(Error::QIsOne);
    };
    let p1 = ctx.p() as i64 - 1;
    let e = ctx.e() as i64;
    // v(c_n) >= (n - 1)(m0 - 1/(p-1)) = (n - 1) * slope_num / (e (p - 1))
    let slope_num = s * p1 - e;
    let n_max = n_max.unwrap_or_else(|| {
        let need = ctx.k() * p1;
        ceil_div(need, slope_num).max(2) as usize
    });
    let tail_bound = ValuationQ::new(n_max as i64 * slope_num, e * p1);

    let l = log1p(&y)?;
    let qx = exp(&(x * &l))?;
    let base = qx.div(&y)?;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(q_bracket(x, q)?.try_sub(x)?);
    let mut t = &base * &l;
    if n_max >= 1 {
        coeffs.push(&t - &one);
    }
    for n in 2..=n_max as i64 {
        t = (&t * &l).div_small(n)?;
        coeffs.push(t.clone());
    }
    Ok(TruncatedSeries {
        center: x.clone(),
        coeffs,
        tail_bound,
        radius: ValuationQ::zero(),
    })
}

/// Which linear factor multiplies in at step `k` of a [`DeflatedSeries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FactorRule {
    /// `(Z - (k + 1))`: the variable is X and the products are `A_k(X)`.
    Shifted,
    /// `Z`: the variable is U and the products are `U^k`.
    Origin,
}

/// The deflated bracket `G(X, Y) = ([X]_{1+Y} - X) / (Y X (X - 1)) = sum_k A_k(X) Y^k / (k+2)!`
/// restricted to one variable, written as `sum_k w_k P_k(Z)` with `P_k` a product of `k` monic
/// linear factors with integral roots.
///
/// With `Y` fixed the variable is X and `w_k = Y^k/(k+2)!`; with X fixed and `Y = pi^s U` the
/// variable is U and `w_k = A_k(x) pi^(s k)/(k+2)!`. In both cases `v(w_k) >= k m0 - (k+1)/(p-1)`,
/// which is increasing in `k` because `m0 > 1/(p-1)`.
#[derive(Clone, Debug)]
pub struct DeflatedSeries {
    weights: Vec<PadicNumber>,
    rule: FactorRule,
    m0: ValuationQ,
}

impl DeflatedSeries {
    fn weight_bound(m0: ValuationQ, p: u32, k: i64) -> ValuationQ {
        m0 * k - ValuationQ::new(k + 1, p as i64 - 1)
    }

    fn k_max(ctx: &PrimeContext, m0: ValuationQ) -> usize {
        let target = ValuationQ::from_units(ctx.k(), ctx.e());
        let mut k = 1i64;
        // linear growth; a short scan from a lower estimate keeps this exact
        let slope = m0 - ValuationQ::s_radius(ctx.p());
        let est = ((target.to_f64() / slope.to_f64()).floor() as i64 - 2).max(1);
        k = k.max(est);
        while Self::weight_bound(m0, ctx.p(), k + 1) < target {
            k += 1;
        }
        k as usize
    }

    /// `X -> G(X, q - 1)`.
    pub fn in_x(q: &PadicNumber) -> Result<Self> {
        let ctx = q.ctx();
        let y = q - &PadicNumber::one(ctx);
        if !in_s(&y) {
            return Err(Error::OutsideS { what: "q - 1" });
        }
        let Some(s) = y.val_units() else {
            return Err(Error::QIsOne);
        };
        let m0 = ValuationQ::from_units(s, ctx.e());
        let k_max = Self::k_max(ctx, m0);
        let mut weights = Vec::with_capacity(k_max + 1);
        let mut w = PadicNumber::one(ctx).div_small(2)?;
        weights.push(w.clone());
        for k in 1..=k_max as i64 {
            w = (&w * &y).div_small(k + 2)?;
            weights.push(w.clone());
        }
        Ok(DeflatedSeries {
            weights,
            rule: FactorRule::Shifted,
            m0,
        })
    }

    /// `U -> G(x, pi^(e m0) U)`.
    pub fn in_u(x: &PadicNumber, m0: ValuationQ) -> Result<Self> {
        require_integral(x, "x")?;
        let ctx = x.ctx();
        if m0 <= ValuationQ::s_radius(ctx.p()) {
            return Err(Error::InadmissibleM0 { m0 });
        }
        let s = m0.to_units(ctx.e()).ok_or(Error::NotRepresentable {
            m0,
            e: ctx.e(),
            required: m0.denom(),
        })?;
        let k_max = Self::k_max(ctx, m0);
        let mut weights = Vec::with_capacity(k_max + 1);
        let mut a = PadicNumber::one(ctx);
        let mut f = PadicNumber::one(ctx).div_small(2)?;
        weights.push(f.clone());
        for k in 1..=k_max as i64 {
            a = &a * &(x - &PadicNumber::from_int(ctx, k + 1));
            f = f.mul_pi_pow(s).div_small(k + 2)?;
            weights.push(&a * &f);
        }
        Ok(DeflatedSeries {
            weights,
            rule: FactorRule::Origin,
            m0,
        })
    }

    pub fn m0(&self) -> ValuationQ {
        self.m0
    }

    pub fn ctx(&self) -> &PrimeContext {
        self.weights[0].ctx()
    }

    /// The weights `w_k`; for the U-variable these are the coefficients `d_n(x, 0)`.
    pub fn weights(&self) -> &[PadicNumber] {
        &self.weights
    }

    fn root(&self, k: i64) -> i64 {
        match self.rule {
            FactorRule::Shifted => k + 1,
            FactorRule::Origin => 0,
        }
    }

    /// Lower bound on `v(w_k)` for every `k >= n`.
    pub fn coefficient_bound(&self, n: usize) -> ValuationQ {
        Self::weight_bound(self.m0, self.ctx().p(), n as i64)
    }

    /// Taylor coefficients `b_0..b_{n_terms-1}` at `center`, valid on `v(Z - center) >= radius`.
    pub fn taylor(
        &self,
        center: &PadicNumber,
        n_terms: usize,
        radius: ValuationQ,
    ) -> Result<TruncatedSeries> {
        require_integral(center, "expansion point")?;
        let ctx = self.ctx();
        let e = ctx.e();
        let n_terms = n_terms.max(1);
        let mut poly: Vec<PadicNumber> = vec![PadicNumber::one(ctx)];
        let mut out: Vec<Option<PadicNumber>> = vec![None; n_terms];
        for (k, w) in self.weights.iter().enumerate() {
            if k > 0 {
                let r = center - &PadicNumber::from_int(ctx, self.root(k as i64));
                let mut next = Vec::with_capacity(min(poly.len() + 1, n_terms));
                for n in 0..min(poly.len() + 1, n_terms) {
                    let low = poly.get(n).map(|c| c * &r);
                    let high = if n > 0 { poly.get(n - 1) } else { None };
                    next.push(match (low, high) {
                        (Some(l), Some(h)) => &l + h,
                        (Some(l), None) => l,
                        (None, Some(h)) => h.clone(),
                        (None, None) => unreachable!(),
                    });
                }
                poly = next;
            }
            for (n, c) in poly.iter().enumerate() {
                let term = w * c;
                out[n] = Some(match out[n].take() {
                    None => term,
                    Some(acc) => &acc + &term,
                });
            }
        }
        let inner_cap = self.coefficient_bound(self.weights.len()).floor_units(e);
        let coeffs = out
            .into_iter()
            .map(|c| {
                let c = c.unwrap_or_else(|| PadicNumber::zero_with_prec(ctx, inner_cap));
                c.with_prec(min(c.prec(), inner_cap))
            })
            .collect::<Vec<_>>();
        let tail_bound = self.coefficient_bound(n_terms) + radius * n_terms as i64;
        Ok(TruncatedSeries {
            center: center.clone(),
            coeffs,
            tail_bound,
            radius,
        })
    }

    /// Value and first derivative at `z`.
    pub fn value_and_derivative(&self, z: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
        let t = self.taylor(z, 2, ValuationQ::zero())?;
        let mut it = t.coeffs.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }
}

/// Expansion of `h_{m0}(x, U) = ([x]_Q - x)/((Q - 1) x (x - 1))`, `Q = 1 + pi^(e m0) U`,
/// around `U = u`: `d_n(x, u) = sum_{k>=n} C(k, n) A_k(x)/(k+2)! p^(k m0) u^(k-n)`.
pub fn series2(
    x: &PadicNumber,
    u: &PadicNumber,
    m0: ValuationQ,
    n_max: Option<usize>,
) -> Result<TruncatedSeries> {
    let ctx = x.ctx();
    require_integral(u, "u")?;
    let one = PadicNumber::one(ctx);
    if x.is_zero() || x.try_sub(&one)?.is_zero() {
        return Err(Error::DegenerateCenter);
    }
    let g = DeflatedSeries::in_u(x, m0)?;
    let n_terms = n_max.map(|n| n + 1).unwrap_or(g.weights().len());
    g.taylor(u, n_terms, ValuationQ::zero())
}

/// `[x + x']_q = [x]_q + q^x [x']_q` at the available precision.
pub fn cocycle_check(x: &PadicNumber, x2: &PadicNumber, q: &PadicNumber) -> Result<bool> {
    let lhs = q_bracket(&(x + x2), q)?;
    let rhs = &q_bracket(x, q)? + &(&q_pow(x, q)? * &q_bracket(x2, q)?);
    Ok(lhs.try_sub(&rhs)?.is_zero())
}

/// `q = 1 + pi^s u`.
pub fn q_from_unit(u: &PadicNumber, s: i64) -> PadicNumber {
    &PadicNumber::one(u.ctx()) + &u.mul_pi_pow(s)
}

/// `u = (q - 1) / pi^s` with `s = v(q - 1)` in pi-units.
pub fn unit_of(q: &PadicNumber) -> Result<(i64, PadicNumber)> {
    let y = q - &PadicNumber::one(q.ctx());
    let s = y.val_units().ok_or(Error::QIsOne)?;
    Ok((s, y.mul_pi_pow(-s)))
}

/// Exact integer helper used by callers that build constants.
pub fn int(ctx: &PrimeContext, n: i64) -> PadicNumber {
    PadicNumber::from_int(ctx, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Constraint;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, e: u32, k: i64) -> PrimeContext {
        PrimeContext::new(p, e, k).unwrap()
    }

    #[test]
    fn membership_in_s() {
        let c = ctx(3, 1, 40);
        assert!(in_s(&int(&c, 3)));
        assert!(!in_s(&int(&c, 2)));
        let c5 = ctx(5, 3, 60);
        assert!(in_s(&PadicNumber::pi_pow(&c5, 1)));
        let c32 = ctx(3, 2, 40);
        assert!(!in_s(&PadicNumber::pi_pow(&c32, 1)));
        assert!(in_s(&PadicNumber::zero(&c32)));
    }

    #[test]
    fn log_of_six_in_q5() {
        let c = ctx(5, 1, 30);
        let l = log1p(&int(&c, 5)).unwrap();
        let five = int(&c, 5);
        let partial = &(&(&five - &(&five * &five).div_small(2).unwrap())
            + &five.pow_int(3).unwrap().div_small(3).unwrap())
            - &five.pow_int(4).unwrap().div_small(4).unwrap();
        // the n = 5 term 5^5/5 has valuation 4, so the four-term sum is only exact mod 5^4
        assert!(l.equals_to_precision(&partial, 4));
        assert!(!l.equals_to_precision(&partial, 5));
        let five_terms = &partial + &five.pow_int(5).unwrap().div_small(5).unwrap();
        assert!(l.equals_to_precision(&five_terms, 5));
        assert!(log1p(&PadicNumber::zero(&c)).unwrap().is_zero());
        assert!(matches!(log1p(&int(&c, 1)), Err(Error::OutsideS { .. })));
    }

    #[test]
    fn exp_inverts_log() {
        let c = ctx(5, 3, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let y = PadicNumber::sample(
                &c,
                Constraint::Valuation(1 + rand::Rng::gen_range(&mut rng, 0..4)),
                &mut rng,
            );
            let back = exp(&log1p(&y).unwrap()).unwrap();
            let target = &PadicNumber::one(&c) + &y;
            let d = &back - &target;
            assert!(d.is_zero(), "residual {d}");
            assert!(d.prec() >= 58);
        }
    }

    #[test]
    fn bracket_of_minus_half_at_four() {
        let c = ctx(3, 1, 60);
        let x = PadicNumber::from_rational(&c, -1, 2).unwrap();
        let q = int(&c, 4);
        let b = q_bracket(&x, &q).unwrap();
        let d = &b - &x;
        assert!(d.is_zero());
        assert!(d.prec() >= 56);
        let qx = q_pow(&x, &q).unwrap();
        assert!(qx.equals_to_precision(&x, 56));
    }

    #[test]
    fn bracket_trivial_cases() {
        let c = ctx(5, 3, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = PadicNumber::sample(&c, Constraint::Integral, &mut rng);
        assert_eq!(q_bracket(&x, &PadicNumber::one(&c)).unwrap(), x);
        let q = q_from_unit(&PadicNumber::sample(&c, Constraint::Unit, &mut rng), 1);
        let z = q_pow(&PadicNumber::zero(&c), &q).unwrap();
        assert!(z.equals_to_precision(&PadicNumber::one(&c), 60));
        let sq = q_pow(&int(&c, 2), &q).unwrap();
        assert!(sq.equals_to_precision(&(&q * &q), 58));
        let b3 = q_bracket(&int(&c, 3), &q).unwrap();
        let direct = &(&PadicNumber::one(&c) + &q) + &(&q * &q);
        assert!(b3.equals_to_precision(&direct, 56));
    }

    #[test]
    fn a_poly_values() {
        let c = ctx(5, 1, 30);
        assert_eq!(a_poly(0, &int(&c, 9)), PadicNumber::one(&c));
        let a = a_poly(3, &int(&c, 5));
        assert!(a.equals_to_precision(&int(&c, 6), 30));
        assert_eq!(a.val_units(), Some(0));
        let b = a_poly(3, &int(&c, 7));
        assert!(b.equals_to_precision(&int(&c, 60), 30));
        assert_eq!(b.val_units(), Some(1));
        // (x-2)(x-3)(x-4) at 7: derivative 4*3 + 5*3 + 5*4 = 47
        assert!(a_poly_derivative(3, &int(&c, 7)).equals_to_precision(&int(&c, 47), 30));
    }

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(6, 3), 2);
        assert_eq!(factorial_valuation(6, 3), ValuationQ::integer(2));
        for p in [2, 3, 5, 7, 11] {
            assert_eq!(factorial_valuation(p as u64, p), ValuationQ::integer(1));
        }
    }

    #[test]
    fn series1_coefficient_valuations_at_origin() {
        let c = ctx(3, 1, 40);
        let s = series1(&PadicNumber::zero(&c), &int(&c, 4), None).unwrap();
        assert!(s.coeffs[0].is_zero());
        let vals: Vec<_> = s.coeffs[1..5]
            .iter()
            .map(|c| c.val_units().unwrap())
            .collect();
        assert_eq!(vals, vec![1, 1, 1, 2]);
        assert!(s.tail_bound >= ValuationQ::integer(40));
    }

    #[test]
    fn series2_leading_coefficients() {
        let c = ctx(5, 3, 60);
        let x = int(&c, 7);
        let m0 = ValuationQ::new(1, 3);
        let s = series2(&x, &PadicNumber::zero(&c), m0, Some(6)).unwrap();
        for n in 0..=6usize {
            let expect = a_poly(n, &x)
                .mul_pi_pow(n as i64)
                .div_int(&BigInt::from((1..=(n as i64 + 2)).product::<i64>()))
                .unwrap();
            assert!(s.coeffs[n].equals_to_precision(&expect, 50), "n = {n}");
        }
        let half = PadicNumber::from_rational(&c, 1, 2).unwrap();
        assert!((&s.coeffs[0] - &half).is_zero());
        assert_eq!(
            series2(&PadicNumber::zero(&c), &PadicNumber::zero(&c), m0, None).unwrap_err(),
            Error::DegenerateCenter
        );
        assert!(matches!(
            series2(&x, &PadicNumber::zero(&c), ValuationQ::new(1, 2), None),
            Err(Error::NotRepresentable { .. })
        ));
    }

    #[test]
    fn cocycle_small_cases() {
        let c = ctx(3, 1, 40);
        let q = int(&c, 4);
        let x = PadicNumber::from_rational(&c, 5, 7).unwrap();
        assert!(cocycle_check(&x, &PadicNumber::zero(&c), &q).unwrap());
        assert!(cocycle_check(&x, &x, &q).unwrap());
        let two = q_bracket(&int(&c, 2), &q).unwrap();
        assert!(two.equals_to_precision(&int(&c, 5), 39));
    }
}
