//! Finite-precision arithmetic in the totally ramified extension `Q_p(pi)`, `pi^e = p`.
//!
//! A nonzero element is stored as `pi^val * w` where `w = c_0 + c_1 pi + ... + c_{e-1} pi^{e-1}`
//! is a unit with integer coefficients. The element is known modulo `pi^prec`; coefficient `c_i`
//! is kept reduced modulo `p^{n_i}` where `n_i` counts the pi-digits `e*k + i` below the relative
//! precision `prec - val`. Under this layout the pi-adic digit at position `e*k + i` is the k-th
//! base-p digit of `c_i`, so valuation and residue are direct reads.
//!
//! All precisions and valuations are counted in pi-units (`v(pi) = 1/e`, `v(p) = 1`).

use std::borrow::Cow;
use std::cmp::min;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::valuation::{Valuation, ValuationQ};

/// Prime `p`, ramification index `e` and working absolute precision `K` (in pi-units).
#[derive(Clone)]
pub struct PrimeContext {
    inner: Arc<ContextInner>,
}

struct ContextInner {
    p: u32,
    e: u32,
    k: i64,
    powers: Vec<BigUint>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    pub fn new(p: u32, e: u32, k: i64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::BadRamification);
        }
        if k < 2 * e as i64 {
            return Err(Error::PrecisionTooSmall {
                k,
                min: 2 * e as i64,
            });
        }
        let table_len = (4 * k / e as i64 + 8) as usize;
        let base = BigUint::from(p);
        let mut powers = Vec::with_capacity(table_len);
        let mut acc = BigUint::one();
        for _ in 0..table_len {
            powers.push(acc.clone());
            acc *= &base;
        }
        Ok(PrimeContext {
            inner: Arc::new(ContextInner { p, e, k, powers }),
        })
    }

    /// Same prime and ramification, different working precision.
    pub fn with_precision(&self, k: i64) -> Result<Self> {
        Self::new(self.p(), self.e(), k)
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    /// Working absolute precision `K` in pi-units.
    pub fn k(&self) -> i64 {
        self.inner.k
    }

    fn e_i(&self) -> i64 {
        self.inner.e as i64
    }

    pub(crate) fn pow_p(&self, n: usize) -> Cow<'_, BigUint> {
        match self.inner.powers.get(n) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(BigUint::from(self.inner.p).pow(n as u32)),
        }
    }

    /// Number of base-p digits kept in coefficient `i` at relative precision `rp`.
    fn digits_in(&self, rp: i64, i: usize) -> usize {
        let e = self.e_i();
        let n = rp - i as i64;
        if n <= 0 {
            0
        } else {
            ceil_div(n, e) as usize
        }
    }

    fn check(&self, other: &PrimeContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }
}

impl PartialEq for PrimeContext {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &o.inner)
            || (self.p() == o.p() && self.e() == o.e() && self.k() == o.k())
    }
}

impl Eq for PrimeContext {}

impl fmt::Debug for PrimeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PrimeContext(p={}, e={}, K={})",
            self.p(),
            self.e(),
            self.k()
        )
    }
}

/// An element of `Q_p(pi)` with exact valuation and tracked absolute precision.
#[derive(Clone)]
pub struct PadicNumber {
    ctx: PrimeContext,
    /// Valuation in pi-units; equals `prec` for zero-flagged values.
    val: i64,
    prec: i64,
    /// Unit coefficients `c_0..c_{e-1}`; empty iff zero-flagged.
    unit: Vec<BigUint>,
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

// ---------------------------------------------------------------------------
// raw coefficient vectors: sum c_i pi^i in Z[pi]/(pi^e - p), no reduction

fn vp_capped(c: &BigUint, p: &BigUint, cap: i64) -> i64 {
    let mut v = 0;
    let mut cur = Cow::Borrowed(c);
    while v < cap {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            break;
        }
        cur = Cow::Owned(q);
        v += 1;
    }
    v
}

fn raw_valuation(ctx: &PrimeContext, raw: &[BigUint], cap: i64) -> Option<i64> {
    let e = ctx.e_i();
    let p = BigUint::from(ctx.p());
    let mut best: Option<i64> = None;
    for (i, c) in raw.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let limit = best.unwrap_or(cap) - i as i64;
        if limit <= 0 {
            continue;
        }
        let kcap = ceil_div(limit, e);
        let v = e * vp_capped(c, &p, kcap) + i as i64;
        best = Some(best.map_or(v, |b| min(b, v)));
        if best == Some(0) {
            break;
        }
    }
    best
}

fn raw_shift_up(ctx: &PrimeContext, raw: &[BigUint], s: i64) -> Vec<BigUint> {
    if s == 0 {
        return raw.to_vec();
    }
    let e = ctx.inner.e as usize;
    let q = (s / e as i64) as usize;
    let r = (s % e as i64) as usize;
    let mut out = vec![BigUint::zero(); e];
    for (i, c) in raw.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let j = i + r;
        if j < e {
            out[j] = c * ctx.pow_p(q).as_ref();
        } else {
            out[j - e] = c * ctx.pow_p(q + 1).as_ref();
        }
    }
    out
}

fn raw_shift_down(ctx: &PrimeContext, raw: &[BigUint], t: i64) -> Vec<BigUint> {
    if t == 0 {
        return raw.to_vec();
    }
    let e = ctx.inner.e as usize;
    let q = (t / e as i64) as usize;
    let r = (t % e as i64) as usize;
    let mut out = vec![BigUint::zero(); e];
    for (i, c) in raw.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if i >= r {
            out[i - r] = c / ctx.pow_p(q).as_ref();
        } else {
            out[i + e - r] = c / ctx.pow_p(q + 1).as_ref();
        }
    }
    out
}

fn raw_reduce(ctx: &PrimeContext, raw: &mut [BigUint], rp: i64) {
    for (i, c) in raw.iter_mut().enumerate() {
        let n = ctx.digits_in(rp, i);
        if n == 0 {
            c.set_zero();
        } else {
            let m = ctx.pow_p(n);
            if *c >= *m {
                *c %= m.as_ref();
            }
        }
    }
}

fn raw_mul(ctx: &PrimeContext, a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let e = ctx.inner.e as usize;
    if e == 1 {
        return vec![&a[0] * &b[0]];
    }
    let mut lo = vec![BigUint::zero(); e];
    let mut hi = vec![BigUint::zero(); e];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            if i + j < e {
                lo[i + j] += x * y;
            } else {
                hi[i + j - e] += x * y;
            }
        }
    }
    let p = BigUint::from(ctx.p());
    for (l, h) in lo.iter_mut().zip(hi) {
        if !h.is_zero() {
            *l += h * &p;
        }
    }
    lo
}

/// `a - b` reduced at relative precision `rp`, both inputs already reduced there.
fn raw_sub_mod(ctx: &PrimeContext, a: &[BigUint], b: &[BigUint], rp: i64) -> Vec<BigUint> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let n = ctx.digits_in(rp, i);
            if n == 0 {
                return BigUint::zero();
            }
            let m = ctx.pow_p(n);
            let y = y % m.as_ref();
            let x = x % m.as_ref();
            if x >= y {
                x - y
            } else {
                x + m.as_ref() - y
            }
        })
        .collect()
}

fn unit_inverse(ctx: &PrimeContext, w: &[BigUint], rp: i64) -> Vec<BigUint> {
    let e = ctx.inner.e as usize;
    let n0 = ctx.digits_in(rp, 0);
    let m0 = ctx.pow_p(n0);
    let inv0 = w[0]
        .modinv(m0.as_ref())
        .expect("unit coefficient is invertible");
    let mut y = vec![BigUint::zero(); e];
    y[0] = inv0;
    if e == 1 {
        return y;
    }
    let mut two = vec![BigUint::zero(); e];
    two[0] = BigUint::from(2u32);
    let mut cur = 1i64;
    while cur < rp {
        cur = min(2 * cur, rp);
        let mut wy = raw_mul(ctx, w, &y);
        raw_reduce(ctx, &mut wy, cur);
        let mut t = two.clone();
        raw_reduce(ctx, &mut t, cur);
        let corr = raw_sub_mod(ctx, &t, &wy, cur);
        y = raw_mul(ctx, &y, &corr);
        raw_reduce(ctx, &mut y, cur);
    }
    raw_reduce(ctx, &mut y, rp);
    y
}

fn biguint_digits(c: &BigUint, p: u32, count: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(count);
    if p <= 256 {
        let ds = c.to_radix_le(p);
        for k in 0..count {
            out.push(ds.get(k).copied().unwrap_or(0) as u32);
        }
    } else {
        let pb = BigUint::from(p);
        let mut cur = c.clone();
        for _ in 0..count {
            let (q, r) = cur.div_rem(&pb);
            out.push(r.to_u32().unwrap_or(0));
            cur = q;
        }
    }
    out
}

/// Constraint for [`PadicNumber::sample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Any element of the unit disk (valuation at least 0).
    Integral,
    /// Valuation exactly 0.
    Unit,
    /// Valuation exactly this many pi-units.
    Valuation(i64),
    /// Valuation at least 0 and prescribed residue in `F_p`.
    Residue(u32),
}

/// JSON rendering `{p, e, val, digits, prec}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u32,
    pub e: u32,
    pub val: i64,
    pub digits: Vec<u32>,
    pub prec: i64,
}

impl PadicNumber {
    // -- construction ------------------------------------------------------

    fn zero_flagged(ctx: &PrimeContext, prec: i64) -> Self {
        PadicNumber {
            ctx: ctx.clone(),
            val: prec,
            prec,
            unit: Vec::new(),
        }
    }

    /// Zero at the working precision `K`.
    pub fn zero(ctx: &PrimeContext) -> Self {
        Self::zero_flagged(ctx, ctx.k())
    }

    /// Zero known modulo `pi^prec`.
    pub fn zero_with_prec(ctx: &PrimeContext, prec: i64) -> Self {
        Self::zero_flagged(ctx, prec)
    }

    pub fn one(ctx: &PrimeContext) -> Self {
        Self::from_int(ctx, 1)
    }

    /// Exact 1 known modulo `pi^prec`.
    pub fn one_with_prec(ctx: &PrimeContext, prec: i64) -> Self {
        if prec <= 0 {
            return Self::zero_flagged(ctx, prec);
        }
        let mut unit = vec![BigUint::zero(); ctx.inner.e as usize];
        unit[0] = BigUint::one();
        PadicNumber {
            ctx: ctx.clone(),
            val: 0,
            prec,
            unit,
        }
    }

    pub fn from_int(ctx: &PrimeContext, n: i64) -> Self {
        Self::from_bigint_ratio(ctx, &BigInt::from(n), &BigInt::one()).expect("nonzero denominator")
    }

    /// The image of `num/den` with exact valuation and absolute precision `K`.
    pub fn from_rational(ctx: &PrimeContext, num: i64, den: i64) -> Result<Self> {
        Self::from_bigint_ratio(ctx, &BigInt::from(num), &BigInt::from(den))
    }

    pub fn from_bigint_ratio(ctx: &PrimeContext, num: &BigInt, den: &BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = ctx.k();
        if num.is_zero() {
            return Ok(Self::zero(ctx));
        }
        let p = BigInt::from(ctx.p());
        let (a, n) = split_p(num, &p);
        let (b, d) = split_p(den, &p);
        let val = (a - b) * ctx.e_i();
        if val >= k {
            return Ok(Self::zero(ctx));
        }
        let rp = k - val;
        let n0 = ctx.digits_in(rp, 0);
        let m = BigInt::from(ctx.pow_p(n0).into_owned());
        let d_inv = d
            .mod_floor(&m)
            .to_biguint()
            .unwrap()
            .modinv(&m.to_biguint().unwrap())
            .expect("p-free denominator is invertible");
        let n_mod = n.mod_floor(&m).to_biguint().unwrap();
        let c0 = (n_mod * d_inv) % m.to_biguint().unwrap();
        let mut unit = vec![BigUint::zero(); ctx.inner.e as usize];
        unit[0] = c0;
        Ok(PadicNumber {
            ctx: ctx.clone(),
            val,
            prec: k,
            unit,
        })
    }

    /// `pi^k`, known to relative precision `K`.
    pub fn pi_pow(ctx: &PrimeContext, k: i64) -> Self {
        let mut unit = vec![BigUint::zero(); ctx.inner.e as usize];
        unit[0] = BigUint::one();
        PadicNumber {
            ctx: ctx.clone(),
            val: k,
            prec: k + ctx.k(),
            unit,
        }
    }

    /// Builds `sum_j digits[j] pi^(start + j)` known modulo `pi^prec`; leading zero digits are allowed.
    pub fn from_digit_expansion(
        ctx: &PrimeContext,
        start: i64,
        digits: &[u32],
        prec: i64,
    ) -> Result<Self> {
        let e = ctx.inner.e as usize;
        let p = ctx.p();
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Parse(format!("digit {d} out of range for p = {p}")));
        }
        if start + digits.len() as i64 > prec {
            return Err(Error::Parse("more digits than the stated precision".into()));
        }
        let mut raw = vec![BigUint::zero(); e];
        for (j, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let i = j % e;
            let k = j / e;
            raw[i] += BigUint::from(d) * ctx.pow_p(k).as_ref();
        }
        Ok(Self::from_raw(ctx, start, prec - start, raw))
    }

    /// Inverse of [`digits`](Self::digits): the string and JSON forms carry exactly these fields.
    pub fn from_parts(ctx: &PrimeContext, val: i64, digits: &[u32], prec: i64) -> Result<Self> {
        if digits.is_empty() {
            if val != prec {
                return Err(Error::Parse(format!(
                    "zero must be written with val = prec (got val {val}, prec {prec})"
                )));
            }
            return Ok(Self::zero_flagged(ctx, prec));
        }
        if digits.len() as i64 != prec - val {
            return Err(Error::Parse(format!(
                "expected {} digits for val {val} and prec {prec}, found {}",
                prec - val,
                digits.len()
            )));
        }
        if digits[0] == 0 {
            return Err(Error::Parse("leading digit must be nonzero".into()));
        }
        Self::from_digit_expansion(ctx, val, digits, prec)
    }

    fn from_raw(ctx: &PrimeContext, v: i64, rp: i64, mut raw: Vec<BigUint>) -> Self {
        if rp <= 0 {
            return Self::zero_flagged(ctx, v + rp);
        }
        raw_reduce(ctx, &mut raw, rp);
        match raw_valuation(ctx, &raw, rp) {
            None => Self::zero_flagged(ctx, v + rp),
            Some(t) if t >= rp => Self::zero_flagged(ctx, v + rp),
            Some(t) => {
                let unit = raw_shift_down(ctx, &raw, t);
                PadicNumber {
                    ctx: ctx.clone(),
                    val: v + t,
                    prec: v + rp,
                    unit,
                }
            }
        }
    }

    /// Uniformly random digits up to precision `K`, subject to `constraint`.
    pub fn sample<R: Rng + ?Sized>(
        ctx: &PrimeContext,
        constraint: Constraint,
        rng: &mut R,
    ) -> Self {
        let p = ctx.p();
        let k = ctx.k();
        let (start, first): (i64, Option<u32>) = match constraint {
            Constraint::Integral => (0, None),
            Constraint::Unit => (0, Some(rng.gen_range(1..p))),
            Constraint::Valuation(v) => (v, Some(rng.gen_range(1..p))),
            Constraint::Residue(r) => (0, Some(r % p)),
        };
        if start >= k {
            return Self::zero(ctx);
        }
        let n = (k - start) as usize;
        let mut digits: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        if let Some(d) = first {
            digits[0] = d;
        }
        Self::from_digit_expansion(ctx, start, &digits, k).expect("digits in range")
    }

    // -- accessors ---------------------------------------------------------

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_empty()
    }

    /// Absolute precision in pi-units.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Exact valuation in pi-units, `None` when zero-flagged.
    pub fn val_units(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// A lower bound on the valuation in pi-units that is exact for nonzero values.
    pub fn val_lower_units(&self) -> i64 {
        self.val
    }

    pub fn valuation(&self) -> Valuation {
        let e = self.ctx.e();
        if self.is_zero() {
            Valuation::Infinite(ValuationQ::from_units(self.prec, e))
        } else {
            Valuation::Finite(ValuationQ::from_units(self.val, e))
        }
    }

    /// Exact valuation, failing on zero-flagged values.
    pub fn exact_valuation(&self) -> Result<ValuationQ> {
        self.valuation().finite().ok_or(Error::PrecisionExhausted)
    }

    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Image in `F_p`.
    pub fn residue(&self) -> Result<u32> {
        if self.is_zero() {
            return if self.prec >= 1 {
                Ok(0)
            } else {
                Err(Error::PrecisionExhausted)
            };
        }
        match self.val.cmp(&0) {
            std::cmp::Ordering::Greater => Ok(0),
            std::cmp::Ordering::Equal => {
                let r = &self.unit[0] % BigUint::from(self.ctx.p());
                Ok(r.to_u32().unwrap())
            }
            std::cmp::Ordering::Less => Err(Error::NegativeValuation(ValuationQ::from_units(
                self.val,
                self.ctx.e(),
            ))),
        }
    }

    /// `v(self - other) >= bound` (pi-units), decided at the available precision.
    pub fn equals_to_precision(&self, other: &Self, bound: i64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.val >= bound,
            Err(_) => false,
        }
    }

    /// Pi-adic digits of the unit part, low order first; `prec - val` of them.
    pub fn digits(&self) -> Vec<u32> {
        if self.is_zero() {
            return Vec::new();
        }
        let e = self.ctx.inner.e as usize;
        let rp = (self.prec - self.val) as usize;
        let per: Vec<Vec<u32>> = (0..e)
            .map(|i| biguint_digits(&self.unit[i], self.ctx.p(), rp.div_ceil(e) + 1))
            .collect();
        (0..rp).map(|j| per[j % e][j / e]).collect()
    }

    /// Integer representative of the value when it is integral, modulo `p^n`.
    pub fn integral_coefficients(&self) -> Vec<BigUint> {
        self.unit.clone()
    }

    // -- precision ---------------------------------------------------------

    /// Forget digits at and beyond `pi^prec`.
    pub fn with_prec(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if self.is_zero() || prec <= self.val {
            return Self::zero_flagged(&self.ctx, prec);
        }
        let mut unit = self.unit.clone();
        raw_reduce(&self.ctx, &mut unit, prec - self.val);
        PadicNumber {
            ctx: self.ctx.clone(),
            val: self.val,
            prec,
            unit,
        }
    }

    // -- arithmetic --------------------------------------------------------

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.ctx.check(&o.ctx)?;
        let prec = min(self.prec, o.prec);
        if self.is_zero() {
            return Ok(o.with_prec(prec));
        }
        if o.is_zero() {
            return Ok(self.with_prec(prec));
        }
        let v = min(self.val, o.val);
        if prec <= v {
            return Ok(Self::zero_flagged(&self.ctx, prec));
        }
        let a = raw_shift_up(&self.ctx, &self.unit, self.val - v);
        let b = raw_shift_up(&self.ctx, &o.unit, o.val - v);
        let raw: Vec<BigUint> = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Self::from_raw(&self.ctx, v, prec - v, raw))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let rp = self.prec - self.val;
        let unit = self
            .unit
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_zero() {
                    BigUint::zero()
                } else {
                    self.ctx.pow_p(self.ctx.digits_in(rp, i)).as_ref() - c
                }
            })
            .collect();
        PadicNumber {
            ctx: self.ctx.clone(),
            val: self.val,
            prec: self.prec,
            unit,
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.ctx.check(&o.ctx)?;
        let prec = min(self.val + o.prec, o.val + self.prec);
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero_flagged(&self.ctx, prec));
        }
        let val = self.val + o.val;
        let rp = prec - val;
        let mut raw = raw_mul(&self.ctx, &self.unit, &o.unit);
        raw_reduce(&self.ctx, &mut raw, rp);
        Ok(PadicNumber {
            ctx: self.ctx.clone(),
            val,
            prec,
            unit: raw,
        })
    }

    /// Multiplicative inverse; relative precision is preserved, so `prec(1/a) = prec(a) - 2 v(a)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let rp = self.prec - self.val;
        let unit = unit_inverse(&self.ctx, &self.unit, rp);
        Ok(PadicNumber {
            ctx: self.ctx.clone(),
            val: -self.val,
            prec: -self.val + rp,
            unit,
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.try_mul(&o.inv()?)
    }

    /// Exact multiplication by a rational integer (relative precision preserved).
    pub fn mul_int(&self, n: &BigInt) -> Self {
        self.scale_by_int(n, false)
            .expect("multiplication by an integer")
    }

    /// Exact division by a nonzero rational integer (relative precision preserved).
    pub fn div_int(&self, n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.scale_by_int(n, true)
    }

    pub fn mul_small(&self, n: i64) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    pub fn div_small(&self, n: i64) -> Result<Self> {
        self.div_int(&BigInt::from(n))
    }

    fn scale_by_int(&self, n: &BigInt, divide: bool) -> Result<Self> {
        let e = self.ctx.e_i();
        if n.is_zero() {
            // only reachable for multiplication
            return Ok(Self::zero_flagged(
                &self.ctx,
                self.prec + (self.prec - self.val),
            ));
        }
        let p = BigInt::from(self.ctx.p());
        let (k, m) = split_p(n, &p);
        let shift = if divide { -k * e } else { k * e };
        if self.is_zero() {
            return Ok(Self::zero_flagged(&self.ctx, self.prec + shift));
        }
        let rp = self.prec - self.val;
        let n0 = self.ctx.digits_in(rp, 0);
        let modulus = self.ctx.pow_p(n0).into_owned();
        let m_abs = m.magnitude() % &modulus;
        let factor = if divide {
            m_abs
                .modinv(&modulus)
                .expect("p-free integer is invertible")
        } else {
            m_abs
        };
        let mut unit: Vec<BigUint> = self.unit.iter().map(|c| c * &factor).collect();
        raw_reduce(&self.ctx, &mut unit, rp);
        let out = PadicNumber {
            ctx: self.ctx.clone(),
            val: self.val + shift,
            prec: self.prec + shift,
            unit,
        };
        Ok(if m.sign() == Sign::Minus {
            out.neg_ref()
        } else {
            out
        })
    }

    /// Multiplication by `pi^k`.
    pub fn mul_pi_pow(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.val += k;
        out.prec += k;
        out
    }

    pub fn pow_int(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow_int(-n);
        }
        let mut base = self.clone();
        let mut acc: Option<PadicNumber> = None;
        let mut n = n as u64;
        if n == 0 {
            return Ok(Self::one(&self.ctx));
        }
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.try_mul(&base)?,
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc.unwrap())
    }

    // -- rendering ---------------------------------------------------------

    pub fn to_json(&self) -> PadicJson {
        PadicJson {
            p: self.ctx.p(),
            e: self.ctx.e(),
            val: self.val,
            digits: self.digits(),
            prec: self.prec,
        }
    }

    pub fn from_json(ctx: &PrimeContext, j: &PadicJson) -> Result<Self> {
        if j.p != ctx.p() || j.e != ctx.e() {
            return Err(Error::Parse(format!(
                "number for p = {}, e = {} given in context p = {}, e = {}",
                j.p,
                j.e,
                ctx.p(),
                ctx.e()
            )));
        }
        Self::from_parts(ctx, j.val, &j.digits, j.prec)
    }

    /// Parses the string form `pi^<val>*(d0 d1 ... ; prec=<K>)` (`p` in place of `pi` when e = 1).
    pub fn parse(ctx: &PrimeContext, s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("`{s}`: {why}"));
        let s = s.trim();
        let rest = if let Some(r) = s.strip_prefix("pi^") {
            r
        } else if let Some(r) = s.strip_prefix("p^") {
            if ctx.e() != 1 {
                return Err(bad("token `p` is only used when e = 1"));
            }
            r
        } else {
            return Err(bad("expected `pi^` or `p^` prefix"));
        };
        let (val, rest) = rest.split_once("*(").ok_or_else(|| bad("missing `*(`"))?;
        let val: i64 = val.trim().parse().map_err(|_| bad("invalid valuation"))?;
        let body = rest.strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
        let (digits, prec) = body.split_once(';').ok_or_else(|| bad("missing `;`"))?;
        let prec = prec
            .trim()
            .strip_prefix("prec=")
            .ok_or_else(|| bad("missing `prec=`"))?;
        let prec: i64 = prec.trim().parse().map_err(|_| bad("invalid precision"))?;
        let digits = digits
            .split_whitespace()
            .map(|d| d.parse::<u32>().map_err(|_| bad("invalid digit")))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(ctx, val, &digits, prec)
    }
}

/// `n = p^k * m` with `p` not dividing `m`.
fn split_p(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1;
    }
    (k, m)
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tok = if self.ctx.e() == 1 { "p" } else { "pi" };
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "{tok}^{}*({} ; prec={})",
            self.val,
            digits.join(" "),
            self.prec
        )
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for PadicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.val == o.val && self.prec == o.prec && self.unit == o.unit
    }
}

impl Eq for PadicNumber {}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $method(self, o: &PadicNumber) -> PadicNumber {
                self.$inner(o).expect("operands share a prime context")
            }
        }
        impl $tr<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, o: PadicNumber) -> PadicNumber {
                (&self).$method(&o)
            }
        }
        impl $tr<&PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, o: &PadicNumber) -> PadicNumber {
                (&self).$method(o)
            }
        }
        impl $tr<PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $method(self, o: PadicNumber) -> PadicNumber {
                self.$method(&o)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

/// Valuation of an integer `n != 0` at `p`, as a plain count.
pub fn vp_int(n: &BigInt, p: u32) -> i64 {
    if n.is_zero() {
        return i64::MAX;
    }
    split_p(&n.abs(), &BigInt::from(p)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, e: u32, k: i64) -> PrimeContext {
        PrimeContext::new(p, e, k).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(PrimeContext::new(3, 1, 60).is_ok());
        assert!(PrimeContext::new(5, 3, 90).is_ok());
        assert_eq!(PrimeContext::new(4, 1, 60).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            PrimeContext::new(5, 3, 5),
            Err(Error::PrecisionTooSmall { .. })
        ));
        assert_eq!(
            PrimeContext::new(5, 0, 60).unwrap_err(),
            Error::BadRamification
        );
    }

    #[test]
    fn minus_half_in_z3() {
        let c = ctx(3, 1, 60);
        let x = PadicNumber::from_rational(&c, -1, 2).unwrap();
        assert_eq!(x.val_units(), Some(0));
        assert_eq!(x.residue().unwrap(), 1);
        assert!(x.digits().iter().all(|&d| d == 1));
        assert_eq!(x.digits().len(), 60);
    }

    #[test]
    fn inverse_of_two_in_z3() {
        let c = ctx(3, 1, 60);
        let half = PadicNumber::from_int(&c, 2).inv().unwrap();
        let d = half.digits();
        assert_eq!(d[0], 2);
        assert!(d[1..].iter().all(|&x| x == 1));
        assert_eq!(half.residue().unwrap(), 2);
    }

    #[test]
    fn simple_valuations() {
        let c = ctx(5, 1, 60);
        assert_eq!(PadicNumber::from_int(&c, 60).val_units(), Some(1));
        let c3 = ctx(3, 1, 60);
        assert_eq!(
            PadicNumber::from_int(&c3, 18).valuation(),
            Valuation::Finite(ValuationQ::integer(2))
        );
        assert!(PadicNumber::from_rational(&c3, 0, 1).unwrap().is_zero());
        assert!(PadicNumber::from_int(&c3, 0).valuation().is_infinite());
        assert_eq!(
            PadicNumber::from_rational(&c3, 1, 0).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn uniformizer_cubed_is_five() {
        let c = ctx(5, 3, 90);
        let pi = PadicNumber::pi_pow(&c, 1);
        let cube = &(&pi * &pi) * &pi;
        assert_eq!(cube.val_units(), Some(3));
        assert_eq!(cube.valuation(), Valuation::Finite(ValuationQ::integer(1)));
        let five = PadicNumber::from_int(&c, 5);
        assert!(cube.equals_to_precision(&five, 90));
        assert_eq!(
            PadicNumber::pi_pow(&c, 2).valuation(),
            Valuation::Finite(ValuationQ::new(2, 3))
        );
    }

    #[test]
    fn additive_inverse_is_zero() {
        let c = ctx(5, 3, 90);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = PadicNumber::sample(&c, Constraint::Integral, &mut rng);
        let z = &a + &(-&a);
        assert!(z.is_zero());
        assert_eq!(z.prec(), 90);
    }

    #[test]
    fn residue_rules() {
        let c = ctx(3, 1, 20);
        let third = PadicNumber::from_rational(&c, 1, 3).unwrap();
        assert!(matches!(third.residue(), Err(Error::NegativeValuation(_))));
        assert_eq!(PadicNumber::from_int(&c, 6).residue().unwrap(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = PadicNumber::sample(&c, Constraint::Residue(2), &mut rng);
        assert_eq!(a.residue().unwrap(), 2);
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            a,
            PadicNumber::sample(&c, Constraint::Residue(2), &mut rng2)
        );
        assert!(a.equals_to_precision(&a, 20));
    }

    #[test]
    fn zero_inversion_fails() {
        let c = ctx(3, 2, 20);
        assert_eq!(
            PadicNumber::zero(&c).inv().unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn cross_context_is_an_error() {
        let a = PadicNumber::one(&ctx(3, 1, 20));
        let b = PadicNumber::one(&ctx(5, 1, 20));
        assert_eq!(a.try_add(&b).unwrap_err(), Error::ContextMismatch);
    }

    #[test]
    fn string_form() {
        let c = ctx(3, 1, 6);
        let x = PadicNumber::from_rational(&c, -1, 2).unwrap();
        assert_eq!(x.to_string(), "p^0*(1 1 1 1 1 1 ; prec=6)");
        assert_eq!(PadicNumber::parse(&c, &x.to_string()).unwrap(), x);
        let c2 = ctx(5, 3, 9);
        let pi = PadicNumber::pi_pow(&c2, 1).with_prec(4);
        assert_eq!(pi.to_string(), "pi^1*(1 0 0 ; prec=4)");
        let z = PadicNumber::zero(&c2);
        assert_eq!(z.to_string(), "pi^9*( ; prec=9)");
        assert_eq!(PadicNumber::parse(&c2, "pi^9*( ; prec=9)").unwrap(), z);
        assert!(PadicNumber::parse(&c2, "p^1*(1 ; prec=2)").is_err());
        assert!(PadicNumber::parse(&c2, "pi^1*(0 1 ; prec=3)").is_err());
    }

    #[test]
    fn mul_precision_rule() {
        let c = ctx(3, 1, 30);
        let a = PadicNumber::from_int(&c, 9); // v 2, prec 30
        let b = PadicNumber::from_rational(&c, 1, 3).unwrap(); // v -1, prec 30
        let ab = &a * &b;
        assert_eq!(ab.prec(), 29);
        assert!(ab.equals_to_precision(&PadicNumber::from_int(&c, 3), 29));
        let ai = a.inv().unwrap();
        assert_eq!(ai.prec(), 30 - 4);
    }
}
