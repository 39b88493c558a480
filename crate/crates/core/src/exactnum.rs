//! Exact arithmetic in the real cyclotomic fields Q(ζ), ζ = 2cos(π/n).
//!
//! Elements are reduced polynomials in ζ with rational coefficients. Equality
//! and hashing are exact; floating values only appear through explicit
//! embeddings.

use crate::algebra::{rat_to_decimal, rat_to_f64, Ring};
use crate::poly::QPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("denominator {q} does not divide the field parameter n = {n}")]
    IncompatibleField { q: u64, n: u64 },
    #[error("operands live in different fields (n = {0} and n = {1})")]
    ContextMismatch(u64, u64),
    #[error("division by zero in Q(2cos(pi/{0}))")]
    DivisionByZero(u64),
    #[error("malformed field element: {0}")]
    Malformed(String),
}

/// The field Q(2cos(π/n)) together with the minimal polynomial of its generator.
pub struct FieldContext {
    n: u64,
    minimal_polynomial: QPoly,
    degree: usize,
    zeta: f64,
    zeta_powers: OnceLock<Vec<BigInt>>,
    cos_table: OnceLock<Vec<FieldElement>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(2cos(pi/{}))", self.n)
    }
}

impl FieldContext {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn minimal_polynomial(&self) -> &QPoly {
        &self.minimal_polynomial
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The generator ζ as a double.
    pub fn zeta_f64(&self) -> f64 {
        self.zeta
    }
}

pub type Ctx = Arc<FieldContext>;

const FIXED_BITS: u64 = 320;

fn contexts() -> &'static Mutex<HashMap<u64, Ctx>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Ctx>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `2·T_k(z/2)`, the monic Chebyshev–Dickson polynomial `C_k`.
pub fn dickson(k: u64) -> QPoly {
    let mut a = QPoly::from_ints(&[2]);
    if k == 0 {
        return a;
    }
    let mut b = QPoly::x();
    for _ in 1..k {
        let c = QPoly::x().mul(&b).sub(&a);
        a = b;
        b = c;
    }
    b
}

/// Cyclotomic polynomial Φ_N with integer coefficients, from
/// Φ_N(x) = ∏_{d | N} (x^d − 1)^{μ(N/d)}.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut num: Vec<u64> = Vec::new();
    let mut den: Vec<u64> = Vec::new();
    for &d in &divisors {
        match mobius(n / d) {
            1 => num.push(d),
            -1 => den.push(d),
            _ => {}
        }
    }
    let mut p = vec![BigInt::one()];
    for d in num {
        // multiply by x^d − 1
        let d = d as usize;
        let mut q = vec![BigInt::zero(); p.len() + d];
        for (i, a) in p.iter().enumerate() {
            q[i + d] += a;
            q[i] -= a;
        }
        p = q;
    }
    for d in den {
        // exact division by x^d − 1: q_i = q_{i-d} − p_i, solved from the top
        let d = d as usize;
        let m = p.len() - d;
        let mut q = vec![BigInt::zero(); m];
        let mut r = p.clone();
        for i in (0..m).rev() {
            q[i] = r[i + d].clone();
            let qi = q[i].clone();
            r[i] += &qi;
            r[i + d] -= &qi;
        }
        debug_assert!(r.iter().all(|a| a.is_zero()));
        p = q;
    }
    p
}

fn mobius(mut n: u64) -> i32 {
    let mut sign = 1;
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return 0;
            }
            sign = -sign;
        }
        f += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn minimal_polynomial(n: u64) -> QPoly {
    if n == 1 {
        return QPoly::from_ints(&[2, 1]);
    }
    // 2cos(π/n) = x + 1/x for a primitive 2n-th root of unity x, so the
    // palindromic Φ_{2n}(x) = x^m·P(x + 1/x) yields the minimal polynomial P.
    let phi = cyclotomic(2 * n);
    let m = (phi.len() - 1) / 2;
    let mut out = QPoly::zero();
    let mut ck_prev = QPoly::from_ints(&[2]);
    let mut ck = QPoly::x();
    out = out.add(&QPoly::constant(BigRational::from_integer(phi[m].clone())));
    for k in 1..=m {
        if k > 1 {
            let next = QPoly::x().mul(&ck).sub(&ck_prev);
            ck_prev = ck;
            ck = next;
        }
        out = out.add(&ck.scale(&BigRational::from_integer(phi[m + k].clone())));
    }
    out.monic()
}

/// The divisor-quotient construction: square-free part of `C_n(z) + 2`
/// divided by the minimal polynomials of `2cos(π/b)` for `b | n`, `n/b` odd,
/// `b < n`. Kept as an independent cross-check of [`FieldContext`].
pub fn minimal_polynomial_by_quotient(n: u64) -> QPoly {
    if n == 1 {
        return QPoly::from_ints(&[2, 1]);
    }
    // Roots of C_n(z) + 2 are 2cos(jπ/n), j odd, each double except z = −2.
    let f = dickson(n).add(&QPoly::from_ints(&[2]));
    let mut p = f.squarefree().into_iter().fold(QPoly::one(), |acc, (g, _)| acc.mul(&g));
    for b in 1..n {
        if n % b == 0 && (n / b) % 2 == 1 {
            p = p.div_exact(&minimal_polynomial_by_quotient(b)).expect("divisor minimal polynomial divides");
        }
    }
    p.monic()
}

/// The context for Q(2cos(π/n)); contexts are interned, so repeated calls
/// return the same shared object.
pub fn field_new(n: u64) -> Ctx {
    assert!(n >= 1, "field parameter must be positive");
    if let Some(c) = contexts().lock().unwrap().get(&n) {
        return c.clone();
    }
    let mp = minimal_polynomial(n);
    let degree = mp.degree().unwrap_or(0);
    let ctx = Arc::new(FieldContext {
        n,
        minimal_polynomial: mp,
        degree,
        zeta: 2.0 * (std::f64::consts::PI / n as f64).cos(),
        zeta_powers: OnceLock::new(),
        cos_table: OnceLock::new(),
    });
    contexts().lock().unwrap().entry(n).or_insert(ctx).clone()
}

/// Context of the smallest field containing both.
pub fn compound_context(a: &Ctx, b: &Ctx) -> Ctx {
    field_new(a.n.lcm(&b.n))
}

/// Exact element of Q(ζ): coefficient vector of length `degree` in the power basis.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Ctx,
    c: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.ctx.n == o.ctx.n && self.c == o.c
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.ctx.n.hash(h);
        self.c.hash(h);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [n={}]", self, self.ctx.n)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", QPoly::new(self.c.clone()))
    }
}

impl FieldElement {
    fn from_poly(ctx: &Ctx, p: &QPoly) -> Self {
        let r = if p.degree().is_some_and(|d| d >= ctx.degree) { p.rem(&ctx.minimal_polynomial) } else { p.clone() };
        let mut c = r.coeffs().to_vec();
        c.resize(ctx.degree, BigRational::zero());
        FieldElement { ctx: ctx.clone(), c }
    }

    /// Element from coefficients in the power basis; reduced if too long.
    pub fn from_coeffs(ctx: &Ctx, coeffs: Vec<BigRational>) -> Self {
        Self::from_poly(ctx, &QPoly::new(coeffs))
    }

    pub fn zero(ctx: &Ctx) -> Self {
        FieldElement { ctx: ctx.clone(), c: vec![BigRational::zero(); ctx.degree] }
    }

    pub fn from_rational(ctx: &Ctx, r: BigRational) -> Self {
        Self::from_poly(ctx, &QPoly::constant(r))
    }

    pub fn from_int(ctx: &Ctx, v: i64) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_int(ctx, 1)
    }

    /// The generator ζ = 2cos(π/n).
    pub fn zeta(ctx: &Ctx) -> Self {
        Self::from_poly(ctx, &QPoly::x())
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.c.iter().skip(1).all(|a| a.is_zero()).then(|| self.c.first().cloned().unwrap_or_else(BigRational::zero))
    }

    fn check(&self, o: &Self) -> Result<(), ExactError> {
        if self.ctx.n == o.ctx.n {
            Ok(())
        } else {
            Err(ExactError::ContextMismatch(self.ctx.n, o.ctx.n))
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, ExactError> {
        self.check(o)?;
        Ok(FieldElement { ctx: self.ctx.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, ExactError> {
        self.check(o)?;
        Ok(FieldElement { ctx: self.ctx.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, ExactError> {
        self.check(o)?;
        let d = self.ctx.degree;
        if d <= 1 {
            return Ok(FieldElement { ctx: self.ctx.clone(), c: vec![&self.c[0] * &o.c[0]; d] });
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let m = self.ctx.minimal_polynomial.coeffs();
        for k in (d..prod.len()).rev() {
            let top = std::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for (j, mj) in m.iter().enumerate().take(d) {
                if !mj.is_zero() {
                    prod[k - d + j] -= &top * mj;
                }
            }
        }
        prod.truncate(d);
        Ok(FieldElement { ctx: self.ctx.clone(), c: prod })
    }

    pub fn negate(&self) -> Self {
        FieldElement { ctx: self.ctx.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    /// Multiply by ζ (a shift followed by one reduction step).
    pub fn mul_zeta(&self) -> Self {
        let d = self.ctx.degree;
        if d == 0 {
            return self.clone();
        }
        let mut c = vec![BigRational::zero(); d];
        c[1..d].clone_from_slice(&self.c[..d - 1]);
        let top = &self.c[d - 1];
        if !top.is_zero() {
            for (j, mj) in self.ctx.minimal_polynomial.coeffs().iter().enumerate().take(d) {
                c[j] -= top * mj;
            }
        }
        FieldElement { ctx: self.ctx.clone(), c }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        FieldElement { ctx: self.ctx.clone(), c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn inverse(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero(self.ctx.n));
        }
        let (g, u, _) = self.poly().xgcd(&self.ctx.minimal_polynomial);
        debug_assert_eq!(g, QPoly::one());
        Ok(Self::from_poly(&self.ctx, &u))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ExactError> {
        self.check(o)?;
        self.checked_mul(&o.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(&self.ctx);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Re-express in the field of `target`, which must contain this field.
    pub fn lift(&self, target: &Ctx) -> Result<Self, ExactError> {
        if target.n % self.ctx.n != 0 {
            return Err(ExactError::IncompatibleField { q: self.ctx.n, n: target.n });
        }
        if target.n == self.ctx.n {
            return Ok(self.clone());
        }
        // 2cos(π/n) = C_{N/n}(2cos(π/N)).
        let image = FieldElement::from_poly(target, &dickson(target.n / self.ctx.n));
        let mut acc = FieldElement::zero(target);
        for a in self.c.iter().rev() {
            acc = &acc * &image;
            acc.c[0] += a;
        }
        Ok(acc)
    }

    /// Real value as a double. Small elements use Horner in floating point;
    /// otherwise the power sum is evaluated in 320-bit fixed point so
    /// cancellation between large coefficients cannot spoil the result.
    pub fn to_f64(&self) -> f64 {
        let small = self.c.iter().all(|a| a.numer().bits() < 20 && a.denom().bits() < 20);
        if small && self.ctx.degree <= 4 {
            let z = self.ctx.zeta;
            return self.c.iter().rev().fold(0.0, |acc, a| acc * z + rat_to_f64(a));
        }
        let pw = self.ctx.zeta_powers.get_or_init(|| {
            let z = zeta_approx(&self.ctx, FIXED_BITS + 64).0;
            let scale = BigRational::from_integer(BigInt::one() << FIXED_BITS);
            let mut acc = BigRational::one();
            let mut out = Vec::with_capacity(self.ctx.degree);
            for _ in 0..self.ctx.degree {
                out.push((&acc * &scale).round().to_integer());
                acc = round_to_bits(&(&acc * &z), FIXED_BITS + 64);
            }
            out
        });
        let mut sum = BigRational::zero();
        for (a, p) in self.c.iter().zip(pw) {
            if !a.is_zero() {
                sum += BigRational::new(a.numer() * p, a.denom().clone());
            }
        }
        rat_to_f64(&(sum / BigRational::from_integer(BigInt::one() << FIXED_BITS)))
    }

    /// Exact comparison of real embeddings.
    pub fn cmp_real(&self, o: &Self) -> Ordering {
        let d = self - o;
        if d.is_zero() {
            return Ordering::Equal;
        }
        let v = d.to_f64();
        let scale: f64 = d.c.iter().map(|a| rat_to_f64(&a.abs())).sum::<f64>().max(1.0);
        if v.abs() > 1e-9 * scale {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let hr = embed_real(&d, 40);
        if hr.value.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn abs_cmp_real(&self, o: &Self) -> Ordering {
        let a = if self.cmp_real(&FieldElement::zero(&self.ctx)) == Ordering::Less { self.negate() } else { self.clone() };
        let b = if o.cmp_real(&FieldElement::zero(&o.ctx)) == Ordering::Less { o.negate() } else { o.clone() };
        a.cmp_real(&b)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                self.$checked(&o).expect("field context mismatch")
            }
        }
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &'a FieldElement) -> FieldElement {
                self.$checked(o).expect("field context mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
// Division panics on a zero divisor, like the rational types it wraps.
binop!(Div, div, checked_div);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.negate()
    }
}

impl Ring for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        FieldElement::one(&self.ctx)
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn int_like(&self, v: i64) -> Self {
        FieldElement::from_int(&self.ctx, v)
    }
}

impl crate::algebra::Field for FieldElement {
    fn rational_like(&self, r: &BigRational) -> Self {
        FieldElement::from_rational(&self.ctx, r.clone())
    }
}

/// Table of `2cos(πk/n)` for `k = 0..=2n`, built once per context by the
/// three-term recurrence `C_{k+1} = ζ·C_k − C_{k−1}`.
pub fn cos_table(ctx: &Ctx) -> &[FieldElement] {
    ctx.cos_table.get_or_init(|| {
        let n = ctx.n as usize;
        let mut t = Vec::with_capacity(2 * n + 1);
        t.push(FieldElement::from_int(ctx, 2));
        t.push(FieldElement::zeta(ctx));
        for k in 2..=2 * n {
            let next = &t[k - 1].mul_zeta() - &t[k - 2];
            t.push(next);
        }
        t
    })
}

/// `−2cos(πp/q)` as an element of `ctx`; requires `q | n` after reducing `p/q`.
pub fn elem_from_cos(p: i64, q: u64, ctx: &Ctx) -> Result<FieldElement, ExactError> {
    assert!(q > 0, "denominator must be positive");
    let g = (p.unsigned_abs()).gcd(&q).max(1);
    let (p, q) = (p / g as i64, q / g);
    if ctx.n % q != 0 {
        return Err(ExactError::IncompatibleField { q, n: ctx.n });
    }
    let k = (p.rem_euclid(2 * q as i64) as u64) * (ctx.n / q);
    Ok(cos_table(ctx)[k as usize].negate())
}

/// Real embedding with an explicit error bound.
#[derive(Clone, Debug)]
pub struct HighReal {
    pub value: BigRational,
    pub error_bound: BigRational,
    pub digits: usize,
}

impl HighReal {
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }
}

impl fmt::Display for HighReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rat_to_decimal(&self.value, self.digits))
    }
}

fn round_to_bits(r: &BigRational, bits: u64) -> BigRational {
    let den = BigInt::one() << bits;
    let n = (r * BigRational::from_integer(den.clone())).round().to_integer();
    BigRational::new(n, den)
}

/// ζ to within `2^{-bits}`, certified by a sign change of the minimal polynomial.
fn zeta_approx(ctx: &FieldContext, bits: u64) -> (BigRational, BigRational) {
    let mp = &ctx.minimal_polynomial;
    let dp = mp.derivative();
    let mut z = BigRational::from_float(ctx.zeta).unwrap_or_else(BigRational::zero);
    if mp.degree() == Some(1) {
        let r = -mp.coeff(0);
        return (r, BigRational::zero());
    }
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits.saturating_sub(2));
    loop {
        let mut prec = 48u64;
        loop {
            prec = (prec * 2).min(bits + 8);
            let d = dp.eval(&z);
            if d.is_zero() {
                break;
            }
            z = round_to_bits(&(&z - mp.eval(&z) / d), prec);
            if prec >= bits + 8 {
                break;
            }
        }
        let lo = mp.eval(&(&z - &eps));
        let hi = mp.eval(&(&z + &eps));
        if lo.is_zero() || hi.is_zero() || lo.is_negative() != hi.is_negative() {
            return (z, eps);
        }
        z = round_to_bits(&(&z - mp.eval(&z) / dp.eval(&z)), bits + 16);
    }
}

/// Embed `e` into the reals with relative error at most `10^{-precision}`
/// (exactly zero for the zero element).
pub fn embed_real(e: &FieldElement, precision: usize) -> HighReal {
    if e.is_zero() {
        return HighReal { value: BigRational::zero(), error_bound: BigRational::zero(), digits: precision };
    }
    if let Some(r) = e.as_rational() {
        return HighReal { value: r, error_bound: BigRational::zero(), digits: precision };
    }
    let target = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), precision));
    let sens: BigRational = e
        .c
        .iter()
        .enumerate()
        .map(|(i, a)| a.abs() * BigRational::from_integer(BigInt::from(i as u64 * 3u64.pow(i.saturating_sub(1) as u32))))
        .fold(BigRational::zero(), |x, y| x + y);
    let mut bits = (precision as f64 * 3.33) as u64 + 16;
    loop {
        let (z, eps) = zeta_approx(&e.ctx, bits);
        let v = QPoly::new(e.c.clone()).eval(&z);
        let err = &sens * &eps;
        if !v.is_zero() && err <= &target * v.abs() {
            return HighReal { value: v, error_bound: err, digits: precision };
        }
        bits += 64;
        if bits > 200_000 {
            return HighReal { value: v, error_bound: err, digits: precision };
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldElementRepr {
    n: u64,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldElementRepr {
            n: self.ctx.n,
            coeffs: self.c.iter().map(|a| [a.numer().to_string(), a.denom().to_string()]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FieldElementRepr::deserialize(d)?;
        if r.n == 0 {
            return Err(serde::de::Error::custom("field parameter n must be positive"));
        }
        let ctx = field_new(r.n);
        let mut c = Vec::with_capacity(r.coeffs.len());
        for [num, den] in r.coeffs {
            let num: BigInt = num.parse().map_err(serde::de::Error::custom)?;
            let den: BigInt = den.parse().map_err(serde::de::Error::custom)?;
            if den.is_zero() {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            c.push(BigRational::new(num, den));
        }
        Ok(FieldElement::from_coeffs(&ctx, c))
    }
}

/// Parse a rational from `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Malformed(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let r = BigRational::new(n, num_traits::pow(BigInt::from(10), fp.len()));
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Smallest `N` such that `x = −2cos(πp/q)` with `q | N`, found by matching
/// against small denominators and confirmed exactly in the compound field.
pub fn angle_of(x: &FieldElement, max_den: u64) -> Option<BigRational> {
    let v = (-x.to_f64() / 2.0).clamp(-1.0, 1.0);
    let r = v.acos() / std::f64::consts::PI;
    for q in 1..=max_den {
        let p = (r * q as f64).round() as i64;
        if (p as f64 / q as f64 - r).abs() > 1e-7 || p.unsigned_abs().gcd(&q) != 1 {
            continue;
        }
        let big = field_new(x.ctx.n.lcm(&q));
        let lhs = x.lift(&big).ok()?;
        if elem_from_cos(p, q, &big).ok()? == lhs {
            return Some(BigRational::new(BigInt::from(p), BigInt::from(q)));
        }
    }
    None
}

/// Numerator and denominator of a rational as machine integers.
pub fn rat_parts(r: &BigRational) -> Option<(i64, i64)> {
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(n: u64) -> u64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn small_minimal_polynomials() {
        assert_eq!(field_new(1).minimal_polynomial(), &QPoly::from_ints(&[2, 1]));
        assert_eq!(field_new(2).minimal_polynomial(), &QPoly::from_ints(&[0, 1]));
        assert_eq!(field_new(3).minimal_polynomial(), &QPoly::from_ints(&[-1, 1]));
        assert_eq!(field_new(4).minimal_polynomial(), &QPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(field_new(5).minimal_polynomial(), &QPoly::from_ints(&[-1, -1, 1]));
        assert_eq!(field_new(6).minimal_polynomial(), &QPoly::from_ints(&[-3, 0, 1]));
    }

    #[test]
    fn quotient_construction_agrees() {
        for n in 1..=30 {
            assert_eq!(&minimal_polynomial_by_quotient(n), field_new(n).minimal_polynomial(), "n = {n}");
        }
    }

    #[test]
    fn degree_is_half_totient() {
        for n in 2..=240 {
            assert_eq!(field_new(n).degree() as u64, phi(2 * n) / 2, "n = {n}");
        }
    }

    #[test]
    fn generator_is_a_root() {
        for n in 1..=60u64 {
            let ctx = field_new(n);
            let z = num_complex::Complex64::new(ctx.zeta_f64(), 0.0);
            let v = ctx.minimal_polynomial().eval_c64(z).norm();
            assert!(v < 1e-9 * 4f64.powi(ctx.degree() as i32), "n = {n}: {v}");
            let full = dickson(n).add(&QPoly::from_ints(&[2]));
            assert!(full.div_exact(ctx.minimal_polynomial()).is_some());
        }
    }

    #[test]
    fn golden_polynomial_has_no_rational_root() {
        let p = field_new(5).minimal_polynomial().clone();
        for r in [-1i64, 1] {
            assert_ne!(p.eval(&BigRational::from_integer(BigInt::from(r))), BigRational::zero());
        }
        let g = 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((g * g - g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_squared_in_pentagonal_field() {
        let ctx = field_new(5);
        let z = FieldElement::zeta(&ctx);
        assert_eq!(&z * &z, &z + &FieldElement::one(&ctx));
    }

    #[test]
    fn cosine_elements() {
        let c3 = field_new(3);
        assert_eq!(elem_from_cos(1, 3, &c3).unwrap(), FieldElement::from_int(&c3, -1));
        let c2 = field_new(2);
        assert!(elem_from_cos(1, 2, &c2).unwrap().is_zero());
        let c5 = field_new(5);
        let e = elem_from_cos(2, 5, &c5).unwrap();
        assert_eq!(e, &FieldElement::from_int(&c5, 1) - &FieldElement::zeta(&c5));
        assert!((e.to_f64() + 2.0 * (0.4 * std::f64::consts::PI).cos()).abs() < 1e-12);
        assert_eq!(elem_from_cos(1, 3, &c5), Err(ExactError::IncompatibleField { q: 3, n: 5 }));
    }

    #[test]
    fn cosine_embedding_table() {
        for q in 1..=60u64 {
            let ctx = field_new(q);
            for p in 0..=q as i64 {
                let e = elem_from_cos(p, q, &ctx).unwrap();
                let want = -2.0 * (std::f64::consts::PI * p as f64 / q as f64).cos();
                assert!((e.to_f64() - want).abs() < 1e-12, "{p}/{q}");
            }
        }
    }

    #[test]
    fn high_precision_embedding() {
        let c5 = field_new(5);
        let e = elem_from_cos(1, 5, &c5).unwrap();
        let h = embed_real(&e, 60);
        assert_eq!(format!("{}", embed_real(&e, 12)), "-1.618033988750");
        assert!(h.to_string().starts_with("-1.618033988749894848204586834365638117720309179805762862135"));
        assert_eq!(embed_real(&elem_from_cos(1, 3, &field_new(3)).unwrap(), 12).to_string(), "-1.000000000000");
        assert_eq!(embed_real(&FieldElement::zero(&c5), 5).to_string(), "0.00000");
    }

    #[test]
    fn inverse_and_division() {
        let ctx = field_new(7);
        let a = &FieldElement::zeta(&ctx) + &FieldElement::from_int(&ctx, 3);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, FieldElement::one(&ctx));
        assert!(FieldElement::zero(&ctx).inverse().is_err());
    }

    #[test]
    fn lifting_preserves_values() {
        let c5 = field_new(5);
        let c30 = field_new(30);
        let e = elem_from_cos(2, 5, &c5).unwrap();
        let l = e.lift(&c30).unwrap();
        assert_eq!(l, elem_from_cos(2, 5, &c30).unwrap());
        assert!(e.lift(&field_new(6)).is_err());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = FieldElement::one(&field_new(5));
        let b = FieldElement::one(&field_new(7));
        assert_eq!(a.checked_add(&b), Err(ExactError::ContextMismatch(5, 7)));
    }

    #[test]
    fn json_round_trip() {
        let ctx = field_new(5);
        let e = elem_from_cos(1, 5, &ctx).unwrap().scale(&BigRational::new(BigInt::from(7), BigInt::from(3)));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"n":5,"coeffs":[["0","1"],["-7","3"]]}"#);
        let back: FieldElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn exact_comparison_and_angles() {
        let ctx = field_new(5);
        let a = elem_from_cos(1, 5, &ctx).unwrap();
        let b = elem_from_cos(2, 5, &ctx).unwrap();
        assert_eq!(a.cmp_real(&b), Ordering::Less);
        assert_eq!(a.abs_cmp_real(&b), Ordering::Greater);
        assert_eq!(angle_of(&b, 60), Some(BigRational::new(BigInt::from(2), BigInt::from(5))));
        assert_eq!(angle_of(&FieldElement::zero(&ctx), 60), Some(BigRational::new(BigInt::from(1), BigInt::from(2))));
        assert_eq!(parse_rational("-0.25").unwrap(), BigRational::new(BigInt::from(-1), BigInt::from(4)));
        assert_eq!(parse_rational("2/6").unwrap(), BigRational::new(BigInt::from(1), BigInt::from(3)));
    }
}
