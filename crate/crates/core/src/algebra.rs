//! Small algebraic traits shared by exact and floating scalars, Gaussian
//! rationals, and truncated Taylor jets.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Commutative ring with constants obtained from an existing element
/// (exact field elements need their context to build `0` and `1`).
pub trait Ring:
    Clone + PartialEq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn int_like(&self, v: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        let mut base = one;
        let mut k = v.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc + base.clone();
            }
            base = base.clone() + base;
            k >>= 1;
        }
        if v < 0 {
            -acc
        } else {
            acc
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

/// Ring with division and rational constants.
pub trait Field: Ring + Div<Output = Self> {
    fn rational_like(&self, r: &BigRational) -> Self;
}

impl Ring for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn int_like(&self, v: i64) -> Self {
        v as f64
    }
}

impl Field for f64 {
    fn rational_like(&self, r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Ring for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn int_like(&self, v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl Field for Complex64 {
    fn rational_like(&self, r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Exact Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRat { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        CRat::new(BigRational::from_integer(BigInt::from(re)), BigRational::from_integer(BigInt::from(im)))
    }

    pub fn conj(&self) -> Self {
        CRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Modulus as a float, robust for huge numerators and denominators.
    pub fn abs_f64(&self) -> f64 {
        rat_to_f64(&self.norm_sqr()).sqrt()
    }
}

/// Rational to float that stays finite when numerator and denominator
/// individually overflow `f64`.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom().clone() << (shift as usize))
    } else {
        BigRational::new(r.numer().clone() << ((-shift) as usize), r.denom().clone())
    };
    let m = scaled.to_f64().unwrap_or(f64::NAN);
    m * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, o: CRat) -> CRat {
        CRat::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, o: CRat) -> CRat {
        CRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, o: CRat) -> CRat {
        CRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div for CRat {
    type Output = CRat;
    fn div(self, o: CRat) -> CRat {
        let d = o.norm_sqr();
        assert!(!d.is_zero(), "Gaussian rational division by zero");
        let n = self * o.conj();
        CRat::new(n.re / &d, n.im / d)
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re, -self.im)
    }
}

impl Ring for CRat {
    fn zero_like(&self) -> Self {
        CRat::from_ints(0, 0)
    }
    fn one_like(&self) -> Self {
        CRat::from_ints(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn int_like(&self, v: i64) -> Self {
        CRat::from_ints(v, 0)
    }
}

impl Field for CRat {
    fn rational_like(&self, r: &BigRational) -> Self {
        CRat::real(r.clone())
    }
}

/// Truncated Taylor expansion `c0 + c1·ε + … + c_{n-1}·ε^{n-1}`.
///
/// Binary operations truncate to the shorter operand.
#[derive(Clone, PartialEq, Debug)]
pub struct Jet<F> {
    pub c: Vec<F>,
}

impl<F: Field> Jet<F> {
    pub fn constant(v: F, len: usize) -> Self {
        let z = v.zero_like();
        let mut c = vec![z; len];
        c[0] = v;
        Jet { c }
    }

    /// The jet of the independent variable at `v`: `v + ε`.
    pub fn variable(v: F, len: usize) -> Self {
        let mut j = Self::constant(v, len);
        if len > 1 {
            j.c[1] = j.c[0].one_like();
        }
        j
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn value(&self) -> &F {
        &self.c[0]
    }

    /// d/dε; the result is one order shorter.
    pub fn derivative(&self) -> Self {
        Jet {
            c: self
                .c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.clone() * a.int_like(i as i64))
                .collect(),
        }
    }

    pub fn truncate(&self, len: usize) -> Self {
        Jet { c: self.c[..len.min(self.c.len())].to_vec() }
    }

    /// Evaluate a rational polynomial at this jet (Horner).
    pub fn eval_poly(&self, p: &crate::poly::QPoly) -> Self {
        let z = self.c[0].zero_like();
        let mut acc = Jet::constant(z, self.len());
        for a in p.coeffs().iter().rev() {
            let k = self.c[0].rational_like(a);
            acc = acc * self.clone();
            acc.c[0] = acc.c[0].clone() + k;
        }
        acc
    }
}

impl<F: Field> Add for Jet<F> {
    type Output = Jet<F>;
    fn add(self, o: Jet<F>) -> Jet<F> {
        let n = self.len().min(o.len());
        Jet { c: (0..n).map(|i| self.c[i].clone() + o.c[i].clone()).collect() }
    }
}

impl<F: Field> Sub for Jet<F> {
    type Output = Jet<F>;
    fn sub(self, o: Jet<F>) -> Jet<F> {
        let n = self.len().min(o.len());
        Jet { c: (0..n).map(|i| self.c[i].clone() - o.c[i].clone()).collect() }
    }
}

impl<F: Field> Mul for Jet<F> {
    type Output = Jet<F>;
    fn mul(self, o: Jet<F>) -> Jet<F> {
        let n = self.len().min(o.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.c[0].zero_like();
            for i in 0..=k {
                if self.c[i].is_zero() || o.c[k - i].is_zero() {
                    continue;
                }
                acc = acc + self.c[i].clone() * o.c[k - i].clone();
            }
            c.push(acc);
        }
        Jet { c }
    }
}

impl<F: Field> Div for Jet<F> {
    type Output = Jet<F>;
    fn div(self, o: Jet<F>) -> Jet<F> {
        let n = self.len().min(o.len());
        assert!(!o.c[0].is_zero(), "jet division by a series with zero constant term");
        let inv0 = o.c[0].one_like() / o.c[0].clone();
        let mut q: Vec<F> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.c[k].clone();
            for i in 1..=k {
                if !o.c[i].is_zero() {
                    acc = acc - o.c[i].clone() * q[k - i].clone();
                }
            }
            q.push(acc * inv0.clone());
        }
        Jet { c: q }
    }
}

impl<F: Field> Neg for Jet<F> {
    type Output = Jet<F>;
    fn neg(self) -> Jet<F> {
        Jet { c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl<F: Field> Ring for Jet<F> {
    fn zero_like(&self) -> Self {
        Jet::constant(self.c[0].zero_like(), self.len())
    }
    fn one_like(&self) -> Self {
        Jet::constant(self.c[0].one_like(), self.len())
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }
    fn int_like(&self, v: i64) -> Self {
        Jet::constant(self.c[0].int_like(v), self.len())
    }
}

impl<F: Field> Field for Jet<F> {
    fn rational_like(&self, r: &BigRational) -> Self {
        Jet::constant(self.c[0].rational_like(r), self.len())
    }
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Decimal rendering of a rational with `digits` fractional digits
/// (round half away from zero).
pub fn rat_to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() { -((-scaled) + half).floor() } else { (scaled + half).floor() };
    let n = rounded.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
    let (ip, fp) = s.split_at(s.len() - digits);
    let body = if digits == 0 { ip.to_string() } else { format!("{}.{}", ip, fp) };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_division_inverts_multiplication() {
        let a = Jet { c: vec![2.0, 1.0, -3.0, 0.5] };
        let b = Jet { c: vec![1.0, 4.0, 2.0, -1.0] };
        let q = (a.clone() * b.clone()) / b;
        for (x, y) in q.c.iter().zip(a.c.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_poly_derivatives() {
        // p(s) = s^3 at s = 2: 8, 12, 6, 1
        let p = crate::poly::QPoly::from_ints(&[0, 0, 0, 1]);
        let j = Jet::variable(CRat::from_ints(2, 0), 4).eval_poly(&p);
        let want = [8, 12, 6, 1];
        for (x, w) in j.c.iter().zip(want) {
            assert_eq!(*x, CRat::from_ints(w, 0));
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&ratio(-1, 3), 4), "-0.3333");
        assert_eq!(rat_to_decimal(&ratio(2, 3), 2), "0.67");
        assert_eq!(rat_to_decimal(&ratio(5, 1), 0), "5");
        assert_eq!(rat_to_decimal(&ratio(1, 200), 2), "0.01");
    }

    #[test]
    fn huge_rational_to_float() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * BigInt::from(3), big * BigInt::from(7));
        assert!((rat_to_f64(&r) - 3.0 / 7.0).abs() < 1e-15);
    }
}
