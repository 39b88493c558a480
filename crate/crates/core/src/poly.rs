//! Dense univariate polynomials over the rationals.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Polynomial with exact rational coefficients, lowest degree first.
///
/// The coefficient vector never has trailing zeros, so the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct QPoly {
    c: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(v: BigRational) -> Self {
        Self::new(vec![v])
    }

    /// The monomial `s`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        QPoly {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut r = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        Self::new(r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.c.iter().cloned());
        QPoly { c }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        let lead_inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &lead_inv;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Extended Euclid: returns (g, u, v) with u·self + v·o = g, g monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = r0.lead().recip();
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * rat(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.c.iter().rev() {
            acc = acc * z + a.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// `s^deg · p(1/s)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(c)
    }

    /// Multiplicity of `s = 0` as a root.
    pub fn low_order(&self) -> usize {
        self.c.iter().take_while(|a| a.is_zero()).count()
    }

    /// Square-free decomposition (Yun): pairs `(f, m)` with `self = c·∏ f^m`,
    /// each `f` monic, square-free and pairwise coprime.
    pub fn squarefree(&self) -> Vec<(QPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_exact(&a).expect("gcd divides");
        let mut c = fp.div_exact(&a).expect("gcd divides derivative");
        let mut d = c.sub(&b.derivative());
        let mut i = 1u32;
        while b.degree().unwrap_or(0) > 0 {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_exact(&g).expect("gcd divides");
            c = d.div_exact(&g).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// All complex roots by Aberth iteration followed by Newton polishing.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Vec::new(),
        };
        let lead = self.lead().to_f64().unwrap_or(1.0);
        let c: Vec<Complex64> = self
            .c
            .iter()
            .map(|a| Complex64::new(a.to_f64().unwrap_or(0.0) / lead, 0.0))
            .collect();
        let eval = |z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for a in c.iter().rev() {
                dp = dp * z + p;
                p = p * z + a;
            }
            (p, dp)
        };
        let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let w = ratio / (1.0 - ratio * sum);
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = eval(*zi);
                if dp.norm() > 0.0 {
                    *zi -= p / dp;
                }
            }
        }
        z
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show = !(mag.is_one() && i > 0);
            if show {
                write!(f, "{}", mag)?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}z", if show { "*" } else { "" })?,
                _ => write!(f, "{}z^{}", if show { "*" } else { "" }, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let a = QPoly::from_ints(&[1, -3, 0, 2, 5]);
        let b = QPoly::from_ints(&[2, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = QPoly::from_ints(&[-1, 1]);
        let a = f.mul(&QPoly::from_ints(&[2, 1]));
        let b = f.mul(&QPoly::from_ints(&[3, 0, 1]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn xgcd_bezout() {
        let a = QPoly::from_ints(&[-1, -1, 1]);
        let b = QPoly::from_ints(&[3, 2]);
        let (g, u, v) = a.xgcd(&b);
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
        assert_eq!(g, QPoly::one());
    }

    #[test]
    fn squarefree_multiplicities() {
        let f1 = QPoly::from_ints(&[-1, 1]);
        let f2 = QPoly::from_ints(&[-1, 4, 1]);
        let p = f1.pow(5).mul(&f2).mul(&QPoly::from_ints(&[1, 3]).pow(3)).scale(&rat(7));
        let sf = p.squarefree();
        let mut got: Vec<(usize, u32)> = sf.iter().map(|(f, m)| (f.degree().unwrap(), *m)).collect();
        got.sort();
        assert_eq!(got, vec![(1, 3), (1, 5), (2, 1)]);
        let rebuilt = sf.iter().fold(QPoly::one(), |acc, (f, m)| acc.mul(&f.pow(*m)));
        assert_eq!(rebuilt, p.monic());
    }

    #[test]
    fn roots_of_golden_polynomial() {
        let mut r: Vec<f64> = QPoly::from_ints(&[-1, -1, 1]).complex_roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((r[1] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }
}
