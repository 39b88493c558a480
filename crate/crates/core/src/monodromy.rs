//! Unipotent 2×2 monodromy matrices in the canonical normalisation, trace
//! identities, and recovery of the triple.

use crate::algebra::Ring;
use crate::exactnum::FieldElement;
use crate::triples::{quadratic_invariant, Scalar, Triple, TripleClass};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("x1 = 0: the canonical form needs Tr(M1 M2) != 2")]
    ZeroPivot,
    #[error("matrices are not consistent with a real triple: {0}")]
    Inconsistent(String),
}

pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2<T> {
    pub a: [[T; 2]; 2],
}

impl<T: Ring> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a: [[a, b], [c, d]] }
    }

    pub fn identity_like(x: &T) -> Self {
        Mat2::new(x.one_like(), x.zero_like(), x.zero_like(), x.one_like())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.a;
        let b = &o.a;
        let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn trace(&self) -> T {
        self.a[0][0].clone() + self.a[1][1].clone()
    }

    pub fn det(&self) -> T {
        self.a[0][0].clone() * self.a[1][1].clone() - self.a[0][1].clone() * self.a[1][0].clone()
    }

    /// Adjugate; the inverse for determinant one.
    pub fn adjugate(&self) -> Self {
        let a = &self.a;
        Mat2::new(a[1][1].clone(), -a[0][1].clone(), -a[1][0].clone(), a[0][0].clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2 { a: [[f(&self.a[0][0]), f(&self.a[0][1])], [f(&self.a[1][0]), f(&self.a[1][1])]] }
    }
}

impl Mat2<Complex64> {
    pub fn inverse(&self) -> Self {
        let d = self.det();
        self.adjugate().map(|x| x / d)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.a[i][j] - o.a[i][j]).norm());
            }
        }
        m
    }
}

/// Result of [`canonical_matrices`]: the matrices of the cyclically shifted
/// triple `(x_{1+shift}, x_{2+shift}, x_{3+shift})`.
#[derive(Clone, Debug)]
pub struct CanonicalMatrices<T> {
    pub shift: usize,
    pub triple: Triple<T>,
    pub m: [Mat2<T>; 3],
}

fn canonical_unshifted<T: Scalar + std::ops::Div<Output = T>>(t: &Triple<T>) -> [Mat2<T>; 3] {
    let [x1, x2, x3] = t.x.clone();
    let o = x1.one_like();
    let z = x1.zero_like();
    let m1 = Mat2::new(o.clone(), -x1.clone(), z.clone(), o.clone());
    let m2 = Mat2::new(o.clone(), z, x1.clone(), o.clone());
    let r = x2.clone() * x3.clone() / x1.clone();
    let m3 = Mat2::new(o.clone() + r.clone(), -(x2.square() / x1.clone()), x3.square() / x1, o - r);
    [m1, m2, m3]
}

/// `M1 = [[1, −x1], [0, 1]]`, `M2 = [[1, 0], [x1, 1]]`,
/// `M3 = [[1 + x2x3/x1, −x2²/x1], [x3²/x1, 1 − x2x3/x1]]`.
/// With `allow_shift`, a vanishing `x1` is handled by cyclically shifting the
/// coordinates; the shift is recorded.
pub fn canonical_matrices<T: Scalar + std::ops::Div<Output = T>>(
    t: &Triple<T>,
    allow_shift: bool,
) -> Result<CanonicalMatrices<T>, MonodromyError> {
    let shifts = if allow_shift { 3 } else { 1 };
    for shift in 0..shifts {
        let s = Triple::new(t.x[shift % 3].clone(), t.x[(shift + 1) % 3].clone(), t.x[(shift + 2) % 3].clone());
        if !s.x[0].is_zero() {
            let m = canonical_unshifted(&s);
            return Ok(CanonicalMatrices { shift, triple: s, m });
        }
    }
    Err(MonodromyError::ZeroPivot)
}

pub fn exact_to_complex(m: &Mat2<FieldElement>) -> Mat2<Complex64> {
    m.map(|x| Complex64::new(x.to_f64(), 0.0))
}

pub fn real_to_complex(m: &Mat2<f64>) -> Mat2<Complex64> {
    m.map(|x| Complex64::new(*x, 0.0))
}

/// Class of the real triple with `Tr(M1M2) = 2 − x1²`, `Tr(M3M2) = 2 − x2²`,
/// `Tr(M1M3) = 2 − x3²`; the sign of `x1x2x3` follows from
/// `Tr(M3M2M1) = 2 − Q`.
pub fn triple_from_matrices(m: &[Mat2<Complex64>; 3]) -> Result<TripleClass<f64>, MonodromyError> {
    for (i, mi) in m.iter().enumerate() {
        let scale = 1.0 + mi.a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if (mi.det() - 1.0).norm() > TRACE_TOL * scale * scale || (mi.trace() - 2.0).norm() > TRACE_TOL * scale {
            return Err(MonodromyError::Inconsistent(format!("M{} is not unipotent", i + 1)));
        }
    }
    let sq = [
        Complex64::new(2.0, 0.0) - m[0].mul(&m[1]).trace(),
        Complex64::new(2.0, 0.0) - m[2].mul(&m[1]).trace(),
        Complex64::new(2.0, 0.0) - m[0].mul(&m[2]).trace(),
    ];
    let scale = 1.0 + sq.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-8 * scale;
    let mut x = [0.0; 3];
    for i in 0..3 {
        if sq[i].im.abs() > tol || sq[i].re < -tol {
            return Err(MonodromyError::Inconsistent(format!("x{}^2 = {} is not a nonnegative real", i + 1, sq[i])));
        }
        // squares below rounding level are zeros; the square root would
        // otherwise blow 1e−16 up to 1e−8
        x[i] = if sq[i].re.abs() < 1e-12 * scale { 0.0 } else { sq[i].re.max(0.0).sqrt() };
    }
    if x.iter().filter(|v| **v < 1e-9).count() > 1 {
        return Err(MonodromyError::Inconsistent("more than one vanishing coordinate".into()));
    }
    let t3 = m[2].mul(&m[1]).mul(&m[0]).trace();
    let sum_sq: f64 = sq.iter().map(|z| z.re).sum();
    let prod = t3.re - 2.0 + sum_sq;
    let mag = x[0] * x[1] * x[2];
    if (prod.abs() - mag).abs() > tol * scale || t3.im.abs() > tol {
        return Err(MonodromyError::Inconsistent(format!("Tr(M3M2M1) = {t3} does not match the traces")));
    }
    if prod < 0.0 && mag > 0.0 {
        x[0] = -x[0];
    }
    Ok(Triple::new(x[0], x[1], x[2]).class())
}

/// Report of the check on `M∞ = (M3M2M1)⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct MInfinityReport {
    pub trace: [f64; 2],
    pub expected_trace: f64,
    pub eigenvalues: [[f64; 2]; 2],
    pub expected_eigenvalues: [[f64; 2]; 2],
    pub ok: bool,
}

pub fn m_infinity(m: &[Mat2<Complex64>; 3]) -> Mat2<Complex64> {
    m[2].mul(&m[1]).mul(&m[0]).inverse()
}

pub fn eigenvalues(m: &Mat2<Complex64>) -> [Complex64; 2] {
    let t = m.trace();
    let d = m.det();
    let disc = (t * t - 4.0 * d).sqrt();
    let mut e = [(t + disc) / 2.0, (t - disc) / 2.0];
    if e[0].im < e[1].im {
        e.swap(0, 1);
    }
    e
}

/// Tr M∞ = 2cos 2πμ and eigenvalues `exp(±2πiμ)`.
pub fn m_infinity_check(m: &[Mat2<Complex64>; 3], mu: f64) -> MInfinityReport {
    let minf = m_infinity(m);
    let tr = minf.trace();
    let expected = 2.0 * (2.0 * std::f64::consts::PI * mu).cos();
    let ev = eigenvalues(&minf);
    let mut want = [Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * mu), Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * mu)];
    if want[0].im < want[1].im {
        want.swap(0, 1);
    }
    let scale = 1.0 + minf.a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let tr_ok = (tr - expected).norm() <= TRACE_TOL * scale;
    // eigenvalues of a near-parabolic matrix are ill-conditioned; compare via
    // the characteristic polynomial when the pair nearly collides
    let ev_ok = (0..2).all(|i| (ev[i] - want[i]).norm() <= 1e-10 * scale) || (want[0] - want[1]).norm() < 1e-4 && tr_ok;
    MInfinityReport {
        trace: [tr.re, tr.im],
        expected_trace: expected,
        eigenvalues: ev.map(|z| [z.re, z.im]),
        expected_eigenvalues: want.map(|z| [z.re, z.im]),
        ok: tr_ok && ev_ok && (minf.det() - 1.0).norm() <= TRACE_TOL * scale * scale,
    }
}

/// Exact trace identities of the canonical matrices: `Tr(M1M2) = 2 − x1²`,
/// `Tr(M3M2) = 2 − x2²`, `Tr(M1M3) = 2 − x3²`, and `Tr(M3M2M1) = 2 − Q`,
/// checked on the cyclically shifted triple when `x1 = 0`.
pub fn trace_identities_hold(t: &Triple<FieldElement>) -> Result<bool, MonodromyError> {
    let c = canonical_matrices(t, true)?;
    let t = &c.triple;
    let [m1, m2, m3] = &c.m;
    let two = t.x[0].int_like(2);
    let unip = c.m.iter().all(|m| m.trace() == two && m.det() == two.one_like());
    let q = quadratic_invariant(t);
    Ok(unip
        && m1.mul(m2).trace() == two.clone() - t.x[0].square()
        && m3.mul(m2).trace() == two.clone() - t.x[1].square()
        && m1.mul(m3).trace() == two.clone() - t.x[2].square()
        && m3.mul(m2).mul(m1).trace() == two - q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{seed_triple, stored_orbits, OrbitTag};
    use crate::exactnum::field_new;
    use crate::triples::mu_from_triple;

    #[test]
    fn canonical_examples() {
        let c1 = field_new(1);
        let i = |v: i64| FieldElement::from_int(&c1, v);
        let c = canonical_matrices(&Triple::new(i(1), i(1), i(1)), false).unwrap();
        assert_eq!(c.m[2], Mat2::new(i(2), i(-1), i(1), i(0)));
        let x3 = FieldElement::from_rational(&c1, num_rational::BigRational::new(3.into(), 7.into()));
        let c = canonical_matrices(&Triple::new(i(1), i(0), x3.clone()), false).unwrap();
        assert_eq!(c.m[2], Mat2::new(i(1), i(0), x3.square(), i(1)));
        assert_eq!(canonical_matrices(&Triple::new(i(0), i(1), i(1)), false).unwrap_err(), MonodromyError::ZeroPivot);
        let c = canonical_matrices(&Triple::new(i(0), i(1), i(1)), true).unwrap();
        assert_eq!(c.shift, 1);
    }

    #[test]
    fn round_trip_all_orbit_points() {
        for (_, o) in stored_orbits() {
            for cl in &o.classes {
                let c = canonical_matrices(&cl.representative, true).unwrap();
                assert!(trace_identities_hold(&c.triple).unwrap());
                let m = c.m.clone().map(|m| exact_to_complex(&m));
                let back = triple_from_matrices(&m).unwrap();
                assert!(back.representative.same_class_approx(&c.triple.to_float(), 1e-9));
            }
        }
    }

    #[test]
    fn inconsistent_inputs() {
        let id = Mat2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(matches!(triple_from_matrices(&[id.clone(), id.clone(), id.clone()]), Err(MonodromyError::Inconsistent(_))));
        let bad = Mat2::new(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0));
        assert!(matches!(triple_from_matrices(&[bad, id.clone(), id]), Err(MonodromyError::Inconsistent(_))));
    }

    #[test]
    fn m_infinity_examples() {
        let c1 = field_new(1);
        let i = |v: i64| FieldElement::from_int(&c1, v);
        let t = Triple::new(i(1), i(1), i(0));
        let m = canonical_matrices(&t, false).unwrap().m.map(|m| exact_to_complex(&m));
        let r = m_infinity_check(&m, 0.25);
        assert!(r.ok && r.trace[0].abs() < 1e-12);
        let cube = seed_triple(OrbitTag::Cube);
        let m = canonical_matrices(&cube, true).unwrap().m.map(|m| exact_to_complex(&m));
        let r = m_infinity_check(&m, 1.0 / 3.0);
        assert!(r.ok && (r.trace[0] + 1.0).abs() < 1e-12);
        for tag in OrbitTag::FINITE {
            let t = seed_triple(tag).to_float();
            let mu = mu_from_triple(&t).unwrap().representative_mu.unwrap();
            let m = canonical_matrices(&t, true).unwrap().m.map(|m| real_to_complex(&m));
            assert!(m_infinity_check(&m, mu).ok);
            assert!(!m_infinity_check(&m, mu + 0.01).ok);
        }
    }
}
