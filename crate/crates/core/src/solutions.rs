//! The algebraic solutions in parametric form `x = x(s)`, `y = y(s)`:
//! evaluation, exact residual checks against PVIμ, the μ ↦ −μ symmetry,
//! branch data over the critical points, and the Puiseux table of the
//! 18-branch solution.

use crate::algebra::{rat_to_f64, CRat, Field, Jet, Ring};
use crate::classify::{lift_triple, OrbitTag};
use crate::connection::{coefficient_at, index_from_angle_exact, CriticalPoint};
use crate::exactnum::{angle_of, elem_from_cos, field_new, FieldElement};
use crate::poly::QPoly;
use crate::pvi::pvi_rhs_alpha;
use crate::triples::{orbit_enumerate, GroupKind, Triple};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("parameter {0} is a pole of the parametrisation")]
    SingularParameter(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("denominator of the μ ↦ −μ transform vanishes")]
    VanishingDenominator,
    #[error("unknown solution id {0}")]
    UnknownId(String),
    #[error("branch index {0} outside 1..=18")]
    BadBranch(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionId {
    A3,
    B3,
    H3,
    H3p,
    /// The tetrahedral pair with `x(s)` negated; see the errata.
    A3Amended,
}

impl SolutionId {
    pub const ALL: [SolutionId; 5] = [SolutionId::A3, SolutionId::B3, SolutionId::H3, SolutionId::H3p, SolutionId::A3Amended];

    pub fn name(self) -> &'static str {
        match self {
            SolutionId::A3 => "a3",
            SolutionId::B3 => "b3",
            SolutionId::H3 => "h3",
            SolutionId::H3p => "h3p",
            SolutionId::A3Amended => "a3-amended",
        }
    }

    pub fn orbit(self) -> OrbitTag {
        match self {
            SolutionId::A3 | SolutionId::A3Amended => OrbitTag::Tetrahedron,
            SolutionId::B3 => OrbitTag::Cube,
            SolutionId::H3 => OrbitTag::Icosahedron,
            SolutionId::H3p => OrbitTag::GreatIcosahedron,
        }
    }
}

impl fmt::Display for SolutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolutionId {
    type Err = SolutionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a3" => Ok(SolutionId::A3),
            "b3" => Ok(SolutionId::B3),
            "h3" => Ok(SolutionId::H3),
            "h3p" | "h3'" => Ok(SolutionId::H3p),
            "a3-amended" | "a3a" => Ok(SolutionId::A3Amended),
            _ => Err(SolutionError::UnknownId(s.to_string())),
        }
    }
}

/// Product `c · Π f_i^{e_i}` of integer polynomials.
#[derive(Clone, Debug)]
pub struct Factored {
    pub constant: i64,
    pub factors: Vec<(Vec<i64>, u32)>,
}

impl Factored {
    fn new(constant: i64, factors: &[(&[i64], u32)]) -> Self {
        Factored { constant, factors: factors.iter().map(|(c, e)| (c.to_vec(), *e)).collect() }
    }

    pub fn expand(&self) -> QPoly {
        self.factors
            .iter()
            .fold(QPoly::from_ints(&[self.constant]), |acc, (c, e)| acc.mul(&QPoly::from_ints(c).pow(*e)))
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constant != 1 {
            write!(f, "{}", self.constant)?;
        }
        for (c, e) in &self.factors {
            write!(f, "({})", QPoly::from_ints(c))?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// `y = y_num/y_den`, `x = x_num/x_den` in the parameter `s`.
#[derive(Clone, Debug)]
pub struct ParametricSolution {
    pub id: SolutionId,
    pub mu: BigRational,
    pub y_num: Factored,
    pub y_den: Factored,
    pub x_num: Factored,
    pub x_den: Factored,
    pub yn: QPoly,
    pub yd: QPoly,
    pub xn: QPoly,
    pub xd: QPoly,
}

// factor tables, lowest degree first
const SM1: &[i64] = &[-1, 1]; // s − 1
const SP1: &[i64] = &[1, 1]; // 1 + s
const P3S: &[i64] = &[1, 3]; // 1 + 3s
const M3S: &[i64] = &[1, -3]; // 1 − 3s
const N3S: &[i64] = &[-1, 3]; // −1 + 3s
const Q4P: &[i64] = &[-1, 4, 1]; // −1 + 4s + s²
const Q4M: &[i64] = &[-1, -4, 1]; // −1 − 4s + s²
const H3_P: &[i64] = &[
    49, 0, -2133, 0, 34308, 0, -259044, 0, 16422878, 0, -7616646, 0, 13758708, 0, 5963724, 0, -719271, 0, 42483,
];
const H3P_P: &[i64] = &[9, 0, -342, 0, 4855, 0, -28852, 0, 63015, 0, -1942, 0, 121];

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn solution(id: SolutionId) -> ParametricSolution {
    let (mu, y_num, y_den, x_num, x_den) = match id {
        SolutionId::A3 | SolutionId::A3Amended => (
            rat(-1, 4),
            Factored::new(1, &[(SM1, 2), (P3S, 1), (&[-5, 0, 9], 2)]),
            Factored::new(1, &[(SP1, 1), (&[25, 0, -207, 0, 1539, 0, 243], 1)]),
            Factored::new(if id == SolutionId::A3 { 1 } else { -1 }, &[(SM1, 3), (P3S, 1)]),
            Factored::new(1, &[(SP1, 3), (M3S, 1)]),
        ),
        SolutionId::B3 => (
            rat(-1, 3),
            Factored::new(1, &[(&[2, -1], 2), (SP1, 1)]),
            Factored::new(1, &[(&[2, 1], 1), (&[9, 0, -10, 0, 5], 1)]),
            Factored::new(1, &[(&[2, -1], 2), (SP1, 1)]),
            Factored::new(1, &[(&[2, 1], 2), (&[1, -1], 1)]),
        ),
        SolutionId::H3 => (
            rat(-2, 5),
            Factored::new(1, &[(SM1, 2), (P3S, 2), (Q4P, 1), (&[7, 0, -108, 0, 314, 0, -588, 0, 119], 2)]),
            Factored::new(1, &[(SP1, 3), (N3S, 1), (H3_P, 1)]),
            Factored::new(1, &[(SM1, 5), (P3S, 3), (Q4P, 1)]),
            Factored::new(1, &[(SP1, 5), (N3S, 3), (Q4M, 1)]),
        ),
        SolutionId::H3p => (
            rat(-1, 5),
            Factored::new(1, &[(SM1, 4), (P3S, 2), (Q4P, 1), (&[3, 0, -30, 0, 11], 2)]),
            Factored::new(1, &[(SP1, 1), (N3S, 1), (&[1, 0, 3], 1), (H3P_P, 1)]),
            Factored::new(1, &[(SM1, 5), (P3S, 3), (Q4P, 1)]),
            Factored::new(1, &[(SP1, 5), (N3S, 3), (Q4M, 1)]),
        ),
    };
    let (yn, yd, xn, xd) = (y_num.expand(), y_den.expand(), x_num.expand(), x_den.expand());
    ParametricSolution { id, mu, y_num, y_den, x_num, x_den, yn, yd, xn, xd }
}

/// Monodromy triple `(x0, x1, x∞)` attached to each solution.
pub fn stated_triple(id: SolutionId) -> Triple<FieldElement> {
    let c5 = field_new(20);
    let e = |p: i64, q: u64| elem_from_cos(p, q, &c5).unwrap();
    let z = FieldElement::zero(&c5);
    let m1 = FieldElement::from_int(&c5, -1);
    match id {
        SolutionId::A3 | SolutionId::A3Amended => Triple::new(m1.clone(), z, m1),
        SolutionId::B3 => Triple::new(m1, z, e(1, 4)),
        SolutionId::H3 => Triple::new(z, m1, e(1, 5)),
        SolutionId::H3p => Triple::new(m1, z, e(2, 5)),
    }
}

pub fn eval_crat(p: &QPoly, s: &CRat) -> CRat {
    let mut acc = s.zero_like();
    for a in p.coeffs().iter().rev() {
        acc = acc * s.clone() + CRat::real(a.clone());
    }
    acc
}

fn scale_at(p: &QPoly, z: Complex64) -> f64 {
    let r = z.norm();
    p.coeffs().iter().enumerate().map(|(k, a)| rat_to_f64(a).abs() * r.powi(k as i32)).sum()
}

impl ParametricSolution {
    pub fn mu_f64(&self) -> f64 {
        rat_to_f64(&self.mu)
    }

    /// Poles of `x(s)` and `y(s)`.
    pub fn singular_params(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = [&self.xd, &self.yd]
            .iter()
            .flat_map(|p| p.squarefree().into_iter().flat_map(|(f, _)| f.complex_roots()))
            .collect();
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    /// `(x, y)` at a complex parameter.
    pub fn eval(&self, s: Complex64) -> Result<(Complex64, Complex64), SolutionError> {
        for d in [&self.xd, &self.yd] {
            if d.eval_c64(s).norm() <= 1e-13 * scale_at(d, s) {
                return Err(SolutionError::SingularParameter(format!("{s}")));
            }
        }
        Ok((self.xn.eval_c64(s) / self.xd.eval_c64(s), self.yn.eval_c64(s) / self.yd.eval_c64(s)))
    }

    /// Exact `(x, y)` at a Gaussian-rational parameter.
    pub fn eval_exact(&self, s: &CRat) -> Result<(CRat, CRat), SolutionError> {
        let xd = eval_crat(&self.xd, s);
        let yd = eval_crat(&self.yd, s);
        if xd.is_zero() || yd.is_zero() {
            return Err(SolutionError::SingularParameter(format!("{}", s.to_c64())));
        }
        Ok((eval_crat(&self.xn, s) / xd, eval_crat(&self.yn, s) / yd))
    }

    /// `(x, y, dy/dx)` at a complex parameter.
    pub fn state(&self, s: Complex64) -> Result<(Complex64, Complex64, Complex64), SolutionError> {
        let j = Jet::variable(s, 2);
        let xd = j.eval_poly(&self.xd);
        let yd = j.eval_poly(&self.yd);
        if xd.c[0].norm() <= 1e-13 * scale_at(&self.xd, s) || yd.c[0].norm() <= 1e-13 * scale_at(&self.yd, s) {
            return Err(SolutionError::SingularParameter(format!("{s}")));
        }
        let x = j.eval_poly(&self.xn) / xd;
        let y = j.eval_poly(&self.yn) / yd;
        if x.c[1].norm() == 0.0 {
            return Err(SolutionError::DegenerateSample("dx/ds = 0".into()));
        }
        Ok((x.c[0], y.c[0], y.c[1] / x.c[1]))
    }

    /// Parameters where the sample would be degenerate: poles, `x ∈ {0, 1}`,
    /// `y ∈ {0, 1, x}` and critical points of `x(s)`.
    pub fn excluded_parameters(&self) -> Vec<Complex64> {
        let polys = [
            self.xd.clone(),
            self.yd.clone(),
            self.xn.clone(),
            self.xn.sub(&self.xd),
            self.yn.clone(),
            self.yn.sub(&self.yd),
            self.yn.mul(&self.xd).sub(&self.xn.mul(&self.yd)),
            self.xn.derivative().mul(&self.xd).sub(&self.xn.mul(&self.xd.derivative())),
        ];
        polys
            .iter()
            .flat_map(|p| {
                // root-finding on the squarefree part is better conditioned
                p.squarefree().into_iter().flat_map(|(f, _)| f.complex_roots())
            })
            .collect()
    }
}

/// Sample parameters on the circle `|s| = 7/11`, at rational points of the
/// circle and at least `1e−2` from every excluded parameter.
pub fn sample_parameters(sol: &ParametricSolution, n: usize) -> Vec<CRat> {
    sample_parameters_seeded(sol, n, 0)
}

/// As [`sample_parameters`], with the grid rotated by a seed-dependent phase.
pub fn sample_parameters_seeded(sol: &ParametricSolution, n: usize, seed: u64) -> Vec<CRat> {
    let phase = (0.5 + (seed % 1_000_003) as f64 * 0.618_033_988_749_895).fract();
    let bad = sol.excluded_parameters();
    let radius = rat(7, 11);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let theta = 2.0 * PI * (k as f64 + phase) / n as f64;
        let mut u = ((theta / 2.0).tan() * 1000.0).round() as i64;
        for _ in 0..1000 {
            let ur = rat(u, 1000);
            let den = BigRational::one() + &ur * &ur;
            let s = CRat::new(
                (&radius * (BigRational::one() - &ur * &ur)) / &den,
                (&radius * (BigRational::from_integer(2.into()) * &ur)) / &den,
            );
            let sc = s.to_c64();
            if bad.iter().all(|b| (b - sc).norm() >= 1e-2) {
                out.push(s);
                break;
            }
            u += 7;
        }
    }
    out
}

/// Exact `(x, y, y_x, y_xx)` at a Gaussian-rational parameter.
pub fn exact_jet_state(sol: &ParametricSolution, s: &CRat) -> Result<[CRat; 4], SolutionError> {
    let j = Jet::variable(s.clone(), 3);
    let xd = j.eval_poly(&sol.xd);
    let yd = j.eval_poly(&sol.yd);
    if xd.c[0].is_zero() || yd.c[0].is_zero() {
        return Err(SolutionError::SingularParameter(format!("{}", s.to_c64())));
    }
    let x = j.eval_poly(&sol.xn) / xd;
    let y = j.eval_poly(&sol.yn) / yd;
    let dx = x.derivative();
    if dx.c[0].is_zero() {
        return Err(SolutionError::DegenerateSample("dx/ds = 0".into()));
    }
    let yx = y.derivative() / dx.clone();
    let yxx = yx.derivative().c[0].clone() / dx.c[0].clone();
    Ok([x.c[0].clone(), y.c[0].clone(), yx.c[0].clone(), yxx])
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub s: [f64; 2],
    pub relative: f64,
    pub exact_zero: bool,
}

fn alpha_rat(mu: &BigRational) -> BigRational {
    let t = mu * BigRational::from_integer(2.into()) - BigRational::one();
    &t * &t
}

fn relative(res: &CRat, a: &CRat, b: &CRat) -> f64 {
    if res.is_zero() {
        return 0.0;
    }
    let den = a.abs_f64().max(b.abs_f64()).max(f64::MIN_POSITIVE);
    res.abs_f64() / den
}

/// Exact residual `y_xx − RHS` of PVIμ at `s`, reported relative to `|y_xx|`.
pub fn pvi_residual(sol: &ParametricSolution, s: &CRat, mu: &BigRational) -> Result<Residual, SolutionError> {
    let [x, y, yx, yxx] = exact_jet_state(sol, s)?;
    let alpha = CRat::real(alpha_rat(mu));
    let rhs = pvi_rhs_alpha(&x, &y, &yx, &alpha).map_err(|e| SolutionError::DegenerateSample(e.to_string()))?;
    let res = yxx.clone() - rhs.clone();
    let c = s.to_c64();
    Ok(Residual { s: [c.re, c.im], relative: relative(&res, &yxx, &rhs), exact_zero: res.is_zero() })
}

pub const RESIDUAL_THRESHOLD: f64 = 1e-30;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub solution: String,
    pub mu: String,
    pub samples: usize,
    pub max_relative: f64,
    pub all_exact_zero: bool,
    pub passed: bool,
    pub status: String,
    /// Up to ten failing samples.
    pub failing: Vec<Residual>,
}

pub fn verify(sol: &ParametricSolution, n: usize, mu: &BigRational) -> VerifyReport {
    verify_seeded(sol, n, mu, 0)
}

/// As [`verify`] on the grid of [`sample_parameters_seeded`].
pub fn verify_seeded(sol: &ParametricSolution, n: usize, mu: &BigRational, seed: u64) -> VerifyReport {
    let pts = sample_parameters_seeded(sol, n, seed);
    let res: Vec<Result<Residual, SolutionError>> = pts.par_iter().map(|s| pvi_residual(sol, s, mu)).collect();
    let mut max_rel: f64 = 0.0;
    let mut all_zero = true;
    let mut failing = Vec::new();
    let mut count = 0;
    for r in res {
        match r {
            Ok(r) => {
                count += 1;
                max_rel = max_rel.max(r.relative);
                all_zero &= r.exact_zero;
                if r.relative > RESIDUAL_THRESHOLD && failing.len() < 10 {
                    failing.push(r);
                }
            }
            Err(_) => all_zero = false,
        }
    }
    let passed = count == n && max_rel <= RESIDUAL_THRESHOLD;
    VerifyReport {
        solution: sol.id.name().to_string(),
        mu: mu.to_string(),
        samples: count,
        max_relative: max_rel,
        all_exact_zero: all_zero,
        passed,
        status: if passed { "PASS".into() } else { "ERRATUM".into() },
        failing,
    }
}

/// The μ ↦ −μ transformation `ỹ = y (p0 y′² + p1 y′ + p2)² / (q0 y′⁴ + … + q4)`.
pub fn mu_negate_transform<F: Field>(y: &F, yx: &F, x: &F, mu: &F) -> Result<F, SolutionError> {
    let i = |v: i64| x.int_like(v);
    let one = i(1);
    let xm1 = x.clone() - one.clone();
    let ym1 = y.clone() - one.clone();
    let ymx = y.clone() - x.clone();
    let xx = x.clone() * xm1.clone();
    let yy = y.clone() * ym1.clone();
    let mu2 = mu.clone() * mu.clone();
    let mu3 = mu2.clone() * mu.clone();
    let mu4 = mu2.clone() * mu2.clone();
    let p0 = xx.clone() * xx.clone();
    let p1 = i(2) * xx.clone() * ym1.clone() * (i(2) * mu.clone() * ymx.clone() - y.clone());
    let p2 = yy.clone()
        * (yy.clone() - i(4) * mu.clone() * ym1.clone() * ymx.clone()
            + i(4) * mu2.clone() * ymx.clone() * (ymx.clone() - one.clone()));
    let q0 = p0.clone() * p0.clone();
    let q1 = -(i(4) * xx.clone() * xx.clone() * xx.clone() * yy.clone());
    let q2 = i(2)
        * p0.clone()
        * yy.clone()
        * (i(3) * yy.clone() + i(4) * mu2.clone() * ymx.clone() * (one.clone() + x.clone() - i(3) * y.clone()));
    let q3 = i(4)
        * xx.clone()
        * yy.clone()
        * yy.clone()
        * (-yy.clone() - i(16) * mu3.clone() * ymx.clone() * ymx.clone()
            + i(4) * mu2.clone() * ymx.clone() * (i(3) * y.clone() - x.clone() - one.clone()));
    let q4 = yy.clone()
        * yy.clone()
        * (yy.clone() * yy.clone() + i(64) * mu3 * yy.clone() * ymx.clone() * ymx.clone()
            - i(8) * mu2 * yy.clone() * ymx.clone() * (i(3) * y.clone() - x.clone() - one.clone())
            + i(16) * mu4 * ymx.clone() * ymx * (xm1.clone() * xm1 + y.clone() * (i(2) + i(2) * x.clone() - i(3) * y.clone())));
    let num = p0 * yx.clone() * yx.clone() + p1 * yx.clone() + p2;
    let den = q0 * yx.clone() * yx.clone() * yx.clone() * yx.clone()
        + q1 * yx.clone() * yx.clone() * yx.clone()
        + q2 * yx.clone() * yx.clone()
        + q3 * yx.clone()
        + q4;
    if den.is_zero() {
        return Err(SolutionError::VanishingDenominator);
    }
    Ok(y.clone() * num.clone() * num / den)
}

/// Exact residual of the transformed branch `(x(s), ỹ(s))` in PVI(−μ).
pub fn mu_negate_residual(sol: &ParametricSolution, s: &CRat) -> Result<Residual, SolutionError> {
    let j = Jet::variable(s.clone(), 4);
    let xd = j.eval_poly(&sol.xd);
    let yd = j.eval_poly(&sol.yd);
    if xd.c[0].is_zero() || yd.c[0].is_zero() {
        return Err(SolutionError::SingularParameter(format!("{}", s.to_c64())));
    }
    let x = j.eval_poly(&sol.xn) / xd;
    let y = j.eval_poly(&sol.yn) / yd;
    let dx = x.derivative();
    if dx.c[0].is_zero() {
        return Err(SolutionError::DegenerateSample("dx/ds = 0".into()));
    }
    let yx = y.derivative() / dx.clone();
    let mu = Jet::constant(CRat::real(sol.mu.clone()), 3);
    let x3 = x.truncate(3);
    let yt = mu_negate_transform(&y.truncate(3), &yx, &x3, &mu)?;
    let ytx = yt.derivative() / dx.truncate(2);
    let ytxx = ytx.derivative().c[0].clone() / dx.c[0].clone();
    let neg = -sol.mu.clone();
    let alpha = CRat::real(alpha_rat(&neg));
    let rhs = pvi_rhs_alpha(&x.c[0], &yt.c[0], &ytx.c[0], &alpha).map_err(|e| SolutionError::DegenerateSample(e.to_string()))?;
    let res = ytxx.clone() - rhs.clone();
    let c = s.to_c64();
    Ok(Residual { s: [c.re, c.im], relative: relative(&res, &ytxx, &rhs), exact_zero: res.is_zero() })
}

/// `(x, ỹ, dỹ/dx)` of the μ ↦ −μ image at a complex parameter.
pub fn mu_negate_state(sol: &ParametricSolution, s: Complex64) -> Result<(Complex64, Complex64, Complex64), SolutionError> {
    let j = Jet::variable(s, 3);
    let x = j.eval_poly(&sol.xn) / j.eval_poly(&sol.xd);
    let y = j.eval_poly(&sol.yn) / j.eval_poly(&sol.yd);
    let dx = x.derivative();
    if dx.c[0].norm() == 0.0 {
        return Err(SolutionError::DegenerateSample("dx/ds = 0".into()));
    }
    let yx = y.derivative() / dx.clone();
    let mu = Jet::constant(Complex64::new(sol.mu_f64(), 0.0), 2);
    let yt = mu_negate_transform(&y.truncate(2), &yx, &x.truncate(2), &mu)?;
    Ok((x.c[0], yt.c[0], yt.c[1] / dx.c[0]))
}

/// One local branch family of the curve over a critical point: a zero of
/// `x` (or of `x − 1`) of multiplicity `ramification` at parameter `root`,
/// where `y` (or `y − 1`) vanishes to order `order`. It carries
/// `ramification` branches `y ~ a x^{order/ramification}`.
#[derive(Clone, Debug, Serialize)]
pub struct BranchFamily {
    pub point: CriticalPoint,
    /// `None` for `s = ∞`.
    pub root: Option<[f64; 2]>,
    pub ramification: u32,
    pub order: u32,
    pub exponent: String,
    pub exponent_f64: f64,
    /// `|a|` of the leading term `a (x − x*)^{l}` (same for all branches of the family).
    pub modulus: f64,
    /// One determination of `a` (the others differ by `m`-th roots of unity).
    pub leading: [f64; 2],
}

fn family_from_local(point: CriticalPoint, root: Option<Complex64>, m: u32, k: u32, xm: Complex64, yk: Complex64) -> BranchFamily {
    let (xm, yk) = match point {
        CriticalPoint::One => (-xm, -yk),
        _ => (xm, yk),
    };
    let e = rat(k as i64, m as i64);
    let l = k as f64 / m as f64;
    let a = yk / xm.powf(l);
    BranchFamily {
        point,
        root: root.map(|r| [r.re, r.im]),
        ramification: m,
        order: k,
        exponent: e.to_string(),
        exponent_f64: l,
        modulus: yk.norm() / xm.norm().powf(l),
        leading: [a.re, a.im],
    }
}

/// Branch families of the curve over `x = 0` or `x = 1`.
pub fn branches_at(sol: &ParametricSolution, point: CriticalPoint) -> Vec<BranchFamily> {
    let (f, g) = match point {
        CriticalPoint::Zero => (sol.xn.clone(), sol.yn.clone()),
        CriticalPoint::One => (sol.xn.sub(&sol.xd), sol.yn.sub(&sol.yd)),
        CriticalPoint::Infinity => unimplemented!("only finite critical points are tabulated"),
    };
    let mut out = Vec::new();
    for (sq, m) in f.squarefree() {
        // split the squarefree factor by the order of vanishing of the y-side:
        // roots vanishing to order >= k are the roots of gcd(sq, g, g', ..., g^(k-1))
        let mut pieces = Vec::new();
        let mut ge = sq.clone();
        let mut dg = g.clone();
        let mut k = 0u32;
        while ge.degree().unwrap_or(0) > 0 {
            let next = ge.gcd(&dg);
            let exact = ge.div_exact(&next).expect("gcd divides");
            if exact.degree().unwrap_or(0) > 0 {
                pieces.push((exact, k));
            }
            ge = next;
            dg = dg.derivative();
            k += 1;
        }
        for (h, k) in pieces {
            let co_x = f.div_exact(&h.pow(m)).expect("factor divides");
            let co_y = g.div_exact(&h.pow(k)).expect("factor divides");
            let dh = h.derivative();
            for r in h.complex_roots() {
                let hp = dh.eval_c64(r);
                let xm = co_x.eval_c64(r) * hp.powu(m) / sol.xd.eval_c64(r);
                let yk = co_y.eval_c64(r) * hp.powu(k) / sol.yd.eval_c64(r);
                out.push(family_from_local(point, Some(r), m, k, xm, yk));
            }
        }
    }
    // s = ∞
    let dd = sol.xd.degree().unwrap_or(0);
    let fd = f.degree().unwrap_or(0);
    if fd < dd {
        let m = (dd - fd) as u32;
        let yd = sol.yd.degree().unwrap_or(0);
        let gd = g.degree().unwrap_or(0);
        let k = yd.saturating_sub(gd) as u32;
        let xm = Complex64::new(rat_to_f64(&f.lead()) / rat_to_f64(&sol.xd.lead()), 0.0);
        let yk = Complex64::new(rat_to_f64(&g.lead()) / rat_to_f64(&sol.yd.lead()), 0.0);
        out.push(family_from_local(point, None, m, k, xm, yk));
    }
    out.sort_by(|a, b| a.exponent_f64.partial_cmp(&b.exponent_f64).unwrap().then(a.modulus.partial_cmp(&b.modulus).unwrap()));
    out
}

/// Exponent multiset over a critical point (each family counted with its ramification).
pub fn exponent_multiset(fams: &[BranchFamily]) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = fams
        .iter()
        .flat_map(|f| std::iter::repeat(rat(f.order as i64, f.ramification as i64)).take(f.ramification as usize))
        .collect();
    v.sort();
    v
}

/// Prediction for one point of the pure-braid orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitPrediction {
    pub triple: [f64; 3],
    pub exponent: String,
    pub exponent_f64: f64,
    pub a: [f64; 2],
    pub modulus: f64,
}

/// Predicted `(l, a)` at a critical point for every class in the pure-braid
/// orbit of the solution's triple.
pub fn orbit_predictions(id: SolutionId, point: CriticalPoint) -> Vec<OrbitPrediction> {
    let sol = solution(id);
    let mu = sol.mu_f64();
    let seed = stated_triple(id);
    let orbit = orbit_enumerate(&seed, GroupKind::PureP3, 1000).expect("finite orbit");
    let mut out: Vec<OrbitPrediction> = orbit
        .classes
        .iter()
        .map(|c| {
            let t = &c.representative;
            let idx = match point {
                CriticalPoint::Zero => 0,
                CriticalPoint::One => 1,
                CriticalPoint::Infinity => 2,
            };
            let x = if idx == 2 { t.x[2].clone() } else { t.x[idx].clone() };
            let r = angle_of(&x, 240).expect("orbit coordinates are -2cos of rational angles");
            let l = index_from_angle_exact(&r);
            let d = coefficient_at(point, &t.to_float(), mu).expect("orbit point");
            OrbitPrediction {
                triple: t.to_f64(),
                exponent: l.to_string(),
                exponent_f64: rat_to_f64(&l),
                a: [d.a.re, d.a.im],
                modulus: d.a.norm(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.exponent_f64.partial_cmp(&b.exponent_f64).unwrap().then(a.modulus.partial_cmp(&b.modulus).unwrap()));
    out
}

pub fn predicted_exponents(preds: &[OrbitPrediction]) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = preds.iter().map(|p| parse_rat(&p.exponent)).collect();
    v.sort();
    v
}

fn parse_rat(s: &str) -> BigRational {
    crate::exactnum::parse_rational(s).expect("rational string")
}

/// Printed Puiseux leading term of a branch of the 18-branch solution.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxBranch {
    pub k: usize,
    pub exponent: String,
    pub coefficient: [f64; 2],
    pub modulus: f64,
    pub expression: String,
}

pub fn h3pp_branch(k: usize) -> Result<PuiseuxBranch, SolutionError> {
    let phase = |j: usize, n: usize| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
    let (e, c, expr) = match k {
        1..=5 => ("4/5", phase(k, 5) * (7.0f64 / 13.0).powi(2) * 6f64.powf(-0.4), format!("e^(2πi·{k}/5)·(7/13)^2·6^(-2/5)")),
        6..=10 => ("2/5", phase(k - 5, 5) * 6f64.powf(0.8) / 361.0, format!("e^(2πi·{}/5)·6^(4/5)/19^2", k - 5)),
        11..=13 => (
            "2/3",
            phase(k - 10, 3) * 2f64.powf(2.0 / 3.0) / 18.0 * Complex64::new(1.0, 15f64.sqrt()) / 4.0,
            format!("e^(2πi·{}/3)·2^(2/3)/18·(1+i√15)/4", k - 10),
        ),
        14..=16 => (
            "2/3",
            phase(k - 13, 3) * 2f64.powf(2.0 / 3.0) / 18.0 * Complex64::new(1.0, -15f64.sqrt()) / 4.0,
            format!("e^(2πi·{}/3)·2^(2/3)/18·(1−i√15)/4", k - 13),
        ),
        17 => ("1", Complex64::new((3.0 + 5f64.sqrt()) / 6.0, 0.0), "(3+√5)/6".to_string()),
        18 => ("1", Complex64::new((3.0 - 5f64.sqrt()) / 6.0, 0.0), "(3−√5)/6".to_string()),
        _ => return Err(SolutionError::BadBranch(k)),
    };
    Ok(PuiseuxBranch { k, exponent: e.to_string(), coefficient: [c.re, c.im], modulus: c.norm(), expression: expr })
}

/// Great-dodecahedron orbit points with their predicted data at 0.
pub fn h3pp_predictions(conv: crate::connection::Convention) -> Vec<OrbitPrediction> {
    let mu = -1.0 / 3.0;
    let tag = OrbitTag::GreatDodecahedron;
    let seed = crate::classify::seed_triple(tag);
    let orbit = orbit_enumerate(&seed, GroupKind::PureP3, 1000).expect("finite orbit");
    let mut out: Vec<OrbitPrediction> = orbit
        .classes
        .iter()
        .map(|c| {
            let t = &c.representative;
            let r = angle_of(&t.x[0], 240).expect("rational angle");
            let l = index_from_angle_exact(&r);
            let d = crate::connection::coefficient_at_with(CriticalPoint::Zero, &t.to_float(), mu, conv).expect("orbit point");
            OrbitPrediction {
                triple: t.to_f64(),
                exponent: l.to_string(),
                exponent_f64: rat_to_f64(&l),
                a: [d.a.re, d.a.im],
                modulus: d.a.norm(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.exponent_f64.partial_cmp(&b.exponent_f64).unwrap().then(a.modulus.partial_cmp(&b.modulus).unwrap()));
    out
}

/// Newton solve of `x(s) = x_target` from a starting parameter.
pub fn solve_parameter(sol: &ParametricSolution, x_target: Complex64, s0: Complex64) -> Result<Complex64, SolutionError> {
    let mut s = s0;
    let dxn = sol.xn.derivative();
    let dxd = sol.xd.derivative();
    for _ in 0..100 {
        let xn = sol.xn.eval_c64(s);
        let xd = sol.xd.eval_c64(s);
        let f = xn - x_target * xd;
        let df = dxn.eval_c64(s) - x_target * dxd.eval_c64(s);
        if df.norm() == 0.0 {
            return Err(SolutionError::DegenerateSample("dx/ds = 0 in Newton".into()));
        }
        let step = f / df;
        s -= step;
        if step.norm() <= 1e-15 * (1.0 + s.norm()) {
            return Ok(s);
        }
    }
    Ok(s)
}

/// Real parameter in `[lo, hi]` with `x(s) = x_target`, by bisection
/// (requires a sign change) polished with Newton.
pub fn real_parameter(sol: &ParametricSolution, x_target: f64, lo: f64, hi: f64) -> Result<f64, SolutionError> {
    let g = |s: f64| {
        let z = Complex64::new(s, 0.0);
        (sol.xn.eval_c64(z) / sol.xd.eval_c64(z)).re - x_target
    };
    let (mut a, mut b) = (lo, hi);
    let (mut ga, gb) = (g(a), g(b));
    if !(ga * gb < 0.0) {
        return Err(SolutionError::DegenerateSample(format!("no sign change of x(s) − {x_target} on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    let s = solve_parameter(sol, Complex64::new(x_target, 0.0), Complex64::new(0.5 * (a + b), 0.0))?;
    Ok(s.re)
}

/// Follows the parameter along a sequence of abscissae by continuation.
pub fn track_parameter(sol: &ParametricSolution, s_start: Complex64, xs: &[f64]) -> Result<Vec<Complex64>, SolutionError> {
    let mut s = s_start;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        s = solve_parameter(sol, Complex64::new(x, 0.0), s)?;
        out.push(s);
    }
    Ok(out)
}

/// A real arc of the curve on which `x(s)` runs from 0 (at `s_zero`) to 1
/// (at `s_one`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealArc {
    pub id: SolutionId,
    pub s_zero: f64,
    pub s_one: f64,
}

/// Real arcs used for continuation checks.
pub fn real_arcs() -> Vec<RealArc> {
    let r5 = 5f64.sqrt();
    vec![
        RealArc { id: SolutionId::H3p, s_zero: -1.0 / 3.0, s_one: -1.0 / r5 },
        RealArc { id: SolutionId::H3p, s_zero: 1.0, s_one: 1.0 / r5 },
        RealArc { id: SolutionId::H3p, s_zero: r5 - 2.0, s_one: 0.0 },
        RealArc { id: SolutionId::A3Amended, s_zero: -1.0 / 3.0, s_one: 0.0 },
    ]
}

impl RealArc {
    fn inner(&self, frac: f64) -> f64 {
        self.s_zero + (self.s_one - self.s_zero) * frac
    }

    /// Parameter with `x(s) = x_target` on this arc.
    pub fn parameter_at(&self, sol: &ParametricSolution, x_target: f64) -> Result<f64, SolutionError> {
        let mid = self.inner(0.5);
        if x_target < 0.5 {
            real_parameter(sol, x_target, self.inner(0.0), mid)
        } else {
            real_parameter(sol, x_target, mid, self.inner(1.0))
        }
    }

    /// The orbit point whose data at 0 matches this arc, found by comparing
    /// `y/x^{l}` at a tiny `x` with the predicted complex `a0`.
    pub fn orbit_point(&self) -> Result<OrbitPrediction, SolutionError> {
        let sol = solution(self.id);
        let preds = orbit_predictions(self.id, CriticalPoint::Zero);
        let x = 1e-12;
        let s = self.parameter_at(&sol, x)?;
        let (_, y) = sol.eval(Complex64::new(s, 0.0))?;
        preds
            .into_iter()
            .map(|p| {
                let a = y / x.powf(p.exponent_f64);
                let d = (a - Complex64::new(p.a[0], p.a[1])).norm() / p.modulus;
                (d, p)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(_, p)| p)
            .ok_or_else(|| SolutionError::DegenerateSample("empty orbit".into()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuationReport {
    pub solution: String,
    pub s_zero: f64,
    pub s_one: f64,
    pub triple: [f64; 3],
    pub x_start: f64,
    pub x_end: f64,
    pub predicted_l1: f64,
    pub predicted_a1: f64,
    pub fitted_l1: f64,
    pub fitted_a1: f64,
    pub l1_error: f64,
    pub a1_error: f64,
    pub endpoint_error: f64,
    pub steps: usize,
    pub seconds: f64,
}

#[derive(Debug, Error)]
pub enum ContinuationError {
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Pvi(#[from] crate::pvi::PviError),
    #[error(transparent)]
    Connection(#[from] crate::connection::ConnectionError),
}

/// Seeds the arc from the exact parametric state at `x_start`, integrates to
/// `x_end`, compares the endpoint with the parametric value and the fit at 1
/// with the connection prediction of the matching orbit point.
pub fn continuation_check(arc: &RealArc, x_start: f64, x_end: f64, opts: &crate::pvi::IntegrateOptions) -> Result<ContinuationReport, ContinuationError> {
    use crate::pvi::{fit_asymptotics, integrate_from_state, OdeState, Path};
    let clock = std::time::Instant::now();
    let sol = solution(arc.id);
    let point = arc.orbit_point()?;
    let t = Triple::new(point.triple[0], point.triple[1], point.triple[2]);
    let pred = coefficient_at(CriticalPoint::One, &t, sol.mu_f64())?;
    let sa = arc.parameter_at(&sol, x_start)?;
    let sb = arc.parameter_at(&sol, x_end)?;
    let (x, y, yx) = sol.state(Complex64::new(sa, 0.0))?;
    let traj = integrate_from_state(&Path::real_segment(x_start, x_end), OdeState { x, y, yx }, sol.mu_f64(), opts)?;
    let (_, y_end, _) = sol.state(Complex64::new(sb, 0.0))?;
    let endpoint_error = (traj.last().y - y_end).norm();
    let fit = fit_asymptotics(&traj, CriticalPoint::One)?;
    Ok(ContinuationReport {
        solution: arc.id.name().to_string(),
        s_zero: arc.s_zero,
        s_one: arc.s_one,
        triple: point.triple,
        x_start,
        x_end,
        predicted_l1: pred.l,
        predicted_a1: pred.a.norm(),
        fitted_l1: fit.datum.l,
        fitted_a1: fit.datum.a.norm(),
        l1_error: (fit.datum.l - pred.l).abs(),
        a1_error: (fit.datum.a.norm() - pred.a.norm()).abs(),
        endpoint_error,
        steps: traj.accepted,
        seconds: clock.elapsed().as_secs_f64(),
    })
}

/// Lift the stated triple of a solution into a field compatible with `ctx`.
pub fn stated_triple_in(id: SolutionId, ctx: &crate::exactnum::Ctx) -> Triple<FieldElement> {
    lift_triple(&stated_triple(id), ctx).expect("compatible field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn b3_exact_value() {
        let b3 = solution(SolutionId::B3);
        let (x, y) = b3.eval_exact(&CRat::real(rat(1, 2))).unwrap();
        assert_eq!(x, CRat::real(rat(27, 25)));
        assert_eq!(y, CRat::real(rat(108, 545)));
    }

    #[test]
    fn a3_at_zero_is_on_singular_locus() {
        let a3 = solution(SolutionId::A3);
        let (x, y) = a3.eval_exact(&CRat::real(BigRational::zero())).unwrap();
        assert_eq!(x, CRat::real(rat(-1, 1)));
        assert_eq!(y, CRat::real(rat(1, 1)));
        assert!(pvi_residual(&a3, &CRat::real(BigRational::zero()), &a3.mu).is_err());
        assert!(matches!(a3.eval_exact(&CRat::real(rat(-1, 1))), Err(SolutionError::SingularParameter(_))));
        assert!(matches!(a3.eval(Complex64::new(1.0 / 3.0, 0.0)), Err(SolutionError::SingularParameter(_))));
    }

    #[test]
    fn residual_verdicts() {
        for (id, want) in [
            (SolutionId::A3, false),
            (SolutionId::B3, false),
            (SolutionId::H3, false),
            (SolutionId::H3p, true),
            (SolutionId::A3Amended, true),
        ] {
            let sol = solution(id);
            let r = verify(&sol, 6, &sol.mu);
            assert_eq!(r.passed, want, "{id}: {}", r.max_relative);
            assert_eq!(r.all_exact_zero, want);
        }
        // negative control: the amended solution with a wrong μ
        let sol = solution(SolutionId::A3Amended);
        let r = verify(&sol, 6, &rat(-1, 2));
        assert!(!r.passed && r.max_relative > 1e-3);
    }

    #[test]
    fn mu_negation_maps_solutions() {
        for id in [SolutionId::A3Amended, SolutionId::H3p] {
            let sol = solution(id);
            for s in sample_parameters(&sol, 3) {
                let r = mu_negate_residual(&sol, &s).unwrap();
                assert!(r.exact_zero, "{id} {:?} {}", r.s, r.relative);
            }
        }
        let x = 2.0f64;
        // p0 = x²(x−1)² = 4 at x = 2
        let (y, yx) = (0.3, 0.0);
        let t = mu_negate_transform(&y, &yx, &x, &1.0).unwrap();
        assert!(t.is_finite());
    }

    #[test]
    fn branch_exponents_at_zero() {
        let fams = branches_at(&solution(SolutionId::A3Amended), CriticalPoint::Zero);
        assert_eq!(exponent_multiset(&fams), vec![rat(2, 3), rat(2, 3), rat(2, 3), rat(1, 1)]);
        let p = orbit_predictions(SolutionId::A3Amended, CriticalPoint::Zero);
        assert_eq!(predicted_exponents(&p), exponent_multiset(&fams));
        let fams = branches_at(&solution(SolutionId::H3p), CriticalPoint::Zero);
        let p = orbit_predictions(SolutionId::H3p, CriticalPoint::Zero);
        assert_eq!(predicted_exponents(&p), exponent_multiset(&fams));
        assert_eq!(p.len(), 10);
    }

    #[test]
    fn puiseux_table() {
        let b = h3pp_branch(17).unwrap();
        assert_eq!(b.exponent, "1");
        assert!((b.coefficient[0] - (3.0 + 5f64.sqrt()) / 6.0).abs() < 1e-15);
        let b = h3pp_branch(6).unwrap();
        assert_eq!(b.exponent, "2/5");
        assert!((b.modulus - 6f64.powf(0.8) / 361.0).abs() < 1e-15);
        let b = h3pp_branch(1).unwrap();
        assert!((b.coefficient[1] / b.coefficient[0] - (2.0 * PI / 5.0).tan()).abs() < 1e-12);
        assert!(h3pp_branch(19).is_err());
    }

    #[test]
    fn y_equal_x_is_degenerate() {
        let mut sol = solution(SolutionId::H3p);
        sol.yn = sol.xn.clone();
        sol.yd = sol.xd.clone();
        let s = CRat::new(rat(1, 7), rat(2, 9));
        assert!(matches!(pvi_residual(&sol, &s, &rat(-1, 5)), Err(SolutionError::DegenerateSample(_))));
    }

    #[test]
    fn poles_are_rejected() {
        let sol = solution(SolutionId::B3);
        for p in sol.singular_params() {
            assert!(matches!(sol.eval(p), Err(SolutionError::SingularParameter(_))), "{p}");
        }
    }

    #[test]
    fn continuation_on_real_arc() {
        let arc = real_arcs()[0];
        let r = continuation_check(&arc, 1e-3, 1.0 - 1e-3, &Default::default()).unwrap();
        assert!(r.endpoint_error < 1e-6);
        assert!(r.l1_error < 1e-3 && r.a1_error < 1e-2);
        assert_eq!(r.triple, [1.0, 0.0, (5f64.sqrt() - 1.0) / 2.0]);
    }

    #[test]
    fn mu_negation_keeps_the_triple() {
        // the image branch near 0 has the leading data predicted for the
        // same triple with −μ
        use crate::pvi::{fit_samples, Sample};
        let arc = real_arcs()[0];
        let sol = solution(arc.id);
        let point = arc.orbit_point().unwrap();
        let samples: Vec<Sample> = (0..=60)
            .map(|k| {
                let x = 10f64.powf(-7.0 + 1.0 * k as f64 / 60.0);
                let s = arc.parameter_at(&sol, x).unwrap();
                let (x, y, yx) = mu_negate_state(&sol, Complex64::new(s, 0.0)).unwrap();
                Sample { tau: k as f64, x, y, yx }
            })
            .collect();
        let fit = fit_samples(&samples, CriticalPoint::Zero, 1.0).unwrap();
        let t = Triple::new(point.triple[0], point.triple[1], point.triple[2]);
        let pred = coefficient_at(CriticalPoint::Zero, &t, -sol.mu_f64()).unwrap();
        assert!((fit.datum.l - pred.l).abs() < 1e-4, "{} {}", fit.datum.l, pred.l);
        assert!((fit.datum.a.norm() - pred.a.norm()).abs() < 1e-3 * pred.a.norm(), "{} {}", fit.datum.a, pred.a);
    }
}
