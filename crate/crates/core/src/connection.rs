//! Connection formulas between monodromy triples and the leading behaviour
//! `y ~ a x^l` of the corresponding branch at 0, 1 and ∞, and the
//! parameterisation of the monodromy matrices by `(σ0, a0)`.
//!
//! Several printed formulas are corrected here; see the errata section of
//! the README. The printed forms are kept (`*_printed`) for reporting.

use crate::monodromy::{triple_from_matrices, Mat2, MonodromyError};
use crate::triples::{Triple, TripleClass};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error("resonant case: 2μ = {0} is an integer")]
    ResonantMu(f64),
    #[error("degenerate triple: {0}")]
    DegenerateTriple(String),
    #[error("|x0| = {0} exceeds 2")]
    OutOfRange(f64),
    #[error("det C vanishes for r = {0}")]
    SingularC(f64),
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma function (Lanczos, with reflection for `Re z < 1/2`).
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return c(PI) / ((c(PI) * z).sin() * gamma(c(1.0) - z));
    }
    let z = z - 1.0;
    let mut x = c(LANCZOS[0]);
    for (k, coef) in LANCZOS.iter().enumerate().skip(1) {
        x += c(*coef) / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(c(x)).re
}

/// Index of the critical behaviour from an angle: `l = 2r` for `r ≤ 1/2`,
/// else `2 − 2r`.
pub fn index_from_angle(r: f64) -> f64 {
    if r <= 0.5 {
        2.0 * r
    } else {
        2.0 - 2.0 * r
    }
}

/// Exact version of [`index_from_angle`].
pub fn index_from_angle_exact(r: &num_rational::BigRational) -> num_rational::BigRational {
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let two = num_rational::BigRational::from_integer(2.into());
    if *r <= half {
        &two * r
    } else {
        &two - &two * r
    }
}

/// Index `l` of a coordinate `x = −2cos πr`.
pub fn index_from_x(x: f64) -> f64 {
    let r = (-x / 2.0).clamp(-1.0, 1.0).acos() / PI;
    index_from_angle(r)
}

/// `σ0 ∈ [0, 1)` with `x0 = −2 sin(πσ0/2)` up to the sign absorbed by the class.
pub fn sigma_from_x0(x0: f64) -> Result<f64, ConnectionError> {
    if x0.abs() > 2.0 {
        return Err(ConnectionError::OutOfRange(x0));
    }
    Ok((2.0 / PI) * (x0.abs() / 2.0).asin())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalPoint {
    Zero,
    One,
    Infinity,
}

impl CriticalPoint {
    pub fn name(self) -> &'static str {
        match self {
            CriticalPoint::Zero => "0",
            CriticalPoint::One => "1",
            CriticalPoint::Infinity => "inf",
        }
    }
}

/// Leading behaviour at a critical point: `y ~ a x^l` at 0, `1 − y ~ a (1−x)^l`
/// at 1 (with `l = 1 − σ`), `y ~ a x^σ` at ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDatum {
    pub point: CriticalPoint,
    pub sigma: f64,
    pub l: f64,
    pub a: Complex64,
}

/// Which form of the leading-coefficient formula to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// Corrected by the factor −16 (default).
    Corrected,
    /// As printed: `e^{−iπφ} Γ-ratio / (4(2μ + l − 1)²)`.
    Printed,
}

fn gamma_ratio(l: f64, mu: f64) -> Complex64 {
    let h1 = (1.0 + l) / 2.0;
    let h0 = (1.0 - l) / 2.0;
    let num = gamma(c(1.0 - l)).powi(2) * gamma(c(h1)).powi(2) * gamma(c(h1 + mu)) * gamma(c(h1 - mu));
    let den = gamma(c(l)).powi(2) * gamma(c(h0)).powi(2) * gamma(c(h0 + mu)) * gamma(c(h0 - mu));
    num / den
}

fn is_resonant(mu: f64) -> bool {
    let t = 2.0 * mu;
    (t - t.round()).abs() < 1e-12
}

/// The triple seen from a critical point: `(x1, x0, x∞)` at 1 and
/// `(x∞, −x1, x0 − x1x∞)` at ∞.
pub fn triple_at(point: CriticalPoint, t: &Triple<f64>) -> Triple<f64> {
    let [x0, x1, xi] = t.x;
    match point {
        CriticalPoint::Zero => Triple::new(x0, x1, xi),
        CriticalPoint::One => Triple::new(x1, x0, xi),
        CriticalPoint::Infinity => Triple::new(xi, -x1, x0 - x1 * xi),
    }
}

/// `e^{iπφ}` from the triple, for `x0 ≠ 0`.
pub fn exp_i_pi_phi(t: &Triple<f64>) -> Result<Complex64, ConnectionError> {
    let [x0, x1, xi] = t.x;
    let den = 2.0 * (x1 * x1 - x0 * x1 * xi + xi * xi);
    if den.abs() < 1e-14 {
        return Err(ConnectionError::DegenerateTriple("x1² − x0x1x∞ + x∞² = 0".into()));
    }
    let re = x0 * x0 * x1 * x1 - 2.0 * x1 * x1 - 2.0 * x0 * x1 * xi + 2.0 * xi * xi;
    let im = x1 * x0.signum() * (4.0 - x0 * x0).sqrt() * (2.0 * xi - x0 * x1);
    Ok(Complex64::new(re, im) / den)
}

/// Leading data of the branch with monodromy triple `t = (x0, x1, x∞)` at
/// the given point.
pub fn coefficient_at(point: CriticalPoint, t: &Triple<f64>, mu: f64) -> Result<AsymptoticDatum, ConnectionError> {
    coefficient_at_with(point, t, mu, Convention::Corrected)
}

pub fn coefficient_at_with(
    point: CriticalPoint,
    t: &Triple<f64>,
    mu: f64,
    conv: Convention,
) -> Result<AsymptoticDatum, ConnectionError> {
    if is_resonant(mu) {
        return Err(ConnectionError::ResonantMu(2.0 * mu));
    }
    let s = triple_at(point, t);
    let [x0, x1, xi] = s.x;
    if x0.abs() < 1e-12 {
        let den = x1 * x1 + xi * xi;
        if den < 1e-24 {
            return Err(ConnectionError::DegenerateTriple("two vanishing coordinates".into()));
        }
        return Ok(AsymptoticDatum { point, sigma: 0.0, l: 1.0, a: c(xi * xi / den) });
    }
    let l = index_from_x(x0);
    let e = exp_i_pi_phi(&s)?;
    let g = gamma_ratio(l, mu);
    let k = 2.0 * mu + l - 1.0;
    let a = match conv {
        Convention::Corrected => -4.0 * g / (e * k * k),
        Convention::Printed => g / (e * 4.0 * k * k),
    };
    Ok(AsymptoticDatum { point, sigma: 1.0 - l, l, a })
}

/// Gamma factor of the `(σ0, a0) ↦ φ` relation.
fn sigma_gamma(sig: f64, mu: f64) -> Complex64 {
    let num = gamma(c(1.0 + sig)).powi(2)
        * gamma(c(1.0 - sig / 2.0)).powi(2)
        * gamma(c(1.0 + mu - sig / 2.0))
        * gamma(c(1.0 - mu - sig / 2.0));
    let den = gamma(c(1.0 - sig)).powi(2)
        * gamma(c(1.0 + sig / 2.0)).powi(2)
        * gamma(c(1.0 + mu + sig / 2.0))
        * gamma(c(1.0 - mu + sig / 2.0));
    num / den
}

/// Monodromy matrices `(M0, Mx, M1)` of the auxiliary system for a branch
/// with leading data `(σ0, a0)`, for the free normalisation `r`.
pub fn monodromy_from_asymptotics(sig: f64, mu: f64, a0: Complex64, r: f64) -> Result<[Mat2<Complex64>; 3], ConnectionError> {
    if is_resonant(mu) {
        return Err(ConnectionError::ResonantMu(2.0 * mu));
    }
    if a0.norm() == 0.0 {
        return Err(ConnectionError::InconsistentData("a0 = 0".into()));
    }
    if sig.abs() < 1e-14 {
        return Ok(monodromy_sigma_zero(mu, a0));
    }
    let th = 2.0 * mu;
    let s = c(r) / (4.0 * a0) * ((2.0 * mu + sig) / (2.0 * mu - sig)) * sigma_gamma(sig, mu);
    let sp = (PI * (th + sig) / 2.0).sin();
    let sm = (PI * (th - sig) / 2.0).sin();
    let eth = (I * PI * th).exp();
    let cs = (PI * sig).cos();
    let k1 = -I / (PI * th).sin();
    let m1 = Mat2::new(
        k1 * (c(cs) - eth.inv()),
        k1 * (-2.0 * eth.inv() * sp * sm),
        k1 * (2.0 * eth * sp * sm),
        k1 * (c(-cs) + eth),
    );
    let k = -I / (PI * sig).sin();
    let es = (I * PI * sig).exp();
    let s2 = (PI * sig / 2.0).sin().powi(2);
    let cmx = Mat2::new(k * (es - 1.0), k * (2.0 * s * es * s2), k * (-2.0 / s * es.inv() * s2), k * (c(1.0) - es.inv()));
    let cm0 = Mat2::new(k * (es - 1.0), k * (-2.0 * s * s2), k * (2.0 / s * s2), k * (c(1.0) - es.inv()));
    let cm = Mat2::new(c(sm), c(r * sp), c(sp / r), c(sm));
    let det = cm.det();
    if det.norm() < 1e-12 {
        return Err(ConnectionError::SingularC(r));
    }
    let ci = cm.inverse();
    Ok([ci.mul(&cm0).mul(&cm), ci.mul(&cmx).mul(&cm), m1])
}

/// Same, retrying with `r = 2` when `C` is singular at `r = 1`.
pub fn monodromy_from_asymptotics_default(sig: f64, mu: f64, a0: Complex64) -> Result<[Mat2<Complex64>; 3], ConnectionError> {
    match monodromy_from_asymptotics(sig, mu, a0, 1.0) {
        Err(ConnectionError::SingularC(_)) => monodromy_from_asymptotics(sig, mu, a0, 2.0),
        other => other,
    }
}

fn monodromy_sigma_zero(mu: f64, s: Complex64) -> [Mat2<Complex64>; 3] {
    let th = 2.0 * mu;
    let cth = (PI * th / 2.0).cos();
    let e = (I * PI * th / 2.0).exp();
    let t = (PI * th / 2.0).tan();
    let s2 = (PI * th / 2.0).sin().powi(2);
    let m1 = Mat2::new(e.inv() / cth, I * PI / e / cth, -I / PI * s2 * e / cth, e / cth);
    let blk = |s: Complex64| {
        Mat2::new(c(1.0) - I * s * t, -I * s * PI * e / cth, I / PI * s * s2 / e / cth, c(1.0) + I * s * t)
    };
    [blk(s), blk(c(1.0) - s), m1]
}

/// Class of `(x0, x1, x∞)` read off the traces of the monodromy matrices built from the data at 0.
pub fn triple_from_monodromy(sig: f64, mu: f64, a0: Complex64) -> Result<TripleClass<f64>, ConnectionError> {
    let m = monodromy_from_asymptotics_default(sig, mu, a0)?;
    Ok(triple_from_matrices(&m)?)
}

fn quad(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - x[0] * x[1] * x[2]
}

fn real_or_err(z: Complex64, what: &str) -> Result<f64, ConnectionError> {
    if z.im.abs() > 1e-8 * (1.0 + z.re.abs()) {
        return Err(ConnectionError::InconsistentData(format!("{what} = {z} is not real")));
    }
    Ok(z.re)
}

/// Triple class of a branch with leading data `(a0, σ0)` at 0; the
/// quadratic relation with `μ` is checked to 1e−8.
pub fn triple_from_asymptotics(a0: Complex64, sig: f64, mu: f64) -> Result<TripleClass<f64>, ConnectionError> {
    if is_resonant(mu) {
        return Err(ConnectionError::ResonantMu(2.0 * mu));
    }
    let q = 4.0 * (PI * mu).sin().powi(2);
    let x = if sig.abs() < 1e-14 {
        let s = 2.0 * (PI * mu).sin().abs();
        let x1 = -s * (c(1.0) - a0).sqrt();
        let xi = -s * a0.sqrt();
        [0.0, real_or_err(x1, "x1")?, real_or_err(xi, "x∞")?]
    } else {
        let e = 1.0 / (4.0 * a0) * ((sig + 2.0 * mu) / (sig - 2.0 * mu)) * sigma_gamma(sig, mu);
        let phi = e.ln() / (I * PI);
        let x0 = -2.0 * (PI * sig / 2.0).sin();
        let rr = q - x0 * x0;
        if rr < -1e-12 {
            return Err(ConnectionError::InconsistentData(format!("4sin²πμ − x0² = {rr} < 0")));
        }
        let rr = rr.max(0.0).sqrt();
        let cb = (PI * sig / 2.0).cos();
        let x1 = real_or_err(-rr * (PI * phi / 2.0).cos() / cb, "x1")?;
        let xi = real_or_err(rr * (PI * (phi - sig) / 2.0).sin() / cb, "x∞")?;
        if (quad([x0, x1, xi]) - q).abs() <= (quad([x0, x1, -xi]) - q).abs() {
            [x0, x1, xi]
        } else {
            [x0, x1, -xi]
        }
    };
    let res = (quad(x) - q).abs();
    if res > 1e-8 {
        return Err(ConnectionError::InconsistentData(format!("x0²+x1²+x∞²−x0x1x∞ − 4sin²πμ = {res:.3e}")));
    }
    Ok(Triple::new(x[0], x[1], x[2]).class())
}

/// The inversion formulas exactly as printed (σ0 ≠ 0 divides by
/// `sin(πσ0/2)`, σ0 = 0 lacks the factor 2); no postcondition.
pub fn triple_from_asymptotics_printed(a0: Complex64, sig: f64, mu: f64) -> [Complex64; 3] {
    if sig.abs() < 1e-14 {
        let s = (PI * mu).sin().abs();
        return [c(0.0), -s * (c(1.0) - a0).sqrt(), -s * a0.sqrt()];
    }
    let e = 1.0 / (4.0 * a0) * ((sig + 2.0 * mu) / (sig - 2.0 * mu)) * sigma_gamma(sig, mu);
    let phi = e.ln() / (I * PI);
    let rr = (2.0 * ((PI * sig).cos() - (2.0 * PI * mu).cos())).sqrt();
    let sb = (PI * sig / 2.0).sin();
    [
        c(-2.0 * sb),
        -rr * (PI * phi / 2.0).sin() / sb,
        -rr * (PI * (sig + phi) / 2.0).cos() / sb,
    ]
}

/// Leading data at all three points.
pub fn connect_all(t: &Triple<f64>, mu: f64) -> Result<[AsymptoticDatum; 3], ConnectionError> {
    Ok([
        coefficient_at(CriticalPoint::Zero, t, mu)?,
        coefficient_at(CriticalPoint::One, t, mu)?,
        coefficient_at(CriticalPoint::Infinity, t, mu)?,
    ])
}
