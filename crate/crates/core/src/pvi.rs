//! Numerical PVIμ: right-hand sides, the Hamiltonian system, adaptive
//! integration along a path with pole charts, and asymptotic fitting.

use crate::algebra::Field;
use crate::connection::{AsymptoticDatum, CriticalPoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PviError {
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("step size collapsed at path parameter {0}")]
    StepCollapse(f64),
    #[error("path passes through a fixed singular point")]
    PathThroughSingularity,
    #[error("poor fit: relative residual {0:.3e}")]
    PoorFit(f64),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
}

/// Right side of PVIμ with `α = (2μ − 1)²`, over any field.
pub fn pvi_rhs_alpha<F: Field>(x: &F, y: &F, yx: &F, alpha: &F) -> Result<F, PviError> {
    let one = x.one_like();
    let half = x.rational_like(&num_rational::BigRational::new(1.into(), 2.into()));
    let ymx = y.clone() - x.clone();
    let xm1 = x.clone() - one.clone();
    let ym1 = y.clone() - one.clone();
    if y.is_zero() || ym1.is_zero() || ymx.is_zero() {
        return Err(PviError::SingularPoint("y in {0, 1, x}".into()));
    }
    if x.is_zero() || xm1.is_zero() {
        return Err(PviError::SingularPoint("x in {0, 1}".into()));
    }
    let t1 = half.clone()
        * (one.clone() / y.clone() + one.clone() / ym1.clone() + one.clone() / ymx.clone())
        * yx.clone()
        * yx.clone();
    let t2 = (one.clone() / x.clone() + one.clone() / xm1.clone() + one / ymx.clone()) * yx.clone();
    let x2 = x.clone() * x.clone() * xm1.clone() * xm1.clone();
    let t3 = half * y.clone() * ym1 * ymx.clone() / x2
        * (alpha.clone() + x.clone() * xm1 / (ymx.clone() * ymx));
    Ok(t1 - t2 + t3)
}

pub fn alpha_of(mu: f64) -> f64 {
    (2.0 * mu - 1.0).powi(2)
}

/// Right side of PVIμ at complex arguments.
pub fn pvi_rhs(x: Complex64, y: Complex64, yx: Complex64, mu: f64) -> Result<Complex64, PviError> {
    let eps = 1e-300;
    if y.norm() < eps || (y - 1.0).norm() < eps || (y - x).norm() < eps {
        return Err(PviError::SingularPoint("y in {0, 1, x}".into()));
    }
    pvi_rhs_alpha(&x, &y, &yx, &Complex64::new(alpha_of(mu), 0.0))
}

/// Hamiltonian form with poles at `0, x, 1`: returns `(dq/dx, dp/dx)`.
pub fn hamiltonian_rhs(x: Complex64, q: Complex64, p: Complex64, mu: f64) -> Result<(Complex64, Complex64), PviError> {
    let xx = x * (x - 1.0);
    if xx.norm() < 1e-300 {
        return Err(PviError::SingularPoint("x in {0, 1}".into()));
    }
    let qd = ((q - 1.0) * q + 2.0 * p * (q - 1.0) * q * (q - x)) / xx;
    let pd = -(p * p * (x - 2.0 * q - 2.0 * x * q + 3.0 * q * q) + p * (2.0 * q - 1.0) + (1.0 - mu) * mu) / xx;
    Ok((qd, pd))
}

/// `p` from `(x, y, y_x)`; rejects `y ∈ {0, 1, x}`.
pub fn p_from_y(x: Complex64, y: Complex64, yx: Complex64) -> Result<Complex64, PviError> {
    let den = 2.0 * (y - x) * y * (y - 1.0);
    if den.norm() < 1e-300 {
        return Err(PviError::SingularPoint("p-conversion needs y not in {0, 1, x}".into()));
    }
    Ok((x * (x - 1.0) * yx - y * (y - 1.0)) / den)
}

/// `y_x` from `(x, q, p)`.
pub fn yx_from_qp(x: Complex64, q: Complex64, p: Complex64) -> Complex64 {
    ((q - 1.0) * q + 2.0 * p * (q - 1.0) * q * (q - x)) / (x * (x - 1.0))
}

/// The two roots of `a² + a + μ(1 − μ) = 0`: `−μ` and `μ − 1`.
fn pole_residues(mu: f64) -> [f64; 2] {
    [-mu, mu - 1.0]
}

/// Chart at a movable pole: `Q = 1/q`, `R = p q² − a q`. Both right sides
/// are polynomial, so the flow passes through `Q = 0` regularly.
pub fn pole_chart_rhs(x: Complex64, qi: Complex64, r: Complex64, a: f64) -> (Complex64, Complex64) {
    let xx = x * (x - 1.0);
    let qd = -(qi - 1.0) * (2.0 * qi * qi * r * x - 2.0 * qi * r + 2.0 * qi * a * x - 2.0 * a - 1.0) / xx;
    let rd = (r * r * (3.0 * x * qi * qi - 2.0 * (1.0 + x) * qi + 1.0)
        + r * (4.0 * a * x * qi - 2.0 * a * (1.0 + x) - 1.0)
        + a * a * x)
        / xx;
    (qd, rd)
}

/// Chart where `q` touches `c ∈ {0, 1, x}` and `p` has a simple pole:
/// `q = c + u v²`, `p = 1/v`. Returns `(du/dx, dv/dx)`.
pub fn touch_chart_rhs(x: Complex64, u: Complex64, v: Complex64, c: Touch, mu: f64) -> (Complex64, Complex64) {
    let xx = x * (x - 1.0);
    let cv = c.value(x);
    let ud = -4.0 * u * u * u * v * v * v
        + u * u * v * (2.0 * x + 2.0 - 6.0 * cv - 3.0 * v)
        + u * (1.0 - 2.0 * cv + 2.0 * (mu * mu - mu) * v);
    let vd = 3.0 * cv * cv - 2.0 * cv * (x + 1.0)
        + x
        + 3.0 * u * u * v * v * v * v
        + u * v * v * (6.0 * cv + 2.0 * v - 2.0 * x - 2.0)
        + (mu - mu * mu) * v * v
        + (2.0 * cv - 1.0) * v;
    (ud / xx, vd / xx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Touch {
    Zero,
    One,
    X,
}

impl Touch {
    fn value(self, x: Complex64) -> Complex64 {
        match self {
            Touch::Zero => Complex64::new(0.0, 0.0),
            Touch::One => Complex64::new(1.0, 0.0),
            Touch::X => x,
        }
    }

    fn slope(self) -> f64 {
        if self == Touch::X {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Chart {
    /// `(q, p)`.
    Hamiltonian,
    /// `(1/q, p q² − a q)`, at poles of `y`.
    Pole { a: f64 },
    /// `(u, v)` with `q = c + u v²`, `p = 1/v`, where `y` touches `0`, `1` or `x`.
    Touch { c: Touch },
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct ChartState {
    chart: Chart,
    u: [Complex64; 2],
}

impl ChartState {
    fn to_qp(self, x: Complex64) -> (Complex64, Complex64) {
        match self.chart {
            Chart::Hamiltonian => (self.u[0], self.u[1]),
            Chart::Pole { a } => {
                let q = 1.0 / self.u[0];
                (q, (self.u[1] + a * q) / (q * q))
            }
            Chart::Touch { c } => (c.value(x) + self.u[0] * self.u[1] * self.u[1], 1.0 / self.u[1]),
        }
    }

    /// `(y, y_x)`, or `None` exactly at a pole of `y`.
    fn to_y(self, x: Complex64, mu: f64) -> Option<(Complex64, Complex64)> {
        match self.chart {
            Chart::Hamiltonian => Some((self.u[0], yx_from_qp(x, self.u[0], self.u[1]))),
            Chart::Pole { a } => {
                let qi = self.u[0];
                if qi.norm() < 1e-150 {
                    return None;
                }
                let (qid, _) = pole_chart_rhs(x, qi, self.u[1], a);
                Some((1.0 / qi, -qid / (qi * qi)))
            }
            Chart::Touch { c } => {
                let [u, v] = self.u;
                let (ud, vd) = touch_chart_rhs(x, u, v, c, mu);
                Some((c.value(x) + u * v * v, c.slope() + ud * v * v + 2.0 * u * v * vd))
            }
        }
    }

    fn rhs(self, x: Complex64, mu: f64) -> Result<[Complex64; 2], PviError> {
        match self.chart {
            Chart::Hamiltonian => {
                let (a, b) = hamiltonian_rhs(x, self.u[0], self.u[1], mu)?;
                Ok([a, b])
            }
            Chart::Pole { a } => {
                let (qd, rd) = pole_chart_rhs(x, self.u[0], self.u[1], a);
                Ok([qd, rd])
            }
            Chart::Touch { c } => {
                let (ud, vd) = touch_chart_rhs(x, self.u[0], self.u[1], c, mu);
                Ok([ud, vd])
            }
        }
    }
}

/// A piece of an integration path, parametrised by arc length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PathPiece {
    Line { from: Complex64, to: Complex64 },
    /// Counter-clockwise when `to_angle > from_angle`.
    Arc { center: Complex64, radius: f64, from_angle: f64, to_angle: f64 },
}

impl PathPiece {
    fn length(&self) -> f64 {
        match *self {
            PathPiece::Line { from, to } => (to - from).norm(),
            PathPiece::Arc { radius, from_angle, to_angle, .. } => radius * (to_angle - from_angle).abs(),
        }
    }

    fn at(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            PathPiece::Line { from, to } => {
                let l = (to - from).norm();
                let d = (to - from) / l;
                (from + d * s, d)
            }
            PathPiece::Arc { center, radius, from_angle, to_angle } => {
                let dir = (to_angle - from_angle).signum();
                let th = from_angle + dir * s / radius;
                let e = Complex64::from_polar(1.0, th);
                (center + e * radius, Complex64::i() * e * dir)
            }
        }
    }

    fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            PathPiece::Line { from, to } => {
                let d = to - from;
                let t = (((z - from) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (from + d * t - z).norm()
            }
            PathPiece::Arc { .. } => {
                let n = 64;
                let l = self.length();
                (0..=n).map(|k| (self.at(l * k as f64 / n as f64).0 - z).norm()).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub pieces: Vec<PathPiece>,
}

impl Path {
    pub fn real_segment(a: f64, b: f64) -> Self {
        Path { pieces: vec![PathPiece::Line { from: Complex64::new(a, 0.0), to: Complex64::new(b, 0.0) }] }
    }

    pub fn polyline(points: &[Complex64]) -> Self {
        Path { pieces: points.windows(2).map(|w| PathPiece::Line { from: w[0], to: w[1] }).collect() }
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }

    pub fn start(&self) -> Complex64 {
        self.at(0.0).0
    }

    pub fn end(&self) -> Complex64 {
        self.at(self.length()).0
    }

    /// Point and unit tangent at arc length `tau`.
    pub fn at(&self, tau: f64) -> (Complex64, Complex64) {
        let mut rest = tau;
        for (k, p) in self.pieces.iter().enumerate() {
            let l = p.length();
            if rest <= l || k + 1 == self.pieces.len() {
                return p.at(rest.min(l));
            }
            rest -= l;
        }
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Replace the real point `c` by an upper semicircle of radius `r`.
    pub fn with_detour(&self, c: f64, r: f64) -> Path {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            match *p {
                PathPiece::Line { from, to } if from.im == 0.0 && to.im == 0.0 && (from.re - c) * (to.re - c) < 0.0 => {
                    let up = to.re > from.re;
                    let (a, b) = if up { (c - r, c + r) } else { (c + r, c - r) };
                    pieces.push(PathPiece::Line { from, to: Complex64::new(a, 0.0) });
                    let (fa, ta) = if up { (PI, 0.0) } else { (0.0, PI) };
                    pieces.push(PathPiece::Arc { center: Complex64::new(c, 0.0), radius: r, from_angle: fa, to_angle: ta });
                    pieces.push(PathPiece::Line { from: Complex64::new(b, 0.0), to });
                }
                other => pieces.push(other),
            }
        }
        Path { pieces }
    }

    fn validate(&self) -> Result<(), PviError> {
        for p in &self.pieces {
            for z in [0.0, 1.0] {
                if p.distance_to(Complex64::new(z, 0.0)) < 1e-12 {
                    return Err(PviError::PathThroughSingularity);
                }
            }
        }
        if self.length() == 0.0 {
            return Err(PviError::InvalidSeed("empty path".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub x: Complex64,
    pub y: Complex64,
    pub yx: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub tau: f64,
    pub x: Complex64,
    pub y: Complex64,
    pub yx: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEvent {
    pub tau_enter: f64,
    pub tau_exit: f64,
    pub x_nearest: Complex64,
    /// Largest `|y|` seen while in the pole chart; a real crossing of the pole
    /// shows up as a peak above the configured pole threshold or a sign
    /// change of `1/y`.
    pub peak: f64,
    /// Mismatch of `y` between the two charts at the switch back.
    pub continuity: f64,
    pub residue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mu: f64,
    pub path: Path,
    pub samples: Vec<Sample>,
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub pole_events: Vec<PoleEvent>,
    /// Real points bypassed by a semicircle.
    pub detours: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Writes the CSV columns `path_param, x_re, x_im, y_re, y_im, yx_re, yx_im`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["path_param", "x_re", "x_im", "y_re", "y_im", "yx_re", "yx_im"])?;
        for s in &self.samples {
            wr.write_record(
                [s.tau, s.x.re, s.x.im, s.y.re, s.y.im, s.yx.re, s.yx.im].iter().map(|v| format!("{v:e}")),
            )?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<Sample>, csv::Error> {
        let mut rd = csv::Reader::from_reader(r);
        let mut out = Vec::new();
        for rec in rd.deserialize::<[f64; 7]>() {
            let v = rec?;
            out.push(Sample {
                tau: v[0],
                x: Complex64::new(v[1], v[2]),
                y: Complex64::new(v[3], v[4]),
                yx: Complex64::new(v[5], v[6]),
            });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// `|y|` above which a crossing counts as a pole event.
    pub pole_threshold: f64,
    /// Minimum step, relative to the path length.
    pub min_step: f64,
    /// Switch to the pole chart when `|q|` exceeds this, and back below half of it.
    pub chart_switch: f64,
    /// Switch to a touch chart when `|p|` exceeds this, and back below half of it.
    pub touch_switch: f64,
    pub max_steps: usize,
    /// Force samples at these many log-spaced points near each end of a real path.
    pub end_samples: usize,
    /// Retry around a collapse point with a semicircle of this radius.
    pub detour_radius: f64,
    /// Fixed step count; disables adaptivity when set.
    pub fixed_steps: Option<usize>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: 1e-10,
            pole_threshold: 1e8,
            min_step: 1e-14,
            chart_switch: 4.0,
            touch_switch: 20.0,
            max_steps: 2_000_000,
            end_samples: 80,
            detour_radius: 1e-2,
            fixed_steps: None,
        }
    }
}

// Dormand–Prince 5(4)
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    path: &'a Path,
    mu: f64,
}

impl Stepper<'_> {
    fn f(&self, tau: f64, st: ChartState) -> Result<[Complex64; 2], PviError> {
        let (x, dx) = self.path.at(tau);
        let r = st.rhs(x, self.mu)?;
        Ok([r[0] * dx, r[1] * dx])
    }

    /// One DP5(4) step: new state and error estimate.
    fn step(&self, tau: f64, st: ChartState, h: f64) -> Result<(ChartState, [Complex64; 2]), PviError> {
        let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
        for i in 0..7 {
            let mut u = st.u;
            for (j, kj) in k.iter().enumerate().take(i) {
                for c in 0..2 {
                    u[c] += kj[c] * (h * A[i][j]);
                }
            }
            k[i] = self.f(tau + C[i] * h, ChartState { chart: st.chart, u })?;
        }
        let mut u5 = st.u;
        let mut err = [Complex64::new(0.0, 0.0); 2];
        for i in 0..7 {
            for c in 0..2 {
                u5[c] += k[i][c] * (h * B5[i]);
                err[c] += k[i][c] * (h * (B5[i] - B4[i]));
            }
        }
        Ok((ChartState { chart: st.chart, u: u5 }, err))
    }
}

/// Chart thresholds: `|q|` for the pole chart, `|p|` for the touch charts.
#[derive(Clone, Copy, Debug)]
struct Switch {
    q: f64,
    p: f64,
}

fn switch_chart(st: ChartState, x: Complex64, mu: f64, th: Switch) -> ChartState {
    let to_ham = |st: ChartState| {
        let (q, p) = st.to_qp(x);
        ChartState { chart: Chart::Hamiltonian, u: [q, p] }
    };
    let st = match st.chart {
        Chart::Pole { .. } if st.u[0].norm() > 2.0 / th.q => to_ham(st),
        Chart::Touch { .. } if st.u[1].norm() > 2.0 / th.p => to_ham(st),
        _ => st,
    };
    if st.chart != Chart::Hamiltonian {
        return st;
    }
    let (q, p) = (st.u[0], st.u[1]);
    if q.norm() > th.q {
        let a = pole_residues(mu)
            .into_iter()
            .min_by(|a, b| (p * q - *a).norm().partial_cmp(&(p * q - *b).norm()).unwrap())
            .unwrap();
        return ChartState { chart: Chart::Pole { a }, u: [1.0 / q, p * q * q - a * q] };
    }
    if p.norm() > th.p {
        let c = [Touch::Zero, Touch::One, Touch::X]
            .into_iter()
            .min_by(|a, b| (q - a.value(x)).norm().partial_cmp(&(q - b.value(x)).norm()).unwrap())
            .unwrap();
        return ChartState { chart: Chart::Touch { c }, u: [(q - c.value(x)) * p * p, 1.0 / p] };
    }
    st
}

fn initial_state(s: OdeState) -> Result<ChartState, PviError> {
    if !(s.y.norm().is_finite() && s.yx.norm().is_finite()) {
        return Err(PviError::InvalidSeed("non-finite state".into()));
    }
    let p = p_from_y(s.x, s.y, s.yx).map_err(|e| PviError::InvalidSeed(e.to_string()))?;
    Ok(ChartState { chart: Chart::Hamiltonian, u: [s.y, p] })
}

/// Forced sample positions: log-spaced in the distance to each real endpoint.
fn forced_taus(path: &Path, n: usize) -> Vec<f64> {
    let len = path.length();
    let mut v = Vec::new();
    if n == 0 {
        return v;
    }
    let (a, b) = (path.start(), path.end());
    for (end, from_start) in [(a, true), (b, false)] {
        // distance of this end to the nearest fixed singular point
        let d = end.norm().min((end - 1.0).norm());
        if d > 0.1 * len {
            continue;
        }
        for k in 1..=n {
            // 9 d .. 0 beyond the endpoint: the decade [d, 10 d]
            let off = d * (10f64.powf(k as f64 / n as f64) - 1.0);
            if off >= len {
                continue;
            }
            v.push(if from_start { off } else { len - off });
        }
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

fn integrate_path(path: &Path, start: OdeState, mu: f64, opts: &IntegrateOptions) -> Result<Trajectory, (PviError, f64)> {
    path.validate().map_err(|e| (e, 0.0))?;
    let mut st = initial_state(start).map_err(|e| (e, 0.0))?;
    let th = Switch { q: opts.chart_switch, p: opts.touch_switch };
    st = switch_chart(st, start.x, mu, th);
    let len = path.length();
    let stepper = Stepper { path, mu };
    let mut samples = vec![Sample { tau: 0.0, x: start.x, y: start.y, yx: start.yx }];
    let mut forced = forced_taus(path, opts.end_samples).into_iter().peekable();
    let mut tau = 0.0;
    let hmin = opts.min_step * len;
    let mut h = match opts.fixed_steps {
        Some(n) => len / n as f64,
        None => (len * 1e-4).min(start.x.norm().min((start.x - 1.0).norm()) * 1e-2).max(hmin * 10.0),
    };
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut min_step = f64::INFINITY;
    let mut events = Vec::new();
    let mut open: Option<PoleEvent> = None;
    while tau < len {
        if accepted + rejected > opts.max_steps {
            return Err((PviError::StepCollapse(tau), tau));
        }
        let mut target = (tau + h).min(len);
        if opts.fixed_steps.is_none() {
            while let Some(&f) = forced.peek() {
                if f <= tau * (1.0 + 1e-15) {
                    forced.next();
                } else {
                    target = target.min(f);
                    break;
                }
            }
        }
        let hs = target - tau;
        let (new, err) = stepper.step(tau, st, hs).map_err(|e| (e, tau))?;
        let scale = |c: usize| opts.tol * (1.0 + st.u[c].norm().max(new.u[c].norm()));
        let e = (err[0].norm() / scale(0)).max(err[1].norm() / scale(1));
        let ok = e.is_finite() && new.u.iter().all(|z| z.norm().is_finite());
        if opts.fixed_steps.is_some() || (ok && e <= 1.0) {
            if !ok {
                return Err((PviError::StepCollapse(tau), tau));
            }
            accepted += 1;
            min_step = min_step.min(hs);
            tau = target;
            let before = new;
            let (x, _) = path.at(tau);
            st = switch_chart(new, x, mu, th);
            match (before.chart, st.chart) {
                (Chart::Hamiltonian, Chart::Pole { a }) => {
                    open = Some(PoleEvent {
                        tau_enter: tau,
                        tau_exit: tau,
                        x_nearest: x,
                        peak: before.u[0].norm(),
                        continuity: 0.0,
                        residue: a,
                    })
                }
                (Chart::Pole { .. }, Chart::Hamiltonian) => {
                    if let Some(mut ev) = open.take() {
                        let y_pole = before.to_y(x, mu).map(|v| v.0).unwrap_or(st.u[0]);
                        ev.tau_exit = tau;
                        ev.continuity = (y_pole - st.u[0]).norm() / st.u[0].norm().max(1.0);
                        events.push(ev);
                    }
                }
                (Chart::Pole { .. }, Chart::Pole { .. }) | (Chart::Touch { .. }, Chart::Pole { .. }) => {
                    if let Some(ev) = open.as_mut() {
                        let m = 1.0 / st.u[0].norm();
                        if m > ev.peak {
                            ev.peak = m;
                            ev.x_nearest = x;
                        }
                    }
                }
                _ => {}
            }
            if let Some((y, yx)) = st.to_y(x, mu) {
                samples.push(Sample { tau, x, y, yx });
            }
            if opts.fixed_steps.is_none() {
                let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                // a step clipped to a forced sample does not shrink the step size
                h = if hs < h { h.max(hs * fac) } else { hs * fac };
            }
        } else {
            rejected += 1;
            let fac = if ok { (0.9 * e.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h = hs * fac;
            if h < hmin {
                return Err((PviError::StepCollapse(tau), tau));
            }
        }
    }
    if let Some(mut ev) = open.take() {
        ev.tau_exit = tau;
        events.push(ev);
    }
    Ok(Trajectory {
        mu,
        path: path.clone(),
        samples,
        accepted,
        rejected,
        min_step,
        pole_events: events,
        detours: Vec::new(),
    })
}

/// Integrates PVIμ from `start` along `path` (which must begin at `start.x`).
/// On step collapse at a real point away from `0, 1` the path is retried
/// with a semicircular detour into the upper half plane.
pub fn integrate_from_state(path: &Path, start: OdeState, mu: f64, opts: &IntegrateOptions) -> Result<Trajectory, PviError> {
    let mut p = path.clone();
    let mut detours = Vec::new();
    loop {
        match integrate_path(&p, start, mu, opts) {
            Ok(mut t) => {
                t.detours = detours;
                return Ok(t);
            }
            Err((PviError::StepCollapse(tau), _)) if detours.len() < 8 => {
                let (x, _) = p.at(tau);
                let c = x.re + opts.detour_radius * 0.5;
                let near_fixed = c.abs() < 2.0 * opts.detour_radius || (c - 1.0).abs() < 2.0 * opts.detour_radius;
                if x.im != 0.0 || near_fixed {
                    return Err(PviError::StepCollapse(tau));
                }
                let q = p.with_detour(c, opts.detour_radius);
                if q == p {
                    return Err(PviError::StepCollapse(tau));
                }
                detours.push(c);
                p = q;
            }
            Err((e, _)) => return Err(e),
        }
    }
}

/// State `y = a x^l`, `y_x = a l x^{l−1}` on the leading term at 0.
pub fn seed_from_datum(seed: &AsymptoticDatum, x_start: f64) -> Result<OdeState, PviError> {
    if seed.point != CriticalPoint::Zero {
        return Err(PviError::InvalidSeed("seed must be taken at x = 0".into()));
    }
    if !(0.0..1.0).contains(&seed.sigma) {
        return Err(PviError::InvalidSeed(format!("sigma {} outside [0, 1)", seed.sigma)));
    }
    if seed.a.norm() == 0.0 {
        return Err(PviError::InvalidSeed("a0 = 0".into()));
    }
    let l = 1.0 - seed.sigma;
    let x = Complex64::new(x_start, 0.0);
    let y = seed.a * x.powf(l);
    Ok(OdeState { x, y, yx: y * l / x })
}

/// Integrates from the leading term of `seed` at `x_start` to `x_end` along the real axis.
pub fn integrate(seed: &AsymptoticDatum, mu: f64, x_start: f64, x_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, PviError> {
    let st = seed_from_datum(seed, x_start)?;
    integrate_from_state(&Path::real_segment(x_start, x_end), st, mu, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub datum: AsymptoticDatum,
    pub exponent_stderr: f64,
    /// Correction exponent step chosen by the fit.
    pub delta: f64,
    pub corrections: usize,
    pub relative_residual: f64,
    pub samples: usize,
}

/// Least squares via modified Gram–Schmidt; returns coefficients and
/// the residual vector.
fn least_squares(cols: &[Vec<f64>], rhs: &[f64]) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = cols.len();
    let m = rhs.len();
    if m <= n {
        return None;
    }
    let mut q: Vec<Vec<f64>> = cols.to_vec();
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        for i in 0..j {
            let d: f64 = (0..m).map(|k| q[i][k] * q[j][k]).sum();
            r[i][j] = d;
            for k in 0..m {
                q[j][k] -= d * q[i][k];
            }
        }
        let nrm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm < 1e-13 * cols[j].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300) {
            return None;
        }
        r[j][j] = nrm;
        for k in 0..m {
            q[j][k] /= nrm;
        }
    }
    let qtb: Vec<f64> = (0..n).map(|j| (0..m).map(|k| q[j][k] * rhs[k]).sum()).collect();
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let s: f64 = (j + 1..n).map(|i| r[j][i] * x[i]).sum();
        x[j] = (qtb[j] - s) / r[j][j];
    }
    let res: Vec<f64> = (0..m).map(|k| rhs[k] - (0..n).map(|j| cols[j][k] * x[j]).sum::<f64>()).collect();
    // diagonal of (RᵀR)⁻¹ for the standard errors
    let mut rinv = vec![vec![0.0; n]; n];
    for j in 0..n {
        rinv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[i][k] * rinv[k][j]).sum();
            rinv[i][j] = -s / r[i][i];
        }
    }
    let var: Vec<f64> = (0..n).map(|i| (i..n).map(|j| rinv[i][j] * rinv[i][j]).sum()).collect();
    Some((x, res, var))
}

pub const MAX_CORRECTIONS: usize = 10;

pub const FIT_DELTAS: [f64; 8] = [0.2, 1.0 / 3.0, 0.4, 0.5, 0.6, 2.0 / 3.0, 0.8, 1.0];

/// Least squares of `rhs` on `base` plus a degree-`k` polynomial in `u = t^δ`
/// without constant term, written in the Chebyshev basis on the sampled `u`
/// range. Returns the fitted value at `u = 0` of each base column's
/// coefficient (the polynomial part is shifted so that it vanishes at 0),
/// the residuals and the variances of the base coefficients.
fn fit_series(ts: &[f64], base: &[Vec<f64>], rhs: &[f64], delta: f64, k: usize) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let us: Vec<f64> = ts.iter().map(|t| t.powf(delta)).collect();
    let (lo, hi) = us.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let map = |u: f64| if hi > lo { (2.0 * u - lo - hi) / (hi - lo) } else { 0.0 };
    let cheb = |z: f64, j: usize| {
        let (mut t0, mut t1) = (1.0, z);
        if j == 0 {
            return 1.0;
        }
        for _ in 1..j {
            let t2 = 2.0 * z * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        t1
    };
    let z0 = map(0.0);
    let mut cols = base.to_vec();
    for j in 1..=k {
        // T_j(z) − T_j(z0) vanishes at u = 0, so the base coefficients are the limits
        cols.push(us.iter().map(|&u| cheb(map(u), j) - cheb(z0, j)).collect());
    }
    least_squares(&cols, rhs)
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|r| r * r).sum::<f64>() / v.len() as f64).sqrt()
}

/// Fits the leading behaviour `Δ ~ a t^e` over samples within distance
/// `window` of the critical point, where `(t, Δ)` is `(|x|, y)` at 0,
/// `(|1 − x|, 1 − y)` at 1 and `(1/|x|, y)` at ∞.
///
/// The exponent comes from the local exponent `t Δ′/Δ = e + Σ c_k t^{kδ}`,
/// then `log|Δ| − e log t = log|a| + Σ b_k t^{kδ}`. The correction step δ and
/// the number of terms are picked by the Akaike criterion on the first fit.
pub fn fit_samples(samples: &[Sample], point: CriticalPoint, window: f64) -> Result<FitReport, PviError> {
    let (mut ts, mut ds, mut les) = (Vec::new(), Vec::new(), Vec::new());
    for s in samples {
        let (t, d, le) = match point {
            CriticalPoint::Zero => (s.x.norm(), s.y, s.x * s.yx / s.y),
            CriticalPoint::One => ((1.0 - s.x).norm(), 1.0 - s.y, (1.0 - s.x) * s.yx / (1.0 - s.y)),
            CriticalPoint::Infinity => (1.0 / s.x.norm(), s.y, -s.x * s.yx / s.y),
        };
        if t > 0.0 && t <= window && d.norm() > 0.0 && d.norm().is_finite() && le.is_finite() {
            ts.push(t);
            ds.push(d);
            les.push(le.re);
        }
    }
    let n = ts.len();
    if n < 8 {
        return Err(PviError::PoorFit(f64::INFINITY));
    }
    let logt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let logd: Vec<f64> = ds.iter().map(|d| d.norm().ln()).collect();
    let spread = logd.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - logd.iter().cloned().fold(f64::INFINITY, f64::min);
    let ones = vec![1.0; n];
    let mut best: Option<(f64, f64, usize, Vec<f64>, f64, f64)> = None;
    for &delta in &FIT_DELTAS {
        for k in 0..=MAX_CORRECTIONS.min(n.saturating_sub(4)) {
            if k == 0 && delta != FIT_DELTAS[0] {
                continue;
            }
            if let Some((c, res, var)) = fit_series(&ts, &[ones.clone()], &les, delta, k) {
                let rss = res.iter().map(|r| r * r).sum::<f64>().max(1e-300);
                let aic = n as f64 * (rss / n as f64).ln() + 2.0 * (k + 1) as f64;
                if best.as_ref().map_or(true, |b| aic < b.0) {
                    let dof = (n - k - 1).max(1) as f64;
                    let se = (rss / dof * var[0]).sqrt();
                    best = Some((aic, delta, k, c, rms(&res), se));
                }
            }
        }
    }
    let (_, delta, k, c, rms1, se) = best.ok_or(PviError::PoorFit(f64::INFINITY))?;
    let e = c[0];
    let shifted: Vec<f64> = logd.iter().zip(&logt).map(|(d, lt)| d - e * lt).collect();
    let (c2, res2, _) = fit_series(&ts, &[ones], &shifted, delta, k).ok_or(PviError::PoorFit(f64::INFINITY))?;
    let rel = rms1.max(rms(&res2));
    if rel > 1e-3 || !e.is_finite() || (point != CriticalPoint::Infinity && e <= 1e-6) || spread < 1e-9 {
        return Err(PviError::PoorFit(rel));
    }
    // phase from the sample closest to the point
    let i = (0..n).min_by(|&a, &b| ts[a].partial_cmp(&ts[b]).unwrap()).unwrap();
    let phase = ds[i] / ds[i].norm();
    let a = phase * c2[0].exp();
    let (sigma, l) = match point {
        CriticalPoint::Infinity => (-e, 1.0 + e),
        _ => (1.0 - e, e),
    };
    Ok(FitReport {
        datum: AsymptoticDatum { point, sigma, l, a },
        exponent_stderr: se,
        delta,
        corrections: k,
        relative_residual: rel,
        samples: n,
    })
}

/// Fit over the last decade of the trajectory before the critical point.
pub fn fit_asymptotics(traj: &Trajectory, point: CriticalPoint) -> Result<FitReport, PviError> {
    let end = match point {
        CriticalPoint::Zero => traj.samples.iter().map(|s| s.x.norm()).fold(f64::INFINITY, f64::min),
        CriticalPoint::One => traj.samples.iter().map(|s| (1.0 - s.x).norm()).fold(f64::INFINITY, f64::min),
        CriticalPoint::Infinity => traj.samples.iter().map(|s| 1.0 / s.x.norm()).fold(f64::INFINITY, f64::min),
    };
    if end > 1e-2 {
        return Err(PviError::PoorFit(f64::INFINITY));
    }
    fit_samples(&traj.samples, point, end * 10.0 * (1.0 + 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rhs_guards_and_half() {
        assert!(matches!(pvi_rhs(c(0.3), c(0.3), c(1.0), 0.2), Err(PviError::SingularPoint(_))));
        // μ = 1/2: only the x(x−1)/(y−x)² piece survives in the last bracket
        let (x, y, yx) = (c(0.3), c(0.7), c(0.0));
        let r = pvi_rhs(x, y, yx, 0.5).unwrap();
        let want = 0.5 * y * (y - 1.0) * (y - x) / (x * x * (x - 1.0) * (x - 1.0)) * (x * (x - 1.0) / ((y - x) * (y - x)));
        assert!((r - want).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_smoke() {
        let (_, pd) = hamiltonian_rhs(c(0.4), c(0.2), c(0.0), 0.0).unwrap();
        assert_eq!(pd, c(0.0));
        assert!(p_from_y(c(0.4), c(0.4), c(1.0)).is_err());
    }

    #[test]
    fn hamiltonian_matches_second_order() {
        // differentiate y_x = q̇ along the flow and compare with pvi_rhs
        let mu = -0.2;
        let (x, y, yx) = (c(0.37), Complex64::new(0.61, 0.1), Complex64::new(-0.4, 0.3));
        let p = p_from_y(x, y, yx).unwrap();
        let h = 1e-5;
        let g = |dx: f64| {
            let xx = x + dx;
            let (qd, pd) = hamiltonian_rhs(x, y, p, mu).unwrap();
            let (q1, p1) = (y + qd * dx, p + pd * dx);
            yx_from_qp(xx, q1, p1)
        };
        let ypp = (g(h) - g(-h)) / (2.0 * h);
        let r = pvi_rhs(x, y, yx, mu).unwrap();
        assert!((ypp - r).norm() < 1e-6 * r.norm().max(1.0), "{ypp} vs {r}");
        assert!((yx_from_qp(x, y, p) - yx).norm() < 1e-13);
    }

    #[test]
    fn pole_chart_agrees_with_hamiltonian() {
        let mu = -0.2;
        let x = c(0.3);
        let (q, p) = (Complex64::new(5.0, 1.0), Complex64::new(0.01, -0.02));
        for a in pole_residues(mu) {
            let (qd, pd) = hamiltonian_rhs(x, q, p, mu).unwrap();
            let (qid, rd) = pole_chart_rhs(x, 1.0 / q, p * q * q - a * q, a);
            assert!((qid + qd / (q * q)).norm() < 1e-12);
            let want = pd * q * q + 2.0 * p * q * qd - a * qd;
            assert!((rd - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn synthetic_fit() {
        let samples: Vec<Sample> = (0..=120)
            .map(|k| {
                let t = 10f64.powf(-6.0 + 3.0 * k as f64 / 120.0);
                Sample { tau: k as f64, x: c(t), y: c(0.3 * t.sqrt() * (1.0 + 0.1 * t)), yx: c(0.3 * (0.5 / t.sqrt() + 0.15 * t.sqrt())) }
            })
            .collect();
        let f = fit_samples(&samples, CriticalPoint::Zero, 1e-3).unwrap();
        assert!((f.datum.sigma - 0.5).abs() < 1e-4);
        assert!((f.datum.a.re - 0.3).abs() < 1e-4);
        let flat: Vec<Sample> = samples.iter().map(|s| Sample { y: c(0.5), yx: c(0.0), ..*s }).collect();
        assert!(matches!(fit_samples(&flat, CriticalPoint::Zero, 1e-3), Err(PviError::PoorFit(_))));
    }

    #[test]
    fn rejects_bad_seeds_and_paths() {
        let d = AsymptoticDatum { point: CriticalPoint::Zero, sigma: 0.3, l: 0.7, a: c(0.0) };
        assert!(matches!(seed_from_datum(&d, 1e-3), Err(PviError::InvalidSeed(_))));
        let st = OdeState { x: c(0.5), y: c(0.2), yx: c(0.1) };
        assert_eq!(
            integrate_from_state(&Path::real_segment(0.5, 1.5), st, -0.2, &IntegrateOptions::default()),
            Err(PviError::PathThroughSingularity)
        );
    }

    #[test]
    fn csv_round_trip() {
        let st = OdeState { x: c(0.2), y: c(0.3), yx: c(0.1) };
        let t = integrate_from_state(&Path::real_segment(0.2, 0.4), st, -0.2, &IntegrateOptions::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Trajectory::read_csv(&buf[..]).unwrap();
        assert_eq!(back, t.samples);
    }

    #[test]
    fn reversibility_and_poles() {
        let opts = IntegrateOptions::default();
        let st = OdeState { x: c(0.2), y: c(0.3), yx: c(3.0) };
        let fwd = integrate_from_state(&Path::real_segment(0.2, 0.8), st, -0.3, &opts).unwrap();
        let e = fwd.last();
        let back = integrate_from_state(&Path::real_segment(0.8, 0.2), OdeState { x: e.x, y: e.y, yx: e.yx }, -0.3, &opts).unwrap();
        let b = back.last();
        assert!((b.y - st.y).norm() < 1e-7, "{} {}", b.y, st.y);
        for ev in &fwd.pole_events {
            assert!(ev.continuity < 10.0 * opts.tol);
        }
    }
}
