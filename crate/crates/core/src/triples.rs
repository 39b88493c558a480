//! Monodromy triples, their two-sign equivalence classes, the braid-group
//! action and the symmetries i1, i2.
//!
//! Braid words act as composed maps: in `β2⁻¹β1β2` the rightmost letter acts
//! first.

use crate::algebra::Ring;
use crate::exactnum::{angle_of, FieldElement};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripleError {
    #[error("resonant case: quadratic invariant is {0} (2μ is an integer)")]
    ResonantMu(f64),
    #[error("orbit budget exceeded after {partial} classes")]
    BudgetExceeded { partial: usize },
    #[error("escape procedure not applicable: {0}")]
    NotApplicable(String),
    #[error("cannot parse braid word: {0}")]
    BadWord(String),
}

/// Coordinates usable in a triple: exact field elements or doubles.
pub trait Scalar: Ring {
    const EXACT: bool;
    fn to_f64(&self) -> f64;
    /// Order of the real embeddings (doubles compare after rounding to 1e−9).
    fn cmp_real(&self, o: &Self) -> Ordering;
    fn scale_rational(&self, r: &BigRational) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cmp_real(&self, o: &Self) -> Ordering {
        float_key(*self).cmp(&float_key(*o))
    }
    fn scale_rational(&self, r: &BigRational) -> Self {
        self * crate::algebra::rat_to_f64(r)
    }
}

impl Scalar for FieldElement {
    const EXACT: bool = true;
    fn to_f64(&self) -> f64 {
        FieldElement::to_f64(self)
    }
    fn cmp_real(&self, o: &Self) -> Ordering {
        FieldElement::cmp_real(self, o)
    }
    fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(r)
    }
}

/// Rounded integer key used to hash float coordinates (tolerance 1e−9).
pub fn float_key(v: f64) -> i64 {
    let k = (v * 1e9).round() as i64;
    if k == 0 {
        0
    } else {
        k
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Triple<T> {
    pub x: [T; 3],
}

impl<T: Scalar> Triple<T> {
    pub fn new(x1: T, x2: T, x3: T) -> Self {
        Triple { x: [x1, x2, x3] }
    }

    pub fn backing(&self) -> &'static str {
        if T::EXACT {
            "exact"
        } else {
            "float"
        }
    }

    /// At most one coordinate vanishes.
    pub fn is_admissible(&self) -> bool {
        self.x.iter().filter(|v| v.is_zero() || (!T::EXACT && v.to_f64().abs() < 1e-12)).count() <= 1
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x[0].to_f64(), self.x[1].to_f64(), self.x[2].to_f64()]
    }

    pub fn to_float(&self) -> Triple<f64> {
        let v = self.to_f64();
        Triple::new(v[0], v[1], v[2])
    }

    /// The four members of the two-sign class.
    pub fn sign_variants(&self) -> [Triple<T>; 4] {
        let [a, b, c] = self.x.clone();
        [
            Triple::new(a.clone(), b.clone(), c.clone()),
            Triple::new(a.clone(), -b.clone(), -c.clone()),
            Triple::new(-a.clone(), b.clone(), -c.clone()),
            Triple::new(-a, -b, c),
        ]
    }

    fn cmp_lex(&self, o: &Self) -> Ordering {
        for i in 0..3 {
            match self.x[i].cmp_real(&o.x[i]) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    pub fn class(&self) -> TripleClass<T> {
        let vars = self.sign_variants();
        let mut best = &vars[0];
        for v in &vars[1..] {
            if v.cmp_lex(best) == Ordering::Greater {
                best = v;
            }
        }
        let mut rep = best.clone();
        if !T::EXACT {
            for v in rep.x.iter_mut() {
                if v.to_f64() == 0.0 {
                    *v = v.zero_like();
                }
            }
        }
        TripleClass { representative: rep }
    }
}

impl Triple<f64> {
    /// Hash key of the class for float triples.
    pub fn class_key(&self) -> [i64; 3] {
        let r = self.class().representative;
        [float_key(r.x[0]), float_key(r.x[1]), float_key(r.x[2])]
    }

    /// Class equality with an absolute tolerance on the canonical forms.
    pub fn same_class_approx(&self, o: &Triple<f64>, tol: f64) -> bool {
        let b = o.x;
        self.sign_variants().iter().any(|v| (0..3).all(|i| (v.x[i] - b[i]).abs() <= tol))
    }
}

/// Two-sign equivalence class, stored through its canonical representative.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TripleClass<T> {
    pub representative: Triple<T>,
}

/// Q = x1² + x2² + x3² − x1x2x3.
pub fn quadratic_invariant<T: Scalar>(t: &Triple<T>) -> T {
    let [a, b, c] = &t.x;
    a.square() + b.square() + c.square() - a.clone() * b.clone() * c.clone()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Gen {
    B1,
    B1Inv,
    B2,
    B2Inv,
}

impl Gen {
    pub fn inverse(self) -> Gen {
        match self {
            Gen::B1 => Gen::B1Inv,
            Gen::B1Inv => Gen::B1,
            Gen::B2 => Gen::B2Inv,
            Gen::B2Inv => Gen::B2,
        }
    }
}

pub fn apply_gen<T: Scalar>(g: Gen, t: &Triple<T>) -> Triple<T> {
    let [a, b, c] = t.x.clone();
    match g {
        Gen::B1 => Triple::new(-a.clone(), c - a * b.clone(), b),
        Gen::B1Inv => Triple::new(-a.clone(), c.clone(), b - a * c),
        Gen::B2 => Triple::new(c.clone(), -b.clone(), a - b * c),
        Gen::B2Inv => Triple::new(c.clone() - b.clone() * a.clone(), -b, a),
    }
}

/// Finite word in the braid generators; the rightmost letter acts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct BraidWord {
    pub letters: Vec<Gen>,
}

impl BraidWord {
    pub fn new(letters: Vec<Gen>) -> Self {
        BraidWord { letters }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &BraidWord) -> BraidWord {
        let mut l = self.letters.clone();
        l.extend_from_slice(&other.letters);
        BraidWord { letters: l }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { letters: self.letters.iter().rev().map(|g| g.inverse()).collect() }
    }

    pub fn pow(&self, k: usize) -> BraidWord {
        let mut l = Vec::new();
        for _ in 0..k {
            l.extend_from_slice(&self.letters);
        }
        BraidWord { letters: l }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<&str> = self
            .letters
            .iter()
            .map(|g| match g {
                Gen::B1 => "b1",
                Gen::B1Inv => "b1^-1",
                Gen::B2 => "b2",
                Gen::B2Inv => "b2^-1",
            })
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = TripleError;
    /// Accepts space-separated letters `b1`, `b2`, `b1^-1`, `b2^-1` (also `B1`, `b1'`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let g = match tok.to_ascii_lowercase().as_str() {
                "b1" => Gen::B1,
                "b2" => Gen::B2,
                "b1^-1" | "b1'" | "b1i" => Gen::B1Inv,
                "b2^-1" | "b2'" | "b2i" => Gen::B2Inv,
                "1" => continue,
                _ => return Err(TripleError::BadWord(tok.to_string())),
            };
            letters.push(g);
        }
        Ok(BraidWord { letters })
    }
}

pub fn braid_apply<T: Scalar>(w: &BraidWord, t: &Triple<T>) -> Triple<T> {
    w.letters.iter().rev().fold(t.clone(), |acc, g| apply_gen(*g, &acc))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Symmetry {
    I1,
    I2,
}

pub fn symmetry_apply<T: Scalar>(kind: Symmetry, t: &Triple<T>) -> Triple<T> {
    let [a, b, c] = t.x.clone();
    match kind {
        Symmetry::I1 => Triple::new(c - a.clone() * b.clone(), -b, a),
        Symmetry::I2 => Triple::new(-b.clone(), -a.clone(), a * b - c),
    }
}

/// sin²πμ of a triple, with a representative μ ∈ [0, 1/2] when real.
#[derive(Clone, Debug)]
pub struct MuClass<T> {
    pub sin_sq_pi_mu: T,
    pub representative_mu: Option<f64>,
    /// Exact representative when μ is rational with a small denominator.
    pub representative_rational: Option<BigRational>,
}

pub fn mu_from_triple<T: Scalar>(t: &Triple<T>) -> Result<MuClass<T>, TripleError> {
    let q = quadratic_invariant(t);
    let four = q.int_like(4);
    let qf = q.to_f64();
    let resonant = if T::EXACT { q.is_zero() || q == four } else { qf.abs() < 1e-12 || (qf - 4.0).abs() < 1e-12 };
    if resonant {
        return Err(TripleError::ResonantMu(qf));
    }
    let s = qf / 4.0;
    let representative_mu = (0.0..=1.0).contains(&s).then(|| s.sqrt().asin() / std::f64::consts::PI);
    let sin_sq = q.scale_rational(&BigRational::new(1.into(), 4.into()));
    Ok(MuClass { sin_sq_pi_mu: sin_sq, representative_mu, representative_rational: None })
}

/// Exact μ class of an exact triple; the rational representative is found
/// from `Q − 2 = −2cos(2πμ)`.
pub fn mu_from_exact_triple(t: &Triple<FieldElement>) -> Result<MuClass<FieldElement>, TripleError> {
    let mut m = mu_from_triple(t)?;
    let q = quadratic_invariant(t);
    let e = &q - &FieldElement::from_int(q.context(), 2);
    if (-2.0..=2.0).contains(&e.to_f64()) {
        if let Some(r) = angle_of(&e, 240) {
            m.representative_rational = Some(r / BigRational::from_integer(2.into()));
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum GroupKind {
    /// Full braid group B3 (generators β1, β2 and inverses).
    FullB3,
    /// Pure braid group P3, generated by β1², β2², β2⁻¹β1²β2.
    PureP3,
}

impl GroupKind {
    pub fn generators(self) -> Vec<BraidWord> {
        use Gen::*;
        match self {
            GroupKind::FullB3 => vec![
                BraidWord::new(vec![B1]),
                BraidWord::new(vec![B2]),
                BraidWord::new(vec![B1Inv]),
                BraidWord::new(vec![B2Inv]),
            ],
            GroupKind::PureP3 => {
                let g = vec![
                    BraidWord::new(vec![B1, B1]),
                    BraidWord::new(vec![B2, B2]),
                    BraidWord::new(vec![B2Inv, B1, B1, B2]),
                ];
                let inv: Vec<BraidWord> = g.iter().map(|w| w.inverse()).collect();
                g.into_iter().chain(inv).collect()
            }
        }
    }
}

pub const DEFAULT_ORBIT_BUDGET: usize = 100_000;

/// Classes of an orbit in breadth-first discovery order, each with a braid
/// word carrying the seed to it.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub group: GroupKind,
    pub classes: Vec<TripleClass<FieldElement>>,
    pub words: Vec<BraidWord>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, c: &TripleClass<FieldElement>) -> bool {
        self.classes.contains(c)
    }
}

pub fn orbit_enumerate(seed: &Triple<FieldElement>, group: GroupKind, budget: usize) -> Result<Orbit, TripleError> {
    let gens = group.generators();
    let start = seed.class();
    let mut seen: HashMap<TripleClass<FieldElement>, usize> = HashMap::new();
    let mut classes = vec![start.clone()];
    let mut words = vec![BraidWord::identity()];
    seen.insert(start, 0);
    let mut head = 0;
    while head < classes.len() {
        let cur = classes[head].representative.clone();
        let w = words[head].clone();
        head += 1;
        for g in &gens {
            let img = braid_apply(g, &cur).class();
            if !seen.contains_key(&img) {
                if classes.len() >= budget {
                    return Err(TripleError::BudgetExceeded { partial: classes.len() });
                }
                seen.insert(img.clone(), classes.len());
                classes.push(img);
                words.push(g.compose(&w));
            }
        }
    }
    Ok(Orbit { group, classes, words })
}

/// Result of the escape procedure.
#[derive(Clone, Debug)]
pub struct Escape {
    pub word: BraidWord,
    pub image: Triple<f64>,
    pub iterations: usize,
    /// `ceil((12 − Σ|x_i|)/Δ) + 1` evaluated at the start of the iteration.
    pub bound: usize,
}

/// Braid carrying a real triple with `Q > 4` and `|x_i| ≤ 2` to one with a
/// coordinate of modulus greater than 2, by the smallest-coordinate rule.
pub fn escape_braid(t: &Triple<f64>) -> Result<Escape, TripleError> {
    use Gen::*;
    let q = quadratic_invariant(t);
    if q <= 4.0 {
        return Err(TripleError::NotApplicable(format!("Q = {q} is not greater than 4")));
    }
    let c = (q - 4.0).sqrt();
    if t.x.iter().any(|v| v.abs() > 2.0) {
        return Ok(Escape { word: BraidWord::identity(), image: t.clone(), iterations: 0, bound: 0 });
    }
    // Make every coordinate nonzero with a short braid.
    let mut word = BraidWord::identity();
    let mut cur = t.clone();
    if cur.x.iter().any(|v| *v == 0.0) {
        let gens = [B1, B2, B1Inv, B2Inv];
        let mut found = None;
        'search: for len in 1..=3usize {
            let total = 4usize.pow(len as u32);
            for code in 0..total {
                let letters: Vec<Gen> = (0..len).map(|i| gens[(code / 4usize.pow(i as u32)) % 4]).collect();
                let w = BraidWord::new(letters);
                let img = braid_apply(&w, &cur);
                if img.x.iter().all(|v| *v != 0.0) {
                    found = Some(w);
                    break 'search;
                }
            }
        }
        let w = found.ok_or_else(|| TripleError::NotApplicable("no short braid makes all coordinates nonzero".into()))?;
        cur = braid_apply(&w, &cur);
        word = w;
        if cur.x.iter().any(|v| v.abs() > 2.0) {
            return Ok(Escape { word, image: cur, iterations: 0, bound: 0 });
        }
    }
    let xmin = cur.x.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let delta = (xmin * xmin).min(2.0 * c);
    let sum: f64 = cur.x.iter().map(|v| v.abs()).sum();
    let bound = ((12.0 - sum) / delta).ceil().max(0.0) as usize + 1;
    let b_x = BraidWord::new(vec![B2]);
    let b_y = BraidWord::new(vec![B2Inv, B1, B2]);
    let b_z = BraidWord::new(vec![B1]);
    let mut iterations = 0;
    while cur.x.iter().all(|v| v.abs() <= 2.0) {
        let a = cur.x.map(f64::abs);
        let step = if a[0] <= a[1] && a[0] <= a[2] {
            &b_x
        } else if a[1] <= a[0] && a[1] <= a[2] {
            &b_y
        } else {
            &b_z
        };
        cur = braid_apply(step, &cur);
        word = step.compose(&word);
        iterations += 1;
        if iterations > 10 * bound + 100 {
            return Err(TripleError::NotApplicable("iteration bound exceeded".into()));
        }
    }
    Ok(Escape { word, image: cur, iterations, bound })
}

/// Set of canonical classes, for order-independent comparisons.
pub fn class_set(o: &Orbit) -> HashSet<TripleClass<FieldElement>> {
    o.classes.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{elem_from_cos, field_new};

    fn ft(ctx: &crate::exactnum::Ctx, a: i64, b: i64, c: i64) -> Triple<FieldElement> {
        Triple::new(FieldElement::from_int(ctx, a), FieldElement::from_int(ctx, b), FieldElement::from_int(ctx, c))
    }

    #[test]
    fn quadratic_invariant_examples() {
        let c4 = field_new(4);
        assert_eq!(quadratic_invariant(&ft(&c4, 0, 1, 1)), FieldElement::from_int(&c4, 2));
        assert!(quadratic_invariant(&ft(&c4, 0, 0, 0)).is_zero());
        let cube = Triple::new(FieldElement::from_int(&c4, -1), FieldElement::zero(&c4), elem_from_cos(1, 4, &c4).unwrap());
        assert_eq!(quadratic_invariant(&cube), FieldElement::from_int(&c4, 3));
    }

    #[test]
    fn braid_examples() {
        let c4 = field_new(4);
        let r2 = elem_from_cos(1, 4, &c4).unwrap();
        let t = ft(&c4, 0, 1, 1);
        assert_eq!(apply_gen(Gen::B1, &t), t);
        let cube = Triple::new(FieldElement::from_int(&c4, -1), FieldElement::zero(&c4), r2.clone());
        assert_eq!(apply_gen(Gen::B1, &cube), Triple::new(FieldElement::from_int(&c4, 1), r2.clone(), FieldElement::zero(&c4)));
        assert_eq!(apply_gen(Gen::B2, &cube), Triple::new(r2, FieldElement::zero(&c4), FieldElement::from_int(&c4, -1)));
    }

    #[test]
    fn symmetry_examples() {
        let c1 = field_new(1);
        assert_eq!(symmetry_apply(Symmetry::I1, &ft(&c1, 1, 1, 1)), ft(&c1, 0, -1, 1));
        assert_eq!(symmetry_apply(Symmetry::I2, &ft(&c1, 0, 1, 1)), ft(&c1, -1, 0, -1));
        assert_eq!(symmetry_apply(Symmetry::I2, &ft(&c1, 0, 0, 3)), ft(&c1, 0, 0, -3));
    }

    #[test]
    fn word_parsing_and_order() {
        let w: BraidWord = "b2^-1 b1 b2".parse().unwrap();
        assert_eq!(w.letters, vec![Gen::B2Inv, Gen::B1, Gen::B2]);
        let t = Triple::new(0.3, -0.7, 1.1);
        let [x, y, z] = t.x;
        // composed action printed alongside the escape braids
        let want = [-y + x * z, -x, -z];
        let got = braid_apply(&w, &t).x;
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-15);
        }
        assert!("b3".parse::<BraidWord>().is_err());
    }

    #[test]
    fn mu_examples() {
        let c1 = field_new(1);
        let m = mu_from_exact_triple(&ft(&c1, 0, 1, 1)).unwrap();
        assert_eq!(m.sin_sq_pi_mu.as_rational().unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(m.representative_rational.unwrap(), BigRational::new(1.into(), 4.into()));
        assert!((m.representative_mu.unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(mu_from_triple(&ft(&c1, 0, 0, 0)), Err(TripleError::ResonantMu(_))));
        let c5 = field_new(5);
        let ico = Triple::new(FieldElement::zero(&c5), FieldElement::from_int(&c5, -1), elem_from_cos(1, 5, &c5).unwrap());
        let m = mu_from_exact_triple(&ico).unwrap();
        assert_eq!(m.representative_rational.unwrap(), BigRational::new(2.into(), 5.into()));
        assert!((m.sin_sq_pi_mu.to_f64() - (10.0 + 2.0 * 5f64.sqrt()) / 16.0).abs() < 1e-12);
    }

    #[test]
    fn tetrahedral_orbit() {
        let c1 = field_new(1);
        let o = orbit_enumerate(&ft(&c1, 0, 1, 1), GroupKind::FullB3, 100).unwrap();
        assert_eq!(o.len(), 4);
        for t in [ft(&c1, 0, 1, 1), ft(&c1, 1, 0, 1), ft(&c1, 1, 1, 0), ft(&c1, 1, 1, 1)] {
            assert!(o.contains(&t.class()), "{t:?}");
        }
        for (c, w) in o.classes.iter().zip(&o.words) {
            assert_eq!(&braid_apply(w, &ft(&c1, 0, 1, 1)).class(), c);
        }
    }

    #[test]
    fn infinite_orbit_exhausts_budget() {
        let c1 = field_new(1);
        let h = FieldElement::from_rational(&c1, BigRational::new(1.into(), 2.into()));
        let t = Triple::new(h.clone(), h.clone(), h);
        assert!(matches!(orbit_enumerate(&t, GroupKind::FullB3, 10_000), Err(TripleError::BudgetExceeded { partial: 10_000 })));
    }

    #[test]
    fn canonical_representative_is_stable() {
        let c5 = field_new(5);
        let t = Triple::new(elem_from_cos(1, 5, &c5).unwrap(), FieldElement::from_int(&c5, 1), elem_from_cos(2, 5, &c5).unwrap());
        let c = t.class();
        for v in t.sign_variants() {
            assert_eq!(v.class(), c);
        }
        let r = c.representative.to_f64();
        assert!(r[0] >= 0.0);
    }

    #[test]
    fn escape_examples() {
        let e = escape_braid(&Triple::new(-1.9, -1.9, -1.9)).unwrap();
        assert!(e.image.x.iter().any(|v| v.abs() > 2.0));
        assert!(e.iterations <= e.bound);
        let img = braid_apply(&e.word, &Triple::new(-1.9, -1.9, -1.9));
        for i in 0..3 {
            assert!((img.x[i] - e.image.x[i]).abs() < 1e-12);
        }
        assert!(matches!(escape_braid(&Triple::new(0.0, 1.0, 1.0)), Err(TripleError::NotApplicable(_))));
        // a coordinate equal to 2: Q = 4 + (x2 − x3)^2
        let e = escape_braid(&Triple::new(2.0, 0.5, 1.5)).unwrap();
        assert!(e.image.x.iter().any(|v| v.abs() > 2.0));
        assert!(matches!(escape_braid(&Triple::new(2.0, 1.0, 1.0)), Err(TripleError::NotApplicable(_))));
    }
}
