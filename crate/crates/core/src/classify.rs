//! Good triples: the rational four-cosine equation, its solution families,
//! and identification of a triple's braid orbit among the five finite ones.

use crate::exactnum::{angle_of, compound_context, elem_from_cos, field_new, Ctx, ExactError, FieldElement};
use crate::triples::{orbit_enumerate, quadratic_invariant, GroupKind, Orbit, Triple, TripleClass, TripleError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("field degree {degree} for n = {n} exceeds the cap {cap}")]
    ResourceLimit { n: u64, degree: usize, cap: usize },
    #[error("quadruple does not satisfy the cosine equation")]
    NotASolution,
    #[error("angle step leaves [-1, 1]")]
    OutOfRange,
    #[error("angle step gives a value that is not -2cos of a small rational angle")]
    Irrational,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Angles `r_i` with `x_i = −2cos(π r_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AngleTriple {
    pub r: [BigRational; 3],
}

impl AngleTriple {
    pub fn new(r1: BigRational, r2: BigRational, r3: BigRational) -> Self {
        AngleTriple { r: [r1, r2, r3] }
    }

    /// Smallest field containing all three coordinates.
    pub fn context(&self) -> Ctx {
        let n = self.r.iter().fold(1u64, |acc, r| acc.lcm(&r.denom().to_u64().expect("small denominator")));
        field_new(n)
    }

    pub fn to_triple(&self) -> Result<Triple<FieldElement>, ClassifyError> {
        let ctx = self.context();
        let e = |r: &BigRational| elem_from_cos(r.numer().to_i64().unwrap(), r.denom().to_u64().unwrap(), &ctx);
        Ok(Triple::new(e(&self.r[0])?, e(&self.r[1])?, e(&self.r[2])?))
    }
}

/// One step of the angle recursion: `cos π r′_k = cos π r_k + 2 cos π r_i cos π r_j`,
/// returning `(1 − r_i, r_j, r′_k)` placed at positions `(i, j, k)`.
/// Indices are 0-based.
pub fn braid_angle_step(a: &AngleTriple, which: (usize, usize, usize), max_den: u64) -> Result<AngleTriple, ClassifyError> {
    let (i, j, k) = which;
    assert!(i != j && j != k && i != k && i < 3 && j < 3 && k < 3, "which must be a permutation");
    let t = a.to_triple()?;
    // With x = −2cos πr the step reads x′_k = x_k − x_i x_j.
    let xk = &t.x[k] - &(&t.x[i] * &t.x[j]);
    let v = xk.to_f64();
    if v.abs() > 2.0 + 1e-9 {
        return Err(ClassifyError::OutOfRange);
    }
    let rk = angle_of(&xk, max_den).ok_or(if v.abs() > 2.0 { ClassifyError::OutOfRange } else { ClassifyError::Irrational })?;
    let mut r = a.r.clone();
    r[i] = BigRational::one() - &a.r[i];
    r[k] = rk;
    Ok(AngleTriple { r })
}

/// Four angles with `Σ cos 2πφ_i = 0`, normalised to `[0, 1/2]` and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosQuadruple {
    pub phi: [BigRational; 4],
}

impl CosQuadruple {
    /// Normalises every entry by `φ ↦ min(φ mod 1, 1 − φ mod 1)` and sorts.
    pub fn new(phi: [BigRational; 4]) -> Self {
        let mut v: Vec<BigRational> = phi.iter().map(normalize_angle).collect();
        v.sort();
        CosQuadruple { phi: [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()] }
    }

    pub fn from_ints(v: [(i64, i64); 4]) -> Self {
        Self::new(v.map(|(p, q)| rat(p, q)))
    }

    /// Image under the global substitution `φ_i ↦ 1/2 − φ_i`.
    pub fn negated(&self) -> Self {
        let h = rat(1, 2);
        Self::new(self.phi.clone().map(|p| &h - p))
    }

    /// Exact test of the cosine equation.
    pub fn verify(&self, degree_cap: usize) -> Result<bool, ClassifyError> {
        // 2cos 2πφ = −elem_from_cos(2φ), so the equation is Σ elem_from_cos(2φ_i) = 0.
        let two: Vec<BigRational> = self.phi.iter().map(|p| p * BigRational::from_integer(2.into())).collect();
        let n = two.iter().fold(1u64, |acc, r| acc.lcm(&r.denom().to_u64().unwrap()));
        let degree = euler_phi(2 * n) as usize / 2;
        if degree > degree_cap {
            return Err(ClassifyError::ResourceLimit { n, degree, cap: degree_cap });
        }
        let ctx = field_new(n);
        let mut sum = FieldElement::zero(&ctx);
        for r in &two {
            sum = &sum + &elem_from_cos(r.numer().to_i64().unwrap(), r.denom().to_u64().unwrap(), &ctx)?;
        }
        Ok(sum.is_zero())
    }
}

impl fmt::Display for CosQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.phi.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

fn normalize_angle(p: &BigRational) -> BigRational {
    let one = BigRational::one();
    let f = p - p.floor();
    let g = &one - &f;
    if g < f {
        g
    } else {
        f
    }
}

fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut r = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

pub const DEFAULT_MAX_DEN: u64 = 42;
pub const DEFAULT_DEGREE_CAP: usize = 2000;

/// Exhaustive search of the four-cosine equation over rationals with
/// denominator at most `max_den`. Candidates come from a float prefilter
/// (sorted cosines, binary search for the fourth angle) and are then
/// verified exactly.
pub fn trig_quadruple_search(max_den: u64, degree_cap: usize) -> Result<Vec<CosQuadruple>, ClassifyError> {
    assert!(max_den >= 2, "max_den must be at least 2");
    let mut angles: Vec<(i64, i64)> = Vec::new();
    for q in 1..=max_den as i64 {
        for p in 0..=q / 2 {
            if p.gcd(&q) == 1 {
                angles.push((p, q));
            }
        }
    }
    angles.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    let val = |a: &(i64, i64)| (2.0 * std::f64::consts::PI * a.0 as f64 / a.1 as f64).cos();
    // cos 2πφ decreases on [0, 1/2], so sorting by angle sorts cosines descending.
    let cosv: Vec<f64> = angles.iter().map(val).collect();
    let m = angles.len();
    let candidates: Vec<[usize; 4]> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            for j in i..m {
                for k in j..m {
                    let target = -(cosv[i] + cosv[j] + cosv[k]);
                    if target > 1.0 + 1e-9 || target < -1.0 - 1e-9 {
                        continue;
                    }
                    // first index l with cosv[l] <= target + tol
                    let lo = cosv.partition_point(|c| *c > target + 1e-9);
                    let mut l = lo.max(k);
                    while l < m && cosv[l] >= target - 1e-9 {
                        if l >= k {
                            out.push([i, j, k, l]);
                        }
                        l += 1;
                    }
                }
            }
            out.into_iter()
        })
        .collect();
    let verified: Result<Vec<Option<CosQuadruple>>, ClassifyError> = candidates
        .par_iter()
        .map(|idx| {
            let q = CosQuadruple::from_ints(idx.map(|i| angles[i]));
            Ok(if q.verify(degree_cap)? { Some(q) } else { None })
        })
        .collect();
    let mut set: Vec<CosQuadruple> = verified?.into_iter().flatten().collect::<HashSet<_>>().into_iter().collect();
    set.sort();
    Ok(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D1,
    D2,
    D3,
    E1,
    E2,
    E3,
    F,
    None,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D1 => "d1",
            Family::D2 => "d2",
            Family::D3 => "d3",
            Family::E1 => "e1",
            Family::E2 => "e2",
            Family::E3 => "e3",
            Family::F => "f",
            Family::None => "none",
        }
    }

    pub fn is_sporadic(self) -> bool {
        matches!(self, Family::A | Family::B | Family::C | Family::None)
    }
}

/// Result of the family matcher. `negated` is set when the match only holds
/// after the global substitution `φ_i ↦ 1/2 − φ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub family: Family,
    pub negated: bool,
}

pub fn sporadic_a() -> CosQuadruple {
    CosQuadruple::from_ints([(1, 30), (11, 30), (2, 5), (1, 6)])
}

pub fn sporadic_b() -> CosQuadruple {
    CosQuadruple::from_ints([(7, 30), (17, 30), (1, 5), (1, 6)])
}

pub fn sporadic_c() -> CosQuadruple {
    CosQuadruple::from_ints([(1, 7), (2, 7), (3, 7), (1, 6)])
}

fn sorted3(mut v: Vec<BigRational>) -> Vec<BigRational> {
    v.sort();
    v
}

fn without(q: &CosQuadruple, x: &BigRational) -> Option<Vec<BigRational>> {
    let pos = q.phi.iter().position(|p| p == x)?;
    let mut v = q.phi.to_vec();
    v.remove(pos);
    Some(v)
}

fn pair_cancels(a: &BigRational, b: &BigRational) -> bool {
    a + b == rat(1, 2)
}

fn literal_family(q: &CosQuadruple) -> Family {
    let quarter = rat(1, 4);
    let half = rat(1, 2);
    let zero = BigRational::zero();
    if let Some(rest) = without(q, &quarter) {
        if sorted3(rest.clone()) == sorted3(vec![rat(1, 3), rat(1, 10), rat(3, 10)]) {
            return Family::D1;
        }
        // d2: {ψ, ψ + 1/3, ψ + 2/3} for some ψ
        for base in &rest {
            for psi in [base.clone(), -base.clone()] {
                let trip = sorted3((0..3).map(|k| normalize_angle(&(&psi + rat(k, 3)))).collect());
                if trip == sorted3(rest.clone()) {
                    return Family::D2;
                }
            }
        }
        for (a, b, c) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
            if rest[a] == quarter && pair_cancels(&rest[b], &rest[c]) {
                return Family::D3;
            }
        }
    }
    if let Some(rest) = without(q, &zero) {
        if sorted3(rest.clone()) == sorted3(vec![rat(1, 3), rat(1, 4), rat(1, 3)]) {
            return Family::E1;
        }
        if let Some(r2) = rest.iter().position(|p| *p == half) {
            let mut v = rest.clone();
            v.remove(r2);
            if pair_cancels(&v[0], &v[1]) {
                return Family::E2;
            }
        }
        if sorted3(rest) == sorted3(vec![rat(1, 3), rat(1, 5), rat(2, 5)]) {
            return Family::E3;
        }
    }
    let p = &q.phi;
    for (a, b, c, d) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        if pair_cancels(&p[a], &p[b]) && pair_cancels(&p[c], &p[d]) {
            return Family::F;
        }
    }
    if *q == sporadic_a() {
        Family::A
    } else if *q == sporadic_b() {
        Family::B
    } else if *q == sporadic_c() {
        Family::C
    } else {
        Family::None
    }
}

/// First matching family under permutations and `φ ↦ 1 − φ`; when that
/// fails, the same test after the global substitution `φ_i ↦ 1/2 − φ_i`.
pub fn match_quadruple_family(q: &CosQuadruple) -> Result<FamilyMatch, ClassifyError> {
    if !q.verify(DEFAULT_DEGREE_CAP)? {
        return Err(ClassifyError::NotASolution);
    }
    let f = literal_family(q);
    if f != Family::None {
        return Ok(FamilyMatch { family: f, negated: false });
    }
    let g = literal_family(&q.negated());
    Ok(FamilyMatch { family: g, negated: g != Family::None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitTag {
    Tetrahedron,
    Cube,
    Icosahedron,
    GreatIcosahedron,
    GreatDodecahedron,
    Infinite,
    Resonant,
    /// Finite orbit not among the five (does not arise for admissible triples
    /// with real coordinates of modulus below 2; kept so the result is total).
    UnlistedFinite,
}

impl OrbitTag {
    pub const FINITE: [OrbitTag; 5] =
        [OrbitTag::Tetrahedron, OrbitTag::Cube, OrbitTag::Icosahedron, OrbitTag::GreatIcosahedron, OrbitTag::GreatDodecahedron];

    pub fn name(self) -> &'static str {
        match self {
            OrbitTag::Tetrahedron => "Tetrahedron",
            OrbitTag::Cube => "Cube",
            OrbitTag::Icosahedron => "Icosahedron",
            OrbitTag::GreatIcosahedron => "GreatIcosahedron",
            OrbitTag::GreatDodecahedron => "GreatDodecahedron",
            OrbitTag::Infinite => "Infinite",
            OrbitTag::Resonant => "Resonant",
            OrbitTag::UnlistedFinite => "UnlistedFinite",
        }
    }

    /// μ of the corresponding algebraic solution, as used in the equation.
    pub fn solution_mu(self) -> Option<BigRational> {
        Some(match self {
            OrbitTag::Tetrahedron => rat(-1, 4),
            OrbitTag::Cube => rat(-1, 3),
            OrbitTag::Icosahedron => rat(-2, 5),
            OrbitTag::GreatIcosahedron => rat(-1, 5),
            OrbitTag::GreatDodecahedron => rat(-1, 3),
            _ => return None,
        })
    }

    pub fn coxeter(self) -> Option<&'static str> {
        Some(match self {
            OrbitTag::Tetrahedron => "A3",
            OrbitTag::Cube => "B3",
            OrbitTag::Icosahedron | OrbitTag::GreatIcosahedron | OrbitTag::GreatDodecahedron => "H3",
            _ => return None,
        })
    }
}

impl fmt::Display for OrbitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The stored seed of each finite orbit, `(0, −1, −1)` and so on.
pub fn seed_triple(tag: OrbitTag) -> Triple<FieldElement> {
    let (n, coords): (u64, [(i64, u64); 3]) = match tag {
        OrbitTag::Tetrahedron => (6, [(1, 2), (1, 3), (1, 3)]),
        OrbitTag::Cube => (12, [(1, 2), (1, 3), (1, 4)]),
        OrbitTag::Icosahedron => (30, [(1, 2), (1, 3), (1, 5)]),
        OrbitTag::GreatIcosahedron => (30, [(1, 2), (1, 3), (2, 5)]),
        OrbitTag::GreatDodecahedron => (10, [(1, 2), (1, 5), (2, 5)]),
        other => panic!("no seed for {other}"),
    };
    let ctx = field_new(n);
    let e = |(p, q): (i64, u64)| elem_from_cos(p, q, &ctx).expect("seed angle fits its field");
    Triple::new(e(coords[0]), e(coords[1]), e(coords[2]))
}

/// Seeds written in the smallest field that holds their coordinates.
pub fn seed_triple_minimal(tag: OrbitTag) -> Triple<FieldElement> {
    let t = seed_triple(tag);
    let n = match tag {
        OrbitTag::Tetrahedron => 1,
        OrbitTag::Cube => 4,
        _ => 5,
    };
    let ctx = field_new(n);
    let f = |e: &FieldElement| {
        let v = e.to_f64();
        // the seed coordinates are 0, −1, −√2, −2cos(π/5), −2cos(2π/5)
        for (p, q) in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 5)] {
            if let Ok(c) = elem_from_cos(p, q, &ctx) {
                if (c.to_f64() - v).abs() < 1e-12 {
                    return c;
                }
            }
            if q == 3 && (v + 1.0).abs() < 1e-12 {
                return FieldElement::from_int(&ctx, -1);
            }
            if q == 2 && v.abs() < 1e-12 {
                return FieldElement::zero(&ctx);
            }
        }
        unreachable!("seed coordinate {v}")
    };
    Triple::new(f(&t.x[0]), f(&t.x[1]), f(&t.x[2]))
}

/// Full-B3 orbits of the five seeds, computed once.
pub fn stored_orbits() -> &'static Vec<(OrbitTag, Orbit)> {
    static ORBITS: OnceLock<Vec<(OrbitTag, Orbit)>> = OnceLock::new();
    ORBITS.get_or_init(|| {
        OrbitTag::FINITE
            .iter()
            .map(|&tag| {
                let o = orbit_enumerate(&seed_triple_minimal(tag), GroupKind::FullB3, 1000).expect("finite seed orbit");
                (tag, o)
            })
            .collect()
    })
}

/// Lift a triple to another context.
pub fn lift_triple(t: &Triple<FieldElement>, ctx: &Ctx) -> Result<Triple<FieldElement>, ExactError> {
    Ok(Triple::new(t.x[0].lift(ctx)?, t.x[1].lift(ctx)?, t.x[2].lift(ctx)?))
}

/// Whether two classes in possibly different fields coincide.
pub fn same_class(a: &TripleClass<FieldElement>, b: &TripleClass<FieldElement>) -> bool {
    let ctx = compound_context(a.representative.x[0].context(), b.representative.x[0].context());
    match (lift_triple(&a.representative, &ctx), lift_triple(&b.representative, &ctx)) {
        (Ok(x), Ok(y)) => x.class() == y.class(),
        _ => false,
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub tag: OrbitTag,
    pub orbit: Option<Orbit>,
    pub partial: Option<usize>,
}

/// Orbit identification: Resonant if `Q ∈ {0, 4}`, otherwise breadth-first
/// closure and comparison with the five stored orbits.
pub fn classify_triple(t: &Triple<FieldElement>, budget: usize) -> Result<Classification, TripleError> {
    let q = quadratic_invariant(t);
    if q.is_zero() || q == FieldElement::from_int(q.context(), 4) {
        return Ok(Classification { tag: OrbitTag::Resonant, orbit: None, partial: None });
    }
    let o = match orbit_enumerate(t, GroupKind::FullB3, budget) {
        Ok(o) => o,
        Err(TripleError::BudgetExceeded { partial }) => {
            return Ok(Classification { tag: OrbitTag::Infinite, orbit: None, partial: Some(partial) })
        }
        Err(e) => return Err(e),
    };
    let first = &o.classes[0];
    for (tag, stored) in stored_orbits() {
        if stored.len() == o.len() && stored.classes.iter().any(|c| same_class(c, first)) {
            return Ok(Classification { tag: *tag, orbit: Some(o), partial: None });
        }
    }
    Ok(Classification { tag: OrbitTag::UnlistedFinite, orbit: Some(o), partial: None })
}

/// Sizes of the pure-braid orbits into which a full orbit splits.
pub fn pure_braid_split(o: &Orbit) -> Vec<usize> {
    let mut left: Vec<TripleClass<FieldElement>> = o.classes.clone();
    let mut sizes = Vec::new();
    while let Some(c) = left.first().cloned() {
        let p = orbit_enumerate(&c.representative, GroupKind::PureP3, 1000).expect("finite");
        let set: HashSet<_> = p.classes.into_iter().collect();
        sizes.push(set.len());
        left.retain(|x| !set.contains(x));
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::{mu_from_exact_triple, symmetry_apply, Symmetry};

    #[test]
    fn orbit_sizes() {
        let sizes: Vec<usize> = stored_orbits().iter().map(|(_, o)| o.len()).collect();
        assert_eq!(sizes, vec![4, 9, 10, 10, 18]);
    }

    #[test]
    fn pure_braid_splitting() {
        let split: Vec<Vec<usize>> = stored_orbits().iter().map(|(_, o)| pure_braid_split(o)).collect();
        assert_eq!(split, vec![vec![4], vec![3, 3, 3], vec![10], vec![10], vec![18]]);
    }

    #[test]
    fn stored_orbits_disjoint() {
        let all = stored_orbits();
        for (i, (_, a)) in all.iter().enumerate() {
            for (_, b) in &all[i + 1..] {
                assert!(!a.classes.iter().any(|x| b.classes.iter().any(|y| same_class(x, y))));
            }
        }
    }

    #[test]
    fn orbits_closed_under_symmetries() {
        for (_, o) in stored_orbits() {
            for kind in [Symmetry::I1, Symmetry::I2] {
                let img: HashSet<_> = o.classes.iter().map(|c| symmetry_apply(kind, &c.representative).class()).collect();
                let orig: HashSet<_> = o.classes.iter().cloned().collect();
                assert_eq!(img, orig);
            }
        }
    }

    #[test]
    fn seed_mu_values() {
        let want = [(1, 4), (1, 3), (2, 5), (1, 5), (1, 3)];
        for (tag, (p, q)) in OrbitTag::FINITE.iter().zip(want) {
            let m = mu_from_exact_triple(&seed_triple(*tag)).unwrap();
            assert_eq!(m.representative_rational.unwrap(), rat(p, q), "{tag}");
        }
    }

    #[test]
    fn classify_examples() {
        let c1 = field_new(1);
        let t = Triple::new(FieldElement::zero(&c1), FieldElement::one(&c1), FieldElement::one(&c1));
        assert_eq!(classify_triple(&t, 1000).unwrap().tag, OrbitTag::Tetrahedron);
        let c4 = field_new(4);
        let cube = Triple::new(FieldElement::from_int(&c4, -1), FieldElement::zero(&c4), elem_from_cos(1, 4, &c4).unwrap());
        assert_eq!(classify_triple(&cube, 1000).unwrap().tag, OrbitTag::Cube);
        let h = FieldElement::from_rational(&c1, rat(1, 2));
        let t = Triple::new(h.clone(), h.clone(), h);
        assert_eq!(classify_triple(&t, 2000).unwrap().tag, OrbitTag::Infinite);
        let z = FieldElement::zero(&c1);
        assert_eq!(classify_triple(&Triple::new(z.clone(), z.clone(), z), 10).unwrap().tag, OrbitTag::Resonant);
        for tag in OrbitTag::FINITE {
            assert_eq!(classify_triple(&seed_triple(tag), 1000).unwrap().tag, tag);
        }
    }

    #[test]
    fn angle_steps() {
        let a = AngleTriple::new(rat(1, 2), rat(1, 3), rat(1, 3));
        let b = braid_angle_step(&a, (0, 1, 2), 60).unwrap();
        assert_eq!(b, AngleTriple::new(rat(1, 2), rat(1, 3), rat(1, 3)));
        let a = AngleTriple::new(rat(1, 3), rat(1, 3), rat(1, 3));
        let b = braid_angle_step(&a, (0, 1, 2), 60).unwrap();
        assert_eq!(b.r[2], BigRational::zero());
        let a = AngleTriple::new(rat(1, 5), rat(1, 5), rat(1, 3));
        assert_eq!(braid_angle_step(&a, (0, 1, 2), 60), Err(ClassifyError::OutOfRange));
        let a = AngleTriple::new(rat(1, 4), rat(2, 5), rat(1, 3));
        assert_eq!(braid_angle_step(&a, (0, 1, 2), 60), Err(ClassifyError::Irrational));
    }

    #[test]
    fn family_examples() {
        assert_eq!(match_quadruple_family(&sporadic_a()).unwrap(), FamilyMatch { family: Family::A, negated: false });
        let e3 = CosQuadruple::from_ints([(1, 3), (1, 5), (2, 5), (0, 1)]);
        assert_eq!(match_quadruple_family(&e3).unwrap().family, Family::E3);
        let f = CosQuadruple::from_ints([(1, 7), (5, 14), (1, 11), (9, 22)]);
        assert_eq!(match_quadruple_family(&f).unwrap().family, Family::F);
        let d3 = CosQuadruple::from_ints([(1, 4), (1, 8), (3, 8), (1, 4)]);
        assert_eq!(match_quadruple_family(&d3).unwrap().family, Family::D3);
        let bad = CosQuadruple::from_ints([(1, 5), (1, 5), (1, 5), (1, 5)]);
        assert_eq!(match_quadruple_family(&bad), Err(ClassifyError::NotASolution));
        let neg = sporadic_c().negated();
        assert_eq!(match_quadruple_family(&neg).unwrap(), FamilyMatch { family: Family::C, negated: true });
    }

    #[test]
    fn small_search() {
        let found = trig_quadruple_search(12, DEFAULT_DEGREE_CAP).unwrap();
        assert!(found.contains(&CosQuadruple::from_ints([(1, 4), (1, 8), (3, 8), (1, 4)])));
        for q in &found {
            assert!(q.verify(DEFAULT_DEGREE_CAP).unwrap());
            let m = match_quadruple_family(q).unwrap();
            assert_ne!(m.family, Family::None, "{q}");
        }
        assert!(found.contains(&sporadic_c()));
    }
}
