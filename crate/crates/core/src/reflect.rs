//! Rank-3 reflection groups attached to a triple.

use crate::algebra::Ring;
use crate::exactnum::FieldElement;
use crate::triples::{quadratic_invariant, BraidWord, Gen, Triple};
use std::cmp::Ordering;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReflectError {
    #[error("group closure exceeded {cap} elements")]
    CapExceeded { cap: usize },
}

pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

/// 3×3 matrix over a ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat3<T> {
    pub a: [[T; 3]; 3],
}

impl<T: Ring> Mat3<T> {
    pub fn identity_like(x: &T) -> Self {
        let z = x.zero_like();
        let o = x.one_like();
        let mut a = [[z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z]];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = o.clone();
        }
        Mat3 { a }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| {
            (0..3).map(|k| self.a[i][k].clone() * o.a[k][j].clone()).reduce(|x, y| x + y).unwrap()
        };
        Mat3 { a: [[e(0, 0), e(0, 1), e(0, 2)], [e(1, 0), e(1, 1), e(1, 2)], [e(2, 0), e(2, 1), e(2, 2)]] }
    }

    pub fn transpose(&self) -> Self {
        let a = &self.a;
        Mat3 {
            a: [
                [a[0][0].clone(), a[1][0].clone(), a[2][0].clone()],
                [a[0][1].clone(), a[1][1].clone(), a[2][1].clone()],
                [a[0][2].clone(), a[1][2].clone(), a[2][2].clone()],
            ],
        }
    }

    pub fn apply(&self, v: &[T; 3]) -> [T; 3] {
        let e = |i: usize| (0..3).map(|k| self.a[i][k].clone() * v[k].clone()).reduce(|x, y| x + y).unwrap();
        [e(0), e(1), e(2)]
    }

    pub fn det(&self) -> T {
        let a = &self.a;
        a[0][0].clone() * (a[1][1].clone() * a[2][2].clone() - a[1][2].clone() * a[2][1].clone())
            - a[0][1].clone() * (a[1][0].clone() * a[2][2].clone() - a[1][2].clone() * a[2][0].clone())
            + a[0][2].clone() * (a[1][0].clone() * a[2][1].clone() - a[1][1].clone() * a[2][0].clone())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity_like(&self.a[0][0])
    }

    pub fn to_f64_with(&self, f: impl Fn(&T) -> f64) -> [[f64; 3]; 3] {
        self.a.clone().map(|r| r.map(|x| f(&x)))
    }
}

/// Gram matrix of the triple, `(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub g: Mat3<FieldElement>,
    pub det: FieldElement,
}

impl GramMatrix {
    pub fn is_degenerate(&self) -> bool {
        self.det.is_zero()
    }
}

pub fn gram(t: &Triple<FieldElement>) -> GramMatrix {
    let [x1, x2, x3] = t.x.clone();
    let two = x1.int_like(2);
    let g = Mat3 { a: [[two.clone(), x1.clone(), x3.clone()], [x1, two.clone(), x2.clone()], [x3, x2, two]] };
    let det = g.det();
    GramMatrix { g, det }
}

fn bilinear(g: &Mat3<FieldElement>, u: &[FieldElement; 3], v: &[FieldElement; 3]) -> FieldElement {
    let gv = g.apply(v);
    (0..3).map(|k| u[k].clone() * gv[k].clone()).reduce(|x, y| x + y).unwrap()
}

/// Reflections in three roots, written in the basis `(e1, e2, e3)` of the
/// original triple. The roots start as the basis vectors and move under the
/// braid action.
#[derive(Clone, Debug)]
pub struct ReflectionSystem {
    pub base: GramMatrix,
    pub roots: [[FieldElement; 3]; 3],
    pub r: [Mat3<FieldElement>; 3],
}

fn reflection_matrix(g: &Mat3<FieldElement>, v: &[FieldElement; 3]) -> Mat3<FieldElement> {
    // R(x) = x − (v, x) v
    let gv = g.apply(v);
    let mut m = Mat3::identity_like(&v[0]);
    for i in 0..3 {
        for j in 0..3 {
            m.a[i][j] = m.a[i][j].clone() - v[i].clone() * gv[j].clone();
        }
    }
    m
}

impl ReflectionSystem {
    fn from_roots(base: GramMatrix, roots: [[FieldElement; 3]; 3]) -> Self {
        let r = [0, 1, 2].map(|i| reflection_matrix(&base.g, &roots[i]));
        ReflectionSystem { base, roots, r }
    }

    /// Gram matrix of the current roots.
    pub fn gram(&self) -> Mat3<FieldElement> {
        let e = |i: usize, j: usize| bilinear(&self.base.g, &self.roots[i], &self.roots[j]);
        Mat3 { a: [[e(0, 0), e(0, 1), e(0, 2)], [e(1, 0), e(1, 1), e(1, 2)], [e(2, 0), e(2, 1), e(2, 2)]] }
    }
}

pub fn reflections(t: &Triple<FieldElement>) -> ReflectionSystem {
    let base = gram(t);
    let z = t.x[0].zero_like();
    let o = t.x[0].one_like();
    let roots = [
        [o.clone(), z.clone(), z.clone()],
        [z.clone(), o.clone(), z.clone()],
        [z.clone(), z, o],
    ];
    ReflectionSystem::from_roots(base, roots)
}

fn reflect_vec(r: &Mat3<FieldElement>, v: &[FieldElement; 3]) -> [FieldElement; 3] {
    r.apply(v)
}

fn gen_on_roots(g: Gen, rs: &ReflectionSystem) -> ReflectionSystem {
    let [e1, e2, e3] = rs.roots.clone();
    let [r1, r2, r3] = &rs.r;
    let roots = match g {
        // R_{β1}: (R1, R2, R3) ↦ (R2, R2R1R2, R3)
        Gen::B1 => [e2.clone(), reflect_vec(r2, &e1), e3],
        Gen::B2 => [e1, e3.clone(), reflect_vec(r3, &e2)],
        Gen::B1Inv => [reflect_vec(r1, &e2), e1, e3],
        Gen::B2Inv => [e1, reflect_vec(r2, &e3), e2],
    };
    ReflectionSystem::from_roots(rs.base.clone(), roots)
}

pub fn braid_on_generators(w: &BraidWord, rs: &ReflectionSystem) -> ReflectionSystem {
    w.letters.iter().rev().fold(rs.clone(), |acc, g| gen_on_roots(*g, &acc))
}

/// Breadth-first closure of the group generated by the three reflections.
pub fn group_elements(rs: &ReflectionSystem, cap: usize) -> Result<HashSet<Mat3<FieldElement>>, ReflectError> {
    let id = Mat3::identity_like(&rs.r[0].a[0][0]);
    let mut seen = HashSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for r in &rs.r {
                let p = m.mul(r);
                if !seen.contains(&p) {
                    if seen.len() >= cap {
                        return Err(ReflectError::CapExceeded { cap });
                    }
                    seen.insert(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

pub fn group_closure(rs: &ReflectionSystem, cap: usize) -> Result<usize, ReflectError> {
    group_elements(rs, cap).map(|s| s.len())
}

/// Order of `R_i R_j`, if at most `max`.
pub fn pair_order(rs: &ReflectionSystem, i: usize, j: usize, max: usize) -> Option<usize> {
    let p = rs.r[i].mul(&rs.r[j]);
    let mut acc = p.clone();
    for k in 1..=max {
        if acc.is_identity() {
            return Some(k);
        }
        acc = acc.mul(&p);
    }
    None
}

/// Orders `n_12, n_23, n_13` of the pairwise products.
pub fn coxeter_relations(rs: &ReflectionSystem) -> [Option<usize>; 3] {
    [pair_order(rs, 0, 1, 60), pair_order(rs, 1, 2, 60), pair_order(rs, 0, 2, 60)]
}

pub fn coxeter_type(order: usize) -> Option<&'static str> {
    match order {
        24 => Some("A3"),
        48 => Some("B3"),
        120 => Some("H3"),
        _ => None,
    }
}

/// Sylvester's criterion on the leading minors `2`, `4 − x1²`, `det`.
pub fn is_positive_definite(g: &GramMatrix) -> bool {
    let x1 = &g.g.a[0][1];
    let m2 = x1.int_like(4) - x1.square();
    let z = x1.zero_like();
    m2.cmp_real(&z) == Ordering::Greater && g.det.cmp_real(&z) == Ordering::Greater
}

/// Float variant for real triples.
pub fn is_positive_definite_f64(t: &Triple<f64>) -> bool {
    let [x1, _, _] = t.x;
    let q = quadratic_invariant(t);
    4.0 - x1 * x1 > 0.0 && 8.0 - 2.0 * q > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{seed_triple, OrbitTag};
    use crate::exactnum::{elem_from_cos, field_new};
    use crate::triples::braid_apply;

    fn cube() -> Triple<FieldElement> {
        let c4 = field_new(4);
        Triple::new(FieldElement::from_int(&c4, -1), FieldElement::zero(&c4), elem_from_cos(1, 4, &c4).unwrap())
    }

    #[test]
    fn gram_determinants() {
        let c1 = field_new(1);
        let t = Triple::new(FieldElement::zero(&c1), FieldElement::one(&c1), FieldElement::one(&c1));
        assert_eq!(gram(&t).det, FieldElement::from_int(&c1, 4));
        assert_eq!(gram(&cube()).det, FieldElement::from_int(&field_new(4), 2));
        let t = Triple::new(FieldElement::from_int(&c1, 2), FieldElement::zero(&c1), FieldElement::zero(&c1));
        assert!(gram(&t).is_degenerate());
        let q = quadratic_invariant(&cube());
        assert_eq!(gram(&cube()).det, FieldElement::from_int(q.context(), 8) - q.int_like(2) * q);
    }

    #[test]
    fn reflection_shape() {
        let t = cube();
        let rs = reflections(&t);
        let r1 = &rs.r[0].a;
        assert_eq!(r1[0][0], FieldElement::from_int(t.x[0].context(), -1));
        assert_eq!(r1[0][1], -t.x[0].clone());
        assert_eq!(r1[0][2], -t.x[2].clone());
        for r in &rs.r {
            assert!(r.mul(r).is_identity());
            assert_eq!(r.transpose().mul(&rs.base.g).mul(r), rs.base.g);
        }
    }

    #[test]
    fn braided_gram_matches_braided_triple() {
        let t = cube();
        let rs = reflections(&t);
        for w in ["b1", "b2", "b1^-1", "b2^-1", "b2^-1 b1 b2", "b1 b1 b2 b1^-1"] {
            let w: BraidWord = w.parse().unwrap();
            let img = braid_on_generators(&w, &rs);
            assert_eq!(img.gram(), gram(&braid_apply(&w, &t)).g, "{w}");
        }
        let w: BraidWord = "b1 b1^-1".parse().unwrap();
        assert_eq!(braid_on_generators(&w, &rs).roots, rs.roots);
    }

    #[test]
    fn closure_orders() {
        let want = [24, 48, 120, 120, 120];
        for (tag, n) in OrbitTag::FINITE.iter().zip(want) {
            let rs = reflections(&seed_triple(*tag));
            let els = group_elements(&rs, DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(els.len(), n, "{tag}");
            let w: BraidWord = "b2^-1 b1".parse().unwrap();
            let moved = group_elements(&braid_on_generators(&w, &rs), DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(moved, els);
        }
        let c1 = field_new(1);
        let t = Triple::new(FieldElement::one(&c1), FieldElement::one(&c1), FieldElement::one(&c1));
        assert_eq!(group_closure(&reflections(&t), 1000).unwrap(), 24);
        let h = FieldElement::from_int(&c1, 3);
        let t = Triple::new(h.clone(), h.clone(), h);
        assert_eq!(group_closure(&reflections(&t), 500), Err(ReflectError::CapExceeded { cap: 500 }));
    }

    #[test]
    fn relations_and_definiteness() {
        let c1 = field_new(1);
        let t = Triple::new(FieldElement::zero(&c1), FieldElement::one(&c1), FieldElement::one(&c1));
        let rs = reflections(&t);
        assert_eq!(coxeter_relations(&rs), [Some(2), Some(3), Some(3)]);
        assert!(is_positive_definite(&gram(&t)));
        assert!(is_positive_definite(&gram(&cube())));
        assert!(!is_positive_definite_f64(&Triple::new(2.5, 0.0, 0.0)));
    }
}
