//! Acceptance suite: one line per criterion, then a single verdict.

use num_rational::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use pvi_core::algebra::rat_to_f64;
use pvi_core::classify::{
    match_quadruple_family, pure_braid_split, seed_triple, sporadic_a, sporadic_b, sporadic_c, stored_orbits,
    trig_quadruple_search, OrbitTag, DEFAULT_DEGREE_CAP,
};
use pvi_core::connection::{coefficient_at, gamma, triple_from_asymptotics, Convention, CriticalPoint};
use pvi_core::exactnum::{elem_from_cos, field_new, FieldElement};
use pvi_core::monodromy::{canonical_matrices, exact_to_complex, m_infinity_check, trace_identities_hold};
use pvi_core::reflect::{braid_on_generators, coxeter_type, group_elements, reflections, DEFAULT_CLOSURE_CAP};
use pvi_core::solutions::{
    branches_at, continuation_check, exponent_multiset, h3pp_branch, h3pp_predictions, orbit_predictions,
    predicted_exponents, solution, verify, SolutionId,
};
use pvi_core::triples::{
    apply_gen, braid_apply, mu_from_exact_triple, orbit_enumerate, quadratic_invariant, symmetry_apply, BraidWord,
    Gen, GroupKind, Symmetry, Triple,
};
use std::collections::BTreeMap;
use std::time::Instant;

struct Line {
    n: usize,
    pass: bool,
    text: String,
}

fn line(n: usize, pass: bool, text: impl Into<String>) -> Line {
    Line { n, pass, text: text.into() }
}

fn c1_orbit_sizes() -> Line {
    let mut sizes = Vec::new();
    let mut slowest: f64 = 0.0;
    for tag in OrbitTag::FINITE {
        let t = Instant::now();
        let o = orbit_enumerate(&seed_triple(tag), GroupKind::FullB3, 10_000).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        sizes.push(o.len());
    }
    line(1, sizes == [4, 9, 10, 10, 18] && slowest < 1.0, format!("orbit sizes {sizes:?}, slowest {slowest:.3}s"))
}

fn c2_pure_split() -> Line {
    let split: Vec<Vec<usize>> = stored_orbits().iter().map(|(_, o)| pure_braid_split(o)).collect();
    let want = vec![vec![4], vec![3, 3, 3], vec![10], vec![10], vec![18]];
    line(2, split == want, format!("P3 split {split:?}"))
}

fn c3_mu_classes() -> Line {
    let mut ok = true;
    let mut reps = Vec::new();
    for tag in OrbitTag::FINITE {
        let seed = seed_triple(tag);
        let m = mu_from_exact_triple(&seed).unwrap();
        let mu = tag.solution_mu().unwrap();
        let (p, q) = (mu.numer().clone(), mu.denom().clone());
        let (p, q): (i64, u64) = (p.try_into().unwrap(), q.try_into().unwrap());
        // Q − 2 = −2cos 2πμ, exactly, in a field holding both sides
        let n = num_integer::lcm(seed.x[0].context().n(), q);
        let ctx = field_new(n);
        let lhs = (quadratic_invariant(&seed) - FieldElement::from_int(seed.x[0].context(), 2)).lift(&ctx).unwrap();
        let rhs = elem_from_cos(2 * p, q, &ctx).unwrap();
        let s2 = (std::f64::consts::PI * rat_to_f64(&mu)).sin().powi(2);
        ok &= lhs == rhs && (m.sin_sq_pi_mu.to_f64() - s2).abs() < 1e-12;
        let r = m.representative_rational.unwrap();
        // representative is ±μ + k
        let plus = &r - &mu;
        let minus = &r + &mu;
        ok &= plus.is_integer() || minus.is_integer();
        reps.push(r.to_string());
    }
    line(3, ok, format!("μ representatives {reps:?} against −1/4, −1/3, −2/5, −1/5, −1/3"))
}

fn c4_groups() -> Line {
    let t = Instant::now();
    let mut orders = Vec::new();
    let mut tags = Vec::new();
    let mut stable = true;
    let words: Vec<BraidWord> = ["b1", "b2^-1", "b1 b2 b1", "b2 b2 b1^-1"].iter().map(|w| w.parse().unwrap()).collect();
    for tag in OrbitTag::FINITE {
        let rs = reflections(&seed_triple(tag));
        let g = group_elements(&rs, DEFAULT_CLOSURE_CAP).unwrap();
        for w in &words {
            stable &= group_elements(&braid_on_generators(w, &rs), DEFAULT_CLOSURE_CAP).unwrap() == g;
        }
        orders.push(g.len());
        tags.push(coxeter_type(g.len()).unwrap_or("?"));
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = orders == [24, 48, 120, 120, 120] && tags == ["A3", "B3", "H3", "H3", "H3"] && stable && secs < 10.0;
    line(4, ok, format!("orders {orders:?} {tags:?}, braid-stable {stable}, {secs:.2}s"))
}

fn c5_gordan() -> Vec<Line> {
    let t = Instant::now();
    let found = trig_quadruple_search(42, DEFAULT_DEGREE_CAP).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut literal = Vec::new();
    let mut up_to_negation = Vec::new();
    for q in &found {
        let m = match_quadruple_family(q).unwrap();
        if m.negated || m.family.is_sporadic() {
            literal.push(q.clone());
        }
        if m.family.is_sporadic() && !m.negated {
            up_to_negation.push(q.clone());
        }
    }
    let want = [sporadic_a(), sporadic_b(), sporadic_c()];
    let same = |v: &[_]| v.len() == 3 && want.iter().all(|w| v.contains(w));
    let names = |v: &[pvi_core::classify::CosQuadruple]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
    vec![
        line(
            5,
            same(&literal) && secs < 600.0,
            format!("{} solutions; outside (d)/(e)/(f) as listed: {} [{}], {secs:.1}s", found.len(), literal.len(), names(&literal)),
        ),
        line(0, same(&up_to_negation), format!("info: outside the families up to φ ↦ 1/2 − φ: [{}]", names(&up_to_negation))),
    ]
}

fn c6_residuals() -> Vec<Line> {
    let mut out = Vec::new();
    let mut ok = true;
    for id in SolutionId::ALL {
        let sol = solution(id);
        let r = verify(&sol, 100, &sol.mu);
        // pass, or flagged with the failing samples listed
        ok &= r.samples == 100 && (r.passed || (r.status == "ERRATUM" && !r.failing.is_empty()));
        out.push(line(
            0,
            r.passed,
            format!("info: {} μ={} {} max relative residual {:.3e} exact zero {}", r.solution, r.mu, r.status, r.max_relative, r.all_exact_zero),
        ));
    }
    out.insert(0, line(6, ok, "residuals: every formula passes or is flagged ERRATUM with failing samples"));
    out
}

fn c7_connection() -> Line {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (tag, o) in stored_orbits() {
        let mu = rat_to_f64(&tag.solution_mu().unwrap());
        let q_want = 4.0 * (std::f64::consts::PI * mu).sin().powi(2);
        for cl in &o.classes {
            let t = cl.representative.to_float();
            let d = coefficient_at(CriticalPoint::Zero, &t, mu).unwrap();
            let back = triple_from_asymptotics(d.a, d.sigma, mu).unwrap();
            let q_err = (quadratic_invariant(&back.representative) - q_want).abs();
            worst = worst.max(q_err);
            ok &= back.representative.same_class_approx(&t, 1e-8) && q_err <= 1e-8;
            count += 1;
        }
    }
    line(7, ok && count == 51, format!("{count} classes round-tripped, worst |Q − 4sin²πμ| {worst:.1e}"))
}

fn c8_branches() -> Line {
    let mut ok = true;
    let mut text = Vec::new();
    for id in [SolutionId::A3Amended, SolutionId::H3p] {
        let sol = solution(id);
        if !verify(&sol, 8, &sol.mu).passed {
            continue;
        }
        let fitted = exponent_multiset(&branches_at(&sol, CriticalPoint::Zero));
        let pred = predicted_exponents(&orbit_predictions(id, CriticalPoint::Zero));
        let diff = fitted.len() == pred.len()
            && fitted.iter().zip(&pred).all(|(a, b)| (rat_to_f64(a) - rat_to_f64(b)).abs() <= 1e-6);
        ok &= diff;
        let show: Vec<String> = fitted.iter().map(|r| r.to_string()).collect();
        text.push(format!("{id} {{{}}}", show.join(", ")));
    }
    line(8, ok && text.len() == 2, format!("exponents at 0 match the orbit: {}", text.join("; ")))
}

fn c9_continuation() -> Vec<Line> {
    let mut out = Vec::new();
    let mut ok = true;
    let arcs = pvi_core::solutions::real_arcs();
    for arc in &arcs {
        match continuation_check(arc, 1e-3, 1.0 - 1e-3, &Default::default()) {
            Ok(r) => {
                let pass = r.l1_error <= 1e-3 && r.a1_error <= 1e-2 && r.endpoint_error <= 1e-6 && r.seconds < 5.0;
                ok &= pass;
                out.push(line(
                    0,
                    pass,
                    format!(
                        "info: {} s {:.4} → {:.4}: l1 {:.6} (err {:.1e}), |a1| {:.6} (err {:.1e}), endpoint err {:.1e}, {:.3}s",
                        r.solution, r.s_zero, r.s_one, r.fitted_l1, r.l1_error, r.fitted_a1, r.a1_error, r.endpoint_error, r.seconds
                    ),
                ));
            }
            Err(e) => {
                ok = false;
                out.push(line(0, false, format!("info: {} failed: {e}", arc.id)));
            }
        }
    }
    out.insert(0, line(9, ok, format!("continuation on {} real branches", arcs.len())));
    out
}

fn c10_invariants() -> Line {
    let mut runner = TestRunner::deterministic();
    let ctx = field_new(60);
    let basis = |k: i64| elem_from_cos(k, 60, &ctx).unwrap();
    let coord = (-2i64..=2, 1i64..60, -2i64..=2, 1i64..60, 1i64..=3).prop_map(|(a, i, b, j, d)| {
        let r = FieldElement::from_rational(&ctx, BigRational::new(a.into(), d.into()));
        r + basis(i) * FieldElement::from_int(&ctx, b) + basis(j)
    });
    let strat = (coord.clone(), coord.clone(), coord).prop_map(|(a, b, c)| Triple::new(a, b, c));
    let b121: BraidWord = "b1 b2 b1".parse().unwrap();
    let b212: BraidWord = "b2 b1 b2".parse().unwrap();
    let twist: BraidWord = "b1 b2".parse::<BraidWord>().unwrap().pow(3);
    let mut q_ok = true;
    for _ in 0..1000 {
        let t = strat.new_tree(&mut runner).unwrap().current();
        let q = quadratic_invariant(&t);
        for g in [Gen::B1, Gen::B2] {
            q_ok &= quadratic_invariant(&apply_gen(g, &t)) == q;
        }
        for s in [Symmetry::I1, Symmetry::I2] {
            q_ok &= quadratic_invariant(&symmetry_apply(s, &t)) == q;
        }
        q_ok &= braid_apply(&b121, &t) == braid_apply(&b212, &t);
        q_ok &= braid_apply(&twist, &t).class() == t.class();
    }
    let mut m_ok = true;
    for (tag, o) in stored_orbits() {
        let mu = rat_to_f64(&tag.solution_mu().unwrap());
        for cl in &o.classes {
            let t = &cl.representative;
            m_ok &= trace_identities_hold(t).unwrap();
            let c = canonical_matrices(t, true).unwrap();
            m_ok &= m_infinity_check(&[0, 1, 2].map(|i| exact_to_complex(&c.m[i])), mu).ok;
        }
    }
    let mut g_ok = true;
    for k in 0..200 {
        let z = num_complex::Complex64::new(-5.3 + 0.057 * k as f64, -2.0 + 0.021 * k as f64);
        let (l, r) = (gamma(z + 1.0), z * gamma(z));
        g_ok &= (l - r).norm() <= 1e-12 * r.norm();
    }
    line(
        10,
        q_ok && m_ok && g_ok,
        format!("Q/braid/twist on 1000 exact triples {q_ok}, traces and M∞ on 51 classes {m_ok}, Γ recurrence {g_ok}"),
    )
}

fn c11_puiseux() -> Vec<Line> {
    let printed: Vec<_> = (1..=18).map(|k| h3pp_branch(k).unwrap()).collect();
    let group = |v: Vec<(String, f64)>| {
        let mut m: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (e, a) in v {
            m.entry(e).or_default().push(a);
        }
        for xs in m.values_mut() {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        m
    };
    let table = group(printed.iter().map(|b| (b.exponent.clone(), b.modulus)).collect());
    let compare = |conv: Convention| {
        let pred = group(h3pp_predictions(conv).into_iter().map(|p| (p.exponent, p.modulus)).collect());
        let same_exponents =
            pred.len() == table.len() && pred.iter().all(|(e, v)| table.get(e).map(|w| w.len()) == Some(v.len()));
        let worst = pred
            .iter()
            .filter_map(|(e, v)| table.get(e).map(|w| v.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
            .fold(0.0, f64::max);
        (same_exponents, worst)
    };
    let (exp_ok, worst) = compare(Convention::Corrected);
    let (_, worst_printed) = compare(Convention::Printed);
    let counts: Vec<String> = table.iter().map(|(e, v)| format!("{e}×{}", v.len())).collect();
    vec![
        line(
            11,
            exp_ok && worst <= 1e-6,
            format!("exponents {{{}}} match; worst modulus gap {worst:.1e}", counts.join(", ")),
        ),
        line(0, false, format!("info: with the leading coefficient as printed the worst modulus gap is {worst_printed:.3}")),
    ]
}

#[test]
fn acceptance_criteria() {
    let mut lines = vec![c1_orbit_sizes(), c2_pure_split(), c3_mu_classes(), c4_groups()];
    lines.extend(c5_gordan());
    lines.extend(c6_residuals());
    lines.push(c7_connection());
    lines.push(c8_branches());
    lines.extend(c9_continuation());
    lines.push(c10_invariants());
    lines.extend(c11_puiseux());
    let mut failed = Vec::new();
    for l in &lines {
        if l.n == 0 {
            println!("      {}", l.text);
        } else {
            println!("[{:>2}] {} {}", l.n, if l.pass { "PASS" } else { "FAIL" }, l.text);
            if !l.pass {
                failed.push(l.n);
            }
        }
    }
    println!("criteria passed: {}/11", 11 - failed.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
