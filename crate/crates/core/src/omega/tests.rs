use super::*;
use crate::parser::parse_relation;
use crate::presburger::pa_decide;
use crate::real_qe::ra_decide;
use crate::separation::to_canonical;

fn rel(text: &str) -> Relation {
    parse_relation(text).unwrap()
}

fn verdict(text: &str) -> Verdict {
    has_omega_chain(&rel(text), &Options::default()).unwrap()
}

fn single(text: &str) -> SeparatedDisjunct {
    let mut ds = to_canonical(&rel(text)).unwrap();
    assert_eq!(ds.len(), 1, "{ds:?}");
    ds.pop().unwrap()
}

#[test]
fn known_verdicts() {
    assert!(verdict("(relation (ints y) (body (> y' y)))").has_chain());
    assert!(!verdict("(relation (ints y) (body (and (> y y') (> y' 0))))").has_chain());
    assert!(verdict("(relation (reals x) (body (> x x')))").has_chain());
    assert!(!verdict("(relation (ints y) (body (and (> y' y) (> 10 y))))").has_chain());
    assert!(verdict("(relation (ints y) (body (= y' y)))").has_chain());
    assert!(verdict("(relation (reals x) (body (= x' x)))").has_chain());
}

#[test]
fn non_transitive_reported() {
    match verdict("(relation (ints y) (body (= y' (+ y 1))))") {
        Verdict::NotTransitive(cx) => {
            let y = crate::formula::Var::int("y");
            let (a, c) = (cx.a.get(&y).unwrap().clone(), cx.c.get(&y).unwrap().clone());
            assert_eq!(c - a, crate::formula::rat(2));
        }
        v => panic!("unexpected {v:?}"),
    }
}

use crate::formula::LinTerm;
use crate::separation::Linear;

fn lin(p: LinTerm, q: LinTerm, c: i64) -> Linear {
    Linear { p, q, c: c.into() }
}

fn hand(frac: &[&str], ints: &[&str], eqs: Vec<Linear>, ineqs: Vec<Linear>, int_ineqs: Vec<Linear>) -> SeparatedDisjunct {
    SeparatedDisjunct {
        dense_eqs: eqs,
        dense_ineqs: ineqs,
        int_ineqs,
        int_mods: vec![],
        frac_vars: frac.iter().map(|n| Var::real(n)).collect(),
        int_vars: ints.iter().map(|n| Var::int(n)).collect(),
        splits: vec![],
        modulus: 1.into(),
        residues: Default::default(),
        source: 0,
    }
}

#[test]
fn enumeration_counts() {
    let x = Var::real("x");
    let d = hand(&["x"], &[], vec![lin(LinTerm::var(x.clone()), LinTerm::monomial(x.primed(), -1), 0)], vec![], vec![]);
    assert_eq!(enumerate_mode_vectors(&d).count(), 3);
    let y = Var::int("y");
    let d = hand(&[], &["y"], vec![], vec![], vec![lin(LinTerm::monomial(y.clone(), -1), LinTerm::var(y.primed()), 0)]);
    assert_eq!(enumerate_mode_vectors(&d).count(), 15);
    assert_eq!(mode_vector_count(&d), 15u32.into());
    // pruning ties the single-variable terms to y
    assert_eq!(enumerate_discrete(&d, true).count(), 2);
    let empty = hand(&[], &[], vec![], vec![], vec![]);
    assert_eq!(enumerate_mode_vectors(&empty).count(), 1);
}

#[test]
fn h_for_descent_case() {
    let x = Var::real("x");
    let descent = lin(LinTerm::var(x.clone()), LinTerm::monomial(x.primed(), -1), 0);
    let d = hand(&["x"], &[], vec![], vec![descent], vec![]);
    let m = DenseModes { vars: vec![Mode::BddDec], eqs: vec![], ineqs: vec![(Mode::BddDec, Mode::BddInc)] };
    let h = build_h(&d, &m).unwrap();
    // U1 > U2 ≥ U on x, strict chains on P and Q, weak limit
    assert_eq!(h.constraints.len(), 2 + 4 + 1);
    assert_eq!(h.constraints.last().unwrap().kind, crate::poly::Kind::Ge);
    assert!(dense_chain_exists(&d, &m).unwrap());
    assert!(ra_decide(&dense_chain_formula(&d, &m).unwrap()).unwrap());
    let flat = lin(LinTerm::var(x.clone()), LinTerm::monomial(x.primed(), -1), 0);
    let d = hand(&["x"], &[], vec![flat], vec![], vec![]);
    let m = DenseModes { vars: vec![Mode::Flat], eqs: vec![(Mode::Flat, Mode::Flat)], ineqs: vec![] };
    let h = build_h(&d, &m).unwrap();
    assert_eq!(h.constraints.len(), 2 + 1 + 4);
    let sum3 = lin(LinTerm::var(x.clone()), LinTerm::var(x.primed()), 3);
    let d = hand(&["x"], &[], vec![sum3], vec![], vec![]);
    for m in enumerate_dense(&d, false) {
        assert!(!dense_chain_exists(&d, &m).unwrap());
    }
    let empty = hand(&[], &[], vec![], vec![], vec![]);
    let m = DenseModes { vars: vec![], eqs: vec![], ineqs: vec![] };
    assert!(build_h(&empty, &m).unwrap().constraints.is_empty());
}

#[test]
fn g_for_increase() {
    let y = Var::int("y");
    let d = hand(&[], &["y"], vec![], vec![], vec![lin(LinTerm::monomial(y.clone(), -1), LinTerm::var(y.primed()), 0)]);
    let m = DiscreteModes { vars: vec![Mode::UnbInc], ineqs: vec![(Mode::UnbDec, Mode::UnbInc)] };
    let g = build_g(&d, &m).unwrap();
    // 2 variable clauses, 2 per term, T itself
    assert_eq!(g.atoms.len(), 2 + 4 + 1);
    assert!(g.consts.is_empty());
    assert!(discrete_chain_exists(&d, &m).unwrap());
    let flat = DiscreteModes { vars: vec![Mode::Flat], ineqs: vec![(Mode::Flat, Mode::Flat)] };
    assert!(!discrete_chain_exists(&d, &flat).unwrap());
}

/// The polyhedral dense test against the real engine on the literal formula.
#[test]
fn dense_fast_matches_literal() {
    for text in [
        "(relation (reals x) (body (> x x')))",
        "(relation (reals x) (body (> x' x)))",
        "(relation (reals x) (body (and (> x' x) (< x' (+ x 1)))))",
        "(relation (reals x) (body (= x' x)))",
        "(relation (reals x) (body (and (>= x' x) (< (* 2 x') (+ x 1)))))",
    ] {
        for d in to_canonical(&rel(text)).unwrap() {
            for m in enumerate_dense(&d, true) {
                let fast = dense_chain_exists(&d, &m).unwrap();
                let slow = ra_decide(&dense_chain_formula(&d, &m).unwrap()).unwrap();
                assert_eq!(fast, slow, "{text}: {d} under {m:?}");
            }
        }
    }
}

/// The integer-point-plus-ray test against Presburger elimination.
#[test]
fn discrete_fast_matches_literal() {
    for text in [
        "(relation (ints y) (body (> y' y)))",
        "(relation (ints y) (body (and (> y y') (> y' 0))))",
        "(relation (ints y) (body (= y' y)))",
        "(relation (ints y z) (body (and (> y' y) (= z' z) (> z y'))))",
        "(relation (ints y z) (body (and (> y' y) (> z' (+ z y')))))",
    ] {
        for d in to_canonical(&rel(text)).unwrap() {
            for m in enumerate_discrete(&d, true).take(60) {
                let fast = discrete_chain_exists(&d, &m).unwrap();
                let slow = pa_decide(&discrete_chain_formula(&d, &m).unwrap()).unwrap();
                assert_eq!(fast, slow, "{text}: {d} under {m:?}");
            }
        }
    }
}

#[test]
fn prefixes_check_pairwise() {
    for text in [
        "(relation (ints y) (body (> y' y)))",
        "(relation (reals x) (body (> x x')))",
        "(relation (ints y) (body (= y' y)))",
        "(relation (reals x) (ints y) (body (and (> x' x) (< x' 1) (>= y' y))))",
        "(relation (ints y) (body (and (mod= y 3 1) (mod= y' 3 1) (> y' y))))",
    ] {
        let r = rel(text);
        match has_omega_chain(&r, &Options::default()).unwrap() {
            Verdict::HasOmegaChain { prefix: Some(p), .. } => {
                assert_eq!(p.len(), 5);
                for i in 0..5 {
                    for j in i + 1..5 {
                        assert!(r.holds(&p[i], &p[j]).unwrap());
                    }
                }
            }
            v => panic!("{text}: {v:?}"),
        }
    }
}

#[test]
fn transitivity_examples() {
    assert!(check_transitive(&rel("(relation (ints y) (body (> y' y)))")).unwrap().is_none());
    assert!(check_transitive(&rel("(relation (reals x) (body (= x' x)))")).unwrap().is_none());
    assert!(check_transitive(&rel("(relation (ints y) (body (= y' (+ y 1))))")).unwrap().is_some());
}

#[test]
fn invalid_modes_rejected() {
    let d = single("(relation (ints y) (body (> y' y)))");
    let bad = DiscreteModes { vars: vec![Mode::UnbInc], ineqs: vec![(Mode::UnbDec, Mode::UnbDec)] };
    assert!(matches!(build_g(&d, &bad), Err(Error::InvalidModes(_))));
    let bad = DiscreteModes { vars: vec![Mode::BddInc], ineqs: vec![(Mode::Flat, Mode::Flat)] };
    assert!(matches!(build_g(&d, &bad), Err(Error::InvalidModes(_))));
}
