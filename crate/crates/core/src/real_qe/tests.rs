use super::*;
use crate::parser::{parse_formula, Scope};
use crate::formula::LinTerm;
use num_bigint::BigInt;

fn reals(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::real(n)).collect()
}

fn pf(text: &str, names: &[&str]) -> Formula {
    parse_formula(text, &Scope::new(&reals(names), false)).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn doubling_is_total() {
    let x = Var::real("x");
    let g = eliminate_exists_real(&x, &pf("(= (* 2 x) z)", &["x", "z"])).unwrap();
    assert_eq!(qe::simplify(&g), Formula::True);
}

#[test]
fn empty_interval() {
    let x = Var::real("x");
    let g = eliminate_exists_real(&x, &pf("(and (> x 0) (> (- 0 x) 0))", &["x"])).unwrap();
    assert_eq!(qe::simplify(&g), Formula::False);
}

#[test]
fn interval_projection_matches_grid() {
    let x = Var::real("x");
    let f = pf("(and (> x a) (> b x) (or (= x (* 2 a)) (> x 0)))", &["x", "a", "b"]);
    let g = eliminate_exists_real(&x, &f).unwrap();
    assert!(!g.mentions(&x));
    for an in -8..=8 {
        for bn in -8..=8 {
            let (a, b) = (q(an, 2), q(bn, 2));
            let sigma = Assignment::new()
                .with(Var::real("a"), a.clone())
                .with(Var::real("b"), b.clone());
            // x ranges over (a, b): a witness exists iff the open interval meets (0, ∞) or contains 2a
            let two_a = a.clone() * q(2, 1);
            let want = (a < b && b > q(0, 1)) || (a < two_a && two_a < b);
            assert_eq!(g.evaluate(&sigma).unwrap(), want, "a={a} b={b}");
        }
    }
}

#[test]
fn decide_examples() {
    let s = Scope::new(&[], false);
    let p = |t: &str| ra_decide(&parse_formula(t, &s).unwrap()).unwrap();
    assert!(p("(forall ((real d)) (=> (> d 0) (exists ((real x)) (and (< 0 x) (< x d)))))"));
    assert!(p("(exists ((real x)) (= (* 2 x) 1))"));
    assert!(p("(forall ((real x)) (exists ((real y)) (> y x)))"));
    assert!(!p("(exists ((real x)) (forall ((real y)) (> x y)))"));
    assert!(!p("(exists ((real d)) (and (> d 0) (forall ((real x)) (=> (> x 0) (> x d)))))"));
}

#[test]
fn models_satisfy() {
    for (text, names) in [
        ("(and (< 0 x) (< x 1))", vec!["x"]),
        ("(and (= (+ x y) 1) (> x 0) (> y 0))", vec!["x", "y"]),
        ("(or (and (> x 5) (< (* 3 x) 16)) (= x -9))", vec!["x"]),
        ("(and (>= x y) (>= y x) (> (+ x y) 3))", vec!["x", "y"]),
    ] {
        let f = pf(text, &names);
        let m = ra_model(&f).unwrap().expect("satisfiable");
        assert!(f.evaluate(&m).unwrap(), "{f} at {m}");
    }
    assert!(ra_model(&pf("(and (= x x) false)", &["x"])).unwrap().is_none());
}

#[test]
fn integer_variables_rejected() {
    let y = Var::int("y");
    let f = Formula::gt(LinTerm::var(y.clone()));
    assert!(matches!(ra_decide(&f), Err(Error::Sort(_))));
}
