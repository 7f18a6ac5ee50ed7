use super::*;
use crate::parser::parse_system;

fn sys(text: &str) -> System {
    parse_system(text).unwrap()
}

fn opts() -> Options {
    Options {
        witness: Some(3),
        ..Options::default()
    }
}

const INC: &str = "(relation (ints y) (body (> y' y)))";

#[test]
fn safety_examples() {
    let s = sys(&format!("(system {INC} (init (= y 0)) (safe (< y 0)))"));
    assert!(decide_k_safety(&s, &opts()).unwrap());
    let s = sys(&format!("(system {INC} (init (= y 0)) (safe (> y 5)))"));
    assert!(!decide_k_safety(&s, &opts()).unwrap());
    let s = sys(&format!("(system {INC} (init (= y 0)) (safe (> y 2) (> y 4)))"));
    assert!(!decide_k_safety(&s, &opts()).unwrap());
    // the second formula must hold strictly later than the first
    let s = sys(&format!("(system {INC} (init (= y 0)) (safe (> y 4) (< y 5)))"));
    assert!(decide_k_safety(&s, &opts()).unwrap());
}

#[test]
fn liveness_examples() {
    let s = sys(&format!("(system {INC} (init (= y 0)) (live (exists ((int z)) (= y (* 2 z)))))"));
    let rep = decide_k_liveness(&s, &opts()).unwrap();
    assert!(rep.verdict.has_chain());
    let s = sys(&format!("(system {INC} (init (= y 0)) (live (< y 0)))"));
    assert!(!decide_k_liveness(&s, &opts()).unwrap().verdict.has_chain());
    let s = sys("(system (relation (ints y) (body (and (> y y') (> y' 0)))) (init (= y 100)) (live (> y 0)))");
    assert!(!decide_k_liveness(&s, &opts()).unwrap().verdict.has_chain());
}

#[test]
fn eventuality_examples() {
    let s = sys(&format!("(system {INC} (init (= y 0)))"));
    let seven = crate::parser::parse_formula("(= y 7)", &crate::parser::Scope::new(&s.reach.vars(), false)).unwrap();
    assert!(decide_eventuality(&s, &seven, &opts()).unwrap().verdict.has_chain());
    let neg = crate::parser::parse_formula("(< y 0)", &crate::parser::Scope::new(&s.reach.vars(), false)).unwrap();
    assert!(!decide_eventuality(&s, &neg, &opts()).unwrap().verdict.has_chain());
}

#[test]
fn unbounded_examples() {
    let s = sys(&format!("(system {INC} (init (= y 0)) (bound y))"));
    assert!(exists_unbounded_execution(&s, &s.bounds[0], &opts()).unwrap().verdict.has_chain());
    assert!(!decide_boundedness(&s, &opts()).unwrap());
    let s = sys("(system (relation (ints y) (body (= y' y))) (init (= y 0)) (bound y))");
    assert!(decide_boundedness(&s, &opts()).unwrap());
    let s = sys("(system (relation (reals x) (body (and (> x x') (>= x' 0) (< x 1)))) (init (and (>= x 0) (< x 1))) (bound x))");
    assert!(decide_boundedness(&s, &opts()).unwrap());
}

#[test]
fn reachable_bound_examples() {
    let s = sys("(system (relation (ints y) (body (= y' y))) (init (and (>= y 0) (<= y 3))) (bound y))");
    assert!(decide_reachable_bound(&s, &opts()).unwrap());
    let s = sys(&format!("(system {INC} (init (= y 0)) (bound y))"));
    assert!(!decide_reachable_bound(&s, &opts()).unwrap());
    let s = sys(&format!("(system {INC} (init false) (bound y))"));
    assert!(decide_reachable_bound(&s, &opts()).unwrap());
}

#[test]
fn non_transitive_reach_rejected() {
    let s = sys("(system (relation (ints y) (body (= y' (+ y 1)))) (init (= y 0)) (safe (> y 5)))");
    assert!(matches!(decide_k_safety(&s, &opts()), Err(Error::NotTransitive)));
}

#[test]
fn oracle_examples() {
    let r = crate::parser::parse_relation("(relation (ints y) (body (and (= y y') (>= y 0) (<= y 3))))").unwrap();
    assert!(finite_domain_oracle(&r, &[(0, 3)], 100).unwrap());
    let r = crate::parser::parse_relation(INC).unwrap();
    assert!(!finite_domain_oracle(&r, &[(0, 3)], 100).unwrap());
    let r = crate::parser::parse_relation("(relation (ints y) (body (> (- y' y) -1)))").unwrap();
    assert!(finite_domain_oracle(&r, &[(0, 3)], 100).unwrap());
    assert!(matches!(finite_domain_oracle(&r, &[(0, 300)], 100), Err(Error::BoxTooLarge(_))));
    let r = crate::parser::parse_relation("(relation (ints y) (body (= y' (+ y 1))))").unwrap();
    assert!(matches!(finite_domain_oracle(&r, &[(0, 3)], 100), Err(Error::NotTransitive)));
}

#[test]
fn boxed_relation_agrees_with_oracle() {
    let r = crate::parser::parse_relation("(relation (ints y z) (body (and (> y' y) (>= z' z))))").unwrap();
    let b = [(-2, 2), (0, 1)];
    let oracle = finite_domain_oracle(&r, &b, 100).unwrap();
    let engine = omega::has_omega_chain(&boxed(&r, &b), &opts()).unwrap().has_chain();
    assert_eq!(oracle, engine);
    assert!(!oracle);
}
