use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::formula::Atom;

fn rel(text: &str) -> Relation {
    parse_relation(text).unwrap()
}

fn err(text: &str) -> ParseError {
    parse_relation(text).unwrap_err()
}

#[test]
fn relation_examples() {
    let y = Var::int("y");
    let r = rel("(relation (ints y) (body (> y' y)))");
    assert_eq!(r.ints, vec![y.clone()]);
    assert_eq!(r.body, Formula::gt(LinTerm::var(y.primed()).sub(&LinTerm::var(y.clone()))));

    let x = Var::real("x");
    let r = rel("(relation (reals x) (body (> x x')))");
    assert_eq!(r.reals, vec![x.clone()]);
    assert_eq!(r.body, Formula::gt(LinTerm::var(x.clone()).sub(&LinTerm::var(x.primed()))));
}

#[test]
fn sugar_normalizes() {
    let r = rel("(relation (reals x) (ints y) (body (and (>= y' y) (<= x 1) (< (* 2 x) y))))");
    let Formula::And(cs) = &r.body else { panic!("{}", r.body) };
    // integer >= is a shifted strict inequality, real <= a disjunction
    assert!(matches!(cs[0], Formula::Atom(Atom::Gt(_))));
    assert!(matches!(cs[1], Formula::Or(_)));
    assert!(matches!(cs[2], Formula::Atom(Atom::Gt(_))));
    let r = rel("(relation (ints y) (body (mod= (+ y 1) 3 7)))");
    assert_eq!(print_formula(&r.body), "(mod= y 3 0)");
}

#[test]
fn errors_are_classified() {
    assert!(matches!(err("(relation (ints y) (body (* y y)))").kind, ParseErrorKind::Nonlinear(_) | ParseErrorKind::Syntax(_)));
    assert!(matches!(err("(relation (ints y) (body (> (* y y) 0)))").kind, ParseErrorKind::Nonlinear(_)));
    assert!(matches!(err("(relation (ints y) (body (> z 0)))").kind, ParseErrorKind::Undeclared(_)));
    assert!(matches!(err("(relation (reals x) (body (mod= x 2 0)))").kind, ParseErrorKind::Sort(_)));
    assert!(matches!(err("(relation (ints y) (body (> y 0))").kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(err("(relation (ints y) (body (mod= y 0 0)))").kind, ParseErrorKind::Syntax(_) | ParseErrorKind::Sort(_)));
    assert!(matches!(err("(relation (ints y) (body y))").kind, ParseErrorKind::Sort(_)));
}

#[test]
fn error_positions() {
    let e = err("(relation (ints y)\n  (body (> y' w)))");
    assert_eq!((e.line, e.col), (2, 15));
    assert!(e.to_string().starts_with("2:15: undeclared variable"));
}

#[test]
fn primed_outside_relation_rejected() {
    let s = Scope::new(&[Var::int("y")], false);
    assert!(parse_formula("(> y' 0)", &s).is_err());
    assert!(parse_formula("(> y 0)", &s).is_ok());
}

#[test]
fn print_examples() {
    let y = Var::int("y");
    let t = LinTerm::from_parts([(y.clone(), BigInt::from(2))], -3);
    assert_eq!(print_formula(&Formula::gt(t)), "(> (+ (* 2 y) -3) 0)");
    let m = Formula::Atom(Atom::modulo(LinTerm::var(y), 3.into(), 1.into()));
    assert_eq!(print_formula(&m), "(mod= y 3 1)");
}

#[test]
fn system_documents() {
    let s = parse_system(
        "(system (relation (ints y) (body (> y' y))) (init (= y 0)) (live (> y 3) true) (safe (< y 0)) (bound y (+ y 1)))",
    )
    .unwrap();
    assert_eq!(s.live.len(), 2);
    assert_eq!(s.safe.len(), 1);
    assert_eq!(s.bounds.len(), 2);
    assert!(parse_system("(system (relation (ints y) (body (> y' y))) (init (= y' 0)))").is_err());
    assert!(parse_system("(system (relation (ints y) (body true)) (frob))").is_err());
}

#[test]
fn relation_round_trip() {
    let r = rel("(relation (reals x) (ints y z) (body (exists ((int k) (real w)) (and (= y (* 2 k)) (> w x') (< w 1)))))");
    let again = rel(&print_relation(&r));
    assert_eq!(again.reals, r.reals);
    assert_eq!(again.ints, r.ints);
    assert_eq!(again.body, r.body);
}

fn pool() -> Vec<Var> {
    vec![
        Var::int("y"),
        Var::int("y").primed(),
        Var::real("x"),
        Var::real("x").primed(),
        Var::new("k", Sort::Int, Role::Bound),
        Var::new("w", Sort::Real, Role::Bound),
    ]
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    (0..3u8, prop::collection::vec(-4i64..=4, 6), -9i64..=9, 1i64..=5).prop_map(|(kind, cs, c, d)| {
        let int_only = kind == 2;
        let t = LinTerm::from_parts(
            pool()
                .into_iter()
                .zip(cs)
                .filter(|(v, _)| !int_only || v.is_int())
                .map(|(v, k)| (v, BigInt::from(k))),
            if int_only { 0 } else { c },
        );
        match kind {
            0 => Atom::Eq(t),
            1 => Atom::Gt(t),
            _ => Atom::modulo(t, d.into(), c.into()),
        }
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => arb_atom().prop_map(Formula::Atom),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    let body = leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::Or),
            inner.prop_map(|f| Formula::Not(Box::new(f))),
        ]
    });
    (body, 0..4u8).prop_map(|(f, q)| {
        let [k, w] = [pool()[4].clone(), pool()[5].clone()];
        match q {
            0 => Formula::Exists(k, Box::new(Formula::Forall(w, Box::new(f)))),
            1 => Formula::Forall(k, Box::new(Formula::Exists(w, Box::new(f)))),
            2 => Formula::Exists(k, Box::new(Formula::Exists(w, Box::new(f)))),
            _ => Formula::Not(Box::new(Formula::Forall(w, Box::new(Formula::Exists(k, Box::new(f)))))),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(f in arb_formula()) {
        let scope = Scope::new(&[Var::int("y"), Var::real("x")], true);
        let text = print_formula(&f);
        let g = parse_formula(&text, &scope).unwrap();
        prop_assert_eq!(g, f, "{}", text);
    }

    #[test]
    fn garbage_never_panics(s in "[()a-z0-9 '*+<>=-]{0,40}") {
        let _ = parse_relation(&s);
        let _ = parse_relation(&format!("(relation (ints y) (reals x) (body {s}))"));
    }
}
