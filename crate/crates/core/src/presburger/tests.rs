use super::*;
use crate::parser::{parse_formula, Scope};

fn ints(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::int(n)).collect()
}

fn pf(text: &str, names: &[&str]) -> Formula {
    parse_formula(text, &Scope::new(&ints(names), false)).unwrap()
}

fn agrees_on_box(f: &Formula, g: &Formula, names: &[&str], r: i64) {
    let vars = ints(names);
    let n = vars.len() as u32;
    let side = (2 * r + 1) as usize;
    for code in 0..side.pow(n) {
        let mut sigma = Assignment::new();
        let mut c = code;
        for v in &vars {
            sigma.set_int(v.clone(), (c % side) as i64 - r);
            c /= side;
        }
        let want = crate::formula::Evaluator::new()
            .with_default_range(-40, 40)
            .eval(f, &sigma)
            .unwrap();
        assert_eq!(g.evaluate(&sigma).unwrap(), want, "{f} vs {g} at {sigma}");
    }
}

#[test]
fn parity_of_double() {
    let y = Var::int("y");
    let f = pf("(= (* 2 y) z)", &["y", "z"]);
    let g = eliminate_exists_int(&y, &f).unwrap();
    assert!(!g.mentions(&y));
    agrees_on_box(&Formula::exists(y, f), &g, &["z"], 12);
}

#[test]
fn gap_between_bounds() {
    let y = Var::int("y");
    let f = pf("(and (> y a) (> b y))", &["y", "a", "b"]);
    let g = eliminate_exists_int(&y, &f).unwrap();
    let expect = pf("(> (- b a) 1)", &["a", "b"]);
    agrees_on_box(&expect, &g, &["a", "b"], 8);
}

#[test]
fn chinese_remainder() {
    let y = Var::int("y");
    let f = pf("(and (mod= y 3 1) (mod= y 5 2) (> y -1) (> 15 y))", &["y"]);
    assert_eq!(qe::simplify(&eliminate_exists_int(&y, &f).unwrap()), Formula::True);
}

#[test]
fn decide_examples() {
    let s = Scope::new(&[], false);
    let p = |t: &str| pa_decide(&parse_formula(t, &s).unwrap()).unwrap();
    assert!(p("(exists ((int y)) (forall ((int k)) (exists ((int y1)) (> y1 k))))"));
    assert!(!p("(exists ((int y)) (= (* 2 y) 5))"));
    assert!(p("(forall ((int y)) (exists ((int z)) (or (= y (* 2 z)) (= y (+ (* 2 z) 1)))))"));
    assert!(!p("(forall ((int y)) (exists ((int z)) (= y (* 2 z))))"));
    assert!(p("(forall ((int y)) (exists ((int z)) (and (> z y) (mod= z 7 3))))"));
}

#[test]
fn real_variables_rejected() {
    let x = Var::real("x");
    let f = Formula::gt(LinTerm::var(x.clone()));
    assert!(matches!(pa_decide(&f), Err(Error::Sort(_))));
    assert!(matches!(eliminate_exists_int(&x, &f), Err(Error::Sort(_))));
}

#[test]
fn models_satisfy() {
    for (text, names) in [
        ("(and (> y 3) (mod= y 2 0))", vec!["y"]),
        ("(and (= (* 2 y) z) (> z 5))", vec!["y", "z"]),
        ("(and (> (+ (* 3 a) (* -5 b)) 7) (< (+ a b) 2) (mod= (+ a b) 4 3))", vec!["a", "b"]),
        ("(or (and (> y 100) (< y 102)) (= y -7))", vec!["y"]),
    ] {
        let f = pf(text, &names);
        let m = pa_model(&f).unwrap().expect("satisfiable");
        assert!(f.evaluate(&m).unwrap(), "{f} at {m}");
    }
    assert!(pa_model(&pf("(and (> y 0) (> (- 0 y) 0))", &["y"])).unwrap().is_none());
    assert!(pa_model(&pf("(and (> (* 3 y) 1) (< (* 3 y) 3))", &["y"])).unwrap().is_none());
}

#[test]
fn mixed_quantifiers_against_box() {
    // ∀x∈[-3,3] ∃y∈[-3,3] (2y > x ∧ y ≤ x + 1)
    let f = pf(
        "(forall ((int x)) (=> (and (>= x -3) (<= x 3)) (exists ((int y)) (and (>= y -3) (<= y 3) (> (* 2 y) x) (<= y (+ x 1))))))",
        &[],
    );
    let want = crate::formula::Evaluator::new()
        .with_default_range(-3, 3)
        .eval(&f, &Assignment::new())
        .unwrap();
    assert_eq!(pa_decide(&f).unwrap(), want);
}
