//! Case-splitting satisfiability search over quantifier-free formulas
//! whose atoms are each purely integer or purely real.

use num_bigint::BigInt;

use crate::budget;
use crate::error::{Error, Result};
use crate::formula::{conj, push_negations, Assignment, Atom, Formula, LinTerm, Var};
use crate::poly::{self, Constraint};
use crate::presburger;
use crate::qe;

/// A model of `f`, or `None` if unsatisfiable. Real variables listed in
/// `domain` are restricted to `[0, 1)`.
pub(crate) fn solve(f: &Formula, domain: &[Var]) -> Result<Option<Assignment>> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    let g = qe::simplify(&push_negations(f));
    let dom: Vec<Constraint> = domain
        .iter()
        .flat_map(|v| {
            let x = LinTerm::var(v.clone());
            [
                Constraint::ge(x.clone()),
                Constraint::gt(x.neg().add_constant(&BigInt::from(1))),
            ]
        })
        .collect();
    search(vec![g], Vec::new(), &dom)
}

fn search(mut todo: Vec<Formula>, mut lits: Vec<Atom>, dom: &[Constraint]) -> Result<Option<Assignment>> {
    budget::charge(1)?;
    let mut ors: Vec<Vec<Formula>> = Vec::new();
    while let Some(f) = todo.pop() {
        match f {
            Formula::True => {}
            Formula::False => return Ok(None),
            Formula::Atom(a) => lits.push(a),
            Formula::And(cs) => todo.extend(cs),
            Formula::Or(cs) => ors.push(cs),
            Formula::Not(_) | Formula::Exists(..) | Formula::Forall(..) => {
                return Err(Error::Internal("search expects negation-free input".into()))
            }
        }
    }
    let Some(simple) = conj::simplify(lits.clone()) else {
        return Ok(None);
    };
    // drop disjunctions already satisfied by a literal
    ors.retain(|ds| !ds.iter().any(|d| matches!(d, Formula::Atom(a) if lits.contains(a))));
    if ors.is_empty() {
        return leaf(&simple, dom);
    }
    if ors.len() > 1 && leaf(&simple, dom)?.is_none() {
        return Ok(None);
    }
    let (i, _) = ors
        .iter()
        .enumerate()
        .min_by_key(|(_, ds)| ds.len())
        .expect("nonempty");
    let branch = ors.swap_remove(i);
    for d in branch {
        let mut next: Vec<Formula> = ors.iter().cloned().map(Formula::Or).collect();
        next.push(d);
        if let Some(m) = search(next, lits.clone(), dom)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn leaf(lits: &[Atom], dom: &[Constraint]) -> Result<Option<Assignment>> {
    let mut ints = Vec::new();
    let mut reals: Vec<Constraint> = dom.to_vec();
    for a in lits {
        if a.is_int_only() {
            ints.push(a.clone());
        } else if a.vars().any(Var::is_int) {
            return Err(Error::Internal(format!("mixed atom {a} reached the theory check")));
        } else {
            reals.push(Constraint::from_atom(a).expect("real atoms are not congruences"));
        }
    }
    let Some(mut m) = presburger::conj_model(&ints)? else {
        return Ok(None);
    };
    let Some(r) = poly::model(reals)? else {
        return Ok(None);
    };
    m.extend(&r);
    Ok(Some(m))
}
