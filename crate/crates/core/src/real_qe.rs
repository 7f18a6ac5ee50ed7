//! Linear real arithmetic: Fourier–Motzkin / virtual substitution
//! elimination, decision and exact rational models.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget;
use crate::error::{Error, Result};
use crate::formula::{conj, Assignment, Atom, Formula, RatTerm, Var};
use crate::poly::{self, Constraint};
use crate::qe;

fn check_real(f: &Formula) -> Result<()> {
    let mut err = None;
    f.visit_atoms(&mut |a| {
        if err.is_some() {
            return;
        }
        if matches!(a, Atom::Mod { .. }) {
            err = Some(Error::Sort(format!("congruence {a} in a real formula")));
        } else if let Some(v) = a.vars().find(|v| v.is_int()) {
            err = Some(Error::Sort(format!("integer variable {v} in a real formula")));
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    check_binders(f)
}

fn check_binders(f: &Formula) -> Result<()> {
    match f {
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            if v.is_int() {
                return Err(Error::Sort(format!("integer quantifier {v} in a real formula")));
            }
            check_binders(g)
        }
        Formula::Not(g) => check_binders(g),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().try_for_each(check_binders),
        _ => Ok(()),
    }
}

/// `∃v f` for quantifier-free `f` over real atoms.
pub fn eliminate_exists_real(v: &Var, f: &Formula) -> Result<Formula> {
    if !v.is_real() {
        return Err(Error::Sort(format!("{v} is not a real variable")));
    }
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    check_real(f)?;
    qe::exists(v, f)
}

/// Quantifier-free equivalent of a real formula with any prefix.
pub fn ra_qe(f: &Formula) -> Result<Formula> {
    check_real(f)?;
    qe::eliminate_quantifiers(f)
}

/// Truth of `f` with free variables read existentially.
pub fn ra_decide(f: &Formula) -> Result<bool> {
    check_real(f)?;
    let qf = qe::eliminate_quantifiers(f)?;
    Ok(crate::sat::solve(&qf, &[])?.is_some())
}

/// A satisfying rational assignment of a quantifier-free real formula.
pub fn ra_model(f: &Formula) -> Result<Option<Assignment>> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    check_real(f)?;
    let Some(mut m) = crate::sat::solve(f, &[])? else {
        return Ok(None);
    };
    for v in f.free_vars() {
        if !m.contains(&v) {
            m.insert(v, BigRational::zero())?;
        }
    }
    Ok(Some(m))
}

/// `∃v` over a conjunction: Gauss on an equality, otherwise Fourier–Motzkin
/// (all bounds are strict, so the shadow is exact).
pub(crate) fn conj_exists(v: &Var, atoms: &[Atom]) -> Result<Formula> {
    let Some(atoms) = conj::simplify(atoms.to_vec()) else {
        return Ok(Formula::False);
    };
    let (with, rest): (Vec<Atom>, Vec<Atom>) = atoms.into_iter().partition(|a| a.mentions(v));
    let mut cs = Vec::with_capacity(with.len());
    for a in &with {
        cs.push(Constraint::from_atom(a).ok_or_else(|| {
            Error::Internal(format!("congruence {a} over real variable {v}"))
        })?);
    }
    let projected = match poly::eliminate(cs, v)? {
        Some(p) => poly::to_formula(&p),
        None => Formula::False,
    };
    Ok(qe::simplify(&Formula::and(
        rest.into_iter().map(Formula::Atom).chain([projected]),
    )))
}

/// Loos–Weispfenning elimination on a negation-free formula with test
/// points `-∞`, equality roots and lower bounds plus an infinitesimal (or
/// the mirror image with `+∞`, whichever set is smaller).
pub(crate) fn virtual_substitution(v: &Var, f: &Formula) -> Result<Formula> {
    let mut eq_points: Vec<RatTerm> = Vec::new();
    let mut lower: Vec<RatTerm> = Vec::new();
    let mut upper: Vec<RatTerm> = Vec::new();
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        let mut rest = a.term().clone();
        let c = rest.take(v);
        if c.is_zero() {
            return;
        }
        let root = rest.to_rat().scale(&-BigRational::new(BigInt::one(), c.clone()));
        match a {
            Atom::Eq(_) => eq_points.push(root),
            Atom::Gt(_) if c.is_positive() => lower.push(root),
            Atom::Gt(_) => upper.push(root),
            Atom::Mod { .. } => bad = Some(a.clone()),
        }
    });
    if let Some(a) = bad {
        return Err(Error::Internal(format!("congruence {a} over real variable {v}")));
    }
    let from_below = lower.len() <= upper.len();
    let bounds = if from_below { lower } else { upper };
    budget::charge((eq_points.len() + bounds.len() + 1) as u64)?;

    // v at -∞ (or +∞)
    let at_inf = f.map_atoms_folded(&mut |a| {
        let c = a.term().coeff(v);
        match a {
            _ if c.is_zero() => Formula::Atom(a.clone()),
            Atom::Gt(_) => Formula::from_bool(c.is_negative() == from_below),
            _ => Formula::False,
        }
    });
    let mut parts = vec![qe::simplify(&at_inf)];
    let mut seen = Vec::new();
    for p in eq_points {
        if seen.contains(&p) {
            continue;
        }
        parts.push(qe::simplify(&f.subst_unchecked(v, &p)));
        seen.push(p);
    }
    let mut seen = Vec::new();
    for p in bounds {
        if seen.contains(&p) {
            continue;
        }
        // v = p ± ε
        let r = f.map_atoms_folded(&mut |a| {
            let c = a.term().coeff(v);
            if c.is_zero() {
                return Formula::Atom(a.clone());
            }
            let s = a.substitute(v, &p);
            match a {
                Atom::Eq(_) => Formula::False,
                Atom::Gt(_) => {
                    // sign of the infinitesimal part is sign(c) from below,
                    // -sign(c) from above
                    let grows = c.is_positive() == from_below;
                    if grows {
                        Formula::or([s.canonical(), Atom::Eq(s.term().clone()).canonical()])
                    } else {
                        s.canonical()
                    }
                }
                Atom::Mod { .. } => unreachable!("rejected above"),
            }
        });
        parts.push(qe::simplify(&r));
        seen.push(p);
    }
    Ok(Formula::or(parts))
}

#[cfg(test)]
mod tests;
