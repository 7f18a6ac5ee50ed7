//! Quantifier elimination driver shared by the integer and real engines.
//!
//! A block `∃v φ` is handled by miniscoping first; if the disjunctive form
//! of what remains is small, each conjunction goes through the cheaper
//! conjunction kernel (Gauss, exact shadows), otherwise the formula-level
//! kernel (Cooper / virtual substitution) runs on the negation normal form.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget;
use crate::error::Result;
use crate::formula::{conj, push_negations, to_dnf, Atom, Formula, RatTerm, Var};
use crate::{presburger, real_qe};

const DNF_LIMIT: usize = 128;
/// Integer variables with at most this many values are eliminated by
/// substitution.
const RANGE_LIMIT: i64 = 32;

/// Simplifies a negation-free, quantifier-free formula: canonical atoms,
/// flattening, bound tightening inside conjunctions, tautology detection in
/// disjunctions.
pub(crate) fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => a.canonical(),
        Formula::Not(g) => simplify(&push_negations(&Formula::Not(g.clone()))),
        Formula::Exists(v, g) => Formula::exists(v.clone(), simplify(g)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), simplify(g)),
        Formula::And(cs) => {
            let mut atoms = Vec::new();
            let mut others = Vec::new();
            for c in cs {
                match simplify(c) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::Atom(a) => atoms.push(a),
                    Formula::And(inner) => {
                        for i in inner {
                            match i {
                                Formula::Atom(a) => atoms.push(a),
                                o => others.push(o),
                            }
                        }
                    }
                    o => others.push(o),
                }
            }
            let Some(atoms) = conj::simplify(atoms) else {
                return Formula::False;
            };
            // a disjunction containing one of the conjunction's atoms is implied
            let set: BTreeSet<&Atom> = atoms.iter().collect();
            others.retain(|o| match o {
                Formula::Or(ds) => !ds.iter().any(|d| matches!(d, Formula::Atom(a) if set.contains(a))),
                _ => true,
            });
            others.sort();
            others.dedup();
            Formula::and(atoms.into_iter().map(Formula::Atom).chain(others))
        }
        Formula::Or(cs) => {
            let mut parts = Vec::new();
            for c in cs {
                match simplify(c) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => parts.extend(inner),
                    o => parts.push(o),
                }
            }
            parts.sort();
            parts.dedup();
            let atoms: BTreeSet<&Atom> = parts
                .iter()
                .filter_map(|p| match p {
                    Formula::Atom(a) => Some(a),
                    _ => None,
                })
                .collect();
            // a ∨ ¬a
            for a in &atoms {
                if let Formula::Atom(n) = a.negate() {
                    if let Formula::Atom(n) = n.canonical() {
                        if atoms.contains(&n) {
                            return Formula::True;
                        }
                    }
                }
            }
            Formula::or(parts)
        }
    }
}

/// Upper estimate of the number of DNF conjunctions, saturating at `cap`.
pub(crate) fn dnf_size(f: &Formula, cap: usize) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => 1,
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => dnf_size(g, cap),
        Formula::Or(cs) => cs
            .iter()
            .fold(0usize, |acc, c| acc.saturating_add(dnf_size(c, cap)))
            .min(cap),
        Formula::And(cs) => cs
            .iter()
            .fold(1usize, |acc, c| acc.saturating_mul(dnf_size(c, cap)))
            .min(cap),
    }
}

/// `∃v f` for quantifier-free `f`, returning a simplified quantifier-free
/// formula.
pub(crate) fn exists(v: &Var, f: &Formula) -> Result<Formula> {
    let f = simplify(&push_negations(f));
    exists_nnf(v, &f)
}

fn exists_nnf(v: &Var, f: &Formula) -> Result<Formula> {
    if !f.mentions(v) {
        return Ok(f.clone());
    }
    match f {
        Formula::Or(cs) => {
            let mut parts = Vec::with_capacity(cs.len());
            for c in cs {
                let r = exists_nnf(v, c)?;
                if r == Formula::True {
                    return Ok(Formula::True);
                }
                parts.push(r);
            }
            Ok(simplify(&Formula::or(parts)))
        }
        Formula::And(cs) if cs.iter().any(|c| !c.mentions(v)) => {
            let (with, without): (Vec<_>, Vec<_>) = cs.iter().cloned().partition(|c| c.mentions(v));
            let inner = exists_nnf(v, &Formula::and(with))?;
            Ok(simplify(&Formula::and(without.into_iter().chain([inner]))))
        }
        _ => {
            if v.is_int() {
                if let Some((lo, hi)) = constant_bounds(v, f) {
                    if &hi - &lo < BigInt::from(RANGE_LIMIT) {
                        return expand_range(v, f, lo, hi);
                    }
                }
            }
            let out = if dnf_size(f, DNF_LIMIT + 1) <= DNF_LIMIT {
                let mut parts = Vec::new();
                for c in to_dnf(f)? {
                    let r = conj_exists(v, &c)?;
                    if r == Formula::True {
                        return Ok(Formula::True);
                    }
                    parts.push(r);
                }
                Formula::or(parts)
            } else if v.is_int() {
                presburger::cooper(v, f)?
            } else {
                real_qe::virtual_substitution(v, f)?
            };
            Ok(simplify(&out))
        }
    }
}

/// Constant bounds `lo ≤ v ≤ hi` stated by top-level conjuncts of `f`.
fn constant_bounds(v: &Var, f: &Formula) -> Option<(BigInt, BigInt)> {
    let conjuncts = match f {
        Formula::And(cs) => cs.as_slice(),
        other => std::slice::from_ref(other),
    };
    let (mut lo, mut hi): (Option<BigInt>, Option<BigInt>) = (None, None);
    let mut tighten = |l: Option<BigInt>, h: Option<BigInt>| {
        if let Some(l) = l {
            lo = Some(lo.take().map_or(l.clone(), |x| x.max(l)));
        }
        if let Some(h) = h {
            hi = Some(hi.take().map_or(h.clone(), |x| x.min(h)));
        }
    };
    for c in conjuncts {
        let Formula::Atom(a) = c else { continue };
        let t = a.term();
        if t.coeffs().len() != 1 || !t.mentions(v) {
            continue;
        }
        let (a_v, k) = (t.coeff(v), t.constant().clone());
        match a {
            // a·v + k > 0
            Atom::Gt(_) if a_v.is_positive() => tighten(Some((-&k).div_floor(&a_v) + 1), None),
            Atom::Gt(_) => tighten(None, Some(k.div_ceil(&-&a_v) - 1)),
            Atom::Eq(_) if (&k % &a_v).is_zero() => {
                let x = -(k / &a_v);
                tighten(Some(x.clone()), Some(x));
            }
            Atom::Eq(_) => tighten(Some(BigInt::one()), Some(BigInt::zero())),
            Atom::Mod { .. } => {}
        }
    }
    Some((lo?, hi?))
}

/// `∃v f` for `v` confined to `[lo, hi]`, by substituting each value.
fn expand_range(v: &Var, f: &Formula, lo: BigInt, hi: BigInt) -> Result<Formula> {
    let mut parts = Vec::new();
    let mut k = lo;
    while k <= hi {
        budget::charge(1)?;
        let g = simplify(&f.subst_unchecked(v, &RatTerm::constant_term(BigRational::from_integer(k.clone()))));
        if g == Formula::True {
            return Ok(Formula::True);
        }
        parts.push(g);
        k += 1;
    }
    Ok(simplify(&Formula::or(parts)))
}

pub(crate) fn conj_exists(v: &Var, atoms: &[Atom]) -> Result<Formula> {
    if v.is_int() {
        presburger::conj_exists(v, atoms)
    } else {
        real_qe::conj_exists(v, atoms)
    }
}

/// `∀v f` as `¬∃v¬f`.
pub(crate) fn forall(v: &Var, f: &Formula) -> Result<Formula> {
    let neg = push_negations(&Formula::not(f.clone()));
    let e = exists(v, &neg)?;
    Ok(simplify(&push_negations(&Formula::not(e))))
}

/// Removes every quantifier, innermost first. Atoms under a quantifier on
/// an integer variable must be integer-only wherever they mention it.
pub(crate) fn eliminate_quantifiers(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate_quantifiers(g)?),
        Formula::And(cs) => Formula::and(cs.iter().map(eliminate_quantifiers).collect::<Result<Vec<_>>>()?),
        Formula::Or(cs) => Formula::or(cs.iter().map(eliminate_quantifiers).collect::<Result<Vec<_>>>()?),
        Formula::Exists(v, g) => exists(v, &eliminate_quantifiers(g)?)?,
        Formula::Forall(v, g) => forall(v, &eliminate_quantifiers(g)?)?,
    })
}
