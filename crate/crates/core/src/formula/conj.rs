//! Syntactic normalization of atom conjunctions.
//!
//! Atoms whose linear parts are parallel are collapsed to their tightest
//! bounds; empty intervals, clashing equalities and clashing residues are
//! reported as contradictions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Atom, Formula, LinTerm, RatTerm};

/// Bound information on a primitive linear form `p`.
#[derive(Default)]
struct Bounds {
    lo: Option<(BigRational, bool)>,
    hi: Option<(BigRational, bool)>,
    eq: Option<BigRational>,
}

fn tighter_lo(cur: &Option<(BigRational, bool)>, r: &BigRational, strict: bool) -> bool {
    match cur {
        None => true,
        Some((c, s)) => r > c || (r == c && strict && !s),
    }
}

fn tighter_hi(cur: &Option<(BigRational, bool)>, r: &BigRational, strict: bool) -> bool {
    match cur {
        None => true,
        Some((c, s)) => r < c || (r == c && strict && !s),
    }
}

/// Splits a non-ground term `t` as `scale·p + c` with `p` primitive and
/// leading coefficient positive.
fn primitive(t: &LinTerm) -> (LinTerm, BigInt) {
    let g = t.content();
    let lead_neg = t.coeffs().values().next().is_some_and(Signed::is_negative);
    let scale = if lead_neg { -g } else { g };
    (t.linear_part().div_exact(&scale), scale)
}

pub(crate) fn refuted(a: &Atom) -> bool {
    a.canonical() == Formula::False
}

pub(crate) fn contradictory(atoms: &[Atom]) -> bool {
    simplify(atoms.to_vec()).is_none()
}

/// Canonical, deduplicated and bound-tightened equivalent of the
/// conjunction, or `None` when it is syntactically unsatisfiable.
pub(crate) fn simplify(atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    let mut bounds: BTreeMap<LinTerm, Bounds> = BTreeMap::new();
    let mut mods: BTreeMap<(LinTerm, BigInt), BigInt> = BTreeMap::new();
    for a in atoms {
        let a = match a.canonical() {
            Formula::True => continue,
            Formula::False => return None,
            Formula::Atom(a) => a,
            _ => unreachable!("canonical atoms are atoms or constants"),
        };
        match a {
            Atom::Mod {
                term,
                modulus,
                residue,
            } => match mods.get(&(term.clone(), modulus.clone())) {
                Some(r) if *r != residue => return None,
                _ => {
                    mods.insert((term, modulus), residue);
                }
            },
            Atom::Eq(ref t) | Atom::Gt(ref t) => {
                let (p, scale) = primitive(t);
                // scale·p + c ⊳ 0  <=>  p ⊳' -c/scale
                let r = BigRational::new(-t.constant(), scale.clone());
                let b = bounds.entry(p).or_default();
                match a {
                    Atom::Eq(_) => {
                        if b.eq.as_ref().is_some_and(|e| *e != r) {
                            return None;
                        }
                        b.eq = Some(r);
                    }
                    _ if scale.is_positive() => {
                        if tighter_lo(&b.lo, &r, true) {
                            b.lo = Some((r, true));
                        }
                    }
                    _ => {
                        if tighter_hi(&b.hi, &r, true) {
                            b.hi = Some((r, true));
                        }
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    for (p, b) in bounds {
        if p.all_int() {
            emit_int(&p, b, &mut out)?;
        } else {
            emit_real(&p, b, &mut out)?;
        }
    }
    for ((term, modulus), residue) in mods {
        out.push(Atom::Mod {
            term,
            modulus,
            residue,
        });
    }
    Some(out)
}

fn emit_int(p: &LinTerm, b: Bounds, out: &mut Vec<Atom>) -> Option<()> {
    // integer bounds lo <= p <= hi
    let lo = b.lo.map(|(r, _)| r.floor().to_integer() + BigInt::one());
    let hi = b.hi.map(|(r, _)| r.ceil().to_integer() - BigInt::one());
    if let Some(e) = b.eq {
        if !e.is_integer() {
            return None;
        }
        let e = e.to_integer();
        if lo.as_ref().is_some_and(|l| &e < l) || hi.as_ref().is_some_and(|h| &e > h) {
            return None;
        }
        out.push(Atom::Eq(p.add_constant(&-e)));
        return Some(());
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l > h => return None,
        (Some(l), Some(h)) if l == h => out.push(Atom::Eq(p.add_constant(&-l))),
        (lo, hi) => {
            if let Some(l) = lo {
                out.push(Atom::Gt(p.add_constant(&(BigInt::one() - l))));
            }
            if let Some(h) = hi {
                out.push(Atom::Gt(p.neg().add_constant(&(h + BigInt::one()))));
            }
        }
    }
    Some(())
}

fn emit_real(p: &LinTerm, b: Bounds, out: &mut Vec<Atom>) -> Option<()> {
    let shifted = |r: &BigRational| -> LinTerm {
        RatTerm::from(p).add_constant(&-r.clone()).clear_denominators().0
    };
    if let Some(e) = b.eq {
        if let Some((l, s)) = &b.lo {
            if &e < l || (&e == l && *s) {
                return None;
            }
        }
        if let Some((h, s)) = &b.hi {
            if &e > h || (&e == h && *s) {
                return None;
            }
        }
        out.push(Atom::Eq(shifted(&e)));
        return Some(());
    }
    if let (Some((l, _)), Some((h, _))) = (&b.lo, &b.hi) {
        // all recorded bounds are strict
        if l >= h {
            return None;
        }
    }
    if let Some((l, _)) = &b.lo {
        out.push(Atom::Gt(shifted(l)));
    }
    if let Some((h, _)) = &b.hi {
        out.push(Atom::Gt(shifted(h).neg()));
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    fn y() -> Var {
        Var::int("y")
    }

    #[test]
    fn opposite_strict_bounds_clash() {
        let t = LinTerm::var(y());
        assert!(contradictory(&[Atom::Gt(t.clone()), Atom::Gt(t.neg())]));
        let x = LinTerm::var(Var::real("x"));
        assert!(contradictory(&[Atom::Gt(x.clone()), Atom::Gt(x.neg())]));
        assert!(!contradictory(&[Atom::Gt(x.clone()), Atom::Gt(x.neg().add_constant(&1.into()))]));
    }

    #[test]
    fn integer_bounds_meet_in_equality() {
        // y > 2 and y < 4 is y = 3
        let t = LinTerm::var(y());
        let out = simplify(vec![
            Atom::Gt(t.add_constant(&(-2).into())),
            Atom::Gt(t.neg().add_constant(&4.into())),
        ])
        .unwrap();
        assert_eq!(out, vec![Atom::Eq(t.add_constant(&(-3).into()))]);
    }

    #[test]
    fn tightest_bound_survives() {
        let t = LinTerm::var(y());
        let out = simplify(vec![
            Atom::Gt(t.add_constant(&(-2).into())),
            Atom::Gt(t.scale(&2.into()).add_constant(&(-9).into())),
        ])
        .unwrap();
        // 2y > 9 is y >= 5
        assert_eq!(out, vec![Atom::Gt(t.add_constant(&(-4).into()))]);
    }

    #[test]
    fn residues_clash() {
        let t = LinTerm::var(y());
        assert!(contradictory(&[
            Atom::modulo(t.clone(), 2.into(), 0.into()),
            Atom::modulo(t, 2.into(), 1.into()),
        ]));
    }

    #[test]
    fn real_equality_outside_bounds() {
        let x = LinTerm::var(Var::real("x"));
        assert!(contradictory(&[Atom::Eq(x.clone()), Atom::Gt(x.clone())]));
        assert!(!contradictory(&[
            Atom::Eq(x.scale(&2.into()).add_constant(&(-1).into())),
            Atom::Gt(x.clone()),
        ]));
    }
}
