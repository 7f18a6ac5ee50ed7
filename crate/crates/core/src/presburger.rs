//! Presburger arithmetic: Cooper's elimination, decision and models.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::budget;
use crate::error::{Error, Result};
use crate::formula::{conj, rat, to_dnf, Assignment, Atom, Formula, LinTerm, RatTerm, Var};
use crate::qe;

fn check_int(f: &Formula) -> Result<()> {
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        if let Some(v) = a.vars().find(|v| v.is_real()) {
            bad.get_or_insert_with(|| v.clone());
        }
    });
    check_binders(f)?;
    match bad {
        Some(v) => Err(Error::Sort(format!("real variable {v} in a Presburger formula"))),
        None => Ok(()),
    }
}

fn check_binders(f: &Formula) -> Result<()> {
    match f {
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            if v.is_real() {
                return Err(Error::Sort(format!("real quantifier {v} in a Presburger formula")));
            }
            check_binders(g)
        }
        Formula::Not(g) => check_binders(g),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().try_for_each(check_binders),
        _ => Ok(()),
    }
}

/// `∃v f` for quantifier-free `f` over integer atoms.
pub fn eliminate_exists_int(v: &Var, f: &Formula) -> Result<Formula> {
    if !v.is_int() {
        return Err(Error::Sort(format!("{v} is not an integer variable")));
    }
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    check_int(f)?;
    qe::exists(v, f)
}

/// Quantifier-free equivalent of an integer formula with any prefix.
pub fn pa_qe(f: &Formula) -> Result<Formula> {
    check_int(f)?;
    qe::eliminate_quantifiers(f)
}

/// Truth of `f` with free variables read existentially.
pub fn pa_decide(f: &Formula) -> Result<bool> {
    check_int(f)?;
    let qf = qe::eliminate_quantifiers(f)?;
    Ok(crate::sat::solve(&qf, &[])?.is_some())
}

/// A satisfying integer assignment of a quantifier-free formula.
pub fn pa_model(f: &Formula) -> Result<Option<Assignment>> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    check_int(f)?;
    let Some(mut m) = crate::sat::solve(f, &[])? else {
        return Ok(None);
    };
    for v in f.free_vars() {
        if !m.contains(&v) {
            m.set_int(v, 0);
        }
    }
    Ok(Some(m))
}

/// Splits `t` into the coefficient of `v` and the remaining term.
fn split(t: &LinTerm, v: &Var) -> (BigInt, LinTerm) {
    let mut rest = t.clone();
    let a = rest.take(v);
    (a, rest)
}

fn ensure_int_atom(a: &Atom, v: &Var) -> Result<()> {
    if a.mentions(v) && !a.is_int_only() {
        return Err(Error::Internal(format!(
            "integer elimination of {v} met the mixed atom {a}"
        )));
    }
    Ok(())
}

/// Cooper's method on a negation-free formula.
pub(crate) fn cooper(v: &Var, f: &Formula) -> Result<Formula> {
    let mut err = Ok(());
    let mut l = BigInt::one();
    f.visit_atoms(&mut |a| {
        if let Err(e) = ensure_int_atom(a, v) {
            err = Err(e);
        }
        let c = a.term().coeff(v);
        if !c.is_zero() {
            l = l.lcm(&c);
        }
    });
    err?;
    // scale every atom so that v has coefficient ±l, then read l·v as v
    let mut unit = f.map_atoms(&mut |a| {
        let (c, rest) = split(a.term(), v);
        if c.is_zero() {
            return Formula::Atom(a.clone());
        }
        let m = &l / c.abs();
        let sign = if c.is_positive() { BigInt::one() } else { -BigInt::one() };
        let t = rest.scale(&m).add(&LinTerm::monomial(v.clone(), sign));
        Formula::Atom(match a {
            Atom::Eq(_) => Atom::Eq(t),
            Atom::Gt(_) => Atom::Gt(t),
            Atom::Mod {
                modulus, residue, ..
            } => Atom::modulo(t, modulus * &m, residue * &m),
        })
    });
    if !l.is_one() {
        unit = Formula::and([unit, Formula::Atom(Atom::modulo(LinTerm::var(v.clone()), l, BigInt::zero()))]);
    }

    let mut delta = BigInt::one();
    let mut lower: Vec<LinTerm> = Vec::new();
    let mut upper: Vec<LinTerm> = Vec::new();
    unit.visit_atoms(&mut |a| {
        let (c, rest) = split(a.term(), v);
        if c.is_zero() {
            return;
        }
        let pos = c.is_positive();
        match a {
            Atom::Mod { modulus, .. } => delta = delta.lcm(modulus),
            // v + r > 0: v > -r ; -v + r > 0: v < r
            Atom::Gt(_) if pos => lower.push(rest.neg()),
            Atom::Gt(_) => upper.push(rest),
            // v = -r (or v = r for -v + r)
            Atom::Eq(_) => {
                let at = if pos { rest.neg() } else { rest };
                lower.push(at.add_constant(&-BigInt::one()));
                upper.push(at.add_constant(&BigInt::one()));
            }
        }
    });
    lower.sort();
    lower.dedup();
    upper.sort();
    upper.dedup();
    let use_lower = lower.len() <= upper.len();
    let (points, dir) = if use_lower { (lower, -1) } else { (upper, 1) };

    let n = delta.to_u64().unwrap_or(u64::MAX);
    budget::charge(n.saturating_mul(points.len() as u64 + 1))?;

    // the formula at -∞ (or +∞): bounds on v collapse to constants
    let inf = unit.map_atoms_folded(&mut |a| {
        let c = a.term().coeff(v);
        match a {
            _ if c.is_zero() => Formula::Atom(a.clone()),
            Atom::Mod { .. } => Formula::Atom(a.clone()),
            Atom::Eq(_) => Formula::False,
            Atom::Gt(_) => Formula::from_bool(c.is_positive() == (dir > 0)),
        }
    });
    let mut parts = Vec::new();
    let mut j = BigInt::one();
    while j <= delta {
        let shift = if dir < 0 { j.clone() } else { -j.clone() };
        parts.push(qe::simplify(&inf.subst_unchecked(v, &RatTerm::constant_term(rat(shift.clone())))));
        for p in &points {
            let at = p.add_constant(&shift);
            let r = qe::simplify(&unit.subst_unchecked(v, &RatTerm::from(&at)));
            if r == Formula::True {
                return Ok(Formula::True);
            }
            parts.push(r);
        }
        budget::charge(1)?;
        j += 1;
    }
    Ok(Formula::or(parts))
}

/// `∃v` over a conjunction of integer atoms.
pub(crate) fn conj_exists(v: &Var, atoms: &[Atom]) -> Result<Formula> {
    let Some(atoms) = conj::simplify(atoms.to_vec()) else {
        return Ok(Formula::False);
    };
    for a in &atoms {
        ensure_int_atom(a, v)?;
    }
    let (with, rest): (Vec<Atom>, Vec<Atom>) = atoms.into_iter().partition(|a| a.mentions(v));
    if with.is_empty() {
        return Ok(Formula::and(rest.into_iter().map(Formula::Atom)));
    }
    let keep = |extra: Vec<Formula>| Formula::and(rest.iter().cloned().map(Formula::Atom).chain(extra));

    // equality: v = -t/a, with a | t
    if let Some(eq) = with
        .iter()
        .filter(|a| matches!(a, Atom::Eq(_)))
        .min_by_key(|a| a.term().coeff(v).abs())
    {
        let (a, t) = split(eq.term(), v);
        let sol = t.to_rat().scale(&-BigRational::new(BigInt::one(), a.clone()));
        let mut out = Vec::new();
        if !a.abs().is_one() {
            out.push(Atom::modulo(t.clone(), a.abs(), BigInt::zero()).canonical());
        }
        for b in &with {
            if b != eq {
                out.push(b.substitute(v, &sol).canonical());
            }
        }
        budget::charge(1)?;
        return Ok(qe::simplify(&keep(out)));
    }

    let has_mod = with.iter().any(|a| matches!(a, Atom::Mod { .. }));
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for a in &with {
        let (c, rest) = split(a.term(), v);
        if c.is_positive() {
            lowers.push((c, rest));
        } else {
            uppers.push((-c, rest));
        }
    }
    if !has_mod && (lowers.is_empty() || uppers.is_empty()) {
        return Ok(qe::simplify(&keep(vec![])));
    }
    let unit_lo = lowers.iter().all(|(c, _)| c.is_one());
    let unit_hi = uppers.iter().all(|(c, _)| c.is_one());
    if !has_mod && (unit_lo || unit_hi) {
        // exact shadow: a·v + s > 0 and -b·v + u > 0
        budget::charge((lowers.len() * uppers.len()) as u64)?;
        let mut out = Vec::new();
        for (a, s) in &lowers {
            for (b, u) in &uppers {
                let t = if unit_lo {
                    // v >= 1 - s, b·v <= u - 1  <=>  u + b·s - b > 0
                    u.add(&s.scale(b)).add_constant(&-b)
                } else {
                    // v <= u - 1, a·v >= 1 - s  <=>  a·u - a + s > 0
                    u.scale(a).add(s).add_constant(&-a)
                };
                out.push(Formula::Atom(Atom::Gt(t)));
            }
        }
        return Ok(qe::simplify(&keep(out)));
    }
    let body = Formula::and(with.into_iter().map(Formula::Atom));
    let r = cooper(v, &body)?;
    Ok(qe::simplify(&Formula::and([keep(vec![]), r])))
}

/// Satisfying assignment of a conjunction of integer atoms.
pub(crate) fn conj_model(atoms: &[Atom]) -> Result<Option<Assignment>> {
    let Some(atoms) = conj::simplify(atoms.to_vec()) else {
        return Ok(None);
    };
    let mut vars: Vec<Var> = atoms.iter().flat_map(|a| a.vars().cloned()).collect();
    vars.sort();
    vars.dedup();
    let Some(v) = pick_var(&atoms, &vars) else {
        return Ok(atoms.iter().all(|a| a.is_ground()).then(Assignment::new));
    };
    let projected = conj_exists(&v, &atoms)?;
    for c in to_dnf(&projected)? {
        budget::charge(1)?;
        if let Some(mut m) = conj_model(&c)? {
            // variables that vanished during projection are unconstrained
            for a in &atoms {
                for w in a.vars() {
                    if w != &v && !m.contains(w) {
                        m.set_int(w.clone(), 0);
                    }
                }
            }
            let x = solve_univariate(&v, &atoms, &m)?.ok_or_else(|| {
                Error::Internal(format!("no value for {v} after projection"))
            })?;
            m.set_int(v, x);
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn pick_var(atoms: &[Atom], vars: &[Var]) -> Option<Var> {
    vars.iter()
        .min_by_key(|v| {
            let mut eq = false;
            let mut md = false;
            let mut unit = true;
            let (mut lo, mut hi) = (0usize, 0usize);
            for a in atoms {
                let c = a.term().coeff(v);
                if c.is_zero() {
                    continue;
                }
                match a {
                    Atom::Eq(_) => eq = true,
                    Atom::Mod { .. } => md = true,
                    Atom::Gt(_) => {
                        if c.is_positive() {
                            lo += 1
                        } else {
                            hi += 1
                        }
                        unit &= c.abs().is_one();
                    }
                }
            }
            if eq {
                (0, 0)
            } else if !md && unit {
                (1, lo * hi)
            } else {
                (2, lo.min(hi))
            }
        })
        .cloned()
}

/// Smallest-magnitude integer for `v` satisfying all atoms once the other
/// variables take their values in `sigma`.
pub(crate) fn solve_univariate(v: &Var, atoms: &[Atom], sigma: &Assignment) -> Result<Option<BigInt>> {
    let mut period = BigInt::one();
    let mut marks: Vec<BigInt> = vec![BigInt::zero()];
    let mut reduced = Vec::new();
    for a in atoms {
        let (c, rest) = split(a.term(), v);
        let k = rest.eval(sigma)?;
        debug_assert!(k.is_integer());
        let k = k.to_integer();
        if let Atom::Mod { modulus, .. } = a {
            period = period.lcm(modulus);
        } else if !c.is_zero() {
            marks.push(BigRational::new(-&k, c.clone()).floor().to_integer());
        }
        reduced.push((a, c, k));
    }
    let ok = |x: &BigInt| {
        reduced.iter().all(|(a, c, k)| {
            let val = c * x + k;
            match a {
                Atom::Eq(_) => val.is_zero(),
                Atom::Gt(_) => val.is_positive(),
                Atom::Mod {
                    modulus, residue, ..
                } => (val - residue).mod_floor(modulus).is_zero(),
            }
        })
    };
    let reach = &period + BigInt::one();
    let mut cands: Vec<BigInt> = Vec::new();
    for m in &marks {
        let mut d = -reach.clone();
        while d <= reach {
            cands.push(m + &d);
            d += 1;
        }
    }
    cands.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    cands.dedup();
    Ok(cands.into_iter().find(|x| ok(x)))
}

#[cfg(test)]
mod tests;
