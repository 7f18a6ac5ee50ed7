//! Conjunctions of linear constraints over the reals: Fourier–Motzkin
//! projection, feasibility and exact rational witnesses.
//!
//! Unlike formula atoms, constraints here may be non-strict; the dense
//! limit computations need closures of polyhedra.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget;
use crate::error::Result;
use crate::formula::{rat, Assignment, Atom, Formula, LinTerm, RatTerm, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Eq,
    Ge,
    Gt,
}

/// `term = 0`, `term >= 0` or `term > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub term: LinTerm,
    pub kind: Kind,
}

impl Constraint {
    pub fn new(term: LinTerm, kind: Kind) -> Self {
        Constraint { term, kind }
    }

    pub fn eq(term: LinTerm) -> Self {
        Constraint::new(term, Kind::Eq)
    }

    pub fn ge(term: LinTerm) -> Self {
        Constraint::new(term, Kind::Ge)
    }

    pub fn gt(term: LinTerm) -> Self {
        Constraint::new(term, Kind::Gt)
    }

    /// `None` for congruences.
    pub fn from_atom(a: &Atom) -> Option<Constraint> {
        match a {
            Atom::Eq(t) => Some(Constraint::eq(t.clone())),
            Atom::Gt(t) => Some(Constraint::gt(t.clone())),
            Atom::Mod { .. } => None,
        }
    }

    /// Strict inequalities become non-strict.
    pub fn relaxed(&self) -> Constraint {
        match self.kind {
            Kind::Gt => Constraint::ge(self.term.clone()),
            _ => self.clone(),
        }
    }

    pub fn holds(&self, value: &BigRational) -> bool {
        match self.kind {
            Kind::Eq => value.is_zero(),
            Kind::Ge => !value.is_negative(),
            Kind::Gt => value.is_positive(),
        }
    }

    pub fn eval(&self, sigma: &Assignment) -> Result<bool> {
        Ok(self.holds(&self.term.eval(sigma)?))
    }

    pub fn to_formula(&self) -> Formula {
        match self.kind {
            Kind::Eq => Formula::eq(self.term.clone()),
            Kind::Gt => Formula::gt(self.term.clone()),
            Kind::Ge => Formula::Or(vec![
                Formula::gt(self.term.clone()),
                Formula::eq(self.term.clone()),
            ]),
        }
    }

    fn substitute(&self, v: &Var, t: &RatTerm) -> Constraint {
        let c = self.term.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.term.clone();
        rest.take(v);
        let (lin, _) = rest
            .to_rat()
            .add(&t.scale(&BigRational::from_integer(c)))
            .clear_denominators();
        Constraint::new(lin, self.kind)
    }
}

pub fn to_formula(cs: &[Constraint]) -> Formula {
    Formula::and(cs.iter().map(Constraint::to_formula))
}

#[derive(Default)]
struct Bounds {
    lo: Option<(BigRational, bool)>,
    hi: Option<(BigRational, bool)>,
    eq: Option<BigRational>,
}

/// Removes redundant parallel constraints, folds ground ones and detects
/// syntactic infeasibility (`None`).
pub fn normalize(cs: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut by_dir: BTreeMap<LinTerm, Bounds> = BTreeMap::new();
    for c in cs {
        if c.term.is_ground() {
            if !c.holds(&rat(c.term.constant().clone())) {
                return None;
            }
            continue;
        }
        let g = c.term.content();
        let neg = c.term.coeffs().values().next().is_some_and(Signed::is_negative);
        let scale = if neg { -g } else { g };
        let p = c.term.linear_part().div_exact(&scale);
        let r = BigRational::new(-c.term.constant(), scale.clone());
        let strict = c.kind == Kind::Gt;
        let b = by_dir.entry(p).or_default();
        match c.kind {
            Kind::Eq => {
                if b.eq.as_ref().is_some_and(|e| *e != r) {
                    return None;
                }
                b.eq = Some(r);
            }
            _ if scale.is_positive() => {
                let better = match &b.lo {
                    None => true,
                    Some((x, s)) => r > *x || (r == *x && strict && !s),
                };
                if better {
                    b.lo = Some((r, strict));
                }
            }
            _ => {
                let better = match &b.hi {
                    None => true,
                    Some((x, s)) => r < *x || (r == *x && strict && !s),
                };
                if better {
                    b.hi = Some((r, strict));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (p, b) in by_dir {
        let at = |r: &BigRational| RatTerm::from(&p).add_constant(&-r.clone()).clear_denominators().0;
        if let Some(e) = &b.eq {
            if let Some((l, s)) = &b.lo {
                if e < l || (e == l && *s) {
                    return None;
                }
            }
            if let Some((h, s)) = &b.hi {
                if e > h || (e == h && *s) {
                    return None;
                }
            }
            out.push(Constraint::eq(at(e)));
            continue;
        }
        if let (Some((l, ls)), Some((h, hs))) = (&b.lo, &b.hi) {
            if l > h || (l == h && (*ls || *hs)) {
                return None;
            }
            if l == h {
                out.push(Constraint::eq(at(l)));
                continue;
            }
        }
        if let Some((l, s)) = &b.lo {
            out.push(Constraint::new(at(l), if *s { Kind::Gt } else { Kind::Ge }));
        }
        if let Some((h, s)) = &b.hi {
            out.push(Constraint::new(at(h).neg(), if *s { Kind::Gt } else { Kind::Ge }));
        }
    }
    Some(out)
}

/// Projects `v` out of the conjunction. `None` means infeasible.
pub fn eliminate(cs: Vec<Constraint>, v: &Var) -> Result<Option<Vec<Constraint>>> {
    let (with, mut rest): (Vec<_>, Vec<_>) = cs.into_iter().partition(|c| c.term.mentions(v));
    if with.is_empty() {
        return Ok(Some(rest));
    }
    if let Some(eq) = with
        .iter()
        .filter(|c| c.kind == Kind::Eq)
        .min_by_key(|c| c.term.coeff(v).abs())
    {
        let a = eq.term.coeff(v);
        let mut t = eq.term.clone();
        t.take(v);
        let sol = t.to_rat().scale(&-BigRational::new(BigInt::one(), a));
        for c in &with {
            if c != eq {
                rest.push(c.substitute(v, &sol));
            }
        }
        budget::charge(1)?;
        return Ok(normalize(rest));
    }
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for c in with {
        if c.term.coeff(v).is_positive() {
            lowers.push(c);
        } else {
            uppers.push(c);
        }
    }
    budget::charge((lowers.len() * uppers.len()) as u64 + 1)?;
    for l in &lowers {
        let a = l.term.coeff(v);
        for u in &uppers {
            let b = -u.term.coeff(v);
            let t = l.term.scale(&b).add(&u.term.scale(&a));
            let kind = if l.kind == Kind::Gt || u.kind == Kind::Gt {
                Kind::Gt
            } else {
                Kind::Ge
            };
            rest.push(Constraint::new(t, kind));
        }
    }
    Ok(normalize(rest))
}

fn vars_of(cs: &[Constraint]) -> Vec<Var> {
    let mut vs: Vec<Var> = cs.iter().flat_map(|c| c.term.vars().cloned()).collect();
    vs.sort();
    vs.dedup();
    vs
}

/// Cheapest next variable: equalities first, then the smallest
/// lower×upper product.
fn pick(cs: &[Constraint], vars: &[Var]) -> Option<Var> {
    vars.iter()
        .min_by_key(|v| {
            let mut eq = false;
            let (mut lo, mut hi) = (0usize, 0usize);
            for c in cs {
                let a = c.term.coeff(v);
                if a.is_zero() {
                    continue;
                }
                if c.kind == Kind::Eq {
                    eq = true;
                } else if a.is_positive() {
                    lo += 1;
                } else {
                    hi += 1;
                }
            }
            if eq {
                (0, 0)
            } else {
                (1, lo * hi)
            }
        })
        .cloned()
}

/// Projects all of `vars` out.
pub fn project(cs: Vec<Constraint>, vars: &[Var]) -> Result<Option<Vec<Constraint>>> {
    let Some(mut cur) = normalize(cs) else {
        return Ok(None);
    };
    let mut todo: Vec<Var> = vars.to_vec();
    while !todo.is_empty() {
        let live: Vec<Var> = todo
            .iter()
            .filter(|v| cur.iter().any(|c| c.term.mentions(v)))
            .cloned()
            .collect();
        let Some(v) = pick(&cur, &live) else {
            break;
        };
        todo.retain(|w| w != &v);
        match eliminate(cur, &v)? {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

pub fn feasible(cs: Vec<Constraint>) -> Result<bool> {
    let vars = vars_of(&cs);
    Ok(project(cs, &vars)?.is_some())
}

/// An exact rational point satisfying every constraint, or `None`.
pub fn model(cs: Vec<Constraint>) -> Result<Option<Assignment>> {
    let Some(cs) = normalize(cs) else {
        return Ok(None);
    };
    let mut stages: Vec<(Var, Vec<Constraint>)> = Vec::new();
    let mut cur = cs;
    loop {
        let live = vars_of(&cur);
        let Some(v) = pick(&cur, &live) else {
            break;
        };
        let next = eliminate(cur.clone(), &v)?;
        stages.push((v, cur));
        match next {
            Some(n) => cur = n,
            None => return Ok(None),
        }
    }
    // variables that dropped out of the projection are unconstrained
    let mut sigma = Assignment::new();
    for (_, system) in &stages {
        for v in vars_of(system) {
            if !stages.iter().any(|(w, _)| *w == v) && !sigma.contains(&v) {
                sigma.insert(v, BigRational::zero())?;
            }
        }
    }
    for (v, system) in stages.iter().rev() {
        let x = pick_value(v, system, &sigma)?;
        sigma.insert(v.clone(), x)?;
    }
    Ok(Some(sigma))
}

/// A value for `v` satisfying `system` given values for all other
/// variables. The caller guarantees one exists.
fn pick_value(v: &Var, system: &[Constraint], sigma: &Assignment) -> Result<BigRational> {
    let mut lo: Option<(BigRational, bool)> = None;
    let mut hi: Option<(BigRational, bool)> = None;
    for c in system {
        let a = c.term.coeff(v);
        if a.is_zero() {
            continue;
        }
        let mut rest = c.term.clone();
        rest.take(v);
        let r = -rest.eval(sigma)? / rat(a.clone());
        let strict = c.kind == Kind::Gt;
        if c.kind == Kind::Eq {
            return Ok(r);
        }
        if a.is_positive() {
            if lo.as_ref().is_none_or(|(x, s)| r > *x || (r == *x && strict && !s)) {
                lo = Some((r, strict));
            }
        } else if hi.as_ref().is_none_or(|(x, s)| r < *x || (r == *x && strict && !s)) {
            hi = Some((r, strict));
        }
    }
    Ok(simplest_between(lo.as_ref(), hi.as_ref()))
}

/// A short rational in the interval described by optional bounds
/// `(value, strict)`; integers near zero are preferred.
pub(crate) fn simplest_between(
    lo: Option<&(BigRational, bool)>,
    hi: Option<&(BigRational, bool)>,
) -> BigRational {
    let ok = |x: &BigRational| {
        lo.is_none_or(|(l, s)| if *s { x > l } else { x >= l })
            && hi.is_none_or(|(h, s)| if *s { x < h } else { x <= h })
    };
    let zero = BigRational::zero();
    if ok(&zero) {
        return zero;
    }
    let candidates = match (lo, hi) {
        (Some((l, _)), _) if l.is_positive() || hi.is_none() => {
            vec![l.floor() + BigRational::one(), l.ceil()]
        }
        (_, Some((h, _))) => vec![h.ceil() - BigRational::one(), h.floor()],
        (Some((l, _)), None) => vec![l.floor() + BigRational::one()],
        (None, None) => vec![],
    };
    for c in candidates {
        if ok(&c) {
            return c;
        }
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                return l.clone();
            }
            // binary fractions between the bounds, coarsest first
            let mut den = BigInt::from(2);
            loop {
                let d = BigRational::from_integer(den.clone());
                let cand = (l * &d).floor() / &d + BigRational::new(BigInt::one(), den.clone());
                if ok(&cand) {
                    return cand;
                }
                if den.bits() > 64 {
                    return (l + h) / rat(2);
                }
                den *= 2;
            }
        }
        (Some((l, _)), None) => l + BigRational::one(),
        (None, Some((h, _))) => h - BigRational::one(),
        (None, None) => zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var::real("x")
    }
    fn y() -> Var {
        Var::real("y")
    }

    fn t(pairs: &[(&Var, i64)], c: i64) -> LinTerm {
        LinTerm::from_parts(pairs.iter().map(|(v, k)| ((*v).clone(), BigInt::from(*k))), c)
    }

    #[test]
    fn strict_interval_projection() {
        // 0 < x < y  projects to y > 0
        let cs = vec![Constraint::gt(t(&[(&x(), 1)], 0)), Constraint::gt(t(&[(&y(), 1), (&x(), -1)], 0))];
        let p = project(cs, &[x()]).unwrap().unwrap();
        assert_eq!(p, vec![Constraint::gt(t(&[(&y(), 1)], 0))]);
    }

    #[test]
    fn closed_point_is_feasible_open_is_not() {
        let closed = vec![Constraint::ge(t(&[(&x(), 1)], 0)), Constraint::ge(t(&[(&x(), -1)], 0))];
        assert!(feasible(closed).unwrap());
        let open = vec![Constraint::gt(t(&[(&x(), 1)], 0)), Constraint::ge(t(&[(&x(), -1)], 0))];
        assert!(!feasible(open).unwrap());
    }

    #[test]
    fn model_satisfies_constraints() {
        let cs = vec![
            Constraint::eq(t(&[(&x(), 1), (&y(), 1)], -1)),
            Constraint::gt(t(&[(&x(), 1)], 0)),
            Constraint::gt(t(&[(&y(), 1)], 0)),
        ];
        let m = model(cs.clone()).unwrap().unwrap();
        for c in &cs {
            assert!(c.eval(&m).unwrap(), "{c:?} fails at {m}");
        }
    }

    #[test]
    fn simplest_prefers_integers_then_halves() {
        let l = (rat(0), true);
        let h = (rat(1), true);
        assert_eq!(simplest_between(Some(&l), Some(&h)), BigRational::new(1.into(), 2.into()));
        let l = (BigRational::new(3.into(), 2.into()), true);
        assert_eq!(simplest_between(Some(&l), None), rat(2));
    }
}
