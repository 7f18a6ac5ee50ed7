//! Mixed linear formulas over typed real and integer variables.
//!
//! Atoms are `t = 0`, `t > 0` and `t ≡ r (mod d)` over integer-coefficient
//! linear forms; everything else is Boolean structure and quantifiers.

mod assignment;
mod atom;
pub(crate) mod conj;
mod eval;
mod term;
mod var;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use assignment::Assignment;
pub use atom::{compare, normalize_atom, Atom, Rel};
#[allow(unused_imports)]
pub(crate) use atom::ceil_div;
pub use eval::Evaluator;
pub use term::{LinTerm, RatTerm};
pub(crate) use term::rat;
pub use var::{Role, Sort, Var};

use crate::budget;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn from_bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn eq(t: LinTerm) -> Formula {
        Formula::Atom(Atom::Eq(t))
    }

    pub fn gt(t: LinTerm) -> Formula {
        Formula::Atom(Atom::Gt(t))
    }

    /// `t >= 0`, integer-shifted when `t` is integer-valued.
    pub fn ge(t: LinTerm) -> Formula {
        if t.all_int() {
            Formula::gt(t.add_constant(&1.into()))
        } else {
            Formula::Or(vec![Formula::gt(t.clone()), Formula::eq(t)])
        }
    }

    /// Conjunction with flattening and constant folding.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(cs) => out.extend(cs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with flattening and constant folding.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(cs) => out.extend(cs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = Var>, f: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall_all(vars: impl IntoIterator<Item = Var>, f: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::forall(v, acc))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect_free(bound, out);
                }
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                bound.push(v.clone());
                g.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => a.mentions(v),
            Formula::Not(g) => g.mentions(v),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(|c| c.mentions(v)),
            Formula::Exists(w, g) | Formula::Forall(w, g) => w != v && g.mentions(v),
        }
    }

    /// Visits every atom, including those under quantifiers.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.visit_atoms(f);
                }
            }
        }
    }

    /// Structure-preserving map over atoms.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Same as [`Formula::map_atoms`] but rebuilds with the folding
    /// constructors.
    pub(crate) fn map_atoms_folded(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms_folded(f)),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.map_atoms_folded(f))),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.map_atoms_folded(f))),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_atoms_folded(f)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.map_atoms_folded(f)),
        }
    }

    /// Simultaneous renaming of free variables. Binders are left alone; the
    /// caller must not map anything onto a bound name.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.map_vars(&mut |v| map.get(v).unwrap_or(v).clone())),
            Formula::Not(g) => Formula::Not(Box::new(g.rename(map))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.rename(map)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.rename(map)).collect()),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let inner = if map.contains_key(v) {
                    let mut m = map.clone();
                    m.remove(v);
                    g.rename(&m)
                } else {
                    g.rename(map)
                };
                match self {
                    Formula::Exists(..) => Formula::Exists(v.clone(), Box::new(inner)),
                    _ => Formula::Forall(v.clone(), Box::new(inner)),
                }
            }
        }
    }

    /// Alpha-renames every binder to a fresh variable.
    pub fn freshen_binders(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(g) => Formula::Not(Box::new(g.freshen_binders())),
            Formula::And(cs) => Formula::And(cs.iter().map(Formula::freshen_binders).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(Formula::freshen_binders).collect()),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let w = Var::fresh(v.name(), v.sort());
                let body = g.rename(&BTreeMap::from([(v.clone(), w.clone())])).freshen_binders();
                match self {
                    Formula::Exists(..) => Formula::Exists(w, Box::new(body)),
                    _ => Formula::Forall(w, Box::new(body)),
                }
            }
        }
    }

    /// Capture-avoiding substitution `self[v := t]`, renormalizing atoms.
    ///
    /// An integer `v` may only be replaced by a term over integer variables.
    pub fn substitute(&self, v: &Var, t: &RatTerm) -> Result<Formula> {
        if v.is_int() && t.vars().any(Var::is_real) {
            return Err(Error::Sort(format!(
                "cannot substitute a real-valued term for integer variable {v}"
            )));
        }
        Ok(self.subst_unchecked(v, t))
    }

    pub(crate) fn subst_unchecked(&self, v: &Var, t: &RatTerm) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => {
                if a.mentions(v) {
                    a.substitute(v, t).canonical()
                } else {
                    self.clone()
                }
            }
            Formula::Not(g) => Formula::not(g.subst_unchecked(v, t)),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.subst_unchecked(v, t))),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.subst_unchecked(v, t))),
            Formula::Exists(w, g) | Formula::Forall(w, g) => {
                if w == v {
                    return self.clone();
                }
                let (w, g) = if t.vars().any(|x| x == w) {
                    let fresh = Var::fresh(w.name(), w.sort());
                    let g = g.rename(&BTreeMap::from([(w.clone(), fresh.clone())]));
                    (fresh, g)
                } else {
                    (w.clone(), (**g).clone())
                };
                let body = g.subst_unchecked(v, t);
                match self {
                    Formula::Exists(..) => Formula::exists(w, body),
                    _ => Formula::forall(w, body),
                }
            }
        }
    }

    pub fn evaluate(&self, sigma: &Assignment) -> Result<bool> {
        Evaluator::default().eval(self, sigma)
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.size(),
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
        }
    }
}

/// Negation normal form: no `Not` remains. Negated atoms are rewritten by
/// sort (integer `¬(t>0)` is `-t+1 > 0`, real `¬(t>0)` is `-t>0 ∨ t=0`,
/// `¬(t=0)` is `t>0 ∨ -t>0`, a negated congruence lists the other residues).
pub fn push_negations(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match (f, neg) {
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Atom(a), false) => Formula::Atom(a.clone()),
        (Formula::Atom(a), true) => a.negate(),
        (Formula::Not(g), _) => nnf(g, !neg),
        (Formula::And(cs), false) => Formula::And(cs.iter().map(|c| nnf(c, false)).collect()),
        (Formula::And(cs), true) => Formula::Or(cs.iter().map(|c| nnf(c, true)).collect()),
        (Formula::Or(cs), false) => Formula::Or(cs.iter().map(|c| nnf(c, false)).collect()),
        (Formula::Or(cs), true) => Formula::And(cs.iter().map(|c| nnf(c, true)).collect()),
        (Formula::Exists(v, g), false) => Formula::Exists(v.clone(), Box::new(nnf(g, false))),
        (Formula::Exists(v, g), true) => Formula::Forall(v.clone(), Box::new(nnf(g, true))),
        (Formula::Forall(v, g), false) => Formula::Forall(v.clone(), Box::new(nnf(g, false))),
        (Formula::Forall(v, g), true) => Formula::Exists(v.clone(), Box::new(nnf(g, true))),
    }
}

/// Disjunctive normal form of a quantifier-free formula (negations are
/// pushed first). Conjunctions that are contradictory on their face are
/// dropped.
pub fn to_dnf(f: &Formula) -> Result<Vec<Vec<Atom>>> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    dnf(&push_negations(f))
}

fn dnf(f: &Formula) -> Result<Vec<Vec<Atom>>> {
    Ok(match f {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Atom(a) => {
            if conj::refuted(a) {
                vec![]
            } else {
                vec![vec![a.clone()]]
            }
        }
        Formula::Or(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(dnf(c)?);
            }
            out
        }
        Formula::And(cs) => {
            let mut acc: Vec<Vec<Atom>> = vec![vec![]];
            for c in cs {
                let part = dnf(c)?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for left in &acc {
                    for right in &part {
                        budget::charge(1)?;
                        let mut merged = left.clone();
                        for a in right {
                            if !merged.contains(a) {
                                merged.push(a.clone());
                            }
                        }
                        if !conj::contradictory(&merged) {
                            next.push(merged);
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Formula::Not(_) | Formula::Exists(..) | Formula::Forall(..) => {
            unreachable!("dnf input is negation normal and quantifier-free")
        }
    })
}

pub fn dnf_to_formula(dnf: &[Vec<Atom>]) -> Formula {
    Formula::or(
        dnf.iter()
            .map(|c| Formula::and(c.iter().cloned().map(Formula::Atom))),
    )
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
