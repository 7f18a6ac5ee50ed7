//! Monotonic strong chains of the discrete part.
//!
//! For a mode vector the chain condition is `∃C ∀k ∃V ∃V' G(k, C, V, V')`.
//! `G` is a conjunction in which `k` only occurs in lower bounds of
//! increasing quantities and upper bounds of decreasing ones, so it holds
//! for all `k` iff it holds for arbitrarily large `k`. For fixed `C` that is
//! an integer point of the polyhedron plus a recession direction with a
//! positive `k` component; the recession cone does not depend on `C`.
//! [`discrete_chain_exists`] decides it that way, [`discrete_chain_formula`]
//! builds the Presburger sentence for cross-checking.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::modes::{DiscreteModes, Mode};
use crate::error::Result;
use crate::formula::{Atom, Formula, LinTerm, Sort, Var};
use crate::poly::{self, Constraint};
use crate::presburger;
use crate::separation::SeparatedDisjunct;

/// `G` over the bound `k`, the constants `c`, and two copies `v`, `v1`
/// (`V`, `V'`) of the integer variables.
#[derive(Clone, Debug)]
pub struct GSystem {
    pub k: Var,
    pub consts: Vec<Var>,
    pub v: Vec<Var>,
    pub v1: Vec<Var>,
    pub atoms: Vec<Atom>,
}

impl GSystem {
    pub fn formula(&self) -> Formula {
        Formula::and(self.atoms.iter().cloned().map(Formula::Atom))
    }

    /// `G` with `k` and the constants fixed.
    pub fn at(&self, k: &BigInt, consts: &BTreeMap<Var, BigInt>) -> Vec<Atom> {
        self.atoms
            .iter()
            .filter_map(|a| {
                let mut t = a.term().clone();
                let mut c = t.take(&self.k) * k;
                for (v, val) in consts {
                    c += t.take(v) * val;
                }
                let t = t.add_constant(&c);
                let b = match a {
                    Atom::Eq(_) => Atom::Eq(t),
                    _ => Atom::Gt(t),
                };
                match b.canonical() {
                    Formula::True => None,
                    Formula::Atom(x) => Some(x),
                    _ => Some(b),
                }
            })
            .collect()
    }
}

fn copy(vars: &[Var], tag: &str) -> Vec<Var> {
    vars.iter()
        .map(|v| Var::fresh(&format!("{}.{tag}", v.name()), Sort::Int))
        .collect()
}

/// Builds `G(k, C, V, V', M)`. The mode vector is validated first.
pub fn build_g(d: &SeparatedDisjunct, m: &DiscreteModes) -> Result<GSystem> {
    m.validate(d)?;
    let y = &d.int_vars;
    let (v, v1) = (copy(y, "V"), copy(y, "V1"));
    let k = Var::fresh("k", Sort::Int);
    let kt = LinTerm::var(k.clone());
    let mut consts = Vec::new();
    let mut atoms = Vec::new();
    let constant = |name: String, consts: &mut Vec<Var>| {
        let c = Var::fresh(&name, Sort::Int);
        consts.push(c.clone());
        LinTerm::var(c)
    };
    let chain = |atoms: &mut Vec<Atom>, consts: &mut Vec<Var>, mode: Mode, a: LinTerm, b: LinTerm, name: String| {
        match mode {
            Mode::UnbInc | Mode::BddInc => {
                atoms.push(Atom::Gt(a.sub(&kt)));
                atoms.push(Atom::Gt(b.sub(&a)));
            }
            Mode::Flat => {
                let c = constant(name, consts);
                atoms.push(Atom::Eq(a.sub(&c)));
                atoms.push(Atom::Eq(b.sub(&c)));
            }
            Mode::UnbDec | Mode::BddDec => {
                atoms.push(Atom::Gt(kt.neg().sub(&a)));
                atoms.push(Atom::Gt(a.sub(&b)));
            }
        }
    };
    for i in 0..y.len() {
        let (a, b) = (LinTerm::var(v[i].clone()), LinTerm::var(v1[i].clone()));
        chain(&mut atoms, &mut consts, m.vars[i], a, b, format!("v_{}", y[i].name()));
    }
    let at = |t: &LinTerm, to: &[Var]| super::dense::rename(t, y, to);
    for (j, (l, &(mp, mq))) in d.int_ineqs.iter().zip(&m.ineqs).enumerate() {
        chain(&mut atoms, &mut consts, mp, at(&l.p, &v), at(&l.p, &v1), format!("p{j}"));
        chain(&mut atoms, &mut consts, mq, at(&l.q, &v), at(&l.q, &v1), format!("q{j}"));
    }
    // T(V, V')
    for l in &d.int_ineqs {
        atoms.push(Atom::Gt(at(&l.p, &v).add(&at(&l.q, &v1)).add_constant(&-&l.c)));
    }
    Ok(GSystem { k, consts, v, v1, atoms })
}

/// `∃C ∀k ∃V ∃V' G`, decided as an integer point plus a recession ray.
pub fn g_system_unbounded(g: &GSystem) -> Result<bool> {
    // rational relaxation first: cheap and rules out most vectors
    if !ray_exists(g)? {
        return Ok(false);
    }
    Ok(presburger::conj_model(&g.atoms)?.is_some())
}

fn ray_exists(g: &GSystem) -> Result<bool> {
    let mut cs: Vec<Constraint> = g
        .atoms
        .iter()
        .map(|a| {
            let mut t = a.term().linear_part();
            for c in &g.consts {
                t.take(c);
            }
            match a {
                Atom::Eq(_) => Constraint::eq(t),
                _ => Constraint::ge(t),
            }
        })
        .collect();
    cs.push(Constraint::ge(LinTerm::var(g.k.clone()).add_constant(&-BigInt::one())));
    poly::feasible(cs)
}

/// Whether the discrete part of `d` has a monotonic strong chain of modes `m`.
pub fn discrete_chain_exists(d: &SeparatedDisjunct, m: &DiscreteModes) -> Result<bool> {
    g_system_unbounded(&build_g(d, m)?)
}

/// The sentence `∃C ∀k ∃V ∃V' G`.
pub fn discrete_chain_formula(d: &SeparatedDisjunct, m: &DiscreteModes) -> Result<Formula> {
    let g = build_g(d, m)?;
    let inner = Formula::exists_all(g.v.iter().chain(&g.v1).cloned(), g.formula());
    Ok(Formula::exists_all(g.consts.clone(), Formula::forall(g.k.clone(), inner)))
}
