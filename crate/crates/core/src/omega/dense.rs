//! Monotonic strong chains of the dense part.
//!
//! For a mode vector the chain condition is
//! `∃U∈[0,1]^m ∀δ>0 ∃U'∈[0,1)^m ∀δ'>0 ∃U''∈[0,1)^m (H(U,U',U'') ∧ |U'-U|<δ ∧ |U''-U|<δ')`.
//! [`dense_chain_exists`] decides it on polyhedra: the innermost block says
//! that `U` lies in the closure of the (convex) set of admissible `U''`,
//! which for a nonempty set is its system with strict inequalities relaxed.
//! The same step handles `U'`. [`dense_chain_formula`] builds the formula
//! itself for cross-checking with the real engine.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::modes::{DenseModes, Mode};
use crate::error::Result;
use crate::formula::{Formula, LinTerm, Sort, Var};
use crate::poly::{self, Constraint};
use crate::separation::SeparatedDisjunct;

/// `H` as a constraint system over three copies of the fractional
/// variables: `u` (the limit), `u1` (`U'`) and `u2` (`U''`).
#[derive(Clone, Debug)]
pub struct HSystem {
    pub u: Vec<Var>,
    pub u1: Vec<Var>,
    pub u2: Vec<Var>,
    pub constraints: Vec<Constraint>,
}

impl HSystem {
    pub fn formula(&self) -> Formula {
        poly::to_formula(&self.constraints)
    }
}

fn copy(vars: &[Var], tag: &str) -> Vec<Var> {
    vars.iter()
        .map(|v| Var::fresh(&format!("{}.{tag}", v.name()), Sort::Real))
        .collect()
}

/// `t` with every (primed or unprimed) fractional variable replaced by its
/// copy in `to`.
pub(crate) fn rename(t: &LinTerm, from: &[Var], to: &[Var]) -> LinTerm {
    let map: BTreeMap<Var, &Var> = from.iter().cloned().zip(to).collect();
    t.map_vars(&mut |v| map.get(&v.unprimed()).map(|w| (*w).clone()).unwrap_or_else(|| v.clone()))
}

/// `a ⊲ b ⊲ c` for the three values of a term along the chain.
fn chain3(out: &mut Vec<Constraint>, mode: Mode, first: LinTerm, second: LinTerm, limit: LinTerm) {
    match mode {
        Mode::BddInc | Mode::UnbInc => {
            out.push(Constraint::gt(second.sub(&first)));
            out.push(Constraint::gt(limit.sub(&second)));
        }
        Mode::Flat => {
            out.push(Constraint::eq(second.sub(&first)));
            out.push(Constraint::eq(limit.sub(&second)));
        }
        Mode::BddDec | Mode::UnbDec => {
            out.push(Constraint::gt(first.sub(&second)));
            out.push(Constraint::gt(second.sub(&limit)));
        }
    }
}

/// Whether the inequality case `(M(P), M(Q))` only yields `P(U)+Q(U) ≥ c`
/// in the limit.
fn weak_limit(p: Mode, q: Mode) -> bool {
    matches!(
        (p, q),
        (Mode::Flat, Mode::BddDec) | (Mode::BddDec, Mode::BddInc) | (Mode::BddDec, Mode::Flat) | (Mode::BddDec, Mode::BddDec)
    )
}

/// Builds `H(U, U', U'', M)`. The mode vector is validated first.
pub fn build_h(d: &SeparatedDisjunct, m: &DenseModes) -> Result<HSystem> {
    m.validate(d)?;
    let x = &d.frac_vars;
    let (u, u1, u2) = (copy(x, "U"), copy(x, "U1"), copy(x, "U2"));
    let mut cs = Vec::new();
    for i in 0..x.len() {
        let (a, b, c) = (LinTerm::var(u1[i].clone()), LinTerm::var(u2[i].clone()), LinTerm::var(u[i].clone()));
        match m.vars[i] {
            Mode::BddInc => {
                cs.push(Constraint::gt(b.sub(&a)));
                cs.push(Constraint::ge(c.sub(&b)));
            }
            Mode::Flat => {
                cs.push(Constraint::eq(b.sub(&a)));
                cs.push(Constraint::eq(c.sub(&b)));
            }
            _ => {
                cs.push(Constraint::gt(a.sub(&b)));
                cs.push(Constraint::ge(b.sub(&c)));
            }
        }
    }
    let at = |t: &LinTerm, to: &[Var]| rename(t, x, to);
    let terms = |t: &LinTerm| (at(t, &u1), at(t, &u2), at(t, &u));
    for l in &d.dense_eqs {
        let limit = at(&l.p, &u).add(&at(&l.q, &u)).add_constant(&-&l.c);
        cs.push(Constraint::eq(limit));
        let (p1, p2, p0) = terms(&l.p);
        chain3(&mut cs, Mode::Flat, p1, p2, p0);
        let (q1, q2, q0) = terms(&l.q);
        chain3(&mut cs, Mode::Flat, q1, q2, q0);
    }
    for (l, &(mp, mq)) in d.dense_ineqs.iter().zip(&m.ineqs) {
        let (p1, p2, p0) = terms(&l.p);
        chain3(&mut cs, mp, p1, p2, p0);
        let (q1, q2, q0) = terms(&l.q);
        chain3(&mut cs, mq, q1, q2, q0);
        let limit = at(&l.p, &u).add(&at(&l.q, &u)).add_constant(&-&l.c);
        cs.push(if weak_limit(mp, mq) { Constraint::ge(limit) } else { Constraint::gt(limit) });
    }
    Ok(HSystem { u, u1, u2, constraints: cs })
}

fn half_open(v: &Var) -> [Constraint; 2] {
    let x = LinTerm::var(v.clone());
    [Constraint::ge(x.clone()), Constraint::gt(x.neg().add_constant(&BigInt::one()))]
}

fn closed(v: &Var) -> [Constraint; 2] {
    let x = LinTerm::var(v.clone());
    [Constraint::ge(x.clone()), Constraint::ge(x.neg().add_constant(&BigInt::one()))]
}

/// Relaxes `cs` and substitutes `to` for `from`.
fn closure_at(cs: &[Constraint], from: &[Var], to: &[Var]) -> Vec<Constraint> {
    let map: BTreeMap<Var, Var> = from.iter().cloned().zip(to.iter().cloned()).collect();
    cs.iter()
        .map(|c| {
            let r = c.relaxed();
            Constraint::new(r.term.map_vars(&mut |v| map.get(v).cloned().unwrap_or_else(|| v.clone())), r.kind)
        })
        .collect()
}

/// `∃U ∀δ ∃U' ∀δ' ∃U''` of the H-system, decided on polyhedra.
pub fn h_system_has_limit(h: &HSystem) -> Result<bool> {
    // A(U, U') = { U'' ∈ [0,1)^m : H }
    let mut a = h.constraints.clone();
    a.extend(h.u2.iter().flat_map(half_open));
    let Some(mut phi) = poly::project(a.clone(), &h.u2)? else {
        return Ok(false);
    };
    phi.extend(closure_at(&a, &h.u2, &h.u));
    // B(U) = { U' ∈ [0,1)^m : Φ(U, U') }
    let mut b = phi;
    b.extend(h.u1.iter().flat_map(half_open));
    let Some(mut psi) = poly::project(b.clone(), &h.u1)? else {
        return Ok(false);
    };
    psi.extend(closure_at(&b, &h.u1, &h.u));
    psi.extend(h.u.iter().flat_map(closed));
    poly::feasible(psi)
}

/// Whether the dense part of `d` has a monotonic strong chain of modes `m`.
pub fn dense_chain_exists(d: &SeparatedDisjunct, m: &DenseModes) -> Result<bool> {
    h_system_has_limit(&build_h(d, m)?)
}

/// The closed chain formula for `(d, m)` as a real sentence.
pub fn dense_chain_formula(d: &SeparatedDisjunct, m: &DenseModes) -> Result<Formula> {
    let h = build_h(d, m)?;
    let delta = Var::fresh("delta", Sort::Real);
    let delta2 = Var::fresh("delta", Sort::Real);
    let near = |w: &[Var], e: &Var| {
        Formula::and(w.iter().zip(&h.u).flat_map(|(a, b)| {
            let diff = LinTerm::var(a.clone()).sub(&LinTerm::var(b.clone()));
            let e = LinTerm::var(e.clone());
            [Formula::gt(e.sub(&diff)), Formula::gt(e.add(&diff))]
        }))
    };
    let dom = |w: &[Var], cl: bool| {
        poly::to_formula(&w.iter().flat_map(|v| if cl { closed(v) } else { half_open(v) }).collect::<Vec<_>>())
    };
    let inner = Formula::exists_all(
        h.u2.clone(),
        Formula::and([dom(&h.u2, false), h.formula(), near(&h.u2, &delta2)]),
    );
    let mid = Formula::exists_all(
        h.u1.clone(),
        Formula::and([
            dom(&h.u1, false),
            near(&h.u1, &delta),
            Formula::forall(delta2.clone(), Formula::implies(Formula::gt(LinTerm::var(delta2)), inner)),
        ]),
    );
    Ok(Formula::exists_all(
        h.u.clone(),
        Formula::and([
            dom(&h.u, true),
            Formula::forall(delta.clone(), Formula::implies(Formula::gt(LinTerm::var(delta)), mid)),
        ]),
    ))
}
