//! Finite prefixes of strong chains.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::discrete::build_g;
use super::modes::ModeVector;
use crate::error::{Error, Result};
use crate::formula::{Assignment, LinTerm, Sort, Var};
use crate::poly::{self, Constraint};
use crate::presburger;
use crate::relation::Relation;
use crate::separation::SeparatedDisjunct;

fn int_of(m: &Assignment, v: &Var) -> BigInt {
    m.get(v).map(|x| x.to_integer()).unwrap_or_default()
}

/// Integer parts of an `n`-prefix, following the constructive proof: pick
/// `V, V'` from `G` for growing `k` with the constants fixed.
fn discrete_prefix(d: &SeparatedDisjunct, modes: &ModeVector, n: usize) -> Result<Vec<Assignment>> {
    let g = build_g(d, &modes.discrete)?;
    let m0 = presburger::conj_model(&g.atoms)?
        .ok_or_else(|| Error::Internal("accepted discrete modes have no solution".into()))?;
    let consts: BTreeMap<Var, BigInt> = g.consts.iter().map(|c| (c.clone(), int_of(&m0, c))).collect();
    let mut k = BigInt::zero();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let m = presburger::conj_model(&g.at(&k, &consts))?
            .ok_or_else(|| Error::Internal(format!("no chain step for k = {k}")))?;
        let mut point = Assignment::new();
        let mut next = Assignment::new();
        for ((y, v), v1) in d.int_vars.iter().zip(&g.v).zip(&g.v1) {
            point.set_int(y.clone(), int_of(&m, v));
            let w = int_of(&m, v1);
            next.set_int(y.clone(), w.clone());
            next.set_int(y.primed(), w);
        }
        out.push(point);
        let mut bound = k.clone();
        for l in &d.int_ineqs {
            for t in [&l.p, &l.q] {
                let val = t.eval(&next)?.to_integer().abs();
                if val > bound {
                    bound = val;
                }
            }
        }
        k = bound + 1;
    }
    Ok(out)
}

/// Fractional parts of an `n`-prefix: any model of the pairwise dense
/// constraints on `[0,1)`.
fn dense_prefix(d: &SeparatedDisjunct, n: usize) -> Result<Vec<Assignment>> {
    let m = d.frac_vars.len();
    if m == 0 {
        return Ok(vec![Assignment::new(); n]);
    }
    let copies: Vec<Vec<Var>> = (0..n)
        .map(|i| {
            d.frac_vars
                .iter()
                .map(|v| Var::fresh(&format!("{}.{i}", v.name()), Sort::Real))
                .collect()
        })
        .collect();
    let mut cs = Vec::new();
    for c in &copies {
        for v in c {
            let x = LinTerm::var(v.clone());
            cs.push(Constraint::ge(x.clone()));
            cs.push(Constraint::gt(x.neg().add_constant(&BigInt::from(1))));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let side = |l: &crate::separation::Linear| {
                super::dense::rename(&l.p, &d.frac_vars, &copies[i])
                    .add(&super::dense::rename(&l.q, &d.frac_vars, &copies[j]))
                    .add_constant(&-&l.c)
            };
            cs.extend(d.dense_eqs.iter().map(|l| Constraint::eq(side(l))));
            cs.extend(d.dense_ineqs.iter().map(|l| Constraint::gt(side(l))));
        }
    }
    let model = poly::model(cs)?.ok_or_else(|| Error::Internal("dense prefix constraints are infeasible".into()))?;
    Ok(copies
        .iter()
        .map(|c| {
            d.frac_vars
                .iter()
                .zip(c)
                .map(|(x, u)| (x.clone(), model.get(u).cloned().unwrap_or_else(BigRational::zero)))
                .collect()
        })
        .collect())
}

/// An `n`-prefix of a strong chain of `r` through disjunct `d` under
/// accepted modes, each pair checked against `r`.
pub fn extract_prefix(r: &Relation, d: &SeparatedDisjunct, modes: &ModeVector, n: usize) -> Result<Vec<Assignment>> {
    prefix_for(r, d, modes, n)
}

pub(crate) fn prefix_for(r: &Relation, d: &SeparatedDisjunct, modes: &ModeVector, n: usize) -> Result<Vec<Assignment>> {
    let ints = discrete_prefix(d, modes, n)?;
    let fracs = dense_prefix(d, n)?;
    let mut out = Vec::with_capacity(n);
    for (a, b) in ints.iter().zip(&fracs) {
        let mut p = a.clone();
        p.extend(b);
        out.push(d.lift(&p)?);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !r.holds(&out[i], &out[j])? {
                return Err(Error::Internal(format!(
                    "extracted prefix fails the relation at positions {i} and {j}: {} then {}",
                    out[i], out[j]
                )));
            }
        }
    }
    Ok(out)
}
