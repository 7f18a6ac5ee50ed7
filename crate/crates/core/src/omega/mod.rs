//! Existence of ω-chains in transitive mixed linear relations.
//!
//! A transitive relation has an ω-chain iff one disjunct of its canonical
//! form has a monotonic strong chain for some mode vector; the dense and
//! discrete halves of a disjunct share no variables and are searched
//! independently.

mod dense;
mod discrete;
mod modes;
mod prefix;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, Var};
use crate::relation::Relation;
use crate::separation::{self, SeparatedDisjunct};

pub use dense::{build_h, dense_chain_exists, dense_chain_formula, h_system_has_limit, HSystem};
pub use discrete::{build_g, discrete_chain_exists, discrete_chain_formula, g_system_unbounded, GSystem};
pub use modes::{
    coarse_bound, dense_pairs, enumerate_dense, enumerate_discrete, enumerate_mode_vectors, mode_vector_count,
    DenseModes, DiscreteModes, Mode, ModeVector, DENSE_MODES, DISCRETE_MODES, DISCRETE_PAIRS,
};
pub use prefix::extract_prefix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    HasOmegaChain {
        disjunct: usize,
        modes: ModeVector,
        prefix: Option<Vec<Assignment>>,
    },
    NoOmegaChain,
    NotTransitive(Counterexample),
}

impl Verdict {
    pub fn has_chain(&self) -> bool {
        matches!(self, Verdict::HasOmegaChain { .. })
    }
}

/// Points `a`, `b`, `c` with `R(a,b)`, `R(b,c)` and not `R(a,c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub a: Assignment,
    pub b: Assignment,
    pub c: Assignment,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub check_transitivity: bool,
    /// Skip mode vectors in which a single-variable term disagrees with its
    /// variable.
    pub prune: bool,
    /// Length of the witness prefix to extract, if any.
    pub witness: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            check_transitivity: true,
            prune: true,
            witness: Some(5),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub disjuncts: usize,
    pub mode_vectors_checked: u64,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    /// Canonical disjuncts; `verdict`'s disjunct index points into this.
    pub disjuncts: Vec<SeparatedDisjunct>,
    pub stats: Stats,
}

/// Decides ω-chain existence and reports the search statistics.
pub fn decide(r: &Relation, opts: &Options) -> Result<Report> {
    let start = Instant::now();
    let mut stats = Stats::default();
    if opts.check_transitivity {
        if let Some(cx) = check_transitive(r)? {
            stats.elapsed_ms = start.elapsed().as_millis();
            return Ok(Report {
                verdict: Verdict::NotTransitive(cx),
                disjuncts: Vec::new(),
                stats,
            });
        }
    }
    let ds = separation::to_canonical(r)?;
    stats.disjuncts = ds.len();
    let mut verdict = Verdict::NoOmegaChain;
    for (i, d) in ds.iter().enumerate() {
        if let Some(modes) = search_disjunct(d, opts.prune, &mut stats.mode_vectors_checked)? {
            let prefix = match opts.witness {
                Some(n) => Some(prefix::prefix_for(r, d, &modes, n)?),
                None => None,
            };
            verdict = Verdict::HasOmegaChain {
                disjunct: i,
                modes,
                prefix,
            };
            break;
        }
    }
    stats.elapsed_ms = start.elapsed().as_millis();
    Ok(Report {
        verdict,
        disjuncts: ds,
        stats,
    })
}

pub fn has_omega_chain(r: &Relation, opts: &Options) -> Result<Verdict> {
    Ok(decide(r, opts)?.verdict)
}

/// First accepting mode vector of a disjunct, discrete half first.
pub fn search_disjunct(d: &SeparatedDisjunct, prune: bool, checked: &mut u64) -> Result<Option<ModeVector>> {
    let mut discrete = None;
    for m in enumerate_discrete(d, prune) {
        *checked += 1;
        if discrete_chain_exists(d, &m)? {
            discrete = Some(m);
            break;
        }
    }
    let Some(discrete) = discrete else {
        return Ok(None);
    };
    for m in enumerate_dense(d, prune) {
        *checked += 1;
        if dense_chain_exists(d, &m)? {
            return Ok(Some(ModeVector { dense: m, discrete }));
        }
    }
    Ok(None)
}

/// Copies of the relation's variables named `name.tag`.
pub(crate) fn tagged(r: &Relation, tag: &str) -> Vec<Var> {
    r.vars()
        .iter()
        .map(|v| Var::new(format!("{}.{tag}", v.name()), v.sort(), crate::formula::Role::Bound))
        .collect()
}

/// Restricts an assignment over tagged copies to the source names.
pub(crate) fn untag(r: &Relation, copy: &[Var], m: &Assignment) -> Result<Assignment> {
    let mut out = Assignment::new();
    for (v, c) in r.vars().iter().zip(copy) {
        let val = m.get(c).cloned().unwrap_or_else(num_traits::Zero::zero);
        out.insert(v.clone(), val)?;
    }
    Ok(out)
}

/// `None` if `R(a,b) ∧ R(b,c) → R(a,c)` is valid, else a counterexample.
pub fn check_transitive(r: &Relation) -> Result<Option<Counterexample>> {
    let (a, b, c) = (tagged(r, "a"), tagged(r, "b"), tagged(r, "c"));
    let f = Formula::and([
        r.apply(&a, &b),
        r.apply(&b, &c),
        Formula::not(r.apply(&a, &c)),
    ]);
    let Some(m) = separation::mixed_model(&f)? else {
        return Ok(None);
    };
    let cx = Counterexample {
        a: untag(r, &a, &m)?,
        b: untag(r, &b, &m)?,
        c: untag(r, &c, &m)?,
    };
    if !(r.holds(&cx.a, &cx.b)? && r.holds(&cx.b, &cx.c)? && !r.holds(&cx.a, &cx.c)?) {
        return Err(Error::Internal("transitivity counterexample does not check".into()));
    }
    Ok(Some(cx))
}

#[cfg(test)]
mod tests;
