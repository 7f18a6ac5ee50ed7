//! Verification queries over mixed linear counter systems, reduced to
//! satisfiability of mixed formulas and to ω-chain existence.
//!
//! A system is given by its binary reachability `𝒯` (transitive), an
//! initial condition `I`, and property formulas over the configuration
//! variables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, LinTerm, Sort, Var};
use crate::omega::{self, Options, Report};
use crate::relation::Relation;
use crate::separation;

/// A verification query over a mixed linear counter system.
#[derive(Clone, Debug)]
pub struct System {
    /// Binary reachability (transitive).
    pub reach: Relation,
    pub step: Option<Relation>,
    pub init: Formula,
    pub live: Vec<Formula>,
    pub safe: Vec<Formula>,
    pub bounds: Vec<LinTerm>,
}

impl System {
    pub fn new(reach: Relation) -> Self {
        System {
            reach,
            step: None,
            init: Formula::True,
            live: Vec::new(),
            safe: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn with_init(mut self, init: Formula) -> Self {
        self.init = init;
        self
    }

    /// `a` is `I` or reachable from `I`.
    pub fn reachable(&self, a: &[Var]) -> Formula {
        let r = &self.reach;
        let g = r.fresh_copy("g");
        Formula::or([
            r.at(&self.init, a),
            Formula::exists_all(g.clone(), Formula::and([r.at(&self.init, &g), r.apply(&g, a)])),
        ])
    }

    fn require_transitive(&self, opts: &Options) -> Result<()> {
        if opts.check_transitivity && omega::check_transitive(&self.reach)?.is_some() {
            return Err(Error::NotTransitive);
        }
        Ok(())
    }

    fn unprimed_and_primed(&self) -> (Vec<Var>, Vec<Var>) {
        (self.reach.vars(), self.reach.primed_vars())
    }
}

/// Whether no run `c0 𝒯 c1 𝒯 … 𝒯 ck` starts in `I` with `cj ∈ Pj` for
/// the safety formulas `P1 … Pk` (true = safe).
pub fn decide_k_safety(sys: &System, opts: &Options) -> Result<bool> {
    if sys.safe.is_empty() {
        return Err(Error::Unsupported("safety query without (safe ...) formulas".into()));
    }
    sys.require_transitive(opts)?;
    let r = &sys.reach;
    let cs: Vec<Vec<Var>> = (0..=sys.safe.len()).map(|i| r.fresh_copy(&format!("c{i}"))).collect();
    let mut parts = vec![r.at(&sys.init, &cs[0])];
    for (j, p) in sys.safe.iter().enumerate() {
        parts.push(r.at(p, &cs[j + 1]));
        parts.push(r.apply(&cs[j], &cs[j + 1]));
    }
    Ok(!separation::mixed_decide(&Formula::and(parts))?)
}

/// `𝒯̂(a, b)`: `a` is reachable and some run from `a` to `b` passes
/// through each of `live` in order.
pub fn liveness_relation(sys: &System, live: &[Formula]) -> Relation {
    let r = &sys.reach;
    let (a, b) = sys.unprimed_and_primed();
    let cs: Vec<Vec<Var>> = (0..live.len()).map(|i| r.fresh_copy(&format!("c{i}"))).collect();
    let mut parts = Vec::new();
    let mut prev = a.clone();
    for (c, p) in cs.iter().zip(live) {
        parts.push(r.at(p, c));
        parts.push(r.apply(&prev, c));
        prev = c.clone();
    }
    parts.push(r.apply(&prev, &b));
    let body = Formula::and([
        sys.reachable(&a),
        Formula::exists_all(cs.into_iter().flatten(), Formula::and(parts)),
    ]);
    r.with_body(body)
}

fn chain_of(rel: &Relation, opts: &Options) -> Result<Report> {
    let inner = Options {
        check_transitivity: false,
        ..opts.clone()
    };
    omega::decide(rel, &inner)
}

/// Whether some run from `I` visits every `Pi` infinitely often.
pub fn decide_k_liveness(sys: &System, opts: &Options) -> Result<Report> {
    if sys.live.is_empty() {
        return Err(Error::Unsupported("liveness query without (live ...) formulas".into()));
    }
    sys.require_transitive(opts)?;
    chain_of(&liveness_relation(sys, &sys.live), opts)
}

/// Whether some infinite run from `I` passes through `P`.
pub fn decide_eventuality(sys: &System, p: &Formula, opts: &Options) -> Result<Report> {
    sys.require_transitive(opts)?;
    let (a, _) = sys.unprimed_and_primed();
    let init = Formula::and([sys.reachable(&a), p.clone()]);
    let shifted = System {
        init,
        ..sys.clone()
    };
    chain_of(&liveness_relation(&shifted, &[Formula::True]), opts)
}

/// `reachable(a) ∧ 𝒯(a, b) ∧ l(a) + 1 ≤ l(b)`.
pub fn growth_relation(sys: &System, l: &LinTerm) -> Relation {
    let r = &sys.reach;
    let (a, _) = sys.unprimed_and_primed();
    let lb = l.map_vars(&mut |v| v.primed());
    let body = Formula::and([
        sys.reachable(&a),
        r.body.clone(),
        Formula::ge(lb.sub(l).add_constant(&(-1).into())),
    ]);
    r.with_body(body)
}

/// Whether some infinite run from `I` has `l` unbounded above.
pub fn exists_unbounded_execution(sys: &System, l: &LinTerm, opts: &Options) -> Result<Report> {
    sys.require_transitive(opts)?;
    chain_of(&growth_relation(sys, l), opts)
}

/// Whether every `l` in `bounds` stays bounded along every infinite run.
pub fn decide_boundedness(sys: &System, opts: &Options) -> Result<bool> {
    for l in &sys.bounds {
        if exists_unbounded_execution(sys, l, opts)?.verdict.has_chain() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `∃B ∀α,β (I(α) ∧ 𝒯(α,β) → l(β) ≤ B)` for each `l` in `bounds`.
pub fn decide_reachable_bound(sys: &System, opts: &Options) -> Result<bool> {
    if sys.bounds.is_empty() {
        return Err(Error::Unsupported("bound query without (bound ...) terms".into()));
    }
    sys.require_transitive(opts)?;
    let r = &sys.reach;
    let (alpha, beta) = (r.fresh_copy("alpha"), r.fresh_copy("beta"));
    let bs: Vec<Var> = sys.bounds.iter().map(|_| Var::fresh("B", Sort::Real)).collect();
    let map: BTreeMap<Var, Var> = r.vars().into_iter().zip(beta.iter().cloned()).collect();
    let concl = Formula::and(sys.bounds.iter().zip(&bs).map(|(l, b)| {
        let lb = l.map_vars(&mut |v| map.get(v).cloned().unwrap_or_else(|| v.clone()));
        Formula::ge(LinTerm::var(b.clone()).sub(&lb))
    }));
    let body = Formula::implies(
        Formula::and([r.at(&sys.init, &alpha), r.apply(&alpha, &beta)]),
        concl,
    );
    let sentence = Formula::exists_all(bs, Formula::forall_all(alpha.into_iter().chain(beta), body));
    separation::mixed_decide(&sentence)
}

/// A relation whose variables are confined to an integer box: one
/// `(lo, hi)` per variable in declaration order.
pub fn boxed(r: &Relation, bounds: &[(i64, i64)]) -> Relation {
    assert_eq!(bounds.len(), r.dimension());
    let mut parts = vec![r.body.clone()];
    for (v, &(lo, hi)) in r.vars().iter().zip(bounds) {
        for w in [v.clone(), v.primed()] {
            let t = LinTerm::var(w);
            parts.push(Formula::ge(t.add_constant(&(-lo).into())));
            parts.push(Formula::ge(t.neg().add_constant(&hi.into())));
        }
    }
    r.with_body(Formula::and(parts))
}

/// Exhaustive test oracle for integer relations on a box: the boxed
/// relation must be transitive (checked), and then has an ω-chain iff it
/// relates some point to itself.
pub fn finite_domain_oracle(r: &Relation, bounds: &[(i64, i64)], cap: usize) -> Result<bool> {
    if !r.is_pure_int() {
        return Err(Error::Unsupported("the finite-domain oracle needs integer variables only".into()));
    }
    if bounds.len() != r.dimension() {
        return Err(Error::Unsupported("one interval per variable is required".into()));
    }
    let mut points: Vec<Vec<i64>> = vec![vec![]];
    for &(lo, hi) in bounds {
        let mut next = Vec::new();
        for p in &points {
            for x in lo..=hi {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        points = next;
        if points.len() > cap {
            return Err(Error::BoxTooLarge(format!("box has more than {cap} points")));
        }
    }
    let vars = r.vars();
    let assign = |p: &[i64]| -> Assignment {
        let mut a = Assignment::new();
        for (v, &x) in vars.iter().zip(p) {
            a.set_int(v.clone(), x);
        }
        a
    };
    let sigmas: Vec<Assignment> = points.iter().map(|p| assign(p)).collect();
    let n = sigmas.len();
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if r.holds(&sigmas[i], &sigmas[j])? {
                rows[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if rows[i][j / 64] >> (j % 64) & 1 == 1 {
                if rows[j].iter().zip(&rows[i]).any(|(rj, ri)| rj & !ri != 0) {
                    return Err(Error::NotTransitive);
                }
            }
        }
    }
    Ok((0..n).any(|i| rows[i][i / 64] >> (i % 64) & 1 == 1))
}

#[cfg(test)]
mod tests;
