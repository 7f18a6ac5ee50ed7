//! Separation of mixed formulas into pure-real and pure-integer atoms.
//!
//! Every real variable `x` is written `x.int + x.frac` with an integer part
//! and a fractional part in `[0, 1)`. An atom `F + T ⊲ 0` whose real part
//! `F` is a combination of fractional parts and whose remainder `T` is
//! integer-valued is split on the integer floor of `F`, which ranges over a
//! finite interval determined by the coefficients of `F`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget;
use crate::error::{Error, Result};
use crate::formula::{conj, push_negations, to_dnf, Assignment, Atom, Formula, LinTerm, RatTerm, Role, Sort, Var};
use crate::qe;
use crate::relation::Relation;

/// A real variable and its integer and fractional parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SplitVar {
    pub original: Var,
    pub int_part: Var,
    pub frac_part: Var,
}

impl SplitVar {
    /// Split of a real variable; the parts keep its role, so the split of
    /// `x'` is the primed partner of the split of `x`.
    pub fn of(x: &Var) -> SplitVar {
        assert!(x.is_real(), "only real variables are split");
        SplitVar {
            original: x.clone(),
            int_part: Var::new(format!("{}.int", x.name()), Sort::Int, x.role()),
            frac_part: Var::new(format!("{}.frac", x.name()), Sort::Real, x.role()),
        }
    }

    pub fn primed(&self) -> SplitVar {
        SplitVar {
            original: self.original.primed(),
            int_part: self.int_part.primed(),
            frac_part: self.frac_part.primed(),
        }
    }

    /// `int_part + frac_part`.
    pub fn sum(&self) -> RatTerm {
        let mut t = RatTerm::var(self.int_part.clone());
        t.add_monomial(self.frac_part.clone(), BigRational::one());
        t
    }

    /// `0 ≤ frac_part < 1`.
    pub fn domain(&self) -> Formula {
        frac_domain(&self.frac_part)
    }
}

pub(crate) fn frac_domain(v: &Var) -> Formula {
    let x = LinTerm::var(v.clone());
    Formula::and([
        Formula::ge(x.clone()),
        Formula::gt(x.neg().add_constant(&BigInt::one())),
    ])
}

/// Separates a quantifier-free formula whose real variables are all
/// fractional parts listed in `splits`.
pub fn separate_qf(f: &Formula, splits: &[SplitVar]) -> Result<Formula> {
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    let fracs: BTreeSet<&Var> = splits.iter().map(|s| &s.frac_part).collect();
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        if let Some(v) = a.vars().find(|v| v.is_real() && !fracs.contains(v)) {
            bad.get_or_insert_with(|| v.clone());
        }
    });
    if let Some(v) = bad {
        return Err(Error::Sort(format!("real variable {v} is not a fractional part")));
    }
    let mut err = None;
    let out = push_negations(f).map_atoms_folded(&mut |a| match separate_atom(a) {
        Ok(g) => g,
        Err(e) => {
            err.get_or_insert(e);
            Formula::False
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Equivalent of one atom, under `0 ≤ v < 1` for its real variables, as a
/// Boolean combination of pure atoms.
pub(crate) fn separate_atom(a: &Atom) -> Result<Formula> {
    let t = a.term();
    if !t.has_real() || !t.has_int() {
        return Ok(Formula::Atom(a.clone()));
    }
    let (frac, int) = split_term(t);
    let (Atom::Gt(_) | Atom::Eq(_)) = a else {
        return Err(Error::Sort(format!("congruence over real variables: {a}")));
    };
    let neg_sum: BigInt = frac.coeffs().values().filter(|c| c.is_negative()).sum();
    let pos_sum: BigInt = frac.coeffs().values().filter(|c| c.is_positive()).sum();
    let has_neg = neg_sum.is_negative();
    let has_pos = pos_sum.is_positive();
    // F lies in [lo, hi] with the ends open when some coefficient can only
    // approach them
    let (lo, hi) = (neg_sum, pos_sum);
    let mut parts = Vec::new();
    let mut k = lo.clone();
    while k <= hi {
        budget::charge(1)?;
        let below_k = frac.add_constant(&-&k);
        let int_k = int.add_constant(&k);
        match a {
            Atom::Eq(_) => {
                if !(k == lo && has_neg || k == hi && has_pos) {
                    parts.push(Formula::and([Formula::eq(below_k), Formula::eq(int_k)]));
                }
            }
            Atom::Gt(_) => {
                let k1 = &k + 1;
                if !(k == hi && has_pos) {
                    let upper_implied = k1 > hi || (k1 == hi && has_pos);
                    let upper = if upper_implied {
                        Formula::True
                    } else {
                        Formula::gt(frac.neg().add_constant(&k1))
                    };
                    let lower = if k == lo { Formula::True } else { Formula::ge(below_k.clone()) };
                    parts.push(Formula::and([lower, upper.clone(), Formula::gt(int_k.clone())]));
                    let strict = if k == lo && has_neg { Formula::True } else { Formula::gt(below_k) };
                    parts.push(Formula::and([strict, upper, Formula::eq(int_k)]));
                }
            }
            Atom::Mod { .. } => unreachable!(),
        }
        k += 1;
    }
    Ok(qe::simplify(&Formula::or(parts)))
}

/// Real part (no constant) and integer part (with the constant) of a term.
fn split_term(t: &LinTerm) -> (LinTerm, LinTerm) {
    let mut frac = LinTerm::zero();
    let mut int = LinTerm::constant_term(t.constant().clone());
    for (v, c) in t.coeffs() {
        if v.is_real() {
            frac.add_monomial(v.clone(), c.clone());
        } else {
            int.add_monomial(v.clone(), c.clone());
        }
    }
    (frac, int)
}

/// Replaces every real variable, free or bound, by its split and separates
/// the atoms. Bound reals get their domain constraint at the binder.
fn split_all(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => {
            let mut g = Formula::Atom(a.clone());
            for v in a.vars().filter(|v| v.is_real()) {
                g = g.subst_unchecked(v, &SplitVar::of(v).sum());
            }
            let Formula::Atom(b) = &g else {
                return Ok(g);
            };
            separate_atom(b)?
        }
        Formula::Not(g) => Formula::not(split_all(g)?),
        Formula::And(cs) => Formula::and(cs.iter().map(|c| split_all(c)).collect::<Result<Vec<_>>>()?),
        Formula::Or(cs) => Formula::or(cs.iter().map(|c| split_all(c)).collect::<Result<Vec<_>>>()?),
        Formula::Exists(v, g) if v.is_real() => {
            let s = SplitVar::of(v);
            let body = Formula::and([s.domain(), split_all(g)?]);
            Formula::exists(s.int_part, Formula::exists(s.frac_part, body))
        }
        Formula::Forall(v, g) if v.is_real() => {
            let s = SplitVar::of(v);
            let body = Formula::implies(s.domain(), split_all(g)?);
            Formula::forall(s.int_part, Formula::forall(s.frac_part, body))
        }
        Formula::Exists(v, g) => Formula::exists(v.clone(), split_all(g)?),
        Formula::Forall(v, g) => Formula::forall(v.clone(), split_all(g)?),
    })
}

/// Quantifier-free separated equivalent of a mixed formula together with
/// the splits of its free real variables. The domain constraints of those
/// splits are conjoined when `attach_domain` is set.
pub(crate) fn mixed_qe_with(f: &Formula, attach_domain: bool) -> Result<(Formula, Vec<SplitVar>)> {
    let g = split_all(&f.freshen_binders())?;
    let mut out = qe::eliminate_quantifiers(&g)?;
    let splits: Vec<SplitVar> = f.free_vars().iter().filter(|v| v.is_real()).map(SplitVar::of).collect();
    if attach_domain {
        out = Formula::and(splits.iter().map(SplitVar::domain).chain([out]));
    }
    Ok((qe::simplify(&push_negations(&out)), splits))
}

/// Quantifier-free separated equivalent of a mixed formula. Free real
/// variables appear through their splits, whose domain constraints are
/// part of the result.
pub fn mixed_qe(f: &Formula) -> Result<Formula> {
    Ok(mixed_qe_with(f, true)?.0)
}

/// A model of a mixed formula (free variables read existentially), with
/// real variables reported by value.
pub fn mixed_model(f: &Formula) -> Result<Option<Assignment>> {
    let (qf, splits) = mixed_qe_with(f, false)?;
    let fracs: Vec<Var> = splits.iter().map(|s| s.frac_part.clone()).collect();
    let Some(m) = crate::sat::solve(&qf, &fracs)? else {
        return Ok(None);
    };
    let mut out = Assignment::new();
    for v in f.free_vars() {
        if v.is_real() {
            let s = SplitVar::of(&v);
            let i = m.get(&s.int_part).cloned().unwrap_or_else(BigRational::zero);
            let x = m.get(&s.frac_part).cloned().unwrap_or_else(BigRational::zero);
            out.insert(v, i + x)?;
        } else {
            let y = m.get(&v).cloned().unwrap_or_else(BigRational::zero);
            out.insert(v, y)?;
        }
    }
    Ok(Some(out))
}

/// Truth of a mixed formula with free variables read existentially.
pub fn mixed_decide(f: &Formula) -> Result<bool> {
    Ok(mixed_model(f)?.is_some())
}

/// One mod-free branch of a conjunction: the variables in `residues` now
/// denote quotients, the original value being `modulus · y + residue`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueBranch {
    pub atoms: Vec<Atom>,
    pub modulus: BigInt,
    pub residues: BTreeMap<Var, BigInt>,
}

/// Removes congruences by substituting `y = d·y + r` for every variable
/// occurring in one, over all residue vectors `r`, with `d` the lcm of all
/// moduli. Branches contradicting some congruence are dropped.
pub fn eliminate_mods(conjunctions: &[Vec<Atom>]) -> Result<Vec<ResidueBranch>> {
    let mut d = BigInt::one();
    for c in conjunctions {
        for a in c {
            if let Atom::Mod { modulus, .. } = a {
                d = d.lcm(modulus);
            }
        }
    }
    let mut out = Vec::new();
    for c in conjunctions {
        let vars: Vec<Var> = mod_vars(c).into_iter().collect();
        let groups: Vec<Vec<Var>> = vars.into_iter().map(|v| vec![v]).collect();
        out.extend(residue_branches(c, &d, &groups)?);
    }
    Ok(out)
}

fn mod_vars(c: &[Atom]) -> BTreeSet<Var> {
    c.iter()
        .filter(|a| matches!(a, Atom::Mod { .. }))
        .flat_map(|a| a.vars().cloned())
        .collect()
}

/// Substitutes `v = d·v + r_g` for every `v` in group `g`, over all residue
/// vectors indexed by group.
fn residue_branches(c: &[Atom], d: &BigInt, groups: &[Vec<Var>]) -> Result<Vec<ResidueBranch>> {
    let mut out = Vec::new();
    let mut rs = vec![BigInt::zero(); groups.len()];
    loop {
        budget::charge(1)?;
        let mut residues = BTreeMap::new();
        let mut atoms = Vec::new();
        let mut ok = true;
        for a in c {
            let mut g = Formula::Atom(a.clone());
            for (grp, r) in groups.iter().zip(&rs) {
                for v in grp {
                    if a.mentions(v) {
                        let mut t = RatTerm::constant_term(BigRational::from_integer(r.clone()));
                        t.add_monomial(v.clone(), BigRational::from_integer(d.clone()));
                        g = g.subst_unchecked(v, &t);
                    }
                }
            }
            match qe::simplify(&g) {
                Formula::True => {}
                Formula::False => ok = false,
                Formula::Atom(b) => atoms.push(b),
                other => return Err(Error::Internal(format!("atom substitution gave {other}"))),
            }
            if !ok {
                break;
            }
        }
        if ok {
            if let Some(atoms) = conj::simplify(atoms) {
                for (grp, r) in groups.iter().zip(&rs) {
                    for v in grp {
                        residues.insert(v.clone(), r.clone());
                    }
                }
                debug_assert!(!atoms.iter().any(|a| matches!(a, Atom::Mod { .. })));
                out.push(ResidueBranch {
                    atoms,
                    modulus: if groups.is_empty() { BigInt::one() } else { d.clone() },
                    residues,
                });
            }
        }
        // next residue vector
        let mut i = 0;
        loop {
            if i == rs.len() {
                return Ok(out);
            }
            rs[i] += 1;
            if &rs[i] < d {
                break;
            }
            rs[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// `P + Q ⊲ c` with `P` over unprimed and `Q` over primed variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Linear {
    pub p: LinTerm,
    pub q: LinTerm,
    pub c: BigInt,
}

impl Linear {
    fn from_term(t: &LinTerm) -> Linear {
        let mut p = LinTerm::zero();
        let mut q = LinTerm::zero();
        for (v, c) in t.coeffs() {
            if v.role() == Role::Primed {
                q.add_monomial(v.clone(), c.clone());
            } else {
                p.add_monomial(v.clone(), c.clone());
            }
        }
        Linear { p, q, c: -t.constant() }
    }

    /// `P + Q - c`.
    pub fn term(&self) -> LinTerm {
        self.p.add(&self.q).add_constant(&-&self.c)
    }
}

/// `P + Q ≡ c (mod d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub p: LinTerm,
    pub q: LinTerm,
    pub modulus: BigInt,
    pub c: BigInt,
}

/// One disjunct of the canonical form: dense equations and inequalities
/// over fractional parts, discrete inequalities over integer variables and
/// integer parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedDisjunct {
    pub dense_eqs: Vec<Linear>,
    pub dense_ineqs: Vec<Linear>,
    pub int_ineqs: Vec<Linear>,
    /// Always empty after mod elimination.
    pub int_mods: Vec<Congruence>,
    /// Unprimed fractional parts, one per real variable of the relation.
    pub frac_vars: Vec<Var>,
    /// Unprimed integer variables followed by the integer parts.
    pub int_vars: Vec<Var>,
    pub splits: Vec<SplitVar>,
    /// Integer variables in `residues` stand for quotients: the source
    /// value of `y` is `modulus · y + residues[y]` (also for `y'`).
    pub modulus: BigInt,
    pub residues: BTreeMap<Var, BigInt>,
    /// Index of the disjunct of the source formula this one comes from.
    pub source: usize,
}

impl SeparatedDisjunct {
    /// Dense part `S` (without the domain constraints).
    pub fn dense_formula(&self) -> Formula {
        Formula::and(
            self.dense_eqs
                .iter()
                .map(|l| Formula::eq(l.term()))
                .chain(self.dense_ineqs.iter().map(|l| Formula::gt(l.term()))),
        )
    }

    /// Discrete part `T`.
    pub fn discrete_formula(&self) -> Formula {
        Formula::and(self.int_ineqs.iter().map(|l| Formula::gt(l.term())))
    }

    /// `S ∧ T` over the separated variables.
    pub fn formula(&self) -> Formula {
        Formula::and([self.dense_formula(), self.discrete_formula()])
    }

    /// Number of P/Q terms.
    pub fn atom_count(&self) -> usize {
        self.dense_eqs.len() + self.dense_ineqs.len() + self.int_ineqs.len()
    }

    /// Values of the source variables (unprimed) for a point given over the
    /// separated unprimed variables.
    pub fn lift(&self, point: &Assignment) -> Result<Assignment> {
        let mut out = Assignment::new();
        let get = |v: &Var| point.get(v).cloned().unwrap_or_else(BigRational::zero);
        let int_value = |v: &Var| -> BigRational {
            match self.residues.get(v) {
                Some(r) => get(v) * BigRational::from_integer(self.modulus.clone()) + BigRational::from_integer(r.clone()),
                None => get(v),
            }
        };
        for s in &self.splits {
            out.insert(s.original.clone(), int_value(&s.int_part) + get(&s.frac_part))?;
        }
        let split_ints: BTreeSet<&Var> = self.splits.iter().map(|s| &s.int_part).collect();
        for v in &self.int_vars {
            if !split_ints.contains(v) {
                out.insert(v.clone(), int_value(v))?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for SeparatedDisjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula())?;
        if !self.residues.is_empty() {
            let rs: Vec<String> = self
                .residues
                .iter()
                .map(|(v, r)| format!("{v} = {}*{v} + {r}", self.modulus))
                .collect();
            write!(f, " where {}", rs.join(", "))?;
        }
        Ok(())
    }
}

/// Canonical disjunct list of a relation.
///
/// Congruences are removed per disjunct with one residue per variable
/// shared by its primed and unprimed copy, so a chain of the result maps
/// back to a chain of the source.
pub fn to_canonical(rel: &Relation) -> Result<Vec<SeparatedDisjunct>> {
    let splits: Vec<SplitVar> = rel.reals.iter().map(SplitVar::of).collect();
    let frac_vars: Vec<Var> = splits.iter().map(|s| s.frac_part.clone()).collect();
    let domain: Vec<Var> = frac_vars
        .iter()
        .flat_map(|v| [v.clone(), v.primed()])
        .collect();
    let int_vars: Vec<Var> = rel
        .ints
        .iter()
        .cloned()
        .chain(splits.iter().map(|s| s.int_part.clone()))
        .collect();
    let (qf, _) = mixed_qe_with(&rel.body, false)?;
    let mut out = Vec::new();
    for (source, c) in to_dnf(&qf)?.into_iter().enumerate() {
        let mut d = BigInt::one();
        for a in &c {
            if let Atom::Mod { modulus, .. } = a {
                d = d.lcm(modulus);
            }
        }
        let mut groups: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
        for v in mod_vars(&c) {
            groups.entry(v.unprimed()).or_default();
        }
        for (base, g) in groups.iter_mut() {
            g.push(base.clone());
            g.push(base.primed());
        }
        let groups: Vec<Vec<Var>> = groups.into_values().collect();
        for branch in residue_branches(&c, &d, &groups)? {
            // drop branches that are empty on the domain
            let f = Formula::and(branch.atoms.iter().cloned().map(Formula::Atom));
            if crate::sat::solve(&f, &domain)?.is_none() {
                continue;
            }
            let mut sd = SeparatedDisjunct {
                dense_eqs: Vec::new(),
                dense_ineqs: Vec::new(),
                int_ineqs: Vec::new(),
                int_mods: Vec::new(),
                frac_vars: frac_vars.clone(),
                int_vars: int_vars.clone(),
                splits: splits.clone(),
                modulus: branch.modulus.clone(),
                residues: branch
                    .residues
                    .into_iter()
                    .filter(|(v, _)| v.role() != Role::Primed)
                    .collect(),
                source,
            };
            for a in &branch.atoms {
                let t = a.term();
                if t.has_real() && t.has_int() {
                    return Err(Error::Internal(format!("unseparated atom {a}")));
                }
                match (a, t.has_real()) {
                    (Atom::Eq(_), true) => sd.dense_eqs.push(Linear::from_term(t)),
                    (Atom::Gt(_), true) => sd.dense_ineqs.push(Linear::from_term(t)),
                    (Atom::Eq(_), false) => {
                        let one = BigInt::one();
                        sd.int_ineqs.push(Linear::from_term(&t.add_constant(&one)));
                        sd.int_ineqs.push(Linear::from_term(&t.neg().add_constant(&one)));
                    }
                    (Atom::Gt(_), false) => sd.int_ineqs.push(Linear::from_term(t)),
                    (Atom::Mod { .. }, _) => {
                        return Err(Error::Internal(format!("congruence survived elimination: {a}")))
                    }
                }
            }
            out.push(sd);
        }
    }
    Ok(out)
}

/// The relation's body rewritten over the separated variables, as the
/// quantifier-free output of mixed elimination. Used to compare a relation
/// with its separation.
pub fn separated_relation(rel: &Relation) -> Result<Relation> {
    let splits: Vec<SplitVar> = rel.reals.iter().map(SplitVar::of).collect();
    let (qf, _) = mixed_qe_with(&rel.body, false)?;
    let ints = rel
        .ints
        .iter()
        .cloned()
        .chain(splits.iter().map(|s| s.int_part.clone()))
        .collect();
    let reals = splits.iter().map(|s| s.frac_part.clone()).collect();
    Ok(Relation::new(reals, ints, qf))
}
