use std::collections::BTreeMap;

use crate::error::Result;
use crate::formula::{Assignment, Formula, RatTerm, Var};

/// A mixed linear relation `R(X, Y, X', Y')` with declared real variables
/// `X` and integer variables `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub reals: Vec<Var>,
    pub ints: Vec<Var>,
    pub body: Formula,
}

impl Relation {
    pub fn new(reals: Vec<Var>, ints: Vec<Var>, body: Formula) -> Self {
        Relation { reals, ints, body }
    }

    /// Declared (unprimed) variables, reals first.
    pub fn vars(&self) -> Vec<Var> {
        self.reals.iter().chain(&self.ints).cloned().collect()
    }

    pub fn primed_vars(&self) -> Vec<Var> {
        self.vars().iter().map(Var::primed).collect()
    }

    pub fn dimension(&self) -> usize {
        self.reals.len() + self.ints.len()
    }

    /// `R(a, b)`: the body with unprimed variables renamed to `a` and primed
    /// ones to `b` (both in [`Relation::vars`] order).
    pub fn apply(&self, a: &[Var], b: &[Var]) -> Formula {
        let vars = self.vars();
        assert_eq!(vars.len(), a.len());
        assert_eq!(vars.len(), b.len());
        let mut map = BTreeMap::new();
        for ((v, x), y) in vars.iter().zip(a).zip(b) {
            map.insert(v.clone(), x.clone());
            map.insert(v.primed(), y.clone());
        }
        self.body.freshen_binders().rename(&map)
    }

    /// A vector of fresh bound copies of the declared variables.
    pub fn fresh_copy(&self, tag: &str) -> Vec<Var> {
        self.vars()
            .iter()
            .map(|v| Var::fresh(&format!("{}_{tag}", v.name()), v.sort()))
            .collect()
    }

    /// Renames a formula over the declared (unprimed) variables onto `a`.
    pub fn at(&self, f: &Formula, a: &[Var]) -> Formula {
        let map: BTreeMap<Var, Var> = self.vars().into_iter().zip(a.iter().cloned()).collect();
        f.freshen_binders().rename(&map)
    }

    /// Same declarations, different body.
    pub fn with_body(&self, body: Formula) -> Relation {
        Relation {
            reals: self.reals.clone(),
            ints: self.ints.clone(),
            body,
        }
    }

    pub fn is_pure_int(&self) -> bool {
        self.reals.is_empty()
    }

    /// `R(a, b)` for concrete points given over the declared names.
    pub fn holds(&self, a: &Assignment, b: &Assignment) -> Result<bool> {
        let mut sigma = Assignment::new();
        for v in self.vars() {
            sigma.insert(v.clone(), a.require(&v)?)?;
            sigma.insert(v.primed(), b.require(&v)?)?;
        }
        if self.body.is_quantifier_free() {
            return self.body.evaluate(&sigma);
        }
        let mut f = self.body.clone();
        for (v, val) in sigma.iter() {
            f = f.substitute(v, &RatTerm::constant_term(val.clone()))?;
        }
        crate::separation::mixed_decide(&f)
    }
}
