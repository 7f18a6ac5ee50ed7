//! Modes of variables and terms along a monotonic chain, and their
//! enumeration.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::formula::{LinTerm, Var};
use crate::separation::{Linear, SeparatedDisjunct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    UnbInc,
    UnbDec,
    Flat,
    BddInc,
    BddDec,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::UnbInc => "unbounded-increasing",
            Mode::UnbDec => "unbounded-decreasing",
            Mode::Flat => "flat",
            Mode::BddInc => "bounded-increasing",
            Mode::BddDec => "bounded-decreasing",
        }
    }

    /// Mode of `-t` when `t` has this mode.
    pub fn flip(self) -> Mode {
        match self {
            Mode::UnbInc => Mode::UnbDec,
            Mode::UnbDec => Mode::UnbInc,
            Mode::Flat => Mode::Flat,
            Mode::BddInc => Mode::BddDec,
            Mode::BddDec => Mode::BddInc,
        }
    }

    pub fn is_dense(self) -> bool {
        matches!(self, Mode::Flat | Mode::BddInc | Mode::BddDec)
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Mode::Flat | Mode::UnbInc | Mode::UnbDec)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DENSE_MODES: [Mode; 3] = [Mode::BddInc, Mode::Flat, Mode::BddDec];
pub const DISCRETE_MODES: [Mode; 3] = [Mode::UnbInc, Mode::Flat, Mode::UnbDec];

/// The (P, Q) mode pairs a discrete inequality admits on a strong chain.
pub const DISCRETE_PAIRS: [(Mode, Mode); 5] = [
    (Mode::UnbInc, Mode::UnbInc),
    (Mode::Flat, Mode::UnbInc),
    (Mode::UnbDec, Mode::UnbInc),
    (Mode::UnbInc, Mode::Flat),
    (Mode::Flat, Mode::Flat),
];

pub fn dense_pairs() -> impl Iterator<Item = (Mode, Mode)> {
    DENSE_MODES
        .into_iter()
        .flat_map(|p| DENSE_MODES.into_iter().map(move |q| (p, q)))
}

/// Modes for the dense part of a disjunct: one per fractional variable, a
/// (P, Q) pair per dense equation and per dense inequality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenseModes {
    pub vars: Vec<Mode>,
    pub eqs: Vec<(Mode, Mode)>,
    pub ineqs: Vec<(Mode, Mode)>,
}

/// Modes for the discrete part: one per integer variable and a (P, Q) pair
/// per discrete inequality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscreteModes {
    pub vars: Vec<Mode>,
    pub ineqs: Vec<(Mode, Mode)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeVector {
    pub dense: DenseModes,
    pub discrete: DiscreteModes,
}

impl ModeVector {
    /// Variable modes keyed by the separated variable.
    pub fn var_modes(&self, d: &SeparatedDisjunct) -> BTreeMap<Var, Mode> {
        d.frac_vars
            .iter()
            .cloned()
            .zip(self.dense.vars.iter().copied())
            .chain(d.int_vars.iter().cloned().zip(self.discrete.vars.iter().copied()))
            .collect()
    }

    /// Term modes as `(label, mode)` with labels like `P2[dense-ineq 0]`.
    pub fn term_modes(&self) -> Vec<(String, Mode)> {
        let mut out = Vec::new();
        let mut push = |kind: &str, pairs: &[(Mode, Mode)]| {
            for (i, (p, q)) in pairs.iter().enumerate() {
                out.push((format!("P[{kind} {i}]"), *p));
                out.push((format!("Q[{kind} {i}]"), *q));
            }
        };
        push("dense-eq", &self.dense.eqs);
        push("dense-ineq", &self.dense.ineqs);
        push("int-ineq", &self.discrete.ineqs);
        out
    }

    pub fn validate(&self, d: &SeparatedDisjunct) -> Result<()> {
        self.dense.validate(d)?;
        self.discrete.validate(d)
    }
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(Error::InvalidModes(msg))
}

impl DenseModes {
    pub fn validate(&self, d: &SeparatedDisjunct) -> Result<()> {
        if self.vars.len() != d.frac_vars.len()
            || self.eqs.len() != d.dense_eqs.len()
            || self.ineqs.len() != d.dense_ineqs.len()
        {
            return invalid("dense mode vector does not match the disjunct's shape".into());
        }
        for m in self.vars.iter().chain(self.ineqs.iter().flat_map(|(p, q)| [p, q])) {
            if !m.is_dense() {
                return invalid(format!("{m} is not a mode of a dense symbol"));
            }
        }
        if self.eqs.iter().any(|&pq| pq != (Mode::Flat, Mode::Flat)) {
            return invalid("both terms of a dense equation must be flat".into());
        }
        Ok(())
    }
}

impl DiscreteModes {
    pub fn validate(&self, d: &SeparatedDisjunct) -> Result<()> {
        if self.vars.len() != d.int_vars.len() || self.ineqs.len() != d.int_ineqs.len() {
            return invalid("discrete mode vector does not match the disjunct's shape".into());
        }
        if let Some(m) = self.vars.iter().find(|m| !m.is_discrete()) {
            return invalid(format!("{m} is not a mode of an integer variable"));
        }
        if let Some((p, q)) = self.ineqs.iter().find(|pq| !DISCRETE_PAIRS.contains(pq)) {
            return invalid(format!("({p}, {q}) is not an admissible pair for a discrete inequality"));
        }
        Ok(())
    }
}

/// Mixed-radix counter over `sizes`, yielding every digit vector once.
struct Odometer {
    sizes: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl Odometer {
    fn new(sizes: Vec<usize>) -> Self {
        let cur = (!sizes.contains(&0)).then(|| vec![0; sizes.len()]);
        Odometer { sizes, cur }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().expect("checked above");
        let mut i = 0;
        loop {
            if i == cur.len() {
                self.cur = None;
                break;
            }
            cur[i] += 1;
            if cur[i] < self.sizes[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// Whether the modes of single-variable (and constant) terms agree with the
/// modes of their variables.
fn term_consistent(t: &LinTerm, mode: Mode, vars: &[Var], var_modes: &[Mode]) -> bool {
    let mut it = t.coeffs().iter();
    match (it.next(), it.next()) {
        (None, _) => mode == Mode::Flat,
        (Some((v, c)), None) => {
            let Some(i) = vars.iter().position(|w| *w == v.unprimed()) else {
                return true;
            };
            let m = var_modes[i];
            mode == if c.is_positive() { m } else { m.flip() }
        }
        _ => true,
    }
}

/// Pairs from `pairs` allowed for each `(P, Q)` given the variable modes.
fn allowed_pairs(ls: &[Linear], pairs: &[(Mode, Mode)], vars: &[Var], var_modes: &[Mode]) -> Vec<Vec<(Mode, Mode)>> {
    ls.iter()
        .map(|l| {
            pairs
                .iter()
                .copied()
                .filter(|&(p, q)| term_consistent(&l.p, p, vars, var_modes) && term_consistent(&l.q, q, vars, var_modes))
                .collect()
        })
        .collect()
}

/// Every choice of variable modes, then of one allowed pair per term list.
fn layered<T: 'static>(
    n: usize,
    alphabet: &'static [Mode],
    choices: impl Fn(&[Mode]) -> Vec<Vec<Vec<(Mode, Mode)>>> + 'static,
    build: impl Fn(Vec<Mode>, Vec<Vec<(Mode, Mode)>>) -> T + Clone + 'static,
) -> impl Iterator<Item = T> {
    Odometer::new(vec![alphabet.len(); n]).flat_map(move |digits| {
        let vm: Vec<Mode> = digits.iter().map(|&k| alphabet[k]).collect();
        let groups = choices(&vm);
        let flat: Vec<Vec<(Mode, Mode)>> = groups.iter().flatten().cloned().collect();
        let lens: Vec<usize> = groups.iter().map(Vec::len).collect();
        let build = build.clone();
        Odometer::new(flat.iter().map(Vec::len).collect()).map(move |pick| {
            let mut it = pick.iter().zip(&flat).map(|(&k, opts)| opts[k]);
            let parts = lens.iter().map(|&l| it.by_ref().take(l).collect()).collect();
            build(vm.clone(), parts)
        })
    })
}

/// Dense sub-vectors; with `prune`, single-variable terms must follow their
/// variable.
pub fn enumerate_dense(d: &SeparatedDisjunct, prune: bool) -> Box<dyn Iterator<Item = DenseModes>> {
    let (vars, eqs, ineqs) = (d.frac_vars.clone(), d.dense_eqs.clone(), d.dense_ineqs.clone());
    let all: Vec<(Mode, Mode)> = dense_pairs().collect();
    let flat = vec![(Mode::Flat, Mode::Flat)];
    let choices = move |vm: &[Mode]| {
        if prune {
            vec![allowed_pairs(&eqs, &flat, &vars, vm), allowed_pairs(&ineqs, &all, &vars, vm)]
        } else {
            vec![vec![flat.clone(); eqs.len()], vec![all.clone(); ineqs.len()]]
        }
    };
    Box::new(layered(d.frac_vars.len(), &DENSE_MODES, choices, |vars, mut parts| {
        let ineqs = parts.pop().unwrap_or_default();
        let eqs = parts.pop().unwrap_or_default();
        DenseModes { vars, eqs, ineqs }
    }))
}

/// Discrete sub-vectors; with `prune`, single-variable terms must follow
/// their variable.
pub fn enumerate_discrete(d: &SeparatedDisjunct, prune: bool) -> Box<dyn Iterator<Item = DiscreteModes>> {
    let (vars, ineqs) = (d.int_vars.clone(), d.int_ineqs.clone());
    let choices = move |vm: &[Mode]| {
        if prune {
            vec![allowed_pairs(&ineqs, &DISCRETE_PAIRS, &vars, vm)]
        } else {
            vec![vec![DISCRETE_PAIRS.to_vec(); ineqs.len()]]
        }
    };
    Box::new(layered(d.int_vars.len(), &DISCRETE_MODES, choices, |vars, mut parts| DiscreteModes {
        vars,
        ineqs: parts.pop().unwrap_or_default(),
    }))
}

/// Every mode vector admitted by the mode constraints of the disjunct:
/// dense symbols take bounded modes, dense equations are flat on both
/// sides, discrete inequalities take one of the five admissible pairs.
pub fn enumerate_mode_vectors(d: &SeparatedDisjunct) -> impl Iterator<Item = ModeVector> + '_ {
    enumerate_dense(d, false).flat_map(move |dense| {
        enumerate_discrete(d, false).map(move |discrete| ModeVector {
            dense: dense.clone(),
            discrete,
        })
    })
}

/// Size of [`enumerate_mode_vectors`]: `3^m · 9^a · 3^n · 5^b` for `a`
/// dense inequalities and `b` discrete ones.
pub fn mode_vector_count(d: &SeparatedDisjunct) -> BigUint {
    let pow = |b: u32, e: usize| BigUint::from(b).pow(e as u32);
    pow(3, d.frac_vars.len())
        * pow(9, d.dense_ineqs.len())
        * pow(3, d.int_vars.len())
        * pow(5, d.int_ineqs.len())
}

/// The coarse bound `3^m 3^n 3^{3pl} 3^{3pl}` with `pl` the total number of
/// constraints over all `p` disjuncts.
pub fn coarse_bound(m: usize, n: usize, total_atoms: usize) -> BigUint {
    let three = BigUint::from(3u32);
    let mut b = BigUint::one();
    for _ in 0..(m + n + 6 * total_atoms) {
        b *= &three;
    }
    b
}
