use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Assignment, Formula, LinTerm, RatTerm, Var};
use crate::error::{Error, Result};

/// `Eq(t)` is `t = 0`, `Gt(t)` is `t > 0`, `Mod` is `term ≡ residue (mod modulus)`.
///
/// A `Mod` term carries no constant (it is folded into the residue), has a
/// positive modulus, a residue in `[0, modulus)`, and mentions only integer
/// variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Eq(LinTerm),
    Gt(LinTerm),
    Mod {
        term: LinTerm,
        modulus: BigInt,
        residue: BigInt,
    },
}

/// Comparison kinds accepted by [`normalize_atom`] and [`compare`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Gt,
    Lt,
    Ge,
    Le,
    Mod(BigInt),
}

/// Builds the integer-coefficient atom for `lhs rel rhs`.
///
/// `>=`/`<=` are only accepted when both sides are integer-valued; they become
/// shifted strict inequalities. Over reals the caller must build the
/// disjunction itself (see [`compare`]).
pub fn normalize_atom(lhs: &RatTerm, rel: Rel, rhs: &RatTerm) -> Result<Atom> {
    let diff = lhs.sub(rhs);
    let has_real = diff.vars().any(Var::is_real);
    match rel {
        Rel::Eq => Ok(Atom::Eq(diff.clear_denominators().0)),
        Rel::Gt => Ok(Atom::Gt(diff.clear_denominators().0)),
        Rel::Lt => Ok(Atom::Gt(diff.clear_denominators().0.neg())),
        Rel::Ge | Rel::Le => {
            if has_real {
                return Err(Error::Sort(
                    "non-strict comparison over a real term is not an atom".into(),
                ));
            }
            let t = diff.clear_denominators().0;
            let t = if rel == Rel::Ge { t } else { t.neg() };
            Ok(Atom::Gt(t.add_constant(&BigInt::one())))
        }
        Rel::Mod(d) => {
            if !d.is_positive() {
                return Err(Error::BadModulus(d));
            }
            if has_real {
                return Err(Error::Sort(
                    "congruence over a term with a real variable".into(),
                ));
            }
            let (t, l) = diff.clear_denominators();
            Ok(Atom::modulo(t, d * l, BigInt::zero()))
        }
    }
}

/// Like [`normalize_atom`] but total over sorts: real `>=`/`<=` become
/// `Or(Gt, Eq)`.
pub fn compare(lhs: &RatTerm, rel: Rel, rhs: &RatTerm) -> Result<Formula> {
    let real = lhs.vars().chain(rhs.vars()).any(Var::is_real);
    match rel {
        Rel::Ge | Rel::Le if real => {
            let strict = if rel == Rel::Ge { Rel::Gt } else { Rel::Lt };
            Ok(Formula::Or(vec![
                Formula::Atom(normalize_atom(lhs, strict, rhs)?),
                Formula::Atom(normalize_atom(lhs, Rel::Eq, rhs)?),
            ]))
        }
        rel => Ok(Formula::Atom(normalize_atom(lhs, rel, rhs)?)),
    }
}

impl Atom {
    /// `term + c ≡ residue` with the constant folded into the residue.
    pub fn modulo(term: LinTerm, modulus: BigInt, residue: BigInt) -> Atom {
        let mut term = term;
        let c = term.constant().clone();
        term.set_constant(BigInt::zero());
        let residue = (residue - c).mod_floor(&modulus);
        Atom::Mod {
            term,
            modulus,
            residue,
        }
    }

    pub fn term(&self) -> &LinTerm {
        match self {
            Atom::Eq(t) | Atom::Gt(t) => t,
            Atom::Mod { term, .. } => term,
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term().mentions(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.term().vars()
    }

    pub fn is_int_only(&self) -> bool {
        self.term().all_int()
    }

    pub fn is_ground(&self) -> bool {
        self.term().is_ground()
    }

    pub fn eval(&self, sigma: &Assignment) -> Result<bool> {
        let v = self.term().eval(sigma)?;
        Ok(match self {
            Atom::Eq(_) => v.is_zero(),
            Atom::Gt(_) => v.is_positive(),
            Atom::Mod {
                modulus, residue, ..
            } => {
                v.is_integer() && (v.to_integer() - residue).mod_floor(modulus).is_zero()
            }
        })
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Atom {
        match self {
            Atom::Eq(t) => Atom::Eq(t.map_vars(f)),
            Atom::Gt(t) => Atom::Gt(t.map_vars(f)),
            Atom::Mod {
                term,
                modulus,
                residue,
            } => Atom::Mod {
                term: term.map_vars(f),
                modulus: modulus.clone(),
                residue: residue.clone(),
            },
        }
    }

    /// Replaces `v` by `t` and clears denominators. The caller guarantees the
    /// result of a congruence substitution is integer-valued.
    pub fn substitute(&self, v: &Var, t: &RatTerm) -> Atom {
        let c = self.term().coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.term().clone();
        rest.take(v);
        let r = rest
            .to_rat()
            .add(&t.scale(&BigRational::from_integer(c)));
        let (lin, l) = r.clear_denominators();
        match self {
            Atom::Eq(_) => Atom::Eq(lin),
            Atom::Gt(_) => Atom::Gt(lin),
            Atom::Mod {
                modulus, residue, ..
            } => Atom::modulo(lin, modulus * &l, residue * &l),
        }
    }

    /// Canonical form, folding ground atoms to `True`/`False`.
    ///
    /// Integer atoms are divided by the coefficient gcd (tightening strict
    /// bounds), mixed and real atoms by the gcd including the constant,
    /// equalities get a positive leading coefficient and congruences have
    /// their coefficients reduced modulo the modulus.
    pub fn canonical(&self) -> Formula {
        match self {
            Atom::Eq(t) => {
                if t.is_ground() {
                    return Formula::from_bool(t.constant().is_zero());
                }
                let g = t.content();
                let t = if t.all_int() {
                    if !t.constant().is_multiple_of(&g) {
                        return Formula::False;
                    }
                    t.div_exact(&g)
                } else {
                    t.div_exact(&g.gcd(t.constant()))
                };
                let lead_neg = t.coeffs().values().next().is_some_and(Signed::is_negative);
                Formula::Atom(Atom::Eq(if lead_neg { t.neg() } else { t }))
            }
            Atom::Gt(t) => {
                if t.is_ground() {
                    return Formula::from_bool(t.constant().is_positive());
                }
                let g = t.content();
                let t = if t.all_int() {
                    let mut s = t.linear_part().div_exact(&g);
                    s.set_constant(ceil_div(t.constant(), &g));
                    s
                } else {
                    t.div_exact(&g.gcd(t.constant()))
                };
                Formula::Atom(Atom::Gt(t))
            }
            Atom::Mod {
                term,
                modulus,
                residue,
            } => {
                if modulus.is_one() {
                    return Formula::True;
                }
                let mut lin = LinTerm::zero();
                for (v, c) in term.coeffs() {
                    lin.add_monomial(v.clone(), c.mod_floor(modulus));
                }
                let residue = (residue - term.constant()).mod_floor(modulus);
                if lin.is_ground() {
                    return Formula::from_bool(residue.is_zero());
                }
                let g = lin.content().gcd(modulus);
                if !residue.is_multiple_of(&g) {
                    return Formula::False;
                }
                let m = modulus / &g;
                if m.is_one() {
                    return Formula::True;
                }
                Formula::Atom(Atom::Mod {
                    term: lin.div_exact(&g),
                    modulus: m,
                    residue: residue / &g,
                })
            }
        }
    }

    /// Negation as a negation-free formula.
    pub fn negate(&self) -> Formula {
        match self {
            Atom::Eq(t) => Formula::Or(vec![
                Formula::Atom(Atom::Gt(t.clone())),
                Formula::Atom(Atom::Gt(t.neg())),
            ]),
            Atom::Gt(t) if t.all_int() => {
                Formula::Atom(Atom::Gt(t.neg().add_constant(&BigInt::one())))
            }
            Atom::Gt(t) => Formula::Or(vec![
                Formula::Atom(Atom::Gt(t.neg())),
                Formula::Atom(Atom::Eq(t.clone())),
            ]),
            Atom::Mod {
                term,
                modulus,
                residue,
            } => {
                let mut others = Vec::new();
                let mut r = BigInt::zero();
                while &r < modulus {
                    if &r != residue {
                        others.push(Formula::Atom(Atom::Mod {
                            term: term.clone(),
                            modulus: modulus.clone(),
                            residue: r.clone(),
                        }));
                    }
                    r += 1;
                }
                Formula::or(others)
            }
        }
    }
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(t) => write!(f, "{t} = 0"),
            Atom::Gt(t) => write!(f, "{t} > 0"),
            Atom::Mod {
                term,
                modulus,
                residue,
            } => write!(f, "{term} ≡ {residue} (mod {modulus})"),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::term::rat;

    fn v(name: &str) -> RatTerm {
        RatTerm::var(Var::int(name))
    }

    #[test]
    fn half_x_gt_three() {
        let x = Var::real("x");
        let lhs = RatTerm::var(x.clone()).scale(&BigRational::new(1.into(), 2.into()));
        let a = normalize_atom(&lhs, Rel::Gt, &RatTerm::constant_term(rat(3))).unwrap();
        assert_eq!(
            a,
            Atom::Gt(LinTerm::from_parts([(x, BigInt::from(1))], -6))
        );
    }

    #[test]
    fn int_le_shifts() {
        let a = normalize_atom(&v("y"), Rel::Le, &RatTerm::constant_term(rat(5))).unwrap();
        assert_eq!(
            a,
            Atom::Gt(LinTerm::from_parts([(Var::int("y"), BigInt::from(-1))], 6))
        );
    }

    #[test]
    fn residue_is_normalized() {
        let a = normalize_atom(&v("y"), Rel::Mod(3.into()), &RatTerm::constant_term(rat(7)))
            .unwrap();
        assert_eq!(
            a,
            Atom::Mod {
                term: LinTerm::var(Var::int("y")),
                modulus: 3.into(),
                residue: 1.into()
            }
        );
    }

    #[test]
    fn bad_modulus_and_real_congruence_rejected() {
        let zero = RatTerm::zero();
        assert!(matches!(
            normalize_atom(&v("y"), Rel::Mod(0.into()), &zero),
            Err(Error::BadModulus(_))
        ));
        let x = RatTerm::var(Var::real("x"));
        assert!(matches!(
            normalize_atom(&x, Rel::Mod(2.into()), &zero),
            Err(Error::Sort(_))
        ));
        assert!(normalize_atom(&x, Rel::Ge, &zero).is_err());
    }

    #[test]
    fn normalization_is_idempotent() {
        let a = normalize_atom(&v("y"), Rel::Le, &RatTerm::constant_term(rat(5))).unwrap();
        let again = normalize_atom(&a.term().to_rat(), Rel::Gt, &RatTerm::zero()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn canonical_tightens_integer_bounds() {
        // 2y - 3 > 0  <=>  y - 1 > 0
        let y = Var::int("y");
        let a = Atom::Gt(LinTerm::from_parts([(y.clone(), BigInt::from(2))], -3));
        assert_eq!(
            a.canonical(),
            Formula::Atom(Atom::Gt(LinTerm::from_parts([(y.clone(), BigInt::from(1))], -1)))
        );
        // 2y - 3 = 0 has no integer solution
        let e = Atom::Eq(LinTerm::from_parts([(y.clone(), BigInt::from(2))], -3));
        assert_eq!(e.canonical(), Formula::False);
        // 2y ≡ 1 (mod 2) is unsatisfiable
        let m = Atom::modulo(LinTerm::monomial(y, 2), 2.into(), 1.into());
        assert_eq!(m.canonical(), Formula::False);
    }

    #[test]
    fn negated_integer_gt_reflects() {
        let y = Var::int("y");
        let n = Atom::Gt(LinTerm::var(y.clone())).negate();
        assert_eq!(
            n,
            Formula::Atom(Atom::Gt(LinTerm::from_parts([(y, BigInt::from(-1))], 1)))
        );
    }
}
