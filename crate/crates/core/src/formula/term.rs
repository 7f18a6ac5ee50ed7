use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Assignment, Var};
use crate::error::Result;

/// Integer-coefficient linear form `Σ cᵢ·vᵢ + constant`. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinTerm {
    coeffs: BTreeMap<Var, BigInt>,
    constant: BigInt,
}

impl LinTerm {
    pub fn zero() -> Self {
        LinTerm::default()
    }

    pub fn constant_term(c: impl Into<BigInt>) -> Self {
        LinTerm {
            coeffs: BTreeMap::new(),
            constant: c.into(),
        }
    }

    pub fn var(v: Var) -> Self {
        LinTerm::monomial(v, 1)
    }

    pub fn monomial(v: Var, c: impl Into<BigInt>) -> Self {
        let mut t = LinTerm::zero();
        t.add_monomial(v, c.into());
        t
    }

    pub fn from_parts(
        coeffs: impl IntoIterator<Item = (Var, BigInt)>,
        constant: impl Into<BigInt>,
    ) -> Self {
        let mut t = LinTerm::constant_term(constant);
        for (v, c) in coeffs {
            t.add_monomial(v, c);
        }
        t
    }

    pub fn add_monomial(&mut self, v: Var, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, v: &Var) -> BigInt {
        self.coeffs.get(v).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, BigInt> {
        &self.coeffs
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn set_constant(&mut self, c: BigInt) {
        self.constant = c;
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn all_int(&self) -> bool {
        self.coeffs.keys().all(Var::is_int)
    }

    pub fn has_real(&self) -> bool {
        self.coeffs.keys().any(Var::is_real)
    }

    pub fn has_int(&self) -> bool {
        self.coeffs.keys().any(Var::is_int)
    }

    /// The same form without its constant.
    pub fn linear_part(&self) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.clone(),
            constant: BigInt::zero(),
        }
    }

    /// Removes `v` and returns its coefficient.
    pub fn take(&mut self, v: &Var) -> BigInt {
        self.coeffs.remove(v).unwrap_or_default()
    }

    pub fn add(&self, other: &LinTerm) -> LinTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_monomial(v.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinTerm) -> LinTerm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinTerm {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, k: &BigInt) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add_constant(&self, k: &BigInt) -> LinTerm {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    /// gcd of the variable coefficients; zero for a ground term.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Exact division of every coefficient and the constant.
    pub(crate) fn div_exact(&self, k: &BigInt) -> LinTerm {
        LinTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c / k))
                .collect(),
            constant: &self.constant / k,
        }
    }

    pub fn eval(&self, sigma: &Assignment) -> Result<BigRational> {
        let mut acc = BigRational::from_integer(self.constant.clone());
        for (v, c) in &self.coeffs {
            let x = sigma.require(v)?;
            acc += x * BigRational::from_integer(c.clone());
        }
        Ok(acc)
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> LinTerm {
        let mut out = LinTerm::constant_term(self.constant.clone());
        for (v, c) in &self.coeffs {
            out.add_monomial(f(v), c.clone());
        }
        out
    }

    pub fn to_rat(&self) -> RatTerm {
        RatTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), BigRational::from_integer(c.clone())))
                .collect(),
            constant: BigRational::from_integer(self.constant.clone()),
        }
    }
}

impl fmt::Debug for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                if c == &BigInt::one() {
                    write!(f, "{v}")?;
                } else if c == &-BigInt::one() {
                    write!(f, "-{v}")?;
                } else {
                    write!(f, "{c}{v}")?;
                }
            } else if c.is_negative() {
                if c == &-BigInt::one() {
                    write!(f, " - {v}")?;
                } else {
                    write!(f, " - {}{v}", -c)?;
                }
            } else if c.is_one() {
                write!(f, " + {v}")?;
            } else {
                write!(f, " + {c}{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else {
            Ok(())
        }
    }
}

/// Rational-coefficient linear form. Only used transiently: atoms built from
/// it are scaled back to integer coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RatTerm {
    coeffs: BTreeMap<Var, BigRational>,
    constant: BigRational,
}

impl RatTerm {
    pub fn zero() -> Self {
        RatTerm {
            coeffs: BTreeMap::new(),
            constant: BigRational::zero(),
        }
    }

    pub fn constant_term(c: BigRational) -> Self {
        RatTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        let mut t = RatTerm::zero();
        t.add_monomial(v, BigRational::one());
        t
    }

    pub fn add_monomial(&mut self, v: Var, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(v).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.retain(|_, c| !c.is_zero());
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, BigRational> {
        &self.coeffs
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn add(&self, other: &RatTerm) -> RatTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_monomial(v.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &RatTerm) -> RatTerm {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> RatTerm {
        if k.is_zero() {
            return RatTerm::zero();
        }
        RatTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add_constant(&self, k: &BigRational) -> RatTerm {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    /// lcm of all denominators (coefficients and constant).
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .values()
            .chain(std::iter::once(&self.constant))
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()))
    }

    /// Multiplies by the positive lcm of denominators; returns the integer
    /// form and the factor used.
    pub fn clear_denominators(&self) -> (LinTerm, BigInt) {
        let l = self.denominator_lcm();
        let lr = BigRational::from_integer(l.clone());
        let mut t = LinTerm::constant_term((&self.constant * &lr).to_integer());
        for (v, c) in &self.coeffs {
            t.add_monomial(v.clone(), (c * &lr).to_integer());
        }
        (t, l)
    }

    pub fn eval(&self, sigma: &Assignment) -> Result<BigRational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += sigma.require(v)? * c;
        }
        Ok(acc)
    }
}

impl From<&LinTerm> for RatTerm {
    fn from(t: &LinTerm) -> Self {
        t.to_rat()
    }
}

impl From<LinTerm> for RatTerm {
    fn from(t: LinTerm) -> Self {
        t.to_rat()
    }
}

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_dropped() {
        let y = Var::int("y");
        let t = LinTerm::var(y.clone()).sub(&LinTerm::var(y.clone()));
        assert!(t.is_ground());
        assert!(!t.mentions(&y));
    }

    #[test]
    fn clearing_denominators_uses_lcm() {
        let x = Var::real("x");
        let mut r = RatTerm::var(x.clone()).scale(&BigRational::new(1.into(), 2.into()));
        r = r.add_constant(&BigRational::new((-1).into(), 3.into()));
        let (t, l) = r.clear_denominators();
        assert_eq!(l, BigInt::from(6));
        assert_eq!(t.coeff(&x), BigInt::from(3));
        assert_eq!(t.constant(), &BigInt::from(-2));
    }

    #[test]
    fn display_reads_naturally() {
        let t = LinTerm::from_parts(
            [(Var::int("a"), BigInt::from(2)), (Var::int("b"), BigInt::from(-1))],
            -3,
        );
        assert_eq!(t.to_string(), "2a - b - 3");
    }
}
