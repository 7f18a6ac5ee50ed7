use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Assignment, Formula, Var};
use crate::error::{Error, Result};

/// Ground evaluator. Quantifiers are only evaluated over integer variables
/// with an explicit finite range, either per variable or a default range.
#[derive(Clone, Debug, Default)]
pub struct Evaluator {
    ranges: BTreeMap<Var, (BigInt, BigInt)>,
    default_int: Option<(BigInt, BigInt)>,
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator::default()
    }

    /// Every integer quantifier without its own range ranges over `[lo, hi]`.
    pub fn with_default_range(mut self, lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        self.default_int = Some((lo.into(), hi.into()));
        self
    }

    pub fn with_range(mut self, v: Var, lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        self.ranges.insert(v, (lo.into(), hi.into()));
        self
    }

    fn range(&self, v: &Var) -> Result<(BigInt, BigInt)> {
        if !v.is_int() {
            return Err(Error::UnboundedQuantifier(v.clone()));
        }
        self.ranges
            .get(v)
            .or(self.default_int.as_ref())
            .cloned()
            .ok_or_else(|| Error::UnboundedQuantifier(v.clone()))
    }

    pub fn eval(&self, f: &Formula, sigma: &Assignment) -> Result<bool> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(a) => a.eval(sigma),
            Formula::Not(g) => Ok(!self.eval(g, sigma)?),
            Formula::And(cs) => {
                // evaluate every child so unassigned variables are reported
                // regardless of short-circuiting order
                let mut all = true;
                for c in cs {
                    all &= self.eval(c, sigma)?;
                }
                Ok(all)
            }
            Formula::Or(cs) => {
                let mut any = false;
                for c in cs {
                    any |= self.eval(c, sigma)?;
                }
                Ok(any)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let (lo, hi) = self.range(v)?;
                let want = matches!(f, Formula::Exists(..));
                let mut s = sigma.clone();
                let mut x = lo;
                while x <= hi {
                    s.insert(v.clone(), BigRational::from_integer(x.clone()))?;
                    if self.eval(g, &s)? == want {
                        return Ok(want);
                    }
                    x += 1;
                }
                Ok(!want)
            }
        }
    }
}
