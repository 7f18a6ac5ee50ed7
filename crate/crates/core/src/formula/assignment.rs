use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::Var;
use crate::error::{Error, Result};

/// Exact values for a finite set of variables. Integer variables only ever
/// hold integral values.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<Var, BigRational>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn insert(&mut self, v: Var, value: BigRational) -> Result<()> {
        if v.is_int() && !value.is_integer() {
            return Err(Error::Sort(format!(
                "integer variable {v} cannot take the value {value}"
            )));
        }
        self.values.insert(v, value);
        Ok(())
    }

    pub fn set_int(&mut self, v: Var, value: impl Into<BigInt>) {
        self.values
            .insert(v, BigRational::from_integer(value.into()));
    }

    /// Builder form of [`Assignment::insert`] for values known to fit the
    /// sort.
    pub fn with(mut self, v: Var, value: BigRational) -> Self {
        self.insert(v, value).expect("value fits the variable's sort");
        self
    }

    pub fn get(&self, v: &Var) -> Option<&BigRational> {
        self.values.get(v)
    }

    pub fn require(&self, v: &Var) -> Result<BigRational> {
        self.values
            .get(v)
            .cloned()
            .ok_or_else(|| Error::Unassigned(v.clone()))
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.values.contains_key(v)
    }

    pub fn remove(&mut self, v: &Var) -> Option<BigRational> {
        self.values.remove(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &BigRational)> {
        self.values.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn extend(&mut self, other: &Assignment) {
        for (v, x) in &other.values {
            self.values.insert(v.clone(), x.clone());
        }
    }
}

impl FromIterator<(Var, BigRational)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, BigRational)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, x) in iter {
            a.values.insert(v, x);
        }
        a
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, x)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
