use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Real,
    Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Unprimed,
    Primed,
    Bound,
}

/// A typed variable. Primed variables share their name with the unprimed
/// partner and differ only in [`Role`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    sort: Sort,
    role: Role,
}

static FRESH: AtomicU64 = AtomicU64::new(0);

impl Var {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort, role: Role) -> Self {
        Var {
            name: name.into(),
            sort,
            role,
        }
    }

    pub fn int(name: &str) -> Self {
        Var::new(name, Sort::Int, Role::Unprimed)
    }

    pub fn real(name: &str) -> Self {
        Var::new(name, Sort::Real, Role::Unprimed)
    }

    /// A bound variable with a process-wide unique name derived from `base`.
    pub fn fresh(base: &str, sort: Sort) -> Self {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        let stem = base.split('!').next().unwrap_or(base);
        Var::new(format!("{stem}!{n}"), sort, Role::Bound)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn is_int(&self) -> bool {
        self.sort == Sort::Int
    }

    pub fn is_real(&self) -> bool {
        self.sort == Sort::Real
    }

    pub fn primed(&self) -> Var {
        Var {
            name: self.name.clone(),
            sort: self.sort,
            role: Role::Primed,
        }
    }

    pub fn unprimed(&self) -> Var {
        Var {
            name: self.name.clone(),
            sort: self.sort,
            role: Role::Unprimed,
        }
    }

    pub fn with_role(&self, role: Role) -> Var {
        Var {
            name: self.name.clone(),
            sort: self.sort,
            role,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Primed => write!(f, "{}'", self.name),
            _ => f.write_str(&self.name),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sort {
            Sort::Real => "r",
            Sort::Int => "i",
        };
        write!(f, "{self}:{s}")
    }
}
