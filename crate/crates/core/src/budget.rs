//! Per-thread resource limits for the elimination engines.
//!
//! The engines charge one unit per generated branch (DNF conjunction, test
//! point, residue class). Limits are installed for the duration of a closure
//! with [`with_limits`]; outside of it nothing is enforced.

use std::cell::RefCell;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub timeout: Option<Duration>,
    pub max_branches: Option<u64>,
}

struct Active {
    deadline: Option<Instant>,
    max_branches: Option<u64>,
    spent: u64,
}

thread_local! {
    static ACTIVE: RefCell<Vec<Active>> = const { RefCell::new(Vec::new()) };
}

/// Runs `f` with `limits` in force on the current thread.
pub fn with_limits<R>(limits: Limits, f: impl FnOnce() -> R) -> R {
    struct Pop;
    impl Drop for Pop {
        fn drop(&mut self) {
            ACTIVE.with(|a| {
                a.borrow_mut().pop();
            });
        }
    }
    ACTIVE.with(|a| {
        a.borrow_mut().push(Active {
            deadline: limits.timeout.map(|t| Instant::now() + t),
            max_branches: limits.max_branches,
            spent: 0,
        })
    });
    let _pop = Pop;
    f()
}

/// Accounts `n` branches against the innermost active limits.
pub(crate) fn charge(n: u64) -> Result<()> {
    ACTIVE.with(|a| {
        let mut stack = a.borrow_mut();
        let Some(top) = stack.last_mut() else {
            return Ok(());
        };
        top.spent = top.spent.saturating_add(n);
        if let Some(max) = top.max_branches {
            if top.spent > max {
                return Err(Error::ResourceLimit(format!(
                    "branch budget of {max} exhausted"
                )));
            }
        }
        if let Some(deadline) = top.deadline {
            if Instant::now() >= deadline {
                return Err(Error::ResourceLimit("timeout".into()));
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_budget_trips() {
        let limits = Limits {
            max_branches: Some(3),
            ..Limits::default()
        };
        let r = with_limits(limits, || -> Result<()> {
            charge(2)?;
            charge(2)?;
            Ok(())
        });
        assert!(matches!(r, Err(Error::ResourceLimit(_))));
        // limits are gone afterwards
        assert!(charge(1_000_000).is_ok());
    }

    #[test]
    fn zero_timeout_trips() {
        let limits = Limits {
            timeout: Some(Duration::ZERO),
            ..Limits::default()
        };
        assert!(with_limits(limits, || charge(1)).is_err());
    }
}
